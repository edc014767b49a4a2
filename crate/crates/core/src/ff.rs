//! Exact arithmetic in prime fields `F_p` and extension fields `F_{p^m}`.
//!
//! An extension field is realised as `F_p[x]/(P(x))` for a monic irreducible
//! `P` of degree `m`. Elements are stored as a packed enumeration index: the
//! coefficient of `x^i` is the base-`p` digit of weight `p^(m-1-i)`, so that
//! index order coincides with lexicographic order on the coefficient
//! sequence read constant term first.

use crate::error::{Error, Result};

/// Largest field order accepted anywhere in the crate. Every verifier in the
/// crate is exhaustive, so fields beyond this are rejected up front.
pub const MAX_ORDER: u64 = 1 << 20;

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Splits a prime power `q = p^m` into `(p, m)`.
pub fn prime_power(q: u64) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d)).unwrap_or(q);
    let (mut rest, mut m) = (q, 0u32);
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    if rest != 1 {
        return Err(Error::InvalidParameter(format!("{q} is not a prime power")));
    }
    Ok((p as u32, m))
}

fn check_scale(p: u32, m: u32) -> Result<u32> {
    let q = (p as u64).checked_pow(m).filter(|q| *q <= MAX_ORDER);
    match q {
        Some(q) => Ok(q as u32),
        None => Err(Error::UnsupportedScale(format!(
            "field order {p}^{m} exceeds the supported maximum {MAX_ORDER}"
        ))),
    }
}

/// Remainder of `num` modulo the monic polynomial `den` over `F_p`.
/// Both are coefficient vectors, constant term first.
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let p = p as u64;
    let mut rem: Vec<u64> = num.iter().map(|&c| c as u64).collect();
    let dd = den.len() - 1;
    debug_assert_eq!(den[dd], 1);
    while rem.len() > dd {
        let top = rem.len() - 1;
        let c = rem[top] % p;
        if c != 0 {
            for (i, &d) in den.iter().enumerate() {
                let idx = top - dd + i;
                rem[idx] = (rem[idx] + (p - c) * d as u64) % p;
            }
        }
        rem.pop();
    }
    rem.into_iter().map(|c| (c % p) as u32).collect()
}

fn has_root(poly: &[u32], p: u32) -> bool {
    (0..p as u64).any(|r| {
        let v = poly
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * r + c as u64) % p as u64);
        v == 0
    })
}

/// Irreducibility of a monic polynomial over `F_p`: root test, then an
/// exhaustive scan of monic divisors up to half the degree.
pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let deg = poly.len().saturating_sub(1);
    if deg == 0 || poly[deg] != 1 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    if has_root(poly, p) {
        return false;
    }
    if deg <= 3 {
        return true;
    }
    for d in 2..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for k in 0..count {
            let mut divisor: Vec<u32> = (0..d)
                .map(|i| ((k / (p as u64).pow(i as u32)) % p as u64) as u32)
                .collect();
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest (constant term first) monic irreducible
/// polynomial of degree `m` over `F_p`; `None` for `m = 1`.
pub fn find_irreducible(p: u32, m: u32) -> Result<Option<Vec<u32>>> {
    if !is_prime(p as u64) {
        return Err(Error::InvalidParameter(format!("{p} is not prime")));
    }
    if m == 0 {
        return Err(Error::InvalidParameter(
            "extension degree must be at least 1".into(),
        ));
    }
    check_scale(p, m)?;
    if m == 1 {
        return Ok(None);
    }
    let total = (p as u64).pow(m);
    for k in 0..total {
        let mut poly: Vec<u32> = (0..m)
            .map(|i| ((k / (p as u64).pow(m - 1 - i)) % p as u64) as u32)
            .collect();
        poly.push(1);
        if is_irreducible(p, &poly) {
            return Ok(Some(poly));
        }
    }
    // Irreducible polynomials of every degree exist over every prime field.
    unreachable!("no irreducible polynomial of degree {m} over F_{p}")
}

/// An element of some [`Field`], stored as its enumeration index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);

    /// Position of the element in [`Field::elements`].
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A finite field `F_{p^m}`. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    modulus: Option<Vec<u32>>,
    /// `weights[i] = p^(m-1-i)`, the place value of the `x^i` coefficient.
    weights: Vec<u32>,
}

impl Field {
    /// `F_{p^m}` with the deterministic modulus from [`find_irreducible`].
    pub fn new(p: u32, m: u32) -> Result<Field> {
        let modulus = find_irreducible(p, m)?;
        Ok(Self::assemble(p, m, modulus))
    }

    pub fn prime(p: u32) -> Result<Field> {
        Self::new(p, 1)
    }

    /// Field of order `q`, which must be a prime power.
    pub fn of_order(q: u64) -> Result<Field> {
        let (p, m) = prime_power(q)?;
        Self::new(p, m)
    }

    /// `F_p[x]/(modulus)`; the modulus must be monic and irreducible.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Field> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        if modulus.len() < 2 {
            return Err(Error::InvalidParameter(
                "modulus must have degree at least 1".into(),
            ));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidParameter(format!(
                "modulus coefficients must lie in [0, {p})"
            )));
        }
        let m = (modulus.len() - 1) as u32;
        check_scale(p, m)?;
        if !is_irreducible(p, &modulus) {
            return Err(Error::InvalidParameter(format!(
                "modulus {modulus:?} is not monic irreducible over F_{p}"
            )));
        }
        let modulus = (m > 1).then_some(modulus);
        Ok(Self::assemble(p, m, modulus))
    }

    fn assemble(p: u32, m: u32, modulus: Option<Vec<u32>>) -> Field {
        let weights = (0..m).map(|i| p.pow(m - 1 - i)).collect();
        Field {
            p,
            m,
            q: p.pow(m),
            modulus,
            weights,
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn is_prime_field(&self) -> bool {
        self.m == 1
    }

    /// Monic modulus, constant term first; `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(self.weights[0])
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, v: i64) -> FieldElem {
        let c = v.rem_euclid(self.p as i64) as u32;
        FieldElem(c * self.weights[0])
    }

    pub fn from_index(&self, index: u32) -> Result<FieldElem> {
        if index < self.q {
            Ok(FieldElem(index))
        } else {
            Err(Error::InvalidElement(format!(
                "index {index} outside a field of order {}",
                self.q
            )))
        }
    }

    /// Element with the given coefficients (constant term first).
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem> {
        if coeffs.len() != self.m as usize {
            return Err(Error::InvalidElement(format!(
                "expected {} coefficients, got {}",
                self.m,
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::InvalidElement(format!(
                "coefficient {c} not reduced mod {}",
                self.p
            )));
        }
        Ok(FieldElem(
            coeffs.iter().zip(&self.weights).map(|(c, w)| c * w).sum(),
        ))
    }

    pub fn coeffs(&self, e: FieldElem) -> Vec<u32> {
        self.weights.iter().map(|w| (e.0 / w) % self.p).collect()
    }

    /// The class of `x` in `F_p[x]/(P)`; only defined for extensions.
    pub fn x_bar(&self) -> Result<FieldElem> {
        if self.m < 2 {
            return Err(Error::Unsupported(
                "x is not a field element of a prime field".into(),
            ));
        }
        Ok(FieldElem(self.weights[1]))
    }

    pub fn contains(&self, e: FieldElem) -> bool {
        e.0 < self.q
    }

    pub fn check(&self, e: FieldElem) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::InvalidElement(format!(
                "index {} outside a field of order {}",
                e.0, self.q
            )))
        }
    }

    /// All `q` elements in enumeration order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.q).map(FieldElem)
    }

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.m == 1 {
            return FieldElem((a.0 + b.0) % self.p);
        }
        let mut out = 0;
        for &w in &self.weights {
            out += ((a.0 / w % self.p + b.0 / w % self.p) % self.p) * w;
        }
        FieldElem(out)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.m == 1 {
            return FieldElem((self.p - a.0) % self.p);
        }
        let mut out = 0;
        for &w in &self.weights {
            out += ((self.p - a.0 / w % self.p) % self.p) * w;
        }
        FieldElem(out)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.p as u64;
        if self.m == 1 {
            return FieldElem((a.0 as u64 * b.0 as u64 % p) as u32);
        }
        let m = self.m as usize;
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in ca.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        let modulus = self
            .modulus
            .as_ref()
            .expect("extension field has a modulus");
        for top in (m..2 * m - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for (i, &d) in modulus[..m].iter().enumerate() {
                let idx = top - m + i;
                prod[idx] = (prod[idx] + (p - c) * d as u64) % p;
            }
            prod[top] = 0;
        }
        FieldElem(
            prod[..m]
                .iter()
                .zip(&self.weights)
                .map(|(&c, &w)| c as u32 * w)
                .sum(),
        )
    }

    pub fn pow(&self, a: FieldElem, mut exp: u64) -> FieldElem {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse, computed as `a^(q-2)`.
    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Checked product of two elements that may come from untrusted input.
    pub fn mul_checked(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }
}
