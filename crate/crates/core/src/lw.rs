//! Loomis-Whitney near-equality refinement on abstract grids `T ⊆ B^n`.
//!
//! Coordinates are zero-based: the fibers of `T` are the classes of the
//! projection onto the first `m` coordinates, and the remaining `k = n − m`
//! coordinates are the "tail". All pass/fail decisions are made on exact
//! integer cross-multiplications.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{big, big_pow};
use crate::par;

/// A finite set of integer `n`-tuples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GridDoc", into = "GridDoc")]
pub struct GridSet {
    n: usize,
    elements: BTreeSet<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct GridDoc {
    n: usize,
    elements: Vec<Vec<i64>>,
}

impl TryFrom<GridDoc> for GridSet {
    type Error = Error;

    fn try_from(doc: GridDoc) -> Result<GridSet> {
        GridSet::new(doc.n, doc.elements)
    }
}

impl From<GridSet> for GridDoc {
    fn from(g: GridSet) -> GridDoc {
        GridDoc {
            n: g.n,
            elements: g.elements.into_iter().collect(),
        }
    }
}

impl GridSet {
    pub fn new(n: usize, elements: impl IntoIterator<Item = Vec<i64>>) -> Result<GridSet> {
        if n == 0 {
            return Err(Error::InvalidInput("grid arity must be positive".into()));
        }
        let elements: BTreeSet<Vec<i64>> = elements.into_iter().collect();
        if let Some(bad) = elements.iter().find(|e| e.len() != n) {
            return Err(Error::InvalidInput(format!(
                "tuple {bad:?} does not have arity {n}"
            )));
        }
        Ok(GridSet { n, elements })
    }

    /// The full cube `[0, b)^n`.
    pub fn cube(n: usize, b: i64) -> Result<GridSet> {
        let axes = (0..n).map(|_| 0..b);
        GridSet::new(n, itertools::Itertools::multi_cartesian_product(axes))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &BTreeSet<Vec<i64>> {
        &self.elements
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.elements.contains(x)
    }

    pub fn is_subset(&self, other: &GridSet) -> bool {
        self.n == other.n && self.elements.is_subset(&other.elements)
    }

    /// Image under the projection onto `indices` (zero-based, strictly
    /// ascending).
    pub fn project(&self, indices: &[usize]) -> Result<GridSet> {
        if indices.is_empty()
            || indices.windows(2).any(|w| w[0] >= w[1])
            || indices[indices.len() - 1] >= self.n
        {
            return Err(Error::IndexOutOfRange(format!(
                "projection indices {indices:?} must be non-empty, strictly ascending and below {}",
                self.n
            )));
        }
        Ok(GridSet {
            n: indices.len(),
            elements: self.elements.iter().map(|x| pick(x, indices)).collect(),
        })
    }

    /// Size of the projection forgetting coordinate `j`.
    pub fn hat_size(&self, j: usize) -> usize {
        self.elements
            .iter()
            .map(|x| drop_coord(x, j))
            .collect::<HashSet<_>>()
            .len()
    }

    /// `|Pr_{k̂}(T)|` for every coordinate `k`.
    pub fn hat_sizes(&self) -> Vec<usize> {
        (0..self.n).map(|j| self.hat_size(j)).collect()
    }

    /// Fibers of the projection onto the first `m` coordinates: prefix to
    /// the tails of the elements above it.
    pub fn fibers(&self, m: usize) -> BTreeMap<Vec<i64>, Vec<Vec<i64>>> {
        let mut out: BTreeMap<Vec<i64>, Vec<Vec<i64>>> = BTreeMap::new();
        for x in &self.elements {
            out.entry(x[..m].to_vec())
                .or_default()
                .push(x[m..].to_vec());
        }
        out
    }

    fn retain_fibers(&self, m: usize, keep: impl Fn(&[i64]) -> bool) -> GridSet {
        GridSet {
            n: self.n,
            elements: self
                .elements
                .iter()
                .filter(|x| keep(&x[..m]))
                .cloned()
                .collect(),
        }
    }
}

fn pick(x: &[i64], indices: &[usize]) -> Vec<i64> {
    indices.iter().map(|&i| x[i]).collect()
}

fn drop_coord(x: &[i64], j: usize) -> Vec<i64> {
    x.iter()
        .enumerate()
        .filter(|&(i, _)| i != j)
        .map(|(_, &v)| v)
        .collect()
}

/// The Loomis-Whitney bound `(∏_k |Pr_{k̂}(T)|)^{1/(n−1)}`, kept as the exact
/// product and root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LwBound {
    #[serde(serialize_with = "ser_big")]
    pub product: BigUint,
    pub root: u32,
    pub value: f64,
}

impl LwBound {
    /// `bound >= t`, decided exactly.
    pub fn dominates(&self, t: usize) -> bool {
        self.product >= big_pow(t as u64, self.root)
    }

    /// `bound == t`, decided exactly.
    pub fn is_tight(&self, t: usize) -> bool {
        self.product == big_pow(t as u64, self.root)
    }
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn lw_bound(t: &GridSet) -> Result<LwBound> {
    if t.n < 2 {
        return Err(Error::InvalidInput(
            "the Loomis-Whitney bound needs n >= 2".into(),
        ));
    }
    let product: BigUint = t.hat_sizes().into_iter().map(|s| big(s as u64)).product();
    let root = (t.n - 1) as u32;
    let value = product
        .to_f64()
        .unwrap_or(f64::INFINITY)
        .powf(1.0 / root as f64);
    Ok(LwBound {
        product,
        root,
        value,
    })
}

/// Measured quantities and exact checks of one refinement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefineCertificate {
    pub n: usize,
    pub m: usize,
    /// The removal constant `c` (`100 n` by default).
    pub constant: u64,
    /// `N = max_k |Pr_{k̂}(T)|`.
    #[serde(rename = "N")]
    pub big_n: u64,
    pub t0: u64,
    pub t1: u64,
    pub t2: u64,
    /// Number of fibers of `T₁`.
    pub fibers_t1: u64,
    /// Number of fibers of `T₂`, i.e. `|Pr_{first m}(T₂)|`.
    pub max_fibers: u64,
    /// Smallest `a_j(y)` over fibers `y` of `T₂` and tail coordinates `j`;
    /// absent when `k < 2`.
    pub min_aj: Option<u64>,
    pub min_fiber: u64,
    /// Largest `|Pr_{first m without j}(T₂)|` over `j < m`.
    pub max_dropped_image: u64,
    /// Points removed through each `U_j`, indexed by tail coordinate.
    pub removed_by_u: Vec<u64>,
    /// Conclusions 1 to 4.
    pub bounds_ok: [bool; 4],
    pub mass_t1_ok: bool,
    pub mass_t2_ok: bool,
    pub subset_ok: bool,
}

impl RefineCertificate {
    pub fn passes(&self) -> bool {
        self.bounds_ok.iter().all(|&b| b) && self.mass_t1_ok && self.mass_t2_ok && self.subset_ok
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub t1: GridSet,
    pub t2: GridSet,
    pub certificate: RefineCertificate,
}

pub fn default_constant(n: usize) -> u64 {
    100 * n as u64
}

/// `a_j(y)` for every tail coordinate: the number of distinct tails after
/// forgetting coordinate `j`.
fn tail_projections(tails: &[Vec<i64>]) -> Vec<u64> {
    let k = tails.first().map_or(0, Vec::len);
    (0..k)
        .map(|j| {
            tails
                .iter()
                .map(|x| drop_coord(x, j))
                .collect::<HashSet<_>>()
                .len() as u64
        })
        .collect()
}

fn check_m(t: &GridSet, m: usize) -> Result<()> {
    if m == 0 || m > t.n {
        return Err(Error::IndexOutOfRange(format!(
            "m = {m} must lie in [1, {}]",
            t.n
        )));
    }
    Ok(())
}

/// Refines `T` so that its first-`m` fibers are rich and uniform.
///
/// For `m = n` nothing is removed. For `m = n − 1` the fibers of size below
/// `|T|/(2N)` are dropped. Otherwise fibers in any
/// `U_j = {y : (∏_l a_l(y))^{1/(k−1)} ≤ a_j(y)|T|/(cN)}` are dropped to give
/// `T₁`, and then fibers of `T₁` below `|T₁|/(2F₁)` to give `T₂`.
pub fn refine(t: &GridSet, m: usize, constant: u64) -> Result<Refinement> {
    check_m(t, m)?;
    if t.is_empty() {
        return Err(Error::InvalidInput("cannot refine an empty grid".into()));
    }
    if constant == 0 {
        return Err(Error::InvalidParameter(
            "removal constant must be positive".into(),
        ));
    }
    let n = t.n;
    let k = n - m;
    let size = t.len() as u64;
    let big_n = t.hat_sizes().into_iter().max().unwrap_or(0) as u64;
    let mut removed_by_u = vec![0u64; k];

    let (t1, t2) = match k {
        0 => (t.clone(), t.clone()),
        1 => {
            let fibers = t.fibers(m);
            let keep: HashSet<&Vec<i64>> = fibers
                .iter()
                .filter(|(_, tails)| 2 * big_n * tails.len() as u64 >= size)
                .map(|(y, _)| y)
                .collect();
            (
                t.clone(),
                t.retain_fibers(m, |y| keep.contains(&y.to_vec())),
            )
        }
        _ => {
            let fibers: Vec<(Vec<i64>, Vec<Vec<i64>>)> = t.fibers(m).into_iter().collect();
            let stats = par::map(&fibers, |(_, tails)| tail_projections(tails));
            let cn_pow = big_pow(constant * big_n, (k - 1) as u32);
            let mut dropped = HashSet::new();
            for ((y, tails), a) in fibers.iter().zip(&stats) {
                let lhs: BigUint = a.iter().map(|&v| big(v)).product::<BigUint>() * &cn_pow;
                // Attribute the removal to the first U_j containing y.
                if let Some(j) = (0..k).find(|&j| lhs <= big_pow(a[j] * size, (k - 1) as u32)) {
                    removed_by_u[j] += tails.len() as u64;
                    dropped.insert(y.clone());
                }
            }
            let t1 = t.retain_fibers(m, |y| !dropped.contains(y));
            let f1 = t1.fibers(m).len() as u64;
            let t1_size = t1.len() as u64;
            let fibers1 = t1.fibers(m);
            let t2 = t1.retain_fibers(m, |y| 2 * f1 * fibers1[y].len() as u64 >= t1_size);
            (t1, t2)
        }
    };

    let mut certificate = verify_certificate(t, &t1, &t2, m, constant)?;
    certificate.removed_by_u = removed_by_u;
    Ok(Refinement {
        t1,
        t2,
        certificate,
    })
}

/// Recomputes every quantity of a refinement `T ⊇ T₁ ⊇ T₂` from scratch
/// and checks, with `t = |T|` and `k = n − m`:
///
/// 1. `a_j(y) · (cN)^{k−1} ≥ t^{k−1}` for all fibers `y` of `T₂` (when `k ≥ 2`);
/// 2. `|Pr_{first m}(T₂)| · t^{k−1} ≤ c^{k−1} N^k`;
/// 3. `200 · min fiber · c^{k−1} N^k ≥ 99 t^k`;
/// 4. `99 · |Pr_{first m without j}(T₂)| · t^k ≤ 200 c^{k−1} N^{k+1}` for all `j < m`;
///
/// together with `c|T₁| ≥ (c − k)t`, `100|T₁| ≥ 99t` and `2|T₂| > |T₁|`.
/// For `m = n − 1` conclusions 3 and 4 also require `2N · fiber ≥ t` and
/// `|Pr_{first m without j}(T₂)| · t ≤ 2N²`. For `m = n` every conclusion
/// holds vacuously.
pub fn verify_certificate(
    t: &GridSet,
    t1: &GridSet,
    t2: &GridSet,
    m: usize,
    constant: u64,
) -> Result<RefineCertificate> {
    check_m(t, m)?;
    let n = t.n;
    let k = n - m;
    let size = t.len() as u64;
    let big_n = t.hat_sizes().into_iter().max().unwrap_or(0) as u64;
    let subset_ok = t2.is_subset(t1) && t1.is_subset(t);

    let fibers2 = t2.fibers(m);
    let f2 = fibers2.len() as u64;
    let min_fiber = fibers2.values().map(|v| v.len() as u64).min().unwrap_or(0);
    let min_aj = if k >= 2 {
        fibers2
            .values()
            .flat_map(|tails| tail_projections(tails))
            .min()
    } else {
        None
    };
    let max_dropped_image = (0..m)
        .map(|j| {
            if m == 1 {
                u64::from(!t2.is_empty())
            } else {
                t2.project(&(0..m).filter(|&i| i != j).collect::<Vec<_>>())
                    .map_or(0, |g| g.len() as u64)
            }
        })
        .max()
        .unwrap_or(0);

    let mut cert = RefineCertificate {
        n,
        m,
        constant,
        big_n,
        t0: size,
        t1: t1.len() as u64,
        t2: t2.len() as u64,
        fibers_t1: t1.fibers(m).len() as u64,
        max_fibers: f2,
        min_aj,
        min_fiber,
        max_dropped_image,
        removed_by_u: vec![0; k],
        bounds_ok: [true; 4],
        mass_t1_ok: true,
        mass_t2_ok: true,
        subset_ok,
    };
    if k == 0 {
        cert.mass_t1_ok = t1 == t;
        cert.mass_t2_ok = t2 == t;
        return Ok(cert);
    }

    let ku = k as u32;
    let c_pow = big_pow(constant, ku - 1);
    let t_pow_k1 = big_pow(size, ku - 1);
    let t_pow_k = big_pow(size, ku);
    let n_pow_k = big_pow(big_n, ku);

    cert.bounds_ok[0] =
        min_aj.is_none_or(|a| big(a) * big_pow(constant * big_n, ku - 1) >= t_pow_k1);
    cert.bounds_ok[1] = big(f2) * &t_pow_k1 <= &c_pow * &n_pow_k;
    cert.bounds_ok[2] = big(200 * min_fiber) * &c_pow * &n_pow_k >= big(99) * &t_pow_k;
    cert.bounds_ok[3] =
        big(99 * max_dropped_image) * &t_pow_k <= big(200) * &c_pow * &n_pow_k * big(big_n);
    if k == 1 {
        cert.bounds_ok[2] &= 2 * big_n * min_fiber >= size;
        cert.bounds_ok[3] &= big(max_dropped_image) * big(size) <= big(2) * big_pow(big_n, 2);
    }

    let t1_size = cert.t1;
    cert.mass_t1_ok = big(constant) * big(t1_size)
        >= big(constant.saturating_sub(k as u64)) * big(size)
        && 100 * t1_size >= 99 * size;
    cert.mass_t2_ok = 2 * cert.t2 > t1_size;
    Ok(cert)
}
