//! Delta systems: a set `Δ` of about `√q` field elements and a multiplier
//! `μ` with `μΔ − Δ = F_q`, plus the multiplier sets built on top of them.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{ceil_scaled_power, ceil_sqrt, Beta};
use crate::ff::{Field, FieldElem};

/// Which recipe produced a delta system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeltaRecipe {
    /// `Δ = {1, ..., s}` with `s = ⌈√p⌉` and `μ = s + 1`, or `μ = s` when
    /// `s + 1` leaves part of `F_p` uncovered.
    Prime { s: u32, mu_is_s_plus_one: bool },
    /// `Δ` = polynomials of degree `< h`, `μ = x^h`, for `m = 2h`.
    EvenDegree { h: u32 },
    /// `Δ = {a_h x^h + ... + a_0 : a_0 ∈ Δ(p)}`, `μ = x^h + μ(p)`, for `m = 2h + 1`.
    OddDegree { h: u32 },
    /// Supplied by the caller.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaSystem {
    field: Field,
    delta: Vec<FieldElem>,
    mu: FieldElem,
    /// Candidate small-sumset multipliers for prime-power fields (the
    /// polynomials of degree below `γ`, where `p^(γ-1) < K <= p^γ`).
    multipliers: Vec<FieldElem>,
    recipe: DeltaRecipe,
}

impl DeltaSystem {
    /// A caller-supplied system; nothing is assumed about coverage.
    pub fn new(
        field: Field,
        delta: impl IntoIterator<Item = FieldElem>,
        mu: FieldElem,
    ) -> Result<Self> {
        let mut delta: Vec<FieldElem> = delta.into_iter().collect();
        for &d in delta.iter().chain(std::iter::once(&mu)) {
            field.check(d)?;
        }
        delta.sort_unstable();
        delta.dedup();
        Ok(DeltaSystem {
            field,
            delta,
            mu,
            multipliers: Vec::new(),
            recipe: DeltaRecipe::Custom,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn delta(&self) -> &[FieldElem] {
        &self.delta
    }

    pub fn mu(&self) -> FieldElem {
        self.mu
    }

    pub fn multipliers(&self) -> &[FieldElem] {
        &self.multipliers
    }

    pub fn recipe(&self) -> DeltaRecipe {
        self.recipe
    }

    /// `|xΔ + Δ|`.
    pub fn sumset_size(&self, x: FieldElem) -> usize {
        let f = &self.field;
        let mut seen = vec![false; f.order() as usize];
        let mut count = 0;
        for &u in &self.delta {
            let xu = f.mul(x, u);
            for &v in &self.delta {
                let s = f.add(xu, v).index() as usize;
                if !seen[s] {
                    seen[s] = true;
                    count += 1;
                }
            }
        }
        count
    }

    /// Elements of `F_q` not of the form `μd − d'`, in enumeration order.
    pub fn uncovered(&self) -> Vec<FieldElem> {
        let f = &self.field;
        let mut seen = vec![false; f.order() as usize];
        for &d in &self.delta {
            let md = f.mul(self.mu, d);
            for &e in &self.delta {
                seen[f.sub(md, e).index() as usize] = true;
            }
        }
        f.elements().filter(|e| !seen[e.index() as usize]).collect()
    }

    /// For each `y`, the first `(u, v) ∈ Δ²` in enumeration order with
    /// `vμ − u = y`.
    pub fn anchor_table(&self) -> Vec<Option<(FieldElem, FieldElem)>> {
        let f = &self.field;
        let mut table = vec![None; f.order() as usize];
        for &u in &self.delta {
            for &v in &self.delta {
                let y = f.sub(f.mul(v, self.mu), u).index() as usize;
                table[y].get_or_insert((u, v));
            }
        }
        table
    }
}

fn prime_recipe(f: &Field) -> (Vec<FieldElem>, FieldElem, DeltaRecipe) {
    let p = f.characteristic() as u64;
    let s = ceil_sqrt(p);
    let delta: Vec<FieldElem> = (1..=s as i64).map(|i| f.from_int(i)).collect();
    let preferred_mu = f.from_int(s as i64 + 1);
    let probe = DeltaSystem::new(f.clone(), delta.clone(), preferred_mu).expect("elements of f");
    let (mu, plus_one) = if probe.uncovered().is_empty() {
        (preferred_mu, true)
    } else {
        // {s·i − j : 1 <= i, j <= s} is the integer interval [0, s² − 1] ⊇ [0, p).
        (f.from_int(s as i64), false)
    };
    (
        probe.delta,
        mu,
        DeltaRecipe::Prime {
            s: s as u32,
            mu_is_s_plus_one: plus_one,
        },
    )
}

/// Polynomials of degree `< d` whose coefficients are drawn from the given
/// per-degree choices (index = power of `x`).
fn polynomials(f: &Field, choices: &[Vec<u32>]) -> Vec<FieldElem> {
    let m = f.degree() as usize;
    let mut out = vec![vec![0u32; m]];
    for (power, opts) in choices.iter().enumerate() {
        out = out
            .into_iter()
            .flat_map(|c| {
                opts.iter().map(move |&o| {
                    let mut c = c.clone();
                    c[power] = o;
                    c
                })
            })
            .collect();
    }
    let mut elems: Vec<FieldElem> = out
        .iter()
        .map(|c| f.from_coeffs(c).expect("reduced coefficients"))
        .collect();
    elems.sort_unstable();
    elems
}

fn small_degree_multipliers(f: &Field, k: f64) -> Vec<FieldElem> {
    let p = f.characteristic() as f64;
    let mut gamma = 1u32;
    while (p.powi(gamma as i32)) < k && gamma < f.degree() {
        gamma += 1;
    }
    let all: Vec<u32> = (0..f.characteristic()).collect();
    polynomials(f, &vec![all; gamma as usize])
}

/// Builds `(Δ, μ)` for `F_q` following the prime, even-degree, or
/// odd-degree recipe. `k` only matters for prime powers, where it sizes the
/// candidate multiplier set.
pub fn build_delta(f: &Field, k: f64) -> Result<DeltaSystem> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!("K = {k} must be positive")));
    }
    let m = f.degree();
    let p = f.characteristic();
    let all: Vec<u32> = (0..p).collect();
    let (delta, mu, recipe) = if m == 1 {
        prime_recipe(f)
    } else if m.is_multiple_of(2) {
        let h = m / 2;
        let delta = polynomials(f, &vec![all; h as usize]);
        let mut xh = vec![0; m as usize];
        xh[h as usize] = 1;
        (delta, f.from_coeffs(&xh)?, DeltaRecipe::EvenDegree { h })
    } else {
        let h = (m - 1) / 2;
        let base = Field::prime(p)?;
        let (base_delta, base_mu, _) = prime_recipe(&base);
        let constants: Vec<u32> = base_delta.iter().map(|e| e.index()).collect();
        let mut choices = vec![constants];
        choices.extend(std::iter::repeat_n(all, h as usize));
        let delta = polynomials(f, &choices);
        let mut mu = vec![0; m as usize];
        mu[h as usize] = 1;
        mu[0] = base_mu.index();
        (delta, f.from_coeffs(&mu)?, DeltaRecipe::OddDegree { h })
    };
    let mut system = DeltaSystem::new(f.clone(), delta, mu)?;
    system.recipe = recipe;
    if m > 1 {
        system.multipliers = small_degree_multipliers(f, k);
    }
    debug_assert!(system.uncovered().is_empty(), "recipe must cover F_q");
    Ok(system)
}

/// Largest field for which [`verify_delta`] tabulates every sumset.
const HISTOGRAM_BUDGET: u64 = 200_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaReport {
    pub q: u32,
    pub delta_size: usize,
    pub sqrt_q: f64,
    /// `|Δ| <= 2√q + 2`, checked exactly.
    pub size_within_bound: bool,
    pub covered: bool,
    pub uncovered: usize,
    /// `|xΔ + Δ|` → number of `x ∈ F_q` attaining it; absent when the field
    /// is too large to tabulate.
    pub sumset_histogram: Option<BTreeMap<usize, usize>>,
    /// `(multiplier index, |xΔ + Δ|)` for the candidate multipliers.
    pub multiplier_sumsets: Vec<(u32, usize)>,
}

pub fn verify_delta(d: &DeltaSystem) -> DeltaReport {
    let q = d.field.order();
    let size = d.delta.len() as u64;
    // |Δ| <= 2√q + 2  <=>  |Δ| <= 2 or (|Δ| − 2)² <= 4q.
    let size_within_bound = size <= 2 || (size - 2).pow(2) <= 4 * q as u64;
    let uncovered = d.uncovered().len();
    let work = q as u64 * size * size;
    let sumset_histogram = (work <= HISTOGRAM_BUDGET).then(|| {
        let mut h = BTreeMap::new();
        for x in d.field.elements() {
            *h.entry(d.sumset_size(x)).or_insert(0) += 1;
        }
        h
    });
    DeltaReport {
        q,
        delta_size: d.delta.len(),
        sqrt_q: (q as f64).sqrt(),
        size_within_bound,
        covered: uncovered == 0,
        uncovered,
        sumset_histogram,
        multiplier_sumsets: d
            .multipliers
            .iter()
            .map(|&x| (x.index(), d.sumset_size(x)))
            .collect(),
    }
}

/// Result of `L(r) = |{x ∈ F_p : x ≠ −μ, |xΔ + Δ| <= r}|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LCount {
    pub count: usize,
    pub xs: Vec<FieldElem>,
}

pub fn compute_l(d: &DeltaSystem, r: usize) -> Result<LCount> {
    let f = &d.field;
    if !f.is_prime_field() {
        return Err(Error::Unsupported(
            "L(r) is defined for prime fields only".into(),
        ));
    }
    let minus_mu = f.neg(d.mu);
    let xs: Vec<FieldElem> = f
        .elements()
        .filter(|&x| x != minus_mu && d.sumset_size(x) <= r)
        .collect();
    Ok(LCount {
        count: xs.len(),
        xs,
    })
}

/// Why an element was kept out of a multiplier set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    /// `x = −μ`, the exception in the definition of `L(r)`.
    MinusMu,
    /// `xμ + 1 = 0`, where the construction's denominator vanishes.
    ZeroDenominator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSet {
    pub xs: Vec<FieldElem>,
    /// `|xΔ + Δ|` for each entry of `xs`.
    pub sumsets: Vec<usize>,
    pub beta: Beta,
    pub k: f64,
    /// `⌈K q^β⌉`.
    pub target: u64,
    pub max_sumset: usize,
    pub excluded: Vec<(FieldElem, Exclusion)>,
}

/// The `⌈K q^β⌉` non-degenerate multipliers with the smallest sumsets
/// `|xΔ + Δ|`, ties broken by enumeration order.
///
/// A request for the whole field (`⌈K q^β⌉ >= q`) is capped at the
/// non-degenerate elements; any other shortfall is an error.
pub fn build_x(d: &DeltaSystem, beta: Beta, k: f64) -> Result<MultiplierSet> {
    let f = &d.field;
    if !f.is_prime_field() {
        return Err(Error::Unsupported(
            "multiplier sets are built over prime fields".into(),
        ));
    }
    let q = f.order() as u64;
    let target = ceil_scaled_power(k, q, beta)?;
    let mut excluded = vec![(f.neg(d.mu), Exclusion::MinusMu)];
    if let Ok(inv) = f.inv(d.mu) {
        let zero_den = f.neg(inv);
        if !excluded.iter().any(|(x, _)| *x == zero_den) {
            excluded.push((zero_den, Exclusion::ZeroDenominator));
        }
    }
    let mut candidates: Vec<(usize, FieldElem)> = f
        .elements()
        .filter(|x| !excluded.iter().any(|(e, _)| e == x))
        .map(|x| (d.sumset_size(x), x))
        .collect();
    candidates.sort_unstable();
    let take = (target as usize).min(candidates.len());
    if (take as u64) < target && target < q {
        return Err(Error::NotEnoughMultipliers(format!(
            "need {target} multipliers but only {} of {q} elements are non-degenerate",
            candidates.len()
        )));
    }
    candidates.truncate(take);
    Ok(MultiplierSet {
        max_sumset: candidates.iter().map(|c| c.0).max().unwrap_or(0),
        sumsets: candidates.iter().map(|c| c.0).collect(),
        xs: candidates.into_iter().map(|c| c.1).collect(),
        beta,
        k,
        target,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ints(f: &Field, v: &[i64]) -> Vec<FieldElem> {
        v.iter().map(|&x| f.from_int(x)).collect()
    }

    /// Independent oracle: |xΔ + Δ| by set construction over integers mod p.
    fn sumset_oracle(p: i64, x: i64, delta: &[i64]) -> usize {
        delta
            .iter()
            .flat_map(|u| delta.iter().map(move |v| (x * u + v).rem_euclid(p)))
            .collect::<BTreeSet<_>>()
            .len()
    }

    #[test]
    fn prime_examples() {
        let f7 = Field::prime(7).unwrap();
        let d = build_delta(&f7, 1.0).unwrap();
        assert_eq!(d.delta(), ints(&f7, &[1, 2, 3]).as_slice());
        assert_eq!(d.mu(), f7.from_int(4));
        assert!(verify_delta(&d).covered);

        let f5 = Field::prime(5).unwrap();
        let d = build_delta(&f5, 1.0).unwrap();
        assert_eq!(d.delta(), ints(&f5, &[1, 2, 3]).as_slice());
        assert_eq!(d.mu(), f5.from_int(4));
        assert!(d.uncovered().is_empty());
    }

    #[test]
    fn prime_recipe_falls_back_when_s_plus_one_misses() {
        // For p = 13: 5·{1,2,3,4} − {1,2,3,4} misses 10, so μ = 4 is used.
        let f13 = Field::prime(13).unwrap();
        let custom =
            DeltaSystem::new(f13.clone(), ints(&f13, &[1, 2, 3, 4]), f13.from_int(5)).unwrap();
        assert_eq!(custom.uncovered(), vec![f13.from_int(10)]);
        let d = build_delta(&f13, 1.0).unwrap();
        assert_eq!(d.delta(), ints(&f13, &[1, 2, 3, 4]).as_slice());
        assert_eq!(d.mu(), f13.from_int(4));
        assert!(matches!(
            d.recipe(),
            DeltaRecipe::Prime {
                s: 4,
                mu_is_s_plus_one: false
            }
        ));
    }

    #[test]
    fn f9_system() {
        let f9 = Field::new(3, 2).unwrap();
        let d = build_delta(&f9, 2.0).unwrap();
        assert_eq!(d.delta(), ints(&f9, &[0, 1, 2]).as_slice());
        assert_eq!(d.mu(), f9.x_bar().unwrap());
        assert!(verify_delta(&d).covered);
    }

    #[test]
    fn degenerate_system_is_reported() {
        let f = Field::prime(7).unwrap();
        let d = DeltaSystem::new(f.clone(), [f.zero()], f.from_int(3)).unwrap();
        let report = verify_delta(&d);
        assert!(!report.covered);
        assert_eq!(report.uncovered, 6);
    }

    #[test]
    fn every_supported_recipe_covers() {
        for q in [
            2u64, 3, 4, 5, 7, 8, 9, 11, 16, 25, 27, 32, 49, 64, 81, 121, 125, 128, 243,
        ] {
            let f = Field::of_order(q).unwrap();
            let d = build_delta(&f, 2.0).unwrap();
            let r = verify_delta(&d);
            assert!(r.covered, "q = {q}");
            assert!(r.size_within_bound, "q = {q}, |Δ| = {}", r.delta_size);
        }
    }

    #[test]
    fn l_counts() {
        let f7 = Field::prime(7).unwrap();
        let d = DeltaSystem::new(f7.clone(), ints(&f7, &[1, 2, 3]), f7.from_int(4)).unwrap();
        assert_eq!(compute_l(&d, 7).unwrap().count, 6);
        let l5 = compute_l(&d, 5).unwrap();
        assert_eq!(l5.count, 3);
        assert_eq!(l5.xs, ints(&f7, &[0, 1, 6]));
        for r in 7..20 {
            assert_eq!(compute_l(&d, r).unwrap().count, 6);
        }
        let f9 = Field::new(3, 2).unwrap();
        let d9 = build_delta(&f9, 1.0).unwrap();
        assert!(matches!(compute_l(&d9, 3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn sumsets_agree_with_integer_oracle() {
        for p in [5i64, 7, 11, 13, 29] {
            let f = Field::prime(p as u32).unwrap();
            let d = build_delta(&f, 1.0).unwrap();
            let delta: Vec<i64> = d.delta().iter().map(|e| e.index() as i64).collect();
            for x in 0..p {
                assert_eq!(d.sumset_size(f.from_int(x)), sumset_oracle(p, x, &delta));
            }
        }
    }

    #[test]
    fn rational_multipliers_have_small_sumsets() {
        // x = a/b with 1 <= a, b <= t gives |xΔ + Δ| = |aΔ + bΔ| <= 2t(⌈√p⌉ + 1).
        for p in [11u32, 29, 53, 97] {
            let f = Field::prime(p).unwrap();
            let d = build_delta(&f, 1.0).unwrap();
            let s = ceil_sqrt(p as u64) as usize;
            for t in 1..=4i64 {
                for a in 1..=t {
                    for b in 1..=t {
                        let x = f.div(f.from_int(a), f.from_int(b)).unwrap();
                        assert!(d.sumset_size(x) <= 2 * t as usize * (s + 1));
                    }
                }
            }
        }
    }

    #[test]
    fn multiplier_selection() {
        let f13 = Field::prime(13).unwrap();
        let d = build_delta(&f13, 1.0).unwrap();
        let x = build_x(&d, Beta::HALF, 1.0).unwrap();
        assert_eq!(x.xs.len(), 4);
        assert!(x.max_sumset <= 10);
        // Oracle ranking with the same exclusions.
        let delta: Vec<i64> = d.delta().iter().map(|e| e.index() as i64).collect();
        let excluded: Vec<i64> = x.excluded.iter().map(|(e, _)| e.index() as i64).collect();
        let mut ranked: Vec<(usize, i64)> = (0..13)
            .filter(|v| !excluded.contains(v))
            .map(|v| (sumset_oracle(13, v, &delta), v))
            .collect();
        ranked.sort();
        let expect: Vec<FieldElem> = ranked[..4].iter().map(|r| f13.from_int(r.1)).collect();
        assert_eq!(x.xs, expect);
        // x = 0 gives Δ itself; x = ±1 give |Δ ± Δ| = 2|Δ| − 1.
        assert_eq!(x.sumsets[..3], [4, 7, 7]);

        let single = build_x(&d, Beta::new(0, 1).unwrap(), 1.0).unwrap();
        assert_eq!(single.xs.len(), 1);
        assert_eq!(single.xs[0], f13.zero());

        let f7 = Field::prime(7).unwrap();
        let d7 = build_delta(&f7, 1.0).unwrap();
        let all = build_x(&d7, Beta::new(1, 1).unwrap(), 1.0).unwrap();
        assert_eq!(all.target, 7);
        // −μ = 3 and −μ⁻¹ = 5 are both excluded.
        assert_eq!(all.xs.len(), 5);
        assert!(all
            .xs
            .iter()
            .all(|&a| !f7.add(f7.mul(a, d7.mu()), f7.one()).is_zero()));
        assert!(matches!(
            build_x(&d7, Beta::new(1, 1).unwrap(), 0.8),
            Err(Error::NotEnoughMultipliers(_))
        ));
    }

    #[test]
    fn prime_power_multipliers() {
        for q in [16u64, 25, 32] {
            let f = Field::of_order(q).unwrap();
            let d = build_delta(&f, 2.0).unwrap();
            let report = verify_delta(&d);
            let small = report
                .multiplier_sumsets
                .iter()
                .filter(|(_, s)| (*s as u64).pow(2) <= 64 * q)
                .count();
            assert!(small >= 2, "q = {q}: {:?}", report.multiplier_sumsets);
        }
    }
}
