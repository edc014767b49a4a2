use std::collections::BTreeSet;

use itertools::Itertools;

use super::{
    build_delta, build_x, symmetrize, witness_lines, DeltaSystem, FurstenbergInstance,
    MultiplierSet,
};
use crate::error::{Error, Result};
use crate::exact::Beta;
use crate::ff::{Field, FieldElem};
use crate::geometry::Point;

/// The prime-field construction with the intermediate objects it used.
#[derive(Debug, Clone)]
pub struct PrimeConstruction {
    pub instance: FurstenbergInstance,
    pub delta: DeltaSystem,
    pub multipliers: MultiplierSet,
    /// `E_1` before symmetrization.
    pub e1: BTreeSet<Point>,
}

/// `S ⊆ F_p^n` meeting a line in every direction in at least `⌈K p^β⌉`
/// points (up to excluded degenerate multipliers), of size about
/// `p^((n−1)/2 + (n+1)β/2)`.
///
/// `E_1 = {(1/(aμ+1), (a u_j + v_j) μ/(aμ+1)) : a ∈ X, u, v ∈ Δ^(n−1)}`, and
/// `S` is the union of the coordinate-swapped copies of `E_1`.
pub fn build_prime_furstenberg(p: u32, n: usize, beta: Beta, k: f64) -> Result<PrimeConstruction> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} must be at least 2"
        )));
    }
    if beta == Beta::new(1, 1)? && k > 1.0 {
        return Err(Error::InvalidParameter("β = 1 requires K <= 1".into()));
    }
    let f = Field::prime(p)?;
    check_space(&f, n)?;
    let delta = build_delta(&f, k)?;
    let multipliers = build_x(&delta, beta, k)?;
    let mu = delta.mu();

    let mut e1 = BTreeSet::new();
    for &a in &multipliers.xs {
        let t = f.inv(f.add(f.mul(a, mu), f.one()))?;
        let mu_t = f.mul(mu, t);
        let sums: BTreeSet<FieldElem> = delta
            .delta()
            .iter()
            .cartesian_product(delta.delta())
            .map(|(&u, &v)| f.add(f.mul(a, u), v))
            .collect();
        for tail in (1..n).map(|_| sums.iter()).multi_cartesian_product() {
            let mut coords = Vec::with_capacity(n);
            coords.push(t);
            coords.extend(tail.into_iter().map(|&s| f.mul(mu_t, s)));
            e1.insert(Point(coords));
        }
    }

    let anchors = delta.anchor_table();
    if anchors.iter().any(Option::is_none) {
        return Err(Error::InvalidInput(
            "delta system does not cover the field".into(),
        ));
    }
    let lines = witness_lines(&f, n, |y| anchors[y.index() as usize].expect("covered").0);
    let instance = FurstenbergInstance::assemble(
        f,
        n,
        beta,
        k,
        multipliers.xs.len() as u64,
        symmetrize(n, &e1),
        lines,
    );
    Ok(PrimeConstruction {
        instance,
        delta,
        multipliers,
        e1,
    })
}

pub(crate) fn check_space(f: &Field, n: usize) -> Result<()> {
    let size = (f.order() as u64).checked_pow(n as u32);
    match size {
        Some(s) if s <= crate::ff::MAX_ORDER * 16 => Ok(()),
        _ => Err(Error::UnsupportedScale(format!(
            "F_{}^{n} is too large for exhaustive verification",
            f.order()
        ))),
    }
}
