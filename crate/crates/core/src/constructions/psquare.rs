use std::collections::BTreeSet;

use itertools::Itertools;

use super::prime::check_space;
use super::{symmetrize, witness_lines, FurstenbergInstance};
use crate::error::{Error, Result};
use crate::exact::Beta;
use crate::ff::Field;
use crate::geometry::Point;

/// `S ⊆ F_{p²}^n` of size at most `n (p+1) p^(n−1)` meeting a line in every
/// direction in at least `p` points: the union of coordinate-swapped copies
/// of `E_1 = {(b, c_2 μ, ..., c_n μ)/(aμ + b) : a, b, c_j ∈ F_p, (a, b) ≠ 0}`
/// with `μ = x̄`.
pub fn build_psquare(p: u32, n: usize) -> Result<FurstenbergInstance> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "dimension {n} must be at least 2"
        )));
    }
    let f = Field::new(p, 2)?;
    check_space(&f, n)?;
    let mu = f.x_bar()?;
    let base: Vec<_> = (0..p as i64).map(|c| f.from_int(c)).collect();

    let mut e1 = BTreeSet::new();
    for (&a, &b) in base.iter().cartesian_product(&base) {
        if a.is_zero() && b.is_zero() {
            continue;
        }
        let inv = f.inv(f.add(f.mul(a, mu), b))?;
        let mu_inv = f.mul(mu, inv);
        for cs in (1..n).map(|_| base.iter()).multi_cartesian_product() {
            let mut coords = Vec::with_capacity(n);
            coords.push(f.mul(b, inv));
            coords.extend(cs.into_iter().map(|&c| f.mul(c, mu_inv)));
            e1.insert(Point(coords));
        }
    }

    // y = vμ − u with u, v ∈ F_p: the constant coefficient of y is −u.
    let lines = witness_lines(&f, n, |y| f.from_int(-(f.coeffs(y)[0] as i64)));
    Ok(FurstenbergInstance::assemble(
        f,
        n,
        Beta::HALF,
        1.0,
        p as u64,
        symmetrize(n, &e1),
        lines,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        for (p, n, dirs) in [(3u32, 2usize, 10usize), (5, 2, 26), (3, 3, 91)] {
            let inst = build_psquare(p, n).unwrap();
            inst.validate().unwrap();
            let bound = n * (p as usize + 1) * (p as usize).pow(n as u32 - 1);
            assert!(inst.len() <= bound, "({p},{n}): |S| = {}", inst.len());
            assert_eq!(inst.witnesses.len(), dirs);
            // All p + 1 parameterized points lie on each witness line.
            assert!(inst.witnesses.iter().all(|w| w.count > p as usize));
        }
    }
}
