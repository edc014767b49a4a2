use std::collections::HashSet;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::Field;
use crate::geometry::{canonical_direction, Direction};
use crate::linalg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Hyperplanarity {
    pub max_coplanar: usize,
    pub hyperplanar: bool,
}

/// Largest number of the (distinct) directions lying in one linear
/// hyperplane of `F_q^n`.
///
/// If the directions span less than everything they all fit in one
/// hyperplane. Otherwise every maximal family contains `n − 1` independent
/// members, so it suffices to try the hyperplanes they span.
pub fn max_coplanar(f: &Field, dirs: &[Direction]) -> Result<usize> {
    let Some(first) = dirs.first() else {
        return Ok(0);
    };
    let n = first.dim();
    if n < 3 {
        return Err(Error::Unsupported(
            "hyperplanarity needs n >= 3: in the plane every pair of lines is coplanar".into(),
        ));
    }
    let dirs: Vec<&Direction> = dirs
        .iter()
        .collect::<HashSet<_>>()
        .into_iter()
        .sorted()
        .collect();
    let vectors: Vec<Vec<_>> = dirs.iter().map(|d| d.vector().to_vec()).collect();
    if linalg::rank(f, &vectors) < n {
        return Ok(dirs.len());
    }
    let mut seen = HashSet::new();
    let mut best = 0;
    for subset in vectors.iter().cloned().combinations(n - 1) {
        if linalg::rank(f, &subset) < n - 1 {
            continue;
        }
        let normal = linalg::nullspace(f, &subset, n)
            .into_iter()
            .next()
            .expect("corank one");
        let normal = canonical_direction(f, &normal).expect("nonzero");
        if !seen.insert(normal.clone()) {
            continue;
        }
        let count = vectors
            .iter()
            .filter(|v| linalg::dot(f, v, normal.vector()).is_zero())
            .count();
        best = best.max(count);
    }
    Ok(best)
}

/// Hyperplanar iff at least `threshold` of the directions share a hyperplane.
pub fn classify_hyperplanar(
    f: &Field,
    dirs: &[Direction],
    threshold: u64,
) -> Result<Hyperplanarity> {
    let max_coplanar = max_coplanar(f, dirs)?;
    Ok(Hyperplanarity {
        max_coplanar,
        hyperplanar: max_coplanar as u64 >= threshold,
    })
}
