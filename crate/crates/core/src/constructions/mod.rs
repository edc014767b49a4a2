//! Small Furstenberg sets over finite fields and the delta systems they are
//! built from.

mod delta;
mod instance;
mod prime;
mod psquare;

pub use delta::{
    build_delta, build_x, compute_l, verify_delta, DeltaRecipe, DeltaReport, DeltaSystem,
    Exclusion, LCount, MultiplierSet,
};
pub use instance::{FurstenbergInstance, Witness};
pub use prime::{build_prime_furstenberg, PrimeConstruction};
pub use psquare::build_psquare;

use std::collections::BTreeSet;

use crate::ff::{Field, FieldElem};
use crate::geometry::{
    canonical_direction, enumerate_directions, line_through, Direction, Line, Point,
};

/// `E_1 ∪ E_2 ∪ ... ∪ E_n`, where `E_i` swaps coordinates `1` and `i` of `E_1`.
fn symmetrize(n: usize, e1: &BTreeSet<Point>) -> BTreeSet<Point> {
    (0..n)
        .flat_map(|i| e1.iter().map(move |pt| pt.transposed(0, i)))
        .collect()
}

/// For every direction, the witness line obtained from an `E_1` line through
/// `(0, u_2, ..., u_n)` with direction `(1, y_2, ..., y_n)`, transported to
/// the right pivot by a coordinate swap. `base_coordinate(y)` supplies `u`.
fn witness_lines(
    f: &Field,
    n: usize,
    base_coordinate: impl Fn(FieldElem) -> FieldElem,
) -> Vec<(Direction, Line)> {
    enumerate_directions(f, n)
        .into_iter()
        .map(|d| {
            let i = d.pivot();
            let mut swapped = d.vector().to_vec();
            swapped.swap(0, i);
            let e1_dir = canonical_direction(f, &swapped).expect("nonzero");
            let mut base = vec![f.zero(); n];
            for j in 1..n {
                base[j] = base_coordinate(swapped[j]);
            }
            let e1_line = line_through(f, &Point(base), &e1_dir);
            (d, e1_line.transposed(f, 0, i))
        })
        .collect()
}
