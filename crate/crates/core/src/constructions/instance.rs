use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::exact::Beta;
use crate::ff::Field;
use crate::geometry::{enumerate_directions, Direction, Line, Point};

/// The line certifying the Furstenberg property in one direction, with the
/// number of points of the set it meets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub direction: Direction,
    pub line: Line,
    pub count: usize,
}

/// A point set `S ⊆ F_q^n` together with one witness line per direction.
#[derive(Debug, Clone, PartialEq)]
pub struct FurstenbergInstance {
    pub field: Field,
    pub n: usize,
    pub beta: Beta,
    pub k: f64,
    /// Witness count the builder guarantees in every direction.
    pub threshold: u64,
    /// Sorted, without duplicates.
    pub points: Vec<Point>,
    /// One per direction, in [`enumerate_directions`] order.
    pub witnesses: Vec<Witness>,
}

impl FurstenbergInstance {
    pub(crate) fn assemble(
        field: Field,
        n: usize,
        beta: Beta,
        k: f64,
        threshold: u64,
        points: impl IntoIterator<Item = Point>,
        lines: Vec<(Direction, Line)>,
    ) -> FurstenbergInstance {
        let mut points: Vec<Point> = points.into_iter().collect();
        points.sort_unstable();
        points.dedup();
        let set: HashSet<&Point> = points.iter().collect();
        let witnesses = lines
            .into_iter()
            .map(|(direction, line)| {
                let count = line
                    .points(&field)
                    .iter()
                    .filter(|p| set.contains(p))
                    .count();
                Witness {
                    direction,
                    line,
                    count,
                }
            })
            .collect();
        FurstenbergInstance {
            field,
            n,
            beta,
            k,
            threshold,
            points,
            witnesses,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point_set(&self) -> HashSet<&Point> {
        self.points.iter().collect()
    }

    /// Smallest witness count; zero when there are no witnesses.
    pub fn min_witness_count(&self) -> usize {
        self.witnesses.iter().map(|w| w.count).min().unwrap_or(0)
    }

    /// Structural checks: dimensions, canonical ordering, one witness per
    /// direction, witness lines in their stated directions, and stored
    /// counts equal to the true intersection sizes.
    pub fn validate(&self) -> Result<()> {
        let f = &self.field;
        if self.n < 2 {
            return Err(Error::InvalidInput("dimension must be at least 2".into()));
        }
        for p in &self.points {
            if p.dim() != self.n {
                return Err(Error::InvalidInput(format!(
                    "point of dimension {}",
                    p.dim()
                )));
            }
            for &c in p.coords() {
                f.check(c)?;
            }
        }
        if self.points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "points must be sorted and distinct".into(),
            ));
        }
        let dirs = enumerate_directions(f, self.n);
        if dirs.len() != self.witnesses.len()
            || dirs
                .iter()
                .zip(&self.witnesses)
                .any(|(d, w)| *d != w.direction)
        {
            return Err(Error::InvalidInput(
                "witnesses must list every direction once, in canonical order".into(),
            ));
        }
        let set = self.point_set();
        for w in &self.witnesses {
            if *w.line.direction() != w.direction {
                return Err(Error::InvalidInput(
                    "witness line direction mismatch".into(),
                ));
            }
            let count = w.line.points(f).iter().filter(|p| set.contains(p)).count();
            if count != w.count {
                return Err(Error::InvalidInput(format!(
                    "witness count {} differs from the measured {count}",
                    w.count
                )));
            }
        }
        Ok(())
    }
}
