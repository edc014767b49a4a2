use std::collections::{BTreeMap, HashSet};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::constructions::FurstenbergInstance;
use crate::exact::big;
use crate::ff::Field;
use crate::geometry::{enumerate_directions, line_key, line_through, Line, Point};
use crate::io::{line_json, point_json, LineJson, PointJson};
use crate::par;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FurstenbergReport {
    pub threshold: u64,
    pub covered: bool,
    /// Largest `|l ∩ S|` per direction, in enumeration order.
    pub maxima: Vec<usize>,
    pub worst_direction: Option<PointJson>,
    pub worst_count: usize,
    /// A line attaining the maximum in each direction.
    pub lines: Vec<LineJson>,
    #[serde(skip)]
    pub best_lines: Vec<Line>,
}

/// Maximum of `|l ∩ S|` over all `q^(n−1)` lines of every direction, found by
/// bucketing the points by line key. Ties go to the smallest key.
pub fn direction_maxima(f: &Field, n: usize, points: &[Point]) -> Vec<(usize, Option<Line>)> {
    let dirs = enumerate_directions(f, n);
    par::map(&dirs, |d| {
        let mut buckets: BTreeMap<Vec<_>, (usize, &Point)> = BTreeMap::new();
        for p in points {
            buckets.entry(line_key(f, p, d)).or_insert((0, p)).0 += 1;
        }
        let mut best: Option<(usize, &Point)> = None;
        for &(count, p) in buckets.values() {
            if best.is_none_or(|(c, _)| count > c) {
                best = Some((count, p));
            }
        }
        match best {
            Some((count, p)) => (count, Some(line_through(f, p, d))),
            None => (0, None),
        }
    })
}

pub fn furstenberg_check(inst: &FurstenbergInstance, threshold: u64) -> FurstenbergReport {
    check_points(&inst.field, inst.n, &inst.points, threshold)
}

/// [`furstenberg_check`] for a bare point set.
pub fn check_points(f: &Field, n: usize, points: &[Point], threshold: u64) -> FurstenbergReport {
    let dirs = enumerate_directions(f, n);
    let results = direction_maxima(f, n, points);
    let maxima: Vec<usize> = results.iter().map(|r| r.0).collect();
    let worst = maxima
        .iter()
        .enumerate()
        .min_by_key(|&(i, &c)| (c, i))
        .map(|(i, &c)| (i, c));
    // An empty set still has a best line per direction: any line, with count 0.
    let best_lines: Vec<Line> = results
        .into_iter()
        .zip(&dirs)
        .map(|((_, l), d)| l.unwrap_or_else(|| line_through(f, &Point(vec![f.zero(); n]), d)))
        .collect();
    FurstenbergReport {
        threshold,
        covered: maxima.iter().all(|&c| c as u64 >= threshold),
        worst_direction: worst.map(|(i, _)| point_json(f, dirs[i].vector())),
        worst_count: worst.map_or(0, |w| w.1),
        lines: best_lines.iter().map(|l| line_json(f, l)).collect(),
        best_lines,
        maxima,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCountReport {
    pub size: usize,
    pub directions: usize,
    pub min_witness: usize,
    /// `|S|(|S| − 1)`.
    pub lhs: String,
    /// `D t (t − 1)`.
    pub rhs: String,
    pub holds: bool,
    /// `√(D t (t − 1))`, the size the inequality forces (approximately).
    pub implied_lower_bound: f64,
}

/// Two distinct points of `S` lie on at most one line, while each witness
/// line contributes `t(t − 1)` ordered pairs.
pub fn pair_count_certificate(inst: &FurstenbergInstance) -> PairCountReport {
    let s = inst.len() as u64;
    let d = inst.witnesses.len() as u64;
    let t = inst.min_witness_count() as u64;
    let lhs = big(s) * big(s.saturating_sub(1));
    let rhs = big(d) * big(t) * big(t.saturating_sub(1));
    PairCountReport {
        size: inst.len(),
        directions: inst.witnesses.len(),
        min_witness: t as usize,
        holds: lhs >= rhs,
        implied_lower_bound: rhs.to_f64().unwrap_or(f64::INFINITY).sqrt(),
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

/// Number of `(point, line)` incidences; with `strong`, only points of the
/// designated subset of each line count.
pub fn count_incidences(
    f: &Field,
    points: &[Point],
    lines: &[Line],
    strong: Option<&[Vec<Point>]>,
) -> usize {
    let set: HashSet<&Point> = points.iter().collect();
    match strong {
        Some(strong) => strong
            .iter()
            .zip(lines)
            .map(|(sl, l)| {
                sl.iter()
                    .filter(|p| set.contains(p) && l.contains(f, p))
                    .count()
            })
            .sum(),
        None => lines
            .iter()
            .map(|l| l.points(f).iter().filter(|p| set.contains(p)).count())
            .sum(),
    }
}
