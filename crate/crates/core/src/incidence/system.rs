use std::collections::HashMap;

use serde::Serialize;

use crate::constructions::FurstenbergInstance;
use crate::error::{Error, Result};
use crate::exact::big;
use crate::ff::Field;
use crate::geometry::{Line, Point};

/// Points, lines, and for each line `l` the subset `S_l` of its points whose
/// incidences count as strong. Strong sets are stored as indices into
/// `points`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceSystem {
    pub field: Field,
    pub points: Vec<Point>,
    pub lines: Vec<Line>,
    pub strong: Vec<Vec<usize>>,
}

impl IncidenceSystem {
    /// Checks that every strong set lies in `points ∩ l`.
    pub fn new(
        field: Field,
        points: Vec<Point>,
        lines: Vec<Line>,
        strong: Vec<Vec<Point>>,
    ) -> Result<Self> {
        if strong.len() != lines.len() {
            return Err(Error::InvalidInput(
                "one strong set per line is required".into(),
            ));
        }
        let index: HashMap<&Point, usize> =
            points.iter().enumerate().map(|(i, p)| (p, i)).collect();
        if index.len() != points.len() {
            return Err(Error::InvalidInput("points must be distinct".into()));
        }
        let mut sets = Vec::with_capacity(lines.len());
        for (l, sl) in lines.iter().zip(&strong) {
            let mut ids = Vec::with_capacity(sl.len());
            for p in sl {
                let &i = index.get(p).ok_or_else(|| {
                    Error::InvalidInput("strong point outside the point set".into())
                })?;
                if !l.contains(&field, p) {
                    return Err(Error::InvalidInput("strong point off its line".into()));
                }
                ids.push(i);
            }
            ids.sort_unstable();
            ids.dedup();
            sets.push(ids);
        }
        Ok(IncidenceSystem {
            field,
            points,
            lines,
            strong: sets,
        })
    }

    /// The witness lines of an instance, with `S_l` the first `size` points
    /// of `l ∩ S` in parameter order.
    pub fn from_instance(inst: &FurstenbergInstance, size: usize) -> IncidenceSystem {
        let f = &inst.field;
        let index: HashMap<&Point, usize> = inst
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p, i))
            .collect();
        let lines: Vec<Line> = inst.witnesses.iter().map(|w| w.line.clone()).collect();
        let strong = lines
            .iter()
            .map(|l| {
                let mut ids: Vec<usize> = l
                    .points(f)
                    .iter()
                    .filter_map(|p| index.get(p).copied())
                    .take(size)
                    .collect();
                ids.sort_unstable();
                ids
            })
            .collect();
        IncidenceSystem {
            field: f.clone(),
            points: inst.points.clone(),
            lines,
            strong,
        }
    }

    /// `W = Σ_l |S_l|`.
    pub fn strong_incidences(&self) -> usize {
        self.strong.iter().map(Vec::len).sum()
    }

    /// `|{l : x ∈ S_l}|` for every point.
    pub fn strong_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.points.len()];
        for sl in &self.strong {
            for &i in sl {
                deg[i] += 1;
            }
        }
        deg
    }

    /// Lines `l` with `x ∈ S_l`, for every point `x`.
    pub fn lines_at(&self) -> Vec<Vec<usize>> {
        let mut at = vec![Vec::new(); self.points.len()];
        for (li, sl) in self.strong.iter().enumerate() {
            for &i in sl {
                at[i].push(li);
            }
        }
        at
    }

    /// `Σ_l |A ∩ S_l|²`: ordered triples `(x, x', l)` with `x, x' ∈ A ∩ S_l`.
    pub fn triples(&self, members: &[bool]) -> u64 {
        self.strong
            .iter()
            .map(|sl| sl.iter().filter(|&&i| members[i]).count() as u64)
            .map(|c| c * c)
            .sum()
    }
}

/// Outcome of the degree-based refinement `S₁`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct S1Report {
    pub constant: u64,
    /// `W = Σ_l |S_l|`.
    pub strong_incidences: u64,
    pub size: u64,
    /// `q^n`.
    pub space: u64,
    /// Points are removed when `deg · q^n > constant · W · M`.
    pub removed: u64,
    pub max_degree: u64,
    /// `constant · M · removed ≤ q^n`.
    pub removal_bound_holds: bool,
    #[serde(skip)]
    pub keep: Vec<bool>,
}

/// Removes points of strong degree above `τ₁ = constant · W · M / q^n`.
/// Since the degrees sum to `W`, fewer than `q^n / (constant · M)` points
/// can exceed `τ₁`; the report checks this rather than assuming it.
pub fn refine_s1(sys: &IncidenceSystem, n: usize, constant: u64) -> Result<S1Report> {
    let space = (sys.field.order() as u64)
        .checked_pow(n as u32)
        .ok_or_else(|| Error::UnsupportedScale("q^n overflows".into()))?;
    let w = sys.strong_incidences() as u64;
    let m = sys.points.len() as u64;
    let deg = sys.strong_degrees();
    let limit = big(constant) * big(w) * big(m);
    let keep: Vec<bool> = deg
        .iter()
        .map(|&d| big(d as u64) * big(space) <= limit)
        .collect();
    let removed = keep.iter().filter(|&&k| !k).count() as u64;
    Ok(S1Report {
        constant,
        strong_incidences: w,
        size: m,
        space,
        removed,
        max_degree: deg.iter().copied().max().unwrap_or(0) as u64,
        removal_bound_holds: big(constant) * big(m) * big(removed) <= big(space),
        keep,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct S2Report {
    pub constant: u64,
    /// `W₃ = Σ_{x ∈ S₁} w(x)`.
    pub total_weight: u64,
    pub retained_weight: u64,
    pub removed: u64,
    /// `constant · retained ≥ (constant − 1) · W₃`.
    pub mass_bound_holds: bool,
    #[serde(skip)]
    pub keep: Vec<bool>,
}

/// Keeps the points `x ∈ S₁` whose triple weight
/// `w(x) = Σ_{l : x ∈ S_l} |S₁ ∩ S_l|` satisfies `constant · M · w(x) ≥ W₃`.
pub fn refine_s2(sys: &IncidenceSystem, s1: &[bool], constant: u64) -> Result<S2Report> {
    if s1.len() != sys.points.len() {
        return Err(Error::InvalidInput(
            "membership mask has the wrong length".into(),
        ));
    }
    if constant < 1 {
        return Err(Error::InvalidParameter(
            "S₂ constant must be at least 1".into(),
        ));
    }
    let line_mass: Vec<u64> = sys
        .strong
        .iter()
        .map(|sl| sl.iter().filter(|&&i| s1[i]).count() as u64)
        .collect();
    let mut weight = vec![0u64; sys.points.len()];
    for (sl, &mass) in sys.strong.iter().zip(&line_mass) {
        for &i in sl {
            if s1[i] {
                weight[i] += mass;
            }
        }
    }
    let total: u64 = weight.iter().sum();
    let m = sys.points.len() as u64;
    let keep: Vec<bool> = (0..weight.len())
        .map(|i| s1[i] && big(constant) * big(m) * big(weight[i]) >= big(total))
        .collect();
    let retained: u64 = (0..weight.len())
        .filter(|&i| keep[i])
        .map(|i| weight[i])
        .sum();
    Ok(S2Report {
        constant,
        total_weight: total,
        retained_weight: retained,
        removed: (0..keep.len()).filter(|&i| s1[i] && !keep[i]).count() as u64,
        mass_bound_holds: big(constant) * big(retained) >= big(constant - 1) * big(total),
        keep,
    })
}
