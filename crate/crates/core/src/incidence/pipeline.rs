use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::hyperplanar::classify_hyperplanar;
use super::system::{refine_s1, refine_s2, IncidenceSystem, S1Report, S2Report};
use crate::constructions::FurstenbergInstance;
use crate::error::{Error, Result};
use crate::exact::ceil_sqrt;
use crate::ff::Field;
use crate::geometry::{
    build_map_to_infinity, canonical_direction, project_line, sub, Direction, Line, Point,
    Projected, ProjectedLine, ProjectiveMap,
};
use crate::io::{point_json, PointJson};
use crate::linalg;
use crate::lw::{default_constant, refine, GridSet, RefineCertificate};
use crate::par;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub p: u32,
    pub n: usize,
    /// `δ = delta_coefficient · q^(−1/n)`.
    pub delta_coefficient: f64,
    pub s1_constant: u64,
    pub s2_constant: u64,
    /// Removal constant for the grid refinements; `100 n` when absent.
    pub lw_constant: Option<u64>,
    /// Largest number of candidate tuples evaluated exhaustively.
    pub tuple_cap: u64,
}

impl PipelineConfig {
    pub fn new(p: u32, n: usize) -> PipelineConfig {
        PipelineConfig {
            p,
            n,
            delta_coefficient: 0.1,
            s1_constant: 100,
            s2_constant: 2,
            lw_constant: None,
            tuple_cap: 10_000_000,
        }
    }
}

/// One asserted inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass,
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sizes {
    pub s: usize,
    pub s1: usize,
    pub s2: usize,
    pub s3: usize,
    pub s4: usize,
}

/// `Σ_l |A ∩ S_l|²` for `A = S, S₁, S₂`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Triples {
    pub s: u64,
    pub s1: u64,
    pub s2: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransportReport {
    pub points: usize,
    /// Strong incidences `(z, l)`, `z ∈ S₂`, whose point stays affine.
    pub incidences_checked: usize,
    pub incidences_preserved: usize,
    /// Strong incidences lost because `z` went to infinity.
    pub points_at_infinity: usize,
    /// Lines from survivors to tuple points, and how many became parallel
    /// to the matching coordinate axis.
    pub axis_lines: usize,
    pub axis_parallel: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairReport {
    pub pair: [usize; 2],
    pub certificate: RefineCertificate,
    pub non_vertical_lines: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub pair: [usize; 2],
    pub points: usize,
    pub lines: usize,
    pub incidences: usize,
    /// `min(√P·L + P, √L·P + L)`.
    pub cauchy_schwarz_bound: f64,
    pub ratio: f64,
    /// Richness → number of lines with that many points.
    pub histogram: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineReport {
    pub config: PipelineConfig,
    pub q: u32,
    #[serde(rename = "M")]
    pub m: usize,
    pub strong_size: usize,
    pub s1: S1Report,
    pub s2: S2Report,
    pub sizes: Sizes,
    pub triples: Triples,
    pub delta: f64,
    /// `δ q^(n−1/2) / M` and its ceiling.
    pub hyperplanar_threshold_raw: f64,
    pub hyperplanar_threshold: u64,
    pub hyperplanar_fraction: f64,
    /// `"S4"`, or `"S2"` when no point is non-hyperplanar.
    pub tuple_pool: String,
    /// `"exhaustive"` or `"greedy"`.
    pub tuple_search: String,
    pub candidate_tuples: u64,
    pub tuple: Option<Vec<PointJson>>,
    /// Pool points that see the whole tuple through strong lines, in
    /// general position.
    pub survivors: usize,
    pub stopped: Option<String>,
    pub transport: Option<TransportReport>,
    pub grid_size: usize,
    pub pairs: Vec<PairReport>,
    pub projection: Option<ProjectionReport>,
    pub checks: Vec<Check>,
}

impl PipelineReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// `richness,line_count` rows of the projected histogram.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("richness,line_count\n");
        if let Some(p) = &self.projection {
            for (r, c) in &p.histogram {
                out.push_str(&format!("{r},{c}\n"));
            }
        }
        out
    }
}

/// Whether `ys − x` are linearly independent.
fn independent(f: &Field, x: &Point, ys: &[&Point]) -> bool {
    let vs: Vec<Vec<_>> = ys.iter().map(|y| sub(f, &y.0, &x.0)).collect();
    linalg::rank(f, &vs) == ys.len()
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| {
        acc.saturating_mul((n - i) as u64) / (i as u64 + 1)
    })
}

struct Selection {
    tuple: Vec<usize>,
    survivors: Vec<usize>,
    candidates: u64,
    exhaustive: bool,
}

/// Chooses `(x_1, ..., x_n)` from the pool maximizing the number of pool
/// points `x` that share a strong line with every `x_i` and for which the
/// `x_i − x` are independent. `seen[x]` maps each visible `y` to the first
/// strong line through both.
fn select_tuple(
    f: &Field,
    points: &[Point],
    pool: &[usize],
    seen: &HashMap<usize, BTreeMap<usize, usize>>,
    n: usize,
    cap: u64,
) -> Selection {
    let work: u64 = pool.iter().map(|x| binomial(seen[x].len(), n)).sum();
    let good = |x: usize, tuple: &[usize]| -> bool {
        tuple.iter().all(|y| seen[&x].contains_key(y))
            && independent(
                f,
                &points[x],
                &tuple.iter().map(|&y| &points[y]).collect::<Vec<_>>(),
            )
    };
    let tuple = if work <= cap {
        let mut score: HashMap<Vec<usize>, u64> = HashMap::new();
        for &x in pool {
            for tuple in seen[&x].keys().copied().combinations(n) {
                if good(x, &tuple) {
                    *score.entry(tuple).or_insert(0) += 1;
                }
            }
        }
        score
            .into_iter()
            .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
            .map(|(t, _)| t)
    } else {
        let mut chosen: Vec<usize> = Vec::new();
        for _ in 0..n {
            let best = pool
                .iter()
                .filter(|c| !chosen.contains(c))
                .map(|&c| {
                    let mut trial = chosen.clone();
                    trial.push(c);
                    let s = pool.iter().filter(|&&x| good(x, &trial)).count();
                    (s, c)
                })
                .filter(|&(s, _)| s > 0)
                .max_by(|a, b| a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1)));
            match best {
                Some((_, c)) => chosen.push(c),
                None => break,
            }
        }
        (chosen.len() == n).then_some(chosen)
    };
    let survivors = tuple
        .as_ref()
        .map(|t| pool.iter().copied().filter(|&x| good(x, t)).collect())
        .unwrap_or_default();
    Selection {
        tuple: tuple.unwrap_or_default(),
        survivors,
        candidates: work,
        exhaustive: work <= cap,
    }
}

fn affine(pr: Projected) -> Option<Point> {
    match pr {
        Projected::Affine(p) => Some(p),
        Projected::AtInfinity(_) => None,
    }
}

fn permute(x: &[i64], order: &[usize]) -> Vec<i64> {
    order.iter().map(|&i| x[i]).collect()
}

/// Runs the incidence pipeline on a Furstenberg instance with `n >= 3`.
///
/// Steps: strong sets of size `⌈√q⌉` on the witness lines; the degree
/// refinement `S₁`; the triple-weight refinement `S₂`; the hyperplanar
/// split `S₃ ∪ S₄`; the choice of `n` points; the projective map sending
/// them to infinity; the grid of transported survivors; a Loomis-Whitney
/// refinement with `m = 2` for every coordinate pair; and the orthogonal
/// projection along the pair with the most non-vertical lines.
pub fn run_pipeline(cfg: &PipelineConfig, inst: &FurstenbergInstance) -> Result<PipelineReport> {
    let n = inst.n;
    if n < 3 || cfg.n != n {
        return Err(Error::Unsupported(format!(
            "the pipeline needs n >= 3 matching the instance (config n = {}, instance n = {n})",
            cfg.n
        )));
    }
    let f = &inst.field;
    let q = f.order();
    if cfg.p != q {
        return Err(Error::InvalidInput(format!(
            "config is for q = {} but the instance lives over F_{q}",
            cfg.p
        )));
    }
    if !(cfg.delta_coefficient.is_finite() && cfg.delta_coefficient > 0.0) {
        return Err(Error::InvalidParameter(
            "delta coefficient must be positive".into(),
        ));
    }
    let big_m = inst.len();
    let strong_size = ceil_sqrt(q as u64) as usize;
    let sys = IncidenceSystem::from_instance(inst, strong_size);
    let mut checks = Vec::new();

    let s1 = refine_s1(&sys, n, cfg.s1_constant)?;
    checks.push(check(
        "s1_removal",
        s1.removal_bound_holds,
        format!(
            "{} · M · |S − S₁| = {} · {big_m} · {} ≤ q^n = {}",
            cfg.s1_constant, cfg.s1_constant, s1.removed, s1.space
        ),
    ));
    let s2 = refine_s2(&sys, &s1.keep, cfg.s2_constant)?;
    checks.push(check(
        "s2_mass",
        s2.mass_bound_holds,
        format!(
            "{} · retained {} ≥ {} · W₃ {}",
            cfg.s2_constant,
            s2.retained_weight,
            cfg.s2_constant - 1,
            s2.total_weight
        ),
    ));
    let s2_ids: Vec<usize> = (0..sys.points.len()).filter(|&i| s2.keep[i]).collect();
    if s2_ids.is_empty() {
        return Err(Error::DegenerateConfiguration(
            "S₂ is empty, so neither S₃ nor S₄ has points".into(),
        ));
    }

    let lines_at = sys.lines_at();
    let delta = cfg.delta_coefficient * (q as f64).powf(-1.0 / n as f64);
    let threshold_raw = delta * (q as f64).powf(n as f64 - 0.5) / big_m as f64;
    let threshold = threshold_raw.ceil().max(0.0) as u64;
    let classes = par::map(&s2_ids, |&x| {
        let dirs: Vec<Direction> = lines_at[x]
            .iter()
            .map(|&l| sys.lines[l].direction().clone())
            .collect();
        classify_hyperplanar(f, &dirs, threshold).map(|h| h.hyperplanar)
    });
    let mut s3 = Vec::new();
    let mut s4 = Vec::new();
    for (&x, h) in s2_ids.iter().zip(classes) {
        if h? {
            s3.push(x);
        } else {
            s4.push(x);
        }
    }
    let s1_count = s1.keep.iter().filter(|&&k| k).count();
    let monotone =
        s2.keep.iter().zip(&s1.keep).all(|(&b, &a)| !b || a) && s3.len() + s4.len() == s2_ids.len();
    checks.push(check("monotone", monotone, "S ⊇ S₁ ⊇ S₂ = S₃ ⊔ S₄"));

    let members = |mask: &[bool]| sys.triples(mask);
    let triples = Triples {
        s: members(&vec![true; sys.points.len()]),
        s1: members(&s1.keep),
        s2: members(&s2.keep),
    };

    let (pool, pool_name) = if s4.is_empty() {
        (&s2_ids, "S2")
    } else {
        (&s4, "S4")
    };
    let pool_set: HashSet<usize> = pool.iter().copied().collect();
    let mut seen: HashMap<usize, BTreeMap<usize, usize>> = HashMap::new();
    for &x in pool {
        let entry = seen.entry(x).or_default();
        for &l in &lines_at[x] {
            for &y in &sys.strong[l] {
                if y != x && pool_set.contains(&y) {
                    entry.entry(y).or_insert(l);
                }
            }
        }
    }
    let selection = select_tuple(f, &sys.points, pool, &seen, n, cfg.tuple_cap);

    let mut report = PipelineReport {
        config: cfg.clone(),
        q,
        m: big_m,
        strong_size,
        sizes: Sizes {
            s: big_m,
            s1: s1_count,
            s2: s2_ids.len(),
            s3: s3.len(),
            s4: s4.len(),
        },
        s1,
        s2,
        triples,
        delta,
        hyperplanar_threshold_raw: threshold_raw,
        hyperplanar_threshold: threshold,
        hyperplanar_fraction: s3.len() as f64 / s2_ids.len() as f64,
        tuple_pool: pool_name.into(),
        tuple_search: if selection.exhaustive {
            "exhaustive"
        } else {
            "greedy"
        }
        .into(),
        candidate_tuples: selection.candidates,
        tuple: None,
        survivors: selection.survivors.len(),
        stopped: None,
        transport: None,
        grid_size: 0,
        pairs: Vec::new(),
        projection: None,
        checks,
    };
    if selection.survivors.is_empty() {
        report.stopped = Some("no tuple is seen in general position by any pool point".into());
        return Ok(report);
    }
    let tuple = selection.tuple;
    report.tuple = Some(
        tuple
            .iter()
            .map(|&i| point_json(f, sys.points[i].coords()))
            .collect(),
    );
    let tuple_points: Vec<Point> = tuple.iter().map(|&i| sys.points[i].clone()).collect();
    let map = build_map_to_infinity(f, &tuple_points)?;

    let transport = transport(
        f,
        &map,
        &sys,
        &report.s2.keep,
        &selection.survivors,
        &tuple,
        &seen,
    );
    report.checks.push(check(
        "transport_incidence",
        transport.incidences_preserved == transport.incidences_checked,
        format!(
            "{} of {} strong incidences preserved",
            transport.incidences_preserved, transport.incidences_checked
        ),
    ));
    report.checks.push(check(
        "axis_parallel",
        transport.axis_parallel == transport.axis_lines,
        format!(
            "{} of {} lines to the tuple became axis-parallel",
            transport.axis_parallel, transport.axis_lines
        ),
    ));
    report.transport = Some(transport);

    // Grid of transported survivors, labelled by coordinate indices.
    let mut origin: HashMap<Vec<i64>, usize> = HashMap::new();
    for &x in &selection.survivors {
        let image = affine(map.apply(f, &sys.points[x])).expect("survivors avoid the hull");
        origin.insert(image.coords().iter().map(|c| c.index() as i64).collect(), x);
    }
    let grid = GridSet::new(n, origin.keys().cloned())?;
    report.grid_size = grid.len();
    let degrees = sys.strong_degrees();
    let hat = grid.hat_sizes();
    let degree_ok = (0..n).all(|j| hat[j] <= degrees[tuple[j]]);
    report.checks.push(check(
        "grid_projection_degree",
        degree_ok,
        format!(
            "|Pr_ĵ(T)| = {hat:?} ≤ strong degrees {:?}",
            tuple.iter().map(|&t| degrees[t]).collect::<Vec<_>>()
        ),
    ));

    let lw_c = cfg.lw_constant.unwrap_or_else(|| default_constant(n));
    let pairs: Vec<[usize; 2]> = (0..n).tuple_combinations().map(|(a, b)| [a, b]).collect();
    let results = par::map(&pairs, |&[j1, j2]| -> Result<(PairReport, Vec<usize>)> {
        let order: Vec<usize> = [j1, j2]
            .into_iter()
            .chain((0..n).filter(|&i| i != j1 && i != j2))
            .collect();
        let permuted = GridSet::new(n, grid.elements().iter().map(|x| permute(x, &order)))?;
        let refined = refine(&permuted, 2, lw_c)?;
        let mut inverse = vec![0; n];
        for (pos, &i) in order.iter().enumerate() {
            inverse[i] = pos;
        }
        let kept: Vec<usize> = refined
            .t2
            .elements()
            .iter()
            .map(|x| origin[&permute(x, &inverse)])
            .collect();
        let lines = projected_lines(f, &map, &sys, &lines_at, &kept, j1, j2);
        Ok((
            PairReport {
                pair: [j1, j2],
                certificate: refined.certificate,
                non_vertical_lines: lines.len(),
            },
            kept,
        ))
    });
    let mut kept_by_pair = Vec::new();
    for r in results {
        let (pr, kept) = r?;
        report.checks.push(check(
            format!("lw_pair_{}_{}", pr.pair[0], pr.pair[1]),
            pr.certificate.passes(),
            format!(
                "conclusions {:?}, |T| = {}, |T₂| = {}",
                pr.certificate.bounds_ok, pr.certificate.t0, pr.certificate.t2
            ),
        ));
        report.pairs.push(pr);
        kept_by_pair.push(kept);
    }

    let best = (0..report.pairs.len())
        .max_by(|&a, &b| {
            report.pairs[a]
                .non_vertical_lines
                .cmp(&report.pairs[b].non_vertical_lines)
                .then(b.cmp(&a))
        })
        .expect("n >= 3 gives pairs");
    let [j1, j2] = report.pairs[best].pair;
    report.projection = Some(project_along(
        f,
        &map,
        &sys,
        &lines_at,
        &kept_by_pair[best],
        j1,
        j2,
    ));
    Ok(report)
}

fn transport(
    f: &Field,
    map: &ProjectiveMap,
    sys: &IncidenceSystem,
    s2: &[bool],
    survivors: &[usize],
    tuple: &[usize],
    seen: &HashMap<usize, BTreeMap<usize, usize>>,
) -> TransportReport {
    let images: Vec<Option<Line>> = sys.lines.iter().map(|l| map.map_line(f, l)).collect();
    let mut t = TransportReport {
        points: s2.iter().filter(|&&b| b).count(),
        incidences_checked: 0,
        incidences_preserved: 0,
        points_at_infinity: 0,
        axis_lines: 0,
        axis_parallel: 0,
    };
    for (li, sl) in sys.strong.iter().enumerate() {
        for &z in sl.iter().filter(|&&z| s2[z]) {
            match affine(map.apply(f, &sys.points[z])) {
                Some(img) => {
                    t.incidences_checked += 1;
                    if images[li].as_ref().is_some_and(|l| l.contains(f, &img)) {
                        t.incidences_preserved += 1;
                    }
                }
                None => t.points_at_infinity += 1,
            }
        }
    }
    let n = tuple.len();
    for &x in survivors {
        for (i, y) in tuple.iter().enumerate() {
            let li = seen[&x][y];
            t.axis_lines += 1;
            let mut axis = vec![f.zero(); n];
            axis[i] = f.one();
            let axis = canonical_direction(f, &axis).expect("unit vector");
            if images[li].as_ref().is_some_and(|l| *l.direction() == axis) {
                t.axis_parallel += 1;
            }
        }
    }
    t
}

/// Distinct non-vertical images, under the projection onto `(j1, j2)`, of
/// the transported strong lines through the given points.
fn projected_lines(
    f: &Field,
    map: &ProjectiveMap,
    sys: &IncidenceSystem,
    lines_at: &[Vec<usize>],
    kept: &[usize],
    j1: usize,
    j2: usize,
) -> BTreeSet<Line> {
    let ids: BTreeSet<usize> = kept
        .iter()
        .flat_map(|&x| lines_at[x].iter().copied())
        .collect();
    ids.into_iter()
        .filter_map(|l| map.map_line(f, &sys.lines[l]))
        .filter_map(|l| match project_line(f, &l, j1, j2) {
            Ok(ProjectedLine::Line(pl)) => Some(pl),
            _ => None,
        })
        .collect()
}

fn project_along(
    f: &Field,
    map: &ProjectiveMap,
    sys: &IncidenceSystem,
    lines_at: &[Vec<usize>],
    kept: &[usize],
    j1: usize,
    j2: usize,
) -> ProjectionReport {
    let points: BTreeSet<Point> = kept
        .iter()
        .filter_map(|&x| affine(map.apply(f, &sys.points[x])))
        .map(|p| Point(vec![p.coords()[j1], p.coords()[j2]]))
        .collect();
    let lines = projected_lines(f, map, sys, lines_at, kept, j1, j2);
    let mut histogram = BTreeMap::new();
    let mut incidences = 0;
    for l in &lines {
        let rich = points.iter().filter(|p| l.contains(f, p)).count();
        incidences += rich;
        *histogram.entry(rich).or_insert(0) += 1;
    }
    let (np, nl) = (points.len() as f64, lines.len() as f64);
    let bound = (np.sqrt() * nl + np).min(nl.sqrt() * np + nl);
    ProjectionReport {
        pair: [j1, j2],
        points: points.len(),
        lines: lines.len(),
        incidences,
        cauchy_schwarz_bound: bound,
        ratio: if bound > 0.0 {
            incidences as f64 / bound
        } else {
            0.0
        },
        histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_prime_furstenberg;
    use crate::exact::Beta;

    #[test]
    fn runs_on_small_prime_instance() {
        let inst = build_prime_furstenberg(7, 3, Beta::HALF, 1.0)
            .unwrap()
            .instance;
        let r = run_pipeline(&PipelineConfig::new(7, 3), &inst).unwrap();
        assert!(r.passes(), "{:#?}", r.checks);
        assert!(r.stopped.is_none(), "{:?}", r.stopped);
        assert_eq!(r.pairs.len(), 3);
        assert!(r.sizes.s >= r.sizes.s1 && r.sizes.s1 >= r.sizes.s2);
        assert!(r.histogram_csv().starts_with("richness,line_count\n"));
    }

    #[test]
    fn rejects_planes_and_mismatches() {
        let inst = build_prime_furstenberg(7, 2, Beta::HALF, 1.0)
            .unwrap()
            .instance;
        assert!(matches!(
            run_pipeline(&PipelineConfig::new(7, 2), &inst),
            Err(Error::Unsupported(_))
        ));
        let inst = build_prime_furstenberg(7, 3, Beta::HALF, 1.0)
            .unwrap()
            .instance;
        assert!(run_pipeline(&PipelineConfig::new(11, 3), &inst).is_err());
    }

    #[test]
    fn greedy_matches_shape_of_exhaustive() {
        let inst = build_prime_furstenberg(7, 3, Beta::HALF, 1.0)
            .unwrap()
            .instance;
        let mut cfg = PipelineConfig::new(7, 3);
        cfg.tuple_cap = 0;
        let r = run_pipeline(&cfg, &inst).unwrap();
        assert_eq!(r.tuple_search, "greedy");
        assert!(r.passes(), "{:#?}", r.checks);
    }
}
