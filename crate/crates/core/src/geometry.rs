//! Points, directions and lines of the affine space `F_q^n`, projective maps
//! of its completion, and coordinate projections.

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::linalg::{self, Matrix};

/// A point of `F_q^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<FieldElem>);

impl Point {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[FieldElem] {
        &self.0
    }

    /// Swaps coordinates `i` and `j`.
    pub fn transposed(&self, i: usize, j: usize) -> Point {
        let mut c = self.0.clone();
        c.swap(i, j);
        Point(c)
    }
}

pub fn add(f: &Field, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect()
}

pub fn sub(f: &Field, a: &[FieldElem], b: &[FieldElem]) -> Vec<FieldElem> {
    a.iter().zip(b).map(|(&x, &y)| f.sub(x, y)).collect()
}

pub fn scale(f: &Field, s: FieldElem, v: &[FieldElem]) -> Vec<FieldElem> {
    v.iter().map(|&x| f.mul(s, x)).collect()
}

/// Canonical representative of a projective direction: the first nonzero
/// coordinate (the pivot) equals one.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    pivot: usize,
    vector: Vec<FieldElem>,
}

impl Direction {
    pub fn vector(&self) -> &[FieldElem] {
        &self.vector
    }

    pub fn pivot(&self) -> usize {
        self.pivot
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

pub fn canonical_direction(f: &Field, v: &[FieldElem]) -> Result<Direction> {
    let pivot = v
        .iter()
        .position(|x| !x.is_zero())
        .ok_or_else(|| Error::InvalidInput("the zero vector has no direction".into()))?;
    let inv = f.inv(v[pivot])?;
    Ok(Direction {
        pivot,
        vector: scale(f, inv, v),
    })
}

/// All `(q^n - 1)/(q - 1)` directions of `F_q^n`, ordered by pivot and then
/// lexicographically by the trailing coordinates.
pub fn enumerate_directions(f: &Field, n: usize) -> Vec<Direction> {
    let q = f.order() as u64;
    let mut out = Vec::new();
    for pivot in 0..n {
        let free = n - pivot - 1;
        let count = q.pow(free as u32);
        for k in 0..count {
            let mut vector = vec![f.zero(); n];
            vector[pivot] = f.one();
            let mut rest = k;
            for slot in (pivot + 1..n).rev() {
                vector[slot] = f.from_index((rest % q) as u32).expect("index below q");
                rest /= q;
            }
            out.push(Direction { pivot, vector });
        }
    }
    out
}

/// An affine line, stored canonically: its base point has a zero coordinate
/// at the pivot of its direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    direction: Direction,
    base: Point,
}

impl Line {
    pub fn direction(&self) -> &Direction {
        &self.direction
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    /// The `q` points `base + t * direction`, in enumeration order of `t`.
    pub fn points(&self, f: &Field) -> Vec<Point> {
        f.elements().map(|t| self.point_at(f, t)).collect()
    }

    pub fn point_at(&self, f: &Field, t: FieldElem) -> Point {
        Point(add(f, &self.base.0, &scale(f, t, &self.direction.vector)))
    }

    /// Line parameter of `pt`, if it lies on the line.
    pub fn parameter_of(&self, f: &Field, pt: &Point) -> Option<FieldElem> {
        let t = pt.0[self.direction.pivot];
        (self.point_at(f, t) == *pt).then_some(t)
    }

    pub fn contains(&self, f: &Field, pt: &Point) -> bool {
        self.parameter_of(f, pt).is_some()
    }

    pub fn transposed(&self, f: &Field, i: usize, j: usize) -> Line {
        let mut d = self.direction.vector.clone();
        d.swap(i, j);
        let dir = canonical_direction(f, &d).expect("transposition keeps vectors nonzero");
        line_through(f, &self.base.transposed(i, j), &dir)
    }
}

pub fn line_through(f: &Field, pt: &Point, d: &Direction) -> Line {
    let t = pt.0[d.pivot];
    let base = Point(sub(f, &pt.0, &scale(f, t, &d.vector)));
    Line {
        direction: d.clone(),
        base,
    }
}

/// Key of the line through `pt` in direction `d`: the base point
/// coordinates with the (always zero) pivot coordinate omitted.
pub fn line_key(f: &Field, pt: &Point, d: &Direction) -> Vec<FieldElem> {
    let t = pt.0[d.pivot];
    pt.0.iter()
        .zip(&d.vector)
        .enumerate()
        .filter(|(i, _)| *i != d.pivot)
        .map(|(_, (&x, &y))| f.sub(x, f.mul(t, y)))
        .collect()
}

/// Coordinates `(j1, j2)` of a point, zero-based.
pub fn orthogonal_project(pt: &Point, j1: usize, j2: usize) -> Result<Point> {
    if j1 >= j2 || j2 >= pt.dim() {
        return Err(Error::IndexOutOfRange(format!(
            "projection indices ({j1}, {j2}) invalid in dimension {}",
            pt.dim()
        )));
    }
    Ok(Point(vec![pt.0[j1], pt.0[j2]]))
}

/// Image of a line under a coordinate projection: a line, or a single
/// point when the line is vertical to the coordinate plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProjectedLine {
    Line(Line),
    Point(Point),
}

pub fn project_line(f: &Field, l: &Line, j1: usize, j2: usize) -> Result<ProjectedLine> {
    let base = orthogonal_project(&l.base, j1, j2)?;
    let d = [l.direction.vector[j1], l.direction.vector[j2]];
    Ok(match canonical_direction(f, &d) {
        Ok(dir) => ProjectedLine::Line(line_through(f, &base, &dir)),
        Err(_) => ProjectedLine::Point(base),
    })
}

/// Result of applying a projective map to an affine point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projected {
    Affine(Point),
    AtInfinity(Direction),
}

/// A projective transformation of `PG(n, q)` acting on homogeneous
/// coordinates `(v : w)`, with `w = 0` the hyperplane at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectiveMap {
    matrix: Matrix,
}

impl ProjectiveMap {
    pub fn new(f: &Field, matrix: Matrix) -> Result<ProjectiveMap> {
        let k = matrix.len();
        if k < 2 || matrix.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidInput(
                "projective map needs a square matrix".into(),
            ));
        }
        if linalg::invert(f, &matrix).is_none() {
            return Err(Error::DegenerateConfiguration("matrix is singular".into()));
        }
        Ok(ProjectiveMap { matrix })
    }

    pub fn identity(f: &Field, n: usize) -> ProjectiveMap {
        let matrix = (0..=n)
            .map(|i| {
                (0..=n)
                    .map(|j| if i == j { f.one() } else { f.zero() })
                    .collect()
            })
            .collect();
        ProjectiveMap { matrix }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.len() - 1
    }

    fn image_h(&self, f: &Field, v: &[FieldElem], w: FieldElem) -> Vec<FieldElem> {
        let mut h = v.to_vec();
        h.push(w);
        linalg::mat_vec(f, &self.matrix, &h)
    }

    fn normalize(f: &Field, h: Vec<FieldElem>) -> Projected {
        let n = h.len() - 1;
        if h[n].is_zero() {
            let d = canonical_direction(f, &h[..n]).expect("invertible map keeps points nonzero");
            return Projected::AtInfinity(d);
        }
        let inv = f.inv(h[n]).expect("checked nonzero");
        Projected::Affine(Point(scale(f, inv, &h[..n])))
    }

    pub fn apply(&self, f: &Field, pt: &Point) -> Projected {
        Self::normalize(f, self.image_h(f, &pt.0, f.one()))
    }

    /// Image of the point at infinity in direction `d`.
    pub fn apply_infinite(&self, f: &Field, d: &Direction) -> Projected {
        Self::normalize(f, self.image_h(f, &d.vector, f.zero()))
    }

    /// Affine part of the image of a line, or `None` when the whole image
    /// lies in the hyperplane at infinity.
    pub fn map_line(&self, f: &Field, l: &Line) -> Option<Line> {
        let a = self.apply(f, l.base());
        let b = self.apply_infinite(f, l.direction());
        match (a, b) {
            (Projected::Affine(pa), Projected::AtInfinity(d)) => Some(line_through(f, &pa, &d)),
            (Projected::Affine(pa), Projected::Affine(pb)) => {
                let d = canonical_direction(f, &sub(f, &pb.0, &pa.0)).ok()?;
                Some(line_through(f, &pa, &d))
            }
            (Projected::AtInfinity(_), Projected::Affine(pb)) => {
                // The base went to infinity; any other affine point of the
                // line spans the image together with `pb`.
                let other = l.point_at(f, f.one());
                match self.apply(f, &other) {
                    Projected::Affine(po) => {
                        let d = canonical_direction(f, &sub(f, &po.0, &pb.0)).ok()?;
                        Some(line_through(f, &pb, &d))
                    }
                    Projected::AtInfinity(_) => None,
                }
            }
            (Projected::AtInfinity(_), Projected::AtInfinity(_)) => None,
        }
    }
}

/// Projective map sending `x_1, ..., x_n` to the points at infinity of the
/// `n` coordinate axes and their affine hull `H` to the hyperplane at
/// infinity.
///
/// With `A` the linear map taking (translated) `x_i` to `e_i` and `phi` the
/// functional with `phi(x_i) = 1`, the map is `(v : 1) -> (A v : phi(v) - 1)`.
/// When `H` passes through the origin the points are first translated by the
/// first unit vector `e_k` that moves `H` off the origin.
pub fn build_map_to_infinity(f: &Field, xs: &[Point]) -> Result<ProjectiveMap> {
    let n = xs.len();
    if n < 2 || xs.iter().any(|x| x.dim() != n) {
        return Err(Error::InvalidInput(format!(
            "need n points of dimension n, got {} points",
            xs.len()
        )));
    }
    let diffs: Vec<Vec<FieldElem>> = xs[1..].iter().map(|x| sub(f, &x.0, &xs[0].0)).collect();
    if linalg::rank(f, &diffs) < n - 1 {
        return Err(Error::DegenerateConfiguration(
            "points are affinely dependent".into(),
        ));
    }
    let columns_matrix = |shift: &[FieldElem]| -> Matrix {
        // Row i holds coordinate i of every shifted point, so the points are columns.
        (0..n)
            .map(|i| xs.iter().map(|x| f.add(x.0[i], shift[i])).collect())
            .collect()
    };
    let zero = vec![f.zero(); n];
    let mut shift = zero.clone();
    let mut inverse = linalg::invert(f, &columns_matrix(&zero));
    if inverse.is_none() {
        for k in 0..n {
            let mut e = zero.clone();
            e[k] = f.one();
            if let Some(inv) = linalg::invert(f, &columns_matrix(&e)) {
                shift = e;
                inverse = Some(inv);
                break;
            }
        }
    }
    let a = inverse.ok_or_else(|| {
        Error::DegenerateConfiguration("no translation moves the hull off the origin".into())
    })?;
    let a_shift = linalg::mat_vec(f, &a, &shift);
    let phi: Vec<FieldElem> = (0..n)
        .map(|j| a.iter().fold(f.zero(), |acc, row| f.add(acc, row[j])))
        .collect();
    let phi_shift = a_shift.iter().fold(f.zero(), |acc, &x| f.add(acc, x));
    let mut matrix: Matrix = a
        .iter()
        .zip(&a_shift)
        .map(|(row, &s)| {
            let mut r = row.clone();
            r.push(s);
            r
        })
        .collect();
    let mut last = phi;
    last.push(f.sub(phi_shift, f.one()));
    matrix.push(last);
    ProjectiveMap::new(f, matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn pt(f: &Field, v: &[i64]) -> Point {
        Point(v.iter().map(|&x| f.from_int(x)).collect())
    }

    fn dir(f: &Field, v: &[i64]) -> Direction {
        canonical_direction(f, &pt(f, v).0).unwrap()
    }

    #[test]
    fn canonical_direction_examples() {
        let f7 = Field::prime(7).unwrap();
        assert_eq!(dir(&f7, &[0, 2, 4]).vector(), pt(&f7, &[0, 1, 2]).coords());
        assert_eq!(dir(&f7, &[1, 0, 0]).vector(), pt(&f7, &[1, 0, 0]).coords());
        let f5 = Field::prime(5).unwrap();
        assert_eq!(dir(&f5, &[3, 1]).vector(), pt(&f5, &[1, 2]).coords());
        assert!(canonical_direction(&f5, &pt(&f5, &[0, 0]).0).is_err());
    }

    #[test]
    fn canonical_direction_is_scale_invariant() {
        let f = Field::prime(5).unwrap();
        for v in enumerate_directions(&f, 3) {
            for lambda in f.elements().skip(1) {
                let scaled = scale(&f, lambda, v.vector());
                assert_eq!(canonical_direction(&f, &scaled).unwrap(), v);
            }
        }
    }

    #[test]
    fn direction_enumeration() {
        let f3 = Field::prime(3).unwrap();
        let dirs: Vec<Vec<FieldElem>> = enumerate_directions(&f3, 2)
            .into_iter()
            .map(|d| d.vector().to_vec())
            .collect();
        let expect: Vec<Vec<FieldElem>> = [[1, 0], [1, 1], [1, 2], [0, 1]]
            .iter()
            .map(|v| pt(&f3, v).0)
            .collect();
        assert_eq!(dirs, expect);
        assert_eq!(
            enumerate_directions(&Field::new(3, 2).unwrap(), 2).len(),
            10
        );
        assert_eq!(enumerate_directions(&f3, 3).len(), 13);
    }

    #[test]
    fn lines_and_their_points() {
        let f7 = Field::prime(7).unwrap();
        let l = line_through(&f7, &pt(&f7, &[2, 3]), &dir(&f7, &[1, 5]));
        assert_eq!(l.base(), &pt(&f7, &[0, 0]));
        let f3 = Field::prime(3).unwrap();
        let l = line_through(&f3, &pt(&f3, &[1, 2]), &dir(&f3, &[0, 1]));
        assert_eq!(l.base(), &pt(&f3, &[1, 0]));
        let diag = line_through(&f3, &pt(&f3, &[0, 0]), &dir(&f3, &[1, 1]));
        assert_eq!(
            diag.points(&f3),
            vec![pt(&f3, &[0, 0]), pt(&f3, &[1, 1]), pt(&f3, &[2, 2])]
        );
        let f9 = Field::new(3, 2).unwrap();
        let d = canonical_direction(&f9, &[f9.one(), f9.x_bar().unwrap()]).unwrap();
        let pts = line_through(&f9, &Point(vec![f9.zero(), f9.one()]), &d).points(&f9);
        assert_eq!(pts.iter().collect::<HashSet<_>>().len(), 9);
    }

    #[test]
    fn lines_in_a_direction_partition_space() {
        let f = Field::prime(3).unwrap();
        let all: Vec<Point> = (0..27)
            .map(|k| pt(&f, &[k / 9, (k / 3) % 3, k % 3]))
            .collect();
        for d in enumerate_directions(&f, 3) {
            let mut classes: HashSet<Line> = HashSet::new();
            for p in &all {
                let l = line_through(&f, p, &d);
                for other in l.points(&f) {
                    assert_eq!(line_through(&f, &other, &d), l);
                }
                classes.insert(l);
            }
            assert_eq!(classes.len(), 9);
        }
    }

    #[test]
    fn map_to_infinity_example() {
        let f7 = Field::prime(7).unwrap();
        let m = build_map_to_infinity(&f7, &[pt(&f7, &[1, 0]), pt(&f7, &[0, 1])]).unwrap();
        let e = |v: i64| f7.from_int(v);
        assert_eq!(
            m.matrix(),
            &vec![
                vec![e(1), e(0), e(0)],
                vec![e(0), e(1), e(0)],
                vec![e(1), e(1), e(-1)]
            ]
        );
        assert_eq!(
            m.apply(&f7, &pt(&f7, &[0, 0])),
            Projected::Affine(pt(&f7, &[0, 0]))
        );
        assert_eq!(
            m.apply(&f7, &pt(&f7, &[1, 0])),
            Projected::AtInfinity(dir(&f7, &[1, 0]))
        );
        let id = ProjectiveMap::identity(&f7, 2);
        assert_eq!(
            id.apply(&f7, &pt(&f7, &[3, 4])),
            Projected::Affine(pt(&f7, &[3, 4]))
        );
    }

    #[test]
    fn map_to_infinity_rejects_dependent_points() {
        let f5 = Field::prime(5).unwrap();
        let xs = [
            pt(&f5, &[0, 0, 0]),
            pt(&f5, &[1, 1, 1]),
            pt(&f5, &[2, 2, 2]),
        ];
        assert!(matches!(
            build_map_to_infinity(&f5, &xs),
            Err(Error::DegenerateConfiguration(_))
        ));
    }

    #[test]
    fn map_to_infinity_is_exact_on_small_spaces() {
        // Exhaustive: H goes to infinity, everything else maps bijectively.
        for p in [3u32, 5, 7] {
            let f = Field::prime(p).unwrap();
            let q = p as i64;
            let all: Vec<Point> = (0..q * q * q)
                .map(|k| pt(&f, &[k / (q * q), (k / q) % q, k % q]))
                .collect();
            let configs = [
                [pt(&f, &[1, 0, 0]), pt(&f, &[0, 1, 0]), pt(&f, &[0, 0, 1])],
                [pt(&f, &[0, 0, 0]), pt(&f, &[1, 2, 0]), pt(&f, &[0, 1, 1])],
                [pt(&f, &[1, 1, 0]), pt(&f, &[2, 0, 1]), pt(&f, &[0, 1, 2])],
            ];
            for xs in configs {
                let m = build_map_to_infinity(&f, &xs).unwrap();
                for (i, x) in xs.iter().enumerate() {
                    let mut e = vec![0; 3];
                    e[i] = 1;
                    assert_eq!(m.apply(&f, x), Projected::AtInfinity(dir(&f, &e)));
                }
                let diffs = vec![sub(&f, &xs[1].0, &xs[0].0), sub(&f, &xs[2].0, &xs[0].0)];
                let normal = &linalg::nullspace(&f, &diffs, 3)[0];
                let level = linalg::dot(&f, normal, &xs[0].0);
                let mut images = HashSet::new();
                for y in &all {
                    let on_h = linalg::dot(&f, normal, &y.0) == level;
                    match m.apply(&f, y) {
                        Projected::AtInfinity(_) => assert!(on_h),
                        Projected::Affine(img) => {
                            assert!(!on_h);
                            assert!(images.insert(img));
                        }
                    }
                }
                assert_eq!(images.len(), all.len() - (p * p) as usize);
            }
        }
    }

    #[test]
    fn projective_maps_preserve_collinearity() {
        let f = Field::prime(5).unwrap();
        let xs = [pt(&f, &[1, 2, 0]), pt(&f, &[0, 1, 3]), pt(&f, &[4, 4, 1])];
        let m = build_map_to_infinity(&f, &xs).unwrap();
        for d in enumerate_directions(&f, 3) {
            let l = line_through(&f, &pt(&f, &[2, 0, 1]), &d);
            let image = m.map_line(&f, &l);
            for x in l.points(&f) {
                if let Projected::Affine(y) = m.apply(&f, &x) {
                    assert!(image.as_ref().unwrap().contains(&f, &y));
                }
            }
        }
    }

    #[test]
    fn coordinate_projection() {
        let f = Field::prime(7).unwrap();
        let x = pt(&f, &[1, 2, 3]);
        assert_eq!(orthogonal_project(&x, 0, 1).unwrap(), pt(&f, &[1, 2]));
        assert_eq!(orthogonal_project(&x, 0, 2).unwrap(), pt(&f, &[1, 3]));
        assert!(orthogonal_project(&x, 1, 3).is_err());
        assert!(orthogonal_project(&x, 1, 1).is_err());
        let l = line_through(&f, &x, &dir(&f, &[1, 3, 5]));
        let ProjectedLine::Line(img) = project_line(&f, &l, 0, 2).unwrap() else {
            panic!("non-vertical line must project to a line");
        };
        let projected: HashSet<Point> = l
            .points(&f)
            .iter()
            .map(|p| orthogonal_project(p, 0, 2).unwrap())
            .collect();
        assert_eq!(projected, img.points(&f).into_iter().collect());
        let vertical = line_through(&f, &x, &dir(&f, &[0, 1, 0]));
        assert_eq!(
            project_line(&f, &vertical, 0, 2).unwrap(),
            ProjectedLine::Point(pt(&f, &[1, 3]))
        );
    }
}
