//! Anti-de Sitter geometry in ℝP³ with the quadric `AD − BC = 0`.
//!
//! A vector `(A, B, C, D)` is the matrix `[[A, B], [C, D]]`; the quadric is
//! the image of the Segre map `(l, r) ↦ l·rᵀ`, so the left ruling coordinate
//! is the column `(A:C)` and the right one is the row `(A:B)`. The pair
//! `(g, h)` acts by `X ↦ g·X·hᵀ`. The graph of a circle map `φ` is the curve
//! `l·φ(l)ᵀ`.
//!
//! Time orientation: the future at a point `X` is the direction of the
//! rotation flow `X ↦ R(θ)·X`, `R(θ) = [[cos θ, sin θ], [−sin θ, cos θ]]`,
//! for increasing θ. Hull faces whose outward normal points to that side
//! form the future boundary.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use robust::{orient3d, Coord3D};
use serde::Serialize;

use crate::earthquake::{leaf_translation, CircleMap, FiniteLaminationH2, MobiusPiece, Side};
use crate::fuchsian::{axis, enumerate_ball, evaluate, Representation};
use crate::lamination::GeodesicH2;
use crate::minkowski::{HyperbolicPoint, IdealPoint, Mat2, MinkowskiVector};
use crate::Error;

/// Relative tolerance for quadric membership and plane classes.
pub const QUADRIC_EPS: f64 = 1e-9;
/// Relative tolerance for merging coplanar hull triangles.
pub const COPLANAR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct R22Vector {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl R22Vector {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_mat2(m: &Mat2) -> Self {
        Self::new(m.a, m.b, m.c, m.d)
    }

    pub fn to_mat2(self) -> Mat2 {
        Mat2::new(self.a, self.b, self.c, self.d)
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self::new(v[0], v[1], v[2], v[3])
    }

    /// `AD − BC`.
    pub fn q(self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Polarization of `q`: `B(v, v) = q(v)`.
    pub fn pairing(self, o: Self) -> f64 {
        0.5 * (self.a * o.d + self.d * o.a - self.b * o.c - self.c * o.b)
    }

    pub fn norm_sq(self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.a, k * self.b, k * self.c, k * self.d)
    }

    /// `q(v) / |v|²`, scale invariant.
    pub fn relative_q(self) -> f64 {
        self.q() / self.norm_sq()
    }

    /// Image under `(g, h)`: `g·X·hᵀ`.
    pub fn transformed(self, g: &Mat2, h: &Mat2) -> Self {
        Self::from_mat2(&(*g * self.to_mat2() * h.transpose()))
    }
}

/// A point of the quadric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadricPoint(R22Vector);

impl QuadricPoint {
    pub fn new(v: R22Vector) -> Result<Self, Error> {
        if v.norm_sq() == 0.0 {
            return Err(Error::ZeroVector);
        }
        if v.relative_q().abs() > QUADRIC_EPS {
            return Err(Error::OffQuadric(format!("{v:?}")));
        }
        Ok(Self(v))
    }

    pub fn vector(self) -> R22Vector {
        self.0
    }

    /// `(A:C)`, or `(B:D)` when that column is larger.
    pub fn left(self) -> IdealPoint {
        let v = self.0;
        if v.a.hypot(v.c) >= v.b.hypot(v.d) {
            IdealPoint::from_vec([v.a, v.c])
        } else {
            IdealPoint::from_vec([v.b, v.d])
        }
    }

    /// `(A:B)`, or `(C:D)` when that row is larger.
    pub fn right(self) -> IdealPoint {
        let v = self.0;
        if v.a.hypot(v.b) >= v.c.hypot(v.d) {
            IdealPoint::from_vec([v.a, v.b])
        } else {
            IdealPoint::from_vec([v.c, v.d])
        }
    }
}

pub fn segre(left: [f64; 2], right: [f64; 2]) -> Result<QuadricPoint, Error> {
    if left == [0.0, 0.0] || right == [0.0, 0.0] {
        return Err(Error::ZeroVector);
    }
    Ok(QuadricPoint(R22Vector::new(left[0] * right[0], left[0] * right[1], left[1] * right[0], left[1] * right[1])))
}

pub fn rulings_of(v: R22Vector) -> Result<(IdealPoint, IdealPoint), Error> {
    let p = QuadricPoint::new(v)?;
    Ok((p.left(), p.right()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlaneClass {
    Spacelike,
    Null,
    Lorentzian,
}

/// Plane `eA + fB + gC + hD = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectivePlane {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
}

impl ProjectivePlane {
    pub const fn new(e: f64, f: f64, g: f64, h: f64) -> Self {
        Self { e, f, g, h }
    }

    /// The chart plane `A + D = 0` at infinity of the standard chart.
    pub const INFINITY: Self = Self::new(1.0, 0.0, 0.0, 1.0);

    /// The plane `z = k` of the standard chart.
    pub fn height(k: f64) -> Self {
        Self::new(k, -1.0, 1.0, k)
    }

    pub fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.e, self.f, self.g, self.h]
    }

    pub fn incidence(self, v: R22Vector) -> f64 {
        self.e * v.a + self.f * v.b + self.g * v.c + self.h * v.d
    }

    pub fn discriminant(self) -> f64 {
        self.e * self.h - self.g * self.f
    }

    fn norm_sq(self) -> f64 {
        self.e * self.e + self.f * self.f + self.g * self.g + self.h * self.h
    }

    pub fn classify(self, eps: f64) -> PlaneClass {
        let r = self.discriminant() / self.norm_sq();
        if r > eps {
            PlaneClass::Spacelike
        } else if r < -eps {
            PlaneClass::Lorentzian
        } else {
            PlaneClass::Null
        }
    }

    /// The plane whose pole is `v`.
    pub fn polar_of(v: R22Vector) -> Self {
        Self::new(v.d, -v.c, -v.b, v.a)
    }

    /// Image of the plane under `(g, h)`.
    pub fn transformed(self, g: &Mat2, h: &Mat2) -> Self {
        Self::polar_of(dual_point(self).transformed(g, h))
    }

    /// Same plane up to scale.
    pub fn same_as(self, o: Self, eps: f64) -> bool {
        let (a, b) = (self.to_array(), o.to_array());
        let na = self.norm_sq().sqrt();
        let nb = o.norm_sq().sqrt();
        let dot: f64 = (0..4).map(|i| a[i] * b[i]).sum::<f64>() / (na * nb);
        (dot.abs() - 1.0).abs() < eps
    }
}

pub fn plane_classify(p: ProjectivePlane) -> PlaneClass {
    p.classify(QUADRIC_EPS)
}

/// Pole of the plane with respect to `q`: inside AdS for spacelike planes,
/// on the quadric (the tangency point) for null ones.
pub fn dual_point(p: ProjectivePlane) -> R22Vector {
    R22Vector::new(p.h, -p.g, -p.f, p.e)
}

/// Dual point of a spacelike plane, normalized to determinant one.
pub fn dual_ads_point(p: ProjectivePlane) -> Result<Mat2, Error> {
    match p.classify(QUADRIC_EPS) {
        PlaneClass::Spacelike => dual_point(p).to_mat2().normalized(),
        PlaneClass::Null => Err(Error::NullFace),
        PlaneClass::Lorentzian => Err(Error::InvalidParameter("plane is Lorentzian".into())),
    }
}

/// The Möbius map whose graph is the plane's section of the quadric:
/// `l·rᵀ` lies on the plane iff `r = M·l`. Equals the left factor taking
/// the plane to `B = C`.
pub fn plane_mobius(p: ProjectivePlane) -> Result<Mat2, Error> {
    if p.classify(QUADRIC_EPS) != PlaneClass::Spacelike {
        return Err(Error::NullFace);
    }
    Mat2::new(p.f, p.h, -p.e, -p.g).normalized()
}

/// Inverse of [`plane_mobius`].
pub fn mobius_plane(m: &Mat2) -> ProjectivePlane {
    ProjectivePlane::new(-m.c, m.a, -m.d, m.b)
}

/// Covector vanishing on three vectors of ℝ⁴.
fn cross4(u: [f64; 4], v: [f64; 4], w: [f64; 4]) -> [f64; 4] {
    let det3 = |c0: usize, c1: usize, c2: usize| {
        u[c0] * (v[c1] * w[c2] - v[c2] * w[c1]) - u[c1] * (v[c0] * w[c2] - v[c2] * w[c0])
            + u[c2] * (v[c0] * w[c1] - v[c1] * w[c0])
    };
    [det3(1, 2, 3), -det3(0, 2, 3), det3(0, 1, 3), -det3(0, 1, 2)]
}

/// Plane through three points.
pub fn plane_through(u: R22Vector, v: R22Vector, w: R22Vector) -> ProjectivePlane {
    ProjectivePlane::from_array(cross4(u.to_array(), v.to_array(), w.to_array()))
}

// ---------------------------------------------------------------------------
// Graphs of circle maps.

/// Samples `(θ_L, θ_R)` of a monotone degree-one map, sorted by `θ_L` in
/// `[0, 1)`, with `θ_R` lifted to be nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleGraph {
    left: Vec<f64>,
    right: Vec<f64>,
}

impl CircleGraph {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self, Error> {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().map(|(a, b)| (a.rem_euclid(1.0), b.rem_euclid(1.0))).collect();
        if pairs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
            return Err(Error::Input("non-finite circle parameter".into()));
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        pairs.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-12);
        if pairs.len() > 1 && pairs[0].0 + 1.0 - pairs[pairs.len() - 1].0 < 1e-12 {
            pairs.pop();
        }
        if pairs.len() < 3 {
            return Err(Error::Input("a circle graph needs at least 3 distinct samples".into()));
        }
        let mut right = Vec::with_capacity(pairs.len());
        let mut acc = pairs[0].1;
        right.push(acc);
        for w in pairs.windows(2) {
            acc += (w[1].1 - w[0].1).rem_euclid(1.0);
            right.push(acc);
        }
        let winding = acc - right[0] + (pairs[0].1 - pairs[pairs.len() - 1].1).rem_euclid(1.0);
        if (winding - 1.0).abs() > 1e-6 {
            return Err(Error::NotMonotone(format!("samples wind {winding:.3} times")));
        }
        Ok(Self { left: pairs.iter().map(|p| p.0).collect(), right })
    }

    /// Samples of `map` at `n` evenly spaced parameters plus its breakpoints.
    pub fn from_map(map: &CircleMap, n: usize) -> Result<Self, Error> {
        let mut inputs: Vec<f64> = (0..n).map(|k| k as f64 / n as f64).collect();
        if let Some(pieces) = map.pieces() {
            if pieces.len() > 1 {
                inputs.extend(pieces.iter().map(|p| p.start.rem_euclid(1.0)));
            }
        }
        Self::from_pairs(inputs.into_iter().map(|t| (t, map.eval(t))))
    }

    pub fn identity(n: usize) -> Result<Self, Error> {
        Self::from_map(&CircleMap::identity(n), n)
    }

    pub fn mobius(m: &Mat2, n: usize) -> Result<Self, Error> {
        Self::from_map(&CircleMap::mobius(*m, n), n)
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.left.iter().zip(&self.right).map(|(&a, &b)| (a, b.rem_euclid(1.0)))
    }

    pub fn left_params(&self) -> &[f64] {
        &self.left
    }

    /// Largest gap between consecutive left parameters.
    pub fn spacing(&self) -> f64 {
        let n = self.left.len();
        (0..n).map(|i| (self.left[(i + 1) % n] - self.left[i]).rem_euclid(1.0)).fold(0.0, f64::max)
    }

    /// Quadric points `l·rᵀ` with representatives chosen continuously along
    /// the curve (the lift closes up after one turn).
    pub fn points(&self) -> Vec<R22Vector> {
        let pairs: Vec<(f64, f64)> = self.left.iter().copied().zip(self.right.iter().copied()).collect();
        curve_points(&pairs)
    }

    /// Image under `(g, h)`: `(l, r) ↦ (g·l, h·r)`.
    pub fn transformed(&self, g: &Mat2, h: &Mat2) -> Result<Self, Error> {
        Self::from_pairs(self.pairs().map(|(a, b)| {
            (g.apply_ideal(IdealPoint::from_angle(a)).angle(), h.apply_ideal(IdealPoint::from_angle(b)).angle())
        }))
    }

    /// Keeps at most one sample per bin of width `1/bins` (the one nearest
    /// the bin centre).
    pub fn thinned(&self, bins: usize) -> Result<Self, Error> {
        let mut best: Vec<Option<(f64, usize)>> = vec![None; bins];
        for (i, &a) in self.left.iter().enumerate() {
            let k = ((a * bins as f64) as usize).min(bins - 1);
            let off = (a * bins as f64 - k as f64 - 0.5).abs();
            if best[k].is_none_or(|(o, _)| off < o) {
                best[k] = Some((off, i));
            }
        }
        Self::from_pairs(best.into_iter().flatten().map(|(_, i)| (self.left[i], self.right[i])))
    }

    /// Smallest `B(v_i, v_{i+1})` over consecutive samples; positive means
    /// consecutive samples are spacelike separated.
    pub fn min_consecutive_pairing(&self) -> f64 {
        let pts = self.points();
        let n = pts.len();
        (0..n).map(|i| pts[i].pairing(pts[(i + 1) % n])).fold(f64::INFINITY, f64::min)
    }

    pub fn to_circle_map(&self) -> CircleMap {
        CircleMap::from_samples(self.pairs().collect())
    }

    /// A plane containing every sample, if there is one.
    pub fn planar_section(&self, tol: f64) -> Option<ProjectivePlane> {
        let pts = self.points();
        let n = pts.len();
        let plane = plane_through(pts[0], pts[n / 3], pts[2 * n / 3]);
        let norm = plane.norm_sq().sqrt();
        if norm < 1e-12 {
            return None;
        }
        pts.iter().all(|v| (plane.incidence(*v) / norm).abs() < tol).then_some(plane)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta_left,theta_right\n");
        for (a, b) in self.pairs() {
            writeln!(out, "{a},{b}").unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, Error> {
        let map = CircleMap::from_csv(text)?;
        Self::from_pairs(map.samples().iter().copied())
    }
}

/// Quadric points `l(θ_L)·r(θ_R)ᵀ` with `l(θ) = (cos πθ, sin πθ)`; lifted
/// (non-wrapped) parameters give representatives that vary continuously.
pub fn curve_points(params: &[(f64, f64)]) -> Vec<R22Vector> {
    let pi = std::f64::consts::PI;
    params
        .iter()
        .map(|&(a, b)| {
            let l = [(pi * a).cos(), (pi * a).sin()];
            let r = [(pi * b).cos(), (pi * b).sin()];
            R22Vector::new(l[0] * r[0], l[0] * r[1], l[1] * r[0], l[1] * r[1])
        })
        .collect()
}

/// Whether the plane's incidence keeps one strict sign on the points.
pub fn points_disjoint(points: &[R22Vector], plane: ProjectivePlane) -> bool {
    let norm = plane.norm_sq().sqrt();
    let vals: Vec<f64> = points.iter().map(|v| plane.incidence(*v) / (norm * v.norm_sq().sqrt())).collect();
    let tol = 1e-12;
    vals.iter().all(|&x| x > tol) || vals.iter().all(|&x| x < -tol)
}

/// Whether the plane's incidence has one strict sign along the sampled
/// curve.
pub fn plane_disjoint(graph: &CircleGraph, plane: ProjectivePlane) -> bool {
    points_disjoint(&graph.points(), plane)
}

/// A spacelike plane disjoint from the graph. Tries the plane at infinity
/// of the standard chart and the planes `z = k` outward from `k = 0`, then
/// planes whose sections are rotated copies of a Möbius map through three
/// graph samples.
pub fn disjoint_spacelike_plane(graph: &CircleGraph) -> Result<ProjectivePlane, Error> {
    let mut candidates = vec![ProjectivePlane::INFINITY, ProjectivePlane::height(0.0)];
    let mut k = 0.125;
    while k < 1e4 {
        candidates.push(ProjectivePlane::height(k));
        candidates.push(ProjectivePlane::height(-k));
        k *= 1.25;
    }
    for p in candidates {
        if plane_disjoint(graph, p) {
            return Ok(p);
        }
    }
    // Sections are graphs of Möbius maps `M`; the plane is disjoint when
    // `M` never agrees with the sampled map.
    let n = graph.len();
    let pairs: Vec<(f64, f64)> = graph.pairs().collect();
    let fit = mobius_through([pairs[0], pairs[n / 3], pairs[2 * n / 3]])?;
    for step in 1..64 {
        let angle = std::f64::consts::PI * step as f64 / 64.0;
        let m = fit * Mat2::rotation(angle);
        let p = mobius_plane(&m);
        if plane_disjoint(graph, p) {
            return Ok(p);
        }
    }
    Err(Error::PlaneSearchFailed)
}

/// The Möbius map sending three circle parameters to three others.
fn mobius_through(pairs: [(f64, f64); 3]) -> Result<Mat2, Error> {
    // Map (x1, x2, x3) to (∞, 0, 1) on each side, then compose.
    let normal = |pts: [f64; 3]| -> Result<Mat2, Error> {
        let v: Vec<[f64; 2]> = pts.iter().map(|&t| IdealPoint::from_angle(t).vec()).collect();
        // Columns u, w with M·u ∝ (1,0)... built as the inverse of the map
        // sending ∞, 0, 1 to v0, v1, v2.
        let det = |a: [f64; 2], b: [f64; 2]| a[0] * b[1] - a[1] * b[0];
        let (a, b) = (det(v[2], v[1]), det(v[0], v[2]));
        if a.abs() < 1e-14 || b.abs() < 1e-14 {
            return Err(Error::CoincidentEndpoints);
        }
        let inv = Mat2::new(a * v[0][0], b * v[1][0], a * v[0][1], b * v[1][1]);
        Ok(inv.adjugate())
    };
    let src = normal([pairs[0].0, pairs[1].0, pairs[2].0])?;
    let dst = normal([pairs[0].1, pairs[1].1, pairs[2].1])?;
    let m = dst.adjugate() * src;
    if m.det() > 0.0 {
        m.normalized()
    } else {
        Err(Error::NotMonotone("three samples reverse orientation".into()))
    }
}

// ---------------------------------------------------------------------------
// Affine charts.

/// Affine chart on the complement of a spacelike plane: move the plane's
/// dual point to the identity with a left factor, then take
/// `(x, y, z) = (X, Y, Z) / W` for `W = (A+D)/2, X = (A−D)/2, Y = (B+C)/2,
/// Z = (B−C)/2`. The quadric becomes `x² + y² = z² + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineChart {
    pub plane: ProjectivePlane,
    frame: Mat2,
    pole: Mat2,
}

impl AffineChart {
    pub fn new(plane: ProjectivePlane) -> Result<Self, Error> {
        let pole = dual_ads_point(plane)?;
        Ok(Self { plane, frame: pole.adjugate(), pole })
    }

    pub fn standard() -> Self {
        Self::new(ProjectivePlane::INFINITY).expect("spacelike")
    }

    fn wxyz(&self, v: R22Vector) -> [f64; 4] {
        let m = self.frame * v.to_mat2();
        let w = [(m.a + m.d) / 2.0, (m.a - m.d) / 2.0, (m.b + m.c) / 2.0, (m.b - m.c) / 2.0];
        if w[0] < 0.0 {
            w.map(|x| -x)
        } else {
            w
        }
    }

    pub fn project(&self, v: R22Vector) -> [f64; 3] {
        let w = self.wxyz(v);
        [w[1] / w[0], w[2] / w[0], w[3] / w[0]]
    }

    pub fn unproject(&self, p: [f64; 3]) -> R22Vector {
        let [x, y, z] = p;
        let m = Mat2::new(1.0 + x, y + z, y - z, 1.0 - x);
        R22Vector::from_mat2(&(self.pole * m))
    }

    /// Chart image of the future time direction at a chart point.
    pub fn future_direction(&self, p: [f64; 3]) -> [f64; 3] {
        let [x, y, z] = p;
        // J·X in chart-frame coordinates; J = [[0,1],[−1,0]].
        let m = Mat2::new(1.0 + x, y + z, y - z, 1.0 - x);
        let t = Mat2::new(0.0, 1.0, -1.0, 0.0) * m;
        let w = (t.a + t.d) / 2.0;
        let dx = (t.a - t.d) / 2.0;
        let dy = (t.b + t.c) / 2.0;
        let dz = (t.b - t.c) / 2.0;
        [dx - x * w, dy - y * w, dz - z * w]
    }
}

// ---------------------------------------------------------------------------
// Convex hulls.

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullFace {
    /// Graph sample indices around the face.
    pub vertices: Vec<usize>,
    pub plane: ProjectivePlane,
    pub class: PlaneClass,
    pub future: bool,
    /// Outward unit normal in the chart.
    pub normal: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HullEdge {
    pub vertices: [usize; 2],
    pub faces: [usize; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct HullComplex {
    pub chart: AffineChart,
    pub graph: CircleGraph,
    pub points: Vec<R22Vector>,
    pub chart_points: Vec<[f64; 3]>,
    pub faces: Vec<HullFace>,
    pub edges: Vec<HullEdge>,
    pub flat: bool,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn coord(p: [f64; 3]) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

/// Positive when `d` is below the plane of the counterclockwise `a, b, c`.
fn orient(pts: &[[f64; 3]], a: usize, b: usize, c: usize, d: usize) -> f64 {
    orient3d(coord(pts[a]), coord(pts[b]), coord(pts[c]), coord(pts[d]))
}

/// Triangulated hull by randomized incremental insertion with exact
/// orientation signs. Triangles are counterclockwise seen from outside.
fn hull_triangles(pts: &[[f64; 3]], seed: u64) -> Result<Vec<[usize; 3]>, Error> {
    let n = pts.len();
    // Initial tetrahedron from extreme points.
    let i0 = (0..n).min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0])).unwrap();
    let i1 = (0..n).max_by(|&a, &b| norm(sub(pts[a], pts[i0])).total_cmp(&norm(sub(pts[b], pts[i0])))).unwrap();
    let line = sub(pts[i1], pts[i0]);
    let i2 = (0..n)
        .max_by(|&a, &b| {
            norm(cross(line, sub(pts[a], pts[i0]))).total_cmp(&norm(cross(line, sub(pts[b], pts[i0]))))
        })
        .unwrap();
    let i3 = (0..n).max_by(|&a, &b| orient(pts, i0, i1, i2, a).abs().total_cmp(&orient(pts, i0, i1, i2, b).abs())).unwrap();
    if orient(pts, i0, i1, i2, i3) == 0.0 {
        return Err(Error::FlatHull);
    }
    let mut faces: Vec<[usize; 3]> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    let add = |f: [usize; 3], faces: &mut Vec<[usize; 3]>, alive: &mut Vec<bool>, edges: &mut HashMap<(usize, usize), usize>| {
        let id = faces.len();
        faces.push(f);
        alive.push(true);
        for k in 0..3 {
            edges.insert((f[k], f[(k + 1) % 3]), id);
        }
    };
    let tet = [i0, i1, i2, i3];
    for skip in 0..4 {
        let mut f: Vec<usize> = (0..4).filter(|&k| k != skip).map(|k| tet[k]).collect();
        if orient(pts, f[0], f[1], f[2], tet[skip]) < 0.0 {
            f.swap(0, 1);
        }
        add([f[0], f[1], f[2]], &mut faces, &mut alive, &mut edges);
    }
    let mut order: Vec<usize> = (0..n).filter(|i| !tet.contains(i)).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    for p in order {
        let visible: Vec<usize> =
            (0..faces.len()).filter(|&f| alive[f] && orient(pts, faces[f][0], faces[f][1], faces[f][2], p) < 0.0).collect();
        if visible.is_empty() {
            continue;
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            alive[f] = false;
        }
        for &f in &visible {
            let t = faces[f];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let twin = edges[&(b, a)];
                if alive[twin] {
                    horizon.push((a, b));
                }
            }
        }
        for &f in &visible {
            let t = faces[f];
            for k in 0..3 {
                let key = (t[k], t[(k + 1) % 3]);
                if edges.get(&key) == Some(&f) {
                    edges.remove(&key);
                }
            }
        }
        for (a, b) in horizon {
            add([a, b, p], &mut faces, &mut alive, &mut edges);
        }
    }
    Ok(faces.into_iter().zip(alive).filter_map(|(f, a)| a.then_some(f)).collect())
}

/// Convex hull of the graph samples in the chart of `chart_plane`.
pub fn convex_hull(graph: &CircleGraph, chart_plane: ProjectivePlane) -> Result<HullComplex, Error> {
    convex_hull_seeded(graph, chart_plane, 1)
}

pub fn convex_hull_seeded(graph: &CircleGraph, chart_plane: ProjectivePlane, seed: u64) -> Result<HullComplex, Error> {
    if !plane_disjoint(graph, chart_plane) {
        return Err(Error::InvalidParameter("chart plane meets the graph".into()));
    }
    let chart = AffineChart::new(chart_plane)?;
    let points = graph.points();
    let chart_points: Vec<[f64; 3]> = points.iter().map(|v| chart.project(*v)).collect();
    let extent = chart_points.iter().flat_map(|p| p.iter().map(|x| x.abs())).fold(1.0, f64::max);
    let tol = COPLANAR_EPS * extent;

    let flat = |graph: &CircleGraph| -> Result<HullComplex, Error> {
        let n = points.len();
        let plane = plane_through(points[0], points[n / 3], points[2 * n / 3]);
        let normal = {
            let c = cross(sub(chart_points[n / 3], chart_points[0]), sub(chart_points[2 * n / 3], chart_points[0]));
            c.map(|x| x / norm(c))
        };
        Ok(HullComplex {
            chart,
            graph: graph.clone(),
            points: points.clone(),
            chart_points: chart_points.clone(),
            faces: vec![HullFace { vertices: (0..n).collect(), plane, class: plane.classify(QUADRIC_EPS), future: true, normal }],
            edges: Vec::new(),
            flat: true,
        })
    };
    // Flatness up to rounding.
    {
        let n = chart_points.len();
        let (a, b, c) = (chart_points[0], chart_points[n / 3], chart_points[2 * n / 3]);
        let nrm = cross(sub(b, a), sub(c, a));
        let len = norm(nrm);
        if len > 0.0 && chart_points.iter().all(|p| (dot(sub(*p, a), nrm) / len).abs() < tol) {
            return flat(graph);
        }
    }
    let tris = match hull_triangles(&chart_points, seed) {
        Ok(t) => t,
        Err(Error::FlatHull) => return flat(graph),
        Err(e) => return Err(e),
    };

    // Merge coplanar neighbours into faces, growing from the largest
    // triangles against a fixed reference plane.
    let mut tri_of_edge: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for k in 0..3 {
            tri_of_edge.insert((t[k], t[(k + 1) % 3]), i);
        }
    }
    let area = |t: &[usize; 3]| {
        norm(cross(sub(chart_points[t[1]], chart_points[t[0]]), sub(chart_points[t[2]], chart_points[t[0]])))
    };
    let mut by_area: Vec<usize> = (0..tris.len()).collect();
    by_area.sort_by(|&a, &b| area(&tris[b]).total_cmp(&area(&tris[a])));
    let mut group = vec![usize::MAX; tris.len()];
    let mut refs: Vec<usize> = Vec::new();
    for &seed_tri in &by_area {
        if group[seed_tri] != usize::MAX {
            continue;
        }
        let g = refs.len();
        refs.push(seed_tri);
        let t = tris[seed_tri];
        let o = chart_points[t[0]];
        let nrm = cross(sub(chart_points[t[1]], o), sub(chart_points[t[2]], o));
        let nrm = nrm.map(|x| x / norm(nrm));
        group[seed_tri] = g;
        let mut queue = VecDeque::from([seed_tri]);
        while let Some(cur) = queue.pop_front() {
            let t = tris[cur];
            for k in 0..3 {
                let nb = tri_of_edge[&(t[(k + 1) % 3], t[k])];
                if group[nb] != usize::MAX {
                    continue;
                }
                if tris[nb].iter().all(|&v| dot(sub(chart_points[v], o), nrm).abs() < tol) {
                    group[nb] = g;
                    queue.push_back(nb);
                }
            }
        }
    }

    let mut faces = Vec::with_capacity(refs.len());
    let mut boundary: Vec<HashMap<usize, usize>> = vec![HashMap::new(); refs.len()];
    let mut edge_faces: HashMap<(usize, usize), [usize; 2]> = HashMap::new();
    for (i, t) in tris.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let other = group[tri_of_edge[&(b, a)]];
            if other != group[i] {
                boundary[group[i]].insert(a, b);
                let key = (a.min(b), a.max(b));
                let entry = edge_faces.entry(key).or_insert([usize::MAX; 2]);
                entry[if a < b { 0 } else { 1 }] = group[i];
            }
        }
    }
    for (g, &r) in refs.iter().enumerate() {
        let t = tris[r];
        let cycle = {
            let next = &boundary[g];
            let start = *next.keys().min().unwrap();
            let mut cycle = vec![start];
            let mut cur = next[&start];
            while cur != start && cycle.len() <= next.len() {
                cycle.push(cur);
                cur = next[&cur];
            }
            cycle
        };
        let o = chart_points[t[0]];
        let nrm = cross(sub(chart_points[t[1]], o), sub(chart_points[t[2]], o));
        let normal = nrm.map(|x| x / norm(nrm));
        let plane = plane_through(points[t[0]], points[t[1]], points[t[2]]);
        let centroid = {
            let s = cycle.iter().fold([0.0; 3], |acc, &v| {
                let p = chart_points[v];
                [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]]
            });
            s.map(|x| x / cycle.len() as f64)
        };
        let future = dot(normal, chart.future_direction(centroid)) > 0.0;
        faces.push(HullFace { vertices: cycle, plane, class: plane.classify(QUADRIC_EPS), future, normal });
    }
    let mut edges: Vec<HullEdge> =
        edge_faces.into_iter().map(|((a, b), f)| HullEdge { vertices: [a, b], faces: f }).collect();
    edges.sort_by_key(|e| e.vertices);
    Ok(HullComplex { chart, graph: graph.clone(), points, chart_points, faces, edges, flat: false })
}

impl HullComplex {
    pub fn future_faces(&self) -> impl Iterator<Item = (usize, &HullFace)> {
        self.faces.iter().enumerate().filter(|(_, f)| f.future)
    }

    pub fn count_class(&self, class: PlaneClass) -> usize {
        self.faces.iter().filter(|f| f.class == class).count()
    }

    /// Largest `|q(v)| / |v|²` over hull vertices.
    pub fn quadric_residual(&self) -> f64 {
        let mut used = vec![false; self.points.len()];
        for f in &self.faces {
            for &v in &f.vertices {
                used[v] = true;
            }
        }
        self.points.iter().zip(used).filter(|(_, u)| *u).map(|(v, _)| v.relative_q().abs()).fold(0.0, f64::max)
    }

    /// Largest chart distance of a face vertex from its face's plane.
    pub fn coplanarity_residual(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let o = self.chart_points[f.vertices[0]];
                f.vertices.iter().map(|&v| dot(sub(self.chart_points[v], o), f.normal).abs()).fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Largest outward chart distance of any sample from any face plane
    /// (non-positive up to rounding for a convex hull).
    pub fn convexity_residual(&self) -> f64 {
        if self.flat {
            return 0.0;
        }
        self.faces
            .iter()
            .map(|f| {
                let o = self.chart_points[f.vertices[0]];
                self.chart_points.iter().map(|p| dot(sub(*p, o), f.normal)).fold(f64::NEG_INFINITY, f64::max)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_obj(&self) -> String {
        let p = self.chart.plane;
        let mut out = format!("# affine chart complementary to the plane ({}:{}:{}:{})\n", p.e, p.f, p.g, p.h);
        for c in &self.chart_points {
            writeln!(out, "v {} {} {}", c[0], c[1], c[2]).unwrap();
        }
        for f in &self.faces {
            let idx: Vec<String> = f.vertices.iter().map(|v| (v + 1).to_string()).collect();
            writeln!(out, "f {}", idx.join(" ")).unwrap();
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BendingDatum {
    pub vertices: [usize; 2],
    pub endpoints: [R22Vector; 2],
    pub faces: [usize; 2],
    pub planes: [ProjectivePlane; 2],
    /// `B` of the normalized dual points.
    pub pairing: f64,
    pub weight: f64,
}

/// Bending along future edges: the distance between the dual points of the
/// two adjacent faces.
pub fn bending_data(hull: &HullComplex) -> Result<Vec<BendingDatum>, Error> {
    let mut out = Vec::new();
    if hull.flat {
        return Ok(out);
    }
    for e in &hull.edges {
        let [f1, f2] = e.faces;
        if f1 == usize::MAX || f2 == usize::MAX || !hull.faces[f1].future || !hull.faces[f2].future {
            continue;
        }
        let (p1, p2) = (hull.faces[f1].plane, hull.faces[f2].plane);
        let d1 = R22Vector::from_mat2(&dual_ads_point(p1)?);
        let d2 = R22Vector::from_mat2(&dual_ads_point(p2)?);
        let pairing = d1.pairing(d2);
        out.push(BendingDatum {
            vertices: e.vertices,
            endpoints: [hull.points[e.vertices[0]], hull.points[e.vertices[1]]],
            faces: [f1, f2],
            planes: [p1, p2],
            pairing,
            weight: pairing.abs().max(1.0).acosh(),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Earthquake extraction.

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaceMap {
    pub face: usize,
    /// Left factor taking the face plane to `B = C`; also the face's
    /// boundary Möbius map `l ↦ r`.
    pub left_normalizer: Mat2,
    /// Right factor taking the face plane to `B = C`.
    pub right_normalizer: Mat2,
    pub left_vertices: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractedLeaf {
    pub geodesic: GeodesicH2,
    pub faces: [usize; 2],
    /// Positive for a left shear.
    pub signed_shear: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedEarthquake {
    pub faces: Vec<FaceMap>,
    pub leaves: Vec<ExtractedLeaf>,
    pub base_face: usize,
    pub lamination: FiniteLaminationH2,
    pub boundary: CircleMap,
}

impl ExtractedEarthquake {
    /// Sum of signed shears of the leaves separating `p` from `q`.
    pub fn shear_between(&self, p: HyperbolicPoint, q: HyperbolicPoint) -> f64 {
        self.leaves
            .iter()
            .filter(|l| (l.geodesic.signed_offset(p) > 0.0) != (l.geodesic.signed_offset(q) > 0.0))
            .map(|l| l.signed_shear)
            .sum()
    }

    pub fn total_shear(&self) -> f64 {
        self.leaves.iter().map(|l| l.signed_shear).sum()
    }
}

fn ideal_centroid(angles: &[f64]) -> HyperbolicPoint {
    let s = angles.iter().fold(MinkowskiVector::ZERO, |acc, &t| acc + IdealPoint::from_angle(t).null_vector());
    HyperbolicPoint::normalize(s)
}

/// Reads the left earthquake off the future boundary: each future face
/// gives the Möbius map of its ideal polygon, and each edge between future
/// faces a leaf sheared by the relative map.
pub fn extract_left_earthquake(hull: &HullComplex) -> Result<ExtractedEarthquake, Error> {
    let left = hull.graph.left_params();
    let mut index = vec![usize::MAX; hull.faces.len()];
    let mut faces = Vec::new();
    for (i, f) in hull.future_faces() {
        let m = plane_mobius(f.plane)?;
        index[i] = faces.len();
        let p = f.plane;
        let right = Mat2::new(p.g, p.h, -p.e, -p.f).normalized()?;
        faces.push(FaceMap {
            face: i,
            left_normalizer: m,
            right_normalizer: right,
            left_vertices: f.vertices.iter().map(|&v| left[v]).collect(),
        });
    }
    if faces.is_empty() {
        return Err(Error::Indeterminate("hull has no future faces".into()));
    }
    let centroids: Vec<HyperbolicPoint> = faces.iter().map(|f| ideal_centroid(&f.left_vertices)).collect();
    let mut leaves = Vec::new();
    for e in &hull.edges {
        let [f1, f2] = e.faces;
        if f1 == usize::MAX || f2 == usize::MAX || index[f1] == usize::MAX || index[f2] == usize::MAX {
            continue;
        }
        let (i1, i2) = (index[f1], index[f2]);
        let geodesic = GeodesicH2::new(IdealPoint::from_angle(left[e.vertices[0]]), IdealPoint::from_angle(left[e.vertices[1]]))?;
        let rel = faces[i1].left_normalizer.adjugate() * faces[i2].left_normalizer;
        let tr = rel.trace().abs();
        let length = if tr > 2.0 { 2.0 * (tr / 2.0).acosh() } else { 0.0 };
        let as_left = leaf_translation(&geodesic, centroids[i1], Side::Left, length);
        let as_right = leaf_translation(&geodesic, centroids[i1], Side::Right, length);
        let signed_shear = if rel.psl_distance(&as_left) <= rel.psl_distance(&as_right) { length } else { -length };
        leaves.push(ExtractedLeaf { geodesic, faces: [i1, i2], signed_shear });
    }
    let base_face = 0;
    let lam_leaves: Vec<(GeodesicH2, f64)> =
        leaves.iter().filter(|l| l.signed_shear.abs() > 0.0).map(|l| (l.geodesic, l.signed_shear.abs())).collect();
    let lamination = FiniteLaminationH2::new(lam_leaves, centroids[base_face])?;

    // Boundary map: each arc between consecutive samples takes the map of
    // the future face containing that hull edge.
    let mut face_of_edge: HashMap<(usize, usize), usize> = HashMap::new();
    for (k, f) in faces.iter().enumerate() {
        let verts = &hull.faces[f.face].vertices;
        for j in 0..verts.len() {
            let (a, b) = (verts[j], verts[(j + 1) % verts.len()]);
            face_of_edge.insert((a.min(b), a.max(b)), k);
        }
    }
    let n = left.len();
    let mut vertex_face = vec![usize::MAX; n];
    for (k, f) in faces.iter().enumerate() {
        for &v in &hull.faces[f.face].vertices {
            vertex_face[v] = k;
        }
    }
    let pieces: Vec<MobiusPiece> = (0..n)
        .map(|i| {
            let j = (i + 1) % n;
            let k = face_of_edge.get(&(i.min(j), i.max(j))).copied().unwrap_or(if vertex_face[i] != usize::MAX {
                vertex_face[i]
            } else {
                0
            });
            let end = if j == 0 { left[0] + 1.0 } else { left[j] };
            MobiusPiece { start: left[i], end, map: faces[k].left_normalizer }
        })
        .collect();
    let boundary = CircleMap::from_pieces(pieces, n.max(16));
    Ok(ExtractedEarthquake { faces, leaves, base_face, lamination, boundary })
}

// ---------------------------------------------------------------------------
// Conjugacies from holonomy pairs.

/// Pairs the attracting fixed points of `ρ_L(w)` and `ρ_R(w)` over the
/// nontrivial words of the radius-`radius` ball of `ρ_L`.
pub fn sample_conjugacy(left: &Representation, right: &Representation, radius: usize) -> Result<CircleGraph, Error> {
    if left.generator_count() != right.generator_count() {
        return Err(Error::Input("representations have different generator counts".into()));
    }
    let ball = enumerate_ball(left, radius);
    let mut pairs = Vec::with_capacity(ball.len());
    for el in ball.elements() {
        if el.word.is_empty() {
            continue;
        }
        let a = axis(&el.matrix)?;
        let b = axis(&evaluate(right, &el.word))?;
        pairs.push((a.attracting.angle(), b.attracting.angle()));
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-9);
    CircleGraph::from_pairs(pairs)
}

/// Whether the dual plane of `p` misses the sampled graph, i.e. the
/// pairing with `p` keeps one sign along the curve.
pub fn dependence_membership(p: &Mat2, graph: &CircleGraph) -> Result<bool, Error> {
    if graph.planar_section(1e-9).is_some() {
        return Err(Error::Indeterminate("graph lies in a plane".into()));
    }
    let pv = R22Vector::from_mat2(p);
    if pv.q() <= 0.0 {
        return Err(Error::InvalidParameter("point is not in anti-de Sitter space".into()));
    }
    let scale = pv.norm_sq().sqrt();
    let vals: Vec<f64> = graph.points().iter().map(|v| pv.pairing(*v) / scale).collect();
    if vals.iter().any(|x| x.abs() < 1e-12) {
        return Err(Error::Indeterminate("dual plane passes through a sample".into()));
    }
    Ok(vals.iter().all(|&x| x > 0.0) || vals.iter().all(|&x| x < 0.0))
}
