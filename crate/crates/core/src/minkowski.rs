//! Linear algebra of ℝ^{2+1}, the hyperboloid model of ℍ², and the
//! identification of PSL(2,ℝ) with SO(2,1)₀.
//!
//! Coordinates are `(x, y, t)` with the form `x·x' + y·y' − t·t'`.
//!
//! The adjoint identification uses the traceless basis
//!
//! ```text
//!   x ↔ S = [[0,1],[1,0]]    y ↔ H = [[1,0],[0,-1]]    t ↔ J = [[0,1],[-1,0]]
//! ```
//!
//! so a vector `(x, y, t)` is the matrix `[[y, x+t], [x−t, −y]]` and
//! `⟨v,v⟩ = −det`. With this choice `diag(e^{λ/2}, e^{−λ/2})` acts as the
//! boost in the `(x, t)` plane fixing the `y` axis, and its axis in ℍ² lies
//! in the plane `y = 0`. The normalization constant of the identification is
//! 1 (half the trace form), which makes unit timelike vectors correspond to
//! elliptic elements of determinant 1.
//!
//! Ideal points `(p : q) ∈ ℝP¹` map to the future null vector
//! `((p²−q²)/2, −pq, (p²+q²)/2)`; this map is equivariant for the adjoint
//! action. Points of ℍ² map to the upper half plane by `z = (y − i)/(x − t)`.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::Error;

/// Global relative tolerance for classification and invariant checks.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MinkowskiVector {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl MinkowskiVector {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        Self { x, y, t }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn inner(self, other: Self) -> f64 {
        minkowski_inner(self, other)
    }

    pub fn norm_sq(self) -> f64 {
        self.inner(self)
    }

    pub fn norm_inf(self) -> f64 {
        self.x.abs().max(self.y.abs()).max(self.t.abs())
    }

    pub fn euclidean_norm(self) -> f64 {
        (self.x * self.x + self.y * self.y + self.t * self.t).sqrt()
    }

    /// Vector `n` with `⟨n, u⟩ = ⟨n, v⟩ = 0`: the Euclidean cross product
    /// with its time component negated.
    pub fn lorentz_cross(self, other: Self) -> Self {
        let cx = self.y * other.t - self.t * other.y;
        let cy = self.t * other.x - self.x * other.t;
        let ct = self.x * other.y - self.y * other.x;
        Self::new(cx, cy, -ct)
    }

    pub fn classify(self, eps: f64) -> CausalClass {
        classify(self, eps)
    }
}

impl Add for MinkowskiVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.t + o.t)
    }
}

impl Sub for MinkowskiVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.t - o.t)
    }
}

impl Neg for MinkowskiVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.t)
    }
}

impl Mul<MinkowskiVector> for f64 {
    type Output = MinkowskiVector;
    fn mul(self, v: MinkowskiVector) -> MinkowskiVector {
        MinkowskiVector::new(self * v.x, self * v.y, self * v.t)
    }
}

impl fmt::Display for MinkowskiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.t)
    }
}

pub fn minkowski_inner(u: MinkowskiVector, v: MinkowskiVector) -> f64 {
    u.x * v.x + u.y * v.y - u.t * v.t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    Timelike,
    Null,
    Spacelike,
    Zero,
}

/// Causal type of `v`, comparing `⟨v,v⟩` against `eps·‖v‖²` so the answer
/// does not depend on the scale of `v`.
pub fn classify(v: MinkowskiVector, eps: f64) -> CausalClass {
    let scale = v.norm_inf();
    if scale < eps {
        return CausalClass::Zero;
    }
    // Normalize first so tiny and huge vectors classify the same way.
    let u = (1.0 / scale) * v;
    let q = u.norm_sq();
    if q > eps {
        CausalClass::Spacelike
    } else if q < -eps {
        CausalClass::Timelike
    } else {
        CausalClass::Null
    }
}

/// A 3×3 matrix preserving the Minkowski form, acting on column vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzLinear(pub [[f64; 3]; 3]);

impl LorentzLinear {
    pub const IDENTITY: Self = Self([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// The boost of rapidity `lambda` in the `(y, t)` plane fixing the x axis,
    /// written exactly as the matrix `T(λ)` of the standard spacetimes.
    pub fn boost_yt(lambda: f64) -> Self {
        let (c, s) = (lambda.cosh(), lambda.sinh());
        Self([[1.0, 0.0, 0.0], [0.0, c, s], [0.0, s, c]])
    }

    /// The boost of rapidity `lambda` in the `(x, t)` plane fixing the y axis.
    pub fn boost_xt(lambda: f64) -> Self {
        let (c, s) = (lambda.cosh(), lambda.sinh());
        Self([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])
    }

    pub fn apply(&self, v: MinkowskiVector) -> MinkowskiVector {
        let m = &self.0;
        let a = v.to_array();
        let row = |i: usize| m[i][0] * a[0] + m[i][1] * a[1] + m[i][2] * a[2];
        MinkowskiVector::new(row(0), row(1), row(2))
    }

    pub fn compose(&self, other: &Self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Self(out)
    }

    pub fn transpose(&self) -> Self {
        let m = &self.0;
        Self([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    /// `G·Aᵀ·G`, the inverse of any element of O(2,1).
    pub fn inverse(&self) -> Self {
        let mut t = self.transpose();
        for i in 0..3 {
            for j in 0..3 {
                let si = if i == 2 { -1.0 } else { 1.0 };
                let sj = if j == 2 { -1.0 } else { 1.0 };
                t.0[i][j] *= si * sj;
            }
        }
        t
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// `‖AᵀGA − G‖_∞`.
    pub fn form_residual(&self) -> f64 {
        let g = [1.0, 1.0, -1.0];
        let m = &self.0;
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| m[k][i] * g[k] * m[k][j]).sum();
                let target = if i == j { g[i] } else { 0.0 };
                worst = worst.max((v - target).abs());
            }
        }
        worst
    }

    pub fn is_orthochronous(&self) -> bool {
        self.0[2][2] >= 1.0 - DEFAULT_EPS
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        worst
    }
}

/// Affine isometry `x ↦ A·x + b` of ℝ^{2+1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzIsometry {
    pub linear: LorentzLinear,
    pub translation: MinkowskiVector,
}

impl LorentzIsometry {
    pub fn new(linear: LorentzLinear, translation: MinkowskiVector) -> Self {
        Self { linear, translation }
    }

    pub fn apply(&self, v: MinkowskiVector) -> MinkowskiVector {
        self.linear.apply(v) + self.translation
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            linear: self.linear.compose(&other.linear),
            translation: self.linear.apply(other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = self.linear.inverse();
        Self { linear: inv, translation: -inv.apply(self.translation) }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.linear.max_abs_diff(&other.linear).max((self.translation - other.translation).norm_inf())
    }
}

/// A 2×2 real matrix `[[a, b], [c, d]]`.
///
/// Elements of PSL(2,ℝ) are stored with determinant 1 and the sign fixed so
/// that the first entry (row-major) that is not ~0 is positive. Projective
/// matrices from the anti-de Sitter model use the same type without the
/// determinant constraint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[[f64; 2]; 2]", into = "[[f64; 2]; 2]")]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl From<[[f64; 2]; 2]> for Mat2 {
    fn from(m: [[f64; 2]; 2]) -> Self {
        Mat2::new(m[0][0], m[0][1], m[1][0], m[1][1])
    }
}

impl From<Mat2> for [[f64; 2]; 2] {
    fn from(m: Mat2) -> Self {
        [[m.a, m.b], [m.c, m.d]]
    }
}

impl Mat2 {
    pub const IDENTITY: Self = Self { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn diag(p: f64, q: f64) -> Self {
        Self::new(p, 0.0, 0.0, q)
    }

    /// Rotation by `theta` in the form `[[cos, sin], [−sin, cos]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s, -s, c)
    }

    /// `diag(e^{λ/2}, e^{−λ/2})`: translation by `λ` along the geodesic from
    /// `0` to `∞`, towards `∞`.
    pub fn boost(lambda: f64) -> Self {
        Self::diag((lambda / 2.0).exp(), (-lambda / 2.0).exp())
    }

    /// The element whose adjoint is `LorentzLinear::boost_yt(lambda)`.
    pub fn boost_yt(lambda: f64) -> Self {
        let (c, s) = ((lambda / 2.0).cosh(), (lambda / 2.0).sinh());
        Self::new(c, -s, -s, c)
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    fn product(&self, o: &Self) -> Self {
        Self::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    /// Adjugate, which is the inverse for determinant-one matrices.
    pub fn adjugate(&self) -> Self {
        Self::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        let adj = self.adjugate();
        Self::new(adj.a / det, adj.b / det, adj.c / det, adj.d / det)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(k * self.a, k * self.b, k * self.c, k * self.d)
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Rescale to determinant 1. Fails for `det ≤ 0`.
    pub fn normalized(&self) -> Result<Self, Error> {
        let det = self.det();
        if !(det > 0.0) {
            return Err(Error::NotUnimodular { det });
        }
        Ok(self.scale(1.0 / det.sqrt()))
    }

    /// Sign representative with the first non-negligible entry positive.
    pub fn canonical(&self) -> Self {
        let tol = 1e-12 * self.max_abs().max(1.0);
        let first = self.entries().into_iter().find(|v| v.abs() > tol).unwrap_or(0.0);
        if first < 0.0 {
            self.scale(-1.0)
        } else {
            *self
        }
    }

    /// Entrywise distance in PSL: the smaller of `‖m − o‖` and `‖m + o‖`.
    pub fn psl_distance(&self, o: &Self) -> f64 {
        let plus = self.entries().iter().zip(o.entries()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        let minus = self.entries().iter().zip(o.entries()).fold(0.0f64, |m, (x, y)| m.max((x + y).abs()));
        plus.min(minus)
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.entries().iter().zip(o.entries()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    }

    pub fn is_hyperbolic(&self, eps: f64) -> bool {
        self.trace().abs() > 2.0 + eps
    }

    /// Action on a column vector.
    pub fn apply_vec(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn apply_ideal(&self, p: IdealPoint) -> IdealPoint {
        IdealPoint::from_vec(self.apply_vec(p.vec()))
    }

    /// Möbius action on the upper half plane.
    pub fn apply_complex(&self, z: (f64, f64)) -> (f64, f64) {
        let (x, y) = z;
        let (nr, ni) = (self.a * x + self.b, self.a * y);
        let (dr, di) = (self.c * x + self.d, self.c * y);
        let den = dr * dr + di * di;
        ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den)
    }

    pub fn apply_point(&self, p: HyperbolicPoint) -> HyperbolicPoint {
        let ad = adjoint_unchecked(self);
        HyperbolicPoint::normalize(ad.apply(p.vector()))
    }

    /// The traceless matrix representing `v`.
    pub fn from_vector(v: MinkowskiVector) -> Self {
        Self::new(v.y, v.x + v.t, v.x - v.t, -v.y)
    }

    pub fn to_vector(&self) -> MinkowskiVector {
        let x = (self.b + self.c) / 2.0;
        let t = (self.b - self.c) / 2.0;
        MinkowskiVector::new(x, self.a, t)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        self.product(&o)
    }
}

fn adjoint_unchecked(m: &Mat2) -> LorentzLinear {
    let inv = m.adjugate();
    let basis = [
        MinkowskiVector::new(1.0, 0.0, 0.0),
        MinkowskiVector::new(0.0, 1.0, 0.0),
        MinkowskiVector::new(0.0, 0.0, 1.0),
    ];
    let mut out = [[0.0; 3]; 3];
    for (j, e) in basis.iter().enumerate() {
        let img = (*m * Mat2::from_vector(*e) * inv).to_vector().to_array();
        for i in 0..3 {
            out[i][j] = img[i];
        }
    }
    LorentzLinear(out)
}

/// The adjoint action `X ↦ m X m⁻¹` on traceless matrices, written in the
/// `(x, y, t)` basis documented at module level. `m` and `−m` give the same
/// result.
pub fn adjoint_to_so21(m: &Mat2) -> Result<LorentzLinear, Error> {
    let det = m.det();
    if (det - 1.0).abs() > 1e-9 * m.max_abs().powi(2).max(1.0) {
        return Err(Error::NotUnimodular { det });
    }
    Ok(adjoint_unchecked(m))
}

/// A point of ℝP¹, stored as a unit vector `(p, q)` with a canonical sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdealPoint {
    p: f64,
    q: f64,
}

impl IdealPoint {
    pub fn from_vec(v: [f64; 2]) -> Self {
        let n = v[0].hypot(v[1]);
        let (mut p, mut q) = (v[0] / n, v[1] / n);
        if q < 0.0 || (q == 0.0 && p < 0.0) {
            p = -p;
            q = -q;
        }
        Self { p, q }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_vec([x, 1.0])
    }

    pub fn infinity() -> Self {
        Self { p: 1.0, q: 0.0 }
    }

    /// `None` at ∞.
    pub fn to_real(self) -> Option<f64> {
        if self.q.abs() < 1e-15 {
            None
        } else {
            Some(self.p / self.q)
        }
    }

    pub fn vec(self) -> [f64; 2] {
        [self.p, self.q]
    }

    /// Circle parameter in `[0, 1)`: the direction angle of `(p, q)` divided
    /// by π. Increasing θ runs through the reals in decreasing order.
    pub fn angle(self) -> f64 {
        let th = self.q.atan2(self.p) / std::f64::consts::PI;
        let th = th.rem_euclid(1.0);
        if th >= 1.0 {
            0.0
        } else {
            th
        }
    }

    pub fn from_angle(theta: f64) -> Self {
        let a = theta * std::f64::consts::PI;
        Self::from_vec([a.cos(), a.sin()])
    }

    /// The future null vector of this ideal point (unit time component).
    pub fn null_vector(self) -> MinkowskiVector {
        let (p, q) = (self.p, self.q);
        MinkowskiVector::new((p * p - q * q) / 2.0, -p * q, (p * p + q * q) / 2.0)
    }

    pub fn from_null_vector(n: MinkowskiVector) -> Self {
        // n ∝ ((p²−q²)/2, −pq, (p²+q²)/2)
        let pp = n.t + n.x;
        let qq = n.t - n.x;
        if pp >= qq {
            let p = pp.max(0.0).sqrt();
            Self::from_vec([p, -n.y / p])
        } else {
            let q = qq.max(0.0).sqrt();
            Self::from_vec([-n.y / q, q])
        }
    }

    /// Angular distance on the circle `ℝ/ℤ` of parameters.
    pub fn circle_distance(self, other: Self) -> f64 {
        let d = (self.angle() - other.angle()).rem_euclid(1.0);
        d.min(1.0 - d)
    }
}

/// A point of the hyperboloid `⟨v,v⟩ = −1, t > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicPoint(MinkowskiVector);

impl HyperbolicPoint {
    pub fn apex() -> Self {
        Self(MinkowskiVector::new(0.0, 0.0, 1.0))
    }

    /// Projects a future timelike vector onto the hyperboloid.
    pub fn normalize(v: MinkowskiVector) -> Self {
        let n = (-v.norm_sq()).sqrt();
        let s = if v.t < 0.0 { -1.0 / n } else { 1.0 / n };
        Self(s * v)
    }

    pub fn try_new(v: MinkowskiVector, eps: f64) -> Result<Self, Error> {
        if v.classify(eps) != CausalClass::Timelike {
            return Err(Error::NotTimelike);
        }
        Ok(Self::normalize(v))
    }

    /// Point on the hyperboloid with the given spatial coordinates.
    pub fn from_xy(x: f64, y: f64) -> Self {
        Self(MinkowskiVector::new(x, y, (1.0 + x * x + y * y).sqrt()))
    }

    pub fn from_upper_half_plane(z: (f64, f64)) -> Self {
        let (re, im) = z;
        assert!(im > 0.0, "point not in the upper half plane");
        // Elliptic element fixing z, traceless, determinant 1.
        let n = (re * re + im * im) / im;
        let m = Mat2::new(-re / im, n, -1.0 / im, re / im);
        Self::normalize(m.to_vector())
    }

    pub fn to_upper_half_plane(self) -> (f64, f64) {
        let v = self.0;
        let den = v.x - v.t;
        (v.y / den, -1.0 / den)
    }

    /// Poincaré disc coordinates centred at the apex.
    pub fn to_disc(self) -> (f64, f64) {
        let v = self.0;
        (v.x / (1.0 + v.t), v.y / (1.0 + v.t))
    }

    pub fn from_disc(u: f64, w: f64) -> Self {
        let r2 = u * u + w * w;
        let k = 1.0 - r2;
        Self(MinkowskiVector::new(2.0 * u / k, 2.0 * w / k, (1.0 + r2) / k))
    }

    /// Point at distance `r` from the apex in direction `angle`.
    pub fn polar(r: f64, angle: f64) -> Self {
        let s = r.sinh();
        Self(MinkowskiVector::new(s * angle.cos(), s * angle.sin(), r.cosh()))
    }

    pub fn vector(self) -> MinkowskiVector {
        self.0
    }

    /// Point at fraction `tau` along the geodesic segment to `other`.
    pub fn geodesic_to(self, other: Self, tau: f64) -> Self {
        let d = h2_distance_unchecked(self, other);
        if d < 1e-14 {
            return self;
        }
        let s = d.sinh();
        let a = ((1.0 - tau) * d).sinh() / s;
        let b = (tau * d).sinh() / s;
        Self::normalize(a * self.0 + b * other.0)
    }

    pub fn apply(self, m: &LorentzLinear) -> Self {
        Self::normalize(m.apply(self.0))
    }
}

fn h2_distance_unchecked(p: HyperbolicPoint, q: HyperbolicPoint) -> f64 {
    (-p.0.inner(q.0)).max(1.0).acosh()
}

/// `arccosh(−⟨p, q⟩)`.
pub fn h2_distance(p: HyperbolicPoint, q: HyperbolicPoint) -> Result<f64, Error> {
    let c = -p.0.inner(q.0);
    if c < 1.0 - 1e-9 * c.abs().max(1.0) {
        return Err(Error::NotOnHyperboloid { pairing: -c });
    }
    Ok(c.max(1.0).acosh())
}

/// Unit spacelike normal to the plane through the origin spanned by the null
/// directions of two ideal points, signed so that `⟨n, side⟩ > 0`.
pub fn geodesic_normal(
    e1: IdealPoint,
    e2: IdealPoint,
    side: MinkowskiVector,
) -> Result<MinkowskiVector, Error> {
    let n = e1.null_vector().lorentz_cross(e2.null_vector());
    let nn = n.norm_sq();
    if !(nn > 1e-24) {
        return Err(Error::CoincidentEndpoints);
    }
    let n = (1.0 / nn.sqrt()) * n;
    let s = n.inner(side);
    if s == 0.0 {
        return Err(Error::OnLeaf);
    }
    Ok(if s > 0.0 { n } else { -n })
}
