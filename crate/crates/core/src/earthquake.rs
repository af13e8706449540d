//! Left and right earthquakes along finite laminations of ℍ².
//!
//! Each complementary region of the lamination is moved by an isometry: the
//! base region is fixed, and crossing a leaf of weight `w` composes with the
//! translation by `scale·w` along that leaf. For a left earthquake the
//! translation moves the far side towards the traveller's left, where the
//! traveller walks from the base side across the leaf and ℍ² carries the
//! orientation of the upper half plane. With base region `Re z < 0` and the
//! leaf `0 → ∞`, the far side is multiplied by `e^{scale·w}`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::fuchsian::{evaluate, Representation, Word};
use crate::lamination::{GeodesicH2, LiftedLamination, WeightedMulticurve};
use crate::minkowski::{HyperbolicPoint, IdealPoint, Mat2};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

/// Pairwise disjoint weighted geodesics with a designated base region,
/// given by a point in it.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteLaminationH2 {
    leaves: Vec<(GeodesicH2, f64)>,
    base: HyperbolicPoint,
}

impl FiniteLaminationH2 {
    pub fn new(leaves: Vec<(GeodesicH2, f64)>, base: HyperbolicPoint) -> Result<Self, Error> {
        for (i, (g, w)) in leaves.iter().enumerate() {
            if !(*w > 0.0) {
                return Err(Error::BadWeight(*w));
            }
            if g.signed_offset(base).abs() < crate::lamination::ON_LEAF_EPS {
                return Err(Error::OnLeaf);
            }
            for (h, _) in &leaves[..i] {
                if g.links(h) {
                    return Err(Error::NotDisjoint);
                }
            }
        }
        Ok(Self { leaves, base })
    }

    pub fn empty() -> Self {
        Self { leaves: Vec::new(), base: HyperbolicPoint::apex() }
    }

    /// The leaf `0 → ∞` with weight `log s`, base region `Re z < 0`.
    pub fn single_leaf(s: f64) -> Result<Self, Error> {
        if !(s > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {s}")));
        }
        let leaf = GeodesicH2::new(IdealPoint::from_real(0.0), IdealPoint::infinity())?;
        Self::new(vec![(leaf, s.ln())], HyperbolicPoint::from_upper_half_plane((-1.0, 1.0)))
    }

    pub fn leaves(&self) -> &[(GeodesicH2, f64)] {
        &self.leaves
    }

    pub fn base(&self) -> HyperbolicPoint {
        self.base
    }

    /// JSON with upper-half-plane coordinates; `null` endpoints are ∞:
    /// `{"base": [re, im], "leaves": [{"start": a, "end": b, "weight": w}]}`.
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let file: LaminationFile = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        if !(file.base[1] > 0.0) {
            return Err(Error::Input("base point must have positive imaginary part".into()));
        }
        let ideal = |x: Option<f64>| x.map_or_else(IdealPoint::infinity, IdealPoint::from_real);
        let leaves = file
            .leaves
            .iter()
            .map(|l| Ok((GeodesicH2::new(ideal(l.start), ideal(l.end))?, l.weight)))
            .collect::<Result<_, Error>>()?;
        Self::new(leaves, HyperbolicPoint::from_upper_half_plane((file.base[0], file.base[1])))
    }

    pub fn to_json(&self) -> String {
        let (re, im) = self.base.to_upper_half_plane();
        let file = LaminationFile {
            base: [re, im],
            leaves: self
                .leaves
                .iter()
                .map(|(g, w)| LeafFile { start: g.start.to_real(), end: g.end.to_real(), weight: *w })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("lamination serializes")
    }

    /// Image under a Möbius map (leaves and base together).
    pub fn image(&self, m: &Mat2) -> Self {
        Self { leaves: self.leaves.iter().map(|(g, w)| (g.image(m), *w)).collect(), base: m.apply_point(self.base) }
    }
}

#[derive(Serialize, Deserialize)]
struct LeafFile {
    start: Option<f64>,
    end: Option<f64>,
    weight: f64,
}

#[derive(Serialize, Deserialize)]
struct LaminationFile {
    base: [f64; 2],
    leaves: Vec<LeafFile>,
}

/// Translation by `dist` along the geodesic from `from` to `to`.
pub fn translation_along(from: IdealPoint, to: IdealPoint, dist: f64) -> Mat2 {
    let (v, u) = (to.vec(), from.vec());
    let mut c = Mat2::new(v[0], u[0], v[1], u[1]);
    if c.det() < 0.0 {
        c = Mat2::new(v[0], -u[0], v[1], -u[1]);
    }
    let c = c.normalized().expect("distinct endpoints");
    c * Mat2::boost(dist) * c.adjugate()
}

/// Translation by `dist` along `leaf`, towards the left (or right) of a
/// traveller crossing it from the side containing `from`.
pub fn leaf_translation(leaf: &GeodesicH2, from: HyperbolicPoint, side: Side, dist: f64) -> Mat2 {
    let n = leaf.triple_normal();
    // Far arc = boundary points on the other side from `from`. The arc from
    // `start` to `end` in increasing θ is on the side of the null vector at
    // its midpoint.
    let (a, b) = (leaf.start.angle(), leaf.end.angle());
    let mid = IdealPoint::from_angle(a + (b - a).rem_euclid(1.0) / 2.0).null_vector();
    let arc_is_far = (n.inner(mid) > 0.0) != (n.inner(from.vector()) > 0.0);
    // Increasing θ is the negative orientation of the half-plane boundary,
    // so the far arc ends (positively) at its θ-start.
    let (left, right) = if arc_is_far { (leaf.start, leaf.end) } else { (leaf.end, leaf.start) };
    match side {
        Side::Left => translation_along(right, left, dist),
        Side::Right => translation_along(left, right, dist),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EarthquakeMap {
    pub lamination: FiniteLaminationH2,
    pub side: Side,
    pub scale: f64,
}

pub fn earthquake_along(lamination: FiniteLaminationH2, side: Side, scale: f64) -> EarthquakeMap {
    EarthquakeMap { lamination, side, scale }
}

/// Where a query sits relative to a leaf.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum QuakeImage {
    Point(HyperbolicPoint),
    /// The point lies on a leaf; the images from the near (base) side and
    /// the far side.
    OnLeaf { near: HyperbolicPoint, far: HyperbolicPoint },
}

impl EarthquakeMap {
    /// Translation applied when crossing `leaf` away from the base.
    fn shear(&self, leaf: &GeodesicH2, weight: f64) -> Mat2 {
        leaf_translation(leaf, self.lamination.base, self.side, self.scale * weight)
    }

    fn separating(&self, side_of: impl Fn(&GeodesicH2) -> f64) -> Vec<(f64, Mat2)> {
        let base = self.lamination.base;
        let mut list: Vec<(f64, Mat2)> = self
            .lamination
            .leaves
            .iter()
            .filter(|(g, _)| {
                let s = side_of(g);
                s != 0.0 && (s > 0.0) != (g.signed_offset(base) > 0.0)
            })
            .map(|(g, w)| (g.signed_offset(base).abs(), self.shear(g, *w)))
            .collect();
        // Leaves separating the base from a point are nested; nearest first.
        list.sort_by(|x, y| x.0.total_cmp(&y.0));
        list
    }

    /// Isometry of the region containing `p` (off the leaves).
    pub fn region_isometry(&self, p: HyperbolicPoint) -> Mat2 {
        let v = p.vector();
        self.separating(|g| g.triple_normal().inner(v)).iter().fold(Mat2::IDENTITY, |acc, (_, m)| acc * *m)
    }

    /// Isometry of the region whose closure contains the ideal point `xi`
    /// (not a leaf endpoint).
    pub fn boundary_isometry(&self, xi: IdealPoint) -> Mat2 {
        let v = xi.null_vector();
        self.separating(|g| g.triple_normal().inner(v)).iter().fold(Mat2::IDENTITY, |acc, (_, m)| acc * *m)
    }

    /// Image of `p`; on a leaf both one-sided values are reported.
    pub fn apply(&self, p: HyperbolicPoint) -> QuakeImage {
        let eps = crate::lamination::ON_LEAF_EPS;
        let on = self.lamination.leaves.iter().find(|(g, _)| g.signed_offset(p).abs() < eps);
        match on {
            None => QuakeImage::Point(self.region_isometry(p).apply_point(p)),
            Some((g, w)) => {
                let base = self.lamination.base.vector();
                let n = g.normal_towards(base);
                // Push slightly to either side and reuse the region maps.
                let step = 1e-6;
                let near_p = HyperbolicPoint::normalize(p.vector() + step * n);
                let near = self.region_isometry(near_p);
                let far = near * self.shear(g, *w);
                QuakeImage::OnLeaf { near: near.apply_point(p), far: far.apply_point(p) }
            }
        }
    }

    /// Piecewise-Möbius boundary map with `samples` evenly spaced samples.
    pub fn boundary_value(&self, samples: usize) -> CircleMap {
        let mut cuts: Vec<f64> =
            self.lamination.leaves.iter().flat_map(|(g, _)| [g.start.angle(), g.end.angle()]).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let mut pieces = Vec::new();
        if cuts.is_empty() {
            pieces.push(MobiusPiece { start: 0.0, end: 1.0, map: Mat2::IDENTITY });
        } else {
            for (i, &start) in cuts.iter().enumerate() {
                let end = if i + 1 < cuts.len() { cuts[i + 1] } else { cuts[0] + 1.0 };
                let mid = IdealPoint::from_angle((start + end) / 2.0);
                pieces.push(MobiusPiece { start, end, map: self.boundary_isometry(mid) });
            }
        }
        CircleMap::from_pieces(pieces, samples)
    }
}

/// A Möbius map on the arc `[start, end)` of θ (with `end` possibly past 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MobiusPiece {
    pub start: f64,
    pub end: f64,
    pub map: Mat2,
}

/// A monotone degree-one map of ℝP¹ = ℝ/ℤ, given by samples `(θ_in, θ_out)`
/// and optionally an exact piecewise-Möbius description.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleMap {
    samples: Vec<(f64, f64)>,
    pieces: Option<Vec<MobiusPiece>>,
}

impl CircleMap {
    pub fn identity(samples: usize) -> Self {
        Self::from_pieces(vec![MobiusPiece { start: 0.0, end: 1.0, map: Mat2::IDENTITY }], samples)
    }

    pub fn mobius(m: Mat2, samples: usize) -> Self {
        Self::from_pieces(vec![MobiusPiece { start: 0.0, end: 1.0, map: m }], samples)
    }

    pub fn from_pieces(pieces: Vec<MobiusPiece>, samples: usize) -> Self {
        let mut map = Self { samples: Vec::new(), pieces: Some(pieces) };
        map.samples = (0..samples)
            .map(|k| {
                let t = k as f64 / samples as f64;
                (t, map.eval(t))
            })
            .collect();
        map
    }

    /// Sample-only map. Samples are sorted by input parameter.
    pub fn from_samples(mut samples: Vec<(f64, f64)>) -> Self {
        for s in &mut samples {
            s.0 = s.0.rem_euclid(1.0);
            s.1 = s.1.rem_euclid(1.0);
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { samples, pieces: None }
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn pieces(&self) -> Option<&[MobiusPiece]> {
        self.pieces.as_deref()
    }

    fn piece_for(pieces: &[MobiusPiece], theta: f64) -> &MobiusPiece {
        let t = theta.rem_euclid(1.0);
        pieces
            .iter()
            .find(|p| {
                let rel = (t - p.start).rem_euclid(1.0);
                rel < p.end - p.start || p.end - p.start >= 1.0
            })
            .unwrap_or(&pieces[0])
    }

    /// Image parameter in `[0, 1)`.
    pub fn eval(&self, theta: f64) -> f64 {
        if let Some(pieces) = &self.pieces {
            let piece = Self::piece_for(pieces, theta);
            return piece.map.apply_ideal(IdealPoint::from_angle(theta)).angle();
        }
        self.interpolate(theta)
    }

    /// Image of a real number (`None` for ∞) through the exact pieces.
    pub fn eval_real(&self, x: f64) -> Option<f64> {
        self.eval_point(IdealPoint::from_real(x)).to_real()
    }

    pub fn eval_point(&self, p: IdealPoint) -> IdealPoint {
        match &self.pieces {
            Some(pieces) => Self::piece_for(pieces, p.angle()).map.apply_ideal(p),
            None => IdealPoint::from_angle(self.interpolate(p.angle())),
        }
    }

    /// Linear interpolation between samples in lifted coordinates.
    fn interpolate(&self, theta: f64) -> f64 {
        let n = self.samples.len();
        if n == 0 {
            return theta.rem_euclid(1.0);
        }
        let t = theta.rem_euclid(1.0);
        let idx = self.samples.partition_point(|s| s.0 <= t);
        let (lo, hi) = if idx == 0 {
            let (a, b) = (self.samples[n - 1], self.samples[0]);
            ((a.0 - 1.0, a.1), b)
        } else if idx == n {
            let (a, b) = (self.samples[n - 1], self.samples[0]);
            (a, (b.0 + 1.0, b.1))
        } else {
            (self.samples[idx - 1], self.samples[idx])
        };
        let span = hi.0 - lo.0;
        let rise = (hi.1 - lo.1).rem_euclid(1.0);
        let frac = if span > 0.0 { (t - lo.0).rem_euclid(1.0) / span } else { 0.0 };
        (lo.1 + frac * rise).rem_euclid(1.0)
    }

    /// Sum of forward output increments around the cycle of inputs: 1 for
    /// a monotone degree-one map (within sampling tolerance).
    pub fn winding(&self) -> f64 {
        let n = self.samples.len();
        (0..n).map(|i| (self.samples[(i + 1) % n].1 - self.samples[i].1).rem_euclid(1.0)).sum()
    }

    pub fn is_monotone(&self, tol: f64) -> bool {
        self.samples.len() < 2 || (self.winding() - 1.0).abs() < tol
    }

    /// `other ∘ self` on the samples of `self`.
    pub fn then(&self, other: &CircleMap) -> CircleMap {
        CircleMap::from_samples(self.samples.iter().map(|&(a, b)| (a, other.eval(b))).collect())
    }

    /// Largest circle distance between the outputs of two maps at `self`'s
    /// sample inputs.
    pub fn sup_distance(&self, other: &CircleMap) -> f64 {
        self.samples
            .iter()
            .map(|&(a, b)| {
                let d = (b - other.eval(a)).rem_euclid(1.0);
                d.min(1.0 - d)
            })
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta_in,theta_out\n");
        for (a, b) in &self.samples {
            writeln!(out, "{a},{b}").unwrap();
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, Error> {
        let mut samples = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (i == 0 && line.chars().any(|c| c.is_ascii_alphabetic())) {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(Error::Input(format!("line {}: expected two columns", i + 1)));
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::Input(format!("line {}: bad number {s:?}", i + 1)));
            samples.push((parse(parts[0])?, parse(parts[1])?));
        }
        if samples.len() < 3 {
            return Err(Error::Input("a circle map needs at least 3 samples".into()));
        }
        Ok(Self::from_samples(samples))
    }
}

/// The matrices of the worked single-leaf example in the projective model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadricActionExample {
    pub start: Mat2,
    /// After moving along the left-ruling line through `start`.
    pub after_left_move: Mat2,
    /// After then moving along the right-ruling line: `diag(s,1)·start·diag(s,1)`.
    pub image: Mat2,
    /// `after_left_move` conjugated by `diag(√s, 1)`, which lies on `b = c`.
    pub half_measure_image: Mat2,
}

pub fn quadric_action_example(s: f64) -> Result<QuadricActionExample, Error> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("s must be positive, got {s}")));
    }
    let start = Mat2::new(1.0, 1.0, 1.0, 1.0);
    let shear = Mat2::diag(s, 1.0);
    let after_left_move = start * shear;
    let image = shear * after_left_move;
    let r = s.sqrt();
    let half_measure_image = Mat2::diag(r, 1.0) * after_left_move * Mat2::diag(1.0 / r, 1.0);
    Ok(QuadricActionExample { start, after_left_move, image, half_measure_image })
}

/// The representation twisted by the equivariant earthquake along the lifts
/// of `mc`: `ρ'(γ) = M(γ·b)·ρ(γ)` where `M(γ·b)` is the region isometry at
/// the translated basepoint.
pub fn rep_after_earthquake(
    rep: &Representation,
    mc: &WeightedMulticurve,
    scale: f64,
    side: Side,
) -> Result<Representation, Error> {
    let mut lam = LiftedLamination::from_multicurve(rep, mc, 1)?;
    let base = lam.default_basepoint();
    let gens = (1..=rep.generator_count() as i32)
        .map(|g| {
            let m = region_isometry_at(&mut lam, base, rep.letter(g).apply_point(base), scale, side)?;
            Ok(m * evaluate(rep, &Word::generator(g)))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Representation::new(rep.presentation(), gens)
}

/// Region isometry at `p` of the earthquake along all lifts, with base
/// region containing `base`.
pub fn region_isometry_at(
    lam: &mut LiftedLamination,
    base: HyperbolicPoint,
    p: HyperbolicPoint,
    scale: f64,
    side: Side,
) -> Result<Mat2, Error> {
    let crossed = lam.crossings(base, p)?;
    let leaves = crossed.iter().map(|c| (c.leaf, c.weight)).collect();
    let quake = earthquake_along(FiniteLaminationH2::new(leaves, base)?, side, scale);
    Ok(quake.region_isometry(p))
}
