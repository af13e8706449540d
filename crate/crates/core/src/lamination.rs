//! Finite measured laminations: weighted geodesics in ℍ² invariant under a
//! group, enumerated as orbits over word balls, and the transverse vector
//! `Σ w·e` summed over the leaves a segment crosses.
//!
//! The normal recorded for a crossed leaf is the unit normal of its plane
//! pointing towards the endpoint of the query segment. Seen from the
//! starting point this is the normal pointing away from the start's side,
//! which makes transverse vectors additive along broken paths.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::fuchsian::{axis, enumerate_ball, evaluate, GroupBall, Representation, Word};
use crate::minkowski::{HyperbolicPoint, IdealPoint, Mat2, MinkowskiVector};
use crate::Error;

/// Default cap on the word-ball radius used to enumerate lifts.
pub const DEFAULT_RADIUS_CAP: usize = 8;

/// Points closer than this (in `|⟨n, p⟩|`, i.e. `sinh` of the distance) to a
/// leaf count as lying on it.
pub const ON_LEAF_EPS: f64 = 1e-9;

/// A complete geodesic of ℍ², oriented from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicH2 {
    pub start: IdealPoint,
    pub end: IdealPoint,
    /// Unit normal with `(u_start, u_end, n)` positively oriented.
    normal: MinkowskiVector,
}

impl GeodesicH2 {
    pub fn new(start: IdealPoint, end: IdealPoint) -> Result<Self, Error> {
        if start.circle_distance(end) < 1e-12 {
            return Err(Error::CoincidentEndpoints);
        }
        let (u, v) = (start.null_vector(), end.null_vector());
        let n = u.lorentz_cross(v);
        let n = (1.0 / n.norm_sq().sqrt()) * n;
        // Orient by the Euclidean determinant of (u, v, n).
        let det = u.x * (v.y * n.t - v.t * n.y) - u.y * (v.x * n.t - v.t * n.x) + u.t * (v.x * n.y - v.y * n.x);
        let normal = if det >= 0.0 { n } else { -n };
        Ok(Self { start, end, normal })
    }

    pub fn from_reals(a: f64, b: f64) -> Result<Self, Error> {
        Self::new(IdealPoint::from_real(a), IdealPoint::from_real(b))
    }

    /// The normal fixed by the orientation triple of the endpoints.
    pub fn triple_normal(&self) -> MinkowskiVector {
        self.normal
    }

    /// Unit normal pointing to the side of `p`.
    pub fn normal_towards(&self, p: MinkowskiVector) -> MinkowskiVector {
        if self.normal.inner(p) >= 0.0 {
            self.normal
        } else {
            -self.normal
        }
    }

    /// `⟨n, p⟩ = ± sinh(distance)`.
    pub fn signed_offset(&self, p: HyperbolicPoint) -> f64 {
        self.normal.inner(p.vector())
    }

    pub fn distance_to(&self, p: HyperbolicPoint) -> f64 {
        self.signed_offset(p).abs().asinh()
    }

    pub fn image(&self, m: &Mat2) -> Self {
        Self::new(m.apply_ideal(self.start), m.apply_ideal(self.end)).expect("isometries keep endpoints distinct")
    }

    pub fn reversed(&self) -> Self {
        Self { start: self.end, end: self.start, normal: -self.normal }
    }

    /// Whether the endpoint pairs interleave on the circle (the geodesics
    /// cross). Geodesics sharing an endpoint do not cross.
    pub fn links(&self, other: &Self) -> bool {
        let eps = 1e-12;
        let (a, b) = (self.start.angle(), self.end.angle());
        let (c, d) = (other.start.angle(), other.end.angle());
        let close = |x: f64, y: f64| {
            let t = (x - y).rem_euclid(1.0);
            t.min(1.0 - t) < eps
        };
        if close(a, c) || close(a, d) || close(b, c) || close(b, d) {
            return false;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let inside = |x: f64| x > lo && x < hi;
        inside(c) != inside(d)
    }

    /// Same unoriented geodesic.
    pub fn same_as(&self, other: &Self, eps: f64) -> bool {
        (self.start.circle_distance(other.start) < eps && self.end.circle_distance(other.end) < eps)
            || (self.start.circle_distance(other.end) < eps && self.end.circle_distance(other.start) < eps)
    }
}

/// The axis of `ρ(w)`, oriented from the repelling to the attracting point.
pub fn closed_geodesic_of(rep: &Representation, w: &Word) -> Result<GeodesicH2, Error> {
    rep.check_word(w)?;
    let ax = axis(&evaluate(rep, w))?;
    GeodesicH2::new(ax.repelling, ax.attracting)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedCurve {
    pub word: Word,
    pub weight: f64,
}

/// Weighted conjugacy classes of closed curves.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct WeightedMulticurve {
    pub curves: Vec<WeightedCurve>,
}

impl WeightedMulticurve {
    pub fn new(curves: impl IntoIterator<Item = (Word, f64)>) -> Result<Self, Error> {
        let curves: Vec<WeightedCurve> = curves.into_iter().map(|(word, weight)| WeightedCurve { word, weight }).collect();
        let mc = Self { curves };
        mc.validate()?;
        Ok(mc)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(word: &str, weight: f64) -> Result<Self, Error> {
        Self::new([(word.parse()?, weight)])
    }

    pub fn validate(&self) -> Result<(), Error> {
        for c in &self.curves {
            if !(c.weight > 0.0) || !c.weight.is_finite() {
                return Err(Error::BadWeight(c.weight));
            }
        }
        Ok(())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            curves: self.curves.iter().map(|c| WeightedCurve { word: c.word.clone(), weight: c.weight * k }).collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self { curves: self.curves.iter().chain(other.curves.iter()).cloned().collect() }
    }

    pub fn from_json(text: &str) -> Result<Self, Error> {
        let mc: Self = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        mc.validate()?;
        Ok(mc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("multicurve serializes")
    }

    /// The base leaves: one axis per curve.
    pub fn leaves(&self, rep: &Representation) -> Result<Vec<(GeodesicH2, f64)>, Error> {
        self.curves.iter().map(|c| Ok((closed_geodesic_of(rep, &c.word)?, c.weight))).collect()
    }
}

/// A leaf of the lifted lamination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lift {
    pub geodesic: GeodesicH2,
    pub weight: f64,
    /// Index of the base leaf this lift is an image of.
    pub source: usize,
    /// Word length of the element that first produced this lift.
    pub layer: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingRecord {
    pub leaf: GeodesicH2,
    /// Fraction of the way along the query segment.
    pub parameter: f64,
    /// Unit normal of the leaf pointing towards the end of the segment.
    pub normal: MinkowskiVector,
    pub weight: f64,
}

/// The orbit of finitely many weighted geodesics under a representation,
/// enumerated over a growing word ball.
#[derive(Debug, Clone)]
pub struct LiftedLamination {
    rep: Representation,
    base: Vec<(GeodesicH2, f64)>,
    ball: GroupBall,
    lifts: Vec<Lift>,
    keys: HashMap<(i64, i64), Vec<usize>>,
    processed: usize,
    cap: usize,
}

const LIFT_GRID: f64 = 1e-9;

impl LiftedLamination {
    pub fn from_multicurve(rep: &Representation, mc: &WeightedMulticurve, radius: usize) -> Result<Self, Error> {
        mc.validate()?;
        Self::from_leaves(rep, mc.leaves(rep)?, radius)
    }

    /// Lamination generated by explicit geodesics, e.g. leaves not realized
    /// as axes of group elements.
    pub fn from_leaves(rep: &Representation, base: Vec<(GeodesicH2, f64)>, radius: usize) -> Result<Self, Error> {
        for &(_, w) in &base {
            if !(w > 0.0) {
                return Err(Error::BadWeight(w));
            }
        }
        let mut lam = Self {
            rep: rep.clone(),
            base,
            ball: enumerate_ball(rep, 0),
            lifts: Vec::new(),
            keys: HashMap::new(),
            processed: 0,
            cap: DEFAULT_RADIUS_CAP,
        };
        lam.absorb();
        while lam.ball.radius() < radius {
            lam.grow_once();
        }
        Ok(lam)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn representation(&self) -> &Representation {
        &self.rep
    }

    pub fn base_leaves(&self) -> &[(GeodesicH2, f64)] {
        &self.base
    }

    pub fn lifts(&self) -> &[Lift] {
        &self.lifts
    }

    pub fn radius(&self) -> usize {
        self.ball.radius()
    }

    pub fn ball(&self) -> &GroupBall {
        &self.ball
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    fn key(g: &GeodesicH2) -> ((i64, i64), (f64, f64)) {
        let (a, b) = (g.start.angle(), g.end.angle());
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let (s, t) = (lo / LIFT_GRID, hi / LIFT_GRID);
        ((s.round() as i64, t.round() as i64), (s - s.round(), t - t.round()))
    }

    fn find(&self, g: &GeodesicH2) -> bool {
        let (key, frac) = Self::key(g);
        let shifts = |f: f64| if f.abs() > 0.3 { vec![0, f.signum() as i64] } else { vec![0] };
        // Angles near 0 and 1 are the same point; the sorted key then flips,
        // so fall back to a scan of the few candidates with matching ends.
        for ds in shifts(frac.0) {
            for dt in shifts(frac.1) {
                if let Some(list) = self.keys.get(&(key.0 + ds, key.1 + dt)) {
                    if list.iter().any(|&i| self.lifts[i].geodesic.same_as(g, 10.0 * LIFT_GRID)) {
                        return true;
                    }
                }
            }
        }
        let near_wrap = |x: f64| !(1e-6..=1.0 - 1e-6).contains(&x);
        if near_wrap(g.start.angle()) || near_wrap(g.end.angle()) {
            return self.lifts.iter().any(|l| l.geodesic.same_as(g, 10.0 * LIFT_GRID));
        }
        false
    }

    fn absorb(&mut self) {
        let elements = &self.ball.elements()[self.processed..];
        let layer = self.ball.radius();
        let mut new = Vec::new();
        for e in elements {
            for (i, &(g, w)) in self.base.iter().enumerate() {
                new.push(Lift { geodesic: g.image(&e.matrix), weight: w, source: i, layer });
            }
        }
        self.processed = self.ball.len();
        for lift in new {
            if !self.find(&lift.geodesic) {
                let (key, _) = Self::key(&lift.geodesic);
                self.keys.entry(key).or_default().push(self.lifts.len());
                self.lifts.push(lift);
            }
        }
    }

    fn grow_once(&mut self) {
        self.ball.grow(&self.rep);
        self.absorb();
    }

    fn grow_checked(&mut self) -> Result<(), Error> {
        if self.ball.radius() >= self.cap {
            return Err(Error::CapOverflow { cap: self.cap });
        }
        self.grow_once();
        Ok(())
    }

    /// Grows the enumeration until the number of lifts satisfying `pred`
    /// is unchanged over the last two radius increments.
    fn stabilize(&mut self, pred: impl Fn(&Lift) -> bool) -> Result<(), Error> {
        if self.base.is_empty() {
            return Ok(());
        }
        loop {
            let r = self.ball.radius();
            if r >= 2 {
                let mut counts = [0usize; 3];
                for l in self.lifts.iter().filter(|l| pred(l)) {
                    for (k, c) in counts.iter_mut().enumerate() {
                        if l.layer + 2 <= r + k {
                            *c += 1;
                        }
                    }
                }
                if counts[0] == counts[1] && counts[1] == counts[2] {
                    return Ok(());
                }
            }
            self.grow_checked()?;
        }
    }

    /// Grows until the lifts meeting the disc of radius `r` about `center`
    /// are stable.
    pub fn ensure_disc(&mut self, center: HyperbolicPoint, r: f64) -> Result<(), Error> {
        let s = r.sinh();
        self.stabilize(|l| l.geodesic.signed_offset(center).abs() < s)
    }

    fn check_off_leaves(&self, p: HyperbolicPoint) -> Result<(), Error> {
        if self.lifts.iter().any(|l| l.geodesic.signed_offset(p).abs() < ON_LEAF_EPS) {
            return Err(Error::OnLeaf);
        }
        Ok(())
    }

    /// Crossings of the segment `pq` with the currently enumerated lifts.
    pub fn crossings_now(&self, p: HyperbolicPoint, q: HyperbolicPoint) -> Result<Vec<CrossingRecord>, Error> {
        self.check_off_leaves(p)?;
        self.check_off_leaves(q)?;
        let d = crate::minkowski::h2_distance(p, q).unwrap_or(0.0);
        let mut out = Vec::new();
        for l in &self.lifts {
            let a = l.geodesic.signed_offset(p);
            let b = l.geodesic.signed_offset(q);
            if (a > 0.0) == (b > 0.0) {
                continue;
            }
            let tau = if d > 0.0 { (a * d.sinh() / (a * d.cosh() - b)).atanh() / d } else { 0.5 };
            out.push(CrossingRecord {
                leaf: l.geodesic,
                parameter: tau,
                normal: l.geodesic.normal_towards(q.vector()),
                weight: l.weight,
            });
        }
        out.sort_by(|x, y| x.parameter.total_cmp(&y.parameter));
        Ok(out)
    }

    /// Crossings of `pq`, growing the enumeration until two consecutive
    /// increments add nothing.
    pub fn crossings(&mut self, p: HyperbolicPoint, q: HyperbolicPoint) -> Result<Vec<CrossingRecord>, Error> {
        self.check_off_leaves(p)?;
        self.check_off_leaves(q)?;
        self.stabilize(|l| (l.geodesic.signed_offset(p) > 0.0) != (l.geodesic.signed_offset(q) > 0.0))?;
        self.crossings_now(p, q)
    }

    pub fn transverse_vector(&mut self, p: HyperbolicPoint, q: HyperbolicPoint) -> Result<MinkowskiVector, Error> {
        Ok(sum_crossings(&self.crossings(p, q)?))
    }

    /// Transverse vector over the current enumeration, without growing.
    pub fn transverse_vector_now(&self, p: HyperbolicPoint, q: HyperbolicPoint) -> Result<MinkowskiVector, Error> {
        Ok(sum_crossings(&self.crossings_now(p, q)?))
    }

    /// The apex, nudged until it is well away from every enumerated lift.
    pub fn default_basepoint(&self) -> HyperbolicPoint {
        let mut p = HyperbolicPoint::apex();
        let mut k = 0;
        while self.lifts.iter().any(|l| l.geodesic.distance_to(p) < 1e-3) {
            k += 1;
            let angle = 0.7 + 2.399_963 * k as f64;
            p = HyperbolicPoint::polar(0.01 * k as f64, angle);
        }
        p
    }
}

fn sum_crossings(list: &[CrossingRecord]) -> MinkowskiVector {
    list.iter().fold(MinkowskiVector::ZERO, |acc, c| acc + c.weight * c.normal)
}

/// Crossing records of the segment `pq` with the lifted multicurve.
pub fn crossings(
    rep: &Representation,
    mc: &WeightedMulticurve,
    p: HyperbolicPoint,
    q: HyperbolicPoint,
    radius: usize,
) -> Result<Vec<CrossingRecord>, Error> {
    LiftedLamination::from_multicurve(rep, mc, radius)?.crossings(p, q)
}

/// `Σ weight · normal` over the crossings of `pq`.
pub fn transverse_vector(
    rep: &Representation,
    mc: &WeightedMulticurve,
    p: HyperbolicPoint,
    q: HyperbolicPoint,
    radius: usize,
) -> Result<MinkowskiVector, Error> {
    LiftedLamination::from_multicurve(rep, mc, radius)?.transverse_vector(p, q)
}

/// True when no lift over the radius-`radius` ball crosses a base leaf.
/// Crossing pairs of lifts are translates of such pairs, so this covers all
/// pairs up to the ball.
pub fn disjointness_check(rep: &Representation, mc: &WeightedMulticurve, radius: usize) -> Result<bool, Error> {
    let lam = LiftedLamination::from_multicurve(rep, mc, radius.max(1))?;
    Ok(leaves_disjoint(&lam))
}

pub fn leaves_disjoint(lam: &LiftedLamination) -> bool {
    for &(g, _) in lam.base_leaves() {
        for l in lam.lifts() {
            if g.links(&l.geodesic) {
                return false;
            }
        }
    }
    true
}
