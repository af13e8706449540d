//! Flat domains of dependence from measured multicurves.
//!
//! A weighted multicurve on a hyperbolic surface gives a translation cocycle
//! `t_γ = x(γ·b)` where `x(p)` is the transverse vector from a basepoint `b`
//! to `p`, and deforms the hyperboloid by `p ↦ p + x(p)`. The resulting
//! surface is spacelike and bounds a future-complete convex domain, sampled
//! here through finitely many null support planes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::fuchsian::{evaluate, rotation_about_apex, GroupBall, Representation, Word};
use crate::lamination::{GeodesicH2, LiftedLamination, WeightedMulticurve};
use crate::minkowski::{
    adjoint_to_so21, HyperbolicPoint, IdealPoint, LorentzIsometry, LorentzLinear, Mat2, MinkowskiVector,
};
use crate::Error;

/// Translation parts `t_γ` on the generators; other elements follow from
/// `t_{αβ} = t_α + f(α)·t_β`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationCocycle {
    values: Vec<MinkowskiVector>,
}

fn linear_of(rep: &Representation, letter: i32) -> LorentzLinear {
    adjoint_to_so21(&rep.letter(letter)).expect("generators are unimodular")
}

impl TranslationCocycle {
    pub fn new(values: Vec<MinkowskiVector>) -> Self {
        Self { values }
    }

    pub fn zero(rep: &Representation) -> Self {
        Self { values: vec![MinkowskiVector::ZERO; rep.generator_count()] }
    }

    /// `t_γ = v − f(γ)·v`.
    pub fn coboundary(rep: &Representation, v: MinkowskiVector) -> Self {
        let values = (1..=rep.generator_count() as i32).map(|g| v - linear_of(rep, g).apply(v)).collect();
        Self { values }
    }

    pub fn generator_values(&self) -> &[MinkowskiVector] {
        &self.values
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { values: self.values.iter().zip(&other.values).map(|(a, b)| *a + *b).collect() }
    }

    pub fn scale(&self, k: f64) -> Self {
        Self { values: self.values.iter().map(|v| k * *v).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (*a - *b).norm_inf()).fold(0.0, f64::max)
    }

    /// `t_w`, folding the extension rule letter by letter.
    pub fn eval(&self, rep: &Representation, w: &Word) -> MinkowskiVector {
        let (t, _) = self.eval_dd(rep, w);
        MinkowskiVector::new(t[0].into(), t[1].into(), t[2].into())
    }

    /// The fold in double-double arithmetic, with the SL(2,ℝ) prefix
    /// product. Values on long words reach ~1e8, so plain doubles lose the
    /// absolute accuracy the cocycle checks ask for.
    fn eval_dd(&self, rep: &Representation, w: &Word) -> ([TwoFloat; 3], DdMat) {
        let mut t = [TwoFloat::from(0.0); 3];
        let mut prefix = DdMat::IDENTITY;
        for &l in w.letters() {
            let m = rep.letter(l);
            let tl = if l > 0 {
                dd_vec(self.values[l as usize - 1])
            } else {
                let v = DdMat::from(&m).adjoint_apply(dd_vec(self.values[(-l) as usize - 1]));
                [-v[0], -v[1], -v[2]]
            };
            let img = prefix.adjoint_apply(tl);
            for i in 0..3 {
                t[i] += img[i];
            }
            prefix = prefix.times(&m);
        }
        (t, prefix)
    }

    /// The affine holonomy `x ↦ f(γ)x + t_γ`.
    pub fn isometry(&self, rep: &Representation, w: &Word) -> LorentzIsometry {
        let lin = adjoint_to_so21(&evaluate(rep, w)).expect("unimodular");
        LorentzIsometry::new(lin, self.eval(rep, w))
    }

    /// JSON object mapping generator names to `[x, y, t]`.
    pub fn to_json(&self) -> String {
        let map: BTreeMap<String, [f64; 3]> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| (Word::generator(i as i32 + 1).to_string(), v.to_array()))
            .collect();
        serde_json::to_string_pretty(&map).expect("cocycle serializes")
    }

    pub fn from_json(text: &str, generator_count: usize) -> Result<Self, Error> {
        let map: BTreeMap<String, [f64; 3]> = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        let mut values = vec![None; generator_count];
        for (name, v) in map {
            let w: Word = name.parse()?;
            match w.letters() {
                [g] if *g > 0 && (*g as usize) <= generator_count => values[*g as usize - 1] = Some(v),
                _ => return Err(Error::Input(format!("bad generator name {name:?}"))),
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| v.map(MinkowskiVector::from_array).ok_or_else(|| Error::Input(format!("missing generator {}", i + 1))))
            .collect::<Result<_, _>>()?;
        Ok(Self { values })
    }
}

/// `t_α = x(ρ(α)·basepoint)` on each generator.
pub fn cocycle_from_lamination(
    rep: &Representation,
    mc: &WeightedMulticurve,
    basepoint: HyperbolicPoint,
    radius: usize,
) -> Result<TranslationCocycle, Error> {
    let mut lam = LiftedLamination::from_multicurve(rep, mc, radius)?;
    cocycle_from_lifted(&mut lam, basepoint)
}

pub fn cocycle_from_lifted(lam: &mut LiftedLamination, basepoint: HyperbolicPoint) -> Result<TranslationCocycle, Error> {
    let rep = lam.representation().clone();
    let values = (1..=rep.generator_count() as i32)
        .map(|g| {
            let image = rep.letter(g).apply_point(basepoint);
            lam.transverse_vector(basepoint, image)
        })
        .collect::<Result<_, _>>()?;
    Ok(TranslationCocycle { values })
}

/// `‖t_{αβ} − t_α − f(α)·t_β‖`, where `t_{αβ}` is evaluated on the word the
/// ball stores for the element `αβ` (if present). Different words for the
/// same element only agree when the cocycle respects the relator.
pub fn cocycle_residual(
    rep: &Representation,
    coc: &TranslationCocycle,
    ball: &GroupBall,
    alpha: &Word,
    beta: &Word,
) -> f64 {
    let product = alpha.concat(beta);
    let word = match ball.find_word(rep, &product) {
        Some(i) => ball.elements()[i].word.clone(),
        None => product,
    };
    let (lhs, _) = coc.eval_dd(rep, &word);
    let (ta, pa) = coc.eval_dd(rep, alpha);
    let (tb, _) = coc.eval_dd(rep, beta);
    let fb = pa.adjoint_apply(tb);
    let d: Vec<f64> = (0..3).map(|i| f64::from(lhs[i] - ta[i] - fb[i])).collect();
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

fn dd_vec(v: MinkowskiVector) -> [TwoFloat; 3] {
    [v.x.into(), v.y.into(), v.t.into()]
}

/// 2×2 matrix with double-double entries.
#[derive(Debug, Clone, Copy)]
struct DdMat([TwoFloat; 4]);

impl DdMat {
    const IDENTITY: Self = Self([TwoFloat::from_f64(1.0), TwoFloat::from_f64(0.0), TwoFloat::from_f64(0.0), TwoFloat::from_f64(1.0)]);

    fn from(m: &Mat2) -> Self {
        Self([m.a.into(), m.b.into(), m.c.into(), m.d.into()])
    }

    fn times(&self, m: &Mat2) -> Self {
        let [a, b, c, d] = self.0;
        Self([a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d])
    }

    /// `P·V·adj(P)` on `V = [[y, x+t], [x−t, −y]]`.
    fn adjoint_apply(&self, v: [TwoFloat; 3]) -> [TwoFloat; 3] {
        let [a, b, c, d] = self.0;
        let [x, y, t] = v;
        let (va, vb, vc, vd) = (y, x + t, x - t, -y);
        // P·V
        let (pa, pb, pc, pd) = (a * va + b * vc, a * vb + b * vd, c * va + d * vc, c * vb + d * vd);
        // (P·V)·adj(P), adj(P) = [[d, −b], [−c, a]]
        let wa = pa * d - pb * c;
        let wb = -(pa * b) + pb * a;
        let wc = pc * d - pd * c;
        [(wb + wc) / 2.0, wa, (wb - wc) / 2.0]
    }
}

/// `‖t_relator‖`; zero for free presentations.
pub fn relator_residual(rep: &Representation, coc: &TranslationCocycle) -> f64 {
    match rep.presentation().relator() {
        Some(r) => coc.eval(rep, &r).euclidean_norm(),
        None => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceSample {
    pub p: HyperbolicPoint,
    pub x: MinkowskiVector,
    pub f: MinkowskiVector,
    /// Index of the complementary region (distinct sets of separating
    /// leaves from the basepoint).
    pub region: usize,
    /// Set when the raw sample fell on a leaf and was moved off it.
    pub perturbed: bool,
}

/// Samples of the developed surface `p ↦ p + x(p)` over a hyperbolic disc
/// about the basepoint.
#[derive(Debug, Clone)]
pub struct DevelopedSurfacePatch {
    pub basepoint: HyperbolicPoint,
    pub radius: f64,
    pub samples: Vec<SurfaceSample>,
    /// Lifts (normal, weight) used for the samples and support planes.
    leaves: Vec<(GeodesicH2, f64)>,
}

/// Area-uniform point in the disc of radius `r` about `center`.
fn disc_sample(rng: &mut impl Rng, center: HyperbolicPoint, r: f64) -> HyperbolicPoint {
    let u: f64 = rng.gen();
    let angle: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    let rho = (1.0 + u * (r.cosh() - 1.0)).acosh();
    to_center(center).apply_point(HyperbolicPoint::polar(rho, angle))
}

/// An isometry taking the apex to `center`.
fn to_center(center: HyperbolicPoint) -> Mat2 {
    let v = center.vector();
    let dist = v.t.max(1.0).acosh();
    let angle = v.y.atan2(v.x);
    rotation_about_apex(angle) * Mat2::boost(dist) * rotation_about_apex(-angle)
}

pub struct DevelopOptions {
    pub radius: f64,
    pub density: usize,
    pub seed: u64,
    pub basepoint: Option<HyperbolicPoint>,
}

impl Default for DevelopOptions {
    fn default() -> Self {
        Self { radius: 1.5, density: 400, seed: 1, basepoint: None }
    }
}

pub fn develop_surface(
    rep: &Representation,
    mc: &WeightedMulticurve,
    radius: f64,
    density: usize,
) -> Result<DevelopedSurfacePatch, Error> {
    let mut lam = LiftedLamination::from_multicurve(rep, mc, 1)?;
    develop_lifted(&mut lam, &DevelopOptions { radius, density, ..Default::default() })
}

pub fn develop_lifted(lam: &mut LiftedLamination, opts: &DevelopOptions) -> Result<DevelopedSurfacePatch, Error> {
    if !(opts.radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {}", opts.radius)));
    }
    let basepoint = opts.basepoint.unwrap_or_else(|| lam.default_basepoint());
    lam.ensure_disc(basepoint, opts.radius)?;
    let reach = opts.radius.sinh() * 1.0001 + 1e-9;
    let leaves: Vec<(GeodesicH2, f64)> = lam
        .lifts()
        .iter()
        .filter(|l| l.geodesic.signed_offset(basepoint).abs() < (opts.radius + 2.0).sinh().max(reach))
        .map(|l| (l.geodesic, l.weight))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut samples = Vec::with_capacity(opts.density);
    let mut regions: Vec<Vec<usize>> = Vec::new();
    for _ in 0..opts.density {
        let mut p = disc_sample(&mut rng, basepoint, opts.radius);
        let mut perturbed = false;
        while leaves.iter().any(|(g, _)| g.signed_offset(p).abs() < 1e-7) {
            p = disc_sample(&mut rng, basepoint, opts.radius);
            perturbed = true;
        }
        let mut crossed = Vec::new();
        let mut x = MinkowskiVector::ZERO;
        for (i, (g, w)) in leaves.iter().enumerate() {
            if (g.signed_offset(p) > 0.0) != (g.signed_offset(basepoint) > 0.0) {
                crossed.push(i);
                x = x + *w * g.normal_towards(p.vector());
            }
        }
        let region = match regions.iter().position(|r| *r == crossed) {
            Some(i) => i,
            None => {
                regions.push(crossed);
                regions.len() - 1
            }
        };
        samples.push(SurfaceSample { p, x, f: p.vector() + x, region, perturbed });
    }
    Ok(DevelopedSurfacePatch { basepoint, radius: opts.radius, samples, leaves })
}

/// Null half-space `{y : ⟨normal, y⟩ < offset}`; the domain of dependence
/// is the intersection of these.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NullSupportPlane {
    pub normal: MinkowskiVector,
    pub offset: f64,
}

impl NullSupportPlane {
    pub fn contains(&self, y: MinkowskiVector) -> bool {
        self.normal.inner(y) < self.offset
    }

    pub fn margin(&self, y: MinkowskiVector) -> f64 {
        self.offset - self.normal.inner(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InjectivityReport {
    pub min_gap: f64,
    /// Minimum over pairs lying in different regions.
    pub min_gap_separated: Option<f64>,
    pub null_pairs: usize,
}

impl DevelopedSurfacePatch {
    pub fn leaves(&self) -> &[(GeodesicH2, f64)] {
        &self.leaves
    }

    pub fn region_count(&self) -> usize {
        self.samples.iter().map(|s| s.region + 1).max().unwrap_or(0)
    }

    /// Support plane for the ideal point `direction`: its offset is the
    /// limit of `⟨n, x(p)⟩` as `p` runs out to that point.
    pub fn support_plane(&self, direction: IdealPoint) -> NullSupportPlane {
        let n = direction.null_vector();
        let mut offset = 0.0;
        for (g, w) in &self.leaves {
            let e = g.triple_normal();
            let (sb, sn) = (e.inner(self.basepoint.vector()), e.inner(n));
            if sn != 0.0 && (sb > 0.0) != (sn > 0.0) {
                offset += w * (if sn > 0.0 { e } else { -e }).inner(n);
            }
        }
        NullSupportPlane { normal: n, offset }
    }

    /// Support planes at `count` equally spaced ideal points.
    pub fn support_planes(&self, count: usize) -> Vec<NullSupportPlane> {
        (0..count).map(|k| self.support_plane(IdealPoint::from_angle((k as f64 + 0.5) / count as f64))).collect()
    }

    /// Smallest `⟨Δf, Δf⟩` over pairs of cone points whose difference is
    /// null. Each sample pair `(p, q)` gives two such pairs `(p, c·q)`.
    pub fn injectivity_gap(&self) -> InjectivityReport {
        let mut min_gap = f64::INFINITY;
        let mut min_sep: Option<f64> = None;
        let mut count = 0;
        for (i, a) in self.samples.iter().enumerate() {
            for b in &self.samples[i + 1..] {
                let k = a.p.vector().inner(b.p.vector());
                let disc = (k * k - 1.0).max(0.0).sqrt();
                for c in [-k + disc, -k - disc] {
                    let d = a.p.vector() - c * b.p.vector() + a.x - b.x;
                    let gap = d.norm_sq();
                    count += 1;
                    min_gap = min_gap.min(gap);
                    if a.region != b.region {
                        min_sep = Some(min_sep.map_or(gap, |m: f64| m.min(gap)));
                    }
                }
            }
        }
        InjectivityReport { min_gap: if count == 0 { 0.0 } else { min_gap }, min_gap_separated: min_sep, null_pairs: count }
    }

    /// Largest `|Δt| / ‖(Δx, Δy)‖` over pairs of developed points.
    pub fn graph_slope_check(&self) -> Result<f64, Error> {
        let mut worst: f64 = 0.0;
        for (i, a) in self.samples.iter().enumerate() {
            for b in &self.samples[i + 1..] {
                let d = a.f - b.f;
                let h = d.x.hypot(d.y);
                if h == 0.0 {
                    return Err(Error::Input("coincident projections".into()));
                }
                worst = worst.max(d.t.abs() / h);
            }
        }
        Ok(worst)
    }

    /// The same patch with every developed point moved by `v`.
    pub fn translated(&self, v: MinkowskiVector) -> Self {
        let mut out = self.clone();
        for s in &mut out.samples {
            s.f = s.f + v;
            s.x = s.x + v;
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("px,py,pt,xx,xy,xt,fx,fy,ft,region\n");
        for s in &self.samples {
            let (p, x, f) = (s.p.vector(), s.x, s.f);
            writeln!(out, "{},{},{},{},{},{},{},{},{},{}", p.x, p.y, p.t, x.x, x.y, x.t, f.x, f.y, f.t, s.region)
                .unwrap();
        }
        out
    }

    /// Mesh of the developed points, triangulated by Delaunay triangulation
    /// of the parameters in the Poincaré disc.
    pub fn to_obj(&self) -> String {
        let pts: Vec<delaunator::Point> = self
            .samples
            .iter()
            .map(|s| {
                let (u, w) = s.p.to_disc();
                delaunator::Point { x: u, y: w }
            })
            .collect();
        let tri = delaunator::triangulate(&pts);
        let mut out = String::from("# developed surface p + x(p), coordinates (x, y, t)\n");
        for s in &self.samples {
            writeln!(out, "v {} {} {}", s.f.x, s.f.y, s.f.t).unwrap();
        }
        for t in tri.triangles.chunks(3) {
            writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).unwrap();
        }
        out
    }
}

pub fn injectivity_gap(patch: &DevelopedSurfacePatch) -> InjectivityReport {
    patch.injectivity_gap()
}

pub fn graph_slope_check(patch: &DevelopedSurfacePatch) -> Result<f64, Error> {
    patch.graph_slope_check()
}

pub fn support_planes(patch: &DevelopedSurfacePatch, count: usize) -> Vec<NullSupportPlane> {
    patch.support_planes(count)
}

/// Spacelike segment of base points of the null support planes of the
/// cyclic domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CyclicSingularitySegment {
    pub start: MinkowskiVector,
    pub end: MinkowskiVector,
}

impl CyclicSingularitySegment {
    pub fn length(&self) -> f64 {
        (self.end - self.start).norm_sq().max(0.0).sqrt()
    }
}

/// The initial singularity of the domain for the cyclic group generated by
/// the boost of rapidity `lambda` along the geodesic `y = 0`, with that
/// geodesic weighted by `weight`. The two sides of the leaf develop with
/// translations `0` and `x`, and the singularity is the segment between.
pub fn cyclic_initial_singularity(lambda: f64, weight: f64) -> Result<CyclicSingularitySegment, Error> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("rapidity must be positive, got {lambda}")));
    }
    if !(weight >= 0.0) {
        return Err(Error::BadWeight(weight));
    }
    if weight == 0.0 {
        return Ok(CyclicSingularitySegment { start: MinkowskiVector::ZERO, end: MinkowskiVector::ZERO });
    }
    let rep = Representation::cyclic(Mat2::boost(lambda))?;
    let mc = WeightedMulticurve::single("a1", weight)?;
    let mut lam = LiftedLamination::from_multicurve(&rep, &mc, 1)?;
    let near = HyperbolicPoint::from_xy(0.0, -0.5);
    let far = HyperbolicPoint::from_xy(0.0, 0.5);
    let start = lam.transverse_vector(near, near)?;
    let end = lam.transverse_vector(near, far)?;
    Ok(CyclicSingularitySegment { start, end })
}

/// The quotient of `{t² > x², t > 0}` by two commuting boost-plus-translation
/// isometries. The linear parts fix the `y` axis and translate along it, so
/// `t² − x²` and the region are invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardTorusSpacetime {
    pub lambda: f64,
    pub e: f64,
    pub mu: f64,
    pub f: f64,
    pub a: LorentzIsometry,
    pub b: LorentzIsometry,
}

pub fn standard_torus(lambda: f64, e: f64, mu: f64, f: f64) -> Result<StandardTorusSpacetime, Error> {
    let det = lambda * f - mu * e;
    if det.abs() <= crate::DEFAULT_EPS {
        return Err(Error::DependentParameters { det });
    }
    let a = LorentzIsometry::new(LorentzLinear::boost_xt(lambda), MinkowskiVector::new(0.0, e, 0.0));
    let b = LorentzIsometry::new(LorentzLinear::boost_xt(mu), MinkowskiVector::new(0.0, f, 0.0));
    Ok(StandardTorusSpacetime { lambda, e, mu, f, a, b })
}

impl StandardTorusSpacetime {
    pub fn contains(&self, v: MinkowskiVector) -> bool {
        v.t > 0.0 && v.t * v.t > v.x * v.x
    }

    pub fn time_function(v: MinkowskiVector) -> f64 {
        v.t * v.t - v.x * v.x
    }

    pub fn commutator_defect(&self) -> f64 {
        self.a.compose(&self.b).max_abs_diff(&self.b.compose(&self.a))
    }
}
