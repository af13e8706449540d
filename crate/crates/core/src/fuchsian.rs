//! Surface-group presentations, representations into PSL(2,ℝ), word balls,
//! axes of hyperbolic elements and Euler classes.
//!
//! Generators are numbered from 1; a word is a list of signed indices. In
//! text, generator `2i−1` is written `a{i}` and generator `2i` is `b{i}`, so
//! the surface relator reads `a1 b1 A1 B1 a2 b2 A2 B2 …`; an uppercase letter
//! is the inverse. `g{k}` / `G{k}` name generator `k` directly.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::minkowski::{IdealPoint, Mat2};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Presentation {
    /// Closed orientable surface: generators `a_1..a_{2g}`, one relator.
    Surface { genus: usize },
    /// Free group, used for cyclic and other auxiliary groups.
    Free { rank: usize },
}

impl Presentation {
    pub fn generator_count(&self) -> usize {
        match *self {
            Presentation::Surface { genus } => 2 * genus,
            Presentation::Free { rank } => rank,
        }
    }

    pub fn genus(&self) -> Option<usize> {
        match *self {
            Presentation::Surface { genus } => Some(genus),
            Presentation::Free { .. } => None,
        }
    }

    /// `∏ [a_{2i−1}, a_{2i}]`, or `None` for free groups.
    pub fn relator(&self) -> Option<Word> {
        let genus = self.genus()?;
        let mut letters = Vec::with_capacity(4 * genus);
        for i in 0..genus as i32 {
            let (x, y) = (2 * i + 1, 2 * i + 2);
            letters.extend([x, y, -x, -y]);
        }
        Some(Word(letters))
    }
}

/// A freely reduced word in signed generator indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(index: i32) -> Self {
        assert!(index != 0, "generator indices start at 1");
        Word(vec![index])
    }

    /// Builds a word from letters, cancelling adjacent inverse pairs.
    pub fn new(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut out: Vec<i32> = Vec::new();
        for l in letters {
            assert!(l != 0, "generator indices start at 1");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn concat(&self, other: &Self) -> Self {
        Word::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn conjugate_by(&self, g: &Self) -> Self {
        g.concat(self).concat(&g.inverse())
    }

    pub fn max_generator(&self) -> usize {
        self.0.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }
}

fn letter_name(l: i32) -> String {
    let k = l.unsigned_abs();
    let (stem, idx) = if k % 2 == 1 { ('a', k.div_ceil(2)) } else { ('b', k / 2) };
    let stem = if l < 0 { stem.to_ascii_uppercase() } else { stem };
    format!("{stem}{idx}")
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let names: Vec<String> = self.0.iter().map(|&l| letter_name(l)).collect();
        write!(f, "{}", names.join(" "))
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || Error::BadWord(s.to_string());
        let chars: Vec<char> = s.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == '*' || c == '.' {
                i += 1;
                continue;
            }
            if c == '1' && letters.is_empty() && s.trim() == "1" {
                return Ok(Word::identity());
            }
            let lower = c.to_ascii_lowercase();
            if !matches!(lower, 'a' | 'b' | 'g') {
                return Err(bad());
            }
            i += 1;
            if i < chars.len() && chars[i] == '_' {
                i += 1;
            }
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n: i32 = digits.parse().map_err(|_| bad())?;
            if n < 1 {
                return Err(bad());
            }
            let index = match lower {
                'a' => 2 * n - 1,
                'b' => 2 * n,
                _ => n,
            };
            letters.push(if c.is_ascii_uppercase() { -index } else { index });
        }
        Ok(Word::new(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A homomorphism from the presented group to PSL(2,ℝ), given on generators.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    presentation: Presentation,
    generators: Vec<Mat2>,
}

/// Relator residual accepted when building a representation.
pub const RELATOR_TOL: f64 = 1e-8;

impl Representation {
    /// Validates determinants and, for surface groups, the relator.
    pub fn new(presentation: Presentation, generators: Vec<Mat2>) -> Result<Self, Error> {
        let rep = Self::new_unchecked(presentation, generators)?;
        let residual = rep.relator_residual();
        if residual > RELATOR_TOL {
            return Err(Error::RelatorNotSatisfied { residual });
        }
        Ok(rep)
    }

    /// Checks determinants and generator count but not the relator.
    pub fn new_unchecked(presentation: Presentation, generators: Vec<Mat2>) -> Result<Self, Error> {
        if generators.len() != presentation.generator_count() {
            return Err(Error::Input(format!(
                "expected {} generators, got {}",
                presentation.generator_count(),
                generators.len()
            )));
        }
        let mut normalized = Vec::with_capacity(generators.len());
        for m in generators {
            let det = m.det();
            if (det - 1.0).abs() > 1e-6 {
                return Err(Error::NotUnimodular { det });
            }
            normalized.push(m.normalized()?.canonical());
        }
        Ok(Self { presentation, generators: normalized })
    }

    pub fn trivial(presentation: Presentation) -> Self {
        let n = presentation.generator_count();
        Self { presentation, generators: vec![Mat2::IDENTITY; n] }
    }

    pub fn cyclic(generator: Mat2) -> Result<Self, Error> {
        Self::new(Presentation::Free { rank: 1 }, vec![generator])
    }

    pub fn presentation(&self) -> Presentation {
        self.presentation
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    pub fn generator_count(&self) -> usize {
        self.generators.len()
    }

    pub fn letter(&self, l: i32) -> Mat2 {
        let m = self.generators[l.unsigned_abs() as usize - 1];
        if l > 0 {
            m
        } else {
            m.adjugate()
        }
    }

    /// Product of generator matrices in SL(2,ℝ), without canonicalizing.
    pub fn evaluate_sl2(&self, w: &Word) -> Mat2 {
        w.letters().iter().fold(Mat2::IDENTITY, |acc, &l| acc * self.letter(l))
    }

    pub fn check_word(&self, w: &Word) -> Result<(), Error> {
        if w.max_generator() > self.generator_count() {
            let index = *w.letters().iter().max_by_key(|l| l.unsigned_abs()).unwrap();
            return Err(Error::GeneratorOutOfRange { index, count: self.generator_count() });
        }
        Ok(())
    }

    pub fn relator_residual(&self) -> f64 {
        match self.presentation.relator() {
            Some(r) => self.evaluate_sl2(&r).psl_distance(&Mat2::IDENTITY),
            None => 0.0,
        }
    }

    /// Conjugates every generator: `m ↦ c m c⁻¹`.
    pub fn conjugated(&self, c: &Mat2) -> Self {
        let inv = c.inverse();
        let generators = self.generators.iter().map(|m| (*c * *m * inv).canonical()).collect();
        Self { presentation: self.presentation, generators }
    }

    /// The representation of another presentation obtained by evaluating one
    /// word per generator (e.g. a finite-index subgroup).
    pub fn pullback(&self, presentation: Presentation, words: &[Word]) -> Result<Self, Error> {
        for w in words {
            self.check_word(w)?;
        }
        let gens = words.iter().map(|w| evaluate(self, w)).collect();
        Self::new(presentation, gens)
    }
}

/// `ρ(w)`, canonicalized in PSL(2,ℝ).
pub fn evaluate(rep: &Representation, w: &Word) -> Mat2 {
    rep.evaluate_sl2(w).canonical()
}

#[derive(Serialize, Deserialize)]
struct RepresentationFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    genus: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    generators: Vec<[[f64; 2]; 2]>,
}

impl Representation {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let file: RepresentationFile = serde_json::from_str(text).map_err(|e| Error::Input(e.to_string()))?;
        let presentation = match (file.genus, file.rank) {
            (Some(genus), None) if genus >= 1 => Presentation::Surface { genus },
            (None, Some(rank)) => Presentation::Free { rank },
            _ => return Err(Error::Input("need exactly one of \"genus\" (≥ 1) or \"rank\"".into())),
        };
        Self::new(presentation, file.generators.into_iter().map(Mat2::from).collect())
    }

    pub fn to_json(&self) -> String {
        let (genus, rank) = match self.presentation {
            Presentation::Surface { genus } => (Some(genus), None),
            Presentation::Free { rank } => (None, Some(rank)),
        };
        let file = RepresentationFile { genus, rank, generators: self.generators.iter().map(|&m| m.into()).collect() };
        serde_json::to_string_pretty(&file).expect("representation serializes")
    }
}

/// Rotation about the apex `i` by `angle` (counterclockwise in the disc).
pub fn rotation_about_apex(angle: f64) -> Mat2 {
    Mat2::rotation(angle / 2.0)
}

/// Translation by `dist` from the apex towards disc direction `angle`.
pub fn translation_from_apex(angle: f64, dist: f64) -> Mat2 {
    let r = rotation_about_apex(angle);
    r * Mat2::boost(dist) * r.adjugate()
}

/// The Fuchsian representation of the genus-`g` surface group given by the
/// side pairings of a regular `4g`-gon with all angles `π/(2g)`, centred at
/// the apex.
pub fn regular_polygon_rep(genus: usize) -> Result<Representation, Error> {
    if genus < 2 {
        return Err(Error::BadGenus { genus, min: 2 });
    }
    let n = 4 * genus;
    let step = 2.0 * std::f64::consts::PI / n as f64;
    // Centre-to-side distance: cosh h = cot(π/n).
    let inradius = (1.0 / (std::f64::consts::PI / n as f64).tan()).acosh();
    let pairing = |from: usize, to: usize| {
        let (bf, bt) = (from as f64 * step, to as f64 * step);
        rotation_about_apex(bt) * Mat2::boost(2.0 * inradius) * rotation_about_apex(std::f64::consts::PI - bf)
    };

    // Side k carries the k-th letter of the relator word; each generator
    // pairs the two sides carrying it and its inverse. The direction of
    // each pairing is fixed by requiring the relator to hold.
    let relator = Presentation::Surface { genus }.relator().unwrap();
    let letters = relator.letters();
    let gens = 2 * genus;
    let mut best: Option<(f64, Vec<Mat2>)> = None;
    for reversed in [false, true] {
        let side_of = |letter: i32| -> usize {
            let k = letters.iter().position(|&l| l == letter).unwrap();
            if reversed {
                (n - k) % n
            } else {
                k
            }
        };
        for mask in 0..(1u32 << gens) {
            let mats: Vec<Mat2> = (1..=gens as i32)
                .map(|g| {
                    let (s, t) = (side_of(g), side_of(-g));
                    if mask >> (g - 1) & 1 == 0 {
                        pairing(s, t)
                    } else {
                        pairing(t, s)
                    }
                })
                .collect();
            let rep = Representation { presentation: Presentation::Surface { genus }, generators: mats.clone() };
            let res = rep.relator_residual();
            if best.as_ref().is_none_or(|(b, _)| res < *b) {
                best = Some((res, mats));
            }
        }
    }
    let (residual, mats) = best.unwrap();
    if residual > RELATOR_TOL {
        return Err(Error::RelatorNotSatisfied { residual });
    }
    Representation::new(Presentation::Surface { genus }, mats)
}

// ---------------------------------------------------------------------------
// Circle lifts and the Euler class.

/// Circle parameter `θ ∈ ℝ/ℤ` of the direction of `(p, q)`.
fn direction_parameter(v: [f64; 2]) -> f64 {
    v[1].atan2(v[0]) / std::f64::consts::PI
}

fn unit_at(theta: f64) -> [f64; 2] {
    let a = theta * std::f64::consts::PI;
    [a.cos(), a.sin()]
}

/// The lift `F : ℝ → ℝ` of the action of an SL(2,ℝ) matrix on ℝP¹ = ℝ/ℤ,
/// normalized by `F(0) ∈ [0, 1)` and shifted by `offset` (an integer).
#[derive(Debug, Clone, Copy)]
pub struct CircleLift {
    matrix: Mat2,
    offset: f64,
}

impl CircleLift {
    pub fn normalized(matrix: Mat2) -> Self {
        Self { matrix, offset: 0.0 }
    }

    /// Value at 0, in `[0, 1)` up to the integer offset.
    pub fn at_zero(&self) -> f64 {
        direction_parameter(self.matrix.apply_vec([1.0, 0.0])).rem_euclid(1.0) + self.offset
    }

    /// Evaluates the lift by tracking the image direction continuously from
    /// the image of 0, halving the step until every increment is below ¼.
    pub fn eval(&self, x: f64) -> Result<f64, Error> {
        let whole = x.floor();
        let frac = x - whole;
        let mut value = self.at_zero();
        let mut prev = direction_parameter(self.matrix.apply_vec([1.0, 0.0]));
        let mut s = 0.0;
        let mut h = frac.min(0.125);
        let mut halvings = 0;
        while s < frac {
            let next_s = (s + h).min(frac);
            let cur = direction_parameter(self.matrix.apply_vec(unit_at(next_s)));
            // Orientation-preserving maps turn directions forwards, so the
            // increment is the forward difference on ℝ/ℤ.
            let inc = (cur - prev).rem_euclid(1.0);
            if inc >= 0.25 {
                h /= 2.0;
                halvings += 1;
                if halvings > 200 || h < 1e-300 {
                    return Err(Error::DegenerateTracking(format!("step underflow at {s}")));
                }
                continue;
            }
            value += inc;
            prev = cur;
            s = next_s;
            h = (h * 2.0).min(0.125);
        }
        Ok(value + whole)
    }
}

/// Lift of a generator letter: normalized for positive letters, the exact
/// inverse of the normalized lift for negative ones.
fn letter_lift(rep: &Representation, l: i32) -> Result<CircleLift, Error> {
    let gen = rep.generators[l.unsigned_abs() as usize - 1];
    if l > 0 {
        return Ok(CircleLift::normalized(gen));
    }
    let forward = CircleLift::normalized(gen);
    let candidate = CircleLift::normalized(gen.adjugate());
    let k = forward.eval(candidate.at_zero())?;
    let shift = k.round();
    if (k - shift).abs() > 1e-6 {
        return Err(Error::DegenerateTracking(format!("inverse lift offset {k}")));
    }
    Ok(CircleLift { matrix: gen.adjugate(), offset: -shift })
}

/// Evaluates the lift of a word at `x`, applying the rightmost letter first.
pub fn word_lift_at(rep: &Representation, w: &Word, x: f64) -> Result<f64, Error> {
    let mut value = x;
    for &l in w.letters().iter().rev() {
        value = letter_lift(rep, l)?.eval(value)?;
    }
    Ok(value)
}

/// Euler class of a surface-group representation.
///
/// Generator lifts are normalized so that they send 0 into `[0, 1)` on the
/// circle `ℝP¹ = ℝ/ℤ` parametrized by direction angle over π; the lifted
/// relator is then translation by `−e`. With this orientation of the circle
/// the regular-polygon representation of genus `g` has `e = 2 − 2g`.
pub fn euler_class(rep: &Representation) -> Result<i64, Error> {
    let relator = rep
        .presentation
        .relator()
        .ok_or_else(|| Error::InvalidParameter("Euler class needs a surface presentation".into()))?;
    let residual = rep.relator_residual();
    if residual > RELATOR_TOL {
        return Err(Error::RelatorNotSatisfied { residual });
    }
    let shift = word_lift_at(rep, &relator, 0.0)?;
    let e = -shift;
    let rounded = e.round();
    if (e - rounded).abs() > 1e-6 {
        return Err(Error::EulerNotInteger { offset: e });
    }
    Ok(rounded as i64)
}

// ---------------------------------------------------------------------------
// Axes.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub attracting: IdealPoint,
    pub repelling: IdealPoint,
    pub length: f64,
}

fn eigenvector(m: &Mat2, lambda: f64) -> [f64; 2] {
    let v1 = [m.b, lambda - m.a];
    let v2 = [lambda - m.d, m.c];
    let n1 = v1[0].hypot(v1[1]);
    let n2 = v2[0].hypot(v2[1]);
    if n1 >= n2 {
        v1
    } else {
        v2
    }
}

/// Fixed points and translation length of a hyperbolic element.
pub fn axis(m: &Mat2) -> Result<Axis, Error> {
    let m = m.canonical();
    let tr = m.trace();
    if tr.abs() <= 2.0 + crate::DEFAULT_EPS {
        return Err(Error::NotHyperbolic { trace: tr });
    }
    let m = if tr < 0.0 { m.scale(-1.0) } else { m };
    let tr = tr.abs();
    let disc = ((tr - 2.0) * (tr + 2.0)).sqrt();
    let big = (tr + disc) / 2.0;
    let small = 1.0 / big;
    Ok(Axis {
        attracting: IdealPoint::from_vec(eigenvector(&m, big)),
        repelling: IdealPoint::from_vec(eigenvector(&m, small)),
        length: 2.0 * (tr / 2.0).acosh(),
    })
}

// ---------------------------------------------------------------------------
// Word balls.

#[derive(Debug, Clone)]
pub struct BallElement {
    pub word: Word,
    pub matrix: Mat2,
}

/// Distinct group elements of word length at most `radius`, each with the
/// first (shortest) word found for it.
#[derive(Debug, Clone)]
pub struct GroupBall {
    radius: usize,
    elements: Vec<BallElement>,
    /// `layers[k]` is the index of the first element of word length `k`.
    layers: Vec<usize>,
    /// Frontier words (reduced) of the last layer, including those whose
    /// matrix coincided with an earlier element.
    frontier: Vec<Word>,
    index: HashMap<[i64; 4], Vec<usize>>,
}

const BALL_GRID: f64 = 1e-7;

impl GroupBall {
    fn empty() -> Self {
        Self { radius: 0, elements: Vec::new(), layers: Vec::new(), frontier: Vec::new(), index: HashMap::new() }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[BallElement] {
        &self.elements
    }

    /// Elements of word length exactly `k`.
    pub fn layer(&self, k: usize) -> &[BallElement] {
        let start = self.layers[k];
        let end = self.layers.get(k + 1).copied().unwrap_or(self.elements.len());
        &self.elements[start..end]
    }

    fn key(m: &Mat2) -> ([i64; 4], [f64; 4]) {
        let e = m.entries();
        let mut key = [0i64; 4];
        let mut frac = [0.0; 4];
        for i in 0..4 {
            let s = e[i] / BALL_GRID;
            key[i] = s.round() as i64;
            frac[i] = s - s.round();
        }
        (key, frac)
    }

    pub fn find(&self, m: &Mat2) -> Option<usize> {
        let m = m.canonical();
        let (key, frac) = Self::key(&m);
        let near: Vec<usize> = (0..4).filter(|&i| frac[i].abs() > 0.3).collect();
        for mask in 0..(1u32 << near.len()) {
            let mut k = key;
            for (bit, &i) in near.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    k[i] += frac[i].signum() as i64;
                }
            }
            if let Some(list) = self.index.get(&k) {
                for &idx in list {
                    if self.elements[idx].matrix.max_abs_diff(&m) < BALL_GRID {
                        return Some(idx);
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, word: Word, matrix: Mat2) -> bool {
        if self.find(&matrix).is_some() {
            return false;
        }
        let (key, _) = Self::key(&matrix);
        self.index.entry(key).or_default().push(self.elements.len());
        self.elements.push(BallElement { word, matrix });
        true
    }

    /// Adds the next layer of reduced words.
    pub fn grow(&mut self, rep: &Representation) {
        let gens = rep.generator_count() as i32;
        let start = self.elements.len();
        let mut next_frontier = Vec::new();
        for w in std::mem::take(&mut self.frontier) {
            let base = rep.evaluate_sl2(&w);
            let last = w.letters().last().copied();
            for g in (1..=gens).flat_map(|g| [g, -g]) {
                if last == Some(-g) {
                    continue;
                }
                let mut letters = w.letters().to_vec();
                letters.push(g);
                let word = Word(letters);
                let m = (base * rep.letter(g)).canonical();
                self.insert(word.clone(), m);
                next_frontier.push(word);
            }
        }
        self.layers.push(start);
        self.frontier = next_frontier;
        self.radius += 1;
    }

    /// Index of `ρ(w)` in the ball, if present.
    pub fn find_word(&self, rep: &Representation, w: &Word) -> Option<usize> {
        self.find(&evaluate(rep, w))
    }
}

/// All reduced words of length at most `radius`, deduplicated by matrix.
pub fn enumerate_ball(rep: &Representation, radius: usize) -> GroupBall {
    let mut ball = GroupBall::empty();
    ball.layers.push(0);
    ball.insert(Word::identity(), Mat2::IDENTITY);
    ball.frontier.push(Word::identity());
    for _ in 0..radius {
        ball.grow(rep);
    }
    ball
}
