use spacetimes::flat::*;
use spacetimes::fuchsian::*;
use spacetimes::lamination::*;
use spacetimes::{adjoint_to_so21, Mat2, MinkowskiVector};

fn words(list: &[&str]) -> Vec<Word> {
    list.iter().map(|w| w.parse().unwrap()).collect()
}

#[test]
fn double_cover_has_euler_class_minus_four() {
    let rep = regular_polygon_rep(2).unwrap();
    let cover = rep
        .pullback(
            Presentation::Surface { genus: 3 },
            &words(&["a1 a1", "b1", "a2", "b2", "a1 a2 A1", "a1 b2 A1"]),
        )
        .unwrap();
    assert!(cover.relator_residual() < 1e-8, "{}", cover.relator_residual());
    assert_eq!(euler_class(&cover), Ok(-4));
}

#[test]
fn cocycle_is_additive_over_disjoint_curves() {
    let rep = regular_polygon_rep(2).unwrap();
    let a = WeightedMulticurve::single("a1", 0.6).unwrap();
    let b = WeightedMulticurve::single("a2", 1.1).unwrap();
    let base = LiftedLamination::from_multicurve(&rep, &a, 1).unwrap().default_basepoint();
    let ta = cocycle_from_lamination(&rep, &a, base, 1).unwrap();
    let tb = cocycle_from_lamination(&rep, &b, base, 1).unwrap();
    let both = cocycle_from_lamination(&rep, &a.union(&b), base, 1).unwrap();
    assert!(both.max_abs_diff(&ta.add(&tb)) < 1e-12);
    let doubled = cocycle_from_lamination(&rep, &a.scaled(2.0), base, 1).unwrap();
    assert!(doubled.max_abs_diff(&ta.scale(2.0)) < 1e-12);
    assert!(relator_residual(&rep, &both) < 1e-10);
}

#[test]
fn moving_the_basepoint_adds_a_coboundary() {
    let rep = regular_polygon_rep(2).unwrap();
    let mc = WeightedMulticurve::single("a1", 0.9).unwrap();
    let mut lam = LiftedLamination::from_multicurve(&rep, &mc, 1).unwrap();
    let b = lam.default_basepoint();
    let moved = b.geodesic_to(rep.letter(2).apply_point(b), 0.8);
    let v = lam.transverse_vector(b, moved).unwrap();
    assert!(v.norm_inf() > 0.0, "the new basepoint should sit across a leaf");
    let t = cocycle_from_lifted(&mut lam, b).unwrap();
    let t2 = cocycle_from_lifted(&mut lam, moved).unwrap();
    let expect = TranslationCocycle::new(
        t.generator_values()
            .iter()
            .zip(1..)
            .map(|(ta, g)| *ta + adjoint_to_so21(&rep.letter(g)).unwrap().apply(v) - v)
            .collect(),
    );
    assert!(t2.max_abs_diff(&expect) < 1e-10, "{}", t2.max_abs_diff(&expect));
}

#[test]
fn coboundary_words_match_the_closed_form() {
    let rep = regular_polygon_rep(2).unwrap();
    let v = MinkowskiVector::new(0.3, -1.2, 0.5);
    let cob = TranslationCocycle::coboundary(&rep, v);
    for w in ["a1", "A2 b1", "a1 b1 A1 B1", "b2 b2 a1 B1", "a1 b1 A1 B1 a2 b2 A2 B2"] {
        let word: Word = w.parse().unwrap();
        let f = adjoint_to_so21(&evaluate(&rep, &word)).unwrap();
        let expect = v - f.apply(v);
        assert!((cob.eval(&rep, &word) - expect).norm_inf() < 1e-9, "{w}");
    }
}

#[test]
fn developed_patch_lies_in_every_support_half_space() {
    let rep = regular_polygon_rep(2).unwrap();
    let mc = WeightedMulticurve::single("a1", 1.0).unwrap().union(&WeightedMulticurve::single("a2", 0.5).unwrap());
    let patch = develop_surface(&rep, &mc, 1.2, 300).unwrap();
    assert!(patch.region_count() > 1);
    for plane in patch.support_planes(64) {
        for s in &patch.samples {
            assert!(plane.margin(s.f) > -1e-9);
        }
    }
    // Points of one region share their translation part.
    for a in &patch.samples {
        for b in &patch.samples {
            if a.region == b.region {
                assert!((a.x - b.x).norm_inf() < 1e-9);
            }
        }
    }
    let shifted = patch.translated(MinkowskiVector::new(0.0, 0.0, 1.0));
    for (a, b) in patch.samples.iter().zip(&shifted.samples) {
        assert!(((b.f - a.f) - MinkowskiVector::new(0.0, 0.0, 1.0)).norm_inf() < 1e-15);
    }
}

#[test]
fn cyclic_segment_has_the_leaf_weight_as_length() {
    for (lambda, w) in [(0.5, 0.3), (1.0, 1.0), (2.0, 4.5)] {
        let seg = cyclic_initial_singularity(lambda, w).unwrap();
        assert!((seg.length() - w).abs() < 1e-12);
        assert!(seg.start.norm_inf() < 1e-15);
    }
    assert!(cyclic_initial_singularity(-1.0, 1.0).is_err());
    assert!(cyclic_initial_singularity(1.0, -1.0).is_err());
}

#[test]
fn standard_torus_generators_commute_and_preserve_the_time_function() {
    let st = standard_torus(0.7, 1.0, 0.2, 3.0).unwrap();
    assert!(st.commutator_defect() < 1e-12);
    for v in [MinkowskiVector::new(0.1, 2.0, 1.0), MinkowskiVector::new(-0.5, -1.0, 3.0)] {
        assert!(st.contains(v));
        for g in [st.a, st.b, st.a.inverse()] {
            let w = g.apply(v);
            assert!(st.contains(w));
            let (t0, t1) = (StandardTorusSpacetime::time_function(v), StandardTorusSpacetime::time_function(w));
            assert!((t0 - t1).abs() < 1e-12 * t0.abs().max(1.0));
        }
    }
    assert!(standard_torus(1.0, 2.0, 0.5, 1.0).is_err());
}

#[test]
fn euler_class_is_conjugation_invariant() {
    let rep = regular_polygon_rep(2).unwrap();
    for c in [Mat2::new(2.0, 1.0, 1.0, 1.0), Mat2::rotation(0.7), Mat2::boost(1.5)] {
        assert_eq!(euler_class(&rep.conjugated(&c)), Ok(-2));
    }
    // Orientation reversal flips the sign.
    let flip = Mat2::new(1.0, 0.0, 0.0, -1.0);
    let mirrored: Vec<Mat2> = rep.generators().iter().map(|g| flip * *g * flip).collect();
    let mirrored = Representation::new(rep.presentation(), mirrored).unwrap();
    assert_eq!(euler_class(&mirrored), Ok(2));
}
