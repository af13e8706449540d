use spacetimes::earthquake::*;
use spacetimes::fuchsian::*;
use spacetimes::lamination::*;
use spacetimes::{HyperbolicPoint, IdealPoint, Mat2};

fn uhp(x: f64, y: f64) -> HyperbolicPoint {
    HyperbolicPoint::from_upper_half_plane((x, y))
}

fn three_leaves() -> FiniteLaminationH2 {
    let leaves = vec![
        (GeodesicH2::from_reals(-1.0, 1.0).unwrap(), 0.4),
        (GeodesicH2::from_reals(2.0, 5.0).unwrap(), 0.9),
        (GeodesicH2::from_reals(-0.5, 0.5).unwrap(), 0.3),
    ];
    FiniteLaminationH2::new(leaves, uhp(0.0, 3.0)).unwrap()
}

fn point(image: QuakeImage) -> HyperbolicPoint {
    match image {
        QuakeImage::Point(p) => p,
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn right_after_left_fixes_the_base_arc() {
    let lam = three_leaves();
    let left = earthquake_along(lam.clone(), Side::Left, 1.0).boundary_value(256);
    let right = earthquake_along(lam.clone(), Side::Right, 1.0).boundary_value(256);
    let composed = left.then(&right);
    // The base region (containing 3i) sees the arc outside [-1, 1] and [2, 5].
    for x in [-30.0, -2.0, 1.5, 7.0, 40.0] {
        let t = IdealPoint::from_real(x).angle();
        let d = (right.eval(left.eval(t)) - t).rem_euclid(1.0);
        assert!(d.min(1.0 - d) < 1e-9, "x={x}");
    }
    assert!(composed.is_monotone(1e-9));
    // Single leaf: the right quake inverts the left one everywhere.
    let one = FiniteLaminationH2::single_leaf(3.0).unwrap();
    let l = earthquake_along(one.clone(), Side::Left, 1.0).boundary_value(64);
    let r = earthquake_along(one, Side::Right, 1.0).boundary_value(64);
    for &(a, _) in l.samples() {
        let d = (r.eval(l.eval(a)) - a).rem_euclid(1.0);
        assert!(d.min(1.0 - d) < 1e-12);
    }
}

#[test]
fn boundary_value_is_equivariant() {
    let lam = three_leaves();
    let phi = earthquake_along(lam.clone(), Side::Left, 1.0).boundary_value(128);
    let g = Mat2::new(2.0, 1.0, 1.0, 1.0);
    let moved = earthquake_along(lam.image(&g), Side::Left, 1.0).boundary_value(128);
    for k in 0..97 {
        let t = (k as f64 + 0.37) / 97.0;
        let p = IdealPoint::from_angle(t);
        let lhs = moved.eval_point(g.apply_ideal(p));
        let rhs = g.apply_ideal(phi.eval_point(p));
        assert!(lhs.circle_distance(rhs) < 1e-10, "t={t}");
    }
}

#[test]
fn boundary_values_are_monotone() {
    for side in [Side::Left, Side::Right] {
        for scale in [0.0, 0.5, 1.0, 3.0] {
            let bv = earthquake_along(three_leaves(), side, scale).boundary_value(300);
            assert!(bv.is_monotone(1e-9), "{side:?} {scale}");
        }
    }
}

#[test]
fn interior_and_boundary_agree() {
    // Points near the circle follow the boundary map of their region.
    let e = earthquake_along(three_leaves(), Side::Left, 1.0);
    let bv = e.boundary_value(16);
    for x in [-3.0, 0.2, 3.0, 10.0] {
        let p = uhp(x, 1e-4);
        let img = point(e.apply(p)).to_upper_half_plane();
        let expect = bv.eval_real(x).unwrap();
        assert!((img.0 - expect).abs() < 1e-2, "x={x}: {img:?} vs {expect}");
    }
}

#[test]
fn equivariant_quake_conjugates_the_holonomy() {
    let rep = regular_polygon_rep(2).unwrap();
    let mc = WeightedMulticurve::single("a1", 0.7).unwrap();
    let twisted = rep_after_earthquake(&rep, &mc, 1.0, Side::Left).unwrap();
    assert!(twisted.relator_residual() < 1e-8);
    let mut lam = LiftedLamination::from_multicurve(&rep, &mc, 1).unwrap();
    let base = lam.default_basepoint();
    for p in [HyperbolicPoint::from_xy(0.2, -0.1), HyperbolicPoint::from_xy(-0.3, 0.25)] {
        let mp = region_isometry_at(&mut lam, base, p, 1.0, Side::Left).unwrap();
        let ep = mp.apply_point(p);
        for g in 1..=4 {
            let gp = rep.letter(g).apply_point(p);
            let mgp = region_isometry_at(&mut lam, base, gp, 1.0, Side::Left).unwrap();
            let lhs = mgp.apply_point(gp);
            let rhs = twisted.letter(g).apply_point(ep);
            assert!((lhs.vector() - rhs.vector()).norm_inf() < 1e-8, "generator {g}");
        }
    }
}

#[test]
fn twist_preserves_disjoint_traces() {
    let rep = regular_polygon_rep(2).unwrap();
    for w in [0.3, 1.0, 2.5] {
        let mc = WeightedMulticurve::single("a1", w).unwrap();
        let twisted = rep_after_earthquake(&rep, &mc, 1.0, Side::Left).unwrap();
        for word in ["a1", "a2", "b2", "a2 b2"] {
            let word: Word = word.parse().unwrap();
            let before = evaluate(&rep, &word).trace().abs();
            let after = evaluate(&twisted, &word).trace().abs();
            assert!((before - after).abs() < 1e-8, "{word}: {before} vs {after}");
        }
        // b1 crosses a1 once, so its trace changes.
        let b1: Word = "b1".parse().unwrap();
        assert!((evaluate(&rep, &b1).trace().abs() - evaluate(&twisted, &b1).trace().abs()).abs() > 1e-3);
        assert_eq!(euler_class(&twisted), Ok(-2));
    }
}

#[test]
fn cyclic_twist_along_own_axis_is_trivial() {
    let rep = Representation::cyclic(Mat2::boost(1.3)).unwrap();
    let mc = WeightedMulticurve::single("a1", 0.8).unwrap();
    let twisted = rep_after_earthquake(&rep, &mc, 1.0, Side::Left).unwrap();
    assert!(twisted.generators()[0].psl_distance(&rep.generators()[0]) < 1e-12);
}

#[test]
fn half_measure_image_lies_on_the_symmetric_plane() {
    for s in [0.01, 0.5, 1.0, 2.0, 4.0, 9.0, 1234.5] {
        let ex = quadric_action_example(s).unwrap();
        let m = ex.half_measure_image;
        assert!((m.b - m.c).abs() <= 1e-12 * s.max(1.0), "s={s}");
        // Both ruling moves keep the point on the quadric.
        for x in [ex.start, ex.after_left_move, ex.image, m] {
            assert!(x.det().abs() <= 1e-12 * x.max_abs().powi(2));
        }
    }
}
