use proptest::prelude::*;
use spacetimes::ads::*;
use spacetimes::earthquake::*;
use spacetimes::flat::*;
use spacetimes::fuchsian::*;
use spacetimes::lamination::*;
use spacetimes::*;

fn sl2() -> impl Strategy<Value = Mat2> {
    // Products of a rotation, a boost and a rotation cover PSL(2,ℝ).
    (0.0..std::f64::consts::TAU, -2.5..2.5f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(a, l, b)| Mat2::rotation(a) * Mat2::boost(l) * Mat2::rotation(b))
}

fn vector() -> impl Strategy<Value = MinkowskiVector> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, t)| MinkowskiVector::new(x, y, t))
}

fn point() -> impl Strategy<Value = HyperbolicPoint> {
    (-0.8..0.8f64, -0.8..0.8f64).prop_filter_map("inside the disc", |(u, w)| {
        (u * u + w * w < 0.64).then(|| HyperbolicPoint::from_disc(u, w))
    })
}

fn unit_pair() -> impl Strategy<Value = [f64; 2]> {
    (0.0..std::f64::consts::TAU).prop_map(|a| [a.cos(), a.sin()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adjoint_is_a_homomorphism_preserving_the_form(a in sl2(), b in sl2(), u in vector(), v in vector()) {
        let fa = adjoint_to_so21(&a).unwrap();
        let fb = adjoint_to_so21(&b).unwrap();
        let fab = adjoint_to_so21(&(a * b)).unwrap();
        let scale = fa.max_abs_diff(&LorentzLinear::IDENTITY).max(1.0) * fb.max_abs_diff(&LorentzLinear::IDENTITY).max(1.0);
        prop_assert!(fab.max_abs_diff(&fa.compose(&fb)) < 1e-10 * scale);
        let k = u.norm_inf().max(1.0) * v.norm_inf().max(1.0) * fa.max_abs_diff(&LorentzLinear::IDENTITY).max(1.0).powi(2);
        prop_assert!((fa.apply(u).inner(fa.apply(v)) - u.inner(v)).abs() < 1e-10 * k);
        prop_assert!(fa.is_orthochronous());
    }

    #[test]
    fn causal_class_is_scale_invariant(v in vector(), k in 0.1..10.0f64) {
        let c = classify(v, 1e-9);
        prop_assume!(v.norm_sq().abs() > 1e-6);
        prop_assert_eq!(classify(k * v, 1e-9), c);
        prop_assert_eq!(classify(-v, 1e-9), c);
    }

    #[test]
    fn distance_is_invariant_and_satisfies_the_triangle_inequality(
        p in point(), q in point(), r in point(), g in sl2()
    ) {
        let d = h2_distance(p, q).unwrap();
        let dg = h2_distance(g.apply_point(p), g.apply_point(q)).unwrap();
        prop_assert!((d - dg).abs() < 1e-7 * d.max(1.0));
        prop_assert!(d <= h2_distance(p, r).unwrap() + h2_distance(r, q).unwrap() + 1e-9);
        prop_assert!(h2_distance(p, p).unwrap().abs() < 1e-6);
    }

    #[test]
    fn euler_class_survives_conjugation(c in sl2()) {
        let rep = regular_polygon_rep(2).unwrap();
        prop_assert_eq!(euler_class(&rep.conjugated(&c)), Ok(-2));
    }

    #[test]
    fn transverse_vector_is_additive(p in point(), q in point(), r in point(), w in 0.1..3.0f64) {
        let rep = regular_polygon_rep(2).unwrap();
        let mc = WeightedMulticurve::single("a1", w).unwrap();
        let mut lam = LiftedLamination::from_multicurve(&rep, &mc, 1).unwrap();
        let (pq, qr, pr) = (
            lam.transverse_vector(p, q),
            lam.transverse_vector(q, r),
            lam.transverse_vector(p, r),
        );
        // Sampled points landing exactly on a leaf are skipped.
        if let (Ok(pq), Ok(qr), Ok(pr)) = (pq, qr, pr) {
            prop_assert!((pq + qr - pr).norm_inf() < 1e-9);
        }
    }

    #[test]
    fn cocycle_is_linear_in_the_weights(w1 in 0.1..3.0f64, w2 in 0.1..3.0f64, k in 0.1..4.0f64) {
        let rep = regular_polygon_rep(2).unwrap();
        let a = WeightedMulticurve::single("a1", w1).unwrap();
        let b = WeightedMulticurve::single("a2", w2).unwrap();
        let base = LiftedLamination::from_multicurve(&rep, &a, 1).unwrap().default_basepoint();
        let ta = cocycle_from_lamination(&rep, &a, base, 1).unwrap();
        let tb = cocycle_from_lamination(&rep, &b, base, 1).unwrap();
        let mix = cocycle_from_lamination(&rep, &a.scaled(k).union(&b), base, 1).unwrap();
        prop_assert!(mix.max_abs_diff(&ta.scale(k).add(&tb)) < 1e-10);
    }

    #[test]
    fn segre_and_rulings_invert_each_other(l in unit_pair(), r in unit_pair(), k in 0.2..5.0f64) {
        let p = segre([k * l[0], k * l[1]], r).unwrap();
        prop_assert!(p.vector().q().abs() < 1e-12 * k * k);
        let (a, b) = rulings_of(p.vector()).unwrap();
        prop_assert!(a.circle_distance(IdealPoint::from_vec(l)) < 1e-12);
        prop_assert!(b.circle_distance(IdealPoint::from_vec(r)) < 1e-12);
    }

    #[test]
    fn plane_class_is_projective(e in -3.0..3.0f64, f in -3.0..3.0f64, g in -3.0..3.0f64, h in -3.0..3.0f64, k in 0.1..10.0f64) {
        let p = ProjectivePlane::new(e, f, g, h);
        prop_assume!(p.discriminant().abs() > 1e-6);
        let c = plane_classify(p);
        prop_assert_eq!(plane_classify(ProjectivePlane::new(k * e, k * f, k * g, k * h)), c);
        prop_assert_eq!(plane_classify(ProjectivePlane::new(-e, -f, -g, -h)), c);
    }

    #[test]
    fn duality_is_an_involution(e in -3.0..3.0f64, f in -3.0..3.0f64, g in -3.0..3.0f64, h in -3.0..3.0f64) {
        let p = ProjectivePlane::new(e, f, g, h);
        prop_assume!(p.to_array().iter().any(|c| c.abs() > 1e-3));
        prop_assert!(ProjectivePlane::polar_of(dual_point(p)).same_as(p, 1e-12));
        // The pole lies on its plane exactly when the plane is null.
        let on = p.incidence(dual_point(p)).abs() < 1e-9;
        prop_assert_eq!(on, p.discriminant().abs() < 1e-9);
    }

    #[test]
    fn planes_transform_with_their_points(g in sl2(), h in sl2(), l in unit_pair(), r in unit_pair()) {
        let x = segre(l, r).unwrap().vector();
        let p = plane_through(x, segre(r, l).unwrap().vector(), segre(l, l).unwrap().vector());
        let y = x.transformed(&g, &h);
        let q = p.transformed(&g, &h);
        let scale = g.max_abs().powi(2) * h.max_abs().powi(2);
        prop_assert!(q.incidence(y).abs() < 1e-9 * scale);
    }

    #[test]
    fn earthquakes_are_monotone(
        a in -3.0..-0.5f64, b in 0.5..3.0f64, c in 4.0..6.0f64, w1 in 0.05..2.0f64, w2 in 0.05..2.0f64, scale in 0.0..3.0f64
    ) {
        let leaves = vec![
            (GeodesicH2::from_reals(a, b).unwrap(), w1),
            (GeodesicH2::from_reals(c, c + 1.0).unwrap(), w2),
        ];
        let lam = FiniteLaminationH2::new(leaves, HyperbolicPoint::from_upper_half_plane((0.0, 10.0))).unwrap();
        for side in [Side::Left, Side::Right] {
            prop_assert!(earthquake_along(lam.clone(), side, scale).boundary_value(120).is_monotone(1e-9));
        }
    }

    #[test]
    fn single_leaf_quakes_add_their_scales(s in 1.1..10.0f64, a in 0.0..2.0f64, b in 0.0..2.0f64) {
        let lam = FiniteLaminationH2::single_leaf(s).unwrap();
        let ea = earthquake_along(lam.clone(), Side::Left, a).boundary_value(64);
        let eb = earthquake_along(lam.clone(), Side::Left, b).boundary_value(64);
        let eab = earthquake_along(lam, Side::Left, a + b).boundary_value(64);
        for k in 0..50 {
            let t = (k as f64 + 0.5) / 50.0;
            let d = (eb.eval(ea.eval(t)) - eab.eval(t)).rem_euclid(1.0);
            prop_assert!(d.min(1.0 - d) < 1e-10);
        }
    }

    #[test]
    fn half_measure_image_is_symmetric(s in 0.01..1000.0f64) {
        let m = quadric_action_example(s).unwrap().half_measure_image;
        prop_assert!((m.b - m.c).abs() <= 1e-12 * s.max(1.0));
    }
}
