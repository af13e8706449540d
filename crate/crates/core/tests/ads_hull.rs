use spacetimes::ads::*;
use spacetimes::earthquake::*;
use spacetimes::{IdealPoint, Mat2};

fn shear_graph(s: f64, n: usize) -> CircleGraph {
    let bv = earthquake_along(FiniteLaminationH2::single_leaf(s).unwrap(), Side::Left, 1.0).boundary_value(n);
    CircleGraph::from_map(&bv, n).unwrap()
}

fn two_leaf_graph(n: usize) -> CircleGraph {
    let leaves = vec![
        (spacetimes::lamination::GeodesicH2::from_reals(-1.0, 1.0).unwrap(), 0.7),
        (spacetimes::lamination::GeodesicH2::from_reals(2.0, 6.0).unwrap(), 1.2),
    ];
    let lam = FiniteLaminationH2::new(leaves, spacetimes::HyperbolicPoint::from_upper_half_plane((0.0, 3.0))).unwrap();
    let bv = earthquake_along(lam, Side::Left, 1.0).boundary_value(n);
    CircleGraph::from_map(&bv, n).unwrap()
}

#[test]
fn mobius_graph_is_planar_with_the_expected_plane() {
    let g = Mat2::new(2.0, 1.0, 3.0, 2.0);
    let graph = CircleGraph::mobius(&g, 40).unwrap();
    let plane = graph.planar_section(1e-9).expect("planar");
    assert!(plane.same_as(mobius_plane(&g), 1e-9));
    assert_eq!(plane.classify(1e-9), PlaneClass::Spacelike);
    let back = plane_mobius(plane).unwrap();
    assert!(back.psl_distance(&g.normalized().unwrap()) < 1e-9);
    // Its hull is flat.
    let hull = convex_hull(&graph, disjoint_spacelike_plane(&graph).unwrap()).unwrap();
    assert!(hull.flat);
    assert!(bending_data(&hull).unwrap().is_empty());
}

#[test]
fn conjugated_identity_is_the_graph_of_the_conjugator() {
    // (g, h) maps the diagonal graph to the graph of h·g⁻¹ (left = column).
    let g = Mat2::new(1.0, 2.0, 0.0, 1.0);
    let h = Mat2::new(2.0, 0.0, 1.0, 0.5);
    let graph = CircleGraph::identity(30).unwrap().transformed(&g, &h).unwrap();
    let m = h * g.inverse();
    for (l, r) in graph.pairs() {
        let expect = m.apply_ideal(IdealPoint::from_angle(l));
        assert!(expect.circle_distance(IdealPoint::from_angle(r)) < 1e-10);
    }
}

#[test]
fn bending_is_invariant_under_the_isometry_group() {
    let graph = two_leaf_graph(60);
    let base = bending_data(&convex_hull(&graph, disjoint_spacelike_plane(&graph).unwrap()).unwrap()).unwrap();
    let mut base_w: Vec<f64> = base.iter().map(|b| b.weight).collect();
    base_w.sort_by(f64::total_cmp);
    assert_eq!(base_w.len(), 2);
    let g = Mat2::new(1.0, 0.5, 0.0, 1.0);
    let h = Mat2::rotation(0.3);
    let moved = graph.transformed(&g, &h).unwrap();
    let bend = bending_data(&convex_hull(&moved, disjoint_spacelike_plane(&moved).unwrap()).unwrap()).unwrap();
    let mut w: Vec<f64> = bend.iter().map(|b| b.weight).collect();
    w.sort_by(f64::total_cmp);
    assert_eq!(w.len(), base_w.len());
    for (a, b) in w.iter().zip(&base_w) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
    // Half of each leaf weight.
    assert!((base_w[0] - 0.35).abs() < 1e-9 && (base_w[1] - 0.6).abs() < 1e-9, "{base_w:?}");
}

#[test]
fn hull_residuals_are_small() {
    for graph in [shear_graph(3.0, 50), two_leaf_graph(80)] {
        let plane = disjoint_spacelike_plane(&graph).unwrap();
        assert!(plane_disjoint(&graph, plane));
        assert_eq!(plane.classify(1e-9), PlaneClass::Spacelike);
        assert!(graph.min_consecutive_pairing() > 0.0);
        let hull = convex_hull(&graph, plane).unwrap();
        assert!(hull.quadric_residual() < QUADRIC_EPS);
        assert!(hull.coplanarity_residual() < COPLANAR_EPS);
        assert!(hull.convexity_residual() < 1e-9);
        assert_eq!(hull.count_class(PlaneClass::Lorentzian), 0);
        // Euler characteristic of a sphere.
        let v = graph.len() as i64;
        let e = hull.edges.len() as i64;
        let f = hull.faces.len() as i64;
        assert_eq!(v - e + f, 2);
    }
}

#[test]
fn hull_does_not_depend_on_the_insertion_order() {
    let graph = two_leaf_graph(40);
    let plane = disjoint_spacelike_plane(&graph).unwrap();
    let count = |seed| {
        let h = convex_hull_seeded(&graph, plane, seed).unwrap();
        let mut w: Vec<f64> = bending_data(&h).unwrap().iter().map(|b| b.weight).collect();
        w.sort_by(f64::total_cmp);
        (h.faces.len(), w)
    };
    let (n0, w0) = count(1);
    for seed in [2, 3, 99] {
        let (n, w) = count(seed);
        assert_eq!(n, n0);
        for (a, b) in w.iter().zip(&w0) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn obj_export_lists_every_vertex_and_face() {
    let graph = shear_graph(2.0, 24);
    let hull = convex_hull(&graph, disjoint_spacelike_plane(&graph).unwrap()).unwrap();
    let obj = hull.to_obj();
    let mut lines = obj.lines();
    assert!(lines.next().unwrap().starts_with("# affine chart complementary to the plane ("));
    let v = obj.lines().filter(|l| l.starts_with("v ")).count();
    let f: Vec<&str> = obj.lines().filter(|l| l.starts_with("f ")).collect();
    assert_eq!(v, graph.len());
    assert_eq!(f.len(), hull.faces.len());
    for line in f {
        for idx in line[2..].split_whitespace() {
            let k: usize = idx.parse().unwrap();
            assert!((1..=v).contains(&k));
        }
    }
}

#[test]
fn csv_roundtrip_keeps_the_graph() {
    let graph = two_leaf_graph(30);
    let back = CircleGraph::from_csv(&graph.to_csv()).unwrap();
    assert_eq!(back.len(), graph.len());
    for ((a, b), (c, d)) in graph.pairs().zip(back.pairs()) {
        assert!((a - c).abs() < 1e-15 && (b - d).abs() < 1e-15);
    }
}

#[test]
fn non_monotone_samples_are_rejected() {
    let pairs = [(0.0, 0.0), (0.25, 0.5), (0.5, 0.25), (0.75, 0.75)];
    assert!(CircleGraph::from_pairs(pairs).is_err());
    assert!(CircleGraph::from_pairs([(0.0, 0.0), (0.5, 0.5)]).is_err());
}

#[test]
fn extraction_recovers_two_leaves() {
    let graph = two_leaf_graph(120);
    let hull = convex_hull(&graph, disjoint_spacelike_plane(&graph).unwrap()).unwrap();
    let ex = extract_left_earthquake(&hull).unwrap();
    let mut shears: Vec<f64> = ex.leaves.iter().map(|l| l.signed_shear).collect();
    shears.sort_by(f64::total_cmp);
    assert_eq!(shears.len(), 2);
    assert!((shears[0] - 0.7).abs() < 1e-8 && (shears[1] - 1.2).abs() < 1e-8, "{shears:?}");
    assert!(ex.boundary.is_monotone(1e-9));
}

#[test]
fn dependence_membership_on_a_bent_graph() {
    // Pairing with a rotation R(θ) along l·rᵀ is ½(cos θ l·r + sin θ det(l, r)).
    // For the s = 4 shear, det(l, r) = −3x on the sheared half, so small
    // rotations keep one sign and large ones change it.
    let graph = shear_graph(4.0, 40);
    assert_eq!(dependence_membership(&Mat2::IDENTITY, &graph), Ok(true));
    assert_eq!(dependence_membership(&Mat2::rotation(0.1), &graph), Ok(true));
    assert_eq!(dependence_membership(&Mat2::rotation(1.4), &graph), Ok(false));
    let flat = CircleGraph::identity(20).unwrap();
    assert!(matches!(dependence_membership(&Mat2::IDENTITY, &flat), Err(spacetimes::Error::Indeterminate(_))));
}
