use pds_stretch::delaunay::{build, InsertionOrder, Location};
use pds_stretch::geom::{orient2d, Point, Sign};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_points(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| Point::new(rng.random(), rng.random())).collect()
}

fn closed_contains(tri: [Point; 3], p: Point) -> bool {
    (0..3).all(|i| orient2d(tri[i], tri[(i + 1) % 3], p) != Sign::Negative)
}

#[test]
fn random_meshes_pass_brute_force_oracle() {
    for seed in 0..200 {
        let n = 3 + (seed as usize * 7) % 62;
        let pts = random_points(n, seed);
        let m = build(&pts, InsertionOrder::Hilbert).unwrap();
        assert!(m.verify_delaunay(), "seed {seed}");
        m.check_topology().unwrap();
    }
}

#[test]
fn snapped_points_with_many_degeneracies() {
    // Points on a coarse lattice: lots of collinear and co-circular subsets.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let mut pts: Vec<Point> = Vec::new();
        while pts.len() < 40 {
            let p = Point::new(rng.random_range(0..8) as f64, rng.random_range(0..8) as f64);
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        for order in [InsertionOrder::Input, InsertionOrder::Hilbert, InsertionOrder::Shuffled(1)] {
            let m = build(&pts, order).unwrap();
            assert!(m.verify_delaunay());
            m.check_topology().unwrap();
        }
    }
}

#[test]
fn triangle_set_is_order_invariant() {
    for seed in 0..20 {
        let pts = random_points(32, 1000 + seed);
        let reference = build(&pts, InsertionOrder::Input).unwrap().canonical_triangles();
        for shuffle in 0..20 {
            let m = build(&pts, InsertionOrder::Shuffled(shuffle)).unwrap();
            assert_eq!(m.canonical_triangles(), reference);
        }
        assert_eq!(build(&pts, InsertionOrder::Hilbert).unwrap().canonical_triangles(), reference);
    }
}

#[test]
fn locate_matches_exhaustive_scan() {
    let pts = random_points(500, 77);
    let m = build(&pts, InsertionOrder::Hilbert).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    let mut hint = None;
    for _ in 0..10_000 {
        let q = Point::new(rng.random_range(-0.1..1.1), rng.random_range(-0.1..1.1));
        let scan = (0..m.num_triangles() as u32).find(|&t| closed_contains(m.triangle_points(t), q));
        let got = m.locate(q, hint);
        match scan {
            Some(t) => {
                assert_eq!(got, Location::Triangle(t));
                hint = Some(t);
            }
            None => assert_eq!(got, Location::Outside),
        }
    }
}

#[test]
fn locate_on_vertices_and_edges() {
    let pts = random_points(100, 3);
    let m = build(&pts, InsertionOrder::Hilbert).unwrap();
    for (v, &p) in pts.iter().enumerate() {
        let lowest = *m.triangles_around(v as u32).iter().min().unwrap();
        assert_eq!(m.locate(p, None), Location::Triangle(lowest));
    }
}

#[test]
fn euler_relation_on_larger_mesh() {
    let pts = random_points(20_000, 11);
    let m = build(&pts, InsertionOrder::Hilbert).unwrap();
    m.check_topology().unwrap();
    assert_eq!(m.num_triangles(), 2 * pts.len() - 2 - m.hull_edge_count());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_small_point_set_is_delaunay(
        raw in prop::collection::vec((-1000i32..1000, -1000i32..1000), 3..40),
        scale in prop::sample::select(vec![1.0, 1e-3, 1e9, 0.1])
    ) {
        let mut pts: Vec<Point> = Vec::new();
        for (x, y) in raw {
            let p = Point::new(x as f64 * scale, y as f64 * scale);
            if !pts.contains(&p) {
                pts.push(p);
            }
        }
        match build(&pts, InsertionOrder::Hilbert) {
            Ok(m) => {
                prop_assert!(m.verify_delaunay());
                prop_assert!(m.check_topology().is_ok());
            }
            Err(e) => prop_assert!(pts.len() < 3 || matches!(e, pds_stretch::delaunay::DelaunayError::AllCollinear)),
        }
    }
}
