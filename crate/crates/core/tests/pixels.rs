use std::collections::BTreeSet;

use pds_stretch::geom::{Point, Rect};
use pds_stretch::harness::random_lattice_polyline;
use pds_stretch::paths::shortest_path;
use pds_stretch::pixels::*;
use pds_stretch::sampling::{make_free_field, make_instance, mix_seed, MarginPolicy};
use proptest::prelude::*;

fn brute_animal(poly: &[Point], grid: GridSpec, r: i64) -> BTreeSet<Pixel> {
    let mut out = BTreeSet::new();
    for i in -r..=r {
        for j in -r..=r {
            let v = grid.node(i, j);
            let sq = grid.square(v);
            let hit = if poly.len() == 1 { sq.contains(poly[0]) } else { poly.windows(2).any(|w| sq.meets_segment(w[0], w[1])) };
            if hit {
                out.insert(v);
            }
        }
    }
    out
}

fn coord() -> impl Strategy<Value = f64> {
    prop_oneof![-7.0f64..7.0, (-28i32..=28).prop_map(|i| f64::from(i) * 0.25)]
}

fn color() -> impl Strategy<Value = Color> {
    prop_oneof![Just(Color::Green), Just(Color::Pink), Just(Color::Blue), Just(Color::Yellow)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn animal_matches_exhaustive_scan(
        pts in prop::collection::vec((coord(), coord()), 1..6),
        scale in 1u32..5,
        c in color(),
    ) {
        let poly: Vec<Point> = pts.into_iter().map(|(x, y)| Point::new(x, y)).collect();
        let grid = GridSpec::new(scale, c).unwrap();
        let a = extract_animal(&poly, grid);
        prop_assert_eq!(&a, &brute_animal(&poly, grid, 10));
        prop_assert!(is_four_connected(&a, grid));
    }

    #[test]
    fn lattice_endpoint_polylines_obey_the_size_bound(seed in any::<u64>()) {
        let poly = random_lattice_polyline(seed);
        let r = check_animal_bound(&poly);
        prop_assert!(r.ok, "{:?} {:?}", poly, r);
    }

    #[test]
    fn each_pixel_has_exactly_one_color(x in -1000i64..1000, y in -1000i64..1000) {
        let v = Pixel::new(x, y);
        let owners: Vec<Color> = Color::ALL.into_iter().filter(|&c| GridSpec::colored(c).contains(v)).collect();
        prop_assert_eq!(owners, vec![Color::of(v)]);
    }

    #[test]
    fn same_color_neighbourhoods_do_not_overlap(x in -50i64..50, y in -50i64..50, dx in -3i64..=3, dy in -3i64..=3) {
        let v = Pixel::new(x, y);
        let w = Pixel::new(x + 2 * dx, y + 2 * dy);
        prop_assume!(v != w);
        let (a, b) = (v.square_scaled(2), w.square_scaled(2));
        let overlap = a.xmax.min(b.xmax) > a.xmin.max(b.xmin) && a.ymax.min(b.ymax) > a.ymin.max(b.ymin);
        prop_assert!(!overlap);
    }
}

// Corner-to-corner zigzag through pixel corners, starting and ending at
// lattice points: attains the bound exactly.
#[test]
fn adversarial_zigzag_attains_the_bound() {
    for m in [1usize, 7, 50] {
        let mut poly = vec![Point::new(0.0, 0.0)];
        poly.extend((1..=m).map(|j| Point::new(j as f64 - 0.5, if j % 2 == 1 { 0.5 } else { -0.5 })));
        poly.push(Point::new(m as f64, 0.0));
        let r = check_animal_bound(&poly);
        assert!(r.ok);
        assert_eq!(r.size, 3 * m + 1);
    }
}

#[test]
fn witnesses_are_clipped_column_crossings() {
    let half = 8.0;
    let window = Rect::square(Point::new(0.0, 0.0), half);
    let mut found = 0;
    for w in 0..3 {
        let mesh = make_free_field(153.0, &window, mix_seed(77, w)).unwrap();
        let ctx = PixelContext::new(&mesh, window, None);
        for rho in [1e-2, 3e-2] {
            let params = PixelParams::with_rho(rho).unwrap();
            for x in -6..=6 {
                for y in -6..=6 {
                    let v = Pixel::new(x, y);
                    let Some(wt) = strong_horizontality(&ctx, v, rho).unwrap() else { continue };
                    found += 1;
                    let (l, r) = (x as f64 - 0.5, x as f64 + 0.5);
                    assert!(wt.length <= 1.0 + rho + 1e-12);
                    assert!(wt.points.iter().all(|p| p.x >= l - 1e-12 && p.x <= r + 1e-12));
                    let ends = [wt.points[0].x, wt.points[wt.points.len() - 1].x];
                    assert!(ends.iter().any(|&e| (e - l).abs() < 1e-12) && ends.iter().any(|&e| (e - r).abs() < 1e-12));
                    let len: f64 = wt.points.windows(2).map(|s| s[0].dist(s[1])).sum();
                    assert!((len - wt.length).abs() < 1e-9);
                    assert!(wt.points.windows(2).any(|s| v.square().meets_segment(s[0], s[1])));
                    assert!(wt.edges.iter().all(|&(a, b)| mesh.has_edge(a, b)));
                    assert!(strong_implies_weak_check(&ctx, v, &params, &wt).unwrap().ok);
                }
            }
        }
    }
    assert!(found > 0);
}

#[test]
fn independence_needs_the_neighbourhood_inside_the_window() {
    let window = Rect::square(Point::new(0.0, 0.0), 5.0);
    let mesh = make_free_field(153.0, &window, 3).unwrap();
    let ctx = PixelContext::new(&mesh, window, None);
    assert!(independence_event(&ctx, Pixel::new(4, 0), 0.01).is_ok());
    assert_eq!(independence_event(&ctx, Pixel::new(5, 0), 0.01), Err(PixelError::WindowTooSmall(5, 0)));
    // At intensity 153 the triangles are small: every interior pixel is
    // independent for small ε.
    for x in -4..=4 {
        for y in -4..=4 {
            assert!(independence_event(&ctx, Pixel::new(x, y), 0.01).unwrap());
        }
    }
}

#[test]
fn length_animal_inequality_on_instances() {
    for i in 0..5 {
        let inst = make_instance(153.0, 5.0, MarginPolicy::Fixed(4.0), mix_seed(31, i)).unwrap();
        let sp = shortest_path(&inst).unwrap();
        let pts = sp.points(&inst.mesh);
        let ctx = PixelContext::from_instance(&inst);
        // With ρ = 0 the inequality is ℓ ≥ k.
        let zero = length_animal_check(&ctx, 5.0, 0.0, &pts).unwrap();
        assert_eq!(zero.rhs, 5.0);
        assert!(zero.ok);
        let r = length_animal_check(&ctx, 5.0, 1e-4, &pts).unwrap();
        assert!(r.ok, "{r:?}");
        // Pixels within distance 2 of s or t are never independent.
        assert!(r.counts.iter().all(|&c| c >= 1));
        for (ci, c) in Color::ALL.into_iter().enumerate() {
            assert_eq!(r.sizes[ci], extract_animal(&pts, GridSpec::colored(c)).len());
            assert!((r.sizes[ci] as f64) < colored_size_bound(5.0, 2));
        }
    }
}
