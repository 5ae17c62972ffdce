use mfdepth::halfspace::{depth_1d, depth_2d_exact, region_volume, sample_depths, Kernel, PointCloud, Reference};
use proptest::prelude::*;

/// Exact O(n^2) oracle: the closed-halfplane count only changes at directions
/// orthogonal to some `y - x`, so its minimum is attained strictly between
/// consecutive critical angles.
fn oracle_2d(x: [f64; 2], cloud: &[[f64; 2]]) -> f64 {
    let n = cloud.len();
    let mut crit: Vec<f64> = Vec::new();
    for y in cloud {
        let (dx, dy) = (y[0] - x[0], y[1] - x[1]);
        if dx == 0.0 && dy == 0.0 {
            continue;
        }
        let a = dy.atan2(dx);
        for s in [a + std::f64::consts::FRAC_PI_2, a - std::f64::consts::FRAC_PI_2] {
            crit.push(s.rem_euclid(2.0 * std::f64::consts::PI));
        }
    }
    if crit.is_empty() {
        return 1.0;
    }
    crit.sort_by(f64::total_cmp);
    let mut probes = Vec::new();
    for w in 0..crit.len() {
        let a = crit[w];
        let b = if w + 1 < crit.len() { crit[w + 1] } else { crit[0] + 2.0 * std::f64::consts::PI };
        probes.push(0.5 * (a + b));
    }
    probes
        .into_iter()
        .map(|th| {
            let u = [th.cos(), th.sin()];
            cloud
                .iter()
                .filter(|y| (y[0] - x[0]) * u[0] + (y[1] - x[1]) * u[1] >= 0.0)
                .count()
        })
        .min()
        .unwrap() as f64
        / n as f64
}

fn grid_point() -> impl Strategy<Value = [f64; 2]> {
    (-4i32..=4, -4i32..=4).prop_map(|(a, b)| [a as f64, b as f64])
}

fn float_point() -> impl Strategy<Value = [f64; 2]> {
    (-10.0f64..10.0, -10.0f64..10.0).prop_map(|(a, b)| [a, b])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn planar_matches_oracle_with_ties(cloud in prop::collection::vec(grid_point(), 1..40), x in grid_point()) {
        let got = depth_2d_exact(x, &cloud);
        let want = oracle_2d(x, &cloud);
        prop_assert!((got - want).abs() < 1e-12, "got {got}, oracle {want}");
    }

    #[test]
    fn planar_matches_oracle_generic(cloud in prop::collection::vec(float_point(), 1..60), x in float_point()) {
        let got = depth_2d_exact(x, &cloud);
        prop_assert!((got - oracle_2d(x, &cloud)).abs() < 1e-12);
    }

    #[test]
    fn univariate_matches_counts(cloud in prop::collection::vec(-5i32..5, 1..50), x in -6i32..6) {
        let v: Vec<f64> = cloud.iter().map(|&c| c as f64).collect();
        let x = x as f64;
        let le = v.iter().filter(|&&c| c <= x).count();
        let ge = v.iter().filter(|&&c| c >= x).count();
        prop_assert_eq!(depth_1d(x, &v), le.min(ge) as f64 / v.len() as f64);
    }

    #[test]
    fn planar_affine_invariance(
        cloud in prop::collection::vec(float_point(), 3..40),
        x in float_point(),
        a in prop::array::uniform4(-3.0f64..3.0),
        b in prop::array::uniform2(-5.0f64..5.0),
    ) {
        let det = a[0] * a[3] - a[1] * a[2];
        prop_assume!(det.abs() > 0.1);
        let map = |y: [f64; 2]| [a[0] * y[0] + a[1] * y[1] + b[0], a[2] * y[0] + a[3] * y[1] + b[1]];
        let moved: Vec<[f64; 2]> = cloud.iter().map(|&y| map(y)).collect();
        prop_assert_eq!(depth_2d_exact(x, &cloud), depth_2d_exact(map(x), &moved));
    }

    #[test]
    fn random_directions_bound_exact_from_above(cloud in prop::collection::vec(float_point(), 2..40), x in float_point(), seed in any::<u64>()) {
        let pc = PointCloud::new(2, cloud.iter().flat_map(|p| p.iter().copied()).collect());
        let approx = Reference::new(&pc, Kernel::Random { n_dirs: 64, seed }).depth(&x);
        prop_assert!(approx + 1e-12 >= depth_2d_exact(x, &cloud));
    }

    #[test]
    fn region_volume_shrinks_with_beta(cloud in prop::collection::vec(float_point(), 4..40), b1 in 0.0f64..0.5, b2 in 0.0f64..0.5) {
        let pc = PointCloud::new(2, cloud.iter().flat_map(|p| p.iter().copied()).collect());
        let (lo, hi) = if b1 < b2 { (b1, b2) } else { (b2, b1) };
        let v_lo = region_volume(&pc, lo).unwrap();
        let v_hi = region_volume(&pc, hi).unwrap();
        prop_assert!(v_hi <= v_lo + 1e-9);
        prop_assert!(v_lo >= 0.0);
    }
}

#[test]
fn sample_depths_agree_with_oracle() {
    let cloud: Vec<[f64; 2]> = (0..30).map(|i| [((i * 7) % 11) as f64, ((i * 5) % 13) as f64]).collect();
    let pc = PointCloud::new(2, cloud.iter().flat_map(|p| p.iter().copied()).collect());
    for (d, x) in sample_depths(&pc, Kernel::Exact).iter().zip(&cloud) {
        assert!((d - oracle_2d(*x, &cloud)).abs() < 1e-12);
    }
}
