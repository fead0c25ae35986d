use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
use petallab_core::maps::MapSpec;
use petallab_core::metrics::{density, metric_derivative, parabolic_bound_seq, sph_dist_c, MetricKind};
use petallab_core::petals::{SectorKind, SectorSpec};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #[test]
    fn vertical_lines_are_invariant(k in -6i64..=6, t in prop_oneof![-40.0..-0.01f64, 0.01..40.0f64]) {
        let f = MapSpec::sine_newton();
        for x in [k as f64 * PI, FRAC_PI_2 + k as f64 * PI] {
            let w = f.eval_finite(c(x, t)).unwrap();
            prop_assert!((w.re - x).abs() < 1e-11 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn translation_by_pi(re in -20.0..20.0f64, im in -20.0..20.0f64, k in -5i64..=5) {
        let f = MapSpec::sine_newton();
        let z = c(re, im);
        prop_assume!(f.pole_distance(z) > 1e-3);
        let a = f.eval_finite(z + k as f64 * PI).unwrap();
        let b = f.eval_finite(z).unwrap() + k as f64 * PI;
        prop_assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
    }

    #[test]
    fn sph_dist_is_a_metric(a in (-5.0..5.0f64, -5.0..5.0f64), b in (-5.0..5.0f64, -5.0..5.0f64), m in (-5.0..5.0f64, -5.0..5.0f64)) {
        let (a, b, m) = (c(a.0, a.1), c(b.0, b.1), c(m.0, m.1));
        let ab = sph_dist_c(a, b);
        prop_assert!((ab - sph_dist_c(b, a)).abs() < 1e-14);
        prop_assert!(ab <= sph_dist_c(a, m) + sph_dist_c(m, b) + 1e-12);
        prop_assert!((0.0..=PI + 1e-15).contains(&ab));
    }

    /// Arc length of the segment in the spherical density bounds the distance,
    /// with equality along rays through the origin.
    #[test]
    fn sph_dist_against_arc_length(r1 in 0.0..3.0f64, r2 in 0.0..3.0f64, th in 0.0..TAU, b in (-2.0..2.0f64, -2.0..2.0f64)) {
        let arc = |p: Complex64, q: Complex64| {
            let n = 4000;
            let mut s = 0.0;
            for i in 0..n {
                let z = p + (q - p) * ((i as f64 + 0.5) / n as f64);
                s += density(&MetricKind::Spherical, z).unwrap() * (q - p).norm() / n as f64;
            }
            s
        };
        let p = Complex64::from_polar(r1, th);
        let q = Complex64::from_polar(r2, th);
        prop_assert!((arc(p, q) - sph_dist_c(p, q)).abs() < 1e-6);
        let q2 = c(b.0, b.1);
        prop_assert!(arc(p, q2) >= sph_dist_c(p, q2) - 1e-6);
    }

    #[test]
    fn chain_rule_for_power_maps(d in 2u32..=4, r in 0.3..1.5f64, th in 0.0..TAU, n in 1usize..=4) {
        let f = MapSpec::power(d).unwrap();
        let metric = MetricKind::Spherical;
        let mut z = Complex64::from_polar(r, th);
        let z0 = z;
        let mut product = 1.0;
        for _ in 0..n {
            product *= metric_derivative(&f, &metric, z).unwrap();
            z = f.eval_finite(z).unwrap();
        }
        // (f^n)(z) = z^(d^n) with derivative d^n z^(d^n - 1)
        let e = d.pow(n as u32);
        let zn = z0.powu(e);
        let deriv = e as f64 * z0.norm().powi(e as i32 - 1);
        let direct = deriv * (1.0 + z0.norm_sqr()) / (1.0 + zn.norm_sqr());
        prop_assert!((product - direct).abs() <= 1e-9 * direct);
    }

    #[test]
    fn sectors_rotate_with_their_index(d in 1u32..=4, j in 0i64..8, r in 5.0..50.0f64, phi in -3.1..3.1f64, delta_frac in 0.1..0.9f64) {
        let a = Complex64::from_polar(1.0, 0.7);
        let delta = delta_frac * PI / d as f64;
        let s0 = SectorSpec::new(SectorKind::AtInfinity { r: 1.0 }, j, d, a, delta).unwrap();
        let s1 = SectorSpec::new(SectorKind::AtInfinity { r: 1.0 }, j + 1, d, a, delta).unwrap();
        let z = Complex64::from_polar(r, phi);
        let rot = Complex64::from_polar(1.0, PI / d as f64);
        // skip points on the sector edge where rounding decides
        let edge = (petallab_core::petals::angle_diff(phi, s0.center_angle()).abs() - delta).abs();
        prop_assume!(edge > 1e-9);
        prop_assert_eq!(s0.contains(z), s1.contains(z * rot));
    }

    #[test]
    fn bound_seq_ratio_identity(m in 3u32..40, b in 1.01..2.9f64, n in 2usize..200) {
        prop_assume!((m as f64) > b);
        let a = parabolic_bound_seq(m, b, n + 1).unwrap();
        let a1 = parabolic_bound_seq(m + 1, b, n + 1).unwrap();
        for k in 1..n {
            let lhs = a[k + 1] / a[k];
            prop_assert!((lhs - a1[k] / a1[k - 1]).abs() < 1e-14);
            prop_assert!((lhs - (1.0 - b / (k + m as usize) as f64)).abs() < 1e-14);
            prop_assert!(a[k + 1] < a[k]);
        }
    }
}
