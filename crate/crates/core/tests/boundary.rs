use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use petallab_core::boundary::{cauchy_modulus, trace_boundary, trace_boundary_with, CurveTower};
use petallab_core::exec::Sequential;
use petallab_core::maps::MapSpec;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn max_gap(pts: &[Complex64]) -> f64 {
    (0..pts.len()).map(|i| (pts[(i + 1) % pts.len()] - pts[i]).norm()).fold(0.0, f64::max)
}

#[test]
fn power_curves_are_circles_with_aligned_parameters() {
    let f = MapSpec::power(3).unwrap();
    let tr = trace_boundary(&f, zero(), 0.5, 4, 256).unwrap();
    for c in &tr.curves {
        let r = 0.5f64.powf(1.0 / 3f64.powi(c.level as i32));
        for z in c.points() {
            assert!((z.norm() - r).abs() < 1e-9);
        }
        assert_eq!(c.len(), if c.level == 0 { 256 } else { 3 * 256 });
    }
    for w in tr.report.cauchy_moduli.windows(2) {
        assert!(w[1] < w[0]);
    }
}

#[test]
fn sine_curves_nest_and_respect_symmetries() {
    let f = MapSpec::sine_newton();
    let tr = trace_boundary(&f, zero(), 0.5, 4, 1024).unwrap();
    for pair in tr.curves.windows(2) {
        let (inner, outer) = (&pair[0], &pair[1]);
        for z in inner.points().step_by(17) {
            assert_eq!(outer.winding_number(z), 1, "level {} not inside level {}", inner.level, outer.level);
        }
        assert!(cauchy_modulus(inner, outer).unwrap() > 0.0);
    }
    for c in &tr.curves {
        let pts: Vec<Complex64> = c.points().collect();
        let tol = max_gap(&pts);
        assert_eq!(c.winding_number(zero()), 1);
        for &z in pts.iter().step_by(13) {
            assert!(c.min_distance_to(z.conj()) <= tol);
            assert!(c.min_distance_to(-z) <= tol);
        }
    }
    let gaps: Vec<f64> = tr.curves.iter().map(|c| c.min_distance_to(Complex64::new(FRAC_PI_2, 0.0))).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn tower_matches_stored_samples_and_executors_agree() {
    let f = MapSpec::sine_newton();
    let a = trace_boundary(&f, zero(), 0.5, 2, 256).unwrap();
    let b = trace_boundary_with(&Sequential, &f, zero(), 0.5, 2, 256).unwrap();
    assert_eq!(a, b);
    let tower = CurveTower::new(&f, &a.curves).unwrap();
    for c in &a.curves {
        for &(theta, z) in c.samples.iter().step_by(29) {
            let w = tower.eval(c.level, theta).unwrap();
            assert!((w - z).norm() < 1e-8, "level {} theta {theta}: {w} vs {z}", c.level);
        }
    }
}
