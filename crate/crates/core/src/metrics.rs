//! Conformal metric densities, metric derivatives, log-convex ladders,
//! parabolic contraction sequences and the radial glue profile.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::MetricError;
use crate::maps::{ExtPoint, MapSpec};

/// Absolute tolerance of the bisection for `R+`.
pub const GLUE_BISECTION_TOL: f64 = 1e-12;

/// Shape of a positive, non-increasing, log-convex gauge `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogConvexShape {
    /// `t -> c`
    Constant { c: f64 },
    /// `t -> t^{-a}`
    PowerDecay { a: f64 },
    /// `t -> exp(-a t^b)` with `0 < b <= 1`
    ExpDecay { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogConvexFn {
    pub shape: LogConvexShape,
    /// `g` is defined on `(domain_start, +inf)`.
    pub domain_start: f64,
}

impl LogConvexFn {
    pub fn new(shape: LogConvexShape, domain_start: f64) -> Result<Self, MetricError> {
        let g = LogConvexFn { shape, domain_start };
        g.validate()?;
        Ok(g)
    }

    pub fn constant(c: f64) -> Self {
        LogConvexFn {
            shape: LogConvexShape::Constant { c },
            domain_start: 0.0,
        }
    }

    pub fn power_decay(a: f64) -> Self {
        LogConvexFn {
            shape: LogConvexShape::PowerDecay { a },
            domain_start: 0.0,
        }
    }

    pub fn exp_decay(a: f64, b: f64) -> Self {
        LogConvexFn {
            shape: LogConvexShape::ExpDecay { a, b },
            domain_start: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        if !self.domain_start.is_finite() {
            return Err(MetricError::InvalidParameter("domain start must be finite"));
        }
        match self.shape {
            LogConvexShape::Constant { c } if !(c > 0.0 && c.is_finite()) => {
                Err(MetricError::InvalidParameter("constant gauge must be positive"))
            }
            LogConvexShape::PowerDecay { a } if !(a > 0.0 && a.is_finite()) => {
                Err(MetricError::InvalidParameter("power decay exponent must be positive"))
            }
            LogConvexShape::PowerDecay { .. } if self.domain_start < 0.0 => {
                Err(MetricError::InvalidParameter("power decay needs a non-negative domain"))
            }
            LogConvexShape::ExpDecay { a, b } if !(a > 0.0 && b > 0.0 && b <= 1.0) => {
                Err(MetricError::InvalidParameter("exp decay needs a > 0 and 0 < b <= 1"))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.shape {
            LogConvexShape::Constant { c } => c,
            LogConvexShape::PowerDecay { a } => t.powf(-a),
            LogConvexShape::ExpDecay { a, b } => (-a * t.powf(b)).exp(),
        }
    }
}

/// Piecewise radial profile `h` joining the core metric and the petal metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlueProfile {
    pub r_minus: f64,
    pub r_plus: f64,
    pub c1: f64,
    pub c2: f64,
    pub c0: f64,
    pub a: f64,
    pub g: LogConvexFn,
}

impl GlueProfile {
    /// `h(R-)`, the maximum of `h` on `[R-, inf)`.
    pub fn peak(&self) -> f64 {
        self.a.powf(self.c1 / self.c0)
    }

    pub fn h(&self, t: f64) -> f64 {
        if t < self.r_minus {
            self.peak() + self.c2 * (self.r_minus - t)
        } else if t < self.r_plus {
            // equals (R+ - t) / (c0 g(R+)) because R+ - R- = C1 g(R+)
            let e = (self.c1 / self.c0) * (self.r_plus - t) / (self.r_plus - self.r_minus);
            self.a.powf(e)
        } else {
            1.0
        }
    }
}

/// Solve `R+ = R- + C1 g(R+)` and store the profile.
pub fn glue_profile_build(
    g: LogConvexFn,
    r_minus: f64,
    c1: f64,
    c2: f64,
    c0: f64,
    a: f64,
) -> Result<GlueProfile, MetricError> {
    g.validate()?;
    for v in [r_minus, c1, c2, c0, a] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(MetricError::InvalidParameter("glue constants must be positive"));
        }
    }
    if a < 1.0 {
        return Err(MetricError::InvalidParameter("glue base A must be at least 1"));
    }
    if r_minus <= g.domain_start {
        return Err(MetricError::InvalidParameter("R- must lie in the domain of g"));
    }
    let phi = |t: f64| t - r_minus - c1 * g.eval(t);
    let mut lo = r_minus;
    let mut hi = r_minus + c1 * g.eval(r_minus);
    if !(phi(lo) < 0.0) {
        return Err(MetricError::NotBracketed);
    }
    let r_plus = if phi(hi) <= 0.0 {
        if phi(hi) < 0.0 {
            return Err(MetricError::NotBracketed);
        }
        hi
    } else {
        while hi - lo > GLUE_BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if phi(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(GlueProfile {
        r_minus,
        r_plus,
        c1,
        c2,
        c0,
        a,
        g,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum MetricKind {
    Euclidean,
    Spherical,
    /// `|dz| / |z|^alpha`, `alpha > 1`
    PowerInfinity { alpha: f64 },
    /// `|dz| / |z - p|^alpha`, `0 <= alpha < 1`
    PowerPoint { p: Complex64, alpha: f64 },
    /// `h(|z|) |dz| / |z|^alpha`
    GluedInfinity { alpha: f64, profile: GlueProfile },
}

impl MetricKind {
    pub fn power_infinity(alpha: f64) -> Result<Self, MetricError> {
        let m = MetricKind::PowerInfinity { alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn power_point(p: Complex64, alpha: f64) -> Result<Self, MetricError> {
        let m = MetricKind::PowerPoint { p, alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        match *self {
            MetricKind::PowerInfinity { alpha } | MetricKind::GluedInfinity { alpha, .. }
                if !(alpha > 1.0 && alpha.is_finite()) =>
            {
                Err(MetricError::InvalidParameter("alpha at infinity must exceed 1"))
            }
            MetricKind::PowerPoint { alpha, .. } if !(0.0..1.0).contains(&alpha) => {
                Err(MetricError::InvalidParameter("alpha at a point must lie in [0, 1)"))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euclidean",
            MetricKind::Spherical => "spherical",
            MetricKind::PowerInfinity { .. } => "power_infinity",
            MetricKind::PowerPoint { .. } => "power_point",
            MetricKind::GluedInfinity { .. } => "glued_infinity",
        }
    }
}

pub fn density(metric: &MetricKind, z: Complex64) -> Result<f64, MetricError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(MetricError::Singular(z));
    }
    let v = match *metric {
        MetricKind::Euclidean => 1.0,
        MetricKind::Spherical => 2.0 / (1.0 + z.norm_sqr()),
        MetricKind::PowerInfinity { alpha } => {
            let r = z.norm();
            if r == 0.0 {
                return Err(MetricError::Singular(z));
            }
            r.powf(-alpha)
        }
        MetricKind::PowerPoint { p, alpha } => {
            if alpha == 0.0 {
                1.0
            } else {
                let r = (z - p).norm();
                if r == 0.0 {
                    return Err(MetricError::Singular(z));
                }
                r.powf(-alpha)
            }
        }
        MetricKind::GluedInfinity { alpha, ref profile } => {
            let r = z.norm();
            if r == 0.0 {
                return Err(MetricError::Singular(z));
            }
            profile.h(r) * r.powf(-alpha)
        }
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(MetricError::Singular(z))
    }
}

/// `rho(f(z)) / rho(z) * |f'(z)|`.
pub fn metric_derivative(map: &MapSpec, metric: &MetricKind, z: Complex64) -> Result<f64, MetricError> {
    let fz = map.eval_finite(z)?;
    let d = map.derivative(z)?;
    Ok(density(metric, fz)? / density(metric, z)? * d.norm())
}

/// Great-circle distance for the density `2 / (1 + |z|^2)`; the sphere has
/// diameter `pi`.
pub fn sph_dist(z: ExtPoint, w: ExtPoint) -> f64 {
    match (z, w) {
        (ExtPoint::Infinity, ExtPoint::Infinity) => 0.0,
        (ExtPoint::Finite(z), ExtPoint::Infinity) | (ExtPoint::Infinity, ExtPoint::Finite(z)) => {
            2.0 * 1.0f64.atan2(z.norm())
        }
        (ExtPoint::Finite(z), ExtPoint::Finite(w)) => sph_dist_c(z, w),
    }
}

/// [`sph_dist`] for finite points.
pub fn sph_dist_c(z: Complex64, w: Complex64) -> f64 {
    2.0 * (z - w).norm().atan2((1.0 + z.conj() * w).norm())
}

/// `t_1 .. t_N` with `t_{n+1} = t_n + g(t_n)`.
pub fn logconvex_ladder(g: &LogConvexFn, t1: f64, n: usize) -> Result<Vec<f64>, MetricError> {
    g.validate()?;
    if !(t1 > g.domain_start) {
        return Err(MetricError::InvalidParameter("ladder must start inside the domain of g"));
    }
    let mut out = Vec::with_capacity(n);
    let mut t = t1;
    for _ in 0..n {
        out.push(t);
        t += g.eval(t);
    }
    Ok(out)
}

/// Limit estimate for a sequence converging like `L + c n^{-p}` (any `p`).
///
/// Applies Aitken's delta-squared to the terms at `N/4`, `N/2` and `N`,
/// which is exact for pure power-law convergence.
pub fn extrapolated_limit(seq: &[f64]) -> Option<f64> {
    let n = seq.len();
    if n < 8 {
        return None;
    }
    let (a, b, c) = (seq[n / 4 - 1], seq[n / 2 - 1], seq[n - 1]);
    let den = (c - b) - (b - a);
    if den == 0.0 {
        return Some(c);
    }
    Some(c - (c - b) * (c - b) / den)
}

/// Limit behaviour of a ladder: `t_{n+1}/t_n` and `g(t_{n+1})/g(t_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderLimits {
    pub last: f64,
    pub strictly_increasing: bool,
    /// `t_{n+1}/t_n` is non-increasing from the first index on.
    pub step_ratio_monotone: bool,
    pub step_ratio_limit: f64,
    /// `g(t_{n+1})/g(t_n)` is non-decreasing.
    pub gauge_ratio_monotone: bool,
    pub gauge_ratio_limit: f64,
}

pub fn ladder_limits(g: &LogConvexFn, t1: f64, n: usize) -> Result<LadderLimits, MetricError> {
    if n < 16 {
        return Err(MetricError::InvalidParameter("ladder too short for limit analysis"));
    }
    let t = logconvex_ladder(g, t1, n + 1)?;
    let step: Vec<f64> = t.windows(2).map(|w| w[1] / w[0]).collect();
    let gauge: Vec<f64> = t.windows(2).map(|w| g.eval(w[1]) / g.eval(w[0])).collect();
    Ok(LadderLimits {
        last: t[n],
        strictly_increasing: t.windows(2).all(|w| w[1] > w[0]),
        step_ratio_monotone: step.windows(2).all(|w| w[1] <= w[0]),
        step_ratio_limit: extrapolated_limit(&step).unwrap_or(f64::NAN),
        gauge_ratio_monotone: gauge.windows(2).all(|w| w[1] >= w[0]),
        gauge_ratio_limit: extrapolated_limit(&gauge).unwrap_or(f64::NAN),
    })
}

/// `a_{m,0} = 1` and `a_{m,n} = prod_{k=m}^{n+m-1} (1 - b/k)` for `n = 1..N`.
pub fn parabolic_bound_seq(m: u32, b: f64, n: usize) -> Result<Vec<f64>, MetricError> {
    if m < 2 || !(b > 1.0) || !b.is_finite() {
        return Err(MetricError::InvalidParameter("need m >= 2 and b > 1"));
    }
    if (m as f64) <= b {
        return Err(MetricError::InvalidParameter("need m > b so every factor is positive"));
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut a = 1.0;
    out.push(a);
    for k in m as usize..m as usize + n {
        a *= 1.0 - b / k as f64;
        out.push(a);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    /// Metric derivative at `orbit[i]`, one entry per step.
    pub per_step: Vec<f64>,
    /// `cumulative[n]` is the metric derivative of `f^n` at `orbit[0]`.
    pub cumulative: Vec<f64>,
    /// `min_n cumulative[n] * bound[n]` over `n >= 1`; `None` for a single point.
    pub min_margin: Option<f64>,
    /// Steps `n` where `cumulative[n] * bound[n] < 1`.
    pub violations: Vec<usize>,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Audit `|(f^n)'(z_0)|_metric * b_n >= 1` along a computed orbit.
pub fn expansion_audit(
    map: &MapSpec,
    metric: &MetricKind,
    orbit: &[Complex64],
    bound_seq: &[f64],
) -> Result<ExpansionReport, MetricError> {
    metric.validate()?;
    if bound_seq.len() < orbit.len() || bound_seq.iter().any(|b| !(*b > 0.0)) {
        return Err(MetricError::InvalidParameter("bound sequence must be positive and cover the orbit"));
    }
    let steps = orbit.len().saturating_sub(1);
    let mut per_step = Vec::with_capacity(steps);
    let mut cumulative = Vec::with_capacity(steps + 1);
    let mut acc = 1.0;
    cumulative.push(acc);
    for (i, &z) in orbit.iter().take(steps).enumerate() {
        let fz = map.eval_finite(z).map_err(|_| MetricError::Domain { step: i, z })?;
        let dz = map.derivative(z).map_err(|_| MetricError::Domain { step: i, z })?;
        let rz = density(metric, z).map_err(|_| MetricError::Domain { step: i, z })?;
        let rf = density(metric, fz).map_err(|_| MetricError::Domain { step: i + 1, z: fz })?;
        let s = rf / rz * dz.norm();
        per_step.push(s);
        acc *= s;
        cumulative.push(acc);
    }
    let mut min_margin: Option<f64> = None;
    let mut violations = Vec::new();
    for n in 1..cumulative.len() {
        let m = cumulative[n] * bound_seq[n];
        min_margin = Some(min_margin.map_or(m, |x| x.min(m)));
        if m < 1.0 {
            violations.push(n);
        }
    }
    Ok(ExpansionReport {
        per_step,
        cumulative,
        min_margin,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(&MetricKind::Spherical, c(0.0, 0.0)).unwrap(), 2.0);
        let m = MetricKind::power_infinity(1.5).unwrap();
        assert_abs_diff_eq!(density(&m, c(0.0, 4.0)).unwrap(), 0.125, epsilon = 1e-15);
        let m = MetricKind::power_point(c(1.0, 0.0), 0.5).unwrap();
        assert_abs_diff_eq!(density(&m, c(1.25, 0.0)).unwrap(), 2.0, epsilon = 1e-15);
        assert!(matches!(density(&m, c(1.0, 0.0)), Err(MetricError::Singular(_))));
        assert!(MetricKind::power_infinity(1.0).is_err());
        assert!(MetricKind::power_point(c(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn metric_derivative_examples() {
        let p = MapSpec::power(2).unwrap();
        assert_eq!(metric_derivative(&p, &MetricKind::Euclidean, c(1.0, 0.0)).unwrap(), 2.0);
        let m = MetricKind::power_infinity(2.0).unwrap();
        assert_abs_diff_eq!(metric_derivative(&p, &m, c(2.0, 0.0)).unwrap(), 1.0, epsilon = 1e-15);

        let s = MapSpec::sine_newton();
        let z = c(0.0, 10.0);
        let fz = s.eval_finite(z).unwrap();
        let oracle = s.derivative(z).unwrap().norm() * (1.0 + 100.0) / (1.0 + fz.norm_sqr());
        let v = metric_derivative(&s, &MetricKind::Spherical, z).unwrap();
        assert_abs_diff_eq!(v, oracle, epsilon = 1e-14);
        assert_abs_diff_eq!(v, 101.0 / 82.0, epsilon = 1e-6);
    }

    #[test]
    fn sph_dist_examples() {
        let o = ExtPoint::Finite(c(0.0, 0.0));
        assert_abs_diff_eq!(sph_dist(o, ExtPoint::Infinity), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(sph_dist(o, c(1.0, 0.0).into()), FRAC_PI_2, epsilon = 1e-15);
        // 1 and -1 are antipodal on the equator
        assert_abs_diff_eq!(sph_dist_c(c(1.0, 0.0), c(-1.0, 0.0)), PI, epsilon = 1e-15);
        assert_eq!(sph_dist(ExtPoint::Infinity, ExtPoint::Infinity), 0.0);
    }

    #[test]
    fn ladder_examples() {
        let t = logconvex_ladder(&LogConvexFn::constant(1.0), 5.0, 4).unwrap();
        assert_eq!(t, [5.0, 6.0, 7.0, 8.0]);
        let t = logconvex_ladder(&LogConvexFn::power_decay(1.0), 1.0, 4).unwrap();
        assert_abs_diff_eq!(t[1], 2.0);
        assert_abs_diff_eq!(t[2], 2.5);
        assert_abs_diff_eq!(t[3], 2.9, epsilon = 1e-15);
        let t = logconvex_ladder(&LogConvexFn::exp_decay(1.0, 1.0), 1.0, 3).unwrap();
        let t2 = 1.0 + (-1.0f64).exp();
        assert_abs_diff_eq!(t[1], t2, epsilon = 1e-15);
        assert_abs_diff_eq!(t[2], t2 + (-t2).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(t[2], 1.6225, epsilon = 1e-4);
    }

    #[test]
    fn extrapolation_is_exact_for_power_laws() {
        let seq: Vec<f64> = (1..=4096).map(|n| 2.0 + 3.0 / (n as f64).powf(1.3)).collect();
        assert_abs_diff_eq!(extrapolated_limit(&seq).unwrap(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn bound_seq_examples() {
        assert_eq!(parabolic_bound_seq(10, 2.0, 1).unwrap(), [1.0, 0.8]);
        let a = parabolic_bound_seq(10, 2.0, 2).unwrap();
        assert_abs_diff_eq!(a[2], 0.8 * (1.0 - 2.0 / 11.0), epsilon = 1e-15);
        assert_abs_diff_eq!(a[2], 0.6545, epsilon = 1e-4);
        assert!(parabolic_bound_seq(2, 2.0, 3).is_err());
        assert!(parabolic_bound_seq(10, 1.0, 3).is_err());
    }

    #[test]
    fn bound_seq_closed_form_for_b_two() {
        // telescoping: a_{m,n} = (m-1)(m-2) / ((n+m-1)(n+m-2)) when b = 2
        let a = parabolic_bound_seq(10, 2.0, 500).unwrap();
        for (n, v) in a.iter().enumerate() {
            let n = n as f64;
            let oracle = 72.0 / ((n + 9.0) * (n + 8.0));
            assert!((v - oracle).abs() < 1e-13 * oracle.max(1e-3), "n={n}");
            assert!(*v < 2.0 * 100.0 / ((n + 10.0) * (n + 10.0)));
        }
    }

    #[test]
    fn glue_examples() {
        let p = glue_profile_build(LogConvexFn::constant(1.0), 10.0, 5.0, 1.0, 0.5, 2.0).unwrap();
        assert_eq!(p.r_plus, 15.0);
        let p = glue_profile_build(LogConvexFn::power_decay(1.0), 10.0, 5.0, 1.0, 0.5, 2.0).unwrap();
        assert_abs_diff_eq!(p.r_plus, 5.0 + 30.0f64.sqrt(), epsilon = 1e-10);
        assert_eq!(p.h(p.r_plus), 1.0);
        assert_eq!(p.h(p.r_minus), p.peak());
        assert_eq!(p.peak(), 2.0f64.powf(10.0));
    }

    #[test]
    fn glue_profile_is_continuous_and_non_increasing() {
        let p = glue_profile_build(LogConvexFn::exp_decay(0.1, 0.5), 3.0, 4.0, 2.0, 0.7, 1.5).unwrap();
        let mut prev = f64::INFINITY;
        let mut t = 0.0;
        while t < 20.0 {
            let h = p.h(t);
            assert!(h > 0.0 && h <= prev + 1e-12);
            prev = h;
            t += 1e-3;
        }
        let eps = 1e-9;
        assert_abs_diff_eq!(p.h(p.r_minus - eps), p.h(p.r_minus), epsilon = 1e-6 * p.peak());
        assert_abs_diff_eq!(p.h(p.r_plus - eps), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn expansion_audit_examples() {
        let p = MapSpec::power(2).unwrap();
        let orbit = [c(2.0, 0.0), c(4.0, 0.0), c(16.0, 0.0)];
        let bound: Vec<f64> = (0..3).map(|n| 0.5f64.powi(n)).collect();
        let r = expansion_audit(&p, &MetricKind::Euclidean, &orbit, &bound).unwrap();
        assert_eq!(r.cumulative, [1.0, 4.0, 32.0]);
        assert!(r.passed());
        assert_eq!(r.min_margin, Some(2.0));

        let r = expansion_audit(&p, &MetricKind::Euclidean, &orbit[..1], &bound).unwrap();
        assert_eq!(r.cumulative, [1.0]);
        assert_eq!(r.min_margin, None);
        assert!(r.passed());
    }

    #[test]
    fn expansion_along_sine_petal_orbit() {
        let s = MapSpec::sine_newton();
        let mut orbit = alloc::vec![c(0.0, 30.0)];
        for _ in 0..10 {
            let z = *orbit.last().unwrap();
            orbit.push(s.eval_finite(z).unwrap());
        }
        let m = MetricKind::power_infinity(1.5).unwrap();
        let r = expansion_audit(&s, &m, &orbit, &[1.0; 11]).unwrap();
        assert!(r.per_step.iter().all(|&x| x > 1.0));
        assert!(r.passed());
    }

    #[test]
    fn expansion_audit_reports_domain_exit() {
        let s = MapSpec::sine_newton();
        let orbit = [c(FRAC_PI_2, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            expansion_audit(&s, &MetricKind::Spherical, &orbit, &[1.0, 1.0]),
            Err(MetricError::Domain { step: 0, .. })
        ));
    }
}
