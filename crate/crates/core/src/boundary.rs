//! Equipotential-style curves in an attracting basin: a round seed curve,
//! its iterated pullbacks `gamma_{n+1} = f^{-1}(gamma_n)`, transversal arcs
//! and spherical Cauchy moduli of the resulting sequence.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{BoundaryError, MapError};
use crate::exec::{Executor, Sequential};
use crate::maps::{classify_orbit, inverse_branch_step, MapSpec, Verdict};
use crate::metrics::sph_dist_c;

/// Largest admissible `|f(gamma_{n+1}(theta)) - gamma_n(d theta)|`.
pub const PULLBACK_TOL: f64 = 1e-9;

/// Hard cap on samples per level.
pub const MAX_SAMPLES: usize = 1 << 20;

const CLASSIFY_ITER: usize = 500;
const CLASSIFY_TOL: f64 = 1e-9;
const ESCAPE_RADIUS: f64 = 1e6;

fn solve_tol(target: Complex64) -> f64 {
    1e-12 * (1.0 + target.norm())
}

/// A sampled closed curve `theta -> z` with `theta` in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    pub level: usize,
    /// Covering degree of the basin map.
    pub degree: u32,
    /// The attracting point the curve surrounds.
    pub zeta: Complex64,
    /// Strictly increasing parameters starting at `theta = 0`.
    pub samples: Vec<(f64, Complex64)>,
}

impl ClosedCurve {
    pub fn new(level: usize, degree: u32, zeta: Complex64, samples: Vec<(f64, Complex64)>) -> Result<Self, BoundaryError> {
        let c = ClosedCurve {
            level,
            degree,
            zeta,
            samples,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), BoundaryError> {
        if self.samples.len() < 3 {
            return Err(BoundaryError::InvalidCurve("fewer than three samples"));
        }
        if self.degree < 2 {
            return Err(BoundaryError::InvalidCurve("covering degree must be at least 2"));
        }
        if self.samples[0].0 != 0.0 {
            return Err(BoundaryError::InvalidCurve("first parameter must be 0"));
        }
        if self.samples.windows(2).any(|w| !(w[1].0 > w[0].0)) || !(self.samples[self.samples.len() - 1].0 < 1.0) {
            return Err(BoundaryError::InvalidCurve("parameters must increase inside [0, 1)"));
        }
        if self.samples.iter().any(|(_, z)| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(BoundaryError::InvalidCurve("non-finite sample"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    /// Index of the last sample with parameter `<= theta` (after reduction mod 1).
    pub fn index_at(&self, theta: f64) -> usize {
        let t = wrap01(theta);
        self.samples.partition_point(|s| s.0 <= t).saturating_sub(1)
    }

    /// Index of the sample whose parameter is closest to `theta` on the circle.
    pub fn nearest_index(&self, theta: f64) -> usize {
        let t = wrap01(theta);
        let k = self.index_at(t);
        let n = self.samples.len();
        let next = (k + 1) % n;
        let t_next = if next == 0 { 1.0 } else { self.samples[next].0 };
        if t - self.samples[k].0 <= t_next - t {
            k
        } else {
            next
        }
    }

    /// Piecewise-linear interpolation in `theta`, wrapping at 1.
    pub fn interpolate(&self, theta: f64) -> Complex64 {
        let t = wrap01(theta);
        let k = self.index_at(t);
        let n = self.samples.len();
        let (t0, z0) = self.samples[k];
        let (t1, z1) = if k + 1 < n {
            self.samples[k + 1]
        } else {
            (1.0 + self.samples[0].0, self.samples[0].1)
        };
        if t1 <= t0 {
            return z0;
        }
        z0 + (z1 - z0) * ((t - t0) / (t1 - t0))
    }

    /// Winding number of the closed polygon about `w`.
    pub fn winding_number(&self, w: Complex64) -> i64 {
        let n = self.samples.len();
        let mut total = 0.0;
        for i in 0..n {
            let a = self.samples[i].1 - w;
            let b = self.samples[(i + 1) % n].1 - w;
            total += (b / a).arg();
        }
        (total / (2.0 * PI)).round() as i64
    }

    /// Euclidean distance from `p` to the closed polygon.
    pub fn min_distance_to(&self, p: Complex64) -> f64 {
        let n = self.samples.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            let a = self.samples[i].1;
            let b = self.samples[(i + 1) % n].1;
            best = best.min(segment_distance(p, a, b));
        }
        best
    }

    pub fn arc_length(&self) -> f64 {
        let n = self.samples.len();
        (0..n)
            .map(|i| (self.samples[(i + 1) % n].1 - self.samples[i].1).norm())
            .sum()
    }
}

fn wrap01(t: f64) -> f64 {
    let mut x = t % 1.0;
    if x < 0.0 {
        x += 1.0;
    }
    if x >= 1.0 {
        x = 0.0;
    }
    x
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Follow the branch of `f^{-1}` through `w0` along the straight path from
/// `f(w0)` to `target`, with predictor-corrector steps that shrink whenever
/// the corrector lands away from the prediction.
pub fn continue_branch(map: &MapSpec, w0: Complex64, target: Complex64) -> Result<Complex64, MapError> {
    let start = map.eval_finite(w0)?;
    let mut w = w0;
    let mut t = start;
    let mut s = 0.0f64;
    let mut h = 1.0f64;
    while s < 1.0 {
        let s_next = (s + h).min(1.0);
        let t_next = if s_next >= 1.0 {
            target
        } else {
            start + (target - start) * s_next
        };
        let d = map.derivative(w)?;
        if d.norm() == 0.0 {
            return Err(MapError::Singular(w));
        }
        let pred_step = (t_next - t) / d;
        let w_pred = w + pred_step;
        let accepted = match inverse_branch_step(map, t_next, w_pred, solve_tol(t_next)) {
            Ok(w_new) if (w_new - w_pred).norm() <= 0.25 * pred_step.norm() + 1e-13 * (1.0 + w.norm()) => Some(w_new),
            _ => None,
        };
        match accepted {
            Some(w_new) => {
                w = w_new;
                t = t_next;
                s = s_next;
                h = (2.0 * h).min(1.0);
            }
            None => {
                h *= 0.5;
                if h < 1e-12 {
                    return Err(MapError::NoConvergence {
                        target,
                        seed: w0,
                        residual: (t - target).norm(),
                    });
                }
            }
        }
    }
    Ok(w)
}

fn basin_index(map: &MapSpec, zeta: Complex64) -> Result<i64, BoundaryError> {
    map.attractors()
        .hit(zeta, 1e-9)
        .ok_or(BoundaryError::Seed("zeta is not a catalogued attracting point"))
}

fn in_basin(map: &MapSpec, z: Complex64, index: i64) -> bool {
    let att = map.attractors();
    classify_orbit(map, z, &att, CLASSIFY_ITER, CLASSIFY_TOL, ESCAPE_RADIUS).verdict == Verdict::Converged(index)
}

/// `gamma_0`: the circle of radius `r0` about `zeta`, uniformly sampled.
pub fn seed_curve(map: &MapSpec, zeta: Complex64, r0: f64, samples: usize) -> Result<ClosedCurve, BoundaryError> {
    if !(r0 > 0.0) || !(3..=MAX_SAMPLES).contains(&samples) {
        return Err(BoundaryError::Seed("need r0 > 0 and 3..=2^20 samples"));
    }
    let degree = map
        .basin_degree(zeta)
        .ok_or(BoundaryError::Seed("basin degree unknown for this point"))?;
    basin_index(map, zeta)?;
    if !map.poles_near(zeta, r0 * (1.0 + 1e-12)).is_empty() {
        return Err(BoundaryError::Seed("a pole lies in the seed disc"));
    }
    let mut pts = Vec::with_capacity(samples);
    for i in 0..samples {
        let theta = i as f64 / samples as f64;
        let z = circle_point(zeta, r0, theta);
        let fz = map.eval_finite(z).map_err(|_| BoundaryError::Seed("seed circle meets a pole"))?;
        if (fz - zeta).norm() >= r0 {
            return Err(BoundaryError::Seed("f does not map the seed disc into itself"));
        }
        pts.push((theta, z));
    }
    ClosedCurve::new(0, degree, zeta, pts)
}

fn circle_point(zeta: Complex64, r0: f64, theta: f64) -> Complex64 {
    let a = 2.0 * PI * theta;
    zeta + Complex64::new(r0 * a.cos(), r0 * a.sin())
}

/// Preimage of `gamma(0)` used to start the first pullback: the candidate
/// closest to `gamma(0)` among preimages in the basin and outside `gamma`;
/// ties go to larger imaginary part, then larger real part.
fn first_preimage(map: &MapSpec, gamma: &ClosedCurve) -> Result<Complex64, BoundaryError> {
    let index = basin_index(map, gamma.zeta)?;
    let target = gamma.samples[0].1;
    let reach = gamma.points().map(|z| (z - gamma.zeta).norm()).fold(0.0, f64::max);
    let spokes = 16 * gamma.degree as usize;
    let mut cands: Vec<Complex64> = Vec::new();
    for factor in [1.25, 1.5, 2.0, 2.5, 3.0] {
        for k in 0..spokes {
            let seed = circle_point(gamma.zeta, factor * reach, k as f64 / spokes as f64);
            let Ok(w) = inverse_branch_step(map, target, seed, solve_tol(target)) else {
                continue;
            };
            if cands.iter().any(|c| (c - w).norm() < 1e-8) {
                continue;
            }
            if gamma.winding_number(w) == 0 && in_basin(map, w, index) {
                cands.push(w);
            }
        }
    }
    let tie = 1e-9 * (1.0 + target.norm());
    cands
        .into_iter()
        .reduce(|best, c| {
            let (db, dc) = ((best - target).norm(), (c - target).norm());
            if dc < db - tie {
                c
            } else if dc > db + tie {
                best
            } else if (c.im, c.re) > (best.im, best.re) {
                c
            } else {
                best
            }
        })
        .ok_or(BoundaryError::Topology { level: gamma.level + 1, gap: f64::INFINITY })
}

/// Lift `gamma` (level `n`) to level `n+1`: one preimage for every
/// parameter `(theta_i + m)/d`, each solving `f(w) = gamma(theta_i)`.
///
/// At level 0 the starting preimage is chosen by proximity; afterwards the
/// branch through `gamma(0)` over `f(gamma(0))` is continued to `gamma(0)`.
pub fn pullback_curve(map: &MapSpec, gamma: &ClosedCurve) -> Result<ClosedCurve, BoundaryError> {
    gamma.validate()?;
    let level = gamma.level + 1;
    let n = gamma.len();
    let d = gamma.degree as usize;
    if n * d > MAX_SAMPLES {
        return Err(BoundaryError::InvalidCurve("lift exceeds the sample cap"));
    }
    let refine = |_| BoundaryError::Refine { level, samples: n };
    let z0 = gamma.samples[0].1;
    let w0 = if gamma.level == 0 {
        first_preimage(map, gamma)?
    } else {
        continue_branch(map, z0, z0).map_err(refine)?
    };
    let mut out = Vec::with_capacity(n * d);
    let mut w = w0;
    for m in 0..d {
        for (i, &(theta, z)) in gamma.samples.iter().enumerate() {
            if m > 0 || i > 0 {
                w = continue_branch(map, w, z).map_err(refine)?;
            }
            out.push(((theta + m as f64) / d as f64, w));
        }
    }
    let w_end = continue_branch(map, w, z0).map_err(refine)?;
    let gap = (w_end - w0).norm();
    if gap > 1e-8 * (1.0 + w0.norm()) {
        return Err(BoundaryError::Topology { level, gap });
    }
    ClosedCurve::new(level, gamma.degree, gamma.zeta, out)
}

/// `sup_theta sph_dist(gamma_a(theta), gamma_b(theta))`, evaluating `gamma_a`
/// by interpolation at the parameters of `gamma_b`.
pub fn cauchy_modulus(a: &ClosedCurve, b: &ClosedCurve) -> Result<f64, BoundaryError> {
    if b.level != a.level + 1 && b.level != a.level {
        return Err(BoundaryError::Alignment { a: a.level, b: b.level });
    }
    Ok(b.samples
        .iter()
        .map(|&(t, z)| sph_dist_c(a.interpolate(t), z))
        .fold(0.0, f64::max))
}

/// Bound on the lengths of the arcs joining `gamma_0(theta)` to `gamma_1(theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcBound {
    pub max_length: f64,
    /// Arcs that needed a two-segment detour.
    pub detours: usize,
    /// Arcs for which no tested path stayed in the basin.
    pub unresolved: usize,
}

fn path_in_basin(map: &MapSpec, pts: &[Complex64], index: i64) -> bool {
    pts.windows(2).all(|w| {
        [0.25, 0.5, 0.75]
            .iter()
            .all(|&s| in_basin(map, w[0] + (w[1] - w[0]) * s, index))
    })
}

fn arc_bound_from_pairs(map: &MapSpec, zeta: Complex64, pairs: &[(Complex64, Complex64)]) -> Result<ArcBound, BoundaryError> {
    let index = basin_index(map, zeta)?;
    let mut out = ArcBound {
        max_length: 0.0,
        detours: 0,
        unresolved: 0,
    };
    for &(a, b) in pairs {
        let len = (b - a).norm();
        if len == 0.0 {
            continue;
        }
        if path_in_basin(map, &[a, b], index) {
            out.max_length = out.max_length.max(len);
            continue;
        }
        let normal = Complex64::i() * (b - a) / len;
        let mut found = None;
        'search: for k in 1..=4 {
            for sign in [1.0, -1.0] {
                let mid = (a + b) * 0.5 + normal * (sign * k as f64 * len / 4.0);
                if path_in_basin(map, &[a, mid, b], index) {
                    found = Some((mid - a).norm() + (b - mid).norm());
                    break 'search;
                }
            }
        }
        match found {
            Some(l) => {
                out.detours += 1;
                out.max_length = out.max_length.max(l);
            }
            None => {
                out.unresolved += 1;
                out.max_length = out.max_length.max(len);
            }
        }
    }
    Ok(out)
}

/// Arcs `alpha_theta` from `gamma_0(theta)` to `gamma_1(theta)`: straight
/// segments, or a two-segment detour when a straight segment leaves the basin.
pub fn transversal_arcs(map: &MapSpec, g0: &ClosedCurve, g1: &ClosedCurve) -> Result<ArcBound, BoundaryError> {
    if g1.level != g0.level + 1 && g1.level != g0.level {
        return Err(BoundaryError::Alignment { a: g0.level, b: g1.level });
    }
    let pairs: Vec<_> = g1.samples.iter().map(|&(t, z)| (g0.interpolate(t), z)).collect();
    arc_bound_from_pairs(map, g0.zeta, &pairs)
}

/// Minimum distances from every level to one accessible pole.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleGaps {
    pub pole: Complex64,
    pub per_level: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    /// `sup_theta sph_dist(gamma_n(theta), gamma_{n+1}(theta))`, `n = 0..N-1`.
    pub cauchy_moduli: Vec<f64>,
    /// Consecutive quotients of the moduli.
    pub ratio_estimates: Vec<f64>,
    pub accessible_pole_gaps: Vec<PoleGaps>,
    pub alpha_max_length: f64,
    pub alpha_detours: usize,
    /// `max |f(gamma_{n+1}(theta)) - gamma_n(d theta)|` per pulled-back level.
    pub pullback_residuals: Vec<f64>,
    pub sample_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// `gamma_0 ..= gamma_N`.
    pub curves: Vec<ClosedCurve>,
    pub report: TraceReport,
}

impl Trace {
    pub fn final_curve(&self) -> &ClosedCurve {
        self.curves.last().expect("a trace holds at least the seed curve")
    }
}

/// Pointwise evaluation of a tower of pullback curves at arbitrary
/// parameters, exact up to solver tolerance.
pub struct CurveTower<'a> {
    map: &'a MapSpec,
    r0: f64,
    curves: &'a [ClosedCurve],
}

impl<'a> CurveTower<'a> {
    /// `curves[0]` must be a seed circle and `curves[n+1]` a pullback of `curves[n]`.
    pub fn new(map: &'a MapSpec, curves: &'a [ClosedCurve]) -> Result<Self, BoundaryError> {
        let first = curves.first().ok_or(BoundaryError::InvalidCurve("empty tower"))?;
        for (i, c) in curves.iter().enumerate() {
            if c.level != first.level + i {
                return Err(BoundaryError::Alignment { a: first.level + i, b: c.level });
            }
        }
        Ok(CurveTower {
            map,
            r0: (first.samples[0].1 - first.zeta).norm(),
            curves,
        })
    }

    /// `gamma_level(theta)`; the seed level is the analytic circle, higher
    /// levels continue from the nearest stored sample to the exact preimage
    /// of `gamma_{level-1}(d theta)`.
    pub fn eval(&self, level: usize, theta: f64) -> Result<Complex64, MapError> {
        self.eval_with(level, theta, None)
    }

    fn eval_with(&self, level: usize, theta: f64, top: Option<&ClosedCurve>) -> Result<Complex64, MapError> {
        let base = &self.curves[0];
        if level == 0 {
            return Ok(circle_point(base.zeta, self.r0, wrap01(theta)));
        }
        let d = base.degree as f64;
        let target = self.eval_with(level - 1, wrap01(d * wrap01(theta)), None)?;
        let curve = match top {
            Some(c) if c.level == level => c,
            _ => &self.curves[level],
        };
        let w0 = curve.samples[curve.nearest_index(theta)].1;
        continue_branch(self.map, w0, target)
    }
}

/// Parameters that split the curve into pieces of equal weight, where the
/// weight of a piece is half its share of arc length plus half its share of
/// parameter length.
fn equalized_parameters(curve: &ClosedCurve, count: usize) -> Vec<f64> {
    let n = curve.len();
    let total_len = curve.arc_length();
    let mut cum = Vec::with_capacity(n + 1);
    cum.push(0.0);
    let mut acc = 0.0;
    for i in 0..n {
        let (t0, z0) = curve.samples[i];
        let (t1, z1) = if i + 1 < n { curve.samples[i + 1] } else { (1.0, curve.samples[0].1) };
        let len_share = if total_len > 0.0 { (z1 - z0).norm() / total_len } else { 0.0 };
        acc += 0.5 * len_share + 0.5 * (t1 - t0);
        cum.push(acc);
    }
    let mut out = Vec::with_capacity(count);
    let mut j = 0;
    for k in 0..count {
        let s = acc * k as f64 / count as f64;
        while j + 1 < n && cum[j + 1] <= s {
            j += 1;
        }
        let t0 = curve.samples[j].0;
        let t1 = if j + 1 < n { curve.samples[j + 1].0 } else { 1.0 };
        let span = cum[j + 1] - cum[j];
        let frac = if span > 0.0 { (s - cum[j]) / span } else { 0.0 };
        let t = t0 + frac * (t1 - t0);
        if out.last().is_none_or(|&p| t > p) && t < 1.0 {
            out.push(t);
        }
    }
    out
}

/// Run `levels` pullbacks from a seed circle with `samples` points, keeping
/// `degree * samples` points per level after resampling, and collect the
/// convergence diagnostics.
pub fn trace_boundary(map: &MapSpec, zeta: Complex64, r0: f64, levels: usize, samples: usize) -> Result<Trace, BoundaryError> {
    trace_boundary_with(&Sequential, map, zeta, r0, levels, samples)
}

/// [`trace_boundary`] with the independent per-point work spread over `exec`.
pub fn trace_boundary_with<E: Executor>(
    exec: &E,
    map: &MapSpec,
    zeta: Complex64,
    r0: f64,
    levels: usize,
    samples: usize,
) -> Result<Trace, BoundaryError> {
    let seed = seed_curve(map, zeta, r0, samples)?;
    let d = seed.degree as usize;
    let budget = (d * samples).min(MAX_SAMPLES);
    let mut curves = alloc::vec![seed];
    for _ in 0..levels {
        let prev = curves.last().expect("seed present");
        let lifted = pullback_curve(map, prev)?;
        let next = if lifted.len() <= budget {
            lifted
        } else {
            let tower = CurveTower::new(map, &curves)?;
            let thetas = equalized_parameters(&lifted, budget);
            let level = lifted.level;
            let pts = exec.run(thetas.len(), |i| tower.eval_with(level, thetas[i], Some(&lifted)));
            let mut out = Vec::with_capacity(thetas.len());
            for (t, z) in thetas.iter().zip(pts) {
                out.push((*t, z.map_err(|_| BoundaryError::Refine { level, samples: budget })?));
            }
            ClosedCurve::new(level, lifted.degree, zeta, out)?
        };
        curves.push(next);
    }
    let report = diagnostics(exec, map, &curves)?;
    Ok(Trace { curves, report })
}

fn diagnostics<E: Executor>(exec: &E, map: &MapSpec, curves: &[ClosedCurve]) -> Result<TraceReport, BoundaryError> {
    let tower = CurveTower::new(map, curves)?;
    let d = curves[0].degree as f64;
    let zeta = curves[0].zeta;
    let mut cauchy_moduli = Vec::new();
    let mut pullback_residuals = Vec::new();
    for n in 0..curves.len() - 1 {
        let upper = &curves[n + 1];
        let per_point = exec.run(upper.len(), |i| -> Result<(f64, f64), MapError> {
            let (t, z) = upper.samples[i];
            let below_same = tower.eval(n, t)?;
            let below_image = tower.eval(n, wrap01(d * t))?;
            let fz = map.eval_finite(z)?;
            Ok((sph_dist_c(below_same, z), (fz - below_image).norm()))
        });
        let mut m = 0.0f64;
        let mut r = 0.0f64;
        for v in per_point {
            let (a, b) = v.map_err(|_| BoundaryError::Refine {
                level: n + 1,
                samples: upper.len(),
            })?;
            m = m.max(a);
            r = r.max(b);
        }
        cauchy_moduli.push(m);
        pullback_residuals.push(r);
    }
    let ratio_estimates = cauchy_moduli.windows(2).map(|w| w[1] / w[0]).collect();
    let accessible_pole_gaps = map
        .accessible_poles(zeta)
        .into_iter()
        .map(|pole| PoleGaps {
            pole,
            per_level: curves.iter().map(|c| c.min_distance_to(pole)).collect(),
        })
        .collect();
    let (alpha_max_length, alpha_detours) = if curves.len() >= 2 {
        let g1 = &curves[1];
        let pairs = exec
            .run(g1.len(), |i| {
                let (t, z) = g1.samples[i];
                tower.eval(0, t).map(|a| (a, z))
            })
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        let b = arc_bound_from_pairs(map, zeta, &pairs)?;
        (b.max_length, b.detours)
    } else {
        (0.0, 0)
    };
    Ok(TraceReport {
        cauchy_moduli,
        ratio_estimates,
        accessible_pole_gaps,
        alpha_max_length,
        alpha_detours,
        pullback_residuals,
        sample_counts: curves.iter().map(|c| c.len()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zero() -> Complex64 {
        c(0.0, 0.0)
    }

    #[test]
    fn seed_examples() {
        let s = MapSpec::sine_newton();
        let g = seed_curve(&s, zero(), 0.5, 64).unwrap();
        assert_eq!(g.degree, 3);
        let worst = g.points().map(|z| s.eval_finite(z).unwrap().norm()).fold(0.0, f64::max);
        assert!(worst < 0.05 && worst > 0.04, "{worst}");
        assert!(matches!(seed_curve(&s, zero(), 1.6, 64), Err(BoundaryError::Seed(_))));

        let p = MapSpec::power(2).unwrap();
        let g = seed_curve(&p, zero(), 0.5, 32).unwrap();
        for z in g.points() {
            assert_abs_diff_eq!(p.eval_finite(z).unwrap().norm(), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn power_pullback_is_square_root() {
        let p = MapSpec::power(2).unwrap();
        let g0 = seed_curve(&p, zero(), 0.25, 64).unwrap();
        let g1 = pullback_curve(&p, &g0).unwrap();
        assert_eq!(g1.len(), 128);
        assert_eq!(g1.level, 1);
        for &(t, z) in &g1.samples {
            assert_abs_diff_eq!((z - circle_point(zero(), 0.5, t)).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cauchy_modulus_examples() {
        let p = MapSpec::power(2).unwrap();
        let g0 = seed_curve(&p, zero(), 0.5, 64).unwrap();
        let g1 = pullback_curve(&p, &g0).unwrap();
        let m = cauchy_modulus(&g0, &g1).unwrap();
        // same-ray distance between radii 0.5 and sqrt(0.5)
        let oracle = 2.0 * (0.5f64.sqrt().atan() - 0.5f64.atan());
        assert_abs_diff_eq!(m, oracle, epsilon = 2e-3);
        assert_eq!(cauchy_modulus(&g0, &g0).unwrap(), 0.0);
        let mut g2 = g1.clone();
        g2.level = 2;
        assert!(matches!(cauchy_modulus(&g0, &g2), Err(BoundaryError::Alignment { .. })));
    }

    #[test]
    fn transversal_examples() {
        let p = MapSpec::power(2).unwrap();
        let g0 = seed_curve(&p, zero(), 0.25, 256).unwrap();
        let g1 = pullback_curve(&p, &g0).unwrap();
        let b = transversal_arcs(&p, &g0, &g1).unwrap();
        assert_abs_diff_eq!(b.max_length, 0.25, epsilon = 0.25 * (1.0 - (PI / 256.0).cos()) + 1e-12);
        assert_eq!(b.detours, 0);
        assert_eq!(transversal_arcs(&p, &g0, &g0).unwrap().max_length, 0.0);
    }

    #[test]
    fn trace_with_no_levels_is_the_seed() {
        let s = MapSpec::sine_newton();
        let t = trace_boundary(&s, zero(), 0.5, 0, 64).unwrap();
        assert_eq!(t.curves.len(), 1);
        assert!(t.report.cauchy_moduli.is_empty());
        assert_eq!(t.final_curve(), &seed_curve(&s, zero(), 0.5, 64).unwrap());
    }

    #[test]
    fn sine_first_pullback() {
        let s = MapSpec::sine_newton();
        let g0 = seed_curve(&s, zero(), 0.5, 256).unwrap();
        let g1 = pullback_curve(&s, &g0).unwrap();
        assert_eq!(g1.len(), 3 * 256);
        // tie between conjugate preimages goes to the upper one
        assert!(g1.samples[0].1.im > 0.0);
        let p0 = c(PI / 2.0, 0.0);
        assert!(g1.min_distance_to(p0) < g0.min_distance_to(p0));
        for z in g1.points() {
            assert!(g0.winding_number(z) == 0);
        }
        assert_eq!(g1.winding_number(zero()), 1);
    }

    #[test]
    fn continuation_stays_on_branch() {
        let p = MapSpec::power(2).unwrap();
        // from sqrt(0.25)=0.5, move the target around the circle half way
        let w = continue_branch(&p, c(0.5, 0.0), c(0.0, 0.25)).unwrap();
        assert_abs_diff_eq!((w - Complex64::from_polar(0.5, PI / 4.0)).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn equalized_parameters_start_at_zero_and_increase() {
        let p = MapSpec::power(2).unwrap();
        let g = seed_curve(&p, zero(), 0.5, 100).unwrap();
        let t = equalized_parameters(&g, 40);
        assert_eq!(t[0], 0.0);
        assert_eq!(t.len(), 40);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert_abs_diff_eq!(t[20], 0.5, epsilon = 1e-12);
    }
}
