//! Catalog of meromorphic maps, their derivatives, special points and
//! inverse-branch continuation.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::MapError;

/// Distance under which a point is identified with a pole.
pub const POLE_RADIUS: f64 = 1e-9;

/// Iteration cap for [`inverse_branch_step`].
pub const MAX_NEWTON_STEPS: usize = 200;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtPoint::Finite(z) => Some(z),
            ExtPoint::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtPoint::Infinity)
    }
}

impl From<Complex64> for ExtPoint {
    fn from(z: Complex64) -> Self {
        ExtPoint::Finite(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapId {
    /// `z - tan z`, Newton's method for `sin z`.
    SineNewton,
    /// `(z - 1) / (1 + e^{-z})`, Newton's method for `z + e^z`.
    ExpNewton,
    /// `z + z^2`, parabolic fixed point at the origin.
    ParabolicQuad,
    /// `z^d` with `d >= 2`.
    PowerD(u32),
}

impl MapId {
    pub fn name(self) -> &'static str {
        match self {
            MapId::SineNewton => "sine_newton",
            MapId::ExpNewton => "exp_newton",
            MapId::ParabolicQuad => "parabolic_quad",
            MapId::PowerD(_) => "power_d",
        }
    }
}

impl fmt::Display for MapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapId::PowerD(d) => write!(f, "power_d(d={d})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Which finite points count as attracting limits when classifying orbits.
#[derive(Debug, Clone, PartialEq)]
pub enum AttractorSet {
    /// `origin + k * step` for every integer `k`; the verdict index is `k`.
    Lattice { origin: Complex64, step: Complex64 },
    /// An explicit list; the verdict index is the list position.
    List(Vec<Complex64>),
}

impl AttractorSet {
    /// Index of the attractor within `tol` of `z`, if any.
    pub fn hit(&self, z: Complex64, tol: f64) -> Option<i64> {
        match self {
            AttractorSet::Lattice { origin, step } => {
                let t = (z - origin) / step;
                let k = t.re.round();
                let p = origin + step * k;
                ((z - p).norm() < tol).then_some(k as i64)
            }
            AttractorSet::List(points) => points
                .iter()
                .position(|p| (z - p).norm() < tol)
                .map(|i| i as i64),
        }
    }

    /// Position of the attractor with the given index.
    pub fn point(&self, index: i64) -> Option<Complex64> {
        match self {
            AttractorSet::Lattice { origin, step } => Some(origin + step * index as f64),
            AttractorSet::List(points) => usize::try_from(index).ok().and_then(|i| points.get(i).copied()),
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, AttractorSet::List(p) if p.is_empty())
    }
}

/// An immutable catalog entry; all methods are pure.
#[derive(Debug, Clone, PartialEq)]
pub struct MapSpec {
    id: MapId,
}

impl MapSpec {
    pub fn new(id: MapId) -> Result<Self, MapError> {
        if let MapId::PowerD(d) = id {
            if d < 2 {
                return Err(MapError::InvalidParameter("power_d requires d >= 2"));
            }
        }
        Ok(MapSpec { id })
    }

    pub fn sine_newton() -> Self {
        MapSpec { id: MapId::SineNewton }
    }

    pub fn exp_newton() -> Self {
        MapSpec { id: MapId::ExpNewton }
    }

    pub fn parabolic_quad() -> Self {
        MapSpec { id: MapId::ParabolicQuad }
    }

    pub fn power(d: u32) -> Result<Self, MapError> {
        Self::new(MapId::PowerD(d))
    }

    /// Look a map up by its catalog id (`sine_newton`, `exp_newton`,
    /// `parabolic_quad`, `power_d`). `degree` only applies to `power_d`
    /// and defaults to 2.
    pub fn from_name(name: &str, degree: Option<u32>) -> Result<Self, MapError> {
        match name {
            "sine_newton" => Ok(Self::sine_newton()),
            "exp_newton" => Ok(Self::exp_newton()),
            "parabolic_quad" => Ok(Self::parabolic_quad()),
            "power_d" => Self::power(degree.unwrap_or(2)),
            _ => Err(MapError::UnknownMap),
        }
    }

    pub fn id(&self) -> MapId {
        self.id
    }

    /// Real and complex constants of the map.
    pub fn parameters(&self) -> Vec<Complex64> {
        match self.id {
            MapId::PowerD(d) => alloc::vec![Complex64::new(d as f64, 0.0)],
            _ => Vec::new(),
        }
    }

    /// `tau` with `f(z + tau) = f(z) + tau`, when the map has one.
    pub fn period_translation(&self) -> Option<Complex64> {
        match self.id {
            MapId::SineNewton => Some(Complex64::new(PI, 0.0)),
            _ => None,
        }
    }

    /// The `k`-th pole, for maps with poles.
    pub fn pole(&self, k: i64) -> Option<Complex64> {
        match self.id {
            MapId::SineNewton => Some(Complex64::new(FRAC_PI_2 + k as f64 * PI, 0.0)),
            MapId::ExpNewton => Some(Complex64::new(0.0, PI * (2 * k + 1) as f64)),
            _ => None,
        }
    }

    /// Index of the pole closest to `z`.
    pub fn nearest_pole_index(&self, z: Complex64) -> Option<i64> {
        match self.id {
            MapId::SineNewton => Some(((z.re - FRAC_PI_2) / PI).round() as i64),
            MapId::ExpNewton => Some(((z.im / PI - 1.0) / 2.0).round() as i64),
            _ => None,
        }
    }

    pub fn nearest_pole(&self, z: Complex64) -> Option<Complex64> {
        self.nearest_pole_index(z).and_then(|k| self.pole(k))
    }

    /// Poles with `|p - z| < radius`.
    pub fn poles_near(&self, z: Complex64, radius: f64) -> Vec<Complex64> {
        let spacing = match self.id {
            MapId::SineNewton => PI,
            MapId::ExpNewton => 2.0 * PI,
            _ => return Vec::new(),
        };
        let Some(k0) = self.nearest_pole_index(z) else {
            return Vec::new();
        };
        let span = (radius / spacing).ceil() as i64 + 1;
        (k0 - span..=k0 + span)
            .filter_map(|k| self.pole(k))
            .filter(|p| (p - z).norm() < radius)
            .collect()
    }

    /// Distance from `z` to the nearest pole (infinite for entire maps).
    pub fn pole_distance(&self, z: Complex64) -> f64 {
        self.nearest_pole(z).map_or(f64::INFINITY, |p| (z - p).norm())
    }

    pub fn is_pole(&self, z: Complex64) -> bool {
        self.pole_distance(z) < POLE_RADIUS
    }

    /// The `k`-th critical point, where the catalog knows them in closed form.
    pub fn critical_point(&self, k: i64) -> Option<Complex64> {
        match self.id {
            MapId::SineNewton => Some(Complex64::new(k as f64 * PI, 0.0)),
            MapId::ParabolicQuad if k == 0 => Some(Complex64::new(-0.5, 0.0)),
            MapId::PowerD(_) if k == 0 => Some(Complex64::new(0.0, 0.0)),
            _ => None,
        }
    }

    /// Finite attracting fixed points used for basin classification.
    pub fn attractors(&self) -> AttractorSet {
        match self.id {
            MapId::SineNewton => AttractorSet::Lattice {
                origin: Complex64::new(0.0, 0.0),
                step: Complex64::new(PI, 0.0),
            },
            MapId::ExpNewton => AttractorSet::List(exp_newton_roots(6)),
            MapId::ParabolicQuad => AttractorSet::List(alloc::vec![Complex64::new(0.0, 0.0)]),
            MapId::PowerD(_) => AttractorSet::List(alloc::vec![Complex64::new(0.0, 0.0)]),
        }
    }

    /// Degree of `f` on the immediate basin of the superattracting point `zeta`.
    pub fn basin_degree(&self, zeta: Complex64) -> Option<u32> {
        match self.id {
            MapId::SineNewton => {
                let k = (zeta.re / PI).round();
                ((zeta - Complex64::new(k * PI, 0.0)).norm() < 1e-12).then_some(3)
            }
            MapId::PowerD(d) => (zeta.norm() < 1e-12).then_some(d),
            _ => None,
        }
    }

    /// Poles on the boundary of the immediate basin of `zeta` that are
    /// accessible from inside it.
    pub fn accessible_poles(&self, zeta: Complex64) -> Vec<Complex64> {
        match self.id {
            MapId::SineNewton => {
                let k = (zeta.re / PI).round() as i64;
                [k - 1, k].iter().filter_map(|&j| self.pole(j)).collect()
            }
            _ => Vec::new(),
        }
    }

    /// `f(z)`, or [`ExtPoint::Infinity`] within [`POLE_RADIUS`] of a pole.
    pub fn eval(&self, z: Complex64) -> Result<ExtPoint, MapError> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(MapError::NonFinite(z));
        }
        if self.is_pole(z) {
            return Ok(ExtPoint::Infinity);
        }
        let w = match self.id {
            MapId::SineNewton => z - tan_stable(z),
            MapId::ExpNewton => {
                if z.re >= 0.0 {
                    (z - 1.0) / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    (z - 1.0) * e / (e + 1.0)
                }
            }
            MapId::ParabolicQuad => z + z * z,
            MapId::PowerD(d) => z.powu(d),
        };
        if w.re.is_finite() && w.im.is_finite() {
            Ok(ExtPoint::Finite(w))
        } else {
            Ok(ExtPoint::Infinity)
        }
    }

    /// `f(z)` as a finite value; poles are reported as errors.
    pub fn eval_finite(&self, z: Complex64) -> Result<Complex64, MapError> {
        match self.eval(z)? {
            ExtPoint::Finite(w) => Ok(w),
            ExtPoint::Infinity => Err(MapError::Pole {
                z,
                pole: self.nearest_pole(z).unwrap_or(z),
            }),
        }
    }

    /// `f'(z)` in closed form.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64, MapError> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(MapError::NonFinite(z));
        }
        if let Some(p) = self.nearest_pole(z) {
            if (z - p).norm() < POLE_RADIUS {
                return Err(MapError::Pole { z, pole: p });
            }
        }
        let d = match self.id {
            MapId::SineNewton => {
                let t = tan_stable(z);
                -(t * t)
            }
            MapId::ExpNewton => {
                if z.re >= 0.0 {
                    let e = (-z).exp();
                    let den = 1.0 + e;
                    (1.0 + z * e) / (den * den)
                } else {
                    let e = z.exp();
                    let den = e + 1.0;
                    (e * e + z * e) / (den * den)
                }
            }
            MapId::ParabolicQuad => 1.0 + 2.0 * z,
            MapId::PowerD(d) => z.powu(d - 1) * d as f64,
        };
        Ok(d)
    }
}

/// `tan z` without overflow for large `|Im z|`.
///
/// Uses `tan w = i (1 - q) / (1 + q)` with `q = e^{2iw}` in the upper half
/// plane and the mirrored form with `q = e^{-2iw}` in the lower one, so
/// `|q| <= 1` always. The real part is first reduced modulo `pi`.
pub fn tan_stable(z: Complex64) -> Complex64 {
    let k = (z.re / PI).round();
    let w = Complex64::new(z.re - k * PI, z.im);
    let i = Complex64::i();
    if w.im >= 0.0 {
        let q = (i * w * 2.0).exp();
        i * (1.0 - q) / (1.0 + q)
    } else {
        let q = (-i * w * 2.0).exp();
        -i * (1.0 - q) / (1.0 + q)
    }
}

/// Roots of `z + e^z` near the origin, i.e. the superattracting fixed
/// points of the exponential Newton map, ordered by increasing `|Im|`.
fn exp_newton_roots(branches: i64) -> Vec<Complex64> {
    let mut roots = Vec::new();
    for k in 0..=branches {
        for sign in [1.0, -1.0] {
            if k == 0 && sign < 0.0 {
                continue;
            }
            // z = -W_k(1); asymptotically z ~ -ln(2 pi k) + i (2 pi k - pi/2) up to sign
            let mut z = if k == 0 {
                Complex64::new(-0.5, 0.0)
            } else {
                let y = sign * (2.0 * PI * k as f64 - FRAC_PI_2);
                Complex64::new(-(2.0 * PI * k as f64).ln(), y)
            };
            for _ in 0..60 {
                let e = z.exp();
                let step = (z + e) / (1.0 + e);
                z -= step;
                if step.norm() < 1e-15 {
                    break;
                }
            }
            if !roots.iter().any(|r: &Complex64| (r - z).norm() < 1e-8) {
                roots.push(z);
            }
        }
    }
    roots
}

/// Solve `f(w) = target` by damped Newton iteration from `seed`.
///
/// Every step is capped at half the distance to the nearest pole, so the
/// iteration cannot jump across a pole onto another branch.
pub fn inverse_branch_step(
    map: &MapSpec,
    target: Complex64,
    seed: Complex64,
    tol: f64,
) -> Result<Complex64, MapError> {
    if !target.re.is_finite() || !target.im.is_finite() {
        return Err(MapError::NonFinite(target));
    }
    let mut w = seed;
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_NEWTON_STEPS {
        let fw = map.eval_finite(w).map_err(|_| MapError::NoConvergence {
            target,
            seed,
            residual,
        })?;
        let r = fw - target;
        residual = r.norm();
        if residual < tol {
            return Ok(w);
        }
        let dw = map.derivative(w)?;
        if dw.norm() == 0.0 {
            return Err(MapError::Singular(w));
        }
        let mut step = r / dw;
        let cap = 0.5 * map.pole_distance(w);
        let len = step.norm();
        if len > cap {
            step *= cap / len;
        }
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        w -= step;
    }
    Err(MapError::NoConvergence {
        target,
        seed,
        residual,
    })
}

/// Verdict of [`classify_orbit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Converged(i64),
    Escaped,
    Prepole(usize),
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitResult {
    pub verdict: Verdict,
    pub steps_used: usize,
    pub final_point: Complex64,
}

/// Iterate `f` from `z0` and decide where the orbit goes.
///
/// Convergence requires two consecutive iterates within `tol` of the same
/// attractor. Escape is measured by `|Im z|` for maps with a translation
/// symmetry and by `|z|` otherwise, and only counts while it grows.
pub fn classify_orbit(
    map: &MapSpec,
    z0: Complex64,
    attractors: &AttractorSet,
    max_iter: usize,
    tol: f64,
    escape_radius: f64,
) -> OrbitResult {
    let size = |z: Complex64| {
        if map.period_translation().is_some() {
            z.im.abs()
        } else {
            z.norm()
        }
    };
    let mut z = z0;
    let mut last_hit: Option<i64> = None;
    let mut last_size = size(z0);
    for step in 0..=max_iter {
        if map.is_pole(z) {
            return OrbitResult {
                verdict: Verdict::Prepole(step),
                steps_used: step,
                final_point: z,
            };
        }
        let hit = attractors.hit(z, tol);
        if hit.is_some() && hit == last_hit {
            return OrbitResult {
                verdict: Verdict::Converged(hit.unwrap_or_default()),
                steps_used: step,
                final_point: z,
            };
        }
        last_hit = hit;
        let s = size(z);
        if step > 0 && s > escape_radius && s > last_size {
            return OrbitResult {
                verdict: Verdict::Escaped,
                steps_used: step,
                final_point: z,
            };
        }
        last_size = s;
        if step == max_iter {
            break;
        }
        match map.eval(z) {
            Ok(ExtPoint::Finite(w)) => z = w,
            _ => {
                return OrbitResult {
                    verdict: Verdict::Undecided,
                    steps_used: step,
                    final_point: z,
                }
            }
        }
    }
    OrbitResult {
        verdict: Verdict::Undecided,
        steps_used: max_iter,
        final_point: z,
    }
}

/// Check `f(z + tau) = f(z) + tau` on every sample.
pub fn translation_check(map: &MapSpec, samples: &[Complex64], tol: f64) -> Result<bool, MapError> {
    let tau = map
        .period_translation()
        .ok_or(MapError::Unsupported(map.id().name()))?;
    for &z in samples {
        let a = map.eval_finite(z + tau)?;
        let b = map.eval_finite(z)?;
        if (a - b - tau).norm() >= tol {
            return Ok(false);
        }
    }
    Ok(true)
}
