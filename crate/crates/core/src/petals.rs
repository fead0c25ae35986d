//! Sector geometry and sampling audits of petals at parabolic points and
//! at infinity.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{MapError, PetalError};
use crate::maps::{inverse_branch_step, ExtPoint, MapId, MapSpec};
use crate::metrics::LogConvexFn;

/// Signed difference `a - b` reduced to `[-pi, pi)`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let mut x = (a - b + PI) % (2.0 * PI);
    if x < 0.0 {
        x += 2.0 * PI;
    }
    x - PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SectorKind {
    /// `U_j(eps, delta)` at a finite point `p`.
    AtPoint { p: Complex64, eps: f64 },
    /// `V_j(r, delta)` at infinity.
    AtInfinity { r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSpec {
    pub kind: SectorKind,
    pub j: i64,
    pub d: u32,
    pub a: Complex64,
    pub delta: f64,
}

impl SectorSpec {
    pub fn new(kind: SectorKind, j: i64, d: u32, a: Complex64, delta: f64) -> Result<Self, PetalError> {
        let s = SectorSpec { kind, j, d, a, delta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), PetalError> {
        if self.d == 0 {
            return Err(PetalError::InvalidParameter("sector order d must be at least 1"));
        }
        if self.a.norm() == 0.0 || !self.a.norm().is_finite() {
            return Err(PetalError::InvalidParameter("sector coefficient a must be non-zero"));
        }
        if !(self.delta > 0.0 && self.delta < PI / self.d as f64) {
            return Err(PetalError::InvalidParameter("sector half-angle must lie in (0, pi/d)"));
        }
        match self.kind {
            SectorKind::AtPoint { eps, .. } if !(eps > 0.0) => {
                Err(PetalError::InvalidParameter("sector radius must be positive"))
            }
            SectorKind::AtInfinity { r } if !(r >= 0.0) => {
                Err(PetalError::InvalidParameter("sector radius must be non-negative"))
            }
            _ => Ok(()),
        }
    }

    /// Direction of the sector axis.
    pub fn center_angle(&self) -> f64 {
        let d = self.d as f64;
        let j = self.j as f64;
        match self.kind {
            SectorKind::AtPoint { .. } => (-self.a.arg() + PI * j) / d,
            SectorKind::AtInfinity { .. } => (self.a.arg() + PI * j) / d,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let (v, inside) = match self.kind {
            SectorKind::AtPoint { p, eps } => {
                let v = z - p;
                let r = v.norm();
                (v, r > 0.0 && r < eps)
            }
            SectorKind::AtInfinity { r } => (z, z.norm() > r),
        };
        inside && angle_diff(v.arg(), self.center_angle()).abs() < self.delta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionAngle {
    pub j: u32,
    pub theta: f64,
    /// Odd `j` are attracting directions, even `j` repelling.
    pub attracting: bool,
}

/// The `2d` directions `theta_j = (-Arg a + pi j) / d` at a parabolic point
/// of `z + a (z-p)^{d+1} + ...`.
pub fn parabolic_direction_angles(d: u32, a: Complex64) -> Result<Vec<DirectionAngle>, PetalError> {
    if d == 0 || a.norm() == 0.0 {
        return Err(PetalError::InvalidParameter("need d >= 1 and a != 0"));
    }
    Ok((0..2 * d)
        .map(|j| DirectionAngle {
            j,
            theta: (-a.arg() + PI * j as f64) / d as f64,
            attracting: j % 2 == 1,
        })
        .collect())
}

/// Residuals of `f(z) = z + a/z^{d-1} + o(|z|^{1-d})` on the sector arc at
/// two radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticResidual {
    pub radius: f64,
    pub at_r: f64,
    pub at_2r: f64,
}

impl AsymptoticResidual {
    pub fn worst(&self) -> f64 {
        self.at_r.max(self.at_2r)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.at_r < tol && self.at_2r <= self.at_r.max(tol)
    }
}

/// Directions along which the poles of `map` accumulate at infinity.
fn pole_rays(map: &MapSpec) -> &'static [f64] {
    match map.id() {
        MapId::SineNewton => &[0.0, PI],
        MapId::ExpNewton => &[FRAC_PI_2, -FRAC_PI_2],
        _ => &[],
    }
}

/// Worst residual `|f(z) - z - a/z^{d-1}| |z|^{d-1}` over `samples` points of
/// the open sector arc, at the sector radius and at twice that radius.
pub fn asymptotic_form_check(
    map: &MapSpec,
    sector: &SectorSpec,
    d: u32,
    a: Complex64,
    samples: usize,
) -> Result<AsymptoticResidual, PetalError> {
    sector.validate()?;
    let SectorKind::AtInfinity { r } = sector.kind else {
        return Err(PetalError::Unsupported("asymptotic form is checked at infinity only"));
    };
    if d == 0 || samples == 0 || !(r > 0.0) {
        return Err(PetalError::InvalidParameter("need d >= 1, samples >= 1, r > 0"));
    }
    let center = sector.center_angle();
    for &ray in pole_rays(map) {
        if angle_diff(ray, center).abs() <= sector.delta {
            let pole = map
                .poles_near(Complex64::from_polar(2.0 * r, ray), 2.0 * PI + 1.0)
                .into_iter()
                .next()
                .unwrap_or(Complex64::from_polar(r, ray));
            return Err(PetalError::PoleInSector(pole));
        }
    }
    let residual_at = |radius: f64| -> Result<f64, PetalError> {
        let mut worst = 0.0f64;
        for i in 0..samples {
            let s = -1.0 + 2.0 * (i as f64 + 0.5) / samples as f64;
            let z = Complex64::from_polar(radius, center + s * sector.delta);
            let fz = match map.eval(z)? {
                ExtPoint::Finite(w) => w,
                ExtPoint::Infinity => return Err(PetalError::PoleInSector(z)),
            };
            let scale = radius.powi(d as i32 - 1);
            let model = z + a / z.powu(d - 1);
            worst = worst.max((fz - model).norm() * scale);
        }
        Ok(worst)
    };
    Ok(AsymptoticResidual {
        radius: r,
        at_r: residual_at(r)?,
        at_2r: residual_at(2.0 * r)?,
    })
}

/// An inverse branch `G` of the map on a petal.
pub trait InverseMap {
    fn apply(&self, z: Complex64) -> Result<Complex64, MapError>;
}

impl<F> InverseMap for F
where
    F: Fn(Complex64) -> Result<Complex64, MapError>,
{
    fn apply(&self, z: Complex64) -> Result<Complex64, MapError> {
        self(z)
    }
}

/// `G(z)` solves `f(w) = z` by Newton iteration seeded at `z + shift`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonInverse {
    pub map: MapSpec,
    pub shift: Complex64,
    pub tol: f64,
}

impl NewtonInverse {
    /// Inverse of `z - tan z` on the upper petal, `G(z) ~ z + i`.
    pub fn sine_upper() -> Self {
        NewtonInverse {
            map: MapSpec::sine_newton(),
            shift: Complex64::i(),
            tol: 1e-13,
        }
    }

    /// Inverse of `z - tan z` on the lower petal, `G(z) ~ z - i`.
    pub fn sine_lower() -> Self {
        NewtonInverse {
            map: MapSpec::sine_newton(),
            shift: -Complex64::i(),
            tol: 1e-13,
        }
    }
}

impl InverseMap for NewtonInverse {
    fn apply(&self, z: Complex64) -> Result<Complex64, MapError> {
        // relative tolerance: absolute accuracy is limited by |z| at large height
        let tol = self.tol * (1.0 + z.norm());
        inverse_branch_step(&self.map, z, z + self.shift, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PetalKind {
    Parabolic { p: Complex64, d: u32, a: Complex64 },
    Infinity { g: LogConvexFn, delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PetalRegion {
    /// `Im z > m`
    HalfPlaneAbove(f64),
    /// `Im z < -m`
    HalfPlaneBelow(f64),
    /// `Re z > r`
    HalfPlaneRight(f64),
    Sector(SectorSpec),
}

impl PetalRegion {
    pub fn contains(&self, z: Complex64) -> bool {
        match *self {
            PetalRegion::HalfPlaneAbove(m) => z.im > m,
            PetalRegion::HalfPlaneBelow(m) => z.im < -m,
            PetalRegion::HalfPlaneRight(r) => z.re > r,
            PetalRegion::Sector(s) => s.contains(z),
        }
    }
}

/// Axis-aligned box from which audit orbits start.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleBox {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl SampleBox {
    /// `n` starting points on a near-square grid, row by row.
    pub fn grid(&self, n: usize) -> Vec<Complex64> {
        if n == 0 {
            return Vec::new();
        }
        let nx = (n as f64).sqrt().ceil() as usize;
        let ny = n.div_ceil(nx);
        let mut out = Vec::with_capacity(n);
        for iy in 0..ny {
            for ix in 0..nx {
                if out.len() == n {
                    return out;
                }
                let fx = if nx == 1 { 0.5 } else { ix as f64 / (nx - 1) as f64 };
                let fy = if ny == 1 { 0.5 } else { iy as f64 / (ny - 1) as f64 };
                out.push(Complex64::new(
                    self.re.0 + fx * (self.re.1 - self.re.0),
                    self.im.0 + fy * (self.im.1 - self.im.0),
                ));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PetalSpec {
    pub kind: PetalKind,
    pub region: PetalRegion,
    pub samples: SampleBox,
}

impl PetalSpec {
    /// Upper petal `Im z > m` of `z - tan z` with gauge `g = 1`.
    pub fn sine_upper(m: f64) -> Self {
        PetalSpec {
            kind: PetalKind::Infinity {
                g: LogConvexFn::constant(1.0),
                delta: PI / 3.0,
            },
            region: PetalRegion::HalfPlaneAbove(m),
            samples: SampleBox {
                re: (-FRAC_PI_2, FRAC_PI_2),
                im: (m + 1.0, m + 2.0),
            },
        }
    }

    /// Lower petal `Im z < -m` of `z - tan z` with gauge `g = 1`.
    pub fn sine_lower(m: f64) -> Self {
        PetalSpec {
            kind: PetalKind::Infinity {
                g: LogConvexFn::constant(1.0),
                delta: PI / 3.0,
            },
            region: PetalRegion::HalfPlaneBelow(m),
            samples: SampleBox {
                re: (-FRAC_PI_2, FRAC_PI_2),
                im: (-m - 2.0, -m - 1.0),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditConfig {
    pub sample_orbits: usize,
    /// Recorded steps per orbit.
    pub steps: usize,
    /// Unrecorded steps applied first (the `n_0` of the petal definition).
    pub burn_in: usize,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            sample_orbits: 64,
            steps: 200,
            burn_in: 2000,
        }
    }
}

/// Statistics of one audited orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitAudit {
    pub start: Complex64,
    pub samples: usize,
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
    pub worst_point: Complex64,
    pub modulus_increasing: bool,
    pub max_modulus_gain: f64,
    pub max_displacement_ratio: f64,
    pub max_ladder_crossings: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PetalReport {
    pub passed: bool,
    pub c1_hat: f64,
    pub c2_hat: f64,
    pub delta_hat: f64,
    pub delta_bound: f64,
    pub samples_tested: usize,
    pub worst_point: Complex64,
    /// `|G^n(z)|` increased along every recorded step.
    pub modulus_increasing: bool,
    /// Largest `|G(z)| - |z|`.
    pub max_modulus_gain: f64,
    /// Largest `|G(z) - z| / (|G(z)| - |z|)`.
    pub max_displacement_ratio: f64,
    /// Most orbit moduli in one interval `[t_n, t_{n+1})` of the gauge ladder.
    pub max_ladder_crossings: usize,
    /// Only interior samples are tested; boundary extension is assumed.
    pub boundary_assumed: bool,
}

/// Audit one orbit `G^{burn_in}(start), ...` of the petal inverse.
pub fn audit_orbit<G: InverseMap + ?Sized>(
    g_map: &G,
    petal: &PetalSpec,
    start: Complex64,
    cfg: &AuditConfig,
) -> Result<OrbitAudit, PetalError> {
    let (gauge, _) = match petal.kind {
        PetalKind::Infinity { g, delta } => (g, delta),
        PetalKind::Parabolic { .. } => {
            return Err(PetalError::Unsupported(
                "parabolic petals are audited through sector membership",
            ))
        }
    };
    if !petal.region.contains(start) {
        return Err(PetalError::Escape { step: 0, point: start });
    }
    let mut z = start;
    for step in 1..=cfg.burn_in {
        z = g_map.apply(z)?;
        if !petal.region.contains(z) {
            return Err(PetalError::Escape { step, point: z });
        }
    }
    let mut out = OrbitAudit {
        start,
        samples: 0,
        c1: f64::INFINITY,
        c2: 0.0,
        delta: 0.0,
        worst_point: z,
        modulus_increasing: true,
        max_modulus_gain: 0.0,
        max_displacement_ratio: 0.0,
        max_ladder_crossings: 0,
    };
    let mut moduli = Vec::with_capacity(cfg.steps + 1);
    moduli.push(z.norm());
    for step in 1..=cfg.steps {
        let w = g_map.apply(z)?;
        if !petal.region.contains(w) {
            return Err(PetalError::Escape {
                step: cfg.burn_in + step,
                point: w,
            });
        }
        let disp = w - z;
        let ratio = disp.norm() / gauge.eval(z.norm());
        out.c1 = out.c1.min(ratio);
        out.c2 = out.c2.max(ratio);
        let dev = angle_diff(disp.arg(), z.arg()).abs();
        if dev > out.delta {
            out.delta = dev;
            out.worst_point = z;
        }
        let gain = w.norm() - z.norm();
        if gain > 0.0 {
            out.max_modulus_gain = out.max_modulus_gain.max(gain);
            out.max_displacement_ratio = out.max_displacement_ratio.max(disp.norm() / gain);
        } else {
            out.modulus_increasing = false;
        }
        moduli.push(w.norm());
        out.samples += 1;
        z = w;
    }
    out.max_ladder_crossings = ladder_crossings(&gauge, &moduli);
    Ok(out)
}

/// Largest number of values of the increasing sequence `moduli` that fall in
/// one step `[t_n, t_{n+1})` of the gauge ladder started at `moduli[0]`.
fn ladder_crossings(g: &LogConvexFn, moduli: &[f64]) -> usize {
    let Some(&first) = moduli.first() else {
        return 0;
    };
    let last = moduli.iter().copied().fold(first, f64::max);
    if !(first > g.domain_start) {
        return 0;
    }
    let mut ladder = Vec::new();
    let mut t = first;
    while t <= last && ladder.len() < 1 << 20 {
        ladder.push(t);
        t += g.eval(t);
    }
    ladder.push(t);
    if ladder.len() < 2 {
        return moduli.len();
    }
    let mut counts = alloc::vec![0usize; ladder.len()];
    for &m in moduli {
        let idx = ladder.partition_point(|&x| x <= m).saturating_sub(1);
        counts[idx] += 1;
    }
    counts.into_iter().max().unwrap_or(0)
}

impl PetalReport {
    /// Merge per-orbit audits in the given order.
    pub fn from_orbits(petal: &PetalSpec, orbits: &[OrbitAudit]) -> Self {
        let delta_bound = match petal.kind {
            PetalKind::Infinity { delta, .. } => delta,
            PetalKind::Parabolic { .. } => FRAC_PI_2,
        };
        let mut r = PetalReport {
            passed: false,
            c1_hat: f64::INFINITY,
            c2_hat: 0.0,
            delta_hat: 0.0,
            delta_bound,
            samples_tested: 0,
            worst_point: Complex64::new(f64::NAN, f64::NAN),
            modulus_increasing: true,
            max_modulus_gain: 0.0,
            max_displacement_ratio: 0.0,
            max_ladder_crossings: 0,
            boundary_assumed: true,
        };
        for (i, o) in orbits.iter().enumerate() {
            r.c1_hat = r.c1_hat.min(o.c1);
            r.c2_hat = r.c2_hat.max(o.c2);
            if i == 0 || o.delta > r.delta_hat {
                r.delta_hat = o.delta;
                r.worst_point = o.worst_point;
            }
            r.samples_tested += o.samples;
            r.modulus_increasing &= o.modulus_increasing;
            r.max_modulus_gain = r.max_modulus_gain.max(o.max_modulus_gain);
            r.max_displacement_ratio = r.max_displacement_ratio.max(o.max_displacement_ratio);
            r.max_ladder_crossings = r.max_ladder_crossings.max(o.max_ladder_crossings);
        }
        if r.samples_tested == 0 {
            r.c1_hat = 0.0;
        }
        r.passed = r.c1_hat > 0.0 && r.delta_hat < delta_bound;
        r
    }
}

/// Sample orbits of `G` from a grid in the petal's sample box and estimate
/// the displacement constants and the argument deviation.
pub fn petal_condition_audit<G: InverseMap + ?Sized>(
    g_map: &G,
    petal: &PetalSpec,
    cfg: &AuditConfig,
) -> Result<PetalReport, PetalError> {
    if let PetalKind::Infinity { delta, .. } = petal.kind {
        if !(delta > 0.0 && delta <= FRAC_PI_2) {
            return Err(PetalError::InvalidParameter("petal delta must lie in (0, pi/2]"));
        }
    }
    let orbits = petal
        .samples
        .grid(cfg.sample_orbits)
        .into_iter()
        .map(|z| audit_orbit(g_map, petal, z, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PetalReport::from_orbits(petal, &orbits))
}
