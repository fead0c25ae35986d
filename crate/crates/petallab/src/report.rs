//! Serializable mirrors of the core reports. Field order is the JSON key order.

use num_complex::Complex64;
use petallab_core::boundary::TraceReport;
use petallab_core::census::{CensusOutput, GroupSums, SummabilityReport};
use petallab_core::metrics::ExpansionReport;
use petallab_core::petals::{AsymptoticResidual, PetalReport};
use serde::Serialize;

pub fn pt(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, Serialize)]
pub struct PoleGapsJson {
    pub pole: [f64; 2],
    pub per_level: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceJson {
    pub map: String,
    pub zeta: [f64; 2],
    pub r0: f64,
    pub levels: usize,
    pub samples: usize,
    pub seed: u64,
    pub cauchy_moduli: Vec<f64>,
    pub ratio_estimates: Vec<f64>,
    pub accessible_pole_gaps: Vec<PoleGapsJson>,
    pub alpha_max_length: f64,
    pub alpha_detours: usize,
    pub pullback_residuals: Vec<f64>,
    pub sample_counts: Vec<usize>,
}

impl TraceJson {
    pub fn new(map: &str, zeta: Complex64, r0: f64, levels: usize, samples: usize, seed: u64, r: &TraceReport) -> Self {
        TraceJson {
            map: map.to_string(),
            zeta: pt(zeta),
            r0,
            levels,
            samples,
            seed,
            cauchy_moduli: r.cauchy_moduli.clone(),
            ratio_estimates: r.ratio_estimates.clone(),
            accessible_pole_gaps: r
                .accessible_pole_gaps
                .iter()
                .map(|g| PoleGapsJson {
                    pole: pt(g.pole),
                    per_level: g.per_level.clone(),
                })
                .collect(),
            alpha_max_length: r.alpha_max_length,
            alpha_detours: r.alpha_detours,
            pullback_residuals: r.pullback_residuals.clone(),
            sample_counts: r.sample_counts.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticJson {
    pub radius: f64,
    pub at_r: f64,
    pub at_2r: f64,
}

impl From<&AsymptoticResidual> for AsymptoticJson {
    fn from(a: &AsymptoticResidual) -> Self {
        AsymptoticJson {
            radius: a.radius,
            at_r: a.at_r,
            at_2r: a.at_2r,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PetalJson {
    pub petal: String,
    pub m: f64,
    pub passed: bool,
    pub c1_hat: f64,
    pub c2_hat: f64,
    pub delta_hat: f64,
    pub delta_bound: f64,
    pub samples_tested: usize,
    pub worst_point: [f64; 2],
    pub modulus_increasing: bool,
    pub max_modulus_gain: f64,
    pub max_displacement_ratio: f64,
    pub max_ladder_crossings: usize,
    pub boundary_assumed: bool,
    pub asymptotic: Option<AsymptoticJson>,
}

impl PetalJson {
    pub fn new(petal: &str, m: f64, r: &PetalReport, asymptotic: Option<&AsymptoticResidual>) -> Self {
        PetalJson {
            petal: petal.to_string(),
            m,
            passed: r.passed,
            c1_hat: r.c1_hat,
            c2_hat: r.c2_hat,
            delta_hat: r.delta_hat,
            delta_bound: r.delta_bound,
            samples_tested: r.samples_tested,
            worst_point: pt(r.worst_point),
            modulus_increasing: r.modulus_increasing,
            max_modulus_gain: r.max_modulus_gain,
            max_displacement_ratio: r.max_displacement_ratio,
            max_ladder_crossings: r.max_ladder_crossings,
            boundary_assumed: r.boundary_assumed,
            asymptotic: asymptotic.map(AsymptoticJson::from),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PetalsJson {
    pub map: String,
    pub seed: u64,
    pub passed: bool,
    pub petals: Vec<PetalJson>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricJson {
    pub metric: String,
    pub orbit_id: usize,
    pub start: [f64; 2],
    pub min_margin: Option<f64>,
    pub violations: Vec<usize>,
}

impl MetricJson {
    pub fn new(metric: &str, orbit_id: usize, start: Complex64, r: &ExpansionReport) -> Self {
        MetricJson {
            metric: metric.to_string(),
            orbit_id,
            start: pt(start),
            min_margin: r.min_margin,
            violations: r.violations.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsJson {
    pub map: String,
    pub seed: u64,
    pub passed: bool,
    pub orbits: Vec<MetricJson>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SumsJson {
    pub count: usize,
    pub diam_sq: f64,
    pub area: f64,
}

impl From<&GroupSums> for SumsJson {
    fn from(s: &GroupSums) -> Self {
        SumsJson {
            count: s.count,
            diam_sq: s.diam_sq,
            area: s.area,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BandJson {
    pub lo: i64,
    pub hi: i64,
    pub sums: SumsJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct WhyburnJson {
    pub eps: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct WarningJson {
    pub level: usize,
    pub k: i64,
    pub l: i64,
    pub branch: Option<String>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusJson {
    pub depth: usize,
    pub k_range: [i64; 2],
    pub l_range: [i64; 2],
    pub seed: u64,
    pub records: usize,
    pub total: SumsJson,
    pub by_level: Vec<SumsJson>,
    pub by_band: Vec<BandJson>,
    pub tail_ratios: Vec<f64>,
    pub decay_exponent: Option<f64>,
    pub sub_resolution: usize,
    pub whyburn: Vec<WhyburnJson>,
    pub warnings: Vec<WarningJson>,
}

pub const WHYBURN_EPS: [f64; 4] = [0.5, 0.2, 0.1, 0.05];

impl CensusJson {
    pub fn new(cfg: &petallab_core::census::CensusConfig, seed: u64, out: &CensusOutput, s: &SummabilityReport) -> Self {
        CensusJson {
            depth: cfg.depth,
            k_range: [cfg.k_range.0, cfg.k_range.1],
            l_range: [cfg.l_range.0, cfg.l_range.1],
            seed,
            records: out.records.len(),
            total: (&s.total).into(),
            by_level: s.by_level.iter().map(SumsJson::from).collect(),
            by_band: s
                .by_band
                .iter()
                .map(|(lo, hi, g)| BandJson {
                    lo: *lo,
                    hi: *hi,
                    sums: g.into(),
                })
                .collect(),
            tail_ratios: s.tail_ratios.clone(),
            decay_exponent: s.decay_exponent,
            sub_resolution: s.sub_resolution,
            whyburn: WHYBURN_EPS
                .iter()
                .map(|&eps| WhyburnJson {
                    eps,
                    count: petallab_core::census::whyburn_count(&out.records, eps),
                })
                .collect(),
            warnings: out
                .warnings
                .iter()
                .map(|w| WarningJson {
                    level: w.level,
                    k: w.k,
                    l: w.l,
                    branch: w.branch.map(|b| crate::io::fmt_branch_path(&[b])),
                    reason: w.reason.to_string(),
                })
                .collect(),
        }
    }
}
