//! The `petallab` command.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use petallab_core::boundary::trace_boundary_with;
use petallab_core::census::{census_with, summability_report, CensusConfig};
use petallab_core::error::{BoundaryError, CensusError, MapError, MetricError, PetalError};
use petallab_core::maps::MapSpec;
use petallab_core::metrics::{expansion_audit, MetricKind};
use petallab_core::petals::{
    asymptotic_form_check, petal_condition_audit, AuditConfig, NewtonInverse, PetalSpec, SectorKind, SectorSpec,
};
use petallab_core::render::{render_with, Coloring, RenderJob, Viewport};
use serde::{Deserialize, Serialize};

use crate::config::{merge, parse_complex, FileConfig};
use crate::exec::RayonExecutor;
use crate::io;
use crate::report::{CensusJson, MetricJson, MetricsJson, PetalJson, PetalsJson, TraceJson};

#[derive(Debug, Parser)]
#[command(name = "petallab", version, about = "Dynamics laboratory for z - tan z and friends")]
pub struct Cli {
    /// JSON file with defaults for any flag
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = "PETALLAB_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render the dynamical plane to a PPM image
    Render(RenderArgs),
    /// Pull back an equipotential curve and report Cauchy moduli
    TraceBoundary(TraceArgs),
    /// Enumerate Fatou components of z - tan z
    Census(CensusArgs),
    /// Audit the petals at infinity of z - tan z
    VerifyPetals(PetalArgs),
    /// Audit metric expansion along forward orbits
    VerifyMetrics(MetricArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ColoringArg {
    BasinIndex,
    IterationShade,
    JuliaMask,
}

impl From<ColoringArg> for Coloring {
    fn from(c: ColoringArg) -> Self {
        match c {
            ColoringArg::BasinIndex => Coloring::BasinIndex,
            ColoringArg::IterationShade => Coloring::IterationShade,
            ColoringArg::JuliaMask => Coloring::JuliaMask,
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderArgs {
    #[arg(long)]
    pub map: Option<String>,
    /// Degree for the power map
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long)]
    pub width: Option<f64>,
    /// Horizontal pixel count
    #[arg(long)]
    pub px: Option<usize>,
    /// Vertical pixel count (default: px)
    #[arg(long)]
    pub py: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum)]
    pub coloring: Option<ColoringArg>,
    /// Curve files to draw on top
    #[arg(long, num_args = 1..)]
    pub overlay: Option<Vec<PathBuf>>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceArgs {
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<String>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also render the curves over the dynamical plane
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub overlay_image: Option<bool>,
    #[arg(long)]
    pub px: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusArgs {
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub k_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k_max: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub l_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    pub l_max: Option<i64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Half height R of the boxes
    #[arg(long)]
    pub r_box: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub basin_grid_step: Option<f64>,
    #[arg(long)]
    pub eps_pole: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub z0: Option<String>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PetalArgs {
    #[arg(long)]
    pub map: Option<String>,
    /// Petal height: P_+ is Im z > M, P_- is Im z < -M
    #[arg(long = "M", id = "M")]
    #[serde(rename = "M")]
    pub m: Option<f64>,
    #[arg(long)]
    pub orbits: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub burn_in: Option<usize>,
    /// Radius of the asymptotic-form check
    #[arg(long)]
    pub radius: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricArg {
    Euclidean,
    Spherical,
    PowerInfinity,
    PowerPoint,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricArgs {
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Center of the power-point metric
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    /// Orbit start, repeatable (default depends on the map)
    #[arg(long, num_args = 1, allow_hyphen_values = true)]
    pub starts: Option<Vec<String>>,
    #[arg(long)]
    pub orbits: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error(transparent)]
    Io(#[from] io::IoError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

fn map_err(e: MapError) -> CliError {
    match e {
        MapError::Unsupported(_) | MapError::InvalidParameter(_) | MapError::UnknownMap => CliError::Config(e.to_string()),
        _ => CliError::Numerical(e.to_string()),
    }
}

fn census_err(e: CensusError) -> CliError {
    match e {
        CensusError::Config(_) | CensusError::ExcludedPair { .. } | CensusError::Range { .. } => CliError::Config(e.to_string()),
        CensusError::Map(m) => map_err(m),
        _ => CliError::Numerical(e.to_string()),
    }
}

fn boundary_err(e: BoundaryError) -> CliError {
    match e {
        BoundaryError::Seed(_) | BoundaryError::InvalidCurve(_) => CliError::Config(e.to_string()),
        BoundaryError::Map(m) => map_err(m),
        _ => CliError::Numerical(e.to_string()),
    }
}

fn petal_err(e: PetalError) -> CliError {
    match e {
        PetalError::InvalidParameter(_) | PetalError::Unsupported(_) => CliError::Config(e.to_string()),
        PetalError::Map(m) => map_err(m),
        _ => CliError::Numerical(e.to_string()),
    }
}

fn metric_err(e: MetricError) -> CliError {
    match e {
        MetricError::InvalidParameter(_) => CliError::Config(e.to_string()),
        MetricError::Map(m) => map_err(m),
        _ => CliError::Numerical(e.to_string()),
    }
}

fn complex(s: &str) -> Result<Complex64, CliError> {
    parse_complex(s).map_err(CliError::Config)
}

fn map_spec(name: Option<&str>, degree: Option<u32>) -> Result<MapSpec, CliError> {
    MapSpec::from_name(name.unwrap_or("sine_newton"), degree).map_err(map_err)
}

/// Settings shared by every subcommand after merging flags and config file.
pub struct Globals {
    pub exec: RayonExecutor,
    pub seed: u64,
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(CliError::Config)?,
        None => FileConfig::default(),
    };
    let threads = cli.threads.or(file.threads).unwrap_or(0);
    let g = Globals {
        exec: RayonExecutor::new(threads).map_err(|e| CliError::Config(e.to_string()))?,
        seed: cli.seed.or(file.seed).unwrap_or(0),
        out: cli.out.clone().or(file.out.map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("out")),
    };
    match &cli.command {
        Command::Render(a) => render_cmd(&g, &m(a, file.render.as_ref())?),
        Command::TraceBoundary(a) => trace_cmd(&g, &m(a, file.trace_boundary.as_ref())?),
        Command::Census(a) => census_cmd(&g, &m(a, file.census.as_ref())?),
        Command::VerifyPetals(a) => petals_cmd(&g, &m(a, file.verify_petals.as_ref())?),
        Command::VerifyMetrics(a) => metrics_cmd(&g, &m(a, file.verify_metrics.as_ref())?),
    }
}

fn m<T: Serialize + serde::de::DeserializeOwned>(flags: &T, section: Option<&serde_json::Value>) -> Result<T, CliError> {
    merge(flags, section).map_err(CliError::Config)
}

fn load_overlays(paths: &[PathBuf]) -> Result<Vec<Vec<Complex64>>, CliError> {
    paths
        .iter()
        .map(|p| Ok(io::read_curve(p)?.into_iter().map(|s| s.1).collect()))
        .collect()
}

pub fn render_job(a: &RenderArgs) -> Result<RenderJob, CliError> {
    let map = map_spec(a.map.as_deref(), a.degree)?;
    let center = complex(a.center.as_deref().unwrap_or("0"))?;
    let px = a.px.unwrap_or(800);
    let py = a.py.unwrap_or(px);
    let vp = Viewport::square(center, a.width.unwrap_or(12.0), px, py).map_err(|e| CliError::Config(e.to_string()))?;
    let mut job = RenderJob::new(map, vp);
    job.max_iter = a.max_iter.unwrap_or(job.max_iter);
    job.coloring = a.coloring.unwrap_or(ColoringArg::BasinIndex).into();
    job.overlay = load_overlays(a.overlay.as_deref().unwrap_or(&[]))?;
    Ok(job)
}

fn render_cmd(g: &Globals, a: &RenderArgs) -> Result<(), CliError> {
    let job = render_job(a)?;
    let img = render_with(&g.exec, &job).map_err(|e| CliError::Config(e.to_string()))?;
    io::write_image(&img, &g.out.join("render.ppm"))?;
    Ok(())
}

fn trace_cmd(g: &Globals, a: &TraceArgs) -> Result<(), CliError> {
    let map = map_spec(a.map.as_deref(), a.degree)?;
    let zeta = complex(a.zeta.as_deref().unwrap_or("0"))?;
    let r0 = a.r0.unwrap_or(0.5);
    let levels = a.levels.unwrap_or(6);
    let samples = a.samples.unwrap_or(1024);
    let trace = trace_boundary_with(&g.exec, &map, zeta, r0, levels, samples).map_err(boundary_err)?;
    for c in &trace.curves {
        io::write_curve(c, &g.out.join(format!("curve_{:02}.bin", c.level)))?;
    }
    let report = TraceJson::new(map.id().name(), zeta, r0, levels, samples, g.seed, &trace.report);
    io::write_json(&report, &g.out.join("report.json"))?;
    if a.overlay_image.unwrap_or(false) {
        let pts = trace.curves.iter().flat_map(|c| c.points());
        let (mut lo, mut hi) = (zeta, zeta);
        for z in pts {
            lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
            hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
        }
        let span = (hi.re - lo.re).max(hi.im - lo.im).max(1e-3) * 1.25;
        let px = a.px.unwrap_or(800);
        let vp = Viewport::square((lo + hi) / 2.0, span, px, px).map_err(|e| CliError::Config(e.to_string()))?;
        let mut job = RenderJob::new(map, vp);
        job.overlay = trace.curves.iter().map(|c| c.points().collect()).collect();
        let img = render_with(&g.exec, &job).map_err(|e| CliError::Config(e.to_string()))?;
        io::write_image(&img, &g.out.join("overlay.ppm"))?;
    }
    Ok(())
}

pub fn census_config(a: &CensusArgs) -> Result<CensusConfig, CliError> {
    let d = CensusConfig::default();
    Ok(CensusConfig {
        depth: a.depth.unwrap_or(d.depth),
        k_range: (a.k_min.unwrap_or(d.k_range.0), a.k_max.unwrap_or(d.k_range.1)),
        l_range: (a.l_min.unwrap_or(d.l_range.0), a.l_max.unwrap_or(d.l_range.1)),
        delta: a.delta.unwrap_or(d.delta),
        r_box: a.r_box.unwrap_or(d.r_box),
        grid_step: a.grid_step.unwrap_or(d.grid_step),
        basin_grid_step: a.basin_grid_step.unwrap_or(d.basin_grid_step),
        eps_pole: a.eps_pole.unwrap_or(d.eps_pole),
        z0: match &a.z0 {
            Some(s) => complex(s)?,
            None => d.z0,
        },
        max_iter: a.max_iter.unwrap_or(d.max_iter),
        ..d
    })
}

fn census_cmd(g: &Globals, a: &CensusArgs) -> Result<(), CliError> {
    let cfg = census_config(a)?;
    let out = census_with(&g.exec, &cfg).map_err(census_err)?;
    io::write_text(&io::census_csv(&out.records), &g.out.join("census.csv"))?;
    let summary = summability_report(&out.records).map_err(census_err)?;
    io::write_json(&CensusJson::new(&cfg, g.seed, &out, &summary), &g.out.join("census_summary.json"))?;
    Ok(())
}

fn petals_cmd(g: &Globals, a: &PetalArgs) -> Result<(), CliError> {
    let map = map_spec(a.map.as_deref(), None)?;
    if map != MapSpec::sine_newton() {
        return Err(CliError::Config("petals at infinity are declared for sine_newton only".into()));
    }
    let m = a.m.unwrap_or(10.0);
    let d = AuditConfig::default();
    let cfg = AuditConfig {
        sample_orbits: a.orbits.unwrap_or(d.sample_orbits),
        steps: a.steps.unwrap_or(d.steps),
        burn_in: a.burn_in.unwrap_or(d.burn_in),
    };
    let radius = a.radius.unwrap_or(30.0);
    let mut petals = Vec::new();
    let sides = [
        ("upper", PetalSpec::sine_upper(m), NewtonInverse::sine_upper(), Complex64::new(0.0, -1.0)),
        ("lower", PetalSpec::sine_lower(m), NewtonInverse::sine_lower(), Complex64::new(0.0, 1.0)),
    ];
    for (name, spec, inv, coeff) in sides {
        let report = petal_condition_audit(&inv, &spec, &cfg).map_err(petal_err)?;
        let sector = SectorSpec::new(SectorKind::AtInfinity { r: radius }, 1, 1, coeff, PI / 3.0).map_err(petal_err)?;
        let asym = asymptotic_form_check(&map, &sector, 1, coeff, 64).map_err(petal_err)?;
        petals.push(PetalJson::new(name, m, &report, Some(&asym)));
    }
    let passed = petals.iter().all(|p| p.passed);
    let report = PetalsJson {
        map: map.id().name().to_string(),
        seed: g.seed,
        passed,
        petals,
    };
    io::write_json(&report, &g.out.join("petals.json"))?;
    if !passed {
        let worst: Vec<String> = report
            .petals
            .iter()
            .filter(|p| !p.passed)
            .map(|p| format!("{} petal, worst point {}{:+}i", p.petal, p.worst_point[0], p.worst_point[1]))
            .collect();
        return Err(CliError::Numerical(format!("petal audit failed: {}", worst.join("; "))));
    }
    Ok(())
}

fn default_starts(map: &MapSpec, n: usize) -> Result<Vec<Complex64>, CliError> {
    use petallab_core::maps::MapId;
    let n = n.max(1);
    match map.id() {
        MapId::SineNewton => Ok((0..n)
            .map(|j| {
                let s = if n == 1 { 0.0 } else { -1.0 + 2.0 * j as f64 / (n - 1) as f64 };
                Complex64::new(s * (FRAC_PI_2 - 0.1), 30.0)
            })
            .collect()),
        MapId::PowerD(_) => Ok((0..n)
            .map(|j| Complex64::from_polar(2.0, 2.0 * PI * j as f64 / n as f64))
            .collect()),
        _ => Err(CliError::Config("no default orbit starts for this map; pass --starts".into())),
    }
}

fn metrics_cmd(g: &Globals, a: &MetricArgs) -> Result<(), CliError> {
    let map = map_spec(a.map.as_deref(), a.degree)?;
    let metric = match a.metric.unwrap_or(MetricArg::PowerInfinity) {
        MetricArg::Euclidean => MetricKind::Euclidean,
        MetricArg::Spherical => MetricKind::Spherical,
        MetricArg::PowerInfinity => MetricKind::power_infinity(a.alpha.unwrap_or(1.5)).map_err(metric_err)?,
        MetricArg::PowerPoint => {
            let p = complex(a.point.as_deref().unwrap_or("0"))?;
            MetricKind::power_point(p, a.alpha.unwrap_or(0.5)).map_err(metric_err)?
        }
    };
    let starts = match &a.starts {
        Some(v) => v.iter().map(|s| complex(s)).collect::<Result<Vec<_>, _>>()?,
        None => default_starts(&map, a.orbits.unwrap_or(8))?,
    };
    let steps = a.steps.unwrap_or(10);
    let bound = vec![1.0; steps + 1];
    let mut orbits = Vec::new();
    for (id, &z0) in starts.iter().enumerate() {
        let mut orbit = vec![z0];
        for _ in 0..steps {
            let z = *orbit.last().expect("orbit starts non-empty");
            orbit.push(map.eval_finite(z).map_err(map_err)?);
        }
        let r = expansion_audit(&map, &metric, &orbit, &bound).map_err(metric_err)?;
        orbits.push(MetricJson::new(metric.name(), id, z0, &r));
    }
    let passed = orbits.iter().all(|o| o.violations.is_empty());
    let report = MetricsJson {
        map: map.id().name().to_string(),
        seed: g.seed,
        passed,
        orbits,
    };
    io::write_json(&report, &g.out.join("metrics.json"))?;
    if !passed {
        return Err(CliError::Numerical("metric expansion audit found violations".into()));
    }
    Ok(())
}

/// Parse `args`, run, and return the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("petallab: {e}");
            e.exit_code()
        }
    }
}
