use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("non-finite input {0}")]
    NonFinite(Complex64),
    #[error("{z} is within pole radius of the pole {pole}")]
    Pole { z: Complex64, pole: Complex64 },
    #[error("inverse branch did not converge for target {target} from seed {seed} (residual {residual:e})")]
    NoConvergence {
        target: Complex64,
        seed: Complex64,
        residual: f64,
    },
    #[error("derivative vanishes at {0}")]
    Singular(Complex64),
    #[error("operation unsupported for map {0}")]
    Unsupported(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("unknown map id")]
    UnknownMap,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("metric density is singular at {0}")]
    Singular(Complex64),
    #[error("invalid metric parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("bisection interval does not bracket a root")]
    NotBracketed,
    #[error("orbit leaves the metric domain at step {step} ({z})")]
    Domain { step: usize, z: Complex64 },
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PetalError {
    #[error("orbit left the petal region at step {step} ({point})")]
    Escape { step: usize, point: Complex64 },
    #[error("pole {0} lies in the sector")]
    PoleInSector(Complex64),
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("invalid petal parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundaryError {
    #[error("seed curve rejected: {0}")]
    Seed(&'static str),
    #[error("continuation failed at level {level} with {samples} samples; refine")]
    Refine { level: usize, samples: usize },
    #[error("curve at level {level} fails to close (gap {gap:e})")]
    Topology { level: usize, gap: f64 },
    #[error("curves are not consecutive levels ({a} and {b})")]
    Alignment { a: usize, b: usize },
    #[error("invalid curve: {0}")]
    InvalidCurve(&'static str),
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CensusError {
    #[error("invalid census config: {0}")]
    Config(&'static str),
    #[error("pair (k={k}, l={l}) is excluded: l must avoid k and k+1")]
    ExcludedPair { k: i64, l: i64 },
    #[error("anchor for (k={k}, l={l}) found at {z}, outside the pole disc")]
    Relocation { k: i64, l: i64, z: Complex64 },
    #[error("anchor {0} does not classify into the expected basin")]
    Misclassified(Complex64),
    #[error("total spherical area {0} exceeds the sphere")]
    AreaOverflow(f64),
    #[error("radius {r} is outside (0, {cap})")]
    Range { r: f64, cap: f64 },
    #[error(transparent)]
    Map(#[from] MapError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("invalid viewport: {0}")]
    Viewport(&'static str),
    #[error("invalid render job: {0}")]
    Job(&'static str),
}
