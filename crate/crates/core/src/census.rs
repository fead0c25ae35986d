//! Census of the Fatou components of `z - tan z`: the basins `U_k`, their
//! first preimages `U_{k,l}` near the poles, and deeper preimages, with
//! spherical diameter and area estimates.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::boundary::continue_branch;
use crate::error::{CensusError, MapError};
use crate::exec::{Executor, Sequential};
use crate::maps::{inverse_branch_step, MapSpec};

/// The disc `D(k pi, 0.5)` is mapped into itself, so it lies in `U_k`.
const BASIN_DISC: f64 = 0.5;

/// Points compared when estimating a diameter.
const DIAMETER_POINTS: usize = 4096;

/// Cap on cells visited by one flood fill.
const MAX_CELLS: usize = 1 << 21;

#[derive(Debug, Clone, PartialEq)]
pub struct CensusConfig {
    /// Deepest preimage level; level 0 are the basins.
    pub depth: usize,
    /// Inclusive range of box indices `k`.
    pub k_range: (i64, i64),
    /// Inclusive range of target basins `l`.
    pub l_range: (i64, i64),
    pub delta: f64,
    /// Half height of the boxes `R_k`.
    pub r_box: f64,
    pub grid_step: f64,
    /// Grid step for the basins, which are far larger than their preimages.
    pub basin_grid_step: f64,
    pub eps_pole: f64,
    /// Base point in `U_0` high on the imaginary axis.
    pub z0: Complex64,
    /// Height above which the half planes are petals.
    pub petal_m: f64,
    pub max_iter: usize,
    /// Heights `|t| <= spine_extent` of the basin axis traced through each component.
    pub spine_extent: f64,
    pub spine_step: f64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            depth: 1,
            k_range: (-2, 2),
            l_range: (-8, 8),
            delta: 0.3,
            r_box: 12.0,
            grid_step: 1.0 / 128.0,
            basin_grid_step: 1.0 / 16.0,
            eps_pole: 0.1,
            z0: Complex64::new(0.0, 11.0),
            petal_m: 10.0,
            max_iter: 500,
            spine_extent: 40.0,
            spine_step: 0.25,
        }
    }
}

impl CensusConfig {
    pub fn validate(&self) -> Result<(), CensusError> {
        if !(self.delta > 0.0 && self.delta < FRAC_PI_2) {
            return Err(CensusError::Config("delta must lie in (0, pi/2)"));
        }
        if self.k_range.0 > self.k_range.1 || self.l_range.0 > self.l_range.1 {
            return Err(CensusError::Config("empty index range"));
        }
        if !(self.grid_step > 0.0 && self.basin_grid_step > 0.0) {
            return Err(CensusError::Config("grid steps must be positive"));
        }
        if !(self.petal_m > 0.0 && self.r_box - 2.0 >= self.petal_m) {
            return Err(CensusError::Config("need R - 2 >= petal threshold M"));
        }
        if !(self.eps_pole > 0.0 && self.eps_pole < FRAC_PI_2 - self.delta) {
            return Err(CensusError::Config("pole disc must fit inside the box"));
        }
        if !(self.z0.im.abs() > self.petal_m && self.z0.re.abs() < FRAC_PI_2 - self.delta) {
            return Err(CensusError::Config("z0 must lie in U_0 above the petal threshold"));
        }
        if self.max_iter == 0 || !(self.spine_step > 0.0) || !(self.spine_extent >= self.z0.im.abs()) {
            return Err(CensusError::Config("invalid iteration or spine settings"));
        }
        Ok(())
    }
}

/// The closed rectangle `R_k = [k pi + delta, (k+1) pi - delta] x [-R, R]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxRect {
    pub k: i64,
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl BoxRect {
    pub fn new(k: i64, delta: f64, r: f64) -> Self {
        let x = k as f64 * PI;
        BoxRect {
            k,
            re: (x + delta, x + PI - delta),
            im: (-r, r),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re.0 && z.re <= self.re.1 && z.im >= self.im.0 && z.im <= self.im.1
    }
}

pub fn boxes(config: &CensusConfig) -> Result<Vec<BoxRect>, CensusError> {
    if !(config.delta > 0.0 && config.delta < FRAC_PI_2) {
        return Err(CensusError::Config("delta must lie in (0, pi/2)"));
    }
    Ok((config.k_range.0..=config.k_range.1)
        .map(|k| BoxRect::new(k, config.delta, config.r_box))
        .collect())
}

/// Which inverse branch produced a component from its parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Branch {
    /// The branch landing near the pole `p_k`.
    Pole(i64),
    /// The branch through the upper petal.
    Petal,
}

/// Grid cells and traced axis of one component.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComponentExtent {
    /// Lower-left corner of cell `(0, 0)`.
    pub origin: Complex64,
    pub step: f64,
    /// Accepted cells, sorted.
    pub cells: Vec<(i32, i32)>,
    /// Image of the basin axis inside the component.
    pub spine: Vec<Complex64>,
    /// The component is unbounded, so its closure contains infinity.
    pub unbounded: bool,
    pub diam_sph: f64,
    pub area_sph: f64,
}

impl ComponentExtent {
    pub fn cell_center(&self, c: (i32, i32)) -> Complex64 {
        self.origin + Complex64::new((c.0 as f64 + 0.5) * self.step, (c.1 as f64 + 0.5) * self.step)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentRecord {
    pub level: usize,
    /// Box of the level-1 ancestor (`k`) and the basin reached (`l`).
    pub k: i64,
    pub l: i64,
    /// Inverse branches applied after level 1, outermost last.
    pub branch_path: Vec<Branch>,
    /// Box containing this component.
    pub box_index: i64,
    pub anchor: Complex64,
    pub diam_sph: f64,
    pub area_sph: f64,
    pub sample_count: usize,
    /// Fewer than four grid cells were found.
    pub sub_resolution: bool,
    pub extent: ComponentExtent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusWarning {
    pub level: usize,
    pub k: i64,
    pub l: i64,
    pub branch: Option<Branch>,
    pub reason: &'static str,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CensusOutput {
    pub records: Vec<ComponentRecord>,
    pub warnings: Vec<CensusWarning>,
}

/// Final basin of `z`, or `None` for poles, Julia lines and undecided orbits.
///
/// Stops as soon as the orbit enters `D(k pi, 0.5)` or the half planes
/// `|Im z| > R`, where every point between two Julia lines lies in a basin.
pub fn census_verdict(map: &MapSpec, z: Complex64, config: &CensusConfig) -> Option<i64> {
    let mut z = z;
    for _ in 0..=config.max_iter {
        if !(z.re.is_finite() && z.im.is_finite()) || map.is_pole(z) {
            return None;
        }
        let k = (z.re / PI).round();
        let dx = (z.re - k * PI).abs();
        if z.im.abs() > config.r_box {
            return (dx < FRAC_PI_2 - 1e-9).then_some(k as i64);
        }
        if Complex64::new(dx, z.im).norm() < BASIN_DISC {
            return Some(k as i64);
        }
        z = map.eval_finite(z).ok()?;
    }
    None
}

/// The preimage of `target` in `D(p_k, eps)`, seeded from the local
/// inverse `p_k + 1/(target - p_k)` of the simple pole.
pub fn pole_preimage(map: &MapSpec, k: i64, target: Complex64, eps: f64) -> Result<Complex64, CensusError> {
    let p = map.pole(k).ok_or(CensusError::Map(MapError::Unsupported(map.id().name())))?;
    let seed = p + 1.0 / (target - p);
    let w = inverse_branch_step(map, target, seed, 1e-12 * (1.0 + target.norm()))?;
    if (w - p).norm() >= eps {
        return Err(CensusError::Relocation { k, l: 0, z: w });
    }
    Ok(w)
}

/// `z_{k,l}`: the preimage of `z_l = z_0 + l pi` near `p_k`, built as
/// `z_{0,l-k} + k pi`.
pub fn locate_component_anchor(k: i64, l: i64, config: &CensusConfig) -> Result<Complex64, CensusError> {
    if l == k || l == k + 1 {
        return Err(CensusError::ExcludedPair { k, l });
    }
    let map = MapSpec::sine_newton();
    let m = l - k;
    let zm = config.z0 + m as f64 * PI;
    let w = pole_preimage(&map, 0, zm, config.eps_pole).map_err(|e| match e {
        CensusError::Relocation { z, .. } => CensusError::Relocation { k, l, z },
        other => other,
    })?;
    let anchor = w + k as f64 * PI;
    let zl = config.z0 + l as f64 * PI;
    let fz = map.eval_finite(anchor)?;
    if (fz - zl).norm() > 1e-9 * (1.0 + zl.norm()) {
        return Err(CensusError::Relocation { k, l, z: anchor });
    }
    Ok(anchor)
}

/// Lift `path` through the branch of `f^{-1}` that sends `f(w_start)` to
/// `w_start`, starting at the path point `j0` and continuing both ways.
fn lift_path(map: &MapSpec, w_start: Complex64, path: &[Complex64], j0: usize) -> Result<Vec<Complex64>, MapError> {
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); path.len()];
    if path.is_empty() {
        return Ok(out);
    }
    out[j0] = continue_branch(map, w_start, path[j0])?;
    for j in j0 + 1..path.len() {
        out[j] = continue_branch(map, out[j - 1], path[j])?;
    }
    for j in (0..j0).rev() {
        out[j] = continue_branch(map, out[j + 1], path[j])?;
    }
    Ok(out)
}

fn nearest(path: &[Complex64], z: Complex64) -> usize {
    let mut best = 0;
    for (i, p) in path.iter().enumerate() {
        if (p - z).norm() < (path[best] - z).norm() {
            best = i;
        }
    }
    best
}

/// The basin axis `l pi + i t`, `|t| <= spine_extent`.
fn axis(l: i64, config: &CensusConfig) -> Vec<Complex64> {
    let n = (config.spine_extent / config.spine_step).floor() as i64;
    (-n..=n)
        .map(|j| Complex64::new(l as f64 * PI, j as f64 * config.spine_step))
        .collect()
}

/// Stereographic image on the sphere of diameter 2 (chord `c` <-> arc `2 asin(c/2)`).
fn sphere_point(z: Complex64) -> [f64; 3] {
    let r2 = z.norm_sqr();
    let d = 1.0 + r2;
    [2.0 * z.re / d, 2.0 * z.im / d, (r2 - 1.0) / d]
}

/// Largest spherical distance among `points` (plus infinity when asked),
/// using at most [`DIAMETER_POINTS`] points taken by stride.
fn spherical_diameter(points: &[Complex64], with_infinity: bool) -> f64 {
    let stride = points.len().div_ceil(DIAMETER_POINTS).max(1);
    let mut pts: Vec<[f64; 3]> = points.iter().step_by(stride).map(|&z| sphere_point(z)).collect();
    if with_infinity {
        pts.push([0.0, 0.0, 1.0]);
    }
    let mut best = 0.0f64;
    for i in 0..pts.len() {
        let a = pts[i];
        for b in &pts[i + 1..] {
            let d = (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) + (a[2] - b[2]) * (a[2] - b[2]);
            best = best.max(d);
        }
    }
    2.0 * (best.sqrt() / 2.0).min(1.0).asin()
}

/// Region-grow the component of `{z : verdict(z) = l}` containing the seeds
/// on a grid anchored at `origin`, inside `[re, im]` bounds and an optional
/// guard disc, then measure it.
#[allow(clippy::too_many_arguments)]
fn flood_extent(
    map: &MapSpec,
    config: &CensusConfig,
    l: i64,
    origin: Complex64,
    step: f64,
    dims: (i32, i32),
    seeds: &[Complex64],
    guard: Option<(Complex64, f64)>,
    spine: Vec<Complex64>,
    unbounded: bool,
) -> ComponentExtent {
    let cell_of = |z: Complex64| -> Option<(i32, i32)> {
        let i = ((z.re - origin.re) / step).floor();
        let j = ((z.im - origin.im) / step).floor();
        (i >= 0.0 && j >= 0.0 && i < dims.0 as f64 && j < dims.1 as f64).then_some((i as i32, j as i32))
    };
    let center = |c: (i32, i32)| origin + Complex64::new((c.0 as f64 + 0.5) * step, (c.1 as f64 + 0.5) * step);
    let allowed = |c: (i32, i32)| match guard {
        Some((g, r)) => (center(c) - g).norm() <= r,
        None => true,
    };
    let mut state: BTreeMap<(i32, i32), bool> = BTreeMap::new();
    let mut queue = VecDeque::new();
    for &s in seeds {
        if let Some(c) = cell_of(s) {
            if state.contains_key(&c) || !allowed(c) {
                continue;
            }
            let ok = census_verdict(map, center(c), config) == Some(l);
            state.insert(c, ok);
            if ok {
                queue.push_back(c);
            }
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        if state.len() >= MAX_CELLS {
            break;
        }
        for n in [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)] {
            if n.0 < 0 || n.1 < 0 || n.0 >= dims.0 || n.1 >= dims.1 || state.contains_key(&n) || !allowed(n) {
                continue;
            }
            let ok = census_verdict(map, center(n), config) == Some(l);
            state.insert(n, ok);
            if ok {
                queue.push_back(n);
            }
        }
    }
    let cells: Vec<(i32, i32)> = state.into_iter().filter(|e| e.1).map(|e| e.0).collect();
    let set: BTreeSet<(i32, i32)> = cells.iter().copied().collect();
    let mut outline: BTreeSet<(i32, i32)> = BTreeSet::new();
    let mut area = 0.0;
    for &(i, j) in &cells {
        let rho = 2.0 / (1.0 + center((i, j)).norm_sqr());
        area += step * step * rho * rho;
        let boundary = [(i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)]
            .iter()
            .any(|n| !set.contains(n));
        if boundary {
            for corner in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                outline.insert(corner);
            }
        }
    }
    let mut pts: Vec<Complex64> = outline
        .into_iter()
        .map(|(i, j)| origin + Complex64::new(i as f64 * step, j as f64 * step))
        .collect();
    pts.extend(spine.iter().copied());
    let diam_sph = if pts.is_empty() { 0.0 } else { spherical_diameter(&pts, unbounded) };
    ComponentExtent {
        origin,
        step,
        cells,
        spine,
        unbounded,
        diam_sph,
        area_sph: area,
    }
}

fn box_grid(b: &BoxRect, step: f64) -> (Complex64, (i32, i32)) {
    let nx = ((b.re.1 - b.re.0) / step).floor() as i32;
    let ny = ((b.im.1 - b.im.0) / step).floor() as i32;
    (Complex64::new(b.re.0, b.im.0), (nx, ny))
}

fn record_from(level: usize, k: i64, l: i64, branch_path: Vec<Branch>, box_index: i64, anchor: Complex64, extent: ComponentExtent) -> ComponentRecord {
    ComponentRecord {
        level,
        k,
        l,
        branch_path,
        box_index,
        anchor,
        diam_sph: extent.diam_sph,
        area_sph: extent.area_sph,
        sample_count: extent.cells.len(),
        sub_resolution: extent.cells.len() < 4,
        extent,
    }
}

/// The basin `U_k`, measured inside the strip `|Re z - k pi| < pi/2`,
/// `|Im z| <= R`, together with its axis and the point at infinity.
pub fn basin_record(k: i64, config: &CensusConfig) -> ComponentRecord {
    let map = MapSpec::sine_newton();
    let step = config.basin_grid_step;
    let x = k as f64 * PI;
    let strip = BoxRect {
        k,
        re: (x - FRAC_PI_2, x + FRAC_PI_2),
        im: (-config.r_box, config.r_box),
    };
    let (origin, dims) = box_grid(&strip, step);
    let spine = axis(k, config);
    let anchor = Complex64::new(x, 0.0);
    let extent = flood_extent(&map, config, k, origin, step, dims, &[anchor], None, spine, true);
    record_from(0, k, k, Vec::new(), k, anchor, extent)
}

/// Flood-fill and measure the component through `anchor` in box `b` that
/// lands in `U_l`, with `spine` supplying extra seeds and diameter points.
pub fn component_extent(
    anchor: Complex64,
    l: i64,
    b: &BoxRect,
    spine: Vec<Complex64>,
    config: &CensusConfig,
) -> ComponentExtent {
    let map = MapSpec::sine_newton();
    let (origin, dims) = box_grid(b, config.grid_step);
    let reach = spine.iter().map(|z| (z - anchor).norm()).fold(0.0, f64::max);
    let guard = (anchor, (4.0 * reach).max(8.0 * config.grid_step));
    let mut seeds = alloc::vec![anchor];
    seeds.extend(spine.iter().copied());
    flood_extent(&map, config, l, origin, config.grid_step, dims, &seeds, Some(guard), spine, false)
}

fn level_one(k: i64, l: i64, config: &CensusConfig) -> Result<(ComponentRecord, Option<CensusWarning>), CensusError> {
    let map = MapSpec::sine_newton();
    let anchor = locate_component_anchor(k, l, config)?;
    if census_verdict(&map, anchor, config) != Some(l) {
        return Err(CensusError::Misclassified(anchor));
    }
    let path = axis(l, config);
    let zl = config.z0 + l as f64 * PI;
    let (spine, warning) = match lift_path(&map, anchor, &path, nearest(&path, zl)) {
        Ok(s) => (s, None),
        Err(_) => (
            Vec::new(),
            Some(CensusWarning {
                level: 1,
                k,
                l,
                branch: None,
                reason: "spine continuation failed",
            }),
        ),
    };
    let b = BoxRect::new(k, config.delta, config.r_box);
    let extent = component_extent(anchor, l, &b, spine, config);
    Ok((record_from(1, k, l, Vec::new(), k, anchor, extent), warning))
}

/// Branch of `f^{-1}` on the strip of box `kb` selected by `branch`,
/// evaluated at `z` by continuation from a reference point high on the strip.
fn strip_branch(map: &MapSpec, kb: i64, branch: Branch, z: Complex64, config: &CensusConfig) -> Result<Complex64, MapError> {
    let q = Complex64::new((kb as f64 + 0.5) * PI, config.z0.im.abs());
    let wq = match branch {
        Branch::Pole(kp) => {
            let p = map.pole(kp).ok_or(MapError::Unsupported(map.id().name()))?;
            let w = inverse_branch_step(map, q, p + 1.0 / (q - p), 1e-12 * (1.0 + q.norm()))?;
            if (w - p).norm() >= config.eps_pole {
                return Err(MapError::NoConvergence {
                    target: q,
                    seed: p,
                    residual: (w - p).norm(),
                });
            }
            w
        }
        Branch::Petal => inverse_branch_step(map, q, q + Complex64::i(), 1e-12 * (1.0 + q.norm()))?,
    };
    continue_branch(map, wq, z)
}

fn child(parent: &ComponentRecord, branch: Branch, config: &CensusConfig, boxes: &[BoxRect]) -> Result<ComponentRecord, CensusWarning> {
    let map = MapSpec::sine_newton();
    let warn = |reason| CensusWarning {
        level: parent.level + 1,
        k: parent.k,
        l: parent.l,
        branch: Some(branch),
        reason,
    };
    let anchor = strip_branch(&map, parent.box_index, branch, parent.anchor, config)
        .map_err(|_| warn("branch continuation failed"))?;
    let b = boxes
        .iter()
        .find(|b| b.contains(anchor))
        .ok_or_else(|| warn("image outside the census boxes"))?;
    if census_verdict(&map, anchor, config) != Some(parent.l) {
        return Err(warn("anchor misclassified"));
    }
    let spine = if parent.extent.spine.is_empty() {
        Vec::new()
    } else {
        let j0 = nearest(&parent.extent.spine, parent.anchor);
        lift_path(&map, anchor, &parent.extent.spine, j0).unwrap_or_default()
    };
    let extent = component_extent(anchor, parent.l, b, spine, config);
    let mut path = parent.branch_path.clone();
    path.push(branch);
    Ok(record_from(parent.level + 1, parent.k, parent.l, path, b.k, anchor, extent))
}

/// Run the census with the default sequential executor.
pub fn census(config: &CensusConfig) -> Result<CensusOutput, CensusError> {
    census_with(&Sequential, config)
}

/// Levels `0..=depth`: basins for every `k` in range, then `U_{k,l}`, then
/// the images of each level under every inverse branch. Records of one level
/// and target basin whose anchors are closer than half a grid step are
/// merged.
pub fn census_with<E: Executor>(exec: &E, config: &CensusConfig) -> Result<CensusOutput, CensusError> {
    config.validate()?;
    let ks: Vec<i64> = (config.k_range.0..=config.k_range.1).collect();
    let mut out = CensusOutput {
        records: exec.run(ks.len(), |i| basin_record(ks[i], config)),
        warnings: Vec::new(),
    };
    if config.depth == 0 {
        return Ok(out);
    }
    let pairs: Vec<(i64, i64)> = ks
        .iter()
        .flat_map(|&k| (config.l_range.0..=config.l_range.1).filter(move |&l| l != k && l != k + 1).map(move |l| (k, l)))
        .collect();
    let first = exec.run(pairs.len(), |i| level_one(pairs[i].0, pairs[i].1, config));
    let mut frontier = Vec::new();
    for r in first {
        let (rec, warning) = r?;
        out.warnings.extend(warning);
        frontier.push(rec);
    }
    let boxes = boxes(config)?;
    let mut branches: Vec<Branch> = ks.iter().map(|&k| Branch::Pole(k)).collect();
    branches.push(Branch::Petal);
    let dedup = config.grid_step / 2.0;
    // anchors of U_{k,l} and U_{k,l+1} approach each other as |l| grows, so
    // only records of the same level and target basin are compared
    let mut accepted: Vec<(usize, i64, Complex64)> = Vec::new();
    let keep = |rec: &ComponentRecord, accepted: &mut Vec<(usize, i64, Complex64)>| {
        let dup = accepted
            .iter()
            .any(|&(n, l, a)| n == rec.level && l == rec.l && (a - rec.anchor).norm() < dedup);
        if !dup {
            accepted.push((rec.level, rec.l, rec.anchor));
        }
        !dup
    };
    let mut level_records: Vec<ComponentRecord> = frontier.into_iter().filter(|r| keep(r, &mut accepted)).collect();
    for _ in 2..=config.depth {
        let parents = &level_records;
        let nb = branches.len();
        let kids = exec.run(parents.len() * nb, |i| child(&parents[i / nb], branches[i % nb], config, &boxes));
        let mut next = Vec::new();
        for kid in kids {
            match kid {
                Ok(rec) => {
                    if keep(&rec, &mut accepted) {
                        next.push(rec);
                    }
                }
                Err(w) => out.warnings.push(w),
            }
        }
        out.records.append(&mut level_records);
        level_records = next;
    }
    out.records.append(&mut level_records);
    Ok(out)
}

/// Sums over one group of records.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GroupSums {
    pub count: usize,
    pub diam_sq: f64,
    pub area: f64,
}

impl GroupSums {
    fn add(&mut self, r: &ComponentRecord) {
        self.count += 1;
        self.diam_sq += r.diam_sph * r.diam_sph;
        self.area += r.area_sph;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummabilityReport {
    pub total: GroupSums,
    /// Indexed by level.
    pub by_level: Vec<GroupSums>,
    /// Dyadic bands `[2^j, 2^{j+1})` of `|l - k|` over records of level >= 1.
    pub by_band: Vec<(i64, i64, GroupSums)>,
    /// Ratio of each band's `diam^2` sum to the previous band's.
    pub tail_ratios: Vec<f64>,
    /// Least-squares slope of `-log diam` against `log |l - k|` over level-1 records.
    pub decay_exponent: Option<f64>,
    pub sub_resolution: usize,
}

/// Sums over level >= 1 records with `lo <= |l - k| <= hi`.
pub fn band_sum(records: &[ComponentRecord], lo: i64, hi: i64) -> GroupSums {
    let mut s = GroupSums::default();
    for r in records.iter().filter(|r| r.level >= 1) {
        let m = (r.l - r.k).abs();
        if m >= lo && m <= hi {
            s.add(r);
        }
    }
    s
}

pub fn decay_fit(records: &[ComponentRecord]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.level == 1 && r.diam_sph > 0.0)
        .map(|r| (((r.l - r.k).abs() as f64).ln(), r.diam_sph.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

/// Partial sums of squared diameters and areas; errors when the total
/// area exceeds that of the sphere, which only overlapping records can cause.
pub fn summability_report(records: &[ComponentRecord]) -> Result<SummabilityReport, CensusError> {
    let mut total = GroupSums::default();
    let mut by_level: Vec<GroupSums> = Vec::new();
    for r in records {
        total.add(r);
        if by_level.len() <= r.level {
            by_level.resize(r.level + 1, GroupSums::default());
        }
        by_level[r.level].add(r);
    }
    if total.area > 4.0 * PI {
        return Err(CensusError::AreaOverflow(total.area));
    }
    let max_m = records.iter().filter(|r| r.level >= 1).map(|r| (r.l - r.k).abs()).max().unwrap_or(0);
    let mut by_band = Vec::new();
    let mut lo = 1;
    while lo <= max_m {
        let hi = 2 * lo - 1;
        by_band.push((lo, hi, band_sum(records, lo, hi)));
        lo *= 2;
    }
    let tail_ratios = by_band
        .windows(2)
        .map(|w| if w[0].2.diam_sq > 0.0 { w[1].2.diam_sq / w[0].2.diam_sq } else { 0.0 })
        .collect();
    Ok(SummabilityReport {
        total,
        by_level,
        by_band,
        tail_ratios,
        decay_exponent: decay_fit(records),
        sub_resolution: records.iter().filter(|r| r.sub_resolution).count(),
    })
}

/// Number of records with spherical diameter at least `eps`.
pub fn whyburn_count(records: &[ComponentRecord], eps: f64) -> usize {
    records.iter().filter(|r| r.diam_sph >= eps).count()
}

/// Largest Euclidean radius accepted by [`sph_disc_bounds`].
pub const SPH_DISC_R_CAP: f64 = 1.0;
/// `2 (atan(r_cap)/r_cap) / (1 + r_cap/2)`.
pub const SPH_DISC_C1: f64 = PI / 3.0;
/// `2 / (1 - r_cap/2)`.
pub const SPH_DISC_C2: f64 = 4.0;

/// Spherical radii `(c1 r, c2 r) / (|z|^2 + 1)` of discs about `z` nested
/// around the Euclidean disc `D(z, r)`.
pub fn sph_disc_bounds(z: Complex64, r: f64) -> Result<(f64, f64), CensusError> {
    if !(r > 0.0 && r < SPH_DISC_R_CAP) {
        return Err(CensusError::Range { r, cap: SPH_DISC_R_CAP });
    }
    let s = 1.0 + z.norm_sqr();
    Ok((SPH_DISC_C1 * r / s, SPH_DISC_C2 * r / s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn box_examples() {
        let cfg = CensusConfig::default();
        let b = boxes(&cfg).unwrap();
        let b0 = b.iter().find(|b| b.k == 0).unwrap();
        assert_eq!(b0.re, (0.3, PI - 0.3));
        assert_eq!(b0.im, (-12.0, 12.0));
        let b1 = b.iter().find(|b| b.k == 1).unwrap();
        assert_abs_diff_eq!(b1.re.0 - b0.re.1, 0.6, epsilon = 1e-14);
        assert!(b0.contains(c(FRAC_PI_2, 0.0)));
        let bad = CensusConfig {
            delta: FRAC_PI_2,
            ..cfg
        };
        assert!(matches!(boxes(&bad), Err(CensusError::Config(_))));
    }

    #[test]
    fn anchor_examples() {
        let map = MapSpec::sine_newton();
        let w = pole_preimage(&map, 0, c(5.0 * PI, 0.0), 0.1).unwrap();
        assert_abs_diff_eq!(w.re, 1.641_769_355, epsilon = 1e-9);
        let cfg = CensusConfig::default();
        let a = locate_component_anchor(0, 5, &cfg).unwrap();
        let b = locate_component_anchor(3, 8, &cfg).unwrap();
        assert_abs_diff_eq!((b - a).re, 3.0 * PI, epsilon = 1e-14);
        assert_eq!((b - a).im, 0.0);
        assert!((a - c(FRAC_PI_2, 0.0)).norm() < 0.1);
        assert!(matches!(locate_component_anchor(0, 0, &cfg), Err(CensusError::ExcludedPair { .. })));
        assert!(matches!(locate_component_anchor(0, 1, &cfg), Err(CensusError::ExcludedPair { .. })));
    }

    #[test]
    fn verdict_matches_plain_iteration() {
        let map = MapSpec::sine_newton();
        let cfg = CensusConfig::default();
        let att = map.attractors();
        for &z in &[c(1.0, 0.0), c(4.0, 0.0), c(0.3, 5.0), c(2.0, -1.0), c(-4.0, 0.7)] {
            let full = crate::maps::classify_orbit(&map, z, &att, 2000, 1e-9, 1e6);
            let fast = census_verdict(&map, z, &cfg);
            match full.verdict {
                crate::maps::Verdict::Converged(k) => assert_eq!(fast, Some(k), "{z}"),
                _ => assert_eq!(fast, None),
            }
        }
        assert_eq!(census_verdict(&map, c(FRAC_PI_2, 0.0), &cfg), None);
    }

    #[test]
    fn sph_disc_examples() {
        let (i, o) = sph_disc_bounds(c(0.0, 0.0), 1e-3).unwrap();
        assert!(i <= 2e-3 && 2e-3 <= o);
        let (i, o) = sph_disc_bounds(c(10.0, 0.0), 0.1).unwrap();
        assert!(o / i < 4.0);
        assert!(sph_disc_bounds(c(0.0, 0.0), 1.0).is_err());
        // frozen constants
        assert_abs_diff_eq!(SPH_DISC_C1, 2.0 * (1.0f64.atan() / 1.0) / 1.5, epsilon = 1e-15);
        assert_eq!(SPH_DISC_C2, 2.0 / (1.0 - 0.5));
    }

    #[test]
    fn whyburn_and_summability_edge_cases() {
        assert_eq!(whyburn_count(&[], 0.1), 0);
        let r = summability_report(&[]).unwrap();
        assert_eq!(r.total, GroupSums::default());
        assert!(r.by_band.is_empty());
        assert_eq!(r.decay_exponent, None);
    }

    fn small() -> CensusConfig {
        CensusConfig {
            k_range: (-2, 2),
            l_range: (-6, 6),
            ..CensusConfig::default()
        }
    }

    #[test]
    fn level_counts() {
        let cfg = CensusConfig { depth: 0, ..small() };
        let out = census(&cfg).unwrap();
        assert_eq!(out.records.len(), 5);
        assert!(out.records.iter().all(|r| r.level == 0 && r.k == r.l && r.anchor == c(r.k as f64 * PI, 0.0)));
        let cfg = CensusConfig { depth: 1, ..small() };
        let out = census(&cfg).unwrap();
        assert_eq!(out.records.iter().filter(|r| r.level == 1).count(), 5 * 13 - 2 * 5);
        let map = MapSpec::sine_newton();
        for r in out.records.iter().filter(|r| r.level == 1) {
            assert!((r.anchor - map.pole(r.k).unwrap()).norm() < cfg.eps_pole);
            assert!(r.diam_sph <= PI && r.area_sph <= 4.0 * PI);
        }
    }

    #[test]
    fn extent_examples() {
        let cfg = small();
        let u0 = basin_record(0, &cfg);
        let poles = crate::metrics::sph_dist_c(c(-FRAC_PI_2, 0.0), c(FRAC_PI_2, 0.0));
        assert!(u0.diam_sph >= poles && u0.diam_sph > 1.0);
        let a = locate_component_anchor(0, 5, &cfg).unwrap();
        let e = component_extent(a, 5, &BoxRect::new(0, cfg.delta, cfg.r_box), Vec::new(), &cfg);
        assert!(!e.cells.is_empty() && e.diam_sph < 0.2);
        // a seed in the wrong basin grows nothing
        let e = component_extent(a, 7, &BoxRect::new(0, cfg.delta, cfg.r_box), Vec::new(), &cfg);
        assert_eq!((e.diam_sph, e.area_sph), (0.0, 0.0));
    }

    #[test]
    fn diameter_of_antipodes() {
        assert_abs_diff_eq!(spherical_diameter(&[c(0.0, 0.0)], true), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(spherical_diameter(&[c(1.0, 0.0), c(-1.0, 0.0)], false), PI, epsilon = 1e-7);
        assert_eq!(spherical_diameter(&[c(1.0, 0.0)], false), 0.0);
    }
}
