//! Dynamical-plane rendering into an RGB buffer.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::RenderError;
use crate::exec::{Executor, Sequential};
use crate::maps::{classify_orbit, MapSpec, Verdict};

pub type Rgb = [u8; 3];

/// Basin colors, keyed by `k mod 8`.
pub const PALETTE: [Rgb; 8] = [
    [230, 159, 0],
    [86, 180, 233],
    [0, 158, 115],
    [240, 228, 66],
    [0, 114, 178],
    [213, 94, 0],
    [204, 121, 167],
    [160, 200, 120],
];
/// Poles, prepoles and other Julia-set points.
pub const JULIA: Rgb = [0, 0, 0];
pub const UNDECIDED: Rgb = [128, 128, 128];
pub const ESCAPED: Rgb = [255, 255, 255];
pub const OVERLAY: Rgb = [255, 0, 0];

pub fn basin_color(k: i64) -> Rgb {
    PALETTE[k.rem_euclid(8) as usize]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    pub center: Complex64,
    pub width: f64,
    pub height: f64,
    pub pixels_x: usize,
    pub pixels_y: usize,
}

impl Viewport {
    pub fn new(center: Complex64, width: f64, height: f64, pixels_x: usize, pixels_y: usize) -> Result<Self, RenderError> {
        let v = Viewport {
            center,
            width,
            height,
            pixels_x,
            pixels_y,
        };
        v.validate()?;
        Ok(v)
    }

    /// Square pixels: the height follows from the width and pixel counts.
    pub fn square(center: Complex64, width: f64, pixels_x: usize, pixels_y: usize) -> Result<Self, RenderError> {
        let height = width * pixels_y as f64 / pixels_x.max(1) as f64;
        Self::new(center, width, height, pixels_x, pixels_y)
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        if !(self.width > 0.0 && self.height > 0.0 && self.width.is_finite() && self.height.is_finite()) {
            return Err(RenderError::Viewport("extents must be positive"));
        }
        if self.pixels_x == 0 || self.pixels_y == 0 {
            return Err(RenderError::Viewport("pixel counts must be positive"));
        }
        if !(self.center.re.is_finite() && self.center.im.is_finite()) {
            return Err(RenderError::Viewport("center must be finite"));
        }
        let a = self.pixels_y as f64 / self.pixels_x as f64;
        let b = self.height / self.width;
        if (a - b).abs() > 0.01 * b {
            return Err(RenderError::Viewport("aspect ratio mismatch"));
        }
        Ok(())
    }

    /// Center of pixel `(x, y)`; row 0 is the top.
    pub fn pixel_center(&self, x: usize, y: usize) -> Complex64 {
        let re = self.center.re - self.width / 2.0 + (x as f64 + 0.5) * self.width / self.pixels_x as f64;
        let im = self.center.im + self.height / 2.0 - (y as f64 + 0.5) * self.height / self.pixels_y as f64;
        Complex64::new(re, im)
    }

    /// Fractional pixel coordinates of `z`.
    pub fn to_pixel(&self, z: Complex64) -> (f64, f64) {
        let x = (z.re - (self.center.re - self.width / 2.0)) * self.pixels_x as f64 / self.width;
        let y = ((self.center.im + self.height / 2.0) - z.im) * self.pixels_y as f64 / self.height;
        (x, y)
    }

    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let (x, y) = self.to_pixel(z);
        (x >= 0.0 && y >= 0.0 && x < self.pixels_x as f64 && y < self.pixels_y as f64).then_some((x as usize, y as usize))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coloring {
    BasinIndex,
    IterationShade,
    JuliaMask,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderJob {
    pub map: MapSpec,
    pub viewport: Viewport,
    pub max_iter: usize,
    pub coloring: Coloring,
    pub tol: f64,
    pub escape_radius: f64,
    /// Closed polylines drawn on top in [`OVERLAY`].
    pub overlay: Vec<Vec<Complex64>>,
}

impl RenderJob {
    pub fn new(map: MapSpec, viewport: Viewport) -> Self {
        RenderJob {
            map,
            viewport,
            max_iter: 200,
            coloring: Coloring::BasinIndex,
            tol: 1e-9,
            escape_radius: 1e6,
            overlay: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        self.viewport.validate()?;
        if self.max_iter == 0 {
            return Err(RenderError::Job("max_iter must be at least 1"));
        }
        if !(self.tol > 0.0 && self.escape_radius > 0.0) {
            return Err(RenderError::Job("tolerances must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    /// Row-major RGB, top row first.
    pub data: Vec<u8>,
}

impl Image {
    pub fn filled(width: usize, height: usize, c: Rgb) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&c);
        }
        Image { width, height, data }
    }

    pub fn pixel(&self, x: usize, y: usize) -> Rgb {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, c: Rgb) {
        let i = 3 * (y * self.width + x);
        self.data[i..i + 3].copy_from_slice(&c);
    }
}

fn shade(c: Rgb, steps: usize, max_iter: usize) -> Rgb {
    let m = max_iter as u64;
    let s = steps.min(max_iter) as u64;
    let f = |v: u8| (v as u64 * (4 * m - 3 * s) / (4 * m)) as u8;
    [f(c[0]), f(c[1]), f(c[2])]
}

pub fn pixel_color(job: &RenderJob, attractors: &crate::maps::AttractorSet, z: Complex64) -> Rgb {
    let r = classify_orbit(&job.map, z, attractors, job.max_iter, job.tol, job.escape_radius);
    match (r.verdict, job.coloring) {
        (Verdict::Undecided, _) => UNDECIDED,
        (Verdict::Prepole(_), _) => JULIA,
        (Verdict::Escaped, Coloring::JuliaMask) => ESCAPED,
        (Verdict::Escaped, Coloring::IterationShade) => shade(ESCAPED, r.steps_used, job.max_iter),
        (Verdict::Escaped, Coloring::BasinIndex) => ESCAPED,
        (Verdict::Converged(_), Coloring::JuliaMask) => ESCAPED,
        (Verdict::Converged(k), Coloring::BasinIndex) => basin_color(k),
        (Verdict::Converged(k), Coloring::IterationShade) => shade(basin_color(k), r.steps_used, job.max_iter),
    }
}

/// Draw the closed polyline `pts` with a DDA line walk.
pub fn draw_curve(img: &mut Image, vp: &Viewport, pts: &[Complex64], color: Rgb) {
    if pts.is_empty() {
        return;
    }
    let mut plot = |x: f64, y: f64| {
        if x >= 0.0 && y >= 0.0 && x < img.width as f64 && y < img.height as f64 {
            img.set(x as usize, y as usize, color);
        }
    };
    for i in 0..pts.len() {
        let (x0, y0) = vp.to_pixel(pts[i]);
        let (x1, y1) = vp.to_pixel(pts[(i + 1) % pts.len()]);
        if !(x0.is_finite() && y0.is_finite() && x1.is_finite() && y1.is_finite()) {
            continue;
        }
        let n = (x1 - x0).abs().max((y1 - y0).abs()).ceil().min(1e6) as usize;
        for s in 0..=n {
            let t = if n == 0 { 0.0 } else { s as f64 / n as f64 };
            plot(x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        }
    }
}

pub fn render(job: &RenderJob) -> Result<Image, RenderError> {
    render_with(&Sequential, job)
}

/// Classify every pixel center, one row per task, then draw the overlays.
pub fn render_with<E: Executor>(exec: &E, job: &RenderJob) -> Result<Image, RenderError> {
    job.validate()?;
    let vp = job.viewport;
    let att = job.map.attractors();
    let rows = exec.run(vp.pixels_y, |y| {
        let mut row = Vec::with_capacity(vp.pixels_x * 3);
        for x in 0..vp.pixels_x {
            row.extend_from_slice(&pixel_color(job, &att, vp.pixel_center(x, y)));
        }
        row
    });
    let mut img = Image {
        width: vp.pixels_x,
        height: vp.pixels_y,
        data: rows.concat(),
    };
    for curve in &job.overlay {
        draw_curve(&mut img, &vp, curve, OVERLAY);
    }
    Ok(img)
}
