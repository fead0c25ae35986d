//! PPM images, binary curve files, census CSV and JSON reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use petallab_core::boundary::ClosedCurve;
use petallab_core::census::{Branch, ComponentRecord};
use petallab_core::render::Image;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, bytes).map_err(io_err(path))
}

/// Binary PPM (`P6`), 8-bit RGB, top row first.
pub fn encode_ppm(img: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

pub fn write_image(img: &Image, path: &Path) -> Result<(), IoError> {
    if img.width == 0 || img.height == 0 || img.data.len() != img.width * img.height * 3 {
        return Err(IoError::Format {
            path: path.to_path_buf(),
            msg: "empty or inconsistent image buffer".into(),
        });
    }
    write_bytes(path, &encode_ppm(img))
}

/// Little-endian `(theta, re, im)` f64 triples.
pub fn encode_curve(samples: &[(f64, Complex64)]) -> Vec<u8> {
    let mut out = Vec::with_capacity(samples.len() * 24);
    for (t, z) in samples {
        out.extend_from_slice(&t.to_le_bytes());
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

pub fn decode_curve(bytes: &[u8]) -> Option<Vec<(f64, Complex64)>> {
    if !bytes.len().is_multiple_of(24) {
        return None;
    }
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8-byte chunk"));
    Some(
        bytes
            .chunks_exact(24)
            .map(|c| (f(&c[0..8]), Complex64::new(f(&c[8..16]), f(&c[16..24]))))
            .collect(),
    )
}

pub fn write_curve(curve: &ClosedCurve, path: &Path) -> Result<(), IoError> {
    write_bytes(path, &encode_curve(&curve.samples))
}

pub fn read_curve(path: &Path) -> Result<Vec<(f64, Complex64)>, IoError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    decode_curve(&bytes).ok_or_else(|| IoError::Format {
        path: path.to_path_buf(),
        msg: "length is not a multiple of 24 bytes".into(),
    })
}

/// Fixed 17-significant-digit float formatting.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_branch_path(path: &[Branch]) -> String {
    let parts: Vec<String> = path
        .iter()
        .map(|b| match b {
            Branch::Pole(k) => k.to_string(),
            Branch::Petal => "P".to_string(),
        })
        .collect();
    parts.join(";")
}

pub const CENSUS_HEADER: &str = "level,k,l,branch_path,anchor_re,anchor_im,diam_sph,area_sph,samples";

pub fn census_csv(records: &[ComponentRecord]) -> String {
    let mut s = String::from(CENSUS_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.level,
            r.k,
            r.l,
            fmt_branch_path(&r.branch_path),
            fmt_f64(r.anchor.re),
            fmt_f64(r.anchor.im),
            fmt_f64(r.diam_sph),
            fmt_f64(r.area_sph),
            r.sample_count
        );
    }
    s
}

pub fn write_text(text: &str, path: &Path) -> Result<(), IoError> {
    write_bytes(path, text.as_bytes())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), IoError> {
    write_text(&to_json(value), path)
}
