use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use num_complex::Complex64;
use petallab::io::{census_csv, decode_curve, encode_curve, encode_ppm, read_curve, write_image, CENSUS_HEADER};
use petallab_core::render::Image;

fn petallab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_petallab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("PETALLAB_THREADS")
        .output()
        .expect("binary runs")
}

#[test]
fn one_pixel_ppm_layout() {
    let img = Image::filled(1, 1, [255, 255, 255]);
    let bytes = encode_ppm(&img);
    assert_eq!(&bytes[..11], b"P6\n1 1\n255\n");
    assert_eq!(&bytes[11..], &[255, 255, 255]);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a/b.ppm");
    write_image(&img, &p).unwrap();
    assert_eq!(fs::read(&p).unwrap(), bytes);
    let empty = Image::filled(0, 0, [0, 0, 0]);
    let err = write_image(&empty, &dir.path().join("e.ppm")).unwrap_err();
    assert!(err.to_string().contains("e.ppm"));
}

#[test]
fn curve_files_round_trip() {
    let samples: Vec<(f64, Complex64)> = (0..10).map(|i| (i as f64 / 10.0, Complex64::new(i as f64, -0.5))).collect();
    let bytes = encode_curve(&samples);
    assert_eq!(bytes.len(), 240);
    assert_eq!(&bytes[8..16], &0.0f64.to_le_bytes());
    assert_eq!(decode_curve(&bytes).unwrap(), samples);
    assert!(decode_curve(&bytes[..23]).is_none());
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.bin");
    fs::write(&p, &bytes).unwrap();
    assert_eq!(read_curve(&p).unwrap(), samples);
}

#[test]
fn census_csv_has_stable_columns() {
    assert_eq!(census_csv(&[]), format!("{CENSUS_HEADER}\n"));
}

#[test]
fn render_writes_ppm() {
    let dir = tempfile::tempdir().unwrap();
    let o = petallab(&["render", "--map", "sine_newton", "--center", "0+0i", "--width", "12", "--px", "64"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = fs::read(dir.path().join("render.ppm")).unwrap();
    assert!(bytes.starts_with(b"P6\n64 64\n255\n"));
    assert_eq!(bytes.len(), 13 + 64 * 64 * 3);
}

#[test]
fn census_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = petallab(&["census", "--depth", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("census.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CENSUS_HEADER));
    assert_eq!(lines.count(), 5 + 75);
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("census_summary.json")).unwrap()).unwrap();
    let eps: Vec<f64> = summary["whyburn"].as_array().unwrap().iter().map(|w| w["eps"].as_f64().unwrap()).collect();
    assert_eq!(eps, [0.5, 0.2, 0.1, 0.05]);
}

#[test]
fn trace_boundary_writes_curves_and_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let o = petallab(
        &["trace-boundary", "--map", "power_d", "--degree", "2", "--levels", "3", "--samples", "128", "--overlay-image", "--px", "64"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for n in 0..=3 {
        let c = read_curve(&dir.path().join(format!("curve_{n:02}.bin"))).unwrap();
        let r = 0.5f64.powf(0.5f64.powi(n));
        assert!(c.iter().all(|(_, z)| (z.norm() - r).abs() < 1e-9));
    }
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["cauchy_moduli"].as_array().unwrap().len(), 3);
    assert!(dir.path().join("overlay.ppm").exists());
    // the curves can be overlaid on a later render
    let curve = dir.path().join("curve_03.bin");
    let o = petallab(
        &["render", "--map", "power_d", "--degree", "2", "--width", "3", "--px", "32", "--overlay", curve.to_str().unwrap()],
        &dir.path().join("r"),
    );
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_petals_passes_at_default_height_and_fails_low() {
    let dir = tempfile::tempdir().unwrap();
    let o = petallab(&["verify-petals", "--map", "sine_newton", "--M", "10"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("petals.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["petals"].as_array().unwrap().len(), 2);
    assert!(report["petals"][0]["worst_point"].is_array());
    // below the real axis the upper petal is not forward invariant
    let o = petallab(&["verify-petals", "--M=-5", "--burn-in", "0"], &dir.path().join("low"));
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("left the petal"));
}

#[test]
fn verify_metrics_reports_each_orbit() {
    let dir = tempfile::tempdir().unwrap();
    let o = petallab(&["verify-metrics", "--orbits", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("metrics.json")).unwrap()).unwrap();
    let orbits = report["orbits"].as_array().unwrap();
    assert_eq!(orbits.len(), 3);
    let keys: Vec<&str> = orbits[0].as_object().unwrap().keys().map(|k| k.as_str()).collect();
    for k in ["metric", "orbit_id", "min_margin", "violations"] {
        assert!(keys.contains(&k));
    }
    // z^2 contracts near 0, so a unit expansion bound fails
    let o = petallab(&["verify-metrics", "--map", "power_d", "--degree", "2", "--metric", "euclidean", "--steps", "3", "--starts", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_and_config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(petallab(&["bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(petallab(&["render", "--map", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(petallab(&["render", "--center", "1+x"], dir.path()).status.code(), Some(2));
    assert_eq!(petallab(&["census", "--delta", "2.0"], dir.path()).status.code(), Some(2));
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"render": {"pixels": 3}}"#).unwrap();
    assert_eq!(petallab(&["render", "--config", cfg.to_str().unwrap()], dir.path()).status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"threads": 2, "render": {"px": 16, "py": 8, "width": 4.0, "coloring": "julia-mask"}}"#).unwrap();
    let o = petallab(&["render", "--config", cfg.to_str().unwrap()], &dir.path().join("a"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read(dir.path().join("a/render.ppm")).unwrap().starts_with(b"P6\n16 8\n255\n"));
    let o = petallab(&["render", "--config", cfg.to_str().unwrap(), "--px", "10", "--py", "5"], &dir.path().join("b"));
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read(dir.path().join("b/render.ppm")).unwrap().starts_with(b"P6\n10 5\n255\n"));
}
