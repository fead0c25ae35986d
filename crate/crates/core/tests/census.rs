use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::sync::OnceLock;

use petallab_core::census::{
    band_sum, census, summability_report, whyburn_count, CensusConfig, CensusOutput, ComponentRecord,
};
use petallab_core::maps::MapSpec;
use proptest::prelude::*;

fn run() -> &'static CensusOutput {
    static OUT: OnceLock<CensusOutput> = OnceLock::new();
    OUT.get_or_init(|| {
        census(&CensusConfig {
            depth: 2,
            l_range: (-8, 8),
            ..CensusConfig::default()
        })
        .unwrap()
    })
}

fn level(n: usize) -> impl Iterator<Item = &'static ComponentRecord> {
    run().records.iter().filter(move |r| r.level == n)
}

#[test]
fn records_respect_basic_bounds() {
    let out = run();
    assert!(out.warnings.is_empty(), "{:?}", out.warnings);
    for r in &out.records {
        assert!(r.diam_sph <= PI + 1e-12 && r.area_sph <= 4.0 * PI);
        if r.level >= 1 {
            assert!(r.l != r.k && r.l != r.k + 1);
            assert_eq!(r.branch_path.len(), r.level - 1);
        }
    }
    assert_eq!(level(0).count(), 5);
    assert_eq!(level(1).count(), 5 * 17 - 10);
    assert!(level(2).count() > 0);
}

#[test]
fn cells_are_disjoint_within_each_box() {
    let mut seen: BTreeSet<(i64, u64, i32, i32)> = BTreeSet::new();
    for r in run().records.iter().filter(|r| r.level >= 1) {
        for &(i, j) in &r.extent.cells {
            assert!(seen.insert((r.box_index, r.extent.step.to_bits(), i, j)), "cell shared at level {}", r.level);
        }
    }
}

#[test]
fn f_is_injective_on_level_one_samples() {
    let f = MapSpec::sine_newton();
    for r in level(1) {
        let mut images: Vec<(f64, f64)> = r
            .extent
            .cells
            .iter()
            .map(|&c| {
                let w = f.eval_finite(r.extent.cell_center(c)).unwrap();
                (w.re, w.im)
            })
            .collect();
        images.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(images.windows(2).all(|w| w[0] != w[1]));
    }
}

#[test]
fn diameters_decay_and_bands_shrink() {
    let recs = &run().records;
    let s = summability_report(recs).unwrap();
    let e = s.decay_exponent.unwrap();
    assert!((0.8..=1.3).contains(&e), "exponent {e}");
    let near = band_sum(recs, 2, 4);
    let far = band_sum(recs, 8, 16);
    assert!(near.diam_sq > far.diam_sq && far.count > 0);
    let parts: f64 = s.by_level.iter().map(|g| g.area).sum();
    assert!((parts - s.total.area).abs() < 1e-12 * s.total.area);
}

#[test]
fn conjugate_children_match() {
    // z -> conj z commutes with the map and fixes each U_{0,l}
    for r in level(2).filter(|r| r.box_index == 0) {
        let twin = level(2).find(|o| o.l == r.l && o.k == r.k && (o.anchor - r.anchor.conj()).norm() < 0.1);
        if let Some(t) = twin {
            assert!((t.diam_sph - r.diam_sph).abs() < 0.02 * r.diam_sph.max(1e-3));
        }
    }
}

proptest! {
    #[test]
    fn whyburn_count_is_monotone(a in 0.0..3.5f64, b in 0.0..3.5f64) {
        let recs = &run().records;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(whyburn_count(recs, hi) <= whyburn_count(recs, lo));
    }
}

#[test]
fn whyburn_edge_values() {
    let recs = &run().records;
    assert_eq!(whyburn_count(recs, PI + 0.1), 0);
    assert_eq!(whyburn_count(recs, 1e-300), recs.iter().filter(|r| r.diam_sph > 0.0).count());
    let shallow: Vec<ComponentRecord> = recs.iter().filter(|r| r.level <= 1).cloned().collect();
    assert_eq!(whyburn_count(&shallow, 0.5), whyburn_count(recs, 0.5));
}
