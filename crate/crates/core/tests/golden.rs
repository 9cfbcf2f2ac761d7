//! Counts and tour lengths frozen from a verified run. A change here means
//! the planners changed behaviour, which should be deliberate.

use hexcover::cli_bench::{run_case, Algorithm, ExperimentConfig};

fn config() -> ExperimentConfig {
    ExperimentConfig {
        mc_trials: 0,
        ..ExperimentConfig::default()
    }
}

// side, fraction, hexcover samples, diskcover samples, diskcover repairs
const COUNTS: [(f64, f64, usize, usize, usize); 9] = [
    (20.0, 0.3, 17, 15, 8),
    (20.0, 0.2, 17, 23, 16),
    (20.0, 0.1, 35, 37, 14),
    (50.0, 0.3, 55, 66, 12),
    (50.0, 0.2, 77, 106, 16),
    (50.0, 0.1, 149, 190, 40),
    (100.0, 0.3, 187, 260, 46),
    (100.0, 0.2, 295, 364, 18),
    (100.0, 0.1, 607, 650, 40),
];

// side, fraction, hexcovertour length, diskcovertour length
const TOURS: [(f64, f64, f64, f64); 3] = [
    (20.0, 0.1, 137.68193942261016, 128.03038397886422),
    (50.0, 0.2, 503.3807291347465, 519.6484483411274),
    (100.0, 0.1, 2649.0483769316043, 2635.502365159738),
];

#[test]
fn sample_counts_are_frozen() {
    let c = config();
    for (side, f, hex, disk, disk_repair) in COUNTS {
        let (h, _, _) = run_case(Algorithm::HexCover, side, side, f, &c).unwrap();
        let (d, _, _) = run_case(Algorithm::DiskCover, side, side, f, &c).unwrap();
        assert_eq!((h.n_samples, h.n_repair), (hex, 0), "hexcover {side} {f}");
        assert_eq!((d.n_samples, d.n_repair), (disk, disk_repair), "diskcover {side} {f}");
        if side * side >= 2500.0 {
            assert!(h.n_samples < d.n_samples, "{side} {f}");
        }
    }
}

#[test]
fn tour_lengths_are_frozen() {
    let c = config();
    for (side, f, hex, disk) in TOURS {
        let (h, _, _) = run_case(Algorithm::HexCoverTour, side, side, f, &c).unwrap();
        let (d, _, _) = run_case(Algorithm::DiskCoverTour, side, side, f, &c).unwrap();
        let hl = h.tour_length_m.unwrap();
        let dl = d.tour_length_m.unwrap();
        assert!((hl - hex).abs() <= 1e-9 * hex, "hexcovertour {side} {f}: {hl}");
        assert!((dl - disk).abs() <= 1e-9 * disk, "diskcovertour {side} {f}: {dl}");
    }
}
