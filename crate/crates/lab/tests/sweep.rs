use std::f64::consts::FRAC_PI_4;

use pnc_lab::csv::ber_csv;
use pnc_lab::stats::significantly_lower;
use pnc_lab::tables::{parse_powers_db, run_locus};
use pnc_lab::{run_ber_sweep, run_ber_sweeps, BerScheme, ExperimentConfig, ExperimentKind, LabError};

fn uncoded(delta: f64, phi: f64, grid: &[f64], packets: usize) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(ExperimentKind::BerUncoded);
    c.delta = delta;
    c.phi = phi;
    c.ebn0_grid = grid.to_vec();
    c.packets = packets;
    c
}

fn csv_of(c: &ExperimentConfig) -> String {
    ber_csv(&run_ber_sweep(c).unwrap(), c.scheme, c.delta, c.phi, c.seed)
}

#[test]
fn same_seed_same_bytes() {
    let mut c = uncoded(0.3, 0.2, &[2.0, 6.0], 20);
    c.source_bits = 256;
    let a = csv_of(&c);
    assert_eq!(a, csv_of(&c));
    c.seed += 1;
    assert_ne!(a, csv_of(&c));
}

#[test]
fn worker_count_does_not_matter() {
    let mut c = ExperimentConfig::new(ExperimentKind::BerCoded);
    c.scheme = BerScheme::XorCd;
    c.source_bits = 64;
    c.packets = 12;
    c.ebn0_grid = vec![1.0];
    let run = |threads| rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run_ber_sweep(&c).unwrap());
    assert_eq!(run(1), run(3));
}

#[test]
fn noise_free_point_is_error_free() {
    for delta in [0.0, 0.5] {
        let c = uncoded(delta, FRAC_PI_4, &[f64::INFINITY], 10);
        assert_eq!(run_ber_sweep(&c).unwrap()[0].errors, 0);
        let mut c = ExperimentConfig::new(ExperimentKind::BerCoded);
        c.delta = delta;
        c.source_bits = 128;
        c.packets = 4;
        c.ebn0_grid = vec![f64::INFINITY];
        for curve in run_ber_sweeps(&c, &[BerScheme::JointCnc, BerScheme::MudXor, BerScheme::XorCd]).unwrap() {
            assert_eq!(curve[0].ber, 0.0);
            assert!(curve[0].ci_high > 0.0);
        }
    }
}

#[test]
fn uncoded_waterfall_is_strictly_decreasing() {
    let pts = run_ber_sweep(&uncoded(0.0, 0.0, &[0.0, 2.0, 4.0, 6.0, 8.0], 200)).unwrap();
    assert!(pts.windows(2).all(|w| w[1].ber < w[0].ber), "{pts:?}");
    for p in &pts {
        assert!(p.ci_low <= p.ber && p.ber <= p.ci_high);
    }
}

#[test]
fn symbol_offset_softens_the_phase_penalty() {
    let at = |delta| run_ber_sweep(&uncoded(delta, FRAC_PI_4, &[8.0], 100)).unwrap()[0];
    let (offset, aligned) = (at(0.5), at(0.0));
    assert!(significantly_lower(offset.errors, offset.bits, aligned.errors, aligned.bits), "{offset:?} {aligned:?}");
}

#[test]
fn mismatched_scheme_lists_are_rejected() {
    let c = uncoded(0.0, 0.0, &[1.0], 1);
    assert!(matches!(run_ber_sweeps(&c, &[BerScheme::XorCd]), Err(LabError::Usage(_))));
    let mut c = c;
    c.ebn0_grid.clear();
    assert_eq!(run_ber_sweep(&c).unwrap_err().exit_code(), 2);
}

#[test]
fn locus_endpoints_and_downlink_limit() {
    let powers = parse_powers_db("10,4,7,12").unwrap();
    let pts = run_locus(&powers, 201).unwrap();
    for p in [pts[0], pts[200]] {
        assert_eq!([p.u12, p.u21, p.r12_lc, p.r21_lc], [0.0; 4]);
    }
    for p in &pts[190..200] {
        assert_eq!((p.u12, p.u21), (p.r12_lc, p.r21_lc), "t_u = {}", p.t_u);
    }
    assert!(run_locus(&powers, 1).is_err());
    assert!(parse_powers_db("1,2,3").is_err());
}
