//! CSV writers. Each file starts with one `#` metadata line.

use std::fmt::Write as _;

use pnc_core::rates::{Table3Row, Table4Row, TABLE4_SCHEMES};
use pnc_core::rates::Scheme;
use pnc_netsched::InstanceResult;

use crate::ber::{BerPoint, BerScheme};
use crate::tables::LocusPoint;

pub const GENERATOR: &str = "ChaCha8Rng";

pub fn metadata(seed: u64) -> String {
    format!("# pnc-lab v{} seed={seed} generator={GENERATOR}\n", env!("CARGO_PKG_VERSION"))
}

pub fn ber_csv(points: &[BerPoint], scheme: BerScheme, delta: f64, phi: f64, seed: u64) -> String {
    let mut s = metadata(seed);
    s.push_str("ebn0_db,errors,bits,ber,ci_low,ci_high,scheme,delta,phi,seed\n");
    for p in points {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{scheme},{delta},{phi},{seed}",
            p.ebn0_db, p.errors, p.bits, p.ber, p.ci_low, p.ci_high
        );
    }
    s
}

pub fn table3_csv(rows: &[Table3Row]) -> String {
    let mut s = metadata(0);
    let names: Vec<&str> = Scheme::ACHIEVABLE.iter().map(|x| x.name()).collect();
    let gaps: Vec<String> = names.iter().map(|n| format!("gap_{n}")).collect();
    let _ = writeln!(s, "p_db,{},CUTSET,{}", names.join(","), gaps.join(","));
    for r in rows {
        let rates: Vec<String> = r.rates.iter().map(f64::to_string).collect();
        let gaps: Vec<String> = r.gaps.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "{},{},{},{}", r.p_db, rates.join(","), r.bound, gaps.join(","));
    }
    s
}

pub fn table4_csv(rows: &[Table4Row]) -> String {
    let mut s = metadata(0);
    let names: Vec<String> = TABLE4_SCHEMES.iter().map(|x| format!("E_{}_db", x.name())).collect();
    let _ = writeln!(s, "p_snc_db,rate,{}", names.join(","));
    for r in rows {
        let e: Vec<String> = r.energy_db.iter().map(f64::to_string).collect();
        let _ = writeln!(s, "{},{},{}", r.p_snc_db, r.rate, e.join(","));
    }
    s
}

pub fn locus_csv(points: &[LocusPoint]) -> String {
    let mut s = metadata(0);
    s.push_str("t_u,U12,U21,R12_LC,R21_LC\n");
    for p in points {
        let _ = writeln!(s, "{},{},{},{},{}", p.t_u, p.u12, p.u21, p.r12_lc, p.r21_lc);
    }
    s
}

pub fn netsched_csv(rows: &[InstanceResult], seed: u64) -> String {
    let mut s = metadata(seed);
    s.push_str("N,seed,flows,M_dual,F,lambda,lambdaN_over_4\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{},{},{}", r.n, r.seed, r.flows, r.duals, r.frame_length, r.lambda, r.lambda_n_over_4);
    }
    s
}
