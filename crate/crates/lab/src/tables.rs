use pnc_core::rates::{cutset_locus, db_to_lin, pnc_lc_locus, table3, table4, LinkPowers, Table3Row, Table4Row};

use crate::{LabError, Result};

pub fn run_table3(p_db: &[f64]) -> Result<Vec<Table3Row>> {
    if p_db.is_empty() {
        return Err(LabError::usage("empty grid"));
    }
    Ok(table3(p_db)?)
}

pub fn run_table4(p_snc_db: &[f64]) -> Result<Vec<Table4Row>> {
    if p_snc_db.is_empty() {
        return Err(LabError::usage("empty grid"));
    }
    Ok(table4(p_snc_db)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocusPoint {
    pub t_u: f64,
    pub u12: f64,
    pub u21: f64,
    pub r12_lc: f64,
    pub r21_lc: f64,
}

/// Cut-set corner and lattice-code rates at `steps` evenly spaced uplink
/// fractions from 0 to 1. Powers are linear: P1R, P2R, PR1, PR2.
pub fn run_locus(powers: &LinkPowers, steps: usize) -> Result<Vec<LocusPoint>> {
    if steps < 2 {
        return Err(LabError::usage("locus needs at least 2 steps"));
    }
    let caps = powers.capacities()?;
    (0..steps)
        .map(|i| {
            let t_u = i as f64 / (steps - 1) as f64;
            let (u12, u21) = cutset_locus(&caps, t_u);
            let (r12_lc, r21_lc) = pnc_lc_locus(powers, t_u)?;
            Ok(LocusPoint { t_u, u12, u21, r12_lc, r21_lc })
        })
        .collect()
}

/// Parses four comma separated powers in dB.
pub fn parse_powers_db(text: &str) -> Result<LinkPowers> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| LabError::usage(format!("bad power list {text:?}"))))
        .collect::<Result<_>>()?;
    match v.as_slice() {
        &[a, b, c, d] if v.iter().all(|x| x.is_finite()) => {
            Ok(LinkPowers { p1r: db_to_lin(a), p2r: db_to_lin(b), pr1: db_to_lin(c), pr2: db_to_lin(d) })
        }
        _ => Err(LabError::usage("expected four finite powers in dB: P1R,P2R,PR1,PR2")),
    }
}
