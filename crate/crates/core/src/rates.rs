//! Information-theoretic rates and energies for the symmetric two-way relay
//! channel. Noise power is normalized to 1, so powers are SNRs. Everything is
//! linear internally; dB only at the edges.

use crate::error::{PncError, Result};
use std::fmt;
use std::str::FromStr;

pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    PncLc,
    PncMud,
    Snc,
    Anc,
    Ts,
    Cutset,
}

impl Scheme {
    /// The five achievable schemes in table order.
    pub const ACHIEVABLE: [Scheme; 5] = [Scheme::PncLc, Scheme::PncMud, Scheme::Snc, Scheme::Anc, Scheme::Ts];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::PncLc => "PNC_LC",
            Scheme::PncMud => "PNC_MUD",
            Scheme::Snc => "SNC",
            Scheme::Anc => "ANC",
            Scheme::Ts => "TS",
            Scheme::Cutset => "CUTSET",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "PNC_LC" | "LC" => Ok(Scheme::PncLc),
            "PNC_MUD" | "MUD" => Ok(Scheme::PncMud),
            "SNC" => Ok(Scheme::Snc),
            "ANC" => Ok(Scheme::Anc),
            "TS" => Ok(Scheme::Ts),
            "CUTSET" | "U" => Ok(Scheme::Cutset),
            _ => Err(format!("unknown scheme {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkPowers {
    pub p1r: f64,
    pub p2r: f64,
    pub pr1: f64,
    pub pr2: f64,
}

impl LinkPowers {
    pub fn symmetric(p: f64) -> Self {
        Self { p1r: p, p2r: p, pr1: p, pr2: p }
    }

    pub fn capacities(&self) -> Result<LinkCapacities> {
        Ok(LinkCapacities {
            c1r: capacity_awgn(self.p1r)?,
            c2r: capacity_awgn(self.p2r)?,
            cr1: capacity_awgn(self.pr1)?,
            cr2: capacity_awgn(self.pr2)?,
        })
    }
}

/// Link capacities in bits per channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkCapacities {
    pub c1r: f64,
    pub c2r: f64,
    pub cr1: f64,
    pub cr2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateOperatingPoint {
    pub scheme: Scheme,
    pub p: f64,
    pub t_u: f64,
    pub r12: f64,
    pub r21: f64,
    pub energy: Option<f64>,
}

pub fn capacity_awgn(p: f64) -> Result<f64> {
    if p.is_nan() || p < 0.0 {
        return Err(PncError::InvalidParameter { name: "p", value: p });
    }
    Ok(0.5 * (1.0 + p).log2())
}

/// Cut-set bounds (U12, U21) at uplink fraction `t_u`.
pub fn cutset_locus(caps: &LinkCapacities, t_u: f64) -> (f64, f64) {
    let td = 1.0 - t_u;
    ((t_u * caps.c1r).min(td * caps.cr2), (t_u * caps.c2r).min(td * caps.cr1))
}

const REGION_TOL: f64 = 1e-12;

/// r / c with the conventions 0/0 = 0 and r/0 = ∞ for r > 0.
fn ratio(r: f64, c: f64) -> f64 {
    if c > 0.0 {
        r / c
    } else if r > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Whether (r12, r21) lies in the closed cut-set region.
pub fn cutset_region_check(caps: &LinkCapacities, r12: f64, r21: f64) -> bool {
    if r12 < 0.0 || r21 < 0.0 {
        return false;
    }
    // 1/C21 ≥ 1/C2R + 1/CR1, written as C21·(1/C2R + 1/CR1) ≤ 1
    let h21 = ratio(r21, caps.c2r) + ratio(r21, caps.cr1);
    let h12 = ratio(r12, caps.c1r) + ratio(r12, caps.cr2);
    // c2r/cr1 ≥ c1r/cr2 decides which line has the negative slope
    let third = if caps.c2r * caps.cr2 >= caps.c1r * caps.cr1 {
        ratio(r21, caps.cr1) + ratio(r12, caps.c1r)
    } else {
        ratio(r21, caps.c2r) + ratio(r12, caps.cr2)
    };
    h21 <= 1.0 + REGION_TOL && h12 <= 1.0 + REGION_TOL && third <= 1.0 + REGION_TOL
}

/// Lattice-code uplink rates (r1R, r2R), clamped at zero.
pub fn pnc_lc_uplink_rates(p1r: f64, p2r: f64) -> (f64, f64) {
    let total = p1r + p2r;
    let r = |pi: f64| (0.5 * (pi / total + pi).log2()).max(0.0);
    (r(p1r), r(p2r))
}

/// End-to-end lattice-code rates (R12, R21) at uplink fraction `t_u`.
pub fn pnc_lc_locus(powers: &LinkPowers, t_u: f64) -> Result<(f64, f64)> {
    let caps = powers.capacities()?;
    let (r1r, r2r) = pnc_lc_uplink_rates(powers.p1r, powers.p2r);
    let td = 1.0 - t_u;
    Ok(((t_u * r1r).min(td * caps.cr2), (t_u * r2r).min(td * caps.cr1)))
}

/// Symmetric exchange rate and uplink fraction with all powers equal to `p`.
pub fn symmetric_rate(scheme: Scheme, p: f64) -> Result<RateOperatingPoint> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(PncError::InvalidParameter { name: "p", value: p });
    }
    let a = (1.0 + p).log2();
    let (rate, t_u) = match scheme {
        Scheme::PncLc => {
            let b = (0.5 + p).log2();
            if b <= 0.0 {
                (0.0, 1.0)
            } else {
                (0.5 * a * b / (a + b), a / (a + b))
            }
        }
        Scheme::PncMud => {
            let c = (1.0 + 2.0 * p).log2();
            (0.25 * a * c / (a + 0.5 * c), a / (a + 0.5 * c))
        }
        Scheme::Snc => (a / 6.0, 2.0 / 3.0),
        Scheme::Ts => (a / 8.0, 0.5),
        Scheme::Anc => (0.25 * (1.0 + p * p / (3.0 * p + 1.0)).log2(), 0.5),
        Scheme::Cutset => (0.25 * a, 0.5),
    };
    Ok(RateOperatingPoint { scheme, p, t_u, r12: rate, r21: rate, energy: None })
}

/// Best of the two PNC schemes at `p`; their time-shared hull is not modelled.
pub fn pnc_best_symmetric_rate(p: f64) -> Result<f64> {
    Ok(symmetric_rate(Scheme::PncLc, p)?.r12.max(symmetric_rate(Scheme::PncMud, p)?.r12))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table3Row {
    pub p_db: f64,
    /// PNC_LC, PNC_MUD, SNC, ANC, TS.
    pub rates: [f64; 5],
    /// U12(1/2).
    pub bound: f64,
    /// bound − rate, same order as `rates`.
    pub gaps: [f64; 5],
}

pub fn table3(p_db_list: &[f64]) -> Result<Vec<Table3Row>> {
    if p_db_list.is_empty() {
        return Err(PncError::Empty);
    }
    p_db_list
        .iter()
        .map(|&p_db| {
            let p = db_to_lin(p_db);
            let mut rates = [0.0; 5];
            for (r, s) in rates.iter_mut().zip(Scheme::ACHIEVABLE) {
                *r = symmetric_rate(s, p)?.r12;
            }
            let bound = cutset_locus(&LinkPowers::symmetric(p).capacities()?, 0.5).0;
            Ok(Table3Row { p_db, rates, bound, gaps: rates.map(|r| bound - r) })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyPoint {
    pub scheme: Scheme,
    pub rate: f64,
    /// Energy spent by each node, linear.
    pub energy: f64,
    pub t_u: f64,
    /// Per-end-node uplink power.
    pub uplink_power: f64,
    /// Relay power toward each end node.
    pub downlink_power: f64,
}

const BISECT_TOL: f64 = 1e-12;

/// Root of `f` in [lo, hi] by bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(what: &'static str, mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo.is_nan() || fhi.is_nan() || flo.signum() == fhi.signum() {
        return Err(PncError::NoBracket { what, lo, hi, flo, fhi });
    }
    let neg_at_lo = flo < 0.0;
    while hi - lo > BISECT_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == neg_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Time splits strictly inside (0, 1) used to bracket the energy balance.
const T_EDGE: f64 = 1e-3;

/// Energy per node to sustain symmetric rate `r` with all three nodes
/// spending the same energy.
pub fn energy_for_rate(scheme: Scheme, r: f64) -> Result<EnergyPoint> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(PncError::InvalidParameter { name: "rate", value: r });
    }
    let point = |energy, t_u, uplink_power, downlink_power| EnergyPoint {
        scheme,
        rate: r,
        energy,
        t_u,
        uplink_power,
        downlink_power,
    };
    match scheme {
        Scheme::Snc => {
            let e = ((6.0 * r).exp2() - 1.0) / 3.0;
            Ok(point(e, 2.0 / 3.0, 3.0 * e, 3.0 * e))
        }
        Scheme::PncMud => {
            let e = ((6.0 * r).exp2() - 1.0) / 3.0;
            Ok(point(e, 2.0 / 3.0, 1.5 * e, 3.0 * e))
        }
        Scheme::Anc => {
            let k = (4.0 * r).exp2() - 1.0;
            let p = (3.0 * k + (9.0 * k * k + 4.0 * k).sqrt()) / 2.0;
            Ok(point(p / 2.0, 0.5, p, p))
        }
        Scheme::PncLc => {
            let up = |t: f64| (2.0 * r / t).exp2() - 0.5;
            let down = |t: f64| (2.0 * r / (1.0 - t)).exp2() - 1.0;
            let t = bisect("PNC_LC energy balance", T_EDGE, 1.0 - T_EDGE, |t| t * up(t) - (1.0 - t) * down(t))?;
            Ok(point(t * up(t), t, up(t), down(t)))
        }
        Scheme::Ts => {
            let up = |t: f64| (4.0 * r / t).exp2() - 1.0;
            let down = |t: f64| (4.0 * r / (1.0 - t)).exp2() - 1.0;
            let t = bisect("TS energy balance", T_EDGE, 1.0 - T_EDGE, |t| 0.5 * t * up(t) - (1.0 - t) * down(t))?;
            Ok(point(0.5 * t * up(t), t, up(t), down(t)))
        }
        Scheme::Cutset => Err(PncError::InvalidParameter { name: "scheme", value: f64::NAN }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table4Row {
    pub p_snc_db: f64,
    pub rate: f64,
    /// Energies in dB: SNC, PNC_MUD, PNC_LC, ANC, TS.
    pub energy_db: [f64; 5],
}

pub const TABLE4_SCHEMES: [Scheme; 5] = [Scheme::Snc, Scheme::PncMud, Scheme::PncLc, Scheme::Anc, Scheme::Ts];

pub fn table4(p_snc_db_list: &[f64]) -> Result<Vec<Table4Row>> {
    if p_snc_db_list.is_empty() {
        return Err(PncError::Empty);
    }
    p_snc_db_list
        .iter()
        .map(|&p_snc_db| {
            let rate = symmetric_rate(Scheme::Snc, db_to_lin(p_snc_db))?.r12;
            let mut energy_db = [0.0; 5];
            for (e, s) in energy_db.iter_mut().zip(TABLE4_SCHEMES) {
                *e = lin_to_db(energy_for_rate(s, rate)?.energy);
            }
            Ok(Table4Row { p_snc_db, rate, energy_db })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum E2eScheme {
    Ts,
    Pnc,
    Snc,
}

/// End-to-end BER from a one-hop BER `pe`.
pub fn e2e_ber(scheme: E2eScheme, pe: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&pe) {
        return Err(PncError::InvalidParameter { name: "pe", value: pe });
    }
    Ok(match scheme {
        E2eScheme::Ts | E2eScheme::Pnc => 2.0 * (1.0 - pe) * pe,
        E2eScheme::Snc => 3.0 * pe - 6.0 * pe * pe + 4.0 * pe * pe * pe,
    })
}
