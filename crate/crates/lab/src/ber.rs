use std::fmt;
use std::str::FromStr;

use pnc_core::async_uncoded::decode_xor;
use pnc_core::channel::{uplink_observe_auto, ChannelParams, NoiseSource, Noiseless};
use pnc_core::factorgraph::LoopyOptions;
use pnc_core::modem::{modulate_qpsk, BitPacket};
use pnc_core::ra_cnc::{coded_joint_bp, joint_cnc_from_beliefs, mud_xor_from_beliefs, xor_cd_decode, RaConfig};
use pnc_core::rates::db_to_lin;
use pnc_core::CodedPacketPair;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::stats::{wilson, Z95};
use crate::{LabError, Result};

/// Repetition factor of the code used by coded sweeps.
pub const CODE_REPEAT: usize = 3;

/// Eb/N0 assumed for the soft weights when noise is switched off.
const NOISELESS_NOMINAL_DB: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BerScheme {
    /// Symbol-level BP on the uncoded uplink.
    Uncoded,
    JointCnc,
    MudXor,
    XorCd,
}

impl BerScheme {
    pub fn name(self) -> &'static str {
        match self {
            Self::Uncoded => "uncoded",
            Self::JointCnc => "joint-cnc",
            Self::MudXor => "mud-xor",
            Self::XorCd => "xor-cd",
        }
    }
}

impl fmt::Display for BerScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BerScheme {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        [Self::Uncoded, Self::JointCnc, Self::MudXor, Self::XorCd]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| LabError::usage(format!("unknown scheme {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub errors: u64,
    pub bits: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BerPoint {
    fn new(ebn0_db: f64, errors: u64, bits: u64) -> Self {
        let (ci_low, ci_high) = wilson(errors, bits, Z95);
        Self { ebn0_db, errors, bits, ber: errors as f64 / bits as f64, ci_low, ci_high }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the random substream for one packet:
/// splitmix(splitmix(splitmix(seed) ^ point) ^ packet).
pub fn substream_seed(seed: u64, point: u64, packet: u64) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ point) ^ packet)
}

/// N0 with unit transmit power: QPSK carries two coded bits per symbol and
/// each source bit is repeated `q` times.
pub fn n0_for(ebn0_db: f64, q: usize) -> f64 {
    let ebn0 = if ebn0_db.is_finite() { db_to_lin(ebn0_db) } else { db_to_lin(NOISELESS_NOMINAL_DB) };
    q as f64 / (2.0 * ebn0)
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> BitPacket {
    (0..n).map(|_| rng.random_range(0..2u8)).collect()
}

fn count_errors(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}

struct Setup {
    schemes: Vec<BerScheme>,
    ra: Option<RaConfig>,
    opts: LoopyOptions,
}

fn packet_errors(cfg: &ExperimentConfig, setup: &Setup, ebn0_db: f64, point: u64, packet: u64) -> Result<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(cfg.seed, point, packet));
    let noisy = ebn0_db.is_finite();
    let q = if setup.ra.is_some() { CODE_REPEAT } else { 1 };
    let params = ChannelParams { delta: cfg.delta, phi: cfg.phi, power: 1.0, n0: n0_for(ebn0_db, q) };
    let s1 = random_bits(&mut rng, cfg.source_bits);
    let s2 = random_bits(&mut rng, cfg.source_bits);
    let truth: BitPacket = s1.iter().zip(&s2).map(|(a, b)| a ^ b).collect();
    let noise: &mut dyn NoiseSource = if noisy { &mut rng } else { &mut Noiseless };

    let Some(ra) = &setup.ra else {
        let x1 = modulate_qpsk::<f64>(&s1)?;
        let x2 = modulate_qpsk::<f64>(&s2)?;
        let obs = uplink_observe_auto(&x1, &x2, &params, noise)?;
        return Ok(vec![count_errors(&decode_xor(&obs)?, &truth)]);
    };

    let pair = CodedPacketPair::new(s1, s2, ra)?;
    let obs = uplink_observe_auto(&pair.node1.symbols, &pair.node2.symbols, &params, noise)?;
    let needs_joint = setup.schemes.iter().any(|s| matches!(s, BerScheme::JointCnc | BerScheme::MudXor));
    let beliefs = if needs_joint { Some(coded_joint_bp(&obs, ra, setup.opts)?) } else { None };
    setup
        .schemes
        .iter()
        .map(|s| {
            let bits = match s {
                BerScheme::JointCnc => joint_cnc_from_beliefs(beliefs.as_ref().unwrap()),
                BerScheme::MudXor => mud_xor_from_beliefs(beliefs.as_ref().unwrap()),
                BerScheme::XorCd => xor_cd_decode(&obs, ra, setup.opts)?.bits,
                BerScheme::Uncoded => unreachable!(),
            };
            Ok(count_errors(&bits, &truth))
        })
        .collect()
}

/// Sweeps several decoders over the same packets and noise. All schemes must
/// be coded, or the list must be exactly `[Uncoded]`.
pub fn run_ber_sweeps(cfg: &ExperimentConfig, schemes: &[BerScheme]) -> Result<Vec<Vec<BerPoint>>> {
    cfg.validate()?;
    let coded = cfg.kind == ExperimentKind::BerCoded;
    if !cfg.kind.is_ber() || schemes.is_empty() || schemes.iter().any(|&s| (s == BerScheme::Uncoded) == coded) {
        return Err(LabError::usage("scheme list does not match the experiment kind"));
    }
    let ra = coded
        .then(|| RaConfig::new(cfg.source_bits / 2, CODE_REPEAT, substream_seed(cfg.seed, u64::MAX, u64::MAX)))
        .transpose()?;
    let setup = Setup { schemes: schemes.to_vec(), ra, opts: LoopyOptions { max_iter: cfg.max_iter, ..LoopyOptions::default() } };
    let bits = (cfg.packets * cfg.source_bits) as u64;

    let mut out = vec![Vec::with_capacity(cfg.ebn0_grid.len()); schemes.len()];
    for (point, &ebn0_db) in cfg.ebn0_grid.iter().enumerate() {
        let totals = (0..cfg.packets as u64)
            .into_par_iter()
            .map(|packet| packet_errors(cfg, &setup, ebn0_db, point as u64, packet))
            .try_reduce(|| vec![0; schemes.len()], |a, b| Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect()))?;
        for (curve, errors) in out.iter_mut().zip(totals) {
            curve.push(BerPoint::new(ebn0_db, errors, bits));
        }
    }
    Ok(out)
}

pub fn run_ber_sweep(cfg: &ExperimentConfig) -> Result<Vec<BerPoint>> {
    Ok(run_ber_sweeps(cfg, &[cfg.scheme])?.remove(0))
}
