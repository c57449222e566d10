//! Repeat-accumulate coding and the channel-coded relay decoders.
//!
//! Each node splits its source packet into an I and a Q stream and RA-encodes
//! both with one shared interleaver. Because every one of the four bit streams
//! (I1, Q1, I2, Q2) runs through the same permutation and accumulator, the
//! joint symbols obey the accumulator recursion bitwise on the 4-bit joint
//! index: `x[k] = x[k-1] ⊕ s[src(k)]`.

use crate::async_uncoded::{psi_x1, psi_x2, sample_evidence, xor_posteriors};
use crate::channel::ObservationSequence;
use crate::error::{PncError, Result};
use crate::factorgraph::{FactorGraph, FactorKind, LoopyOptions, Schedule};
use crate::modem::{modulate_qpsk, BitPacket, QpskSymbol};
use crate::pncmap::{argmax, collapse_xor, xor_of_joint, JointDistribution, JOINT};
use crate::real::Real;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::ops::Range;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaConfig {
    q: usize,
    m: usize,
    interleaver: Vec<usize>,
}

impl RaConfig {
    /// Uniform random interleaver drawn from `seed`.
    pub fn new(m: usize, q: usize, seed: u64) -> Result<Self> {
        Self::check_geometry(m, q)?;
        let mut perm: Vec<usize> = (0..m * q).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Ok(Self { q, m, interleaver: perm })
    }

    pub fn with_interleaver(m: usize, q: usize, interleaver: Vec<usize>) -> Result<Self> {
        Self::check_geometry(m, q)?;
        let n = m * q;
        let mut seen = vec![false; n];
        if interleaver.len() != n {
            return Err(PncError::BadInterleaver(n));
        }
        for &p in &interleaver {
            if p >= n || seen[p] {
                return Err(PncError::BadInterleaver(n));
            }
            seen[p] = true;
        }
        Ok(Self { q, m, interleaver })
    }

    pub fn identity(m: usize, q: usize) -> Result<Self> {
        Self::with_interleaver(m, q, (0..m * q).collect())
    }

    fn check_geometry(m: usize, q: usize) -> Result<()> {
        if m == 0 || q == 0 {
            return Err(PncError::Empty);
        }
        Ok(())
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Source bits per stream.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Coded bits per stream.
    pub fn coded_len(&self) -> usize {
        self.q * self.m
    }

    pub fn interleaver(&self) -> &[usize] {
        &self.interleaver
    }

    /// Source position feeding accumulator step `k`.
    #[inline]
    pub fn source_of(&self, k: usize) -> usize {
        self.interleaver[k] / self.q
    }
}

/// Encodes one stream of `m` bits into `q·m` bits.
pub fn ra_encode(bits: &[u8], cfg: &RaConfig) -> Result<BitPacket> {
    if bits.len() != cfg.m {
        return Err(PncError::LengthMismatch { expected: cfg.m, got: bits.len() });
    }
    let mut acc = 0u8;
    Ok((0..cfg.coded_len())
        .map(|k| {
            acc ^= bits[cfg.source_of(k)];
            acc
        })
        .collect())
}

/// Splits I/Q-interleaved bits into (I, Q) streams.
pub fn split_streams(bits: &[u8]) -> (Vec<u8>, Vec<u8>) {
    (bits.iter().step_by(2).copied().collect(), bits.iter().skip(1).step_by(2).copied().collect())
}

pub fn join_streams(i: &[u8], q: &[u8]) -> BitPacket {
    i.iter().zip(q).flat_map(|(&a, &b)| [a, b]).collect()
}

/// Encodes a node's 2M-bit source packet (I/Q interleaved) into 2qM coded bits.
pub fn ra_encode_packet(source: &[u8], cfg: &RaConfig) -> Result<BitPacket> {
    if source.len() != 2 * cfg.m {
        return Err(PncError::LengthMismatch { expected: 2 * cfg.m, got: source.len() });
    }
    let (i, q) = split_streams(source);
    Ok(join_streams(&ra_encode(&i, cfg)?, &ra_encode(&q, cfg)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodedNode<T> {
    pub source: BitPacket,
    pub coded: BitPacket,
    pub symbols: Vec<QpskSymbol<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CodedPacketPair<T> {
    pub node1: CodedNode<T>,
    pub node2: CodedNode<T>,
}

impl<T: Real> CodedPacketPair<T> {
    pub fn new(source1: BitPacket, source2: BitPacket, cfg: &RaConfig) -> Result<Self> {
        let node = |source: BitPacket| -> Result<CodedNode<T>> {
            let coded = ra_encode_packet(&source, cfg)?;
            let symbols = modulate_qpsk(&coded)?;
            Ok(CodedNode { source, coded, symbols })
        };
        Ok(Self { node1: node(source1)?, node2: node(source2)? })
    }

    /// The network-coded target S1 ⊕ S2.
    pub fn source_xor(&self) -> BitPacket {
        self.node1.source.iter().zip(&self.node2.source).map(|(a, b)| a ^ b).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub bits: BitPacket,
    pub converged: bool,
    pub iterations: usize,
}

/// Binary BP decoder for one RA stream. `post[k]` is (P(c_k = 0), P(c_k = 1)).
pub fn ra_decode_p2p<T: Real>(post: &[[T; 2]], cfg: &RaConfig, opts: LoopyOptions) -> Result<Decoded> {
    let n = cfg.coded_len();
    if post.len() != n {
        return Err(PncError::LengthMismatch { expected: n, got: post.len() });
    }
    let mut g = FactorGraph::new();
    for _ in 0..cfg.m {
        g.add_variable(2)?;
    }
    let c0 = cfg.m;
    for p in post {
        let v = g.add_variable(2)?;
        g.add_unary(v, p.to_vec())?;
    }
    add_accumulator(&mut g, cfg, c0)?;
    let m = g.sum_product(Schedule::Loopy(opts))?;
    let bits = (0..cfg.m).map(|j| u8::from(m.beliefs[j][1] > m.beliefs[j][0])).collect();
    Ok(Decoded { bits, converged: m.converged, iterations: m.iterations })
}

/// Accumulator checks (c[k-1], c[k], s[src(k)]); source variables are 0..m and
/// coded variables start at `c0`.
fn add_accumulator<T: Real>(g: &mut FactorGraph<T>, cfg: &RaConfig, c0: usize) -> Result<()> {
    for k in 0..cfg.coded_len() {
        let s = cfg.source_of(k);
        if k == 0 {
            g.add_factor(&[c0, s], FactorKind::Xor)?;
        } else {
            g.add_factor(&[c0 + k - 1, c0 + k, s], FactorKind::Xor)?;
        }
    }
    Ok(())
}

/// The joint-symbol graph of a coded packet pair and where its variables live.
#[derive(Debug, Clone)]
pub struct CodedJointGraph<T> {
    pub graph: FactorGraph<T>,
    /// Source joint symbols s[n], n < M.
    pub source_vars: Range<usize>,
    /// Aligned coded joint symbols (x1[k], x2[k]).
    pub coded_vars: Range<usize>,
    /// Misaligned joint symbols (x1[k], x2[k-1]); empty when synchronous.
    pub misaligned_vars: Range<usize>,
}

fn check_coded_obs<T: Real>(obs: &ObservationSequence<T>, cfg: &RaConfig) -> Result<()> {
    let n = cfg.coded_len();
    let expected = if obs.synchronous { n } else { 2 * n + 1 };
    if obs.samples.len() != expected {
        return Err(PncError::LengthMismatch { expected, got: obs.samples.len() });
    }
    Ok(())
}

pub fn build_coded_joint_graph<T: Real>(obs: &ObservationSequence<T>, cfg: &RaConfig) -> Result<CodedJointGraph<T>> {
    check_coded_obs(obs, cfg)?;
    let (m, n) = (cfg.m, cfg.coded_len());
    let evidence = sample_evidence(obs)?;
    let mut g = FactorGraph::new();
    for _ in 0..m + n {
        g.add_variable(JOINT)?;
    }
    let c0 = m;
    add_accumulator(&mut g, cfg, c0)?;
    let mis0 = m + n;
    if obs.synchronous {
        for (k, ev) in evidence.iter().enumerate() {
            g.add_unary(c0 + k, ev.0.to_vec())?;
        }
    } else {
        for _ in 0..=n {
            g.add_variable(JOINT)?;
        }
        for (k, ev) in evidence.iter().enumerate() {
            let var = if k % 2 == 0 { mis0 + k / 2 } else { c0 + k / 2 };
            g.add_unary(var, ev.0.to_vec())?;
        }
        for k in 0..n {
            g.add_factor(&[mis0 + k, c0 + k], psi_x1())?;
            g.add_factor(&[c0 + k, mis0 + k + 1], psi_x2())?;
        }
    }
    let total = g.num_variables();
    Ok(CodedJointGraph { graph: g, source_vars: 0..m, coded_vars: c0..c0 + n, misaligned_vars: mis0..total })
}

/// Beliefs over the source joint symbols after loopy BP.
#[derive(Debug, Clone, PartialEq)]
pub struct CodedBeliefs<T> {
    pub source: Vec<JointDistribution<T>>,
    pub converged: bool,
    pub iterations: usize,
}

pub fn coded_joint_bp<T: Real>(obs: &ObservationSequence<T>, cfg: &RaConfig, opts: LoopyOptions) -> Result<CodedBeliefs<T>> {
    let cg = build_coded_joint_graph(obs, cfg)?;
    let m = cg.graph.sum_product(Schedule::Loopy(opts))?;
    let source = cg
        .source_vars
        .map(|v| JointDistribution(std::array::from_fn(|j| m.beliefs[v][j])))
        .collect();
    Ok(CodedBeliefs { source, converged: m.converged, iterations: m.iterations })
}

fn xor_bits(a: usize) -> [u8; 2] {
    [(a >> 1) as u8, (a & 1) as u8]
}

/// Collapse each source belief to XOR, then pick the best XOR symbol.
pub fn joint_cnc_from_beliefs<T: Real>(b: &CodedBeliefs<T>) -> BitPacket {
    b.source.iter().flat_map(|jd| xor_bits(collapse_xor(jd).argmax())).collect()
}

/// Pick the best symbol pair, then XOR it.
pub fn mud_xor_from_beliefs<T: Real>(b: &CodedBeliefs<T>) -> BitPacket {
    b.source.iter().flat_map(|jd| xor_bits(xor_of_joint(argmax(&jd.0)))).collect()
}

pub fn joint_cnc_decode<T: Real>(obs: &ObservationSequence<T>, cfg: &RaConfig, opts: LoopyOptions) -> Result<Decoded> {
    let b = coded_joint_bp(obs, cfg, opts)?;
    Ok(Decoded { bits: joint_cnc_from_beliefs(&b), converged: b.converged, iterations: b.iterations })
}

pub fn mud_xor_decode<T: Real>(obs: &ObservationSequence<T>, cfg: &RaConfig, opts: LoopyOptions) -> Result<Decoded> {
    let b = coded_joint_bp(obs, cfg, opts)?;
    Ok(Decoded { bits: mud_xor_from_beliefs(&b), converged: b.converged, iterations: b.iterations })
}

/// Symbol-level PNC mapping followed by two independent binary RA decodes.
pub fn xor_cd_decode<T: Real>(obs: &ObservationSequence<T>, cfg: &RaConfig, opts: LoopyOptions) -> Result<Decoded> {
    check_coded_obs(obs, cfg)?;
    let post = xor_posteriors(obs)?;
    let mut pi = Vec::with_capacity(post.len());
    let mut pq = Vec::with_capacity(post.len());
    for p in &post {
        let (i0, q0) = p.bit_zero_probs();
        let (i1, q1) = (p.0[2] + p.0[3], p.0[1] + p.0[3]);
        pi.push([i0, i1]);
        pq.push([q0, q1]);
    }
    let di = ra_decode_p2p(&pi, cfg, opts)?;
    let dq = ra_decode_p2p(&pq, cfg, opts)?;
    Ok(Decoded {
        bits: join_streams(&di.bits, &dq.bits),
        converged: di.converged && dq.converged,
        iterations: di.iterations.max(dq.iterations),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_by_definition() {
        let cfg = RaConfig::identity(2, 3).unwrap();
        assert_eq!(ra_encode(&[1, 0], &cfg).unwrap(), vec![1, 0, 1, 1, 1, 1]);
        assert_eq!(ra_encode(&[0, 0], &cfg).unwrap(), vec![0; 6]);
        assert!(ra_encode(&[0], &cfg).is_err());
    }

    #[test]
    fn interleaver_validation() {
        assert!(RaConfig::with_interleaver(2, 2, vec![0, 1, 2, 2]).is_err());
        assert!(RaConfig::with_interleaver(2, 2, vec![0, 1, 2]).is_err());
        assert!(RaConfig::with_interleaver(2, 2, vec![3, 1, 0, 2]).is_ok());
        let a = RaConfig::new(50, 3, 4).unwrap();
        let mut sorted = a.interleaver().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..150).collect::<Vec<_>>());
        assert_eq!(a, RaConfig::new(50, 3, 4).unwrap());
    }

    #[test]
    fn stream_split_round_trip() {
        let bits = vec![1, 0, 0, 0, 1, 1];
        let (i, q) = split_streams(&bits);
        assert_eq!((i.clone(), q.clone()), (vec![1, 0, 1], vec![0, 0, 1]));
        assert_eq!(join_streams(&i, &q), bits);
    }

    #[test]
    fn uniform_posteriors_decode_to_zero() {
        let cfg = RaConfig::new(16, 3, 1).unwrap();
        let d = ra_decode_p2p(&vec![[0.5f64, 0.5]; 48], &cfg, LoopyOptions::default()).unwrap();
        assert_eq!(d.bits, vec![0; 16]);
    }

    #[test]
    fn noiseless_p2p_recovery() {
        let cfg = RaConfig::new(32, 3, 2).unwrap();
        let src: Vec<u8> = (0..32).map(|i| ((i * 7 + 3) % 5 == 0) as u8).collect();
        let post: Vec<[f64; 2]> = ra_encode(&src, &cfg).unwrap().iter().map(|&c| if c == 0 { [1.0, 0.0] } else { [0.0, 1.0] }).collect();
        assert_eq!(ra_decode_p2p(&post, &cfg, LoopyOptions::default()).unwrap().bits, src);
    }

    #[test]
    fn coded_graph_counts() {
        use crate::channel::{uplink_observe, uplink_observe_sync, ChannelParams, Noiseless};
        let cfg = RaConfig::new(2, 3, 7).unwrap();
        let pair = CodedPacketPair::<f64>::new(vec![0, 1, 1, 0], vec![1, 1, 0, 0], &cfg).unwrap();
        let p = ChannelParams { delta: 0.0, phi: 0.0, power: 1.0, n0: 0.5 };
        let sync = uplink_observe_sync(&pair.node1.symbols, &pair.node2.symbols, &p, &mut Noiseless).unwrap();
        let g = build_coded_joint_graph(&sync, &cfg).unwrap();
        assert_eq!((g.graph.num_variables(), g.graph.num_factors()), (8, 12));
        assert!(g.misaligned_vars.is_empty());
        let p = ChannelParams { delta: 0.5, ..p };
        let asy = uplink_observe(&pair.node1.symbols, &pair.node2.symbols, &p, &mut Noiseless).unwrap();
        let g = build_coded_joint_graph(&asy, &cfg).unwrap();
        assert_eq!((g.graph.num_variables(), g.graph.num_factors()), (15, 31));
        assert!(!g.graph.is_tree());
        assert!(build_coded_joint_graph(&sync, &RaConfig::new(3, 3, 7).unwrap()).is_err());
    }
}
