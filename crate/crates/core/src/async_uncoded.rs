//! Uncoded PNC decoding at the relay.
//!
//! With a symbol offset, sample k observes the joint symbol v_k:
//! odd samples see (x1[n], x2[n-1]), even samples see (x1[n], x2[n]). Adjacent
//! joint symbols share one constituent, which `ProjectionEqual` factors tie
//! together. The resulting chain is a tree, so BP is exact.

use crate::channel::ObservationSequence;
use crate::error::{PncError, Result};
use crate::factorgraph::{FactorGraph, FactorKind, Schedule};
use crate::modem::BitPacket;
use crate::pncmap::{collapse_xor, joint_posterior_rotated, JointDistribution, Support, XorDistribution, JOINT};
use crate::real::Real;
use num_complex::Complex;

/// Tie between joint symbols that share x1 (the high symbol digit).
pub fn psi_x1<T>() -> FactorKind<T> {
    FactorKind::ProjectionEqual { shift: 2, width: 2 }
}

/// Tie between joint symbols that share x2 (the low symbol digit).
pub fn psi_x2<T>() -> FactorKind<T> {
    FactorKind::ProjectionEqual { shift: 0, width: 2 }
}

/// Support of zero-based sample `k` in an asynchronous observation.
pub fn async_support(k: usize, len: usize) -> Support {
    if k == 0 {
        Support::X1Only
    } else if k + 1 == len {
        Support::X2Only
    } else {
        Support::Full
    }
}

/// Joint posteriors of every sample of an observation.
pub fn sample_evidence<T: Real>(obs: &ObservationSequence<T>) -> Result<Vec<JointDistribution<T>>> {
    let rot = Complex::from_polar(T::one(), obs.phi);
    let len = obs.samples.len();
    obs.samples
        .iter()
        .zip(&obs.variances)
        .enumerate()
        .map(|(k, (&y, &var))| {
            let support = if obs.synchronous { Support::Full } else { async_support(k, len) };
            joint_posterior_rotated(y, rot, var, support)
        })
        .collect()
}

/// Chain graph over the 2N+1 joint symbols. Variable k belongs to sample k.
pub fn build_async_graph<T: Real>(obs: &ObservationSequence<T>) -> Result<FactorGraph<T>> {
    if obs.synchronous {
        return Err(PncError::SynchronousObservation);
    }
    let evidence = sample_evidence(obs)?;
    let mut g = FactorGraph::new();
    for ev in &evidence {
        let v = g.add_variable(JOINT)?;
        g.add_unary(v, ev.0.to_vec())?;
    }
    for n in 0..obs.symbols() {
        let (odd, even) = (2 * n, 2 * n + 1);
        g.add_factor(&[odd, even], psi_x1())?;
        g.add_factor(&[even, even + 1], psi_x2())?;
    }
    Ok(g)
}

/// Per-symbol XOR posteriors from the aligned joint symbols (x1[n], x2[n]).
pub fn xor_posteriors_async<T: Real>(obs: &ObservationSequence<T>) -> Result<Vec<XorDistribution<T>>> {
    let g = build_async_graph(obs)?;
    let m = g.sum_product(Schedule::TreeExact)?;
    Ok((0..obs.symbols())
        .map(|n| {
            let b: [T; JOINT] = std::array::from_fn(|j| m.beliefs[2 * n + 1][j]);
            collapse_xor(&JointDistribution(b))
        })
        .collect())
}

pub fn xor_posteriors_sync<T: Real>(obs: &ObservationSequence<T>) -> Result<Vec<XorDistribution<T>>> {
    if !obs.synchronous {
        return Err(PncError::AsynchronousObservation);
    }
    Ok(sample_evidence(obs)?.iter().map(collapse_xor).collect())
}

/// XOR posteriors for either kind of observation.
pub fn xor_posteriors<T: Real>(obs: &ObservationSequence<T>) -> Result<Vec<XorDistribution<T>>> {
    if obs.synchronous {
        xor_posteriors_sync(obs)
    } else {
        xor_posteriors_async(obs)
    }
}

/// Hard XOR bits (I then Q per symbol); ties go to the lowest XOR index.
pub fn hard_xor_bits<T: Real>(post: &[XorDistribution<T>]) -> BitPacket {
    post.iter()
        .flat_map(|p| {
            let a = p.argmax();
            [(a >> 1) as u8, (a & 1) as u8]
        })
        .collect()
}

pub fn decode_xor_uncoded<T: Real>(obs: &ObservationSequence<T>) -> Result<BitPacket> {
    Ok(hard_xor_bits(&xor_posteriors_async(obs)?))
}

pub fn decode_xor_sync<T: Real>(obs: &ObservationSequence<T>) -> Result<BitPacket> {
    Ok(hard_xor_bits(&xor_posteriors_sync(obs)?))
}

/// Dispatches on the observation kind.
pub fn decode_xor<T: Real>(obs: &ObservationSequence<T>) -> Result<BitPacket> {
    Ok(hard_xor_bits(&xor_posteriors(obs)?))
}
