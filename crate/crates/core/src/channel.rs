//! Relay observations for the two-way relay uplink and a plain AWGN downlink.
//!
//! With symbol offset Δ the relay integrates over the overlapped halves of
//! consecutive symbols and gets 2N+1 samples per packet:
//!
//! ```text
//! y[2n-1] = x1[n] + x2[n-1]·e^{jφ} + w      variance N0/(2PΔ)
//! y[2n]   = x1[n] + x2[n]·e^{jφ}   + w      variance N0/(2P(1-Δ))
//! y[2N+1] =         x2[N]·e^{jφ}   + w      variance N0/(2PΔ)
//! ```
//!
//! with x2[0] = 0. Samples are stored zero-based, so `samples[k]` is y[k+1].

use crate::error::{PncError, Result};
use crate::modem::QpskSymbol;
use crate::real::Real;
use num_complex::Complex;
use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};

/// Below this offset the Δ-window integral degenerates and the synchronous
/// model applies.
pub const DELTA_EPS: f64 = 1e-9;

/// Source of standard normal deviates.
pub trait NoiseSource {
    fn standard_normal(&mut self) -> f64;
}

impl<R: RngCore + ?Sized> NoiseSource for R {
    #[inline]
    fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(self)
    }
}

/// Injects no noise. The observation still carries the nominal variances.
#[derive(Debug, Clone, Copy, Default)]
pub struct Noiseless;

impl NoiseSource for Noiseless {
    #[inline]
    fn standard_normal(&mut self) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams<T> {
    /// Symbol offset in symbol durations, in [0, 1).
    pub delta: T,
    /// Phase of node 2 relative to node 1, radians.
    pub phi: T,
    /// Per-node transmit power P.
    pub power: T,
    /// Noise spectral density N0.
    pub n0: T,
}

impl<T: Real> ChannelParams<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, v: T| PncError::InvalidParameter { name, value: v.to_f64().unwrap_or(f64::NAN) };
        if !(self.delta >= T::zero() && self.delta < T::one()) {
            return Err(bad("delta", self.delta));
        }
        if !self.phi.is_finite() {
            return Err(bad("phi", self.phi));
        }
        if !(self.power > T::zero() && self.power.is_finite()) {
            return Err(bad("power", self.power));
        }
        if !(self.n0 > T::zero() && self.n0.is_finite()) {
            return Err(bad("n0", self.n0));
        }
        Ok(())
    }

    /// True when Δ is too small for the asynchronous model.
    pub fn is_synchronous(&self) -> bool {
        self.delta < T::lit(DELTA_EPS)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSequence<T> {
    pub samples: Vec<Complex<T>>,
    /// Per-component noise variance of each sample.
    pub variances: Vec<T>,
    pub delta: T,
    pub phi: T,
    pub synchronous: bool,
}

impl<T: Real> ObservationSequence<T> {
    /// Number of symbols per node that produced this observation.
    pub fn symbols(&self) -> usize {
        if self.synchronous {
            self.samples.len()
        } else {
            (self.samples.len() - 1) / 2
        }
    }
}

#[inline]
fn noisy<T: Real, N: NoiseSource + ?Sized>(mean: Complex<T>, std: T, noise: &mut N) -> Complex<T> {
    let re = T::lit(noise.standard_normal());
    let im = T::lit(noise.standard_normal());
    Complex::new(mean.re + std * re, mean.im + std * im)
}

fn check_pair<T>(x1: &[QpskSymbol<T>], x2: &[QpskSymbol<T>]) -> Result<()> {
    if x1.is_empty() {
        return Err(PncError::Empty);
    }
    if x1.len() != x2.len() {
        return Err(PncError::LengthMismatch { expected: x1.len(), got: x2.len() });
    }
    Ok(())
}

/// Asynchronous uplink: 2N+1 samples.
pub fn uplink_observe<T: Real, N: NoiseSource + ?Sized>(
    x1: &[QpskSymbol<T>],
    x2: &[QpskSymbol<T>],
    params: &ChannelParams<T>,
    noise: &mut N,
) -> Result<ObservationSequence<T>> {
    check_pair(x1, x2)?;
    params.validate()?;
    if params.is_synchronous() {
        return Err(PncError::DeltaTooSmall(params.delta.to_f64().unwrap_or(0.0)));
    }
    let two_p = T::lit(2.0) * params.power;
    let var_odd = params.n0 / (two_p * params.delta);
    let var_even = params.n0 / (two_p * (T::one() - params.delta));
    let (sd_odd, sd_even) = (var_odd.sqrt(), var_even.sqrt());
    let rot = Complex::from_polar(T::one(), params.phi);

    let n = x1.len();
    let mut samples = Vec::with_capacity(2 * n + 1);
    let mut variances = Vec::with_capacity(2 * n + 1);
    let mut prev_x2 = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        samples.push(noisy(x1[i] + prev_x2 * rot, sd_odd, noise));
        variances.push(var_odd);
        samples.push(noisy(x1[i] + x2[i] * rot, sd_even, noise));
        variances.push(var_even);
        prev_x2 = x2[i];
    }
    samples.push(noisy(prev_x2 * rot, sd_odd, noise));
    variances.push(var_odd);

    Ok(ObservationSequence { samples, variances, delta: params.delta, phi: params.phi, synchronous: false })
}

/// Synchronous uplink: one sample per symbol, variance N0/(2P). Δ is ignored.
pub fn uplink_observe_sync<T: Real, N: NoiseSource + ?Sized>(
    x1: &[QpskSymbol<T>],
    x2: &[QpskSymbol<T>],
    params: &ChannelParams<T>,
    noise: &mut N,
) -> Result<ObservationSequence<T>> {
    check_pair(x1, x2)?;
    params.validate()?;
    let var = params.n0 / (T::lit(2.0) * params.power);
    let sd = var.sqrt();
    let rot = Complex::from_polar(T::one(), params.phi);
    let samples = x1.iter().zip(x2).map(|(&a, &b)| noisy(a + b * rot, sd, noise)).collect();
    Ok(ObservationSequence {
        samples,
        variances: vec![var; x1.len()],
        delta: T::zero(),
        phi: params.phi,
        synchronous: true,
    })
}

/// Picks the synchronous or asynchronous model from Δ.
pub fn uplink_observe_auto<T: Real, N: NoiseSource + ?Sized>(
    x1: &[QpskSymbol<T>],
    x2: &[QpskSymbol<T>],
    params: &ChannelParams<T>,
    noise: &mut N,
) -> Result<ObservationSequence<T>> {
    if params.is_synchronous() {
        uplink_observe_sync(x1, x2, params, noise)
    } else {
        uplink_observe(x1, x2, params, noise)
    }
}

/// Point-to-point AWGN with per-component variance 1/(2·snr).
pub fn downlink_observe<T: Real, N: NoiseSource + ?Sized>(
    x: &[QpskSymbol<T>],
    snr: T,
    noise: &mut N,
) -> Result<Vec<Complex<T>>> {
    if snr.is_nan() || snr <= T::zero() {
        return Err(PncError::InvalidParameter { name: "snr", value: snr.to_f64().unwrap_or(f64::NAN) });
    }
    let sd = (T::one() / (T::lit(2.0) * snr)).sqrt();
    Ok(x.iter().map(|&s| noisy(s, sd, noise)).collect())
}
