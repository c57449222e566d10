//! Per-sample PNC mapping.
//!
//! Joint index of a symbol pair is `4·sym(x1) + sym(x2)`, i.e. the bits
//! (I1, Q1, I2, Q2) read as a 4-bit number. The XOR of a joint index is the
//! 2-bit symbol (I1⊕I2, Q1⊕Q2).

use crate::error::{PncError, Result};
use crate::modem::qpsk_point;
use crate::real::Real;
use num_complex::Complex;

pub const JOINT: usize = 16;
pub const XOR: usize = 4;

#[inline]
pub fn joint_index(s1: usize, s2: usize) -> usize {
    4 * s1 + s2
}

#[inline]
pub fn xor_of_joint(j: usize) -> usize {
    (j >> 2) ^ (j & 3)
}

/// Which constituent symbols a sample depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    Full,
    /// The leading boundary sample, where x2 is absent.
    X1Only,
    /// The trailing boundary sample, where x1 is absent.
    X2Only,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution<T>(pub [T; JOINT]);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XorDistribution<T>(pub [T; XOR]);

impl<T: Real> XorDistribution<T> {
    /// Most probable XOR symbol; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }

    /// (P(I bit = 0), P(Q bit = 0)).
    pub fn bit_zero_probs(&self) -> (T, T) {
        let p = &self.0;
        (p[0] + p[1], p[0] + p[2])
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax<T: PartialOrd + Copy>(v: &[T]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] > v[best] {
            best = i;
        }
    }
    best
}

/// The 16 noiseless composite points x1 + x2·e^{jφ} in joint-index order.
pub fn composite_points<T: Real>(phi: T) -> [Complex<T>; JOINT] {
    let rot = Complex::from_polar(T::one(), phi);
    std::array::from_fn(|j| qpsk_point::<T>(j >> 2) + qpsk_point::<T>(j & 3) * rot)
}

/// Writes normalized probabilities from log-likelihoods, subtracting the max first.
fn normalize_logs<T: Real>(logs: &[T; JOINT]) -> [T; JOINT] {
    let mx = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let mut out = logs.map(|l| (l - mx).exp());
    let total = out.iter().copied().fold(T::zero(), |a, b| a + b);
    for p in out.iter_mut() {
        *p /= total;
    }
    out
}

/// Joint posterior over the 16 pairs under a uniform prior.
pub fn joint_posterior<T: Real>(y: Complex<T>, phi: T, var: T, support: Support) -> Result<JointDistribution<T>> {
    let rot = Complex::from_polar(T::one(), phi);
    joint_posterior_rotated(y, rot, var, support)
}

/// As [`joint_posterior`] with the phase rotation e^{jφ} precomputed.
pub fn joint_posterior_rotated<T: Real>(
    y: Complex<T>,
    rot: Complex<T>,
    var: T,
    support: Support,
) -> Result<JointDistribution<T>> {
    if !(y.re.is_finite() && y.im.is_finite()) {
        return Err(PncError::InvalidParameter { name: "y", value: f64::NAN });
    }
    if !(var > T::zero() && var.is_finite()) {
        return Err(PncError::InvalidParameter { name: "var", value: var.to_f64().unwrap_or(f64::NAN) });
    }
    let scale = -T::one() / (T::lit(2.0) * var);
    let logs: [T; JOINT] = std::array::from_fn(|j| {
        let a = qpsk_point::<T>(j >> 2);
        let b = qpsk_point::<T>(j & 3) * rot;
        let mean = match support {
            Support::Full => a + b,
            Support::X1Only => a,
            Support::X2Only => b,
        };
        (y - mean).norm_sqr() * scale
    });
    Ok(JointDistribution(normalize_logs(&logs)))
}

pub fn collapse_xor<T: Real>(jd: &JointDistribution<T>) -> XorDistribution<T> {
    let mut out = [T::zero(); XOR];
    for (j, &p) in jd.0.iter().enumerate() {
        out[xor_of_joint(j)] += p;
    }
    XorDistribution(out)
}

/// Noiseless PNC mapping of one real component. The composite of two
/// unit-energy components is −√2, 0 or +√2; 0 means the bits differ.
pub fn xor_map_hard<T: Real>(y_component: T, tolerance: T) -> Result<i8> {
    let s2 = T::SQRT_2();
    if y_component.abs() <= tolerance {
        Ok(-1)
    } else if (y_component.abs() - s2).abs() <= tolerance {
        Ok(1)
    } else {
        Err(PncError::OffSupport { value: y_component.to_f64().unwrap_or(f64::NAN) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn total(p: &[f64]) -> f64 {
        p.iter().sum()
    }

    #[test]
    fn noiseless_concentration() {
        let jd = joint_posterior(Complex::<f64>::new(SQRT_2, SQRT_2), 0.0, 1e-6, Support::Full).unwrap();
        assert!((jd.0[0] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_sample_splits_over_opposite_pairs() {
        let jd = joint_posterior(Complex::<f64>::new(0.0, 0.0), 0.0, 1e-6, Support::Full).unwrap();
        // x2 = −x1 means sym(x2) = 3 − sym(x1)
        for s in 0..4 {
            assert!((jd.0[joint_index(s, 3 - s)] - 0.25).abs() < 1e-9);
        }
        let x = collapse_xor(&jd);
        assert!((x.0[3] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn collapse_examples() {
        let mut point = [0.0; JOINT];
        point[0] = 1.0;
        assert_eq!(collapse_xor(&JointDistribution(point)).0, [1.0, 0.0, 0.0, 0.0]);
        let uni = collapse_xor(&JointDistribution([1.0f64 / 16.0; JOINT]));
        assert!(uni.0.iter().all(|&p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn boundary_supports_are_uniform_on_absent_symbol() {
        let y = Complex::<f64>::new(0.3, -0.9);
        let first = joint_posterior(y, 0.4, 0.3, Support::X1Only).unwrap();
        let last = joint_posterior(y, 0.4, 0.3, Support::X2Only).unwrap();
        for a in 0..4 {
            for b in 1..4 {
                assert!((first.0[joint_index(a, b)] - first.0[joint_index(a, 0)]).abs() < 1e-15);
                assert!((last.0[joint_index(b, a)] - last.0[joint_index(0, a)]).abs() < 1e-15);
            }
        }
        assert!((total(&first.0) - 1.0).abs() < 1e-12);
        assert!((total(&last.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tiny_variance_does_not_underflow() {
        let jd = joint_posterior(Complex::<f64>::new(5.0, -5.0), FRAC_PI_4, 1e-9, Support::Full).unwrap();
        assert!((total(&jd.0) - 1.0).abs() < 1e-12);
        assert!(jd.0.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(joint_posterior(Complex::<f64>::new(f64::NAN, 0.0), 0.0, 1.0, Support::Full).is_err());
        assert!(joint_posterior(Complex::<f64>::new(0.0, 0.0), 0.0, 0.0, Support::Full).is_err());
        assert!(joint_posterior(Complex::<f64>::new(0.0, 0.0), 0.0, f64::INFINITY, Support::Full).is_err());
    }

    #[test]
    fn hard_map() {
        assert_eq!(xor_map_hard(0.0, 1e-9).unwrap(), -1);
        assert_eq!(xor_map_hard(SQRT_2, 1e-9).unwrap(), 1);
        assert_eq!(xor_map_hard(-SQRT_2, 1e-9).unwrap(), 1);
        assert!(xor_map_hard(0.7, 1e-3).is_err());
    }

    #[test]
    fn bit_marginals() {
        let x = XorDistribution([0.1, 0.2, 0.3, 0.4]);
        let (i0, q0) = x.bit_zero_probs();
        assert!((i0 - 0.3f64).abs() < 1e-15 && (q0 - 0.4f64).abs() < 1e-15);
        assert_eq!(XorDistribution([0.25f64; 4]).argmax(), 0);
    }
}
