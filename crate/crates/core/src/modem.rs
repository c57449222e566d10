//! Unit-energy QPSK. Bit 0 maps to +1/√2, bit 1 to −1/√2; the in-phase bit
//! comes first. A symbol index packs the two bits as `2·I + Q`.

use crate::error::{PncError, Result};
use crate::real::Real;
use num_complex::Complex;

/// A QPSK constellation point. Components are ±1/√2.
pub type QpskSymbol<T> = Complex<T>;

/// Bits are stored one per byte, each 0 or 1.
pub type BitPacket = Vec<u8>;

/// Amplitude carried by a single bit.
#[inline]
pub fn bit_amplitude<T: Real>(bit: u8) -> T {
    if bit == 0 {
        T::FRAC_1_SQRT_2()
    } else {
        -T::FRAC_1_SQRT_2()
    }
}

/// Constellation point for symbol index `2·I + Q`.
#[inline]
pub fn qpsk_point<T: Real>(index: usize) -> QpskSymbol<T> {
    Complex::new(bit_amplitude(((index >> 1) & 1) as u8), bit_amplitude((index & 1) as u8))
}

pub fn modulate_qpsk<T: Real>(bits: &[u8]) -> Result<Vec<QpskSymbol<T>>> {
    if !bits.len().is_multiple_of(2) {
        return Err(PncError::OddLength(bits.len()));
    }
    Ok(bits
        .chunks_exact(2)
        .map(|b| Complex::new(bit_amplitude(b[0]), bit_amplitude(b[1])))
        .collect())
}

/// Sign detector. An exact zero decides bit 0.
pub fn demodulate_qpsk<T: Real>(symbols: &[QpskSymbol<T>]) -> BitPacket {
    let hard = |v: T| u8::from(v < T::zero());
    symbols.iter().flat_map(|s| [hard(s.re), hard(s.im)]).collect()
}

/// Symbol indices (`2·I + Q`) of an even-length bit packet.
pub fn symbol_indices(bits: &[u8]) -> Result<Vec<usize>> {
    if !bits.len().is_multiple_of(2) {
        return Err(PncError::OddLength(bits.len()));
    }
    Ok(bits.chunks_exact(2).map(|b| 2 * b[0] as usize + b[1] as usize).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_convention() {
        let s = modulate_qpsk::<f64>(&[0, 0]).unwrap();
        assert!((s[0].re - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((s[0].im - 0.5f64.sqrt()).abs() < 1e-12);
        let s = modulate_qpsk::<f64>(&[1, 1]).unwrap();
        assert!((s[0].re + 0.5f64.sqrt()).abs() < 1e-12);
        assert!((s[0].im + 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn odd_length_rejected() {
        assert_eq!(modulate_qpsk::<f64>(&[0, 1, 1]), Err(PncError::OddLength(3)));
    }

    #[test]
    fn sign_rule_and_tie_break() {
        let f = 0.5f64.sqrt();
        assert_eq!(demodulate_qpsk(&[Complex::new(f, -f)]), vec![0, 1]);
        assert_eq!(demodulate_qpsk(&[Complex::new(-0.3, 0.9)]), vec![1, 0]);
        assert_eq!(demodulate_qpsk(&[Complex::new(0.0, 0.5)]), vec![0, 0]);
    }

    #[test]
    fn point_matches_modulator() {
        for idx in 0..4 {
            let bits = [(idx >> 1) as u8, (idx & 1) as u8];
            assert_eq!(qpsk_point::<f64>(idx), modulate_qpsk::<f64>(&bits).unwrap()[0]);
        }
        assert_eq!(symbol_indices(&[1, 0, 0, 1]).unwrap(), vec![2, 1]);
    }

    #[test]
    fn works_in_single_precision() {
        let s = modulate_qpsk::<f32>(&[0, 1]).unwrap();
        assert!((s[0].norm_sqr() - 1.0).abs() < 1e-6);
    }
}
