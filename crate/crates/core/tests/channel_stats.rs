use pnc_core::channel::{downlink_observe, uplink_observe, ChannelParams, Noiseless};
use pnc_core::modem::{demodulate_qpsk, modulate_qpsk};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn empirical_variances_follow_the_offset() {
    let n = 50_000;
    let x = modulate_qpsk::<f64>(&vec![0; 2 * n]).unwrap();
    let p = ChannelParams { delta: 0.3, phi: 0.4, power: 1.3, n0: 0.7 };
    let clean = uplink_observe(&x, &x, &p, &mut Noiseless).unwrap();
    let noisy = uplink_observe(&x, &x, &p, &mut ChaCha8Rng::seed_from_u64(77)).unwrap();
    for parity in 0..2 {
        let mut sum = 0.0;
        let mut count = 0;
        for k in (parity..noisy.samples.len()).step_by(2) {
            let w = noisy.samples[k] - clean.samples[k];
            sum += w.re * w.re + w.im * w.im;
            count += 2;
        }
        let est = sum / count as f64;
        let want = if parity == 0 { 0.7 / (2.0 * 1.3 * 0.3) } else { 0.7 / (2.0 * 1.3 * 0.7) };
        assert!((est / want - 1.0).abs() < 0.03, "parity {parity}: {est} vs {want}");
    }
}

#[test]
fn qpsk_point_to_point_reference_ber() {
    // Eb/N0 = 9.6 dB gives BER ≈ 1e-5 for Gray QPSK; snr per symbol = 2·Eb/N0.
    let ebn0 = 10f64.powf(0.96);
    let symbols = 5_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let bits: Vec<u8> = (0..2 * symbols).map(|_| rng.random_range(0..2u8)).collect();
    let x = modulate_qpsk::<f64>(&bits).unwrap();
    let y = downlink_observe(&x, 2.0 * ebn0, &mut rng).unwrap();
    let errors = demodulate_qpsk(&y).iter().zip(&bits).filter(|(a, b)| a != b).count();
    let ber = errors as f64 / bits.len() as f64;
    assert!((0.5e-5..=2e-5).contains(&ber), "ber {ber}");
}

#[test]
fn round_trip_random_packets() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let bits: Vec<u8> = (0..2048).map(|_| rng.random_range(0..2u8)).collect();
    let s = modulate_qpsk::<f64>(&bits).unwrap();
    assert!(s.iter().all(|z| (z.norm_sqr() - 1.0).abs() < 1e-12));
    assert_eq!(demodulate_qpsk(&s), bits);
}
