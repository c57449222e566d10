//! Binomial intervals and comparisons for error counts.

/// 97.5% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;
/// 95% one-sided standard normal quantile.
pub const Z95_ONE_SIDED: f64 = 1.644_853_626_951_472;

/// Wilson score interval at normal quantile `z`. Returns (0, 1) for n = 0.
pub fn wilson(errors: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (errors as f64, n as f64);
    let p = k / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The bounds are exactly 0 and 1 at the extremes; avoid cancellation dust.
    let lo = if errors == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Pooled two-proportion z statistic for H1: p_a < p_b. Large positive
/// values favour a lower error rate for `a`.
pub fn two_proportion_z(errors_a: u64, n_a: u64, errors_b: u64, n_b: u64) -> f64 {
    let (ka, na, kb, nb) = (errors_a as f64, n_a as f64, errors_b as f64, n_b as f64);
    let (pa, pb) = (ka / na, kb / nb);
    let pool = (ka + kb) / (na + nb);
    let se = (pool * (1.0 - pool) * (1.0 / na + 1.0 / nb)).sqrt();
    if se == 0.0 {
        return 0.0;
    }
    (pb - pa) / se
}

/// Whether `a` has a lower error rate than `b` at one-sided 95% confidence.
pub fn significantly_lower(errors_a: u64, n_a: u64, errors_b: u64, n_b: u64) -> bool {
    two_proportion_z(errors_a, n_a, errors_b, n_b) > Z95_ONE_SIDED
}

/// First Eb/N0 where the curve falls through `target`, interpolating
/// log10(BER) linearly in dB. Zero counts are floored at `floor`.
pub fn crossing_db(points: &[(f64, f64)], target: f64, floor: f64) -> Option<f64> {
    let lg = |b: f64| b.max(floor).log10();
    let t = target.log10();
    points.windows(2).find_map(|w| {
        let ((x0, b0), (x1, b1)) = (w[0], w[1]);
        let (y0, y1) = (lg(b0), lg(b1));
        if !(x0.is_finite() && x1.is_finite()) || y0 < t || y1 > t {
            return None;
        }
        if y0 == y1 {
            return Some(x0);
        }
        Some(x0 + (t - y0) * (x1 - x0) / (y1 - y0))
    })
}
