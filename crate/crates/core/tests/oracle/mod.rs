//! Independent reference computations used by the integration and acceptance
//! tests. Nothing here calls the BP engine.
#![allow(dead_code)]

use num_complex::Complex;

fn amp(bit: usize) -> f64 {
    if bit == 0 {
        std::f64::consts::FRAC_1_SQRT_2
    } else {
        -std::f64::consts::FRAC_1_SQRT_2
    }
}

fn point(sym: usize) -> Complex<f64> {
    Complex::new(amp(sym >> 1), amp(sym & 1))
}

/// Exact per-symbol XOR posteriors of an asynchronous observation, by
/// enumerating all 16^N symbol-pair sequences under the Gaussian likelihood.
pub fn async_xor_posteriors(samples: &[Complex<f64>], variances: &[f64], phi: f64) -> Vec<[f64; 4]> {
    let n = (samples.len() - 1) / 2;
    let rot = Complex::from_polar(1.0, phi);
    let term = |k: usize, mean: Complex<f64>| -(samples[k] - mean).norm_sqr() / (2.0 * variances[k]);

    struct Walk<'a> {
        n: usize,
        term: &'a dyn Fn(usize, Complex<f64>) -> f64,
        rot: Complex<f64>,
        path: Vec<usize>,
        max: f64,
        post: Vec<[f64; 4]>,
    }

    impl Walk<'_> {
        fn go(&mut self, depth: usize, ll: f64, pass: u8) {
            if depth == self.n {
                let s2 = self.path[self.n - 1] & 3;
                let total = ll + (self.term)(2 * self.n, point(s2) * self.rot);
                if pass == 0 {
                    self.max = self.max.max(total);
                } else {
                    let w = (total - self.max).exp();
                    for (i, &j) in self.path.iter().enumerate() {
                        self.post[i][(j >> 2) ^ (j & 3)] += w;
                    }
                }
                return;
            }
            for j in 0..16 {
                let (s1, s2) = (j >> 2, j & 3);
                let prev = if depth == 0 { Complex::new(0.0, 0.0) } else { point(self.path[depth - 1] & 3) * self.rot };
                let a = (self.term)(2 * depth, point(s1) + prev);
                let b = (self.term)(2 * depth + 1, point(s1) + point(s2) * self.rot);
                self.path.push(j);
                self.go(depth + 1, ll + a + b, pass);
                self.path.pop();
            }
        }
    }

    let mut w = Walk { n, term: &term, rot, path: Vec::with_capacity(n), max: f64::NEG_INFINITY, post: vec![[0.0; 4]; n] };
    w.go(0, 0.0, 0);
    w.go(0, 0.0, 1);
    w.post
        .into_iter()
        .map(|p| {
            let s: f64 = p.iter().sum();
            p.map(|x| x / s)
        })
        .collect()
}

/// Exact marginals of a discrete model given as a list of factors
/// (neighbors, value function), by enumeration.
pub fn brute_marginals(cards: &[usize], factors: &[(Vec<usize>, Vec<f64>)]) -> Vec<Vec<f64>> {
    let total: usize = cards.iter().product();
    let mut out: Vec<Vec<f64>> = cards.iter().map(|&c| vec![0.0; c]).collect();
    let mut x = vec![0usize; cards.len()];
    for _ in 0..total {
        let mut w = 1.0;
        for (nb, table) in factors {
            let idx = nb.iter().fold(0, |a, &v| a * cards[v] + x[v]);
            w *= table[idx];
        }
        for (v, &xv) in x.iter().enumerate() {
            out[v][xv] += w;
        }
        for v in (0..cards.len()).rev() {
            x[v] += 1;
            if x[v] < cards[v] {
                break;
            }
            x[v] = 0;
        }
    }
    for m in out.iter_mut() {
        let s: f64 = m.iter().sum();
        m.iter_mut().for_each(|p| *p /= s);
    }
    out
}
