mod oracle;

use pnc_core::factorgraph::{FactorGraph, FactorKind, LoopyOptions, Schedule};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every factor expanded into a dense table through `factor_value`.
fn dense_factors(g: &FactorGraph<f64>) -> (Vec<usize>, Vec<(Vec<usize>, Vec<f64>)>) {
    let cards: Vec<usize> = (0..g.num_variables()).map(|v| g.cardinality(v)).collect();
    let factors = (0..g.num_factors())
        .map(|f| {
            let nb = g.factor_neighbors(f).to_vec();
            let size: usize = nb.iter().map(|&v| cards[v]).product();
            let table = (0..size)
                .map(|mut idx| {
                    let mut vals = vec![0; nb.len()];
                    for i in (0..nb.len()).rev() {
                        vals[i] = idx % cards[nb[i]];
                        idx /= cards[nb[i]];
                    }
                    g.factor_value(f, &vals)
                })
                .collect();
            (nb, table)
        })
        .collect();
    (cards, factors)
}

fn max_dev(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn chain_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut g = FactorGraph::new();
    let v: Vec<_> = (0..3).map(|_| g.add_variable(2).unwrap()).collect();
    for w in v.windows(2) {
        let t: Vec<f64> = (0..4).map(|_| rng.random_range(0.1..1.0)).collect();
        g.add_factor(w, FactorKind::Table(t)).unwrap();
    }
    let (cards, factors) = dense_factors(&g);
    let want = oracle::brute_marginals(&cards, &factors);
    let got = g.sum_product(Schedule::TreeExact).unwrap();
    assert!(max_dev(&got.beliefs, &want) < 1e-12);
}

/// A random forest: each new variable joins up to two earlier components
/// through one factor, so no cycle can form.
fn random_forest(seed: u64, order: Option<&[usize]>) -> FactorGraph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nv = rng.random_range(1..=8);
    let cards: Vec<usize> = (0..nv).map(|_| 1 << rng.random_range(1..=2)).collect();
    let mut comp: Vec<usize> = (0..nv).collect();
    let mut factors: Vec<(Vec<usize>, FactorKind<f64>)> = Vec::new();
    for v in 0..nv {
        let table: Vec<f64> = (0..cards[v]).map(|_| rng.random_range(0.05..1.0)).collect();
        factors.push((vec![v], FactorKind::Table(table)));
        if v == 0 {
            continue;
        }
        let mut nb = vec![v];
        for _ in 0..rng.random_range(0..=2) {
            let u = rng.random_range(0..v);
            if nb.iter().all(|&w| comp[w] != comp[u]) {
                nb.push(u);
            }
        }
        if nb.len() == 1 {
            continue;
        }
        let same_card = nb.iter().all(|&w| cards[w] == cards[v]);
        let kind = match rng.random_range(0..3) {
            0 if same_card => FactorKind::Xor,
            1 if nb.len() == 2 && same_card => FactorKind::ProjectionEqual { shift: 0, width: 1 },
            _ => {
                let size: usize = nb.iter().map(|&w| cards[w]).product();
                FactorKind::Table((0..size).map(|_| rng.random_range(0.0..1.0)).collect())
            }
        };
        let merged: Vec<usize> = nb.iter().map(|&w| comp[w]).collect();
        for c in comp.iter_mut() {
            if merged.contains(c) {
                *c = v;
            }
        }
        factors.push((nb, kind));
    }
    // Optionally insert variables and factors in a different order.
    let perm: Vec<usize> = order.map(|o| o.to_vec()).unwrap_or_else(|| (0..nv).collect());
    let mut inv = vec![0; nv];
    let mut g = FactorGraph::new();
    for &v in &perm {
        inv[v] = g.add_variable(cards[v]).unwrap();
    }
    let fo: Vec<usize> = if order.is_some() { (0..factors.len()).rev().collect() } else { (0..factors.len()).collect() };
    for f in fo {
        let (nb, kind) = &factors[f];
        let mapped: Vec<usize> = nb.iter().map(|&w| inv[w]).collect();
        g.add_factor(&mapped, kind.clone()).unwrap();
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tree_marginals_are_exact(seed in any::<u64>()) {
        let g = random_forest(seed, None);
        prop_assert!(g.is_tree());
        let (cards, factors) = dense_factors(&g);
        let want = oracle::brute_marginals(&cards, &factors);
        let got = g.sum_product(Schedule::TreeExact).unwrap();
        prop_assert!(max_dev(&got.beliefs, &want) <= 1e-10);
    }

    #[test]
    fn schedule_order_does_not_matter(seed in any::<u64>()) {
        let g = random_forest(seed, None);
        let nv = g.num_variables();
        let order: Vec<usize> = (0..nv).rev().collect();
        let h = random_forest(seed, Some(&order));
        let a = g.sum_product(Schedule::TreeExact).unwrap();
        let b = h.sum_product(Schedule::TreeExact).unwrap();
        for v in 0..nv {
            let dev = a.beliefs[v].iter().zip(&b.beliefs[nv - 1 - v]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            prop_assert!(dev <= 1e-12);
        }
    }

    #[test]
    fn flooding_on_a_tree_reaches_the_exact_answer(seed in any::<u64>(), damping in 0.0f64..0.6) {
        let g = random_forest(seed, None);
        let exact = g.sum_product(Schedule::TreeExact).unwrap();
        let opts = LoopyOptions { max_iter: 500, tol: 1e-13, damping };
        let loopy = g.sum_product(Schedule::Loopy(opts)).unwrap();
        prop_assert!(loopy.converged);
        prop_assert!(max_dev(&loopy.beliefs, &exact.beliefs) <= 1e-9);
    }
}

#[test]
fn zero_damping_is_plain_flooding() {
    let g = random_forest(11, None);
    let a = g.sum_product(Schedule::Loopy(LoopyOptions { max_iter: 3, tol: 0.0, damping: 0.0 })).unwrap();
    let b = g.sum_product(Schedule::Loopy(LoopyOptions { max_iter: 3, tol: 0.0, ..Default::default() })).unwrap();
    assert_eq!(a, b);
    assert!(!a.converged);
    assert_eq!(a.iterations, 3);
}

#[test]
fn frustrated_loop_is_flagged_unconverged() {
    // Three binary variables pairwise forced to differ.
    let mut g = FactorGraph::new();
    let v: Vec<_> = (0..3).map(|_| g.add_variable(2).unwrap()).collect();
    g.add_unary(v[0], vec![0.9, 0.1]).unwrap();
    for i in 0..3 {
        g.add_factor(&[v[i], v[(i + 1) % 3]], FactorKind::Table(vec![0.01, 1.0, 1.0, 0.01])).unwrap();
    }
    let m = g.sum_product(Schedule::Loopy(LoopyOptions { max_iter: 2, ..Default::default() })).unwrap();
    assert!(!m.converged);
    for b in &m.beliefs {
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn single_precision_engine() {
    let mut g = FactorGraph::<f32>::new();
    let a = g.add_variable(4).unwrap();
    let b = g.add_variable(4).unwrap();
    g.add_unary(a, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
    g.add_factor(&[a, b], FactorKind::Xor).unwrap();
    let m = g.sum_product(Schedule::TreeExact).unwrap();
    assert!((m.beliefs[1][3] - 0.4).abs() < 1e-6);
}
