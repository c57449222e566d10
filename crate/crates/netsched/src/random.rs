use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frame::build_frame;
use crate::validate::validate_schedule;
use crate::{Flow, SchedError};

/// Half the nodes, chosen at random, are sources; the rest are destinations,
/// paired by a random permutation.
pub fn random_flows<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Flow> {
    let mut nodes: Vec<usize> = (1..=n).collect();
    nodes.shuffle(rng);
    let (src, dst) = nodes.split_at(n / 2);
    src.iter().zip(dst).map(|(&s, &d)| Flow::new(s, d)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceResult {
    pub n: usize,
    pub seed: u64,
    pub flows: usize,
    pub duals: usize,
    pub frame_length: usize,
    pub lambda: f64,
    /// Normalised against the 4/N per-flow ceiling.
    pub lambda_n_over_4: f64,
    pub violations: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputStats {
    pub n: usize,
    pub instances: Vec<InstanceResult>,
    pub mean_lambda: f64,
    pub mean_lambda_n: f64,
}

pub(crate) fn instance_seed(seed: u64, n: usize, trial: usize) -> u64 {
    crate::validate::packet_value(seed, n, trial as i64)
}

pub fn run_instance(n: usize, seed: u64, validate: bool) -> Result<InstanceResult, SchedError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(SchedError::BadNodeCount(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flows = random_flows(n, &mut rng);
    let sched = build_frame(n, &flows)?;
    let f = sched.frame_length();
    let lambda = sched.throughput();
    let violations = validate.then(|| validate_schedule(&sched, seed, None).violations.len());
    Ok(InstanceResult {
        n,
        seed,
        flows: flows.len(),
        duals: sched.dual_count(),
        frame_length: f,
        lambda,
        lambda_n_over_4: lambda * n as f64 / 4.0,
        violations,
    })
}

/// Average per-flow throughput over `trials` random instances on N nodes.
pub fn throughput_vs_bound(n: usize, seed: u64, trials: usize, validate: bool) -> Result<ThroughputStats, SchedError> {
    let instances = (0..trials)
        .map(|t| run_instance(n, instance_seed(seed, n, t), validate))
        .collect::<Result<Vec<_>, _>>()?;
    let denom = trials.max(1) as f64;
    let mean_lambda = instances.iter().map(|r| r.lambda).sum::<f64>() / denom;
    Ok(ThroughputStats { n, mean_lambda, mean_lambda_n: mean_lambda * n as f64, instances })
}

/// N/8 dual packings, each tiling the line with two opposing flow pairs on
/// distinct endpoints. Needs N divisible by 8.
pub fn perfectly_paired_flows(n: usize) -> Result<Vec<Flow>, SchedError> {
    if n < 8 || !n.is_multiple_of(8) {
        return Err(SchedError::BadNodeCount(n));
    }
    let mut flows = Vec::with_capacity(n / 2);
    for k in 0..n / 8 {
        let (a, b) = (1 + k, n / 2 - k);
        let (c, d) = (n / 2 + 1 + k, n - k);
        flows.extend([Flow::new(a, b), Flow::new(b, a), Flow::new(c, d), Flow::new(d, c)]);
    }
    Ok(flows)
}
