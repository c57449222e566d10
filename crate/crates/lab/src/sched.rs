use pnc_netsched::{run_instance, InstanceResult};
use rayon::prelude::*;

use crate::ber::substream_seed;
use crate::{LabError, Result};

/// Random instances for each N; instance seeds come from (seed, N, trial).
pub fn run_netsched(nodes: &[usize], trials: usize, seed: u64, validate: bool) -> Result<Vec<InstanceResult>> {
    if nodes.is_empty() || trials == 0 {
        return Err(LabError::usage("need at least one node count and one trial"));
    }
    if let Some(&n) = nodes.iter().find(|&&n| n < 4 || n % 2 != 0) {
        return Err(LabError::usage(format!("node count {n} must be even and at least 4")));
    }
    let jobs: Vec<(usize, u64)> = nodes.iter().flat_map(|&n| (0..trials as u64).map(move |t| (n, t))).collect();
    Ok(jobs
        .into_par_iter()
        .map(|(n, t)| run_instance(n, substream_seed(seed, n as u64, t), validate))
        .collect::<std::result::Result<Vec<_>, _>>()?)
}
