//! Flow packing and PNC frame scheduling on a regular line of N nodes.
//!
//! Nodes are numbered 1..=N and only neighbors i, i+1 are in range. Flows are
//! routed along the line. Opposing flows are grouped into dual packings whose
//! overlapping stretches run as PNC units; everything else is store-and-forward.

mod frame;
mod packing;
mod random;
mod validate;

pub use frame::{build_frame, FrameSchedule, Payload, Transmission};
pub use packing::{build_packings, match_dual, plan, DualPacking, Packing, Plan, PncUnit, Segment};
pub use random::{perfectly_paired_flows, random_flows, run_instance, throughput_vs_bound, InstanceResult, ThroughputStats};
pub use validate::{packet_value, validate_schedule, ValidationReport, Violation, ViolationKind};

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Right,
    Left,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Flow {
    pub src: usize,
    pub dst: usize,
}

impl Flow {
    pub fn new(src: usize, dst: usize) -> Self {
        Self { src, dst }
    }

    pub fn direction(&self) -> Direction {
        if self.dst > self.src {
            Direction::Right
        } else {
            Direction::Left
        }
    }

    /// Leftmost node of the flow's span.
    pub fn lo(&self) -> usize {
        self.src.min(self.dst)
    }

    /// Rightmost node of the flow's span.
    pub fn hi(&self) -> usize {
        self.src.max(self.dst)
    }

    /// Whether the link between `a` and `a + 1` lies on the route.
    pub fn covers_link(&self, a: usize) -> bool {
        self.lo() <= a && a < self.hi()
    }

    /// Hops in travel order as (transmitter, receiver).
    pub fn hops(&self) -> Vec<(usize, usize)> {
        match self.direction() {
            Direction::Right => (self.src..self.dst).map(|u| (u, u + 1)).collect(),
            Direction::Left => (self.dst + 1..=self.src).rev().map(|u| (u, u - 1)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchedError {
    #[error("flow {index} has src == dst == {node}")]
    SelfLoop { index: usize, node: usize },
    #[error("flow {index} uses node {node} outside 1..={n}")]
    OutOfRange { index: usize, node: usize, n: usize },
    #[error("node count must be even and at least 4, got {0}")]
    BadNodeCount(usize),
}

pub(crate) fn check_flows(n: usize, flows: &[Flow]) -> Result<(), SchedError> {
    for (index, f) in flows.iter().enumerate() {
        if f.src == f.dst {
            return Err(SchedError::SelfLoop { index, node: f.src });
        }
        for node in [f.src, f.dst] {
            if node == 0 || node > n {
                return Err(SchedError::OutOfRange { index, node, n });
            }
        }
    }
    Ok(())
}
