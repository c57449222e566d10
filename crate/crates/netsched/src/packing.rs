use crate::{check_flows, Direction, Flow, SchedError};

/// Flows of one direction whose spans share no link, ordered left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packing {
    pub direction: Direction,
    /// Indices into the caller's flow list.
    pub flows: Vec<usize>,
}

/// A maximal chain of nodes that carries one right and one left flow over
/// every link. Position 0 is the leftmost node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PncUnit {
    pub start: usize,
    pub end: usize,
    /// None for a single common node, which carries no PNC traffic.
    pub right_flow: Option<usize>,
    pub left_flow: Option<usize>,
    /// Slot parity: the node at position i transmits in the dual's slot (i + parity) % 2.
    pub parity: usize,
}

impl PncUnit {
    pub fn links(&self) -> usize {
        self.end - self.start
    }

    pub fn contains(&self, node: usize) -> bool {
        self.start <= node && node <= self.end
    }

    /// 0 or 1: which of the dual's two slots `node` transmits in.
    pub fn slot_of(&self, node: usize) -> usize {
        (node - self.start + self.parity) % 2
    }
}

/// A maximal span of links used by one direction only (or dropped out of a
/// unit), served by store-and-forward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub direction: Direction,
    pub from: usize,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPacking {
    pub right: Packing,
    pub left: Packing,
    pub common_nodes: Vec<usize>,
    pub pnc_units: Vec<PncUnit>,
    pub unidirectional_segments: Vec<Segment>,
}

/// Greedy sweeps from the left: each pass takes, in order of left end, every
/// remaining flow that starts at or after the previous pick's right end.
pub fn build_packings(flows: &[Flow], direction: Direction) -> Vec<Packing> {
    let mut remaining: Vec<usize> = (0..flows.len()).filter(|&i| flows[i].direction() == direction).collect();
    remaining.sort_by_key(|&i| (flows[i].lo(), flows[i].hi(), i));
    let mut out = Vec::new();
    while !remaining.is_empty() {
        let mut taken = Vec::new();
        let mut rest = Vec::new();
        let mut edge = 0;
        for &i in &remaining {
            if flows[i].lo() >= edge {
                edge = flows[i].hi();
                taken.push(i);
            } else {
                rest.push(i);
            }
        }
        out.push(Packing { direction, flows: taken });
        remaining = rest;
    }
    out
}

/// Pairs the first min(R, L) packings in construction order. Returns the
/// duals and the unmatched packings.
pub fn match_dual(flows: &[Flow], rights: Vec<Packing>, lefts: Vec<Packing>) -> (Vec<DualPacking>, Vec<Packing>) {
    let m = rights.len().min(lefts.len());
    let mut unmatched = Vec::new();
    let mut rights = rights.into_iter();
    let mut lefts = lefts.into_iter();
    let mut duals = Vec::with_capacity(m);
    for _ in 0..m {
        let (r, l) = (rights.next().unwrap(), lefts.next().unwrap());
        duals.push(analyse_dual(flows, r, l));
    }
    unmatched.extend(rights);
    unmatched.extend(lefts);
    (duals, unmatched)
}

/// Flow covering link (a, a+1) in a packing, if any.
fn link_owner(flows: &[Flow], p: &Packing, a: usize) -> Option<usize> {
    p.flows.iter().copied().find(|&i| flows[i].covers_link(a))
}

fn node_covered(flows: &[Flow], p: &Packing, x: usize) -> bool {
    p.flows.iter().any(|&i| flows[i].lo() <= x && x <= flows[i].hi())
}

fn is_endpoint(flows: &[Flow], p: &Packing, x: usize) -> bool {
    p.flows.iter().any(|&i| flows[i].src == x || flows[i].dst == x)
}

fn analyse_dual(flows: &[Flow], right: Packing, left: Packing) -> DualPacking {
    let span = |p: &Packing| p.flows.iter().map(|&i| (flows[i].lo(), flows[i].hi())).fold((usize::MAX, 0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    let (rlo, rhi) = span(&right);
    let (llo, lhi) = span(&left);
    let (lo, hi) = (rlo.max(llo), rhi.min(lhi));

    let common_nodes: Vec<usize> = if lo <= hi {
        (lo..=hi).filter(|&x| node_covered(flows, &right, x) && node_covered(flows, &left, x)).collect()
    } else {
        Vec::new()
    };

    let double = |a: usize| link_owner(flows, &right, a).is_some() && link_owner(flows, &left, a).is_some();
    let interior_break = |x: usize| is_endpoint(flows, &right, x) || is_endpoint(flows, &left, x);

    // Runs of doubly covered links, cut after any node where a flow starts or
    // ends; the link leaving that node falls back to store-and-forward.
    let mut units: Vec<PncUnit> = Vec::new();
    let mut in_unit = vec![false; hi.saturating_add(2)];
    let mut dropped: Vec<usize> = Vec::new();
    let mut a = lo;
    while lo <= hi && a < hi {
        if !double(a) {
            a += 1;
            continue;
        }
        let start = a;
        let mut end = a + 1;
        while end < hi && double(end) && !interior_break(end) {
            end += 1;
        }
        units.push(PncUnit {
            start,
            end,
            right_flow: link_owner(flows, &right, start),
            left_flow: link_owner(flows, &left, start),
            parity: 0,
        });
        in_unit[start..=end].fill(true);
        if end < hi && double(end) {
            dropped.push(end);
            a = end + 1;
        } else {
            a = end;
        }
    }
    for &x in &common_nodes {
        if !in_unit[x] {
            units.push(PncUnit { start: x, end: x, right_flow: None, left_flow: None, parity: 0 });
        }
    }
    units.sort_by_key(|u| u.start);

    // Touching units: the next unit's first node shares the slot of the
    // previous unit's last node, so neither end hears the other unit.
    let mut prev: Option<(usize, usize)> = None;
    for u in units.iter_mut().filter(|u| u.links() > 0) {
        if let Some((end, slot)) = prev {
            if end + 1 == u.start {
                u.parity = slot;
            }
        }
        prev = Some((u.end, u.slot_of(u.end)));
    }

    let mut segments = Vec::new();
    for (p, dir) in [(&right, Direction::Right), (&left, Direction::Left)] {
        for &i in &p.flows {
            let f = flows[i];
            let mut run: Option<usize> = None;
            for a in f.lo()..=f.hi() {
                let residual = a < f.hi() && (!double(a) || dropped.contains(&a));
                match (residual, run) {
                    (true, None) => run = Some(a),
                    (false, Some(s)) => {
                        segments.push(Segment { direction: dir, from: s, to: a });
                        run = None;
                    }
                    _ => {}
                }
            }
        }
    }
    segments.sort_by_key(|s| (s.from, s.direction == Direction::Left));

    DualPacking { right, left, common_nodes, pnc_units: units, unidirectional_segments: segments }
}

/// Everything the scheduler derives from a flow set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub n: usize,
    pub flows: Vec<Flow>,
    pub duals: Vec<DualPacking>,
    pub unmatched: Vec<Packing>,
    pub right_packings: usize,
    pub left_packings: usize,
}

pub fn plan(n: usize, flows: &[Flow]) -> Result<Plan, SchedError> {
    check_flows(n, flows)?;
    let rights = build_packings(flows, Direction::Right);
    let lefts = build_packings(flows, Direction::Left);
    let (right_packings, left_packings) = (rights.len(), lefts.len());
    let (duals, unmatched) = match_dual(flows, rights, lefts);
    Ok(Plan { n, flows: flows.to_vec(), duals, unmatched, right_packings, left_packings })
}
