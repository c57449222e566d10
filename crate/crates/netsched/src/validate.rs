use std::collections::{HashMap, HashSet};

use crate::frame::{FrameSchedule, Payload};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    HalfDuplex,
    OutOfRange,
    Collision,
    Malformed,
    MissingPacket,
    WrongDecode,
    CorruptPacket,
    Undelivered,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub slot: Option<usize>,
    pub node: usize,
    pub flow: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub frames: usize,
    /// Packets checked at destinations.
    pub delivered: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Content of packet `index` of `flow`; packets before the start are zero.
pub fn packet_value(seed: u64, flow: usize, index: i64) -> u64 {
    if index < 0 {
        return 0;
    }
    let mut z = seed ^ (flow as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93) ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Default, Clone, Copy)]
struct Lane {
    last_rx: u64,
    last_tx: u64,
    injected: u64,
}

// A relay holds a packet at most a frame or so before passing it on.
const HOLD: usize = 8;

struct Replay<'a> {
    sched: &'a FrameSchedule,
    seed: u64,
    // One ring of recent packets per (node, flow) pair that appears in the schedule.
    rings: Vec<[(i64, u64); HOLD]>,
    // Next packet index each destination expects, in order.
    next: Vec<i64>,
    seen: HashSet<(ViolationKind, usize, Option<usize>)>,
    out: Vec<Violation>,
}

impl Replay<'_> {
    fn flag(&mut self, kind: ViolationKind, slot: Option<usize>, node: usize, flow: Option<usize>) {
        if self.seen.insert((kind, node, flow)) {
            self.out.push(Violation { kind, slot, node, flow });
        }
    }

    fn fetch(&mut self, at: Holder, index: i64, slot: usize) -> u64 {
        if index < 0 || self.sched.flows[at.flow].src == at.node {
            return packet_value(self.seed, at.flow, index);
        }
        match self.rings[at.ring][index as usize % HOLD] {
            (i, v) if i == index => v,
            _ => {
                self.flag(ViolationKind::MissingPacket, Some(slot), at.node, Some(at.flow));
                0
            }
        }
    }

    fn keep(&mut self, at: Holder, index: i64, value: u64, kind: ViolationKind, slot: usize) {
        if index < 0 {
            return;
        }
        if value != packet_value(self.seed, at.flow, index) {
            self.flag(kind, Some(slot), at.node, Some(at.flow));
        }
        self.rings[at.ring][index as usize % HOLD] = (index, value);
        if self.sched.flows[at.flow].dst == at.node && self.next[at.flow] == index {
            self.next[at.flow] += 1;
        }
    }
}

#[derive(Clone, Copy)]
struct Holder {
    node: usize,
    flow: usize,
    ring: usize,
}

struct Holders(HashMap<(usize, usize), usize>);

impl Holders {
    fn get(&mut self, node: usize, flow: usize) -> Holder {
        let next = self.0.len();
        let ring = *self.0.entry((node, flow)).or_insert(next);
        Holder { node, flow, ring }
    }
}

enum Action {
    Store { at: Holder, age: u32 },
    Relay(usize),
    Decode { lane: usize, at: Holder, age: u32 },
}

struct Reception {
    heard: Vec<usize>,
    actions: Vec<Action>,
}

struct SlotPlan {
    // Lane state index for PNC transmitters.
    lane: Vec<Option<usize>>,
    source: Vec<Option<Holder>>,
    rx: Vec<Reception>,
}

fn static_checks(sched: &FrameSchedule, out: &mut Vec<Violation>) {
    let n = sched.n;
    for (s, txs) in sched.slots.iter().enumerate() {
        let mut tx = vec![0usize; n + 2];
        let mut rx = vec![false; n + 2];
        for t in txs {
            if t.node == 0 || t.node > n {
                out.push(Violation { kind: ViolationKind::OutOfRange, slot: Some(s), node: t.node, flow: None });
                continue;
            }
            tx[t.node] += 1;
            for &r in &t.receivers {
                if r == 0 || r > n || r.abs_diff(t.node) != 1 {
                    out.push(Violation { kind: ViolationKind::OutOfRange, slot: Some(s), node: r, flow: None });
                } else {
                    rx[r] = true;
                }
            }
        }
        let mut who = vec![usize::MAX; n + 2];
        for (i, t) in txs.iter().enumerate() {
            if t.node <= n {
                who[t.node] = i;
            }
        }
        for x in 1..=n {
            if tx[x] > 1 {
                out.push(Violation { kind: ViolationKind::Malformed, slot: Some(s), node: x, flow: None });
            }
            if tx[x] > 0 && rx[x] {
                out.push(Violation { kind: ViolationKind::HalfDuplex, slot: Some(s), node: x, flow: None });
            }
            if rx[x] {
                // Everything in range is heard; it must all be intended.
                let heard = [x - 1, x + 1].into_iter().filter(|&y| tx[y] > 0);
                let intended = |y: usize| txs[who[y]].receivers.contains(&x);
                if heard.clone().any(|y| !intended(y)) {
                    out.push(Violation { kind: ViolationKind::Collision, slot: Some(s), node: x, flow: None });
                }
            }
        }
    }
}

/// Replays the frame `frames` times (by default enough for every flow to
/// deliver) with concrete packet contents, checking the radio constraints
/// and that each destination receives its packets in order.
pub fn validate_schedule(sched: &FrameSchedule, seed: u64, frames: Option<usize>) -> ValidationReport {
    let mut out = Vec::new();
    static_checks(sched, &mut out);

    let max_age = sched.flow_age.iter().copied().max().unwrap_or(0) as usize;
    let k = frames.unwrap_or(max_age + 3).max(1);
    let mut rp = Replay {
        sched,
        seed,
        rings: Vec::new(),
        next: vec![0; sched.flows.len()],
        seen: HashSet::new(),
        out,
    };

    // One lane state per (node, dual); PNC roles are needed on reception.
    let mut lane_ix: HashMap<(usize, usize), (usize, Payload)> = HashMap::new();
    for s in 0..sched.pnc_slots {
        for t in &sched.slots[s] {
            let next = lane_ix.len();
            if lane_ix.insert((t.node, s / 2), (next, t.payload)).is_some() {
                rp.flag(ViolationKind::Malformed, Some(s), t.node, None);
            }
        }
    }
    let mut lanes = vec![Lane::default(); lane_ix.len()];

    let mut holders = Holders(HashMap::new());
    let mut plans = Vec::with_capacity(sched.slots.len());
    let mut on_air = vec![usize::MAX; sched.n + 2];
    for (s, txs) in sched.slots.iter().enumerate() {
        for (i, t) in txs.iter().enumerate() {
            if t.node <= sched.n {
                on_air[t.node] = i;
            }
        }
        let mut receivers: Vec<usize> = txs.iter().flat_map(|t| t.receivers.iter().copied()).filter(|&r| r >= 1 && r <= sched.n).collect();
        receivers.sort_unstable();
        receivers.dedup();
        let mut rx = Vec::with_capacity(receivers.len());
        for r in receivers {
            let heard: Vec<usize> = [r - 1, r + 1].into_iter().map(|y| on_air[y]).filter(|&i| i != usize::MAX).collect();
            let mut actions = Vec::new();
            match sched.lane_of(s) {
                None => {
                    for &i in &heard {
                        if let (Payload::Forward { flow, age }, true) = (txs[i].payload, txs[i].receivers.contains(&r)) {
                            actions.push(Action::Store { at: holders.get(r, flow), age });
                        }
                    }
                }
                Some(d) => match lane_ix.get(&(r, d)).copied() {
                    Some((ix, Payload::PncRelay)) => actions.push(Action::Relay(ix)),
                    Some((ix, Payload::PncEnd { decode: (flow, age), .. })) => actions.push(Action::Decode { lane: ix, at: holders.get(r, flow), age }),
                    _ => rp.flag(ViolationKind::Malformed, Some(s), r, None),
                },
            }
            rx.push(Reception { heard, actions });
        }
        let lane = txs
            .iter()
            .map(|t| sched.lane_of(s).and_then(|d| lane_ix.get(&(t.node, d)).map(|x| x.0)))
            .collect();
        let source = txs
            .iter()
            .map(|t| match t.payload {
                Payload::Forward { flow, .. } | Payload::PncEnd { inject: (flow, _), .. } => Some(holders.get(t.node, flow)),
                Payload::PncRelay => None,
            })
            .collect();
        for t in txs {
            if t.node <= sched.n {
                on_air[t.node] = usize::MAX;
            }
        }
        plans.push(SlotPlan { lane, source, rx });
    }

    rp.rings = vec![[(-1, 0); HOLD]; holders.0.len()];
    let mut sent = Vec::new();
    for frame in 0..k as i64 {
        for (s, (txs, plan)) in sched.slots.iter().zip(&plans).enumerate() {
            sent.clear();
            for ((t, lane), src) in txs.iter().zip(&plan.lane).zip(&plan.source) {
                let value = match (t.payload, *lane) {
                    (Payload::Forward { age, .. }, _) => rp.fetch(src.unwrap(), frame - age as i64, s),
                    (Payload::PncRelay, Some(ix)) => {
                        let st = &mut lanes[ix];
                        st.last_tx ^= st.last_rx;
                        st.last_tx
                    }
                    (Payload::PncEnd { inject: (_, age), .. }, Some(ix)) => {
                        let fresh = rp.fetch(src.unwrap(), frame - age as i64, s);
                        let st = &mut lanes[ix];
                        let decoded = st.last_rx ^ st.injected;
                        st.injected = fresh;
                        st.last_tx = fresh ^ decoded;
                        st.last_tx
                    }
                    _ => {
                        rp.flag(ViolationKind::Malformed, Some(s), t.node, None);
                        0
                    }
                };
                sent.push(value);
            }
            // Superposition: each receiver gets the XOR of every neighbor on air.
            for rc in &plan.rx {
                let y = rc.heard.iter().fold(0u64, |acc, &i| acc ^ sent[i]);
                for a in &rc.actions {
                    match *a {
                        Action::Store { at, age } => rp.keep(at, frame - age as i64, y, ViolationKind::CorruptPacket, s),
                        Action::Relay(ix) => lanes[ix].last_rx = y,
                        Action::Decode { lane, at, age } => {
                            lanes[lane].last_rx = y;
                            let v = y ^ lanes[lane].injected;
                            rp.keep(at, frame - age as i64, v, ViolationKind::WrongDecode, s);
                        }
                    }
                }
            }
        }
    }

    let mut delivered = 0;
    for (f, flow) in sched.flows.iter().enumerate() {
        let last = k as i64 - 1 - sched.flow_age[f] as i64;
        if last < 0 || rp.next[f] <= last {
            rp.flag(ViolationKind::Undelivered, None, flow.dst, Some(f));
        }
        delivered += rp.next[f].max(0) as usize;
    }

    ValidationReport { violations: rp.out, frames: k, delivered }
}
