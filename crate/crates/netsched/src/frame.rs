use crate::packing::{plan, Plan};
use crate::{Direction, Flow, SchedError};

/// What a transmitter sends in its slot. Ages count frames: a payload of age
/// `a` sent in frame t carries packet t - a of its flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Payload {
    /// Plain copy of a stored packet.
    Forward { flow: usize, age: u32 },
    /// Inside a PNC unit: XOR of the last reception and the last transmission.
    PncRelay,
    /// Unit end: injects one flow's packet XORed with the last decoded
    /// combination, and on reception decodes the opposing flow.
    PncEnd { inject: (usize, u32), decode: (usize, u32) },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transmission {
    pub node: usize,
    pub receivers: Vec<usize>,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSchedule {
    pub n: usize,
    pub flows: Vec<Flow>,
    pub slots: Vec<Vec<Transmission>>,
    /// Leading slots used by PNC units, two per dual packing.
    pub pnc_slots: usize,
    /// Frames between a packet leaving its source and reaching its destination.
    pub flow_age: Vec<u32>,
    pub plan: Plan,
}

impl FrameSchedule {
    pub fn frame_length(&self) -> usize {
        self.slots.len()
    }

    /// Packets per slot delivered to each flow.
    pub fn throughput(&self) -> f64 {
        if self.slots.is_empty() {
            0.0
        } else {
            1.0 / self.slots.len() as f64
        }
    }

    pub fn dual_count(&self) -> usize {
        self.plan.duals.len()
    }

    /// Dual packing that owns PNC slot `s`, if `s` is in the first interval.
    pub fn lane_of(&self, s: usize) -> Option<usize> {
        (s < self.pnc_slots).then_some(s / 2)
    }
}

/// Frames a packet needs to cross a unit of `links` links when the entry node
/// transmits with relative parity `o`.
pub(crate) fn unit_lag(links: usize, o: usize) -> u32 {
    ((links - 1 + o) / 2) as u32
}

#[derive(Clone)]
struct SlotUse {
    // 0 idle, 1 transmitting, 2 receiving; padded by one node each side.
    state: Vec<u8>,
    txs: Vec<Transmission>,
}

impl SlotUse {
    fn new(n: usize) -> Self {
        Self { state: vec![0; n + 2], txs: Vec::new() }
    }

    fn fits(&self, u: usize, v: usize) -> bool {
        let s = &self.state;
        let w = if v > u { v + 1 } else { v - 1 };
        let z = if v > u { u - 1 } else { u + 1 };
        s[u] == 0 && s[v] == 0 && s[w] != 1 && s[z] != 2
    }

    fn put(&mut self, u: usize, v: usize, flow: usize, age: u32) {
        self.state[u] = 1;
        self.state[v] = 2;
        self.txs.push(Transmission { node: u, receivers: vec![v], payload: Payload::Forward { flow, age } });
    }
}

type EndRole = (Option<(usize, u32)>, Option<(usize, u32)>);

struct Cursor {
    age: u32,
    // Last slot the packet was handled in; -1 before the frame starts.
    slot: i64,
}

impl Cursor {
    fn advance(&mut self, slot: usize) -> u32 {
        if (slot as i64) <= self.slot {
            self.age += 1;
        }
        self.slot = slot as i64;
        self.age
    }
}

pub fn build_frame(n: usize, flows: &[Flow]) -> Result<FrameSchedule, SchedError> {
    let plan = plan(n, flows)?;
    let pnc_slots = 2 * plan.duals.len();

    // flow -> dual index, and for each dual the unit covering each link.
    let mut dual_of = vec![None; flows.len()];
    let mut unit_at: Vec<Vec<Option<usize>>> = Vec::with_capacity(plan.duals.len());
    for (d, dual) in plan.duals.iter().enumerate() {
        for &i in dual.right.flows.iter().chain(&dual.left.flows) {
            dual_of[i] = Some(d);
        }
        let mut at = vec![None; n + 1];
        for (k, u) in dual.pnc_units.iter().enumerate() {
            at[u.start..u.end].fill(Some(k));
        }
        unit_at.push(at);
    }

    // (inject, decode) per unit end, filled while routing.
    let mut end_roles: Vec<Vec<[EndRole; 2]>> =
        plan.duals.iter().map(|d| vec![[(None, None); 2]; d.pnc_units.len()]).collect();

    let mut residual: Vec<SlotUse> = Vec::new();
    let mut flow_age = vec![0; flows.len()];

    for (fi, f) in flows.iter().enumerate() {
        let mut cur = Cursor { age: 0, slot: -1 };
        let hops = f.hops();
        let mut h = 0;
        while h < hops.len() {
            let (u, v) = hops[h];
            let link = u.min(v);
            let unit = dual_of[fi].and_then(|d| unit_at[d][link].map(|k| (d, k)));
            if let Some((d, k)) = unit {
                let pu = &plan.duals[d].pnc_units[k];
                // Side 0 is the unit's left end.
                let (entry_side, exit) = match f.direction() {
                    Direction::Right => (0, pu.end),
                    Direction::Left => (1, pu.start),
                };
                let o = pu.slot_of(u);
                let age = cur.advance(2 * d + o);
                let exit_age = age + unit_lag(pu.links(), o);
                end_roles[d][k][entry_side].0 = Some((fi, age));
                end_roles[d][k][1 - entry_side].1 = Some((fi, exit_age));
                cur = Cursor { age: exit_age, slot: 2 * d as i64 + 1 };
                h += pu.links();
                debug_assert_eq!(hops[h - 1].1, exit);
                continue;
            }
            // First fit, trying slots after the previous hop before wrapping.
            let start = (cur.slot + 1 - pnc_slots as i64).max(0) as usize;
            let count = residual.len();
            let pick = (start..count).chain(0..start.min(count)).find(|&s| residual[s].fits(u, v));
            let s = pick.unwrap_or_else(|| {
                residual.push(SlotUse::new(n));
                count
            });
            let age = cur.advance(pnc_slots + s);
            residual[s].put(u, v, fi, age);
            h += 1;
        }
        flow_age[fi] = cur.age;
    }

    let mut slots: Vec<Vec<Transmission>> = vec![Vec::new(); pnc_slots];
    for (d, dual) in plan.duals.iter().enumerate() {
        for (k, pu) in dual.pnc_units.iter().enumerate() {
            if pu.links() == 0 {
                continue;
            }
            for x in pu.start..=pu.end {
                let receivers: Vec<usize> = [x.wrapping_sub(1), x + 1].into_iter().filter(|&y| pu.contains(y)).collect();
                let payload = if x == pu.start || x == pu.end {
                    let roles = end_roles[d][k][usize::from(x == pu.end)];
                    match roles {
                        (Some(inject), Some(decode)) => Payload::PncEnd { inject, decode },
                        _ => unreachable!("unit ends always carry both directions"),
                    }
                } else {
                    Payload::PncRelay
                };
                slots[2 * d + pu.slot_of(x)].push(Transmission { node: x, receivers, payload });
            }
        }
    }
    slots.extend(residual.into_iter().map(|s| s.txs));

    Ok(FrameSchedule { n, flows: flows.to_vec(), slots, pnc_slots, flow_age, plan })
}
