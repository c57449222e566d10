//! Sum-product belief propagation over finite-alphabet variables.
//!
//! Messages are kept normalized in the linear domain. Tree mode runs one
//! leaves-to-root and one root-to-leaves pass per connected component and is
//! exact; loopy mode floods all messages each iteration.

use crate::error::{PncError, Result};
use crate::real::Real;
use std::collections::VecDeque;

pub type VarId = usize;
pub type FactorId = usize;

#[derive(Debug, Clone, PartialEq)]
pub enum FactorKind<T> {
    /// Dense table over the neighbor alphabet product, last neighbor fastest.
    Table(Vec<T>),
    /// Indicator that the bitwise XOR of all neighbor values is zero. All
    /// neighbors share one power-of-two cardinality.
    Xor,
    /// Indicator on two neighbors that the `width`-bit digit at `shift` agrees.
    ProjectionEqual { shift: u32, width: u32 },
}

#[derive(Debug, Clone, PartialEq)]
struct Factor<T> {
    neighbors: Vec<VarId>,
    kind: FactorKind<T>,
    /// Edges of this factor are `first_edge..first_edge + neighbors.len()`.
    first_edge: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopyOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub damping: f64,
}

impl Default for LoopyOptions {
    fn default() -> Self {
        Self { max_iter: 50, tol: 1e-6, damping: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    TreeExact,
    Loopy(LoopyOptions),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marginals<T> {
    pub beliefs: Vec<Vec<T>>,
    /// Always true in tree mode.
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FactorGraph<T> {
    cards: Vec<usize>,
    factors: Vec<Factor<T>>,
    var_edges: Vec<Vec<usize>>,
    edge_var: Vec<VarId>,
    edge_factor: Vec<FactorId>,
    edge_offset: Vec<usize>,
    msg_len: usize,
}

impl<T: Real> FactorGraph<T> {
    pub fn new() -> Self {
        Self {
            cards: Vec::new(),
            factors: Vec::new(),
            var_edges: Vec::new(),
            edge_var: Vec::new(),
            edge_factor: Vec::new(),
            edge_offset: Vec::new(),
            msg_len: 0,
        }
    }

    pub fn add_variable(&mut self, card: usize) -> Result<VarId> {
        if card == 0 {
            return Err(PncError::InvalidGraph("variable with empty alphabet".into()));
        }
        self.cards.push(card);
        self.var_edges.push(Vec::new());
        Ok(self.cards.len() - 1)
    }

    pub fn add_factor(&mut self, neighbors: &[VarId], kind: FactorKind<T>) -> Result<FactorId> {
        self.check_factor(neighbors, &kind)?;
        let id = self.factors.len();
        let first_edge = self.edge_var.len();
        for &v in neighbors {
            let e = self.edge_var.len();
            self.edge_var.push(v);
            self.edge_factor.push(id);
            self.edge_offset.push(self.msg_len);
            self.msg_len += self.cards[v];
            self.var_edges[v].push(e);
        }
        self.factors.push(Factor { neighbors: neighbors.to_vec(), kind, first_edge });
        Ok(id)
    }

    /// Shorthand for a single-variable table factor.
    pub fn add_unary(&mut self, var: VarId, table: Vec<T>) -> Result<FactorId> {
        self.add_factor(&[var], FactorKind::Table(table))
    }

    fn check_factor(&self, neighbors: &[VarId], kind: &FactorKind<T>) -> Result<()> {
        let bad = |m: String| Err(PncError::InvalidGraph(m));
        if neighbors.is_empty() {
            return bad("factor without neighbors".into());
        }
        for (i, &v) in neighbors.iter().enumerate() {
            if v >= self.cards.len() {
                return bad(format!("unknown variable {v}"));
            }
            if neighbors[..i].contains(&v) {
                return bad(format!("variable {v} repeated in one factor"));
            }
        }
        match kind {
            FactorKind::Table(t) => {
                let size: usize = neighbors.iter().map(|&v| self.cards[v]).product();
                if t.len() != size {
                    return bad(format!("table has {} entries, expected {size}", t.len()));
                }
                if t.iter().any(|&x| !(x >= T::zero() && x.is_finite())) {
                    return bad("table entries must be finite and nonnegative".into());
                }
                if !t.iter().any(|&x| x > T::zero()) {
                    return bad("table has no positive entry".into());
                }
            }
            FactorKind::Xor => {
                let c = self.cards[neighbors[0]];
                if !c.is_power_of_two() || neighbors.iter().any(|&v| self.cards[v] != c) {
                    return bad("xor factor needs equal power-of-two cardinalities".into());
                }
            }
            FactorKind::ProjectionEqual { shift, width } => {
                if neighbors.len() != 2 {
                    return bad("projection factor needs exactly two neighbors".into());
                }
                let need = 1usize << (shift + width);
                if *width == 0 || neighbors.iter().any(|&v| self.cards[v] < need) {
                    return bad("projection digit exceeds variable alphabet".into());
                }
            }
        }
        Ok(())
    }

    pub fn num_variables(&self) -> usize {
        self.cards.len()
    }

    pub fn num_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn cardinality(&self, v: VarId) -> usize {
        self.cards[v]
    }

    pub fn factor_neighbors(&self, f: FactorId) -> &[VarId] {
        &self.factors[f].neighbors
    }

    pub fn factor_kind(&self, f: FactorId) -> &FactorKind<T> {
        &self.factors[f].kind
    }

    /// Evaluates factor `f` at an assignment of its neighbors.
    pub fn factor_value(&self, f: FactorId, values: &[usize]) -> T {
        let fac = &self.factors[f];
        match &fac.kind {
            FactorKind::Table(t) => {
                let mut idx = 0;
                for (&v, &x) in fac.neighbors.iter().zip(values) {
                    idx = idx * self.cards[v] + x;
                }
                t[idx]
            }
            FactorKind::Xor => indicator(values.iter().fold(0, |a, &x| a ^ x) == 0),
            FactorKind::ProjectionEqual { shift, width } => {
                let mask = (1 << width) - 1;
                indicator((values[0] >> shift) & mask == (values[1] >> shift) & mask)
            }
        }
    }

    /// Acyclicity of the bipartite variable-factor graph.
    pub fn is_tree(&self) -> bool {
        let n = self.cards.len() + self.factors.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for e in 0..self.edge_var.len() {
            let a = find(&mut parent, self.edge_var[e]);
            let b = find(&mut parent, self.cards.len() + self.edge_factor[e]);
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        true
    }

    pub fn sum_product(&self, schedule: Schedule) -> Result<Marginals<T>> {
        match schedule {
            Schedule::TreeExact => self.run_tree(),
            Schedule::Loopy(opts) => self.run_loopy(&opts),
        }
    }

    fn msg<'a>(&self, store: &'a [T], e: usize) -> &'a [T] {
        let o = self.edge_offset[e];
        &store[o..o + self.cards[self.edge_var[e]]]
    }

    fn var_to_factor(&self, e: usize, f2v: &[T], out: &mut [T]) {
        out.fill(T::one());
        for &other in &self.var_edges[self.edge_var[e]] {
            if other != e {
                for (o, &m) in out.iter_mut().zip(self.msg(f2v, other)) {
                    *o *= m;
                }
            }
        }
        normalize(out);
    }

    fn factor_to_var(&self, e: usize, v2f: &[T], out: &mut [T]) {
        let f = self.edge_factor[e];
        let fac = &self.factors[f];
        let slot = e - fac.first_edge;
        out.fill(T::zero());
        match &fac.kind {
            FactorKind::Table(table) => {
                let k = fac.neighbors.len();
                let cards: Vec<usize> = fac.neighbors.iter().map(|&v| self.cards[v]).collect();
                let mut digits = vec![0usize; k];
                for &t in table {
                    if t > T::zero() {
                        let mut w = t;
                        for (i, &d) in digits.iter().enumerate() {
                            if i != slot {
                                w *= self.msg(v2f, fac.first_edge + i)[d];
                            }
                        }
                        out[digits[slot]] += w;
                    }
                    for i in (0..k).rev() {
                        digits[i] += 1;
                        if digits[i] < cards[i] {
                            break;
                        }
                        digits[i] = 0;
                    }
                }
            }
            FactorKind::Xor => {
                let c = out.len();
                let mut acc = vec![T::one(); c];
                let mut buf = vec![T::zero(); c];
                for i in 0..fac.neighbors.len() {
                    if i != slot {
                        buf.copy_from_slice(self.msg(v2f, fac.first_edge + i));
                        walsh_hadamard(&mut buf);
                        for (a, &b) in acc.iter_mut().zip(&buf) {
                            *a *= b;
                        }
                    }
                }
                walsh_hadamard(&mut acc);
                for (o, &a) in out.iter_mut().zip(&acc) {
                    *o = a.max(T::zero());
                }
            }
            FactorKind::ProjectionEqual { shift, width } => {
                let mask = (1usize << width) - 1;
                let mut sums = vec![T::zero(); mask + 1];
                for (a, &m) in self.msg(v2f, fac.first_edge + 1 - slot).iter().enumerate() {
                    sums[(a >> shift) & mask] += m;
                }
                for (b, o) in out.iter_mut().enumerate() {
                    *o = sums[(b >> shift) & mask];
                }
            }
        }
        normalize(out);
    }

    fn beliefs(&self, f2v: &[T]) -> Result<Vec<Vec<T>>> {
        let mut out = Vec::with_capacity(self.cards.len());
        for (v, edges) in self.var_edges.iter().enumerate() {
            let mut b = vec![T::one(); self.cards[v]];
            for &e in edges {
                for (x, &m) in b.iter_mut().zip(self.msg(f2v, e)) {
                    *x *= m;
                }
            }
            if !normalize(&mut b) {
                return Err(PncError::ZeroBelief(v));
            }
            out.push(b);
        }
        Ok(out)
    }

    fn uniform_messages(&self) -> Vec<T> {
        let mut m = vec![T::zero(); self.msg_len];
        for e in 0..self.edge_var.len() {
            let c = self.cards[self.edge_var[e]];
            let o = self.edge_offset[e];
            m[o..o + c].fill(T::one() / T::from_usize(c).unwrap());
        }
        m
    }

    fn run_tree(&self) -> Result<Marginals<T>> {
        if !self.is_tree() {
            return Err(PncError::NotATree);
        }
        let nv = self.cards.len();
        // (edge, child is the factor side) in breadth-first discovery order
        let mut order: Vec<(usize, bool)> = Vec::with_capacity(self.edge_var.len());
        let mut seen_var = vec![false; nv];
        let mut seen_fac = vec![false; self.factors.len()];
        let mut queue = VecDeque::new();
        for root in 0..nv {
            if seen_var[root] {
                continue;
            }
            seen_var[root] = true;
            queue.push_back((root, false));
            while let Some((node, is_factor)) = queue.pop_front() {
                if is_factor {
                    let fac = &self.factors[node];
                    for (i, &v) in fac.neighbors.iter().enumerate() {
                        if !seen_var[v] {
                            seen_var[v] = true;
                            order.push((fac.first_edge + i, false));
                            queue.push_back((v, false));
                        }
                    }
                } else {
                    for &e in &self.var_edges[node] {
                        let f = self.edge_factor[e];
                        if !seen_fac[f] {
                            seen_fac[f] = true;
                            order.push((e, true));
                            queue.push_back((f, true));
                        }
                    }
                }
            }
        }

        let mut v2f = self.uniform_messages();
        let mut f2v = v2f.clone();
        let mut buf = vec![T::zero(); self.cards.iter().copied().max().unwrap_or(0)];
        // Upward: child to parent. Downward: parent to child.
        for pass in 0..2 {
            let edges: Box<dyn Iterator<Item = &(usize, bool)>> =
                if pass == 0 { Box::new(order.iter().rev()) } else { Box::new(order.iter()) };
            for &(e, child_is_factor) in edges {
                let c = self.cards[self.edge_var[e]];
                let out = &mut buf[..c];
                let o = self.edge_offset[e];
                if child_is_factor == (pass == 0) {
                    self.factor_to_var(e, &v2f, out);
                    f2v[o..o + c].copy_from_slice(out);
                } else {
                    self.var_to_factor(e, &f2v, out);
                    v2f[o..o + c].copy_from_slice(out);
                }
            }
        }
        Ok(Marginals { beliefs: self.beliefs(&f2v)?, converged: true, iterations: 1 })
    }

    fn run_loopy(&self, opts: &LoopyOptions) -> Result<Marginals<T>> {
        if !(0.0..1.0).contains(&opts.damping) {
            return Err(PncError::InvalidParameter { name: "damping", value: opts.damping });
        }
        let d = T::lit(opts.damping);
        let keep = T::one() - d;
        let tol = T::lit(opts.tol);
        let mut f2v = self.uniform_messages();
        let mut v2f = f2v.clone();
        let mut next = f2v.clone();
        let mut converged = false;
        let mut iterations = 0;
        let nedges = self.edge_var.len();
        while iterations < opts.max_iter {
            iterations += 1;
            for e in 0..nedges {
                let o = self.edge_offset[e];
                let c = self.cards[self.edge_var[e]];
                self.var_to_factor(e, &f2v, &mut next[o..o + c]);
            }
            std::mem::swap(&mut v2f, &mut next);
            let mut change = T::zero();
            for e in 0..nedges {
                let o = self.edge_offset[e];
                let c = self.cards[self.edge_var[e]];
                let out = &mut next[o..o + c];
                self.factor_to_var(e, &v2f, out);
                let mut l1 = T::zero();
                for (n, &old) in out.iter_mut().zip(&f2v[o..o + c]) {
                    *n = keep * *n + d * old;
                    l1 += (*n - old).abs();
                }
                change = change.max(l1);
            }
            std::mem::swap(&mut f2v, &mut next);
            if change < tol {
                converged = true;
                break;
            }
        }
        Ok(Marginals { beliefs: self.beliefs(&f2v)?, converged, iterations })
    }
}

#[inline]
fn indicator<T: Real>(b: bool) -> T {
    if b {
        T::one()
    } else {
        T::zero()
    }
}

/// Scales to unit sum. Returns false and leaves the vector alone when the
/// sum is zero or not finite.
fn normalize<T: Real>(v: &mut [T]) -> bool {
    let s = v.iter().copied().fold(T::zero(), |a, b| a + b);
    if !(s > T::zero() && s.is_finite()) {
        return false;
    }
    for x in v.iter_mut() {
        *x /= s;
    }
    true
}

/// In-place unnormalized Walsh-Hadamard transform. Applying it twice scales
/// by the length, which message normalization absorbs.
fn walsh_hadamard<T: Real>(v: &mut [T]) {
    let n = v.len();
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for j in i..i + h {
                let (a, b) = (v[j], v[j + h]);
                v[j] = a + b;
                v[j + h] = a - b;
            }
        }
        h *= 2;
    }
}
