//! Shared fixtures for the integration suites: reference circuits, random
//! generators, and the brute-force extraction oracles the exact solver is
//! checked against.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use rewire::extract::{ExtractionInstance, InstanceNode};
use rewire::netlist::{CellKind, NetBit, Netlist, NetlistBuilder};
use rewire::term::Gate;

/// n-bit ripple-carry adder from raw gates, carry-in included, each stage in
/// the canonical full-adder orientation:
/// `s = XOR(XOR(a,b), c)`, `c' = OR(AND(a,b), AND(c, XOR(a,b)))`.
pub fn ripple_adder_gates(n: u32) -> Netlist {
    let mut b = NetlistBuilder::new("adder");
    b.input("a", n);
    b.input("b", n);
    b.input("cin", 1);
    b.output("s", n);
    b.output("cout", 1);
    let mut carry = NetBit::new("cin", 0);
    for i in 0..n {
        let ai = NetBit::new("a", i);
        let bi = NetBit::new("b", i);
        let xab = b.gate(Gate::Xor, &[ai.clone(), bi.clone()]);
        let sum = b.gate(Gate::Xor, &[xab.clone(), carry.clone()]);
        b.connect_output("s", i, sum);
        let and_ab = b.gate(Gate::And, &[ai, bi]);
        let and_cx = b.gate(Gate::And, &[carry, xab]);
        carry = b.gate(Gate::Or, &[and_ab, and_cx]);
    }
    b.connect_output("cout", 0, carry);
    b.finish().unwrap()
}

/// Parameters for the random feed-forward pipeline generator.
pub struct PipelineParams {
    pub max_inputs: u32,
    pub max_gates: usize,
    pub max_registers: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            max_inputs: 4,
            max_gates: 24,
            max_registers: 6,
        }
    }
}

/// Random feed-forward pipeline: combinational gates over a growing signal
/// pool with registers sprinkled between them. Always valid and acyclic.
pub fn random_pipeline(seed: u64, params: &PipelineParams) -> Netlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetlistBuilder::new(format!("pipe{seed}"));
    let n_inputs = rng.gen_range(2..=params.max_inputs);
    let mut pool: Vec<NetBit> = (0..n_inputs)
        .map(|i| b.input(&format!("i{i}"), 1))
        .collect();
    let n_gates = rng.gen_range(3..=params.max_gates);
    let n_regs = rng.gen_range(0..=params.max_registers);
    // Interleave register insertion among the gates.
    let mut reg_slots: Vec<usize> = (0..n_gates).collect();
    reg_slots.shuffle(&mut rng);
    let reg_slots: BTreeSet<usize> = reg_slots.into_iter().take(n_regs).collect();

    for slot in 0..n_gates {
        let gate = match rng.gen_range(0..5) {
            0 => Gate::And,
            1 => Gate::Or,
            2 => Gate::Xor,
            3 => Gate::Not,
            _ => Gate::Mux,
        };
        let pick = |rng: &mut ChaCha8Rng, pool: &[NetBit]| {
            pool[rng.gen_range(0..pool.len())].clone()
        };
        let ins: Vec<NetBit> = (0..gate.arity()).map(|_| pick(&mut rng, &pool)).collect();
        let out = b.gate(gate, &ins);
        pool.push(out.clone());
        if reg_slots.contains(&slot) {
            let q = b.gate(Gate::Reg, &[out]);
            pool.push(q);
        }
    }
    // Outputs from the tail of the pool so most logic stays live.
    let n_outputs = rng.gen_range(1..=2.min(pool.len()));
    for (k, sig) in pool.iter().rev().take(n_outputs).enumerate() {
        b.output(&format!("o{k}"), 1);
        b.connect_output(&format!("o{k}"), 0, sig.clone());
    }
    b.finish().unwrap()
}

/// Random extraction instance with at most `max_nodes` nodes. Mostly
/// acyclic with occasional back edges; roots in the upper classes.
pub fn random_instance(seed: u64, max_nodes: usize) -> ExtractionInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_classes = rng.gen_range(2..=6);
    let mut classes: Vec<Vec<InstanceNode>> = vec![Vec::new(); n_classes];
    let mut budget = rng.gen_range(n_classes..=max_nodes);
    let costs = [0.0, 0.5, 1.0, 1.0, 1.5, 2.0];
    for c in 0..n_classes {
        let here = if c + 1 == n_classes {
            budget
        } else {
            let left = n_classes - c - 1;
            rng.gen_range(1..=(budget - left).max(1))
        };
        budget = budget.saturating_sub(here);
        for _ in 0..here.max(1) {
            let n_children = rng.gen_range(0..=2.min(n_classes - 1));
            let children = (0..n_children)
                .map(|_| {
                    if c > 0 && rng.gen_bool(0.85) {
                        rng.gen_range(0..c)
                    } else {
                        rng.gen_range(0..n_classes)
                    }
                })
                .collect();
            classes[c].push(InstanceNode {
                cost: costs[rng.gen_range(0..costs.len())],
                children,
            });
        }
    }
    let roots = vec![n_classes - 1];
    ExtractionInstance { classes, roots }
}

/// Brute-force minimum DAG cost by enumerating all node subsets: a subset
/// is feasible when every root class has a chosen node, every chosen node's
/// child classes have chosen nodes, and the class-level graph over chosen
/// nodes is acyclic. Only usable for small instances.
pub fn min_cost_by_subset_enumeration(inst: &ExtractionInstance) -> Option<f64> {
    let nodes: Vec<(usize, usize)> = inst
        .classes
        .iter()
        .enumerate()
        .flat_map(|(c, ns)| (0..ns.len()).map(move |k| (c, k)))
        .collect();
    let n = nodes.len();
    assert!(n <= 20, "subset enumeration is for tiny instances");
    let mut best: Option<f64> = None;
    'subsets: for mask in 0u32..(1 << n) {
        let chosen: Vec<(usize, usize)> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| nodes[i])
            .collect();
        let mut class_has = vec![false; inst.classes.len()];
        for &(c, _) in &chosen {
            class_has[c] = true;
        }
        for &r in &inst.roots {
            if !class_has[r] {
                continue 'subsets;
            }
        }
        // Closure.
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for &(c, k) in &chosen {
            for &ch in &inst.classes[c][k].children {
                if !class_has[ch] {
                    continue 'subsets;
                }
                edges.push((c, ch));
            }
        }
        // Class-level acyclicity by Kahn.
        let m = inst.classes.len();
        let mut indeg = vec![0usize; m];
        for &(_, ch) in &edges {
            indeg[ch] += 1;
        }
        let mut queue: Vec<usize> = (0..m).filter(|&c| indeg[c] == 0).collect();
        let mut seen = 0;
        while let Some(c) = queue.pop() {
            seen += 1;
            for &(p, ch) in &edges {
                if p == c {
                    indeg[ch] -= 1;
                    if indeg[ch] == 0 {
                        queue.push(ch);
                    }
                }
            }
        }
        if seen != m {
            continue 'subsets;
        }
        let cost: f64 = chosen.iter().map(|&(c, k)| inst.classes[c][k].cost).sum();
        best = Some(best.map_or(cost, |b: f64| b.min(cost)));
    }
    best
}

/// Exhaustive minimum DAG cost by depth-first enumeration of every closed,
/// acyclic selection — no cost-based pruning, so it is independent of the
/// branch-and-bound path. Returns None when the step budget runs out.
pub fn min_cost_by_selection_enumeration(
    inst: &ExtractionInstance,
    budget: u64,
) -> Option<Option<f64>> {
    struct Enum<'a> {
        inst: &'a ExtractionInstance,
        choice: Vec<Option<usize>>,
        need: Vec<u32>,
        steps: u64,
        budget: u64,
        best: Option<f64>,
    }
    impl Enum<'_> {
        fn cycle(&self, class: usize, children: &[usize]) -> bool {
            let mut stack = children.to_vec();
            let mut seen = vec![false; self.inst.classes.len()];
            while let Some(c) = stack.pop() {
                if c == class {
                    return true;
                }
                if seen[c] {
                    continue;
                }
                seen[c] = true;
                if let Some(k) = self.choice[c] {
                    stack.extend(self.inst.classes[c][k].children.iter().copied());
                }
            }
            false
        }

        fn dfs(&mut self, cost: f64) -> bool {
            self.steps += 1;
            if self.steps > self.budget {
                return false;
            }
            let next = (0..self.need.len())
                .find(|&c| self.need[c] > 0 && self.choice[c].is_none());
            let Some(class) = next else {
                self.best = Some(self.best.map_or(cost, |b: f64| b.min(cost)));
                return true;
            };
            for k in 0..self.inst.classes[class].len() {
                let children = self.inst.classes[class][k].children.clone();
                if self.cycle(class, &children) {
                    continue;
                }
                self.choice[class] = Some(k);
                for &ch in &children {
                    self.need[ch] += 1;
                }
                let ok = self.dfs(cost + self.inst.classes[class][k].cost);
                for &ch in &children {
                    self.need[ch] -= 1;
                }
                self.choice[class] = None;
                if !ok {
                    return false;
                }
            }
            true
        }
    }
    let mut e = Enum {
        inst,
        choice: vec![None; inst.classes.len()],
        need: vec![0; inst.classes.len()],
        steps: 0,
        budget,
        best: None,
    };
    for &r in &inst.roots {
        e.need[r] += 1;
    }
    if e.dfs(0.0) {
        Some(e.best)
    } else {
        None
    }
}

pub fn builtin_lib() -> rewire::identify::ComponentLibrary {
    rewire::identify::ComponentLibrary::builtins()
}

/// Gate kinds present in a netlist (combinational only).
pub fn gate_kinds(nl: &Netlist) -> Vec<Gate> {
    let kinds: BTreeSet<Gate> = nl
        .cells
        .iter()
        .filter_map(|c| match c.kind {
            CellKind::Gate(g) if g.is_combinational() => Some(g),
            _ => None,
        })
        .collect();
    kinds.into_iter().collect()
}
