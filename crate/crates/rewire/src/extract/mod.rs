//! Term extraction from a saturated e-graph.
//!
//! Extraction chooses one e-node per needed class, minimizing a cost under
//! DAG semantics: a shared class is paid for once. Two extractors are
//! provided: a greedy bottom-up baseline that minimizes per-class tree cost
//! (cheap, not DAG-optimal), and an exact 0/1 solver ([`extract_ilp`])
//! implemented as depth-first branch-and-bound with an admissible per-class
//! lower bound and incremental cycle checking. The ILP formulation itself
//! can be exported as an LP file for external solvers and re-imported (see
//! [`lp`]).
//!
//! Both extractors work over an [`ExtractionInstance`], a plain
//! classes/nodes/costs view that is also how random instances and imported
//! LP problems are solved, keeping the solver independent of the e-graph.

mod ilp;
pub mod lp;

pub use ilp::{solve_bb, IlpOutcome};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Duration;

use crate::egraph::{EClassId, EGraph, ENode};
use crate::term::{Op, Term};

#[derive(Debug, Clone, PartialEq)]
pub struct CostModel {
    costs: BTreeMap<String, f64>,
    default: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExtractError {
    #[error("cost model: {0}")]
    BadCostModel(String),
    #[error("infeasible extraction: class {0} has no acyclic derivation")]
    Infeasible(String),
    #[error("lp parse error: {0}")]
    LpParse(String),
}

impl Default for CostModel {
    /// Gates cost 1; structural operators (`input`, `outputs`, `proj`,
    /// constants, `def` references) are free; `apply` costs 0.5; the
    /// built-in components carry their identification costs.
    fn default() -> Self {
        let mut cm = CostModel::uniform(1.0);
        for sym in ["input", "outputs", "proj", "CONST0", "CONST1", "def"] {
            cm.set(sym, 0.0);
        }
        cm.set("apply", 0.5);
        cm.set("HalfAdder", 1.5);
        cm.set("FullAdder", 4.5);
        cm.set("Mux2", 2.5);
        cm
    }
}

impl CostModel {
    pub fn uniform(default: f64) -> CostModel {
        CostModel {
            costs: BTreeMap::new(),
            default,
        }
    }

    pub fn set(&mut self, symbol: impl Into<String>, cost: f64) -> &mut Self {
        self.costs.insert(symbol.into(), cost);
        self
    }

    pub fn cost(&self, op: &Op) -> f64 {
        let sym = op.cost_symbol();
        if let Some(&c) = self.costs.get(&sym) {
            return c;
        }
        // Any definition reference falls back to the `def` entry.
        if let Op::Def(_) = op {
            if let Some(&c) = self.costs.get("def") {
                return c;
            }
        }
        self.default
    }

    /// Parse the `symbol cost` line format. A line `default <cost>` sets the
    /// cost for unlisted symbols. Entries refine the default model.
    pub fn parse(text: &str) -> Result<CostModel, ExtractError> {
        let mut cm = CostModel::default();
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(idx) => &raw[..idx],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(sym), Some(cost), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(ExtractError::BadCostModel(format!(
                    "line {}: expected `symbol cost`",
                    i + 1
                )));
            };
            let cost: f64 = cost.parse().map_err(|_| {
                ExtractError::BadCostModel(format!("line {}: bad cost `{cost}`", i + 1))
            })?;
            if !cost.is_finite() || cost < 0.0 {
                return Err(ExtractError::BadCostModel(format!(
                    "line {}: cost must be finite and non-negative",
                    i + 1
                )));
            }
            if sym == "default" {
                cm.default = cost;
            } else {
                cm.set(sym, cost);
            }
        }
        Ok(cm)
    }
}

/// One node of an [`ExtractionInstance`].
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceNode {
    pub cost: f64,
    /// Child class indices (into `ExtractionInstance::classes`).
    pub children: Vec<usize>,
}

/// A solver-facing view of an extraction problem: dense class indices, each
/// with candidate nodes, plus the root classes that must be realized.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExtractionInstance {
    pub classes: Vec<Vec<InstanceNode>>,
    pub roots: Vec<usize>,
}

/// A selection: the chosen node per needed class and its DAG cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub choices: BTreeMap<EClassId, ENode>,
    pub total_cost: f64,
}

impl Selection {
    /// Rebuild the term for `root` from the chosen nodes.
    pub fn term(&self, root: EClassId, g: &mut EGraph) -> Term {
        let root = g.find(root);
        let mut memo = HashMap::new();
        self.term_rec(root, &mut memo)
    }

    fn term_rec(&self, class: EClassId, memo: &mut HashMap<EClassId, Term>) -> Term {
        if let Some(t) = memo.get(&class) {
            return t.clone();
        }
        let node = self
            .choices
            .get(&class)
            .unwrap_or_else(|| panic!("selection is closed; missing {class}"));
        let children = node
            .children
            .iter()
            .map(|&c| self.term_rec(c, memo))
            .collect();
        let t = Term::new(node.op.clone(), children);
        memo.insert(class, t.clone());
        t
    }

    /// Check the closed/acyclic/cost invariants against the graph.
    pub fn validate(
        &self,
        g: &mut EGraph,
        roots: &[EClassId],
        cm: &CostModel,
    ) -> Result<(), String> {
        for &r in roots {
            let r = g.find(r);
            if !self.choices.contains_key(&r) {
                return Err(format!("root {r} has no chosen node"));
            }
        }
        for (class, node) in &self.choices {
            if g.find(*class) != *class {
                return Err(format!("choice key {class} is not canonical"));
            }
            if !g.class(*class).nodes.contains(node) {
                return Err(format!("chosen node for {class} not in its class"));
            }
            for c in &node.children {
                if !self.choices.contains_key(&g.find(*c)) {
                    return Err(format!("selection not closed at child {c} of {class}"));
                }
            }
        }
        // Acyclic: Kahn over chosen nodes.
        let mut indeg: BTreeMap<EClassId, usize> = BTreeMap::new();
        for (class, node) in &self.choices {
            indeg.entry(*class).or_insert(0);
            for c in &node.children {
                *indeg.entry(*c).or_insert(0) += 1;
            }
        }
        let mut queue: Vec<EClassId> = indeg
            .iter()
            .filter(|(_, &d)| d == 0)
            .map(|(&c, _)| c)
            .collect();
        let mut seen = 0;
        while let Some(c) = queue.pop() {
            seen += 1;
            for child in &self.choices[&c].children {
                let d = indeg.get_mut(child).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push(*child);
                }
            }
        }
        if seen != indeg.len() {
            return Err("chosen-node graph is cyclic".to_string());
        }
        let cost: f64 = self.choices.values().map(|n| cm.cost(&n.op)).sum();
        if (cost - self.total_cost).abs() > 1e-9 {
            return Err(format!(
                "total cost {} does not match recomputed {}",
                self.total_cost, cost
            ));
        }
        Ok(())
    }
}

/// Classes reachable from the roots through any node.
pub fn reachable_classes(g: &mut EGraph, roots: &[EClassId]) -> BTreeSet<EClassId> {
    let mut seen: BTreeSet<EClassId> = BTreeSet::new();
    let mut todo: Vec<EClassId> = roots.iter().map(|&r| g.find(r)).collect();
    while let Some(c) = todo.pop() {
        if !seen.insert(c) {
            continue;
        }
        for node in &g.class(c).nodes {
            for &child in &node.children {
                if !seen.contains(&child) {
                    todo.push(child);
                }
            }
        }
    }
    seen
}

/// Map the reachable part of the graph onto a dense instance. Returns the
/// instance plus the class-id table (dense index → canonical id).
pub fn instance_from_egraph(
    g: &mut EGraph,
    roots: &[EClassId],
    cm: &CostModel,
) -> (ExtractionInstance, Vec<EClassId>) {
    let reachable = reachable_classes(g, roots);
    let ids: Vec<EClassId> = reachable.into_iter().collect();
    let index: BTreeMap<EClassId, usize> = ids.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let classes = ids
        .iter()
        .map(|&c| {
            g.class(c)
                .nodes
                .iter()
                .map(|n| InstanceNode {
                    cost: cm.cost(&n.op),
                    children: n.children.iter().map(|ch| index[ch]).collect(),
                })
                .collect()
        })
        .collect();
    let roots = roots.iter().map(|&r| index[&g.find(r)]).collect();
    (ExtractionInstance { classes, roots }, ids)
}

/// Instance-level choice vector: chosen node index per needed class.
pub type InstanceChoice = BTreeMap<usize, usize>;

/// DAG cost of an instance-level choice.
pub fn choice_cost(inst: &ExtractionInstance, choice: &InstanceChoice) -> f64 {
    choice
        .iter()
        .map(|(&c, &n)| inst.classes[c][n].cost)
        .sum()
}

/// Greedy bottom-up extraction: per-class minimum tree cost, then the needed
/// set from the roots. Valid but not necessarily DAG-optimal.
pub fn extract_greedy_instance(inst: &ExtractionInstance) -> Result<InstanceChoice, ExtractError> {
    let n = inst.classes.len();
    let mut best: Vec<Option<f64>> = vec![None; n];
    loop {
        let mut changed = false;
        for c in 0..n {
            for node in &inst.classes[c] {
                let mut cost = node.cost;
                let mut ok = true;
                for &ch in &node.children {
                    match best[ch] {
                        Some(b) => cost += b,
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
                if ok && best[c].map_or(true, |cur| cost < cur) {
                    best[c] = Some(cost);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    // Deterministic choice: first node achieving the best tree cost.
    let mut chosen: Vec<Option<usize>> = vec![None; n];
    for c in 0..n {
        let Some(target) = best[c] else { continue };
        for (ni, node) in inst.classes[c].iter().enumerate() {
            let mut cost = node.cost;
            let mut ok = true;
            for &ch in &node.children {
                match best[ch] {
                    Some(b) => cost += b,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && cost == target {
                chosen[c] = Some(ni);
                break;
            }
        }
    }
    // Collect the needed set.
    let mut choice = InstanceChoice::new();
    let mut todo: Vec<usize> = inst.roots.clone();
    while let Some(c) = todo.pop() {
        if choice.contains_key(&c) {
            continue;
        }
        let ni = chosen[c].ok_or_else(|| ExtractError::Infeasible(format!("#{c}")))?;
        choice.insert(c, ni);
        todo.extend(inst.classes[c][ni].children.iter().copied());
    }
    Ok(choice)
}

fn selection_from_choice(
    g: &EGraph,
    ids: &[EClassId],
    inst: &ExtractionInstance,
    choice: &InstanceChoice,
) -> Selection {
    let choices = choice
        .iter()
        .map(|(&c, &n)| (ids[c], g.class(ids[c]).nodes[n].clone()))
        .collect();
    Selection {
        choices,
        total_cost: choice_cost(inst, choice),
    }
}

/// Greedy extraction over an e-graph.
pub fn extract_greedy(
    g: &mut EGraph,
    roots: &[EClassId],
    cm: &CostModel,
) -> Result<Selection, ExtractError> {
    let (inst, ids) = instance_from_egraph(g, roots, cm);
    let choice = extract_greedy_instance(&inst)?;
    Ok(selection_from_choice(g, &ids, &inst, &choice))
}

/// Exact minimum-DAG-cost extraction over an e-graph. Ties break toward
/// fewer chosen nodes, then the lexicographically smallest choice vector.
pub fn extract_ilp(
    g: &mut EGraph,
    roots: &[EClassId],
    cm: &CostModel,
    time_limit: Option<Duration>,
) -> Result<IlpOutcome<Selection>, ExtractError> {
    let (inst, ids) = instance_from_egraph(g, roots, cm);
    let outcome = ilp::solve_bb(&inst, time_limit)?;
    Ok(IlpOutcome {
        value: selection_from_choice(g, &ids, &inst, &outcome.value),
        proven_optimal: outcome.proven_optimal,
    })
}
