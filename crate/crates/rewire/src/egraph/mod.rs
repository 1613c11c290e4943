//! The equality-saturation engine.
//!
//! An [`EGraph`] maintains a congruence-closed set of terms: a union-find
//! over e-class ids, a set of e-nodes per class, and a hashcons mapping each
//! canonical e-node to its class. `add` deduplicates structurally identical
//! terms; `merge` records an equality and defers congruence repair to
//! [`EGraph::rebuild`], which processes a dirty worklist until the hashcons
//! and congruence invariants hold again.
//!
//! Canonical class ids are always the smallest id in their union-find set,
//! so identical construction orders yield identical graphs and reports.

mod pattern;
mod rules;
mod run;

pub use pattern::{ematch, instantiate, parse_pattern, Pattern, Subst};
pub use rules::{bool_rules, parse_rules, write_rules, Rewrite, RuleError};
pub use run::{run, RunLimits, RunReport, StopReason};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::term::{Op, Term};

/// Handle to an e-class. Stale ids stay resolvable through the union-find.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EClassId(pub u32);

impl fmt::Display for EClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

/// An operator applied to e-class children. Stored canonically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ENode {
    pub op: Op,
    pub children: Vec<EClassId>,
}

impl ENode {
    pub fn new(op: Op, children: Vec<EClassId>) -> ENode {
        ENode { op, children }
    }

    fn canonicalize(&self, uf: &mut UnionFind) -> ENode {
        ENode {
            op: self.op.clone(),
            children: self.children.iter().map(|&c| uf.find(c)).collect(),
        }
    }
}

#[derive(Debug, Clone, Default)]
struct UnionFind {
    parents: Vec<u32>,
}

impl UnionFind {
    fn make_set(&mut self) -> EClassId {
        let id = self.parents.len() as u32;
        self.parents.push(id);
        EClassId(id)
    }

    fn find(&mut self, id: EClassId) -> EClassId {
        let mut x = id.0;
        while self.parents[x as usize] != x {
            // Path halving.
            let grandparent = self.parents[self.parents[x as usize] as usize];
            self.parents[x as usize] = grandparent;
            x = grandparent;
        }
        EClassId(x)
    }

    /// Union keeping the smaller id as root; returns (root, merged-away).
    fn union(&mut self, a: EClassId, b: EClassId) -> (EClassId, EClassId) {
        let a = self.find(a);
        let b = self.find(b);
        let (root, other) = if a.0 <= b.0 { (a, b) } else { (b, a) };
        self.parents[other.0 as usize] = root.0;
        (root, other)
    }
}

#[derive(Debug, Clone, Default)]
pub struct EClass {
    pub nodes: Vec<ENode>,
    /// Parent e-nodes (as written at add time) and the class they live in.
    parents: Vec<(ENode, EClassId)>,
}

#[derive(Debug, Clone, Default)]
pub struct EGraph {
    unionfind: UnionFind,
    classes: Vec<Option<EClass>>,
    hashcons: HashMap<ENode, EClassId>,
    dirty: Vec<EClassId>,
    unions_performed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EGraphError {
    #[error("operator `{op}` expects {expected} children, got {got}")]
    Arity {
        op: String,
        expected: usize,
        got: usize,
    },
}

impl EGraph {
    pub fn new() -> EGraph {
        EGraph::default()
    }

    pub fn find(&mut self, id: EClassId) -> EClassId {
        self.unionfind.find(id)
    }

    /// Number of canonical e-classes.
    pub fn class_count(&self) -> usize {
        self.classes.iter().flatten().count()
    }

    /// Number of distinct (canonical) e-nodes.
    pub fn node_count(&self) -> usize {
        self.hashcons.len()
    }

    pub fn unions_performed(&self) -> usize {
        self.unions_performed
    }

    pub fn is_clean(&self) -> bool {
        self.dirty.is_empty()
    }

    pub fn class(&self, id: EClassId) -> &EClass {
        self.classes[id.0 as usize]
            .as_ref()
            .expect("id is canonical")
    }

    /// Canonical class ids in ascending order.
    pub fn class_ids(&self) -> Vec<EClassId> {
        self.classes
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.as_ref().map(|_| EClassId(i as u32)))
            .collect()
    }

    /// Add a single e-node whose children are existing classes.
    pub fn add_node(&mut self, op: Op, children: Vec<EClassId>) -> Result<EClassId, EGraphError> {
        if let Some(expected) = op.arity() {
            if children.len() != expected {
                return Err(EGraphError::Arity {
                    op: op.to_string(),
                    expected,
                    got: children.len(),
                });
            }
        }
        let node = ENode::new(op, children).canonicalize(&mut self.unionfind);
        if let Some(&id) = self.hashcons.get(&node) {
            return Ok(self.unionfind.find(id));
        }
        let id = self.unionfind.make_set();
        self.classes.push(Some(EClass {
            nodes: vec![node.clone()],
            parents: Vec::new(),
        }));
        for &child in &node.children {
            self.classes[child.0 as usize]
                .as_mut()
                .expect("children are canonical")
                .parents
                .push((node.clone(), id));
        }
        self.hashcons.insert(node, id);
        Ok(id)
    }

    /// Add a term bottom-up, sharing existing structure.
    pub fn add(&mut self, term: &Term) -> Result<EClassId, EGraphError> {
        let mut memo: HashMap<Term, EClassId> = HashMap::new();
        self.add_memo(term, &mut memo)
    }

    fn add_memo(
        &mut self,
        term: &Term,
        memo: &mut HashMap<Term, EClassId>,
    ) -> Result<EClassId, EGraphError> {
        if let Some(&id) = memo.get(term) {
            return Ok(id);
        }
        let children = term
            .children()
            .iter()
            .map(|c| self.add_memo(c, memo))
            .collect::<Result<Vec<_>, _>>()?;
        let id = self.add_node(term.op().clone(), children)?;
        memo.insert(term.clone(), id);
        Ok(id)
    }

    /// Record that `a` and `b` denote the same value. Congruence is restored
    /// on the next [`EGraph::rebuild`].
    pub fn merge(&mut self, a: EClassId, b: EClassId) -> EClassId {
        let a = self.unionfind.find(a);
        let b = self.unionfind.find(b);
        if a == b {
            return a;
        }
        self.unions_performed += 1;
        let (root, other) = self.unionfind.union(a, b);
        let absorbed = self.classes[other.0 as usize]
            .take()
            .expect("merged class was canonical");
        let class = self.classes[root.0 as usize]
            .as_mut()
            .expect("root is canonical");
        class.nodes.extend(absorbed.nodes);
        class.parents.extend(absorbed.parents);
        self.dirty.push(root);
        root
    }

    /// Restore hashcons and congruence invariants after merges.
    pub fn rebuild(&mut self) {
        while let Some(id) = self.dirty.pop() {
            let id = self.unionfind.find(id);
            self.repair(id);
        }
        self.canonicalize_class_nodes();
        debug_assert!(self.check_invariants());
    }

    fn repair(&mut self, id: EClassId) {
        // Re-canonicalize this class's parents, merging any that became
        // congruent, and point the hashcons at canonical keys and classes.
        let parents = std::mem::take(
            &mut self.classes[id.0 as usize]
                .as_mut()
                .expect("repair target is canonical")
                .parents,
        );
        let mut new_parents: Vec<(ENode, EClassId)> = Vec::new();
        let mut seen: HashMap<ENode, usize> = HashMap::new();
        for (pnode, pclass) in parents {
            self.hashcons.remove(&pnode);
            let canon = pnode.canonicalize(&mut self.unionfind);
            let pclass = self.unionfind.find(pclass);
            match seen.get(&canon) {
                Some(&idx) => {
                    let existing = new_parents[idx].1;
                    let merged = self.merge(existing, pclass);
                    new_parents[idx].1 = merged;
                }
                None => {
                    seen.insert(canon.clone(), new_parents.len());
                    new_parents.push((canon, pclass));
                }
            }
        }
        for (node, class) in &mut new_parents {
            *class = self.unionfind.find(*class);
            self.hashcons.insert(node.clone(), *class);
        }
        // The class may itself have been absorbed by one of those merges;
        // extend the current root's list rather than overwrite it.
        let cur = self.unionfind.find(id);
        self.classes[cur.0 as usize]
            .as_mut()
            .expect("canonical after merges")
            .parents
            .extend(new_parents);
    }

    /// Final rebuild phase: refresh every class's node list so children are
    /// canonical ids and duplicates collapse, then regenerate the hashcons
    /// from the surviving nodes so no stale keys linger.
    fn canonicalize_class_nodes(&mut self) {
        self.hashcons.clear();
        for i in 0..self.classes.len() {
            let Some(mut class) = self.classes[i].take() else {
                continue;
            };
            let mut seen: BTreeSet<ENode> = BTreeSet::new();
            let mut nodes = Vec::with_capacity(class.nodes.len());
            for node in class.nodes.drain(..) {
                let canon = node.canonicalize(&mut self.unionfind);
                if seen.insert(canon.clone()) {
                    let prev = self.hashcons.insert(canon.clone(), EClassId(i as u32));
                    debug_assert!(prev.is_none(), "congruence left a cross-class duplicate");
                    nodes.push(canon);
                }
            }
            class.nodes = nodes;
            self.classes[i] = Some(class);
        }
    }

    /// Does a structurally equal node exist right now? Returns its class.
    pub fn lookup(&mut self, op: Op, children: Vec<EClassId>) -> Option<EClassId> {
        let node = ENode::new(op, children).canonicalize(&mut self.unionfind);
        let id = *self.hashcons.get(&node)?;
        Some(self.unionfind.find(id))
    }

    /// Verify hashcons and congruence invariants; the post-rebuild contract.
    pub fn check_invariants(&self) -> bool {
        let mut uf = self.unionfind.clone();
        for (i, class) in self.classes.iter().enumerate() {
            let Some(class) = class else { continue };
            if uf.find(EClassId(i as u32)).0 != i as u32 {
                return false;
            }
            for node in &class.nodes {
                let canon = node.canonicalize(&mut uf);
                if &canon != node {
                    return false;
                }
                if self.hashcons.get(node).map(|&c| uf.find(c)) != Some(EClassId(i as u32)) {
                    return false;
                }
            }
        }
        self.hashcons.len()
            == self
                .classes
                .iter()
                .flatten()
                .map(|c| c.nodes.len())
                .sum::<usize>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, Gate};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn add_deduplicates() {
        let mut g = EGraph::new();
        let a = g.add(&t("(AND a b)")).unwrap();
        let b = g.add(&t("(AND a b)")).unwrap();
        assert_eq!(a, b);
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn distinct_terms_get_distinct_classes() {
        let mut g = EGraph::new();
        let x = g.add(&t("(XOR i0 i1)")).unwrap();
        let a = g.add(&t("(AND i0 i1)")).unwrap();
        assert_ne!(x, a);
    }

    #[test]
    fn merge_self_is_noop() {
        let mut g = EGraph::new();
        let a = g.add(&t("a")).unwrap();
        let before = g.unions_performed();
        g.merge(a, a);
        assert_eq!(g.unions_performed(), before);
    }

    #[test]
    fn congruence_after_rebuild() {
        let mut g = EGraph::new();
        let na = g.add(&t("(NOT a)")).unwrap();
        let nb = g.add(&t("(NOT b)")).unwrap();
        let a = g.add(&t("a")).unwrap();
        let b = g.add(&t("b")).unwrap();
        assert_ne!(g.find(na), g.find(nb));
        g.merge(a, b);
        g.rebuild();
        assert_eq!(g.find(na), g.find(nb));
    }

    #[test]
    fn upward_congruence_chain() {
        let mut g = EGraph::new();
        let fa = g.add(&t("(NOT (NOT a))")).unwrap();
        let fb = g.add(&t("(NOT (NOT b))")).unwrap();
        let a = g.add(&t("a")).unwrap();
        let b = g.add(&t("b")).unwrap();
        g.merge(a, b);
        g.rebuild();
        assert_eq!(g.find(fa), g.find(fb));
        assert!(g.check_invariants());
    }

    #[test]
    fn merge_chain_reduces_class_count() {
        let mut g = EGraph::new();
        let ids: Vec<_> = ["a", "b", "i0", "i1"]
            .iter()
            .map(|s| g.add(&t(s)).unwrap())
            .collect();
        let before = g.class_count();
        g.merge(ids[0], ids[1]);
        g.merge(ids[2], ids[3]);
        g.rebuild();
        assert!(g.class_count() <= before - 2);
    }

    #[test]
    fn arity_checked_on_add() {
        let mut g = EGraph::new();
        let a = g.add(&t("a")).unwrap();
        let err = g.add_node(Op::Gate(Gate::And), vec![a]).unwrap_err();
        assert!(matches!(err, EGraphError::Arity { .. }));
    }
}
