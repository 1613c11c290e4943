//! Register retiming.
//!
//! [`generate_retiming_rules`] emits one bidirectional register-motion rule
//! per combinational gate kind, `(REG (K ?a … ?z)) <=> (K (REG ?a) … (REG
//! ?z))`. [`retime_min_registers`] saturates a feed-forward netlist under
//! those rules and extracts the arrangement with the fewest registers; the
//! register weight dominates the node-count tie-break, so the optimum is a
//! minimum-register circuit and, among those, a smallest one.
//! [`source_retime`] is the directed variant used for decompilation: it
//! pushes every register backward until it sits on a primary input, a
//! constant, or another register.
//!
//! Boolean rules are off by default during retiming, which keeps the search
//! space register-motion-pure and the per-path register counts exact.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::egraph::{run, EGraph, Pattern, Rewrite, RunLimits, RunReport};
use crate::extract::{extract_greedy, extract_ilp, CostModel, ExtractError};
use crate::identify::Extractor;
use crate::netlist::{from_terms_like, to_terms, Driver, NetBit, Netlist, NetlistError};
use crate::term::{Gate, Op, Term};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RetimeError {
    #[error("cannot retime through `{0}`: not a combinational gate")]
    NotCombinational(String),
    #[error("register weight {reg} must exceed node weight {node} × node limit {limit}")]
    WeightsTooClose { reg: f64, node: f64, limit: usize },
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

/// One bidirectional rule per gate kind: forward motion pulls a register
/// from the inputs to the output, backward motion pushes it the other way.
pub fn generate_retiming_rules(kinds: &[Gate]) -> Result<Vec<Rewrite>, RetimeError> {
    let mut rules = Vec::new();
    for &g in kinds {
        if !g.is_combinational() {
            return Err(RetimeError::NotCombinational(g.name().to_string()));
        }
        if g.arity() == 0 {
            // A register on a constant has nowhere to move.
            continue;
        }
        let vars: Vec<Pattern> = (0..g.arity())
            .map(|i| Pattern::var(format!("a{i}")))
            .collect();
        let lhs = Pattern::App(
            Op::Gate(Gate::Reg),
            vec![Pattern::App(Op::Gate(g), vars.clone())],
        );
        let rhs = Pattern::App(
            Op::Gate(g),
            vars.into_iter()
                .map(|v| Pattern::App(Op::Gate(Gate::Reg), vec![v]))
                .collect(),
        );
        rules.push(
            Rewrite::bidirectional(format!("retime-{}", g.name().to_lowercase()), lhs, rhs)
                .expect("retiming rules bind all variables"),
        );
    }
    Ok(rules)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetimeConfig {
    /// Cost per register; must dominate `node_weight × limits.max_enodes`.
    pub register_weight: f64,
    /// Tie-break cost per non-register node.
    pub node_weight: f64,
    pub limits: RunLimits,
    pub extractor: Extractor,
    /// Also apply the Boolean rule set while retiming.
    pub bool_rules: bool,
}

impl Default for RetimeConfig {
    fn default() -> Self {
        RetimeConfig {
            register_weight: 1_000_000.0,
            node_weight: 1.0,
            limits: RunLimits::default(),
            extractor: Extractor::Ilp,
            bool_rules: false,
        }
    }
}

impl RetimeConfig {
    fn check(&self) -> Result<(), RetimeError> {
        if self.register_weight <= self.node_weight * self.limits.max_enodes as f64 {
            return Err(RetimeError::WeightsTooClose {
                reg: self.register_weight,
                node: self.node_weight,
                limit: self.limits.max_enodes,
            });
        }
        Ok(())
    }

    fn cost_model(&self) -> CostModel {
        let mut cm = CostModel::uniform(self.node_weight);
        cm.set("REG", self.register_weight);
        cm
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RetimeReport {
    pub run: RunReport,
    pub registers_before: usize,
    pub registers_after: usize,
}

/// Gate kinds present in the netlist, registers excluded.
fn comb_gate_kinds(nl: &Netlist) -> Vec<Gate> {
    let kinds: BTreeSet<Gate> = nl
        .cells
        .iter()
        .filter_map(|c| match c.kind {
            crate::netlist::CellKind::Gate(g) if g.is_combinational() => Some(g),
            _ => None,
        })
        .collect();
    kinds.into_iter().collect()
}

/// Saturate register motion and extract the minimum-register arrangement.
///
/// The input term stays represented in the e-graph, so the extracted
/// register count never exceeds the input's.
pub fn retime_min_registers(
    nl: &Netlist,
    cfg: &RetimeConfig,
) -> Result<(Netlist, RetimeReport), RetimeError> {
    cfg.check()?;
    let term = to_terms(nl)?;
    let mut g = EGraph::new();
    let root = g.add(&term).expect("netlist terms have valid arities");

    let mut rules = generate_retiming_rules(&comb_gate_kinds(nl))?;
    if cfg.bool_rules {
        rules.extend(crate::egraph::bool_rules());
    }
    let report = run(&mut g, &rules, &cfg.limits);
    let root = g.find(root);

    let cm = cfg.cost_model();
    let selection = match cfg.extractor {
        Extractor::Ilp => extract_ilp(&mut g, &[root], &cm, None)?.value,
        Extractor::Greedy => extract_greedy(&mut g, &[root], &cm)?,
    };
    let out_term = selection.term(root, &mut g);
    let result = from_terms_like(&out_term, nl)?;
    let registers_after = result.register_count();
    debug_assert!(registers_after <= nl.register_count());
    Ok((
        result,
        RetimeReport {
            run: report,
            registers_before: nl.register_count(),
            registers_after,
        },
    ))
}

/// Push every register as close to the primary inputs as it can go.
///
/// Directed fixpoint of the backward rules: after it, every register's D
/// input is a primary input, a constant, or another register. Duplicate
/// registers on one signal collapse by hashconsing.
pub fn source_retime(nl: &Netlist) -> Result<(Netlist, RetimeReport), RetimeError> {
    let term = to_terms(nl)?;
    let mut push_memo = HashMap::new();
    let mut sink_memo = HashMap::new();
    let pushed = push_registers(&term, &mut push_memo, &mut sink_memo);
    let result = from_terms_like(&pushed, nl)?;
    let report = RunReport {
        iterations: 0,
        stop_reason: crate::egraph::StopReason::Saturated,
        enodes: 0,
        eclasses: 0,
        rule_matches: Vec::new(),
    };
    Ok((
        result.clone(),
        RetimeReport {
            run: report,
            registers_before: nl.register_count(),
            registers_after: result.register_count(),
        },
    ))
}

fn push_registers(
    t: &Term,
    push_memo: &mut HashMap<Term, Term>,
    sink_memo: &mut HashMap<Term, Term>,
) -> Term {
    if let Some(done) = push_memo.get(t) {
        return done.clone();
    }
    let result = match t.op() {
        Op::Gate(Gate::Reg) => {
            let inner = push_registers(&t.children()[0], push_memo, sink_memo);
            sink_reg(&inner, push_memo, sink_memo)
        }
        op => Term::new(
            op.clone(),
            t.children()
                .iter()
                .map(|c| push_registers(c, push_memo, sink_memo))
                .collect(),
        ),
    };
    push_memo.insert(t.clone(), result.clone());
    result
}

/// Wrap `t` in a register, pushing it through combinational gates. Stops at
/// inputs, constants, other registers, and component boundaries.
fn sink_reg(
    t: &Term,
    push_memo: &mut HashMap<Term, Term>,
    sink_memo: &mut HashMap<Term, Term>,
) -> Term {
    if let Some(done) = sink_memo.get(t) {
        return done.clone();
    }
    let result = match t.op() {
        Op::Gate(g) if g.is_combinational() && g.arity() > 0 => Term::new(
            Op::Gate(*g),
            t.children()
                .iter()
                .map(|c| sink_reg(c, push_memo, sink_memo))
                .collect(),
        ),
        _ => Term::new(Op::Gate(Gate::Reg), vec![t.clone()]),
    };
    sink_memo.insert(t.clone(), result.clone());
    result
}

/// The register count along every input-bit → output-bit path, as a set per
/// (input, output) pair. Retiming must preserve these sets exactly.
pub fn path_register_profile(
    nl: &Netlist,
) -> Result<BTreeMap<(NetBit, NetBit), BTreeSet<usize>>, NetlistError> {
    let drivers = nl.driver_map()?;
    // counts[bit][input] = set of register counts over paths input → bit.
    let mut memo: HashMap<NetBit, BTreeMap<NetBit, BTreeSet<usize>>> = HashMap::new();

    fn visit(
        nl: &Netlist,
        drivers: &HashMap<NetBit, Driver>,
        bit: &NetBit,
        memo: &mut HashMap<NetBit, BTreeMap<NetBit, BTreeSet<usize>>>,
    ) -> Result<BTreeMap<NetBit, BTreeSet<usize>>, NetlistError> {
        if let Some(m) = memo.get(bit) {
            return Ok(m.clone());
        }
        let mut result: BTreeMap<NetBit, BTreeSet<usize>> = BTreeMap::new();
        match drivers.get(bit) {
            Some(Driver::InputPort(_)) => {
                result.entry(bit.clone()).or_default().insert(0);
            }
            Some(Driver::Assign(ai)) => {
                let src = nl.assigns[*ai].source.clone();
                result = visit(nl, drivers, &src, memo)?;
            }
            Some(Driver::CellPin(ci, _)) => {
                let cell = &nl.cells[*ci];
                let bump = usize::from(cell.kind.is_register());
                for pin in cell.input_pins() {
                    let sub = visit(nl, drivers, &cell.pins[&pin], memo)?;
                    for (input, counts) in sub {
                        let entry = result.entry(input).or_default();
                        entry.extend(counts.iter().map(|c| c + bump));
                    }
                }
            }
            None => {}
        }
        memo.insert(bit.clone(), result.clone());
        Ok(result)
    }

    let mut profile = BTreeMap::new();
    for out in nl.output_bits() {
        for (input, counts) in visit(nl, &drivers, &out, &mut memo)? {
            profile.insert((input, out.clone()), counts);
        }
    }
    Ok(profile)
}
