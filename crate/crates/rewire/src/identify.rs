//! Standard-library component identification.
//!
//! A [`LibraryComponent`] declares a component by name, input variables and
//! one defining pattern per output. [`component_rules`] turns each output
//! into a rewrite that introduces the abstract component node over the
//! matched gates; because all outputs share the same input variables, the
//! component node unifies across outputs in the e-graph. Cost-gated ILP
//! extraction then decides where abstraction pays off: with the default
//! model a multi-output component is selected exactly when at least two of
//! its outputs are in use, and a single-output component whenever its whole
//! body appears.
//!
//! Greedy extraction cannot account for the sharing, so ILP is the default
//! for this pass.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::egraph::{ematch, run, EGraph, Pattern, Rewrite, RunLimits, RunReport};
use crate::extract::{extract_greedy, extract_ilp, CostModel, ExtractError};
use crate::netlist::{from_terms_like, to_terms, CellKind, Netlist, NetlistError};
use crate::oracle::{eval_cell, eval_pattern, OracleError, Value3};
use crate::sexpr::{self, Sexp, SyntaxError};
use crate::term::{builtin_lib_arity, is_learned_name, Gate, Op};

#[derive(Debug, Clone, PartialEq)]
pub struct LibraryComponent {
    pub name: String,
    /// Input variable names; positionally matched to the cell's input pins.
    pub inputs: Vec<String>,
    /// (output name, defining pattern) in output-pin order.
    pub outputs: Vec<(String, Pattern)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdentifyError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("component `{component}`: {detail}")]
    BadComponent { component: String, detail: String },
    #[error("component `{0}` already registered")]
    DuplicateComponent(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

impl LibraryComponent {
    fn bad(&self, detail: impl Into<String>) -> IdentifyError {
        IdentifyError::BadComponent {
            component: self.name.clone(),
            detail: detail.into(),
        }
    }

    /// Structural checks: declared variables only, combinational gate bodies,
    /// arity consistent with the cell kind.
    pub fn validate(&self) -> Result<(), IdentifyError> {
        if self.inputs.is_empty() {
            return Err(self.bad("no inputs"));
        }
        if self.outputs.is_empty() {
            return Err(self.bad("no outputs"));
        }
        let declared: BTreeSet<&String> = self.inputs.iter().collect();
        for (out, pattern) in &self.outputs {
            for v in pattern.vars() {
                if !declared.contains(&v) {
                    return Err(self.bad(format!("output {out} uses undeclared input `{v}`")));
                }
            }
            for op in pattern.ops() {
                match op {
                    Op::Gate(Gate::Reg) => {
                        return Err(self.bad(format!("output {out} contains a register")))
                    }
                    Op::Gate(_) => {}
                    other => {
                        return Err(
                            self.bad(format!("output {out} contains non-gate operator {other}"))
                        )
                    }
                }
            }
        }
        if let Some((arity, n_out)) = builtin_lib_arity(&self.name) {
            if self.inputs.len() != arity || self.outputs.len() != n_out {
                return Err(self.bad(format!(
                    "built-in kind expects {arity} inputs and {n_out} outputs"
                )));
            }
        } else if is_learned_name(&self.name) {
            if self.outputs.len() != 1 {
                return Err(self.bad("learned components have exactly one output"));
            }
        } else {
            return Err(self.bad("component name is neither built-in nor learned (`def_…`)"));
        }
        Ok(())
    }

    /// Check that the defining patterns agree with the simulator's cell
    /// semantics on every 0/1 input combination.
    pub fn check_semantics(&self, lib: &ComponentLibrary) -> Result<(), IdentifyError> {
        let kind = CellKind::from_name(&self.name)?;
        let n = self.inputs.len();
        for row in 0..(1u64 << n) {
            let vals: Vec<Value3> = (0..n)
                .map(|k| Value3::from_bool((row >> k) & 1 == 1))
                .collect();
            let cell_outs = eval_cell(&kind, &vals, lib)?;
            let env: BTreeMap<String, Value3> =
                self.inputs.iter().cloned().zip(vals.iter().copied()).collect();
            for (k, (out, pattern)) in self.outputs.iter().enumerate() {
                let got = eval_pattern(pattern, &env, lib)?;
                if got != cell_outs[k] {
                    return Err(self.bad(format!(
                        "output {out} disagrees with cell semantics on row {row}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A set of registered components, keyed by kind name. The builtins
/// (HalfAdder, FullAdder, Mux2) are always present.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLibrary {
    components: BTreeMap<String, LibraryComponent>,
}

impl Default for ComponentLibrary {
    fn default() -> Self {
        ComponentLibrary::builtins()
    }
}

impl ComponentLibrary {
    pub fn builtins() -> ComponentLibrary {
        let mut lib = ComponentLibrary {
            components: BTreeMap::new(),
        };
        let text = include_str!("../rules/components.lib");
        for comp in parse_components(text).expect("built-in component library parses") {
            lib.components.insert(comp.name.clone(), comp);
        }
        for comp in lib.components.clone().values() {
            comp.validate().expect("built-in component is well-formed");
            comp.check_semantics(&lib)
                .expect("built-in component matches simulator semantics");
        }
        lib
    }

    pub fn get(&self, name: &str) -> Option<&LibraryComponent> {
        self.components.get(name)
    }

    pub fn components(&self) -> impl Iterator<Item = &LibraryComponent> {
        self.components.values()
    }

    /// Register a component after validating it; learned components are
    /// taken at face value (their pattern is their semantics), built-ins
    /// must agree with the simulator.
    pub fn register(&mut self, comp: LibraryComponent) -> Result<(), IdentifyError> {
        comp.validate()?;
        if self.components.contains_key(&comp.name) {
            return Err(IdentifyError::DuplicateComponent(comp.name));
        }
        if builtin_lib_arity(&comp.name).is_some() {
            comp.check_semantics(self)?;
        }
        self.components.insert(comp.name.clone(), comp);
        Ok(())
    }

    /// Load additional components from a library file.
    pub fn extend_from_text(&mut self, text: &str) -> Result<(), IdentifyError> {
        for comp in parse_components(text)? {
            if self.components.get(&comp.name) == Some(&comp) {
                continue;
            }
            self.register(comp)?;
        }
        Ok(())
    }
}

/// Parse a component library file: any number of
/// `(component <Name> (inputs a b …) (output <Out> <pattern>) …)` forms.
pub fn parse_components(text: &str) -> Result<Vec<LibraryComponent>, IdentifyError> {
    let forms = sexpr::parse_many(text)?;
    forms.iter().map(component_from_sexp).collect()
}

fn component_from_sexp(s: &Sexp) -> Result<LibraryComponent, IdentifyError> {
    let syntax = |s: &Sexp, msg: &str| IdentifyError::Syntax(SyntaxError::new(s.pos(), msg));
    let items = s
        .list()
        .filter(|l| l.first().and_then(Sexp::atom) == Some("component"))
        .ok_or_else(|| syntax(s, "expected (component ...)"))?;
    let [_, name, inputs, outputs @ ..] = items else {
        return Err(syntax(s, "expected (component <name> (inputs ...) (output ...)...)"));
    };
    let name = name
        .atom()
        .ok_or_else(|| syntax(name, "component name must be an atom"))?
        .to_string();
    let input_items = inputs
        .list()
        .filter(|l| l.first().and_then(Sexp::atom) == Some("inputs"))
        .ok_or_else(|| syntax(inputs, "expected (inputs a b ...)"))?;
    let input_names = input_items[1..]
        .iter()
        .map(|i| {
            i.atom()
                .map(str::to_string)
                .ok_or_else(|| syntax(i, "input name must be an atom"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let vars: BTreeSet<&String> = input_names.iter().collect();
    let mut outs = Vec::new();
    for o in outputs {
        let items = o
            .list()
            .filter(|l| l.first().and_then(Sexp::atom) == Some("output"))
            .ok_or_else(|| syntax(o, "expected (output <name> <pattern>)"))?;
        let [_, oname, pat] = items else {
            return Err(syntax(o, "expected (output <name> <pattern>)"));
        };
        let oname = oname
            .atom()
            .ok_or_else(|| syntax(oname, "output name must be an atom"))?;
        outs.push((oname.to_string(), body_pattern(pat, &vars)?));
    }
    Ok(LibraryComponent {
        name,
        inputs: input_names,
        outputs: outs,
    })
}

/// Component bodies spell variables as bare declared input names.
fn body_pattern(s: &Sexp, vars: &BTreeSet<&String>) -> Result<Pattern, IdentifyError> {
    match s {
        Sexp::Atom(a, pos) => {
            if vars.contains(&a.to_string()) {
                return Ok(Pattern::var(a.clone()));
            }
            crate::term::parse_op(a)
                .map(Pattern::leaf)
                .map_err(|_| SyntaxError::new(*pos, format!("unknown atom `{a}` in body")).into())
        }
        Sexp::List(items, pos) => {
            let (head, rest) = items
                .split_first()
                .ok_or_else(|| SyntaxError::new(*pos, "empty list in body"))?;
            let atom = head
                .atom()
                .ok_or_else(|| SyntaxError::new(head.pos(), "operator must be an atom"))?;
            let op = crate::term::parse_op(atom).map_err(|_| {
                IdentifyError::Syntax(SyntaxError::new(
                    head.pos(),
                    format!("unknown operator `{atom}` in body"),
                ))
            })?;
            let children = rest
                .iter()
                .map(|c| body_pattern(c, vars))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Pattern::App(op, children))
        }
    }
}

fn body_to_string(p: &Pattern) -> String {
    match p {
        Pattern::Var(v) => v.clone(),
        Pattern::App(op, children) => {
            if children.is_empty() {
                op.to_string()
            } else {
                let inner: Vec<String> = children.iter().map(body_to_string).collect();
                format!("({} {})", op, inner.join(" "))
            }
        }
    }
}

/// Render components in the library file format.
pub fn write_components(comps: &[LibraryComponent]) -> String {
    let mut out = String::new();
    for c in comps {
        out.push_str(&format!("(component {} (inputs {})", c.name, c.inputs.join(" ")));
        for (name, pattern) in &c.outputs {
            out.push_str(&format!("\n  (output {} {})", name, body_to_string(pattern)));
        }
        out.push_str(")\n");
    }
    out
}

/// One rewrite per output: `pattern_k => (proj<k> (C ?i0 … ?im))` for
/// built-in components, `body => (apply (def C) ?i0 … ?im)` for learned
/// single-output components. All rules of one component share variable
/// names so saturation unifies the component node across outputs.
pub fn component_rules(c: &LibraryComponent) -> Vec<Rewrite> {
    let vars: Vec<Pattern> = c.inputs.iter().map(|i| Pattern::var(i.clone())).collect();
    c.outputs
        .iter()
        .enumerate()
        .map(|(k, (out, pattern))| {
            let rhs = if is_learned_name(&c.name) {
                let mut children = vec![Pattern::leaf(Op::Def(c.name.clone()))];
                children.extend(vars.iter().cloned());
                Pattern::App(Op::Apply, children)
            } else {
                Pattern::App(
                    Op::Proj(k),
                    vec![Pattern::App(Op::Lib(c.name.clone()), vars.clone())],
                )
            };
            Rewrite::directed(format!("identify-{}-{}", c.name, out), pattern.clone(), rhs)
                .expect("component outputs use declared inputs only")
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extractor {
    Greedy,
    Ilp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentifyConfig {
    pub limits: RunLimits,
    pub extractor: Extractor,
    pub costs: CostModel,
    /// Boolean rules widen matching to commuted/reassociated instances.
    pub bool_rules: bool,
}

impl Default for IdentifyConfig {
    fn default() -> Self {
        IdentifyConfig {
            limits: RunLimits {
                max_iterations: 8,
                ..RunLimits::default()
            },
            extractor: Extractor::Ilp,
            costs: CostModel::default(),
            bool_rules: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentInstance {
    pub component: String,
    pub cell: String,
    pub bindings: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentifyReport {
    pub run: RunReport,
    pub cost: f64,
    pub instances: Vec<ComponentInstance>,
    /// Classes where a component node exists but only a strict subset of its
    /// outputs matched, per component name.
    pub near_misses: BTreeMap<String, usize>,
}

/// Rewrite `nl` introducing library components wherever extraction finds
/// them profitable. The result is oracle-equivalent to the input.
pub fn identify(
    nl: &Netlist,
    lib: &ComponentLibrary,
    cfg: &IdentifyConfig,
) -> Result<(Netlist, IdentifyReport), IdentifyError> {
    let term = to_terms(nl)?;
    let mut g = EGraph::new();
    let root = g.add(&term).expect("netlist terms have valid arities");

    let mut rules: Vec<Rewrite> = Vec::new();
    for comp in lib.components() {
        rules.extend(component_rules(comp));
    }
    if cfg.bool_rules {
        rules.extend(crate::egraph::bool_rules());
    }
    let report = run(&mut g, &rules, &cfg.limits);
    let root = g.find(root);

    let selection = match cfg.extractor {
        Extractor::Ilp => extract_ilp(&mut g, &[root], &cfg.costs, None)?.value,
        Extractor::Greedy => extract_greedy(&mut g, &[root], &cfg.costs)?,
    };
    let out_term = selection.term(root, &mut g);
    let result = from_terms_like(&out_term, nl)?;

    let near_misses = count_near_misses(&mut g, lib);
    let instances = result
        .cells
        .iter()
        .filter(|c| {
            matches!(
                c.kind,
                CellKind::HalfAdder | CellKind::FullAdder | CellKind::Mux2 | CellKind::Learned(_)
            )
        })
        .map(|c| ComponentInstance {
            component: c.kind.name(),
            cell: c.instance.clone(),
            bindings: c
                .pins
                .iter()
                .map(|(pin, bit)| (pin.clone(), bit.to_string()))
                .collect(),
        })
        .collect();

    Ok((
        result,
        IdentifyReport {
            run: report,
            cost: selection.total_cost,
            instances,
            near_misses,
        },
    ))
}

/// Count classes in which a multi-output component node is present but only
/// some of its projections exist — places where the rest of the component
/// was likely optimized away.
fn count_near_misses(g: &mut EGraph, lib: &ComponentLibrary) -> BTreeMap<String, usize> {
    let mut near = BTreeMap::new();
    for id in g.class_ids() {
        let lib_nodes: Vec<(String, usize)> = g
            .class(id)
            .nodes
            .iter()
            .filter_map(|n| match &n.op {
                Op::Lib(name) => lib
                    .get(name)
                    .map(|c| (name.clone(), c.outputs.len()))
                    .filter(|(_, outs)| *outs > 1),
                _ => None,
            })
            .collect();
        for (name, n_outputs) in lib_nodes {
            let present = (0..n_outputs)
                .filter(|&k| g.lookup(Op::Proj(k), vec![id]).is_some())
                .count();
            if present > 0 && present < n_outputs {
                *near.entry(name).or_insert(0) += 1;
            }
        }
    }
    near
}

/// Count e-matches of a component's outputs (used by tests and reports).
pub fn output_matches(g: &mut EGraph, c: &LibraryComponent) -> Vec<usize> {
    c.outputs
        .iter()
        .map(|(_, p)| ematch(g, p).len())
        .collect()
}
