//! The term language shared by netlist conversion, the e-graph and the
//! rewrite passes.
//!
//! A term is an operator applied to ordered child terms. Gate operators map
//! one-to-one onto combinational cells, `REG` onto registers, and
//! `input:<port>:<bit>` leaves onto input port bits. Multi-output library
//! components appear applied to their inputs and are selected from with
//! `proj<k>`; learned module instances appear as `(apply (def <name>) args…)`.
//! A whole netlist becomes a single `outputs` root whose children are the
//! output port bits in port order.
//!
//! Terms are immutable and share subterms through `Rc`, so converting a
//! netlist with fan-out produces a DAG rather than a tree.

use std::fmt;
use std::rc::Rc;

use crate::sexpr::{self, Sexp, SyntaxError};

/// Primitive single-output gate operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gate {
    And,
    Or,
    Xor,
    Not,
    Mux,
    Reg,
    Const0,
    Const1,
}

impl Gate {
    pub const ALL: [Gate; 8] = [
        Gate::And,
        Gate::Or,
        Gate::Xor,
        Gate::Not,
        Gate::Mux,
        Gate::Reg,
        Gate::Const0,
        Gate::Const1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gate::And => "AND",
            Gate::Or => "OR",
            Gate::Xor => "XOR",
            Gate::Not => "NOT",
            Gate::Mux => "MUX",
            Gate::Reg => "REG",
            Gate::Const0 => "CONST0",
            Gate::Const1 => "CONST1",
        }
    }

    pub fn from_name(name: &str) -> Option<Gate> {
        Gate::ALL.iter().copied().find(|g| g.name() == name)
    }

    pub fn arity(self) -> usize {
        match self {
            Gate::And | Gate::Or | Gate::Xor => 2,
            Gate::Not | Gate::Reg => 1,
            Gate::Mux => 3,
            Gate::Const0 | Gate::Const1 => 0,
        }
    }

    pub fn is_combinational(self) -> bool {
        self != Gate::Reg
    }
}

/// Built-in multi-output library components. Learned components always have
/// a single output and use the `apply` form instead.
pub const BUILTIN_LIB_KINDS: [(&str, usize, usize); 3] = [
    // (name, input arity, output count)
    ("HalfAdder", 2, 2),
    ("FullAdder", 3, 2),
    ("Mux2", 3, 1),
];

pub fn builtin_lib_arity(name: &str) -> Option<(usize, usize)> {
    BUILTIN_LIB_KINDS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|&(_, i, o)| (i, o))
}

/// Names of learned module kinds start with this prefix.
pub const LEARNED_PREFIX: &str = "def_";

pub fn is_learned_name(name: &str) -> bool {
    name.starts_with(LEARNED_PREFIX)
}

/// Term / e-node operator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Gate(Gate),
    /// Built-in library component applied directly to its inputs; always
    /// wrapped in `Proj` to select one output.
    Lib(String),
    /// Output selector over a `Lib` application.
    Proj(usize),
    /// Learned module instance: first child is the `Def` reference, the rest
    /// are arguments.
    Apply,
    /// Nullary reference to a learned module definition.
    Def(String),
    /// Input port bit leaf.
    Input(String, u32),
    /// Root operator collecting the output port bits in port order.
    Outputs,
}

impl Op {
    /// Fixed arity, or `None` for the variable-arity operators.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Op::Gate(g) => Some(g.arity()),
            Op::Lib(name) => builtin_lib_arity(name).map(|(i, _)| i),
            Op::Proj(_) => Some(1),
            Op::Def(_) => Some(0),
            Op::Input(..) => Some(0),
            Op::Apply | Op::Outputs => None,
        }
    }

    /// Key used for cost-model lookups.
    pub fn cost_symbol(&self) -> String {
        match self {
            Op::Gate(g) => g.name().to_string(),
            Op::Lib(name) | Op::Def(name) => name.clone(),
            Op::Proj(_) => "proj".to_string(),
            Op::Apply => "apply".to_string(),
            Op::Input(..) => "input".to_string(),
            Op::Outputs => "outputs".to_string(),
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Gate(g) => write!(f, "{}", g.name()),
            Op::Lib(name) | Op::Def(name) => write!(f, "{name}"),
            Op::Proj(k) => write!(f, "proj{k}"),
            Op::Apply => write!(f, "apply"),
            Op::Input(port, bit) => write!(f, "input:{port}:{bit}"),
            Op::Outputs => write!(f, "outputs"),
        }
    }
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct TermNode {
    op: Op,
    children: Vec<Term>,
}

/// An immutable term. Clones are cheap; structurally equal terms may or may
/// not share an allocation, equality is structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Term(Rc<TermNode>);

impl Term {
    pub fn new(op: Op, children: Vec<Term>) -> Term {
        Term(Rc::new(TermNode { op, children }))
    }

    pub fn leaf(op: Op) -> Term {
        Term::new(op, Vec::new())
    }

    pub fn input(port: &str, bit: u32) -> Term {
        Term::leaf(Op::Input(port.to_string(), bit))
    }

    pub fn op(&self) -> &Op {
        &self.0.op
    }

    pub fn children(&self) -> &[Term] {
        &self.0.children
    }

    /// Number of operator nodes, counting shared subterms once per distinct
    /// structure.
    pub fn size(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        fn walk(t: &Term, seen: &mut std::collections::HashSet<Term>) -> usize {
            if !seen.insert(t.clone()) {
                return 0;
            }
            1 + t.children().iter().map(|c| walk(c, seen)).sum::<usize>()
        }
        walk(self, &mut seen)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children().is_empty() {
            write!(f, "{}", self.op())
        } else {
            write!(f, "({}", self.op())?;
            for c in self.children() {
                write!(f, " {c}")?;
            }
            write!(f, ")")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("operator `{op}` expects {expected} children, got {got}")]
    Arity {
        op: String,
        expected: usize,
        got: usize,
    },
}

/// Parse an operator atom. `input:<port>:<bit>` names an input bit; any other
/// atom that is not a known operator is rejected.
pub fn parse_op(atom: &str) -> Result<Op, TermParseError> {
    if let Some(g) = Gate::from_name(atom) {
        return Ok(Op::Gate(g));
    }
    if builtin_lib_arity(atom).is_some() {
        return Ok(Op::Lib(atom.to_string()));
    }
    if let Some(k) = atom.strip_prefix("proj") {
        if let Ok(k) = k.parse::<usize>() {
            return Ok(Op::Proj(k));
        }
    }
    if atom == "apply" {
        return Ok(Op::Apply);
    }
    if atom == "outputs" {
        return Ok(Op::Outputs);
    }
    if let Some(rest) = atom.strip_prefix("input:") {
        if let Some((port, bit)) = rest.rsplit_once(':') {
            if let Ok(bit) = bit.parse::<u32>() {
                return Ok(Op::Input(port.to_string(), bit));
            }
        }
        return Err(TermParseError::UnknownOperator(atom.to_string()));
    }
    Err(TermParseError::UnknownOperator(atom.to_string()))
}

fn term_from_sexp(s: &Sexp) -> Result<Term, TermParseError> {
    match s {
        Sexp::Atom(a, _) => match parse_op(a) {
            Ok(op) => check_arity(op, Vec::new()),
            // A bare unknown atom reads as a one-bit input, which keeps
            // hand-written terms like `(AND a b)` short.
            Err(TermParseError::UnknownOperator(_)) => Ok(Term::input(a, 0)),
            Err(e) => Err(e),
        },
        Sexp::List(items, pos) => {
            let (head, rest) = items.split_first().ok_or_else(|| {
                SyntaxError::new(*pos, "empty list is not a term")
            })?;
            let atom = head
                .atom()
                .ok_or_else(|| SyntaxError::new(head.pos(), "operator must be an atom"))?;
            if atom == "def" {
                // (def <name>): reference to a learned definition.
                let [name] = rest else {
                    return Err(TermParseError::Arity {
                        op: "def".into(),
                        expected: 1,
                        got: rest.len(),
                    });
                };
                let name = name
                    .atom()
                    .ok_or_else(|| SyntaxError::new(name.pos(), "def name must be an atom"))?;
                return Ok(Term::leaf(Op::Def(name.to_string())));
            }
            let op = parse_op(atom)?;
            let children = rest.iter().map(term_from_sexp).collect::<Result<_, _>>()?;
            check_arity(op, children)
        }
    }
}

fn check_arity(op: Op, children: Vec<Term>) -> Result<Term, TermParseError> {
    if let Some(expected) = op.arity() {
        if expected != children.len() {
            return Err(TermParseError::Arity {
                op: op.to_string(),
                expected,
                got: children.len(),
            });
        }
    }
    if op == Op::Apply && children.is_empty() {
        return Err(TermParseError::Arity {
            op: "apply".into(),
            expected: 1,
            got: 0,
        });
    }
    Ok(Term::new(op, children))
}

/// Parse a term from its display syntax.
pub fn parse_term(src: &str) -> Result<Term, TermParseError> {
    let sexp = sexpr::parse_one(src)?;
    term_from_sexp(&sexp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trips() {
        let t = parse_term("(outputs (REG (AND input:a:0 input:b:0)))").unwrap();
        assert_eq!(t.to_string(), "(outputs (REG (AND input:a:0 input:b:0)))");
        assert_eq!(parse_term(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn bare_atoms_are_input_shorthand() {
        assert_eq!(parse_term("(AND a b)").unwrap(), parse_term("(AND input:a:0 input:b:0)").unwrap());
    }

    #[test]
    fn arity_is_checked() {
        let err = parse_term("(AND a)").unwrap_err();
        assert!(matches!(err, TermParseError::Arity { .. }));
    }

    #[test]
    fn def_reference_syntax() {
        let t = parse_term("(apply (def def_0) a b)").unwrap();
        assert_eq!(*t.op(), Op::Apply);
        assert_eq!(*t.children()[0].op(), Op::Def("def_0".to_string()));
    }

    #[test]
    fn size_counts_shared_subterms_once() {
        let a = parse_term("(AND x y)").unwrap();
        let t = Term::new(Op::Gate(Gate::Xor), vec![a.clone(), a]);
        // XOR, AND, x, y
        assert_eq!(t.size(), 4);
    }
}
