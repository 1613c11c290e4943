//! Patterns and e-matching.
//!
//! Patterns are terms with `?var` holes. `ematch` is complete over a rebuilt
//! graph: it reports every (class, substitution) pair under which the
//! pattern is represented, in a deterministic order (canonical class id,
//! then bindings). Non-linear patterns like `(AND ?x ?x)` require the two
//! occurrences to resolve to the same canonical class.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::sexpr::{self, Sexp, SyntaxError};
use crate::term::{parse_op, Op, Term, TermParseError};

use super::{EClassId, EGraph, EGraphError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pattern {
    Var(String),
    App(Op, Vec<Pattern>),
}

/// Variable bindings, by variable name (without the `?`).
pub type Subst = BTreeMap<String, EClassId>;

impl Pattern {
    pub fn leaf(op: Op) -> Pattern {
        Pattern::App(op, Vec::new())
    }

    pub fn var(name: impl Into<String>) -> Pattern {
        Pattern::Var(name.into())
    }

    /// Variables in first-occurrence order.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Pattern::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Pattern::App(_, children) => {
                for c in children {
                    c.collect_vars(out);
                }
            }
        }
    }

    /// Operator nodes in the pattern (variables not counted).
    pub fn op_count(&self) -> usize {
        match self {
            Pattern::Var(_) => 0,
            Pattern::App(_, children) => {
                1 + children.iter().map(Pattern::op_count).sum::<usize>()
            }
        }
    }

    /// All operators used, for cost-model and filter checks.
    pub fn ops(&self) -> BTreeSet<Op> {
        let mut out = BTreeSet::new();
        fn walk(p: &Pattern, out: &mut BTreeSet<Op>) {
            if let Pattern::App(op, children) = p {
                out.insert(op.clone());
                for c in children {
                    walk(c, out);
                }
            }
        }
        walk(self, &mut out);
        out
    }

    /// Substitute variables with terms. Every variable must be bound.
    pub fn substitute(&self, binding: &BTreeMap<String, Term>) -> Term {
        match self {
            Pattern::Var(v) => binding
                .get(v)
                .unwrap_or_else(|| panic!("unbound pattern variable ?{v}"))
                .clone(),
            Pattern::App(op, children) => Term::new(
                op.clone(),
                children.iter().map(|c| c.substitute(binding)).collect(),
            ),
        }
    }

    /// View a ground pattern (no variables) as a term.
    pub fn to_term(&self) -> Option<Term> {
        match self {
            Pattern::Var(_) => None,
            Pattern::App(op, children) => {
                let children = children
                    .iter()
                    .map(Pattern::to_term)
                    .collect::<Option<Vec<_>>>()?;
                Some(Term::new(op.clone(), children))
            }
        }
    }

    /// Lift a term into a variable-free pattern.
    pub fn from_term(term: &Term) -> Pattern {
        Pattern::App(
            term.op().clone(),
            term.children().iter().map(Pattern::from_term).collect(),
        )
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Var(v) => write!(f, "?{v}"),
            Pattern::App(op, children) => {
                if children.is_empty() {
                    if let Op::Def(name) = op {
                        return write!(f, "(def {name})");
                    }
                    write!(f, "{op}")
                } else {
                    write!(f, "({op}")?;
                    for c in children {
                        write!(f, " {c}")?;
                    }
                    write!(f, ")")
                }
            }
        }
    }
}

fn pattern_from_sexp(s: &Sexp) -> Result<Pattern, TermParseError> {
    match s {
        Sexp::Atom(a, _) => {
            if let Some(v) = a.strip_prefix('?') {
                return Ok(Pattern::var(v));
            }
            Ok(Pattern::leaf(parse_op(a)?))
        }
        Sexp::List(items, pos) => {
            let (head, rest) = items
                .split_first()
                .ok_or_else(|| SyntaxError::new(*pos, "empty list is not a pattern"))?;
            let atom = head
                .atom()
                .ok_or_else(|| SyntaxError::new(head.pos(), "operator must be an atom"))?;
            if atom == "def" {
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
                return Ok(Pattern::leaf(Op::Def(name.to_string())));
            }
            let op = parse_op(atom)?;
            let children = rest
                .iter()
                .map(pattern_from_sexp)
                .collect::<Result<Vec<_>, _>>()?;
            if let Some(expected) = op.arity() {
                if expected != children.len() {
                    return Err(TermParseError::Arity {
                        op: op.to_string(),
                        expected,
                        got: children.len(),
                    });
                }
            }
            Ok(Pattern::App(op, children))
        }
    }
}

pub fn parse_pattern(src: &str) -> Result<Pattern, TermParseError> {
    let sexp = sexpr::parse_one(src)?;
    pattern_from_sexp(&sexp)
}

/// Find every substitution under which `pattern` is represented in some
/// class. Complete and deterministic on a rebuilt graph.
pub fn ematch(g: &mut EGraph, pattern: &Pattern) -> Vec<(EClassId, Subst)> {
    debug_assert!(g.is_clean(), "ematch requires a rebuilt graph");
    let mut out: BTreeSet<(EClassId, Subst)> = BTreeSet::new();
    for id in g.class_ids() {
        let mut results = Vec::new();
        match_class(g, pattern, id, Subst::new(), &mut results);
        for subst in results {
            out.insert((id, subst));
        }
    }
    out.into_iter().collect()
}

fn match_class(
    g: &EGraph,
    pattern: &Pattern,
    id: EClassId,
    subst: Subst,
    out: &mut Vec<Subst>,
) {
    match pattern {
        Pattern::Var(v) => match subst.get(v) {
            Some(&bound) => {
                if bound == id {
                    out.push(subst);
                }
            }
            None => {
                let mut subst = subst;
                subst.insert(v.clone(), id);
                out.push(subst);
            }
        },
        Pattern::App(op, children) => {
            for node in &g.class(id).nodes {
                if &node.op != op || node.children.len() != children.len() {
                    continue;
                }
                let mut partial = vec![subst.clone()];
                for (child_pat, &child_id) in children.iter().zip(&node.children) {
                    let mut next = Vec::new();
                    for s in partial {
                        match_class(g, child_pat, child_id, s, &mut next);
                    }
                    partial = next;
                    if partial.is_empty() {
                        break;
                    }
                }
                out.extend(partial);
            }
        }
    }
}

/// Build the pattern in the graph under a substitution, returning its class.
pub fn instantiate(
    g: &mut EGraph,
    pattern: &Pattern,
    subst: &Subst,
) -> Result<EClassId, EGraphError> {
    match pattern {
        Pattern::Var(v) => {
            let id = *subst
                .get(v)
                .unwrap_or_else(|| panic!("unbound pattern variable ?{v}"));
            Ok(g.find(id))
        }
        Pattern::App(op, children) => {
            let ids = children
                .iter()
                .map(|c| instantiate(g, c, subst))
                .collect::<Result<Vec<_>, _>>()?;
            g.add_node(op.clone(), ids)
        }
    }
}
