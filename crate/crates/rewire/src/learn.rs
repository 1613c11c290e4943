//! Library learning by pairwise anti-unification.
//!
//! [`anti_unify`] computes the least general generalization of two terms:
//! equal operators recurse, mismatches become variables, and a repeated
//! identical mismatch pair reuses its variable. [`discover`] anti-unifies
//! sampled pairs of corpus subterms, keeps gate-only bodies with at least
//! two operators, counts each candidate's distinct e-matches over a shared
//! corpus e-graph (so identical logic across modules deduplicates into one
//! class), and ranks by `(size − 1) × (matches − 1)` — zero for one-gate or
//! single-use candidates, which save nothing.
//!
//! [`abstract_corpus`] rewrites every profitable occurrence of one learned
//! abstraction into `(apply (def name) args…)` cells and emits the
//! definition as a component-library entry, which both the simulator and
//! the identify pass consume.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::egraph::{ematch, run, EGraph, EClassId, Pattern, Rewrite, RunLimits};
use crate::extract::{extract_ilp, CostModel, ExtractError};
use crate::identify::{ComponentLibrary, IdentifyError, LibraryComponent};
use crate::netlist::{from_terms_like, to_terms, CellKind, Netlist, NetlistError};
use crate::term::{Gate, Op, Term, LEARNED_PREFIX};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LearnError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("kind `{0}` already exists in the corpus")]
    NameCollision(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Component(#[from] IdentifyError),
}

/// A candidate abstraction: a parameterized body and its corpus statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Abstraction {
    pub name: String,
    #[serde(serialize_with = "serialize_pattern")]
    pub body: Pattern,
    pub arity: usize,
    pub matches: usize,
    pub score: usize,
}

fn serialize_pattern<S: serde::Serializer>(p: &Pattern, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

/// Least general generalization of two terms.
pub fn anti_unify(a: &Term, b: &Term) -> Pattern {
    let mut vars: HashMap<(Term, Term), String> = HashMap::new();
    let mut order = Vec::new();
    let p = lgg(a, b, &mut vars, &mut order);
    let _ = order;
    p
}

fn lgg(
    a: &Term,
    b: &Term,
    vars: &mut HashMap<(Term, Term), String>,
    order: &mut Vec<String>,
) -> Pattern {
    if a.op() == b.op() && a.children().len() == b.children().len() {
        let children = a
            .children()
            .iter()
            .zip(b.children())
            .map(|(x, y)| lgg(x, y, vars, order))
            .collect();
        return Pattern::App(a.op().clone(), children);
    }
    let key = (a.clone(), b.clone());
    let next = vars.len();
    let var = vars
        .entry(key)
        .or_insert_with(|| {
            let v = format!("p{next}");
            order.push(v.clone());
            v
        })
        .clone();
    Pattern::Var(var)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LearnConfig {
    /// Reject candidates with more parameters than this.
    pub max_arity: usize,
    /// Reject candidates matched fewer times across the corpus.
    pub min_matches: usize,
    /// Subterms kept (largest first) when all-pairs sampling would exceed
    /// the pair budget.
    pub beam: usize,
}

impl Default for LearnConfig {
    fn default() -> Self {
        LearnConfig {
            max_arity: 4,
            min_matches: 2,
            beam: 100,
        }
    }
}

const PAIR_BUDGET: usize = 10_000;

/// Gather the distinct internal subterms of a netlist corpus: operators
/// only, no `outputs` roots, no bare leaves.
fn corpus_subterms(terms: &[Term]) -> Vec<Term> {
    let mut set: BTreeSet<Term> = BTreeSet::new();
    fn walk(t: &Term, set: &mut BTreeSet<Term>) {
        for c in t.children() {
            walk(c, set);
        }
        if *t.op() != Op::Outputs && !t.children().is_empty() {
            set.insert(t.clone());
        }
    }
    for t in terms {
        walk(t, &mut set);
    }
    set.into_iter().collect()
}

/// Bodies may use combinational gates and constants only; anything tied to
/// a specific port, module structure or another abstraction is rejected.
fn body_is_abstractable(p: &Pattern) -> bool {
    p.ops().iter().all(|op| match op {
        Op::Gate(Gate::Reg) => false,
        Op::Gate(_) => true,
        _ => false,
    })
}

fn canonicalize_vars(p: &Pattern) -> Pattern {
    let names = p.vars();
    let renaming: BTreeMap<String, String> = names
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), format!("p{i}")))
        .collect();
    fn apply(p: &Pattern, renaming: &BTreeMap<String, String>) -> Pattern {
        match p {
            Pattern::Var(v) => Pattern::Var(renaming[v].clone()),
            Pattern::App(op, children) => Pattern::App(
                op.clone(),
                children.iter().map(|c| apply(c, renaming)).collect(),
            ),
        }
    }
    apply(p, &renaming)
}

/// Smallest index `k` such that `def_k` collides with nothing in the corpus.
fn first_free_def_index(corpus: &[Netlist]) -> usize {
    let mut max = None;
    for nl in corpus {
        for cell in &nl.cells {
            if let CellKind::Learned(name) = &cell.kind {
                if let Some(k) = name
                    .strip_prefix(LEARNED_PREFIX)
                    .and_then(|s| s.parse::<usize>().ok())
                {
                    max = Some(max.map_or(k, |m: usize| m.max(k)));
                }
            }
        }
    }
    max.map_or(0, |m| m + 1)
}

/// Build one e-graph holding every corpus module; returns per-module roots.
pub fn corpus_egraph(corpus: &[Netlist]) -> Result<(EGraph, Vec<EClassId>), LearnError> {
    let mut g = EGraph::new();
    let mut roots = Vec::new();
    for nl in corpus {
        let term = to_terms(nl)?;
        roots.push(g.add(&term).expect("netlist terms have valid arities"));
    }
    g.rebuild();
    Ok((g, roots))
}

/// Discover repeated submodule structure across the corpus, ranked by
/// estimated compression. Deterministic for a given corpus and config.
pub fn discover(corpus: &[Netlist], cfg: &LearnConfig) -> Result<Vec<Abstraction>, LearnError> {
    if corpus.is_empty() {
        return Err(LearnError::EmptyCorpus);
    }
    let terms = corpus
        .iter()
        .map(to_terms)
        .collect::<Result<Vec<_>, _>>()?;
    let mut subterms = corpus_subterms(&terms);
    if subterms.len() * subterms.len().saturating_sub(1) / 2 > PAIR_BUDGET {
        // Beam: keep the largest subterms, deterministic order.
        subterms.sort_by(|a, b| b.size().cmp(&a.size()).then_with(|| a.cmp(b)));
        subterms.truncate(cfg.beam);
        subterms.sort();
    }

    let mut bodies: BTreeSet<Pattern> = BTreeSet::new();
    let mut ordered: Vec<Pattern> = Vec::new();
    for i in 0..subterms.len() {
        for j in (i + 1)..subterms.len() {
            let p = canonicalize_vars(&anti_unify(&subterms[i], &subterms[j]));
            if p.op_count() < 2 || p.vars().len() > cfg.max_arity || !body_is_abstractable(&p) {
                continue;
            }
            if bodies.insert(p.clone()) {
                ordered.push(p);
            }
        }
    }

    let (mut g, _) = corpus_egraph(corpus)?;
    let base = first_free_def_index(corpus);
    let mut out = Vec::new();
    for (k, body) in ordered.into_iter().enumerate() {
        let matches = ematch(&mut g, &body).len();
        if matches < cfg.min_matches {
            continue;
        }
        let size = body.op_count();
        out.push(Abstraction {
            name: format!("{LEARNED_PREFIX}{}", base + k),
            arity: body.vars().len(),
            score: (size - 1) * (matches - 1),
            matches,
            body,
        });
    }
    out.sort_by(|a, b| b.score.cmp(&a.score).then_with(|| a.name.cmp(&b.name)));
    Ok(out)
}

/// Rewrite every profitable occurrence of `a` across the corpus into
/// `apply` cells of a fresh learned kind, and emit that kind's definition.
///
/// Each output module is oracle-equivalent to its input; a zero-match
/// abstraction leaves the corpus unchanged (modulo cell dedup).
pub fn abstract_corpus(
    corpus: &[Netlist],
    a: &Abstraction,
) -> Result<(Vec<Netlist>, LibraryComponent), LearnError> {
    for nl in corpus {
        for cell in &nl.cells {
            if cell.kind.name() == a.name {
                return Err(LearnError::NameCollision(a.name.clone()));
            }
        }
    }
    let (mut g, roots) = corpus_egraph(corpus)?;

    let params = a.body.vars();
    let mut rhs_children = vec![Pattern::leaf(Op::Def(a.name.clone()))];
    rhs_children.extend(params.iter().map(|p| Pattern::var(p.clone())));
    let rule = Rewrite::directed(
        format!("abstract-{}", a.name),
        a.body.clone(),
        Pattern::App(Op::Apply, rhs_children),
    )
    .expect("abstraction bodies bind their parameters");

    let limits = RunLimits {
        max_iterations: 4,
        ..RunLimits::default()
    };
    run(&mut g, &[rule], &limits);

    let roots: Vec<EClassId> = roots.into_iter().map(|r| g.find(r)).collect();
    let selection = extract_ilp(&mut g, &roots, &CostModel::default(), None)?.value;

    let mut rewritten = Vec::with_capacity(corpus.len());
    for (nl, &root) in corpus.iter().zip(&roots) {
        let term = selection.term(root, &mut g);
        rewritten.push(from_terms_like(&term, nl)?);
    }

    let component = LibraryComponent {
        name: a.name.clone(),
        inputs: params,
        outputs: vec![("Y".to_string(), a.body.clone())],
    };
    component.validate()?;
    Ok((rewritten, component))
}

/// Replace learned cells with their defining gate structure.
pub fn inline_defs(nl: &Netlist, lib: &ComponentLibrary) -> Result<Netlist, LearnError> {
    let term = to_terms(nl)?;
    let mut memo = HashMap::new();
    let inlined = inline_term(&term, lib, &mut memo)?;
    Ok(from_terms_like(&inlined, nl)?)
}

fn inline_term(
    t: &Term,
    lib: &ComponentLibrary,
    memo: &mut HashMap<Term, Term>,
) -> Result<Term, LearnError> {
    if let Some(done) = memo.get(t) {
        return Ok(done.clone());
    }
    let result = if *t.op() == Op::Apply {
        let (def, args) = t.children().split_first().expect("apply has a def child");
        let Op::Def(name) = def.op() else {
            return Err(LearnError::Netlist(NetlistError::BadTerm(
                "apply without definition reference".to_string(),
            )));
        };
        let comp = lib.get(name).ok_or_else(|| {
            LearnError::Component(IdentifyError::BadComponent {
                component: name.clone(),
                detail: "not in library".to_string(),
            })
        })?;
        let args = args
            .iter()
            .map(|c| inline_term(c, lib, memo))
            .collect::<Result<Vec<_>, _>>()?;
        let binding: BTreeMap<String, Term> =
            comp.inputs.iter().cloned().zip(args).collect();
        comp.outputs[0].1.substitute(&binding)
    } else {
        Term::new(
            t.op().clone(),
            t.children()
                .iter()
                .map(|c| inline_term(c, lib, memo))
                .collect::<Result<Vec<_>, _>>()?,
        )
    };
    memo.insert(t.clone(), result.clone());
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{NetBit, NetlistBuilder};
    use crate::oracle::{check_equiv, EquivConfig};
    use crate::term::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn anti_unify_mismatch_becomes_variable() {
        let p = anti_unify(&t("(AND a b)"), &t("(AND a c)"));
        assert_eq!(p.to_string(), "(AND input:a:0 ?p0)");
    }

    #[test]
    fn anti_unify_identity_has_no_variables() {
        let term = t("(XOR (AND a b) c)");
        let p = anti_unify(&term, &term);
        assert!(p.vars().is_empty());
        assert_eq!(p.to_term().unwrap(), term);
    }

    #[test]
    fn anti_unify_generalizes_structure() {
        let p = anti_unify(&t("(XOR (AND a b) c)"), &t("(XOR (AND d e) f)"));
        assert_eq!(p.to_string(), "(XOR (AND ?p0 ?p1) ?p2)");
    }

    #[test]
    fn anti_unify_reuses_variable_for_repeated_pair() {
        // The (a, d) mismatch occurs twice and must map to one variable.
        let p = anti_unify(&t("(AND a (NOT a))"), &t("(AND d (NOT d))"));
        assert_eq!(p.to_string(), "(AND ?p0 (NOT ?p0))");
    }

    #[test]
    fn anti_unify_subsumes_both_inputs() {
        let a = t("(XOR (AND a b) c)");
        let b = t("(XOR (OR a b) (AND a b))");
        let p = anti_unify(&a, &b);
        let mut g = EGraph::new();
        let ca = g.add(&a).unwrap();
        let cb = g.add(&b).unwrap();
        g.rebuild();
        let hits = ematch(&mut g, &p);
        let classes: BTreeSet<EClassId> = hits.iter().map(|(c, _)| *c).collect();
        assert!(classes.contains(&g.find(ca)));
        assert!(classes.contains(&g.find(cb)));
    }

    /// A 3-gate cone on three fresh inputs.
    fn cone_module(name: &str, salt: &str) -> Netlist {
        let mut b = NetlistBuilder::new(name);
        let x = b.input(&format!("x{salt}"), 1);
        let y = b.input(&format!("y{salt}"), 1);
        let z = b.input(&format!("z{salt}"), 1);
        b.output("o", 1);
        let n0 = b.gate(Gate::And, &[x, y]);
        let n1 = b.gate(Gate::Or, &[n0, z]);
        let n2 = b.gate(Gate::Not, &[n1]);
        b.connect_output("o", 0, n2);
        b.finish().unwrap()
    }

    fn four_copy_corpus() -> Vec<Netlist> {
        (0..4)
            .map(|i| cone_module(&format!("m{i}"), &i.to_string()))
            .collect()
    }

    #[test]
    fn discover_ranks_repeated_cone_first() {
        let corpus = four_copy_corpus();
        let ranked = discover(&corpus, &LearnConfig::default()).unwrap();
        let top = &ranked[0];
        assert_eq!(top.body.to_string(), "(NOT (OR (AND ?p0 ?p1) ?p2))");
        assert_eq!(top.matches, 4);
        assert_eq!(top.score, 6);
        assert_eq!(top.arity, 3);
    }

    #[test]
    fn disjoint_single_gates_yield_nothing() {
        let mut corpus = Vec::new();
        for (i, gate) in [Gate::And, Gate::Or, Gate::Xor].iter().enumerate() {
            let mut b = NetlistBuilder::new(format!("g{i}"));
            let x = b.input("a", 1);
            let y = b.input("b", 1);
            b.output("o", 1);
            let n = b.gate(*gate, &[x, y]);
            b.connect_output("o", 0, n);
            corpus.push(b.finish().unwrap());
        }
        let ranked = discover(&corpus, &LearnConfig::default()).unwrap();
        assert!(ranked.is_empty(), "got {ranked:?}");
    }

    #[test]
    fn abstract_rewrites_all_four_copies() {
        let corpus = four_copy_corpus();
        let ranked = discover(&corpus, &LearnConfig::default()).unwrap();
        let (rewritten, component) = abstract_corpus(&corpus, &ranked[0]).unwrap();
        let name = ranked[0].name.clone();
        assert_eq!(component.name, name);
        let mut lib = ComponentLibrary::builtins();
        lib.register(component.clone()).unwrap();
        for (orig, new) in corpus.iter().zip(&rewritten) {
            let applies = new
                .cells
                .iter()
                .filter(|c| c.kind == CellKind::Learned(name.clone()))
                .count();
            assert_eq!(applies, 1);
            assert_eq!(new.cells.len(), 1, "gates folded into the apply cell");
            let v = check_equiv(orig, new, &EquivConfig::default(), &lib).unwrap();
            assert!(v.equivalent);
        }
    }

    #[test]
    fn abstract_then_inline_round_trips() {
        let corpus = four_copy_corpus();
        let ranked = discover(&corpus, &LearnConfig::default()).unwrap();
        let (rewritten, component) = abstract_corpus(&corpus, &ranked[0]).unwrap();
        let mut lib = ComponentLibrary::builtins();
        lib.register(component).unwrap();
        for (orig, new) in corpus.iter().zip(&rewritten) {
            let inlined = inline_defs(new, &lib).unwrap();
            assert!(inlined
                .cells
                .iter()
                .all(|c| !matches!(c.kind, CellKind::Learned(_))));
            let v = check_equiv(orig, &inlined, &EquivConfig::default(), &lib).unwrap();
            assert!(v.equivalent);
        }
    }

    #[test]
    fn zero_match_abstraction_changes_nothing() {
        let corpus = four_copy_corpus();
        let ghost = Abstraction {
            name: "def_7".to_string(),
            body: crate::egraph::parse_pattern("(XOR (XOR ?p0 ?p1) ?p2)").unwrap(),
            arity: 3,
            matches: 0,
            score: 0,
        };
        let (rewritten, _) = abstract_corpus(&corpus, &ghost).unwrap();
        for (orig, new) in corpus.iter().zip(&rewritten) {
            assert_eq!(orig.cells.len(), new.cells.len());
            assert!(new
                .cells
                .iter()
                .all(|c| !matches!(c.kind, CellKind::Learned(_))));
        }
    }

    #[test]
    fn name_collision_rejected() {
        let corpus = four_copy_corpus();
        let ranked = discover(&corpus, &LearnConfig::default()).unwrap();
        let (rewritten, _) = abstract_corpus(&corpus, &ranked[0]).unwrap();
        assert_eq!(
            abstract_corpus(&rewritten, &ranked[0]).unwrap_err(),
            LearnError::NameCollision(ranked[0].name.clone())
        );
    }

    #[test]
    fn score_monotone_in_instance_count() {
        let corpus = four_copy_corpus();
        let ranked4 = discover(&corpus, &LearnConfig::default()).unwrap();
        let mut corpus5 = corpus.clone();
        corpus5.push(cone_module("m4", "4"));
        let ranked5 = discover(&corpus5, &LearnConfig::default()).unwrap();
        let body = ranked4[0].body.clone();
        let in5 = ranked5.iter().find(|a| a.body == body).unwrap();
        assert!(in5.score >= ranked4[0].score);
        assert_eq!(in5.matches, 5);
    }

    #[test]
    fn shared_corpus_graph_deduplicates() {
        // Two modules with an identical cone on identical inputs: the cone
        // occupies one class in the shared graph.
        let a = cone_module("a", "s");
        let b = cone_module("b", "s");
        let (mut g, _) = corpus_egraph(&[a, b]).unwrap();
        let p = crate::egraph::parse_pattern("(NOT (OR (AND ?x ?y) ?z))").unwrap();
        assert_eq!(ematch(&mut g, &p).len(), 1);
        let _ = NetBit::new("unused", 0);
    }
}
