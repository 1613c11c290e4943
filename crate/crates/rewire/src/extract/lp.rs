//! LP-file export of the extraction ILP, and re-import for the in-repo
//! solver.
//!
//! The formulation uses one binary `x_<class>_<k>` per e-node and one
//! integer level variable `l_<class>` per class:
//!
//! * every root class must select at least one node,
//! * a selected node forces each child class to select one
//!   (`x_n <= sum of x over the child class`),
//! * big-M level constraints order parent above child
//!   (`l_p >= l_c + 1 - M (1 - x_n)` with `M = classes + 1`),
//!   which is exactly the acyclicity the in-repo solver enforces by
//!   incremental cycle checks.
//!
//! Import accepts the exported subset and rebuilds an
//! [`ExtractionInstance`]; duplicate child classes of one node collapse to
//! one coverage row, which leaves both feasibility and DAG cost unchanged.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use crate::egraph::{EClassId, EGraph};

use super::{
    choice_cost, solve_bb, CostModel, ExtractError, ExtractionInstance, IlpOutcome, InstanceNode,
};

#[derive(Debug, Clone, PartialEq)]
pub struct IlpProblem {
    /// Class labels (canonical e-class numbers on export) in ascending
    /// order; position in this vector is the dense index used internally.
    pub labels: Vec<u32>,
    /// Per class: per node (cost, distinct child dense indices).
    pub nodes: Vec<Vec<(f64, Vec<usize>)>>,
    /// Dense indices of root classes.
    pub roots: Vec<usize>,
}

/// Build the ILP for extracting `roots` from `g` under `cm`.
pub fn build_ilp(g: &mut EGraph, roots: &[EClassId], cm: &CostModel) -> IlpProblem {
    let (inst, ids) = super::instance_from_egraph(g, roots, cm);
    IlpProblem {
        labels: ids.iter().map(|c| c.0).collect(),
        nodes: inst
            .classes
            .iter()
            .map(|nodes| {
                nodes
                    .iter()
                    .map(|n| {
                        let mut children: Vec<usize> = n.children.clone();
                        children.sort_unstable();
                        children.dedup();
                        (n.cost, children)
                    })
                    .collect()
            })
            .collect(),
        roots: inst.roots,
    }
}

impl IlpProblem {
    pub fn to_instance(&self) -> ExtractionInstance {
        ExtractionInstance {
            classes: self
                .nodes
                .iter()
                .map(|nodes| {
                    nodes
                        .iter()
                        .map(|(cost, children)| InstanceNode {
                            cost: *cost,
                            children: children.clone(),
                        })
                        .collect()
                })
                .collect(),
            roots: self.roots.clone(),
        }
    }

    /// Solve with the in-repo branch-and-bound; returns the objective value.
    pub fn solve(&self, time_limit: Option<Duration>) -> Result<IlpOutcome<f64>, ExtractError> {
        let inst = self.to_instance();
        let out = solve_bb(&inst, time_limit)?;
        Ok(IlpOutcome {
            value: choice_cost(&inst, &out.value),
            proven_optimal: out.proven_optimal,
        })
    }

    pub fn binary_count(&self) -> usize {
        self.nodes.iter().map(Vec::len).sum()
    }

    pub fn root_constraint_count(&self) -> usize {
        self.roots.len()
    }
}

fn fmt_cost(c: f64) -> String {
    // Plain decimal, no exponent, trailing zeros trimmed.
    let s = format!("{c}");
    if s.contains('e') {
        format!("{c:.6}")
    } else {
        s
    }
}

/// Render the textual LP format. Deterministic for a given problem.
pub fn export_lp(p: &IlpProblem) -> String {
    let m = p.labels.len() + 1;
    let var = |class: usize, k: usize| format!("x_{}_{}", p.labels[class], k);
    let lvar = |class: usize| format!("l_{}", p.labels[class]);

    let mut obj_terms = Vec::new();
    for (c, nodes) in p.nodes.iter().enumerate() {
        for (k, (cost, _)) in nodes.iter().enumerate() {
            if *cost != 0.0 {
                obj_terms.push(format!("{} {}", fmt_cost(*cost), var(c, k)));
            }
        }
    }
    let mut out = String::new();
    out.push_str("\\ rewire extraction problem\n");
    out.push_str("Minimize\n");
    if obj_terms.is_empty() {
        out.push_str(" obj: 0\n");
    } else {
        let _ = writeln!(out, " obj: {}", obj_terms.join(" + "));
    }
    out.push_str("Subject To\n");
    for &r in &p.roots {
        let sum = (0..p.nodes[r].len())
            .map(|k| var(r, k))
            .collect::<Vec<_>>()
            .join(" + ");
        let _ = writeln!(out, " root_{}: {} >= 1", p.labels[r], sum);
    }
    for (c, nodes) in p.nodes.iter().enumerate() {
        for (k, (_, children)) in nodes.iter().enumerate() {
            for &ch in children {
                let cover = (0..p.nodes[ch].len())
                    .map(|j| format!(" - {}", var(ch, j)))
                    .collect::<Vec<_>>()
                    .join("");
                let _ = writeln!(
                    out,
                    " cov_{}_{}_{}: {}{} <= 0",
                    p.labels[c],
                    k,
                    p.labels[ch],
                    var(c, k),
                    cover
                );
                let _ = writeln!(
                    out,
                    " acy_{}_{}_{}: {} - {} - {} {} >= {}",
                    p.labels[c],
                    k,
                    p.labels[ch],
                    lvar(c),
                    lvar(ch),
                    m,
                    var(c, k),
                    1 - m as i64
                );
            }
        }
    }
    out.push_str("Bounds\n");
    for c in 0..p.labels.len() {
        let _ = writeln!(out, " 0 <= {} <= {}", lvar(c), p.labels.len());
    }
    out.push_str("Generals\n");
    if !p.labels.is_empty() {
        let _ = writeln!(
            out,
            " {}",
            (0..p.labels.len()).map(lvar).collect::<Vec<_>>().join(" ")
        );
    }
    out.push_str("Binaries\n");
    let bins: Vec<String> = p
        .nodes
        .iter()
        .enumerate()
        .flat_map(|(c, nodes)| (0..nodes.len()).map(move |k| (c, k)))
        .map(|(c, k)| var(c, k))
        .collect();
    if !bins.is_empty() {
        let _ = writeln!(out, " {}", bins.join(" "));
    }
    out.push_str("End\n");
    out
}

fn parse_x_var(name: &str) -> Option<(u32, usize)> {
    let rest = name.strip_prefix("x_")?;
    let (class, k) = rest.split_once('_')?;
    Some((class.parse().ok()?, k.parse().ok()?))
}

/// Parse the exported LP subset back into a problem.
pub fn import_lp(text: &str) -> Result<IlpProblem, ExtractError> {
    let err = |msg: String| ExtractError::LpParse(msg);

    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        Preamble,
        Objective,
        Constraints,
        Bounds,
        Generals,
        Binaries,
        End,
    }
    let mut section = Section::Preamble;

    // (class label, node index) → cost; node discovery from Binaries.
    let mut costs: BTreeMap<(u32, usize), f64> = BTreeMap::new();
    let mut node_ids: Vec<(u32, usize)> = Vec::new();
    let mut root_labels: Vec<u32> = Vec::new();
    // (class label, node index) → child labels.
    let mut children: BTreeMap<(u32, usize), Vec<u32>> = BTreeMap::new();

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('\\') {
            continue;
        }
        match line {
            "Minimize" => {
                section = Section::Objective;
                continue;
            }
            "Subject To" => {
                section = Section::Constraints;
                continue;
            }
            "Bounds" => {
                section = Section::Bounds;
                continue;
            }
            "Generals" => {
                section = Section::Generals;
                continue;
            }
            "Binaries" => {
                section = Section::Binaries;
                continue;
            }
            "End" => {
                section = Section::End;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Objective => {
                let body = line
                    .strip_prefix("obj:")
                    .ok_or_else(|| err(format!("expected objective, got `{line}`")))?
                    .trim();
                if body == "0" || body.is_empty() {
                    continue;
                }
                for term in body.split('+') {
                    let mut parts = term.split_whitespace();
                    let (Some(coef), Some(v), None) = (parts.next(), parts.next(), parts.next())
                    else {
                        return Err(err(format!("bad objective term `{term}`")));
                    };
                    let coef: f64 = coef
                        .parse()
                        .map_err(|_| err(format!("bad coefficient `{coef}`")))?;
                    let id =
                        parse_x_var(v).ok_or_else(|| err(format!("bad variable `{v}`")))?;
                    costs.insert(id, coef);
                }
            }
            Section::Constraints => {
                let (name, body) = line
                    .split_once(':')
                    .ok_or_else(|| err(format!("constraint without name: `{line}`")))?;
                let body = body.trim();
                if let Some(label) = name.strip_prefix("root_") {
                    let label: u32 = label
                        .parse()
                        .map_err(|_| err(format!("bad root label `{name}`")))?;
                    if !body.ends_with(">= 1") {
                        return Err(err(format!("bad root constraint `{line}`")));
                    }
                    root_labels.push(label);
                } else if name.starts_with("cov_") {
                    // x_p_k - x_c_0 - ... <= 0
                    let body = body
                        .strip_suffix("<= 0")
                        .ok_or_else(|| err(format!("bad coverage row `{line}`")))?;
                    let mut terms = body.split(" - ").map(str::trim);
                    let head = terms
                        .next()
                        .and_then(parse_x_var)
                        .ok_or_else(|| err(format!("bad coverage row `{line}`")))?;
                    let mut child_label = None;
                    for t in terms {
                        let (cl, _) = parse_x_var(t)
                            .ok_or_else(|| err(format!("bad coverage term `{t}`")))?;
                        if child_label.is_some_and(|c| c != cl) {
                            return Err(err(format!("coverage row mixes classes: `{line}`")));
                        }
                        child_label = Some(cl);
                    }
                    let cl =
                        child_label.ok_or_else(|| err(format!("empty coverage row `{line}`")))?;
                    children.entry(head).or_default().push(cl);
                } else if name.starts_with("acy_") {
                    // Shape check only; the solver enforces acyclicity itself.
                    if !body.contains(">=") || !body.starts_with("l_") {
                        return Err(err(format!("bad level row `{line}`")));
                    }
                } else {
                    return Err(err(format!("unknown constraint `{name}`")));
                }
            }
            Section::Binaries => {
                for v in line.split_whitespace() {
                    let id = parse_x_var(v)
                        .ok_or_else(|| err(format!("bad binary variable `{v}`")))?;
                    node_ids.push(id);
                }
            }
            Section::Bounds | Section::Generals | Section::Preamble | Section::End => {}
        }
    }

    // Assemble classes from the discovered binaries.
    let mut labels: Vec<u32> = node_ids.iter().map(|&(c, _)| c).collect();
    labels.sort_unstable();
    labels.dedup();
    let index: BTreeMap<u32, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut nodes: Vec<Vec<(f64, Vec<usize>)>> = vec![Vec::new(); labels.len()];
    let mut per_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for &(c, k) in &node_ids {
        per_class.entry(c).or_default().push(k);
    }
    for (label, mut ks) in per_class {
        ks.sort_unstable();
        ks.dedup();
        if ks != (0..ks.len()).collect::<Vec<_>>() {
            return Err(err(format!("class {label} has non-contiguous node indices")));
        }
        let dense = index[&label];
        for k in ks {
            let cost = costs.get(&(label, k)).copied().unwrap_or(0.0);
            let ch = children
                .get(&(label, k))
                .map(|labels| {
                    labels
                        .iter()
                        .map(|l| {
                            index
                                .get(l)
                                .copied()
                                .ok_or_else(|| err(format!("unknown child class {l}")))
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?
                .unwrap_or_default();
            nodes[dense].push((cost, ch));
        }
    }
    let roots = root_labels
        .iter()
        .map(|l| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| err(format!("unknown root class {l}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IlpProblem {
        labels,
        nodes,
        roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    #[test]
    fn empty_problem_exports_and_reimports() {
        let p = IlpProblem {
            labels: vec![],
            nodes: vec![],
            roots: vec![],
        };
        let text = export_lp(&p);
        assert!(text.contains("obj: 0"));
        let back = import_lp(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.solve(None).unwrap().value, 0.0);
    }

    #[test]
    fn half_adder_problem_counts() {
        // Two root classes with two nodes each (gate or shared component),
        // plus the component class and the two inputs.
        let mut g = EGraph::new();
        let x = g.add(&parse_term("(XOR a b)").unwrap()).unwrap();
        let h0 = g
            .add(&parse_term("(proj0 (HalfAdder a b))").unwrap())
            .unwrap();
        g.merge(x, h0);
        let a = g.add(&parse_term("(AND a b)").unwrap()).unwrap();
        let h1 = g
            .add(&parse_term("(proj1 (HalfAdder a b))").unwrap())
            .unwrap();
        g.merge(a, h1);
        g.rebuild();
        let roots = [g.find(x), g.find(a)];
        let p = build_ilp(&mut g, &roots, &CostModel::default());
        assert_eq!(p.root_constraint_count(), 2);
        // 2 nodes in each root class + HalfAdder + 2 inputs.
        assert_eq!(p.binary_count(), 7);
        let text = export_lp(&p);
        assert_eq!(text.matches("root_").count(), 2);
    }

    #[test]
    fn reimport_reproduces_optimum() {
        let mut g = EGraph::new();
        let x = g.add(&parse_term("(XOR a b)").unwrap()).unwrap();
        let h0 = g
            .add(&parse_term("(proj0 (HalfAdder a b))").unwrap())
            .unwrap();
        g.merge(x, h0);
        let a = g.add(&parse_term("(AND a b)").unwrap()).unwrap();
        let h1 = g
            .add(&parse_term("(proj1 (HalfAdder a b))").unwrap())
            .unwrap();
        g.merge(a, h1);
        g.rebuild();
        let roots = [g.find(x), g.find(a)];
        let p = build_ilp(&mut g, &roots, &CostModel::default());
        let direct = p.solve(None).unwrap().value;
        let back = import_lp(&export_lp(&p)).unwrap();
        assert_eq!(back.solve(None).unwrap().value, direct);
        assert_eq!(direct, 1.5);
    }

    #[test]
    fn export_is_deterministic() {
        let mut g = EGraph::new();
        let r = g.add(&parse_term("(AND (XOR a b) c)").unwrap()).unwrap();
        g.rebuild();
        let p = build_ilp(&mut g, &[r], &CostModel::default());
        assert_eq!(export_lp(&p), export_lp(&p));
    }
}
