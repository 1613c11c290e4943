//! The saturation runner.
//!
//! Each iteration matches every rule against the rebuilt graph, then applies
//! all collected matches (instantiating right-hand sides and merging), then
//! rebuilds once. Rewrites never remove e-nodes. The run stops when an
//! iteration changes nothing (saturated) or when a resource limit trips.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::pattern::{ematch, instantiate};
use super::rules::Rewrite;
use super::EGraph;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunLimits {
    pub max_iterations: usize,
    pub max_enodes: usize,
    pub max_seconds: f64,
}

impl Default for RunLimits {
    fn default() -> Self {
        RunLimits {
            max_iterations: 64,
            max_enodes: 20_000,
            max_seconds: 60.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Saturated,
    IterLimit,
    NodeLimit,
    TimeLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub enodes: usize,
    pub eclasses: usize,
    /// Total matches applied per rule, in rule order (both directions of a
    /// bidirectional rule count toward its one entry).
    pub rule_matches: Vec<(String, usize)>,
}

/// Run `rules` to saturation or until a limit trips.
pub fn run(g: &mut EGraph, rules: &[Rewrite], limits: &RunLimits) -> RunReport {
    let start = Instant::now();
    let deadline = Duration::from_secs_f64(limits.max_seconds);
    let mut rule_matches: Vec<(String, usize)> =
        rules.iter().map(|r| (r.name.clone(), 0)).collect();
    g.rebuild();

    let mut iterations = 0;
    let mut stop_reason = StopReason::IterLimit;
    while iterations < limits.max_iterations {
        iterations += 1;
        let nodes_before = g.node_count();
        let unions_before = g.unions_performed();

        // Match phase: all rules see the same pre-iteration graph.
        let mut batches = Vec::with_capacity(rules.len());
        for (ri, rule) in rules.iter().enumerate() {
            let mut directions = vec![(rule.lhs.clone(), rule.rhs.clone())];
            if rule.bidirectional {
                directions.push((rule.rhs.clone(), rule.lhs.clone()));
            }
            for (lhs, rhs) in directions {
                let matches = ematch(g, &lhs);
                batches.push((ri, rhs, matches));
            }
        }

        // Apply phase: deterministic rule order, then sorted match order.
        let mut node_limited = false;
        'apply: for (ri, rhs, matches) in batches {
            rule_matches[ri].1 += matches.len();
            for (class, subst) in matches {
                let new_id = instantiate(g, &rhs, &subst).expect("rule arities were validated");
                g.merge(class, new_id);
            }
            if g.node_count() >= limits.max_enodes {
                node_limited = true;
                break 'apply;
            }
        }
        g.rebuild();

        if node_limited || g.node_count() >= limits.max_enodes {
            stop_reason = StopReason::NodeLimit;
            break;
        }
        if g.unions_performed() == unions_before && g.node_count() == nodes_before {
            stop_reason = StopReason::Saturated;
            break;
        }
        if start.elapsed() >= deadline {
            stop_reason = StopReason::TimeLimit;
            break;
        }
    }

    RunReport {
        iterations,
        stop_reason,
        enodes: g.node_count(),
        eclasses: g.class_count(),
        rule_matches,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::egraph::parse_rules;
    use crate::term::parse_term;

    fn limits(iters: usize) -> RunLimits {
        RunLimits {
            max_iterations: iters,
            ..RunLimits::default()
        }
    }

    #[test]
    fn commutativity_saturates_quickly() {
        let mut g = EGraph::new();
        g.add(&parse_term("(AND a b)").unwrap()).unwrap();
        let classes_before = {
            g.rebuild();
            g.class_count()
        };
        let rules = parse_rules("and-comm: (AND ?a ?b) => (AND ?b ?a)").unwrap();
        let report = run(&mut g, &rules, &limits(10));
        assert_eq!(report.stop_reason, StopReason::Saturated);
        assert!(report.iterations <= 2, "iterations = {}", report.iterations);
        // (AND b a) is now present, in the same class.
        assert_eq!(g.class_count(), classes_before);
        assert_eq!(g.node_count(), 4);
    }

    #[test]
    fn empty_rule_list_saturates_after_one_iteration() {
        let mut g = EGraph::new();
        g.add(&parse_term("(XOR a b)").unwrap()).unwrap();
        let report = run(&mut g, &[], &limits(8));
        assert_eq!(report.iterations, 1);
        assert_eq!(report.stop_reason, StopReason::Saturated);
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn zero_iterations_leaves_graph_untouched() {
        let mut g = EGraph::new();
        g.add(&parse_term("(XOR a b)").unwrap()).unwrap();
        let rules = parse_rules("xor-comm: (XOR ?a ?b) => (XOR ?b ?a)").unwrap();
        let report = run(&mut g, &rules, &limits(0));
        assert_eq!(report.iterations, 0);
        assert_eq!(report.stop_reason, StopReason::IterLimit);
        assert_eq!(g.node_count(), 3);
    }

    #[test]
    fn node_limit_stops_growth() {
        let mut g = EGraph::new();
        g.add(&parse_term("(AND (AND (AND a b) c) d)").unwrap())
            .unwrap();
        let rules = parse_rules(
            "and-comm: (AND ?a ?b) => (AND ?b ?a)\n\
             and-assoc: (AND (AND ?a ?b) ?c) <=> (AND ?a (AND ?b ?c))",
        )
        .unwrap();
        let lim = RunLimits {
            max_iterations: 50,
            max_enodes: 60,
            max_seconds: 10.0,
        };
        let report = run(&mut g, &rules, &lim);
        assert_eq!(report.stop_reason, StopReason::NodeLimit);
    }

    #[test]
    fn reports_are_deterministic() {
        let rules = parse_rules(
            "and-comm: (AND ?a ?b) => (AND ?b ?a)\n\
             and-assoc: (AND (AND ?a ?b) ?c) <=> (AND ?a (AND ?b ?c))",
        )
        .unwrap();
        let mut reports = Vec::new();
        for _ in 0..2 {
            let mut g = EGraph::new();
            g.add(&parse_term("(AND (AND a b) (AND c d))").unwrap())
                .unwrap();
            reports.push(run(&mut g, &rules, &limits(6)));
        }
        assert_eq!(reports[0], reports[1]);
    }

    #[test]
    fn represented_terms_only_grow() {
        let mut g = EGraph::new();
        let root = g.add(&parse_term("(AND (AND a b) c)").unwrap()).unwrap();
        let rules = parse_rules("and-comm: (AND ?a ?b) => (AND ?b ?a)").unwrap();
        let mut last = 0;
        for _ in 0..4 {
            run(&mut g, &rules, &limits(1));
            let now = g.node_count();
            assert!(now >= last);
            last = now;
            // The original term stays represented.
            let t = parse_term("(AND (AND a b) c)").unwrap();
            let id = g.add(&t).unwrap();
            assert_eq!(g.find(id), g.find(root));
        }
    }
}
