//! Exact 0/1 extraction by depth-first branch-and-bound.
//!
//! The search decides one needed class at a time (smallest index first),
//! trying that class's nodes cheapest-first. A choice is rejected if it
//! closes a cycle through already-chosen nodes. The lower bound for pruning
//! is the cost so far plus each still-needed class's cheapest node — an
//! admissible underestimate, since any completion must pay at least that.
//!
//! The objective is (DAG cost, chosen-node count), and a branch is cut as
//! soon as its bound cannot strictly beat the incumbent, so among fully
//! tied optima the first one in search order wins: classes ascending,
//! nodes cheapest-first then by index. That makes the result deterministic
//! without enumerating tied selections. The greedy extraction seeds the
//! incumbent, so a time-limited run always has a solution to return.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use super::{
    choice_cost, extract_greedy_instance, ExtractError, ExtractionInstance, InstanceChoice,
};

#[derive(Debug, Clone, PartialEq)]
pub struct IlpOutcome<T> {
    pub value: T,
    /// False when a time limit stopped the search; `value` is then the best
    /// incumbent rather than a proven optimum.
    pub proven_optimal: bool,
}

struct Search<'a> {
    inst: &'a ExtractionInstance,
    /// Node indices per class, sorted cheapest-first then by index.
    candidates: Vec<Vec<usize>>,
    min_cost: Vec<f64>,
    choice: Vec<Option<usize>>,
    need_count: Vec<u32>,
    agenda: BTreeSet<usize>,
    agenda_min_sum: f64,
    cost: f64,
    count: usize,
    incumbent: Incumbent,
    deadline: Option<Instant>,
    steps: u64,
    aborted: bool,
}

struct Incumbent {
    cost: f64,
    count: usize,
    choice: InstanceChoice,
}

pub fn solve_bb(
    inst: &ExtractionInstance,
    time_limit: Option<Duration>,
) -> Result<IlpOutcome<InstanceChoice>, ExtractError> {
    // Greedy seed; its failure proves infeasibility (a root has no finite
    // tree-cost derivation, so no acyclic selection can realize it).
    let seed = extract_greedy_instance(inst)?;
    let seed_cost = choice_cost(inst, &seed);
    let seed_count = seed.len();

    let n = inst.classes.len();
    let candidates = inst
        .classes
        .iter()
        .map(|nodes| {
            let mut idx: Vec<usize> = (0..nodes.len()).collect();
            idx.sort_by(|&a, &b| {
                nodes[a]
                    .cost
                    .partial_cmp(&nodes[b].cost)
                    .expect("finite costs")
                    .then(a.cmp(&b))
            });
            idx
        })
        .collect();
    let min_cost = inst
        .classes
        .iter()
        .map(|nodes| {
            nodes
                .iter()
                .map(|n| n.cost)
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let mut search = Search {
        inst,
        candidates,
        min_cost,
        choice: vec![None; n],
        need_count: vec![0; n],
        agenda: BTreeSet::new(),
        agenda_min_sum: 0.0,
        cost: 0.0,
        count: 0,
        incumbent: Incumbent {
            cost: seed_cost,
            count: seed_count,
            choice: seed,
        },
        deadline: time_limit.map(|d| Instant::now() + d),
        steps: 0,
        aborted: false,
    };
    for &r in &inst.roots {
        search.need(r);
    }
    search.dfs();

    Ok(IlpOutcome {
        value: search.incumbent.choice,
        proven_optimal: !search.aborted,
    })
}

impl Search<'_> {
    fn need(&mut self, class: usize) {
        self.need_count[class] += 1;
        if self.need_count[class] == 1 && self.choice[class].is_none() {
            self.agenda.insert(class);
            self.agenda_min_sum += self.min_cost[class];
        }
    }

    fn unneed(&mut self, class: usize) {
        self.need_count[class] -= 1;
        if self.need_count[class] == 0 && self.agenda.remove(&class) {
            self.agenda_min_sum -= self.min_cost[class];
        }
    }

    /// Would selecting a node with these children close a cycle through the
    /// chosen-node graph back to `class`?
    fn creates_cycle(&self, class: usize, children: &[usize]) -> bool {
        let mut stack: Vec<usize> = children.to_vec();
        let mut visited = vec![false; self.inst.classes.len()];
        while let Some(c) = stack.pop() {
            if c == class {
                return true;
            }
            if visited[c] {
                continue;
            }
            visited[c] = true;
            if let Some(ni) = self.choice[c] {
                stack.extend(self.inst.classes[c][ni].children.iter().copied());
            }
        }
        false
    }

    fn out_of_time(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        self.steps += 1;
        if self.steps % 4096 == 0 {
            if let Some(deadline) = self.deadline {
                if Instant::now() >= deadline {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    /// Can (cost, count) no longer strictly beat the incumbent? Equality
    /// prunes: the incumbent was found earlier in the deterministic search
    /// order and keeps the tie.
    fn beaten(&self, cost: f64, count: usize) -> bool {
        cost > self.incumbent.cost
            || (cost == self.incumbent.cost && count >= self.incumbent.count)
    }

    fn dfs(&mut self) {
        if self.out_of_time() {
            return;
        }
        let Some(&class) = self.agenda.first() else {
            self.offer_complete();
            return;
        };
        // Branch on the smallest needed class; remove it from the agenda for
        // the duration (its children bookkeeping handles re-insertion).
        self.agenda.remove(&class);
        self.agenda_min_sum -= self.min_cost[class];

        for i in 0..self.candidates[class].len() {
            let ni = self.candidates[class][i];
            let node = &self.inst.classes[class][ni];
            let node_cost = node.cost;
            let children = node.children.clone();
            if self.creates_cycle(class, &children) {
                continue;
            }
            self.choice[class] = Some(ni);
            self.cost += node_cost;
            self.count += 1;
            for &ch in &children {
                self.need(ch);
            }
            let bound_cost = self.cost + self.agenda_min_sum;
            let bound_count = self.count + self.agenda.len();
            if !self.beaten(bound_cost, bound_count) {
                self.dfs();
            }
            for &ch in children.iter().rev() {
                self.unneed(ch);
            }
            self.cost -= node_cost;
            self.count -= 1;
            self.choice[class] = None;
            if self.aborted {
                break;
            }
        }

        self.agenda.insert(class);
        self.agenda_min_sum += self.min_cost[class];
    }

    fn offer_complete(&mut self) {
        let better = self.cost < self.incumbent.cost
            || (self.cost == self.incumbent.cost && self.count < self.incumbent.count);
        if better {
            self.incumbent = Incumbent {
                cost: self.cost,
                count: self.count,
                choice: self
                    .choice
                    .iter()
                    .enumerate()
                    .filter(|(c, n)| n.is_some() && self.need_count[*c] > 0)
                    .map(|(c, n)| (c, n.unwrap()))
                    .collect(),
            };
        }
    }
}
