//! Acceptance suite: one test per release criterion, each printing a
//! `criterion N: PASS` line with its measurements. Run with
//! `cargo test --test acceptance -- --nocapture` to see them.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use common::*;
use rewire::egraph::{run, EGraph, RunLimits};
use rewire::extract::{
    extract_greedy_instance, solve_bb, choice_cost, CostModel, ExtractError,
};
use rewire::identify::{identify, IdentifyConfig};
use rewire::learn::{abstract_corpus, discover, inline_defs, LearnConfig};
use rewire::netlist::{to_terms, CellKind, Netlist, NetlistBuilder};
use rewire::oracle::{check_equiv, Coverage, EquivConfig};
use rewire::reroll::{reroll, unroll, RerollConfig};
use rewire::retime::{
    generate_retiming_rules, path_register_profile, retime_min_registers, source_retime,
    RetimeConfig,
};
use rewire::term::{Gate, Op, Term};

fn equiv_cfg() -> EquivConfig {
    EquivConfig::default()
}

fn assert_equivalent(a: &Netlist, b: &Netlist) {
    let v = check_equiv(a, b, &equiv_cfg(), &builtin_lib()).unwrap();
    assert!(
        v.equivalent,
        "{} vs {}: counterexample {:?}",
        a.name, b.name, v.counterexample
    );
}

/// The two-registers-before-a-gate circuit and its retimed form.
fn two_register_and() -> Netlist {
    let mut b = NetlistBuilder::new("two_regs");
    let a = b.input("a", 1);
    let c = b.input("b", 1);
    b.output("y", 1);
    let qa = b.gate(Gate::Reg, &[a]);
    let qb = b.gate(Gate::Reg, &[c]);
    let y = b.gate(Gate::And, &[qa, qb]);
    b.connect_output("y", 0, y);
    b.finish().unwrap()
}

#[test]
fn criterion_1_retiming_figure() {
    let start = Instant::now();
    let nl = two_register_and();
    let (out, report) = retime_min_registers(&nl, &RetimeConfig::default()).unwrap();
    assert_eq!(report.registers_before, 2);
    assert_eq!(report.registers_after, 1);
    let verdict = check_equiv(&nl, &out, &equiv_cfg(), &builtin_lib()).unwrap();
    assert!(verdict.equivalent);
    assert_eq!(verdict.warmup, 1);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("criterion 1: PASS (2 -> 1 registers, equivalent after warm-up 1, {elapsed:?})");
}

/// Criterion 2/3 corpus: 100 random pipelines whose saturated retiming
/// e-graphs admit the brute-force oracle within budget, plus the oracle's
/// minimum register count for each. Deterministic: seeds are consumed in
/// order and a case is skipped only when the oracle budget trips.
fn retime_corpus() -> &'static Vec<(Netlist, usize)> {
    static CORPUS: OnceLock<Vec<(Netlist, usize)>> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let mut corpus = Vec::new();
        let params = PipelineParams::default();
        let mut seed = 0u64;
        while corpus.len() < 100 {
            let nl = random_pipeline(seed, &params);
            seed += 1;
            let term = to_terms(&nl).unwrap();
            let mut g = EGraph::new();
            let root = g.add(&term).unwrap();
            let rules = generate_retiming_rules(&gate_kinds(&nl)).unwrap();
            run(&mut g, &rules, &RunLimits::default());
            let root = g.find(root);
            // Register count as pure cost: REG is 1, everything else free.
            let mut reg_cost = CostModel::uniform(0.0);
            reg_cost.set("REG", 1.0);
            let (inst, _) = rewire::extract::instance_from_egraph(&mut g, &[root], &reg_cost);
            match min_cost_by_selection_enumeration(&inst, 3_000_000) {
                Some(Some(min)) => corpus.push((nl, min as usize)),
                Some(None) => panic!("retiming e-graph should always be extractable"),
                None => {} // oracle budget exceeded; draw the next seed
            }
        }
        corpus
    })
}

#[test]
fn criterion_2_retiming_optimality() {
    let start = Instant::now();
    let corpus = retime_corpus();
    let mut checked = 0;
    for (nl, oracle_min) in corpus {
        let (_, report) = retime_min_registers(nl, &RetimeConfig::default()).unwrap();
        assert_eq!(
            report.registers_after, *oracle_min,
            "{}: ilp {} vs oracle {}",
            nl.name, report.registers_after, oracle_min
        );
        checked += 1;
    }
    let elapsed = start.elapsed();
    assert_eq!(checked, 100);
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!("criterion 2: PASS (100/100 pipelines at the brute-force minimum, {elapsed:?})");
}

#[test]
fn criterion_3_path_register_invariance() {
    let start = Instant::now();
    let corpus = retime_corpus();
    let mut violations = 0;
    for (nl, _) in corpus {
        let before = path_register_profile(nl).unwrap();
        let (min, _) = retime_min_registers(nl, &RetimeConfig::default()).unwrap();
        if path_register_profile(&min).unwrap() != before {
            violations += 1;
        }
        let (src, _) = source_retime(nl).unwrap();
        if path_register_profile(&src).unwrap() != before {
            violations += 1;
        }
    }
    assert_eq!(violations, 0);
    let elapsed = start.elapsed();
    println!(
        "criterion 3: PASS (path register profiles preserved by both passes on 100 pipelines, {elapsed:?})"
    );
}

fn half_adder_shuffle(seed: u64) -> Netlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetlistBuilder::new(format!("ha{seed}"));
    let i0 = b.input("i0", 1);
    let i1 = b.input("i1", 1);
    b.output("o0", 1);
    b.output("o1", 1);
    let mut pair = |rng: &mut ChaCha8Rng, x: &NetBitPair| -> Vec<rewire::netlist::NetBit> {
        if rng.gen_bool(0.5) {
            vec![x.0.clone(), x.1.clone()]
        } else {
            vec![x.1.clone(), x.0.clone()]
        }
    };
    type NetBitPair = (rewire::netlist::NetBit, rewire::netlist::NetBit);
    let inputs = (i0, i1);
    let xor_in = pair(&mut rng, &inputs);
    let and_in = pair(&mut rng, &inputs);
    let s = b.gate(Gate::Xor, &xor_in);
    let c = b.gate(Gate::And, &and_in);
    b.connect_output("o0", 0, s);
    b.connect_output("o1", 0, c);
    b.finish().unwrap()
}

#[test]
fn criterion_4_half_adder_identification() {
    let start = Instant::now();
    let lib = builtin_lib();
    let cfg = IdentifyConfig::default();
    for seed in 0..=16u64 {
        // Seed 0 is the unshuffled circuit; 1..=16 are random commutations.
        let nl = half_adder_shuffle(seed);
        let (out, _) = identify(&nl, &lib, &cfg).unwrap();
        let ha = out
            .cells
            .iter()
            .filter(|c| c.kind == CellKind::HalfAdder)
            .count();
        let gates = out
            .cells
            .iter()
            .filter(|c| matches!(c.kind, CellKind::Gate(_)))
            .count();
        assert_eq!(ha, 1, "seed {seed}: expected exactly one HalfAdder");
        assert_eq!(gates, 0, "seed {seed}: expected no raw gates");
        let v = check_equiv(&nl, &out, &equiv_cfg(), &lib).unwrap();
        assert!(v.equivalent);
        assert_eq!(v.coverage, Coverage::Exhaustive);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!("criterion 4: PASS (17/17 circuits identified as one HalfAdder, {elapsed:?})");
}

#[test]
fn criterion_5_ripple_carry_round_trip() {
    let start = Instant::now();
    let adder = ripple_adder_gates(8);
    let lib = builtin_lib();
    // The carry-in port makes every stage a textbook full adder, so no
    // half-adder variant appears at stage zero here.
    let cfg = IdentifyConfig {
        limits: RunLimits {
            max_iterations: 3,
            max_enodes: 20_000,
            ..RunLimits::default()
        },
        ..IdentifyConfig::default()
    };
    let (identified, _) = identify(&adder, &lib, &cfg).unwrap();
    let fa = identified
        .cells
        .iter()
        .filter(|c| c.kind == CellKind::FullAdder)
        .count();
    let gates = identified
        .cells
        .iter()
        .filter(|c| matches!(c.kind, CellKind::Gate(_)))
        .count();
    assert_eq!(fa, 8, "expected eight FullAdder cells");
    assert_eq!(gates, 0);

    let (form, report) = reroll(&identified, &RerollConfig::default()).unwrap();
    assert_eq!(report.loops, 1);
    assert!(form.loops[0].range >= 7, "range {}", form.loops[0].range);
    let back = unroll(&form).unwrap();

    // 17 input bits, exhaustive by explicit request.
    let cfg = EquivConfig {
        max_exhaustive_bits: 17,
        ..EquivConfig::default()
    };
    let v = check_equiv(&adder, &back, &cfg, &lib).unwrap();
    assert!(v.equivalent, "counterexample {:?}", v.counterexample);
    assert_eq!(v.coverage, Coverage::Exhaustive);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "criterion 5: PASS (8 FullAdders, loop of range {}, exhaustive over 2^17 rows, {elapsed:?})",
        form.loops[0].range
    );
}

#[test]
fn criterion_6_extraction_oracle() {
    let start = Instant::now();
    let mut agreed = 0;
    for seed in 0..200u64 {
        let inst = random_instance(seed, 16);
        let oracle = min_cost_by_subset_enumeration(&inst);
        let ilp = solve_bb(&inst, None);
        match (oracle, ilp) {
            (Some(best), Ok(outcome)) => {
                let cost = choice_cost(&inst, &outcome.value);
                assert!(
                    (cost - best).abs() < 1e-9,
                    "seed {seed}: ilp {cost} vs enumeration {best}"
                );
                if let Ok(greedy) = extract_greedy_instance(&inst) {
                    assert!(choice_cost(&inst, &greedy) >= cost - 1e-9, "seed {seed}");
                }
            }
            (None, Err(ExtractError::Infeasible(_))) => {}
            (oracle, ilp) => panic!("seed {seed}: oracle {oracle:?} vs ilp {ilp:?}"),
        }
        agreed += 1;
    }
    let elapsed = start.elapsed();
    assert_eq!(agreed, 200);
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("criterion 6: PASS (200/200 instances match subset enumeration, {elapsed:?})");
}

/// Naive congruence-closure reference: fixpoint over all subterm pairs.
struct ReferenceClosure {
    universe: Vec<Term>,
    class: Vec<usize>,
}

impl ReferenceClosure {
    fn new(universe: Vec<Term>) -> ReferenceClosure {
        let class = (0..universe.len()).collect();
        ReferenceClosure { universe, class }
    }

    fn index(&self, t: &Term) -> usize {
        self.universe.iter().position(|u| u == t).expect("in universe")
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ca, cb) = (self.class[a], self.class[b]);
        if ca == cb {
            return;
        }
        for c in self.class.iter_mut() {
            if *c == cb {
                *c = ca;
            }
        }
    }

    fn close(&mut self) {
        loop {
            let mut changed = false;
            for i in 0..self.universe.len() {
                for j in (i + 1)..self.universe.len() {
                    if self.class[i] == self.class[j] {
                        continue;
                    }
                    let (a, b) = (&self.universe[i], &self.universe[j]);
                    if a.op() != b.op() || a.children().len() != b.children().len() {
                        continue;
                    }
                    let congruent = a
                        .children()
                        .iter()
                        .zip(b.children())
                        .all(|(x, y)| self.class[self.index(x)] == self.class[self.index(y)]);
                    if congruent {
                        self.union(i, j);
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
}

fn random_terms(seed: u64) -> Vec<Term> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = ["a", "b", "c", "d"];
    fn gen(rng: &mut ChaCha8Rng, depth: usize, leaves: &[&str]) -> Term {
        if depth == 0 || rng.gen_bool(0.3) {
            return Term::input(leaves[rng.gen_range(0..leaves.len())], 0);
        }
        match rng.gen_range(0..4) {
            0 => Term::new(
                Op::Gate(Gate::And),
                vec![gen(rng, depth - 1, leaves), gen(rng, depth - 1, leaves)],
            ),
            1 => Term::new(
                Op::Gate(Gate::Or),
                vec![gen(rng, depth - 1, leaves), gen(rng, depth - 1, leaves)],
            ),
            2 => Term::new(
                Op::Gate(Gate::Xor),
                vec![gen(rng, depth - 1, leaves), gen(rng, depth - 1, leaves)],
            ),
            _ => Term::new(Op::Gate(Gate::Not), vec![gen(rng, depth - 1, leaves)]),
        }
    }
    let count = rng.gen_range(3..=6);
    (0..count).map(|_| gen(&mut rng, 3, &leaves)).collect()
}

fn subterm_universe(terms: &[Term]) -> Vec<Term> {
    let mut set: BTreeSet<Term> = BTreeSet::new();
    fn walk(t: &Term, set: &mut BTreeSet<Term>) {
        set.insert(t.clone());
        for c in t.children() {
            walk(c, set);
        }
    }
    for t in terms {
        walk(t, &mut set);
    }
    set.into_iter().collect()
}

#[test]
fn criterion_7_congruence_oracle() {
    let start = Instant::now();
    let mut checked = 0;
    let mut seed = 0u64;
    while checked < 200 {
        seed += 1;
        let terms = random_terms(seed);
        let universe = subterm_universe(&terms);
        if universe.len() > 40 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xDEAD);
        let n_merges = rng.gen_range(1..=5);
        let pairs: Vec<(usize, usize)> = (0..n_merges)
            .map(|_| {
                (
                    rng.gen_range(0..universe.len()),
                    rng.gen_range(0..universe.len()),
                )
            })
            .collect();

        let mut reference = ReferenceClosure::new(universe.clone());
        for &(a, b) in &pairs {
            reference.union(a, b);
        }
        reference.close();

        let mut g = EGraph::new();
        let ids: Vec<_> = universe.iter().map(|t| g.add(t).unwrap()).collect();
        for &(a, b) in &pairs {
            g.merge(ids[a], ids[b]);
        }
        g.rebuild();

        for i in 0..universe.len() {
            for j in 0..universe.len() {
                let engine = g.find(ids[i]) == g.find(ids[j]);
                let reference_eq = reference.class[i] == reference.class[j];
                assert_eq!(
                    engine, reference_eq,
                    "seed {seed}: `{}` vs `{}`",
                    universe[i], universe[j]
                );
            }
        }
        checked += 1;
    }
    let elapsed = start.elapsed();
    println!("criterion 7: PASS (200/200 closures match the naive fixpoint, {elapsed:?})");
}

fn learn_corpus() -> Vec<Netlist> {
    (0..4)
        .map(|i| {
            let mut b = NetlistBuilder::new(format!("m{i}"));
            let x = b.input(&format!("x{i}"), 1);
            let y = b.input(&format!("y{i}"), 1);
            let z = b.input(&format!("z{i}"), 1);
            b.output("o", 1);
            let n0 = b.gate(Gate::And, &[x, y]);
            let n1 = b.gate(Gate::Or, &[n0, z]);
            let n2 = b.gate(Gate::Not, &[n1]);
            b.connect_output("o", 0, n2);
            b.finish().unwrap()
        })
        .collect()
}

#[test]
fn criterion_8_library_learning_ground_truth() {
    let start = Instant::now();
    let corpus = learn_corpus();
    let ranked = discover(&corpus, &LearnConfig::default()).unwrap();
    let top = &ranked[0];
    assert_eq!(top.matches, 4);
    assert_eq!(top.score, 6);
    assert_eq!(top.body.op_count(), 3);

    let (rewritten, component) = abstract_corpus(&corpus, top).unwrap();
    let mut lib = builtin_lib();
    lib.register(component).unwrap();
    for (orig, new) in corpus.iter().zip(&rewritten) {
        let v = check_equiv(orig, new, &equiv_cfg(), &lib).unwrap();
        assert!(v.equivalent);
        let inlined = inline_defs(new, &lib).unwrap();
        let v = check_equiv(orig, &inlined, &equiv_cfg(), &lib).unwrap();
        assert!(v.equivalent);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "criterion 8: PASS (top abstraction: matches 4, score 6; abstract/inline equivalent, {elapsed:?})"
    );
}

#[test]
fn criterion_9_soundness_sweep() {
    let start = Instant::now();
    let lib = builtin_lib();
    let mut corpus: Vec<Netlist> = Vec::new();
    corpus.push(two_register_and());
    corpus.push(half_adder_shuffle(0));
    corpus.push(ripple_adder_gates(4));
    corpus.extend(learn_corpus());
    let params = PipelineParams::default();
    corpus.extend((0..15).map(|s| random_pipeline(1000 + s, &params)));

    let mut checks = 0;
    let mut inequivalent = 0;
    let mut verify = |input: &Netlist, output: &Netlist| {
        let v = check_equiv(input, output, &equiv_cfg(), &builtin_lib()).unwrap();
        checks += 1;
        if !v.equivalent {
            inequivalent += 1;
            eprintln!("inequivalent: {} vs {}", input.name, output.name);
        }
    };

    for nl in &corpus {
        let (retimed, _) = retime_min_registers(nl, &RetimeConfig::default()).unwrap();
        verify(nl, &retimed);
        let (sourced, _) = source_retime(nl).unwrap();
        verify(nl, &sourced);
        let (identified, _) = identify(nl, &lib, &IdentifyConfig::default()).unwrap();
        verify(nl, &identified);
        let (form, _) = reroll(nl, &RerollConfig::default()).unwrap();
        verify(nl, &unroll(&form).unwrap());
    }
    // Learned-abstraction outputs, against a library extended with the
    // emitted definition.
    let learn_in = learn_corpus();
    let ranked = discover(&learn_in, &LearnConfig::default()).unwrap();
    let (rewritten, component) = abstract_corpus(&learn_in, &ranked[0]).unwrap();
    let mut learn_lib = builtin_lib();
    learn_lib.register(component).unwrap();
    for (orig, new) in learn_in.iter().zip(&rewritten) {
        let v = check_equiv(orig, new, &equiv_cfg(), &learn_lib).unwrap();
        checks += 1;
        if !v.equivalent {
            inequivalent += 1;
        }
    }

    assert_eq!(inequivalent, 0, "{inequivalent} of {checks} checks failed");
    let elapsed = start.elapsed();
    println!("criterion 9: PASS ({checks} pass outputs equivalent to their inputs, {elapsed:?})");
}
