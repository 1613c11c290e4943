//! Brute-force simulation and equivalence checking.
//!
//! The ground-truth referee for every pass. Simulation is three-valued:
//! registers come up `X` and latch their D input each cycle, and `X`
//! propagates through gates by the usual dominant-value rules. Equivalence
//! checking compares truth tables exhaustively up to a configurable input
//! width (default 12 bits) and falls back to fixed-seed random vectors
//! above it; sequential circuits are compared cycle by cycle after a
//! warm-up of `max path register count` cycles, and a mismatch is only ever
//! declared between two determinate values.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::egraph::Pattern;
use crate::identify::ComponentLibrary;
use crate::netlist::{CellKind, Driver, NetBit, Netlist, NetlistError};
use crate::term::{Gate, Op, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Value3 {
    Zero,
    One,
    X,
}

use Value3::{One, X, Zero};

impl Value3 {
    pub fn from_bool(b: bool) -> Value3 {
        if b {
            One
        } else {
            Zero
        }
    }

    pub fn is_determinate(self) -> bool {
        self != X
    }

    pub fn and(self, other: Value3) -> Value3 {
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (One, One) => One,
            _ => X,
        }
    }

    pub fn or(self, other: Value3) -> Value3 {
        match (self, other) {
            (One, _) | (_, One) => One,
            (Zero, Zero) => Zero,
            _ => X,
        }
    }

    pub fn xor(self, other: Value3) -> Value3 {
        match (self, other) {
            (X, _) | (_, X) => X,
            (a, b) => Value3::from_bool(a != b),
        }
    }

    pub fn not(self) -> Value3 {
        match self {
            Zero => One,
            One => Zero,
            X => X,
        }
    }

    /// `sel == 0` picks `a`, `sel == 1` picks `b`.
    pub fn mux(a: Value3, b: Value3, sel: Value3) -> Value3 {
        match sel {
            Zero => a,
            One => b,
            X => {
                if a == b {
                    a
                } else {
                    X
                }
            }
        }
    }
}

impl std::fmt::Display for Value3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = match self {
            Zero => '0',
            One => '1',
            X => 'x',
        };
        write!(f, "{c}")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("port signatures differ between `{0}` and `{1}`")]
    SignatureMismatch(String, String),
    #[error("stimulus does not assign input bit {0}")]
    MissingStimulus(NetBit),
    #[error("unknown library component `{0}`")]
    UnknownComponent(String),
    #[error("pattern variable `{0}` is unbound")]
    UnboundVariable(String),
    #[error("operator `{0}` cannot be evaluated combinationally")]
    UnsupportedOp(String),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Values for every input port bit of one cycle.
pub type InputAssignment = BTreeMap<NetBit, Value3>;

/// Positional output values of a combinational cell.
pub fn eval_cell(
    kind: &CellKind,
    inputs: &[Value3],
    lib: &ComponentLibrary,
) -> Result<Vec<Value3>, OracleError> {
    Ok(match kind {
        CellKind::Gate(Gate::And) => vec![inputs[0].and(inputs[1])],
        CellKind::Gate(Gate::Or) => vec![inputs[0].or(inputs[1])],
        CellKind::Gate(Gate::Xor) => vec![inputs[0].xor(inputs[1])],
        CellKind::Gate(Gate::Not) => vec![inputs[0].not()],
        CellKind::Gate(Gate::Mux) => vec![Value3::mux(inputs[0], inputs[1], inputs[2])],
        CellKind::Gate(Gate::Const0) => vec![Zero],
        CellKind::Gate(Gate::Const1) => vec![One],
        CellKind::Gate(Gate::Reg) => {
            return Err(OracleError::UnsupportedOp("REG".to_string()))
        }
        CellKind::HalfAdder => vec![inputs[0].xor(inputs[1]), inputs[0].and(inputs[1])],
        CellKind::FullAdder => {
            let (a, b, cin) = (inputs[0], inputs[1], inputs[2]);
            let ab = a.xor(b);
            vec![ab.xor(cin), a.and(b).or(cin.and(ab))]
        }
        CellKind::Mux2 => vec![Value3::mux(inputs[0], inputs[1], inputs[2])],
        CellKind::Learned(name) => {
            let comp = lib
                .get(name)
                .ok_or_else(|| OracleError::UnknownComponent(name.clone()))?;
            let env: BTreeMap<String, Value3> = comp
                .inputs
                .iter()
                .cloned()
                .zip(inputs.iter().copied())
                .collect();
            comp.outputs
                .iter()
                .map(|(_, p)| eval_pattern(p, &env, lib))
                .collect::<Result<Vec<_>, _>>()?
        }
    })
}

/// Evaluate a combinational pattern under a variable environment.
pub fn eval_pattern(
    p: &Pattern,
    env: &BTreeMap<String, Value3>,
    lib: &ComponentLibrary,
) -> Result<Value3, OracleError> {
    match p {
        Pattern::Var(v) => env
            .get(v)
            .copied()
            .ok_or_else(|| OracleError::UnboundVariable(v.clone())),
        Pattern::App(op, children) => eval_op(op, children, env, lib),
    }
}

fn eval_gate(g: Gate, vals: &[Value3]) -> Result<Value3, OracleError> {
    Ok(match g {
        Gate::And => vals[0].and(vals[1]),
        Gate::Or => vals[0].or(vals[1]),
        Gate::Xor => vals[0].xor(vals[1]),
        Gate::Not => vals[0].not(),
        Gate::Mux => Value3::mux(vals[0], vals[1], vals[2]),
        Gate::Const0 => Zero,
        Gate::Const1 => One,
        Gate::Reg => return Err(OracleError::UnsupportedOp("REG".to_string())),
    })
}

fn eval_op(
    op: &Op,
    children: &[Pattern],
    env: &BTreeMap<String, Value3>,
    lib: &ComponentLibrary,
) -> Result<Value3, OracleError> {
    match op {
        Op::Gate(g) => {
            let vals = children
                .iter()
                .map(|c| eval_pattern(c, env, lib))
                .collect::<Result<Vec<_>, _>>()?;
            eval_gate(*g, &vals)
        }
        Op::Proj(k) => {
            // (proj<k> (Component args…)): evaluate the component output k.
            let [Pattern::App(Op::Lib(name), args)] = children else {
                return Err(OracleError::UnsupportedOp(op.to_string()));
            };
            let arg_vals = args
                .iter()
                .map(|c| eval_pattern(c, env, lib))
                .collect::<Result<Vec<_>, _>>()?;
            let kind = CellKind::from_name(name).map_err(OracleError::Netlist)?;
            let outs = eval_cell(&kind, &arg_vals, lib)?;
            outs.get(*k)
                .copied()
                .ok_or_else(|| OracleError::UnsupportedOp(format!("proj{k} of {name}")))
        }
        Op::Apply => {
            let [Pattern::App(Op::Def(name), _), args @ ..] = children else {
                return Err(OracleError::UnsupportedOp("apply".to_string()));
            };
            let arg_vals = args
                .iter()
                .map(|c| eval_pattern(c, env, lib))
                .collect::<Result<Vec<_>, _>>()?;
            let outs = eval_cell(&CellKind::Learned(name.clone()), &arg_vals, lib)?;
            Ok(outs[0])
        }
        other => Err(OracleError::UnsupportedOp(other.to_string())),
    }
}

/// Evaluate a combinational term; leaves read from the input assignment.
pub fn eval_term(
    t: &Term,
    inputs: &InputAssignment,
    lib: &ComponentLibrary,
) -> Result<Value3, OracleError> {
    let mut memo = HashMap::new();
    eval_term_memo(t, inputs, lib, &mut memo)
}

fn eval_term_memo(
    t: &Term,
    inputs: &InputAssignment,
    lib: &ComponentLibrary,
    memo: &mut HashMap<Term, Value3>,
) -> Result<Value3, OracleError> {
    if let Some(&v) = memo.get(t) {
        return Ok(v);
    }
    let v = match t.op() {
        Op::Input(port, bit) => {
            let key = NetBit::new(port.clone(), *bit);
            inputs
                .get(&key)
                .copied()
                .ok_or(OracleError::MissingStimulus(key))?
        }
        Op::Gate(g) => {
            let vals = t
                .children()
                .iter()
                .map(|c| eval_term_memo(c, inputs, lib, memo))
                .collect::<Result<Vec<_>, _>>()?;
            eval_gate(*g, &vals)?
        }
        Op::Proj(k) => {
            let base = &t.children()[0];
            let Op::Lib(name) = base.op() else {
                return Err(OracleError::UnsupportedOp(t.op().to_string()));
            };
            let args = base
                .children()
                .iter()
                .map(|c| eval_term_memo(c, inputs, lib, memo))
                .collect::<Result<Vec<_>, _>>()?;
            let kind = CellKind::from_name(name).map_err(OracleError::Netlist)?;
            let outs = eval_cell(&kind, &args, lib)?;
            outs.get(*k)
                .copied()
                .ok_or_else(|| OracleError::UnsupportedOp(format!("proj{k} of {name}")))?
        }
        Op::Apply => {
            let (def, args) = t
                .children()
                .split_first()
                .ok_or_else(|| OracleError::UnsupportedOp("apply".to_string()))?;
            let Op::Def(name) = def.op() else {
                return Err(OracleError::UnsupportedOp("apply".to_string()));
            };
            let vals = args
                .iter()
                .map(|c| eval_term_memo(c, inputs, lib, memo))
                .collect::<Result<Vec<_>, _>>()?;
            eval_cell(&CellKind::Learned(name.clone()), &vals, lib)?[0]
        }
        other => return Err(OracleError::UnsupportedOp(other.to_string())),
    };
    memo.insert(t.clone(), v);
    Ok(v)
}

/// Per-cycle values of every output port bit.
pub type CycleOutputs = BTreeMap<NetBit, Value3>;

/// Simulate `stimulus.len()` cycles. Registers start at `X` and latch their
/// D pin at each cycle boundary; combinational logic is evaluated in
/// topological order within the cycle.
pub fn simulate(
    nl: &Netlist,
    stimulus: &[InputAssignment],
    lib: &ComponentLibrary,
) -> Result<Vec<CycleOutputs>, OracleError> {
    let drivers = nl.driver_map()?;
    let order = nl.comb_topo_order()?;
    let input_bits = nl.input_bits();

    // Register state, keyed by Q bit.
    let mut state: HashMap<NetBit, Value3> = HashMap::new();
    for cell in &nl.cells {
        if cell.kind.is_register() {
            state.insert(cell.pins["Q"].clone(), X);
        }
    }

    let mut results = Vec::with_capacity(stimulus.len());
    for cycle_inputs in stimulus {
        for bit in &input_bits {
            if !cycle_inputs.contains_key(bit) {
                return Err(OracleError::MissingStimulus(bit.clone()));
            }
        }
        let mut values: HashMap<NetBit, Value3> = HashMap::new();
        for (bit, &v) in cycle_inputs {
            values.insert(bit.clone(), v);
        }
        for (bit, &v) in &state {
            values.insert(bit.clone(), v);
        }

        fn resolve(
            nl: &Netlist,
            drivers: &HashMap<NetBit, Driver>,
            values: &HashMap<NetBit, Value3>,
            bit: &NetBit,
        ) -> Value3 {
            let mut bit = bit.clone();
            loop {
                if let Some(&v) = values.get(&bit) {
                    return v;
                }
                match drivers.get(&bit) {
                    Some(Driver::Assign(ai)) => bit = nl.assigns[*ai].source.clone(),
                    _ => return X,
                }
            }
        }

        for &ci in &order {
            let cell = &nl.cells[ci];
            if cell.kind.is_register() {
                continue;
            }
            let ins: Vec<Value3> = cell
                .input_pins()
                .iter()
                .map(|p| resolve(nl, &drivers, &values, &cell.pins[p]))
                .collect();
            let outs = eval_cell(&cell.kind, &ins, lib)?;
            for (pin, v) in cell.output_pins().iter().zip(outs) {
                values.insert(cell.pins[pin].clone(), v);
            }
        }

        let mut outputs = CycleOutputs::new();
        for bit in nl.output_bits() {
            outputs.insert(bit.clone(), resolve(nl, &drivers, &values, &bit));
        }
        results.push(outputs);

        let mut next = HashMap::new();
        for cell in &nl.cells {
            if cell.kind.is_register() {
                let d = resolve(nl, &drivers, &values, &cell.pins["D"]);
                next.insert(cell.pins["Q"].clone(), d);
            }
        }
        state = next;
    }
    Ok(results)
}

/// Maximum number of registers on any source-to-output path; the sequential
/// warm-up length. Falls back to the total register count when the register
/// graph is cyclic.
pub fn max_path_registers(nl: &Netlist) -> usize {
    let Ok(drivers) = nl.driver_map() else {
        return nl.register_count();
    };
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Busy,
        Done(usize),
    }
    let mut marks: HashMap<NetBit, Mark> = HashMap::new();

    fn depth(
        nl: &Netlist,
        drivers: &HashMap<NetBit, Driver>,
        marks: &mut HashMap<NetBit, Mark>,
        bit: &NetBit,
    ) -> Option<usize> {
        match marks.get(bit) {
            Some(Mark::Done(d)) => return Some(*d),
            Some(Mark::Busy) => return None,
            _ => {}
        }
        marks.insert(bit.clone(), Mark::Busy);
        let d = match drivers.get(bit) {
            Some(Driver::InputPort(_)) | None => 0,
            Some(Driver::Assign(ai)) => {
                let src = nl.assigns[*ai].source.clone();
                depth(nl, drivers, marks, &src)?
            }
            Some(Driver::CellPin(ci, _)) => {
                let cell = &nl.cells[*ci];
                let base = cell
                    .input_pins()
                    .iter()
                    .map(|p| depth(nl, drivers, marks, &cell.pins[p]))
                    .collect::<Option<Vec<_>>>()?
                    .into_iter()
                    .max()
                    .unwrap_or(0);
                base + usize::from(cell.kind.is_register())
            }
        };
        marks.insert(bit.clone(), Mark::Done(d));
        Some(d)
    }

    let mut max = 0;
    for bit in nl.output_bits() {
        match depth(nl, &drivers, &mut marks, &bit) {
            Some(d) => max = max.max(d),
            None => return nl.register_count(),
        }
    }
    max
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coverage {
    Exhaustive,
    Sampled { vectors: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub stimulus: Vec<Vec<(String, u32, Value3)>>,
    pub cycle: usize,
    pub output: (String, u32),
    pub left: Value3,
    pub right: Value3,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub equivalent: bool,
    pub counterexample: Option<Counterexample>,
    pub coverage: Coverage,
    pub warmup: usize,
    pub cycles: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivConfig {
    /// Exhaustive truth tables up to this many total input bits.
    pub max_exhaustive_bits: u32,
    /// Random vectors (or sequences) above the exhaustive cap.
    pub samples: usize,
    pub seed: u64,
    /// Compared cycles after warm-up in the sequential check.
    pub extra_cycles: usize,
}

impl Default for EquivConfig {
    fn default() -> Self {
        EquivConfig {
            max_exhaustive_bits: 12,
            samples: 256,
            seed: 0xEDA1,
            extra_cycles: 16,
        }
    }
}

fn assignment_from_index(bits: &[NetBit], index: u64) -> InputAssignment {
    bits.iter()
        .enumerate()
        .map(|(k, b)| (b.clone(), Value3::from_bool((index >> k) & 1 == 1)))
        .collect()
}

fn random_assignment(bits: &[NetBit], rng: &mut ChaCha8Rng) -> InputAssignment {
    bits.iter()
        .map(|b| (b.clone(), Value3::from_bool(rng.gen_bool(0.5))))
        .collect()
}

fn counterexample(
    stimulus: &[InputAssignment],
    cycle: usize,
    output: &NetBit,
    left: Value3,
    right: Value3,
) -> Counterexample {
    Counterexample {
        stimulus: stimulus
            .iter()
            .map(|a| {
                a.iter()
                    .map(|(b, &v)| (b.net.clone(), b.bit, v))
                    .collect()
            })
            .collect(),
        cycle,
        output: (output.net.clone(), output.bit),
        left,
        right,
    }
}

/// Compare two modules with identical port signatures.
///
/// Combinational circuits are compared on truth tables; circuits containing
/// registers are simulated for `warmup + extra_cycles` cycles under shared
/// stimulus and compared from the warm-up point on. A mismatch is only
/// declared between determinate values. The verdict is deterministic for a
/// given seed and symmetric in its arguments.
pub fn check_equiv(
    a: &Netlist,
    b: &Netlist,
    cfg: &EquivConfig,
    lib: &ComponentLibrary,
) -> Result<Verdict, OracleError> {
    if a.port_signature() != b.port_signature() {
        return Err(OracleError::SignatureMismatch(a.name.clone(), b.name.clone()));
    }
    // Shared stimulus order: sorted input bits, so the verdict does not
    // depend on argument order or port declaration order.
    let mut input_bits = a.input_bits();
    input_bits.sort();
    let n_bits = input_bits.len() as u32;
    let sequential = a.register_count() > 0 || b.register_count() > 0;

    let warmup = if sequential {
        max_path_registers(a).max(max_path_registers(b))
    } else {
        0
    };
    let cycles = warmup + if sequential { cfg.extra_cycles } else { 1 };

    // Each "vector" is a whole stimulus sequence.
    let (sequences, coverage) = if sequential {
        if n_bits <= 8 {
            let count = 1u64 << n_bits;
            let seqs = (0..count)
                .map(|k| {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k));
                    let mut seq = vec![assignment_from_index(&input_bits, k)];
                    for _ in 1..cycles {
                        seq.push(random_assignment(&input_bits, &mut rng));
                    }
                    seq
                })
                .collect::<Vec<_>>();
            (seqs, Coverage::Exhaustive)
        } else {
            let seqs = (0..cfg.samples as u64)
                .map(|k| {
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(k));
                    (0..cycles)
                        .map(|_| random_assignment(&input_bits, &mut rng))
                        .collect()
                })
                .collect::<Vec<_>>();
            (
                seqs,
                Coverage::Sampled {
                    vectors: cfg.samples,
                    seed: cfg.seed,
                },
            )
        }
    } else if n_bits <= cfg.max_exhaustive_bits {
        let seqs = (0..(1u64 << n_bits))
            .map(|k| vec![assignment_from_index(&input_bits, k)])
            .collect::<Vec<_>>();
        (seqs, Coverage::Exhaustive)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let seqs = (0..cfg.samples)
            .map(|_| vec![random_assignment(&input_bits, &mut rng)])
            .collect::<Vec<_>>();
        (
            seqs,
            Coverage::Sampled {
                vectors: cfg.samples,
                seed: cfg.seed,
            },
        )
    };

    for seq in &sequences {
        let out_a = simulate(a, seq, lib)?;
        let out_b = simulate(b, seq, lib)?;
        for cycle in warmup..seq.len() {
            for bit in a.output_bits() {
                let va = out_a[cycle][&bit];
                let vb = out_b[cycle][&bit];
                if va.is_determinate() && vb.is_determinate() && va != vb {
                    return Ok(Verdict {
                        equivalent: false,
                        counterexample: Some(counterexample(seq, cycle, &bit, va, vb)),
                        coverage,
                        warmup,
                        cycles,
                    });
                }
            }
        }
    }
    Ok(Verdict {
        equivalent: true,
        counterexample: None,
        coverage,
        warmup,
        cycles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{parse_sexpr, NetlistBuilder};

    fn lib() -> ComponentLibrary {
        ComponentLibrary::builtins()
    }

    fn xor_gate() -> Netlist {
        let mut b = NetlistBuilder::new("x");
        let a = b.input("a", 1);
        let c = b.input("b", 1);
        b.output("y", 1);
        let y = b.gate(Gate::Xor, &[a, c]);
        b.connect_output("y", 0, y);
        b.finish().unwrap()
    }

    fn assign(vals: &[(&str, Value3)]) -> InputAssignment {
        vals.iter()
            .map(|(n, v)| (NetBit::new(*n, 0), *v))
            .collect()
    }

    #[test]
    fn xor_truth_table() {
        let nl = xor_gate();
        let out = simulate(&nl, &[assign(&[("a", One), ("b", One)])], &lib()).unwrap();
        assert_eq!(out[0][&NetBit::new("y", 0)], Zero);
    }

    #[test]
    fn half_adder_cell_semantics() {
        let text = "(module ha\n  (ports (input a 1) (input b 1) (output s 1) (output c 1))\n  (nets (a 1) (b 1) (s 1) (c 1))\n  (cell HalfAdder h0 (A (bit a 0)) (B (bit b 0)) (S (bit s 0)) (C (bit c 0))))";
        let nl = parse_sexpr(text).unwrap();
        let out = simulate(&nl, &[assign(&[("a", One), ("b", One)])], &lib()).unwrap();
        assert_eq!(out[0][&NetBit::new("s", 0)], Zero);
        assert_eq!(out[0][&NetBit::new("c", 0)], One);
    }

    #[test]
    fn register_is_x_then_delays() {
        let mut b = NetlistBuilder::new("r");
        let a = b.input("a", 1);
        b.output("y", 1);
        let q = b.gate(Gate::Reg, &[a]);
        b.connect_output("y", 0, q);
        let nl = b.finish().unwrap();
        let stim = vec![
            assign(&[("a", One)]),
            assign(&[("a", Zero)]),
            assign(&[("a", One)]),
        ];
        let out = simulate(&nl, &stim, &lib()).unwrap();
        let y = NetBit::new("y", 0);
        assert_eq!(out[0][&y], X);
        assert_eq!(out[1][&y], One);
        assert_eq!(out[2][&y], Zero);
    }

    #[test]
    fn xor_identity_is_equivalent() {
        // XOR(a, b) == OR(AND(a, NOT b), AND(NOT a, b))
        let mut b = NetlistBuilder::new("x2");
        let a = b.input("a", 1);
        let c = b.input("b", 1);
        b.output("y", 1);
        let na = b.gate(Gate::Not, &[a.clone()]);
        let nc = b.gate(Gate::Not, &[c.clone()]);
        let l = b.gate(Gate::And, &[a, nc]);
        let r = b.gate(Gate::And, &[na, c]);
        let y = b.gate(Gate::Or, &[l, r]);
        b.connect_output("y", 0, y);
        let other = b.finish().unwrap();

        let v = check_equiv(&xor_gate(), &other, &EquivConfig::default(), &lib()).unwrap();
        assert!(v.equivalent);
        assert_eq!(v.coverage, Coverage::Exhaustive);
    }

    #[test]
    fn and_vs_or_counterexample_replays() {
        let mut b = NetlistBuilder::new("a");
        let a = b.input("a", 1);
        let c = b.input("b", 1);
        b.output("y", 1);
        let y = b.gate(Gate::And, &[a, c]);
        b.connect_output("y", 0, y);
        let and_nl = b.finish().unwrap();

        let mut b = NetlistBuilder::new("o");
        let a = b.input("a", 1);
        let c = b.input("b", 1);
        b.output("y", 1);
        let y = b.gate(Gate::Or, &[a, c]);
        b.connect_output("y", 0, y);
        let or_nl = b.finish().unwrap();

        let v = check_equiv(&and_nl, &or_nl, &EquivConfig::default(), &lib()).unwrap();
        assert!(!v.equivalent);
        let cex = v.counterexample.unwrap();
        // Replay.
        let stim: Vec<InputAssignment> = cex
            .stimulus
            .iter()
            .map(|cycle| {
                cycle
                    .iter()
                    .map(|(n, b, v)| (NetBit::new(n.clone(), *b), *v))
                    .collect()
            })
            .collect();
        let oa = simulate(&and_nl, &stim, &lib()).unwrap();
        let ob = simulate(&or_nl, &stim, &lib()).unwrap();
        let bit = NetBit::new(cex.output.0.clone(), cex.output.1);
        assert_eq!(oa[cex.cycle][&bit], cex.left);
        assert_eq!(ob[cex.cycle][&bit], cex.right);
        assert_ne!(cex.left, cex.right);
    }

    #[test]
    fn verdict_is_symmetric() {
        let x = xor_gate();
        let mut b = NetlistBuilder::new("x3");
        let a = b.input("a", 1);
        let c = b.input("b", 1);
        b.output("y", 1);
        let y = b.gate(Gate::Or, &[a, c]);
        b.connect_output("y", 0, y);
        let o = b.finish().unwrap();
        let cfg = EquivConfig::default();
        let v1 = check_equiv(&x, &o, &cfg, &lib()).unwrap();
        let v2 = check_equiv(&o, &x, &cfg, &lib()).unwrap();
        assert_eq!(v1.equivalent, v2.equivalent);
        assert_eq!(
            v1.counterexample.map(|c| (c.cycle, c.output)),
            v2.counterexample.map(|c| (c.cycle, c.output))
        );
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let x = xor_gate();
        let mut b = NetlistBuilder::new("w");
        b.input("a", 1);
        b.output("y", 1);
        b.connect_output("y", 0, NetBit::new("a", 0));
        let w = b.finish().unwrap();
        assert!(matches!(
            check_equiv(&x, &w, &EquivConfig::default(), &lib()),
            Err(OracleError::SignatureMismatch(..))
        ));
    }

    #[test]
    fn retimed_pair_equivalent_after_warmup() {
        // REG(AND(a, b)) vs AND(REG a, REG b).
        let mut b = NetlistBuilder::new("l");
        let a = b.input("a", 1);
        let c = b.input("b", 1);
        b.output("y", 1);
        let n = b.gate(Gate::And, &[a, c]);
        let q = b.gate(Gate::Reg, &[n]);
        b.connect_output("y", 0, q);
        let left = b.finish().unwrap();

        let mut b = NetlistBuilder::new("r");
        let a = b.input("a", 1);
        let c = b.input("b", 1);
        b.output("y", 1);
        let qa = b.gate(Gate::Reg, &[a]);
        let qb = b.gate(Gate::Reg, &[c]);
        let y = b.gate(Gate::And, &[qa, qb]);
        b.connect_output("y", 0, y);
        let right = b.finish().unwrap();

        let v = check_equiv(&left, &right, &EquivConfig::default(), &lib()).unwrap();
        assert!(v.equivalent);
        assert_eq!(v.warmup, 1);
    }

    #[test]
    fn max_path_registers_counts_depth() {
        let mut b = NetlistBuilder::new("d");
        let a = b.input("a", 1);
        b.output("y", 1);
        let q1 = b.gate(Gate::Reg, &[a]);
        let q2 = b.gate(Gate::Reg, &[q1]);
        b.connect_output("y", 0, q2);
        let nl = b.finish().unwrap();
        assert_eq!(max_path_registers(&nl), 2);
    }
}
