//! Lossless conversion between netlists and the term language.
//!
//! `to_terms` turns a feed-forward netlist into a single `outputs` term whose
//! children are the output port bits in port order; fan-out becomes shared
//! subterms. `from_terms` inverts it, deduplicating identical subterms into
//! one cell each. `from_terms_like` additionally rebinds the result to an
//! existing module's port signature, which is how the rewrite passes keep
//! port names and widths stable.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::term::{builtin_lib_arity, Op, Term};

use super::{
    Assign, Cell, CellKind, Direction, Driver, NetBit, Netlist, NetlistError, NetlistBuilder,
    Port,
};

/// Convert a feed-forward netlist to its term form.
///
/// Any cycle, even one passing through registers, is rejected.
pub fn to_terms(nl: &Netlist) -> Result<Term, NetlistError> {
    let drivers = nl.driver_map()?;
    let mut memo: HashMap<NetBit, Term> = HashMap::new();
    let mut in_progress: HashSet<NetBit> = HashSet::new();

    fn bit_term(
        nl: &Netlist,
        drivers: &HashMap<NetBit, Driver>,
        bit: &NetBit,
        memo: &mut HashMap<NetBit, Term>,
        in_progress: &mut HashSet<NetBit>,
    ) -> Result<Term, NetlistError> {
        if let Some(t) = memo.get(bit) {
            return Ok(t.clone());
        }
        if !in_progress.insert(bit.clone()) {
            let name = match drivers.get(bit) {
                Some(Driver::CellPin(ci, _)) => nl.cells[*ci].instance.clone(),
                _ => bit.to_string(),
            };
            return Err(NetlistError::CyclicNetlist(name));
        }
        let term = match drivers.get(bit) {
            Some(Driver::InputPort(port)) => Term::input(port, bit.bit),
            Some(Driver::Assign(ai)) => {
                let src = nl.assigns[*ai].source.clone();
                bit_term(nl, drivers, &src, memo, in_progress)?
            }
            Some(Driver::CellPin(ci, pin)) => {
                let cell = &nl.cells[*ci];
                let mut children = Vec::new();
                for in_pin in cell.input_pins() {
                    let src = cell.pins[&in_pin].clone();
                    children.push(bit_term(nl, drivers, &src, memo, in_progress)?);
                }
                match &cell.kind {
                    CellKind::Gate(g) => Term::new(Op::Gate(*g), children),
                    CellKind::HalfAdder | CellKind::FullAdder | CellKind::Mux2 => {
                        let base = Term::new(Op::Lib(cell.kind.name()), children);
                        let k = cell
                            .output_pins()
                            .iter()
                            .position(|p| p == pin)
                            .expect("driver pin is an output pin");
                        Term::new(Op::Proj(k), vec![base])
                    }
                    CellKind::Learned(name) => {
                        let mut args = vec![Term::leaf(Op::Def(name.clone()))];
                        args.extend(children);
                        Term::new(Op::Apply, args)
                    }
                }
            }
            None => return Err(NetlistError::Undriven(bit.clone())),
        };
        in_progress.remove(bit);
        memo.insert(bit.clone(), term.clone());
        Ok(term)
    }

    let mut outputs = Vec::new();
    for bit in nl.output_bits() {
        outputs.push(bit_term(nl, &drivers, &bit, &mut memo, &mut in_progress)?);
    }
    Ok(Term::new(Op::Outputs, outputs))
}

/// Reconstruct a netlist from an `outputs` term, inventing generic port
/// names: inputs take their names from the `input:<port>:<bit>` leaves,
/// outputs become one-bit ports `o0`, `o1`, …
pub fn from_terms(term: &Term) -> Result<Netlist, NetlistError> {
    if *term.op() != Op::Outputs {
        return Err(NetlistError::BadTerm(format!(
            "expected an `outputs` root, got `{}`",
            term.op()
        )));
    }
    // Input port widths from the leaves.
    let mut inputs: BTreeMap<String, u32> = BTreeMap::new();
    collect_inputs(term, &mut inputs, &mut HashSet::new());

    let mut ports: Vec<Port> = inputs
        .iter()
        .map(|(name, &width)| Port {
            name: name.clone(),
            direction: Direction::Input,
            width,
        })
        .collect();
    let mut used: HashSet<String> = inputs.keys().cloned().collect();
    let mut out_names = Vec::new();
    for k in 0..term.children().len() {
        let mut name = format!("o{k}");
        while used.contains(&name) {
            name.push('_');
        }
        used.insert(name.clone());
        ports.push(Port {
            name: name.clone(),
            direction: Direction::Output,
            width: 1,
        });
        out_names.push(NetBit::new(name, 0));
    }
    build_netlist("from_terms", ports, term, &out_names)
}

/// Reconstruct a netlist from an `outputs` term using `like`'s name and port
/// signature. The term must reference only `like`'s input bits and produce
/// exactly as many outputs as `like` has output bits (in port order).
pub fn from_terms_like(term: &Term, like: &Netlist) -> Result<Netlist, NetlistError> {
    if *term.op() != Op::Outputs {
        return Err(NetlistError::BadTerm(format!(
            "expected an `outputs` root, got `{}`",
            term.op()
        )));
    }
    let out_bits = like.output_bits();
    if out_bits.len() != term.children().len() {
        return Err(NetlistError::SignatureMismatch(format!(
            "term has {} outputs, module `{}` has {} output bits",
            term.children().len(),
            like.name,
            out_bits.len()
        )));
    }
    let mut inputs: BTreeMap<String, u32> = BTreeMap::new();
    collect_inputs(term, &mut inputs, &mut HashSet::new());
    for (port, width) in &inputs {
        match like.port(port) {
            Some(p) if p.direction == Direction::Input && p.width >= *width => {}
            _ => {
                return Err(NetlistError::SignatureMismatch(format!(
                    "term reads input `{port}` ({width} bits) not provided by module `{}`",
                    like.name
                )))
            }
        }
    }
    build_netlist(&like.name, like.ports.clone(), term, &out_bits)
}

fn collect_inputs(term: &Term, inputs: &mut BTreeMap<String, u32>, seen: &mut HashSet<Term>) {
    if !seen.insert(term.clone()) {
        return;
    }
    if let Op::Input(port, bit) = term.op() {
        let w = inputs.entry(port.clone()).or_insert(0);
        *w = (*w).max(bit + 1);
    }
    for c in term.children() {
        collect_inputs(c, inputs, seen);
    }
}

struct Builder {
    b: NetlistBuilder,
    memo: HashMap<Term, NetBit>,
}

impl Builder {
    fn term_bit(&mut self, term: &Term) -> Result<NetBit, NetlistError> {
        if let Some(bit) = self.memo.get(term) {
            return Ok(bit.clone());
        }
        let bit = match term.op() {
            Op::Input(port, bit) => NetBit::new(port.clone(), *bit),
            Op::Gate(g) => {
                let children = term
                    .children()
                    .iter()
                    .map(|c| self.term_bit(c))
                    .collect::<Result<Vec<_>, _>>()?;
                self.b.gate(*g, &children)
            }
            Op::Proj(k) => {
                let [base] = term.children() else {
                    return Err(arity("proj", 1, term.children().len()));
                };
                let Op::Lib(name) = base.op() else {
                    return Err(NetlistError::BadTerm(format!(
                        "proj{k} applies to a library component, got `{}`",
                        base.op()
                    )));
                };
                let (_, n_outputs) = builtin_lib_arity(name)
                    .ok_or_else(|| NetlistError::UnknownOperator(name.clone()))?;
                if *k >= n_outputs {
                    return Err(NetlistError::BadTerm(format!(
                        "proj{k} out of range for `{name}` ({n_outputs} outputs)"
                    )));
                }
                let outs = self.lib_cell(base)?;
                outs[*k].clone()
            }
            Op::Apply => {
                let (def, args) = term
                    .children()
                    .split_first()
                    .ok_or_else(|| arity("apply", 1, 0))?;
                let Op::Def(name) = def.op() else {
                    return Err(NetlistError::BadTerm(
                        "first child of apply must be a (def <name>) reference".to_string(),
                    ));
                };
                let arg_bits = args
                    .iter()
                    .map(|c| self.term_bit(c))
                    .collect::<Result<Vec<_>, _>>()?;
                let out = self.fresh();
                let mut pins: Vec<(String, NetBit)> = arg_bits
                    .into_iter()
                    .enumerate()
                    .map(|(i, b)| (format!("I{i}"), b))
                    .collect();
                pins.push(("Y".to_string(), out.clone()));
                self.push_cell(CellKind::Learned(name.clone()), pins);
                out
            }
            Op::Lib(name) => {
                return Err(NetlistError::BadTerm(format!(
                    "component `{name}` must be selected with proj<k>"
                )))
            }
            Op::Def(name) => {
                return Err(NetlistError::BadTerm(format!(
                    "definition reference `{name}` outside apply"
                )))
            }
            Op::Outputs => {
                return Err(NetlistError::BadTerm("nested outputs term".to_string()))
            }
        };
        self.memo.insert(term.clone(), bit.clone());
        Ok(bit)
    }

    /// Materialize a library component cell once per distinct base term,
    /// returning all of its output bits.
    fn lib_cell(&mut self, base: &Term) -> Result<Vec<NetBit>, NetlistError> {
        if let Some(first) = self.memo.get(base) {
            // Stored as the first output; remaining outputs live right after
            // it on consecutive fresh nets created together (see below).
            let cell = self
                .b
                .cells
                .iter()
                .find(|c| c.pins.values().any(|b| b == first))
                .expect("memoized lib cell exists");
            return Ok(cell
                .output_pins()
                .iter()
                .map(|p| cell.pins[p].clone())
                .collect());
        }
        let Op::Lib(name) = base.op() else {
            unreachable!("caller checked")
        };
        let kind = CellKind::from_name(name)?;
        let (n_inputs, _) = builtin_lib_arity(name).expect("builtin component");
        if base.children().len() != n_inputs {
            return Err(arity(name, n_inputs, base.children().len()));
        }
        let in_bits = base
            .children()
            .iter()
            .map(|c| self.term_bit(c))
            .collect::<Result<Vec<_>, _>>()?;
        let mut pins: Vec<(String, NetBit)> = kind
            .input_pins(0)
            .into_iter()
            .zip(in_bits)
            .collect();
        let mut outs = Vec::new();
        for pin in kind.output_pins() {
            let bit = self.fresh();
            outs.push(bit.clone());
            pins.push((pin, bit));
        }
        self.push_cell(kind, pins);
        self.memo.insert(base.clone(), outs[0].clone());
        Ok(outs)
    }

    fn fresh(&mut self) -> NetBit {
        // Reuse the builder's fresh-net logic.
        let mut nets = std::mem::take(&mut self.b.nets);
        loop {
            let name = format!("_n{}", self.b.fresh);
            self.b.fresh += 1;
            if !nets.contains_key(&name) {
                nets.insert(name.clone(), 1);
                self.b.nets = nets;
                return NetBit::new(name, 0);
            }
        }
    }

    fn push_cell(&mut self, kind: CellKind, pins: Vec<(String, NetBit)>) {
        let instance = format!("_c{}", self.b.cells.len());
        self.b.cells.push(Cell {
            instance,
            kind,
            pins: pins.into_iter().collect(),
        });
    }
}

fn build_netlist(
    name: &str,
    ports: Vec<Port>,
    term: &Term,
    out_bits: &[NetBit],
) -> Result<Netlist, NetlistError> {
    let mut b = NetlistBuilder::new(name);
    for p in &ports {
        b.net(&p.name, p.width);
    }
    b.ports = ports;
    let mut builder = Builder {
        b,
        memo: HashMap::new(),
    };
    for (child, out) in term.children().iter().zip(out_bits) {
        let bit = builder.term_bit(child)?;
        builder.b.assigns.push(Assign {
            sink: out.clone(),
            source: bit,
        });
    }
    builder.b.finish()
}

fn arity(op: &str, expected: usize, got: usize) -> NetlistError {
    NetlistError::OperatorArity {
        op: op.to_string(),
        expected,
        got,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, Gate};

    fn reg_after_and() -> Netlist {
        let mut b = NetlistBuilder::new("pipe");
        let a = b.input("a", 1);
        let c = b.input("b", 1);
        b.output("y", 1);
        let n = b.gate(Gate::And, &[a, c]);
        let q = b.gate(Gate::Reg, &[n]);
        b.connect_output("y", 0, q);
        b.finish().unwrap()
    }

    #[test]
    fn reg_after_and_term_shape() {
        let t = to_terms(&reg_after_and()).unwrap();
        assert_eq!(t.to_string(), "(outputs (REG (AND input:a:0 input:b:0)))");
    }

    #[test]
    fn wire_through_module() {
        let mut b = NetlistBuilder::new("wire");
        b.input("a", 1);
        b.output("y", 1);
        b.connect_output("y", 0, NetBit::new("a", 0));
        let nl = b.finish().unwrap();
        assert_eq!(nl.cells.len(), 0);
        assert_eq!(to_terms(&nl).unwrap().to_string(), "(outputs input:a:0)");
    }

    #[test]
    fn feedback_is_rejected() {
        let mut b = NetlistBuilder::new("latch");
        let a = b.input("a", 1);
        b.output("y", 1);
        b.net("x", 1);
        b.net("q", 1);
        b.cell(
            CellKind::Gate(Gate::And),
            vec![
                ("A", a),
                ("B", NetBit::new("q", 0)),
                ("Y", NetBit::new("x", 0)),
            ],
        );
        b.cell(
            CellKind::Gate(Gate::Reg),
            vec![("D", NetBit::new("x", 0)), ("Q", NetBit::new("q", 0))],
        );
        b.connect_output("y", 0, NetBit::new("q", 0));
        let nl = b.finish().unwrap();
        let err = to_terms(&nl).unwrap_err();
        assert!(matches!(err, NetlistError::CyclicNetlist(_)), "{err}");
    }

    #[test]
    fn half_adder_sharing_round_trip() {
        let t = parse_term("(outputs (proj0 (HalfAdder a b)) (proj1 (HalfAdder a b)))").unwrap();
        let nl = from_terms(&t).unwrap();
        assert_eq!(nl.cells.len(), 1, "one shared HalfAdder cell");
        assert_eq!(nl.output_ports().count(), 2);
        assert_eq!(to_terms(&nl).unwrap(), t);
    }

    #[test]
    fn and_with_shared_input() {
        let t = parse_term("(outputs (AND a a))").unwrap();
        let nl = from_terms(&t).unwrap();
        assert_eq!(nl.cells.len(), 1);
        let cell = &nl.cells[0];
        assert_eq!(cell.pins["A"], cell.pins["B"]);
        assert_eq!(cell.pins["A"], NetBit::new("a", 0));
    }

    #[test]
    fn dedup_of_identical_subterms() {
        let t = parse_term("(outputs (XOR (AND a b) (AND a b)))").unwrap();
        let nl = from_terms(&t).unwrap();
        // One AND, one XOR.
        assert_eq!(nl.cells.len(), 2);
    }

    #[test]
    fn from_terms_like_keeps_signature() {
        let orig = reg_after_and();
        let t = to_terms(&orig).unwrap();
        let back = from_terms_like(&t, &orig).unwrap();
        assert_eq!(back.port_signature(), orig.port_signature());
        assert_eq!(back.name, orig.name);
        assert_eq!(to_terms(&back).unwrap(), t);
    }

    #[test]
    fn bad_proj_target_rejected() {
        let t = parse_term("(outputs (proj0 (AND a b)))").unwrap();
        assert!(matches!(
            from_terms(&t).unwrap_err(),
            NetlistError::BadTerm(_)
        ));
    }

    #[test]
    fn unknown_projection_index_rejected() {
        let t = parse_term("(outputs (proj2 (HalfAdder a b)))").unwrap();
        assert!(matches!(
            from_terms(&t).unwrap_err(),
            NetlistError::BadTerm(_)
        ));
    }
}
