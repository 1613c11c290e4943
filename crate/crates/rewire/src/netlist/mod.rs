//! Gate-level netlist data model.
//!
//! A [`Netlist`] is a single module: ports, named multi-bit nets, cells and
//! bit-level assign aliases. Pins connect to individual net bits
//! ([`NetBit`]). The model is deliberately strict: every declared net bit
//! must have exactly one driver (an input port bit, one cell output pin, or
//! one assign sink), all references must land inside declared widths, and
//! combinational cycles are rejected. [`Netlist::validate`] checks all of it
//! and is run by every parser and pass in this crate.

mod json;
mod sexpr_fmt;
mod terms;

pub use json::{parse_design_json, parse_json, write_json};
pub use sexpr_fmt::{parse_sexpr, write_sexpr};
pub use terms::{from_terms, from_terms_like, to_terms};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::sexpr::SyntaxError;
use crate::term::{is_learned_name, Gate};

/// One bit of a named net.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetBit {
    pub net: String,
    pub bit: u32,
}

impl NetBit {
    pub fn new(net: impl Into<String>, bit: u32) -> NetBit {
        NetBit {
            net: net.into(),
            bit,
        }
    }
}

impl fmt::Display for NetBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.net, self.bit)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Input,
    Output,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Input => "input",
            Direction::Output => "output",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub direction: Direction,
    pub width: u32,
}

/// Cell kind: a primitive gate, a built-in library component, or a learned
/// module kind (name prefixed `def_`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellKind {
    Gate(Gate),
    HalfAdder,
    FullAdder,
    Mux2,
    Learned(String),
}

impl serde::Serialize for CellKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

impl CellKind {
    pub fn name(&self) -> String {
        match self {
            CellKind::Gate(g) => g.name().to_string(),
            CellKind::HalfAdder => "HalfAdder".to_string(),
            CellKind::FullAdder => "FullAdder".to_string(),
            CellKind::Mux2 => "Mux2".to_string(),
            CellKind::Learned(n) => n.clone(),
        }
    }

    pub fn from_name(name: &str) -> Result<CellKind, NetlistError> {
        if let Some(g) = Gate::from_name(name) {
            return Ok(CellKind::Gate(g));
        }
        match name {
            "HalfAdder" => Ok(CellKind::HalfAdder),
            "FullAdder" => Ok(CellKind::FullAdder),
            "Mux2" => Ok(CellKind::Mux2),
            _ if is_learned_name(name) => Ok(CellKind::Learned(name.to_string())),
            _ => Err(NetlistError::UnknownKind(name.to_string())),
        }
    }

    pub fn is_register(&self) -> bool {
        matches!(self, CellKind::Gate(Gate::Reg))
    }

    /// Input pin names in positional order. Learned kinds take the cell's
    /// arity from its pin set, so the caller passes it in.
    pub fn input_pins(&self, learned_arity: usize) -> Vec<String> {
        let fixed: &[&str] = match self {
            CellKind::Gate(Gate::And) | CellKind::Gate(Gate::Or) | CellKind::Gate(Gate::Xor) => {
                &["A", "B"]
            }
            CellKind::Gate(Gate::Not) => &["A"],
            CellKind::Gate(Gate::Mux) => &["A", "B", "S"],
            CellKind::Gate(Gate::Reg) => &["D"],
            CellKind::Gate(Gate::Const0) | CellKind::Gate(Gate::Const1) => &[],
            CellKind::HalfAdder => &["A", "B"],
            CellKind::FullAdder => &["A", "B", "Cin"],
            CellKind::Mux2 => &["A", "B", "S"],
            CellKind::Learned(_) => {
                return (0..learned_arity).map(|i| format!("I{i}")).collect()
            }
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }

    /// Output pin names in positional order.
    pub fn output_pins(&self) -> Vec<String> {
        let fixed: &[&str] = match self {
            CellKind::Gate(Gate::Reg) => &["Q"],
            CellKind::Gate(_) => &["Y"],
            CellKind::HalfAdder => &["S", "C"],
            CellKind::FullAdder => &["S", "Cout"],
            CellKind::Mux2 => &["Y"],
            CellKind::Learned(_) => &["Y"],
        };
        fixed.iter().map(|s| s.to_string()).collect()
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub instance: String,
    pub kind: CellKind,
    pub pins: BTreeMap<String, NetBit>,
}

impl Cell {
    /// Arity of a learned cell derived from its pin set (`I0..Im`, `Y`).
    pub fn learned_arity(&self) -> usize {
        self.pins.len().saturating_sub(1)
    }

    pub fn input_pins(&self) -> Vec<String> {
        self.kind.input_pins(self.learned_arity())
    }

    pub fn output_pins(&self) -> Vec<String> {
        self.kind.output_pins()
    }
}

/// A bit-level alias: `sink` is driven by `source`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assign {
    pub sink: NetBit,
    pub source: NetBit,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Netlist {
    pub name: String,
    pub ports: Vec<Port>,
    pub nets: BTreeMap<String, u32>,
    pub cells: Vec<Cell>,
    pub assigns: Vec<Assign>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("json error: {0}")]
    Json(String),
    #[error("unknown cell kind `{0}`")]
    UnknownKind(String),
    #[error("reference to undeclared net `{0}`")]
    UndeclaredNet(String),
    #[error("net bit {0} out of declared width")]
    BitOutOfRange(NetBit),
    #[error("multiple drivers on net bit {0}")]
    MultipleDrivers(NetBit),
    #[error("net bit {0} has no driver")]
    Undriven(NetBit),
    #[error("duplicate {what} `{name}`")]
    Duplicate { what: &'static str, name: String },
    #[error("port `{0}` has no net of the same name and width")]
    PortNetMismatch(String),
    #[error("cell `{cell}` ({kind}): {detail}")]
    BadPins {
        cell: String,
        kind: String,
        detail: String,
    },
    #[error("combinational cycle through cell `{0}`")]
    CombinationalCycle(String),
    #[error("cyclic netlist: cycle passes through cell `{0}`")]
    CyclicNetlist(String),
    #[error("unknown operator `{0}` in term")]
    UnknownOperator(String),
    #[error("operator `{op}`: expected {expected} children, got {got}")]
    OperatorArity {
        op: String,
        expected: usize,
        got: usize,
    },
    #[error("term error: {0}")]
    BadTerm(String),
    #[error("port signature mismatch: {0}")]
    SignatureMismatch(String),
}

/// What drives a net bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Driver {
    InputPort(String),
    /// (cell index, output pin name)
    CellPin(usize, String),
    /// index into `assigns`
    Assign(usize),
}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Netlist {
        Netlist {
            name: name.into(),
            ..Netlist::default()
        }
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    pub fn input_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports.iter().filter(|p| p.direction == Direction::Input)
    }

    pub fn output_ports(&self) -> impl Iterator<Item = &Port> {
        self.ports
            .iter()
            .filter(|p| p.direction == Direction::Output)
    }

    /// Input bits in port order, as (port, bit) pairs.
    pub fn input_bits(&self) -> Vec<NetBit> {
        self.input_ports()
            .flat_map(|p| (0..p.width).map(|b| NetBit::new(p.name.clone(), b)))
            .collect()
    }

    pub fn output_bits(&self) -> Vec<NetBit> {
        self.output_ports()
            .flat_map(|p| (0..p.width).map(|b| NetBit::new(p.name.clone(), b)))
            .collect()
    }

    pub fn register_count(&self) -> usize {
        self.cells.iter().filter(|c| c.kind.is_register()).count()
    }

    pub fn port_signature(&self) -> BTreeSet<(String, Direction, u32)> {
        self.ports
            .iter()
            .map(|p| (p.name.clone(), p.direction, p.width))
            .collect()
    }

    fn check_bit(&self, bit: &NetBit) -> Result<(), NetlistError> {
        match self.nets.get(&bit.net) {
            None => Err(NetlistError::UndeclaredNet(bit.net.clone())),
            Some(&w) if bit.bit >= w => Err(NetlistError::BitOutOfRange(bit.clone())),
            Some(_) => Ok(()),
        }
    }

    /// Map every declared net bit to its unique driver.
    ///
    /// Fails on multiple drivers, undriven bits, or dangling references.
    pub fn driver_map(&self) -> Result<HashMap<NetBit, Driver>, NetlistError> {
        let mut drivers: HashMap<NetBit, Driver> = HashMap::new();
        let mut claim = |bit: &NetBit, d: Driver| -> Result<(), NetlistError> {
            if drivers.insert(bit.clone(), d).is_some() {
                return Err(NetlistError::MultipleDrivers(bit.clone()));
            }
            Ok(())
        };
        for port in self.input_ports() {
            for b in 0..port.width {
                claim(
                    &NetBit::new(port.name.clone(), b),
                    Driver::InputPort(port.name.clone()),
                )?;
            }
        }
        for (ci, cell) in self.cells.iter().enumerate() {
            for pin in cell.output_pins() {
                let bit = cell.pins.get(&pin).ok_or_else(|| NetlistError::BadPins {
                    cell: cell.instance.clone(),
                    kind: cell.kind.name(),
                    detail: format!("missing output pin {pin}"),
                })?;
                claim(bit, Driver::CellPin(ci, pin))?;
            }
        }
        for (ai, assign) in self.assigns.iter().enumerate() {
            claim(&assign.sink, Driver::Assign(ai))?;
        }
        // Every declared bit must have landed a driver.
        for (net, &width) in &self.nets {
            for b in 0..width {
                let bit = NetBit::new(net.clone(), b);
                if !drivers.contains_key(&bit) {
                    return Err(NetlistError::Undriven(bit));
                }
            }
        }
        Ok(drivers)
    }

    /// Check every structural invariant. Returns the netlist unchanged so
    /// constructors can end with `netlist.validated()`.
    pub fn validate(&self) -> Result<(), NetlistError> {
        // Unique port and instance names; ports backed by same-name nets.
        let mut seen = BTreeSet::new();
        for p in &self.ports {
            if !seen.insert(&p.name) {
                return Err(NetlistError::Duplicate {
                    what: "port",
                    name: p.name.clone(),
                });
            }
            if self.nets.get(&p.name) != Some(&p.width) {
                return Err(NetlistError::PortNetMismatch(p.name.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for c in &self.cells {
            if !seen.insert(&c.instance) {
                return Err(NetlistError::Duplicate {
                    what: "cell instance",
                    name: c.instance.clone(),
                });
            }
        }
        // Pin signatures and bit ranges.
        for cell in &self.cells {
            let mut expected: BTreeSet<String> = cell.input_pins().into_iter().collect();
            expected.extend(cell.output_pins());
            let actual: BTreeSet<String> = cell.pins.keys().cloned().collect();
            if expected != actual {
                return Err(NetlistError::BadPins {
                    cell: cell.instance.clone(),
                    kind: cell.kind.name(),
                    detail: format!(
                        "expected pins {{{}}}, got {{{}}}",
                        join(&expected),
                        join(&actual)
                    ),
                });
            }
            if let CellKind::Learned(_) = cell.kind {
                if cell.learned_arity() == 0 {
                    return Err(NetlistError::BadPins {
                        cell: cell.instance.clone(),
                        kind: cell.kind.name(),
                        detail: "learned cells need at least one input".to_string(),
                    });
                }
            }
            for bit in cell.pins.values() {
                self.check_bit(bit)?;
            }
        }
        for a in &self.assigns {
            self.check_bit(&a.sink)?;
            self.check_bit(&a.source)?;
        }
        let drivers = self.driver_map()?;
        self.check_combinational_acyclic(&drivers)?;
        Ok(())
    }

    /// Combinational topological order of cell indices (registers do not
    /// propagate a dependency from D to Q). Assign chains are followed.
    pub fn comb_topo_order(&self) -> Result<Vec<usize>, NetlistError> {
        let drivers = self.driver_map()?;
        self.comb_topo_order_with(&drivers)
    }

    fn check_combinational_acyclic(
        &self,
        drivers: &HashMap<NetBit, Driver>,
    ) -> Result<(), NetlistError> {
        self.comb_topo_order_with(drivers).map(|_| ())
    }

    fn comb_topo_order_with(
        &self,
        drivers: &HashMap<NetBit, Driver>,
    ) -> Result<Vec<usize>, NetlistError> {
        // DFS over cells; a cell depends combinationally on the cells that
        // drive its input pins, chasing assigns. REG contributes no edge.
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Gray,
            Black,
        }
        let mut marks = vec![Mark::White; self.cells.len()];
        let mut order = Vec::with_capacity(self.cells.len());

        fn source_cell(
            nl: &Netlist,
            drivers: &HashMap<NetBit, Driver>,
            bit: &NetBit,
        ) -> Option<usize> {
            let mut bit = bit.clone();
            loop {
                match drivers.get(&bit) {
                    Some(Driver::CellPin(ci, _)) => return Some(*ci),
                    Some(Driver::Assign(ai)) => bit = nl.assigns[*ai].source.clone(),
                    Some(Driver::InputPort(_)) | None => return None,
                }
            }
        }

        fn visit(
            nl: &Netlist,
            drivers: &HashMap<NetBit, Driver>,
            ci: usize,
            marks: &mut [Mark],
            order: &mut Vec<usize>,
        ) -> Result<(), NetlistError> {
            match marks[ci] {
                Mark::Black => return Ok(()),
                Mark::Gray => {
                    return Err(NetlistError::CombinationalCycle(
                        nl.cells[ci].instance.clone(),
                    ))
                }
                Mark::White => {}
            }
            marks[ci] = Mark::Gray;
            let cell = &nl.cells[ci];
            if !cell.kind.is_register() {
                for pin in cell.input_pins() {
                    let bit = &cell.pins[&pin];
                    if let Some(src) = source_cell(nl, drivers, bit) {
                        visit(nl, drivers, src, marks, order)?;
                    }
                }
            }
            marks[ci] = Mark::Black;
            order.push(ci);
            Ok(())
        }

        for ci in 0..self.cells.len() {
            visit(self, drivers, ci, &mut marks, &mut order)?;
        }
        Ok(order)
    }
}

fn join(set: &BTreeSet<String>) -> String {
    set.iter().cloned().collect::<Vec<_>>().join(", ")
}

impl Netlist {
    /// Every reader of each net bit: cell input pins, assign sources, and
    /// output port bits (which expose the net externally).
    pub fn reader_map(&self) -> HashMap<NetBit, Vec<Reader>> {
        let mut readers: HashMap<NetBit, Vec<Reader>> = HashMap::new();
        for (ci, cell) in self.cells.iter().enumerate() {
            for pin in cell.input_pins() {
                readers
                    .entry(cell.pins[&pin].clone())
                    .or_default()
                    .push(Reader::CellPin(ci, pin));
            }
        }
        for (ai, a) in self.assigns.iter().enumerate() {
            readers
                .entry(a.source.clone())
                .or_default()
                .push(Reader::Assign(ai));
        }
        for bit in self.output_bits() {
            readers.entry(bit).or_default().push(Reader::OutputPort);
        }
        readers
    }

    /// Collapse single-use internal wires behind assigns: where a cell
    /// output drives a one-bit non-port net whose only reader is an assign,
    /// retarget the cell to drive the assign's sink directly. Behavior is
    /// unchanged; indexed structure hidden behind `outN <- _tmp` aliases
    /// becomes visible to the grouping passes.
    pub fn collapse_aliases(&self) -> Result<Netlist, NetlistError> {
        let readers = self.reader_map();
        let mut nl = self.clone();
        let mut dropped_assigns: BTreeSet<usize> = BTreeSet::new();
        let mut dropped_nets: BTreeSet<String> = BTreeSet::new();
        let drivers = self.driver_map()?;
        for (ai, assign) in self.assigns.iter().enumerate() {
            let b = &assign.source;
            if self.port(&b.net).is_some() || self.nets.get(&b.net) != Some(&1) {
                continue;
            }
            let Some(Driver::CellPin(ci, pin)) = drivers.get(b) else {
                continue;
            };
            let only_reader = matches!(readers.get(b).map(Vec::as_slice), Some([Reader::Assign(a)]) if *a == ai);
            if !only_reader {
                continue;
            }
            nl.cells[*ci].pins.insert(pin.clone(), assign.sink.clone());
            dropped_assigns.insert(ai);
            dropped_nets.insert(b.net.clone());
        }
        nl.assigns = nl
            .assigns
            .into_iter()
            .enumerate()
            .filter(|(ai, _)| !dropped_assigns.contains(ai))
            .map(|(_, a)| a)
            .collect();
        for net in dropped_nets {
            nl.nets.remove(&net);
        }
        nl.validate()?;
        Ok(nl)
    }
}

/// What reads a net bit (complement of [`Driver`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reader {
    CellPin(usize, String),
    Assign(usize),
    OutputPort,
}

/// Convenience builder used by tests, the random circuit generator and the
/// pass implementations.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    name: String,
    ports: Vec<Port>,
    nets: BTreeMap<String, u32>,
    cells: Vec<Cell>,
    assigns: Vec<Assign>,
    fresh: u32,
}

impl NetlistBuilder {
    pub fn new(name: impl Into<String>) -> NetlistBuilder {
        NetlistBuilder {
            name: name.into(),
            ..NetlistBuilder::default()
        }
    }

    pub fn input(&mut self, name: &str, width: u32) -> NetBit {
        self.ports.push(Port {
            name: name.to_string(),
            direction: Direction::Input,
            width,
        });
        self.nets.insert(name.to_string(), width);
        NetBit::new(name, 0)
    }

    pub fn output(&mut self, name: &str, width: u32) {
        self.ports.push(Port {
            name: name.to_string(),
            direction: Direction::Output,
            width,
        });
        self.nets.insert(name.to_string(), width);
    }

    pub fn net(&mut self, name: &str, width: u32) {
        self.nets.insert(name.to_string(), width);
    }

    fn fresh_net(&mut self) -> NetBit {
        loop {
            let name = format!("_n{}", self.fresh);
            self.fresh += 1;
            if !self.nets.contains_key(&name) {
                self.nets.insert(name.clone(), 1);
                return NetBit::new(name, 0);
            }
        }
    }

    /// Add a cell with explicit pin map.
    pub fn cell(&mut self, kind: CellKind, pins: Vec<(&str, NetBit)>) -> String {
        let instance = format!("_c{}", self.cells.len());
        self.cells.push(Cell {
            instance: instance.clone(),
            kind,
            pins: pins
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        });
        instance
    }

    /// Add a gate driving a fresh one-bit net; returns that net bit.
    pub fn gate(&mut self, g: Gate, inputs: &[NetBit]) -> NetBit {
        let out = self.fresh_net();
        let kind = CellKind::Gate(g);
        let in_pins = kind.input_pins(0);
        assert_eq!(in_pins.len(), inputs.len(), "arity mismatch for {g:?}");
        let mut pins: Vec<(String, NetBit)> = in_pins
            .into_iter()
            .zip(inputs.iter().cloned())
            .collect();
        let out_pin = kind.output_pins().remove(0);
        pins.push((out_pin, out.clone()));
        let instance = format!("_c{}", self.cells.len());
        self.cells.push(Cell {
            instance,
            kind,
            pins: pins.into_iter().collect(),
        });
        out
    }

    pub fn assign(&mut self, sink: NetBit, source: NetBit) {
        self.assigns.push(Assign { sink, source });
    }

    /// Drive output port bit `sink` from `source` via an assign.
    pub fn connect_output(&mut self, port: &str, bit: u32, source: NetBit) {
        self.assign(NetBit::new(port, bit), source);
    }

    pub fn finish(self) -> Result<Netlist, NetlistError> {
        let nl = Netlist {
            name: self.name,
            ports: self.ports,
            nets: self.nets,
            cells: self.cells,
            assigns: self.assigns,
        };
        nl.validate()?;
        Ok(nl)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn half_adder() -> Netlist {
        let mut b = NetlistBuilder::new("half_adder");
        let i0 = b.input("i0", 1);
        let i1 = b.input("i1", 1);
        b.output("o0", 1);
        b.output("o1", 1);
        let s = b.gate(Gate::Xor, &[i0.clone(), i1.clone()]);
        let c = b.gate(Gate::And, &[i0, i1]);
        b.connect_output("o0", 0, s);
        b.connect_output("o1", 0, c);
        b.finish().unwrap()
    }

    #[test]
    fn builder_produces_valid_netlist() {
        let nl = half_adder();
        assert_eq!(nl.cells.len(), 2);
        assert_eq!(nl.nets.len(), 6);
        nl.validate().unwrap();
    }

    #[test]
    fn multiple_drivers_rejected() {
        let mut b = NetlistBuilder::new("bad");
        let a = b.input("a", 1);
        b.output("y", 1);
        let g0 = b.gate(Gate::Not, &[a.clone()]);
        b.connect_output("y", 0, g0);
        b.assign(NetBit::new("y", 0), a);
        let err = b.finish().unwrap_err();
        assert_eq!(err, NetlistError::MultipleDrivers(NetBit::new("y", 0)));
    }

    #[test]
    fn undriven_bit_rejected() {
        let mut b = NetlistBuilder::new("bad");
        b.input("a", 1);
        b.net("dangling", 1);
        let err = b.finish().unwrap_err();
        assert_eq!(err, NetlistError::Undriven(NetBit::new("dangling", 0)));
    }

    #[test]
    fn combinational_cycle_rejected() {
        let mut b = NetlistBuilder::new("bad");
        b.input("a", 1);
        b.net("x", 1);
        b.net("y", 1);
        b.cell(
            CellKind::Gate(Gate::And),
            vec![
                ("A", NetBit::new("a", 0)),
                ("B", NetBit::new("y", 0)),
                ("Y", NetBit::new("x", 0)),
            ],
        );
        b.cell(
            CellKind::Gate(Gate::Not),
            vec![("A", NetBit::new("x", 0)), ("Y", NetBit::new("y", 0))],
        );
        let err = b.finish().unwrap_err();
        assert!(matches!(err, NetlistError::CombinationalCycle(_)));
    }

    #[test]
    fn register_breaks_combinational_cycle() {
        // x = AND(a, q); q = REG(x) — a cycle, but through a register.
        let mut b = NetlistBuilder::new("ok");
        b.input("a", 1);
        b.output("y", 1);
        b.net("x", 1);
        b.net("q", 1);
        b.cell(
            CellKind::Gate(Gate::And),
            vec![
                ("A", NetBit::new("a", 0)),
                ("B", NetBit::new("q", 0)),
                ("Y", NetBit::new("x", 0)),
            ],
        );
        b.cell(
            CellKind::Gate(Gate::Reg),
            vec![("D", NetBit::new("x", 0)), ("Q", NetBit::new("q", 0))],
        );
        b.connect_output("y", 0, NetBit::new("q", 0));
        b.finish().unwrap();
    }

    #[test]
    fn bad_pin_names_rejected() {
        let mut b = NetlistBuilder::new("bad");
        let a = b.input("a", 1);
        b.output("y", 1);
        b.cell(
            CellKind::Gate(Gate::Not),
            vec![("X", a), ("Y", NetBit::new("y", 0))],
        );
        let err = b.finish().unwrap_err();
        assert!(matches!(err, NetlistError::BadPins { .. }));
    }
}
