//! Hardware loop rerolling.
//!
//! Groups of at least three same-kind cells whose pins follow an affine
//! index pattern (`bit = stride · i + base` on one net) or a chain pattern
//! (each instance's input driven by its predecessor's output) become a
//! symbolic `for` block in a [`LoopForm`]. Chains are lowered onto a fresh
//! loop-carried wire: the consumer pin reads `wire[i]`, the producer drives
//! `wire[i+1]`, an assign seeds `wire[0]` from the original first source,
//! and surviving original bits are bridged back with assigns so every
//! external reader keeps its net. Unrolling instantiates the body for each
//! index and is the verification hook: `unroll(reroll(n))` must be
//! oracle-equivalent to `n`.
//!
//! Cells whose group admits no index map stay as residual cells; the worst
//! case is a loop-free LoopForm identical to the input.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use std::fmt::Write as _;

use crate::netlist::{
    Assign, Cell, CellKind, Direction, NetBit, Netlist, NetlistError, Port, Reader,
};
use crate::sexpr::{self, Sexp, SyntaxError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RerollError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
    #[error("loop {li}, i = {i}, pin {pin}: index {index} out of range for net `{net}`")]
    IndexOutOfRange {
        li: usize,
        i: u32,
        pin: String,
        index: i64,
        net: String,
    },
}

/// `bit = stride · i + base` on `net`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AffineIndex {
    pub net: String,
    pub stride: i64,
    pub base: i64,
}

impl AffineIndex {
    fn at(&self, i: u32) -> i64 {
        self.stride * i as i64 + self.base
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopCell {
    pub kind: CellKind,
    pub pins: BTreeMap<String, AffineIndex>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopBlock {
    pub range: u32,
    pub body: Vec<LoopCell>,
}

/// A netlist with symbolic `for` blocks. `unroll` turns it back into a
/// plain netlist satisfying every netlist invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopForm {
    pub name: String,
    pub ports: Vec<Port>,
    pub wires: BTreeMap<String, u32>,
    pub assigns: Vec<Assign>,
    pub residual: Vec<Cell>,
    pub loops: Vec<LoopBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RerollConfig {
    /// Smallest group worth a loop; below this the format only inflates.
    pub min_group: usize,
}

impl Default for RerollConfig {
    fn default() -> Self {
        RerollConfig { min_group: 3 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RerollReport {
    pub loops: usize,
    pub looped_cells: usize,
    pub residual_cells: usize,
    /// Groups that met the size threshold but admitted no index map.
    pub unfit_groups: Vec<(String, usize)>,
}

/// Partition cells by kind and return the groups of at least `min_group`
/// members, each in canonical instance order.
pub fn find_groups(nl: &Netlist, min_group: usize) -> Vec<Vec<usize>> {
    let mut by_kind: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (ci, cell) in nl.cells.iter().enumerate() {
        by_kind.entry(cell.kind.name()).or_default().push(ci);
    }
    by_kind
        .into_values()
        .filter(|g| g.len() >= min_group)
        .map(|g| canonical_order(nl, g))
        .collect()
}

/// Order instances along the index dimension: by the first pin whose bits
/// lie on one shared net with pairwise-distinct indices (output pins
/// first), else by chain topology, else by lowest output bit.
fn canonical_order(nl: &Netlist, mut group: Vec<usize>) -> Vec<usize> {
    let cells: Vec<&Cell> = group.iter().map(|&ci| &nl.cells[ci]).collect();
    let template = cells[0];
    let mut pin_names = template.output_pins();
    pin_names.extend(template.input_pins());
    for pin in &pin_names {
        let bits: Vec<&NetBit> = cells.iter().map(|c| &c.pins[pin]).collect();
        let same_net = bits.iter().all(|b| b.net == bits[0].net);
        let distinct: BTreeSet<u32> = bits.iter().map(|b| b.bit).collect();
        if same_net && distinct.len() == bits.len() {
            group.sort_by_key(|&ci| nl.cells[ci].pins[pin].bit);
            return group;
        }
    }
    if let Some(ordered) = chain_order(nl, &group) {
        return ordered;
    }
    group.sort_by_key(|&ci| {
        let cell = &nl.cells[ci];
        cell.output_pins()
            .iter()
            .map(|p| {
                let b = &cell.pins[p];
                (b.net.clone(), b.bit)
            })
            .min()
    });
    group
}

/// Order a group by producer→consumer links: instance j feeds instance j+1
/// through some (output pin, input pin) pair. Returns None unless the links
/// form one path covering the whole group.
fn chain_order(nl: &Netlist, group: &[usize]) -> Option<Vec<usize>> {
    let index: HashMap<usize, usize> = group.iter().enumerate().map(|(k, &ci)| (ci, k)).collect();
    let mut succ: Vec<Option<usize>> = vec![None; group.len()];
    let mut has_pred = vec![false; group.len()];
    for (k, &ci) in group.iter().enumerate() {
        let producer = &nl.cells[ci];
        for q in producer.output_pins() {
            let out_bit = &producer.pins[&q];
            for (&cj, &m) in &index {
                if cj == ci {
                    continue;
                }
                let consumer = &nl.cells[cj];
                if consumer
                    .input_pins()
                    .iter()
                    .any(|p| &consumer.pins[p] == out_bit)
                {
                    if succ[k].is_some_and(|s| s != m) {
                        return None;
                    }
                    succ[k] = Some(m);
                    has_pred[m] = true;
                }
            }
        }
    }
    let mut start = None;
    for (k, &pred) in has_pred.iter().enumerate() {
        if !pred {
            if start.is_some() {
                return None;
            }
            start = Some(k);
        }
    }
    let mut order = Vec::with_capacity(group.len());
    let mut cur = start?;
    let mut seen = vec![false; group.len()];
    loop {
        if seen[cur] {
            return None;
        }
        seen[cur] = true;
        order.push(group[cur]);
        match succ[cur] {
            Some(next) => cur = next,
            None => break,
        }
    }
    (order.len() == group.len()).then_some(order)
}

/// Result of fitting one group: per-pin index maps plus the chain plumbing
/// they require.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupFit {
    pub pins: BTreeMap<String, AffineIndex>,
    /// (wire name, width) for each chain found.
    pub wires: Vec<(String, u32)>,
    pub extra_assigns: Vec<Assign>,
    /// Original nets fully internalized by chains.
    pub dropped_nets: BTreeSet<String>,
}

/// Fit affine or chain index maps for every pin of an ordered group.
/// `wire_seed` numbers fresh chain wires. Returns None when some pin fits
/// neither pattern.
pub fn infer_index_maps(nl: &Netlist, group: &[usize], wire_seed: &mut usize) -> Option<GroupFit> {
    let cells: Vec<&Cell> = group.iter().map(|&ci| &nl.cells[ci]).collect();
    let m = cells.len();
    let template = cells[0];
    let readers = nl.reader_map();

    let mut fit = GroupFit {
        pins: BTreeMap::new(),
        wires: Vec::new(),
        extra_assigns: Vec::new(),
        dropped_nets: BTreeSet::new(),
    };
    let mut chained_outputs: BTreeSet<String> = BTreeSet::new();

    let affine = |pin: &str| -> Option<AffineIndex> {
        let bits: Vec<&NetBit> = cells.iter().map(|c| &c.pins[pin]).collect();
        if !bits.iter().all(|b| b.net == bits[0].net) {
            return None;
        }
        let base = bits[0].bit as i64;
        let stride = bits[1].bit as i64 - base;
        for (j, b) in bits.iter().enumerate() {
            if b.bit as i64 != base + stride * j as i64 {
                return None;
            }
        }
        Some(AffineIndex {
            net: bits[0].net.clone(),
            stride,
            base,
        })
    };

    // Input pins: affine, else chained to a predecessor output pin.
    for pin in template.input_pins() {
        if let Some(ix) = affine(&pin) {
            fit.pins.insert(pin, ix);
            continue;
        }
        let chain_source = template.output_pins().into_iter().find(|q| {
            (1..m).all(|j| cells[j].pins[&pin] == cells[j - 1].pins[q])
        });
        let Some(q) = chain_source else {
            return None;
        };
        let wire = format!("_lc{}", *wire_seed);
        *wire_seed += 1;
        fit.wires.push((wire.clone(), m as u32 + 1));
        // Seed the wire from the first instance's original source.
        fit.extra_assigns.push(Assign {
            sink: NetBit::new(wire.clone(), 0),
            source: cells[0].pins[&pin].clone(),
        });
        fit.pins.insert(
            pin.clone(),
            AffineIndex {
                net: wire.clone(),
                stride: 1,
                base: 0,
            },
        );
        fit.pins.insert(
            q.clone(),
            AffineIndex {
                net: wire.clone(),
                stride: 1,
                base: 1,
            },
        );
        chained_outputs.insert(q.clone());

        // Bridge or drop the original per-stage bits the chain replaces.
        let group_set: BTreeSet<usize> = group.iter().copied().collect();
        let mut nets_touched: BTreeSet<String> = BTreeSet::new();
        for (j, cell) in cells.iter().enumerate() {
            nets_touched.insert(cell.pins[&q].net.clone());
            let orig = cell.pins[&q].clone();
            let internal = j + 1 < m
                && readers.get(&orig).map_or(true, |rs| {
                    rs.iter().all(|r| match r {
                        Reader::CellPin(ci, p) => group_set.contains(ci) && *p == pin,
                        _ => false,
                    })
                });
            if !internal {
                fit.extra_assigns.push(Assign {
                    sink: orig,
                    source: NetBit::new(wire.clone(), j as i64 as u32 + 1),
                });
            }
        }
        // A touched net is droppable when every one of its bits ended up
        // internal (no bridge assign references it) and it is not a port.
        for net in nets_touched {
            if nl.port(&net).is_some() {
                continue;
            }
            let width = nl.nets[&net];
            let bridged = fit
                .extra_assigns
                .iter()
                .any(|a| a.sink.net == net || a.source.net == net);
            let all_bits_from_group = (0..width).all(|b| {
                let bit = NetBit::new(net.clone(), b);
                cells.iter().enumerate().any(|(j, c)| j + 1 < m && c.pins[&q] == bit)
            });
            if !bridged && all_bits_from_group {
                fit.dropped_nets.insert(net);
            }
        }
    }

    // Remaining output pins must be affine.
    for pin in template.output_pins() {
        if chained_outputs.contains(&pin) {
            continue;
        }
        match affine(&pin) {
            Some(ix) => {
                fit.pins.insert(pin, ix);
            }
            None => return None,
        }
    }
    Some(fit)
}

/// Reroll repeated structure into loops. The input is alias-collapsed
/// first so indexed outputs hidden behind `port <- tmp` assigns group
/// correctly.
pub fn reroll(nl: &Netlist, cfg: &RerollConfig) -> Result<(LoopForm, RerollReport), RerollError> {
    let nl = nl.collapse_aliases()?;
    let groups = find_groups(&nl, cfg.min_group);

    let mut wire_seed = 0usize;
    let mut looped: BTreeSet<usize> = BTreeSet::new();
    let mut loops = Vec::new();
    let mut wires = nl.nets.clone();
    let mut assigns = nl.assigns.clone();
    let mut unfit = Vec::new();

    for group in &groups {
        let kind = nl.cells[group[0]].kind.clone();
        match infer_index_maps(&nl, group, &mut wire_seed) {
            Some(fit) => {
                for (w, width) in &fit.wires {
                    wires.insert(w.clone(), *width);
                }
                assigns.extend(fit.extra_assigns.clone());
                for net in &fit.dropped_nets {
                    wires.remove(net);
                }
                loops.push(LoopBlock {
                    range: group.len() as u32,
                    body: vec![LoopCell {
                        kind,
                        pins: fit.pins,
                    }],
                });
                looped.extend(group.iter().copied());
            }
            None => unfit.push((kind.name(), group.len())),
        }
    }

    let residual: Vec<Cell> = nl
        .cells
        .iter()
        .enumerate()
        .filter(|(ci, _)| !looped.contains(ci))
        .map(|(_, c)| c.clone())
        .collect();

    let form = LoopForm {
        name: nl.name.clone(),
        ports: nl.ports.clone(),
        wires,
        assigns,
        residual,
        loops,
    };
    let report = RerollReport {
        loops: form.loops.len(),
        looped_cells: looped.len(),
        residual_cells: form.residual.len(),
        unfit_groups: unfit,
    };
    // The loop form must unroll into a valid netlist.
    unroll(&form)?;
    Ok((form, report))
}

/// Instantiate every loop body for each index value.
pub fn unroll(form: &LoopForm) -> Result<Netlist, RerollError> {
    let mut cells = form.residual.clone();
    for (li, lp) in form.loops.iter().enumerate() {
        for i in 0..lp.range {
            for (bi, body) in lp.body.iter().enumerate() {
                let mut pins = BTreeMap::new();
                for (pin, ix) in &body.pins {
                    let index = ix.at(i);
                    let width = form.wires.get(&ix.net).copied().unwrap_or(0);
                    if index < 0 || index >= width as i64 {
                        return Err(RerollError::IndexOutOfRange {
                            li,
                            i,
                            pin: pin.clone(),
                            index,
                            net: ix.net.clone(),
                        });
                    }
                    pins.insert(pin.clone(), NetBit::new(ix.net.clone(), index as u32));
                }
                cells.push(Cell {
                    instance: format!("_l{li}_b{bi}_{i}"),
                    kind: body.kind.clone(),
                    pins,
                });
            }
        }
    }
    let nl = Netlist {
        name: form.name.clone(),
        ports: form.ports.clone(),
        nets: form.wires.clone(),
        cells,
        assigns: form.assigns.clone(),
    };
    nl.validate()?;
    Ok(nl)
}

// ---------------------------------------------------------------------------
// Loop-form text format

pub fn write_loopform(form: &LoopForm) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(loop-netlist {}", form.name);
    let ports = form
        .ports
        .iter()
        .map(|p| format!("({} {} {})", p.direction.name(), p.name, p.width))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(out, "  (ports {ports})");
    let wires = form
        .wires
        .iter()
        .map(|(n, w)| format!("({n} {w})"))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(out, "  (wires {wires})");
    for a in &form.assigns {
        let _ = writeln!(
            out,
            "  (assign (bit {} {}) (bit {} {}))",
            a.sink.net, a.sink.bit, a.source.net, a.source.bit
        );
    }
    for c in &form.residual {
        let pins = c
            .pins
            .iter()
            .map(|(pin, b)| format!("({pin} (bit {} {}))", b.net, b.bit))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(out, "  (cell {} {} {pins})", c.kind.name(), c.instance);
    }
    for lp in &form.loops {
        let _ = writeln!(out, "  (for i 0 {}", lp.range);
        for body in &lp.body {
            let pins = body
                .pins
                .iter()
                .map(|(pin, ix)| {
                    format!(
                        "({pin} (bit {} (+ (* {} i) {})))",
                        ix.net, ix.stride, ix.base
                    )
                })
                .collect::<Vec<_>>()
                .join(" ");
            let _ = writeln!(out, "    (cell {} {pins})", body.kind.name());
        }
        out.push_str("  )\n");
    }
    out.push_str(")\n");
    out
}

pub fn parse_loopform(text: &str) -> Result<LoopForm, RerollError> {
    let form = sexpr::parse_one(text).map_err(RerollError::Syntax)?;
    let syntax = |s: &Sexp, msg: &str| RerollError::Syntax(SyntaxError::new(s.pos(), msg));
    let items = form
        .list()
        .filter(|l| l.first().and_then(Sexp::atom) == Some("loop-netlist"))
        .ok_or_else(|| syntax(&form, "expected (loop-netlist ...)"))?;
    let [_, name, sections @ ..] = items else {
        return Err(syntax(&form, "expected (loop-netlist <name> ...)"));
    };
    let name = name
        .atom()
        .ok_or_else(|| syntax(name, "module name must be an atom"))?;

    let mut lf = LoopForm {
        name: name.to_string(),
        ports: Vec::new(),
        wires: BTreeMap::new(),
        assigns: Vec::new(),
        residual: Vec::new(),
        loops: Vec::new(),
    };
    for section in sections {
        let head = section
            .list()
            .and_then(|l| l.first())
            .and_then(Sexp::atom)
            .ok_or_else(|| syntax(section, "expected a (ports|wires|assign|cell|for) form"))?;
        let body = &section.list().unwrap()[1..];
        match head {
            "ports" => {
                for p in body {
                    lf.ports.push(parse_port(p)?);
                }
            }
            "wires" => {
                for w in body {
                    let decl = w
                        .list()
                        .ok_or_else(|| syntax(w, "expected (<wire> <width>)"))?;
                    let [n, width] = decl else {
                        return Err(syntax(w, "expected (<wire> <width>)"));
                    };
                    let n = n.atom().ok_or_else(|| syntax(n, "wire name"))?;
                    let width: u32 = width
                        .atom()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| syntax(width, "wire width"))?;
                    lf.wires.insert(n.to_string(), width);
                }
            }
            "assign" => {
                let [sink, source] = body else {
                    return Err(syntax(section, "expected (assign <sink> <source>)"));
                };
                lf.assigns.push(Assign {
                    sink: parse_const_bit(sink)?,
                    source: parse_const_bit(source)?,
                });
            }
            "cell" => {
                let [kind, inst, pins @ ..] = body else {
                    return Err(syntax(section, "expected (cell <KIND> <inst> ...)"));
                };
                let kind = CellKind::from_name(
                    kind.atom().ok_or_else(|| syntax(kind, "cell kind"))?,
                )
                .map_err(RerollError::Netlist)?;
                let instance = inst
                    .atom()
                    .ok_or_else(|| syntax(inst, "cell instance"))?
                    .to_string();
                let mut pin_map = BTreeMap::new();
                for p in pins {
                    let (pin, bit) = parse_pin(p)?;
                    pin_map.insert(pin, parse_const_from_affine(&bit, p)?);
                }
                lf.residual.push(Cell {
                    instance,
                    kind,
                    pins: pin_map,
                });
            }
            "for" => {
                let [var, start, end, cells @ ..] = body else {
                    return Err(syntax(section, "expected (for i 0 <n> (cell ...) ...)"));
                };
                if var.atom() != Some("i") || start.atom() != Some("0") {
                    return Err(syntax(section, "loops are always (for i 0 <n> ...)"));
                }
                let range: u32 = end
                    .atom()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| syntax(end, "loop bound"))?;
                let mut bodies = Vec::new();
                for c in cells {
                    let items = c
                        .list()
                        .filter(|l| l.first().and_then(Sexp::atom) == Some("cell"))
                        .ok_or_else(|| syntax(c, "expected (cell <KIND> (<pin> ...) ...)"))?;
                    let [_, kind, pins @ ..] = items else {
                        return Err(syntax(c, "expected (cell <KIND> ...)"));
                    };
                    let kind = CellKind::from_name(
                        kind.atom().ok_or_else(|| syntax(kind, "cell kind"))?,
                    )
                    .map_err(RerollError::Netlist)?;
                    let mut pin_map = BTreeMap::new();
                    for p in pins {
                        let (pin, ix) = parse_pin(p)?;
                        pin_map.insert(pin, ix);
                    }
                    bodies.push(LoopCell {
                        kind,
                        pins: pin_map,
                    });
                }
                lf.loops.push(LoopBlock {
                    range,
                    body: bodies,
                });
            }
            other => return Err(syntax(section, &format!("unknown section `{other}`"))),
        }
    }
    Ok(lf)
}

fn parse_port(s: &Sexp) -> Result<Port, RerollError> {
    let syntax = |s: &Sexp, msg: &str| RerollError::Syntax(SyntaxError::new(s.pos(), msg));
    let decl = s
        .list()
        .ok_or_else(|| syntax(s, "expected (input|output <name> <width>)"))?;
    let [dir, name, width] = decl else {
        return Err(syntax(s, "expected (input|output <name> <width>)"));
    };
    let direction = match dir.atom() {
        Some("input") => Direction::Input,
        Some("output") => Direction::Output,
        _ => return Err(syntax(dir, "expected input or output")),
    };
    Ok(Port {
        name: name
            .atom()
            .ok_or_else(|| syntax(name, "port name"))?
            .to_string(),
        direction,
        width: width
            .atom()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| syntax(width, "port width"))?,
    })
}

/// `( <pin> (bit <net> <index-expr>) )` where the index is an integer or
/// `(+ (* <stride> i) <base>)`.
fn parse_pin(s: &Sexp) -> Result<(String, AffineIndex), RerollError> {
    let syntax = |s: &Sexp, msg: &str| RerollError::Syntax(SyntaxError::new(s.pos(), msg));
    let conn = s
        .list()
        .ok_or_else(|| syntax(s, "expected (<pin> (bit <net> <idx>))"))?;
    let [pin, bit] = conn else {
        return Err(syntax(s, "expected (<pin> (bit <net> <idx>))"));
    };
    let pin = pin.atom().ok_or_else(|| syntax(pin, "pin name"))?;
    let items = bit
        .list()
        .filter(|l| l.first().and_then(Sexp::atom) == Some("bit"))
        .ok_or_else(|| syntax(bit, "expected (bit <net> <idx>)"))?;
    let [_, net, idx] = items else {
        return Err(syntax(bit, "expected (bit <net> <idx>)"));
    };
    let net = net.atom().ok_or_else(|| syntax(net, "net name"))?;
    let ix = match idx {
        Sexp::Atom(a, _) => {
            let base: i64 = a
                .parse()
                .map_err(|_| syntax(idx, "bit index must be an integer"))?;
            AffineIndex {
                net: net.to_string(),
                stride: 0,
                base,
            }
        }
        Sexp::List(..) => {
            // (+ (* <stride> i) <base>)
            let items = idx
                .list()
                .filter(|l| l.first().and_then(Sexp::atom) == Some("+"))
                .ok_or_else(|| syntax(idx, "expected (+ (* <stride> i) <base>)"))?;
            let [_, mul, base] = items else {
                return Err(syntax(idx, "expected (+ (* <stride> i) <base>)"));
            };
            let mul_items = mul
                .list()
                .filter(|l| l.first().and_then(Sexp::atom) == Some("*"))
                .ok_or_else(|| syntax(mul, "expected (* <stride> i)"))?;
            let [_, stride, var] = mul_items else {
                return Err(syntax(mul, "expected (* <stride> i)"));
            };
            if var.atom() != Some("i") {
                return Err(syntax(var, "loop variable must be i"));
            }
            AffineIndex {
                net: net.to_string(),
                stride: stride
                    .atom()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| syntax(stride, "stride must be an integer"))?,
                base: base
                    .atom()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| syntax(base, "base must be an integer"))?,
            }
        }
    };
    Ok((pin.to_string(), ix))
}

fn parse_const_bit(s: &Sexp) -> Result<NetBit, RerollError> {
    let syntax = |s: &Sexp, msg: &str| RerollError::Syntax(SyntaxError::new(s.pos(), msg));
    let items = s
        .list()
        .filter(|l| l.first().and_then(Sexp::atom) == Some("bit"))
        .ok_or_else(|| syntax(s, "expected (bit <net> <idx>)"))?;
    let [_, net, idx] = items else {
        return Err(syntax(s, "expected (bit <net> <idx>)"));
    };
    Ok(NetBit::new(
        net.atom().ok_or_else(|| syntax(net, "net name"))?,
        idx.atom()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| syntax(idx, "bit index"))?,
    ))
}

fn parse_const_from_affine(ix: &AffineIndex, at: &Sexp) -> Result<NetBit, RerollError> {
    if ix.stride != 0 || ix.base < 0 {
        return Err(RerollError::Syntax(SyntaxError::new(
            at.pos(),
            "residual cells take constant bit indices",
        )));
    }
    Ok(NetBit::new(ix.net.clone(), ix.base as u32))
}
