//! S-expression netlist format.
//!
//! ```text
//! (module <name>
//!   (ports (input <name> <width>) (output <name> <width>) ...)
//!   (nets (<name> <width>) ...)
//!   (cell <KIND> <inst> (<pin> (bit <net> <idx>)) ...)
//!   (assign (bit <sink> <idx>) (bit <source> <idx>))
//!   ...)
//! ```
//!
//! The writer emits ports in declaration order, nets sorted by name, then
//! cells and assigns in order, one form per line with two-space indent.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::sexpr::{self, Sexp, SyntaxError};

use super::{Assign, Cell, CellKind, Direction, NetBit, Netlist, NetlistError, Port};

pub fn parse_sexpr(text: &str) -> Result<Netlist, NetlistError> {
    let form = sexpr::parse_one(text).map_err(NetlistError::Syntax)?;
    let items = expect_tagged(&form, "module")?;
    let (name, rest) = items
        .split_first()
        .ok_or_else(|| syntax(&form, "module needs a name"))?;
    let name = expect_atom(name, "module name")?;

    let mut nl = Netlist::new(name);
    for item in rest {
        let head = item
            .list()
            .and_then(|l| l.first())
            .and_then(Sexp::atom)
            .ok_or_else(|| syntax(item, "expected (ports ...), (nets ...), (cell ...) or (assign ...)"))?;
        let body = &item.list().unwrap()[1..];
        match head {
            "ports" => {
                for p in body {
                    nl.ports.push(parse_port(p)?);
                }
            }
            "nets" => {
                for n in body {
                    let decl = n.list().ok_or_else(|| syntax(n, "expected (<net> <width>)"))?;
                    let [name, width] = decl else {
                        return Err(syntax(n, "expected (<net> <width>)"));
                    };
                    let name = expect_atom(name, "net name")?;
                    let width = parse_u32(width, "net width")?;
                    if nl.nets.insert(name.to_string(), width).is_some() {
                        return Err(NetlistError::Duplicate {
                            what: "net",
                            name: name.to_string(),
                        });
                    }
                }
            }
            "cell" => nl.cells.push(parse_cell(body, item)?),
            "assign" => {
                let [sink, source] = body else {
                    return Err(syntax(item, "expected (assign <sink-bit> <source-bit>)"));
                };
                nl.assigns.push(Assign {
                    sink: parse_bit(sink)?,
                    source: parse_bit(source)?,
                });
            }
            other => return Err(syntax(item, &format!("unknown module section `{other}`"))),
        }
    }
    nl.validate()?;
    Ok(nl)
}

fn parse_port(s: &Sexp) -> Result<Port, NetlistError> {
    let decl = s
        .list()
        .ok_or_else(|| syntax(s, "expected (input|output <name> <width>)"))?;
    let [dir, name, width] = decl else {
        return Err(syntax(s, "expected (input|output <name> <width>)"));
    };
    let direction = match expect_atom(dir, "port direction")? {
        "input" => Direction::Input,
        "output" => Direction::Output,
        other => return Err(syntax(dir, &format!("unknown direction `{other}`"))),
    };
    Ok(Port {
        name: expect_atom(name, "port name")?.to_string(),
        direction,
        width: parse_u32(width, "port width")?,
    })
}

fn parse_cell(body: &[Sexp], whole: &Sexp) -> Result<Cell, NetlistError> {
    let [kind, inst, pins @ ..] = body else {
        return Err(syntax(whole, "expected (cell <KIND> <inst> (<pin> <bit>) ...)"));
    };
    let kind = CellKind::from_name(expect_atom(kind, "cell kind")?)?;
    let instance = expect_atom(inst, "cell instance")?.to_string();
    let mut pin_map = BTreeMap::new();
    for p in pins {
        let conn = p.list().ok_or_else(|| syntax(p, "expected (<pin> (bit <net> <idx>))"))?;
        let [pin, bit] = conn else {
            return Err(syntax(p, "expected (<pin> (bit <net> <idx>))"));
        };
        let pin = expect_atom(pin, "pin name")?.to_string();
        if pin_map.insert(pin.clone(), parse_bit(bit)?).is_some() {
            return Err(NetlistError::Duplicate {
                what: "pin",
                name: pin,
            });
        }
    }
    Ok(Cell {
        instance,
        kind,
        pins: pin_map,
    })
}

fn parse_bit(s: &Sexp) -> Result<NetBit, NetlistError> {
    let items = expect_tagged(s, "bit")?;
    let [net, idx] = items else {
        return Err(syntax(s, "expected (bit <net> <idx>)"));
    };
    Ok(NetBit::new(
        expect_atom(net, "net name")?,
        parse_u32(idx, "bit index")?,
    ))
}

fn expect_tagged<'a>(s: &'a Sexp, tag: &str) -> Result<&'a [Sexp], NetlistError> {
    let items = s
        .list()
        .ok_or_else(|| syntax(s, &format!("expected ({tag} ...)")))?;
    match items.split_first() {
        Some((head, rest)) if head.atom() == Some(tag) => Ok(rest),
        _ => Err(syntax(s, &format!("expected ({tag} ...)"))),
    }
}

fn expect_atom<'a>(s: &'a Sexp, what: &str) -> Result<&'a str, NetlistError> {
    s.atom()
        .ok_or_else(|| syntax(s, &format!("expected {what} atom")))
}

fn parse_u32(s: &Sexp, what: &str) -> Result<u32, NetlistError> {
    expect_atom(s, what)?
        .parse::<u32>()
        .map_err(|_| syntax(s, &format!("{what} must be a non-negative integer")))
}

fn syntax(s: &Sexp, msg: &str) -> NetlistError {
    NetlistError::Syntax(SyntaxError::new(s.pos(), msg))
}

pub fn write_sexpr(nl: &Netlist) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(module {}", nl.name);
    let ports = nl
        .ports
        .iter()
        .map(|p| format!("({} {} {})", p.direction.name(), p.name, p.width))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(out, "  (ports {ports})");
    let nets = nl
        .nets
        .iter()
        .map(|(n, w)| format!("({n} {w})"))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(out, "  (nets {nets})");
    for c in &nl.cells {
        let pins = c
            .pins
            .iter()
            .map(|(pin, b)| format!("({pin} (bit {} {}))", b.net, b.bit))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(out, "  (cell {} {} {pins})", c.kind.name(), c.instance);
    }
    for a in &nl.assigns {
        let _ = writeln!(
            out,
            "  (assign (bit {} {}) (bit {} {}))",
            a.sink.net, a.sink.bit, a.source.net, a.source.bit
        );
    }
    out.push_str(")\n");
    out
}
