//! JSON netlist format.
//!
//! A documented subset of the usual netlist-JSON dump style: a top-level
//! `modules` map, each module carrying `ports` (direction plus integer bit
//! ids), `cells` (`type` plus `connections` mapping pins to bit id lists) and
//! `netnames` (net name to bit ids). Bit-level aliases live in an `assigns`
//! array of `[sink, source]` id pairs. See `docs/formats.md` for the full
//! grammar and the conformance corpus.
//!
//! Writing is deterministic: ports claim ids first in declaration order,
//! remaining nets follow sorted by name, ids start at 2.

use std::collections::BTreeMap;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Assign, Cell, CellKind, Direction, NetBit, Netlist, NetlistError, Port};

#[derive(Debug, Serialize, Deserialize)]
struct JsonDesign {
    modules: BTreeMap<String, JsonModule>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonModule {
    ports: BTreeMap<String, JsonPort>,
    cells: BTreeMap<String, JsonCell>,
    netnames: BTreeMap<String, JsonNet>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    assigns: Vec<[u64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonPort {
    direction: String,
    bits: Vec<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonCell {
    #[serde(rename = "type")]
    kind: String,
    connections: BTreeMap<String, Vec<u64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonNet {
    bits: Vec<u64>,
}

/// Parse a JSON design file that must contain exactly one module.
pub fn parse_json(text: &str) -> Result<Netlist, NetlistError> {
    let mut modules = parse_design_json(text)?;
    match modules.len() {
        1 => Ok(modules.remove(0)),
        n => Err(NetlistError::Json(format!(
            "expected exactly one module, found {n}"
        ))),
    }
}

/// Parse every module in a JSON design file, in name order.
pub fn parse_design_json(text: &str) -> Result<Vec<Netlist>, NetlistError> {
    let design: JsonDesign =
        serde_json::from_str(text).map_err(|e| NetlistError::Json(e.to_string()))?;
    design
        .modules
        .into_iter()
        .map(|(name, module)| module_to_netlist(name, module))
        .collect()
}

fn module_to_netlist(name: String, module: JsonModule) -> Result<Netlist, NetlistError> {
    // Bit ids are assigned to net bits by netnames; each id belongs to
    // exactly one net bit in this subset (aliases are spelled with assigns).
    let mut id_to_bit: HashMap<u64, NetBit> = HashMap::new();
    let mut nets = BTreeMap::new();
    for (net, jn) in &module.netnames {
        nets.insert(net.clone(), jn.bits.len() as u32);
        for (i, &id) in jn.bits.iter().enumerate() {
            if id_to_bit
                .insert(id, NetBit::new(net.clone(), i as u32))
                .is_some()
            {
                return Err(NetlistError::Json(format!(
                    "bit id {id} appears in more than one netname"
                )));
            }
        }
    }
    let lookup = |id: u64| -> Result<NetBit, NetlistError> {
        id_to_bit
            .get(&id)
            .cloned()
            .ok_or_else(|| NetlistError::Json(format!("bit id {id} not covered by netnames")))
    };

    let mut ports = Vec::new();
    for (pname, jp) in &module.ports {
        let direction = match jp.direction.as_str() {
            "input" => Direction::Input,
            "output" => Direction::Output,
            other => {
                return Err(NetlistError::Json(format!(
                    "port `{pname}`: unknown direction `{other}`"
                )))
            }
        };
        // The port must ride a net of its own name with identical bits.
        let net = module.netnames.get(pname).ok_or_else(|| {
            NetlistError::PortNetMismatch(pname.clone())
        })?;
        if net.bits != jp.bits {
            return Err(NetlistError::PortNetMismatch(pname.clone()));
        }
        ports.push(Port {
            name: pname.clone(),
            direction,
            width: jp.bits.len() as u32,
        });
    }

    let mut cells = Vec::new();
    for (inst, jc) in &module.cells {
        let kind = CellKind::from_name(&jc.kind)?;
        let mut pins = BTreeMap::new();
        for (pin, ids) in &jc.connections {
            let [id] = ids.as_slice() else {
                return Err(NetlistError::Json(format!(
                    "cell `{inst}` pin `{pin}`: expected exactly one bit id"
                )));
            };
            pins.insert(pin.clone(), lookup(*id)?);
        }
        cells.push(Cell {
            instance: inst.clone(),
            kind,
            pins,
        });
    }

    let assigns = module
        .assigns
        .iter()
        .map(|&[sink, source]| {
            Ok(Assign {
                sink: lookup(sink)?,
                source: lookup(source)?,
            })
        })
        .collect::<Result<Vec<_>, NetlistError>>()?;

    let nl = Netlist {
        name,
        ports,
        nets,
        cells,
        assigns,
    };
    nl.validate()?;
    Ok(nl)
}

/// Serialize one module. The result parses back to an equal netlist.
pub fn write_json(nl: &Netlist) -> String {
    let mut design = JsonDesign {
        modules: BTreeMap::new(),
    };
    design.modules.insert(nl.name.clone(), netlist_to_module(nl));
    let mut out = serde_json::to_string_pretty(&design).expect("netlist serializes");
    out.push('\n');
    out
}

fn netlist_to_module(nl: &Netlist) -> JsonModule {
    // Deterministic id assignment: port nets first in port order, then the
    // rest sorted by name. Ids start at 2, matching common dump style.
    let mut bit_ids: HashMap<NetBit, u64> = HashMap::new();
    let mut next = 2u64;
    let mut net_order: Vec<&String> = nl.ports.iter().map(|p| &p.name).collect();
    for net in nl.nets.keys() {
        if nl.port(net).is_none() {
            net_order.push(net);
        }
    }
    let mut netnames = BTreeMap::new();
    for net in net_order {
        let width = nl.nets[net];
        let mut bits = Vec::with_capacity(width as usize);
        for b in 0..width {
            bit_ids.insert(NetBit::new(net.clone(), b), next);
            bits.push(next);
            next += 1;
        }
        netnames.insert(net.clone(), JsonNet { bits });
    }

    let ports = nl
        .ports
        .iter()
        .map(|p| {
            (
                p.name.clone(),
                JsonPort {
                    direction: p.direction.name().to_string(),
                    bits: netnames[&p.name].bits.clone(),
                },
            )
        })
        .collect();

    let cells = nl
        .cells
        .iter()
        .map(|c| {
            (
                c.instance.clone(),
                JsonCell {
                    kind: c.kind.name(),
                    connections: c
                        .pins
                        .iter()
                        .map(|(pin, bit)| (pin.clone(), vec![bit_ids[bit]]))
                        .collect(),
                },
            )
        })
        .collect();

    let assigns = nl
        .assigns
        .iter()
        .map(|a| [bit_ids[&a.sink], bit_ids[&a.source]])
        .collect();

    JsonModule {
        ports,
        cells,
        netnames,
        assigns,
    }
}
