//! Regenerates the shipped generated rule files (used by the golden tests).
use rewire::egraph::write_rules;
use rewire::identify::{component_rules, ComponentLibrary};
use rewire::retime::generate_retiming_rules;
use rewire::term::Gate;

fn main() {
    let gates = [Gate::And, Gate::Or, Gate::Xor, Gate::Not, Gate::Mux];
    let retime = generate_retiming_rules(&gates).unwrap();
    println!("== retime.rules ==");
    print!("{}", write_rules(&retime));
    println!("== identify.rules ==");
    let lib = ComponentLibrary::builtins();
    let rules: Vec<_> = lib.components().flat_map(component_rules).collect();
    print!("{}", write_rules(&rules));
}
