//! Exact and floating-point closed forms next to the path-search engine.

use qnetfid::analytic::{self, parse_exact};
use qnetfid::fidelity::average_max_fidelity_value;
use qnetfid::scenarios::base_network;
use qnetfid::TopologySpec;

fn main() -> qnetfid::Result<()> {
    let p = 0.5;
    let exact_p = parse_exact("1/2")?;
    let specs = [
        TopologySpec::chain(4),
        TopologySpec::star(4),
        TopologySpec::ring(3),
        TopologySpec::ring(5),
        TopologySpec::complete(4),
        TopologySpec::flower(6, 1),
    ];
    println!("{:<12} {:>10} {:>10} {:>10}", "topology", "exact", "analytic", "engine");
    for spec in &specs {
        let exact = analytic::scenario_a(spec, exact_p.clone()).expect("canonical")?;
        let float = analytic::scenario_a(spec, p).expect("canonical")?;
        let net = base_network(spec)?.reweighted(&vec![p; spec.link_count().unwrap()])?;
        let engine = average_max_fidelity_value(&net)?;
        println!("{:<12} {:>10} {:>10.6} {:>10.6}", spec.to_string(), exact.to_string(), float, engine);
    }
    Ok(())
}
