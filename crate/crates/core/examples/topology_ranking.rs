//! Seven-node chain, flowers and star at p = 1/2 as ME links are added.

use qnetfid::scenarios::{base_network, run_scenario_b, run_scenario_c, PlacementMode};
use qnetfid::TopologySpec;

fn main() -> qnetfid::Result<()> {
    let n = 7;
    let mut specs = vec![TopologySpec::chain(n)];
    specs.extend((1..=n - 4).map(|k| TopologySpec::flower(n, k)));
    specs.push(TopologySpec::star(n));

    for spec in &specs {
        let base = base_network(spec)?;
        let c = run_scenario_c(spec, 20_000, 1)?;
        print!("{:<9} <l> = {:.3}  C = {:.4}  B:", spec.family.to_string(), base.average_path_length(), c.mean);
        for m in 0..=base.edge_count() {
            let b = run_scenario_b(spec, 0.5, m, PlacementMode::Exhaustive, 0)?;
            print!(" {:.4}", b.estimate.mean);
        }
        println!();
    }
    Ok(())
}
