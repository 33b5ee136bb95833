//! Where a 100-node network beats the classical 2/3 bound, on a coarse (p, m) grid.

use qnetfid::scenarios::{advantage_region, unit_grid, PlacementMode};
use qnetfid::TopologySpec;

fn main() -> qnetfid::Result<()> {
    let grid = unit_grid(11);
    for spec in [TopologySpec::chain(100), TopologySpec::flower(100, 48), TopologySpec::star(100)] {
        let table = advantage_region(&spec, &grid, &grid, PlacementMode::Sample(16), 0)?;
        let avg = table.column("avg_advantage").unwrap();
        let any = table.column("any_path_advantage").unwrap();
        println!("{} (rows: m from 1 down to 0, columns: p from 0 to 1; # average, + some pair, . none)", spec);
        for mi in (0..grid.len()).rev() {
            let line: String = (0..grid.len())
                .map(|pi| {
                    let i = pi * grid.len() + mi;
                    match (avg[i].as_bool(), any[i].as_bool()) {
                        (Some(true), _) => '#',
                        (_, Some(true)) => '+',
                        _ => '.',
                    }
                })
                .collect();
            println!("  m={:.1} {line}", grid[mi]);
        }
    }
    Ok(())
}
