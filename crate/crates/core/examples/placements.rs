//! Scenario B: exhaustive placement averaging against sampling and the closed form.

use qnetfid::scenarios::{run_scenario_b, PlacementMode};
use qnetfid::TopologySpec;

fn main() -> qnetfid::Result<()> {
    let spec = TopologySpec::flower(10, 3);
    for m in [0, 3, 6, 9] {
        let exact = run_scenario_b(&spec, 0.6, m, PlacementMode::Exhaustive, 0)?;
        let sampled = run_scenario_b(&spec, 0.6, m, PlacementMode::Sample(500), 7)?;
        println!(
            "M={m}: exhaustive {:.6} over {} placements, sampled {:.6} +- {:.6}, closed form {:.6}, envelope [{:.4}, {:.4}]",
            exact.estimate.mean,
            exact.estimate.sample_count,
            sampled.estimate.mean,
            sampled.estimate.std_error,
            exact.analytic.unwrap_or(f64::NAN),
            exact.estimate.min,
            exact.estimate.max,
        );
    }
    Ok(())
}
