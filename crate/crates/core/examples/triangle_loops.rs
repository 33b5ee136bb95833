//! A loop lets each pair pick its better route. On a triangle with i.i.d.
//! uniform weights that lifts the average from 3/4 to 7/9.

use qnetfid::analytic::{triangle_average_then_max, triangle_c_expected};
use qnetfid::scenarios::run_scenario_c;
use qnetfid::TopologySpec;

fn main() -> qnetfid::Result<()> {
    let est = run_scenario_c(&TopologySpec::ring(3), 200_000, 42)?;
    println!("Monte Carlo        {:.5} +- {:.5}", est.mean, est.std_error);
    println!("expected           {} = {:.5}", triangle_c_expected(), 7.0 / 9.0);
    println!("average, then max  {} = {:.5}", triangle_average_then_max(), 0.75);
    Ok(())
}
