//! Link weight from fibre loss, and the resulting fidelity over distance.

use qnetfid::scenarios::{decoherence_sweep, decoherence_weight, fig5_distances, DecoherenceParams};
use qnetfid::Family;

fn main() -> qnetfid::Result<()> {
    let p = decoherence_weight(&DecoherenceParams { alpha: 0.46, p_det: 1.0, d: 50.0 })?;
    println!("p(50 km) = {p:.6}");
    let families = [Family::Chain, Family::Star, Family::Ring, Family::Complete];
    let table = decoherence_sweep(&families, 8, 0.46, 1.0, &fig5_distances())?;
    print!("{}", table.to_csv());
    Ok(())
}
