//! Chain and star fidelity as N grows, against their large-N limits.

use qnetfid::scenarios::large_n_table;
use qnetfid::Family;

fn main() -> qnetfid::Result<()> {
    let sizes = [10, 20, 50, 100, 200, 500, 1000];
    for family in [Family::Chain, Family::Star] {
        let table = large_n_table(&family, 0.5, 0.6, &sizes, 50, 16, 0)?;
        let f = table.floats("F_analytic").unwrap();
        let limit = table.floats("large_n_limit").unwrap();
        for (n, (f, l)) in sizes.iter().zip(f.iter().zip(&limit)) {
            println!("{family:<6} N={n:<5} F={f:.6} limit={l:.6}");
        }
    }
    Ok(())
}
