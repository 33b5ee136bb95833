//! Effective path length: average hop count once ME links are free, and the
//! slope of F^max_avg at p = 1.

use qnetfid::fidelity::{effective_path_length, finite_difference_path_length};
use qnetfid::network::{generate, WeightAssignment};
use qnetfid::TopologySpec;

fn main() -> qnetfid::Result<()> {
    let spec = TopologySpec::chain(6);
    for me in [vec![], vec![2], vec![0, 4], vec![1, 2, 3]] {
        let mut mask = vec![false; 5];
        for &i in &me {
            mask[i] = true;
        }
        let net = generate(&spec, &WeightAssignment::MeMask { me: mask, p: 0.9 })?;
        println!(
            "ME links {:?}: exact {:.4}, finite difference {:.4}",
            me,
            effective_path_length(&net),
            finite_difference_path_length(&net, 1e-5)?
        );
    }
    Ok(())
}
