//! Round-trip a custom network through the edge-list format and report every pair.

use qnetfid::fidelity::analyze;
use qnetfid::network::{format_edge_list, parse_edge_list};

fn main() -> qnetfid::Result<()> {
    let text = "# bowtie\n5\n0 1 0.9\n1 2 0.8\n0 2 0.7\n2 3 1\n3 4 0.6\n2 4 0.95\n";
    let net = parse_edge_list(text)?;
    assert_eq!(parse_edge_list(&format_edge_list(&net))?, net);
    let nf = analyze(&net)?;
    for r in &nf.pair_records {
        println!("{}-{}  F={:.4}  path {:?}", r.source, r.target, r.fidelity, r.best_path);
    }
    println!("F_max_avg = {:.6}", nf.avg_max_fidelity);
    println!("effective path length = {:.4}", nf.effective_path_length.unwrap_or(f64::NAN));

    match parse_edge_list("3\n0 1 0.5\n") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
