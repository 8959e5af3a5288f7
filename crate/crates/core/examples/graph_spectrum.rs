//! Spectrum of the normalized adjacency for the 8-agent topology and a few
//! random graphs.

use consensus_lab::graph::{modal_decomposition, random_connected_graph};
use consensus_lab::Graph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Graph::eight_agent_reference();
    print!("{}", g.to_text());
    let basis = modal_decomposition(&g)?;
    println!("degrees: {:?}", g.degrees());
    println!("spectrum:");
    for l in basis.spectrum().iter() {
        println!("  {l:+.15}");
    }
    println!("first column of T: {:?}", basis.t().column(0).as_slice());

    for seed in 0..3 {
        let g = random_connected_graph(10, 0.25, seed)?;
        let b = modal_decomposition(&g)?;
        let s = b.spectrum();
        println!(
            "random n=10 seed={seed}: lambda_1 = {:.12}, lambda_2 = {:.6}, lambda_min = {:.6}",
            s[0],
            s[1],
            s[s.len() - 1]
        );
    }
    Ok(())
}
