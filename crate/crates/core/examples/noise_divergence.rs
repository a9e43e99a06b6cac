//! Densely packed antennas with independent noise gain without bound; with
//! physically correlated noise the information saturates.

use eit::mutual_info::{noise_divergence_experiment, ScenarioConfig};

fn main() -> eit::Result<()> {
    let d = noise_divergence_experiment(&ScenarioConfig::default())?;
    println!("white per-antenna noise variance: {:.4e}", d.white_variance);
    println!("{:>6} {:>12} {:>12}", "N", "white", "correlated");
    for ((n, w), c) in d
        .white
        .sample_counts
        .iter()
        .zip(&d.white.mi_values)
        .zip(&d.correlated.mi_values)
    {
        println!("{n:>6} {w:>12.4} {c:>12.4}");
    }
    Ok(())
}
