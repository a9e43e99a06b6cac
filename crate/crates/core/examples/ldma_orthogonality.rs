//! Two users on the same bearing at 5 m and 20 m, 30 GHz carrier.
//! Far-field beams cannot tell them apart; near-field beams decorrelate as
//! the array grows.

use eit::nearfield::{ldma_sweep, UniformLinearArray};
use std::f64::consts::PI;

fn main() -> eit::Result<()> {
    let lambda = 0.01;
    let sizes: Vec<usize> = (0..=10).map(|p| 1 << p).collect();
    let points = ldma_sweep(&sizes, 2.0 * PI / lambda, 0.0, 5.0, 20.0)?;
    println!(
        "{:>6} {:>12} {:>10} {:>10}",
        "N", "Rayleigh[m]", "near", "far"
    );
    for p in &points {
        let rd =
            UniformLinearArray::half_wavelength(p.n_elements, lambda)?.rayleigh_distance(lambda);
        println!(
            "{:>6} {rd:>12.2} {:>10.4} {:>10.4}",
            p.n_elements, p.correlation, p.farfield_correlation
        );
    }
    Ok(())
}
