//! Eigenvalues of the time-and-band limiting operator for T = W = 2.
//! The count above 1/2 sits at 2WT = 8.

use eit::dof::{functional_dof, pswf_modes};

fn main() -> eit::Result<()> {
    let (t, w) = (2.0, 2.0);
    let report = functional_dof(pswf_modes(t, w, 512)?, 0.5)?;
    for (n, v) in report.spectrum.values.iter().take(14).enumerate() {
        println!("λ{n:<2} = {v:.6e}");
    }
    println!(
        "DoF at ε = {}: {} (2WT = {})",
        report.threshold,
        report.count,
        2.0 * w * t
    );
    Ok(())
}
