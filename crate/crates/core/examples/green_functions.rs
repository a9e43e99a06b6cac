//! Scalar and dyadic Green's functions along a line, showing the 1/R decay
//! and the transverse/longitudinal split of the dyadic far field.

use eit::kernels::{dyadic_green, scalar_green};
use std::f64::consts::PI;

fn main() -> eit::Result<()> {
    let k = 2.0 * PI;
    let src = [0.0; 3];
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "R/λ", "|g|·4πR", "|G_xx|", "|G_zz|"
    );
    for r in [0.1, 0.5, 1.0, 4.0, 16.0] {
        let obs = [0.0, 0.0, r];
        let g = scalar_green(k, &obs, &src)?;
        let d = dyadic_green(k, &obs, &src)?;
        println!(
            "{r:>6} {:>12.6} {:>12.4e} {:>12.4e}",
            g.norm() * 4.0 * PI * r,
            d[0][0].norm(),
            d[2][2].norm()
        );
    }
    Ok(())
}
