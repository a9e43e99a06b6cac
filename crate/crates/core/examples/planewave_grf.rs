//! A random channel field built from plane waves: its spatial correlation
//! against sinc(k0·d), and how well it satisfies the Helmholtz equation.

use eit::geometry::{uniform_grid, Region};
use eit::planewave::{
    empirical_correlation, helmholtz_residual, isotropic_correlation, sample_planewave_field,
};
use std::f64::consts::PI;

fn main() -> eit::Result<()> {
    let k0 = 2.0 * PI;
    println!("{:>6} {:>10} {:>10}", "d/λ", "empirical", "sinc");
    for d in [0.0, 0.1, 0.25, 0.5, 0.75, 1.0] {
        let c = empirical_correlation(&[0.0; 3], &[d, 0.0, 0.0], k0, 32, 10_000, 7)?;
        println!(
            "{d:>6.2} {:>10.4} {:>10.4}",
            c.re,
            isotropic_correlation(k0, d)
        );
    }
    let cube = Region::cuboid(1.0, 1.0, 1.0)?;
    for n in [8, 16, 32] {
        let h = 1.0 / n as f64;
        let field = sample_planewave_field(&uniform_grid(&cube, &[n, n, n])?, k0, 64, 3)?;
        println!(
            "spacing λ/{n}: Helmholtz residual {:.3e}",
            helmholtz_residual(&field, h)?
        );
    }
    Ok(())
}
