//! Monte-Carlo DoF of a scattered link as the von Mises–Fisher cluster
//! tightens.

use eit::dof::{nlos_dof_mc, NlosOptions, VmfScatterers};
use eit::geometry::Region;
use eit::kernels::WaveParams;

fn main() -> eit::Result<()> {
    let wave = WaveParams::new(1.0)?;
    let tx = Region::interval(4.0)?;
    let rx = Region::interval(4.0)?;
    println!("{:>6} {:>10}", "κ", "mean DoF");
    for kappa in [0.0, 1.0, 5.0, 20.0, 100.0] {
        let sc = VmfScatterers::new([0.0, 0.0, 1.0], kappa, 16)?;
        let dof = nlos_dof_mc(&sc, &tx, &rx, &wave, 100, &NlosOptions::default(), 1)?;
        println!("{kappa:>6} {dof:>10.3}");
    }
    Ok(())
}
