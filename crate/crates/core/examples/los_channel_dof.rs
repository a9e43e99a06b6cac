//! Line-of-sight DoF between two parallel square apertures, compared with
//! the area product A_T·A_R/(λD)².

use eit::dof::{los_channel_dof, LosOptions};
use eit::geometry::Region;
use eit::kernels::WaveParams;

fn main() -> eit::Result<()> {
    let wave = WaveParams::new(1.0)?;
    let separation = 8.0;
    println!("{:>8} {:>6} {:>10}", "side/λ", "DoF", "predicted");
    for side in [2.0, 4.0, 4.0 * 2f64.sqrt(), 6.0] {
        let sq = Region::rectangle(side, side)?;
        let r = los_channel_dof(&sq, &sq, separation, &wave, &LosOptions::default())?;
        println!(
            "{side:>8.3} {:>6} {:>10.2}",
            r.count,
            r.prediction.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
