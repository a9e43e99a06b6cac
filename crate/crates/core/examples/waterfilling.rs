//! Power allocation over parallel channels.

use eit::mutual_info::waterfill;

fn main() -> eit::Result<()> {
    let gains = [1.0, 0.8, 0.5, 0.3, 0.1];
    let noise = [1.0; 5];
    for power in [0.1, 1.0, 10.0] {
        let w = waterfill(&gains, &noise, power)?;
        let alloc: Vec<String> = w.allocation.iter().map(|p| format!("{p:.3}")).collect();
        println!(
            "P = {power:>5}: level {:.4}, capacity {:.4} bits, allocation [{}]",
            w.water_level,
            w.capacity_bits,
            alloc.join(", ")
        );
    }
    Ok(())
}
