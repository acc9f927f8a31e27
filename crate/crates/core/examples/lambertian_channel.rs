//! Received power versus distance and bearing for the default channel.
//!
//! ```text
//! cargo run --example lambertian_channel
//! ```

use vls_vitals::optics::LambertianChannel;

fn main() -> vls_vitals::Result<()> {
    let channel = LambertianChannel::default();
    println!(
        "Lambertian order {:.4}, path-loss exponent {}, system constant {} dB",
        channel.lambertian_order(),
        channel.path_loss_exponent(),
        channel.system_constant_db()
    );

    println!("\ndistance_m  power_w      power_dbw");
    for d in [0.3, 0.4, 0.6, 0.9, 1.2] {
        let p = channel.received_power_from_distance(d)?;
        println!("{d:>10}  {p:.4e}  {:>9.2}", 10.0 * p.log10());
    }

    // co-located source and detector: irradiance and incidence angles are equal
    println!("\nbearing_deg  power_w at 0.4 m");
    for deg in [0.0f64, 15.0, 30.0, 45.0, 59.0, 60.0] {
        let a = deg.to_radians();
        match channel.received_power_geometric(0.4, a, a) {
            Ok(p) => println!("{deg:>11}  {p:.4e}"),
            Err(e) => println!("{deg:>11}  {e}"),
        }
    }
    Ok(())
}
