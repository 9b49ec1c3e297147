//! Per-delay-row gain after combining many antennas, against J0(beta (b - D)).

use otfs_trmrc::channel::NoiseSpec;
use otfs_trmrc::link::LinkConfig;
use otfs_trmrc::metrics::{bessel_profile, gain_profile};
use otfs_trmrc::receiver::WindowMode;

fn main() -> otfs_trmrc::Result<()> {
    // A long sample period makes the taper visible across the symbol.
    let ts = 1.0 / (128.0 * 15e3);
    let doppler = 10_900.0;
    let cfg = LinkConfig::eva(128, 16, 2, ts, doppler, 256, NoiseSpec::noiseless())?;
    let beta = 2.0 * std::f64::consts::PI * doppler * ts;
    let j0 = bessel_profile(cfg.geom.m, cfg.geom.d, beta);
    let rect = gain_profile(&cfg, WindowMode::Rect, 2, 5)?;
    let rdc = gain_profile(&cfg, WindowMode::Rdc, 2, 5)?;
    let window = cfg.rdc_window()?;

    println!("beta = {beta:.4}, clipped rows = {:?}", window.clipped);
    println!("{:>4} {:>8} {:>8} {:>8}", "b", "J0", "|rect|", "|rdc|");
    for b in (0..cfg.geom.m).step_by(8) {
        println!("{b:>4} {:>8.3} {:>8.3} {:>8.3}", j0[b], rect[b].norm(), rdc[b].norm());
    }
    Ok(())
}
