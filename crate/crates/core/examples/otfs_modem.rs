//! Modulate one delay-Doppler grid, inspect the time frame, demodulate it back.

use otfs_trmrc::grid::{DelayDopplerGrid, OtfsModem};
use otfs_trmrc::link::random_frame_data;
use otfs_trmrc::qam::Constellation;
use otfs_trmrc::receiver::FrameGeometry;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> otfs_trmrc::Result<()> {
    let (m, n) = (16, 8);
    let geom = FrameGeometry::centered(m, n, 1)?;
    let constellation = Constellation::new(16)?;
    let (_, grids) = random_frame_data(&geom, &constellation, &mut ChaCha8Rng::seed_from_u64(1))?;

    let modem = OtfsModem::new(m, n)?;
    let frame = modem.modulate_frame(&grids, 4.95e6)?;
    println!("grid {m}x{n}: energy {:.3}", grids[0].energy());
    println!("time frame: {} samples, energy {:.3}", frame.len(), frame.energy());

    // A single symbol at (delay 3, Doppler 0) becomes a comb: one sample per
    // OTFS symbol at offset 3.
    let mut impulse = DelayDopplerGrid::zeros(m, n)?;
    impulse.set(3, 0, 1.0.into());
    let comb = modem.modulate(&impulse)?;
    let hits: Vec<usize> = comb.iter().enumerate().filter(|(_, v)| v.norm() > 1e-12).map(|(i, _)| i).collect();
    println!("impulse at delay 3 lands on samples {hits:?}");

    let back = modem.demodulate_blocks(&frame.samples, 1)?;
    let err = back[0]
        .as_slice()
        .iter()
        .zip(grids[0].as_slice())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    println!("round-trip max error {err:.2e}");
    Ok(())
}
