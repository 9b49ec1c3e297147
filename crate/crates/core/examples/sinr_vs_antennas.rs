//! SINR against antenna count for a static and a fast channel, both windows.

use otfs_trmrc::experiments::{run_experiment, Preset};
use otfs_trmrc::metrics::to_db;
use otfs_trmrc::receiver::WindowMode;

fn main() -> otfs_trmrc::Result<()> {
    let mut spec = Preset::Fig1.spec(true, 42);
    spec.trials = 3;
    spec.sweep.doppler_hz = vec![0.0, 10_900.0];
    let table = run_experiment(&spec)?;

    println!("{:>9} {:>5} {:>10} {:>10}", "v_max", "Q", "rect dB", "rdc dB");
    for cell in spec.cells() {
        let sinr = |mode: WindowMode| {
            table
                .select(|r| r.q == cell.q && r.doppler_hz == cell.doppler_hz && r.window_mode == mode)
                .map(|r| to_db(r.sinr_linear))
                .next()
                .unwrap_or(f64::NAN)
        };
        println!(
            "{:>9.0} {:>5} {:>10.2} {:>10.2}",
            cell.doppler_hz,
            cell.q,
            sinr(WindowMode::Rect),
            sinr(WindowMode::Rdc)
        );
    }
    Ok(())
}
