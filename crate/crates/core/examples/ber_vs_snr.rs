//! BER against input SNR at 200 antennas; writes the table as CSV to stdout.

use otfs_trmrc::experiments::{run_experiment, write_csv_to, Preset};

fn main() -> otfs_trmrc::Result<()> {
    let mut spec = Preset::Fig3.spec(true, 7);
    spec.trials = 1;
    spec.sweep.snr_db = vec![-20.0, -16.0, -12.0];
    spec.sweep.doppler_hz = vec![0.0, 10_900.0];
    let table = run_experiment(&spec)?;
    write_csv_to(&table, std::io::stdout().lock())
}
