//! Discretize the EVA profile and push a frame through a few time-varying antennas.

use otfs_trmrc::channel::{apply_channel, delay_time_gain, sample_pathset, NoiseSpec, PowerDelayProfile};
use otfs_trmrc::experiments::velocity_to_doppler;
use otfs_trmrc::grid::TimeFrame;
use otfs_trmrc::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let ts = 1.0 / 4.95e6;
    let pdp = PowerDelayProfile::eva(ts);
    println!("EVA at T_s = {:.1} ns, L = {}", ts * 1e9, pdp.taps_len());
    for ((d, k), p) in pdp.delays.iter().zip(&pdp.tap_indices).zip(&pdp.powers) {
        println!("  {:>6.0} ns -> tap {k:>2}, power {p:.4}", d * 1e9);
    }

    let doppler = velocity_to_doppler(2000.0, 5.9e9);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ps = sample_pathset(&pdp, doppler, 4, ts, &mut rng);
    println!("v_max = {doppler:.0} Hz");
    for t in [0, 1000, 2000] {
        println!("  antenna 0, tap 0 at sample {t}: {:.3}", delay_time_gain(&ps, 0, 0, t));
    }

    let frame = TimeFrame {
        samples: (0..4096).map(|i| Complex64::cis(0.1 * i as f64)).collect(),
        blocks: 1,
        block_len: 4096,
        sample_rate: 1.0 / ts,
    };
    let rx = apply_channel(&frame, &ps, NoiseSpec::from_snr_db(10.0).unwrap(), &mut rng);
    for (q, r) in rx.iter().enumerate() {
        println!("antenna {q}: {} samples, energy ratio {:.3}", r.len(), r.energy() / frame.energy());
    }
}
