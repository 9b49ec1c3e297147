//! Step-by-step receive chain: genie CSI, per-antenna matched filters, averaging, window, demodulation.

use otfs_trmrc::channel::{apply_channel, sample_pathset, NoiseSpec, PowerDelayProfile};
use otfs_trmrc::grid::OtfsModem;
use otfs_trmrc::link::random_frame_data;
use otfs_trmrc::metrics::{decide_bits, sinr_estimate, to_db};
use otfs_trmrc::qam::Constellation;
use otfs_trmrc::receiver::{make_rdc_window, receive_frame, CsiSnapshot, FrameGeometry, ReceiverConfig, WindowMode};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> otfs_trmrc::Result<()> {
    let ts = 1.0 / 4.95e6;
    let doppler = 10_900.0;
    let geom = FrameGeometry::centered(128, 16, 2)?;
    let c = Constellation::qpsk();
    let mut rng = ChaCha8Rng::seed_from_u64(11);

    let (bits, truth) = random_frame_data(&geom, &c, &mut rng)?;
    let tx = OtfsModem::new(geom.m, geom.n)?.modulate_frame(&truth, 1.0 / ts)?;
    let ps = sample_pathset(&PowerDelayProfile::eva(ts), doppler, 64, ts, &mut rng);
    let rx = apply_channel(&tx, &ps, NoiseSpec::from_snr_db(0.0)?, &mut rng);
    let csi = CsiSnapshot::genie(&ps, &geom);
    let rdc = make_rdc_window(geom.m, geom.d, doppler, ts, 0.1)?;

    for mode in [WindowMode::Rect, WindowMode::Rdc] {
        let cfg = ReceiverConfig { geom, mode, rdc: rdc.clone() };
        let est = receive_frame(&rx, &csi, &cfg)?;
        let decided = decide_bits(&est, &truth, &c)?;
        let errors = decided.iter().zip(&bits).filter(|(a, b)| a != b).count();
        println!(
            "{:>4}: SINR {:.2} dB, {errors} bit errors of {}",
            mode.to_string(),
            to_db(sinr_estimate(&est, &truth)?),
            bits.len()
        );
    }
    Ok(())
}
