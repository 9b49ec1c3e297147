use num_complex::Complex64;
use otfs_trmrc::channel::{apply_channel, NoiseSpec, Path, PathSet};
use otfs_trmrc::grid::{DelayDopplerGrid, OtfsModem};
use otfs_trmrc::link::{random_frame_data, simulate_frame, LinkConfig};
use otfs_trmrc::metrics::{evaluate, sinr_estimate};
use otfs_trmrc::qam::{qam_demap, Constellation};
use otfs_trmrc::receiver::{
    apply_genie_scaling, make_rdc_window, receive_frame, CsiSnapshot, FrameGeometry, ReceiverConfig, WindowMode,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TS: f64 = 1.0 / 4.95e6;

#[test]
fn unit_channel_returns_transmitted_grid() {
    let geom = FrameGeometry::centered(16, 8, 3).unwrap();
    let c = Constellation::qpsk();
    let (_, truth) = random_frame_data(&geom, &c, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let modem = OtfsModem::new(geom.m, geom.n).unwrap();
    let tx = modem.modulate_frame(&truth, 1.0 / TS).unwrap();
    for q in [1, 3, 9] {
        let path = Path { gain: Complex64::new(1.0, 0.0), tap: 0, doppler_hz: 0.0, angle: 0.0 };
        let ps = PathSet::uniform(q, path, TS);
        let rx = apply_channel(&tx, &ps, NoiseSpec::noiseless(), &mut ChaCha8Rng::seed_from_u64(2));
        let csi = CsiSnapshot::genie(&ps, &geom);
        let cfg = ReceiverConfig {
            geom,
            mode: WindowMode::Rect,
            rdc: make_rdc_window(geom.m, geom.d, 0.0, TS, 0.1).unwrap(),
        };
        let est = receive_frame(&rx, &csi, &cfg).unwrap();
        for (e, t) in est.iter().zip(&truth) {
            for (a, b) in e.as_slice().iter().zip(t.as_slice()) {
                assert!((a - b).norm() < 1e-12, "Q={q}");
            }
        }
    }
}

/// Mean of `||x_hat - gamma x||^2 / (|gamma|^2 ||x||^2)` over noiseless frames.
fn residual_interference(q: usize, trials: u64) -> f64 {
    let cfg = LinkConfig::eva(64, 16, 2, TS, 0.0, q, NoiseSpec::noiseless()).unwrap();
    (0..trials)
        .map(|t| {
            let out = simulate_frame(&cfg, 7_000 + t).unwrap();
            1.0 / sinr_estimate(&out.rect, &out.truth).unwrap()
        })
        .sum::<f64>()
        / trials as f64
}

#[test]
fn interference_falls_as_inverse_antenna_count() {
    let qs = [8usize, 32, 128, 512];
    let power: Vec<f64> = qs.iter().map(|&q| residual_interference(q, 6)).collect();
    let xs: Vec<f64> = qs.iter().map(|&q| (q as f64).ln()).collect();
    let ys: Vec<f64> = power.iter().map(|p| p.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    assert!((slope + 1.0).abs() < 0.3, "log-log slope {slope}, powers {power:?}");
    let c = qs.iter().zip(&power).map(|(&q, p)| q as f64 * p).sum::<f64>() / 4.0;
    for (&q, p) in qs.iter().zip(&power) {
        let fit = c / q as f64;
        assert!((p / fit - 1.0).abs() < 0.3, "Q={q}: {p} vs {fit}");
    }
}

#[test]
fn both_windows_share_the_same_draws() {
    let cfg = LinkConfig::eva(32, 8, 2, TS, 0.0, 4, NoiseSpec::from_snr_db(10.0).unwrap()).unwrap();
    let out = simulate_frame(&cfg, 3).unwrap();
    // Zero Doppler makes the window the identity.
    assert_eq!(out.rect, out.rdc);
    let c = cfg.constellation;
    let a = evaluate(&out, WindowMode::Rect, &c).unwrap();
    let b = evaluate(&out, WindowMode::Rdc, &c).unwrap();
    assert_eq!(a.bit_errors, b.bit_errors);
    assert_eq!(a.sinr_linear, b.sinr_linear);
}

#[test]
fn genie_scaling_removes_common_gain() {
    let geom = FrameGeometry::centered(8, 4, 2).unwrap();
    let c = Constellation::new(16).unwrap();
    let (_, truth) = random_frame_data(&geom, &c, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let g = Complex64::from_polar(0.3, 2.1);
    let mut est: Vec<DelayDopplerGrid> = truth.clone();
    for e in &mut est {
        e.scale(g);
    }
    let gamma = apply_genie_scaling(&mut est, &truth).unwrap();
    assert!((gamma - g).norm() < 1e-12);
    for (e, t) in est.iter().zip(&truth) {
        for (a, b) in e.as_slice().iter().zip(t.as_slice()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

fn noisy_pair(seed: u64) -> (Vec<DelayDopplerGrid>, Vec<DelayDopplerGrid>) {
    let geom = FrameGeometry::centered(8, 4, 2).unwrap();
    let c = Constellation::qpsk();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (_, truth) = random_frame_data(&geom, &c, &mut rng).unwrap();
    let (_, other) = random_frame_data(&geom, &c, &mut rng).unwrap();
    let est = truth
        .iter()
        .zip(&other)
        .map(|(t, o)| {
            let data = t.as_slice().iter().zip(o.as_slice()).map(|(a, b)| a * 0.8 + b * 0.2).collect();
            DelayDopplerGrid::from_vec(8, 4, data).unwrap()
        })
        .collect();
    (est, truth)
}

proptest! {
    #[test]
    fn sinr_ignores_common_rotation_and_scale(seed in any::<u64>(), phase in 0.0f64..6.3, mag in 0.01f64..100.0) {
        let (est, truth) = noisy_pair(seed);
        let base = sinr_estimate(&est, &truth).unwrap();
        let rotated: Vec<_> = est.iter().map(|g| {
            let mut g = g.clone();
            g.scale(Complex64::from_polar(mag, phase));
            g
        }).collect();
        let turned = sinr_estimate(&rotated, &truth).unwrap();
        prop_assert!((turned / base - 1.0).abs() < 1e-9);
    }

    #[test]
    fn qpsk_decisions_ignore_positive_scale(seed in any::<u64>(), mag in 0.001f64..1000.0) {
        let (est, _) = noisy_pair(seed);
        let c = Constellation::qpsk();
        let raw: Vec<Complex64> = est.iter().flat_map(|g| g.as_slice().to_vec()).collect();
        let scaled: Vec<Complex64> = raw.iter().map(|v| v * mag).collect();
        prop_assert_eq!(qam_demap(&raw, &c), qam_demap(&scaled, &c));
    }
}
