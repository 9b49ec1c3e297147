//! Fast self-checks run by `otfs-sim check`: each compares an implementation
//! path against an independent evaluation of the same quantity.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bessel::bessel_j0;
use crate::channel::{apply_channel, build_block_matrices, discretize_pdp, sample_pathset, NoiseSpec};
use crate::grid::{otfs_demodulate, otfs_modulate, DelayDopplerGrid, TimeFrame};
use crate::link::{simulate_frame, LinkConfig};
use crate::metrics::{evaluate, jakes_expectation_check};
use crate::qam::Constellation;
use crate::receiver::{tr_filter_symbol, CsiSnapshot, FrameGeometry, WindowMode};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, value: f64, bound: f64) -> CheckResult {
    CheckResult {
        name,
        passed: value < bound,
        detail: format!("{value:.3e} < {bound:.1e}"),
    }
}

fn random_grid(m: usize, n: usize, rng: &mut ChaCha8Rng) -> DelayDopplerGrid {
    let data = (0..m * n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    DelayDopplerGrid::from_vec(m, n, data).expect("dimensions are positive")
}

fn modem_round_trip(rng: &mut ChaCha8Rng) -> f64 {
    [(2, 2), (4, 8), (128, 64)]
        .iter()
        .map(|&(m, n)| {
            let x = random_grid(m, n, rng);
            let y = otfs_demodulate(&otfs_modulate(&x), m, n).expect("lengths match");
            x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

fn parseval(rng: &mut ChaCha8Rng) -> f64 {
    (0..100)
        .map(|_| {
            let x = random_grid(8, 8, rng);
            (otfs_modulate(&x).energy() - x.energy()).abs() / x.energy()
        })
        .fold(0.0, f64::max)
}

fn bessel_vs_quadrature() -> f64 {
    let quad = |x: f64| {
        let n = 2000;
        let h = PI / n as f64;
        let s: f64 = (1..n).map(|i| (x * (i as f64 * h).sin()).cos()).sum();
        (s + 0.5 * (1.0 + (x * PI.sin()).cos())) * h / PI
    };
    (0..=100)
        .map(|i| {
            let x = i as f64 * 0.5;
            (bessel_j0(x) - quad(x)).abs()
        })
        .fold(0.0, f64::max)
}

/// Streaming channel plus matched filter against explicit block matrices.
fn matrix_oracle(rng: &mut ChaCha8Rng) -> f64 {
    let ts = 1.0 / 4.95e6;
    let (m, n_bins, blocks) = (4, 2, 2);
    let geom = FrameGeometry::new(m, n_bins, blocks, 2).expect("valid geometry");
    let pdp = discretize_pdp(&[(0.0, 0.0), (ts, -2.0), (2.0 * ts, -5.0)], ts).expect("valid taps");
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let ps = sample_pathset(&pdp, 30_000.0, 2, ts, rng);
        let tx: Vec<Complex64> = (0..geom.frame_len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let frame = TimeFrame { samples: tx.clone(), blocks, block_len: m * n_bins, sample_rate: 1.0 / ts };
        let rx = apply_channel(&frame, &ps, NoiseSpec::noiseless(), rng);
        let csi = CsiSnapshot::genie(&ps, &geom);
        let l = ps.taps_len();
        let zero = vec![Complex64::new(0.0, 0.0); m];
        for q in 0..2 {
            for n in 0..geom.symbols() {
                let mats = build_block_matrices(&ps, q, n, m, geom.symbols()).expect("n in range");
                let sym = |k: isize| -> &[Complex64] {
                    if k < 0 || k as usize >= geom.symbols() {
                        &zero
                    } else {
                        &tx[k as usize * m..(k as usize + 1) * m]
                    }
                };
                let ni = n as isize;
                let a = mats.prev.mul_vec(sym(ni - 1));
                let b = mats.current.mul_vec(sym(ni));
                let c = mats.next.mul_vec(sym(ni + 1));
                let slice = &rx[q].samples[n * m..(n + 1) * m + l - 1];
                for i in 0..m + l - 1 {
                    worst = worst.max((a[i] + b[i] + c[i] - slice[i]).norm());
                }
                // matched filter against the explicit correlation
                let out = tr_filter_symbol(slice, csi.taps(q, n)).expect("lengths match");
                for (bb, o) in out.iter().enumerate() {
                    let direct: Complex64 = (0..l).map(|k| csi.taps(q, n)[k].conj() * slice[bb + k]).sum();
                    worst = worst.max((o - direct).norm());
                }
            }
        }
    }
    worst
}

fn identity_channel_ber() -> f64 {
    let ts = 1.0 / 4.95e6;
    let mut cfg = LinkConfig::eva(16, 8, 2, ts, 0.0, 3, NoiseSpec::noiseless()).expect("valid config");
    cfg.pdp = crate::channel::PowerDelayProfile::flat();
    let c = Constellation::qpsk();
    let out = simulate_frame(&cfg, 5).expect("simulation runs");
    let t = evaluate(&out, WindowMode::Rect, &c).expect("shapes match");
    t.bit_errors as f64
}

/// Runs every self-check.
pub fn run_checks() -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0C4E_C4);
    let jakes = jakes_expectation_check(1.0, &[0.25, 0.5, 1.0, 2.0], 1_000_000, &mut rng)
        .expect("sample count is large enough");
    vec![
        check("modem round trip max error", modem_round_trip(&mut rng), 1e-12),
        check("Parseval relative error", parseval(&mut rng), 1e-10),
        check("J0 vs quadrature on [0, 50]", bessel_vs_quadrature(), 1e-10),
        check("streaming vs block-matrix channel and filter", matrix_oracle(&mut rng), 1e-10),
        check("Jakes mean vs J0 (1e6 draws)", jakes.max_deviation(), 5e-3),
        check("Jakes mean imaginary part", jakes.max_imaginary(), 5e-3),
        check("flat Rayleigh, single tap, noiseless: bit errors", identity_channel_ber(), 0.5),
    ]
}
