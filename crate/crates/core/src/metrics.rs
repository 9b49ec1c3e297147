//! SINR and BER estimators plus convergence diagnostics.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j0;
use crate::error::{Result, SimError};
use crate::grid::DelayDopplerGrid;
use crate::link::{simulate_frame, FrameOutcome, LinkConfig};
use crate::channel::NoiseSpec;
use crate::qam::{qam_demap, Constellation};
use crate::receiver::{ls_gain, WindowMode};

/// SINR values above this are reported as this many dB.
pub const SINR_DB_CAP: f64 = 100.0;

pub fn to_db(linear: f64) -> f64 {
    (10.0 * linear.log10()).min(SINR_DB_CAP)
}

/// One experiment cell for one window mode. Field order is the CSV column
/// order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub q: usize,
    pub m: usize,
    pub n: usize,
    pub doppler_hz: f64,
    pub snr_db: f64,
    pub window_mode: WindowMode,
    pub seed: u64,
    pub sinr_linear: f64,
    pub sinr_db: f64,
    pub ber: f64,
    pub bits_counted: u64,
    pub trials: usize,
    pub ci_halfwidth_db: f64,
}

/// CSV header, in the declared field order.
pub const CSV_COLUMNS: [&str; 13] = [
    "q",
    "m",
    "n",
    "doppler_hz",
    "snr_db",
    "window_mode",
    "seed",
    "sinr_linear",
    "sinr_db",
    "ber",
    "bits_counted",
    "trials",
    "ci_halfwidth_db",
];

/// Frame SINR `|g|^2 ||x||^2 / ||x_hat - g x||^2` with `g` the LS gain.
/// Returns `f64::INFINITY` for an error-free estimate.
pub fn sinr_estimate(estimates: &[DelayDopplerGrid], truth: &[DelayDopplerGrid]) -> Result<f64> {
    if estimates.is_empty() {
        return Err(SimError::LengthMismatch { expected: 1, actual: 0 });
    }
    let gamma = ls_gain(estimates, truth)?;
    let mut signal = 0.0;
    let mut error = 0.0;
    for (e, t) in estimates.iter().zip(truth) {
        for (a, b) in e.as_slice().iter().zip(t.as_slice()) {
            signal += b.norm_sqr();
            error += (a - gamma * b).norm_sqr();
        }
    }
    let signal = gamma.norm_sqr() * signal;
    Ok(if error == 0.0 { f64::INFINITY } else { signal / error })
}

/// Fraction of differing bits.
pub fn ber_count(decided: &[u8], truth: &[u8]) -> Result<f64> {
    if decided.len() != truth.len() {
        return Err(SimError::LengthMismatch { expected: truth.len(), actual: decided.len() });
    }
    if truth.is_empty() {
        return Ok(0.0);
    }
    Ok(bit_errors(decided, truth) as f64 / truth.len() as f64)
}

fn bit_errors(decided: &[u8], truth: &[u8]) -> u64 {
    decided.iter().zip(truth).filter(|(a, b)| a != b).count() as u64
}

/// Scales the estimates by the inverse LS gain and slices them to bits.
pub fn decide_bits(
    estimates: &[DelayDopplerGrid],
    truth: &[DelayDopplerGrid],
    constellation: &Constellation,
) -> Result<Vec<u8>> {
    let gamma = ls_gain(estimates, truth)?;
    let inv = if gamma.norm() > 0.0 { gamma.inv() } else { Complex64::new(1.0, 0.0) };
    let symbols: Vec<Complex64> = estimates
        .iter()
        .flat_map(|g| g.as_slice().iter().map(move |v| v * inv))
        .collect();
    Ok(qam_demap(&symbols, constellation))
}

/// Per-frame figures for one window mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    pub sinr_linear: f64,
    pub bit_errors: u64,
    pub bits: u64,
}

pub fn evaluate(outcome: &FrameOutcome, mode: WindowMode, constellation: &Constellation) -> Result<TrialMetrics> {
    let est = outcome.estimates(mode);
    let sinr_linear = sinr_estimate(est, &outcome.truth)?;
    let decided = decide_bits(est, &outcome.truth, constellation)?;
    Ok(TrialMetrics {
        sinr_linear,
        bit_errors: bit_errors(&decided, &outcome.bits),
        bits: outcome.bits.len() as u64,
    })
}

/// Merges trial metrics of one cell. Linear SINRs are averaged; the
/// confidence half-width is a normal approximation over per-trial dB values.
#[derive(Debug, Clone, Default)]
pub struct CellStats {
    sinr_sum: f64,
    sinr_db: Vec<f64>,
    bit_errors: u64,
    bits: u64,
}

impl CellStats {
    pub fn push(&mut self, t: TrialMetrics) {
        self.sinr_sum += t.sinr_linear;
        self.sinr_db.push(to_db(t.sinr_linear));
        self.bit_errors += t.bit_errors;
        self.bits += t.bits;
    }

    pub fn trials(&self) -> usize {
        self.sinr_db.len()
    }

    pub fn sinr_linear(&self) -> f64 {
        self.sinr_sum / self.trials().max(1) as f64
    }

    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn ci_halfwidth_db(&self) -> f64 {
        let k = self.trials();
        if k < 2 {
            return 0.0;
        }
        let mean = self.sinr_db.iter().sum::<f64>() / k as f64;
        let var = self.sinr_db.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
        1.96 * (var / k as f64).sqrt()
    }
}

/// Result of a Monte Carlo check of `E{exp(j beta cos(theta) d)} = J0(beta d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JakesCheck {
    pub offsets: Vec<f64>,
    pub deviations: Vec<f64>,
    pub imaginary: Vec<f64>,
}

impl JakesCheck {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_imaginary(&self) -> f64 {
        self.imaginary.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }
}

/// Draws `n_samples` angles uniform on `[-pi, pi)` and compares the empirical
/// mean phasor at every delay offset with `J0(beta * offset)`.
pub fn jakes_expectation_check<R: Rng + ?Sized>(
    beta: f64,
    offsets: &[f64],
    n_samples: usize,
    rng: &mut R,
) -> Result<JakesCheck> {
    if n_samples < 10_000 {
        return Err(SimError::InvalidParameter(format!(
            "need at least 1e4 angle draws, got {n_samples}"
        )));
    }
    let cosines: Vec<f64> = (0..n_samples).map(|_| rng.random_range(-PI..PI).cos()).collect();
    let mut deviations = Vec::with_capacity(offsets.len());
    let mut imaginary = Vec::with_capacity(offsets.len());
    for &d in offsets {
        let mean: Complex64 = cosines
            .iter()
            .map(|c| Complex64::cis(beta * c * d))
            .sum::<Complex64>()
            / n_samples as f64;
        deviations.push((mean - bessel_j0(beta * d)).norm());
        imaginary.push(mean.im);
    }
    Ok(JakesCheck {
        offsets: offsets.to_vec(),
        deviations,
        imaginary,
    })
}

/// Least-squares complex gain of every delay row, pooled over all grids.
pub fn row_gains(estimates: &[DelayDopplerGrid], truth: &[DelayDopplerGrid]) -> Vec<Complex64> {
    let m = truth.first().map_or(0, DelayDopplerGrid::delay_bins);
    let mut cross = vec![Complex64::new(0.0, 0.0); m];
    let mut energy = vec![0.0; m];
    accumulate_rows(estimates, truth, &mut cross, &mut energy);
    cross.iter().zip(&energy).map(|(c, e)| c / *e).collect()
}

fn accumulate_rows(
    estimates: &[DelayDopplerGrid],
    truth: &[DelayDopplerGrid],
    cross: &mut [Complex64],
    energy: &mut [f64],
) {
    for (e, t) in estimates.iter().zip(truth) {
        for b in 0..t.delay_bins() {
            for (a, x) in e.row(b).iter().zip(t.row(b)) {
                cross[b] += a * x.conj();
                energy[b] += x.norm_sqr();
            }
        }
    }
}

/// Runs `trials` noiseless frames and returns the pooled per-delay-row gain
/// of the chosen window.
pub fn gain_profile(cfg: &LinkConfig, mode: WindowMode, trials: usize, seed: u64) -> Result<Vec<Complex64>> {
    let mut cfg = cfg.clone();
    cfg.noise = NoiseSpec::noiseless();
    let m = cfg.geom.m;
    let mut cross = vec![Complex64::new(0.0, 0.0); m];
    let mut energy = vec![0.0; m];
    for t in 0..trials {
        let out = simulate_frame(&cfg, crate::link::derive_seed(&[seed, t as u64]))?;
        accumulate_rows(out.estimates(mode), &out.truth, &mut cross, &mut energy);
    }
    Ok(cross.iter().zip(&energy).map(|(c, e)| c / *e).collect())
}

/// `J0(beta (b - D))` for every delay row.
pub fn bessel_profile(m: usize, d: usize, beta: f64) -> Vec<f64> {
    (0..m).map(|b| bessel_j0(beta * (b as f64 - d as f64))).collect()
}
