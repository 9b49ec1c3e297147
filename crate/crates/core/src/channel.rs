//! Sparse doubly dispersive channels: discretized power delay profiles,
//! Jakes-model Doppler draws, and sample-by-sample time-varying convolution.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::grid::TimeFrame;

/// 3GPP Extended Vehicular A taps as `(delay ns, power dB)`.
pub const EVA_TAPS: [(f64, f64); 9] = [
    (0.0, 0.0),
    (30.0, -1.5),
    (150.0, -1.4),
    (310.0, -3.6),
    (370.0, -0.6),
    (710.0, -9.1),
    (1090.0, -7.0),
    (1730.0, -12.0),
    (2510.0, -16.9),
];

/// A tap of a continuous power delay profile, as written in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdpTap {
    pub delay_ns: f64,
    pub power_db: f64,
}

/// Power delay profile after rounding delays to the sample grid.
///
/// Paths that round to the same tap stay separate entries; they share a tap
/// index but keep independent gains and Doppler shifts.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    /// Continuous delays in seconds.
    pub delays: Vec<f64>,
    /// Integer tap index per path.
    pub tap_indices: Vec<usize>,
    /// Normalized linear power per path, summing to one.
    pub powers: Vec<f64>,
}

impl PowerDelayProfile {
    /// Channel memory `L` in samples.
    pub fn taps_len(&self) -> usize {
        self.tap_indices.iter().copied().max().map_or(0, |m| m + 1)
    }

    pub fn paths(&self) -> usize {
        self.powers.len()
    }

    /// The built-in EVA profile at sample period `ts`.
    pub fn eva(ts: f64) -> Self {
        let taps: Vec<(f64, f64)> = EVA_TAPS.iter().map(|&(d, p)| (d * 1e-9, p)).collect();
        discretize_pdp(&taps, ts).expect("EVA table is well formed")
    }

    /// A single unit-power tap at delay zero.
    pub fn flat() -> Self {
        Self {
            delays: vec![0.0],
            tap_indices: vec![0],
            powers: vec![1.0],
        }
    }
}

/// Rounds `(delay seconds, power dB)` taps to the sampling grid and normalizes
/// the powers to unit sum.
pub fn discretize_pdp(taps: &[(f64, f64)], ts: f64) -> Result<PowerDelayProfile> {
    if taps.is_empty() {
        return Err(SimError::EmptyProfile);
    }
    if !(ts > 0.0 && ts.is_finite()) {
        return Err(SimError::InvalidParameter(format!("sample period must be positive, got {ts}")));
    }
    let mut delays = Vec::with_capacity(taps.len());
    let mut tap_indices = Vec::with_capacity(taps.len());
    let mut powers = Vec::with_capacity(taps.len());
    for &(delay, power_db) in taps {
        if !(delay >= 0.0 && delay.is_finite()) || !power_db.is_finite() {
            return Err(SimError::InvalidParameter(format!(
                "bad tap (delay {delay} s, power {power_db} dB)"
            )));
        }
        delays.push(delay);
        tap_indices.push((delay / ts).round() as usize);
        powers.push(10f64.powf(power_db / 10.0));
    }
    let total: f64 = powers.iter().sum();
    for p in &mut powers {
        *p /= total;
    }
    Ok(PowerDelayProfile {
        delays,
        tap_indices,
        powers,
    })
}

/// One propagation path as seen by one receive antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: Complex64,
    pub tap: usize,
    pub doppler_hz: f64,
    pub angle: f64,
}

/// Independent path realizations for every receive antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    pub antennas: Vec<Vec<Path>>,
    pub doppler_max: f64,
    pub sample_period: f64,
    taps_len: usize,
}

impl PathSet {
    pub fn new(antennas: Vec<Vec<Path>>, doppler_max: f64, sample_period: f64) -> Self {
        let taps_len = antennas
            .iter()
            .flatten()
            .map(|p| p.tap + 1)
            .max()
            .unwrap_or(1);
        Self {
            antennas,
            doppler_max,
            sample_period,
            taps_len,
        }
    }

    /// Same single path on every antenna; handy for deterministic tests.
    pub fn uniform(q: usize, path: Path, sample_period: f64) -> Self {
        Self::new(vec![vec![path]; q], path.doppler_hz.abs(), sample_period)
    }

    pub fn num_antennas(&self) -> usize {
        self.antennas.len()
    }

    /// Channel memory `L`.
    pub fn taps_len(&self) -> usize {
        self.taps_len
    }
}

/// Draws `CN(0, rho_p)` gains and Jakes Doppler shifts
/// `doppler_max * cos(theta)`, `theta ~ U(-pi, pi)`, independently per path
/// and antenna.
pub fn sample_pathset<R: Rng + ?Sized>(
    pdp: &PowerDelayProfile,
    doppler_max: f64,
    q: usize,
    sample_period: f64,
    rng: &mut R,
) -> PathSet {
    let antennas = (0..q)
        .map(|_| {
            pdp.tap_indices
                .iter()
                .zip(&pdp.powers)
                .map(|(&tap, &power)| {
                    let sd = (power / 2.0).sqrt();
                    let re: f64 = StandardNormal.sample(rng);
                    let im: f64 = StandardNormal.sample(rng);
                    let angle = rng.random_range(-PI..PI);
                    Path {
                        gain: Complex64::new(re * sd, im * sd),
                        tap,
                        doppler_hz: doppler_max * angle.cos(),
                        angle,
                    }
                })
                .collect()
        })
        .collect();
    let mut ps = PathSet::new(antennas, doppler_max, sample_period);
    ps.taps_len = ps.taps_len.max(pdp.taps_len());
    ps
}

/// Delay-time response `h_q[k, l] = sum_p a_p e^{j 2 pi v_p (l - k) T_s} [k == tap_p]`.
pub fn delay_time_gain(ps: &PathSet, q: usize, k: usize, l: usize) -> Complex64 {
    let dt = (l as f64 - k as f64) * ps.sample_period;
    ps.antennas[q]
        .iter()
        .filter(|p| p.tap == k)
        .map(|p| p.gain * Complex64::cis(2.0 * PI * p.doppler_hz * dt))
        .sum()
}

/// Additive white Gaussian noise level relative to unit-power transmit samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    variance: f64,
}

impl NoiseSpec {
    /// `sigma^2 = 10^(-snr_db / 10)`.
    pub fn from_snr_db(snr_db: f64) -> Result<Self> {
        if !snr_db.is_finite() {
            return Err(SimError::InvalidParameter(format!("snr_db must be finite, got {snr_db}")));
        }
        Ok(Self {
            variance: 10f64.powf(-snr_db / 10.0),
        })
    }

    pub fn noiseless() -> Self {
        Self { variance: 0.0 }
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }
}

// exact phasor re-seed interval for the rotating Doppler recurrence
const PHASOR_RESEED: usize = 256;

/// Time-varying convolution of `tx` through one antenna's paths plus noise.
/// Writes `tx.len() + L - 1` samples to `out` (overwritten).
pub fn apply_antenna<R: Rng + ?Sized>(
    tx: &[Complex64],
    paths: &[Path],
    taps_len: usize,
    sample_period: f64,
    noise: NoiseSpec,
    rng: &mut R,
    out: &mut Vec<Complex64>,
) {
    let len = tx.len() + taps_len.max(1) - 1;
    out.clear();
    out.resize(len, Complex64::new(0.0, 0.0));
    for path in paths {
        let omega = 2.0 * PI * path.doppler_hz * sample_period;
        let dst = &mut out[path.tap..path.tap + tx.len()];
        if omega == 0.0 {
            for (o, &s) in dst.iter_mut().zip(tx) {
                *o += path.gain * s;
            }
            continue;
        }
        // phase follows the source sample index j = l - tap
        let step = Complex64::cis(omega);
        for (chunk_idx, (dchunk, schunk)) in dst
            .chunks_mut(PHASOR_RESEED)
            .zip(tx.chunks(PHASOR_RESEED))
            .enumerate()
        {
            let mut rot = path.gain * Complex64::cis(omega * (chunk_idx * PHASOR_RESEED) as f64);
            for (o, &s) in dchunk.iter_mut().zip(schunk) {
                *o += rot * s;
                rot *= step;
            }
        }
    }
    if noise.variance > 0.0 {
        let sd = (noise.variance / 2.0).sqrt();
        for o in out.iter_mut() {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            *o += Complex64::new(re * sd, im * sd);
        }
    }
}

/// Passes one transmit frame through every antenna's channel. Samples outside
/// the frame are silence, so each output carries an `L - 1` sample tail.
///
/// One noise seed per antenna is drawn from `rng` up front, so the result does
/// not depend on how antennas are scheduled across threads.
pub fn apply_channel<R: Rng + ?Sized>(
    tx: &TimeFrame,
    ps: &PathSet,
    noise: NoiseSpec,
    rng: &mut R,
) -> Vec<TimeFrame> {
    let seeds: Vec<u64> = (0..ps.num_antennas()).map(|_| rng.next_u64()).collect();
    ps.antennas
        .par_iter()
        .zip(seeds.par_iter())
        .map(|(paths, &seed)| {
            let mut nrng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::new();
            apply_antenna(&tx.samples, paths, ps.taps_len(), ps.sample_period, noise, &mut nrng, &mut out);
            TimeFrame {
                samples: out,
                blocks: tx.blocks,
                block_len: tx.block_len,
                sample_rate: tx.sample_rate,
            }
        })
        .collect()
}

/// Dense row-major complex matrix used by the block-matrix oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.norm() == 0.0)
    }
}

/// Convolution matrices mapping symbols `n-1`, `n`, `n+1` onto the
/// `(M + L - 1)`-sample receive window of symbol `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrices {
    pub prev: CMatrix,
    pub current: CMatrix,
    pub next: CMatrix,
}

fn tap_gain(ps: &PathSet, q: usize, k: isize, l: usize) -> Complex64 {
    if k < 0 || k as usize >= ps.taps_len() {
        Complex64::new(0.0, 0.0)
    } else {
        delay_time_gain(ps, q, k as usize, l)
    }
}

/// Explicit matrices for OFDM symbol `n` of a frame holding `symbols`
/// symbols of `m` samples. Test oracle; the simulator never builds these.
pub fn build_block_matrices(
    ps: &PathSet,
    q: usize,
    n: usize,
    m: usize,
    symbols: usize,
) -> Result<BlockMatrices> {
    if n >= symbols {
        return Err(SimError::SymbolOutOfRange { index: n, count: symbols });
    }
    if q >= ps.num_antennas() {
        return Err(SimError::InvalidParameter(format!("antenna {q} out of range")));
    }
    let l = ps.taps_len();
    let rows = m + l - 1;
    let mut prev = CMatrix::zeros(rows, m);
    let mut current = CMatrix::zeros(rows, m);
    let mut next = CMatrix::zeros(rows, m);
    for a in 0..rows {
        let time = m * n + a;
        for b in 0..m {
            let (ai, bi, mi) = (a as isize, b as isize, m as isize);
            current.set(a, b, tap_gain(ps, q, ai - bi, time));
            prev.set(a, b, tap_gain(ps, q, mi - bi + ai, time));
            next.set(a, b, tap_gain(ps, q, ai - bi - mi, time));
        }
    }
    Ok(BlockMatrices { prev, current, next })
}
