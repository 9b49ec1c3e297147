//! Delay-Doppler grids and the CP-free OTFS modem.
//!
//! With rectangular pulses and no cyclic prefix the ISFFT followed by OFDM
//! modulation collapses to an N-point IDFT along the Doppler axis of every
//! delay row. The transmit block is serialized OFDM symbol by OFDM symbol:
//! sample `n * M + m` carries delay bin `m` of symbol `n`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, SimError};

/// An `M x N` matrix of delay-Doppler symbols, stored row-major
/// (`data[m * N + i]` is delay `m`, Doppler `i`).
#[derive(Clone, PartialEq)]
pub struct DelayDopplerGrid {
    m: usize,
    n: usize,
    data: Vec<Complex64>,
}

impl DelayDopplerGrid {
    pub fn zeros(m: usize, n: usize) -> Result<Self> {
        Self::check_dims(m, n)?;
        Ok(Self {
            m,
            n,
            data: vec![Complex64::new(0.0, 0.0); m * n],
        })
    }

    pub fn from_vec(m: usize, n: usize, data: Vec<Complex64>) -> Result<Self> {
        Self::check_dims(m, n)?;
        if data.len() != m * n {
            return Err(SimError::LengthMismatch {
                expected: m * n,
                actual: data.len(),
            });
        }
        Ok(Self { m, n, data })
    }

    /// Fills a grid delay-row by delay-row from a flat symbol slice.
    pub fn from_symbols(m: usize, n: usize, symbols: &[Complex64]) -> Result<Self> {
        Self::from_vec(m, n, symbols.to_vec())
    }

    fn check_dims(m: usize, n: usize) -> Result<()> {
        if m == 0 || n == 0 {
            return Err(SimError::Geometry(format!(
                "grid dimensions must be positive, got {m}x{n}"
            )));
        }
        Ok(())
    }

    /// Number of delay bins.
    pub fn delay_bins(&self) -> usize {
        self.m
    }

    /// Number of Doppler bins.
    pub fn doppler_bins(&self) -> usize {
        self.n
    }

    pub fn get(&self, delay: usize, doppler: usize) -> Complex64 {
        self.data[delay * self.n + doppler]
    }

    pub fn set(&mut self, delay: usize, doppler: usize, value: Complex64) {
        self.data[delay * self.n + doppler] = value;
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    /// Delay row `b` (all Doppler bins).
    pub fn row(&self, delay: usize) -> &[Complex64] {
        &self.data[delay * self.n..(delay + 1) * self.n]
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for v in &mut self.data {
            *v *= factor;
        }
    }
}

impl fmt::Debug for DelayDopplerGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DelayDopplerGrid")
            .field("m", &self.m)
            .field("n", &self.n)
            .field("energy", &self.energy())
            .finish()
    }
}

/// A contiguous complex baseband sample stream.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFrame {
    pub samples: Vec<Complex64>,
    /// Number of OTFS blocks carried.
    pub blocks: usize,
    /// Samples per block (`M * N`).
    pub block_len: usize,
    /// Samples per second (`1 / T_s`).
    pub sample_rate: f64,
}

impl TimeFrame {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum()
    }
}

/// Planned transforms for one `(M, N)` geometry. Cheap to clone and `Sync`,
/// so one instance can be shared by all trial workers.
#[derive(Clone)]
pub struct OtfsModem {
    m: usize,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    norm: f64,
}

impl fmt::Debug for OtfsModem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OtfsModem")
            .field("m", &self.m)
            .field("n", &self.n)
            .finish()
    }
}

impl OtfsModem {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        DelayDopplerGrid::check_dims(m, n)?;
        let mut planner = FftPlanner::new();
        Ok(Self {
            m,
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            norm: 1.0 / (n as f64).sqrt(),
        })
    }

    pub fn delay_bins(&self) -> usize {
        self.m
    }

    pub fn doppler_bins(&self) -> usize {
        self.n
    }

    pub fn block_len(&self) -> usize {
        self.m * self.n
    }

    fn check_grid(&self, grid: &DelayDopplerGrid) -> Result<()> {
        if grid.m != self.m || grid.n != self.n {
            return Err(SimError::Geometry(format!(
                "grid is {}x{}, modem expects {}x{}",
                grid.m, grid.n, self.m, self.n
            )));
        }
        Ok(())
    }

    /// Modulates one grid into `M * N` samples appended to `out`.
    pub fn modulate_into(&self, grid: &DelayDopplerGrid, out: &mut Vec<Complex64>) -> Result<()> {
        self.check_grid(grid)?;
        let (m_bins, n_bins) = (self.m, self.n);
        let start = out.len();
        out.resize(start + m_bins * n_bins, Complex64::new(0.0, 0.0));
        let mut row = vec![Complex64::new(0.0, 0.0); n_bins];
        let mut scratch =
            vec![Complex64::new(0.0, 0.0); self.inverse.get_inplace_scratch_len()];
        for m in 0..m_bins {
            row.copy_from_slice(grid.row(m));
            self.inverse.process_with_scratch(&mut row, &mut scratch);
            for (n, v) in row.iter().enumerate() {
                out[start + n * m_bins + m] = v * self.norm;
            }
        }
        Ok(())
    }

    pub fn modulate(&self, grid: &DelayDopplerGrid) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(self.block_len());
        self.modulate_into(grid, &mut out)?;
        Ok(out)
    }

    /// Demodulates exactly `M * N` samples into a grid.
    pub fn demodulate(&self, samples: &[Complex64]) -> Result<DelayDopplerGrid> {
        let (m_bins, n_bins) = (self.m, self.n);
        if samples.len() != m_bins * n_bins {
            return Err(SimError::LengthMismatch {
                expected: m_bins * n_bins,
                actual: samples.len(),
            });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); m_bins * n_bins];
        let mut row = vec![Complex64::new(0.0, 0.0); n_bins];
        let mut scratch =
            vec![Complex64::new(0.0, 0.0); self.forward.get_inplace_scratch_len()];
        for m in 0..m_bins {
            for (n, v) in row.iter_mut().enumerate() {
                *v = samples[n * m_bins + m];
            }
            self.forward.process_with_scratch(&mut row, &mut scratch);
            for (dst, v) in data[m * n_bins..(m + 1) * n_bins].iter_mut().zip(&row) {
                *dst = v * self.norm;
            }
        }
        Ok(DelayDopplerGrid {
            m: m_bins,
            n: n_bins,
            data,
        })
    }

    /// Concatenates the modulated blocks into one transmit frame.
    pub fn modulate_frame(&self, grids: &[DelayDopplerGrid], sample_rate: f64) -> Result<TimeFrame> {
        let mut samples = Vec::with_capacity(grids.len() * self.block_len());
        for grid in grids {
            self.modulate_into(grid, &mut samples)?;
        }
        Ok(TimeFrame {
            samples,
            blocks: grids.len(),
            block_len: self.block_len(),
            sample_rate,
        })
    }

    /// Demodulates every complete block of `samples` (trailing samples past
    /// the last full block are ignored).
    pub fn demodulate_blocks(&self, samples: &[Complex64], blocks: usize) -> Result<Vec<DelayDopplerGrid>> {
        let len = self.block_len();
        if samples.len() < blocks * len {
            return Err(SimError::LengthMismatch {
                expected: blocks * len,
                actual: samples.len(),
            });
        }
        samples
            .chunks_exact(len)
            .take(blocks)
            .map(|chunk| self.demodulate(chunk))
            .collect()
    }
}

/// One-block OTFS modulation: `s_n = (1/sqrt(N)) sum_i x_i e^{j 2 pi n i / N}`.
pub fn otfs_modulate(grid: &DelayDopplerGrid) -> TimeFrame {
    let modem = OtfsModem::new(grid.m, grid.n).expect("grid dimensions are validated on construction");
    let samples = modem.modulate(grid).expect("geometry matches by construction");
    TimeFrame {
        samples,
        blocks: 1,
        block_len: grid.m * grid.n,
        sample_rate: 1.0,
    }
}

/// One-block OTFS demodulation back to an `M x N` grid.
pub fn otfs_demodulate(frame: &TimeFrame, m: usize, n: usize) -> Result<DelayDopplerGrid> {
    OtfsModem::new(m, n)?.demodulate(&frame.samples)
}
