//! One simulated frame end to end: random data, OTFS modulation, a fresh
//! channel draw, per-antenna time-varying convolution with noise, and TR-MRC
//! combining with both output windows.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{apply_antenna, sample_pathset, NoiseSpec, PathSet, PowerDelayProfile};
use crate::error::{Result, SimError};
use crate::grid::{DelayDopplerGrid, OtfsModem};
use crate::qam::{qam_map, Constellation};
use crate::receiver::{
    apply_rdc, make_rdc_window, CsiSnapshot, FrameGeometry, RdcWindow, TrMrcAccumulator,
    WindowMode, ANTENNA_CHUNK,
};

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of integers into one 64-bit seed. Stable across
/// platforms and releases; changing it changes every published result.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

const STREAM_DATA: u64 = 1;
const STREAM_CHANNEL: u64 = 2;
const STREAM_NOISE: u64 = 3;

/// Everything needed to simulate one frame.
#[derive(Debug, Clone)]
pub struct LinkConfig {
    pub geom: FrameGeometry,
    pub sample_period: f64,
    pub pdp: PowerDelayProfile,
    pub doppler_max: f64,
    pub antennas: usize,
    pub noise: NoiseSpec,
    pub constellation: Constellation,
    pub rdc_clip: f64,
}

impl LinkConfig {
    /// EVA channel, `D = M / 2`, 4-QAM, clip threshold 0.1.
    pub fn eva(
        m: usize,
        n: usize,
        blocks: usize,
        sample_period: f64,
        doppler_max: f64,
        antennas: usize,
        noise: NoiseSpec,
    ) -> Result<Self> {
        let cfg = Self {
            geom: FrameGeometry::centered(m, n, blocks)?,
            sample_period,
            pdp: PowerDelayProfile::eva(sample_period),
            doppler_max,
            antennas,
            noise,
            constellation: Constellation::qpsk(),
            rdc_clip: 0.1,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(SimError::InvalidParameter("antenna count must be at least 1".into()));
        }
        let l = self.pdp.taps_len();
        if l > self.geom.m {
            return Err(SimError::Geometry(format!(
                "channel memory L={l} exceeds symbol length M={}",
                self.geom.m
            )));
        }
        if !(self.sample_period > 0.0) || !(self.doppler_max >= 0.0) {
            return Err(SimError::InvalidParameter(
                "sample period must be positive and Doppler non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn rdc_window(&self) -> Result<RdcWindow> {
        make_rdc_window(self.geom.m, self.geom.d, self.doppler_max, self.sample_period, self.rdc_clip)
    }
}

/// Transmit truth plus the receiver output under both windows. Grids are
/// unscaled demodulator outputs.
#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub truth: Vec<DelayDopplerGrid>,
    pub bits: Vec<u8>,
    pub rect: Vec<DelayDopplerGrid>,
    pub rdc: Vec<DelayDopplerGrid>,
    pub window: RdcWindow,
}

impl FrameOutcome {
    pub fn estimates(&self, mode: WindowMode) -> &[DelayDopplerGrid] {
        match mode {
            WindowMode::Rect => &self.rect,
            WindowMode::Rdc => &self.rdc,
        }
    }
}

/// Random bits and the corresponding QAM grids for one frame.
pub fn random_frame_data<R: Rng + ?Sized>(
    geom: &FrameGeometry,
    constellation: &Constellation,
    rng: &mut R,
) -> Result<(Vec<u8>, Vec<DelayDopplerGrid>)> {
    let per_block = geom.m * geom.n;
    let bits: Vec<u8> = (0..geom.blocks * per_block * constellation.bits_per_symbol())
        .map(|_| rng.random_range(0..2u8))
        .collect();
    let symbols = qam_map(&bits, constellation)?;
    let grids = symbols
        .chunks_exact(per_block)
        .map(|chunk| DelayDopplerGrid::from_symbols(geom.m, geom.n, chunk))
        .collect::<Result<_>>()?;
    Ok((bits, grids))
}

/// Pushes `tx` through every antenna of `ps` and combines, without keeping
/// per-antenna frames in memory. Returns the rectangular-window output.
pub fn combine_through_channel(
    tx: &[Complex64],
    ps: &PathSet,
    geom: &FrameGeometry,
    noise: NoiseSpec,
    noise_seed: u64,
) -> Result<Vec<Complex64>> {
    let q = ps.num_antennas();
    let l = ps.taps_len();
    let chunks: Vec<usize> = (0..q).step_by(ANTENNA_CHUNK).collect();
    let partials = chunks
        .par_iter()
        .map(|&start| {
            let mut acc = TrMrcAccumulator::new(*geom, l);
            let mut rx = Vec::with_capacity(tx.len() + l);
            for ant in start..(start + ANTENNA_CHUNK).min(q) {
                let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[noise_seed, ant as u64]));
                apply_antenna(tx, &ps.antennas[ant], l, ps.sample_period, noise, &mut rng, &mut rx);
                let csi = CsiSnapshot::genie_antenna(ps, ant, geom);
                acc.add_antenna(&rx, &csi)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = TrMrcAccumulator::new(*geom, l);
    for p in &partials {
        total.merge(p);
    }
    Ok(total.finish())
}

/// Simulates one frame. Data, channel and noise come from independent streams
/// derived from `seed`, so the outcome is a pure function of `(cfg, seed)`.
pub fn simulate_frame(cfg: &LinkConfig, seed: u64) -> Result<FrameOutcome> {
    cfg.validate()?;
    let geom = cfg.geom;
    let modem = OtfsModem::new(geom.m, geom.n)?;
    let mut data_rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, STREAM_DATA]));
    let (bits, truth) = random_frame_data(&geom, &cfg.constellation, &mut data_rng)?;
    let tx = modem.modulate_frame(&truth, 1.0 / cfg.sample_period)?;

    let mut chan_rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, STREAM_CHANNEL]));
    let ps = sample_pathset(&cfg.pdp, cfg.doppler_max, cfg.antennas, cfg.sample_period, &mut chan_rng);

    let combined = combine_through_channel(
        &tx.samples,
        &ps,
        &geom,
        cfg.noise,
        derive_seed(&[seed, STREAM_NOISE]),
    )?;
    let window = cfg.rdc_window()?;
    let mut corrected = combined.clone();
    apply_rdc(&mut corrected, &window);
    Ok(FrameOutcome {
        rect: modem.demodulate_blocks(&combined, geom.blocks)?,
        rdc: modem.demodulate_blocks(&corrected, geom.blocks)?,
        truth,
        bits,
        window,
    })
}
