//! Time-reversal maximum-ratio combining receiver.
//!
//! Every antenna correlates the `M + L - 1` received samples of OFDM symbol
//! `n` with the conjugated channel snapshot taken at delay sample `D` of that
//! symbol. The first `L - 1` filter outputs (the transient) are dropped, the
//! antennas are averaged, and optionally each delay sample `b` is divided by
//! `J0(beta (b - D))` to undo the residual Doppler attenuation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bessel::bessel_j0;
use crate::channel::{apply_antenna, delay_time_gain, NoiseSpec, PathSet};
use crate::error::{Result, SimError};
use crate::grid::{DelayDopplerGrid, OtfsModem, TimeFrame};

/// Antennas accumulated sequentially before partial sums are merged. Fixed so
/// that the floating-point reduction order never depends on the thread pool.
pub const ANTENNA_CHUNK: usize = 8;

/// Frame layout shared by transmitter and receiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameGeometry {
    /// Delay bins (samples per OFDM symbol).
    pub m: usize,
    /// Doppler bins (OFDM symbols per block).
    pub n: usize,
    /// OTFS blocks per frame.
    pub blocks: usize,
    /// Delay sample at which the CSI snapshot is taken.
    pub d: usize,
}

impl FrameGeometry {
    pub fn new(m: usize, n: usize, blocks: usize, d: usize) -> Result<Self> {
        if m == 0 || n == 0 || blocks == 0 {
            return Err(SimError::Geometry(format!(
                "M, N and blocks must be positive (got M={m}, N={n}, blocks={blocks})"
            )));
        }
        if d >= m {
            return Err(SimError::Geometry(format!("D={d} must lie in [0, M-1] with M={m}")));
        }
        Ok(Self { m, n, blocks, d })
    }

    /// Geometry with the snapshot in the middle of the symbol (`D = M / 2`).
    pub fn centered(m: usize, n: usize, blocks: usize) -> Result<Self> {
        Self::new(m, n, blocks, m / 2)
    }

    /// OFDM symbols per frame.
    pub fn symbols(&self) -> usize {
        self.blocks * self.n
    }

    pub fn frame_len(&self) -> usize {
        self.blocks * self.m * self.n
    }
}

/// Combiner output window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowMode {
    /// Plain transient-discard window.
    Rect,
    /// Transient discard followed by residual Doppler correction.
    Rdc,
}

impl fmt::Display for WindowMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WindowMode::Rect => "rect",
            WindowMode::Rdc => "rdc",
        })
    }
}

impl FromStr for WindowMode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rect" => Ok(WindowMode::Rect),
            "rdc" => Ok(WindowMode::Rdc),
            other => Err(SimError::Config(format!("unknown window mode {other:?} (rect | rdc)"))),
        }
    }
}

/// Genie channel snapshots `h_q[k, M n + D]` for every antenna and symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiSnapshot {
    pub d: usize,
    pub taps_len: usize,
    pub symbols: usize,
    /// `antennas[q][n * L + k]`.
    pub antennas: Vec<Vec<Complex64>>,
}

impl CsiSnapshot {
    /// True channel sampled at the pilot position of every symbol.
    pub fn genie(ps: &PathSet, geom: &FrameGeometry) -> Self {
        let antennas = (0..ps.num_antennas())
            .map(|q| Self::genie_antenna(ps, q, geom))
            .collect();
        Self {
            d: geom.d,
            taps_len: ps.taps_len(),
            symbols: geom.symbols(),
            antennas,
        }
    }

    /// Snapshots of one antenna, `n * L + k` indexed.
    pub fn genie_antenna(ps: &PathSet, q: usize, geom: &FrameGeometry) -> Vec<Complex64> {
        let l = ps.taps_len();
        let mut out = Vec::with_capacity(geom.symbols() * l);
        for n in 0..geom.symbols() {
            let time = geom.m * n + geom.d;
            out.extend((0..l).map(|k| delay_time_gain(ps, q, k, time)));
        }
        out
    }

    pub fn num_antennas(&self) -> usize {
        self.antennas.len()
    }

    /// Snapshot vector (length `L`) of antenna `q`, symbol `n`.
    pub fn taps(&self, q: usize, n: usize) -> &[Complex64] {
        &self.antennas[q][n * self.taps_len..(n + 1) * self.taps_len]
    }
}

/// Per-delay-sample residual Doppler correction coefficients
/// `1 / J0(beta (b - D))`, `beta = 2 pi v_max T_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct RdcWindow {
    pub coeffs: Vec<f64>,
    pub beta: f64,
    pub d: usize,
    pub clip_threshold: f64,
    /// Indices where `|J0| < clip_threshold` and the coefficient was capped.
    pub clipped: Vec<usize>,
}

impl RdcWindow {
    pub fn clipped_count(&self) -> usize {
        self.clipped.len()
    }

    pub fn is_clipped(&self, b: usize) -> bool {
        self.clipped.binary_search(&b).is_ok()
    }

    /// Window that leaves every sample untouched.
    pub fn identity(m: usize, d: usize) -> Self {
        Self {
            coeffs: vec![1.0; m],
            beta: 0.0,
            d,
            clip_threshold: 0.0,
            clipped: Vec::new(),
        }
    }
}

/// Builds the correction window. Coefficients whose Bessel sample falls below
/// `clip_threshold` in magnitude are capped at `±1 / clip_threshold`.
pub fn make_rdc_window(
    m: usize,
    d: usize,
    doppler_max: f64,
    sample_period: f64,
    clip_threshold: f64,
) -> Result<RdcWindow> {
    if !(clip_threshold > 0.0) {
        return Err(SimError::InvalidParameter(format!(
            "clip threshold must be positive, got {clip_threshold}"
        )));
    }
    if d >= m {
        return Err(SimError::Geometry(format!("D={d} must lie in [0, M-1] with M={m}")));
    }
    let beta = 2.0 * std::f64::consts::PI * doppler_max * sample_period;
    let mut clipped = Vec::new();
    let coeffs = (0..m)
        .map(|b| {
            let j = bessel_j0(beta * (b as f64 - d as f64));
            if j.abs() >= clip_threshold {
                1.0 / j
            } else {
                clipped.push(b);
                j.signum() / clip_threshold
            }
        })
        .collect();
    Ok(RdcWindow {
        coeffs,
        beta,
        d,
        clip_threshold,
        clipped,
    })
}

/// Matched filter of one antenna for one symbol:
/// `out[b] = sum_k conj(h[k]) r[b + k]` for `b` in `0..M`, i.e. the filter
/// output with its `L - 1` transient samples discarded.
pub fn tr_filter_symbol(slice: &[Complex64], csi: &[Complex64]) -> Result<Vec<Complex64>> {
    let l = csi.len();
    if l == 0 || slice.len() < l {
        return Err(SimError::LengthMismatch {
            expected: l.max(1),
            actual: slice.len(),
        });
    }
    let m = slice.len() + 1 - l;
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    correlate_into(slice, csi, &mut out);
    Ok(out)
}

#[inline]
fn correlate_into(slice: &[Complex64], csi: &[Complex64], out: &mut [Complex64]) {
    for (k, h) in csi.iter().enumerate() {
        if h.re == 0.0 && h.im == 0.0 {
            continue;
        }
        let hc = h.conj();
        for (o, r) in out.iter_mut().zip(&slice[k..]) {
            *o += hc * r;
        }
    }
}

/// Averages the matched-filter outputs of all antennas for one symbol and
/// applies the output window.
pub fn trmrc_combine(
    slices: &[&[Complex64]],
    csi: &[&[Complex64]],
    window: Option<&RdcWindow>,
) -> Result<Vec<Complex64>> {
    if slices.len() != csi.len() || slices.is_empty() {
        return Err(SimError::AntennaMismatch {
            slices: slices.len(),
            csi: csi.len(),
        });
    }
    let l = csi[0].len();
    let m = slices[0].len() + 1 - l;
    let mut acc = vec![Complex64::new(0.0, 0.0); m];
    for (slice, taps) in slices.iter().zip(csi) {
        if slice.len() != m + l - 1 || taps.len() != l {
            return Err(SimError::LengthMismatch {
                expected: m + l - 1,
                actual: slice.len(),
            });
        }
        correlate_into(slice, taps, &mut acc);
    }
    let inv_q = 1.0 / slices.len() as f64;
    match window {
        Some(w) => {
            for (a, c) in acc.iter_mut().zip(&w.coeffs) {
                *a *= inv_q * c;
            }
        }
        None => {
            for a in &mut acc {
                *a *= inv_q;
            }
        }
    }
    Ok(acc)
}

/// Running sum of matched-filter outputs over antennas for a whole frame.
#[derive(Debug, Clone)]
pub struct TrMrcAccumulator {
    geom: FrameGeometry,
    taps_len: usize,
    sum: Vec<Complex64>,
    antennas: usize,
}

impl TrMrcAccumulator {
    pub fn new(geom: FrameGeometry, taps_len: usize) -> Self {
        Self {
            geom,
            taps_len,
            sum: vec![Complex64::new(0.0, 0.0); geom.frame_len()],
            antennas: 0,
        }
    }

    /// Adds one antenna. `rx` is the frame plus its `L - 1` sample tail and
    /// `csi` the antenna's snapshots (`n * L + k` indexed).
    pub fn add_antenna(&mut self, rx: &[Complex64], csi: &[Complex64]) -> Result<()> {
        let (m, l) = (self.geom.m, self.taps_len);
        let expect = self.geom.frame_len() + l - 1;
        if rx.len() != expect {
            return Err(SimError::LengthMismatch { expected: expect, actual: rx.len() });
        }
        if csi.len() != self.geom.symbols() * l {
            return Err(SimError::LengthMismatch {
                expected: self.geom.symbols() * l,
                actual: csi.len(),
            });
        }
        for (n, out) in self.sum.chunks_exact_mut(m).enumerate() {
            let slice = &rx[n * m..(n + 1) * m + l - 1];
            correlate_into(slice, &csi[n * l..(n + 1) * l], out);
        }
        self.antennas += 1;
        Ok(())
    }

    pub fn merge(&mut self, other: &TrMrcAccumulator) {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        self.antennas += other.antennas;
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    /// Antenna-averaged output with the rectangular window, symbol-major.
    pub fn finish(&self) -> Vec<Complex64> {
        let inv_q = 1.0 / self.antennas.max(1) as f64;
        self.sum.iter().map(|v| v * inv_q).collect()
    }
}

/// Scales delay sample `b` of every symbol by `window.coeffs[b]`.
pub fn apply_rdc(combined: &mut [Complex64], window: &RdcWindow) {
    for sym in combined.chunks_exact_mut(window.coeffs.len()) {
        for (v, c) in sym.iter_mut().zip(&window.coeffs) {
            *v *= c;
        }
    }
}

/// Receiver settings.
#[derive(Debug, Clone)]
pub struct ReceiverConfig {
    pub geom: FrameGeometry,
    pub mode: WindowMode,
    pub rdc: RdcWindow,
}

/// Combines stored per-antenna receive frames and demodulates every block.
/// The returned grids are unscaled; see [`apply_genie_scaling`].
pub fn receive_frame(
    rx: &[TimeFrame],
    csi: &CsiSnapshot,
    cfg: &ReceiverConfig,
) -> Result<Vec<DelayDopplerGrid>> {
    if rx.len() != csi.num_antennas() || rx.is_empty() {
        return Err(SimError::AntennaMismatch { slices: rx.len(), csi: csi.num_antennas() });
    }
    if csi.symbols != cfg.geom.symbols() || csi.d != cfg.geom.d {
        return Err(SimError::Geometry("CSI snapshot does not match frame geometry".into()));
    }
    let partials: Vec<TrMrcAccumulator> = rx
        .par_chunks(ANTENNA_CHUNK)
        .zip(csi.antennas.par_chunks(ANTENNA_CHUNK))
        .map(|(frames, taps)| {
            let mut acc = TrMrcAccumulator::new(cfg.geom, csi.taps_len);
            for (frame, t) in frames.iter().zip(taps) {
                acc.add_antenna(&frame.samples, t)?;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let mut total = TrMrcAccumulator::new(cfg.geom, csi.taps_len);
    for p in &partials {
        total.merge(p);
    }
    let mut combined = total.finish();
    if cfg.mode == WindowMode::Rdc {
        apply_rdc(&mut combined, &cfg.rdc);
    }
    let modem = OtfsModem::new(cfg.geom.m, cfg.geom.n)?;
    modem.demodulate_blocks(&combined, cfg.geom.blocks)
}

/// Least-squares complex scalar `<x_hat, x> / ||x||^2` over a frame.
pub fn ls_gain(estimates: &[DelayDopplerGrid], truth: &[DelayDopplerGrid]) -> Result<Complex64> {
    if estimates.len() != truth.len() {
        return Err(SimError::LengthMismatch { expected: truth.len(), actual: estimates.len() });
    }
    let mut cross = Complex64::new(0.0, 0.0);
    let mut energy = 0.0;
    for (e, t) in estimates.iter().zip(truth) {
        if e.as_slice().len() != t.as_slice().len() {
            return Err(SimError::LengthMismatch {
                expected: t.as_slice().len(),
                actual: e.as_slice().len(),
            });
        }
        for (a, b) in e.as_slice().iter().zip(t.as_slice()) {
            cross += a * b.conj();
            energy += b.norm_sqr();
        }
    }
    if energy == 0.0 {
        return Err(SimError::ZeroEnergy);
    }
    Ok(cross / energy)
}

/// Divides the estimates by their frame-level LS gain against the truth and
/// returns that gain.
pub fn apply_genie_scaling(
    estimates: &mut [DelayDopplerGrid],
    truth: &[DelayDopplerGrid],
) -> Result<Complex64> {
    let gamma = ls_gain(estimates, truth)?;
    if gamma.norm() > 0.0 {
        let inv = gamma.inv();
        for g in estimates.iter_mut() {
            g.scale(inv);
        }
    }
    Ok(gamma)
}

/// The three equivalent gain matrices of symbol `n` after combining.
#[derive(Debug, Clone)]
pub struct EquivalentGain {
    /// `G^(n,n-1)`, `M x M`, row-major. All zero when `n == 0`.
    pub prev: Vec<Complex64>,
    pub current: Vec<Complex64>,
    /// `G^(n,n+1)`. All zero for the last symbol of the frame.
    pub next: Vec<Complex64>,
    pub m: usize,
}

impl EquivalentGain {
    /// Probes the noiseless channel plus combiner with unit impulses placed on
    /// every delay sample of symbols `n-1`, `n` and `n+1`.
    pub fn probe(
        ps: &PathSet,
        geom: &FrameGeometry,
        n: usize,
        window: Option<&RdcWindow>,
    ) -> Result<Self> {
        let symbols = geom.symbols();
        if n >= symbols {
            return Err(SimError::SymbolOutOfRange { index: n, count: symbols });
        }
        let m = geom.m;
        let l = ps.taps_len();
        let csi = CsiSnapshot::genie(ps, geom);
        let taps: Vec<&[Complex64]> = (0..ps.num_antennas()).map(|q| csi.taps(q, n)).collect();
        let column = |sym: usize, b: usize| -> Result<Vec<Complex64>> {
            let mut tx = vec![Complex64::new(0.0, 0.0); geom.frame_len()];
            tx[sym * m + b] = Complex64::new(1.0, 0.0);
            let mut rxs = Vec::with_capacity(ps.num_antennas());
            let mut out = Vec::new();
            let mut unused = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
            for paths in &ps.antennas {
                apply_antenna(&tx, paths, l, ps.sample_period, NoiseSpec::noiseless(), &mut unused, &mut out);
                rxs.push(out[n * m..(n + 1) * m + l - 1].to_vec());
            }
            let slices: Vec<&[Complex64]> = rxs.iter().map(Vec::as_slice).collect();
            trmrc_combine(&slices, &taps, window)
        };
        let matrix = |sym: Option<usize>| -> Result<Vec<Complex64>> {
            let mut g = vec![Complex64::new(0.0, 0.0); m * m];
            if let Some(sym) = sym {
                for b in 0..m {
                    for (a, v) in column(sym, b)?.into_iter().enumerate() {
                        g[a * m + b] = v;
                    }
                }
            }
            Ok(g)
        };
        Ok(Self {
            prev: matrix(n.checked_sub(1))?,
            current: matrix(Some(n))?,
            next: matrix((n + 1 < symbols).then_some(n + 1))?,
            m,
        })
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.m).map(|b| self.current[b * self.m + b]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_pathset, Path, PowerDelayProfile};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TS: f64 = 1.0 / 4.95e6;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn window_identity_without_doppler() {
        let w = make_rdc_window(16, 8, 0.0, TS, 0.1).unwrap();
        assert!(w.coeffs.iter().all(|&v| v == 1.0));
        assert_eq!(w.clipped_count(), 0);
    }

    #[test]
    fn window_center_is_one() {
        for v in [0.0, 5_500.0, 10_900.0, 80_000.0] {
            let w = make_rdc_window(128, 64, v, TS, 0.1).unwrap();
            assert_eq!(w.coeffs[64], 1.0);
        }
    }

    #[test]
    fn window_edge_value() {
        let ts = 202.02e-9;
        let w = make_rdc_window(128, 64, 10_900.0, ts, 0.1).unwrap();
        let beta = 2.0 * std::f64::consts::PI * 10_900.0 * ts;
        assert!((w.beta - beta).abs() < 1e-15);
        assert!((beta - 0.013836).abs() < 1e-5);
        let j = bessel_j0(beta * 63.0);
        assert!((j - 0.8184).abs() < 1e-3);
        assert!((w.coeffs[127] - 1.0 / j).abs() < 1e-12);
    }

    #[test]
    fn window_clipping_bounds_coefficients() {
        // beta * 64 well past the first zero
        let w = make_rdc_window(128, 64, 60_000.0, TS, 0.1).unwrap();
        assert!(w.clipped_count() > 0);
        assert!(w.coeffs.iter().all(|v| v.abs() <= 10.0 + 1e-12));
        for &b in &w.clipped {
            assert!(bessel_j0(w.beta * (b as f64 - 64.0)).abs() < 0.1);
        }
        assert!(make_rdc_window(8, 4, 1.0, TS, 0.0).is_err());
    }

    #[test]
    fn scalar_matched_filter() {
        let h = c(0.3, -0.7);
        let slice: Vec<_> = (0..6).map(|i| c(i as f64, 1.0)).collect();
        let out = tr_filter_symbol(&slice, &[h]).unwrap();
        assert_eq!(out.len(), 6);
        for (o, s) in out.iter().zip(&slice) {
            assert!((o - h.conj() * s).norm() < 1e-15);
        }
        assert!(tr_filter_symbol(&slice[..1], &[h, h]).is_err());
    }

    #[test]
    fn combine_scalar_channels() {
        let s: Vec<_> = (0..5).map(|i| c(1.0 - i as f64, 0.5 * i as f64)).collect();
        let gains = [c(1.0, 0.0), c(0.2, 0.9), c(-1.5, 0.3)];
        let rx: Vec<Vec<_>> = gains.iter().map(|g| s.iter().map(|v| g * v).collect()).collect();
        let csi: Vec<[Complex64; 1]> = gains.iter().map(|g| [*g]).collect();
        let slices: Vec<&[Complex64]> = rx.iter().map(Vec::as_slice).collect();
        let taps: Vec<&[Complex64]> = csi.iter().map(|t| &t[..]).collect();
        let out = trmrc_combine(&slices, &taps, None).unwrap();
        let power = gains.iter().map(|g| g.norm_sqr()).sum::<f64>() / 3.0;
        for (o, v) in out.iter().zip(&s) {
            assert!((o - v * power).norm() < 1e-14);
        }
        assert!(matches!(
            trmrc_combine(&slices, &taps[..2], None),
            Err(SimError::AntennaMismatch { .. })
        ));
    }

    #[test]
    fn identity_channel_single_antenna() {
        let s: Vec<_> = (0..8).map(|i| c(i as f64, -1.0)).collect();
        let one = [c(1.0, 0.0)];
        let out = trmrc_combine(&[&s], &[&one], None).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn diagonal_gain_closed_form() {
        let geom = FrameGeometry::new(6, 2, 2, 3).unwrap();
        let pdp = crate::channel::discretize_pdp(&[(0.0, 0.0), (TS, -1.0), (2.0 * TS, -3.0)], TS).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let ps = sample_pathset(&pdp, 40_000.0, 3, TS, &mut rng);
        for n in [0, 1, 3] {
            let gain = EquivalentGain::probe(&ps, &geom, n, None).unwrap();
            for (b, g) in gain.diagonal().iter().enumerate() {
                let mut expect = c(0.0, 0.0);
                for paths in &ps.antennas {
                    for p in paths {
                        // the snapshot is taken at receive time, so each path keeps
                        // an extra rotation by its own delay
                        let offset = b as f64 - 3.0 + p.tap as f64;
                        let phase = 2.0 * std::f64::consts::PI * p.doppler_hz * offset * TS;
                        expect += p.gain.norm_sqr() * Complex64::cis(phase);
                    }
                }
                expect /= 3.0;
                assert!((g - expect).norm() < 1e-10, "n={n} b={b}");
            }
        }
    }

    #[test]
    fn diagonal_gain_single_tap_paths() {
        let geom = FrameGeometry::new(8, 2, 1, 4).unwrap();
        let pdp = PowerDelayProfile::flat();
        let ps = sample_pathset(&pdp, 25_000.0, 4, TS, &mut ChaCha8Rng::seed_from_u64(8));
        let gain = EquivalentGain::probe(&ps, &geom, 1, None).unwrap();
        for (b, g) in gain.diagonal().iter().enumerate() {
            let expect: Complex64 = ps
                .antennas
                .iter()
                .flatten()
                .map(|p| {
                    let phase = 2.0 * std::f64::consts::PI * p.doppler_hz * (b as f64 - 4.0) * TS;
                    p.gain.norm_sqr() * Complex64::cis(phase)
                })
                .sum::<Complex64>()
                / 4.0;
            assert!((g - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn lti_gains_do_not_depend_on_symbol() {
        let geom = FrameGeometry::new(4, 2, 2, 2).unwrap();
        let pdp = PowerDelayProfile::eva(TS * 4.0);
        let ps = sample_pathset(&pdp, 0.0, 2, TS, &mut ChaCha8Rng::seed_from_u64(3));
        let g1 = EquivalentGain::probe(&ps, &geom, 1, None).unwrap();
        let g2 = EquivalentGain::probe(&ps, &geom, 2, None).unwrap();
        for (a, b) in g1.current.iter().zip(&g2.current).chain(g1.prev.iter().zip(&g2.prev)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn accumulator_rejects_bad_lengths() {
        let geom = FrameGeometry::new(4, 2, 1, 2).unwrap();
        let mut acc = TrMrcAccumulator::new(geom, 3);
        assert!(acc.add_antenna(&vec![c(0.0, 0.0); 9], &vec![c(0.0, 0.0); 6]).is_err());
        assert!(acc.add_antenna(&vec![c(0.0, 0.0); 10], &vec![c(0.0, 0.0); 5]).is_err());
        assert!(acc.add_antenna(&vec![c(0.0, 0.0); 10], &vec![c(0.0, 0.0); 6]).is_ok());
    }

    #[test]
    fn geometry_validation() {
        assert!(FrameGeometry::new(4, 2, 1, 4).is_err());
        assert!(FrameGeometry::new(0, 2, 1, 0).is_err());
        assert_eq!(FrameGeometry::centered(128, 64, 5).unwrap().d, 64);
    }

    #[test]
    fn window_mode_parsing() {
        assert_eq!("rdc".parse::<WindowMode>().unwrap(), WindowMode::Rdc);
        assert_eq!(WindowMode::Rect.to_string(), "rect");
        assert!("hann".parse::<WindowMode>().is_err());
    }

    #[test]
    fn genie_scaling_recovers_scaled_grid() {
        let truth = vec![DelayDopplerGrid::from_vec(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.5, 0.5)]).unwrap()];
        let mut est = truth.clone();
        est[0].scale(c(0.0, 2.0));
        let gamma = apply_genie_scaling(&mut est, &truth).unwrap();
        assert!((gamma - c(0.0, 2.0)).norm() < 1e-15);
        for (a, b) in est[0].as_slice().iter().zip(truth[0].as_slice()) {
            assert!((a - b).norm() < 1e-15);
        }
        let zero = vec![DelayDopplerGrid::zeros(2, 2).unwrap()];
        assert!(matches!(ls_gain(&est, &zero), Err(SimError::ZeroEnergy)));
    }

    #[test]
    fn single_path_lti_recovers_transmit_samples() {
        let geom = FrameGeometry::new(4, 2, 1, 2).unwrap();
        let ps = PathSet::uniform(3, Path { gain: c(1.0, 0.0), tap: 0, doppler_hz: 0.0, angle: 0.0 }, TS);
        let tx: Vec<_> = (0..8).map(|i| c(i as f64, 2.0)).collect();
        let csi = CsiSnapshot::genie(&ps, &geom);
        let mut acc = TrMrcAccumulator::new(geom, 1);
        for q in 0..3 {
            acc.add_antenna(&tx, &csi.antennas[q]).unwrap();
        }
        assert_eq!(acc.finish(), tx);
    }
}
