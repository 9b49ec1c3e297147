//! Seeded Monte Carlo sweeps, figure presets and CSV persistence.
//!
//! Every trial seed is `derive_seed([master_seed, cell_index, trial_index])`
//! (SplitMix64 folding, see [`crate::link::derive_seed`]). Cells and trials are
//! independent jobs and results are merged in cell/trial order, so output does
//! not depend on the worker count.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{discretize_pdp, NoiseSpec, PdpTap, PowerDelayProfile, EVA_TAPS};
use crate::error::{Result, SimError};
use crate::link::{derive_seed, simulate_frame, LinkConfig};
use crate::metrics::{evaluate, to_db, CellStats, MetricRecord, CSV_COLUMNS};
use crate::qam::QamOrder;
use crate::receiver::{FrameGeometry, WindowMode};

/// Speed of light used for the velocity to Doppler mapping.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// `v_max = f_c V / (3.6 C)` with `V` in km/h.
pub fn velocity_to_doppler(v_kmh: f64, carrier_hz: f64) -> f64 {
    carrier_hz * v_kmh / (3.6 * SPEED_OF_LIGHT)
}

/// Inverse of [`velocity_to_doppler`].
pub fn doppler_to_velocity(doppler_hz: f64, carrier_hz: f64) -> f64 {
    doppler_hz * 3.6 * SPEED_OF_LIGHT / carrier_hz
}

/// Channel power delay profile: a named preset or explicit taps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PdpSpec {
    Preset(String),
    Taps(Vec<PdpTap>),
}

impl Default for PdpSpec {
    fn default() -> Self {
        PdpSpec::Preset("EVA".into())
    }
}

impl PdpSpec {
    pub fn resolve(&self, sample_period: f64) -> Result<PowerDelayProfile> {
        let taps: Vec<(f64, f64)> = match self {
            PdpSpec::Preset(name) if name.eq_ignore_ascii_case("eva") => {
                EVA_TAPS.iter().map(|&(d, p)| (d * 1e-9, p)).collect()
            }
            PdpSpec::Preset(name) if name.eq_ignore_ascii_case("flat") => vec![(0.0, 0.0)],
            PdpSpec::Preset(name) => {
                return Err(SimError::Config(format!("unknown PDP preset {name:?} (EVA | flat)")))
            }
            PdpSpec::Taps(taps) => taps.iter().map(|t| (t.delay_ns * 1e-9, t.power_db)).collect(),
        };
        discretize_pdp(&taps, sample_period)
    }
}

/// Swept axes. Cells are the cartesian product, ordered `m`, `doppler_hz`,
/// `q`, `snr_db` (outermost first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    pub q: Vec<usize>,
    pub snr_db: Vec<f64>,
    pub doppler_hz: Vec<f64>,
    pub m: Vec<usize>,
}

fn default_modes() -> Vec<WindowMode> {
    vec![WindowMode::Rect, WindowMode::Rdc]
}

fn default_blocks() -> usize {
    5
}

fn default_spacing() -> f64 {
    15e3
}

fn default_carrier() -> f64 {
    5.9e9
}

fn default_bandwidth() -> f64 {
    330.0 * 15e3
}

fn default_clip() -> f64 {
    0.1
}

/// A complete experiment description, readable from and writable to TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub master_seed: u64,
    pub trials: usize,
    /// Doppler bins. Exactly one of `n` and `block_size` must be set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Constant `M * N`; `N = block_size / M` for every swept `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_size: Option<usize>,
    #[serde(default = "default_blocks")]
    pub blocks_per_frame: usize,
    #[serde(default = "default_spacing")]
    pub subcarrier_spacing_hz: f64,
    #[serde(default = "default_carrier")]
    pub carrier_hz: f64,
    /// Transmission bandwidth; the sample period is `1 / bandwidth_hz` unless
    /// `sample_period_s` overrides it.
    #[serde(default = "default_bandwidth")]
    pub bandwidth_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_period_s: Option<f64>,
    /// Snapshot delay index; `M / 2` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default)]
    pub constellation: QamOrder,
    #[serde(default = "default_modes")]
    pub window_modes: Vec<WindowMode>,
    #[serde(default)]
    pub pdp: PdpSpec,
    #[serde(default = "default_clip")]
    pub rdc_clip: f64,
    pub sweep: SweepAxes,
}

/// One point of the sweep grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub index: usize,
    pub m: usize,
    pub n: usize,
    pub doppler_hz: f64,
    pub q: usize,
    pub snr_db: f64,
}

impl ExperimentSpec {
    /// Resolved sampling period `T_s`.
    pub fn sample_period(&self) -> f64 {
        self.sample_period_s.unwrap_or(1.0 / self.bandwidth_hz)
    }

    fn doppler_bins(&self, m: usize) -> usize {
        match (self.n, self.block_size) {
            (Some(n), _) => n,
            (None, Some(bs)) => bs / m,
            (None, None) => 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(SimError::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        match (self.n, self.block_size) {
            (Some(_), Some(_)) | (None, None) => {
                return bad("exactly one of `n` and `block_size` must be set".into())
            }
            (Some(0), _) => return bad("n must be positive".into()),
            _ => {}
        }
        if self.blocks_per_frame == 0 {
            return bad("blocks_per_frame must be positive".into());
        }
        if self.window_modes.is_empty() {
            return bad("window_modes must not be empty".into());
        }
        let ts = self.sample_period();
        if !(ts > 0.0 && ts.is_finite()) {
            return bad(format!("sample period must be positive, got {ts}"));
        }
        if !(self.rdc_clip > 0.0) {
            return bad("rdc_clip must be positive".into());
        }
        if let Some(&q) = self.sweep.q.iter().find(|&&q| q == 0) {
            return bad(format!("antenna count must be positive, got {q}"));
        }
        if let Some(v) = self.sweep.doppler_hz.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return bad(format!("Doppler values must be finite and non-negative, got {v}"));
        }
        if let Some(v) = self.sweep.snr_db.iter().find(|v| !v.is_finite()) {
            return bad(format!("SNR values must be finite, got {v}"));
        }
        let pdp = self.pdp.resolve(ts)?;
        for &m in &self.sweep.m {
            if m == 0 {
                return bad("M must be positive".into());
            }
            if let Some(bs) = self.block_size {
                if bs % m != 0 {
                    return bad(format!("block_size {bs} is not a multiple of M={m}"));
                }
            }
            let d = self.d.unwrap_or(m / 2);
            if d >= m {
                return bad(format!("D={d} must be below M={m}"));
            }
            if pdp.taps_len() > m {
                return bad(format!(
                    "infeasible geometry: channel memory L={} exceeds M={m}",
                    pdp.taps_len()
                ));
            }
        }
        Ok(())
    }

    /// All cells in sweep order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &m in &self.sweep.m {
            for &doppler_hz in &self.sweep.doppler_hz {
                for &q in &self.sweep.q {
                    for &snr_db in &self.sweep.snr_db {
                        out.push(Cell {
                            index: out.len(),
                            m,
                            n: self.doppler_bins(m),
                            doppler_hz,
                            q,
                            snr_db,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn link_config(&self, cell: &Cell) -> Result<LinkConfig> {
        let ts = self.sample_period();
        let cfg = LinkConfig {
            geom: FrameGeometry::new(cell.m, cell.n, self.blocks_per_frame, self.d.unwrap_or(cell.m / 2))?,
            sample_period: ts,
            pdp: self.pdp.resolve(ts)?,
            doppler_max: cell.doppler_hz,
            antennas: cell.q,
            noise: NoiseSpec::from_snr_db(cell.snr_db)?,
            constellation: self.constellation.constellation(),
            rdc_clip: self.rdc_clip,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| SimError::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| SimError::Config(e.to_string()))
    }
}

/// Reads and validates a TOML experiment file. Unknown keys are rejected.
pub fn read_spec(path: impl AsRef<Path>) -> Result<ExperimentSpec> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| SimError::Config(format!("cannot read {}: {e}", path.display())))?;
    let spec = ExperimentSpec::from_toml(&text)
        .map_err(|e| SimError::Config(format!("{}: {e}", path.display())))?;
    spec.validate()?;
    Ok(spec)
}

/// Records of a finished run, one per cell and window mode, in cell order.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub spec: ExperimentSpec,
    pub sample_period: f64,
    pub records: Vec<MetricRecord>,
}

impl ResultTable {
    /// Records matching a predicate, in table order.
    pub fn select<'a>(&'a self, pred: impl Fn(&MetricRecord) -> bool + 'a) -> impl Iterator<Item = &'a MetricRecord> + 'a {
        self.records.iter().filter(move |r| pred(r))
    }
}

/// Runs every cell for `spec.trials` trials on the current rayon pool.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ResultTable> {
    spec.validate()?;
    let cells = spec.cells();
    let configs: Vec<LinkConfig> = cells.iter().map(|c| spec.link_config(c)).collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..cells.len())
        .flat_map(|c| (0..spec.trials).map(move |t| (c, t)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(c, t)| {
            let cfg = &configs[c];
            let seed = derive_seed(&[spec.master_seed, c as u64, t as u64]);
            let outcome = simulate_frame(cfg, seed)?;
            spec.window_modes
                .iter()
                .map(|&mode| evaluate(&outcome, mode, &cfg.constellation))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::with_capacity(cells.len() * spec.window_modes.len());
    for (c, cell) in cells.iter().enumerate() {
        let trials = &results[c * spec.trials..(c + 1) * spec.trials];
        for (k, &mode) in spec.window_modes.iter().enumerate() {
            let mut stats = CellStats::default();
            for t in trials {
                stats.push(t[k]);
            }
            let sinr_linear = stats.sinr_linear();
            records.push(MetricRecord {
                q: cell.q,
                m: cell.m,
                n: cell.n,
                doppler_hz: cell.doppler_hz,
                snr_db: cell.snr_db,
                window_mode: mode,
                seed: spec.master_seed,
                sinr_linear,
                sinr_db: to_db(sinr_linear),
                ber: stats.ber(),
                bits_counted: stats.bits(),
                trials: stats.trials(),
                ci_halfwidth_db: stats.ci_halfwidth_db(),
            });
        }
    }
    Ok(ResultTable {
        spec: spec.clone(),
        sample_period: spec.sample_period(),
        records,
    })
}

/// Runs on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(spec: &ExperimentSpec, threads: usize) -> Result<ResultTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SimError::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(spec))
}

/// Serializes records as CSV, header first, columns in [`CSV_COLUMNS`] order.
pub fn write_csv_to<W: Write>(table: &ResultTable, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for r in &table.records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(table: &ResultTable, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    write_csv_to(table, file)
}

/// Parses a CSV written by [`write_csv`].
pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<MetricRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().ne(CSV_COLUMNS.iter().copied()) {
        return Err(SimError::Config(format!("unexpected CSV header {headers:?}")));
    }
    r.deserialize().map(|rec| rec.map_err(SimError::from)).collect()
}

/// Named figure presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// SINR versus antenna count.
    Fig1,
    /// SINR versus input SNR at constant block size, several `M`.
    Fig2,
    /// BER versus input SNR with and without correction.
    Fig3,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Fig1, Preset::Fig2, Preset::Fig3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Preset::Fig1 => "SINR vs number of BS antennas, input SNR 1 dB, v_max in {0, 5.5, 10.9} kHz",
            Preset::Fig2 => "SINR vs input SNR, MN = 8192, M in {64, 128, 256}, Q = 200",
            Preset::Fig3 => "BER vs input SNR, Q = 200, v_max in {0, 5.5, 10.9} kHz, 4-QAM",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == name)
            .ok_or_else(|| SimError::Config(format!("unknown preset {name:?} (fig1 | fig2 | fig3)")))
    }

    /// Full-size or desk-scale (`quick`) spec.
    pub fn spec(self, quick: bool, master_seed: u64) -> ExperimentSpec {
        let base = |name: &str, trials: usize, sweep: SweepAxes| ExperimentSpec {
            name: name.to_string(),
            master_seed,
            trials,
            n: Some(64),
            block_size: None,
            blocks_per_frame: default_blocks(),
            subcarrier_spacing_hz: default_spacing(),
            carrier_hz: default_carrier(),
            bandwidth_hz: default_bandwidth(),
            sample_period_s: None,
            d: None,
            constellation: QamOrder::Qam4,
            window_modes: default_modes(),
            pdp: PdpSpec::default(),
            rdc_clip: default_clip(),
            sweep,
        };
        match self {
            Preset::Fig1 => base(
                "fig1",
                if quick { 5 } else { 50 },
                SweepAxes {
                    q: if quick { vec![16, 32, 64, 128] } else { (1..=20).map(|k| 10 * k).collect() },
                    snr_db: vec![1.0],
                    doppler_hz: vec![0.0, 5_500.0, 10_900.0],
                    m: vec![128],
                },
            ),
            Preset::Fig2 => {
                let mut spec = base(
                    "fig2",
                    if quick { 3 } else { 50 },
                    SweepAxes {
                        q: vec![200],
                        snr_db: if quick {
                            vec![0.0, 10.0, 20.0]
                        } else {
                            (-2..=6).map(|k| 5.0 * k as f64).collect()
                        },
                        doppler_hz: vec![5_500.0, 11_000.0],
                        m: vec![64, 128, 256],
                    },
                );
                spec.n = None;
                spec.block_size = Some(8192);
                spec
            }
            Preset::Fig3 => base(
                "fig3",
                // 81920 bits per frame; 25 frames clear 2e6 bits per cell
                if quick { 3 } else { 25 },
                SweepAxes {
                    q: vec![200],
                    snr_db: if quick {
                        (0..=8).map(|k| -24.0 + 2.0 * k as f64).collect()
                    } else {
                        (0..=18).map(|k| -26.0 + k as f64).collect()
                    },
                    doppler_hz: vec![0.0, 5_500.0, 10_900.0],
                    m: vec![128],
                },
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doppler_from_velocity() {
        assert_eq!(velocity_to_doppler(0.0, 5.9e9), 0.0);
        assert!((velocity_to_doppler(2000.0, 5.9e9) - 10_925.9).abs() < 0.1);
        assert!((velocity_to_doppler(1000.0, 5.9e9) - 5_463.0).abs() < 0.1);
        assert!((doppler_to_velocity(velocity_to_doppler(777.0, 2e9), 2e9) - 777.0).abs() < 1e-9);
    }

    #[test]
    fn presets_validate() {
        for p in Preset::ALL {
            for quick in [false, true] {
                p.spec(quick, 1).validate().unwrap();
            }
        }
        assert!(Preset::from_name("fig4").is_err());
    }

    #[test]
    fn fig2_keeps_block_size() {
        let spec = Preset::Fig2.spec(true, 0);
        for cell in spec.cells() {
            assert_eq!(cell.m * cell.n, 8192);
        }
    }

    #[test]
    fn sample_period_defaults_to_bandwidth() {
        let spec = Preset::Fig1.spec(true, 0);
        assert!((spec.sample_period() - 1.0 / 4.95e6).abs() < 1e-20);
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = Preset::Fig1.spec(true, 0);
        spec.sweep.m = vec![8];
        let err = spec.validate().unwrap_err();
        assert!(err.to_string().contains("L=13"), "{err}");

        let mut spec = Preset::Fig1.spec(true, 0);
        spec.block_size = Some(8192);
        assert!(spec.validate().is_err());

        let mut spec = Preset::Fig1.spec(true, 0);
        spec.pdp = PdpSpec::Preset("ETU".into());
        assert!(spec.validate().is_err());

        let mut spec = Preset::Fig1.spec(true, 0);
        spec.sweep.q = vec![0];
        assert!(spec.validate().is_err());
    }

    #[test]
    fn custom_taps_resolve() {
        let pdp = PdpSpec::Taps(vec![
            PdpTap { delay_ns: 0.0, power_db: 0.0 },
            PdpTap { delay_ns: 404.04, power_db: 0.0 },
        ])
        .resolve(1.0 / 4.95e6)
        .unwrap();
        assert_eq!(pdp.tap_indices, vec![0, 2]);
    }
}
