//! Square Gray-labeled QAM constellations with unit average energy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Square QAM constellation. The first half of each symbol's bits selects the
/// in-phase level, the second half the quadrature level, each Gray coded.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    order: usize,
    bits_per_axis: usize,
    levels_per_axis: usize,
    scale: f64,
    points: Vec<Complex64>,
}

impl Constellation {
    pub fn new(order: usize) -> Result<Self> {
        let bits_per_axis = match order {
            4 => 1,
            16 => 2,
            64 => 3,
            _ => return Err(SimError::ConstellationOrder(order)),
        };
        let levels_per_axis = 1 << bits_per_axis;
        // mean of (2i - (L-1))^2 over one axis is (L^2 - 1) / 3
        let scale = (3.0 / (2.0 * (order as f64 - 1.0))).sqrt();
        let mut c = Self {
            order,
            bits_per_axis,
            levels_per_axis,
            scale,
            points: Vec::with_capacity(order),
        };
        c.points = (0..order).map(|label| c.point_for_label(label)).collect();
        Ok(c)
    }

    pub fn qpsk() -> Self {
        Self::new(4).expect("order 4 is supported")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis
    }

    /// Points indexed by their bit label (MSB first).
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn min_distance(&self) -> f64 {
        2.0 * self.scale
    }

    fn level(&self, gray: usize) -> f64 {
        let idx = gray_decode(gray);
        (2.0 * idx as f64 - (self.levels_per_axis as f64 - 1.0)) * self.scale
    }

    fn point_for_label(&self, label: usize) -> Complex64 {
        let i_bits = label >> self.bits_per_axis;
        let q_bits = label & (self.levels_per_axis - 1);
        Complex64::new(self.level(i_bits), self.level(q_bits))
    }

    fn decide_axis(&self, value: f64) -> usize {
        let l = self.levels_per_axis as f64;
        let idx = ((value / self.scale + (l - 1.0)) / 2.0).round().clamp(0.0, l - 1.0) as usize;
        idx ^ (idx >> 1)
    }

    /// Maps a bit label to its point.
    pub fn map_label(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    /// Hard minimum-distance decision returning the bit label.
    pub fn decide_label(&self, symbol: Complex64) -> usize {
        (self.decide_axis(symbol.re) << self.bits_per_axis) | self.decide_axis(symbol.im)
    }
}

fn gray_decode(mut g: usize) -> usize {
    let mut b = g;
    while g > 0 {
        g >>= 1;
        b ^= g;
    }
    b
}

/// Bits (one per byte, 0 or 1) to constellation points.
pub fn qam_map(bits: &[u8], c: &Constellation) -> Result<Vec<Complex64>> {
    let k = c.bits_per_symbol();
    if bits.len() % k != 0 {
        return Err(SimError::LengthMismatch {
            expected: bits.len().div_ceil(k) * k,
            actual: bits.len(),
        });
    }
    Ok(bits
        .chunks_exact(k)
        .map(|chunk| {
            let label = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
            c.map_label(label)
        })
        .collect())
}

/// Minimum-distance hard decisions back to bits.
pub fn qam_demap(symbols: &[Complex64], c: &Constellation) -> Vec<u8> {
    let k = c.bits_per_symbol();
    let mut out = Vec::with_capacity(symbols.len() * k);
    for &s in symbols {
        let label = c.decide_label(s);
        for shift in (0..k).rev() {
            out.push(((label >> shift) & 1) as u8);
        }
    }
    out
}

/// Constellation order as it appears in configs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(try_from = "usize", into = "usize")]
pub enum QamOrder {
    #[default]
    Qam4,
    Qam16,
    Qam64,
}

impl QamOrder {
    pub fn order(self) -> usize {
        match self {
            QamOrder::Qam4 => 4,
            QamOrder::Qam16 => 16,
            QamOrder::Qam64 => 64,
        }
    }

    pub fn constellation(self) -> Constellation {
        Constellation::new(self.order()).expect("enum covers supported orders")
    }
}

impl TryFrom<usize> for QamOrder {
    type Error = String;

    fn try_from(v: usize) -> std::result::Result<Self, String> {
        match v {
            4 => Ok(QamOrder::Qam4),
            16 => Ok(QamOrder::Qam16),
            64 => Ok(QamOrder::Qam64),
            other => Err(format!("unsupported constellation order {other}")),
        }
    }
}

impl From<QamOrder> for usize {
    fn from(o: QamOrder) -> usize {
        o.order()
    }
}
