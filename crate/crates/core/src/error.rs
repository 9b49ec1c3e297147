use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid grid geometry: {0}")]
    Geometry(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("unsupported constellation order {0} (expected 4, 16 or 64)")]
    ConstellationOrder(usize),

    #[error("power delay profile has no taps")]
    EmptyProfile,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol index {index} out of range (frame holds {count} symbols)")]
    SymbolOutOfRange { index: usize, count: usize },

    #[error("antenna count mismatch: {slices} slices, {csi} CSI entries")]
    AntennaMismatch { slices: usize, csi: usize },

    #[error("truth grid has zero energy")]
    ZeroEnergy,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl SimError {
    /// Whether the error stems from user-supplied configuration.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            SimError::Config(_)
                | SimError::InvalidParameter(_)
                | SimError::Geometry(_)
                | SimError::ConstellationOrder(_)
                | SimError::EmptyProfile
        )
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
