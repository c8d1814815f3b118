use std::fmt;

use umthresh::circuit::CircuitError;
use umthresh::histogram::HistogramError;
use umthresh::neqr::NeqrError;
use umthresh::thresholding::ThresholdError;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "error: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
        }
    }
}

fn from_circuit(e: &CircuitError) -> CliError {
    match e {
        CircuitError::WidthCapExceeded { .. } => CliError::Resource(format!(
            "{e}; use --route per-pixel or raise UMTHRESH_QUBIT_CAP"
        )),
        other => CliError::Data(other.to_string()),
    }
}

impl From<CircuitError> for CliError {
    fn from(e: CircuitError) -> Self {
        from_circuit(&e)
    }
}

impl From<NeqrError> for CliError {
    fn from(e: NeqrError) -> Self {
        match &e {
            NeqrError::Circuit(c) => from_circuit(c),
            NeqrError::ThresholdOutOfRange { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ThresholdError> for CliError {
    fn from(e: ThresholdError) -> Self {
        match &e {
            ThresholdError::Circuit(c) => from_circuit(c),
            _ => CliError::Data(e.to_string()),
        }
    }
}

macro_rules! data_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}

data_error!(
    HistogramError,
    umthresh::image::ImageError,
    umthresh::metrics::MetricsError,
    umthresh::baselines::BaselineError,
    umthresh::povm::PovmError,
    umthresh::stateprep::StatePrepError,
    std::io::Error
);
