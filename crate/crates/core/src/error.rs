use thiserror::Error;

/// Errors raised by the model, threshold and sweep layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A parameter lies outside its admissible range.
    #[error("{name} = {value} is outside the admissible range {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    /// The bisection bracket `[0, c_max]` holds no sign change of the
    /// pause-minus-race utility gap.
    #[error("no sign change of the utility gap on [0, {c_max}] (gap at 0: {gap_low}, at c_max: {gap_high})")]
    Bracket {
        c_max: f64,
        gap_low: f64,
        gap_high: f64,
    },
    #[error("invalid sweep: {0}")]
    Sweep(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn domain(name: &'static str, value: f64, range: &'static str) -> ModelError {
    ModelError::Domain { name, value, range }
}
