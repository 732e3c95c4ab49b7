use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid Bloch vector: {0}")]
    InvalidBloch(String),

    #[error("channel `{label}` violates completeness: deviation {deviation:e}")]
    IncompleteChannel { label: String, deviation: f64 },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("parameter `{name}` = {value} out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            expected: "[0, 1]",
        })
    }
}
