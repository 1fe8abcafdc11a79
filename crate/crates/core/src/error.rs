use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{what} = {value} is outside the domain ({domain})")]
    Domain { what: &'static str, value: f64, domain: &'static str },

    #[error("form rank or grade mismatch: {0}")]
    Mismatch(String),

    #[error("vertical index {0} is not allowed here; the operation acts on horizontal forms only")]
    VerticalIndex(usize),

    #[error("pole: {0}")]
    Pole(String),

    #[error("series order {got} is too low, need at least {need}")]
    InsufficientOrder { got: usize, need: usize },

    #[error("numerical diagnostic: {0}")]
    Numeric(String),

    #[error("invalid options: {0}")]
    InvalidOptions(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn require(cond: bool, what: &'static str, value: f64, domain: &'static str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Domain { what, value, domain })
    }
}
