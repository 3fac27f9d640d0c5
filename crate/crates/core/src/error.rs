use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("pattern has {found} atoms, at least 2 are required")]
    TooFewAtoms { found: usize },

    #[error("atom {atom} does not exist (pattern has {len} atoms)")]
    NoSuchAtom { atom: usize, len: usize },

    #[error("cell of atom {atom} has no area inside the window")]
    EmptyCell { atom: usize },

    #[error("non-finite transform argument")]
    NonFinite,

    #[error("transform argument crosses the principal branch cut (Re(1 + k s) = {re})")]
    BranchCut { re: f64 },

    #[error("transform argument within {distance:e} of a pole")]
    PoleProximity { distance: f64 },

    #[error(
        "quadrature did not converge: estimate {estimate:e}, error {achieved:e} > tolerance {requested:e} after {evaluations} evaluations"
    )]
    Quadrature {
        estimate: f64,
        achieved: f64,
        requested: f64,
        evaluations: usize,
    },

    #[error("inversion integral not converged at s = {s_max}: tail bound {tail_bound:e}, partial sum {partial_sum}")]
    TruncationCap {
        s_max: f64,
        tail_bound: f64,
        partial_sum: f64,
    },

    #[error("coverage {value} outside [0, 1] beyond rounding slack")]
    CoverageOutOfRange { value: f64 },
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and > 0",
        })
    }
}
