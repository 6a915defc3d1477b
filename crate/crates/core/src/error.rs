use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Dense assembly refused because the lattice is larger than the cap.
    #[error("lattice of {sites} sites exceeds the dense-assembly cap of {cap}")]
    Capacity { sites: usize, cap: usize },

    #[error("coin angle {theta} makes the transfer matrix singular (|cos θ| ≤ 1e-12)")]
    SingularCoin { theta: f64 },

    #[error("amplitude reached the open-line guard at step {step}")]
    BoundaryReached { step: usize },

    /// `δω·τ` outside `(0, 1)`.
    #[error("model argument δω·τ = {0} outside (0, 1)")]
    Domain(f64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("fit failed: {reason} (residual trace: {trace:?})")]
    Fit {
        reason: String,
        trace: alloc::vec::Vec<f64>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn fit(reason: impl Into<String>) -> Self {
        Error::Fit {
            reason: reason.into(),
            trace: alloc::vec::Vec::new(),
        }
    }
}
