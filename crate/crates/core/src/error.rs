use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "quadrature did not converge: relative change {achieved:.3e} > {requested:.3e} at {nodes} nodes per axis"
    )]
    NoConvergence {
        nodes: usize,
        achieved: f64,
        requested: f64,
    },

    #[error(
        "beam is not attenuated by the dipole (interference integral {interference:.6e} >= 0)"
    )]
    DegenerateBeam { interference: f64 },

    #[error(
        "transverse force does not change sign on kd in [{lo}, {hi}] (F = {f_lo:.3e}, {f_hi:.3e})"
    )]
    NoRoot {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("time step {dt:.3e} s exceeds the stability limit {limit:.3e} s")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("spot fit failed: residual {residual:.3e} of peak")]
    FitFailed { residual: f64 },

    #[error("state m_j = 0 is not trapped by a purely circular coupling")]
    Untrapped,

    #[error("consistency check `{what}` failed: {value:.3e}")]
    Inconsistent { what: &'static str, value: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
