use thiserror::Error;

/// Errors produced by the simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Fabry-Pérot denominator `1 - r23 r21 exp(2i kz2 a)` vanished.
    #[error("slab resonance pole at q = ({kx:e}, {ky:e}) 1/m, omega = {omega:e} rad/s (|denominator| = {magnitude:e})")]
    ResonancePole {
        kx: f64,
        ky: f64,
        omega: f64,
        magnitude: f64,
    },

    /// `kzi*epsj + kzj*epsi = 0` at a single interface (surface-plasmon pole).
    #[error("interface pole in p-polarized Fresnel coefficients at q = {q:e} 1/m, omega = {omega:e} rad/s")]
    InterfacePole { q: f64, omega: f64 },

    #[error("unknown material `{0}`")]
    UnknownMaterial(String),

    #[error("dispersion table: {0}")]
    Dispersion(String),

    #[error("detection polar angle {0} rad must lie in [0, pi/2)")]
    InvalidAngle(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no propagating idler: sin(theta_i) = {0} exceeds 1")]
    NoPropagatingIdler(f64),

    #[error("profile does not bracket the half maximum on both sides of the peak")]
    IncompleteProfile,

    #[error("biphoton polarization state is undefined (all amplitudes vanish)")]
    UndefinedState,

    #[error("reconstructed density matrix is inconsistent: {0}")]
    ReconstructionInconsistent(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("quadrature oracle did not converge (relative change {0:e})")]
    OracleDivergence(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
