use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("complete elliptic integral K(m) requires 0 <= m < 1, got m = {0}")]
    EllipticDomain(f64),

    #[error("jacobi elliptic functions require 0 <= m <= 1, got m = {0}")]
    JacobiDomain(f64),

    #[error("elliptic modulus must satisfy 0 < m < 1 strictly, got m = {0}")]
    ModulusRange(f64),

    #[error("unsupported j = {0}: closed-form band edges are implemented for j = 1 and j = 2 only")]
    UnsupportedIndex(u32),

    #[error("no band-edge state vanishes at the origin; cannot seed a half-line deformation")]
    NoHalfLineSeed,

    #[error("a two-state deformation needs two origin-vanishing band-edge states, found {0}")]
    NeedTwoSeeds(usize),

    #[error("grid needs an odd point count >= 9, got n = {0}")]
    GridSize(usize),

    #[error("grid extent must be positive and finite, got x_max = {0}")]
    GridExtent(f64),

    #[error("grid mismatch between '{left}' and '{right}'")]
    GridMismatch { left: String, right: String },

    #[error("deformation parameter must be positive, got lambda = {0}")]
    NonpositiveLambda(f64),

    #[error(
        "lambda = {0} < -1 is rejected: on the half line the running integral grows from 0 \
         without bound, so I + lambda vanishes at some x and the deformed potential is singular; \
         use lambda > 0"
    )]
    LambdaSingularRange(f64),

    #[error("singular deformation: I + lambda = {value} <= 0 first occurs at x = {x}")]
    SingularDeformation { x: f64, value: f64 },

    #[error("seed '{label}' does not vanish at the origin: psi(0) = {value}")]
    SeedBoundary { label: String, value: f64 },

    #[error(
        "'{label}' is not a solution of the input potential at E = {energy}: \
         residual {residual:.3e} exceeds {limit:.3e}"
    )]
    InconsistentInput {
        label: String,
        energy: f64,
        residual: f64,
        limit: f64,
    },

    #[error(
        "deformed state '{label}' failed the residual check against the deformed potential: \
         residual {residual:.3e} exceeds {limit:.3e}"
    )]
    DeformationResidual {
        label: String,
        residual: f64,
        limit: f64,
    },

    #[error(
        "domain too short for integrability classification: x_max = {x_max} covers only \
         {covered:.2} potential periods, need at least {required}"
    )]
    DomainTooShort {
        x_max: f64,
        covered: f64,
        required: f64,
    },

    #[error(
        "discriminant integrator step {step:.3e} is too large for the requested energy range \
         (stability requires step * sqrt(max|V - E|) < {limit})"
    )]
    IntegratorAccuracy { step: f64, limit: f64 },

    #[error("energy grid must be strictly increasing")]
    EnergyGridOrder,
}

pub type Result<T> = std::result::Result<T, Error>;
