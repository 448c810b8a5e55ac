//! Square-integrable states embedded at the band edges of the Lamé potential.
//!
//! A periodic potential has only extended Bloch states. On the half line
//! x ≥ 0, a band-edge state that vanishes at the origin can seed an
//! isospectral (Darboux) deformation V → Ṽ = V − 2[ln(I₀+λ)]″ whose running
//! integral I₀ = ∫₀ˣ u₀² diverges; the deformed state u₀/(I₀+λ) then decays
//! like 1/x and is square integrable at the *unchanged* band-edge energy —
//! a bound state inside the band spectrum. Chaining a second deformation
//! through the still-extended partner state produces a potential with two
//! such states.
//!
//! The crate implements this construction for the Lamé potentials
//! V = j(j+1)·m·sn²(x, m) (j = 1, 2) and verifies every claimed property
//! numerically and independently: Schrödinger residuals through two separate
//! derivative routes, running-norm integrability classification, and a
//! Hill-discriminant scan that recomputes the band edges from the potential
//! alone.
//!
//! Modules:
//! - [`elliptic`]: sn, cn, dn and K(m) from the arithmetic–geometric mean.
//! - [`grid`]: uniform half-line grids, O(h⁴) cumulative quadrature and
//!   finite-difference stencils.
//! - [`lame`]: closed-form band-edge eigensystem.
//! - [`darboux`]: the deformation engine (single steps and chains).
//! - [`spectral`]: residuals, integrability tests, Floquet discriminant.

pub mod darboux;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod lame;
pub mod spectral;

pub use darboux::{
    deform_once, deform_twice, lame_chain, superpotential, wronskian, DeformationChain,
    DeformationStep, StateSample, Superpotential,
};
pub use elliptic::{
    complete_elliptic_k, jacobi_derivatives, jacobi_elliptic, EllipticModulus, EllipticTriple,
};
pub use error::{Error, Result};
pub use grid::{
    cumulative_integral, derivative_1st, derivative_2nd, log_2nd_derivative_term, Grid,
    SampledFunction,
};
pub use lame::{
    band_edge_states, half_line_seeds, lame_potential, BandEdgeState, DeltaParam, LameConfig,
};
pub use spectral::{
    hill_discriminant_scan, integrability_test, integrability_test_with_threshold,
    normalized_shape_deviation, schrodinger_residual, verify_chain, Classification,
    DiscriminantScan, IntegrabilityResult, SpectralReport, StateReport, BOUND_TAIL_THRESHOLD,
};
