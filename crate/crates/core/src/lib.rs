//! Chain-level diffusion of alternating cycles on multicomplexes under
//! amenable group actions, with replayable ℓ¹-invisibility certificates and
//! an exact LP oracle for the ℓ¹-seminorm.
//!
//! The modules follow the pipeline bottom-up:
//!
//! - [`multicomplex`]: finite regular unordered Δ-complexes and algebraic simplices.
//! - [`chains`]: exact rational chains, boundary, ℓ¹ norm, alternation.
//! - [`action`]: automorphisms, orbits, odd stabilizers, homotopy witnesses.
//! - [`diffusion`]: finitely supported measures, diffusion, convolution, synthesis.
//! - [`certifier`]: the norm-halving step, iteration, certificates.
//! - [`homology_lp`]: exact homology and the ℓ¹-seminorm linear program.
//! - [`cover`]: multiplicity, star colorings, barycentric subdivision.
//! - [`models`]: circle window model, prism witnesses, synthetic instances.

pub mod action;
pub mod certifier;
pub mod chains;
pub mod cover;
pub mod diffusion;
pub mod error;
pub mod hashing;
pub mod homology_lp;
pub mod lp;
pub mod models;
pub mod multicomplex;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Q;

/// Default maximum degree for enumerations and witnesses.
pub const DEFAULT_DEGREE_CAP: usize = 4;

/// Environment variable overriding [`DEFAULT_DEGREE_CAP`].
pub const DEGREE_CAP_ENV: &str = "AMENSWEEP_DEGREE_CAP";

/// Degree cap from `AMENSWEEP_DEGREE_CAP`, falling back to the default.
pub fn degree_cap_from_env() -> usize {
    std::env::var(DEGREE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_DEGREE_CAP)
}
