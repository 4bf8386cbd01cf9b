//! Simulation and Monte Carlo verification for normalized stable trees.
//!
//! Random trees are drawn as size-conditioned Bienaymé–Galton–Watson trees
//! (or, for `gamma = 2`, from a discretized Brownian excursion), rescaled to
//! unit mass, and the additive functionals
//! `Z_{alpha,beta} = int sigma_{r,x}^alpha H_{r,x}^beta dr mu(dx)` are
//! evaluated exactly on them. The limits of these functionals are compared
//! with subordinator integrals and closed-form moments.

pub mod error;
pub mod functionals;
pub mod oracles;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod subordinator;
pub mod tree;
pub mod verify;
pub mod zoom;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use tree::WeightedTree;
