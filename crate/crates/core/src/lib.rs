//! Geometric measures of quantum correlations and coherence built on the
//! quantum Tsallis relative entropy.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: Hermitian eigendecomposition, fractional matrix powers,
//!   Kronecker products and bipartite block extraction.
//! - [`states`]: validated density matrices, bipartite and classical-quantum
//!   states, the Werner and isotropic families, random ensembles.
//! - [`entropies`]: classical and quantum Tsallis divergences, the modified
//!   divergence, the von Neumann limit.
//! - [`correlations`]: the discordlike measures `Q_alpha` and `Q~_alpha`,
//!   their per-basis analytic optimum and closed forms for the two families.
//! - [`coherence`]: fixed-basis and Lüders-measurement coherence measures.
//! - [`optimizer`]: seeded derivative-free minimisation over unitary bases.
//! - [`oracle`]: brute-force verification of the analytic optima.
//!
//! Data-parallel loops (optimizer restarts, oracle trials) run on rayon when
//! the default `parallel` feature is enabled and sequentially otherwise.
//! Results are identical either way.

#![forbid(unsafe_code)]

pub mod coherence;
pub mod correlations;
pub mod entropies;
pub mod error;
pub mod io;
pub mod linalg;
pub mod optimizer;
pub mod oracle;
pub mod par;
pub mod rng;
pub mod states;

pub use entropies::{AlphaParam, ExtendedReal};
pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use optimizer::OptimizerOptions;
pub use states::{BipartiteState, DensityMatrix};
