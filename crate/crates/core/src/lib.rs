//! Quantization of classifier probability vectors and latency-distortion
//! analysis over finite-blocklength channels.
//!
//! The crate is organised bottom-up:
//!
//! - [`prob`]: simplex points, total variation and f-divergences
//! - [`codec`]: exact ranking of lattice points and top-k position sets
//! - [`quantize`]: uniform (UQ), lattice (LQ) and sparse-lattice (SLQ) codecs
//! - [`budget`]: bit budgets `J(βs)` that guarantee a TV source distortion
//! - [`channel`]: finite-blocklength error models for AWGN and Rayleigh fading
//! - [`optimizer`]: blocklength solvers, βs/βt sweeps and lower convex hulls
//! - [`sim`]: Monte Carlo check of the end-to-end expected distortion bound
//! - [`ingest`]: loading classifier outputs and choosing `k_top`
//! - [`cli`]: the `latdist` command-line front end

pub mod budget;
pub mod channel;
pub mod cli;
pub mod codec;
pub mod error;
pub mod ingest;
pub mod optimizer;
pub mod prob;
pub mod quantize;
pub mod sim;

pub use error::{Error, Result};
pub use prob::{f_divergence, kl_divergence, make_prob_vector, tv_distance, Generator, ProbVector};
