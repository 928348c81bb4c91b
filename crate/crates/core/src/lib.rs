//! Cooperative spectrum sharing between primary users (PUs) and secondary
//! users (SUs) of a cognitive radio network.
//!
//! Each PU may lend part of its slot to one SU in exchange for relaying. The
//! crate covers the whole pipeline:
//!
//! - [`channel`]: system constants and Rayleigh block-fading scenarios.
//! - [`rates`]: direct, decode-and-forward and secondary rates and utilities.
//! - [`stackelberg`]: per-pair leader/follower negotiation of `(alpha, beta, P_S)`.
//! - [`matching`]: preference lists, SU-proposing deferred acceptance and
//!   brute-force stability oracles.
//! - [`sim`]: Monte Carlo trials, size sweeps and CSV/JSON output.
//! - [`cli`]: the `spectrum-match` command line.
//!
//! ```
//! use spectrum_match::{channel::SystemParams, sim::simulate};
//!
//! let r = simulate(&SystemParams::with_size(4, 3), 7).unwrap();
//! assert!(r.matching.is_consistent());
//! assert!(r.pu_utilities.iter().zip(&r.profile.r_noncoop).all(|(u, nc)| u >= nc));
//! ```

pub mod channel;
pub mod cli;
pub mod error;
pub mod matching;
pub mod rates;
mod search;
pub mod sim;
pub mod stackelberg;

pub use error::{Error, Result};
