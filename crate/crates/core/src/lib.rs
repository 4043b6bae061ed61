//! Contextual bandits with corrupted context.
//!
//! The crate provides four bandit policies behind one [`bandit::Policy`]
//! interface, an environment that streams a labelled dataset while replacing
//! contexts by noise with a fixed probability, and a harness that runs
//! (policy × corruption level × repetition) grids and summarizes them.
//!
//! * [`numerics`]: seedable streams, Beta/Gaussian samplers, Cholesky and
//!   Sherman–Morrison kernels.
//! * [`bandit`]: Beta Thompson Sampling, sliding-window UCB, linear
//!   Thompson Sampling and the two-level TSCC hybrid.
//! * [`environment`]: corruption process, cyclic round protocol, regret ledger.
//! * [`dataio`]: delimited loaders, normalization, stratified subsampling,
//!   binary cache.
//! * [`harness`]: experiment configuration, grid runner, summaries, curves.
//! * [`synthetic`]: a linear Bernoulli bandit and a sparse classification
//!   generator for experiments without external data.
//!
//! ```
//! use cbcc::bandit::{HyperParams, PolicyKind};
//! use cbcc::numerics::RngStream;
//!
//! let mut policy = PolicyKind::Tscc.build(3, 2, &HyperParams::default(), RngStream::new(7)).unwrap();
//! let context = [0.2, 0.9];
//! let decision = policy.select(&context).unwrap();
//! policy.update(&context, decision, 1).unwrap();
//! ```

pub mod bandit;
pub mod dataio;
pub mod environment;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod synthetic;

pub use error::{Error, Result};
