//! Secret sharing from correlated randomness over a one-way public channel.
//!
//! The dealer observes `X`, participant `j` observes `Y_j`. The dealer
//! quantizes `X` with a polar-coded vector quantizer, publishes block-Markov
//! chained messages that let every qualified set rebuild the quantized
//! sequence, and hashes that sequence with a two-universal family over
//! `GF(2^m)` to obtain the secret.
//!
//! Modules follow the pipeline: [`source`] (laws and information measures),
//! [`polar`] (transform, successive cancellation, index sets), [`quantizer`],
//! [`chaining`], [`privacy`] (field arithmetic, hashing, end-to-end sharing),
//! [`rates`] (closed-form achievable rates) and [`harness`] (configuration,
//! caches, experiment commands).

pub mod bits;
pub mod chaining;
pub mod container;
pub mod error;
pub mod harness;
pub mod polar;
pub mod privacy;
pub mod quantizer;
pub mod rates;
pub mod seed;
pub mod source;

pub use error::{Error, Result};
