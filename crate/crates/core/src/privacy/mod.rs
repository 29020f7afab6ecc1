//! Two-universal hashing over `GF(2^m)`, secret length selection, the
//! end-to-end sharing pipeline and leakage and uniformity probes.

mod field;
mod hash;
mod leakage;
mod length;
mod share;
mod uniformity;
mod universality;

pub use field::{
    all_ones_degree, cached_moduli, clmul64, field_for_input, order_of_two, preload_moduli, prime_factors,
    search_sparse, Field, Modulus, Poly, FROZEN_TABLE, SEARCH_LIMIT,
};
pub use hash::HashFamily;
pub use leakage::{empirical_leakage, exact_leakage, plugin_mutual_information, EmpiricalLeakage, EXACT_LEAKAGE_LIMIT};
pub use length::{secret_length, EntropyTerms, SlackPolicy};
pub use share::{share_secret, Repetition, Scheme, SecretBundle};
pub use uniformity::{binomial_mean_abs_deviation, uniformity, UniformityReport};
pub use universality::{collision_profile, CollisionReport, PairSelection};
