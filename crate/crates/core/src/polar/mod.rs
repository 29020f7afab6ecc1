//! Source polarization: transform, successive cancellation, entropy profiles
//! and the index sets built from them.

mod decode;
mod law;
mod params;
mod profile;
mod sc;
mod sets;
mod transform;

pub use decode::{decode_with_mask, sc_decode};
pub use law::SideLaw;
pub use params::{PolarParams, DEFAULT_BETA};
pub use profile::{
    entropy_profile, entropy_profile_exact, entropy_profile_mc, EntropyProfile, ProfileMethod,
    EXACT_WORK_LIMIT,
};
pub use sc::{sc_probability, ScEngine};
pub use sets::{
    build_index_sets, complement, construct_index_sets, construct_profiles, difference, is_subset,
    threshold, IndexSets, ProfileSet,
};
pub use transform::{transform, transform_in_place};
