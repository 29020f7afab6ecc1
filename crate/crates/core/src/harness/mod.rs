//! TOML experiment configuration, the on-disk construction cache and the
//! five experiment commands behind the command-line tool.

mod cache;
mod commands;
mod config;
mod stats;

pub use cache::{CacheEntry, CacheStatus, ConstructionCache, LayerKey};
pub use commands::{
    build_scheme, planned_secret_bits, run, Command, CommandOutput, LayerSummary, LeakageRow, Setup, ShareRow,
};
pub use config::{
    AccessConfig, ChannelConfig, CodeConfig, ExperimentConfig, HashcheckConfig, LeakageConfig, LeakageMode, Overrides,
    ProfileKind, RatesConfig, ShareConfig, SourceConfig,
};
pub use stats::{three_sigma_bound, wilson, Z95};
