use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polar::{PolarParams, ProfileMethod, DEFAULT_BETA};
use crate::privacy::SlackPolicy;
use crate::quantizer::FillRule;
use crate::source::{make_bss_source, AccessStructure, BinaryChannel, JointSource, ParticipantSet, TestChannel};

/// One experiment, read from TOML. Only `seed` is mandatory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub source: SourceConfig,
    #[serde(default)]
    pub access: AccessConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub code: CodeConfig,
    #[serde(default)]
    pub share: ShareConfig,
    #[serde(default)]
    pub rates: RatesConfig,
    #[serde(default)]
    pub leakage: LeakageConfig,
    #[serde(default)]
    pub hashcheck: HashcheckConfig,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceConfig {
    /// `X` uniform, `Y_j = X xor Bernoulli(flips[j])`
    Bss { flips: Vec<f64> },
    /// explicit pmf over `(x, y_1, .., y_J)`, `x` most significant
    Pmf { y_sizes: Vec<usize>, pmf: Vec<f64> },
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig::Bss { flips: vec![0.1, 0.1, 0.1] }
    }
}

impl SourceConfig {
    pub fn build(&self) -> Result<JointSource> {
        match self {
            SourceConfig::Bss { flips } => make_bss_source(flips),
            SourceConfig::Pmf { y_sizes, pmf } => JointSource::new(y_sizes.clone(), pmf.clone()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccessConfig {
    /// 1-based member lists
    pub qualified: Vec<Vec<usize>>,
    /// colluding sets; every non-qualified set when absent
    #[serde(default)]
    pub unqualified: Option<Vec<Vec<usize>>>,
    /// decoder order of the chain; the minimal qualified sets when absent
    #[serde(default)]
    pub order: Option<Vec<Vec<usize>>>,
}

impl Default for AccessConfig {
    fn default() -> Self {
        AccessConfig { qualified: vec![vec![1, 2], vec![2, 3], vec![1, 2, 3]], unqualified: None, order: None }
    }
}

impl AccessConfig {
    pub fn build(&self, participants: usize) -> Result<AccessStructure> {
        AccessStructure::new(participants, &self.qualified, self.unqualified.as_deref())
    }

    pub fn decoder_order(&self, access: &AccessStructure) -> Result<Vec<ParticipantSet>> {
        match &self.order {
            Some(lists) => lists
                .iter()
                .map(|m| {
                    let set = ParticipantSet::from_members(m, access.participants())?;
                    if !access.is_qualified(set) {
                        return Err(Error::Config(format!("decoder {set} is not qualified")));
                    }
                    Ok(set)
                })
                .collect(),
            None => {
                let mut listed = Vec::new();
                for m in &self.qualified {
                    let set = ParticipantSet::from_members(m, access.participants())?;
                    if !listed.contains(&set) {
                        listed.push(set);
                    }
                }
                let minimal: Vec<ParticipantSet> = listed
                    .iter()
                    .copied()
                    .filter(|&a| !listed.iter().any(|&b| b != a && b.is_subset_of(a)))
                    .collect();
                Ok(minimal)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ChannelConfig {
    /// `U = X`
    Identity,
    /// `U = X xor Bernoulli(flip)`
    Bsc { flip: f64 },
    /// `U` independent of `X`
    Independent,
    /// `V = X xor Bernoulli(v_flip)`, `U = V xor Bernoulli(u_flip)`
    Layered { v_flip: f64, u_flip: f64 },
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig::Identity
    }
}

impl ChannelConfig {
    pub fn build(&self) -> Result<TestChannel> {
        Ok(match *self {
            ChannelConfig::Identity => TestChannel::single(BinaryChannel::identity()),
            ChannelConfig::Bsc { flip } => TestChannel::single(BinaryChannel::bsc(flip)?),
            ChannelConfig::Independent => TestChannel::single(BinaryChannel::independent()),
            ChannelConfig::Layered { v_flip, u_flip } => {
                TestChannel::layered(BinaryChannel::bsc(v_flip)?, BinaryChannel::bsc(u_flip)?)
            }
        })
    }

    pub fn is_layered(&self) -> bool {
        matches!(self, ChannelConfig::Layered { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodeConfig {
    /// log2 of the block length
    pub n: usize,
    pub beta: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub profile: ProfileKind,
    /// Monte Carlo samples per profile
    pub samples: usize,
    pub fill_rule: FillRule,
    /// blocks per chain level, replacing the computed plan
    pub levels: Option<Vec<usize>>,
}

impl Default for CodeConfig {
    fn default() -> Self {
        CodeConfig {
            n: 10,
            beta: DEFAULT_BETA,
            delta: 0.2,
            epsilon: 0.1,
            profile: ProfileKind::MonteCarlo,
            samples: 20_000,
            fill_rule: FillRule::Conditional,
            levels: None,
        }
    }
}

impl CodeConfig {
    pub fn params(&self) -> Result<PolarParams> {
        PolarParams::new(self.n, self.beta)
    }

    pub fn method(&self) -> ProfileMethod {
        match self.profile {
            ProfileKind::Exact => ProfileMethod::Exact,
            ProfileKind::MonteCarlo => ProfileMethod::MonteCarlo { samples: self.samples },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShareConfig {
    /// independent sharing runs
    pub trials: usize,
    /// repetitions of the chained code per secret
    pub t: usize,
    /// secret length, replacing the computed one
    pub secret_bits: Option<usize>,
    /// the `delta` deducted twice from the secret length
    pub privacy_delta: f64,
    pub slack: SlackPolicy,
    /// leading secret bits histogrammed for the uniformity test
    pub uniformity_bits: usize,
}

impl Default for ShareConfig {
    fn default() -> Self {
        ShareConfig {
            trials: 100,
            t: 1,
            secret_bits: None,
            privacy_delta: 1.0,
            slack: SlackPolicy::SetSizes,
            uniformity_bits: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatesConfig {
    pub flip1: f64,
    pub flip2: f64,
    pub grid: usize,
}

impl Default for RatesConfig {
    fn default() -> Self {
        RatesConfig { flip1: 0.15, flip2: 0.15, grid: 51 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeakageMode {
    Exact,
    Empirical,
}

impl std::str::FromStr for LeakageMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(LeakageMode::Exact),
            "empirical" => Ok(LeakageMode::Empirical),
            other => Err(Error::Config(format!("unknown leakage mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LeakageConfig {
    pub mode: LeakageMode,
    /// log2 block lengths probed
    pub ladder: Vec<usize>,
    /// the colluding set whose view is measured
    pub eavesdropper: Vec<usize>,
    /// secret length, replacing the planned one (capped at 2 bits when exact)
    pub secret_bits: Option<usize>,
    pub feature_bits: usize,
    pub trials: usize,
    pub bootstrap: usize,
}

impl Default for LeakageConfig {
    fn default() -> Self {
        LeakageConfig {
            mode: LeakageMode::Exact,
            ladder: vec![1, 2],
            eavesdropper: vec![1],
            secret_bits: None,
            feature_bits: 1,
            trials: 2000,
            bootstrap: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HashcheckConfig {
    /// largest field degree checked
    pub max_degree: usize,
    /// degrees up to this visit every input pair
    pub full_pairs_up_to: usize,
    /// pairs drawn for larger degrees
    pub sampled_pairs: usize,
    /// input lengths for the linearity and injectivity checks on large fields
    pub large_inputs: Vec<usize>,
}

impl Default for HashcheckConfig {
    fn default() -> Self {
        HashcheckConfig { max_degree: 12, full_pairs_up_to: 8, sampled_pairs: 10_000, large_inputs: vec![1024, 4096] }
    }
}

/// Command-line values that replace configuration entries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub trials: Option<usize>,
    pub n: Option<usize>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub t: Option<usize>,
    pub mode: Option<LeakageMode>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_toml_with(text, &Overrides::default())
    }

    /// Parses `text`, applies `overrides` and validates the result.
    pub fn from_toml_with(text: &str, overrides: &Overrides) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        if let Some(seed) = overrides.seed {
            let seed = i64::try_from(seed).map_err(|_| Error::Config("seed must fit in 63 bits".into()))?;
            table.insert("seed".into(), toml::Value::Integer(seed));
        }
        let mut config: ExperimentConfig = table.try_into().map_err(|e| Error::Config(format!("{e}")))?;
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &Overrides) -> Result<Self> {
        Self::from_toml_with(&std::fs::read_to_string(path)?, overrides)
    }

    fn apply(&mut self, o: &Overrides) {
        if let Some(v) = &o.out_dir {
            self.out_dir = v.clone();
        }
        if let Some(v) = o.trials {
            self.share.trials = v;
            self.leakage.trials = v;
        }
        if let Some(v) = o.n {
            self.code.n = v;
        }
        if let Some(v) = o.beta {
            self.code.beta = v;
        }
        if let Some(v) = o.delta {
            self.code.delta = v;
        }
        if let Some(v) = o.epsilon {
            self.code.epsilon = v;
        }
        if let Some(v) = o.t {
            self.share.t = v;
        }
        if let Some(v) = o.mode {
            self.leakage.mode = v;
        }
    }

    pub fn validate(&self) -> Result<()> {
        let source = self.source.build()?;
        let access = self.access.build(source.participants())?;
        if self.access.decoder_order(&access)?.is_empty() {
            return Err(Error::Config("empty decoder order".into()));
        }
        self.channel.build()?;
        self.code.params()?;
        if !(self.code.delta > 0.0 && self.code.epsilon > 0.0 && self.code.epsilon < 1.0) {
            return Err(Error::Config("code.delta must be positive and code.epsilon in (0, 1)".into()));
        }
        if self.share.trials == 0 || self.share.t == 0 {
            return Err(Error::Config("share.trials and share.t must be positive".into()));
        }
        if !self.leakage.eavesdropper.is_empty() {
            ParticipantSet::from_members(&self.leakage.eavesdropper, source.participants())?;
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}
