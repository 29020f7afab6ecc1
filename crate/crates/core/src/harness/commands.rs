use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use log::info;
use rand::Rng as _;
use serde::Serialize;

use super::cache::{CacheStatus, ConstructionCache, LayerKey};
use super::config::{ExperimentConfig, LeakageMode};
use super::stats::{three_sigma_bound, wilson, Z95};
use crate::chaining::{layer_rates, BlockPlan, LayerCode, LayerOptions};
use crate::error::{Error, Result};
use crate::privacy::{
    collision_profile, empirical_leakage, exact_leakage, secret_length, share_secret, uniformity, EntropyTerms,
    HashFamily, PairSelection, Scheme,
};
use crate::quantizer::LayerLaws;
use crate::rates::{capacity_cor1, flip_grid, rate_prop1, rate_thm2, sweep_example1, write_csv, CSV_SCHEMA};
use crate::seed;
use crate::source::{AccessStructure, JointModel, JointSource, ParticipantSet, TestChannel, Var};

/// The experiment subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Rates,
    Construct,
    Share,
    Leakage,
    Hashcheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Rates => "rates",
            Command::Construct => "construct",
            Command::Share => "share",
            Command::Leakage => "leakage",
            Command::Hashcheck => "hashcheck",
        }
    }
}

/// A command's text report and the files it wrote.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub report: String,
    pub files: Vec<PathBuf>,
}

/// Runs `command`, writes its outputs under the configured directory and
/// saves the report as `<command>.txt` there.
pub fn run(command: Command, config: &ExperimentConfig) -> Result<CommandOutput> {
    fs::create_dir_all(&config.out_dir)?;
    let cache = ConstructionCache::at(config.out_dir.join("cache"));
    cache.load_moduli()?;
    let mut out = match command {
        Command::Rates => rates(config)?,
        Command::Construct => construct(config, &cache)?,
        Command::Share => share(config, &cache)?,
        Command::Leakage => leakage(config, &cache)?,
        Command::Hashcheck => hashcheck(config)?,
    };
    cache.save_moduli()?;
    writeln!(out.report, "\n# configuration\n{}", config.to_toml()).expect("string write");
    let path = config.out_dir.join(format!("{}.txt", command.name()));
    fs::write(&path, &out.report)?;
    out.files.push(path);
    Ok(out)
}

/// Source, access structure, decoder order and test channel of a config.
pub struct Setup {
    pub source: JointSource,
    pub access: AccessStructure,
    pub order: Vec<ParticipantSet>,
    pub channel: TestChannel,
    pub model: JointModel,
}

impl Setup {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        let source = config.source.build()?;
        let access = config.access.build(source.participants())?;
        let order = config.access.decoder_order(&access)?;
        let channel = config.channel.build()?;
        let model = JointModel::new(&source, &channel);
        Ok(Setup { source, access, order, channel, model })
    }

    pub fn is_layered(&self) -> bool {
        self.channel.layer.is_some()
    }
}

/// Set sizes of one constructed layer beside their entropy limits.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerSummary {
    pub label: &'static str,
    pub digest: String,
    pub status: CacheStatus,
    pub len: usize,
    pub v_u: usize,
    pub h_u: usize,
    pub v_u_given_x: usize,
    pub h_u_given_y: Vec<(ParticipantSet, usize)>,
    pub message_bits: Vec<(ParticipantSet, usize)>,
    pub repaired: usize,
    /// `H(T|B)`, `H(T|B,X)` and `H(T|B,Y_A)` per decoder
    pub entropy: f64,
    pub entropy_given_x: f64,
    pub entropy_given_y: Vec<(ParticipantSet, f64)>,
    pub levels: Vec<usize>,
}

/// Builds the configured scheme through the cache.
pub fn build_scheme(
    config: &ExperimentConfig,
    setup: &Setup,
    cache: &ConstructionCache,
) -> Result<(Scheme, Vec<LayerSummary>)> {
    let code = &config.code;
    let opts = LayerOptions {
        params: code.params()?,
        method: code.method(),
        delta: code.delta,
        epsilon: code.epsilon,
        rule: code.fill_rule,
        seed: seed::derive(config.seed, "construct", 0),
    };
    let mut summaries = Vec::new();
    let mut layer = |label: &'static str, laws: LayerLaws, opts: &LayerOptions| -> Result<LayerCode> {
        let key = LayerKey { source: &setup.source, channel: &setup.channel, laws: &laws, order: &setup.order, opts };
        let (entry, status) = cache.layer(&setup.model, &key)?;
        info!("{label} layer {}: {:?}", entry.key, status);
        let mut built = LayerCode::from_profiles(&setup.model, laws, &setup.order, &entry.profiles, opts)?;
        if let Some(levels) = &code.levels {
            built.plan = BlockPlan::fixed(built.sets.len(), levels.clone())?;
        }
        summaries.push(summarize(label, entry.key, status, &setup.model, &built)?);
        Ok(built)
    };
    let scheme = if setup.is_layered() {
        let half = LayerCode::half_slack(&opts);
        let lower = layer("lower", LayerLaws::single(&setup.model, &setup.order)?, &half)?;
        let upper = layer("upper", LayerLaws::upper(&setup.model, &setup.order)?, &half)?;
        let (lower, upper) = if code.levels.is_some() { (lower, upper) } else { LayerCode::align(lower, upper) };
        for (summary, built) in summaries.iter_mut().zip([&lower, &upper]) {
            summary.levels = built.plan.levels.clone();
        }
        Scheme::Layered { lower, upper }
    } else {
        Scheme::Single(layer("single", LayerLaws::single(&setup.model, &setup.order)?, &opts)?)
    };
    Ok((scheme, summaries))
}

fn summarize(
    label: &'static str,
    digest: String,
    status: CacheStatus,
    model: &JointModel,
    code: &LayerCode,
) -> Result<LayerSummary> {
    let sets = &code.sets;
    let base: Vec<Var> = code.laws.base.into_iter().collect();
    let with = |extra: &[Var]| [base.as_slice(), extra].concat();
    let entropy_given_y = code
        .order
        .iter()
        .map(|a| {
            let ys: Vec<Var> = a.members().into_iter().map(Var::Y).collect();
            Ok((*a, model.cond_entropy(&[code.laws.target], &with(&ys))?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LayerSummary {
        label,
        digest,
        status,
        len: sets.len(),
        v_u: sets.v_u.len(),
        h_u: sets.h_u.len(),
        v_u_given_x: sets.v_u_given_x.len(),
        h_u_given_y: sets.h_u_given_y.iter().map(|(a, l)| (*a, l.len())).collect(),
        message_bits: code
            .order
            .iter()
            .map(|&a| Ok((a, sets.message_positions(a)?.len())))
            .collect::<Result<Vec<_>>>()?,
        repaired: sets.repaired.len(),
        entropy: model.cond_entropy(&[code.laws.target], &base)?,
        entropy_given_x: model.cond_entropy(&[code.laws.target], &with(&[Var::X]))?,
        entropy_given_y,
        levels: code.plan.levels.clone(),
    })
}

fn csv_writer(path: &PathBuf, header: &[&str]) -> Result<csv::Writer<fs::File>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    Ok(w)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

fn rates(config: &ExperimentConfig) -> Result<CommandOutput> {
    let rc = &config.rates;
    let sweep = sweep_example1(rc.flip1, rc.flip2, &flip_grid(rc.grid))?;
    let sweep_path = config.out_dir.join("rates.csv");
    write_csv(&sweep.points, sweep.asymptote, fs::File::create(&sweep_path)?)?;
    let envelope_path = config.out_dir.join("rates_envelope.csv");
    write_csv(&sweep.envelope, sweep.asymptote, fs::File::create(&envelope_path)?)?;

    let mut report = String::from("# rates\n");
    writeln!(
        report,
        "two-participant sweep, flips ({}, {}), {} grid points\nasymptote (unlimited public rate): {:.6}",
        rc.flip1, rc.flip2, rc.grid, sweep.asymptote
    )
    .expect("string write");
    if let (Some(first), Some(last)) = (sweep.envelope.first(), sweep.envelope.last()) {
        writeln!(
            report,
            "envelope: R_p {:.6} .. {:.6}, R_s {:.6} .. {:.6}",
            first.public_rate, last.public_rate, first.secret_rate, last.secret_rate
        )
        .expect("string write");
    }

    let setup = Setup::new(config)?;
    let point = if setup.is_layered() {
        rate_thm2(&setup.model, &setup.access)?
    } else {
        rate_prop1(&setup.model, &setup.access)?
    };
    writeln!(
        report,
        "configured source and channel: R_s {:.6}, R_p {:.6} ({})",
        point.secret_rate,
        point.public_rate,
        if setup.is_layered() { "two layers" } else { "one layer" }
    )
    .expect("string write");
    if setup.source.participants() == 2 {
        writeln!(report, "capacity of the configured source, one qualified pair: {:.6}", capacity_cor1(&setup.source)?)
            .expect("string write");
    }
    Ok(CommandOutput { report, files: vec![sweep_path, envelope_path] })
}

fn write_layer(report: &mut String, s: &LayerSummary) {
    let n = s.len as f64;
    writeln!(report, "[{} layer] N = {}, cache key {}", s.label, s.len, &s.digest[..16]).expect("string write");
    writeln!(report, "  |V_U|/N      = {:.4}   H(T|B)   = {:.4}", s.v_u as f64 / n, s.entropy).expect("string write");
    writeln!(report, "  |H_U|/N      = {:.4}", s.h_u as f64 / n).expect("string write");
    writeln!(report, "  |V_U|X|/N    = {:.4}   H(T|B,X) = {:.4}", s.v_u_given_x as f64 / n, s.entropy_given_x)
        .expect("string write");
    for ((a, size), (_, h)) in s.h_u_given_y.iter().zip(&s.entropy_given_y) {
        writeln!(report, "  |H_U|Y{a}|/N = {:.4}   H(T|B,Y{a}) = {:.4}", *size as f64 / n, h).expect("string write");
    }
    for (a, bits) in &s.message_bits {
        writeln!(report, "  message bits per block for {a}: {bits}").expect("string write");
    }
    writeln!(report, "  repaired indices: {}, chain levels: {:?}", s.repaired, s.levels).expect("string write");
}

fn construct(config: &ExperimentConfig, cache: &ConstructionCache) -> Result<CommandOutput> {
    let setup = Setup::new(config)?;
    let (scheme, summaries) = build_scheme(config, &setup, cache)?;
    let mut report = String::from("# construct\n");
    for s in &summaries {
        write_layer(&mut report, s);
    }
    writeln!(report, "blocks per repetition: {}", scheme.blocks()).expect("string write");
    let files = summaries
        .iter()
        .filter_map(|s| cache.dir().map(|d| d.join(format!("layer-{}.pspc", s.digest))))
        .collect();
    Ok(CommandOutput { report, files })
}

/// Secret length of the configured scheme and the rate terms behind it.
pub fn planned_secret_bits(config: &ExperimentConfig, setup: &Setup, scheme: &Scheme) -> Result<usize> {
    if let Some(bits) = config.share.secret_bits {
        return Ok(bits);
    }
    let top = scheme.top();
    let terms = EntropyTerms::compute(&setup.model, &setup.access, setup.is_layered())?;
    let (rates, _) = layer_rates(&setup.model, &top.laws, &setup.order)?;
    let max_rate = rates.iter().copied().fold(0.0, f64::max);
    let message = setup
        .order
        .iter()
        .map(|&a| top.sets.message_positions(a).map(|m| m.len()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .unwrap_or(0);
    let public_bits = (top.sets.v_u_given_x.len() + message) as f64;
    let slack = config.share.slack.bits_per_block(&top.sets, max_rate, public_bits);
    Ok(secret_length(top.sets.len(), config.share.t, scheme.blocks(), terms, slack, config.share.privacy_delta))
}

/// Per qualified set error counts of a share run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShareRow {
    pub set: String,
    pub trials: usize,
    pub secret_errors: usize,
    pub secret_error_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub repetition_errors: usize,
    pub repetition_error_rate: f64,
    pub bound: f64,
    pub schema: &'static str,
}

fn share(config: &ExperimentConfig, cache: &ConstructionCache) -> Result<CommandOutput> {
    let setup = Setup::new(config)?;
    let (scheme, summaries) = build_scheme(config, &setup, cache)?;
    let secret_bits = planned_secret_bits(config, &setup, &scheme)?;
    let sc = &config.share;
    let qualified = setup.access.qualified().to_vec();
    let mut secret_errors = vec![0usize; qualified.len()];
    let mut repetition_errors = vec![0usize; qualified.len()];
    let mut prefixes = Vec::with_capacity(sc.trials);
    let feature_bits = sc.uniformity_bits.min(secret_bits);
    let mut first_bundle = None;
    let mut public_rate = 0.0;
    for trial in 0..sc.trials {
        let bundle =
            share_secret(&setup.source, &setup.access, &scheme, sc.t, secret_bits, seed::derive(config.seed, "share", trial as u64))?;
        for (i, &a) in qualified.iter().enumerate() {
            secret_errors[i] += bundle.secret_error(a).unwrap_or(true) as usize;
            repetition_errors[i] += bundle.any_repetition_error(a) as usize;
        }
        prefixes.push(bundle.secret[..feature_bits].iter().fold(0u64, |acc, &b| acc << 1 | b as u64));
        public_rate = bundle.public_rate();
        if first_bundle.is_none() {
            first_bundle = Some(bundle);
        }
    }
    let bundle = first_bundle.expect("at least one trial");

    let bound = three_sigma_bound(config.code.epsilon, sc.trials);
    let csv_path = config.out_dir.join("share.csv");
    let mut w = csv_writer(
        &csv_path,
        &[
            "set",
            "trials",
            "secret_errors",
            "secret_error_rate",
            "wilson_low",
            "wilson_high",
            "repetition_errors",
            "repetition_error_rate",
            "bound",
            "schema",
        ],
    )?;
    let mut report = String::from("# share\n");
    for s in &summaries {
        write_layer(&mut report, s);
    }
    writeln!(
        report,
        "secret bits {secret_bits} from {} repetitions of {} blocks of length {}\nsecret rate {:.6}, public rate {:.6} (seed of {} bits excluded)",
        sc.t,
        scheme.blocks(),
        scheme.len(),
        bundle.secret_rate(),
        public_rate,
        bundle.hash_seed.len()
    )
    .expect("string write");
    writeln!(report, "error bound epsilon + 3 sigma = {bound:.4} over {} trials", sc.trials).expect("string write");
    let mut all_within = true;
    for (i, a) in qualified.iter().enumerate() {
        let (lo, hi) = wilson(secret_errors[i], sc.trials, Z95);
        let rate = secret_errors[i] as f64 / sc.trials as f64;
        let rep_rate = repetition_errors[i] as f64 / sc.trials as f64;
        all_within &= rate <= bound;
        w.serialize(ShareRow {
            set: a.to_string(),
            trials: sc.trials,
            secret_errors: secret_errors[i],
            secret_error_rate: rate,
            wilson_low: lo,
            wilson_high: hi,
            repetition_errors: repetition_errors[i],
            repetition_error_rate: rep_rate,
            bound,
            schema: CSV_SCHEMA,
        })
        .map_err(csv_error)?;
        writeln!(
            report,
            "  {a}: secret error {rate:.4} [{lo:.4}, {hi:.4}], some repetition wrong {rep_rate:.4}"
        )
        .expect("string write");
    }
    w.flush()?;
    writeln!(report, "every qualified set within the bound: {}", if all_within { "yes" } else { "no" })
        .expect("string write");
    if feature_bits > 0 {
        let u = uniformity(&prefixes, feature_bits)?;
        writeln!(
            report,
            "uniformity of the first {feature_bits} secret bits: TV plug-in {:.4}, null {:.4}, debiased {:.4}, chi-square p {:.4}",
            u.tv_plugin, u.tv_null, u.tv_debiased, u.p_value
        )
        .expect("string write");
    } else {
        writeln!(report, "uniformity: empty secret").expect("string write");
    }
    let bundle_path = config.out_dir.join("share-bundle.pssb");
    fs::write(&bundle_path, bundle.to_bytes())?;
    writeln!(report, "first secret: {}", if secret_bits == 0 { "(empty)".into() } else { bundle.secret_hex() })
        .expect("string write");
    Ok(CommandOutput { report, files: vec![csv_path, bundle_path] })
}

/// One rung of the leakage ladder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeakageRow {
    pub n: usize,
    pub len: usize,
    pub mode: &'static str,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub secret_bits: usize,
    pub schema: &'static str,
}

fn leakage(config: &ExperimentConfig, cache: &ConstructionCache) -> Result<CommandOutput> {
    let setup = Setup::new(config)?;
    if setup.is_layered() {
        return Err(Error::Config("the leakage probes take a single-layer channel".into()));
    }
    let lc = &config.leakage;
    let eavesdropper = ParticipantSet::from_members(&lc.eavesdropper, setup.source.participants())?;
    if setup.access.is_qualified(eavesdropper) {
        return Err(Error::Config(format!("eavesdropper {eavesdropper} is qualified")));
    }
    let mode = match lc.mode {
        LeakageMode::Exact => "exact",
        LeakageMode::Empirical => "empirical",
    };
    let csv_path = config.out_dir.join("leakage.csv");
    let mut w = csv_writer(&csv_path, &["n", "N", "mode", "estimate", "ci_low", "ci_high", "secret_bits", "schema"])?;
    let mut report = format!("# leakage ({mode}), eavesdropper {eavesdropper}, one block per secret\n");
    if lc.mode == LeakageMode::Empirical {
        writeln!(report, "empirical probe: one-level chain for the first decoder {}", setup.order[0]).expect("string write");
        writeln!(
            report,
            "estimates are plug-in values; intervals are basic bootstrap intervals, which remove the plug-in's upward bias"
        )
        .expect("string write");
    }
    let mut previous: Option<f64> = None;
    let mut nonincreasing = true;
    for &n in &lc.ladder {
        let mut rung = config.clone();
        rung.code.n = n;
        let mut rung_setup = Setup::new(config)?;
        if lc.mode == LeakageMode::Empirical {
            rung_setup.order.truncate(1);
        }
        rung.code.levels = Some(vec![1; rung_setup.order.len()]);
        let (scheme, _) = build_scheme(&rung, &rung_setup, cache)?;
        let planned = planned_secret_bits(&rung, &rung_setup, &scheme)?;
        let Scheme::Single(code) = scheme else { unreachable!("single-layer channel") };
        let len = code.sets.len();
        let bits = match (lc.secret_bits, lc.mode) {
            (Some(b), _) => b.min(len),
            (None, LeakageMode::Exact) => planned.min(2).min(len),
            (None, LeakageMode::Empirical) => planned.min(16),
        };
        let row = match lc.mode {
            LeakageMode::Exact => {
                let value = exact_leakage(&setup.source, &code, eavesdropper, bits)?;
                LeakageRow { n, len, mode, estimate: value, ci_low: value, ci_high: value, secret_bits: bits, schema: CSV_SCHEMA }
            }
            LeakageMode::Empirical if bits == 0 => {
                LeakageRow { n, len, mode, estimate: 0.0, ci_low: 0.0, ci_high: 0.0, secret_bits: 0, schema: CSV_SCHEMA }
            }
            LeakageMode::Empirical => {
                let e = empirical_leakage(
                    &setup.source,
                    &setup.model,
                    &code,
                    eavesdropper,
                    bits,
                    lc.feature_bits.clamp(1, bits),
                    lc.trials,
                    lc.bootstrap,
                    seed::derive(config.seed, "leakage", n as u64),
                )?;
                LeakageRow { n, len, mode, estimate: e.estimate, ci_low: e.ci_low, ci_high: e.ci_high, secret_bits: bits, schema: CSV_SCHEMA }
            }
        };
        if let Some(p) = previous {
            nonincreasing &= row.estimate <= p + 1e-12;
        }
        previous = Some(row.estimate);
        writeln!(
            report,
            "  N = {:>5}: {:.6} bits [{:.6}, {:.6}] for a {}-bit secret",
            row.len, row.estimate, row.ci_low, row.ci_high, row.secret_bits
        )
        .expect("string write");
        w.serialize(&row).map_err(csv_error)?;
    }
    w.flush()?;
    writeln!(report, "nonincreasing along the ladder: {}", if nonincreasing { "yes" } else { "no" }).expect("string write");
    writeln!(
        report,
        "These values are finite-length measurements. They do not certify that leakage vanishes as N grows."
    )
    .expect("string write");
    Ok(CommandOutput { report, files: vec![csv_path] })
}

fn hashcheck(config: &ExperimentConfig) -> Result<CommandOutput> {
    let hc = &config.hashcheck;
    let csv_path = config.out_dir.join("hashcheck.csv");
    let mut w = csv_writer(&csv_path, &["m", "pairs", "r", "worst_collision", "bound", "holds", "schema"])?;
    let mut report = String::from("# hashcheck\n");
    let mut all = true;
    for m in 1..=hc.max_degree {
        let selection = if m <= hc.full_pairs_up_to {
            PairSelection::All
        } else {
            PairSelection::Sampled { pairs: hc.sampled_pairs, seed: seed::derive(config.seed, "hashcheck", m as u64) }
        };
        let profile = collision_profile(m, selection)?;
        for (r, &worst) in profile.worst.iter().enumerate() {
            let bound = (-(r as f64)).exp2();
            w.write_record([
                m.to_string(),
                profile.pairs.to_string(),
                r.to_string(),
                format!("{worst}"),
                format!("{bound}"),
                (worst <= bound + 1e-12).to_string(),
                CSV_SCHEMA.to_string(),
            ])
            .map_err(csv_error)?;
        }
        all &= profile.holds();
        writeln!(
            report,
            "  m = {m:>2}: {} pairs ({}), collision bound {}",
            profile.pairs,
            if matches!(selection, PairSelection::All) { "all" } else { "sampled" },
            if profile.holds() { "holds for every r" } else { "VIOLATED" }
        )
        .expect("string write");
    }
    w.flush()?;
    let mut rng = seed::stream(config.seed, "hashcheck-large", 0);
    for &bits in &hc.large_inputs {
        let family = HashFamily::new(bits, bits.min(64))?;
        let random_bits = |rng: &mut seed::Rng| -> Vec<u8> { (0..bits).map(|_| rng.gen_range(0..2u8)).collect() };
        let mut linear = true;
        for _ in 0..8 {
            let s = family.draw_seed(&mut rng);
            let (a, b) = (random_bits(&mut rng), random_bits(&mut rng));
            let sum: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
            let lhs = family.hash(&s, &sum)?;
            let rhs: Vec<u8> =
                family.hash(&s, &a)?.iter().zip(family.hash(&s, &b)?).map(|(x, y)| x ^ y).collect();
            linear &= lhs == rhs;
        }
        all &= linear;
        writeln!(
            report,
            "  {bits}-bit inputs: field degree {}, modulus {:?}, linear on samples: {}",
            family.field().degree(),
            family.field().modulus(),
            if linear { "yes" } else { "no" }
        )
        .expect("string write");
    }
    writeln!(report, "all checks passed: {}", if all { "yes" } else { "no" }).expect("string write");
    Ok(CommandOutput { report, files: vec![csv_path] })
}
