use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::chaining::LayerOptions;
use crate::container::{Reader, Writer};
use crate::error::{Error, Result};
use crate::polar::{build_index_sets, EntropyProfile, IndexSets, ProfileMethod, ProfileSet};
use crate::privacy::{cached_moduli, preload_moduli, Modulus};
use crate::quantizer::LayerLaws;
use crate::source::{JointModel, JointSource, ParticipantSet, TestChannel};

const MAGIC: &[u8; 4] = b"PSPC";
const VERSION: u16 = 1;
const MODULI_FILE: &str = "moduli.toml";

/// Profiles and index sets of one layer, keyed by everything that
/// determines them.
#[derive(Clone, Debug, PartialEq)]
pub struct CacheEntry {
    pub key: String,
    pub profiles: ProfileSet,
    pub sets: IndexSets,
}

impl CacheEntry {
    /// `PSPC` layout (little-endian): magic, `u16` version, key as
    /// length-prefixed bytes, the profiles without side information and
    /// given `X`, a `u32` decoder count with a `u32` mask and profile each,
    /// then the index sets: `u32` n, `u64` beta bits, `V_U`, `H_U`,
    /// `V_{U|X}`, a `u32` decoder count with a `u32` mask and index list
    /// each, and the repaired indices. A profile is a `u8` method (0 exact,
    /// 1 Monte Carlo), `u64` samples, `u32` length and the values then the
    /// standard errors as `u64` float bits. An index list is a `u32` count
    /// followed by `u32` indices.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new(MAGIC, VERSION);
        w.bytes(self.key.as_bytes());
        write_profile(&mut w, &self.profiles.none);
        write_profile(&mut w, &self.profiles.given_x);
        w.u32(self.profiles.given_decoders.len());
        for (set, p) in &self.profiles.given_decoders {
            w.u32(set.0 as usize);
            write_profile(&mut w, p);
        }
        let s = &self.sets;
        w.u32(s.params.n);
        w.u64(s.params.beta.to_bits());
        for list in [&s.v_u, &s.h_u, &s.v_u_given_x] {
            write_indices(&mut w, list);
        }
        w.u32(s.h_u_given_y.len());
        for (set, list) in &s.h_u_given_y {
            w.u32(set.0 as usize);
            write_indices(&mut w, list);
        }
        write_indices(&mut w, &s.repaired);
        w.finish()
    }

    /// Parses an entry and checks that its stored sets follow from its profiles.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes, MAGIC, VERSION)?;
        let key = String::from_utf8(r.bytes()?.to_vec()).map_err(|e| Error::Format(format!("cache key: {e}")))?;
        let none = read_profile(&mut r)?;
        let given_x = read_profile(&mut r)?;
        let given_decoders = (0..r.u32()?)
            .map(|_| Ok((ParticipantSet(r.u32()? as u32), read_profile(&mut r)?)))
            .collect::<Result<Vec<_>>>()?;
        let profiles = ProfileSet { none, given_x, given_decoders };
        let n = r.u32()?;
        let beta = f64::from_bits(r.u64()?);
        let v_u = read_indices(&mut r)?;
        let h_u = read_indices(&mut r)?;
        let v_u_given_x = read_indices(&mut r)?;
        let h_u_given_y = (0..r.u32()?)
            .map(|_| Ok((ParticipantSet(r.u32()? as u32), read_indices(&mut r)?)))
            .collect::<Result<Vec<_>>>()?;
        let repaired = read_indices(&mut r)?;
        r.finish()?;
        let params = crate::polar::PolarParams::new(n, beta)?;
        let sets = IndexSets { params, v_u, h_u, v_u_given_x, h_u_given_y, repaired };
        if build_index_sets(&profiles, params)? != sets {
            return Err(Error::Format("cached index sets disagree with cached profiles".into()));
        }
        Ok(CacheEntry { key, profiles, sets })
    }
}

fn write_profile(w: &mut Writer, p: &EntropyProfile) {
    match p.method {
        ProfileMethod::Exact => {
            w.u8(0);
            w.u64(0);
        }
        ProfileMethod::MonteCarlo { samples } => {
            w.u8(1);
            w.u64(samples as u64);
        }
    }
    w.u32(p.values.len());
    for v in p.values.iter().chain(&p.std_err) {
        w.u64(v.to_bits());
    }
}

fn read_profile(r: &mut Reader) -> Result<EntropyProfile> {
    let tag = r.u8()?;
    let samples = r.u64()? as usize;
    let method = match tag {
        0 => ProfileMethod::Exact,
        1 => ProfileMethod::MonteCarlo { samples },
        other => return Err(Error::Format(format!("profile method tag {other}"))),
    };
    let len = r.u32()?;
    let mut floats = (0..2 * len).map(|_| Ok(f64::from_bits(r.u64()?))).collect::<Result<Vec<_>>>()?;
    let std_err = floats.split_off(len);
    Ok(EntropyProfile { values: floats, std_err, method })
}

fn write_indices(w: &mut Writer, list: &[usize]) {
    w.u32(list.len());
    for &i in list {
        w.u32(i);
    }
}

fn read_indices(r: &mut Reader) -> Result<Vec<usize>> {
    (0..r.u32()?).map(|_| r.u32()).collect()
}

/// Everything a layer construction depends on.
pub struct LayerKey<'a> {
    pub source: &'a JointSource,
    pub channel: &'a TestChannel,
    pub laws: &'a LayerLaws,
    pub order: &'a [ParticipantSet],
    pub opts: &'a LayerOptions,
}

impl LayerKey<'_> {
    /// SHA-256 over a canonical text of the inputs, floats as exact bits.
    pub fn digest(&self) -> String {
        let mut text = String::from("polarshare-layer-v1\n");
        let bits = |values: &[f64]| values.iter().map(|v| format!("{:016x}", v.to_bits())).collect::<Vec<_>>().join(",");
        text += &format!("y_sizes={:?}\npmf={}\n", self.source.y_sizes(), bits(self.source.pmf()));
        let rows = |c: &crate::source::BinaryChannel| bits(&c.rows.concat());
        text += &format!("u_given_x={}\n", rows(&self.channel.u_given_x));
        if let Some(layer) = &self.channel.layer {
            text += &format!("v_given_x={}\nu_given_v={}\n", rows(&layer.v_given_x), rows(&layer.u_given_v));
        }
        text += &format!("target={:?}\nbase={:?}\n", self.laws.target, self.laws.base);
        text += &format!("order={:?}\n", self.order.iter().map(|s| s.0).collect::<Vec<_>>());
        text += &format!("n={}\nbeta={}\n", self.opts.params.n, bits(&[self.opts.params.beta]));
        text += &format!("method={:?}\nseed={}\n", self.opts.method, self.opts.seed);
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Outcome of a cache lookup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CacheStatus {
    Hit,
    Miss,
    Disabled,
}

/// On-disk store of layer constructions and hashing moduli.
#[derive(Clone, Debug)]
pub struct ConstructionCache {
    dir: Option<PathBuf>,
}

impl ConstructionCache {
    pub fn at(dir: impl AsRef<Path>) -> Self {
        ConstructionCache { dir: Some(dir.as_ref().to_path_buf()) }
    }

    pub fn disabled() -> Self {
        ConstructionCache { dir: None }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    fn entry_path(&self, digest: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("layer-{digest}.pspc")))
    }

    /// Profiles and index sets for `key`, read from disk when present.
    pub fn layer(&self, model: &JointModel, key: &LayerKey) -> Result<(CacheEntry, CacheStatus)> {
        let digest = key.digest();
        if let Some(path) = self.entry_path(&digest) {
            if let Ok(bytes) = fs::read(&path) {
                match CacheEntry::from_bytes(&bytes) {
                    Ok(entry) if entry.key == digest => {
                        info!("cache hit {}", path.display());
                        return Ok((entry, CacheStatus::Hit));
                    }
                    Ok(_) => warn!("cache entry {} has a foreign key, rebuilding", path.display()),
                    Err(e) => warn!("cache entry {} unreadable ({e}), rebuilding", path.display()),
                }
            }
        }
        let profiles = crate::chaining::LayerCode::profiles(model, key.laws, key.order, key.opts)?;
        let sets = build_index_sets(&profiles, key.opts.params)?;
        let entry = CacheEntry { key: digest.clone(), profiles, sets };
        let status = match self.entry_path(&digest) {
            Some(path) => {
                fs::create_dir_all(path.parent().expect("entry path has a parent"))?;
                fs::write(&path, entry.to_bytes())?;
                CacheStatus::Miss
            }
            None => CacheStatus::Disabled,
        };
        Ok((entry, status))
    }

    /// Loads persisted moduli into the in-process table.
    pub fn load_moduli(&self) -> Result<usize> {
        let Some(path) = self.dir.as_ref().map(|d| d.join(MODULI_FILE)) else { return Ok(0) };
        let Ok(text) = fs::read_to_string(&path) else { return Ok(0) };
        let file: ModuliFile = toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        let count = file.modulus.len();
        preload_moduli(file.modulus.into_iter().map(|e| (e.bits, e.modulus)));
        Ok(count)
    }

    /// Writes the in-process modulus table next to the layer entries.
    pub fn save_moduli(&self) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let modulus: Vec<ModulusEntry> =
            cached_moduli().into_iter().map(|(bits, modulus)| ModulusEntry { bits, modulus }).collect();
        if modulus.is_empty() {
            return Ok(());
        }
        fs::create_dir_all(dir)?;
        let text = toml::to_string(&ModuliFile { modulus }).map_err(|e| Error::Format(format!("{e}")))?;
        fs::write(dir.join(MODULI_FILE), text)?;
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct ModuliFile {
    modulus: Vec<ModulusEntry>,
}

#[derive(Serialize, Deserialize)]
struct ModulusEntry {
    bits: usize,
    #[serde(flatten)]
    modulus: Modulus,
}
