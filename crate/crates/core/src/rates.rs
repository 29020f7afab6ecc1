//! Closed-form achievable rates evaluated on the exact joint law, and the
//! two-participant trade-off sweep.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::source::{AccessStructure, BinaryChannel, JointModel, JointSource, ParticipantSet, TestChannel, Var};

/// Version tag written in the `schema` column of every CSV row.
pub const CSV_SCHEMA: &str = "v1";

/// A public rate and a secret rate, in bits per source symbol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    /// parameter that produced the point, e.g. the auxiliary flip probability
    pub param: f64,
    pub public_rate: f64,
    pub secret_rate: f64,
}

fn ys(set: ParticipantSet) -> Vec<Var> {
    set.members().into_iter().map(Var::Y).collect()
}

fn with(base: &[Var], extra: Vec<Var>) -> Vec<Var> {
    let mut v = base.to_vec();
    v.extend(extra);
    v
}

/// `min_A I(T;Y_A|B) - max_U I(T;Y_U|B)` before clamping, where the max over
/// no unqualified sets is 0.
fn information_gap(model: &JointModel, access: &AccessStructure, target: Var, base: &[Var]) -> Result<f64> {
    let mut min_qualified = f64::INFINITY;
    for a in access.qualified() {
        min_qualified = min_qualified.min(model.mutual_info(&[target], &ys(*a), base)?);
    }
    let mut max_unqualified = 0.0f64;
    for u in access.unqualified() {
        max_unqualified = max_unqualified.max(model.mutual_info(&[target], &ys(*u), base)?);
    }
    Ok(min_qualified - max_unqualified)
}

fn max_over_qualified(model: &JointModel, access: &AccessStructure, target: Var, base: &[Var]) -> Result<f64> {
    let mut best = 0.0f64;
    for a in access.qualified() {
        best = best.max(model.mutual_info(&[target], &[Var::X], &with(base, ys(*a)))?);
    }
    Ok(best)
}

/// Single-layer rates: `R_s = [min_A I(U;Y_A) - max_U I(U;Y_U)]^+` and
/// `R_p = max_A I(U;X|Y_A)`.
pub fn rate_prop1(model: &JointModel, access: &AccessStructure) -> Result<RatePoint> {
    Ok(RatePoint {
        param: 0.0,
        public_rate: max_over_qualified(model, access, Var::U, &[])?,
        secret_rate: information_gap(model, access, Var::U, &[])?.max(0.0),
    })
}

/// `min_U H(U|Y_U) - max_A H(U|Y_A)`, unclamped, with `H(U)` standing in
/// for the minimum when there are no unqualified sets.
pub fn prop1_entropy_form(model: &JointModel, access: &AccessStructure) -> Result<f64> {
    let mut min_unqualified = model.entropy(&[Var::U])?;
    for u in access.unqualified() {
        min_unqualified = min_unqualified.min(model.cond_entropy(&[Var::U], &ys(*u))?);
    }
    let mut max_qualified = f64::NEG_INFINITY;
    for a in access.qualified() {
        max_qualified = max_qualified.max(model.cond_entropy(&[Var::U], &ys(*a))?);
    }
    Ok(min_unqualified - max_qualified)
}

/// Layered rates: `R_s = [min_A I(V;Y_A|U) - max_U I(V;Y_U|U)]^+` and
/// `R_p = max_A I(U;X|Y_A) + max_A I(V;X|U,Y_A)`.
pub fn rate_thm2(model: &JointModel, access: &AccessStructure) -> Result<RatePoint> {
    if !model.is_layered() {
        return Err(Error::UnknownExpression("layered rates need a layered test channel".into()));
    }
    Ok(RatePoint {
        param: 0.0,
        public_rate: max_over_qualified(model, access, Var::U, &[])?
            + max_over_qualified(model, access, Var::V, &[Var::U])?,
        secret_rate: information_gap(model, access, Var::V, &[Var::U])?.max(0.0),
    })
}

/// Secret capacity with unlimited public communication when every
/// participant is needed: `min over strict subsets S of I(X; Y_all | Y_S)`.
pub fn capacity_cor1(source: &JointSource) -> Result<f64> {
    let model = JointModel::new(source, &TestChannel::single(BinaryChannel::identity()));
    let count = source.participants();
    let all = ys(ParticipantSet::full(count));
    let mut best = f64::INFINITY;
    for mask in 0..(1u32 << count) - 1 {
        best = best.min(model.mutual_info(&[Var::X], &all, &ys(ParticipantSet(mask)))?);
    }
    Ok(best)
}

/// Key rates without an eavesdropper, one participant:
/// `R_s = I(Y;U)`, `R_p = I(U;X) - I(U;Y)`.
pub fn skc_thm5(source: &JointSource, u_given_x: BinaryChannel) -> Result<RatePoint> {
    if source.participants() != 1 {
        return Err(Error::ParticipantRange { participant: source.participants(), count: 1 });
    }
    let model = JointModel::new(source, &TestChannel::single(u_given_x));
    let uy = model.mutual_info(&[Var::U], &[Var::Y(1)], &[])?;
    Ok(RatePoint { param: 0.0, public_rate: model.mutual_info(&[Var::U], &[Var::X], &[])? - uy, secret_rate: uy })
}

/// Key rates with an eavesdropper observing participant 2:
/// `R_s = [I(Y;V|U) - I(Z;V|U)]^+`, `R_p = I(V;X) - I(V;Y)`.
pub fn skc_thm6(source: &JointSource, channel: &TestChannel) -> Result<RatePoint> {
    if source.participants() != 2 {
        return Err(Error::ParticipantRange { participant: source.participants(), count: 2 });
    }
    let model = JointModel::new(source, channel);
    if !model.is_layered() {
        return Err(Error::UnknownExpression("key rates with an eavesdropper need a layered test channel".into()));
    }
    let gap = model.mutual_info(&[Var::Y(1)], &[Var::V], &[Var::U])? - model.mutual_info(&[Var::Y(2)], &[Var::V], &[Var::U])?;
    Ok(RatePoint {
        param: 0.0,
        public_rate: model.mutual_info(&[Var::V], &[Var::X], &[])? - model.mutual_info(&[Var::V], &[Var::Y(1)], &[])?,
        secret_rate: gap.max(0.0),
    })
}

/// The two-participant trade-off: both participants needed, each alone
/// unqualified, auxiliary `X xor N` with `N ~ Bernoulli(param)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub points: Vec<RatePoint>,
    /// points sorted by public rate with the running maximum secret rate
    pub envelope: Vec<RatePoint>,
    /// capacity with unlimited public communication
    pub asymptote: f64,
}

pub fn example1_access() -> AccessStructure {
    AccessStructure::new(2, &[vec![1, 2]], Some(&[vec![1], vec![2]])).expect("fixed access structure")
}

/// Evaluates the layered rates with an empty lower layer and the upper
/// layer `X xor N` at each grid value.
pub fn sweep_example1(flip1: f64, flip2: f64, grid: &[f64]) -> Result<Sweep> {
    let source = crate::source::make_bss_source(&[flip1, flip2])?;
    let access = example1_access();
    let points = grid
        .iter()
        .map(|&q| {
            if !(0.0..=0.5).contains(&q) {
                return Err(Error::ParamRange(format!("auxiliary flip {q} outside [0, 1/2]")));
            }
            let channel = TestChannel::layered(BinaryChannel::bsc(q)?, BinaryChannel::constant());
            let p = rate_thm2(&JointModel::new(&source, &channel), &access)?;
            Ok(RatePoint { param: q, ..p })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { envelope: upper_envelope(&points), asymptote: capacity_cor1(&source)?, points })
}

pub fn upper_envelope(points: &[RatePoint]) -> Vec<RatePoint> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.public_rate.total_cmp(&b.public_rate).then(a.param.total_cmp(&b.param)));
    let mut best = f64::NEG_INFINITY;
    sorted
        .into_iter()
        .map(|p| {
            best = best.max(p.secret_rate);
            RatePoint { secret_rate: best, ..p }
        })
        .collect()
}

/// Grid of `count` evenly spaced values in `[0, 1/2]`.
pub fn flip_grid(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| 0.5 * i as f64 / (count - 1) as f64).collect(),
    }
}

#[derive(Serialize)]
struct CsvRow {
    param: f64,
    #[serde(rename = "R_p")]
    public_rate: f64,
    #[serde(rename = "R_s")]
    secret_rate: f64,
    asymptote: f64,
    schema: &'static str,
}

/// Writes `param,R_p,R_s,asymptote,schema` rows.
pub fn write_csv<W: Write>(points: &[RatePoint], asymptote: f64, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["param", "R_p", "R_s", "asymptote", "schema"]).map_err(|e| Error::Format(e.to_string()))?;
    for p in points {
        w.serialize(CsvRow {
            param: p.param,
            public_rate: p.public_rate,
            secret_rate: p.secret_rate,
            asymptote,
            schema: CSV_SCHEMA,
        })
        .map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::source::make_bss_source;

    #[test]
    fn empty_grid_writes_only_a_header() {
        let mut buf = Vec::new();
        write_csv(&[], 0.0, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "param,R_p,R_s,asymptote,schema\n");
        let mut buf = Vec::new();
        write_csv(&[RatePoint { param: 0.0, public_rate: 0.0, secret_rate: 0.0 }], 0.5, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "param,R_p,R_s,asymptote,schema\n0.0,0.0,0.0,0.5,v1\n");
    }

    #[test]
    fn single_participant_capacity_is_mutual_information() {
        let s = make_bss_source(&[0.11]).unwrap();
        let expect = 1.0 - crate::source::binary_entropy(0.11);
        assert!((capacity_cor1(&s).unwrap() - expect).abs() < 1e-12);
    }
}
