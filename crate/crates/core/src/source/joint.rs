use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::access::ParticipantSet;
use crate::error::{Error, Result};

const PMF_TOLERANCE: f64 = 1e-12;

/// Exact pmf of `(X, Y_1, ..., Y_J)` with binary `X`.
///
/// Atoms are stored densely in mixed radix with `X` least significant, then
/// `Y_1`, ..., `Y_J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointSource {
    y_sizes: Vec<usize>,
    pmf: Vec<f64>,
}

impl JointSource {
    pub fn new(y_sizes: Vec<usize>, pmf: Vec<f64>) -> Result<Self> {
        if y_sizes.is_empty() {
            return Err(Error::InvalidPmf("at least one participant is required".into()));
        }
        if y_sizes.iter().any(|&s| s == 0 || s > 256) {
            return Err(Error::InvalidPmf("participant alphabets must have 1..=256 symbols".into()));
        }
        let atoms = 2 * y_sizes.iter().product::<usize>();
        if pmf.len() != atoms {
            return Err(Error::InvalidPmf(format!("expected {atoms} atoms, got {}", pmf.len())));
        }
        if pmf.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidPmf("probabilities must be finite and nonnegative".into()));
        }
        let total: f64 = pmf.iter().sum();
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::InvalidPmf(format!("probabilities sum to {total}")));
        }
        Ok(JointSource { y_sizes, pmf })
    }

    pub fn participants(&self) -> usize {
        self.y_sizes.len()
    }

    pub fn y_sizes(&self) -> &[usize] {
        &self.y_sizes
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Decodes a dense atom index into `(x, y_1..y_J)`.
    pub fn atom(&self, mut index: usize) -> (u8, Vec<u8>) {
        let x = (index % 2) as u8;
        index /= 2;
        let ys = self
            .y_sizes
            .iter()
            .map(|&s| {
                let y = (index % s) as u8;
                index /= s;
                y
            })
            .collect();
        (x, ys)
    }

    pub fn prob(&self, x: u8, ys: &[u8]) -> f64 {
        let mut index = 0usize;
        for (j, &y) in ys.iter().enumerate().rev() {
            index = index * self.y_sizes[j] + y as usize;
        }
        self.pmf[index * 2 + x as usize]
    }

    /// Symbol index of `Y_A` in mixed radix over the members of `set`, lowest participant first.
    pub fn side_symbol(&self, set: ParticipantSet, ys: &[u8]) -> usize {
        let mut sym = 0usize;
        for p in set.members().into_iter().rev() {
            sym = sym * self.y_sizes[p - 1] + ys[p - 1] as usize;
        }
        sym
    }

    pub fn side_alphabet(&self, set: ParticipantSet) -> usize {
        set.members().iter().map(|&p| self.y_sizes[p - 1]).product()
    }
}

/// Binary-input, binary-output conditional pmf, `rows[input][output]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryChannel {
    pub rows: [[f64; 2]; 2],
}

impl BinaryChannel {
    pub fn from_rows(rows: [[f64; 2]; 2]) -> Result<Self> {
        for r in rows {
            if r.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (r[0] + r[1] - 1.0).abs() > 1e-12 {
                return Err(Error::ParamRange(format!("channel row {r:?} is not a pmf")));
            }
        }
        Ok(BinaryChannel { rows })
    }

    /// Output = input XOR Bernoulli(`flip`).
    pub fn bsc(flip: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&flip) {
            return Err(Error::ParamRange(format!("flip probability {flip}")));
        }
        Ok(BinaryChannel { rows: [[1.0 - flip, flip], [flip, 1.0 - flip]] })
    }

    pub fn identity() -> Self {
        BinaryChannel { rows: [[1.0, 0.0], [0.0, 1.0]] }
    }

    /// Output uniform and independent of the input.
    pub fn independent() -> Self {
        BinaryChannel { rows: [[0.5, 0.5], [0.5, 0.5]] }
    }

    /// Output is the constant 0; models an empty auxiliary variable.
    pub fn constant() -> Self {
        BinaryChannel { rows: [[1.0, 0.0], [1.0, 0.0]] }
    }

    pub fn compose(self, next: BinaryChannel) -> BinaryChannel {
        let mut rows = [[0.0; 2]; 2];
        for (a, row) in rows.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = (0..2).map(|b| self.rows[a][b] * next.rows[b][c]).sum();
            }
        }
        BinaryChannel { rows }
    }
}

/// Auxiliary test channels: `p_{U|X}`, and for the layered scheme the pair
/// `p_{V|X}`, `p_{U|V}` which realizes the Markov chain `U - V - X`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestChannel {
    pub u_given_x: BinaryChannel,
    pub layer: Option<Layer>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub v_given_x: BinaryChannel,
    pub u_given_v: BinaryChannel,
}

impl TestChannel {
    pub fn single(u_given_x: BinaryChannel) -> Self {
        TestChannel { u_given_x, layer: None }
    }

    pub fn layered(v_given_x: BinaryChannel, u_given_v: BinaryChannel) -> Self {
        TestChannel {
            u_given_x: v_given_x.compose(u_given_v),
            layer: Some(Layer { v_given_x, u_given_v }),
        }
    }
}

/// A random variable of the joint model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    /// 1-based participant.
    Y(usize),
    U,
    V,
}

/// Fully enumerated joint law of `(X, Y_[J], U[, V])`.
#[derive(Clone, Debug)]
pub struct JointModel {
    participants: usize,
    y_sizes: Vec<usize>,
    layered: bool,
    /// values ordered as `[X, Y_1..Y_J, U, V]` (V = 0 when not layered)
    atoms: Vec<(Vec<u8>, f64)>,
}

impl JointModel {
    pub fn new(source: &JointSource, channel: &TestChannel) -> Self {
        let j = source.participants();
        let mut atoms = Vec::new();
        for (idx, &p) in source.pmf().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let (x, ys) = source.atom(idx);
            match channel.layer {
                None => {
                    for u in 0..2u8 {
                        let q = p * channel.u_given_x.rows[x as usize][u as usize];
                        if q > 0.0 {
                            let mut vals = Vec::with_capacity(j + 3);
                            vals.push(x);
                            vals.extend_from_slice(&ys);
                            vals.push(u);
                            vals.push(0);
                            atoms.push((vals, q));
                        }
                    }
                }
                Some(layer) => {
                    for v in 0..2u8 {
                        for u in 0..2u8 {
                            let q = p
                                * layer.v_given_x.rows[x as usize][v as usize]
                                * layer.u_given_v.rows[v as usize][u as usize];
                            if q > 0.0 {
                                let mut vals = Vec::with_capacity(j + 3);
                                vals.push(x);
                                vals.extend_from_slice(&ys);
                                vals.push(u);
                                vals.push(v);
                                atoms.push((vals, q));
                            }
                        }
                    }
                }
            }
        }
        JointModel {
            participants: j,
            y_sizes: source.y_sizes().to_vec(),
            layered: channel.layer.is_some(),
            atoms,
        }
    }

    pub fn participants(&self) -> usize {
        self.participants
    }

    pub fn is_layered(&self) -> bool {
        self.layered
    }

    fn slot(&self, var: Var) -> Result<usize> {
        match var {
            Var::X => Ok(0),
            Var::Y(p) if p >= 1 && p <= self.participants => Ok(p),
            Var::Y(p) => Err(Error::ParticipantRange { participant: p, count: self.participants }),
            Var::U => Ok(self.participants + 1),
            Var::V if self.layered => Ok(self.participants + 2),
            Var::V => Err(Error::UnknownExpression("V requires a layered test channel".into())),
        }
    }

    pub fn alphabet(&self, var: Var) -> usize {
        match var {
            Var::Y(p) => self.y_sizes[p - 1],
            _ => 2,
        }
    }

    /// Entropy in bits of the listed variables.
    pub fn entropy(&self, vars: &[Var]) -> Result<f64> {
        let slots = vars.iter().map(|v| self.slot(*v)).collect::<Result<Vec<_>>>()?;
        let mut marg: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        for (vals, p) in &self.atoms {
            let key: Vec<u8> = slots.iter().map(|&s| vals[s]).collect();
            *marg.entry(key).or_insert(0.0) += p;
        }
        Ok(marg.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum())
    }

    pub fn cond_entropy(&self, target: &[Var], given: &[Var]) -> Result<f64> {
        let mut all = target.to_vec();
        all.extend_from_slice(given);
        Ok(self.entropy(&all)? - self.entropy(given)?)
    }

    /// `I(a; b | given)` in bits.
    pub fn mutual_info(&self, a: &[Var], b: &[Var], given: &[Var]) -> Result<f64> {
        let mut ag = a.to_vec();
        ag.extend_from_slice(given);
        let mut bg = b.to_vec();
        bg.extend_from_slice(given);
        let mut abg = ag.clone();
        abg.extend_from_slice(b);
        Ok(self.entropy(&ag)? + self.entropy(&bg)? - self.entropy(&abg)? - self.entropy(given)?)
    }

    /// Table `P(side = s, target = t)` for a binary target, side symbols in
    /// mixed radix over `side` (first variable least significant).
    pub fn pair_table(&self, target: Var, side: &[Var]) -> Result<Vec<[f64; 2]>> {
        let t = self.slot(target)?;
        let slots = side.iter().map(|v| self.slot(*v)).collect::<Result<Vec<_>>>()?;
        let radices: Vec<usize> = side.iter().map(|v| self.alphabet(*v)).collect();
        let size: usize = radices.iter().product();
        let mut table = vec![[0.0; 2]; size];
        for (vals, p) in &self.atoms {
            let mut sym = 0usize;
            for (k, &s) in slots.iter().enumerate().rev() {
                sym = sym * radices[k] + vals[s] as usize;
            }
            table[sym][vals[t] as usize] += p;
        }
        Ok(table)
    }
}

/// `Y_j = X ⊕ N_j`, `X ~ Bern(1/2)`, independent `N_j ~ Bern(p_j)`.
pub fn make_bss_source(flips: &[f64]) -> Result<JointSource> {
    if flips.is_empty() {
        return Err(Error::ParamRange("at least one participant is required".into()));
    }
    if let Some(p) = flips.iter().find(|p| !(0.0..=0.5).contains(*p)) {
        return Err(Error::ParamRange(format!("flip probability {p} outside [0, 1/2]")));
    }
    let j = flips.len();
    let mut pmf = vec![0.0; 2 << j];
    for (idx, slot) in pmf.iter_mut().enumerate() {
        let x = idx & 1;
        let mut p = 0.5;
        for (k, &f) in flips.iter().enumerate() {
            let y = idx >> (k + 1) & 1;
            p *= if y == x { 1.0 - f } else { f };
        }
        *slot = p;
    }
    JointSource::new(vec![2; j], pmf)
}

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bss_atom_probabilities() {
        let s = make_bss_source(&[0.15, 0.15]).unwrap();
        assert_abs_diff_eq!(s.prob(0, &[0, 0]), 0.5 * 0.85 * 0.85, epsilon = 1e-15);
        assert_abs_diff_eq!(s.prob(0, &[0, 0]), 0.36125, epsilon = 1e-15);
        let noiseless = make_bss_source(&[0.0]).unwrap();
        let atoms: Vec<f64> = noiseless.pmf().iter().copied().filter(|&p| p > 0.0).collect();
        assert_eq!(atoms, vec![0.5, 0.5]);
        assert!(make_bss_source(&[0.6]).is_err());
    }

    #[test]
    fn rejects_bad_pmf() {
        assert!(JointSource::new(vec![2], vec![0.5, 0.5, 0.5, 0.5]).is_err());
        assert!(JointSource::new(vec![2], vec![1.5, -0.5, 0.0, 0.0]).is_err());
        assert!(JointSource::new(vec![2], vec![0.25; 3]).is_err());
    }

    #[test]
    fn marginals_sum_to_one() {
        let s = make_bss_source(&[0.1, 0.2, 0.3]).unwrap();
        let m = JointModel::new(&s, &TestChannel::single(BinaryChannel::bsc(0.05).unwrap()));
        let vars = [Var::X, Var::Y(1), Var::Y(2), Var::Y(3), Var::U];
        for mask in 0u32..32 {
            let subset: Vec<Var> =
                vars.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v).collect();
            let total: f64 = m.pair_table(Var::U, &subset.iter().copied().filter(|v| *v != Var::U).collect::<Vec<_>>())
                .unwrap()
                .iter()
                .map(|r| r[0] + r[1])
                .sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn side_symbols_follow_member_order() {
        let s = make_bss_source(&[0.1, 0.1, 0.1]).unwrap();
        let set = ParticipantSet::from_members(&[1, 3], 3).unwrap();
        assert_eq!(s.side_symbol(set, &[1, 0, 0]), 1);
        assert_eq!(s.side_symbol(set, &[0, 1, 1]), 2);
        assert_eq!(s.side_alphabet(set), 4);
    }
}
