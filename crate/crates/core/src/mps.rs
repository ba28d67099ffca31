//! Binary MPS built from automata, the trace-closed MPS-X ansatz, dense state
//! vectors and Schmidt ranks.

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::automata::{Label, Nfa};
use crate::lang::{checked_word_count, word_from_index, Symbol};
use crate::{Error, Result};

/// Singular values above this count towards the Schmidt rank.
pub const RANK_TOL: f64 = 1e-9;

/// `A^x[i][j] = 1` iff `j` is a successor of `i` on `x`; boundaries mark initial
/// and accepting states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMps {
    d: usize,
    bond: usize,
    a: Vec<Vec<Vec<u8>>>,
    vl: Vec<u8>,
    vr: Vec<u8>,
}

impl BinaryMps {
    pub fn new(a: Vec<Vec<Vec<u8>>>, vl: Vec<u8>, vr: Vec<u8>) -> Result<Self> {
        let d = a.len();
        if d == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let bond = vl.len();
        if vr.len() != bond {
            return Err(Error::Dimension(format!("vl has {bond} entries, vr {}", vr.len())));
        }
        for (x, m) in a.iter().enumerate() {
            if m.len() != bond || m.iter().any(|row| row.len() != bond) {
                return Err(Error::Dimension(format!("A^{x} is not {bond}x{bond}")));
            }
            for (i, row) in m.iter().enumerate() {
                if let Some(j) = row.iter().position(|&v| v > 1) {
                    return Err(Error::NonBinary(format!("A^{x}[{i}][{j}]")));
                }
            }
        }
        if let Some(i) = vl.iter().position(|&v| v > 1) {
            return Err(Error::NonBinary(format!("vl[{i}]")));
        }
        if let Some(i) = vr.iter().position(|&v| v > 1) {
            return Err(Error::NonBinary(format!("vr[{i}]")));
        }
        Ok(BinaryMps { d, bond, a, vl, vr })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn bond(&self) -> usize {
        self.bond
    }

    pub fn matrix(&self, x: Symbol) -> &Vec<Vec<u8>> {
        &self.a[x]
    }

    pub fn vl(&self) -> &[u8] {
        &self.vl
    }

    pub fn vr(&self) -> &[u8] {
        &self.vr
    }

    /// `<v_l| A^{w_1} ... A^{w_N} |v_r>`: the number of accepting paths of `w`.
    pub fn amplitude(&self, w: &[Symbol]) -> BigUint {
        let mut row: Vec<BigUint> = self.vl.iter().map(|&v| BigUint::from(v)).collect();
        for &x in w {
            let mut next = vec![BigUint::zero(); self.bond];
            for (i, ri) in row.iter().enumerate() {
                if ri.is_zero() {
                    continue;
                }
                for (j, &aij) in self.a[x][i].iter().enumerate() {
                    if aij == 1 {
                        next[j] += ri;
                    }
                }
            }
            row = next;
        }
        row.iter().zip(&self.vr).filter(|(_, &r)| r == 1).map(|(v, _)| v).sum()
    }

    /// Dense state `sum_w c_w |w>` over all words of length `n`.
    pub fn state_vector(&self, n: usize) -> Result<StateVector> {
        let total = checked_word_count(self.d, n)?;
        let mut amps = vec![Complex64::zero(); total];
        // Depth-first over prefixes, carrying the row vector <v_l|A^prefix.
        let start: Vec<f64> = self.vl.iter().map(|&v| f64::from(v)).collect();
        let mut stack = vec![(0usize, 0usize, start)];
        while let Some((depth, index, row)) = stack.pop() {
            if depth == n {
                let value: f64 = row.iter().zip(&self.vr).map(|(a, &b)| a * f64::from(b)).sum();
                amps[index] = Complex64::new(value, 0.0);
                continue;
            }
            for x in 0..self.d {
                let mut next = vec![0.0; self.bond];
                for (i, &ri) in row.iter().enumerate() {
                    if ri != 0.0 {
                        for (j, &aij) in self.a[x][i].iter().enumerate() {
                            if aij == 1 {
                                next[j] += ri;
                            }
                        }
                    }
                }
                stack.push((depth + 1, index * self.d + x, next));
            }
        }
        Ok(StateVector { d: self.d, n, amps })
    }

    pub fn to_json(&self) -> MpsJson {
        MpsJson {
            d: self.d,
            bond: self.bond,
            a: self.a.iter().map(|m| m.iter().map(|r| r.iter().map(|&v| Num::Int(v.into())).collect()).collect()).collect(),
            vl: Some(self.vl.iter().map(|&v| Num::Int(v.into())).collect()),
            vr: Some(self.vr.iter().map(|&v| Num::Int(v.into())).collect()),
            x: None,
        }
    }
}

pub fn nfa_to_mps(nfa: &Nfa) -> Result<BinaryMps> {
    nfa.require_epsilon_free()?;
    let n = nfa.states();
    let mut a = vec![vec![vec![0u8; n]; n]; nfa.d()];
    for &(p, label, q) in nfa.transitions() {
        if let Label::Sym(x) = label {
            a[x][p][q] = 1;
        }
    }
    let mut vl = vec![0u8; n];
    let mut vr = vec![0u8; n];
    for &q in nfa.initial() {
        vl[q] = 1;
    }
    for &q in nfa.accepting() {
        vr[q] = 1;
    }
    BinaryMps::new(a, vl, vr).or_else(|_| {
        // An empty alphabet cannot arise from an automaton; only zero states can.
        Ok(BinaryMps { d: nfa.d(), bond: 0, a: vec![Vec::new(); nfa.d()], vl: Vec::new(), vr: Vec::new() })
    })
}

pub fn mps_to_nfa(mps: &BinaryMps) -> Nfa {
    let mut nfa = Nfa::new(mps.d, mps.bond);
    for q in 0..mps.bond {
        if mps.vl[q] == 1 {
            nfa.set_initial(q).unwrap();
        }
        if mps.vr[q] == 1 {
            nfa.set_accepting(q).unwrap();
        }
    }
    for (x, m) in mps.a.iter().enumerate() {
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v == 1 {
                    nfa.add_transition(i, Label::Sym(x), j).unwrap();
                }
            }
        }
    }
    nfa
}

/// Number of accepting paths of `w` by explicit depth-first path enumeration.
///
/// Exponential in the worst case; an oracle for short words only.
pub fn path_count(nfa: &Nfa, w: &[Symbol]) -> u64 {
    let delta = nfa.delta_table();
    fn walk(delta: &[Vec<Vec<usize>>], acc: &std::collections::BTreeSet<usize>, q: usize, w: &[Symbol]) -> u64 {
        match w.split_first() {
            None => u64::from(acc.contains(&q)),
            Some((&a, rest)) => delta[q][a].iter().map(|&r| walk(delta, acc, r, rest)).sum(),
        }
    }
    if w.iter().any(|&a| a >= nfa.d()) {
        return 0;
    }
    nfa.initial().iter().map(|&q| walk(&delta, nfa.accepting(), q, w)).sum()
}

/// Trace-closed ansatz: amplitude of `w` is `Tr[X A^{w_1} ... A^{w_N}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MpsX {
    d: usize,
    bond: usize,
    x: DMatrix<Complex64>,
    a: Vec<DMatrix<Complex64>>,
}

impl MpsX {
    pub fn new(d: usize, x: DMatrix<Complex64>, a: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if d == 0 || a.len() != d {
            return Err(Error::Dimension(format!("expected {d} matrices, got {}", a.len())));
        }
        let bond = x.nrows();
        if x.ncols() != bond || a.iter().any(|m| m.shape() != (bond, bond)) {
            return Err(Error::Dimension("MPS-X matrices must share one square shape".into()));
        }
        Ok(MpsX { d, bond, x, a })
    }

    /// `X = |v_r><v_l|`, which reproduces the open-boundary contraction.
    pub fn from_binary(mps: &BinaryMps) -> Self {
        let n = mps.bond;
        let x = DMatrix::from_fn(n, n, |i, j| Complex64::new(f64::from(mps.vr[i] * mps.vl[j]), 0.0));
        let a = mps
            .a
            .iter()
            .map(|m| DMatrix::from_fn(n, n, |i, j| Complex64::new(f64::from(m[i][j]), 0.0)))
            .collect();
        MpsX { d: mps.d, bond: n, x, a }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn bond(&self) -> usize {
        self.bond
    }

    pub fn x(&self) -> &DMatrix<Complex64> {
        &self.x
    }

    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.a
    }

    pub fn word_matrix(&self, w: &[Symbol]) -> DMatrix<Complex64> {
        w.iter().fold(DMatrix::identity(self.bond, self.bond), |acc, &s| acc * &self.a[s])
    }

    pub fn amplitude(&self, w: &[Symbol]) -> Complex64 {
        (&self.x * self.word_matrix(w)).trace()
    }

    pub fn state_vector(&self, n: usize) -> Result<StateVector> {
        let total = checked_word_count(self.d, n)?;
        let mut amps = vec![Complex64::zero(); total];
        let mut stack = vec![(0usize, 0usize, self.x.clone())];
        while let Some((depth, index, m)) = stack.pop() {
            if depth == n {
                amps[index] = m.trace();
                continue;
            }
            for s in 0..self.d {
                stack.push((depth + 1, index * self.d + s, &m * &self.a[s]));
            }
        }
        Ok(StateVector { d: self.d, n, amps })
    }

    pub fn to_json(&self) -> MpsJson {
        let pair = |z: &Complex64| Num::Pair([z.re, z.im]);
        let mat = |m: &DMatrix<Complex64>| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect()).collect();
        MpsJson { d: self.d, bond: self.bond, a: self.a.iter().map(mat).collect(), vl: None, vr: None, x: Some(mat(&self.x)) }
    }
}

/// Dense amplitudes indexed by the base-`d` encoding of words (first symbol most significant).
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub d: usize,
    pub n: usize,
    pub amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(d: usize, n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if checked_word_count(d, n)? != amps.len() {
            return Err(Error::Dimension(format!("expected {d}^{n} amplitudes, got {}", amps.len())));
        }
        Ok(StateVector { d, n, amps })
    }

    /// Equal-weight superposition of the given words.
    pub fn from_words<'a>(d: usize, n: usize, words: impl IntoIterator<Item = &'a Vec<Symbol>>) -> Result<Self> {
        let mut amps = vec![Complex64::zero(); checked_word_count(d, n)?];
        for w in words {
            if w.len() != n {
                return Err(Error::Dimension(format!("word of length {} in a length-{n} state", w.len())));
            }
            amps[crate::lang::word_index(w, d)] += Complex64::new(1.0, 0.0);
        }
        Ok(StateVector { d, n, amps })
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// The state with every word rotated left by one symbol.
    pub fn rotated(&self) -> StateVector {
        let mut amps = vec![Complex64::zero(); self.amps.len()];
        if self.n == 0 {
            return self.clone();
        }
        for (index, &v) in self.amps.iter().enumerate() {
            let mut w = word_from_index(index, self.d, self.n);
            w.rotate_left(1);
            amps[crate::lang::word_index(&w, self.d)] = v;
        }
        StateVector { d: self.d, n: self.n, amps }
    }

    /// Applies `m` to every site.
    pub fn apply_product(&self, m: &DMatrix<Complex64>) -> Result<StateVector> {
        if m.shape() != (self.d, self.d) {
            return Err(Error::Dimension(format!("map is {:?}, sites have dimension {}", m.shape(), self.d)));
        }
        let mut amps = self.amps.clone();
        let mut scratch = vec![Complex64::zero(); self.d];
        // Site k has stride d^(n-1-k); contract one mode at a time.
        for k in 0..self.n {
            let stride = self.d.pow((self.n - 1 - k) as u32);
            let block = stride * self.d;
            for base in (0..amps.len()).step_by(block) {
                for offset in 0..stride {
                    for (j, slot) in scratch.iter_mut().enumerate() {
                        *slot = amps[base + offset + j * stride];
                    }
                    for i in 0..self.d {
                        amps[base + offset + i * stride] = (0..self.d).map(|j| m[(i, j)] * scratch[j]).sum();
                    }
                }
            }
        }
        Ok(StateVector { d: self.d, n: self.n, amps })
    }

    pub fn is_binary(&self, tol: f64) -> bool {
        self.amps.iter().all(|z| z.im.abs() < tol && (z.re.abs() < tol || (z.re - 1.0).abs() < tol))
    }
}

/// Rank of the `d^cut x d^(n-cut)` amplitude matrix.
pub fn schmidt_rank(sv: &StateVector, cut: usize) -> Result<usize> {
    if cut == 0 || cut >= sv.n {
        return Err(Error::Invalid(format!("cut {cut} must lie strictly between 0 and {}", sv.n)));
    }
    let rows = sv.d.pow(cut as u32);
    let cols = sv.d.pow((sv.n - cut) as u32);
    let m = DMatrix::from_fn(rows, cols, |i, j| sv.amps[i * cols + j]);
    let singular = m.singular_values();
    Ok(singular.iter().filter(|&&s| s > RANK_TOL).count())
}

/// Integer amplitude for callers that need a machine integer.
pub fn amplitude_u64(mps: &BinaryMps, w: &[Symbol]) -> Option<u64> {
    mps.amplitude(w).to_u64()
}

/// Scalar in MPS documents: integer, real, or `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Real(f64),
    Pair([f64; 2]),
}

impl Num {
    pub fn to_complex(&self) -> Complex64 {
        match *self {
            Num::Int(v) => Complex64::new(v as f64, 0.0),
            Num::Real(v) => Complex64::new(v, 0.0),
            Num::Pair([re, im]) => Complex64::new(re, im),
        }
    }

    fn to_bit(&self, at: &str) -> Result<u8> {
        let z = self.to_complex();
        if z.im == 0.0 && (z.re == 0.0 || z.re == 1.0) {
            Ok(z.re as u8)
        } else {
            Err(Error::NonBinary(at.to_string()))
        }
    }
}

/// MPS document: `{"d","D","A","vl","vr","X"?}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MpsJson {
    pub d: usize,
    #[serde(rename = "D")]
    pub bond: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Vec<Num>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vl: Option<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub vr: Option<Vec<Num>>,
    #[serde(rename = "X", skip_serializing_if = "Option::is_none", default)]
    pub x: Option<Vec<Vec<Num>>>,
}

/// Either flavour of tensor family, as read from a document.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMps {
    Binary(BinaryMps),
    X(MpsX),
}

impl MpsJson {
    fn check_shape(&self) -> Result<()> {
        if self.a.len() != self.d {
            return Err(Error::Dimension(format!("d = {} but {} matrices", self.d, self.a.len())));
        }
        let square = |m: &Vec<Vec<Num>>| m.len() == self.bond && m.iter().all(|r| r.len() == self.bond);
        if !self.a.iter().all(square) || !self.x.as_ref().is_none_or(square) {
            return Err(Error::Dimension(format!("matrices must be {0}x{0}", self.bond)));
        }
        Ok(())
    }

    pub fn parse(&self) -> Result<AnyMps> {
        self.check_shape()?;
        let cmat = |m: &Vec<Vec<Num>>| DMatrix::from_fn(self.bond, self.bond, |i, j| m[i][j].to_complex());
        if let Some(x) = &self.x {
            return Ok(AnyMps::X(MpsX::new(self.d, cmat(x), self.a.iter().map(cmat).collect())?));
        }
        let (Some(vl), Some(vr)) = (&self.vl, &self.vr) else {
            return Err(Error::Invalid("binary MPS needs vl and vr".into()));
        };
        let bits = |v: &[Num], name: &str| -> Result<Vec<u8>> {
            v.iter().enumerate().map(|(i, z)| z.to_bit(&format!("{name}[{i}]"))).collect()
        };
        let a = self
            .a
            .iter()
            .enumerate()
            .map(|(x, m)| {
                m.iter()
                    .enumerate()
                    .map(|(i, r)| r.iter().enumerate().map(|(j, z)| z.to_bit(&format!("A^{x}[{i}][{j}]"))).collect())
                    .collect()
            })
            .collect::<Result<Vec<Vec<Vec<u8>>>>>()?;
        Ok(AnyMps::Binary(BinaryMps::new(a, bits(vl, "vl")?, bits(vr, "vr")?)?))
    }
}

pub fn parse_mps_json(text: &str) -> Result<AnyMps> {
    let doc: MpsJson = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
    doc.parse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{compile, determinize, is_unambiguous_oracle, remove_epsilon, regex_to_nfa};
    use crate::catalog;
    use crate::corpus::random_nfa;
    use crate::lang::{all_words, enumerate_words, parse_regex, Alphabet};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn big(v: u32) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn f1_tensors() {
        let mps = nfa_to_mps(&catalog::f1()).unwrap();
        assert_eq!(mps.matrix(0), &vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(mps.matrix(1), &vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(mps.vl(), &[1, 0]);
        assert_eq!(mps.vr(), &[0, 1]);
    }

    #[test]
    fn f2_tensors() {
        let mps = nfa_to_mps(&catalog::f2()).unwrap();
        assert_eq!(mps.matrix(0), &vec![vec![0, 1], vec![0, 0]]);
        assert_eq!(mps.matrix(1), &vec![vec![1, 0], vec![1, 0]]);
        assert_eq!(mps.vl(), &[1, 0]);
        assert_eq!(mps.vr(), &[1, 0]);
    }

    #[test]
    fn empty_language_contracts_to_zero() {
        let mut nfa = Nfa::new(2, 2);
        nfa.set_initial(0).unwrap();
        nfa.add_transition(0, Label::Sym(0), 1).unwrap();
        let mps = nfa_to_mps(&nfa).unwrap();
        for n in 0..5 {
            assert!(mps.state_vector(n).unwrap().amps.iter().all(|z| z.norm() == 0.0));
        }
        let none = nfa_to_mps(&Nfa::new(2, 0)).unwrap();
        assert_eq!(none.amplitude(&[0, 1]), big(0));
    }

    #[test]
    fn epsilon_rejected() {
        let ab = Alphabet::new(2).unwrap();
        let thompson = regex_to_nfa(&parse_regex("0*", ab).unwrap(), 2).unwrap();
        assert_eq!(nfa_to_mps(&thompson), Err(Error::EpsilonPresent));
    }

    #[test]
    fn round_trips() {
        for nfa in [catalog::f1(), catalog::f2(), catalog::ghz()] {
            assert_eq!(mps_to_nfa(&nfa_to_mps(&nfa).unwrap()), nfa);
        }
        // Hand-built doubled-branch MPS: two copies of F1 on a 4-dimensional bond.
        let i2 = [[1, 0], [0, 1]];
        let up = [[0, 1], [0, 0]];
        let block = |m: [[u8; 2]; 2]| {
            let mut out = vec![vec![0u8; 4]; 4];
            for (i, row) in m.iter().enumerate() {
                for (j, &v) in row.iter().enumerate() {
                    out[i][j] = v;
                    out[i + 2][j + 2] = v;
                }
            }
            out
        };
        let mps = BinaryMps::new(vec![block(i2), block(up)], vec![1, 0, 1, 0], vec![0, 1, 0, 1]).unwrap();
        let nfa = mps_to_nfa(&mps);
        assert_eq!(nfa.states(), 4);
        assert_eq!(nfa.initial().len(), 2);
        assert_eq!(nfa, catalog::doubled_w());
        assert_eq!(mps.amplitude(&[0, 1, 0]), big(2));
    }

    #[test]
    fn amplitude_examples() {
        let mps = nfa_to_mps(&catalog::f1()).unwrap();
        assert_eq!(mps.amplitude(&[0, 1, 0]), big(1));
        assert_eq!(mps.amplitude(&[0, 1, 1]), big(0));
        let doubled = nfa_to_mps(&catalog::doubled_w()).unwrap();
        assert_eq!(doubled.amplitude(&[0, 1, 0]), big(2));
    }

    #[test]
    fn state_vector_examples() {
        let ghz = nfa_to_mps(&catalog::ghz()).unwrap().state_vector(3).unwrap();
        let expected = StateVector::from_words(2, 3, &[vec![0, 0, 0], vec![1, 1, 1]]).unwrap();
        assert_eq!(ghz, expected);

        let w = nfa_to_mps(&catalog::f1()).unwrap().state_vector(2).unwrap();
        assert_eq!(w, StateVector::from_words(2, 2, &[vec![1, 0], vec![0, 1]]).unwrap());
    }

    #[test]
    fn mpsx_d2_amplitudes_by_direct_trace() {
        // Direct evaluation of all 16 length-2 traces: diagonal projectors and the
        // two off-diagonal pairs contribute.
        let sv = catalog::mpsx_d2().state_vector(2).unwrap();
        let support: Vec<String> = (0..16)
            .filter(|&i| sv.amps[i].norm() > 0.5)
            .map(|i| crate::lang::format_word(&word_from_index(i, 4, 2), 4))
            .collect();
        assert_eq!(support, vec!["00", "11", "23", "32"]);
        assert_eq!(catalog::mpsx_d2().amplitude(&[]), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn schmidt_examples() {
        let ghz = nfa_to_mps(&catalog::ghz()).unwrap().state_vector(4).unwrap();
        assert_eq!(schmidt_rank(&ghz, 2).unwrap(), 2);
        let w = nfa_to_mps(&catalog::f1()).unwrap().state_vector(4).unwrap();
        assert_eq!(schmidt_rank(&w, 2).unwrap(), 2);
        let ab = Alphabet::new(4).unwrap();
        let ast = parse_regex(catalog::MPSX_D2_LANGUAGE, ab).unwrap();
        let words = enumerate_words(&ast, ab, 6).unwrap();
        let sv = StateVector::from_words(4, 6, &words).unwrap();
        assert_eq!(schmidt_rank(&sv, 3).unwrap(), 4);
        assert!(schmidt_rank(&sv, 0).is_err());
        assert!(schmidt_rank(&sv, 6).is_err());
    }

    #[test]
    fn apply_product_matches_kronecker() {
        let u = catalog::bell_unitary();
        let sv = StateVector::from_words(2, 2, &[vec![0, 0], vec![1, 1]]).unwrap();
        let kron = u.kronecker(&u);
        let direct = sv.apply_product(&u).unwrap();
        for i in 0..4 {
            let expected: Complex64 = (0..4).map(|j| kron[(i, j)] * sv.amps[j]).sum();
            assert!((direct.amps[i] - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let mps = nfa_to_mps(&catalog::f2()).unwrap();
        let text = serde_json::to_string(&mps.to_json()).unwrap();
        assert_eq!(text, r#"{"d":2,"D":2,"A":[[[0,1],[0,0]],[[1,0],[1,0]]],"vl":[1,0],"vr":[1,0]}"#);
        assert_eq!(parse_mps_json(&text).unwrap(), AnyMps::Binary(mps));

        let x = catalog::mpsx_d6();
        let text = serde_json::to_string(&x.to_json()).unwrap();
        assert_eq!(parse_mps_json(&text).unwrap(), AnyMps::X(x));

        let bad = r#"{"d":1,"D":1,"A":[[[2]]],"vl":[1],"vr":[1]}"#;
        assert!(matches!(parse_mps_json(bad), Err(Error::NonBinary(_))));
    }

    #[test]
    fn rank_one_boundary_reproduces_open_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let nfa = random_nfa(&mut rng, 4, 3);
            let mps = nfa_to_mps(&nfa).unwrap();
            let x = MpsX::from_binary(&mps);
            for n in 0..=4 {
                for w in all_words(nfa.d(), n).unwrap() {
                    let open = mps.amplitude(&w).to_u64().unwrap() as f64;
                    assert!((x.amplitude(&w) - Complex64::new(open, 0.0)).norm() < 1e-9);
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn amplitude_counts_paths(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let nfa = random_nfa(&mut rng, 4, 3);
            let mps = nfa_to_mps(&nfa).unwrap();
            prop_assert_eq!(mps_to_nfa(&mps), nfa.clone());
            for n in 0..=4 {
                let sv = mps.state_vector(n).unwrap();
                for (i, w) in all_words(nfa.d(), n).unwrap().enumerate() {
                    let paths = path_count(&nfa, &w);
                    prop_assert_eq!(mps.amplitude(&w), BigUint::from(paths));
                    prop_assert_eq!(sv.amps[i], Complex64::new(paths as f64, 0.0));
                }
            }
        }

        #[test]
        fn unambiguous_states_are_binary_and_match_oracle(seed in 0u64..100_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ast = crate::corpus::random_regex(&mut rng, 2, 4);
            let dfa = determinize(&compile(&ast, 2).unwrap()).unwrap().to_trimmed_nfa();
            prop_assert!(is_unambiguous_oracle(&dfa).unwrap());
            let mps = nfa_to_mps(&dfa).unwrap();
            for n in 0..=6 {
                let sv = mps.state_vector(n).unwrap();
                prop_assert!(sv.is_binary(1e-12));
                let words = enumerate_words(&ast, Alphabet::new(2).unwrap(), n).unwrap();
                prop_assert_eq!(sv, StateVector::from_words(2, n, &words).unwrap());
            }
        }
    }

    #[test]
    fn thompson_automaton_is_ambiguity_free_after_determinisation() {
        let ab = Alphabet::new(2).unwrap();
        let raw = remove_epsilon(&regex_to_nfa(&parse_regex("0*|0*", ab).unwrap(), 2).unwrap());
        assert!(!is_unambiguous_oracle(&raw).unwrap());
    }
}
