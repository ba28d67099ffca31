//! Span fixpoints over the word algebra and the algebraic decision procedures:
//! recognising regular-language states, shift invariance of a language, and
//! translational invariance of an MPS-X family.
//!
//! Binary families use exact integer elimination ([`crate::exact`]); MPS-X uses
//! double precision with the tolerance [`TRACE_TOL`].

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::automata::{determinize, equivalent, shift_language, Nfa};
use crate::exact::{dot, IntSpan};
use crate::lang::{all_words, Word};
use crate::mps::{BinaryMps, MpsX};
use crate::Result;

/// Absolute tolerance on `Tr[X [a, b]]` for MPS-X families.
pub const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Witness words with linearly independent vectors `<v_l|A^w` (left) or `A^w|v_r>` (right).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanBasis {
    pub side: Side,
    pub dim: usize,
    pub entries: Vec<(Word, Vec<BigInt>)>,
}

fn boundary(mps: &BinaryMps, side: Side) -> Vec<BigInt> {
    let v = match side {
        Side::Left => mps.vl(),
        Side::Right => mps.vr(),
    };
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `v A^x` (left) or `A^x v` (right).
fn step(mps: &BinaryMps, side: Side, v: &[BigInt], x: usize) -> Vec<BigInt> {
    let a = mps.matrix(x);
    let n = mps.bond();
    let mut out = vec![BigInt::zero(); n];
    match side {
        Side::Left => {
            for (i, vi) in v.iter().enumerate().filter(|(_, vi)| !vi.is_zero()) {
                for j in 0..n {
                    if a[i][j] == 1 {
                        out[j] += vi;
                    }
                }
            }
        }
        Side::Right => {
            for (i, slot) in out.iter_mut().enumerate() {
                for j in 0..n {
                    if a[i][j] == 1 && !v[j].is_zero() {
                        *slot += &v[j];
                    }
                }
            }
        }
    }
    out
}

/// Extends a witness word: left vectors grow on the right, right vectors on the left.
fn extend(side: Side, w: &[usize], x: usize) -> Word {
    match side {
        Side::Left => {
            let mut out = w.to_vec();
            out.push(x);
            out
        }
        Side::Right => {
            let mut out = Vec::with_capacity(w.len() + 1);
            out.push(x);
            out.extend_from_slice(w);
            out
        }
    }
}

/// Breadth-first fixpoint: starting from the boundary vector (witness ε), apply
/// every `A^x` to admitted vectors and keep those that enlarge `embed(v)`'s span.
fn fixpoint<F>(mps: &BinaryMps, side: Side, embed_dim: usize, embed: F) -> Vec<(Word, Vec<BigInt>)>
where
    F: Fn(&[BigInt]) -> Vec<BigInt>,
{
    let mut span = IntSpan::new(embed_dim);
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(Vec::new(), boundary(mps, side))]);
    while let Some((w, v)) = queue.pop_front() {
        if !span.insert(&embed(&v)) {
            continue;
        }
        for x in 0..mps.d() {
            queue.push_back((extend(side, &w, x), step(mps, side, &v, x)));
        }
        out.push((w, v));
    }
    out
}

pub fn span_fixpoint(mps: &BinaryMps, side: Side) -> SpanBasis {
    let entries = fixpoint(mps, side, mps.bond(), |v| v.to_vec());
    SpanBasis { side, dim: mps.bond(), entries }
}

/// Packed upper triangle of `v ⊗ v`.
fn symmetric_square(v: &[BigInt]) -> Vec<BigInt> {
    let n = v.len();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for m in 0..n {
        for k in m..n {
            out.push(if v[m].is_zero() || v[k].is_zero() { BigInt::zero() } else { &v[m] * &v[k] });
        }
    }
    out
}

/// Basis words for `span { l_w ⊗ l_w }` (or the right analogue).
///
/// Two states can be reached together by some word while no basis word of the
/// plain span `span { l_w }` reaches both, so the pair test needs the square.
pub fn square_span_fixpoint(mps: &BinaryMps, side: Side) -> SpanBasis {
    let n = mps.bond();
    let entries = fixpoint(mps, side, n * (n + 1) / 2, symmetric_square);
    SpanBasis { side, dim: n, entries }
}

/// Off-diagonal pairs `(m, n)` with `L_{m i} L_{n i} != 0` for some basis column `i`,
/// each with the first witness word that covers it.
fn covered_pairs(basis: &SpanBasis) -> BTreeMap<(usize, usize), Word> {
    let mut pairs = BTreeMap::new();
    for (w, v) in &basis.entries {
        let support: Vec<usize> = (0..v.len()).filter(|&i| !v[i].is_zero()).collect();
        for (a, &m) in support.iter().enumerate() {
            for &n in &support[a + 1..] {
                pairs.entry((m, n)).or_insert_with(|| w.clone());
            }
        }
    }
    pairs
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RlsWitness {
    /// Two distinct bond states reached and co-reached together.
    pub pair: (usize, usize),
    /// Word reaching both states from the left boundary.
    pub left_word: Word,
    /// Word leading from both states to the right boundary.
    pub right_word: Word,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict<W> {
    pub result: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<W>,
}

impl<W> Verdict<W> {
    fn yes() -> Self {
        Verdict { result: true, witness: None }
    }

    fn no(witness: W) -> Self {
        Verdict { result: false, witness: Some(witness) }
    }
}

/// Decides whether a binary MPS describes a regular-language state, i.e. whether
/// every amplitude is 0 or 1.
///
/// The family fails iff some pair `m != n` is covered by the left square span and
/// by the right square span. The reported witness is the smallest such pair.
pub fn check_rls(mps: &BinaryMps) -> Verdict<RlsWitness> {
    let left = covered_pairs(&square_span_fixpoint(mps, Side::Left));
    if left.is_empty() {
        return Verdict::yes();
    }
    let right = covered_pairs(&square_span_fixpoint(mps, Side::Right));
    match left.iter().find(|(pair, _)| right.contains_key(pair)) {
        None => Verdict::yes(),
        Some((&pair, lw)) => Verdict::no(RlsWitness { pair, left_word: lw.clone(), right_word: right[&pair].clone() }),
    }
}

/// Triple `(w, <v_l|A^w, A^w|v_r>)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub word: Word,
    pub left: Vec<BigInt>,
    pub right: Vec<BigInt>,
}

/// Words whose left vectors form a basis of `<v_l| Alg`, each with both vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleSet {
    pub triples: Vec<Triple>,
}

pub fn triple_set(mps: &BinaryMps) -> TripleSet {
    let triples = span_fixpoint(mps, Side::Left)
        .entries
        .into_iter()
        .map(|(word, left)| {
            let right = word.iter().rev().fold(boundary(mps, Side::Right), |r, &x| step(mps, Side::Right, &r, x));
            Triple { word, left, right }
        })
        .collect();
    TripleSet { triples }
}

/// `(u, v)` with `uv` and `vu` weighted differently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftWitness {
    pub u: Word,
    pub v: Word,
}

/// Decides whether `f(uv) = f(vu)` for all words, where `f(w) = <v_l|A^w|v_r>`.
/// For a regular-language state this is closure of the language under rotation.
///
/// Let `u_1..u_r` be words whose left vectors span `<v_l| Alg`. Then `f` is
/// rotation invariant iff each `u_i` commutes with every word `v`, and for fixed
/// `u_i` the map `v -> f(u_i v) - f(v u_i)` is a linear functional of
/// `(<l_{u_i}| A^v, <v_l| A^v)`, a vector of length `2D`. Vanishing on all words
/// is checked on a spanning set of those vectors.
pub fn check_shift_invariant_algebraic(mps: &BinaryMps) -> Verdict<ShiftWitness> {
    let n = mps.bond();
    let vr = boundary(mps, Side::Right);
    let vl = boundary(mps, Side::Left);
    for t in triple_set(mps).triples.into_iter().filter(|t| !t.word.is_empty()) {
        let value = |s: &[BigInt]| dot(&s[..n], &vr) - dot(&s[n..], &t.right);
        let mut span = IntSpan::new(2 * n);
        let start: Vec<BigInt> = t.left.iter().chain(&vl).cloned().collect();
        let mut queue = VecDeque::from([(Vec::new(), start)]);
        while let Some((v, s)) = queue.pop_front() {
            if !span.insert(&s) {
                continue;
            }
            if !value(&s).is_zero() {
                return Verdict::no(ShiftWitness { u: t.word, v });
            }
            for x in 0..mps.d() {
                let mut next = step(mps, Side::Left, &s[..n], x);
                next.extend(step(mps, Side::Left, &s[n..], x));
                queue.push_back((extend(Side::Left, &v, x), next));
            }
        }
    }
    Verdict::yes()
}

/// Rotation closure by automata: `L` equals `shift(L)`.
pub fn check_shift_invariant_naive(nfa: &Nfa) -> Result<bool> {
    equivalent(&determinize(&shift_language(nfa)?)?, &determinize(nfa)?)
}

/// Brute force: a word of length `<= n_max` in the language whose one-step
/// rotation is not. One-step rotations generate all rotations.
pub fn rotation_counterexample(nfa: &Nfa, n_max: usize) -> Result<Option<Word>> {
    let dfa = determinize(nfa)?;
    for n in 1..=n_max {
        for w in all_words(nfa.d(), n)? {
            if dfa.accepts(&w) {
                let mut r = w.clone();
                r.rotate_left(1);
                if !dfa.accepts(&r) {
                    return Ok(Some(w));
                }
            }
        }
    }
    Ok(None)
}

/// Words whose matrices form a basis of the algebra generated by `{A^x}` and `I`.
pub fn algebra_basis(mpsx: &MpsX) -> Vec<(Word, DMatrix<Complex64>)> {
    let n = mpsx.bond();
    let mut ortho: Vec<DMatrix<Complex64>> = Vec::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([(Vec::new(), DMatrix::<Complex64>::identity(n, n))]);
    while let Some((w, m)) = queue.pop_front() {
        if out.len() == n * n {
            break;
        }
        let scale = m.norm().max(1.0);
        let mut r = m.clone();
        // Two Gram-Schmidt passes keep the residual honest in floating point.
        for _ in 0..2 {
            for q in &ortho {
                let c = q.dotc(&r);
                r -= q * c;
            }
        }
        let norm = r.norm();
        if norm <= 1e-9 * scale {
            continue;
        }
        ortho.push(r / Complex64::new(norm, 0.0));
        for x in 0..mpsx.d() {
            let mut next = w.clone();
            next.push(x);
            queue.push_back((next, &m * &mpsx.matrices()[x]));
        }
        out.push((w, m));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiWitness {
    pub a: Word,
    pub b: Word,
    /// `Tr[X [A^a, A^b]]` as `[re, im]`.
    pub value: [f64; 2],
}

/// `Tr[X [a, b]] = 0` for all pairs of algebra basis elements.
pub fn check_ti_mpsx(mpsx: &MpsX) -> Verdict<TiWitness> {
    let basis = algebra_basis(mpsx);
    let traces: Vec<DMatrix<Complex64>> = basis.iter().map(|(_, m)| mpsx.x() * m).collect();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let t = (&traces[i] * &basis[j].1).trace() - (&traces[j] * &basis[i].1).trace();
            if t.norm() >= TRACE_TOL {
                return Verdict::no(TiWitness { a: basis[i].0.clone(), b: basis[j].0.clone(), value: [t.re, t.im] });
            }
        }
    }
    Verdict::yes()
}

/// Brute force for MPS-X: compare `|psi_N>` with its one-site rotation for `N <= n_max`.
pub fn ti_counterexample(mpsx: &MpsX, n_max: usize) -> Result<Option<usize>> {
    for n in 1..=n_max {
        let sv = mpsx.state_vector(n)?;
        if sv.distance(&sv.rotated()) > 1e-9 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

/// Recomputes a basis vector from its witness word.
pub fn vector_of_word(mps: &BinaryMps, side: Side, w: &[usize]) -> Vec<BigInt> {
    match side {
        Side::Left => w.iter().fold(boundary(mps, side), |v, &x| step(mps, side, &v, x)),
        Side::Right => w.iter().rev().fold(boundary(mps, side), |v, &x| step(mps, side, &v, x)),
    }
}

/// Pairs `(m, n)` with `m != n` that are jointly reachable and co-reachable,
/// computed by graph search on the square automaton. Used only to explain
/// witnesses in diagnostics.
pub fn ambiguous_pairs(nfa: &Nfa) -> Result<BTreeSet<(usize, usize)>> {
    let square = crate::automata::product(nfa, nfa)?;
    let useful = crate::automata::useful_states(&square);
    let n = nfa.states().max(1);
    Ok((0..square.states()).filter(|&s| useful[s] && s / n < s % n).map(|s| (s / n, s % n)).collect())
}
