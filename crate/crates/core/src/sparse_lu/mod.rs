//! Sparsity detection and local-unitary equivalence of sparse regular-language
//! states, with dense numeric verification of certificates.

pub mod unitary;

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::automata::{count_profile, is_unambiguous_oracle, minimal_dfa, nfa_equivalent, relabel, Nfa};
use crate::canonical::{canonical_decompose, CanonicalDecomposition};
use crate::lang::{checked_word_count, Symbol, DENSE_CAP};
use crate::mps::{nfa_to_mps, StateVector};
use crate::{Error, Result};

pub use unitary::{solve_unitary, unitarity_defect, Constraint, UnitarySolution};

/// Tolerance for Gram matrices and product-map verification.
pub const VERIFY_TOL: f64 = 1e-9;
/// Largest length checked when re-verifying a certificate on dense states.
pub const VERIFY_N_MAX: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SparsityVerdict {
    pub sparse: bool,
    /// Polynomial growth exponent bound (`count(N) = O(N^k)`) when sparse.
    pub degree: Option<usize>,
    /// A state of the minimal DFA lying on two distinct cycles when not sparse.
    pub witness_state: Option<usize>,
}

/// Sparse iff every strongly connected component of the trimmed minimal DFA is
/// a single simple cycle or an acyclic singleton.
pub fn is_sparse(nfa: &Nfa) -> Result<SparsityVerdict> {
    let dfa = minimal_dfa(nfa)?.to_trimmed_nfa();
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..dfa.states()).map(|_| graph.add_node(())).collect();
    for &(p, _, q) in dfa.transitions() {
        graph.add_edge(nodes[p], nodes[q], ());
    }
    let sccs = tarjan_scc(&graph);
    let mut component = vec![0; dfa.states()];
    for (c, members) in sccs.iter().enumerate() {
        for n in members {
            component[n.index()] = c;
        }
    }
    let mut internal = vec![0usize; sccs.len()];
    for &(p, _, q) in dfa.transitions() {
        if component[p] == component[q] {
            internal[component[p]] += 1;
        }
    }
    for (c, members) in sccs.iter().enumerate() {
        if internal[c] > members.len() {
            let witness = members.iter().map(|n| n.index()).min();
            return Ok(SparsityVerdict { sparse: false, degree: None, witness_state: witness });
        }
    }
    // Longest chain of cyclic components; components come in reverse topological order.
    let cyclic: Vec<usize> = (0..sccs.len()).map(|c| usize::from(internal[c] > 0)).collect();
    let mut chain = cyclic.clone();
    let mut succ = vec![Vec::new(); sccs.len()];
    for &(p, _, q) in dfa.transitions() {
        if component[p] != component[q] {
            succ[component[p]].push(component[q]);
        }
    }
    for c in 0..sccs.len() {
        let best = succ[c].iter().map(|&n| chain[n]).max().unwrap_or(0);
        chain[c] = cyclic[c] + best;
    }
    let longest = chain.into_iter().max().unwrap_or(0);
    Ok(SparsityVerdict { sparse: true, degree: Some(longest.saturating_sub(1)), witness_state: None })
}

fn least_squares_rss(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum()
}

/// Growth oracle on word counts: fits `log S(N)` of the cumulative counts
/// against `log N` (polynomial) and against `N` (exponential) for `N` in
/// `5..=n_max`, and reports polynomial growth when that fit is at least as good.
pub fn growth_is_polynomial(nfa: &Nfa, n_max: usize) -> Result<bool> {
    let counts = count_profile(&minimal_dfa(nfa)?.to_trimmed_nfa(), n_max)?;
    let mut total = BigUint::from(0u8);
    let mut cumulative = Vec::with_capacity(counts.len());
    for c in &counts {
        total += c;
        cumulative.push(total.clone());
    }
    let ns: Vec<usize> = (5..=n_max).collect();
    let logs: Vec<f64> = ns.iter().map(|&n| log_big(&cumulative[n])).collect();
    let poly = least_squares_rss(&ns.iter().map(|&n| (n as f64).ln()).collect::<Vec<_>>(), &logs);
    let expo = least_squares_rss(&ns.iter().map(|&n| n as f64).collect::<Vec<_>>(), &logs);
    Ok(poly <= expo + 1e-12)
}

/// Natural logarithm, with `log 0` read as 0.
fn log_big(x: &BigUint) -> f64 {
    if x.bits() == 0 {
        return 0.0;
    }
    x.to_f64().map_or(f64::INFINITY, f64::ln)
}

/// `‖|L_N⟩‖² = |L ∩ Σ^N|` for `N = 0..=n_max`.
pub fn norm_profile(nfa: &Nfa, n_max: usize) -> Result<Vec<BigUint>> {
    if !is_unambiguous_oracle(nfa)? {
        return Err(Error::Ambiguous);
    }
    count_profile(nfa, n_max)
}

/// A relabelling of `Σ_∞` (as skeleton indices: `i ↦ perm[i]`) and the entry
/// pairs `(j, k)` it forces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub perm: Vec<usize>,
    pub pairs: Vec<(usize, usize)>,
}

/// All relabellings of `Σ_∞` under which the skeletons of the two decompositions
/// match one to one.
pub fn match_infinite_part(d1: &CanonicalDecomposition, d2: &CanonicalDecomposition) -> Result<Vec<Matching>> {
    let (s1, s2) = (&d1.split, &d2.split);
    if d1.d != d2.d
        || s1.infinite.len() != s2.infinite.len()
        || s1.finite.len() != s2.finite.len()
        || d1.entries.len() != d2.entries.len()
    {
        return Ok(Vec::new());
    }
    let k = s1.infinite.len();
    if k > 6 {
        return Err(Error::CapExceeded(format!("|Σ_∞| = {k} exceeds 6")));
    }
    let mut out = Vec::new();
    for perm in (0..k).permutations(k) {
        let pi: BTreeMap<Symbol, Symbol> = perm.iter().enumerate().map(|(i, &j)| (i, j)).collect();
        let mut pairs = Vec::with_capacity(d1.entries.len());
        let mut used = vec![false; d2.entries.len()];
        for (j, e1) in d1.entries.iter().enumerate() {
            let moved = relabel(&e1.skeleton, &pi)?;
            let mut found = None;
            for (k2, e2) in d2.entries.iter().enumerate() {
                if !used[k2] && e2.m == e1.m && nfa_equivalent(&moved, &e2.skeleton)? {
                    found = Some(k2);
                    break;
                }
            }
            match found {
                Some(k2) => {
                    used[k2] = true;
                    pairs.push((j, k2));
                }
                None => break,
            }
        }
        if pairs.len() == d1.entries.len() {
            out.push(Matching { perm, pairs });
        }
    }
    Ok(out)
}

/// True iff the Gram matrices of the two lists agree entrywise.
pub fn gram_check(x1: &[StateVector], x2: &[StateVector]) -> Result<bool> {
    if x1.len() != x2.len() {
        return Err(Error::Dimension(format!("{} vectors against {}", x1.len(), x2.len())));
    }
    for (a, b) in x1.iter().zip(x2) {
        if a.amps.len() != b.amps.len() {
            return Err(Error::Dimension("paired vectors differ in length".into()));
        }
    }
    for i in 0..x1.len() {
        for j in 0..x1.len() {
            if x1[i].amps.len() != x1[j].amps.len() {
                continue;
            }
            if (x1[i].inner(&x1[j]) - x2[i].inner(&x2[j])).norm() > VERIFY_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Dense check of `‖M^{⊗N}|L1_N⟩ − |L2_N⟩‖ < 1e-9` for every `N ≤ n_max`.
pub fn verify_product_map(m: &DMatrix<Complex64>, l1: &Nfa, l2: &Nfa, n_max: usize) -> Result<bool> {
    if l1.d() != l2.d() {
        return Err(Error::AlphabetMismatch(l1.d(), l2.d()));
    }
    if !is_unambiguous_oracle(l1)? || !is_unambiguous_oracle(l2)? {
        return Err(Error::Ambiguous);
    }
    let (a, b) = (nfa_to_mps(l1)?, nfa_to_mps(l2)?);
    for n in 0..=n_max {
        let mapped = a.state_vector(n)?.apply_product(m)?;
        if mapped.distance(&b.state_vector(n)?) >= VERIFY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LuStatus {
    Equivalent,
    NotEquivalent,
    Inconclusive,
}

impl LuStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            LuStatus::Equivalent => 0,
            LuStatus::NotEquivalent => 1,
            LuStatus::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LuCertificate {
    /// `Σ_∞` relabelling as original symbol pairs `(a, π(a))`.
    pub pi: Vec<(Symbol, Symbol)>,
    /// Unitary on `Σ_f`, rows and columns in ascending symbol order.
    pub u_f: DMatrix<Complex64>,
    /// Full single-site map `U_π ⊕ U_f`.
    pub u: DMatrix<Complex64>,
    pub residual: f64,
    /// Largest `N` at which `u` was re-verified on dense states.
    pub verified_n: usize,
}

#[derive(Debug, Clone)]
pub struct LuVerdict {
    pub status: LuStatus,
    pub certificate: Option<LuCertificate>,
    pub reason: Option<String>,
}

/// `[[re, im], ...]` rows.
pub fn matrix_json(m: &DMatrix<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

#[derive(Serialize)]
struct CertificateJson {
    pi: Vec<(Symbol, Symbol)>,
    u_f: Vec<Vec<[f64; 2]>>,
    u: Vec<Vec<[f64; 2]>>,
    residual: f64,
    verified_n: usize,
}

#[derive(Serialize)]
struct VerdictJson {
    status: LuStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

impl LuVerdict {
    fn not_equivalent(reason: String) -> Self {
        LuVerdict { status: LuStatus::NotEquivalent, certificate: None, reason: Some(reason) }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let json = VerdictJson {
            status: self.status,
            certificate: self.certificate.as_ref().map(|c| CertificateJson {
                pi: c.pi.clone(),
                u_f: matrix_json(&c.u_f),
                u: matrix_json(&c.u),
                residual: c.residual,
                verified_n: c.verified_n,
            }),
            reason: self.reason.clone(),
        };
        serde_json::to_value(json).expect("verdict serialises")
    }
}

/// The `Σ_f` part of an entry's word set as a vector over `|Σ_f|` local states.
fn finite_vector(decomp: &CanonicalDecomposition, j: usize) -> Result<StateVector> {
    let entry = &decomp.entries[j];
    let k = decomp.split.finite.len();
    let words: Vec<Vec<Symbol>> = entry
        .words
        .iter()
        .map(|w| w.iter().map(|a| decomp.split.finite.binary_search(a).expect("word over Σ_f")).collect())
        .collect();
    StateVector::from_words(k, entry.m, &words)
}

fn full_map(d1: &CanonicalDecomposition, d2: &CanonicalDecomposition, perm: &[usize], u_f: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = d1.d;
    let mut u = DMatrix::zeros(d, d);
    for (i, &j) in perm.iter().enumerate() {
        u[(d2.split.infinite[j], d1.split.infinite[i])] = Complex64::new(1.0, 0.0);
    }
    for (r, &a) in d2.split.finite.iter().enumerate() {
        for (c, &b) in d1.split.finite.iter().enumerate() {
            u[(a, b)] = u_f[(r, c)];
        }
    }
    u
}

/// Largest `N ≤ VERIFY_N_MAX` with `d^N` at most `2^16`.
fn verification_length(d: usize) -> usize {
    (0..=VERIFY_N_MAX).take_while(|&n| checked_word_count(d, n).is_ok_and(|c| c <= (1 << 16).min(DENSE_CAP))).last().unwrap_or(0)
}

/// Decides whether `U^{⊗N}|L1_N⟩ = |L2_N⟩` for all `N` with a single-site unitary.
pub fn lu_equivalent(l1: &Nfa, l2: &Nfa, seed: u64) -> Result<LuVerdict> {
    if l1.d() != l2.d() {
        return Err(Error::AlphabetMismatch(l1.d(), l2.d()));
    }
    let (a, b) = (minimal_dfa(l1)?.to_trimmed_nfa(), minimal_dfa(l2)?.to_trimmed_nfa());
    if !is_sparse(&a)?.sparse || !is_sparse(&b)?.sparse {
        return Err(Error::NotSparse);
    }
    // Both count sequences satisfy linear recurrences of orders |a| and |b|, so
    // agreement on the first |a| + |b| lengths is agreement everywhere.
    let horizon = a.states() + b.states();
    let (pa, pb) = (norm_profile(&a, horizon)?, norm_profile(&b, horizon)?);
    if let Some(n) = (0..=horizon).find(|&n| pa[n] != pb[n]) {
        return Ok(LuVerdict::not_equivalent(format!(
            "norm mismatch at N={n}: {} words against {}",
            pa[n], pb[n]
        )));
    }
    let (d1, d2) = (canonical_decompose(&a)?, canonical_decompose(&b)?);
    let matchings = match_infinite_part(&d1, &d2)?;
    if matchings.is_empty() {
        return Ok(LuVerdict::not_equivalent("no relabelling of Σ_∞ matches the canonical skeletons".into()));
    }
    let k = d1.split.finite.len();
    let mut gram_passed = false;
    for matching in &matchings {
        let mut constraints = Vec::new();
        let mut by_m: BTreeMap<usize, (Vec<StateVector>, Vec<StateVector>)> = BTreeMap::new();
        for &(j, k2) in &matching.pairs {
            let (x1, x2) = (finite_vector(&d1, j)?, finite_vector(&d2, k2)?);
            let slot = by_m.entry(d1.entries[j].m).or_default();
            slot.0.push(x1.clone());
            slot.1.push(x2.clone());
            if x1.n > 0 {
                constraints.push(Constraint { m: x1.n, x1: x1.amps, x2: x2.amps });
            }
        }
        let mut grams_ok = true;
        for (x1, x2) in by_m.values() {
            grams_ok &= gram_check(x1, x2)?;
        }
        if !grams_ok {
            continue;
        }
        gram_passed = true;
        let Some(solution) = solve_unitary(&constraints, k, seed) else { continue };
        let u = full_map(&d1, &d2, &matching.perm, &solution.u);
        let verified_n = verification_length(d1.d);
        if !verify_product_map(&u, &a, &b, verified_n)? {
            continue;
        }
        let pi = matching
            .perm
            .iter()
            .enumerate()
            .map(|(i, &j)| (d1.split.infinite[i], d2.split.infinite[j]))
            .collect();
        return Ok(LuVerdict {
            status: LuStatus::Equivalent,
            certificate: Some(LuCertificate { pi, u_f: solution.u, u, residual: solution.residual, verified_n }),
            reason: None,
        });
    }
    if !gram_passed {
        return Ok(LuVerdict::not_equivalent("Gram matrices of the matched word sets differ".into()));
    }
    Ok(LuVerdict {
        status: LuStatus::Inconclusive,
        certificate: None,
        reason: Some("all necessary conditions hold but the unitary search did not converge".into()),
    })
}

/// Accepting automaton of `nfa` with every symbol mapped through `pi` (a
/// convenience for building relabelled test pairs).
pub fn relabelled(nfa: &Nfa, pi: &[Symbol]) -> Result<Nfa> {
    let map: BTreeMap<Symbol, Symbol> = pi.iter().enumerate().map(|(a, &b)| (a, b)).collect();
    relabel(nfa, &map)
}
