//! Canonical decomposition of a regular language into skeletons over
//! `Σ_∞ ∪ {f}` and finite word sets over `Σ_f`, the inverse substitution, and the
//! canonical MPS + MPO form built from it.
//!
//! Skeleton alphabet: the `k = |Σ_∞|` unbounded symbols in ascending order get
//! indices `0..k`, and `f` is index `k`.

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::automata::{
    complement, determinize, finite_language, minimize_canonical, product, trim, useful_states, AutomatonJson, Dfa,
    Label, Nfa,
};
use crate::lang::{all_words, format_word, Symbol, Word};
use crate::mps::{nfa_to_mps, BinaryMps, StateVector};
use crate::{Error, Result};

/// Largest number of nonempty fragments refined together for one `m`.
pub const PATTERN_GUARD: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlphabetSplit {
    /// Symbols with unbounded occurrence counts, ascending.
    pub infinite: Vec<Symbol>,
    /// Symbols occurring a bounded number of times, ascending.
    pub finite: Vec<Symbol>,
    /// Largest total number of `Σ_f` symbols in one word.
    pub max_count: usize,
}

impl AlphabetSplit {
    /// Index of the marker symbol `f` in skeleton alphabets.
    pub fn f(&self) -> Symbol {
        self.infinite.len()
    }

    /// Size of the skeleton alphabet.
    pub fn skeleton_d(&self) -> usize {
        self.infinite.len() + 1
    }
}

/// One pair `(L_j^m, X_j^m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub m: usize,
    /// Trimmed canonical minimal DFA over the skeleton alphabet.
    pub skeleton: Nfa,
    /// Sorted, distinct words of length `m` over `Σ_f` (original symbols).
    pub words: Vec<Word>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalDecomposition {
    pub d: usize,
    pub split: AlphabetSplit,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntryJson {
    pub m: usize,
    #[serde(rename = "L")]
    pub l: AutomatonJson,
    #[serde(rename = "X")]
    pub x: Vec<String>,
}

impl CanonicalDecomposition {
    pub fn to_json(&self) -> Vec<EntryJson> {
        self.entries
            .iter()
            .map(|e| EntryJson {
                m: e.m,
                l: e.skeleton.to_json(),
                x: e.words.iter().map(|w| format_word(w, self.d)).collect(),
            })
            .collect()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("decomposition serialises")
    }
}

/// Splits the alphabet by whether a symbol labels an edge inside a strongly
/// connected component of the trimmed automaton.
pub fn classify_alphabet(nfa: &Nfa) -> Result<AlphabetSplit> {
    let nfa = trim(nfa)?;
    let mut graph = DiGraph::<(), Symbol>::new();
    let nodes: Vec<_> = (0..nfa.states()).map(|_| graph.add_node(())).collect();
    for &(p, label, q) in nfa.transitions() {
        let Label::Sym(a) = label else { unreachable!("trim rejects ε-moves") };
        graph.add_edge(nodes[p], nodes[q], a);
    }
    let sccs = tarjan_scc(&graph);
    let mut component = vec![0; nfa.states()];
    for (c, members) in sccs.iter().enumerate() {
        for n in members {
            component[n.index()] = c;
        }
    }
    let mut unbounded = vec![false; nfa.d()];
    for &(p, label, q) in nfa.transitions() {
        if let Label::Sym(a) = label {
            if component[p] == component[q] {
                unbounded[a] = true;
            }
        }
    }
    // Tarjan emits components in reverse topological order.
    let mut best: Vec<Option<usize>> = vec![None; sccs.len()];
    for &q in nfa.initial() {
        best[component[q]] = Some(0);
    }
    let mut out_edges = vec![Vec::new(); sccs.len()];
    for &(p, label, q) in nfa.transitions() {
        if let Label::Sym(a) = label {
            if component[p] != component[q] {
                out_edges[component[p]].push((component[q], usize::from(!unbounded[a])));
            }
        }
    }
    for c in (0..sccs.len()).rev() {
        let Some(here) = best[c] else { continue };
        for &(next, w) in &out_edges[c] {
            best[next] = Some(best[next].map_or(here + w, |b: usize| b.max(here + w)));
        }
    }
    let max_count = nfa.accepting().iter().filter_map(|&q| best[component[q]]).max().unwrap_or(0);
    Ok(AlphabetSplit {
        infinite: (0..nfa.d()).filter(|&a| unbounded[a]).collect(),
        finite: (0..nfa.d()).filter(|&a| !unbounded[a]).collect(),
        max_count,
    })
}

/// `Σ_∞* x_1 Σ_∞* ... x_m Σ_∞*` over the original alphabet.
fn pattern_automaton(d: usize, split: &AlphabetSplit, pattern: &[Symbol]) -> Result<Nfa> {
    let mut nfa = Nfa::new(d, pattern.len() + 1);
    nfa.set_initial(0)?;
    nfa.set_accepting(pattern.len())?;
    for (i, &x) in pattern.iter().enumerate() {
        nfa.add_transition(i, Label::Sym(x), i + 1)?;
    }
    for i in 0..=pattern.len() {
        for &a in &split.infinite {
            nfa.add_transition(i, Label::Sym(a), i)?;
        }
    }
    Ok(nfa)
}

/// Skeleton of the words of `L` whose `Σ_f` subsequence is `pattern`, with every
/// `Σ_f` symbol replaced by `f` and `Σ_∞` symbols by their skeleton indices.
pub fn extract_fragment(nfa: &Nfa, split: &AlphabetSplit, pattern: &[Symbol]) -> Result<Nfa> {
    if let Some(&x) = pattern.iter().find(|x| !split.finite.contains(x)) {
        return Err(Error::Invalid(format!("pattern symbol {x} is not in Σ_f")));
    }
    let restricted = trim(&product(nfa, &pattern_automaton(nfa.d(), split, pattern)?)?)?;
    let mut out = Nfa::new(split.skeleton_d(), restricted.states());
    for &q in restricted.initial() {
        out.set_initial(q)?;
    }
    for &q in restricted.accepting() {
        out.set_accepting(q)?;
    }
    for &(p, label, q) in restricted.transitions() {
        let Label::Sym(a) = label else { unreachable!() };
        let b = split.infinite.binary_search(&a).unwrap_or(split.f());
        out.add_transition(p, Label::Sym(b), q)?;
    }
    Ok(out)
}

fn minimal(dfa: &Dfa) -> Dfa {
    minimize_canonical(dfa)
}

fn intersect(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    Ok(minimal(&determinize(&product(&a.to_nfa(), &b.to_nfa())?)?))
}

fn difference(a: &Dfa, b: &Dfa) -> Result<Dfa> {
    intersect(a, &complement(&b.completed())?)
}

fn is_empty(dfa: &Dfa) -> bool {
    dfa.size() == 0
}

/// Partitions the union of the fragments into cells of words that lie in exactly
/// the same fragments; each cell carries the set of patterns whose fragment
/// contains it. Empty cells are dropped.
pub fn refine_partition(fragments: &[(Word, Nfa)]) -> Result<Vec<(Dfa, Vec<Word>)>> {
    if fragments.len() > PATTERN_GUARD {
        return Err(Error::CapExceeded(format!(
            "{} nonempty patterns exceed the refinement guard of {PATTERN_GUARD}",
            fragments.len()
        )));
    }
    let mut cells: Vec<(Dfa, Vec<Word>)> = Vec::new();
    let mut covered: Option<Dfa> = None;
    for (pattern, fragment) in fragments {
        let f = minimal(&determinize(fragment)?);
        let mut next = Vec::with_capacity(2 * cells.len() + 1);
        for (cell, patterns) in cells {
            let inside = intersect(&cell, &f)?;
            let outside = difference(&cell, &f)?;
            if !is_empty(&inside) {
                let mut with = patterns.clone();
                with.push(pattern.clone());
                next.push((inside, with));
            }
            if !is_empty(&outside) {
                next.push((outside, patterns));
            }
        }
        let fresh = match &covered {
            Some(u) => difference(&f, u)?,
            None => f.clone(),
        };
        if !is_empty(&fresh) {
            next.push((fresh, vec![pattern.clone()]));
        }
        covered = Some(match covered {
            Some(u) => minimal(&determinize(&crate::automata::union(&u.to_nfa(), &f.to_nfa())?)?),
            None => f,
        });
        cells = next;
    }
    for (_, patterns) in &mut cells {
        patterns.sort();
    }
    cells.sort_by(|a, b| a.1.cmp(&b.1));
    Ok(cells)
}

/// Unique decomposition `L = ∪_m ∪_j S^(m)(L_j^m, X_j^m)`.
pub fn canonical_decompose(nfa: &Nfa) -> Result<CanonicalDecomposition> {
    nfa.require_epsilon_free()?;
    // Work on the minimal DFA so the result depends only on the language.
    let nfa = minimize_canonical(&determinize(nfa)?).to_trimmed_nfa();
    let split = classify_alphabet(&nfa)?;
    let mut entries = Vec::new();
    if useful_states(&nfa).iter().any(|&u| u) {
        for m in 0..=split.max_count {
            let patterns: Vec<Word> = if m == 0 {
                vec![Vec::new()]
            } else {
                (0..m).map(|_| split.finite.iter().copied()).multi_cartesian_product().collect()
            };
            let mut fragments = Vec::new();
            for pattern in patterns {
                let fragment = extract_fragment(&nfa, &split, &pattern)?;
                if fragment.states() > 0 {
                    fragments.push((pattern, fragment));
                }
            }
            for (cell, words) in refine_partition(&fragments)? {
                entries.push(Entry { m, skeleton: cell.to_trimmed_nfa(), words });
            }
        }
    }
    Ok(CanonicalDecomposition { d: nfa.d(), split, entries })
}

/// Language of a decomposition: every `f` of a skeleton word is replaced
/// position by position with a word of the entry's set.
pub fn substitute(decomp: &CanonicalDecomposition) -> Result<Nfa> {
    let split = &decomp.split;
    let mut out = Nfa::new(decomp.d, 0);
    for entry in &decomp.entries {
        let trie = finite_language(decomp.d, &entry.words)?;
        let children = trie.delta_table();
        let sk = &entry.skeleton;
        let (ns, nt) = (sk.states(), trie.states());
        let base = out.states();
        for _ in 0..ns * nt {
            out.add_state();
        }
        let idx = |q: usize, t: usize| base + q * nt + t;
        for &q in sk.initial() {
            out.set_initial(idx(q, 0))?;
        }
        for &q in sk.accepting() {
            for &t in trie.accepting() {
                out.set_accepting(idx(q, t))?;
            }
        }
        for &(p, label, q) in sk.transitions() {
            let Label::Sym(b) = label else { unreachable!() };
            for t in 0..nt {
                if b < split.f() {
                    out.add_transition(idx(p, t), Label::Sym(split.infinite[b]), idx(q, t))?;
                } else {
                    for (a, next) in children[t].iter().enumerate() {
                        for &u in next {
                            out.add_transition(idx(p, t), Label::Sym(a), idx(q, u))?;
                        }
                    }
                }
            }
        }
    }
    trim(&out)
}

/// Canonical tensors of one entry.
#[derive(Debug, Clone)]
pub struct FormEntry {
    pub m: usize,
    /// MPS of the skeleton DFA (physical dimension `|Σ_∞| + 1`).
    pub l: BinaryMps,
    /// MPS of the minimal DFA of the word set (physical dimension `d`).
    pub x: BinaryMps,
    /// `mpo[o][i]`: bond matrix on the `x` bond for output symbol `o` and skeleton
    /// input `i`; identity on `Σ_∞` (via `ℙ_∞`), `x^o` on `f`.
    pub mpo: Vec<Vec<DMatrix<f64>>>,
}

#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub d: usize,
    pub split: AlphabetSplit,
    pub entries: Vec<FormEntry>,
}

fn to_f64(m: &[Vec<u8>]) -> DMatrix<f64> {
    DMatrix::from_fn(m.len(), m.len(), |i, j| f64::from(m[i][j]))
}

fn column(v: &[u8]) -> DMatrix<f64> {
    DMatrix::from_iterator(v.len(), 1, v.iter().map(|&x| f64::from(x)))
}

pub fn build_canonical_form(decomp: &CanonicalDecomposition) -> Result<CanonicalForm> {
    let split = &decomp.split;
    let mut entries = Vec::with_capacity(decomp.entries.len());
    for entry in &decomp.entries {
        let l = nfa_to_mps(&entry.skeleton)?;
        let xdfa = minimize_canonical(&determinize(&finite_language(decomp.d, &entry.words)?)?);
        let x = nfa_to_mps(&xdfa.to_trimmed_nfa())?;
        let bond = x.bond();
        let mpo = (0..decomp.d)
            .map(|o| {
                (0..split.skeleton_d())
                    .map(|i| {
                        if i == split.f() {
                            to_f64(x.matrix(o))
                        } else if split.infinite[i] == o {
                            DMatrix::identity(bond, bond)
                        } else {
                            DMatrix::zeros(bond, bond)
                        }
                    })
                    .collect()
            })
            .collect();
        entries.push(FormEntry { m: entry.m, l, x, mpo });
    }
    Ok(CanonicalForm { d: decomp.d, split: split.clone(), entries })
}

impl FormEntry {
    /// Combined transfer matrix `T^o = Σ_i l^i ⊗ mpo[o][i]`.
    pub fn transfer(&self, o: Symbol) -> DMatrix<f64> {
        let (dl, dx) = (self.l.bond(), self.x.bond());
        let mut t = DMatrix::zeros(dl * dx, dl * dx);
        for (i, block) in self.mpo[o].iter().enumerate() {
            t += to_f64(self.l.matrix(i)).kronecker(block);
        }
        t
    }

    pub fn amplitude(&self, w: &[Symbol]) -> f64 {
        let mut row = column(self.l.vl()).kronecker(&column(self.x.vl())).transpose();
        for &o in w {
            row *= self.transfer(o);
        }
        (row * column(self.l.vr()).kronecker(&column(self.x.vr())))[(0, 0)]
    }
}

impl CanonicalForm {
    /// Dense contraction of all entries at length `n`.
    pub fn state_vector(&self, n: usize) -> Result<StateVector> {
        let amps = all_words(self.d, n)?
            .map(|w| Complex64::new(self.entries.iter().map(|e| e.amplitude(&w)).sum(), 0.0))
            .collect();
        StateVector::new(self.d, n, amps)
    }
}

/// Checks the structural invariants of a decomposition; returns a description of
/// the first violation.
pub fn check_invariants(decomp: &CanonicalDecomposition, n_max: usize) -> Result<Option<String>> {
    let f = decomp.split.f();
    for (j, e) in decomp.entries.iter().enumerate() {
        if e.words.is_empty() || e.skeleton.states() == 0 {
            return Ok(Some(format!("entry {j} is empty")));
        }
        if e.words.iter().any(|w| w.len() != e.m) || e.words.windows(2).any(|p| p[0] >= p[1]) {
            return Ok(Some(format!("entry {j} has a malformed word set")));
        }
        for n in 0..=n_max {
            for w in all_words(decomp.split.skeleton_d(), n)? {
                if e.skeleton.accepts(&w) && w.iter().filter(|&&a| a == f).count() != e.m {
                    return Ok(Some(format!("entry {j} accepts a skeleton word with the wrong f count")));
                }
            }
        }
    }
    for (j, k) in (0..decomp.entries.len()).tuple_combinations() {
        let (a, b) = (&decomp.entries[j], &decomp.entries[k]);
        if a.m != b.m {
            continue;
        }
        if a.words == b.words {
            return Ok(Some(format!("entries {j} and {k} share a word set")));
        }
        if useful_states(&product(&a.skeleton, &b.skeleton)?).iter().any(|&u| u) {
            return Ok(Some(format!("entries {j} and {k} overlap")));
        }
    }
    Ok(None)
}
