//! Two-dimensional online tessellation automata, their PEPS tensors and exact
//! contraction on small pictures.
//!
//! A run assigns a state to every cell; cell `(i, j)` takes a state from
//! `δ(up, left, p[i][j])`, where `up` and `left` are the states of `(i-1, j)` and
//! `(i, j-1)`, and cells outside the picture hold the initial state.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::lang::Symbol;
use crate::{Error, Result};

/// Largest picture side accepted by the evaluators.
pub const PICTURE_CAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ota {
    states: usize,
    d: usize,
    initial: usize,
    accepting: BTreeSet<usize>,
    delta: BTreeMap<(usize, usize, Symbol), BTreeSet<usize>>,
}

impl Ota {
    pub fn new(states: usize, d: usize, initial: usize, accepting: impl IntoIterator<Item = usize>) -> Result<Self> {
        if d == 0 {
            return Err(Error::EmptyAlphabet);
        }
        if initial >= states {
            return Err(Error::StateOutOfRange(initial));
        }
        let accepting: BTreeSet<usize> = accepting.into_iter().collect();
        if let Some(&q) = accepting.iter().find(|&&q| q >= states) {
            return Err(Error::StateOutOfRange(q));
        }
        Ok(Ota { states, d, initial, accepting, delta: BTreeMap::new() })
    }

    /// Adds `to ∈ δ(up, left, sym)`.
    pub fn add(&mut self, up: usize, left: usize, sym: Symbol, to: usize) -> Result<()> {
        for q in [up, left, to] {
            if q >= self.states {
                return Err(Error::StateOutOfRange(q));
            }
        }
        if sym >= self.d {
            return Err(Error::SymbolOutOfRange { symbol: sym, d: self.d });
        }
        self.delta.entry((up, left, sym)).or_default().insert(to);
        Ok(())
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn targets(&self, up: usize, left: usize, sym: Symbol) -> impl Iterator<Item = usize> + '_ {
        self.delta.get(&(up, left, sym)).into_iter().flatten().copied()
    }

    pub fn to_json(&self) -> OtaJson {
        OtaJson {
            states: self.states,
            d: self.d,
            initial: self.initial,
            accepting: self.accepting.iter().copied().collect(),
            delta: self
                .delta
                .iter()
                .map(|(&(up, left, sym), to)| DeltaJson { left, up, sym, to: to.iter().copied().collect() })
                .collect(),
        }
    }

    pub fn from_json(json: &OtaJson) -> Result<Self> {
        let mut ota = Ota::new(json.states, json.d, json.initial, json.accepting.iter().copied())?;
        for t in &json.delta {
            for &to in &t.to {
                ota.add(t.up, t.left, t.sym, to)?;
            }
        }
        Ok(ota)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: OtaJson = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        Ota::from_json(&json)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OtaJson {
    pub states: usize,
    pub d: usize,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub delta: Vec<DeltaJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaJson {
    pub left: usize,
    pub up: usize,
    pub sym: Symbol,
    pub to: Vec<usize>,
}

/// Rectangular array of symbols, stored by rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Symbol>>", into = "Vec<Vec<Symbol>>")]
pub struct Picture {
    rows: Vec<Vec<Symbol>>,
}

impl Picture {
    pub fn new(rows: Vec<Vec<Symbol>>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || width == 0 {
            return Err(Error::Dimension("pictures need at least one row and one column".into()));
        }
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::Dimension("picture rows differ in length".into()));
        }
        Ok(Picture { rows })
    }

    /// `rows x cols` picture filled with one symbol.
    pub fn filled(rows: usize, cols: usize, sym: Symbol) -> Result<Self> {
        Picture::new(vec![vec![sym; cols]; rows])
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn at(&self, i: usize, j: usize) -> Symbol {
        self.rows[i][j]
    }

    fn check(&self, d: usize) -> Result<()> {
        if self.rows() > PICTURE_CAP || self.cols() > PICTURE_CAP {
            return Err(Error::CapExceeded(format!(
                "{}x{} picture exceeds {PICTURE_CAP}x{PICTURE_CAP}",
                self.rows(),
                self.cols()
            )));
        }
        match self.rows.iter().flatten().find(|&&a| a >= d) {
            Some(&a) => Err(Error::SymbolOutOfRange { symbol: a, d }),
            None => Ok(()),
        }
    }
}

impl TryFrom<Vec<Vec<Symbol>>> for Picture {
    type Error = Error;

    fn try_from(rows: Vec<Vec<Symbol>>) -> Result<Self> {
        Picture::new(rows)
    }
}

impl From<Picture> for Vec<Vec<Symbol>> {
    fn from(p: Picture) -> Self {
        p.rows
    }
}

/// Bulk tensor `T[up][left][down][right][a]` and boundary vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Peps {
    pub bond: usize,
    pub d: usize,
    bulk: Vec<u8>,
    /// `|q_0⟩`, closing the top and left edges.
    pub initial: Vec<u8>,
    /// `Σ_{f∈F} |f⟩`, closing the bottom-right corner.
    pub accepting: Vec<u8>,
}

impl Peps {
    fn index(&self, up: usize, left: usize, down: usize, right: usize, a: Symbol) -> usize {
        let b = self.bond;
        (((up * b + left) * b + down) * b + right) * self.d + a
    }

    pub fn entry(&self, up: usize, left: usize, down: usize, right: usize, a: Symbol) -> u8 {
        self.bulk[self.index(up, left, down, right, a)]
    }

    /// Nonzero bulk entries as `(up, left, down, right, a)`.
    pub fn support(&self) -> Vec<(usize, usize, usize, usize, Symbol)> {
        let b = self.bond;
        let mut out = Vec::new();
        for up in 0..b {
            for left in 0..b {
                for down in 0..b {
                    for right in 0..b {
                        for a in 0..self.d {
                            if self.entry(up, left, down, right, a) != 0 {
                                out.push((up, left, down, right, a));
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Entry `(x, y, z, z, a)` is 1 iff `z ∈ δ(x, y, a)`; all others vanish.
pub fn ota_to_peps(ota: &Ota) -> Peps {
    let b = ota.states;
    let mut peps = Peps {
        bond: b,
        d: ota.d,
        bulk: vec![0; b.pow(4) * ota.d],
        initial: (0..b).map(|q| u8::from(q == ota.initial)).collect(),
        accepting: (0..b).map(|q| u8::from(ota.accepting.contains(&q))).collect(),
    };
    for (&(up, left, a), targets) in &ota.delta {
        for &z in targets {
            let i = peps.index(up, left, z, z, a);
            peps.bulk[i] = 1;
        }
    }
    peps
}

/// Exact contraction, one column at a time. The frontier maps the right-bond
/// values of the current column to the summed weight of all partial
/// contractions producing them. Open bonds other than the corner's are summed
/// over; the corner's right bond meets the accepting vector.
pub fn peps_evaluate(peps: &Peps, p: &Picture) -> Result<u128> {
    p.check(peps.d)?;
    let (rows, b) = (p.rows(), peps.bond);
    // (up, left, a) -> [(down, right, weight)]
    type Outgoing = Vec<(usize, usize, u128)>;
    let mut nonzero: HashMap<(usize, usize, Symbol), Outgoing> = HashMap::new();
    for (up, left, down, right, a) in peps.support() {
        let w = u128::from(peps.entry(up, left, down, right, a));
        nonzero.entry((up, left, a)).or_default().push((down, right, w));
    }
    let mut frontier: HashMap<Vec<usize>, u128> = HashMap::new();
    for start in (0..rows).map(|_| (0..b).filter(|&q| peps.initial[q] != 0)).multi_cartesian_product() {
        let w: u128 = start.iter().map(|&q| u128::from(peps.initial[q])).product();
        *frontier.entry(start).or_default() += w;
    }
    for j in 0..p.cols() {
        let mut next: HashMap<Vec<usize>, u128> = HashMap::new();
        for (left, weight) in &frontier {
            // Partial columns: (up bond into the next row, right bonds so far, weight).
            let mut partial: Vec<(usize, Vec<usize>, u128)> = (0..b)
                .filter(|&q| peps.initial[q] != 0)
                .map(|q| (q, Vec::with_capacity(rows), *weight * u128::from(peps.initial[q])))
                .collect();
            for (i, &l) in left.iter().enumerate() {
                let mut grown = Vec::new();
                for (up, rights, w) in partial {
                    for &(down, right, v) in nonzero.get(&(up, l, p.at(i, j))).into_iter().flatten() {
                        let mut r = rights.clone();
                        r.push(right);
                        grown.push((down, r, w * v));
                    }
                }
                partial = grown;
            }
            // The bottom row's down bond is open and summed over.
            for (_, rights, w) in partial {
                *next.entry(rights).or_default() += w;
            }
        }
        frontier = next;
    }
    Ok(frontier.into_iter().map(|(rights, w)| w * u128::from(peps.accepting[rights[rows - 1]])).sum())
}

/// Direct nondeterministic run search: the set of reachable state rows,
/// computed row by row from the transition relation.
pub fn ota_accepts(ota: &Ota, p: &Picture) -> Result<bool> {
    p.check(ota.d)?;
    let cols = p.cols();
    let mut rows: HashSet<Vec<usize>> = HashSet::from([vec![ota.initial; cols]]);
    for i in 0..p.rows() {
        let mut next = HashSet::new();
        for above in &rows {
            let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
            for j in 0..cols {
                let mut grown = Vec::new();
                for prefix in &prefixes {
                    let left = prefix.last().copied().unwrap_or(ota.initial);
                    for z in ota.targets(above[j], left, p.at(i, j)) {
                        let mut row = prefix.clone();
                        row.push(z);
                        grown.push(row);
                    }
                }
                prefixes = grown;
            }
            next.extend(prefixes);
        }
        rows = next;
    }
    Ok(rows.iter().any(|row| ota.accepting.contains(&row[cols - 1])))
}

/// The three-state automaton of pictures over one symbol with an odd number of
/// columns.
pub fn odd_columns() -> Ota {
    let mut ota = Ota::new(3, 1, 0, [1]).expect("valid");
    for (up, left, to) in [(0, 0, 1), (0, 2, 1), (1, 0, 1), (1, 2, 1), (0, 1, 2), (2, 1, 2)] {
        ota.add(up, left, 0, to).expect("valid");
    }
    ota
}
