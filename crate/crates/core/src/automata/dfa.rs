use std::collections::{HashMap, VecDeque};

use crate::lang::Symbol;
use crate::{Error, Result};

use super::nfa::{Label, Nfa};

/// Deterministic automaton; `None` entries mean "no transition".
///
/// Every DFA produced by this crate is complete (an explicit sink absorbs
/// missing moves) unless stated otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dfa {
    d: usize,
    initial: usize,
    accepting: Vec<bool>,
    delta: Vec<Vec<Option<usize>>>,
}

impl Dfa {
    pub fn new(d: usize, initial: usize, accepting: Vec<bool>, delta: Vec<Vec<Option<usize>>>) -> Result<Self> {
        let n = accepting.len();
        if delta.len() != n || initial >= n {
            return Err(Error::Dimension("dfa tables disagree on the state count".into()));
        }
        for row in &delta {
            if row.len() != d {
                return Err(Error::Dimension("dfa row width differs from the alphabet".into()));
            }
            if let Some(&q) = row.iter().flatten().find(|&&q| q >= n) {
                return Err(Error::StateOutOfRange(q));
            }
        }
        Ok(Dfa { d, initial, accepting, delta })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    pub fn next(&self, q: usize, a: Symbol) -> Option<usize> {
        self.delta[q][a]
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(|row| row.iter().all(Option::is_some))
    }

    /// Adds a sink state if some transition is missing.
    pub fn completed(&self) -> Dfa {
        if self.is_complete() {
            return self.clone();
        }
        let sink = self.states();
        let mut delta: Vec<Vec<Option<usize>>> = self
            .delta
            .iter()
            .map(|row| row.iter().map(|t| Some(t.unwrap_or(sink))).collect())
            .collect();
        delta.push(vec![Some(sink); self.d]);
        let mut accepting = self.accepting.clone();
        accepting.push(false);
        Dfa { d: self.d, initial: self.initial, accepting, delta }
    }

    pub fn accepts(&self, w: &[Symbol]) -> bool {
        let mut q = self.initial;
        for &a in w {
            if a >= self.d {
                return false;
            }
            match self.delta[q][a] {
                Some(n) => q = n,
                None => return false,
            }
        }
        self.accepting[q]
    }

    /// States that are reachable from the initial state and can reach acceptance.
    pub fn useful(&self) -> Vec<bool> {
        let n = self.states();
        let mut fwd = vec![false; n];
        fwd[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(p) = queue.pop_front() {
            for q in self.delta[p].iter().flatten() {
                if !fwd[*q] {
                    fwd[*q] = true;
                    queue.push_back(*q);
                }
            }
        }
        let mut preds = vec![Vec::new(); n];
        for (p, row) in self.delta.iter().enumerate() {
            for q in row.iter().flatten() {
                preds[*q].push(p);
            }
        }
        let mut bwd = self.accepting.clone();
        let mut queue: VecDeque<usize> = (0..n).filter(|&q| bwd[q]).collect();
        while let Some(q) = queue.pop_front() {
            for &p in &preds[q] {
                if !bwd[p] {
                    bwd[p] = true;
                    queue.push_back(p);
                }
            }
        }
        (0..n).map(|q| fwd[q] && bwd[q]).collect()
    }

    /// Number of useful states; for a minimal DFA this excludes only the sink.
    pub fn size(&self) -> usize {
        self.useful().into_iter().filter(|&u| u).count()
    }

    /// Useful part as an ε-free NFA, states renumbered in increasing order.
    pub fn to_trimmed_nfa(&self) -> Nfa {
        let useful = self.useful();
        let mut index = vec![usize::MAX; self.states()];
        let mut count = 0;
        for q in 0..self.states() {
            if useful[q] {
                index[q] = count;
                count += 1;
            }
        }
        let mut nfa = Nfa::new(self.d, count);
        for p in (0..self.states()).filter(|&p| useful[p]) {
            if p == self.initial {
                nfa.set_initial(index[p]).unwrap();
            }
            if self.accepting[p] {
                nfa.set_accepting(index[p]).unwrap();
            }
            for a in 0..self.d {
                if let Some(q) = self.delta[p][a] {
                    if useful[q] {
                        nfa.add_transition(index[p], Label::Sym(a), index[q]).unwrap();
                    }
                }
            }
        }
        nfa
    }

    /// All states and transitions as an ε-free NFA (sink included).
    pub fn to_nfa(&self) -> Nfa {
        let mut nfa = Nfa::new(self.d, self.states());
        nfa.set_initial(self.initial).unwrap();
        for p in 0..self.states() {
            if self.accepting[p] {
                nfa.set_accepting(p).unwrap();
            }
            for a in 0..self.d {
                if let Some(q) = self.delta[p][a] {
                    nfa.add_transition(p, Label::Sym(a), q).unwrap();
                }
            }
        }
        nfa
    }

    /// Renumbers states in breadth-first discovery order (symbols ascending) and
    /// drops unreachable states.
    pub fn bfs_renumbered(&self) -> Dfa {
        let mut order = vec![self.initial];
        let mut index: HashMap<usize, usize> = HashMap::from([(self.initial, 0)]);
        let mut head = 0;
        while head < order.len() {
            let p = order[head];
            head += 1;
            for q in self.delta[p].iter().flatten() {
                if !index.contains_key(q) {
                    index.insert(*q, order.len());
                    order.push(*q);
                }
            }
        }
        let delta = order
            .iter()
            .map(|&p| self.delta[p].iter().map(|t| t.map(|q| index[&q])).collect())
            .collect();
        let accepting = order.iter().map(|&p| self.accepting[p]).collect();
        Dfa { d: self.d, initial: 0, accepting, delta }
    }
}
