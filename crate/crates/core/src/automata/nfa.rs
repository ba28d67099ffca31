use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::lang::Symbol;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Eps,
    Sym(Symbol),
}

/// Nondeterministic automaton with optional ε-moves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Nfa {
    d: usize,
    states: usize,
    initial: BTreeSet<usize>,
    accepting: BTreeSet<usize>,
    transitions: BTreeSet<(usize, Label, usize)>,
}

impl Nfa {
    pub fn new(d: usize, states: usize) -> Self {
        Nfa {
            d,
            states,
            initial: BTreeSet::new(),
            accepting: BTreeSet::new(),
            transitions: BTreeSet::new(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn transitions(&self) -> &BTreeSet<(usize, Label, usize)> {
        &self.transitions
    }

    pub fn add_state(&mut self) -> usize {
        self.states += 1;
        self.states - 1
    }

    fn check_state(&self, q: usize) -> Result<()> {
        if q < self.states {
            Ok(())
        } else {
            Err(Error::StateOutOfRange(q))
        }
    }

    pub fn add_transition(&mut self, from: usize, label: Label, to: usize) -> Result<()> {
        self.check_state(from)?;
        self.check_state(to)?;
        if let Label::Sym(a) = label {
            if a >= self.d {
                return Err(Error::SymbolOutOfRange { symbol: a, d: self.d });
            }
        }
        self.transitions.insert((from, label, to));
        Ok(())
    }

    pub fn set_initial(&mut self, q: usize) -> Result<()> {
        self.check_state(q)?;
        self.initial.insert(q);
        Ok(())
    }

    pub fn set_accepting(&mut self, q: usize) -> Result<()> {
        self.check_state(q)?;
        self.accepting.insert(q);
        Ok(())
    }

    pub fn is_epsilon_free(&self) -> bool {
        !self.transitions.iter().any(|t| t.1 == Label::Eps)
    }

    pub fn require_epsilon_free(&self) -> Result<()> {
        if self.is_epsilon_free() {
            Ok(())
        } else {
            Err(Error::EpsilonPresent)
        }
    }

    /// `delta[q][a]` = sorted successors of `q` on symbol `a` (ε-moves ignored).
    pub fn delta_table(&self) -> Vec<Vec<Vec<usize>>> {
        let mut table = vec![vec![Vec::new(); self.d]; self.states];
        for &(p, label, q) in &self.transitions {
            if let Label::Sym(a) = label {
                table[p][a].push(q);
            }
        }
        table
    }

    fn epsilon_successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.states];
        for &(p, label, q) in &self.transitions {
            if label == Label::Eps {
                succ[p].push(q);
            }
        }
        succ
    }

    /// ε-closure of every state, each as a sorted list.
    pub fn epsilon_closures(&self) -> Vec<Vec<usize>> {
        let succ = self.epsilon_successors();
        (0..self.states)
            .map(|start| {
                let mut seen = vec![false; self.states];
                let mut stack = vec![start];
                seen[start] = true;
                while let Some(p) = stack.pop() {
                    for &q in &succ[p] {
                        if !seen[q] {
                            seen[q] = true;
                            stack.push(q);
                        }
                    }
                }
                (0..self.states).filter(|&q| seen[q]).collect()
            })
            .collect()
    }

    /// Simulation with ε-closures; works on any automaton.
    pub fn accepts(&self, w: &[Symbol]) -> bool {
        if w.iter().any(|&a| a >= self.d) {
            return false;
        }
        let closures = self.epsilon_closures();
        let delta = self.delta_table();
        let close = |set: &BTreeSet<usize>| -> BTreeSet<usize> {
            set.iter().flat_map(|&q| closures[q].iter().copied()).collect()
        };
        let mut current = close(&self.initial);
        for &a in w {
            let next: BTreeSet<usize> = current.iter().flat_map(|&q| delta[q][a].iter().copied()).collect();
            current = close(&next);
        }
        current.iter().any(|q| self.accepting.contains(q))
    }

    pub fn to_json(&self) -> AutomatonJson {
        AutomatonJson {
            d: self.d,
            states: self.states,
            initial: self.initial.iter().copied().collect(),
            accepting: self.accepting.iter().copied().collect(),
            transitions: self
                .transitions
                .iter()
                .map(|&(from, label, to)| TransitionJson {
                    from,
                    label: match label {
                        Label::Eps => LabelJson::Tag("eps".into()),
                        Label::Sym(a) => LabelJson::Sym(a),
                    },
                    to,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &AutomatonJson) -> Result<Self> {
        if json.d == 0 {
            return Err(Error::EmptyAlphabet);
        }
        let mut nfa = Nfa::new(json.d, json.states);
        for &q in &json.initial {
            nfa.set_initial(q)?;
        }
        for &q in &json.accepting {
            nfa.set_accepting(q)?;
        }
        for t in &json.transitions {
            let label = match &t.label {
                LabelJson::Sym(a) => Label::Sym(*a),
                LabelJson::Tag(s) if s == "eps" => Label::Eps,
                LabelJson::Tag(s) => return Err(Error::Invalid(format!("unknown label {s:?}"))),
            };
            nfa.add_transition(t.from, label, t.to)?;
        }
        Ok(nfa)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("automaton serialises")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let json: AutomatonJson = serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        Nfa::from_json(&json)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub d: usize,
    pub states: usize,
    pub initial: Vec<usize>,
    pub accepting: Vec<usize>,
    pub transitions: Vec<TransitionJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionJson {
    pub from: usize,
    pub label: LabelJson,
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LabelJson {
    Sym(usize),
    Tag(String),
}
