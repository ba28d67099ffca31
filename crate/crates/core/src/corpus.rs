//! Seeded random instance generators for oracle cross-checks and timing runs.

use rand::Rng;

use crate::automata::{Label, Nfa};
use crate::lang::Regex;

/// Random ε-free NFA with `1..=max_states` states over `1..=max_d` symbols
/// (at least two symbols when `max_d >= 2`).
pub fn random_nfa<R: Rng>(rng: &mut R, max_states: usize, max_d: usize) -> Nfa {
    let states = rng.random_range(1..=max_states);
    let d = rng.random_range(max_d.min(2)..=max_d);
    let density = rng.random_range(0.15..0.5);
    let mut nfa = Nfa::new(d, states);
    for p in 0..states {
        for a in 0..d {
            for q in 0..states {
                if rng.random_bool(density) {
                    nfa.add_transition(p, Label::Sym(a), q).unwrap();
                }
            }
        }
    }
    for q in 0..states {
        if rng.random_bool(0.35) {
            nfa.set_initial(q).unwrap();
        }
        if rng.random_bool(0.35) {
            nfa.set_accepting(q).unwrap();
        }
    }
    if nfa.initial().is_empty() {
        nfa.set_initial(rng.random_range(0..states)).unwrap();
    }
    if nfa.accepting().is_empty() {
        nfa.set_accepting(rng.random_range(0..states)).unwrap();
    }
    nfa
}

/// Random partial DFA with exactly `states` states, presented as an NFA.
///
/// State 0 is initial; each move exists with probability `fill`.
pub fn random_dfa<R: Rng>(rng: &mut R, states: usize, d: usize, fill: f64) -> Nfa {
    let mut nfa = Nfa::new(d, states);
    nfa.set_initial(0).unwrap();
    for p in 0..states {
        for a in 0..d {
            if rng.random_bool(fill) {
                nfa.add_transition(p, Label::Sym(a), rng.random_range(0..states)).unwrap();
            }
        }
        if rng.random_bool(0.3) {
            nfa.set_accepting(p).unwrap();
        }
    }
    if nfa.accepting().is_empty() {
        nfa.set_accepting(rng.random_range(0..states)).unwrap();
    }
    nfa
}

/// Random regular expression over `d` symbols with nesting depth at most `depth`.
pub fn random_regex<R: Rng>(rng: &mut R, d: usize, depth: usize) -> Regex {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..10) {
            0 => Regex::Epsilon,
            1 => Regex::Empty,
            _ => Regex::Symbol(rng.random_range(0..d)),
        };
    }
    match rng.random_range(0..3) {
        0 => Regex::Concat((0..rng.random_range(2..=3)).map(|_| random_regex(rng, d, depth - 1)).collect()),
        1 => Regex::Union((0..rng.random_range(2..=3)).map(|_| random_regex(rng, d, depth - 1)).collect()),
        _ => Regex::Star(Box::new(random_regex(rng, d, depth - 1))),
    }
}

/// Random expression whose bounded symbols stay bounded: a union of
/// `z0 y1* z1 ... yk* zk` blocks with short words `z` and `y`.
///
/// Bounded-occurrence structure makes these suitable for canonical decomposition.
pub fn random_block_regex<R: Rng>(rng: &mut R, d: usize) -> Regex {
    let word = |rng: &mut R, max: usize| -> Regex {
        let len = rng.random_range(0..=max);
        match len {
            0 => Regex::Epsilon,
            1 => Regex::Symbol(rng.random_range(0..d)),
            _ => Regex::Concat((0..len).map(|_| Regex::Symbol(rng.random_range(0..d))).collect()),
        }
    };
    let blocks = rng.random_range(1..=2);
    let mut terms = Vec::new();
    for _ in 0..blocks {
        let loops = rng.random_range(0..=2);
        let mut parts = vec![word(rng, 2)];
        for _ in 0..loops {
            let y = if rng.random_bool(0.3) {
                Regex::Union(vec![word(rng, 1), word(rng, 2)])
            } else {
                word(rng, 2)
            };
            parts.push(Regex::Star(Box::new(y)));
            parts.push(word(rng, 2));
        }
        terms.push(if parts.len() == 1 { parts.pop().unwrap() } else { Regex::Concat(parts) });
    }
    if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        Regex::Union(terms)
    }
}
