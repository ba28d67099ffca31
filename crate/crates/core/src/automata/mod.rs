//! Finite-automata engine: Thompson construction, ε-removal, trimming,
//! products, subset construction, complement, canonical minimisation,
//! equivalence, cyclic-shift closure, exact path counting and relabelling.

mod dfa;
mod nfa;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_bigint::BigUint;
use num_traits::Zero;

use crate::lang::{Regex, Symbol, Word};
use crate::{Error, Result};

pub use dfa::Dfa;
pub use nfa::{AutomatonJson, Label, LabelJson, Nfa, TransitionJson};

/// Thompson-style construction with at most two states per AST node.
pub fn regex_to_nfa(ast: &Regex, d: usize) -> Result<Nfa> {
    let mut nfa = Nfa::new(d, 0);
    let (s, t) = thompson(ast, &mut nfa)?;
    nfa.set_initial(s)?;
    nfa.set_accepting(t)?;
    Ok(nfa)
}

fn thompson(ast: &Regex, nfa: &mut Nfa) -> Result<(usize, usize)> {
    Ok(match ast {
        Regex::Symbol(a) => {
            let (s, t) = (nfa.add_state(), nfa.add_state());
            nfa.add_transition(s, Label::Sym(*a), t)?;
            (s, t)
        }
        Regex::Epsilon => {
            let (s, t) = (nfa.add_state(), nfa.add_state());
            nfa.add_transition(s, Label::Eps, t)?;
            (s, t)
        }
        Regex::Empty => (nfa.add_state(), nfa.add_state()),
        Regex::Concat(children) => {
            let mut ends: Option<(usize, usize)> = None;
            for child in children {
                let (cs, ct) = thompson(child, nfa)?;
                ends = Some(match ends {
                    None => (cs, ct),
                    Some((s, t)) => {
                        nfa.add_transition(t, Label::Eps, cs)?;
                        (s, ct)
                    }
                });
            }
            ends.ok_or_else(|| Error::Invalid("empty concatenation".into()))?
        }
        Regex::Union(children) => {
            let (s, t) = (nfa.add_state(), nfa.add_state());
            for child in children {
                let (cs, ct) = thompson(child, nfa)?;
                nfa.add_transition(s, Label::Eps, cs)?;
                nfa.add_transition(ct, Label::Eps, t)?;
            }
            (s, t)
        }
        Regex::Star(child) => {
            let (s, t) = (nfa.add_state(), nfa.add_state());
            let (cs, ct) = thompson(child, nfa)?;
            nfa.add_transition(s, Label::Eps, t)?;
            nfa.add_transition(s, Label::Eps, cs)?;
            nfa.add_transition(ct, Label::Eps, cs)?;
            nfa.add_transition(ct, Label::Eps, t)?;
            (s, t)
        }
    })
}

/// Same states; `p -a-> r` whenever `r` follows some state of the ε-closure of `p`.
pub fn remove_epsilon(nfa: &Nfa) -> Nfa {
    if nfa.is_epsilon_free() {
        return nfa.clone();
    }
    let closures = nfa.epsilon_closures();
    let delta = nfa.delta_table();
    let mut out = Nfa::new(nfa.d(), nfa.states());
    for &q in nfa.initial() {
        out.set_initial(q).unwrap();
    }
    for p in 0..nfa.states() {
        if closures[p].iter().any(|q| nfa.accepting().contains(q)) {
            out.set_accepting(p).unwrap();
        }
        for &q in &closures[p] {
            for a in 0..nfa.d() {
                for &r in &delta[q][a] {
                    out.add_transition(p, Label::Sym(a), r).unwrap();
                }
            }
        }
    }
    out
}

/// Forward-reachable and co-reachable states of an ε-free automaton.
pub fn useful_states(nfa: &Nfa) -> Vec<bool> {
    let n = nfa.states();
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for &(p, _, q) in nfa.transitions() {
        succ[p].push(q);
        pred[q].push(p);
    }
    let sweep = |seeds: &BTreeSet<usize>, adj: &[Vec<usize>]| {
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = seeds.iter().copied().collect();
        for &q in &stack {
            seen[q] = true;
        }
        while let Some(p) = stack.pop() {
            for &q in &adj[p] {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        seen
    };
    let fwd = sweep(nfa.initial(), &succ);
    let bwd = sweep(nfa.accepting(), &pred);
    (0..n).map(|q| fwd[q] && bwd[q]).collect()
}

/// Keeps exactly the useful states, renumbered in increasing order.
pub fn trim(nfa: &Nfa) -> Result<Nfa> {
    nfa.require_epsilon_free()?;
    let useful = useful_states(nfa);
    let mut index = vec![usize::MAX; nfa.states()];
    let mut count = 0;
    for q in 0..nfa.states() {
        if useful[q] {
            index[q] = count;
            count += 1;
        }
    }
    let mut out = Nfa::new(nfa.d(), count);
    for &q in nfa.initial().iter().filter(|&&q| useful[q]) {
        out.set_initial(index[q])?;
    }
    for &q in nfa.accepting().iter().filter(|&&q| useful[q]) {
        out.set_accepting(index[q])?;
    }
    for &(p, label, q) in nfa.transitions() {
        if useful[p] && useful[q] {
            out.add_transition(index[p], label, index[q])?;
        }
    }
    Ok(out)
}

fn same_alphabet(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::AlphabetMismatch(a, b))
    }
}

/// Cartesian product; state `(i, j)` has index `i * b.states() + j`.
pub fn product(a: &Nfa, b: &Nfa) -> Result<Nfa> {
    a.require_epsilon_free()?;
    b.require_epsilon_free()?;
    same_alphabet(a.d(), b.d())?;
    let nb = b.states();
    let mut out = Nfa::new(a.d(), a.states() * nb);
    for &i in a.initial() {
        for &j in b.initial() {
            out.set_initial(i * nb + j)?;
        }
    }
    for &i in a.accepting() {
        for &j in b.accepting() {
            out.set_accepting(i * nb + j)?;
        }
    }
    let db = b.delta_table();
    for &(i, label, k) in a.transitions() {
        let Label::Sym(x) = label else { unreachable!() };
        for j in 0..nb {
            for &l in &db[j][x] {
                out.add_transition(i * nb + j, label, k * nb + l)?;
            }
        }
    }
    Ok(out)
}

/// Disjoint union; states of `b` are shifted by `a.states()`.
pub fn union(a: &Nfa, b: &Nfa) -> Result<Nfa> {
    same_alphabet(a.d(), b.d())?;
    let shift = a.states();
    let mut out = a.clone();
    for _ in 0..b.states() {
        out.add_state();
    }
    for &q in b.initial() {
        out.set_initial(q + shift)?;
    }
    for &q in b.accepting() {
        out.set_accepting(q + shift)?;
    }
    for &(p, label, q) in b.transitions() {
        out.add_transition(p + shift, label, q + shift)?;
    }
    Ok(out)
}

/// Powerset construction over reachable subsets; the empty subset is the sink.
pub fn determinize(nfa: &Nfa) -> Result<Dfa> {
    nfa.require_epsilon_free()?;
    let d = nfa.d();
    let delta = nfa.delta_table();
    let start: Vec<usize> = nfa.initial().iter().copied().collect();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut subsets = vec![start];
    let mut table: Vec<Vec<Option<usize>>> = Vec::new();
    let mut head = 0;
    while head < subsets.len() {
        let current = subsets[head].clone();
        head += 1;
        let mut row = Vec::with_capacity(d);
        for a in 0..d {
            let next: Vec<usize> = current
                .iter()
                .flat_map(|&q| delta[q][a].iter().copied())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let id = *index.entry(next.clone()).or_insert_with(|| {
                subsets.push(next);
                subsets.len() - 1
            });
            row.push(Some(id));
        }
        table.push(row);
    }
    let accepting = subsets.iter().map(|s| s.iter().any(|q| nfa.accepting().contains(q))).collect();
    Dfa::new(d, 0, accepting, table)
}

pub fn complement(dfa: &Dfa) -> Result<Dfa> {
    if !dfa.is_complete() {
        return Err(Error::Incomplete);
    }
    let accepting = dfa.accepting().iter().map(|&f| !f).collect();
    let delta = (0..dfa.states()).map(|q| (0..dfa.d()).map(|a| dfa.next(q, a)).collect()).collect();
    Dfa::new(dfa.d(), dfa.initial(), accepting, delta)
}

/// Minimal complete DFA, states numbered in breadth-first order from the initial
/// state with symbols visited in ascending order.
///
/// Equivalent inputs produce identical outputs.
pub fn minimize_canonical(dfa: &Dfa) -> Dfa {
    let dfa = dfa.completed().bfs_renumbered();
    let n = dfa.states();
    let d = dfa.d();
    // Moore refinement: split classes by (class, successor classes) until stable.
    let mut class: Vec<usize> = (0..n).map(|q| usize::from(dfa.is_accepting(q))).collect();
    let mut count = class.iter().collect::<BTreeSet<_>>().len();
    loop {
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let next: Vec<usize> = (0..n)
            .map(|q| {
                let mut sig = Vec::with_capacity(d + 1);
                sig.push(class[q]);
                sig.extend((0..d).map(|a| class[dfa.next(q, a).unwrap()]));
                let fresh = ids.len();
                *ids.entry(sig).or_insert(fresh)
            })
            .collect();
        let new_count = ids.len();
        class = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    let mut delta = vec![vec![None; d]; count];
    let mut accepting = vec![false; count];
    for q in 0..n {
        accepting[class[q]] = dfa.is_accepting(q);
        for a in 0..d {
            delta[class[q]][a] = Some(class[dfa.next(q, a).unwrap()]);
        }
    }
    Dfa::new(d, class[dfa.initial()], accepting, delta)
        .expect("quotient is well formed")
        .bfs_renumbered()
}

/// Minimal canonical DFA of an ε-free automaton.
pub fn minimal_dfa(nfa: &Nfa) -> Result<Dfa> {
    Ok(minimize_canonical(&determinize(nfa)?))
}

/// Language equality by union-find pairing of states (Hopcroft–Karp).
pub fn equivalent(a: &Dfa, b: &Dfa) -> Result<bool> {
    same_alphabet(a.d(), b.d())?;
    let (a, b) = (a.completed(), b.completed());
    let offset = a.states();
    let mut parent: Vec<usize> = (0..offset + b.states()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let accepts = |q: usize| if q < offset { a.is_accepting(q) } else { b.is_accepting(q - offset) };
    let next = |q: usize, x: Symbol| {
        if q < offset {
            a.next(q, x).unwrap()
        } else {
            b.next(q - offset, x).unwrap() + offset
        }
    };
    let mut stack = vec![(a.initial(), b.initial() + offset)];
    let (ra, rb) = (find(&mut parent, stack[0].0), find(&mut parent, stack[0].1));
    parent[ra] = rb;
    while let Some((p, q)) = stack.pop() {
        if accepts(p) != accepts(q) {
            return Ok(false);
        }
        for x in 0..a.d() {
            let (np, nq) = (next(p, x), next(q, x));
            let (rp, rq) = (find(&mut parent, np), find(&mut parent, nq));
            if rp != rq {
                parent[rp] = rq;
                stack.push((np, nq));
            }
        }
    }
    Ok(true)
}

/// Shortest word (ties broken lexicographically) accepted by exactly one of the two DFAs.
pub fn distinguishing_word(a: &Dfa, b: &Dfa) -> Result<Option<Word>> {
    same_alphabet(a.d(), b.d())?;
    let (a, b) = (a.completed(), b.completed());
    let start = (a.initial(), b.initial());
    // Pair state -> (predecessor pair, symbol) on a shortest path from the start.
    type Parent = Option<((usize, usize), Symbol)>;
    let mut parent: HashMap<(usize, usize), Parent> = HashMap::from([(start, None)]);
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        if a.is_accepting(p) != b.is_accepting(q) {
            let mut word = Vec::new();
            let mut cur = (p, q);
            while let Some(Some((prev, x))) = parent.get(&cur) {
                word.push(*x);
                cur = *prev;
            }
            word.reverse();
            return Ok(Some(word));
        }
        for x in 0..a.d() {
            let nxt = (a.next(p, x).unwrap(), b.next(q, x).unwrap());
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(nxt) {
                e.insert(Some(((p, q), x)));
                queue.push_back(nxt);
            }
        }
    }
    Ok(None)
}

/// Language equality of two ε-free NFAs.
pub fn nfa_equivalent(a: &Nfa, b: &Nfa) -> Result<bool> {
    equivalent(&determinize(a)?, &determinize(b)?)
}

pub fn is_empty_language(nfa: &Nfa) -> Result<bool> {
    nfa.require_epsilon_free()?;
    Ok(!useful_states(nfa).into_iter().any(|u| u))
}

/// Automaton for `{ v u : u v in L }` with at most `2 D^2` states.
///
/// State `(phase, q, p)`: the run guessed that `u` ends in `q`; in phase 0 it reads
/// `v` from `q` and sits at `p`, in phase 1 it reads `u` from an initial state.
pub fn shift_language(nfa: &Nfa) -> Result<Nfa> {
    nfa.require_epsilon_free()?;
    let n = nfa.states();
    let idx = |phase: usize, q: usize, p: usize| phase * n * n + q * n + p;
    let delta = nfa.delta_table();
    let mut out = Nfa::new(nfa.d(), 2 * n * n);
    for q in 0..n {
        out.set_initial(idx(0, q, q))?;
        if nfa.initial().contains(&q) && nfa.accepting().contains(&q) {
            out.set_accepting(idx(0, q, q))?;
        }
        out.set_accepting(idx(1, q, q))?;
        // ε-free acceptance of `v` alone requires `u = ε`, i.e. `q` initial.
        if nfa.initial().contains(&q) {
            for &f in nfa.accepting() {
                out.set_accepting(idx(0, q, f))?;
            }
        }
        for p in 0..n {
            for a in 0..nfa.d() {
                for &r in &delta[p][a] {
                    out.add_transition(idx(0, q, p), Label::Sym(a), idx(0, q, r))?;
                    out.add_transition(idx(1, q, p), Label::Sym(a), idx(1, q, r))?;
                }
            }
            if nfa.accepting().contains(&p) {
                for &i in nfa.initial() {
                    for a in 0..nfa.d() {
                        for &r in &delta[i][a] {
                            out.add_transition(idx(0, q, p), Label::Sym(a), idx(1, q, r))?;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Number of accepting paths of length `n`: `v_l (sum_x A^x)^n v_r`, exactly.
pub fn count_words(nfa: &Nfa, n: usize) -> Result<BigUint> {
    Ok(count_profile(nfa, n)?.pop().unwrap())
}

/// Path counts for every length `0..=n_max`.
pub fn count_profile(nfa: &Nfa, n_max: usize) -> Result<Vec<BigUint>> {
    nfa.require_epsilon_free()?;
    let mut edges: Vec<(usize, usize)> = nfa.transitions().iter().map(|&(p, _, q)| (p, q)).collect();
    edges.sort_unstable();
    let mut row = vec![BigUint::zero(); nfa.states()];
    for &q in nfa.initial() {
        row[q] = BigUint::from(1u8);
    }
    let mut out = Vec::with_capacity(n_max + 1);
    for step in 0..=n_max {
        out.push(nfa.accepting().iter().map(|&q| &row[q]).sum());
        if step == n_max {
            break;
        }
        let mut next = vec![BigUint::zero(); nfa.states()];
        for &(p, q) in &edges {
            if !row[p].is_zero() {
                next[q] += &row[p];
            }
        }
        row = next;
    }
    Ok(out)
}

/// True iff the trimmed square of the automaton lies on the diagonal.
pub fn is_unambiguous_oracle(nfa: &Nfa) -> Result<bool> {
    let square = product(nfa, nfa)?;
    let n = nfa.states();
    let useful = useful_states(&square);
    Ok((0..square.states()).all(|s| !useful[s] || s / n.max(1) == s % n.max(1)))
}

/// Maps labels through `pi`; symbols outside its domain are fixed.
pub fn relabel(nfa: &Nfa, pi: &BTreeMap<Symbol, Symbol>) -> Result<Nfa> {
    let domain: BTreeSet<Symbol> = pi.keys().copied().collect();
    let image: BTreeSet<Symbol> = pi.values().copied().collect();
    if image.len() != pi.len() || image != domain {
        return Err(Error::NotBijective(format!("{pi:?}")));
    }
    if let Some(&a) = domain.iter().find(|&&a| a >= nfa.d()) {
        return Err(Error::SymbolOutOfRange { symbol: a, d: nfa.d() });
    }
    let mut out = Nfa::new(nfa.d(), nfa.states());
    for &q in nfa.initial() {
        out.set_initial(q)?;
    }
    for &q in nfa.accepting() {
        out.set_accepting(q)?;
    }
    for &(p, label, q) in nfa.transitions() {
        let label = match label {
            Label::Sym(a) => Label::Sym(*pi.get(&a).unwrap_or(&a)),
            Label::Eps => Label::Eps,
        };
        out.add_transition(p, label, q)?;
    }
    Ok(out)
}

/// ε-free automaton of a regular expression (Thompson, ε-removal, trim).
pub fn compile(ast: &Regex, d: usize) -> Result<Nfa> {
    trim(&remove_epsilon(&regex_to_nfa(ast, d)?))
}

/// Automaton accepting exactly the given finite set of words (a trie).
pub fn finite_language(d: usize, words: &[Word]) -> Result<Nfa> {
    let mut nfa = Nfa::new(d, 1);
    nfa.set_initial(0)?;
    let mut children: HashMap<(usize, Symbol), usize> = HashMap::new();
    for w in words {
        let mut q = 0;
        for &a in w {
            q = match children.get(&(q, a)) {
                Some(&n) => n,
                None => {
                    let n = nfa.add_state();
                    nfa.add_transition(q, Label::Sym(a), n)?;
                    children.insert((q, a), n);
                    n
                }
            };
        }
        nfa.set_accepting(q)?;
    }
    Ok(nfa)
}

#[cfg(test)]
mod tests;
