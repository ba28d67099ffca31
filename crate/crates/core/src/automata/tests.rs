use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::catalog;
use crate::corpus::{random_nfa, random_regex};
use crate::lang::{all_words, enumerate_words, parse_regex, Alphabet};

fn re(text: &str, d: usize) -> Nfa {
    let ast = parse_regex(text, Alphabet::new(d).unwrap()).unwrap();
    compile(&ast, d).unwrap()
}

fn oracle(text: &str, d: usize, n: usize) -> BTreeSet<Word> {
    let ab = Alphabet::new(d).unwrap();
    enumerate_words(&parse_regex(text, ab).unwrap(), ab, n).unwrap()
}

fn accepted_nfa(nfa: &Nfa, n: usize) -> BTreeSet<Word> {
    all_words(nfa.d(), n).unwrap().filter(|w| nfa.accepts(w)).collect()
}

fn accepted_dfa(dfa: &Dfa, n: usize) -> BTreeSet<Word> {
    all_words(dfa.d(), n).unwrap().filter(|w| dfa.accepts(w)).collect()
}

fn w(s: &str) -> Word {
    s.bytes().map(|b| (b - b'0') as usize).collect()
}

fn set(list: &[&str]) -> BTreeSet<Word> {
    list.iter().map(|s| w(s)).collect()
}

#[test]
fn thompson_spot_checks() {
    let ab = Alphabet::new(2).unwrap();
    let nfa = regex_to_nfa(&parse_regex("0*10*", ab).unwrap(), 2).unwrap();
    assert!(nfa.accepts(&w("010")));
    assert!(!nfa.accepts(&w("110")));
    let eps = regex_to_nfa(&parse_regex("~", ab).unwrap(), 2).unwrap();
    assert!(eps.accepts(&[]));
    for n in 1..4 {
        assert!(accepted_nfa(&eps, n).is_empty());
    }
    let f2 = regex_to_nfa(&parse_regex("1*(011*)*", ab).unwrap(), 2).unwrap();
    assert_eq!(accepted_nfa(&f2, 3), oracle("1*(011*)*", 2, 3));
}

#[test]
fn thompson_state_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let ast = random_regex(&mut rng, 3, 4);
        let nfa = regex_to_nfa(&ast, 3).unwrap();
        assert!(nfa.states() <= 2 * ast.size());
    }
}

#[test]
fn epsilon_removal() {
    let f1 = catalog::f1();
    assert_eq!(remove_epsilon(&f1), f1);
    let ab = Alphabet::new(2).unwrap();
    let star = remove_epsilon(&regex_to_nfa(&parse_regex("0*", ab).unwrap(), 2).unwrap());
    assert!(star.is_epsilon_free());
    for n in 0..5 {
        assert_eq!(accepted_nfa(&star, n), BTreeSet::from([vec![0; n]]));
    }
    let w1 = remove_epsilon(&regex_to_nfa(&parse_regex("0*10*", ab).unwrap(), 2).unwrap());
    assert_eq!(accepted_nfa(&w1, 4), oracle("0*10*", 2, 4));
}

#[test]
fn trim_examples() {
    let f1 = catalog::f1();
    assert_eq!(trim(&f1).unwrap(), f1);

    let mut nfa = catalog::f1();
    let orphan = nfa.add_state();
    nfa.set_accepting(orphan).unwrap();
    let trimmed = trim(&nfa).unwrap();
    assert_eq!(trimmed.states(), 2);
    assert_eq!(trimmed, f1);

    let mut empty = Nfa::new(2, 3);
    empty.set_initial(0).unwrap();
    empty.add_transition(0, Label::Sym(0), 1).unwrap();
    assert_eq!(trim(&empty).unwrap().states(), 0);
}

#[test]
fn product_examples() {
    let f1 = catalog::f1();
    let sq = product(&f1, &f1).unwrap();
    let n = f1.states();
    let useful = useful_states(&sq);
    assert!((0..sq.states()).all(|s| !useful[s] || s / n == s % n));
    for k in 0..6 {
        assert_eq!(accepted_nfa(&sq, k), oracle("0*10*", 2, k));
    }

    let p = product(&re("0*", 2), &re("1*", 2)).unwrap();
    for k in 0..5 {
        let expected = if k == 0 { BTreeSet::from([vec![]]) } else { BTreeSet::new() };
        assert_eq!(accepted_nfa(&p, k), expected);
    }

    let both = product(&re("0*10*", 2), &re("1*(011*)*", 2)).unwrap();
    assert_eq!(accepted_nfa(&both, 2), set(&["01"]));
    for k in 0..7 {
        let expected: BTreeSet<Word> =
            oracle("0*10*", 2, k).intersection(&oracle("1*(011*)*", 2, k)).cloned().collect();
        assert_eq!(accepted_nfa(&both, k), expected);
    }

    assert!(matches!(product(&re("0", 2), &re("0", 3)), Err(Error::AlphabetMismatch(2, 3))));
}

#[test]
fn determinize_examples() {
    let f2 = catalog::f2();
    let dfa = determinize(&f2).unwrap();
    assert!(dfa.is_complete());
    assert_eq!(dfa.states(), 3, "two states of F2 plus the sink");
    for k in 0..7 {
        assert_eq!(accepted_dfa(&dfa, k), oracle("1*(011*)*", 2, k));
    }

    let doubled = catalog::doubled_w();
    let dfa = determinize(&doubled).unwrap();
    for k in 0..7 {
        assert_eq!(accepted_dfa(&dfa, k), oracle("0*10*", 2, k));
    }

    let empty = Nfa::new(2, 0);
    let dfa = determinize(&empty).unwrap();
    assert_eq!(dfa.states(), 1);
    assert_eq!(dfa.size(), 0);
}

#[test]
fn complement_examples() {
    let x = determinize(&re("1*(011*)*", 2)).unwrap();
    let cc = complement(&complement(&x).unwrap()).unwrap();
    assert!(equivalent(&cc, &x).unwrap());

    let all = determinize(&re("(0|1)*", 2)).unwrap();
    let none = complement(&all).unwrap();
    assert_eq!(none.size(), 0);

    let c = complement(&determinize(&re("0*10*", 2)).unwrap()).unwrap();
    assert_eq!(accepted_dfa(&c, 2), set(&["00", "11"]));

    let partial = Dfa::new(1, 0, vec![true], vec![vec![None]]).unwrap();
    assert!(matches!(complement(&partial), Err(Error::Incomplete)));
}

#[test]
fn minimal_sizes_match_drawn_automata() {
    let cases = [
        ("00|11|20|21", 3, 5),
        ("00|01|21|22", 3, 4),
        ("000|111", 2, 6),
        ("001|010|100|110|101|011", 2, 7),
        ("00|11", 2, 4),
        ("01|10", 2, 4),
    ];
    for (text, d, size) in cases {
        assert_eq!(minimal_dfa(&re(text, d)).unwrap().size(), size, "{text}");
    }
}

#[test]
fn minimisation_is_canonical() {
    let a = minimal_dfa(&re("1*(011*)*", 2)).unwrap();
    let b = minimal_dfa(&re("(1|01)*", 2)).unwrap();
    assert_eq!(a, b);
    assert_eq!(minimize_canonical(&a), a);
}

#[test]
fn equivalence_examples() {
    let x = determinize(&re("0*10*", 2)).unwrap();
    assert!(equivalent(&x, &x).unwrap());

    let y = determinize(&re("0*1*", 2)).unwrap();
    assert!(!equivalent(&x, &y).unwrap());
    assert_eq!(distinguishing_word(&x, &y).unwrap(), Some(vec![]));

    // Second presentation: 1* | 1*(011*)*, built with an explicit extra branch.
    let p1 = determinize(&catalog::f2()).unwrap();
    let p2 = determinize(&re("1*|1*(011*)*", 2)).unwrap();
    assert!(equivalent(&p1, &p2).unwrap());
    assert_eq!(distinguishing_word(&p1, &p2).unwrap(), None);

    let z = determinize(&re("0", 3)).unwrap();
    assert!(matches!(equivalent(&x, &z), Err(Error::AlphabetMismatch(2, 3))));
}

#[test]
fn shift_examples() {
    let w1 = re("0*10*", 2);
    let s = shift_language(&w1).unwrap();
    assert!(s.states() <= 2 * w1.states() * w1.states() + 1);
    assert!(nfa_equivalent(&s, &w1).unwrap());

    let single = shift_language(&re("01", 2)).unwrap();
    assert_eq!(accepted_nfa(&single, 2), set(&["01", "10"]));
    assert!(accepted_nfa(&single, 1).is_empty());
    assert!(accepted_nfa(&single, 3).is_empty());

    let f2 = shift_language(&re("1*(011*)*", 2)).unwrap();
    assert_eq!(accepted_nfa(&f2, 2), set(&["01", "10", "11"]));
}

#[test]
fn count_examples() {
    assert_eq!(count_words(&catalog::f1(), 5).unwrap(), BigUint::from(5u8));
    assert_eq!(count_words(&catalog::ghz(), 7).unwrap(), BigUint::from(2u8));
    assert_eq!(count_words(&catalog::f2(), 4).unwrap(), BigUint::from(5u8));
    assert_eq!(count_words(&catalog::doubled_w(), 3).unwrap(), BigUint::from(6u8));
}

#[test]
fn unambiguity_oracle_examples() {
    assert!(is_unambiguous_oracle(&catalog::f1()).unwrap());
    assert!(!is_unambiguous_oracle(&catalog::doubled_w()).unwrap());
    assert!(is_unambiguous_oracle(&Nfa::new(2, 0)).unwrap());
}

#[test]
fn relabel_examples() {
    let w1 = re("0*10*", 2);
    assert_eq!(relabel(&w1, &BTreeMap::new()).unwrap(), w1);
    let swapped = relabel(&w1, &BTreeMap::from([(0, 1), (1, 0)])).unwrap();
    assert!(nfa_equivalent(&swapped, &re("1*01*", 2)).unwrap());

    let three = relabel(&re("0*10*20*", 3), &BTreeMap::from([(1, 2), (2, 1)])).unwrap();
    assert_eq!(accepted_nfa(&three, 4), oracle("0*20*10*", 3, 4));

    assert!(matches!(relabel(&w1, &BTreeMap::from([(0, 1)])), Err(Error::NotBijective(_))));
}

#[test]
fn json_round_trip_sorts_transitions() {
    let mut nfa = Nfa::new(2, 2);
    nfa.add_transition(1, Label::Sym(0), 0).unwrap();
    nfa.add_transition(0, Label::Eps, 1).unwrap();
    nfa.add_transition(0, Label::Sym(1), 1).unwrap();
    nfa.set_initial(0).unwrap();
    nfa.set_accepting(1).unwrap();
    let text = nfa.to_json_string();
    assert_eq!(
        text,
        r#"{"d":2,"states":2,"initial":[0],"accepting":[1],"transitions":[{"from":0,"label":"eps","to":1},{"from":0,"label":1,"to":1},{"from":1,"label":0,"to":0}]}"#
    );
    assert_eq!(Nfa::from_json_str(&text).unwrap(), nfa);
    assert!(Nfa::from_json_str(r#"{"d":2,"states":1,"initial":[3],"accepting":[],"transitions":[]}"#).is_err());
    assert!(Nfa::from_json_str(r#"{"d":2,"states":1,"initial":[],"accepting":[],"transitions":[{"from":0,"label":"x","to":0}]}"#).is_err());
}

fn regex_strategy(d: usize) -> impl Strategy<Value = Regex> {
    let leaf = prop_oneof![
        1 => Just(Regex::Epsilon),
        1 => Just(Regex::Empty),
        6 => (0..d).prop_map(Regex::Symbol),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Regex::Concat),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Regex::Union),
            inner.prop_map(|r| Regex::Star(Box::new(r))),
        ]
    })
}

fn lang_set(ast: &Regex, d: usize, n: usize) -> BTreeSet<Word> {
    enumerate_words(ast, Alphabet::new(d).unwrap(), n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructions_agree_with_oracle(a in regex_strategy(2), b in regex_strategy(2)) {
        let (na, nb) = (compile(&a, 2).unwrap(), compile(&b, 2).unwrap());
        let da = determinize(&na).unwrap();
        let union_nfa = union(&na, &nb).unwrap();
        let inter = product(&na, &nb).unwrap();
        let comp = complement(&da).unwrap();
        let shifted = shift_language(&na).unwrap();
        let pi = BTreeMap::from([(0, 1), (1, 0)]);
        let swapped = relabel(&na, &pi).unwrap();
        for n in 0..=6 {
            let (la, lb) = (lang_set(&a, 2, n), lang_set(&b, 2, n));
            prop_assert_eq!(&accepted_nfa(&na, n), &la);
            prop_assert_eq!(accepted_dfa(&da, n), la.clone());
            prop_assert_eq!(accepted_nfa(&union_nfa, n), la.union(&lb).cloned().collect::<BTreeSet<_>>());
            prop_assert_eq!(accepted_nfa(&inter, n), la.intersection(&lb).cloned().collect::<BTreeSet<_>>());
            let all: BTreeSet<Word> = all_words(2, n).unwrap().collect();
            prop_assert_eq!(accepted_dfa(&comp, n), all.difference(&la).cloned().collect::<BTreeSet<_>>());
            let rotations: BTreeSet<Word> = la
                .iter()
                .flat_map(|w| (0..w.len().max(1)).map(move |k| {
                    let mut r = w.clone();
                    r.rotate_left(k.min(w.len()));
                    r
                }))
                .collect();
            prop_assert_eq!(accepted_nfa(&shifted, n), rotations);
            let relabelled: BTreeSet<Word> = la.iter().map(|w| w.iter().map(|&x| 1 - x).collect()).collect();
            prop_assert_eq!(accepted_nfa(&swapped, n), relabelled);
            prop_assert_eq!(count_words(&da.to_trimmed_nfa(), n).unwrap(), BigUint::from(la.len()));
        }
    }

    #[test]
    fn minimisation_is_presentation_independent(a in regex_strategy(2)) {
        let direct = minimal_dfa(&compile(&a, 2).unwrap()).unwrap();
        // A second presentation: union of the language with itself, then the square.
        let na = compile(&a, 2).unwrap();
        let other = product(&union(&na, &na).unwrap(), &na).unwrap();
        let via_other = minimal_dfa(&other).unwrap();
        prop_assert_eq!(&direct, &via_other);
        prop_assert_eq!(minimize_canonical(&direct), direct);
    }

    #[test]
    fn unambiguous_square_is_diagonal(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nfa = random_nfa(&mut rng, 4, 3);
        let dfa_nfa = determinize(&nfa).unwrap().to_trimmed_nfa();
        prop_assert!(is_unambiguous_oracle(&dfa_nfa).unwrap());
        // Oracle agrees with explicit path counting for short words.
        let mut ambiguous = false;
        for n in 0..=5 {
            for word in all_words(nfa.d(), n).unwrap() {
                if crate::mps::path_count(&nfa, &word) > 1 {
                    ambiguous = true;
                }
            }
        }
        if ambiguous {
            prop_assert!(!is_unambiguous_oracle(&nfa).unwrap());
        }
    }
}
