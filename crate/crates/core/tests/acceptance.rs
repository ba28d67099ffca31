//! Acceptance run: one line per criterion with its verdict, details and time.
//!
//! Criteria listed in `EXPECTED_RED` are known not to hold as stated; they are
//! still evaluated faithfully and reported as FAIL. Any other failure, or an
//! expected-red criterion that fails to run at all, makes the target fail.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_bigint::BigUint;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rls_core::algebra::{check_rls, check_shift_invariant_algebraic, check_shift_invariant_naive, check_ti_mpsx};
use rls_core::automata::{compile, count_profile, is_unambiguous_oracle, minimal_dfa, nfa_equivalent, Nfa};
use rls_core::canonical::{canonical_decompose, substitute};
use rls_core::catalog;
use rls_core::corpus::{random_block_regex, random_dfa, random_nfa, random_regex};
use rls_core::lang::{all_words, enumerate_words, membership, parse_regex, Alphabet, Regex, Word};
use rls_core::mps::{nfa_to_mps, path_count, schmidt_rank, MpsX, StateVector};
use rls_core::peps2d::{odd_columns, ota_accepts, ota_to_peps, peps_evaluate, Picture};
use rls_core::sparse_lu::{growth_is_polynomial, is_sparse, verify_product_map};

const EXPECTED_RED: &[usize] = &[6];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn ast(text: &str, d: usize) -> Regex {
    parse_regex(text, Alphabet::new(d).unwrap()).unwrap()
}

fn re(text: &str, d: usize) -> Nfa {
    compile(&ast(text, d), d).unwrap()
}

fn criterion_1() -> Outcome {
    let f1 = nfa_to_mps(&catalog::f1()).unwrap();
    let f2 = nfa_to_mps(&catalog::f2()).unwrap();
    let ok1 = *f1.matrix(0) == vec![vec![1, 0], vec![0, 1]]
        && *f1.matrix(1) == vec![vec![0, 1], vec![0, 0]]
        && f1.vl() == [1, 0]
        && f1.vr() == [0, 1];
    let ok2 = *f2.matrix(0) == vec![vec![0, 1], vec![0, 0]]
        && *f2.matrix(1) == vec![vec![1, 0], vec![1, 0]]
        && f2.vl() == [1, 0]
        && f2.vr() == [1, 0];
    outcome(ok1 && ok2, format!("F1 tensors {}, F2 tensors {}", ok1, ok2))
}

fn criterion_2() -> Outcome {
    let (a, b) = catalog::LU_PAIR_3;
    let (c, e) = catalog::SLOCC_PAIR;
    let sizes = [
        minimal_dfa(&re(a, 3)).unwrap().size(),
        minimal_dfa(&re(b, 3)).unwrap().size(),
        minimal_dfa(&re(c, 2)).unwrap().size(),
        minimal_dfa(&re(e, 2)).unwrap().size(),
    ];
    outcome(sizes == [5, 4, 6, 7], format!("sizes {sizes:?}, expected [5, 4, 6, 7]"))
}

fn residual(m: &DMatrix<Complex64>, l1: &Nfa, l2: &Nfa, n: usize) -> f64 {
    let a = nfa_to_mps(l1).unwrap().state_vector(n).unwrap().apply_product(m).unwrap();
    a.distance(&nfa_to_mps(l2).unwrap().state_vector(n).unwrap())
}

fn criterion_3() -> Outcome {
    let (a, b) = catalog::LU_PAIR_3;
    let (p, q) = catalog::BELL_PAIR;
    let (s, t) = catalog::SLOCC_PAIR;
    let cases = [
        ("3x3 U, N=2", catalog::lu_unitary_3(), re(a, 3), re(b, 3), 2),
        ("Bell U, N=2", catalog::bell_unitary(), re(p, 2), re(q, 2), 2),
        ("SLOCC P, N=3", catalog::slocc_map(), re(s, 2), re(t, 2), 3),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, m, l1, l2, n) in cases {
        let start = Instant::now();
        let r = residual(&m, &l1, &l2, n);
        let ok = r < 1e-9 && verify_product_map(&m, &l1, &l2, n).unwrap() && start.elapsed() < Duration::from_secs(1);
        pass &= ok;
        parts.push(format!("{name}: {r:.1e}"));
    }
    outcome(pass, parts.join(", "))
}

fn corpus_language(seed: u64) -> (Nfa, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = 2 + (seed % 2) as usize;
    let a = if seed.is_multiple_of(3) { random_block_regex(&mut rng, d) } else { random_regex(&mut rng, d, 3) };
    let text = rls_core::lang::render(&a, Alphabet::new(d).unwrap());
    (compile(&a, d).unwrap(), text)
}

fn criterion_4() -> Outcome {
    let w = canonical_decompose(&re(catalog::W_STATE, 2)).unwrap().to_json_string();
    let two = canonical_decompose(&re(catalog::TWO_MARKERS, 3)).unwrap().to_json_string();
    let golden_ok = w == include_str!("golden/w_state.json").trim()
        && two == include_str!("golden/two_markers.json").trim();
    let mut failures = Vec::new();
    for seed in 0..100 {
        let (nfa, text) = corpus_language(seed);
        let back = substitute(&canonical_decompose(&nfa).unwrap()).unwrap();
        if !nfa_equivalent(&back, &nfa).unwrap() {
            failures.push(text);
        }
    }
    outcome(
        golden_ok && failures.is_empty(),
        format!("golden {}, round trip failures {}/100 {:?}", golden_ok, failures.len(), failures),
    )
}

fn brute_ambiguous(nfa: &Nfa, n_max: usize) -> bool {
    (0..=n_max).any(|n| all_words(nfa.d(), n).unwrap().any(|w| path_count(nfa, &w) >= 2))
}

fn brute_rotation_closed(nfa: &Nfa, n_max: usize) -> bool {
    (1..=n_max).all(|n| {
        all_words(nfa.d(), n).unwrap().all(|w| {
            let mut r = w.clone();
            r.rotate_left(1);
            nfa.accepts(&w) == nfa.accepts(&r)
        })
    })
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut total, mut unambiguous) = (0, 0);
    let mut disagreements: Vec<String> = Vec::new();
    while total < 300 {
        let nfa = random_nfa(&mut rng, 4, 3);
        total += 1;
        let mps = nfa_to_mps(&nfa).unwrap();
        let algebraic = check_rls(&mps).result;
        let oracle = is_unambiguous_oracle(&nfa).unwrap();
        let brute = !brute_ambiguous(&nfa, 6);
        if !(algebraic == oracle && oracle == brute) {
            disagreements.push(format!("rls #{total}: alg {algebraic} oracle {oracle} brute {brute}"));
        }
        if oracle {
            unambiguous += 1;
            let shift = check_shift_invariant_algebraic(&mps).result;
            let naive = check_shift_invariant_naive(&nfa).unwrap();
            let rot = brute_rotation_closed(&nfa, 8);
            if !(shift == naive && naive == rot) {
                disagreements.push(format!("shift #{total}: alg {shift} naive {naive} brute {rot}"));
            }
        }
    }
    outcome(
        disagreements.is_empty(),
        format!("{total} NFAs, {unambiguous} unambiguous, disagreements {}: {:?}", disagreements.len(), disagreements),
    )
}

/// Words of length `n` where the ansatz amplitude is not the 0/1 membership value.
fn mpsx_mismatches(mpsx: &MpsX, lang: &Regex, n_max: usize) -> (usize, Option<(Word, Complex64)>) {
    let mut count = 0;
    let mut first = None;
    for n in 0..=n_max {
        let sv = mpsx.state_vector(n).unwrap();
        for (i, w) in all_words(mpsx.d(), n).unwrap().enumerate() {
            let expected = if membership(lang, &w) { 1.0 } else { 0.0 };
            if (sv.amps[i] - Complex64::new(expected, 0.0)).norm() > 1e-9 {
                count += 1;
                first.get_or_insert((w, sv.amps[i]));
            }
        }
    }
    (count, first)
}

fn criterion_6() -> Outcome {
    let lang2 = ast(catalog::MPSX_D2_LANGUAGE, 4);
    let lang6 = ast(catalog::MPSX_D6_LANGUAGE, 4);
    let (x2, x6) = (catalog::mpsx_d2(), catalog::mpsx_d6());
    let (bad2, first2) = mpsx_mismatches(&x2, &lang2, 8);
    let (bad6, _) = mpsx_mismatches(&x6, &lang6, 8);
    let ti = check_ti_mpsx(&x2).result && check_ti_mpsx(&x6).result;
    let words = enumerate_words(&lang2, Alphabet::new(4).unwrap(), 6).unwrap();
    let rank = schmidt_rank(&StateVector::from_words(4, 6, &words).unwrap(), 3).unwrap();
    let first = first2.map(|(w, a)| format!(" first {:?} amplitude {}", w, a.re)).unwrap_or_default();
    outcome(
        bad2 == 0 && bad6 == 0 && ti && rank >= 4,
        format!("D=2 mismatches {bad2}{first}; D=6 mismatches {bad6}; TI {ti}; Schmidt rank N=6 {rank}"),
    )
}

fn criterion_7() -> Outcome {
    let profile = |text: &str| count_profile(&minimal_dfa(&re(text, 2)).unwrap().to_trimmed_nfa(), 10).unwrap();
    let oracle = |text: &str| -> Vec<BigUint> {
        (0..=10).map(|n| BigUint::from(enumerate_words(&ast(text, 2), Alphabet::new(2).unwrap(), n).unwrap().len())).collect()
    };
    let w = profile(catalog::W_STATE);
    let ghz = profile(catalog::GHZ);
    let fib = profile(catalog::FIBONACCI);
    let w_ok = (0..=10).all(|n| w[n] == BigUint::from(n));
    let ghz_ok = (1..=10).all(|n| ghz[n] == BigUint::from(2u8));
    let fib_ok = fib[1..=5] == [1u8, 2, 3, 5, 8].map(BigUint::from);
    let oracle_ok = [catalog::W_STATE, catalog::GHZ, catalog::FIBONACCI].iter().all(|t| profile(t) == oracle(t));
    outcome(w_ok && ghz_ok && fib_ok && oracle_ok, format!("W {w_ok}, GHZ {ghz_ok}, Fibonacci {fib_ok}, enumeration {oracle_ok}"))
}

fn criterion_8() -> Outcome {
    let ota = odd_columns();
    let peps = ota_to_peps(&ota);
    let mut bad = Vec::new();
    for rows in 1..=4 {
        for cols in 1..=5 {
            let p = Picture::filled(rows, cols, 0).unwrap();
            let value = peps_evaluate(&peps, &p).unwrap();
            if (value > 0) != (cols % 2 == 1) || ota_accepts(&ota, &p).unwrap() != (value > 0) {
                bad.push((rows, cols));
            }
        }
    }
    outcome(bad.is_empty(), format!("20 picture sizes, failures {bad:?}"))
}

fn criterion_9() -> Outcome {
    let cases = [
        (re(catalog::W_STATE, 2), true, "0*10*"),
        (re("00|11", 2), true, "{00,11}"),
        (re("(0|1)*", 2), false, "(0|1)*"),
        (re(catalog::FIBONACCI, 2), false, "1*(011*)*"),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (nfa, expected, name) in cases {
        let verdict = is_sparse(&nfa).unwrap().sparse;
        let growth = growth_is_polynomial(&nfa, 15).unwrap();
        pass &= verdict == expected && growth == expected;
        parts.push(format!("{name}: {verdict}/{growth}"));
    }
    outcome(pass, parts.join(", "))
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn slope(ds: &[f64], ts: &[f64]) -> f64 {
    let xs: Vec<f64> = ds.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn criterion_10() -> Outcome {
    let dims = [4usize, 8, 16, 32];
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut rls_t, mut shift_t, mut worst) = (Vec::new(), Vec::new(), Vec::new());
    for &d in &dims {
        let (mut a, mut b, mut w) = (Vec::new(), Vec::new(), 0f64);
        for _ in 0..15 {
            let nfa = random_dfa(&mut rng, d, 2, 0.9);
            let mps = nfa_to_mps(&nfa).unwrap();
            let t = Instant::now();
            std::hint::black_box(check_rls(&mps));
            a.push(t.elapsed().as_secs_f64());
            let t = Instant::now();
            std::hint::black_box(check_shift_invariant_algebraic(&mps));
            b.push(t.elapsed().as_secs_f64());
            w = w.max(*b.last().unwrap());
        }
        rls_t.push(median(a));
        shift_t.push(median(b));
        worst.push(w);
    }
    let df: Vec<f64> = dims.iter().map(|&d| d as f64).collect();
    let (s1, s2, s3) = (slope(&df, &rls_t), slope(&df, &shift_t), slope(&df, &worst));
    outcome(
        s1 <= 3.5 && s2 <= 3.5,
        format!(
            "median slopes: check_rls {s1:.2}, shift {s2:.2} (medians {:?} ms); worst-case shift slope {s3:.2} (informational)",
            rls_t.iter().zip(&shift_t).map(|(a, b)| format!("{:.3}/{:.3}", a * 1e3, b * 1e3)).collect::<Vec<_>>()
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (usize, fn() -> Outcome, Duration);
    let criteria: [Criterion; 10] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(1)),
        (3, criterion_3, Duration::from_secs(3)),
        (4, criterion_4, Duration::from_secs(30)),
        (5, criterion_5, Duration::from_secs(120)),
        (6, criterion_6, Duration::from_secs(30)),
        (7, criterion_7, Duration::from_secs(1)),
        (8, criterion_8, Duration::from_secs(10)),
        (9, criterion_9, Duration::from_secs(5)),
        (10, criterion_10, Duration::from_secs(300)),
    ];
    let mut unexpected = Vec::new();
    for (id, run, limit) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run);
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed <= limit, o.detail),
            Err(_) => (false, "panicked".to_string()),
        };
        let timing = if elapsed > limit { " [over time limit]" } else { "" };
        let tag = match (pass, EXPECTED_RED.contains(&id)) {
            (true, _) => "PASS",
            (false, true) => "FAIL (expected)",
            (false, false) => "FAIL",
        };
        println!("criterion {id:>2}: {tag} in {:.2}s{timing} | {detail}", elapsed.as_secs_f64());
        if !pass && (!EXPECTED_RED.contains(&id) || detail == "panicked") {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
