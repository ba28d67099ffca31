//! Named reference instances: small automata, languages, MPS-X ansätze and
//! single-site maps used by the tests, the CLI demo and the documentation.
//!
//! Symbols are 0-based. Languages quoted with symbols `1, 2, 3` elsewhere map to
//! `0, 1, 2` here.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::automata::{union, Label, Nfa};
use crate::mps::MpsX;

fn build(d: usize, states: usize, initial: &[usize], accepting: &[usize], edges: &[(usize, usize, usize)]) -> Nfa {
    let mut nfa = Nfa::new(d, states);
    for &q in initial {
        nfa.set_initial(q).unwrap();
    }
    for &q in accepting {
        nfa.set_accepting(q).unwrap();
    }
    for &(p, a, q) in edges {
        nfa.add_transition(p, Label::Sym(a), q).unwrap();
    }
    nfa
}

/// Two-state automaton of `0*10*` (words with exactly one 1).
pub fn f1() -> Nfa {
    build(2, 2, &[0], &[1], &[(0, 0, 0), (0, 1, 1), (1, 0, 1)])
}

/// Two-state automaton of `1*(011*)*` (every 0 is followed by a 1).
pub fn f2() -> Nfa {
    build(2, 2, &[0], &[0], &[(0, 0, 1), (0, 1, 0), (1, 1, 0)])
}

/// `0* | 1*`, one state per branch.
pub fn ghz() -> Nfa {
    build(2, 2, &[0, 1], &[0, 1], &[(0, 0, 0), (1, 1, 1)])
}

/// Two disjoint copies of [`f1`]: every word of `0*10*` has two accepting paths.
pub fn doubled_w() -> Nfa {
    union(&f1(), &f1()).unwrap()
}

pub const W_STATE: &str = "0*10*";
pub const GHZ: &str = "0*|1*";
pub const FIBONACCI: &str = "1*(011*)*";
pub const TWO_MARKERS: &str = "0*10*20*|0*20*10*";

/// Finite pair related by a 3x3 unitary (alphabet size 3).
pub const LU_PAIR_3: (&str, &str) = ("00|11|20|21", "00|01|21|22");
/// Bell pair related by a 2x2 unitary.
pub const BELL_PAIR: (&str, &str) = ("00|11", "01|10");
/// Pair related by an invertible non-unitary map at three sites.
pub const SLOCC_PAIR: (&str, &str) = ("000|111", "001|010|100|110|101|011");

pub const MPSX_D2_LANGUAGE: &str = "(0*21*3)*|(0*31*2)*";
pub const MPSX_D6_LANGUAGE: &str = "0*(10*20*3|20*30*1|30*10*2)0*";

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ket_bra(n: usize, pairs: &[(usize, usize)]) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(n, n);
    for &(i, j) in pairs {
        m[(i, j)] = c(1.0);
    }
    m
}

/// `X = I`, `A^0 = |0><0|`, `A^1 = |1><1|`, `A^2 = |0><1|`, `A^3 = |1><0|`.
pub fn mpsx_d2() -> MpsX {
    let a = vec![ket_bra(2, &[(0, 0)]), ket_bra(2, &[(1, 1)]), ket_bra(2, &[(0, 1)]), ket_bra(2, &[(1, 0)])];
    MpsX::new(4, DMatrix::identity(2, 2), a).unwrap()
}

/// Rank-3 boundary `X` on a 6-dimensional bond.
pub fn mpsx_d6() -> MpsX {
    let x = ket_bra(6, &[(3, 0), (4, 1), (5, 2)]);
    let a = vec![
        DMatrix::identity(6, 6),
        ket_bra(6, &[(0, 1), (3, 4)]),
        ket_bra(6, &[(1, 2), (4, 5)]),
        ket_bra(6, &[(2, 3)]),
    ];
    MpsX::new(4, x, a).unwrap()
}

/// 3x3 unitary relating the two languages of [`LU_PAIR_3`].
pub fn lu_unitary_3() -> DMatrix<Complex64> {
    let s = 3f64.sqrt();
    let (p, m) = ((1.0 + s) / 2.0, (1.0 - s) / 2.0);
    DMatrix::from_row_slice(3, 3, &[p, m, 1.0, 1.0, 1.0, -1.0, m, p, 1.0]).map(|x| c(x / s))
}

/// `(1/sqrt 2) [[1, i], [1, -i]]`.
pub fn bell_unitary() -> DMatrix<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(
        2,
        2,
        &[Complex64::new(r, 0.0), Complex64::new(0.0, r), Complex64::new(r, 0.0), Complex64::new(0.0, -r)],
    )
}

/// `-[[i/3^(1/6), (-1/3)^(1/6)], [(-1/3)^(1/6), i/3^(1/6)]]`, principal roots.
pub fn slocc_map() -> DMatrix<Complex64> {
    let diag = Complex64::new(0.0, 3f64.powf(-1.0 / 6.0));
    let off = Complex64::new(-1.0 / 3.0, 0.0).powf(1.0 / 6.0);
    DMatrix::from_row_slice(2, 2, &[-diag, -off, -off, -diag])
}
