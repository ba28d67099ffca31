//! Exact incremental rank test over the integers.
//!
//! Rows are kept primitive (gcd 1) in echelon form, so reduction is fraction-free
//! and every admission decision is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

#[derive(Debug, Clone, Default)]
pub struct IntSpan {
    dim: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl IntSpan {
    pub fn new(dim: usize) -> Self {
        IntSpan { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Residual of `v` after elimination against the stored rows (zero iff in span).
    pub fn reduce(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim, "vector length differs from the ambient dimension");
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            if v[*pivot].is_zero() {
                continue;
            }
            let (a, b) = (row[*pivot].clone(), v[*pivot].clone());
            let g = a.gcd(&b);
            let (fa, fb) = (&a / &g, &b / &g);
            for (x, r) in v.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = &*x * &fa - r * &fb;
                } else if !x.is_zero() {
                    *x *= &fa;
                }
            }
            make_primitive(&mut v);
        }
        v
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` if it enlarges the span; returns whether it did.
    pub fn insert(&mut self, v: &[BigInt]) -> bool {
        let r = self.reduce(v);
        match r.iter().position(|x| !x.is_zero()) {
            None => false,
            Some(p) => {
                self.rows.push((p, r));
                true
            }
        }
    }
}

fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g > BigInt::one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
}

/// Converts small non-negative counts to exact integers.
pub fn to_bigints(v: &[u64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

pub fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        let mut s = IntSpan::new(3);
        assert!(s.insert(&ints(&[1, 2, 3])));
        assert!(s.insert(&ints(&[2, 4, 7])));
        assert!(!s.insert(&ints(&[3, 6, 10])));
        assert!(s.contains(&ints(&[0, 0, 5])));
        assert!(!s.contains(&ints(&[0, 1, 0])));
        assert_eq!(s.rank(), 2);
        assert!(!s.insert(&ints(&[0, 0, 0])));
    }

    /// Independent oracle: rank by floating-point Gaussian elimination with
    /// partial pivoting on small integer matrices.
    fn float_rank(rows: &[Vec<i64>]) -> usize {
        let mut m: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&x| x as f64).collect()).collect();
        let cols = m.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap()) else {
                break;
            };
            if m[p][c].abs() < 1e-9 {
                continue;
            }
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank {
                    let f = m[r][c] / m[rank][c];
                    for k in 0..cols {
                        m[r][k] -= f * m[rank][k];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn rank_matches_float_elimination(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 0..8)) {
            let mut s = IntSpan::new(5);
            for r in &rows {
                s.insert(&ints(r));
            }
            prop_assert_eq!(s.rank(), float_rank(&rows));
            for r in &rows {
                prop_assert!(s.contains(&ints(r)));
            }
        }
    }
}
