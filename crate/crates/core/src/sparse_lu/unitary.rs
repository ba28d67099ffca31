//! Randomised damped Gauss–Newton search on the unitary group for a single-site unitary `U` with
//! `U^{⊗m} |x1⟩ = |x2⟩` for every constraint.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_integer::Integer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Accept threshold on the largest constraint residual.
pub const ACCEPT_TOL: f64 = 1e-7;
pub const RESTARTS: usize = 32;
const MAX_STEPS: usize = 200;

/// `(m, |x1⟩, |x2⟩)` with both vectors of length `k^m`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub m: usize,
    pub x1: Vec<Complex64>,
    pub x2: Vec<Complex64>,
}

#[derive(Debug, Clone)]
pub struct UnitarySolution {
    pub u: DMatrix<Complex64>,
    pub residual: f64,
    pub start: usize,
}

/// Applies `u` to site `s` of an `m`-site tensor with local dimension `k`.
pub fn apply_mode(v: &[Complex64], k: usize, m: usize, s: usize, u: &DMatrix<Complex64>) -> Vec<Complex64> {
    let stride = k.pow((m - 1 - s) as u32);
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for (idx, slot) in out.iter_mut().enumerate() {
        let a = idx / stride % k;
        let base = idx - a * stride;
        *slot = (0..k).map(|b| u[(a, b)] * v[base + b * stride]).sum();
    }
    out
}

pub fn apply_all(v: &[Complex64], k: usize, m: usize, u: &DMatrix<Complex64>) -> Vec<Complex64> {
    (0..m).fold(v.to_vec(), |acc, s| apply_mode(&acc, k, m, s, u))
}

/// Largest `‖U^{⊗m} x1 − x2‖` over the constraints.
pub fn max_residual(constraints: &[Constraint], u: &DMatrix<Complex64>) -> f64 {
    let k = u.nrows();
    constraints
        .iter()
        .map(|c| {
            let y = apply_all(&c.x1, k, c.m, u);
            y.iter().zip(&c.x2).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
        })
        .fold(0.0, f64::max)
}

/// Nearest unitary in Frobenius norm (`W V†` from the SVD `W Σ V†`).
pub fn polar(c: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let svd = c.clone().svd(true, true);
    svd.u.expect("left vectors requested") * svd.v_t.expect("right vectors requested")
}

pub fn haar_unitary(k: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let z = DMatrix::from_fn(k, k, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let (q, r) = z.qr().unpack();
    // Fix the phases of R's diagonal so the distribution is Haar.
    let phases = DMatrix::from_diagonal(&r.diagonal().map(|x| if x.norm() > 0.0 { x / x.norm() } else { Complex64::new(1.0, 0.0) }));
    q * phases
}

/// Jacobian of the stacked residual `x2 - U^{⊗m} x1` with respect to the `k²`
/// entries of `U` (column `a * k + b` is the derivative along `E_ab`), and the
/// residual itself.
fn linearise(constraints: &[Constraint], u: &DMatrix<Complex64>) -> (DMatrix<Complex64>, DVector<Complex64>) {
    let k = u.nrows();
    let rows: usize = constraints.iter().map(|c| c.x1.len()).sum();
    let mut jac = DMatrix::zeros(rows, k * k);
    let mut res = DVector::zeros(rows);
    let mut offset = 0;
    for con in constraints {
        let y = apply_all(&con.x1, k, con.m, u);
        for (i, (a, b)) in con.x2.iter().zip(&y).enumerate() {
            res[offset + i] = a - b;
        }
        for s in 0..con.m {
            let partial = (0..con.m).filter(|&t| t != s).fold(con.x1.clone(), |acc, t| apply_mode(&acc, k, con.m, t, u));
            let stride = k.pow((con.m - 1 - s) as u32);
            for idx in 0..partial.len() {
                let a = idx / stride % k;
                let base = idx - a * stride;
                for b in 0..k {
                    jac[(offset + idx, a * k + b)] += partial[base + b * stride];
                }
            }
        }
        offset += con.x1.len();
    }
    (jac, res)
}

/// Damped Gauss–Newton step on the linearised constraints followed by the
/// polar projection back onto the unitary group.
fn descend(constraints: &[Constraint], mut u: DMatrix<Complex64>) -> (DMatrix<Complex64>, f64) {
    let k = u.nrows();
    let mut residual = max_residual(constraints, &u);
    let mut damping = 1e-3;
    for _ in 0..MAX_STEPS {
        if residual < 1e-13 {
            break;
        }
        let (jac, res) = linearise(constraints, &u);
        let jh = jac.adjoint();
        let normal = &jh * &jac;
        let rhs = &jh * res;
        let mut improved = false;
        while damping < 1e8 {
            let system = &normal + DMatrix::<Complex64>::identity(k * k, k * k) * Complex64::new(damping, 0.0);
            let Some(step) = system.cholesky().map(|c| c.solve(&rhs)) else {
                damping *= 10.0;
                continue;
            };
            let candidate = polar(&(&u + DMatrix::from_fn(k, k, |a, b| step[a * k + b])));
            let r = max_residual(constraints, &candidate);
            if r < residual {
                u = candidate;
                residual = r;
                damping = (damping / 3.0).max(1e-12);
                improved = true;
                break;
            }
            damping *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (u, residual)
}

/// Multiplies `u` by the `g`-th root of unity that brings the first clearly
/// nonzero entry of its first column closest to the positive real axis, where
/// `g` is the gcd of the constraint lengths (other phases change `U^{⊗m}`).
pub fn normalise_phase(u: &DMatrix<Complex64>, constraints: &[Constraint]) -> DMatrix<Complex64> {
    let g = constraints.iter().map(|c| c.m).filter(|&m| m > 0).fold(0, |a, b| a.gcd(&b));
    let Some(z) = u.iter().copied().find(|z| z.norm() > 1e-9) else {
        return u.clone();
    };
    if g == 0 {
        // Unconstrained: any phase is allowed.
        return u * (z.conj() / z.norm());
    }
    let best = (0..g)
        .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t as f64 / g as f64))
        .min_by(|a, b| (a * z).arg().abs().total_cmp(&(b * z).arg().abs()))
        .unwrap();
    u * best
}

/// Searches from the identity and `RESTARTS - 1` Haar-random starts seeded from
/// `seed`; returns the best solution if its residual is below [`ACCEPT_TOL`].
pub fn solve_unitary(constraints: &[Constraint], k: usize, seed: u64) -> Option<UnitarySolution> {
    let runs: Vec<(usize, DMatrix<Complex64>, f64)> = (0..RESTARTS)
        .into_par_iter()
        .map(|start| {
            let u0 = if start == 0 {
                DMatrix::identity(k, k)
            } else {
                haar_unitary(k, &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(start as u64)))
            };
            let (u, r) = descend(constraints, u0);
            (start, u, r)
        })
        .collect();
    let (start, u, _) = runs.into_iter().min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))?;
    let u = normalise_phase(&u, constraints);
    let residual = max_residual(constraints, &u);
    (residual < ACCEPT_TOL).then_some(UnitarySolution { u, residual, start })
}

pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    (u.adjoint() * u - DMatrix::identity(u.nrows(), u.ncols())).norm()
}
