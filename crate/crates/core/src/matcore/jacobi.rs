//! Cyclic Jacobi eigensolver for dense complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a diagonal
//! unitary and then applies a real Givens rotation, so the pair `(p, q)` is
//! annihilated exactly. Sweeps continue until the off-diagonal Frobenius mass
//! drops below `1e-13 * ||A||_F` (or the tight threshold, see
//! [`with_tight_tolerance`]).

use std::cell::Cell;

use super::matrix::{Matrix, C64};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 64;
pub const DEFAULT_REL_TOL: f64 = 1e-13;
pub const TIGHT_REL_TOL: f64 = 1e-15;

thread_local! {
    static TIGHT: Cell<bool> = const { Cell::new(false) };
}

/// Runs `f` with the eigensolver switched to its tight stopping threshold on
/// the current thread.
pub fn with_tight_tolerance<R>(f: impl FnOnce() -> R) -> R {
    struct Reset(bool);
    impl Drop for Reset {
        fn drop(&mut self) {
            TIGHT.with(|t| t.set(self.0));
        }
    }
    let previous = TIGHT.with(|t| t.replace(true));
    let _reset = Reset(previous);
    f()
}

fn stopping_threshold(n: usize, frob: f64) -> f64 {
    if TIGHT.with(|t| t.get()) {
        (TIGHT_REL_TOL * frob).max(n as f64 * f64::EPSILON * frob)
    } else {
        DEFAULT_REL_TOL * frob
    }
}

fn off_diagonal_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposes a Hermitian matrix given as a square [`Matrix`].
///
/// Returns eigenvalues in ascending order and the unitary whose columns are
/// the matching eigenvectors. Only the Hermitian part of the input is used.
pub fn jacobi_eigh(input: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    if !input.is_square() {
        return Err(Error::NotSquare {
            rows: input.rows(),
            cols: input.cols(),
        });
    }
    let n = input.rows();
    let mut a: Vec<C64> = input.data().to_vec();
    for i in 0..n {
        a[i * n + i] = C64::new(a[i * n + i].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[i * n + j] + a[j * n + i].conj()) * 0.5;
            a[i * n + j] = avg;
            a[j * n + i] = avg.conj();
        }
    }
    let mut v = Matrix::identity(n);

    let frob = input.frobenius_norm();
    let threshold = stopping_threshold(n, frob);
    let mut converged = n <= 1 || off_diagonal_norm(&a, n) <= threshold;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, v.data_mut(), n, p, q);
            }
        }
        converged = off_diagonal_norm(&a, n) <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            residual: off_diagonal_norm(&a, n),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((values, vectors))
}

/// Annihilates `a[p][q]` in place and accumulates the rotation into `v`.
fn rotate(a: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;

    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    if t == 0.0 {
        // The pivot is negligible next to the diagonal gap.
        a[p * n + q] = C64::new(0.0, 0.0);
        a[q * n + p] = C64::new(0.0, 0.0);
        return;
    }
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // Column transform with V = D R, D = diag(1, conj(phase)) on (p, q):
    //   col_p' = c col_p - s conj(phase) col_q
    //   col_q' = s col_p + c conj(phase) col_q
    let ph_c = phase.conj();
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c - akq * ph_c * s;
        a[k * n + q] = akp * s + akq * ph_c * c;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c - aqk * phase * s;
        a[q * n + k] = apk * s + aqk * phase * c;
    }
    a[p * n + p] = C64::new(app - t * r, 0.0);
    a[q * n + q] = C64::new(aqq + t * r, 0.0);
    a[p * n + q] = C64::new(0.0, 0.0);
    a[q * n + p] = C64::new(0.0, 0.0);
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c - vkq * ph_c * s;
        v[k * n + q] = vkp * s + vkq * ph_c * c;
    }
}
