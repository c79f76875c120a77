//! Dense phase-1 simplex for `A x = b, x ≥ 0` feasibility.
//!
//! Intended for small fixed-size problems. Entering and leaving variables
//! follow Bland's rule, so the method terminates on degenerate problems.

use alloc::vec;
use alloc::vec::Vec;

/// Smallest admissible pivot magnitude.
pub const PIVOT_TOL: f64 = 1e-11;
/// Phase-1 objective at or below this is declared feasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseOneOutcome {
    pub feasible: bool,
    /// Basic solution at termination (length = number of columns of `A`).
    pub x: Vec<f64>,
    /// Final phase-1 objective: the L1 norm of the remaining constraint residual.
    pub infeasibility: f64,
    pub pivots: usize,
}

/// Indices of a maximal linearly independent subset of the rows of `a`,
/// chosen greedily in order by Gaussian elimination with partial pivoting.
pub fn independent_rows(a: &[Vec<f64>], tol: f64) -> Vec<usize> {
    let Some(cols) = a.first().map(Vec::len) else {
        return Vec::new();
    };
    // basis rows kept in reduced form; a new row is independent when it
    // survives elimination against all of them
    let mut basis: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut keep = Vec::new();
    for (i, row) in a.iter().enumerate() {
        let mut r = row.clone();
        for (pc, b) in &basis {
            let f = r[*pc];
            if f != 0.0 {
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= f * y;
                }
            }
        }
        let (pc, pv) = r
            .iter()
            .enumerate()
            .map(|(j, v)| (j, v.abs()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if pv > tol {
            let inv = 1.0 / r[pc];
            for x in r.iter_mut() {
                *x *= inv;
            }
            // keep earlier basis rows reduced in the new pivot column
            for (_, b) in basis.iter_mut() {
                let f = b[pc];
                if f != 0.0 {
                    for (x, y) in b.iter_mut().zip(&r) {
                        *x -= f * y;
                    }
                }
            }
            debug_assert_eq!(r.len(), cols);
            basis.push((pc, r));
            keep.push(i);
        }
    }
    keep
}

/// Minimizes the sum of artificial variables for `A x + s = b` (rows with
/// negative `b` are negated first). Feasible iff the optimum is at most
/// `feasibility_tol`.
pub fn phase_one(a: &[Vec<f64>], b: &[f64], feasibility_tol: f64) -> PhaseOneOutcome {
    let m = a.len();
    assert_eq!(m, b.len(), "phase_one: row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    let width = n + m + 1; // structural | artificial | rhs
    let mut t = vec![0.0f64; (m + 1) * width];
    for i in 0..m {
        assert_eq!(a[i].len(), n, "phase_one: ragged matrix");
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i * width + j] = sign * a[i][j];
        }
        t[i * width + n + i] = 1.0;
        t[i * width + n + m] = sign * b[i];
    }
    // objective row holds reduced costs; rhs cell holds −(objective value)
    let obj = m * width;
    for i in 0..m {
        for j in 0..n {
            t[obj + j] -= t[i * width + j];
        }
        t[obj + n + m] -= t[i * width + n + m];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut pivots = 0usize;
    let max_pivots = 50 * (n + m).max(1);

    while pivots < max_pivots {
        let Some(enter) = (0..n + m).find(|&j| t[obj + j] < -PIVOT_TOL) else {
            break;
        };
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            let col = t[i * width + enter];
            if col > PIVOT_TOL {
                let ratio = t[i * width + n + m] / col;
                let better = match leave {
                    None => true,
                    Some(l) => {
                        ratio < best - 1e-12 || (ratio <= best + 1e-12 && basis[i] < basis[l])
                    }
                };
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        // phase 1 is bounded below by zero, so an improving column always has a pivot row
        let Some(r) = leave else { break };
        let pv = t[r * width + enter];
        for j in 0..width {
            t[r * width + j] /= pv;
        }
        for i in 0..=m {
            if i == r {
                continue;
            }
            let f = t[i * width + enter];
            if f != 0.0 {
                for j in 0..width {
                    t[i * width + j] -= f * t[r * width + j];
                }
            }
        }
        basis[r] = enter;
        pivots += 1;
    }

    let mut x = vec![0.0; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i * width + n + m].max(0.0);
        }
    }
    let infeasibility = (-t[obj + n + m]).max(0.0);
    PhaseOneOutcome { feasible: infeasibility <= feasibility_tol, x, infeasibility, pivots }
}
