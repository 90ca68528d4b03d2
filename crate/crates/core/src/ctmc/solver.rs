use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};

use super::{EdgeKind, StateSpace};
use crate::error::{Error, Result};

/// Infinitesimal generator of the chain, row-major by state index.
pub type RateMatrix = DMatrix<f64>;

/// Residual bound `‖πQ‖∞` accepted from the solver.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub pi: Vec<f64>,
    /// `‖πQ‖∞` of the returned vector.
    pub residual: f64,
}

/// Fills `Q` from the transitions of `space`: forward edges of BSS `n` carry
/// `access_rates[n]`, backward edges of BSS `n` from state `s` carry
/// `departure(s, n)`. Diagonal entries are the negated off-diagonal row sums.
pub fn build_rate_matrix(
    space: &StateSpace,
    access_rates: &[f64],
    departure: &dyn Fn(usize, usize) -> f64,
) -> Result<RateMatrix> {
    let n = space.len();
    if access_rates.len() < space.n_bss {
        return Err(Error::InvalidInput(format!(
            "{} access rates supplied for {} BSSs",
            access_rates.len(),
            space.n_bss
        )));
    }
    let mut q = DMatrix::zeros(n, n);
    let mut seen = HashSet::new();
    for t in &space.transitions {
        if !seen.insert(*t) {
            return Err(Error::MalformedChain(format!("duplicate {:?} edge {} -> {}", t.kind, t.from, t.to)));
        }
        if t.from == t.to {
            continue;
        }
        let rate = match t.kind {
            EdgeKind::Forward(b) => access_rates[b],
            EdgeKind::Backward(b) => departure(t.from, b),
        };
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidInput(format!("rate {rate} on edge {} -> {}", t.from, t.to)));
        }
        q[(t.from, t.to)] += rate;
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| q[(i, j)]).sum();
        q[(i, i)] = -off;
    }
    Ok(q)
}

/// `‖πQ‖∞`.
pub fn residual(q: &RateMatrix, pi: &[f64]) -> f64 {
    let p = DVector::from_column_slice(pi);
    (q.transpose() * p).amax()
}

/// Solves `πQ = 0, Σπ = 1` by replacing the last balance equation with the
/// normalization row and factoring with partially pivoted LU. The generator is
/// scaled by its largest rate first; `π` is invariant under that scaling.
/// Round-off negatives are clamped to zero before renormalizing.
pub fn steady_state(q: &RateMatrix) -> Result<SteadyState> {
    let n = q.nrows();
    if n == 0 || q.ncols() != n {
        return Err(Error::InvalidInput(format!("generator must be square and non-empty, got {}x{}", n, q.ncols())));
    }
    if n == 1 {
        return Ok(SteadyState { pi: vec![1.0], residual: 0.0 });
    }
    let scale = q.amax();
    if !(scale.is_finite() && scale > 0.0) {
        // No transitions at all: only a single absorbing state is meaningful.
        return Err(Error::Singular("generator has no transitions".into()));
    }

    let mut a = q.transpose() / scale;
    a.row_mut(n - 1).fill(1.0);
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;

    let lu = a.clone().lu();
    let mut x = lu.solve(&b).ok_or_else(|| Error::Singular("LU factorization failed".into()))?;
    // One step of iterative refinement.
    let r = &b - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("non-finite solution".into()));
    }

    let floor = -1e-9;
    if let Some(bad) = x.iter().find(|&&v| v < floor) {
        return Err(Error::Singular(format!("solution has a negative probability {bad}")));
    }
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    let total = x.sum();
    let pi: Vec<f64> = x.iter().map(|v| v / total).collect();
    let residual = residual(q, &pi);
    Ok(SteadyState { pi, residual })
}
