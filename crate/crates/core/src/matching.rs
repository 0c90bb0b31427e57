//! Exact min-cost bipartite assignment (dense O(n³) shortest augmenting
//! path with potentials) and the monotone 1D matching cost.

use crate::{Error, Real, Result};

/// Practical size cap for the dense exact solver; beyond this the cubic
/// cost is no longer desk-scale.
pub const MAX_ASSIGNMENT_N: usize = 2500;

/// Dense n×n cost matrix, entry (i, j) = cost of assigning row i to
/// column j. Entries must be finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<R: Real> {
    n: usize,
    entries: Vec<R>,
}

impl<R: Real> CostMatrix<R> {
    pub fn new(n: usize, entries: Vec<R>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("cost matrix needs n >= 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::Invalid(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        for (k, &e) in entries.iter().enumerate() {
            if !e.is_finite() || e < R::zero() {
                return Err(Error::Invalid(format!(
                    "entry ({}, {}) = {e} is not a finite non-negative cost",
                    k / n,
                    k % n
                )));
            }
        }
        Ok(CostMatrix { n, entries })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> R) -> Result<Self> {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self::new(n, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> R {
        self.entries[i * self.n + j]
    }
}

/// Exactly optimal assignment: returns (perm, total) where row i is matched
/// to column perm[i] and total is the recomputed Σ cost(i, perm[i]).
pub fn hungarian<R: Real>(c: &CostMatrix<R>) -> Result<(Vec<usize>, R)> {
    let n = c.n();
    if n > MAX_ASSIGNMENT_N {
        return Err(Error::Invalid(format!(
            "assignment size {n} exceeds the exact-solver cap {MAX_ASSIGNMENT_N}"
        )));
    }
    let inf = R::infinity();
    // 1-based arrays; p[j] = row currently matched to column j, column 0 is
    // the virtual staging column
    let mut u = vec![R::zero(); n + 1];
    let mut v = vec![R::zero(); n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = c.at(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }
    let total = (0..n).map(|i| c.at(i, perm[i])).sum();
    Ok((perm, total))
}

/// Σ |x_i - y_i|^a for two sorted lists under the identity (monotone)
/// matching, the optimal one for convex per-pair costs (a ≥ 1).
pub fn sorted_matching_cost_1d<R: Real>(xs: &[R], ys: &[R], a: R) -> Result<R> {
    if xs.len() != ys.len() {
        return Err(Error::Invalid(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if !(a > R::zero()) {
        return Err(Error::Invalid(format!("exponent must be > 0, got {a}")));
    }
    for w in xs.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Invalid("first list is not sorted".into()));
        }
    }
    for w in ys.windows(2) {
        if w[1] < w[0] {
            return Err(Error::Invalid("second list is not sorted".into()));
        }
    }
    Ok(xs
        .iter()
        .zip(ys.iter())
        .map(|(&x, &y)| (x - y).abs().powf(a))
        .sum())
}
