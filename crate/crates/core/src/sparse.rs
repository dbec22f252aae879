//! Sparse-regime thresholds: f₁(t,H), c(H) and the sparse limiting variance.

use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::asymptotics::{sigma2_induced, VarianceReport};
use crate::error::{Error, Result};
use crate::pattern::Pattern;

/// Largest pattern accepted by [`f1_intersection_oracle`].
pub const ORACLE_MAX_VERTICES: usize = 6;

/// f₁(t,H): the largest edge count of a subgraph of H induced by `t` vertices.
pub fn f1(h: &Pattern, t: usize) -> Result<usize> {
    let r = h.r();
    if t < 2 || t > r {
        return Err(Error::IndexOutOfRange(format!("t = {t} outside 2..={r}")));
    }
    Ok(subsets(r, t).map(|m| h.induced_edge_count(m)).max().unwrap_or(0))
}

/// The lexicographically first maximizing vertex subset m*(t,H), as 0-based vertices.
pub fn maximizing_subset(h: &Pattern, t: usize) -> Result<Vec<usize>> {
    let best = f1(h, t)?;
    let mut all: Vec<Vec<usize>> = subsets(h.r(), t)
        .filter(|&m| h.induced_edge_count(m) == best)
        .map(|m| (0..h.r()).filter(|&v| m & (1 << v) != 0).collect())
        .collect();
    all.sort();
    Ok(all.swap_remove(0))
}

fn subsets(r: usize, t: usize) -> impl Iterator<Item = u32> {
    (0u32..(1 << r)).filter(move |m| m.count_ones() as usize == t)
}

/// c(H) = min_{2≤t≤R} (t−1)/f₁(t,H).
pub fn c_of_h(h: &Pattern) -> f64 {
    (2..=h.r())
        .map(|t| (t - 1) as f64 / f1(h, t).expect("t within range") as f64)
        .fold(f64::INFINITY, f64::min)
}

/// f₁ table, c(H) and the admissible interval (0, c(H)) for β.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseProfile {
    pub r: usize,
    pub t: usize,
    /// `(t, f1(t,H))` for t = 2..=R.
    pub f1: Vec<(usize, usize)>,
    pub c: f64,
}

impl SparseProfile {
    /// Exponent e in the pivot scaling N^{e}: −R + 1/2 + Tβ.
    pub fn scaling_exponent(&self, beta: f64) -> f64 {
        -(self.r as f64) + 0.5 + self.t as f64 * beta
    }

    pub fn admits(&self, beta: f64) -> bool {
        beta > 0.0 && beta < self.c
    }
}

pub fn sparse_profile(h: &Pattern) -> SparseProfile {
    SparseProfile {
        r: h.r(),
        t: h.t(),
        f1: (2..=h.r()).map(|t| (t, f1(h, t).expect("t within range"))).collect(),
        c: c_of_h(h),
    }
}

/// Fails with `BetaOutOfRange` unless 0 < β < c(H).
pub fn check_beta(h: &Pattern, beta: f64) -> Result<()> {
    let c = c_of_h(h);
    if beta > 0.0 && beta < c {
        Ok(())
    } else {
        Err(Error::BetaOutOfRange { beta, bound: c })
    }
}

/// τ^[1]² in the sparse regime: the induced variance with C in place of Π.
/// β only enters the pivot scaling; use [`check_beta`] to validate it.
pub fn sparse_variance(h: &Pattern, c: &DMatrix<f64>, lambda: &[f64], p: f64) -> Result<VarianceReport> {
    sigma2_induced(h, c, lambda, p)
}

/// f₁ through its intersection-graph characterization.
///
/// Two vertex tuples share exactly `t` vertices: the first occupies
/// `{0..R-1}`, the second `{0..t-1} ∪ {R..2R-t-1}`. Over all bijections φ₁, φ₂
/// from V(H) onto each tuple, return the largest number of edges common to
/// the two embedded copies of H. Only edges among the shared vertices can be
/// common, so each bijection is summarized by the bitmask of embedded edges
/// on the shared set.
pub fn f1_intersection_oracle(h: &Pattern, t: usize) -> Result<usize> {
    let r = h.r();
    if r > ORACLE_MAX_VERTICES {
        return Err(Error::PatternTooLarge(format!("oracle limited to R <= {ORACLE_MAX_VERTICES}")));
    }
    if t < 2 || t > r {
        return Err(Error::IndexOutOfRange(format!("t = {t} outside 2..={r}")));
    }
    let first: Vec<usize> = (0..r).collect();
    let second: Vec<usize> = (0..t).chain(r..2 * r - t).collect();
    let m1 = shared_edge_masks(h, &first, t);
    let m2 = shared_edge_masks(h, &second, t);
    let mut best = 0;
    for a in &m1 {
        for b in &m2 {
            best = best.max((a & b).count_ones() as usize);
        }
    }
    Ok(best)
}

/// Distinct masks over pairs of the shared vertices `{0..t-1}` of the edges
/// of H(φ) for every bijection φ: V(H) → `slots`.
fn shared_edge_masks(h: &Pattern, slots: &[usize], t: usize) -> BTreeSet<u64> {
    let r = h.r();
    let pair_bit = |x: usize, y: usize| -> Option<u64> {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        (b < t).then(|| 1u64 << (a * t + b))
    };
    let mut out = BTreeSet::new();
    let mut perm: Vec<usize> = (0..r).collect();
    loop {
        let mut mask = 0u64;
        for &(a, b) in h.edges() {
            if let Some(bit) = pair_bit(slots[perm[a]], slots[perm[b]]) {
                mask |= bit;
            }
        }
        out.insert(mask);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
