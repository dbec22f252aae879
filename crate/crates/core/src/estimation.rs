//! Plug-in SBM parameters from a sample under the four estimation scenarios.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{and_count, and3_count, BitSet, PopulationGraph};
use crate::rng;
use crate::sampling::{SampleView, Scheme};

/// Where the plug-in (Π, λ) comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    /// True Π and class proportions.
    C1,
    /// True labels, naive Π̂ from observed pairs.
    C2,
    /// Spectral labels on the selected nodes with known K, naive Π̂.
    C3,
    /// Estimated K, then as C3.
    C4,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::C1, Scenario::C2, Scenario::C3, Scenario::C4];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::C1 => "c1",
            Scenario::C2 => "c2",
            Scenario::C3 => "c3",
            Scenario::C4 => "c4",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c1" => Ok(Scenario::C1),
            "c2" => Ok(Scenario::C2),
            "c3" => Ok(Scenario::C3),
            "c4" => Ok(Scenario::C4),
            _ => Err(Error::Config(format!("unknown scenario `{s}` (expected c1..c4)"))),
        }
    }
}

/// Naive Π̂ with per-cell pair counts.
#[derive(Clone, Debug, PartialEq)]
pub struct PiEstimate {
    /// Cellwise ratio; NaN where no pair was observed.
    pub pi: DMatrix<f64>,
    /// Observed ordered pairs with an edge, per class cell.
    pub edges: DMatrix<f64>,
    /// Observed ordered pairs, per class cell.
    pub pairs: DMatrix<f64>,
    /// Cells `(k, l)`, `k <= l`, with no observed pair.
    pub missing: Vec<(usize, usize)>,
}

impl PiEstimate {
    /// The estimate, or `EmptyCell` for the first missing cell.
    pub fn complete(&self) -> Result<&DMatrix<f64>> {
        match self.missing.first() {
            Some(&(k, l)) => Err(Error::EmptyCell(k, l)),
            None => Ok(&self.pi),
        }
    }
}

/// π̂_{k,l} = Σ_{(i,j) observed} Y_ij 1(α_i=k, α_j=l) / Σ_{(i,j) observed} 1(α_i=k, α_j=l)
/// over pairs whose endpoints both carry a label.
pub fn naive_mle_pi(view: &SampleView<'_>, labels: &[Option<usize>], k: usize) -> Result<PiEstimate> {
    let g = view.population;
    let n = g.n();
    if labels.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {n} vertices",
            labels.len()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidK(0));
    }
    let mut class_sets = vec![BitSet::new(n); k];
    for (i, l) in labels.iter().enumerate() {
        if let Some(l) = *l {
            if l >= k {
                return Err(Error::IndexOutOfRange(format!("label {l} with K = {k}")));
            }
            class_sets[l].insert(i);
        }
    }
    let sel = view.mask.bits();
    let class_sizes: Vec<u64> = class_sets.iter().map(|s| s.count() as u64).collect();
    let class_sel: Vec<u64> = class_sets.iter().map(|s| and_count(s.words(), sel.words())).collect();
    let rows: Vec<(usize, Vec<u64>, Vec<u64>)> = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let ki = labels[i]?;
            let wi = sel.contains(i);
            let row = g.row(i);
            let mut e = vec![0u64; k];
            let mut c = vec![0u64; k];
            for l in 0..k {
                let own = (l == ki) as u64;
                match (view.scheme, wi) {
                    (Scheme::Induced, false) => {}
                    (Scheme::Induced, true) | (Scheme::Ego, false) => {
                        c[l] = class_sel[l] - if wi { own } else { 0 };
                        e[l] = and3_count(row, class_sets[l].words(), sel.words());
                    }
                    (Scheme::Ego, true) => {
                        c[l] = class_sizes[l] - own;
                        e[l] = and_count(row, class_sets[l].words());
                    }
                }
            }
            Some((ki, e, c))
        })
        .collect();
    let mut edges = DMatrix::zeros(k, k);
    let mut pairs = DMatrix::zeros(k, k);
    for (ki, e, c) in rows {
        for l in 0..k {
            edges[(ki, l)] += e[l] as f64;
            pairs[(ki, l)] += c[l] as f64;
        }
    }
    let mut pi = DMatrix::from_element(k, k, f64::NAN);
    let mut missing = Vec::new();
    for a in 0..k {
        for b in a..k {
            let num = edges[(a, b)] + edges[(b, a)];
            let den = pairs[(a, b)] + pairs[(b, a)];
            if den > 0.0 {
                pi[(a, b)] = num / den;
                pi[(b, a)] = num / den;
            } else {
                missing.push((a, b));
            }
        }
    }
    Ok(PiEstimate {
        pi,
        edges,
        pairs,
        missing,
    })
}

/// Selected vertices in increasing order and their induced adjacency matrix.
fn selected_adjacency(view: &SampleView<'_>) -> (Vec<usize>, DMatrix<f64>) {
    let g = view.population;
    let idx: Vec<usize> = view.mask.bits().iter().collect();
    let n = idx.len();
    let a = DMatrix::from_fn(n, n, |r, c| if g.has_edge(idx[r], idx[c]) { 1.0 } else { 0.0 });
    (idx, a)
}

/// Eigenpairs ordered by descending eigenvalue; each eigenvector's first
/// nonzero coordinate is made positive.
pub fn sorted_eigen(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(i).clone_owned();
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v = -v;
            }
        }
        vectors.set_column(col, &v);
    }
    (values, vectors)
}

/// SCORE community labels for the selected vertices.
///
/// Takes the K leading eigenvectors of the selected-node adjacency, forms
/// the coordinate-wise ratios of eigenvectors 2..K to the leading one
/// (clipped to ±ln n; where the leading coordinate vanishes the ratio takes
/// its clipped limit, or zero when both coordinates vanish) and runs
/// k-means with K centres. Unselected vertices get `None`; labels are
/// numbered in order of first appearance.
pub fn spectral_labels(view: &SampleView<'_>, k: usize, seed: u64) -> Result<Vec<Option<usize>>> {
    if k < 2 {
        return Err(Error::InvalidK(k));
    }
    let (idx, a) = selected_adjacency(view);
    let n = idx.len();
    if n < k + 1 {
        return Err(Error::TooFewSelectedNodes { needed: k + 1, got: n });
    }
    let (_, vecs) = sorted_eigen(a);
    let bound = (n as f64).ln();
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let lead = vecs[(i, 0)];
            (1..k)
                .map(|j| {
                    let x = vecs[(i, j)];
                    if lead.abs() >= 1e-12 {
                        (x / lead).clamp(-bound, bound)
                    } else if x.abs() >= 1e-12 {
                        bound.copysign(x)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    let assign = kmeans(&points, k, seed, 10);
    let mut out = vec![None; view.population.n()];
    for (pos, &v) in idx.iter().enumerate() {
        out[v] = Some(assign[pos]);
    }
    Ok(out)
}

/// Lloyd's k-means with k-means++ seeding; returns the assignment of the
/// restart with the smallest inertia, relabelled by first appearance.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, restarts: usize) -> Vec<usize> {
    let n = points.len();
    let dim = points.first().map_or(0, |p| p.len());
    let dist2 = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let key = rng::domain_key(seed, rng::DOMAIN_KMEANS);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for restart in 0..restarts.clamp(1, 100) {
        let mut r = rng::stream(key, restart as u64);
        let mut centres: Vec<Vec<f64>> = vec![points[rng::below(&mut r, n)].clone()];
        let mut d: Vec<f64> = points.iter().map(|p| dist2(p, &centres[0])).collect();
        while centres.len() < k {
            let total: f64 = d.iter().sum();
            let next = if total > 0.0 {
                let target = rng::uniform(&mut r) * total;
                let mut acc = 0.0;
                let mut pick = n - 1;
                for (i, &di) in d.iter().enumerate() {
                    acc += di;
                    if acc > target {
                        pick = i;
                        break;
                    }
                }
                pick
            } else {
                rng::below(&mut r, n)
            };
            centres.push(points[next].clone());
            for (di, p) in d.iter_mut().zip(points) {
                *di = di.min(dist2(p, &centres[centres.len() - 1]));
            }
        }
        let mut assign = vec![0usize; n];
        let mut inertia = f64::INFINITY;
        for _ in 0..300 {
            let mut new_inertia = 0.0;
            for (a, p) in assign.iter_mut().zip(points) {
                let (c, dc) = centres
                    .iter()
                    .enumerate()
                    .map(|(c, ctr)| (c, dist2(p, ctr)))
                    .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
                *a = c;
                new_inertia += dc;
            }
            let mut sums = vec![vec![0.0; dim]; k];
            let mut counts = vec![0usize; k];
            for (&a, p) in assign.iter().zip(points) {
                counts[a] += 1;
                for (s, x) in sums[a].iter_mut().zip(p) {
                    *s += x;
                }
            }
            for c in 0..k {
                if counts[c] > 0 {
                    centres[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
                }
            }
            let done = (inertia - new_inertia).abs() <= 1e-9 * new_inertia.max(f64::MIN_POSITIVE);
            inertia = new_inertia;
            if done {
                break;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, assign));
        }
    }
    let assign = best.map(|b| b.1).unwrap_or_default();
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    assign
        .into_iter()
        .map(|a| {
            if map[a] == usize::MAX {
                map[a] = next;
                next += 1;
            }
            map[a]
        })
        .collect()
}

/// Number of communities among the selected vertices: the count of negative
/// eigenvalues of the Bethe Hessian (r²−1)I − rA + D with r = √(mean degree),
/// at least 1.
pub fn estimate_k(view: &SampleView<'_>) -> Result<usize> {
    let (idx, a) = selected_adjacency(view);
    let n = idx.len();
    if n == 0 {
        return Err(Error::EmptyObservation);
    }
    let deg: Vec<f64> = (0..n).map(|i| a.row(i).sum()).collect();
    let mean = deg.iter().sum::<f64>() / n as f64;
    if mean <= 1.0 {
        return Ok(1);
    }
    let r = mean.sqrt();
    let mut hmat = a * (-r);
    for i in 0..n {
        hmat[(i, i)] += r * r - 1.0 + deg[i];
    }
    let eig = SymmetricEigen::new(hmat);
    let negative = eig.eigenvalues.iter().filter(|&&v| v < -1e-10).count();
    Ok(negative.max(1))
}

/// Alternative K selection: the position of the largest gap between
/// consecutive eigenvalues of D^{-1/2} A D^{-1/2} among the leading ⌈√n⌉.
pub fn estimate_k_eigengap(view: &SampleView<'_>) -> Result<usize> {
    let (idx, a) = selected_adjacency(view);
    let n = idx.len();
    if n == 0 {
        return Err(Error::EmptyObservation);
    }
    if n == 1 {
        return Ok(1);
    }
    let scale: Vec<f64> = (0..n)
        .map(|i| {
            let d = a.row(i).sum();
            if d > 0.0 {
                1.0 / d.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let norm = DMatrix::from_fn(n, n, |r, c| a[(r, c)] * scale[r] * scale[c]);
    let (values, _) = sorted_eigen(norm);
    let m = ((n as f64).sqrt().ceil() as usize).clamp(2, n);
    let mut best = (1, f64::NEG_INFINITY);
    for i in 0..m - 1 {
        let gap = values[i] - values[i + 1];
        if gap > best.1 {
            best = (i + 1, gap);
        }
    }
    Ok(best.0)
}

/// Class frequencies among labelled vertices.
pub fn lambda_hat(labels: &[Option<usize>], k: usize) -> Result<Vec<f64>> {
    let mut counts = vec![0usize; k];
    let mut total = 0usize;
    for &l in labels.iter().flatten() {
        if l >= k {
            return Err(Error::IndexOutOfRange(format!("label {l} with K = {k}")));
        }
        counts[l] += 1;
        total += 1;
    }
    if total == 0 {
        return Err(Error::NoLabels);
    }
    Ok(counts.into_iter().map(|c| c as f64 / total as f64).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatedParams {
    pub scenario: Scenario,
    pub k_hat: usize,
    pub labels_hat: Vec<Option<usize>>,
    pub pi_hat: DMatrix<f64>,
    pub lambda_hat: Vec<f64>,
    pub missing: Vec<(usize, usize)>,
}

impl EstimatedParams {
    /// Π̂, or `EmptyCell` if some cell had no observed pair.
    pub fn pi_complete(&self) -> Result<&DMatrix<f64>> {
        match self.missing.first() {
            Some(&(k, l)) => Err(Error::EmptyCell(k, l)),
            None => Ok(&self.pi_hat),
        }
    }
}

/// Plug-in parameters under `scenario`. `truth_pi` and the population's
/// labels supply the C1/C2 inputs and the known K for C3.
pub fn estimate(
    view: &SampleView<'_>,
    scenario: Scenario,
    truth_pi: &DMatrix<f64>,
    seed: u64,
) -> Result<EstimatedParams> {
    let g: &PopulationGraph = view.population;
    let k_true = truth_pi.nrows();
    let true_labels: Vec<Option<usize>> = g.labels().iter().map(|&l| Some(l)).collect();
    match scenario {
        Scenario::C1 => Ok(EstimatedParams {
            scenario,
            k_hat: k_true,
            labels_hat: true_labels,
            pi_hat: truth_pi.clone(),
            lambda_hat: g.class_proportions(),
            missing: Vec::new(),
        }),
        Scenario::C2 => {
            let est = naive_mle_pi(view, &true_labels, k_true)?;
            Ok(EstimatedParams {
                scenario,
                k_hat: k_true,
                labels_hat: true_labels,
                pi_hat: est.pi,
                lambda_hat: g.class_proportions(),
                missing: est.missing,
            })
        }
        Scenario::C3 | Scenario::C4 => {
            let k = if scenario == Scenario::C3 {
                k_true
            } else {
                estimate_k(view)?
            };
            let labels = if k == 1 {
                let mut l = vec![None; g.n()];
                for i in view.mask.bits().iter() {
                    l[i] = Some(0);
                }
                l
            } else {
                spectral_labels(view, k, seed)?
            };
            let k_used = labels.iter().flatten().max().map_or(1, |m| m + 1);
            let est = naive_mle_pi(view, &labels, k_used)?;
            let lam = lambda_hat(&labels, k_used)?;
            Ok(EstimatedParams {
                scenario,
                k_hat: k_used,
                labels_hat: labels,
                pi_hat: est.pi,
                lambda_hat: lam,
                missing: est.missing,
            })
        }
    }
}
