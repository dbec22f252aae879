//! Dense and sparse stochastic block models.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{BitMatrix, PopulationGraph};
use crate::rng;

const SUM_TOL: f64 = 1e-9;

/// How vertices receive class labels.
#[derive(Clone, Debug, PartialEq)]
pub enum Membership {
    /// Class proportions λ; labels are materialized block-contiguously.
    Proportions(Vec<f64>),
    /// Explicit 0-based labels, one per vertex.
    Labels(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SbmModel {
    pi: DMatrix<f64>,
    membership: Membership,
}

impl SbmModel {
    pub fn with_proportions(pi: DMatrix<f64>, lambda: Vec<f64>) -> Result<Self> {
        check_pi(&pi)?;
        check_lambda(&lambda, pi.nrows())?;
        Ok(SbmModel {
            pi,
            membership: Membership::Proportions(lambda),
        })
    }

    pub fn with_labels(pi: DMatrix<f64>, labels: Vec<usize>) -> Result<Self> {
        check_pi(&pi)?;
        let k = pi.nrows();
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::IndexOutOfRange(format!("label {bad} with K = {k}")));
        }
        Ok(SbmModel {
            pi,
            membership: Membership::Labels(labels),
        })
    }

    /// The simulation model used throughout the experiments: K = 4 equal classes.
    pub fn simulation_default() -> Self {
        Self::with_proportions(simulation_pi(), vec![0.25; 4]).expect("valid built-in model")
    }

    pub fn k(&self) -> usize {
        self.pi.nrows()
    }

    pub fn pi(&self) -> &DMatrix<f64> {
        &self.pi
    }

    pub fn membership(&self) -> &Membership {
        &self.membership
    }

    /// Whether some diagonal entry of Π is positive.
    pub fn has_positive_diagonal(&self) -> bool {
        (0..self.k()).any(|i| self.pi[(i, i)] > 0.0)
    }

    /// Labels for a population of size `n`.
    pub fn labels_for(&self, n: usize) -> Result<Vec<usize>> {
        match &self.membership {
            Membership::Proportions(l) => Ok(materialize_labels(l, n)),
            Membership::Labels(l) if l.len() == n => Ok(l.clone()),
            Membership::Labels(l) => Err(Error::DimensionMismatch(format!(
                "model has {} labels but N = {n}",
                l.len()
            ))),
        }
    }
}

/// Π used in the simulation study.
pub fn simulation_pi() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.26, 0.09, 0.05, 0.04, //
            0.09, 0.30, 0.01, 0.03, //
            0.05, 0.01, 0.27, 0.00, //
            0.04, 0.03, 0.00, 0.17,
        ],
    )
}

/// C used in the sparse simulation study.
pub fn sparse_simulation_c() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 0.25, 0.0, //
            0.0, 2.0, 0.0, 0.3, //
            0.25, 0.0, 2.0, 0.0, //
            0.0, 0.3, 0.0, 1.0,
        ],
    )
}

/// Sparse SBM: Π_N = N^{-β} C.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSbmSpec {
    c: DMatrix<f64>,
    beta: f64,
    lambda: Vec<f64>,
}

impl SparseSbmSpec {
    pub fn new(c: DMatrix<f64>, beta: f64, lambda: Vec<f64>) -> Result<Self> {
        let k = c.nrows();
        if c.ncols() != k || k == 0 {
            return Err(Error::DimensionMismatch("C must be square and nonempty".into()));
        }
        for i in 0..k {
            for j in 0..k {
                let v = c[(i, j)];
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidModel(format!("C[{i},{j}] = {v} is not a finite nonnegative value")));
                }
                if (v - c[(j, i)]).abs() > 0.0 {
                    return Err(Error::InvalidModel("C is not symmetric".into()));
                }
            }
        }
        if !(0..k).any(|i| c[(i, i)] > 0.0) {
            return Err(Error::InvalidModel("C needs a positive diagonal entry".into()));
        }
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::InvalidModel(format!("beta = {beta} outside [0,1)")));
        }
        check_lambda(&lambda, k)?;
        Ok(SparseSbmSpec { c, beta, lambda })
    }

    pub fn c(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }
}

/// Π = N^{-β} C with the spec's proportions.
pub fn materialize_sparse(spec: &SparseSbmSpec, n: usize) -> Result<SbmModel> {
    let scale = (n as f64).powf(-spec.beta);
    let pi = spec.c.map(|v| v * scale);
    if let Some(&over) = pi.iter().find(|&&v| v > 1.0) {
        return Err(Error::ProbabilityOverflow(over));
    }
    SbmModel::with_proportions(pi, spec.lambda.clone())
}

/// Block-contiguous labels with class sizes given by largest-remainder
/// apportionment of `n·λ_k` (ties go to the lower class index).
pub fn materialize_labels(lambda: &[f64], n: usize) -> Vec<usize> {
    let counts = apportion(lambda, n);
    counts
        .iter()
        .enumerate()
        .flat_map(|(k, &c)| std::iter::repeat_n(k, c))
        .collect()
}

/// Largest-remainder class sizes summing to `n`.
pub fn apportion(lambda: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = lambda.iter().sum();
    let quotas: Vec<f64> = lambda.iter().map(|l| l / total * n as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..lambda.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in order.iter().cycle().take(n.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    counts
}

/// Draws a population graph. Row `i` uses ChaCha stream `i` of the
/// population key, consuming one uniform per pair `(i, j)`, `j > i`, in
/// increasing `j`; the edge is present when the uniform is below π.
pub fn generate(model: &SbmModel, n: usize, seed: u64) -> Result<PopulationGraph> {
    if n < 2 {
        return Err(Error::InvalidSize(format!("population needs N >= 2, got {n}")));
    }
    let labels = model.labels_for(n)?;
    let key = rng::domain_key(seed, rng::DOMAIN_POPULATION);
    let pi = model.pi();
    let mut adj = BitMatrix::new(n);
    adj.rows_mut()
        .collect::<Vec<_>>()
        .into_par_iter()
        .enumerate()
        .for_each(|(i, row)| {
            let mut r = rng::stream(key, i as u64);
            let li = labels[i];
            for j in i + 1..n {
                if rng::uniform(&mut r) < pi[(li, labels[j])] {
                    row[j >> 6] |= 1 << (j & 63);
                }
            }
        });
    adj.mirror_upper();
    Ok(PopulationGraph::from_parts(adj, labels, model.k()))
}

fn check_pi(pi: &DMatrix<f64>) -> Result<()> {
    let k = pi.nrows();
    if k == 0 || pi.ncols() != k {
        return Err(Error::DimensionMismatch("Π must be square and nonempty".into()));
    }
    for i in 0..k {
        for j in 0..k {
            let v = pi[(i, j)];
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidModel(format!("Π[{i},{j}] = {v} outside [0,1]")));
            }
            if v != pi[(j, i)] {
                return Err(Error::InvalidModel("Π is not symmetric".into()));
            }
        }
    }
    Ok(())
}

fn check_lambda(lambda: &[f64], k: usize) -> Result<()> {
    if lambda.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "λ has {} entries but K = {k}",
            lambda.len()
        )));
    }
    if lambda.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
        return Err(Error::InvalidModel("class proportions must lie in (0,1]".into()));
    }
    let s: f64 = lambda.iter().sum();
    if (s - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidModel(format!("class proportions sum to {s}")));
    }
    Ok(())
}
