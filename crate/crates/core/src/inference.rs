//! Normal quantiles and prediction intervals for subgraph counts, densities
//! and the clustering coefficient.

use std::fmt;

use nalgebra::DMatrix;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::asymptotics::{clustering_asymptotics, inclusion_probability, sigma2};
use crate::error::{Error, Result};
use crate::pattern::Pattern;
use crate::sampling::Scheme;

fn standard_normal() -> Normal {
    Normal::standard()
}

/// Inverse standard-normal CDF, refined by one Newton step.
pub fn normal_quantile(q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::OutOfDomain(q));
    }
    let n = standard_normal();
    let z = n.inverse_cdf(q);
    let pdf = n.pdf(z);
    if pdf > 0.0 {
        Ok(z - (n.cdf(z) - q) / pdf)
    } else {
        Ok(z)
    }
}

/// Standard-normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    standard_normal().cdf(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntervalTarget {
    Count,
    Density,
    Clustering,
}

impl fmt::Display for IntervalTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IntervalTarget::Count => "count",
            IntervalTarget::Density => "density",
            IntervalTarget::Clustering => "clustering",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PredictionInterval {
    pub target: IntervalTarget,
    pub scheme: Scheme,
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    /// Bias correction b applied to the centre (clustering under ego only).
    pub bias: f64,
    /// σ for counts/densities, τ for clustering.
    pub sigma_or_tau: f64,
    /// Whether the interval lies inside the feasible range of the target.
    pub feasible: bool,
}

impl PredictionInterval {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn covers(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    /// Count interval divided by N^R.
    pub fn to_density(&self, n: usize, r: usize) -> PredictionInterval {
        let s = (n as f64).powi(r as i32);
        PredictionInterval {
            target: IntervalTarget::Density,
            point: self.point / s,
            lower: self.lower / s,
            upper: self.upper / s,
            feasible: self.lower >= 0.0 && self.upper <= s,
            ..self.clone()
        }
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidLevel(level))
    }
}

/// `(z_{η/2}, z_{1−η/2})` for level 1 − η.
fn z_pair(level: f64) -> Result<(f64, f64)> {
    check_level(level)?;
    let eta = 1.0 - level;
    Ok((normal_quantile(eta / 2.0)?, normal_quantile(1.0 - eta / 2.0)?))
}

/// Interval for S_N(H): `[Ŝ/f − z_{1−η/2} σ N^{R−1/2}, Ŝ/f − z_{η/2} σ N^{R−1/2}]`,
/// with `f` the inclusion probability of the scheme.
pub fn pi_subgraph_with(
    shat: f64,
    f: f64,
    sigma: f64,
    r: usize,
    n: usize,
    scheme: Scheme,
    level: f64,
) -> Result<PredictionInterval> {
    if !(sigma > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let (zl, zu) = z_pair(level)?;
    let point = shat / f;
    let scale = sigma * (n as f64).powf(r as f64 - 0.5);
    let lower = point - zu * scale;
    let upper = point - zl * scale;
    Ok(PredictionInterval {
        target: IntervalTarget::Count,
        scheme,
        point,
        lower,
        upper,
        level,
        bias: 0.0,
        sigma_or_tau: sigma,
        feasible: lower >= 0.0 && upper <= (n as f64).powi(r as i32),
    })
}

/// Level-`level` interval for S_N(H) from an estimated count and plug-in (Π, λ).
#[allow(clippy::too_many_arguments)]
pub fn pi_subgraph(
    shat: f64,
    h: &Pattern,
    scheme: Scheme,
    pi: &DMatrix<f64>,
    lambda: &[f64],
    p: f64,
    n: usize,
    level: f64,
) -> Result<PredictionInterval> {
    let f = inclusion_probability(h, scheme, p)?;
    let s2 = sigma2(h, scheme, pi, lambda, p)?.sigma2;
    pi_subgraph_with(shat, f, s2.sqrt(), h.r(), n, scheme, level)
}

/// `[Γ̂ − z_{1−η/2} τ/√N − b, Γ̂ − z_{η/2} τ/√N − b]`.
pub fn pi_clustering_with(
    gamma_hat: f64,
    tau: f64,
    bias: f64,
    n: usize,
    scheme: Scheme,
    level: f64,
) -> Result<PredictionInterval> {
    if !(tau > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let (zl, zu) = z_pair(level)?;
    let half = tau / (n as f64).sqrt();
    let lower = gamma_hat - zu * half - bias;
    let upper = gamma_hat - zl * half - bias;
    Ok(PredictionInterval {
        target: IntervalTarget::Clustering,
        scheme,
        point: gamma_hat,
        lower,
        upper,
        level,
        bias,
        sigma_or_tau: tau,
        feasible: lower >= 0.0 && upper <= 1.0,
    })
}

/// Interval for Γ_N from Γ̂ and plug-in (Π, λ); bias is zero for induced sampling.
pub fn pi_clustering(
    gamma_hat: f64,
    scheme: Scheme,
    pi: &DMatrix<f64>,
    lambda: &[f64],
    p: f64,
    n: usize,
    level: f64,
) -> Result<PredictionInterval> {
    let ca = clustering_asymptotics(pi, lambda, p, scheme)?;
    pi_clustering_with(gamma_hat, ca.tau2.sqrt(), ca.bias, n, scheme, level)
}
