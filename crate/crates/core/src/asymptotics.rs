//! Limiting variances, ego inclusion functionals, clustering-coefficient
//! asymptotics and the joint covariance of edge/wedge/triangle densities.
//!
//! Class indices are 0-based; `lambda` holds class proportions summing to 1.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::pattern::{psi_unchecked, Pattern, MAX_PATTERN_VERTICES};
use crate::sampling::Scheme;

/// Upper bound on K·R for the η enumeration over [K]^{R-1}.
pub const MAX_K_TIMES_R: usize = 6 * MAX_PATTERN_VERTICES;

/// f(H,p) and δ_r(H,p), with the auxiliary g_{1,r}, g_{2,r}.
#[derive(Clone, Debug, PartialEq)]
pub struct EgoFunctionals {
    pub f: f64,
    pub delta: Vec<f64>,
    /// g_{1,r} = E(Z_{1,r} Z_{2,r}).
    pub g1: Vec<f64>,
    /// g_{2,r} = E(Z_{2,r}).
    pub g2: Vec<f64>,
}

/// Exact ego functionals by summing over all 2^R indicator configurations.
///
/// `f = E Π_{edges} max(W_a, W_b)`,
/// `δ_r = E[Π_{e ∉ A(r)} max(W_a, W_b) · (1 − Π_{v ∈ N(r)} W_v)]`,
/// with empty products equal to 1.
pub fn ego_functionals(h: &Pattern, p: f64) -> Result<EgoFunctionals> {
    check_p(p)?;
    let r = h.r();
    if r > MAX_PATTERN_VERTICES {
        return Err(Error::PatternTooLarge(format!("R = {r}")));
    }
    let away: Vec<Vec<usize>> = (0..r).map(|v| h.nonincident_edges(v)).collect();
    let mut f = 0.0;
    let mut g1 = vec![0.0; r];
    let mut g2 = vec![0.0; r];
    let mut delta = vec![0.0; r];
    for w in 0u32..(1 << r) {
        let k = w.count_ones() as i32;
        let weight = p.powi(k) * (1.0 - p).powi(r as i32 - k);
        let sel = |v: usize| w & (1 << v) != 0;
        let covered = |e: usize| {
            let (a, b) = h.edges()[e];
            sel(a) || sel(b)
        };
        if (0..h.t()).all(covered) {
            f += weight;
        }
        for v in 0..r {
            let z2 = away[v].iter().all(|&e| covered(e));
            let z1 = (0..r).all(|u| h.neighbor_mask(v) & (1 << u) == 0 || sel(u));
            if z2 {
                g2[v] += weight;
                if z1 {
                    g1[v] += weight;
                } else {
                    delta[v] += weight;
                }
            }
        }
    }
    Ok(EgoFunctionals { f, delta, g1, g2 })
}

/// Overall inclusion probability of a pattern copy: p^R (induced) or f(H,p) (ego).
pub fn inclusion_probability(h: &Pattern, scheme: Scheme, p: f64) -> Result<f64> {
    check_p(p)?;
    match scheme {
        Scheme::Induced => Ok(p.powi(h.r() as i32)),
        Scheme::Ego => Ok(ego_functionals(h, p)?.f),
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

fn check_model(pi: &DMatrix<f64>, lambda: &[f64]) -> Result<usize> {
    let k = pi.nrows();
    if k == 0 || pi.ncols() != k {
        return Err(Error::DimensionMismatch("Π must be square and nonempty".into()));
    }
    if lambda.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "λ has {} entries but K = {k}",
            lambda.len()
        )));
    }
    Ok(k)
}

/// η(u₁, k) for every class u₁ and position k, as a K×R table.
///
/// `η(u₁,k) = Σ_{u₂..u_R} Ψ_H(Π, v^[k](u)) λ_{u₂}⋯λ_{u_R}`; the cost is
/// K^{R-1}·R·T, and K·R is capped at [`MAX_K_TIMES_R`].
pub fn eta_table(h: &Pattern, pi: &DMatrix<f64>, lambda: &[f64]) -> Result<Vec<Vec<f64>>> {
    let k = check_model(pi, lambda)?;
    let r = h.r();
    if k * r > MAX_K_TIMES_R {
        return Err(Error::PatternTooLarge(format!(
            "K·R = {} exceeds {MAX_K_TIMES_R}",
            k * r
        )));
    }
    let mut table = vec![vec![0.0; r]; k];
    let mut u = vec![0usize; r];
    let mut v = vec![0usize; r];
    let tail = k.pow(r as u32 - 1);
    for (u1, row) in table.iter_mut().enumerate() {
        u[0] = u1;
        for idx in 0..tail {
            let mut rest = idx;
            let mut weight = 1.0;
            for slot in u.iter_mut().skip(1) {
                *slot = rest % k;
                rest /= k;
                weight *= lambda[*slot];
            }
            if weight == 0.0 {
                continue;
            }
            for (pos, acc) in row.iter_mut().enumerate() {
                v.copy_from_slice(&u);
                v.swap(0, pos);
                *acc += psi_unchecked(h, pi, &v) * weight;
            }
        }
    }
    Ok(table)
}

/// A single η(u₁, k) (0-based class and position).
pub fn eta(u1: usize, k: usize, h: &Pattern, pi: &DMatrix<f64>, lambda: &[f64]) -> Result<f64> {
    if u1 >= pi.nrows() || k >= h.r() {
        return Err(Error::IndexOutOfRange(format!("η({u1},{k})")));
    }
    Ok(eta_table(h, pi, lambda)?[u1][k])
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceReport {
    pub sigma2: f64,
    pub scheme: Scheme,
    /// Per-class summands λ_u·[…]² before the leading factor.
    pub components: Vec<f64>,
}

/// σ^[1](H,p)² = (1/p − 1) Σ_u λ_u [Σ_k η(u,k)]².
pub fn sigma2_induced(h: &Pattern, pi: &DMatrix<f64>, lambda: &[f64], p: f64) -> Result<VarianceReport> {
    check_p(p)?;
    let eta = eta_table(h, pi, lambda)?;
    let components: Vec<f64> = eta
        .iter()
        .zip(lambda)
        .map(|(row, &l)| l * row.iter().sum::<f64>().powi(2))
        .collect();
    Ok(VarianceReport {
        sigma2: (1.0 / p - 1.0) * components.iter().sum::<f64>(),
        scheme: Scheme::Induced,
        components,
    })
}

/// σ^[2](H,p)² = p(1−p)/f(H,p)² Σ_u λ_u [Σ_k δ_k(H,p) η(u,k)]².
pub fn sigma2_ego(h: &Pattern, pi: &DMatrix<f64>, lambda: &[f64], p: f64) -> Result<VarianceReport> {
    let ego = ego_functionals(h, p)?;
    let eta = eta_table(h, pi, lambda)?;
    let components: Vec<f64> = eta
        .iter()
        .zip(lambda)
        .map(|(row, &l)| {
            let s: f64 = row.iter().zip(&ego.delta).map(|(e, d)| e * d).sum();
            l * s * s
        })
        .collect();
    Ok(VarianceReport {
        sigma2: p * (1.0 - p) / (ego.f * ego.f) * components.iter().sum::<f64>(),
        scheme: Scheme::Ego,
        components,
    })
}

pub fn sigma2(h: &Pattern, scheme: Scheme, pi: &DMatrix<f64>, lambda: &[f64], p: f64) -> Result<VarianceReport> {
    match scheme {
        Scheme::Induced => sigma2_induced(h, pi, lambda, p),
        Scheme::Ego => sigma2_ego(h, pi, lambda, p),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaSet {
    /// Σ π_uv π_vw λ_u λ_v λ_w.
    pub theta1: f64,
    /// Σ π_uv π_vw π_wu λ_u λ_v λ_w.
    pub theta2: f64,
    /// θ₃(u) = Σ_{v,w} π_uv π_vw π_wu λ_v λ_w.
    pub theta3: Vec<f64>,
    /// θ₄(u) = Σ_{v,w} π_uv π_vw λ_v λ_w.
    pub theta4: Vec<f64>,
    /// θ₅(u) = Σ_{v,w} π_vu π_uw λ_v λ_w.
    pub theta5: Vec<f64>,
}

pub fn theta_set(pi: &DMatrix<f64>, lambda: &[f64]) -> Result<ThetaSet> {
    let k = check_model(pi, lambda)?;
    let mut theta3 = vec![0.0; k];
    let mut theta4 = vec![0.0; k];
    let mut theta5 = vec![0.0; k];
    for u in 0..k {
        for v in 0..k {
            for w in 0..k {
                let lw = lambda[v] * lambda[w];
                theta3[u] += pi[(u, v)] * pi[(v, w)] * pi[(w, u)] * lw;
                theta4[u] += pi[(u, v)] * pi[(v, w)] * lw;
                theta5[u] += pi[(v, u)] * pi[(u, w)] * lw;
            }
        }
    }
    let theta1 = (0..k).map(|u| lambda[u] * theta4[u]).sum();
    let theta2 = (0..k).map(|u| lambda[u] * theta3[u]).sum();
    Ok(ThetaSet {
        theta1,
        theta2,
        theta3,
        theta4,
        theta5,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringAsymptotics {
    pub tau2: f64,
    /// b(p); zero for induced sampling.
    pub bias: f64,
    pub scheme: Scheme,
}

/// τ^[i](p)² and b(p) for the estimated clustering coefficient.
pub fn clustering_asymptotics(
    pi: &DMatrix<f64>,
    lambda: &[f64],
    p: f64,
    scheme: Scheme,
) -> Result<ClusteringAsymptotics> {
    check_p(p)?;
    let th = theta_set(pi, lambda)?;
    if th.theta1 <= 0.0 {
        return Err(Error::DegenerateTheta);
    }
    let t1 = th.theta1;
    let t2 = th.theta2;
    let k = lambda.len();
    match scheme {
        Scheme::Induced => {
            let s: f64 = (0..k)
                .map(|u| {
                    let b = 3.0 * t1 * th.theta3[u] - t2 * (2.0 * th.theta4[u] + th.theta5[u]);
                    lambda[u] * b * b
                })
                .sum();
            Ok(ClusteringAsymptotics {
                tau2: (1.0 / p - 1.0) / t1.powi(4) * s,
                bias: 0.0,
                scheme,
            })
        }
        Scheme::Ego => {
            let q = p * (1.0 - p) + 1.0;
            let s: f64 = (0..k)
                .map(|u| {
                    let b = 6.0 * t1 * th.theta3[u]
                        - (3.0 - 2.0 * p) * t2 / q
                            * (2.0 * p * th.theta4[u] + (1.0 + p) * th.theta5[u]);
                    lambda[u] * b * b
                })
                .sum();
            Ok(ClusteringAsymptotics {
                tau2: p * (1.0 - p).powi(3) / (q * q) / t1.powi(4) * s,
                bias: -(1.0 - p).powi(2) / q * t2 / t1,
                scheme,
            })
        }
    }
}

/// Σ^[i]: asymptotic covariance of
/// (Ŝ(K₂)/N², Ŝ(K₁,₂)/N³, Ŝ(K₃)/N³, S(K₂)/N², S(K₁,₂)/N³, S(K₃)/N³).
pub fn joint_covariance(pi: &DMatrix<f64>, lambda: &[f64], p: f64, scheme: Scheme) -> Result<DMatrix<f64>> {
    check_p(p)?;
    let th = theta_set(pi, lambda)?;
    let k = lambda.len();
    let mut sigma = DMatrix::zeros(6, 6);
    let (scale, vectors): (f64, Vec<DVector<f64>>) = match scheme {
        Scheme::Induced => (
            p.powi(3) * (1.0 - p),
            (0..k)
                .map(|u| {
                    let d: f64 = (0..k).map(|v| pi[(u, v)] * lambda[v]).sum();
                    DVector::from_vec(vec![
                        2.0 * d,
                        p * (th.theta5[u] + 2.0 * th.theta4[u]),
                        3.0 * p * th.theta3[u],
                        0.0,
                        0.0,
                        0.0,
                    ])
                })
                .collect(),
        ),
        Scheme::Ego => (
            p * (1.0 - p).powi(3),
            (0..k)
                .map(|u| {
                    let d: f64 = (0..k).map(|v| pi[(u, v)] * lambda[v]).sum();
                    DVector::from_vec(vec![
                        2.0 * d,
                        (1.0 + p) * th.theta5[u] + 2.0 * p * th.theta4[u],
                        6.0 * p * th.theta3[u],
                        0.0,
                        0.0,
                        0.0,
                    ])
                })
                .collect(),
        ),
    };
    for (a, &l) in vectors.iter().zip(lambda) {
        sigma += a * a.transpose() * (scale * l);
    }
    Ok(sigma)
}

/// ∇g'Σ∇g for g(x,y,a,b) = y/x − b/a evaluated at
/// μ = (f(K₁,₂)θ₁, f(K₃)θ₂, θ₁, θ₂), using the rows of Σ^[i] for
/// (Ŝ(K₁,₂), Ŝ(K₃), S(K₁,₂), S(K₃)).
pub fn delta_method_tau2(pi: &DMatrix<f64>, lambda: &[f64], p: f64, scheme: Scheme) -> Result<f64> {
    let th = theta_set(pi, lambda)?;
    if th.theta1 <= 0.0 {
        return Err(Error::DegenerateTheta);
    }
    let sigma = joint_covariance(pi, lambda, p, scheme)?;
    let (f12, f3) = match scheme {
        Scheme::Induced => (p.powi(3), p.powi(3)),
        Scheme::Ego => (p * p * (1.0 - p) + p, 3.0 * p * p * (1.0 - p) + p.powi(3)),
    };
    let x = f12 * th.theta1;
    let y = f3 * th.theta2;
    let a = th.theta1;
    let b = th.theta2;
    let grad = DVector::from_vec(vec![-y / (x * x), 1.0 / x, b / (a * a), -1.0 / a]);
    let idx = [1usize, 2, 4, 5];
    let sub = DMatrix::from_fn(4, 4, |i, j| sigma[(idx[i], idx[j])]);
    Ok((grad.transpose() * sub * &grad)[(0, 0)])
}

/// μ(a,p), σ²(a,p) of the design-ignored conditional limit, exactly as
/// printed in the source derivation. `pi` is the 2×2 matrix.
pub fn conditional_demo_constants(a: f64, p: f64, pi: &DMatrix<f64>) -> Result<(f64, f64)> {
    let (p11, p12, p22) = two_class(pi)?;
    check_p(p)?;
    let c = 1.0 / (p * p) - 1.0;
    let mu = (a * a / 4.0 * c - a * (1.0 - a / 2.0) - (1.0 - a / 2.0).powi(2)) * p11 - p12 - p22 / 4.0;
    let s2 = (a * a / 2.0 * c * c + 2.0 * a * (1.0 - a / 2.0) + 2.0 * (1.0 - a / 2.0).powi(2))
        * p11
        * (1.0 - p11)
        + 2.0 * p12 * (1.0 - p12)
        + p22 * (1.0 - p22) / 2.0;
    Ok((mu, s2))
}

/// μ(a,p), σ²(a,p) recomputed from the block sizes of the conditional
/// experiment: a·N/2 selected class-1 nodes, (1−a)·N/2 unselected class-1
/// nodes and N/2 class-2 nodes.
pub fn conditional_demo_constants_derived(a: f64, p: f64, pi: &DMatrix<f64>) -> Result<(f64, f64)> {
    let (p11, p12, p22) = two_class(pi)?;
    check_p(p)?;
    let c = 1.0 / (p * p) - 1.0;
    let mu = (a * a / (4.0 * p * p) - 0.25) * p11 - p12 / 2.0 - p22 / 4.0;
    let v = |x: f64| x * (1.0 - x);
    let s2 = (a * a / 2.0 * c * c + a * (1.0 - a) + (1.0 - a).powi(2) / 2.0) * v(p11) + v(p12) + v(p22) / 2.0;
    Ok((mu, s2))
}

fn two_class(pi: &DMatrix<f64>) -> Result<(f64, f64, f64)> {
    if pi.nrows() != 2 || pi.ncols() != 2 {
        return Err(Error::DimensionMismatch("conditional demo needs a 2×2 Π".into()));
    }
    Ok((pi[(0, 0)], pi[(0, 1)], pi[(1, 1)]))
}

/// N^{-R+1/2}(Ŝ/f − S)/σ.
pub fn pivot(n: usize, r: usize, shat: f64, s_pop: f64, f: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok((shat / f - s_pop) * (n as f64).powf(-(r as f64) + 0.5) / sigma)
}

/// Standardized induced pivot N^{-R+1/2}(Ŝ/p^R − S)/σ^[1].
pub fn pivot_induced(n: usize, h: &Pattern, shat: f64, s_pop: f64, sigma: f64, p: f64) -> Result<f64> {
    pivot(n, h.r(), shat, s_pop, p.powi(h.r() as i32), sigma)
}

/// Standardized ego pivot N^{-R+1/2}(Ŝ/f(H,p) − S)/σ^[2].
pub fn pivot_ego(n: usize, h: &Pattern, shat: f64, s_pop: f64, sigma: f64, p: f64) -> Result<f64> {
    let f = ego_functionals(h, p)?.f;
    pivot(n, h.r(), shat, s_pop, f, sigma)
}
