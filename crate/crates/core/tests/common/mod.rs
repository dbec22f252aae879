//! Oracles and generators shared by the integration tests. Everything here is
//! written independently of the library's own formulas.
#![allow(dead_code)]

use nalgebra::DMatrix;
use netsamp::graph::PopulationGraph;
use netsamp::pattern::Pattern;
use netsamp::rng;
use rand_chacha::ChaCha8Rng;

pub struct TestRng(ChaCha8Rng);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(rng::stream(seed, 0))
    }

    pub fn uniform(&mut self) -> f64 {
        rng::uniform(&mut self.0)
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        rng::below(&mut self.0, n)
    }
}

/// Symmetric Π with entries in (0.05, 0.95), positive proportions and p in (0.05, 0.95).
pub fn random_model(r: &mut TestRng, k: usize) -> (DMatrix<f64>, Vec<f64>, f64) {
    let mut pi = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = r.range(0.05, 0.95);
            pi[(i, j)] = v;
            pi[(j, i)] = v;
        }
    }
    let raw: Vec<f64> = (0..k).map(|_| r.range(0.1, 1.0)).collect();
    let s: f64 = raw.iter().sum();
    let lambda = raw.iter().map(|x| x / s).collect();
    (pi, lambda, r.range(0.05, 0.95))
}

/// Random connected pattern on `n` vertices: a random tree plus extra edges.
pub fn random_connected_pattern(r: &mut TestRng, n: usize) -> Pattern {
    let mut edges = std::collections::BTreeSet::new();
    for v in 2..=n {
        let u = 1 + r.below(v - 1);
        edges.insert((u, v));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            if r.uniform() < 0.35 {
                edges.insert((i, j));
            }
        }
    }
    let e: Vec<_> = edges.into_iter().collect();
    Pattern::new(n, &e).expect("connected by construction")
}

/// Erdős–Rényi graph G(n, q).
pub fn random_graph(r: &mut TestRng, n: usize, q: f64) -> PopulationGraph {
    let mut e = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if r.uniform() < q {
                e.push((i, j));
            }
        }
    }
    PopulationGraph::unlabelled(n, e)
}

/// All ordered tuples of `r` distinct vertices from `0..n`.
pub fn ordered_tuples(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(r);
    fn rec(n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                rec(n, r, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, r, &mut cur, &mut out);
    out
}

/// Brute-force Σ over ordered distinct tuples of Π_{edges} Y·h(W,W), with
/// `observe(i, j)` deciding whether pair (i,j) counts as observed.
pub fn brute_count(g: &PopulationGraph, h: &Pattern, observe: impl Fn(usize, usize) -> bool) -> u128 {
    ordered_tuples(g.n(), h.r())
        .into_iter()
        .filter(|s| {
            h.edges()
                .iter()
                .all(|&(a, b)| g.has_edge(s[a], s[b]) && observe(s[a], s[b]))
        })
        .count() as u128
}

/// Σ_{u₂..u_R} F(u) Π λ_{u_i} for a fixed u₁.
pub fn sum_tail(k: usize, r: usize, u1: usize, lambda: &[f64], f: impl Fn(&[usize]) -> f64) -> f64 {
    let mut total = 0.0;
    let mut u = vec![0usize; r];
    u[0] = u1;
    for idx in 0..k.pow(r as u32 - 1) {
        let mut rest = idx;
        let mut w = 1.0;
        for slot in u.iter_mut().skip(1) {
            *slot = rest % k;
            rest /= k;
            w *= lambda[*slot];
        }
        total += f(&u) * w;
    }
    total
}

pub fn psi_complete(pi: &DMatrix<f64>, u: &[usize]) -> f64 {
    let mut prod = 1.0;
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            prod *= pi[(u[i], u[j])];
        }
    }
    prod
}

/// Π_{l≠c} π_{u_c,u_l}.
pub fn star_product(pi: &DMatrix<f64>, u: &[usize], c: usize) -> f64 {
    (0..u.len()).filter(|&l| l != c).map(|l| pi[(u[c], u[l])]).product()
}

/// Closed-form σ^[1]² for K₂, K₁,₂, K₃.
pub fn closed_induced_small(kind: &str, pi: &DMatrix<f64>, lambda: &[f64], p: f64) -> f64 {
    let k = lambda.len();
    let c = 1.0 / p - 1.0;
    let s: f64 = (0..k)
        .map(|u1| {
            let inner = match kind {
                "edge" => 2.0 * (0..k).map(|v| pi[(u1, v)] * lambda[v]).sum::<f64>(),
                "wedge" => sum_tail(k, 3, u1, lambda, |u| {
                    (pi[(u[0], u[2])] + 2.0 * pi[(u[1], u[2])]) * pi[(u[0], u[1])]
                }),
                "triangle" => 3.0 * sum_tail(k, 3, u1, lambda, |u| pi[(u[0], u[1])] * pi[(u[1], u[2])] * pi[(u[2], u[0])]),
                _ => unreachable!(),
            };
            lambda[u1] * inner * inner
        })
        .sum();
    c * s
}

/// Closed-form σ^[2]² for K₂, K₁,₂, K₃.
pub fn closed_ego_small(kind: &str, pi: &DMatrix<f64>, lambda: &[f64], p: f64) -> f64 {
    let k = lambda.len();
    let q = 1.0 - p;
    let (pre, inner): (f64, Box<dyn Fn(usize) -> f64>) = match kind {
        "edge" => (
            4.0 * p * q.powi(3) / (2.0 * p * q + p * p).powi(2),
            Box::new(|u1| (0..k).map(|v| pi[(u1, v)] * lambda[v]).sum::<f64>()),
        ),
        "wedge" => (
            p * q.powi(3) / (p * p * q + p).powi(2),
            Box::new(|u1| {
                sum_tail(k, 3, u1, lambda, |u| {
                    ((1.0 + p) * pi[(u[0], u[2])] + 2.0 * p * pi[(u[1], u[2])]) * pi[(u[0], u[1])]
                })
            }),
        ),
        "triangle" => (
            36.0 * p.powi(3) * q.powi(3) / (3.0 * p * p * q + p.powi(3)).powi(2),
            Box::new(|u1| sum_tail(k, 3, u1, lambda, |u| pi[(u[0], u[1])] * pi[(u[1], u[2])] * pi[(u[2], u[0])])),
        ),
        _ => unreachable!(),
    };
    pre * (0..k).map(|u1| lambda[u1] * inner(u1).powi(2)).sum::<f64>()
}

/// Closed-form σ^[1]² for K_R.
pub fn closed_induced_complete(r: usize, pi: &DMatrix<f64>, lambda: &[f64], p: f64) -> f64 {
    let k = lambda.len();
    let s: f64 = (0..k)
        .map(|u1| lambda[u1] * sum_tail(k, r, u1, lambda, |u| psi_complete(pi, u)).powi(2))
        .sum();
    (r * r) as f64 * (1.0 / p - 1.0) * s
}

/// Closed-form σ^[1]² for K₁,R−1.
pub fn closed_induced_star(r: usize, pi: &DMatrix<f64>, lambda: &[f64], p: f64) -> f64 {
    let k = lambda.len();
    let s: f64 = (0..k)
        .map(|u1| {
            let inner = sum_tail(k, r, u1, lambda, |u| {
                star_product(pi, u, 0) + (r - 1) as f64 * star_product(pi, u, 1)
            });
            lambda[u1] * inner * inner
        })
        .sum();
    (1.0 / p - 1.0) * s
}

/// Closed-form σ^[2]² for K_R.
pub fn closed_ego_complete(r: usize, pi: &DMatrix<f64>, lambda: &[f64], p: f64) -> f64 {
    let k = lambda.len();
    let rf = r as f64;
    let f = rf * p.powi(r as i32 - 1) * (1.0 - p) + p.powi(r as i32);
    let pre = rf * rf * (rf - 1.0).powi(2) * p.powi(2 * r as i32 - 3) * (1.0 - p).powi(3) / (f * f);
    let s: f64 = (0..k)
        .map(|u1| lambda[u1] * sum_tail(k, r, u1, lambda, |u| psi_complete(pi, u)).powi(2))
        .sum();
    pre * s
}

/// Closed-form σ^[2]² for K₁,R−1.
pub fn closed_ego_star(r: usize, pi: &DMatrix<f64>, lambda: &[f64], p: f64) -> f64 {
    let k = lambda.len();
    let f = p.powi(r as i32 - 1) * (1.0 - p) + p;
    let a = 1.0 - p.powi(r as i32 - 1);
    let b = (r - 1) as f64 * p.powi(r as i32 - 2) * (1.0 - p);
    let s: f64 = (0..k)
        .map(|u1| {
            let inner = sum_tail(k, r, u1, lambda, |u| a * star_product(pi, u, 0) + b * star_product(pi, u, 1));
            lambda[u1] * inner * inner
        })
        .sum();
    p * (1.0 - p) / (f * f) * s
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}
