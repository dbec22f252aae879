//! Exact labelled subgraph counts over ordered tuples of distinct vertices.
//!
//! `S_N(H) = Σ_s Π_{{a,b}∈E(H)} Y_{s_a,s_b}`; estimated counts multiply each
//! term by the scheme's inclusion weight. Edge, wedge and triangle counts use
//! word-parallel identities; every other pattern goes through a backtracking
//! enumeration of injective maps with adjacency pruning.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{and3_count, and_count, iter_bits, BitSet, PopulationGraph};
use crate::pattern::{Pattern, SmallKind};
use crate::sampling::{SampleMask, SampleView, Scheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CountResult {
    pub value: u128,
    /// Vertex count R of the pattern.
    pub r: usize,
    /// `None` for a population count.
    pub scheme: Option<Scheme>,
}

impl CountResult {
    /// `value / N^R`.
    pub fn density(&self, n: usize) -> f64 {
        self.value as f64 / (n as f64).powi(self.r as i32)
    }
}

#[derive(Clone, Copy)]
enum Mode<'a> {
    Population,
    Induced(&'a BitSet),
    Ego(&'a BitSet),
}

fn check_size(g: &PopulationGraph, h: &Pattern) -> Result<()> {
    if h.r() > g.n() {
        return Err(Error::PatternLargerThanGraph {
            pattern: h.r(),
            graph: g.n(),
        });
    }
    Ok(())
}

/// S_N(H) for the population graph.
pub fn count_population(g: &PopulationGraph, h: &Pattern) -> Result<CountResult> {
    check_size(g, h)?;
    let value = match h.small_kind() {
        Some(kind) => small_count(g, kind, Mode::Population),
        None => general_count(g, h, Mode::Population)?,
    };
    Ok(CountResult {
        value,
        r: h.r(),
        scheme: None,
    })
}

/// Ŝ^[l]_N(H) for a sample view.
pub fn count_estimated(view: &SampleView<'_>, h: &Pattern) -> Result<CountResult> {
    check_size(view.population, h)?;
    let mode = mode_of(view);
    let value = match h.small_kind() {
        Some(kind) => small_count(view.population, kind, mode),
        None => general_count(view.population, h, mode)?,
    };
    Ok(CountResult {
        value,
        r: h.r(),
        scheme: Some(view.scheme),
    })
}

/// The backtracking count, bypassing the edge/wedge/triangle identities.
pub fn count_population_general(g: &PopulationGraph, h: &Pattern) -> Result<u128> {
    check_size(g, h)?;
    general_count(g, h, Mode::Population)
}

/// The backtracking estimated count, bypassing the fast identities.
pub fn count_estimated_general(view: &SampleView<'_>, h: &Pattern) -> Result<u128> {
    check_size(view.population, h)?;
    general_count(view.population, h, mode_of(view))
}

fn mode_of<'a>(view: &SampleView<'a>) -> Mode<'a> {
    match view.scheme {
        Scheme::Induced => Mode::Induced(view.mask.bits()),
        Scheme::Ego => Mode::Ego(view.mask.bits()),
    }
}

/// Γ_N = S(K₃)/S(K₁,₂), or 0 when there are no wedges.
pub fn clustering_population(g: &PopulationGraph) -> f64 {
    let w = small_count(g, SmallKind::Wedge, Mode::Population);
    let t = small_count(g, SmallKind::Triangle, Mode::Population);
    ratio(t, w)
}

/// Γ̂ = Ŝ(K₃)/Ŝ(K₁,₂), or 0 when no wedge is observed.
pub fn clustering_estimated(view: &SampleView<'_>) -> f64 {
    let mode = mode_of(view);
    let w = small_count(view.population, SmallKind::Wedge, mode);
    let t = small_count(view.population, SmallKind::Triangle, mode);
    ratio(t, w)
}

fn ratio(t: u128, w: u128) -> f64 {
    if w == 0 {
        0.0
    } else {
        t as f64 / w as f64
    }
}

/// Edge, wedge and triangle counts for the population and both schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SmallCounts {
    pub edge: u128,
    pub wedge: u128,
    pub triangle: u128,
}

impl SmallCounts {
    pub fn clustering(&self) -> f64 {
        ratio(self.triangle, self.wedge)
    }

    pub fn get(&self, kind: SmallKind) -> u128 {
        match kind {
            SmallKind::Edge => self.edge,
            SmallKind::Wedge => self.wedge,
            SmallKind::Triangle => self.triangle,
        }
    }
}

pub fn small_counts_population(g: &PopulationGraph) -> SmallCounts {
    all_small(g, Mode::Population)
}

pub fn small_counts_estimated(view: &SampleView<'_>) -> SmallCounts {
    all_small(view.population, mode_of(view))
}

fn all_small(g: &PopulationGraph, mode: Mode<'_>) -> SmallCounts {
    SmallCounts {
        edge: small_count(g, SmallKind::Edge, mode),
        wedge: small_count(g, SmallKind::Wedge, mode),
        triangle: small_count(g, SmallKind::Triangle, mode),
    }
}

fn small_count(g: &PopulationGraph, kind: SmallKind, mode: Mode<'_>) -> u128 {
    let n = g.n();
    let per_vertex = |i: usize| -> u128 {
        let row = g.row(i);
        match (kind, mode) {
            (SmallKind::Edge, Mode::Population) => g.degree(i) as u128,
            (SmallKind::Edge, Mode::Induced(f)) => {
                if f.contains(i) {
                    and_count(row, f.words()) as u128
                } else {
                    0
                }
            }
            (SmallKind::Edge, Mode::Ego(f)) => {
                if f.contains(i) {
                    g.degree(i) as u128
                } else {
                    and_count(row, f.words()) as u128
                }
            }
            (SmallKind::Wedge, Mode::Population) => {
                let d = g.degree(i) as u128;
                d * d.saturating_sub(1)
            }
            (SmallKind::Wedge, Mode::Induced(f)) => {
                if f.contains(i) {
                    let d = and_count(row, f.words()) as u128;
                    d * d.saturating_sub(1)
                } else {
                    0
                }
            }
            (SmallKind::Wedge, Mode::Ego(f)) => {
                let d = if f.contains(i) {
                    g.degree(i) as u128
                } else {
                    and_count(row, f.words()) as u128
                };
                d * d.saturating_sub(1)
            }
            (SmallKind::Triangle, Mode::Population) => iter_bits(row)
                .map(|j| and_count(row, g.row(j)) as u128)
                .sum(),
            (SmallKind::Triangle, Mode::Induced(f)) => {
                if !f.contains(i) {
                    return 0;
                }
                iter_bits(row)
                    .filter(|&j| f.contains(j))
                    .map(|j| and3_count(row, g.row(j), f.words()) as u128)
                    .sum()
            }
            (SmallKind::Triangle, Mode::Ego(f)) => {
                let wi = f.contains(i);
                iter_bits(row)
                    .map(|j| match (wi, f.contains(j)) {
                        (true, true) => and_count(row, g.row(j)) as u128,
                        (false, false) => 0,
                        _ => and3_count(row, g.row(j), f.words()) as u128,
                    })
                    .sum()
            }
        }
    };
    (0..n).into_par_iter().map(per_vertex).sum()
}

struct Plan {
    order: Vec<usize>,
    /// For each level, the levels of earlier-placed pattern neighbours.
    back: Vec<Vec<usize>>,
}

fn plan(h: &Pattern) -> Plan {
    let order = h.connected_order();
    let back = (0..order.len())
        .map(|l| (0..l).filter(|&m| h.has_edge(order[l], order[m])).collect())
        .collect();
    Plan { order, back }
}

fn general_count(g: &PopulationGraph, h: &Pattern, mode: Mode<'_>) -> Result<u128> {
    let plan = plan(h);
    let n = g.n();
    let stride = g.adjacency().stride();
    let r = h.r();
    let start = |i: usize| match mode {
        Mode::Induced(f) => f.contains(i),
        _ => true,
    };
    let partials: Vec<Option<u128>> = (0..n)
        .into_par_iter()
        .filter(|&i| start(i))
        .map_init(
            || (vec![vec![0u64; stride]; r], vec![0usize; r]),
            |(bufs, assigned), i| {
                assigned[0] = i;
                extend(g, &plan, mode, 1, assigned, bufs)
            },
        )
        .collect();
    partials
        .into_iter()
        .try_fold(0u128, |acc, x| x.and_then(|x| acc.checked_add(x)))
        .ok_or(Error::CountOverflow)
}

fn extend(
    g: &PopulationGraph,
    plan: &Plan,
    mode: Mode<'_>,
    level: usize,
    assigned: &mut [usize],
    bufs: &mut [Vec<u64>],
) -> Option<u128> {
    let r = plan.order.len();
    if level == r {
        return Some(1);
    }
    let cand = &mut bufs[level];
    let back = &plan.back[level];
    cand.copy_from_slice(g.row(assigned[back[0]]));
    for &m in &back[1..] {
        for (c, w) in cand.iter_mut().zip(g.row(assigned[m])) {
            *c &= w;
        }
    }
    match mode {
        Mode::Population => {}
        Mode::Induced(f) => and_into(cand, f.words()),
        Mode::Ego(f) => {
            if back.iter().any(|&m| !f.contains(assigned[m])) {
                and_into(cand, f.words());
            }
        }
    }
    for &v in &assigned[..level] {
        cand[v >> 6] &= !(1u64 << (v & 63));
    }
    if level + 1 == r {
        return Some(cand.iter().map(|w| w.count_ones() as u128).sum());
    }
    let snapshot: Vec<usize> = iter_bits(cand).collect();
    let mut total: u128 = 0;
    for v in snapshot {
        assigned[level] = v;
        let sub = extend(g, plan, mode, level + 1, assigned, bufs)?;
        total = total.checked_add(sub)?;
    }
    Some(total)
}

#[inline]
fn and_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d &= s;
    }
}

/// Estimated count for an explicit mask, without building a view.
pub fn count_with_mask(
    g: &PopulationGraph,
    h: &Pattern,
    scheme: Scheme,
    mask: &SampleMask,
) -> Result<CountResult> {
    let view = SampleView::new(g, mask, scheme)?;
    count_estimated(&view, h)
}
