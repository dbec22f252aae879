//! Bernoulli node selection and the induced / ego-centric observation rules.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{BitSet, PopulationGraph};
use crate::pattern::Pattern;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Edges observed between pairs of selected nodes.
    Induced,
    /// Edges observed when at least one endpoint is selected.
    Ego,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Induced, Scheme::Ego];

    /// The map h_l applied to a pair of inclusion indicators.
    #[inline]
    pub fn h(self, wi: bool, wj: bool) -> bool {
        match self {
            Scheme::Induced => wi && wj,
            Scheme::Ego => wi || wj,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Induced => "induced",
            Scheme::Ego => "ego",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "induced" => Ok(Scheme::Induced),
            "ego" => Ok(Scheme::Ego),
            _ => Err(Error::Config(format!("unknown scheme `{s}` (expected induced or ego)"))),
        }
    }
}

/// Node inclusion indicators W.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleMask {
    bits: BitSet,
    p: f64,
    seed: u64,
}

impl SampleMask {
    /// A fixed mask, e.g. for exhaustive enumeration or replay.
    pub fn from_bits(bits: BitSet, p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(SampleMask { bits, p, seed: 0 })
    }

    pub fn n(&self) -> usize {
        self.bits.len_universe()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    #[inline]
    pub fn selected(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn selected_count(&self) -> usize {
        self.bits.count()
    }

    /// Writes one selected node id per line (0-based ids offset by `base`).
    pub fn write_ids<W: Write>(&self, mut out: W, base: usize) -> std::io::Result<()> {
        for i in self.bits.iter() {
            writeln!(out, "{}", i + base)?;
        }
        Ok(())
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// Independent Bernoulli(p) indicators for nodes `0..n`, drawn in index order
/// from stream 0 of the mask key of `seed`.
pub fn bernoulli_select(n: usize, p: f64, seed: u64) -> Result<SampleMask> {
    check_p(p)?;
    let mut r = rng::stream(rng::domain_key(seed, rng::DOMAIN_MASK), 0);
    let mut bits = BitSet::new(n);
    for i in 0..n {
        if rng::uniform(&mut r) < p {
            bits.insert(i);
        }
    }
    Ok(SampleMask { bits, p, seed })
}

/// A population seen through a mask under one scheme.
#[derive(Clone, Copy, Debug)]
pub struct SampleView<'a> {
    pub population: &'a PopulationGraph,
    pub mask: &'a SampleMask,
    pub scheme: Scheme,
}

impl<'a> SampleView<'a> {
    pub fn new(population: &'a PopulationGraph, mask: &'a SampleMask, scheme: Scheme) -> Result<Self> {
        if population.n() != mask.n() {
            return Err(Error::DimensionMismatch(format!(
                "mask covers {} nodes but population has {}",
                mask.n(),
                population.n()
            )));
        }
        Ok(SampleView {
            population,
            mask,
            scheme,
        })
    }

    /// Whether the pair `(i, j)` is observed.
    pub fn is_observed(&self, i: usize, j: usize) -> Result<bool> {
        if i == j {
            return Err(Error::SelfPairQueried(i));
        }
        Ok(self.scheme.h(self.mask.selected(i), self.mask.selected(j)))
    }
}

/// Product over pattern edges of h_l(W_{s_a}, W_{s_b}) for a tuple of
/// distinct vertices.
pub fn inclusion_weight(h: &Pattern, scheme: Scheme, s: &[usize], mask: &SampleMask) -> Result<u8> {
    if s.len() != h.r() {
        return Err(Error::DimensionMismatch(format!(
            "tuple of length {} for pattern on {} vertices",
            s.len(),
            h.r()
        )));
    }
    for (a, &x) in s.iter().enumerate() {
        if x >= mask.n() {
            return Err(Error::IndexOutOfRange(format!("vertex {x}")));
        }
        if s[..a].contains(&x) {
            return Err(Error::NonDistinctTuple);
        }
    }
    let all = h
        .edges()
        .iter()
        .all(|&(a, b)| scheme.h(mask.selected(s[a]), mask.selected(s[b])));
    Ok(all as u8)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_maps() {
        assert!(!Scheme::Induced.h(true, false));
        assert!(Scheme::Ego.h(true, false));
        assert!(!Scheme::Ego.h(false, false));
    }

    #[test]
    fn rejects_degenerate_p() {
        assert!(bernoulli_select(5, 0.0, 1).is_err());
        assert!(bernoulli_select(5, 1.0, 1).is_err());
    }
}
