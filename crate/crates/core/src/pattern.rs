//! Target motifs and the edge-product functional Ψ_H.
//!
//! A [`Pattern`] is constructed from 1-based vertex pairs (vertex set `{1..R}`)
//! and stores everything 0-based. All accessors return 0-based indices.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest pattern handled by the exact enumeration code paths.
pub const MAX_PATTERN_VERTICES: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    r: usize,
    edges: Vec<(usize, usize)>,
    nbr: Vec<u8>,
    name: String,
}

impl Pattern {
    /// Builds a validated pattern on vertices `{1..r}` from 1-based pairs.
    pub fn new(r: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::named(r, edges, "custom")
    }

    pub fn named(r: usize, edges: &[(usize, usize)], name: &str) -> Result<Self> {
        if r < 2 {
            return Err(Error::TooFewVertices(r));
        }
        if r > MAX_PATTERN_VERTICES {
            return Err(Error::InvalidSize(format!(
                "pattern with {r} vertices exceeds the limit of {MAX_PATTERN_VERTICES}"
            )));
        }
        let mut nbr = vec![0u8; r];
        let mut list = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i == 0 || j == 0 || i > r || j > r {
                return Err(Error::IndexOutOfRange(format!(
                    "edge ({i},{j}) not within 1..={r}"
                )));
            }
            if i == j {
                return Err(Error::SelfLoop(i));
            }
            let (a, b) = if i < j { (i - 1, j - 1) } else { (j - 1, i - 1) };
            if nbr[a] & (1 << b) != 0 {
                return Err(Error::DuplicateEdge(i, j));
            }
            nbr[a] |= 1 << b;
            nbr[b] |= 1 << a;
            list.push((a, b));
        }
        list.sort_unstable();
        let full: u8 = if r == 8 { 0xff } else { (1u8 << r) - 1 };
        let mut seen: u8 = 1;
        let mut frontier: u8 = 1;
        while frontier != 0 {
            let mut next = 0u8;
            for (v, &adj) in nbr.iter().enumerate().take(r) {
                if frontier & (1 << v) != 0 {
                    next |= adj;
                }
            }
            frontier = next & !seen;
            seen |= next;
        }
        if seen != full {
            return Err(Error::DisconnectedPattern);
        }
        Ok(Pattern {
            r,
            edges: list,
            nbr,
            name: name.to_string(),
        })
    }

    /// Builds one of the named motif families.
    pub fn canonical(kind: MotifKind) -> Result<Self> {
        match kind {
            MotifKind::Edge => Self::named(2, &[(1, 2)], "edge"),
            MotifKind::Wedge => Self::named(3, &[(1, 2), (2, 3)], "wedge"),
            MotifKind::Triangle => Self::named(3, &[(1, 2), (1, 3), (2, 3)], "triangle"),
            MotifKind::Complete(r) => {
                check_size(r, 2)?;
                let e: Vec<_> = (1..=r)
                    .flat_map(|i| (i + 1..=r).map(move |j| (i, j)))
                    .collect();
                Self::named(r, &e, &format!("complete:{r}"))
            }
            MotifKind::Star(r) => {
                check_size(r, 2)?;
                let e: Vec<_> = (2..=r).map(|j| (1, j)).collect();
                Self::named(r, &e, &format!("star:{r}"))
            }
            MotifKind::Line(r) => {
                check_size(r, 2)?;
                let e: Vec<_> = (1..r).map(|i| (i, i + 1)).collect();
                Self::named(r, &e, &format!("line:{r}"))
            }
            MotifKind::Circle(r) => {
                check_size(r, 3)?;
                let mut e: Vec<_> = (1..r).map(|i| (i, i + 1)).collect();
                e.push((1, r));
                Self::named(r, &e, &format!("circle:{r}"))
            }
        }
    }

    /// A path on `m` vertices whose last vertex is identified with vertex 1 of
    /// a cycle on `n` vertices (`m + n - 1` vertices in total).
    pub fn line_circle(m: usize, n: usize) -> Result<Self> {
        if m < 2 || n < 3 {
            return Err(Error::InvalidSize(format!(
                "line-circle needs m >= 2 and n >= 3, got ({m},{n})"
            )));
        }
        let r = m + n - 1;
        let mut e: Vec<_> = (1..m).map(|i| (i, i + 1)).collect();
        let cyc: Vec<usize> = (m..=r).collect();
        for w in cyc.windows(2) {
            e.push((w[0], w[1]));
        }
        e.push((m, r));
        Self::named(r, &e, &format!("line:{m}+circle:{n}"))
    }

    /// The `(r-2)`-regular graph on an even number of vertices obtained by
    /// deleting the perfect matching `{i, i + r/2}` from the complete graph.
    pub fn matching_complement(r: usize) -> Result<Self> {
        if r < 4 || !r.is_multiple_of(2) {
            return Err(Error::InvalidSize(format!(
                "matching complement needs even r >= 4, got {r}"
            )));
        }
        let h = r / 2;
        let e: Vec<_> = (1..=r)
            .flat_map(|i| (i + 1..=r).map(move |j| (i, j)))
            .filter(|&(i, j)| j != i + h)
            .collect();
        Self::named(r, &e, &format!("regular:{r}"))
    }

    /// Parses the text format: first line `R`, then one `i j` edge per line (1-based).
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, first) = lines
            .next()
            .ok_or_else(|| Error::parse("pattern", "empty pattern file"))?;
        let r: usize = first
            .parse()
            .map_err(|_| Error::parse(format!("pattern line {ln}"), "expected vertex count"))?;
        let mut edges = Vec::new();
        for (ln, line) in lines {
            let mut it = line.split_whitespace();
            let mut next = || -> Result<usize> {
                it.next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::parse(format!("pattern line {ln}"), "expected `i j`"))
            };
            let i = next()?;
            let j = next()?;
            edges.push((i, j));
        }
        Self::new(r, &edges)
    }

    /// Number of vertices R.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of edges T.
    pub fn t(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted 0-based pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Bitmask of the neighbours of vertex `v` (0-based).
    pub fn neighbor_mask(&self, v: usize) -> u8 {
        self.nbr[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.nbr[v].count_ones() as usize
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.nbr[a] & (1 << b) != 0
    }

    /// Indices of edges incident to vertex `v`.
    pub fn incident_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].0 == v || self.edges[e].1 == v)
            .collect()
    }

    /// Indices of edges not incident to vertex `v`.
    pub fn nonincident_edges(&self, v: usize) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].0 != v && self.edges[e].1 != v)
            .collect()
    }

    /// Number of edges with both endpoints in the vertex set `mask`.
    pub fn induced_edge_count(&self, mask: u32) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| mask & (1 << a) != 0 && mask & (1 << b) != 0)
            .count()
    }

    /// Edge, 3-vertex path or triangle, if the pattern is one of them.
    pub fn small_kind(&self) -> Option<SmallKind> {
        match (self.r, self.t()) {
            (2, 1) => Some(SmallKind::Edge),
            (3, 2) => Some(SmallKind::Wedge),
            (3, 3) => Some(SmallKind::Triangle),
            _ => None,
        }
    }

    /// Vertex visiting order in which every vertex after the first has an
    /// earlier neighbour (breadth-first from vertex 0).
    pub(crate) fn connected_order(&self) -> Vec<usize> {
        let mut order = vec![0usize];
        let mut seen = 1u8;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for w in 0..self.r {
                if self.nbr[v] & (1 << w) != 0 && seen & (1 << w) == 0 {
                    seen |= 1 << w;
                    order.push(w);
                }
            }
        }
        order
    }
}

fn check_size(r: usize, min: usize) -> Result<()> {
    if r < min || r > MAX_PATTERN_VERTICES {
        return Err(Error::InvalidSize(format!(
            "size {r} outside {min}..={MAX_PATTERN_VERTICES}"
        )));
    }
    Ok(())
}

/// The three motifs with word-parallel counting identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SmallKind {
    Edge,
    Wedge,
    Triangle,
}

/// Named motif families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MotifKind {
    Edge,
    Wedge,
    Triangle,
    Complete(usize),
    Star(usize),
    Line(usize),
    Circle(usize),
}

impl FromStr for MotifKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown motif `{s}`"));
        match s {
            "edge" => return Ok(MotifKind::Edge),
            "wedge" => return Ok(MotifKind::Wedge),
            "triangle" => return Ok(MotifKind::Triangle),
            _ => {}
        }
        let (kind, size) = s.split_once(':').ok_or_else(bad)?;
        let r: usize = size.parse().map_err(|_| bad())?;
        match kind {
            "complete" => Ok(MotifKind::Complete(r)),
            "star" => Ok(MotifKind::Star(r)),
            "line" => Ok(MotifKind::Line(r)),
            "circle" => Ok(MotifKind::Circle(r)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Ψ_H(B, u): product over pattern edges `{i,j}` of `B[u_i, u_j]`.
/// Class indices in `u` are 0-based.
pub fn psi(h: &Pattern, b: &DMatrix<f64>, u: &[usize]) -> Result<f64> {
    if u.len() != h.r() {
        return Err(Error::DimensionMismatch(format!(
            "class vector has length {} but pattern has {} vertices",
            u.len(),
            h.r()
        )));
    }
    let k = b.nrows();
    if b.ncols() != k {
        return Err(Error::DimensionMismatch("matrix is not square".into()));
    }
    if let Some(&bad) = u.iter().find(|&&c| c >= k) {
        return Err(Error::IndexOutOfRange(format!("class {bad} with K = {k}")));
    }
    Ok(psi_unchecked(h, b, u))
}

#[inline]
pub(crate) fn psi_unchecked(h: &Pattern, b: &DMatrix<f64>, u: &[usize]) -> f64 {
    h.edges().iter().map(|&(i, j)| b[(u[i], u[j])]).product()
}

/// v^[k](u): `u` with positions 0 and `k` interchanged (0-based `k`).
pub fn swap_vector(u: &[usize], k: usize) -> Result<Vec<usize>> {
    if k >= u.len() {
        return Err(Error::IndexOutOfRange(format!(
            "position {k} in vector of length {}",
            u.len()
        )));
    }
    let mut v = u.to_vec();
    v.swap(0, k);
    Ok(v)
}
