//! Packed bitset storage for population graphs and node sets.

/// A set of vertices `0..n` stored as packed 64-bit words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    n: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(n: usize) -> Self {
        BitSet {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::new(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(n);
        for i in idx {
            s.insert(i);
        }
        s
    }

    pub fn len_universe(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        iter_bits(&self.words)
    }
}

/// Iterates the set bit positions of a word slice in increasing order.
pub fn iter_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(w, &word)| {
        let mut x = word;
        std::iter::from_fn(move || {
            if x == 0 {
                None
            } else {
                let b = x.trailing_zeros() as usize;
                x &= x - 1;
                Some(w * 64 + b)
            }
        })
    })
}

#[inline]
pub fn and_count(a: &[u64], b: &[u64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as u64).sum()
}

#[inline]
pub fn and3_count(a: &[u64], b: &[u64], c: &[u64]) -> u64 {
    a.iter()
        .zip(b)
        .zip(c)
        .map(|((x, y), z)| (x & y & z).count_ones() as u64)
        .sum()
}

/// Square bit matrix with one packed row per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let stride = n.div_ceil(64);
        BitMatrix {
            n,
            stride,
            bits: vec![0; n * stride],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    pub(crate) fn rows_mut(&mut self) -> std::slice::ChunksExactMut<'_, u64> {
        self.bits.chunks_exact_mut(self.stride.max(1))
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.stride + (j >> 6)] >> (j & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + (j >> 6)] |= 1 << (j & 63);
    }

    /// Copies every bit `(i, j)` to `(j, i)`.
    pub(crate) fn mirror_upper(&mut self) {
        for i in 0..self.n {
            let upper: Vec<usize> = iter_bits(self.row(i)).filter(|&j| j > i).collect();
            for j in upper {
                self.set(j, i);
            }
        }
    }
}

/// Symmetric 0/1 adjacency with zero diagonal plus class labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopulationGraph {
    adj: BitMatrix,
    labels: Vec<usize>,
    k: usize,
}

impl PopulationGraph {
    /// Builds a graph from undirected 0-based edges; loops are ignored and
    /// duplicate edges collapse.
    pub fn from_edges(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        labels: Vec<usize>,
        k: usize,
    ) -> Self {
        let mut adj = BitMatrix::new(n);
        for (i, j) in edges {
            if i != j {
                adj.set(i, j);
                adj.set(j, i);
            }
        }
        PopulationGraph { adj, labels, k }
    }

    pub(crate) fn from_parts(adj: BitMatrix, labels: Vec<usize>, k: usize) -> Self {
        PopulationGraph { adj, labels, k }
    }

    /// Unlabelled graph (every vertex in class 0, K = 1).
    pub fn unlabelled(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::from_edges(n, edges, vec![0; n], 1)
    }

    pub fn n(&self) -> usize {
        self.adj.n()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn adjacency(&self) -> &BitMatrix {
        &self.adj
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        self.adj.row(i)
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj.get(i, j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of unordered edges.
    pub fn edge_count(&self) -> usize {
        (0..self.n()).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Unordered edges `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |i| iter_bits(self.row(i)).filter(move |&j| j > i).map(move |j| (i, j)))
    }

    /// Class proportions N_k / N.
    pub fn class_proportions(&self) -> Vec<f64> {
        let mut counts = vec![0usize; self.k];
        for &l in &self.labels {
            counts[l] += 1;
        }
        let n = self.n() as f64;
        counts.into_iter().map(|c| c as f64 / n).collect()
    }
}
