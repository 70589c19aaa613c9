//! Uniform hypergraphs on dense vertex indices, degree queries and the text
//! file format shared by every tool in the workspace.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

pub type Vertex = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypergraphError {
    #[error("uniformity must be at least 2, got {0}")]
    Uniformity(usize),
    #[error("edge {edge:?} has {got} vertices, expected {expected}")]
    Arity {
        edge: Vec<Vertex>,
        got: usize,
        expected: usize,
    },
    #[error("vertex {vertex} out of range for a hypergraph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("vertex {0} listed twice")]
    RepeatedVertex(Vertex),
    #[error("duplicate edge {0:?}")]
    DuplicateEdge(Vec<Vertex>),
    #[error("set of size {size} exceeds uniformity {r}")]
    SetTooLarge { size: usize, r: usize },
    #[error("ell must lie in 1..={max}, got {ell}")]
    EllOutOfRange { ell: usize, max: usize },
    #[error("binomial coefficient C({n}, {k}) overflows u64")]
    Overflow { n: u64, k: u64 },
}

/// A set of vertices kept in strictly ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new<I: IntoIterator<Item = Vertex>>(members: I) -> Result<Self, HypergraphError> {
        let mut v: Vec<Vertex> = members.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(HypergraphError::RepeatedVertex(w[0]));
        }
        Ok(Self(v))
    }

    /// All vertices `0..n`.
    pub fn full(n: usize) -> Self {
        Self((0..n as Vertex).collect())
    }

    pub(crate) fn from_sorted(v: Vec<Vertex>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        Self(v)
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }

    pub fn check_within(&self, n: usize) -> Result<(), HypergraphError> {
        match self.0.last() {
            Some(&v) if v as usize >= n => Err(HypergraphError::VertexOutOfRange { vertex: v, n }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Exact binomial coefficient; overflow is reported, never wrapped.
pub fn binomial(n: u64, k: u64) -> Result<u64, HypergraphError> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return Err(HypergraphError::Overflow { n, k });
        }
    }
    Ok(acc as u64)
}

/// Advances `comb` (a strictly increasing k-subset of `0..n`) to its
/// lexicographic successor. Returns `false` once the last subset was passed.
pub fn next_combination(comb: &mut [Vertex], n: usize) -> bool {
    let k = comb.len();
    let n = n as Vertex;
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - (k - i) as Vertex {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Calls `f` on every k-subset of `0..n` in lexicographic order.
pub fn for_each_subset<F: FnMut(&[Vertex])>(n: usize, k: usize, mut f: F) {
    if k > n {
        return;
    }
    let mut comb: Vec<Vertex> = (0..k as Vertex).collect();
    loop {
        f(&comb);
        if !next_combination(&mut comb, n) {
            break;
        }
    }
}

/// Calls `f` on every k-subset of `items` (given in ascending order).
pub fn for_each_subset_of<F: FnMut(&[Vertex])>(items: &[Vertex], k: usize, mut f: F) {
    let mut buf = vec![0; k];
    for_each_subset(items.len(), k, |idx| {
        for (slot, &i) in buf.iter_mut().zip(idx) {
            *slot = items[i as usize];
        }
        f(&buf);
    });
}

fn is_subset_sorted(small: &[Vertex], big: &[Vertex]) -> bool {
    let mut it = big.iter();
    small.iter().all(|s| it.by_ref().any(|b| b == s))
}

/// Counts of edges through each ell-subset that lies in at least one edge.
#[derive(Debug, Clone)]
pub struct DegreeIndex {
    ell: usize,
    n: usize,
    counts: HashMap<Box<[Vertex]>, u64>,
}

impl DegreeIndex {
    fn build(h: &Hypergraph, ell: usize) -> Self {
        let mut counts: HashMap<Box<[Vertex]>, u64> = HashMap::new();
        for e in h.edges() {
            for_each_subset_of(e, ell, |s| {
                *counts.entry(s.into()).or_insert(0) += 1;
            });
        }
        Self { ell, n: h.n, counts }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn degree(&self, s: &[Vertex]) -> u64 {
        self.counts.get(s).copied().unwrap_or(0)
    }

    pub fn max(&self) -> u64 {
        self.counts.values().copied().max().unwrap_or(0)
    }

    pub fn min(&self) -> Result<u64, HypergraphError> {
        let total = binomial(self.n as u64, self.ell as u64)?;
        if (self.counts.len() as u64) < total {
            Ok(0)
        } else {
            Ok(self.counts.values().copied().min().unwrap_or(0))
        }
    }

    /// Iterates the covered ell-sets with their degrees, in no fixed order.
    pub fn iter(&self) -> impl Iterator<Item = (&[Vertex], u64)> {
        self.counts.iter().map(|(k, &v)| (&**k, v))
    }
}

/// An r-uniform hypergraph on vertices `0..n`.
///
/// Edges are stored flat, each edge ascending and the edge list sorted
/// lexicographically, so two hypergraphs with the same edge set compare equal
/// and serialize identically.
pub struct Hypergraph {
    r: usize,
    n: usize,
    edges: Vec<Vertex>,
    codegree: OnceLock<DegreeIndex>,
}

impl Hypergraph {
    pub fn new<I, E>(r: usize, n: usize, edges: I) -> Result<Self, HypergraphError>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[Vertex]>,
    {
        if r < 2 {
            return Err(HypergraphError::Uniformity(r));
        }
        let mut rows: Vec<Vec<Vertex>> = Vec::new();
        for e in edges {
            let e = e.as_ref();
            if e.len() != r {
                return Err(HypergraphError::Arity {
                    edge: e.to_vec(),
                    got: e.len(),
                    expected: r,
                });
            }
            let mut row = e.to_vec();
            row.sort_unstable();
            if let Some(w) = row.windows(2).find(|w| w[0] == w[1]) {
                return Err(HypergraphError::RepeatedVertex(w[0]));
            }
            if row[r - 1] as usize >= n {
                return Err(HypergraphError::VertexOutOfRange { vertex: row[r - 1], n });
            }
            rows.push(row);
        }
        rows.sort_unstable();
        if let Some(w) = rows.windows(2).find(|w| w[0] == w[1]) {
            return Err(HypergraphError::DuplicateEdge(w[0].clone()));
        }
        Ok(Self::from_parts(r, n, rows.concat()))
    }

    /// Builds from edges already ascending, sorted and duplicate-free.
    pub(crate) fn from_sorted_rows(r: usize, n: usize, rows: Vec<Vec<Vertex>>) -> Self {
        debug_assert!(rows.windows(2).all(|w| w[0] < w[1]));
        Self::from_parts(r, n, rows.concat())
    }

    fn from_parts(r: usize, n: usize, edges: Vec<Vertex>) -> Self {
        Self {
            r,
            n,
            edges,
            codegree: OnceLock::new(),
        }
    }

    pub fn empty(r: usize, n: usize) -> Result<Self, HypergraphError> {
        Self::new(r, n, std::iter::empty::<[Vertex; 0]>())
    }

    /// The complete r-graph on n vertices.
    pub fn complete(n: usize, r: usize) -> Result<Self, HypergraphError> {
        if r < 2 {
            return Err(HypergraphError::Uniformity(r));
        }
        let mut rows = Vec::new();
        for_each_subset(n, r, |s| rows.push(s.to_vec()));
        Ok(Self::from_sorted_rows(r, n, rows))
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / self.r
    }

    pub fn edges(&self) -> std::slice::ChunksExact<'_, Vertex> {
        self.edges.chunks_exact(self.r)
    }

    pub fn edge(&self, i: usize) -> &[Vertex] {
        &self.edges[i * self.r..(i + 1) * self.r]
    }

    /// `edge` must be ascending.
    pub fn contains_edge(&self, edge: &[Vertex]) -> bool {
        if edge.len() != self.r {
            return false;
        }
        let mut lo = 0;
        let mut hi = self.edge_count();
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.edge(mid).cmp(edge) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    fn check_set(&self, s: &VertexSet) -> Result<(), HypergraphError> {
        if s.len() > self.r {
            return Err(HypergraphError::SetTooLarge { size: s.len(), r: self.r });
        }
        s.check_within(self.n)
    }

    fn check_ell(&self, ell: usize) -> Result<(), HypergraphError> {
        if ell == 0 || ell >= self.r {
            return Err(HypergraphError::EllOutOfRange { ell, max: self.r - 1 });
        }
        Ok(())
    }

    /// Number of edges containing `s`, by a scan over the edge list.
    pub fn degree(&self, s: &VertexSet) -> Result<u64, HypergraphError> {
        self.check_set(s)?;
        Ok(self
            .edges()
            .filter(|e| is_subset_sorted(s.as_slice(), e))
            .count() as u64)
    }

    /// Degree index for ell-sets; the (r-1)-level index is cached.
    pub fn degree_index(&self, ell: usize) -> Result<DegreeIndex, HypergraphError> {
        self.check_ell(ell)?;
        Ok(if ell == self.r - 1 {
            self.codegree_index().clone()
        } else {
            DegreeIndex::build(self, ell)
        })
    }

    /// The (r-1)-degree index, built on first use.
    pub fn codegree_index(&self) -> &DegreeIndex {
        self.codegree.get_or_init(|| DegreeIndex::build(self, self.r - 1))
    }

    /// Minimum ell-degree over all ell-subsets of the vertex set.
    pub fn min_degree(&self, ell: usize) -> Result<u64, HypergraphError> {
        self.check_ell(ell)?;
        if ell == self.r - 1 {
            self.codegree_index().min()
        } else {
            DegreeIndex::build(self, ell).min()
        }
    }

    /// Maximum ell-degree over all ell-subsets of the vertex set.
    pub fn max_degree(&self, ell: usize) -> Result<u64, HypergraphError> {
        self.check_ell(ell)?;
        Ok(if ell == self.r - 1 {
            self.codegree_index().max()
        } else {
            DegreeIndex::build(self, ell).max()
        })
    }

    pub fn max_codegree(&self) -> u64 {
        self.codegree_index().max()
    }

    /// Subhypergraph induced on `w`, relabelled `0..|w|` in ascending order.
    pub fn induced(&self, w: &VertexSet) -> Result<Hypergraph, HypergraphError> {
        w.check_within(self.n)?;
        let mut label = vec![Vertex::MAX; self.n];
        for (i, v) in w.iter().enumerate() {
            label[v as usize] = i as Vertex;
        }
        let mut flat = Vec::new();
        for e in self.edges() {
            if e.iter().all(|&v| label[v as usize] != Vertex::MAX) {
                // relabelling is monotone, so order is preserved
                flat.extend(e.iter().map(|&v| label[v as usize]));
            }
        }
        Ok(Self::from_parts(self.r, w.len(), flat))
    }

    /// Applies a vertex permutation `v -> perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Result<Hypergraph, HypergraphError> {
        Self::new(self.r, perm.len().max(self.n), self.edges().map(|e| {
            e.iter().map(|&v| perm[v as usize]).collect::<Vec<_>>()
        }))
    }

    /// A copy with extra edges; edges already present are ignored.
    pub fn with_edges<I, E>(&self, extra: I) -> Result<Hypergraph, HypergraphError>
    where
        I: IntoIterator<Item = E>,
        E: AsRef<[Vertex]>,
    {
        let mut rows: Vec<Vec<Vertex>> = self.edges().map(<[Vertex]>::to_vec).collect();
        for e in extra {
            let mut row = e.as_ref().to_vec();
            row.sort_unstable();
            rows.push(row);
        }
        rows.sort_unstable();
        rows.dedup();
        Self::new(self.r, self.n, rows)
    }
}

impl Clone for Hypergraph {
    fn clone(&self) -> Self {
        Self::from_parts(self.r, self.n, self.edges.clone())
    }
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r && self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Hypergraph {}

impl fmt::Debug for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Hypergraph")
            .field("r", &self.r)
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Small named hypergraphs used across tests and examples.
pub mod fixtures {
    use super::Hypergraph;

    /// The Fano plane as a 3-graph on 7 vertices.
    pub fn fano() -> Hypergraph {
        Hypergraph::new(
            3,
            7,
            [
                [0, 1, 2],
                [0, 3, 4],
                [0, 5, 6],
                [1, 3, 5],
                [1, 4, 6],
                [2, 3, 6],
                [2, 4, 5],
            ],
        )
        .expect("fano plane is well formed")
    }
}
