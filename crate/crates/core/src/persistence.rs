//! Vietoris–Rips filtrations and persistent homology over Z₂ in degrees 0 and 1.
//!
//! A simplex enters the filtration at the largest pairwise distance among its
//! vertices. Simplices are totally ordered by `(value, dimension, vertex tuple)`.
//! Triangles are never materialized during reduction: the coboundary of an
//! edge is generated on demand from the distance matrix.
//!
//! Degree-1 pairs are computed by reducing the coboundary matrix (edges in
//! reverse filtration order), skipping edges that already kill a connected
//! component. That produces the same pairing as the left-to-right reduction
//! of the boundary matrix, at a small fraction of the work.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use crate::embedding::PointCloud;
use crate::{Error, Result, Scalar};

fn cmp_values<T: Scalar>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Dense symmetric matrix of pairwise Euclidean distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Wraps a row-major `n × n` matrix after checking symmetry, a zero
    /// diagonal and non-negative finite entries.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (index, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    index,
                    expected: n,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        for i in 0..n {
            if data[i * n + i] != T::zero() {
                return Err(Error::InvalidParameter(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = data[i * n + j];
                if !v.is_finite() || v < T::zero() || v != data[j * n + i] {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) is not a valid symmetric distance"
                    )));
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn diameter(&self) -> T {
        self.data.iter().copied().fold(T::zero(), T::max)
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).map(<[T]>::to_vec).collect()
    }
}

/// Euclidean distances between every pair of points.
pub fn pairwise_distances<T: Scalar>(cloud: &PointCloud<T>) -> Result<DistanceMatrix<T>> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::InsufficientObservations { needed: 2, got: n });
    }
    let mut data = vec![T::zero(); n * n];
    for i in 0..n {
        let p = cloud.point(i);
        for j in (i + 1)..n {
            let q = cloud.point(j);
            let d = p
                .iter()
                .zip(q)
                .map(|(&a, &b)| (a - b) * (a - b))
                .sum::<T>()
                .sqrt();
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    if let Some(index) = data.iter().position(|d| !d.is_finite()) {
        return Err(Error::NonFinite { index: index / n });
    }
    Ok(DistanceMatrix { n, data })
}

/// A simplex of dimension ≤ 2 with its filtration value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Simplex<T> {
    pub dimension: usize,
    vertices: [usize; 3],
    pub value: T,
}

impl<T: Scalar> Simplex<T> {
    pub fn vertices(&self) -> &[usize] {
        &self.vertices[..=self.dimension]
    }

    /// The filtration order: value, then dimension, then vertex tuple.
    pub fn filtration_cmp(&self, other: &Self) -> Ordering {
        cmp_values(self.value, other.value)
            .then(self.dimension.cmp(&other.dimension))
            .then_with(|| self.vertices().cmp(other.vertices()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Edge<T> {
    value: T,
    a: u32,
    b: u32,
}

/// Rips filtration up to dimension 2, truncated at `max_scale`.
///
/// Vertices and edges are stored; triangles are implied by the distance
/// matrix and enumerated on demand.
#[derive(Debug, Clone)]
pub struct FiltrationComplex<T> {
    distances: DistanceMatrix<T>,
    max_scale: T,
    /// Edges with value ≤ `max_scale`, in filtration order.
    edges: Vec<Edge<T>>,
}

/// Builds the Rips filtration of `distances` up to `max_scale` (inclusive).
pub fn build_rips<T: Scalar>(distances: &DistanceMatrix<T>, max_scale: T) -> Result<FiltrationComplex<T>> {
    if !(max_scale > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "max_scale must be positive, got {max_scale}"
        )));
    }
    let n = distances.len();
    if n > u32::MAX as usize {
        return Err(Error::InvalidParameter("too many points".into()));
    }
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            let value = distances.get(a, b);
            if value <= max_scale {
                edges.push(Edge {
                    value,
                    a: a as u32,
                    b: b as u32,
                });
            }
        }
    }
    edges.sort_by(|x, y| cmp_values(x.value, y.value).then((x.a, x.b).cmp(&(y.a, y.b))));
    Ok(FiltrationComplex {
        distances: distances.clone(),
        max_scale,
        edges,
    })
}

impl<T: Scalar> FiltrationComplex<T> {
    pub fn max_scale(&self) -> T {
        self.max_scale
    }

    pub fn vertex_count(&self) -> usize {
        self.distances.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    fn triangle_value(&self, a: usize, b: usize, c: usize) -> T {
        let d = &self.distances;
        d.get(a, b).max(d.get(a, c)).max(d.get(b, c))
    }

    pub fn triangle_count(&self) -> usize {
        let n = self.vertex_count();
        let mut count = 0;
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    if self.triangle_value(a, b, c) <= self.max_scale {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    pub fn simplex_count(&self) -> usize {
        self.vertex_count() + self.edge_count() + self.triangle_count()
    }

    /// Every simplex in filtration order. Allocates `O(n³)`; intended for
    /// inspection and small complexes.
    pub fn simplices(&self) -> Vec<Simplex<T>> {
        let n = self.vertex_count();
        let mut out: Vec<Simplex<T>> = (0..n)
            .map(|v| Simplex {
                dimension: 0,
                vertices: [v, 0, 0],
                value: T::zero(),
            })
            .collect();
        out.extend(self.edges.iter().map(|e| Simplex {
            dimension: 1,
            vertices: [e.a as usize, e.b as usize, 0],
            value: e.value,
        }));
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    let value = self.triangle_value(a, b, c);
                    if value <= self.max_scale {
                        out.push(Simplex {
                            dimension: 2,
                            vertices: [a, b, c],
                            value,
                        });
                    }
                }
            }
        }
        out.sort_by(Simplex::filtration_cmp);
        out
    }

    /// Marks edges that merge two connected components (the H₀ deaths).
    fn component_merging_edges(&self) -> Vec<bool> {
        let mut uf = UnionFind::new(self.vertex_count());
        self.edges
            .iter()
            .map(|e| uf.union(e.a as usize, e.b as usize))
            .collect()
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            Ordering::Less => self.parent[ra] = rb,
            Ordering::Greater => self.parent[rb] = ra,
            Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// One birth–death pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PersistencePair<T> {
    pub birth: T,
    pub death: T,
    /// The class never died below the filtration's maximum scale; `death`
    /// holds that scale instead.
    pub capped: bool,
}

impl<T: Scalar> PersistencePair<T> {
    pub fn new(birth: T, death: T) -> Self {
        Self {
            birth,
            death,
            capped: false,
        }
    }

    pub fn persistence(&self) -> T {
        self.death - self.birth
    }
}

/// Multiset of off-diagonal birth–death pairs in one homology degree, sorted
/// by birth then death.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PersistenceDiagram<T> {
    pub degree: usize,
    pairs: Vec<PersistencePair<T>>,
}

impl<T: Scalar> PersistenceDiagram<T> {
    /// Builds a diagram, discarding pairs on the diagonal. Pairs with
    /// `death < birth` or a NaN coordinate are rejected.
    pub fn new(degree: usize, pairs: Vec<PersistencePair<T>>) -> Result<Self> {
        if let Some(p) = pairs.iter().find(|p| !(p.death >= p.birth)) {
            return Err(Error::InvalidParameter(format!(
                "pair ({}, {}) dies before it is born",
                p.birth, p.death
            )));
        }
        let mut pairs: Vec<_> = pairs.into_iter().filter(|p| p.death > p.birth).collect();
        pairs.sort_by(|x, y| cmp_values(x.birth, y.birth).then(cmp_values(x.death, y.death)));
        Ok(Self { degree, pairs })
    }

    pub fn empty(degree: usize) -> Self {
        Self {
            degree,
            pairs: Vec::new(),
        }
    }

    pub fn from_pairs(degree: usize, pairs: &[(T, T)]) -> Result<Self> {
        Self::new(
            degree,
            pairs.iter().map(|&(b, d)| PersistencePair::new(b, d)).collect(),
        )
    }

    pub fn pairs(&self) -> &[PersistencePair<T>] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn capped_count(&self) -> usize {
        self.pairs.iter().filter(|p| p.capped).count()
    }

    pub fn has_infinite_death(&self) -> bool {
        self.pairs.iter().any(|p| p.death.is_infinite())
    }

    pub fn as_tuples(&self) -> Vec<(T, T)> {
        self.pairs.iter().map(|p| (p.birth, p.death)).collect()
    }

    /// `birth<TAB>death` lines, one pair per line, in diagram order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for p in &self.pairs {
            let _ = writeln!(out, "{}\t{}", p.birth, p.death);
        }
        out
    }

    pub fn from_tsv(degree: usize, text: &str) -> Result<Self> {
        let pairs = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, line)| {
                let mut fields = line.split('\t');
                let mut next = || {
                    fields
                        .next()
                        .and_then(|f| f.trim().parse::<f64>().ok())
                        .and_then(T::from_f64)
                        .ok_or_else(|| Error::InvalidParameter(format!("malformed diagram line {}", i + 1)))
                };
                Ok(PersistencePair::new(next()?, next()?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(degree, pairs)
    }
}

/// Degree-0 diagram. Every component is born at 0; the component that never
/// merges is capped at the maximum scale.
pub fn reduce_h0<T: Scalar>(complex: &FiltrationComplex<T>) -> PersistenceDiagram<T> {
    let merging = complex.component_merging_edges();
    let mut pairs: Vec<_> = complex
        .edges
        .iter()
        .zip(&merging)
        .filter(|(_, &m)| m)
        .map(|(e, _)| PersistencePair::new(T::zero(), e.value))
        .collect();
    let components = complex.vertex_count() - pairs.len();
    pairs.extend((0..components).map(|_| PersistencePair {
        birth: T::zero(),
        death: complex.max_scale,
        capped: true,
    }));
    PersistenceDiagram::new(0, pairs).expect("deaths are non-negative")
}

#[derive(Debug, Clone, Copy)]
struct Cofacet<T> {
    value: T,
    vertices: [u32; 3],
}

impl<T: Scalar> Cofacet<T> {
    #[inline]
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_values(self.value, other.value).then_with(|| self.vertices.cmp(&other.vertices))
    }
}

/// Colexicographic rank of a sorted triple; a dense index for pivot lookup.
#[inline]
fn triple_rank(v: [u32; 3]) -> usize {
    let (a, b, c) = (v[0] as usize, v[1] as usize, v[2] as usize);
    c * c.saturating_sub(1) * c.saturating_sub(2) / 6 + b * b.saturating_sub(1) / 2 + a
}

fn symmetric_difference<T: Scalar>(x: &[Cofacet<T>], y: &[Cofacet<T>]) -> Vec<Cofacet<T>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        match x[i].cmp(&y[j]) {
            Ordering::Less => {
                out.push(x[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(y[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    out
}

/// Degree-1 persistence diagram of the filtration.
///
/// Classes still alive at `max_scale` are reported with that death and
/// flagged as capped. Zero-persistence pairs are dropped.
pub fn reduce_h1<T: Scalar>(complex: &FiltrationComplex<T>) -> PersistenceDiagram<T> {
    let n = complex.vertex_count();
    let merging = complex.component_merging_edges();
    let dist = &complex.distances;

    const NONE: u32 = u32::MAX;
    let rank_space = if n >= 3 {
        triple_rank([n as u32 - 3, n as u32 - 2, n as u32 - 1]) + 1
    } else {
        0
    };
    let mut pivot_owner = vec![NONE; rank_space];
    let mut reduced: Vec<Vec<Cofacet<T>>> = Vec::new();
    let mut pairs = Vec::new();
    let mut column = Vec::with_capacity(n);

    for (edge, _) in complex.edges.iter().zip(&merging).rev().filter(|(_, &m)| !m) {
        let (a, b) = (edge.a as usize, edge.b as usize);
        column.clear();
        for v in 0..n {
            if v == a || v == b {
                continue;
            }
            let value = edge.value.max(dist.get(a, v)).max(dist.get(b, v));
            if value <= complex.max_scale {
                let mut vertices = [edge.a, edge.b, v as u32];
                vertices.sort_unstable();
                column.push(Cofacet { value, vertices });
            }
        }
        column.sort_unstable_by(Cofacet::cmp);

        let mut col = std::mem::take(&mut column);
        loop {
            let Some(pivot) = col.first().copied() else {
                pairs.push(PersistencePair {
                    birth: edge.value,
                    death: complex.max_scale,
                    capped: true,
                });
                break;
            };
            let slot = &mut pivot_owner[triple_rank(pivot.vertices)];
            if *slot == NONE {
                *slot = reduced.len() as u32;
                pairs.push(PersistencePair::new(edge.value, pivot.value));
                reduced.push(col);
                col = Vec::with_capacity(n);
                break;
            }
            col = symmetric_difference(&col, &reduced[*slot as usize]);
        }
        column = col;
    }
    PersistenceDiagram::new(1, pairs).expect("deaths never precede births")
}

/// Degree-1 diagram of a point cloud, filtered up to its diameter so that
/// every class dies at a finite scale.
pub fn diagram_for_cloud<T: Scalar>(cloud: &PointCloud<T>) -> Result<PersistenceDiagram<T>> {
    if cloud.len() < 3 {
        return Err(Error::InsufficientObservations {
            needed: 3,
            got: cloud.len(),
        });
    }
    let dist = pairwise_distances(cloud)?;
    let diameter = dist.diameter();
    if diameter == T::zero() {
        return Ok(PersistenceDiagram::empty(1));
    }
    let complex = build_rips(&dist, diameter)?;
    let diagram = reduce_h1(&complex);
    if diagram.capped_count() > 0 {
        log::warn!(
            "{} degree-1 classes survived to the cloud diameter",
            diagram.capped_count()
        );
    }
    Ok(diagram)
}
