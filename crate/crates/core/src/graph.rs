//! Temporal networks and assembly of their space-time operators.
//!
//! A [`TemporalNetwork`] is a sequence of `T` weighted undirected graph
//! slices over a common vertex universe `0..N`, plus a coupling that says how
//! consecutive copies of a vertex are tied together in time. Two assemblies
//! are provided:
//!
//! - [`build_multiplex_adjacency`]: every vertex is present in every slice and
//!   the temporal coupling is an arbitrary weighted graph on the slice index
//!   set, applied identically to each vertex (a Kronecker-product structure).
//! - [`build_nonmultiplex_adjacency`]: vertices may enter and leave; a copy of
//!   a vertex exists only in slices that contain it, and unit-weight temporal
//!   edges join consecutive copies of the same vertex.
//!
//! Temporal weights are scaled by `a^2`, where `a` is the diffusion strength
//! balancing spatial against temporal connectivity.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::supra::{Entry, MatrixKind, Part, SupraMatrix, DROP_TOL};

/// One graph slice: which vertices are present and the edges among them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// Sorted, duplicate-free list of present vertices (0-based).
    pub present: Vec<usize>,
    /// Undirected edges `(x, y, w)` with `x < y`, both present, `w > 0`,
    /// sorted lexicographically, at most one entry per pair.
    pub edges: Vec<(usize, usize, f64)>,
}

/// How consecutive copies of a vertex are coupled in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TemporalCoupling {
    /// Path graph on slices: slice t is joined to slice t+1 with weight 1.
    Chain,
    /// Arbitrary weighted undirected graph on the slice set: edges
    /// `(t, s, w)` with `t < s` (0-based slice indices), `w > 0`.
    Graph(Vec<(usize, usize, f64)>),
}

/// A sequence of graph slices over a common vertex universe.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalNetwork {
    n: usize,
    layers: Vec<Layer>,
    temporal: TemporalCoupling,
}

impl TemporalNetwork {
    /// Validates and builds a temporal network.
    ///
    /// Rules enforced here:
    /// - at least one slice, vertex universe nonempty,
    /// - presence lists sorted, duplicate-free, within `0..n`, nonempty,
    /// - edges between present vertices only, no self-loops, positive weight,
    /// - a general temporal coupling graph must live on `0..T` with `t != s`.
    ///
    /// Edge weights below the global drop tolerance are removed.
    pub fn new(n: usize, layers: Vec<Layer>, temporal: TemporalCoupling) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("vertex universe must be nonempty"));
        }
        if layers.is_empty() {
            return Err(Error::invalid("network must have at least one slice"));
        }
        let t_count = layers.len();
        let mut norm_layers = Vec::with_capacity(t_count);
        for (t, layer) in layers.into_iter().enumerate() {
            if layer.present.is_empty() {
                return Err(Error::invalid(format!("slice {} has no vertices", t + 1)));
            }
            for w in layer.present.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::invalid(format!(
                        "slice {} presence list is not sorted and duplicate-free",
                        t + 1
                    )));
                }
            }
            if *layer.present.last().unwrap() >= n {
                return Err(Error::invalid(format!(
                    "slice {} lists vertex {} outside universe of size {n}",
                    t + 1,
                    layer.present.last().unwrap()
                )));
            }
            let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for &(x, y, w) in &layer.edges {
                if x == y {
                    return Err(Error::invalid(format!(
                        "slice {} has a self-loop at vertex {x}",
                        t + 1
                    )));
                }
                let (x, y) = if x < y { (x, y) } else { (y, x) };
                if layer.present.binary_search(&x).is_err()
                    || layer.present.binary_search(&y).is_err()
                {
                    return Err(Error::invalid(format!(
                        "slice {} edge ({x}, {y}) touches an absent vertex",
                        t + 1
                    )));
                }
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::invalid(format!(
                        "slice {} edge ({x}, {y}) has invalid weight {w}",
                        t + 1
                    )));
                }
                if edges.insert((x, y), w).is_some() {
                    return Err(Error::invalid(format!(
                        "slice {} repeats edge ({x}, {y})",
                        t + 1
                    )));
                }
            }
            let edges = edges
                .into_iter()
                .filter(|&(_, w)| w >= DROP_TOL)
                .map(|((x, y), w)| (x, y, w))
                .collect();
            norm_layers.push(Layer {
                present: layer.present,
                edges,
            });
        }
        let temporal = match temporal {
            TemporalCoupling::Chain => TemporalCoupling::Chain,
            TemporalCoupling::Graph(list) => {
                let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
                for &(t, s, w) in &list {
                    if t == s {
                        return Err(Error::invalid(format!(
                            "temporal coupling has a self-loop at slice {}",
                            t + 1
                        )));
                    }
                    let (t, s) = if t < s { (t, s) } else { (s, t) };
                    if s >= t_count {
                        return Err(Error::invalid(format!(
                            "temporal coupling edge ({}, {}) outside {} slices",
                            t + 1,
                            s + 1,
                            t_count
                        )));
                    }
                    if !w.is_finite() || w < 0.0 {
                        return Err(Error::invalid(format!(
                            "temporal coupling edge ({}, {}) has invalid weight {w}",
                            t + 1,
                            s + 1
                        )));
                    }
                    if edges.insert((t, s), w).is_some() {
                        return Err(Error::invalid(format!(
                            "temporal coupling repeats edge ({}, {})",
                            t + 1,
                            s + 1
                        )));
                    }
                }
                let list = edges
                    .into_iter()
                    .filter(|&(_, w)| w >= DROP_TOL)
                    .map(|((t, s), w)| (t, s, w))
                    .collect();
                TemporalCoupling::Graph(list)
            }
        };
        Ok(TemporalNetwork {
            n,
            layers: norm_layers,
            temporal,
        })
    }

    /// Convenience constructor: fully-present slices given by edge lists,
    /// chain temporal coupling.
    pub fn fully_present(n: usize, slice_edges: Vec<Vec<(usize, usize, f64)>>) -> Result<Self> {
        let layers = slice_edges
            .into_iter()
            .map(|edges| Layer {
                present: (0..n).collect(),
                edges,
            })
            .collect();
        TemporalNetwork::new(n, layers, TemporalCoupling::Chain)
    }

    /// Size of the vertex universe.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of slices.
    pub fn t_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer(&self, t: usize) -> &Layer {
        &self.layers[t]
    }

    pub fn temporal(&self) -> &TemporalCoupling {
        &self.temporal
    }

    /// True when every vertex is present in every slice.
    pub fn is_fully_present(&self) -> bool {
        self.layers.iter().all(|l| l.present.len() == self.n)
    }

    pub fn is_present(&self, t: usize, x: usize) -> bool {
        self.layers[t].present.binary_search(&x).is_ok()
    }

    /// Dense symmetric matrix of the temporal coupling on the slice set,
    /// with the chain expanded to its path-graph form.
    pub fn temporal_matrix(&self) -> DMatrix<f64> {
        let t_count = self.t_count();
        let mut w = DMatrix::zeros(t_count, t_count);
        match &self.temporal {
            TemporalCoupling::Chain => {
                for t in 0..t_count.saturating_sub(1) {
                    w[(t, t + 1)] = 1.0;
                    w[(t + 1, t)] = 1.0;
                }
            }
            TemporalCoupling::Graph(edges) => {
                for &(t, s, v) in edges {
                    w[(t, s)] = v;
                    w[(s, t)] = v;
                }
            }
        }
        w
    }

    /// Index map for the fully-present (multiplex) frame.
    pub fn multiplex_index_map(&self) -> Result<SpacetimeIndexMap> {
        if !self.is_fully_present() {
            return Err(Error::invalid(
                "multiplex frame requires every vertex present in every slice",
            ));
        }
        Ok(SpacetimeIndexMap::Multiplex {
            n: self.n,
            t_count: self.t_count(),
        })
    }

    /// Index map over present copies only, slices concatenated in order and
    /// each slice ordered by vertex id.
    pub fn nonmultiplex_index_map(&self) -> SpacetimeIndexMap {
        let mut offsets = Vec::with_capacity(self.t_count() + 1);
        let mut acc = 0usize;
        for layer in &self.layers {
            offsets.push(acc);
            acc += layer.present.len();
        }
        offsets.push(acc);
        SpacetimeIndexMap::Sparse {
            offsets,
            present: self.layers.iter().map(|l| l.present.clone()).collect(),
        }
    }
}

/// Bijection between space-time coordinates `(t, x)` and flat indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpacetimeIndexMap {
    /// Fully-present frame: `flat = t * n + x`.
    Multiplex { n: usize, t_count: usize },
    /// Present-copies frame: slices concatenated, each sorted by vertex id.
    Sparse {
        offsets: Vec<usize>,
        present: Vec<Vec<usize>>,
    },
}

impl SpacetimeIndexMap {
    /// Total number of space-time vertices.
    pub fn len(&self) -> usize {
        match self {
            SpacetimeIndexMap::Multiplex { n, t_count } => n * t_count,
            SpacetimeIndexMap::Sparse { offsets, .. } => *offsets.last().unwrap(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn t_count(&self) -> usize {
        match self {
            SpacetimeIndexMap::Multiplex { t_count, .. } => *t_count,
            SpacetimeIndexMap::Sparse { present, .. } => present.len(),
        }
    }

    /// Flat index of the copy of vertex `x` in slice `t`, if present.
    pub fn to_flat(&self, t: usize, x: usize) -> Option<usize> {
        match self {
            SpacetimeIndexMap::Multiplex { n, t_count } => {
                (t < *t_count && x < *n).then(|| t * n + x)
            }
            SpacetimeIndexMap::Sparse { offsets, present } => {
                let slice = present.get(t)?;
                slice.binary_search(&x).ok().map(|r| offsets[t] + r)
            }
        }
    }

    /// Space-time coordinates of a flat index.
    pub fn from_flat(&self, i: usize) -> (usize, usize) {
        match self {
            SpacetimeIndexMap::Multiplex { n, t_count } => {
                assert!(i < n * t_count, "flat index out of range");
                (i / n, i % n)
            }
            SpacetimeIndexMap::Sparse { offsets, present } => {
                assert!(i < *offsets.last().unwrap(), "flat index out of range");
                let t = offsets.partition_point(|&o| o <= i) - 1;
                (t, present[t][i - offsets[t]])
            }
        }
    }

    /// Flat index range `[start, end)` of slice `t`.
    pub fn slice_range(&self, t: usize) -> std::ops::Range<usize> {
        match self {
            SpacetimeIndexMap::Multiplex { n, .. } => t * n..(t + 1) * n,
            SpacetimeIndexMap::Sparse { offsets, .. } => offsets[t]..offsets[t + 1],
        }
    }
}

/// Supra-adjacency for a fully-present network: the block-diagonal of slice
/// adjacencies plus `a^2` times the temporal coupling applied vertex-wise.
pub fn build_multiplex_adjacency(net: &TemporalNetwork, a: f64) -> Result<SupraMatrix> {
    if !net.is_fully_present() {
        return Err(Error::invalid(
            "multiplex assembly requires every vertex present in every slice",
        ));
    }
    if !a.is_finite() || a < 0.0 {
        return Err(Error::invalid(format!(
            "diffusion strength must be finite and nonnegative, got {a}"
        )));
    }
    let n = net.n();
    let t_count = net.t_count();
    let mut raw = Vec::new();
    for (t, layer) in net.layers().iter().enumerate() {
        let base = t * n;
        for &(x, y, w) in &layer.edges {
            raw.push(Entry {
                row: base + x,
                col: base + y,
                part: Part::Spatial,
                value: w,
            });
        }
    }
    let wp = net.temporal_matrix();
    for t in 0..t_count {
        for s in (t + 1)..t_count {
            let w = wp[(t, s)];
            if w == 0.0 {
                continue;
            }
            for x in 0..n {
                raw.push(Entry {
                    row: t * n + x,
                    col: s * n + x,
                    part: Part::Temporal,
                    value: a * a * w,
                });
            }
        }
    }
    SupraMatrix::new(n * t_count, MatrixKind::Adjacency, a, raw)
}

/// Supra-adjacency over present copies only: slice adjacencies on the
/// concatenated frame plus unit-weight temporal edges (scaled by `a^2`)
/// between consecutive copies of each vertex.
///
/// Requires the chain temporal coupling; on a fully-present network the
/// result coincides with [`build_multiplex_adjacency`] under the chain.
pub fn build_nonmultiplex_adjacency(net: &TemporalNetwork, a: f64) -> Result<SupraMatrix> {
    if !a.is_finite() || a < 0.0 {
        return Err(Error::invalid(format!(
            "diffusion strength must be finite and nonnegative, got {a}"
        )));
    }
    if !matches!(net.temporal(), TemporalCoupling::Chain) {
        return Err(Error::invalid(
            "present-copies assembly supports only the chain temporal coupling",
        ));
    }
    let map = net.nonmultiplex_index_map();
    let mut raw = Vec::new();
    for (t, layer) in net.layers().iter().enumerate() {
        for &(x, y, w) in &layer.edges {
            raw.push(Entry {
                row: map.to_flat(t, x).unwrap(),
                col: map.to_flat(t, y).unwrap(),
                part: Part::Spatial,
                value: w,
            });
        }
    }
    for t in 0..net.t_count().saturating_sub(1) {
        for &x in &net.layer(t).present {
            if let Some(j) = map.to_flat(t + 1, x) {
                raw.push(Entry {
                    row: map.to_flat(t, x).unwrap(),
                    col: j,
                    part: Part::Temporal,
                    value: a * a,
                });
            }
        }
    }
    SupraMatrix::new(map.len(), MatrixKind::Adjacency, a, raw)
}

/// Graph Laplacian `L = D - W` of a supra-adjacency, or its normalised form
/// `I - D^{-1/2} W D^{-1/2}`.
///
/// Off-diagonal entries inherit the part tag of the underlying edge; diagonal
/// entries are tagged by the parts contributing to that vertex degree
/// (`Mixed` when both do, and always `Mixed` for every normalised diagonal).
/// The normalised form requires every degree to be strictly positive.
pub fn assemble_laplacian(w: &SupraMatrix, normalised: bool) -> Result<SupraMatrix> {
    if w.kind() != MatrixKind::Adjacency {
        return Err(Error::invalid("laplacian assembly expects an adjacency matrix"));
    }
    let n = w.dim();
    let deg = w.row_sums();
    let deg_sp = w.row_sums_part(Part::Spatial);
    let deg_tmp = w.row_sums_part(Part::Temporal);
    let mut raw = Vec::new();
    if normalised {
        for (i, &d) in deg.iter().enumerate() {
            if d <= 0.0 {
                return Err(Error::invalid(format!(
                    "normalised laplacian requires positive degree, vertex {i} has {d}"
                )));
            }
        }
        let inv_sqrt: Vec<f64> = deg.iter().map(|&d| 1.0 / d.sqrt()).collect();
        for i in 0..n {
            raw.push(Entry {
                row: i,
                col: i,
                part: Part::Mixed,
                value: 1.0,
            });
        }
        for e in w.entries() {
            raw.push(Entry {
                row: e.row,
                col: e.col,
                part: e.part,
                value: -e.value * inv_sqrt[e.row] * inv_sqrt[e.col],
            });
        }
        SupraMatrix::new(n, MatrixKind::NormalisedLaplacian, w.a(), raw)
    } else {
        for i in 0..n {
            let (sp, tp) = (deg_sp[i], deg_tmp[i]);
            let part = if sp > 0.0 && tp > 0.0 {
                Part::Mixed
            } else if tp > 0.0 {
                Part::Temporal
            } else {
                Part::Spatial
            };
            if sp > 0.0 && tp > 0.0 {
                // Split the diagonal by origin so part-restricted quadratic
                // forms reproduce the spatial and temporal Laplacians exactly.
                raw.push(Entry {
                    row: i,
                    col: i,
                    part: Part::Spatial,
                    value: sp,
                });
                raw.push(Entry {
                    row: i,
                    col: i,
                    part: Part::Temporal,
                    value: tp,
                });
            } else if sp > 0.0 || tp > 0.0 {
                raw.push(Entry {
                    row: i,
                    col: i,
                    part,
                    value: sp + tp,
                });
            }
        }
        for e in w.entries() {
            raw.push(Entry {
                row: e.row,
                col: e.col,
                part: e.part,
                value: -e.value,
            });
        }
        SupraMatrix::new(n, MatrixKind::Laplacian, w.a(), raw)
    }
}

/// Time-averaged spatial adjacency `(1/T) * sum_t W_t` on the vertex
/// universe. Requires a fully-present network.
pub fn average_spatial_adjacency(net: &TemporalNetwork) -> Result<DMatrix<f64>> {
    if !net.is_fully_present() {
        return Err(Error::invalid(
            "time-averaged adjacency requires every vertex present in every slice",
        ));
    }
    let n = net.n();
    let t_count = net.t_count() as f64;
    let mut w = DMatrix::zeros(n, n);
    for layer in net.layers() {
        for &(x, y, v) in &layer.edges {
            w[(x, y)] += v / t_count;
            w[(y, x)] += v / t_count;
        }
    }
    Ok(w)
}

/// Laplacian of the time-averaged spatial adjacency.
pub fn dynamic_laplacian(net: &TemporalNetwork) -> Result<SupraMatrix> {
    let w = average_spatial_adjacency(net)?;
    let n = net.n();
    let mut raw = Vec::new();
    for x in 0..n {
        let d: f64 = w.row(x).sum();
        if d.abs() >= DROP_TOL {
            raw.push(Entry {
                row: x,
                col: x,
                part: Part::Spatial,
                value: d,
            });
        }
        for y in (x + 1)..n {
            if w[(x, y)].abs() >= DROP_TOL {
                raw.push(Entry {
                    row: x,
                    col: y,
                    part: Part::Spatial,
                    value: -w[(x, y)],
                });
            }
        }
    }
    SupraMatrix::new(n, MatrixKind::Laplacian, 0.0, raw)
}

/// Degrees of a space-time vertex set split by origin.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeData {
    /// Full weighted degree in the supra-adjacency (includes `a^2` scaling).
    pub total: Vec<f64>,
    /// Spatial contribution (intra-slice edges).
    pub spatial: Vec<f64>,
    /// Temporal contribution at unit scaling, i.e. the coupling degree before
    /// multiplying by `a^2`.
    pub temporal_unit: Vec<f64>,
    /// Diffusion strength used for the identity
    /// `total = spatial + a^2 * temporal_unit`.
    pub a: f64,
}

impl DegreeData {
    /// Sum of full degrees over a set of flat indices.
    pub fn volume(&self, set: &[usize]) -> f64 {
        set.iter().map(|&i| self.total[i]).sum()
    }
}

/// Computes split degrees for an assembled supra-adjacency.
pub fn degrees(w: &SupraMatrix) -> Result<DegreeData> {
    if w.kind() != MatrixKind::Adjacency {
        return Err(Error::invalid("degree computation expects an adjacency matrix"));
    }
    let a = w.a();
    let total = w.row_sums();
    let spatial = w.row_sums_part(Part::Spatial);
    let tmp = w.row_sums_part(Part::Temporal);
    let temporal_unit = if a > 0.0 {
        tmp.iter().map(|&v| v / (a * a)).collect()
    } else {
        // At a = 0 the scaled rows are all zero; the unit coupling degree is
        // still well defined but not recoverable from the matrix alone.
        tmp
    };
    Ok(DegreeData {
        total,
        spatial,
        temporal_unit,
        a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Two vertices, two slices: slice 1 has edge weight 1, slice 2 weight 2.
    fn two_by_two() -> TemporalNetwork {
        TemporalNetwork::fully_present(2, vec![vec![(0, 1, 1.0)], vec![(0, 1, 2.0)]]).unwrap()
    }

    #[test]
    fn multiplex_assembly_matches_hand_computation() {
        let net = two_by_two();
        let w = build_multiplex_adjacency(&net, 1.0).unwrap();
        let expect = [
            [0.0, 1.0, 1.0, 0.0],
            [1.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 2.0],
            [0.0, 1.0, 2.0, 0.0],
        ];
        let dense = w.to_dense();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(dense[(i, j)], expect[i][j], epsilon = 1e-15);
            }
        }
        let deg = degrees(&w).unwrap();
        assert_eq!(deg.total, vec![2.0, 2.0, 3.0, 3.0]);
        assert_eq!(deg.spatial, vec![1.0, 1.0, 2.0, 2.0]);
        assert_eq!(deg.temporal_unit, vec![1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn laplacian_matches_hand_computation() {
        let net = two_by_two();
        let w = build_multiplex_adjacency(&net, 1.0).unwrap();
        let l = assemble_laplacian(&w, false).unwrap();
        let expect = [
            [2.0, -1.0, -1.0, 0.0],
            [-1.0, 2.0, 0.0, -1.0],
            [-1.0, 0.0, 3.0, -2.0],
            [0.0, -1.0, -2.0, 3.0],
        ];
        let dense = l.to_dense();
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(dense[(i, j)], expect[i][j], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn part_restricted_forms_recover_spatial_and_temporal_laplacians() {
        let net = two_by_two();
        let a = 1.7;
        let w = build_multiplex_adjacency(&net, a).unwrap();
        let l = assemble_laplacian(&w, false).unwrap();
        let x: [f64; 4] = [0.3, -1.2, 0.8, 2.1];
        // Spatial form: sum over slice edges of w * (difference)^2.
        let spatial_expect = 1.0 * (x[0] - x[1]).powi(2) + 2.0 * (x[2] - x[3]).powi(2);
        // Temporal form at unit scale: differences along each vertex line.
        let temporal_unit = (x[0] - x[2]).powi(2) + (x[1] - x[3]).powi(2);
        assert_abs_diff_eq!(
            l.quad_form_part(Part::Spatial, &x),
            spatial_expect,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            l.quad_form_part(Part::Temporal, &x),
            a * a * temporal_unit,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            l.quad_form(&x),
            spatial_expect + a * a * temporal_unit,
            epsilon = 1e-12
        );
    }

    #[test]
    fn laplacian_annihilates_constants() {
        let net = two_by_two();
        let w = build_multiplex_adjacency(&net, 2.5).unwrap();
        let l = assemble_laplacian(&w, false).unwrap();
        let ones = vec![1.0; 4];
        for v in l.matvec(&ones) {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalised_laplacian_diagonal_is_unit() {
        let net = two_by_two();
        let w = build_multiplex_adjacency(&net, 1.0).unwrap();
        let l = assemble_laplacian(&w, true).unwrap();
        let dense = l.to_dense();
        for i in 0..4 {
            assert_abs_diff_eq!(dense[(i, i)], 1.0, epsilon = 1e-15);
        }
        // d^{1/2} is in the kernel of the normalised laplacian.
        let deg = degrees(&w).unwrap();
        let root: Vec<f64> = deg.total.iter().map(|d| d.sqrt()).collect();
        for v in l.matvec(&root) {
            assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn average_adjacency_and_dynamic_laplacian() {
        let net = two_by_two();
        let wavg = average_spatial_adjacency(&net).unwrap();
        assert_abs_diff_eq!(wavg[(0, 1)], 1.5, epsilon = 1e-15);
        let ld = dynamic_laplacian(&net).unwrap();
        let dense = ld.to_dense();
        assert_abs_diff_eq!(dense[(0, 0)], 1.5, epsilon = 1e-15);
        assert_abs_diff_eq!(dense[(0, 1)], -1.5, epsilon = 1e-15);
        // Eigenvalues of [[1.5, -1.5], [-1.5, 1.5]] are 0 and 3.
        let eig = nalgebra::SymmetricEigen::new(dense);
        let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(vals[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn multiplex_index_map_is_slice_major() {
        let net = two_by_two();
        let map = net.multiplex_index_map().unwrap();
        assert_eq!(map.to_flat(0, 0), Some(0));
        assert_eq!(map.to_flat(0, 1), Some(1));
        assert_eq!(map.to_flat(1, 0), Some(2));
        assert_eq!(map.from_flat(3), (1, 1));
        assert_eq!(map.slice_range(1), 2..4);
    }

    fn partial_network() -> TemporalNetwork {
        // Universe {0,1,2}; vertex 2 absent in the middle slice.
        TemporalNetwork::new(
            3,
            vec![
                Layer {
                    present: vec![0, 1, 2],
                    edges: vec![(0, 1, 1.0), (1, 2, 1.0)],
                },
                Layer {
                    present: vec![0, 1],
                    edges: vec![(0, 1, 2.0)],
                },
                Layer {
                    present: vec![0, 1, 2],
                    edges: vec![(0, 2, 1.0)],
                },
            ],
            TemporalCoupling::Chain,
        )
        .unwrap()
    }

    #[test]
    fn sparse_index_map_round_trips() {
        let net = partial_network();
        let map = net.nonmultiplex_index_map();
        assert_eq!(map.len(), 8);
        for i in 0..map.len() {
            let (t, x) = map.from_flat(i);
            assert_eq!(map.to_flat(t, x), Some(i));
        }
        assert_eq!(map.to_flat(1, 2), None);
        assert_eq!(map.slice_range(1), 3..5);
    }

    #[test]
    fn present_copy_assembly_skips_absent_vertices() {
        let net = partial_network();
        let a = 2.0;
        let w = build_nonmultiplex_adjacency(&net, a).unwrap();
        let map = net.nonmultiplex_index_map();
        // Vertex 2 is absent at t=1, so no temporal edge crosses it in either
        // direction; vertices 0 and 1 each get both temporal links.
        let f = |t: usize, x: usize| map.to_flat(t, x).unwrap();
        assert_abs_diff_eq!(w.get(f(0, 0), f(1, 0)), a * a, epsilon = 1e-15);
        assert_abs_diff_eq!(w.get(f(1, 1), f(2, 1)), a * a, epsilon = 1e-15);
        assert_eq!(w.get(f(0, 2), f(2, 2)), 0.0);
        let deg = degrees(&w).unwrap();
        assert_eq!(deg.temporal_unit[f(0, 2)], 0.0);
        assert_eq!(deg.temporal_unit[f(1, 0)], 2.0);
        // total = spatial + a^2 * temporal at every copy.
        for i in 0..map.len() {
            assert_abs_diff_eq!(
                deg.total[i],
                deg.spatial[i] + a * a * deg.temporal_unit[i],
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn fully_present_input_makes_both_assemblies_agree() {
        let net = two_by_two();
        let a = 1.3;
        let wm = build_multiplex_adjacency(&net, a).unwrap();
        let wn = build_nonmultiplex_adjacency(&net, a).unwrap();
        assert_eq!(wm.to_dense(), wn.to_dense());
    }

    #[test]
    fn at_zero_strength_slices_decouple() {
        let net = two_by_two();
        let w = build_multiplex_adjacency(&net, 0.0).unwrap();
        let deg = degrees(&w).unwrap();
        assert_eq!(deg.total, deg.spatial);
        assert_eq!(w.row_sums_part(Part::Temporal), vec![0.0; 4]);
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        // Edge touching an absent vertex.
        assert!(TemporalNetwork::new(
            3,
            vec![Layer {
                present: vec![0, 1],
                edges: vec![(0, 2, 1.0)],
            }],
            TemporalCoupling::Chain,
        )
        .is_err());
        // Self-loop.
        assert!(TemporalNetwork::fully_present(2, vec![vec![(1, 1, 1.0)]]).is_err());
        // Negative weight.
        assert!(TemporalNetwork::fully_present(2, vec![vec![(0, 1, -1.0)]]).is_err());
        // Unsorted presence.
        assert!(TemporalNetwork::new(
            3,
            vec![Layer {
                present: vec![1, 0],
                edges: vec![],
            }],
            TemporalCoupling::Chain,
        )
        .is_err());
        // Temporal edge outside slice range.
        assert!(TemporalNetwork::new(
            2,
            vec![
                Layer {
                    present: vec![0, 1],
                    edges: vec![],
                },
                Layer {
                    present: vec![0, 1],
                    edges: vec![],
                },
            ],
            TemporalCoupling::Graph(vec![(0, 2, 1.0)]),
        )
        .is_err());
    }

    #[test]
    fn general_temporal_coupling_is_applied_vertexwise() {
        let net = TemporalNetwork::new(
            2,
            vec![
                Layer {
                    present: vec![0, 1],
                    edges: vec![(0, 1, 1.0)],
                },
                Layer {
                    present: vec![0, 1],
                    edges: vec![],
                },
                Layer {
                    present: vec![0, 1],
                    edges: vec![],
                },
            ],
            TemporalCoupling::Graph(vec![(0, 1, 1.0), (0, 2, 0.5)]),
        )
        .unwrap();
        let a = 3.0;
        let w = build_multiplex_adjacency(&net, a).unwrap();
        assert_abs_diff_eq!(w.get(0, 2), a * a, epsilon = 1e-15);
        assert_abs_diff_eq!(w.get(0, 4), 0.5 * a * a, epsilon = 1e-15);
        assert_abs_diff_eq!(w.get(1, 5), 0.5 * a * a, epsilon = 1e-15);
        // Slices 1 and 2 are not coupled: no temporal edge between them.
        assert_eq!(w.get(2, 4), 0.0);
    }
}
