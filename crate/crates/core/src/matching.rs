//! Linking per-slice partitions into spacetime clusters.
//!
//! Clusters found independently on each time slice carry arbitrary labels.
//! To turn them into spacetime clusters, adjacent slices are matched by
//! solving a restricted maximum-weight edge cover on the bipartite graph of
//! slice-t clusters versus slice-(t+1) clusters: every cluster on the larger
//! side picks exactly one partner, every cluster on the smaller side is
//! covered at least once. A sweep over all slice pairs then flows labels
//! forward, merging and splitting as the cover dictates.

use nalgebra::DMatrix;

use crate::cheeger::Packing;
use crate::error::{Error, Result};
use crate::graph::TemporalNetwork;

/// Bipartite instance for one adjacent slice pair: entry `(i, j)` is the
/// negated temporal mass shared by cluster `i` at time `t` and cluster `j`
/// at time `t+1` (nonpositive for real slice pairs).
#[derive(Debug, Clone)]
pub struct CoverInstance {
    pub c: DMatrix<f64>,
    pub row_ids: Vec<usize>,
    pub col_ids: Vec<usize>,
}

/// A solved cover: selected `(row, col)` edges in the original orientation
/// plus the objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverSolution {
    pub edges: Vec<(usize, usize)>,
    pub value: f64,
}

fn validate_weights(c: &DMatrix<f64>) -> Result<()> {
    if c.nrows() == 0 || c.ncols() == 0 {
        return Err(Error::invalid("cover instance must have rows and columns"));
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("cover weights must be finite"));
    }
    Ok(())
}

/// Minimum-cost assignment of each column to a distinct row via shortest
/// augmenting paths with potentials. Requires `nrows ≥ ncols`; returns the
/// assigned row per column.
fn min_cost_assignment(cost: &DMatrix<f64>) -> Vec<usize> {
    let r = cost.nrows();
    let c = cost.ncols();
    debug_assert!(r >= c && c > 0);
    // 1-based arrays; index 0 is the virtual start of each augmenting path.
    let mut u = vec![0.0f64; c + 1];
    let mut v = vec![0.0f64; r + 1];
    let mut matched = vec![0usize; r + 1];
    let mut way = vec![0usize; r + 1];
    for col in 1..=c {
        matched[0] = col;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; r + 1];
        let mut used = vec![false; r + 1];
        loop {
            used[j0] = true;
            let i0 = matched[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=r {
                if !used[j] {
                    let cur = cost[(j - 1, i0 - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=r {
                if used[j] {
                    u[matched[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched[j0] = matched[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_for_col = vec![usize::MAX; c];
    for j in 1..=r {
        if matched[j] != 0 {
            row_for_col[matched[j] - 1] = j - 1;
        }
    }
    row_for_col
}

/// Index of the row's best column, lowest index on ties.
fn row_best_column(c: &DMatrix<f64>, i: usize) -> usize {
    let mut best = 0usize;
    let mut best_val = c[(i, 0)];
    for j in 1..c.ncols() {
        if c[(i, j)] > best_val {
            best_val = c[(i, j)];
            best = j;
        }
    }
    best
}

/// Solves the cover on a matrix already oriented with `nrows ≥ ncols`.
fn solve_oriented(c: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let (r, n) = c.shape();
    // Reduction to an assignment problem: every column designates one
    // distinct row, paying that row's drop from its best column; all other
    // rows keep their best column. Designating a row that already sits on
    // the column costs nothing, so forcing every column to designate a row
    // loses no value.
    let mut cost = DMatrix::zeros(r, n);
    let mut rowmax = vec![0.0f64; r];
    for i in 0..r {
        rowmax[i] = c[(i, row_best_column(c, i))];
        for j in 0..n {
            cost[(i, j)] = rowmax[i] - c[(i, j)];
        }
    }
    let row_for_col = min_cost_assignment(&cost);
    let mut chosen_col = vec![usize::MAX; r];
    for (j, &i) in row_for_col.iter().enumerate() {
        chosen_col[i] = j;
    }
    let mut edges = Vec::with_capacity(r);
    for (i, &col) in chosen_col.iter().enumerate() {
        let j = if col != usize::MAX {
            col
        } else {
            row_best_column(c, i)
        };
        edges.push((i, j));
    }
    edges
}

/// Restricted maximum-weight edge cover: maximises `Σ C_ij·A_ij` subject to
/// exactly one selected edge per cluster on the larger side and at least one
/// per cluster on the smaller side. Orientation is handled internally; the
/// returned edges are in the input's row/column orientation.
pub fn rmwec(c: &DMatrix<f64>) -> Result<CoverSolution> {
    validate_weights(c)?;
    let transpose = c.nrows() < c.ncols();
    let oriented = if transpose { c.transpose() } else { c.clone() };
    let mut edges = solve_oriented(&oriented);
    if transpose {
        for e in &mut edges {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    let value = edges.iter().map(|&(i, j)| c[(i, j)]).sum();
    Ok(CoverSolution { edges, value })
}

/// Reference optimiser by exhaustive enumeration, for verifying [`rmwec`].
/// Feasible only at very small sizes (the larger side is capped at 8).
pub fn rmwec_exhaustive(c: &DMatrix<f64>) -> Result<CoverSolution> {
    validate_weights(c)?;
    let transpose = c.nrows() < c.ncols();
    let oriented = if transpose { c.transpose() } else { c.clone() };
    let (r, n) = oriented.shape();
    if r > 8 {
        return Err(Error::invalid(format!(
            "exhaustive cover search capped at 8 rows, got {r}"
        )));
    }
    let mut choice = vec![0usize; r];
    let mut best: Option<(f64, Vec<usize>)> = None;
    'outer: loop {
        let mut covered = vec![false; n];
        let mut total = 0.0;
        for (i, &j) in choice.iter().enumerate() {
            covered[j] = true;
            total += oriented[(i, j)];
        }
        if covered.iter().all(|&b| b) && best.as_ref().map_or(true, |(v, _)| total > *v) {
            best = Some((total, choice.clone()));
        }
        let mut pos = r;
        while pos > 0 {
            pos -= 1;
            if choice[pos] + 1 < n {
                choice[pos] += 1;
                for c in &mut choice[pos + 1..] {
                    *c = 0;
                }
                continue 'outer;
            }
        }
        break;
    }
    let (_, choice) = best.ok_or_else(|| Error::invalid("no feasible cover"))?;
    let mut edges: Vec<(usize, usize)> = choice.into_iter().enumerate().collect();
    if transpose {
        for e in &mut edges {
            *e = (e.1, e.0);
        }
    }
    edges.sort_unstable();
    let value = edges.iter().map(|&(i, j)| c[(i, j)]).sum();
    Ok(CoverSolution { edges, value })
}

/// One slice's clusters, optionally marking which cluster holds the
/// unclustered vertices so it can be restored to Ω after linking.
#[derive(Debug, Clone)]
pub struct SlicePartition {
    pub clusters: Vec<Vec<usize>>,
    pub omega: Option<usize>,
}

impl SlicePartition {
    pub fn new(clusters: Vec<Vec<usize>>) -> Self {
        Self {
            clusters,
            omega: None,
        }
    }
}

/// Result of linking per-slice partitions across time.
#[derive(Debug, Clone)]
pub struct LinkedPacking {
    /// Spacetime packing over flat supra indices; Ω collects the vertices
    /// of labels whose every slice-component was an unclustered group.
    pub packing: Packing,
    /// `slice_labels[t][c]` is the packing element holding cluster `c` of
    /// slice `t`, or `None` if that cluster was restored to Ω.
    pub slice_labels: Vec<Vec<Option<usize>>>,
}

fn validate_slice_partition(part: &SlicePartition, present: &[usize], t: usize) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    for (c, cluster) in part.clusters.iter().enumerate() {
        if cluster.is_empty() {
            return Err(Error::invalid(format!(
                "slice {t} cluster {c} is empty"
            )));
        }
        for &x in cluster {
            if !seen.insert(x) {
                return Err(Error::invalid(format!(
                    "slice {t} assigns vertex {x} to more than one cluster"
                )));
            }
        }
    }
    let present_set: std::collections::BTreeSet<usize> = present.iter().copied().collect();
    if seen != present_set {
        return Err(Error::invalid(format!(
            "slice {t} clusters do not partition its present vertex set"
        )));
    }
    if let Some(o) = part.omega {
        if o >= part.clusters.len() {
            return Err(Error::invalid(format!(
                "slice {t} marks cluster {o} as unclustered but has only {} clusters",
                part.clusters.len()
            )));
        }
    }
    Ok(())
}

/// Shared temporal mass between the clusters of two adjacent slices,
/// negated: `C[i][j] = −a²·w′(t,t+1)·(vertices in both clusters present at
/// both times)`.
pub fn slice_cut_matrix(
    pt: &SlicePartition,
    pt1: &SlicePartition,
    net: &TemporalNetwork,
    a: f64,
    t: usize,
) -> Result<CoverInstance> {
    if t + 1 >= net.t_count() {
        return Err(Error::invalid(format!(
            "slice pair ({t},{}) out of range for {} slices",
            t + 1,
            net.t_count()
        )));
    }
    validate_slice_partition(pt, &net.layer(t).present, t)?;
    validate_slice_partition(pt1, &net.layer(t + 1).present, t + 1)?;
    let coupling = net.temporal_matrix()[(t, t + 1)];
    let mut cluster_at_t1 = vec![usize::MAX; net.n()];
    for (j, cluster) in pt1.clusters.iter().enumerate() {
        for &x in cluster {
            cluster_at_t1[x] = j;
        }
    }
    let mut c = DMatrix::zeros(pt.clusters.len(), pt1.clusters.len());
    for (i, cluster) in pt.clusters.iter().enumerate() {
        for &x in cluster {
            let j = cluster_at_t1[x];
            if j != usize::MAX {
                c[(i, j)] -= a * a * coupling;
            }
        }
    }
    Ok(CoverInstance {
        row_ids: (0..pt.clusters.len()).collect(),
        col_ids: (0..pt1.clusters.len()).collect(),
        c,
    })
}

/// Links per-slice partitions into one spacetime packing by sweeping the
/// minimum-weight cover (equivalently, the maximum shared temporal mass)
/// across each adjacent slice pair and flowing labels along its edges.
///
/// Merges keep the label of the strongest incoming link; splits keep the
/// parent label on the strongest outgoing link and give other children the
/// lowest dormant label (a fresh one if none is dormant), so the total
/// label count is `max_t K_t`. A label whose every slice-component was an
/// unclustered group is restored to Ω at the end.
pub fn link_partitions(
    parts: &[SlicePartition],
    net: &TemporalNetwork,
    a: f64,
) -> Result<LinkedPacking> {
    if parts.len() != net.t_count() {
        return Err(Error::invalid(format!(
            "got {} slice partitions for {} slices",
            parts.len(),
            net.t_count()
        )));
    }
    for (t, part) in parts.iter().enumerate() {
        validate_slice_partition(part, &net.layer(t).present, t)?;
        if part.clusters.is_empty() && !net.layer(t).present.is_empty() {
            return Err(Error::invalid(format!("slice {t} has no clusters")));
        }
    }

    let t_count = net.t_count();
    let mut slice_labels: Vec<Vec<usize>> = Vec::with_capacity(t_count);
    slice_labels.push((0..parts[0].clusters.len()).collect());
    let mut allocated = parts[0].clusters.len();
    let mut dormant = std::collections::BTreeSet::new();

    for t in 0..t_count.saturating_sub(1) {
        let inst = slice_cut_matrix(&parts[t], &parts[t + 1], net, a, t)?;
        // Shared-mass matrix: the minimum-weight cover of the negated cut
        // matrix is the maximum-weight cover of this one.
        let strength = -inst.c.clone();
        let kt = parts[t].clusters.len();
        let kt1 = parts[t + 1].clusters.len();
        let prev = slice_labels[t].clone();
        let mut next = vec![usize::MAX; kt1];
        if kt1 <= kt {
            let sol = rmwec(&strength)?;
            // Each slice-t cluster points at exactly one successor; each
            // successor keeps the label of its strongest incoming edge.
            let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); kt1];
            for &(i, j) in &sol.edges {
                incoming[j].push(i);
            }
            for (j, rows) in incoming.iter().enumerate() {
                let mut carrier = rows[0];
                for &i in &rows[1..] {
                    let better = strength[(i, j)] > strength[(carrier, j)]
                        || (strength[(i, j)] == strength[(carrier, j)]
                            && prev[i] < prev[carrier]);
                    if better {
                        carrier = i;
                    }
                }
                next[j] = prev[carrier];
                for &i in rows {
                    if i != carrier {
                        dormant.insert(prev[i]);
                    }
                }
            }
        } else {
            // More clusters ahead than behind: match in reversed time, so
            // each successor picks exactly one parent and parents split.
            let sol = rmwec(&strength.transpose())?;
            let mut children: Vec<Vec<usize>> = vec![Vec::new(); kt];
            for &(j, i) in &sol.edges {
                children[i].push(j);
            }
            for (i, kids) in children.iter().enumerate() {
                let mut carrier = kids[0];
                for &j in &kids[1..] {
                    if strength[(i, j)] > strength[(i, carrier)] {
                        carrier = j;
                    }
                }
                next[carrier] = prev[i];
                for &j in kids {
                    if j != carrier {
                        let label = if let Some(&d) = dormant.iter().next() {
                            dormant.remove(&d);
                            d
                        } else {
                            allocated += 1;
                            allocated - 1
                        };
                        next[j] = label;
                    }
                }
            }
        }
        debug_assert!(next.iter().all(|&l| l != usize::MAX));
        slice_labels.push(next);
    }

    // Labels whose every slice-component is an unclustered group go to Ω.
    let mut label_is_omega = vec![true; allocated];
    for (t, labels) in slice_labels.iter().enumerate() {
        for (c, &l) in labels.iter().enumerate() {
            if parts[t].omega != Some(c) {
                label_is_omega[l] = false;
            }
        }
    }
    let mut final_index = vec![None; allocated];
    let mut kept = 0usize;
    for l in 0..allocated {
        if !label_is_omega[l] {
            final_index[l] = Some(kept);
            kept += 1;
        }
    }

    let map = net.nonmultiplex_index_map();
    let mut elements: Vec<Vec<usize>> = vec![Vec::new(); kept];
    for (t, labels) in slice_labels.iter().enumerate() {
        for (c, &l) in labels.iter().enumerate() {
            if let Some(k) = final_index[l] {
                for &x in &parts[t].clusters[c] {
                    let flat = map.to_flat(t, x).expect("validated present vertex");
                    elements[k].push(flat);
                }
            }
        }
    }
    let packing = Packing::new(elements, map.len())?;
    let out_labels = slice_labels
        .iter()
        .map(|labels| labels.iter().map(|&l| final_index[l]).collect())
        .collect();
    Ok(LinkedPacking {
        packing,
        slice_labels: out_labels,
    })
}
