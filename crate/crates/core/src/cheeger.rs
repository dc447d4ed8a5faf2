//! Cut values, Cheeger ratios, exact small-instance optima, and checks of
//! the spectral bounds that relate cut quality to Laplacian eigenvalues.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::assemble_laplacian;
use crate::spectral::{smallest_eigenpairs, EigenSet, DEFAULT_EIG_TOL};
use crate::supra::{MatrixKind, SupraMatrix};

/// Largest vertex count accepted by the exhaustive optimiser.
pub const BRUTE_FORCE_LIMIT: usize = 12;

/// Disjoint spacetime vertex subsets plus the unclustered remainder.
///
/// Vertices are flat supra indices in `0..n`. Elements are nonempty, sorted,
/// and pairwise disjoint; `omega` is the complement of their union, so the
/// three parts always tile `0..n` exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    elements: Vec<Vec<usize>>,
    omega: Vec<usize>,
    n: usize,
}

impl Packing {
    /// Builds a packing from its clustered elements; the remainder becomes Ω.
    pub fn new(elements: Vec<Vec<usize>>, n: usize) -> Result<Self> {
        let mut seen = vec![false; n];
        let mut sorted_elements = Vec::with_capacity(elements.len());
        for (k, el) in elements.into_iter().enumerate() {
            if el.is_empty() {
                return Err(Error::invalid(format!("packing element {k} is empty")));
            }
            let mut el = el;
            el.sort_unstable();
            el.dedup();
            for &i in &el {
                if i >= n {
                    return Err(Error::invalid(format!(
                        "packing element {k} references vertex {i} outside 0..{n}"
                    )));
                }
                if seen[i] {
                    return Err(Error::invalid(format!(
                        "vertex {i} appears in more than one packing element"
                    )));
                }
                seen[i] = true;
            }
            sorted_elements.push(el);
        }
        let omega = (0..n).filter(|&i| !seen[i]).collect();
        Ok(Self {
            elements: sorted_elements,
            omega,
            n,
        })
    }

    /// Builds a packing from explicit elements and remainder, which must
    /// tile `0..n` exactly.
    pub fn with_omega(elements: Vec<Vec<usize>>, omega: Vec<usize>, n: usize) -> Result<Self> {
        let p = Self::new(elements, n)?;
        let mut given = omega;
        given.sort_unstable();
        given.dedup();
        if given != p.omega {
            return Err(Error::invalid(
                "remainder set does not equal the complement of the packing elements",
            ));
        }
        Ok(p)
    }

    pub fn k(&self) -> usize {
        self.elements.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    /// True when every vertex belongs to some element (Ω empty).
    pub fn is_fully_clustered(&self) -> bool {
        self.omega.is_empty()
    }

    /// Per-vertex element index; `None` marks Ω.
    pub fn assignment(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n];
        for (k, el) in self.elements.iter().enumerate() {
            for &i in el {
                out[i] = Some(k);
            }
        }
        out
    }
}

fn require_adjacency(w: &SupraMatrix) -> Result<()> {
    if w.kind() != MatrixKind::Adjacency {
        return Err(Error::invalid(
            "cut computations need an adjacency matrix, not a Laplacian",
        ));
    }
    Ok(())
}

fn membership(x: &[usize], n: usize) -> Result<Vec<bool>> {
    let mut in_x = vec![false; n];
    for &i in x {
        if i >= n {
            return Err(Error::invalid(format!("vertex {i} outside 0..{n}")));
        }
        in_x[i] = true;
    }
    Ok(in_x)
}

/// Total weight of edges with exactly one endpoint in `x`.
pub fn cut_value(x: &[usize], w: &SupraMatrix) -> Result<f64> {
    require_adjacency(w)?;
    let in_x = membership(x, w.dim())?;
    let mut sigma = 0.0;
    for e in w.entries() {
        if in_x[e.row] != in_x[e.col] {
            sigma += e.value;
        }
    }
    Ok(sigma)
}

/// Cut mass of `x` divided by its vertex count (or by its volume when
/// `normalised` is set).
pub fn cheeger_ratio(x: &[usize], w: &SupraMatrix, normalised: bool) -> Result<f64> {
    require_adjacency(w)?;
    let in_x = membership(x, w.dim())?;
    let size = in_x.iter().filter(|&&b| b).count();
    if size == 0 {
        return Err(Error::invalid("cannot score an empty vertex set"));
    }
    let mut sigma = 0.0;
    for e in w.entries() {
        if in_x[e.row] != in_x[e.col] {
            sigma += e.value;
        }
    }
    if normalised {
        let degrees = w.row_sums();
        let vol: f64 = (0..w.dim()).filter(|&i| in_x[i]).map(|i| degrees[i]).sum();
        if vol <= 0.0 {
            return Err(Error::invalid("set has zero volume"));
        }
        Ok(sigma / vol)
    } else {
        Ok(sigma / size as f64)
    }
}

/// Worst element ratio of a packing. Ω is scored only when `include_omega`
/// is set (and nonempty); by default only the clustered elements count.
pub fn packing_score(
    p: &Packing,
    w: &SupraMatrix,
    normalised: bool,
    include_omega: bool,
) -> Result<f64> {
    if p.n() != w.dim() {
        return Err(Error::invalid(format!(
            "packing is over {} vertices but the matrix has {}",
            p.n(),
            w.dim()
        )));
    }
    if p.k() == 0 {
        return Err(Error::invalid("cannot score a packing with no elements"));
    }
    let mut best = 0.0f64;
    for el in p.elements() {
        best = best.max(cheeger_ratio(el, w, normalised)?);
    }
    if include_omega && !p.omega().is_empty() {
        best = best.max(cheeger_ratio(p.omega(), w, normalised)?);
    }
    Ok(best)
}

/// Per-element ratios in element order, with Ω's ratio appended when
/// requested and nonempty.
pub fn element_ratios(
    p: &Packing,
    w: &SupraMatrix,
    normalised: bool,
    include_omega: bool,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(p.k() + 1);
    for el in p.elements() {
        out.push(cheeger_ratio(el, w, normalised)?);
    }
    if include_omega && !p.omega().is_empty() {
        out.push(cheeger_ratio(p.omega(), w, normalised)?);
    }
    Ok(out)
}

/// True when labels 1..k each appear and first appearances come in
/// increasing label order (the canonical representative of each packing
/// under label permutation). Label 0 marks Ω and may appear anywhere.
fn is_canonical(labels: &[usize], k: usize) -> bool {
    let mut next = 1;
    for &l in labels {
        if l == 0 {
            continue;
        }
        if l > next {
            return false;
        }
        if l == next {
            next += 1;
        }
    }
    next == k + 1
}

fn evaluate_assignment(
    labels: &[usize],
    k: usize,
    w: &SupraMatrix,
    degrees: &[f64],
    normalised: bool,
) -> Option<f64> {
    let mut cuts = vec![0.0f64; k + 1];
    let mut sizes = vec![0usize; k + 1];
    let mut vols = vec![0.0f64; k + 1];
    for (i, &l) in labels.iter().enumerate() {
        sizes[l] += 1;
        vols[l] += degrees[i];
    }
    for e in w.entries() {
        let (lu, lv) = (labels[e.row], labels[e.col]);
        if lu != lv {
            cuts[lu] += e.value;
            cuts[lv] += e.value;
        }
    }
    let mut worst = 0.0f64;
    for c in 1..=k {
        let ratio = if cuts[c] == 0.0 {
            if normalised && vols[c] <= 0.0 {
                // Zero-volume sets have an undefined normalised ratio;
                // packings containing one are not feasible candidates.
                return None;
            }
            0.0
        } else if normalised {
            cuts[c] / vols[c]
        } else {
            cuts[c] / sizes[c] as f64
        };
        worst = worst.max(ratio);
    }
    Some(worst)
}

/// Exact minimiser of the worst element ratio over all packings with `k`
/// nonempty elements, by exhaustive enumeration. Returns the optimum value
/// and the first optimal packing in lexicographic assignment order.
pub fn brute_force_cheeger(
    w: &SupraMatrix,
    k: usize,
    normalised: bool,
) -> Result<(f64, Packing)> {
    require_adjacency(w)?;
    let n = w.dim();
    if n == 0 {
        return Err(Error::invalid("empty graph"));
    }
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::invalid(format!(
            "exhaustive search is capped at {BRUTE_FORCE_LIMIT} vertices, got {n}"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "element count {k} must lie in 1..={n}"
        )));
    }
    let degrees = w.row_sums();
    let mut labels = vec![0usize; n];
    let mut best_val = f64::INFINITY;
    let mut best_labels: Option<Vec<usize>> = None;
    'outer: loop {
        if is_canonical(&labels, k) {
            if let Some(val) = evaluate_assignment(&labels, k, w, &degrees, normalised) {
                if val < best_val {
                    best_val = val;
                    best_labels = Some(labels.clone());
                }
            }
        }
        // Advance the base-(k+1) odometer; index 0 is most significant, so
        // this walks assignments in lexicographic order.
        let mut pos = n;
        while pos > 0 {
            pos -= 1;
            if labels[pos] < k {
                labels[pos] += 1;
                for l in &mut labels[pos + 1..] {
                    *l = 0;
                }
                continue 'outer;
            }
        }
        break;
    }
    let labels = best_labels
        .ok_or_else(|| Error::invalid("no feasible packing (zero-volume sets everywhere)"))?;
    let mut elements = vec![Vec::new(); k];
    for (i, &l) in labels.iter().enumerate() {
        if l > 0 {
            elements[l - 1].push(i);
        }
    }
    Ok((best_val, Packing::new(elements, n)?))
}

/// One informational entry of the multi-element bound table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KwayEntry {
    pub k: usize,
    pub h_k: f64,
    pub lambda_k: Option<f64>,
}

/// Outcome of comparing exhaustive cut optima against eigenvalue bounds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheegerReport {
    /// Second eigenvalue of the combinatorial Laplacian.
    pub lambda2: f64,
    /// Second eigenvalue of the degree-normalised Laplacian.
    pub lambda2_norm: f64,
    /// Exact two-element optimum, count-normalised.
    pub h2: f64,
    /// Exact two-element optimum, volume-normalised.
    pub h2_norm: f64,
    pub max_degree: f64,
    /// Upper bound `sqrt(2·λ₂·d_max)` on `h2`.
    pub bound_h2: f64,
    /// Upper bound `sqrt(2·λ̄₂)` on `h2_norm`.
    pub bound_h2_norm: f64,
    pub h2_within_bound: bool,
    pub h2_norm_within_bound: bool,
    /// Whether the lower bound `λ̄₂/2 ≤ h̄₂` also holds.
    pub lower_norm_holds: bool,
    pub h2_slack: f64,
    pub h2_norm_slack: f64,
    /// Exact optima for more elements, reported without a bound check
    /// (the matching spectral bound has an unknown constant). Filled only
    /// on very small graphs.
    pub kway: Vec<KwayEntry>,
}

/// Checks the two-element eigenvalue bounds exactly on a small graph.
///
/// `es` must hold at least the two smallest eigenpairs of the combinatorial
/// Laplacian assembled from `w`; the normalised eigenvalue is computed
/// internally. Three-or-more-element optima are reported informationally
/// when the graph has at most 8 vertices.
pub fn check_cheeger_inequalities(es: &EigenSet, w: &SupraMatrix) -> Result<CheegerReport> {
    require_adjacency(w)?;
    let n = w.dim();
    if es.dim() != n {
        return Err(Error::invalid(format!(
            "eigenpairs are over {} vertices but the matrix has {n}",
            es.dim()
        )));
    }
    if es.k() < 2 {
        return Err(Error::invalid("need at least two eigenpairs"));
    }
    let lambda2 = es.values[1];
    let l_norm = assemble_laplacian(w, true)?;
    let norm_es = smallest_eigenpairs(&l_norm, 2, DEFAULT_EIG_TOL)?;
    let lambda2_norm = norm_es.values[1];

    let (h2, _) = brute_force_cheeger(w, 2, false)?;
    let (h2_norm, _) = brute_force_cheeger(w, 2, true)?;
    let max_degree = w.row_sums().into_iter().fold(0.0f64, f64::max);

    let bound_h2 = (2.0 * lambda2.max(0.0) * max_degree).sqrt();
    let bound_h2_norm = (2.0 * lambda2_norm.max(0.0)).sqrt();
    let h2_slack = bound_h2 - h2;
    let h2_norm_slack = bound_h2_norm - h2_norm;

    let mut kway = Vec::new();
    if n <= 8 {
        for k in 3..=4usize.min(n) {
            let (h_k, _) = brute_force_cheeger(w, k, false)?;
            kway.push(KwayEntry {
                k,
                h_k,
                lambda_k: es.values.get(k - 1).copied(),
            });
        }
    }

    Ok(CheegerReport {
        lambda2,
        lambda2_norm,
        h2,
        h2_norm,
        max_degree,
        bound_h2,
        bound_h2_norm,
        h2_within_bound: h2_slack >= -1e-12,
        h2_norm_within_bound: h2_norm_slack >= -1e-12,
        lower_norm_holds: lambda2_norm / 2.0 <= h2_norm + 1e-12,
        h2_slack,
        h2_norm_slack,
        kway,
    })
}
