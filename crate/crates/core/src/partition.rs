//! End-to-end spectral partitioning of temporal networks.
//!
//! The pipeline assembles the strength-weighted space-time operator, picks
//! the balance strength, harvests spatial eigenvectors, rotates them into
//! sparse indicator columns, filters columns that carry no cluster
//! information, and assembles the surviving supports into a [`Packing`].
//! A second entry point handles networks whose vertices appear and
//! disappear over time. Transitions between consecutive slices of a packing
//! (splits, merges, appearances, disappearances) are classified separately.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cheeger::{cut_value, Packing};
use crate::error::{Error, Result};
use crate::graph::{
    build_multiplex_adjacency, build_nonmultiplex_adjacency, assemble_laplacian, SpacetimeIndexMap,
    TemporalCoupling, TemporalNetwork,
};
use crate::seba::seba;
use crate::spectral::{
    classify_multiplex, critical_a_multiplex, critical_a_nonmultiplex,
    identify_spatial_nonmultiplex, scale_aware_tol, smallest_eigenpairs, Label,
    DEFAULT_BISECT_TOL, DEFAULT_BRACKET, DEFAULT_EIG_TOL, DEFAULT_TAU_CLS, DEFAULT_TAU_TEMP,
};
use crate::supra::SupraMatrix;

/// Knobs for a partition run. `Default` gives the values used throughout the
/// test-suite; every field can be overridden independently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PartitionConfig {
    /// Fixed diffusion strength; `None` solves for the balance point.
    pub a_override: Option<f64>,
    /// Fixed eigenvector count; `None` selects automatically.
    pub r_override: Option<usize>,
    /// Sparsity penalty for the indicator rotation; `None` uses the
    /// dimension-based default.
    pub mu: Option<f64>,
    /// Residual tolerance for eigenpair extraction.
    pub eig_tol: f64,
    /// Initial bracket for the strength bisection.
    pub bracket: (f64, f64),
    /// Relative width at which the strength bisection stops.
    pub bisect_tol: f64,
    pub bisect_max_iter: usize,
    /// Slice-mean threshold separating spatial from temporal eigenvectors on
    /// fully-present networks.
    pub tau_cls: f64,
    /// Peak temporal-mode overlap below which an eigenvector of a
    /// present-copies assembly counts as spatial.
    pub tau_temp: f64,
    /// A column whose support cut ratio exceeds `kappa` times the median is
    /// rejected.
    pub kappa: f64,
    /// Relative within-slice variance below which a column counts as
    /// constant on a slice.
    pub fibre_tol: f64,
    /// Support threshold: entries must exceed this to count as clustered.
    /// Zero means strict positivity.
    pub theta: f64,
    /// Largest eigenvector count tried by the automatic selection.
    pub r_max: usize,
    /// Largest collection size considered when classifying transitions.
    pub jmax: usize,
    /// Append slice-norm companion columns on fully-present networks.
    /// Disabled only for controlled comparisons against the present-copies
    /// pipeline.
    pub use_companions: bool,
}

impl Default for PartitionConfig {
    fn default() -> Self {
        Self {
            a_override: None,
            r_override: None,
            mu: None,
            eig_tol: DEFAULT_EIG_TOL,
            bracket: DEFAULT_BRACKET,
            bisect_tol: DEFAULT_BISECT_TOL,
            bisect_max_iter: 60,
            tau_cls: DEFAULT_TAU_CLS,
            tau_temp: DEFAULT_TAU_TEMP,
            kappa: 3.0,
            fibre_tol: 1e-6,
            theta: 0.0,
            r_max: 6,
            jmax: 4,
            use_companions: true,
        }
    }
}

impl PartitionConfig {
    fn validate(&self) -> Result<()> {
        if let Some(a) = self.a_override {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::invalid("fixed strength must be finite and nonnegative"));
            }
        }
        if self.r_override == Some(0) {
            return Err(Error::invalid("fixed eigenvector count must be at least 1"));
        }
        if !(self.eig_tol > 0.0) {
            return Err(Error::invalid("eigenpair tolerance must be positive"));
        }
        let (lo, hi) = self.bracket;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::invalid("strength bracket must satisfy 0 < lo < hi"));
        }
        if !(self.bisect_tol > 0.0) {
            return Err(Error::invalid("bisection tolerance must be positive"));
        }
        if !(self.tau_cls > 0.0 && self.tau_cls < 1.0) {
            return Err(Error::invalid("classification threshold must lie in (0, 1)"));
        }
        if !(self.tau_temp > 0.0 && self.tau_temp < 1.0) {
            return Err(Error::invalid("temporal overlap threshold must lie in (0, 1)"));
        }
        if !(self.kappa >= 1.0) {
            return Err(Error::invalid("cut-ratio rejection factor must be at least 1"));
        }
        if !(self.fibre_tol > 0.0) {
            return Err(Error::invalid("slice-constancy tolerance must be positive"));
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return Err(Error::invalid("support threshold must be finite and nonnegative"));
        }
        if self.r_max == 0 {
            return Err(Error::invalid("eigenvector search range must be nonempty"));
        }
        if self.jmax == 0 {
            return Err(Error::invalid("transition collection bound must be at least 1"));
        }
        Ok(())
    }
}

/// Cut statistics of one indicator column's support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnScore {
    pub column: usize,
    pub support_size: usize,
    /// Total weight of edges leaving the support.
    pub cut: f64,
    /// Cut divided by support size; `None` for an empty support.
    pub ratio: Option<f64>,
}

/// Tables produced while choosing the eigenvector count and strength.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// All computed eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Per-eigenvalue origin labels.
    pub labels: Vec<Label>,
    /// Spatial eigenvalues, ascending, starting with the trivial one.
    pub spatial_values: Vec<f64>,
    /// `(R, gap)` where gap is the relative spectral gap above the `R`-th
    /// nontrivial spatial eigenvalue.
    pub relative_gaps: Vec<(usize, f64)>,
    /// `(R, mean cut ratio over that candidate's indicator supports)`.
    pub mean_ratios: Vec<(usize, f64)>,
    /// Count preferred by the spectral-gap criterion.
    pub r_from_gap: Option<usize>,
    /// Count minimising the mean cut ratio.
    pub r_from_ratio: Option<usize>,
    /// Peak temporal-mode overlap per computed eigenvector (present-copies
    /// pipeline only).
    pub temporal_overlaps: Option<Vec<f64>>,
    /// Per selected eigenvector, its norm restricted to each slice.
    pub slice_norms: Vec<Vec<f64>>,
    /// False when the strength was fixed by the caller.
    pub a_balanced: bool,
    pub warnings: Vec<String>,
}

/// Everything produced by one partitioning run.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionRun {
    /// Diffusion strength the operator was assembled with.
    pub a: f64,
    /// Number of nontrivial spatial eigenvectors used.
    pub r: usize,
    /// True for the fully-present pipeline.
    pub multiplex: bool,
    /// Flat-index layout of the space-time vertices the packing refers to.
    pub index_map: SpacetimeIndexMap,
    /// Orthonormal bundle that was rotated into indicator columns.
    pub seba_inputs: DMatrix<f64>,
    /// Nonnegative indicator columns, each rescaled to peak 1.
    pub seba_vectors: DMatrix<f64>,
    pub column_scores: Vec<ColumnScore>,
    /// Columns rejected as carrying no cluster information.
    pub spurious: Vec<usize>,
    pub packing: Packing,
    /// For each packing element, the indicator column it came from.
    pub element_sources: Vec<usize>,
    pub diagnostics: Diagnostics,
}

/// A packing element or the unclustered remainder, as an event participant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetId {
    Element(usize),
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransitionKind {
    Split,
    Merge,
    Appearance,
    Disappearance,
}

impl TransitionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TransitionKind::Split => "split",
            TransitionKind::Merge => "merge",
            TransitionKind::Appearance => "appearance",
            TransitionKind::Disappearance => "disappearance",
        }
    }
}

/// One structural change between slices `t` and `t+1` of a packing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionEvent {
    /// Earlier slice of the boundary the event sits on (0-based).
    pub t: usize,
    pub kind: TransitionKind,
    /// Size of the collection the actor's footprint maps onto.
    pub j: usize,
    /// The set whose slice-`t` footprint (slice `t+1` for merges and
    /// disappearances) drives the event.
    pub actor: SetId,
    /// The collection, sorted with the remainder last.
    pub targets: Vec<SetId>,
    /// True for a 2-split whose collection is the actor plus the remainder:
    /// the element lost vertices to the unclustered set.
    pub shrinking: bool,
}

/// Appends, for each input column, a column that is constant on every slice
/// with value equal to the input's norm on that slice; columns are
/// interleaved `[v_1, companion(v_1), v_2, companion(v_2), ...]`.
///
/// Companions restore cluster directions that orthogonality constraints
/// squeeze out of the eigenvector bundle: a space-time indicator can be a
/// combination of an eigenvector and slice-constant profiles.
pub fn companion_vectors(vectors: &DMatrix<f64>, n: usize, t_count: usize) -> Result<DMatrix<f64>> {
    if n == 0 || t_count == 0 {
        return Err(Error::invalid("companion frame must be nonempty"));
    }
    if vectors.nrows() != n * t_count {
        return Err(Error::invalid(format!(
            "vector length {} does not match {n} vertices x {t_count} slices",
            vectors.nrows()
        )));
    }
    let r = vectors.ncols();
    let mut out = DMatrix::zeros(n * t_count, 2 * r);
    for c in 0..r {
        out.set_column(2 * c, &vectors.column(c));
        for t in 0..t_count {
            let mut norm2 = 0.0;
            for x in 0..n {
                let v = vectors[(t * n + x, c)];
                norm2 += v * v;
            }
            let norm = norm2.sqrt();
            for x in 0..n {
                out[(t * n + x, 2 * c + 1)] = norm;
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis of the bundle's column span via a column-pivoted QR,
/// dropping directions whose pivot falls below `drop_tol` relative to the
/// leading one. Returns zero columns for a zero bundle.
fn orthonormalise_bundle(bundle: &DMatrix<f64>, drop_tol: f64) -> DMatrix<f64> {
    let kmax = bundle.nrows().min(bundle.ncols());
    if kmax == 0 {
        return DMatrix::zeros(bundle.nrows(), 0);
    }
    let qr = bundle.clone().col_piv_qr();
    let q = qr.q();
    let r = qr.r();
    let lead = r[(0, 0)].abs();
    if lead <= 0.0 {
        return DMatrix::zeros(bundle.nrows(), 0);
    }
    let mut rank = 0;
    for i in 0..kmax {
        if r[(i, i)].abs() >= drop_tol * lead {
            rank += 1;
        } else {
            break;
        }
    }
    q.columns(0, rank).into_owned()
}

/// Outcome of the automatic eigenvector-count selection.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    pub chosen: usize,
    pub relative_gaps: Vec<(usize, f64)>,
    pub r_from_gap: Option<usize>,
    pub r_from_ratio: Option<usize>,
}

/// Picks the eigenvector count from ascending spatial eigenvalues (trivial
/// first) and a table of `(count, mean cut ratio)` candidates.
///
/// The count minimising the mean ratio wins; when other candidates come
/// within 5% of that minimum, the one sitting just below the largest
/// relative spectral gap is preferred. With no usable gap (all gaps
/// vanish) the minimiser is returned directly.
pub fn select_r(spatial_values: &[f64], mean_ratios: &[(usize, f64)]) -> Result<SelectionOutcome> {
    if spatial_values.len() < 2 {
        return Err(Error::invalid(
            "count selection needs at least two spatial eigenvalues",
        ));
    }
    if mean_ratios.is_empty() {
        return Err(Error::invalid("count selection needs at least one candidate"));
    }
    let scale = spatial_values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let eps = 1e-12 * scale;

    let mut gaps = Vec::new();
    for &(r, _) in mean_ratios {
        if r >= 1 && r + 1 < spatial_values.len() {
            let g = (spatial_values[r + 1] - spatial_values[r]) / spatial_values[r].max(eps);
            gaps.push((r, g));
        }
    }
    let r_from_gap = gaps
        .iter()
        .fold(None::<(usize, f64)>, |best, &(r, g)| match best {
            Some((_, bg)) if g <= bg => best,
            _ => Some((r, g)),
        })
        .filter(|&(_, g)| g > 1e-12)
        .map(|(r, _)| r);

    let r_from_ratio = mean_ratios
        .iter()
        .filter(|(_, h)| h.is_finite())
        .fold(None::<(usize, f64)>, |best, &(r, h)| match best {
            Some((_, bh)) if h >= bh => best,
            _ => Some((r, h)),
        })
        .map(|(r, _)| r);

    let chosen = match (r_from_ratio, r_from_gap) {
        (None, None) => mean_ratios[0].0,
        (None, Some(g)) => g,
        (Some(m), None) => m,
        (Some(m), Some(g)) => {
            let hmin = mean_ratios.iter().find(|&&(r, _)| r == m).unwrap().1;
            let hgap = mean_ratios.iter().find(|&&(r, _)| r == g).map(|&(_, h)| h);
            match hgap {
                Some(h) if h.is_finite() && h <= 1.05 * hmin + 1e-15 => g,
                _ => m,
            }
        }
    };
    Ok(SelectionOutcome {
        chosen,
        relative_gaps: gaps,
        r_from_gap,
        r_from_ratio,
    })
}

/// Cut statistics for every column's support at threshold `theta`.
pub fn column_scores(s: &DMatrix<f64>, w: &SupraMatrix, theta: f64) -> Result<Vec<ColumnScore>> {
    if s.nrows() != w.dim() {
        return Err(Error::invalid(format!(
            "column length {} does not match operator dimension {}",
            s.nrows(),
            w.dim()
        )));
    }
    let mut out = Vec::with_capacity(s.ncols());
    for c in 0..s.ncols() {
        let support: Vec<usize> = (0..s.nrows()).filter(|&i| s[(i, c)] > theta).collect();
        if support.is_empty() {
            out.push(ColumnScore {
                column: c,
                support_size: 0,
                cut: 0.0,
                ratio: None,
            });
        } else {
            let cut = cut_value(&support, w)?;
            out.push(ColumnScore {
                column: c,
                support_size: support.len(),
                cut,
                ratio: Some(cut / support.len() as f64),
            });
        }
    }
    Ok(out)
}

fn median(mut xs: Vec<f64>) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    Some(if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    })
}

/// Flags indicator columns that carry no cluster information: those that
/// are (numerically) constant on every slice they touch, and those whose
/// support cut ratio exceeds `kappa` times the median ratio. Columns with
/// empty support are always flagged.
pub fn detect_spurious(
    s: &DMatrix<f64>,
    map: &SpacetimeIndexMap,
    scores: &[ColumnScore],
    kappa: f64,
    fibre_tol: f64,
    theta: f64,
) -> Result<Vec<usize>> {
    if s.nrows() != map.len() {
        return Err(Error::invalid(format!(
            "column length {} does not match index map size {}",
            s.nrows(),
            map.len()
        )));
    }
    if scores.len() != s.ncols() {
        return Err(Error::invalid("one score per column is required"));
    }
    let med = median(scores.iter().filter_map(|sc| sc.ratio).collect());
    let mut out = Vec::new();
    for c in 0..s.ncols() {
        if scores[c].support_size == 0 {
            out.push(c);
            continue;
        }
        let mut constant = true;
        for t in 0..map.t_count() {
            let range = map.slice_range(t);
            if !range.clone().any(|i| s[(i, c)] > theta) {
                continue;
            }
            let count = range.len() as f64;
            let mean = range.clone().map(|i| s[(i, c)]).sum::<f64>() / count;
            let var = range.clone().map(|i| (s[(i, c)] - mean).powi(2)).sum::<f64>() / count;
            if var > fibre_tol * mean * mean {
                constant = false;
                break;
            }
        }
        let ratio_flag = match (scores[c].ratio, med) {
            (Some(rt), Some(md)) => rt > kappa * md,
            _ => false,
        };
        if constant || ratio_flag {
            out.push(c);
        }
    }
    Ok(out)
}

/// Turns indicator columns into a packing: each row goes to the column with
/// the largest entry above `theta` (ties to the lowest column), rows with no
/// qualifying entry form the unclustered remainder, and columns that end up
/// owning nothing are dropped. Also returns, per element, the column it
/// came from.
pub fn assign_packing(s: &DMatrix<f64>, theta: f64) -> Result<(Packing, Vec<usize>)> {
    let (m, k) = s.shape();
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); k];
    for i in 0..m {
        let mut best: Option<(f64, usize)> = None;
        for c in 0..k {
            let v = s[(i, c)];
            if v > theta && best.map_or(true, |(bv, _)| v > bv) {
                best = Some((v, c));
            }
        }
        if let Some((_, c)) = best {
            buckets[c].push(i);
        }
    }
    let mut elements = Vec::new();
    let mut sources = Vec::new();
    for (c, b) in buckets.into_iter().enumerate() {
        if !b.is_empty() {
            elements.push(b);
            sources.push(c);
        }
    }
    Ok((Packing::new(elements, m)?, sources))
}

/// Per-slice norms of a flat vector under an index map.
fn slice_norm_table(v: &DVector<f64>, map: &SpacetimeIndexMap) -> Vec<f64> {
    (0..map.t_count())
        .map(|t| {
            map.slice_range(t)
                .map(|i| v[i] * v[i])
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// One candidate rotation: bundle construction, the sparse rotation itself,
/// and cut scores of the resulting supports.
struct CandidateOutcome {
    seba_input: DMatrix<f64>,
    columns: DMatrix<f64>,
    scores: Vec<ColumnScore>,
    mean_ratio: f64,
}

fn candidate_run(
    vectors: &[&DVector<f64>],
    companions: Option<(usize, usize)>,
    w: &SupraMatrix,
    mu: Option<f64>,
    theta: f64,
) -> Result<CandidateOutcome> {
    let m = vectors[0].len();
    let mut base = DMatrix::zeros(m, vectors.len());
    for (c, v) in vectors.iter().enumerate() {
        base.set_column(c, v);
    }
    let seba_input = match companions {
        Some((n, t_count)) => {
            let bundle = companion_vectors(&base, n, t_count)?;
            let ortho = orthonormalise_bundle(&bundle, 1e-10);
            if ortho.ncols() == 0 {
                return Err(Error::numerical(
                    "eigenvector bundle collapsed during orthonormalisation",
                ));
            }
            ortho
        }
        // Eigenvectors are already orthonormal; feed them through unchanged.
        None => base,
    };
    let rotated = seba(&seba_input, mu)?;
    let scores = column_scores(&rotated.s, w, theta)?;
    let finite: Vec<f64> = scores.iter().filter_map(|sc| sc.ratio).collect();
    let mean_ratio = if finite.is_empty() {
        f64::INFINITY
    } else {
        finite.iter().sum::<f64>() / finite.len() as f64
    };
    Ok(CandidateOutcome {
        seba_input,
        columns: rotated.s,
        scores,
        mean_ratio,
    })
}

/// Shared tail of both pipelines: candidate rotations over the admissible
/// counts, count selection, the spurious filter, and packing assembly.
#[allow(clippy::too_many_arguments)]
fn finish_run(
    cfg: &PartitionConfig,
    a: f64,
    a_balanced: bool,
    multiplex: bool,
    map: SpacetimeIndexMap,
    w: &SupraMatrix,
    spatial_vectors: &[&DVector<f64>],
    spatial_values: Vec<f64>,
    eigenvalues: Vec<f64>,
    labels: Vec<Label>,
    temporal_overlaps: Option<Vec<f64>>,
    companions: Option<(usize, usize)>,
) -> Result<PartitionRun> {
    let available = spatial_vectors.len();
    if let Some(ro) = cfg.r_override {
        if ro > available {
            return Err(Error::invalid(format!(
                "requested {ro} eigenvectors but only {available} spatial ones are available"
            )));
        }
    }
    let r_hi = available.min(cfg.r_max.max(cfg.r_override.unwrap_or(0)));
    let mut outcomes: BTreeMap<usize, CandidateOutcome> = BTreeMap::new();
    for r in 1..=r_hi {
        let outcome = candidate_run(&spatial_vectors[..r], companions, w, cfg.mu, cfg.theta)?;
        outcomes.insert(r, outcome);
    }
    let ratio_table: Vec<(usize, f64)> = outcomes.iter().map(|(r, o)| (*r, o.mean_ratio)).collect();

    let mut warnings = Vec::new();
    let (r, relative_gaps, r_from_gap, r_from_ratio) = match cfg.r_override {
        Some(ro) => {
            // Still compute the selection tables so the run reports what the
            // automatic choice would have been.
            match select_r(&spatial_values, &ratio_table) {
                Ok(sel) => (ro, sel.relative_gaps, sel.r_from_gap, sel.r_from_ratio),
                Err(_) => (ro, Vec::new(), None, None),
            }
        }
        None => {
            let sel = select_r(&spatial_values, &ratio_table)?;
            (sel.chosen, sel.relative_gaps, sel.r_from_gap, sel.r_from_ratio)
        }
    };

    let chosen = outcomes.remove(&r).expect("chosen count was run");
    let spurious = detect_spurious(
        &chosen.columns,
        &map,
        &chosen.scores,
        cfg.kappa,
        cfg.fibre_tol,
        cfg.theta,
    )?;
    let keep: Vec<usize> = (0..chosen.columns.ncols())
        .filter(|c| !spurious.contains(c))
        .collect();
    let (packing, element_sources) = if keep.is_empty() {
        warnings.push(
            "every indicator column was rejected as spurious; the packing is empty".to_string(),
        );
        (Packing::new(Vec::new(), map.len())?, Vec::new())
    } else {
        let mut sub = DMatrix::zeros(chosen.columns.nrows(), keep.len());
        for (j, &c) in keep.iter().enumerate() {
            sub.set_column(j, &chosen.columns.column(c));
        }
        let (packing, local) = assign_packing(&sub, cfg.theta)?;
        let sources = local.into_iter().map(|c| keep[c]).collect();
        (packing, sources)
    };

    let slice_norms = spatial_vectors[..r]
        .iter()
        .map(|v| slice_norm_table(v, &map))
        .collect();

    Ok(PartitionRun {
        a,
        r,
        multiplex,
        index_map: map,
        seba_inputs: chosen.seba_input,
        seba_vectors: chosen.columns,
        column_scores: chosen.scores,
        spurious,
        packing,
        element_sources,
        diagnostics: Diagnostics {
            eigenvalues,
            labels,
            spatial_values,
            relative_gaps,
            mean_ratios: ratio_table,
            r_from_gap,
            r_from_ratio,
            temporal_overlaps,
            slice_norms,
            a_balanced,
            warnings,
        },
    })
}

/// Full pipeline for fully-present networks: balance the strength, harvest
/// spatial eigenpairs, select the count, rotate with companions, filter,
/// and pack.
pub fn run_multiplex(net: &TemporalNetwork, cfg: &PartitionConfig) -> Result<PartitionRun> {
    cfg.validate()?;
    if !net.is_fully_present() {
        return Err(Error::invalid(
            "the fully-present pipeline needs every vertex present in every slice",
        ));
    }
    let n = net.n();
    let t_count = net.t_count();
    let (a, a_balanced) = match cfg.a_override {
        Some(a) => (a, false),
        None => {
            let a = critical_a_multiplex(
                net,
                cfg.bracket,
                cfg.bisect_tol,
                cfg.bisect_max_iter,
                cfg.eig_tol,
            )?;
            if a == 0.0 && t_count > 1 {
                return Err(Error::invalid(
                    "no balance strength exists: the slices share no connected spatial structure",
                ));
            }
            (a, true)
        }
    };
    let w = build_multiplex_adjacency(net, a)?;
    let l = assemble_laplacian(&w, false)?;
    let tol = scale_aware_tol(cfg.eig_tol, &l);
    let dim = l.dim();
    let wanted = cfg.r_max.max(cfg.r_override.unwrap_or(0)) + 1;

    let mut k = (2 * wanted + 2).max(t_count + 3).min(dim);
    let (es, spatial) = loop {
        let mut es = smallest_eigenpairs(&l, k, tol)?;
        classify_multiplex(&mut es, n, t_count, cfg.tau_cls)?;
        let spatial = es.spatial_indices();
        if spatial.len() >= wanted || k == dim {
            break (es, spatial);
        }
        k = (2 * k).min(dim);
    };
    if spatial.len() < 2 {
        return Err(Error::numerical(
            "no nontrivial spatial eigenvector was found",
        ));
    }
    let spatial_values: Vec<f64> = spatial.iter().map(|&i| es.values[i]).collect();
    let spatial_vectors: Vec<&DVector<f64>> =
        spatial[1..].iter().map(|&i| &es.vectors[i]).collect();
    let map = net.multiplex_index_map()?;
    finish_run(
        cfg,
        a,
        a_balanced,
        true,
        map,
        &w,
        &spatial_vectors,
        spatial_values,
        es.values.clone(),
        es.labels.clone(),
        None,
        cfg.use_companions.then_some((n, t_count)),
    )
}

/// Full pipeline for networks with appearing and disappearing vertices:
/// balance the strength through the leading eigenvector's energy split,
/// identify spatial eigenvectors by their temporal-mode overlap, rotate
/// them directly (no companions), filter, and pack.
///
/// When no spatial eigenvector exists at all (a bare chain of single
/// copies, or an edgeless assembly) the run degenerates to one cluster
/// holding every space-time vertex.
pub fn run_nonmultiplex(net: &TemporalNetwork, cfg: &PartitionConfig) -> Result<PartitionRun> {
    cfg.validate()?;
    if !matches!(net.temporal(), TemporalCoupling::Chain) {
        return Err(Error::invalid(
            "the present-copies pipeline supports only the chain temporal coupling",
        ));
    }
    let (a, a_balanced) = match cfg.a_override {
        Some(a) => (a, false),
        None => (
            critical_a_nonmultiplex(
                net,
                cfg.bracket,
                cfg.bisect_tol,
                cfg.bisect_max_iter,
                cfg.eig_tol,
            )?,
            true,
        ),
    };
    let w = build_nonmultiplex_adjacency(net, a)?;
    let l = assemble_laplacian(&w, false)?;
    let tol = scale_aware_tol(cfg.eig_tol, &l);
    let dim = l.dim();
    let map = net.nonmultiplex_index_map();
    // One extra selected eigenvector keeps the gap table defined at the top
    // of the candidate range.
    let wanted = cfg.r_max.max(cfg.r_override.unwrap_or(0)) + 1;

    let mut k = (2 * wanted + 4).max(net.t_count() + 3).min(dim);
    let (es, sel) = loop {
        let es = smallest_eigenpairs(&l, k, tol)?;
        let sel = identify_spatial_nonmultiplex(&es, net, wanted, cfg.tau_temp)?;
        if sel.satisfied || k == dim {
            break (es, sel);
        }
        k = (2 * k).min(dim);
    };

    if sel.indices.is_empty() {
        if cfg.r_override.is_some() {
            return Err(Error::invalid(
                "requested a fixed eigenvector count but no spatial eigenvector exists",
            ));
        }
        // Purely temporal structure: every vertex copy rides the chain, so
        // the whole vertex set forms a single cluster.
        let packing = Packing::new(vec![(0..dim).collect()], dim)?;
        return Ok(PartitionRun {
            a,
            r: 0,
            multiplex: false,
            index_map: map,
            seba_inputs: DMatrix::zeros(dim, 0),
            seba_vectors: DMatrix::zeros(dim, 0),
            column_scores: Vec::new(),
            spurious: Vec::new(),
            packing,
            element_sources: Vec::new(),
            diagnostics: Diagnostics {
                eigenvalues: es.values.clone(),
                labels: es.labels.clone(),
                temporal_overlaps: Some(sel.m_values),
                a_balanced,
                warnings: vec![
                    "no spatial eigenvector was identified; clustering the whole vertex set"
                        .to_string(),
                ],
                ..Diagnostics::default()
            },
        });
    }

    let mut spatial_values = vec![es.values[0]];
    spatial_values.extend(sel.indices.iter().map(|&i| es.values[i]));
    let spatial_vectors: Vec<&DVector<f64>> =
        sel.indices.iter().map(|&i| &es.vectors[i]).collect();
    let mut labels = vec![Label::Unclassified; es.k()];
    for &i in &sel.indices {
        labels[i] = Label::Spatial;
    }
    finish_run(
        cfg,
        a,
        a_balanced,
        false,
        map,
        &w,
        &spatial_vectors,
        spatial_values,
        es.values.clone(),
        labels,
        Some(sel.m_values),
        None,
    )
}

/// Per-slice footprints of every packing element and the remainder.
fn slice_projections(
    p: &Packing,
    map: &SpacetimeIndexMap,
) -> (Vec<BTreeMap<usize, SetId>>, Vec<BTreeMap<SetId, BTreeSet<usize>>>) {
    let t_count = map.t_count();
    let assignment = p.assignment();
    let mut owners: Vec<BTreeMap<usize, SetId>> = vec![BTreeMap::new(); t_count];
    let mut projs: Vec<BTreeMap<SetId, BTreeSet<usize>>> = vec![BTreeMap::new(); t_count];
    for t in 0..t_count {
        for flat in map.slice_range(t) {
            let (_, x) = map.from_flat(flat);
            let sid = match assignment[flat] {
                Some(k) => SetId::Element(k),
                None => SetId::Omega,
            };
            owners[t].insert(x, sid);
            projs[t].entry(sid).or_default().insert(x);
        }
    }
    (owners, projs)
}

fn scan_boundary(
    t: usize,
    forward: bool,
    actor_projs: &BTreeMap<SetId, BTreeSet<usize>>,
    far_owners: &BTreeMap<usize, SetId>,
    far_projs: &BTreeMap<SetId, BTreeSet<usize>>,
    jmax: usize,
    events: &mut Vec<TransitionEvent>,
) {
    for (actor, footprint) in actor_projs {
        // The collection is forced: each footprint vertex must reappear on
        // the far side, and every set it lands in must fit inside the
        // footprint, otherwise the defining set equality cannot hold.
        let mut collection: BTreeSet<SetId> = BTreeSet::new();
        let mut covered = true;
        for x in footprint {
            match far_owners.get(x) {
                Some(&sid) => {
                    collection.insert(sid);
                }
                None => {
                    covered = false;
                    break;
                }
            }
        }
        if !covered {
            continue;
        }
        if !collection
            .iter()
            .all(|sid| far_projs[sid].is_subset(footprint))
        {
            continue;
        }
        let j = collection.len();
        if j > jmax {
            continue;
        }
        let involved = collection.contains(actor);
        let kind = match (actor, involved) {
            (SetId::Omega, _) => {
                // The remainder "splitting" into clusters is an appearance,
                // whether or not part of it stays unclustered; a single
                // target carries no event.
                if j < 2 {
                    continue;
                }
                if forward {
                    TransitionKind::Appearance
                } else {
                    TransitionKind::Disappearance
                }
            }
            (SetId::Element(_), true) => {
                if j < 2 {
                    continue;
                }
                if forward {
                    TransitionKind::Split
                } else {
                    TransitionKind::Merge
                }
            }
            (SetId::Element(_), false) => {
                if forward {
                    TransitionKind::Appearance
                } else {
                    TransitionKind::Disappearance
                }
            }
        };
        let shrinking = kind == TransitionKind::Split
            && j == 2
            && involved
            && collection.contains(&SetId::Omega);
        events.push(TransitionEvent {
            t,
            kind,
            j,
            actor: *actor,
            targets: collection.into_iter().collect(),
            shrinking,
        });
    }
}

/// Classifies the structural changes of a packing across each consecutive
/// pair of slices.
///
/// Splits and appearances are detected forward in time: an element (or the
/// remainder) whose slice-`t` footprint is exactly re-covered by a small
/// collection of sets at `t+1`. Merges and disappearances are the same test
/// with the roles of the two slices swapped. Collections larger than `jmax`
/// are ignored.
pub fn classify_transitions(
    p: &Packing,
    map: &SpacetimeIndexMap,
    jmax: usize,
) -> Result<Vec<TransitionEvent>> {
    if p.n() != map.len() {
        return Err(Error::invalid(format!(
            "packing over {} vertices does not match index map size {}",
            p.n(),
            map.len()
        )));
    }
    if jmax == 0 {
        return Err(Error::invalid("transition collection bound must be at least 1"));
    }
    let (owners, projs) = slice_projections(p, map);
    let t_count = map.t_count();
    let mut events = Vec::new();
    for t in 0..t_count.saturating_sub(1) {
        scan_boundary(t, true, &projs[t], &owners[t + 1], &projs[t + 1], jmax, &mut events);
        scan_boundary(t, false, &projs[t + 1], &owners[t], &projs[t], jmax, &mut events);
    }
    events.sort_by(|a, b| {
        (a.t, a.actor, a.kind, &a.targets).cmp(&(b.t, b.actor, b.kind, &b.targets))
    });
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Layer;

    fn multiplex_map(n: usize, t_count: usize) -> SpacetimeIndexMap {
        SpacetimeIndexMap::Multiplex { n, t_count }
    }

    /// Two persistent 2-cliques bridged by a weak edge, constant in time.
    fn two_block_net(t_count: usize) -> TemporalNetwork {
        let edges = vec![(0, 1, 1.0), (1, 2, 0.1), (2, 3, 1.0)];
        TemporalNetwork::fully_present(4, vec![edges; t_count]).unwrap()
    }

    #[test]
    fn companion_is_the_slice_norm_spread_over_the_slice() {
        let v = DMatrix::from_column_slice(4, 1, &[3.0, 4.0, 0.0, 0.0]);
        let out = companion_vectors(&v, 2, 2).unwrap();
        assert_eq!(out.ncols(), 2);
        assert_eq!(out.column(0).as_slice(), &[3.0, 4.0, 0.0, 0.0]);
        assert_eq!(out.column(1).as_slice(), &[5.0, 5.0, 0.0, 0.0]);
    }

    #[test]
    fn companion_of_a_constant_slice_profile_is_constant() {
        let v = DMatrix::from_column_slice(6, 1, &[1.0, -1.0, 0.0, 1.0, -1.0, 0.0]);
        let out = companion_vectors(&v, 3, 2).unwrap();
        let norm = 2.0f64.sqrt();
        for i in 0..6 {
            assert!((out[(i, 1)] - norm).abs() < 1e-15);
        }
    }

    #[test]
    fn selection_prefers_the_gap_inside_the_tie_band() {
        // Largest relative gap sits above the second nontrivial eigenvalue;
        // the ratio minimum at 1 is within 5% of the ratio at 2.
        let sv = [0.0, 1.0, 1.05, 9.0, 9.1];
        let ratios = [(1, 0.50), (2, 0.51), (3, 0.90)];
        let sel = select_r(&sv, &ratios).unwrap();
        assert_eq!(sel.r_from_ratio, Some(1));
        assert_eq!(sel.r_from_gap, Some(2));
        assert_eq!(sel.chosen, 2);
    }

    #[test]
    fn selection_returns_the_ratio_minimiser_outside_the_band() {
        let sv = [0.0, 1.0, 1.05, 9.0, 9.1];
        let ratios = [(1, 0.50), (2, 0.80), (3, 0.90)];
        let sel = select_r(&sv, &ratios).unwrap();
        assert_eq!(sel.chosen, 1);
    }

    #[test]
    fn selection_without_any_gap_falls_back_to_the_minimiser() {
        let sv = [2.0, 2.0, 2.0, 2.0];
        let ratios = [(1, 0.7), (2, 0.4)];
        let sel = select_r(&sv, &ratios).unwrap();
        assert_eq!(sel.r_from_gap, None);
        assert_eq!(sel.chosen, 2);
    }

    #[test]
    fn slice_constant_column_is_spurious_and_a_slice_indicator_is_not() {
        let map = multiplex_map(2, 2);
        let net = TemporalNetwork::fully_present(
            2,
            vec![vec![(0, 1, 1.0)], vec![(0, 1, 1.0)]],
        )
        .unwrap();
        let w = build_multiplex_adjacency(&net, 1.0).unwrap();
        let s = DMatrix::from_columns(&[
            DVector::from_column_slice(&[0.2, 0.2, 0.7, 0.7]),
            DVector::from_column_slice(&[1.0, 0.0, 0.8, 0.0]),
        ]);
        let scores = column_scores(&s, &w, 0.0).unwrap();
        // A huge rejection factor isolates the slice-constancy criterion.
        let flags = detect_spurious(&s, &map, &scores, 1e9, 1e-6, 0.0).unwrap();
        assert_eq!(flags, vec![0]);
    }

    #[test]
    fn oversized_cut_ratio_is_spurious() {
        // Three tight 3-cliques in one slice; two columns sit on cliques,
        // the third straddles all of them and pays for every crossing edge.
        let mut edges = Vec::new();
        for base in [0, 3, 6] {
            edges.push((base, base + 1, 10.0));
            edges.push((base, base + 2, 10.0));
            edges.push((base + 1, base + 2, 10.0));
        }
        edges.push((2, 3, 1.0));
        edges.push((5, 6, 1.0));
        let net = TemporalNetwork::fully_present(9, vec![edges]).unwrap();
        let w = build_multiplex_adjacency(&net, 1.0).unwrap();
        let map = multiplex_map(9, 1);
        let ind = |vs: &[usize]| {
            let mut v = DVector::zeros(9);
            for &i in vs {
                v[i] = 1.0;
            }
            v
        };
        let s = DMatrix::from_columns(&[
            ind(&[0, 1, 2]),
            ind(&[3, 4, 5]),
            ind(&[2, 3, 6]),
        ]);
        let scores = column_scores(&s, &w, 0.0).unwrap();
        let flags = detect_spurious(&s, &map, &scores, 3.0, 1e-12, 0.0).unwrap();
        assert_eq!(flags, vec![2]);
    }

    #[test]
    fn empty_support_is_always_spurious() {
        let map = multiplex_map(2, 1);
        let net = TemporalNetwork::fully_present(2, vec![vec![(0, 1, 1.0)]]).unwrap();
        let w = build_multiplex_adjacency(&net, 1.0).unwrap();
        let s = DMatrix::from_columns(&[
            DVector::from_column_slice(&[0.0, 0.0]),
            DVector::from_column_slice(&[1.0, 0.0]),
        ]);
        let scores = column_scores(&s, &w, 0.0).unwrap();
        let flags = detect_spurious(&s, &map, &scores, 3.0, 1e-6, 0.0).unwrap();
        assert!(flags.contains(&0));
    }

    #[test]
    fn packing_assignment_takes_the_largest_entry_and_keeps_ties_low() {
        let s = DMatrix::from_columns(&[
            DVector::from_column_slice(&[0.8, 0.5, 0.0, 0.0]),
            DVector::from_column_slice(&[0.3, 0.5, 0.9, 0.0]),
        ]);
        let (p, sources) = assign_packing(&s, 0.0).unwrap();
        // Row 0: 0.8 beats 0.3. Row 1: exact tie goes to column 0.
        assert_eq!(p.elements(), &[vec![0, 1], vec![2]]);
        assert_eq!(p.omega(), &[3]);
        assert_eq!(sources, vec![0, 1]);
    }

    #[test]
    fn packing_assignment_drops_fully_shadowed_columns() {
        let s = DMatrix::from_columns(&[
            DVector::from_column_slice(&[0.9, 0.9, 0.1]),
            DVector::from_column_slice(&[0.5, 0.4, 0.05]),
        ]);
        let (p, sources) = assign_packing(&s, 0.0).unwrap();
        assert_eq!(p.k(), 1);
        assert_eq!(p.elements(), &[vec![0, 1, 2]]);
        assert_eq!(sources, vec![0]);
    }

    #[test]
    fn persistent_blocks_are_recovered_across_all_slices() {
        let net = two_block_net(3);
        let run = run_multiplex(&net, &PartitionConfig::default()).unwrap();
        assert!(run.a > 0.0 && run.a.is_finite());
        assert_eq!(run.r, 1);
        assert_eq!(run.packing.k(), 2);
        assert!(run.packing.is_fully_clustered());
        let mut got: Vec<Vec<usize>> = run.packing.elements().to_vec();
        got.sort();
        let left: Vec<usize> = (0..3).flat_map(|t| [4 * t, 4 * t + 1]).collect();
        let right: Vec<usize> = (0..3).flat_map(|t| [4 * t + 2, 4 * t + 3]).collect();
        let mut want = vec![left, right];
        want.sort();
        assert_eq!(got, want);
        assert!(run.packing.k() + run.spurious.len() <= run.seba_vectors.ncols());
    }

    #[test]
    fn identical_runs_are_identical() {
        let net = two_block_net(3);
        let cfg = PartitionConfig::default();
        let one = run_multiplex(&net, &cfg).unwrap();
        let two = run_multiplex(&net, &cfg).unwrap();
        assert_eq!(one, two);
    }

    #[test]
    fn single_slice_reduces_to_a_static_bipartition() {
        let edges = vec![
            (0, 1, 1.0),
            (0, 2, 1.0),
            (1, 2, 1.0),
            (2, 3, 0.05),
            (3, 4, 1.0),
            (3, 5, 1.0),
            (4, 5, 1.0),
        ];
        let net = TemporalNetwork::fully_present(6, vec![edges]).unwrap();
        let run = run_multiplex(&net, &PartitionConfig::default()).unwrap();
        assert_eq!(run.a, 0.0);
        let mut got: Vec<Vec<usize>> = run.packing.elements().to_vec();
        got.sort();
        assert_eq!(got, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn present_copies_pipeline_agrees_on_a_fully_present_network() {
        let net = two_block_net(3);
        let mut cfg = PartitionConfig::default();
        cfg.a_override = Some(1.5);
        cfg.r_override = Some(1);
        cfg.use_companions = false;
        let full = run_multiplex(&net, &cfg).unwrap();
        let sparse = run_nonmultiplex(&net, &cfg).unwrap();
        assert_eq!(full.packing.elements(), sparse.packing.elements());
        assert_eq!(full.packing.omega(), sparse.packing.omega());
    }

    #[test]
    fn bare_chain_of_single_copies_is_one_cluster() {
        let layer = Layer {
            present: vec![0],
            edges: vec![],
        };
        let net = TemporalNetwork::new(2, vec![layer; 4], TemporalCoupling::Chain).unwrap();
        let run = run_nonmultiplex(&net, &PartitionConfig::default()).unwrap();
        assert_eq!(run.r, 0);
        assert_eq!(run.packing.k(), 1);
        assert_eq!(run.packing.elements()[0], (0..4).collect::<Vec<_>>());
        assert!(run.packing.omega().is_empty());
        assert!(!run.diagnostics.warnings.is_empty());
    }

    #[test]
    fn relabelling_vertices_permutes_the_packing() {
        let net = two_block_net(3);
        let perm = [2usize, 0, 3, 1]; // image of each vertex id
        let remap = |edges: &[(usize, usize, f64)]| {
            edges
                .iter()
                .map(|&(x, y, w)| {
                    let (px, py) = (perm[x], perm[y]);
                    (px.min(py), px.max(py), w)
                })
                .collect::<Vec<_>>()
        };
        let permuted = TemporalNetwork::fully_present(
            4,
            net.layers().iter().map(|l| remap(&l.edges)).collect(),
        )
        .unwrap();
        let cfg = PartitionConfig::default();
        let base = run_multiplex(&net, &cfg).unwrap();
        let moved = run_multiplex(&permuted, &cfg).unwrap();
        let map = multiplex_map(4, 3);
        let mut mapped: Vec<Vec<usize>> = base
            .packing
            .elements()
            .iter()
            .map(|el| {
                let mut out: Vec<usize> = el
                    .iter()
                    .map(|&flat| {
                        let (t, x) = map.from_flat(flat);
                        map.to_flat(t, perm[x]).unwrap()
                    })
                    .collect();
                out.sort_unstable();
                out
            })
            .collect();
        mapped.sort();
        let mut got: Vec<Vec<usize>> = moved.packing.elements().to_vec();
        got.sort();
        assert_eq!(mapped, got);
    }

    #[test]
    fn appearance_and_disappearance_bracket_a_transient_clustering() {
        // Slices 0 and 4 unclustered; slices 1-3 split into {0,1,2} and
        // {3,4}.
        let map = multiplex_map(5, 5);
        let el = |xs: &[usize], ts: std::ops::Range<usize>| {
            ts.flat_map(|t| xs.iter().map(move |&x| t * 5 + x))
                .collect::<Vec<_>>()
        };
        let packing =
            Packing::new(vec![el(&[0, 1, 2], 1..4), el(&[3, 4], 1..4)], 25).unwrap();
        let events = classify_transitions(&packing, &map, 4).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].t, 0);
        assert_eq!(events[0].kind, TransitionKind::Appearance);
        assert_eq!(events[0].j, 2);
        assert_eq!(events[0].actor, SetId::Omega);
        assert_eq!(
            events[0].targets,
            vec![SetId::Element(0), SetId::Element(1)]
        );
        assert_eq!(events[1].t, 3);
        assert_eq!(events[1].kind, TransitionKind::Disappearance);
        assert_eq!(events[1].actor, SetId::Omega);
        assert_eq!(events[1].j, 2);
    }

    #[test]
    fn time_constant_packing_has_no_events() {
        let map = multiplex_map(4, 3);
        let el = |xs: &[usize]| {
            (0..3)
                .flat_map(|t| xs.iter().map(move |&x| t * 4 + x))
                .collect::<Vec<_>>()
        };
        let packing = Packing::new(vec![el(&[0, 1]), el(&[2, 3])], 12).unwrap();
        let events = classify_transitions(&packing, &map, 4).unwrap();
        assert!(events.is_empty());
    }

    #[test]
    fn losing_vertices_to_the_remainder_is_a_shrinking_split() {
        let map = multiplex_map(3, 2);
        // Element holds everyone at slice 0 but only {0,1} at slice 1.
        let packing = Packing::new(vec![vec![0, 1, 2, 3, 4]], 6).unwrap();
        let events = classify_transitions(&packing, &map, 4).unwrap();
        assert_eq!(events.len(), 1);
        let e = &events[0];
        assert_eq!(e.kind, TransitionKind::Split);
        assert_eq!(e.j, 2);
        assert_eq!(e.actor, SetId::Element(0));
        assert!(e.shrinking);
        assert_eq!(e.targets, vec![SetId::Element(0), SetId::Omega]);
    }

    #[test]
    fn handoff_between_labels_reads_as_appearance_and_disappearance() {
        let map = multiplex_map(2, 2);
        // Element 0 owns slice 0, element 1 owns slice 1.
        let packing = Packing::new(vec![vec![0, 1], vec![2, 3]], 4).unwrap();
        let events = classify_transitions(&packing, &map, 4).unwrap();
        assert_eq!(events.len(), 2);
        assert_eq!(events[0].kind, TransitionKind::Appearance);
        assert_eq!(events[0].actor, SetId::Element(0));
        assert_eq!(events[0].j, 1);
        assert_eq!(events[1].kind, TransitionKind::Disappearance);
        assert_eq!(events[1].actor, SetId::Element(1));
    }

    #[test]
    fn oversized_collections_are_suppressed() {
        let map = multiplex_map(3, 2);
        // Omega at slice 0 scatters into three clusters at slice 1.
        let packing =
            Packing::new(vec![vec![3], vec![4], vec![5]], 6).unwrap();
        assert_eq!(classify_transitions(&packing, &map, 2).unwrap().len(), 0);
        let events = classify_transitions(&packing, &map, 4).unwrap();
        assert_eq!(events.len(), 1);
        assert_eq!(events[0].kind, TransitionKind::Appearance);
        assert_eq!(events[0].j, 3);
    }

    #[test]
    fn override_requests_beyond_the_spatial_supply_are_rejected() {
        let net = two_block_net(2);
        let mut cfg = PartitionConfig::default();
        cfg.r_override = Some(50);
        assert!(run_multiplex(&net, &cfg).is_err());
    }
}
