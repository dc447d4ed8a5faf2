//! Run configuration shared by the CLI and embedded in every output file.

use serde::{Deserialize, Serialize};

use crate::partition::PartitionConfig;
use crate::spectral::{
    DEFAULT_BISECT_TOL, DEFAULT_BRACKET, DEFAULT_EIG_TOL, DEFAULT_TAU_CLS, DEFAULT_TAU_TEMP,
};

/// Every knob a run can turn, in one flat, file-friendly struct.
///
/// Unknown keys in a config file are rejected so typos fail loudly. All
/// fields have defaults; a config file only needs the ones it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Residual tolerance for eigenpair extraction.
    pub eig_tol: f64,
    /// Initial bracket `[lo, hi]` for the diffusion-strength bisection.
    pub a_bracket: (f64, f64),
    /// Relative width at which the strength bisection stops.
    pub bisect_tol: f64,
    pub bisect_max_iter: usize,
    /// Sparsity penalty for the indicator rotation; absent means the
    /// dimension-based default.
    pub seba_mu: Option<f64>,
    /// Slice-mean threshold for spatial/temporal classification on
    /// fully-present networks.
    pub tau_cls: f64,
    /// Temporal-overlap threshold for spatial identification on
    /// present-copies assemblies.
    pub tau_temp: f64,
    /// Cut-ratio rejection factor for spurious indicator columns.
    pub kappa: f64,
    /// Support threshold for indicator columns (0 = strict positivity).
    pub theta: f64,
    /// Relative within-slice variance below which a column counts as
    /// slice-constant.
    pub fibre_tol: f64,
    /// Largest eigenvector count tried by the automatic selection.
    pub r_max: usize,
    /// Largest collection size considered when classifying transitions.
    pub jmax: usize,
    /// Append slice-norm companion columns on fully-present networks.
    pub use_companions: bool,
    /// Seed for every random operation.
    pub seed: u64,
    /// Fixed diffusion strength; absent means solve for the balance point.
    pub a: Option<f64>,
    /// Fixed eigenvector count; absent means select automatically.
    pub r: Option<usize>,
    /// Use the present-copies pipeline instead of the fully-present one.
    pub nonmultiplex: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PartitionConfig::default();
        Self {
            eig_tol: DEFAULT_EIG_TOL,
            a_bracket: DEFAULT_BRACKET,
            bisect_tol: DEFAULT_BISECT_TOL,
            bisect_max_iter: p.bisect_max_iter,
            seba_mu: None,
            tau_cls: DEFAULT_TAU_CLS,
            tau_temp: DEFAULT_TAU_TEMP,
            kappa: p.kappa,
            theta: p.theta,
            fibre_tol: p.fibre_tol,
            r_max: p.r_max,
            jmax: p.jmax,
            use_companions: p.use_companions,
            seed: 0,
            a: None,
            r: None,
            nonmultiplex: false,
        }
    }
}

impl RunConfig {
    pub fn to_partition_config(&self) -> PartitionConfig {
        PartitionConfig {
            a_override: self.a,
            r_override: self.r,
            mu: self.seba_mu,
            eig_tol: self.eig_tol,
            bracket: self.a_bracket,
            bisect_tol: self.bisect_tol,
            bisect_max_iter: self.bisect_max_iter,
            tau_cls: self.tau_cls,
            tau_temp: self.tau_temp,
            kappa: self.kappa,
            fibre_tol: self.fibre_tol,
            theta: self.theta,
            r_max: self.r_max,
            jmax: self.jmax,
            use_companions: self.use_companions,
        }
    }
}
