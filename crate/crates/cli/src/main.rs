//! Command-line front end for temporal-network community detection.
//!
//! Eight subcommands cover the pipeline end to end: `generate` synthetic
//! benchmarks, `build` raw operator exports, `eigs` eigenpair extraction,
//! `cluster` the full partitioning run, `cheeger` packing quality scores,
//! `match` linking of independently clustered slices, `votes` roll-call
//! ingestion, and `transitions` split/merge event classification.
//!
//! Every subcommand is a thin shell over the library: the same config struct
//! drives both, and every JSON output embeds that config plus digests of the
//! input files, so results are reproducible byte for byte. Exit codes: 0 on
//! success, 2 for invalid input or files, 3 for numerical failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stcluster::cheeger::{element_ratios, packing_score};
use stcluster::config::RunConfig;
use stcluster::graph::{
    assemble_laplacian, build_multiplex_adjacency, build_nonmultiplex_adjacency,
    dynamic_laplacian, SpacetimeIndexMap, TemporalNetwork,
};
use stcluster::supra::SupraMatrix;
use stcluster::ingest::{project_to_states, senator_network, state_network, VoteTable};
use stcluster::io::{
    digest_file, eigenset_json, network_json, packing_json, read_eigenset, read_network,
    read_packing, read_packing_standalone, read_slice_partition, run_json, transitions_json,
    write_json, write_labels_csv, write_matrix_csv, write_slice_norms_csv,
    write_state_projection_csv, write_vector_heatmap_csv,
};
use stcluster::matching::link_partitions;
use stcluster::netgen::{generate, GenSpec};
use stcluster::partition::{classify_transitions, run_multiplex, run_nonmultiplex};
use stcluster::spectral::{
    classify_multiplex, critical_a_multiplex, critical_a_nonmultiplex,
    identify_spatial_nonmultiplex, smallest_eigenpairs,
};
use stcluster::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "stcluster",
    version,
    about = "Detects time-evolving communities in temporal networks",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct GlobalOpts {
    /// Residual tolerance for the eigensolver
    #[arg(long, global = true, value_name = "TOL")]
    tol: Option<f64>,
    /// Iteration cap for the balance-strength bisection
    #[arg(long, global = true, value_name = "N")]
    max_iter: Option<usize>,
    /// Search bracket for the balance strength, as "lo,hi"
    #[arg(long, global = true, value_name = "LO,HI")]
    a_bracket: Option<String>,
    /// Seed for every random operation
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,
    /// TOML file with run settings; explicit flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate a synthetic benchmark network with planted clusters
    Generate(GenerateArgs),
    /// Assemble a space-time operator and export it as CSV
    Build(BuildArgs),
    /// Compute and label the low eigenpairs of a space-time Laplacian
    Eigs(EigsArgs),
    /// Run the end-to-end clustering pipeline
    Cluster(ClusterArgs),
    /// Score a packing with space-time cut ratios
    Cheeger(CheegerArgs),
    /// Link independently clustered slices into one space-time packing
    Match(MatchArgs),
    /// Build a temporal network from roll-call vote records
    Votes(VotesArgs),
    /// Classify cluster splits, merges, appearances, and disappearances
    Transitions(TransitionsArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// Planted cluster count per anchor state, comma separated (e.g. "0,1,2")
    #[arg(long, value_name = "LIST")]
    alpha: String,
    /// 1-based anchor slices, ascending, first 1 and last T (e.g. "1,40,60")
    #[arg(long, value_name = "LIST")]
    s: String,
    /// Vertices per slice
    #[arg(long = "N", value_name = "N")]
    n: usize,
    /// Number of slices
    #[arg(long = "T", value_name = "T")]
    t: usize,
    /// Cluster cleanliness in [0, 1]; at 1 no edges leave a cluster
    #[arg(long, default_value_t = 0.8)]
    eta: f64,
    /// Clustered-to-unclustered edge density ratio
    #[arg(long, default_value_t = 1.5)]
    beta: f64,
    /// Density divisor for the background graph of cluster-free states
    #[arg(long, default_value_t = 3)]
    gamma: usize,
    /// Output network file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also write the planted ground truth here
    #[arg(long, value_name = "FILE")]
    truth: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OperatorKind {
    /// Space-time edge weights with squared-strength temporal links
    Adjacency,
    /// Space-time Laplacian (optionally degree-normalised)
    Laplacian,
    /// Time-averaged spatial Laplacian with no temporal coupling
    DynamicLaplacian,
}

impl OperatorKind {
    fn as_str(self) -> &'static str {
        match self {
            OperatorKind::Adjacency => "adjacency",
            OperatorKind::Laplacian => "laplacian",
            OperatorKind::DynamicLaplacian => "dynamic-laplacian",
        }
    }
}

#[derive(Args, Debug)]
struct BuildArgs {
    /// Input network file
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Diffusion strength: a number, or "auto" for the balance point
    #[arg(long, value_name = "A|auto")]
    a: Option<String>,
    /// Assemble over present vertex copies only
    #[arg(long)]
    nonmultiplex: bool,
    /// Which operator to export
    #[arg(long, value_enum, default_value_t = OperatorKind::Laplacian)]
    kind: OperatorKind,
    /// Degree-normalise the Laplacian
    #[arg(long)]
    normalised: bool,
    /// Output CSV of 1-based row,col,value entries (+ .meta.json sidecar)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EigsArgs {
    /// Input network file
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Number of eigenpairs, from the bottom of the spectrum
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Diffusion strength: a number, or "auto" for the balance point
    #[arg(long, default_value = "auto", value_name = "A|auto")]
    a: String,
    /// Assemble over present vertex copies only
    #[arg(long)]
    nonmultiplex: bool,
    /// Degree-normalise the Laplacian
    #[arg(long)]
    normalised: bool,
    /// Output JSON file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also write one t,x,value heatmap CSV per eigenvector with this prefix
    #[arg(long, value_name = "PREFIX")]
    heatmap: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    /// Input network file
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Use the present-copies pipeline instead of the fully-present one
    #[arg(long)]
    nonmultiplex: bool,
    /// Diffusion strength: a number, or "auto" for the balance point
    #[arg(long, default_value = "auto", value_name = "A|auto")]
    a: String,
    /// Cluster-vector count: a number, or "auto" to select by cut ratios
    #[arg(long = "R", default_value = "auto", value_name = "K|auto")]
    r: String,
    /// Sparsity penalty for the indicator rotation
    #[arg(long, value_name = "MU")]
    mu: Option<f64>,
    /// Output run file (+ .norms.csv and .packing.json sidecars)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also write one t,x,value heatmap CSV per indicator column
    #[arg(long, value_name = "PREFIX")]
    heatmap: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheegerArgs {
    /// Packing file to score
    #[arg(long, value_name = "FILE")]
    packing: PathBuf,
    /// Network the packing lives on
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// Diffusion strength: a number, or "auto" for the balance point
    #[arg(long, default_value = "auto", value_name = "A|auto")]
    a: String,
    /// Assemble over present vertex copies only
    #[arg(long)]
    nonmultiplex: bool,
    /// Score with volume-based (degree-normalised) ratios
    #[arg(long)]
    normalised: bool,
    /// Score the unclustered remainder as well
    #[arg(long)]
    include_omega: bool,
    /// Output JSON file; prints to stdout when omitted
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MatchArgs {
    /// Per-slice partition files, one per slice in time order
    #[arg(long, num_args = 1.., value_name = "FILE", required = true)]
    partitions: Vec<PathBuf>,
    /// Network the partitions live on
    #[arg(long, value_name = "FILE")]
    net: PathBuf,
    /// Diffusion strength for the linking cut matrices
    #[arg(long, default_value = "1", value_name = "A|auto")]
    a: String,
    /// Output packing file
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum VoteMode {
    /// One vertex per voter, weighted by vote agreement
    Senators,
    /// One vertex per state, aggregated vote vectors
    States,
}

#[derive(Args, Debug)]
struct VotesArgs {
    /// CSV of vote records with header t,bill,voter,state,party,vote
    #[arg(long, value_name = "FILE")]
    csv: PathBuf,
    /// Aggregation level
    #[arg(long, value_enum)]
    mode: VoteMode,
    /// Output network file (+ .labels.csv sidecar)
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Eigen data from the voter network, for the state projection
    #[arg(long, value_name = "FILE")]
    project_eigs: Option<PathBuf>,
    /// 1-based eigenvector to project onto states
    #[arg(long, value_name = "K")]
    project_column: Option<usize>,
    /// Output CSV of state,t,value projections
    #[arg(long, value_name = "FILE")]
    project_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TransitionsArgs {
    /// Packing file; slices are reconstructed from its own tiles
    #[arg(long, value_name = "FILE")]
    packing: PathBuf,
    /// Largest collection size to report
    #[arg(long, value_name = "J")]
    jmax: Option<usize>,
    /// Output JSON file; prints to stdout when omitted
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numerical(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let mut cfg = resolve_config(&cli.global)?;
    match cli.cmd {
        Cmd::Generate(args) => cmd_generate(&cfg, &args),
        Cmd::Build(args) => cmd_build(&cfg, &args),
        Cmd::Eigs(args) => cmd_eigs(&cfg, &args),
        Cmd::Cluster(args) => cmd_cluster(&mut cfg, &args),
        Cmd::Cheeger(args) => cmd_cheeger(&cfg, &args),
        Cmd::Match(args) => cmd_match(&cfg, &args),
        Cmd::Votes(args) => cmd_votes(&cfg, &args),
        Cmd::Transitions(args) => cmd_transitions(&cfg, &args),
    }
}

/// Defaults, overlaid by the config file, overlaid by explicit flags.
fn resolve_config(g: &GlobalOpts) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            toml::from_str::<RunConfig>(&text)
                .map_err(|e| Error::invalid(format!("config file {}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(tol) = g.tol {
        cfg.eig_tol = tol;
    }
    if let Some(iters) = g.max_iter {
        cfg.bisect_max_iter = iters;
    }
    if let Some(bracket) = &g.a_bracket {
        cfg.a_bracket = parse_bracket(bracket)?;
    }
    if let Some(seed) = g.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

// ---- small parsers ------------------------------------------------------

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::invalid(format!("{what}: expected a number, got {s:?}")))
}

/// "auto" means "solve for it"; anything else must be a number.
fn parse_strength(s: &str) -> Result<Option<f64>> {
    if s.trim().eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    parse_f64(s, "--a").map(Some)
}

fn parse_rank(s: &str) -> Result<Option<usize>> {
    if s.trim().eq_ignore_ascii_case("auto") {
        return Ok(None);
    }
    s.trim()
        .parse::<usize>()
        .map(Some)
        .map_err(|_| Error::invalid(format!("--R: expected a count or \"auto\", got {s:?}")))
}

fn parse_usize_list(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::invalid(format!("{what}: {p:?} is not a nonnegative integer")))
        })
        .collect()
}

fn parse_bracket(s: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(Error::invalid(format!(
            "--a-bracket: expected \"lo,hi\", got {s:?}"
        )));
    }
    Ok((
        parse_f64(parts[0], "--a-bracket")?,
        parse_f64(parts[1], "--a-bracket")?,
    ))
}

// ---- shared plumbing ----------------------------------------------------

fn resolve_a(
    requested: Option<f64>,
    net: &TemporalNetwork,
    nonmultiplex: bool,
    cfg: &RunConfig,
) -> Result<f64> {
    match requested {
        Some(v) => Ok(v),
        None if nonmultiplex => critical_a_nonmultiplex(
            net,
            cfg.a_bracket,
            cfg.bisect_tol,
            cfg.bisect_max_iter,
            cfg.eig_tol,
        ),
        None => critical_a_multiplex(
            net,
            cfg.a_bracket,
            cfg.bisect_tol,
            cfg.bisect_max_iter,
            cfg.eig_tol,
        ),
    }
}

fn adjacency_for(net: &TemporalNetwork, a: f64, nonmultiplex: bool) -> Result<SupraMatrix> {
    if nonmultiplex {
        build_nonmultiplex_adjacency(net, a)
    } else {
        build_multiplex_adjacency(net, a)
    }
}

fn index_map_for(net: &TemporalNetwork, nonmultiplex: bool) -> Result<SpacetimeIndexMap> {
    if nonmultiplex {
        Ok(net.nonmultiplex_index_map())
    } else {
        net.multiplex_index_map()
    }
}

/// Config plus input-file digests, embedded in every structured output.
fn provenance(cfg: &RunConfig, inputs: &[(&str, &Path)]) -> Result<Value> {
    let mut files = serde_json::Map::new();
    for (role, path) in inputs {
        files.insert(
            (*role).to_string(),
            json!({
                "path": path.display().to_string(),
                "digest": digest_file(path)?,
            }),
        );
    }
    Ok(json!({
        "config": serde_json::to_value(cfg)?,
        "inputs": files,
    }))
}

fn embed(mut doc: Value, prov: Value) -> Value {
    if let Value::Object(map) = &mut doc {
        map.insert("provenance".to_string(), prov);
    }
    doc
}

fn emit(doc: &Value, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_json(path, doc),
        None => {
            println!("{}", serde_json::to_string_pretty(doc)?);
            Ok(())
        }
    }
}

/// "run.json" + ".norms.csv" -> "run.norms.csv", next to the original.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("out")
        .to_string();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn numbered(prefix: &Path, label: &str, index: usize) -> PathBuf {
    PathBuf::from(format!("{}-{label}{index}.csv", prefix.display()))
}

// ---- subcommands --------------------------------------------------------

fn cmd_generate(cfg: &RunConfig, args: &GenerateArgs) -> Result<()> {
    let spec = GenSpec {
        n: args.n,
        t: args.t,
        alpha: parse_usize_list(&args.alpha, "--alpha")?,
        s: parse_usize_list(&args.s, "--s")?,
        eta: args.eta,
        beta: args.beta,
        gamma: args.gamma,
        seed: cfg.seed,
    };
    let generated = generate(&spec)?;
    let prov = json!({
        "config": serde_json::to_value(cfg)?,
        "generator": serde_json::to_value(&spec)?,
        "inputs": {},
    });
    write_json(&args.out, &embed(network_json(&generated.net), prov.clone()))?;
    if let Some(truth_path) = &args.truth {
        let map = generated.net.multiplex_index_map()?;
        let memberships: Vec<Vec<Option<usize>>> = generated
            .memberships
            .iter()
            .map(|slice| slice.iter().map(|m| m.map(|k| k + 1)).collect())
            .collect();
        let doc = json!({
            "packing": packing_json(&generated.truth, &map)?,
            "state_slices": generated.state_slices.iter().map(|t| t + 1).collect::<Vec<_>>(),
            "memberships": memberships,
        });
        write_json(truth_path, &embed(doc, prov))?;
    }
    Ok(())
}

fn cmd_build(cfg: &RunConfig, args: &BuildArgs) -> Result<()> {
    let net = read_network(&args.input)?;
    let (matrix, a_used) = match args.kind {
        OperatorKind::DynamicLaplacian => {
            if args.a.is_some() {
                return Err(Error::invalid(
                    "--a does not apply to the dynamic Laplacian; it has no temporal coupling",
                ));
            }
            if args.normalised {
                return Err(Error::invalid(
                    "--normalised does not apply to the dynamic Laplacian",
                ));
            }
            if args.nonmultiplex {
                return Err(Error::invalid(
                    "--nonmultiplex does not apply to the dynamic Laplacian",
                ));
            }
            (dynamic_laplacian(&net)?, None)
        }
        kind => {
            if args.normalised && kind == OperatorKind::Adjacency {
                return Err(Error::invalid("--normalised applies only to --kind laplacian"));
            }
            let requested = parse_strength(args.a.as_deref().unwrap_or("1"))?;
            let a = resolve_a(requested, &net, args.nonmultiplex, cfg)?;
            let w = adjacency_for(&net, a, args.nonmultiplex)?;
            let m = match kind {
                OperatorKind::Adjacency => w,
                _ => assemble_laplacian(&w, args.normalised)?,
            };
            (m, Some(a))
        }
    };
    write_matrix_csv(&matrix, &args.out)?;
    let meta = json!({
        "kind": args.kind.as_str(),
        "a": a_used,
        "normalised": args.normalised,
        "nonmultiplex": args.nonmultiplex,
        "dim": matrix.dim(),
        "nnz": matrix.nnz(),
        "matrix_csv_digest": digest_file(&args.out)?,
    });
    write_json(
        sibling(&args.out, ".meta.json"),
        &embed(meta, provenance(cfg, &[("network", &args.input)])?),
    )
}

fn cmd_eigs(cfg: &RunConfig, args: &EigsArgs) -> Result<()> {
    let net = read_network(&args.input)?;
    let a = resolve_a(parse_strength(&args.a)?, &net, args.nonmultiplex, cfg)?;
    let w = adjacency_for(&net, a, args.nonmultiplex)?;
    let l = assemble_laplacian(&w, args.normalised)?;
    let mut es = smallest_eigenpairs(&l, args.k, cfg.eig_tol)?;
    let mut overlaps = None;
    if args.nonmultiplex {
        let sel = identify_spatial_nonmultiplex(&es, &net, es.k(), cfg.tau_temp)?;
        overlaps = Some(sel.m_values);
    } else if !args.normalised {
        classify_multiplex(&mut es, net.n(), net.t_count(), cfg.tau_cls)?;
    }
    let mut doc = eigenset_json(&es);
    if let Value::Object(map) = &mut doc {
        map.insert("normalised".to_string(), json!(args.normalised));
        map.insert("nonmultiplex".to_string(), json!(args.nonmultiplex));
        if let Some(m_values) = &overlaps {
            map.insert("temporal_overlaps".to_string(), json!(m_values));
        }
    }
    write_json(
        &args.out,
        &embed(doc, provenance(cfg, &[("network", &args.input)])?),
    )?;
    if let Some(prefix) = &args.heatmap {
        let map = index_map_for(&net, args.nonmultiplex)?;
        for (i, v) in es.vectors.iter().enumerate() {
            write_vector_heatmap_csv(v, &map, numbered(prefix, "eig", i + 1))?;
        }
    }
    Ok(())
}

fn cmd_cluster(cfg: &mut RunConfig, args: &ClusterArgs) -> Result<()> {
    cfg.a = parse_strength(&args.a)?;
    cfg.r = parse_rank(&args.r)?;
    if args.mu.is_some() {
        cfg.seba_mu = args.mu;
    }
    cfg.nonmultiplex = args.nonmultiplex;
    let net = read_network(&args.input)?;
    let pcfg = cfg.to_partition_config();
    let run = if cfg.nonmultiplex {
        run_nonmultiplex(&net, &pcfg)?
    } else {
        run_multiplex(&net, &pcfg)?
    };
    let prov = provenance(cfg, &[("network", &args.input)])?;
    write_json(&args.out, &embed(run_json(&run)?, prov.clone()))?;
    write_slice_norms_csv(&run.diagnostics.slice_norms, sibling(&args.out, ".norms.csv"))?;
    write_json(
        sibling(&args.out, ".packing.json"),
        &embed(packing_json(&run.packing, &run.index_map)?, prov),
    )?;
    if let Some(prefix) = &args.heatmap {
        for j in 0..run.seba_vectors.ncols() {
            let col = run.seba_vectors.column(j).into_owned();
            write_vector_heatmap_csv(&col, &run.index_map, numbered(prefix, "col", j + 1))?;
        }
    }
    Ok(())
}

fn cmd_cheeger(cfg: &RunConfig, args: &CheegerArgs) -> Result<()> {
    let net = read_network(&args.net)?;
    let map = index_map_for(&net, args.nonmultiplex)?;
    let packing = read_packing(&args.packing, &map)?;
    let a = resolve_a(parse_strength(&args.a)?, &net, args.nonmultiplex, cfg)?;
    let w = adjacency_for(&net, a, args.nonmultiplex)?;
    let ratios = element_ratios(&packing, &w, args.normalised, args.include_omega)?;
    let score = packing_score(&packing, &w, args.normalised, args.include_omega)?;
    let doc = json!({
        "a": a,
        "normalised": args.normalised,
        "include_omega": args.include_omega,
        "K": packing.k(),
        "element_ratios": ratios,
        "score": score,
    });
    let prov = provenance(cfg, &[("packing", &args.packing), ("network", &args.net)])?;
    emit(&embed(doc, prov), args.out.as_deref())
}

fn cmd_match(cfg: &RunConfig, args: &MatchArgs) -> Result<()> {
    let net = read_network(&args.net)?;
    let mut parts = Vec::with_capacity(args.partitions.len());
    for path in &args.partitions {
        parts.push(read_slice_partition(path)?);
    }
    let a = resolve_a(parse_strength(&args.a)?, &net, true, cfg)?;
    let linked = link_partitions(&parts, &net, a)?;
    let map = net.nonmultiplex_index_map();
    let slice_labels: Vec<Vec<Option<usize>>> = linked
        .slice_labels
        .iter()
        .map(|row| row.iter().map(|c| c.map(|k| k + 1)).collect())
        .collect();
    let mut doc = packing_json(&linked.packing, &map)?;
    if let Value::Object(obj) = &mut doc {
        obj.insert("a".to_string(), json!(a));
        obj.insert("slice_labels".to_string(), json!(slice_labels));
    }
    let mut inputs: Vec<(String, &Path)> = vec![("network".to_string(), args.net.as_path())];
    for (i, path) in args.partitions.iter().enumerate() {
        inputs.push((format!("partition-{}", i + 1), path.as_path()));
    }
    let borrowed: Vec<(&str, &Path)> = inputs.iter().map(|(r, p)| (r.as_str(), *p)).collect();
    write_json(&args.out, &embed(doc, provenance(cfg, &borrowed)?))
}

fn cmd_votes(cfg: &RunConfig, args: &VotesArgs) -> Result<()> {
    let table = VoteTable::from_csv_path(&args.csv)?;
    let (net, labels) = match args.mode {
        VoteMode::Senators => senator_network(&table)?,
        VoteMode::States => state_network(&table)?,
    };
    let mut doc = network_json(&net);
    if let Value::Object(map) = &mut doc {
        map.insert("slice_keys".to_string(), json!(table.t_keys()));
        map.insert(
            "mode".to_string(),
            json!(match args.mode {
                VoteMode::Senators => "senators",
                VoteMode::States => "states",
            }),
        );
    }
    write_json(
        &args.out,
        &embed(doc, provenance(cfg, &[("votes", &args.csv)])?),
    )?;
    write_labels_csv(&labels, sibling(&args.out, ".labels.csv"))?;
    match (&args.project_eigs, args.project_column, &args.project_out) {
        (None, None, None) => {}
        (Some(eigs_path), Some(column), Some(out_path)) => {
            if args.mode != VoteMode::Senators {
                return Err(Error::invalid(
                    "the state projection starts from the voter-level network; use --mode senators",
                ));
            }
            let es = read_eigenset(eigs_path)?;
            if column == 0 || column > es.k() {
                return Err(Error::invalid(format!(
                    "--project-column must lie in 1..={}, got {column}",
                    es.k()
                )));
            }
            let proj = project_to_states(&table, &net, &es.vectors[column - 1])?;
            write_state_projection_csv(&proj, out_path)?;
        }
        _ => {
            return Err(Error::invalid(
                "the state projection needs --project-eigs, --project-column, and --project-out together",
            ))
        }
    }
    Ok(())
}

fn cmd_transitions(cfg: &RunConfig, args: &TransitionsArgs) -> Result<()> {
    let (packing, map) = read_packing_standalone(&args.packing)?;
    let events = classify_transitions(&packing, &map, args.jmax.unwrap_or(cfg.jmax))?;
    let mut doc = transitions_json(&events);
    if let Value::Object(obj) = &mut doc {
        obj.insert("count".to_string(), json!(events.len()));
    }
    let prov = provenance(cfg, &[("packing", &args.packing)])?;
    emit(&embed(doc, prov), args.out.as_deref())
}
