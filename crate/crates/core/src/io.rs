//! File formats and atomic output writing.
//!
//! Everything on disk is 1-based: vertices `1..=N`, slices `1..=T`, packing
//! elements and matrix coordinates likewise. In-memory indices are 0-based
//! throughout the library; the conversions happen here and nowhere else.
//!
//! Structured data is JSON; plot-ready tables are CSV. Dense numeric blocks
//! (eigenvector matrices) travel as base64-encoded row-major little-endian
//! f64, which round-trips bit-exactly. All writers go through an
//! atomic temp-file-plus-rename so readers never observe partial files.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use nalgebra::{DMatrix, DVector};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cheeger::Packing;
use crate::error::{Error, Result};
use crate::graph::{Layer, SpacetimeIndexMap, TemporalCoupling, TemporalNetwork};
use crate::ingest::{StateProjection, VertexLabel};
use crate::matching::SlicePartition;
use crate::partition::{PartitionRun, SetId, TransitionEvent};
use crate::spectral::{EigenSet, Label};

// ---------------------------------------------------------------------------
// Atomic writes and digests

static WRITE_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Writes `bytes` to `path` via a temp file in the same directory plus a
/// rename, so concurrent readers see either the old or the new content.
pub fn atomic_write<P: AsRef<Path>>(path: P, bytes: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let stamp = WRITE_COUNTER.fetch_add(1, Ordering::Relaxed);
    let tmp_name = format!(
        ".{}.tmp.{}.{}",
        path.file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".to_string()),
        std::process::id(),
        stamp
    );
    let tmp = match dir {
        Some(d) => d.join(&tmp_name),
        None => Path::new(&tmp_name).to_path_buf(),
    };
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::from(e)
    })
}

/// 64-bit FNV-1a hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Content digest of a file, as `fnv1a64:<16 hex digits>`.
pub fn digest_file<P: AsRef<Path>>(path: P) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(format!("fnv1a64:{:016x}", fnv1a64(&bytes)))
}

/// Serialises `value` as pretty JSON (trailing newline) and writes it
/// atomically.
pub fn write_json<P: AsRef<Path>, T: Serialize>(path: P, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<P: AsRef<Path>, T: DeserializeOwned>(path: P) -> Result<T> {
    let bytes = std::fs::read(path)?;
    Ok(serde_json::from_slice(&bytes)?)
}

// ---------------------------------------------------------------------------
// Temporal-network JSON

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "T")]
    t: usize,
    layers: Vec<LayerFile>,
    temporal: TemporalFile,
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    t: usize,
    /// 1-based present vertices; omitted means all of `1..=N`.
    #[serde(skip_serializing_if = "Option::is_none")]
    present: Option<Vec<usize>>,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TemporalFile {
    Chain(String),
    Graph { edges: Vec<(usize, usize, f64)> },
}

/// Temporal network as a JSON value (1-based vertices and slices).
pub fn network_json(net: &TemporalNetwork) -> Value {
    let layers = net
        .layers()
        .iter()
        .enumerate()
        .map(|(t, l)| LayerFile {
            t: t + 1,
            present: Some(l.present.iter().map(|&x| x + 1).collect()),
            edges: l.edges.iter().map(|&(x, y, w)| (x + 1, y + 1, w)).collect(),
        })
        .collect();
    let temporal = match net.temporal() {
        TemporalCoupling::Chain => TemporalFile::Chain("chain".to_string()),
        TemporalCoupling::Graph(edges) => TemporalFile::Graph {
            edges: edges.iter().map(|&(t, s, w)| (t + 1, s + 1, w)).collect(),
        },
    };
    serde_json::to_value(NetworkFile {
        n: net.n(),
        t: net.t_count(),
        layers,
        temporal,
    })
    .expect("network serialisation cannot fail")
}

/// Writes a temporal network as JSON (1-based vertices and slices).
pub fn write_network<P: AsRef<Path>>(net: &TemporalNetwork, path: P) -> Result<()> {
    write_json(path, &network_json(net))
}

fn shift_down(value: usize, what: &str, max: usize) -> Result<usize> {
    if value == 0 || value > max {
        return Err(Error::invalid(format!(
            "{what} {value} out of range 1..={max}"
        )));
    }
    Ok(value - 1)
}

pub fn read_network<P: AsRef<Path>>(path: P) -> Result<TemporalNetwork> {
    let file: NetworkFile = read_json(path)?;
    if file.layers.len() != file.t {
        return Err(Error::invalid(format!(
            "file declares T={} but contains {} layers",
            file.t,
            file.layers.len()
        )));
    }
    let mut layers = Vec::with_capacity(file.t);
    for (i, l) in file.layers.into_iter().enumerate() {
        if l.t != i + 1 {
            return Err(Error::invalid(format!(
                "layer {} is labelled t={}, expected {}",
                i,
                l.t,
                i + 1
            )));
        }
        let present = match l.present {
            Some(p) => p
                .into_iter()
                .map(|x| shift_down(x, "present vertex", file.n))
                .collect::<Result<Vec<_>>>()?,
            None => (0..file.n).collect(),
        };
        let edges = l
            .edges
            .into_iter()
            .map(|(x, y, w)| {
                Ok((
                    shift_down(x, "edge vertex", file.n)?,
                    shift_down(y, "edge vertex", file.n)?,
                    w,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        layers.push(Layer { present, edges });
    }
    let temporal = match file.temporal {
        TemporalFile::Chain(tag) if tag == "chain" => TemporalCoupling::Chain,
        TemporalFile::Chain(tag) => {
            return Err(Error::invalid(format!(
                "unknown temporal coupling {tag:?}; expected \"chain\" or an edge object"
            )))
        }
        TemporalFile::Graph { edges } => TemporalCoupling::Graph(
            edges
                .into_iter()
                .map(|(t, s, w)| {
                    Ok((
                        shift_down(t, "temporal edge slice", file.t)?,
                        shift_down(s, "temporal edge slice", file.t)?,
                        w,
                    ))
                })
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    TemporalNetwork::new(file.n, layers, temporal)
}

// ---------------------------------------------------------------------------
// Temporal-network CSV (edge list + presence sidecar; chain coupling only)

/// Writes the edge list as CSV (`t,x,y,w`, 1-based) plus a presence sidecar
/// (`t,x`).
pub fn write_network_csv<P: AsRef<Path>, Q: AsRef<Path>>(
    net: &TemporalNetwork,
    edges_path: P,
    presence_path: Q,
) -> Result<()> {
    let mut edges = String::from("t,x,y,w\n");
    let mut presence = String::from("t,x\n");
    for (t, l) in net.layers().iter().enumerate() {
        for &(x, y, w) in &l.edges {
            let _ = writeln!(edges, "{},{},{},{}", t + 1, x + 1, y + 1, w);
        }
        for &x in &l.present {
            let _ = writeln!(presence, "{},{}", t + 1, x + 1);
        }
    }
    atomic_write(edges_path, edges.as_bytes())?;
    atomic_write(presence_path, presence.as_bytes())
}

/// Reads the CSV pair written by [`write_network_csv`]. `N` and `T` are
/// inferred from the presence sidecar; the temporal coupling is the chain.
pub fn read_network_csv<P: AsRef<Path>, Q: AsRef<Path>>(
    edges_path: P,
    presence_path: Q,
) -> Result<TemporalNetwork> {
    let mut presence_rows: Vec<(usize, usize)> = Vec::new();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(presence_path.as_ref())?;
    for row in rdr.records() {
        let row = row?;
        let t: usize = parse_csv_field(row.get(0), "t")?;
        let x: usize = parse_csv_field(row.get(1), "x")?;
        if t == 0 || x == 0 {
            return Err(Error::invalid("presence entries are 1-based"));
        }
        presence_rows.push((t - 1, x - 1));
    }
    if presence_rows.is_empty() {
        return Err(Error::invalid("presence file contains no rows"));
    }
    let t_count = presence_rows.iter().map(|&(t, _)| t).max().unwrap() + 1;
    let n = presence_rows.iter().map(|&(_, x)| x).max().unwrap() + 1;
    let mut layers = vec![
        Layer {
            present: Vec::new(),
            edges: Vec::new(),
        };
        t_count
    ];
    for (t, x) in presence_rows {
        layers[t].present.push(x);
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(edges_path.as_ref())?;
    for row in rdr.records() {
        let row = row?;
        let t: usize = parse_csv_field(row.get(0), "t")?;
        let x: usize = parse_csv_field(row.get(1), "x")?;
        let y: usize = parse_csv_field(row.get(2), "y")?;
        let w: f64 = parse_csv_field(row.get(3), "w")?;
        if t == 0 || x == 0 || y == 0 {
            return Err(Error::invalid("edge entries are 1-based"));
        }
        if t > t_count {
            return Err(Error::invalid(format!(
                "edge slice {t} exceeds the presence file's {t_count} slices"
            )));
        }
        layers[t - 1].edges.push((x - 1, y - 1, w));
    }
    for layer in &mut layers {
        layer.present.sort_unstable();
        layer.present.dedup();
    }
    TemporalNetwork::new(n, layers, TemporalCoupling::Chain)
}

fn parse_csv_field<T: std::str::FromStr>(field: Option<&str>, name: &str) -> Result<T> {
    field
        .ok_or_else(|| Error::invalid(format!("missing CSV column {name}")))?
        .parse()
        .map_err(|_| Error::invalid(format!("unparseable CSV value for column {name}")))
}

// ---------------------------------------------------------------------------
// Packing JSON

/// Packing as JSON: elements and remainder as lists of 1-based `[t, x]`
/// pairs.
pub fn packing_json(p: &Packing, map: &SpacetimeIndexMap) -> Result<Value> {
    if p.n() != map.len() {
        return Err(Error::invalid(format!(
            "packing over {} vertices does not match index map size {}",
            p.n(),
            map.len()
        )));
    }
    let pairs = |flats: &[usize]| -> Vec<(usize, usize)> {
        flats
            .iter()
            .map(|&f| {
                let (t, x) = map.from_flat(f);
                (t + 1, x + 1)
            })
            .collect()
    };
    Ok(json!({
        "K": p.k(),
        "T": map.t_count(),
        "elements": p.elements().iter().map(|el| pairs(el)).collect::<Vec<_>>(),
        "omega": pairs(p.omega()),
    }))
}

pub fn write_packing<P: AsRef<Path>>(
    p: &Packing,
    map: &SpacetimeIndexMap,
    path: P,
) -> Result<()> {
    write_json(path, &packing_json(p, map)?)
}

#[derive(Deserialize)]
struct PackingFile {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "T", default)]
    t: Option<usize>,
    elements: Vec<Vec<(usize, usize)>>,
    #[serde(default)]
    omega: Vec<(usize, usize)>,
}

pub fn read_packing<P: AsRef<Path>>(path: P, map: &SpacetimeIndexMap) -> Result<Packing> {
    let file: PackingFile = read_json(path)?;
    if file.elements.len() != file.k {
        return Err(Error::invalid(format!(
            "file declares K={} but lists {} elements",
            file.k,
            file.elements.len()
        )));
    }
    if let Some(t) = file.t {
        if t != map.t_count() {
            return Err(Error::invalid(format!(
                "packing file covers {} slices but the network has {}",
                t,
                map.t_count()
            )));
        }
    }
    let to_flats = |pairs: &[(usize, usize)]| -> Result<Vec<usize>> {
        pairs
            .iter()
            .map(|&(t, x)| {
                if t == 0 || x == 0 {
                    return Err(Error::invalid("packing entries are 1-based"));
                }
                map.to_flat(t - 1, x - 1).ok_or_else(|| {
                    Error::invalid(format!(
                        "packing entry [{t}, {x}] is not a present space-time vertex"
                    ))
                })
            })
            .collect()
    };
    let elements = file
        .elements
        .iter()
        .map(|el| to_flats(el))
        .collect::<Result<Vec<_>>>()?;
    let omega = to_flats(&file.omega)?;
    Packing::with_omega(elements, omega, map.len())
}

/// Reads a packing file without a network: since a packing's elements plus
/// remainder tile every slice they mention, the per-slice present sets — and
/// with them the whole index map — are recoverable from the file alone.
pub fn read_packing_standalone<P: AsRef<Path>>(
    path: P,
) -> Result<(Packing, SpacetimeIndexMap)> {
    let file: PackingFile = read_json(path)?;
    if file.elements.len() != file.k {
        return Err(Error::invalid(format!(
            "file declares K={} but lists {} elements",
            file.k,
            file.elements.len()
        )));
    }
    let all_pairs = file
        .elements
        .iter()
        .flatten()
        .chain(file.omega.iter());
    let mut max_t = 0;
    for &(t, x) in all_pairs.clone() {
        if t == 0 || x == 0 {
            return Err(Error::invalid("packing entries are 1-based"));
        }
        max_t = max_t.max(t);
    }
    if max_t == 0 {
        return Err(Error::invalid("packing file contains no vertices"));
    }
    let t_count = match file.t {
        Some(t) if t < max_t => {
            return Err(Error::invalid(format!(
                "packing file declares T={t} but mentions slice {max_t}"
            )))
        }
        Some(t) => t,
        None => max_t,
    };
    let mut present: Vec<Vec<usize>> = vec![Vec::new(); t_count];
    for &(t, x) in all_pairs {
        present[t - 1].push(x - 1);
    }
    for (t, slice) in present.iter_mut().enumerate() {
        if slice.is_empty() {
            return Err(Error::invalid(format!(
                "packing file covers no vertices in slice {}",
                t + 1
            )));
        }
        slice.sort_unstable();
        slice.dedup();
    }
    let mut offsets = Vec::with_capacity(t_count + 1);
    offsets.push(0);
    for slice in &present {
        offsets.push(offsets.last().unwrap() + slice.len());
    }
    let map = SpacetimeIndexMap::Sparse { offsets, present };
    let to_flats = |pairs: &[(usize, usize)]| -> Vec<usize> {
        pairs
            .iter()
            .map(|&(t, x)| map.to_flat(t - 1, x - 1).expect("pair defined the map"))
            .collect()
    };
    let elements: Vec<Vec<usize>> = file.elements.iter().map(|el| to_flats(el)).collect();
    let omega = to_flats(&file.omega);
    let packing = Packing::with_omega(elements, omega, map.len())?;
    Ok((packing, map))
}

// ---------------------------------------------------------------------------
// Dense matrix blocks (base64) and eigen data

/// Dense matrix as `{rows, cols, data}` with row-major little-endian f64
/// base64 payload; bit-exact round trip.
pub fn matrix_json(m: &DMatrix<f64>) -> Value {
    let mut bytes = Vec::with_capacity(m.nrows() * m.ncols() * 8);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            bytes.extend_from_slice(&m[(i, j)].to_le_bytes());
        }
    }
    json!({
        "rows": m.nrows(),
        "cols": m.ncols(),
        "data": B64.encode(bytes),
    })
}

pub fn matrix_from_json(v: &Value) -> Result<DMatrix<f64>> {
    let rows = v["rows"]
        .as_u64()
        .ok_or_else(|| Error::invalid("matrix block lacks rows"))? as usize;
    let cols = v["cols"]
        .as_u64()
        .ok_or_else(|| Error::invalid("matrix block lacks cols"))? as usize;
    let data = v["data"]
        .as_str()
        .ok_or_else(|| Error::invalid("matrix block lacks data"))?;
    let bytes = B64
        .decode(data)
        .map_err(|e| Error::invalid(format!("bad base64 matrix payload: {e}")))?;
    if bytes.len() != rows * cols * 8 {
        return Err(Error::invalid(format!(
            "matrix payload holds {} bytes, expected {}",
            bytes.len(),
            rows * cols * 8
        )));
    }
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let off = (i * cols + j) * 8;
            m[(i, j)] = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        }
    }
    Ok(m)
}

fn parse_label(s: &str) -> Result<Label> {
    match s {
        "spatial" => Ok(Label::Spatial),
        "temporal" => Ok(Label::Temporal),
        "unclassified" => Ok(Label::Unclassified),
        other => Err(Error::invalid(format!("unknown eigenvector label {other:?}"))),
    }
}

/// Eigen data as JSON: strength, ascending eigenvalues, labels, and the
/// eigenvector matrix (columns in eigenvalue order) as a base64 block.
pub fn eigenset_json(es: &EigenSet) -> Value {
    json!({
        "a": es.a,
        "op_scale": es.op_scale,
        "values": es.values,
        "labels": es.labels.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
        "vectors": matrix_json(&es.vector_matrix()),
    })
}

pub fn write_eigenset<P: AsRef<Path>>(es: &EigenSet, path: P) -> Result<()> {
    write_json(path, &eigenset_json(es))
}

pub fn read_eigenset<P: AsRef<Path>>(path: P) -> Result<EigenSet> {
    let v: Value = read_json(path)?;
    let a = v["a"]
        .as_f64()
        .ok_or_else(|| Error::invalid("eigen file lacks a"))?;
    let op_scale = v["op_scale"]
        .as_f64()
        .ok_or_else(|| Error::invalid("eigen file lacks op_scale"))?;
    let values: Vec<f64> = serde_json::from_value(v["values"].clone())?;
    let label_names: Vec<String> = serde_json::from_value(v["labels"].clone())?;
    let labels = label_names
        .iter()
        .map(|s| parse_label(s))
        .collect::<Result<Vec<_>>>()?;
    let m = matrix_from_json(&v["vectors"])?;
    if m.ncols() != values.len() || labels.len() != values.len() {
        return Err(Error::invalid(
            "eigen file values, labels and vectors disagree in count",
        ));
    }
    let vectors = (0..m.ncols())
        .map(|j| DVector::from_column_slice(m.column(j).as_slice()))
        .collect();
    Ok(EigenSet {
        a,
        values,
        vectors,
        labels,
        op_scale,
    })
}

// ---------------------------------------------------------------------------
// Plot-ready CSV tables

/// Sparse matrix as 1-based `row,col,value` triplets (values summed over
/// duplicate coordinates, sorted, zeros dropped).
pub fn write_matrix_csv<P: AsRef<Path>>(
    m: &crate::supra::SupraMatrix,
    path: P,
) -> Result<()> {
    let mut cells: std::collections::BTreeMap<(usize, usize), f64> = std::collections::BTreeMap::new();
    for e in m.entries() {
        *cells.entry((e.row, e.col)).or_insert(0.0) += e.value;
    }
    let mut out = String::from("row,col,value\n");
    for ((r, c), v) in cells {
        if v != 0.0 {
            let _ = writeln!(out, "{},{},{}", r + 1, c + 1, v);
        }
    }
    atomic_write(path, out.as_bytes())
}

/// Flat vector as 1-based `t,x,value` rows for heatmap plotting.
pub fn write_vector_heatmap_csv<P: AsRef<Path>>(
    v: &DVector<f64>,
    map: &SpacetimeIndexMap,
    path: P,
) -> Result<()> {
    if v.len() != map.len() {
        return Err(Error::invalid(format!(
            "vector length {} does not match index map size {}",
            v.len(),
            map.len()
        )));
    }
    let mut out = String::from("t,x,value\n");
    for flat in 0..map.len() {
        let (t, x) = map.from_flat(flat);
        let _ = writeln!(out, "{},{},{}", t + 1, x + 1, v[flat]);
    }
    atomic_write(path, out.as_bytes())
}

/// Per-slice norm tables as `k,t,norm` rows, both 1-based; `k` numbers the
/// selected eigenvectors in order.
pub fn write_slice_norms_csv<P: AsRef<Path>>(tables: &[Vec<f64>], path: P) -> Result<()> {
    let mut out = String::from("k,t,norm\n");
    for (k, table) in tables.iter().enumerate() {
        for (t, norm) in table.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", k + 1, t + 1, norm);
        }
    }
    atomic_write(path, out.as_bytes())
}

/// Vertex label sidecar as `vertex,id,state,party` with 1-based vertex ids.
pub fn write_labels_csv<P: AsRef<Path>>(labels: &[VertexLabel], path: P) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["vertex", "id", "state", "party"])?;
    for (i, l) in labels.iter().enumerate() {
        w.write_record([&(i + 1).to_string(), &l.id, &l.state, &l.party])?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::invalid(format!("CSV buffer error: {e}")))?;
    atomic_write(path, &bytes)
}

/// Per-(state, slice key) eigenvector averages as `state,t,value`; slices
/// where a state has no votes are skipped.
pub fn write_state_projection_csv<P: AsRef<Path>>(
    proj: &StateProjection,
    path: P,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["state", "t", "value"])?;
    for (s, state) in proj.states.iter().enumerate() {
        for (slice, cell) in proj.values[s].iter().enumerate() {
            if let Some(v) = cell {
                w.write_record([state, &proj.t_keys[slice].to_string(), &v.to_string()])?;
            }
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::invalid(format!("CSV buffer error: {e}")))?;
    atomic_write(path, &bytes)
}

// ---------------------------------------------------------------------------
// Per-slice partitions (input to the linking step)

#[derive(Serialize, Deserialize)]
struct SlicePartitionFile {
    /// Clusters as lists of 1-based vertex ids.
    clusters: Vec<Vec<usize>>,
    /// 1-based index of the cluster that represents unclustered vertices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega: Option<usize>,
}

pub fn write_slice_partition<P: AsRef<Path>>(part: &SlicePartition, path: P) -> Result<()> {
    write_json(
        path,
        &SlicePartitionFile {
            clusters: part
                .clusters
                .iter()
                .map(|c| c.iter().map(|&x| x + 1).collect())
                .collect(),
            omega: part.omega.map(|o| o + 1),
        },
    )
}

pub fn read_slice_partition<P: AsRef<Path>>(path: P) -> Result<SlicePartition> {
    let file: SlicePartitionFile = read_json(path)?;
    let clusters = file
        .clusters
        .iter()
        .map(|c| {
            c.iter()
                .map(|&x| {
                    if x == 0 {
                        Err(Error::invalid("cluster vertices are 1-based"))
                    } else {
                        Ok(x - 1)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let omega = match file.omega {
        Some(0) => return Err(Error::invalid("omega cluster index is 1-based")),
        Some(o) => {
            if o > clusters.len() {
                return Err(Error::invalid(format!(
                    "omega cluster {o} out of range for {} clusters",
                    clusters.len()
                )));
            }
            Some(o - 1)
        }
        None => None,
    };
    Ok(SlicePartition { clusters, omega })
}

// ---------------------------------------------------------------------------
// Partition runs and transitions

fn index_map_json(map: &SpacetimeIndexMap) -> Value {
    match map {
        SpacetimeIndexMap::Multiplex { n, t_count } => json!({
            "kind": "multiplex",
            "N": n,
            "T": t_count,
        }),
        SpacetimeIndexMap::Sparse { .. } => {
            let present: Vec<Vec<usize>> = (0..map.t_count())
                .map(|t| {
                    map.slice_range(t)
                        .map(|flat| map.from_flat(flat).1 + 1)
                        .collect()
                })
                .collect();
            json!({
                "kind": "present-copies",
                "T": map.t_count(),
                "present": present,
            })
        }
    }
}

/// Full partition run as one JSON object (packing, scores, selection
/// diagnostics, and both SEBA matrices).
pub fn run_json(run: &PartitionRun) -> Result<Value> {
    let d = &run.diagnostics;
    Ok(json!({
        "a": run.a,
        "R": run.r,
        "multiplex": run.multiplex,
        "index_map": index_map_json(&run.index_map),
        "packing": packing_json(&run.packing, &run.index_map)?,
        "element_source_columns": run.element_sources.iter().map(|&c| c + 1).collect::<Vec<_>>(),
        "spurious_columns": run.spurious.iter().map(|&c| c + 1).collect::<Vec<_>>(),
        "column_scores": run.column_scores.iter().map(|s| json!({
            "column": s.column + 1,
            "support_size": s.support_size,
            "cut": s.cut,
            "ratio": s.ratio,
        })).collect::<Vec<_>>(),
        "seba_input": matrix_json(&run.seba_inputs),
        "seba_vectors": matrix_json(&run.seba_vectors),
        "diagnostics": {
            "eigenvalues": d.eigenvalues,
            "labels": d.labels.iter().map(|l| l.as_str()).collect::<Vec<_>>(),
            "spatial_values": d.spatial_values,
            "relative_gaps": d.relative_gaps,
            "mean_cut_ratios": d.mean_ratios.iter().map(|&(r, h)| {
                json!([r, if h.is_finite() { Value::from(h) } else { Value::Null }])
            }).collect::<Vec<_>>(),
            "r_from_gap": d.r_from_gap,
            "r_from_ratio": d.r_from_ratio,
            "temporal_overlaps": d.temporal_overlaps,
            "slice_norms": d.slice_norms,
            "a_balanced": d.a_balanced,
            "warnings": d.warnings,
        },
    }))
}

fn set_id_json(s: SetId) -> Value {
    match s {
        SetId::Omega => json!("omega"),
        SetId::Element(k) => json!({ "element": k + 1 }),
    }
}

/// Transition events as JSON, with 1-based slices and element ids.
pub fn transitions_json(events: &[TransitionEvent]) -> Value {
    json!({
        "events": events.iter().map(|e| json!({
            "t": e.t + 1,
            "kind": e.kind.as_str(),
            "J": e.j,
            "actor": set_id_json(e.actor),
            "targets": e.targets.iter().map(|&t| set_id_json(t)).collect::<Vec<_>>(),
            "shrinking": e.shrinking,
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::TransitionKind;

    fn tmp(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("stcluster-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    fn sparse_net() -> TemporalNetwork {
        TemporalNetwork::new(
            3,
            vec![
                Layer {
                    present: vec![0, 1],
                    edges: vec![(0, 1, 0.5)],
                },
                Layer {
                    present: vec![0, 1, 2],
                    edges: vec![(0, 1, 1.0), (1, 2, 2.0)],
                },
            ],
            TemporalCoupling::Chain,
        )
        .unwrap()
    }

    #[test]
    fn network_json_round_trips() {
        let net = sparse_net();
        let path = tmp("net.json");
        write_network(&net, &path).unwrap();
        assert_eq!(read_network(&path).unwrap(), net);
    }

    #[test]
    fn network_json_round_trips_with_a_temporal_graph() {
        let net = TemporalNetwork::new(
            2,
            vec![
                Layer {
                    present: vec![0, 1],
                    edges: vec![(0, 1, 1.0)],
                },
                Layer {
                    present: vec![0, 1],
                    edges: vec![(0, 1, 2.0)],
                },
                Layer {
                    present: vec![0, 1],
                    edges: vec![],
                },
            ],
            TemporalCoupling::Graph(vec![(0, 1, 1.0), (1, 2, 0.5), (0, 2, 0.25)]),
        )
        .unwrap();
        let path = tmp("net-graph.json");
        write_network(&net, &path).unwrap();
        assert_eq!(read_network(&path).unwrap(), net);
    }

    #[test]
    fn network_json_rejects_zero_based_vertices() {
        let path = tmp("net-bad.json");
        atomic_write(
            &path,
            br#"{"N":2,"T":1,"layers":[{"t":1,"present":[0,1],"edges":[]}],"temporal":"chain"}"#,
        )
        .unwrap();
        assert!(read_network(&path).is_err());
    }

    #[test]
    fn network_csv_round_trips() {
        let net = sparse_net();
        let ep = tmp("net-edges.csv");
        let pp = tmp("net-presence.csv");
        write_network_csv(&net, &ep, &pp).unwrap();
        assert_eq!(read_network_csv(&ep, &pp).unwrap(), net);
    }

    #[test]
    fn packing_round_trips_through_a_sparse_map() {
        let net = sparse_net();
        let map = net.nonmultiplex_index_map();
        let packing = Packing::new(vec![vec![0, 2], vec![1, 3]], map.len()).unwrap();
        let path = tmp("packing.json");
        write_packing(&packing, &map, &path).unwrap();
        let back = read_packing(&path, &map).unwrap();
        assert_eq!(back.elements(), packing.elements());
        assert_eq!(back.omega(), packing.omega());
    }

    #[test]
    fn packing_rejects_absent_spacetime_vertices() {
        let net = sparse_net();
        let map = net.nonmultiplex_index_map();
        let path = tmp("packing-bad.json");
        // Vertex 3 is absent from slice 1.
        atomic_write(
            &path,
            br#"{"K":1,"elements":[[[1,3]]],"omega":[]}"#,
        )
        .unwrap();
        assert!(read_packing(&path, &map).is_err());
    }

    #[test]
    fn standalone_packing_reader_recovers_the_map() {
        let net = sparse_net();
        let map = net.nonmultiplex_index_map();
        let packing = Packing::new(vec![vec![0, 2], vec![1, 4]], map.len()).unwrap();
        let path = tmp("packing-standalone.json");
        write_packing(&packing, &map, &path).unwrap();
        let (back, back_map) = read_packing_standalone(&path).unwrap();
        assert_eq!(back_map, map);
        assert_eq!(back.elements(), packing.elements());
        assert_eq!(back.omega(), packing.omega());
    }

    #[test]
    fn matrix_blocks_are_bit_exact() {
        let m = DMatrix::from_row_slice(
            2,
            3,
            &[0.1, -2.5e-17, f64::MIN_POSITIVE, 3.0, 1.0 / 3.0, -0.0],
        );
        let back = matrix_from_json(&matrix_json(&m)).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                assert_eq!(m[(i, j)].to_bits(), back[(i, j)].to_bits());
            }
        }
    }

    #[test]
    fn eigenset_round_trips() {
        let net = sparse_net();
        let w = crate::graph::build_nonmultiplex_adjacency(&net, 1.0).unwrap();
        let l = crate::graph::assemble_laplacian(&w, false).unwrap();
        let es = crate::spectral::smallest_eigenpairs(&l, 3, 1e-9).unwrap();
        let path = tmp("eigs.json");
        write_eigenset(&es, &path).unwrap();
        let back = read_eigenset(&path).unwrap();
        assert_eq!(back.a, es.a);
        assert_eq!(back.values, es.values);
        assert_eq!(back.labels, es.labels);
        for (u, v) in es.vectors.iter().zip(&back.vectors) {
            assert_eq!(u, v);
        }
    }

    #[test]
    fn digest_matches_known_fnv_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        let path = tmp("digest.bin");
        atomic_write(&path, b"a").unwrap();
        assert_eq!(digest_file(&path).unwrap(), "fnv1a64:af63dc4c8601ec8c");
    }

    #[test]
    fn atomic_write_replaces_existing_content() {
        let path = tmp("atomic.txt");
        atomic_write(&path, b"first").unwrap();
        atomic_write(&path, b"second").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"second");
        // No temp droppings left behind.
        let dir = path.parent().unwrap();
        let leftovers: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().contains("atomic.txt.tmp"))
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn slice_partition_round_trips() {
        let part = SlicePartition {
            clusters: vec![vec![0, 2], vec![1]],
            omega: Some(1),
        };
        let path = tmp("part.json");
        write_slice_partition(&part, &path).unwrap();
        let back = read_slice_partition(&path).unwrap();
        assert_eq!(back.clusters, part.clusters);
        assert_eq!(back.omega, part.omega);
    }

    #[test]
    fn transitions_export_is_one_based() {
        let events = vec![TransitionEvent {
            t: 0,
            kind: TransitionKind::Appearance,
            j: 2,
            actor: SetId::Omega,
            targets: vec![SetId::Element(0), SetId::Element(1)],
            shrinking: false,
        }];
        let v = transitions_json(&events);
        let e = &v["events"][0];
        assert_eq!(e["t"], 1);
        assert_eq!(e["kind"], "appearance");
        assert_eq!(e["actor"], "omega");
        assert_eq!(e["targets"][0]["element"], 1);
    }

    #[test]
    fn run_export_contains_the_packing_and_matrices() {
        let net = TemporalNetwork::fully_present(
            4,
            vec![vec![(0, 1, 1.0), (1, 2, 0.1), (2, 3, 1.0)]; 2],
        )
        .unwrap();
        let run =
            crate::partition::run_multiplex(&net, &crate::partition::PartitionConfig::default())
                .unwrap();
        let v = run_json(&run).unwrap();
        assert_eq!(v["R"], 1);
        assert_eq!(v["packing"]["K"], 2);
        assert!(v["seba_vectors"]["rows"].as_u64().unwrap() == 8);
        assert!(v["diagnostics"]["a_balanced"].as_bool().unwrap());
        let m = matrix_from_json(&v["seba_vectors"]).unwrap();
        assert_eq!(m.nrows(), 8);
    }
}
