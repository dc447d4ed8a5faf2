//! Roll-call vote ingestion.
//!
//! Turns a table of recorded votes into voting-similarity temporal networks:
//! one with individual voters as vertices (vertices appear only in slices
//! where they voted), and one with states as vertices (every state must be
//! represented in every slice). Weights are fractions of identical votes
//! over commonly-voted bills, so they always land in `[0, 1]`.
//!
//! Input is CSV with a header containing the columns
//! `t,bill,voter,state,party,vote` (any order, extra columns ignored).
//! `t` is a nonnegative integer slice key — keys need not be contiguous,
//! their sorted order defines the slices. `vote` is one of `y`, `n`, `a`
//! (case-insensitive), stored as +1, -1, 0.
//!
//! Modelling caveat: an abstention is a recorded vote with value 0, so two
//! voters (or two states with aggregate 0) abstaining on the same bill count
//! as agreeing on it.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Layer, TemporalCoupling, TemporalNetwork};

/// One recorded vote.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteRecord {
    /// Time-slice key as given in the file (e.g. a congress number).
    pub t: u32,
    pub bill: String,
    pub voter: String,
    pub state: String,
    pub party: String,
    /// +1 yes, -1 no, 0 abstention.
    pub vote: i8,
}

/// A validated table of vote records with unique `(t, bill, voter)` keys.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteTable {
    records: Vec<VoteRecord>,
    t_keys: Vec<u32>,
}

/// Sidecar entry tying a vertex index to its source labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLabel {
    pub id: String,
    pub state: String,
    pub party: String,
}

/// Orders identifier strings numerically when both parse as integers,
/// lexicographically otherwise, so vertex numbering never depends on record
/// order in the file.
fn id_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        _ => a.cmp(b),
    }
}

fn parse_vote(raw: &str, line: usize) -> Result<i8> {
    match raw.trim().to_ascii_lowercase().as_str() {
        "y" => Ok(1),
        "n" => Ok(-1),
        "a" => Ok(0),
        other => Err(Error::invalid(format!(
            "line {line}: vote must be y, n or a, got {other:?}"
        ))),
    }
}

impl VoteTable {
    /// Parses and validates a CSV vote table.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::invalid(format!("missing column {name:?} in header")))
        };
        let (ct, cbill, cvoter, cstate, cparty, cvote) = (
            col("t")?,
            col("bill")?,
            col("voter")?,
            col("state")?,
            col("party")?,
            col("vote")?,
        );
        let mut records = Vec::new();
        let mut seen: BTreeSet<(u32, String, String)> = BTreeSet::new();
        for (i, row) in rdr.records().enumerate() {
            let line = i + 2; // header is line 1
            let row = row?;
            let field = |c: usize| row.get(c).unwrap_or("").to_string();
            let t: u32 = field(ct).parse().map_err(|_| {
                Error::invalid(format!(
                    "line {line}: slice key must be a nonnegative integer, got {:?}",
                    field(ct)
                ))
            })?;
            let bill = field(cbill);
            let voter = field(cvoter);
            let state = field(cstate);
            if bill.is_empty() || voter.is_empty() || state.is_empty() {
                return Err(Error::invalid(format!(
                    "line {line}: bill, voter and state must be nonempty"
                )));
            }
            if !seen.insert((t, bill.clone(), voter.clone())) {
                return Err(Error::invalid(format!(
                    "line {line}: duplicate record for slice {t}, bill {bill:?}, voter {voter:?}"
                )));
            }
            records.push(VoteRecord {
                t,
                bill,
                voter,
                state,
                party: field(cparty),
                vote: parse_vote(&field(cvote), line)?,
            });
        }
        if records.is_empty() {
            return Err(Error::invalid("vote table contains no records"));
        }
        let t_keys: Vec<u32> = records
            .iter()
            .map(|r| r.t)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(Self { records, t_keys })
    }

    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn records(&self) -> &[VoteRecord] {
        &self.records
    }

    /// Distinct slice keys, ascending; their positions are the slice indices.
    pub fn t_keys(&self) -> &[u32] {
        &self.t_keys
    }

    pub fn t_count(&self) -> usize {
        self.t_keys.len()
    }

    fn slice_of(&self, t: u32) -> usize {
        self.t_keys.binary_search(&t).expect("slice key from table")
    }
}

/// Distinct voter ids in deterministic order plus the reverse lookup.
fn voter_universe(table: &VoteTable) -> (Vec<String>, BTreeMap<String, usize>) {
    let mut ids: Vec<String> = table
        .records
        .iter()
        .map(|r| r.voter.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    ids.sort_by(|a, b| id_cmp(a, b));
    let index = ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect();
    (ids, index)
}

/// Shared agreement count over the intersection of two sorted `(key, value)`
/// lists: returns `(common, agreeing)`.
fn overlap_agreement<T: Eq>(a: &[(usize, T)], b: &[(usize, T)]) -> (usize, usize) {
    let (mut i, mut j) = (0, 0);
    let (mut common, mut agree) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                common += 1;
                if a[i].1 == b[j].1 {
                    agree += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    (common, agree)
}

fn intern_bills(table: &VoteTable) -> BTreeMap<&str, usize> {
    table
        .records
        .iter()
        .map(|r| r.bill.as_str())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .enumerate()
        .map(|(i, b)| (b, i))
        .collect()
}

/// Latest-slice label per voter; ties inside a slice resolve to the
/// lexicographically smallest `(state, party)` pair so the result never
/// depends on record order.
fn voter_labels(table: &VoteTable, ids: &[String], index: &BTreeMap<String, usize>) -> Vec<VertexLabel> {
    let mut best: Vec<Option<(u32, String, String)>> = vec![None; ids.len()];
    for r in &table.records {
        let v = index[&r.voter];
        let cand = (r.t, r.state.clone(), r.party.clone());
        match &best[v] {
            Some(cur) if cur.0 > cand.0 => {}
            Some(cur) if cur.0 == cand.0 && (&cur.1, &cur.2) <= (&cand.1, &cand.2) => {}
            _ => best[v] = Some(cand),
        }
    }
    ids.iter()
        .zip(best)
        .map(|(id, b)| {
            let (_, state, party) = b.expect("every voter has a record");
            VertexLabel {
                id: id.clone(),
                state,
                party,
            }
        })
        .collect()
}

/// Voting-similarity network over individual voters.
///
/// A voter is present in a slice iff they have at least one record there;
/// the weight between two voters is the fraction of bills both recorded a
/// vote on where the recorded values coincide. Pairs with no common bill
/// get no edge. Temporal coupling is the chain of present copies.
pub fn senator_network(table: &VoteTable) -> Result<(TemporalNetwork, Vec<VertexLabel>)> {
    let (ids, index) = voter_universe(table);
    let bills = intern_bills(table);
    let t_count = table.t_count();

    // ballots[slice][voter] = sorted (bill, vote) list
    let mut ballots: Vec<BTreeMap<usize, Vec<(usize, i8)>>> = vec![BTreeMap::new(); t_count];
    for r in &table.records {
        ballots[table.slice_of(r.t)]
            .entry(index[&r.voter])
            .or_default()
            .push((bills[r.bill.as_str()], r.vote));
    }
    let mut layers = Vec::with_capacity(t_count);
    for slice in &mut ballots {
        for list in slice.values_mut() {
            list.sort_unstable_by_key(|&(b, _)| b);
        }
        let present: Vec<usize> = slice.keys().copied().collect();
        let mut edges = Vec::new();
        for (pi, &x) in present.iter().enumerate() {
            for &y in &present[pi + 1..] {
                let (common, agree) = overlap_agreement(&slice[&x], &slice[&y]);
                if common > 0 && agree > 0 {
                    edges.push((x, y, agree as f64 / common as f64));
                }
            }
        }
        layers.push(Layer { present, edges });
    }
    let net = TemporalNetwork::new(ids.len(), layers, TemporalCoupling::Chain)?;
    let labels = voter_labels(table, &ids, &index);
    Ok((net, labels))
}

/// Voting-similarity network over states, using aggregate votes.
///
/// A state's aggregate vote on a bill is the sum of its voters' recorded
/// values; the weight between two states is the fraction of bills both
/// states recorded votes on where the aggregates coincide. Every state must
/// be represented in every slice (the network is fully present); otherwise
/// an error lists the missing `(state, slice key)` pairs.
pub fn state_network(table: &VoteTable) -> Result<(TemporalNetwork, Vec<VertexLabel>)> {
    let mut states: Vec<String> = table
        .records
        .iter()
        .map(|r| r.state.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    states.sort_by(|a, b| id_cmp(a, b));
    let index: BTreeMap<&str, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let bills = intern_bills(table);
    let t_count = table.t_count();

    // aggregates[slice][state] = bill -> summed vote
    let mut aggregates: Vec<Vec<BTreeMap<usize, i64>>> =
        vec![vec![BTreeMap::new(); states.len()]; t_count];
    let mut seen: Vec<Vec<bool>> = vec![vec![false; states.len()]; t_count];
    for r in &table.records {
        let slice = table.slice_of(r.t);
        let s = index[r.state.as_str()];
        seen[slice][s] = true;
        *aggregates[slice][s].entry(bills[r.bill.as_str()]).or_insert(0) += i64::from(r.vote);
    }
    let missing: Vec<String> = (0..t_count)
        .flat_map(|slice| {
            let t_key = table.t_keys[slice];
            let seen = &seen[slice];
            states
                .iter()
                .enumerate()
                .filter(move |&(s, _)| !seen[s])
                .map(move |(_, name)| format!("{name} at slice {t_key}"))
        })
        .collect();
    if !missing.is_empty() {
        return Err(Error::invalid(format!(
            "state network needs every state in every slice; missing: {}",
            missing.join(", ")
        )));
    }

    let mut edge_lists = Vec::with_capacity(t_count);
    for slice_aggs in &aggregates {
        let flat: Vec<Vec<(usize, i64)>> = slice_aggs
            .iter()
            .map(|m| m.iter().map(|(&b, &v)| (b, v)).collect())
            .collect();
        let mut edges = Vec::new();
        for x in 0..states.len() {
            for y in x + 1..states.len() {
                let (common, agree) = overlap_agreement(&flat[x], &flat[y]);
                if common > 0 && agree > 0 {
                    edges.push((x, y, agree as f64 / common as f64));
                }
            }
        }
        edge_lists.push(edges);
    }
    let net = TemporalNetwork::fully_present(states.len(), edge_lists)?;
    let labels = states
        .iter()
        .map(|s| VertexLabel {
            id: s.clone(),
            state: s.clone(),
            party: String::new(),
        })
        .collect();
    Ok((net, labels))
}

/// Per-(state, slice) averages of a voter-network eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateProjection {
    pub states: Vec<String>,
    /// Original slice keys, ascending.
    pub t_keys: Vec<u32>,
    /// `values[state][slice]`: mean vector value over the state's top-two
    /// voters by record count in that slice (ties to the lowest voter id);
    /// `None` where the state has no records.
    pub values: Vec<Vec<Option<f64>>>,
}

/// Projects an eigenvector of the voter network onto states: for each state
/// and slice, the two voters of that state with the most records are picked
/// (ties to the lowest voter id) and their vector entries averaged.
pub fn project_to_states(
    table: &VoteTable,
    net: &TemporalNetwork,
    vector: &DVector<f64>,
) -> Result<StateProjection> {
    let map = net.nonmultiplex_index_map();
    if vector.len() != map.len() {
        return Err(Error::invalid(format!(
            "vector length {} does not match the network's {} space-time vertices",
            vector.len(),
            map.len()
        )));
    }
    let (_, index) = voter_universe(table);
    let mut states: Vec<String> = table
        .records
        .iter()
        .map(|r| r.state.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    states.sort_by(|a, b| id_cmp(a, b));
    let state_index: BTreeMap<&str, usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let t_count = table.t_count();

    // counts[slice][state]: voter id -> record count
    let mut counts: Vec<Vec<BTreeMap<&str, usize>>> =
        vec![vec![BTreeMap::new(); states.len()]; t_count];
    for r in &table.records {
        *counts[table.slice_of(r.t)][state_index[r.state.as_str()]]
            .entry(r.voter.as_str())
            .or_insert(0) += 1;
    }
    let mut values = vec![vec![None; t_count]; states.len()];
    for (s, row) in values.iter_mut().enumerate() {
        for (slice, cell) in row.iter_mut().enumerate() {
            let tally = &counts[slice][s];
            if tally.is_empty() {
                continue;
            }
            let mut ranked: Vec<(&str, usize)> = tally.iter().map(|(&v, &c)| (v, c)).collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| id_cmp(a.0, b.0)));
            let picked = &ranked[..ranked.len().min(2)];
            let mut sum = 0.0;
            for &(voter, _) in picked {
                let flat = map.to_flat(slice, index[voter]).ok_or_else(|| {
                    Error::invalid(format!(
                        "voter {voter:?} has records at slice {} but is absent from the network",
                        table.t_keys[slice]
                    ))
                })?;
                sum += vector[flat];
            }
            *cell = Some(sum / picked.len() as f64);
        }
    }
    Ok(StateProjection {
        states,
        t_keys: table.t_keys.clone(),
        values,
    })
}
