//! Synthetic temporal networks with planted, smoothly transitioning cluster
//! structure.
//!
//! A generation request lists target "states" — cluster counts pinned to
//! specific slices — and the generator builds each state slice from complete
//! clusters plus a regular background, then interpolates between consecutive
//! states by applying the edge-set difference a few operations per slice.
//! The planted membership of every slice is returned alongside the network
//! so recovery can be verified exactly.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cheeger::Packing;
use crate::error::{Error, Result};
use crate::graph::TemporalNetwork;

/// Parameters of one synthetic network.
///
/// `alpha[i]` clusters are planted at slice `s[i]`; `s` is 1-based,
/// ascending, starting at 1 and ending at `t`. `eta` controls how clean the
/// clusters are (at 1, no edges leave a cluster), `beta` sets the
/// clustered/unclustered size ratio, and `gamma` divides the density of the
/// background regular graph used when a state has no clusters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub t: usize,
    pub alpha: Vec<usize>,
    pub s: Vec<usize>,
    pub eta: f64,
    pub beta: f64,
    pub gamma: usize,
    pub seed: u64,
}

/// A generated network with its planted ground truth.
#[derive(Debug, Clone)]
pub struct Generated {
    pub net: TemporalNetwork,
    /// Planted spacetime clusters over flat indices `t·N + x`; slices whose
    /// nearest state is unclustered fall in Ω.
    pub truth: Packing,
    /// Per-slice, per-vertex planted cluster (`None` = unclustered). A
    /// transition slice inherits the nearer state's membership (ties go to
    /// the earlier state).
    pub memberships: Vec<Vec<Option<usize>>>,
    /// The 0-based slices at which the requested states sit.
    pub state_slices: Vec<usize>,
}

type EdgeSet = BTreeSet<(usize, usize)>;

fn edge_key(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

fn complete_edges(vertices: std::ops::Range<usize>) -> EdgeSet {
    let mut out = EdgeSet::new();
    let list: Vec<usize> = vertices.collect();
    for i in 0..list.len() {
        for j in (i + 1)..list.len() {
            out.insert((list[i], list[j]));
        }
    }
    out
}

/// Uniform-ish simple `d`-regular graph on `n` vertices by the pairing
/// construction, restarting whenever the remaining stubs admit no valid
/// edge. Dense degrees are built as the complement of a sparse instance.
pub fn random_regular(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Result<EdgeSet> {
    if d >= n {
        return Err(Error::invalid(format!(
            "a simple {d}-regular graph needs more than {d} vertices, got {n}"
        )));
    }
    if (n * d) % 2 != 0 {
        return Err(Error::invalid(format!(
            "no {d}-regular graph on {n} vertices exists (odd degree sum)"
        )));
    }
    if d == 0 {
        return Ok(EdgeSet::new());
    }
    if d == n - 1 {
        return Ok(complete_edges(0..n));
    }
    if d > (n - 1) / 2 {
        let inner = random_regular(n, n - 1 - d, rng)?;
        let mut out = EdgeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if !inner.contains(&(i, j)) {
                    out.insert((i, j));
                }
            }
        }
        return Ok(out);
    }
    'restart: loop {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat(v).take(d)).collect();
        stubs.shuffle(rng);
        let mut edges = EdgeSet::new();
        while !stubs.is_empty() {
            let mut found = None;
            for _ in 0..64 {
                let i = rng.gen_range(0..stubs.len());
                let j = rng.gen_range(0..stubs.len());
                if i == j || stubs[i] == stubs[j] {
                    continue;
                }
                if !edges.contains(&edge_key(stubs[i], stubs[j])) {
                    found = Some((i, j));
                    break;
                }
            }
            if found.is_none() {
                'scan: for i in 0..stubs.len() {
                    for j in (i + 1)..stubs.len() {
                        if stubs[i] != stubs[j]
                            && !edges.contains(&edge_key(stubs[i], stubs[j]))
                        {
                            found = Some((i, j));
                            break 'scan;
                        }
                    }
                }
            }
            match found {
                Some((i, j)) => {
                    edges.insert(edge_key(stubs[i], stubs[j]));
                    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                    stubs.swap_remove(hi);
                    stubs.swap_remove(lo);
                }
                None => continue 'restart,
            }
        }
        return Ok(edges);
    }
}

/// Decrements an infeasible-parity degree so `n·d` is even.
fn parity_fix(n: usize, d: usize) -> usize {
    if (n * d) % 2 != 0 {
        d - 1
    } else {
        d
    }
}

/// Builds one state slice: its edge set and planted membership.
fn build_state(
    n: usize,
    alpha_i: usize,
    eta: f64,
    beta: f64,
    gamma: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(EdgeSet, Vec<Option<usize>>)> {
    if alpha_i == 0 {
        let d = parity_fix(n, n / gamma);
        if d >= n {
            return Err(Error::invalid(format!(
                "background degree {d} infeasible on {n} vertices (density divisor too small)"
            )));
        }
        let edges = random_regular(n, d, rng)?;
        return Ok((edges, vec![None; n]));
    }
    let c = (n as f64 / (alpha_i as f64 + beta)).floor() as usize;
    if c < 2 {
        return Err(Error::invalid(format!(
            "cluster size {c} too small: {n} vertices cannot host {alpha_i} clusters at ratio {beta}"
        )));
    }
    let m = n - alpha_i * c;
    let mut edges = EdgeSet::new();
    let mut membership = vec![None; n];
    for k in 0..alpha_i {
        let block = k * c..(k + 1) * c;
        edges.extend(complete_edges(block.clone()));
        for x in block {
            membership[x] = Some(k);
        }
    }
    let d = c.min(m);
    if d >= m {
        return Err(Error::invalid(format!(
            "unclustered remainder of {m} vertices cannot be {d}-regular; \
             increase the clustered/unclustered ratio"
        )));
    }
    let d = parity_fix(m, d);
    for (u, v) in random_regular(m, d, rng)? {
        edges.insert((alpha_i * c + u, alpha_i * c + v));
    }
    // A few edges tie each cluster to the background, degrading cluster
    // quality as eta drops below 1.
    let quota = ((1.0 - eta) * c as f64).floor() as usize;
    let quota = quota.min(c * m);
    for k in 0..alpha_i {
        let mut chosen = EdgeSet::new();
        while chosen.len() < quota {
            let u = rng.gen_range(k * c..(k + 1) * c);
            let v = rng.gen_range(alpha_i * c..n);
            chosen.insert((u, v));
        }
        edges.extend(chosen);
    }
    Ok((edges, membership))
}

fn validate(spec: &GenSpec) -> Result<()> {
    if spec.n == 0 || spec.t == 0 {
        return Err(Error::invalid("network must have vertices and slices"));
    }
    if spec.alpha.is_empty() || spec.alpha.len() != spec.s.len() {
        return Err(Error::invalid(format!(
            "need matching nonempty state lists, got {} cluster counts and {} times",
            spec.alpha.len(),
            spec.s.len()
        )));
    }
    if spec.s[0] != 1 {
        return Err(Error::invalid("first state time must be 1"));
    }
    if *spec.s.last().unwrap() != spec.t {
        return Err(Error::invalid(format!(
            "last state time {} must equal the slice count {}",
            spec.s.last().unwrap(),
            spec.t
        )));
    }
    if spec.s.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("state times must be strictly increasing"));
    }
    if !(spec.eta > 0.0 && spec.eta <= 1.0) {
        return Err(Error::invalid(format!(
            "cluster quality must lie in (0,1], got {}",
            spec.eta
        )));
    }
    if !(spec.beta > 0.0 && spec.beta.is_finite()) {
        return Err(Error::invalid(format!(
            "clustered/unclustered ratio must be positive, got {}",
            spec.beta
        )));
    }
    if spec.gamma == 0 {
        return Err(Error::invalid("density divisor must be at least 1"));
    }
    Ok(())
}

/// Generates the network, interpolating each consecutive state pair by a
/// seeded shuffle of the edge-set difference applied on a per-slice quota.
pub fn generate(spec: &GenSpec) -> Result<Generated> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let state_slices: Vec<usize> = spec.s.iter().map(|&x| x - 1).collect();

    let mut states = Vec::with_capacity(spec.alpha.len());
    let mut state_members = Vec::with_capacity(spec.alpha.len());
    for &alpha_i in &spec.alpha {
        let (edges, membership) =
            build_state(spec.n, alpha_i, spec.eta, spec.beta, spec.gamma, &mut rng)?;
        states.push(edges);
        state_members.push(membership);
    }

    let mut slice_edges: Vec<EdgeSet> = vec![EdgeSet::new(); spec.t];
    for (i, &si) in state_slices.iter().enumerate() {
        slice_edges[si] = states[i].clone();
    }
    for i in 0..states.len().saturating_sub(1) {
        let (from, to) = (state_slices[i], state_slices[i + 1]);
        let gap = to - from;
        // Deletions and additions interleave uniformly; each transition
        // slice applies the cumulative floor of its share of operations.
        let mut ops: Vec<(bool, (usize, usize))> = states[i]
            .difference(&states[i + 1])
            .map(|&e| (false, e))
            .chain(states[i + 1].difference(&states[i]).map(|&e| (true, e)))
            .collect();
        ops.shuffle(&mut rng);
        let mut current = states[i].clone();
        let mut applied = 0;
        for step in 1..gap {
            let target = step * ops.len() / gap;
            while applied < target {
                let (add, e) = ops[applied];
                if add {
                    current.insert(e);
                } else {
                    current.remove(&e);
                }
                applied += 1;
            }
            slice_edges[from + step] = current.clone();
        }
    }

    let memberships: Vec<Vec<Option<usize>>> = (0..spec.t)
        .map(|t| {
            let mut nearest = 0;
            for (i, &si) in state_slices.iter().enumerate() {
                let d = si.abs_diff(t);
                if d < state_slices[nearest].abs_diff(t) {
                    nearest = i;
                }
            }
            state_members[nearest].clone()
        })
        .collect();

    let layers: Vec<Vec<(usize, usize, f64)>> = slice_edges
        .into_iter()
        .map(|edges| edges.into_iter().map(|(u, v)| (u, v, 1.0)).collect())
        .collect();
    let net = TemporalNetwork::fully_present(spec.n, layers)?;

    let k_max = *spec.alpha.iter().max().unwrap();
    let mut elements = vec![Vec::new(); k_max];
    for (t, slice) in memberships.iter().enumerate() {
        for (x, &m) in slice.iter().enumerate() {
            if let Some(k) = m {
                elements[k].push(t * spec.n + x);
            }
        }
    }
    let truth = Packing::new(elements, spec.n * spec.t)?;

    Ok(Generated {
        net,
        truth,
        memberships,
        state_slices,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(edges: &[(usize, usize, f64)], n: usize) -> Vec<usize> {
        let mut d = vec![0usize; n];
        for &(u, v, _) in edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    #[test]
    fn background_state_is_regular() {
        let spec = GenSpec {
            n: 12,
            t: 1,
            alpha: vec![0],
            s: vec![1],
            eta: 0.8,
            beta: 1.5,
            gamma: 3,
            seed: 5,
        };
        let g = generate(&spec).unwrap();
        assert_eq!(g.net.t_count(), 1);
        let d = degrees(&g.net.layer(0).edges, 12);
        assert!(d.iter().all(|&x| x == 4), "degrees {d:?}");
        assert!(g.memberships[0].iter().all(|m| m.is_none()));
        assert_eq!(g.truth.k(), 0);
    }

    #[test]
    fn regular_helper_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for &(n, d) in &[(10, 3), (8, 5), (7, 6), (9, 0), (6, 3)] {
            let edges = random_regular(n, d, &mut rng).unwrap();
            let mut deg = vec![0usize; n];
            for &(u, v) in &edges {
                assert!(u < v && v < n, "bad edge ({u},{v})");
                deg[u] += 1;
                deg[v] += 1;
            }
            assert!(deg.iter().all(|&x| x == d), "n={n} d={d}: {deg:?}");
        }
        assert!(random_regular(5, 3, &mut rng).is_err());
        assert!(random_regular(4, 4, &mut rng).is_err());
        // Same seed, same graph.
        let a = random_regular(12, 4, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = random_regular(12, 4, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn planted_cluster_appears_fully_connected() {
        let spec = GenSpec {
            n: 20,
            t: 21,
            alpha: vec![0, 1],
            s: vec![1, 21],
            eta: 0.8,
            beta: 1.5,
            gamma: 3,
            seed: 7,
        };
        let g = generate(&spec).unwrap();
        // First slice: 6-regular background (20/3 rounded down).
        let d0 = degrees(&g.net.layer(0).edges, 20);
        assert!(d0.iter().all(|&x| x == 6), "{d0:?}");
        // Final slice: the planted cluster of size 20/2.5 = 8 is complete.
        let last: EdgeSet = g
            .net
            .layer(20)
            .edges
            .iter()
            .map(|&(u, v, _)| (u, v))
            .collect();
        for i in 0..8 {
            for j in (i + 1)..8 {
                assert!(last.contains(&(i, j)), "missing cluster edge ({i},{j})");
            }
        }
        for x in 0..20 {
            let want = if x < 8 { Some(0) } else { None };
            assert_eq!(g.memberships[20][x], want);
        }
        // Quality 0.8 with cluster size 8 leaks exactly one edge out.
        let leaving = last
            .iter()
            .filter(|&&(u, v)| (u < 8) != (v < 8))
            .count();
        assert_eq!(leaving, 1);
    }

    #[test]
    fn transitions_interpolate_monotonically() {
        let spec = GenSpec {
            n: 20,
            t: 21,
            alpha: vec![0, 1],
            s: vec![1, 21],
            eta: 0.8,
            beta: 1.5,
            gamma: 3,
            seed: 11,
        };
        let g = generate(&spec).unwrap();
        let slice_set = |t: usize| -> EdgeSet {
            g.net
                .layer(t)
                .edges
                .iter()
                .map(|&(u, v, _)| (u, v))
                .collect()
        };
        let first = slice_set(0);
        let last = slice_set(20);
        let union: EdgeSet = first.union(&last).copied().collect();
        let inter: EdgeSet = first.intersection(&last).copied().collect();
        let delta = union.len() - inter.len();
        for t in 1..20 {
            let cur = slice_set(t);
            assert!(cur.is_subset(&union), "slice {t} invents edges");
            assert!(inter.is_subset(&cur), "slice {t} drops shared edges");
            // The cumulative operation count follows the floor schedule.
            let moved = cur.symmetric_difference(&first).count();
            assert_eq!(moved, t * delta / 20, "slice {t}");
        }
    }

    #[test]
    fn three_state_truth_tracks_the_nearer_state() {
        let spec = GenSpec {
            n: 20,
            t: 6,
            alpha: vec![0, 1, 2],
            s: vec![1, 4, 6],
            eta: 0.8,
            beta: 1.5,
            gamma: 3,
            seed: 13,
        };
        let g = generate(&spec).unwrap();
        assert_eq!(g.state_slices, vec![0, 3, 5]);
        assert_eq!(g.truth.k(), 2);
        // Slice 1 is nearer the unclustered state, slice 2 nearer state 2.
        assert!(g.memberships[1].iter().all(|m| m.is_none()));
        assert_eq!(g.memberships[2], g.memberships[3]);
        // Slice 4 ties between states 2 and 3; the earlier one wins.
        assert_eq!(g.memberships[4], g.memberships[3]);
        // State 3 plants two clusters of size 20/3.5 = 5.
        let final_m = &g.memberships[5];
        assert!(final_m[0..5].iter().all(|&m| m == Some(0)));
        assert!(final_m[5..10].iter().all(|&m| m == Some(1)));
        assert!(final_m[10..].iter().all(|m| m.is_none()));
    }

    #[test]
    fn identical_seeds_reproduce_identical_networks() {
        let spec = GenSpec {
            n: 16,
            t: 9,
            alpha: vec![0, 2],
            s: vec![1, 9],
            eta: 0.9,
            beta: 1.5,
            gamma: 4,
            seed: 21,
        };
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        for t in 0..9 {
            assert_eq!(a.net.layer(t).edges, b.net.layer(t).edges);
        }
        assert_eq!(a.truth, b.truth);
        let different = generate(&GenSpec { seed: 22, ..spec }).unwrap();
        let same = (0..9).all(|t| a.net.layer(t).edges == different.net.layer(t).edges);
        assert!(!same, "changing the seed left the network unchanged");
    }

    #[test]
    fn infeasible_requests_are_rejected() {
        let base = GenSpec {
            n: 20,
            t: 5,
            alpha: vec![0, 1],
            s: vec![1, 5],
            eta: 0.8,
            beta: 1.5,
            gamma: 3,
            seed: 1,
        };
        // Cluster size collapses below 2.
        assert!(generate(&GenSpec {
            n: 4,
            alpha: vec![1, 1],
            beta: 3.0,
            ..base.clone()
        })
        .is_err());
        // Remainder too small to host its regular graph.
        assert!(generate(&GenSpec {
            n: 10,
            alpha: vec![1, 1],
            beta: 0.1,
            ..base.clone()
        })
        .is_err());
        // Malformed state lists.
        assert!(generate(&GenSpec {
            s: vec![2, 5],
            ..base.clone()
        })
        .is_err());
        assert!(generate(&GenSpec {
            s: vec![1, 4],
            ..base.clone()
        })
        .is_err());
        assert!(generate(&GenSpec {
            alpha: vec![0],
            ..base.clone()
        })
        .is_err());
        assert!(generate(&GenSpec {
            eta: 0.0,
            ..base.clone()
        })
        .is_err());
        assert!(generate(&GenSpec {
            gamma: 0,
            ..base.clone()
        })
        .is_err());
        // Density divisor 1 would demand an n-regular background.
        assert!(generate(&GenSpec {
            gamma: 1,
            alpha: vec![0, 0],
            ..base
        })
        .is_err());
    }
}
