// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Small undirected graphs: exhaustive class enumeration and random
//! generators.
//!
//! Graphs are adjacency bitmasks, one `u16` per node. Classes are
//! deduplicated by a canonical form computed with colour refinement and
//! individualisation, skipping interchangeable twin vertices.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use slick_core::{Latency, Topology};

pub type Adj = Vec<u16>;

pub fn edges(adj: &[u16]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for (u, &m) in adj.iter().enumerate() {
        for v in u + 1..adj.len() {
            if m >> v & 1 == 1 {
                out.push((u as u32, v as u32));
            }
        }
    }
    out
}

pub fn to_topology(adj: &[u16]) -> Topology {
    Topology::undirected_unit(adj.len(), &edges(adj)).unwrap()
}

fn connected_masked(adj: &[u16], alive: u16) -> bool {
    if alive == 0 {
        return true;
    }
    let start = alive.trailing_zeros() as usize;
    let mut seen = 1u16 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let u = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[u] & alive & !seen;
        seen |= new;
        frontier |= new;
    }
    seen == alive
}

pub fn is_connected(adj: &[u16]) -> bool {
    connected_masked(adj, full(adj.len()))
}

pub fn is_biconnected(adj: &[u16]) -> bool {
    let all = full(adj.len());
    adj.len() >= 3 && (0..adj.len()).all(|v| connected_masked(adj, all & !(1 << v)))
}

fn full(n: usize) -> u16 {
    ((1u32 << n) - 1) as u16
}

/// Canonical certificate: the upper triangle of the adjacency matrix under
/// a canonical ordering, as a bit string. Valid for up to 11 nodes.
pub fn canonical(adj: &[u16]) -> u64 {
    let n = adj.len();
    assert!(n <= 11);
    let cells = refine(adj, vec![(0..n as u8).collect()]);
    let mut best = None;
    search(adj, cells, &mut best);
    best.unwrap_or(0)
}

/// Splits cells until every vertex in a cell has the same number of
/// neighbours in every cell. Cell order is determined by the split
/// signatures, so the result is invariant under relabelling.
fn refine(adj: &[u16], mut cells: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    loop {
        let masks: Vec<u16> = cells.iter().map(|c| c.iter().fold(0u16, |m, &v| m | 1 << v)).collect();
        let mut next: Vec<Vec<u8>> = Vec::with_capacity(cells.len());
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u8>, u8)> = cell
                .iter()
                .map(|&v| (masks.iter().map(|&m| (adj[v as usize] & m).count_ones() as u8).collect(), v))
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                    start = i;
                }
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn certificate(adj: &[u16], order: &[u8]) -> u64 {
    let mut bits = 0u64;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            bits = bits << 1 | u64::from(adj[order[i] as usize] >> order[j] & 1);
        }
    }
    bits
}

fn twins(adj: &[u16], u: u8, v: u8) -> bool {
    let (u, v) = (u as usize, v as usize);
    adj[u] & !(1 << v) == adj[v] & !(1 << u)
}

fn search(adj: &[u16], cells: Vec<Vec<u8>>, best: &mut Option<u64>) {
    let Some(target) = cells.iter().position(|c| c.len() > 1) else {
        let order: Vec<u8> = cells.iter().map(|c| c[0]).collect();
        let cert = certificate(adj, &order);
        if best.is_none_or(|b| cert > b) {
            *best = Some(cert);
        }
        return;
    };
    let cell = &cells[target];
    let mut tried: Vec<u8> = Vec::new();
    for &v in cell {
        if tried.iter().any(|&w| twins(adj, v, w)) {
            continue;
        }
        tried.push(v);
        let mut split = cells.clone();
        let rest: Vec<u8> = cell.iter().copied().filter(|&w| w != v).collect();
        split.splice(target..=target, [vec![v], rest]);
        search(adj, refine(adj, split), best);
    }
}

fn extend_all(classes: &[Adj], keep: impl Fn(&[u16]) -> bool, min_degree: u32) -> Vec<Adj> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for g in classes {
        let n = g.len();
        for mask in 1u16..(1 << n) {
            if mask.count_ones() < min_degree {
                continue;
            }
            let mut h: Adj = g.iter().enumerate().map(|(u, &m)| m | ((mask >> u & 1) << n)).collect();
            h.push(mask);
            if keep(&h) && seen.insert(canonical(&h)) {
                out.push(h);
            }
        }
    }
    out
}

/// Connected graphs up to isomorphism, indexed by node count `0..=max_n`.
pub fn connected_classes(max_n: usize) -> Vec<Vec<Adj>> {
    let mut by_n: Vec<Vec<Adj>> = vec![vec![], vec![vec![0]]];
    for _ in 2..=max_n {
        let next = extend_all(by_n.last().unwrap(), |_| true, 1);
        by_n.push(next);
    }
    by_n.truncate(max_n + 1);
    by_n
}

/// 2-connected graphs on `n` nodes up to isomorphism. Needs the connected
/// classes on `n - 1` nodes, since removing any node leaves a connected
/// graph.
pub fn biconnected_classes(connected_smaller: &[Adj]) -> Vec<Adj> {
    extend_all(connected_smaller, is_biconnected, 2)
}

/// Random 2-connected unit or weighted map: a Hamiltonian cycle over a
/// random permutation plus `chords` random extra edges.
pub fn random_two_connected<R: Rng>(rng: &mut R, n: usize, chords: usize, weighted: bool) -> Topology {
    assert!(n >= 3);
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.shuffle(rng);
    let mut set: HashSet<(u32, u32)> = HashSet::new();
    let norm = |a: u32, b: u32| (a.min(b), a.max(b));
    for i in 0..n {
        set.insert(norm(order[i], order[(i + 1) % n]));
    }
    let max_edges = n * (n - 1) / 2;
    while set.len() < max_edges.min(n + chords) {
        let a = rng.random_range(0..n as u32);
        let b = rng.random_range(0..n as u32);
        if a != b {
            set.insert(norm(a, b));
        }
    }
    let mut list: Vec<(u32, u32)> = set.into_iter().collect();
    list.sort_unstable();
    weighted_topology(rng, n, &list, weighted)
}

/// Random connected map: a random spanning tree plus `extra` random edges.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: usize, weighted: bool) -> Topology {
    let mut set: HashSet<(u32, u32)> = HashSet::new();
    for v in 1..n as u32 {
        let u = rng.random_range(0..v);
        set.insert((u, v));
    }
    let max_edges = n * (n - 1) / 2;
    while set.len() < max_edges.min(n - 1 + extra) {
        let a = rng.random_range(0..n as u32);
        let b = rng.random_range(0..n as u32);
        if a != b {
            set.insert((a.min(b), a.max(b)));
        }
    }
    let mut list: Vec<(u32, u32)> = set.into_iter().collect();
    list.sort_unstable();
    weighted_topology(rng, n, &list, weighted)
}

fn weighted_topology<R: Rng>(rng: &mut R, n: usize, edges: &[(u32, u32)], weighted: bool) -> Topology {
    let with_latency = edges.iter().map(|&(a, b)| {
        let lat = if weighted { Latency::from_ms(rng.random_range(1..=20)) } else { Latency::ONE_MS };
        (a, b, lat)
    });
    Topology::undirected(n, with_latency.collect::<Vec<_>>()).unwrap()
}
