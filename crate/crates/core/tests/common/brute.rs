// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Reference shortest paths by enumerating every simple path.

use slick_core::{Latency, LinkId, NodeId, Topology};

/// Preferred `s -> d` path avoiding `banned` links, ordered by latency,
/// hop count, then node sequence. Returns `(nodes, latency)`.
pub fn best_path(topo: &Topology, s: NodeId, d: NodeId, banned: &[LinkId]) -> Option<(Vec<NodeId>, Latency)> {
    let mut best: Option<(Latency, usize, Vec<NodeId>)> = None;
    let mut stack = vec![s];
    let mut on_path = vec![false; topo.node_count()];
    on_path[s.index()] = true;
    walk(topo, d, banned, &mut stack, &mut on_path, Latency::ZERO, &mut best);
    best.map(|(lat, _, nodes)| (nodes, lat))
}

fn walk(
    topo: &Topology,
    d: NodeId,
    banned: &[LinkId],
    stack: &mut Vec<NodeId>,
    on_path: &mut [bool],
    lat: Latency,
    best: &mut Option<(Latency, usize, Vec<NodeId>)>,
) {
    let u = *stack.last().unwrap();
    if u == d {
        let cand = (lat, stack.len(), stack.clone());
        if best.as_ref().is_none_or(|b| cand < *b) {
            *best = Some(cand);
        }
        return;
    }
    if best.as_ref().is_some_and(|b| lat > b.0) {
        return;
    }
    for id in topo.out_links(u) {
        let l = *topo.link(id);
        if banned.contains(&id) || on_path[l.dst.index()] {
            continue;
        }
        on_path[l.dst.index()] = true;
        stack.push(l.dst);
        walk(topo, d, banned, stack, on_path, lat + l.latency, best);
        stack.pop();
        on_path[l.dst.index()] = false;
    }
}
