// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Shortest paths with deterministic tie-breaking.
//!
//! Paths are ordered by total latency, then hop count, then the
//! lexicographic order of their node-id sequences. The order is
//! suffix-consistent, so a single Dijkstra run yields a tree whose every
//! branch is the preferred path to its endpoint.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use super::{LinkId, NodeId, Topology, TopologyError};
use crate::latency::Latency;

/// Links and nodes a path may not use.
#[derive(Clone, Copy, Debug, Default)]
pub struct Exclusions<'a> {
    pub links: &'a [LinkId],
    pub nodes: &'a [NodeId],
}

impl<'a> Exclusions<'a> {
    pub const NONE: Exclusions<'static> = Exclusions { links: &[], nodes: &[] };

    pub fn links(links: &'a [LinkId]) -> Self {
        Exclusions { links, nodes: &[] }
    }

    pub fn nodes(nodes: &'a [NodeId]) -> Self {
        Exclusions { links: &[], nodes }
    }

    fn blocks(&self, topo: &Topology, id: LinkId) -> bool {
        let l = topo.link(id);
        self.links.contains(&id) || self.nodes.contains(&l.dst) || self.nodes.contains(&l.src)
    }
}

/// A simple path through the topology.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub links: Vec<LinkId>,
    pub latency: Latency,
}

impl Path {
    pub fn hops(&self) -> usize {
        self.links.len()
    }

    pub fn source(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn destination(&self) -> NodeId {
        *self.nodes.last().expect("path has at least one node")
    }
}

/// Result of a single-source run.
#[derive(Clone, Debug)]
pub struct ShortestPathTree {
    source: NodeId,
    dist: Vec<Option<(Latency, u32)>>,
    pred: Vec<Option<LinkId>>,
}

impl ShortestPathTree {
    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn reached(&self, v: NodeId) -> bool {
        self.dist[v.index()].is_some()
    }

    /// Latency of the preferred path to `v`.
    pub fn dist(&self, v: NodeId) -> Option<Latency> {
        self.dist[v.index()].map(|(l, _)| l)
    }

    /// Hop count of the preferred path to `v`.
    pub fn hops(&self, v: NodeId) -> Option<u32> {
        self.dist[v.index()].map(|(_, h)| h)
    }

    /// Last link of the preferred path to `v`.
    pub fn pred_link(&self, v: NodeId) -> Option<LinkId> {
        self.pred[v.index()]
    }

    pub fn path_to(&self, topo: &Topology, v: NodeId) -> Option<Path> {
        let (latency, hops) = self.dist[v.index()]?;
        let mut links = Vec::with_capacity(hops as usize);
        let mut cur = v;
        while let Some(l) = self.pred[cur.index()] {
            links.push(l);
            cur = topo.link(l).src;
        }
        links.reverse();
        let mut nodes = Vec::with_capacity(links.len() + 1);
        nodes.push(self.source);
        nodes.extend(links.iter().map(|&l| topo.link(l).dst));
        Some(Path { nodes, links, latency })
    }

    /// Nodes whose preferred path uses `link`, in breadth-first order.
    pub fn subtree_below(&self, topo: &Topology, link: LinkId) -> Vec<NodeId> {
        let head = topo.link(link).dst;
        if self.pred[head.index()] != Some(link) {
            return Vec::new();
        }
        let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); self.pred.len()];
        for (v, p) in self.pred.iter().enumerate() {
            if let Some(p) = p {
                children[topo.link(*p).src.index()].push(NodeId(v as u32));
            }
        }
        let mut out = vec![head];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&children[out[i].index()]);
            i += 1;
        }
        out
    }
}

impl Topology {
    /// Preferred path from `s` to `d` avoiding `excl`, or `None` when
    /// disconnected.
    pub fn shortest_path(&self, s: NodeId, d: NodeId, excl: &Exclusions<'_>) -> Result<Option<Path>, TopologyError> {
        self.check_node(s)?;
        self.check_node(d)?;
        if excl.nodes.contains(&s) || excl.nodes.contains(&d) {
            return Ok(None);
        }
        Ok(self.run_dijkstra(s, Some(d), excl).path_to(self, d))
    }

    /// Preferred paths from `s` to every node.
    pub fn shortest_path_tree(&self, s: NodeId, excl: &Exclusions<'_>) -> Result<ShortestPathTree, TopologyError> {
        self.check_node(s)?;
        if excl.nodes.contains(&s) {
            return Ok(ShortestPathTree { source: s, dist: vec![None; self.node_count], pred: vec![None; self.node_count] });
        }
        Ok(self.run_dijkstra(s, None, excl))
    }

    /// `(latency, hops)` of the preferred path from every node to `d`.
    pub fn distances_to(&self, d: NodeId, excl: &Exclusions<'_>) -> Result<Vec<Option<(Latency, u32)>>, TopologyError> {
        self.check_node(d)?;
        Ok(self.plain_dijkstra(d, excl, true))
    }

    /// `(latency, hops)` of the preferred path from `s` to every node.
    /// Cheaper than [`Topology::shortest_path_tree`] when the paths
    /// themselves are not needed.
    pub fn distances_from(&self, s: NodeId, excl: &Exclusions<'_>) -> Result<Vec<Option<(Latency, u32)>>, TopologyError> {
        self.check_node(s)?;
        Ok(self.plain_dijkstra(s, excl, false))
    }

    fn plain_dijkstra(&self, root: NodeId, excl: &Exclusions<'_>, reverse: bool) -> Vec<Option<(Latency, u32)>> {
        let mut dist = vec![None; self.node_count];
        if excl.nodes.contains(&root) {
            return dist;
        }
        let mut done = vec![false; self.node_count];
        let mut heap = BinaryHeap::new();
        dist[root.index()] = Some((Latency::ZERO, 0));
        heap.push(Reverse((Latency::ZERO, 0u32, root)));
        while let Some(Reverse((lat, hops, v))) = heap.pop() {
            if std::mem::replace(&mut done[v.index()], true) {
                continue;
            }
            let mut relax = |id: LinkId, next: NodeId| {
                if excl.blocks(self, id) {
                    return;
                }
                let cand = (lat + self.link(id).latency, hops + 1);
                if dist[next.index()].is_none_or(|cur| cand < cur) {
                    dist[next.index()] = Some(cand);
                    heap.push(Reverse((cand.0, cand.1, next)));
                }
            };
            if reverse {
                for &id in self.in_links(v) {
                    relax(id, self.link(id).src);
                }
            } else {
                for id in self.out_links(v) {
                    relax(id, self.link(id).dst);
                }
            }
        }
        dist
    }

    fn run_dijkstra(&self, s: NodeId, target: Option<NodeId>, excl: &Exclusions<'_>) -> ShortestPathTree {
        let n = self.node_count;
        let mut dist: Vec<Option<(Latency, u32)>> = vec![None; n];
        let mut pred: Vec<Option<LinkId>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[s.index()] = Some((Latency::ZERO, 0));
        heap.push(Reverse((Latency::ZERO, 0u32, s)));
        while let Some(Reverse((lat, hops, u))) = heap.pop() {
            if std::mem::replace(&mut done[u.index()], true) {
                continue;
            }
            if Some(u) == target {
                break;
            }
            for id in self.out_links(u) {
                if excl.blocks(self, id) {
                    continue;
                }
                let l = self.link(id);
                let v = l.dst;
                if done[v.index()] {
                    continue;
                }
                let cand = (lat + l.latency, hops + 1);
                let better = match dist[v.index()] {
                    None => true,
                    Some(cur) => match cand.cmp(&cur) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => {
                            let old = self.link(pred[v.index()].expect("reached node has pred")).src;
                            self.lex_less_chain(&pred, u, old)
                        }
                    },
                };
                if better {
                    dist[v.index()] = Some(cand);
                    pred[v.index()] = Some(id);
                    heap.push(Reverse((cand.0, cand.1, v)));
                }
            }
        }
        // Entries that were never settled may be provisional when stopping
        // early; they are never read through path_to(target) but clear them
        // so the tree only exposes final values.
        if target.is_some() {
            for v in 0..n {
                if !done[v] {
                    dist[v] = None;
                    pred[v] = None;
                }
            }
        }
        ShortestPathTree { source: s, dist, pred }
    }

    /// Whether the settled path to `a` is lexicographically smaller than the
    /// settled path to `b`. Both paths must have the same hop count.
    fn lex_less_chain(&self, pred: &[Option<LinkId>], mut a: NodeId, mut b: NodeId) -> bool {
        loop {
            if a == b {
                return false;
            }
            let (pa, pb) = match (pred[a.index()], pred[b.index()]) {
                (Some(x), Some(y)) => (self.link(x).src, self.link(y).src),
                // equal hop counts mean both chains reach the source together
                _ => return a < b,
            };
            if pa == pb {
                return a < b;
            }
            a = pa;
            b = pb;
        }
    }
}
