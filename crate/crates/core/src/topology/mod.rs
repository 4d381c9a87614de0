// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Directed, latency-annotated network maps with per-node link labels.
//!
//! A [`Topology`] is immutable once built. Links are stored sorted by
//! `(src, dst)`, so the outgoing links of a node form a contiguous run and the
//! label of a link is simply its index inside that run, written big-endian in
//! `ceil(log2(out_degree))` bits.

mod parse;
mod paths;

use std::fmt;

pub use parse::{load_topology, parse_edge_list, EdgeListOptions};
pub use paths::{Exclusions, Path, ShortestPathTree};

use crate::latency::Latency;

/// Dense node identifier, `0..node_count`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i as u32)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Index of a link in [`Topology::links`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub u32);

impl LinkId {
    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A directed link.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Link {
    pub src: NodeId,
    pub dst: NodeId,
    pub latency: Latency,
}

/// A locally unique outgoing-link identifier.
///
/// All labels of one node share the same width. A node with a single
/// outgoing link uses the empty label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LinkLabel {
    pub value: u32,
    pub width: u8,
}

impl fmt::Display for LinkLabel {
    /// Binary digits, or `-` for the empty label.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.width == 0 {
            return f.write_str("-");
        }
        write!(f, "{:0width$b}", self.value, width = self.width as usize)
    }
}

/// Width in bits of the labels at a node with the given out-degree.
pub fn label_width(out_degree: usize) -> u8 {
    if out_degree <= 1 {
        0
    } else {
        (usize::BITS - (out_degree - 1).leading_zeros()) as u8
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TopologyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: self-loop at node {node}")]
    SelfLoop { line: usize, node: NodeId },
    #[error("line {line}: duplicate link {src} -> {dst}")]
    DuplicateLink { line: usize, src: NodeId, dst: NodeId },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no link {0} -> {1}")]
    UnknownLink(NodeId, NodeId),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An immutable network map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    node_count: usize,
    links: Vec<Link>,
    // links[out_start[u]..out_start[u + 1]] leave u
    out_start: Vec<usize>,
    in_start: Vec<usize>,
    in_links: Vec<LinkId>,
    weighted: bool,
}

impl Topology {
    /// Builds a topology from directed links. Links may be given in any
    /// order; self-loops and repeated ordered pairs are rejected, with the
    /// reported line being the 1-based position in `links`.
    pub fn new(node_count: usize, links: impl IntoIterator<Item = Link>) -> Result<Self, TopologyError> {
        let mut links: Vec<(usize, Link)> = links.into_iter().enumerate().map(|(i, l)| (i + 1, l)).collect();
        for &(line, l) in &links {
            for n in [l.src, l.dst] {
                if n.index() >= node_count {
                    return Err(TopologyError::UnknownNode(n));
                }
            }
            if l.src == l.dst {
                return Err(TopologyError::SelfLoop { line, node: l.src });
            }
            if l.latency.is_negative() {
                return Err(TopologyError::Parse { line, msg: "negative latency".into() });
            }
        }
        links.sort_by_key(|&(line, l)| (l.src, l.dst, line));
        if let Some(w) = links.windows(2).find(|w| (w[0].1.src, w[0].1.dst) == (w[1].1.src, w[1].1.dst)) {
            return Err(TopologyError::DuplicateLink { line: w[1].0, src: w[1].1.src, dst: w[1].1.dst });
        }
        let links: Vec<Link> = links.into_iter().map(|(_, l)| l).collect();

        let mut out_start = vec![0; node_count + 1];
        let mut in_start = vec![0; node_count + 1];
        for l in &links {
            out_start[l.src.index() + 1] += 1;
            in_start[l.dst.index() + 1] += 1;
        }
        for i in 0..node_count {
            out_start[i + 1] += out_start[i];
            in_start[i + 1] += in_start[i];
        }
        let mut fill = in_start.clone();
        let mut in_links = vec![LinkId(0); links.len()];
        for (i, l) in links.iter().enumerate() {
            in_links[fill[l.dst.index()]] = LinkId(i as u32);
            fill[l.dst.index()] += 1;
        }
        let weighted = links.iter().any(|l| l.latency != Latency::ONE_MS);
        Ok(Topology { node_count, links, out_start, in_start, in_links, weighted })
    }

    /// Builds a symmetric topology: every `(a, b, latency)` becomes the two
    /// links `a -> b` and `b -> a`.
    pub fn undirected(
        node_count: usize,
        edges: impl IntoIterator<Item = (u32, u32, Latency)>,
    ) -> Result<Self, TopologyError> {
        let links = edges.into_iter().flat_map(|(a, b, latency)| {
            [Link { src: NodeId(a), dst: NodeId(b), latency }, Link { src: NodeId(b), dst: NodeId(a), latency }]
        });
        Topology::new(node_count, links)
    }

    /// Symmetric topology with every latency 1 ms.
    pub fn undirected_unit(node_count: usize, edges: &[(u32, u32)]) -> Result<Self, TopologyError> {
        Topology::undirected(node_count, edges.iter().map(|&(a, b)| (a, b, Latency::ONE_MS)))
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// `false` when every link has latency exactly 1 ms.
    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> + Clone {
        (0..self.node_count as u32).map(NodeId)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id.index()]
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        n.index() < self.node_count
    }

    pub fn check_node(&self, n: NodeId) -> Result<(), TopologyError> {
        if self.contains_node(n) {
            Ok(())
        } else {
            Err(TopologyError::UnknownNode(n))
        }
    }

    /// Outgoing links of `u`, in label order.
    pub fn out_links(&self, u: NodeId) -> impl ExactSizeIterator<Item = LinkId> + Clone {
        (self.out_start[u.index()] as u32..self.out_start[u.index() + 1] as u32).map(LinkId)
    }

    /// Incoming links of `v`.
    pub fn in_links(&self, v: NodeId) -> &[LinkId] {
        &self.in_links[self.in_start[v.index()]..self.in_start[v.index() + 1]]
    }

    pub fn out_degree(&self, u: NodeId) -> usize {
        self.out_start[u.index() + 1] - self.out_start[u.index()]
    }

    pub fn find_link(&self, src: NodeId, dst: NodeId) -> Option<LinkId> {
        if !self.contains_node(src) {
            return None;
        }
        let lo = self.out_start[src.index()];
        self.links[lo..self.out_start[src.index() + 1]]
            .binary_search_by_key(&dst, |l| l.dst)
            .ok()
            .map(|i| LinkId((lo + i) as u32))
    }

    pub fn link_between(&self, src: NodeId, dst: NodeId) -> Result<LinkId, TopologyError> {
        self.find_link(src, dst).ok_or(TopologyError::UnknownLink(src, dst))
    }

    /// The link in the opposite direction, if present.
    pub fn reverse_link(&self, id: LinkId) -> Option<LinkId> {
        let l = self.link(id);
        self.find_link(l.dst, l.src)
    }

    /// True when every link has a reverse link of equal latency.
    pub fn is_symmetric(&self) -> bool {
        self.links.iter().enumerate().all(|(i, l)| {
            self.reverse_link(LinkId(i as u32)).is_some_and(|r| self.link(r).latency == l.latency)
        })
    }

    /// True when the map, ignoring link direction, has at least three nodes
    /// and stays connected after removing any single node.
    pub fn is_two_connected(&self) -> bool {
        let n = self.node_count;
        n >= 3 && (0..n).all(|v| self.connected_without(Some(NodeId(v as u32))))
    }

    /// Connectivity of the undirected underlying graph with `skip` removed.
    fn connected_without(&self, skip: Option<NodeId>) -> bool {
        let n = self.node_count;
        let Some(start) = self.nodes().find(|&v| Some(v) != skip) else { return true };
        let mut seen = vec![false; n];
        seen[start.index()] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            let out = self.out_links(u).map(|id| self.link(id).dst);
            let inn = self.in_links(u).iter().map(|&id| self.link(id).src);
            for w in out.chain(inn) {
                if Some(w) != skip && !std::mem::replace(&mut seen[w.index()], true) {
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n - usize::from(skip.is_some())
    }

    /// Label width advertised by `u`.
    pub fn label_width(&self, u: NodeId) -> u8 {
        label_width(self.out_degree(u))
    }

    pub fn label(&self, id: LinkId) -> LinkLabel {
        let src = self.link(id).src;
        LinkLabel { value: (id.index() - self.out_start[src.index()]) as u32, width: self.label_width(src) }
    }

    /// Resolves a label value read at node `u`. `None` when `u` advertises
    /// no such label.
    pub fn link_by_label(&self, u: NodeId, value: u32) -> Option<LinkId> {
        if !self.contains_node(u) || value as usize >= self.out_degree(u) {
            return None;
        }
        Some(LinkId((self.out_start[u.index()] + value as usize) as u32))
    }

    /// Serializes as an edge list that [`parse_edge_list`] reads back into
    /// an identical topology.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for l in &self.links {
            out.push_str(&format!("{} {} {}\n", l.src, l.dst, l.latency));
        }
        out
    }
}
