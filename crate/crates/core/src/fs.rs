// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Forwarding subgraphs.
//!
//! A forwarding subgraph (FS) is the primary shortest path from source to
//! destination plus, for each primary node, a shortest alternate path to the
//! destination that avoids the primary next hop. Nodes may appear more than
//! once as distinct copies so that the union stays acyclic.
//!
//! When an alternate reaches a physical node that already has an FS
//! representation, that node is reused only if its first-successor chain to
//! the destination is exactly the rest of the alternate and the new edge does
//! not close a cycle. Otherwise a fresh copy is created. This keeps every
//! non-primary node at one successor and every primary node at no more than
//! two, so the FS can be forwarded on without any further choices.

use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::latency::Latency;
use crate::topology::{Exclusions, LinkId, NodeId, Path, Topology, TopologyError};

/// Index of a node inside one [`ForwardingSubgraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FsNodeId(pub u32);

impl FsNodeId {
    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

/// One representation of a physical node. Copy 0 is the first one created.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FsNode {
    pub physical: NodeId,
    pub copy: u32,
}

impl fmt::Display for FsNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.copy == 0 {
            write!(f, "{}", self.physical)
        } else {
            write!(f, "{}#{}", self.physical, self.copy)
        }
    }
}

/// Which failure each alternate protects against.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FailureModel {
    /// Avoid the primary next-hop link.
    SingleLink,
    /// Avoid the primary next-hop node. The last hop falls back to
    /// [`FailureModel::SingleLink`] since the destination cannot be avoided.
    SingleNode,
    /// Avoid every link sharing a risk group with the primary next-hop link.
    Srlg(SrlgGroups),
}

/// Shared-risk link groups. Links in no group fail alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrlgGroups {
    groups: Vec<Vec<LinkId>>,
}

impl SrlgGroups {
    pub fn new(groups: Vec<Vec<LinkId>>) -> Result<Self, FsError> {
        if groups.is_empty() || groups.iter().any(Vec::is_empty) {
            return Err(FsError::EmptySrlg);
        }
        Ok(SrlgGroups { groups })
    }

    /// Reads one group per line, each a list of `src-dst` link tokens.
    /// `#` starts a comment.
    pub fn parse(text: &str, topo: &Topology) -> Result<Self, FsError> {
        let mut groups = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let mut group = Vec::new();
            for tok in content.split_whitespace() {
                let (src, dst) = parse_link_token(tok).ok_or_else(|| FsError::Srlg { line, msg: format!("bad link `{tok}`") })?;
                let id = topo.find_link(src, dst).ok_or_else(|| FsError::Srlg { line, msg: format!("no link `{tok}`") })?;
                group.push(id);
            }
            if !group.is_empty() {
                groups.push(group);
            }
        }
        SrlgGroups::new(groups)
    }

    /// Every link that fails together with `link`, including itself.
    pub fn fate_sharing(&self, link: LinkId) -> Vec<LinkId> {
        let mut out = vec![link];
        for g in self.groups.iter().filter(|g| g.contains(&link)) {
            out.extend(g.iter().copied().filter(|l| *l != link));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Parses a `src-dst` token.
pub fn parse_link_token(tok: &str) -> Option<(NodeId, NodeId)> {
    let (a, b) = tok.split_once('-')?;
    Some((NodeId(a.parse().ok()?), NodeId(b.parse().ok()?)))
}

#[derive(Debug, thiserror::Error)]
pub enum FsError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("source and destination are both {0}")]
    SameEndpoints(NodeId),
    #[error("{0} cannot reach {1}")]
    Disconnected(NodeId, NodeId),
    #[error("risk group line {line}: {msg}")]
    Srlg { line: usize, msg: String },
    #[error("risk group list is empty")]
    EmptySrlg,
}

/// A primary path with per-hop alternates, as a DAG over node copies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForwardingSubgraph {
    nodes: Vec<FsNode>,
    // successors in preference order; primary nodes list the primary first
    succ: Vec<Vec<(FsNodeId, LinkId)>>,
    primary: Vec<FsNodeId>,
    primary_links: Vec<LinkId>,
    primary_latency: Latency,
    // alternates[i] protects the hop leaving primary[i]
    alternates: Vec<Option<Path>>,
}

impl ForwardingSubgraph {
    pub fn nodes(&self) -> &[FsNode] {
        &self.nodes
    }

    pub fn node(&self, id: FsNodeId) -> FsNode {
        self.nodes[id.index()]
    }

    pub fn successors(&self, id: FsNodeId) -> &[(FsNodeId, LinkId)] {
        &self.succ[id.index()]
    }

    /// Primary path as FS node ids, source first, destination last.
    pub fn primary(&self) -> &[FsNodeId] {
        &self.primary
    }

    pub fn primary_links(&self) -> &[LinkId] {
        &self.primary_links
    }

    pub fn primary_latency(&self) -> Latency {
        self.primary_latency
    }

    /// Number of primary hops.
    pub fn primary_hops(&self) -> usize {
        self.primary_links.len()
    }

    pub fn source(&self) -> NodeId {
        self.node(self.primary[0]).physical
    }

    pub fn destination(&self) -> NodeId {
        self.node(self.destination_node()).physical
    }

    pub fn destination_node(&self) -> FsNodeId {
        *self.primary.last().expect("primary path is never empty")
    }

    /// Alternate protecting the hop out of primary node `i`, if one exists.
    pub fn alternate(&self, i: usize) -> Option<&Path> {
        self.alternates[i].as_ref()
    }

    pub fn alternates(&self) -> &[Option<Path>] {
        &self.alternates
    }

    /// Number of FS edges.
    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Nodes in a topological order, ties broken by creation order. `None`
    /// only if the FS has a cycle, which construction never produces.
    pub fn topological_order(&self) -> Option<Vec<FsNodeId>> {
        let mut indeg = vec![0usize; self.nodes.len()];
        for s in &self.succ {
            for (t, _) in s {
                indeg[t.index()] += 1;
            }
        }
        let mut ready: std::collections::BTreeSet<u32> =
            (0..self.nodes.len() as u32).filter(|&i| indeg[i as usize] == 0).collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(i) = ready.pop_first() {
            order.push(FsNodeId(i));
            for (t, _) in &self.succ[i as usize] {
                indeg[t.index()] -= 1;
                if indeg[t.index()] == 0 {
                    ready.insert(t.0);
                }
            }
        }
        (order.len() == self.nodes.len()).then_some(order)
    }

    /// Deterministic text form: nodes in topological order, edges with
    /// labels, primary path and alternates.
    pub fn dump(&self, topo: &Topology) -> String {
        let mut out = String::new();
        let order = self.topological_order().expect("FS is acyclic");
        let _ = writeln!(out, "fs {} -> {}", self.source(), self.destination());
        let names: Vec<String> = order.iter().map(|&n| self.node(n).to_string()).collect();
        let _ = writeln!(out, "nodes {}", names.join(" "));
        for &n in &order {
            for (t, l) in self.successors(n) {
                let _ = writeln!(
                    out,
                    "edge {} {} label {} latency {}",
                    self.node(n),
                    self.node(*t),
                    topo.label(*l),
                    topo.link(*l).latency
                );
            }
        }
        let prim: Vec<String> = self.primary.iter().map(|&n| self.node(n).to_string()).collect();
        let _ = writeln!(out, "primary {} latency {}", prim.join(" "), self.primary_latency);
        for (i, alt) in self.alternates.iter().enumerate() {
            let at = self.node(self.primary[i]);
            match alt {
                Some(p) => {
                    let hops: Vec<String> = p.nodes.iter().map(ToString::to_string).collect();
                    let _ = writeln!(out, "alternate {at} {} latency {}", hops.join(" "), p.latency);
                }
                None => {
                    let _ = writeln!(out, "alternate {at} none");
                }
            }
        }
        let _ = writeln!(out, "edges {}", self.edge_count());
        out
    }

    fn add_node(&mut self, physical: NodeId, copies: &mut HashMap<NodeId, Vec<FsNodeId>>) -> FsNodeId {
        let list = copies.entry(physical).or_default();
        let id = FsNodeId(self.nodes.len() as u32);
        self.nodes.push(FsNode { physical, copy: list.len() as u32 });
        self.succ.push(Vec::new());
        list.push(id);
        id
    }

    /// Whether `from` can reach `to` along FS edges.
    fn reaches(&self, from: FsNodeId, to: FsNodeId) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        while let Some(n) = stack.pop() {
            if n == to {
                return true;
            }
            if std::mem::replace(&mut seen[n.index()], true) {
                continue;
            }
            stack.extend(self.succ[n.index()].iter().map(|(t, _)| *t));
        }
        false
    }

    /// Whether following first successors from `n` visits exactly `rest`.
    fn first_chain_is(&self, mut n: FsNodeId, rest: &[NodeId]) -> bool {
        for (i, &p) in rest.iter().enumerate() {
            if self.node(n).physical != p {
                return false;
            }
            match self.succ[n.index()].first() {
                Some(&(next, _)) if i + 1 < rest.len() => n = next,
                None if i + 1 == rest.len() => return true,
                _ => return false,
            }
        }
        false
    }

    /// Grafts `alt`, which starts at primary node `from`, onto the FS.
    fn add_alternate(&mut self, from: FsNodeId, alt: &Path, copies: &mut HashMap<NodeId, Vec<FsNodeId>>) {
        let mut cur = from;
        for (j, &link) in alt.links.iter().enumerate() {
            let rest = &alt.nodes[j + 1..];
            let head = rest[0];
            let reuse = copies
                .get(&head)
                .into_iter()
                .flatten()
                .copied()
                .find(|&c| self.first_chain_is(c, rest) && !self.reaches(c, cur));
            if let Some(c) = reuse {
                self.succ[cur.index()].push((c, link));
                return;
            }
            let fresh = self.add_node(head, copies);
            self.succ[cur.index()].push((fresh, link));
            cur = fresh;
        }
    }
}

/// Builds the FS from `s` to `d` under `model`.
pub fn build_fs(topo: &Topology, s: NodeId, d: NodeId, model: &FailureModel) -> Result<ForwardingSubgraph, FsError> {
    topo.check_node(s)?;
    topo.check_node(d)?;
    if s == d {
        return Err(FsError::SameEndpoints(s));
    }
    let primary = topo.shortest_path(s, d, &Exclusions::NONE)?.ok_or(FsError::Disconnected(s, d))?;
    let k = primary.hops();

    let mut fs = ForwardingSubgraph {
        nodes: Vec::new(),
        succ: Vec::new(),
        primary: Vec::with_capacity(k + 1),
        primary_links: primary.links.clone(),
        primary_latency: primary.latency,
        alternates: Vec::with_capacity(k),
    };
    let mut copies: HashMap<NodeId, Vec<FsNodeId>> = HashMap::new();
    for &n in &primary.nodes {
        let id = fs.add_node(n, &mut copies);
        fs.primary.push(id);
    }
    for i in 0..k {
        fs.succ[fs.primary[i].index()].push((fs.primary[i + 1], primary.links[i]));
    }

    for i in 0..k {
        let v = primary.nodes[i];
        let e = primary.links[i];
        let alt = match model {
            FailureModel::SingleNode if i + 1 < k => {
                topo.shortest_path(v, d, &Exclusions::nodes(&[primary.nodes[i + 1]]))?
            }
            FailureModel::Srlg(groups) => topo.shortest_path(v, d, &Exclusions::links(&groups.fate_sharing(e)))?,
            _ => topo.shortest_path(v, d, &Exclusions::links(&[e]))?,
        };
        if let Some(alt) = &alt {
            fs.add_alternate(fs.primary[i], alt, &mut copies);
        }
        fs.alternates.push(alt);
    }
    Ok(fs)
}

/// Number of FS edges.
pub fn fs_edge_count(fs: &ForwardingSubgraph) -> usize {
    fs.edge_count()
}
