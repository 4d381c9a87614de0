// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Hop-by-hop forwarding over an encoded header.
//!
//! Each router sees only the header and whether its own links are up. A
//! failed node takes all of its links down with it. Failures met while
//! already on an alternate drop the packet.

use std::fmt;

use crate::codec::{decode_direct_step, CodecError, DefaultCursor, DefaultHeader, DefaultStep, DirectHeader, DirectStep};
use crate::fs::{parse_link_token, ForwardingSubgraph};
use crate::latency::Latency;
use crate::topology::{LinkId, LinkLabel, NodeId, Topology};

/// Links and nodes that are down.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FailedSet {
    pub links: Vec<LinkId>,
    pub nodes: Vec<NodeId>,
}

impl FailedSet {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn link(link: LinkId) -> Self {
        FailedSet { links: vec![link], nodes: Vec::new() }
    }

    /// Parses failure tokens: `src-dst` for a directed link, a bare id for
    /// a node.
    pub fn parse<'a>(tokens: impl IntoIterator<Item = &'a str>, topo: &Topology) -> Result<Self, ForwardError> {
        let mut out = FailedSet::none();
        for tok in tokens {
            if let Some((a, b)) = parse_link_token(tok) {
                out.links.push(topo.find_link(a, b).ok_or_else(|| ForwardError::BadFailure(tok.to_string()))?);
            } else {
                let n = tok.parse::<u32>().map(NodeId).map_err(|_| ForwardError::BadFailure(tok.to_string()))?;
                if !topo.contains_node(n) {
                    return Err(ForwardError::BadFailure(tok.to_string()));
                }
                out.nodes.push(n);
            }
        }
        Ok(out)
    }

    pub fn is_down(&self, topo: &Topology, link: LinkId) -> bool {
        let l = topo.link(link);
        self.links.contains(&link) || self.nodes.contains(&l.src) || self.nodes.contains(&l.dst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Primary,
    Alternate,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Primary => "primary",
            Mode::Alternate => "alternate",
        })
    }
}

/// One forwarding decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hop {
    pub node: NodeId,
    pub label: LinkLabel,
    pub link: LinkId,
    pub mode: Mode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DropReason {
    /// Primary link down and the header carries no alternate.
    NoAlternate,
    /// Primary link down and so is the first alternate link.
    AlternateDown,
    /// A link on the alternate path is down.
    LinkDownOnAlternate,
    /// Every successor in a node descriptor is down.
    NoLiveSuccessor,
}

impl fmt::Display for DropReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DropReason::NoAlternate => "primary link down, no alternate",
            DropReason::AlternateDown => "primary and alternate links down",
            DropReason::LinkDownOnAlternate => "link down on alternate path",
            DropReason::NoLiveSuccessor => "no live successor",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Delivered,
    Dropped { reason: DropReason, at: NodeId },
}

/// What happened to one packet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PacketTrace {
    pub source: NodeId,
    pub hops: Vec<Hop>,
    pub outcome: Outcome,
    /// Sum of the latencies of the traversed links.
    pub latency: Latency,
}

impl PacketTrace {
    /// Physical nodes visited, source first.
    pub fn nodes(&self, topo: &Topology) -> Vec<NodeId> {
        std::iter::once(self.source).chain(self.hops.iter().map(|h| topo.link(h.link).dst)).collect()
    }

    pub fn delivered(&self) -> bool {
        self.outcome == Outcome::Delivered
    }

    /// Line-oriented text form.
    pub fn render(&self, topo: &Topology) -> String {
        let mut out = String::new();
        for h in &self.hops {
            out.push_str(&format!("hop {} -> {} label {} {}\n", h.node, topo.link(h.link).dst, h.label, h.mode));
        }
        let nodes: Vec<String> = self.nodes(topo).iter().map(ToString::to_string).collect();
        out.push_str(&format!("path {}\n", nodes.join(" ")));
        match self.outcome {
            Outcome::Delivered => out.push_str(&format!("delivered latency {}\n", self.latency)),
            Outcome::Dropped { reason, at } => out.push_str(&format!("dropped at {at}: {reason}\n")),
        }
        out
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ForwardError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("node {0} is failed; endpoints must be up")]
    FailedEndpoint(NodeId),
    #[error("header length {declared} disagrees with {actual} remaining bits after a hop")]
    Bookkeeping { declared: usize, actual: usize },
    #[error("packet exceeded {0} hops")]
    HopLimit(usize),
    #[error("bad failure token `{0}`")]
    BadFailure(String),
    #[error("link is not on the primary path")]
    NotOnPrimary,
    #[error("no alternate protects that link")]
    NoAlternate,
}

/// A header in either format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EncodedHeader {
    Default(DefaultHeader),
    Direct(DirectHeader),
}

/// Forwards a packet from `source` until it is delivered or dropped.
pub fn forward_packet(
    header: &EncodedHeader,
    topo: &Topology,
    source: NodeId,
    failed: &FailedSet,
) -> Result<PacketTrace, ForwardError> {
    match header {
        EncodedHeader::Default(h) => forward_default(h.clone(), topo, source, failed),
        EncodedHeader::Direct(h) => forward_direct(h.clone(), topo, source, failed),
    }
}

struct Walk<'a> {
    topo: &'a Topology,
    trace: PacketTrace,
    current: NodeId,
    limit: usize,
}

impl<'a> Walk<'a> {
    fn start(topo: &'a Topology, source: NodeId, failed: &FailedSet, limit: usize) -> Result<Self, ForwardError> {
        if failed.nodes.contains(&source) {
            return Err(ForwardError::FailedEndpoint(source));
        }
        let trace = PacketTrace { source, hops: Vec::new(), outcome: Outcome::Delivered, latency: Latency::ZERO };
        Ok(Walk { topo, trace, current: source, limit })
    }

    fn hop(&mut self, label: LinkLabel, link: LinkId, mode: Mode) -> Result<(), ForwardError> {
        if self.trace.hops.len() >= self.limit {
            return Err(ForwardError::HopLimit(self.limit));
        }
        self.trace.hops.push(Hop { node: self.current, label, link, mode });
        self.trace.latency += self.topo.link(link).latency;
        self.current = self.topo.link(link).dst;
        Ok(())
    }

    fn finish(mut self, outcome: Outcome) -> PacketTrace {
        self.trace.outcome = outcome;
        self.trace
    }

    fn resolve(&self, label: LinkLabel) -> Result<LinkId, ForwardError> {
        self.topo
            .link_by_label(self.current, label.value)
            .ok_or(ForwardError::Codec(CodecError::UnknownLabel { node: self.current, value: label.value as u64 }))
    }
}

/// Forwards over a Default-format header, plain or pointer based.
pub fn forward_default<C: DefaultCursor>(
    mut header: C,
    topo: &Topology,
    source: NodeId,
    failed: &FailedSet,
) -> Result<PacketTrace, ForwardError> {
    // every hop consumes at least one body bit or lands on an alternate
    // whose labels are all non-empty at the tail
    let limit = header.header_length() as usize + topo.node_count() + 1;
    let mut walk = Walk::start(topo, source, failed, limit)?;
    loop {
        let dropped = |reason| Outcome::Dropped { reason, at: walk.current };
        match header.step(topo, walk.current)? {
            DefaultStep::AtDestination => return Ok(walk.finish(Outcome::Delivered)),
            DefaultStep::Primary(seg) => {
                let link = walk.resolve(seg.primary)?;
                if !failed.is_down(topo, link) {
                    header.consume_segment(&seg);
                    walk.hop(seg.primary, link, Mode::Primary)?;
                } else if let Some(&d1) = seg.alt_labels.first() {
                    let alt = walk.resolve(d1)?;
                    if failed.is_down(topo, alt) {
                        let outcome = dropped(DropReason::AlternateDown);
                        return Ok(walk.finish(outcome));
                    }
                    header.take_alternate(&seg);
                    walk.hop(d1, alt, Mode::Alternate)?;
                } else {
                    let outcome = dropped(DropReason::NoAlternate);
                    return Ok(walk.finish(outcome));
                }
            }
            DefaultStep::Alternate(label) => {
                let link = walk.resolve(label)?;
                if failed.is_down(topo, link) {
                    let outcome = dropped(DropReason::LinkDownOnAlternate);
                    return Ok(walk.finish(outcome));
                }
                header.consume_label(label);
                walk.hop(label, link, Mode::Alternate)?;
            }
        }
        let declared = header.header_length() as usize;
        let actual = header.window().len();
        if declared != actual {
            return Err(ForwardError::Bookkeeping { declared, actual });
        }
    }
}

/// Forwards over a Direct-format header.
pub fn forward_direct(
    mut header: DirectHeader,
    topo: &Topology,
    source: NodeId,
    failed: &FailedSet,
) -> Result<PacketTrace, ForwardError> {
    // a DAG walk visits each descriptor at most once
    let limit = header.bit_len();
    let mut walk = Walk::start(topo, source, failed, limit)?;
    let mut mode = Mode::Primary;
    loop {
        match decode_direct_step(&header, topo, walk.current)? {
            DirectStep::Egress => return Ok(walk.finish(Outcome::Delivered)),
            DirectStep::Node { successors, .. } => {
                let Some((i, s)) = successors.iter().enumerate().find(|(_, s)| !failed.is_down(topo, s.link)) else {
                    let outcome = Outcome::Dropped { reason: DropReason::NoLiveSuccessor, at: walk.current };
                    return Ok(walk.finish(outcome));
                };
                if i > 0 {
                    mode = Mode::Alternate;
                }
                header.set_current_ptr(s.next_ptr)?;
                walk.hop(s.label, s.link, mode)?;
            }
        }
    }
}

/// Latency of a packet that meets the failed primary link `l0`: the
/// primary prefix up to the failure plus the alternate at its upstream node.
pub fn delivered_latency(fs: &ForwardingSubgraph, topo: &Topology, l0: LinkId) -> Result<Latency, ForwardError> {
    let i = fs.primary_links().iter().position(|&l| l == l0).ok_or(ForwardError::NotOnPrimary)?;
    let alt = fs.alternate(i).ok_or(ForwardError::NoAlternate)?;
    let prefix: Latency = fs.primary_links()[..i].iter().map(|&l| topo.link(l).latency).sum();
    Ok(prefix + alt.latency)
}
