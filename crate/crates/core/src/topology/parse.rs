// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Edge-list reader.
//!
//! One directed link per line: `src dst [latency_ms]`, whitespace separated.
//! Text after `#` is ignored, as are blank lines. The node count is the
//! largest id plus one.

use std::path::Path;

use super::{Link, NodeId, Topology, TopologyError};
use crate::latency::Latency;

#[derive(Clone, Copy, Debug, Default)]
pub struct EdgeListOptions {
    /// Add the reverse of every link that has no explicit reverse line.
    pub undirected: bool,
}

pub fn load_topology(path: impl AsRef<Path>, opts: EdgeListOptions) -> Result<Topology, TopologyError> {
    let text = std::fs::read_to_string(path)?;
    parse_edge_list(&text, opts)
}

pub fn parse_edge_list(text: &str, opts: EdgeListOptions) -> Result<Topology, TopologyError> {
    let mut links: Vec<(usize, Link)> = Vec::new();
    let mut max_id: Option<u32> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 2 || fields.len() > 3 {
            return Err(TopologyError::Parse { line, msg: format!("expected `src dst [latency]`, got `{}`", content.trim()) });
        }
        let node = |s: &str| {
            s.parse::<u32>().map(NodeId).map_err(|_| TopologyError::Parse { line, msg: format!("bad node id `{s}`") })
        };
        let src = node(fields[0])?;
        let dst = node(fields[1])?;
        let latency = match fields.get(2) {
            Some(s) => s.parse::<Latency>().map_err(|e| TopologyError::Parse { line, msg: e.to_string() })?,
            None => Latency::ONE_MS,
        };
        if src == dst {
            return Err(TopologyError::SelfLoop { line, node: src });
        }
        max_id = Some(max_id.unwrap_or(0).max(src.0).max(dst.0));
        links.push((line, Link { src, dst, latency }));
    }

    let mut seen = std::collections::HashSet::new();
    for &(line, l) in &links {
        if !seen.insert((l.src, l.dst)) {
            return Err(TopologyError::DuplicateLink { line, src: l.src, dst: l.dst });
        }
    }
    let mut all: Vec<Link> = links.iter().map(|&(_, l)| l).collect();
    if opts.undirected {
        for &(_, l) in &links {
            if !seen.contains(&(l.dst, l.src)) {
                seen.insert((l.dst, l.src));
                all.push(Link { src: l.dst, dst: l.src, latency: l.latency });
            }
        }
    }
    let node_count = max_id.map_or(0, |m| m as usize + 1);
    Topology::new(node_count, all)
}
