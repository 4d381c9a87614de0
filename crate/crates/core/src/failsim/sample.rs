// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Choosing failure scenarios.

use std::collections::HashMap;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::topology::{Exclusions, LinkId, NodeId, ShortestPathTree, Topology};

use super::model::failure_links;
use super::{FailsimError, Triple};

/// Sample sizes for [`sample_triples`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleCounts {
    /// Failed links drawn without replacement.
    pub links: usize,
    /// Sources kept per link.
    pub sources: usize,
    /// Destinations drawn per source.
    pub destinations: usize,
    /// Random sources tried per link before giving up.
    pub source_attempts: usize,
}

impl SampleCounts {
    /// Sizes used for large topologies.
    pub const LARGE: SampleCounts = SampleCounts { links: 1000, sources: 100, destinations: 100, source_attempts: 2000 };
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts { links: 100, sources: 20, destinations: 20, source_attempts: 2000 }
    }
}

/// Per-source shortest-path trees, computed on first use.
struct TreeCache<'a> {
    topo: &'a Topology,
    trees: HashMap<NodeId, ShortestPathTree>,
}

impl<'a> TreeCache<'a> {
    fn get(&mut self, s: NodeId) -> Result<&ShortestPathTree, FailsimError> {
        if !self.trees.contains_key(&s) {
            let spt = self.topo.shortest_path_tree(s, &Exclusions::NONE)?;
            self.trees.insert(s, spt);
        }
        Ok(&self.trees[&s])
    }
}

/// Destinations below `l0` in the tree of `s` that stay reachable from `s`
/// once `l0` fails, in the order given.
fn still_connected(
    topo: &Topology,
    s: NodeId,
    l0: LinkId,
    candidates: impl Iterator<Item = NodeId>,
) -> Result<Vec<NodeId>, FailsimError> {
    let fail = failure_links(topo, l0);
    let reach = topo.distances_from(s, &Exclusions::links(&fail))?;
    Ok(candidates.filter(|d| reach[d.index()].is_some()).collect())
}

/// Draws triples with a seeded generator.
///
/// Links are drawn without replacement. For each link `l0 = r0 -> b`, up to
/// `source_attempts` distinct random sources are tried and the first
/// `sources` whose shortest-path tree uses `l0` are kept. For each kept
/// source, up to `destinations` nodes are drawn from the subtree below
/// `l0` and those still reachable after the failure are used. Output is
/// grouped by link.
pub fn sample_triples(topo: &Topology, seed: u64, counts: SampleCounts) -> Result<Vec<Triple>, FailsimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache = TreeCache { topo, trees: HashMap::new() };
    let n = topo.node_count();
    let mut out = Vec::new();
    let links = index::sample(&mut rng, topo.link_count(), counts.links.min(topo.link_count()));
    for li in links.iter() {
        let l0 = LinkId(li as u32);
        let link = *topo.link(l0);
        let attempts = index::sample(&mut rng, n, counts.source_attempts.min(n));
        let mut kept = 0;
        for si in attempts.iter() {
            if kept == counts.sources {
                break;
            }
            let s = NodeId(si as u32);
            let spt = cache.get(s)?;
            if spt.pred_link(link.dst) != Some(l0) {
                continue;
            }
            kept += 1;
            let subtree = spt.subtree_below(topo, l0);
            let picks = index::sample(&mut rng, subtree.len(), counts.destinations.min(subtree.len()));
            let ds = still_connected(topo, s, l0, picks.iter().map(|i| subtree[i]))?;
            out.extend(ds.into_iter().map(|d| Triple { l0, s, d, r0: link.src }));
        }
    }
    Ok(out)
}

/// Every triple: each link, each source whose tree uses it, and each
/// destination below it that stays reachable. Sorted by link, source,
/// destination.
pub fn all_triples(topo: &Topology) -> Result<Vec<Triple>, FailsimError> {
    let trees = topo.nodes().map(|s| topo.shortest_path_tree(s, &Exclusions::NONE)).collect::<Result<Vec<_>, _>>()?;
    let mut out = Vec::new();
    for l0 in (0..topo.link_count()).map(|i| LinkId(i as u32)) {
        let link = *topo.link(l0);
        for (si, spt) in trees.iter().enumerate() {
            if spt.pred_link(link.dst) != Some(l0) {
                continue;
            }
            let s = NodeId(si as u32);
            let mut subtree = spt.subtree_below(topo, l0);
            subtree.sort_unstable();
            let ds = still_connected(topo, s, l0, subtree.into_iter())?;
            out.extend(ds.into_iter().map(|d| Triple { l0, s, d, r0: link.src }));
        }
    }
    Ok(out)
}
