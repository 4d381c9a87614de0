// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Lower bounds on the edge count of single-link-failure FSes, and graphs
//! on which the bounds are met.
//!
//! For a primary path of `k` hops, every FS has at least `2k + 1` edges. On
//! unweighted 2-connected graphs the bound rises to `ceil(5k / 2)`.

use crate::latency::Latency;
use crate::topology::{NodeId, Topology, TopologyError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoundsError {
    #[error("primary hop count must be at least 1, got {0}")]
    BadHops(i64),
}

/// Both bounds for a primary path of `primary_hops` hops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundResult {
    pub primary_hops: u32,
    pub weighted_bound: u32,
    pub unweighted_bound: u32,
}

impl BoundResult {
    pub fn new(k: i64) -> Result<Self, BoundsError> {
        Ok(BoundResult {
            primary_hops: u32::try_from(k).map_err(|_| BoundsError::BadHops(k))?,
            weighted_bound: lower_bound(k, true)?,
            unweighted_bound: lower_bound(k, false)?,
        })
    }

    pub fn get(&self, weighted: bool) -> u32 {
        if weighted {
            self.weighted_bound
        } else {
            self.unweighted_bound
        }
    }
}

/// Fewest FS edges possible for a `k`-hop primary path.
pub fn lower_bound(k: i64, weighted: bool) -> Result<u32, BoundsError> {
    if k < 1 || k > i64::from(u32::MAX / 5) {
        return Err(BoundsError::BadHops(k));
    }
    let k = k as u32;
    Ok(if weighted { 2 * k + 1 } else { (5 * k).div_ceil(2) })
}

/// A graph together with the pair whose FS meets a bound.
#[derive(Clone, Debug)]
pub struct Witness {
    pub topology: Topology,
    pub source: NodeId,
    pub destination: NodeId,
}

/// Spine `v_0 .. v_k` (nodes `0..=k`) with unit latencies and a hub
/// `u = k + 1`. The hub links to each `v_i`, `i < k`, with latency `k - i`
/// and to `v_k` with latency 1, so every alternate is `v_i, u, v_k`.
pub fn witness_weighted(k: u32) -> Result<Witness, BoundsError> {
    lower_bound(i64::from(k), true)?;
    let ms = Latency::from_ms;
    let hub = k + 1;
    let mut edges: Vec<(u32, u32, Latency)> = (0..k).map(|i| (i, i + 1, Latency::ONE_MS)).collect();
    edges.extend((0..k).map(|i| (i, hub, ms(i64::from(k - i)))));
    edges.push((hub, k, Latency::ONE_MS));
    Ok(build(k + 2, edges, k))
}

/// Unit-latency spine `v_0 .. v_k` (nodes `0..=k`). Each two-hop block
/// `v_2j, v_2j+1, v_2j+2` shares a hub adjacent to all three. For odd `k`
/// the last hop gets a hub adjacent to `v_k-1` and `v_k`. Hubs are
/// numbered after the spine so that ties resolve to the spine. Blocks meet
/// at single spine nodes, so for `k >= 3` the graph is not 2-connected.
pub fn witness_unweighted(k: u32) -> Result<Witness, BoundsError> {
    lower_bound(i64::from(k), false)?;
    let mut edges: Vec<(u32, u32, Latency)> = (0..k).map(|i| (i, i + 1, Latency::ONE_MS)).collect();
    let mut next = k + 1;
    for j in 0..k / 2 {
        edges.extend((2 * j..=2 * j + 2).map(|v| (v, next, Latency::ONE_MS)));
        next += 1;
    }
    if k % 2 == 1 {
        edges.extend([(k - 1, next, Latency::ONE_MS), (k, next, Latency::ONE_MS)]);
        next += 1;
    }
    Ok(build(next, edges, k))
}

fn build(n: u32, edges: Vec<(u32, u32, Latency)>, k: u32) -> Witness {
    let topology = Topology::undirected(n as usize, edges).unwrap_or_else(|e: TopologyError| panic!("witness graph: {e}"));
    Witness { topology, source: NodeId(0), destination: NodeId(k) }
}
