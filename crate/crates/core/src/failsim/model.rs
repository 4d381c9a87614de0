// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Closed-form stretch of a single packet.
//!
//! Notation: `dist` is pre-failure shortest latency, `hat` is post-failure
//! shortest latency, `h` is hop count. The primary path from `s` runs
//! through upstream nodes `u_0 = s, ..., u_m = r0`.
//!
//! Packets are sent at multiples of the generation interval. The first
//! packet to reach `r0` after the failure is sent at
//! `t* = g * ceil(max(0, t0 - dist(s, r0)) / g)` and arrives at
//! `A = t* + dist(s, r0)`.
//!
//! The source learns of the failure at
//! - flooded: `t0 + dist(r0, s) + h(r0, s) * hop_delay`,
//! - fast: `A + dist(r0, s)`,
//! - e2e: `A + hat(r0, d) + fib_delay + hat(d, s)`,
//!
//! and sends on the new path from `tau(s) = learn + fib_delay` on. Before
//! that, a packet sent at `t` with `t + dist(s, r0) >= t0` takes the
//! alternate at `r0` and has stretch
//! `(dist(s, r0) + hat(r0, d)) / hat(s, d)`.
//!
//! Hop-by-hop schemes: `r0` redirects from `t0`, an upstream node `u` from
//! `t0 + dist(r0, u) + h(r0, u) * hop_delay + fib_delay`. A packet is
//! redirected by the first node it reaches after that node switched, with
//! stretch `(dist(s, u) + hat(u, d)) / hat(s, d)`. The instantaneous
//! variant uses zero control delays.
//!
//! Plain source routing loses packets sent in `[t*, tau(s))`, with
//! `tau(s) = A + dist(r0, s) + fib_delay`. Each is resent on the new path
//! at `tau(s)`, so its stretch is `(tau(s) - t + hat(s, d)) / hat(s, d)`.

use crate::latency::Latency;
use crate::topology::{Exclusions, LinkId, NodeId, ShortestPathTree, Topology};

use super::{FailsimError, Scheme, Stretch, TimingParams, Triple};

/// Links made unusable by the failure of `l0`: the link and its reverse.
pub fn failure_links(topo: &Topology, l0: LinkId) -> Vec<LinkId> {
    let mut out = vec![l0];
    out.extend(topo.reverse_link(l0));
    out
}

/// A node on the primary path from `s` up to and including `r0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Upstream {
    pub node: NodeId,
    /// Latency of the primary path from `s` to this node.
    pub from_s: Latency,
    /// Post-failure latency from `r0` to this node.
    pub from_r0: Latency,
    /// Post-failure hop count from `r0` to this node.
    pub hops_from_r0: u32,
    /// Post-failure latency from this node to `d`.
    pub to_d: Latency,
}

/// Path lengths that determine every scheme's stretch for one triple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleGeometry {
    pub triple: Triple,
    /// `s` first, `r0` last.
    pub upstream: Vec<Upstream>,
    /// Post-failure latency from `s` to `d`.
    pub hat_s_d: Latency,
    /// Post-failure latency from `d` to `s`.
    pub hat_d_s: Latency,
}

impl TripleGeometry {
    /// Computes the geometry from scratch.
    pub fn compute(topo: &Topology, triple: Triple) -> Result<Self, FailsimError> {
        let fail = failure_links(topo, triple.l0);
        let excl = Exclusions::links(&fail);
        let spt = topo.shortest_path_tree(triple.s, &Exclusions::NONE)?;
        let to_d = topo.distances_to(triple.d, &excl)?;
        let from_d = topo.distances_from(triple.d, &excl)?;
        let from_r0 = topo.distances_from(triple.r0, &excl)?;
        Self::from_parts(topo, triple, &spt, &to_d, &from_d, &from_r0)
    }

    /// Builds the geometry from precomputed distances: `spt` from `s`
    /// without failure, the rest with the failure applied.
    pub fn from_parts(
        topo: &Topology,
        triple: Triple,
        spt: &ShortestPathTree,
        to_d: &[Option<(Latency, u32)>],
        from_d: &[Option<(Latency, u32)>],
        from_r0: &[Option<(Latency, u32)>],
    ) -> Result<Self, FailsimError> {
        let Triple { l0, s, d, r0 } = triple;
        let link = *topo.link(l0);
        if link.src != r0 || spt.source() != s {
            return Err(FailsimError::NotOnPath(l0));
        }
        let path = spt.path_to(topo, d).ok_or(FailsimError::NotOnPath(l0))?;
        let pos = path.links.iter().position(|&l| l == l0).ok_or(FailsimError::NotOnPath(l0))?;
        let unreachable = |from, to| FailsimError::Unreachable { from, to };
        let mut upstream = Vec::with_capacity(pos + 1);
        let mut from_s = Latency::ZERO;
        for (j, &u) in path.nodes[..=pos].iter().enumerate() {
            if j > 0 {
                from_s += topo.link(path.links[j - 1]).latency;
            }
            let (lat_r0, hops_r0) = from_r0[u.index()].ok_or(unreachable(r0, u))?;
            let (lat_d, _) = to_d[u.index()].ok_or(unreachable(u, d))?;
            upstream.push(Upstream { node: u, from_s, from_r0: lat_r0, hops_from_r0: hops_r0, to_d: lat_d });
        }
        let hat_s_d = upstream[0].to_d;
        let (hat_d_s, _) = from_d[s.index()].ok_or(unreachable(d, s))?;
        Ok(TripleGeometry { triple, upstream, hat_s_d, hat_d_s })
    }

    pub fn source(&self) -> &Upstream {
        &self.upstream[0]
    }

    pub fn failed_router(&self) -> &Upstream {
        self.upstream.last().expect("upstream contains s and r0")
    }

    /// Pre-failure latency from `s` to `r0`.
    pub fn dist_s_r0(&self) -> Latency {
        self.failed_router().from_s
    }

    /// Post-failure latency from `r0` to `d`.
    pub fn hat_r0_d(&self) -> Latency {
        self.failed_router().to_d
    }

    /// Stretch of packets that take the alternate at `r0`.
    pub fn alternate_stretch(&self) -> Stretch {
        Stretch::new(self.dist_s_r0() + self.hat_r0_d(), self.hat_s_d)
    }
}

/// Send time of the first packet that reaches `r0` at or after `t0`.
pub fn first_affected_send(geom: &TripleGeometry, params: &TimingParams) -> Latency {
    (params.t0 - geom.dist_s_r0()).max(Latency::ZERO).ceil_to_multiple(params.gen_interval)
}

fn first_affected_arrival(geom: &TripleGeometry, params: &TimingParams) -> Latency {
    first_affected_send(geom, params) + geom.dist_s_r0()
}

/// Time from which upstream node `u` redirects packets.
fn switch_time(u: &Upstream, is_r0: bool, params: &TimingParams) -> Latency {
    if is_r0 {
        params.t0
    } else {
        params.t0 + u.from_r0 + params.hop_delay * u.hops_from_r0 as i64 + params.fib_delay
    }
}

/// Time from which the source sends every packet on its post-failure
/// shortest path.
pub fn convergence_time(scheme: Scheme, geom: &TripleGeometry, params: &TimingParams) -> Latency {
    let s = geom.source();
    let m = geom.upstream.len() - 1;
    match scheme {
        Scheme::FloodedSp => params.t0 + s.from_r0 + params.hop_delay * s.hops_from_r0 as i64 + params.fib_delay,
        Scheme::FastSp | Scheme::FastVsr => first_affected_arrival(geom, params) + s.from_r0 + params.fib_delay,
        Scheme::E2eSp => {
            first_affected_arrival(geom, params) + geom.hat_r0_d() + params.fib_delay + geom.hat_d_s + params.fib_delay
        }
        Scheme::IdealSafeguard => switch_time(s, m == 0, params),
        Scheme::IdealNcr => switch_time(s, m == 0, &params.without_control_delays()),
    }
}

fn hop_by_hop(geom: &TripleGeometry, params: &TimingParams, t: Latency) -> Stretch {
    let m = geom.upstream.len() - 1;
    geom.upstream
        .iter()
        .enumerate()
        .find(|(j, u)| t + u.from_s >= switch_time(u, *j == m, params))
        .map_or(Stretch::ONE, |(_, u)| Stretch::new(u.from_s + u.to_d, geom.hat_s_d))
}

/// Stretch of the packet `s` sends at time `t`.
pub fn stretch(scheme: Scheme, geom: &TripleGeometry, params: &TimingParams, t: Latency) -> Result<Stretch, FailsimError> {
    if t.is_negative() {
        return Err(FailsimError::NegativeTime);
    }
    let tau = convergence_time(scheme, geom, params);
    Ok(match scheme {
        Scheme::FloodedSp | Scheme::FastSp | Scheme::E2eSp => {
            if t >= tau || t + geom.dist_s_r0() < params.t0 {
                Stretch::ONE
            } else {
                geom.alternate_stretch()
            }
        }
        Scheme::FastVsr => {
            if t >= first_affected_send(geom, params) && t < tau {
                Stretch::new(tau - t + geom.hat_s_d, geom.hat_s_d)
            } else {
                Stretch::ONE
            }
        }
        Scheme::IdealSafeguard => hop_by_hop(geom, params, t),
        Scheme::IdealNcr => hop_by_hop(geom, &params.without_control_delays(), t),
    })
}
