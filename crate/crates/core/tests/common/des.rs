// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Discrete-event reference for packet stretch.
//!
//! Packets, link-state updates and notifications are events on one queue.
//! At equal times control events run before packet events. Distances come
//! from an all-pairs table ordered by `(latency, hops)`, computed here
//! without the library's path code. The primary path is taken from the
//! library.
//!
//! Rules:
//! - The failure of `l0` at `t0` takes down both directions.
//! - A packet reaching `r0` at or after `t0` is redirected (or dropped for
//!   plain source routing).
//! - Link-state updates leave `r0` at `t0` and are relayed along the
//!   post-failure shortest-path tree of `r0`, each hop costing its latency
//!   plus the per-hop delay.
//! - Notifications travel post-failure shortest paths with no per-hop delay.
//! - A node acts on news of the failure after the FIB delay; `r0` redirects
//!   from `t0` without delay.
//! - Dropped packets are resent when the source switches paths, covering
//!   every undelivered packet from the first dropped one onwards that was
//!   sent no later than the switch.
//! - A packet that never meets the failure has stretch 1; otherwise its
//!   delivery latency is divided by the post-failure shortest latency.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use slick_core::failsim::{failure_links, Scheme, Stretch, TimingParams, Triple};
use slick_core::topology::Exclusions;
use slick_core::{Latency, LinkId, NodeId, Topology};

type Dist = Option<(Latency, u32)>;

/// All-pairs `(latency, hops)` with the given links removed.
pub fn all_pairs(topo: &Topology, removed: &[LinkId]) -> Vec<Vec<Dist>> {
    let n = topo.node_count();
    let mut d = vec![vec![None; n]; n];
    for (u, row) in d.iter_mut().enumerate() {
        row[u] = Some((Latency::ZERO, 0));
    }
    for (i, l) in topo.links().iter().enumerate() {
        if removed.iter().any(|r| r.index() == i) {
            continue;
        }
        let cand = (l.latency, 1);
        let cur = &mut d[l.src.index()][l.dst.index()];
        if cur.is_none_or(|c| cand < c) {
            *cur = Some(cand);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i][k] else { continue };
            for j in 0..n {
                if let Some(kj) = d[k][j] {
                    let cand = (ik.0 + kj.0, ik.1 + kj.1);
                    if d[i][j].is_none_or(|c| cand < c) {
                        d[i][j] = Some(cand);
                    }
                }
            }
        }
    }
    d
}

#[derive(Clone, Copy, Debug)]
enum Ev {
    /// Link-state update reaches a node.
    Update(NodeId),
    /// A node starts using post-failure routes.
    Switch(NodeId),
    /// Notification reaches the destination, which forwards it to `s`.
    NotifyDest,
    /// Notification reaches the source.
    NotifySource,
    /// Packet `p` is at position `j` of the primary path.
    At { p: usize, j: usize },
}

impl Ev {
    fn class(self) -> u8 {
        match self {
            Ev::At { .. } => 1,
            _ => 0,
        }
    }
}

struct Sim<'a> {
    topo: &'a Topology,
    triple: Triple,
    params: TimingParams,
    scheme: Scheme,
    post: &'a [Vec<Dist>],
    primary: Vec<NodeId>,
    primary_lat: Vec<Latency>,
    queue: BinaryHeap<Reverse<(Latency, u8, usize)>>,
    events: Vec<Ev>,
    switched: Vec<bool>,
    sent: Vec<Latency>,
    result: Vec<Option<Stretch>>,
    notified: bool,
    first_drop: Option<usize>,
}

impl Sim<'_> {
    fn push(&mut self, t: Latency, ev: Ev) {
        self.queue.push(Reverse((t, ev.class(), self.events.len())));
        self.events.push(ev);
    }

    fn post_lat(&self, a: NodeId, b: NodeId) -> Latency {
        self.post[a.index()][b.index()].expect("post-failure path exists").0
    }

    fn hat_s_d(&self) -> Latency {
        self.post_lat(self.triple.s, self.triple.d)
    }

    fn hop_by_hop(&self) -> bool {
        matches!(self.scheme, Scheme::IdealSafeguard | Scheme::IdealNcr)
    }

    fn deliver(&mut self, p: usize, latency: Latency) {
        self.result[p] = Some(Stretch::new(latency, self.hat_s_d()));
    }

    /// First packet to meet the failure triggers a notification.
    fn notify_from_r0(&mut self, now: Latency) {
        if std::mem::replace(&mut self.notified, true) {
            return;
        }
        let (s, d, r0) = (self.triple.s, self.triple.d, self.triple.r0);
        match self.scheme {
            Scheme::FastSp | Scheme::FastVsr => self.push(now + self.post_lat(r0, s), Ev::NotifySource),
            Scheme::E2eSp => self.push(now + self.post_lat(r0, d), Ev::NotifyDest),
            _ => {}
        }
    }

    fn start_updates(&mut self) {
        if matches!(self.scheme, Scheme::FloodedSp | Scheme::IdealSafeguard | Scheme::IdealNcr) {
            self.push(self.params.t0, Ev::Update(self.triple.r0));
        }
    }

    /// Children of `u` in the post-failure shortest-path tree of `r0`.
    fn tree_children(&self, u: NodeId) -> Vec<(NodeId, Latency)> {
        let r0 = self.triple.r0.index();
        let fail = failure_links(self.topo, self.triple.l0);
        let mut out = Vec::new();
        for id in self.topo.out_links(u) {
            if fail.contains(&id) {
                continue;
            }
            let l = *self.topo.link(id);
            let (Some(du), Some(dv)) = (self.post[r0][u.index()], self.post[r0][l.dst.index()]) else { continue };
            if (du.0 + l.latency, du.1 + 1) != dv {
                continue;
            }
            // Exactly one parent per node: the smallest qualifying id.
            let parent = self
                .topo
                .in_links(l.dst)
                .iter()
                .filter(|id| !fail.contains(id))
                .map(|&id| *self.topo.link(id))
                .filter(|pl| self.post[r0][pl.src.index()].is_some_and(|dp| (dp.0 + pl.latency, dp.1 + 1) == dv))
                .map(|pl| pl.src)
                .min();
            if parent == Some(u) {
                out.push((l.dst, l.latency));
            }
        }
        out
    }

    fn run(mut self, packets: usize) -> Vec<Stretch> {
        let g = self.params.gen_interval;
        for p in 0..packets {
            self.sent.push(g * p as i64);
            self.push(g * p as i64, Ev::At { p, j: 0 });
        }
        self.start_updates();
        let m = self.primary.iter().position(|&v| v == self.triple.r0).unwrap();
        while let Some(Reverse((now, _, idx))) = self.queue.pop() {
            match self.events[idx] {
                Ev::Update(u) => {
                    if self.hop_by_hop() && u == self.triple.r0 {
                        self.push(now, Ev::Switch(u));
                    } else if self.hop_by_hop() || u == self.triple.s {
                        self.push(now + self.params.fib_delay, Ev::Switch(u));
                    }
                    for (v, lat) in self.tree_children(u) {
                        self.push(now + lat + self.params.hop_delay, Ev::Update(v));
                    }
                }
                Ev::Switch(u) => {
                    self.switched[u.index()] = true;
                    if u == self.triple.s && self.scheme == Scheme::FastVsr {
                        if let Some(first) = self.first_drop {
                            let hat = self.hat_s_d();
                            for p in first..packets {
                                if self.sent[p] <= now && self.result[p].is_none() {
                                    self.deliver(p, now + hat - self.sent[p]);
                                }
                            }
                        }
                    }
                }
                Ev::NotifyDest => {
                    let (s, d) = (self.triple.s, self.triple.d);
                    self.push(now + self.params.fib_delay + self.post_lat(d, s), Ev::NotifySource);
                }
                Ev::NotifySource => self.push(now + self.params.fib_delay, Ev::Switch(self.triple.s)),
                Ev::At { p, j } => self.packet_at(p, j, m, now),
            }
        }
        let (scheme, triple, params) = (self.scheme, self.triple, self.params);
        self.result
            .into_iter()
            .enumerate()
            .map(|(p, r)| r.unwrap_or_else(|| panic!("{scheme} {triple:?} {params}: packet {p} never delivered")))
            .collect()
    }

    fn packet_at(&mut self, p: usize, j: usize, m: usize, now: Latency) {
        let u = self.primary[j];
        let d = self.triple.d;
        let elapsed = now - self.sent[p];
        if self.switched[u.index()] && (self.hop_by_hop() || j == 0) {
            if self.scheme == Scheme::FastVsr && self.result[p].is_some() {
                return;
            }
            let lat = elapsed + self.post_lat(u, d);
            self.deliver(p, lat);
            return;
        }
        if j == m {
            if now < self.params.t0 {
                self.result[p] = Some(Stretch::ONE);
                return;
            }
            self.notify_from_r0(now);
            if self.scheme == Scheme::FastVsr {
                self.first_drop.get_or_insert(p);
            } else {
                let lat = elapsed + self.post_lat(u, d);
                self.deliver(p, lat);
            }
            return;
        }
        let step = self.primary_lat[j + 1] - self.primary_lat[j];
        self.push(now + step, Ev::At { p, j: j + 1 });
    }
}

/// Distance tables for one graph and failed link.
pub struct Tables {
    pub pre: Vec<Vec<Dist>>,
    pub post: Vec<Vec<Dist>>,
}

impl Tables {
    pub fn new(topo: &Topology, l0: LinkId) -> Self {
        Tables { pre: all_pairs(topo, &[]), post: all_pairs(topo, &failure_links(topo, l0)) }
    }
}

/// Stretch of packets sent at `0, g, 2g, ...` up to and including `until`.
pub fn simulate(topo: &Topology, triple: Triple, params: TimingParams, scheme: Scheme, until: Latency) -> Vec<Stretch> {
    simulate_with(topo, &Tables::new(topo, triple.l0), triple, params, scheme, until)
}

pub fn simulate_with(
    topo: &Topology,
    tables: &Tables,
    triple: Triple,
    params: TimingParams,
    scheme: Scheme,
    until: Latency,
) -> Vec<Stretch> {
    let params = if scheme == Scheme::IdealNcr { params.without_control_delays() } else { params };
    let path = topo.shortest_path(triple.s, triple.d, &Exclusions::NONE).unwrap().unwrap();
    let mut primary_lat = vec![Latency::ZERO];
    for &l in &path.links {
        primary_lat.push(*primary_lat.last().unwrap() + topo.link(l).latency);
    }
    assert_eq!(tables.pre[triple.s.index()][triple.d.index()].map(|x| x.0), Some(path.latency));
    let packets = (until.ticks() / params.gen_interval.ticks()) as usize + 1;
    let sim = Sim {
        topo,
        triple,
        params,
        scheme,
        post: &tables.post,
        primary: path.nodes,
        primary_lat,
        queue: BinaryHeap::new(),
        events: Vec::new(),
        switched: vec![false; topo.node_count()],
        sent: Vec::new(),
        result: vec![None; packets],
        notified: false,
        first_drop: None,
    };
    sim.run(packets)
}
