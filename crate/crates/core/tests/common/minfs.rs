// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Exhaustive search for the smallest single-link-failure FS.
//!
//! An FS is a DAG over copies of physical nodes that contains the primary
//! and, for every primary hop `e_i = v_i -> v_i+1`, a path from `v_i` to a
//! copy of `d` using no edge that maps onto `e_i`.
//!
//! Two searches:
//! - [`link_set_below`] counts distinct physical links. Every FS edge maps
//!   onto one link, so the smallest protecting link set bounds every FS
//!   from below. It is fast but not tight when an alternate must revisit a
//!   primary node through a fresh copy.
//! - [`smallest_below`] searches FS DAGs directly. It repeatedly takes the
//!   first unprotected hop and adds a chain of fresh copies from a node the
//!   hop's tail reaches to any existing node that does not reach back. Any
//!   FS contains such a chain for its protecting path, so the search is
//!   exhaustive. The link-set search runs first and settles most cases.

use slick_core::topology::Path;
use slick_core::{LinkId, NodeId, Topology};

type Set = u128;

struct Search<'a> {
    topo: &'a Topology,
    primary: &'a Path,
    best: usize,
    found: bool,
}

/// Size of the smallest protecting link set that is below `limit`, or
/// `None` when none exists.
pub fn link_set_below(topo: &Topology, primary: &Path, limit: usize) -> Option<usize> {
    assert!(topo.link_count() <= 128, "link sets are 128-bit masks");
    let start: Set = primary.links.iter().fold(0, |m, l| m | 1 << l.index());
    let mut search = Search { topo, primary, best: limit, found: false };
    search.recurse(start);
    search.found.then_some(search.best)
}

/// Edge count of the smallest FS that is below `limit`, or `None` when
/// none exists.
pub fn smallest_below(topo: &Topology, primary: &Path, limit: usize) -> Option<usize> {
    link_set_below(topo, primary, limit)?;
    let mut dag = Dag { phys: primary.nodes.clone(), out: vec![Vec::new(); primary.nodes.len()], edges: 0 };
    for (i, &l) in primary.links.iter().enumerate() {
        dag.out[i].push((i + 1, l));
        dag.edges += 1;
    }
    let mut search = DagSearch { topo, primary, best: limit, found: false };
    search.recurse(&mut dag);
    search.found.then_some(search.best)
}

/// Edge count of the smallest FS. `upper` must be achievable.
pub fn smallest(topo: &Topology, primary: &Path, upper: usize) -> usize {
    smallest_below(topo, primary, upper + 1).expect("upper bound is achievable")
}

#[derive(Clone)]
struct Dag {
    phys: Vec<NodeId>,
    out: Vec<Vec<(usize, LinkId)>>,
    edges: usize,
}

impl Dag {
    /// Nodes reaching a copy of `d` without an edge onto `skip`.
    fn good(&self, d: NodeId, skip: LinkId) -> Vec<bool> {
        let mut good: Vec<bool> = self.phys.iter().map(|&p| p == d).collect();
        // Copies are appended after their predecessors except for chain
        // ends, so iterate to a fixed point.
        let mut changed = true;
        while changed {
            changed = false;
            for u in 0..self.phys.len() {
                if !good[u] && self.out[u].iter().any(|&(v, l)| l != skip && good[v]) {
                    good[u] = true;
                    changed = true;
                }
            }
        }
        good
    }

    /// Nodes reachable from `from` without an edge onto `skip`.
    fn reach(&self, from: usize, skip: Option<LinkId>) -> Vec<bool> {
        let mut seen = vec![false; self.phys.len()];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            for &(v, l) in &self.out[u] {
                if Some(l) != skip && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }
}

struct DagSearch<'a> {
    topo: &'a Topology,
    primary: &'a Path,
    best: usize,
    found: bool,
}

impl DagSearch<'_> {
    fn recurse(&mut self, dag: &mut Dag) {
        let d = self.primary.destination();
        let open = (0..self.primary.hops()).find(|&i| !dag.good(d, self.primary.links[i])[i]);
        let Some(i) = open else {
            if dag.edges < self.best {
                self.best = dag.edges;
                self.found = true;
            }
            return;
        };
        if dag.edges + 1 >= self.best {
            return;
        }
        let skip = self.primary.links[i];
        let reach = dag.reach(i, Some(skip));
        for x in (0..dag.phys.len()).filter(|&x| reach[x]) {
            // Nodes that reach x would close a cycle.
            let back: Vec<bool> = (0..dag.phys.len()).map(|y| dag.reach(y, None)[x]).collect();
            let mut chain = vec![dag.phys[x]];
            self.chain(dag, x, skip, &back, &mut chain);
        }
    }

    /// Extends a chain of fresh copies whose physical nodes are `chain`,
    /// starting at DAG node `x`.
    fn chain(&mut self, dag: &mut Dag, x: usize, skip: LinkId, back: &[bool], chain: &mut Vec<NodeId>) {
        let d = self.primary.destination();
        let at = *chain.last().unwrap();
        let len = chain.len();
        for id in self.topo.out_links(at) {
            if id == skip {
                continue;
            }
            // Adding this chain costs `len` edges.
            if dag.edges + len >= self.best {
                return;
            }
            let q = self.topo.link(id).dst;
            let targets: Vec<usize> = if q == d {
                vec![self.primary.hops()]
            } else {
                (0..dag.phys.len()).filter(|&y| dag.phys[y] == q && !back[y]).collect()
            };
            for y in targets {
                let mut next = dag.clone();
                let mut cur = x;
                for &p in &chain[1..] {
                    next.phys.push(p);
                    next.out.push(Vec::new());
                    let fresh = next.phys.len() - 1;
                    let link = self.topo.find_link(next.phys[cur], p).unwrap();
                    next.out[cur].push((fresh, link));
                    cur = fresh;
                }
                next.out[cur].push((y, id));
                next.edges += len;
                self.recurse(&mut next);
            }
            // Continue through a fresh copy of q, needing one more edge.
            if q != d && dag.edges + len + 1 < self.best {
                chain.push(q);
                self.chain(dag, x, skip, back, chain);
                chain.pop();
            }
        }
    }
}

impl Search<'_> {
    /// Nodes that reach `d` over `set` without `skip`.
    fn reaching(&self, set: Set, skip: LinkId) -> Vec<bool> {
        let d = self.primary.destination();
        let mut good = vec![false; self.topo.node_count()];
        good[d.index()] = true;
        let mut stack = vec![d];
        while let Some(v) = stack.pop() {
            for &id in self.topo.in_links(v) {
                let u = self.topo.link(id).src;
                if id != skip && set >> id.index() & 1 == 1 && !good[u.index()] {
                    good[u.index()] = true;
                    stack.push(u);
                }
            }
        }
        good
    }

    fn recurse(&mut self, set: Set) {
        let size = set.count_ones() as usize;
        let open = (0..self.primary.hops()).find_map(|i| {
            let good = self.reaching(set, self.primary.links[i]);
            (!good[self.primary.nodes[i].index()]).then_some((i, good))
        });
        let Some((i, good)) = open else {
            if size < self.best {
                self.best = size;
                self.found = true;
            }
            return;
        };
        if size + 1 >= self.best {
            return;
        }
        let v = self.primary.nodes[i];
        let mut on_path = vec![false; self.topo.node_count()];
        on_path[v.index()] = true;
        self.extend(set, v, self.primary.links[i], &good, &mut on_path);
    }

    fn extend(&mut self, set: Set, at: NodeId, skip: LinkId, good: &[bool], on_path: &mut [bool]) {
        for id in self.topo.out_links(at) {
            if id == skip {
                continue;
            }
            let w = self.topo.link(id).dst;
            if on_path[w.index()] {
                continue;
            }
            let set = set | 1 << id.index();
            // Short of a good node, at least one more link must be added.
            let needed = set.count_ones() as usize + usize::from(!good[w.index()]);
            if needed >= self.best {
                continue;
            }
            if good[w.index()] {
                self.recurse(set);
            } else {
                on_path[w.index()] = true;
                self.extend(set, w, skip, good, on_path);
                on_path[w.index()] = false;
            }
        }
    }
}
