// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

mod common;

use common::minfs;
use slick_core::bounds::{lower_bound, witness_unweighted, witness_weighted, BoundResult, Witness};
use slick_core::fs::{build_fs, fs_edge_count, FailureModel};
use slick_core::topology::Exclusions;
use slick_core::NodeId;

fn spine(w: &Witness) -> Vec<NodeId> {
    w.topology.shortest_path(w.source, w.destination, &Exclusions::NONE).unwrap().unwrap().nodes
}

#[test]
fn bound_values() {
    let weighted: Vec<u32> = (1..=6).map(|k| lower_bound(k, true).unwrap()).collect();
    let unweighted: Vec<u32> = (1..=6).map(|k| lower_bound(k, false).unwrap()).collect();
    assert_eq!(weighted, [3, 5, 7, 9, 11, 13]);
    assert_eq!(unweighted, [3, 5, 8, 10, 13, 15]);
    assert!(lower_bound(0, true).is_err());
    assert!(lower_bound(-3, false).is_err());
    let r = BoundResult::new(7).unwrap();
    assert_eq!((r.get(true), r.get(false)), (15, 18));
}

#[test]
fn witnesses_meet_their_bounds() {
    for k in 1..=12u32 {
        let kk = i64::from(k);
        for (weighted, w) in [(true, witness_weighted(k).unwrap()), (false, witness_unweighted(k).unwrap())] {
            assert!(w.topology.is_symmetric());
            // Hub blocks share spine nodes, so only small unweighted
            // witnesses are 2-connected.
            assert_eq!(w.topology.is_two_connected(), weighted || k <= 2, "k = {k}, weighted = {weighted}");
            assert_eq!(w.topology.is_weighted(), weighted && k > 1, "k = {k}");
            let primary: Vec<u32> = spine(&w).iter().map(|n| n.0).collect();
            assert_eq!(primary, (0..=k).collect::<Vec<_>>(), "spine is the primary path");
            let fs = build_fs(&w.topology, w.source, w.destination, &FailureModel::SingleLink).unwrap();
            assert_eq!(fs_edge_count(&fs) as u32, lower_bound(kk, weighted).unwrap(), "k = {k}, weighted = {weighted}");
        }
    }
}

#[test]
fn nothing_beats_the_witnesses() {
    for k in 1..=7u32 {
        for (weighted, w) in [(true, witness_weighted(k).unwrap()), (false, witness_unweighted(k).unwrap())] {
            let p = w.topology.shortest_path(w.source, w.destination, &Exclusions::NONE).unwrap().unwrap();
            let bound = lower_bound(i64::from(k), weighted).unwrap() as usize;
            assert_eq!(minfs::smallest_below(&w.topology, &p, bound), None, "k = {k}, weighted = {weighted}");
        }
    }
}

#[test]
fn witness_rejects_zero_hops() {
    assert!(witness_weighted(0).is_err());
    assert!(witness_unweighted(0).is_err());
}
