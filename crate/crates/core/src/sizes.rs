// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Header sizes over many source-destination pairs.

use std::io::{self, Write};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::lower_bound;
use crate::codec::{encode_default, encode_direct, CodecError};
use crate::fs::{build_fs, FailureModel, FsError};
use crate::topology::{NodeId, Topology};

#[derive(Debug, thiserror::Error)]
pub enum SizesError {
    #[error(transparent)]
    Fs(#[from] FsError),
    #[error("{s}->{d}: {err}")]
    Codec { s: NodeId, d: NodeId, err: CodecError },
}

/// One evaluated pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeRow {
    pub src: NodeId,
    pub dst: NodeId,
    pub primary_hops: usize,
    pub default_bytes: usize,
    pub direct_bytes: usize,
    pub fs_edges: usize,
    /// Lower bound on the FS edge count, when every primary hop has an
    /// alternate.
    pub lb_edges: Option<u32>,
}

/// Whether the stronger unweighted bound holds on `topo`: unit latencies,
/// symmetric links and 2-connected.
pub fn unweighted_bound_applies(topo: &Topology) -> bool {
    !topo.is_weighted() && topo.is_symmetric() && topo.is_two_connected()
}

/// All ordered pairs when the map has at most `threshold` nodes, otherwise
/// `sample` distinct ordered pairs drawn with `seed`, sorted.
pub fn select_pairs(topo: &Topology, threshold: usize, sample: usize, seed: u64) -> Vec<(NodeId, NodeId)> {
    let n = topo.node_count();
    let to_pair = |i: usize| {
        let s = i / (n - 1);
        let d = i % (n - 1);
        (NodeId(s as u32), NodeId((d + usize::from(d >= s)) as u32))
    };
    if n < 2 {
        return Vec::new();
    }
    let total = n * (n - 1);
    if n <= threshold || sample >= total {
        return (0..total).map(to_pair).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks: Vec<usize> = index::sample(&mut rng, total, sample).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(to_pair).collect()
}

/// Sizes for one pair, or `None` when `d` is unreachable from `s`.
pub fn size_row(topo: &Topology, s: NodeId, d: NodeId, strong_bound: bool) -> Result<Option<SizeRow>, SizesError> {
    let fs = match build_fs(topo, s, d, &FailureModel::SingleLink) {
        Ok(fs) => fs,
        Err(FsError::Disconnected(..)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let codec = |err| SizesError::Codec { s, d, err };
    let default_bytes = encode_default(&fs, topo).map_err(codec)?.size_bytes();
    let direct_bytes = encode_direct(&fs, topo).map_err(codec)?.size_bytes();
    let k = fs.primary_hops();
    let protected = fs.alternates().iter().all(Option::is_some);
    let lb_edges = if protected { lower_bound(k as i64, !strong_bound).ok() } else { None };
    Ok(Some(SizeRow { src: s, dst: d, primary_hops: k, default_bytes, direct_bytes, fs_edges: fs.edge_count(), lb_edges }))
}

/// Sizes for every connected pair in `pairs`, in input order.
pub fn sweep_sizes(topo: &Topology, pairs: &[(NodeId, NodeId)]) -> Result<Vec<SizeRow>, SizesError> {
    let strong = unweighted_bound_applies(topo);
    let rows = pairs.par_iter().map(|&(s, d)| size_row(topo, s, d, strong)).collect::<Result<Vec<_>, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn write_sizes_csv<W: Write>(out: &mut W, topology: &str, rows: &[SizeRow]) -> io::Result<()> {
    writeln!(out, "# topology {topology}")?;
    writeln!(out, "src,dst,primary_hops,default_bytes,direct_bytes,fs_edges,lb_edges")?;
    for r in rows {
        let lb = r.lb_edges.map(|b| b.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.src, r.dst, r.primary_hops, r.default_bytes, r.direct_bytes, r.fs_edges, lb
        )?;
    }
    Ok(())
}
