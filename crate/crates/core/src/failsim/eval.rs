// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Batch evaluation over many triples and generation times.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::latency::Latency;
use crate::topology::{Exclusions, NodeId, ShortestPathTree, Topology};

use super::model::{convergence_time, failure_links, stretch, TripleGeometry};
use super::{FailsimError, Scheme, Stretch, TimingParams, Triple};

type Distances = Vec<Option<(Latency, u32)>>;

/// Geometry for every triple, in input order.
///
/// Consecutive triples that share a failed link are computed together so
/// that distance computations are reused.
pub fn compute_geometries(topo: &Topology, triples: &[Triple]) -> Result<Vec<TripleGeometry>, FailsimError> {
    let groups: Vec<&[Triple]> = triples.chunk_by(|a, b| a.l0 == b.l0).collect();
    let done = groups
        .into_par_iter()
        .map(|group| {
            let l0 = group[0].l0;
            let fail = failure_links(topo, l0);
            let excl = Exclusions::links(&fail);
            let from_r0 = topo.distances_from(topo.link(l0).src, &excl)?;
            let mut trees: HashMap<NodeId, ShortestPathTree> = HashMap::new();
            let mut dests: HashMap<NodeId, (Distances, Distances)> = HashMap::new();
            let mut out = Vec::with_capacity(group.len());
            for &tr in group {
                if let Entry::Vacant(e) = trees.entry(tr.s) {
                    e.insert(topo.shortest_path_tree(tr.s, &Exclusions::NONE)?);
                }
                if let Entry::Vacant(e) = dests.entry(tr.d) {
                    e.insert((topo.distances_to(tr.d, &excl)?, topo.distances_from(tr.d, &excl)?));
                }
                let (to_d, from_d) = &dests[&tr.d];
                out.push(TripleGeometry::from_parts(topo, tr, &trees[&tr.s], to_d, from_d, &from_r0)?);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, FailsimError>>()?;
    Ok(done.into_iter().flatten().collect())
}

/// Last generation time worth evaluating: every scheme has converged for
/// every triple and the last redirected packet has been delivered.
pub fn horizon(geoms: &[TripleGeometry], schemes: &[Scheme], params: &TimingParams) -> Latency {
    geoms
        .iter()
        .flat_map(|g| schemes.iter().map(move |&k| convergence_time(k, g, params) + g.hat_s_d))
        .max()
        .unwrap_or(params.t0)
        + params.gen_interval
}

/// Aggregate stretch over all triples for one generation time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesPoint {
    pub gen_time: Latency,
    pub mean: f64,
    pub max: Stretch,
    pub n: usize,
    /// Mean of `stretch - 1`, kept separately to avoid cancellation.
    pub mean_excess: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StretchSeries {
    pub scheme: Scheme,
    pub points: Vec<SeriesPoint>,
}

impl StretchSeries {
    /// Latest generation time at which some packet has stretch above one.
    pub fn last_stretched(&self) -> Option<Latency> {
        self.points.iter().rev().find(|p| p.max > Stretch::ONE).map(|p| p.gen_time)
    }
}

/// Mean and maximum stretch per scheme at generation times
/// `0, g, 2g, ...` up to and including `until`.
pub fn run_eval(
    geoms: &[TripleGeometry],
    schemes: &[Scheme],
    params: &TimingParams,
    until: Latency,
) -> Result<Vec<StretchSeries>, FailsimError> {
    params.validate()?;
    let g = params.gen_interval;
    let steps = if until.is_negative() { 0 } else { (until.ticks() / g.ticks()) as usize + 1 };
    let per_time = (0..steps)
        .into_par_iter()
        .map(|i| {
            let t = g * i as i64;
            schemes
                .iter()
                .map(|&k| {
                    let mut excess = 0.0;
                    let mut max = Stretch::ONE;
                    for geom in geoms {
                        let st = stretch(k, geom, params, t)?;
                        excess += (st.numerator() - st.denominator()) as f64 / st.denominator() as f64;
                        max = max.max(st);
                    }
                    let n = geoms.len();
                    let mean_excess = if n == 0 { 0.0 } else { excess / n as f64 };
                    Ok(SeriesPoint { gen_time: t, mean: 1.0 + mean_excess, max, n, mean_excess })
                })
                .collect::<Result<Vec<_>, FailsimError>>()
        })
        .collect::<Result<Vec<_>, FailsimError>>()?;
    Ok(schemes
        .iter()
        .enumerate()
        .map(|(j, &scheme)| StretchSeries { scheme, points: per_time.iter().map(|row| row[j]).collect() })
        .collect())
}

/// Leading comment lines of a stretch CSV.
#[derive(Clone, Debug)]
pub struct CsvMeta {
    pub topology: String,
    pub seed: Option<u64>,
    pub params: TimingParams,
}

/// Writes one row per scheme and generation time.
pub fn write_csv<W: Write>(out: &mut W, meta: &CsvMeta, series: &[StretchSeries]) -> io::Result<()> {
    writeln!(out, "# topology {}", meta.topology)?;
    match meta.seed {
        Some(seed) => writeln!(out, "# seed {seed}")?,
        None => writeln!(out, "# seed none")?,
    }
    writeln!(out, "# params {}", meta.params)?;
    writeln!(out, "scheme,gen_time_ms,mean_stretch,max_stretch,n_triples,mean_minus_one")?;
    for s in series {
        for p in &s.points {
            writeln!(
                out,
                "{},{},{:.9},{:.9},{},{:.9e}",
                s.scheme,
                p.gen_time,
                p.mean,
                p.max.value(),
                p.n,
                p.mean_excess
            )?;
        }
    }
    Ok(())
}
