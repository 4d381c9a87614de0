// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Encode, decode and walk helpers shared by the codec and forwarding tests.

use slick_core::codec::{encode_default, encode_direct, DefaultHeader, DirectHeader, HeaderFormat};
use slick_core::forward::{forward_packet, EncodedHeader, FailedSet, PacketTrace};
use slick_core::fs::ForwardingSubgraph;
use slick_core::topology::LinkLabel;
use slick_core::{LinkId, Topology};

pub const FORMATS: [HeaderFormat; 2] = [HeaderFormat::Default, HeaderFormat::Direct];

/// Encodes `fs` and passes the header through its byte form.
pub fn encode_via_bytes(fs: &ForwardingSubgraph, topo: &Topology, format: HeaderFormat) -> Result<EncodedHeader, String> {
    Ok(match format {
        HeaderFormat::Default => {
            let h = encode_default(fs, topo).map_err(|e| e.to_string())?;
            let back = DefaultHeader::from_bytes(&h.to_bytes()).map_err(|e| e.to_string())?;
            if back.as_bits() != h.as_bits() {
                return Err("default header changed through bytes".into());
            }
            EncodedHeader::Default(back)
        }
        HeaderFormat::Direct => {
            let h = encode_direct(fs, topo).map_err(|e| e.to_string())?;
            let back = DirectHeader::from_bytes(&h.to_bytes()).map_err(|e| e.to_string())?;
            // No length field: the parsed header keeps the pad bits.
            if back.to_bytes() != h.to_bytes() || back.bit_len() != h.size_bytes() * 8 {
                return Err("direct header changed through bytes".into());
            }
            EncodedHeader::Direct(back)
        }
    })
}

fn labels(topo: &Topology, links: &[LinkId]) -> Vec<LinkLabel> {
    links.iter().map(|&l| topo.label(l)).collect()
}

fn walk(header: &EncodedHeader, topo: &Topology, fs: &ForwardingSubgraph, failed: &FailedSet) -> Result<PacketTrace, String> {
    forward_packet(header, topo, fs.source(), failed).map_err(|e| e.to_string())
}

/// Checks that walking the decoded header reproduces the primary labels
/// and, with each primary link failed in turn, the alternate labels.
pub fn check_label_roundtrip(fs: &ForwardingSubgraph, topo: &Topology, format: HeaderFormat) -> Result<(), String> {
    let header = encode_via_bytes(fs, topo, format)?;
    let primary = labels(topo, fs.primary_links());
    let clean = walk(&header, topo, fs, &FailedSet::none())?;
    let got: Vec<LinkLabel> = clean.hops.iter().map(|h| h.label).collect();
    if !clean.delivered() || got != primary {
        return Err(format!("{format}: primary walk gave {got:?}, expected {primary:?}"));
    }
    for (i, alt) in fs.alternates().iter().enumerate() {
        let Some(alt) = alt else { continue };
        let trace = walk(&header, topo, fs, &FailedSet::link(fs.primary_links()[i]))?;
        let mut want = primary[..i].to_vec();
        want.extend(labels(topo, &alt.links));
        let got: Vec<LinkLabel> = trace.hops.iter().map(|h| h.label).collect();
        if !trace.delivered() || got != want {
            return Err(format!("{format}: alternate {i} walk gave {got:?}, expected {want:?}"));
        }
    }
    Ok(())
}

/// Walks both formats over the same failure and returns both traces.
pub fn walk_both(fs: &ForwardingSubgraph, topo: &Topology, failed: &FailedSet) -> Result<[PacketTrace; 2], String> {
    let a = walk(&encode_via_bytes(fs, topo, HeaderFormat::Default)?, topo, fs, failed)?;
    let b = walk(&encode_via_bytes(fs, topo, HeaderFormat::Direct)?, topo, fs, failed)?;
    Ok([a, b])
}
