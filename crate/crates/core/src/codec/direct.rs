// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Direct format: the FS serialized as linked node descriptors.
//!
//! ```text
//! +---------------+----------------+------+------+-- - - --+
//! | NodePtrLength | CurrentNodePtr | ND   | ND   |   ...    |
//! +---------------+----------------+------+------+-- - - --+
//!   0 -> 10-bit, 10 -> 8-bit, 110 -> 6-bit, 1110 -> 4-bit pointers
//!
//! node descriptor (ND):           successor descriptor (SD):
//! +---+-----+-------+             +--------+---+-------+
//! | N | SD1 | [SD2] |             | LinkId | C | [Ptr] |
//! +---+-----+-------+             +--------+---+-------+
//!   N = 0: one SD, 1: two SDs       C = 0: successor ND follows this ND
//!                                   C = 1: Ptr holds its offset
//! ```
//!
//! Pointers are bit offsets from bit 0 of the header. Pointer value 0 means
//! the successor is the destination. `LinkId` has the label width of the
//! node the ND describes.
//!
//! The encoder writes the primary nodes first, source first, then the nodes
//! each alternate added, in the order the alternates were built. The
//! destination gets no ND. The narrowest pointer width whose layout fits is
//! used.

use crate::bits::BitBuf;
use crate::fs::{ForwardingSubgraph, FsNodeId};
use crate::topology::{LinkId, LinkLabel, NodeId, Topology};

use super::CodecError;

/// Width of node pointers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PtrWidth {
    W4,
    W6,
    W8,
    W10,
}

impl PtrWidth {
    /// Narrowest first.
    pub const ALL: [PtrWidth; 4] = [PtrWidth::W4, PtrWidth::W6, PtrWidth::W8, PtrWidth::W10];

    pub fn bits(self) -> u8 {
        match self {
            PtrWidth::W4 => 4,
            PtrWidth::W6 => 6,
            PtrWidth::W8 => 8,
            PtrWidth::W10 => 10,
        }
    }

    /// NodePtrLength code word as `(value, width)`.
    pub fn word(self) -> (u64, u8) {
        match self {
            PtrWidth::W10 => (0b0, 1),
            PtrWidth::W8 => (0b10, 2),
            PtrWidth::W6 => (0b110, 3),
            PtrWidth::W4 => (0b1110, 4),
        }
    }

    /// Bits taken by NodePtrLength and CurrentNodePtr.
    pub fn preamble_bits(self) -> usize {
        (self.word().1 + self.bits()) as usize
    }
}

/// One successor the router may use, in preference order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Successor {
    pub label: LinkLabel,
    pub link: LinkId,
    /// CurrentNodePtr value to install when this successor is used.
    pub next_ptr: usize,
    pub has_ptr: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DirectStep {
    Egress,
    Node { nd_bits: usize, successors: Vec<Successor> },
}

/// A serialized Direct-format header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectHeader {
    bits: BitBuf,
}

impl DirectHeader {
    pub fn as_bits(&self) -> &BitBuf {
        &self.bits
    }

    pub fn bit_len(&self) -> usize {
        self.bits.len()
    }

    pub fn size_bytes(&self) -> usize {
        self.bits.len().div_ceil(8)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits.as_bytes().to_vec()
    }

    /// Reads a header; pad bits at the end are harmless.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let h = DirectHeader { bits: BitBuf::from_bytes(bytes, bytes.len() * 8).expect("full length") };
        h.current_ptr()?;
        Ok(h)
    }

    /// Reads a header of exactly `bits` bits.
    pub fn from_bits(bits: BitBuf) -> Result<Self, CodecError> {
        let h = DirectHeader { bits };
        h.current_ptr()?;
        Ok(h)
    }

    pub fn ptr_width(&self) -> Result<PtrWidth, CodecError> {
        for (i, w) in [PtrWidth::W10, PtrWidth::W8, PtrWidth::W6, PtrWidth::W4].into_iter().enumerate() {
            match self.bits.read(i, 1) {
                Some(0) => return Ok(w),
                Some(_) => {}
                None => return Err(CodecError::Truncated { pos: i }),
            }
        }
        Err(CodecError::BadCode { pos: 0 })
    }

    pub fn current_ptr(&self) -> Result<usize, CodecError> {
        let w = self.ptr_width()?;
        let pos = w.word().1 as usize;
        self.bits.read(pos, w.bits()).map(|v| v as usize).ok_or(CodecError::Truncated { pos })
    }

    /// Installs a new CurrentNodePtr.
    pub fn set_current_ptr(&mut self, ptr: usize) -> Result<(), CodecError> {
        let w = self.ptr_width()?;
        if ptr >> w.bits() != 0 {
            return Err(CodecError::BadPointer { ptr });
        }
        self.bits.write(w.word().1 as usize, ptr as u64, w.bits());
        Ok(())
    }
}

/// Parses the ND that the header's CurrentNodePtr addresses, as seen by
/// router `current`.
pub fn decode_direct_step(header: &DirectHeader, topo: &Topology, current: NodeId) -> Result<DirectStep, CodecError> {
    let w = header.ptr_width()?;
    let ptr = header.current_ptr()?;
    if ptr == 0 {
        return Ok(DirectStep::Egress);
    }
    if ptr < w.preamble_bits() || ptr >= header.bits.len() {
        return Err(CodecError::BadPointer { ptr });
    }
    if !topo.contains_node(current) {
        return Err(CodecError::Malformed(format!("unknown node {current}")));
    }
    let bits = &header.bits;
    let read = |pos: usize, width: u8| bits.read(pos, width).ok_or(CodecError::Truncated { pos });
    let mut pos = ptr;
    let count = read(pos, 1)? as usize + 1;
    pos += 1;
    let label_width = topo.label_width(current);
    let mut raw = Vec::with_capacity(count);
    for _ in 0..count {
        let value = read(pos, label_width)?;
        pos += label_width as usize;
        let link = topo.link_by_label(current, value as u32).ok_or(CodecError::UnknownLabel { node: current, value })?;
        let has_ptr = read(pos, 1)? == 1;
        pos += 1;
        let target = if has_ptr {
            let p = read(pos, w.bits())? as usize;
            pos += w.bits() as usize;
            Some(p)
        } else {
            None
        };
        raw.push((LinkLabel { value: value as u32, width: label_width }, link, has_ptr, target));
    }
    let nd_bits = pos - ptr;
    let successors = raw
        .into_iter()
        .map(|(label, link, has_ptr, target)| Successor { label, link, next_ptr: target.unwrap_or(ptr + nd_bits), has_ptr })
        .collect();
    Ok(DirectStep::Node { nd_bits, successors })
}

/// Encodes `fs` in the Direct format.
pub fn encode_direct(fs: &ForwardingSubgraph, topo: &Topology) -> Result<DirectHeader, CodecError> {
    let dest = fs.destination_node();
    let order: Vec<FsNodeId> = (0..fs.nodes().len() as u32).map(FsNodeId).filter(|&n| n != dest).collect();
    for &n in &order {
        let count = fs.successors(n).len();
        if count == 0 || count > 2 {
            return Err(CodecError::TooManySuccessors { node: fs.node(n).physical, count });
        }
    }
    let mut slot = vec![usize::MAX; fs.nodes().len()];
    for (i, &n) in order.iter().enumerate() {
        slot[n.index()] = i;
    }
    // whether each SD can rely on its successor following immediately
    let follows = |from: usize, to: FsNodeId| to != dest && slot[to.index()] == from + 1;

    let mut last_max = 0;
    for w in PtrWidth::ALL {
        let mut offsets = Vec::with_capacity(order.len());
        let mut off = w.preamble_bits();
        for (i, &n) in order.iter().enumerate() {
            offsets.push(off);
            let lw = topo.label_width(fs.node(n).physical) as usize;
            off += 1;
            for (j, &(to, _)) in fs.successors(n).iter().enumerate() {
                off += lw + 1;
                if j > 0 || !follows(i, to) {
                    off += w.bits() as usize;
                }
            }
        }
        let max = offsets.iter().copied().max().unwrap_or(0);
        last_max = max;
        if max >> w.bits() != 0 {
            continue;
        }

        let mut bits = BitBuf::new();
        let (word, word_len) = w.word();
        bits.push(word, word_len);
        bits.push(offsets[0] as u64, w.bits());
        for (i, &n) in order.iter().enumerate() {
            debug_assert_eq!(bits.len(), offsets[i]);
            let succ = fs.successors(n);
            bits.push_bit(succ.len() == 2);
            for (j, &(to, link)) in succ.iter().enumerate() {
                let label = topo.label(link);
                bits.push(label.value as u64, label.width);
                if j == 0 && follows(i, to) {
                    bits.push_bit(false);
                } else {
                    bits.push_bit(true);
                    let target = if to == dest { 0 } else { offsets[slot[to.index()]] };
                    bits.push(target as u64, w.bits());
                }
            }
        }
        return Ok(DirectHeader { bits });
    }
    Err(CodecError::PointerOverflow { offset: last_max })
}

/// Size of the Direct encoding of `fs` in bytes.
pub fn direct_size_bytes(fs: &ForwardingSubgraph, topo: &Topology) -> Result<usize, CodecError> {
    encode_direct(fs, topo).map(|h| h.size_bytes())
}
