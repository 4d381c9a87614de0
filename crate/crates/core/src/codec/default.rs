// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Default format: one segment per primary hop.
//!
//! ```text
//!  0                15 16 17
//! +-------------------+--+----------------------------------- - -
//! |   header length   |A |  S_0  S_1  ...  S_{k-1}
//! +-------------------+--+----------------------------------- - -
//!
//! segment S_i, for primary node v_i:
//! +-----+-------+----------+---------------------+
//! |  p  | code  |  length  |  d_1 d_2 ... d_l    |
//! +-----+-------+----------+---------------------+
//!   p       primary next-hop label, width advertised by v_i
//!   code    0 -> 5-bit length, 10 -> 7-bit length, 110 -> no alternate
//!   length  total bits of d_1..d_l
//! ```
//!
//! Header length counts the body bits after the `A` (on-alternate) flag.
//! Nothing is byte aligned except the start of the header. Once a packet
//! switches to its alternate, the body is just the remaining labels.
//!
//! [`PointerHeader`] is the same header with a start/end pointer pair in
//! front, so routers advance pointers instead of moving bits.

use crate::bits::BitBuf;
use crate::fs::ForwardingSubgraph;
use crate::topology::{LinkLabel, NodeId, Topology};

use super::CodecError;

/// Bits before the body: the length field and the on-alternate flag.
pub const PREAMBLE_BITS: usize = 17;
const MAX_BODY_BITS: usize = u16::MAX as usize;
/// Bits in front of a [`PointerHeader`] body.
pub const POINTER_PREAMBLE_BITS: usize = 12 + 12 + PREAMBLE_BITS;
const MAX_POINTER_BODY_BITS: usize = (1 << 12) - 1;

/// Prefix code selecting the width of the alternate length field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LengthCode {
    /// `0`, 5-bit length.
    Short,
    /// `10`, 7-bit length.
    Long,
    /// `110`, no length field and no alternate.
    Absent,
}

impl LengthCode {
    /// Canonical code for an alternate of `bits` label bits.
    pub fn for_bits(bits: usize) -> Option<Self> {
        match bits {
            0 => Some(LengthCode::Absent),
            1..=31 => Some(LengthCode::Short),
            32..=127 => Some(LengthCode::Long),
            _ => None,
        }
    }

    pub fn field_width(self) -> u8 {
        match self {
            LengthCode::Short => 5,
            LengthCode::Long => 7,
            LengthCode::Absent => 0,
        }
    }

    /// Code word as `(value, width)`.
    pub fn word(self) -> (u64, u8) {
        match self {
            LengthCode::Short => (0b0, 1),
            LengthCode::Long => (0b10, 2),
            LengthCode::Absent => (0b110, 3),
        }
    }
}

/// One parsed segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    pub primary: LinkLabel,
    pub code: LengthCode,
    pub alt_labels: Vec<LinkLabel>,
    /// Value of the length field.
    pub alt_bits: usize,
    /// Offset of `d_1` from the start of the segment.
    pub alt_offset: usize,
    /// Total segment bits.
    pub bit_len: usize,
}

/// What the router holding the packet must do.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefaultStep {
    AtDestination,
    Primary(Segment),
    Alternate(LinkLabel),
}

/// Operations a router performs on a Default-format header.
pub trait DefaultCursor {
    /// Parses the part of the header addressed to `current`.
    fn step(&self, topo: &Topology, current: NodeId) -> Result<DefaultStep, CodecError>;
    /// Drops the leading segment after forwarding on the primary.
    fn consume_segment(&mut self, seg: &Segment);
    /// Replaces all segments with `d_2..d_l` of `seg` and sets the flag.
    fn take_alternate(&mut self, seg: &Segment);
    /// Drops the leading label after forwarding on an alternate.
    fn consume_label(&mut self, label: LinkLabel);
    fn header_length(&self) -> u16;
    fn on_alternate(&self) -> bool;
    /// Body bits still addressed to downstream routers.
    fn window(&self) -> BitBuf;
}

/// A serialized Default-format header.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefaultHeader {
    bits: BitBuf,
}

impl DefaultHeader {
    fn from_body(on_alternate: bool, body: &BitBuf) -> Self {
        let mut bits = BitBuf::new();
        bits.push(body.len() as u64, 16);
        bits.push_bit(on_alternate);
        bits.extend(body);
        DefaultHeader { bits }
    }

    pub fn as_bits(&self) -> &BitBuf {
        &self.bits
    }

    pub fn body(&self) -> BitBuf {
        self.bits.slice(PREAMBLE_BITS, self.bits.len())
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

    /// Reads a header whose length is given by its own length field.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let head = BitBuf::from_bytes(bytes, bytes.len() * 8).expect("full length");
        let declared = head.read(0, 16).ok_or(CodecError::Truncated { pos: 0 })? as usize;
        let total = PREAMBLE_BITS + declared;
        if bytes.len() != total.div_ceil(8) {
            return Err(CodecError::LengthMismatch { declared, actual: (bytes.len() * 8).saturating_sub(PREAMBLE_BITS) });
        }
        Ok(DefaultHeader { bits: BitBuf::from_bytes(bytes, total).expect("checked length") })
    }
}

impl DefaultCursor for DefaultHeader {
    fn step(&self, topo: &Topology, current: NodeId) -> Result<DefaultStep, CodecError> {
        let declared = self.header_length() as usize;
        let actual = self.bits.len() - PREAMBLE_BITS;
        if declared != actual {
            return Err(CodecError::LengthMismatch { declared, actual });
        }
        parse_step(&self.bits, PREAMBLE_BITS, self.bits.len(), self.on_alternate(), topo, current)
    }

    fn consume_segment(&mut self, seg: &Segment) {
        let body = self.bits.slice(PREAMBLE_BITS + seg.bit_len, self.bits.len());
        *self = DefaultHeader::from_body(self.on_alternate(), &body);
    }

    fn take_alternate(&mut self, seg: &Segment) {
        let d1 = seg.alt_labels.first().map_or(0, |l| l.width as usize);
        let from = PREAMBLE_BITS + seg.alt_offset + d1;
        let to = PREAMBLE_BITS + seg.alt_offset + seg.alt_bits;
        let body = self.bits.slice(from, to);
        *self = DefaultHeader::from_body(true, &body);
    }

    fn consume_label(&mut self, label: LinkLabel) {
        let body = self.bits.slice(PREAMBLE_BITS + label.width as usize, self.bits.len());
        *self = DefaultHeader::from_body(self.on_alternate(), &body);
    }

    fn header_length(&self) -> u16 {
        self.bits.read(0, 16).expect("preamble present") as u16
    }

    fn on_alternate(&self) -> bool {
        self.bits.bit(16)
    }

    fn window(&self) -> BitBuf {
        self.body()
    }
}

/// Default-format header addressed through start/end pointers.
///
/// ```text
///  0          11 12         23 24               39 40 41
/// +-------------+-------------+-------------------+--+--------- - -
/// |    start    |     end     |   header length   |A |  body
/// +-------------+-------------+-------------------+--+--------- - -
/// ```
///
/// `start` and `end` are bit offsets into the body, which never changes in
/// flight. The length field is kept equal to `end - start`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointerHeader {
    bits: BitBuf,
}

impl PointerHeader {
    pub fn as_bits(&self) -> &BitBuf {
        &self.bits
    }

    pub fn start(&self) -> usize {
        self.bits.read(0, 12).expect("preamble present") as usize
    }

    pub fn end(&self) -> usize {
        self.bits.read(12, 12).expect("preamble present") as usize
    }

    pub fn size_bytes(&self) -> usize {
        self.bits.len().div_ceil(8)
    }

    fn set_window(&mut self, start: usize, end: usize, on_alternate: bool) {
        self.bits.write(0, start as u64, 12);
        self.bits.write(12, end as u64, 12);
        self.bits.write(24, (end - start) as u64, 16);
        self.bits.write(40, on_alternate as u64, 1);
    }
}

impl DefaultCursor for PointerHeader {
    fn step(&self, topo: &Topology, current: NodeId) -> Result<DefaultStep, CodecError> {
        let (start, end) = (self.start(), self.end());
        let body_len = self.bits.len() - POINTER_PREAMBLE_BITS;
        if start > end || end > body_len {
            return Err(CodecError::BadPointer { ptr: end });
        }
        if self.header_length() as usize != end - start {
            return Err(CodecError::LengthMismatch { declared: self.header_length() as usize, actual: end - start });
        }
        let base = POINTER_PREAMBLE_BITS;
        parse_step(&self.bits, base + start, base + end, self.on_alternate(), topo, current)
    }

    fn consume_segment(&mut self, seg: &Segment) {
        let (start, end) = (self.start(), self.end());
        self.set_window(start + seg.bit_len, end, self.on_alternate());
    }

    fn take_alternate(&mut self, seg: &Segment) {
        let start = self.start();
        let d1 = seg.alt_labels.first().map_or(0, |l| l.width as usize);
        self.set_window(start + seg.alt_offset + d1, start + seg.alt_offset + seg.alt_bits, true);
    }

    fn consume_label(&mut self, label: LinkLabel) {
        let (start, end) = (self.start(), self.end());
        self.set_window(start + label.width as usize, end, self.on_alternate());
    }

    fn header_length(&self) -> u16 {
        self.bits.read(24, 16).expect("preamble present") as u16
    }

    fn on_alternate(&self) -> bool {
        self.bits.bit(40)
    }

    fn window(&self) -> BitBuf {
        let base = POINTER_PREAMBLE_BITS;
        self.bits.slice(base + self.start(), base + self.end())
    }
}

fn encode_body(fs: &ForwardingSubgraph, topo: &Topology) -> Result<BitBuf, CodecError> {
    let mut body = BitBuf::new();
    for (i, &link) in fs.primary_links().iter().enumerate() {
        let at = fs.node(fs.primary()[i]).physical;
        let p = topo.label(link);
        body.push(p.value as u64, p.width);
        let labels: Vec<LinkLabel> =
            fs.alternate(i).map(|alt| alt.links.iter().map(|&l| topo.label(l)).collect()).unwrap_or_default();
        if labels.last().is_some_and(|l| l.width == 0) {
            return Err(CodecError::AmbiguousAlternateTail { at });
        }
        let bits: usize = labels.iter().map(|l| l.width as usize).sum();
        let code = LengthCode::for_bits(bits).ok_or(CodecError::AlternateTooLong { at, bits })?;
        let (word, word_len) = code.word();
        body.push(word, word_len);
        body.push(bits as u64, code.field_width());
        for l in labels {
            body.push(l.value as u64, l.width);
        }
    }
    Ok(body)
}

/// Encodes `fs` in the Default format.
pub fn encode_default(fs: &ForwardingSubgraph, topo: &Topology) -> Result<DefaultHeader, CodecError> {
    let body = encode_body(fs, topo)?;
    if body.len() > MAX_BODY_BITS {
        return Err(CodecError::BodyTooLong { bits: body.len(), max: MAX_BODY_BITS });
    }
    Ok(DefaultHeader::from_body(false, &body))
}

/// Encodes `fs` in the Default format with start/end pointers.
pub fn encode_default_pointer(fs: &ForwardingSubgraph, topo: &Topology) -> Result<PointerHeader, CodecError> {
    let body = encode_body(fs, topo)?;
    if body.len() > MAX_POINTER_BODY_BITS {
        return Err(CodecError::BodyTooLong { bits: body.len(), max: MAX_POINTER_BODY_BITS });
    }
    let mut bits = BitBuf::new();
    bits.push(0, 12);
    bits.push(body.len() as u64, 12);
    bits.push(body.len() as u64, 16);
    bits.push_bit(false);
    bits.extend(&body);
    Ok(PointerHeader { bits })
}

/// Parses the part of `header` addressed to `current`.
pub fn decode_default(header: &DefaultHeader, topo: &Topology, current: NodeId) -> Result<DefaultStep, CodecError> {
    header.step(topo, current)
}

/// Size of the Default encoding of `fs` in bytes.
pub fn default_size_bytes(fs: &ForwardingSubgraph, topo: &Topology) -> Result<usize, CodecError> {
    encode_default(fs, topo).map(|h| h.size_bytes())
}

fn read_in(bits: &BitBuf, pos: usize, width: u8, end: usize) -> Result<u64, CodecError> {
    if pos + width as usize > end {
        return Err(CodecError::Truncated { pos });
    }
    Ok(bits.read(pos, width).expect("within buffer"))
}

fn parse_step(
    bits: &BitBuf,
    start: usize,
    end: usize,
    on_alternate: bool,
    topo: &Topology,
    current: NodeId,
) -> Result<DefaultStep, CodecError> {
    if start == end {
        return Ok(DefaultStep::AtDestination);
    }
    if !topo.contains_node(current) {
        return Err(CodecError::Malformed(format!("unknown node {current}")));
    }
    let label_at = |pos: usize, node: NodeId| -> Result<(LinkLabel, NodeId), CodecError> {
        let width = topo.label_width(node);
        let value = read_in(bits, pos, width, end)?;
        let link = topo.link_by_label(node, value as u32).ok_or(CodecError::UnknownLabel { node, value })?;
        Ok((LinkLabel { value: value as u32, width }, topo.link(link).dst))
    };
    if on_alternate {
        return Ok(DefaultStep::Alternate(label_at(start, current)?.0));
    }

    let mut pos = start;
    let (primary, _) = label_at(pos, current)?;
    pos += primary.width as usize;
    let code = if read_in(bits, pos, 1, end)? == 0 {
        LengthCode::Short
    } else if read_in(bits, pos + 1, 1, end)? == 0 {
        LengthCode::Long
    } else if read_in(bits, pos + 2, 1, end)? == 0 {
        LengthCode::Absent
    } else {
        return Err(CodecError::BadCode { pos });
    };
    pos += code.word().1 as usize;
    let alt_bits = read_in(bits, pos, code.field_width(), end)? as usize;
    pos += code.field_width() as usize;
    if pos + alt_bits > end {
        return Err(CodecError::LengthOverrun { declared: alt_bits, available: end - pos });
    }
    let alt_offset = pos - start;
    let mut alt_labels = Vec::new();
    let mut node = current;
    let mut used = 0;
    while used < alt_bits {
        if alt_labels.len() >= topo.node_count() {
            return Err(CodecError::Malformed("alternate longer than any simple path".into()));
        }
        let (label, next) = label_at(pos + used, node)?;
        if used + label.width as usize > alt_bits {
            return Err(CodecError::Malformed("label crosses the end of the alternate".into()));
        }
        used += label.width as usize;
        alt_labels.push(label);
        node = next;
    }
    Ok(DefaultStep::Primary(Segment {
        primary,
        code,
        alt_labels,
        alt_bits,
        alt_offset,
        bit_len: alt_offset + alt_bits,
    }))
}
