// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Header formats.
//!
//! [`default`] stores one segment per primary hop. [`direct`] stores the FS
//! as node descriptors linked by bit offsets. Both are bit exact and MSB
//! first; see the module docs for the layouts.

pub mod default;
pub mod direct;
pub mod golden;

use crate::topology::NodeId;

pub use default::{
    decode_default, default_size_bytes, encode_default, encode_default_pointer, DefaultCursor, DefaultHeader,
    DefaultStep, LengthCode, PointerHeader, Segment,
};
pub use direct::{
    decode_direct_step, direct_size_bytes, encode_direct, DirectHeader, DirectStep, PtrWidth, Successor,
};
pub use golden::{encode_pair, GoldenError, GoldenVector, HeaderFormat};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("alternate at node {at} needs {bits} bits, more than the 127 a length field can hold")]
    AlternateTooLong { at: NodeId, bits: usize },
    #[error("alternate at node {at} ends in empty labels and cannot be delimited by length")]
    AmbiguousAlternateTail { at: NodeId },
    #[error("header body of {bits} bits exceeds the {max}-bit limit")]
    BodyTooLong { bits: usize, max: usize },
    #[error("node {node} has {count} successors; a descriptor holds one or two")]
    TooManySuccessors { node: NodeId, count: usize },
    #[error("node descriptor offset {offset} does not fit a 10-bit pointer")]
    PointerOverflow { offset: usize },
    #[error("header truncated at bit {pos}")]
    Truncated { pos: usize },
    #[error("length field {declared} runs past the {available} remaining bits")]
    LengthOverrun { declared: usize, available: usize },
    #[error("invalid prefix code at bit {pos}")]
    BadCode { pos: usize },
    #[error("node {node} advertises no label {value}")]
    UnknownLabel { node: NodeId, value: u64 },
    #[error("pointer {ptr} does not address a node descriptor")]
    BadPointer { ptr: usize },
    #[error("declared header length {declared} does not match {actual} body bits")]
    LengthMismatch { declared: usize, actual: usize },
    #[error("malformed header: {0}")]
    Malformed(String),
}
