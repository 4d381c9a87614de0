// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Source-routed packets that carry their own failure detours.
//!
//! The source computes a forwarding subgraph (a primary path plus one
//! alternate per primary hop), encodes it into the packet header, and every
//! router on the way picks the primary or the alternate next hop using only
//! the header and the state of its own links.
//!
//! Modules:
//! - [`topology`]: network maps, link labels and shortest paths.
//! - [`fs`]: forwarding-subgraph construction.
//! - [`codec`]: the two header formats.
//! - [`forward`]: hop-by-hop forwarding over a header.
//! - [`failsim`]: packet stretch after a failure for six reaction schemes.
//! - [`bounds`]: lower bounds on FS size and graphs that meet them.
//! - [`sizes`]: header sizes over many pairs.

pub mod bits;
pub mod bounds;
pub mod codec;
pub mod failsim;
pub mod forward;
pub mod fs;
pub mod latency;
pub mod sizes;
pub mod topology;

pub use latency::Latency;
pub use topology::{LinkId, NodeId, Topology};
