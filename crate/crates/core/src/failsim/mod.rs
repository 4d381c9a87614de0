// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Packet stretch after a single link failure.
//!
//! A failure scenario is a triple `(l0, s, d)`: link `l0 = r0 -> b` fails at
//! time `t0` and lies on the shortest path from `s` to `d`. Sources send one
//! packet every `gen_interval`, starting at time zero. Each scheme is
//! modelled in closed form, giving the stretch of the packet sent at time
//! `t` as the ratio of its delivery latency to the post-failure shortest
//! latency from `s` to `d`.
//!
//! A failed link is unusable in both directions. Triples whose source and
//! destination are disconnected after the failure are not evaluated.

mod eval;
mod model;
mod sample;

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::latency::Latency;
use crate::topology::{LinkId, NodeId, TopologyError};

pub use eval::{compute_geometries, horizon, run_eval, write_csv, CsvMeta, SeriesPoint, StretchSeries};
pub use model::{convergence_time, failure_links, first_affected_send, stretch, TripleGeometry, Upstream};
pub use sample::{all_triples, sample_triples, SampleCounts};

/// Timing of the failure and of the control plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimingParams {
    /// Failure time.
    pub t0: Latency,
    /// Delay from learning of a failure to using the new route.
    pub fib_delay: Latency,
    /// Extra processing delay per hop when relaying link-state updates.
    pub hop_delay: Latency,
    /// Packet generation interval.
    pub gen_interval: Latency,
}

impl TimingParams {
    pub const SPRINT: TimingParams = TimingParams {
        t0: Latency::from_ms(150),
        fib_delay: Latency::from_ms(50),
        hop_delay: Latency::from_ms(2),
        gen_interval: Latency::ONE_MS,
    };

    pub const FLAT: TimingParams = TimingParams {
        t0: Latency::from_ms(50),
        fib_delay: Latency::ZERO,
        hop_delay: Latency::ZERO,
        gen_interval: Latency::ONE_MS,
    };

    /// Named presets: `sprint`, `flat`, and `sprint0`/`flat0` with the
    /// failure at time zero.
    pub fn preset(name: &str) -> Option<TimingParams> {
        match name {
            "sprint" => Some(Self::SPRINT),
            "flat" => Some(Self::FLAT),
            "sprint0" => Some(TimingParams { t0: Latency::ZERO, ..Self::SPRINT }),
            "flat0" => Some(TimingParams { t0: Latency::ZERO, ..Self::FLAT }),
            _ => None,
        }
    }

    pub const PRESET_NAMES: [&'static str; 4] = ["sprint", "flat", "sprint0", "flat0"];

    /// The same parameters with an instantaneous control plane.
    pub fn without_control_delays(self) -> TimingParams {
        TimingParams { fib_delay: Latency::ZERO, hop_delay: Latency::ZERO, ..self }
    }

    pub fn validate(&self) -> Result<(), FailsimError> {
        if self.t0.is_negative() || self.fib_delay.is_negative() || self.hop_delay.is_negative() {
            return Err(FailsimError::BadParams("delays and failure time must be non-negative".into()));
        }
        if self.gen_interval <= Latency::ZERO {
            return Err(FailsimError::BadParams("generation interval must be positive".into()));
        }
        Ok(())
    }
}

impl fmt::Display for TimingParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t0={}ms fib_delay={}ms hop_delay={}ms gen_interval={}ms",
            self.t0, self.fib_delay, self.hop_delay, self.gen_interval
        )
    }
}

/// Failure reaction schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Source routing; the source learns from the flooded link-state update.
    FloodedSp,
    /// Source routing; the failed router notifies the source directly.
    FastSp,
    /// Source routing; the destination notifies the source of a packet
    /// that took an alternate.
    E2eSp,
    /// Plain source routing; packets hitting the failure are lost and
    /// resent once the source is notified.
    FastVsr,
    /// Hop-by-hop routing with ideal safe convergence.
    IdealSafeguard,
    /// Hop-by-hop routing with instantaneous convergence.
    IdealNcr,
}

impl Scheme {
    pub const ALL: [Scheme; 6] =
        [Scheme::FloodedSp, Scheme::FastSp, Scheme::E2eSp, Scheme::FastVsr, Scheme::IdealSafeguard, Scheme::IdealNcr];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::FloodedSp => "flooded-sp",
            Scheme::FastSp => "fast-sp",
            Scheme::E2eSp => "e2e-sp",
            Scheme::FastVsr => "fast-vsr",
            Scheme::IdealSafeguard => "ideal-safeguard",
            Scheme::IdealNcr => "ideal-ncr",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown scheme `{s}`"))
    }
}

/// A failure scenario. `r0` is the tail of `l0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub l0: LinkId,
    pub s: NodeId,
    pub d: NodeId,
    pub r0: NodeId,
}

/// Exact ratio of two latencies; the denominator is positive.
#[derive(Clone, Copy, Debug)]
pub struct Stretch {
    num: i64,
    den: i64,
}

impl Stretch {
    pub const ONE: Stretch = Stretch { num: 1, den: 1 };

    pub fn new(num: Latency, den: Latency) -> Stretch {
        assert!(den > Latency::ZERO, "stretch denominator must be positive");
        Stretch { num: num.ticks(), den: den.ticks() }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> i64 {
        self.den
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn is_one(self) -> bool {
        self.num == self.den
    }
}

impl PartialEq for Stretch {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Stretch {}

impl PartialOrd for Stretch {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Stretch {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Stretch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.9}", self.value())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FailsimError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("invalid timing parameters: {0}")]
    BadParams(String),
    #[error("link {0} is not on the shortest path of the triple")]
    NotOnPath(LinkId),
    #[error("node {to} is unreachable from node {from} after the failure")]
    Unreachable { from: NodeId, to: NodeId },
    #[error("negative generation time")]
    NegativeTime,
}
