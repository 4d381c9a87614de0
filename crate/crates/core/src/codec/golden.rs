// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Golden vectors for cross-implementation checks.
//!
//! A vector file holds records separated by blank lines. Each record is a
//! set of `key=value` lines:
//!
//! ```text
//! format=default
//! topology=diamond.txt
//! source=0
//! destination=5
//! bits=45
//! hex=00001c...
//! ```
//!
//! `hex` is a format tag byte (`00` Default, `01` Direct) followed by the
//! header bytes. `bits` is the exact header length in bits. The FS is the
//! single-link one for the given pair. `#` lines are comments.

use std::fmt;
use std::str::FromStr;

use crate::bits::parse_hex;
use crate::fs::{build_fs, FailureModel, FsError};
use crate::topology::{NodeId, Topology};

use super::{encode_default, encode_direct, CodecError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HeaderFormat {
    Default,
    Direct,
}

impl HeaderFormat {
    pub fn tag(self) -> u8 {
        match self {
            HeaderFormat::Default => 0,
            HeaderFormat::Direct => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(HeaderFormat::Default),
            1 => Some(HeaderFormat::Direct),
            _ => None,
        }
    }
}

impl fmt::Display for HeaderFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeaderFormat::Default => "default",
            HeaderFormat::Direct => "direct",
        })
    }
}

impl FromStr for HeaderFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "default" => Ok(HeaderFormat::Default),
            "direct" => Ok(HeaderFormat::Direct),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GoldenError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Fs(#[from] FsError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("{format} {source_node}->{destination}: expected {expected}, encoder produced {actual}")]
    Mismatch { format: HeaderFormat, source_node: NodeId, destination: NodeId, expected: String, actual: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldenVector {
    pub format: HeaderFormat,
    pub topology: String,
    pub source: NodeId,
    pub destination: NodeId,
    pub bits: usize,
    /// Header bytes without the tag.
    pub header: Vec<u8>,
}

/// Encodes the single-link FS for `(s, d)` and returns `(bits, bytes)`.
pub fn encode_pair(
    format: HeaderFormat,
    topo: &Topology,
    s: NodeId,
    d: NodeId,
) -> Result<(usize, Vec<u8>), GoldenError> {
    let fs = build_fs(topo, s, d, &FailureModel::SingleLink)?;
    Ok(match format {
        HeaderFormat::Default => {
            let h = encode_default(&fs, topo)?;
            (h.bit_len(), h.to_bytes())
        }
        HeaderFormat::Direct => {
            let h = encode_direct(&fs, topo)?;
            (h.bit_len(), h.to_bytes())
        }
    })
}

impl GoldenVector {
    pub fn build(
        format: HeaderFormat,
        topology: &str,
        topo: &Topology,
        source: NodeId,
        destination: NodeId,
    ) -> Result<Self, GoldenError> {
        let (bits, header) = encode_pair(format, topo, source, destination)?;
        Ok(GoldenVector { format, topology: topology.to_string(), source, destination, bits, header })
    }

    /// Tag byte followed by the header, in hex.
    pub fn hex(&self) -> String {
        std::iter::once(self.format.tag()).chain(self.header.iter().copied()).map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_text(&self) -> String {
        format!(
            "format={}\ntopology={}\nsource={}\ndestination={}\nbits={}\nhex={}\n",
            self.format,
            self.topology,
            self.source,
            self.destination,
            self.bits,
            self.hex()
        )
    }

    /// Re-encodes against `topo` and compares bit for bit.
    pub fn check(&self, topo: &Topology) -> Result<(), GoldenError> {
        let (bits, header) = encode_pair(self.format, topo, self.source, self.destination)?;
        if bits != self.bits || header != self.header {
            let actual = GoldenVector { bits, header, ..self.clone() };
            return Err(GoldenError::Mismatch {
                format: self.format,
                source_node: self.source,
                destination: self.destination,
                expected: format!("{} bits {}", self.bits, self.hex()),
                actual: format!("{} bits {}", actual.bits, actual.hex()),
            });
        }
        Ok(())
    }

    /// Parses every record in a vector file.
    pub fn parse_all(text: &str) -> Result<Vec<Self>, GoldenError> {
        let mut out = Vec::new();
        let mut fields: Vec<(usize, &str, &str)> = Vec::new();
        let lines = text.lines().map(Some).chain(std::iter::once(None));
        for (i, line) in lines.enumerate() {
            let trimmed = line.map(str::trim);
            match trimmed {
                Some(l) if l.starts_with('#') => continue,
                Some(l) if !l.is_empty() => {
                    let (k, v) = l.split_once('=').ok_or(GoldenError::Parse { line: i + 1, msg: "expected key=value".into() })?;
                    fields.push((i + 1, k.trim(), v.trim()));
                }
                _ => {
                    if !fields.is_empty() {
                        out.push(Self::from_fields(&fields)?);
                        fields.clear();
                    }
                }
            }
        }
        Ok(out)
    }

    fn from_fields(fields: &[(usize, &str, &str)]) -> Result<Self, GoldenError> {
        let first = fields[0].0;
        let get = |key: &str| -> Result<(usize, &str), GoldenError> {
            fields
                .iter()
                .find(|(_, k, _)| *k == key)
                .map(|(l, _, v)| (*l, *v))
                .ok_or(GoldenError::Parse { line: first, msg: format!("missing `{key}`") })
        };
        let bad = |line: usize, what: &str| GoldenError::Parse { line, msg: format!("bad {what}") };
        let (l, format) = get("format")?;
        let format: HeaderFormat = format.parse().map_err(|_| bad(l, "format"))?;
        let (_, topology) = get("topology")?;
        let (l, s) = get("source")?;
        let source = NodeId(s.parse().map_err(|_| bad(l, "source"))?);
        let (l, d) = get("destination")?;
        let destination = NodeId(d.parse().map_err(|_| bad(l, "destination"))?);
        let (l, b) = get("bits")?;
        let bits: usize = b.parse().map_err(|_| bad(l, "bits"))?;
        let (l, hex) = get("hex")?;
        let bytes = parse_hex(hex).ok_or_else(|| bad(l, "hex"))?;
        match bytes.split_first() {
            Some((&tag, header)) if HeaderFormat::from_tag(tag) == Some(format) && header.len() == bits.div_ceil(8) => {
                Ok(GoldenVector { format, topology: topology.to_string(), source, destination, bits, header: header.to_vec() })
            }
            _ => Err(bad(l, "hex: tag or length does not match")),
        }
    }
}
