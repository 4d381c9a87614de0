// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! MSB-first bit strings.
//!
//! Bit 0 is the most significant bit of byte 0. Multi-bit fields are stored
//! big-endian. Headers are not byte aligned internally, so every field is
//! addressed by bit offset.

use std::fmt;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitBuf {
    bytes: Vec<u8>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    /// Takes the first `len` bits of `bytes`.
    pub fn from_bytes(bytes: &[u8], len: usize) -> Option<Self> {
        if len > bytes.len() * 8 {
            return None;
        }
        let mut bytes = bytes[..len.div_ceil(8)].to_vec();
        if !len.is_multiple_of(8) {
            let last = bytes.len() - 1;
            bytes[last] &= 0xFFu8 << (8 - len % 8);
        }
        Some(BitBuf { bytes, len })
    }

    /// Parses a string of `0` and `1` characters.
    pub fn from_bit_str(s: &str) -> Option<Self> {
        let mut b = BitBuf::new();
        for c in s.chars() {
            match c {
                '0' => b.push_bit(false),
                '1' => b.push_bit(true),
                _ => return None,
            }
        }
        Some(b)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Backing bytes; trailing pad bits are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push(&mut self, value: u64, width: u8) {
        debug_assert!(width == 64 || value >> width == 0, "value {value} does not fit {width} bits");
        for i in (0..width).rev() {
            self.push_bit((value >> i) & 1 == 1);
        }
    }

    pub fn extend(&mut self, other: &BitBuf) {
        for i in 0..other.len {
            self.push_bit(other.bit(i));
        }
    }

    pub fn bit(&self, pos: usize) -> bool {
        assert!(pos < self.len, "bit {pos} out of range {}", self.len);
        self.bytes[pos / 8] & (0x80 >> (pos % 8)) != 0
    }

    fn set_bit(&mut self, pos: usize, bit: bool) {
        let mask = 0x80 >> (pos % 8);
        if bit {
            self.bytes[pos / 8] |= mask;
        } else {
            self.bytes[pos / 8] &= !mask;
        }
    }

    /// Reads `width` bits starting at `pos`; `None` past the end.
    pub fn read(&self, pos: usize, width: u8) -> Option<u64> {
        if pos.checked_add(width as usize)? > self.len {
            return None;
        }
        Some((0..width as usize).fold(0u64, |acc, i| (acc << 1) | self.bit(pos + i) as u64))
    }

    /// Overwrites `width` bits at `pos`. Panics past the end.
    pub fn write(&mut self, pos: usize, value: u64, width: u8) {
        assert!(pos + width as usize <= self.len, "write past end");
        for i in 0..width as usize {
            self.set_bit(pos + i, (value >> (width as usize - 1 - i)) & 1 == 1);
        }
    }

    /// Copy of bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> BitBuf {
        assert!(start <= end && end <= self.len);
        let mut out = BitBuf::new();
        for i in start..end {
            out.push_bit(self.bit(i));
        }
        out
    }

    /// Lowercase hex of the backing bytes.
    pub fn to_hex(&self) -> String {
        self.bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for BitBuf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBuf({self})")
    }
}

impl fmt::Display for BitBuf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Decodes a hex string (whitespace ignored).
pub fn parse_hex(s: &str) -> Option<Vec<u8>> {
    let digits: Vec<u8> = s.bytes().filter(|b| !b.is_ascii_whitespace()).collect();
    if !digits.len().is_multiple_of(2) {
        return None;
    }
    digits
        .chunks(2)
        .map(|pair| u8::from_str_radix(std::str::from_utf8(pair).ok()?, 16).ok())
        .collect()
}
