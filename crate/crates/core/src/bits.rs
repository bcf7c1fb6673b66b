//! Bit strings and small sets of fixed-length strings.
//!
//! Strings of length `n` are identified with integers in `0..2^n`, first bit
//! most significant, so numeric order is lexicographic order. A set of
//! `n`-bit strings is a 64-bit membership mask, which caps `n` at 6.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Largest string length a [`StringSet`] can hold.
pub const MAX_SET_LEN: usize = 6;

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// The `len`-bit string whose integer value is `value`.
    pub fn from_u64(value: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        Self((0..len).map(|i| (value >> (len - 1 - i)) & 1 == 1).collect())
    }

    pub fn to_u64(&self) -> u64 {
        debug_assert!(self.0.len() <= 64);
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }

    /// Packs the bits MSB-first into hex, zero-padding the last nibble.
    /// The length is carried separately as `len:hex`.
    pub fn to_hex(&self) -> String {
        let mut out = format!("{}:", self.0.len());
        for chunk in self.0.chunks(4) {
            let mut nib = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    nib |= 8 >> i;
                }
            }
            out.push(char::from_digit(nib as u32, 16).unwrap());
        }
        out
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let (len, hex) = s.split_once(':')?;
        let len: usize = len.parse().ok()?;
        if hex.len() != len.div_ceil(4) {
            return None;
        }
        let mut bits = Vec::with_capacity(len);
        for c in hex.chars() {
            let nib = c.to_digit(16)?;
            for i in 0..4 {
                bits.push(nib & (8 >> i) != 0);
            }
        }
        if bits[len..].iter().any(|&b| b) {
            return None;
        }
        bits.truncate(len);
        Some(Self(bits))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("not a bit: {other:?}")),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of `n`-bit strings, `n <= 6`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StringSet {
    n: u8,
    mask: u64,
}

impl StringSet {
    pub fn empty(n: usize) -> Self {
        assert!(n <= MAX_SET_LEN, "string length {n} exceeds set capacity");
        Self { n: n as u8, mask: 0 }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        s.mask = full_mask(n);
        s
    }

    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut s = Self::empty(n);
        s.mask = mask & full_mask(n);
        s
    }

    pub fn singleton(n: usize, x: u64) -> Self {
        Self::from_mask(n, 1 << x)
    }

    pub fn from_fn(n: usize, mut member: impl FnMut(u64) -> bool) -> Self {
        let mut mask = 0;
        for y in 0..1u64 << n {
            if member(y) {
                mask |= 1 << y;
            }
        }
        Self::from_mask(n, mask)
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn contains(&self, y: u64) -> bool {
        y < (1 << self.n) && self.mask >> y & 1 == 1
    }

    pub fn contains_bits(&self, y: &[bool]) -> bool {
        y.len() == self.n() && self.contains(BitString::from_bits(y.to_vec()).to_u64())
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn insert(&mut self, y: u64) {
        self.mask |= 1 << y;
    }

    pub fn remove(&mut self, y: u64) {
        self.mask &= !(1 << y);
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..1u64 << self.n).filter(|&y| self.contains(y))
    }

    /// `log2 |A|`; `-inf` for the empty set.
    pub fn log_size(&self) -> f64 {
        (self.len() as f64).log2()
    }

    /// `floor(log2 |A|)`, the dyadic size class. `None` for the empty set.
    pub fn size_class(&self) -> Option<u32> {
        (!self.is_empty()).then(|| usize::BITS - 1 - self.len().leading_zeros())
    }
}

impl fmt::Debug for StringSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .iter()
            .map(|y| BitString::from_u64(y, self.n()).to_string())
            .collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

fn full_mask(n: usize) -> u64 {
    if n >= 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

/// Elias gamma code of `v >= 1`.
pub fn gamma_encode(v: u64, out: &mut Vec<bool>) {
    assert!(v >= 1);
    let width = 64 - v.leading_zeros() as usize;
    out.extend(std::iter::repeat_n(false, width - 1));
    for i in (0..width).rev() {
        out.push(v >> i & 1 == 1);
    }
}

/// Decodes an Elias gamma code starting at `*pos`, advancing it.
pub fn gamma_decode(bits: &[bool], pos: &mut usize) -> Option<u64> {
    let mut zeros = 0;
    while !*bits.get(*pos)? {
        zeros += 1;
        *pos += 1;
        if zeros > 62 {
            return None;
        }
    }
    let mut v = 0u64;
    for _ in 0..=zeros {
        v = (v << 1) | *bits.get(*pos)? as u64;
        *pos += 1;
    }
    Some(v)
}

pub fn gamma_len(v: u64) -> usize {
    2 * (64 - v.leading_zeros() as usize) - 1
}

/// Minimal number of bits to write an ordinal below `count`: `ceil(log2 count)`.
pub fn ordinal_width(count: u64) -> usize {
    if count <= 1 {
        0
    } else {
        64 - (count - 1).leading_zeros() as usize
    }
}
