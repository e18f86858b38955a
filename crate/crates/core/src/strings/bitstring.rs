use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A finite binary word, bit-packed LSB-first into 64-bit words.
///
/// Public accessors are 1-based (`get(1)` is the first bit); the `*0` helpers
/// used by the algorithms are 0-based. Bits past `len` in the last word are
/// always zero, so derived equality and hashing are exact.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid character {found:?} at offset {offset}: binary words contain only '0' and '1'")]
pub struct ParseBitsError {
    pub offset: usize,
    pub found: char,
}

/// Inclusive 1-based interval `[lo:hi]` of positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub lo: usize,
    pub hi: usize,
}

impl Interval {
    /// Panics unless `1 <= lo <= hi`.
    pub fn new(lo: usize, hi: usize) -> Self {
        assert!(lo >= 1 && lo <= hi, "invalid interval [{lo}:{hi}]");
        Interval { lo, hi }
    }

    /// `None` for empty or zero-based ranges.
    pub fn checked(lo: usize, hi: usize) -> Option<Self> {
        (lo >= 1 && lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn is_within(&self, outer: &Interval) -> bool {
        outer.lo <= self.lo && self.hi <= outer.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.lo, self.hi)
    }
}

#[inline(always)]
fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitString { words: Vec::with_capacity(bits.div_ceil(64)), len: 0 }
    }

    /// Build from packed words; bits at or beyond `len` are discarded.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(len.div_ceil(64), 0);
        if !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= low_mask(len % 64);
            }
        }
        BitString { words, len }
    }

    /// `bit` repeated `n` times.
    pub fn run(bit: bool, n: usize) -> Self {
        let fill = if bit { u64::MAX } else { 0 };
        Self::from_words(vec![fill; n.div_ceil(64)], n)
    }

    /// From a slice of 0/1 bytes. Any non-zero byte is a one.
    pub fn from_bytes(bits: &[u8]) -> Self {
        bits.iter().map(|&b| b != 0).collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// 1-based bit access.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len, "bit index {i} out of range [1:{}]", self.len);
        self.get0(i - 1)
    }

    #[inline(always)]
    pub(crate) fn get0(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len >> 6] |= 1 << (self.len & 63);
        }
        self.len += 1;
    }

    /// Append `len` bits of `other` starting at 0-based `start`.
    pub fn extend_from_range(&mut self, other: &BitString, start: usize, len: usize) {
        assert!(start + len <= other.len);
        let mut done = 0;
        while done < len {
            let take = (len - done).min(64);
            self.push_bits(other.bits0(start + done, take), take);
            done += take;
        }
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.extend_from_range(other, 0, other.len);
    }

    /// Append the low `count` bits of `value` (bit 0 first).
    pub fn push_bits(&mut self, value: u64, count: usize) {
        debug_assert!(count <= 64);
        if count == 0 {
            return;
        }
        let value = value & low_mask(count);
        let offset = self.len & 63;
        if offset == 0 {
            self.words.push(value);
        } else {
            let last = self.words.len() - 1;
            self.words[last] |= value << offset;
            if offset + count > 64 {
                self.words.push(value >> (64 - offset));
            }
        }
        self.len += count;
    }

    /// Up to 64 bits starting at 0-based `start`, packed with the first bit
    /// in the least significant position.
    #[inline(always)]
    pub(crate) fn bits0(&self, start: usize, count: usize) -> u64 {
        debug_assert!(count <= 64 && start + count <= self.len);
        if count == 0 {
            return 0;
        }
        let w = start >> 6;
        let off = start & 63;
        let mut v = self.words[w] >> off;
        if off != 0 && off + count > 64 {
            v |= self.words[w + 1] << (64 - off);
        }
        v & low_mask(count)
    }

    /// The subword `x[i:j]` (1-based, inclusive).
    pub fn subword(&self, i: usize, j: usize) -> BitString {
        assert!(i >= 1 && i <= j && j <= self.len, "subword [{i}:{j}] of length-{} word", self.len);
        self.slice0(i - 1, j - i + 1)
    }

    pub fn window(&self, iv: Interval) -> BitString {
        self.subword(iv.lo, iv.hi)
    }

    pub(crate) fn slice0(&self, start: usize, len: usize) -> BitString {
        let mut out = BitString::with_capacity(len);
        out.extend_from_range(self, start, len);
        out
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get0(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Length of the longest common prefix of `a[ai..]` and `b[bi..]` (0-based).
    #[inline]
    pub(crate) fn common_prefix(a: &BitString, ai: usize, b: &BitString, bi: usize) -> usize {
        let max = (a.len - ai.min(a.len)).min(b.len - bi.min(b.len));
        let mut done = 0;
        while done < max {
            let take = (max - done).min(64);
            let diff = a.bits0(ai + done, take) ^ b.bits0(bi + done, take);
            if diff != 0 {
                return done + diff.trailing_zeros() as usize;
            }
            done += take;
        }
        max
    }

    /// Whether `a[ai..ai+len]` equals `b[bi..bi+len]` (0-based).
    pub(crate) fn range_eq(a: &BitString, ai: usize, b: &BitString, bi: usize, len: usize) -> bool {
        let mut done = 0;
        while done < len {
            let take = (len - done).min(64);
            if a.bits0(ai + done, take) != b.bits0(bi + done, take) {
                return false;
            }
            done += take;
        }
        true
    }

    /// Leftmost 0-based start `p` in `[from, to - |pattern|]` with
    /// `self[p..p+|pattern|] == pattern`.
    pub(crate) fn find0(&self, pattern: &BitString, from: usize, to: usize) -> Option<usize> {
        let to = to.min(self.len);
        if pattern.len > to.saturating_sub(from) {
            return None;
        }
        let head_len = pattern.len.min(64);
        let head = pattern.bits0(0, head_len);
        (from..=to - pattern.len).find(|&p| {
            self.bits0(p, head_len) == head
                && Self::range_eq(self, p + head_len, pattern, head_len, pattern.len - head_len)
        })
    }

    /// 1-based start of the leftmost occurrence of `pattern` as a contiguous subword.
    pub fn find(&self, pattern: &BitString) -> Option<usize> {
        self.find0(pattern, 0, self.len).map(|p| p + 1)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let iter = iter.into_iter();
        let mut out = BitString::with_capacity(iter.size_hint().0);
        for b in iter {
            out.push(b);
        }
        out
    }
}

impl FromStr for BitString {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = BitString::with_capacity(s.len());
        for (offset, c) in s.chars().enumerate() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                found => return Err(ParseBitsError { offset, found }),
            }
        }
        Ok(out)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 256 {
            write!(f, "BitString(\"{self}\")")
        } else {
            write!(f, "BitString(len={}, \"{}...\")", self.len, self.slice0(0, 64))
        }
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for literals in tests and examples. Panics on bad input.
pub fn bits(s: &str) -> BitString {
    s.parse().expect("binary literal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_display_and_one_based_access() {
        let s = bits("0110");
        assert_eq!(s.len(), 4);
        assert!(!s.get(1) && s.get(2) && s.get(3) && !s.get(4));
        assert_eq!(s.to_string(), "0110");
        assert_eq!(s.subword(2, 3), bits("11"));
        assert_eq!("01x".parse::<BitString>(), Err(ParseBitsError { offset: 2, found: 'x' }));
    }

    #[test]
    #[should_panic]
    fn zero_index_is_rejected() {
        bits("01").get(0);
    }

    #[test]
    fn find_reports_leftmost_one_based_start() {
        let hay = bits("0010110");
        assert_eq!(hay.find(&bits("101")), Some(3));
        assert_eq!(hay.find(&bits("111")), None);
        assert_eq!(hay.find(&BitString::new()), Some(1));
    }

    #[test]
    fn serde_uses_ascii_lines() {
        let s = bits("10011");
        assert_eq!(serde_json::to_string(&s).unwrap(), "\"10011\"");
        assert_eq!(serde_json::from_str::<BitString>("\"10011\"").unwrap(), s);
        assert!(serde_json::from_str::<BitString>("\"102\"").is_err());
    }

    proptest! {
        #[test]
        fn packed_ops_agree_with_byte_model(
            a in proptest::collection::vec(0u8..2, 0..300),
            start in 0usize..300,
            len in 0usize..200,
        ) {
            let s = BitString::from_bytes(&a);
            prop_assert_eq!(s.to_bytes(), a.clone());
            prop_assert_eq!(s.count_ones(), a.iter().filter(|&&b| b == 1).count());
            if start + len <= a.len() {
                let sub = s.slice0(start, len);
                prop_assert_eq!(sub.to_bytes(), a[start..start + len].to_vec());
                let mut glued = s.slice0(0, start);
                glued.extend_from(&sub);
                prop_assert_eq!(glued.to_bytes(), a[..start + len].to_vec());
            }
        }

        #[test]
        fn common_prefix_matches_naive(
            a in proptest::collection::vec(0u8..2, 0..200),
            b in proptest::collection::vec(0u8..2, 0..200),
            ai in 0usize..200,
            bi in 0usize..200,
        ) {
            let (sa, sb) = (BitString::from_bytes(&a), BitString::from_bytes(&b));
            let naive = a.iter().skip(ai).zip(b.iter().skip(bi)).take_while(|(x, y)| x == y).count();
            prop_assert_eq!(BitString::common_prefix(&sa, ai, &sb, bi), naive);
        }
    }
}
