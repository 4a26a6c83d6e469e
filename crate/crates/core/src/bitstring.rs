use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Fixed-length assignment of binary variables.
///
/// Position `i` holds the value of variable `i`. When a bit string is packed
/// into an integer (see [`BitString::to_index`]), bit `i` of the integer is
/// variable `i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Self(vec![true; len])
    }

    /// Unpacks the low `len` bits of `index`.
    pub fn from_index(index: usize, len: usize) -> Self {
        debug_assert!(len <= usize::BITS as usize);
        Self((0..len).map(|j| (index >> j) & 1 == 1).collect())
    }

    /// Packs the bits into an integer; only meaningful for `len() <= usize::BITS`.
    pub fn to_index(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | ((b as usize) << j))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    /// Value of variable `i` as 0 or 1.
    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        self.0[i] as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        self.0[i] = value;
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn flipped(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.flip(i);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Number of positions where the two strings differ.
    ///
    /// Panics if the lengths differ.
    pub fn hamming(&self, other: &BitString) -> usize {
        assert_eq!(
            self.len(),
            other.len(),
            "hamming distance of unequal lengths"
        );
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }

    /// Indices where `self` and `other` differ, ascending.
    pub fn diff_indices(&self, other: &BitString) -> Vec<usize> {
        assert_eq!(self.len(), other.len(), "diff of unequal lengths");
        (0..self.len())
            .filter(|&i| self.0[i] != other.0[i])
            .collect()
    }

    /// Picks out the given positions, in the order given.
    pub fn select(&self, indices: &[usize]) -> BitString {
        BitString(indices.iter().map(|&i| self.0[i]).collect())
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

impl FromIterator<bool> for BitString {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
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

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid character {0:?} in bit string")]
pub struct ParseBitStringError(pub char);

impl FromStr for BitString {
    type Err = ParseBitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseBitStringError(other)),
            })
            .collect()
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> Self {
        b.to_string()
    }
}

impl TryFrom<String> for BitString {
    type Error = ParseBitStringError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_packing() {
        let b = BitString::from_index(0b1011, 5);
        assert_eq!(b.to_string(), "11010");
        assert_eq!(b.to_index(), 0b1011);
    }

    #[test]
    fn parse_and_display() {
        let b: BitString = "0110".parse().unwrap();
        assert_eq!(b.count_ones(), 2);
        assert_eq!(b.to_string(), "0110");
        assert_eq!("01x".parse::<BitString>(), Err(ParseBitStringError('x')));
    }

    #[test]
    fn hamming_and_diff() {
        let a: BitString = "0011".parse().unwrap();
        let b: BitString = "0101".parse().unwrap();
        assert_eq!(a.hamming(&b), 2);
        assert_eq!(a.diff_indices(&b), vec![1, 2]);
        assert_eq!(a.select(&[3, 0]).to_string(), "10");
    }
}
