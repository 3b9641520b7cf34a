//! Finite binary words, the cylinder indices of Cantor space.

use std::fmt;
use std::str::FromStr;

/// A finite word over `{0,1}`. The empty word names the whole space.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinWord(Vec<bool>);

impl BinWord {
    pub fn empty() -> Self {
        BinWord(Vec::new())
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        BinWord(bits.into_iter().collect())
    }

    pub fn zeros(n: usize) -> Self {
        BinWord(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        BinWord(vec![true; n])
    }

    /// The word of length `len` whose big-endian value is `index`.
    pub fn from_index(index: u64, len: usize) -> Self {
        debug_assert!(len <= 64);
        BinWord((0..len).map(|i| (index >> (len - 1 - i)) & 1 == 1).collect())
    }

    /// Big-endian value of the word. Only meaningful for `len() <= 64`.
    pub fn to_index(&self) -> u64 {
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
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

    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn last(&self) -> Option<bool> {
        self.0.last().copied()
    }

    pub fn push(&mut self, b: bool) {
        self.0.push(b);
    }

    pub fn extend_from(&mut self, other: &BinWord) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn child(&self, b: bool) -> BinWord {
        let mut w = self.clone();
        w.0.push(b);
        w
    }

    pub fn concat(&self, other: &BinWord) -> BinWord {
        let mut w = self.clone();
        w.0.extend_from_slice(&other.0);
        w
    }

    pub fn parent(&self) -> Option<BinWord> {
        if self.0.is_empty() {
            None
        } else {
            Some(BinWord(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    /// First `n` bits (the whole word if shorter).
    pub fn prefix(&self, n: usize) -> BinWord {
        BinWord(self.0[..n.min(self.0.len())].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> BinWord {
        BinWord(self.0[start.min(self.0.len())..].to_vec())
    }

    /// `self ⊑ other`
    pub fn is_prefix_of(&self, other: &BinWord) -> bool {
        self.0.len() <= other.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Two words are compatible when one extends the other, i.e. their
    /// cylinders intersect.
    pub fn compatible(&self, other: &BinWord) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Bits at positions 0, 2, 4, ...
    pub fn even_bits(&self) -> BinWord {
        BinWord(self.0.iter().step_by(2).copied().collect())
    }

    /// Bits at positions 1, 3, 5, ...
    pub fn odd_bits(&self) -> BinWord {
        BinWord(self.0.iter().skip(1).step_by(2).copied().collect())
    }

    /// `z(2n) = even(n)`, `z(2n+1) = odd(n)`, stopping at the first missing bit.
    pub fn interleave(even: &BinWord, odd: &BinWord) -> BinWord {
        let mut out = Vec::with_capacity(even.len() + odd.len());
        for i in 0.. {
            match even.0.get(i) {
                Some(&b) => out.push(b),
                None => break,
            }
            match odd.0.get(i) {
                Some(&b) => out.push(b),
                None => break,
            }
        }
        BinWord(out)
    }

    /// All words of length exactly `n` in lexicographic order.
    pub fn all_of_length(n: usize) -> impl Iterator<Item = BinWord> {
        assert!(n < 64, "word enumeration limited to length < 64");
        (0..(1u64 << n)).map(move |i| BinWord::from_index(i, n))
    }

    /// All words of length `<= depth`, shortest first.
    pub fn all_up_to(depth: usize) -> impl Iterator<Item = BinWord> {
        (0..=depth).flat_map(BinWord::all_of_length)
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for BinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a binary word: `{0}`")]
pub struct ParseWordError(pub String);

impl FromStr for BinWord {
    type Err = ParseWordError;

    /// Accepts `0`/`1` strings; `ε`, `e` and `-` denote the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "e" || s == "-" {
            return Ok(BinWord::empty());
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(ParseWordError(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BinWord)
    }
}

/// Shorthand for tests and fixtures: panics on malformed input.
pub fn w(s: &str) -> BinWord {
    s.parse().expect("valid binary word literal")
}
