//! Infinite binary sequences given by a prefix oracle.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rational::Rat;
use crate::word::{BinWord, ParseWordError};

type BitFn = dyn Fn(usize) -> bool + Send + Sync;

/// A point of Cantor space. Eventually periodic points (`u v^∞`) are stored
/// exactly; anything else is an opaque bit oracle.
#[derive(Clone)]
pub struct PointOracle {
    repr: Repr,
}

#[derive(Clone)]
enum Repr {
    Periodic { head: BinWord, cycle: BinWord },
    Oracle { label: Arc<str>, bit: Arc<BitFn> },
}

impl PointOracle {
    /// `head · cycle^∞`. The cycle must be nonempty.
    pub fn eventually_periodic(head: BinWord, cycle: BinWord) -> Self {
        assert!(!cycle.is_empty(), "cycle of an eventually periodic point is empty");
        PointOracle { repr: Repr::Periodic { head, cycle } }
    }

    pub fn periodic(cycle: BinWord) -> Self {
        Self::eventually_periodic(BinWord::empty(), cycle)
    }

    pub fn constant(b: bool) -> Self {
        Self::periodic(BinWord::from_bits([b]))
    }

    /// `head · 0^∞`, the binary expansion of a dyadic rational.
    pub fn dyadic(head: BinWord) -> Self {
        Self::eventually_periodic(head, BinWord::zeros(1))
    }

    /// `precision` bits from a ChaCha8 stream seeded with `seed`, then zeros.
    pub fn seeded_dyadic(precision: usize, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Self::dyadic(BinWord::from_bits((0..precision).map(|_| rng.gen::<bool>())))
    }

    pub fn from_fn(label: &str, bit: impl Fn(usize) -> bool + Send + Sync + 'static) -> Self {
        PointOracle { repr: Repr::Oracle { label: label.into(), bit: Arc::new(bit) } }
    }

    pub fn bit(&self, i: usize) -> bool {
        match &self.repr {
            Repr::Periodic { head, cycle } => {
                if i < head.len() {
                    head.bit(i)
                } else {
                    cycle.bit((i - head.len()) % cycle.len())
                }
            }
            Repr::Oracle { bit, .. } => bit(i),
        }
    }

    /// `x↾n`
    pub fn prefix(&self, n: usize) -> BinWord {
        BinWord::from_bits((0..n).map(|i| self.bit(i)))
    }

    fn periodic_parts(&self) -> Option<(&BinWord, &BinWord)> {
        match &self.repr {
            Repr::Periodic { head, cycle } => Some((head, cycle)),
            Repr::Oracle { .. } => None,
        }
    }

    /// The subsequence at positions `parity, parity + 2, ...`.
    fn subsequence(&self, parity: usize) -> PointOracle {
        match self.periodic_parts() {
            Some((head, cycle)) => {
                let h = head.len() + head.len() % 2;
                let p = if cycle.len() % 2 == 0 { cycle.len() } else { 2 * cycle.len() };
                let new_head = BinWord::from_bits((parity..h).step_by(2).map(|i| self.bit(i)));
                let new_cycle =
                    BinWord::from_bits((h + parity..h + p).step_by(2).map(|i| self.bit(i)));
                PointOracle::eventually_periodic(new_head, new_cycle)
            }
            None => {
                let me = self.clone();
                let tag = if parity == 0 { "even" } else { "odd" };
                PointOracle::from_fn(&format!("{tag}({me})"), move |i| me.bit(2 * i + parity))
            }
        }
    }

    /// `n ↦ x(2n)`
    pub fn even(&self) -> PointOracle {
        self.subsequence(0)
    }

    /// `n ↦ x(2n+1)`
    pub fn odd(&self) -> PointOracle {
        self.subsequence(1)
    }

    /// `Σ x(i) 2^{-(i+1)}`, exact for eventually periodic points.
    pub fn binary_value(&self) -> Option<Rat> {
        let (head, cycle) = self.periodic_parts()?;
        let h = head.to_index_big();
        let c = cycle.to_index_big();
        let period_den = (BigInt::one() << cycle.len()) - BigInt::one();
        let inner = Rat::from_integer(h) + Rat::new(c, period_den);
        Some(inner / Rat::from_integer(BigInt::one() << head.len()))
    }

    pub fn is_exact(&self) -> bool {
        self.periodic_parts().is_some()
    }

    /// Binary expansion of `r ∈ [0, 1]`, preferring the terminating one.
    pub fn from_binary_value(r: &Rat) -> Option<PointOracle> {
        if r < &Rat::zero() || r > &Rat::one() {
            return None;
        }
        if r.is_one() {
            return Some(PointOracle::constant(true));
        }
        let den = r.denom().clone();
        let mut rem = r.numer().clone();
        let mut seen: HashMap<BigInt, usize> = HashMap::new();
        let mut bits = Vec::new();
        while !seen.contains_key(&rem) {
            seen.insert(rem.clone(), bits.len());
            rem <<= 1;
            let bit = rem >= den;
            if bit {
                rem -= &den;
            }
            bits.push(bit);
        }
        let start = seen[&rem];
        let cycle = BinWord::from_bits(bits[start..].iter().copied());
        Some(PointOracle::eventually_periodic(BinWord::from_bits(bits[..start].iter().copied()), cycle))
    }

    /// `z(2n) = even(n)`, `z(2n+1) = odd(n)`.
    pub fn join(even: &PointOracle, odd: &PointOracle) -> PointOracle {
        match (even.periodic_parts(), odd.periodic_parts()) {
            (Some((h1, c1)), Some((h2, c2))) => {
                let h = h1.len().max(h2.len());
                let c = c1.len().lcm(&c2.len());
                let window = |p: &PointOracle| BinWord::from_bits((h..h + c).map(|i| p.bit(i)));
                let head = BinWord::interleave(&even.prefix(h), &odd.prefix(h));
                PointOracle::eventually_periodic(head, BinWord::interleave(&window(even), &window(odd)))
            }
            _ => {
                let (a, b) = (even.clone(), odd.clone());
                PointOracle::from_fn(&format!("join({a},{b})"), move |i| {
                    if i % 2 == 0 { a.bit(i / 2) } else { b.bit(i / 2) }
                })
            }
        }
    }
}

impl BinWord {
    pub(crate) fn to_index_big(&self) -> BigInt {
        self.bits().iter().fold(BigInt::from(0), |acc, &b| (acc << 1) + BigInt::from(b as u8))
    }
}

impl fmt::Display for PointOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Periodic { head, cycle } => {
                if !head.is_empty() {
                    write!(f, "{head}")?;
                }
                write!(f, "({cycle})")
            }
            Repr::Oracle { label, .. } => f.write_str(label),
        }
    }
}

impl fmt::Debug for PointOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for PointOracle {
    type Err = ParseWordError;

    /// `u(v)` is `u v^∞`; a bare word `w` is `w^∞`. A trailing `…` or `...`
    /// is ignored, so `000…` reads as `0^∞`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_end_matches('…').trim_end_matches("...");
        if let Some(open) = s.find('(') {
            let close = s.rfind(')').ok_or_else(|| ParseWordError(s.to_string()))?;
            if close != s.len() - 1 || close < open {
                return Err(ParseWordError(s.to_string()));
            }
            let head: BinWord = s[..open].parse()?;
            let cycle: BinWord = s[open + 1..close].parse()?;
            if cycle.is_empty() {
                return Err(ParseWordError(s.to_string()));
            }
            return Ok(PointOracle::eventually_periodic(head, cycle));
        }
        let cycle: BinWord = s.parse()?;
        if cycle.is_empty() {
            return Err(ParseWordError(s.to_string()));
        }
        Ok(PointOracle::periodic(cycle))
    }
}
