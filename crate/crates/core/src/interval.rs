//! Closed rational enclosures for quantities that are only computable in
//! the limit.

use std::fmt;

use crate::rational::{Frac, Rat};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatInterval {
    lo: Rat,
    hi: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("inverted interval [{lo}, {hi}]")]
pub struct InvertedInterval {
    pub lo: String,
    pub hi: String,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Result<Self, InvertedInterval> {
        if lo > hi {
            return Err(InvertedInterval { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(RatInterval { lo, hi })
    }

    pub fn point(x: Rat) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rat {
        &self.lo
    }

    pub fn hi(&self) -> &Rat {
        &self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    /// `x` lies in the open interior `(lo, hi)`.
    pub fn contains_strictly(&self, x: &Rat) -> bool {
        &self.lo < x && x < &self.hi
    }

    /// `self ⊆ other`
    pub fn is_within(&self, other: &RatInterval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// Image under `x ↦ offset + scale·x` with `scale > 0`.
    pub fn affine(&self, scale: &Rat, offset: &Rat) -> RatInterval {
        RatInterval { lo: offset + scale * &self.lo, hi: offset + scale * &self.hi }
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", Frac(&self.lo), Frac(&self.hi))
    }
}

impl fmt::Debug for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn rejects_inverted() {
        assert!(RatInterval::new(int(1), int(0)).is_err());
    }

    #[test]
    fn affine_and_nesting() {
        let i = RatInterval::new(rat(4, 5), int(1)).unwrap();
        let j = i.affine(&rat(5, 3), &(int(1) - rat(4, 3)));
        assert_eq!(j, RatInterval::new(int(1), rat(4, 3)).unwrap());
        assert!(RatInterval::point(rat(9, 10)).is_within(&i));
        assert_eq!(i.to_string(), "[4/5,1/1]");
    }
}
