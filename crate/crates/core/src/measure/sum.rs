//! Disjoint sums `ν(0^n 1 σ) = μ_n(σ)` of a family of sub-probability
//! measures whose total masses add up to one.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{CylinderKernel, CylinderMeasure, MeasureError};
use crate::interval::RatInterval;
use crate::rational::{dyadic, frac, Rat};
use crate::word::BinWord;

/// Splits `w` as `0^n 1 σ`; `Err(n)` when `w = 0^n`.
fn split_spine(w: &BinWord) -> Result<(usize, BinWord), usize> {
    match w.bits().iter().position(|&b| b) {
        Some(n) => Ok((n, w.suffix_from(n + 1))),
        None => Err(w.len()),
    }
}

struct FiniteSum {
    parts: Vec<CylinderMeasure>,
    /// `tails[n] = Σ_{m ≥ n} μ_m(ε)`
    tails: Vec<Rat>,
}

impl CylinderKernel for FiniteSum {
    fn eval(&self, w: &BinWord) -> Rat {
        match split_spine(w) {
            Ok((n, rest)) => self.parts.get(n).map(|m| m.eval(&rest)).unwrap_or_else(Rat::zero),
            Err(n) => self.tails.get(n).cloned().unwrap_or_else(Rat::zero),
        }
    }
}

/// Disjoint sum of a finite family. Spine values `ν(0^n)` are exact tail sums;
/// in particular `ν({0^∞}) = 0`.
pub fn disjoint_sum(parts: Vec<CylinderMeasure>) -> Result<CylinderMeasure, MeasureError> {
    let mut tails = vec![Rat::zero(); parts.len() + 1];
    for n in (0..parts.len()).rev() {
        tails[n] = &tails[n + 1] + parts[n].total();
    }
    if !tails[0].is_one() {
        return Err(MeasureError::ComponentMassSum(frac(&tails[0])));
    }
    let mut label = format!("SUM {}", parts.len());
    for p in &parts {
        label.push(' ');
        label.push_str(p.label());
    }
    Ok(CylinderMeasure::new(label, FiniteSum { parts, tails }))
}

struct GeometricSum {
    base: CylinderMeasure,
}

impl CylinderKernel for GeometricSum {
    fn eval(&self, w: &BinWord) -> Rat {
        match split_spine(w) {
            Ok((n, rest)) => dyadic(n + 1) * self.base.eval(&rest),
            // Σ_{m ≥ n} 2^{-(m+1)} = 2^{-n}
            Err(n) => dyadic(n) * self.base.total(),
        }
    }
}

/// The infinite family `μ_n = 2^{-(n+1)}·base`, whose spine has the closed form
/// `ν(0^n) = 2^{-n}`.
pub fn geometric_sum(base: CylinderMeasure) -> Result<CylinderMeasure, MeasureError> {
    if !base.is_probability() {
        return Err(MeasureError::ComponentMassSum(frac(&base.total())));
    }
    let label = format!("SUMGEO {}", base.label());
    Ok(CylinderMeasure::new(label, GeometricSum { base }))
}

/// A spine value of an infinite disjoint sum without a closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpineValue {
    Exact(Rat),
    Enclosed(RatInterval),
}

type Family = dyn Fn(usize) -> CylinderMeasure + Send + Sync;
type TailFn = dyn Fn(usize) -> Rat + Send + Sync;

/// Infinite disjoint sum known only through a computable tail bound
/// `tail_bound(N) ≥ Σ_{n > N} μ_n(ε)`. Off the all-zeros spine values are
/// exact; on it they are enclosures. It deliberately is not a
/// [`CylinderMeasure`]: exact checks must use finite families.
#[derive(Clone)]
pub struct EnclosedDisjointSum {
    family: Arc<Family>,
    tail_bound: Arc<TailFn>,
}

impl EnclosedDisjointSum {
    /// Validates the tail bound on `0..=probe`: nonnegative, nonincreasing,
    /// consistent with total mass one, and strictly decreasing overall unless
    /// it already vanished.
    pub fn new(
        family: impl Fn(usize) -> CylinderMeasure + Send + Sync + 'static,
        tail_bound: impl Fn(usize) -> Rat + Send + Sync + 'static,
        probe: usize,
    ) -> Result<Self, MeasureError> {
        let mut partial = Rat::zero();
        let mut prev: Option<Rat> = None;
        for n in 0..=probe {
            partial += family(n).total();
            let t = tail_bound(n);
            if t.is_negative() {
                return Err(MeasureError::TailBound(format!("negative at {n}")));
            }
            if let Some(p) = &prev {
                if &t > p {
                    return Err(MeasureError::TailBound(format!("increases at {n}")));
                }
            }
            if partial > Rat::one() || &partial + &t < Rat::one() {
                return Err(MeasureError::TailBound(format!(
                    "partial mass {} with tail {} at {n} cannot total 1",
                    frac(&partial),
                    frac(&t)
                )));
            }
            prev = Some(t);
        }
        let first = tail_bound(0);
        let last = tail_bound(probe);
        if !last.is_zero() && last >= first {
            return Err(MeasureError::TailBound("does not decrease".into()));
        }
        Ok(EnclosedDisjointSum { family: Arc::new(family), tail_bound: Arc::new(tail_bound) })
    }

    /// Value at `w` using components up to index `truncation` on the spine.
    pub fn eval(&self, w: &BinWord, truncation: usize) -> SpineValue {
        match split_spine(w) {
            Ok((n, rest)) => SpineValue::Exact((self.family)(n).eval(&rest)),
            Err(n) => {
                let top = truncation.max(n);
                let lo: Rat = (n..=top).map(|m| (self.family)(m).total()).sum();
                let hi = &lo + (self.tail_bound)(top);
                SpineValue::Enclosed(RatInterval::new(lo, hi).expect("tail bound is nonnegative"))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{check_additivity, fair_coin, scale};
    use crate::rational::{int, rat};
    use crate::word::w;

    fn halves() -> CylinderMeasure {
        disjoint_sum(vec![
            scale(rat(1, 2), fair_coin()).unwrap(),
            scale(rat(1, 2), fair_coin()).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn geometric_family_values() {
        let s = geometric_sum(fair_coin()).unwrap();
        assert_eq!(s.eval(&w("01")), rat(1, 4));
        assert_eq!(s.eval(&w("10")), rat(1, 4));
        assert_eq!(s.eval(&w("000")), rat(1, 8));
        assert!(check_additivity(&s, 12).passed());
    }

    #[test]
    fn finite_family_values() {
        let single = disjoint_sum(vec![fair_coin()]).unwrap();
        assert_eq!(single.eval(&w("0")), int(0));
        assert_eq!(single.eval(&w("1")), int(1));
        let s = halves();
        assert_eq!(s.eval(&w("0")), rat(1, 2));
        assert_eq!(s.eval(&w("00")), int(0));
        assert_eq!(s.eval(&w("010")), rat(1, 4));
        assert!(check_additivity(&s, 12).passed());
    }

    #[test]
    fn spine_is_nonincreasing() {
        let s = halves();
        let g = geometric_sum(fair_coin()).unwrap();
        for m in [s, g] {
            for n in 0..10 {
                assert!(m.eval(&BinWord::zeros(n + 1)) <= m.eval(&BinWord::zeros(n)));
            }
        }
    }

    #[test]
    fn mass_mismatch_rejected() {
        assert!(matches!(
            disjoint_sum(vec![scale(rat(1, 2), fair_coin()).unwrap()]),
            Err(MeasureError::ComponentMassSum(_))
        ));
    }

    #[test]
    fn enclosed_sum() {
        let fam = |n: usize| scale(dyadic(n + 1), fair_coin()).unwrap();
        let s = EnclosedDisjointSum::new(fam, |n| dyadic(n + 1), 40).unwrap();
        assert_eq!(s.eval(&w("01"), 5), SpineValue::Exact(rat(1, 4)));
        match s.eval(&w("00"), 10) {
            SpineValue::Enclosed(i) => {
                assert!(i.contains(&rat(1, 4)));
                assert_eq!(i.width(), dyadic(11));
            }
            other => panic!("expected enclosure, got {other:?}"),
        }
        assert!(EnclosedDisjointSum::new(fam, |_| rat(1, 2), 10).is_err());
        assert!(EnclosedDisjointSum::new(fam, |n| dyadic(n + 3), 10).is_err());
    }
}
