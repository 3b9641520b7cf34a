//! Nonnegative step functions `Σ aᵢ 1_{[σᵢ]}` over a partition of Cantor
//! space into cylinders, their integrals, and finite-stage checks of integral
//! test pairs.

use std::fmt;

use num_traits::{Signed, Zero};

use super::{ClopenSet, CylinderMeasure, MeasureError};
use crate::rational::{frac, Rat};
use crate::word::BinWord;

#[derive(Clone, PartialEq, Eq)]
pub struct StepFunction {
    pieces: Vec<(BinWord, Rat)>,
}

impl StepFunction {
    /// The pieces must be an antichain covering the whole space with
    /// nonnegative values; pad with a `0`-valued piece where needed.
    pub fn new(mut pieces: Vec<(BinWord, Rat)>) -> Result<Self, MeasureError> {
        pieces.sort_by(|a, b| a.0.cmp(&b.0));
        for (i, (a, v)) in pieces.iter().enumerate() {
            if v.is_negative() {
                return Err(MeasureError::NegativeValue(frac(v)));
            }
            if let Some((b, _)) = pieces.get(i + 1) {
                if a.compatible(b) {
                    return Err(MeasureError::NotAntichain(a.clone(), b.clone()));
                }
            }
        }
        let cover = ClopenSet::new(pieces.iter().map(|(w, _)| w.clone()));
        if cover != ClopenSet::whole() {
            return Err(MeasureError::NotPartition(frac(&cover.fair_mass())));
        }
        Ok(StepFunction { pieces })
    }

    pub fn constant(v: Rat) -> Self {
        StepFunction { pieces: vec![(BinWord::empty(), v)] }
    }

    /// `v · 1_{[w]}`, padded with zero on the complement.
    pub fn scaled_indicator(word: BinWord, v: Rat) -> Self {
        let mut pieces: Vec<(BinWord, Rat)> =
            ClopenSet::cylinder(word.clone()).complement().generators().iter().map(|g| (g.clone(), Rat::zero())).collect();
        pieces.push((word, v));
        StepFunction::new(pieces).expect("cylinder and its complement partition the space")
    }

    pub fn pieces(&self) -> &[(BinWord, Rat)] {
        &self.pieces
    }

    /// Value on the piece containing `[σ]`, if `σ` is long enough to decide it.
    pub fn value_on(&self, sigma: &BinWord) -> Option<&Rat> {
        self.pieces.iter().find(|(p, _)| p.is_prefix_of(sigma)).map(|(_, v)| v)
    }

    /// A word where `self > other`, if any; `None` means `self ≤ other`
    /// pointwise.
    pub fn exceeds_somewhere(&self, other: &StepFunction) -> Option<BinWord> {
        for (a, va) in &self.pieces {
            for (b, vb) in &other.pieces {
                if a.compatible(b) && va > vb {
                    return Some(if a.len() >= b.len() { a.clone() } else { b.clone() });
                }
            }
        }
        None
    }
}

impl fmt::Display for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pieces.iter().map(|(w, v)| format!("{w}:{}", frac(v))).collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for StepFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StepFunction({self})")
    }
}

/// `∫_{[σ]} f dμ = Σ_π value(π)·μ([π] ∩ [σ])`
pub fn integrate_step(f: &StepFunction, mu: &CylinderMeasure, sigma: &BinWord) -> Rat {
    f.pieces
        .iter()
        .filter(|(p, v)| !v.is_zero() && p.compatible(sigma))
        .map(|(p, v)| v * mu.eval(if p.len() >= sigma.len() { p } else { sigma }))
        .fold(Rat::zero(), |a, b| a + b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestPairViolation {
    pub stage: usize,
    pub word: BinWord,
    pub integral: Rat,
    pub bound: Rat,
}

#[derive(Debug, Clone)]
pub struct TestPairReport {
    pub checked: usize,
    pub violations: Vec<TestPairViolation>,
}

impl TestPairReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Finite-stage check of `∫_{[σ]} t_k dμ ≤ ν(σ)` for every stage `k` and
/// every `|σ| ≤ depth`.
pub fn check_test_pair(
    stages: &[StepFunction],
    nu: &CylinderMeasure,
    mu: &CylinderMeasure,
    depth: usize,
) -> Result<TestPairReport, MeasureError> {
    for (k, pair) in stages.windows(2).enumerate() {
        if let Some(word) = pair[0].exceeds_somewhere(&pair[1]) {
            return Err(MeasureError::NonMonotoneStages { stage: k + 1, word });
        }
    }
    let mut violations = Vec::new();
    let mut checked = 0;
    for (stage, t) in stages.iter().enumerate() {
        for word in BinWord::all_up_to(depth) {
            checked += 1;
            let integral = integrate_step(t, mu, &word);
            let bound = nu.eval(&word);
            if integral > bound {
                violations.push(TestPairViolation { stage, word, integral, bound });
            }
        }
    }
    Ok(TestPairReport { checked, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::fair_coin;
    use crate::rational::{int, rat};
    use crate::word::w;

    #[test]
    fn partition_required() {
        assert!(StepFunction::new(vec![(w("0"), int(1))]).is_err());
        assert!(StepFunction::new(vec![(w("0"), int(1)), (w("01"), int(1)), (w("1"), int(0))]).is_err());
        assert!(StepFunction::new(vec![(w("0"), int(-1)), (w("1"), int(0))]).is_err());
        assert!(StepFunction::new(vec![(w("1"), int(2)), (w("00"), int(0)), (w("01"), int(3))]).is_ok());
    }

    #[test]
    fn integrals() {
        let l = fair_coin();
        assert_eq!(integrate_step(&StepFunction::constant(int(1)), &l, &w("")), int(1));
        let f = StepFunction::scaled_indicator(w("0"), int(2));
        assert_eq!(integrate_step(&f, &l, &w("")), int(1));
        assert_eq!(integrate_step(&f, &l, &w("1")), int(0));
        assert_eq!(integrate_step(&f, &l, &w("01")), rat(1, 2));
    }

    #[test]
    fn integral_is_additive_over_children() {
        let f = StepFunction::new(vec![(w("1"), int(2)), (w("00"), rat(1, 3)), (w("01"), int(3))]).unwrap();
        let l = fair_coin();
        for s in BinWord::all_up_to(6) {
            assert_eq!(
                integrate_step(&f, &l, &s),
                integrate_step(&f, &l, &s.child(false)) + integrate_step(&f, &l, &s.child(true))
            );
        }
    }

    #[test]
    fn test_pairs() {
        let l = fair_coin();
        let one = StepFunction::constant(int(1));
        assert!(check_test_pair(std::slice::from_ref(&one), &l, &l, 8).unwrap().passed());

        let t = StepFunction::scaled_indicator(w("00"), int(4));
        let r = check_test_pair(&[t], &l, &l, 2).unwrap();
        assert!(!r.passed());
        let v = r.violations.iter().find(|v| v.word == w("00")).unwrap();
        assert_eq!(v.integral, int(1));
        assert_eq!(v.bound, rat(1, 4));

        let t = StepFunction::scaled_indicator(w("0"), int(2));
        let tc = t.clone();
        let lc = l.clone();
        let nu = CylinderMeasure::from_fn("INTEGRAL", move |s| integrate_step(&tc, &lc, s));
        for s in BinWord::all_up_to(6) {
            assert_eq!(nu.eval(&s), integrate_step(&t, &l, &s));
        }
        assert!(check_test_pair(&[t], &nu, &l, 8).unwrap().passed());
    }

    #[test]
    fn non_monotone_stages_rejected() {
        let l = fair_coin();
        let a = StepFunction::constant(int(1));
        let b = StepFunction::scaled_indicator(w("0"), int(2));
        assert!(matches!(
            check_test_pair(&[a, b], &l, &l, 2),
            Err(MeasureError::NonMonotoneStages { stage: 1, .. })
        ));
        let lo = StepFunction::scaled_indicator(w("1"), int(1));
        let hi = StepFunction::constant(int(1));
        assert!(check_test_pair(&[lo, hi], &l, &l, 4).unwrap().passed());
    }
}
