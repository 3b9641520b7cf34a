//! Martingales in measure form, `ν(σ)/μ(σ)`, and finite-stage conditional
//! measures on the product space.

use std::fmt;

use num_traits::{Signed, Zero};

use crate::measure::{CylinderMeasure, ProductCylinderMeasure, StepFunction};
use crate::point::PointOracle;
use crate::rational::{Frac, Rat};
use crate::word::BinWord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MartingaleError {
    #[error("denominator vanishes at {0}")]
    ZeroDenominator(BinWord),
    #[error("threshold must be positive")]
    NonPositiveThreshold,
    #[error("window must be at least 2, got {0}")]
    WindowTooSmall(usize),
    #[error("trace of length {len} is shorter than the window {window}")]
    TraceTooShort { len: usize, window: usize },
}

/// The capital process `σ ↦ ν(σ)/μ(σ)`.
#[derive(Debug, Clone)]
pub struct Martingale {
    numerator: CylinderMeasure,
    denominator: CylinderMeasure,
}

impl Martingale {
    pub fn new(numerator: CylinderMeasure, denominator: CylinderMeasure) -> Self {
        Martingale { numerator, denominator }
    }

    pub fn numerator(&self) -> &CylinderMeasure {
        &self.numerator
    }

    pub fn denominator(&self) -> &CylinderMeasure {
        &self.denominator
    }

    pub fn ratio(&self, sigma: &BinWord) -> Result<Rat, MartingaleError> {
        let den = self.denominator.eval(sigma);
        if den.is_zero() {
            return Err(MartingaleError::ZeroDenominator(sigma.clone()));
        }
        Ok(self.numerator.eval(sigma) / den)
    }

    /// Words up to `depth` where `Σ_b μ(σb)·ratio(σb) ≠ μ(σ)·ratio(σ)`,
    /// skipping nodes where a ratio is undefined.
    pub fn fairness_violations(&self, depth: usize) -> Vec<BinWord> {
        let mut bad = Vec::new();
        for sigma in BinWord::all_up_to(depth) {
            let parts = [sigma.clone(), sigma.child(false), sigma.child(true)]
                .map(|s| self.ratio(&s).map(|r| self.denominator.eval(&s) * r));
            if let [Ok(whole), Ok(left), Ok(right)] = parts {
                if left + right != whole {
                    bad.push(sigma);
                }
            }
        }
        bad
    }
}

/// Ratios along `x↾0, x↾1, ...`, cut short at the first vanishing
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapitalTrace {
    pub values: Vec<Rat>,
    pub zero_at: Option<usize>,
}

impl CapitalTrace {
    pub fn error(&self) -> Option<usize> {
        self.zero_at
    }
}

pub fn capital_trace(m: &Martingale, x: &PointOracle, n: usize) -> CapitalTrace {
    let mut values = Vec::with_capacity(n + 1);
    for k in 0..=n {
        match m.ratio(&x.prefix(k)) {
            Ok(v) => values.push(v),
            Err(_) => return CapitalTrace { values, zero_at: Some(k) },
        }
    }
    CapitalTrace { values, zero_at: None }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divergence {
    Found(usize),
    NotFound,
}

/// Least `n <= max_depth` with `ratio(x↾n) >= threshold`.
pub fn divergence_witness(
    m: &Martingale,
    x: &PointOracle,
    threshold: &Rat,
    max_depth: usize,
) -> Result<Divergence, MartingaleError> {
    if !threshold.is_positive() {
        return Err(MartingaleError::NonPositiveThreshold);
    }
    for n in 0..=max_depth {
        if &m.ratio(&x.prefix(n))? >= threshold {
            return Ok(Divergence::Found(n));
        }
    }
    Ok(Divergence::NotFound)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowStats {
    /// Index of the last entry in the window.
    pub end: usize,
    pub max: Rat,
    pub min: Rat,
    pub osc: Rat,
}

impl fmt::Display for WindowStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "window_max {} window_min {} osc {}", Frac(&self.max), Frac(&self.min), Frac(&self.osc))
    }
}

/// Oscillation over every trailing window of the trace. Purely descriptive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoobReport {
    pub window: usize,
    pub windows: Vec<WindowStats>,
}

impl DoobReport {
    pub fn last(&self) -> &WindowStats {
        self.windows.last().expect("at least one window")
    }
}

pub fn doob_report(trace: &[Rat], window: usize) -> Result<DoobReport, MartingaleError> {
    if window < 2 {
        return Err(MartingaleError::WindowTooSmall(window));
    }
    if trace.len() < window {
        return Err(MartingaleError::TraceTooShort { len: trace.len(), window });
    }
    let windows = trace
        .windows(window)
        .enumerate()
        .map(|(i, w)| {
            let max = w.iter().max().expect("nonempty").clone();
            let min = w.iter().min().expect("nonempty").clone();
            let osc = &max - &min;
            WindowStats { end: i + window - 1, max, min, osc }
        })
        .collect();
    Ok(DoobReport { window, windows })
}

/// Stage-`n` conditional measure `σ ↦ μ(σ × y↾n) / μ₂(y↾n)`.
#[derive(Debug, Clone)]
pub struct ConditionalApprox {
    base: ProductCylinderMeasure,
    cond_prefix: BinWord,
    norm: Rat,
}

impl ConditionalApprox {
    pub fn new(base: ProductCylinderMeasure, cond_prefix: BinWord) -> Result<Self, MartingaleError> {
        let norm = base.eval(&BinWord::empty(), &cond_prefix);
        if norm.is_zero() {
            return Err(MartingaleError::ZeroDenominator(cond_prefix));
        }
        Ok(ConditionalApprox { base, cond_prefix, norm })
    }

    pub fn cond_prefix(&self) -> &BinWord {
        &self.cond_prefix
    }

    pub fn value(&self, sigma: &BinWord) -> Rat {
        self.base.eval(sigma, &self.cond_prefix) / &self.norm
    }
}

pub fn conditional_value(c: &ConditionalApprox, sigma: &BinWord) -> Rat {
    c.value(sigma)
}

/// `∫_{[ε]×[y↾n]} f dμ / μ₂(y↾n)` for `f` depending on the first coordinate.
pub fn conditional_integral_step(
    f: &StepFunction,
    mu: &ProductCylinderMeasure,
    cond_prefix: &BinWord,
) -> Result<Rat, MartingaleError> {
    let c = ConditionalApprox::new(mu.clone(), cond_prefix.clone())?;
    Ok(f.pieces().iter().map(|(piece, v)| v * c.value(piece)).fold(Rat::zero(), |a, b| a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{bernoulli, diagonal, dirac, fair_coin, mix, product};
    use crate::rational::{int, rat};
    use crate::word::w;

    fn dirac_mix() -> CylinderMeasure {
        mix(vec![rat(3, 4), rat(1, 4)], vec![fair_coin(), dirac(PointOracle::constant(false))]).unwrap()
    }

    #[test]
    fn ratios() {
        let m = Martingale::new(bernoulli(rat(2, 3)).unwrap(), fair_coin());
        assert_eq!(m.ratio(&w("111")).unwrap(), rat(64, 27));
        let d = Martingale::new(fair_coin(), dirac(PointOracle::constant(false)));
        assert_eq!(d.ratio(&w("1")), Err(MartingaleError::ZeroDenominator(w("1"))));
        assert!(m.fairness_violations(8).is_empty());
    }

    #[test]
    fn traces() {
        let m = Martingale::new(bernoulli(rat(2, 3)).unwrap(), fair_coin());
        let t = capital_trace(&m, &PointOracle::constant(true), 3);
        assert_eq!(t.values, vec![int(1), rat(4, 3), rat(16, 9), rat(64, 27)]);
        let d = Martingale::new(dirac_mix(), fair_coin());
        let t = capital_trace(&d, &PointOracle::constant(false), 3);
        assert_eq!(t.values, vec![int(1), rat(5, 4), rat(7, 4), rat(11, 4)]);
        let z = Martingale::new(fair_coin(), dirac(PointOracle::constant(false)));
        let t = capital_trace(&z, &PointOracle::dyadic(w("001")), 5);
        assert_eq!(t.values.len(), 3);
        assert_eq!(t.zero_at, Some(3));
    }

    #[test]
    fn witnesses() {
        let d = Martingale::new(dirac_mix(), fair_coin());
        let zero = PointOracle::constant(false);
        assert_eq!(divergence_witness(&d, &zero, &int(1024), 30), Ok(Divergence::Found(12)));
        let same = Martingale::new(fair_coin(), fair_coin());
        assert_eq!(divergence_witness(&same, &zero, &int(2), 30), Ok(Divergence::NotFound));
        let b = Martingale::new(bernoulli(rat(2, 3)).unwrap(), fair_coin());
        assert_eq!(divergence_witness(&b, &PointOracle::constant(true), &int(2), 10), Ok(Divergence::Found(3)));
        assert_eq!(divergence_witness(&b, &zero, &int(0), 10), Err(MartingaleError::NonPositiveThreshold));
    }

    #[test]
    fn doob() {
        let r = doob_report(&[int(1), rat(4, 3), rat(16, 9), rat(64, 27)], 2).unwrap();
        assert_eq!(r.last().osc, rat(16, 27));
        assert_eq!(r.last().to_string(), "window_max 64/27 window_min 16/9 osc 16/27");
        let flat = doob_report(&vec![int(1); 5], 3).unwrap();
        assert!(flat.windows.iter().all(|s| s.osc.is_zero()));
        assert_eq!(doob_report(&[int(1)], 2), Err(MartingaleError::TraceTooShort { len: 1, window: 2 }));
        assert_eq!(doob_report(&[int(1)], 1), Err(MartingaleError::WindowTooSmall(1)));
    }

    #[test]
    fn conditionals() {
        let p = product(bernoulli(rat(1, 3)).unwrap(), fair_coin());
        let c = ConditionalApprox::new(p, w("1011")).unwrap();
        assert_eq!(conditional_value(&c, &w("1")), rat(1, 3));
        assert_eq!(conditional_value(&c, &w("")), int(1));
        let diag = diagonal(fair_coin());
        let c = ConditionalApprox::new(diag.clone(), w("1")).unwrap();
        assert_eq!(c.value(&w("1")), int(1));
        let f = StepFunction::scaled_indicator(w("0"), int(2));
        assert_eq!(conditional_integral_step(&f, &diag, &w("0")), Ok(int(2)));
        let pl = product(fair_coin(), fair_coin());
        assert_eq!(conditional_integral_step(&f, &pl, &w("01")), Ok(int(1)));
        assert_eq!(conditional_integral_step(&StepFunction::constant(int(1)), &pl, &w("")), Ok(int(1)));
        let point = product(fair_coin(), dirac(PointOracle::constant(false)));
        assert!(ConditionalApprox::new(point, w("1")).is_err());
    }
}
