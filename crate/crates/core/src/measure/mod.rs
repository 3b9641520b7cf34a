//! Computable measures on Cantor space, represented by their exact cylinder
//! valuations `σ ↦ μ([σ])`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::point::PointOracle;
use crate::rational::{dyadic, frac, Rat};
use crate::word::BinWord;

mod clopen;
mod density;
mod product;
mod step;
mod sum;

pub use clopen::{ClopenSet, ClosedSetApprox};
pub use density::{lebesgue_density_trace, DensityEntry};
pub use product::{
    check_product_additivity, diagonal, join_transfer, marginal1, marginal2, product,
    split_transfer, ProductCylinderMeasure, ProductKernel,
};
pub use step::{check_test_pair, integrate_step, StepFunction, TestPairReport};
pub use sum::{disjoint_sum, geometric_sum, EnclosedDisjointSum, SpineValue};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("bernoulli parameter {0} is outside (0,1)")]
    BernoulliParameter(String),
    #[error("mixture has {weights} weights but {measures} measures")]
    LengthMismatch { weights: usize, measures: usize },
    #[error("mixture weights sum to {0}, not 1")]
    WeightSum(String),
    #[error("mixture weight {0} is not positive")]
    NonPositiveWeight(String),
    #[error("mixture needs at least one component")]
    EmptyMixture,
    #[error("disjoint-sum component masses sum to {0}, not 1")]
    ComponentMassSum(String),
    #[error("tail bound is not a valid bound decreasing to 0: {0}")]
    TailBound(String),
    #[error("generators {0} and {1} are not prefix-incomparable")]
    NotAntichain(BinWord, BinWord),
    #[error("step function pieces cover mass {0} of the space, not all of it")]
    NotPartition(String),
    #[error("step function value {0} is negative")]
    NegativeValue(String),
    #[error("test stages are not pointwise nondecreasing (stage {stage}, at {word})")]
    NonMonotoneStages { stage: usize, word: BinWord },
    #[error("measure vanishes on prefix {0}")]
    ZeroMeasurePrefix(BinWord),
    #[error("working depth {working} is below trace length {n}")]
    WorkingDepth { working: usize, n: usize },
}

/// The evaluator behind a [`CylinderMeasure`]. Implementations must be pure.
pub trait CylinderKernel: Send + Sync {
    fn eval(&self, w: &BinWord) -> Rat;

    /// Nodes with equal keys have equal conditional measures: for all `ρ`,
    /// `μ(σρ)/μ(σ)` depends only on the key. Used to merge nodes in
    /// pushforward enumeration; `None` disables merging.
    fn residual_key(&self, _w: &BinWord) -> Option<u64> {
        None
    }
}

/// A (not necessarily probability) measure given by its exact values on
/// cylinders. Cheap to clone.
#[derive(Clone)]
pub struct CylinderMeasure {
    kernel: Arc<dyn CylinderKernel>,
    label: Arc<str>,
    probability: bool,
}

impl CylinderMeasure {
    pub fn new(label: impl Into<Arc<str>>, kernel: impl CylinderKernel + 'static) -> Self {
        let kernel: Arc<dyn CylinderKernel> = Arc::new(kernel);
        let probability = kernel.eval(&BinWord::empty()).is_one();
        CylinderMeasure { kernel, label: label.into(), probability }
    }

    pub fn from_fn(
        label: impl Into<Arc<str>>,
        f: impl Fn(&BinWord) -> Rat + Send + Sync + 'static,
    ) -> Self {
        Self::new(label, FnKernel(f))
    }

    /// `μ([σ])`
    pub fn eval(&self, w: &BinWord) -> Rat {
        self.kernel.eval(w)
    }

    pub fn total(&self) -> Rat {
        self.eval(&BinWord::empty())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    pub fn residual_key(&self, w: &BinWord) -> Option<u64> {
        self.kernel.residual_key(w)
    }
}

impl fmt::Debug for CylinderMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CylinderMeasure({})", self.label)
    }
}

struct FnKernel<F>(F);

impl<F: Fn(&BinWord) -> Rat + Send + Sync> CylinderKernel for FnKernel<F> {
    fn eval(&self, w: &BinWord) -> Rat {
        (self.0)(w)
    }
}

struct FairCoin;

impl CylinderKernel for FairCoin {
    fn eval(&self, w: &BinWord) -> Rat {
        dyadic(w.len())
    }

    fn residual_key(&self, _w: &BinWord) -> Option<u64> {
        Some(0)
    }
}

struct Bernoulli {
    p: Rat,
    q: Rat,
}

impl CylinderKernel for Bernoulli {
    fn eval(&self, w: &BinWord) -> Rat {
        let ones = w.weight();
        crate::rational::pow(&self.p, ones) * crate::rational::pow(&self.q, w.len() - ones)
    }

    fn residual_key(&self, _w: &BinWord) -> Option<u64> {
        Some(0)
    }
}

struct Dirac(PointOracle);

impl CylinderKernel for Dirac {
    fn eval(&self, w: &BinWord) -> Rat {
        if (0..w.len()).all(|i| w.bit(i) == self.0.bit(i)) {
            Rat::one()
        } else {
            Rat::zero()
        }
    }
}

struct Mixture {
    weights: Vec<Rat>,
    parts: Vec<CylinderMeasure>,
}

impl CylinderKernel for Mixture {
    fn eval(&self, w: &BinWord) -> Rat {
        self.weights.iter().zip(&self.parts).map(|(c, m)| c * m.eval(w)).sum()
    }
}

struct Scaled {
    factor: Rat,
    inner: CylinderMeasure,
}

impl CylinderKernel for Scaled {
    fn eval(&self, w: &BinWord) -> Rat {
        &self.factor * self.inner.eval(w)
    }

    fn residual_key(&self, w: &BinWord) -> Option<u64> {
        self.inner.residual_key(w)
    }
}

struct Restricted {
    inner: CylinderMeasure,
    set: ClopenSet,
}

impl CylinderKernel for Restricted {
    fn eval(&self, w: &BinWord) -> Rat {
        self.set.mass_within(&self.inner, w)
    }
}

struct Tabulated {
    table: std::collections::BTreeMap<BinWord, Rat>,
    depth: usize,
}

impl CylinderKernel for Tabulated {
    fn eval(&self, w: &BinWord) -> Rat {
        if w.len() <= self.depth {
            return self.table.get(w).cloned().unwrap_or_else(Rat::zero);
        }
        let top = w.prefix(self.depth);
        self.table.get(&top).map(|v| v * dyadic(w.len() - self.depth)).unwrap_or_else(Rat::zero)
    }
}

/// A finite table of cylinder values. Untabulated words up to the deepest
/// entry are null; below it mass splits evenly. Nothing checks additivity,
/// which makes tables the way to feed hand-written (possibly broken)
/// valuations to the checkers.
pub fn tabulated(table: std::collections::BTreeMap<BinWord, Rat>) -> CylinderMeasure {
    let depth = table.keys().map(BinWord::len).max().unwrap_or(0);
    let entries: Vec<String> = table.iter().map(|(w, v)| format!("{w}={}", frac(v))).collect();
    let label = format!("TABLE [ {} ]", entries.join(" "));
    CylinderMeasure::new(label, Tabulated { table, depth })
}

/// `λ(σ) = 2^{-|σ|}`
pub fn fair_coin() -> CylinderMeasure {
    CylinderMeasure::new("FAIR", FairCoin)
}

/// Product measure in which each bit is `1` with probability `p`.
pub fn bernoulli(p: Rat) -> Result<CylinderMeasure, MeasureError> {
    if !p.is_positive() || p >= Rat::one() {
        return Err(MeasureError::BernoulliParameter(frac(&p)));
    }
    let label = format!("BERNOULLI {}", frac(&p));
    let q = Rat::one() - &p;
    Ok(CylinderMeasure::new(label, Bernoulli { p, q }))
}

/// Point mass at `x`.
pub fn dirac(x: PointOracle) -> CylinderMeasure {
    CylinderMeasure::new(format!("DIRAC {x}"), Dirac(x))
}

/// `c·μ`, used for sub-probability components of disjoint sums.
pub fn scale(factor: Rat, inner: CylinderMeasure) -> Result<CylinderMeasure, MeasureError> {
    if factor.is_negative() {
        return Err(MeasureError::NonPositiveWeight(frac(&factor)));
    }
    let label = format!("SCALE {} {}", frac(&factor), inner.label());
    Ok(CylinderMeasure::new(label, Scaled { factor, inner }))
}

/// `Σ wᵢ μᵢ` with positive weights summing to exactly 1.
pub fn mix(weights: Vec<Rat>, measures: Vec<CylinderMeasure>) -> Result<CylinderMeasure, MeasureError> {
    if weights.len() != measures.len() {
        return Err(MeasureError::LengthMismatch { weights: weights.len(), measures: measures.len() });
    }
    if weights.is_empty() {
        return Err(MeasureError::EmptyMixture);
    }
    if let Some(bad) = weights.iter().find(|c| !c.is_positive()) {
        return Err(MeasureError::NonPositiveWeight(frac(bad)));
    }
    let sum: Rat = weights.iter().sum();
    if !sum.is_one() {
        return Err(MeasureError::WeightSum(frac(&sum)));
    }
    let mut label = String::from("MIX");
    for (c, m) in weights.iter().zip(&measures) {
        label.push_str(&format!(" {} {}", frac(c), m.label()));
    }
    Ok(CylinderMeasure::new(label, Mixture { weights, parts: measures }))
}

/// `ν(σ) = μ(C ∩ [σ])`
pub fn restrict_to_clopen(mu: CylinderMeasure, set: ClopenSet) -> CylinderMeasure {
    let label = format!("RESTRICT {} {}", mu.label(), set.bracketed());
    CylinderMeasure::new(label, Restricted { inner: mu, set })
}

/// A failed node of an additivity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdditivityViolation {
    /// `μ(σ0) + μ(σ1) ≠ μ(σ)`
    NotAdditive { node: BinWord, value: Rat, children: Rat },
    Negative { node: BinWord, value: Rat },
}

#[derive(Debug, Clone)]
pub struct AdditivityReport {
    pub depth: usize,
    pub nodes_checked: usize,
    pub violations: Vec<AdditivityViolation>,
}

impl AdditivityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `μ(σ0) + μ(σ1) = μ(σ)` for every `|σ| < depth`, and nonnegativity
/// of every value touched.
pub fn check_additivity(mu: &CylinderMeasure, depth: usize) -> AdditivityReport {
    let mut violations = Vec::new();
    let mut nodes_checked = 0;
    let root = mu.total();
    if root.is_negative() {
        violations.push(AdditivityViolation::Negative { node: BinWord::empty(), value: root });
    }
    for node in BinWord::all_up_to(depth.saturating_sub(1)) {
        if depth == 0 {
            break;
        }
        nodes_checked += 1;
        let value = mu.eval(&node);
        let left = mu.eval(&node.child(false));
        let right = mu.eval(&node.child(true));
        for (child, v) in [(node.child(false), &left), (node.child(true), &right)] {
            if v.is_negative() {
                violations.push(AdditivityViolation::Negative { node: child, value: v.clone() });
            }
        }
        let children = left + right;
        if children != value {
            violations.push(AdditivityViolation::NotAdditive { node, value, children });
        }
    }
    AdditivityReport { depth, nodes_checked, violations }
}

/// `Σ_{|σ| = d} μ(σ)`
pub fn level_total(mu: &CylinderMeasure, d: usize) -> Rat {
    BinWord::all_of_length(d).map(|w| mu.eval(&w)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominationViolation {
    pub word: BinWord,
    pub smaller: Rat,
    pub bigger: Rat,
}

/// Cylinder-level domination `μ(σ) ≤ ν(σ)` for all `|σ| ≤ depth`. Returns
/// every violating word in shortlex order; empty means pass.
pub fn dominates(mu: &CylinderMeasure, nu: &CylinderMeasure, depth: usize) -> Vec<DominationViolation> {
    BinWord::all_up_to(depth)
        .filter_map(|word| {
            let smaller = mu.eval(&word);
            let bigger = nu.eval(&word);
            (smaller > bigger).then_some(DominationViolation { word, smaller, bigger })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::word::w;

    fn dirac0() -> CylinderMeasure {
        dirac(PointOracle::constant(false))
    }

    #[test]
    fn builtin_values() {
        assert_eq!(fair_coin().eval(&w("010")), rat(1, 8));
        assert_eq!(fair_coin().total(), int(1));
        assert_eq!(bernoulli(rat(2, 3)).unwrap().eval(&w("11")), rat(4, 9));
        assert_eq!(bernoulli(rat(1, 3)).unwrap().eval(&w("10")), rat(2, 9));
        assert_eq!(dirac0().eval(&w("000")), int(1));
        assert_eq!(dirac0().eval(&w("01")), int(0));
        assert!(fair_coin().is_probability());
    }

    #[test]
    fn bernoulli_rejects_out_of_range() {
        assert!(bernoulli(int(0)).is_err());
        assert!(bernoulli(int(1)).is_err());
        assert!(bernoulli(rat(3, 2)).is_err());
    }

    #[test]
    fn mixture_values_and_errors() {
        let m = mix(vec![rat(3, 4), rat(1, 4)], vec![fair_coin(), dirac0()]).unwrap();
        assert_eq!(m.eval(&w("0")), rat(5, 8));
        assert_eq!(m.label(), "MIX 3/4 FAIR 1/4 DIRAC (0)");
        let same = mix(vec![rat(1, 2), rat(1, 4), rat(1, 4)], vec![fair_coin(), fair_coin(), fair_coin()])
            .unwrap();
        for x in BinWord::all_up_to(6) {
            assert_eq!(same.eval(&x), fair_coin().eval(&x));
        }
        assert_eq!(
            mix(vec![rat(1, 2), rat(1, 4)], vec![fair_coin(), fair_coin()]).unwrap_err(),
            MeasureError::WeightSum("3/4".into())
        );
        assert!(matches!(mix(vec![int(1)], vec![]), Err(MeasureError::LengthMismatch { .. })));
        assert!(matches!(
            mix(vec![int(2), int(-1)], vec![fair_coin(), fair_coin()]),
            Err(MeasureError::NonPositiveWeight(_))
        ));
    }

    #[test]
    fn additivity_detects_constant_evaluator() {
        let broken = CylinderMeasure::from_fn("ONES", |_| int(1));
        let report = check_additivity(&broken, 1);
        assert!(!report.passed());
        assert!(matches!(
            &report.violations[0],
            AdditivityViolation::NotAdditive { node, .. } if node.is_empty()
        ));
        assert!(check_additivity(&fair_coin(), 12).passed());
        let m = mix(vec![rat(3, 4), rat(1, 4)], vec![fair_coin(), dirac0()]).unwrap();
        assert!(check_additivity(&m, 10).passed());
    }

    #[test]
    fn negative_values_are_reported() {
        let neg = CylinderMeasure::from_fn("NEG", |x| if x.is_empty() { int(0) } else if x.bit(0) { int(1) } else { int(-1) });
        let report = check_additivity(&neg, 1);
        assert!(report.violations.iter().any(|v| matches!(v, AdditivityViolation::Negative { .. })));
    }

    #[test]
    fn restriction_values() {
        let c0 = ClopenSet::new([w("0")]);
        let r = restrict_to_clopen(fair_coin(), c0.clone());
        assert_eq!(r.eval(&w("1")), int(0));
        assert_eq!(r.eval(&w("00")), rat(1, 4));
        let c = ClopenSet::new([w("0"), w("11")]);
        assert_eq!(restrict_to_clopen(fair_coin(), c).total(), rat(3, 4));
        assert!(dominates(&r, &fair_coin(), 10).is_empty());
    }

    #[test]
    fn domination_cases() {
        assert!(dominates(&fair_coin(), &fair_coin(), 10).is_empty());
        let b = bernoulli(rat(1, 3)).unwrap();
        let v = dominates(&fair_coin(), &b, 1);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].word, w("1"));
        assert_eq!(v[0].smaller, rat(1, 2));
        assert_eq!(v[0].bigger, rat(1, 3));
    }

    #[test]
    fn level_totals() {
        let m = mix(vec![rat(3, 4), rat(1, 4)], vec![bernoulli(rat(1, 3)).unwrap(), dirac0()]).unwrap();
        for d in 0..=10 {
            assert_eq!(level_total(&m, d), int(1));
        }
    }
}
