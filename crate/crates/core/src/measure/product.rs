//! Measures on `2^ℕ × 2^ℕ`, evaluated on rectangles `[σ] × [τ]`, and their
//! transfer to `2^ℕ` through the join `z(2n) = x(n), z(2n+1) = y(n)`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{CylinderKernel, CylinderMeasure};
use crate::rational::Rat;
use crate::word::BinWord;

pub trait ProductKernel: Send + Sync {
    fn eval(&self, sigma: &BinWord, tau: &BinWord) -> Rat;
}

#[derive(Clone)]
pub struct ProductCylinderMeasure {
    kernel: Arc<dyn ProductKernel>,
    label: Arc<str>,
}

impl ProductCylinderMeasure {
    pub fn new(label: impl Into<Arc<str>>, kernel: impl ProductKernel + 'static) -> Self {
        ProductCylinderMeasure { kernel: Arc::new(kernel), label: label.into() }
    }

    pub fn from_fn(
        label: impl Into<Arc<str>>,
        f: impl Fn(&BinWord, &BinWord) -> Rat + Send + Sync + 'static,
    ) -> Self {
        struct F<G>(G);
        impl<G: Fn(&BinWord, &BinWord) -> Rat + Send + Sync> ProductKernel for F<G> {
            fn eval(&self, s: &BinWord, t: &BinWord) -> Rat {
                (self.0)(s, t)
            }
        }
        Self::new(label, F(f))
    }

    /// `μ([σ] × [τ])`
    pub fn eval(&self, sigma: &BinWord, tau: &BinWord) -> Rat {
        self.kernel.eval(sigma, tau)
    }

    pub fn total(&self) -> Rat {
        self.eval(&BinWord::empty(), &BinWord::empty())
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for ProductCylinderMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProductCylinderMeasure({})", self.label)
    }
}

struct Independent(CylinderMeasure, CylinderMeasure);

impl ProductKernel for Independent {
    fn eval(&self, s: &BinWord, t: &BinWord) -> Rat {
        self.0.eval(s) * self.1.eval(t)
    }
}

/// `μ₁ ⊗ μ₂`
pub fn product(first: CylinderMeasure, second: CylinderMeasure) -> ProductCylinderMeasure {
    let label = format!("PRODUCT {} {}", first.label(), second.label());
    ProductCylinderMeasure::new(label, Independent(first, second))
}

struct Diagonal(CylinderMeasure);

impl ProductKernel for Diagonal {
    fn eval(&self, s: &BinWord, t: &BinWord) -> Rat {
        if s.is_prefix_of(t) {
            self.0.eval(t)
        } else if t.is_prefix_of(s) {
            self.0.eval(s)
        } else {
            Rat::zero()
        }
    }
}

/// Image of `m` under `x ↦ (x, x)`: all mass sits on the diagonal.
pub fn diagonal(m: CylinderMeasure) -> ProductCylinderMeasure {
    let label = format!("DIAGONAL {}", m.label());
    ProductCylinderMeasure::new(label, Diagonal(m))
}

struct Marginal {
    base: ProductCylinderMeasure,
    first: bool,
}

impl CylinderKernel for Marginal {
    fn eval(&self, w: &BinWord) -> Rat {
        let e = BinWord::empty();
        if self.first {
            self.base.eval(w, &e)
        } else {
            self.base.eval(&e, w)
        }
    }
}

/// `μ₁(σ) = μ(σ × ε)`
pub fn marginal1(mu: ProductCylinderMeasure) -> CylinderMeasure {
    let label = format!("MARG1 {}", mu.label());
    CylinderMeasure::new(label, Marginal { base: mu, first: true })
}

/// `μ₂(τ) = μ(ε × τ)`
pub fn marginal2(mu: ProductCylinderMeasure) -> CylinderMeasure {
    let label = format!("MARG2 {}", mu.label());
    CylinderMeasure::new(label, Marginal { base: mu, first: false })
}

struct Joined(ProductCylinderMeasure);

impl CylinderKernel for Joined {
    fn eval(&self, w: &BinWord) -> Rat {
        // The interleavings extending w are exactly [even(w)] × [odd(w)].
        self.0.eval(&w.even_bits(), &w.odd_bits())
    }
}

/// Transfers a product measure to `2^ℕ` along the join.
pub fn join_transfer(mu: ProductCylinderMeasure) -> CylinderMeasure {
    let label = format!("JOIN {}", mu.label());
    CylinderMeasure::new(label, Joined(mu))
}

struct Split(CylinderMeasure);

impl ProductKernel for Split {
    fn eval(&self, s: &BinWord, t: &BinWord) -> Rat {
        // Pad the shorter coordinate so that the pair interleaves to a single
        // word, summing over the undetermined bits.
        if s.len() > t.len() {
            let pad = s.len() - 1 - t.len();
            BinWord::all_of_length(pad)
                .map(|ext| self.0.eval(&BinWord::interleave(s, &t.concat(&ext))))
                .sum()
        } else {
            let pad = t.len() - s.len();
            BinWord::all_of_length(pad)
                .map(|ext| self.0.eval(&BinWord::interleave(&s.concat(&ext), t)))
                .sum()
        }
    }
}

/// Inverse of [`join_transfer`]: views a measure on `2^ℕ` as a measure on the
/// product through the even/odd split.
pub fn split_transfer(nu: CylinderMeasure) -> ProductCylinderMeasure {
    let label = format!("SPLIT {}", nu.label());
    ProductCylinderMeasure::new(label, Split(nu))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProductViolation {
    Row { sigma: BinWord, tau: BinWord },
    Column { sigma: BinWord, tau: BinWord },
    Negative { sigma: BinWord, tau: BinWord },
}

/// Row and column additivity at every pair with `|σ| + |τ| < depth`.
pub fn check_product_additivity(mu: &ProductCylinderMeasure, depth: usize) -> Vec<ProductViolation> {
    let mut out = Vec::new();
    if depth == 0 {
        return out;
    }
    for total in 0..depth {
        for ls in 0..=total {
            for sigma in BinWord::all_of_length(ls) {
                for tau in BinWord::all_of_length(total - ls) {
                    let v = mu.eval(&sigma, &tau);
                    if v < Rat::zero() {
                        out.push(ProductViolation::Negative { sigma: sigma.clone(), tau: tau.clone() });
                    }
                    let row = mu.eval(&sigma.child(false), &tau) + mu.eval(&sigma.child(true), &tau);
                    if row != v {
                        out.push(ProductViolation::Row { sigma: sigma.clone(), tau: tau.clone() });
                    }
                    let col = mu.eval(&sigma, &tau.child(false)) + mu.eval(&sigma, &tau.child(true));
                    if col != v {
                        out.push(ProductViolation::Column { sigma: sigma.clone(), tau: tau.clone() });
                    }
                }
            }
        }
    }
    out
}

impl ProductCylinderMeasure {
    pub fn is_probability(&self) -> bool {
        self.total().is_one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{bernoulli, check_additivity, fair_coin};
    use crate::rational::{rat, Rat};
    use crate::word::w;

    fn b13() -> CylinderMeasure {
        bernoulli(rat(1, 3)).unwrap()
    }

    #[test]
    fn product_and_marginals() {
        assert_eq!(product(fair_coin(), fair_coin()).eval(&w("0"), &w("1")), rat(1, 4));
        assert_eq!(marginal2(product(b13(), fair_coin())).eval(&w("1")), rat(1, 2));
        assert_eq!(marginal1(product(b13(), fair_coin())).eval(&w("1")), rat(1, 3));
    }

    #[test]
    fn join_values() {
        let j = join_transfer(product(fair_coin(), fair_coin()));
        for x in BinWord::all_up_to(10) {
            assert_eq!(j.eval(&x), fair_coin().eval(&x));
        }
        let j = join_transfer(product(b13(), fair_coin()));
        assert_eq!(j.eval(&w("1")), rat(1, 3));
        assert_eq!(j.eval(&w("10")), rat(1, 6));
        assert!(check_additivity(&j, 10).passed());
    }

    #[test]
    fn split_inverts_join() {
        let mu = product(b13(), bernoulli(rat(2, 3)).unwrap());
        let back = split_transfer(join_transfer(mu.clone()));
        for s in BinWord::all_up_to(4) {
            for t in BinWord::all_up_to(4) {
                assert_eq!(back.eval(&s, &t), mu.eval(&s, &t), "at {s} × {t}");
            }
        }
    }

    #[test]
    fn rectangle_additivity() {
        assert!(check_product_additivity(&product(b13(), fair_coin()), 8).is_empty());
        assert!(check_product_additivity(&diagonal(b13()), 8).is_empty());
        let broken = ProductCylinderMeasure::from_fn("BROKEN", |_, _| Rat::one());
        assert!(!check_product_additivity(&broken, 1).is_empty());
    }
}
