//! Clopen subsets of Cantor space as canonical antichains of cylinders, and
//! effectively closed sets as antitone sequences of clopen outer
//! approximations.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use super::CylinderMeasure;
use crate::rational::{dyadic, Rat};
use crate::word::BinWord;

/// A finite union of cylinders in canonical form: generators are pairwise
/// prefix-incomparable, sorted, and no sibling pair `σ0, σ1` survives (it is
/// merged into `σ`). Equal sets therefore have equal generator lists.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ClopenSet {
    generators: Vec<BinWord>,
}

fn normalize(prefix: &BinWord, words: &[&BinWord], out: &mut Vec<BinWord>) {
    if words.is_empty() {
        return;
    }
    if words.iter().any(|w| w.len() <= prefix.len()) {
        out.push(prefix.clone());
        return;
    }
    let depth = prefix.len();
    let (left, right): (Vec<&BinWord>, Vec<&BinWord>) = words.iter().partition(|w| !w.bit(depth));
    let start = out.len();
    normalize(&prefix.child(false), &left, out);
    let mid = out.len();
    normalize(&prefix.child(true), &right, out);
    let merged = mid - start == 1
        && out.len() - mid == 1
        && out[start].len() == depth + 1
        && out[mid].len() == depth + 1;
    if merged {
        out.truncate(start);
        out.push(prefix.clone());
    }
}

fn complement_under(prefix: &BinWord, words: &[&BinWord], out: &mut Vec<BinWord>) {
    if words.is_empty() {
        out.push(prefix.clone());
        return;
    }
    if words.iter().any(|w| w.len() <= prefix.len()) {
        return;
    }
    let depth = prefix.len();
    let (left, right): (Vec<&BinWord>, Vec<&BinWord>) = words.iter().partition(|w| !w.bit(depth));
    complement_under(&prefix.child(false), &left, out);
    complement_under(&prefix.child(true), &right, out);
}

impl ClopenSet {
    /// Canonical form of `⋃ [wᵢ]` for any finite list of words.
    pub fn new(words: impl IntoIterator<Item = BinWord>) -> Self {
        let words: Vec<BinWord> = words.into_iter().collect();
        let refs: Vec<&BinWord> = words.iter().collect();
        let mut generators = Vec::new();
        normalize(&BinWord::empty(), &refs, &mut generators);
        ClopenSet { generators }
    }

    /// Like [`ClopenSet::new`] but rejects lists that are not antichains.
    pub fn from_antichain(words: Vec<BinWord>) -> Result<Self, super::MeasureError> {
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                if a.compatible(b) {
                    return Err(super::MeasureError::NotAntichain(a.clone(), b.clone()));
                }
            }
        }
        Ok(Self::new(words))
    }

    pub fn empty() -> Self {
        ClopenSet { generators: Vec::new() }
    }

    pub fn whole() -> Self {
        ClopenSet { generators: vec![BinWord::empty()] }
    }

    pub fn cylinder(w: BinWord) -> Self {
        ClopenSet { generators: vec![w] }
    }

    /// `{x : x(i) = b}`
    pub fn coordinate(i: usize, b: bool) -> Self {
        Self::new(BinWord::all_of_length(i).map(|p| p.child(b)))
    }

    pub fn generators(&self) -> &[BinWord] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Longest generator length; membership of any point is decided by its
    /// prefix of this length.
    pub fn horizon(&self) -> usize {
        self.generators.iter().map(BinWord::len).max().unwrap_or(0)
    }

    /// `[σ] ⊆ C`
    pub fn covers(&self, sigma: &BinWord) -> bool {
        self.generators.iter().any(|g| g.is_prefix_of(sigma))
    }

    /// `[σ] ∩ C = ∅`
    pub fn avoids(&self, sigma: &BinWord) -> bool {
        !self.generators.iter().any(|g| g.compatible(sigma))
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        ClopenSet::new(self.generators.iter().chain(&other.generators).cloned())
    }

    pub fn intersection(&self, other: &ClopenSet) -> ClopenSet {
        let mut words = Vec::new();
        for a in &self.generators {
            for b in &other.generators {
                if a.is_prefix_of(b) {
                    words.push(b.clone());
                } else if b.is_prefix_of(a) {
                    words.push(a.clone());
                }
            }
        }
        ClopenSet::new(words)
    }

    pub fn complement(&self) -> ClopenSet {
        let refs: Vec<&BinWord> = self.generators.iter().collect();
        let mut out = Vec::new();
        complement_under(&BinWord::empty(), &refs, &mut out);
        ClopenSet::new(out)
    }

    pub fn difference(&self, other: &ClopenSet) -> ClopenSet {
        self.intersection(&other.complement())
    }

    pub fn is_subset(&self, other: &ClopenSet) -> bool {
        &self.intersection(other) == self
    }

    /// `μ(C)`
    pub fn mass(&self, mu: &CylinderMeasure) -> Rat {
        self.generators.iter().map(|g| mu.eval(g)).sum()
    }

    /// `λ(C) = Σ 2^{-|g|}`
    pub fn fair_mass(&self) -> Rat {
        self.generators.iter().map(|g| dyadic(g.len())).sum()
    }

    /// `μ(C ∩ [σ])`
    pub fn mass_within(&self, mu: &CylinderMeasure, sigma: &BinWord) -> Rat {
        if self.covers(sigma) {
            return mu.eval(sigma);
        }
        self.generators
            .iter()
            .filter(|g| sigma.is_prefix_of(g))
            .map(|g| mu.eval(g))
            .fold(Rat::zero(), |a, b| a + b)
    }

    /// `[g1 g2 ...]`, the bracketed form used inside measure expressions.
    pub fn bracketed(&self) -> String {
        format!("[{}]", self)
    }
}

impl fmt::Display for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClopenSet{{{self}}}")
    }
}

type LevelFn = dyn Fn(usize) -> ClopenSet + Send + Sync;

/// An effectively closed set given by outer clopen approximations
/// `level(0) ⊇ level(1) ⊇ ...` whose intersection is the set.
#[derive(Clone)]
pub struct ClosedSetApprox {
    label: Arc<str>,
    levels: Arc<LevelFn>,
    clopen: bool,
}

impl ClosedSetApprox {
    pub fn new(label: &str, levels: impl Fn(usize) -> ClopenSet + Send + Sync + 'static) -> Self {
        ClosedSetApprox { label: label.into(), levels: Arc::new(levels), clopen: false }
    }

    /// A clopen set viewed as a closed set; every level is the set itself.
    pub fn from_clopen(set: ClopenSet) -> Self {
        ClosedSetApprox {
            label: set.bracketed().into(),
            levels: Arc::new(move |_| set.clone()),
            clopen: true,
        }
    }

    pub fn level(&self, k: usize) -> ClopenSet {
        (self.levels)(k)
    }

    /// Whether levels are known to be exact (the set is clopen).
    pub fn is_clopen(&self) -> bool {
        self.clopen
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// First `k < depth` with `level(k+1) ⊄ level(k)`, if any.
    pub fn antitone_violation(&self, depth: usize) -> Option<usize> {
        (0..depth).find(|&k| !self.level(k + 1).is_subset(&self.level(k)))
    }
}

impl fmt::Debug for ClosedSetApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ClosedSetApprox({})", self.label)
    }
}
