//! Pushforward masses `μ_T(τ) = μ(T⁻¹[τ])` by exhaustive enumeration of input
//! cylinders, and the matching preimage search.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::MonotoneMachine;
use crate::interval::RatInterval;
use crate::measure::CylinderMeasure;
use crate::rational::Rat;
use crate::word::BinWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    In,
    Out,
    Undecided,
}

fn classify(out: &BinWord, tau: &BinWord) -> Verdict {
    if tau.is_prefix_of(out) {
        Verdict::In
    } else if out.is_prefix_of(tau) {
        Verdict::Undecided
    } else {
        Verdict::Out
    }
}

/// Split of the total mass at a given input depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MassPartition {
    /// Mass of inputs whose output already extends `τ`.
    pub inside: Rat,
    /// Mass of inputs whose output is incompatible with `τ`.
    pub outside: Rat,
    pub undecided: Rat,
    /// Largest number of live enumeration nodes at any depth.
    pub peak_frontier: usize,
}

impl MassPartition {
    /// `[inside, total − outside]`
    pub fn bounds(&self) -> RatInterval {
        let hi = &self.inside + &self.undecided;
        RatInterval::new(self.inside.clone(), hi).expect("masses are nonnegative")
    }
}

struct Node {
    rep: BinWord,
    /// Ratio of the node's mass to `μ(rep)`; exceeds one after merging.
    scale: Rat,
    out_len: usize,
}

/// Enumerates input cylinders to `depth`, pruning every cylinder whose output
/// already decides membership in `[τ]` (monotonicity makes the decision
/// final). Undecided nodes whose machine and measure residual keys agree are
/// merged, which keeps finite-state machines over product measures linear in
/// the depth.
pub fn pushforward_partition(
    m: &MonotoneMachine,
    mu: &CylinderMeasure,
    tau: &BinWord,
    depth: usize,
) -> MassPartition {
    let mut inside = Rat::zero();
    let mut outside = Rat::zero();
    let mut frontier = Vec::new();
    let root = BinWord::empty();
    let root_mass = mu.eval(&root);
    let root_out = m.step(&root);
    match classify(&root_out, tau) {
        Verdict::In => inside += &root_mass,
        Verdict::Out => outside += &root_mass,
        Verdict::Undecided if !root_mass.is_zero() => {
            frontier.push(Node { rep: root, scale: Rat::one(), out_len: root_out.len() })
        }
        Verdict::Undecided => {}
    }
    let mut peak_frontier = frontier.len();
    for _ in 0..depth {
        if frontier.is_empty() {
            break;
        }
        let mut merged: HashMap<(u64, u64, usize), usize> = HashMap::new();
        let mut next: Vec<(Node, Rat)> = Vec::new();
        for node in frontier {
            for b in [false, true] {
                let child = node.rep.child(b);
                let base = mu.eval(&child);
                if base.is_zero() {
                    continue;
                }
                let mass = &node.scale * &base;
                let out = m.step(&child);
                match classify(&out, tau) {
                    Verdict::In => inside += mass,
                    Verdict::Out => outside += mass,
                    Verdict::Undecided => {
                        let key = match (m.residual_key(&child), mu.residual_key(&child)) {
                            (Some(a), Some(s)) => Some((a, s, out.len())),
                            _ => None,
                        };
                        if let Some(slot) = key.and_then(|k| merged.get(&k).copied()) {
                            next[slot].1 += mass;
                        } else {
                            if let Some(k) = key {
                                merged.insert(k, next.len());
                            }
                            next.push((Node { rep: child, scale: Rat::one(), out_len: out.len() }, mass));
                        }
                    }
                }
            }
        }
        frontier = next
            .into_iter()
            .map(|(mut node, mass)| {
                node.scale = mass / mu.eval(&node.rep);
                node
            })
            .collect();
        peak_frontier = peak_frontier.max(frontier.len());
    }
    let undecided = frontier.iter().map(|n| &n.scale * mu.eval(&n.rep)).fold(Rat::zero(), |a, b| a + b);
    debug_assert!(frontier.iter().all(|n| n.out_len < tau.len() || tau.is_empty()));
    MassPartition { inside, outside, undecided, peak_frontier }
}

/// Enclosure of `μ_T(τ)` at input depth `depth`. Intervals are nested in the
/// depth and contain the true value whenever `μ(dom T) = 1`.
pub fn pushforward_bounds(m: &MonotoneMachine, mu: &CylinderMeasure, tau: &BinWord, depth: usize) -> RatInterval {
    pushforward_partition(m, mu, tau, depth).bounds()
}

/// Exhaustive classification of input cylinders to a fixed depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreimageReport {
    /// Minimal inputs whose output extends `τ`.
    pub decided_in: Vec<BinWord>,
    /// Minimal inputs whose output is incompatible with `τ`.
    pub decided_out: Vec<BinWord>,
    /// Depth-`d` inputs still undecided.
    pub undecided: Vec<BinWord>,
    pub in_mass: Rat,
    pub out_mass: Rat,
    pub undecided_mass: Rat,
}

impl PreimageReport {
    pub fn total_mass(&self) -> Rat {
        &self.in_mass + &self.out_mass + &self.undecided_mass
    }
}

/// Like [`pushforward_partition`] but keeps the words and never merges.
/// Zero-mass cylinders are kept so that the three families cover every
/// depth-`d` word.
pub fn preimage_search(m: &MonotoneMachine, mu: &CylinderMeasure, tau: &BinWord, depth: usize) -> PreimageReport {
    let mut report = PreimageReport {
        decided_in: Vec::new(),
        decided_out: Vec::new(),
        undecided: Vec::new(),
        in_mass: Rat::zero(),
        out_mass: Rat::zero(),
        undecided_mass: Rat::zero(),
    };
    let mut frontier = vec![BinWord::empty()];
    for level in 0..=depth {
        let mut next = Vec::new();
        for input in frontier {
            let mass = mu.eval(&input);
            match classify(&m.step(&input), tau) {
                Verdict::In => {
                    report.in_mass += mass;
                    report.decided_in.push(input);
                }
                Verdict::Out => {
                    report.out_mass += mass;
                    report.decided_out.push(input);
                }
                Verdict::Undecided if level == depth => {
                    report.undecided_mass += mass;
                    report.undecided.push(input);
                }
                Verdict::Undecided => {
                    next.push(input.child(false));
                    next.push(input.child(true));
                }
            }
        }
        frontier = next;
    }
    report.decided_in.sort();
    report.decided_out.sort();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{graph_machine, identity};
    use crate::measure::fair_coin;
    use crate::rational::{int, rat};
    use crate::word::w;

    #[test]
    fn identity_pushforward_is_exact() {
        let b = pushforward_bounds(&identity(), &fair_coin(), &w("01"), 4);
        assert_eq!(b, RatInterval::point(rat(1, 4)));
    }

    #[test]
    fn bounds_are_nested() {
        let g = graph_machine(identity());
        let mut prev = pushforward_bounds(&g, &fair_coin(), &w("0110"), 0);
        for d in 1..8 {
            let cur = pushforward_bounds(&g, &fair_coin(), &w("0110"), d);
            assert!(cur.is_within(&prev));
            prev = cur;
        }
        assert_eq!(prev, RatInterval::point(int(0)));
    }

    #[test]
    fn preimage_identity() {
        let r = preimage_search(&identity(), &fair_coin(), &w("10"), 2);
        assert_eq!(r.decided_in, vec![w("10")]);
        assert_eq!(r.decided_out, vec![w("0"), w("11")]);
        assert_eq!(r.undecided_mass, int(0));
        assert_eq!(r.total_mass(), int(1));
    }

    #[test]
    fn preimage_graph() {
        let r = preimage_search(&graph_machine(identity()), &fair_coin(), &w("11"), 1);
        assert_eq!(r.decided_in, vec![w("1")]);
        assert_eq!(r.decided_out, vec![w("0")]);
    }
}
