//! Measure-preserving machines: the von Neumann extractor, nonmonotonic
//! selection maps, sequence-set maps, and a running-mean experiment.

mod selection;
mod seqset;
mod slln;
mod von_neumann;

pub use selection::{selection_machine, SelectionError, SelectionStrategy};
pub use seqset::{
    check_independence, seqset_machine, DependenceWitness, SeqSetError, SequenceSetFamily,
};
pub use slln::{slln_trace, SllnTrace};
pub use von_neumann::von_neumann;

use crate::interval::RatInterval;
use crate::machine::{pushforward_partition, MonotoneMachine};
use crate::measure::fair_coin;
use crate::rational::dyadic;
use crate::word::BinWord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairnessReport {
    pub checked: usize,
    /// Output words whose enclosure misses `2^{-|τ|}`.
    pub failures: Vec<(BinWord, RatInterval)>,
    /// Whether every enclosure collapsed to a single point.
    pub all_exact: bool,
}

impl FairnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `λ` pushed forward through `m` encloses `λ(τ)` for every
/// `|τ| <= depth_out`.
pub fn pushforward_is_fair(m: &MonotoneMachine, depth_in: usize, depth_out: usize) -> FairnessReport {
    let lambda = fair_coin();
    let mut report = FairnessReport { checked: 0, failures: Vec::new(), all_exact: true };
    for tau in BinWord::all_up_to(depth_out) {
        let bounds = pushforward_partition(m, &lambda, &tau, depth_in).bounds();
        report.checked += 1;
        report.all_exact &= bounds.is_point();
        if !bounds.contains(&dyadic(tau.len())) {
            report.failures.push((tau, bounds));
        }
    }
    report
}
