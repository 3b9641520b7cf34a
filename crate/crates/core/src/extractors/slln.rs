use crate::machine::MonotoneMachine;
use crate::point::PointOracle;
use crate::rational::{rat, Rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SllnTrace {
    /// Entry `k-1` is the mean of the first `k` output bits.
    pub means: Vec<Rat>,
    /// Fewer than the requested number of bits were available.
    pub stalled: bool,
}

/// Running means of `T(x)` using the output on `x↾fuel`.
pub fn slln_trace(m: &MonotoneMachine, x: &PointOracle, n: usize, fuel: usize) -> SllnTrace {
    let out = m.step(&x.prefix(fuel));
    let avail = out.len().min(n);
    let mut ones = 0i64;
    let means = out.bits()[..avail]
        .iter()
        .enumerate()
        .map(|(k, &b)| {
            ones += b as i64;
            rat(ones, k as i64 + 1)
        })
        .collect();
    SllnTrace { means, stalled: avail < n }
}
