//! Inverse-CDF transport from the fair coin onto an arbitrary computable
//! probability measure, ordering Cantor space lexicographically.

use num_traits::Zero;

use super::{MachineKernel, MonotoneMachine};
use crate::measure::CylinderMeasure;
use crate::rational::{dyadic_frac, Rat};
use crate::word::BinWord;

/// `ν`-mass of the sequences lexicographically below `[w]`:
/// `Σ_{i : w(i) = 1} ν((w↾i)0)`.
pub fn cdf_start(nu: &CylinderMeasure, w: &BinWord) -> Rat {
    let mut acc = Rat::zero();
    let mut prefix = BinWord::empty();
    for &b in w.bits() {
        if b {
            acc += nu.eval(&prefix.child(false));
        }
        prefix.push(b);
    }
    acc
}

/// How an input enclosure must sit inside a target CDF interval `[L, R)`
/// before a bit is emitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    /// The input is the half-open interval `[lo, hi)` (or the point `lo` when
    /// `lo = hi`); emit when it lies in `[L, R)`.
    HalfOpen,
    /// The input is a closed enclosure `[lo, hi]`; emit only when it lies in
    /// the open interval `(L, R)`. Breakpoints then stall forever.
    Interior,
}

fn inside(lo: &Rat, hi: &Rat, left: &Rat, right: &Rat, mode: Containment) -> bool {
    match mode {
        Containment::HalfOpen if lo == hi => left <= lo && lo < right,
        Containment::HalfOpen => left <= lo && hi <= right,
        Containment::Interior => left < lo && hi < right,
    }
}

/// Longest target word whose CDF interval contains the input enclosure,
/// capped at `max_bits`.
pub fn invert_interval(
    nu: &CylinderMeasure,
    lo: &Rat,
    hi: &Rat,
    mode: Containment,
    max_bits: usize,
) -> BinWord {
    let mut out = BinWord::empty();
    let mut left = Rat::zero();
    let mut right = nu.total();
    while out.len() < max_bits {
        let split = &left + nu.eval(&out.child(false));
        if inside(lo, hi, &left, &split, mode) {
            right = split;
            out.push(false);
        } else if inside(lo, hi, &split, &right, mode) {
            left = split;
            out.push(true);
        } else {
            break;
        }
    }
    out
}

/// Output cap for inputs of length `n`. Atoms of the target measure would
/// otherwise emit forever from a finite input.
fn output_cap(n: usize) -> usize {
    4 * n + 8
}

struct CdfInversion(CylinderMeasure);

impl MachineKernel for CdfInversion {
    fn step(&self, input: &BinWord) -> BinWord {
        let n = input.len();
        let lo = dyadic_frac(&input.to_index_big(), n);
        let hi = dyadic_frac(&(input.to_index_big() + 1), n);
        invert_interval(&self.0, &lo, &hi, Containment::HalfOpen, output_cap(n))
    }
}

/// Reads the input as the binary expansion of `u ∈ [0,1]` and emits the
/// target word whose `ν`-CDF interval contains every `u` consistent with the
/// input read so far. Pushes `λ` forward to `ν`.
pub fn cdf_inversion_map(nu: CylinderMeasure) -> Result<MonotoneMachine, super::MachineError> {
    if !nu.is_probability() {
        return Err(super::MachineError::NotProbability(nu.label().to_string()));
    }
    let label = format!("CDFINV {}", nu.label());
    Ok(MonotoneMachine::new(label, CdfInversion(nu)))
}
