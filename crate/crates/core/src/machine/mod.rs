//! Monotone machines: prefix-monotone word transducers whose limits on
//! infinite inputs define partial (almost-everywhere) computable maps.

use std::fmt;
use std::sync::Arc;

use crate::point::PointOracle;
use crate::word::BinWord;

mod cdf;
mod pushforward;

pub use cdf::{cdf_inversion_map, cdf_start, invert_interval, Containment};
pub use pushforward::{
    preimage_search, pushforward_bounds, pushforward_partition, MassPartition, PreimageReport,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    #[error("target measure {0} is not a probability measure")]
    NotProbability(String),
}

/// The word-level behaviour of a [`MonotoneMachine`].
pub trait MachineKernel: Send + Sync {
    fn step(&self, input: &BinWord) -> BinWord;

    /// Inputs with equal keys continue identically: for every `ρ`,
    /// `step(σρ) = step(σ)·h(ρ)` with `h` depending only on the key. Enables
    /// node merging in pushforward enumeration; `None` disables it.
    fn residual_key(&self, _input: &BinWord) -> Option<u64> {
        None
    }
}

#[derive(Clone)]
pub struct MonotoneMachine {
    kernel: Arc<dyn MachineKernel>,
    label: Arc<str>,
}

impl MonotoneMachine {
    pub fn new(label: impl Into<Arc<str>>, kernel: impl MachineKernel + 'static) -> Self {
        MonotoneMachine { kernel: Arc::new(kernel), label: label.into() }
    }

    pub fn from_fn(
        label: impl Into<Arc<str>>,
        f: impl Fn(&BinWord) -> BinWord + Send + Sync + 'static,
    ) -> Self {
        struct F<G>(G);
        impl<G: Fn(&BinWord) -> BinWord + Send + Sync> MachineKernel for F<G> {
            fn step(&self, input: &BinWord) -> BinWord {
                (self.0)(input)
            }
        }
        Self::new(label, F(f))
    }

    pub fn step(&self, input: &BinWord) -> BinWord {
        self.kernel.step(input)
    }

    pub fn residual_key(&self, input: &BinWord) -> Option<u64> {
        self.kernel.residual_key(input)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Debug for MonotoneMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MonotoneMachine({})", self.label)
    }
}

struct Identity;

impl MachineKernel for Identity {
    fn step(&self, input: &BinWord) -> BinWord {
        input.clone()
    }

    fn residual_key(&self, _input: &BinWord) -> Option<u64> {
        Some(0)
    }
}

pub fn identity() -> MonotoneMachine {
    MonotoneMachine::new("ID", Identity)
}

struct Compose {
    outer: MonotoneMachine,
    inner: MonotoneMachine,
}

impl MachineKernel for Compose {
    fn step(&self, input: &BinWord) -> BinWord {
        self.outer.step(&self.inner.step(input))
    }
}

/// `outer ∘ inner`
pub fn compose(outer: MonotoneMachine, inner: MonotoneMachine) -> MonotoneMachine {
    let label = format!("COMPOSE {} {}", outer.label(), inner.label());
    MonotoneMachine::new(label, Compose { outer, inner })
}

struct Graph(MonotoneMachine);

impl MachineKernel for Graph {
    fn step(&self, input: &BinWord) -> BinWord {
        let out = self.0.step(input);
        let m = input.len().min(out.len());
        // z(2n) = x(n) is available one step ahead of z(2n+1) = T(x)(n).
        let xs = input.prefix(if input.len() > m { m + 1 } else { m });
        BinWord::interleave(&xs, &out.prefix(m))
    }
}

/// `x ↦ (x, T(x))`, joined into a single sequence.
pub fn graph_machine(t: MonotoneMachine) -> MonotoneMachine {
    let label = format!("GRAPH {}", t.label());
    MonotoneMachine::new(label, Graph(t))
}

/// `z ↦ (z(0), z(2), ...)`
pub fn project_even() -> MonotoneMachine {
    MonotoneMachine::from_fn("PROJ_EVEN", BinWord::even_bits)
}

/// `z ↦ (z(1), z(3), ...)`
pub fn project_odd() -> MonotoneMachine {
    MonotoneMachine::from_fn("PROJ_ODD", BinWord::odd_bits)
}

struct Tail;

impl MachineKernel for Tail {
    fn step(&self, input: &BinWord) -> BinWord {
        match input.bits().iter().position(|&b| b) {
            Some(n) => input.suffix_from(n + 1),
            None => BinWord::empty(),
        }
    }

    fn residual_key(&self, input: &BinWord) -> Option<u64> {
        Some(input.bits().contains(&true) as u64)
    }
}

/// `0^n 1 x ↦ x`; undefined on `0^∞`.
pub fn tail_map() -> MonotoneMachine {
    MonotoneMachine::new("TAIL", Tail)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneViolation {
    pub input: BinWord,
    pub extension: BinWord,
    pub output: BinWord,
    pub extended_output: BinWord,
}

/// Checks `step(σ) ⊑ step(σb)` for all `|σ| < depth`.
pub fn check_monotone(m: &MonotoneMachine, depth: usize) -> Result<(), MonotoneViolation> {
    if depth == 0 {
        return Ok(());
    }
    for input in BinWord::all_up_to(depth - 1) {
        let output = m.step(&input);
        for b in [false, true] {
            let extension = input.child(b);
            let extended_output = m.step(&extension);
            if !output.is_prefix_of(&extended_output) {
                return Err(MonotoneViolation { input, extension, output, extended_output });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitOutcome {
    Prefix(BinWord),
    /// Not enough output after consuming the fuel; carries what was produced.
    Stalled(BinWord),
}

/// First `want` bits of `T(x)` if `step(x↾fuel)` already has them.
pub fn limit_prefix(m: &MonotoneMachine, x: &PointOracle, want: usize, fuel: usize) -> LimitOutcome {
    let out = m.step(&x.prefix(fuel));
    if out.len() >= want {
        LimitOutcome::Prefix(out.prefix(want))
    } else {
        LimitOutcome::Stalled(out)
    }
}

/// Whether two machines produce prefix-compatible outputs on every input of
/// length `<= depth`; returns the first input where they disagree.
pub fn first_disagreement(a: &MonotoneMachine, b: &MonotoneMachine, depth: usize) -> Option<BinWord> {
    BinWord::all_up_to(depth).find(|x| !a.step(x).compatible(&b.step(x)))
}
