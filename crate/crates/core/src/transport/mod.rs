//! The staged mass-transport construction of a measure-preserving map
//! `T: (2^ℕ, λ) → (2^ℕ, μ)` that never hits a designated point `x₀`.
//!
//! With `ν = ½μ + ¼λ + ¼ν′` and `f_n(σ) = μ(σ)/ν(σ)`, the measure `ρ_n` is
//! `ν ⊗ Leb` restricted to `{(x, y) : 0 < y ≤ f_n(x↾n)}`. Stage `n+1` moves,
//! inside each column `[σ]`, `|σ| = n`, the slab of the child whose density
//! dropped onto the top of the child whose density rose. Points are tracked
//! in `ν`-CDF coordinates: `u ∈ [0, 1)` determines `x` by CDF inversion, so
//! `ν ⊗ Leb` becomes plain area in the `(u, y)` square.

mod plan;
mod trace;

pub use plan::{verify_pushforward, LedgerEntry, PushforwardLedger, TransportPlan};
pub use trace::{
    avoidance_certificate, check_avoidance_empirical, generate_samples, transport_machine, trace_point,
    AvoidanceCertificate, EmpiricalReport, StallReason, TraceRecord, TracedPoint,
};

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::interval::RatInterval;
use crate::measure::{fair_coin, mix, CylinderMeasure};
use crate::point::PointOracle;
use crate::rational::{dyadic, rat, Frac, Rat};
use crate::word::BinWord;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("{0} is not a probability measure")]
    NotProbability(String),
    #[error("mixture fails positivity bound at {0}")]
    Positivity(BinWord),
    #[error("no depth up to {max_depth} has density along x0 below {y0}", y0 = Frac(.y0))]
    NotFound { y0: Rat, max_depth: usize },
    #[error("point lies on a rectangle boundary")]
    Boundary,
    #[error("sample {index} starts at height {y}, below the certified threshold", y = Frac(.y))]
    BelowThreshold { index: usize, y: Rat },
    #[error("stage {requested} requested but the plan is built to {built}")]
    StageOutOfRange { requested: usize, built: usize },
}

/// Depth to which [`make_instance`] checks `ν(σ) ≥ 2^{-|σ|}/4`.
pub const POSITIVITY_DEPTH: usize = 10;

/// `μ`, the divergence witness `ν′`, the avoided point `x₀`, and the mixture
/// `ν`.
#[derive(Debug, Clone)]
pub struct WitnessInstance {
    pub mu: CylinderMeasure,
    pub nu_prime: CylinderMeasure,
    pub x0: PointOracle,
    pub nu: CylinderMeasure,
}

pub fn make_instance(
    mu: CylinderMeasure,
    nu_prime: CylinderMeasure,
    x0: PointOracle,
) -> Result<WitnessInstance, TransportError> {
    make_instance_checked(mu, nu_prime, x0, POSITIVITY_DEPTH)
}

pub fn make_instance_checked(
    mu: CylinderMeasure,
    nu_prime: CylinderMeasure,
    x0: PointOracle,
    check_depth: usize,
) -> Result<WitnessInstance, TransportError> {
    for m in [&mu, &nu_prime] {
        if !m.is_probability() {
            return Err(TransportError::NotProbability(m.label().to_string()));
        }
    }
    let nu = mix(vec![rat(1, 2), rat(1, 4), rat(1, 4)], vec![mu.clone(), fair_coin(), nu_prime.clone()])
        .expect("weights sum to one");
    for sigma in BinWord::all_up_to(check_depth) {
        if nu.eval(&sigma) < dyadic(sigma.len() + 2) {
            return Err(TransportError::Positivity(sigma));
        }
    }
    Ok(WitnessInstance { mu, nu_prime, x0, nu })
}

impl WitnessInstance {
    /// `f_n(σ) = μ(σ)/ν(σ)`.
    pub fn density(&self, sigma: &BinWord) -> Rat {
        self.mu.eval(sigma) / self.nu.eval(sigma)
    }
}

/// `f_n` tabulated on all words of length `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityStep {
    pub depth: usize,
    values: Vec<Rat>,
}

impl DensityStep {
    pub fn get(&self, sigma: &BinWord) -> &Rat {
        assert_eq!(sigma.len(), self.depth, "word length must match the stage depth");
        &self.values[sigma.to_index() as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = (BinWord, &Rat)> {
        let n = self.depth;
        self.values.iter().enumerate().map(move |(i, v)| (BinWord::from_index(i as u64, n), v))
    }
}

pub fn density_step(inst: &WitnessInstance, n: usize) -> DensityStep {
    let values = (0..1u64 << n)
        .into_par_iter()
        .map(|i| inst.density(&BinWord::from_index(i, n)))
        .collect();
    DensityStep { depth: n, values }
}

/// Nodes `σ`, `|σ| = n`, where `Σ_b ν(σb) f_{n+1}(σb) ≠ ν(σ) f_n(σ)`.
pub fn density_identity_violations(inst: &WitnessInstance, n: usize) -> Vec<BinWord> {
    BinWord::all_of_length(n)
        .filter(|s| {
            let parent = inst.nu.eval(s) * inst.density(s);
            let kids: Rat = [false, true]
                .iter()
                .map(|&b| {
                    let c = s.child(b);
                    inst.nu.eval(&c) * inst.density(&c)
                })
                .sum();
            kids != parent
        })
        .collect()
}

/// `[column] × (lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rect {
    pub column: BinWord,
    pub y: RatInterval,
}

impl Rect {
    pub fn mass(&self, nu: &CylinderMeasure) -> Rat {
        nu.eval(&self.column) * self.y.width()
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.column, Frac(self.y.lo()), Frac(self.y.hi()))
    }
}

/// One slab moved upward between sibling columns.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Move {
    pub source: Rect,
    pub target: Rect,
    pub mass: Rat,
}

impl Move {
    pub fn parent(&self) -> BinWord {
        self.source.column.parent().expect("move columns are nonempty")
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MOVE {} -> {} MASS {}", self.source, self.target, Frac(&self.mass))
    }
}

/// The moves realizing `ρ_n → ρ_{n+1}`, sorted by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportStage {
    /// `n + 1`.
    pub index: usize,
    pub moves: Vec<Move>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StageDefect {
    MassMismatch(BinWord),
    LeavesColumn(BinWord),
    NotUpward(BinWord),
    Overlap(BinWord),
}

impl TransportStage {
    pub fn move_for(&self, parent: &BinWord) -> Option<&Move> {
        self.moves.binary_search_by(|m| m.parent().cmp(parent)).ok().map(|i| &self.moves[i])
    }

    /// Mass balance, column preservation, upward motion, and disjointness.
    pub fn audit(&self, nu: &CylinderMeasure) -> Vec<StageDefect> {
        let n = self.index - 1;
        let mut defects = Vec::new();
        for m in &self.moves {
            let parent = m.parent();
            if m.source.mass(nu) != m.mass || m.target.mass(nu) != m.mass {
                defects.push(StageDefect::MassMismatch(parent.clone()));
            }
            if m.source.column.prefix(n) != m.target.column.prefix(n) || m.source.column.len() != n + 1 {
                defects.push(StageDefect::LeavesColumn(parent.clone()));
            }
            if m.target.y.lo() < m.source.y.hi() {
                defects.push(StageDefect::NotUpward(parent.clone()));
            }
            if m.source.column == m.target.column {
                defects.push(StageDefect::Overlap(parent));
            }
        }
        // Sorted by parent with one move each, so distinct moves use
        // distinct columns.
        for pair in self.moves.windows(2) {
            if pair[0].parent() >= pair[1].parent() {
                defects.push(StageDefect::Overlap(pair[1].parent()));
            }
        }
        defects
    }
}

fn column_move(inst: &WitnessInstance, sigma: &BinWord, before: &Rat) -> Option<Move> {
    let [low, high] = [false, true].map(|b| {
        let c = sigma.child(b);
        let f = inst.density(&c);
        (c, f)
    });
    let (src, dst) = match low.1.cmp(before) {
        std::cmp::Ordering::Less => (low, high),
        std::cmp::Ordering::Greater => (high, low),
        std::cmp::Ordering::Equal => return None,
    };
    let source = Rect { column: src.0, y: RatInterval::new(src.1, before.clone()).expect("density fell") };
    let target = Rect { column: dst.0, y: RatInterval::new(before.clone(), dst.1).expect("density rose") };
    let mass = source.mass(&inst.nu);
    Some(Move { source, target, mass })
}

/// Stage `n + 1`: for every `|σ| = n` whose children's densities straddle
/// `f_n(σ)`, the slab `[σb] × (f_{n+1}(σb), f_n(σ)]` moves onto
/// `[σb′] × (f_n(σ), f_{n+1}(σb′)]`.
pub fn build_stage(inst: &WitnessInstance, n: usize) -> TransportStage {
    let moves: Vec<Move> = (0..1u64 << n)
        .into_par_iter()
        .filter_map(|i| {
            let sigma = BinWord::from_index(i, n);
            column_move(inst, &sigma, &inst.density(&sigma))
        })
        .collect();
    TransportStage { index: n + 1, moves }
}

/// Image of `(u, y)` in the source under the measure-preserving rectangle
/// map: `u` moves affinely between the columns' CDF intervals, `y` affinely
/// between the height intervals. Enclosures touching the source boundary
/// are rejected.
pub fn rect_transport_apply(
    nu: &CylinderMeasure,
    source: &Rect,
    target: &Rect,
    u: &RatInterval,
    y: &RatInterval,
) -> Result<(RatInterval, RatInterval), TransportError> {
    let s_start = crate::machine::cdf_start(nu, &source.column);
    let s_width = nu.eval(&source.column);
    let t_start = crate::machine::cdf_start(nu, &target.column);
    let t_width = nu.eval(&target.column);
    let s_end = &s_start + &s_width;
    let in_column = &s_start < u.lo() && u.hi() < &s_end;
    let in_slab = source.y.lo() < y.lo() && y.hi() < source.y.hi();
    if !in_column || !in_slab {
        return Err(TransportError::Boundary);
    }
    Ok(map_point(&s_start, &s_width, &t_start, &t_width, source, target, u, y))
}

#[allow(clippy::too_many_arguments)]
fn map_point(
    s_start: &Rat,
    s_width: &Rat,
    t_start: &Rat,
    t_width: &Rat,
    source: &Rect,
    target: &Rect,
    u: &RatInterval,
    y: &RatInterval,
) -> (RatInterval, RatInterval) {
    let u_scale = t_width / s_width;
    let u_offset = t_start - s_start * &u_scale;
    let y_scale = target.y.width() / source.y.width();
    let y_offset = target.y.lo() - source.y.lo() * &y_scale;
    (u.affine(&u_scale, &u_offset), y.affine(&y_scale, &y_offset))
}

/// Words of length `n` at which `f_n ≤ 2` or `f_n ≥ 0` fails.
pub fn density_range_violations(inst: &WitnessInstance, n: usize) -> Vec<BinWord> {
    let two = Rat::one() + Rat::one();
    BinWord::all_of_length(n)
        .filter(|s| {
            let f = inst.density(s);
            f < Rat::zero() || f > two
        })
        .collect()
}
