use std::fmt;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{map_point, TransportError, TransportPlan, WitnessInstance};
use crate::interval::RatInterval;
use crate::machine::{cdf_start, MachineKernel, MonotoneMachine};
use crate::point::PointOracle;
use crate::rational::{dyadic, dyadic_frac, is_positive, Frac, Rat};
use crate::word::BinWord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StallReason {
    /// Height enclosure reaches down to `0`, outside every `ρ_n`.
    ZeroHeight,
    /// CDF enclosure meets the split between the two child columns.
    Breakpoint,
    /// Height enclosure meets the bottom edge of a moving slab.
    HeightEdge,
}

impl fmt::Display for StallReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StallReason::ZeroHeight => "zero-height",
            StallReason::Breakpoint => "cdf-breakpoint",
            StallReason::HeightEdge => "slab-edge",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub stage: usize,
    /// `x^{(k)}↾k`.
    pub column: BinWord,
    pub y: RatInterval,
    pub moved: bool,
}

impl fmt::Display for TraceRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "STAGE {} col={} y={}", self.stage, self.column, self.y)
    }
}

/// A point followed through `T₀` and the stages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracedPoint {
    /// Final CDF-coordinate enclosure.
    pub u: RatInterval,
    /// Entry `k` is the state after stage `k`; entry 0 is the output of `T₀`.
    pub history: Vec<TraceRecord>,
    /// Stage that could not be decided.
    pub stall: Option<(usize, StallReason)>,
}

impl TracedPoint {
    pub fn last(&self) -> &TraceRecord {
        self.history.last().expect("stage 0 is always recorded")
    }

    pub fn column(&self) -> &BinWord {
        &self.last().column
    }

    pub fn initial_y(&self) -> &RatInterval {
        &self.history[0].y
    }

    pub fn stages_completed(&self) -> usize {
        self.last().stage
    }
}

impl fmt::Display for TracedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.history {
            writeln!(f, "{r}")?;
        }
        if let Some((stage, reason)) = self.stall {
            writeln!(f, "STALLED stage={stage} reason={reason}")?;
        }
        Ok(())
    }
}

fn enclosure(x: &PointOracle, precision: usize) -> RatInterval {
    match x.binary_value() {
        Some(v) => RatInterval::point(v),
        None => word_enclosure(&x.prefix(precision)),
    }
}

fn word_enclosure(bits: &BinWord) -> RatInterval {
    let n = bits.len();
    let lo = dyadic_frac(&bits.to_index_big(), n);
    let hi = &lo + dyadic(n);
    RatInterval::new(lo, hi).expect("ordered")
}

fn run(plan: &TransportPlan, mut u: RatInterval, mut y: RatInterval, stages: usize) -> Result<TracedPoint, TransportError> {
    let nu = &plan.instance().nu;
    let mut column = BinWord::empty();
    let mut start = Rat::zero();
    let mut history = vec![TraceRecord { stage: 0, column: column.clone(), y: y.clone(), moved: false }];
    for k in 1..=stages {
        let stage = plan.stage(k)?;
        let stall = |reason| Ok(TracedPoint { u: u.clone(), history: history.clone(), stall: Some((k, reason)) });
        if !is_positive(y.lo()) {
            return stall(StallReason::ZeroHeight);
        }
        let split = &start + nu.eval(&column.child(false));
        let bit = if u.hi() < &split {
            false
        } else if u.lo() > &split {
            true
        } else {
            return stall(StallReason::Breakpoint);
        };
        let child = column.child(bit);
        let child_start = if bit { split } else { start.clone() };
        let mut moved = false;
        let (mut next_col, mut next_start) = (child.clone(), child_start.clone());
        if let Some(m) = stage.move_for(&column).filter(|m| m.source.column == child) {
            if y.lo() > m.source.y.lo() {
                let t_start = cdf_start(nu, &m.target.column);
                let (u2, y2) = map_point(
                    &child_start,
                    &nu.eval(&child),
                    &t_start,
                    &nu.eval(&m.target.column),
                    &m.source,
                    &m.target,
                    &u,
                    &y,
                );
                u = u2;
                y = y2;
                next_col = m.target.column.clone();
                next_start = t_start;
                moved = true;
            } else if y.hi() >= m.source.y.lo() {
                return stall(StallReason::HeightEdge);
            }
        }
        column = next_col;
        start = next_start;
        history.push(TraceRecord { stage: k, column: column.clone(), y: y.clone(), moved });
    }
    Ok(TracedPoint { u, history, stall: None })
}

/// Runs `ω` through `T₀` and stages `1..=stages`. Exact when `ω` is
/// eventually periodic; otherwise the first `precision` bits of each half
/// give closed enclosures.
pub fn trace_point(
    plan: &TransportPlan,
    omega: &PointOracle,
    stages: usize,
    precision: usize,
) -> Result<TracedPoint, TransportError> {
    run(plan, enclosure(&omega.even(), precision), enclosure(&omega.odd(), precision), stages)
}

/// Least `n` with `f_n(x₀↾n) < y₀`: every point starting at height `≥ y₀`
/// has left the column of `x₀↾n` by stage `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvoidanceCertificate {
    pub y0: Rat,
    pub depth: usize,
    pub bound: Rat,
}

impl fmt::Display for AvoidanceCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CERT y0={} n={} bound={}", Frac(&self.y0), self.depth, Frac(&self.bound))
    }
}

pub fn avoidance_certificate(
    inst: &WitnessInstance,
    y0: &Rat,
    max_depth: usize,
) -> Result<AvoidanceCertificate, TransportError> {
    let not_found = || TransportError::NotFound { y0: y0.clone(), max_depth };
    if !is_positive(y0) {
        return Err(not_found());
    }
    (0..=max_depth)
        .map(|n| (n, inst.density(&inst.x0.prefix(n))))
        .find(|(_, f)| f < y0)
        .map(|(depth, bound)| AvoidanceCertificate { y0: y0.clone(), depth, bound })
        .ok_or_else(not_found)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmpiricalReport {
    pub samples: usize,
    pub avoided: usize,
    /// `(sample, stage, reason)`.
    pub stalled: Vec<(usize, usize, StallReason)>,
    /// Samples that still sat in `x₀↾n` at stage `n`.
    pub failures: Vec<usize>,
}

impl EmpiricalReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Traces every sample to the certificate depth and checks it left the
/// column of `x₀`. Stalled samples are reported, not failed.
pub fn check_avoidance_empirical(
    plan: &TransportPlan,
    samples: &[PointOracle],
    cert: &AvoidanceCertificate,
    precision: usize,
) -> Result<EmpiricalReport, TransportError> {
    let target = plan.instance().x0.prefix(cert.depth);
    let mut report = EmpiricalReport { samples: samples.len(), ..Default::default() };
    for (index, omega) in samples.iter().enumerate() {
        let traced = trace_point(plan, omega, cert.depth, precision)?;
        let y = traced.initial_y().lo();
        if y < &cert.y0 {
            return Err(TransportError::BelowThreshold { index, y: y.clone() });
        }
        match traced.stall {
            Some((stage, reason)) => report.stalled.push((index, stage, reason)),
            None if traced.column() == &target => report.failures.push(index),
            None => report.avoided += 1,
        }
    }
    Ok(report)
}

/// Seeded inputs whose `T₀` image has a `precision`-bit dyadic CDF
/// coordinate and a dyadic height uniform in `[y_min, 1)`.
pub fn generate_samples(
    count: usize,
    y_min: &Rat,
    precision: usize,
    seed: u64,
) -> Result<Vec<PointOracle>, TransportError> {
    assert!((1..63).contains(&precision), "precision must be in 1..63");
    let scale = 1u64 << precision;
    let lowest = (y_min * Rat::from_integer(scale.into())).ceil().to_integer().to_u64().unwrap_or(0);
    if lowest >= scale {
        return Err(TransportError::BelowThreshold { index: 0, y: y_min.clone() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let u = BinWord::from_index(rng.gen_range(0..scale), precision);
            let y = BinWord::from_index(rng.gen_range(lowest..scale), precision);
            PointOracle::dyadic(BinWord::interleave(&u, &y))
        })
        .collect())
}

struct Composite(Arc<TransportPlan>);

impl MachineKernel for Composite {
    fn step(&self, input: &BinWord) -> BinWord {
        let u = word_enclosure(&input.even_bits());
        let y = word_enclosure(&input.odd_bits());
        run(&self.0, u, y, self.0.build_depth()).expect("stages within build depth").column().clone()
    }
}

/// `π ∘ T_N ∘ ⋯ ∘ T₀` truncated at the plan's build depth `N`: the output is
/// the column after the last stage the input decides, so at most `N` bits.
pub fn transport_machine(plan: Arc<TransportPlan>) -> MonotoneMachine {
    let inst = plan.instance();
    let label = format!(
        "TRANSPORT {} {} {} {}",
        inst.mu.label(),
        inst.nu_prime.label(),
        inst.x0,
        plan.build_depth()
    );
    MonotoneMachine::new(label, Composite(plan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::{check_monotone, pushforward_bounds};
    use crate::measure::{dirac, fair_coin};
    use crate::rational::{int, rat};
    use crate::transport::make_instance;
    use crate::word::w;

    fn plan(depth: usize) -> TransportPlan {
        let inst = make_instance(fair_coin(), dirac(PointOracle::constant(false)), PointOracle::constant(false)).unwrap();
        TransportPlan::new(inst, depth)
    }

    /// `ω` with CDF coordinate `u` and height `y`, both finite binary words.
    fn omega(u: &str, y: &str) -> PointOracle {
        PointOracle::dyadic(BinWord::interleave(&w(u), &w(y)))
    }

    fn exact(u: Rat, y: Rat) -> PointOracle {
        let part = |r: &Rat| PointOracle::from_binary_value(r).unwrap();
        PointOracle::join(&part(&u), &part(&y))
    }

    #[test]
    fn fixed_and_moved_points() {
        let p = plan(4);
        let t = trace_point(&p, &omega("11", "10"), 1, 32).unwrap();
        assert_eq!(t.column(), &w("1"));
        assert!(!t.last().moved);
        let t = trace_point(&p, &exact(rat(1, 4), rat(9, 10)), 1, 0).unwrap();
        assert_eq!(t.column(), &w("1"));
        assert!(t.last().moved);
        assert_eq!(t.last().y, RatInterval::point(rat(7, 6)));
        assert_eq!(t.to_string(), "STAGE 0 col=ε y=[9/10,9/10]\nSTAGE 1 col=1 y=[7/6,7/6]\n");
        // Same point as a bare oracle: enclosures only.
        let opaque = exact(rat(1, 4), rat(9, 10));
        let om = PointOracle::from_fn("opaque", move |i| opaque.bit(i));
        let t = trace_point(&p, &om, 1, 40).unwrap();
        assert!(t.last().y.contains(&rat(7, 6)));
        assert!(t.last().y.width() < dyadic(30));
    }

    #[test]
    fn boundary_points_stall() {
        let p = plan(2);
        let at_split = trace_point(&p, &exact(rat(5, 8), rat(1, 2)), 2, 0).unwrap();
        assert_eq!(at_split.stall, Some((1, StallReason::Breakpoint)));
        let on_edge = trace_point(&p, &exact(rat(1, 4), rat(4, 5)), 2, 0).unwrap();
        assert_eq!(on_edge.stall, Some((1, StallReason::HeightEdge)));
        let floor = trace_point(&p, &exact(rat(1, 4), rat(0, 1)), 2, 0).unwrap();
        assert_eq!(floor.stall, Some((1, StallReason::ZeroHeight)));
        let top = trace_point(&p, &exact(rat(1, 4), rat(1, 1)), 1, 0).unwrap();
        assert_eq!(top.last().y, RatInterval::point(rat(4, 3)));
    }

    #[test]
    fn heights_never_decrease() {
        let p = plan(5);
        let samples = generate_samples(200, &rat(1, 64), 20, 3).unwrap();
        for s in &samples {
            let t = trace_point(&p, s, 5, 20).unwrap();
            for pair in t.history.windows(2) {
                assert!(pair[0].y.lo() <= pair[1].y.lo());
                assert!(pair[0].column.is_prefix_of(&pair[1].column));
            }
            assert!(t.history.iter().all(|r| is_positive(r.y.lo())));
        }
    }

    #[test]
    fn certificates() {
        let p = plan(8);
        let inst = p.instance();
        let c = avoidance_certificate(inst, &rat(1, 4), 64).unwrap();
        assert_eq!((c.depth, c.bound.clone()), (4, rat(4, 19)));
        assert_eq!(c.to_string(), "CERT y0=1/4 n=4 bound=4/19");
        assert_eq!(avoidance_certificate(inst, &int(2), 64).unwrap().depth, 0);
        assert_eq!(avoidance_certificate(inst, &rat(1, 2), 64).unwrap().depth, 3);
        assert_eq!(avoidance_certificate(inst, &rat(1, 64), 64).unwrap().depth, 8);
        let flat = make_instance(fair_coin(), fair_coin(), PointOracle::constant(false)).unwrap();
        assert!(matches!(avoidance_certificate(&flat, &rat(1, 2), 64), Err(TransportError::NotFound { .. })));
    }

    #[test]
    fn empirical_avoidance() {
        let p = plan(8);
        let cert = avoidance_certificate(p.instance(), &rat(1, 64), 64).unwrap();
        let samples = generate_samples(100, &rat(1, 64), 24, 11).unwrap();
        let r = check_avoidance_empirical(&p, &samples, &cert, 24).unwrap();
        assert!(r.passed());
        assert_eq!(r.avoided + r.stalled.len(), 100);
        let low = vec![omega("1", "0001")];
        assert!(matches!(
            check_avoidance_empirical(&p, &low, &cert, 24),
            Err(TransportError::BelowThreshold { .. })
        ));
    }

    #[test]
    fn samples_are_reproducible() {
        let a = generate_samples(5, &rat(1, 4), 16, 9).unwrap();
        let b = generate_samples(5, &rat(1, 4), 16, 9).unwrap();
        let show = |v: &[PointOracle]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
        assert_eq!(show(&a), show(&b));
        assert!(a.iter().all(|s| s.odd().binary_value().unwrap() >= rat(1, 4)));
    }

    #[test]
    fn composite_machine_pushes_lambda_to_mu() {
        let m = transport_machine(Arc::new(plan(2)));
        assert!(check_monotone(&m, 10).is_ok());
        for tau in BinWord::all_up_to(2) {
            let b = pushforward_bounds(&m, &fair_coin(), &tau, 12);
            assert!(b.contains(&dyadic(tau.len())), "{tau}: {b}");
        }
    }
}
