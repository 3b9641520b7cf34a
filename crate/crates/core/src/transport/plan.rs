use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;

use super::{build_stage, density_step, DensityStep, TransportError, TransportStage, WitnessInstance};
use crate::interval::RatInterval;
use crate::rational::{one, Frac, Rat};
use crate::word::BinWord;

/// Stages `1..=build_depth` and densities `0..=build_depth`, each computed
/// on first use and then shared.
#[derive(Debug)]
pub struct TransportPlan {
    instance: WitnessInstance,
    build_depth: usize,
    densities: Vec<OnceLock<DensityStep>>,
    stages: Vec<OnceLock<TransportStage>>,
}

impl TransportPlan {
    pub fn new(instance: WitnessInstance, build_depth: usize) -> Self {
        TransportPlan {
            instance,
            build_depth,
            densities: (0..=build_depth).map(|_| OnceLock::new()).collect(),
            stages: (0..build_depth).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn instance(&self) -> &WitnessInstance {
        &self.instance
    }

    pub fn build_depth(&self) -> usize {
        self.build_depth
    }

    /// How `T₀` turns the input into a point of the initial rectangle.
    pub fn t0_scheme(&self) -> &'static str {
        "even input bits give the nu-CDF coordinate u, odd input bits give the height y in [0,1]"
    }

    pub fn density(&self, n: usize) -> Result<&DensityStep, TransportError> {
        let cell = self
            .densities
            .get(n)
            .ok_or(TransportError::StageOutOfRange { requested: n, built: self.build_depth })?;
        Ok(cell.get_or_init(|| density_step(&self.instance, n)))
    }

    /// Stage `k`, `1 <= k <= build_depth`, moving `ρ_{k-1}` to `ρ_k`.
    pub fn stage(&self, k: usize) -> Result<&TransportStage, TransportError> {
        let cell = k
            .checked_sub(1)
            .and_then(|i| self.stages.get(i))
            .ok_or(TransportError::StageOutOfRange { requested: k, built: self.build_depth })?;
        Ok(cell.get_or_init(|| build_stage(&self.instance, k - 1)))
    }

    /// All stages forced, in order.
    pub fn stages(&self) -> impl Iterator<Item = &TransportStage> {
        (1..=self.build_depth).map(|k| self.stage(k).expect("within build depth"))
    }

    /// `STAGE k` headers followed by the stage's `MOVE` lines.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for st in self.stages() {
            out.push_str(&format!("STAGE {}\n", st.index));
            for m in &st.moves {
                out.push_str(&format!("{m}\n"));
            }
        }
        out
    }
}

/// Per-column record of the symbolic pushforward check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LedgerEntry {
    pub column: BinWord,
    /// Height region of the column after stage `|σ|`, as disjoint `(lo, hi]`.
    pub region: Vec<RatInterval>,
    pub density: Rat,
    /// `ν(σ) · length(region)`.
    pub mass: Rat,
    pub mu: Rat,
    pub ok: bool,
}

impl fmt::Display for LedgerEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let region: Vec<String> =
            self.region.iter().map(|r| format!("({},{}]", Frac(r.lo()), Frac(r.hi()))).collect();
        write!(
            f,
            "COLUMN {} region={} f={} mass={} mu={} {}",
            self.column,
            if region.is_empty() { "empty".to_string() } else { region.join("+") },
            Frac(&self.density),
            Frac(&self.mass),
            Frac(&self.mu),
            if self.ok { "OK" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushforwardLedger {
    pub entries: Vec<LedgerEntry>,
}

impl PushforwardLedger {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter().filter(|e| !e.ok)
    }
}

type Region = Vec<(Rat, Rat)>;

fn add_interval(region: &mut Region, lo: &Rat, hi: &Rat) -> bool {
    if region.iter().any(|(a, b)| a < hi && lo < b) {
        return false;
    }
    region.push((lo.clone(), hi.clone()));
    region.sort();
    let mut merged: Region = Vec::with_capacity(region.len());
    for (a, b) in region.drain(..) {
        match merged.last_mut() {
            Some(last) if last.1 == a => last.1 = b,
            _ => merged.push((a, b)),
        }
    }
    *region = merged;
    true
}

fn remove_interval(region: &mut Region, lo: &Rat, hi: &Rat) -> bool {
    let Some(i) = region.iter().position(|(a, b)| a <= lo && hi <= b) else {
        return false;
    };
    let (a, b) = region.remove(i);
    if &a < lo {
        region.push((a, lo.clone()));
    }
    if hi < &b {
        region.push((hi.clone(), b));
    }
    region.sort();
    true
}

/// Follows the height region of every column through the stages, applying
/// each move symbolically, and checks for `|σ| <= depth` that the region is
/// exactly `(0, f_{|σ|}(σ)]` and that `ν(σ) · f_{|σ|}(σ) = μ(σ)`. Once a
/// column of length `n` is settled at stage `n`, later stages move mass only
/// inside it, so this is the pushforward `λ_T(σ)`.
pub fn verify_pushforward(plan: &TransportPlan, depth: usize) -> Result<PushforwardLedger, TransportError> {
    let inst = plan.instance();
    let mut entries = Vec::new();
    let mut level: Vec<(BinWord, Region)> = vec![(BinWord::empty(), vec![(Rat::zero(), one())])];
    for n in 0..=depth {
        let density = plan.density(n)?;
        let mut next = Vec::new();
        let stage = if n < depth { Some(plan.stage(n + 1)?) } else { None };
        for (sigma, region) in level {
            let f = density.get(&sigma).clone();
            let nu = inst.nu.eval(&sigma);
            let length = region.iter().fold(Rat::zero(), |acc, (a, b)| acc + (b - a));
            let mass = &nu * &length;
            let mu = inst.mu.eval(&sigma);
            let expected: Region = if f.is_zero() { Vec::new() } else { vec![(Rat::zero(), f.clone())] };
            let ok = region == expected && mass == mu && &nu * &f == mu;
            if let Some(stage) = stage {
                let mv = stage.move_for(&sigma);
                for b in [false, true] {
                    let child = sigma.child(b);
                    let mut r = region.clone();
                    let mut fine = true;
                    if let Some(m) = mv {
                        if m.source.column == child {
                            fine &= remove_interval(&mut r, m.source.y.lo(), m.source.y.hi());
                        }
                        if m.target.column == child {
                            fine &= add_interval(&mut r, m.target.y.lo(), m.target.y.hi());
                        }
                    }
                    if !fine {
                        // Poison the region so the child entry fails.
                        r.clear();
                        r.push((Rat::zero(), Rat::zero()));
                    }
                    next.push((child, r));
                }
            }
            let region = region
                .into_iter()
                .map(|(a, b)| RatInterval::new(a, b).expect("regions are ordered"))
                .collect();
            entries.push(LedgerEntry { column: sigma, region, density: f, mass, mu, ok });
        }
        level = next;
    }
    Ok(PushforwardLedger { entries })
}
