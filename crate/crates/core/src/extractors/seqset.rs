use std::fmt;

use num_traits::One;

use crate::machine::{MachineKernel, MonotoneMachine};
use crate::measure::ClopenSet;
use crate::rational::{rat, Rat};
use crate::word::BinWord;

/// Finite prefix `C_0, ..., C_{k-1}` of a family of clopen sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceSetFamily {
    sets: Vec<ClopenSet>,
}

impl SequenceSetFamily {
    pub fn new(sets: Vec<ClopenSet>) -> Self {
        SequenceSetFamily { sets }
    }

    /// `C_n = {x : x(n) = 1}`.
    pub fn coordinates(k: usize) -> Self {
        Self::new((0..k).map(|n| ClopenSet::coordinate(n, true)).collect())
    }

    /// `C_0 = {x : x(0) = 1}` and `C_n = {x : x(n-1) ⊕ x(n) = 1}`.
    pub fn xor(k: usize) -> Self {
        let sets = (0..k)
            .map(|n| {
                if n == 0 {
                    return ClopenSet::coordinate(0, true);
                }
                let a = ClopenSet::coordinate(n - 1, true);
                let b = ClopenSet::coordinate(n, true);
                a.difference(&b).union(&b.difference(&a))
            })
            .collect();
        Self::new(sets)
    }

    pub fn sets(&self) -> &[ClopenSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Input depth at which every output bit is decided.
    pub fn horizon(&self) -> usize {
        self.sets.iter().map(ClopenSet::horizon).max().unwrap_or(0)
    }
}

impl fmt::Display for SequenceSetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SETS {}", self.sets.len())?;
        for c in &self.sets {
            write!(f, " {}", c.bracketed())?;
        }
        Ok(())
    }
}

/// A sub-family whose intersection mass differs from the product of masses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DependenceWitness {
    pub members: Vec<usize>,
    pub intersection_mass: Rat,
    pub product_mass: Rat,
}

impl fmt::Display for DependenceWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.members.iter().map(|i| format!("C{i}")).collect();
        write!(
            f,
            "{{{}}}: intersection {} != product {}",
            names.join(","),
            crate::rational::Frac(&self.intersection_mass),
            crate::rational::Frac(&self.product_mass)
        )
    }
}

/// Compares `λ(⋂A)` with `∏_{C∈A} λ(C)` for every sub-family `A` of size at
/// most `k`, the empty family included. Returns the number of sub-families
/// checked.
pub fn check_independence(fam: &SequenceSetFamily, k: usize) -> Result<usize, DependenceWitness> {
    let masses: Vec<Rat> = fam.sets.iter().map(ClopenSet::fair_mass).collect();
    let mut count = 0;
    let mut members = Vec::new();
    walk(fam, &masses, k, 0, &ClopenSet::whole(), &Rat::one(), &mut members, &mut count)?;
    Ok(count)
}

#[allow(clippy::too_many_arguments)]
fn walk(
    fam: &SequenceSetFamily,
    masses: &[Rat],
    k: usize,
    start: usize,
    inter: &ClopenSet,
    prod: &Rat,
    members: &mut Vec<usize>,
    count: &mut usize,
) -> Result<(), DependenceWitness> {
    *count += 1;
    let got = inter.fair_mass();
    if &got != prod {
        return Err(DependenceWitness { members: members.clone(), intersection_mass: got, product_mass: prod.clone() });
    }
    if members.len() == k {
        return Ok(());
    }
    for i in start..fam.sets.len() {
        members.push(i);
        let next = inter.intersection(&fam.sets[i]);
        walk(fam, masses, k, i + 1, &next, &(prod * &masses[i]), members, count)?;
        members.pop();
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeqSetError {
    #[error("C{index} has fair-coin mass {mass}, not 1/2", mass = crate::rational::Frac(.mass))]
    HalfMass { index: usize, mass: Rat },
    #[error("dependent sub-family {0}")]
    Dependence(DependenceWitness),
}

struct SeqSet(SequenceSetFamily);

impl MachineKernel for SeqSet {
    fn step(&self, input: &BinWord) -> BinWord {
        let mut out = BinWord::empty();
        for c in &self.0.sets {
            if c.covers(input) {
                out.push(true);
            } else if c.avoids(input) {
                out.push(false);
            } else {
                break;
            }
        }
        out
    }
}

/// `x ↦ (1_{C_0}(x), 1_{C_1}(x), ...)`, built only after the family is
/// checked to have half-mass members and to be mutually independent.
pub fn seqset_machine(fam: SequenceSetFamily) -> Result<MonotoneMachine, SeqSetError> {
    let half = rat(1, 2);
    for (index, c) in fam.sets.iter().enumerate() {
        let mass = c.fair_mass();
        if mass != half {
            return Err(SeqSetError::HalfMass { index, mass });
        }
    }
    check_independence(&fam, fam.len()).map_err(SeqSetError::Dependence)?;
    let label = format!("SEQSET {fam}");
    Ok(MonotoneMachine::new(label, SeqSet(fam)))
}
