use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::machine::{MachineKernel, MonotoneMachine};
use crate::word::BinWord;

type IndexFn = Arc<dyn Fn(&BinWord) -> usize + Send + Sync>;
type FuelFn = Arc<dyn Fn(usize) -> usize + Send + Sync>;

/// Chooses the next input position to read from the bits selected so far.
#[derive(Clone)]
pub enum SelectionStrategy {
    /// `i_s = stride·s + offset`.
    Stride { stride: usize, offset: usize },
    /// Decision tree keyed by the observed history; histories without an
    /// entry read the least position not yet selected.
    Tree(BTreeMap<BinWord, usize>),
    /// Arbitrary rule with a declared fuel bound: the `s`-th index is below
    /// `fuel(s)`.
    Custom { label: Arc<str>, next: IndexFn, fuel: FuelFn },
}

impl SelectionStrategy {
    pub fn custom(
        label: &str,
        next: impl Fn(&BinWord) -> usize + Send + Sync + 'static,
        fuel: impl Fn(usize) -> usize + Send + Sync + 'static,
    ) -> Self {
        SelectionStrategy::Custom { label: label.into(), next: Arc::new(next), fuel: Arc::new(fuel) }
    }

    pub fn next_index(&self, history: &BinWord, chosen: &[usize]) -> usize {
        match self {
            SelectionStrategy::Stride { stride, offset } => stride * history.len() + offset,
            SelectionStrategy::Tree(map) => match map.get(history) {
                Some(&i) => i,
                None => (0..).find(|i| !chosen.contains(i)).expect("unbounded range"),
            },
            SelectionStrategy::Custom { next, .. } => next(history),
        }
    }

    /// Exclusive upper bound on the `s`-th selected index.
    pub fn fuel(&self, s: usize) -> usize {
        match self {
            SelectionStrategy::Stride { stride, offset } => stride * s + offset + 1,
            SelectionStrategy::Tree(map) => {
                let top = map.values().copied().max().map_or(0, |m| m + 1);
                top.max(s + 1)
            }
            SelectionStrategy::Custom { fuel, .. } => fuel(s),
        }
    }
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionStrategy::Stride { stride, offset } => write!(f, "STRIDE {stride} {offset}"),
            SelectionStrategy::Tree(map) => {
                write!(f, "TREE [")?;
                for (h, i) in map {
                    write!(f, " {h}={i}")?;
                }
                write!(f, " ]")
            }
            SelectionStrategy::Custom { label, .. } => write!(f, "{label}"),
        }
    }
}

impl fmt::Debug for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SelectionStrategy({self})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SelectionError {
    #[error("history {history} selects index {index} a second time")]
    Repeated { history: BinWord, index: usize },
    #[error("history {history} selects index {index}, beyond the fuel bound {bound}")]
    OverFuel { history: BinWord, index: usize, bound: usize },
}

struct Selection(SelectionStrategy);

impl MachineKernel for Selection {
    fn step(&self, input: &BinWord) -> BinWord {
        let mut out = BinWord::empty();
        let mut chosen = Vec::new();
        loop {
            let i = self.0.next_index(&out, &chosen);
            // A run-time violation stalls instead of emitting a wrong bit.
            if i >= input.len() || chosen.contains(&i) || i >= self.0.fuel(out.len()) {
                return out;
            }
            chosen.push(i);
            out.push(input.bit(i));
        }
    }
}

/// Checks freshness and the fuel bound along every history shorter than
/// `audit_depth`, then builds the machine `x ↦ (x(i_0), x(i_1), ...)`.
pub fn selection_machine(strategy: SelectionStrategy, audit_depth: usize) -> Result<MonotoneMachine, SelectionError> {
    audit(&strategy, &BinWord::empty(), &mut Vec::new(), audit_depth)?;
    let label = format!("SELECT {strategy}");
    Ok(MonotoneMachine::new(label, Selection(strategy)))
}

fn audit(s: &SelectionStrategy, history: &BinWord, chosen: &mut Vec<usize>, left: usize) -> Result<(), SelectionError> {
    if left == 0 {
        return Ok(());
    }
    let index = s.next_index(history, chosen);
    if chosen.contains(&index) {
        return Err(SelectionError::Repeated { history: history.clone(), index });
    }
    let bound = s.fuel(history.len());
    if index >= bound {
        return Err(SelectionError::OverFuel { history: history.clone(), index, bound });
    }
    chosen.push(index);
    for b in [false, true] {
        audit(s, &history.child(b), chosen, left - 1)?;
    }
    chosen.pop();
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extractors::pushforward_is_fair;
    use crate::machine::{check_monotone, project_even};
    use crate::word::w;

    fn adaptive() -> SelectionStrategy {
        let mut map = BTreeMap::new();
        map.insert(w(""), 0);
        map.insert(w("0"), 1);
        map.insert(w("1"), 2);
        SelectionStrategy::Tree(map)
    }

    #[test]
    fn stride_one_is_identity() {
        let m = selection_machine(SelectionStrategy::Stride { stride: 1, offset: 0 }, 8).unwrap();
        for x in BinWord::all_up_to(8) {
            assert_eq!(m.step(&x), x);
        }
    }

    #[test]
    fn even_positions_match_projection() {
        let m = selection_machine(SelectionStrategy::Stride { stride: 2, offset: 0 }, 8).unwrap();
        let p = project_even();
        for x in BinWord::all_up_to(9) {
            assert_eq!(m.step(&x), p.step(&x));
        }
    }

    #[test]
    fn adaptive_tree() {
        let m = selection_machine(adaptive(), 6).unwrap();
        assert_eq!(m.step(&w("101")).prefix(2), w("11"));
        assert_eq!(m.step(&w("100")).prefix(2), w("10"));
        // After "0" index 1 is read; the fallback then takes index 2.
        assert_eq!(m.step(&w("011")), w("011"));
        assert!(check_monotone(&m, 10).is_ok());
        let fair = pushforward_is_fair(&m, 8, 4);
        assert!(fair.passed() && fair.all_exact);
    }

    #[test]
    fn audit_rejects_repeats_and_overruns() {
        let mut map = BTreeMap::new();
        map.insert(w(""), 0);
        map.insert(w("1"), 0);
        let err = selection_machine(SelectionStrategy::Tree(map), 3).unwrap_err();
        assert_eq!(err, SelectionError::Repeated { history: w("1"), index: 0 });
        let greedy = SelectionStrategy::custom("far", |h| 10 * h.len(), |s| s + 1);
        assert!(matches!(selection_machine(greedy, 3), Err(SelectionError::OverFuel { .. })));
    }

    #[test]
    fn runtime_violation_stalls() {
        let repeat = SelectionStrategy::custom("repeat", |_| 0, |_| 4);
        let m = MonotoneMachine::new("raw", Selection(repeat));
        assert_eq!(m.step(&w("1111")), w("1"));
    }
}
