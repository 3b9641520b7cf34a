use crate::machine::{MachineKernel, MonotoneMachine};
use crate::word::BinWord;

struct VonNeumann;

impl MachineKernel for VonNeumann {
    fn step(&self, input: &BinWord) -> BinWord {
        let bits = input.bits();
        BinWord::from_bits(bits.chunks_exact(2).filter(|p| p[0] != p[1]).map(|p| p[0]))
    }

    fn residual_key(&self, input: &BinWord) -> Option<u64> {
        // Only a dangling half-block carries over.
        match input.len() % 2 {
            0 => Some(0),
            _ => Some(1 + input.last().map_or(0, u64::from)),
        }
    }
}

/// Reads two-bit blocks: `01 ↦ 0`, `10 ↦ 1`, `00` and `11` are discarded.
pub fn von_neumann() -> MonotoneMachine {
    MonotoneMachine::new("VN", VonNeumann)
}
