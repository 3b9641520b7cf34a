//! Relative density `μ(C ∩ [x↾k]) / μ(x↾k)` of a closed set along a point.

use num_traits::Zero;

use super::{ClosedSetApprox, CylinderMeasure, MeasureError};
use crate::interval::RatInterval;
use crate::point::PointOracle;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityEntry {
    pub depth: usize,
    /// Contains the true ratio. A point when `exact` is set.
    pub enclosure: RatInterval,
    pub exact: bool,
}

/// Entries `k = 0..=n`, computed from the outer approximation
/// `level(working_depth)`. Outer approximations only bound the ratio from
/// above, so unless the set is clopen the lower end is `0`.
pub fn lebesgue_density_trace(
    mu: &CylinderMeasure,
    set: &ClosedSetApprox,
    x: &PointOracle,
    n: usize,
    working_depth: usize,
) -> Result<Vec<DensityEntry>, MeasureError> {
    if working_depth < n {
        return Err(MeasureError::WorkingDepth { working: working_depth, n });
    }
    let outer = set.level(working_depth);
    (0..=n)
        .map(|k| {
            let sigma = x.prefix(k);
            let mass = mu.eval(&sigma);
            if mass.is_zero() {
                return Err(MeasureError::ZeroMeasurePrefix(sigma));
            }
            let ratio = outer.mass_within(mu, &sigma) / mass;
            let (enclosure, exact) = if set.is_clopen() {
                (RatInterval::point(ratio), true)
            } else {
                (RatInterval::new(Rat::zero(), ratio).expect("ratio is nonnegative"), false)
            };
            Ok(DensityEntry { depth: k, enclosure, exact })
        })
        .collect()
}
