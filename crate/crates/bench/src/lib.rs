//! Fixtures shared by the benchmarks.

use cantor_core::measure::{bernoulli, dirac, fair_coin, mix};
use cantor_core::rational::rat;
use cantor_core::transport::make_instance;
use cantor_core::{CylinderMeasure, PointOracle, WitnessInstance};

pub fn bernoulli_third() -> CylinderMeasure {
    bernoulli(rat(1, 3)).expect("valid parameter")
}

/// `¾λ + ¼δ₀`, the measure whose ratio to `λ` diverges along `0^∞`.
pub fn dirac_mix() -> CylinderMeasure {
    mix(vec![rat(3, 4), rat(1, 4)], vec![fair_coin(), dirac(PointOracle::constant(false))]).expect("weights sum to one")
}

pub fn lambda_dirac() -> WitnessInstance {
    let zero = PointOracle::constant(false);
    make_instance(fair_coin(), dirac(zero.clone()), zero).expect("positive mixture")
}
