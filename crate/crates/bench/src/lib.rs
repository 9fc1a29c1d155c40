//! Benchmark fixtures.

use gfn_core::exact_algebra::rat;
use gfn_core::milnor_ring::build_model;
use gfn_core::{ModelName, Precision, SAssignment, SingularityModel};
use rug::{Complex, Float};

pub const DIGITS: [u32; 3] = [32, 64, 128];

pub fn precision(digits: u32) -> Precision {
    Precision::new(digits).expect("bench precision is valid")
}

/// Marginal point `s = 1/2` with a jet on `s₇`.
pub fn e6_jet_point() -> (SingularityModel, SAssignment) {
    let model = build_model(ModelName::E6t);
    let point = SAssignment::marginal(&model, rat(1, 2)).with_jet(7);
    (model, point)
}

pub fn half(prec: Precision) -> Float {
    prec.rat(&rat(1, 2))
}

pub fn tau(prec: Precision) -> Complex {
    Complex::with_val(prec.bits(), (0.125, 1.75))
}
