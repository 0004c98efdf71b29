#![allow(dead_code)]

use proptest::prelude::*;
use torsplit_core::catalog::fan_by_name;
use torsplit_core::{Fan, TorusDivisor};

pub const SMALL: &[&str] = &["P1", "P2", "P3", "P1xP1", "F1", "F2", "BlowupP2", "P1xP1xP1"];

pub fn fan(name: &str) -> Fan {
    fan_by_name(name).expect("catalog fan")
}

pub fn small_fan() -> impl Strategy<Value = Fan> {
    prop::sample::select(SMALL).prop_map(fan)
}

/// A fan with a divisor whose coefficients lie in `[lo, hi]`.
pub fn fan_and_divisor(lo: i64, hi: i64) -> impl Strategy<Value = (Fan, TorusDivisor)> {
    small_fan().prop_flat_map(move |f| {
        let n = f.n_rays();
        (Just(f), prop::collection::vec(lo..=hi, n).prop_map(TorusDivisor::new))
    })
}
