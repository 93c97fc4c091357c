//! Fixtures shared by the benchmarks.

use gradperc::{sample, Configuration, ProbabilityField, Region, StripSpec};

/// A gradient strip with `ℓ = N`.
pub fn strip(n: u32, seed: u64) -> Configuration {
    let spec = StripSpec::new(n, n).expect("positive size");
    sample(&spec.field(), spec.region(), seed, 0)
}

/// A critical rhombus `[0, n]²`.
pub fn critical_square(n: i64, seed: u64) -> Configuration {
    let field = ProbabilityField::homogeneous(0.5).expect("valid probability");
    sample(&field, Region::square(n).expect("positive size"), seed, 0)
}
