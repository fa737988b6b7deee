//! Number formatting shared by every text output.

use pushout_aoi_core::DistributionSpec;

/// Significant digits used in reports.
pub const SIG_DIGITS: usize = 9;

/// Rounds to [`SIG_DIGITS`] significant digits. Non-finite values pass through.
pub fn sig(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{:.*e}", SIG_DIGITS - 1, v).parse().unwrap_or(v)
}

/// Shortest decimal form of `sig(v)`, e.g. `0.632120559`.
pub fn num(v: f64) -> String {
    format!("{}", sig(v))
}

/// Flag-grammar form of a law: `det:1`, `exp:2`, `unif:0,2`, `gamma:2,2`.
pub fn law(spec: &DistributionSpec) -> String {
    match *spec {
        DistributionSpec::Deterministic { value } => format!("det:{value}"),
        DistributionSpec::Exponential { rate } => format!("exp:{rate}"),
        DistributionSpec::Uniform { low, high } => format!("unif:{low},{high}"),
        DistributionSpec::Gamma { shape, rate } => format!("gamma:{shape},{rate}"),
    }
}
