//! Closed-form stationary averages of the GI/GI/1/1-PO server.
//!
//! With `ζ = P(X > S)`:
//!
//! * relative age `Δ̄ = E(X ∧ S) / ζ`
//! * age `AoI̅ = Δ̄ + E X² / (2 E X)`
//! * mean departure-to-departure cycle `E X / ζ`, throughput its reciprocal.

use crate::dist::{
    dm_e_s_given_x_gt_s, pair_quantities, DistributionSpec, Method, OracleConfig, PairQuantities,
    PairStdErrors, PartialMeans,
};
use crate::error::{Divergence, Error, Result};
use crate::quad;
use libm::expm1;

/// Below this `ζ` the analytic averages are reported as divergent.
pub const ZETA_FLOOR: f64 = 1e-12;

/// Provenance of an [`AnalyticReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ReportMethod {
    ClosedForm,
    /// Quadrature or Monte Carlo.
    Oracle,
}

impl ReportMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReportMethod::ClosedForm => "closed_form",
            ReportMethod::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnalyticReport {
    pub zeta: f64,
    pub mean_min: f64,
    pub delta_bar: f64,
    pub aoi_bar: f64,
    pub mean_cycle: f64,
    pub throughput: f64,
    pub method: ReportMethod,
    /// Set when the pair quantities came from Monte Carlo.
    #[cfg_attr(feature = "serde", serde(skip))]
    pub oracle_std_errors: Option<PairStdErrors>,
}

impl AnalyticReport {
    pub fn evaluate(x: &DistributionSpec, s: &DistributionSpec, config: &OracleConfig) -> Result<Self> {
        let pair = pair_quantities(x, s, config)?;
        Self::from_pair(x, &pair)
    }

    pub fn from_pair(x: &DistributionSpec, pair: &PairQuantities) -> Result<Self> {
        let zeta = pair.zeta;
        if !(zeta >= ZETA_FLOOR) {
            return Err(Error::FreshnessDiverges(Divergence::Zeta(zeta)));
        }
        let (mean_x, second_x) = x.moments();
        let delta_bar = pair.mean_min / zeta;
        let mean_cycle = mean_x / zeta;
        Ok(Self {
            zeta,
            mean_min: pair.mean_min,
            delta_bar,
            aoi_bar: delta_bar + second_x / (2.0 * mean_x),
            mean_cycle,
            throughput: 1.0 / mean_cycle,
            method: match pair.method {
                Method::ClosedForm => ReportMethod::ClosedForm,
                Method::Quadrature | Method::MonteCarlo => ReportMethod::Oracle,
            },
            oracle_std_errors: pair.std_errors,
        })
    }
}

fn report(x: &DistributionSpec, s: &DistributionSpec) -> Result<AnalyticReport> {
    AnalyticReport::evaluate(x, s, &OracleConfig::default())
}

/// Stationary mean relative age `E(X ∧ S) / P(X > S)`.
pub fn delta_bar(x: &DistributionSpec, s: &DistributionSpec) -> Result<f64> {
    report(x, s).map(|r| r.delta_bar)
}

/// Stationary mean age, `Δ̄ + E X² / (2 E X)`.
pub fn aoi_bar(x: &DistributionSpec, s: &DistributionSpec) -> Result<f64> {
    report(x, s).map(|r| r.aoi_bar)
}

/// Mean time between successful departures, `E X / P(X > S)`.
pub fn mean_cycle(x: &DistributionSpec, s: &DistributionSpec) -> Result<f64> {
    report(x, s).map(|r| r.mean_cycle)
}

/// Rate of successful departures.
pub fn throughput(x: &DistributionSpec, s: &DistributionSpec) -> Result<f64> {
    report(x, s).map(|r| r.throughput)
}

/// Mean relative age for deterministic interarrivals `1/β`, evaluated as
/// `E(S | S < 1/β) + (1/β) · P(S > 1/β) / P(S < 1/β)` straight from the law of `S`.
pub fn dgi_delta_bar(beta: f64, s: &DistributionSpec, config: &OracleConfig) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::InvalidParameter("arrival rate must be positive and finite"));
    }
    let s = s.validate()?;
    let period = 1.0 / beta;
    let (p_below, p_above) = match s {
        DistributionSpec::Deterministic { value } if value < period => (1.0, 0.0),
        DistributionSpec::Deterministic { .. } => (0.0, 1.0),
        _ => (s.cdf(period), s.survival(period)),
    };
    if !(p_below >= ZETA_FLOOR) {
        return Err(Error::FreshnessDiverges(Divergence::Zeta(p_below)));
    }
    let served_mean = match s {
        DistributionSpec::Deterministic { value } => value,
        DistributionSpec::Exponential { rate } => dm_e_s_given_x_gt_s(beta, rate),
        _ => {
            let (lo, hi) = s.support();
            let top = hi.min(period);
            let q = quad::integrate(
                |v| v * s.pdf(v).unwrap_or(0.0),
                lo,
                top,
                config.tol,
                config.max_panels,
            );
            if !q.converged(config.tol) {
                return Err(Error::OracleNotConverged { estimate: q.error, tol: config.tol });
            }
            q.value / p_below
        }
    };
    Ok(served_mean + period * p_above / p_below)
}

/// Throughput of the D/M/1/1-PO server.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmThroughput {
    /// `β (1 - e^{-δ/β})`
    pub exact: f64,
    /// `δ (1 - 1/(2ρ))`
    pub first_order: f64,
    /// Bound `δ / (6ρ²)` on `|exact - first_order|`.
    pub remainder_bound: f64,
}

pub fn dm_throughput_expansion(beta: f64, delta: f64) -> DmThroughput {
    let rho = beta / delta;
    DmThroughput {
        exact: -beta * expm1(-delta / beta),
        first_order: delta * (1.0 - 1.0 / (2.0 * rho)),
        remainder_bound: delta / (6.0 * rho * rho),
    }
}

/// Exponential interarrivals (rate `β`) against exponential service (rate `δ`).
pub fn mm_quantities(beta: f64, delta: f64) -> PairQuantities {
    let total = beta + delta;
    let zeta = delta / total;
    let short = 1.0 / total;
    let long = 1.0 / beta + 1.0 / total;
    debug_assert!(((long - short) - 1.0 / beta).abs() <= 1e-12 * (1.0 / beta).max(1.0));
    PairQuantities {
        zeta,
        mean_min: short,
        partial: PartialMeans {
            s_when_x_gt_s: zeta * short,
            x_when_s_gt_x: (1.0 - zeta) * short,
            x_when_x_gt_s: zeta * long,
        },
        method: Method::ClosedForm,
        error_bound: 0.0,
        std_errors: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: f64) -> DistributionSpec {
        DistributionSpec::deterministic(v).unwrap()
    }
    fn e(r: f64) -> DistributionSpec {
        DistributionSpec::exponential(r).unwrap()
    }

    #[test]
    fn mm_and_dm_relative_age_is_mean_service() {
        assert_eq!(delta_bar(&e(1.0), &e(1.0)).unwrap(), 1.0);
        assert!((delta_bar(&d(1.0), &e(1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(delta_bar(&d(2.0), &d(1.0)).unwrap(), 1.0);
    }

    #[test]
    fn age_adds_residual_interarrival() {
        assert_eq!(aoi_bar(&e(1.0), &e(1.0)).unwrap(), 2.0);
        assert!((aoi_bar(&d(1.0), &e(1.0)).unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(aoi_bar(&d(2.0), &d(1.0)).unwrap(), 2.0);
    }

    #[test]
    fn cycle_and_throughput() {
        assert_eq!(mean_cycle(&e(1.0), &e(1.0)).unwrap(), 2.0);
        assert_eq!(throughput(&e(1.0), &e(1.0)).unwrap(), 0.5);
        let t = throughput(&d(1.0), &e(1.0)).unwrap();
        assert!((t - 0.632_120_558_828_557_7).abs() < 1e-15);
        assert_eq!(mean_cycle(&d(2.0), &d(1.0)).unwrap(), 2.0);
    }

    #[test]
    fn zero_zeta_diverges() {
        assert!(matches!(
            delta_bar(&d(1.0), &d(2.0)),
            Err(Error::FreshnessDiverges(Divergence::Zeta(z))) if z == 0.0
        ));
        assert!(matches!(
            dgi_delta_bar(1.0, &d(2.0), &OracleConfig::default()),
            Err(Error::FreshnessDiverges(_))
        ));
    }

    #[test]
    fn dgi_named_cases() {
        let cfg = OracleConfig::default();
        assert!((dgi_delta_bar(1.0, &e(1.0), &cfg).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(dgi_delta_bar(0.5, &d(1.0), &cfg).unwrap(), 1.0);
    }

    #[test]
    fn expansion_named_cases() {
        let t = dm_throughput_expansion(1.0, 1.0);
        assert!((t.exact - 0.632_120_558_828_557_7).abs() < 1e-15);
        let t = dm_throughput_expansion(100.0, 1.0);
        assert!((t.exact - t.first_order).abs() <= t.remainder_bound);
        assert!((dm_throughput_expansion(1e9, 1.0).exact - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mm_closed_forms() {
        let q = mm_quantities(1.0, 1.0);
        assert_eq!(q.zeta, 0.5);
        assert_eq!(q.e_s_given_x_gt_s(), Some(0.5));
        assert_eq!(q.e_x_given_s_gt_x(), Some(0.5));
        assert_eq!(q.e_x_given_x_gt_s(), Some(1.5));
        assert_eq!(q.e_idle(), Some(1.0));
        assert!((mm_quantities(1.0, 2.0).zeta - 2.0 / 3.0).abs() < 1e-16);
    }
}
