//! Ratio estimators over cycle records.
//!
//! A time average is `Σ Yᵢ / Σ Lᵢ` over cycles. Consecutive cycles share the
//! interarrival that straddles their common departure, so the records form a
//! 1-dependent sequence; the delta-method variance therefore includes the
//! lag-1 autocovariance of the residuals `Yᵢ - r Lᵢ`.

use super::CycleRecord;
use crate::error::{Error, Result};
use crate::special::chi_square_sf;
use alloc::vec;
use alloc::vec::Vec;
use libm::{pow, sqrt};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;
/// Fewest cycles accepted by the CI estimators.
pub const MIN_CYCLES: usize = 30;
/// Fewest cycles accepted by the geometric fit.
pub const MIN_CYCLES_N_FIT: usize = 10_000;

/// Point estimate with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EstimateWithCI {
    pub point: f64,
    pub half_width: f64,
    pub n_cycles: usize,
}

impl EstimateWithCI {
    pub fn std_error(&self) -> f64 {
        self.half_width / Z_95
    }

    pub fn contains(&self, value: f64) -> bool {
        (value - self.point).abs() <= self.half_width
    }
}

fn check_len(records: &[CycleRecord], needed: usize) -> Result<()> {
    if records.len() < needed {
        Err(Error::InsufficientCycles { needed, got: records.len() })
    } else {
        Ok(())
    }
}

/// Variance of the mean of a zero-mean 1-dependent residual sequence.
fn residual_mean_variance(n: usize, residual: impl Fn(usize) -> f64) -> f64 {
    let mut gamma0 = 0.0;
    let mut gamma1 = 0.0;
    let mut prev = None;
    for i in 0..n {
        let z = residual(i);
        gamma0 += z * z;
        if let Some(p) = prev {
            gamma1 += p * z;
        }
        prev = Some(z);
    }
    let dof = (n - 1) as f64;
    let long_run = (gamma0 / dof + 2.0 * gamma1 / dof).max(0.0);
    long_run / n as f64
}

fn ratio(
    records: &[CycleRecord],
    num: impl Fn(&CycleRecord) -> f64,
    den: impl Fn(&CycleRecord) -> f64,
) -> Result<EstimateWithCI> {
    check_len(records, MIN_CYCLES)?;
    let n = records.len();
    let (sy, sl) = records.iter().fold((0.0, 0.0), |(y, l), r| (y + num(r), l + den(r)));
    let r = sy / sl;
    let mean_l = sl / n as f64;
    let var = residual_mean_variance(n, |i| num(&records[i]) - r * den(&records[i]));
    Ok(EstimateWithCI { point: r, half_width: Z_95 * sqrt(var) / mean_l, n_cycles: n })
}

/// Stationary mean relative age, `Σ ∫Δ / Σ length`.
pub fn estimate_delta_bar(records: &[CycleRecord]) -> Result<EstimateWithCI> {
    ratio(records, |r| r.delta_integral, |r| r.length)
}

/// Stationary mean age, `Σ ∫AoI / Σ length`.
pub fn estimate_aoi_bar(records: &[CycleRecord]) -> Result<EstimateWithCI> {
    ratio(records, |r| r.aoi_integral, |r| r.length)
}

/// Successful departures per unit time (one per cycle).
pub fn estimate_throughput(records: &[CycleRecord]) -> Result<EstimateWithCI> {
    ratio(records, |_| 1.0, |r| r.length)
}

/// Mean departure-to-departure time.
pub fn estimate_mean_cycle(records: &[CycleRecord]) -> Result<EstimateWithCI> {
    check_len(records, MIN_CYCLES)?;
    let n = records.len();
    let mean = records.iter().map(|r| r.length).sum::<f64>() / n as f64;
    let var = residual_mean_variance(n, |i| records[i].length - mean);
    Ok(EstimateWithCI { point: mean, half_width: Z_95 * sqrt(var), n_cycles: n })
}

/// Empirical law of the push-out count `N` and its fit to `Geometric(ζ)`,
/// `P(N = n) = (1 - ζ)ⁿ ζ`.
#[derive(Debug, Clone, PartialEq)]
pub struct NDistribution {
    /// `counts[n]` cycles had `N = n`.
    pub counts: Vec<u64>,
    pub n_cycles: usize,
    pub zeta: f64,
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
}

impl NDistribution {
    pub fn frequency(&self, n: usize) -> f64 {
        self.counts.get(n).copied().unwrap_or(0) as f64 / self.n_cycles as f64
    }

    /// Expected count in bin `n` under the fitted geometric law.
    pub fn expected(&self, n: usize) -> f64 {
        self.n_cycles as f64 * self.zeta * pow(1.0 - self.zeta, n as f64)
    }
}

/// Histogram of `N` with a chi-square statistic against `Geometric(zeta)`.
///
/// Cells `N = 0, 1, …` are kept while they and the remaining tail expect at
/// least five cycles; the rest is pooled into one tail cell. `zeta` is given,
/// not fitted, so the statistic has `cells - 1` degrees of freedom.
pub fn empirical_n_distribution(records: &[CycleRecord], zeta: f64) -> Result<NDistribution> {
    check_len(records, MIN_CYCLES_N_FIT)?;
    if !(zeta > 0.0 && zeta <= 1.0) {
        return Err(Error::InvalidParameter("geometric parameter must lie in (0, 1]"));
    }
    let n_cycles = records.len();
    let max_n = records.iter().map(|r| r.n_extra_arrivals).max().unwrap_or(0) as usize;
    let mut counts = vec![0u64; max_n + 1];
    for r in records {
        counts[r.n_extra_arrivals as usize] += 1;
    }

    let m = n_cycles as f64;
    let (chi_square, dof) = if zeta >= 1.0 {
        let stat = if max_n == 0 { 0.0 } else { f64::INFINITY };
        (stat, 0)
    } else {
        let q = 1.0 - zeta;
        let mut stat = 0.0;
        let mut cells = 0usize;
        let mut observed_below = 0u64;
        let mut k = 0usize;
        loop {
            let expected = m * zeta * pow(q, k as f64);
            let tail_after = m * pow(q, (k + 1) as f64);
            if expected < 5.0 || tail_after < 5.0 {
                break;
            }
            let observed = counts.get(k).copied().unwrap_or(0);
            let diff = observed as f64 - expected;
            stat += diff * diff / expected;
            observed_below += observed;
            cells += 1;
            k += 1;
        }
        let tail_expected = m * pow(q, k as f64);
        let tail_observed = n_cycles as u64 - observed_below;
        let diff = tail_observed as f64 - tail_expected;
        stat += diff * diff / tail_expected;
        cells += 1;
        (stat, cells - 1)
    };
    Ok(NDistribution {
        counts,
        n_cycles,
        zeta,
        chi_square,
        dof,
        p_value: chi_square_sf(chi_square, dof),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DistributionSpec;
    use crate::sim::{run_cycles, ModelSpec};

    fn det_model() -> ModelSpec {
        ModelSpec::new(
            DistributionSpec::deterministic(2.0).unwrap(),
            DistributionSpec::deterministic(1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn deterministic_estimates_are_exact() {
        let recs = run_cycles(&det_model(), 100, 3).unwrap();
        let d = estimate_delta_bar(&recs).unwrap();
        assert_eq!((d.point, d.half_width, d.n_cycles), (1.0, 0.0, 100));
        assert_eq!(estimate_aoi_bar(&recs).unwrap().point, 2.0);
        assert_eq!(estimate_throughput(&recs).unwrap().point, 0.5);
        assert_eq!(estimate_mean_cycle(&recs).unwrap().point, 2.0);
    }

    #[test]
    fn too_few_cycles() {
        let recs = run_cycles(&det_model(), 29, 3).unwrap();
        assert_eq!(
            estimate_delta_bar(&recs),
            Err(Error::InsufficientCycles { needed: 30, got: 29 })
        );
        assert!(matches!(
            empirical_n_distribution(&recs, 1.0),
            Err(Error::InsufficientCycles { needed: 10_000, .. })
        ));
    }

    #[test]
    fn deterministic_n_is_always_zero() {
        let recs = run_cycles(&det_model(), 10_000, 3).unwrap();
        let h = empirical_n_distribution(&recs, 1.0).unwrap();
        assert_eq!(h.frequency(0), 1.0);
        assert_eq!(h.p_value, 1.0);
    }

    #[test]
    fn chi_square_of_exact_geometric_counts_is_small() {
        // Hand-built records following ζ = 1/2 exactly in the first cells.
        let mut recs = Vec::new();
        let blank = CycleRecord {
            idle: 1.0,
            n_extra_arrivals: 0,
            busy: 1.0,
            delta_integral: 1.0,
            aoi_integral: 2.0,
            length: 2.0,
        };
        for (n, count) in [(0u64, 8192usize), (1, 4096), (2, 2048), (3, 1024), (4, 512), (5, 256), (6, 128), (7, 64), (8, 32), (9, 16), (10, 8), (11, 8)] {
            recs.extend(core::iter::repeat_n(CycleRecord { n_extra_arrivals: n, ..blank }, count));
        }
        let h = empirical_n_distribution(&recs, 0.5).unwrap();
        assert!(h.chi_square < 1e-6, "{}", h.chi_square);
        assert!(h.p_value > 0.999);
        assert!(h.dof >= 8);
    }
}
