//! Simulation-versus-closed-form validation.
//!
//! A metric passes when `|analytic - simulated| <= max(k_sigma · σ, abs_floor)`,
//! where `σ` combines the simulation standard error (half-width / 1.96) with
//! the analytic side's own uncertainty (zero for closed forms, the quadrature
//! tolerance, or Monte Carlo standard errors).

use crate::format::{law, num, sig};
use pushout_aoi_core::analytic::{AnalyticReport, ReportMethod};
use pushout_aoi_core::dist::{DistributionSpec, OracleConfig};
use pushout_aoi_core::sim::{
    self, empirical_n_distribution, estimate_aoi_bar, estimate_delta_bar, estimate_mean_cycle,
    estimate_throughput, EstimateWithCI, ModelSpec, SimConfig, MIN_CYCLES_N_FIT, Z_95,
};
use pushout_aoi_core::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateConfig {
    pub oracle: OracleConfig,
    pub sim: SimConfig,
    pub k_sigma: f64,
    pub abs_floor: f64,
    /// Smallest acceptable chi-square p-value for the geometric fit of `N`.
    pub min_p_value: f64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            oracle: OracleConfig::default(),
            sim: SimConfig::default(),
            k_sigma: 3.0,
            abs_floor: 1e-9,
            min_p_value: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub name: String,
    pub analytic_value: f64,
    pub sim_point: f64,
    pub sim_half_width: f64,
    pub z_score: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricFit {
    pub chi_square: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub model: ModelSpec,
    pub n_cycles: usize,
    pub seed: u64,
    pub analytic_method: ReportMethod,
    /// The analytic side is a Monte Carlo estimate; its variance is folded into σ.
    pub oracle_uncertainty: bool,
    pub rows: Vec<MetricRow>,
    /// Present when enough cycles were simulated for the fit.
    pub geometric_fit: Option<GeometricFit>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn row(&self, name: &str) -> Option<&MetricRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Copy with every float rounded to the report precision.
    pub fn rounded(&self) -> Self {
        let mut out = self.clone();
        for r in &mut out.rows {
            r.analytic_value = sig(r.analytic_value);
            r.sim_point = sig(r.sim_point);
            r.sim_half_width = sig(r.sim_half_width);
            r.z_score = sig(r.z_score);
        }
        if let Some(g) = &mut out.geometric_fit {
            g.chi_square = sig(g.chi_square);
            g.p_value = sig(g.p_value);
        }
        out
    }

    /// Human-readable aligned table.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "model    X = {}  S = {}", law(&self.model.interarrival), law(&self.model.service));
        let _ = writeln!(
            s,
            "cycles   {}  seed {}  analytic {}{}",
            self.n_cycles,
            self.seed,
            self.analytic_method.as_str(),
            if self.oracle_uncertainty { " (monte carlo)" } else { "" }
        );
        let _ = writeln!(
            s,
            "{:<12} {:>14} {:>14} {:>14} {:>10}  pass",
            "metric", "analytic", "simulated", "±95%", "z"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<12} {:>14} {:>14} {:>14} {:>10}  {}",
                r.name,
                num(r.analytic_value),
                num(r.sim_point),
                num(r.sim_half_width),
                format!("{:.3}", r.z_score),
                if r.pass { "yes" } else { "NO" }
            );
        }
        if let Some(g) = &self.geometric_fit {
            let _ = writeln!(s, "geometric N fit: chi2 = {} on {} dof, p = {}", num(g.chi_square), g.dof, num(g.p_value));
        }
        let _ = writeln!(s, "result   {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

fn compare(name: &str, analytic: f64, analytic_sigma: f64, est: &EstimateWithCI, cfg: &ValidateConfig) -> MetricRow {
    let sigma = est.std_error().hypot(analytic_sigma);
    let diff = est.point - analytic;
    let z_score = if sigma > 0.0 {
        diff / sigma
    } else if diff.abs() <= cfg.abs_floor {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    MetricRow {
        name: name.to_owned(),
        analytic_value: analytic,
        sim_point: est.point,
        sim_half_width: est.half_width,
        z_score,
        pass: diff.abs() <= (cfg.k_sigma * sigma).max(cfg.abs_floor),
    }
}

/// Simulates `n_cycles` cycles and compares relative age, age, throughput,
/// mean cycle and `P(N = 0)` (plus the geometric fit of `N`) with the closed forms.
pub fn validate(model: &ModelSpec, n_cycles: usize, seed: u64, cfg: &ValidateConfig) -> Result<ValidationReport> {
    let analytic = AnalyticReport::evaluate(&model.interarrival, &model.service, &cfg.oracle)?;
    let sim_cfg = SimConfig { oracle: cfg.oracle, ..cfg.sim };
    let records = sim::run_cycles_with(model, n_cycles, seed, &sim_cfg)?;

    let mean_x = model.interarrival.mean();
    let (s_delta, s_zeta) = match (analytic.oracle_std_errors, analytic.method) {
        (Some(se), _) => (se.delta_bar, se.zeta),
        (None, ReportMethod::Oracle) => (cfg.oracle.tol, cfg.oracle.tol),
        (None, ReportMethod::ClosedForm) => (0.0, 0.0),
    };
    let s_cycle = mean_x * s_zeta / (analytic.zeta * analytic.zeta);
    let s_throughput = s_zeta / mean_x;

    let mut rows = vec![
        compare("delta_bar", analytic.delta_bar, s_delta, &estimate_delta_bar(&records)?, cfg),
        compare("aoi_bar", analytic.aoi_bar, s_delta, &estimate_aoi_bar(&records)?, cfg),
        compare("throughput", analytic.throughput, s_throughput, &estimate_throughput(&records)?, cfg),
        compare("mean_cycle", analytic.mean_cycle, s_cycle, &estimate_mean_cycle(&records)?, cfg),
    ];

    // P(N = 0) = ζ; the counts N are independent across cycles.
    let n = records.len();
    let p0 = records.iter().filter(|r| r.n_extra_arrivals == 0).count() as f64 / n as f64;
    let p0_est = EstimateWithCI { point: p0, half_width: Z_95 * (p0 * (1.0 - p0) / n as f64).sqrt(), n_cycles: n };
    let mut zeta_row = compare("zeta", analytic.zeta, s_zeta, &p0_est, cfg);

    let geometric_fit = if n >= MIN_CYCLES_N_FIT {
        let h = empirical_n_distribution(&records, analytic.zeta)?;
        zeta_row.pass &= h.p_value > cfg.min_p_value;
        Some(GeometricFit { chi_square: h.chi_square, dof: h.dof, p_value: h.p_value })
    } else {
        None
    };
    rows.push(zeta_row);

    Ok(ValidationReport {
        model: *model,
        n_cycles: n,
        seed,
        analytic_method: analytic.method,
        oracle_uncertainty: analytic.oracle_std_errors.is_some(),
        rows,
        geometric_fit,
    })
}

/// Model families with a closed-form `Δ̄ = 1/δ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Deterministic arrivals every `1/β`, exponential service.
    Dm,
    /// Exponential arrivals and service.
    Mm,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Dm => "dm",
            Family::Mm => "mm",
        }
    }

    pub fn model(&self, beta: f64, delta: f64) -> Result<ModelSpec> {
        let x = match self {
            Family::Dm => DistributionSpec::deterministic(1.0 / beta)?,
            Family::Mm => DistributionSpec::exponential(beta)?,
        };
        ModelSpec::new(x, DistributionSpec::exponential(delta)?)
    }
}

/// One CSV row: `family,rho,beta,delta,metric,analytic,sim_point,sim_half_width,z,pass`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: Family,
    pub rho: f64,
    pub beta: f64,
    pub delta: f64,
    pub metric: String,
    pub analytic: f64,
    pub sim_point: f64,
    pub sim_half_width: f64,
    pub z: f64,
    pub pass: bool,
}

pub const SWEEP_HEADER: &str = "family,rho,beta,delta,metric,analytic,sim_point,sim_half_width,z,pass";

/// Validates the family at each load `ρ = β/δ`, in parallel.
///
/// Point `i` uses seed `seed + i`. A point that fails to evaluate yields a
/// single `error` row with `pass = false`; the other points still run.
pub fn sweep(
    family: Family,
    rho_values: &[f64],
    delta: f64,
    n_cycles: usize,
    seed: u64,
    cfg: &ValidateConfig,
) -> Result<Vec<SweepRow>> {
    if rho_values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one load value"));
    }
    let per_point: Vec<Vec<SweepRow>> = rho_values
        .par_iter()
        .enumerate()
        .map(|(i, &rho)| {
            let beta = rho * delta;
            let report = family
                .model(beta, delta)
                .and_then(|m| validate(&m, n_cycles, seed.wrapping_add(i as u64), cfg));
            let row = |metric: &str, analytic, sim_point, sim_half_width, z, pass| SweepRow {
                family,
                rho,
                beta,
                delta,
                metric: metric.to_owned(),
                analytic,
                sim_point,
                sim_half_width,
                z,
                pass,
            };
            match report {
                Ok(r) => r
                    .rows
                    .iter()
                    .map(|m| row(&m.name, m.analytic_value, m.sim_point, m.sim_half_width, m.z_score, m.pass))
                    .collect(),
                Err(_) => vec![row("error", f64::NAN, f64::NAN, f64::NAN, f64::NAN, false)],
            }
        })
        .collect();
    Ok(per_point.into_iter().flatten().collect())
}

/// Writes sweep rows as CSV with report precision.
pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(SweepRow {
            rho: sig(r.rho),
            beta: sig(r.beta),
            delta: sig(r.delta),
            analytic: sig(r.analytic),
            sim_point: sig(r.sim_point),
            sim_half_width: sig(r.sim_half_width),
            z: sig(r.z),
            ..r.clone()
        })?;
    }
    w.flush()?;
    Ok(())
}
