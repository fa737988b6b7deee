//! Regenerative sample-path simulation of the GI/GI/1/1-PO server.
//!
//! Successful departures are regeneration points. A cycle runs from one
//! departure `D'` to the next `D`: an idle period until the next arrival,
//! then a busy period in which every arrival pushes out the message in
//! service, ending with the first service that completes before the next
//! arrival.
//!
//! Both ages are piecewise linear between events, so their integrals are
//! accumulated exactly per segment:
//!
//! * relative age `Δ(t) = A(t) - A(D(t))` is zero while idle, jumps to the
//!   full interarrival straddling `D'` at the first arrival, and grows by
//!   each push-out gap afterwards;
//! * age `AoI(t) = Δ(t) + (t - A(t))` adds the sawtooth age of the latest
//!   arrival.

mod estimate;

pub use estimate::{
    empirical_n_distribution, estimate_aoi_bar, estimate_delta_bar, estimate_mean_cycle,
    estimate_throughput, EstimateWithCI, NDistribution, MIN_CYCLES, MIN_CYCLES_N_FIT, Z_95,
};

use crate::dist::{pair_quantities, DistributionSpec, OracleConfig, Sampler};
use crate::error::{Divergence, Error, Result};
use alloc::vec::Vec;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

/// A GI/GI/1/1-PO instance with independent interarrival and service times.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModelSpec {
    /// `X`
    pub interarrival: DistributionSpec,
    /// `S`
    pub service: DistributionSpec,
}

impl ModelSpec {
    pub fn new(interarrival: DistributionSpec, service: DistributionSpec) -> Result<Self> {
        Ok(Self { interarrival: interarrival.validate()?, service: service.validate()? })
    }

    /// Both laws with all times multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.interarrival.scaled(c)?, self.service.scaled(c)?)
    }
}

/// One departure-to-departure cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CycleRecord {
    /// Idle time `J₀` after the previous departure.
    pub idle: f64,
    /// Arrivals during the busy period, not counting the one that starts it.
    pub n_extra_arrivals: u64,
    /// Busy time `J₁ + … + J_{N+1}`.
    pub busy: f64,
    /// `∫ Δ(t) dt` over the cycle.
    pub delta_integral: f64,
    /// `∫ AoI(t) dt` over the cycle.
    pub aoi_integral: f64,
    /// `idle + busy`.
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Abort a cycle (and the run) after this many push-outs.
    pub max_events_per_cycle: u64,
    /// Refuse to simulate models whose `P(X > S)` is below this. `0` disables the check.
    pub zeta_floor: f64,
    /// Used for the `P(X > S)` check only.
    pub oracle: OracleConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self { max_events_per_cycle: 1_000_000_000, zeta_floor: 1e-6, oracle: OracleConfig::default() }
    }
}

/// Receives the sample path of each cycle. Times are relative to the
/// departure epoch that opens the cycle.
pub trait PathObserver {
    /// `last_arrival` is the (non-positive) arrival time of the message that
    /// just departed.
    fn cycle_start(&mut self, _last_arrival: f64) {}
    /// An arrival at `at`; `delta` is the relative age from `at` onwards.
    fn arrival(&mut self, _at: f64, _delta: f64) {}
    fn departure(&mut self, _at: f64) {}
}

impl PathObserver for () {}

/// Event-driven simulator positioned at a departure epoch.
#[derive(Debug, Clone)]
pub struct Simulator {
    rng: ChaCha8Rng,
    interarrival: Sampler,
    service: Sampler,
    max_events: u64,
    /// Time since the departed message arrived (its completed service).
    since_arrival: f64,
    /// Time until the next arrival.
    until_arrival: f64,
}

impl Simulator {
    /// Seeds the stream and runs one unrecorded priming busy period so the
    /// first recorded cycle starts at a departure like every other.
    pub fn new(model: &ModelSpec, seed: u64, config: &SimConfig) -> Result<Self> {
        let model = ModelSpec::new(model.interarrival, model.service)?;
        if config.zeta_floor > 0.0 {
            let pq = pair_quantities(&model.interarrival, &model.service, &config.oracle)?;
            if !(pq.zeta >= config.zeta_floor) {
                return Err(Error::FreshnessDiverges(Divergence::Zeta(pq.zeta)));
            }
        }
        let mut sim = Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            interarrival: model.interarrival.sampler(),
            service: model.service.sampler(),
            max_events: config.max_events_per_cycle,
            since_arrival: 0.0,
            until_arrival: 0.0,
        };
        sim.prime()?;
        Ok(sim)
    }

    fn prime(&mut self) -> Result<()> {
        let mut events = 0u64;
        loop {
            let service = self.service.sample(&mut self.rng);
            let gap = self.interarrival.sample(&mut self.rng);
            if service < gap {
                self.since_arrival = service;
                self.until_arrival = gap - service;
                return Ok(());
            }
            events += 1;
            if events >= self.max_events {
                return Err(Error::FreshnessDiverges(Divergence::EventLimit(self.max_events)));
            }
        }
    }

    pub fn next_cycle(&mut self) -> Result<CycleRecord> {
        self.next_cycle_observed(&mut ())
    }

    pub fn next_cycle_observed<O: PathObserver + ?Sized>(&mut self, observer: &mut O) -> Result<CycleRecord> {
        let age0 = self.since_arrival;
        let idle = self.until_arrival;
        observer.cycle_start(-age0);

        // Idle: Δ = 0, the latest-arrival age runs from age0 to age0 + idle.
        let mut delta_integral = 0.0;
        let mut aoi_integral = idle * (age0 + 0.5 * idle);
        let mut delta = age0 + idle;
        let mut elapsed = idle;
        observer.arrival(elapsed, delta);

        let mut busy = 0.0;
        let mut pushed_out = 0u64;
        loop {
            let service = self.service.sample(&mut self.rng);
            let gap = self.interarrival.sample(&mut self.rng);
            // Equal times: the arrival wins and pushes the message out.
            if service < gap {
                delta_integral += delta * service;
                aoi_integral += service * (delta + 0.5 * service);
                busy += service;
                observer.departure(elapsed + service);
                self.since_arrival = service;
                self.until_arrival = gap - service;
                break;
            }
            delta_integral += delta * gap;
            aoi_integral += gap * (delta + 0.5 * gap);
            busy += gap;
            delta += gap;
            elapsed += gap;
            pushed_out += 1;
            observer.arrival(elapsed, delta);
            if pushed_out >= self.max_events {
                return Err(Error::FreshnessDiverges(Divergence::EventLimit(self.max_events)));
            }
        }

        Ok(CycleRecord {
            idle,
            n_extra_arrivals: pushed_out,
            busy,
            delta_integral,
            aoi_integral,
            length: idle + busy,
        })
    }
}

/// Simulate `n_cycles` consecutive cycles with the default [`SimConfig`].
pub fn run_cycles(model: &ModelSpec, n_cycles: usize, seed: u64) -> Result<Vec<CycleRecord>> {
    run_cycles_with(model, n_cycles, seed, &SimConfig::default())
}

pub fn run_cycles_with(
    model: &ModelSpec,
    n_cycles: usize,
    seed: u64,
    config: &SimConfig,
) -> Result<Vec<CycleRecord>> {
    run_cycles_observed(model, n_cycles, seed, config, &mut ())
}

pub fn run_cycles_observed<O: PathObserver + ?Sized>(
    model: &ModelSpec,
    n_cycles: usize,
    seed: u64,
    config: &SimConfig,
    observer: &mut O,
) -> Result<Vec<CycleRecord>> {
    if n_cycles == 0 {
        return Err(Error::InsufficientCycles { needed: 1, got: 0 });
    }
    let mut sim = Simulator::new(model, seed, config)?;
    let mut records = Vec::with_capacity(n_cycles);
    for _ in 0..n_cycles {
        records.push(sim.next_cycle_observed(observer)?);
    }
    Ok(records)
}
