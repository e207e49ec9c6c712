//! Particle swarm optimization over a bounded box, plus the integral square
//! error cost it minimizes when tuning the diesel controller.
//!
//! Velocity update: `v ← w·v + c1·r1·(pbest − x) + c2·r2·(gbest − x)`, then
//! `x ← x + v` clamped to the box with the velocity zeroed on any clamped
//! axis. Each particle owns a random stream derived from the master seed, so
//! results do not depend on how fitness evaluations are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trapezoidal `∫ (Δf² + ΔP_tie²) dt` over equally spaced samples.
pub fn ise(freq_series: &[f64], tie_series: &[f64], dt: f64) -> Result<f64> {
    if freq_series.is_empty() {
        return Err(Error::Domain("ISE of an empty series".into()));
    }
    if freq_series.len() != tie_series.len() {
        return Err(Error::Domain(format!(
            "series lengths differ: {} vs {}",
            freq_series.len(),
            tie_series.len()
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    let sq: Vec<f64> = freq_series
        .iter()
        .zip(tie_series)
        .map(|(f, p)| f * f + p * p)
        .collect();
    Ok(sq.windows(2).map(|w| 0.5 * (w[0] + w[1]) * dt).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsoSettings {
    pub population: usize,
    pub iterations: usize,
    pub inertia_weight: f64,
    pub cognitive: f64,
    pub social: f64,
    /// `(lo, hi)` per dimension.
    pub bounds: Vec<(f64, f64)>,
    pub seed: u64,
    /// Positions placed verbatim (after clamping) into the initial swarm.
    #[serde(default)]
    pub seeded_positions: Vec<Vec<f64>>,
}

impl PsoSettings {
    pub fn new(bounds: Vec<(f64, f64)>, seed: u64) -> Self {
        Self {
            population: 100,
            iterations: 150,
            inertia_weight: 0.729,
            cognitive: 1.494,
            social: 1.494,
            bounds,
            seed,
            seeded_positions: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population < 2 {
            return Err(Error::validation("pso.population", "must be at least 2"));
        }
        if self.iterations < 1 {
            return Err(Error::validation("pso.iterations", "must be at least 1"));
        }
        for (name, v) in [
            ("pso.inertia_weight", self.inertia_weight),
            ("pso.cognitive", self.cognitive),
            ("pso.social", self.social),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::validation(name, "must be non-negative"));
            }
        }
        if self.bounds.is_empty() {
            return Err(Error::validation(
                "pso.bounds",
                "at least one dimension required",
            ));
        }
        for (d, &(lo, hi)) in self.bounds.iter().enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::validation(
                    "pso.bounds",
                    format!("dimension {d}: need lo < hi, got [{lo}, {hi}]"),
                ));
            }
        }
        if self.seeded_positions.len() > self.population {
            return Err(Error::validation(
                "pso.seeded_positions",
                "more seeded positions than particles",
            ));
        }
        if let Some(p) = self
            .seeded_positions
            .iter()
            .find(|p| p.len() != self.bounds.len())
        {
            return Err(Error::validation(
                "pso.seeded_positions",
                format!(
                    "expected {} coordinates, got {}",
                    self.bounds.len(),
                    p.len()
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub best_position: Vec<f64>,
    pub best_cost: f64,
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoResult {
    pub best_position: Vec<f64>,
    pub best_cost: f64,
    /// Global-best cost after each iteration.
    pub trace: Vec<f64>,
    pub evaluations: usize,
    /// Candidates whose fitness was not finite.
    pub discarded: usize,
}

fn evaluate<F>(fitness: &F, swarm: &[Particle]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    #[cfg(feature = "parallel")]
    {
        swarm.par_iter().map(|p| fitness(&p.position)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        swarm.iter().map(|p| fitness(&p.position)).collect()
    }
}

/// Minimizes `fitness` over the box in `settings.bounds`.
///
/// Runs `population × iterations` evaluations. Non-finite costs are logged
/// and never become personal or global bests.
pub fn pso_optimize<F>(fitness: &F, settings: &PsoSettings) -> Result<PsoResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    settings.validate()?;
    let bounds = &settings.bounds;
    let dims = bounds.len();

    let mut swarm: Vec<Particle> = (0..settings.population)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
            rng.set_stream(i as u64);
            let position: Vec<f64> = match settings.seeded_positions.get(i) {
                Some(seed) => seed
                    .iter()
                    .zip(bounds)
                    .map(|(&x, &(lo, hi))| x.clamp(lo, hi))
                    .collect(),
                None => bounds
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..=hi))
                    .collect(),
            };
            Particle {
                best_position: position.clone(),
                position,
                velocity: vec![0.0; dims],
                best_cost: f64::INFINITY,
                rng,
            }
        })
        .collect();

    let mut best_position = swarm[0].position.clone();
    let mut best_cost = f64::INFINITY;
    let mut trace = Vec::with_capacity(settings.iterations);
    let mut evaluations = 0;
    let mut discarded = 0;

    for iteration in 0..settings.iterations {
        if iteration > 0 {
            for p in &mut swarm {
                for d in 0..dims {
                    let r1: f64 = p.rng.gen();
                    let r2: f64 = p.rng.gen();
                    let v = settings.inertia_weight * p.velocity[d]
                        + settings.cognitive * r1 * (p.best_position[d] - p.position[d])
                        + settings.social * r2 * (best_position[d] - p.position[d]);
                    let (lo, hi) = bounds[d];
                    let x = p.position[d] + v;
                    if x < lo || x > hi {
                        p.position[d] = x.clamp(lo, hi);
                        p.velocity[d] = 0.0;
                    } else {
                        p.position[d] = x;
                        p.velocity[d] = v;
                    }
                }
            }
        }

        let costs = evaluate(fitness, &swarm);
        evaluations += costs.len();

        for (p, &cost) in swarm.iter_mut().zip(&costs) {
            if !cost.is_finite() {
                discarded += 1;
                log::warn!(
                    "discarding candidate {:?}: non-finite cost {cost}",
                    p.position
                );
                continue;
            }
            if cost < p.best_cost {
                p.best_cost = cost;
                p.best_position.clone_from(&p.position);
            }
            if cost < best_cost {
                best_cost = cost;
                best_position.clone_from(&p.position);
            }
        }
        trace.push(best_cost);
    }

    Ok(PsoResult {
        best_position,
        best_cost,
        trace,
        evaluations,
        discarded,
    })
}
