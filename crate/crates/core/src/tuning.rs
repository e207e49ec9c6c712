//! PSO tuning of the diesel controller against the ISE of a scenario.

use crate::diesel::Gains;
use crate::error::Result;
use crate::pso::{pso_optimize, PsoResult, PsoSettings};
use crate::runner::simulate_ise;
use crate::scenario::Scenario;

/// Cost given to candidates whose simulation fails.
pub const DIVERGENCE_PENALTY: f64 = 1e6;

/// ISE of `[kp, ki, r]` on the scenario; diverging or invalid candidates
/// cost [`DIVERGENCE_PENALTY`].
pub fn evaluate_candidate(scenario: &Scenario, position: &[f64]) -> f64 {
    if position.len() != 3 {
        return DIVERGENCE_PENALTY;
    }
    match simulate_ise(scenario, Gains::from_slice(position)) {
        Ok(cost) if cost.is_finite() => cost,
        _ => DIVERGENCE_PENALTY,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuneReport {
    pub gains: Gains,
    pub best_cost: f64,
    pub trace: Vec<f64>,
    pub evaluations: usize,
    pub discarded: usize,
    /// ISE of each seeded reference gain set.
    pub references: Vec<(Gains, f64)>,
}

/// Settings from the scenario, with the known gain sets seeded into the swarm.
pub fn tuner_settings(scenario: &Scenario, seed: u64) -> PsoSettings {
    let mut settings = scenario.pso.settings();
    settings.seed = seed;
    settings.seeded_positions = reference_gains(scenario)
        .into_iter()
        .map(|g| g.to_array().to_vec())
        .collect();
    settings
}

fn reference_gains(scenario: &Scenario) -> Vec<Gains> {
    let mut out = vec![Gains::LOAD_295, Gains::LOAD_306];
    for g in scenario.configured_gains() {
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

/// Tunes `[kp, ki, r]` on the scenario.
pub fn tune(scenario: &Scenario, settings: &PsoSettings) -> Result<TuneReport> {
    scenario.validate()?;
    let fitness = |x: &[f64]| evaluate_candidate(scenario, x);
    let PsoResult {
        best_position,
        best_cost,
        trace,
        evaluations,
        discarded,
    } = pso_optimize(&fitness, settings)?;
    let references = reference_gains(scenario)
        .into_iter()
        .map(|g| (g, evaluate_candidate(scenario, &g.to_array())))
        .collect();
    Ok(TuneReport {
        gains: Gains::from_slice(&best_position),
        best_cost,
        trace,
        evaluations,
        discarded,
        references,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> Scenario {
        let mut s = Scenario::default();
        s.solver.t_end = 20.0;
        s.load[1].start_s = 5.0;
        s
    }

    #[test]
    fn invalid_candidates_are_penalized() {
        let s = quick();
        assert_eq!(evaluate_candidate(&s, &[1.0, 0.1, 0.0]), DIVERGENCE_PENALTY);
        assert_eq!(evaluate_candidate(&s, &[1.0, 0.1]), DIVERGENCE_PENALTY);
        assert_eq!(
            evaluate_candidate(&s, &[f64::NAN, 0.1, 0.3]),
            DIVERGENCE_PENALTY
        );
        let c = evaluate_candidate(&s, &Gains::LOAD_295.to_array());
        assert!(c > 0.0 && c < DIVERGENCE_PENALTY);
    }

    #[test]
    fn tuned_never_worse_than_seeds() {
        let s = quick();
        let mut settings = tuner_settings(&s, 7);
        settings.population = 6;
        settings.iterations = 4;
        let report = tune(&s, &settings).unwrap();
        assert_eq!(report.trace.len(), 4);
        assert_eq!(report.evaluations, 24);
        for (_, cost) in &report.references {
            assert!(report.best_cost <= *cost);
        }
        assert!(report.trace.windows(2).all(|w| w[1] <= w[0]));
    }
}
