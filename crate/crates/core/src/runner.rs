//! The closed-loop simulation: wind plant, diesel plant and grid stepped
//! together on a fixed grid.
//!
//! Within a step every block sees the other blocks' outputs from the start of
//! the step (zero-order hold). Loads switch at segment boundaries, and a
//! segment may also switch the wind set point and the controller gains.

use crate::diesel::{diesel_plant_step, DieselPlantParams, DieselPlantState, Gains};
use crate::error::{Error, Result};
use crate::grid::{accelerating_power, frequency_step, GridParams, GridState};
use crate::scenario::{Controller, Scenario, Segment};
use crate::wind::{wind_plant_step, WindInputs, WindPlantParams, WindPlantState};

/// One output row. Powers in kW.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    pub delta_f_hz: f64,
    pub p_wind_kw: f64,
    pub p_diesel_kw: f64,
    pub p_load_kw: f64,
    pub p_reserve_kw: f64,
    pub u_pi: f64,
}

/// Statistics for one load segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentSummary {
    pub start: f64,
    pub end: f64,
    pub load_kw: f64,
    pub gains: Gains,
    /// Means over the steady window at the end of the segment, kW.
    pub steady_p_wind_kw: f64,
    pub steady_p_diesel_kw: f64,
    pub steady_p_reserve_kw: f64,
    pub steady_delta_f_hz: f64,
    pub max_abs_delta_f_hz: f64,
    /// |Δf| at the last instant of the segment.
    pub final_abs_delta_f_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub scenario: String,
    pub dt: f64,
    pub t_end: f64,
    pub steps: usize,
    pub steady_window: f64,
    pub ise: f64,
    pub max_abs_delta_f_hz: f64,
    pub segments: Vec<SegmentSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub records: Vec<TimeSeriesRecord>,
    pub summary: Summary,
}

/// Full-resolution samples kept for the summary.
#[derive(Default)]
struct Trace {
    delta_f: Vec<f64>,
    p_wind: Vec<f64>,
    p_diesel: Vec<f64>,
    p_reserve: Vec<f64>,
}

struct Plant {
    wind: WindPlantParams,
    grid: GridParams,
    /// Diesel parameters per segment, differing only in gains.
    diesel: Vec<DieselPlantParams>,
    segments: Vec<Segment>,
}

impl Plant {
    fn new(scenario: &Scenario, gains_override: Option<Gains>) -> Result<Self> {
        let base = match (gains_override, scenario.controller) {
            (Some(g), _) => g,
            (None, Controller::Gains(g)) => g,
            (None, Controller::Mode(_)) => {
                return Err(Error::validation(
                    "controller",
                    "gains are set to \"tune\"; run the tuner or pass gains explicitly",
                ))
            }
        };
        let segments = scenario.segments();
        let diesel = segments
            .iter()
            .map(|s| {
                let gains = match gains_override {
                    Some(g) => g,
                    None => s.gains.unwrap_or(base),
                };
                scenario.diesel_params(gains)
            })
            .collect();
        Ok(Self {
            wind: scenario.wind_params(),
            grid: scenario.grid_params(),
            diesel,
            segments,
        })
    }

    fn segment_at(&self, t: f64, dt: f64) -> usize {
        self.segments
            .iter()
            .rposition(|s| s.start <= t + 0.5 * dt)
            .unwrap_or(0)
    }
}

fn stamp(err: Error, t: f64) -> Error {
    match err {
        Error::SimulationFault { message, .. } | Error::Domain(message) => {
            Error::SimulationFault { t, message }
        }
        other => other,
    }
}

/// Everything known at one grid point, before the step from it is taken.
#[derive(Debug, Clone, Copy)]
pub struct StepView<'a> {
    pub k: usize,
    pub t: f64,
    pub segment: usize,
    pub wind: &'a WindPlantState,
    pub diesel: &'a DieselPlantState,
    /// The derivative is evaluated for the power balance at this instant.
    pub grid: &'a GridState,
    /// W
    pub p_load: f64,
    /// Generation minus load relative to the initial dispatch, W.
    pub accelerating_power: f64,
}

/// Runs the loop, calling `observe` at every grid point `k = 0..=steps`.
/// Returns the ISE of the per-unit frequency deviation.
fn simulate<F>(scenario: &Scenario, plant: &Plant, mut observe: F) -> Result<f64>
where
    F: FnMut(&StepView),
{
    let solver = &scenario.solver;
    let dt = solver.dt;
    let steps = solver.steps();
    let f_nom = plant.grid.nominal_frequency;

    let v0 = scenario.wind_speed.at(0.0);
    let seg0 = &plant.segments[0];
    let mut wind = WindPlantState::steady(&plant.wind, v0, scenario.wind_set_point(seg0, v0)?)?;
    let mut diesel = DieselPlantState::steady(&plant.diesel[0])?;
    let imbalance = wind.p_grid + diesel.p_diesel - seg0.load;
    let mut grid = GridState::at(&plant.grid, 0.0, 0.0);

    let mut ise = 0.0;
    let mut previous_sq = 0.0;
    for k in 0..=steps {
        let t = k as f64 * dt;
        let idx = plant.segment_at(t, dt);
        let segment = &plant.segments[idx];
        let accel = accelerating_power(wind.p_grid, diesel.p_diesel, segment.load, imbalance);
        grid = grid.refresh(&plant.grid, accel);

        let sq = (grid.freq_deviation / f_nom).powi(2);
        if k > 0 {
            ise += 0.5 * dt * (previous_sq + sq);
        }
        previous_sq = sq;
        observe(&StepView {
            k,
            t,
            segment: idx,
            wind: &wind,
            diesel: &diesel,
            grid: &grid,
            p_load: segment.load,
            accelerating_power: accel,
        });
        if k == steps {
            break;
        }

        let wind_speed = scenario.wind_speed.at(t);
        let inputs = WindInputs {
            wind_speed,
            freq_deviation: grid.freq_deviation,
            freq_derivative: grid.freq_derivative,
            p_cmd: scenario
                .wind_set_point(segment, wind_speed)
                .map_err(|e| stamp(e, t))?,
        };
        let next_wind = wind_plant_step(&wind, &plant.wind, inputs, dt, solver.scheme)
            .map_err(|e| stamp(e, t))?;
        let next_diesel = diesel_plant_step(
            &diesel,
            &plant.diesel[idx],
            grid.freq_deviation,
            dt,
            solver.scheme,
        );
        grid = frequency_step(&grid, &plant.grid, accel, dt, solver.scheme)
            .map_err(|e| stamp(e, t + dt))?;
        wind = next_wind;
        diesel = next_diesel;
        if !diesel.p_diesel.is_finite() || !wind.p_grid.is_finite() {
            return Err(Error::SimulationFault {
                t: t + dt,
                message: "plant output is not finite".into(),
            });
        }
    }
    Ok(ise)
}

/// Simulates the scenario with its own controller settings.
pub fn run_simulation(scenario: &Scenario) -> Result<SimulationResult> {
    run_with(scenario, None)
}

/// Simulates the scenario with one gain set applied to every segment.
pub fn run_with_gains(scenario: &Scenario, gains: Gains) -> Result<SimulationResult> {
    run_with(scenario, Some(gains))
}

fn run_with(scenario: &Scenario, gains_override: Option<Gains>) -> Result<SimulationResult> {
    scenario.validate()?;
    if let Some(g) = gains_override {
        g.validate("gains")?;
    }
    let plant = Plant::new(scenario, gains_override)?;
    let decimation = scenario.solver.output_decimation;
    let steps = scenario.solver.steps();

    let mut records = Vec::with_capacity(steps / decimation + 1);
    let mut trace = Trace::default();
    let ise = simulate(scenario, &plant, |v| {
        trace.delta_f.push(v.grid.freq_deviation);
        trace.p_wind.push(v.wind.p_grid);
        trace.p_diesel.push(v.diesel.p_diesel);
        trace.p_reserve.push(v.wind.p_reserve);
        if v.k % decimation == 0 {
            records.push(TimeSeriesRecord {
                t: v.t,
                delta_f_hz: v.grid.freq_deviation,
                p_wind_kw: v.wind.p_grid / 1e3,
                p_diesel_kw: v.diesel.p_diesel / 1e3,
                p_load_kw: v.p_load / 1e3,
                p_reserve_kw: v.wind.p_reserve / 1e3,
                u_pi: v.diesel.u_pi,
            });
        }
    })?;

    let summary = summarize(scenario, &plant, &trace, ise);
    Ok(SimulationResult { records, summary })
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn summarize(scenario: &Scenario, plant: &Plant, trace: &Trace, ise: f64) -> Summary {
    let dt = scenario.solver.dt;
    let steps = scenario.solver.steps();
    let t_end = steps as f64 * dt;
    let window = scenario.summary.steady_window_s;
    let index = |t: f64| ((t / dt).round() as usize).min(steps);

    let segments = plant
        .segments
        .iter()
        .enumerate()
        .filter(|(_, s)| s.start < t_end)
        .map(|(i, s)| {
            let end = plant
                .segments
                .get(i + 1)
                .map_or(t_end, |n| n.start.min(t_end));
            let (k0, k1) = (index(s.start), index(end));
            let w0 = index((end - window).max(s.start));
            let steady = w0..=k1;
            SegmentSummary {
                start: s.start,
                end,
                load_kw: s.load / 1e3,
                gains: plant.diesel[i].gains,
                steady_p_wind_kw: mean(&trace.p_wind[steady.clone()]) / 1e3,
                steady_p_diesel_kw: mean(&trace.p_diesel[steady.clone()]) / 1e3,
                steady_p_reserve_kw: mean(&trace.p_reserve[steady.clone()]) / 1e3,
                steady_delta_f_hz: mean(&trace.delta_f[steady]),
                max_abs_delta_f_hz: max_abs(&trace.delta_f[k0..=k1]),
                final_abs_delta_f_hz: trace.delta_f[k1].abs(),
            }
        })
        .collect();

    Summary {
        scenario: scenario.name.clone(),
        dt,
        t_end,
        steps,
        steady_window: window,
        ise,
        max_abs_delta_f_hz: max_abs(&trace.delta_f),
        segments,
    }
}

/// ISE of the per-unit frequency deviation for `gains` on every segment,
/// without keeping any output.
pub fn simulate_ise(scenario: &Scenario, gains: Gains) -> Result<f64> {
    gains.validate("gains")?;
    let plant = Plant::new(scenario, Some(gains))?;
    simulate(scenario, &plant, |_| {})
}

/// Runs the scenario, handing every grid point to `observe`. `gains`
/// replaces the controller settings on every segment when given.
pub fn run_observed<F>(scenario: &Scenario, gains: Option<Gains>, observe: F) -> Result<f64>
where
    F: FnMut(&StepView),
{
    scenario.validate()?;
    if let Some(g) = gains {
        g.validate("gains")?;
    }
    let plant = Plant::new(scenario, gains)?;
    simulate(scenario, &plant, observe)
}
