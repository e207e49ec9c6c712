//! Browser bindings for the simulator. Results cross into JavaScript as flat
//! `Float64Array`s; the layout of each is given on the function.

use hybrid_lfc::scenario::{LoadSegment, Scenario};
use hybrid_lfc::{run_with_gains, tune, tuner_settings, Gains};
use wasm_bindgen::prelude::*;

/// Values per sample returned by [`simulate_step`].
pub const STEP_STRIDE: usize = 5;
/// Values per sample returned by [`wind_power_curve`].
pub const CURVE_STRIDE: usize = 4;

fn step_scenario(step_kw: f64, freq_band_hz: f64, inertial_gain: f64, t_end: f64) -> Scenario {
    let mut s = Scenario {
        name: "browser step".into(),
        ..Scenario::default()
    };
    s.solver.t_end = t_end;
    s.wind.freq_band_hz = freq_band_hz;
    s.wind.inertial_gain_kw_per_hz_s = inertial_gain;
    s.load = vec![
        LoadSegment {
            start_s: 0.0,
            load_kw: 295.0,
            wind_pcmd_kw: None,
            gains: None,
        },
        LoadSegment {
            start_s: 5.0,
            load_kw: 295.0 + step_kw,
            wind_pcmd_kw: None,
            gains: None,
        },
    ];
    s
}

/// Load step of `step_kw` at t = 5 s from the 295 kW operating point.
///
/// Returns `[t, Δf Hz, wind kW, diesel kW, reserve kW]` per 0.1 s sample.
pub fn step_response(
    kp: f64,
    ki: f64,
    r: f64,
    freq_band_hz: f64,
    step_kw: f64,
    inertial_gain: f64,
    t_end: f64,
) -> Result<Vec<f64>, String> {
    let scenario = step_scenario(step_kw, freq_band_hz, inertial_gain, t_end);
    let result = run_with_gains(&scenario, Gains { kp, ki, r }).map_err(|e| e.to_string())?;
    Ok(result
        .records
        .iter()
        .flat_map(|x| {
            [
                x.t,
                x.delta_f_hz,
                x.p_wind_kw,
                x.p_diesel_kw,
                x.p_reserve_kw,
            ]
        })
        .collect())
}

/// Available power and de-loaded dispatch over a wind speed range.
///
/// Returns `[speed m/s, available kW, dispatched kW, reserve kW]` per point.
pub fn power_curve(
    deload_fraction: f64,
    v_min: f64,
    v_max: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    if !(0.0..1.0).contains(&deload_fraction) {
        return Err("de-load fraction must lie in [0, 1)".into());
    }
    if !(v_min >= 0.0 && v_max > v_min) || points < 2 {
        return Err("need 0 ≤ v_min < v_max and at least two points".into());
    }
    let params = Scenario::default().wind_params();
    let mut out = Vec::with_capacity(points * CURVE_STRIDE);
    for i in 0..points {
        let v = v_min + (v_max - v_min) * i as f64 / (points - 1) as f64;
        let available = params.available_power(v).map_err(|e| e.to_string())? / 1e3;
        let dispatched = (1.0 - deload_fraction) * available;
        out.extend([v, available, dispatched, available - dispatched]);
    }
    Ok(out)
}

/// A short PSO run on the step scenario.
///
/// Returns `[kp, ki, r, best ISE, trace...]`.
pub fn quick_tune(
    step_kw: f64,
    population: usize,
    iterations: usize,
    seed: u64,
) -> Result<Vec<f64>, String> {
    let scenario = step_scenario(step_kw, 0.5, 0.0, 60.0);
    let mut settings = tuner_settings(&scenario, seed);
    settings.population = population;
    settings.iterations = iterations;
    let report = tune(&scenario, &settings).map_err(|e| e.to_string())?;
    let mut out = report.gains.to_array().to_vec();
    out.push(report.best_cost);
    out.extend(report.trace);
    Ok(out)
}

#[wasm_bindgen]
pub fn simulate_step(
    kp: f64,
    ki: f64,
    r: f64,
    freq_band_hz: f64,
    step_kw: f64,
    inertial_gain: f64,
    t_end: f64,
) -> Result<Vec<f64>, JsError> {
    step_response(kp, ki, r, freq_band_hz, step_kw, inertial_gain, t_end)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn wind_power_curve(
    deload_fraction: f64,
    v_min: f64,
    v_max: f64,
    points: usize,
) -> Result<Vec<f64>, JsError> {
    power_curve(deload_fraction, v_min, v_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn tune_gains(
    step_kw: f64,
    population: usize,
    iterations: usize,
    seed: u64,
) -> Result<Vec<f64>, JsError> {
    quick_tune(step_kw, population, iterations, seed).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_layout() {
        let out = step_response(2.0539, 0.0655, 0.4219, 0.5, 11.0, 0.0, 20.0).unwrap();
        assert_eq!(out.len(), 201 * STEP_STRIDE);
        assert_eq!(&out[..5], &[0.0, 0.0, 275.0, 20.0, 35.0]);
        // one second after the step the frequency has dipped and wind picked up
        let after = &out[60 * STEP_STRIDE..61 * STEP_STRIDE];
        assert!(after[1] < 0.0 && after[2] > 275.0, "{after:?}");
    }

    #[test]
    fn rejects_bad_gains() {
        assert!(step_response(1.0, 0.1, 0.0, 0.5, 11.0, 0.0, 20.0).is_err());
        assert!(step_response(1.0, 0.1, 0.3, 0.5, 100.0, 0.0, 20.0).is_err());
    }

    #[test]
    fn curve_reserve_matches_fraction() {
        let out = power_curve(0.1, 5.0, 12.0, 8).unwrap();
        assert_eq!(out.len(), 8 * CURVE_STRIDE);
        for p in out.chunks(CURVE_STRIDE) {
            assert!((p[3] - 0.1 * p[1]).abs() < 1e-9);
            assert!(p[1] <= 310.0);
        }
        assert!(power_curve(1.0, 5.0, 12.0, 8).is_err());
    }

    #[test]
    fn quick_tune_layout() {
        let out = quick_tune(11.0, 4, 3, 5).unwrap();
        assert_eq!(out.len(), 4 + 3);
        assert!(out[3] > 0.0);
    }
}
