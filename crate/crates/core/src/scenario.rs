//! Scenario files: plant parameters, dispatch, load and wind profiles, solver
//! and tuner settings.
//!
//! Files are TOML. Every field has a default, and the defaults reproduce the
//! two-load experiment: 295 kW for the first minute, 306 kW for the second,
//! wind dispatched at 275 then 276 kW and the diesel set at 20 kW. Powers are
//! in kW at this interface and converted to W for the models.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diesel::{DieselPlantParams, Gains};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::kernel::SolverSettings;
use crate::pso::PsoSettings;
use crate::wind::{WindPlantParams, DEFAULT_CP_COEFFICIENTS};

/// Tolerance on the initial power balance, W.
pub const BALANCE_TOLERANCE: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindConfig {
    pub air_density: f64,
    pub blade_radius_m: f64,
    pub gear_ratio: f64,
    pub generator_speed_rad_s: f64,
    pub pitch_angle_deg: f64,
    pub cp_coefficients: [[f64; 5]; 5],
    pub rated_power_kw: f64,
    pub lag_ti_s: f64,
    pub lag_tpt_s: f64,
    pub freq_band_hz: f64,
    pub inertial_gain_kw_per_hz_s: f64,
}

impl Default for WindConfig {
    fn default() -> Self {
        let p = WindPlantParams::default();
        Self {
            air_density: p.air_density,
            blade_radius_m: p.blade_radius,
            gear_ratio: p.gear_ratio,
            generator_speed_rad_s: p.generator_speed,
            pitch_angle_deg: p.pitch_angle_deg,
            cp_coefficients: DEFAULT_CP_COEFFICIENTS,
            rated_power_kw: p.rated_power / 1e3,
            lag_ti_s: p.lag_ti,
            lag_tpt_s: p.lag_tpt,
            freq_band_hz: p.freq_band,
            inertial_gain_kw_per_hz_s: p.inertial_gain / 1e3,
        }
    }
}

impl WindConfig {
    pub fn params(&self) -> WindPlantParams {
        WindPlantParams {
            air_density: self.air_density,
            blade_radius: self.blade_radius_m,
            gear_ratio: self.gear_ratio,
            generator_speed: self.generator_speed_rad_s,
            pitch_angle_deg: self.pitch_angle_deg,
            cp_coefficients: self.cp_coefficients,
            rated_power: self.rated_power_kw * 1e3,
            lag_ti: self.lag_ti_s,
            lag_tpt: self.lag_tpt_s,
            freq_band: self.freq_band_hz,
            inertial_gain: self.inertial_gain_kw_per_hz_s * 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DieselConfig {
    pub k_dg: f64,
    pub t_dg_s: f64,
    pub k_dt: f64,
    pub t_dt_s: f64,
    pub rated_power_kw: f64,
    /// Rate limit as a fraction of rated power per second.
    pub grc_fraction_per_s: f64,
    pub setpoint_kw: f64,
}

impl Default for DieselConfig {
    fn default() -> Self {
        Self {
            k_dg: 1.0,
            t_dg_s: 2.0,
            k_dt: 1.0,
            t_dt_s: 20.0,
            rated_power_kw: 40.0,
            grc_fraction_per_s: 0.03,
            setpoint_kw: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub inertia_h_s: f64,
    pub damping_mw_per_hz: f64,
    pub nominal_frequency_hz: f64,
    pub power_base_kw: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            inertia_h_s: 5.0,
            damping_mw_per_hz: 0.012,
            nominal_frequency_hz: 50.0,
            power_base_kw: 350.0,
        }
    }
}

impl GridConfig {
    pub fn params(&self) -> GridParams {
        GridParams {
            inertia_h: self.inertia_h_s,
            damping: self.damping_mw_per_hz * 1e6,
            nominal_frequency: self.nominal_frequency_hz,
            power_base: self.power_base_kw * 1e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindStep {
    pub start_s: f64,
    pub value_m_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WindSpeedProfile {
    Constant {
        value_m_s: f64,
    },
    Steps {
        steps: Vec<WindStep>,
    },
    Sinusoid {
        mean_m_s: f64,
        amplitude_m_s: f64,
        period_s: f64,
    },
}

impl Default for WindSpeedProfile {
    fn default() -> Self {
        WindSpeedProfile::Constant { value_m_s: 8.0 }
    }
}

impl WindSpeedProfile {
    /// Wind speed at time `t`, m/s.
    pub fn at(&self, t: f64) -> f64 {
        match self {
            WindSpeedProfile::Constant { value_m_s } => *value_m_s,
            WindSpeedProfile::Steps { steps } => steps
                .iter()
                .take_while(|s| s.start_s <= t + 1e-9)
                .last()
                .map_or(steps[0].value_m_s, |s| s.value_m_s),
            WindSpeedProfile::Sinusoid {
                mean_m_s,
                amplitude_m_s,
                period_s,
            } => mean_m_s + amplitude_m_s * (2.0 * std::f64::consts::PI * t / period_s).sin(),
        }
    }

    fn validate(&self) -> Result<()> {
        let field = "wind_speed";
        match self {
            WindSpeedProfile::Constant { value_m_s } => {
                if !(*value_m_s >= 0.0) || !value_m_s.is_finite() {
                    return Err(Error::validation(
                        "wind_speed.value_m_s",
                        "must be non-negative",
                    ));
                }
            }
            WindSpeedProfile::Steps { steps } => {
                if steps.first().map(|s| s.start_s) != Some(0.0) {
                    return Err(Error::validation(
                        "wind_speed.steps",
                        "first step must start at 0 s",
                    ));
                }
                if steps.windows(2).any(|w| !(w[1].start_s > w[0].start_s)) {
                    return Err(Error::validation(
                        "wind_speed.steps",
                        "start times must increase",
                    ));
                }
                if steps
                    .iter()
                    .any(|s| !(s.value_m_s >= 0.0) || !s.value_m_s.is_finite())
                {
                    return Err(Error::validation(
                        "wind_speed.steps",
                        "speeds must be non-negative",
                    ));
                }
            }
            WindSpeedProfile::Sinusoid {
                mean_m_s,
                amplitude_m_s,
                period_s,
            } => {
                if !(*period_s > 0.0) {
                    return Err(Error::validation("wind_speed.period_s", "must be positive"));
                }
                if !(amplitude_m_s.abs() <= *mean_m_s) {
                    return Err(Error::validation(
                        field,
                        "amplitude larger than mean gives negative wind speed",
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Wind set point: either an explicit power or a de-load fraction of the
/// available power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Dispatch {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wind_pcmd_kw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deload_fraction: Option<f64>,
}

impl Default for Dispatch {
    fn default() -> Self {
        Self {
            wind_pcmd_kw: Some(275.0),
            deload_fraction: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ControllerMode {
    #[serde(rename = "tune")]
    Tune,
}

/// Either explicit gains or `controller = "tune"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Controller {
    Gains(Gains),
    Mode(ControllerMode),
}

impl Default for Controller {
    fn default() -> Self {
        Controller::Gains(Gains::LOAD_295)
    }
}

impl Controller {
    pub fn gains(&self) -> Option<Gains> {
        match self {
            Controller::Gains(g) => Some(*g),
            Controller::Mode(ControllerMode::Tune) => None,
        }
    }
}

/// A piecewise-constant load segment starting at `start_s`. Optional fields
/// change the wind set point or the controller gains from that time on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSegment {
    pub start_s: f64,
    pub load_kw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wind_pcmd_kw: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<Gains>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SummaryConfig {
    /// Length of the window at the end of each load segment used for
    /// steady-state means, s.
    pub steady_window_s: f64,
}

impl Default for SummaryConfig {
    fn default() -> Self {
        Self {
            steady_window_s: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    pub population: usize,
    pub iterations: usize,
    pub inertia_weight: f64,
    pub cognitive: f64,
    pub social: f64,
    pub kp_bounds: [f64; 2],
    pub ki_bounds: [f64; 2],
    pub r_bounds: [f64; 2],
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            population: 100,
            iterations: 150,
            inertia_weight: 0.729,
            cognitive: 1.494,
            social: 1.494,
            kp_bounds: [0.0, 10.0],
            ki_bounds: [0.0, 1.0],
            r_bounds: [0.05, 1.0],
            seed: 0,
        }
    }
}

impl PsoConfig {
    pub fn settings(&self) -> PsoSettings {
        PsoSettings {
            population: self.population,
            iterations: self.iterations,
            inertia_weight: self.inertia_weight,
            cognitive: self.cognitive,
            social: self.social,
            bounds: vec![
                (self.kp_bounds[0], self.kp_bounds[1]),
                (self.ki_bounds[0], self.ki_bounds[1]),
                (self.r_bounds[0], self.r_bounds[1]),
            ],
            seed: self.seed,
            seeded_positions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub controller: Controller,
    pub wind: WindConfig,
    pub diesel: DieselConfig,
    pub grid: GridConfig,
    pub solver: SolverSettings,
    pub wind_speed: WindSpeedProfile,
    pub dispatch: Dispatch,
    pub summary: SummaryConfig,
    pub pso: PsoConfig,
    pub load: Vec<LoadSegment>,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "two-load experiment".into(),
            controller: Controller::default(),
            wind: WindConfig::default(),
            diesel: DieselConfig::default(),
            grid: GridConfig::default(),
            solver: SolverSettings::default(),
            wind_speed: WindSpeedProfile::default(),
            dispatch: Dispatch::default(),
            summary: SummaryConfig::default(),
            pso: PsoConfig::default(),
            load: vec![
                LoadSegment {
                    start_s: 0.0,
                    load_kw: 295.0,
                    wind_pcmd_kw: None,
                    gains: None,
                },
                LoadSegment {
                    start_s: 60.0,
                    load_kw: 306.0,
                    wind_pcmd_kw: Some(276.0),
                    gains: Some(Gains::LOAD_306),
                },
            ],
        }
    }
}

/// A load segment with every optional field resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: f64,
    /// W
    pub load: f64,
    /// Explicit wind set point, W; `None` follows the de-load fraction.
    pub p_cmd: Option<f64>,
    pub gains: Option<Gains>,
}

impl Scenario {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn wind_params(&self) -> WindPlantParams {
        self.wind.params()
    }

    pub fn grid_params(&self) -> GridParams {
        self.grid.params()
    }

    /// Diesel parameters with `gains` in place of the controller setting.
    pub fn diesel_params(&self, gains: Gains) -> DieselPlantParams {
        let d = &self.diesel;
        DieselPlantParams {
            k_dg: d.k_dg,
            t_dg: d.t_dg_s,
            k_dt: d.k_dt,
            t_dt: d.t_dt_s,
            gains,
            grc_rate: d.grc_fraction_per_s * d.rated_power_kw * 1e3,
            rated_power: d.rated_power_kw * 1e3,
            setpoint: d.setpoint_kw * 1e3,
            power_base: self.grid.power_base_kw * 1e3,
            nominal_frequency: self.grid.nominal_frequency_hz,
        }
    }

    pub fn segments(&self) -> Vec<Segment> {
        self.load
            .iter()
            .map(|s| Segment {
                start: s.start_s,
                load: s.load_kw * 1e3,
                p_cmd: s
                    .wind_pcmd_kw
                    .or(self.dispatch.wind_pcmd_kw)
                    .map(|p| p * 1e3),
                gains: s.gains,
            })
            .collect()
    }

    /// Wind set point in W for a segment at wind speed `wind_speed`.
    pub fn wind_set_point(&self, segment: &Segment, wind_speed: f64) -> Result<f64> {
        match segment.p_cmd {
            Some(p) => Ok(p),
            None => {
                let fraction = self.dispatch.deload_fraction.unwrap_or(0.0);
                Ok((1.0 - fraction) * self.wind_params().available_power(wind_speed)?)
            }
        }
    }

    /// Distinct gain sets the scenario itself specifies.
    pub fn configured_gains(&self) -> Vec<Gains> {
        let mut out: Vec<Gains> = Vec::new();
        for g in self
            .controller
            .gains()
            .into_iter()
            .chain(self.load.iter().filter_map(|s| s.gains))
        {
            if !out.contains(&g) {
                out.push(g);
            }
        }
        out
    }

    /// Checks every invariant and returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();

        let wind = self.wind_params();
        wind.validate()?;
        self.grid_params().validate()?;
        self.solver.validate()?;
        self.wind_speed.validate()?;
        if !(self.summary.steady_window_s > 0.0) {
            return Err(Error::validation(
                "summary.steady_window_s",
                "must be positive",
            ));
        }
        if let Controller::Gains(g) = self.controller {
            g.validate("controller")?;
        }
        let diesel = self.diesel_params(self.controller.gains().unwrap_or(Gains::LOAD_295));
        diesel.validate()?;

        match (self.dispatch.wind_pcmd_kw, self.dispatch.deload_fraction) {
            (Some(_), Some(_)) => {
                return Err(Error::validation(
                    "dispatch",
                    "set either wind_pcmd_kw or deload_fraction, not both",
                ))
            }
            (None, None) if self.load.iter().any(|s| s.wind_pcmd_kw.is_none()) => {
                return Err(Error::validation(
                    "dispatch",
                    "one of wind_pcmd_kw or deload_fraction is required",
                ))
            }
            (_, Some(f)) if !(0.0..1.0).contains(&f) => {
                return Err(Error::validation(
                    "dispatch.deload_fraction",
                    "must lie in [0, 1)",
                ))
            }
            _ => {}
        }

        if self.load.is_empty() {
            return Err(Error::validation(
                "load",
                "at least one load segment is required",
            ));
        }
        if self.load[0].start_s != 0.0 {
            return Err(Error::validation(
                "load[0].start_s",
                "first segment must start at 0 s",
            ));
        }
        let capacity = wind.rated_power + diesel.rated_power;
        for (i, seg) in self.load.iter().enumerate() {
            if i > 0 && !(seg.start_s > self.load[i - 1].start_s) {
                return Err(Error::validation(
                    format!("load[{i}].start_s"),
                    "segment start times must increase",
                ));
            }
            if !(seg.load_kw >= 0.0) || !seg.load_kw.is_finite() {
                return Err(Error::validation(
                    format!("load[{i}].load_kw"),
                    "must be non-negative",
                ));
            }
            if seg.load_kw * 1e3 > capacity {
                return Err(Error::validation(
                    format!("load[{i}].load_kw"),
                    format!(
                        "{} kW exceeds the {} kW installed capacity",
                        seg.load_kw,
                        capacity / 1e3
                    ),
                ));
            }
            if let Some(p) = seg.wind_pcmd_kw {
                if !(p >= 0.0) || p * 1e3 > wind.rated_power {
                    return Err(Error::validation(
                        format!("load[{i}].wind_pcmd_kw"),
                        format!("{p} kW outside [0, {}] kW", wind.rated_power / 1e3),
                    ));
                }
            }
            if let Some(g) = seg.gains {
                g.validate(&format!("load[{i}].gains"))?;
            }
        }

        let segments = self.segments();
        let v0 = self.wind_speed.at(0.0);
        let available = wind.available_power(v0)?;
        let p_cmd0 = self.wind_set_point(&segments[0], v0)?;
        if !(p_cmd0 >= 0.0) || p_cmd0 > available {
            return Err(Error::validation(
                "dispatch.wind_pcmd_kw",
                format!(
                    "set point {} kW exceeds the {} kW available at {v0} m/s",
                    p_cmd0 / 1e3,
                    available / 1e3
                ),
            ));
        }
        let imbalance = p_cmd0 + diesel.setpoint - segments[0].load;
        if imbalance.abs() > BALANCE_TOLERANCE {
            return Err(Error::validation(
                "diesel.setpoint_kw",
                format!(
                    "initial dispatch does not balance the load: wind {} kW + diesel {} kW − load {} kW = {} kW",
                    p_cmd0 / 1e3,
                    diesel.setpoint / 1e3,
                    segments[0].load / 1e3,
                    imbalance / 1e3
                ),
            ));
        }

        let min_tc = [wind.lag_ti, wind.lag_tpt, diesel.t_dg, diesel.t_dt]
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        warnings.extend(self.solver.stability_warning(min_tc));
        warnings.extend(wind.betz_warning(v0));
        Ok(warnings)
    }
}

/// Reads, parses and validates a scenario file, logging any warnings.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    let scenario = Scenario::from_toml_str(&text).map_err(|e| {
        Error::Parse(format!(
            "{}: {}",
            path.display(),
            e.to_string().trim_start_matches("parse error: ")
        ))
    })?;
    for w in scenario.validate()? {
        log::warn!("{}: {w}", path.display());
    }
    Ok(scenario)
}
