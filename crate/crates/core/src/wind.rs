//! DFIG wind plant run below its maximum power point.
//!
//! The plant is dispatched at a set point `Pcmd` that leaves a generating
//! margin against the available power. Frequency dips release part of that
//! margin through a droop whose gain is the margin spread over a frequency
//! band. The power reference passes through two first-order lags (converter
//! torque loop, then power train) before reaching the grid.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernel::{LagBlock, Scheme};

/// Betz limit on the power coefficient.
pub const BETZ_LIMIT: f64 = 16.0 / 27.0;

/// Default Cp polynomial coefficients `alpha[i][j]` multiplying `beta^i · lambda^j`.
///
/// Least-squares fit of the exponential approximation
/// `Cp = 0.5176 (116/λi − 0.4β − 5) e^(−21/λi) + 0.0068 λ` at β = 0 over
/// λ ∈ [2, 13]. Max abs residual 0.0149, RMS 0.0048. Pitch is fixed in this
/// model so the β rows are zero.
pub const DEFAULT_CP_COEFFICIENTS: [[f64; 5]; 5] = [
    [
        0.290_959_136_769_136,
        -0.310_919_031_408_943_1,
        0.105_704_099_639_015_45,
        -0.010_527_798_758_535_434,
        0.000_318_282_737_448_119_6,
    ],
    [0.0; 5],
    [0.0; 5],
    [0.0; 5],
    [0.0; 5],
];

/// `0.5 · Cp · ρ · A · Vw³`, the aerodynamic power captured by the rotor.
pub fn max_wind_power(wind_speed: f64, air_density: f64, swept_area: f64, cp: f64) -> Result<f64> {
    if !(wind_speed >= 0.0) {
        return Err(Error::Domain(format!(
            "wind speed must be non-negative, got {wind_speed}"
        )));
    }
    if !(air_density > 0.0) || !(swept_area > 0.0) {
        return Err(Error::Domain(
            "air density and swept area must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&cp) {
        return Err(Error::Domain(format!(
            "power coefficient {cp} outside [0, 1]"
        )));
    }
    Ok(0.5 * cp * air_density * swept_area * wind_speed.powi(3))
}

/// Fourth-order double polynomial `Σi Σj alpha[i][j] · β^i · λ^j`.
pub fn power_coefficient(tip_speed_ratio: f64, pitch_deg: f64, alpha: &[[f64; 5]; 5]) -> f64 {
    // Horner in β over per-row Horner in λ.
    alpha.iter().rev().fold(0.0, |acc, row| {
        let in_lambda = row.iter().rev().fold(0.0, |a, &c| a * tip_speed_ratio + c);
        acc * pitch_deg + in_lambda
    })
}

/// `ω · R / Vw` with ω the turbine-side rotor speed.
pub fn tip_speed_ratio(turbine_speed: f64, blade_radius: f64, wind_speed: f64) -> Result<f64> {
    if !(wind_speed > 0.0) {
        return Err(Error::Domain(format!(
            "tip speed ratio undefined for wind speed {wind_speed}"
        )));
    }
    Ok(turbine_speed * blade_radius / wind_speed)
}

/// Generating margin `Pwtmax − Pgrid`.
pub fn reserve_power(max_power: f64, grid_power: f64) -> Result<f64> {
    if grid_power > max_power {
        return Err(Error::Domain(format!(
            "over-dispatch: {grid_power} W exceeds the {max_power} W available"
        )));
    }
    if grid_power < 0.0 {
        return Err(Error::Domain(format!("negative dispatch {grid_power} W")));
    }
    Ok(max_power - grid_power)
}

/// Droop gain `1/R_wt = Preserve / ΔF_BD` in W/Hz.
pub fn wind_droop_gain(reserve: f64, freq_band: f64) -> Result<f64> {
    if !(freq_band > 0.0) {
        return Err(Error::Domain(format!(
            "frequency band must be positive, got {freq_band}"
        )));
    }
    if reserve < 0.0 {
        return Err(Error::Domain(format!("negative reserve {reserve} W")));
    }
    Ok(reserve / freq_band)
}

/// `ΔP = −ΔF · (1/R_wt)`; under-frequency raises output.
#[inline]
pub fn droop_power(freq_deviation: f64, droop_gain: f64) -> f64 {
    -freq_deviation * droop_gain
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindPlantParams {
    /// kg/m³
    pub air_density: f64,
    /// m
    pub blade_radius: f64,
    pub gear_ratio: f64,
    /// Generator shaft speed in rad/s; the turbine turns `gear_ratio` times slower.
    pub generator_speed: f64,
    pub pitch_angle_deg: f64,
    pub cp_coefficients: [[f64; 5]; 5],
    /// W
    pub rated_power: f64,
    /// Converter lag, s.
    pub lag_ti: f64,
    /// Power train lag, s.
    pub lag_tpt: f64,
    /// Frequency band over which the full margin is released, Hz.
    pub freq_band: f64,
    /// Inertial support gain, W per Hz/s.
    pub inertial_gain: f64,
}

impl Default for WindPlantParams {
    fn default() -> Self {
        Self {
            air_density: 1.25,
            blade_radius: 45.0,
            gear_ratio: 70.0,
            generator_speed: 110.0,
            pitch_angle_deg: 0.0,
            cp_coefficients: DEFAULT_CP_COEFFICIENTS,
            rated_power: 310e3,
            lag_ti: 3.0,
            lag_tpt: 10.0,
            freq_band: 0.5,
            inertial_gain: 0.0,
        }
    }
}

impl WindPlantParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wind.air_density", self.air_density),
            ("wind.blade_radius_m", self.blade_radius),
            ("wind.gear_ratio", self.gear_ratio),
            ("wind.rated_power_kw", self.rated_power),
            ("wind.lag_ti_s", self.lag_ti),
            ("wind.lag_tpt_s", self.lag_tpt),
            ("wind.freq_band_hz", self.freq_band),
        ];
        for (field, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::validation(
                    field,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        if !(self.generator_speed >= 0.0) {
            return Err(Error::validation(
                "wind.generator_speed_rad_s",
                "must be non-negative",
            ));
        }
        if !(self.inertial_gain >= 0.0) {
            return Err(Error::validation(
                "wind.inertial_gain_kw_per_hz_s",
                "must be non-negative",
            ));
        }
        if self
            .cp_coefficients
            .iter()
            .flatten()
            .any(|c| !c.is_finite())
        {
            return Err(Error::validation("wind.cp_coefficients", "must be finite"));
        }
        Ok(())
    }

    pub fn swept_area(&self) -> f64 {
        PI * self.blade_radius * self.blade_radius
    }

    pub fn turbine_speed(&self) -> f64 {
        self.generator_speed / self.gear_ratio
    }

    pub fn power_coefficient_at(&self, wind_speed: f64) -> Result<f64> {
        let lambda = tip_speed_ratio(self.turbine_speed(), self.blade_radius, wind_speed)?;
        Ok(power_coefficient(
            lambda,
            self.pitch_angle_deg,
            &self.cp_coefficients,
        ))
    }

    /// Aerodynamic maximum at `wind_speed`. Cp from the polynomial is
    /// clipped to `[0, 1]` so the fit's tails stay physical.
    pub fn aerodynamic_power(&self, wind_speed: f64) -> Result<f64> {
        if wind_speed == 0.0 {
            return Ok(0.0);
        }
        let cp = self.power_coefficient_at(wind_speed)?.clamp(0.0, 1.0);
        max_wind_power(wind_speed, self.air_density, self.swept_area(), cp)
    }

    /// Available power `Pwtmax`: the aerodynamic maximum capped at the rating.
    pub fn available_power(&self, wind_speed: f64) -> Result<f64> {
        Ok(self.aerodynamic_power(wind_speed)?.min(self.rated_power))
    }

    /// Returns a warning when Cp at `wind_speed` falls outside (0, Betz].
    pub fn betz_warning(&self, wind_speed: f64) -> Option<String> {
        let cp = self.power_coefficient_at(wind_speed).ok()?;
        (!(cp > 0.0 && cp <= BETZ_LIMIT))
            .then(|| format!("Cp = {cp:.4} at {wind_speed} m/s lies outside (0, {BETZ_LIMIT:.3}]"))
    }
}

/// Inputs held over one wind plant step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindInputs {
    /// m/s
    pub wind_speed: f64,
    /// Hz
    pub freq_deviation: f64,
    /// Hz/s
    pub freq_derivative: f64,
    /// Dispatch set point, W.
    pub p_cmd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindPlantState {
    /// Turbine-side rotor speed, rad/s.
    pub rotor_speed: f64,
    pub converter: LagBlock,
    pub power_train: LagBlock,
    /// Power reference after droop/inertial terms and clamping, W.
    pub p_ref: f64,
    /// Torque command at the generator shaft, N·m (reported only).
    pub t_cmd: f64,
    pub p_available: f64,
    pub p_grid: f64,
    pub p_reserve: f64,
}

impl WindPlantState {
    /// Equilibrium with the plant delivering `p_cmd` at `wind_speed`.
    pub fn steady(params: &WindPlantParams, wind_speed: f64, p_cmd: f64) -> Result<Self> {
        let p_available = params.available_power(wind_speed)?;
        let p = p_cmd.clamp(0.0, p_available);
        Ok(Self {
            rotor_speed: params.turbine_speed(),
            converter: LagBlock::new(1.0, params.lag_ti, p)?,
            power_train: LagBlock::new(1.0, params.lag_tpt, p)?,
            p_ref: p,
            t_cmd: torque_command(p, params.generator_speed)?,
            p_available,
            p_grid: p,
            p_reserve: reserve_power(p_available, p)?,
        })
    }
}

fn torque_command(power: f64, shaft_speed: f64) -> Result<f64> {
    if shaft_speed == 0.0 {
        if power > 0.0 {
            return Err(Error::Domain(
                "torque undefined: rotor at standstill with positive power reference".into(),
            ));
        }
        return Ok(0.0);
    }
    Ok(power / shaft_speed)
}

/// Advances the wind plant one step.
///
/// `Pref = Pcmd + ΔP_droop − K_in·dΔf/dt`, clamped to
/// `[0, min(Pwtmax, rated)]`, then lagged twice to give `p_grid`. The droop
/// gain spreads the dispatch margin `Pwtmax − Pcmd` over the frequency band.
pub fn wind_plant_step(
    state: &WindPlantState,
    params: &WindPlantParams,
    inputs: WindInputs,
    dt: f64,
    scheme: Scheme,
) -> Result<WindPlantState> {
    let p_available = params.available_power(inputs.wind_speed)?;
    let cap = p_available.min(params.rated_power);

    let p_cmd = inputs.p_cmd.clamp(0.0, cap);
    let gain = wind_droop_gain(reserve_power(p_available, p_cmd)?, params.freq_band)?;
    let p_ref = (p_cmd + droop_power(inputs.freq_deviation, gain)
        - params.inertial_gain * inputs.freq_derivative)
        .clamp(0.0, cap);

    let mut converter = state.converter.step(p_ref, dt, scheme);
    converter.clamp_state(0.0, cap);
    let mut power_train = state.power_train.step(converter.output(), dt, scheme);
    power_train.clamp_state(0.0, cap);

    let p_grid = power_train.output();
    Ok(WindPlantState {
        rotor_speed: params.turbine_speed(),
        converter,
        power_train,
        p_ref,
        t_cmd: torque_command(converter.output(), params.generator_speed)?,
        p_available,
        p_grid,
        p_reserve: reserve_power(p_available, p_grid)?,
    })
}
