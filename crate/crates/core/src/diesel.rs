//! Diesel generator with PI secondary control, governor droop, governor and
//! turbine lags, a generation rate constraint and capacity limits.
//!
//! Control signals are per unit: the frequency error is `Δf / f_nom`, the PI
//! output and droop term are fractions of the system power base.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{rate_limit, LagBlock, Limits, Scheme, TrapezoidIntegrator};

/// PI gains and governor droop, the three quantities the tuner searches over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gains {
    pub kp: f64,
    pub ki: f64,
    /// Speed regulation, per-unit frequency per per-unit power.
    pub r: f64,
}

impl Gains {
    /// Reported optimum for the 295 kW load.
    pub const LOAD_295: Gains = Gains {
        kp: 2.231,
        ki: 0.0651,
        r: 0.2273,
    };
    /// Reported optimum for the 306 kW load.
    pub const LOAD_306: Gains = Gains {
        kp: 2.0539,
        ki: 0.0655,
        r: 0.4219,
    };

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.kp >= 0.0) || !self.kp.is_finite() {
            return Err(Error::validation(
                format!("{field}.kp"),
                "must be non-negative",
            ));
        }
        if !(self.ki >= 0.0) || !self.ki.is_finite() {
            return Err(Error::validation(
                format!("{field}.ki"),
                "must be non-negative",
            ));
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(Error::validation(format!("{field}.r"), "must be positive"));
        }
        Ok(())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.kp, self.ki, self.r]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        Self {
            kp: x[0],
            ki: x[1],
            r: x[2],
        }
    }
}

/// PI law `u = −(Kp·e + Ki·∫e dt)` with a trapezoidal integral.
///
/// Returns the command and the advanced integrator. The sign makes a
/// negative error (under-frequency) raise the command.
pub fn pi_control(
    error: f64,
    integral: TrapezoidIntegrator,
    kp: f64,
    ki: f64,
    dt: f64,
) -> (f64, TrapezoidIntegrator) {
    let integral = integral.step(error, dt);
    (-(kp * error + ki * integral.value()), integral)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DieselPlantParams {
    pub k_dg: f64,
    /// s
    pub t_dg: f64,
    pub k_dt: f64,
    /// s
    pub t_dt: f64,
    pub gains: Gains,
    /// Generation rate constraint, W/s.
    pub grc_rate: f64,
    /// W
    pub rated_power: f64,
    /// Dispatch set point added to the governor input, W.
    pub setpoint: f64,
    /// System power base for per-unit control signals, W.
    pub power_base: f64,
    /// Hz
    pub nominal_frequency: f64,
}

impl Default for DieselPlantParams {
    fn default() -> Self {
        Self {
            k_dg: 1.0,
            t_dg: 2.0,
            k_dt: 1.0,
            t_dt: 20.0,
            gains: Gains::LOAD_295,
            grc_rate: 0.03 * 40e3,
            rated_power: 40e3,
            setpoint: 20e3,
            power_base: 350e3,
            nominal_frequency: 50.0,
        }
    }
}

impl DieselPlantParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("diesel.t_dg_s", self.t_dg),
            ("diesel.t_dt_s", self.t_dt),
            ("diesel.rated_power_kw", self.rated_power),
            ("grid.power_base_kw", self.power_base),
            ("grid.nominal_frequency_hz", self.nominal_frequency),
        ];
        for (field, value) in positive {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::validation(
                    field,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        if !self.k_dg.is_finite() || !self.k_dt.is_finite() {
            return Err(Error::validation("diesel.k_dg", "gains must be finite"));
        }
        if !(self.grc_rate >= 0.0) {
            return Err(Error::validation(
                "diesel.grc_fraction_per_s",
                "must be non-negative",
            ));
        }
        if !(0.0..=self.rated_power).contains(&self.setpoint) {
            return Err(Error::validation(
                "diesel.setpoint_kw",
                format!(
                    "{} kW outside [0, {}] kW",
                    self.setpoint / 1e3,
                    self.rated_power / 1e3
                ),
            ));
        }
        self.gains.validate("controller")
    }

    fn limits(&self) -> Limits {
        Limits::new(0.0, self.rated_power).expect("validated rating")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DieselPlantState {
    /// Integral of the per-unit frequency error, s.
    pub pi_integral: TrapezoidIntegrator,
    pub governor: LagBlock,
    pub turbine: LagBlock,
    /// Last PI command, per unit.
    pub u_pi: f64,
    pub p_diesel: f64,
}

impl DieselPlantState {
    /// Equilibrium at the dispatch set point with zero frequency error.
    pub fn steady(params: &DieselPlantParams) -> Result<Self> {
        let p = params.setpoint;
        Ok(Self {
            pi_integral: TrapezoidIntegrator::new(0.0, 0.0),
            governor: LagBlock::new(params.k_dg, params.t_dg, params.k_dg * p)?,
            turbine: LagBlock::new(params.k_dt, params.t_dt, params.k_dg * params.k_dt * p)?,
            u_pi: 0.0,
            p_diesel: params.limits().apply(params.k_dg * params.k_dt * p),
        })
    }

    /// All dynamic states at zero.
    pub fn zero(params: &DieselPlantParams) -> Result<Self> {
        Ok(Self {
            pi_integral: TrapezoidIntegrator::new(0.0, 0.0),
            governor: LagBlock::new(params.k_dg, params.t_dg, 0.0)?,
            turbine: LagBlock::new(params.k_dt, params.t_dt, 0.0)?,
            u_pi: 0.0,
            p_diesel: 0.0,
        })
    }
}

/// Advances the diesel plant one step.
///
/// Governor input is `setpoint + S_base·(u_PI − e/R)` with `e = Δf/f_nom`.
/// The governor and turbine lags follow, then the rate limit, then the
/// capacity clamp. The integral is frozen while the output sits at a limit
/// and the error pushes further into it.
pub fn diesel_plant_step(
    state: &DieselPlantState,
    params: &DieselPlantParams,
    freq_deviation: f64,
    dt: f64,
    scheme: Scheme,
) -> DieselPlantState {
    let error = freq_deviation / params.nominal_frequency;
    let Gains { kp, ki, r } = params.gains;

    let at_upper = state.p_diesel >= params.rated_power && error < 0.0;
    let at_lower = state.p_diesel <= 0.0 && error > 0.0;
    let (u_pi, pi_integral) = if at_upper || at_lower {
        let held = state.pi_integral.hold(error);
        (-(kp * error + ki * held.value()), held)
    } else {
        pi_control(error, state.pi_integral, kp, ki, dt)
    };

    let governor_input = params.setpoint + params.power_base * (u_pi - error / r);
    let governor = state.governor.step(governor_input, dt, scheme);
    let turbine = state.turbine.step(governor.output(), dt, scheme);
    let limited = rate_limit(state.p_diesel, turbine.output(), params.grc_rate, dt);

    DieselPlantState {
        pi_integral,
        governor,
        turbine,
        u_pi,
        p_diesel: params.limits().apply(limited),
    }
}
