//! Fixed-step building blocks shared by the plant models.
//!
//! Every block is a small `Copy` value advanced by a pure `step` call, so
//! independent simulations never share state and can run side by side.
//! Inputs are held constant across a step (zero-order hold).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Classical fourth-order Runge-Kutta.
    #[default]
    Rk4,
    /// Explicit Euler, kept for cross-checking.
    Euler,
}

/// Advances `dx/dt = f(x)` by one step of size `dt`.
#[inline]
pub fn integrate(scheme: Scheme, x: f64, dt: f64, f: impl Fn(f64) -> f64) -> f64 {
    match scheme {
        Scheme::Euler => x + dt * f(x),
        Scheme::Rk4 => {
            let k1 = f(x);
            let k2 = f(x + 0.5 * dt * k1);
            let k3 = f(x + 0.5 * dt * k2);
            let k4 = f(x + dt * k3);
            x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        }
    }
}

/// First-order lag `K / (1 + sT)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagBlock {
    gain: f64,
    time_constant: f64,
    state: f64,
}

impl LagBlock {
    pub fn new(gain: f64, time_constant: f64, initial: f64) -> Result<Self> {
        if !(time_constant > 0.0) || !time_constant.is_finite() {
            return Err(Error::validation(
                "time_constant",
                format!("must be positive and finite, got {time_constant}"),
            ));
        }
        if !gain.is_finite() || !initial.is_finite() {
            return Err(Error::validation(
                "gain",
                "gain and initial state must be finite",
            ));
        }
        Ok(Self {
            gain,
            time_constant,
            state: initial,
        })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn time_constant(&self) -> f64 {
        self.time_constant
    }

    pub fn output(&self) -> f64 {
        self.state
    }

    /// Advances `dx/dt = (K·u − x)/T` with `u` held over the step.
    #[inline]
    pub fn step(self, u: f64, dt: f64, scheme: Scheme) -> Self {
        let target = self.gain * u;
        let t = self.time_constant;
        let state = integrate(scheme, self.state, dt, |x| (target - x) / t);
        Self { state, ..self }
    }

    pub(crate) fn clamp_state(&mut self, lo: f64, hi: f64) {
        self.state = self.state.clamp(lo, hi);
    }
}

/// Free-function form of [`LagBlock::step`].
pub fn lag_step(block: LagBlock, u: f64, dt: f64, scheme: Scheme) -> LagBlock {
    block.step(u, dt, scheme)
}

/// One trapezoidal step of `∫u dt` given the input at both ends of the step.
#[inline]
pub fn integrator_step(state: f64, u_start: f64, u_end: f64, dt: f64) -> f64 {
    state + 0.5 * (u_start + u_end) * dt
}

/// Trapezoidal accumulator that remembers the previous input sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapezoidIntegrator {
    value: f64,
    last_input: f64,
}

impl TrapezoidIntegrator {
    pub fn new(value: f64, first_input: f64) -> Self {
        Self {
            value,
            last_input: first_input,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn last_input(&self) -> f64 {
        self.last_input
    }

    /// Integrates from the previous sample to `u` over `dt`.
    #[inline]
    pub fn step(self, u: f64, dt: f64) -> Self {
        Self {
            value: integrator_step(self.value, self.last_input, u, dt),
            last_input: u,
        }
    }

    /// Records `u` as the latest sample without accumulating (integrator hold).
    #[inline]
    pub fn hold(self, u: f64) -> Self {
        Self {
            last_input: u,
            ..self
        }
    }
}

/// Limits the move from `previous` to `candidate` to `max_rate·dt`.
#[inline]
pub fn rate_limit(previous: f64, candidate: f64, max_rate: f64, dt: f64) -> f64 {
    let band = max_rate * dt;
    candidate.clamp(previous - band, previous + band)
}

/// A closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Limits {
    lo: f64,
    hi: f64,
}

impl Limits {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::validation(
                "limits",
                format!("lower bound {lo} exceeds upper bound {hi}"),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn apply(&self, value: f64) -> f64 {
        value.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, value: f64) -> bool {
        (self.lo..=self.hi).contains(&value)
    }
}

/// `clamp(value, lo, hi)`; fails when `lo > hi`.
pub fn saturate(value: f64, lo: f64, hi: f64) -> Result<f64> {
    Ok(Limits::new(lo, hi)?.apply(value))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    /// Step size in seconds.
    #[serde(rename = "dt_s")]
    pub dt: f64,
    #[serde(rename = "t_end_s")]
    pub t_end: f64,
    pub scheme: Scheme,
    /// Every n-th step is emitted as a time-series record.
    pub output_decimation: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            dt: 0.01,
            t_end: 120.0,
            scheme: Scheme::Rk4,
            output_decimation: 10,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::validation("solver.dt_s", "must be positive"));
        }
        if !(self.t_end > self.dt) || !self.t_end.is_finite() {
            return Err(Error::validation("solver.t_end_s", "must exceed dt_s"));
        }
        if self.output_decimation == 0 {
            return Err(Error::validation(
                "solver.output_decimation",
                "must be at least 1",
            ));
        }
        Ok(())
    }

    /// Number of steps needed to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Warns when `dt` exceeds a tenth of the fastest time constant.
    pub fn stability_warning(&self, min_time_constant: f64) -> Option<String> {
        (self.dt > min_time_constant / 10.0).then(|| {
            format!(
                "dt = {} s exceeds a tenth of the fastest time constant ({} s)",
                self.dt, min_time_constant
            )
        })
    }
}
