//! Frequency dynamics of the isolated system.
//!
//! Per unit on the system base, `d(Δf_pu)/dt = (ΔP_pu − D_pu·Δf_pu) / 2H`
//! where `ΔP` is the accelerating power: generation minus load, both taken
//! as deviations from the initial balanced dispatch.

use crate::error::{Error, Result};
use crate::kernel::{integrate, Scheme};

#[derive(Debug, Clone, PartialEq)]
pub struct GridParams {
    /// Inertia constant on the system base, s.
    pub inertia_h: f64,
    /// Load damping, W/Hz.
    pub damping: f64,
    /// Hz
    pub nominal_frequency: f64,
    /// W
    pub power_base: f64,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            inertia_h: 5.0,
            damping: 0.012e6,
            nominal_frequency: 50.0,
            power_base: 350e3,
        }
    }
}

impl GridParams {
    pub fn validate(&self) -> Result<()> {
        for (field, value) in [
            ("grid.inertia_h_s", self.inertia_h),
            ("grid.nominal_frequency_hz", self.nominal_frequency),
            ("grid.power_base_kw", self.power_base),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::validation(
                    field,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        if !(self.damping >= 0.0) || !self.damping.is_finite() {
            return Err(Error::validation(
                "grid.damping_mw_per_hz",
                "must be non-negative",
            ));
        }
        Ok(())
    }

    /// `D·f_nom / S_base`, per-unit power per per-unit frequency.
    pub fn damping_pu(&self) -> f64 {
        self.damping * self.nominal_frequency / self.power_base
    }

    /// `dΔf/dt` in Hz/s for a deviation `freq_deviation` and accelerating power in W.
    #[inline]
    pub fn derivative(&self, freq_deviation: f64, accelerating_power: f64) -> f64 {
        let f = self.nominal_frequency;
        let dp = accelerating_power / self.power_base;
        f * (dp - self.damping_pu() * freq_deviation / f) / (2.0 * self.inertia_h)
    }

    /// Power implied by a frequency state: `2H·S/f·dΔf/dt + D·Δf`, W.
    pub fn implied_accelerating_power(&self, state: &GridState) -> f64 {
        2.0 * self.inertia_h * self.power_base / self.nominal_frequency * state.freq_derivative
            + self.damping * state.freq_deviation
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GridState {
    /// Hz
    pub freq_deviation: f64,
    /// Hz/s, evaluated at the current state and power balance.
    pub freq_derivative: f64,
}

impl GridState {
    pub fn at(params: &GridParams, freq_deviation: f64, accelerating_power: f64) -> Self {
        Self {
            freq_deviation,
            freq_derivative: params.derivative(freq_deviation, accelerating_power),
        }
    }

    /// Re-evaluates the derivative for a new power balance.
    pub fn refresh(self, params: &GridParams, accelerating_power: f64) -> Self {
        Self::at(params, self.freq_deviation, accelerating_power)
    }
}

/// Generation minus load relative to the initial operating point, W.
#[inline]
pub fn accelerating_power(p_wind: f64, p_diesel: f64, p_load: f64, initial_imbalance: f64) -> f64 {
    (p_wind + p_diesel - p_load) - initial_imbalance
}

/// Advances Δf one step with the accelerating power held over the step.
pub fn frequency_step(
    state: &GridState,
    params: &GridParams,
    accelerating_power: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<GridState> {
    let df = integrate(scheme, state.freq_deviation, dt, |x| {
        params.derivative(x, accelerating_power)
    });
    if !df.is_finite() {
        return Err(Error::SimulationFault {
            t: f64::NAN,
            message: "frequency deviation is not finite".into(),
        });
    }
    if df.abs() >= params.nominal_frequency {
        return Err(Error::SimulationFault {
            t: f64::NAN,
            message: format!("frequency deviation {df:.3} Hz exceeds nominal frequency"),
        });
    }
    Ok(GridState::at(params, df, accelerating_power))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn balanced_system_stays_put() {
        let params = GridParams::default();
        let mut s = GridState::at(&params, 0.0, accelerating_power(275e3, 20e3, 295e3, 0.0));
        for _ in 0..10_000 {
            s = frequency_step(&s, &params, 0.0, 0.01, Scheme::Rk4).unwrap();
        }
        assert_eq!(s.freq_deviation, 0.0);
        assert_eq!(s.freq_derivative, 0.0);
    }

    #[test]
    fn damping_in_per_unit() {
        // 0.012 MW/Hz · 50 Hz / 0.35 MW
        assert_abs_diff_eq!(
            GridParams::default().damping_pu(),
            1.714_285_714,
            epsilon = 1e-9
        );
    }

    #[test]
    fn deficit_pulls_frequency_down() {
        let params = GridParams::default();
        let mut s = GridState::default();
        for _ in 0..100 {
            s = frequency_step(&s, &params, -11e3, 0.01, Scheme::Rk4).unwrap();
            assert!(s.freq_deviation < 0.0);
        }
        // damping-only steady state: ΔP / D
        for _ in 0..200_000 {
            s = frequency_step(&s, &params, -11e3, 0.01, Scheme::Rk4).unwrap();
        }
        assert_abs_diff_eq!(s.freq_deviation, -11e3 / 0.012e6, epsilon = 1e-6);
    }

    #[test]
    fn implied_power_matches_balance() {
        let params = GridParams::default();
        let s = GridState::at(&params, -0.12, 7_300.0);
        assert_abs_diff_eq!(
            params.implied_accelerating_power(&s),
            7_300.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn runaway_is_a_fault() {
        let params = GridParams {
            damping: 0.0,
            ..GridParams::default()
        };
        let mut s = GridState::default();
        let mut result = Ok(s);
        for _ in 0..100_000 {
            result = frequency_step(&s, &params, -350e3, 0.01, Scheme::Rk4);
            match result {
                Ok(next) => s = next,
                Err(_) => break,
            }
        }
        assert!(matches!(result, Err(Error::SimulationFault { .. })));
    }
}
