use serde::{Deserialize, Serialize};

use crate::ode::Settings;

/// Numerical tolerances shared by the integrator, the event locator and the shooting search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Mixed absolute/relative local error per step (atol = rtol).
    pub step: f64,
    /// Time resolution of event localization.
    pub event: f64,
    /// Width at which the critical-value bisection stops.
    pub bisect: f64,
    /// Largest accepted `|cos alpha|` at a closing crossing.
    pub orth: f64,
    /// Events whose function vanishes at the start are ignored on `(0, t_eps]`.
    pub t_eps: f64,
    /// First events closer than this in time are treated as simultaneous.
    pub coincidence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            step: 1e-10,
            event: 1e-12,
            bisect: 1e-12,
            orth: 1e-8,
            t_eps: 1e-6,
            coincidence: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn ode_settings(&self) -> Settings {
        Settings {
            rtol: self.step,
            atol: self.step,
            event_tol: self.event,
            coincidence: self.coincidence,
            ..Settings::default()
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let fields = [
            ("step", self.step),
            ("event", self.event),
            ("bisect", self.bisect),
            ("orth", self.orth),
            ("t_eps", self.t_eps),
            ("coincidence", self.coincidence),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!(
                    "tolerance {name} must be positive and finite, got {v}"
                ));
            }
        }
        Ok(())
    }
}
