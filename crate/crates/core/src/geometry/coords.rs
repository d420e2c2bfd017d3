use serde::{Deserialize, Serialize};

use crate::isoparam::FoliationParams;
use crate::reduced::PhaseState;
use crate::shooting::ClosedProfile;

/// `r = sqrt(g/2) exp(2 xi / g)`.
pub fn r_from_xi(xi: f64, p: &FoliationParams) -> f64 {
    (p.g_f64() / 2.0).sqrt() * (2.0 / p.g_f64() * xi).exp()
}

/// `xi = (g/2) ln(sqrt(2/g) r)`.
pub fn xi_from_r(r: f64, p: &FoliationParams) -> f64 {
    0.5 * p.g_f64() * ((2.0 / p.g_f64()).sqrt() * r).ln()
}

/// `phi = (2/g) theta`. The CSV writer and its readers both go through this.
pub fn phi_from_theta(theta: f64, p: &FoliationParams) -> f64 {
    2.0 / p.g_f64() * theta
}

pub fn theta_from_phi(phi: f64, p: &FoliationParams) -> f64 {
    0.5 * p.g_f64() * phi
}

/// `(exp(2 xi / g) cos 2 theta, exp(2 xi / g) sin 2 theta)`.
pub fn psi(xi: f64, theta: f64, p: &FoliationParams) -> (f64, f64) {
    let rho = (2.0 / p.g_f64() * xi).exp();
    let (s, c) = (2.0 * theta).sin_cos();
    (rho * c, rho * s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarSample {
    pub t: f64,
    pub r: f64,
    pub phi: f64,
}

/// A curve in the `(r, phi)` half-plane of the reduced metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarProfile {
    pub params: FoliationParams,
    pub samples: Vec<PolarSample>,
    /// Last sample repeats the first.
    pub closed: bool,
}

impl PolarProfile {
    pub fn from_states(
        params: &FoliationParams,
        states: &[(f64, PhaseState)],
        closed: bool,
    ) -> Self {
        let samples = states
            .iter()
            .map(|&(t, s)| PolarSample {
                t,
                r: r_from_xi(s.xi, params),
                phi: phi_from_theta(s.theta, params),
            })
            .collect();
        Self {
            params: *params,
            samples,
            closed,
        }
    }
}

pub fn to_polar(profile: &ClosedProfile) -> PolarProfile {
    PolarProfile::from_states(&profile.params, &profile.samples, profile.is_closed)
}

/// A curve in Angenent's `(x, r_tilde)` half-plane.
#[derive(Debug, Clone, PartialEq)]
pub struct AngenentProfile {
    pub params: FoliationParams,
    pub points: Vec<(f64, f64)>,
    /// Last point repeats the first.
    pub closed: bool,
}

impl AngenentProfile {
    /// Keep `count` points at evenly spaced indices (closed profiles stay closed).
    pub fn decimate(&self, count: usize) -> AngenentProfile {
        let body = if self.closed && self.points.len() > 1 {
            &self.points[..self.points.len() - 1]
        } else {
            &self.points[..]
        };
        if count == 0 || count >= body.len() {
            return self.clone();
        }
        let mut points: Vec<(f64, f64)> =
            (0..count).map(|k| body[k * body.len() / count]).collect();
        if self.closed {
            points.push(points[0]);
        }
        AngenentProfile {
            params: self.params,
            points,
            closed: self.closed,
        }
    }
}

pub fn psi_map(profile: &ClosedProfile) -> AngenentProfile {
    let p = &profile.params;
    if p.g != 1 {
        log::warn!(
            "psi_map applied with g = {}; the image is not Angenent's half-plane",
            p.g
        );
    }
    AngenentProfile {
        params: *p,
        points: profile
            .samples
            .iter()
            .map(|(_, s)| psi(s.xi, s.theta, p))
            .collect(),
        closed: profile.is_closed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isoparam::make_params;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn polar_examples() {
        for g in [1, 2, 4, 6] {
            let p = make_params(g, 1, 1).unwrap();
            let gf = f64::from(g);
            let xi = 0.5 * gf * (2.0 / gf).sqrt().ln();
            assert!((r_from_xi(xi, &p) - 1.0).abs() < 1e-15);
            assert!((phi_from_theta(p.theta_star, &p) - p.phi_star).abs() < 1e-15);
            for (xi, th) in [(-0.7, 0.1), (0.3, 0.9), (2.0, 1.5)] {
                let back = xi_from_r(r_from_xi(xi, &p), &p);
                assert!((back - xi).abs() < 1e-12);
                assert!((theta_from_phi(phi_from_theta(th, &p), &p) - th).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn psi_examples() {
        let p = make_params(1, 1, 1).unwrap();
        let (x, r) = psi(0.4, FRAC_PI_4, &p);
        assert!(x.abs() < 1e-15 && r > 0.0);
        let (x, r) = psi(0.4, 1e-9, &p);
        assert!(x > 0.0 && r > 0.0 && r < 1e-8);
        let (x, r) = psi(0.4, 0.3, &p);
        assert!((x * x + r * r - (4.0f64 * 0.4).exp()).abs() < 1e-13);
    }

    #[test]
    fn decimate_keeps_closure() {
        let p = make_params(1, 1, 1).unwrap();
        let mut points: Vec<(f64, f64)> = (0..10).map(|i| (f64::from(i), 1.0)).collect();
        points.push(points[0]);
        let a = AngenentProfile {
            params: p,
            points,
            closed: true,
        };
        let d = a.decimate(5);
        assert_eq!(d.points.len(), 6);
        assert_eq!(d.points[0], d.points[5]);
        assert_eq!(a.decimate(100).points.len(), 11);
    }
}
