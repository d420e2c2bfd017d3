//! Isoparametric foliation data.
//!
//! A foliation of `S^n` is described here only by its arithmetic invariants:
//! the number `g` of distinct principal curvatures of a regular leaf and the
//! two alternating multiplicities `m1`, `m2`. Everything else the solver needs
//! (dimension, the minimal leaf, the sphere level of the reduced system) is
//! derived once at construction.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Admissible numbers of distinct principal curvatures.
pub const ADMISSIBLE_G: [u32; 5] = [1, 2, 3, 4, 6];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoliationParams {
    pub g: u32,
    pub m1: u32,
    pub m2: u32,
    /// Ambient sphere dimension, `n - 1 = (g/2)(m1 + m2)`.
    pub n: u32,
    /// `m = (2/g) n = m1 + m2 + 2/g`.
    pub m: f64,
    /// Scaled latitude of the minimal leaf, `arctan(sqrt(m1/m2))`.
    pub theta_star: f64,
    /// Distance of the minimal leaf from the first focal manifold.
    pub phi_star: f64,
    /// The xi-level `(g/4) ln m` of the round sphere.
    pub xi_sphere: f64,
    /// `ln tan(theta_star) = (1/2) ln(m1/m2)`.
    pub(crate) logit_star: f64,
}

impl FoliationParams {
    pub fn new(g: u32, m1: u32, m2: u32) -> Result<Self> {
        if !ADMISSIBLE_G.contains(&g) {
            return Err(Error::InvalidParams(format!(
                "g = {g} is not one of {ADMISSIBLE_G:?}"
            )));
        }
        if m1 == 0 || m2 == 0 {
            return Err(Error::InvalidParams(format!(
                "multiplicities must be positive (m1 = {m1}, m2 = {m2})"
            )));
        }
        if g % 2 == 1 && m1 != m2 {
            return Err(Error::InvalidParams(format!(
                "g = {g} is odd, which forces m1 = m2 (got m1 = {m1}, m2 = {m2})"
            )));
        }
        let twice_codim = g * (m1 + m2);
        if !twice_codim.is_multiple_of(2) {
            return Err(Error::InvalidParams(format!(
                "n - 1 = (g/2)(m1 + m2) = {}/2 is not an integer",
                twice_codim
            )));
        }
        let n = twice_codim / 2 + 1;
        if n < 2 {
            return Err(Error::InvalidParams(format!("n = {n} < 2")));
        }

        let gf = f64::from(g);
        let ratio = f64::from(m1) / f64::from(m2);
        let m = 2.0 / gf * f64::from(n);
        let theta_star = ratio.sqrt().atan();
        Ok(Self {
            g,
            m1,
            m2,
            n,
            m,
            theta_star,
            phi_star: 2.0 / gf * theta_star,
            xi_sphere: gf / 4.0 * m.ln(),
            logit_star: 0.5 * ratio.ln(),
        })
    }

    pub fn g_f64(&self) -> f64 {
        f64::from(self.g)
    }

    pub fn equal_multiplicities(&self) -> bool {
        self.m1 == self.m2
    }

    /// `l(theta) = m1 cos^2(theta) - m2 sin^2(theta)`.
    pub fn l(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        f64::from(self.m1) * c * c - f64::from(self.m2) * s * s
    }

    /// Mean curvature coefficient `H(theta) = l(theta) / sin(2 theta)` of the graph equation.
    pub fn h_reduced(&self, theta: f64) -> Result<f64> {
        check_open(theta, 0.0, PI / 2.0, "H(theta)", "(0, pi/2)")?;
        Ok(0.5 * f64::from(self.m1) / theta.tan() - 0.5 * f64::from(self.m2) * theta.tan())
    }

    /// Leaf volume `sin(g phi/2)^m1 cos(g phi/2)^m2`, up to a foliation-dependent constant.
    pub fn leaf_volume_unnormalized(&self, phi: f64) -> Result<f64> {
        check_open(phi, 0.0, PI / self.g_f64(), "leaf volume", "(0, pi/g)")?;
        let half = 0.5 * self.g_f64() * phi;
        Ok(half.sin().powi(self.m1 as i32) * half.cos().powi(self.m2 as i32))
    }

    /// Principal curvatures `cot(phi + (i-1) pi/g)` of the leaf at distance `phi`,
    /// with multiplicities alternating `m1, m2, m1, ...`.
    pub fn principal_curvatures(&self, phi: f64) -> Result<Vec<(f64, u32)>> {
        let g = self.g_f64();
        check_open(phi, 0.0, PI / g, "principal curvatures", "(0, pi/g)")?;
        Ok((0..self.g)
            .map(|i| {
                let angle = phi + f64::from(i) * PI / g;
                let mult = if i % 2 == 0 { self.m1 } else { self.m2 };
                (angle.cos() / angle.sin(), mult)
            })
            .collect())
    }
}

pub fn make_params(g: u32, m1: u32, m2: u32) -> Result<FoliationParams> {
    FoliationParams::new(g, m1, m2)
}

fn check_open(
    value: f64,
    lo: f64,
    hi: f64,
    quantity: &'static str,
    domain: &'static str,
) -> Result<()> {
    if value > lo && value < hi {
        Ok(())
    } else {
        Err(Error::Domain {
            quantity,
            value,
            domain,
        })
    }
}
