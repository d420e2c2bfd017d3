//! Angenent's shooting problem, solved directly in the `(x, r_tilde)` half-plane.
//!
//! The metric is `exp(2 sigma) (dx^2 + dr^2)` with
//! `sigma = (n - 1) ln r - tau (x^2 + r^2) / 2`, so geodesics with an affine
//! parameter solve `v' = |v|^2 grad sigma - 2 (grad sigma . v) v` where
//! `grad sigma = (-tau x, (n - 1) / r - tau r)`. Nothing here goes through
//! the reduced system.
//!
//! With `tau = 1/2` the map `(xi, theta) -> exp(2 xi)(cos 2 theta, sin 2 theta)`
//! carries the reduced geodesics onto these, so `R* = exp(2 xi0*)`. Other values
//! of `tau` rescale the plane by `sqrt(tau / (1/2))`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::coords::AngenentProfile;
use crate::isoparam::FoliationParams;
use crate::ode::{EventFn, Problem, StopRule, Vector};
use crate::tolerances::Tolerances;

/// The scale at which the oracle and the reduced pipeline share coordinates.
pub const TAU_MATCHING_PSI: f64 = 0.5;

const X_ZERO: usize = 0;
const R_TURN: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub tau: f64,
    pub t_max: f64,
    /// Lower bracket end is `R_sphere (1 + lo_offset)`.
    pub lo_offset: f64,
    /// First upper offset above `R_sphere`; later offsets double.
    pub first_step: f64,
    pub ceiling: f64,
    /// Time spacing of the returned profile samples.
    pub spacing: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            tau: TAU_MATCHING_PSI,
            t_max: 200.0,
            lo_offset: 2e-3,
            first_step: 0.5,
            ceiling: 20.0,
            spacing: 1e-3,
        }
    }
}

fn rhs(y: &Vector<4>, n: f64, tau: f64) -> Vector<4> {
    let (x, r, vx, vr) = (y[0], y[1], y[2], y[3]);
    let gx = -tau * x;
    let gr = (n - 1.0) / r - tau * r;
    let dot = gx * vx + gr * vr;
    let speed2 = vx * vx + vr * vr;
    [
        vx,
        vr,
        speed2 * gx - 2.0 * dot * vx,
        speed2 * gr - 2.0 * dot * vr,
    ]
}

/// Outcome of one shot from `(0, R)` with unit velocity along `+x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleShot {
    /// `x` returned to zero before `r_tilde'` vanished.
    pub returns_first: bool,
    /// Time of the first event, if any.
    pub time: Option<f64>,
    /// `|r_tilde'| / |v|` at the return, when it came first.
    pub defect: Option<f64>,
}

fn problem_settings(tol: &Tolerances) -> crate::ode::Settings {
    tol.ode_settings()
}

/// Shoot once and report which event came first.
pub fn oracle_shot(
    radius: f64,
    n: u32,
    cfg: &OracleConfig,
    tol: &Tolerances,
) -> Result<OracleShot> {
    if !(radius > 0.0) {
        return Err(Error::Precondition(format!(
            "start radius must be positive, got {radius}"
        )));
    }
    let nf = f64::from(n);
    let x_zero = |y: &Vector<4>| y[0];
    let r_turn = |y: &Vector<4>| y[3];
    let events = [
        EventFn {
            id: X_ZERO,
            g: &x_zero,
            terminal: true,
            ignore_within: tol.t_eps,
        },
        EventFn {
            id: R_TURN,
            g: &r_turn,
            terminal: true,
            ignore_within: tol.t_eps,
        },
    ];
    let positive = |y: &Vector<4>| y[1] > 0.0;
    let sol = Problem::new(|y: &Vector<4>| rhs(y, nf, cfg.tau), problem_settings(tol))
        .with_events(&events, StopRule::AfterTerminalRoots(1))
        .with_guard(&positive)
        .solve([0.0, radius, 1.0, 0.0], cfg.t_max)?;
    Ok(match sol.roots.first() {
        None => OracleShot {
            returns_first: false,
            time: None,
            defect: None,
        },
        Some(root) => {
            let returns = root.id == X_ZERO;
            OracleShot {
                returns_first: returns,
                time: Some(root.t),
                defect: returns.then(|| root.y[3].abs() / root.y[2].hypot(root.y[3])),
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub r_star: f64,
    pub lo: f64,
    pub bracket_width: f64,
    pub orthogonality_defect: f64,
    /// Time of the orthogonal return to `x = 0`.
    pub half_time: f64,
    /// Closed profile: the computed half and its mirror image in `x`.
    pub profile: AngenentProfile,
}

/// Critical radius `R*` and the closed geodesic through `(0, R*)`.
pub fn angenent_oracle(
    p: &FoliationParams,
    cfg: &OracleConfig,
    tol: &Tolerances,
) -> Result<OracleResult> {
    if p.g != 1 {
        return Err(Error::Precondition(format!(
            "the oracle needs g = 1, got g = {}",
            p.g
        )));
    }
    if !(cfg.tau > 0.0) {
        return Err(Error::Precondition(format!(
            "tau must be positive, got {}",
            cfg.tau
        )));
    }
    let r_sphere = (f64::from(p.n) / cfg.tau).sqrt();
    let shoot = |radius: f64| oracle_shot(radius, p.n, cfg, tol);

    let mut lo = r_sphere * (1.0 + cfg.lo_offset);
    if shoot(lo)?.returns_first {
        return Err(Error::BracketInit(format!(
            "R = {lo} already returns first"
        )));
    }
    let mut hi = None;
    let mut offset = cfg.first_step;
    loop {
        let capped = offset.min(cfg.ceiling);
        let candidate = r_sphere + capped;
        if candidate > lo {
            if shoot(candidate)?.returns_first {
                hi = Some(candidate);
                break;
            }
            lo = candidate;
        }
        if capped >= cfg.ceiling {
            break;
        }
        offset *= 2.0;
    }
    let mut hi = hi.ok_or_else(|| {
        Error::BracketInit(format!(
            "no radius up to R_sphere + {} returns first",
            cfg.ceiling
        ))
    })?;
    while hi - lo > tol.bisect {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if shoot(mid)?.returns_first {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let shot = shoot(hi)?;
    let defect = shot.defect.unwrap_or(f64::INFINITY);
    if !(defect <= tol.orth) {
        return Err(Error::NonConvergence {
            defect,
            tolerance: tol.orth,
        });
    }
    let half_time = shot.time.expect("a returning shot has an event time");

    let nf = f64::from(p.n);
    let sol = Problem::new(|y: &Vector<4>| rhs(y, nf, cfg.tau), problem_settings(tol))
        .solve([0.0, hi, 1.0, 0.0], half_time)?;
    let count = ((half_time / cfg.spacing).ceil() as usize).max(4);
    let half: Vec<(f64, f64)> = sol
        .sample_uniform(count)
        .into_iter()
        .map(|(_, y)| (y[0], y[1]))
        .collect();
    let mut points = half.clone();
    points.extend(half.iter().rev().skip(1).map(|&(x, r)| (-x, r)));
    let last = points.len() - 1;
    points[last] = points[0];

    Ok(OracleResult {
        r_star: hi,
        lo,
        bracket_width: hi - lo,
        orthogonality_defect: defect,
        half_time,
        profile: AngenentProfile {
            params: *p,
            points,
            closed: true,
        },
    })
}

/// Largest `|kappa - d sigma / dN|` along a polyline in the `(x, r_tilde)` plane,
/// with curvature from the circle through three consecutive points.
pub fn angenent_residual(points: &[(f64, f64)], n: u32, tau: f64) -> f64 {
    let nf = f64::from(n);
    points
        .windows(3)
        .map(|w| {
            let (a, b, c) = (w[0], w[1], w[2]);
            let (ux, uy) = (b.0 - a.0, b.1 - a.1);
            let (vx, vy) = (c.0 - b.0, c.1 - b.1);
            let (wx, wy) = (c.0 - a.0, c.1 - a.1);
            let cross = ux * vy - uy * vx;
            let kappa = 2.0 * cross / (ux.hypot(uy) * vx.hypot(vy) * wx.hypot(wy));
            let len = wx.hypot(wy);
            let normal = (-wy / len, wx / len);
            let grad = (-tau * b.0, (nf - 1.0) / b.1 - tau * b.1);
            (kappa - (grad.0 * normal.0 + grad.1 * normal.1)).abs()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isoparam::make_params;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn sphere_circle_is_a_geodesic() {
        for n in [2u32, 3] {
            let radius = (f64::from(n) / TAU_MATCHING_PSI).sqrt();
            let pts: Vec<(f64, f64)> = (0..=300)
                .map(|i| {
                    let a = 0.3 + 2.5 * f64::from(i) / 300.0;
                    (radius * a.cos(), radius * a.sin())
                })
                .collect();
            let res = angenent_residual(&pts, n, TAU_MATCHING_PSI);
            assert!(res < 1e-10, "{res}");
        }
    }

    #[test]
    fn integrated_geodesics_have_small_residual() {
        let cfg = OracleConfig::default();
        let sol = Problem::new(|y: &Vector<4>| rhs(y, 2.0, cfg.tau), tol().ode_settings())
            .solve([0.0, 3.0, 1.0, 0.0], 1.0)
            .unwrap();
        let pts: Vec<(f64, f64)> = sol
            .sample_uniform(2000)
            .into_iter()
            .map(|(_, y)| (y[0], y[1]))
            .collect();
        assert!(angenent_residual(&pts, 2, cfg.tau) < 1e-5);
    }

    #[test]
    fn critical_radius_and_scaling() {
        let p = make_params(1, 1, 1).unwrap();
        let half = angenent_oracle(&p, &OracleConfig::default(), &tol()).unwrap();
        assert!(half.orthogonality_defect < 1e-8);
        assert!(half.r_star > (2.0f64 / TAU_MATCHING_PSI).sqrt());
        let profile = &half.profile;
        assert_eq!(profile.points.first(), profile.points.last());

        let unit = OracleConfig {
            tau: 1.0,
            ..OracleConfig::default()
        };
        let one = angenent_oracle(&p, &unit, &tol()).unwrap();
        assert!((one.r_star * 2f64.sqrt() - half.r_star).abs() < 1e-8);
    }

    #[test]
    fn oracle_rejects_g2() {
        let p = make_params(2, 1, 1).unwrap();
        assert!(angenent_oracle(&p, &OracleConfig::default(), &tol()).is_err());
    }
}
