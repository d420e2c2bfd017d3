//! Geodesic defect of a sampled curve in the reduced metric
//! `r^(2n-2) exp(-r^2) sin(g phi/2)^(2 m1) cos(g phi/2)^(2 m2) (dr^2 + r^2 dphi^2)`.
//!
//! In the flat chart `(a, b) = (r cos phi, r sin phi)` the metric is `exp(2 sigma)`
//! times the Euclidean one, and a curve `x(t)` is a geodesic up to
//! parametrization iff the normal part of
//! `x'' + 2 (grad sigma . x') x' - |x'|^2 grad sigma` vanishes. Dividing that
//! normal part by `|x'|^2` gives `kappa - d sigma / dN`, which does not depend
//! on the parametrization.

use crate::error::{Error, Result};
use crate::geometry::coords::PolarProfile;

/// `(d sigma / dr, d sigma / dphi)`.
fn sigma_grad_polar(r: f64, phi: f64, n: f64, g: f64, m1: f64, m2: f64) -> (f64, f64) {
    let half = 0.5 * g * phi;
    let s_r = (n - 1.0) / r - r;
    let s_phi = 0.5 * g * (m1 / half.tan() - m2 * half.tan());
    (s_r, s_phi)
}

/// Largest `|kappa - d sigma / dN|` over the interior samples.
///
/// Samples must be equally spaced in `t`. Derivatives are 4th-order centered
/// differences; closed profiles wrap around.
pub fn geodesic_residual_reduced(profile: &PolarProfile) -> Result<f64> {
    let pts = &profile.samples;
    let n_pts = if profile.closed {
        pts.len().saturating_sub(1)
    } else {
        pts.len()
    };
    if n_pts < 5 {
        return Err(Error::InsufficientSamples {
            needed: 5,
            got: n_pts,
        });
    }
    let h = pts[1].t - pts[0].t;
    let span = pts[pts.len() - 1].t - pts[0].t;
    let expected = span / (pts.len() - 1) as f64;
    if !(h > 0.0)
        || pts
            .windows(2)
            .any(|w| ((w[1].t - w[0].t) - expected).abs() > 1e-6 * expected)
    {
        return Err(Error::Precondition(
            "samples must be equally spaced in t".into(),
        ));
    }
    let h = expected;

    let p = &profile.params;
    let (n, g, m1, m2) = (f64::from(p.n), p.g_f64(), f64::from(p.m1), f64::from(p.m2));
    let ab: Vec<(f64, f64)> = pts[..n_pts]
        .iter()
        .map(|s| (s.r * s.phi.cos(), s.r * s.phi.sin()))
        .collect();
    let at = |i: isize| -> (f64, f64) { ab[i.rem_euclid(n_pts as isize) as usize] };

    let range: Vec<usize> = if profile.closed {
        (0..n_pts).collect()
    } else {
        (2..n_pts - 2).collect()
    };
    let mut worst = 0.0f64;
    for i in range {
        let i = i as isize;
        let (m2p, m1p, c, p1, p2) = (at(i - 2), at(i - 1), at(i), at(i + 1), at(i + 2));
        let d1 =
            |f: fn((f64, f64)) -> f64| (-f(p2) + 8.0 * f(p1) - 8.0 * f(m1p) + f(m2p)) / (12.0 * h);
        let d2 = |f: fn((f64, f64)) -> f64| {
            (-f(p2) + 16.0 * f(p1) - 30.0 * f(c) + 16.0 * f(m1p) - f(m2p)) / (12.0 * h * h)
        };
        let (va, vb) = (d1(|q| q.0), d1(|q| q.1));
        let (aa, ab2) = (d2(|q| q.0), d2(|q| q.1));
        let speed2 = va * va + vb * vb;
        if speed2 == 0.0 {
            return Err(Error::Precondition(
                "curve is stationary at a sample".into(),
            ));
        }
        let s = &pts[i as usize];
        let (s_r, s_phi) = sigma_grad_polar(s.r, s.phi, n, g, m1, m2);
        let (sp, cp) = s.phi.sin_cos();
        let grad = (s_r * cp - s_phi / s.r * sp, s_r * sp + s_phi / s.r * cp);
        let normal = (-vb / speed2.sqrt(), va / speed2.sqrt());
        let defect =
            (aa * normal.0 + ab2 * normal.1) - speed2 * (grad.0 * normal.0 + grad.1 * normal.1);
        worst = worst.max(defect.abs() / speed2);
    }
    Ok(worst)
}
