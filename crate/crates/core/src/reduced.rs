//! The reduced geodesic system on `(xi, theta, alpha)`.
//!
//! ```text
//! xi'    = cos(alpha) sin(2 theta)
//! theta' = sin(alpha) sin(2 theta)
//! alpha' = sin(alpha) sin(2 theta) (exp(4 xi / g) - m) + 2 cos(alpha) l(theta)
//! ```
//!
//! Orbits of this system are the geodesics of the reduced metric after the
//! logarithmic radial and scaled angular substitutions. It is integrated in
//! the chart `(xi, u, beta)` with `u = ln tan(theta)` and `beta = alpha - pi/2`:
//!
//! ```text
//! xi'   = -sin(beta) sech(u)
//! u'    = 2 cos(beta)
//! beta' = cos(beta) sech(u) m expm1(4 (xi - xi_sphere) / g) - 2 sin(beta) l(u)
//! ```
//!
//! The chart covers the whole open strip `0 < theta < pi/2`, so the boundary
//! never has to be guarded. Trig of `beta` is reduced by exact quarter turns and
//! `l` is written to vanish exactly at `u*`, so the two trivial families
//! (`beta = 0` at the sphere level, `u = u*` with `beta = -pi/2` or `pi/2`) are
//! reproduced without rounding drift. That matters for the outgoing cone, which
//! is transversally unstable.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isoparam::FoliationParams;
use crate::ode::{EventFn, Problem, Solution, StopRule, Vector};
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub xi: f64,
    pub theta: f64,
    /// Direction angle, unwrapped.
    pub alpha: f64,
}

impl PhaseState {
    pub fn new(xi: f64, theta: f64, alpha: f64) -> Self {
        Self { xi, theta, alpha }
    }

    /// `(xi0, theta*, pi/2)`: the start used by the shooting classification.
    pub fn canonical(xi0: f64, p: &FoliationParams) -> Self {
        Self::new(xi0, p.theta_star, FRAC_PI_2)
    }

    pub(crate) fn to_chart(self, p: &FoliationParams) -> Vector<3> {
        let u = if self.theta == p.theta_star {
            p.logit_star
        } else {
            self.theta.tan().ln()
        };
        [self.xi, u, self.alpha - FRAC_PI_2]
    }

    pub(crate) fn from_chart(y: &Vector<3>) -> Self {
        Self::new(y[0], y[1].exp().atan(), y[2] + FRAC_PI_2)
    }

    /// `xi'`, which vanishes exactly at the xi-extrema.
    pub fn xi_rate(&self) -> f64 {
        self.alpha.cos() * (2.0 * self.theta).sin()
    }

    pub fn theta_rate(&self) -> f64 {
        self.alpha.sin() * (2.0 * self.theta).sin()
    }

    /// Euclidean distance in `(xi, theta, alpha)` with `alpha` compared modulo `2 pi`.
    pub fn distance_mod_2pi(&self, other: &PhaseState) -> f64 {
        let da = wrap_angle(self.alpha - other.alpha);
        ((self.xi - other.xi).powi(2) + (self.theta - other.theta).powi(2) + da * da).sqrt()
    }

    pub fn distance(&self, other: &PhaseState) -> f64 {
        ((self.xi - other.xi).powi(2)
            + (self.theta - other.theta).powi(2)
            + (self.alpha - other.alpha).powi(2))
        .sqrt()
    }
}

/// Reduce an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

fn check_theta(theta: f64, quantity: &'static str) -> Result<()> {
    if theta > 0.0 && theta < FRAC_PI_2 {
        Ok(())
    } else {
        Err(Error::Domain {
            quantity,
            value: theta,
            domain: "(0, pi/2)",
        })
    }
}

/// Right-hand side of the reduced system in `(xi, theta, alpha)`.
pub fn rhs(s: &PhaseState, p: &FoliationParams) -> Result<(f64, f64, f64)> {
    check_theta(s.theta, "reduced system")?;
    let (sa, ca) = s.alpha.sin_cos();
    let s2 = (2.0 * s.theta).sin();
    let excess = (4.0 / p.g_f64() * s.xi).exp() - p.m;
    Ok((ca * s2, sa * s2, sa * s2 * excess + 2.0 * ca * p.l(s.theta)))
}

/// Second time derivatives `(xi'', theta'')` along the flow.
pub fn second_derivatives(s: &PhaseState, p: &FoliationParams) -> Result<(f64, f64)> {
    let (dxi, dtheta, dalpha) = rhs(s, p)?;
    let (sa, ca) = s.alpha.sin_cos();
    let (s2, c2) = (2.0 * s.theta).sin_cos();
    let xi_dd = -sa * dalpha * s2 + ca * 2.0 * c2 * dtheta;
    let theta_dd = ca * dalpha * s2 + sa * 2.0 * c2 * dtheta;
    let _ = dxi;
    Ok((xi_dd, theta_dd))
}

/// Graph form: `d^2 xi / d theta^2` for an orbit written as `xi(theta)` with slope `d xi / d theta`.
pub fn graph_rhs(theta: f64, xi: f64, slope: f64, p: &FoliationParams) -> Result<f64> {
    let h = p.h_reduced(theta)?;
    let excess = (4.0 / p.g_f64() * xi).exp() - p.m;
    Ok(-(1.0 + slope * slope) * (excess + 2.0 * h * slope))
}

/// `sin_cos` that is exact at multiples of the floating-point `pi/2`.
fn quarter_sin_cos(a: f64) -> (f64, f64) {
    let k = (a / FRAC_PI_2).round();
    let (s, c) = (a - k * FRAC_PI_2).sin_cos();
    match (k as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

pub(crate) fn chart_rhs(y: &Vector<3>, p: &FoliationParams) -> Vector<3> {
    let (sb, cb) = quarter_sin_cos(y[2]);
    let sech = 1.0 / y[1].cosh();
    // Equal to (m1 (1 - tanh u) - m2 (1 + tanh u)) / 2, and exactly 0 at u*.
    let l = -0.5 * f64::from(p.m1 + p.m2) * (y[1].tanh() - p.logit_star.tanh());
    let excess = p.m * (4.0 / p.g_f64() * (y[0] - p.xi_sphere)).exp_m1();
    [-sb * sech, 2.0 * cb, cb * sech * excess - 2.0 * sb * l]
}

/// The involution `(xi, theta, alpha) -> (xi, 2 theta* - theta, pi - alpha)`.
pub fn symmetry_s(s: &PhaseState, p: &FoliationParams) -> PhaseState {
    PhaseState::new(s.xi, 2.0 * p.theta_star - s.theta, PI - s.alpha)
}

/// True when `S(s) = s + (0, 0, 2 pi k)` for some integer `k`, i.e. `theta = theta*`
/// and `alpha = pi/2 + pi j`.
pub fn is_s_fixed(s: &PhaseState, p: &FoliationParams, tol: f64) -> bool {
    let residue = (s.alpha - FRAC_PI_2).rem_euclid(PI);
    (s.theta - p.theta_star).abs() <= tol && (residue <= tol || PI - residue <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    /// `theta - theta* = 0`.
    ThetaStarCrossing,
    /// `cos(alpha) = 0`, i.e. `xi' = 0`.
    XiExtremum,
    /// `xi - xi_sphere = 0`.
    XiSphereCrossing,
    /// `sin(alpha) = 0`, i.e. `theta' = 0`.
    ThetaExtremum,
    /// `sin(alpha) = THETA_STALL`: `theta` has all but stopped moving.
    ThetaStall,
}

/// Level of `sin(alpha)` that [`EventKind::ThetaStall`] detects.
pub const THETA_STALL: f64 = 1e-9;

impl EventKind {
    pub const ALL: [EventKind; 5] = [
        EventKind::ThetaStarCrossing,
        EventKind::XiExtremum,
        EventKind::XiSphereCrossing,
        EventKind::ThetaExtremum,
        EventKind::ThetaStall,
    ];

    fn id(self) -> usize {
        self as usize
    }

    fn from_id(id: usize) -> Self {
        Self::ALL[id]
    }

    /// Value of the event function at a state.
    pub fn value(self, s: &PhaseState, p: &FoliationParams) -> f64 {
        match self {
            EventKind::ThetaStarCrossing => s.theta - p.theta_star,
            EventKind::XiExtremum => s.alpha.cos(),
            EventKind::XiSphereCrossing => s.xi - p.xi_sphere,
            EventKind::ThetaExtremum => s.alpha.sin(),
            EventKind::ThetaStall => s.alpha.sin() - THETA_STALL,
        }
    }

    fn chart_value(self, y: &Vector<3>, p: &FoliationParams) -> f64 {
        match self {
            EventKind::ThetaStarCrossing => y[1] - p.logit_star,
            EventKind::XiExtremum => -quarter_sin_cos(y[2]).0,
            EventKind::XiSphereCrossing => y[0] - p.xi_sphere,
            EventKind::ThetaExtremum => quarter_sin_cos(y[2]).1,
            EventKind::ThetaStall => quarter_sin_cos(y[2]).1 - THETA_STALL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord {
    pub kind: EventKind,
    pub time: f64,
    pub state: PhaseState,
    /// Sign of the event function's time derivative at the root.
    pub direction: i8,
    /// Another kind of event lies within the coincidence window.
    pub coincident: bool,
}

#[derive(Debug, Clone)]
pub struct IntegrateOptions {
    /// Final time; negative for backward integration.
    pub t_end: f64,
    pub watch: Vec<EventKind>,
    /// Watched kinds whose roots count towards `stop_after`.
    pub terminal: Vec<EventKind>,
    /// Stop at the k-th terminal root; 0 integrates to `t_end`.
    pub stop_after: usize,
    pub tol: Tolerances,
    /// Upper bound on the step size.
    pub max_step: f64,
}

impl IntegrateOptions {
    pub fn new(t_end: f64, tol: Tolerances) -> Self {
        Self {
            t_end,
            watch: Vec::new(),
            terminal: Vec::new(),
            stop_after: 0,
            tol,
            max_step: f64::INFINITY,
        }
    }

    pub fn max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    pub fn watch(mut self, kind: EventKind) -> Self {
        if !self.watch.contains(&kind) {
            self.watch.push(kind);
        }
        self
    }

    pub fn stop_on(mut self, kind: EventKind, count: usize) -> Self {
        self = self.watch(kind);
        if !self.terminal.contains(&kind) {
            self.terminal.push(kind);
        }
        self.stop_after = count;
        self
    }
}

/// A solution of the reduced system with its dense interpolant and located events.
#[derive(Debug, Clone)]
pub struct Trajectory {
    params: FoliationParams,
    solution: Solution<3>,
    events: Vec<EventRecord>,
}

impl Trajectory {
    pub fn params(&self) -> &FoliationParams {
        &self.params
    }

    pub fn start(&self) -> PhaseState {
        PhaseState::from_chart(&self.solution.y[0])
    }

    pub fn t_end(&self) -> f64 {
        self.solution.t_end()
    }

    pub fn len(&self) -> usize {
        self.solution.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solution.t.is_empty()
    }

    /// Accepted steps (plus the start, and the terminal event if one stopped the run).
    pub fn samples(&self) -> impl Iterator<Item = (f64, PhaseState)> + '_ {
        self.solution
            .t
            .iter()
            .zip(&self.solution.y)
            .map(|(&t, y)| (t, PhaseState::from_chart(y)))
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn first_event(&self, kind: EventKind) -> Option<&EventRecord> {
        self.events.iter().find(|e| e.kind == kind)
    }

    /// Dense evaluation; `None` outside the integrated span.
    pub fn state_at(&self, t: f64) -> Option<PhaseState> {
        self.solution.eval(t).map(|y| PhaseState::from_chart(&y))
    }

    /// `count + 1` states equally spaced in time over the whole span.
    pub fn sample_uniform(&self, count: usize) -> Vec<(f64, PhaseState)> {
        self.solution
            .sample_uniform(count)
            .into_iter()
            .map(|(t, y)| (t, PhaseState::from_chart(&y)))
            .collect()
    }

    /// CSV dump `t,xi,theta,alpha`, one row per accepted step.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,xi,theta,alpha")?;
        for (t, s) in self.samples() {
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                t, s.xi, s.theta, s.alpha
            )?;
        }
        Ok(())
    }
}

/// Integrate the reduced system from `start`.
///
/// Event kinds whose function vanishes at the start (e.g. both `theta - theta*`
/// and `cos(alpha)` at a canonical start) are ignored on `(0, t_eps]`. An event
/// function that vanishes identically never changes sign and is never reported.
pub fn integrate(
    start: PhaseState,
    p: &FoliationParams,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    check_theta(start.theta, "integration start")?;
    if !start.xi.is_finite() || !start.alpha.is_finite() {
        return Err(Error::Precondition("start state must be finite".into()));
    }
    if opts.t_end == 0.0 || !opts.t_end.is_finite() {
        return Err(Error::Precondition(format!(
            "integration span must be finite and non-zero, got {}",
            opts.t_end
        )));
    }
    let y0 = start.to_chart(p);
    type EventClosure<'a> = Box<dyn Fn(&Vector<3>) -> f64 + 'a>;
    let closures: Vec<(EventKind, EventClosure<'_>)> = opts
        .watch
        .iter()
        .map(|&k| {
            let f: Box<dyn Fn(&Vector<3>) -> f64> = Box::new(move |y| k.chart_value(y, p));
            (k, f)
        })
        .collect();
    let events: Vec<EventFn<'_, 3>> = closures
        .iter()
        .map(|(k, f)| EventFn {
            id: k.id(),
            g: f.as_ref(),
            terminal: opts.terminal.contains(k),
            ignore_within: if f(&y0).abs() <= 1e-12 {
                opts.tol.t_eps
            } else {
                0.0
            },
        })
        .collect();
    let stop = if opts.stop_after == 0 {
        StopRule::Never
    } else {
        StopRule::AfterTerminalRoots(opts.stop_after)
    };
    let mut settings = opts.tol.ode_settings();
    settings.h_max = settings.h_max.min(opts.max_step);
    let solution = Problem::new(|y: &Vector<3>| chart_rhs(y, p), settings)
        .with_events(&events, stop)
        .solve(y0, opts.t_end)?;

    let events = solution
        .roots
        .iter()
        .map(|r| EventRecord {
            kind: EventKind::from_id(r.id),
            time: r.t,
            state: PhaseState::from_chart(&r.y),
            direction: r.direction,
            coincident: r.coincident,
        })
        .collect();
    Ok(Trajectory {
        params: *p,
        solution,
        events,
    })
}

/// Largest deviation from the time-reversal symmetry `S(gamma(t)) = gamma(-t)`,
/// with `alpha` compared modulo `2 pi`.
///
/// `traj` must start at an S-fixed point; the backward solution is integrated
/// over the mirrored span and compared at every accepted step of `traj`.
pub fn check_reflection_symmetry(
    traj: &Trajectory,
    p: &FoliationParams,
    tol: &Tolerances,
) -> Result<f64> {
    if !p.equal_multiplicities() {
        return Err(Error::Precondition(format!(
            "reflection symmetry needs m1 = m2 (got {} and {})",
            p.m1, p.m2
        )));
    }
    let start = traj.start();
    if !is_s_fixed(&start, p, 1e-12) {
        return Err(Error::Precondition(
            "trajectory does not start at a fixed point of S".into(),
        ));
    }
    let backward = integrate(start, p, &IntegrateOptions::new(-traj.t_end(), *tol))?;
    let mut worst = 0.0f64;
    for (t, s) in traj.samples() {
        let mirrored = backward
            .state_at(-t)
            .ok_or_else(|| Error::Precondition(format!("backward solution misses t = {}", -t)))?;
        worst = worst.max(symmetry_s(&s, p).distance_mod_2pi(&mirrored));
    }
    Ok(worst)
}

/// Forward and backward integration from an S-fixed start, then the symmetry residual.
pub fn reflection_residual(
    start: PhaseState,
    p: &FoliationParams,
    span: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let forward = integrate(start, p, &IntegrateOptions::new(span, *tol))?;
    check_reflection_symmetry(&forward, p, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isoparam::make_params;
    use std::f64::consts::FRAC_PI_4;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn rhs_examples() {
        let p = make_params(2, 3, 1).unwrap();
        let s2 = (2.0 * p.theta_star).sin();
        let (a, b, c) = rhs(&PhaseState::new(p.xi_sphere, p.theta_star, FRAC_PI_2), &p).unwrap();
        assert!(a.abs() < 1e-15 && (b - s2).abs() < 1e-15 && c.abs() < 1e-14);
        let (a, b, c) = rhs(&PhaseState::new(0.7, p.theta_star, 0.0), &p).unwrap();
        assert!((a - s2).abs() < 1e-15 && b == 0.0 && c.abs() < 1e-14);

        let q = make_params(1, 1, 1).unwrap();
        let (a, b, c) = rhs(&PhaseState::new(0.0, FRAC_PI_4, FRAC_PI_2), &q).unwrap();
        assert!(a.abs() < 1e-15 && (b - 1.0).abs() < 1e-15 && (c + 3.0).abs() < 1e-15);

        assert!(rhs(&PhaseState::new(0.0, 0.0, 0.0), &q).is_err());
        assert!(rhs(&PhaseState::new(0.0, FRAC_PI_2, 0.0), &q).is_err());
    }

    #[test]
    fn chart_rhs_agrees_with_theta_form() {
        for &(g, m1, m2) in &[(1, 1, 1), (2, 3, 1), (4, 2, 5), (6, 2, 2)] {
            let p = make_params(g, m1, m2).unwrap();
            for &(xi, theta, alpha) in &[(0.3, 0.2, 1.1), (-0.4, 1.3, -2.0), (1.2, 0.7, 4.0)] {
                let s = PhaseState::new(xi, theta, alpha);
                let (dxi, dth, dal) = rhs(&s, &p).unwrap();
                let d = chart_rhs(&s.to_chart(&p), &p);
                let du = dth / (theta.sin() * theta.cos());
                assert!((d[0] - dxi).abs() < 1e-12);
                assert!((d[1] - du).abs() < 1e-12);
                assert!((d[2] - dal).abs() < 1e-10 * dal.abs().max(1.0));
            }
        }
    }

    #[test]
    fn graph_rhs_examples() {
        let p = make_params(2, 2, 1).unwrap();
        for slope in [-3.0, 0.0, 0.5, 10.0] {
            assert!(
                graph_rhs(p.theta_star, p.xi_sphere, slope, &p)
                    .unwrap()
                    .abs()
                    < 1e-12
            );
        }
        assert!(graph_rhs(0.6, p.xi_sphere + 0.1, 0.0, &p).unwrap() < 0.0);
        assert!(graph_rhs(0.0, 0.0, 0.0, &p).is_err());
    }

    #[test]
    fn symmetry_examples() {
        let p = make_params(1, 1, 1).unwrap();
        let s = PhaseState::new(0.3, 0.5, 2.0);
        let back = symmetry_s(&symmetry_s(&s, &p), &p);
        assert!(back.distance(&s) < 1e-15);
        let fixed = PhaseState::new(0.0, p.theta_star, FRAC_PI_2);
        assert!(symmetry_s(&fixed, &p).distance(&fixed) < 1e-15);

        assert!(is_s_fixed(
            &PhaseState::new(1.0, p.theta_star, FRAC_PI_2 + 3.0 * PI),
            &p,
            1e-12
        ));
        assert!(is_s_fixed(
            &PhaseState::new(1.0, p.theta_star, -FRAC_PI_2),
            &p,
            1e-12
        ));
        assert!(!is_s_fixed(
            &PhaseState::new(1.0, p.theta_star, 0.3),
            &p,
            1e-12
        ));
        assert!(!is_s_fixed(
            &PhaseState::new(1.0, 0.5, FRAC_PI_2),
            &p,
            1e-12
        ));
        // S-fixed exactly when S(s) - s is a multiple of 2 pi in alpha.
        for j in -3..=3 {
            let s = PhaseState::new(0.2, p.theta_star, FRAC_PI_2 + PI * f64::from(j));
            let d = symmetry_s(&s, &p);
            let k = (d.alpha - s.alpha) / (2.0 * PI);
            assert!((k - k.round()).abs() < 1e-12);
        }
    }

    #[test]
    fn cone_family_is_preserved() {
        let p = make_params(2, 3, 1).unwrap();
        let speed = 2.0 * (3f64).sqrt() / 4.0;
        for (alpha, sign, span) in [(0.0, 1.0, 5.0), (PI, -1.0, 5.0)] {
            let start = PhaseState::new(0.4, p.theta_star, alpha);
            let traj = integrate(start, &p, &IntegrateOptions::new(span, tol())).unwrap();
            for (t, s) in traj.samples() {
                assert!((s.xi - (0.4 + sign * speed * t)).abs() < 1e-8);
                assert!((s.theta - p.theta_star).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn quarter_turns_are_exact() {
        assert_eq!(quarter_sin_cos(-FRAC_PI_2), (-1.0, 0.0));
        assert_eq!(quarter_sin_cos(FRAC_PI_2), (1.0, 0.0));
        assert_eq!(quarter_sin_cos(PI), (0.0, -1.0));
        for a in [-7.3, -2.0, -0.4, 0.0, 0.9, 1.6, 3.3, 12.0] {
            let (s, c) = quarter_sin_cos(a);
            assert!(
                (s - a.sin()).abs() < 1e-14 && (c - a.cos()).abs() < 1e-14,
                "{a}"
            );
        }
    }

    #[test]
    fn sphere_family_is_preserved() {
        let p = make_params(1, 1, 1).unwrap();
        let theta0 = 0.3;
        let start = PhaseState::new(p.xi_sphere, theta0, FRAC_PI_2);
        let traj = integrate(start, &p, &IntegrateOptions::new(5.0, tol())).unwrap();
        for (t, s) in traj.samples() {
            let exact = ((-2.0 * t).exp() / theta0.tan()).recip().atan();
            assert_eq!(s.xi, p.xi_sphere);
            assert!((s.theta - exact).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn xi_sphere_crossing_occurs() {
        let p = make_params(1, 1, 1).unwrap();
        let start = PhaseState::canonical(p.xi_sphere + 1.0, &p);
        let opts = IntegrateOptions::new(50.0, tol()).stop_on(EventKind::XiSphereCrossing, 1);
        let traj = integrate(start, &p, &opts).unwrap();
        let ev = traj.first_event(EventKind::XiSphereCrossing).unwrap();
        assert!(ev.time > 0.0 && ev.time < 50.0);
        assert!(ev.state.xi - p.xi_sphere < 1e-10);
        assert_eq!(ev.direction, -1);
        assert_eq!(traj.t_end(), ev.time);
    }

    #[test]
    fn canonical_start_ignores_initial_roots() {
        let p = make_params(1, 1, 1).unwrap();
        let start = PhaseState::canonical(p.xi_sphere + 0.5, &p);
        let opts = IntegrateOptions::new(20.0, tol())
            .watch(EventKind::XiExtremum)
            .stop_on(EventKind::ThetaStarCrossing, 1);
        let traj = integrate(start, &p, &opts).unwrap();
        assert!(traj.events().iter().all(|e| e.time > tol().t_eps));
    }

    #[test]
    fn sphere_level_has_no_xi_extremum() {
        let p = make_params(2, 1, 1).unwrap();
        let start = PhaseState::canonical(p.xi_sphere, &p);
        let opts = IntegrateOptions::new(50.0, tol())
            .stop_on(EventKind::XiExtremum, 1)
            .stop_on(EventKind::ThetaStarCrossing, 1);
        let traj = integrate(start, &p, &opts).unwrap();
        assert!(traj.events().is_empty());
        assert_eq!(traj.t_end(), 50.0);
    }

    #[test]
    fn events_satisfy_their_equations() {
        let p = make_params(2, 2, 1).unwrap();
        let mut opts = IntegrateOptions::new(15.0, tol());
        for k in EventKind::ALL {
            opts = opts.watch(k);
        }
        let traj = integrate(PhaseState::new(0.9, 0.4, 0.3), &p, &opts).unwrap();
        assert!(traj.events().len() > 3);
        for e in traj.events() {
            assert!(e.kind.value(&e.state, &p).abs() < 1e-9, "{e:?}");
            assert!(e.time > 0.0 && e.time <= traj.t_end());
        }
        assert!(traj.events().windows(2).all(|w| w[0].time <= w[1].time));
    }

    #[test]
    fn reflection_symmetry_residual() {
        let p = make_params(1, 1, 1).unwrap();
        let sphere = PhaseState::canonical(p.xi_sphere, &p);
        assert!(reflection_residual(sphere, &p, 2.0, &tol()).unwrap() < 1e-12);
        let start = PhaseState::canonical(p.xi_sphere + 0.8, &p);
        let r = reflection_residual(start, &p, 2.0, &tol()).unwrap();
        assert!(r < 10.0 * tol().step, "{r}");

        let q = make_params(2, 2, 1).unwrap();
        let err = reflection_residual(PhaseState::canonical(1.0, &q), &q, 1.0, &tol());
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn csv_dump_has_one_row_per_step() {
        let p = make_params(1, 1, 1).unwrap();
        let traj = integrate(
            PhaseState::new(0.5, 0.6, 1.0),
            &p,
            &IntegrateOptions::new(2.0, tol()),
        )
        .unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,xi,theta,alpha"));
        assert_eq!(lines.count(), traj.len());
    }

    #[test]
    fn wrap_angle_range() {
        for a in [-7.0, -PI, 0.0, 1.0, PI, 4.0, 13.0] {
            let w = wrap_angle(a);
            assert!(w > -PI - 1e-15 && w <= PI + 1e-15);
            let k = (a - w) / (2.0 * PI);
            assert!((k - k.round()).abs() < 1e-12);
        }
    }
}
