//! Shooting from the minimal-leaf line `theta = theta*`.
//!
//! A start `(xi0, theta*, pi/2)` is type 1 when it returns to `theta*` before
//! `xi` has an extremum, type 2 in the opposite case. The critical value between
//! the two regimes launches a geodesic that meets `theta*` orthogonally a second
//! time, and the reflection `S` doubles that half into a closed orbit.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::isoparam::FoliationParams;
use crate::reduced::{
    integrate, symmetry_s, EventKind, EventRecord, IntegrateOptions, PhaseState, Trajectory,
};
use crate::tolerances::Tolerances;

/// Timeouts at a shorter horizon are retried once up to this time.
pub const TIMEOUT_RETRY: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    Type1,
    Type2,
    Both,
    Type3Timeout,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Type1 => "Type1",
            Kind::Type2 => "Type2",
            Kind::Both => "Both",
            Kind::Type3Timeout => "Type3Timeout",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which way the shot leaves `theta*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// `alpha0 = pi/2`, into `theta > theta*`.
    Upper,
    /// `alpha0 = -pi/2`, into `theta < theta*`.
    Lower,
}

impl Branch {
    pub fn alpha0(self) -> f64 {
        match self {
            Branch::Upper => FRAC_PI_2,
            Branch::Lower => -FRAC_PI_2,
        }
    }

    pub fn start(self, xi0: f64, p: &FoliationParams) -> PhaseState {
        PhaseState::new(xi0, p.theta_star, self.alpha0())
    }
}

/// Ordering of the first post-exclusion events.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventOrder {
    /// The event that came first, if any occurred before the horizon.
    pub first: Option<EventKind>,
    pub first_time: Option<f64>,
    /// Linearized time from the first event to the root of the other event function.
    pub separation: Option<f64>,
    /// `|cos alpha|` at the theta*-crossing (estimated when the extremum came first).
    pub defect: Option<f64>,
    /// Horizon actually integrated.
    pub t_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub kind: Kind,
    pub witness_time: Option<f64>,
    /// State at the witness event, or at the horizon for a timeout.
    pub witness_state: PhaseState,
    pub diagnostics: EventOrder,
}

impl Classification {
    /// The theta*-crossing strictly preceded the xi-extremum. This raw ordering,
    /// not the `Both` label, is what the critical-value bisection splits on.
    pub fn returns_first(&self) -> bool {
        self.diagnostics.first == Some(EventKind::ThetaStarCrossing)
    }
}

fn rate(kind: EventKind, s: &PhaseState, p: &FoliationParams) -> f64 {
    let (sa, ca) = s.alpha.sin_cos();
    let s2 = (2.0 * s.theta).sin();
    match kind {
        EventKind::ThetaStarCrossing => sa * s2,
        EventKind::XiExtremum => {
            let dalpha = sa * s2 * ((4.0 / p.g_f64() * s.xi).exp() - p.m) + 2.0 * ca * p.l(s.theta);
            -sa * dalpha
        }
        EventKind::XiSphereCrossing => ca * s2,
        EventKind::ThetaExtremum | EventKind::ThetaStall => {
            ca * { sa * s2 * ((4.0 / p.g_f64() * s.xi).exp() - p.m) + 2.0 * ca * p.l(s.theta) }
        }
    }
}

fn first_event_run(
    start: PhaseState,
    p: &FoliationParams,
    t_max: f64,
    tol: &Tolerances,
) -> Result<(Trajectory, f64)> {
    let opts = |t_end: f64| {
        IntegrateOptions::new(t_end, *tol)
            .stop_on(EventKind::ThetaStarCrossing, 1)
            .stop_on(EventKind::XiExtremum, 1)
    };
    let traj = integrate(start, p, &opts(t_max))?;
    if traj.events().is_empty() && t_max < TIMEOUT_RETRY {
        log::debug!("no event before t = {t_max}, retrying up to {TIMEOUT_RETRY}");
        return Ok((integrate(start, p, &opts(TIMEOUT_RETRY))?, TIMEOUT_RETRY));
    }
    Ok((traj, t_max))
}

/// Classify a start on `theta*` leaving in the given direction.
pub fn classify_branch(
    xi0: f64,
    branch: Branch,
    p: &FoliationParams,
    t_max: f64,
    tol: &Tolerances,
) -> Result<Classification> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Precondition(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    if !xi0.is_finite() {
        return Err(Error::Precondition(format!(
            "xi0 must be finite, got {xi0}"
        )));
    }
    let (traj, horizon) = first_event_run(branch.start(xi0, p), p, t_max, tol)?;
    let Some(ev) = traj.events().first().copied() else {
        let end = traj.t_end();
        return Ok(Classification {
            kind: Kind::Type3Timeout,
            witness_time: None,
            witness_state: traj.state_at(end).unwrap_or_else(|| traj.start()),
            diagnostics: EventOrder {
                first: None,
                first_time: None,
                separation: None,
                defect: None,
                t_max: horizon,
            },
        });
    };
    Ok(order_to_classification(&ev, p, tol, horizon))
}

fn order_to_classification(
    ev: &EventRecord,
    p: &FoliationParams,
    tol: &Tolerances,
    horizon: f64,
) -> Classification {
    let other = match ev.kind {
        EventKind::ThetaStarCrossing => EventKind::XiExtremum,
        _ => EventKind::ThetaStarCrossing,
    };
    let f = other.value(&ev.state, p);
    let df = rate(other, &ev.state, p);
    let separation = if f == 0.0 {
        0.0
    } else if df != 0.0 {
        (-f / df).abs()
    } else {
        f64::INFINITY
    };
    let defect = match ev.kind {
        EventKind::ThetaStarCrossing => ev.state.alpha.cos().abs(),
        // cos(alpha) moves at rate |alpha'| while theta closes the gap.
        _ => (rate(EventKind::XiExtremum, &ev.state, p) * separation).abs(),
    };
    let both = separation <= tol.coincidence || defect < tol.orth;
    let kind = match (both, ev.kind) {
        (true, _) => Kind::Both,
        (false, EventKind::ThetaStarCrossing) => Kind::Type1,
        (false, _) => Kind::Type2,
    };
    Classification {
        kind,
        witness_time: Some(ev.time),
        witness_state: ev.state,
        diagnostics: EventOrder {
            first: Some(ev.kind),
            first_time: Some(ev.time),
            separation: Some(separation),
            defect: Some(defect),
            t_max: horizon,
        },
    }
}

/// Classify the canonical start `(xi0, theta*, pi/2)`.
pub fn classify(
    xi0: f64,
    p: &FoliationParams,
    t_max: f64,
    tol: &Tolerances,
) -> Result<Classification> {
    classify_branch(xi0, Branch::Upper, p, t_max, tol)
}

/// Bracket search settings for [`find_critical`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub t_max: f64,
    /// Lower bracket end above `xi_sphere`.
    pub lo_offset: f64,
    /// First upper offset; later offsets double.
    pub first_step: f64,
    /// Largest upper offset tried.
    pub ceiling: f64,
    pub max_iterations: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            t_max: 50.0,
            lo_offset: 1e-3,
            first_step: 0.5,
            ceiling: 20.0,
            max_iterations: 400,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalResult {
    pub branch: Branch,
    pub xi_star: f64,
    /// Last lower bracket end; it does not return to theta* first.
    pub lo: f64,
    pub bracket_width: f64,
    pub classification_at_star: Classification,
    pub orthogonality_defect: f64,
    pub iterations: usize,
}

pub fn find_critical(
    p: &FoliationParams,
    search: &SearchConfig,
    tol: &Tolerances,
) -> Result<CriticalResult> {
    find_critical_branch(p, Branch::Upper, search, tol)
}

pub fn find_critical_branch(
    p: &FoliationParams,
    branch: Branch,
    search: &SearchConfig,
    tol: &Tolerances,
) -> Result<CriticalResult> {
    tol.validate().map_err(Error::Precondition)?;
    let classify_at = |xi0: f64| classify_branch(xi0, branch, p, search.t_max, tol);

    let mut lo = p.xi_sphere + search.lo_offset;
    if classify_at(lo)?.returns_first() {
        return Err(Error::BracketInit(format!(
            "xi0 = {lo} already returns to theta* first"
        )));
    }
    let mut offset = search.first_step;
    let mut hi_class = None;
    let mut hi = lo;
    loop {
        let offset_capped = offset.min(search.ceiling);
        let candidate = p.xi_sphere + offset_capped;
        if candidate > lo {
            let c = classify_at(candidate)?;
            if c.returns_first() {
                hi = candidate;
                hi_class = Some(c);
                break;
            }
            lo = candidate;
        }
        if offset_capped >= search.ceiling {
            break;
        }
        offset *= 2.0;
    }
    let Some(mut hi_class) = hi_class else {
        return Err(Error::BracketInit(format!(
            "no start up to xi_sphere + {} returns to theta* first",
            search.ceiling
        )));
    };

    let mut iterations = 0;
    while hi - lo > tol.bisect && iterations < search.max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let c = classify_at(mid)?;
        if c.returns_first() {
            hi = mid;
            hi_class = c;
        } else {
            lo = mid;
        }
    }

    let defect = hi_class.witness_state.alpha.cos().abs();
    if !(defect <= tol.orth) {
        return Err(Error::NonConvergence {
            defect,
            tolerance: tol.orth,
        });
    }
    Ok(CriticalResult {
        branch,
        xi_star: hi,
        lo,
        bracket_width: hi - lo,
        classification_at_star: hi_class,
        orthogonality_defect: defect,
        iterations,
    })
}

/// A closed orbit (or, for unequal multiplicities, an orthogonal arc) sampled uniformly in time.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedProfile {
    pub params: FoliationParams,
    pub xi_star: f64,
    pub period: f64,
    pub samples: Vec<(f64, PhaseState)>,
    pub closure_error: f64,
    pub is_closed: bool,
    /// `|cos alpha|` at the start and at the half-period (or arc end).
    pub end_defects: [f64; 2],
}

impl ClosedProfile {
    pub fn orthogonality_defect(&self) -> f64 {
        self.end_defects[0].max(self.end_defects[1])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Default sample spacing in time.
pub const SAMPLE_SPACING: f64 = 1e-3;

fn half_orbit(
    start: PhaseState,
    p: &FoliationParams,
    tol: &Tolerances,
    spacing: f64,
) -> Result<(Vec<(f64, PhaseState)>, EventRecord)> {
    // Steps no longer than the sample spacing keep interpolation error out of
    // finite differences taken on the samples.
    let opts = IntegrateOptions::new(TIMEOUT_RETRY, *tol)
        .stop_on(EventKind::ThetaStarCrossing, 1)
        .max_step(spacing);
    let traj = integrate(start, p, &opts)?;
    let ev = *traj
        .first_event(EventKind::ThetaStarCrossing)
        .ok_or_else(|| Error::Precondition("shot never returns to theta*".into()))?;
    let defect = ev.state.alpha.cos().abs();
    if !(defect <= tol.orth) {
        return Err(Error::NonConvergence {
            defect,
            tolerance: tol.orth,
        });
    }
    let count = ((ev.time / spacing).ceil() as usize).max(4);
    Ok((traj.sample_uniform(count), ev))
}

/// Closed orbit through `(xi_star, theta*, pi/2)` for equal multiplicities.
pub fn extract_closed(
    xi_star: f64,
    p: &FoliationParams,
    tol: &Tolerances,
) -> Result<ClosedProfile> {
    extract_closed_with_spacing(xi_star, p, tol, SAMPLE_SPACING)
}

pub fn extract_closed_with_spacing(
    xi_star: f64,
    p: &FoliationParams,
    tol: &Tolerances,
    spacing: f64,
) -> Result<ClosedProfile> {
    if !p.equal_multiplicities() {
        return Err(Error::Precondition(format!(
            "closed orbits need m1 = m2 (got {} and {}); use extract_arcs",
            p.m1, p.m2
        )));
    }
    if !(spacing > 0.0) {
        return Err(Error::Precondition(format!(
            "sample spacing must be positive, got {spacing}"
        )));
    }
    let start = PhaseState::canonical(xi_star, p);
    let (half, ev) = half_orbit(start, p, tol, spacing)?;
    let t_half = ev.time;
    let winding = 2.0 * PI * ((ev.state.alpha - FRAC_PI_2) / PI).round();

    let mut samples = half.clone();
    for &(t, s) in half.iter().rev().skip(1) {
        let mut m = symmetry_s(&s, p);
        m.alpha += winding;
        samples.push((2.0 * t_half - t, m));
    }

    let full = integrate(start, p, &IntegrateOptions::new(2.0 * t_half, *tol))?;
    let end = full
        .state_at(2.0 * t_half)
        .ok_or_else(|| Error::Precondition("re-integration stopped early".into()))?;
    let closure_error = end.distance_mod_2pi(&start);

    Ok(ClosedProfile {
        params: *p,
        xi_star,
        period: 2.0 * t_half,
        samples,
        closure_error,
        is_closed: true,
        end_defects: [start.alpha.cos().abs(), ev.state.alpha.cos().abs()],
    })
}

fn arc(
    crit: &CriticalResult,
    p: &FoliationParams,
    tol: &Tolerances,
    spacing: f64,
) -> Result<ClosedProfile> {
    let start = crit.branch.start(crit.xi_star, p);
    let (samples, ev) = half_orbit(start, p, tol, spacing)?;
    let closure_error = samples[0].1.distance_mod_2pi(&samples[samples.len() - 1].1);
    Ok(ClosedProfile {
        params: *p,
        xi_star: crit.xi_star,
        period: ev.time,
        samples,
        closure_error,
        is_closed: false,
        end_defects: [start.alpha.cos().abs(), ev.state.alpha.cos().abs()],
    })
}

/// The two orthogonal arcs for unequal multiplicities: `theta > theta*` first, then `theta < theta*`.
pub fn extract_arcs(
    p: &FoliationParams,
    search: &SearchConfig,
    tol: &Tolerances,
) -> Result<(ClosedProfile, ClosedProfile)> {
    if p.equal_multiplicities() {
        return Err(Error::Precondition(
            "arc mode needs m1 != m2; use extract_closed".into(),
        ));
    }
    let upper = find_critical_branch(p, Branch::Upper, search, tol)?;
    let lower = find_critical_branch(p, Branch::Lower, search, tol)?;
    Ok((
        arc(&upper, p, tol, SAMPLE_SPACING)?,
        arc(&lower, p, tol, SAMPLE_SPACING)?,
    ))
}

/// Check that `xi' < 0, theta > theta*` on the open first half and the reverse on the second.
///
/// Returns the first offending sample time, if any.
pub fn sign_structure_violation(profile: &ClosedProfile) -> Option<f64> {
    let p = &profile.params;
    let half = 0.5 * profile.period;
    let n = profile.samples.len();
    profile.samples.iter().enumerate().find_map(|(i, &(t, s))| {
        if i == 0 || i + 1 == n || t == half {
            return None;
        }
        let first = t < half;
        let ok = if first {
            s.xi_rate() < 0.0 && s.theta > p.theta_star
        } else {
            s.xi_rate() > 0.0 && s.theta < p.theta_star
        };
        (!ok).then_some(t)
    })
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn on_segment(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> bool {
    c.0 >= a.0.min(b.0) && c.0 <= a.0.max(b.0) && c.1 >= a.1.min(b.1) && c.1 <= a.1.max(b.1)
}

/// Closed-segment intersection, touching included.
pub fn segments_intersect(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// True when the polyline (closed if `closed`) has no self-intersection.
/// Segments sharing a vertex are not compared.
pub fn polyline_is_simple(points: &[(f64, f64)], closed: bool) -> bool {
    let mut pts = points.to_vec();
    if closed && pts.len() > 1 && pts.first() == pts.last() {
        pts.pop();
    }
    let n = pts.len();
    if n < 3 {
        return true;
    }
    let seg_count = if closed { n } else { n - 1 };
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    let mut order: Vec<usize> = (0..seg_count).collect();
    let min_x = |i: usize| {
        let (a, b) = seg(i);
        a.0.min(b.0)
    };
    order.sort_by(|&i, &j| min_x(i).total_cmp(&min_x(j)));
    let adjacent = |i: usize, j: usize| {
        let d = i.abs_diff(j);
        d <= 1 || (closed && d == seg_count - 1)
    };
    for (k, &i) in order.iter().enumerate() {
        let (a, b) = seg(i);
        let max_x = a.0.max(b.0);
        let (lo_y, hi_y) = (a.1.min(b.1), a.1.max(b.1));
        for &j in &order[k + 1..] {
            let (c, d) = seg(j);
            if c.0.min(d.0) > max_x {
                break;
            }
            if c.1.max(d.1) < lo_y || c.1.min(d.1) > hi_y || adjacent(i, j) {
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Whether the `(xi, theta)` curve of the profile is simple.
pub fn check_simple(profile: &ClosedProfile) -> bool {
    let pts: Vec<(f64, f64)> = profile
        .samples
        .iter()
        .map(|(_, s)| (s.xi, s.theta))
        .collect();
    polyline_is_simple(&pts, profile.is_closed)
}

/// First `theta`-maximum along the canonical shot from `xi0`.
///
/// For large `xi0` the direction angle relaxes onto `alpha = pi` at a rate of
/// order `exp(4 xi0 / g)`, which an explicit integrator cannot follow down to the
/// exact root of `sin(alpha)`. The shot therefore also stops once `sin(alpha)`
/// falls to [`crate::reduced::THETA_STALL`]: the linearized relaxation `x' = -a x - b` with
/// `x = pi - alpha` reaches zero within `ln(1 + a x / b) / a` of that point, so
/// `theta` gains less than `THETA_STALL * ln(1 + a x / b) / a` afterwards.
pub fn first_theta_maximum(xi0: f64, p: &FoliationParams, tol: &Tolerances) -> Result<EventRecord> {
    let opts = IntegrateOptions::new(TIMEOUT_RETRY, *tol)
        .stop_on(EventKind::ThetaExtremum, 1)
        .stop_on(EventKind::ThetaStall, 1);
    let traj = integrate(PhaseState::canonical(xi0, p), p, &opts)?;
    traj.events()
        .first()
        .copied()
        .ok_or_else(|| Error::Precondition(format!("no theta maximum from xi0 = {xi0}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isoparam::make_params;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn classify_examples() {
        let p = make_params(1, 1, 1).unwrap();
        let c = classify(p.xi_sphere, &p, 50.0, &tol()).unwrap();
        assert_eq!(c.kind, Kind::Type3Timeout);
        assert_eq!(c.diagnostics.t_max, TIMEOUT_RETRY);
        assert!(c.witness_time.is_none());

        let c = classify(p.xi_sphere + 3.0, &p, 50.0, &tol()).unwrap();
        assert_eq!(c.kind, Kind::Type1);
        assert!(c.returns_first());
        assert!(c.witness_time.unwrap() > tol().t_eps);

        let c = classify(p.xi_sphere + 0.01, &p, 50.0, &tol()).unwrap();
        assert_eq!(c.kind, Kind::Type2);
        assert!(!c.returns_first());
    }

    #[test]
    fn classify_rejects_bad_horizon() {
        let p = make_params(1, 1, 1).unwrap();
        assert!(classify(1.0, &p, 0.0, &tol()).is_err());
        assert!(classify(f64::NAN, &p, 1.0, &tol()).is_err());
    }

    #[test]
    fn critical_value_g1() {
        let p = make_params(1, 1, 1).unwrap();
        let r = find_critical(&p, &SearchConfig::default(), &tol()).unwrap();
        assert!(r.xi_star > p.xi_sphere && r.xi_star < p.xi_sphere + 3.0);
        assert!(r.orthogonality_defect < 1e-8);
        assert!(r.bracket_width <= tol().bisect);
        let cfg = SearchConfig::default();
        assert!(classify(r.xi_star, &p, cfg.t_max, &tol())
            .unwrap()
            .returns_first());
        assert!(!classify(r.lo, &p, cfg.t_max, &tol())
            .unwrap()
            .returns_first());
        assert_eq!(r.classification_at_star.kind, Kind::Both);
        let again = find_critical(&p, &cfg, &tol()).unwrap();
        assert_eq!(again.xi_star.to_bits(), r.xi_star.to_bits());
    }

    #[test]
    fn closed_profile_g1() {
        let p = make_params(1, 1, 1).unwrap();
        let r = find_critical(&p, &SearchConfig::default(), &tol()).unwrap();
        let prof = extract_closed(r.xi_star, &p, &tol()).unwrap();
        assert!(prof.closure_error < 1e-6, "{}", prof.closure_error);
        assert!(prof.orthogonality_defect() < 1e-8);
        assert_eq!(sign_structure_violation(&prof), None);
        assert!(check_simple(&prof));
        let first = prof.samples[0].1;
        let last = prof.samples[prof.len() - 1].1;
        assert!(first.distance_mod_2pi(&last) < 1e-12);
        assert!((prof.samples[prof.len() - 1].0 - prof.period).abs() < 1e-12);

        let n = prof.len();
        for i in 0..n / 2 {
            let a = symmetry_s(&prof.samples[i].1, &p);
            let b = prof.samples[n - 1 - i].1;
            assert!(a.distance_mod_2pi(&b) < 1e-14);
        }
        let (xmin, xmax) = prof
            .samples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, s)| {
                (a.min(s.xi), b.max(s.xi))
            });
        assert!(xmin < p.xi_sphere && xmax > p.xi_sphere);
    }

    #[test]
    fn closed_rejects_unequal() {
        let p = make_params(2, 2, 1).unwrap();
        assert!(matches!(
            extract_closed(1.0, &p, &tol()),
            Err(Error::Precondition(_))
        ));
        let q = make_params(1, 1, 1).unwrap();
        assert!(extract_arcs(&q, &SearchConfig::default(), &tol()).is_err());
    }

    #[test]
    fn arcs_unequal_multiplicities() {
        let p = make_params(2, 2, 1).unwrap();
        let (up, down) = extract_arcs(&p, &SearchConfig::default(), &tol()).unwrap();
        for arc in [&up, &down] {
            assert!(!arc.is_closed);
            assert!(arc.orthogonality_defect() < 1e-8);
            assert!(check_simple(arc));
        }
        let n = up.len();
        assert!(up.samples[1..n - 1]
            .iter()
            .all(|(_, s)| s.theta > p.theta_star));
        let n = down.len();
        assert!(down.samples[1..n - 1]
            .iter()
            .all(|(_, s)| s.theta < p.theta_star));
    }

    #[test]
    fn polyline_controls() {
        let circle: Vec<(f64, f64)> = (0..=100)
            .map(|i| {
                let a = 2.0 * PI * f64::from(i) / 100.0;
                (a.cos(), a.sin())
            })
            .collect();
        assert!(polyline_is_simple(&circle, true));
        let eight: Vec<(f64, f64)> = (0..=200)
            .map(|i| {
                let a = 2.0 * PI * f64::from(i) / 200.0;
                (a.sin(), a.sin() * a.cos())
            })
            .collect();
        assert!(!polyline_is_simple(&eight, true));
        let zigzag = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.5, -1.0)];
        assert!(!polyline_is_simple(&zigzag, false));
        assert!(polyline_is_simple(&zigzag[..3], false));
    }

    #[test]
    fn segment_cases() {
        assert!(segments_intersect(
            (0.0, 0.0),
            (1.0, 1.0),
            (0.0, 1.0),
            (1.0, 0.0)
        ));
        assert!(!segments_intersect(
            (0.0, 0.0),
            (1.0, 0.0),
            (0.0, 1.0),
            (1.0, 1.0)
        ));
        assert!(segments_intersect(
            (0.0, 0.0),
            (2.0, 0.0),
            (1.0, 0.0),
            (3.0, 0.0)
        ));
        assert!(segments_intersect(
            (0.0, 0.0),
            (2.0, 0.0),
            (1.0, 0.0),
            (1.0, 5.0)
        ));
        assert!(!segments_intersect(
            (0.0, 0.0),
            (1.0, 0.0),
            (2.0, 0.0),
            (3.0, 0.0)
        ));
    }

    #[test]
    fn theta_maximum_scale() {
        let p = make_params(1, 1, 1).unwrap();
        let ev = first_theta_maximum(4.0, &p, &tol()).unwrap();
        let gap = ev.state.theta - p.theta_star;
        assert!(gap > 0.0);
        let predicted = FRAC_PI_2 * (-16.0f64).exp();
        assert!((gap / predicted).ln().abs() < 1.0, "{gap} vs {predicted}");
    }
}
