//! Dormand–Prince 5(4) integration for autonomous systems.
//!
//! Step control is the proportional-integral scheme of Hairer & Wanner with a
//! mixed absolute/relative error norm. Every accepted step keeps its
//! 4th-order continuous extension, so the returned [`Solution`] can be
//! evaluated anywhere on the integrated span and event roots can be located
//! by bisection on the interpolant rather than by re-stepping.
//!
//! Integration may run backwards (`t_end < 0`); times are always measured
//! from the initial state at `t = 0`.

pub type Vector<const N: usize> = [f64; N];

// Autonomous systems only, so the stage nodes c_i are never needed.

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller constants.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub rtol: f64,
    pub atol: f64,
    /// Largest permitted |h|; `f64::INFINITY` for none.
    pub h_max: f64,
    pub max_steps: usize,
    /// Event roots are bisected until the bracket is narrower than
    /// `event_tol * min(1, |h|)`.
    pub event_tol: f64,
    /// Roots of different events closer than this are flagged coincident.
    pub coincidence: f64,
    /// Consecutive guard rejections tolerated before the step is declared a fault.
    pub max_guard_rejections: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
            event_tol: 1e-12,
            coincidence: 1e-9,
            max_guard_rejections: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step limit of {limit} reached at t = {t}")]
    StepLimit { t: f64, limit: usize },
    #[error("state left the admissible region near t = {t}")]
    Inadmissible { t: f64 },
    #[error("non-finite state near t = {t}")]
    NonFinite { t: f64 },
}

/// Continuous extension of one accepted step.
#[derive(Debug, Clone)]
pub struct DenseSegment<const N: usize> {
    t0: f64,
    h: f64,
    coeffs: [Vector<N>; 5],
}

impl<const N: usize> DenseSegment<N> {
    pub fn t_start(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> Vector<N> {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let [r1, r2, r3, r4, r5] = &self.coeffs;
        std::array::from_fn(|i| r1[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i]))))
    }
}

/// A scalar event function monitored during integration.
pub struct EventFn<'a, const N: usize> {
    pub id: usize,
    pub g: &'a dyn Fn(&Vector<N>) -> f64,
    /// Roots of terminal events count towards the stop rule.
    pub terminal: bool,
    /// Roots with `|t| <= ignore_within` are discarded.
    pub ignore_within: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Root<const N: usize> {
    pub id: usize,
    pub t: f64,
    pub y: Vector<N>,
    /// Sign of `dg/dt` at the root.
    pub direction: i8,
    pub coincident: bool,
}

#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<Vector<N>>,
    pub roots: Vec<Root<N>>,
    segments: Vec<DenseSegment<N>>,
    dir: f64,
}

impl<const N: usize> Solution<N> {
    pub fn t_end(&self) -> f64 {
        *self
            .t
            .last()
            .expect("solution has at least the initial sample")
    }

    pub fn direction(&self) -> f64 {
        self.dir
    }

    pub fn segments(&self) -> &[DenseSegment<N>] {
        &self.segments
    }

    /// Dense evaluation at `t`; `None` outside the integrated span.
    pub fn eval(&self, t: f64) -> Option<Vector<N>> {
        let s = self.dir * t;
        let end = self.dir * self.t_end();
        if !(s >= 0.0 && s <= end) {
            return None;
        }
        if self.segments.is_empty() {
            return Some(self.y[0]);
        }
        if t == self.t_end() {
            return Some(*self.y.last().unwrap());
        }
        let idx = self
            .segments
            .partition_point(|seg| self.dir * seg.t_end() < s)
            .min(self.segments.len() - 1);
        Some(self.segments[idx].eval(t))
    }

    /// `count + 1` equally spaced samples covering `[0, t_end]`.
    pub fn sample_uniform(&self, count: usize) -> Vec<(f64, Vector<N>)> {
        let end = self.t_end();
        let count = count.max(1);
        (0..=count)
            .map(|i| {
                if i == count {
                    (end, *self.y.last().unwrap())
                } else {
                    let t = end * i as f64 / count as f64;
                    (t, self.eval(t).unwrap())
                }
            })
            .collect()
    }
}

/// When to stop before `t_end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopRule {
    #[default]
    Never,
    /// Stop at the k-th root of a terminal event.
    AfterTerminalRoots(usize),
}

pub struct Problem<'a, F, const N: usize> {
    pub rhs: F,
    pub events: &'a [EventFn<'a, N>],
    pub stop: StopRule,
    /// Accepted states must satisfy the guard; failing steps are halved.
    pub guard: Option<&'a dyn Fn(&Vector<N>) -> bool>,
    pub settings: Settings,
}

impl<'a, F, const N: usize> Problem<'a, F, N>
where
    F: Fn(&Vector<N>) -> Vector<N>,
{
    pub fn new(rhs: F, settings: Settings) -> Self {
        Self {
            rhs,
            events: &[],
            stop: StopRule::Never,
            guard: None,
            settings,
        }
    }

    pub fn with_events(mut self, events: &'a [EventFn<'a, N>], stop: StopRule) -> Self {
        self.events = events;
        self.stop = stop;
        self
    }

    pub fn with_guard(mut self, guard: &'a dyn Fn(&Vector<N>) -> bool) -> Self {
        self.guard = Some(guard);
        self
    }

    pub fn solve(&self, y0: Vector<N>, t_end: f64) -> Result<Solution<N>, OdeError> {
        solve_impl(self, y0, t_end)
    }
}

fn axpy<const N: usize>(y: &Vector<N>, h: f64, terms: &[(f64, &Vector<N>)]) -> Vector<N> {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

fn initial_step<F, const N: usize>(
    rhs: &F,
    y0: &Vector<N>,
    f0: &Vector<N>,
    dir: f64,
    settings: &Settings,
) -> f64
where
    F: Fn(&Vector<N>) -> Vector<N>,
{
    let sk: Vector<N> = std::array::from_fn(|i| settings.atol + settings.rtol * y0[i].abs());
    let dnf: f64 = (0..N).map(|i| (f0[i] / sk[i]).powi(2)).sum();
    let dny: f64 = (0..N).map(|i| (y0[i] / sk[i]).powi(2)).sum();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
        1e-6
    } else {
        (dny / dnf).sqrt() * 0.01
    };
    h = h.min(settings.h_max);
    let y1: Vector<N> = std::array::from_fn(|i| y0[i] + dir * h * f0[i]);
    let f1 = rhs(&y1);
    let der2 = (0..N)
        .map(|i| ((f1[i] - f0[i]) / sk[i]).powi(2))
        .sum::<f64>()
        .sqrt()
        / h;
    let der12 = der2.max(dnf.sqrt());
    let h1 = if der12 <= 1e-15 {
        (h * 1e-3).max(1e-6)
    } else {
        (0.01 / der12).powf(0.2)
    };
    (100.0 * h).min(h1).min(settings.h_max)
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn solve_impl<F, const N: usize>(
    problem: &Problem<'_, F, N>,
    y0: Vector<N>,
    t_end: f64,
) -> Result<Solution<N>, OdeError>
where
    F: Fn(&Vector<N>) -> Vector<N>,
{
    let settings = &problem.settings;
    let rhs = &problem.rhs;
    let dir = if t_end < 0.0 { -1.0 } else { 1.0 };

    let mut sol = Solution {
        t: vec![0.0],
        y: vec![y0],
        roots: Vec::new(),
        segments: Vec::new(),
        dir,
    };
    if t_end == 0.0 {
        return Ok(sol);
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(OdeError::NonFinite { t: 0.0 });
    }

    let mut g_prev: Vec<f64> = problem.events.iter().map(|e| (e.g)(&y0)).collect();
    let mut terminal_count = 0usize;

    let mut t = 0.0f64;
    let mut y = y0;
    let mut k1 = rhs(&y);
    let mut h = initial_step(rhs, &y, &k1, dir, settings);
    let mut err_old = 1e-4f64;
    let mut last_rejected = false;
    let mut guard_rejections = 0usize;
    let mut steps = 0usize;

    let expo1 = 0.2 - BETA * 0.75;

    loop {
        if dir * (t_end - t) <= 0.0 {
            break;
        }
        if steps >= settings.max_steps {
            return Err(OdeError::StepLimit {
                t,
                limit: settings.max_steps,
            });
        }
        h = h.min(settings.h_max);
        let mut last = false;
        if dir * (t + 1.01 * dir * h - t_end) >= 0.0 {
            h = dir * (t_end - t);
            last = true;
        }
        if h <= 0.0 || 0.1 * h <= t.abs() * f64::EPSILON {
            return Err(OdeError::StepUnderflow { t, h });
        }
        let hs = dir * h;
        steps += 1;

        let k2 = rhs(&axpy(&y, hs, &[(A21, &k1)]));
        let k3 = rhs(&axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(&axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(&axpy(
            &y,
            hs,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        ));
        let k6 = rhs(&axpy(
            &y,
            hs,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ));
        let y_new = axpy(
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = rhs(&y_new);

        let finite = y_new.iter().chain(k7.iter()).all(|v| v.is_finite());
        let admissible = finite && problem.guard.is_none_or(|guard| guard(&y_new));
        if !admissible {
            guard_rejections += 1;
            if guard_rejections > settings.max_guard_rejections {
                return Err(if finite {
                    OdeError::Inadmissible { t }
                } else {
                    OdeError::NonFinite { t }
                });
            }
            h *= 0.5;
            last_rejected = true;
            continue;
        }

        let err = ((0..N)
            .map(|i| {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sk = settings.atol + settings.rtol * y[i].abs().max(y_new[i].abs());
                (e / sk).powi(2)
            })
            .sum::<f64>()
            / N as f64)
            .sqrt();

        let fac11 = err.powf(expo1);
        let fac = (fac11 / err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;

        if err > 1.0 {
            h /= (1.0 / FAC_MIN).min(fac11 / SAFETY);
            last_rejected = true;
            continue;
        }

        guard_rejections = 0;
        err_old = err.max(1e-4);
        if last_rejected {
            h_new = h_new.min(h);
        }
        last_rejected = false;

        let t_new = if last { t_end } else { t + hs };
        let seg = {
            let ydiff: Vector<N> = std::array::from_fn(|i| y_new[i] - y[i]);
            let bspl: Vector<N> = std::array::from_fn(|i| hs * k1[i] - ydiff[i]);
            let r4: Vector<N> = std::array::from_fn(|i| ydiff[i] - hs * k7[i] - bspl[i]);
            let r5: Vector<N> = std::array::from_fn(|i| {
                hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
            });
            DenseSegment {
                t0: t,
                h: t_new - t,
                coeffs: [y, ydiff, bspl, r4, r5],
            }
        };

        let mut found = locate_roots(problem, &seg, &mut g_prev, &y_new, dir);
        found.sort_by(|a, b| (dir * a.t).total_cmp(&(dir * b.t)));

        let mut stop_at: Option<(f64, Vector<N>)> = None;
        for root in found {
            if let Some((ts, _)) = stop_at {
                if dir * (root.t - ts) > 0.0 {
                    break;
                }
            }
            let counts = problem.events.iter().any(|e| e.id == root.id && e.terminal);
            let (rt, ry) = (root.t, root.y);
            sol.roots.push(root);
            if counts && stop_at.is_none() {
                terminal_count += 1;
                if let StopRule::AfterTerminalRoots(k) = problem.stop {
                    if terminal_count >= k {
                        stop_at = Some((rt, ry));
                    }
                }
            }
        }

        sol.segments.push(seg);
        if let Some((ts, ys)) = stop_at {
            if ts != t {
                sol.t.push(ts);
                sol.y.push(ys);
            }
            break;
        }
        t = t_new;
        y = y_new;
        k1 = k7;
        sol.t.push(t);
        sol.y.push(y);
        h = h_new;
    }

    mark_coincident(&mut sol.roots, settings.coincidence);
    Ok(sol)
}

fn locate_roots<F, const N: usize>(
    problem: &Problem<'_, F, N>,
    seg: &DenseSegment<N>,
    g_prev: &mut [f64],
    y_new: &Vector<N>,
    dir: f64,
) -> Vec<Root<N>>
where
    F: Fn(&Vector<N>) -> Vector<N>,
{
    let settings = &problem.settings;
    let (ta, tb) = (seg.t_start(), seg.t_end());
    let mut out = Vec::new();
    for (k, ev) in problem.events.iter().enumerate() {
        let g_b = (ev.g)(y_new);
        let window = dir * ev.ignore_within;
        let (lo, g_lo) = if dir * (tb - window) <= 0.0 {
            g_prev[k] = g_b;
            continue;
        } else if dir * (ta - window) < 0.0 {
            (window, (ev.g)(&seg.eval(window)))
        } else {
            (ta, g_prev[k])
        };
        g_prev[k] = g_b;

        let s_lo = sign(g_lo);
        let s_hi = sign(g_b);
        if s_lo == 0 || s_lo == s_hi {
            continue;
        }
        let width = settings.event_tol * (tb - ta).abs().min(1.0);
        let (mut a, mut b) = (lo, tb);
        for _ in 0..200 {
            if (b - a).abs() <= width {
                break;
            }
            let mid = 0.5 * (a + b);
            if mid == a || mid == b {
                break;
            }
            let gm = (ev.g)(&seg.eval(mid));
            if gm == 0.0 {
                b = mid;
                break;
            }
            if sign(gm) == s_lo {
                a = mid;
            } else {
                b = mid;
            }
        }
        let y_root = if b == tb { *y_new } else { seg.eval(b) };
        out.push(Root {
            id: ev.id,
            t: b,
            y: y_root,
            direction: (if s_lo < 0 { 1 } else { -1 }) * dir as i8,
            coincident: false,
        });
    }
    out
}

fn mark_coincident<const N: usize>(roots: &mut [Root<N>], window: f64) {
    let n = roots.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if (roots[j].t - roots[i].t).abs() > window {
                break;
            }
            if roots[j].id != roots[i].id {
                roots[i].coincident = true;
                roots[j].coincident = true;
            }
        }
    }
}
