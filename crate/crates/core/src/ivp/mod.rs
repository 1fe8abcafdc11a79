//! The singular initial value problem for the Spin(7) system in `t = R_-`.
//!
//! Near `t = 0` the solution is bootstrapped from its Maclaurin series, then
//! continued with an adaptive Dormand-Prince 5(4) integrator. Each accepted
//! step is monitored for the comparison-based blowup certificate, for
//! critical points of `a` inside the trapped region, and for numerical
//! divergence.

mod rk;
pub mod series;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{cal_p, cal_q};
use crate::moduli::comparison::{blowup_time_bound, threshold_r};
use rk::{dopri_step, drive, Control, End, Flow, State};
pub use series::{taylor_coeffs, SeriesCoeffs};

/// Right-hand side `(da/dt, db/dt)` of the Spin(7) system.
pub fn rhs(t: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain { what: "t", value: t, domain: "t > 0" });
    }
    let p = cal_p(t);
    let q = cal_q(t);
    let da = p * a / t * (b - 1.0 / p);
    let db = p / (2.0 * t) * (1.0 - b * b) - p * q / 2.0 * (1.0 - a * a) - q * b;
    Ok((da, db))
}

/// `db/dt` of the reduced system with `a ≡ 0`.
pub fn rhs_a_zero(t: f64, b: f64) -> Result<f64> {
    rhs(t, 0.0, b).map(|(_, db)| db)
}

/// `F(t, a) = (4a^2 - 2)t^2 + 3`; at a critical point of `a`, `a''` has the sign of `a F`.
pub fn trapped_indicator(t: f64, a: f64) -> f64 {
    (4.0 * a * a - 2.0) * t * t + 3.0
}

/// `b - 1/𝒫(t)`, whose sign is the sign of `a'/a`.
pub fn critical_gap(t: f64, b: f64) -> f64 {
    b - 1.0 / cal_p(t)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub order: usize,
    pub t_switch: f64,
    pub rtol: f64,
    pub atol: f64,
    pub horizon: f64,
    pub blowup_magnitude: f64,
    pub max_steps: usize,
    /// Largest tolerated series/integrator mismatch at the handoff.
    pub handoff_tol: f64,
    /// Record samples only at these times (plus the first sample) instead of every step.
    pub sample_times: Option<Vec<f64>>,
    /// Stop as soon as a certificate fires.
    pub stop_on_certificate: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            order: 10,
            t_switch: 1e-3,
            rtol: 1e-10,
            atol: 1e-12,
            horizon: 200.0,
            blowup_magnitude: 1e8,
            max_steps: 2_000_000,
            handoff_tol: 1e-9,
            sample_times: None,
            stop_on_certificate: false,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidOptions(m));
        if self.order < series::MIN_ORDER {
            return Err(Error::InsufficientOrder { got: self.order, need: series::MIN_ORDER });
        }
        if !(self.t_switch > 0.0 && self.t_switch < self.horizon) {
            return bad(format!("t_switch = {} must lie in (0, horizon = {})", self.t_switch, self.horizon));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if !(self.blowup_magnitude > 1.0) {
            return bad("blowup_magnitude must exceed 1".into());
        }
        if !self.horizon.is_finite() {
            return bad("horizon must be finite".into());
        }
        Ok(())
    }

    fn control(&self) -> Control {
        Control {
            rtol: self.rtol,
            atol: self.atol,
            max_steps: self.max_steps,
            blowup_magnitude: self.blowup_magnitude,
            h_min_rel: 1e-14,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub dadt: f64,
    pub dbdt: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// Sign change of `b - 1/𝒫`; `value` is the trapped-region indicator `F`.
    CriticalPoint,
    /// `a` exceeded `𝓡(t)`; `value` is the blowup time bound.
    BlowupCertificate,
    /// A maximum of `a` with `F < 0`; `value` is `F`.
    GlobalCertificate,
    NumericBlowup,
    StepUnderflow,
    Horizon,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub t: f64,
    pub a: f64,
    pub b: f64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    GlobalCertified,
    BlowupCertified,
    GlobalHorizon,
    Undetermined,
}

impl Classification {
    pub fn is_global(self) -> bool {
        matches!(self, Classification::GlobalCertified | Classification::GlobalHorizon)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::GlobalCertified => "GlobalCertified",
            Classification::BlowupCertified => "BlowupCertified",
            Classification::GlobalHorizon => "GlobalHorizon",
            Classification::Undetermined => "Undetermined",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub a0: f64,
    pub series: SeriesCoeffs,
    pub samples: Vec<Sample>,
    pub events: Vec<Event>,
    pub classification: Classification,
    /// Last time reached by the integrator.
    pub t_end: f64,
    pub handoff_discrepancy: f64,
}

impl Trajectory {
    /// The certificate event that decided the classification, if any.
    pub fn certificate(&self) -> Option<&Event> {
        self.events
            .iter()
            .find(|e| matches!(e.kind, EventKind::BlowupCertificate | EventKind::GlobalCertificate))
    }

    /// Time at which numerical divergence was detected.
    pub fn divergence_time(&self) -> Option<f64> {
        self.events
            .iter()
            .find(|e| matches!(e.kind, EventKind::NumericBlowup | EventKind::StepUnderflow))
            .map(|e| e.t)
    }

    /// Sample recorded exactly at `t`.
    pub fn at(&self, t: f64) -> Option<&Sample> {
        self.samples.iter().find(|s| s.t == t)
    }

    /// Critical-point events in time order.
    pub fn critical_points(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| e.kind == EventKind::CriticalPoint)
    }
}

fn system(t: f64, y: &State) -> Result<State> {
    let (da, db) = rhs(t, y[0], y[1])?;
    Ok([da, db])
}

/// Mismatch between the series at `t_switch` and an integration that starts
/// from the series at `t_switch / 2`.
pub fn handoff_check(a0: f64, opts: &SolveOptions) -> Result<f64> {
    opts.validate()?;
    let s = taylor_coeffs(a0, opts.order)?;
    handoff_with(&s, opts)
}

fn handoff_with(s: &SeriesCoeffs, opts: &SolveOptions) -> Result<f64> {
    let ts = opts.t_switch;
    let start = s.eval(ts / 2.0);
    let target = s.eval(ts);
    let mut last = [start[0], start[1]];
    // tight local tolerances so the mismatch measures the series, not the stepper
    let mut ctl = opts.control();
    ctl.rtol = ctl.rtol.min(1e-14);
    ctl.atol = ctl.atol.min(1e-16);
    let (end, _) = drive(&system, ts / 2.0, last, ts, ts / 20.0, &[], &ctl, |acc| {
        last = acc.y1;
        Ok(Flow::Continue)
    })?;
    if end != End::Reached {
        return Err(Error::Numeric("integration failed inside the handoff interval".into()));
    }
    Ok((last[0] - target[0]).abs().max((last[1] - target[1]).abs()))
}

/// Integrate the smooth solution with `a'(0) = a0`, `b(0) = 1`.
///
/// Negative `a0` is handled through the symmetry `(a, b) -> (-a, b)`.
pub fn integrate(a0: f64, opts: &SolveOptions) -> Result<Trajectory> {
    opts.validate()?;
    if !a0.is_finite() {
        return Err(Error::Domain { what: "a0", value: a0, domain: "finite" });
    }
    if a0 < 0.0 {
        let mut tr = integrate(-a0, opts)?;
        tr.a0 = a0;
        tr.series = taylor_coeffs(a0, opts.order)?;
        for s in &mut tr.samples {
            s.a = -s.a;
            s.dadt = -s.dadt;
        }
        for e in &mut tr.events {
            e.a = -e.a;
        }
        return Ok(tr);
    }
    let series = taylor_coeffs(a0, opts.order)?;
    let handoff = handoff_with(&series, opts)?;
    if handoff > opts.handoff_tol {
        return Err(Error::Numeric(format!(
            "series/integrator handoff mismatch {handoff:e} exceeds {:e} at t_switch = {}",
            opts.handoff_tol, opts.t_switch
        )));
    }
    let ts = opts.t_switch;
    let y0 = series.eval(ts);
    let mut samples = vec![Sample { t: ts, a: y0[0], b: y0[1], dadt: y0[2], dbdt: y0[3] }];
    let grid: Vec<f64> = match &opts.sample_times {
        Some(g) => {
            let mut g: Vec<f64> = g.iter().copied().filter(|&x| x > ts && x <= opts.horizon).collect();
            g.sort_by(|x, y| x.partial_cmp(y).unwrap());
            g.dedup();
            g
        }
        None => vec![],
    };
    let record_all = opts.sample_times.is_none();
    let mut events: Vec<Event> = vec![];
    let mut certified: Option<EventKind> = None;
    let ctl = opts.control();

    let (end, t_end) = drive(&system, ts, [y0[0], y0[1]], opts.horizon, ts * 0.1, &grid, &ctl, |acc| {
        let (t1, y1) = (acc.t1, acc.y1);
        if record_all || acc.on_grid {
            samples.push(Sample { t: t1, a: y1[0], b: y1[1], dadt: acc.dy1[0], dbdt: acc.dy1[1] });
        }
        if !y1.iter().all(|v| v.is_finite()) || y1.iter().any(|v| v.abs() > opts.blowup_magnitude) {
            return Ok(Flow::Continue);
        }
        let g0 = critical_gap(acc.t0, acc.y0[1]);
        let g1 = critical_gap(t1, y1[1]);
        if g0 != 0.0 && (g0 > 0.0) != (g1 > 0.0) {
            let (tc, yc) = refine_crossing(acc.t0, &acc.y0, &acc.dy0, acc.h, g0)?;
            let f = trapped_indicator(tc, yc[0]);
            events.push(Event { kind: EventKind::CriticalPoint, t: tc, a: yc[0], b: yc[1], value: f });
            // a ≡ 0 has no genuine maximum, so it never certifies
            if certified.is_none() && g0 > 0.0 && f < 0.0 && yc[0] != 0.0 {
                certified = Some(EventKind::GlobalCertificate);
                events.push(Event { kind: EventKind::GlobalCertificate, t: tc, a: yc[0], b: yc[1], value: f });
            }
        }
        if certified.is_none() && y1[0] > threshold_r(t1)? {
            let bound = blowup_time_bound(t1, y1[0])?;
            certified = Some(EventKind::BlowupCertificate);
            events.push(Event { kind: EventKind::BlowupCertificate, t: t1, a: y1[0], b: y1[1], value: bound });
        }
        if opts.stop_on_certificate && certified.is_some() {
            return Ok(Flow::Halt);
        }
        Ok(Flow::Continue)
    })?;

    let last = *samples.last().expect("first sample");
    let (a_end, b_end) = (last.a, last.b);
    match end {
        End::Blowup => events.push(Event { kind: EventKind::NumericBlowup, t: t_end, a: a_end, b: b_end, value: 0.0 }),
        End::Underflow => {
            events.push(Event { kind: EventKind::StepUnderflow, t: t_end, a: a_end, b: b_end, value: 0.0 })
        }
        End::Reached => events.push(Event { kind: EventKind::Horizon, t: t_end, a: a_end, b: b_end, value: 0.0 }),
        End::Halted => {}
    }
    let diverged = matches!(end, End::Blowup | End::Underflow);
    let classification = match certified {
        Some(EventKind::BlowupCertificate) => Classification::BlowupCertified,
        Some(_) => Classification::GlobalCertified,
        None if end == End::Reached && b_end > 0.0 => Classification::GlobalHorizon,
        None => Classification::Undetermined,
    };
    if classification == Classification::GlobalCertified && diverged {
        return Err(Error::Numeric(format!(
            "a0 = {a0}: global certificate contradicted by numerical divergence at t = {t_end}"
        )));
    }
    if classification == Classification::BlowupCertified && end == End::Reached {
        let bound = events.iter().find(|e| e.kind == EventKind::BlowupCertificate).map(|e| e.value).unwrap();
        if bound < opts.horizon {
            return Err(Error::Numeric(format!(
                "a0 = {a0}: blowup bound {bound} passed without divergence"
            )));
        }
    }
    Ok(Trajectory { a0, series, samples, events, classification, t_end, handoff_discrepancy: handoff })
}

/// Locate the zero of `b - 1/𝒫` inside a step by bisection on the step length.
fn refine_crossing(t0: f64, y0: &State, dy0: &State, h: f64, g0: f64) -> Result<(f64, State)> {
    let (mut lo, mut hi) = (0.0, h);
    let mut y_hi = dopri_step(&system, t0, y0, dy0, h)?.y;
    while (hi - lo).abs() > 1e-12 * t0.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        let ym = dopri_step(&system, t0, y0, dy0, mid)?.y;
        let gm = critical_gap(t0 + mid, ym[1]);
        if (gm > 0.0) == (g0 > 0.0) {
            lo = mid;
        } else {
            hi = mid;
            y_hi = ym;
        }
    }
    Ok((t0 + hi, y_hi))
}

/// Result of integrating the reduced `a ≡ 0` equation from `t = sqrt(6)/2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AZeroRun {
    pub nu: f64,
    /// Samples in increasing `t`, covering both directions from the reference time.
    pub samples: Vec<(f64, f64)>,
    /// Divergence time in the backward direction, if it occurred before `t_min`.
    pub backward_blowup: Option<f64>,
    /// Divergence time in the forward direction, if it occurred before the horizon.
    pub forward_blowup: Option<f64>,
}

pub const T_REF: f64 = 1.224_744_871_391_589; // sqrt(6)/2

/// Integrate `db/dt` with `a ≡ 0` from `b(sqrt(6)/2) = nu`, backward to `t_min` and forward to the horizon.
pub fn integrate_a_zero(nu: f64, t_min: f64, opts: &SolveOptions) -> Result<AZeroRun> {
    opts.validate()?;
    if !(t_min > 0.0 && t_min < T_REF) {
        return Err(Error::InvalidOptions(format!("t_min = {t_min} must lie in (0, sqrt(6)/2)")));
    }
    let f = |t: f64, y: &State| -> Result<State> { Ok([rhs_a_zero(t, y[0])?, 0.0]) };
    let ctl = opts.control();
    let grid_bwd: Vec<f64> = opts.sample_times.as_ref().map_or(vec![], |g| {
        let mut v: Vec<f64> = g.iter().copied().filter(|&x| x < T_REF && x >= t_min).collect();
        v.sort_by(|x, y| y.partial_cmp(x).unwrap());
        v
    });
    let grid_fwd: Vec<f64> = opts.sample_times.as_ref().map_or(vec![], |g| {
        let mut v: Vec<f64> = g.iter().copied().filter(|&x| x > T_REF && x <= opts.horizon).collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v
    });
    let record_all = opts.sample_times.is_none();
    let mut back = vec![];
    let (end_b, tb) = drive(&f, T_REF, [nu, 0.0], t_min, 1e-3, &grid_bwd, &ctl, |acc| {
        if record_all || acc.on_grid {
            back.push((acc.t1, acc.y1[0]));
        }
        Ok(Flow::Continue)
    })?;
    let mut fwd = vec![];
    let (end_f, tf) = drive(&f, T_REF, [nu, 0.0], opts.horizon, 1e-3, &grid_fwd, &ctl, |acc| {
        if record_all || acc.on_grid {
            fwd.push((acc.t1, acc.y1[0]));
        }
        Ok(Flow::Continue)
    })?;
    back.reverse();
    let mut samples = back;
    samples.push((T_REF, nu));
    samples.extend(fwd);
    let diverged = |e: End| matches!(e, End::Blowup | End::Underflow);
    Ok(AZeroRun {
        nu,
        samples,
        backward_blowup: diverged(end_b).then_some(tb),
        forward_blowup: diverged(end_f).then_some(tf),
    })
}
