//! Dormand-Prince 5(4) stepping for planar systems.

use crate::error::{Error, Result};

pub(crate) type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

pub(crate) struct Step {
    pub y: State,
    pub err: State,
    /// Derivative at the new point (first stage of the next step).
    pub dy: State,
}

/// One Dormand-Prince step of size `h` (negative for backward integration).
pub(crate) fn dopri_step<F>(f: &F, t: f64, y: &State, k1: &State, h: f64) -> Result<Step>
where
    F: Fn(f64, &State) -> Result<State>,
{
    let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]))?;
    let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]))?;
    let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]))?;
    let k5 = f(t + C5 * h, &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
    let k6 = f(t + h, &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
    let y5 = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(t + h, &y5)?;
    let mut err = [0.0; 2];
    for i in 0..2 {
        err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
    }
    Ok(Step { y: y5, err, dy: k7 })
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Control {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub blowup_magnitude: f64,
    /// Smallest admissible `|h| / max(1, |t|)`.
    pub h_min_rel: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum End {
    Reached,
    Blowup,
    Underflow,
    Halted,
}

/// An accepted step from `(t0, y0)` to `(t1, y1)`.
pub(crate) struct Accepted {
    pub t0: f64,
    pub y0: State,
    pub dy0: State,
    pub h: f64,
    pub t1: f64,
    pub y1: State,
    pub dy1: State,
    /// `t1` coincides with one of the requested output times.
    pub on_grid: bool,
}

pub(crate) enum Flow {
    Continue,
    Halt,
}

fn error_norm(err: &State, y0: &State, y1: &State, c: &Control) -> f64 {
    let mut m = 0.0f64;
    for i in 0..2 {
        let sc = c.atol + c.rtol * y0[i].abs().max(y1[i].abs());
        m = m.max((err[i] / sc).abs());
    }
    m
}

/// Adaptive integration from `t0` to `t_end`, landing exactly on every time in
/// `grid` (sorted in the direction of integration). Returns the end reason and
/// the last time reached.
#[allow(clippy::too_many_arguments)]
pub(crate) fn drive<F, C>(
    f: &F,
    t0: f64,
    y0: State,
    t_end: f64,
    h0: f64,
    grid: &[f64],
    ctl: &Control,
    mut on_step: C,
) -> Result<(End, f64)>
where
    F: Fn(f64, &State) -> Result<State>,
    C: FnMut(&Accepted) -> Result<Flow>,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut dy = f(t, &y)?;
    let mut h = h0.abs() * dir;
    let mut gi = grid.iter().position(|&g| (g - t) * dir > 0.0).unwrap_or(grid.len());
    let mut steps = 0usize;
    while (t_end - t) * dir > 0.0 {
        if steps >= ctl.max_steps {
            return Err(Error::Numeric(format!("step budget of {} exhausted at t = {t}", ctl.max_steps)));
        }
        // next mandatory landing point
        let mut target = t_end;
        let mut on_grid = false;
        if gi < grid.len() && (grid[gi] - t_end) * dir <= 0.0 {
            target = grid[gi];
            on_grid = true;
        }
        let mut clamped = false;
        let h_pref = h;
        if (t + h - target) * dir >= 0.0 {
            h = target - t;
            clamped = true;
        }
        if h.abs() < ctl.h_min_rel * t.abs().max(1.0) {
            return Ok((End::Underflow, t));
        }
        let st = match dopri_step(f, t, &y, &dy, h) {
            Ok(s) => s,
            Err(e @ Error::Domain { .. }) => return Err(e),
            Err(_) => {
                h *= 0.25;
                steps += 1;
                continue;
            }
        };
        let finite = st.y.iter().chain(st.dy.iter()).all(|v| v.is_finite());
        let en = if finite { error_norm(&st.err, &y, &st.y, ctl) } else { f64::INFINITY };
        steps += 1;
        if en <= 1.0 {
            let t1 = if clamped { target } else { t + h };
            let acc = Accepted {
                t0: t,
                y0: y,
                dy0: dy,
                h,
                t1,
                y1: st.y,
                dy1: st.dy,
                on_grid: clamped && on_grid,
            };
            let flow = on_step(&acc)?;
            t = t1;
            y = st.y;
            dy = st.dy;
            if clamped && on_grid {
                gi += 1;
            }
            if y.iter().any(|v| v.abs() > ctl.blowup_magnitude) {
                return Ok((End::Blowup, t));
            }
            if let Flow::Halt = flow {
                return Ok((End::Halted, t));
            }
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            // a clamp onto a landing point must not shrink the step for good
            let next = h.abs() * fac;
            h = if clamped { next.max(h_pref.abs()) } else { next } * dir;
        } else {
            let fac = if en.is_finite() { (0.9 * en.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= fac;
        }
    }
    Ok((End::Reached, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctl() -> Control {
        Control { rtol: 1e-10, atol: 1e-12, max_steps: 100_000, blowup_magnitude: 1e8, h_min_rel: 1e-14 }
    }

    #[test]
    fn harmonic_oscillator() {
        let f = |_t: f64, y: &State| Ok([y[1], -y[0]]);
        let grid = [1.0, 2.0, 3.0];
        let mut seen = vec![];
        let (end, t) = drive(&f, 0.0, [0.0, 1.0], 10.0, 0.1, &grid, &ctl(), |s| {
            if s.on_grid {
                seen.push((s.t1, s.y1[0]));
            }
            Ok(Flow::Continue)
        })
        .unwrap();
        assert_eq!(end, End::Reached);
        assert_eq!(t, 10.0);
        assert_eq!(seen.len(), 3);
        for (t, y) in seen {
            assert_relative_eq!(y, t.sin(), epsilon = 1e-9);
        }
    }

    #[test]
    fn backward_and_blowup() {
        // y' = y^2, y(1) = 1 has y = 1/(2 - t), blowing up at t = 2
        let f = |_t: f64, y: &State| Ok([y[0] * y[0], 0.0]);
        let (end, t) = drive(&f, 1.0, [1.0, 0.0], 5.0, 0.01, &[], &ctl(), |_| Ok(Flow::Continue)).unwrap();
        assert!(matches!(end, End::Blowup | End::Underflow));
        assert!((t - 2.0).abs() < 1e-6);
        let (end, t) = drive(&f, 1.0, [1.0, 0.0], 0.0, 0.01, &[], &ctl(), |_| Ok(Flow::Continue)).unwrap();
        assert_eq!(end, End::Reached);
        assert_eq!(t, 0.0);
    }
}
