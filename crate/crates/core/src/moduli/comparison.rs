//! Riccati comparison bounds for the Spin(7) system.
//!
//! While `b > t a / (2 sqrt(t^2+1))`, the function `a` is a supersolution of
//! `u' = u(sqrt(3)/sqrt(2t^2+3) u - 1/t)`, whose solutions are explicit. This
//! gives a threshold curve above which blowup is forced, with an upper bound
//! on the blowup time.

use crate::error::{require, Result};

/// `atanh` in the logarithmic form `½ ln((1+x)/(1-x))`.
pub fn atanh(x: f64) -> f64 {
    0.5 * ((1.0 + x) / (1.0 - x)).ln()
}

/// `sqrt(3)/sqrt(2t^2+3)`.
fn sigma(t: f64) -> f64 {
    3f64.sqrt() / (2.0 * t * t + 3.0).sqrt()
}

/// Time at which the lower comparison function attains its maximum, `3 sqrt(2)/2`.
pub const T_STAR: f64 = 2.121_320_343_559_642_4;

/// The a-priori bound `1/(2 atanh(1/2)) = 1/ln 3`: every `|a0|` above it blows up.
pub fn blowup_threshold_a0() -> f64 {
    1.0 / (2.0 * atanh(0.5))
}

/// The asymptote `sqrt(6)/3` of [`threshold_r`].
pub fn threshold_r_limit() -> f64 {
    6f64.sqrt() / 3.0
}

/// `𝓡(t) = 1 / (t atanh(sqrt(3)/sqrt(2t^2+3)))`.
pub fn threshold_r(t: f64) -> Result<f64> {
    require(t.is_finite() && t > 0.0, "t", t, "t > 0")?;
    Ok(1.0 / (t * atanh(sigma(t))))
}

/// Solution of the comparison Riccati equation with `u(t0) = x0`.
pub fn riccati_solution(t0: f64, x0: f64, t: f64) -> Result<f64> {
    require(t0.is_finite() && t0 > 0.0, "t0", t0, "t0 > 0")?;
    require(t.is_finite() && t > 0.0, "t", t, "t > 0")?;
    let k = t0 * x0;
    let den = t * (k * atanh(sigma(t)) - k * atanh(sigma(t0)) + 1.0);
    if den == 0.0 {
        return Err(crate::Error::Pole(format!("comparison solution blows up at t = {t}")));
    }
    Ok(k / den)
}

/// Blowup time `𝓣(t0, x0)` of the comparison solution; `+∞` if `x0 <= 𝓡(t0)`.
pub fn blowup_time_bound(t0: f64, x0: f64) -> Result<f64> {
    let rt = threshold_r(t0)?;
    if !(x0 > rt) {
        return Ok(f64::INFINITY);
    }
    let s0 = sigma(t0);
    let tau = (1.0 / (t0 * x0)).tanh();
    let num = 6f64.sqrt() / 2.0 * (1.0 - 3.0 / (2.0 * t0 * t0 + 3.0)).sqrt() * (1.0 - tau * tau).sqrt();
    Ok(num / (s0 - tau))
}

/// Lower comparison function `v(t) = 36 a0 t / (3 + sqrt(6t^2+9))^2`, valid up
/// to the first critical point of `a`.
pub fn comparison_v(a0: f64, t: f64) -> f64 {
    let s = 3.0 + (6.0 * t * t + 9.0).sqrt();
    36.0 * a0 * t / (s * s)
}

/// Bound on the blowup time of the solution with `a'(0) = a0`, via `v` at its maximum.
pub fn t_blowup_a0(a0: f64) -> Result<f64> {
    blowup_time_bound(T_STAR, comparison_v(a0.abs(), T_STAR))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn t_star_constant() {
        assert_relative_eq!(T_STAR, 3.0 * 2f64.sqrt() / 2.0, epsilon = 1e-16);
    }

    #[test]
    fn threshold_values() {
        assert_relative_eq!(threshold_r(T_STAR).unwrap(), 2f64.sqrt() / 3.0 / atanh(0.5), epsilon = 1e-15);
        assert_relative_eq!(threshold_r(T_STAR).unwrap(), 0.858_182, epsilon = 1e-6);
        assert_relative_eq!(threshold_r(1e4).unwrap(), threshold_r_limit(), epsilon = 1e-4);
        assert_relative_eq!(blowup_threshold_a0(), 1.0 / 3f64.ln(), epsilon = 1e-15);
        assert!(threshold_r(0.0).is_err());
    }

    #[test]
    fn riccati_solves_ode() {
        let (t0, x0) = (1.3, 0.7);
        assert_relative_eq!(riccati_solution(t0, x0, t0).unwrap(), x0, epsilon = 1e-15);
        for &t in &[0.8, 1.5, 3.0] {
            let h = 1e-5;
            let u = riccati_solution(t0, x0, t).unwrap();
            let du = (riccati_solution(t0, x0, t + h).unwrap() - riccati_solution(t0, x0, t - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(du, u * (sigma(t) * u - 1.0 / t), max_relative = 1e-7);
        }
    }

    #[test]
    fn riccati_blows_up_at_bound() {
        let (t0, x0) = (2.0, 1.2);
        let tb = blowup_time_bound(t0, x0).unwrap();
        assert!(tb.is_finite() && tb > t0);
        let u = riccati_solution(t0, x0, tb * (1.0 - 1e-9)).unwrap();
        assert!(u > 1e6);
        assert_eq!(blowup_time_bound(t0, 0.5).unwrap(), f64::INFINITY);
    }

    #[test]
    fn comparison_maximum() {
        let a0 = 0.6;
        let vm = comparison_v(a0, T_STAR);
        assert_relative_eq!(vm, 2.0 * 2f64.sqrt() / 3.0 * a0, epsilon = 1e-15);
        for &dt in &[-1e-3, 1e-3] {
            assert!(comparison_v(a0, T_STAR + dt) < vm);
        }
    }

    #[test]
    fn t_blowup_closed_form() {
        let a0 = 1.0;
        let tau = (0.5f64 / a0).tanh();
        let expected = T_STAR * (1.0 - tau * tau).sqrt() / (1.0 - 2.0 * tau);
        assert_relative_eq!(t_blowup_a0(a0).unwrap(), expected, max_relative = 1e-12);
        assert!((t_blowup_a0(1.0).unwrap() - 24.83).abs() < 0.01);
        assert_eq!(t_blowup_a0(0.9).unwrap(), f64::INFINITY);
    }
}
