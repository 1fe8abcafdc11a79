//! Stenzel Calabi-Yau structure on the principal orbits `r > 1` of `T*S^4`.
//!
//! All radial profiles are closed forms with hand-computed `d/dr`, returned
//! as [`Jet`]s so that exterior derivatives of the distinguished forms are
//! exact up to rounding.

use serde::{Deserialize, Serialize};

use crate::coframe::{FrameMetric, Form, DR};
use crate::error::{require, Result};
use crate::jet::Jet;

fn c_p() -> f64 {
    0.75f64.powf(0.75)
}

fn c_q() -> f64 {
    0.5 * (4.0f64 / 3.0).powf(0.25)
}

pub fn check_radius(r: f64) -> Result<()> {
    require(r.is_finite() && r > 1.0, "r", r, "r > 1")
}

/// `t = R_-(r) = sqrt((r^2-1)/2)`.
pub fn r_to_t(r: f64) -> Result<f64> {
    require(r.is_finite() && r >= 1.0, "r", r, "r >= 1")?;
    Ok(((r * r - 1.0) / 2.0).sqrt())
}

/// `r = sqrt(2t^2 + 1)`.
pub fn t_to_r(t: f64) -> Result<f64> {
    require(t.is_finite() && t >= 0.0, "t", t, "t >= 0")?;
    Ok((2.0 * t * t + 1.0).sqrt())
}

/// `R_+ = sqrt((r^2+1)/2)`.
pub fn r_plus(r: f64) -> Jet {
    let v = ((r * r + 1.0) / 2.0).sqrt();
    Jet::new(v, r / (2.0 * v))
}

/// `R_- = sqrt((r^2-1)/2)`.
pub fn r_minus(r: f64) -> Result<Jet> {
    check_radius(r)?;
    let v = ((r * r - 1.0) / 2.0).sqrt();
    Ok(Jet::new(v, r / (2.0 * v)))
}

/// Kähler profile `P(r)`, coefficient of `dr∧θ^1` in `ω`.
pub fn profile_p(r: f64) -> Result<Jet> {
    check_radius(r)?;
    let r2 = r * r;
    let v = c_p() * r * (r2 + 1.0) / ((r2 + 2.0).powf(0.75) * (r + 1.0).sqrt() * (r - 1.0).sqrt());
    let log_d = 1.0 / r + 2.0 * r / (r2 + 1.0) - 1.5 * r / (r2 + 2.0) - r / (r2 - 1.0);
    Ok(Jet::new(v, v * log_d))
}

/// Kähler profile `Q(r)`, coefficient of `θ^25 + θ^36 + θ^47` in `ω`.
pub fn profile_q(r: f64) -> Result<Jet> {
    check_radius(r)?;
    let r2 = r * r;
    let v = c_q() * (r2 + 2.0).powf(0.25) * (r + 1.0).sqrt() * (r - 1.0).sqrt();
    let log_d = r / (2.0 * (r2 + 2.0)) + r / (r2 - 1.0);
    Ok(Jet::new(v, v * log_d))
}

/// `𝒫(t) = sqrt(6) sqrt(2t^2+2) / sqrt(2t^2+3)`.
pub fn cal_p(t: f64) -> f64 {
    let t2 = t * t;
    6f64.sqrt() * (2.0 * t2 + 2.0).sqrt() / (2.0 * t2 + 3.0).sqrt()
}

/// `𝒬(t) = t / (t^2+1)`.
pub fn cal_q(t: f64) -> f64 {
    t / (t * t + 1.0)
}

/// Relative residual of the Calabi-Yau condition `P Q^3 = (r/2) R_+^2 R_-^2`.
pub fn cy_residual(r: f64) -> Result<f64> {
    let p = profile_p(r)?.v;
    let q = profile_q(r)?.v;
    let rhs = 0.5 * r * (r * r + 1.0) / 2.0 * (r * r - 1.0) / 2.0;
    Ok((p * q.powi(3) - rhs).abs() / rhs)
}

/// Squared lengths of `∂_r, X1..X7` from their standalone closed forms.
pub fn frame_norms(r: f64) -> Result<[f64; 8]> {
    check_radius(r)?;
    let r2 = r * r;
    let cp = c_p();
    let cq = c_q();
    let x1 = cp * (r2 + 1.0).powf(1.5) / (r2 + 2.0).powf(0.75);
    let dr = cp * r2 * (r2 + 1.0).sqrt() / ((r2 + 2.0).powf(0.75) * (r2 - 1.0));
    let x2 = cq * (r2 + 1.0).sqrt() * (r2 + 2.0).powf(0.25);
    let x5 = cq * (r2 + 2.0).powf(0.25) * (r2 - 1.0) / (r2 + 1.0).sqrt();
    Ok([dr, x1, x2, x2, x2, x5, x5, x5])
}

/// Precomputed radial data at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stenzel {
    pub r: f64,
    pub p: Jet,
    pub q: Jet,
    pub rp: Jet,
    pub rm: Jet,
}

impl Stenzel {
    pub fn at(r: f64) -> Result<Self> {
        Ok(Stenzel { r, p: profile_p(r)?, q: profile_q(r)?, rp: r_plus(r), rm: r_minus(r)? })
    }

    pub fn t(&self) -> f64 {
        self.rm.v
    }

    /// Frame metric weights: `g_rr = rP/(2R_+R_-)`, `g_11 = 2R_+R_-P/r`,
    /// `g_22..g_44 = R_+Q/R_-`, `g_55..g_77 = R_-Q/R_+`.
    pub fn metric(&self) -> FrameMetric {
        let r = Jet::var(self.r);
        let (p, q, rp, rm) = (self.p, self.q, self.rp, self.rm);
        let grr = r * p / (rp * rm).scale(2.0);
        let g11 = (rp * rm * p).scale(2.0) / r;
        let g2 = rp * q / rm;
        let g5 = rm * q / rp;
        FrameMetric { g: [grr, g11, g2, g2, g2, g5, g5, g5] }
    }

    fn r_jet(&self) -> Jet {
        Jet::var(self.r)
    }

    /// `ω = P dr∧θ^1 + Q(θ^25 + θ^36 + θ^47)`.
    pub fn kahler(&self) -> Form {
        let mut f = Form::scalar(2);
        f.add_term(&[DR, 1], 0, self.p);
        for (a, b) in [(2, 5), (3, 6), (4, 7)] {
            f.add_term(&[a, b], 0, self.q);
        }
        f
    }

    /// Real part of the holomorphic volume form.
    pub fn re_omega(&self) -> Form {
        let (rp, rm) = (self.rp, self.rm);
        let half_r = self.r_jet().scale(0.5);
        let mut f = Form::scalar(4);
        f.add_term(&[1, 2, 3, 4], 0, rp.powi(3));
        let c = -(rp * rm * rm);
        for idx in [[1, 2, 6, 7], [1, 5, 3, 7], [1, 5, 6, 4]] {
            f.add_term(&idx, 0, c);
        }
        for idx in [[DR, 2, 3, 7], [DR, 2, 6, 4], [DR, 5, 3, 4]] {
            f.add_term(&idx, 0, half_r * rp);
        }
        f.add_term(&[DR, 5, 6, 7], 0, -(half_r * rm * rm / rp));
        f
    }

    /// Imaginary part of the holomorphic volume form.
    pub fn im_omega(&self) -> Form {
        let (rp, rm) = (self.rp, self.rm);
        let half_r = self.r_jet().scale(0.5);
        let mut f = Form::scalar(4);
        f.add_term(&[1, 5, 6, 7], 0, -rm.powi(3));
        let c = rp * rp * rm;
        for idx in [[1, 2, 3, 7], [1, 2, 6, 4], [1, 5, 3, 4]] {
            f.add_term(&idx, 0, c);
        }
        for idx in [[DR, 2, 6, 7], [DR, 5, 3, 7], [DR, 5, 6, 4]] {
            f.add_term(&idx, 0, half_r * rm);
        }
        f.add_term(&[DR, 2, 3, 4], 0, -(half_r * rp * rp / rm));
        f
    }

    /// Cayley form `Φ = ω^2/2 + Re Ω`.
    pub fn cayley(&self) -> Form {
        let w = self.kahler();
        w.wedge(&w).expect("scalar").scale(0.5).try_add(&self.re_omega()).expect("grade 4")
    }

    /// `⋆ω = ω^3/3!`.
    pub fn star_kahler(&self) -> Form {
        let w = self.kahler();
        w.wedge(&w).and_then(|w2| w2.wedge(&w)).expect("scalar").scale(1.0 / 6.0)
    }

    /// `ω^4/4!`.
    pub fn volume_kahler(&self) -> Form {
        let w = self.kahler();
        let w2 = w.wedge(&w).expect("scalar");
        w2.wedge(&w2).expect("scalar").scale(1.0 / 24.0)
    }
}
