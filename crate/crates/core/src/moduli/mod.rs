//! Moduli of invariant Spin(7) instantons: parameter sweeps, the critical
//! value `x` bounding the smooth family on `P_{π_1}`, the explicit `b_ν`
//! family on `P_{π_2}`, and extension criteria at the singular orbit.

pub mod comparison;

use serde::{Deserialize, Serialize};

use crate::connections::{id_residuals, Bundle, IdState};
use crate::error::{Error, Result};
use crate::ivp::{integrate, rhs_a_zero, Classification, SeriesCoeffs, SolveOptions, T_REF};
use crate::sweep::{map_ordered, Execution};
use comparison::blowup_threshold_a0;

/// Left endpoint `-2 sqrt(5)/5` of the `b_ν` family (included).
pub const NU_1: f64 = -0.894_427_190_999_915_9;
/// Right endpoint `sqrt(10)/5` (excluded); `b_{ν_2}` is the HYM solution on `P_{π_1}`.
pub const NU_2: f64 = 0.632_455_532_033_675_9;
/// `b_ν` at `ν = -sqrt(10)/5` is the HYM solution on `P_{π_2}`.
pub const NU_HYM_PI2: f64 = -0.632_455_532_033_675_9;

/// Blowup time of `b_ν`, if the solution through `b(sqrt(6)/2) = ν` has a pole.
pub fn b_nu_blowup_time(nu: f64) -> Option<f64> {
    let s5 = 5f64.sqrt();
    let k = s5 * nu + 2.0;
    let disc = 5.0 * nu * nu - 2.0;
    if disc <= 0.0 || k == 0.0 {
        return None;
    }
    // pole needs (sqrt(5)ν + 1)/(sqrt(5)ν + 2) > 0
    if (s5 * nu + 1.0) / k <= 0.0 {
        return None;
    }
    Some(6f64.sqrt() / 2.0 * disc.sqrt() / k.abs())
}

/// Closed-form solution of the `a ≡ 0` equation with `b(sqrt(6)/2) = ν`.
///
/// Returns a pole error at, or beyond, the blowup time as seen from `sqrt(6)/2`.
pub fn b_nu(nu: f64, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain { what: "t", value: t, domain: "t > 0" });
    }
    if !nu.is_finite() {
        return Err(Error::Domain { what: "nu", value: nu, domain: "finite" });
    }
    if let Some(tb) = b_nu_blowup_time(nu) {
        if (t - tb) * (T_REF - tb) <= 0.0 {
            return Err(Error::Pole(format!("b_nu with nu = {nu} blows up at t = {tb}")));
        }
    }
    let (s2, s3, s5, s6) = (2f64.sqrt(), 3f64.sqrt(), 5f64.sqrt(), 6f64.sqrt());
    let w = (2.0 * t * t + 3.0).sqrt();
    let rt = (t * t + 1.0).sqrt();
    let k = s5 * nu + 2.0;
    if k.abs() < 1e-14 {
        return Ok(-(s3 / 3.0) * w / rt);
    }
    let num = s6 - nu * (10.0 * t * t + 15.0).sqrt();
    let den = 30f64.sqrt() * nu + s6 - k * w;
    Ok(s2 / 2.0 * (1.0 + num / den) / rt)
}

/// Whether `ν` lies in the smooth family `[ν_1, ν_2)` on `P_{π_2}`.
pub fn in_b_nu_family(nu: f64) -> bool {
    (NU_1..NU_2).contains(&nu)
}

/// `max_{t ∈ [0.5, 5]} |b_ν(t) - 1/sqrt(t^2+1)|` on a uniform grid of 2001 points.
pub fn gluing_gap(nu: f64) -> Result<f64> {
    let n = 2001;
    let mut m = 0.0f64;
    for i in 0..n {
        let t = 0.5 + 4.5 * i as f64 / (n - 1) as f64;
        m = m.max((b_nu(nu, t)? - 1.0 / (t * t + 1.0).sqrt()).abs());
    }
    Ok(m)
}

/// Smooth-extension test at `t = 0` on Maclaurin data.
///
/// `a` must be odd with `a(0) = 0`; `b ∓ 1` must be even and vanish to
/// second order, with the sign fixed by the bundle.
pub fn extension_check(a: &[f64], b: &[f64], bundle: Bundle) -> Result<bool> {
    let need = crate::ivp::series::MIN_ORDER + 1;
    if a.len() < need || b.len() < need {
        return Err(Error::InsufficientOrder { got: a.len().min(b.len()).saturating_sub(1), need: need - 1 });
    }
    let tol = 1e-12;
    let a_ok = a.iter().step_by(2).all(|c| c.abs() <= tol);
    let b_shift: Vec<f64> = b.iter().enumerate().map(|(i, &c)| if i == 0 { c - bundle.sign() } else { c }).collect();
    let b_ok = b_shift.iter().skip(1).step_by(2).all(|c| c.abs() <= tol) && b_shift[0].abs() <= tol;
    Ok(a_ok && b_ok)
}

/// Extension check for a bootstrapped series.
pub fn series_extends(s: &SeriesCoeffs, bundle: Bundle) -> Result<bool> {
    extension_check(&s.a, &s.b, bundle)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyPoint {
    pub a0: f64,
    pub classification: Classification,
    pub t_cert: Option<f64>,
    pub blowup_bound: Option<f64>,
    pub divergence_time: Option<f64>,
}

fn classify(a0: f64, opts: &SolveOptions) -> Result<SurveyPoint> {
    let tr = integrate(a0, opts)?;
    let cert = tr.certificate();
    let blowup_bound = cert
        .filter(|e| e.kind == crate::ivp::EventKind::BlowupCertificate)
        .map(|e| e.value);
    Ok(SurveyPoint {
        a0,
        classification: tr.classification,
        t_cert: cert.map(|e| e.t),
        blowup_bound,
        divergence_time: tr.divergence_time(),
    })
}

/// Classify every `a0` of the grid; results are returned in grid order.
pub fn survey(grid: &[f64], opts: &SolveOptions) -> Result<Vec<SurveyPoint>> {
    survey_with(grid, opts, Execution::default())
}

pub fn survey_with(grid: &[f64], opts: &SolveOptions, exec: Execution) -> Result<Vec<SurveyPoint>> {
    opts.validate()?;
    map_ordered(grid, exec, |&a0| classify(a0, opts)).into_iter().collect()
}

/// `(x_lo, x_hi)`: the largest global `|a0|` and the smallest certified-blowup `|a0|`.
pub fn x_bracket(points: &[SurveyPoint]) -> (Option<f64>, Option<f64>) {
    let lo = points
        .iter()
        .filter(|p| p.classification.is_global())
        .map(|p| p.a0.abs())
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.max(x))));
    let hi = points
        .iter()
        .filter(|p| p.classification == Classification::BlowupCertified)
        .map(|p| p.a0.abs())
        .fold(None, |m: Option<f64>, x| Some(m.map_or(x, |m| m.min(x))));
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BracketStatus {
    Resolved,
    /// A probe was undetermined; the bracket is the widest one certified so far.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalBracket {
    pub x_lo: f64,
    pub x_hi: f64,
    pub tol: f64,
    pub status: BracketStatus,
    /// Whether any global verdict below `x_lo` relied on reaching the horizon.
    pub horizon_used: bool,
    pub probes: Vec<SurveyPoint>,
}

/// Bisect for the boundary `x` between global and blowing-up solutions on `P_{π_1}`.
pub fn critical_x(tol: f64, opts: &SolveOptions) -> Result<CriticalBracket> {
    if !(tol > 0.0) {
        return Err(Error::InvalidOptions(format!("tol = {tol} must be positive")));
    }
    let mut probes = vec![];
    let lo_pt = classify(0.0, opts)?;
    let hi_pt = classify(blowup_threshold_a0(), opts)?;
    probes.push(lo_pt);
    probes.push(hi_pt);
    if !lo_pt.classification.is_global() || hi_pt.classification != Classification::BlowupCertified {
        return Err(Error::Numeric(format!(
            "bracket endpoints not certified: a0 = 0 is {:?}, a0 = {} is {:?}",
            lo_pt.classification,
            hi_pt.a0,
            hi_pt.classification
        )));
    }
    let (mut lo, mut hi) = (0.0, blowup_threshold_a0());
    let mut horizon_used = lo_pt.classification == Classification::GlobalHorizon;
    let mut status = BracketStatus::Resolved;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let p = classify(mid, opts)?;
        probes.push(p);
        match p.classification {
            Classification::BlowupCertified => hi = mid,
            Classification::GlobalCertified => lo = mid,
            Classification::GlobalHorizon => {
                lo = mid;
                horizon_used = true;
            }
            Classification::Undetermined => {
                status = BracketStatus::Undetermined;
                break;
            }
        }
    }
    Ok(CriticalBracket { x_lo: lo, x_hi: hi, tol, status, horizon_used, probes })
}

/// A Spin(7) instanton from the `b_ν` family that is not HYM.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonHymWitness {
    pub nu: f64,
    pub t: f64,
    pub state: IdState,
    pub spin7_residual: f64,
    pub hym_omega_residual: f64,
    pub hym_trace_residual: f64,
}

pub fn non_hym_witness(nu: f64, t: f64) -> Result<NonHymWitness> {
    let b = b_nu(nu, t)?;
    let dbdt = rhs_a_zero(t, b)?;
    let state = IdState::from_t(t, 0.0, b, 0.0, dbdt)?;
    let res = id_residuals(&state)?;
    Ok(NonHymWitness {
        nu,
        t,
        state,
        spin7_residual: res.spin7,
        hym_omega_residual: res.hym_omega,
        hym_trace_residual: res.hym_trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluingRecord {
    pub k: u32,
    pub nu: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pi1Branch {
    pub bracket: CriticalBracket,
    /// Beyond this `|a0|` blowup is proved by comparison.
    pub comparison_threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pi2Branch {
    pub nu_min: f64,
    pub nu_max: f64,
    pub nu_hym: f64,
    /// `lim_{t→∞} b_{ν_1}(t)`, evaluated from the closed form.
    pub nu_min_limit: f64,
    pub gluing: Vec<GluingRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuliDescription {
    pub pi1: Pi1Branch,
    pub pi2: Pi2Branch,
}

pub fn moduli_description(tol: f64, opts: &SolveOptions) -> Result<ModuliDescription> {
    let bracket = critical_x(tol, opts)?;
    let gluing = (1..=4)
        .map(|k| {
            let nu = NU_2 - 10f64.powi(-(k as i32));
            Ok(GluingRecord { k, nu, gap: gluing_gap(nu)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModuliDescription {
        pi1: Pi1Branch { bracket, comparison_threshold: blowup_threshold_a0() },
        pi2: Pi2Branch {
            nu_min: NU_1,
            nu_max: NU_2,
            nu_hym: NU_HYM_PI2,
            nu_min_limit: b_nu(NU_1, 1e8)?,
            gluing,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ivp::taylor_coeffs;
    use approx::assert_relative_eq;

    #[test]
    fn constants() {
        assert_relative_eq!(NU_1, -2.0 * 5f64.sqrt() / 5.0, epsilon = 1e-16);
        assert_relative_eq!(NU_2, 10f64.sqrt() / 5.0, epsilon = 1e-16);
        assert_eq!(NU_HYM_PI2, -NU_2);
    }

    #[test]
    fn b_nu_reference_value_and_ode() {
        for &nu in &[NU_1, -0.7, 0.0, 0.5, 1.0, -1.0] {
            assert_relative_eq!(b_nu(nu, T_REF).unwrap(), nu, epsilon = 1e-14);
        }
        for &(nu, t) in &[(0.0, 0.7), (0.3, 2.0), (-0.8, 4.0), (1.0, 1.5), (-1.0, 3.0)] {
            let h = 1e-5;
            let db = (b_nu(nu, t + h).unwrap() - b_nu(nu, t - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(db, rhs_a_zero(t, b_nu(nu, t).unwrap()).unwrap(), epsilon = 1e-7);
        }
    }

    #[test]
    fn special_members() {
        for &t in &[0.3f64, 1.0, 6.0] {
            let hym1 = 1.0 / (t * t + 1.0).sqrt();
            assert_relative_eq!(b_nu(NU_HYM_PI2, t).unwrap(), -hym1, epsilon = 1e-13);
            assert_relative_eq!(b_nu(NU_2, t).unwrap(), hym1, epsilon = 1e-12);
            let deg = -(3f64.sqrt() / 3.0) * (2.0 * t * t + 3.0).sqrt() / (t * t + 1.0).sqrt();
            assert_relative_eq!(b_nu(NU_1, t).unwrap(), deg, epsilon = 1e-13);
        }
        assert_relative_eq!(b_nu(NU_1, 1e8).unwrap(), -(6f64.sqrt()) / 3.0, epsilon = 1e-12);
        assert!(b_nu(0.0, 1e4).unwrap().abs() < 1e-3);
    }

    #[test]
    fn family_members_extend_to_pi2() {
        for &nu in &[NU_1, -0.6, 0.0, 0.6] {
            assert_relative_eq!(b_nu(nu, 1e-7).unwrap(), -1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn blowup_times() {
        let expected = 6f64.sqrt() / 2.0 * 3f64.sqrt() / (5f64.sqrt() + 2.0);
        assert_relative_eq!(b_nu_blowup_time(1.0).unwrap(), expected, epsilon = 1e-15);
        assert!((expected - 0.5007).abs() < 1e-4);
        assert!(b_nu_blowup_time(0.0).is_none());
        assert!(b_nu_blowup_time(-0.7).is_none());
        assert!(b_nu_blowup_time(NU_1).is_none());
        let tb = b_nu_blowup_time(-1.0).unwrap();
        assert!(tb > T_REF);
        assert!(matches!(b_nu(-1.0, tb), Err(Error::Pole(_))));
        assert!(matches!(b_nu(1.0, 0.4), Err(Error::Pole(_))));
        assert!(b_nu(1.0, 0.6).is_ok());
    }

    #[test]
    fn family_interval() {
        assert!(in_b_nu_family(NU_1));
        assert!(!in_b_nu_family(NU_2));
        assert!(in_b_nu_family(0.0));
    }

    #[test]
    fn extension_predicates() {
        let s = taylor_coeffs(0.6, 10).unwrap();
        assert!(series_extends(&s, Bundle::Pi1).unwrap());
        assert!(!series_extends(&s, Bundle::Pi2).unwrap());
        let zeros = vec![0.0; 6];
        assert!(!extension_check(&zeros, &zeros, Bundle::Pi1).unwrap());
        let mut b = vec![0.0; 6];
        b[0] = -1.0;
        assert!(extension_check(&zeros, &b, Bundle::Pi2).unwrap());
        b[1] = 0.1;
        assert!(!extension_check(&zeros, &b, Bundle::Pi2).unwrap());
        assert!(extension_check(&zeros[..3], &b[..3], Bundle::Pi2).is_err());
    }

    #[test]
    fn x_bracket_from_points() {
        let p = |a0: f64, c| SurveyPoint { a0, classification: c, t_cert: None, blowup_bound: None, divergence_time: None };
        let pts = [
            p(0.1, Classification::GlobalCertified),
            p(0.4, Classification::GlobalHorizon),
            p(0.6, Classification::BlowupCertified),
            p(0.8, Classification::BlowupCertified),
        ];
        assert_eq!(x_bracket(&pts), (Some(0.4), Some(0.6)));
    }
}
