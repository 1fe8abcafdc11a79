//! The identity suite behind `stenzel verify`.

use std::f64::consts::PI;

use serde::Serialize;
use stenzel_spin7::coframe::{d_theta, hodge_star, Form, So3Bracket};
use stenzel_spin7::connections::{
    abelian_alpha, abelian_curvature, canonical_connection, canonical_curvature_closed_form, curvature_with,
    hym_constraint_residual, hym_pi, id_curvature_closed_form, id_curvature_with, id_residuals, p1_family,
    residuals, s4_instanton_checks, trivial_so3_curvature, Bundle,
};
use stenzel_spin7::geometry::{cy_residual, profile_q, Stenzel};
use stenzel_spin7::ivp::taylor_coeffs;
use stenzel_spin7::moduli::comparison::{blowup_threshold_a0, threshold_r, threshold_r_limit};
use stenzel_spin7::moduli::{b_nu, non_hym_witness, NU_HYM_PI2};
use stenzel_spin7::{Jet, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    /// Passes when the value is at most the bound.
    Below,
    /// Passes when the value exceeds the bound.
    Above,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub identity: &'static str,
    pub value: f64,
    pub bound: f64,
    pub sense: Sense,
    pub pass: bool,
}

fn below(id: &'static str, identity: &'static str, value: f64, bound: f64) -> Check {
    Check { id, identity, value, bound, sense: Sense::Below, pass: value <= bound }
}

fn above(id: &'static str, identity: &'static str, value: f64, bound: f64) -> Check {
    Check { id, identity, value, bound, sense: Sense::Above, pass: value > bound }
}

const RADII: [f64; 4] = [1.2, 2.0, 3.7, 10.0];

fn max_over<F: Fn(f64) -> Result<f64>>(f: F) -> Result<f64> {
    RADII.iter().try_fold(0.0f64, |m, &r| Ok(m.max(f(r)?)))
}

/// Run every identity check. `br` is the so(3) bracket used for curvature;
/// passing a flipped bracket must make the curvature checks fail.
pub fn run(br: So3Bracket) -> Result<Vec<Check>> {
    let mut out = vec![];

    let mut cy = 0.0f64;
    for i in 0..200 {
        let r = (1.001f64.ln() + (100f64.ln() - 1.001f64.ln()) * i as f64 / 199.0).exp();
        cy = cy.max(cy_residual(r)?);
    }
    out.push(below("cy", "Calabi-Yau profile equation PQ^3 = (r/2)R+^2 R-^2", cy, 1e-10));

    let mc = Form::monomial(&[2, 5], 1.0)
        .try_add(&Form::monomial(&[3, 6], 1.0))?
        .try_add(&Form::monomial(&[4, 7], 1.0))?;
    out.push(below("maurer_cartan", "dθ1 = θ25 + θ36 + θ47", d_theta(1).max_abs_diff(&mc)?, 0.0));
    let mut dd = 0.0f64;
    for k in 1..=10 {
        dd = dd.max(d_theta(k).d().max_abs());
    }
    out.push(below("d_squared", "d(dθk) = 0 for all k", dd, 0.0));

    out.push(below(
        "q_prime",
        "Q' = P",
        max_over(|r| Ok((profile_q(r)?.d - Stenzel::at(r)?.p.v).abs()))?,
        1e-12,
    ));
    out.push(below(
        "closed",
        "ω, Re Ω, Im Ω and Φ are closed",
        max_over(|r| {
            let g = Stenzel::at(r)?;
            Ok([g.kahler(), g.re_omega(), g.im_omega(), g.cayley()].iter().fold(0.0f64, |m, f| m.max(f.d().max_abs())))
        })?,
        1e-10,
    ));
    out.push(below(
        "cayley_self_dual",
        "⋆Φ = Φ",
        max_over(|r| {
            let g = Stenzel::at(r)?;
            let phi = g.cayley();
            Ok(hodge_star(&phi, &g.metric())?.max_abs_diff(&phi)? / phi.max_abs())
        })?,
        1e-12,
    ));
    out.push(below(
        "omega_algebra",
        "Re Ω∧Re Ω = Im Ω∧Im Ω and Re Ω∧Im Ω = 0",
        max_over(|r| {
            let g = Stenzel::at(r)?;
            let (re, im) = (g.re_omega(), g.im_omega());
            let rr = re.wedge(&re)?;
            let scale = rr.max_abs();
            Ok(rr.max_abs_diff(&im.wedge(&im)?)?.max(re.wedge(&im)?.max_abs()) / scale)
        })?,
        1e-12,
    ));

    let mut curv = 0.0f64;
    for &(a, b, da, db) in &[(0.3, -0.7, 0.2, 1.1), (1.4, 0.5, -0.9, 0.05), (-2.0, 1.5, 3.0, -0.4)] {
        let (a, b) = (Jet::new(a, da), Jet::new(b, db));
        curv = curv.max(id_curvature_with(a, b, br).max_abs_diff(&id_curvature_closed_form(a, b))?);
    }
    out.push(below("curvature_id", "F = dA + ½[A∧A] for the invariant family", curv, 1e-12));
    let can = curvature_with(&canonical_connection(), br)?;
    out.push(below(
        "curvature_canonical",
        "canonical curvature (θ23+θ56)e1 + (θ24+θ57)e2 + (θ34+θ67)e3",
        can.max_abs_diff(&canonical_curvature_closed_form())?,
        0.0,
    ));

    let worst = |res: stenzel_spin7::connections::Residuals| res.spin7.max(res.hym_trace).max(res.hym_omega);
    out.push(below(
        "abelian_instanton",
        "abelian K-family is Spin(7) and HYM",
        max_over(|r| residuals(&abelian_curvature(abelian_alpha(1.3, r)?), &Stenzel::at(r)?).map(worst))?,
        1e-10,
    ));
    out.push(below(
        "p1_family",
        "three-parameter family on the trivial bundle",
        max_over(|r| residuals(&trivial_so3_curvature(p1_family([0.3, -1.1, 2.0], r)?), &Stenzel::at(r)?).map(worst))?,
        1e-10,
    ));
    for (id, bundle) in [("hym_pi1", Bundle::Pi1), ("hym_pi2", Bundle::Pi2)] {
        out.push(below(
            id,
            "HYM connection a = 0, b = ±1/R+",
            max_over(|r| {
                let s = hym_pi(bundle, r)?;
                Ok(worst(id_residuals(&s)?).max(hym_constraint_residual(&s)?))
            })?,
            1e-10,
        ));
    }

    let w = non_hym_witness(0.0, 2.0)?;
    out.push(below("witness_spin7", "ν = 0 member of the b_ν family is Spin(7)", w.spin7_residual, 1e-8));
    out.push(above("witness_not_hym", "ν = 0 member has F∧Ω ≠ 0", w.hym_omega_residual, 1e-2));

    let s4 = s4_instanton_checks()?;
    out.push(below("s4_self_dual", "⋆F_SD = F_SD and ⋆F_ASD = -F_ASD on S4", s4.sd_residual.max(s4.asd_residual), 0.0));
    out.push(below(
        "s4_restriction",
        "HYM connections restrict to the S4 instantons",
        s4.restriction_pi1_error.max(s4.restriction_pi2_error),
        1e-15,
    ));
    out.push(below(
        "s4_energy",
        "|F|^2 = 3 and energy 8π²",
        (s4.norm_sq_sd - 3.0).abs().max((s4.energy_sd - 8.0 * PI * PI).abs()).max((s4.energy_asd - 8.0 * PI * PI).abs()),
        1e-10,
    ));
    out.push(below("s4_p1", "p1 = -1 and +1", (s4.p1_pi1 + 1.0).abs().max((s4.p1_pi2 - 1.0).abs()), 1e-12));

    let mut tay = 0.0f64;
    for a0 in [0.0, 0.5, 1.0] {
        let s = taylor_coeffs(a0, 10)?;
        tay = tay
            .max((s.a[1] - a0).abs())
            .max((s.a[3] + a0 / 3.0).abs())
            .max((s.b[2] + 0.5).abs())
            .max((s.b[4] - 3.0 / 8.0 - a0 * a0 / 6.0).abs());
    }
    out.push(below("taylor", "a = a0 t - a0 t^3/3 + …, b = 1 - t^2/2 + (3/8 + a0^2/6) t^4 + …", tay, 1e-12));

    out.push(below(
        "threshold",
        "𝓡(3√2/2) = √2/(3 atanh ½), 𝓡 → √6/3, a0 bound 1/ln 3",
        (threshold_r(3.0 * 2f64.sqrt() / 2.0)? - 2f64.sqrt() / (3.0 * 0.5f64.atanh()))
            .abs()
            .max((threshold_r(1e6)? - threshold_r_limit()).abs())
            .max((blowup_threshold_a0() - 1.0 / 3f64.ln()).abs()),
        1e-6,
    ));
    out.push(below(
        "b_nu_hym",
        "b_ν with ν = -√10/5 equals -1/sqrt(t^2+1)",
        [0.5, 1.0, 3.0]
            .iter()
            .try_fold(0.0f64, |m, &t| Ok::<_, stenzel_spin7::Error>(m.max((b_nu(NU_HYM_PI2, t)? + 1.0 / (t * t + 1.0f64).sqrt()).abs())))?,
        1e-12,
    ));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_pass_with_standard_bracket() {
        let checks = run(So3Bracket::STANDARD).unwrap();
        let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
        assert!(failed.is_empty(), "{failed:?}");
    }

    #[test]
    fn flipped_bracket_fails_curvature() {
        let checks = run(So3Bracket::STANDARD.flipped()).unwrap();
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.id).collect();
        assert!(failed.contains(&"curvature_id"), "{failed:?}");
    }
}
