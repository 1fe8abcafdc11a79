//! Invariant connections on the homogeneous bundles over the Stenzel orbits,
//! their curvature, and the Spin(7) and Hermitian Yang-Mills residuals.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::coframe::{
    bracket_wedge_with, hodge_star, hodge_star_s4, norm_sq, FrameMetric, Form, So3Bracket, DR,
};
use crate::error::{Error, Result};
use crate::geometry::{check_radius, r_plus, r_minus, t_to_r, Stenzel};
use crate::jet::Jet;

/// Which extension of the homogeneous bundle across the singular orbit `S^4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Bundle {
    /// `b(0) = 1`, restricting to the anti-self-dual-type bundle with `p1 = -1`.
    Pi1,
    /// `b(0) = -1`, `p1 = +1`.
    Pi2,
}

impl Bundle {
    pub fn sign(self) -> f64 {
        match self {
            Bundle::Pi1 => 1.0,
            Bundle::Pi2 => -1.0,
        }
    }
}

/// One point of the `SO(3) = Id` family: radius and the jets of `a, b` in `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdState {
    pub r: f64,
    pub a: Jet,
    pub b: Jet,
}

impl IdState {
    pub fn new(r: f64, a: Jet, b: Jet) -> Result<Self> {
        check_radius(r)?;
        Ok(IdState { r, a, b })
    }

    /// Build from `t`-coordinates, converting with `dt/dr = r/(2t)`.
    pub fn from_t(t: f64, a: f64, b: f64, dadt: f64, dbdt: f64) -> Result<Self> {
        let r = t_to_r(t)?;
        check_radius(r)?;
        let dtdr = r / (2.0 * t);
        Ok(IdState { r, a: Jet::new(a, dadt * dtdr), b: Jet::new(b, dbdt * dtdr) })
    }
}

/// `A_can = θ^8 e1 + θ^9 e2 + θ^10 e3`.
pub fn canonical_connection() -> Form {
    let mut f = Form::so3(1);
    for k in 0..3 {
        f.add_term(&[8 + k], k, Jet::ONE);
    }
    f
}

/// `Λ(x, y, z) = θ^x e3 - θ^y e2 + θ^z e1`, the equivariant Higgs pieces of the Id family.
fn lambda(f: Jet, x: usize, y: usize, z: usize) -> Form {
    let mut out = Form::so3(1);
    out.add_term(&[x], 2, f);
    out.add_term(&[y], 1, -f);
    out.add_term(&[z], 0, f);
    out
}

/// `A = A_can + a(θ^2 e3 - θ^3 e2 + θ^4 e1) + b(θ^5 e3 - θ^6 e2 + θ^7 e1)`.
pub fn id_connection(a: Jet, b: Jet) -> Form {
    canonical_connection()
        .try_add(&lambda(a, 2, 3, 4))
        .and_then(|f| f.try_add(&lambda(b, 5, 6, 7)))
        .expect("so(3) 1-forms")
}

/// `F_A = dA + 1/2 [A∧A]`.
pub fn curvature(conn: &Form) -> Result<Form> {
    curvature_with(conn, So3Bracket::STANDARD)
}

pub fn curvature_with(conn: &Form, br: So3Bracket) -> Result<Form> {
    if conn.grade() != 1 {
        return Err(Error::Mismatch(format!("connection must be a 1-form, got grade {}", conn.grade())));
    }
    let half = bracket_wedge_with(conn, conn, br)?.scale(0.5);
    Ok(conn.d().try_add(&half)?.pruned())
}

/// Curvature of the Id family computed by the coframe engine.
pub fn id_curvature(a: Jet, b: Jet) -> Form {
    id_curvature_with(a, b, So3Bracket::STANDARD)
}

pub fn id_curvature_with(a: Jet, b: Jet, br: So3Bracket) -> Form {
    curvature_with(&id_connection(a, b), br).expect("1-form")
}

/// The Id-family curvature written out term by term; `a.d`, `b.d` are `a'`, `b'`.
pub fn id_curvature_closed_form(a: Jet, b: Jet) -> Form {
    let (av, bv, ad, bd) = (a.v, b.v, a.d, b.d);
    let one_a = 1.0 - av * av;
    let one_b = 1.0 - bv * bv;
    let ab = av * bv;
    let mut f = Form::so3(2);
    let rows: [[(&[usize], f64); 8]; 3] = [
        [
            (&[2, 3], one_a),
            (&[5, 6], one_b),
            (&[2, 6], -ab),
            (&[3, 5], ab),
            (&[1, 4], bv),
            (&[1, 7], -av),
            (&[DR, 4], ad),
            (&[DR, 7], bd),
        ],
        [
            (&[2, 4], one_a),
            (&[5, 7], one_b),
            (&[2, 7], -ab),
            (&[4, 5], ab),
            (&[1, 3], -bv),
            (&[1, 6], av),
            (&[DR, 3], -ad),
            (&[DR, 6], -bd),
        ],
        [
            (&[3, 4], one_a),
            (&[6, 7], one_b),
            (&[3, 7], -ab),
            (&[4, 6], ab),
            (&[1, 2], bv),
            (&[1, 5], -av),
            (&[DR, 2], ad),
            (&[DR, 5], bd),
        ],
    ];
    for (k, row) in rows.iter().enumerate() {
        for (idx, c) in row {
            f.add_term(idx, k, Jet::constant(*c));
        }
    }
    f
}

/// Curvature of the canonical connection, `(θ^23+θ^56)e1 + (θ^24+θ^57)e2 + (θ^34+θ^67)e3`.
pub fn canonical_curvature_closed_form() -> Form {
    id_curvature_closed_form(Jet::ZERO, Jet::ZERO)
}

/// `u(1)` connection `i α θ^1`; the curvature is `i(α' dr∧θ^1 + α dθ^1)`.
pub fn abelian_curvature(alpha: Jet) -> Form {
    Form::monomial(&[1], alpha).with_imaginary(true).d()
}

/// Explicit abelian Spin(7) instanton `α = K / ((r^2+2)^{3/4} (r+1)^{3/2} (r-1)^{3/2})`.
pub fn abelian_alpha(k: f64, r: f64) -> Result<Jet> {
    check_radius(r)?;
    let r2 = r * r;
    let v = k / ((r2 + 2.0).powf(0.75) * (r + 1.0).powf(1.5) * (r - 1.0).powf(1.5));
    let d = -4.5 * k * r * (r2 + 1.0) / ((r2 + 2.0).powf(1.75) * (r + 1.0).powf(2.5) * (r - 1.0).powf(2.5));
    Ok(Jet::new(v, d))
}

/// Connection `θ^1 ⊗ (a^1 e1 + a^2 e2 + a^3 e3)` with trivial isotropy homomorphism.
pub fn trivial_so3_connection(a: [Jet; 3]) -> Form {
    let mut f = Form::so3(1);
    for (k, ak) in a.iter().enumerate() {
        f.add_term(&[1], k, *ak);
    }
    f
}

pub fn trivial_so3_curvature(a: [Jet; 3]) -> Form {
    curvature(&trivial_so3_connection(a)).expect("1-form")
}

/// The explicit `P_1` family: each component is an abelian profile.
pub fn p1_family(k: [f64; 3], r: f64) -> Result<[Jet; 3]> {
    Ok([abelian_alpha(k[0], r)?, abelian_alpha(k[1], r)?, abelian_alpha(k[2], r)?])
}

/// HYM solutions on the bundles `P_{π_1}`, `P_{π_2}`: `a = 0`, `b = ±1/R_+`.
pub fn hym_pi(bundle: Bundle, r: f64) -> Result<IdState> {
    let rp = r_plus(r);
    IdState::new(r, Jet::ZERO, rp.recip().scale(bundle.sign()))
}

/// Residuals of the instanton equations, each normalised to be scale free.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `max|⋆F + Φ∧F| / max|⋆F|`.
    pub spin7: f64,
    /// `max|F∧⋆ω| / (max|F| max|⋆ω|)`.
    pub hym_trace: f64,
    /// `max(|F∧ReΩ|, |F∧ImΩ|) / (max|F| max|Ω|)`.
    pub hym_omega: f64,
}

fn wedge_ratio(f: &Form, psi: &Form) -> Result<f64> {
    let scale = f.max_abs() * psi.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(f.wedge(psi)?.max_abs() / scale)
}

pub fn spin7_residual(f: &Form, geo: &Stenzel) -> Result<f64> {
    check_two_form(f)?;
    let star = hodge_star(f, &geo.metric())?;
    let s = star.max_abs();
    if s == 0.0 {
        return Ok(0.0);
    }
    let phi_f = geo.cayley().wedge(f)?;
    Ok(star.try_add(&phi_f)?.max_abs() / s)
}

fn check_two_form(f: &Form) -> Result<()> {
    if f.grade() != 2 {
        return Err(Error::Mismatch(format!("curvature must be a 2-form, got grade {}", f.grade())));
    }
    if !f.is_horizontal() {
        return Err(Error::Mismatch("curvature has vertical components".into()));
    }
    Ok(())
}

pub fn residuals(f: &Form, geo: &Stenzel) -> Result<Residuals> {
    let spin7 = spin7_residual(f, geo)?;
    let hym_trace = wedge_ratio(f, &geo.star_kahler())?;
    let re = geo.re_omega();
    let im = geo.im_omega();
    let omega_scale = re.max_abs().max(im.max_abs());
    let fs = f.max_abs();
    let hym_omega = if fs == 0.0 {
        0.0
    } else {
        f.wedge(&re)?.max_abs().max(f.wedge(&im)?.max_abs()) / (fs * omega_scale)
    };
    Ok(Residuals { spin7, hym_trace, hym_omega })
}

/// Residuals for an Id-family state.
pub fn id_residuals(s: &IdState) -> Result<Residuals> {
    residuals(&id_curvature(s.a, s.b), &Stenzel::at(s.r)?)
}

/// Radial ODE right-hand sides in `r`, by two algebraically different routes.
///
/// Route 0 uses `P, Q`; route 1 eliminates `P` through the Calabi-Yau condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialRhs {
    pub dadr: [f64; 2],
    pub dbdr: [f64; 2],
}

pub fn radial_rhs(r: f64, a: f64, b: f64) -> Result<RadialRhs> {
    let g = Stenzel::at(r)?;
    let (p, q, rp, rm) = (g.p.v, g.q.v, g.rp.v, g.rm.v);
    let rm2 = rm * rm;
    let rp2 = rp * rp;
    let q2 = q * q;
    let da0 = 2.0 * p * q / (rp * rm2) * a * b - r / (2.0 * rm2) * a;
    let da1 = r * rp / q2 * a * b - r / (2.0 * rm2) * a;
    let db0 = p * q / (rm2 * rp) * (1.0 - b * b) - p * q / rp.powi(3) * (1.0 - a * a) - r / (2.0 * rp2) * b;
    let db1 = r * rp / (2.0 * q2) * (1.0 - b * b) - rm2 * r / (2.0 * rp * q2) * (1.0 - a * a)
        - r / (2.0 * rp2) * b;
    Ok(RadialRhs { dadr: [da0, da1], dbdr: [db0, db1] })
}

/// Residual of the HYM constraints `a' = -(r/2R_-^2) a`, `b' = -(r/2R_+^2) b`,
/// `R_+^2(1-b^2) = R_-^2(1-a^2)`, `ab = 0`.
pub fn hym_constraint_residual(s: &IdState) -> Result<f64> {
    let r = s.r;
    let rp2 = r_plus(r).v.powi(2);
    let rm2 = r_minus(r)?.v.powi(2);
    let (a, b) = (s.a, s.b);
    let c1 = a.d + r / (2.0 * rm2) * a.v;
    let c2 = b.d + r / (2.0 * rp2) * b.v;
    let c3 = rp2 * (1.0 - b.v * b.v) - rm2 * (1.0 - a.v * a.v);
    let c4 = a.v * b.v;
    Ok([c1, c2, c3, c4].iter().fold(0.0f64, |m, c| m.max(c.abs())))
}

pub fn yang_mills_density(f: &Form, metric: &FrameMetric) -> Result<f64> {
    norm_sq(f, metric)
}

/// Closed form of `|F|^2` for the `P_{π_1}` HYM solution.
pub fn hym_pi_norm_sq(r: f64) -> f64 {
    let r2 = r * r;
    2.0 * 3f64.sqrt() * (3.0 * r2 * r2 + 10.0 * r2 + 11.0) / ((r2 + 1.0).powi(3) * (r2 + 2.0).sqrt())
}

/// Energy density `|F|^2 (r/2) R_+^2 R_-^2` per unit `dr` and orbit volume; grows like `r^2`.
pub fn ym_energy_integrand(r: f64) -> f64 {
    hym_pi_norm_sq(r) * 0.5 * r * (r * r + 1.0) / 2.0 * (r * r - 1.0) / 2.0
}

pub const S4_VOLUME: f64 = 8.0 * PI * PI / 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S4Report {
    pub sd_residual: f64,
    pub asd_residual: f64,
    pub restriction_pi1_error: f64,
    pub restriction_pi2_error: f64,
    pub norm_sq_sd: f64,
    pub norm_sq_asd: f64,
    pub energy_sd: f64,
    pub energy_asd: f64,
    pub p1_pi1: f64,
    pub p1_pi2: f64,
}

const S4_INDICES: [usize; 4] = [1, 2, 3, 4];

/// `(θ^23 ± θ^14)e1 + (θ^24 ∓ θ^13)e2 + (θ^34 ± θ^12)e3`, with the upper sign self-dual.
pub fn s4_instanton(sign: f64) -> Form {
    let mut f = Form::so3(2);
    let rows: [[(&[usize], f64); 2]; 3] =
        [[(&[2, 3], 1.0), (&[1, 4], sign)], [(&[2, 4], 1.0), (&[1, 3], -sign)], [(&[3, 4], 1.0), (&[1, 2], sign)]];
    for (k, row) in rows.iter().enumerate() {
        for (idx, c) in row {
            f.add_term(idx, k, Jet::constant(*c));
        }
    }
    f
}

fn first_pontryagin(f: &Form) -> Result<f64> {
    let star = hodge_star_s4(f)?;
    let plus = f.try_add(&star)?.scale(0.5);
    let minus = f.try_sub(&star)?.scale(0.5);
    let unit = FrameMetric::unit();
    Ok((norm_sq(&minus, &unit)? - norm_sq(&plus, &unit)?) * S4_VOLUME / (8.0 * PI * PI))
}

/// Restrict the HYM curvatures to the singular orbit and check (anti-)self-duality,
/// energy and the first Pontryagin number.
pub fn s4_instanton_checks() -> Result<S4Report> {
    let sd = s4_instanton(1.0);
    let asd = s4_instanton(-1.0);
    let sd_residual = hodge_star_s4(&sd)?.max_abs_diff(&sd)?;
    let asd_residual = hodge_star_s4(&asd)?.try_add(&asd)?.max_abs();
    // At r = 1: R_+ = 1 and (1/R_+)' = -1/2.
    let pi1 = id_curvature(Jet::ZERO, Jet::new(1.0, -0.5)).restrict_to(&S4_INDICES);
    let pi2 = id_curvature(Jet::ZERO, Jet::new(-1.0, 0.5)).restrict_to(&S4_INDICES);
    let unit = FrameMetric::unit();
    let norm_sq_sd = norm_sq(&sd, &unit)?;
    let norm_sq_asd = norm_sq(&asd, &unit)?;
    Ok(S4Report {
        sd_residual,
        asd_residual,
        restriction_pi1_error: pi1.max_abs_diff(&sd)?,
        restriction_pi2_error: pi2.max_abs_diff(&asd)?,
        norm_sq_sd,
        norm_sq_asd,
        energy_sd: norm_sq_sd * S4_VOLUME,
        energy_asd: norm_sq_asd * S4_VOLUME,
        p1_pi1: first_pontryagin(&pi1)?,
        p1_pi2: first_pontryagin(&pi2)?,
    })
}
