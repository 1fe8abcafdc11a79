//! Left-invariant coframe algebra on `R_{>1} x SO(5)`.
//!
//! Basis 1-forms are indexed `0 = dr` and `1..=10 = θ^1..θ^10`, dual to
//! `X1=C12, X2=C13, X3=C14, X4=C15, X5=C23, X6=C24, X7=C25, X8=C34,
//! X9=C35, X10=C45` with `C_ij = e_ij - e_ji`. Indices 8..=10 are the
//! vertical directions of `SO(5) -> V_1 = SO(5)/SO(3)`; everything else is
//! horizontal.
//!
//! A [`Form`] is a homogeneous combination of sorted monomials whose
//! coefficients are radial [`Jet`]s, optionally valued in `so(3)` with the
//! fibre basis `e1, e2, e3`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::jet::Jet;

pub const DR: usize = 0;
pub const N_BASIS: usize = 11;
/// Horizontal directions `dr, θ^1..θ^7`.
pub const HORIZONTAL: [usize; 8] = [0, 1, 2, 3, 4, 5, 6, 7];
const VERTICAL_MASK: u16 = (1 << 8) | (1 << 9) | (1 << 10);

/// Bit set of basis indices; bit `i` set means the monomial contains index `i`.
pub type Monomial = u16;

/// Build a monomial from unsorted indices, returning the sign of the sorting
/// permutation (0 if an index repeats).
pub fn monomial(indices: &[usize]) -> (Monomial, i32) {
    let mut m: Monomial = 0;
    let mut sign = 1;
    for &i in indices {
        assert!(i < N_BASIS, "basis index {i} out of range");
        let bit = 1u16 << i;
        if m & bit != 0 {
            return (0, 0);
        }
        // number of already-present indices greater than i
        if (m >> (i + 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        m |= bit;
    }
    (m, sign)
}

/// Sign of `θ^A ∧ θ^B` relative to the sorted monomial `A ∪ B`; 0 if they overlap.
pub fn wedge_sign(a: Monomial, b: Monomial) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn indices(m: Monomial) -> Vec<usize> {
    (0..N_BASIS).filter(|&i| m & (1 << i) != 0).collect()
}

/// The so(5) matrix `C_ij` (1-based `i < j`) for basis vector `X_k`.
fn basis_pair(k: usize) -> (usize, usize) {
    const PAIRS: [(usize, usize); 10] =
        [(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5)];
    PAIRS[k - 1]
}

fn basis_matrix(k: usize) -> [[i32; 5]; 5] {
    let (i, j) = basis_pair(k);
    let mut m = [[0; 5]; 5];
    m[i - 1][j - 1] = 1;
    m[j - 1][i - 1] = -1;
    m
}

/// Structure constants `[X_i, X_j] = c_ij^k X_k` of `so(5)`, 1-based.
#[derive(Clone, Debug)]
pub struct StructureConstants {
    c: [[[i8; 11]; 11]; 11],
}

impl StructureConstants {
    fn compute() -> Self {
        let mut c = [[[0i8; 11]; 11]; 11];
        for i in 1..=10 {
            for j in 1..=10 {
                let a = basis_matrix(i);
                let b = basis_matrix(j);
                let mut comm = [[0i32; 5]; 5];
                for p in 0..5 {
                    for q in 0..5 {
                        let mut s = 0;
                        for l in 0..5 {
                            s += a[p][l] * b[l][q] - b[p][l] * a[l][q];
                        }
                        comm[p][q] = s;
                    }
                }
                // antisymmetric result decomposes as sum_{p<q} comm[p][q] C_pq
                for k in 1..=10 {
                    let (p, q) = basis_pair(k);
                    c[i][j][k] = comm[p - 1][q - 1] as i8;
                }
            }
        }
        StructureConstants { c }
    }

    /// `c_ij^k` for `i, j, k` in `1..=10`.
    pub fn get(&self, i: usize, j: usize, k: usize) -> i8 {
        self.c[i][j][k]
    }
}

pub fn structure_constants() -> &'static StructureConstants {
    static SC: OnceLock<StructureConstants> = OnceLock::new();
    SC.get_or_init(StructureConstants::compute)
}

/// `dθ^k = -1/2 c_ij^k θ^i∧θ^j`, stored as sorted `(monomial, coefficient)` pairs.
fn d_theta_table() -> &'static [Vec<(Monomial, f64)>; N_BASIS] {
    static T: OnceLock<[Vec<(Monomial, f64)>; N_BASIS]> = OnceLock::new();
    T.get_or_init(|| {
        let sc = structure_constants();
        let mut t: [Vec<(Monomial, f64)>; N_BASIS] = Default::default();
        for (k, slot) in t.iter_mut().enumerate().skip(1) {
            for i in 1..=10 {
                for j in (i + 1)..=10 {
                    let c = sc.get(i, j, k);
                    if c != 0 {
                        let (m, _) = monomial(&[i, j]);
                        slot.push((m, -(c as f64)));
                    }
                }
            }
        }
        t
    })
}

/// Signature of the so(3) bracket on the fibre basis: `[e_i, e_j] = sign · ε_ijk e_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct So3Bracket {
    pub sign: f64,
}

impl So3Bracket {
    /// `[e1,e2] = -e3`, `[e2,e3] = -e1`, `[e3,e1] = -e2`.
    pub const STANDARD: So3Bracket = So3Bracket { sign: -1.0 };

    pub fn flipped(self) -> Self {
        So3Bracket { sign: -self.sign }
    }

    /// Components of `[e_a, e_b]` in the fibre basis (0-based).
    pub fn bracket(self, a: usize, b: usize) -> [f64; 3] {
        let mut out = [0.0; 3];
        if a != b {
            let c = 3 - a - b;
            let eps = if (a + 1) % 3 == b { 1.0 } else { -1.0 };
            out[c] = self.sign * eps;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rank {
    Scalar,
    So3,
}

impl Rank {
    fn width(self) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::So3 => 3,
        }
    }
}

/// A homogeneous left-invariant form with radial jet coefficients.
///
/// `imaginary` marks a formal factor of `i`, used for `u(1)`-valued
/// curvature; it multiplies through wedge products as `i·i = -1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form {
    grade: usize,
    rank: Rank,
    imaginary: bool,
    terms: BTreeMap<Monomial, [Jet; 3]>,
}

impl Form {
    pub fn zero(grade: usize, rank: Rank) -> Self {
        Form { grade, rank, imaginary: false, terms: BTreeMap::new() }
    }

    pub fn scalar(grade: usize) -> Self {
        Self::zero(grade, Rank::Scalar)
    }

    pub fn so3(grade: usize) -> Self {
        Self::zero(grade, Rank::So3)
    }

    /// The constant function 1 as a 0-form.
    pub fn one() -> Self {
        let mut f = Self::scalar(0);
        f.terms.insert(0, [Jet::ONE, Jet::ZERO, Jet::ZERO]);
        f
    }

    /// `coeff · θ^I` for unsorted indices `I`.
    pub fn monomial(idx: &[usize], coeff: impl Into<Jet>) -> Self {
        let mut f = Self::scalar(idx.len());
        f.add_term(idx, 0, coeff.into());
        f
    }

    /// `coeff · θ^I ⊗ e_{comp+1}`.
    pub fn so3_monomial(idx: &[usize], comp: usize, coeff: impl Into<Jet>) -> Self {
        let mut f = Self::so3(idx.len());
        f.add_term(idx, comp, coeff.into());
        f
    }

    /// Tensor a scalar form with `e_{comp+1}`.
    pub fn tensor_e(scalar: &Form, comp: usize) -> Self {
        assert_eq!(scalar.rank, Rank::Scalar);
        let mut f = Self::so3(scalar.grade);
        f.imaginary = scalar.imaginary;
        for (&m, c) in &scalar.terms {
            let mut arr = [Jet::ZERO; 3];
            arr[comp] = c[0];
            f.terms.insert(m, arr);
        }
        f
    }

    pub fn with_imaginary(mut self, imaginary: bool) -> Self {
        self.imaginary = imaginary;
        self
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn rank(&self) -> Rank {
        self.rank
    }

    pub fn is_imaginary(&self) -> bool {
        self.imaginary
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &[Jet])> + '_ {
        let w = self.rank.width();
        self.terms.iter().map(move |(&m, c)| (m, &c[..w]))
    }

    /// Accumulate `coeff · θ^I` into fibre component `comp`.
    pub fn add_term(&mut self, idx: &[usize], comp: usize, coeff: Jet) {
        assert_eq!(idx.len(), self.grade, "monomial grade does not match form grade");
        assert!(comp < self.rank.width());
        let (m, s) = monomial(idx);
        if s == 0 {
            return;
        }
        self.accumulate(m, comp, coeff * s as f64);
    }

    fn accumulate(&mut self, m: Monomial, comp: usize, c: Jet) {
        let e = self.terms.entry(m).or_insert([Jet::ZERO; 3]);
        e[comp] += c;
    }

    /// Coefficient value of `θ^I` in component `comp`, with the sign of the
    /// given index order.
    pub fn coeff(&self, idx: &[usize], comp: usize) -> f64 {
        self.coeff_jet(idx, comp).v
    }

    pub fn coeff_jet(&self, idx: &[usize], comp: usize) -> Jet {
        let (m, s) = monomial(idx);
        if s == 0 {
            return Jet::ZERO;
        }
        self.terms.get(&m).map(|c| c[comp] * s as f64).unwrap_or(Jet::ZERO)
    }

    /// Drop terms whose coefficient values and derivatives are all exactly zero.
    pub fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| c.iter().any(|j| !j.is_zero()));
        self
    }

    fn check_compatible(&self, o: &Form) -> Result<()> {
        if self.grade != o.grade || self.rank != o.rank || self.imaginary != o.imaginary {
            return Err(Error::Mismatch(format!(
                "cannot add grade {} {:?}{} to grade {} {:?}{}",
                self.grade,
                self.rank,
                if self.imaginary { " (i)" } else { "" },
                o.grade,
                o.rank,
                if o.imaginary { " (i)" } else { "" },
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Form) -> Result<Form> {
        self.check_compatible(o)?;
        let mut out = self.clone();
        for (&m, c) in &o.terms {
            for k in 0..3 {
                out.accumulate(m, k, c[k]);
            }
        }
        Ok(out)
    }

    pub fn try_sub(&self, o: &Form) -> Result<Form> {
        self.try_add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Form {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            for j in c.iter_mut() {
                *j *= s;
            }
        }
        out
    }

    /// Multiply by a radial function.
    pub fn scale_jet(&self, f: Jet) -> Form {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            for j in c.iter_mut() {
                *j = *j * f;
            }
        }
        out
    }

    /// Fibre component `comp` of an so(3)-valued form as a scalar form.
    pub fn component(&self, comp: usize) -> Form {
        let mut out = Form::scalar(self.grade);
        out.imaginary = self.imaginary;
        for (&m, c) in &self.terms {
            out.terms.insert(m, [c[comp], Jet::ZERO, Jet::ZERO]);
        }
        out
    }

    pub fn is_horizontal(&self) -> bool {
        self.terms.keys().all(|m| m & VERTICAL_MASK == 0)
    }

    fn first_vertical(&self) -> Option<usize> {
        self.terms.keys().find(|m| *m & VERTICAL_MASK != 0).map(|m| indices(m & VERTICAL_MASK)[0])
    }

    /// Keep only monomials built from `allowed` indices (pullback to a
    /// submanifold on which the other 1-forms vanish).
    pub fn restrict_to(&self, allowed: &[usize]) -> Form {
        let mask: Monomial = allowed.iter().fold(0, |m, &i| m | (1 << i));
        let mut out = self.clone();
        out.terms.retain(|m, _| m & !mask == 0);
        out
    }

    /// Largest absolute coefficient value.
    pub fn max_abs(&self) -> f64 {
        let w = self.rank.width();
        self.terms.values().flat_map(|c| c[..w].iter().map(|j| j.v.abs())).fold(0.0, f64::max)
    }

    /// Largest absolute difference of coefficient values.
    pub fn max_abs_diff(&self, o: &Form) -> Result<f64> {
        Ok(self.try_sub(o)?.max_abs())
    }

    /// Exterior product. `So3 ∧ So3` is rejected; use [`bracket_wedge`].
    pub fn wedge(&self, o: &Form) -> Result<Form> {
        let rank = match (self.rank, o.rank) {
            (Rank::Scalar, Rank::Scalar) => Rank::Scalar,
            (Rank::Scalar, Rank::So3) | (Rank::So3, Rank::Scalar) => Rank::So3,
            (Rank::So3, Rank::So3) => {
                return Err(Error::Mismatch("wedge of two so(3)-valued forms needs a bracket".into()))
            }
        };
        let mut out = Form::zero(self.grade + o.grade, rank);
        out.imaginary = self.imaginary ^ o.imaginary;
        let isq = if self.imaginary && o.imaginary { -1.0 } else { 1.0 };
        for (&ma, ca) in &self.terms {
            for (&mb, cb) in &o.terms {
                let s = wedge_sign(ma, mb);
                if s == 0 {
                    continue;
                }
                let f = s as f64 * isq;
                let m = ma | mb;
                match (self.rank, o.rank) {
                    (Rank::Scalar, Rank::Scalar) => out.accumulate(m, 0, ca[0] * cb[0] * f),
                    (Rank::Scalar, Rank::So3) => {
                        for k in 0..3 {
                            out.accumulate(m, k, ca[0] * cb[k] * f)
                        }
                    }
                    (Rank::So3, Rank::Scalar) => {
                        for k in 0..3 {
                            out.accumulate(m, k, ca[k] * cb[0] * f)
                        }
                    }
                    (Rank::So3, Rank::So3) => unreachable!(),
                }
            }
        }
        Ok(out)
    }

    /// Exterior derivative, using `d(dr) = 0`, the Maurer-Cartan relations
    /// and `d(f θ^I) = f' dr∧θ^I + f dθ^I`.
    ///
    /// Coefficients of the result carry no reliable radial derivative in the
    /// `dr` part (it would need `f''`); those jets get derivative 0.
    pub fn d(&self) -> Form {
        let table = d_theta_table();
        let mut out = Form::zero(self.grade + 1, self.rank);
        out.imaginary = self.imaginary;
        let w = self.rank.width();
        for (&m, c) in &self.terms {
            if m & 1 == 0 {
                // f' dr ∧ θ^I; dr is index 0 so no reordering sign
                for k in 0..w {
                    if c[k].d != 0.0 {
                        out.accumulate(m | 1, k, Jet::constant(c[k].d));
                    }
                }
            }
            let idx = indices(m);
            for (p, &ip) in idx.iter().enumerate() {
                if ip == DR {
                    continue;
                }
                let before: Monomial = idx[..p].iter().fold(0, |a, &i| a | (1 << i));
                let after: Monomial = idx[p + 1..].iter().fold(0, |a, &i| a | (1 << i));
                let lead = if p % 2 == 0 { 1 } else { -1 };
                for &(dm, dc) in &table[ip] {
                    let s1 = wedge_sign(before, dm);
                    if s1 == 0 {
                        continue;
                    }
                    let s2 = wedge_sign(before | dm, after);
                    if s2 == 0 {
                        continue;
                    }
                    let f = (lead * s1 * s2) as f64 * dc;
                    let mm = before | dm | after;
                    for k in 0..w {
                        out.accumulate(mm, k, c[k] * f);
                    }
                }
            }
        }
        out.pruned()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let w = self.rank.width();
        for (&m, c) in &self.terms {
            for (k, j) in c[..w].iter().enumerate() {
                if j.v == 0.0 {
                    continue;
                }
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                let names: Vec<String> =
                    indices(m).iter().map(|&i| if i == 0 { "dr".into() } else { i.to_string() }).collect();
                write!(f, "({:+.6e})[{}]", j.v, names.join(","))?;
                if self.rank == Rank::So3 {
                    write!(f, "e{}", k + 1)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        if self.imaginary {
            write!(f, " · i")?;
        }
        Ok(())
    }
}

/// `dθ^k` as a scalar 2-form.
pub fn d_theta(k: usize) -> Form {
    Form::monomial(&[k], Jet::ONE).d()
}

/// `[α∧β]` for so(3)-valued forms with the standard bracket.
pub fn bracket_wedge(a: &Form, b: &Form) -> Result<Form> {
    bracket_wedge_with(a, b, So3Bracket::STANDARD)
}

pub fn bracket_wedge_with(a: &Form, b: &Form, br: So3Bracket) -> Result<Form> {
    if a.rank != Rank::So3 || b.rank != Rank::So3 {
        return Err(Error::Mismatch("bracket_wedge needs two so(3)-valued forms".into()));
    }
    let mut out = Form::so3(a.grade + b.grade);
    out.imaginary = a.imaginary ^ b.imaginary;
    let isq = if a.imaginary && b.imaginary { -1.0 } else { 1.0 };
    for (&ma, ca) in &a.terms {
        for (&mb, cb) in &b.terms {
            let s = wedge_sign(ma, mb);
            if s == 0 {
                continue;
            }
            let m = ma | mb;
            for p in 0..3 {
                for q in 0..3 {
                    if p == q {
                        continue;
                    }
                    let br_pq = br.bracket(p, q);
                    let prod = ca[p] * cb[q] * (s as f64 * isq);
                    for (k, &bk) in br_pq.iter().enumerate() {
                        if bk != 0.0 {
                            out.accumulate(m, k, prod * bk);
                        }
                    }
                }
            }
        }
    }
    Ok(out.pruned())
}

/// Diagonal horizontal metric in the frame `∂_r, X1..X7`: `g[i] = |e_i|^2` as jets.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameMetric {
    pub g: [Jet; 8],
}

impl FrameMetric {
    pub fn unit() -> Self {
        FrameMetric { g: [Jet::ONE; 8] }
    }

    pub fn sqrt_det(&self) -> Jet {
        self.g.iter().fold(Jet::ONE, |acc, &gi| acc * gi).sqrt()
    }

    fn monomial_weight(&self, m: Monomial) -> Jet {
        indices(m).iter().fold(Jet::ONE, |acc, &i| acc * self.g[i])
    }
}

/// Orientation of the 8-dimensional horizontal space.
///
/// The complex orientation is the one of `ω^4/4!`, which equals
/// `-(dr∧θ^1∧…∧θ^7)` times a positive function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Complex,
    Coframe,
}

impl Orientation {
    fn sign(self) -> f64 {
        match self {
            Orientation::Complex => -1.0,
            Orientation::Coframe => 1.0,
        }
    }
}

const FULL_HORIZONTAL: Monomial = 0xff;

/// Hodge star on horizontal forms in the complex orientation.
pub fn hodge_star(form: &Form, metric: &FrameMetric) -> Result<Form> {
    hodge_star_oriented(form, metric, Orientation::Complex)
}

pub fn hodge_star_oriented(form: &Form, metric: &FrameMetric, orient: Orientation) -> Result<Form> {
    if let Some(v) = form.first_vertical() {
        return Err(Error::VerticalIndex(v));
    }
    let sd = metric.sqrt_det();
    let mut out = Form::zero(8 - form.grade, form.rank);
    out.imaginary = form.imaginary;
    let w = form.rank.width();
    for (&m, c) in &form.terms {
        let rest = FULL_HORIZONTAL & !m;
        let s = wedge_sign(m, rest) as f64 * orient.sign();
        let factor = (sd / metric.monomial_weight(m)).scale(s);
        for k in 0..w {
            out.accumulate(rest, k, c[k] * factor);
        }
    }
    Ok(out)
}

/// Oriented Riemannian volume form `⋆1`.
pub fn volume_form(metric: &FrameMetric) -> Form {
    hodge_star(&Form::one(), metric).expect("1 is horizontal")
}

/// Hodge star of the round 4-sphere in the coframe `θ^1..θ^4`, oriented by `θ^1234`.
pub fn hodge_star_s4(form: &Form) -> Result<Form> {
    const S4: Monomial = 0b11110;
    if let Some(&m) = form.terms.keys().find(|m| *m & !S4 != 0) {
        let bad = indices(m & !S4)[0];
        return Err(if bad >= 8 {
            Error::VerticalIndex(bad)
        } else {
            Error::Mismatch(format!("index {bad} is not tangent to S^4"))
        });
    }
    let mut out = Form::zero(4 - form.grade, form.rank);
    out.imaginary = form.imaginary;
    let w = form.rank.width();
    for (&m, c) in &form.terms {
        let rest = S4 & !m;
        let s = wedge_sign(m, rest) as f64;
        for k in 0..w {
            out.accumulate(rest, k, c[k] * s);
        }
    }
    Ok(out)
}

/// Pointwise norm squared using the induced metric on forms and, for
/// so(3)-valued forms, `|e_i|^2 = 1/2`.
pub fn norm_sq(form: &Form, metric: &FrameMetric) -> Result<f64> {
    if let Some(v) = form.first_vertical() {
        return Err(Error::VerticalIndex(v));
    }
    let fibre = match form.rank {
        Rank::Scalar => 1.0,
        Rank::So3 => 0.5,
    };
    let w = form.rank.width();
    let mut total = 0.0;
    for (&m, c) in &form.terms {
        let wt = metric.monomial_weight(m).v;
        for j in &c[..w] {
            total += j.v * j.v / wt;
        }
    }
    Ok(fibre * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Brackets of basis matrices `C_ij` from the closed rule
    /// `[C_ij, C_kl] = δ_jk C_il - δ_ik C_jl - δ_jl C_ik + δ_il C_jk`.
    fn rule_bracket(a: (usize, usize), b: (usize, usize)) -> [[i32; 6]; 6] {
        let (i, j) = a;
        let (k, l) = b;
        let mut out = [[0i32; 6]; 6];
        let mut add = |p: usize, q: usize, s: i32| {
            out[p][q] += s;
            out[q][p] -= s;
        };
        if j == k {
            add(i, l, 1);
        }
        if i == k {
            add(j, l, -1);
        }
        if j == l {
            add(i, k, -1);
        }
        if i == l {
            add(j, k, 1);
        }
        out
    }

    #[test]
    fn structure_constants_match_commutator_rule() {
        let sc = structure_constants();
        for x in 1..=10 {
            for y in 1..=10 {
                let m = rule_bracket(basis_pair(x), basis_pair(y));
                for z in 1..=10 {
                    let (p, q) = basis_pair(z);
                    assert_eq!(sc.get(x, y, z) as i32, m[p][q], "c[{x}][{y}][{z}]");
                }
            }
        }
        assert_eq!(sc.get(2, 5, 1), -1);
    }

    #[test]
    fn structure_constants_antisymmetric_and_jacobi() {
        let sc = structure_constants();
        for i in 1..=10 {
            for j in 1..=10 {
                for k in 1..=10 {
                    assert_eq!(sc.get(i, j, k), -sc.get(j, i, k));
                }
            }
        }
        for i in 1..=10 {
            for j in 1..=10 {
                for k in 1..=10 {
                    for m in 1..=10 {
                        let mut s = 0i32;
                        for l in 1..=10 {
                            s += sc.get(i, j, l) as i32 * sc.get(l, k, m) as i32
                                + sc.get(j, k, l) as i32 * sc.get(l, i, m) as i32
                                + sc.get(k, i, l) as i32 * sc.get(l, j, m) as i32;
                        }
                        assert_eq!(s, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn d_theta_one() {
        let expected = Form::monomial(&[2, 5], 1.0)
            .try_add(&Form::monomial(&[3, 6], 1.0))
            .unwrap()
            .try_add(&Form::monomial(&[4, 7], 1.0))
            .unwrap();
        assert_eq!(d_theta(1).max_abs_diff(&expected).unwrap(), 0.0);
    }

    #[test]
    fn d_theta_eight() {
        let expected = Form::monomial(&[2, 3], 1.0)
            .try_add(&Form::monomial(&[5, 6], 1.0))
            .unwrap()
            .try_add(&Form::monomial(&[9, 10], 1.0))
            .unwrap();
        assert_eq!(d_theta(8).max_abs_diff(&expected).unwrap(), 0.0);
    }

    #[test]
    fn d_dr_and_jets() {
        assert_eq!(Form::monomial(&[DR], 1.0).d().num_terms(), 0);
        let f = Form::monomial(&[1], Jet::new(2.0, 3.0)).d();
        assert_eq!(f.coeff(&[DR, 1], 0), 3.0);
        assert_eq!(f.coeff(&[2, 5], 0), 2.0);
    }

    #[test]
    fn monomial_signs() {
        assert_eq!(monomial(&[2, 1]).1, -1);
        assert_eq!(monomial(&[3, 1, 2]).1, 1);
        assert_eq!(monomial(&[1, 1]).1, 0);
        assert_eq!(wedge_sign(monomial(&[2]).0, monomial(&[1]).0), -1);
    }

    #[test]
    fn bracket_table() {
        let b = So3Bracket::STANDARD;
        assert_eq!(b.bracket(0, 1), [0.0, 0.0, -1.0]);
        assert_eq!(b.bracket(1, 2), [-1.0, 0.0, 0.0]);
        assert_eq!(b.bracket(2, 0), [0.0, -1.0, 0.0]);
        assert_eq!(b.bracket(1, 0), [0.0, 0.0, 1.0]);
    }

    #[test]
    fn half_bracket_of_lambda() {
        // Λ = a(θ^2 e3 - θ^3 e2 + θ^4 e1): 1/2[Λ∧Λ] has -a^2 θ^23 along e1
        let a = 0.7;
        let lam = Form::so3_monomial(&[2], 2, a)
            .try_add(&Form::so3_monomial(&[3], 1, -a))
            .unwrap()
            .try_add(&Form::so3_monomial(&[4], 0, a))
            .unwrap();
        let h = bracket_wedge(&lam, &lam).unwrap().scale(0.5);
        assert_relative_eq!(h.coeff(&[2, 3], 0), -a * a, epsilon = 1e-15);
    }

    #[test]
    fn rank_mismatch_and_vertical_errors() {
        let e = Form::so3_monomial(&[1], 0, 1.0);
        assert!(e.wedge(&e).is_err());
        assert!(e.try_add(&Form::monomial(&[1], 1.0)).is_err());
        assert!(Form::monomial(&[1], 1.0).try_add(&Form::monomial(&[1, 2], 1.0)).is_err());
        let v = Form::monomial(&[8], 1.0);
        assert_eq!(hodge_star(&v, &FrameMetric::unit()), Err(Error::VerticalIndex(8)));
        assert!(norm_sq(&v, &FrameMetric::unit()).is_err());
    }

    #[test]
    fn s4_star() {
        let f = hodge_star_s4(&Form::monomial(&[2, 3], 1.0)).unwrap();
        assert_eq!(f.coeff(&[1, 4], 0), 1.0);
        let g = hodge_star_s4(&Form::monomial(&[2, 4], 1.0)).unwrap();
        assert_eq!(g.coeff(&[1, 3], 0), -1.0);
    }

    #[test]
    fn imaginary_wedge() {
        let i = Form::monomial(&[1], 1.0).with_imaginary(true);
        let j = Form::monomial(&[2], 1.0).with_imaginary(true);
        let p = i.wedge(&j).unwrap();
        assert!(!p.is_imaginary());
        assert_eq!(p.coeff(&[1, 2], 0), -1.0);
    }

    fn arb_jet() -> impl Strategy<Value = Jet> {
        (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(v, d)| Jet::new(v, d))
    }

    fn arb_form(grade: usize, rank: Rank, max_index: usize) -> impl Strategy<Value = Form> {
        prop::collection::vec((prop::collection::btree_set(0..max_index, grade), 0usize..3, arb_jet()), 0..6)
            .prop_map(move |ts| {
                let mut f = Form::zero(grade, rank);
                for (idx, comp, c) in ts {
                    let idx: Vec<usize> = idx.into_iter().collect();
                    let comp = if rank == Rank::Scalar { 0 } else { comp };
                    f.add_term(&idx, comp, c);
                }
                f
            })
    }

    fn arb_metric() -> impl Strategy<Value = FrameMetric> {
        prop::array::uniform8(0.2f64..5.0).prop_map(|g| FrameMetric { g: g.map(Jet::constant) })
    }

    proptest! {
        #[test]
        fn d_squared_vanishes(f in (1usize..4).prop_flat_map(|g| arb_form(g, Rank::Scalar, N_BASIS))) {
            prop_assert!(f.d().d().max_abs() < 1e-12);
        }

        #[test]
        fn leibniz_rule(a in arb_form(1, Rank::Scalar, N_BASIS), b in arb_form(2, Rank::Scalar, N_BASIS)) {
            let lhs = a.wedge(&b).unwrap().d();
            let rhs = a.d().wedge(&b).unwrap().try_sub(&a.wedge(&b.d()).unwrap()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        }

        #[test]
        fn graded_commutativity(a in arb_form(1, Rank::Scalar, N_BASIS), b in arb_form(2, Rank::Scalar, N_BASIS)) {
            let ab = a.wedge(&b).unwrap();
            let ba = b.wedge(&a).unwrap();
            prop_assert!(ab.max_abs_diff(&ba).unwrap() < 1e-12);
            let aa = a.wedge(&a).unwrap();
            prop_assert!(aa.max_abs() < 1e-12);
        }

        #[test]
        fn star_star_sign(k in 0usize..=8, m in arb_metric(), seed in any::<u64>()) {
            let mut f = Form::scalar(k);
            let mut idx: Vec<usize> = HORIZONTAL.to_vec();
            let rot = (seed % 8) as usize;
            idx.rotate_left(rot);
            f.add_term(&idx[..k], 0, Jet::constant(1.0 + (seed % 7) as f64));
            let ss = hodge_star(&hodge_star(&f, &m).unwrap(), &m).unwrap();
            let sign = if (k * (8 - k)) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!(ss.max_abs_diff(&f.scale(sign)).unwrap() < 1e-9 * f.max_abs());
        }

        #[test]
        fn star_norm_identity(f in arb_form(3, Rank::Scalar, 8), m in arb_metric()) {
            let lhs = f.wedge(&hodge_star(&f, &m).unwrap()).unwrap();
            let rhs = volume_form(&m).scale(norm_sq(&f, &m).unwrap());
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-9 * (1.0 + rhs.max_abs()));
        }

        #[test]
        fn bracket_graded_antisymmetry(a in arb_form(1, Rank::So3, N_BASIS), b in arb_form(1, Rank::So3, N_BASIS)) {
            // for 1-forms [a∧b] = [b∧a]
            let ab = bracket_wedge(&a, &b).unwrap();
            let ba = bracket_wedge(&b, &a).unwrap();
            prop_assert!(ab.max_abs_diff(&ba).unwrap() < 1e-12);
        }
    }
}
