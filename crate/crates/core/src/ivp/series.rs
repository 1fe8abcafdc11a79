//! Truncated power series and the Maclaurin bootstrap at the singular orbit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients `c[n]` of `t^n`, truncated at a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Series(pub Vec<f64>);

impl Series {
    fn zeros(n: usize) -> Self {
        Series(vec![0.0; n + 1])
    }

    fn order(&self) -> usize {
        self.0.len() - 1
    }

    fn mul(&self, o: &Series) -> Series {
        let n = self.order();
        let mut out = Series::zeros(n);
        for (i, &x) in self.0.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (j, &y) in o.0.iter().enumerate().take(n + 1 - i) {
                out.0[i + j] += x * y;
            }
        }
        out
    }

    fn add(&self, o: &Series) -> Series {
        Series(self.0.iter().zip(&o.0).map(|(x, y)| x + y).collect())
    }

    fn scale(&self, s: f64) -> Series {
        Series(self.0.iter().map(|x| x * s).collect())
    }

    /// Multiply by `t`, dropping the top coefficient.
    fn shift(&self) -> Series {
        let mut c = vec![0.0];
        c.extend_from_slice(&self.0[..self.order()]);
        Series(c)
    }

    /// `f^p` for `f(0) > 0`, from `f g' = p f' g`.
    fn powf(&self, p: f64) -> Series {
        let f = &self.0;
        let n = self.order();
        let mut g = vec![0.0; n + 1];
        g[0] = f[0].powf(p);
        for m in 1..=n {
            let mut s = 0.0;
            for k in 1..=m {
                s += (p * k as f64 - (m - k) as f64) * f[k] * g[m - k];
            }
            g[m] = s / (m as f64 * f[0]);
        }
        Series(g)
    }

    fn poly(coeffs: &[f64], n: usize) -> Series {
        let mut s = Series::zeros(n);
        for (i, &c) in coeffs.iter().enumerate().take(n + 1) {
            s.0[i] = c;
        }
        s
    }

    pub(crate) fn eval(&self, t: f64) -> (f64, f64) {
        let mut v = 0.0;
        let mut d = 0.0;
        for (k, &c) in self.0.iter().enumerate().rev() {
            v = v * t + c;
            if k > 0 {
                d = d * t + k as f64 * c;
            }
        }
        (v, d)
    }
}

/// Maclaurin data of the smooth solution with `a ~ a0 t`, `b(0) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesCoeffs {
    pub a0: f64,
    pub order: usize,
    /// Coefficients of `t^0..t^order` for `a`.
    pub a: Vec<f64>,
    /// Coefficients of `t^0..t^order` for `b`.
    pub b: Vec<f64>,
}

pub const MIN_ORDER: usize = 4;

impl SeriesCoeffs {
    /// Odd coefficients `a_1, a_3, ...` of `a`.
    pub fn a_odd(&self) -> Vec<f64> {
        self.a.iter().skip(1).step_by(2).copied().collect()
    }

    /// Even coefficients `b_0, b_2, ...` of `b`.
    pub fn b_even(&self) -> Vec<f64> {
        self.b.iter().step_by(2).copied().collect()
    }

    /// `(a, b, da/dt, db/dt)` from the truncated series.
    pub fn eval(&self, t: f64) -> [f64; 4] {
        let (a, da) = Series(self.a.clone()).eval(t);
        let (b, db) = Series(self.b.clone()).eval(t);
        [a, b, da, db]
    }
}

/// `𝒫(t)` and `𝒬(t)` as truncated series.
fn coefficient_series(n: usize) -> (Series, Series) {
    // 𝒫 = 2 (1+t^2)^{1/2} (1+2t^2/3)^{-1/2}
    let p = Series::poly(&[1.0, 0.0, 1.0], n)
        .powf(0.5)
        .mul(&Series::poly(&[1.0, 0.0, 2.0 / 3.0], n).powf(-0.5))
        .scale(2.0);
    // 𝒬 = t (1+t^2)^{-1}
    let q = Series::poly(&[1.0, 0.0, 1.0], n).powf(-1.0).shift();
    (p, q)
}

/// Solve the Spin(7) system order by order, with `a'(0) = a0` and `b(0) = 1`.
///
/// The system in the form used here is
/// `t a' = a(𝒫b - 1)` and `t b' = (𝒫/2)(1-b^2) - t(𝒫𝒬/2)(1-a^2) - t𝒬b`;
/// at order `n` the unknowns enter as `(n-1) a_n` and `(n+2) b_n`.
pub fn taylor_coeffs(a0: f64, order: usize) -> Result<SeriesCoeffs> {
    if order < MIN_ORDER {
        return Err(Error::InsufficientOrder { got: order, need: MIN_ORDER });
    }
    if !a0.is_finite() {
        return Err(Error::Domain { what: "a0", value: a0, domain: "finite" });
    }
    let n = order;
    let (p, q) = coefficient_series(n);
    let pq = p.mul(&q);
    let mut a = Series::zeros(n);
    let mut b = Series::zeros(n);
    a.0[1] = a0;
    b.0[0] = 1.0;
    let one = Series::poly(&[1.0], n);
    for m in 1..=n {
        // residual of each equation at order m with a_m = b_m = 0
        let ra = a.mul(&p.mul(&b)).add(&a.scale(-1.0)).0[m];
        let one_b2 = one.add(&b.mul(&b).scale(-1.0));
        let one_a2 = one.add(&a.mul(&a).scale(-1.0));
        let rb = p.mul(&one_b2).scale(0.5).0[m]
            - pq.mul(&one_a2).shift().scale(0.5).0[m]
            - q.mul(&b).shift().0[m];
        if m >= 2 {
            // coefficient of a_m on the right is 𝒫(0)b(0) - 1 = 1
            a.0[m] = ra / (m as f64 - 1.0);
        }
        // coefficient of b_m on the right is -𝒫(0)b(0) = -2
        b.0[m] = rb / (m as f64 + 2.0);
    }
    Ok(SeriesCoeffs { a0, order, a: a.0, b: b.0 })
}
