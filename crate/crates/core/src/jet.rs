//! First-order jets in the radial variable.
//!
//! A [`Jet`] carries a value together with its derivative with respect to
//! `r`. Products follow the Leibniz rule, so a closed-form profile and its
//! hand-computed derivative propagate exactly through form arithmetic.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Jet {
    pub v: f64,
    pub d: f64,
}

impl Jet {
    pub const ZERO: Jet = Jet { v: 0.0, d: 0.0 };
    pub const ONE: Jet = Jet { v: 1.0, d: 0.0 };

    pub const fn new(v: f64, d: f64) -> Self {
        Jet { v, d }
    }

    /// A radially constant jet.
    pub const fn constant(v: f64) -> Self {
        Jet { v, d: 0.0 }
    }

    /// The coordinate function `r` itself.
    pub const fn var(r: f64) -> Self {
        Jet { v: r, d: 1.0 }
    }

    pub fn scale(self, s: f64) -> Self {
        Jet { v: self.v * s, d: self.d * s }
    }

    pub fn recip(self) -> Self {
        Jet { v: 1.0 / self.v, d: -self.d / (self.v * self.v) }
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        Jet { v: s, d: self.d / (2.0 * s) }
    }

    pub fn powf(self, p: f64) -> Self {
        let vp = self.v.powf(p);
        Jet { v: vp, d: p * self.v.powf(p - 1.0) * self.d }
    }

    pub fn powi(self, n: i32) -> Self {
        Jet { v: self.v.powi(n), d: n as f64 * self.v.powi(n - 1) * self.d }
    }

    pub fn abs_max(self) -> f64 {
        self.v.abs().max(self.d.abs())
    }

    pub fn is_zero(self) -> bool {
        self.v == 0.0 && self.d == 0.0
    }
}

impl From<f64> for Jet {
    fn from(v: f64) -> Self {
        Jet::constant(v)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d: self.d + o.d }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d: self.d - o.d }
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet { v: self.v * o.v, d: self.d * o.v + self.v * o.d }
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, o: Jet) -> Jet {
        Jet { v: self.v / o.v, d: (self.d * o.v - self.v * o.d) / (o.v * o.v) }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, j: Jet) -> Jet {
        j.scale(self)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet { v: -self.v, d: -self.d }
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, o: Jet) {
        self.v += o.v;
        self.d += o.d;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, o: Jet) {
        self.v -= o.v;
        self.d -= o.d;
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, s: f64) {
        self.v *= s;
        self.d *= s;
    }
}
