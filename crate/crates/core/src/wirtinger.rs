//! Forward-mode Wirtinger differentiation.
//!
//! A [`WDual`] carries a complex value together with its derivatives with
//! respect to a set of complex variables `x_k` and their conjugates. For a
//! real-valued function `R` the pair gives the real differential
//! `dR = 2 Re( sum_k dR/dx_k dx_k )`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

type C64 = Complex64;

/// Arithmetic shared by plain complex evaluation and dual evaluation.
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: C64) -> Self;
    fn conj(&self) -> Self;
    fn value(&self) -> C64;

    fn real(re: f64) -> Self {
        Self::constant(C64::new(re, 0.0))
    }

    fn scale(&self, s: C64) -> Self {
        self.clone() * Self::constant(s)
    }

    fn re_part(&self) -> Self {
        (self.clone() + self.conj()).scale(C64::new(0.5, 0.0))
    }

    fn im_part(&self) -> Self {
        (self.clone() - self.conj()).scale(C64::new(0.0, -0.5))
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::real(1.0);
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for C64 {
    fn constant(c: C64) -> Self {
        c
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn value(&self) -> C64 {
        *self
    }
}

/// Value plus holomorphic and antiholomorphic partial derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct WDual {
    pub v: C64,
    /// `d/dx_k`; shorter vectors are implicitly zero-padded.
    pub d: Vec<C64>,
    /// `d/dconj(x_k)`.
    pub db: Vec<C64>,
}

impl WDual {
    /// The independent variable `x_k` among `nvars`.
    pub fn variable(k: usize, value: C64, nvars: usize) -> Self {
        let mut d = vec![C64::new(0.0, 0.0); nvars];
        d[k] = C64::new(1.0, 0.0);
        WDual {
            v: value,
            d,
            db: vec![C64::new(0.0, 0.0); nvars],
        }
    }

    pub fn dx(&self, k: usize) -> C64 {
        self.d.get(k).copied().unwrap_or_default()
    }

    pub fn dxbar(&self, k: usize) -> C64 {
        self.db.get(k).copied().unwrap_or_default()
    }
}

fn combine(a: &[C64], sa: C64, b: &[C64], sb: C64) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            a.get(k).copied().unwrap_or_default() * sa + b.get(k).copied().unwrap_or_default() * sb
        })
        .collect()
}

const ONE: C64 = C64::new(1.0, 0.0);

impl Add for WDual {
    type Output = WDual;
    fn add(self, rhs: WDual) -> WDual {
        WDual {
            v: self.v + rhs.v,
            d: combine(&self.d, ONE, &rhs.d, ONE),
            db: combine(&self.db, ONE, &rhs.db, ONE),
        }
    }
}

impl Sub for WDual {
    type Output = WDual;
    fn sub(self, rhs: WDual) -> WDual {
        WDual {
            v: self.v - rhs.v,
            d: combine(&self.d, ONE, &rhs.d, -ONE),
            db: combine(&self.db, ONE, &rhs.db, -ONE),
        }
    }
}

impl Mul for WDual {
    type Output = WDual;
    fn mul(self, rhs: WDual) -> WDual {
        WDual {
            v: self.v * rhs.v,
            d: combine(&self.d, rhs.v, &rhs.d, self.v),
            db: combine(&self.db, rhs.v, &rhs.db, self.v),
        }
    }
}

impl Div for WDual {
    type Output = WDual;
    fn div(self, rhs: WDual) -> WDual {
        let inv = ONE / rhs.v;
        let q = self.v * inv;
        WDual {
            v: q,
            d: combine(&self.d, inv, &rhs.d, -q * inv),
            db: combine(&self.db, inv, &rhs.db, -q * inv),
        }
    }
}

impl Neg for WDual {
    type Output = WDual;
    fn neg(self) -> WDual {
        WDual {
            v: -self.v,
            d: self.d.iter().map(|c| -c).collect(),
            db: self.db.iter().map(|c| -c).collect(),
        }
    }
}

impl Scalar for WDual {
    fn constant(c: C64) -> Self {
        WDual {
            v: c,
            d: Vec::new(),
            db: Vec::new(),
        }
    }

    fn conj(&self) -> Self {
        WDual {
            v: self.v.conj(),
            d: self.db.iter().map(|c| c.conj()).collect(),
            db: self.d.iter().map(|c| c.conj()).collect(),
        }
    }

    fn value(&self) -> C64 {
        self.v
    }

    fn scale(&self, s: C64) -> Self {
        WDual {
            v: self.v * s,
            d: self.d.iter().map(|c| c * s).collect(),
            db: self.db.iter().map(|c| c * s).collect(),
        }
    }
}
