//! Constrained analytic discs, the explicit initial lift and the
//! stationarity verification.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::admissibility::{complex_pairs, CandidatePair};
use crate::circlefun::{binomial, conjugate_function, negative_energy, BoundaryGrid, LaurentPoly};
use crate::error::{Error, Result};
use crate::model::{LiftPoint, LiftedDefiningSystem, Model};

type C64 = Complex64;

/// Default stationarity tolerance (scaled by `1 + ||lift||`).
pub const STATIONARY_TOL: f64 = 1e-9;
const FACTOR_TOL: f64 = 1e-12;

/// The disc `zeta -> (1 - zeta)^order * sum_j core_j zeta^j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedDisc {
    pub order: u32,
    #[serde(with = "complex_pairs")]
    pub core: Vec<C64>,
}

impl ConstrainedDisc {
    pub fn new(order: u32, core: Vec<C64>) -> Self {
        ConstrainedDisc { order, core }
    }

    pub fn zero(order: u32, degree: usize) -> Self {
        ConstrainedDisc {
            order,
            core: vec![C64::new(0.0, 0.0); degree + 1],
        }
    }

    /// Factors `(1 - zeta)^order` out of a holomorphic polynomial.
    pub fn from_laurent(p: &LaurentPoly, order: u32) -> Result<Self> {
        if !p.is_holomorphic() {
            return Err(Error::Consistency(format!(
                "disc component has negative exponents (lowest {:?})",
                p.lo()
            )));
        }
        let (q, rem) = p.div_one_minus_zeta_pow(order)?;
        if rem > FACTOR_TOL * (1.0 + p.max_abs_coeff()) {
            return Err(Error::Consistency(format!(
                "component is not divisible by (1 - zeta)^{order} (remainder {rem:.3e})"
            )));
        }
        let core = match q.hi() {
            Some(hi) => (0..=hi).map(|k| q.coeff(k)).collect(),
            None => vec![C64::new(0.0, 0.0)],
        };
        Ok(ConstrainedDisc { order, core })
    }

    pub fn core_poly(&self) -> LaurentPoly {
        LaurentPoly::from_poly(&self.core)
    }

    /// Raw coefficients of the full disc.
    pub fn to_laurent(&self) -> LaurentPoly {
        &LaurentPoly::one_minus_zeta_pow(self.order) * &self.core_poly()
    }

    pub fn eval(&self, zeta: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for c in self.core.iter().rev() {
            acc = acc * zeta + c;
        }
        acc * (C64::new(1.0, 0.0) - zeta).powu(self.order)
    }

    pub fn degree(&self) -> usize {
        self.core.len().saturating_sub(1)
    }

    pub fn coeff_norm(&self) -> f64 {
        self.core.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.core.iter().all(|c| c.norm() == 0.0)
    }

    /// Core padded (or truncated) to `degree + 1` coefficients.
    pub fn resized(&self, degree: usize) -> Self {
        let mut core = self.core.clone();
        core.resize(degree + 1, C64::new(0.0, 0.0));
        ConstrainedDisc {
            order: self.order,
            core,
        }
    }

    /// Taylor coefficients `f^{(k)}(1) / k!` for `k = 0..=kmax`.
    pub fn taylor_at_one(&self, kmax: usize) -> Vec<C64> {
        // f = (-u)^m core(1 + u) with u = zeta - 1
        let m = self.order as usize;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        (0..=kmax)
            .map(|k| {
                if k < m {
                    return C64::new(0.0, 0.0);
                }
                let kk = (k - m) as u32;
                self.core
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a * binomial(j as u32, kk))
                    .sum::<C64>()
                    * sign
            })
            .collect()
    }
}

/// A lift `(h, g, h~, g~)` of a disc `(h, g)` to the cotangent bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lift {
    pub h: Vec<ConstrainedDisc>,
    pub g: Vec<ConstrainedDisc>,
    pub h_tilde: Vec<ConstrainedDisc>,
    pub g_tilde: Vec<ConstrainedDisc>,
}

impl Lift {
    /// Components in the `(w, z, z~, w~)` order used by the linearization.
    pub fn slots(&self) -> Vec<&ConstrainedDisc> {
        self.g
            .iter()
            .chain(&self.h)
            .chain(&self.h_tilde)
            .chain(&self.g_tilde)
            .collect()
    }

    /// Rebuilds a lift from components in slot order.
    pub fn from_slots(n: usize, d: usize, slots: Vec<ConstrainedDisc>) -> Self {
        assert_eq!(slots.len(), 2 * n + 2 * d, "slot count");
        let mut it = slots.into_iter();
        let g = it.by_ref().take(d).collect();
        let h = it.by_ref().take(n).collect();
        let h_tilde = it.by_ref().take(n).collect();
        let g_tilde = it.collect();
        Lift {
            h,
            g,
            h_tilde,
            g_tilde,
        }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn d(&self) -> usize {
        self.g.len()
    }

    pub fn point_at(&self, zeta: C64) -> LiftPoint {
        let ev = |v: &[ConstrainedDisc]| v.iter().map(|c| c.eval(zeta)).collect();
        LiftPoint {
            z: ev(&self.h),
            w: ev(&self.g),
            zt: ev(&self.h_tilde),
            wt: ev(&self.g_tilde),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.h.iter().chain(&self.g).all(|c| {
            let p = c.to_laurent();
            let constant = p.terms().all(|(k, v)| k == 0 || v.norm() == 0.0);
            constant
        })
    }

    pub fn coeff_norm(&self) -> f64 {
        self.slots()
            .iter()
            .map(|c| c.coeff_norm().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_degree(&self) -> usize {
        self.slots().iter().map(|c| c.degree()).max().unwrap_or(0)
    }

    /// All cores padded to a common degree.
    pub fn resized(&self, degree: usize) -> Self {
        let r = |v: &[ConstrainedDisc]| v.iter().map(|c| c.resized(degree)).collect();
        Lift {
            h: r(&self.h),
            g: r(&self.g),
            h_tilde: r(&self.h_tilde),
            g_tilde: r(&self.g_tilde),
        }
    }

    pub fn check_shape(&self, n: usize, d: usize) -> Result<()> {
        for (v, len) in [
            (&self.h, n),
            (&self.g, d),
            (&self.h_tilde, n),
            (&self.g_tilde, d),
        ] {
            if v.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    got: v.len(),
                });
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// The explicit `k0`-stationary lift through `(1 - zeta) V` with `g(1) = 0`.
pub fn initial_lift(model: &Model, pair: &CandidatePair) -> Result<Lift> {
    initial_lift_with_constant(model, pair, None)
}

/// As [`initial_lift`], with an optional imaginary constant `tau` for the
/// `w`-components; a nonzero `tau` leaves the `g(1) = 0` space, so those
/// components are then stored with order 0.
pub fn initial_lift_with_constant(
    model: &Model,
    pair: &CandidatePair,
    tau: Option<f64>,
) -> Result<Lift> {
    pair.check(model)?;
    if pair.c.iter().all(|c| *c == 0.0) {
        return Err(Error::InvalidInput(
            "c = 0: sum_l c_l dr_l(0) vanishes, no lift exists".into(),
        ));
    }
    let n = model.n();
    let k0 = model.k0() as i32;
    let h = pair
        .v
        .iter()
        .map(|&v| ConstrainedDisc::new(1, vec![v]))
        .collect();
    let g_order = if tau.unwrap_or(0.0) == 0.0 { 1 } else { 0 };
    let g = model
        .components()
        .iter()
        .map(|p| {
            let u = p.restrict_to_ray(&pair.v)?;
            let gl = conjugate_function(&u, tau)?;
            ConstrainedDisc::from_laurent(&gl, g_order)
        })
        .collect::<Result<Vec<_>>>()?;
    let h_tilde = (0..n)
        .map(|j| {
            let mut acc = LaurentPoly::zero();
            for (l, p) in model.components().iter().enumerate() {
                if pair.c[l] == 0.0 || p.is_zero() {
                    continue;
                }
                let pz = p.poly().diff_z(j).restrict_to_ray(&pair.v)?;
                acc = &acc + &pz.scale(C64::new(-pair.c[l], 0.0));
            }
            ConstrainedDisc::from_laurent(&acc.shift(k0), model.d1() - 1)
        })
        .collect::<Result<Vec<_>>>()?;
    let g_tilde = pair
        .c
        .iter()
        .map(|&c| {
            let mut core = vec![C64::new(0.0, 0.0); k0 as usize + 1];
            core[k0 as usize] = C64::new(c / 2.0, 0.0);
            ConstrainedDisc::new(0, core)
        })
        .collect();
    Ok(Lift {
        h,
        g,
        h_tilde,
        g_tilde,
    })
}

/// One check of [`verify_stationary`] with its worst location.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// Angle of the worst sample (radians); `None` for global quantities.
    pub theta: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    pub tolerance: f64,
    pub grid: usize,
    pub max_residual: f64,
    pub negative_energy: f64,
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl StationarityReport {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Sample {
    residual: Vec<f64>,
    lifted: Vec<C64>,
    imag_c: f64,
    origin: f64,
}

/// Stationarity of a lift for the system `sys` with tolerance
/// `tol * (1 + ||lift||)` on `grid`.
pub fn verify_stationary(
    sys: &LiftedDefiningSystem,
    lift: &Lift,
    grid: BoundaryGrid,
    tol: f64,
) -> Result<StationarityReport> {
    let (n, d) = (sys.n(), sys.d());
    lift.check_shape(n, d)?;
    if lift.is_constant() {
        return Err(Error::ConstantDisc);
    }
    let k0 = sys.k0() as i32;
    let samples: Vec<Sample> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let zeta = grid.point(j);
            let p = lift.point_at(zeta);
            let residual = sys.lifted_residuals(zeta, &p)?;
            let cn = sys.conormal(zeta, &p.z, &p.w, &p.wt)?;
            let wmat = sys.elimination_matrix(&p.z, &p.w)?;
            let mut lifted = cn.dz.clone();
            for jj in 0..d {
                let s: C64 = (0..d).map(|l| cn.c[l] * wmat[(l, jj)]).sum();
                lifted.push(s * zeta.powi(k0));
            }
            let imag_c = cn.c.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
            let real_c: Vec<C64> = cn.c.iter().map(|c| C64::new(c.re, 0.0)).collect();
            let origin = sys
                .conormal_at_origin(&real_c)
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>()
                .sqrt();
            Ok(Sample {
                residual,
                lifted,
                imag_c,
                origin,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let threshold = tol * (1.0 + lift.coeff_norm());
    let theta = |j: usize| 2.0 * std::f64::consts::PI * j as f64 / grid.len() as f64;
    let argmax = |f: &dyn Fn(&Sample) -> f64| {
        samples
            .iter()
            .enumerate()
            .map(|(j, s)| (j, f(s)))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
    };
    let mk = |name: &str, (j, v): (usize, f64), passed: bool| CheckResult {
        name: name.into(),
        value: v,
        threshold,
        theta: Some(theta(j)),
        passed,
    };
    let attach = argmax(&|s| s.residual[..d].iter().map(|x| x.abs()).fold(0.0, f64::max));
    let conormal = argmax(&|s| s.residual.iter().map(|x| x.abs()).fold(0.0, f64::max));
    let reality = argmax(&|s| s.imag_c);
    let neg = (0..n + d)
        .map(|k| negative_energy(&samples.iter().map(|s| s.lifted[k]).collect::<Vec<_>>()))
        .fold(0.0, f64::max);
    let origin_min = samples
        .iter()
        .enumerate()
        .map(|(j, s)| (j, s.origin))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let checks = vec![
        mk("attachment", attach, attach.1 <= threshold),
        mk("conormal", conormal, conormal.1 <= threshold),
        mk("reality", reality, reality.1 <= threshold),
        CheckResult {
            name: "holomorphy".into(),
            value: neg,
            threshold,
            theta: None,
            passed: neg <= threshold,
        },
        mk("nonvanishing", origin_min, origin_min.1 > threshold),
    ];
    Ok(StationarityReport {
        tolerance: tol,
        grid: grid.len(),
        max_residual: conormal.1,
        negative_energy: neg,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
