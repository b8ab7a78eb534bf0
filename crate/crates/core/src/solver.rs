//! Gauss-Newton solver for stationary lifts of perturbed manifolds, and
//! local charts of the lift family.
//!
//! Unknowns are the real and imaginary parts of the core coefficients of an
//! increment `delta` added to a start lift. Each slot of `delta` keeps the
//! vanishing order of the start (`g~` gets order 1 when pinned), so orders are
//! preserved by construction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circlefun::{BoundaryGrid, LaurentPoly};
use crate::discs::{verify_stationary, ConstrainedDisc, Lift, StationarityReport};
use crate::error::{Error, Result};
use crate::linalg::{lstsq_truncated, spectrum_of};
use crate::model::{LiftedDefiningSystem, LiftPoint};
use crate::wirtinger::WDual;

type C64 = Complex64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Core degree of the increment.
    pub truncation: usize,
    pub max_iterations: usize,
    /// Target for the max residual over the collocation grid.
    pub residual_target: f64,
    /// Backtracking halvings allowed before declaring divergence.
    pub max_halvings: usize,
    /// Relative singular-value cutoff of the least-squares step.
    pub svd_rel_tol: f64,
    /// Max share of the lift norm carried by the top two degrees.
    pub saturation_tol: f64,
    pub pinned: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            truncation: 24,
            max_iterations: 30,
            residual_target: 1e-10,
            max_halvings: 5,
            svd_rel_tol: 1e-12,
            saturation_tol: 1e-8,
            pinned: false,
        }
    }
}

impl SolveConfig {
    pub fn check(&self, sys: &LiftedDefiningSystem) -> Result<()> {
        if self.residual_target < 1e-12 {
            return Err(Error::InvalidInput(format!(
                "residual target {:e} below 1e-12",
                self.residual_target
            )));
        }
        let min_n = 2 * (sys.base_model().dd() + sys.k0()) as usize;
        if self.truncation < min_n {
            return Err(Error::InvalidInput(format!(
                "truncation {} below 2 (D_d + k0) = {min_n}",
                self.truncation
            )));
        }
        Ok(())
    }

    /// Collocation points used for a system.
    pub fn samples(&self, sys: &LiftedDefiningSystem) -> usize {
        let dd = sys.base_model().dd() as usize;
        let k0 = sys.k0() as usize;
        (2 * (dd * (self.truncation + dd) + 2 * k0)).next_power_of_two().max(128)
    }
}

/// Stacked residuals of all `2n + 2d` equations at every grid point.
pub fn residual(sys: &LiftedDefiningSystem, lift: &Lift, grid: BoundaryGrid) -> Result<Vec<f64>> {
    lift.check_shape(sys.n(), sys.d())?;
    let rows: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|j| {
            let zeta = grid.point(j);
            sys.lifted_residuals(zeta, &lift.point_at(zeta))
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

/// Layout of the increment: one `(order, degree)` per slot.
#[derive(Clone, Debug)]
struct Layout {
    orders: Vec<u32>,
    degree: usize,
}

impl Layout {
    fn new(sys: &LiftedDefiningSystem, start: &Lift, cfg: &SolveConfig) -> Self {
        let d = sys.d();
        let mut orders: Vec<u32> = start.slots().iter().map(|c| c.order).collect();
        if cfg.pinned {
            let size = orders.len();
            for o in &mut orders[size - d..] {
                *o = (*o).max(1);
            }
        }
        Layout {
            orders,
            degree: cfg.truncation,
        }
    }

    fn unknowns(&self) -> usize {
        2 * self.orders.len() * (self.degree + 1)
    }

    fn col(&self, slot: usize, j: usize) -> usize {
        2 * (slot * (self.degree + 1) + j)
    }

    /// Basis values `(1 - zeta)^m zeta^j` of every slot.
    fn basis(&self, zeta: C64) -> Vec<Vec<C64>> {
        self.orders
            .iter()
            .map(|&m| {
                let mut phi = (C64::new(1.0, 0.0) - zeta).powu(m);
                (0..=self.degree)
                    .map(|_| {
                        let v = phi;
                        phi *= zeta;
                        v
                    })
                    .collect()
            })
            .collect()
    }

    fn increment(&self, x: &[f64], basis: &[Vec<C64>]) -> Vec<C64> {
        (0..self.orders.len())
            .map(|k| {
                (0..=self.degree)
                    .map(|j| {
                        let c = self.col(k, j);
                        C64::new(x[c], x[c + 1]) * basis[k][j]
                    })
                    .sum()
            })
            .collect()
    }

    fn discs(&self, x: &[f64]) -> Vec<ConstrainedDisc> {
        self.orders
            .iter()
            .enumerate()
            .map(|(k, &m)| {
                let core = (0..=self.degree)
                    .map(|j| {
                        let c = self.col(k, j);
                        C64::new(x[c], x[c + 1])
                    })
                    .collect();
                ConstrainedDisc::new(m, core)
            })
            .collect()
    }

    /// Coefficients of a lift whose slot orders match this layout.
    fn vector_of(&self, lift: &Lift) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.unknowns()];
        for (k, disc) in lift.slots().into_iter().enumerate() {
            if disc.order != self.orders[k] {
                return Err(Error::InvalidInput(format!(
                    "slot {k} has order {} but the layout expects {}",
                    disc.order, self.orders[k]
                )));
            }
            if disc.core.len() > self.degree + 1 {
                return Err(Error::InvalidInput(format!(
                    "slot {k} has degree {} above the truncation {}",
                    disc.core.len() - 1,
                    self.degree
                )));
            }
            for (j, c) in disc.core.iter().enumerate() {
                let col = self.col(k, j);
                x[col] = c.re;
                x[col + 1] = c.im;
            }
        }
        Ok(x)
    }
}

fn add_disc(a: &ConstrainedDisc, b: &ConstrainedDisc) -> Result<ConstrainedDisc> {
    let sum = &a.to_laurent() + &b.to_laurent();
    ConstrainedDisc::from_laurent(&sum, a.order.min(b.order))
}

fn add_lift(start: &Lift, inc: Vec<ConstrainedDisc>) -> Result<Lift> {
    let slots = start
        .slots()
        .into_iter()
        .zip(&inc)
        .map(|(a, b)| add_disc(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(Lift::from_slots(start.n(), start.d(), slots))
}

/// Precomputed collocation data for one solve.
struct Problem<'a> {
    sys: &'a LiftedDefiningSystem,
    layout: Layout,
    points: Vec<C64>,
    start_values: Vec<Vec<C64>>,
    basis: Vec<Vec<Vec<C64>>>,
    scale: f64,
    /// Extra linear rows `weight * (<x, kappa_j> - t_j)`.
    constraints: Vec<(Vec<f64>, f64)>,
}

impl<'a> Problem<'a> {
    fn new(sys: &'a LiftedDefiningSystem, start: &Lift, cfg: &SolveConfig) -> Self {
        let layout = Layout::new(sys, start, cfg);
        let grid = BoundaryGrid::new(cfg.samples(sys));
        let points: Vec<C64> = grid.points().collect();
        let start_values = points
            .iter()
            .map(|&z| start.slots().iter().map(|c| c.eval(z)).collect())
            .collect();
        let basis = points.iter().map(|&z| layout.basis(z)).collect();
        Problem {
            sys,
            scale: 1.0 / (points.len() as f64).sqrt(),
            layout,
            points,
            start_values,
            basis,
            constraints: Vec::new(),
        }
    }

    fn split<T: Clone>(&self, v: &[T]) -> (Vec<T>, Vec<T>, Vec<T>, Vec<T>) {
        let (n, d) = (self.sys.n(), self.sys.d());
        (
            v[d..d + n].to_vec(),
            v[..d].to_vec(),
            v[d + n..d + 2 * n].to_vec(),
            v[d + 2 * n..].to_vec(),
        )
    }

    fn values(&self, s: usize, x: &[f64]) -> Vec<C64> {
        let inc = self.layout.increment(x, &self.basis[s]);
        self.start_values[s].iter().zip(inc).map(|(a, b)| a + b).collect()
    }

    /// Unscaled collocation residuals (no constraint rows).
    fn collocation(&self, x: &[f64]) -> Result<Vec<f64>> {
        let rows: Vec<Vec<f64>> = (0..self.points.len())
            .into_par_iter()
            .map(|s| {
                let (z, w, zt, wt) = self.split(&self.values(s, x));
                let p = LiftPoint { z, w, zt, wt };
                self.sys.lifted_residuals(self.points[s], &p)
            })
            .collect::<Result<_>>()?;
        Ok(rows.concat())
    }

    fn full(&self, x: &[f64], colloc: &[f64]) -> DVector<f64> {
        let mut out: Vec<f64> = colloc.iter().map(|r| r * self.scale).collect();
        for (kappa, t) in &self.constraints {
            out.push(kappa.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - t);
        }
        DVector::from_vec(out)
    }

    fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let size = self.sys.size();
        let cols = self.layout.unknowns();
        let blocks: Vec<DMatrix<f64>> = (0..self.points.len())
            .into_par_iter()
            .map(|s| {
                let vals = self.values(s, x);
                let vars: Vec<WDual> = vals
                    .iter()
                    .enumerate()
                    .map(|(k, &v)| WDual::variable(k, v, size))
                    .collect();
                let (z, w, zt, wt) = self.split(&vars);
                let res = self.sys.residuals_generic(self.points[s], &z, &w, &zt, &wt)?;
                let mut block = DMatrix::zeros(size, cols);
                for (r, rv) in res.iter().enumerate() {
                    for k in 0..size {
                        let (dk, dbk) = (rv.dx(k), rv.dxbar(k));
                        for (j, &phi) in self.basis[s][k].iter().enumerate() {
                            let a = dk * phi;
                            let b = dbk * phi.conj();
                            let c = self.layout.col(k, j);
                            block[(r, c)] = (a + b).re * self.scale;
                            block[(r, c + 1)] = (C64::i() * (a - b)).re * self.scale;
                        }
                    }
                }
                Ok(block)
            })
            .collect::<Result<_>>()?;
        let rows = size * self.points.len() + self.constraints.len();
        let mut jac = DMatrix::zeros(rows, cols);
        for (s, b) in blocks.iter().enumerate() {
            jac.view_mut((s * size, 0), (size, cols)).copy_from(b);
        }
        for (i, (kappa, _)) in self.constraints.iter().enumerate() {
            for (c, v) in kappa.iter().enumerate() {
                jac[(size * self.points.len() + i, c)] = *v;
            }
        }
        Ok(jac)
    }

    fn constraint_error(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .map(|(kappa, t)| (kappa.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - t).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub lift: Lift,
    pub iterations: usize,
    /// Max collocation residual before each step and at the end.
    pub residual_history: Vec<f64>,
    pub max_residual: f64,
    /// Max residual on a grid four times finer than the collocation grid.
    pub check_residual: f64,
    /// Share of the increment norm in its top two degrees.
    pub saturation: f64,
    /// Coefficient distance between the solution and the start.
    pub distance: f64,
    pub samples: usize,
}

fn gauss_newton(problem: &Problem, cfg: &SolveConfig, expected_rank: Option<usize>) -> Result<(Vec<f64>, usize, Vec<f64>)> {
    let mut x = vec![0.0; problem.layout.unknowns()];
    let mut colloc = problem.collocation(&x)?;
    let mut history = vec![max_abs(&colloc)];
    let mut iterations = 0;
    let done = |c: &[f64], x: &[f64]| max_abs(c) <= cfg.residual_target && problem.constraint_error(x) <= cfg.residual_target;
    while !done(&colloc, &x) {
        if iterations == cfg.max_iterations {
            return Err(Error::Divergence {
                iterations,
                residual: *history.last().unwrap(),
            });
        }
        let f = problem.full(&x, &colloc);
        let jac = problem.jacobian(&x)?;
        if let (Some(expected), 0) = (expected_rank, iterations) {
            let rank = spectrum_of(&jac, cfg.svd_rel_tol.max(1e-10)).rank;
            if rank < expected {
                return Err(Error::FamilyCollapse { rank, expected });
            }
        }
        let (step, _) = lstsq_truncated(&jac, &(-&f), cfg.svd_rel_tol);
        let norm0 = f.norm();
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=cfg.max_halvings {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + lambda * b).collect();
            if let Ok(c) = problem.collocation(&trial) {
                let n1 = problem.full(&trial, &c).norm();
                if n1.is_finite() && n1 < norm0 {
                    accepted = Some((trial, c));
                    break;
                }
            }
            lambda *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((t, c)) => {
                x = t;
                colloc = c;
                history.push(max_abs(&colloc));
            }
            None => {
                return Err(Error::Divergence {
                    iterations,
                    residual: *history.last().unwrap(),
                })
            }
        }
    }
    Ok((x, iterations, history))
}

fn finish(
    problem: &Problem,
    start: &Lift,
    cfg: &SolveConfig,
    x: Vec<f64>,
    iterations: usize,
    history: Vec<f64>,
) -> Result<SolveReport> {
    let layout = &problem.layout;
    let inc = layout.discs(&x);
    let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let top: f64 = (0..layout.orders.len())
        .flat_map(|k| (layout.degree.saturating_sub(1)..=layout.degree).map(move |j| (k, j)))
        .map(|(k, j)| {
            let c = layout.col(k, j);
            x[c] * x[c] + x[c + 1] * x[c + 1]
        })
        .sum::<f64>()
        .sqrt();
    let scale = norm.max(start.coeff_norm() * 1e-8);
    let saturation = if norm == 0.0 { 0.0 } else { top / scale };
    if saturation > cfg.saturation_tol {
        return Err(Error::TruncationSaturated { ratio: saturation });
    }
    let lift = add_lift(start, inc)?;
    let check = residual(problem.sys, &lift, BoundaryGrid::new(4 * problem.points.len()))?;
    Ok(SolveReport {
        max_residual: *history.last().unwrap(),
        check_residual: max_abs(&check),
        iterations,
        residual_history: history,
        saturation,
        distance: norm,
        samples: problem.points.len(),
        lift,
    })
}

/// Gauss-Newton from `start` until the collocation residual is below target.
pub fn solve(sys: &LiftedDefiningSystem, start: &Lift, cfg: &SolveConfig) -> Result<SolveReport> {
    cfg.check(sys)?;
    start.check_shape(sys.n(), sys.d())?;
    if start.is_constant() {
        return Err(Error::ConstantDisc);
    }
    let problem = Problem::new(sys, start, cfg);
    let (x, iterations, history) = gauss_newton(&problem, cfg, None)?;
    finish(&problem, start, cfg, x, iterations, history)
}

/// One solved point of a family chart.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChartPoint {
    pub t: Vec<f64>,
    pub lift: Lift,
    pub iterations: usize,
    pub max_residual: f64,
    pub stationary: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscFamily {
    pub base: Lift,
    pub dimension: usize,
    pub pinned: bool,
    pub truncation: usize,
    pub points: Vec<ChartPoint>,
    /// Smallest coefficient distance between two chart points.
    pub min_pairwise_distance: f64,
}

impl DiscFamily {
    pub fn all_stationary(&self) -> bool {
        self.points.iter().all(|p| p.stationary)
    }

    pub fn point(&self, t: &[f64]) -> Option<&ChartPoint> {
        self.points.iter().find(|p| p.t == t)
    }
}

/// Parameter points `+-r e_i`.
pub fn axis_grid(m: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(2 * m);
    for i in 0..m {
        for s in [radius, -radius] {
            let mut t = vec![0.0; m];
            t[i] = s;
            out.push(t);
        }
    }
    out
}

/// Parameter points `{-r, r}^m`.
pub fn corner_grid(m: usize, radius: f64) -> Vec<Vec<f64>> {
    (0..1usize << m)
        .map(|mask| {
            (0..m)
                .map(|i| if mask >> i & 1 == 1 { radius } else { -radius })
                .collect()
        })
        .collect()
}

fn coefficient_distance(a: &Lift, b: &Lift) -> f64 {
    a.slots()
        .iter()
        .zip(b.slots())
        .map(|(x, y)| (&x.to_laurent() - &y.to_laurent()).coeff_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Solves with `<delta - sum t_i kappa_i, kappa_j> = 0` for one parameter.
pub fn chart_point(
    sys: &LiftedDefiningSystem,
    base: &Lift,
    kernel_basis: &[Lift],
    t: &[f64],
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    cfg.check(sys)?;
    if t.len() != kernel_basis.len() {
        return Err(Error::DimensionMismatch {
            expected: kernel_basis.len(),
            got: t.len(),
        });
    }
    let mut problem = Problem::new(sys, base, cfg);
    let kappas = kernel_basis
        .iter()
        .map(|k| problem.layout.vector_of(k))
        .collect::<Result<Vec<_>>>()?;
    // Gram solve so that a non-orthonormal basis still pins the coordinates t
    let m = kappas.len();
    let gram = DMatrix::from_fn(m, m, |i, j| kappas[i].iter().zip(&kappas[j]).map(|(a, b)| a * b).sum::<f64>());
    let tv = DVector::from_column_slice(t);
    let rhs = &gram * &tv;
    problem.constraints = kappas.into_iter().zip(rhs.iter().copied()).collect();
    let unknowns = problem.layout.unknowns();
    let (x, iterations, history) = gauss_newton(&problem, cfg, Some(unknowns))?;
    finish(&problem, base, cfg, x, iterations, history)
}

/// Solved lifts at each parameter in `params` plus the base at `t = 0`.
pub fn family_chart(
    sys: &LiftedDefiningSystem,
    base: &Lift,
    kernel_basis: &[Lift],
    params: &[Vec<f64>],
    cfg: &SolveConfig,
    stationary_tol: f64,
) -> Result<DiscFamily> {
    let m = kernel_basis.len();
    let grid = BoundaryGrid::new(4096);
    let solved: Vec<(Vec<f64>, SolveReport)> = params
        .par_iter()
        .map(|t| Ok((t.clone(), chart_point(sys, base, kernel_basis, t, cfg)?)))
        .collect::<Result<_>>()?;
    let base_check: StationarityReport = verify_stationary(sys, base, grid, stationary_tol)?;
    let mut points = vec![ChartPoint {
        t: vec![0.0; m],
        lift: base.clone(),
        iterations: 0,
        max_residual: base_check.max_residual,
        stationary: base_check.passed,
    }];
    for (t, rep) in solved {
        let st = verify_stationary(sys, &rep.lift, grid, stationary_tol)?;
        points.push(ChartPoint {
            t,
            iterations: rep.iterations,
            max_residual: st.max_residual,
            stationary: st.passed,
            lift: rep.lift,
        });
    }
    let mut min_dist = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            min_dist = min_dist.min(coefficient_distance(&points[i].lift, &points[j].lift));
        }
    }
    Ok(DiscFamily {
        base: base.clone(),
        dimension: m,
        pinned: cfg.pinned,
        truncation: cfg.truncation,
        points,
        min_pairwise_distance: min_dist,
    })
}

/// Rank of `t -> f_t(0)` at `t = 0`, from central differences over the axis
/// points of the family. Families without both `+-r e_i` for some axis skip it.
pub fn evaluation_rank(fam: &DiscFamily) -> usize {
    let center = |l: &Lift| -> Vec<f64> {
        let zero = C64::new(0.0, 0.0);
        l.h.iter()
            .chain(&l.g)
            .flat_map(|c| {
                let v = c.eval(zero);
                [v.re, v.im]
            })
            .collect()
    };
    let mut cols = Vec::new();
    for i in 0..fam.dimension {
        let find = |sign: f64| {
            fam.points.iter().find(|p| {
                p.t.iter()
                    .enumerate()
                    .all(|(k, &v)| if k == i { v * sign > 0.0 } else { v == 0.0 })
            })
        };
        if let (Some(p), Some(q)) = (find(1.0), find(-1.0)) {
            let h = p.t[i] - q.t[i];
            let (a, b) = (center(&p.lift), center(&q.lift));
            cols.push(a.iter().zip(&b).map(|(x, y)| (x - y) / h).collect::<Vec<f64>>());
        }
    }
    if cols.is_empty() {
        return 0;
    }
    let rows = cols[0].len();
    let mat = DMatrix::from_fn(rows, cols.len(), |r, c| cols[c][r]);
    spectrum_of(&mat, 1e-6).rank
}

/// Laurent form of every slot, for inspection.
pub fn slot_polys(lift: &Lift) -> Vec<LaurentPoly> {
    lift.slots().iter().map(|c| c.to_laurent()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admissibility::CandidatePair;
    use crate::discs::initial_lift;
    use crate::fixtures;
    use crate::linearization::{assemble_g, kernel};
    use crate::model::{perturb, CoeffMonomial, Perturbation, PerturbationComponent, PerturbationTerm};

    fn one() -> CandidatePair {
        CandidatePair::new(vec![1.0], vec![C64::new(1.0, 0.0)])
    }

    fn sphere_perturbation(eps: f64) -> Perturbation {
        Perturbation::new(
            eps,
            vec![PerturbationComponent {
                terms: vec![PerturbationTerm {
                    i: vec![2],
                    j: vec![1],
                    s: vec![0],
                    coeff: vec![CoeffMonomial {
                        a: vec![1],
                        b: vec![0],
                        t: vec![0],
                        re: 1.0,
                        im: 0.0,
                    }],
                }],
            }],
        )
    }

    #[test]
    fn unperturbed_start_is_fixed_point() {
        let model = fixtures::sphere();
        let sys = LiftedDefiningSystem::model(&model);
        let f0 = initial_lift(&model, &one()).unwrap();
        let rep = solve(&sys, &f0, &SolveConfig::default()).unwrap();
        assert_eq!(rep.iterations, 0);
        assert_eq!(rep.lift, f0);
    }

    #[test]
    fn perturbed_sphere_converges() {
        let model = fixtures::sphere();
        let f0 = initial_lift(&model, &one()).unwrap();
        let sys = perturb(&model, &sphere_perturbation(0.01)).unwrap();
        let r0 = max_abs(&residual(&sys, &f0, BoundaryGrid::new(512)).unwrap());
        assert!(r0 > 1e-6);
        let rep = solve(&sys, &f0, &SolveConfig::default()).unwrap();
        assert!(rep.iterations <= 6, "{:?}", rep.residual_history);
        assert!(rep.check_residual <= 1e-10, "{}", rep.check_residual);
    }

    #[test]
    fn far_perturbation_fails_cleanly() {
        let model = fixtures::sphere();
        let f0 = initial_lift(&model, &one()).unwrap();
        let sys = perturb(&model, &sphere_perturbation(10.0)).unwrap();
        assert!(solve(&sys, &f0, &SolveConfig::default()).is_err());
    }

    #[test]
    fn sphere_axis_chart() {
        let model = fixtures::sphere();
        let pair = one();
        let f0 = initial_lift(&model, &pair).unwrap();
        let op = assemble_g(&model, &pair).unwrap();
        let cfg = SolveConfig::default();
        let k = kernel(&op, cfg.truncation).unwrap();
        let sys = LiftedDefiningSystem::model(&model);
        let fam = family_chart(&sys, &f0, &k.basis, &axis_grid(k.nullity, 0.02), &cfg, 1e-9).unwrap();
        assert_eq!(fam.points.len(), 11);
        assert!(fam.all_stationary());
        assert!(fam.min_pairwise_distance > 1e-3);
        let rank = evaluation_rank(&fam);
        assert!(rank <= 4);
    }
}
