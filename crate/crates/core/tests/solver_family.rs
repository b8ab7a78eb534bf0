use stadisc_core::discs::initial_lift;
use stadisc_core::fixtures;
use stadisc_core::linearization::{assemble_g, kernel};
use stadisc_core::model::{perturb, CoeffMonomial, PerturbationComponent, PerturbationTerm};
use stadisc_core::solver::{axis_grid, corner_grid, evaluation_rank, family_chart, solve};
use stadisc_core::{CandidatePair, Complex64, LiftedDefiningSystem, Model, Perturbation, SolveConfig};

type C64 = Complex64;

fn one() -> CandidatePair {
    CandidatePair::new(vec![1.0], vec![C64::new(1.0, 0.0)])
}

/// `eps * z^{i} conj(z)^{j}` times `z` (plus the automatic mirror).
fn single_term(eps: f64, i: u32, j: u32) -> Perturbation {
    Perturbation::new(
        eps,
        vec![PerturbationComponent {
            terms: vec![PerturbationTerm {
                i: vec![i],
                j: vec![j],
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
fn distance_is_linear_in_epsilon() {
    let model = fixtures::sphere();
    let f0 = initial_lift(&model, &one()).unwrap();
    let cfg = SolveConfig::default();
    let eps = [1e-2, 1e-3, 1e-4];
    let dist: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let sys = perturb(&model, &single_term(e, 2, 1)).unwrap();
            let rep = solve(&sys, &f0, &cfg).unwrap();
            assert!(rep.check_residual <= 1e-10);
            rep.distance
        })
        .collect();
    for w in 0..2 {
        let slope = (dist[w].ln() - dist[w + 1].ln()) / (eps[w].ln() - eps[w + 1].ln());
        assert!((slope - 1.0).abs() < 0.1, "slope {slope}");
    }
}

fn chart(model: &Model, sys: &LiftedDefiningSystem, pinned: bool, params: impl Fn(usize) -> Vec<Vec<f64>>) -> (usize, stadisc_core::DiscFamily) {
    let pair = one();
    let f0 = initial_lift(model, &pair).unwrap();
    let cfg = SolveConfig {
        pinned,
        ..SolveConfig::default()
    };
    let op = assemble_g(model, &pair).unwrap().pinned(pinned);
    let k = kernel(&op, cfg.truncation).unwrap();
    let base = solve(sys, &f0, &cfg).unwrap().lift;
    let fam = family_chart(sys, &base, &k.basis, &params(k.nullity), &cfg, 1e-9).unwrap();
    (k.nullity, fam)
}

#[test]
fn sphere_corner_grid() {
    let model = fixtures::sphere();
    let sys = LiftedDefiningSystem::model(&model);
    let (m, fam) = chart(&model, &sys, false, |m| corner_grid(m, 0.02));
    assert_eq!(m, 5);
    assert_eq!(fam.points.len(), 33);
    assert!(fam.all_stationary());
    assert!(fam.min_pairwise_distance > 1e-4);
}

#[test]
fn pinned_sphere_chart() {
    let model = fixtures::sphere();
    let sys = perturb(&model, &single_term(0.01, 2, 1)).unwrap();
    let (m, fam) = chart(&model, &sys, true, |m| axis_grid(m, 0.02));
    assert_eq!(m, 4);
    assert_eq!(fam.points.len(), 9);
    assert!(fam.all_stationary());
    // g~(1) stays at the base value along the pinned chart
    let one = C64::new(1.0, 0.0);
    let g1 = fam.base.g_tilde[0].eval(one);
    for p in &fam.points {
        assert!((p.lift.g_tilde[0].eval(one) - g1).norm() < 1e-10);
    }
    assert!(evaluation_rank(&fam) <= 4);
}

#[test]
fn quartic_axis_chart() {
    let model = fixtures::quartic(1.0 / 3.0);
    let sys = perturb(&model, &single_term(1e-3, 3, 2)).unwrap();
    let (m, fam) = chart(&model, &sys, false, |m| axis_grid(m, 0.01));
    assert_eq!(m, 11);
    assert_eq!(fam.points.len(), 23);
    assert!(fam.all_stationary());
    assert!(fam.min_pairwise_distance > 0.0);
}
