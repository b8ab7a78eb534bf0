use proptest::prelude::*;
use stadisc_core::admissibility::{check_admissible, index_report};
use stadisc_core::circlefun::{conjugate_function, winding_number};
use stadisc_core::fixtures;
use stadisc_core::{BiPoly, BoundaryGrid, CandidatePair, Complex64, LaurentPoly, MultiIndex};

type C64 = Complex64;

fn term() -> impl Strategy<Value = (Vec<u32>, Vec<u32>, f64, f64)> {
    (
        prop::collection::vec(0u32..3, 2),
        prop::collection::vec(0u32..3, 2),
        -2.0f64..2.0,
        -2.0f64..2.0,
    )
}

fn bipoly(terms: &[(Vec<u32>, Vec<u32>, f64, f64)], mirror: bool) -> BiPoly {
    let mut out = Vec::new();
    for (i, j, re, im) in terms {
        let c = C64::new(*re, *im);
        out.push((MultiIndex(i.clone()), MultiIndex(j.clone()), c));
        if mirror {
            out.push((MultiIndex(j.clone()), MultiIndex(i.clone()), c.conj()));
        }
    }
    BiPoly::from_terms(2, out).unwrap()
}

fn point() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.5f64..1.5, -1.5f64..1.5).prop_map(|(a, b)| C64::new(a, b)), 2)
}

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-3i32..4, -1.0f64..1.0, -1.0f64..1.0), 1..5)
        .prop_map(|t| LaurentPoly::from_terms(t.into_iter().map(|(k, a, b)| (k, C64::new(a, b)))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mirrored_polynomials_are_real(ts in prop::collection::vec(term(), 1..6), z in point()) {
        let p = bipoly(&ts, true);
        let v = p.eval(&z).unwrap();
        prop_assert!(v.im.abs() <= 1e-10 * (1.0 + v.norm()));
    }

    #[test]
    fn wirtinger_derivatives_commute(ts in prop::collection::vec(term(), 1..6), i in 0usize..2, j in 0usize..2) {
        let p = bipoly(&ts, false);
        prop_assert_eq!(p.diff_z(i).diff_zbar(j), p.diff_zbar(j).diff_z(i));
    }

    #[test]
    fn ray_restriction_matches_evaluation(ts in prop::collection::vec(term(), 1..6), v in point(), theta in 0.0f64..6.28) {
        prop_assume!(v.iter().any(|c| c.norm() > 1e-3));
        let p = bipoly(&ts, false);
        let zeta = C64::from_polar(1.0, theta);
        let ray: Vec<C64> = v.iter().map(|c| (C64::new(1.0, 0.0) - zeta) * c).collect();
        let direct = p.eval(&ray).unwrap();
        let laurent = p.restrict_to_ray(&v).unwrap().eval(zeta);
        prop_assert!((direct - laurent).norm() <= 1e-9 * (1.0 + direct.norm()));
    }

    #[test]
    fn winding_is_additive(f in laurent(), g in laurent()) {
        let (Ok(wf), Ok(wg)) = (winding_number(&f), winding_number(&g)) else { return Ok(()); };
        let fg = &f * &g;
        if let Ok(w) = winding_number(&fg) {
            prop_assert_eq!(w, wf + wg);
        }
    }

    #[test]
    fn conjugate_function_has_real_part(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5), b0 in -1.0f64..1.0, tau in -1.0f64..1.0) {
        let mut terms = vec![(0, C64::new(b0, 0.0))];
        for (k, (a, b)) in coeffs.into_iter().enumerate() {
            let c = C64::new(a, b);
            terms.push((k as i32 + 1, c));
            terms.push((-(k as i32) - 1, c.conj()));
        }
        let u = LaurentPoly::from_terms(terms);
        let g = conjugate_function(&u, Some(tau)).unwrap();
        prop_assert!(g.is_holomorphic());
        for z in BoundaryGrid::new(32).points() {
            prop_assert!((g.eval(z).re - u.eval(z).re).abs() < 1e-12);
        }
        prop_assert!((g.eval(C64::new(0.0, 0.0)).im - tau).abs() < 1e-12);
    }

    #[test]
    fn admissibility_is_scale_invariant(t in 0.05f64..0.95, lambda in 0.2f64..5.0, mu in 0.2f64..5.0, phase in 0.0f64..6.28) {
        let model = fixtures::quartic(t);
        let base = CandidatePair::new(vec![1.0], vec![C64::new(1.0, 0.0)]);
        let scaled = CandidatePair::new(vec![lambda], vec![C64::from_polar(mu, 0.0)]);
        let a = check_admissible(&model, &base).unwrap();
        let b = check_admissible(&model, &scaled).unwrap();
        prop_assert_eq!(a.admissible, b.admissible);
        if a.admissible {
            prop_assert_eq!(index_report(&model, &base).unwrap().ind, index_report(&model, &scaled).unwrap().ind);
        }
        // the sphere is admissible in every direction
        let s = CandidatePair::new(vec![lambda], vec![C64::from_polar(mu, phase)]);
        prop_assert!(check_admissible(&fixtures::sphere(), &s).unwrap().admissible);
    }
}
