use proptest::prelude::*;
use whodge::fields::{parse_field, FlatDomain, PFormField, ScalarField};
use whodge::identity::*;
use whodge::ops::flat::{self, FormJet2};
use whodge::random::Sampler;

fn sf(s: &str) -> ScalarField {
    parse_field(s).unwrap()
}

fn pts(domain: &FlatDomain, n: usize, seed: u64) -> Vec<Vec<f64>> {
    Sampler::new(seed).points(domain, n)
}

fn b2() -> FlatDomain {
    FlatDomain::ball(1.0, 2)
}

fn b3() -> FlatDomain {
    FlatDomain::ball(1.0, 3)
}

fn shell3() -> FlatDomain {
    FlatDomain::annulus(0.5, 1.0, 3)
}

#[test]
fn bochner_examples() {
    let p = pts(&b2(), 50, 1);
    let c = PFormField::zero(1, 2).with(&[0], sf("2")).with(&[1], sf("-1"));
    let r = check_bochner(&c, &ScalarField::zero(), &p).unwrap();
    assert_eq!(r.abs_residual, 0.0);
    let w = PFormField::zero(1, 2).with(&[1], sf("x1^2"));
    let r = check_bochner(&w, &sf("x1 + x2"), &p).unwrap();
    assert!(r.abs_residual < 1e-11 && r.pass, "{r:?}");
    let du = PFormField::differential(3, &sf("x1*x2^2 + sin(x3)"));
    let r = check_bochner(&du, &sf("r2/2"), &pts(&b3(), 50, 2)).unwrap();
    assert!(r.abs_residual < 1e-11);
}

#[test]
fn scalar_bochner_hand_case() {
    let w = PFormField::zero(1, 2).with(&[1], sf("x1"));
    let p = vec![vec![0.3, -0.2]];
    let r = check_scalar_bochner(&w, &ScalarField::zero(), &p).unwrap();
    assert!((r.lhs - 1.0).abs() < 1e-15 && (r.rhs - 1.0).abs() < 1e-15);
    assert!(r.abs_residual < 1e-15);
    let c = PFormField::zero(2, 3).with(&[0, 2], sf("3"));
    assert_eq!(check_scalar_bochner(&c, &ScalarField::zero(), &p.iter().map(|_| vec![0.1, 0.2, 0.3]).collect::<Vec<_>>()).unwrap().abs_residual, 0.0);
}

#[test]
fn commutator_examples() {
    let p = pts(&b2(), 20, 3);
    let dy = PFormField::zero(1, 2).with(&[1], ScalarField::one());
    let r = check_commutator(&sf("x1"), &dy, &ScalarField::zero(), &p).unwrap();
    assert_eq!((r.lhs, r.rhs, r.abs_residual), (0.0, 0.0, 0.0));
    let r = check_commutator(&sf("7"), &dy, &sf("x1*x2"), &p).unwrap();
    assert_eq!(r.abs_residual, 0.0);
}

#[test]
fn green_examples() {
    let w = PFormField::scalar(2, sf("x1"));
    let psi = PFormField::zero(1, 2).with(&[0], ScalarField::one());
    let r = check_green(&w, &psi, &ScalarField::zero(), &b2(), 12).unwrap();
    assert!((r.lhs - std::f64::consts::PI).abs() < 1e-12);
    assert!(r.abs_residual < 1e-12);
    let zero = PFormField::zero(1, 2);
    let r = check_green(&w, &zero, &ScalarField::zero(), &b2(), 8).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    let mut s = Sampler::new(11);
    let (w, psi) = (s.form(1, 3, 2), s.form(2, 3, 2));
    let r = check_green(&w, &psi, &sf("r2/4"), &shell3(), 14).unwrap();
    assert!(r.rel_residual < 1e-9, "{r:?}");
}

#[test]
fn green_laplacian_examples() {
    let c = PFormField::zero(1, 2).with(&[0], sf("1.5"));
    let r = check_green_laplacian(&c, &ScalarField::zero(), &b2(), 8).unwrap();
    assert!(r.lhs.abs() < 1e-15 && r.rhs.abs() < 1e-15);
    let w = PFormField::zero(1, 2).with(&[1], sf("x1"));
    let r = check_green_laplacian(&w, &ScalarField::zero(), &b2(), 12).unwrap();
    assert!((r.lhs - std::f64::consts::PI).abs() < 1e-12);
    assert!(r.abs_residual < 1e-12);
    let w = Sampler::new(5).form(1, 3, 2);
    let r = check_green_laplacian(&w, &sf("r2/4 + 0.3*x1"), &b3(), 14).unwrap();
    assert!(r.rel_residual < 1e-9, "{r:?}");
}

#[test]
fn boundary_split_examples() {
    // J*ω = dθ, i_Nω = 0 on the unit circle.
    let w = PFormField::zero(1, 2).with(&[0], sf("-x2")).with(&[1], sf("x1"));
    let mut s = Sampler::new(9);
    let p: Vec<Vec<f64>> = (0..20).map(|_| s.sphere_point(2, 1.0, 0.0)).collect();
    let r = check_boundary_split(&w, &ScalarField::zero(), &b2(), &p).unwrap();
    assert!(r.abs_residual < 1e-9, "{r:?}");

    let dz = PFormField::zero(1, 3).with(&[2], ScalarField::one());
    let p: Vec<Vec<f64>> = (0..20).map(|_| s.sphere_point(3, 1.0, 0.05)).collect();
    let r = check_boundary_split(&dz, &ScalarField::zero(), &b3(), &p).unwrap();
    assert!(r.abs_residual < 1e-9, "{r:?}");

    for deg in 1..=3 {
        let w = s.form(deg, 3, 3);
        let f = s.polynomial(3, 2);
        let r = check_boundary_split(&w, &f, &b3(), &p).unwrap();
        assert!(r.abs_residual < 1e-8, "degree {deg}: {r:?}");
    }
    // Inner sphere of a shell, where the curvature is negative.
    let inner: Vec<Vec<f64>> = (0..10).map(|_| s.sphere_point(3, 0.5, 0.05)).collect();
    let w = s.form(2, 3, 2);
    let r = check_boundary_split(&w, &sf("r2/4"), &shell3(), &inner).unwrap();
    assert!(r.abs_residual < 1e-8, "{r:?}");
}

#[test]
fn reilly_examples() {
    let zero = PFormField::zero(1, 3);
    let r = check_reilly(&zero, &ScalarField::zero(), &ScalarField::one(), &b3(), 8).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    // Classical case for functions: f constant, V = 1, ω = du.
    let du = PFormField::differential(2, &sf("x1^3 - x1*x2 + x2^4"));
    let r = check_reilly(&du, &sf("0.7"), &ScalarField::one(), &b2(), 14).unwrap();
    assert!(r.abs_residual < 1e-10, "{r:?}");
    assert_eq!(r.terms["interior_cross"], 0.0);
    let w = PFormField::zero(1, 3).with(&[1], sf("x1")).with(&[0], sf("x3^2"));
    let r = check_reilly(&w, &sf("r2/4"), &sf("1 + x1^2/2"), &b3(), 12).unwrap();
    assert!(r.rel_residual < 1e-8 && r.pass, "{r:?}");
}

#[test]
fn reilly_weight_shift_scales_terms() {
    let mut s = Sampler::new(21);
    let w = s.form(2, 3, 2);
    let f = sf("r2/4 + 0.2*x2");
    let v = s.positive_potential(3);
    let a = check_reilly(&w, &f, &v, &b3(), 12).unwrap();
    let c = 0.8;
    let b = check_reilly(&w, &(f.clone() + ScalarField::constant(c)), &v, &b3(), 12).unwrap();
    let e = (-c as f64).exp();
    assert!((b.lhs - e * a.lhs).abs() < 1e-12 * a.lhs.abs().max(1.0));
    for (k, t) in &a.terms {
        assert!((b.terms[k] - e * t).abs() < 1e-12 * t.abs().max(1.0), "{k}");
    }
    assert!(a.rel_residual < 1e-8 && b.rel_residual < 1e-8);
}

#[test]
fn pohozhaev_examples() {
    let pos: Vec<ScalarField> = (0..2).map(ScalarField::coord).collect();
    let w = PFormField::zero(1, 2).with(&[1], sf("x1"));
    let r = check_pohozhaev(&w, &pos, &ScalarField::zero(), &b2(), 12).unwrap();
    assert!(r.abs_residual < 1e-10, "{r:?}");
    let closed = PFormField::differential(2, &sf("x1*x2"));
    let r = check_pohozhaev(&closed, &pos, &sf("x1"), &b2(), 10).unwrap();
    assert!(r.lhs.abs() < 1e-13 && r.rhs.abs() < 1e-13);
    let mut s = Sampler::new(4);
    let (w, fld) = (s.form(1, 3, 2), s.vector_field(3, 2));
    let r = check_pohozhaev(&w, &fld, &sf("r2/4 - 0.5*x3"), &b3(), 14).unwrap();
    assert!(r.rel_residual < 1e-8, "{r:?}");
}

#[test]
fn weighted_divergence_sign() {
    // div_f(∇u) = −Δ_f u = Σu_AA − ⟨∇f,∇u⟩, checked against the δ_f path.
    let u = sf("x1^2*x2 + cos(x2)");
    let f = sf("x1 + r2");
    let x = [0.3, -0.4];
    let fj = f.jet(&x).unwrap();
    let uj = u.jet(&x).unwrap();
    let div: f64 = (0..2).map(|a| uj.hess(a, a) - fj.d(a) * uj.d(a)).sum();
    let du = PFormField::differential(2, &u);
    let delta = flat::codiff(&FormJet2::of(&du, &x).unwrap().first(), fj.grad());
    assert!((div + delta.get(&[])).abs() < 1e-13);
}

#[test]
fn report_invariant_and_csv() {
    let r = IdentityReport::new("x", "d", 3.0, -2.0, 0.5);
    assert_eq!(r.rel_residual, 0.5 / 3.0);
    let r = IdentityReport::new("x", "d", 0.1, 0.2, 0.5);
    assert_eq!(r.rel_residual, 0.5);
    assert_eq!(r.csv_row().split(',').count(), IdentityReport::CSV_HEADER.split(',').count());
}

fn dims_and_degrees() -> impl Strategy<Value = (usize, usize, u64)> {
    (2usize..=3).prop_flat_map(|d| (Just(d), 0..=d, any::<u64>()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn d_squared_and_codiff_squared_vanish((dim, p, seed) in dims_and_degrees()) {
        let mut s = Sampler::new(seed);
        let w = s.form(p, dim, 3);
        let f = s.polynomial(dim, 2);
        let x = s.interior_point(&FormValueDomain::ball(dim));
        let j = FormJet2::of(&w, &x).unwrap();
        if p + 2 <= dim {
            let dd = flat::d(&flat::d_jet(&j));
            prop_assert!(dd.max_abs() < 1e-12);
        }
        if p >= 2 {
            let fj = f.jet(&x).unwrap();
            let dd = flat::codiff(&flat::codiff_jet(&j, &fj), fj.grad());
            prop_assert!(dd.max_abs() < 1e-12 * (1.0 + j.value.max_abs()));
        }
    }

    #[test]
    fn pointwise_identities_hold((dim, p, seed) in dims_and_degrees()) {
        let mut s = Sampler::new(seed);
        let w = s.form(p, dim, 3);
        let f = s.polynomial(dim, 3);
        let g = s.polynomial(dim, 2);
        let v = s.positive_potential(dim);
        let fld = s.vector_field(dim, 2);
        let domain = FlatDomain::ball(1.0, dim);
        let points = s.points(&domain, 10);
        let tol = 1e-11;
        prop_assert!(check_bochner(&w, &f, &points).unwrap().rel_residual < tol);
        prop_assert!(check_scalar_bochner(&w, &f, &points).unwrap().rel_residual < tol);
        prop_assert!(check_commutator(&g, &w, &f, &points).unwrap().rel_residual < 1e-10);
        prop_assert!(check_cartan(&w, &f, &points).unwrap().rel_residual < tol);
        if p >= 1 {
            prop_assert!(check_contraction(&w, &fld, &points).unwrap().rel_residual < tol);
        }
        if p < dim {
            prop_assert!(check_wedge_interior(&v, &w, &f, &points).unwrap().rel_residual < tol);
            prop_assert!(check_wedge_codiff(&v, &w, &f, &points).unwrap().rel_residual < tol);
        }
    }
}

#[test]
fn integral_suite_on_random_polynomials() {
    let mut s = Sampler::new(2024);
    for domain in [b2(), b3(), FlatDomain::annulus(0.4, 1.0, 2), shell3()] {
        let dim = domain.dim();
        for p in 0..=dim {
            let w = s.form(p, dim, 2);
            let f = s.polynomial(dim, 2);
            let v = s.positive_potential(dim);
            let r = check_reilly(&w, &f, &v, &domain, 30).unwrap();
            assert!(r.rel_residual < 1e-8, "{} p={p}: {r:?}", domain.descriptor());
            let b = r.terms["boundary_b_f_mean_curvature"] - r.terms["boundary_b_f_star"];
            assert!(b.abs() < 1e-10);
            let r = check_green_laplacian(&w, &f, &domain, 30).unwrap();
            assert!(r.rel_residual < 1e-8, "{r:?}");
            if p < dim {
                let psi = s.form(p + 1, dim, 2);
                let r = check_green(&w, &psi, &f, &domain, 30).unwrap();
                assert!(r.rel_residual < 1e-8, "{r:?}");
                let fld = s.vector_field(dim, 1);
                let r = check_pohozhaev(&w, &fld, &f, &domain, 30).unwrap();
                assert!(r.rel_residual < 1e-8, "{r:?}");
            }
        }
    }
}

struct FormValueDomain;
impl FormValueDomain {
    fn ball(dim: usize) -> FlatDomain {
        FlatDomain::ball(1.0, dim)
    }
}
