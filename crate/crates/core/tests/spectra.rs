use std::f64::consts::PI;

use faer::Mat;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use whodge::discrete::assemble;
use whodge::fields::{parse_field, ScalarField};
use whodge::linalg::{eig_gen_sym, LinalgError};
use whodge::mesh::{generate, Shape};
use whodge::ops::ChartForm;
use whodge::spectra::*;

fn field(s: &str) -> ScalarField {
    parse_field(s).unwrap()
}

fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let g = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let mut b = &g * g.transpose();
    for i in 0..n {
        b[(i, i)] += n as f64 * 0.1;
    }
    b
}

/// Cyclic Jacobi eigenvalues of a symmetric matrix (independent oracle).
fn jacobi_eigenvalues(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn to_rows(m: &Mat<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

#[test]
fn eig_gen_sym_diagonal() {
    let a = Mat::from_fn(3, 3, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
    let b = Mat::<f64>::identity(3, 3);
    let pairs = eig_gen_sym(&a, &b, 3).unwrap();
    for (v, e) in pairs.values.iter().zip([1.0, 2.0, 3.0]) {
        assert!((v - e).abs() < 1e-14);
    }
}

#[test]
fn eig_gen_sym_equal_pencil() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = random_spd(40, &mut rng);
    let pairs = eig_gen_sym(&b, &b, 40).unwrap();
    assert!(pairs.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
}

#[test]
fn eig_gen_sym_rejects_indefinite_mass() {
    let a = Mat::<f64>::identity(2, 2);
    let b = Mat::from_fn(2, 2, |i, j| if i == j { if i == 0 { 1.0 } else { -1.0 } } else { 0.0 });
    assert!(matches!(eig_gen_sym(&a, &b, 2), Err(LinalgError::NotSpd)));
}

#[test]
fn eig_gen_sym_matches_jacobi_oracle() {
    let n = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let a = Mat::from_fn(n, n, |i, j| g[(i, j)] + g[(j, i)]);
    let b = random_spd(n, &mut rng);
    let pairs = eig_gen_sym(&a, &b, n).unwrap();

    // B^{-1/2} from the Jacobi eigendecomposition of B, then Jacobi on
    // B^{-1/2} A B^{-1/2}.
    let (bv, bq) = jacobi_eigenvalues(&to_rows(&b));
    let q = Mat::from_fn(n, n, |i, j| bq[i][j]);
    let s = Mat::from_fn(n, n, |i, j| if i == j { 1.0 / bv[i].sqrt() } else { 0.0 });
    let half = &q * &s * q.transpose();
    let c = &half * &a * &half;
    let c = Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let (mut oracle, _) = jacobi_eigenvalues(&to_rows(&c));
    oracle.sort_by(f64::total_cmp);
    let worst = pairs.values.iter().zip(&oracle).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-9, "max |dλ| = {worst:e}");
}

#[test]
fn sphere_coexact_spectrum_converges_to_two() {
    let mut errs = Vec::new();
    for level in 1..=3 {
        let k = generate(&Shape::Icosphere { level }).unwrap();
        let wc = assemble(&k, &ScalarField::zero(), 4).unwrap();
        let s = coexact_spectrum(&wc, 0, 4).unwrap();
        assert_eq!(s.zero_modes, 1);
        assert!(s.max_residual() <= RESIDUAL_TOL);
        errs.push((s.eigenvalues[0] - 2.0).abs());
        if level == 3 {
            // multiplicity 3 of the first eigenvalue 2, then 6
            assert!((s.eigenvalues[2] - s.eigenvalues[0]).abs() < 1e-2);
            assert!(s.eigenvalues[3] > 5.0);
        }
    }
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(errs[2] < 0.02);
}

#[test]
fn flat_torus_first_eigenvalue() {
    let k = generate(&Shape::flat_torus(32, 32)).unwrap();
    let wc = assemble(&k, &ScalarField::zero(), 4).unwrap();
    let s = coexact_spectrum(&wc, 0, 5).unwrap();
    let target = 4.0 * PI * PI;
    for v in &s.eigenvalues[..4] {
        assert!((v - target).abs() / target < 0.02, "{v}");
    }
    assert!(s.eigenvalues[4] > 1.5 * target);
}

#[test]
fn circle_spectrum() {
    let k = generate(&Shape::Circle { segments: 256 }).unwrap();
    let wc = assemble(&k, &ScalarField::zero(), 4).unwrap();
    let s = coexact_spectrum(&wc, 0, 4).unwrap();
    for (v, e) in s.eigenvalues.iter().zip([1.0, 1.0, 4.0, 4.0]) {
        assert!((v - e).abs() / e < 1e-3, "{v} vs {e}");
    }
}

#[test]
fn coexact_requires_closed_mesh() {
    let k = generate(&Shape::Disc { level: 1 }).unwrap();
    let wc = assemble(&k, &ScalarField::zero(), 4).unwrap();
    assert!(matches!(coexact_spectrum(&wc, 0, 3), Err(SpectraError::OpenMesh)));
}

#[test]
fn exact_spectrum_two_routes_agree_on_sphere() {
    let k = generate(&Shape::Icosphere { level: 1 }).unwrap();
    let wc = assemble(&k, &ScalarField::zero(), 4).unwrap();
    let ex = exact_spectrum(&wc, 1, 3, true).unwrap();
    assert!(ex.max_rel_diff.unwrap() < 1e-8);
    assert!((ex.via_duality.eigenvalues[0] - 2.0).abs() < 0.2);
    // exact eigenvectors are d of the co-exact ones
    let direct = ex.direct.unwrap();
    assert!(direct.max_residual() <= RESIDUAL_TOL);
}

#[test]
fn torus_duality_with_periodic_weight() {
    let k = generate(&Shape::flat_torus(8, 8)).unwrap();
    let wc = assemble(&k, &field("sin(2*pi*x1)"), 6).unwrap();
    let co = coexact_spectrum(&wc, 0, 1).unwrap().eigenvalues[0];
    let ex = exact_spectrum_direct(&wc, 1, 1).unwrap().eigenvalues[0];
    assert!((co - ex).abs() / co < 1e-8, "{co} {ex}");
}

#[test]
fn duality_first_identity_on_weighted_sphere() {
    let k = generate(&Shape::Icosphere { level: 1 }).unwrap();
    let wc = assemble(&k, &field("0.3*x1"), 4).unwrap();
    let r = check_duality(&wc).unwrap();
    assert_eq!(r.entries.len(), 4);
    assert!(r.identity_pass("p_to_p_plus_1"), "{:?}", r.entries);
}

#[test]
fn full_spectrum_counts_harmonic_forms() {
    let k = generate(&Shape::flat_torus(6, 6)).unwrap();
    let wc = assemble(&k, &ScalarField::zero(), 4).unwrap();
    let s = full_spectrum(&wc, 1, 4).unwrap();
    assert_eq!(s.zero_modes, 2);
    assert!(s.eigenvalues[0].abs() < 1e-9 && s.eigenvalues[1].abs() < 1e-9);
    assert!(s.eigenvalues[2] > 1.0);
}

#[test]
fn steklov_disc_matches_integers() {
    let k = generate(&Shape::Disc { level: 5 }).unwrap();
    let wc = assemble(&k, &ScalarField::zero(), 4).unwrap();
    let s = steklov_spectrum(&wc, 0, 5, SteklovOptions::default()).unwrap();
    assert!(s.eigenvalues[0].abs() < 1e-10);
    for (v, e) in s.eigenvalues[1..].iter().zip([1.0, 1.0, 2.0, 2.0]) {
        assert!((v - e).abs() / e < 0.02, "{v} vs {e}");
    }
    assert!(s.eigenvalues.iter().all(|v| *v >= -1e-10));
}

#[test]
fn steklov_ball_one_forms() {
    let k = generate(&Shape::Ball3 { level: 2 }).unwrap();
    let wc = assemble(&k, &ScalarField::zero(), 4).unwrap();
    let s = steklov_spectrum(&wc, 1, 3, SteklovOptions::default()).unwrap();
    assert_eq!(s.zero_modes, 0);
    assert!((s.eigenvalues[0] - 2.0).abs() / 2.0 < 0.05, "{:?}", s.eigenvalues);
}

#[test]
fn steklov_harmonic_flag_on_disc() {
    // p = 0 on the circle: the constants are the boundary-harmonic traces.
    let k = generate(&Shape::Disc { level: 3 }).unwrap();
    let wc = assemble(&k, &ScalarField::zero(), 4).unwrap();
    let with = steklov_spectrum(&wc, 0, 3, SteklovOptions { include_harmonic: true }).unwrap();
    let without = steklov_spectrum(&wc, 0, 3, SteklovOptions { include_harmonic: false }).unwrap();
    assert_eq!(with.coclosed_dim, without.coclosed_dim + 1);
    assert!((with.eigenvalues[1] - without.eigenvalues[0]).abs() < 1e-9);
}

#[test]
fn steklov_invariant_under_weight_shift() {
    let k = generate(&Shape::Disc { level: 3 }).unwrap();
    let a = steklov_spectrum(&assemble(&k, &field("0.3*x1"), 6).unwrap(), 0, 5, SteklovOptions::default()).unwrap();
    let b = steklov_spectrum(&assemble(&k, &field("0.3*x1+2"), 6).unwrap(), 0, 5, SteklovOptions::default()).unwrap();
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
    }
}

#[test]
fn steklov_requires_boundary() {
    let k = generate(&Shape::Icosphere { level: 0 }).unwrap();
    let wc = assemble(&k, &ScalarField::zero(), 4).unwrap();
    assert!(matches!(steklov_spectrum(&wc, 0, 3, SteklovOptions::default()), Err(SpectraError::NoBoundary)));
}

#[test]
fn boundary_exact_bound_unweighted_is_nearly_sharp() {
    let cfg = TheoremConfig { level: 3, ..Default::default() };
    let c = check_theorem(TheoremCase::BoundaryExact, &cfg).unwrap();
    assert_eq!(c.bound, 2.0);
    assert!(c.pass && c.margin.abs() / c.bound < 0.05, "{c:?}");
    assert_eq!(c.constants["sigma_p"].provenance, Provenance::Analytic);
}

#[test]
fn boundary_exact_bound_radial_weight() {
    let cfg = TheoremConfig { weight: field("0.5*r2/2"), ..Default::default() };
    let c = check_theorem(TheoremCase::BoundaryExact, &cfg).unwrap();
    assert!((c.constants["inf_f_N"].value + 0.5).abs() < 1e-12);
    assert!((c.bound - 1.5).abs() < 1e-12);
    assert!(c.pass && c.margin > 0.4);
}

#[test]
fn boundary_exact_bound_on_shell_violates_hypothesis() {
    let cfg = TheoremConfig { domain: TheoremDomain::Annulus3, ..Default::default() };
    match check_theorem(TheoremCase::BoundaryExact, &cfg) {
        Err(SpectraError::HypothesisViolated { constants, .. }) => assert_eq!(constants["sigma_p"].value, -2.0),
        other => panic!("{other:?}"),
    }
}

#[test]
fn concave_weight_violates_weitzenbock_hypothesis() {
    let cfg = TheoremConfig { weight: field("-r2"), ..Default::default() };
    assert!(matches!(
        check_theorem(TheoremCase::BoundaryExact, &cfg),
        Err(SpectraError::HypothesisViolated { .. })
    ));
}

#[test]
fn cohomology_vanishing_on_ball() {
    for p in 1..=2 {
        let cfg = TheoremConfig { p, potential: field("1+x1*x1/2"), ..Default::default() };
        match check_theorem(TheoremCase::CohomologyVanishing, &cfg) {
            Ok(c) => assert!(c.pass && c.computed == 0.0),
            Err(SpectraError::HypothesisViolated { .. }) => {}
            Err(e) => panic!("{e}"),
        }
    }
    let cfg = TheoremConfig { p: 1, ..Default::default() };
    assert!(check_theorem(TheoremCase::CohomologyVanishing, &cfg).unwrap().pass);
    let shell = TheoremConfig { p: 2, domain: TheoremDomain::Annulus3, ..Default::default() };
    assert!(matches!(
        check_theorem(TheoremCase::CohomologyVanishing, &shell),
        Err(SpectraError::HypothesisViolated { .. })
    ));
}

#[test]
fn steklov_lower_bound_equality_on_ball() {
    let c = check_theorem(TheoremCase::SteklovLower, &TheoremConfig::default()).unwrap();
    assert_eq!(c.bound, 2.0);
    assert!(c.pass && c.margin.abs() / 2.0 < 0.05, "{c:?}");
}

#[test]
fn steklov_upper_bound_with_linear_weight() {
    let cfg = TheoremConfig { weight: field("0.2*x1"), ..Default::default() };
    let c = check_theorem(TheoremCase::SteklovUpper, &cfg).unwrap();
    assert!((c.constants["factor"].value - 1.25).abs() < 1e-9);
    assert_eq!(c.details.len(), 5);
    assert!(c.pass && c.details.iter().all(|d| d.margin >= 0.0), "{:?}", c.details);
}

#[test]
fn sigma_p_values() {
    let ball = TheoremDomain::Ball3.flat();
    assert_eq!(sigma_p(&ball, 1).value, 1.0);
    assert_eq!(sigma_p(&ball, 2).value, 2.0);
    let shell = TheoremDomain::Annulus3.flat();
    assert_eq!(sigma_p(&shell, 1).value, -2.0);
    let v = inf_normal_derivative(&ball, &field("0.25*r2/2"), 50, 1).unwrap();
    assert!((v.value + 0.25).abs() < 1e-12 && v.provenance == Provenance::Sampled);
}

#[test]
fn lp_circle_equality_case() {
    let emb = EmbeddingData::new("circle".parse().unwrap(), ScalarField::zero()).unwrap();
    let c = lp_check(&emb, 1, 1, 256).unwrap();
    assert!((c.computed - c.bound).abs() < 1e-3, "{c:?}");
    assert!(c.pass);
    assert!((c.constants["eigenform_norm"].value - 1.0).abs() < 1e-10);
}

#[test]
fn lp_circle_linear_weight() {
    let emb = EmbeddingData::new("circle".parse().unwrap(), field("0.2*x1")).unwrap();
    for j in 1..=3 {
        let c = lp_check(&emb, 0, j, 128).unwrap();
        assert!(c.pass && c.margin > 0.0, "j={j}: {c:?}");
    }
}

#[test]
fn lp_sphere_one_forms() {
    let emb = EmbeddingData::new("sphere2".parse().unwrap(), ScalarField::zero()).unwrap();
    let c = lp_check(&emb, 1, 1, 2).unwrap();
    assert!(c.pass && c.margin > 0.0);
    assert_eq!(c.constants["weitzenbock"].value, 1.0);
}

#[test]
fn lp_torus_passes() {
    let emb = EmbeddingData::new("clifford_torus".parse().unwrap(), field("0.2*x1")).unwrap();
    for j in [1, 2] {
        let c = lp_check(&emb, 1, j, 12).unwrap();
        assert!(c.pass && c.margin >= 0.0, "{c:?}");
    }
}

#[test]
fn lp_errors() {
    let s2 = EmbeddingData::new("sphere2".parse().unwrap(), ScalarField::zero()).unwrap();
    assert!(matches!(lp_check(&s2, 2, 1, 1), Err(SpectraError::CurvatureUnavailable(_))));
    assert!(matches!(
        EmbeddingData::new("sphere2(2)".parse().unwrap(), ScalarField::zero()),
        Err(SpectraError::UnsupportedEmbedding(_))
    ));
    assert!("klein_bottle".parse::<Embedding>().is_err());
}

#[test]
fn trace_identities_circle() {
    let emb = EmbeddingData::new("circle".parse().unwrap(), ScalarField::zero()).unwrap();
    let omega = ChartForm::zero(1, 1).with(&[0], field("cos(x1)+2"));
    let pts = emb.sample_points(20, 1);
    let r = trace_identities(&emb, &omega, &pts).unwrap();
    assert!(r.laplacian_residual < 1e-12 && r.gradient_residual < 1e-12, "{r:?}");
}

#[test]
fn trace_identities_all_embeddings() {
    let cases = [
        ("circle(2)", "0.3*x2", ChartForm::zero(0, 1).with(&[], field("sin(x1)"))),
        ("clifford_torus", "0.2*x1", ChartForm::zero(1, 2).with(&[0], field("sin(x1)*x2")).with(&[1], field("cos(x2)"))),
        ("clifford_torus", "x1*x3", ChartForm::zero(2, 2).with(&[0, 1], field("1+sin(x1)*cos(x2)"))),
        ("sphere2", "0.3*x3+x1*x2", ChartForm::zero(1, 2).with(&[0], field("x1*x2")).with(&[1], field("sin(x1)^2"))),
    ];
    for (e, w, omega) in cases {
        let emb = EmbeddingData::new(e.parse().unwrap(), field(w)).unwrap();
        let pts = emb.sample_points(25, 2);
        let r = trace_identities(&emb, &omega, &pts).unwrap();
        assert!(r.gradient_residual < 1e-12, "{e}: {r:?}");
        assert!(r.max_residual < 1e-9, "{e}: {r:?}");
    }
}

#[test]
fn richardson_removes_quadratic_error() {
    let v = |h: f64| 2.0 + 0.7 * h * h;
    let r = richardson(0.2, v(0.2), 0.1, v(0.1), 2.0);
    assert!((r - 2.0).abs() < 1e-13);
}

#[test]
fn circle_sweep_converges_monotonically() {
    let rows = convergence_sweep(&Shape::Circle { segments: 16 }, &[0, 1, 2, 3], 0, 5, &ScalarField::zero(), 4).unwrap();
    let exact = [1.0, 1.0, 4.0, 4.0, 9.0];
    for i in 0..5 {
        let errs: Vec<f64> = rows.iter().map(|r| (r.eigenvalues[i] - exact[i]).abs()).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{i}: {errs:?}");
        let diffs: Vec<f64> = rows.windows(2).map(|w| (w[1].eigenvalues[i] - w[0].eigenvalues[i]).abs()).collect();
        assert!(diffs.windows(2).all(|w| w[1] < w[0]));
    }
    let csv = sweep_csv(&rows, 5);
    assert!(csv.starts_with("level,h,lambda_1,lambda_2,lambda_3,lambda_4,lambda_5\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn theorem_check_serializes() {
    let c = check_theorem(TheoremCase::SteklovLower, &TheoremConfig { level: 1, ..Default::default() }).unwrap();
    let js = serde_json::to_value(&c).unwrap();
    assert_eq!(js["theorem_id"], "thm1.5");
    assert_eq!(js["constants"]["c"]["provenance"], "analytic");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn coexact_spectrum_invariant_under_weight_shift(a in -0.5f64..0.5, c in -3.0f64..3.0) {
        let k = generate(&Shape::Icosphere { level: 1 }).unwrap();
        let f = ScalarField::constant(a) * ScalarField::coord(2);
        let s0 = coexact_spectrum(&assemble(&k, &f, 4).unwrap(), 0, 5).unwrap();
        let s1 = coexact_spectrum(&assemble(&k, &(f + ScalarField::constant(c)), 4).unwrap(), 0, 5).unwrap();
        for (x, y) in s0.eigenvalues.iter().zip(&s1.eigenvalues) {
            prop_assert!((x - y).abs() <= 1e-10 * x.abs());
        }
    }

    #[test]
    fn reported_pairs_meet_residual_bound(a in -0.5f64..0.5) {
        let k = generate(&Shape::flat_torus(5, 5)).unwrap();
        let f = ScalarField::constant(a) * (ScalarField::constant(2.0 * PI) * ScalarField::coord(0)).sin();
        let wc = assemble(&k, &f, 6).unwrap();
        for p in 0..=2 {
            let s = full_spectrum(&wc, p, 6).unwrap();
            prop_assert!(s.max_residual() <= RESIDUAL_TOL);
            prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
