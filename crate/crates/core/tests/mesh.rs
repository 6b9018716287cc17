use proptest::prelude::*;
use whodge::mesh::*;

fn dd_zero(k: &SimplicialComplex) -> bool {
    (0 + 1..k.top_dim()).all(|p| k.coboundary(p).compose(k.coboundary(p - 1)).iter().all(|r| r.is_empty()))
}

fn chi_from_betti(b: &[usize]) -> i64 {
    b.iter().enumerate().map(|(i, &x)| if i % 2 == 0 { x as i64 } else { -(x as i64) }).sum()
}

fn shape(s: &str) -> SimplicialComplex {
    generate(&s.parse().unwrap()).unwrap()
}

#[test]
fn single_triangle_dd_zero() {
    let k = build_complex(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], &[vec![0, 1, 2]]).unwrap();
    let dd = k.coboundary(1).compose(k.coboundary(0));
    assert_eq!(dd.len(), 1);
    assert!(dd[0].is_empty());
}

#[test]
fn single_tetrahedron_euler_one() {
    let v = vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
    let k = build_complex(3, v, &[vec![0, 1, 2, 3]]).unwrap();
    assert_eq!(k.euler_characteristic(), 1);
    assert_eq!(betti(&k), vec![1, 0, 0, 0]);
    assert!(dd_zero(&k));
}

#[test]
fn periodic_grid_euler_zero() {
    let k = shape("flat_torus(8,8)");
    assert_eq!(k.euler_characteristic(), 0);
    let k = shape("flat_torus(4,4)");
    assert_eq!((k.count(0), k.count(1), k.count(2)), (16, 48, 32));
    assert_eq!(betti(&k), vec![1, 2, 1]);
}

#[test]
fn nonmanifold_and_nonorientable_rejected() {
    let v = vec![vec![0.0; 2]; 5];
    let e = build_complex(2, v, &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 1, 4]]).unwrap_err();
    assert_eq!(e, MeshError::NonManifold(vec![0, 1]));

    // Five-vertex Möbius strip.
    let v = vec![vec![0.0; 3]; 5];
    let tris = vec![vec![0, 1, 2], vec![1, 2, 3], vec![2, 3, 4], vec![3, 4, 0], vec![4, 0, 1]];
    assert_eq!(build_complex(3, v, &tris).unwrap_err(), MeshError::NonOrientable);
}

#[test]
fn icosphere_counts_and_norms() {
    let k = shape("icosphere(0)");
    assert_eq!((k.count(0), k.count(2)), (12, 20));
    let r = refine(&k);
    assert_eq!((r.count(0), r.count(2)), (42, 80));
    for v in r.vertices() {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() <= 1e-14);
    }
    for l in 0..3 {
        assert_eq!(betti(&shape(&format!("icosphere({l})"))), vec![1, 0, 1]);
    }
}

#[test]
fn circle_perimeter() {
    let k = shape("circle(6)");
    assert_eq!(k.count(1), 6);
    let len: f64 = k
        .simplices(1)
        .iter()
        .map(|e| {
            let (a, b) = (&k.vertices()[e[0]], &k.vertices()[e[1]]);
            ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
        })
        .sum();
    assert!((len - 6.0).abs() < 1e-14);
    for v in k.vertices() {
        assert!((v[0].hypot(v[1]) - 1.0).abs() <= 1e-14);
    }
    assert_eq!(betti(&k), vec![1, 1]);
}

#[test]
fn disc_boundary_is_rim_polygon() {
    let k = shape("disc(2)");
    let b = boundary_complex(&k).unwrap();
    let rim = k.vertices().iter().filter(|v| (v[0].hypot(v[1]) - 1.0).abs() < 1e-12).count();
    assert_eq!(b.boundary.count(0), rim);
    assert_eq!(b.boundary.count(1), rim);
    assert_eq!(betti(&b.boundary), vec![1, 1]);
    assert!(boundary_complex(&b.boundary).unwrap().is_empty());
}

#[test]
fn ball3_boundary_is_sphere() {
    for l in 0..2 {
        let k = shape(&format!("ball3({l})"));
        assert_eq!(betti(&k), vec![1, 0, 0, 0]);
        let b = boundary_complex(&k).unwrap();
        assert_eq!(b.boundary.euler_characteristic(), 2);
        assert_eq!(b.boundary.count(2), 20 * 4usize.pow(l as u32));
        for v in b.boundary.vertices() {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-14);
        }
        assert!(boundary_complex(&b.boundary).unwrap().is_empty());
    }
}

#[test]
fn torus_boundary_empty() {
    assert!(boundary_complex(&shape("flat_torus(4,5)")).unwrap().is_empty());
}

#[test]
fn shell_boundary_two_spheres() {
    let k = shell3(0, 0.5, 1.0, 2).unwrap();
    assert_eq!(betti(&k), vec![1, 0, 1, 0]);
    let b = boundary_complex(&k).unwrap();
    assert_eq!(betti(&b.boundary), vec![2, 0, 2]);
    let r = refine(&k);
    assert_eq!(betti(&r), vec![1, 0, 1, 0]);
}

#[test]
fn inner_normals_point_inward() {
    for s in ["interval(3)", "disc(1)", "ball3(1)"] {
        let k = shape(s);
        let b = boundary_complex(&k).unwrap();
        let n = k.top_dim();
        for (f, nrm) in b.inner_normal.iter().enumerate() {
            assert!((nrm.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
            let facet: Vec<usize> =
                b.boundary.simplices(n - 1)[f].iter().map(|&v| b.inclusion[0][v]).collect();
            let cell = &k.simplices(n)[b.incident_cell[f]];
            let bc = |s: &[usize]| -> Vec<f64> {
                (0..k.ambient_dim()).map(|a| s.iter().map(|&v| k.vertices()[v][a]).sum::<f64>() / s.len() as f64).collect()
            };
            let (cb, fb) = (bc(cell), bc(&facet));
            let dot: f64 = nrm.iter().zip(cb.iter().zip(&fb)).map(|(n, (c, f))| n * (c - f)).sum();
            assert!(dot > 0.0);
            // On the unit ball the inner normal points toward the origin.
            let radial: f64 = nrm.iter().zip(&fb).map(|(n, x)| n * x).sum();
            assert!(radial < 0.0);
        }
    }
}

#[test]
fn refinement_multiplies_cells() {
    for (s, factor) in [("interval(2)", 2), ("circle(5)", 2), ("disc(0)", 4), ("flat_torus(3,4)", 4), ("ball3(0)", 8)] {
        let k = shape(s);
        let n = k.top_dim();
        let r = refine(&k);
        assert_eq!(r.count(n), factor * k.count(n), "{s}");
        assert_eq!(r.euler_characteristic(), k.euler_characteristic(), "{s}");
        assert_eq!(betti(&r), betti(&k), "{s}");
        assert!(dd_zero(&r));
    }
}

#[test]
fn dump_roundtrip_bit_exact() {
    for s in ["interval(3)", "circle(7)", "disc(1)", "icosphere(1)", "ball3(1)", "flat_torus(3,5,2.5,0.3)"] {
        let k = shape(s);
        let text = dump_mesh(&k);
        let back = load_mesh(&text).unwrap();
        assert_eq!(dump_mesh(&back), text, "{s}");
        for (a, b) in k.vertices().iter().zip(back.vertices()) {
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        assert_eq!(back.orientations(), k.orientations());
        assert_eq!(back.kind(), k.kind());
    }
}

#[test]
fn load_reports_line_numbers() {
    let e = load_mesh("dim 2 2\nv 0 0\nv 1 x\n").unwrap_err();
    assert!(matches!(e, MeshError::Format { line: 3, .. }));
    assert!(matches!("blob(3)".parse::<Shape>(), Err(MeshError::UnsupportedShape(_))));
}

#[test]
fn exact_rank_handles_large_entries() {
    let rows = vec![vec![(0, i64::MAX / 3), (1, 7)], vec![(0, 5), (1, i64::MAX / 5)], vec![(0, 1), (1, 1)]];
    assert_eq!(rank_exact(&rows), 2);
    assert_eq!(rank_exact(&[vec![(0, 2), (1, 4)], vec![(0, 3), (1, 6)]]), 1);
}

fn generated() -> impl Strategy<Value = String> {
    prop_oneof![
        (1usize..6).prop_map(|n| format!("interval({n})")),
        (3usize..9).prop_map(|n| format!("circle({n})")),
        (0usize..2).prop_map(|n| format!("disc({n})")),
        (0usize..2).prop_map(|n| format!("icosphere({n})")),
        Just("ball3(0)".to_string()),
        (3usize..6, 3usize..6).prop_map(|(a, b)| format!("flat_torus({a},{b})")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invariants_hold_across_refinement(s in generated()) {
        let k = shape(&s);
        let r = refine(&k);
        prop_assert!(dd_zero(&k) && dd_zero(&r));
        let (bk, br) = (betti(&k), betti(&r));
        prop_assert_eq!(&bk, &br);
        prop_assert_eq!(chi_from_betti(&bk), k.euler_characteristic());
        prop_assert_eq!(r.euler_characteristic(), k.euler_characteristic());
        // Every ridge bounds one or two cells.
        let n = k.top_dim();
        let d = r.coboundary(n - 1);
        let mut count = vec![0usize; d.ncols];
        for row in &d.rows { for &(c, _) in row { count[c] += 1; } }
        prop_assert!(count.iter().all(|&c| c == 1 || c == 2));
    }

    #[test]
    fn relabeled_input_gives_same_betti(seed in 0u64..1000) {
        use rand::{seq::SliceRandom, SeedableRng};
        let k = shape("disc(1)");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut perm: Vec<usize> = (0..k.count(0)).collect();
        perm.shuffle(&mut rng);
        let mut verts = vec![vec![]; k.count(0)];
        for (old, &new) in perm.iter().enumerate() { verts[new] = k.vertices()[old].clone(); }
        let mut tris: Vec<Vec<usize>> = k.simplices(2).iter().map(|t| t.iter().map(|&v| perm[v]).collect()).collect();
        tris.shuffle(&mut rng);
        let j = build_complex(2, verts, &tris).unwrap();
        prop_assert_eq!(betti(&j), vec![1, 0, 0]);
        prop_assert_eq!(j.euler_characteristic(), 1);
    }
}
