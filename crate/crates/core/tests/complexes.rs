use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use systole_core::cocycle::{
    alternative_edge_lengths, classify_sl2, coboundary, develop, embed_sl2_as_lorentz, eval_path, verify_cocycle,
    BoundaryPoint, LorentzGroup, Sl2Class, Sl2cGroup,
};
use systole_core::hyperboloid::{apply_matrix, hyp_distance, HyperboloidPoint, LorentzMatrix};
use systole_core::linalg::Matrix;
use systole_core::polysys::{
    build_closed_system, build_cusped_system, closed_bounds, complexity_profile, eval_residuals, lorentz_assignment,
    parse_system, ResidualThresholds, SystemFormat,
};
use systole_core::sampling::{random_closed_triangulation, random_lorentz, random_rotation, random_sl2c};
use systole_core::triangulation::{base_tree, census, star_link, SimplicialPath, Triangulation};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn lorentz_family(r: &mut ChaCha8Rng, tri: &Triangulation, n: usize) -> BTreeMap<usize, Matrix<f64>> {
    (0..tri.vertex_count()).map(|v| (v, random_lorentz(r, n, 1.0))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triangulation_parse_is_canonical(seed in any::<u64>(), n in 2usize..5, steps in 0usize..6) {
        let mut r = rng(seed);
        let tri = random_closed_triangulation(&mut r, n, steps);
        let mut shuffled = tri.simplices().to_vec();
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, r.random_range(0..=i));
        }
        let text = serde_json::json!({
            "format": "tri-v1", "dimension": n, "vertices": tri.vertex_count(), "simplices": shuffled
        })
        .to_string();
        let once = Triangulation::parse(&text).unwrap();
        let twice = Triangulation::parse(&once.to_json()).unwrap();
        prop_assert_eq!(once.to_json(), twice.to_json());
        prop_assert_eq!(&once, &tri);
        prop_assert!(census(&tri).bounds_hold);
    }

    #[test]
    fn base_trees_and_links_are_consistent(seed in any::<u64>(), steps in 0usize..6) {
        let mut r = rng(seed);
        let tri = random_closed_triangulation(&mut r, 3, steps);
        let b = r.random_range(0..tri.vertex_count());
        let a = serde_json::to_string(&base_tree(&tri, b).unwrap()).unwrap();
        prop_assert_eq!(a, serde_json::to_string(&base_tree(&tri, b).unwrap()).unwrap());
        for v in 0..tri.vertex_count() {
            let sl = star_link(&tri, v).unwrap();
            let direct: BTreeSet<Vec<usize>> =
                sl.star.simplices().iter().filter(|s| !s.contains(&v)).cloned().collect();
            prop_assert_eq!(sl.link.simplices(), &direct);
            // Links in a closed 3-manifold are 2-spheres.
            prop_assert_eq!(sl.link.euler_characteristic(), 2);
        }
    }

    #[test]
    fn coboundaries_are_cocycles(seed in any::<u64>(), steps in 0usize..5) {
        let mut r = rng(seed);
        for n in [3usize, 4] {
            let tri = random_closed_triangulation(&mut r, n, steps);
            let alpha = coboundary(&tri, LorentzGroup::new(n), &lorentz_family(&mut r, &tri, n)).unwrap();
            let rep = verify_cocycle(&tri, &alpha, 1e-9).unwrap();
            prop_assert!(rep.passes, "n={n}: {}", rep.max_face_residual);
        }
        let tri = random_closed_triangulation(&mut r, 3, steps);
        let g: BTreeMap<_, _> = (0..tri.vertex_count()).map(|v| (v, random_sl2c(&mut r, 0.7))).collect();
        let alpha = coboundary(&tri, Sl2cGroup::new(), &g).unwrap();
        prop_assert!(verify_cocycle(&tri, &alpha, 1e-9).unwrap().passes);
    }

    #[test]
    fn paths_are_invariant_under_face_homotopy(seed in any::<u64>(), steps in 0usize..5) {
        let mut r = rng(seed);
        let tri = random_closed_triangulation(&mut r, 3, steps);
        let alpha = coboundary(&tri, LorentzGroup::new(3), &lorentz_family(&mut r, &tri, 3)).unwrap();
        for &[a, b, c] in tri.faces() {
            for (u, v, w) in [(a, b, c), (c, a, b), (b, c, a), (c, b, a)] {
                let long = eval_path(&alpha, &SimplicialPath::from_vertices(&[u, v, w])).unwrap();
                let short = eval_path(&alpha, &SimplicialPath::from_vertices(&[u, w])).unwrap();
                prop_assert!(long.max_abs_diff(&short) <= 1e-9 * long.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn development_of_coboundaries(seed in any::<u64>(), steps in 0usize..5, n in 3usize..5) {
        let mut r = rng(seed);
        let tri = random_closed_triangulation(&mut r, n, steps);
        let mut g = lorentz_family(&mut r, &tri, n);
        g.insert(0, Matrix::identity(n + 1));
        let alpha = coboundary(&tri, LorentzGroup::new(n), &g).unwrap();
        let dev = develop(&tri, &alpha, &base_tree(&tri, 0).unwrap(), 1e-9).unwrap();
        let o = HyperboloidPoint::basepoint(n);
        for (v, img) in &dev.vertex_images {
            let want = apply_matrix(&g[v], &o).unwrap();
            prop_assert!(hyp_distance(img, &want).unwrap() <= 1e-9 * (1.0 + want.coords()[n]));
        }
        let alt = alternative_edge_lengths(&tri, &alpha).unwrap();
        for (e, d) in &dev.edge_lengths {
            prop_assert!((alt[e] - d.distance).abs() <= 1e-9 * d.distance.max(1.0));
        }

        // Conjugating by a rotation moves images by its inverse and keeps lengths.
        let rot = LorentzMatrix::from_rotation(&random_rotation(&mut r, n)).into_matrix();
        let conj = alpha.conjugate(&rot);
        let dev2 = develop(&tri, &conj, &base_tree(&tri, 0).unwrap(), 1e-9).unwrap();
        let inv = LorentzMatrix::new(rot.clone(), 1e-9).unwrap().inverse().into_matrix();
        for (v, img) in &dev2.vertex_images {
            let want = apply_matrix(&inv, &dev.vertex_images[v]).unwrap();
            prop_assert!(hyp_distance(img, &want).unwrap() <= 1e-7);
        }
        for (e, d) in &dev2.edge_lengths {
            prop_assert!((dev.edge_lengths[e].distance - d.distance).abs() <= 1e-9 * d.distance.max(1.0));
        }
    }

    #[test]
    fn closed_systems_respect_complexity_bounds(seed in any::<u64>(), steps in 0usize..4) {
        let mut r = rng(seed);
        let tri = random_closed_triangulation(&mut r, 3, steps);
        let sys = build_closed_system(&tri, 3).unwrap();
        let profile = complexity_profile(&sys);
        prop_assert!(closed_bounds(&profile, 3, tri.t()).holds, "{profile:?}");
        prop_assert!(profile.m <= 2.0);
    }

    #[test]
    fn emission_round_trips(seed in any::<u64>(), steps in 0usize..3) {
        let mut r = rng(seed);
        let tri = random_closed_triangulation(&mut r, 3, steps);
        let sys = build_closed_system(&tri, 3).unwrap();
        for format in [SystemFormat::Text, SystemFormat::Json] {
            let text = sys.emit(format);
            prop_assert_eq!(&text, &sys.emit(format));
            let back = parse_system(&text).unwrap();
            prop_assert_eq!(&back.emit(format), &text);
            prop_assert_eq!(complexity_profile(&back), complexity_profile(&sys));
        }
    }

    #[test]
    fn induced_assignments_satisfy_the_system(seed in any::<u64>(), steps in 0usize..4) {
        let mut r = rng(seed);
        let tri = random_closed_triangulation(&mut r, 3, steps);
        let alpha = coboundary(&tri, LorentzGroup::new(3), &lorentz_family(&mut r, &tri, 3)).unwrap();
        let tol = 1e-9;
        prop_assert!(verify_cocycle(&tri, &alpha, tol).unwrap().passes);
        let sys = build_closed_system(&tri, 3).unwrap();
        let a = lorentz_assignment(&tri, &alpha).unwrap();
        let rep = eval_residuals(&sys, &a, ResidualThresholds::default()).unwrap();
        prop_assert!(rep.max_eq_residual <= 1e-7, "{:?} {}", rep.worst_eq, rep.max_eq_residual);
        let base = base_tree(&tri, tri.default_basepoint().unwrap()).unwrap();
        let dev = develop(&tri, &alpha, &base, tol).unwrap();
        for (&(u, v), d) in &dev.edge_lengths {
            let key = format!("C{u}_{v}");
            prop_assert!((a[&key] - (d.distance.cosh() - 1.0)).abs() <= 1e-7 * (1.0 + d.cosh_minus_one));
        }
    }
}

#[test]
fn cusped_lorentz_systems_drop_ideal_cells() {
    let mut r = rng(9);
    let closed = random_closed_triangulation(&mut r, 4, 2);
    assert!(matches!(build_cusped_system(&closed, 4), Err(systole_core::Error::NoIdealVertices)));
    let ideal = Triangulation::boundary_of_simplex(4).with_ideal(BTreeSet::from([0])).unwrap();
    let sys = build_cusped_system(&ideal, 4).unwrap();
    assert!(sys.variables().iter().all(|v| !v.name.starts_with("E0_") && !v.name.starts_with("V0a")));
    // 10 non-ideal edges, two orientations of 5x5 matrices each.
    assert_eq!(sys.variables().iter().filter(|v| v.name.starts_with('E')).count(), 10 * 2 * 25);
}

fn null_vector(z: Complex<f64>) -> Vec<f64> {
    // v v* for v = (z, 1), in (x, y, z, t) coordinates.
    let n2 = z.norm_sqr();
    vec![z.re, -z.im, (n2 - 1.0) / 2.0, (n2 + 1.0) / 2.0]
}

fn fixes(l: &Matrix<f64>, v: &[f64]) -> bool {
    let w = l.mul_vec(v);
    let s = w[3] / v[3];
    s > 0.0 && w.iter().zip(v).all(|(a, b)| (a - s * b).abs() <= 1e-9 * (1.0 + a.abs()))
}

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

#[test]
fn embedded_parabolics_fix_exactly_one_boundary_point() {
    let mut r = rng(12);
    let probes: Vec<Complex<f64>> = (0..50).map(|_| c(r.random_range(-3.0..3.0), r.random_range(-3.0..3.0))).collect();
    for _ in 0..20 {
        let g = random_sl2c(&mut r, 0.8);
        let ginv = Matrix::from_rows(2, 2, vec![g[(1, 1)], -g[(0, 1)], -g[(1, 0)], g[(0, 0)]]).unwrap();
        let m: Complex<f64> = c(r.random_range(-2.0..2.0), r.random_range(-2.0..2.0));
        let unipotent = Matrix::from_rows(2, 2, vec![c(1.0, 0.0), m, c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let p = g.mul(&unipotent).mul(&ginv);
        let Sl2Class::Parabolic { fixed_point } = classify_sl2(&p, 1e-8).unwrap() else {
            panic!("expected a parabolic")
        };
        let l = embed_sl2_as_lorentz(&p, 1e-6).unwrap();
        let fixed = match fixed_point {
            BoundaryPoint::Finite { re, im } => null_vector(c(re, im)),
            BoundaryPoint::Infinity => vec![0.0, 0.0, 1.0, 1.0],
        };
        assert!(fixes(&l, &fixed));
        assert_eq!(probes.iter().filter(|&&z| fixes(&l, &null_vector(z))).count(), 0);

        // A loxodromic conjugate fixes two points: g·0 and g·∞.
        let lox = Matrix::from_rows(2, 2, vec![c(2.0, 0.5), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.5).inv()]).unwrap();
        let a = g.mul(&lox).mul(&ginv);
        assert!(matches!(classify_sl2(&a, 1e-8).unwrap(), Sl2Class::Loxodromic));
        let l = embed_sl2_as_lorentz(&a, 1e-6).unwrap();
        let g0 = g[(0, 1)] / g[(1, 1)];
        let ginf = g[(0, 0)] / g[(1, 0)];
        assert!(fixes(&l, &null_vector(g0)) && fixes(&l, &null_vector(ginf)));
    }
}
