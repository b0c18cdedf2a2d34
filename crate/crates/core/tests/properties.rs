mod common;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use tdanorm::bottleneck::{bottleneck_pairs, space_bottleneck};
use tdanorm::decomposition::{h_eval, max_ratio};
use tdanorm::dimred::{gram_matrix, squared_ratio_epsilon, symmetric_eigen, SquaredDistances};
use tdanorm::linalg::Matrix;
use tdanorm::persistence::{normalize_diagram, PersistencePair};
use tdanorm::*;

fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scale_composes(s in seed(), p in 0.01f64..100.0, q in 0.01f64..100.0) {
        let d = random_space(&mut rng(s), 7, 3);
        let twice = scale(&scale(&d, p).unwrap(), q).unwrap();
        let once = scale(&d, p * q).unwrap();
        for (i, j, v) in once.upper_pairs() {
            prop_assert!(rel_close(v, twice.get(i, j), 1e-12));
        }
        prop_assert!(rel_close(diam(&scale(&d, p).unwrap()).unwrap(), p * diam(&d).unwrap(), 1e-12));
    }

    #[test]
    fn normalize_is_idempotent(s in seed(), p in 0.01f64..100.0) {
        let d = scale(&random_space(&mut rng(s), 6, 2), p).unwrap();
        let once = normalize(&d).unwrap();
        prop_assert_eq!(once.max_entry(), 1.0);
        prop_assert_eq!(normalize(&once).unwrap().max_entry(), 1.0);
    }

    #[test]
    fn hadamard_lemma(s in seed(), rows in 1usize..6, cols in 1usize..6) {
        let mut r = rng(s);
        let mut m = || Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| r.random_range(0.0..10.0)).collect()).unwrap();
        let (a, b) = (m(), m());
        let (lhs, rhs) = hadamard_gap_check(&a, &b).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn diagram_scaling(s in seed(), f in 0.01f64..100.0) {
        let d = random_space(&mut rng(s), 7, 3);
        let scaled = diagram(&scale(&d, f).unwrap(), 2).unwrap();
        let expected = scale_diagram(&diagram(&d, 2).unwrap(), f).unwrap();
        let (a, b) = (sorted_pairs(&scaled), sorted_pairs(&expected));
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.len(), y.len());
            for (p, q) in x.iter().zip(y) {
                prop_assert!(rel_close(p.0, q.0, 1e-9) || (p.0 - q.0).abs() < 1e-12);
                prop_assert!(p.1 == q.1 || rel_close(p.1, q.1, 1e-9));
            }
        }
    }

    #[test]
    fn diagram_values_are_simplex_diameters(s in seed()) {
        let d = random_space(&mut rng(s), 7, 3);
        let k = build_vr(&d, 2).unwrap();
        let values: Vec<f64> = k.values().collect();
        for (_, p) in diagram(&d, 2).unwrap().rows() {
            prop_assert!(values.contains(&p.birth));
            prop_assert!(p.death.is_infinite() || values.contains(&p.death));
        }
    }

    #[test]
    fn betti_numbers_between_thresholds(s in seed()) {
        // counts of live pairs agree with the homology of the complex at
        // every critical value and strictly between consecutive ones
        let d = random_space(&mut rng(s), 6, 2);
        let dgm = diagram(&d, 2).unwrap();
        let mut values: Vec<f64> = build_vr(&d, 2).unwrap().values().collect();
        values.dedup();
        let mut probes = values.clone();
        probes.extend(values.windows(2).map(|w| 0.5 * (w[0] + w[1])));
        for r in probes {
            for k in 0..2 {
                let closed = dgm.dim(k).iter().filter(|p| p.birth <= r && r < p.death).count();
                prop_assert_eq!(closed, betti_at(&d, 2, k, r));
                if !values.contains(&r) {
                    let strict = dgm.dim(k).iter().filter(|p| p.birth < r && r <= p.death).count();
                    prop_assert_eq!(strict, closed);
                }
            }
        }
    }

    #[test]
    fn bottleneck_scaling(s in seed(), f in 0.1f64..50.0) {
        let mut r = rng(s);
        let (a, b) = (random_pairs(&mut r, 5, 1), random_pairs(&mut r, 4, 1));
        let scale_all = |v: &[PersistencePair]| v.iter().map(|p| PersistencePair::new(f * p.birth, f * p.death)).collect::<Vec<_>>();
        let base = bottleneck_pairs(&a, &b).value;
        let scaled = bottleneck_pairs(&scale_all(&a), &scale_all(&b)).value;
        prop_assert!(rel_close(f * base, scaled, 1e-9));
    }

    #[test]
    fn bottleneck_matches_enumeration(s in seed(), na in 0usize..6, nb in 0usize..6, e in 0usize..3) {
        let mut r = rng(s);
        let (a, b) = (random_pairs(&mut r, na, e), random_pairs(&mut r, nb, e));
        prop_assert_eq!(bottleneck_pairs(&a, &b).value, brute_bottleneck(&a, &b));
    }

    #[test]
    fn bottleneck_witness_attains_value(s in seed(), na in 0usize..6, nb in 0usize..6) {
        let mut r = rng(s);
        let (a, b) = (random_pairs(&mut r, na, 1), random_pairs(&mut r, nb, 1));
        let res = bottleneck_pairs(&a, &b);
        prop_assert_eq!(tdanorm::bottleneck::matching_cost(&a, &b, &res.witness), res.value);
    }

    #[test]
    fn dn_pseudometric(s in seed()) {
        let mut r = rng(s);
        let (x, y, z) = (random_space(&mut r, 6, 2), random_space(&mut r, 6, 2), random_space(&mut r, 6, 2));
        let dxy = normalized_bottleneck(&x, &y, 2).unwrap();
        let dyx = normalized_bottleneck(&y, &x, 2).unwrap();
        let dyz = normalized_bottleneck(&y, &z, 2).unwrap();
        let dxz = normalized_bottleneck(&x, &z, 2).unwrap();
        prop_assert_eq!(&dxy.per_dim, &dyx.per_dim);
        prop_assert_eq!(normalized_bottleneck(&x, &x, 2).unwrap().max, 0.0);
        for k in 0..2 {
            prop_assert!(dxz.get(k).unwrap() <= dxy.get(k).unwrap() + dyz.get(k).unwrap() + 1e-9);
        }
    }

    #[test]
    fn dn_scale_invariant(s in seed(), p in 0.1f64..100.0, q in 0.1f64..100.0) {
        let mut r = rng(s);
        let (x, y) = (random_space(&mut r, 7, 3), random_space(&mut r, 7, 3));
        let base = normalized_bottleneck(&x, &y, 2).unwrap();
        let scaled = normalized_bottleneck(&scale(&x, p).unwrap(), &scale(&y, q).unwrap(), 2).unwrap();
        for (k, v) in &base.per_dim {
            prop_assert!((v - scaled.get(*k).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn dn_equals_diagrams_of_normalized_spaces(s in seed()) {
        let mut r = rng(s);
        let (x, y) = (random_space(&mut r, 7, 3), random_space(&mut r, 7, 3));
        let via_spaces = normalized_bottleneck(&x, &y, 2).unwrap();
        let via_diagrams = space_distances(&x, &y, 2).unwrap().1;
        for (k, v) in &via_diagrams.per_dim {
            prop_assert!((v - via_spaces.get(*k).unwrap()).abs() <= 1e-12);
        }
        let g = diagram(&x, 2).unwrap();
        let n = normalize_diagram(&g, diam(&x).unwrap()).unwrap();
        prop_assert_eq!(n.total_pairs(), diagram(&normalize(&x).unwrap(), 2).unwrap().total_pairs());
    }

    #[test]
    fn db_at_most_distortion(s in seed(), noise in 0.0f64..0.5) {
        let mut r = rng(s);
        let x = random_cloud(&mut r, 7, 2, 1.0);
        let y = PointCloud::new(x.points().iter().map(|p| p.iter().map(|v| v + r.random_range(-noise..=noise)).collect()).collect()).unwrap();
        let (dx, dy) = (distance_matrix(&x), distance_matrix(&y));
        let dis = dimred::distortion(&dx, &dy).unwrap();
        prop_assert!(space_bottleneck(&dx, &dy, 2).unwrap().max <= dis + 1e-9);
    }

    #[test]
    fn h_convex_and_lipschitz(s in seed(), a in 0.0f64..5.0, b in 0.0f64..5.0, t in 0.0f64..1.0) {
        let mut r = rng(s);
        let (x, y) = (random_space(&mut r, 6, 2), random_space(&mut r, 6, 3));
        let h = |s: f64| h_eval(&x, &y, s).unwrap();
        prop_assert!(h(t * a + (1.0 - t) * b) <= t * h(a) + (1.0 - t) * h(b) + 1e-12);
        prop_assert!((h(a) - h(b)).abs() <= (a - b).abs() * diam(&x).unwrap() + 1e-12);
    }

    #[test]
    fn h_eventually_increases(s in seed(), extra in 0.0f64..10.0) {
        let mut r = rng(s);
        let (x, y) = (random_space(&mut r, 6, 2), random_space(&mut r, 6, 3));
        let m = max_ratio(&x, &y).unwrap();
        let s0 = m + extra + 1e-6;
        prop_assert!(h_eval(&x, &y, s0 + 1.0).unwrap() > h_eval(&x, &y, s0).unwrap());
    }

    #[test]
    fn decomposition_matches_enumeration(s in seed()) {
        let mut r = rng(s);
        let (x, y) = (random_space(&mut r, 6, 2), random_space(&mut r, 6, 3));
        let dec = optimal_decomposition(&x, &y).unwrap();
        let (_, best) = enumerate_decomposition(&x, &y);
        prop_assert!((dec.delta_norm - best).abs() <= 1e-12 * (1.0 + best));
        prop_assert_eq!(dec.delta_norm, h_direct(&x, &y, dec.s_star));
    }

    #[test]
    fn stability(s in seed()) {
        let mut r = rng(s);
        let (x, y) = (random_space(&mut r, 7, 2), random_space(&mut r, 7, 3));
        prop_assert!(stability_bound(&x, &y, 2).unwrap().pass);
    }

    #[test]
    fn eigen_reconstructs(s in seed(), n in 1usize..9) {
        let mut r = rng(s);
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = r.random_range(-5.0..5.0);
                a.row_mut(i)[j] = v;
                a.row_mut(j)[i] = v;
            }
        }
        let e = symmetric_eigen(&a).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&a).unwrap() <= 1e-9 * a.frobenius_norm().max(1.0));
        let vtv = e.vectors.transpose().matmul(&e.vectors).unwrap();
        prop_assert!(vtv.max_abs_diff(&Matrix::identity(n)).unwrap() <= 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn mmds_full_rank_is_isometric(s in seed(), n in 4usize..12, dim in 1usize..4) {
        let c = random_cloud(&mut rng(s), n, dim, 3.0);
        let d = distance_matrix(&c);
        let g = gram_matrix(&d);
        let full = mmds_embed(&d, dim, false).unwrap();
        prop_assert_eq!(full.rank(), dim);
        prop_assert!(full.spectrum.reconstruct().max_abs_diff(&g).unwrap() <= 1e-9 * g.frobenius_norm());
        let e = distance_matrix(&full.embedded);
        for (i, j, v) in d.upper_pairs() {
            prop_assert!((v - e.get(i, j)).abs() <= 1e-9 * diam(&d).unwrap());
        }
        for m in 1..=dim {
            let r = mmds_embed(&d, m, false).unwrap();
            for rep in mmds_bounds(&d, &r, 2).unwrap() {
                prop_assert!(rep.pass, "{:?}", rep);
            }
        }
    }

    #[test]
    fn bilipschitz_bounds_hold(s in seed(), noise in 0.0f64..0.3) {
        let mut r = rng(s);
        let x = random_cloud(&mut r, 7, 2, 1.0);
        let y = tdanorm::generators::perturb(&x, noise, s ^ 1).unwrap();
        let (dx, dy) = (distance_matrix(&x), distance_matrix(&y));
        let p = bilipschitz_profile(&dx, &dy).unwrap();
        for rep in bilipschitz_bounds(&dx, &dy, &p, 2).unwrap() {
            prop_assert!(rep.pass, "{:?}", rep);
        }
    }

    #[test]
    fn jl_ratios_within_measured_epsilon(s in seed()) {
        let c = random_cloud(&mut rng(s), 30, 60, 1.0);
        let res = jl_project(&c, 0.8, s).unwrap();
        let (a, b) = (SquaredDistances::of(&c), SquaredDistances::of(&res.projected));
        prop_assert_eq!(squared_ratio_epsilon(&a, &b).unwrap(), res.epsilon_actual);
        for i in 0..c.len() {
            for j in 0..i {
                let ratio = b.get(i, j) / a.get(i, j);
                prop_assert!(ratio >= 1.0 - res.epsilon_actual - 1e-12);
                prop_assert!(ratio <= 1.0 + res.epsilon_actual + 1e-12);
            }
        }
        for rep in jl_bounds(&c, &res, 2, EpsilonSource::Measured).unwrap() {
            prop_assert!(rep.pass, "{:?}", rep);
        }
    }

    #[test]
    fn generators_deterministic(s in seed(), n in 3usize..40) {
        let spec = GeneratorSpec::saddle(n, 2.0, 1.0, 0.1, s);
        prop_assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let circle = GeneratorSpec::noisy_circle(n, 3.0, 0.0, s);
        for p in generate(&circle).unwrap().points() {
            prop_assert!((p[0].hypot(p[1]) - 3.0).abs() < 1e-12);
        }
    }
}

#[test]
fn vr_matches_betti_oracle_with_ties() {
    let mut r = rng(7);
    for _ in 0..40 {
        let d = tied_space(&mut r, 6);
        let dgm = diagram(&d, 3).unwrap();
        assert_eq!(sorted_pairs(&dgm), betti_diagram(&d, 3));
    }
}
