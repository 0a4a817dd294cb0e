use mc3d::complex::oracle::grid_blocks;
use mc3d::complex::{removable, ReduceMode};
use mc3d::fixtures;
use mc3d::io::{parse_medit, parse_param, parse_vtk, write_medit, write_param, write_vtk};
use mc3d::pipeline::{hex_base_complex, hex_decompose};
use mc3d::quantize::{exhaustive_optimum, random_problem, solve_quantization};
use mc3d::sanitize::{sanitize, verify_seamless};
use mc3d::tet::{hex_to_param, ParamTetMesh};
use mc3d::trace::TraceOptions;
use mc3d::{Rotation, Transition, Vec3};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rotation() -> impl Strategy<Value = Rotation> {
    (0..24usize).prop_map(Rotation::from_index)
}

fn vec3() -> impl Strategy<Value = Vec3> {
    (-8i32..8, -8i32..8, -8i32..8).prop_map(|(x, y, z)| Vec3::new(x as f64 * 0.5, y as f64 * 0.5, z as f64 * 0.5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_form_a_group(a in rotation(), b in rotation(), c in rotation()) {
        prop_assert_eq!(a.compose(b).compose(c), a.compose(b.compose(c)));
        prop_assert!(a.compose(a.inverse()).is_identity());
        let v = Vec3::new(1.0, 2.0, 3.0);
        prop_assert_eq!(a.compose(b).apply(&v), a.apply(&b.apply(&v)));
    }

    #[test]
    fn transitions_invert(r in rotation(), t in vec3(), p in vec3()) {
        let tr = Transition::new(r, t);
        let back = tr.inverse().apply(&tr.apply(&p));
        prop_assert!((back - p).amax() < 1e-12);
        prop_assert!(tr.compose(&tr.inverse()).is_identity(1e-12));
    }

    #[test]
    fn quantization_is_exact_and_optimal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=10);
        let walls = rng.gen_range(1..=4);
        let qp = random_problem(&mut rng, n, walls);
        let l = solve_quantization(&qp).unwrap();
        prop_assert!(qp.is_feasible(&l));
        let (_, best) = exhaustive_optimum(&qp, qp.objective(&l)).unwrap();
        prop_assert!((qp.objective(&l) - best).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_meshes_decompose_into_grids(seed in any::<u64>()) {
        let m = fixtures::random_glued(&mut ChaCha8Rng::seed_from_u64(seed));
        let (cm, dec) = hex_decompose(&m, &TraceOptions::default()).unwrap();
        let bc = hex_base_complex(&m).unwrap();
        let bc_walls = bc.wall_facets();
        for mc in [&dec.raw, &dec.plus, &dec.full] {
            prop_assert_eq!(grid_blocks(&m, &mc.tagged).unwrap().len(), mc.n_blocks());
            prop_assert!(mc.wall_facets().iter().all(|f| bc_walls.binary_search(f).is_ok()));
        }
        prop_assert!(dec.full.n_blocks() <= dec.plus.n_blocks() && dec.plus.n_blocks() <= dec.raw.n_blocks());
        prop_assert!(dec.full.n_blocks() <= bc.n_blocks());
        prop_assert!((0..dec.full.walls.len() as u32).all(|w| !removable(&cm, &dec.full, w, ReduceMode::Full)));
    }

    #[test]
    fn seeded_traces_stay_valid(seed in any::<u64>()) {
        let m = fixtures::named("composite").unwrap();
        let (_, dec) = hex_decompose(&m, &TraceOptions { seed: Some(seed), ..Default::default() }).unwrap();
        prop_assert_eq!(grid_blocks(&m, &dec.raw.tagged).unwrap().len(), dec.raw.n_blocks());
        prop_assert!(dec.full.n_blocks() <= dec.raw.n_blocks());
    }

    #[test]
    fn mesh_formats_round_trip(seed in any::<u64>()) {
        let m = fixtures::random_glued(&mut ChaCha8Rng::seed_from_u64(seed));
        for back in [parse_medit(&write_medit(&m)).unwrap(), parse_vtk(&write_vtk(&m)).unwrap()] {
            prop_assert_eq!(back.hexes(), m.hexes());
            prop_assert!(back.positions.iter().zip(&m.positions).all(|(a, b)| a == b));
        }
    }

    #[test]
    fn noisy_parametrizations_sanitize(seed in any::<u64>(), exp in 9..12i32) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pm = hex_to_param(&fixtures::random_glued(&mut rng));
        let eps = 10f64.powi(-exp);
        let params: Vec<[Vec3; 4]> = (0..pm.n_tets() as u32)
            .map(|t| pm.tet_params(t).map(|p| p + Vec3::from_fn(|_, _| rng.gen_range(-eps..=eps))))
            .collect();
        let tets = pm.tets().iter().map(|t| [t[0], t[1], t[2], t[3]]).collect();
        let bad = ParamTetMesh::new(pm.positions().to_vec(), tets, params).unwrap();
        let text = write_param(&bad);
        prop_assert_eq!(write_param(&parse_param(&text).unwrap()), text);
        let (out, _) = sanitize(&bad).unwrap();
        prop_assert!(verify_seamless(&out).is_empty());
        prop_assert_eq!(out.singular_vertex_pairs(), pm.singular_vertex_pairs());
    }
}
