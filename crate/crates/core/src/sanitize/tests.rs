use super::*;
use crate::fixtures;
use crate::tet::hex_to_param;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub(crate) fn noisy(pm: &ParamTetMesh, eps: f64, seed: u64) -> ParamTetMesh {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<[Vec3; 4]> = (0..pm.n_tets() as u32)
        .map(|t| pm.tet_params(t).map(|p| p + Vec3::from_fn(|_, _| rng.gen_range(-eps..=eps))))
        .collect();
    let tets = pm.tets().iter().map(|t| [t[0], t[1], t[2], t[3]]).collect();
    ParamTetMesh::new(pm.positions().to_vec(), tets, params).unwrap()
}

#[test]
fn box_cut_structure() {
    let pm = hex_to_param(&fixtures::hex_box(1, 1, 1));
    let cs = detect_cut_structure(&pm).unwrap();
    assert_eq!(cs.n_cut_sheets(), 0);
    assert_eq!(cs.n_align_sheets(), 6);
    assert_eq!(cs.branches.len(), 12);
    assert_eq!(cs.node_list().len(), 8);
    let sys = build_core_system(pm.topo(), &cs);
    assert_eq!(sys.n_vars(), 24);
    assert_eq!(sys.rows.len(), 18);
}

#[test]
fn singular_chain_is_a_branch() {
    let pm = hex_to_param(&fixtures::pie(3, &[1, 1, 1], &[1, 1, 1]));
    let cs = detect_cut_structure(&pm).unwrap();
    let topo = pm.topo();
    let interior: Vec<u32> = pm.singular_edges().into_iter().filter(|&e| !topo.is_boundary_edge(e)).collect();
    let mut verts: Vec<u32> = interior.iter().flat_map(|&e| topo.edges[e as usize]).collect();
    verts.sort_unstable();
    let ends: Vec<u32> = verts.iter().copied().filter(|v| verts.iter().filter(|w| *w == v).count() == 1).collect();
    assert_eq!(ends.len(), 2);
    assert!(ends.iter().all(|&v| cs.nodes[v as usize]));
    let branch = cs
        .branches
        .iter()
        .find(|b| b.contains(&ends[0]) && b.contains(&ends[1]))
        .expect("singular chain branch");
    assert_eq!(branch.len(), interior.len() + 1);
}

#[test]
fn refinement_keeps_core_size() {
    let coarse = hex_to_param(&fixtures::hex_box(1, 1, 1));
    let fine = hex_to_param(&fixtures::hex_box(2, 2, 2));
    let size = |pm: &ParamTetMesh| {
        let cs = detect_cut_structure(pm).unwrap();
        let sys = build_core_system(pm.topo(), &cs);
        (sys.n_vars(), sys.rows.len())
    };
    assert_eq!(fine.n_tets(), 8 * coarse.n_tets());
    assert_eq!(size(&coarse), size(&fine));
}

#[test]
fn exact_input_is_a_fixpoint() {
    for name in fixtures::NAMED {
        let pm = hex_to_param(&fixtures::named(name).unwrap());
        let (out, stats) = sanitize(&pm).unwrap();
        assert!(verify_seamless(&out).is_empty(), "{name}");
        assert_eq!(stats.max_change, 0.0, "{name}");
    }
}

#[test]
fn noisy_fixtures_become_seamless() {
    for name in fixtures::NAMED {
        let pm = hex_to_param(&fixtures::named(name).unwrap());
        let bad = noisy(&pm, 1e-8, 7);
        assert!(!verify_seamless(&bad).is_empty());
        let (out, stats) = sanitize(&bad).unwrap();
        assert_eq!(verify_seamless(&out), vec![], "{name}");
        assert_eq!(out.singular_vertex_pairs(), pm.singular_vertex_pairs(), "{name}");
        assert!(stats.max_change < 1e-6, "{name}: {}", stats.max_change);
    }
}

#[test]
fn two_node_identity_sheet_is_equalized() {
    // the core system of the unit box after noise: align rows only
    let pm = noisy(&hex_to_param(&fixtures::hex_box(1, 1, 1)), 1e-9, 3);
    let cs = detect_cut_structure(&pm).unwrap();
    let sys = build_core_system(pm.topo(), &cs);
    let (values, _) = solve_exact(&sys, &node_init(&pm, &cs, &sys)).unwrap();
    assert!(residuals(&sys, &values).iter().all(|&r| r == 0.0));
}

#[test]
fn perturbed_corner_reports_its_facet_edges() {
    let pm = hex_to_param(&fixtures::hex_box(2, 1, 1));
    let topo = pm.topo();
    let t = (0..pm.n_tets() as u32).find(|&t| topo.cell_facets[t as usize].iter().all(|&f| !topo.is_boundary_facet(f))).unwrap();
    let v = pm.tets()[t as usize][0];
    let mut params: Vec<[Vec3; 4]> = (0..pm.n_tets() as u32).map(|t| pm.tet_params(t)).collect();
    params[t as usize][0] += Vec3::new(1e-9, -2e-9, 3e-9);
    let tets = pm.tets().iter().map(|t| [t[0], t[1], t[2], t[3]]).collect();
    let bad = ParamTetMesh::new(pm.positions().to_vec(), tets, params).unwrap();
    let mut expect = Vec::new();
    for &f in &topo.cell_facets[t as usize] {
        let fr = &topo.facets[f as usize];
        if !fr.vertices.contains(&v) {
            continue;
        }
        for &w in fr.vertices.iter().filter(|&&w| w != v) {
            expect.push((f, [v.min(w), v.max(w)]));
        }
    }
    expect.sort_unstable();
    let mut got: Vec<(u32, [u32; 2])> = verify_seamless(&bad).iter().map(|x| (x.facet, x.edge)).collect();
    got.sort_unstable();
    assert_eq!(got, expect);
}

#[test]
fn unaligned_boundary_facet_reports_three_edges() {
    let positions = vec![Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()];
    let p = [Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.2, 0.2, 1.0)];
    let pm = ParamTetMesh::new(positions, vec![[0, 1, 2, 3]], vec![p]).unwrap();
    let v = verify_seamless(&pm);
    let slanted: Vec<_> = v.iter().filter(|x| pm.boundary_axis(x.facet).is_none()).collect();
    assert!(!slanted.is_empty());
    for f in slanted.iter().map(|x| x.facet) {
        assert_eq!(v.iter().filter(|x| x.facet == f).count(), 3);
    }
}

#[test]
fn rotated_sector_alignment_is_pulled_back() {
    // composite has boundary vertices whose sectors align on different axes
    let pm = hex_to_param(&fixtures::composite());
    for seed in [7, 11] {
        let (out, _) = sanitize(&noisy(&pm, 1e-7, seed)).unwrap();
        assert_eq!(verify_seamless(&out), vec![]);
    }
}
