use super::*;
use crate::fixtures;
use crate::pipeline::build;
use crate::tet::{hex_to_param, hex_to_param_warped};
use crate::trace::trace_hex;

fn interior_shift(m: &crate::hex::HexMesh) -> impl Fn(u32) -> f64 + '_ {
    |f| {
        if m.topo.facets[f as usize].is_boundary() {
            0.0
        } else {
            [0.125, -0.25, 0.0, 0.25][(f as usize * 7 + 3) % 4]
        }
    }
}

#[test]
fn hex_derived_needs_no_splits() {
    for name in fixtures::NAMED {
        let m = fixtures::named(name).unwrap();
        let pm = hex_to_param(&m);
        let tr = trace_param(&pm, &TraceOptions::default()).unwrap();
        assert_eq!(tr.refined.n_splits, 0, "{name}");
        assert_eq!(tr.mesh.n_tets(), pm.n_tets(), "{name}");
    }
}

#[test]
fn block_counts_match_hex_tracer() {
    for name in fixtures::NAMED {
        let m = fixtures::named(name).unwrap();
        let hf = trace_hex(&m, &TraceOptions::default());
        let (hc, _) = build(&m.to_cell_mesh(), &hf).unwrap();
        let pm = hex_to_param(&m);
        let tr = trace_param(&pm, &TraceOptions::default()).unwrap();
        let (_, pc, _) = cut_tori(tr).unwrap();
        eprintln!("{name}: hex {} param {}", hc.n_blocks(), pc.n_blocks());
        assert_eq!(pc.n_blocks(), hc.n_blocks(), "{name}");
    }
}

#[test]
fn warped_faces_are_split_onto_walls() {
    for name in fixtures::NAMED {
        let m = fixtures::named(name).unwrap();
        let hf = trace_hex(&m, &TraceOptions::default());
        let (hc, _) = build(&m.to_cell_mesh(), &hf).unwrap();
        let pm = hex_to_param_warped(&m, &interior_shift(&m));
        let tr = trace_param(&pm, &TraceOptions::default()).unwrap();
        let (tr, pc, _) = cut_tori(tr).unwrap();
        assert!(tr.refined.n_splits > 0 || name == "box", "{name}");
        eprintln!("{name}: hex {} param {}", hc.n_blocks(), pc.n_blocks());
        assert_eq!(pc.n_blocks(), hc.n_blocks(), "{name}");
    }
}

#[test]
fn tagged_facets_are_iso() {
    let m = fixtures::named("pie5").unwrap();
    let pm = hex_to_param_warped(&m, &interior_shift(&m));
    let tr = trace_param(&pm, &TraceOptions::default()).unwrap();
    let cm = tr.mesh.cells();
    for f in tr.field.tagged_facets() {
        let c = cm.topo.facets[f as usize].cells[0];
        let p = cm.facet_params(f, c);
        assert!((0..3).any(|k| p.iter().all(|q| q[k] == p[0][k])), "facet {f}");
    }
}

#[test]
fn pops_are_monotone() {
    let m = fixtures::named("composite").unwrap();
    let pm = hex_to_param_warped(&m, &interior_shift(&m));
    let tr = trace_param(&pm, &TraceOptions::default()).unwrap();
    assert!(tr.field.ignitions > 0);
    assert!(tr.field.pop_order.iter().all(|d| d.is_finite() && *d >= 0.0));
}

#[test]
fn sanitized_noisy_input_traces_like_hex() {
    for name in fixtures::NAMED {
        let m = fixtures::named(name).unwrap();
        let hf = trace_hex(&m, &TraceOptions::default());
        let (hc, _) = build(&m.to_cell_mesh(), &hf).unwrap();
        let bad = crate::sanitize::tests::noisy(&hex_to_param_warped(&m, &interior_shift(&m)), 1e-7, 11);
        let (pm, _) = crate::sanitize::sanitize(&bad).unwrap();
        let tr = trace_param(&pm, &TraceOptions::default()).unwrap();
        let (_, pc, _) = cut_tori(tr).unwrap();
        assert_eq!(pc.n_blocks(), hc.n_blocks(), "{name}");
    }
}
