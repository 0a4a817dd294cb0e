use super::cut::{CutStructure, SheetKind};
use super::system::CoreSystem;
use crate::error::{Error, Result};
use crate::octa::{Transition, Vec3};
use crate::tet::ParamTetMesh;
use std::collections::VecDeque;

fn round_to(p: &Vec3, h: f64) -> Vec3 {
    p.map(|x| (x / h).round() * h)
}

fn exact_identity(t: &Transition) -> bool {
    t.rotation.is_identity() && t.translation == Vec3::zeros()
}

/// Point fixed by `p ↦ R p + t`, keeping the coordinate along the rotation
/// axis from `u`.
fn fixpoint(h: &Transition, u: &Vec3) -> Option<Vec3> {
    let r = h.rotation;
    let fixed: Vec<usize> = (0..3).filter(|&a| r.map_axis(a) == (a, 1.0)).collect();
    let &[a] = fixed.as_slice() else { return None };
    if h.translation[a] != 0.0 {
        return None;
    }
    let (b, c) = ((a + 1) % 3, (a + 2) % 3);
    let m = r.matrix();
    let mbb = 1.0 - m[b][b] as f64;
    let mbc = -(m[b][c] as f64);
    let mcb = -(m[c][b] as f64);
    let mcc = 1.0 - m[c][c] as f64;
    let det = mbb * mcc - mbc * mcb;
    let (tb, tc) = (h.translation[b], h.translation[c]);
    let mut out = *u;
    out[b] = (tb * mcc - mbc * tc) / det;
    out[c] = (mbb * tc - mcb * tb) / det;
    Some(out)
}

/// Exact sheet transitions and alignment constants read from node values.
pub fn sheet_data(cs: &CutStructure, sys: &CoreSystem, values: &[Vec3]) -> Result<(Vec<Transition>, Vec<f64>)> {
    let value = |s: u32| values[sys.var(s, 0) / 3];
    let mut trans = Vec::with_capacity(cs.sheets.len());
    let mut level = Vec::with_capacity(cs.sheets.len());
    for (i, (sheet, occ)) in cs.sheets.iter().zip(&sys.occurrences).enumerate() {
        let base = occ.first().ok_or_else(|| Error::Integrity(format!("sheet {i} has no node")))?;
        match sheet.kind {
            SheetKind::Cut => {
                let r = sheet.rotation;
                trans.push(Transition::new(r, value(base.plus) - r.apply(&value(base.minus))));
                level.push(f64::NAN);
            }
            SheetKind::Align { axis } => {
                trans.push(Transition::identity());
                level.push(value(base.minus)[axis]);
            }
        }
    }
    Ok((trans, level))
}

/// Fills every sector from the exact node values and returns the sanitized
/// parametrization. Non-node vertices are visited once each.
pub fn propagate(
    pm: &ParamTetMesh,
    cs: &CutStructure,
    sys: &CoreSystem,
    values: &[Vec3],
    h: f64,
) -> Result<ParamTetMesh> {
    let topo = pm.topo();
    let sec = &cs.sectors;
    let (trans, level) = sheet_data(cs, sys, values)?;

    let mut init = vec![Vec3::zeros(); sec.len()];
    let mut count = vec![0.0; sec.len()];
    for t in 0..topo.n_cells() {
        let p = pm.tet_params(t as u32);
        for i in 0..4 {
            let s = sec.corner[t][i] as usize;
            init[s] += p[i];
            count[s] += 1.0;
        }
    }
    for (p, n) in init.iter_mut().zip(&count) {
        *p /= *n;
    }

    let mut value: Vec<Option<Vec3>> = vec![None; sec.len()];
    for (i, &s) in sys.node_sectors.iter().enumerate() {
        value[s as usize] = Some(values[i]);
    }

    let mut visits = vec![0u32; topo.n_vertices];
    for v in 0..topo.n_vertices as u32 {
        if cs.nodes[v as usize] {
            continue;
        }
        visits[v as usize] += 1;
        let range = sec.at(v);
        let local = |s: u32| (s - range.start) as usize;
        let n = range.len();
        let mut graph: Vec<Vec<(usize, Transition)>> = vec![Vec::new(); n];
        let mut align: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &c in &topo.vertex_cells[v as usize] {
            for &f in &topo.cell_facets[c as usize] {
                let fr = &topo.facets[f as usize];
                if !fr.vertices.contains(&v) || fr.cells[0] != c && !fr.is_boundary() {
                    continue;
                }
                let sheet = cs.facet_sheet[f as usize];
                if fr.is_boundary() {
                    if let SheetKind::Align { axis } = cs.sheets[sheet as usize].kind {
                        let s = local(sec.of(topo, c, v));
                        if !align[s].contains(&(axis, level[sheet as usize])) {
                            align[s].push((axis, level[sheet as usize]));
                        }
                    }
                } else if cs.cut_facets[f as usize] {
                    let a = local(sec.of(topo, cs.minus_cell[f as usize], v));
                    let b = local(sec.of(topo, cs.plus_cell(topo, f), v));
                    let t = trans[sheet as usize];
                    graph[a].push((b, t));
                    graph[b].push((a, t.inverse()));
                }
            }
        }

        let mut path: Vec<Option<Transition>> = vec![None; n];
        let mut order: Vec<usize> = (0..n).filter(|&s| !align[s].is_empty()).collect();
        order.extend((0..n).filter(|&s| align[s].is_empty()));
        for &root in &order {
            if path[root].is_some() {
                continue;
            }
            path[root] = Some(Transition::identity());
            let mut component = vec![root];
            let mut q = VecDeque::from([root]);
            let mut holonomy = Vec::new();
            while let Some(a) = q.pop_front() {
                let pa = path[a].unwrap();
                for &(b, t) in &graph[a] {
                    let pb = t.compose(&pa);
                    match path[b] {
                        None => {
                            path[b] = Some(pb);
                            component.push(b);
                            q.push_back(b);
                        }
                        Some(prev) => {
                            let hol = prev.inverse().compose(&pb);
                            if !exact_identity(&hol) {
                                holonomy.push(hol);
                            }
                        }
                    }
                }
            }
            let mut u = round_to(&init[range.start as usize + root], h);
            let mut pinned = [None; 3];
            for &s in &component {
                let ps = path[s].unwrap();
                for &(axis, c) in &align[s] {
                    let (k, sign) = ps.rotation.inverse().map_axis(axis);
                    let x = (c - ps.translation[axis]) * sign;
                    if pinned[k].is_some_and(|y| y != x) {
                        return Err(Error::Integrity(format!("vertex {v}: conflicting alignments on axis {k}")));
                    }
                    pinned[k] = Some(x);
                    u[k] = x;
                }
            }
            if let Some(first) = holonomy.first() {
                u = fixpoint(first, &u).ok_or_else(|| {
                    Error::MalformedSingularity(format!("vertex {v}: composed transition has no fixpoint line"))
                })?;
                if holonomy.iter().any(|hol| hol.apply(&u) != u) {
                    return Err(Error::MalformedSingularity(format!("vertex {v}: inconsistent fixpoints")));
                }
            }
            for &s in &component {
                value[range.start as usize + s] = Some(path[s].unwrap().apply(&u));
            }
        }
        for s in 0..n {
            let us = value[range.start as usize + s].unwrap();
            let aligned = align[s].iter().all(|&(axis, c)| us[axis] == c);
            let seamless = graph[s].iter().all(|&(b, t)| value[range.start as usize + b] == Some(t.apply(&us)));
            if !aligned || !seamless {
                return Err(Error::Integrity(format!("vertex {v}: sector values are not consistent")));
            }
        }
    }
    debug_assert!(visits.iter().all(|&k| k <= 1));

    let params: Vec<[Vec3; 4]> = (0..topo.n_cells())
        .map(|t| sec.corner[t].map(|s| value[s as usize].expect("every sector assigned")))
        .collect();
    let tets: Vec<[u32; 4]> = topo.cells.iter().map(|c| [c[0], c[1], c[2], c[3]]).collect();
    ParamTetMesh::new(pm.positions().to_vec(), tets, params)
}
