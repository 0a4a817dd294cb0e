//! Tetrahedral meshes carrying a per-corner seamless parametrization.

use crate::cells::CellMesh;
use crate::error::{Error, Result};
use crate::hex::{EdgeClass, HexMesh};
use crate::octa::{Transition, Vec3};
use crate::topology::{CellKind, Topology, HEX_CORNERS};
use std::collections::VecDeque;

/// Relative tolerance for transition fits and angle sums on inputs that
/// have not been sanitized.
pub const SEAMLESS_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct ParamTetMesh {
    cells: CellMesh,
    classes: Vec<EdgeClass>,
    scale: f64,
}

impl ParamTetMesh {
    /// Builds connectivity, fits one octahedral transition per interior
    /// facet and classifies every edge. Interior angle sums must be whole quarter turns
    /// within tolerance; boundary sums are rounded.
    pub fn new(positions: Vec<Vec3>, tets: Vec<[u32; 4]>, params: Vec<[Vec3; 4]>) -> Result<ParamTetMesh> {
        if params.len() != tets.len() {
            return Err(Error::Precondition(format!("{} tets but {} parameter rows", tets.len(), params.len())));
        }
        let topo = Topology::build(CellKind::Tet, positions.len(), tets.iter().map(|t| t.to_vec()).collect())?;
        let params: Vec<Vec<Vec3>> = params.iter().map(|p| p.to_vec()).collect();
        let (mut lo, mut hi) = (Vec3::repeat(f64::INFINITY), Vec3::repeat(f64::NEG_INFINITY));
        for p in params.iter().flatten() {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        let scale = if params.is_empty() { 1.0 } else { (hi - lo).amax().max(1.0) };
        let tol = SEAMLESS_TOL * scale;
        for (t, p) in params.iter().enumerate() {
            let vol = (p[1] - p[0]).dot(&(p[2] - p[0]).cross(&(p[3] - p[0])));
            if vol <= 0.0 {
                return Err(Error::Precondition(format!("tet {t} is degenerate or inverted in parameter space")));
            }
        }
        let mut transitions = Vec::with_capacity(topo.facets.len());
        for (f, fr) in topo.facets.iter().enumerate() {
            if fr.is_boundary() {
                transitions.push(Transition::identity());
                continue;
            }
            let local = |c: u32| -> Vec<Vec3> {
                fr.vertices.iter().map(|&v| params[c as usize][topo.local_vertex(c, v).unwrap()]).collect()
            };
            let (src, dst) = (local(fr.cells[0]), local(fr.cells[1]));
            let tr = match Transition::fit_exact(&src, &dst) {
                Some(t) => t,
                None => {
                    let (t, res) = Transition::fit(&src, &dst);
                    if res > tol {
                        return Err(Error::NotSeamless(format!("facet {f}: no octahedral transition (residual {res:e})")));
                    }
                    t
                }
            };
            transitions.push(tr);
        }
        let ne = topo.edges.len();
        let mut cells = CellMesh::new(topo, positions, params, transitions, vec![false; ne]);
        let mut classes = Vec::with_capacity(ne);
        for e in 0..ne as u32 {
            let q = cells.edge_quarters(e);
            let k = q.round();
            let boundary = cells.topo.is_boundary_edge(e);
            if !boundary && (q - k).abs() > SEAMLESS_TOL * q.abs().max(1.0) {
                let [a, b] = cells.topo.edges[e as usize];
                return Err(Error::NotSeamless(format!("edge ({a}, {b}): angle sum {q} quarter turns")));
            }
            classes.push(EdgeClass::from_quarters(k as i32, boundary));
        }
        cells.singular = classes.iter().map(|c| c.is_singular()).collect();
        Ok(ParamTetMesh { cells, classes, scale })
    }

    pub fn topo(&self) -> &Topology {
        &self.cells.topo
    }

    pub fn cells(&self) -> &CellMesh {
        &self.cells
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.cells.positions
    }

    pub fn tets(&self) -> &[Vec<u32>] {
        &self.cells.topo.cells
    }

    pub fn n_tets(&self) -> usize {
        self.cells.n_cells()
    }

    /// Parameter coordinates of the four corners of tet `t`.
    pub fn tet_params(&self, t: u32) -> [Vec3; 4] {
        let p = &self.cells.params[t as usize];
        [p[0], p[1], p[2], p[3]]
    }

    /// Largest extent of the parameter domain, at least 1.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn edge_class(&self, e: u32) -> EdgeClass {
        self.classes[e as usize]
    }

    pub fn singular_edges(&self) -> Vec<u32> {
        (0..self.classes.len() as u32).filter(|&e| self.classes[e as usize].is_singular()).collect()
    }

    /// Singular edges as sorted vertex pairs, comparable across meshes.
    pub fn singular_vertex_pairs(&self) -> Vec<[u32; 2]> {
        self.singular_edges().into_iter().map(|e| self.cells.topo.edges[e as usize]).collect()
    }

    /// Axis in which boundary facet `f` is constant, within tolerance.
    pub fn boundary_axis(&self, f: u32) -> Option<usize> {
        let fr = &self.cells.topo.facets[f as usize];
        if !fr.is_boundary() {
            return None;
        }
        let p = self.cells.facet_params(f, fr.cells[0]);
        let tol = SEAMLESS_TOL * self.scale;
        (0..3)
            .map(|a| {
                let (lo, hi) = p.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), x| (l.min(x[a]), h.max(x[a])));
                (hi - lo, a)
            })
            .filter(|&(spread, _)| spread <= tol)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, a)| a)
    }
}

pub fn classify_tet_edge(pm: &ParamTetMesh, e: u32) -> EdgeClass {
    pm.edge_class(e)
}

/// Transition from the chart of the facet's first tet into the second.
pub fn facet_transition(pm: &ParamTetMesh, f: u32) -> Result<Transition> {
    if pm.topo().is_boundary_facet(f) {
        return Err(Error::Precondition(format!("facet {f} is on the boundary")));
    }
    Ok(pm.cells.transitions[f as usize])
}

/// Splits every hex into 24 tets around its face and cell centres. Hex
/// charts are unfolded by a breadth-first walk, so transitions differ from
/// the identity only where holonomy forces a cut.
pub fn hex_to_param(mesh: &HexMesh) -> ParamTetMesh {
    hex_to_param_warped(mesh, &|_| 0.0)
}

/// As [`hex_to_param`], with each face centre moved by `shift(f)` along the
/// face normal pointing out of its first cell. Shifts in `(-0.5, 0.5)` keep
/// every tet positive; nonzero shifts bend faces off their iso-planes.
pub fn hex_to_param_warped(mesh: &HexMesh, shift: &dyn Fn(u32) -> f64) -> ParamTetMesh {
    let topo = &mesh.topo;
    let cm = mesh.to_cell_mesh();
    let nh = mesh.n_hexes();
    let mut chart: Vec<Option<Transition>> = vec![None; nh];
    for root in 0..nh {
        if chart[root].is_some() {
            continue;
        }
        chart[root] = Some(Transition::identity());
        let mut q = VecDeque::from([root as u32]);
        while let Some(h) = q.pop_front() {
            let th = chart[h as usize].unwrap();
            for &f in &topo.cell_facets[h as usize] {
                let fr = &topo.facets[f as usize];
                if fr.is_boundary() {
                    continue;
                }
                let n = fr.other_cell(h);
                if chart[n as usize].is_none() {
                    chart[n as usize] = Some(th.compose(&cm.transition_from(f, n)));
                    q.push_back(n);
                }
            }
        }
    }
    let nv = topo.n_vertices as u32;
    let nf = topo.facets.len() as u32;
    let mut positions = mesh.positions.clone();
    for fr in &topo.facets {
        positions.push(fr.vertices.iter().map(|&v| mesh.positions[v as usize]).sum::<Vec3>() / 4.0);
    }
    for h in mesh.hexes() {
        positions.push(h.iter().map(|&v| mesh.positions[v as usize]).sum::<Vec3>() / 8.0);
    }
    let corner = |i: usize| Vec3::new(HEX_CORNERS[i][0] as f64, HEX_CORNERS[i][1] as f64, HEX_CORNERS[i][2] as f64);
    let mut tets = Vec::with_capacity(24 * nh);
    let mut params = Vec::with_capacity(24 * nh);
    for h in 0..nh as u32 {
        let t = chart[h as usize].unwrap();
        let cell_centre = nv + nf + h;
        let pc = t.apply(&Vec3::repeat(0.5));
        for (lf, loc) in topo.kind.local_facets().iter().enumerate() {
            let f = topo.cell_facets[h as usize][lf];
            let face_centre = nv + f;
            let local = loc.iter().map(|&i| corner(i)).sum::<Vec3>() / 4.0;
            let axis = (0..3).find(|&k| loc.iter().all(|&i| HEX_CORNERS[i][k] == HEX_CORNERS[loc[0]][k])).unwrap();
            let mut normal = Vec3::zeros();
            normal[axis] = if local[axis] > 0.5 { 1.0 } else { -1.0 };
            let s = if topo.facets[f as usize].cells[0] == h { shift(f) } else { -shift(f) };
            let pf = t.apply(&(local + normal * s));
            for k in 0..4 {
                let (i, j) = (loc[k], loc[(k + 1) % 4]);
                let (vi, vj) = (mesh.hexes()[h as usize][i], mesh.hexes()[h as usize][j]);
                let (pi, pj) = (t.apply(&corner(i)), t.apply(&corner(j)));
                let mut tet = [vi, vj, face_centre, cell_centre];
                let mut p = [pi, pj, pf, pc];
                let vol = (p[1] - p[0]).dot(&(p[2] - p[0]).cross(&(p[3] - p[0])));
                if vol < 0.0 {
                    tet.swap(0, 1);
                    p.swap(0, 1);
                }
                tets.push(tet);
                params.push(p);
            }
        }
    }
    ParamTetMesh::new(positions, tets, params).expect("hex-derived parametrization is seamless")
}
