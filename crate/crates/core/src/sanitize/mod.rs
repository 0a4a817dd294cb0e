//! Turns an almost seamless tet parametrization into an exactly seamless,
//! exactly boundary-aligned one with the same singularities.
//!
//! The cut structure reduces the seamlessness constraints to a small core
//! system over node sectors. That system is solved in exact rational
//! arithmetic with free variables snapped to a dyadic grid, so every
//! implied value is a float. Other vertices follow by applying the exact
//! sheet transitions sector by sector.

mod cut;
mod propagate;
mod system;

pub use cut::{detect_cut_structure, CutStructure, Sectors, Sheet, SheetKind};
pub use propagate::{propagate, sheet_data};
pub use system::{build_core_system, grid, residuals, solve_exact, CoreSystem, Occurrence};

use crate::error::Result;
use crate::octa::Vec3;
use crate::tet::ParamTetMesh;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationKind {
    /// Edge difference vectors across an interior facet disagree.
    Transition,
    /// A boundary edge is not constant in the facet's aligned coordinate.
    Alignment,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub kind: ViolationKind,
    pub facet: u32,
    pub edge: [u32; 2],
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ViolationKind::Transition => "transition",
            ViolationKind::Alignment => "alignment",
        };
        write!(f, "{kind} facet {} edge {} {}", self.facet, self.edge[0], self.edge[1])
    }
}

/// Every facet edge violating seamlessness under exact float equality.
pub fn verify_seamless(pm: &ParamTetMesh) -> Vec<Violation> {
    let topo = pm.topo();
    let cm = pm.cells();
    let mut out = Vec::new();
    for (f, fr) in topo.facets.iter().enumerate() {
        let n = fr.vertices.len();
        let edges = (0..n).map(|i| {
            let (a, b) = (fr.vertices[i], fr.vertices[(i + 1) % n]);
            [a.min(b), a.max(b)]
        });
        if fr.is_boundary() {
            let p = |v: u32| cm.param(fr.cells[0], v);
            let axis = pm.boundary_axis(f as u32);
            for e in edges {
                if axis.is_none_or(|k| p(e[0])[k] != p(e[1])[k]) {
                    out.push(Violation { kind: ViolationKind::Alignment, facet: f as u32, edge: e });
                }
            }
        } else {
            let r = cm.transitions[f].rotation;
            let (s, t) = (fr.cells[0], fr.cells[1]);
            for e in edges {
                let ds: Vec3 = cm.param(s, e[1]) - cm.param(s, e[0]);
                let dt: Vec3 = cm.param(t, e[1]) - cm.param(t, e[0]);
                if r.apply(&ds) != dt {
                    out.push(Violation { kind: ViolationKind::Transition, facet: f as u32, edge: e });
                }
            }
        }
    }
    out.sort_unstable();
    out
}

#[derive(Clone, Debug)]
pub struct SanitizeStats {
    pub n_nodes: usize,
    pub n_sheets: usize,
    pub n_vars: usize,
    pub n_rows: usize,
    /// Largest change of any corner value.
    pub max_change: f64,
}

pub fn sanitize(pm: &ParamTetMesh) -> Result<(ParamTetMesh, SanitizeStats)> {
    let cs = detect_cut_structure(pm)?;
    let sys = build_core_system(pm.topo(), &cs);
    let init = node_init(pm, &cs, &sys);
    let (values, h) = solve_exact(&sys, &init)?;
    let out = propagate(pm, &cs, &sys, &values, h)?;
    let mut max_change: f64 = 0.0;
    for t in 0..pm.n_tets() as u32 {
        for (a, b) in pm.tet_params(t).iter().zip(out.tet_params(t)) {
            max_change = max_change.max((a - b).amax());
        }
    }
    let stats = SanitizeStats {
        n_nodes: cs.node_list().len(),
        n_sheets: cs.sheets.len(),
        n_vars: sys.n_vars(),
        n_rows: sys.rows.len(),
        max_change,
    };
    Ok((out, stats))
}

/// Mean corner value of each node sector in the input.
pub fn node_init(pm: &ParamTetMesh, cs: &CutStructure, sys: &CoreSystem) -> Vec<Vec3> {
    let mut sum = vec![(Vec3::zeros(), 0.0); sys.node_sectors.len()];
    for t in 0..pm.n_tets() {
        let p = pm.tet_params(t as u32);
        for i in 0..4 {
            let s = cs.sectors.corner[t][i];
            if let Ok(k) = sys.node_sectors.binary_search(&s) {
                sum[k].0 += p[i];
                sum[k].1 += 1.0;
            }
        }
    }
    sum.into_iter().map(|(s, n)| s / n).collect()
}

#[cfg(test)]
pub(crate) mod tests;
