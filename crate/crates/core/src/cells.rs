//! Meshes with a per-cell parametric chart. Hex meshes get unit-cube charts,
//! tet meshes carry their parametrization. Angles are measured in the charts
//! and expressed in quarter turns (dihedral, planar) or octants (solid).

use crate::octa::{Transition, Vec3};
use crate::topology::{Topology, NONE};
use std::f64::consts::FRAC_PI_2;

#[derive(Clone, Debug)]
pub struct CellMesh {
    pub topo: Topology,
    pub positions: Vec<Vec3>,
    pub params: Vec<Vec<Vec3>>,
    /// Per facet: chart of `cells[0]` to chart of `cells[1]`.
    pub transitions: Vec<Transition>,
    pub singular: Vec<bool>,
    dihedral: Vec<Vec<f64>>,
}

fn local_neighbours(topo: &Topology, i: usize) -> Vec<usize> {
    topo.kind
        .local_edges()
        .iter()
        .filter_map(|e| {
            if e[0] == i {
                Some(e[1])
            } else if e[1] == i {
                Some(e[0])
            } else {
                None
            }
        })
        .collect()
}

fn angle(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

impl CellMesh {
    pub fn new(
        topo: Topology,
        positions: Vec<Vec3>,
        params: Vec<Vec<Vec3>>,
        transitions: Vec<Transition>,
        singular: Vec<bool>,
    ) -> CellMesh {
        let dihedral = (0..topo.n_cells())
            .map(|c| {
                topo.kind
                    .local_edges()
                    .iter()
                    .map(|le| local_dihedral(&topo, &params[c], le[0], le[1]) / FRAC_PI_2)
                    .collect()
            })
            .collect();
        CellMesh { topo, positions, params, transitions, singular, dihedral }
    }

    pub fn n_cells(&self) -> usize {
        self.topo.n_cells()
    }

    pub fn param(&self, c: u32, v: u32) -> Vec3 {
        let i = self.topo.local_vertex(c, v).expect("vertex not in cell");
        self.params[c as usize][i]
    }

    /// Map from the chart of `c` to the chart of the cell across `f`.
    pub fn transition_from(&self, f: u32, c: u32) -> Transition {
        let fr = &self.topo.facets[f as usize];
        if fr.cells[0] == c {
            self.transitions[f as usize]
        } else {
            self.transitions[f as usize].inverse()
        }
    }

    /// Dihedral angle of cell `c` at edge `e`, in quarter turns.
    pub fn dihedral(&self, c: u32, e: u32) -> f64 {
        let le = self.topo.cell_edges[c as usize].iter().position(|&x| x == e).expect("edge not in cell");
        self.dihedral[c as usize][le]
    }

    /// Total dihedral angle around `e`, in quarter turns.
    pub fn edge_quarters(&self, e: u32) -> f64 {
        self.topo.fans[e as usize].cells.iter().map(|&c| self.dihedral(c, e)).sum()
    }

    /// Solid angle of cell `c` at its corner `v`, in octants.
    pub fn corner_solid(&self, c: u32, v: u32) -> f64 {
        let i = self.topo.local_vertex(c, v).expect("vertex not in cell");
        let p = &self.params[c as usize];
        let nb = local_neighbours(&self.topo, i);
        let a = p[nb[0]] - p[i];
        let b = p[nb[1]] - p[i];
        let d = p[nb[2]] - p[i];
        let (la, lb, ld) = (a.norm(), b.norm(), d.norm());
        let num = a.dot(&b.cross(&d)).abs();
        let den = la * lb * ld + a.dot(&b) * ld + a.dot(&d) * lb + b.dot(&d) * la;
        2.0 * num.atan2(den) / FRAC_PI_2
    }

    /// Interior angle of facet `f` at its vertex `v`, in quarter turns.
    pub fn facet_corner(&self, f: u32, v: u32) -> f64 {
        let fr = &self.topo.facets[f as usize];
        let n = fr.vertices.len();
        let i = fr.vertices.iter().position(|&x| x == v).expect("vertex not in facet");
        let c = fr.cells[0];
        let p = self.param(c, v);
        let a = self.param(c, fr.vertices[(i + 1) % n]) - p;
        let b = self.param(c, fr.vertices[(i + n - 1) % n]) - p;
        angle(&a, &b) / FRAC_PI_2
    }

    pub fn edge_length(&self, e: u32) -> f64 {
        let [a, b] = self.topo.edges[e as usize];
        let c = self.topo.fans[e as usize].cells[0];
        (self.param(c, b) - self.param(c, a)).norm()
    }

    pub fn other_cell(&self, f: u32, c: u32) -> u32 {
        self.topo.facets[f as usize].other_cell(c)
    }

    pub fn is_interior_facet(&self, f: u32) -> bool {
        self.topo.facets[f as usize].cells[1] != NONE
    }

    /// Parametric image of facet `f` in the chart of `c`.
    pub fn facet_params(&self, f: u32, c: u32) -> Vec<Vec3> {
        self.topo.facets[f as usize].vertices.iter().map(|&v| self.param(c, v)).collect()
    }
}

fn local_dihedral(topo: &Topology, p: &[Vec3], a: usize, b: usize) -> f64 {
    let axis = (p[b] - p[a]).normalize();
    let others: Vec<usize> = local_neighbours(topo, a).into_iter().filter(|&x| x != b).collect();
    let proj = |x: usize| {
        let v = p[x] - p[a];
        v - axis * axis.dot(&v)
    };
    angle(&proj(others[0]), &proj(others[1]))
}
