//! Hexahedral meshes with valence-based edge classification.

use crate::cells::CellMesh;
use crate::error::{Error, Result};
use crate::octa::{Transition, Vec3};
use crate::topology::{CellKind, Topology, HEX_CORNERS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Regular,
    Singular,
}

/// Edge classification. `k` counts the incident parametric dihedral angle in
/// quarter turns (equal to the valence for hex meshes).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeClass {
    pub kind: EdgeKind,
    pub k: i32,
}

impl EdgeClass {
    pub fn from_quarters(k: i32, boundary: bool) -> EdgeClass {
        let regular = if boundary { k == 2 } else { k == 4 };
        EdgeClass { kind: if regular { EdgeKind::Regular } else { EdgeKind::Singular }, k }
    }

    pub fn is_singular(&self) -> bool {
        self.kind == EdgeKind::Singular
    }
}

#[derive(Clone, Debug)]
pub struct HexMesh {
    pub topo: Topology,
    pub positions: Vec<Vec3>,
    classes: Vec<EdgeClass>,
}

impl HexMesh {
    pub fn n_hexes(&self) -> usize {
        self.topo.n_cells()
    }

    pub fn hexes(&self) -> &[Vec<u32>] {
        &self.topo.cells
    }

    pub fn edge_class(&self, e: u32) -> EdgeClass {
        self.classes[e as usize]
    }

    pub fn singular_edges(&self) -> Vec<u32> {
        (0..self.topo.edges.len() as u32).filter(|&e| self.classes[e as usize].is_singular()).collect()
    }

    /// Per-corner unit-cube charts with facet transitions recovered from the
    /// shared corners.
    pub fn to_cell_mesh(&self) -> CellMesh {
        let params: Vec<Vec<Vec3>> = (0..self.n_hexes())
            .map(|_| HEX_CORNERS.iter().map(|c| Vec3::new(c[0] as f64, c[1] as f64, c[2] as f64)).collect())
            .collect();
        let mut transitions = Vec::with_capacity(self.topo.facets.len());
        for f in &self.topo.facets {
            if f.is_boundary() {
                transitions.push(Transition::identity());
                continue;
            }
            let (a, b) = (f.cells[0], f.cells[1]);
            let src: Vec<Vec3> = f.vertices.iter().map(|&v| params[a as usize][self.topo.local_vertex(a, v).unwrap()]).collect();
            let dst: Vec<Vec3> = f.vertices.iter().map(|&v| params[b as usize][self.topo.local_vertex(b, v).unwrap()]).collect();
            transitions.push(Transition::fit_exact(&src, &dst).expect("unit cube charts always glue rigidly"));
        }
        let singular = self.classes.iter().map(|c| c.is_singular()).collect();
        CellMesh::new(self.topo.clone(), self.positions.clone(), params, transitions, singular)
    }
}

pub fn build_hex_connectivity(hexes: Vec<[u32; 8]>, positions: Vec<Vec3>) -> Result<HexMesh> {
    let cells = hexes.into_iter().map(|h| h.to_vec()).collect();
    let topo = Topology::build(CellKind::Hex, positions.len(), cells)?;
    let classes = (0..topo.edges.len())
        .map(|e| {
            let fan = &topo.fans[e];
            EdgeClass::from_quarters(fan.cells.len() as i32, !fan.closed)
        })
        .collect();
    Ok(HexMesh { topo, positions, classes })
}

pub fn classify_hex_edge(mesh: &HexMesh, e: u32) -> EdgeClass {
    mesh.edge_class(e)
}

/// Facet continuing `f` straight across the regular edge `e`.
pub fn opp_facet(mesh: &HexMesh, e: u32, f: u32) -> Result<Option<u32>> {
    if mesh.edge_class(e).is_singular() {
        return Err(Error::SingularEdge(e));
    }
    Ok(opp_in_fan(&mesh.topo, e, f))
}

/// Straight continuation in a regular fan: two steps along a closed fan of
/// four, or the other end of an open fan of three.
pub(crate) fn opp_in_fan(topo: &Topology, e: u32, f: u32) -> Option<u32> {
    let fan = &topo.fans[e as usize];
    let i = fan.position(f)?;
    let n = fan.facets.len();
    if fan.closed {
        (n == 4).then(|| fan.facets[(i + 2) % 4])
    } else if n == 3 {
        match i {
            0 => Some(fan.facets[2]),
            2 => Some(fan.facets[0]),
            _ => None,
        }
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn two_hexes_share_one_facet() {
        let m = fixtures::hex_box(2, 1, 1);
        assert_eq!(m.topo.facets.len(), 11);
        assert_eq!(m.topo.facets.iter().filter(|f| !f.is_boundary()).count(), 1);
    }

    #[test]
    fn lone_cube_edges_are_singular() {
        let m = fixtures::hex_box(1, 1, 1);
        assert!((0..12).all(|e| m.edge_class(e).is_singular()));
    }

    #[test]
    fn opp_is_an_involution() {
        let m = fixtures::hex_box(3, 3, 3);
        for e in 0..m.topo.edges.len() as u32 {
            if m.edge_class(e).is_singular() {
                continue;
            }
            for &f in &m.topo.fans[e as usize].facets {
                if let Some(g) = opp_facet(&m, e, f).unwrap() {
                    assert_eq!(opp_facet(&m, e, g).unwrap(), Some(f));
                }
            }
        }
    }

    #[test]
    fn boundary_fan_of_two_hexes() {
        let m = fixtures::hex_box(2, 1, 1);
        let e = m.topo.edge_id(1, 4).or_else(|| {
            (0..m.topo.edges.len() as u32).find(|&e| m.topo.fans[e as usize].cells.len() == 2 && !m.topo.fans[e as usize].closed)
        });
        let e = e.unwrap();
        let fan = m.topo.fans[e as usize].clone();
        assert_eq!(fan.facets.len(), 3);
        assert_eq!(opp_facet(&m, e, fan.facets[1]).unwrap(), None);
        assert_eq!(opp_facet(&m, e, fan.facets[0]).unwrap(), Some(fan.facets[2]));
    }

    #[test]
    fn singular_edge_has_no_opp() {
        let m = fixtures::hex_box(1, 1, 1);
        assert!(matches!(opp_facet(&m, 0, m.topo.fans[0].facets[0]), Err(Error::SingularEdge(0))));
    }
}
