//! Cell/facet/edge/vertex incidence shared by hexahedral and tetrahedral
//! meshes. Facets and edges are numbered in lexicographic order of their
//! sorted vertex ids, so ids are reproducible across runs.

use crate::error::{Error, Result};
use std::collections::HashMap;

pub const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellKind {
    Tet,
    Hex,
}

// VTK hexahedron: bottom 0-1-2-3, top 4-5-6-7, corner i at unit-cube
// position HEX_CORNERS[i].
pub const HEX_CORNERS: [[i64; 3]; 8] =
    [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0, 0, 1], [1, 0, 1], [1, 1, 1], [0, 1, 1]];
const HEX_FACETS: [&[usize]; 6] =
    [&[0, 3, 2, 1], &[4, 5, 6, 7], &[0, 1, 5, 4], &[2, 3, 7, 6], &[0, 4, 7, 3], &[1, 2, 6, 5]];
const HEX_EDGES: [[usize; 2]; 12] =
    [[0, 1], [1, 2], [2, 3], [3, 0], [4, 5], [5, 6], [6, 7], [7, 4], [0, 4], [1, 5], [2, 6], [3, 7]];
const TET_FACETS: [&[usize]; 4] = [&[1, 2, 3], &[0, 3, 2], &[0, 1, 3], &[0, 2, 1]];
const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

impl CellKind {
    pub fn n_vertices(self) -> usize {
        match self {
            CellKind::Tet => 4,
            CellKind::Hex => 8,
        }
    }

    pub fn local_facets(self) -> &'static [&'static [usize]] {
        match self {
            CellKind::Tet => &TET_FACETS,
            CellKind::Hex => &HEX_FACETS,
        }
    }

    pub fn local_edges(self) -> &'static [[usize; 2]] {
        match self {
            CellKind::Tet => &TET_EDGES,
            CellKind::Hex => &HEX_EDGES,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Facet {
    /// Vertices in the cyclic order of the lowest-id incident cell.
    pub vertices: Vec<u32>,
    /// Incident cells; `cells[1] == NONE` on the boundary.
    pub cells: [u32; 2],
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.cells[1] == NONE
    }

    pub fn other_cell(&self, c: u32) -> u32 {
        if self.cells[0] == c {
            self.cells[1]
        } else {
            self.cells[0]
        }
    }
}

/// Ordered alternating sequence of facets and cells around an edge.
///
/// Closed fans: cell `i` lies between `facets[i]` and `facets[(i+1) % n]`.
/// Open (boundary) fans: `facets.len() == cells.len() + 1`, the first and
/// last facets are boundary facets.
#[derive(Clone, Debug, Default)]
pub struct Fan {
    pub facets: Vec<u32>,
    pub cells: Vec<u32>,
    pub closed: bool,
}

impl Fan {
    pub fn position(&self, f: u32) -> Option<usize> {
        self.facets.iter().position(|&x| x == f)
    }
}

#[derive(Clone, Debug)]
pub struct Topology {
    pub kind: CellKind,
    pub n_vertices: usize,
    pub cells: Vec<Vec<u32>>,
    pub facets: Vec<Facet>,
    pub edges: Vec<[u32; 2]>,
    pub cell_facets: Vec<Vec<u32>>,
    pub cell_edges: Vec<Vec<u32>>,
    pub facet_edges: Vec<Vec<u32>>,
    pub fans: Vec<Fan>,
    pub vertex_cells: Vec<Vec<u32>>,
    pub vertex_edges: Vec<Vec<u32>>,
    pub vertex_boundary: Vec<bool>,
    facet_index: HashMap<Vec<u32>, u32>,
    edge_index: HashMap<(u32, u32), u32>,
}

fn sorted(v: &[u32]) -> Vec<u32> {
    let mut k = v.to_vec();
    k.sort_unstable();
    k
}

fn edge_key(a: u32, b: u32) -> (u32, u32) {
    (a.min(b), a.max(b))
}

impl Topology {
    pub fn build(kind: CellKind, n_vertices: usize, cells: Vec<Vec<u32>>) -> Result<Topology> {
        let nv = kind.n_vertices();
        for (ci, c) in cells.iter().enumerate() {
            if c.len() != nv {
                return Err(Error::Precondition(format!("cell {ci} has {} vertices, expected {nv}", c.len())));
            }
            for &v in c {
                if v as usize >= n_vertices {
                    return Err(Error::VertexOutOfRange { vertex: v, count: n_vertices });
                }
            }
            let s = sorted(c);
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::DegenerateCell { cell: ci });
            }
        }

        // facets
        let mut facet_incidence: HashMap<Vec<u32>, Vec<(u32, usize)>> = HashMap::new();
        for (ci, c) in cells.iter().enumerate() {
            for (lf, loc) in kind.local_facets().iter().enumerate() {
                let verts: Vec<u32> = loc.iter().map(|&i| c[i]).collect();
                facet_incidence.entry(sorted(&verts)).or_default().push((ci as u32, lf));
            }
        }
        let mut keys: Vec<Vec<u32>> = facet_incidence.keys().cloned().collect();
        keys.sort();
        let mut facets = Vec::with_capacity(keys.len());
        let mut facet_index = HashMap::with_capacity(keys.len());
        let mut cell_facets = vec![vec![NONE; kind.local_facets().len()]; cells.len()];
        for (fi, key) in keys.into_iter().enumerate() {
            let inc = &facet_incidence[&key];
            if inc.len() > 2 {
                return Err(Error::NonManifoldFacet { vertices: key, cells: inc.len() });
            }
            let (c0, lf0) = inc[0];
            let vertices = kind.local_facets()[lf0].iter().map(|&i| cells[c0 as usize][i]).collect();
            let c1 = inc.get(1).map(|x| x.0).unwrap_or(NONE);
            for &(c, lf) in inc {
                cell_facets[c as usize][lf] = fi as u32;
            }
            facets.push(Facet { vertices, cells: [c0, c1] });
            facet_index.insert(key, fi as u32);
        }

        // edges
        let mut ekeys: Vec<(u32, u32)> = Vec::new();
        for c in &cells {
            for e in kind.local_edges() {
                ekeys.push(edge_key(c[e[0]], c[e[1]]));
            }
        }
        ekeys.sort_unstable();
        ekeys.dedup();
        let edge_index: HashMap<(u32, u32), u32> =
            ekeys.iter().enumerate().map(|(i, &k)| (k, i as u32)).collect();
        let edges: Vec<[u32; 2]> = ekeys.iter().map(|&(a, b)| [a, b]).collect();
        let cell_edges: Vec<Vec<u32>> = cells
            .iter()
            .map(|c| kind.local_edges().iter().map(|e| edge_index[&edge_key(c[e[0]], c[e[1]])]).collect())
            .collect();
        let facet_edges: Vec<Vec<u32>> = facets
            .iter()
            .map(|f| {
                let n = f.vertices.len();
                (0..n).map(|i| edge_index[&edge_key(f.vertices[i], f.vertices[(i + 1) % n])]).collect()
            })
            .collect();

        let mut edge_facets: Vec<Vec<u32>> = vec![Vec::new(); edges.len()];
        for (fi, fe) in facet_edges.iter().enumerate() {
            for &e in fe {
                edge_facets[e as usize].push(fi as u32);
            }
        }
        let mut edge_cells: Vec<Vec<u32>> = vec![Vec::new(); edges.len()];
        for (ci, ce) in cell_edges.iter().enumerate() {
            for &e in ce {
                edge_cells[e as usize].push(ci as u32);
            }
        }

        let mut fans = Vec::with_capacity(edges.len());
        for e in 0..edges.len() {
            fans.push(build_fan(e as u32, &edges, &facets, &edge_facets[e], &edge_cells[e], &cell_facets)?);
        }

        let mut vertex_cells = vec![Vec::new(); n_vertices];
        for (ci, c) in cells.iter().enumerate() {
            for &v in c {
                vertex_cells[v as usize].push(ci as u32);
            }
        }
        let mut vertex_edges = vec![Vec::new(); n_vertices];
        for (ei, e) in edges.iter().enumerate() {
            vertex_edges[e[0] as usize].push(ei as u32);
            vertex_edges[e[1] as usize].push(ei as u32);
        }
        for (v, star) in vertex_cells.iter().enumerate() {
            if !star_connected(v as u32, star, &cells, &cell_facets, &facets, kind) {
                return Err(Error::NonManifoldVertex(v as u32));
            }
        }
        let mut vertex_boundary = vec![false; n_vertices];
        for f in facets.iter().filter(|f| f.is_boundary()) {
            for &v in &f.vertices {
                vertex_boundary[v as usize] = true;
            }
        }

        Ok(Topology {
            kind,
            n_vertices,
            cells,
            facets,
            edges,
            cell_facets,
            cell_edges,
            facet_edges,
            fans,
            vertex_cells,
            vertex_edges,
            vertex_boundary,
            facet_index,
            edge_index,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn facet_id(&self, verts: &[u32]) -> Option<u32> {
        self.facet_index.get(&sorted(verts)).copied()
    }

    pub fn edge_id(&self, a: u32, b: u32) -> Option<u32> {
        self.edge_index.get(&edge_key(a, b)).copied()
    }

    pub fn is_boundary_edge(&self, e: u32) -> bool {
        !self.fans[e as usize].closed
    }

    pub fn is_boundary_facet(&self, f: u32) -> bool {
        self.facets[f as usize].is_boundary()
    }

    /// Local corner index of vertex `v` in cell `c`.
    pub fn local_vertex(&self, c: u32, v: u32) -> Option<usize> {
        self.cells[c as usize].iter().position(|&x| x == v)
    }

    pub fn facet_has_edge(&self, f: u32, e: u32) -> bool {
        self.facet_edges[f as usize].contains(&e)
    }

    pub fn facet_vertex_set(&self, f: u32) -> Vec<u32> {
        sorted(&self.facets[f as usize].vertices)
    }
}

fn star_connected(
    v: u32,
    star: &[u32],
    cells: &[Vec<u32>],
    cell_facets: &[Vec<u32>],
    facets: &[Facet],
    kind: CellKind,
) -> bool {
    if star.len() <= 1 {
        return true;
    }
    let mut seen = vec![star[0]];
    let mut stack = vec![star[0]];
    while let Some(c) = stack.pop() {
        for (lf, loc) in kind.local_facets().iter().enumerate() {
            if !loc.iter().any(|&i| cells[c as usize][i] == v) {
                continue;
            }
            let n = facets[cell_facets[c as usize][lf] as usize].other_cell(c);
            if n != NONE && !seen.contains(&n) {
                seen.push(n);
                stack.push(n);
            }
        }
    }
    seen.len() == star.len()
}

fn build_fan(
    e: u32,
    edges: &[[u32; 2]],
    facets: &[Facet],
    efacets: &[u32],
    ecells: &[u32],
    cell_facets: &[Vec<u32>],
) -> Result<Fan> {
    let err = || Error::NonManifoldEdge(edges[e as usize][0], edges[e as usize][1]);
    // the two facets of each cell that contain e
    let cell_pair = |c: u32| -> Result<[u32; 2]> {
        let fs: Vec<u32> = cell_facets[c as usize].iter().copied().filter(|f| efacets.contains(f)).collect();
        if fs.len() != 2 {
            return Err(err());
        }
        Ok([fs[0], fs[1]])
    };
    let boundary: Vec<u32> = efacets.iter().copied().filter(|&f| facets[f as usize].is_boundary()).collect();
    let closed = match boundary.len() {
        0 => true,
        2 => false,
        _ => return Err(err()),
    };
    let start = if closed { *efacets.iter().min().ok_or_else(err)? } else { boundary[0].min(boundary[1]) };
    let mut fan = Fan { facets: vec![start], cells: Vec::new(), closed };
    let mut cur_f = start;
    let mut prev_c = NONE;
    loop {
        let fr = &facets[cur_f as usize];
        let next_c = if fr.cells[0] != prev_c { fr.cells[0] } else { fr.cells[1] };
        if next_c == NONE {
            break;
        }
        if closed && fan.cells.len() == ecells.len() {
            break;
        }
        fan.cells.push(next_c);
        let [a, b] = cell_pair(next_c)?;
        let nf = if a == cur_f { b } else { a };
        prev_c = next_c;
        cur_f = nf;
        if closed && nf == start {
            break;
        }
        fan.facets.push(nf);
        if fan.facets.len() > efacets.len() {
            return Err(err());
        }
    }
    if fan.cells.len() != ecells.len() || fan.facets.len() != efacets.len() {
        return Err(err());
    }
    if closed && fan.facets.len() != fan.cells.len() {
        return Err(err());
    }
    Ok(fan)
}
