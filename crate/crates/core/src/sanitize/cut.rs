use crate::error::{Error, Result};
use crate::octa::{Rotation, Transition};
use crate::tet::{ParamTetMesh, SEAMLESS_TOL};
use crate::topology::{Topology, NONE};
use std::collections::BTreeSet;

/// Sectors around every vertex: tets sharing a value at the vertex because
/// they are connected across non-cut facets. Sector ids are vertex-major.
#[derive(Clone, Debug)]
pub struct Sectors {
    /// Sector of each tet corner, in local corner order.
    pub corner: Vec<[u32; 4]>,
    /// Vertex of each sector.
    pub vertex: Vec<u32>,
    /// `first[v]..first[v + 1]` are the sectors of vertex `v`.
    pub first: Vec<u32>,
}

impl Sectors {
    pub fn of(&self, topo: &Topology, tet: u32, v: u32) -> u32 {
        self.corner[tet as usize][topo.local_vertex(tet, v).expect("vertex of tet")]
    }

    pub fn at(&self, v: u32) -> std::ops::Range<u32> {
        self.first[v as usize]..self.first[v as usize + 1]
    }

    pub fn len(&self) -> usize {
        self.vertex.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SheetKind {
    Cut,
    Align { axis: usize },
}

#[derive(Clone, Debug)]
pub struct Sheet {
    pub kind: SheetKind,
    pub facets: Vec<u32>,
    /// Rotational part of the sheet transition, minus side to plus side.
    pub rotation: Rotation,
    /// Node vertices on the sheet, ascending; the first is the base node.
    pub nodes: Vec<u32>,
}

impl Sheet {
    pub fn base(&self) -> u32 {
        self.nodes[0]
    }
}

#[derive(Clone, Debug)]
pub struct CutStructure {
    /// Intended transition per facet, `cells[0]` to `cells[1]`.
    pub transitions: Vec<Transition>,
    pub cut_facets: Vec<bool>,
    pub cut_edges: Vec<bool>,
    pub nodes: Vec<bool>,
    /// Nodes added on circular and loop branches or node-poor sheets.
    pub aux_nodes: Vec<u32>,
    /// Vertex chains of cut edges between nodes.
    pub branches: Vec<Vec<u32>>,
    pub sheets: Vec<Sheet>,
    /// Sheet of each cut or boundary facet, `NONE` otherwise.
    pub facet_sheet: Vec<u32>,
    /// Cell on the minus side of each cut facet; the boundary cell for
    /// boundary facets.
    pub minus_cell: Vec<u32>,
    pub sectors: Sectors,
}

impl CutStructure {
    pub fn n_cut_sheets(&self) -> usize {
        self.sheets.iter().filter(|s| s.kind == SheetKind::Cut).count()
    }

    pub fn n_align_sheets(&self) -> usize {
        self.sheets.len() - self.n_cut_sheets()
    }

    pub fn node_list(&self) -> Vec<u32> {
        (0..self.nodes.len() as u32).filter(|&v| self.nodes[v as usize]).collect()
    }

    pub fn plus_cell(&self, topo: &Topology, f: u32) -> u32 {
        topo.facets[f as usize].other_cell(self.minus_cell[f as usize])
    }

    /// Transition of facet `f` from its minus side to its plus side.
    pub fn oriented(&self, topo: &Topology, f: u32) -> Transition {
        let t = self.transitions[f as usize];
        if self.minus_cell[f as usize] == topo.facets[f as usize].cells[0] {
            t
        } else {
            t.inverse()
        }
    }
}

fn sectors(pm: &ParamTetMesh, cut: &[bool]) -> Sectors {
    let topo = pm.topo();
    let mut corner = vec![[NONE; 4]; topo.n_cells()];
    let mut vertex = Vec::new();
    let mut first = Vec::with_capacity(topo.n_vertices + 1);
    for v in 0..topo.n_vertices as u32 {
        first.push(vertex.len() as u32);
        let star = &topo.vertex_cells[v as usize];
        let mut label = vec![NONE; star.len()];
        for start in 0..star.len() {
            if label[start] != NONE {
                continue;
            }
            let id = vertex.len() as u32;
            vertex.push(v);
            label[start] = id;
            let mut stack = vec![start];
            while let Some(i) = stack.pop() {
                let c = star[i];
                for &f in &topo.cell_facets[c as usize] {
                    let fr = &topo.facets[f as usize];
                    if fr.is_boundary() || cut[f as usize] || !fr.vertices.contains(&v) {
                        continue;
                    }
                    let n = fr.other_cell(c);
                    let j = star.iter().position(|&x| x == n).unwrap();
                    if label[j] == NONE {
                        label[j] = id;
                        stack.push(j);
                    }
                }
            }
        }
        for (i, &c) in star.iter().enumerate() {
            corner[c as usize][topo.local_vertex(c, v).unwrap()] = label[i];
        }
    }
    first.push(vertex.len() as u32);
    Sectors { corner, vertex, first }
}

fn walk_branches(topo: &Topology, cut_edges: &[bool], nodes: &[bool]) -> (Vec<Vec<u32>>, Vec<bool>) {
    let mut used = vec![false; topo.edges.len()];
    let mut branches = Vec::new();
    let next_edge = |v: u32, used: &[bool]| {
        topo.vertex_edges[v as usize].iter().copied().find(|&e| cut_edges[e as usize] && !used[e as usize])
    };
    for v in 0..topo.n_vertices as u32 {
        if !nodes[v as usize] {
            continue;
        }
        while let Some(e) = next_edge(v, &used) {
            let mut chain = vec![v];
            let (mut cur, mut e) = (v, e);
            loop {
                used[e as usize] = true;
                let [a, b] = topo.edges[e as usize];
                cur = if a == cur { b } else { a };
                chain.push(cur);
                if nodes[cur as usize] {
                    break;
                }
                match next_edge(cur, &used) {
                    Some(n) => e = n,
                    None => break,
                }
            }
            branches.push(chain);
        }
    }
    (branches, used)
}

/// Walks branches, adding one node on each loop branch and the two lowest
/// vertices on each circular branch, then walks again.
fn insert_aux_nodes(topo: &Topology, cut_edges: &[bool], nodes: &mut [bool]) -> (Vec<Vec<u32>>, Vec<u32>) {
    let (branches, used) = walk_branches(topo, cut_edges, nodes);
    let mut extra = BTreeSet::new();
    for b in &branches {
        if b.len() > 2 && b[0] == *b.last().unwrap() {
            extra.insert(*b[1..b.len() - 1].iter().min().unwrap());
        }
    }
    let mut seen = vec![false; topo.n_vertices];
    for e in 0..topo.edges.len() {
        if !cut_edges[e] || used[e] || seen[topo.edges[e][0] as usize] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut stack = vec![topo.edges[e][0]];
        seen[topo.edges[e][0] as usize] = true;
        while let Some(v) = stack.pop() {
            cycle.push(v);
            for &e2 in &topo.vertex_edges[v as usize] {
                if cut_edges[e2 as usize] && !used[e2 as usize] {
                    let [a, b] = topo.edges[e2 as usize];
                    let w = if a == v { b } else { a };
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
        }
        cycle.sort_unstable();
        extra.extend(cycle.iter().take(2));
    }
    if extra.is_empty() {
        return (branches, Vec::new());
    }
    for &v in &extra {
        nodes[v as usize] = true;
    }
    (walk_branches(topo, cut_edges, nodes).0, extra.into_iter().collect())
}

/// Cut facets, cut edges, nodes, branches, sheets and sectors of a
/// parametrization whose transitions were fit within tolerance.
pub fn detect_cut_structure(pm: &ParamTetMesh) -> Result<CutStructure> {
    let topo = pm.topo();
    let tol = SEAMLESS_TOL * pm.scale();
    let nf = topo.facets.len();
    let transitions = pm.cells().transitions.clone();
    let cut_facets: Vec<bool> =
        (0..nf).map(|f| !topo.facets[f].is_boundary() && !transitions[f].is_identity(tol)).collect();
    let mut axis = vec![None; nf];
    for f in 0..nf as u32 {
        if topo.is_boundary_facet(f) {
            axis[f as usize] = Some(
                pm.boundary_axis(f)
                    .ok_or_else(|| Error::Precondition(format!("boundary facet {f} is not aligned to a parameter plane")))?,
            );
        }
    }

    let cut_edges: Vec<bool> = (0..topo.edges.len() as u32)
        .map(|e| {
            let fan = &topo.fans[e as usize];
            let n_cut = fan.facets.iter().filter(|&&f| cut_facets[f as usize]).count();
            if pm.edge_class(e).is_singular() || n_cut == 1 || n_cut > 2 {
                return true;
            }
            if !fan.closed {
                let (a, b) = (fan.facets[0], *fan.facets.last().unwrap());
                return n_cut > 0 || axis[a as usize] != axis[b as usize];
            }
            false
        })
        .collect();

    let mut nodes = vec![false; topo.n_vertices];
    for v in 0..topo.n_vertices {
        let incident: Vec<u32> = topo.vertex_edges[v].iter().copied().filter(|&e| cut_edges[e as usize]).collect();
        nodes[v] = incident.len() == 1
            || incident.len() > 2
            || (topo.vertex_boundary[v] && incident.iter().any(|&e| !topo.is_boundary_edge(e)));
    }

    let (branches, mut aux_nodes) = insert_aux_nodes(topo, &cut_edges, &mut nodes);

    let sectors = sectors(pm, &cut_facets);
    let mut facet_sheet = vec![NONE; nf];
    let mut minus_cell = vec![NONE; nf];
    let mut sheets: Vec<Sheet> = Vec::new();
    for start in 0..nf as u32 {
        let boundary = topo.is_boundary_facet(start);
        if facet_sheet[start as usize] != NONE || !(boundary || cut_facets[start as usize]) {
            continue;
        }
        let id = sheets.len() as u32;
        facet_sheet[start as usize] = id;
        minus_cell[start as usize] = topo.facets[start as usize].cells[0];
        let (kind, rotation) = if boundary {
            (SheetKind::Align { axis: axis[start as usize].unwrap() }, Rotation::IDENTITY)
        } else {
            (SheetKind::Cut, transitions[start as usize].rotation)
        };
        let reference = transitions[start as usize];
        let mut facets = vec![start];
        let mut stack = vec![start];
        while let Some(f) = stack.pop() {
            for &e in &topo.facet_edges[f as usize] {
                if cut_edges[e as usize] {
                    continue;
                }
                let fan = &topo.fans[e as usize];
                let (g, g_minus) = if boundary {
                    let g = if fan.facets[0] == f { *fan.facets.last().unwrap() } else { fan.facets[0] };
                    (g, topo.facets[g as usize].cells[0])
                } else {
                    let n = fan.facets.len();
                    let i = fan.position(f).unwrap();
                    let Some(j) = (1..n).map(|k| (i + k) % n).find(|&j| cut_facets[fan.facets[j] as usize]) else {
                        continue;
                    };
                    let g_minus = if minus_cell[f as usize] == fan.cells[i] { fan.cells[(j + n - 1) % n] } else { fan.cells[j] };
                    (fan.facets[j], g_minus)
                };
                if facet_sheet[g as usize] == NONE {
                    facet_sheet[g as usize] = id;
                    minus_cell[g as usize] = g_minus;
                    if !boundary {
                        let t = if g_minus == topo.facets[g as usize].cells[0] {
                            transitions[g as usize]
                        } else {
                            transitions[g as usize].inverse()
                        };
                        let r = if minus_cell[start as usize] == topo.facets[start as usize].cells[0] {
                            reference
                        } else {
                            reference.inverse()
                        };
                        if t.rotation != r.rotation || (t.translation - r.translation).amax() > tol {
                            return Err(Error::NotSeamless(format!(
                                "facets {start} and {g} share a cut sheet but have different transitions"
                            )));
                        }
                    }
                    facets.push(g);
                    stack.push(g);
                } else if facet_sheet[g as usize] == id && minus_cell[g as usize] != g_minus {
                    return Err(Error::NotSeamless(format!("cut sheet through facet {g} is not orientable")));
                }
            }
        }
        facets.sort_unstable();
        sheets.push(Sheet { kind, facets, rotation, nodes: Vec::new() });
    }

    for sheet in &mut sheets {
        let verts: BTreeSet<u32> =
            sheet.facets.iter().flat_map(|&f| topo.facets[f as usize].vertices.iter().copied()).collect();
        sheet.nodes = verts.iter().copied().filter(|&v| nodes[v as usize]).collect();
        for &v in &verts {
            if sheet.nodes.len() >= 2 {
                break;
            }
            if !nodes[v as usize] {
                nodes[v as usize] = true;
                aux_nodes.push(v);
                sheet.nodes.push(v);
                sheet.nodes.sort_unstable();
            }
        }
    }
    // nodes added for node-poor sheets may lie on other sheets
    for sheet in &mut sheets {
        let verts: BTreeSet<u32> =
            sheet.facets.iter().flat_map(|&f| topo.facets[f as usize].vertices.iter().copied()).collect();
        sheet.nodes = verts.into_iter().filter(|&v| nodes[v as usize]).collect();
    }
    aux_nodes.sort_unstable();

    Ok(CutStructure {
        transitions,
        cut_facets,
        cut_edges,
        nodes,
        aux_nodes,
        branches,
        sheets,
        facet_sheet,
        minus_cell,
        sectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn circular_branch_gains_two_nodes() {
        let m = fixtures::hex_ring(8, 1, 0);
        let topo = &m.topo;
        // the outer top rim of the ring, a closed chain with no node on it
        let top = m.positions.iter().map(|p| p.z).fold(f64::MIN, f64::max);
        let rim: Vec<bool> = topo
            .edges
            .iter()
            .map(|&[a, b]| {
                let (p, q) = (m.positions[a as usize], m.positions[b as usize]);
                p.z == top && q.z == top && p.xy().norm() > 4.0 && q.xy().norm() > 4.0
            })
            .collect();
        assert_eq!(rim.iter().filter(|&&x| x).count(), 8);
        let mut nodes = vec![false; topo.n_vertices];
        let (branches, aux) = insert_aux_nodes(topo, &rim, &mut nodes);
        assert_eq!(aux.len(), 2);
        assert_eq!(branches.len(), 2);
        assert_eq!(branches.iter().map(|b| b.len() - 1).sum::<usize>(), 8);
        let mut rim_verts: Vec<u32> = (0..topo.edges.len()).filter(|&e| rim[e]).flat_map(|e| topo.edges[e]).collect();
        rim_verts.sort_unstable();
        rim_verts.dedup();
        assert_eq!(aux, rim_verts[..2].to_vec());
    }

    #[test]
    fn loop_branch_gains_one_node() {
        let pm = crate::tet::hex_to_param(&fixtures::hex_ring(8, 2, 0));
        let cs = detect_cut_structure(&pm).unwrap();
        assert_eq!(cs.aux_nodes.len(), 4);
        assert!(cs.branches.iter().all(|b| b[0] != *b.last().unwrap()));
    }
}
