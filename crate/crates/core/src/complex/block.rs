use super::extract::fan_sectors;
use super::{Block, BlockType, Wall};
use crate::cells::CellMesh;
use crate::dsu::Dsu;
use crate::octa::Transition;
use crate::topology::NONE;
use std::collections::{HashMap, VecDeque};

pub(super) fn analyse_blocks(
    mesh: &CellMesh,
    tagged: &[bool],
    cell_block: &[u32],
    n_blocks: usize,
    walls: &[Wall],
) -> Vec<Block> {
    let topo = &mesh.topo;
    let mut blocks: Vec<Block> = (0..n_blocks)
        .map(|_| Block { cells: Vec::new(), walls: Vec::new(), corners: Vec::new(), n_facets: 0, kind: None })
        .collect();
    for (c, &b) in cell_block.iter().enumerate() {
        blocks[b as usize].cells.push(c as u32);
    }
    for (wi, w) in walls.iter().enumerate() {
        for &b in &w.blocks {
            if b != NONE && !blocks[b as usize].walls.contains(&(wi as u32)) {
                blocks[b as usize].walls.push(wi as u32);
            }
        }
    }

    // corners: sectors of a block at a vertex spanning one octant
    for v in 0..topo.n_vertices as u32 {
        let star = &topo.vertex_cells[v as usize];
        let idx: HashMap<u32, u32> = star.iter().enumerate().map(|(i, &c)| (c, i as u32)).collect();
        let mut dsu = Dsu::new(star.len());
        for &c in star {
            for &f in &topo.cell_facets[c as usize] {
                let fr = &topo.facets[f as usize];
                if !tagged[f as usize] && !fr.is_boundary() && fr.vertices.contains(&v) {
                    dsu.union(idx[&fr.cells[0]], idx[&fr.cells[1]]);
                }
            }
        }
        let (label, n) = dsu.labels(|_| true);
        let mut solid = vec![0.0; n];
        let mut owner = vec![NONE; n];
        for (i, &c) in star.iter().enumerate() {
            solid[label[i] as usize] += mesh.corner_solid(c, v);
            owner[label[i] as usize] = cell_block[c as usize];
        }
        for k in 0..n {
            if solid[k].round() as i32 == 1 {
                blocks[owner[k] as usize].corners.push(v);
            }
        }
    }

    // block facets: half-facets joined across flat block edges
    let half = |f: u32, c: u32| -> u32 { 2 * f + u32::from(topo.facets[f as usize].cells[0] != c) };
    let mut hdsu = Dsu::new(2 * topo.facets.len());
    for e in 0..topo.edges.len() as u32 {
        for s in fan_sectors(mesh, tagged, e) {
            if s.quarters == 2 {
                hdsu.union(half(s.from, s.cells[0]), half(s.to, *s.cells.last().unwrap()));
            }
        }
    }
    let is_half = |h: u32| -> bool {
        let f = (h / 2) as usize;
        tagged[f] && topo.facets[f].cells[(h % 2) as usize] != NONE
    };
    let (hlabel, nh) = hdsu.labels(is_half);
    let mut seen = vec![false; nh];
    for h in 0..hlabel.len() {
        if hlabel[h] == NONE || seen[hlabel[h] as usize] {
            continue;
        }
        seen[hlabel[h] as usize] = true;
        let c = topo.facets[h / 2].cells[h % 2];
        blocks[cell_block[c as usize] as usize].n_facets += 1;
    }

    for b in 0..blocks.len() {
        let blk = &blocks[b];
        let kind = match blk.corners.len() {
            8 => Some(BlockType::Cuboid),
            0 => block_twist(mesh, tagged, cell_block, &blk.cells)
                .filter(|&t| blk.n_facets == annulus_facets(t))
                .map(|twist| BlockType::Toroidal { twist }),
            _ => None,
        };
        blocks[b].kind = kind;
    }
    blocks
}

/// Facet count of a toroidal block with the given twist.
pub fn annulus_facets(twist: i32) -> usize {
    match twist.rem_euclid(4) {
        0 => 4,
        2 => 2,
        _ => 1,
    }
}

/// Holonomy of the block's charts around its non-contractible loop, as a
/// signed quarter-turn count. `None` if every loop closes up trivially or
/// the holonomy is not a rotation about the translation direction.
fn block_twist(mesh: &CellMesh, tagged: &[bool], cell_block: &[u32], cells: &[u32]) -> Option<i32> {
    let topo = &mesh.topo;
    let b = cell_block[cells[0] as usize];
    let mut chart: HashMap<u32, Transition> = HashMap::new();
    chart.insert(cells[0], Transition::identity());
    let mut queue = VecDeque::from([cells[0]]);
    let mut holonomies = Vec::new();
    while let Some(c) = queue.pop_front() {
        let tc = chart[&c];
        for &f in &topo.cell_facets[c as usize] {
            let fr = &topo.facets[f as usize];
            if tagged[f as usize] || fr.is_boundary() {
                continue;
            }
            let n = fr.other_cell(c);
            debug_assert_eq!(cell_block[n as usize], b);
            let via = tc.compose(&mesh.transition_from(f, n));
            match chart.get(&n) {
                None => {
                    chart.insert(n, via);
                    queue.push_back(n);
                }
                Some(tn) => {
                    let h = via.compose(&tn.inverse());
                    if !h.is_identity(1e-9) {
                        holonomies.push(h);
                    }
                }
            }
        }
    }
    let h = holonomies.first()?;
    let t = h.translation;
    match h.rotation.trace() {
        3 => Some(0),
        -1 => Some(2),
        1 => {
            let a = h.rotation.axial_vector();
            let dot = a[0] as f64 * t.x + a[1] as f64 * t.y + a[2] as f64 * t.z;
            if dot.abs() < 1e-9 {
                None
            } else {
                Some(if dot > 0.0 { 1 } else { -1 })
            }
        }
        _ => None,
    }
}
