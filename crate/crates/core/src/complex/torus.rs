use super::extract::extract_complex;
use super::{BlockType, MotorcycleComplex};
use crate::cells::CellMesh;
use crate::error::{Error, Result};

/// Continuation of facet `g` straight across edge `e`: the facet reached
/// after half a turn around `e`.
fn straight_across(mesh: &CellMesh, e: u32, g: u32) -> Option<u32> {
    let fan = &mesh.topo.fans[e as usize];
    if !fan.closed {
        return None;
    }
    let n = fan.facets.len();
    let i = fan.position(g)?;
    let mut acc = 0.0;
    for k in 0..n {
        acc += mesh.dihedral(fan.cells[(i + k) % n], e);
        if (acc - 2.0).abs() < 1e-6 {
            return Some(fan.facets[(i + k + 1) % n]);
        }
        if acc > 2.0 {
            return None;
        }
    }
    None
}

/// Lowest `(vertex, edge)` pair on the arcs bounding block `b`.
pub fn cut_site(mc: &MotorcycleComplex, b: usize) -> Result<(u32, u32)> {
    let mut vertex_edge: Option<(u32, u32)> = None;
    for &w in &mc.blocks[b].walls {
        for &a in &mc.walls[w as usize].arcs {
            let arc = &mc.arcs[a as usize];
            for (i, &e) in arc.edges.iter().enumerate() {
                for v in [arc.vertices[i], arc.vertices[i + 1]] {
                    if vertex_edge.is_none_or(|(bv, be)| (v, e) < (bv, be)) {
                        vertex_edge = Some((v, e));
                    }
                }
            }
        }
    }
    vertex_edge.ok_or_else(|| Error::Unsupported(format!("toroidal block {b} has no arc on its boundary")))
}

/// Cut every toroidal block by a wall through the lowest vertex on its arcs,
/// orthogonal to the arc there. Returns the new complex and the number of
/// cuts made.
pub fn split_tori(mesh: &CellMesh, mut mc: MotorcycleComplex) -> Result<(MotorcycleComplex, usize)> {
    let topo = &mesh.topo;
    let mut splits = 0;
    while let Some(b) = mc.blocks.iter().position(|blk| matches!(blk.kind, Some(BlockType::Toroidal { .. }))) {
        let (v, e) = cut_site(&mc, b)?;
        let [ea, eb] = topo.edges[e as usize];
        let mut seed = None;
        for &c in &topo.fans[e as usize].cells {
            if mc.cell_block[c as usize] != b as u32 {
                continue;
            }
            let dir = mesh.param(c, eb) - mesh.param(c, ea);
            let p = mesh.param(c, v);
            for &f in &topo.cell_facets[c as usize] {
                let fr = &topo.facets[f as usize];
                if mc.tagged[f as usize] || fr.is_boundary() || !fr.vertices.contains(&v) {
                    continue;
                }
                if fr.vertices.iter().all(|&u| (mesh.param(c, u) - p).dot(&dir).abs() < 1e-9) {
                    seed = Some(seed.map_or(f, |s: u32| s.min(f)));
                }
            }
        }
        let Some(seed) = seed else {
            return Err(Error::Unsupported(format!("no cross-section facet through vertex {v} in toroidal block {b}")));
        };
        let mut tagged = mc.tagged.clone();
        let on_wall =
            |x: u32| -> bool { topo.fans[x as usize].facets.iter().any(|&f| mc.tagged[f as usize]) };
        let mut stack = vec![seed];
        tagged[seed as usize] = true;
        while let Some(g) = stack.pop() {
            for &x in &topo.facet_edges[g as usize] {
                if on_wall(x) {
                    continue;
                }
                let h = straight_across(mesh, x, g).ok_or_else(|| {
                    Error::Unsupported(format!("cut plane of toroidal block {b} is not resolved by mesh facets"))
                })?;
                if !tagged[h as usize] {
                    tagged[h as usize] = true;
                    stack.push(h);
                }
            }
        }
        let mut d = mc.d.clone();
        for f in 0..tagged.len() {
            if tagged[f] && !mc.tagged[f] {
                d[f] = 0.0;
            }
        }
        splits += 1;
        let next = extract_complex(mesh, &tagged, &d)?;
        if matches!(next.blocks.get(next.cell_block[mc.blocks[b].cells[0] as usize] as usize).and_then(|x| x.kind), Some(BlockType::Toroidal { .. })) {
            return Err(Error::Integrity(format!("cutting toroidal block {b} did not produce a cuboid")));
        }
        mc = next;
    }
    Ok((mc, splits))
}
