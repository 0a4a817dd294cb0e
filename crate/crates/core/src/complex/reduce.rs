use super::extract::{extract_complex, fan_sectors};
use super::MotorcycleComplex;
use crate::cells::CellMesh;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReduceMode {
    /// Only walls none of whose arcs are singular.
    Regular,
    Full,
}

/// Whether wall `w` can be retracted, merging its two blocks into a cuboid.
pub fn removable(mesh: &CellMesh, mc: &MotorcycleComplex, w: u32, mode: ReduceMode) -> bool {
    let wall = &mc.walls[w as usize];
    if wall.boundary || wall.annulus || wall.sides.is_none() || wall.blocks[0] == wall.blocks[1] {
        return false;
    }
    if mode == ReduceMode::Regular && wall.arcs.iter().any(|&a| mc.arcs[a as usize].singular) {
        return false;
    }
    for &a in &wall.arcs {
        for &e in &mc.arcs[a as usize].edges {
            for s in fan_sectors(mesh, &mc.tagged, e) {
                let touches = mc.facet_wall[s.from as usize] == w || mc.facet_wall[s.to as usize] == w;
                if touches && s.quarters != 1 {
                    return false;
                }
            }
        }
    }
    true
}

fn greedy(mesh: &CellMesh, mut mc: MotorcycleComplex, mode: ReduceMode, removed: &mut usize) -> Result<MotorcycleComplex> {
    loop {
        let best = (0..mc.walls.len() as u32)
            .filter(|&w| removable(mesh, &mc, w, mode))
            .max_by(|&a, &b| {
                let (da, db) = (mc.walls[a as usize].d_max, mc.walls[b as usize].d_max);
                da.total_cmp(&db).then(b.cmp(&a))
            });
        let Some(w) = best else { return Ok(mc) };
        let mut tagged = mc.tagged.clone();
        for &f in &mc.walls[w as usize].facets {
            tagged[f as usize] = false;
        }
        log::debug!("retract wall {w} (d = {})", mc.walls[w as usize].d_max);
        let was_cuboid = mc.all_cuboid();
        mc = extract_complex(mesh, &tagged, &mc.d)?;
        debug_assert!(!was_cuboid || mc.all_cuboid(), "retracting wall {w} broke a cuboid block");
        *removed += 1;
    }
}

/// Greedy retraction of removable walls, farthest first, ties to the lowest
/// wall id. Full mode first exhausts the regular removals, so it never ends
/// with more blocks than the regular reduction of the same complex.
pub fn reduce(mesh: &CellMesh, mc: MotorcycleComplex, mode: ReduceMode) -> Result<(MotorcycleComplex, usize)> {
    let mut removed = 0;
    let mut mc = greedy(mesh, mc, ReduceMode::Regular, &mut removed)?;
    if mode == ReduceMode::Full {
        mc = greedy(mesh, mc, ReduceMode::Full, &mut removed)?;
    }
    Ok((mc, removed))
}
