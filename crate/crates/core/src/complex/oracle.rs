//! Independent check that every block of a hex-mesh wall field is an
//! `l × m × n` grid of unit cubes.

use crate::hex::HexMesh;
use crate::octa::{Transition, Vec3};
use crate::topology::HEX_CORNERS;
use std::collections::{HashMap, VecDeque};

fn corner(i: usize) -> Vec3 {
    let c = HEX_CORNERS[i];
    Vec3::new(c[0] as f64, c[1] as f64, c[2] as f64)
}

fn key(p: &Vec3) -> [i64; 3] {
    [p.x.round() as i64, p.y.round() as i64, p.z.round() as i64]
}

/// Grid dimensions of every block (cells connected across untagged
/// facets), or a description of the first block that is not a grid.
pub fn grid_blocks(mesh: &HexMesh, tagged: &[bool]) -> Result<Vec<[i64; 3]>, String> {
    let topo = &mesh.topo;
    let mut block = vec![usize::MAX; mesh.n_hexes()];
    let mut dims = Vec::new();
    for root in 0..mesh.n_hexes() {
        if block[root] != usize::MAX {
            continue;
        }
        let id = dims.len();
        // chart of each hex: local unit cube to block lattice
        let mut chart: HashMap<u32, Transition> = HashMap::new();
        chart.insert(root as u32, Transition::identity());
        block[root] = id;
        let mut queue = VecDeque::from([root as u32]);
        let mut members = Vec::new();
        while let Some(h) = queue.pop_front() {
            members.push(h);
            for &f in &topo.cell_facets[h as usize] {
                let fr = &topo.facets[f as usize];
                if tagged[f as usize] || fr.is_boundary() {
                    continue;
                }
                let n = fr.other_cell(h);
                let src: Vec<Vec3> = fr.vertices.iter().map(|&v| corner(topo.local_vertex(n, v).unwrap())).collect();
                let dst: Vec<Vec3> = fr.vertices.iter().map(|&v| corner(topo.local_vertex(h, v).unwrap())).collect();
                let Some(tau) = Transition::fit_exact(&src, &dst) else {
                    return Err(format!("hexes {h} and {n} do not glue with a lattice map"));
                };
                let via = chart[&h].compose(&tau);
                match chart.get(&n) {
                    Some(t) if *t != via => return Err(format!("block {id} has non-trivial holonomy at facet {f}")),
                    Some(_) => {}
                    None => {
                        chart.insert(n, via);
                        block[n as usize] = id;
                        queue.push_back(n);
                    }
                }
            }
        }
        let mut occupied: HashMap<[i64; 3], u32> = HashMap::new();
        let (mut lo, mut hi) = ([i64::MAX; 3], [i64::MIN; 3]);
        for &h in &members {
            let t = chart[&h];
            let pts: Vec<[i64; 3]> = (0..8).map(|i| key(&t.apply(&corner(i)))).collect();
            let mn = [0, 1, 2].map(|a| pts.iter().map(|p| p[a]).min().unwrap());
            if occupied.insert(mn, h).is_some() {
                return Err(format!("block {id}: two hexes at lattice cell {mn:?}"));
            }
            for a in 0..3 {
                lo[a] = lo[a].min(mn[a]);
                hi[a] = hi[a].max(mn[a] + 1);
            }
        }
        let d = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
        if (d[0] * d[1] * d[2]) as usize != members.len() {
            return Err(format!("block {id}: {} hexes do not fill a {d:?} box", members.len()));
        }
        // facets facing out of the box must be walls
        for &h in &members {
            let t = chart[&h];
            for &f in &topo.cell_facets[h as usize] {
                let fr = &topo.facets[f as usize];
                let c: Vec3 = fr.vertices.iter().map(|&v| t.apply(&corner(topo.local_vertex(h, v).unwrap()))).sum::<Vec3>() / 4.0;
                let centre: Vec3 = (0..8).map(|i| t.apply(&corner(i))).sum::<Vec3>() / 8.0;
                let out = c * 2.0 - centre;
                let inside = (0..3).all(|a| out[a] > lo[a] as f64 && out[a] < hi[a] as f64);
                if !inside && !tagged[f as usize] {
                    return Err(format!("block {id}: facet {f} on the box boundary is not a wall"));
                }
                if inside && tagged[f as usize] {
                    return Err(format!("block {id}: wall facet {f} inside the box"));
                }
            }
        }
        dims.push(d);
    }
    Ok(dims)
}
