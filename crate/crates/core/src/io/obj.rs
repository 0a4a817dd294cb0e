use super::push_real;
use crate::cells::CellMesh;
use crate::complex::MotorcycleComplex;
use crate::octa::Vec3;
use std::collections::HashMap;
use std::fmt::Write;

#[derive(Clone, Debug, Default)]
pub struct ObjOptions {
    /// Emit one group per block instead of per wall, each block pushed away
    /// from the mesh centroid by this multiple of its centroid offset.
    pub explode: Option<f64>,
}

/// Wall surfaces as OBJ. Without `explode` there is one group `wall_<id>`
/// per wall; with it, one group `block_<id>` per block holding the wall
/// facets of that block, oriented outward.
pub fn write_walls_obj(mesh: &CellMesh, mc: &MotorcycleComplex, opts: &ObjOptions) -> String {
    let topo = &mesh.topo;
    let mut out = String::new();
    let mut index: HashMap<(u32, u32), usize> = HashMap::new();
    let mut emit_face = |out: &mut String, body: &mut String, verts: &[u32], group: u32, shift: Vec3| {
        body.push('f');
        for &v in verts {
            let next = index.len() + 1;
            let id = *index.entry((group, v)).or_insert_with(|| {
                let p = mesh.positions[v as usize] + shift;
                out.push('v');
                for x in p.iter() {
                    out.push(' ');
                    push_real(out, *x);
                }
                out.push('\n');
                next
            });
            let _ = write!(body, " {id}");
        }
        body.push('\n');
    };
    let mut body = String::new();
    match opts.explode {
        None => {
            for (w, wall) in mc.walls.iter().enumerate() {
                let _ = writeln!(body, "g wall_{w}");
                for &f in &wall.facets {
                    emit_face(&mut out, &mut body, &topo.facets[f as usize].vertices, 0, Vec3::zeros());
                }
            }
        }
        Some(mag) => {
            let centroid = |cells: &mut dyn Iterator<Item = u32>| {
                let (mut s, mut n) = (Vec3::zeros(), 0.0);
                for c in cells {
                    for &v in &topo.cells[c as usize] {
                        s += mesh.positions[v as usize];
                        n += 1.0;
                    }
                }
                if n > 0.0 { s / n } else { s }
            };
            let whole = centroid(&mut (0..topo.n_cells() as u32));
            for (b, block) in mc.blocks.iter().enumerate() {
                let shift = (centroid(&mut block.cells.iter().copied()) - whole) * mag;
                let _ = writeln!(body, "g block_{b}");
                for &c in &block.cells {
                    for &f in &topo.cell_facets[c as usize] {
                        if !mc.tagged[f as usize] {
                            continue;
                        }
                        let fr = &topo.facets[f as usize];
                        let mut verts = fr.vertices.clone();
                        if fr.cells[0] != c {
                            verts.reverse();
                        }
                        emit_face(&mut out, &mut body, &verts, b as u32 + 1, shift);
                    }
                }
            }
        }
    }
    out.push_str(&body);
    out
}
