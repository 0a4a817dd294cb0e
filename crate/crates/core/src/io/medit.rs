use super::{push_real, Tokens};
use crate::error::{Error, Result};
use crate::hex::{build_hex_connectivity, HexMesh};
use crate::octa::Vec3;

/// Reads vertices and hexahedra of a MEDIT `.mesh` file; other sections are
/// skipped. Corner order is taken to match the VTK hexahedron.
pub fn parse_medit(text: &str) -> Result<HexMesh> {
    let mut tk = Tokens::new(text, Some('#'));
    let mut positions: Vec<Vec3> = Vec::new();
    let mut hexes: Vec<[u32; 8]> = Vec::new();
    while let Some(kw) = tk.peek() {
        let line = tk.line();
        tk.next()?;
        let per = match kw.to_ascii_lowercase().as_str() {
            "meshversionformatted" => {
                tk.next()?;
                continue;
            }
            "dimension" => {
                let dim: usize = tk.number()?;
                if dim != 3 {
                    return Err(Error::parse(line, format!("dimension {dim} is not supported")));
                }
                continue;
            }
            "end" => break,
            "vertices" => {
                let n: usize = tk.number()?;
                positions.reserve(n);
                for _ in 0..n {
                    let p = Vec3::new(tk.number()?, tk.number()?, tk.number()?);
                    let _ref: i64 = tk.number()?;
                    positions.push(p);
                }
                continue;
            }
            "hexahedra" => {
                let n: usize = tk.number()?;
                for _ in 0..n {
                    let l = tk.line();
                    let mut h = [0u32; 8];
                    for c in h.iter_mut() {
                        let id: u32 = tk.number()?;
                        if id == 0 {
                            return Err(Error::parse(l, "vertex ids are 1-based"));
                        }
                        *c = id - 1;
                    }
                    let _ref: i64 = tk.number()?;
                    hexes.push(h);
                }
                continue;
            }
            "edges" => 3,
            "triangles" => 4,
            "quadrilaterals" => 5,
            "tetrahedra" => 5,
            "corners" | "ridges" | "requiredvertices" | "requirededges" => 1,
            other => return Err(Error::parse(line, format!("unknown section `{other}`"))),
        };
        let n: usize = tk.number()?;
        for _ in 0..n * per {
            tk.next()?;
        }
    }
    if hexes.is_empty() {
        return Err(Error::parse(tk.line(), "no Hexahedra section"));
    }
    build_hex_connectivity(hexes, positions)
}

pub fn write_medit(mesh: &HexMesh) -> String {
    let mut out = String::from("MeshVersionFormatted 2\nDimension 3\nVertices\n");
    out.push_str(&format!("{}\n", mesh.positions.len()));
    for p in &mesh.positions {
        for x in p.iter() {
            push_real(&mut out, *x);
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out.push_str(&format!("Hexahedra\n{}\n", mesh.n_hexes()));
    for h in mesh.hexes() {
        for v in h {
            out.push_str(&format!("{} ", v + 1));
        }
        out.push_str("0\n");
    }
    out.push_str("End\n");
    out
}
