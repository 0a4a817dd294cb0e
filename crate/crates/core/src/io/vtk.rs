use super::{push_real, Tokens};
use crate::error::{Error, Result};
use crate::hex::{build_hex_connectivity, HexMesh};
use crate::octa::Vec3;

const VTK_HEXAHEDRON: u32 = 12;

/// Legacy ASCII unstructured grid with hexahedral cells (type 12).
pub fn parse_vtk(text: &str) -> Result<HexMesh> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if !header.starts_with("# vtk DataFile") {
        return Err(Error::parse(1, "missing `# vtk DataFile` header"));
    }
    lines.next();
    let enc = lines.next().unwrap_or("").trim();
    if !enc.eq_ignore_ascii_case("ascii") {
        return Err(Error::parse(3, format!("only ASCII files are supported, found `{enc}`")));
    }
    let body: String = text.lines().skip(3).collect::<Vec<_>>().join("\n");
    let mut tk = Tokens::new(&body, None);
    let shift = |e: Error| match e {
        Error::Parse { line, msg } => Error::Parse { line: line + 3, msg },
        e => e,
    };
    parse_body(&mut tk).map_err(shift)
}

fn parse_body(tk: &mut Tokens) -> Result<HexMesh> {
    let mut positions: Vec<Vec3> = Vec::new();
    let mut cells: Vec<Vec<u32>> = Vec::new();
    let mut types: Vec<u32> = Vec::new();
    while let Some(kw) = tk.peek() {
        let line = tk.line();
        tk.next()?;
        match kw.to_ascii_uppercase().as_str() {
            "DATASET" => {
                let kind = tk.next()?;
                if !kind.eq_ignore_ascii_case("UNSTRUCTURED_GRID") {
                    return Err(Error::parse(line, format!("dataset `{kind}` is not supported")));
                }
            }
            "POINTS" => {
                let n: usize = tk.number()?;
                tk.next()?;
                for _ in 0..n {
                    positions.push(Vec3::new(tk.number()?, tk.number()?, tk.number()?));
                }
            }
            "CELLS" => {
                let n: usize = tk.number()?;
                let _size: usize = tk.number()?;
                for _ in 0..n {
                    let k: usize = tk.number()?;
                    let mut c = Vec::with_capacity(k);
                    for _ in 0..k {
                        c.push(tk.number()?);
                    }
                    cells.push(c);
                }
            }
            "CELL_TYPES" => {
                let n: usize = tk.number()?;
                for _ in 0..n {
                    let l = tk.line();
                    let t: u32 = tk.number()?;
                    if t != VTK_HEXAHEDRON {
                        return Err(Error::parse(l, format!("unsupported cell type {t}")));
                    }
                    types.push(t);
                }
            }
            "CELL_DATA" | "POINT_DATA" => break,
            other => return Err(Error::parse(line, format!("unexpected keyword `{other}`"))),
        }
    }
    if types.len() != cells.len() {
        return Err(Error::parse(tk.line(), format!("{} cells but {} cell types", cells.len(), types.len())));
    }
    let mut hexes = Vec::with_capacity(cells.len());
    for (i, c) in cells.iter().enumerate() {
        let h: [u32; 8] = c
            .as_slice()
            .try_into()
            .map_err(|_| Error::parse(tk.line(), format!("cell {i} has {} vertices, expected 8", c.len())))?;
        hexes.push(h);
    }
    build_hex_connectivity(hexes, positions)
}

pub fn write_vtk(mesh: &HexMesh) -> String {
    let mut out = String::from("# vtk DataFile Version 3.0\nhexahedral mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    out.push_str(&format!("POINTS {} double\n", mesh.positions.len()));
    for p in &mesh.positions {
        push_real(&mut out, p.x);
        out.push(' ');
        push_real(&mut out, p.y);
        out.push(' ');
        push_real(&mut out, p.z);
        out.push('\n');
    }
    let n = mesh.n_hexes();
    out.push_str(&format!("CELLS {} {}\n", n, 9 * n));
    for h in mesh.hexes() {
        out.push('8');
        for v in h {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out.push_str(&format!("CELL_TYPES {n}\n"));
    for _ in 0..n {
        out.push_str("12\n");
    }
    out
}
