use super::{push_real, Tokens};
use crate::error::{Error, Result};
use crate::octa::Vec3;
use crate::tet::ParamTetMesh;

/// Text format: a header `n_vertices n_tets`, one `x y z` line per vertex,
/// then per tet four 0-based vertex ids followed by the `u v w` of each
/// corner.
pub fn parse_param(text: &str) -> Result<ParamTetMesh> {
    let mut tk = Tokens::new(text, Some('#'));
    let nv: usize = tk.number()?;
    let nt: usize = tk.number()?;
    let mut positions = Vec::with_capacity(nv);
    for _ in 0..nv {
        positions.push(Vec3::new(tk.number()?, tk.number()?, tk.number()?));
    }
    let mut tets = Vec::with_capacity(nt);
    let mut params = Vec::with_capacity(nt);
    for _ in 0..nt {
        let mut t = [0u32; 4];
        for v in t.iter_mut() {
            *v = tk.number()?;
        }
        let mut p = [Vec3::zeros(); 4];
        for c in p.iter_mut() {
            *c = Vec3::new(tk.number()?, tk.number()?, tk.number()?);
        }
        tets.push(t);
        params.push(p);
    }
    if tk.peek().is_some() {
        return Err(Error::parse(tk.line(), format!("trailing data after {nt} tets")));
    }
    ParamTetMesh::new(positions, tets, params)
}

pub fn write_param(pm: &ParamTetMesh) -> String {
    let mut out = format!("{} {}\n", pm.positions().len(), pm.n_tets());
    let reals = |out: &mut String, p: &Vec3| {
        for x in p.iter() {
            out.push(' ');
            push_real(out, *x);
        }
    };
    for p in pm.positions() {
        let mut line = String::new();
        reals(&mut line, p);
        out.push_str(line.trim_start());
        out.push('\n');
    }
    for t in 0..pm.n_tets() as u32 {
        let ids = &pm.tets()[t as usize];
        out.push_str(&format!("{} {} {} {}", ids[0], ids[1], ids[2], ids[3]));
        for p in pm.tet_params(t) {
            reals(&mut out, &p);
        }
        out.push('\n');
    }
    out
}
