//! Mesh and parametrization file formats.

mod medit;
mod obj;
mod param;
mod vtk;

pub use medit::{parse_medit, write_medit};
pub use obj::{write_walls_obj, ObjOptions};
pub use param::{parse_param, write_param};
pub use vtk::{parse_vtk, write_vtk};

use crate::error::{Error, Result};
use crate::hex::HexMesh;
use crate::tet::ParamTetMesh;
use std::fmt::Write as _;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshFormat {
    Medit,
    Vtk,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<MeshFormat> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "mesh" => Some(MeshFormat::Medit),
            "vtk" => Some(MeshFormat::Vtk),
            _ => None,
        }
    }
}

pub fn read_hex_mesh(path: &Path) -> Result<HexMesh> {
    let text = std::fs::read_to_string(path)?;
    match MeshFormat::from_path(path) {
        Some(MeshFormat::Vtk) => parse_vtk(&text),
        Some(MeshFormat::Medit) => parse_medit(&text),
        None => Err(Error::Unsupported(format!("unknown mesh extension: {}", path.display()))),
    }
}

pub fn write_hex_mesh(mesh: &HexMesh, path: &Path, format: MeshFormat) -> Result<()> {
    let text = match format {
        MeshFormat::Medit => write_medit(mesh),
        MeshFormat::Vtk => write_vtk(mesh),
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_param(path: &Path) -> Result<ParamTetMesh> {
    parse_param(&std::fs::read_to_string(path)?)
}

pub fn write_param_file(pm: &ParamTetMesh, path: &Path) -> Result<()> {
    std::fs::write(path, write_param(pm))?;
    Ok(())
}

/// 17 significant digits, enough to read back the same `f64`.
pub(crate) fn push_real(out: &mut String, x: f64) {
    let _ = write!(out, "{x:.16e}");
}

/// Whitespace tokens tagged with their 1-based line numbers.
pub(crate) struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    pub fn new(text: &'a str, comment: Option<char>) -> Self {
        let mut items = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = match comment {
                Some(c) => line.split(c).next().unwrap_or(""),
                None => line,
            };
            for t in line.split_whitespace() {
                items.push((i + 1, t));
            }
        }
        let last_line = text.lines().count().max(1);
        Tokens { items, pos: 0, last_line }
    }

    pub fn line(&self) -> usize {
        self.items.get(self.pos).map_or(self.last_line, |t| t.0)
    }

    pub fn peek(&self) -> Option<&'a str> {
        self.items.get(self.pos).map(|t| t.1)
    }

    pub fn next(&mut self) -> Result<&'a str> {
        let line = self.line();
        let t = self.items.get(self.pos).ok_or_else(|| Error::parse(line, "unexpected end of file"))?;
        self.pos += 1;
        Ok(t.1)
    }

    pub fn number<T: std::str::FromStr>(&mut self) -> Result<T> {
        let line = self.line();
        let t = self.next()?;
        t.parse().map_err(|_| Error::parse(line, format!("expected a number, found `{t}`")))
    }
}
