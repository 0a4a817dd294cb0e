//! Corpus statistics: one row of block counts per model.
//!
//! Columns, in order, separated by `;`:
//!
//! | column     | meaning                                             |
//! |------------|-----------------------------------------------------|
//! | `model`    | file name                                           |
//! | `cells`    | hexes or tets of the input                          |
//! | `BC`       | base complex blocks                                 |
//! | `BC-`      | base complex blocks after full reduction            |
//! | `raw`      | raw motorcycle complex blocks                       |
//! | `MC+`      | blocks after regular reduction                      |
//! | `MC`       | blocks after full reduction                         |
//! | `MC/BC`    | `MC` as a percentage of `BC`                        |
//! | `MC+/BC`   | `MC+` as a percentage of `BC`                       |
//! | `T-arcs`   | percentage of arcs of `MC` that are T-arcs          |
//! | `tori`     | torus splits performed on the raw complex           |
//! | `trace`    | trace time in milliseconds                          |
//! | `build`    | build time in milliseconds                          |
//! | `reduce`   | reduce time in milliseconds                         |
//! | `error`    | empty, or the reason the model failed               |

use crate::complex::{reduce, ReduceMode};
use crate::error::{Error, Result};
use crate::hex::HexMesh;
use crate::io::{read_hex_mesh, read_param, MeshFormat};
use crate::pipeline::{hex_base_complex, hex_decompose, param_base_complex, param_decompose, Decomposition};
use crate::trace::TraceOptions;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const COLUMNS: [&str; 15] = [
    "model", "cells", "BC", "BC-", "raw", "MC+", "MC", "MC/BC", "MC+/BC", "T-arcs", "tori", "trace", "build",
    "reduce", "error",
];

/// Extension of parametrization files picked up by a corpus sweep.
pub const PARAM_EXT: &str = "param";

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StatsRow {
    pub model: String,
    pub cells: usize,
    pub bc: usize,
    pub bc_reduced: usize,
    pub raw: usize,
    pub plus: usize,
    pub full: usize,
    pub t_arc_percent: f64,
    pub torus_splits: usize,
    pub trace_ms: f64,
    pub build_ms: f64,
    pub reduce_ms: f64,
    pub error: Option<String>,
}

impl StatsRow {
    pub fn mc_bc_percent(&self) -> f64 {
        percent(self.full, self.bc)
    }

    pub fn plus_bc_percent(&self) -> f64 {
        percent(self.plus, self.bc)
    }

    pub fn failed(model: &str, e: &Error) -> StatsRow {
        StatsRow { model: model.to_string(), error: Some(e.to_string()), ..Default::default() }
    }

    pub fn record(&self) -> Vec<String> {
        if let Some(e) = &self.error {
            let mut r = vec![String::new(); COLUMNS.len()];
            r[0] = self.model.clone();
            r[COLUMNS.len() - 1] = e.clone();
            return r;
        }
        vec![
            self.model.clone(),
            self.cells.to_string(),
            self.bc.to_string(),
            self.bc_reduced.to_string(),
            self.raw.to_string(),
            self.plus.to_string(),
            self.full.to_string(),
            format!("{:.2}", self.mc_bc_percent()),
            format!("{:.2}", self.plus_bc_percent()),
            format!("{:.2}", self.t_arc_percent),
            self.torus_splits.to_string(),
            format!("{:.3}", self.trace_ms),
            format!("{:.3}", self.build_ms),
            format!("{:.3}", self.reduce_ms),
            String::new(),
        ]
    }

    pub fn from_record(r: &[String]) -> Result<StatsRow> {
        if r.len() != COLUMNS.len() {
            return Err(Error::parse(1, format!("expected {} columns, found {}", COLUMNS.len(), r.len())));
        }
        if !r[14].is_empty() {
            return Ok(StatsRow { model: r[0].clone(), error: Some(r[14].clone()), ..Default::default() });
        }
        fn num<T: std::str::FromStr>(s: &str) -> Result<T> {
            s.parse().map_err(|_| Error::parse(1, format!("bad number {s:?}")))
        }
        Ok(StatsRow {
            model: r[0].clone(),
            cells: num(&r[1])?,
            bc: num(&r[2])?,
            bc_reduced: num(&r[3])?,
            raw: num(&r[4])?,
            plus: num(&r[5])?,
            full: num(&r[6])?,
            t_arc_percent: num(&r[9])?,
            torus_splits: num(&r[10])?,
            trace_ms: num(&r[11])?,
            build_ms: num(&r[12])?,
            reduce_ms: num(&r[13])?,
            error: None,
        })
    }
}

fn percent(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        100.0 * a as f64 / b as f64
    }
}

#[derive(Clone, Debug, Default)]
pub struct StatsOptions {
    pub trace: TraceOptions,
    /// Directory of cached rows keyed by content hash.
    pub cache: Option<PathBuf>,
    /// Report measured timings; zero otherwise so output is reproducible.
    pub timings: bool,
}

fn fill(row: &mut StatsRow, dec: &Decomposition) {
    row.raw = dec.raw.n_blocks();
    row.plus = dec.plus.n_blocks();
    row.full = dec.full.n_blocks();
    row.t_arc_percent = dec.full.t_arc_percent();
    row.torus_splits = dec.torus_splits;
    row.trace_ms = dec.timings.trace.as_secs_f64() * 1e3;
    row.build_ms = dec.timings.build.as_secs_f64() * 1e3;
    row.reduce_ms = dec.timings.reduce.as_secs_f64() * 1e3;
}

pub fn hex_stats(model: &str, mesh: &HexMesh, opts: &TraceOptions) -> Result<StatsRow> {
    let mut row = StatsRow { model: model.to_string(), cells: mesh.n_hexes(), ..Default::default() };
    let bc = hex_base_complex(mesh)?;
    let (cm, dec) = hex_decompose(mesh, opts)?;
    row.bc = bc.n_blocks();
    row.bc_reduced = reduce(&cm, bc, ReduceMode::Full)?.0.n_blocks();
    fill(&mut row, &dec);
    Ok(row)
}

pub fn param_stats(model: &str, pm: &crate::tet::ParamTetMesh, opts: &TraceOptions) -> Result<StatsRow> {
    let mut row = StatsRow { model: model.to_string(), cells: pm.n_tets(), ..Default::default() };
    let (btr, bc) = param_base_complex(pm)?;
    row.bc = bc.n_blocks();
    row.bc_reduced = reduce(btr.mesh.cells(), bc, ReduceMode::Full)?.0.n_blocks();
    let (_, dec) = param_decompose(pm, opts)?;
    fill(&mut row, &dec);
    Ok(row)
}

/// Statistics of one model file.
pub fn model_stats(path: &Path, opts: &TraceOptions) -> Result<StatsRow> {
    let model = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    if path.extension().is_some_and(|e| e == PARAM_EXT) {
        param_stats(&model, &read_param(path)?, opts)
    } else {
        hex_stats(&model, &read_hex_mesh(path)?, opts)
    }
}

fn is_model(path: &Path) -> bool {
    path.is_file() && (MeshFormat::from_path(path).is_some() || path.extension().is_some_and(|e| e == PARAM_EXT))
}

fn cache_key(bytes: &[u8], opts: &TraceOptions) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.update(format!("{:?};{}", opts.seed, opts.ignore_alive).as_bytes());
    hex::encode(h.finalize())
}

fn cached_row(path: &Path, opts: &StatsOptions) -> StatsRow {
    let model = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let key = match std::fs::read(path) {
        Ok(bytes) => cache_key(&bytes, &opts.trace),
        Err(e) => return StatsRow::failed(&model, &e.into()),
    };
    let entry = opts.cache.as_ref().map(|d| d.join(format!("{key}.csv")));
    if let Some(row) = entry.as_ref().and_then(|p| read_rows(p).ok()).and_then(|mut r| r.pop()) {
        log::debug!("{model}: cached");
        return StatsRow { model, ..row };
    }
    let row = model_stats(path, &opts.trace).unwrap_or_else(|e| StatsRow::failed(&model, &e));
    if let Some(p) = entry {
        if let Err(e) = write_csv(std::slice::from_ref(&row), &p) {
            log::warn!("cannot cache {}: {e}", p.display());
        }
    }
    row
}

/// One row per model file of `dir`, in file name order. Failures become
/// error rows.
pub fn run_stats(dir: &Path, opts: &StatsOptions) -> Result<Vec<StatsRow>> {
    let mut files: Vec<PathBuf> =
        std::fs::read_dir(dir)?.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| is_model(p)).collect();
    files.sort();
    if let Some(c) = &opts.cache {
        std::fs::create_dir_all(c)?;
    }
    let mut rows: Vec<StatsRow> = files.par_iter().map(|p| cached_row(p, opts)).collect();
    if !opts.timings {
        for r in &mut rows {
            (r.trace_ms, r.build_ms, r.reduce_ms) = (0.0, 0.0, 0.0);
        }
    }
    Ok(rows)
}

pub fn to_csv(rows: &[StatsRow]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().delimiter(b';').from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(COLUMNS).map_err(csv_err)?;
    for r in rows {
        w.write_record(r.record()).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv(rows: &[StatsRow], path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(rows)?)?;
    Ok(())
}

pub fn parse_csv(text: &str) -> Result<Vec<StatsRow>> {
    let mut r = csv::ReaderBuilder::new().delimiter(b';').from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::parse(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != COLUMNS {
        return Err(Error::parse(1, "unexpected statistics header"));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::parse(i + 2, e.to_string()))?;
        let fields: Vec<String> = rec.iter().map(str::to_string).collect();
        rows.push(StatsRow::from_record(&fields).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::parse(i + 2, msg),
            e => e,
        })?);
    }
    Ok(rows)
}

pub fn read_rows(path: &Path) -> Result<Vec<StatsRow>> {
    parse_csv(&std::fs::read_to_string(path)?)
}

/// First line of the text report.
pub const TABLE_NOTE: &str = "# BC- is the base complex after full reduction; times in ms";

/// Right-aligned text table of the same columns under [`TABLE_NOTE`].
pub fn to_table(rows: &[StatsRow]) -> String {
    let recs: Vec<Vec<String>> = rows.iter().map(StatsRow::record).collect();
    let mut width: Vec<usize> = COLUMNS.iter().map(|c| c.len()).collect();
    for r in &recs {
        for (w, f) in width.iter_mut().zip(r) {
            *w = (*w).max(f.chars().count());
        }
    }
    let line = |fields: &mut dyn Iterator<Item = &str>| {
        let cells: Vec<String> = fields.zip(&width).map(|(f, &w)| format!("{f:>w$}")).collect();
        cells.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = format!("{TABLE_NOTE}\n");
    out += &line(&mut COLUMNS.iter().copied());
    for r in &recs {
        out += &line(&mut r.iter().map(String::as_str));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::io::write_hex_mesh;

    #[test]
    fn empty_dir_gives_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let rows = run_stats(dir.path(), &StatsOptions::default()).unwrap();
        assert!(rows.is_empty());
        assert_eq!(to_csv(&rows).unwrap(), COLUMNS.join(";") + "\n");
    }

    #[test]
    fn corpus_rows_and_cache() {
        let dir = tempfile::tempdir().unwrap();
        write_hex_mesh(&fixtures::hex_box(2, 2, 2), &dir.path().join("a_box.mesh"), MeshFormat::Medit).unwrap();
        write_hex_mesh(&fixtures::named("pie3").unwrap(), &dir.path().join("b_pie3.vtk"), MeshFormat::Vtk).unwrap();
        write_hex_mesh(&fixtures::named("pie5").unwrap(), &dir.path().join("c_pie5.mesh"), MeshFormat::Medit).unwrap();
        std::fs::write(dir.path().join("d_broken.mesh"), "MeshVersionFormatted 2\nVertices\n3\n").unwrap();
        let cache = tempfile::tempdir().unwrap();
        let opts = StatsOptions { cache: Some(cache.path().to_path_buf()), ..Default::default() };
        let rows = run_stats(dir.path(), &opts).unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows[..3] {
            assert!(r.error.is_none(), "{r:?}");
            assert!(r.full <= r.plus && r.plus <= r.raw, "{r:?}");
            assert!(r.full <= r.bc, "{r:?}");
        }
        assert!(rows[3].error.is_some());
        assert_eq!(std::fs::read_dir(cache.path()).unwrap().count(), 4);
        let again = run_stats(dir.path(), &opts).unwrap();
        assert_eq!(to_csv(&rows).unwrap(), to_csv(&again).unwrap());
        assert_eq!(parse_csv(&to_csv(&rows).unwrap()).unwrap(), rows);
    }

    #[test]
    fn table_has_header_and_rows() {
        let mut r = StatsRow { model: "m".into(), cells: 8, bc: 8, bc_reduced: 1, raw: 1, plus: 1, full: 1, ..Default::default() };
        r.t_arc_percent = 0.0;
        let t = to_table(&[r]);
        assert_eq!(t.lines().count(), 3);
        assert_eq!(t.lines().next().unwrap(), TABLE_NOTE);
        assert!(t.lines().nth(1).unwrap().trim_start().starts_with("model"));
        assert!(t.contains("12.50"));
    }
}
