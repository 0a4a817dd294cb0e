//! End-to-end decompositions: raw, reduced and base complexes of one input.

use crate::cells::CellMesh;
use crate::complex::{extract_complex, reduce, split_tori, MotorcycleComplex, ReduceMode};
use crate::error::Result;
use crate::hex::HexMesh;
use crate::trace::hex::{trace_hex, trace_hex_sparse};
use crate::tet::ParamTetMesh;
use crate::trace::param::{cut_tori, trace_param, ParamTrace};
use crate::trace::{TraceOptions, WallField};
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timings {
    pub trace: Duration,
    pub build: Duration,
    pub reduce: Duration,
}

/// Complex of a traced field with tori split; returns the number of cuts.
pub fn build(mesh: &CellMesh, field: &WallField) -> Result<(MotorcycleComplex, usize)> {
    let mc = extract_complex(mesh, &field.tagged, &field.d)?;
    split_tori(mesh, mc)
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub raw: MotorcycleComplex,
    pub plus: MotorcycleComplex,
    pub full: MotorcycleComplex,
    pub torus_splits: usize,
    pub timings: Timings,
}

/// Raw complex (after torus splitting) and its regular and full reductions.
pub fn decompose(mesh: &CellMesh, field: &WallField, trace_time: Duration) -> Result<Decomposition> {
    let t = Instant::now();
    let (raw, torus_splits) = build(mesh, field)?;
    reduced(mesh, raw, torus_splits, trace_time, t.elapsed())
}

fn reduced(
    mesh: &CellMesh,
    raw: MotorcycleComplex,
    torus_splits: usize,
    trace_time: Duration,
    build_time: Duration,
) -> Result<Decomposition> {
    let t = Instant::now();
    let (plus, _) = reduce(mesh, raw.clone(), ReduceMode::Regular)?;
    let (full, _) = reduce(mesh, plus.clone(), ReduceMode::Full)?;
    let timings = Timings { trace: trace_time, build: build_time, reduce: t.elapsed() };
    Ok(Decomposition { raw, plus, full, torus_splits, timings })
}

/// Base complex and its full reduction.
pub fn base_and_reduced(mesh: &CellMesh, field: &WallField) -> Result<(MotorcycleComplex, MotorcycleComplex)> {
    let (bc, _) = build(mesh, field)?;
    let (bcm, _) = reduce(mesh, bc.clone(), ReduceMode::Full)?;
    Ok((bc, bcm))
}

pub fn hex_decompose(mesh: &HexMesh, opts: &TraceOptions) -> Result<(CellMesh, Decomposition)> {
    let t = Instant::now();
    let field = trace_hex(mesh, opts);
    let trace_time = t.elapsed();
    let cm = mesh.to_cell_mesh();
    let dec = decompose(&cm, &field, trace_time)?;
    Ok((cm, dec))
}

pub fn hex_base_complex(mesh: &HexMesh) -> Result<MotorcycleComplex> {
    let field = trace_hex(mesh, &TraceOptions { ignore_alive: true, ..Default::default() });
    Ok(build(&mesh.to_cell_mesh(), &field)?.0)
}

pub fn hex_sparse(mesh: &HexMesh, opts: &TraceOptions) -> Result<MotorcycleComplex> {
    let field = trace_hex_sparse(mesh, opts);
    Ok(build(&mesh.to_cell_mesh(), &field)?.0)
}

/// Traces a seamless parametrization, cuts its tori and reduces. The
/// returned trace holds the refined mesh the complexes live on.
pub fn param_decompose(pm: &ParamTetMesh, opts: &TraceOptions) -> Result<(ParamTrace, Decomposition)> {
    let t = Instant::now();
    let tr = trace_param(pm, opts)?;
    let trace_time = t.elapsed();
    let t = Instant::now();
    let (tr, raw, cuts) = cut_tori(tr)?;
    let dec = reduced(tr.mesh.cells(), raw, cuts, trace_time, t.elapsed())?;
    Ok((tr, dec))
}

pub fn param_base_complex(pm: &ParamTetMesh) -> Result<(ParamTrace, MotorcycleComplex)> {
    let tr = trace_param(pm, &TraceOptions { ignore_alive: true, ..Default::default() })?;
    let (tr, mc, _) = cut_tori(tr)?;
    Ok((tr, mc))
}
