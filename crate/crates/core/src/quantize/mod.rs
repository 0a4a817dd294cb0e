//! Integer arc lengths for a cuboid complex and the hex mesh they induce.

mod extract;
mod ip;
mod solve;

pub use extract::{extract_hexmesh, reparametrize_block, BlockMap, MetaTet};
pub use ip::{build_ip, random_problem, QuantizationProblem};
pub use solve::{exhaustive_optimum, solve_quantization, EXACT_ARCS};

use crate::cells::CellMesh;
use crate::complex::MotorcycleComplex;
use crate::error::Result;
use crate::hex::HexMesh;

#[derive(Clone, Debug)]
pub struct Quantized {
    pub problem: QuantizationProblem,
    pub lengths: Vec<i64>,
    pub maps: Vec<BlockMap>,
    pub hexes: HexMesh,
}

/// Quantizes a cuboid complex at scale `s` and extracts its hex mesh.
pub fn quantize(mesh: &CellMesh, mc: &MotorcycleComplex, s: f64) -> Result<Quantized> {
    let problem = build_ip(mc, s)?;
    let lengths = solve_quantization(&problem)?;
    let maps = (0..mc.blocks.len() as u32).map(|b| reparametrize_block(mesh, mc, b, &lengths)).collect::<Result<Vec<_>>>()?;
    let hexes = extract_hexmesh(mesh, &maps)?;
    Ok(Quantized { problem, lengths, maps, hexes })
}
