//! The generalized cell complex induced by a wall field: nodes, arcs, walls
//! and blocks, plus torus splitting, base complexes and reduction.

mod block;
mod extract;
pub mod oracle;
mod reduce;
mod torus;

pub use extract::{extract_complex, fan_sectors, Sector};
pub use reduce::{reduce, removable, ReduceMode};
pub use torus::{cut_site, split_tori};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockType {
    Cuboid,
    /// Genus-one block; `twist` in quarter turns, normalised to -1..=2.
    Toroidal { twist: i32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub vertex: u32,
    pub singular: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arc {
    /// Mesh edges in order along the arc.
    pub edges: Vec<u32>,
    /// Mesh vertices along the arc, `edges.len() + 1` of them; a closed loop
    /// repeats its first vertex at the end.
    pub vertices: Vec<u32>,
    /// End nodes, `NONE` for a node-free loop.
    pub nodes: [u32; 2],
    pub length: f64,
    pub singular: bool,
    pub t_arc: bool,
    pub walls: Vec<u32>,
}

impl Arc {
    pub fn is_loop(&self) -> bool {
        self.vertices.first() == self.vertices.last()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Wall {
    pub facets: Vec<u32>,
    /// Blocks on either side; the second is `NONE` for boundary walls.
    pub blocks: [u32; 2],
    pub boundary: bool,
    /// Arcs bounding the wall, in loop order.
    pub arcs: Vec<u32>,
    /// Rectangle sides `A0..A3` as arc lists, `None` unless the boundary is
    /// a single loop with four right-angled corners.
    pub sides: Option<[Vec<u32>; 4]>,
    /// Facet and vertex of the corner where side `A0` starts.
    pub corner: Option<(u32, u32)>,
    pub annulus: bool,
    pub d_min: f64,
    pub d_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub cells: Vec<u32>,
    pub walls: Vec<u32>,
    /// Corner vertices; a vertex appears once per corner sector.
    pub corners: Vec<u32>,
    /// Number of block facets (maximal flat pieces of the block boundary).
    pub n_facets: usize,
    pub kind: Option<BlockType>,
}

#[derive(Clone, Debug)]
pub struct MotorcycleComplex {
    pub nodes: Vec<Node>,
    pub arcs: Vec<Arc>,
    pub walls: Vec<Wall>,
    pub blocks: Vec<Block>,
    pub cell_block: Vec<u32>,
    pub facet_wall: Vec<u32>,
    pub edge_arc: Vec<u32>,
    pub vertex_node: Vec<u32>,
    pub tagged: Vec<bool>,
    pub d: Vec<f64>,
}

impl MotorcycleComplex {
    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_t_arcs(&self) -> usize {
        self.arcs.iter().filter(|a| a.t_arc).count()
    }

    /// Percentage of arcs that are T-arcs.
    pub fn t_arc_percent(&self) -> f64 {
        if self.arcs.is_empty() {
            0.0
        } else {
            100.0 * self.n_t_arcs() as f64 / self.arcs.len() as f64
        }
    }

    pub fn wall_facets(&self) -> Vec<u32> {
        (0..self.tagged.len() as u32).filter(|&f| self.tagged[f as usize]).collect()
    }

    pub fn all_cuboid(&self) -> bool {
        self.blocks.iter().all(|b| b.kind == Some(BlockType::Cuboid))
    }

    pub fn n_toroidal(&self) -> usize {
        self.blocks.iter().filter(|b| matches!(b.kind, Some(BlockType::Toroidal { .. }))).count()
    }
}

/// Type of block `b`: eight corners make a cuboid, none a torus.
pub fn classify_block(mc: &MotorcycleComplex, b: u32) -> Result<BlockType> {
    let blk = &mc.blocks[b as usize];
    blk.kind.ok_or_else(|| {
        Error::Integrity(format!("block {b} has {} corners and {} facets", blk.corners.len(), blk.n_facets))
    })
}
