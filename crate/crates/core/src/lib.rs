//! Motorcycle complexes of hexahedral meshes and seamless volumetric
//! parametrizations: tracing, extraction, reduction, sanitization and
//! quantization into conforming hex meshes.

pub mod cells;
pub mod complex;
pub(crate) mod dsu;
pub mod error;
pub mod fixtures;
pub mod io;
pub mod hex;
pub mod octa;
pub mod pipeline;
pub mod quantize;
pub mod sanitize;
pub mod stats;
pub mod tet;
pub mod topology;
pub mod trace;

pub use cells::CellMesh;
pub use error::{Error, Result};
pub use hex::{build_hex_connectivity, classify_hex_edge, opp_facet, EdgeClass, EdgeKind, HexMesh};
pub use octa::{Rotation, Transition, Vec3};
pub use topology::{CellKind, Topology};
