//! Inputs shared by the benchmarks.

use mc3d::fixtures;
use mc3d::HexMesh;

/// Benchmark meshes, smallest first.
pub fn meshes() -> Vec<(&'static str, HexMesh)> {
    vec![
        ("pie5", fixtures::named("pie5").unwrap()),
        ("composite", fixtures::named("composite").unwrap()),
        ("pie6-large", fixtures::pie(6, &[3; 6], &[4; 6])),
    ]
}
