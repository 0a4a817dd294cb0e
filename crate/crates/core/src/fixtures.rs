//! Synthetic hexahedral meshes: boxes, pies around a singular edge, tori and
//! random height fields. Used by tests, benches and the CLI `--fixture` flag.

use crate::error::Result;
use crate::hex::{build_hex_connectivity, HexMesh};
use crate::octa::Vec3;
use crate::topology::HEX_CORNERS;
use rand::Rng;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::hash::Hash;

/// Collects hexes whose corners are named by lattice keys; vertex ids are
/// assigned in order of first use.
struct Builder<K> {
    ids: HashMap<K, u32>,
    positions: Vec<Vec3>,
    hexes: Vec<[u32; 8]>,
}

impl<K: Hash + Eq + Clone> Builder<K> {
    fn new() -> Self {
        Builder { ids: HashMap::new(), positions: Vec::new(), hexes: Vec::new() }
    }

    fn vertex(&mut self, key: K, pos: impl FnOnce() -> Vec3) -> u32 {
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.positions.len() as u32;
        self.positions.push(pos());
        self.ids.insert(key, id);
        id
    }

    fn finish(self) -> HexMesh {
        self.try_finish().expect("fixture is a valid hex mesh")
    }

    fn try_finish(self) -> Result<HexMesh> {
        build_hex_connectivity(self.hexes, self.positions)
    }
}

pub fn hex_box(nx: usize, ny: usize, nz: usize) -> HexMesh {
    let mut b = Builder::new();
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                let mut h = [0u32; 8];
                for (c, o) in HEX_CORNERS.iter().enumerate() {
                    let p = [i + o[0] as usize, j + o[1] as usize, k + o[2] as usize];
                    h[c] = b.vertex(p, || Vec3::new(p[0] as f64, p[1] as f64, p[2] as f64));
                }
                b.hexes.push(h);
            }
        }
    }
    b.finish()
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum PieKey {
    Axis(usize),
    Ray(usize, usize, usize),
    Inner(usize, usize, usize, usize),
}

/// `k` sectors glued cyclically around a central edge line. Sector `s` lies
/// between rays `s` and `s+1` and is `rays[s] × rays[s+1] × heights[s]` hexes.
pub fn pie(k: usize, rays: &[usize], heights: &[usize]) -> HexMesh {
    try_pie(k, rays, heights).expect("fixture is a valid hex mesh")
}

/// As [`pie`], failing when uneven heights make the mesh non-manifold.
pub fn try_pie(k: usize, rays: &[usize], heights: &[usize]) -> Result<HexMesh> {
    assert!(k >= 3 && rays.len() == k && heights.len() == k);
    let dir = |r: usize| {
        let a = 2.0 * PI * (r % k) as f64 / k as f64;
        Vec3::new(a.cos(), a.sin(), 0.0)
    };
    let mut b = Builder::new();
    for s in 0..k {
        let s1 = (s + 1) % k;
        for l in 0..heights[s] {
            for j in 0..rays[s1] {
                for i in 0..rays[s] {
                    let mut h = [0u32; 8];
                    for (c, o) in HEX_CORNERS.iter().enumerate() {
                        let (ii, jj, ll) = (i + o[0] as usize, j + o[1] as usize, l + o[2] as usize);
                        let key = match (ii, jj) {
                            (0, 0) => PieKey::Axis(ll),
                            (_, 0) => PieKey::Ray(s, ii, ll),
                            (0, _) => PieKey::Ray(s1, jj, ll),
                            _ => PieKey::Inner(s, ii, jj, ll),
                        };
                        let pos = dir(s) * ii as f64 + dir(s1) * jj as f64 + Vec3::new(0.0, 0.0, ll as f64);
                        h[c] = b.vertex(key, || pos);
                    }
                    b.hexes.push(h);
                }
            }
        }
    }
    b.try_finish()
}

/// Ring of `n` segments with an `a × a` cross section, closed up after
/// rotating the cross section by `twist` quarter turns.
pub fn hex_ring(n: usize, a: usize, twist: usize) -> HexMesh {
    assert!(n >= 3 && a >= 1);
    let radius = 2.0 * a as f64 + n as f64 / 4.0;
    let mut b = Builder::new();
    let half = a as f64 / 2.0;
    for i in 0..n {
        for l in 0..a {
            for j in 0..a {
                let mut h = [0u32; 8];
                for (c, o) in HEX_CORNERS.iter().enumerate() {
                    let (ii, jj, ll) = (i + o[0] as usize, j + o[1] as usize, l + o[2] as usize);
                    let key = if ii == n {
                        let (mut y, mut z) = (jj, ll);
                        for _ in 0..twist % 4 {
                            (y, z) = (a - z, y);
                        }
                        (0, y, z)
                    } else {
                        (ii, jj, ll)
                    };
                    let theta = 2.0 * PI * ii as f64 / n as f64;
                    let phi = (twist % 4) as f64 * PI / 2.0 * ii as f64 / n as f64;
                    let (y0, z0) = (jj as f64 - half, ll as f64 - half);
                    let y = phi.cos() * y0 - phi.sin() * z0;
                    let z = phi.sin() * y0 + phi.cos() * z0;
                    let r = radius - y;
                    let pos = Vec3::new(r * theta.cos(), r * theta.sin(), z);
                    h[c] = b.vertex(key, || pos);
                }
                b.hexes.push(h);
            }
        }
    }
    b.finish()
}

/// Columns of unit cubes over an `nx × ny` grid; `heights[j * nx + i] >= 1`.
pub fn height_field(nx: usize, ny: usize, heights: &[usize]) -> HexMesh {
    try_height_field(nx, ny, heights).expect("fixture is a valid hex mesh")
}

/// As [`height_field`], failing when diagonal columns make it non-manifold.
pub fn try_height_field(nx: usize, ny: usize, heights: &[usize]) -> Result<HexMesh> {
    assert_eq!(heights.len(), nx * ny);
    let mut b = Builder::new();
    for j in 0..ny {
        for i in 0..nx {
            for k in 0..heights[j * nx + i] {
                let mut h = [0u32; 8];
                for (c, o) in HEX_CORNERS.iter().enumerate() {
                    let p = [i + o[0] as usize, j + o[1] as usize, k + o[2] as usize];
                    h[c] = b.vertex(p, || Vec3::new(p[0] as f64, p[1] as f64, p[2] as f64));
                }
                b.hexes.push(h);
            }
        }
    }
    b.try_finish()
}

/// A valence-3 pie with one raised sector: an interior singular line plus
/// concave boundary lines where the lower sectors meet the raised one.
pub fn composite() -> HexMesh {
    pie(3, &[2, 3, 2], &[2, 2, 4])
}

/// Random mesh of glued unit cubes with at most 500 hexes: either a height
/// field or a pie with random ray lengths and sector heights.
pub fn random_glued(rng: &mut impl Rng) -> HexMesh {
    loop {
        if rng.gen_bool(0.6) {
            let nx = rng.gen_range(1..=7);
            let ny = rng.gen_range(1..=7);
            let hmax = rng.gen_range(1..=6);
            let heights: Vec<usize> = (0..nx * ny).map(|_| rng.gen_range(1..=hmax)).collect();
            if let Ok(m) = try_height_field(nx, ny, &heights) {
                return m;
            }
            continue;
        }
        let k = rng.gen_range(3..=6);
        let rays: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=3)).collect();
        let base = rng.gen_range(1..=3);
        let heights: Vec<usize> = (0..k).map(|_| base + usize::from(rng.gen_bool(0.3)) * rng.gen_range(1..=2)).collect();
        let count: usize = (0..k).map(|s| rays[s] * rays[(s + 1) % k] * heights[s]).sum();
        if count > 500 {
            continue;
        }
        // raised sectors touching only along the axis are non-manifold
        if let Ok(m) = try_pie(k, &rays, &heights) {
            return m;
        }
    }
}

/// Named fixtures used by the acceptance suite and the CLI.
pub fn named(name: &str) -> Option<HexMesh> {
    Some(match name {
        "box" => hex_box(3, 2, 2),
        "pie3" => pie(3, &[1, 1, 1], &[2, 2, 2]),
        "pie5" => pie(5, &[2; 5], &[2; 5]),
        "ring" => hex_ring(8, 2, 0),
        "ring-twisted" => hex_ring(8, 2, 1),
        "composite" => composite(),
        _ => return None,
    })
}

pub const NAMED: [&str; 6] = ["box", "pie3", "pie5", "ring", "ring-twisted", "composite"];
