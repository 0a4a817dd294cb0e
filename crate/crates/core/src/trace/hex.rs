//! Brush fire on hexahedral meshes: simultaneous and sparse serial variants.

use super::{permute, TraceOptions, WallField};
use crate::hex::{opp_in_fan, HexMesh};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// At most two tagged facets around `e`, or `e` singular.
pub fn alive(mesh: &HexMesh, field: &WallField, e: u32) -> bool {
    if mesh.edge_class(e).is_singular() {
        return true;
    }
    mesh.topo.fans[e as usize].facets.iter().filter(|&&f| field.tagged[f as usize]).count() <= 2
}

/// Interior facets around each singular edge, edges by id, facets in fan order.
fn fire_sources(mesh: &HexMesh) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for e in mesh.singular_edges() {
        for &f in &mesh.topo.fans[e as usize].facets {
            if !mesh.topo.is_boundary_facet(f) {
                out.push((e, f));
            }
        }
    }
    out
}

struct Front<'a> {
    mesh: &'a HexMesh,
    field: WallField,
    queue: BinaryHeap<Reverse<(u64, u64, u32, u32, u32)>>,
    seq: u64,
    ignore_alive: bool,
}

impl<'a> Front<'a> {
    fn new(mesh: &'a HexMesh, opts: &TraceOptions) -> Self {
        Front {
            mesh,
            field: WallField::new(mesh.topo.facets.len()),
            queue: BinaryHeap::new(),
            seq: 0,
            ignore_alive: opts.ignore_alive,
        }
    }

    fn push(&mut self, e: u32, f: u32, d: u64, origin: u32) {
        self.queue.push(Reverse((d, self.seq, e, f, origin)));
        self.seq += 1;
    }

    fn run(&mut self) {
        let topo = &self.mesh.topo;
        while let Some(Reverse((d, _, e, f, origin))) = self.queue.pop() {
            self.field.pop_order.push(d as f64);
            if self.field.tagged[f as usize] || !(self.ignore_alive || alive(self.mesh, &self.field, e)) {
                continue;
            }
            self.field.tagged[f as usize] = true;
            self.field.d[f as usize] = d as f64;
            self.field.origin[f as usize] = origin;
            for &e2 in &topo.facet_edges[f as usize] {
                if e2 == e || topo.is_boundary_edge(e2) || self.mesh.edge_class(e2).is_singular() {
                    continue;
                }
                if let Some(g) = opp_in_fan(topo, e2, f) {
                    if !self.field.tagged[g as usize] {
                        self.push(e2, g, d + 1, origin);
                    }
                }
            }
        }
    }

    fn finish(mut self) -> WallField {
        for (f, fr) in self.mesh.topo.facets.iter().enumerate() {
            if fr.is_boundary() {
                self.field.tagged[f] = true;
            }
        }
        self.field
    }
}

/// Simultaneous brush fire from all singular edges.
pub fn trace_hex(mesh: &HexMesh, opts: &TraceOptions) -> WallField {
    let mut front = Front::new(mesh, opts);
    let mut sources = fire_sources(mesh);
    permute(&mut sources, opts.seed);
    for &(e, f) in &sources {
        front.push(e, f, 0, e);
    }
    front.field.ignitions = sources.len();
    front.run();
    front.finish()
}

/// Serial variant: each source is tested with [`necessary`] and, if ignited,
/// fully propagated before the next source is considered.
pub fn trace_hex_sparse(mesh: &HexMesh, opts: &TraceOptions) -> WallField {
    let mut front = Front::new(mesh, opts);
    let mut sources = fire_sources(mesh);
    permute(&mut sources, opts.seed);
    for &(e, f) in &sources {
        if front.field.tagged[f as usize] || !necessary(mesh, &front.field, e, f) {
            continue;
        }
        front.field.ignitions += 1;
        front.push(e, f, 0, e);
        front.run();
    }
    front.finish()
}

/// Whether burning `f` is required to avoid a reflex angle at singular `e`.
/// Boundary facets count as burnt; so do positions past the ends of an open
/// boundary fan.
pub fn necessary(mesh: &HexMesh, field: &WallField, e: u32, f: u32) -> bool {
    let fan = &mesh.topo.fans[e as usize];
    let Some(i) = fan.position(f) else { return false };
    let n = fan.facets.len() as i64;
    let burnt = |off: i64| -> bool {
        let j = i as i64 + off;
        let g = if fan.closed {
            fan.facets[j.rem_euclid(n) as usize]
        } else if j < 0 || j >= n {
            return true;
        } else {
            fan.facets[j as usize]
        };
        field.tagged[g as usize] || mesh.topo.is_boundary_facet(g)
    };
    let (m2, m1, p1, p2) = (burnt(-2), burnt(-1), burnt(1), burnt(2));
    (!m1 && !p1) || (m1 && p2 && !p1) || (m2 && p1 && !m1)
}
