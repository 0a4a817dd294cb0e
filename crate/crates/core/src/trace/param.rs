//! Brush fire on seamless parametrizations with on-the-fly refinement.
//!
//! Walls run along parametric iso-planes, which generally cut through tets.
//! Tets are split so that every wall lies on mesh facets. Entries whose
//! facet was split since they were queued are resolved through the split
//! hierarchy when popped.

use super::refine::RefMesh;
use crate::complex::{cut_site, extract_complex, BlockType, MotorcycleComplex};
use crate::octa::Transition;
use super::{permute, TraceOptions, WallField};
use crate::error::{Error, Result};
use crate::octa::Vec3;
use crate::tet::ParamTetMesh;
use crate::topology::NONE;
use ordered_float::OrderedFloat;
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};

/// Axis-aligned unit direction in some chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dir {
    pub axis: usize,
    pub sign: i8,
}

impl Dir {
    fn dot(self, p: &Vec3) -> f64 {
        self.sign as f64 * p[self.axis]
    }
}

#[derive(Clone, Copy, Debug)]
struct Entry {
    e: u32,
    f: u32,
    d: f64,
    n: Dir,
    origin: u32,
}

/// Coordinates in which edge `e` is constant within the chart of tet `t`.
pub fn iso_axes(rm: &RefMesh, e: u32, t: u32) -> Vec<usize> {
    let [a, b] = rm.edges[e as usize].v;
    let (pa, pb) = (rm.param(t, a), rm.param(t, b));
    (0..3).filter(|&k| pa[k] == pb[k]).collect()
}

/// Iso-facet of `t` through `e` on the plane `k = const`: an existing facet
/// other than `exclude`, or a new one made by splitting the opposite edge.
pub fn split_plane(rm: &mut RefMesh, e: u32, t: u32, k: usize, exclude: Option<u32>) -> Result<Option<u32>> {
    let [a, b] = rm.edges[e as usize].v;
    let c = rm.param(t, a)[k];
    let others: Vec<u32> = rm.tets[t as usize].v.iter().copied().filter(|&x| x != a && x != b).collect();
    let (x, y) = (others[0], others[1]);
    let (px, py) = (rm.param(t, x)[k] - c, rm.param(t, y)[k] - c);
    if px * py < 0.0 {
        let opp = rm.edge(x, y).unwrap();
        let v = rm.split_edge(opp, t, k, c)?.ok_or_else(|| Error::Integrity("iso-plane split fell on an endpoint".into()))?;
        return Ok(rm.facet(a, b, v));
    }
    for (z, pz) in [(x, px), (y, py)] {
        if pz == 0.0 {
            let f = rm.facet(a, b, z).unwrap();
            if Some(f) != exclude {
                return Ok(Some(f));
            }
        }
    }
    Ok(None)
}

/// Iso-facet of `t` through `e` on any plane containing `e`; splits
/// if a plane crosses the opposite edge.
pub fn split_iso(rm: &mut RefMesh, e: u32, t: u32) -> Result<Option<u32>> {
    let axes = iso_axes(rm, e, t);
    if axes.is_empty() {
        return Err(Error::Precondition(format!("edge {e} is not constant in any coordinate of tet {t}")));
    }
    let [a, b] = rm.edges[e as usize].v;
    let others: Vec<u32> = rm.tets[t as usize].v.iter().copied().filter(|&x| x != a && x != b).collect();
    let c = rm.param(t, a);
    for &k in &axes {
        let (px, py) = (rm.param(t, others[0])[k] - c[k], rm.param(t, others[1])[k] - c[k]);
        if px * py < 0.0 {
            return split_plane(rm, e, t, k, None);
        }
    }
    for &k in &axes {
        if let Some(f) = split_plane(rm, e, t, k, None)? {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

/// Coordinate in which facet `f` is constant in its own chart.
pub fn facet_axis(rm: &RefMesh, f: u32) -> Option<usize> {
    let (_, t) = rm.facet_chart(f);
    let p = rm.facets[f as usize].v.map(|v| rm.param(t, v));
    (0..3).find(|&k| p[0][k] == p[1][k] && p[1][k] == p[2][k])
}

/// As [`split_iso`], restricted to planes aligned with `f` and excluding `f`.
pub fn split_opp(rm: &mut RefMesh, e: u32, t: u32, f: u32) -> Result<Option<u32>> {
    let kf = facet_axis(rm, f).ok_or_else(|| Error::Precondition(format!("facet {f} is not an iso-facet")))?;
    let (chart, _) = rm.facet_chart(f);
    let kt = rm.chart_rotation(e, chart, rm.tets[t as usize].orig).map_axis(kf).0;
    if !iso_axes(rm, e, t).contains(&kt) {
        return Err(Error::NotSeamless(format!("edge {e} leaves the iso-plane of facet {f} across a chart transition")));
    }
    split_plane(rm, e, t, kt, Some(f))
}

/// Parametric advance `nᵀ(φ(p_e') − φ(p_e))` from edge `e` to edge `e2` in
/// the chart of tet `t`, each point the endpoint minimizing `nᵀφ`.
pub fn ext(rm: &RefMesh, e: u32, e2: u32, n: Dir, t: u32) -> f64 {
    let low = |x: u32| rm.edges[x as usize].v.iter().map(|&v| n.dot(&rm.param(t, v))).fold(f64::INFINITY, f64::min);
    (low(e2) - low(e)).max(0.0)
}

struct Front {
    rm: RefMesh,
    entries: Vec<Entry>,
    queue: BinaryHeap<Reverse<(bool, OrderedFloat<f64>, u64)>>,
    ignore_alive: bool,
    pop_order: Vec<f64>,
}

impl Front {
    fn push(&mut self, en: Entry) {
        let seq = self.entries.len() as u64;
        let class = self.rm.edges[en.e as usize].in_orig_facet;
        self.entries.push(en);
        self.queue.push(Reverse((class, OrderedFloat(en.d), seq)));
    }

    fn alive(&self, e: u32) -> bool {
        let er = &self.rm.edges[e as usize];
        er.singular || self.rm.edge_facets(e).iter().filter(|&&f| self.rm.facets[f as usize].tagged).count() <= 2
    }

    fn run(&mut self) -> Result<()> {
        while let Some(Reverse((_, _, seq))) = self.queue.pop() {
            let en = self.entries[seq as usize];
            let fr = &self.rm.facets[en.f as usize];
            if !fr.alive {
                let children = fr.children.expect("split facet has children");
                for c in children {
                    let [x, y, z] = self.rm.facets[c as usize].v;
                    for (p, q) in [(x, y), (y, z), (x, z)] {
                        let sub = self.rm.edge(p, q).unwrap();
                        if self.rm.descends_from(sub, en.e) {
                            self.push(Entry { e: sub, f: c, ..en });
                        }
                    }
                }
                continue;
            }
            self.pop_order.push(en.d);
            if fr.tagged || !(self.ignore_alive || self.alive(en.e)) {
                continue;
            }
            {
                let fr = &mut self.rm.facets[en.f as usize];
                fr.tagged = true;
                fr.d = en.d;
                fr.origin = en.origin;
            }
            self.spread(en)?;
        }
        Ok(())
    }

    fn spread(&mut self, en: Entry) -> Result<()> {
        let (chart, tf) = self.rm.facet_chart(en.f);
        for e2 in self.rm.facet_edges(en.f) {
            let er = &self.rm.edges[e2 as usize];
            if e2 == en.e || er.boundary || er.singular {
                continue;
            }
            let step = ext(&self.rm, en.e, e2, en.n, tf);
            let mut pushed = BTreeSet::new();
            loop {
                let before = self.rm.n_splits;
                for t in self.rm.edge_tets(e2) {
                    if !self.rm.tets[t as usize].alive {
                        continue;
                    }
                    let Some(g) = split_opp(&mut self.rm, e2, t, en.f)? else { continue };
                    if self.rm.facets[g as usize].tagged || !pushed.insert(g) {
                        continue;
                    }
                    let (chart_g, _) = self.rm.facet_chart(g);
                    let (axis, sign) = self.rm.chart_rotation(e2, chart, chart_g).map_axis(en.n.axis);
                    let n = Dir { axis, sign: en.n.sign * sign as i8 };
                    self.push(Entry { e: e2, f: g, d: en.d + step, n, origin: en.origin });
                }
                if self.rm.n_splits == before {
                    break;
                }
            }
        }
        Ok(())
    }
}

/// Direction orthogonal to `e` inside iso-facet `f`, pointing from `e`
/// towards the third vertex.
fn ignition_dir(rm: &RefMesh, e: u32, f: u32) -> Result<Dir> {
    let (_, t) = rm.facet_chart(f);
    let kf = facet_axis(rm, f).unwrap();
    let axes = iso_axes(rm, e, t);
    let k2 = axes.iter().copied().find(|&k| k != kf).ok_or_else(|| {
        Error::Precondition(format!("singular edge {e} is not aligned with a parameter axis"))
    })?;
    let [a, b] = rm.edges[e as usize].v;
    let x = rm.facets[f as usize].v.into_iter().find(|&v| v != a && v != b).unwrap();
    let s = rm.param(t, x)[k2] - rm.param(t, a)[k2];
    Ok(Dir { axis: k2, sign: if s > 0.0 { 1 } else { -1 } })
}

/// Result of tracing: the refined mesh, its wall field, and the refined
/// mesh with split history for further cuts.
pub struct ParamTrace {
    pub mesh: ParamTetMesh,
    pub field: WallField,
    pub refined: RefMesh,
}

fn ignite(rm: &mut RefMesh) -> Result<Vec<Entry>> {
    let singular: Vec<u32> = (0..rm.edges.len() as u32).filter(|&e| rm.edges[e as usize].singular).collect();
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for root in singular {
        for e in rm.leaves(root) {
            loop {
                let before = rm.n_splits;
                for t in rm.edge_tets(e) {
                    if !rm.tets[t as usize].alive {
                        continue;
                    }
                    for k in iso_axes(rm, e, t) {
                        if let Some(f) = split_plane(rm, e, t, k, None)? {
                            if !rm.is_boundary_facet(f) && seen.insert((e, f)) {
                                out.push((e, f));
                            }
                        }
                    }
                }
                if rm.n_splits == before {
                    break;
                }
            }
        }
    }
    let mut entries = Vec::with_capacity(out.len());
    for (e, f) in out {
        if rm.facets[f as usize].alive {
            entries.push(Entry { e, f, d: 0.0, n: ignition_dir(rm, e, f)?, origin: e });
        }
    }
    Ok(entries)
}

/// Runs the brush fire from every singular edge, refining as walls cross
/// tets, and tags boundary facets at the end.
pub fn trace_param(pm: &ParamTetMesh, opts: &TraceOptions) -> Result<ParamTrace> {
    let mut rm = RefMesh::new(pm);
    let mut sources = ignite(&mut rm)?;
    permute(&mut sources, opts.seed);
    let ignitions = sources.len();
    let mut front = Front { rm, entries: Vec::new(), queue: BinaryHeap::new(), ignore_alive: opts.ignore_alive, pop_order: Vec::new() };
    for en in sources {
        front.push(en);
    }
    front.run()?;
    finish(front.rm, front.pop_order, ignitions)
}

pub(crate) fn finish(mut rm: RefMesh, pop_order: Vec<f64>, ignitions: usize) -> Result<ParamTrace> {
    for f in 0..rm.facets.len() as u32 {
        if rm.facets[f as usize].alive && rm.is_boundary_facet(f) {
            rm.facets[f as usize].tagged = true;
        }
    }
    let (mesh, map) = rm.to_param_mesh()?;
    let mut field = WallField::new(map.len());
    for (i, &f) in map.iter().enumerate() {
        let fr = &rm.facets[f as usize];
        field.tagged[i] = fr.tagged;
        field.d[i] = fr.d;
        field.origin[i] = if fr.origin == NONE { NONE } else { root_edge(&rm, fr.origin) };
    }
    field.pop_order = pop_order;
    field.ignitions = ignitions;
    Ok(ParamTrace { mesh, field, refined: rm })
}

/// Cuts every toroidal block along the iso-plane through its cut site,
/// orthogonal to the arc there, splitting tets the plane crosses. Returns
/// the final trace, its complex and the number of cuts.
pub fn cut_tori(tr: ParamTrace) -> Result<(ParamTrace, MotorcycleComplex, usize)> {
    let ParamTrace { mut mesh, mut field, mut refined } = tr;
    let mut mc = extract_complex(mesh.cells(), &field.tagged, &field.d)?;
    let mut cuts = 0;
    while let Some(b) = mc.blocks.iter().position(|blk| matches!(blk.kind, Some(BlockType::Toroidal { .. }))) {
        let (v, e) = cut_site(&mc, b)?;
        let live = refined.live_index();
        let members: HashSet<u32> = (0..live.len() as u32)
            .filter(|&t| live[t as usize] != NONE && mc.cell_block[live[t as usize] as usize] == b as u32)
            .collect();
        let [ea, eb] = mesh.topo().edges[e as usize];
        let re = refined.edge(ea, eb).unwrap();
        let root = refined.edge_tets(re).into_iter().find(|t| members.contains(t)).ok_or_else(|| {
            Error::Integrity(format!("arc edge {e} of toroidal block {b} has no tet in the block"))
        })?;
        let dir = refined.param(root, eb) - refined.param(root, ea);
        let k = (0..3).max_by(|&i, &j| dir[i].abs().total_cmp(&dir[j].abs())).unwrap();
        if (0..3).any(|i| i != k && dir[i] != 0.0) {
            return Err(Error::Unsupported(format!("arc edge {e} of toroidal block {b} is not axis-aligned")));
        }
        let c = refined.param(root, v)[k];
        let cut = plane_cut(&mut refined, &members, root, k, c, 1e-9 * mesh.scale())?;
        if cut.is_empty() {
            return Err(Error::Unsupported(format!("no cross-section through vertex {v} in toroidal block {b}")));
        }
        for f in cut {
            let fr = &mut refined.facets[f as usize];
            fr.tagged = true;
            fr.d = 0.0;
            fr.origin = NONE;
        }
        cuts += 1;
        let ignitions = field.ignitions;
        let next = finish(refined, std::mem::take(&mut field.pop_order), ignitions)?;
        let next_mc = extract_complex(next.mesh.cells(), &next.field.tagged, &next.field.d)?;
        if next_mc.n_toroidal() >= mc.n_toroidal() {
            return Err(Error::Integrity(format!("cutting toroidal block {b} did not produce a cuboid")));
        }
        ParamTrace { mesh, field, refined } = next;
        mc = next_mc;
    }
    Ok((ParamTrace { mesh, field, refined }, mc, cuts))
}

/// Splits the tets of a block crossed by the plane `axis k = c` of the chart
/// of `root`, flooding outward from `root` through tets meeting the plane.
/// Returns the live facets lying on the plane.
fn plane_cut(rm: &mut RefMesh, members: &HashSet<u32>, root: u32, k: usize, c: f64, eps: f64) -> Result<Vec<u32>> {
    let in_block = |rm: &RefMesh, mut t: u32| loop {
        if members.contains(&t) {
            return true;
        }
        t = rm.tets[t as usize].parent;
        if t == NONE {
            return false;
        }
    };
    let mut unfold: HashMap<u32, Transition> = HashMap::from([(root, Transition::identity())]);
    let mut done = HashSet::new();
    let mut stack = vec![root];
    let mut out = BTreeSet::new();
    while let Some(t) = stack.pop() {
        if done.contains(&t) {
            continue;
        }
        let tr = unfold[&t];
        if !rm.tets[t as usize].alive {
            for ch in rm.tets[t as usize].children {
                if ch != NONE {
                    unfold.insert(ch, tr);
                    stack.push(ch);
                }
            }
            continue;
        }
        let vs = rm.tets[t as usize].v;
        let u = vs.map(|x| tr.apply(&rm.param(t, x))[k] - c);
        if u.iter().all(|&x| x > eps) || u.iter().all(|&x| x < -eps) {
            done.insert(t);
            continue;
        }
        let crossing = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).find(|&(i, j)| {
            (u[i] < -eps && u[j] > eps) || (u[i] > eps && u[j] < -eps)
        });
        if let Some((i, j)) = crossing {
            let (kt, sign) = tr.rotation.inverse().map_axis(k);
            let value = (c - tr.translation[k]) * sign;
            let e = rm.edge(vs[i], vs[j]).unwrap();
            rm.split_edge(e, t, kt, value)?.ok_or_else(|| Error::Integrity("cut plane split fell on an endpoint".into()))?;
            stack.push(t);
            continue;
        }
        done.insert(t);
        for skip in 0..4 {
            let o: Vec<u32> = (0..4).filter(|&i| i != skip).map(|i| vs[i]).collect();
            let uf: Vec<f64> = (0..4).filter(|&i| i != skip).map(|i| u[i]).collect();
            let f = rm.facet(o[0], o[1], o[2]).unwrap();
            if uf.iter().all(|x| x.abs() <= eps) && !rm.is_boundary_facet(f) {
                out.insert(f);
            }
            if uf.iter().all(|x| x.abs() > eps) || rm.facets[f as usize].tagged {
                continue;
            }
            let fr = &rm.facets[f as usize];
            let n = if fr.tets[0] == t { fr.tets[1] } else { fr.tets[0] };
            if n == NONE || unfold.contains_key(&n) || !in_block(rm, n) {
                continue;
            }
            let step = rm.step_transition(f, n, t)?;
            unfold.insert(n, tr.compose(&step));
            stack.push(n);
        }
    }
    Ok(out.into_iter().filter(|&f| rm.facets[f as usize].alive).collect())
}

fn root_edge(rm: &RefMesh, mut e: u32) -> u32 {
    while rm.edges[e as usize].parent != NONE {
        e = rm.edges[e as usize].parent;
    }
    e
}

#[cfg(test)]
mod tests;
