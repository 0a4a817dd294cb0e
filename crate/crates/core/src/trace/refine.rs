//! Tet mesh refined by edge splits, keeping every sub-tet in the chart of
//! the input tet it came from.

use crate::error::{Error, Result};
use crate::octa::{Rotation, Transition, Vec3};
use crate::tet::ParamTetMesh;
use crate::topology::NONE;
use std::collections::{HashMap, VecDeque};

#[derive(Clone, Debug)]
pub struct RTet {
    pub v: [u32; 4],
    pub p: [Vec3; 4],
    /// Input tet whose chart the corner values are expressed in.
    pub orig: u32,
    pub alive: bool,
    pub parent: u32,
    pub children: [u32; 2],
}

#[derive(Clone, Debug)]
pub struct RFacet {
    pub v: [u32; 3],
    pub tets: [u32; 2],
    /// Input facet containing this one, `NONE` inside an input tet.
    pub orig: u32,
    pub alive: bool,
    pub children: Option<[u32; 2]>,
    pub tagged: bool,
    pub d: f64,
    pub origin: u32,
}

#[derive(Clone, Debug)]
pub struct REdge {
    pub v: [u32; 2],
    pub alive: bool,
    pub parent: u32,
    pub in_orig_facet: bool,
    pub boundary: bool,
    pub singular: bool,
}

/// Refinable tet mesh with the split hierarchy of its facets.
#[derive(Clone, Debug)]
pub struct RefMesh {
    pub positions: Vec<Vec3>,
    pub tets: Vec<RTet>,
    pub facets: Vec<RFacet>,
    pub edges: Vec<REdge>,
    facet_index: HashMap<[u32; 3], u32>,
    edge_index: HashMap<[u32; 2], u32>,
    vertex_tets: Vec<Vec<u32>>,
    orig_facet_cells: Vec<[u32; 2]>,
    orig_facet_rot: Vec<Rotation>,
    orig_boundary: Vec<bool>,
    grid: f64,
    pub n_splits: usize,
}

fn key3(a: u32, b: u32, c: u32) -> [u32; 3] {
    let mut k = [a, b, c];
    k.sort_unstable();
    k
}

fn key2(a: u32, b: u32) -> [u32; 2] {
    [a.min(b), a.max(b)]
}

fn volume(p: &[Vec3; 4]) -> f64 {
    (p[1] - p[0]).dot(&(p[2] - p[0]).cross(&(p[3] - p[0])))
}

impl RefMesh {
    pub fn new(pm: &ParamTetMesh) -> RefMesh {
        let topo = pm.topo();
        let tets = (0..pm.n_tets() as u32)
            .map(|t| {
                let c = &topo.cells[t as usize];
                RTet { v: [c[0], c[1], c[2], c[3]], p: pm.tet_params(t), orig: t, alive: true, parent: NONE, children: [NONE; 2] }
            })
            .collect();
        let facets: Vec<RFacet> = topo
            .facets
            .iter()
            .enumerate()
            .map(|(i, fr)| RFacet {
                v: key3(fr.vertices[0], fr.vertices[1], fr.vertices[2]),
                tets: fr.cells,
                orig: i as u32,
                alive: true,
                children: None,
                tagged: false,
                d: 0.0,
                origin: NONE,
            })
            .collect();
        let edges: Vec<REdge> = topo
            .edges
            .iter()
            .enumerate()
            .map(|(e, &v)| REdge {
                v,
                alive: true,
                parent: NONE,
                in_orig_facet: true,
                boundary: topo.is_boundary_edge(e as u32),
                singular: pm.edge_class(e as u32).is_singular(),
            })
            .collect();
        let facet_index = facets.iter().enumerate().map(|(i, f)| (f.v, i as u32)).collect();
        let edge_index = edges.iter().enumerate().map(|(i, e)| (e.v, i as u32)).collect();
        let vertex_tets = topo.vertex_cells.clone();
        let orig_facet_cells = topo.facets.iter().map(|f| f.cells).collect();
        let orig_facet_rot = pm.cells().transitions.iter().map(|t| t.rotation).collect();
        let orig_boundary = topo.facets.iter().map(|f| f.is_boundary()).collect();
        RefMesh {
            positions: pm.positions().to_vec(),
            tets,
            facets,
            edges,
            facet_index,
            edge_index,
            vertex_tets,
            orig_facet_cells,
            orig_facet_rot,
            orig_boundary,
            grid: 2f64.powi(pm.scale().log2().ceil() as i32 - 40),
            n_splits: 0,
        }
    }

    /// Facet with these vertices, live or split.
    pub fn facet(&self, a: u32, b: u32, c: u32) -> Option<u32> {
        self.facet_index.get(&key3(a, b, c)).copied()
    }

    /// Edge with these vertices, live or split.
    pub fn edge(&self, a: u32, b: u32) -> Option<u32> {
        self.edge_index.get(&key2(a, b)).copied()
    }

    pub fn local(&self, t: u32, v: u32) -> usize {
        self.tets[t as usize].v.iter().position(|&x| x == v).expect("vertex of tet")
    }

    /// Value of vertex `v` in the chart of tet `t`.
    pub fn param(&self, t: u32, v: u32) -> Vec3 {
        self.tets[t as usize].p[self.local(t, v)]
    }

    pub fn is_boundary_facet(&self, f: u32) -> bool {
        let o = self.facets[f as usize].orig;
        o != NONE && self.orig_boundary[o as usize]
    }

    /// Input tet whose chart the facet uses, and a live tet of the facet in it.
    pub fn facet_chart(&self, f: u32) -> (u32, u32) {
        let fr = &self.facets[f as usize];
        let chart = if fr.orig != NONE {
            self.orig_facet_cells[fr.orig as usize][0]
        } else {
            self.tets[fr.tets.iter().find(|&&t| t != NONE).copied().unwrap() as usize].orig
        };
        let t = fr.tets.iter().copied().find(|&t| t != NONE && self.tets[t as usize].orig == chart).unwrap();
        (chart, t)
    }

    pub fn facet_edges(&self, f: u32) -> [u32; 3] {
        let [a, b, c] = self.facets[f as usize].v;
        [self.edge(a, b).unwrap(), self.edge(b, c).unwrap(), self.edge(a, c).unwrap()]
    }

    /// Live tets around edge `e`, ascending.
    pub fn edge_tets(&self, e: u32) -> Vec<u32> {
        let [a, b] = self.edges[e as usize].v;
        let mut out: Vec<u32> =
            self.vertex_tets[a as usize].iter().copied().filter(|&t| self.tets[t as usize].v.contains(&b)).collect();
        out.sort_unstable();
        out
    }

    /// Live facets around edge `e`, ascending.
    pub fn edge_facets(&self, e: u32) -> Vec<u32> {
        let [a, b] = self.edges[e as usize].v;
        let mut out = Vec::new();
        for t in self.edge_tets(e) {
            for &x in &self.tets[t as usize].v {
                if x != a && x != b {
                    out.push(self.facet(a, b, x).unwrap());
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Rotation from the chart of `from` into the chart of every tet around
    /// `e`, found by walking the edge star.
    pub fn star_rotations(&self, e: u32, from: u32) -> HashMap<u32, Rotation> {
        let [a, b] = self.edges[e as usize].v;
        let mut rot = HashMap::from([(from, Rotation::IDENTITY)]);
        let mut q = VecDeque::from([from]);
        while let Some(t) = q.pop_front() {
            let rt = rot[&t];
            for &x in &self.tets[t as usize].v {
                if x == a || x == b {
                    continue;
                }
                let f = self.facet(a, b, x).unwrap();
                let fr = &self.facets[f as usize];
                let n = if fr.tets[0] == t { fr.tets[1] } else { fr.tets[0] };
                if n == NONE || rot.contains_key(&n) {
                    continue;
                }
                rot.insert(n, self.step_rotation(f, t, n).compose(rt));
                q.push_back(n);
            }
        }
        rot
    }

    /// Rotation from the chart of tet `s` into that of `t` across facet `f`.
    pub fn step_rotation(&self, f: u32, s: u32, t: u32) -> Rotation {
        let (os, ot) = (self.tets[s as usize].orig, self.tets[t as usize].orig);
        if os == ot {
            return Rotation::IDENTITY;
        }
        let of = self.facets[f as usize].orig as usize;
        let r = self.orig_facet_rot[of];
        if self.orig_facet_cells[of][0] == os {
            r
        } else {
            r.inverse()
        }
    }

    /// Transition from the chart of tet `s` into that of `t` across facet `f`.
    pub fn step_transition(&self, f: u32, s: u32, t: u32) -> Result<Transition> {
        if self.tets[s as usize].orig == self.tets[t as usize].orig {
            return Ok(Transition::identity());
        }
        let v = self.facets[f as usize].v;
        let src: Vec<Vec3> = v.iter().map(|&x| self.param(s, x)).collect();
        let dst: Vec<Vec3> = v.iter().map(|&x| self.param(t, x)).collect();
        Transition::fit_exact(&src, &dst)
            .ok_or_else(|| Error::NotSeamless(format!("facet {f} has no exact transition between tets {s} and {t}")))
    }

    /// Output tet index of every live tet, `NONE` for dead ones, matching
    /// [`RefMesh::to_param_mesh`].
    pub fn live_index(&self) -> Vec<u32> {
        let mut next = 0;
        self.tets
            .iter()
            .map(|t| {
                if t.alive {
                    next += 1;
                    next - 1
                } else {
                    NONE
                }
            })
            .collect()
    }

    /// Rotation from the chart of input tet `from` to input tet `to`, both
    /// around edge `e`.
    pub fn chart_rotation(&self, e: u32, from: u32, to: u32) -> Rotation {
        if from == to {
            return Rotation::IDENTITY;
        }
        let tets = self.edge_tets(e);
        let s = *tets.iter().find(|&&t| self.tets[t as usize].orig == from).expect("chart around edge");
        let rot = self.star_rotations(e, s);
        let t = *tets.iter().find(|&&t| self.tets[t as usize].orig == to).expect("chart around edge");
        rot[&t]
    }

    fn add_edge(&mut self, v: [u32; 2], parent: u32, in_orig_facet: bool, boundary: bool, singular: bool) -> u32 {
        let k = key2(v[0], v[1]);
        if let Some(&e) = self.edge_index.get(&k) {
            return e;
        }
        let id = self.edges.len() as u32;
        self.edges.push(REdge { v: k, alive: true, parent, in_orig_facet, boundary, singular });
        self.edge_index.insert(k, id);
        id
    }

    fn add_facet(&mut self, a: u32, b: u32, c: u32, orig: u32, inherit: Option<(bool, f64, u32)>) -> u32 {
        let k = key3(a, b, c);
        if let Some(&f) = self.facet_index.get(&k) {
            return f;
        }
        let (tagged, d, origin) = inherit.unwrap_or((false, 0.0, NONE));
        let id = self.facets.len() as u32;
        self.facets.push(RFacet { v: k, tets: [NONE; 2], orig, alive: true, children: None, tagged, d, origin });
        self.facet_index.insert(k, id);
        id
    }

    fn attach(&mut self, t: u32) {
        let v = self.tets[t as usize].v;
        for i in 0..4 {
            let o = [0, 1, 2, 3].into_iter().filter(|&j| j != i).map(|j| v[j]).collect::<Vec<_>>();
            let f = self.facet(o[0], o[1], o[2]).expect("facet registered before its tet");
            let slot = &mut self.facets[f as usize].tets;
            if slot[0] == NONE {
                slot[0] = t;
            } else {
                debug_assert_eq!(slot[1], NONE);
                slot[1] = t;
            }
            self.vertex_tets[v[i] as usize].push(t);
        }
    }

    fn detach(&mut self, t: u32) {
        let v = self.tets[t as usize].v;
        for i in 0..4 {
            let o = [0, 1, 2, 3].into_iter().filter(|&j| j != i).map(|j| v[j]).collect::<Vec<_>>();
            let f = self.facet(o[0], o[1], o[2]).unwrap();
            let slot = &mut self.facets[f as usize].tets;
            if slot[0] == t {
                slot[0] = slot[1];
            }
            slot[1] = NONE;
            self.vertex_tets[v[i] as usize].retain(|&x| x != t);
        }
        self.tets[t as usize].alive = false;
    }

    /// Splits edge `e` where the plane `axis = value` of the chart of tet
    /// `reference` crosses it strictly inside. Returns the new vertex.
    pub fn split_edge(&mut self, e: u32, reference: u32, axis: usize, value: f64) -> Result<Option<u32>> {
        let [a, b] = self.edges[e as usize].v;
        let (pa, pb) = (self.param(reference, a), self.param(reference, b));
        let lambda = (value - pa[axis]) / (pb[axis] - pa[axis]);
        if !(lambda > 0.0 && lambda < 1.0) {
            return Ok(None);
        }
        let tets = self.edge_tets(e);
        let rot = self.star_rotations(e, reference);
        let v = self.positions.len() as u32;
        let (xa, xb) = (self.positions[a as usize], self.positions[b as usize]);
        self.positions.push(xa + (xb - xa) * lambda);
        self.vertex_tets.push(Vec::new());
        let g = self.grid;
        let mut pv = pa + (pb - pa) * lambda;
        for i in (0..3).filter(|&i| i != axis && pa[i] != pb[i]) {
            pv[i] = (pv[i] / g).round() * g;
        }
        pv[axis] = value;
        let mut per_chart: HashMap<u32, Vec3> = HashMap::new();
        for &t in &tets {
            let orig = self.tets[t as usize].orig;
            if per_chart.contains_key(&orig) {
                continue;
            }
            let r = rot[&t];
            let (qa, qb) = (self.param(t, a), self.param(t, b));
            let mut q = qa + r.apply(&(pv - pa));
            for i in 0..3 {
                if qa[i] == qb[i] {
                    q[i] = qa[i];
                }
            }
            per_chart.insert(orig, q);
        }

        let olds: Vec<RTet> = tets.iter().map(|&t| self.tets[t as usize].clone()).collect();
        for &t in &tets {
            self.detach(t);
        }

        let parent = self.edges[e as usize].clone();
        self.edges[e as usize].alive = false;
        self.add_edge([a, v], e, parent.in_orig_facet, parent.boundary, parent.singular);
        self.add_edge([v, b], e, parent.in_orig_facet, parent.boundary, parent.singular);

        let mut thirds: Vec<u32> = olds.iter().flat_map(|t| t.v).filter(|&x| x != a && x != b).collect();
        thirds.sort_unstable();
        thirds.dedup();
        for &c in &thirds {
            let f = self.facet(a, b, c).unwrap();
            let fr = self.facets[f as usize].clone();
            let boundary = fr.orig != NONE && self.orig_boundary[fr.orig as usize];
            self.add_edge([v, c], NONE, fr.orig != NONE, boundary, false);
            let inherit = Some((fr.tagged, fr.d, fr.origin));
            self.facets[f as usize].alive = false;
            let f0 = self.add_facet(a, v, c, fr.orig, inherit);
            let f1 = self.add_facet(v, b, c, fr.orig, inherit);
            self.facets[f as usize].children = Some([f0, f1]);
        }
        for (old, &ot) in olds.iter().zip(&tets) {
            let ia = old.v.iter().position(|&x| x == a).unwrap();
            let ib = old.v.iter().position(|&x| x == b).unwrap();
            let others: Vec<u32> = old.v.iter().copied().filter(|&x| x != a && x != b).collect();
            self.add_facet(v, others[0], others[1], NONE, None);
            for (slot, replaced) in [ib, ia].into_iter().enumerate() {
                let mut nt = old.clone();
                nt.parent = ot;
                nt.children = [NONE; 2];
                nt.alive = true;
                nt.v[replaced] = v;
                nt.p[replaced] = per_chart[&old.orig];
                if volume(&nt.p) <= 0.0 {
                    return Err(Error::Integrity(format!("split of edge ({a}, {b}) inverts a tet")));
                }
                let id = self.tets.len() as u32;
                self.tets.push(nt);
                self.attach(id);
                self.tets[ot as usize].children[slot] = id;
            }
        }
        self.n_splits += 1;
        Ok(Some(v))
    }

    /// Whether `x` is `e` or was produced from it by splits.
    pub fn descends_from(&self, mut x: u32, e: u32) -> bool {
        loop {
            if x == e {
                return true;
            }
            x = self.edges[x as usize].parent;
            if x == NONE {
                return false;
            }
        }
    }

    /// Live sub-edges of `e`, including `e` itself if unsplit.
    pub fn leaves(&self, e: u32) -> Vec<u32> {
        if self.edges[e as usize].alive {
            return vec![e];
        }
        let mut out: Vec<u32> =
            (0..self.edges.len() as u32).filter(|&x| self.edges[x as usize].alive && self.descends_from(x, e)).collect();
        out.sort_unstable();
        out
    }

    /// Live tets with their input facet or interior facets rebuilt as a
    /// parametrized tet mesh, and the refined facet of each output facet.
    pub fn to_param_mesh(&self) -> Result<(ParamTetMesh, Vec<u32>)> {
        let live: Vec<&RTet> = self.tets.iter().filter(|t| t.alive).collect();
        let tets = live.iter().map(|t| t.v).collect();
        let params = live.iter().map(|t| t.p).collect();
        let pm = ParamTetMesh::new(self.positions.clone(), tets, params)?;
        let map = pm
            .topo()
            .facets
            .iter()
            .map(|fr| self.facet(fr.vertices[0], fr.vertices[1], fr.vertices[2]).expect("live facet"))
            .collect();
        Ok((pm, map))
    }
}
