use crate::cells::CellMesh;
use crate::complex::MotorcycleComplex;
use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::hex::{build_hex_connectivity, HexMesh};
use crate::octa::{Transition, Vec3};
use crate::topology::{HEX_CORNERS, NONE};
use std::collections::{BTreeMap, HashMap, VecDeque};

/// Tet spanned by the block centre, a wall centre and a wall boundary
/// segment, in parametric and integer-grid coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetaTet {
    pub param: [Vec3; 4],
    pub grid: [Vec3; 4],
}

#[derive(Clone, Debug)]
struct WallOcc {
    wall: u32,
    axis: usize,
    value: i64,
    lo: [i64; 3],
    hi: [i64; 3],
    origin: [i64; 3],
    u: [i64; 3],
    v: [i64; 3],
}

/// Piecewise-affine map of one block onto an `l × m × n` integer box,
/// affine on each meta-tet.
#[derive(Clone, Debug)]
pub struct BlockMap {
    pub block: u32,
    pub dims: [i64; 3],
    /// Chart of every block cell into the block frame.
    pub unfold: BTreeMap<u32, Transition>,
    pub meta: Vec<MetaTet>,
    nodes: HashMap<[i64; 3], u32>,
    arcs: Vec<(u32, [i64; 3], [i64; 3])>,
    walls: Vec<WallOcc>,
}

fn key(p: &Vec3) -> [u64; 3] {
    [(p.x + 0.0).to_bits(), (p.y + 0.0).to_bits(), (p.z + 0.0).to_bits()]
}

fn to_vec(g: [i64; 3]) -> Vec3 {
    Vec3::new(g[0] as f64, g[1] as f64, g[2] as f64)
}

fn det(p: &[Vec3; 4]) -> f64 {
    (p[1] - p[0]).dot(&(p[2] - p[0]).cross(&(p[3] - p[0])))
}

fn barycentric(p: &[Vec3; 4], x: &Vec3) -> [f64; 4] {
    let m = nalgebra::Matrix3::from_columns(&[p[1] - p[0], p[2] - p[0], p[3] - p[0]]);
    let l = m.lu().solve(&(x - p[0])).unwrap_or(Vec3::repeat(f64::NAN));
    [1.0 - l.x - l.y - l.z, l.x, l.y, l.z]
}

fn min4(l: &[f64; 4]) -> f64 {
    l.iter().copied().fold(f64::INFINITY, f64::min)
}

fn unfold_block(mesh: &CellMesh, mc: &MotorcycleComplex, b: u32) -> Result<BTreeMap<u32, Transition>> {
    let topo = &mesh.topo;
    let root = mc.blocks[b as usize].cells[0];
    let mut unfold = BTreeMap::from([(root, Transition::identity())]);
    let mut q = VecDeque::from([root]);
    while let Some(c) = q.pop_front() {
        let tc = unfold[&c];
        for &f in &topo.cell_facets[c as usize] {
            let fr = &topo.facets[f as usize];
            if fr.is_boundary() || mc.tagged[f as usize] {
                continue;
            }
            let n = fr.other_cell(c);
            let tn = tc.compose(&mesh.transition_from(f, n));
            match unfold.get(&n) {
                Some(t) if *t != tn => {
                    return Err(Error::Integrity(format!("block {b} does not unfold into one chart at facet {f}")))
                }
                Some(_) => {}
                None => {
                    unfold.insert(n, tn);
                    q.push_back(n);
                }
            }
        }
    }
    Ok(unfold)
}

/// Block map of cuboid block `b` for integer arc lengths `l`: walls become
/// integer rectangles, the map is affine on meta-tets joining the block
/// centre to a fan triangulation of every wall.
pub fn reparametrize_block(mesh: &CellMesh, mc: &MotorcycleComplex, b: u32, l: &[i64]) -> Result<BlockMap> {
    let topo = &mesh.topo;
    let unfold = unfold_block(mesh, mc, b)?;

    let mut points: Vec<Vec3> = Vec::new();
    let mut index: HashMap<[u64; 3], usize> = HashMap::new();
    let mut point = |p: Vec3| -> usize {
        *index.entry(key(&p)).or_insert_with(|| {
            points.push(p);
            points.len() - 1
        })
    };

    // block-side facets of walls, grouped into occurrences of each wall:
    // pairs sharing a non-arc edge at the same block-frame position
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    let mut edge_occ: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    let mut glue: HashMap<(u32, u32, usize, usize), usize> = HashMap::new();
    let mut dsu = Dsu::new(0);
    for (&c, t) in &unfold {
        for &f in &topo.cell_facets[c as usize] {
            let fr = &topo.facets[f as usize];
            if !(fr.is_boundary() || mc.tagged[f as usize]) {
                continue;
            }
            let w = mc.facet_wall[f as usize];
            if w == NONE {
                return Err(Error::Integrity(format!("facet {f} bounds block {b} but has no wall")));
            }
            let id = pairs.len();
            pairs.push((f, c));
            dsu.push();
            for &e in &topo.facet_edges[f as usize] {
                let [x, y] = topo.edges[e as usize];
                let ends = (point(t.apply(&mesh.param(c, x))), point(t.apply(&mesh.param(c, y))));
                if mc.edge_arc[e as usize] == NONE {
                    if let Some(&other) = glue.get(&(w, e, ends.0, ends.1)) {
                        dsu.union(id as u32, other as u32);
                    } else {
                        glue.insert((w, e, ends.0, ends.1), id);
                    }
                    continue;
                }
                let list = edge_occ.entry(e).or_default();
                if !list.contains(&ends) {
                    list.push(ends);
                }
            }
        }
    }
    // occurrence -> corner point where side A0 starts
    let mut occ: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for i in 0..pairs.len() {
        groups.entry(dsu.find(i as u32)).or_default().push(i);
    }
    for members in groups.values() {
        let w = mc.facet_wall[pairs[members[0]].0 as usize];
        let (f0, v0) =
            mc.walls[w as usize].corner.ok_or_else(|| Error::Precondition(format!("wall {w} is not a rectangle")))?;
        let &(_, c0) = members.iter().map(|&i| &pairs[i]).find(|p| p.0 == f0).ok_or_else(|| {
            Error::Integrity(format!("corner facet of wall {w} is missing from its occurrence on block {b}"))
        })?;
        occ.insert((w, members[0] as u32), point(unfold[&c0].apply(&mesh.param(c0, v0))));
    }

    // arc occurrences (arc, point of its first vertex, point of its last),
    // chained edge by edge through shared points
    let mut arc_ids: Vec<u32> = edge_occ.keys().map(|&e| mc.edge_arc[e as usize]).collect();
    arc_ids.sort_unstable();
    arc_ids.dedup();
    let mut point_node: HashMap<usize, u32> = HashMap::new();
    let mut arc_occ: Vec<(u32, usize, usize)> = Vec::new();
    for &a in &arc_ids {
        let arc = &mc.arcs[a as usize];
        if arc.nodes[0] == NONE {
            return Err(Error::Precondition(format!("arc {a} of block {b} is a node-free loop")));
        }
        let at = |i: usize, pos: usize| -> Option<usize> {
            let e = arc.edges[i];
            let [x, _] = topo.edges[e as usize];
            edge_occ.get(&e)?.iter().find_map(|&(px, py)| {
                let (from, to) = if x == arc.vertices[i] { (px, py) } else { (py, px) };
                (from == pos).then_some(to)
            })
        };
        let e0 = arc.edges[0];
        let [x0, _] = topo.edges[e0 as usize];
        for &(px, py) in edge_occ.get(&e0).map(|v| v.as_slice()).unwrap_or(&[]) {
            let start = if x0 == arc.vertices[0] { px } else { py };
            let mut cur = start;
            for i in 0..arc.edges.len() {
                cur = at(i, cur).ok_or_else(|| Error::Integrity(format!("arc {a} breaks on block {b}")))?;
            }
            if !arc_occ.contains(&(a, start, cur)) {
                arc_occ.push((a, start, cur));
                point_node.insert(start, arc.nodes[0]);
                point_node.insert(cur, arc.nodes[1]);
            }
        }
    }
    if points.is_empty() || arc_occ.is_empty() {
        return Err(Error::Precondition(format!("block {b} has no arcs")));
    }

    // integer coordinates of every node occurrence, from the lowest corner
    let mut adj: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); points.len()];
    for &(a, i0, i1) in &arc_occ {
        let d = points[i1] - points[i0];
        let axis = (0..3).max_by(|&i, &j| d[i].abs().total_cmp(&d[j].abs())).unwrap();
        if (0..3).any(|i| i != axis && d[i].abs() > 1e-9 * d[axis].abs()) {
            return Err(Error::Integrity(format!("arc {a} is not axis-aligned in block {b}")));
        }
        let step = l[a as usize] * d[axis].signum() as i64;
        adj[i0].push((i1, axis, step));
        adj[i1].push((i0, axis, -step));
    }
    let ends: Vec<usize> = point_node.keys().copied().collect();
    let lo = ends.iter().map(|&i| &points[i]).fold(Vec3::repeat(f64::INFINITY), |m, p| m.inf(p));
    let hi = ends.iter().map(|&i| &points[i]).fold(Vec3::repeat(f64::NEG_INFINITY), |m, p| m.sup(p));
    let root = *index.get(&key(&lo)).ok_or_else(|| Error::Integrity(format!("block {b} has no lowest corner node")))?;
    let mut grid: Vec<Option<[i64; 3]>> = vec![None; points.len()];
    let is_end = |i: usize| point_node.contains_key(&i);
    grid[root] = Some([0; 3]);
    let mut q = VecDeque::from([root]);
    while let Some(i) = q.pop_front() {
        let gi = grid[i].unwrap();
        for &(j, axis, step) in &adj[i] {
            let mut gj = gi;
            gj[axis] += step;
            match grid[j] {
                Some(g) if g != gj => {
                    return Err(Error::Integrity(format!("arc lengths of block {b} do not close up")));
                }
                Some(_) => {}
                None => {
                    grid[j] = Some(gj);
                    q.push_back(j);
                }
            }
        }
    }
    if (0..points.len()).any(|i| is_end(i) && grid[i].is_none()) {
        return Err(Error::Integrity(format!("block {b} boundary graph is disconnected")));
    }
    let grid: Vec<[i64; 3]> = grid.into_iter().map(|g| g.unwrap_or([i64::MIN; 3])).collect();
    let top = *index.get(&key(&hi)).ok_or_else(|| Error::Integrity(format!("block {b} has no highest corner node")))?;
    let dims = grid[top];
    if dims.iter().any(|&x| x < 1) || (0..points.len()).any(|i| is_end(i) && (0..3).any(|k| grid[i][k] < 0 || grid[i][k] > dims[k])) {
        return Err(Error::Integrity(format!("block {b} integer box is degenerate")));
    }

    let centre_p = (lo + hi) / 2.0;
    let centre_g = to_vec(dims) / 2.0;
    let mut meta = Vec::new();
    let mut walls = Vec::new();
    let end_of = |a: u32, from: usize| -> Option<usize> {
        arc_occ.iter().find_map(|&(x, i0, i1)| {
            if x != a {
                None
            } else if i0 == from {
                Some(i1)
            } else if i1 == from {
                Some(i0)
            } else {
                None
            }
        })
    };
    for (&(w, _), &start) in &occ {
        let sides = mc.walls[w as usize]
            .sides
            .as_ref()
            .ok_or_else(|| Error::Precondition(format!("wall {w} is not a rectangle")))?;
        let mut ring = vec![start];
        let mut corners = vec![start];
        for s in sides {
            for &a in s {
                let cur = *ring.last().unwrap();
                let next = end_of(a, cur).ok_or_else(|| Error::Integrity(format!("wall {w} boundary breaks at arc {a}")))?;
                ring.push(next);
            }
            corners.push(*ring.last().unwrap());
        }
        if ring.last() != Some(&start) {
            return Err(Error::Integrity(format!("wall {w} boundary does not close")));
        }
        let cp = corners[..4].iter().map(|&i| points[i]).sum::<Vec3>() / 4.0;
        let cg = corners[..4].iter().map(|&i| to_vec(grid[i])).sum::<Vec3>() / 4.0;
        for j in 0..ring.len() - 1 {
            let (x, y) = (ring[j], ring[j + 1]);
            let mut param = [centre_p, cp, points[x], points[y]];
            let mut g = [centre_g, cg, to_vec(grid[x]), to_vec(grid[y])];
            if det(&param) < 0.0 {
                param.swap(2, 3);
                g.swap(2, 3);
            }
            if !(det(&param) > 0.0 && det(&g) > 0.0) {
                return Err(Error::Integrity(format!(
                    "meta-tet of wall {w} in block {b} is degenerate or inverted"
                )));
            }
            meta.push(MetaTet { param, grid: g });
        }
        let g0 = grid[corners[0]];
        let axis = (0..3).find(|&k| corners[..4].iter().all(|&i| grid[i][k] == g0[k])).ok_or_else(|| {
            Error::Integrity(format!("wall {w} is not flat in block {b}"))
        })?;
        let unit = |to: usize| -> [i64; 3] { std::array::from_fn(|k| (grid[to][k] - g0[k]).signum()) };
        let mut wlo = g0;
        let mut whi = g0;
        for &i in &corners[..4] {
            for k in 0..3 {
                wlo[k] = wlo[k].min(grid[i][k]);
                whi[k] = whi[k].max(grid[i][k]);
            }
        }
        walls.push(WallOcc {
            wall: w,
            axis,
            value: g0[axis],
            lo: wlo,
            hi: whi,
            origin: g0,
            u: unit(corners[1]),
            v: unit(corners[3]),
        });
    }
    let nodes = point_node.iter().map(|(&i, &n)| (grid[i], n)).collect();
    let arcs = arc_occ.iter().map(|&(a, i0, i1)| (a, grid[i0], grid[i1])).collect();
    Ok(BlockMap { block: b, dims, unfold, meta, nodes, arcs, walls })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum GridKey {
    Node(u32),
    Arc(u32, i64),
    Wall(u32, i64, i64),
    Cell(u32, [i64; 3]),
}

impl BlockMap {
    fn classify(&self, g: [i64; 3]) -> Result<GridKey> {
        if (0..3).all(|k| g[k] > 0 && g[k] < self.dims[k]) {
            return Ok(GridKey::Cell(self.block, g));
        }
        if let Some(&n) = self.nodes.get(&g) {
            return Ok(GridKey::Node(n));
        }
        for &(a, s, e) in &self.arcs {
            let axis = (0..3).find(|&k| s[k] != e[k]).unwrap();
            let (lo, hi) = (s[axis].min(e[axis]), s[axis].max(e[axis]));
            if (0..3).all(|k| k == axis || g[k] == s[k]) && g[axis] > lo && g[axis] < hi {
                return Ok(GridKey::Arc(a, (g[axis] - s[axis]).abs()));
            }
        }
        for w in &self.walls {
            if g[w.axis] == w.value && (0..3).all(|k| k == w.axis || (g[k] > w.lo[k] && g[k] < w.hi[k])) {
                let d: [i64; 3] = std::array::from_fn(|k| g[k] - w.origin[k]);
                let dot = |x: [i64; 3]| (0..3).map(|k| d[k] * x[k]).sum::<i64>();
                return Ok(GridKey::Wall(w.wall, dot(w.u), dot(w.v)));
            }
        }
        Err(Error::Integrity(format!("grid point {g:?} of block {} lies on no wall", self.block)))
    }

    /// Parametric point of an integer grid point, in the block frame.
    pub fn inverse(&self, g: &Vec3) -> Result<Vec3> {
        let (best, lam) = self
            .meta
            .iter()
            .map(|m| (m, barycentric(&m.grid, g)))
            .max_by(|a, b| min4(&a.1).total_cmp(&min4(&b.1)))
            .ok_or_else(|| Error::Integrity(format!("block {} has no meta-tets", self.block)))?;
        if min4(&lam) < -1e-9 {
            return Err(Error::Integrity(format!("grid point {g:?} lies outside block {}", self.block)));
        }
        Ok((0..4).map(|i| best.param[i] * lam[i]).sum())
    }
}

/// Tets of one block in the block frame with a bin grid for point location.
struct Locator {
    tets: Vec<([Vec3; 4], [Vec3; 4])>,
    lo: Vec3,
    cell: Vec3,
    n: usize,
    bins: Vec<Vec<u32>>,
}

impl Locator {
    fn new(mesh: &CellMesh, map: &BlockMap) -> Locator {
        let topo = &mesh.topo;
        let tets: Vec<([Vec3; 4], [Vec3; 4])> = map
            .unfold
            .iter()
            .map(|(&c, t)| {
                let vs = &topo.cells[c as usize];
                let p = std::array::from_fn(|i| t.apply(&mesh.params[c as usize][i]));
                let x = std::array::from_fn(|i| mesh.positions[vs[i] as usize]);
                (p, x)
            })
            .collect();
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for (p, _) in &tets {
            for q in p {
                lo = lo.inf(q);
                hi = hi.sup(q);
            }
        }
        let n = ((tets.len() as f64).cbrt().ceil() as usize).max(1);
        let cell = (hi - lo).map(|x| x.max(1e-300)) / n as f64;
        let mut loc = Locator { tets, lo, cell, n, bins: vec![Vec::new(); n * n * n] };
        for (i, (p, _)) in loc.tets.iter().enumerate() {
            let a = p.iter().fold(Vec3::repeat(f64::INFINITY), |m, q| m.inf(q));
            let b = p.iter().fold(Vec3::repeat(f64::NEG_INFINITY), |m, q| m.sup(q));
            let (ia, ib) = (loc.bin(&a), loc.bin(&b));
            for x in ia[0]..=ib[0] {
                for y in ia[1]..=ib[1] {
                    for z in ia[2]..=ib[2] {
                        loc.bins[(x * n + y) * n + z].push(i as u32);
                    }
                }
            }
        }
        loc
    }

    fn bin(&self, p: &Vec3) -> [usize; 3] {
        std::array::from_fn(|k| (((p[k] - self.lo[k]) / self.cell[k]).floor().max(0.0) as usize).min(self.n - 1))
    }

    fn position(&self, p: &Vec3) -> Option<Vec3> {
        let [x, y, z] = self.bin(p);
        let (t, lam) = self.bins[(x * self.n + y) * self.n + z]
            .iter()
            .map(|&i| (i, barycentric(&self.tets[i as usize].0, p)))
            .max_by(|a, b| min4(&a.1).total_cmp(&min4(&b.1)))?;
        if min4(&lam) < -1e-6 {
            return None;
        }
        let xs = &self.tets[t as usize].1;
        Some((0..4).map(|i| xs[i] * lam[i]).sum())
    }
}

/// Hex mesh with an `l × m × n` grid per block, glued across walls, arcs
/// and nodes by their integer coordinates; vertex positions come from
/// inverting the block maps and the parametrization.
pub fn extract_hexmesh(mesh: &CellMesh, maps: &[BlockMap]) -> Result<HexMesh> {
    if mesh.topo.kind != crate::topology::CellKind::Tet {
        return Err(Error::Precondition("hex extraction needs a tet parametrization".into()));
    }
    let mut ids: HashMap<GridKey, u32> = HashMap::new();
    let mut positions: Vec<Vec3> = Vec::new();
    let mut hexes: Vec<[u32; 8]> = Vec::new();
    for map in maps {
        let loc = Locator::new(mesh, map);
        let [l, m, n] = map.dims;
        let mut local: HashMap<[i64; 3], u32> = HashMap::new();
        for i in 0..=l {
            for j in 0..=m {
                for k in 0..=n {
                    let g = [i, j, k];
                    let key = map.classify(g)?;
                    let id = match ids.get(&key) {
                        Some(&id) => id,
                        None => {
                            let p = map.inverse(&to_vec(g))?;
                            let x = loc.position(&p).ok_or_else(|| {
                                Error::Integrity(format!("grid point {g:?} of block {} is outside its tets", map.block))
                            })?;
                            positions.push(x);
                            let id = positions.len() as u32 - 1;
                            ids.insert(key, id);
                            id
                        }
                    };
                    local.insert(g, id);
                }
            }
        }
        for i in 0..l {
            for j in 0..m {
                for k in 0..n {
                    hexes.push(std::array::from_fn(|c| {
                        let o = HEX_CORNERS[c];
                        local[&[i + o[0], j + o[1], k + o[2]]]
                    }));
                }
            }
        }
    }
    build_hex_connectivity(hexes, positions)
}
