use super::block::analyse_blocks;
use super::{Arc, MotorcycleComplex, Node, Wall};
use crate::cells::CellMesh;
use crate::dsu::Dsu;
use crate::error::{Error, Result};
use crate::octa::{Transition, Vec3};
use crate::topology::NONE;
use std::collections::{HashMap, HashSet, VecDeque};

/// A maximal run of cells around an edge between two consecutive tagged
/// facets, in fan order from `from` to `to`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sector {
    pub from: u32,
    pub to: u32,
    pub cells: Vec<u32>,
    pub quarters: i32,
}

/// Sectors of the fan of `e` cut by tagged facets. Empty when no facet
/// around a closed fan is tagged.
pub fn fan_sectors(mesh: &CellMesh, tagged: &[bool], e: u32) -> Vec<Sector> {
    let fan = &mesh.topo.fans[e as usize];
    let n = fan.facets.len();
    let cuts: Vec<usize> = (0..n).filter(|&i| tagged[fan.facets[i] as usize]).collect();
    let mut out = Vec::with_capacity(cuts.len());
    let make = |a: usize, b: usize, cells: Vec<u32>| {
        let q: f64 = cells.iter().map(|&c| mesh.dihedral(c, e)).sum();
        Sector { from: fan.facets[a], to: fan.facets[b % n], cells, quarters: q.round() as i32 }
    };
    if fan.closed {
        for (k, &a) in cuts.iter().enumerate() {
            let b = if k + 1 < cuts.len() { cuts[k + 1] } else { cuts[0] + n };
            let cells = (a..b).map(|i| fan.cells[i % n]).collect();
            out.push(make(a, b, cells));
        }
    } else {
        for w in cuts.windows(2) {
            out.push(make(w[0], w[1], fan.cells[w[0]..w[1]].to_vec()));
        }
    }
    out
}

fn tagged_around(mesh: &CellMesh, tagged: &[bool], e: u32) -> usize {
    mesh.topo.fans[e as usize].facets.iter().filter(|&&f| tagged[f as usize]).count()
}

/// Two edges at `v` point in opposite directions, compared in a chart
/// unfolded over the cells around `v`.
fn straight_at(mesh: &CellMesh, v: u32, e1: u32, e2: u32) -> bool {
    let topo = &mesh.topo;
    let star = &topo.vertex_cells[v as usize];
    let mut chart: HashMap<u32, Transition> = HashMap::new();
    let mut queue = VecDeque::new();
    chart.insert(star[0], Transition::identity());
    queue.push_back(star[0]);
    while let Some(c) = queue.pop_front() {
        let tc = chart[&c];
        for &f in &topo.cell_facets[c as usize] {
            let fr = &topo.facets[f as usize];
            if fr.is_boundary() || !fr.vertices.contains(&v) {
                continue;
            }
            let n = fr.other_cell(c);
            if chart.contains_key(&n) {
                continue;
            }
            chart.insert(n, tc.compose(&mesh.transition_from(f, n)));
            queue.push_back(n);
        }
    }
    let dir = |e: u32| -> Vec3 {
        let [a, b] = topo.edges[e as usize];
        let w = if a == v { b } else { a };
        let c = topo.fans[e as usize].cells[0];
        let t = chart[&c];
        t.apply_vector(&(mesh.param(c, w) - mesh.param(c, v))).normalize()
    };
    (dir(e1) + dir(e2)).norm() < 1e-6
}

/// Build the cell complex of `tagged` facets over `mesh`. `d` holds the
/// per-facet propagation distance.
pub fn extract_complex(mesh: &CellMesh, tagged: &[bool], d: &[f64]) -> Result<MotorcycleComplex> {
    let topo = &mesh.topo;
    let (nf, ne, nv) = (topo.facets.len(), topo.edges.len(), topo.n_vertices);
    for (f, fr) in topo.facets.iter().enumerate() {
        if fr.is_boundary() && !tagged[f] {
            return Err(Error::Precondition(format!("boundary facet {f} is not tagged")));
        }
    }

    let mut cdsu = Dsu::new(mesh.n_cells());
    for (f, fr) in topo.facets.iter().enumerate() {
        if !tagged[f] && !fr.is_boundary() {
            cdsu.union(fr.cells[0], fr.cells[1]);
        }
    }
    let (cell_block, n_blocks) = cdsu.labels(|_| true);

    // arc edges, and the wall joins across straight non-arc edges
    let mut arc_edge = vec![false; ne];
    let mut wdsu = Dsu::new(nf);
    for e in 0..ne as u32 {
        let nt = tagged_around(mesh, tagged, e);
        let closed = topo.fans[e as usize].closed;
        if nt == 1 && closed {
            let [a, b] = topo.edges[e as usize];
            return Err(Error::Integrity(format!("open wall edge ({a}, {b})")));
        }
        if mesh.singular[e as usize] || nt >= 3 {
            arc_edge[e as usize] = true;
        } else if nt == 2 {
            let sectors = fan_sectors(mesh, tagged, e);
            if sectors.iter().all(|s| s.quarters == 2) {
                wdsu.union(sectors[0].from, sectors[0].to);
            } else {
                arc_edge[e as usize] = true;
            }
        }
    }
    let (facet_wall, n_walls) = wdsu.labels(|f| tagged[f as usize]);

    let wall_set = |e: u32| -> Vec<u32> {
        let mut s: Vec<u32> = topo.fans[e as usize]
            .facets
            .iter()
            .filter(|&&f| tagged[f as usize])
            .map(|&f| facet_wall[f as usize])
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    };

    // nodes
    let mut vertex_node = vec![NONE; nv];
    let mut nodes = Vec::new();
    let mut vertex_arc_edges: Vec<Vec<u32>> = vec![Vec::new(); nv];
    for v in 0..nv as u32 {
        let es: Vec<u32> = topo.vertex_edges[v as usize].iter().copied().filter(|&e| arc_edge[e as usize]).collect();
        let is_node = match es.len() {
            0 => false,
            2 => {
                let (a, b) = (es[0], es[1]);
                mesh.singular[a as usize] != mesh.singular[b as usize]
                    || wall_set(a) != wall_set(b)
                    || !straight_at(mesh, v, a, b)
            }
            _ => true,
        };
        if is_node {
            vertex_node[v as usize] = nodes.len() as u32;
            let singular = es.iter().any(|&e| mesh.singular[e as usize]);
            nodes.push(Node { vertex: v, singular });
        }
        vertex_arc_edges[v as usize] = es;
    }

    // arcs
    let mut edge_arc = vec![NONE; ne];
    let mut arcs = Vec::new();
    let mut make_arc = |edges: Vec<u32>, vertices: Vec<u32>, edge_arc: &mut Vec<u32>| {
        let id = arcs.len() as u32;
        for &e in &edges {
            edge_arc[e as usize] = id;
        }
        let first = edges[0];
        let length = edges.iter().map(|&e| mesh.edge_length(e)).sum();
        let nt = tagged_around(mesh, tagged, first);
        let t_arc = topo.fans[first as usize].closed && !mesh.singular[first as usize] && nt == 3;
        let end = |v: u32| vertex_node[v as usize];
        arcs.push(Arc {
            nodes: [end(vertices[0]), end(*vertices.last().unwrap())],
            edges,
            vertices,
            length,
            singular: mesh.singular[first as usize],
            t_arc,
            walls: wall_set(first),
        });
    };
    let other = |e: u32, v: u32| {
        let [a, b] = topo.edges[e as usize];
        if a == v {
            b
        } else {
            a
        }
    };
    for node in 0..nodes.len() {
        let start = nodes[node].vertex;
        for &e0 in &vertex_arc_edges[start as usize] {
            if edge_arc[e0 as usize] != NONE {
                continue;
            }
            let (mut edges, mut verts) = (vec![e0], vec![start]);
            edge_arc[e0 as usize] = 0;
            let (mut e, mut v) = (e0, other(e0, start));
            verts.push(v);
            while vertex_node[v as usize] == NONE {
                let next = vertex_arc_edges[v as usize].iter().copied().find(|&x| x != e).unwrap();
                if next == e0 {
                    break;
                }
                edge_arc[next as usize] = 0;
                e = next;
                v = other(e, v);
                edges.push(e);
                verts.push(v);
            }
            make_arc(edges, verts, &mut edge_arc);
        }
    }
    for e0 in 0..ne as u32 {
        if !arc_edge[e0 as usize] || edge_arc[e0 as usize] != NONE {
            continue;
        }
        // node-free loop: start at its lowest vertex, towards the lower neighbour
        let mut loop_verts = vec![topo.edges[e0 as usize][0]];
        let (mut e, mut v) = (e0, topo.edges[e0 as usize][1]);
        while v != loop_verts[0] {
            loop_verts.push(v);
            e = vertex_arc_edges[v as usize].iter().copied().find(|&x| x != e).unwrap();
            v = other(e, v);
        }
        let k = (0..loop_verts.len()).min_by_key(|&i| loop_verts[i]).unwrap();
        loop_verts.rotate_left(k);
        let n = loop_verts.len();
        if n > 2 && loop_verts[n - 1] < loop_verts[1] {
            loop_verts[1..].reverse();
        }
        loop_verts.push(loop_verts[0]);
        let edges: Vec<u32> = loop_verts.windows(2).map(|w| topo.edge_id(w[0], w[1]).unwrap()).collect();
        make_arc(edges, loop_verts, &mut edge_arc);
    }

    // walls
    let mut walls: Vec<Wall> = (0..n_walls)
        .map(|_| Wall {
            facets: Vec::new(),
            blocks: [NONE; 2],
            boundary: false,
            arcs: Vec::new(),
            sides: None,
            corner: None,
            annulus: false,
            d_min: f64::INFINITY,
            d_max: f64::NEG_INFINITY,
        })
        .collect();
    for f in 0..nf {
        if !tagged[f] {
            continue;
        }
        let w = &mut walls[facet_wall[f] as usize];
        w.facets.push(f as u32);
        w.d_min = w.d_min.min(d[f]);
        w.d_max = w.d_max.max(d[f]);
    }
    for (wi, w) in walls.iter_mut().enumerate() {
        let fr = &topo.facets[w.facets[0] as usize];
        w.boundary = fr.is_boundary();
        w.blocks = [cell_block[fr.cells[0] as usize], if w.boundary { NONE } else { cell_block[fr.cells[1] as usize] }];
        wall_boundary(mesh, wi as u32, w, &facet_wall, &arc_edge, &edge_arc, &arcs);
    }

    let blocks = analyse_blocks(mesh, tagged, &cell_block, n_blocks, &walls);

    Ok(MotorcycleComplex {
        nodes,
        arcs,
        walls,
        blocks,
        cell_block,
        facet_wall,
        edge_arc,
        vertex_node,
        tagged: tagged.to_vec(),
        d: d.to_vec(),
    })
}

/// Boundary loops of wall `w` traced over half-edges, so arcs the wall
/// touches from both sides are walked twice; its arcs and, for a disk with
/// four right-angled corners, the rectangle sides.
fn wall_boundary(
    mesh: &CellMesh,
    wi: u32,
    w: &mut Wall,
    facet_wall: &[u32],
    arc_edge: &[bool],
    edge_arc: &[u32],
    arcs: &[Arc],
) {
    let topo = &mesh.topo;
    let mut half: Vec<(u32, u32)> = w
        .facets
        .iter()
        .flat_map(|&f| topo.facet_edges[f as usize].iter().map(move |&e| (f, e)))
        .filter(|&(_, e)| arc_edge[e as usize])
        .collect();
    half.sort_unstable();
    let mut warcs: Vec<u32> = half.iter().map(|&(_, e)| edge_arc[e as usize]).collect();
    warcs.sort_unstable();
    warcs.dedup();
    w.arcs = warcs;

    let other_end = |e: u32, v: u32| {
        let [a, b] = topo.edges[e as usize];
        if a == v {
            b
        } else {
            a
        }
    };
    let other_edge = |f: u32, e: u32, v: u32| -> u32 {
        topo.facet_edges[f as usize].iter().copied().find(|&x| x != e && topo.edges[x as usize].contains(&v)).unwrap()
    };
    // from half-edge (f, e) arriving at v, sweep the wall's corner wedge at v
    // to the next boundary half-edge; returns it with the wedge angle
    let sweep = |f: u32, e: u32, v: u32| -> Option<(u32, u32, f64)> {
        let (mut g, mut x) = (f, e);
        let mut angle = 0.0;
        for _ in 0..=w.facets.len() {
            angle += mesh.facet_corner(g, v);
            let y = other_edge(g, x, v);
            if arc_edge[y as usize] {
                return Some((g, y, angle));
            }
            g = topo.fans[y as usize].facets.iter().copied().find(|&h| h != g && facet_wall[h as usize] == wi)?;
            x = y;
        }
        None
    };

    // (arc edge, vertex it leads to, wedge angle there, facet of the wedge)
    let mut used: HashSet<(u32, u32)> = HashSet::new();
    let mut loops: Vec<Vec<(u32, u32, f64, u32)>> = Vec::new();
    for &(f0, e0) in &half {
        if used.contains(&(f0, e0)) {
            continue;
        }
        let mut lp = Vec::new();
        let (mut f, mut e, mut v) = (f0, e0, topo.edges[e0 as usize][1]);
        loop {
            if !used.insert((f, e)) {
                return;
            }
            let Some((g, y, angle)) = sweep(f, e, v) else { return };
            lp.push((e, v, angle, g));
            if (g, y) == (f0, e0) {
                break;
            }
            (f, e, v) = (g, y, other_end(y, v));
        }
        loops.push(lp);
    }
    match loops.len() {
        1 => {}
        2 => {
            w.annulus = true;
            return;
        }
        _ => return,
    }
    let is_node = |a: u32, v: u32| {
        let arc = &arcs[a as usize];
        arc.nodes[0] != NONE && (v == arc.vertices[0] || v == *arc.vertices.last().unwrap())
    };
    // arc runs with the vertex, wedge angle and facet where each ends
    let mut seq: Vec<(u32, u32, f64, u32)> = Vec::new();
    for &(e, v, angle, g) in &loops[0] {
        let a = edge_arc[e as usize];
        match seq.last_mut() {
            Some(last) if last.0 == a && !is_node(a, last.1) => *last = (a, v, angle, g),
            _ => seq.push((a, v, angle, g)),
        }
    }
    if seq.len() > 1 && seq[0].0 == seq.last().unwrap().0 && !is_node(seq[0].0, seq.last().unwrap().1) {
        let last = seq.pop().unwrap();
        seq[0].0 = last.0;
    }
    if seq.len() < 4 || seq.iter().any(|&(a, ..)| arcs[a as usize].nodes[0] == NONE) {
        return;
    }
    let corners: Vec<usize> = (0..seq.len()).filter(|&i| seq[i].2.round() as i32 == 1).collect();
    if corners.len() != 4 {
        return;
    }
    let start = *corners.iter().min_by_key(|&&i| (seq[i].1, i)).unwrap();
    let n = seq.len();
    let mut sides: [Vec<u32>; 4] = Default::default();
    let mut side = 0;
    for k in 1..=n {
        let i = (start + k) % n;
        sides[side].push(seq[i].0);
        if corners.contains(&i) {
            side += 1;
        }
    }
    w.arcs = seq.iter().map(|&(a, ..)| a).collect();
    w.sides = Some(sides);
    w.corner = Some((seq[start].3, seq[start].1));
}
