//! Acceptance gate: one line per criterion, all must pass.

use mc3d::complex::oracle::grid_blocks;
use mc3d::complex::{extract_complex, reduce, removable, split_tori, BlockType, MotorcycleComplex, ReduceMode};
use mc3d::fixtures;
use mc3d::io::{write_medit, write_param, write_walls_obj, ObjOptions};
use mc3d::pipeline::{hex_base_complex, hex_decompose, hex_sparse, param_base_complex, param_decompose};
use mc3d::quantize::{build_ip, exhaustive_optimum, quantize, random_problem, solve_quantization};
use mc3d::sanitize::{sanitize, verify_seamless};
use mc3d::stats::{run_stats, to_csv, StatsOptions};
use mc3d::tet::{hex_to_param, ParamTetMesh};
use mc3d::topology::NONE;
use mc3d::trace::{trace_hex, TraceOptions};
use mc3d::{CellMesh, HexMesh, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

const GRID_BUDGET: Duration = Duration::from_secs(10);
const SANITIZE_BUDGET: Duration = Duration::from_secs(5);
const SANITIZE_NOISE: f64 = 1e-8;
const RANDOM_MESHES: usize = 100;
const RANDOM_MAX_HEXES: usize = 500;
const RANDOM_PROBLEMS: usize = 50;
const RANDOM_MAX_ARCS: usize = 12;
const OBJECTIVE_TOL: f64 = 1e-9;
const SWEEP: std::ops::RangeInclusive<usize> = 1..=8;
const RATIO_RANGE: std::ops::RangeInclusive<f64> = 6.0..=10.0;
const RUNS: usize = 3;
const SEED: u64 = 7;
/// Distance below which a point counts as lying on a hex facet.
const ON_FACET_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> HexMesh {
    fixtures::named(name).expect("named fixture")
}

fn complexes(name: &str) -> Result<(HexMesh, CellMesh, [MotorcycleComplex; 3]), String> {
    let m = fixture(name);
    let (cm, dec) = hex_decompose(&m, &TraceOptions::default()).map_err(|e| format!("{name}: {e}"))?;
    Ok((m, cm, [dec.raw, dec.plus, dec.full]))
}

fn grid_check(mesh: &HexMesh, mcs: &[&MotorcycleComplex], what: &str) -> Result<(), String> {
    for (mc, label) in mcs.iter().zip(["raw", "MC+", "MC"]) {
        let dims = grid_blocks(mesh, &mc.tagged).map_err(|e| format!("{what} {label}: {e}"))?;
        ensure(dims.len() == mc.n_blocks(), || format!("{what} {label}: {} grids for {} blocks", dims.len(), mc.n_blocks()))?;
    }
    Ok(())
}

fn wall_subset(mc: &MotorcycleComplex, bc: &MotorcycleComplex) -> bool {
    let bc_walls = bc.wall_facets();
    mc.wall_facets().iter().all(|f| bc_walls.binary_search(f).is_ok())
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut blocks = Vec::new();
    for name in fixtures::NAMED {
        let (m, _, [raw, plus, full]) = complexes(name)?;
        grid_check(&m, &[&raw, &plus, &full], name)?;
        blocks.push(format!("{name} {}/{}/{}", raw.n_blocks(), plus.n_blocks(), full.n_blocks()));
    }
    let el = t.elapsed();
    ensure(el < GRID_BUDGET, || format!("took {el:?}"))?;
    Ok(format!("{} in {el:.2?}", blocks.join(", ")))
}

fn criterion_2() -> Outcome {
    for name in fixtures::NAMED {
        let (m, _, [raw, plus, full]) = complexes(name)?;
        let bc = hex_base_complex(&m).map_err(|e| e.to_string())?;
        for (mc, label) in [(&raw, "raw"), (&plus, "MC+"), (&full, "MC")] {
            ensure(wall_subset(mc, &bc), || format!("{name}: {label} has walls outside the base complex"))?;
        }
    }
    Ok(format!("{} fixtures", fixtures::NAMED.len()))
}

fn ordered(m: &HexMesh, what: &str) -> Result<(), String> {
    let (_, dec) = hex_decompose(m, &TraceOptions::default()).map_err(|e| format!("{what}: {e}"))?;
    let bc = hex_base_complex(m).map_err(|e| format!("{what}: {e}"))?.n_blocks();
    let (r, p, f) = (dec.raw.n_blocks(), dec.plus.n_blocks(), dec.full.n_blocks());
    ensure(f <= p && p <= r && f <= bc, || format!("{what}: MC {f}, MC+ {p}, raw {r}, BC {bc}"))
}

fn criterion_3() -> Outcome {
    for name in fixtures::NAMED {
        ordered(&fixture(name), name)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut largest = 0;
    for i in 0..RANDOM_MESHES {
        let m = fixtures::random_glued(&mut rng);
        ensure(m.n_hexes() <= RANDOM_MAX_HEXES, || format!("random {i}: {} hexes", m.n_hexes()))?;
        largest = largest.max(m.n_hexes());
        ordered(&m, &format!("random {i}"))?;
    }
    Ok(format!("{} fixtures, {RANDOM_MESHES} random meshes (largest {largest} hexes)", fixtures::NAMED.len()))
}

fn on_triangle(p: &Vec3, [a, b, c]: [Vec3; 3]) -> bool {
    let n = (b - a).cross(&(c - a));
    let area2 = n.norm_squared();
    if area2 == 0.0 || (p - a).dot(&n).abs() > ON_FACET_TOL * area2.sqrt() {
        return false;
    }
    [(a, b), (b, c), (c, a)].iter().all(|&(x, y)| (y - x).cross(&(p - x)).dot(&n) >= -ON_FACET_TOL * area2)
}

/// Whether `p` lies on the fan of triangles joining the centre of a hex
/// facet to its sides, the surface the tets of a converted mesh span.
fn on_quad(p: &Vec3, quad: &[Vec3]) -> bool {
    let c: Vec3 = quad.iter().sum::<Vec3>() / quad.len() as f64;
    let n = (0..quad.len()).map(|i| (quad[i] - c).cross(&(quad[(i + 1) % quad.len()] - c))).sum::<Vec3>();
    let u = (quad[0] - c).normalize();
    let v = n.normalize().cross(&u);
    let mut ring = quad.to_vec();
    ring.sort_by(|a, b| {
        let ang = |q: &Vec3| (q - c).dot(&v).atan2((q - c).dot(&u));
        ang(a).total_cmp(&ang(b))
    });
    (0..ring.len()).any(|i| on_triangle(p, [c, ring[i], ring[(i + 1) % ring.len()]]))
}

/// Every wall facet of a complex on `mesh` lies on a wall facet of `bc`.
fn walls_on(mesh: &CellMesh, mc: &MotorcycleComplex, hex: &CellMesh, bc: &MotorcycleComplex) -> Result<(), String> {
    let quads: Vec<Vec<Vec3>> = bc
        .wall_facets()
        .iter()
        .map(|&f| hex.topo.facets[f as usize].vertices.iter().map(|&v| hex.positions[v as usize]).collect())
        .collect();
    for f in mc.wall_facets() {
        let vs = &mesh.topo.facets[f as usize].vertices;
        let c: Vec3 = vs.iter().map(|&v| mesh.positions[v as usize]).sum::<Vec3>() / vs.len() as f64;
        ensure(quads.iter().any(|q| on_quad(&c, q)), || format!("facet {f} at {c:?} is off the base complex walls"))?;
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for name in fixtures::NAMED {
        let m = fixture(name);
        let pm = hex_to_param(&m);
        let hex_bc = hex_base_complex(&m).map_err(|e| e.to_string())?;
        let (_, param_bc) = param_base_complex(&pm).map_err(|e| format!("{name}: {e}"))?;
        ensure(hex_bc.n_blocks() == param_bc.n_blocks(), || {
            format!("{name}: base complex {} (hex) vs {} (param)", hex_bc.n_blocks(), param_bc.n_blocks())
        })?;
        let (hcm, hdec) = hex_decompose(&m, &TraceOptions::default()).map_err(|e| e.to_string())?;
        let (tr, pdec) = param_decompose(&pm, &TraceOptions::default()).map_err(|e| format!("{name}: {e}"))?;
        ensure(hdec.raw.n_blocks() == pdec.raw.n_blocks(), || {
            format!("{name}: raw {} (hex) vs {} (param)", hdec.raw.n_blocks(), pdec.raw.n_blocks())
        })?;
        grid_check(&m, &[&hdec.raw, &hdec.plus, &hdec.full], name)?;
        for (mc, label) in [(&pdec.raw, "raw"), (&pdec.plus, "MC+"), (&pdec.full, "MC")] {
            ensure(mc.all_cuboid(), || format!("{name}: param {label} has a non-cuboid block"))?;
            walls_on(tr.mesh.cells(), mc, &hcm, &hex_bc).map_err(|e| format!("{name}: param {label}: {e}"))?;
            let q = quantize(tr.mesh.cells(), mc, 1.0).map_err(|e| format!("{name}: param {label}: {e}"))?;
            let (_, qd) = hex_decompose(&q.hexes, &TraceOptions::default()).map_err(|e| e.to_string())?;
            grid_check(&q.hexes, &[&qd.raw, &qd.plus, &qd.full], &format!("{name} param {label} hexes"))?;
        }
        notes.push(format!("{name} {}", hex_bc.n_blocks()));
    }
    Ok(format!("BC {}", notes.join(", ")))
}

fn noisy(pm: &ParamTetMesh, eps: f64, rng: &mut impl Rng) -> ParamTetMesh {
    let params: Vec<[Vec3; 4]> = (0..pm.n_tets() as u32)
        .map(|t| pm.tet_params(t).map(|p| p + Vec3::from_fn(|_, _| rng.gen_range(-eps..=eps))))
        .collect();
    let tets = pm.tets().iter().map(|t| [t[0], t[1], t[2], t[3]]).collect();
    ParamTetMesh::new(pm.positions().to_vec(), tets, params).expect("noise keeps tets valid")
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut slowest = Duration::ZERO;
    for name in fixtures::NAMED {
        let pm = hex_to_param(&fixture(name));
        let bad = noisy(&pm, SANITIZE_NOISE, &mut rng);
        let t = Instant::now();
        let (out, _) = sanitize(&bad).map_err(|e| format!("{name}: {e}"))?;
        let el = t.elapsed();
        slowest = slowest.max(el);
        let v = verify_seamless(&out);
        ensure(v.is_empty(), || format!("{name}: {} violations, first {:?}", v.len(), v[0]))?;
        ensure(out.singular_vertex_pairs() == pm.singular_vertex_pairs(), || format!("{name}: singular edges changed"))?;
        ensure(el < SANITIZE_BUDGET, || format!("{name}: took {el:?}"))?;
    }
    Ok(format!("noise {SANITIZE_NOISE:e}, slowest {slowest:.2?}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut meshes: Vec<(String, HexMesh)> = fixtures::NAMED.iter().map(|n| (n.to_string(), fixture(n))).collect();
    meshes.extend((0..10).map(|i| (format!("random {i}"), fixtures::random_glued(&mut rng))));
    for (name, m) in &meshes {
        let (cm, dec) = hex_decompose(m, &TraceOptions::default()).map_err(|e| e.to_string())?;
        for (mc, mode) in [(&dec.full, ReduceMode::Full), (&dec.plus, ReduceMode::Regular)] {
            let left = (0..mc.walls.len() as u32).filter(|&w| removable(&cm, mc, w, mode)).count();
            ensure(left == 0, || format!("{name}: {left} walls still removable under {mode:?}"))?;
        }
    }
    Ok(format!("{} meshes", meshes.len()))
}

fn criterion_7() -> Outcome {
    let mut notes = Vec::new();
    for name in ["ring", "ring-twisted"] {
        let m = fixture(name);
        let cm = m.to_cell_mesh();
        let field = trace_hex(&m, &TraceOptions::default());
        let mc = extract_complex(&cm, &field.tagged, &field.d).map_err(|e| e.to_string())?;
        ensure(mc.n_toroidal() == 1 && mc.n_blocks() == 1, || {
            format!("{name}: {} toroidal of {} blocks before splitting", mc.n_toroidal(), mc.n_blocks())
        })?;
        let (split, cuts) = split_tori(&cm, mc).map_err(|e| e.to_string())?;
        for (b, blk) in split.blocks.iter().enumerate() {
            ensure(blk.kind == Some(BlockType::Cuboid) && blk.corners.len() == 8, || {
                format!("{name}: block {b} is {:?} with {} corners", blk.kind, blk.corners.len())
            })?;
        }
        notes.push(format!("{name} {cuts} cut(s) into {} blocks", split.n_blocks()));
    }
    Ok(notes.join(", "))
}

fn matches_exhaustive(qp: &mc3d::quantize::QuantizationProblem, what: &str) -> Result<(), String> {
    let l = solve_quantization(qp).map_err(|e| format!("{what}: {e}"))?;
    ensure(qp.residuals(&l).iter().all(|&r| r == 0) && qp.is_feasible(&l), || format!("{what}: infeasible"))?;
    let obj = qp.objective(&l);
    let (_, best) = exhaustive_optimum(qp, obj).ok_or_else(|| format!("{what}: exhaustive search found nothing"))?;
    ensure((obj - best).abs() <= OBJECTIVE_TOL, || format!("{what}: solver {obj} vs exhaustive {best}"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..RANDOM_PROBLEMS {
        let n = rng.gen_range(2..=RANDOM_MAX_ARCS);
        let walls = rng.gen_range(1..=4);
        let qp = random_problem(&mut rng, n, walls);
        matches_exhaustive(&qp, &format!("random {i}"))?;
    }
    let mut largest = (String::new(), 0, Vec::new());
    for name in fixtures::NAMED {
        let m = fixture(name);
        let (tr, dec) = param_decompose(&hex_to_param(&m), &TraceOptions::default()).map_err(|e| e.to_string())?;
        let cm = tr.mesh.cells();
        for s in [1.0, 1.3, 0.6] {
            let qp = build_ip(&dec.full, s).map_err(|e| format!("{name}: {e}"))?;
            matches_exhaustive(&qp, &format!("{name} s={s}"))?;
        }
        let mut counts = Vec::new();
        for s in SWEEP {
            let q = quantize(cm, &dec.full, s as f64).map_err(|e| format!("{name} s={s}: {e}"))?;
            ensure(q.problem.residuals(&q.lengths).iter().all(|&r| r == 0), || format!("{name} s={s}: residuals"))?;
            if s <= 2 {
                let (_, qd) = hex_decompose(&q.hexes, &TraceOptions::default()).map_err(|e| e.to_string())?;
                grid_check(&q.hexes, &[&qd.raw, &qd.plus, &qd.full], &format!("{name} s={s} hexes"))?;
            }
            counts.push(q.hexes.n_hexes());
        }
        ensure(counts.windows(2).all(|w| w[0] <= w[1]), || format!("{name}: sweep {counts:?}"))?;
        if m.n_hexes() > largest.1 {
            largest = (name.to_string(), m.n_hexes(), counts);
        }
    }
    let (name, _, counts) = largest;
    let first = *SWEEP.start();
    let ratios: Vec<f64> = SWEEP
        .filter(|s| SWEEP.contains(&(2 * s)))
        .map(|s| counts[2 * s - first] as f64 / counts[s - first] as f64)
        .collect();
    ensure(ratios.iter().all(|r| RATIO_RANGE.contains(r)), || format!("{name}: ratios {ratios:?} from {counts:?}"))?;
    Ok(format!("{RANDOM_PROBLEMS} random problems, {name} ratios {ratios:.2?}"))
}

/// Bytes of everything the subcommands write, for one run.
fn run_outputs(corpus: &std::path::Path) -> Result<Vec<Vec<u8>>, String> {
    let opts = TraceOptions { seed: Some(SEED), ..Default::default() };
    let e = |e: mc3d::Error| e.to_string();
    let blocks = |mc: &MotorcycleComplex| mc.cell_block.iter().flat_map(|b| b.to_le_bytes()).collect::<Vec<u8>>();
    let mut out = Vec::new();
    let pie = fixture("pie3");
    let pm = hex_to_param(&pie);
    let (cm, dec) = hex_decompose(&pie, &opts).map_err(e)?;
    out.extend([blocks(&dec.raw), blocks(&dec.plus), blocks(&dec.full)]);
    let (tr, pdec) = param_decompose(&pm, &opts).map_err(e)?;
    out.push(blocks(&pdec.full));
    let (clean, _) = sanitize(&noisy(&pm, SANITIZE_NOISE, &mut ChaCha8Rng::seed_from_u64(SEED))).map_err(e)?;
    out.push(write_param(&clean).into_bytes());
    let q = quantize(tr.mesh.cells(), &pdec.full, 2.0).map_err(e)?;
    out.push(write_medit(&q.hexes).into_bytes());
    let bc = hex_base_complex(&pie).map_err(e)?;
    out.push(blocks(&reduce(&cm, bc, ReduceMode::Full).map_err(e)?.0));
    let rows = run_stats(corpus, &StatsOptions { trace: opts, ..Default::default() }).map_err(e)?;
    out.push(to_csv(&rows).map_err(e)?.into_bytes());
    out.push(write_walls_obj(&cm, &dec.full, &ObjOptions { explode: Some(0.5) }).into_bytes());
    Ok(out)
}

fn criterion_9() -> Outcome {
    let corpus = tempfile::tempdir().map_err(|e| e.to_string())?;
    for name in ["box", "pie3", "ring"] {
        let p = corpus.path().join(format!("{name}.mesh"));
        mc3d::io::write_hex_mesh(&fixture(name), &p, mc3d::io::MeshFormat::Medit).map_err(|e| e.to_string())?;
    }
    let first = run_outputs(corpus.path())?;
    for run in 1..RUNS {
        let again = run_outputs(corpus.path())?;
        if let Some(i) = (0..first.len()).find(|&i| first[i] != again[i]) {
            return Err(format!("output {i} differs on run {}", run + 1));
        }
    }
    Ok(format!("{} outputs identical over {RUNS} runs", first.len()))
}

fn criterion_10() -> Outcome {
    let mut notes = Vec::new();
    for name in fixtures::NAMED {
        let m = fixture(name);
        let (_, [raw, _, full]) = complexes(name).map(|(_, c, x)| (c, x))?;
        let sparse = hex_sparse(&m, &TraceOptions::default()).map_err(|e| e.to_string())?.n_blocks();
        ensure(sparse <= raw.n_blocks(), || format!("{name}: sparse {sparse} > raw {}", raw.n_blocks()))?;
        if name == "pie5" {
            ensure(full.n_blocks() <= sparse, || format!("pie5: MC {} > sparse {sparse}", full.n_blocks()))?;
        }
        notes.push(format!("{name} {sparse}/{}", raw.n_blocks()));
    }
    Ok(format!("sparse/raw {}", notes.join(", ")))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("grid-block oracle", criterion_1),
        ("subcomplex of the base complex", criterion_2),
        ("block count ordering", criterion_3),
        ("hex and parametrization pipelines agree", criterion_4),
        ("sanitizer soundness", criterion_5),
        ("irreducibility", criterion_6),
        ("torus handling", criterion_7),
        ("quantization", criterion_8),
        ("determinism", criterion_9),
        ("sparse tracing", criterion_10),
    ];
    let mut failed = Vec::new();
    let mut stdout = std::io::stdout().lock();
    for (i, (title, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        writeln!(stdout, "criterion {:>2} {tag} {title}: {detail}", i + 1).unwrap();
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn wall_ids_are_consistent() {
    for name in fixtures::NAMED {
        let (_, _, [_, _, full]) = complexes(name).unwrap();
        for (f, &w) in full.facet_wall.iter().enumerate() {
            if w != NONE {
                assert!(full.walls[w as usize].facets.contains(&(f as u32)), "{name}");
            }
        }
    }
}
