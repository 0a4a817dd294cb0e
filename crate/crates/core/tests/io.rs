use mc3d::complex::{extract_complex, MotorcycleComplex};
use mc3d::io::{self, MeshFormat, ObjOptions};
use mc3d::tet::hex_to_param;
use mc3d::trace::{trace_hex, TraceOptions};
use mc3d::{fixtures, Error, HexMesh, Vec3};

fn bits(m: &HexMesh) -> Vec<[u64; 3]> {
    m.positions.iter().map(|p| [p.x.to_bits(), p.y.to_bits(), p.z.to_bits()]).collect()
}

fn jittered(name: &str) -> HexMesh {
    let m = fixtures::named(name).unwrap();
    let positions = m
        .positions
        .iter()
        .enumerate()
        .map(|(i, p)| p + Vec3::new(1.0 / 3.0, (i as f64).sqrt() * 1e-7, -std::f64::consts::PI * 1e-3))
        .collect();
    mc3d::build_hex_connectivity(m.hexes().iter().map(|h| h.as_slice().try_into().unwrap()).collect(), positions).unwrap()
}

#[test]
fn hex_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    for name in fixtures::NAMED {
        let m = jittered(name);
        for (fmt, ext) in [(MeshFormat::Medit, "mesh"), (MeshFormat::Vtk, "vtk")] {
            let path = dir.path().join(format!("{name}.{ext}"));
            io::write_hex_mesh(&m, &path, fmt).unwrap();
            let back = io::read_hex_mesh(&path).unwrap();
            assert_eq!(back.hexes(), m.hexes(), "{name}.{ext}");
            assert_eq!(bits(&back), bits(&m), "{name}.{ext}");
        }
    }
}

const ONE_HEX_VTK: &str = "# vtk DataFile Version 2.0
one hex
ASCII
DATASET UNSTRUCTURED_GRID
POINTS 8 double
0 0 0
1 0 0
1 1 0
0 1 0
0 0 1
1 0 1
1 1 1
0 1 1
CELLS 1 9
8 0 1 2 3 4 5 6 7
CELL_TYPES 1
12
";

#[test]
fn vtk_corner_order() {
    let m = io::parse_vtk(ONE_HEX_VTK).unwrap();
    assert_eq!(m.n_hexes(), 1);
    let cm = m.to_cell_mesh();
    for v in 0..8u32 {
        assert!((cm.corner_solid(0, v) - 1.0).abs() < 1e-12);
    }
    for (i, fr) in m.topo.facets.iter().enumerate() {
        let p: Vec<Vec3> = fr.vertices.iter().map(|&v| m.positions[v as usize]).collect();
        let n = (p[1] - p[0]).cross(&(p[2] - p[0]));
        let centre: Vec3 = p.iter().sum::<Vec3>() / 4.0;
        assert!(n.dot(&(centre - Vec3::repeat(0.5))) > 0.0, "facet {i} points inward");
    }
}

#[test]
fn unknown_cell_type() {
    let text = ONE_HEX_VTK.replace("CELL_TYPES 1\n12", "CELL_TYPES 1\n10");
    let err = io::parse_vtk(&text).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 17, .. }), "{err}");
}

#[test]
fn medit_error_has_line_number() {
    let text = "MeshVersionFormatted 2\nDimension 3\nVertices\n2\n0 0 0 0\n1 x 0 0\nEnd\n";
    assert!(matches!(io::parse_medit(text), Err(Error::Parse { line: 6, .. })));
}

const ONE_TET: &str = "4 1
0 0 0
1 0 0
0 1 0
0 0 1
0 1 2 3 0 0 0 1 0 0 0 1 0 0 0 1
";

#[test]
fn param_round_trip() {
    let pm = io::parse_param(ONE_TET).unwrap();
    assert_eq!(pm.n_tets(), 1);
    assert_eq!(pm.tet_params(0)[3], Vec3::new(0.0, 0.0, 1.0));
    assert_eq!(io::write_param(&io::parse_param(&io::write_param(&pm)).unwrap()), io::write_param(&pm));
    for name in fixtures::NAMED {
        let pm = hex_to_param(&fixtures::named(name).unwrap());
        let text = io::write_param(&pm);
        let back = io::parse_param(&text).unwrap();
        assert_eq!(io::write_param(&back), text, "{name}");
        assert_eq!(back.singular_vertex_pairs(), pm.singular_vertex_pairs());
    }
}

#[test]
fn truncated_param_file() {
    let cut = &ONE_TET[..ONE_TET.len() - 6];
    assert!(matches!(io::parse_param(cut), Err(Error::Parse { line: 6, .. })));
    assert!(matches!(io::parse_param("5 1\n0 0 0\n"), Err(Error::Parse { .. })));
}

fn complex(m: &HexMesh) -> MotorcycleComplex {
    let field = trace_hex(m, &TraceOptions::default());
    extract_complex(&m.to_cell_mesh(), &field.tagged, &field.d).unwrap()
}

fn groups(obj: &str) -> usize {
    obj.lines().filter(|l| l.starts_with("g ")).count()
}

#[test]
fn obj_groups() {
    let m = fixtures::hex_box(1, 1, 1);
    let mc = complex(&m);
    assert_eq!(groups(&io::write_walls_obj(&m.to_cell_mesh(), &mc, &ObjOptions::default())), 6);
    for name in fixtures::NAMED {
        let m = fixtures::named(name).unwrap();
        let mc = complex(&m);
        let cm = m.to_cell_mesh();
        assert_eq!(groups(&io::write_walls_obj(&cm, &mc, &ObjOptions::default())), mc.walls.len(), "{name}");
        let exploded = io::write_walls_obj(&cm, &mc, &ObjOptions { explode: Some(0.5) });
        assert_eq!(groups(&exploded), mc.blocks.len(), "{name}");
    }
    let m = fixtures::pie(3, &[1, 1, 1], &[1, 1, 1]);
    let mc = complex(&m);
    assert!(mc.walls.iter().filter(|w| !w.boundary).count() >= 3);
}
