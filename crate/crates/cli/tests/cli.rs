use mc3d::fixtures;
use mc3d::io::{write_hex_mesh, write_param_file, MeshFormat};
use mc3d::tet::hex_to_param;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn mc3d(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mc3d")).args(args).current_dir(dir).output().expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = mc3d(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn value(stdout: &str, key: &str) -> usize {
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no {key} in {stdout}"))
        .trim()
        .parse()
        .unwrap()
}

struct Corpus {
    dir: tempfile::TempDir,
}

impl Corpus {
    fn new() -> Corpus {
        let dir = tempfile::tempdir().unwrap();
        let models = dir.path().join("models");
        std::fs::create_dir(&models).unwrap();
        let pie3 = fixtures::named("pie3").unwrap();
        write_hex_mesh(&pie3, &models.join("pie3.mesh"), MeshFormat::Medit).unwrap();
        write_hex_mesh(&fixtures::hex_box(2, 1, 1), &models.join("box.vtk"), MeshFormat::Vtk).unwrap();
        write_param_file(&hex_to_param(&pie3), &models.join("pie3.param")).unwrap();
        Corpus { dir }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn model(&self, name: &str) -> String {
        self.path().join("models").join(name).to_string_lossy().into_owned()
    }

    fn out(&self, name: &str) -> PathBuf {
        self.path().join(name)
    }
}

#[test]
fn mc_hex_reports_ordered_counts() {
    let c = Corpus::new();
    let blocks = c.out("blocks.txt");
    let s = ok(&["mc-hex", &c.model("pie3.mesh"), "--blocks", blocks.to_str().unwrap()], c.path());
    assert!(value(&s, "mc") <= value(&s, "mc+"));
    assert!(value(&s, "mc+") <= value(&s, "raw"));
    assert_eq!(value(&s, "raw"), 3);
    assert_eq!(std::fs::read_to_string(blocks).unwrap().lines().count(), fixtures::named("pie3").unwrap().n_hexes());
}

#[test]
fn mc_param_matches_hex_pipeline_on_pie3() {
    let c = Corpus::new();
    let h = ok(&["--reduce", "none", "mc-hex", &c.model("pie3.mesh")], c.path());
    let p = ok(&["--reduce", "none", "mc-param", &c.model("pie3.param")], c.path());
    assert_eq!(value(&h, "blocks"), value(&p, "blocks"));
}

#[test]
fn sanitize_leaves_no_violations() {
    let c = Corpus::new();
    let out = c.out("clean.param");
    let s = ok(&["sanitize", &c.model("pie3.param"), "-o", out.to_str().unwrap()], c.path());
    assert_eq!(value(&s, "violations_after"), 0);
    assert!(out.exists());
}

#[test]
fn quantize_writes_mesh_and_report() {
    let c = Corpus::new();
    let out = c.out("q.vtk");
    let report = c.out("q.txt");
    let s = ok(
        &["quantize", &c.model("box.vtk"), "--scale", "2", "-o", out.to_str().unwrap(), "--report", report.to_str().unwrap()],
        c.path(),
    );
    assert_eq!(value(&s, "hexes"), 4 * 2 * 2);
    let mesh = mc3d::io::read_hex_mesh(&out).unwrap();
    assert_eq!(mesh.n_hexes(), 16);
    assert_eq!(std::fs::read_to_string(report).unwrap().lines().count(), value(&s, "arcs"));
}

#[test]
fn base_complex_counts() {
    let c = Corpus::new();
    let s = ok(&["base-complex", &c.model("pie3.mesh")], c.path());
    assert!(value(&s, "bc-") <= value(&s, "bc"));
    let s = ok(&["--reduce", "none", "base-complex", &c.model("pie3.mesh")], c.path());
    assert!(!s.contains("bc-"));
}

#[test]
fn stats_csv_has_a_row_per_model() {
    let c = Corpus::new();
    let csv = c.out("stats.csv");
    let cache = c.out("cache");
    let models = c.model("");
    let table = ok(&["stats", &models, "-o", csv.to_str().unwrap(), "--cache", cache.to_str().unwrap()], c.path());
    assert_eq!(table.lines().count(), 5);
    let rows = mc3d::stats::read_rows(&csv).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.error.is_none() && r.full <= r.raw));
}

#[test]
fn export_writes_one_group_per_wall() {
    let c = Corpus::new();
    let obj = c.out("walls.obj");
    ok(&["--reduce", "full", "export", &c.model("box.vtk"), "-o", obj.to_str().unwrap()], c.path());
    let text = std::fs::read_to_string(obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("g ")).count(), 6);
}

#[test]
fn bad_input_fails_with_message() {
    let c = Corpus::new();
    std::fs::write(c.out("bad.mesh"), "MeshVersionFormatted 2\nVertices\nx\n").unwrap();
    let out = mc3d(&["mc-hex", c.out("bad.mesh").to_str().unwrap()], c.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

/// Runs a command three times from scratch and compares stdout and every
/// output file byte for byte.
fn assert_deterministic(c: &Corpus, args: &[&str], outputs: &[&str]) {
    let mut seen: Option<(String, Vec<Vec<u8>>)> = None;
    for _ in 0..3 {
        for o in outputs {
            let p = c.out(o);
            if p.is_dir() {
                std::fs::remove_dir_all(&p).unwrap();
            } else if p.exists() {
                std::fs::remove_file(&p).unwrap();
            }
        }
        let stdout = ok(args, c.path());
        let files: Vec<Vec<u8>> = outputs
            .iter()
            .filter(|o| !c.out(o).is_dir())
            .map(|o| std::fs::read(c.out(o)).unwrap())
            .collect();
        match &seen {
            None => seen = Some((stdout, files)),
            Some(first) => assert_eq!(first, &(stdout, files), "{args:?}"),
        }
    }
}

#[test]
fn every_subcommand_is_deterministic() {
    let c = Corpus::new();
    let (pie, param, bx) = (c.model("pie3.mesh"), c.model("pie3.param"), c.model("box.vtk"));
    let models = c.model("");
    let seed = ["--seed", "7"];
    let cases: Vec<(Vec<&str>, Vec<&str>)> = vec![
        (vec!["mc-hex", &pie, "--blocks", "b.txt"], vec!["b.txt"]),
        (vec!["mc-param", &param, "--blocks", "b.txt"], vec!["b.txt"]),
        (vec!["sanitize", &param, "-o", "s.param"], vec!["s.param"]),
        (vec!["quantize", &pie, "-o", "q.mesh", "--report", "q.txt"], vec!["q.mesh", "q.txt"]),
        (vec!["base-complex", &pie], vec![]),
        (vec!["stats", &models, "-o", "s.csv", "--cache", "cache"], vec!["s.csv", "cache"]),
        (vec!["export", &bx, "-o", "w.obj", "--explode", "0.5"], vec!["w.obj"]),
    ];
    for (args, outputs) in cases {
        let full: Vec<&str> = seed.iter().copied().chain(args).collect();
        assert_deterministic(&c, &full, &outputs);
    }
}
