use clap::{Parser, Subcommand, ValueEnum};
use mc3d::complex::{reduce, MotorcycleComplex, ReduceMode};
use mc3d::io::{read_hex_mesh, read_param, write_hex_mesh, write_param_file, write_walls_obj, MeshFormat, ObjOptions};
use mc3d::pipeline::{hex_base_complex, hex_decompose, param_base_complex, param_decompose, Decomposition};
use mc3d::quantize::quantize;
use mc3d::sanitize::{sanitize, verify_seamless};
use mc3d::stats::{run_stats, to_table, write_csv, StatsOptions, PARAM_EXT};
use mc3d::tet::{hex_to_param, ParamTetMesh};
use mc3d::trace::TraceOptions;
use mc3d::{CellMesh, HexMesh};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser, Debug)]
#[command(name = "mc3d", version, about = "Motorcycle complexes of hex meshes and seamless parametrizations")]
struct Cli {
    /// Reduction applied to the complex a command reports or writes.
    #[arg(long, value_enum, global = true, default_value_t = Reduce::Full)]
    reduce: Reduce,
    /// Seed permuting the ignition order of the tracer.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Mesh output format; defaults to the output file extension.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[arg(long, global = true, default_value = "warn")]
    log_level: log::LevelFilter,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Reduce {
    None,
    Regular,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Mesh,
    Vtk,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Motorcycle complex of a hex mesh.
    McHex {
        input: PathBuf,
        /// Write the block id of every hex, one per line.
        #[arg(long)]
        blocks: Option<PathBuf>,
    },
    /// Motorcycle complex of a seamless tet parametrization.
    McParam {
        input: PathBuf,
        /// Write the block id of every refined tet, one per line.
        #[arg(long)]
        blocks: Option<PathBuf>,
    },
    /// Snap a parametrization to exact seamlessness.
    Sanitize {
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Quantize the complex and extract a conforming hex mesh.
    Quantize {
        /// Hex mesh or parametrization.
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, short)]
        output: PathBuf,
        /// Write `arc length quantized` lines.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Base complex block counts, before and after reduction.
    BaseComplex { input: PathBuf },
    /// Block statistics of every model in a directory.
    Stats {
        dir: PathBuf,
        /// CSV destination; the aligned table always goes to stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Cache directory for per-model rows.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Report measured phase timings.
        #[arg(long)]
        timings: bool,
    },
    /// Wall surfaces as OBJ, one group per wall or exploded per block.
    Export {
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long)]
        explode: Option<f64>,
    },
}

enum Input {
    Hex(HexMesh),
    Param(ParamTetMesh),
}

fn load(path: &Path) -> CliResult<Input> {
    if path.extension().is_some_and(|e| e == PARAM_EXT) {
        Ok(Input::Param(read_param(path)?))
    } else {
        Ok(Input::Hex(read_hex_mesh(path)?))
    }
}

fn pick(dec: &Decomposition, r: Reduce) -> &MotorcycleComplex {
    match r {
        Reduce::None => &dec.raw,
        Reduce::Regular => &dec.plus,
        Reduce::Full => &dec.full,
    }
}

/// Complex of the input at the requested reduction, on the mesh it lives on.
fn decomposed(input: &Input, cli: &Cli) -> CliResult<(CellMesh, Decomposition)> {
    let opts = TraceOptions { seed: cli.seed, ..Default::default() };
    Ok(match input {
        Input::Hex(m) => hex_decompose(m, &opts)?,
        Input::Param(pm) => {
            let (tr, dec) = param_decompose(pm, &opts)?;
            (tr.mesh.cells().clone(), dec)
        }
    })
}

fn summary(dec: &Decomposition, r: Reduce) -> String {
    let mc = pick(dec, r);
    let mut s = String::new();
    let _ = writeln!(s, "raw {}", dec.raw.n_blocks());
    let _ = writeln!(s, "mc+ {}", dec.plus.n_blocks());
    let _ = writeln!(s, "mc {}", dec.full.n_blocks());
    let _ = writeln!(s, "torus_splits {}", dec.torus_splits);
    let _ = writeln!(s, "selected {:?}", r);
    let _ = writeln!(s, "blocks {}", mc.n_blocks());
    let _ = writeln!(s, "walls {}", mc.walls.len());
    let _ = writeln!(s, "arcs {}", mc.arcs.len());
    let _ = writeln!(s, "nodes {}", mc.nodes.len());
    let _ = writeln!(s, "t_arcs {:.2}%", mc.t_arc_percent());
    s
}

fn write_blocks(mc: &MotorcycleComplex, path: &Path) -> CliResult<()> {
    let mut s = String::new();
    for b in &mc.cell_block {
        let _ = writeln!(s, "{b}");
    }
    std::fs::write(path, s)?;
    Ok(())
}

fn mesh_format(cli: &Cli, path: &Path) -> CliResult<MeshFormat> {
    match cli.format {
        Some(Format::Mesh) => Ok(MeshFormat::Medit),
        Some(Format::Vtk) => Ok(MeshFormat::Vtk),
        None => MeshFormat::from_path(path)
            .ok_or_else(|| format!("cannot infer a mesh format from {}; pass --format", path.display()).into()),
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::McHex { input, blocks } => {
            let Input::Hex(m) = load(input)? else { return Err("mc-hex expects a hex mesh".into()) };
            let (_, dec) = hex_decompose(&m, &TraceOptions { seed: cli.seed, ..Default::default() })?;
            print!("{}", summary(&dec, cli.reduce));
            if let Some(p) = blocks {
                write_blocks(pick(&dec, cli.reduce), p)?;
            }
        }
        Command::McParam { input, blocks } => {
            let Input::Param(pm) = load(input)? else { return Err("mc-param expects a parametrization".into()) };
            let (_, dec) = param_decompose(&pm, &TraceOptions { seed: cli.seed, ..Default::default() })?;
            print!("{}", summary(&dec, cli.reduce));
            if let Some(p) = blocks {
                write_blocks(pick(&dec, cli.reduce), p)?;
            }
        }
        Command::Sanitize { input, output } => {
            let pm = read_param(input)?;
            let before = verify_seamless(&pm).len();
            let (out, st) = sanitize(&pm)?;
            let after = verify_seamless(&out).len();
            write_param_file(&out, output)?;
            println!("violations_before {before}");
            println!("violations_after {after}");
            println!("nodes {}", st.n_nodes);
            println!("sheets {}", st.n_sheets);
            println!("variables {}", st.n_vars);
            println!("rows {}", st.n_rows);
            println!("max_change {:e}", st.max_change);
        }
        Command::Quantize { input, scale, output, report } => {
            let pm = match load(input)? {
                Input::Hex(m) => hex_to_param(&m),
                Input::Param(pm) => pm,
            };
            let (tr, dec) = param_decompose(&pm, &TraceOptions { seed: cli.seed, ..Default::default() })?;
            let mc = pick(&dec, cli.reduce);
            let q = quantize(tr.mesh.cells(), mc, *scale)?;
            write_hex_mesh(&q.hexes, output, mesh_format(cli, output)?)?;
            println!("blocks {}", mc.n_blocks());
            println!("arcs {}", mc.arcs.len());
            println!("objective {:.6}", q.problem.objective(&q.lengths));
            println!("hexes {}", q.hexes.n_hexes());
            if let Some(p) = report {
                let mut s = String::new();
                for (a, (arc, l)) in mc.arcs.iter().zip(&q.lengths).enumerate() {
                    let _ = writeln!(s, "{a} {:.6} {l}", arc.length);
                }
                std::fs::write(p, s)?;
            }
        }
        Command::BaseComplex { input } => {
            let (mesh, bc) = match load(input)? {
                Input::Hex(m) => (m.to_cell_mesh(), hex_base_complex(&m)?),
                Input::Param(pm) => {
                    let (tr, bc) = param_base_complex(&pm)?;
                    (tr.mesh.cells().clone(), bc)
                }
            };
            println!("bc {}", bc.n_blocks());
            let reduced = match cli.reduce {
                Reduce::None => None,
                Reduce::Regular => Some(reduce(&mesh, bc, ReduceMode::Regular)?.0),
                Reduce::Full => Some(reduce(&mesh, bc, ReduceMode::Full)?.0),
            };
            if let Some(r) = reduced {
                println!("bc- {}", r.n_blocks());
            }
        }
        Command::Stats { dir, output, cache, timings } => {
            let opts = StatsOptions {
                trace: TraceOptions { seed: cli.seed, ..Default::default() },
                cache: cache.clone(),
                timings: *timings,
            };
            let rows = run_stats(dir, &opts)?;
            print!("{}", to_table(&rows));
            if let Some(p) = output {
                write_csv(&rows, p)?;
            }
        }
        Command::Export { input, output, explode } => {
            let (mesh, dec) = decomposed(&load(input)?, cli)?;
            let obj = write_walls_obj(&mesh, pick(&dec, cli.reduce), &ObjOptions { explode: *explode });
            std::fs::write(output, obj)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new().filter_level(cli.log_level).init();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
