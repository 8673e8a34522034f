use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use corot::benchmarks::{self, BenchOptions, MatrixConfig};
use corot::corot::Method;
use corot::elements::ElementKind;
use corot::error::{Error, Result};
use corot::frames::FrameStrategy;
use corot::io;
use corot::solver::{run, Model, SolverConfig};
use corot::verify::{self, MODULES};

#[derive(Parser)]
#[command(name = "corot", version, about = "Co-rotational nonlinear FE analysis with direct force correction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a model file (or a built-in benchmark) and write the monitored history as CSV.
    Run {
        /// Model file path, or the name of a built-in benchmark.
        input: String,
        #[arg(long, default_value = "sc1")]
        method: String,
        /// Replace every element's frame strategy.
        #[arg(long)]
        frame: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 30)]
        max_iter: usize,
        /// CSV output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a built-in benchmark over frames and methods.
    Bench {
        name: String,
        /// Comma-separated frame strategies; the benchmark's own set by default.
        #[arg(long)]
        frames: Option<String>,
        /// Comma-separated methods; the benchmark's own set by default.
        #[arg(long)]
        methods: Option<String>,
        /// Mesh variant element kind (plane frame: Cst3, Quad4; L-frame: TriShell3, QuadShell4).
        #[arg(long)]
        element: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 30)]
        max_iter: usize,
        /// Report directory.
        #[arg(long, default_value = "bench-out")]
        out: PathBuf,
    },
    /// Run the seeded invariant suite.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Restrict to one module.
        #[arg(long)]
        only: Option<String>,
    },
    /// Write a built-in benchmark's model file.
    Export {
        name: String,
        #[arg(long)]
        element: Option<String>,
        out: PathBuf,
    },
}

fn parse_list<T>(list: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(parse).collect()
}

fn parse_element(name: Option<&str>) -> Result<BenchOptions> {
    let element = match name {
        None => None,
        Some(n) => Some(
            ElementKind::parse(n).ok_or_else(|| Error::UnknownName { what: "element kind", name: n.to_string() })?,
        ),
    };
    Ok(BenchOptions { element })
}

fn load_input(input: &str) -> Result<(Model, Option<usize>)> {
    let path = Path::new(input);
    if !path.exists() && benchmarks::NAMES.contains(&input) {
        let b = benchmarks::generate(input)?;
        return Ok((b.model, Some(b.steps)));
    }
    Ok((io::read_model(path)?, None))
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    input: &str,
    method: &str,
    frame: Option<&str>,
    steps: Option<usize>,
    tol: f64,
    max_iter: usize,
    out: Option<&Path>,
) -> Result<u8> {
    let method = Method::parse(method)?;
    let (mut model, default_steps) = load_input(input)?;
    if let Some(f) = frame {
        model = model.with_strategy(FrameStrategy::parse(f, model.regime)?)?;
    }
    let config = SolverConfig { method, steps: steps.or(default_steps).unwrap_or(20), tol, max_iter, ..SolverConfig::default() };
    config.validate()?;
    let history = run(&model, &config);
    write_output(out, &history.to_csv())?;
    match &history.failure {
        None => Ok(0),
        Some(e) => {
            eprintln!("corot: {e}; wrote {} of {} steps", history.records.len(), config.steps);
            Ok(2)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    name: &str,
    frames: Option<&str>,
    methods: Option<&str>,
    element: Option<&str>,
    steps: Option<usize>,
    tol: f64,
    max_iter: usize,
    out: &Path,
) -> Result<u8> {
    let bench = benchmarks::generate_with(name, &parse_element(element)?)?;
    let regime = bench.model.regime;
    let frames = match frames {
        Some(l) => parse_list(l, |s| FrameStrategy::parse(s, regime))?,
        None => bench.frames.clone(),
    };
    let methods = match methods {
        Some(l) => parse_list(l, Method::parse)?,
        None => bench.methods.clone(),
    };
    let cfg = MatrixConfig { steps, tol, max_iter };
    let report = benchmarks::run_matrix(&bench, &methods, &frames, &cfg);
    let written = report.write(out)?;
    print!("{}", report.summary());
    eprintln!("corot: wrote {} files to {}", written.len(), out.display());
    Ok(0)
}

fn cmd_verify(seed: u64, only: Option<&str>) -> Result<u8> {
    if let Some(m) = only {
        if !MODULES.contains(&m) {
            return Err(Error::UnknownName { what: "module", name: m.to_string() });
        }
    }
    let outcomes = verify::run_suite(seed, only);
    let mut failed = 0;
    for c in &outcomes {
        println!("{} {}::{} {}", if c.passed { "PASS" } else { "FAIL" }, c.module, c.name, c.detail);
        failed += usize::from(!c.passed);
    }
    println!("{} checks, {failed} failed (seed {seed})", outcomes.len());
    Ok(u8::from(failed > 0))
}

fn cmd_export(name: &str, element: Option<&str>, out: &Path) -> Result<u8> {
    let bench = benchmarks::generate_with(name, &parse_element(element)?)?;
    io::write_model(&bench.model, out)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run { input, method, frame, steps, tol, max_iter, out } => {
            cmd_run(input, method, frame.as_deref(), *steps, *tol, *max_iter, out.as_deref())
        }
        Command::Bench { name, frames, methods, element, steps, tol, max_iter, out } => cmd_bench(
            name,
            frames.as_deref(),
            methods.as_deref(),
            element.as_deref(),
            *steps,
            *tol,
            *max_iter,
            out,
        ),
        Command::Verify { seed, only } => cmd_verify(*seed, only.as_deref()),
        Command::Export { name, element, out } => cmd_export(name, element.as_deref(), out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("corot: {e}");
            ExitCode::from(1)
        }
    }
}
