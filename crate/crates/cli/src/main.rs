use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use tsop_core::automaton::{build_automaton, export_dot, export_json, MatchingAutomaton};
use tsop_core::codegen::generate_source;
use tsop_core::runtime::Builder;
use tsop_core::sim::{check_script, parse_script, simulate, stress, Target};
use tsop_core::spec::{parse_spec, warnings_for, ObjectSpec};

/// Matching automata, code generation and simulation for concurrent
/// typestate objects.
#[derive(Parser)]
#[command(name = "tsop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a spec and report bounds, states and warnings.
    Check { spec: PathBuf },
    /// Export the matching automaton.
    Automaton {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: Format,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate Rust source for the object into `<dir>/<Object>.rs`.
    Generate {
        spec: PathBuf,
        #[arg(short, long = "out", alias = "output")]
        output: PathBuf,
    },
    /// Run a script against the object.
    Simulate {
        spec: PathBuf,
        script: PathBuf,
        /// Run on N real threads, checking only scheduling-independent
        /// expectations.
        #[arg(long)]
        threads: Option<usize>,
        /// Seconds to wait for blocked calls in threaded mode.
        #[arg(long, default_value_t = 10)]
        timeout: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

const VALIDATION: u8 = 1;
const ASSERTION: u8 = 2;

fn load(path: &Path) -> Result<(ObjectSpec, MatchingAutomaton)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec = parse_spec(&text).with_context(|| format!("{}", path.display()))?;
    let a = build_automaton(&spec).with_context(|| format!("{}", path.display()))?;
    Ok((spec, a))
}

fn check(path: &Path) -> Result<()> {
    let (spec, a) = load(path)?;
    println!("object {}", spec.name);
    println!("protocol {}", spec.protocol);
    let bounds: Vec<String> = a
        .tags()
        .iter()
        .map(|t| format!("{}: {}", t.name, t.bound))
        .collect();
    println!("bounds: {}", bounds.join(", "));
    let raw = a.raw_state_count();
    let legal = a.states().len() as u64;
    println!("states: {legal} legal / {} pruned ({raw} raw)", raw - legal);
    let firing: Vec<String> = (0..a.states().len())
        .filter(|&s| a.is_firing(s))
        .map(|s| format!("#{s} {}", a.label(s)))
        .collect();
    println!(
        "firing states: {}",
        if firing.is_empty() {
            "none".into()
        } else {
            firing.join(", ")
        }
    );
    for w in warnings_for(&spec, &a) {
        println!("warning: {w}");
    }
    Ok(())
}

fn automaton(path: &Path, format: Format, output: Option<&Path>) -> Result<()> {
    let (_, a) = load(path)?;
    let text = match format {
        Format::Dot => export_dot(&a),
        Format::Json => export_json(&a),
    };
    match output {
        Some(out) => fs::write(out, text).with_context(|| format!("writing {}", out.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(path: &Path, dir: &Path) -> Result<()> {
    let (spec, a) = load(path)?;
    if !dir.is_dir() {
        bail!("output directory {} does not exist", dir.display());
    }
    let out = dir.join(format!("{}.rs", spec.name));
    fs::write(&out, generate_source(&spec, &a))
        .with_context(|| format!("writing {}", out.display()))?;
    println!("{}", out.display());
    Ok(())
}

/// `Ok(true)` when every expectation held.
fn run_script(
    path: &Path,
    script_path: &Path,
    threads: Option<usize>,
    timeout: u64,
) -> Result<bool> {
    let (spec, a) = load(path)?;
    let text = fs::read_to_string(script_path)
        .with_context(|| format!("reading {}", script_path.display()))?;
    let script = parse_script(&text).with_context(|| format!("{}", script_path.display()))?;
    check_script(&spec, &a, &script).with_context(|| format!("{}", script_path.display()))?;
    match threads {
        None => {
            let run = simulate(&spec, &a, &script);
            print!("{}", run.render());
            Ok(run.passed())
        }
        Some(n) => {
            let (spec, a) = (Arc::new(spec), Arc::new(a));
            let instance = Builder::new(spec, a.clone()).skip_init().build()?;
            let target: Arc<dyn Target> = Arc::new(instance);
            let report = stress(target, &a, &script, n, Duration::from_secs(timeout));
            print!("{}", report.render());
            Ok(report.passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(VALIDATION)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match &cli.command {
        Command::Check { spec } => check(spec).map(|()| true),
        Command::Automaton {
            spec,
            format,
            output,
        } => automaton(spec, *format, output.as_deref()).map(|()| true),
        Command::Generate { spec, output } => generate(spec, output).map(|()| true),
        Command::Simulate {
            spec,
            script,
            threads,
            timeout,
        } => run_script(spec, script, *threads, *timeout),
    };
    let code = match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(ASSERTION),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(VALIDATION)
        }
    };
    if matches!(
        cli.command,
        Command::Simulate {
            threads: Some(_),
            ..
        }
    ) {
        // Calls that never completed still hold worker threads.
        std::process::exit(i32::from(if code == ExitCode::SUCCESS {
            0
        } else {
            ASSERTION
        }));
    }
    code
}
