use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use mwsmm::artifact::CompileArtifact;
use mwsmm::asm::{parse_program, validate_program, Program};
use mwsmm::engine::{run_deterministic, RunLimits};
use mwsmm::graph::{DecodeManifest, MachineState};
use mwsmm::multiway::{
    check_convergence, explore, export_evolution_dot, export_evolution_json, state_file_name, Convergence,
    ExploreOptions,
};
use mwsmm::qbf::{compile_qbf, eval_qbf_oracle, parse_qbf, qbf_result};
use mwsmm::subst::{compile_subst, parse_subst, subst_oracle};

#[derive(Parser)]
#[command(name = "mwsmm", version, about = "Multiway storage modification machine toolchain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a program, reporting diagnostics on stderr.
    Check { program: PathBuf },
    /// Run a program deterministically.
    Run {
        program: PathBuf,
        /// Comma-separated top-level blocks; all blocks by default.
        #[arg(long, value_delimiter = ',')]
        top: Vec<String>,
        #[arg(long)]
        max_rounds: Option<u64>,
        /// Print one line per fork.
        #[arg(long)]
        trace: bool,
        /// Print run metrics as JSON.
        #[arg(long)]
        metrics: bool,
        /// Write the final state as DOT.
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        /// Write the final state as JSON.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
        /// Decode manifest used to print the final string.
        #[arg(long, value_name = "FILE")]
        manifest: Option<PathBuf>,
    },
    /// Explore every event order breadth-first.
    Multiway {
        program: PathBuf,
        #[arg(long, value_delimiter = ',')]
        top: Vec<String>,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
        /// Dump every state's JSON into this directory.
        #[arg(long, value_name = "DIR")]
        states_dir: Option<PathBuf>,
        #[arg(long)]
        check_convergence: bool,
        #[arg(long, value_name = "FILE")]
        manifest: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        max_states: Option<usize>,
    },
    /// Compile a quantified boolean formula into a program.
    CompileQbf {
        input: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Decide a quantified boolean formula.
    EvalQbf {
        input: PathBuf,
        /// Compile and run the program instead of using brute force.
        #[arg(long)]
        machine: bool,
    },
    /// Compile a string substitution system into a program.
    CompileSubst {
        input: PathBuf,
        #[arg(short, long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Rewrite strings directly, breadth-first.
    SubstOracle {
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Read the string held by a state.
    Decode {
        state: PathBuf,
        #[arg(long, value_name = "FILE")]
        manifest: PathBuf,
    },
}

/// Failure attributable to the invocation rather than its input.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Static errors found by the validator; the message lists them.
#[derive(Debug)]
struct InvalidProgram(String);

impl fmt::Display for InvalidProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidProgram {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<UsageError>().is_some() {
                eprintln!("usage error: {e}");
                ExitCode::from(2)
            } else if let Some(err) = e.downcast_ref::<mwsmm::error::Error>() {
                eprintln!("error: {err}");
                ExitCode::from(1)
            } else if e.downcast_ref::<InvalidProgram>().is_some() {
                eprintln!("{e}");
                ExitCode::from(1)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn load_program(path: &Path) -> Result<Program> {
    let program = parse_program(&read(path)?)?;
    let diags = validate_program(&program);
    for d in diags.iter().filter(|d| !d.is_error()) {
        eprintln!("{d}");
    }
    let errors: Vec<String> = diags.iter().filter(|d| d.is_error()).map(|d| d.to_string()).collect();
    if !errors.is_empty() {
        return Err(InvalidProgram(errors.join("\n")).into());
    }
    Ok(program)
}

fn load_manifest(path: Option<&Path>) -> Result<Option<DecodeManifest>> {
    path.map(|p| Ok(DecodeManifest::from_json(&read(p)?)?)).transpose()
}

/// Top-level blocks to use: the named ones, or every block.
fn select_tops(program: &Program, top: Vec<String>) -> Result<Vec<String>> {
    if top.is_empty() {
        return Ok(program.block_names().into_iter().map(str::to_string).collect());
    }
    for name in &top {
        if program.block_index(name).is_none() {
            return Err(usage(format!("unknown block {name}")));
        }
    }
    Ok(top)
}

fn dispatch(command: Command) -> Result<()> {
    let mut out = io::stdout().lock();
    match command {
        Command::Check { program } => {
            let p = load_program(&program)?;
            writeln!(out, "ok: {} instructions, {} blocks", p.len(), p.blocks.len())?;
        }
        Command::Run {
            program,
            top,
            max_rounds,
            trace,
            metrics,
            dot,
            json,
            manifest,
        } => {
            let p = load_program(&program)?;
            let manifest = load_manifest(manifest.as_deref())?;
            let tops = select_tops(&p, top)?;
            let mut limits = RunLimits::default();
            if let Some(m) = max_rounds {
                limits = limits.with_max_rounds(m);
            }
            let report = run_deterministic(&p, &tops, &limits)?;
            if trace {
                write!(out, "{}", report.trace_text())?;
            }
            for msg in report.stop_messages() {
                writeln!(out, "stop: {msg}")?;
            }
            write!(out, "halt={} rounds={}", report.halt, report.rounds)?;
            if let Some(msg) = &report.limit_message {
                write!(out, " limit=\"{msg}\"")?;
            }
            writeln!(out)?;
            if let Some(m) = &manifest {
                writeln!(out, "decode={}", report.final_state.decode_text(m)?)?;
            }
            if metrics {
                writeln!(out, "{}", report.metrics.to_json())?;
            }
            if let Some(path) = dot {
                write(&path, &report.final_state.to_dot(manifest.as_ref()))?;
            }
            if let Some(path) = json {
                write(&path, &report.final_state.to_json())?;
            }
        }
        Command::Multiway {
            program,
            top,
            depth,
            dot,
            json,
            states_dir,
            check_convergence: check,
            manifest,
            threads,
            max_states,
        } => {
            let p = load_program(&program)?;
            let tops = select_tops(&p, top)?;
            let mut opts = ExploreOptions::new(depth);
            opts.manifest = load_manifest(manifest.as_deref())?;
            opts.threads = threads;
            if max_states.is_some() {
                opts.max_states = max_states;
            }
            let g = explore(&p, &tops, &opts)?;
            writeln!(
                out,
                "states={} edges={} terminals={} frontier={}",
                g.states.len(),
                g.edges.len(),
                g.terminals.len(),
                g.frontier.len()
            )?;
            for (d, count) in g.states_per_depth().into_iter().enumerate() {
                write!(out, "depth={d} states={count}")?;
                if opts.manifest.is_some() {
                    write!(out, " strings={}", g.strings_at(d).join(","))?;
                }
                writeln!(out)?;
            }
            if check {
                let r = check_convergence(&g);
                match r.status {
                    Convergence::Converged => {
                        let term = &g.states[r.terminal.expect("converged has a terminal")];
                        let shown = r.terminal_string.clone().unwrap_or_else(|| term.hash[..16].to_string());
                        write!(out, "converged=true terminal={shown}")?;
                        if let Some((lo, hi)) = r.path_lengths {
                            write!(out, " paths={lo}..{hi}")?;
                        }
                        writeln!(out)?;
                    }
                    Convergence::Diverged => {
                        writeln!(out, "converged=false terminals={}", r.terminal_count)?;
                    }
                    Convergence::Unknown => {
                        writeln!(out, "converged=unknown frontier={}", g.frontier.len())?;
                    }
                }
            }
            if let Some(path) = json {
                write(&path, &export_evolution_json(&g))?;
            }
            if let Some(path) = dot {
                write(&path, &export_evolution_dot(&g))?;
            }
            if let Some(dir) = states_dir {
                fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
                for s in &g.states {
                    write(&dir.join(state_file_name(s)), &s.state.to_json())?;
                }
            }
        }
        Command::CompileQbf { input, output } => {
            let art = compile_qbf(&parse_qbf(&read(&input)?)?)?;
            emit_artifact(&mut out, &art, output.as_deref())?;
        }
        Command::EvalQbf { input, machine } => {
            let q = parse_qbf(&read(&input)?)?;
            let value = if machine {
                let art = compile_qbf(&q)?;
                let report = run_deterministic(&art.program, &art.top_blocks, &RunLimits::default())?;
                qbf_result(&report.final_state)?
            } else {
                eval_qbf_oracle(&q)
            };
            writeln!(out, "{value}")?;
        }
        Command::CompileSubst { input, output } => {
            let art = compile_subst(&parse_subst(&read(&input)?)?)?;
            emit_artifact(&mut out, &art, output.as_deref())?;
        }
        Command::SubstOracle { input, depth } => {
            let sys = parse_subst(&read(&input)?)?;
            let g = subst_oracle(&sys, depth);
            for (d, level) in g.levels.iter().enumerate() {
                writeln!(out, "depth={d} strings={}", level.join(","))?;
            }
            writeln!(out, "edges={}", g.edges.len())?;
            writeln!(out, "terminals={}", g.terminals.join(","))?;
            writeln!(out, "frontier={}", g.frontier.len())?;
        }
        Command::Decode { state, manifest } => {
            let st = MachineState::from_json(&read(&state)?)?;
            let m = DecodeManifest::from_json(&read(&manifest)?)?;
            writeln!(out, "{}", st.decode_text(&m)?)?;
        }
    }
    Ok(())
}

/// Writes the program and its sidecar JSON, or prints the program when no
/// output file is given.
fn emit_artifact(out: &mut impl Write, art: &CompileArtifact, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            write(path, &art.program_text())?;
            write(&path.with_extension("json"), &format!("{}\n", art.sidecar_json()))?;
            writeln!(out, "top={}", art.top_blocks.join(","))?;
        }
        None => write!(out, "{}", art.program_text())?,
    }
    Ok(())
}
