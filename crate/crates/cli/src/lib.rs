//! Command-line front end. Exit status 0 on success, 1 when the input is
//! well formed but fails validation, 2 for unreadable or malformed input.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use helixtilt_core::seeds::{seed_helix, SEED_NAMES};
use helixtilt_core::{
    build_height_function, cross_check_tilt, enumerate_height_functions, helix_quiver,
    rolled_b_matrix, thread_quiver, web_bfs, Collection64, Helix64, HelixError, Side,
};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl From<HelixError> for CliError {
    fn from(e: HelixError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "helixtilt", version, about = "Helices, tilting and rolled-up quivers on del Pezzo surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Input {
    /// JSON collection or helix file, `-` for stdin.
    file: Option<PathBuf>,
    /// Built-in seed instead of a file.
    #[arg(long, conflicts_with = "file", value_parser = clap::builder::PossibleValuesParser::new(SEED_NAMES))]
    seed: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algebra {
    /// Rolled-up helix algebra.
    Rolled,
    /// Homomorphism algebra of the thread.
    Thread,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Direction {
    Left,
    Right,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check exceptionality, fullness, strength and geometricity.
    Validate {
        #[command(flatten)]
        input: Input,
    },
    /// Print the quiver of the rolled-up algebra (or of the thread).
    Quiver {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, value_enum, default_value = "rolled")]
        algebra: Algebra,
    },
    /// Print the dual collection of the thread.
    Dual {
        #[command(flatten)]
        input: Input,
    },
    /// Tilt at a vertex and print the new helix.
    Tilt {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        vertex: usize,
        #[arg(long, value_enum, default_value = "left")]
        direction: Direction,
    },
    /// List height functions for a vertex of the thread.
    Height {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        vertex: usize,
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Breadth-first web of tilts, deduplicated by quiver isomorphism.
    Web {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        depth: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the HTTP API.
    Serve {
        #[arg(long, env = "HELIX_PORT", default_value_t = helixtilt_service::DEFAULT_PORT)]
        port: u16,
        /// Directory for JSON session snapshots.
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
}

/// Parses `args` and runs the command, returning the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(cli.command, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read_input(input: &Input) -> Result<Helix64, CliError> {
    if let Some(name) = &input.seed {
        return seed_helix(name).ok_or_else(|| CliError::Input(format!("unknown seed {name:?}")))?.map_err(validation);
    }
    let path = input.file.as_ref().ok_or_else(|| CliError::Input("expected a file or --seed".into()))?;
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| CliError::Input(e.to_string()))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
    };
    parse_helix(&text)
}

/// Accepts a helix (with `period`) or a collection (`surface` and `objects` or `thread`).
pub fn parse_helix(text: &str) -> Result<Helix64, CliError> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed JSON: {e}")))?;
    let Some(obj) = value.as_object_mut() else {
        return Err(CliError::Input("expected a JSON object".into()));
    };
    if !obj.contains_key("surface") {
        return Err(CliError::Input("missing \"surface\"".into()));
    }
    if let Some(thread) = obj.remove("thread") {
        obj.entry("objects").or_insert(thread);
    }
    if !obj.contains_key("objects") {
        return Err(CliError::Input("missing \"objects\"".into()));
    }
    if obj.contains_key("period") || obj.contains_key("d") {
        serde_json::from_value::<Helix64>(value).map_err(validation)
    } else {
        let c: Collection64 = serde_json::from_value(value).map_err(validation)?;
        Ok(Helix64::new(c)?)
    }
}

fn to_json(out: &mut dyn Write, v: &impl serde::Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Input(e.to_string()))?;
    writeln!(out, "{text}").map_err(|e| CliError::Input(e.to_string()))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| CliError::Input(e.to_string()))
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Validate { input } => {
            let h = read_input(&input)?;
            let thread = h.thread();
            let _ = writeln!(out, "thread: {thread}");
            let _ = writeln!(out, "exceptional and full: yes");
            let strong = h.strong_violation();
            let _ = writeln!(out, "strong: {}", if strong.is_none() { "yes" } else { "no" });
            if let Some((i, j)) = strong {
                return Err(CliError::Validation(format!("helix is not strong: objects {i} and {j}")));
            }
            h.require_geometric()?;
            let _ = writeln!(out, "geometric: yes");
            Ok(())
        }
        Command::Quiver { input, format, algebra } => {
            let h = read_input(&input)?;
            let q = match algebra {
                Algebra::Rolled => helix_quiver(&h).map_err(validation)?,
                Algebra::Thread => thread_quiver(h.thread()).map_err(validation)?,
            };
            match format {
                Format::Json => to_json(out, &q),
                Format::Dot => emit(out, &q.to_dot()),
            }
        }
        Command::Dual { input } => {
            let h = read_input(&input)?;
            to_json(out, &h.thread().dual().map_err(validation)?)
        }
        Command::Tilt { input, vertex, direction } => {
            let h = read_input(&input)?;
            let side = match direction {
                Direction::Left => Side::Left,
                Direction::Right => Side::Right,
            };
            let report = cross_check_tilt(&h, vertex, side).map_err(validation)?;
            let _ = writeln!(err, "cross check: {} (psi {:?})", report.verdict(), report.psi);
            if !report.matches {
                return Err(CliError::Validation("tilt disagrees with matrix mutation".into()));
            }
            let tilted = report.helix.expect("cross check carries the tilted helix");
            to_json(out, &tilted)
        }
        Command::Height { input, vertex, bound } => {
            let h = read_input(&input)?;
            let functions = enumerate_height_functions(h.thread(), vertex, bound)?;
            let tilting = build_height_function(&h, vertex).ok().map(|hf| hf.levelling);
            to_json(
                out,
                &serde_json::json!({
                    "vertex": vertex,
                    "bound": bound,
                    "labels": h.thread().labels(),
                    "functions": functions,
                    "tilting": tilting,
                }),
            )
        }
        Command::Web { input, depth, format } => {
            let h = read_input(&input)?;
            rolled_b_matrix(&h).map_err(validation)?;
            let web = web_bfs(&h, depth).map_err(validation)?;
            let _ = writeln!(err, "{} nodes, {} edges", web.nodes.len(), web.edges.len());
            match format {
                Format::Json => to_json(out, &web),
                Format::Dot => emit(out, &web.to_dot()),
            }
        }
        Command::Serve { port, snapshots } => {
            let addr = SocketAddr::from((Ipv4Addr::UNSPECIFIED, port));
            let _ = writeln!(err, "listening on {addr}");
            let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Input(e.to_string()))?;
            rt.block_on(helixtilt_service::serve(addr, snapshots)).map_err(|e| CliError::Input(e.to_string()))
        }
    }
}
