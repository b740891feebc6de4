mod commands;
mod manifest;
mod qubit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kronstate::KronError;

#[derive(Parser)]
#[command(
    name = "kron",
    version,
    about = "Exact Kronecker states of two-row partitions"
)]
struct Cli {
    /// Emit JSON instead of text tables
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Kronecker coefficient of a tuple such as 12:4,4,4
    Coeff { tuple: String },
    /// Orthonormal basis of the Kronecker subspace from a graph
    Basis {
        /// Catalog name or path to a graph JSON file
        graph: String,
        tuple: String,
        outdir: PathBuf,
        /// Run the oracle checks on the result
        #[arg(long)]
        verify: bool,
        /// Build every compatible candidate and never stop early
        #[arg(long)]
        exhaustive: bool,
        #[arg(long)]
        entry_cap: Option<u64>,
        #[arg(long, default_value_t = 0x6b726f6e)]
        seed: u64,
        /// Also write the axis/value point list of each vector
        #[arg(long)]
        dump_coords: bool,
    },
    /// Clebsch-Gordan coefficients with one part as pivot
    Cgc {
        tuple: String,
        /// 0-based index of the pivot part
        #[arg(long)]
        pivot: usize,
        /// Graph used to build the basis (default by arity)
        #[arg(long)]
        graph: Option<String>,
        /// Output file, `-` for stdout
        outfile: PathBuf,
    },
    /// Normalized W-Kronecker state
    Wstate {
        tuple: String,
        #[arg(long)]
        dump_coords: bool,
    },
    /// Schur transform of a computational basis sequence
    Schur { bits: String },
    /// Irrep matrix of a permutation in cycle notation, e.g. `irrep 4:2 "(1 2)(3 4)"`
    Irrep { partition: String, cycles: String },
    /// Check a vector file or a basis directory
    Verify { path: PathBuf },
    /// Effective coefficients of the catalog graphs on four-part tuples
    Table62 { nmax: usize },
    /// Graph-level operations
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Floating-point qubit experiments
    #[command(subcommand)]
    Qubit(QubitCmd),
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Normalized graph-Kronecker state for one inner labelling
    State {
        graph: String,
        #[arg(long)]
        n: usize,
        /// External labels, comma separated
        #[arg(long)]
        ext: String,
        /// Inner labels, one digit per edge or comma separated
        #[arg(long)]
        mu: String,
        #[arg(long)]
        dump_coords: bool,
    },
    /// Compatible inner labellings
    Labels { graph: String, tuple: String },
    /// Names in the built-in catalog
    List,
}

#[derive(Subcommand)]
enum QubitCmd {
    /// Contract stitch matrices along the inner edges of a graph
    Contract {
        graph: String,
        /// `e=a,b;c,d` with optional `:psi` suffix; complex entries as `x+yi`
        #[arg(long)]
        stitch: Vec<String>,
    },
    /// Epsilon-contraction invariant of a state file
    Invariant {
        statefile: PathBuf,
        #[arg(long)]
        qubits: usize,
        /// Pattern JSON file, or `b0` / `hyperdet`
        #[arg(long, default_value = "b0")]
        pattern: String,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<KronError> for CliError {
    fn from(e: KronError) -> Self {
        let code = match &e {
            KronError::Input(_) | KronError::Parse(_) | KronError::Domain(_) | KronError::Io(_) => {
                2
            }
            KronError::OutsidePolytope(_) => 3,
            KronError::Cap(_) => 4,
            KronError::Verification(_) => 5,
            KronError::IrrationalNorm(_) => 6,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError {
            code: 2,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn configure_threads() {
    if let Ok(s) = std::env::var("KRON_THREADS") {
        match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring KRON_THREADS={s:?}"),
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Coeff { tuple } => commands::coeff(&tuple, json),
        Cmd::Basis {
            graph,
            tuple,
            outdir,
            verify,
            exhaustive,
            entry_cap,
            seed,
            dump_coords,
        } => {
            let opts = commands::BasisArgs {
                verify,
                exhaustive,
                entry_cap,
                seed,
                dump_coords,
            };
            commands::basis(&graph, &tuple, &outdir, &opts, json)
        }
        Cmd::Cgc {
            tuple,
            pivot,
            graph,
            outfile,
        } => commands::cgc(&tuple, pivot, graph.as_deref(), &outfile),
        Cmd::Wstate { tuple, dump_coords } => commands::wstate(&tuple, dump_coords),
        Cmd::Schur { bits } => commands::schur(&bits, json),
        Cmd::Irrep { partition, cycles } => commands::irrep(&partition, &cycles, json),
        Cmd::Verify { path } => commands::verify(&path, json),
        Cmd::Table62 { nmax } => commands::table62(nmax, json),
        Cmd::Graph(GraphCmd::State {
            graph,
            n,
            ext,
            mu,
            dump_coords,
        }) => commands::graph_state(&graph, n, &ext, &mu, dump_coords),
        Cmd::Graph(GraphCmd::Labels { graph, tuple }) => commands::graph_labels(&graph, &tuple),
        Cmd::Graph(GraphCmd::List) => commands::graph_list(json),
        Cmd::Qubit(QubitCmd::Contract { graph, stitch }) => qubit::contract(&graph, &stitch, json),
        Cmd::Qubit(QubitCmd::Invariant {
            statefile,
            qubits,
            pattern,
        }) => qubit::invariant(&statefile, qubits, &pattern, json),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kron: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
