use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use gce_core::primeq::DEFAULT_MAX_CLASS;

/// Equivalence moves, explosions and K-theory for 0-1 vertex matrices.
///
/// Matrices are read from `.01m` files (one row of 0/1 per line, `#`
/// comments) given as positional arguments, followed by any `--inline`
/// matrices. Vertices are numbered from 0.
#[derive(Debug, Parser)]
#[command(name = "gce", version)]
pub struct Cli {
    /// Emit a single JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Inline matrix with '/' between rows, e.g. "11/01"; repeatable.
    #[arg(long, global = true, value_name = "ROWS")]
    pub inline: Vec<String>,

    /// Worker threads for class enumeration and search.
    #[arg(long, global = true, default_value_t = 1, value_parser = parse_threads)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

fn parse_threads(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err("expected a positive integer".into()),
    }
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Matrix files.
    #[arg(value_name = "FILE")]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MoveArgs {
    /// Row being rewritten.
    #[arg(long)]
    pub p: usize,
    /// Unit columns K, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Rows M whose sum replaces the rest of row p, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub m: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Vertex to split.
    #[arg(long)]
    pub v: usize,
    /// Out-neighbours kept by v', comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub m1: Vec<usize>,
    /// Out-neighbours moved to v'', comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub m2: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct PermArgs {
    /// Include relabelling moves (default).
    #[arg(long, overrides_with = "no_perms")]
    pub perms: bool,
    /// Only forward and inverse transfers.
    #[arg(long, overrides_with = "perms")]
    pub no_perms: bool,
    /// Stop after this many distinct matrices.
    #[arg(long, default_value_t = DEFAULT_MAX_CLASS)]
    pub max: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Canonical form under simultaneous relabelling.
    Canon(Inputs),
    /// Transposed matrix.
    Transpose(Inputs),
    /// Whether the graph is strongly connected with an edge.
    Irreducible(Inputs),
    /// Cofinal vertices, or whether `--v` is cofinal.
    Cofinal {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        v: Option<usize>,
    },
    /// All primitive transfers.
    Transfers {
        #[command(flatten)]
        inputs: Inputs,
        /// Also list moves that leave the matrix unchanged.
        #[arg(long)]
        include_trivial: bool,
    },
    /// Apply the transfer (p, K, M).
    ApplyTransfer {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        mv: MoveArgs,
    },
    /// Size of the primitive equivalence class.
    Class {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        perms: PermArgs,
        /// Write every member to FILE, separated by blank lines.
        #[arg(long, value_name = "FILE")]
        dump: Option<PathBuf>,
    },
    /// Whether two matrices are primitively equivalent, with a witness path.
    Equiv {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        perms: PermArgs,
    },
    /// Reverse transfers at cofinal vertices; with `--p`, apply one.
    ReverseTransfers {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, value_delimiter = ',', requires = "p")]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', requires = "p")]
        m: Vec<usize>,
    },
    /// Split a vertex into v' (index v) and v'' (index v + 1).
    Explode {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Split a vertex into one vertex per out-edge.
    CompleteExplode {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        v: usize,
        /// Stop after this many iterations.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Explosion of the transposed graph at a cofinal vertex.
    ReverseExplode {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Whether the second matrix is an explosion of the first.
    IsExplosion(Inputs),
    /// Vertex matrix of the adjoint graph.
    EdgeMatrix(Inputs),
    /// Check B = RS and C = SR; inputs B C R S (R, S may hold integers).
    EsseVerify(Inputs),
    /// Column-subdivision factors for B (n) and C (n + 1), if any.
    EsseDecide(Inputs),
    /// Imprimitivity graph [[0, R], [S, 0]]; inputs R S.
    Imprimitivity(Inputs),
    /// K0 group and class of the identity.
    K0(Inputs),
    /// Whether two pointed K0 groups are isomorphic.
    K0Pairs(Inputs),
    /// Look for K0-equivalent but primitively inequivalent pairs.
    Search {
        #[arg(long)]
        n: usize,
        /// Keep reducible matrices.
        #[arg(long)]
        include_reducible: bool,
        /// Drop permutation matrices.
        #[arg(long)]
        exclude_permutations: bool,
        /// Matrices enumerated at most.
        #[arg(long, default_value_t = 1 << 16)]
        max_matrices: u64,
        /// Class-size cap per class.
        #[arg(long, default_value_t = DEFAULT_MAX_CLASS)]
        max: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Canon(_) => "canon",
            Command::Transpose(_) => "transpose",
            Command::Irreducible(_) => "irreducible",
            Command::Cofinal { .. } => "cofinal",
            Command::Transfers { .. } => "transfers",
            Command::ApplyTransfer { .. } => "apply-transfer",
            Command::Class { .. } => "class",
            Command::Equiv { .. } => "equiv",
            Command::ReverseTransfers { .. } => "reverse-transfers",
            Command::Explode { .. } => "explode",
            Command::CompleteExplode { .. } => "complete-explode",
            Command::ReverseExplode { .. } => "reverse-explode",
            Command::IsExplosion(_) => "is-explosion",
            Command::EdgeMatrix(_) => "edge-matrix",
            Command::EsseVerify(_) => "esse-verify",
            Command::EsseDecide(_) => "esse-decide",
            Command::Imprimitivity(_) => "imprimitivity",
            Command::K0(_) => "k0",
            Command::K0Pairs(_) => "k0-pairs",
            Command::Search { .. } => "search",
        }
    }
}
