use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use gce_core::explosion::{complete_explosion_steps, VertexSplit};
use gce_core::graph::cofinal_vertices;
use gce_core::matrix::{DEFAULT_MAX_N, MAX_DIM};
use gce_core::primeq::{apply_reverse_transfer, are_primitively_equivalent_with, Step};
use gce_core::{
    self as core, ClassOptions, Equivalence, FactorPair, IntMatrix, SearchOptions, TransferMove,
    ZeroOneMatrix,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{Cli, Command, Inputs, MoveArgs, PermArgs, SplitArgs};
use crate::error::{CliError, Result};

/// What a subcommand produced, before rendering.
pub struct Outcome {
    pub inputs: Vec<Value>,
    pub result: Value,
    pub text: String,
    pub visited: u64,
}

/// One input matrix before parsing.
struct Source {
    label: String,
    text: String,
}

/// Size limit for parsed matrices: `GCE_MAX_N` or the default.
pub fn max_n() -> Result<usize> {
    match std::env::var("GCE_MAX_N") {
        Err(_) => Ok(DEFAULT_MAX_N),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if (1..=MAX_DIM).contains(&n) => Ok(n),
            _ => Err(CliError::Usage(format!(
                "GCE_MAX_N must be an integer in 1..={MAX_DIM}, got {s:?}"
            ))),
        },
    }
}

fn sources(files: &[PathBuf], inline: &[String]) -> Result<Vec<Source>> {
    let mut out = Vec::new();
    for path in files {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        out.push(Source {
            label: path.display().to_string(),
            text,
        });
    }
    for s in inline {
        out.push(Source {
            label: format!("--inline {s:?}"),
            text: s.replace('/', "\n"),
        });
    }
    Ok(out)
}

struct Loader {
    sources: Vec<Source>,
    limit: usize,
}

impl Loader {
    fn new(inputs: &Inputs, inline: &[String], count: usize) -> Result<Self> {
        let sources = sources(&inputs.files, inline)?;
        if sources.len() != count {
            return Err(CliError::Usage(format!(
                "expected {count} input matri{}, got {}",
                if count == 1 { "x" } else { "ces" },
                sources.len()
            )));
        }
        Ok(Self {
            sources,
            limit: max_n()?,
        })
    }

    fn zero_one(&self, i: usize) -> Result<ZeroOneMatrix> {
        let s = &self.sources[i];
        ZeroOneMatrix::parse_with_limit(&s.text, self.limit).map_err(|source| CliError::Parse {
            input: s.label.clone(),
            source,
        })
    }

    fn integer(&self, i: usize) -> Result<IntMatrix> {
        let s = &self.sources[i];
        IntMatrix::parse(&s.text).map_err(|source| CliError::Parse {
            input: s.label.clone(),
            source,
        })
    }
}

fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn inline(m: &ZeroOneMatrix) -> String {
    m.to_row_strings().join("/")
}

fn set(xs: &[usize]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

fn describe_move(mv: &TransferMove) -> String {
    format!("p={} K={} M={}", mv.p, set(&mv.k()), set(&mv.m()))
}

fn matrix_outcome(inputs: Vec<Value>, m: &ZeroOneMatrix) -> Result<Outcome> {
    Ok(Outcome {
        inputs,
        result: to_value(m)?,
        text: m.serialize(),
        visited: 0,
    })
}

fn moves_outcome(inputs: Vec<Value>, moves: &[TransferMove]) -> Result<Outcome> {
    let text: String = moves.iter().map(|mv| describe_move(mv) + "\n").collect();
    Ok(Outcome {
        inputs,
        result: to_value(&moves)?,
        text,
        visited: moves.len() as u64,
    })
}

fn class_options(perms: &PermArgs, threads: usize, collect: bool) -> ClassOptions {
    ClassOptions {
        use_permutations: !perms.no_perms,
        max_size: perms.max,
        collect_members: collect,
        threads,
    }
}

fn split(args: &SplitArgs) -> VertexSplit {
    VertexSplit::new(args.v, &args.m1, &args.m2)
}

fn transfer(args: &MoveArgs) -> TransferMove {
    TransferMove::new(args.p, &args.k, &args.m)
}

fn write_dump(path: &Path, members: &[ZeroOneMatrix]) -> Result<()> {
    let body: Vec<String> = members.iter().map(|m| m.serialize()).collect();
    std::fs::write(path, body.join("\n")).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn describe_step(step: &Step, m: &ZeroOneMatrix) -> String {
    match step {
        Step::Forward { mv } => format!("transfer {} -> {}", describe_move(mv), inline(m)),
        Step::Inverse { mv } => format!("inverse {} -> {}", describe_move(mv), inline(m)),
        Step::Permute { sigma } => format!("relabel {:?} -> {}", sigma.images(), inline(m)),
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let inline_args = &cli.inline;
    let threads = cli.threads;
    match &cli.command {
        Command::Canon(inputs) => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let (c, sigma) = core::canonical_form(&b)?;
            Ok(Outcome {
                inputs: vec![to_value(&b)?],
                result: json!({ "matrix": c, "permutation": sigma.images() }),
                text: c.serialize(),
                visited: 0,
            })
        }
        Command::Transpose(inputs) => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            matrix_outcome(vec![to_value(&b)?], &b.transpose())
        }
        Command::Irreducible(inputs) => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let irreducible = core::is_irreducible(&b);
            let components = core::scc(&b).component_count();
            Ok(Outcome {
                inputs: vec![to_value(&b)?],
                result: json!({ "irreducible": irreducible, "components": components }),
                text: format!("{irreducible}\n"),
                visited: 0,
            })
        }
        Command::Cofinal { inputs, v } => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let (result, text) = match v {
                Some(v) => {
                    let c = core::is_cofinal(&b, *v)?;
                    (json!(c), format!("{c}\n"))
                }
                None => {
                    let mask = cofinal_vertices(&b);
                    let vs: Vec<usize> = (0..b.n()).filter(|&i| mask >> i & 1 == 1).collect();
                    let parts: Vec<String> = vs.iter().map(|x| x.to_string()).collect();
                    (json!(vs), format!("{}\n", parts.join(" ")))
                }
            };
            Ok(Outcome {
                inputs: vec![to_value(&b)?],
                result,
                text,
                visited: 0,
            })
        }
        Command::Transfers {
            inputs,
            include_trivial,
        } => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let moves = core::primeq::transfer_moves_with(&b, *include_trivial);
            moves_outcome(vec![to_value(&b)?], &moves)
        }
        Command::ApplyTransfer { inputs, mv } => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let c = core::apply_transfer(&b, &transfer(mv))?;
            matrix_outcome(vec![to_value(&b)?], &c)
        }
        Command::Class {
            inputs,
            perms,
            dump,
        } => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let opts = class_options(perms, threads, dump.is_some());
            let report = core::equivalence_class(&b, &opts);
            if let (Some(path), Some(members)) = (dump, &report.representatives) {
                write_dump(path, members)?;
            }
            Ok(Outcome {
                inputs: vec![to_value(&b)?],
                result: json!({
                    "size": report.size,
                    "exhausted": report.exhausted,
                    "permutations": opts.use_permutations,
                    "max": opts.max_size,
                    "moves_used": report.moves_used,
                }),
                text: format!("size {}\nexhausted {}\n", report.size, report.exhausted),
                visited: report.size as u64,
            })
        }
        Command::Equiv { inputs, perms } => {
            let l = Loader::new(inputs, inline_args, 2)?;
            let (a, b) = (l.zero_one(0)?, l.zero_one(1)?);
            let opts = class_options(perms, threads, false);
            let eq = are_primitively_equivalent_with(&a, &b, &opts)?;
            let (text, visited) = match &eq {
                Equivalence::Equivalent { witness } => {
                    let n = witness.len();
                    let mut t = format!("equivalent in {n} step{}\n", if n == 1 { "" } else { "s" });
                    for (step, m) in witness {
                        let _ = writeln!(t, "{}", describe_step(step, m));
                    }
                    (t, witness.len() as u64)
                }
                Equivalence::NotEquivalent { class_size } => (
                    format!("not equivalent (class size {class_size})\n"),
                    *class_size as u64,
                ),
                Equivalence::Inconclusive { visited } => (
                    format!("inconclusive (visited {visited})\n"),
                    *visited as u64,
                ),
            };
            Ok(Outcome {
                inputs: vec![to_value(&a)?, to_value(&b)?],
                result: to_value(&eq)?,
                text,
                visited,
            })
        }
        Command::ReverseTransfers { inputs, p, k, m } => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            match p {
                Some(p) => {
                    let c = apply_reverse_transfer(&b, &TransferMove::new(*p, k, m))?;
                    matrix_outcome(vec![to_value(&b)?], &c)
                }
                None => moves_outcome(vec![to_value(&b)?], &core::reverse_transfer_moves(&b)),
            }
        }
        Command::Explode { inputs, split: s } => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let c = core::vertex_explosion(&b, &split(s))?;
            matrix_outcome(vec![to_value(&b)?], &c)
        }
        Command::CompleteExplode { inputs, v, steps } => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let (c, positions) = match steps {
                Some(k) => complete_explosion_steps(&b, *v, *k)?,
                None => {
                    let c = core::complete_explosion(&b, *v)?;
                    let k = b.out_degree(*v) - 1;
                    (c, complete_explosion_steps(&b, *v, k)?.1)
                }
            };
            Ok(Outcome {
                inputs: vec![to_value(&b)?],
                result: json!({ "matrix": c, "positions": positions }),
                text: c.serialize(),
                visited: 0,
            })
        }
        Command::ReverseExplode { inputs, split: s } => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let c = core::reverse_explosion(&b, &split(s))?;
            matrix_outcome(vec![to_value(&b)?], &c)
        }
        Command::IsExplosion(inputs) => {
            let l = Loader::new(inputs, inline_args, 2)?;
            let (b, c) = (l.zero_one(0)?, l.zero_one(1)?);
            let found = core::is_explosion_of(&b, &c)?;
            let (result, text) = match &found {
                Some((s, sigma)) => (
                    json!({ "split": s, "permutation": sigma.images() }),
                    format!(
                        "true\nsplit v={} M1={} M2={}\nrelabel {:?}\n",
                        s.v,
                        set(&bits(s.first)),
                        set(&bits(s.second)),
                        sigma.images()
                    ),
                ),
                None => (Value::Null, "false\n".to_string()),
            };
            Ok(Outcome {
                inputs: vec![to_value(&b)?, to_value(&c)?],
                result,
                text,
                visited: 0,
            })
        }
        Command::EdgeMatrix(inputs) => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let em = core::edge_matrix(&b)?;
            let mut text = em.matrix.serialize();
            for (e, (s, r)) in em.edges.iter().enumerate() {
                let _ = writeln!(text, "# edge {e}: {s} -> {r}");
            }
            Ok(Outcome {
                inputs: vec![to_value(&b)?],
                result: to_value(&em)?,
                text,
                visited: 0,
            })
        }
        Command::EsseVerify(inputs) => {
            let l = Loader::new(inputs, inline_args, 4)?;
            let (b, c) = (l.zero_one(0)?, l.zero_one(1)?);
            let pair = FactorPair::new(l.integer(2)?, l.integer(3)?)?;
            let ok = core::verify_esse(&b, &c, &pair)?;
            let cs = core::is_column_subdivision(&pair.r);
            Ok(Outcome {
                inputs: vec![
                    to_value(&b)?,
                    to_value(&c)?,
                    to_value(&pair.r)?,
                    to_value(&pair.s)?,
                ],
                result: json!({ "esse": ok, "r_column_subdivision": cs }),
                text: format!("{ok}\ncolumn subdivision {cs}\n"),
                visited: 0,
            })
        }
        Command::EsseDecide(inputs) => {
            let l = Loader::new(inputs, inline_args, 2)?;
            let (b, c) = (l.zero_one(0)?, l.zero_one(1)?);
            let pair = core::esse_cs_decide(&b, &c)?;
            let text = match &pair {
                Some(p) => format!(
                    "true\nR\n{}\nS\n{}\n",
                    p.r.to_row_strings().join("\n"),
                    p.s.to_row_strings().join("\n")
                ),
                None => "false\n".to_string(),
            };
            Ok(Outcome {
                inputs: vec![to_value(&b)?, to_value(&c)?],
                result: to_value(&pair)?,
                text,
                visited: 0,
            })
        }
        Command::Imprimitivity(inputs) => {
            let l = Loader::new(inputs, inline_args, 2)?;
            let pair = FactorPair::new(l.integer(0)?, l.integer(1)?)?;
            let x = core::imprimitivity_graph(&pair)?;
            matrix_outcome(vec![to_value(&pair.r)?, to_value(&pair.s)?], &x)
        }
        Command::K0(inputs) => {
            let b = Loader::new(inputs, inline_args, 1)?.zero_one(0)?;
            let k = core::k0_invariant(&b)?;
            let mut result = to_value(&k)?;
            result["group"] = json!(k.group_string());
            Ok(Outcome {
                inputs: vec![to_value(&b)?],
                result,
                text: format!("{}, identity order {}\n", k.group_string(), k.identity_order),
                visited: 0,
            })
        }
        Command::K0Pairs(inputs) => {
            let l = Loader::new(inputs, inline_args, 2)?;
            let (a, b) = (l.zero_one(0)?, l.zero_one(1)?);
            let (ka, kb) = (core::k0_invariant(&a)?, core::k0_invariant(&b)?);
            let iso = core::k0_pairs_isomorphic(&ka, &kb);
            Ok(Outcome {
                inputs: vec![to_value(&a)?, to_value(&b)?],
                result: json!({ "isomorphic": iso, "first": ka, "second": kb }),
                text: format!("{iso}\n"),
                visited: 0,
            })
        }
        Command::Search {
            n,
            include_reducible,
            exclude_permutations,
            max_matrices,
            max,
        } => {
            let limit = max_n()?;
            if *n > limit {
                return Err(CliError::Domain(core::Error::SizeLimit { n: *n, limit }));
            }
            let opts = SearchOptions {
                n: *n,
                irreducible_only: !include_reducible,
                exclude_permutation_matrices: *exclude_permutations,
                max_matrices: *max_matrices,
                max_class_size: *max,
                threads,
            };
            let report = core::run_search(&opts)?;
            let mut text = format!(
                "n {}\ncomplete {}\ncanonical classes {}\ncandidates {}\ncounterexample pairs {}\n",
                report.n,
                report.complete,
                report.stats.canonical_classes,
                report.stats.candidates,
                report.counterexample_pairs.len()
            );
            for (a, b) in &report.counterexample_pairs {
                let _ = writeln!(text, "{} {}", inline(a), inline(b));
            }
            if !report.undecided_pairs.is_empty() {
                let _ = writeln!(text, "undecided pairs {}", report.undecided_pairs.len());
                for (a, b) in &report.undecided_pairs {
                    let _ = writeln!(text, "{} {}", inline(a), inline(b));
                }
            }
            Ok(Outcome {
                inputs: vec![to_value(&opts)?],
                result: to_value(&report)?,
                text,
                visited: report.stats.candidates as u64,
            })
        }
    }
}

fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|j| mask >> j & 1 == 1).collect()
}
