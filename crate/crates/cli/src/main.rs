//! `s2det`: S2-determinants and S2-triangular matrix algebra on JSON files.
//!
//! Every command prints one JSON document on stdout. Exit status is 0 on
//! success, 1 for a mathematical or budget error, and 2 for unreadable or
//! malformed input.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use s2det::combinat::{edges, enumerate_partitions, EdgePair, EnumConfig, EnumMode};
use s2det::dets2::{det_s2_rational, det_s2_upper_fast};
use s2det::leg_algebra::{
    assemble, leg_submatrices, lim_multiply, parametric_back_substitution, s2_lu, LegDecomposition,
};
use s2det::matrix::{ind_of, is_s2_lower, is_s2_upper, s2_diagonal};
use s2det::signmap::{build_sign_table, SignTable};
use s2det::verify::{self, VerifyConfig};
use s2det::{Matrix, Rational};

#[derive(Parser)]
#[command(
    name = "s2det",
    version,
    about = "S2-determinants over exact rationals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Homogeneous cycle-free edge d-partitions of K_{2d}, in canonical order.
    Enum {
        #[arg(long)]
        d: usize,
        /// Print only `{"count": N}`.
        #[arg(long)]
        count_only: bool,
        /// Write the partition list here and print the count.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sign table built by breadth-first search over involutions.
    Signs {
        #[arg(long)]
        d: usize,
        /// Write the table here and print a summary.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// S2-determinant of a matrix.
    Det {
        matrix: PathBuf,
        /// Closed form for S2-triangular matrices.
        #[arg(long, conflicts_with = "signs")]
        fast: bool,
        /// Use a sign table from `s2det signs --out` instead of building one.
        #[arg(long)]
        signs: Option<PathBuf>,
    },
    /// S2-diagonal of a matrix.
    Diag { matrix: PathBuf },
    /// S2-upper / S2-lower triangularity.
    Check {
        matrix: PathBuf,
        /// Exit 1 unless the matrix is S2-upper triangular.
        #[arg(long)]
        upper: bool,
        /// Exit 1 unless the matrix is S2-lower triangular.
        #[arg(long)]
        lower: bool,
    },
    /// Leg Identifying Multiplication A ⊙ B.
    Lim { a: PathBuf, b: PathBuf },
    /// S2-LU factorization A = L ⊙ U.
    Lu { matrix: PathBuf },
    /// Leg submatrices of a matrix, or the matrix of a decomposition.
    Legs {
        input: PathBuf,
        /// Read a decomposition and print the assembled matrix.
        #[arg(long)]
        assemble: bool,
    },
    /// Center variables of A x = b for S2-upper A, in terms of the others.
    Solve {
        matrix: PathBuf,
        /// Right-hand side, comma separated (`1,-2/3,5`).
        #[arg(long, allow_hyphen_values = true)]
        rhs: String,
    },
    /// Run the check suite for one width.
    Verify {
        #[arg(long)]
        d: usize,
        /// Allow d = 4: table-dependent checks are skipped if the budget runs out.
        #[arg(long)]
        best_effort: bool,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((payload, ok)) => {
            println!("{payload}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 1 for library errors about the mathematics or the budget, 2 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<s2det::Error>() {
        Some(s2det::Error::Parse(_)) | None => 2,
        Some(_) => 1,
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_input(path)?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn to_value(v: &impl Serialize) -> Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn parse_rhs(s: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Rational>()
                .map_err(|_| s2det::Error::Parse(format!("not a rational: {t:?}")).into())
        })
        .collect()
}

fn edge_name(e: EdgePair) -> String {
    e.to_string()
}

/// Payload plus whether the command succeeded.
fn run(command: Command) -> Result<(Value, bool)> {
    let config = EnumConfig::from_env();
    let payload = match command {
        Command::Enum { d, count_only, out } => {
            let parts = enumerate_partitions(d, EnumMode::HomogeneousCycleFree, &config)?;
            if let Some(path) = out {
                write_json(&path, &parts)?;
                json!({ "count": parts.len() })
            } else if count_only {
                json!({ "count": parts.len() })
            } else {
                to_value(&parts)?
            }
        }
        Command::Signs { d, out } => {
            let table = build_sign_table(d, &config)?;
            match out {
                Some(path) => {
                    write_json(&path, &table)?;
                    json!({
                        "d": d,
                        "count": table.len(),
                        "consistent": table.consistent(),
                        "connected": table.connected(),
                        "orbit_count": table.orbit_count(),
                    })
                }
                None => to_value(&table)?,
            }
        }
        Command::Det {
            matrix,
            fast,
            signs,
        } => {
            let a: Matrix = read_json(&matrix)?;
            if fast {
                json!({ "det": det_s2_upper_fast(&a)?.to_string() })
            } else {
                let table: SignTable = match signs {
                    Some(path) => read_json(&path)?,
                    None => build_sign_table(a.d(), &config)?,
                };
                let r = det_s2_rational(&a, &table)?;
                let mut out = json!({ "det": r.value.to_string() });
                if let Some(c) = r.table_caveat {
                    out["caveat"] = to_value(&c)?;
                }
                out
            }
        }
        Command::Diag { matrix } => {
            let a: Matrix = read_json(&matrix)?;
            let diag = s2_diagonal(&a);
            let entries: Vec<Value> = edges(a.d())
                .map(|e| {
                    json!({
                        "edge": edge_name(e),
                        "row": ind_of(e),
                        "value": diag.get(e).to_string(),
                    })
                })
                .collect();
            let set: Vec<String> = diag.value_set().iter().map(|v| v.to_string()).collect();
            json!({ "entries": entries, "set": set, "product": diag.product().to_string() })
        }
        Command::Check {
            matrix,
            upper,
            lower,
        } => {
            let a: Matrix = read_json(&matrix)?;
            let (is_upper, is_lower) = (is_s2_upper(&a), is_s2_lower(&a));
            let ok = (!upper || is_upper) && (!lower || is_lower);
            return Ok((json!({ "upper": is_upper, "lower": is_lower }), ok));
        }
        Command::Lim { a, b } => {
            let (a, b): (Matrix, Matrix) = (read_json(&a)?, read_json(&b)?);
            to_value(&lim_multiply(&a, &b)?)?
        }
        Command::Lu { matrix } => {
            let a: Matrix = read_json(&matrix)?;
            let (l, u) = s2_lu(&a)?;
            json!({ "L": to_value(&l)?, "U": to_value(&u)? })
        }
        Command::Legs {
            input,
            assemble: inverse,
        } => {
            if inverse {
                let dec: LegDecomposition<Rational> = read_json(&input)?;
                to_value(&assemble(&dec)?)?
            } else {
                let a: Matrix = read_json(&input)?;
                to_value(&leg_submatrices(&a))?
            }
        }
        Command::Solve { matrix, rhs } => {
            let a: Matrix = read_json(&matrix)?;
            let b = parse_rhs(&rhs)?;
            let sol = parametric_back_substitution(&a, &b)?;
            let centers: Vec<Value> = (1..=a.d())
                .map(|k| {
                    let expr = sol.center(k);
                    let terms: Vec<Value> = expr
                        .terms()
                        .into_iter()
                        .map(|(e, c)| json!({ "variable": edge_name(e), "coefficient": c.to_string() }))
                        .collect();
                    json!({
                        "variable": edge_name(EdgePair { i: 2 * k - 1, j: 2 * k }),
                        "constant": expr.constant.to_string(),
                        "terms": terms,
                    })
                })
                .collect();
            json!({ "centers": centers })
        }
        Command::Verify {
            d,
            best_effort,
            trials,
            seed,
        } => {
            if trials == 0 {
                bail!("--trials must be positive");
            }
            let cfg = VerifyConfig {
                trials,
                seed,
                enumeration: config,
                best_effort,
                ..VerifyConfig::default()
            };
            let report = verify::run(d, &cfg)?;
            for c in &report.checks {
                eprintln!("{:?} {}: {}", c.status, c.name, c.detail);
            }
            return Ok((to_value(&report)?, report.passed()));
        }
    };
    Ok((payload, true))
}
