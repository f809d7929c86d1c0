//! `majorant` command-line front end.
//!
//! Every subcommand prints one JSON document. Exit status is 0 when the
//! computed check holds, 1 when it reports a violation, and 2 on bad input or
//! an arithmetic error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use majorant::harness::{verify_thm_easy, verify_thm_enough, verify_thm_main, Report, Trials};
use majorant::kfunc::{k_l1_linf, k_l1_lq};
use majorant::majorization::{check_sq_premise, hlp_violation, tail_dom_violation};
use majorant::operators::{hlp_transfer, OperatorExpr};
use majorant::procp::{theorem_main_pipeline, PipelineConfig};
use majorant::scalar::{set_tolerance, tolerance};
use majorant::spaces::{space_norm, sq_probe, wfp_probe, SeqGen, SpaceSpec};
use majorant::{Error, Mode, Scalar, Seq};

#[derive(Parser)]
#[command(name = "majorant", version, about = "Majorization, K-functionals and interval decompositions")]
struct Cli {
    /// Arithmetic for parsed inputs and generated trials.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Relative tolerance for float comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CoupleArg {
    #[value(name = "1,inf")]
    L1Linf,
    #[value(name = "1,q")]
    L1Lq,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Sq,
    Hlp,
    Tail,
}

/// Sequences are file paths holding a JSON array of numbers or rational strings,
/// or a `{"mode", "values"}` object. An argument starting with `[` or `{` is read inline.
#[derive(Subcommand)]
enum Command {
    /// Nonincreasing rearrangement of absolute values.
    Rearrange {
        #[arg(long)]
        x: String,
    },
    /// K-functional of `x` at `t`.
    Kfunc {
        #[arg(long, value_enum)]
        couple: CoupleArg,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long)]
        t: String,
        #[arg(long)]
        x: String,
    },
    /// Head-sum and power-sum domination checks.
    Majorize {
        #[command(subcommand)]
        action: MajorizeCmd,
    },
    /// Average of signed permutations sending `x` to `y`.
    Transfer {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Interval decomposition of a K-dominated pair.
    Procp {
        #[command(subcommand)]
        action: ProcpCmd,
    },
    /// Norms and probes for sequence spaces.
    Space {
        #[command(subcommand)]
        action: SpaceCmd,
    },
    /// Randomized theorem checks with replayable witnesses.
    Verify {
        #[command(subcommand)]
        action: VerifyCmd,
    },
}

#[derive(Subcommand)]
enum MajorizeCmd {
    /// `sq`: head q-power domination of u by v with equal totals.
    /// `hlp`: head sums of v at most those of u.
    /// `tail`: tail q-power sums of v at most those of u.
    Check {
        #[arg(long, value_enum)]
        kind: CheckKind,
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long)]
        u: String,
        #[arg(long)]
        v: String,
    },
}

#[derive(Subcommand)]
enum ProcpCmd {
    /// Decompose `g = y*` against `f = (1+ε)C(q)x*` and print the ledger.
    Run {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long, default_value = "1/1024")]
        eps: String,
    },
}

#[derive(Subcommand)]
enum SpaceCmd {
    /// Norm of `x`; spaces are `l1`, `lp:P`, `weak-lp:P`, `weak-lp-sep:P`.
    Norm {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long)]
        x: String,
    },
    /// Randomized search for failures of q-power head-domination transfer.
    SqProbe {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long)]
        q: f64,
        #[arg(long = "C", visible_alias = "c", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Truncated norms of `n^{-s}` or `r^{n-1}` up to `n_max` terms.
    Wfp {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long, conflicts_with = "geometric")]
        power_law: Option<f64>,
        #[arg(long)]
        geometric: Option<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        n_max: usize,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Probe q-power head-domination pairs for `‖v‖ > C‖u‖`.
    ThmEasy {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[command(flatten)]
        window: Window,
    },
    /// Run the decomposition pipeline on contraction images `y = Tx`.
    ThmMain {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long, default_value = "1")]
        c1: String,
        #[arg(long, default_value = "1")]
        c2: String,
        #[command(flatten)]
        window: Window,
    },
    /// Cut K-dominated pairs and rebuild them from exact transfers.
    ThmEnough {
        #[arg(long)]
        space: SpaceSpec,
        #[arg(long, default_value = "2")]
        q: String,
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long, default_value = "1")]
        r: String,
        #[command(flatten)]
        window: Window,
    },
}

#[derive(clap::Args)]
struct Window {
    #[arg(long, default_value_t = 500)]
    trials: usize,
    /// First trial index; a witness's replay command sets this.
    #[arg(long, default_value_t = 0)]
    start: usize,
}

/// A JSON result and whether its check held.
struct Outcome {
    value: Value,
    holds: bool,
}

impl Outcome {
    fn holds(value: Value) -> Self {
        Outcome { value, holds: true }
    }
}

fn read_seq(arg: &str, mode: Mode) -> Result<Seq, Error> {
    let text = if arg.trim_start().starts_with(['[', '{']) {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| Error::Parse(format!("{arg}: {e}")))?
    };
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{arg}: {e}")))?;
    let seq = match value {
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::String(s) => parse_scalar(s, mode),
                Value::Number(n) => parse_scalar(&n.to_string(), mode),
                other => Err(Error::Parse(format!("bad sequence entry {other}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Seq::new)?,
        obj @ Value::Object(_) => serde_json::from_value::<Seq>(obj).map_err(|e| Error::Parse(e.to_string()))?,
        other => return Err(Error::Parse(format!("expected a sequence, got {other}"))),
    };
    Ok(if mode == Mode::Float { seq.in_mode(Mode::Float) } else { seq })
}

fn parse_scalar(s: &str, mode: Mode) -> Result<Scalar, Error> {
    match mode {
        Mode::Exact => Scalar::parse_exact(s),
        Mode::Float => Scalar::parse_float(s),
    }
}

fn trials(window: &Window, seed: u64, mode: Mode) -> Trials {
    Trials {
        start: window.start,
        ..Trials::new(window.trials, seed).with_mode(mode)
    }
}

fn report(r: Report) -> Outcome {
    Outcome {
        holds: r.pass,
        value: serde_json::to_value(&r).expect("report serializes"),
    }
}

fn permutation_json(map: &[Option<(usize, i8)>]) -> Value {
    map.iter()
        .map(|entry| match entry {
            Some((source, sign)) => json!([source, sign]),
            None => Value::Null,
        })
        .collect()
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let mode = Mode::from(cli.mode);
    match &cli.command {
        Command::Rearrange { x } => Ok(Outcome::holds(read_seq(x, mode)?.rearrange().to_json())),
        Command::Kfunc { couple, q, t, x } => {
            let x = read_seq(x, mode)?;
            match couple {
                CoupleArg::L1Linf => {
                    let t = parse_scalar(t, mode)?;
                    if !t.is_positive() {
                        return Err(Error::Parse("t must be positive".into()));
                    }
                    let k = k_l1_linf(&t, &x);
                    Ok(Outcome::holds(json!({"value": k, "lower": k, "upper": k})))
                }
                CoupleArg::L1Lq => {
                    let q = q.ok_or_else(|| Error::Parse("--q is required for 1,q".into()))?;
                    let t = Scalar::parse_float(t)?.to_f64();
                    if !(t > 0.0 && q > 1.0) {
                        return Err(Error::Parse("need t > 0 and q > 1".into()));
                    }
                    let k = k_l1_lq(t, &x, q, tolerance())?;
                    Ok(Outcome::holds(serde_json::to_value(k).expect("estimate serializes")))
                }
            }
        }
        Command::Majorize {
            action: MajorizeCmd::Check { kind, q, u, v },
        } => {
            let (u, v) = (read_seq(u, mode)?, read_seq(v, mode)?);
            let q = parse_scalar(q, mode)?;
            let first_violation = match kind {
                CheckKind::Sq => {
                    let check = check_sq_premise(&u, &v, &q)?;
                    let value = serde_json::to_value(&check).expect("check serializes");
                    return Ok(Outcome {
                        holds: check.holds,
                        value,
                    });
                }
                CheckKind::Hlp => hlp_violation(&u, &v),
                CheckKind::Tail => tail_dom_violation(&u, &v, &q)?,
            };
            Ok(Outcome {
                holds: first_violation.is_none(),
                value: json!({"holds": first_violation.is_none(), "first_violation": first_violation}),
            })
        }
        Command::Transfer { x, y } => {
            let (x, y) = (read_seq(x, mode)?, read_seq(y, mode)?);
            let op = hlp_transfer(&x, &y)?;
            let OperatorExpr::ConvexCombo(terms) = &op else {
                unreachable!("transfer returns a convex combination")
            };
            let image = op.apply(&x)?;
            let dim = image.len().max(y.len());
            let hit = image.padded(dim) == y.padded(dim);
            let check = match (hit, mode) {
                (false, _) => "failed",
                (true, Mode::Exact) => "exact",
                (true, Mode::Float) => "float",
            };
            Ok(Outcome {
                holds: hit,
                value: json!({
                    "weights": terms.iter().map(|(w, _)| w).collect::<Vec<_>>(),
                    "permutations": terms.iter().map(|(_, p)| permutation_json(p.map())).collect::<Vec<_>>(),
                    "check": check,
                }),
            })
        }
        Command::Procp {
            action: ProcpCmd::Run { x, y, q, eps },
        } => {
            let (x, y) = (read_seq(x, mode)?, read_seq(y, mode)?);
            let config = PipelineConfig {
                q: parse_scalar(q, mode)?,
                eps: parse_scalar(eps, mode)?,
                ..PipelineConfig::default()
            };
            let out = theorem_main_pipeline(&x, &y, &config, &[])?;
            Ok(Outcome::holds(serde_json::to_value(&out).expect("outcome serializes")))
        }
        Command::Space { action } => match action {
            SpaceCmd::Norm { space, x } => {
                let x = read_seq(x, mode)?;
                Ok(Outcome::holds(json!({"space": space, "norm": space_norm(space, &x)})))
            }
            SpaceCmd::SqProbe { space, q, c, trials } => {
                if !(*q > 1.0 && *c >= 1.0) {
                    return Err(Error::Parse("need q > 1 and C ≥ 1".into()));
                }
                let probe = sq_probe(space, *q, *c, *trials, cli.seed);
                Ok(Outcome {
                    holds: probe.violations.is_empty(),
                    value: serde_json::to_value(&probe).expect("probe serializes"),
                })
            }
            SpaceCmd::Wfp {
                space,
                power_law,
                geometric,
                n_max,
            } => {
                let gen = match (power_law, geometric) {
                    (Some(s), None) if *s > 0.0 => SeqGen::PowerLaw { s: *s },
                    (None, Some(r)) if *r > 0.0 && *r < 1.0 => SeqGen::Geometric { r: *r },
                    _ => return Err(Error::Parse("give --power-law s > 0 or --geometric r in (0, 1)".into())),
                };
                if *n_max == 0 {
                    return Err(Error::Parse("--n-max must be positive".into()));
                }
                let probe = wfp_probe(space, &gen, *n_max);
                Ok(Outcome::holds(serde_json::to_value(&probe).expect("probe serializes")))
            }
        },
        Command::Verify { action } => Ok(match action {
            VerifyCmd::ThmEasy { space, p, q, c, window } => {
                if !(1.0 <= *p && p < q && *c >= 1.0) {
                    return Err(Error::Parse("need 1 ≤ p < q and C ≥ 1".into()));
                }
                report(verify_thm_easy(space, *p, *q, *c, trials(window, cli.seed, mode)))
            }
            VerifyCmd::ThmMain { space, q, c1, c2, window } => report(verify_thm_main(
                space,
                &Scalar::parse_exact(q)?,
                &Scalar::parse_exact(c1)?,
                &Scalar::parse_exact(c2)?,
                trials(window, cli.seed, mode),
            )),
            VerifyCmd::ThmEnough { space, q, c, r, window } => report(verify_thm_enough(
                space,
                &Scalar::parse_exact(q)?,
                &Scalar::parse_exact(c)?,
                &Scalar::parse_exact(r)?,
                trials(window, cli.seed, mode),
            )),
        }),
    }
}

fn emit(value: &Value, path: Option<&PathBuf>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).expect("JSON value serializes");
    match path {
        Some(p) => std::fs::write(p, text + "\n"),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                // A closed pipe means the reader has what it wanted.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other,
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol >= 0.0) {
            eprintln!("error: --tol must be a finite nonnegative number");
            return ExitCode::from(2);
        }
        set_tolerance(tol);
    }
    let (value, code) = match run(&cli) {
        Ok(out) => (out.value, if out.holds { 0 } else { 1 }),
        // A failed decomposition check is a finding, not a usage problem.
        Err(e @ Error::InvariantViolation { .. }) => (json!({"error": e.to_string()}), 1),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&value, cli.json.as_ref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}
