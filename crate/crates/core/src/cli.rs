//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::arith::prime_power;
use crate::compare::{compare_generalized, default_grid, run_suite, Suite, SuiteReport};
use crate::critgrp::{
    all_blocks, critical_group, m0_divisors, m0_divisors_local, p_rank_formula, smith_group_formula,
    spanning_trees, Method, SNF_DEFAULT_LIMIT,
};
use crate::digits::CarryContext;
use crate::error::{Error, Result};
use crate::ffield::{FieldTable, GraphKind};
use crate::gring::GaloisRing;
use crate::graphs::{adjacency, generalized, laplacian, write_matrix_market, IntMatrix};
use crate::zlinalg::{big_to_string, rank_mod_p, smith_normal_form, AbelianGroup};

#[derive(Debug, Parser)]
#[command(name = "peisert", version, about = "Smith and critical groups of Peisert and Paley graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Matrixmarket,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphArg {
    Peisert,
    Paley,
}

impl From<GraphArg> for GraphKind {
    fn from(g: GraphArg) -> Self {
        match g {
            GraphArg::Peisert => GraphKind::Peisert,
            GraphArg::Paley => GraphKind::Paley,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Formula,
    Snf,
    Both,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Formula => Method::Formula,
            MethodArg::Snf => Method::Snf,
            MethodArg::Both => Method::Both,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Carries,
    Stickelberger,
    Action,
    Blocks,
    Berndt,
    Canon,
    M0,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Carries => Suite::Carries,
            SuiteArg::Stickelberger => Suite::Stickelberger,
            SuiteArg::Action => Suite::Action,
            SuiteArg::Blocks => Suite::Blocks,
            SuiteArg::Berndt => Suite::Berndt,
            SuiteArg::Canon => Suite::Canon,
            SuiteArg::M0 => Suite::M0,
        }
    }
}

/// `--q Q`, or `--p P` with `--t T` meaning `q = P^{2T}`.
#[derive(Debug, Clone, Args)]
struct Order {
    #[arg(long, conflicts_with_all = ["p", "t"])]
    q: Option<u64>,
    #[arg(long, requires = "t")]
    p: Option<u64>,
    #[arg(long, requires = "p")]
    t: Option<u32>,
}

impl Order {
    /// `(p, n)` with `q = p^n`.
    fn resolve(&self) -> Result<(u64, u32)> {
        match (self.q, self.p, self.t) {
            (Some(q), _, _) => prime_power(q)
                .ok_or_else(|| Error::InvalidParameter(format!("q = {q} is not a prime power"))),
            (None, Some(p), Some(t)) if t > 0 => Ok((p, 2 * t)),
            (None, Some(_), Some(_)) => Err(Error::InvalidParameter("t must be positive".into())),
            _ => Err(Error::InvalidParameter("give --q, or --p with --t".into())),
        }
    }

    fn peisert(&self) -> Result<(u64, u32)> {
        let (p, n) = self.resolve()?;
        CarryContext::new(p, n)?;
        Ok((p, n))
    }

    fn field(&self, kind: GraphKind) -> Result<FieldTable> {
        let (p, n) = match kind {
            GraphKind::Peisert => self.peisert()?,
            GraphKind::Paley => self.resolve()?,
        };
        let f = FieldTable::new(p, n)?;
        f.connection_set(kind)?;
        Ok(f)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Field parameters: modulus, primitive element, connection sets.
    Field {
        #[command(flatten)]
        order: Order,
    },
    /// Critical group of the Laplacian.
    Critgroup {
        #[command(flatten)]
        order: Order,
        #[arg(long, value_enum, default_value_t = GraphArg::Peisert)]
        graph: GraphArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Formula)]
        method: MethodArg,
        /// Allow brute force above the size guard.
        #[arg(long)]
        force: bool,
        /// Leave the per-block reports out of the JSON.
        #[arg(long)]
        no_blocks: bool,
    },
    /// Smith group of the adjacency matrix.
    Smithgroup {
        #[command(flatten)]
        order: Order,
        #[arg(long, value_enum, default_value_t = MethodArg::Formula)]
        method: MethodArg,
        #[arg(long)]
        force: bool,
    },
    /// p-rank of the Laplacian.
    Prank {
        #[command(flatten)]
        order: Order,
        #[arg(long, value_enum, default_value_t = MethodArg::Formula)]
        method: MethodArg,
        #[arg(long)]
        force: bool,
    },
    /// Number of spanning trees.
    Trees {
        #[command(flatten)]
        order: Order,
    },
    /// Per-class elementary divisors of the Laplacian.
    Blocks {
        #[command(flatten)]
        order: Order,
        /// Also eliminate each block over the Galois ring.
        #[arg(long)]
        local: bool,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Run a property suite.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[command(flatten)]
        order: Order,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Paley against Peisert at q = p^2.
    Compare {
        #[arg(long)]
        p: u64,
        /// Sample triples `a,b,c` separated by `;` (default: a in 1..3, b, c in -2..2).
        #[arg(long)]
        samples: Option<String>,
        #[arg(long)]
        precision: Option<u32>,
    },
    /// Write a matrix of the graph.
    Export {
        #[command(flatten)]
        order: Order,
        #[arg(long, value_enum, default_value_t = GraphArg::Peisert)]
        graph: GraphArg,
        /// `adjacency`, `laplacian` or `generalized:a,b,c`.
        #[arg(long)]
        matrix: String,
    },
}

/// What a subcommand produced.
enum Output {
    Json { value: Value, ok: bool, failure: Option<String> },
    Matrix(IntMatrix, String),
}

fn ok_json(value: Value) -> Output {
    Output::Json { value, ok: true, failure: None }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PathMismatch(_) | Error::UnresolvedTie(_) | Error::PrecisionAmbiguity { .. } => 1,
        _ => 2,
    }
}

/// Parse `argv` (including the program name), run, and return the exit code:
/// 0 on success, 1 on a failed check, 2 on invalid parameters.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let result = pool.install(|| execute(&cli));
    match result.and_then(|out| emit(&cli, out)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn emit(cli: &Cli, out: Output) -> Result<i32> {
    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let code = match out {
        Output::Matrix(m, comment) => {
            write_matrix_market(&m, &comment, &mut sink)?;
            0
        }
        Output::Json { value, ok, failure } => {
            match cli.format {
                Format::Json => {
                    serde_json::to_writer_pretty(&mut sink, &value).map_err(|e| Error::Io(e.to_string()))?;
                    writeln!(sink)?;
                }
                Format::Text => write_text(&mut sink, &value)?,
                Format::Matrixmarket => {
                    return Err(Error::InvalidParameter("matrixmarket output is only for export".into()))
                }
            }
            if let Some(name) = failure {
                eprintln!("verification failed: {name}");
            }
            if ok {
                0
            } else {
                1
            }
        }
    };
    sink.flush()?;
    Ok(code)
}

fn write_text(w: &mut dyn Write, v: &Value) -> Result<()> {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Array(a) if a.len() > 8 => writeln!(w, "{k}: [{} entries]", a.len())?,
                    Value::String(s) => writeln!(w, "{k}: {s}")?,
                    _ => writeln!(w, "{k}: {x}")?,
                }
            }
        }
        other => writeln!(w, "{other}")?,
    }
    Ok(())
}

fn group_json(g: &AbelianGroup) -> Value {
    json!({
        "invariant_factors": g.invariant_factors.iter().map(big_to_string).collect::<Vec<_>>(),
        "free_rank": g.free_rank,
    })
}

fn suite_output(rep: &SuiteReport) -> Output {
    Output::Json {
        value: rep.to_json(),
        ok: rep.passed(),
        failure: rep.first_failure().map(|c| format!("{} ({})", c.name, rep.suite)),
    }
}

fn guard(q: u64, force: bool) -> Result<()> {
    if q > SNF_DEFAULT_LIMIT && !force {
        return Err(Error::InvalidParameter(format!(
            "q = {q} exceeds {SNF_DEFAULT_LIMIT} for brute force; pass --force"
        )));
    }
    Ok(())
}

fn parse_samples(s: &str) -> Result<Vec<(i64, i64, i64)>> {
    s.split(';')
        .filter(|x| !x.trim().is_empty())
        .map(|triple| {
            let v: Vec<i64> = triple
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|e| Error::Parse(format!("{x:?}: {e}"))))
                .collect::<Result<_>>()?;
            match v.as_slice() {
                [a, b, c] => Ok((*a, *b, *c)),
                _ => Err(Error::Parse(format!("expected a,b,c, got {triple:?}"))),
            }
        })
        .collect()
}

fn execute(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Field { order } => {
            let (p, n) = order.resolve()?;
            let f = FieldTable::new(p, n)?;
            let sets: serde_json::Map<String, Value> = [GraphKind::Peisert, GraphKind::Paley]
                .into_iter()
                .filter_map(|k| f.connection_set(k).ok().map(|s| (k.name().to_string(), json!(s.len()))))
                .collect();
            Ok(ok_json(json!({
                "p": p,
                "n": n,
                "q": f.q(),
                "modulus": f.modulus(),
                "beta": f.beta(),
                "connection_set_sizes": sets,
            })))
        }
        Command::Critgroup { order, graph, method, force, no_blocks } => {
            let kind = GraphKind::from(*graph);
            let field = order.field(kind)?;
            let rep = critical_group(&field, kind, (*method).into(), *force)?;
            let failure = rep.checks.iter().find(|(_, &ok)| !ok).map(|(k, _)| k.to_string());
            Ok(Output::Json { value: rep.to_json(!no_blocks)?, ok: rep.passed(), failure })
        }
        Command::Smithgroup { order, method, force } => {
            let (p, n) = order.peisert()?;
            let ctx = CarryContext::new(p, n)?;
            let formula = smith_group_formula(&ctx);
            let brute = || -> Result<AbelianGroup> {
                guard(ctx.q(), *force)?;
                let a = adjacency(&FieldTable::new(p, n)?, GraphKind::Peisert)?;
                Ok(smith_normal_form(&a).cokernel)
            };
            let (group, agree) = match Method::from(*method) {
                Method::Formula => (formula, None),
                Method::Snf => (brute()?, None),
                Method::Both => {
                    let b = brute()?;
                    let same = b == formula;
                    (formula, Some(same))
                }
            };
            let mut v = json!({"q": ctx.q(), "method": Method::from(*method).name(), "smith_group": group_json(&group)});
            if let Some(same) = agree {
                v["paths_agree"] = json!(same);
            }
            let ok = agree.unwrap_or(true);
            Ok(Output::Json { value: v, ok, failure: (!ok).then(|| "paths_agree".to_string()) })
        }
        Command::Prank { order, method, force } => {
            let (p, n) = order.peisert()?;
            let ctx = CarryContext::new(p, n)?;
            let formula = p_rank_formula(&ctx);
            let direct = || -> Result<u64> {
                guard(ctx.q(), *force)?;
                let l = laplacian(&adjacency(&FieldTable::new(p, n)?, GraphKind::Peisert)?)?;
                Ok(rank_mod_p(&l, p) as u64)
            };
            let mut v = json!({"q": ctx.q(), "method": Method::from(*method).name()});
            let mut ok = true;
            match Method::from(*method) {
                Method::Formula => v["p_rank"] = json!(formula),
                Method::Snf => v["p_rank"] = json!(direct()?),
                Method::Both => {
                    let d = direct()?;
                    ok = d == formula;
                    v["p_rank"] = json!(formula);
                    v["rank_mod_p"] = json!(d);
                }
            }
            Ok(Output::Json { value: v, ok, failure: (!ok).then(|| "p_rank".to_string()) })
        }
        Command::Trees { order } => {
            let (p, n) = order.resolve()?;
            let q = prime_power_value(p, n)?;
            let t: BigUint = spanning_trees(q)?;
            Ok(ok_json(json!({"q": q, "spanning_trees": big_to_string(&t)})))
        }
        Command::Blocks { order, local, precision } => {
            let (p, n) = order.peisert()?;
            let ctx = CarryContext::new(p, n)?;
            let blocks = all_blocks(&ctx)?;
            let mut v = json!({
                "q": ctx.q(),
                "blocks": blocks,
                "m0": m0_divisors(&ctx),
            });
            let mut ok = true;
            if *local {
                let g = GaloisRing::new(
                    std::sync::Arc::new(FieldTable::new(p, n)?),
                    precision.unwrap_or(n + 2),
                )?;
                let rep = run_suite(Suite::Blocks, p, n / 2, Some(g.precision()))?;
                ok = rep.passed();
                v["m0_ring"] = serde_json::to_value(m0_divisors_local(&ctx, &g)?).expect("serialises");
                v["checks"] = rep.to_json()["checks"].clone();
            }
            Ok(Output::Json { value: v, ok, failure: (!ok).then(|| "blocks".to_string()) })
        }
        Command::Verify { suite, order, precision } => {
            let (p, n) = order.peisert()?;
            let rep = run_suite((*suite).into(), p, n / 2, *precision)?;
            Ok(suite_output(&rep))
        }
        Command::Compare { p, samples, precision } => {
            let ctx = CarryContext::from_t(*p, 1)?;
            let field = FieldTable::new(*p, 2)?;
            let grid = match samples {
                Some(s) => parse_samples(s)?,
                None => default_grid(),
            };
            let gen = compare_generalized(&field, &grid)?;
            let mut suites = Vec::new();
            for s in [Suite::Canon, Suite::M0, Suite::Berndt] {
                suites.push(run_suite(s, *p, 1, *precision)?);
            }
            let mut failure = (!gen.passed()).then(|| "generalized_snf".to_string());
            for s in &suites {
                if failure.is_none() {
                    failure = s.first_failure().map(|c| format!("{} ({})", c.name, s.suite));
                }
            }
            let ok = failure.is_none();
            let v = json!({
                "q": ctx.q(),
                "passed": ok,
                "generalized": gen.to_json(),
                "suites": suites.iter().map(SuiteReport::to_json).collect::<Vec<_>>(),
            });
            Ok(Output::Json { value: v, ok, failure })
        }
        Command::Export { order, graph, matrix } => {
            if cli.format == Format::Text {
                return Err(Error::InvalidParameter("export writes --format matrixmarket".into()));
            }
            let kind = GraphKind::from(*graph);
            let field = order.field(kind)?;
            let a = adjacency(&field, kind)?;
            let m = match matrix.as_str() {
                "adjacency" => a,
                "laplacian" => laplacian(&a)?,
                other => match other.strip_prefix("generalized:") {
                    Some(rest) => match parse_samples(rest)?.as_slice() {
                        [(x, y, z)] => generalized(&a, *x, *y, *z)?,
                        _ => return Err(Error::InvalidParameter(format!("bad matrix spec {other:?}"))),
                    },
                    None => return Err(Error::InvalidParameter(format!("unknown matrix {other:?}"))),
                },
            };
            let comment = format!("{} graph on GF({}), q = {}, {}", kind.name(), field.q(), field.q(), matrix);
            Ok(Output::Matrix(m, comment))
        }
    }
}

fn prime_power_value(p: u64, n: u32) -> Result<u64> {
    crate::arith::checked_pow(p, n).ok_or_else(|| Error::InvalidParameter(format!("{p}^{n} overflows")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_resolution() {
        let o = Order { q: Some(81), p: None, t: None };
        assert_eq!(o.peisert().unwrap(), (3, 4));
        let o = Order { q: None, p: Some(7), t: Some(1) };
        assert_eq!(o.resolve().unwrap(), (7, 2));
        let bad = Order { q: Some(25), p: None, t: None };
        assert!(bad.peisert().is_err());
        assert!(bad.field(GraphKind::Paley).is_ok());
        assert!(Order { q: Some(12), p: None, t: None }.resolve().is_err());
    }

    #[test]
    fn sample_parsing() {
        assert_eq!(parse_samples("1,0,0;2,-1,3").unwrap(), vec![(1, 0, 0), (2, -1, 3)]);
        assert!(parse_samples("1,2").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["peisert", "trees", "--q", "9"]), 0);
        assert_eq!(run(["peisert", "critgroup", "--q", "25"]), 2);
        assert_eq!(run(["peisert", "bogus"]), 2);
        assert_eq!(run(["peisert", "verify", "--suite", "carries", "--q", "9"]), 0);
    }
}
