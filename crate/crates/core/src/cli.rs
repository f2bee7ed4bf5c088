//! The `equimeasure` command line.
//!
//! Exit codes: 0 on success, 1 when a report carries a FAIL verdict, 2 for
//! usage or input errors, 3 when an internal consistency check trips.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::arith::rational::parse_rational;
use crate::arith::{Field, FieldElement};
use crate::catalog::{self, Params};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::graph::analyze_graph;
use crate::identities::{check_counterexample_triple, check_main1_relations, CertificateReport};
use crate::io::json::{field_from_value, map_from_value, map_to_value};
use crate::io::{parse_map_input, shorthand};
use crate::map::RationalMap;
use crate::measure::{julia_raster, same_measure_test, Window};
use crate::powermap::{self, RootOfUnity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "equimeasure", version, about = "Certificates for rational maps sharing a measure of maximal entropy")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Coefficient field: `Q`, `Q(w)` with w^2+w+1 = 0, `Q(i)`, or minimal
    /// polynomial coefficients `c0,c1,...,1` (generator bound as `alpha`).
    #[arg(long, default_value = "Q")]
    field: String,
    /// Binds a shorthand symbol to an exact constant, e.g. `--sym a=1/2`.
    #[arg(long = "sym", value_name = "NAME=VALUE")]
    syms: Vec<String>,
    /// Largest composite degree built exactly.
    #[arg(long, default_value_t = 4096)]
    degree_budget: u64,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Components of the graph curve G(x) = G(y) with bidegree, genus and exact factors.
    AnalyzeGraph {
        /// Map as shorthand (`z^3-3z`), inline JSON or a JSON file.
        #[arg(long)]
        map: String,
        #[command(flatten)]
        common: Common,
    },
    /// Exact composition certificates for a triple {R, S, T} and/or a pair {F, G}.
    Certify {
        /// JSON object (inline or file) with keys R, S, T and/or F, G and an optional field.
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        t: Option<String>,
        #[arg(long = "F")]
        big_f: Option<String>,
        #[arg(long = "G")]
        big_g: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Compares the empirical maximal-entropy measures of two maps.
    Measure {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, default_value_t = 20_000)]
        count: usize,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Julia-set raster from binned backward orbits, as binary PPM.
    Render {
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 400)]
        width: usize,
        #[arg(long, default_value_t = 400)]
        height: usize,
        /// Half-width of the square window centred at 0.
        #[arg(long, default_value_t = 2.5)]
        half: f64,
        #[arg(long, default_value_t = 20_000)]
        count: usize,
        #[arg(long, default_value_t = 40)]
        depth: usize,
        #[arg(long, default_value_t = 10)]
        burn_in: usize,
        /// With `--out` the PPM goes to the file and a JSON summary to stdout.
        #[command(flatten)]
        common: Common,
    },
    /// Whether z^df and z^dg have the same periodic points.
    Powermap {
        #[arg(long)]
        df: u64,
        #[arg(long)]
        dg: u64,
        /// Roots of unity `a/b` to classify; defaults to 1/2^k for k = 1..10.
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Built-in example families.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Exact composition f∘g.
    Compose {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[command(flatten)]
        common: Common,
    },
    /// Exact iterate f^n.
    Iterate {
        #[arg(long)]
        f: String,
        #[arg(long)]
        n: u32,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// Lists entries with a one-line description.
    List,
    /// Runs an entry at its default parameters, or at the given ones.
    Run {
        name: String,
        /// Flower parameter in Q(w), e.g. `1+w`.
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        d: Option<usize>,
        /// Quadratic map for `quadratic-sigma`.
        #[arg(long)]
        f: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

/// What a subcommand produced.
enum Output {
    Json { value: Value, failed: bool, out: Option<PathBuf> },
    Bytes { bytes: Vec<u8>, out: Option<PathBuf>, summary: Option<Value> },
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Reports go to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(cli.command).and_then(|o| emit(o, stdout)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_internal() {
        EXIT_INTERNAL
    } else {
        EXIT_USAGE
    }
}

fn emit(output: Output, stdout: &mut dyn Write) -> Result<i32> {
    match output {
        Output::Json { value, failed, out } => {
            let mut text = serde_json::to_string_pretty(&value)?;
            text.push('\n');
            write_to(out.as_deref(), text.as_bytes(), stdout)?;
            Ok(if failed { EXIT_FAIL } else { EXIT_OK })
        }
        Output::Bytes { bytes, out, summary } => {
            write_to(out.as_deref(), &bytes, stdout)?;
            if let (Some(_), Some(s)) = (&out, summary) {
                let mut text = serde_json::to_string_pretty(&s)?;
                text.push('\n');
                stdout.write_all(text.as_bytes())?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_to(path: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

/// `Q`, `Q(w)`, `Q(i)` or comma-separated minimal polynomial coefficients,
/// with the name the generator is bound to in shorthand.
pub fn parse_field(spec: &str) -> Result<(Field, Option<&'static str>)> {
    let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    match s.as_str() {
        "Q" | "q" => Ok((Field::rational(), None)),
        "Q(w)" | "Q(omega)" | "eisenstein" => Ok((Field::eisenstein(), Some("w"))),
        "Q(i)" | "gaussian" => Ok((Field::gaussian(), Some("i"))),
        _ => {
            let coeffs = s
                .split(',')
                .enumerate()
                .map(|(k, c)| parse_rational(c).map_err(|_| Error::parse(format!("--field entry {k}"), format!("bad rational {c:?}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok((Field::configure(&coeffs)?, Some("alpha")))
        }
    }
}

struct Context {
    field: Field,
    symbols: BTreeMap<String, FieldElement>,
    config: RunConfig,
    out: Option<PathBuf>,
}

impl Context {
    fn new(common: &Common) -> Result<Context> {
        let (field, generator) = parse_field(&common.field)?;
        let mut symbols = BTreeMap::new();
        if let Some(name) = generator {
            symbols.insert(name.to_string(), field.generator());
        }
        for binding in &common.syms {
            let (name, value) = binding
                .split_once('=')
                .ok_or_else(|| Error::parse("--sym", format!("expected NAME=VALUE, got {binding:?}")))?;
            let value = shorthand::parse_constant(value, &field, &symbols)
                .map_err(|e| Error::parse(format!("--sym {name}"), e.to_string()))?;
            symbols.insert(name.trim().to_string(), value);
        }
        let config = RunConfig {
            seed: common.seed,
            degree_budget: common.degree_budget,
            ..RunConfig::default()
        };
        config.validate()?;
        Ok(Context {
            field,
            symbols,
            config,
            out: common.out.clone(),
        })
    }

    /// Inline JSON, a JSON or shorthand file, or inline shorthand.
    fn map(&self, arg: &str, what: &str) -> Result<RationalMap> {
        let text = if !arg.trim_start().starts_with('{') && Path::new(arg).is_file() {
            std::fs::read_to_string(arg)?
        } else {
            arg.to_string()
        };
        parse_map_input(text.trim(), &self.field, &self.symbols).map_err(|e| annotate(e, what))
    }

    fn json(&self, value: Value, failed: bool) -> Output {
        Output::Json {
            value,
            failed,
            out: self.out.clone(),
        }
    }
}

fn annotate(e: Error, what: &str) -> Error {
    match e {
        Error::Parse { position, message } => Error::Parse {
            position: format!("{what}, {position}"),
            message,
        },
        other => other,
    }
}

fn execute(command: Command) -> Result<Output> {
    match command {
        Command::AnalyzeGraph { map, common } => {
            let ctx = Context::new(&common)?;
            let g = ctx.map(&map, "--map")?;
            let analysis = analyze_graph(&g, &ctx.config)?;
            Ok(ctx.json(analysis.to_value(&ctx.config), false))
        }
        Command::Certify { input, r, s, t, big_f, big_g, common } => {
            let mut ctx = Context::new(&common)?;
            let mut maps: BTreeMap<&str, RationalMap> = BTreeMap::new();
            if let Some(input) = input {
                let text = if !input.trim_start().starts_with('{') && Path::new(&input).is_file() {
                    std::fs::read_to_string(&input)?
                } else {
                    input
                };
                let v: Value = serde_json::from_str(&text).map_err(|e| {
                    Error::parse(format!("--input line {} column {}", e.line(), e.column()), e.to_string())
                })?;
                if let Some(fv) = v.get("field") {
                    ctx.field = field_from_value(fv, "--input.field")?;
                }
                for key in ["R", "S", "T", "F", "G"] {
                    let Some(m) = v.get(key) else { continue };
                    let path = format!("--input.{key}");
                    let map = match m {
                        Value::String(s) => parse_map_input(s, &ctx.field, &ctx.symbols).map_err(|e| annotate(e, &path))?,
                        other => map_from_value(other, &path)?,
                    };
                    maps.insert(key, map);
                }
            }
            for (key, arg) in [("R", r), ("S", s), ("T", t), ("F", big_f), ("G", big_g)] {
                if let Some(a) = arg {
                    maps.insert(key, ctx.map(&a, &format!("--{key}"))?);
                }
            }
            let triple = ["R", "S", "T"].iter().filter(|k| maps.contains_key(*k)).count();
            let pair = ["F", "G"].iter().filter(|k| maps.contains_key(*k)).count();
            if (triple != 0 && triple != 3) || (pair != 0 && pair != 2) || triple + pair == 0 {
                return Err(Error::Precondition("certify needs all of R, S, T and/or both F, G".into()));
            }
            let mut report = CertificateReport::default();
            if triple == 3 {
                let mut rng = ctx.config.rng("identities.fiber");
                report.extend(check_counterexample_triple(&maps["R"], &maps["S"], &maps["T"], &mut rng)?);
            }
            if pair == 2 {
                report.extend(check_main1_relations(&maps["F"], &maps["G"])?);
            }
            let failed = report.any_fail();
            let inputs: serde_json::Map<String, Value> =
                maps.iter().map(|(k, m)| (k.to_string(), map_to_value(m))).collect();
            Ok(ctx.json(
                json!({
                    "inputs": inputs,
                    "claims": report.claims,
                    "seed": ctx.config.seed,
                    "config": ctx.config,
                }),
                failed,
            ))
        }
        Command::Measure { f, g, count, depth, common } => {
            let mut ctx = Context::new(&common)?;
            ctx.config.cloud_count = count;
            ctx.config.cloud_depth = depth;
            let (f, g) = (ctx.map(&f, "--f")?, ctx.map(&g, "--g")?);
            let report = same_measure_test(&f, &g, count, depth, ctx.config.seed)?;
            Ok(ctx.json(
                json!({
                    "f": map_to_value(&f),
                    "g": map_to_value(&g),
                    "report": report,
                    "seed": ctx.config.seed,
                    "config": ctx.config,
                }),
                false,
            ))
        }
        Command::Render { map, width, height, half, count, depth, burn_in, common } => {
            let mut ctx = Context::new(&common)?;
            ctx.config.cloud_count = count;
            ctx.config.cloud_depth = depth;
            ctx.config.burn_in = burn_in;
            let f = ctx.map(&map, "--map")?;
            let window = Window::square(half);
            let raster = julia_raster(&f, width, height, window, count, depth, burn_in, ctx.config.seed)?;
            let summary = json!({
                "map": map_to_value(&f),
                "width": width,
                "height": height,
                "window": window,
                "lit_fraction": raster.lit_fraction(),
                "seed": ctx.config.seed,
                "config": ctx.config,
            });
            Ok(Output::Bytes {
                bytes: raster.to_ppm(),
                out: ctx.out,
                summary: Some(summary),
            })
        }
        Command::Powermap { df, dg, points, out } => {
            let points = if points.is_empty() {
                (1..=10).map(|k| RootOfUnity::new(1, 1 << k)).collect::<Result<Vec<_>>>()?
            } else {
                points.iter().map(|p| parse_root(p)).collect::<Result<Vec<_>>>()?
            };
            let report = powermap::report(df, dg, &points)?;
            Ok(Output::Json {
                value: serde_json::to_value(report)?,
                failed: false,
                out,
            })
        }
        Command::Catalog { action: CatalogAction::List } => Ok(Output::Json {
            value: Value::Array(
                catalog::NAMES
                    .iter()
                    .map(|n| json!({ "name": n, "description": catalog::describe(n) }))
                    .collect(),
            ),
            failed: false,
            out: None,
        }),
        Command::Catalog {
            action: CatalogAction::Run { name, a, n, m, d, f, common },
        } => {
            let mut ctx = Context::new(&common)?;
            let params = catalog_params(&mut ctx, &name, a, n, m, d, f)?;
            let mut runs = Vec::with_capacity(params.len());
            for p in &params {
                runs.push(catalog::run_entry(&catalog::entry(p)?, &ctx.config)?);
            }
            let failed = runs.iter().any(|r| r.report.any_fail());
            let all_match = runs.iter().all(|r| r.matches_expected);
            Ok(ctx.json(
                json!({
                    "entry": name,
                    "runs": runs,
                    "all_match_expected": all_match,
                    "seed": ctx.config.seed,
                    "config": ctx.config,
                }),
                failed,
            ))
        }
        Command::Compose { f, g, common } => {
            let ctx = Context::new(&common)?;
            let (f, g) = (ctx.map(&f, "--f")?, ctx.map(&g, "--g")?);
            let degree = f.degree() as u128 * g.degree() as u128;
            if degree > ctx.config.degree_budget as u128 {
                return Err(Error::Budget {
                    what: "composition".into(),
                    needed: degree,
                    limit: ctx.config.degree_budget as u128,
                });
            }
            let h = f.compose(&g)?;
            Ok(ctx.json(map_report(&h, &ctx.config), false))
        }
        Command::Iterate { f, n, common } => {
            let ctx = Context::new(&common)?;
            let f = ctx.map(&f, "--f")?;
            let h = f.iterate(n, ctx.config.degree_budget as u128)?;
            Ok(ctx.json(map_report(&h, &ctx.config), false))
        }
    }
}

fn map_report(h: &RationalMap, config: &RunConfig) -> Value {
    json!({
        "map": map_to_value(h),
        "display": h.to_string(),
        "degree": h.degree(),
        "digest": h.digest(),
        "seed": config.seed,
        "config": config,
    })
}

fn parse_root(s: &str) -> Result<RootOfUnity> {
    let (a, b) = s
        .trim()
        .split_once('/')
        .ok_or_else(|| Error::parse(format!("--points {s:?}"), "expected a/b"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| Error::parse(format!("--points {s:?}"), format!("bad integer {t:?}")))
    };
    RootOfUnity::reduced(parse(a)?, parse(b)?)
}

fn catalog_params(
    ctx: &mut Context,
    name: &str,
    a: Option<String>,
    n: Option<u32>,
    m: Option<u32>,
    d: Option<usize>,
    f: Option<String>,
) -> Result<Vec<Params>> {
    let explicit = a.is_some() || n.is_some() || m.is_some() || d.is_some() || f.is_some();
    if !explicit {
        return catalog::default_params(name);
    }
    Ok(vec![match name {
        "chebyshev-flower" => {
            let k = Field::eisenstein();
            let mut syms = ctx.symbols.clone();
            syms.insert("w".into(), k.generator());
            let src = a.ok_or_else(|| Error::Precondition("chebyshev-flower takes --a".into()))?;
            Params::ChebyshevFlower {
                a: shorthand::parse_constant(&src, &k, &syms).map_err(|e| annotate(e, "--a"))?,
            }
        }
        "zieve-family" => Params::Zieve {
            n: n.ok_or_else(|| Error::Precondition("zieve-family takes --n and --m".into()))?,
            m: m.ok_or_else(|| Error::Precondition("zieve-family takes --n and --m".into()))?,
        },
        "power-map" => Params::PowerMap {
            d: d.ok_or_else(|| Error::Precondition("power-map takes --d".into()))?,
        },
        "quadratic-sigma" => {
            let src = f.ok_or_else(|| Error::Precondition("quadratic-sigma takes --f".into()))?;
            Params::QuadraticSigma { f: ctx.map(&src, "--f")? }
        }
        other => {
            return Err(Error::Precondition(format!(
                "unknown catalog entry {other:?}; expected one of {}",
                catalog::NAMES.join(", ")
            )))
        }
    }])
}
