use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use ssgraph_cli::analysis::{default_elements, parse_trace, run_analysis, AnalysisParams, AnalysisReport, ElementSpec};
use ssgraph_cli::format::{emit_model, parse_model, LoadError, Model};
use ssgraph_core::models::{build_katsura, build_odometer, KatsuraSpec, OdometerSpec};

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_CLOSURE: u8 = 3;

#[derive(Parser)]
#[command(name = "ssgraph", version, about = "Self-similar k-graph actions: validation, periodicity and KMS states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Model file, or `-` for stdin.
    model: PathBuf,
    /// Sup-norm radius of the searched box in Z^k.
    #[arg(long = "box", default_value_t = 4)]
    box_radius: u32,
    /// Word length of the group elements whose restriction closure is searched.
    #[arg(long = "ball", default_value_t = 3)]
    ball_radius: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Write the JSON report here (`-` for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the k-graph axioms and the action.
    Validate {
        model: PathBuf,
    },
    /// Full report: hypotheses, Perron data, periodicity lattice, KMS simplex.
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// The periodicity lattice.
    Per {
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a KMS state on elements.
    KmsEval {
        #[command(flatten)]
        common: Common,
        /// `haar`, `character:t1,...` or `mixture:w:t1,...;w:t1,...`.
        #[arg(long, default_value = "haar")]
        trace: String,
        /// JSON array of elements; defaults to identity, projections and
        /// periodicity unitaries.
        #[arg(long)]
        elements: Option<PathBuf>,
    },
    /// Emit a built-in model family as a model file.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
}

#[derive(Subcommand)]
enum Family {
    Odometer {
        /// Comma-separated radices, e.g. `2,3`.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    Katsura {
        /// Rows separated by `;`, entries by `,`.
        #[arg(long)]
        t: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

fn read_input(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| Failure::new(EXIT_FAILURE, format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        fs::read(path).map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display())))
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::write(p, text).map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", p.display())))
        }
        _ => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_FAILURE, e.to_string())),
    }
}

fn load(path: &PathBuf) -> Result<Model, Failure> {
    parse_model(&read_input(path)?).map_err(|e| match e {
        LoadError::Parse(issues) => Failure::new(
            EXIT_INVALID,
            issues.iter().map(|i| format!("parse error at {i}")).collect::<Vec<_>>().join("\n"),
        ),
        LoadError::Validation(report) => Failure::new(
            EXIT_INVALID,
            report.issues.iter().map(|i| format!("validation error: {i}")).collect::<Vec<_>>().join("\n"),
        ),
        LoadError::ClosureExceeded(m) => Failure::new(EXIT_CLOSURE, m),
    })
}

fn params(c: &Common) -> AnalysisParams {
    AnalysisParams {
        box_radius: c.box_radius,
        ball_radius: c.ball_radius,
        tol: c.tol,
        ..AnalysisParams::default()
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn fmt_vecs(v: &[Vec<i64>]) -> String {
    format!("{v:?}")
}

fn summary(r: &AnalysisReport) -> String {
    let mut out = Vec::new();
    if let Some(name) = &r.model {
        out.push(format!("model: {name}"));
    }
    out.push(format!(
        "k = {}, {} vertices, {} edges, generators {:?}",
        r.k, r.vertices, r.edges, r.generators
    ));
    let h = &r.hypotheses;
    out.push(format!("strongly connected: {}", h.strongly_connected));
    if let Some(n) = h.closure_size {
        out.push(format!("finite state: closure of the generators has {n} states"));
    }
    if let Some(c) = &h.pseudo_free {
        out.push(format!("pseudo free: {}", c.holds));
    }
    if let Some(c) = &h.locally_faithful {
        out.push(format!("locally faithful: {}", c.holds));
    }
    if let Some(d) = h.degenerate {
        out.push(format!("degenerate property: {}", serde_json::to_value(d).unwrap_or(Value::Null)));
    }
    if let Some(p) = &r.perron {
        out.push(format!("rho = {:?}", p.rho));
    }
    if let Some(l) = &r.periodicity {
        out.push(format!(
            "periodicity lattice: rank {} basis {} (box {}, ball {})",
            l.rank,
            fmt_vecs(&l.basis),
            l.box_radius,
            l.ball_radius
        ));
    }
    if let Some(k) = &r.kms {
        out.push(format!("KMS: {}", k.verdict));
    }
    if let Some(ev) = &r.evaluations {
        for e in &ev.values {
            out.push(format!("phi({}) = {:.12} {:+.12}i", e.element.label, e.re, e.im));
        }
    }
    for e in &r.errors {
        out.push(format!("error in {}: {}", e.stage, e.message));
    }
    out.join("\n") + "\n"
}

fn finish(report: &AnalysisReport, json: Option<&PathBuf>, body: Value) -> Result<u8, Failure> {
    match json {
        Some(p) => {
            write_output(Some(p), &to_json(&body))?;
            if p.as_os_str() != "-" {
                write_output(None, &summary(report))?;
            }
        }
        None => write_output(None, &summary(report))?,
    }
    Ok(if report.closure_exceeded() { EXIT_CLOSURE } else { 0 })
}

fn parse_matrix<T: std::str::FromStr>(s: &str) -> Result<Vec<Vec<T>>, Failure>
where
    T::Err: std::fmt::Display,
{
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<T>()
                        .map_err(|e| Failure::new(EXIT_FAILURE, format!("bad matrix entry {x:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate { model } => {
            let m = load(&model)?;
            let g = m.graph();
            write_output(
                None,
                &format!(
                    "valid: {}-graph with {} vertices, {} edges, {} generators\n",
                    g.k(),
                    g.vertex_count(),
                    g.edge_count(),
                    m.system.generators().len()
                ),
            )?;
            Ok(0)
        }
        Command::Analyze { common } => {
            let m = load(&common.model)?;
            let report = run_analysis(&m.system, m.name().map(String::from), &params(&common), None);
            let body = serde_json::to_value(&report).expect("report serializes");
            finish(&report, common.json.as_ref(), body)
        }
        Command::Per { common } => {
            let m = load(&common.model)?;
            let report = run_analysis(&m.system, m.name().map(String::from), &params(&common), None);
            let body = json!({
                "schema": report.schema,
                "model": report.model,
                "params": report.params,
                "periodicity": report.periodicity,
                "errors": report.errors,
            });
            finish(&report, common.json.as_ref(), body)
        }
        Command::KmsEval {
            common,
            trace,
            elements,
        } => {
            let m = load(&common.model)?;
            let kind = parse_trace(&trace).map_err(|e| Failure::new(EXIT_FAILURE, e))?;
            let p = params(&common);
            let specs: Vec<ElementSpec> = match &elements {
                Some(path) => serde_json::from_slice(&read_input(path)?)
                    .map_err(|e| Failure::new(EXIT_FAILURE, format!("{}: {e}", path.display())))?,
                None => {
                    let plain = run_analysis(&m.system, None, &p, None);
                    let basis = plain.periodicity.map(|l| l.basis).unwrap_or_default();
                    default_elements(&m.system, &basis, p.ball_radius)
                }
            };
            let report = run_analysis(&m.system, m.name().map(String::from), &p, Some((kind, specs)));
            let body = json!({
                "schema": report.schema,
                "model": report.model,
                "params": report.params,
                "kms": report.kms,
                "evaluations": report.evaluations,
                "errors": report.errors,
            });
            finish(&report, common.json.as_ref(), body)
        }
        Command::Gen { family } => {
            let (sys, meta, json) = match family {
                Family::Odometer { n, json } => {
                    let spec = OdometerSpec::new(n.clone()).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
                    let meta = json!({ "name": format!("odometer({})", join(&n)), "family": "odometer", "n": n });
                    (build_odometer(&spec), meta, json)
                }
                Family::Katsura { t, b, json } => {
                    let tm: Vec<Vec<u32>> = parse_matrix(&t)?;
                    let bm: Vec<Vec<i64>> = parse_matrix(&b)?;
                    let spec = KatsuraSpec::new(tm.clone(), bm.clone())
                        .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
                    let meta = json!({ "name": "katsura", "family": "katsura", "t": tm, "b": bm });
                    (build_katsura(&spec), meta, json)
                }
            };
            write_output(json.as_ref(), &emit_model(&sys, meta))?;
            Ok(0)
        }
    }
}

fn join(n: &[u32]) -> String {
    n.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_FAILURE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", f.message);
            ExitCode::from(f.code)
        }
    }
}
