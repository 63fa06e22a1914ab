//! Command-line front end. Every subcommand builds a [`Report`] of ordered
//! `key: value` fields; `--json` renders the same keys as a JSON object.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::compat::{check_formal_exactness_generic, cokernel_rank_generic, kline_report};
use crate::error::{Error, Result};
use crate::expr::{fmt_rational, Rational};
use crate::jet::{JetContext, JetPoint};
use crate::op::CDiffOp;
use crate::pform::{e1_table, epi_check, Metric};
use crate::problem::Problem;
use crate::spencer::{required_point_order, spencer_cohomology_generic, symbol, two_line_polynomial, Involutivity};
use crate::zcr::{mc_residual, MatrixForm};

#[derive(Parser, Debug)]
#[command(name = "cdiff", version, about = "C-differential calculus on jet spaces over exact rationals")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Highest prolongation order examined.
    #[arg(long, global = true, default_value_t = 2)]
    l_max: usize,
    /// Prolongation order used by `coker`.
    #[arg(long, global = true, default_value_t = 1)]
    k1: usize,
    /// Point file with lines `coord = rational`.
    #[arg(long, global = true, conflicts_with = "seed")]
    point: Option<PathBuf>,
    /// Seed for the three generic sample points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Structured output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Universal linearization of the system.
    Linearize { problem: PathBuf },
    /// Formal adjoint of the main operator.
    Adjoint { problem: PathBuf },
    /// Principal symbol of the main operator at a sample point.
    Symbol { problem: PathBuf },
    /// δ-cohomology table of the main operator's symbol.
    Spencer { problem: PathBuf },
    /// Involutivity of the main operator up to `--l-max`.
    Involutive { problem: PathBuf },
    /// Formal exactness of the declared operator complex.
    Exactness { problem: PathBuf },
    /// Cokernel rank of the prolonged main operator at order `--k1`.
    Coker { problem: PathBuf },
    /// Vanishing ranges for a complex of length k.
    Kline {
        #[arg(long, required_unless_present = "p", conflicts_with = "p")]
        k: Option<usize>,
        /// p-form theory: k = p + 2.
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        n: usize,
    },
    /// Zero-curvature check of a matrix 1-form on an evolution equation.
    Zcr {
        problem: PathBuf,
        #[arg(long)]
        forms: PathBuf,
    },
    /// Expansion of (θ₁^k + … + θ_p^k) ± (θ₁ + … + θ_p)^k.
    TwoLine {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        p: usize,
        #[arg(long, value_enum)]
        sign: Sign,
    },
    /// Surjectivity of the p-form symbol map at a covector.
    PformEpi {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        /// `euclidean`, `lorentzian` or `diag(±1,…)`.
        #[arg(long, default_value = "euclidean")]
        metric: String,
        /// Comma-separated rationals.
        #[arg(long)]
        xi: String,
    },
    /// E₁ dimension table of the abelian p-form theory.
    PformTable {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sign {
    #[value(name = "+")]
    Plus,
    #[value(name = "-")]
    Minus,
}

struct Field {
    key: String,
    text: String,
    json: Value,
}

/// Ordered report fields.
#[derive(Default)]
pub struct Report {
    fields: Vec<Field>,
    warnings: Vec<String>,
}

impl Report {
    fn push(&mut self, key: &str, text: impl Into<String>, json: Value) {
        self.fields.push(Field { key: key.into(), text: text.into(), json });
    }

    fn text(&mut self, key: &str, value: impl Into<String>) {
        let value = value.into();
        self.push(key, value.clone(), Value::String(value));
    }

    fn int(&mut self, key: &str, value: usize) {
        self.push(key, value.to_string(), json!(value));
    }

    fn flag(&mut self, key: &str, value: bool) {
        self.push(key, value.to_string(), json!(value));
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for f in &self.fields {
            if f.text.contains('\n') {
                out.push_str(&f.key);
                out.push_str(":\n");
                for line in f.text.trim_end_matches('\n').lines() {
                    out.push_str("  ");
                    out.push_str(line);
                    out.push('\n');
                }
            } else {
                out.push_str(&format!("{}: {}\n", f.key, f.text));
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        let map: serde_json::Map<String, Value> = self.fields.iter().map(|f| (f.key.clone(), f.json.clone())).collect();
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable");
        s.push('\n');
        s
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Precondition(format!("cannot read `{}`: {}", path.display(), e)))
}

fn load_problem(path: &Path) -> Result<Problem> {
    Problem::parse(&read(path)?)
}

/// The sample: the `--point` file, or three seeded generic points.
fn sample(g: &Global, ctx: &JetContext, order: usize) -> Result<Vec<JetPoint>> {
    match &g.point {
        Some(path) => Ok(vec![JetPoint::parse(ctx, &read(path)?)?]),
        None => Ok(JetPoint::generic(ctx, order, g.seed)),
    }
}

fn parse_metric(text: &str, n: usize) -> Result<Metric> {
    let t = text.trim();
    match t {
        "euclidean" => Ok(Metric::euclidean(n)),
        "lorentzian" => Ok(Metric::lorentzian(n)),
        _ => {
            let inner = t
                .strip_prefix("diag(")
                .and_then(|s| s.strip_suffix(')'))
                .ok_or_else(|| Error::Metric(format!("unknown metric `{}`", t)))?;
            let diag = inner
                .split(',')
                .map(|e| e.trim().parse::<i64>().map_err(|_| Error::Metric(format!("bad metric entry `{}`", e.trim()))))
                .collect::<Result<Vec<_>>>()?;
            let g = Metric::diagonal(&diag)?;
            if g.n() != n {
                return Err(Error::Dimension(format!("metric has {} entries, expected {}", g.n(), n)));
            }
            Ok(g)
        }
    }
}

fn parse_rationals(text: &str) -> Result<Vec<Rational>> {
    text.split(',')
        .map(|e| {
            let e = e.trim();
            let bad = || Error::Precondition(format!("bad rational `{}`", e));
            match e.split_once('/') {
                Some((a, b)) => {
                    let a: i64 = a.trim().parse().map_err(|_| bad())?;
                    let b: i64 = b.trim().parse().map_err(|_| bad())?;
                    if b == 0 {
                        return Err(bad());
                    }
                    Ok(Rational::new(a.into(), b.into()))
                }
                None => Ok(Rational::from_integer(e.parse::<i64>().map_err(|_| bad())?.into())),
            }
        })
        .collect()
}

fn format_op(op: &CDiffOp, ctx: &JetContext) -> String {
    op.format(ctx.vars()).trim_end().to_string()
}

fn main_operator(path: &Path) -> Result<(JetContext, CDiffOp, usize)> {
    let p = load_problem(path)?;
    let ctx = p.free_context()?;
    let d = p.main_operator()?;
    Ok((ctx, d.op, d.order))
}

fn execute(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    let mut r = Report::default();
    match &cli.command {
        Command::Linearize { problem } => {
            let p = load_problem(problem)?;
            let ctx = p.free_context()?;
            let system = p.system()?;
            let lf = crate::op::linearize(&ctx, &system)?;
            let eqs: Vec<String> = system.iter().map(|f| ctx.fmt(f)).collect();
            r.push("system", eqs.join("\n"), json!(eqs));
            r.text("l_F", format_op(&lf, &ctx));
            r.int("order", lf.order());
        }
        Command::Adjoint { problem } => {
            let (ctx, op, _) = main_operator(problem)?;
            r.text("operator", format_op(&op, &ctx));
            r.text("adjoint", format_op(&op.adjoint(&ctx), &ctx));
        }
        Command::Symbol { problem } => {
            let (ctx, op, _) = main_operator(problem)?;
            let pts = sample(g, &ctx, required_point_order(&ctx, &op, 0))?;
            let sym = symbol(&ctx, &op, &pts[0])?;
            r.int("order", sym.degree);
            r.text("symbol", sym.format(ctx.vars()).trim_end());
        }
        Command::Spencer { problem } | Command::Involutive { problem } => {
            let (ctx, op, _) = main_operator(problem)?;
            let pts = sample(g, &ctx, required_point_order(&ctx, &op, 0))?;
            let (rep, warnings) = spencer_cohomology_generic(&ctx, &op, g.l_max, &pts)?;
            r.warnings = warnings;
            r.int("order", rep.order);
            r.int("l_max", rep.l_max);
            if matches!(cli.command, Command::Spencer { .. }) {
                r.push("dims", rep.table(), json!(rep.dims));
            }
            match rep.involutivity() {
                Involutivity::UpTo(l) => {
                    r.flag("involutive", true);
                    r.int("involutive_up_to", l);
                }
                Involutivity::Failure { l, i, dim } => {
                    r.flag("involutive", false);
                    r.push(
                        "first_failure",
                        format!("l = {}, i = {}, dim = {}", l, i, dim),
                        json!({ "l": l, "i": i, "dim": dim }),
                    );
                }
            }
        }
        Command::Exactness { problem } => {
            let p = load_problem(problem)?;
            let ctx = p.free_context()?;
            let c = p.complex()?;
            let pts = sample(g, &ctx, c.required_point_order(&ctx, g.l_max))?;
            let (rep, warnings) = check_formal_exactness_generic(&ctx, &c, g.l_max, &pts)?;
            r.warnings = warnings;
            let ranks: Vec<String> = c.ranks().iter().map(usize::to_string).collect();
            r.push("ranks", ranks.join(" -> "), json!(c.ranks()));
            r.int("l_max", g.l_max);
            let lines: Vec<String> = rep
                .entries
                .iter()
                .map(|e| {
                    format!(
                        "position {} l {}: dims {} -> {} -> {}, ranks {}, {}, defect {}",
                        e.position, e.l, e.dims[0], e.dims[1], e.dims[2], e.ranks[0], e.ranks[1], e.defect
                    )
                })
                .collect();
            let entries: Vec<Value> = rep
                .entries
                .iter()
                .map(|e| json!({ "position": e.position, "l": e.l, "dims": e.dims, "ranks": e.ranks, "defect": e.defect }))
                .collect();
            r.push("entries", lines.join("\n"), Value::Array(entries));
            r.flag("exact", rep.is_exact());
            if let Some(e) = rep.first_defect() {
                r.push(
                    "first_defect",
                    format!("position {}, l {}, defect {}", e.position, e.l, e.defect),
                    json!({ "position": e.position, "l": e.l, "defect": e.defect }),
                );
            }
        }
        Command::Coker { problem } => {
            let (ctx, op, _) = main_operator(problem)?;
            let pts = sample(g, &ctx, required_point_order(&ctx, &op, g.k1))?;
            r.int("k1", g.k1);
            r.int("cokernel_rank", cokernel_rank_generic(&ctx, &op, g.k1, &pts)?);
        }
        Command::Kline { k, p, n } => {
            let k = match (k, p) {
                (Some(k), _) => *k,
                (None, Some(p)) => p + 2,
                (None, None) => unreachable!("clap requires one of --k, --p"),
            };
            if k < 2 {
                return Err(Error::OutOfRange(format!("complex length must be at least 2 (got {})", k)));
            }
            r.int("k", k);
            r.int("n", *n);
            let lines = kline_report(k, *n);
            r.push("report", lines.join("\n") + "\n", json!(lines));
        }
        Command::Zcr { problem, forms } => {
            let p = load_problem(problem)?;
            let ctx = p.context()?;
            let w = MatrixForm::parse(&read(forms)?, ctx.vars())?;
            let res = mc_residual(&ctx, &w)?;
            if res.is_zero() {
                r.push("residual", "0 (zero-curvature representation verified)", json!(0));
                r.flag("verified", true);
            } else {
                let text = res.format(ctx.vars());
                r.push("residual", text.clone(), Value::String(text));
                r.flag("verified", false);
            }
        }
        Command::TwoLine { k, p, sign } => {
            if *k < 1 || *p < 1 {
                return Err(Error::OutOfRange("two-line polynomial needs k >= 1 and p >= 1".into()));
            }
            let plus = matches!(sign, Sign::Plus);
            let q = two_line_polynomial(*k, *p, plus);
            r.text("sign", if plus { "+" } else { "-" });
            r.int("k", *k as usize);
            r.int("p", *p);
            r.flag("nonzero", q.is_nonzero());
            r.text("polynomial", if q.is_nonzero() { q.format() } else { "0".into() });
        }
        Command::PformEpi { n, p, metric, xi } => {
            let gm = parse_metric(metric, *n)?;
            let xi = parse_rationals(xi)?;
            let rep = epi_check(*n, *p, &gm, &xi)?;
            let shown: Vec<String> = xi.iter().map(fmt_rational).collect();
            r.text("xi", shown.join(", "));
            r.flag("surjective", rep.surjective);
            r.int("rank", rep.rank);
            r.int("dim", rep.dim);
        }
        Command::PformTable { n, p } => {
            let t = e1_table(*n, *p)?;
            r.int("n", t.n);
            r.int("p", t.p);
            let lines: Vec<String> = t.entries.iter().map(|(i, q, d)| format!("({}, {}, {})", i, q, d)).collect();
            r.push("entries", lines.join("\n") + "\n", json!(t.entries));
            r.flag("figure_consistent", t.figure_consistent);
        }
    }
    Ok(r)
}

/// Runs the CLI on `args` (including the program name). Returns the exit
/// code: 0 on success, 1 on domain errors, 2 on usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            for w in &report.warnings {
                let _ = writeln!(err, "{}", w);
            }
            let text = if cli.global.json { report.render_json() } else { report.render_text() };
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e);
            1
        }
    }
}
