//! `lipfree`: free norms and Daugavet / Δ-point classification from the
//! command line.
//!
//! Exit codes: 0 positive (or unrefuted, or valid), 1 negative (or invalid
//! metric), 2 usage or parse error, 3 solver failure or inconclusive.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use lipfree::classify::{
    builtin_slices, classify_connectable, classify_daugavet_element, classify_daugavet_molecule, delta_ball_test,
    delta_slice_test, length_space_test, ClassificationReport, MidBudget, SliceFamilyOptions, Verdict,
};
use lipfree::corpus::{ExampleKind, ExampleSpec};
use lipfree::free::{free_norm_checked, free_norm_with, transport_norm, NormOptions};
use lipfree::io::{parse_element, parse_function, point_index, read_raw_space, space_to_json};
use lipfree::lipschitz::locality_profile;
use lipfree::metric::{FiniteMetricSpace, Metric, Violation};
use lipfree::{Error, Tolerances};

#[derive(Parser)]
#[command(name = "lipfree", version, about = "Free-space norms and Daugavet / delta-point classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    tol_opt: Option<f64>,
    #[arg(long, global = true)]
    tol_feas: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Daugavet,
    Delta,
    Connectable,
    Length,
}

#[derive(Subcommand)]
enum Command {
    /// Check the metric axioms of a space file.
    Validate { file: PathBuf },
    /// Free norm of an element such as "1*x - 0.5*y".
    Norm {
        file: PathBuf,
        #[arg(allow_hyphen_values = true)]
        element: String,
        /// Also print the final LP tableau and the transport flow.
        #[arg(long)]
        dump: bool,
    },
    /// Classify a molecule (or element) of the free space.
    #[command(allow_negative_numbers = true)]
    Classify {
        file: PathBuf,
        #[arg(value_enum)]
        mode: Mode,
        /// The points x y of the molecule m_{x,y}; none for `length`.
        points: Vec<String>,
        /// Classify this element instead of a molecule (daugavet only).
        #[arg(long, allow_hyphen_values = true)]
        element: Option<String>,
        /// Segment slack; defaults to the smallest distance in the space.
        #[arg(long)]
        eta: Option<f64>,
        /// Separation cutoff for denting pairs; defaults like --eta.
        #[arg(long)]
        h: Option<f64>,
        /// Ball slack (delta), length slack (connectable) or midpoint
        /// allowance (length; defaults to the smallest distance).
        #[arg(long)]
        eps: Option<f64>,
        /// Relative midpoint budget for `length`, overriding --eps.
        #[arg(long)]
        delta: Option<f64>,
        /// Largest path step; defaults to the smallest distance.
        #[arg(long)]
        step: Option<f64>,
        /// Slice-test resolution; defaults to the smallest distance.
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        /// Number of random slices in the slice family.
        #[arg(long, default_value_t = 4)]
        random_slices: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write one of the example spaces.
    Example {
        name: String,
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// Bridge height.
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Locality profile of a function across decreasing scales.
    Scan {
        file: PathBuf,
        #[arg(allow_hyphen_values = true)]
        function: String,
        /// Comma-separated, strictly decreasing.
        #[arg(long, value_delimiter = ',', required = true)]
        scales: Vec<f64>,
    },
}

struct Outcome {
    text: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(cli.out.as_deref(), &out.text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Solver { .. } => 3,
                _ => 2,
            })
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn tolerances(cli: &Cli) -> Tolerances {
    let mut tol = Tolerances::default();
    if let Some(v) = cli.tol_opt {
        tol = tol.with_opt(v);
    }
    if let Some(v) = cli.tol_feas {
        tol = tol.with_feas(v);
    }
    tol
}

fn run(cli: &Cli) -> lipfree::Result<Outcome> {
    let tol = tolerances(cli);
    match &cli.command {
        Command::Validate { file } => validate(cli.format, file, &tol),
        Command::Norm { file, element, dump } => norm(cli.format, file, element, *dump, &tol),
        Command::Classify {
            file,
            mode,
            points,
            element,
            eta,
            h,
            eps,
            delta,
            step,
            scale,
            alpha,
            random_slices,
            seed,
        } => {
            let space = read_raw_space(file)?.into_space()?;
            let grid = space.min_distance().unwrap_or(1.0);
            let pair = || -> lipfree::Result<(usize, usize)> {
                match points.as_slice() {
                    [x, y] => Ok((point_index(&space, x)?, point_index(&space, y)?)),
                    _ => Err(Error::Parse(format!("expected two points, got {}", points.len()))),
                }
            };
            let family = |x, y| {
                builtin_slices(&space, x, y, &SliceFamilyOptions { alpha: *alpha, random: *random_slices, seed: *seed })
            };
            let reports = match mode {
                Mode::Daugavet => {
                    let (eta, h) = (eta.unwrap_or(grid), h.unwrap_or(grid));
                    match element {
                        Some(lit) => {
                            if !points.is_empty() {
                                return Err(Error::Parse("give either points or --element".into()));
                            }
                            let mu = parse_element(&space, lit)?;
                            vec![classify_daugavet_element(&space, &mu, eta, h, &tol)?]
                        }
                        None => {
                            let (x, y) = pair()?;
                            vec![classify_daugavet_molecule(&space, x, y, eta, h, &tol)?]
                        }
                    }
                }
                Mode::Delta => {
                    let (x, y) = pair()?;
                    let ball = delta_ball_test(&space, x, y, None, eps.unwrap_or(0.0))?;
                    let (slices, notes) = family(x, y)?;
                    let mut slice = delta_slice_test(&space, x, y, &slices, scale.unwrap_or(grid))?;
                    slice.query.params.insert("alpha".into(), *alpha);
                    slice.query.params.insert("seed".into(), *seed as f64);
                    slice.notes.extend(notes);
                    vec![ball, slice]
                }
                Mode::Connectable => {
                    let (x, y) = pair()?;
                    let (slices, _) = family(x, y)?;
                    vec![classify_connectable(&space, x, y, eps.unwrap_or(0.0), step.unwrap_or(grid), &slices)?]
                }
                Mode::Length => {
                    if !points.is_empty() {
                        return Err(Error::Parse("length takes no points".into()));
                    }
                    let budget = match delta {
                        Some(d) => MidBudget::Relative(*d),
                        None => MidBudget::Absolute(eps.unwrap_or(grid)),
                    };
                    vec![length_space_test(&space, budget)?]
                }
            };
            Ok(report_outcome(cli.format, &reports))
        }
        Command::Example { name, k, r, seed } => {
            let kind: ExampleKind = name.parse()?;
            let mut spec = ExampleSpec::new(kind, *k).with_seed(*seed);
            if let Some(r) = r {
                spec = spec.with_param("r", *r);
            }
            let space = spec.generate()?;
            Ok(Outcome { text: space_to_json(&space), code: 0 })
        }
        Command::Scan { file, function, scales } => scan(cli.format, file, function, scales),
    }
}

fn report_outcome(format: Format, reports: &[ClassificationReport]) -> Outcome {
    let verdict = if reports.iter().any(|r| r.verdict == Verdict::Inconclusive || !r.all_checks_passed()) {
        Verdict::Inconclusive
    } else if reports.iter().any(|r| r.verdict == Verdict::Negative) {
        Verdict::Negative
    } else {
        Verdict::Positive
    };
    let text = match format {
        Format::Structured => to_json(&json!({ "reports": reports })),
        Format::Table => reports.iter().map(|r| r.to_table()).collect::<Vec<_>>().join("\n"),
    };
    let code = match verdict {
        Verdict::Positive => 0,
        Verdict::Negative => 1,
        Verdict::Inconclusive => 3,
    };
    Outcome { text, code }
}

fn to_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("value serializes") + "\n"
}

fn validate(format: Format, file: &Path, tol: &Tolerances) -> lipfree::Result<Outcome> {
    let raw = read_raw_space(file)?;
    let report = raw.validate(tol)?;
    let names = raw.to_matrix().names;
    let code = if report.is_valid() { 0 } else { 1 };
    let text = match format {
        Format::Structured => to_json(&json!({ "valid": report.is_valid(), "points": names.len(), "violations": report.violations })),
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "{} points, {}", names.len(), if report.is_valid() { "valid" } else { "INVALID" });
            for v in &report.violations {
                let _ = writeln!(out, "  {}", describe(v, &names));
            }
            out
        }
    };
    Ok(Outcome { text, code })
}

fn describe(v: &Violation, names: &[String]) -> String {
    let n = |i: &usize| names[*i].as_str();
    match v {
        Violation::NonFinite { p, q, value } => format!("non-finite d({}, {}) = {value}", n(p), n(q)),
        Violation::Diagonal { p, value } => format!("nonzero diagonal d({0}, {0}) = {value}", n(p)),
        Violation::Positivity { p, q, value } => format!("positivity: d({}, {}) = {value}", n(p), n(q)),
        Violation::Symmetry { p, q, pq, qp } => format!("symmetry: d({0}, {1}) = {pq} but d({1}, {0}) = {qp}", n(p), n(q)),
        Violation::Triangle { p, q, r, direct, via } => format!(
            "triangle: d({0}, {1}) = {direct} > d({0}, {2}) + d({2}, {1}) = {via}",
            n(p),
            n(q),
            n(r)
        ),
    }
}

fn norm(format: Format, file: &Path, element: &str, dump: bool, tol: &Tolerances) -> lipfree::Result<Outcome> {
    let space = read_raw_space(file)?.into_space()?;
    let mu = parse_element(&space, element)?;
    let check = free_norm_checked(&space, &mu, tol)?;
    let passed = check.gap < tol.opt && check.slackness_residual < 1e-6;
    let certificate: Vec<Value> = (0..space.len())
        .map(|p| json!({ "point": space.name(p), "value": check.certificate.value(p) }))
        .collect();
    let mut text = match format {
        Format::Structured => to_json(&json!({
            "element": mu.display(&space).to_string(),
            "norm": check.dual,
            "transport": check.primal,
            "gap": check.gap,
            "slackness_residual": check.slackness_residual,
            "lipschitz_excess": check.lipschitz_excess,
            "certificate": certificate,
        })),
        Format::Table => {
            let mut out = String::new();
            let _ = writeln!(out, "element     {}", mu.display(&space));
            let _ = writeln!(out, "norm        {}", check.dual);
            let _ = writeln!(out, "transport   {}", check.primal);
            let _ = writeln!(out, "gap         {:e}", check.gap);
            let _ = writeln!(out, "slackness   {:e}", check.slackness_residual);
            let _ = writeln!(out, "certificate");
            for p in 0..space.len() {
                let _ = writeln!(out, "  {:<16}{}", space.name(p), check.certificate.value(p));
            }
            out
        }
    };
    if dump {
        text.push_str(&dump_solvers(&space, &mu, tol)?);
    }
    Ok(Outcome { text, code: if passed { 0 } else { 3 } })
}

fn dump_solvers(space: &FiniteMetricSpace, mu: &lipfree::free::FreeElement, tol: &Tolerances) -> lipfree::Result<String> {
    let opts = NormOptions { tol: *tol, record_tableau: true, ..NormOptions::default() };
    let lp = free_norm_with(space, mu, &opts)?;
    let t = transport_norm(space, mu, tol)?;
    let mut out = String::from("--- lp tableau ---\n");
    out.push_str(lp.dump.as_deref().unwrap_or("(empty program)\n"));
    out.push_str("--- transport flow ---\n");
    for (a, &i) in t.sources.iter().enumerate() {
        for (b, &j) in t.sinks.iter().enumerate() {
            let f = t.plan.flow[a][b];
            if f > tol.feas {
                let _ = writeln!(out, "{} -> {}  {}  cost {}", space.name(i), space.name(j), f, space.d(i, j));
            }
        }
    }
    Ok(out)
}

fn scan(format: Format, file: &Path, function: &str, scales: &[f64]) -> lipfree::Result<Outcome> {
    let space = read_raw_space(file)?.into_space()?;
    let f = parse_function(&space, function)?;
    let profile = locality_profile(&space, &f, scales)?;
    let pair = |p: Option<(usize, usize)>| p.map(|(u, v)| vec![space.name(u), space.name(v)]);
    let text = match format {
        Format::Structured => {
            let rows: Vec<Value> = profile
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "scale": r.scale,
                        "best_slope": r.best_slope,
                        "best_pair": pair(r.best_pair),
                        "epsilon_points": r.epsilon_points.len(),
                        "local": r.local,
                    })
                })
                .collect();
            to_json(&json!({ "function": function, "lipschitz_constant": profile.lipschitz_constant, "rows": rows }))
        }
        Format::Table => {
            let mut out = format!("lipschitz constant {}\n", profile.lipschitz_constant);
            let _ = writeln!(out, "{:<14}{:<22}{:<28}{:<10}local", "scale", "best slope", "pair", "eps-pts");
            for r in &profile.rows {
                let slope = r.best_slope.map_or("empty".to_string(), |s| s.to_string());
                let p = pair(r.best_pair).map_or("-".to_string(), |p| p.join(" "));
                let _ = writeln!(out, "{:<14}{:<22}{:<28}{:<10}{}", r.scale, slope, p, r.epsilon_points.len(), r.local);
            }
            out
        }
    };
    Ok(Outcome { text, code: 0 })
}
