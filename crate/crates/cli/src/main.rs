use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::Value;

use monogenic::growth::{kq_table_from_norms, kq_table_from_series, GrowthReport, LnNorms, Window};
use monogenic::io;
use monogenic::verify::{self, VerifyConfig, CHECK_NAMES};
use monogenic::{Mode, MonogenicSeries, MultiIndex, ProximateOrder, Rational, Scalar};

#[derive(Parser)]
#[command(name = "monogenic", version, about = "Entire monogenic functions: series, CK-products, growth and operators")]
struct Cli {
    /// Arithmetic mode; must match the input files when given.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Seed for sampled quantities.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample count for sphere sampling.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a series at a paravector point `x0,x1,...,xn`.
    Eval {
        series: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// CK-product of two series, truncated at `--q-out`.
    Ckprod {
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        q_out: Option<usize>,
    },
    /// Partial derivative `d^m f` with `m` given as `m1,...,mn`.
    Diff {
        series: PathBuf,
        #[arg(long)]
        m: String,
    },
    /// Growth report (CSV) from a series file or a coefficient-norms file.
    Growth {
        input: PathBuf,
        #[arg(long, value_parser = parse_po)]
        po: ProximateOrder,
        #[arg(long, value_parser = parse_window)]
        window: Window,
        /// Window for the type and membership estimates (defaults to `--window`).
        #[arg(long, value_parser = parse_window)]
        type_window: Option<Window>,
        /// Type tested for membership in A_(rho, sigma+0).
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Apply an operator file to a series file.
    Apply {
        op: PathBuf,
        series: PathBuf,
        #[arg(long)]
        q_out: usize,
    },
    /// Convert a homomorphism table into an operator.
    Hom2op { hom: PathBuf },
    /// Convert an operator into its homomorphism table up to degree `--q`.
    Op2hom {
        op: PathBuf,
        #[arg(long)]
        q: usize,
        /// Raise the series truncation degree before converting.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Run the verification suite; exit code 1 when a check fails.
    Verify {
        /// JSON configuration file.
        config: Option<PathBuf>,
        /// Print the check names and exit.
        #[arg(long)]
        list: bool,
        /// Run the named check (or `all`) on its corrupted input.
        #[arg(long)]
        corrupt: Vec<String>,
        /// Restrict to the named checks.
        #[arg(long)]
        check: Vec<String>,
    },
}

fn parse_mode(s: &str) -> std::result::Result<Mode, String> {
    s.parse().map_err(|e: monogenic::Error| e.to_string())
}

fn parse_po(s: &str) -> std::result::Result<ProximateOrder, String> {
    s.parse().map_err(|e: monogenic::Error| e.to_string())
}

fn parse_window(s: &str) -> std::result::Result<Window, String> {
    s.parse().map_err(|e: monogenic::Error| e.to_string())
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    io::parse_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn resolve_mode(requested: Option<Mode>, found: &[Mode]) -> Result<Mode> {
    let first = found.first().copied().or(requested).unwrap_or(Mode::Exact);
    if found.iter().any(|&m| m != first) {
        bail!("inputs mix exact and float mode");
    }
    if let Some(r) = requested {
        if r != first {
            bail!("--mode {} does not match input mode {}", r.as_str(), first.as_str());
        }
    }
    Ok(first)
}

fn parse_index(s: &str, n: usize) -> Result<MultiIndex> {
    let v: Vec<u32> = s
        .split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| anyhow!("invalid multi-index {s:?}")))
        .collect::<Result<_>>()?;
    if v.len() != n {
        bail!("multi-index {s:?} has length {}, expected {n}", v.len());
    }
    Ok(MultiIndex::new(v))
}

fn series_text<S: Scalar>(f: &MonogenicSeries<S>) -> String {
    io::to_json_text(&io::series_to_json(f))
}

fn eval<S: Scalar>(v: &Value, point: &str) -> Result<String> {
    let f: MonogenicSeries<S> = io::series_from_json(v)?;
    let x = io::parse_point::<S>(point)?;
    let y = f.eval(&x)?;
    Ok(io::to_json_text(&io::clifford_to_json(&y)))
}

fn ckprod<S: Scalar>(a: &Value, b: &Value, q_out: Option<usize>) -> Result<String> {
    let f: MonogenicSeries<S> = io::series_from_json(a)?;
    let g: MonogenicSeries<S> = io::series_from_json(b)?;
    let q = q_out.unwrap_or(f.degree().max(g.degree()));
    Ok(series_text(&f.ck_mul(&g, q)?))
}

fn diff<S: Scalar>(v: &Value, m: &str) -> Result<String> {
    let f: MonogenicSeries<S> = io::series_from_json(v)?;
    let m = parse_index(m, f.dim())?;
    Ok(series_text(&f.derivative(&m)))
}

fn apply<S: Scalar>(op: &Value, v: &Value, q_out: usize) -> Result<String> {
    let p = io::operator_from_json::<S>(op)?;
    let f: MonogenicSeries<S> = io::series_from_json(v)?;
    Ok(series_text(&p.apply(&f, q_out)?))
}

fn hom2op<S: Scalar>(v: &Value) -> Result<String> {
    let h = io::hom_from_json::<S>(v)?;
    Ok(io::to_json_text(&io::operator_to_json(&h.to_op()?)))
}

fn op2hom<S: Scalar>(v: &Value, q: usize, degree: Option<usize>) -> Result<String> {
    let mut p = io::operator_from_json::<S>(v)?;
    if let Some(d) = degree {
        p = p.with_series_degree(d);
    }
    Ok(io::to_json_text(&io::hom_to_json(&p.to_hom(q))))
}

macro_rules! dispatch {
    ($mode:expr, $f:ident($($arg:expr),*)) => {
        match $mode {
            Mode::Exact => $f::<Rational>($($arg),*),
            Mode::Float => $f::<f64>($($arg),*),
        }
    };
}

fn growth(
    v: &Value,
    po: &ProximateOrder,
    window: Window,
    type_window: Option<Window>,
    sigma: Option<f64>,
    samples: usize,
    seed: u64,
) -> Result<(String, String)> {
    let (norms, kq) = if v.get("norms").is_some() {
        let norms = io::norms_from_json(v)?;
        let kq = kq_table_from_norms(&norms);
        (norms, kq)
    } else {
        let f: MonogenicSeries<f64> = match io::series_mode(v)? {
            Mode::Exact => io::series_from_json::<Rational>(v)?.to_f64(),
            Mode::Float => io::series_from_json::<f64>(v)?,
        };
        (LnNorms::from_series(&f), kq_table_from_series(&f, samples, seed))
    };
    let type_window = type_window.unwrap_or(window);
    let report = GrowthReport::build(&norms, &kq, po, window, type_window, sigma);
    if report.rows.is_empty() || report.order.is_none() {
        return Err(monogenic::Error::EmptyWindow {
            lo: window.lo.min(type_window.lo),
            hi: window.hi.max(type_window.hi),
        }
        .into());
    }
    Ok((report.to_csv(), report.summary()))
}

fn input_mode(v: &Value) -> Result<Vec<Mode>> {
    Ok(io::series_mode(v).map(|m| vec![m])?)
}

fn table_modes(v: &Value) -> Result<Vec<Mode>> {
    Ok(io::table_mode(v)?.into_iter().collect())
}

fn run(cli: Cli) -> Result<ExitCode> {
    let out = cli.out.as_deref();
    let seed = cli.seed.unwrap_or(42);
    let samples = cli.samples.unwrap_or(256);
    match cli.command {
        Command::Eval { series, point } => {
            let v = read_json(&series)?;
            let mode = resolve_mode(cli.mode, &input_mode(&v)?)?;
            emit(out, &dispatch!(mode, eval(&v, &point))?)?;
        }
        Command::Ckprod { f, g, q_out } => {
            let (a, b) = (read_json(&f)?, read_json(&g)?);
            let mode = resolve_mode(cli.mode, &[input_mode(&a)?, input_mode(&b)?].concat())?;
            emit(out, &dispatch!(mode, ckprod(&a, &b, q_out))?)?;
        }
        Command::Diff { series, m } => {
            let v = read_json(&series)?;
            let mode = resolve_mode(cli.mode, &input_mode(&v)?)?;
            emit(out, &dispatch!(mode, diff(&v, &m))?)?;
        }
        Command::Growth {
            input,
            po,
            window,
            type_window,
            sigma,
        } => {
            let v = read_json(&input)?;
            let (csv, summary) = growth(&v, &po, window, type_window, sigma, samples, seed)?;
            emit(out, &csv)?;
            eprint!("{summary}");
        }
        Command::Apply { op, series, q_out } => {
            let (p, f) = (read_json(&op)?, read_json(&series)?);
            let mode = resolve_mode(cli.mode, &[table_modes(&p)?, input_mode(&f)?].concat())?;
            emit(out, &dispatch!(mode, apply(&p, &f, q_out))?)?;
        }
        Command::Hom2op { hom } => {
            let v = read_json(&hom)?;
            let mode = resolve_mode(cli.mode, &table_modes(&v)?)?;
            emit(out, &dispatch!(mode, hom2op(&v))?)?;
        }
        Command::Op2hom { op, q, degree } => {
            let v = read_json(&op)?;
            let mode = resolve_mode(cli.mode, &table_modes(&v)?)?;
            emit(out, &dispatch!(mode, op2hom(&v, q, degree))?)?;
        }
        Command::Verify {
            config,
            list,
            corrupt,
            check,
        } => {
            if list {
                for name in CHECK_NAMES {
                    println!("{name}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let mut cfg: VerifyConfig = match &config {
                Some(path) => {
                    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
                }
                None => VerifyConfig::default(),
            };
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(s) = cli.samples {
                cfg.samples = s;
            }
            cfg.corrupt.extend(corrupt);
            cfg.checks.extend(check);
            let reports = verify::run_all(&cfg)?;
            print!("{}", verify::format_table(&reports));
            if let Some(p) = out {
                let json = serde_json::to_string_pretty(&reports)? + "\n";
                fs::write(p, json).with_context(|| format!("writing {}", p.display()))?;
            }
            if reports.iter().any(|r| !r.pass) {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
