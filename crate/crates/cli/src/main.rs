//! `thetarel`: evaluate, expand, mine, recognize and verify theta-quotient identities.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use thetarel::bigreal::{literal_significant_digits, parse_decimal_exact};
use thetarel::catalog::{verify_all, verify_selected, Verdict};
use thetarel::config::{parse_r_list, RunConfig, DEFAULT_DIGITS, DEFAULT_ORDER, MIN_RUN_DIGITS};
use thetarel::miner::{mine, UBinding, VBinding};
use thetarel::modular::s_n;
use thetarel::numeric::{
    ellipk, eval_a, eval_eta, eval_theta, inverse_modulus, modulus_from_nome, singular_modulus, EvalPoint,
};
use thetarel::recognize::{recognize, recognize_rational, FixedReal, RealSource, Recognition};
use thetarel::series::{
    a_series, eta5_series, eta_series, h5_series, modulus_series, parse_rat, theta_series, PuiseuxSeries, Rat,
    ThetaSpec,
};
use thetarel::{BigReal, Error, Result};

#[derive(Parser)]
#[command(name = "thetarel", version, about = "Theta-quotient evaluation, series, relation mining and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a function to high precision.
    Eval(EvalArgs),
    /// Expand a q-series exactly.
    Series(SeriesArgs),
    /// Mine a polynomial relation P(u, v) = 0.
    Mine(MineArgs),
    /// Find an integer polynomial vanishing at a value.
    Recognize(RecognizeArgs),
    /// Check catalog entries and write a report.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalFn {
    #[value(name = "K")]
    BigK,
    #[value(name = "k")]
    SmallK,
    #[value(name = "ki")]
    Ki,
    #[value(name = "eta")]
    Eta,
    #[value(name = "theta")]
    Theta,
    #[value(name = "A")]
    A,
    #[value(name = "Sn")]
    Sn,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long = "fn", value_enum)]
    func: EvalFn,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    /// Singular value index; the nome is e^(-pi sqrt(r)).
    #[arg(long, conflicts_with_all = ["x", "q"])]
    r: Option<String>,
    /// Modulus value in (0, 1).
    #[arg(long, conflicts_with = "q")]
    x: Option<String>,
    /// Nome in (0, 1), as a decimal.
    #[arg(long)]
    q: Option<String>,
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    digits: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesFn {
    Eta,
    Theta,
    M,
    #[value(name = "A")]
    A,
    H5,
    Eta5,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long = "fn", value_enum)]
    func: SeriesFn,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Substitute q -> q^scale.
    #[arg(long)]
    scale: Option<String>,
    /// Exclusive truncation bound on exponents.
    #[arg(long, default_value_t = DEFAULT_ORDER.to_string())]
    order: String,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: String,
    #[arg(long)]
    p: String,
    #[arg(long)]
    power: u32,
    /// u is taken at q^nome.
    #[arg(long, default_value_t = 1)]
    nome: u32,
    /// One of m, k, m2sq, eta5q4p5, eta5q2p5.
    #[arg(long)]
    v: String,
    #[arg(long = "max-degree")]
    max_degree: u32,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: i64,
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    digits: u32,
    /// r values for the numeric spot checks.
    #[arg(long, default_value = "1,2")]
    rs: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Expr {
    #[value(name = "A")]
    A,
}

#[derive(Args)]
struct RecognizeArgs {
    /// Decimal literal; precision is taken from its digit count.
    #[arg(long, conflicts_with = "expr", required_unless_present = "expr")]
    value: Option<String>,
    #[arg(long, value_enum, requires_all = ["a", "p", "r"])]
    expr: Option<Expr>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long, default_value_t = 1)]
    power: u32,
    #[arg(long, default_value_t = 1)]
    nome: u32,
    #[arg(long)]
    r: Option<String>,
    #[arg(long = "max-degree", default_value_t = 4)]
    max_degree: usize,
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    digits: u32,
    /// Also look for a rational with denominator at most this.
    #[arg(long = "den-bound")]
    den_bound: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Entry id or group prefix; may be repeated.
    #[arg(long, required_unless_present = "all")]
    entry: Vec<String>,
    #[arg(long, conflicts_with = "entry")]
    all: bool,
    #[arg(long, default_value_t = DEFAULT_DIGITS)]
    digits: u32,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    order: i64,
    #[arg(long, default_value = "1,2,3")]
    rs: String,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// Whether the requested checks came out clean.
enum Outcome {
    Clean,
    Failures,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Series(a) => run_series(a),
        Command::Mine(a) => run_mine(a),
        Command::Recognize(a) => run_recognize(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(Outcome::Clean) => ExitCode::SUCCESS,
        Ok(Outcome::Failures) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::Parse(format!("--{flag} is required here")))
}

fn check_digits(digits: u32) -> Result<()> {
    if digits < MIN_RUN_DIGITS {
        return Err(Error::Domain(format!("--digits must be at least {MIN_RUN_DIGITS}")));
    }
    Ok(())
}

fn spec_from(a: &Option<String>, p: &Option<String>) -> Result<ThetaSpec> {
    ThetaSpec::new(parse_rat(need(a, "a")?)?, parse_rat(need(p, "p")?)?)
}

fn exact_real(s: &str, digits: u32) -> Result<BigReal> {
    Ok(BigReal::from_bigrational(&parse_decimal_exact(s)?, digits))
}

/// The nome, from `--r` or `--q`.
fn nome_from(args: &EvalArgs) -> Result<BigReal> {
    match (&args.r, &args.q) {
        (Some(r), _) => Ok(point_at(r, args.digits)?.q),
        (None, Some(q)) => BigReal::parse_decimal(q, args.digits),
        _ => Err(Error::Parse("give the nome with --r or --q".into())),
    }
}

fn point_at(r: &str, digits: u32) -> Result<EvalPoint> {
    singular_modulus(parse_rat(r)?, digits)
}

fn run_eval(args: EvalArgs) -> Result<Outcome> {
    check_digits(args.digits)?;
    let d = args.digits;
    let value = match args.func {
        EvalFn::BigK => match (&args.x, &args.r) {
            (Some(x), _) => ellipk(&exact_real(x, d)?)?,
            (None, Some(r)) => ellipk(&point_at(r, d)?.k)?,
            _ => return Err(Error::Parse("K needs --x or --r".into())),
        },
        EvalFn::SmallK => match (&args.r, &args.q) {
            (Some(r), _) => point_at(r, d)?.k,
            (None, Some(q)) => modulus_from_nome(&BigReal::parse_decimal(q, d)?)?.0,
            _ => return Err(Error::Parse("k needs --r or --q".into())),
        },
        EvalFn::Ki => inverse_modulus(&exact_real(need(&args.x, "x")?, d)?)?,
        EvalFn::Eta => {
            let p = args.p.as_deref().map(parse_rat).transpose()?.unwrap_or(Rat::from_integer(1));
            eval_eta(p, &nome_from(&args)?, d)?
        }
        EvalFn::Theta => eval_theta(
            parse_rat(need(&args.a, "a")?)?,
            parse_rat(need(&args.b, "b")?)?,
            &nome_from(&args)?,
            d,
        )?,
        EvalFn::A => eval_a(&spec_from(&args.a, &args.p)?, &nome_from(&args)?, d)?,
        EvalFn::Sn => {
            let n = args.n.ok_or_else(|| Error::Parse("Sn needs --n".into()))?;
            s_n(&exact_real(need(&args.x, "x")?, d)?, n, d)?
        }
    };
    println!("{}", value.to_decimal_string(d as usize));
    Ok(Outcome::Clean)
}

fn run_series(args: SeriesArgs) -> Result<Outcome> {
    let order = parse_rat(&args.order)?;
    if order <= Rat::from_integer(0) {
        return Err(Error::Domain("--order must be positive".into()));
    }
    let scale = args.scale.as_deref().map(parse_rat).transpose()?.unwrap_or(Rat::from_integer(1));
    if scale <= Rat::from_integer(0) {
        return Err(Error::Domain("--scale must be positive".into()));
    }
    let inner = order / scale;
    let base: PuiseuxSeries = match args.func {
        SeriesFn::Eta => eta_series(Rat::from_integer(1), inner),
        SeriesFn::Theta => theta_series(parse_rat(need(&args.a, "a")?)?, parse_rat(need(&args.b, "b")?)?, inner)?,
        SeriesFn::M => modulus_series(inner),
        SeriesFn::A => a_series(&spec_from(&args.a, &args.p)?, inner)?,
        SeriesFn::H5 => h5_series(inner),
        SeriesFn::Eta5 => eta5_series(inner),
    };
    let s = base.rescale(scale).truncate(order);
    println!("{s}");
    if let Some(path) = &args.json {
        write_json(path, &serde_json::to_value(s.to_json())?)?;
    }
    Ok(Outcome::Clean)
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn run_mine(args: MineArgs) -> Result<Outcome> {
    let cfg = RunConfig::new(args.digits, args.order, parse_r_list(&args.rs)?)?;
    let spec = ThetaSpec::new(parse_rat(&args.a)?, parse_rat(&args.p)?)?;
    let u = UBinding::new(spec, args.power).with_nome(args.nome);
    let v = VBinding::parse(&args.v)?;
    match mine(u, v, args.max_degree, cfg.order_rat(), &cfg.rs, cfg.digits) {
        Ok(rel) => {
            println!("{}", rel.poly);
            let j = rel.to_json_value();
            match &args.out {
                Some(path) => write_json(path, &j)?,
                None => println!("{}", serde_json::to_string_pretty(&j)?),
            }
            Ok(Outcome::Clean)
        }
        Err(Error::NotFound(msg)) | Err(Error::ValidationFailed(msg)) => {
            eprintln!("no relation: {msg}");
            Ok(Outcome::Failures)
        }
        Err(e) => Err(e),
    }
}

fn recognition_json(r: &Recognition) -> Value {
    json!({
        "poly": r.poly.to_json(),
        "display": r.poly.to_string(),
        "degree": r.poly.degree(),
        "digits": r.digits,
        "residual": r.residual.to_sci_string(2),
        "recertified_residual": r.recert_residual.to_sci_string(2),
        "warnings": r.warnings,
    })
}

fn run_recognize(args: RecognizeArgs) -> Result<Outcome> {
    check_digits(args.digits)?;
    let (source, digits): (Box<dyn RealSource>, u32) = match (&args.value, args.expr) {
        (Some(lit), _) => {
            let avail = literal_significant_digits(lit)
                .ok_or_else(|| Error::Parse(format!("`{lit}` is not a decimal literal")))?;
            let value = exact_real(lit, avail.max(MIN_RUN_DIGITS))?;
            // Half the literal's digits search, the rest re-certify.
            (Box::new(FixedReal(value)), args.digits.min((avail / 2).max(MIN_RUN_DIGITS)))
        }
        (None, Some(Expr::A)) => {
            let spec = spec_from(&args.a, &args.p)?;
            let r = parse_rat(need(&args.r, "r")?)?;
            let (power, nome) = (args.power as i64, args.nome as i64);
            let f = move |d: u32| -> Result<BigReal> {
                let pt = singular_modulus(r, d)?;
                Ok(eval_a(&spec, &pt.q.powi(nome), d)?.powi(power))
            };
            (Box::new(f), args.digits)
        }
        (None, None) => return Err(Error::Parse("give --value or --expr".into())),
    };
    let mut out = serde_json::Map::new();
    let mut found = false;
    if let Some(bound) = args.den_bound {
        let x = source.value(digits)?;
        match recognize_rational(&x, digits, &bound.into()) {
            Ok(q) => {
                found = true;
                out.insert("rational".into(), json!(q.to_string()));
            }
            Err(e) => {
                out.insert("rational".into(), Value::Null);
                eprintln!("{e}");
            }
        }
    }
    match recognize(source.as_ref(), args.max_degree, digits) {
        Ok(rec) => {
            found = true;
            for w in &rec.warnings {
                eprintln!("warning: {w}");
            }
            println!("{}", rec.poly);
            out.insert("recognized".into(), recognition_json(&rec));
        }
        Err(Error::NotFound(msg)) => {
            eprintln!("{msg}");
            out.insert("recognized".into(), Value::Null);
        }
        Err(e) => return Err(e),
    }
    println!("{}", serde_json::to_string_pretty(&Value::Object(out))?);
    Ok(if found { Outcome::Clean } else { Outcome::Failures })
}

fn run_verify(args: VerifyArgs) -> Result<Outcome> {
    let cfg = RunConfig::new(args.digits, args.order, parse_r_list(&args.rs)?)?;
    let report = if args.all {
        verify_all(&cfg)?
    } else {
        let keys: Vec<&str> = args.entry.iter().map(String::as_str).collect();
        verify_selected(&keys, &cfg)?
    };
    for e in &report.entries {
        let worst = e.max_residual().map(|r| r.to_sci_string(2)).unwrap_or_else(|| "-".into());
        let verdict = match e.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Flagged => "flagged",
        };
        println!("{:<24} {:<8} max residual {}", e.id, verdict, worst);
    }
    if let Some(path) = &args.report {
        write_json(path, &report.to_json())?;
    }
    Ok(if report.all_pass() { Outcome::Clean } else { Outcome::Failures })
}
