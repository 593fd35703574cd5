use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use symsq::config::HarnessConfig;
use symsq::exponent::{decimal, parse_rational, pgt_error_exponent, previous_exponent, ExponentInput};
use symsq::expsum::{weil_diagnostic, KloostermanQuery};
use symsq::hyp::{hyp2f1_uniform, spectral_oracle_with, SpectralParams};
use symsq::kernel::{kernel_point, TestFunctionSpec};
use symsq::moment::{explicit_terms, kernel_j_avg, TermValue};
use symsq::table;
use symsq::verify::{self, SuiteReport};
use symsq::zagier::{zagier_l, TruncationConfig, ZagierMethod, ZagierQuery};
use symsq::zeta::{lerch_functional_equation_rhs_estimate, lerch_zeta_estimate, LerchQuery};
use symsq::{Error, GaussianInt};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_PRECISION: u8 = 3;

/// Gaussian-integer exponential sums, Zagier L-series, hypergeometric
/// asymptotics and the spectral kernel behind the prime geodesic bound.
///
/// Complex numbers are given as `RE,IM` (or `RE`) and printed as `[re, im]`.
/// Gaussian integers are written `a+bi`.
#[derive(Parser)]
#[command(name = "symsq", version)]
struct Cli {
    /// `key = value` file overriding partition, truncation and oracle settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// S(m, n; c), or a CSV sweep over all moduli with N(c) <= --sweep.
    Kloosterman {
        #[arg(long, allow_hyphen_values = true)]
        m: GaussianInt,
        #[arg(long, allow_hyphen_values = true)]
        n: GaussianInt,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "sweep")]
        c: Option<GaussianInt>,
        #[arg(long)]
        sweep: Option<u64>,
    },
    /// L_k(s; n) with its tail bound.
    ZagierL {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long, allow_hyphen_values = true)]
        n: GaussianInt,
        /// Truncation N(q) <= cutoff; defaults to the configured max_norm.
        #[arg(long)]
        cutoff: Option<u64>,
        #[arg(long, value_enum, default_value_t = Method::Truncated)]
        method: Method,
    },
    /// The twisted lattice zeta and the right side of its functional equation.
    Lerch {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long, allow_hyphen_values = true)]
        m: i32,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
        xi: Complex64,
    },
    /// Uniform expansion of F(1-s+ir, 1-s-ir, 1; -x) with s = 1/2 + it.
    HypAsym {
        #[arg(long)]
        x: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        terms: u32,
        /// Also evaluate the ODE oracle and the relative error.
        #[arg(long)]
        oracle: bool,
    },
    /// Kernel point data and the K-averaged kernel J (both routes).
    Kernel {
        #[arg(long, allow_hyphen_values = true)]
        l: GaussianInt,
        #[arg(long, allow_hyphen_values = true)]
        n: GaussianInt,
        #[arg(long)]
        y: f64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long = "T")]
        t: f64,
    },
    /// Histogram of the N1..N9 labels as CSV.
    Partition {
        #[arg(long, allow_hyphen_values = true)]
        l: GaussianInt,
        #[arg(long = "T")]
        t: f64,
    },
    /// MT, CT, ET, Sigma0 and Sigma2 with their error estimates.
    ExplicitTerms {
        #[arg(long, allow_hyphen_values = true)]
        l: GaussianInt,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex64,
        #[arg(long = "T")]
        t: f64,
    },
    /// Exact error exponent of the prime geodesic theorem.
    PgtExponent {
        #[arg(long)]
        theta: String,
        /// Defaults to 2 theta.
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Run a verification suite (or `all`) and print its report.
    Verify {
        #[arg(long)]
        suite: String,
    },
    /// Write a deterministic CSV table.
    Emit {
        /// One of hyp-asym, partition, kloosterman, zagier-l.
        #[arg(long)]
        command: String,
        /// e.g. `r=50,100,200;x=0.1,1,10`.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Truncated,
    Euler,
}

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("bad number {s:?}"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected RE or RE,IM, got {text:?}")),
    }
}

fn term_json(t: &symsq::Result<TermValue>) -> Value {
    match t {
        Ok(v) => json!({ "value": v.value, "error": v.error }),
        Err(e) => json!({ "unavailable": e.to_string() }),
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("values are finite JSON"));
}

enum Outcome {
    Done,
    ChecksFailed,
}

fn run(cli: Cli) -> symsq::Result<Outcome> {
    let cfg = HarnessConfig::load_opt(cli.config.as_deref())?;
    match cli.command {
        Command::Kloosterman { m, n, c, sweep } => {
            if let Some(max_norm) = sweep {
                print!("{}", table::kloosterman_table(m, n, max_norm)?.to_csv());
            } else {
                let c = c.expect("clap requires c without --sweep");
                let q = KloostermanQuery::new(m, n, c)?;
                let value = symsq::expsum::kloosterman(&q)?;
                let d = weil_diagnostic(&q)?;
                print_json(&json!({ "m": m, "n": n, "c": c, "value": value, "bound": d.bound, "ratio": d.ratio }));
            }
        }
        Command::ZagierL { s, n, cutoff, method } => {
            let mut trunc = cfg.truncation;
            if let Some(x) = cutoff {
                trunc = TruncationConfig::new(x, trunc.tail_tol)?;
            }
            let method = match method {
                Method::Truncated => ZagierMethod::Truncated,
                Method::Euler => ZagierMethod::EulerProduct,
            };
            let v = zagier_l(&ZagierQuery::new(s, n, trunc)?.with_method(method))?;
            print_json(&json!({ "s": s, "n": n, "result": v }));
        }
        Command::Lerch { s, m, xi } => {
            let q = LerchQuery::new(s, m, xi)?;
            let lhs = lerch_zeta_estimate(&q)?;
            let rhs = lerch_functional_equation_rhs_estimate(&q);
            let rhs_json = match &rhs {
                Ok(r) => json!({ "value": r.value, "error": r.error, "gap": (r.value - lhs.value).norm() }),
                Err(e) => json!({ "unavailable": e.to_string() }),
            };
            print_json(&json!({ "s": s, "m": m, "xi": xi, "lhs": { "value": lhs.value, "error": lhs.error }, "rhs": rhs_json }));
        }
        Command::HypAsym { x, r, t, terms, oracle } => {
            let p = SpectralParams::new(r, t)?;
            let u = hyp2f1_uniform(&p, x, terms)?;
            let mut out = json!({ "x": x, "r": r, "t": t, "expansion": u });
            if oracle {
                let o = spectral_oracle_with(&p, x, cfg.oracle)?;
                out["oracle"] = json!(o);
                out["rel_err"] = json!((u.value - o).norm() / o.norm());
            }
            print_json(&out);
        }
        Command::Kernel { l, n, y, s, t } => {
            let point = kernel_point(n, l, y)?;
            let spec = TestFunctionSpec::standard(t)?;
            let j = kernel_j_avg(n, l, y, s, &spec)?;
            print_json(&json!({ "point": point, "spec": spec, "s": s, "j_avg": j }));
        }
        Command::Partition { l, t } => {
            print!("{}", table::partition_table(l, t, &cfg)?.to_csv());
        }
        Command::ExplicitTerms { l, s, t } => {
            let spec = TestFunctionSpec::standard(t)?;
            let e = explicit_terms(l, s, &spec)?;
            print_json(&json!({
                "l": l, "s": s, "spec": spec,
                "mt": term_json(&e.mt), "ct": term_json(&e.ct), "et": term_json(&e.et),
                "sigma0": term_json(&e.sigma0), "sigma2": term_json(&e.sigma2),
            }));
        }
        Command::PgtExponent { theta, alpha } => {
            let theta = parse_rational(&theta)?;
            let alpha = match alpha {
                Some(a) => parse_rational(&a)?,
                None => &theta * num_rational::BigRational::from_integer(2.into()),
            };
            let inp = ExponentInput::new(theta.clone(), alpha)?;
            let r = pgt_error_exponent(&inp);
            let prev = previous_exponent(&theta)?;
            print_json(&json!({
                "theta": inp.theta.to_string(), "alpha": inp.alpha.to_string(),
                "exponent": r.exponent.to_string(), "exponent_decimal": decimal(&r.exponent, 6),
                "y_exponent": r.y_exponent.to_string(), "y_exponent_decimal": decimal(&r.y_exponent, 6),
                "previous_exponent": prev.to_string(), "previous_exponent_decimal": decimal(&prev, 6),
            }));
        }
        Command::Verify { suite } => {
            let names: Vec<&str> = if suite == "all" { verify::SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut reports: Vec<SuiteReport> = Vec::new();
            for name in names {
                let rep = verify::run_suite(name, &cfg)?;
                for c in &rep.checks {
                    eprintln!("{:<5} {}/{} measured {:.3e} bound {:.3e}", format!("{:?}", c.status).to_uppercase(), rep.suite_name, c.name, c.measured, c.bound);
                }
                reports.push(rep);
            }
            print_json(&serde_json::to_value(&reports).expect("reports serialize"));
            if reports.iter().any(|r| r.precision_failure()) {
                return Err(Error::Precision("a suite hit a precision failure".into()));
            }
            if !reports.iter().all(SuiteReport::passed) {
                return Ok(Outcome::ChecksFailed);
            }
        }
        Command::Emit { command, grid, out } => {
            let t = table::emit_table(&command, &grid, &out, &cfg)?;
            eprintln!("wrote {} rows to {}", t.rows.len(), out.display());
        }
    }
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = symsq::par::init_threads_from_env() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_USAGE);
    }
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ChecksFailed) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Precision(_) => EXIT_PRECISION,
                Error::Io(_) => EXIT_FAIL,
                _ => EXIT_USAGE,
            })
        }
    }
}
