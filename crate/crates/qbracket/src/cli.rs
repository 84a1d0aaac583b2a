//! Command-line front end: `verify`, `suite`, `series`, `skew-npoint` and `list`.
//!
//! Output is JSON on standard output. Exit codes: 0 when everything passes, 1 when a
//! verification fails or errors, 2 for usage errors.

use crate::characters::{omega_series, v_series};
use crate::quasimodular::shifted_power_bracket;
use crate::rational::{fmt, int, parse, Rational};
use crate::report::{check_ids, run_check, run_suite, Params, Status, CHECKS};
use crate::skew::{npoint_skew_brute, npoint_skew_closed, psi_series};
use crate::special::{eisenstein, eta_series, theta_deriv_series, xi_value};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

/// Environment variable fixing the worker thread count.
pub const THREADS_VAR: &str = "QBRACKET_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qbracket", version, about = "Exact verification of partition q-bracket identities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one named check and print its report.
    Verify {
        id: String,
        #[command(flatten)]
        flags: Flags,
        /// Add elapsed_ms to the report.
        #[arg(long)]
        timing: bool,
    },
    /// Run the whole battery and print all reports with the aggregate verdict.
    Suite {
        /// Add randomized evaluation points drawn from this seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        timing: bool,
        /// Suppress per-report progress lines on standard error.
        #[arg(long)]
        quiet: bool,
    },
    /// Print a series as JSON.
    Series {
        #[arg(value_enum)]
        name: SeriesName,
        #[command(flatten)]
        flags: Flags,
        /// Power-sum indices for `bracket`, e.g. `1,1`.
        #[arg(long, value_delimiter = ',')]
        ks: Option<Vec<u32>>,
    },
    /// Print the normalized n-point function of the skew character.
    SkewNpoint {
        #[arg(long, conflicts_with = "brute")]
        closed: bool,
        #[arg(long)]
        brute: bool,
        #[command(flatten)]
        flags: Flags,
    },
    /// List check ids with what each establishes.
    List,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesName {
    Eta,
    Theta,
    Eisenstein,
    Xi,
    Omega,
    VChar,
    Psi,
    Bracket,
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    /// Truncation order, grade, or partition cutoff.
    #[arg(long)]
    order: Option<usize>,
    /// Evaluation roots `s_k` (arguments `t_k = s_k^2`), e.g. `2,3` or `5/4,6/5`.
    #[arg(long, value_delimiter = ',', value_parser = parse_rational)]
    points: Option<Vec<Rational>>,
    /// Numeric `q0`, a square of a rational.
    #[arg(long, value_parser = parse_rational)]
    q: Option<Rational>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long = "K")]
    big_k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl From<Flags> for Params {
    fn from(f: Flags) -> Self {
        Params { order: f.order, points: f.points, q: f.q, n: f.n, m: f.m, k: f.k, big_k: f.big_k, seed: f.seed }
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    parse(s).map_err(|e| e.to_string())
}

/// Exit code and standard output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

fn usage_error(msg: impl std::fmt::Display) -> Outcome {
    Outcome { code: 2, stdout: json!({ "error": msg.to_string() }).to_string() }
}

fn pretty<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

/// Sizes the global worker pool from [`THREADS_VAR`], if set. Report content does not
/// depend on the thread count.
pub fn init_threads() -> Result<(), String> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.parse().map_err(|_| format!("{THREADS_VAR} must be a positive integer, got '{v}'"))?;
        if n == 0 {
            return Err(format!("{THREADS_VAR} must be positive"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome { code, stdout: e.to_string() };
        }
    };
    match cli.command {
        Command::Verify { id, flags, timing } => match run_check(&id, &flags.into(), timing) {
            Ok(r) => Outcome { code: if r.passed() { 0 } else { 1 }, stdout: pretty(&r) },
            Err(e) => usage_error(e),
        },
        Command::Suite { seed, timing, quiet } => {
            let progress = |r: &crate::report::VerificationReport| {
                if !quiet {
                    let status = match r.status {
                        Status::Pass => "pass",
                        Status::Fail => "FAIL",
                        Status::Error => "ERROR",
                    };
                    eprintln!("{status:5} {} {}", r.identity, r.params);
                }
            };
            match run_suite(seed, timing, progress) {
                Ok(s) => Outcome { code: if s.verdict.status == Status::Pass { 0 } else { 1 }, stdout: pretty(&s) },
                Err(e) => usage_error(e),
            }
        }
        Command::Series { name, flags, ks } => match series_json(name, &flags, ks) {
            Ok(v) => Outcome { code: 0, stdout: v.to_string() },
            Err(e) => usage_error(e),
        },
        Command::SkewNpoint { closed, brute, flags } => {
            if !closed && !brute {
                return usage_error("pass --closed or --brute");
            }
            let n = flags.n.unwrap_or(2);
            let deg = flags.k.unwrap_or(5) as u32;
            let order = flags.order.unwrap_or(15);
            if closed {
                return Outcome { code: 0, stdout: npoint_skew_closed(n, deg, order).to_json().to_string() };
            }
            let j = (deg as usize).div_ceil(2).max(1);
            match npoint_skew_brute(n, deg, order, j) {
                Ok(p) => Outcome { code: 0, stdout: p.to_json().to_string() },
                Err(e) => usage_error(e),
            }
        }
        Command::List => {
            let list: Vec<Value> = CHECKS.iter().map(|c| json!({ "id": c.id, "anchor": c.anchor })).collect();
            debug_assert_eq!(list.len(), check_ids().len());
            Outcome { code: 0, stdout: pretty(&list) }
        }
    }
}

fn series_json(name: SeriesName, f: &Flags, ks: Option<Vec<u32>>) -> Result<Value, String> {
    let order = f.order.unwrap_or(10);
    let single_point = || -> Result<Rational, String> {
        match &f.points {
            None => Ok(int(2)),
            Some(v) if v.len() == 1 => Ok(v[0].clone()),
            Some(_) => Err("theta takes a single --points value".into()),
        }
    };
    Ok(match name {
        SeriesName::Eta => eta_series(order).to_json(),
        SeriesName::Theta => theta_deriv_series(f.k.unwrap_or(0) as u32, &single_point()?, order).to_json(),
        SeriesName::Eisenstein => eisenstein(f.k.unwrap_or(2) as u32, order).map_err(|e| e.to_string())?.to_json(),
        SeriesName::Xi => {
            let vals: Vec<Value> = (1..=order.max(1) as i64)
                .map(|n| json!({ "s": -n, "value": fmt(&xi_value(-n).expect("negative argument")) }))
                .collect();
            json!(vals)
        }
        SeriesName::Omega => omega_series(f.big_k.unwrap_or(1).max(1), order).to_json(),
        SeriesName::VChar => v_series(f.big_k.unwrap_or(1).max(1), order).to_json(),
        SeriesName::Psi => psi_series(f.big_k.unwrap_or(2).max(1), order).map_err(|e| e.to_string())?.to_json(),
        SeriesName::Bracket => {
            let ks = ks.unwrap_or_else(|| vec![1]);
            if ks.contains(&0) {
                return Err("--ks entries must be positive".into());
            }
            shifted_power_bracket(&ks, order).to_json()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> Outcome {
        run(std::iter::once("qbracket").chain(args.iter().copied()))
    }

    #[test]
    fn eisenstein_series_json() {
        let o = call(&["series", "eisenstein", "--k", "2", "--order", "4"]);
        assert_eq!(o.code, 0);
        assert_eq!(o.stdout, r#"{"coeffs":["-1/24","1","3","4","7"],"offset":"0"}"#);
    }

    #[test]
    fn verify_npoint_passes() {
        let o = call(&["verify", "npoint", "--n", "2", "--points", "2,3", "--order", "14"]);
        assert_eq!(o.code, 0, "{}", o.stdout);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["status"], "pass");
        assert!(v.get("first_mismatch").is_none());
    }

    #[test]
    fn counts_values() {
        let o = call(&["verify", "counts", "--n", "3"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["detail"]["values"][0]["sum3"], 0);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["verify", "no-such-check"]).code, 2);
        assert_eq!(call(&["frobnicate"]).code, 2);
        assert_eq!(call(&["verify", "npoint", "--points", "2,x"]).code, 2);
        assert_eq!(call(&["skew-npoint"]).code, 2);
    }

    #[test]
    fn error_reports_exit_one() {
        // t = 1 makes F undefined.
        let o = call(&["verify", "npoint", "--points", "1", "--order", "4"]);
        assert_eq!(o.code, 1);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["status"], "error");
    }

    #[test]
    fn negative_m_is_accepted() {
        let o = call(&["verify", "theta-diffeq", "--m", "-3", "--order", "6"]);
        assert_eq!(o.code, 0, "{}", o.stdout);
    }

    #[test]
    fn skew_routes_print_the_same_polynomial() {
        let a = call(&["skew-npoint", "--closed", "--n", "2", "--k", "3", "--order", "6"]);
        let b = call(&["skew-npoint", "--brute", "--n", "2", "--k", "3", "--order", "6"]);
        assert_eq!(a.code, 0);
        assert_eq!(a.stdout, b.stdout);
    }
}
