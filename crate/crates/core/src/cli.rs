//! Command line driver. Exit codes: 0 success, 1 failed check, 2 usage or configuration error.

use std::ffi::OsString;
use std::io::Write;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::coeffs::{a_coefficient_exact, c_tilde, LogBasis};
use crate::cohen;
use crate::error::{Error, Result};
use crate::lattice::presets::Preset;
use crate::lattice::{enumerate_orbits, reduce, Coset, LatticeDescriptor, TParam};
use crate::qfield::QuadElem;
use crate::specfun::QuadratureSpec;
use crate::thetaseries::{self as ts, EvalPoint, EvalRecord, SeriesValue, Tau, WeightPolynomial};
use crate::verify::{run_suite, Suite, SuiteOptions};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "mockmaass", version, about = "Theta integrals on anisotropic lattices of signature (1,1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List Gamma_L orbits with their harmonic coefficients
    Orbits(OrbitsArgs),
    /// Evaluate one series at one point
    Eval(EvalArgs),
    /// Run a verification suite, one JSON report per line
    Verify(VerifyArgs),
    /// T(n) from Pell orbits against the sigma / sigma* coefficients
    Cohen(CohenArgs),
}

#[derive(Args, Debug, Clone)]
pub struct LatticeArgs {
    /// Built-in lattice
    #[arg(long, conflicts_with = "descriptor")]
    pub preset: Option<String>,
    /// Coset of a preset: h1, h2, ... (all cosets when omitted, where that makes sense)
    #[arg(long, requires = "preset")]
    pub coset: Option<String>,
    /// Lattice descriptor JSON file
    #[arg(long)]
    pub descriptor: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct OrbitsArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Largest |n| = N |Q| listed (N = 24 for cohen, 48 for nontrivial, 1 for descriptors)
    #[arg(long, default_value = "100")]
    pub norm_bound: String,
    #[arg(long, default_value = "1")]
    pub t1: String,
    #[arg(long, default_value = "eps")]
    pub t2: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub series: String,
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// u,v
    #[arg(long, allow_hyphen_values = true)]
    pub tau: String,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t2: Option<String>,
    /// Coefficients of P, constant term first, for vartheta-hat-P
    #[arg(long, allow_hyphen_values = true)]
    pub poly: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub preset: Option<String>,
    /// Replaces every tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 2400)]
    pub max_n: i64,
}

#[derive(Args, Debug)]
pub struct CohenArgs {
    #[arg(long, default_value_t = 240)]
    pub max_n: i64,
    #[arg(long)]
    pub json: bool,
}

struct Usage(String);

impl From<Error> for Usage {
    fn from(e: Error) -> Self {
        Usage(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, Usage>;

/// Parses a value of t: eps, eps^k, epsL, epsL^k, a rational p/q or a decimal, all kept exact.
pub fn parse_t(s: &str, coset: &Coset) -> Result<TParam> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot read t = '{s}'"));
    let lat = coset.lattice();
    let (base, unit) = if let Some(rest) = s.strip_prefix("epsL") {
        (rest, Some(lat.eps_l().eps_l.clone()))
    } else if let Some(rest) = s.strip_prefix("eps") {
        (rest, Some(lat.field().totally_positive_unit()))
    } else {
        (s, None)
    };
    if let Some(u) = unit {
        let k: i64 = if base.is_empty() {
            1
        } else {
            base.strip_prefix('^').ok_or_else(bad)?.trim_matches(|c| c == '(' || c == ')').parse().map_err(|_| bad())?
        };
        return TParam::from_elem(&u.pow(k)?);
    }
    let q = parse_rational(s).ok_or_else(bad)?;
    if !q.is_positive() {
        return Err(Error::InvalidParameter(format!("t must be positive, got {s}")));
    }
    TParam::from_elem(&QuadElem::rational(q, lat.d()))
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let q = BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32));
    Some(if neg { -q } else { q })
}

fn parse_tau(s: &str) -> Result<Tau> {
    let bad = || Error::InvalidParameter(format!("tau must be 'u,v', got '{s}'"));
    let (u, v) = s.split_once(',').ok_or_else(bad)?;
    let u: f64 = u.trim().parse().map_err(|_| bad())?;
    let v: f64 = v.trim().parse().map_err(|_| bad())?;
    Tau::new(u, v)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter(format!("tolerances must be positive, got {tol}")));
    }
    Ok(())
}

struct Selected {
    cosets: Vec<(String, Coset)>,
    /// N with n = N Q
    scale: i64,
    preset: Option<Preset>,
}

fn select(args: &LatticeArgs, all_by_default: bool) -> Result<Selected> {
    if let Some(path) = &args.descriptor {
        let text = std::fs::read_to_string(path)?;
        let coset = LatticeDescriptor::from_json(&text)?.build()?;
        return Ok(Selected { cosets: vec![("descriptor".into(), coset)], scale: 1, preset: None });
    }
    let preset = Preset::from_str(args.preset.as_deref().unwrap_or("cohen"))?;
    let all: Vec<(String, Coset)> = preset.cosets().into_iter().enumerate().map(|(i, c)| (format!("h{}", i + 1), c)).collect();
    let cosets = match &args.coset {
        Some(name) => {
            let c = all.iter().find(|(n, _)| n == name).cloned();
            vec![c.ok_or_else(|| Error::Unknown { kind: "coset", name: name.clone() })?]
        }
        None if all_by_default => all,
        None => all.into_iter().take(1).collect(),
    };
    Ok(Selected { cosets, scale: preset.index_scale(), preset: Some(preset) })
}

#[derive(Serialize)]
struct OrbitRow {
    schema_version: u32,
    coset: String,
    h: String,
    n: String,
    q: String,
    /// canonical representative for t1, scaled to the table generator
    beta: String,
    /// nonzero a_lambda(t1, t2) within the orbit, by generator
    a_entries: Vec<(String, String)>,
    a_sum: String,
    c_tilde: f64,
    c_tilde_exact: String,
}

fn describe(v: &crate::coeffs::CoefficientValue) -> String {
    use crate::coeffs::CoefficientValue::*;
    // r log eps_L + (1/2) log mu
    let lin = |c: &crate::coeffs::ExactCoefficient| {
        let one = QuadElem::one(c.mu().d());
        match (c.r().is_zero(), *c.mu() == one) {
            (true, true) => "0".to_string(),
            (false, true) => format!("{} log eps_L", c.r()),
            (true, false) => format!("log({})/2", c.mu()),
            (false, false) => format!("{} log eps_L + log({})/2", c.r(), c.mu()),
        }
    };
    match v {
        Rational(q) => q.to_string(),
        Linear(c) => lin(c),
        LogEpsTimes(c) => format!("log eps_L ({})", lin(c)),
    }
}

fn cmd_orbits(a: &OrbitsArgs, out: &mut dyn Write) -> CliResult<i32> {
    let sel = select(&a.lattice, true)?;
    let bound = parse_rational(&a.norm_bound).filter(|b| !b.is_negative()).ok_or_else(|| Usage(format!("bad --norm-bound '{}'", a.norm_bound)))?;
    let gen = sel.preset.map(|p| p.generator_scale());
    let mut rows = Vec::new();
    for (name, coset) in &sel.cosets {
        let lat = coset.lattice();
        let t1 = parse_t(&a.t1, coset)?;
        let t2 = parse_t(&a.t2, coset)?;
        if t2.value() <= t1.value() {
            return Err(Usage("need t1 < t2".into()));
        }
        let basis = LogBasis::of(lat);
        let scale_gen = |x: &QuadElem| match &gen {
            Some(g) => (g * x).to_string(),
            None => x.to_string(),
        };
        let qb = &bound / BigRational::from_integer(sel.scale.into());
        if qb.is_zero() {
            continue;
        }
        for o in enumerate_orbits(coset, &t1, &qb)? {
            if o.is_zero() {
                continue;
            }
            let s2 = t2.exact_square()?;
            let mut x = o.lambda0.clone();
            let mut entries = Vec::new();
            let mut sum = BigRational::zero();
            while x.abs_ratio()?.cmp_real(s2) != std::cmp::Ordering::Greater {
                let av = a_coefficient_exact(&x, &t1, &t2)?;
                if !av.is_zero() {
                    entries.push((scale_gen(&x), av.to_string()));
                }
                sum += av;
                x = &x * &basis.eps_l;
            }
            let (rep, _) = reduce(coset, &o.lambda0, &t1)?;
            let ct = c_tilde(&rep, &basis)?;
            let n = &o.q_value * BigRational::from_integer(sel.scale.into());
            rows.push(OrbitRow {
                schema_version: SCHEMA_VERSION,
                coset: name.clone(),
                h: coset.h().to_string(),
                n: n.to_string(),
                q: o.q_value.to_string(),
                beta: scale_gen(&o.lambda0),
                a_entries: entries,
                a_sum: sum.to_string(),
                c_tilde: ct.to_f64(),
                c_tilde_exact: describe(&ct),
            });
        }
    }
    write_rows(out, &rows, a.json, |r| {
        let entries: Vec<String> = r.a_entries.iter().map(|(b, v)| format!("{b}: {v}")).collect();
        format!("{:<10} {:>6} {:<22} {:<40} {:>6} {:>14.10}  {}", r.coset, r.n, r.beta, entries.join("; "), r.a_sum, r.c_tilde, r.c_tilde_exact)
    }, &format!("{:<10} {:>6} {:<22} {:<40} {:>6} {:>14}  {}", "coset", "n", "beta", "a(t1,t2) entries", "sum a", "c~(t1)", "c~ exact"))?;
    Ok(0)
}

fn write_rows<R: Serialize>(out: &mut dyn Write, rows: &[R], json: bool, human: impl Fn(&R) -> String, header: &str) -> CliResult<()> {
    let io = |e: std::io::Error| Usage(e.to_string());
    if json {
        for r in rows {
            writeln!(out, "{}", serde_json::to_string(r).map_err(|e| Usage(e.to_string()))?).map_err(io)?;
        }
    } else {
        writeln!(out, "{header}").map_err(io)?;
        for r in rows {
            writeln!(out, "{}", human(r)).map_err(io)?;
        }
    }
    Ok(())
}

fn need<'a>(v: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    v.as_deref().ok_or_else(|| Usage(format!("--{flag} is required for this series")))
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> CliResult<i32> {
    check_tol(a.tol)?;
    let tau = parse_tau(&a.tau)?;
    let sel = select(&a.lattice, false)?;
    let (name, coset) = &sel.cosets[0];
    let spec = QuadratureSpec { abs_tol: a.tol, rel_tol: a.tol, max_depth: 60 };
    let t_of = |flag: &str, v: &Option<String>| -> CliResult<TParam> { Ok(parse_t(need(v, flag)?, coset)?) };
    let mut t_rec = None;
    let mut pair = None;
    let value: SeriesValue = match a.series.as_str() {
        "theta" | "theta11" => {
            let t = t_of("t", &a.t)?;
            t_rec = Some(t.value());
            let p = EvalPoint::new(tau.u, tau.v, t.value())?;
            if a.series == "theta" {
                ts::siegel_theta(coset, &p, a.tol)?
            } else {
                ts::theta_11(coset, &p, a.tol)?
            }
        }
        "phi" | "vartheta-tilde" | "vartheta-tilde-plus" => {
            let t = t_of("t", &a.t)?;
            t_rec = Some(t.value());
            match a.series.as_str() {
                "phi" => ts::phi_c0(coset, tau, t.value(), a.tol)?,
                "vartheta-tilde" => ts::vartheta_tilde(coset, tau, t.value(), &spec)?,
                _ => ts::vartheta_tilde_plus(coset, tau, &t, a.tol)?,
            }
        }
        "vartheta-hat" | "vartheta-hat-plus" | "vartheta-fourier" | "vartheta-hat-P" => {
            let t1 = t_of("t1", &a.t1)?;
            let t2 = t_of("t2", &a.t2)?;
            pair = Some([t1.value(), t2.value()]);
            match a.series.as_str() {
                "vartheta-hat" => ts::vartheta_hat_quadrature(coset, tau, t1.value(), t2.value(), &spec)?,
                "vartheta-hat-plus" => ts::vartheta_hat_plus(coset, tau, &t1, &t2, a.tol)?,
                "vartheta-fourier" => ts::vartheta_fourier(coset, tau, &t1, &t2, a.tol)?,
                _ => {
                    let coeffs = need(&a.poly, "poly")?
                        .split(',')
                        .map(|c| c.trim().parse::<f64>().map(|x| Complex64::new(x, 0.0)))
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| Usage("--poly must be comma separated reals".into()))?;
                    ts::vartheta_hat_p(coset, tau, t1.value(), t2.value(), &WeightPolynomial::new(coeffs)?, &spec)?
                }
            }
        }
        other => return Err(Error::Unknown { kind: "series", name: other.to_string() }.into()),
    };
    let rec = EvalRecord {
        schema_version: SCHEMA_VERSION,
        series: a.series.clone(),
        coset: format!("{name} ({})", coset.h()),
        tau: [tau.u, tau.v],
        t: t_rec,
        t1_t2: pair,
        value: [value.value.re, value.value.im],
        tail_bound: value.tail_bound,
        quad_error: value.quad_error,
    };
    let line = serde_json::to_string(&rec).map_err(|e| Usage(e.to_string()))?;
    writeln!(out, "{line}").map_err(|e| Usage(e.to_string()))?;
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> CliResult<i32> {
    let suite = Suite::from_str(&a.suite)?;
    if let Some(t) = a.tol {
        check_tol(t)?;
    }
    if a.max_n < 24 {
        return Err(Usage("--max-n must be at least 24".into()));
    }
    let presets = match &a.preset {
        Some(p) => vec![Preset::from_str(p)?],
        None => Preset::ALL.to_vec(),
    };
    let reports = run_suite(suite, &SuiteOptions { presets, tol: a.tol, max_n: a.max_n });
    let mut ok = true;
    for r in &reports {
        ok &= r.passed;
        writeln!(out, "{}", r.to_json_line()?).map_err(|e| Usage(e.to_string()))?;
    }
    Ok(if ok { 0 } else { 1 })
}

#[derive(Serialize)]
struct CohenRow {
    schema_version: u32,
    n: i64,
    t: i64,
    count_pm1: i64,
    count_pm5: i64,
    series_coefficient: String,
    agree: bool,
}

fn cmd_cohen(a: &CohenArgs, out: &mut dyn Write) -> CliResult<i32> {
    if a.max_n < 1 {
        return Err(Usage("--max-n must be positive".into()));
    }
    let order = (a.max_n / 24 + 2) as usize;
    let (s, ss) = (cohen::sigma_expansion(order), cohen::sigma_star_expansion(order));
    let mut rows = Vec::new();
    for n in cohen::indices(a.max_n) {
        let p = cohen::pell_t(n)?;
        let c = cohen::series_t(n, &s, &ss);
        rows.push(CohenRow {
            schema_version: SCHEMA_VERSION,
            n,
            t: p.t_value,
            count_pm1: p.count_pm1,
            count_pm5: p.count_pm5,
            agree: c == BigInt::from(p.t_value),
            series_coefficient: c.to_string(),
        });
    }
    let ok = rows.iter().all(|r| r.agree);
    write_rows(out, &rows, a.json, |r| format!("{:>6} {:>6} {:>8} {:>6}", r.n, r.t, r.series_coefficient, if r.agree { "yes" } else { "NO" }),
        &format!("{:>6} {:>6} {:>8} {:>6}", "n", "T(n)", "series", "agree"))?;
    Ok(if ok { 0 } else { 1 })
}

/// Runs the tool on the given arguments and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let r = match &cli.command {
        Command::Orbits(a) => cmd_orbits(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Cohen(a) => cmd_cohen(a, out),
    };
    match r {
        Ok(code) => code,
        Err(Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::presets::cohen_cosets;
    use crate::qfield::rat;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("mockmaass").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn t_values_are_exact() {
        let c = &cohen_cosets()[0];
        assert_eq!(parse_t("eps", c).unwrap().square(), Some(&QuadElem::from_ints(49, 20, 6)));
        assert_eq!(parse_t("epsL^-1", c).unwrap().square(), Some(&QuadElem::from_ints(49, -20, 6).pow(2).unwrap()));
        assert_eq!(parse_t("1.3", c).unwrap().square(), Some(&QuadElem::rational(rat(169, 100), 6)));
        assert_eq!(parse_t("3/2", c).unwrap().value(), 1.5);
        assert!(parse_t("-1", c).is_err());
        assert!(parse_t("e", c).is_err());
        assert!(parse_t("eps^x", c).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["eval", "--series", "theta", "--tau", "0.2,-1", "--t", "1"]).0, 2);
        assert_eq!(run_str(&["eval", "--series", "theta", "--tau", "0.2,1", "--t", "0"]).0, 2);
        assert_eq!(run_str(&["eval", "--series", "zeta", "--tau", "0.2,1", "--t", "1"]).0, 2);
        assert_eq!(run_str(&["verify", "--suite", "nope"]).0, 2);
        assert_eq!(run_str(&["frobnicate"]).0, 2);
        let (code, out, _) = run_str(&["orbits", "--preset", "cohen", "--norm-bound", "0"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 1);
    }

    #[test]
    fn eval_theta11_vanishes() {
        let (code, out, _) = run_str(&["eval", "--series", "theta11", "--preset", "cohen", "--coset", "h1", "--tau", "0.2,0.9", "--t", "1"]);
        assert_eq!(code, 0);
        let rec: EvalRecord = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(rec.schema_version, SCHEMA_VERSION);
        assert!(rec.value[0].abs() <= 1e-12 && rec.value[1].abs() <= 1e-12);
    }
}
