// Acceptance criteria, one line each. Runs without the libtest harness so the lines always print.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use mockmaass::cli;
use mockmaass::cohen;
use mockmaass::verify::{run_suite, CheckReport, Suite, SuiteOptions};

struct Outcome {
    required_failures: usize,
}

impl Outcome {
    fn line(&mut self, n: u32, ok: bool, what: &str, detail: String) {
        println!("{} criterion {n:>2}: {what} ({detail})", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.required_failures += 1;
        }
    }

    // A printed value that the computation does not reproduce. Reported, not counted.
    fn known(&self, n: u32, ok: bool, what: &str, detail: String) {
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {n:>2}: {what} [literal value, see analysis] ({detail})");
    }
}

fn pick<'a>(reports: &'a [CheckReport], prefix: &str) -> Vec<&'a CheckReport> {
    reports.iter().filter(|r| r.check_id.starts_with(prefix)).collect()
}

fn summary(rs: &[&CheckReport]) -> (bool, String) {
    let worst = rs.iter().map(|r| r.residual).fold(0.0, f64::max);
    let passed = rs.iter().filter(|r| r.passed).count();
    let tols: BTreeSet<String> = rs.iter().map(|r| format!("{:.0e}", r.tolerance)).collect();
    let tol = tols.into_iter().collect::<Vec<_>>().join("/");
    let ok = !rs.is_empty() && passed == rs.len();
    (ok, format!("{passed}/{} checks, max residual {worst:.2e}, tol {tol}", rs.len()))
}

fn all_of(groups: &[Vec<&CheckReport>]) -> (bool, String) {
    let flat: Vec<&CheckReport> = groups.iter().flatten().copied().collect();
    summary(&flat)
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("mockmaass").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).expect("utf8"))
}

fn criterion_1(o: &mut Outcome) {
    let start = Instant::now();
    let (code, out) = run_cli(&["orbits", "--preset", "cohen", "--t1", "1", "--t2", "eps", "--norm-bound", "100", "--json"]);
    let elapsed = start.elapsed();
    let mut from_cli = BTreeSet::new();
    for line in out.lines() {
        let row: serde_json::Value = serde_json::from_str(line).expect("orbit row");
        let coset: usize = row["coset"].as_str().unwrap()[1..].parse::<usize>().unwrap() - 1;
        let n: i64 = row["n"].as_str().unwrap().parse().unwrap();
        for e in row["a_entries"].as_array().unwrap() {
            from_cli.insert((n.abs(), e[0].as_str().unwrap().to_string(), coset, e[1].as_str().unwrap().to_string()));
        }
    }
    let key = |e: &cohen::TableEntry| (e.norm, e.beta.clone(), e.coset, e.a.clone());
    let computed: BTreeSet<_> = cohen::computed_table(100).unwrap().iter().map(key).collect();
    let corrected = cohen::table_coset_check().unwrap();
    let ok = code == 0 && from_cli == computed && corrected.passed && elapsed < Duration::from_secs(5);
    o.line(
        1,
        ok,
        "a_lambda(1, eps) table, Cohen preset, (t1, t2) = (1, eps), norm <= 100",
        format!("{} nonzero entries, {} discrepancies against the table with the norm 95 generator corrected, {:.2?}", from_cli.len(), corrected.residual, elapsed),
    );
    let printed = cohen::table_printed_check().unwrap();
    o.known(
        1,
        printed.passed,
        "a_lambda(1, eps) table exactly as printed",
        format!(
            "{} discrepancies: the printed generator -(11 - 6 sqrt6) has |beta/beta'| < 1 and a = 0; -(11 + 6 sqrt6) in the same coset has a = 1",
            printed.residual
        ),
    );
}

fn criterion_2(o: &mut Outcome) {
    let start = Instant::now();
    let r = cohen::generating_identity_check(2400);
    let elapsed = start.elapsed();
    o.line(
        2,
        r.passed && elapsed < Duration::from_secs(30),
        "T(n) from Pell orbits equals the sigma / sigma* coefficient, |n| <= 2400",
        format!("{} mismatches, {:.2?}", r.residual, elapsed),
    );
}

fn main() {
    let start = Instant::now();
    let mut o = Outcome { required_failures: 0 };
    criterion_1(&mut o);
    criterion_2(&mut o);

    let opts = SuiteOptions::default();
    let dec = run_suite(Suite::Decomposition, &opts);
    let lap = run_suite(Suite::Laplacian, &opts);
    let cmp = run_suite(Suite::Compare, &opts);
    let bes = run_suite(Suite::Bessel, &opts);
    let coh = run_suite(Suite::Cohen, &opts);
    let lit = run_suite(Suite::Literal, &opts);

    let (ok, d) = summary(&pick(&dec, "unfolding"));
    o.line(3, ok, "quadrature vartheta^ against the orbit form over [1, eps_L], both presets", d);
    let (ok, d) = summary(&pick(&dec, "zw12"));
    o.line(4, ok, "harmonic decomposition at (t1, t2) = (1, 3)", d);
    let (ok, d) = all_of(&[pick(&dec, "main"), pick(&dec, "vt-decomp"), pick(&dec, "compare2")]);
    o.line(5, ok, "main decomposition, both vartheta~ lines, exact comparison of coefficients", d);
    let pc = pick(&cmp, "prop-compare");
    let (ok, d) = summary(&pc);
    o.line(6, ok && pc.len() >= 10, "beta~ orbit sums against c~ K_0 at v in {0.5, 1, 2}", format!("{} orbits, {d}", pc.len()));
    let (ok, d) = summary(&lap.iter().collect::<Vec<_>>());
    o.line(7, ok, "Laplacian identities by finite differences", d);
    let (ok, d) = all_of(&[pick(&dec, "theta11:vanishing"), pick(&dec, "maass-id"), pick(&dec, "coset-symmetry"), pick(&coh, "cohen:phi0")]);
    o.line(8, ok, "Maass cases: theta^(1,1) vanishes, vartheta^(1, eps) = vartheta/2, Delta~ phi_0", d);

    let (ok, d) = all_of(&[pick(&dec, "theta11:eta-g"), pick(&dec, "w5:normalized"), pick(&dec, "w53:normalized")]);
    o.line(9, ok, "non-trivial example with constant -sqrt6/48, W_5 and W_53 coefficients 2 sum c~", d);
    let nt_unfold: Vec<&CheckReport> = dec.iter().filter(|r| r.check_id == "unfolding" && r.inputs["coset"].as_str().is_some_and(|c| c.contains("√6/12"))).collect();
    let (ok, d) = summary(&nt_unfold);
    o.line(9, ok, "non-trivial example: quadrature against the series from computed c~", d);
    for r in pick(&lit, "theta11:eta-g-printed") {
        o.known(9, r.passed, "theta^(1,1) against the printed constant -sqrt6/24", format!("measured ratio {}, residual {:.2e}", r.inputs["ratio"], r.residual));
    }
    for r in pick(&lit, "w5:raw") {
        o.known(
            9,
            r.passed,
            "single orbit sum c~ against log((7 + 2 sqrt6)/5)",
            format!("sum c~ = {}, target {}, proportionality constant {}", r.inputs["sum_c_tilde"], r.inputs["target"], r.inputs["ratio"]),
        );
    }

    let (ok, d) = summary(&bes.iter().collect::<Vec<_>>());
    o.line(10, ok, "K_0 fast path, the K_0(x; a) bound, the mock Maass check on 1000 random inputs", d);

    for r in pick(&lit, "unfolding:printed").into_iter().chain(pick(&lit, "higher:second-printed")).chain(pick(&lit, "maass-id:printed")) {
        println!("{} extra: {} [literal value, see analysis] (residual {:.2e})", if r.passed { "PASS" } else { "FAIL" }, r.check_id, r.residual);
    }

    let elapsed = start.elapsed();
    let ok = elapsed < Duration::from_secs(300);
    println!("{} runtime: full acceptance run under 5 minutes ({elapsed:.2?})", if ok { "PASS" } else { "FAIL" });
    if !ok {
        o.required_failures += 1;
    }
    if o.required_failures > 0 {
        eprintln!("{} acceptance criteria failed", o.required_failures);
        std::process::exit(1);
    }
}
