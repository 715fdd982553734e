use mockmaass::cli::run;
use mockmaass::lattice::presets::Preset;
use mockmaass::thetaseries::EvalRecord;
use mockmaass::verify::CheckReport;

fn mm(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(std::iter::once("mockmaass").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn eval(args: &[&str]) -> EvalRecord {
    let (code, out, err) = mm(&[&["eval"], args].concat());
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(out.trim()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(mm(&["--help"]).0, 0);
    assert_eq!(mm(&["eval", "--help"]).0, 0);
    assert_eq!(mm(&["--version"]).0, 0);
    assert_eq!(mm(&[]).0, 2);
}

#[test]
fn descriptor_file() {
    let dir = std::env::temp_dir().join(format!("mockmaass-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.json");
    std::fs::write(&good, Preset::Cohen.descriptor(0).to_json().unwrap()).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"d": 6, "m": 2}"#).unwrap();

    let (code, out, _) = mm(&["orbits", "--descriptor", good.to_str().unwrap(), "--norm-bound", "4", "--json"]);
    assert_eq!(code, 0);
    // with a descriptor n is Q itself; 1/24 and 25/24 lie below 4
    let qs: Vec<String> = out.lines().map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["q"].as_str().unwrap().to_string()).collect();
    assert!(qs.contains(&"1/24".to_string()) && qs.contains(&"25/24".to_string()), "{qs:?}");

    assert_eq!(mm(&["orbits", "--descriptor", bad.to_str().unwrap()]).0, 2);
    assert_eq!(mm(&["orbits", "--descriptor", dir.join("missing.json").to_str().unwrap()]).0, 2);
    assert_eq!(mm(&["orbits", "--descriptor", good.to_str().unwrap(), "--preset", "cohen"]).0, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn eval_unfolding_through_the_cli() {
    let tau = ["--tau", "-0.17,1.1"];
    let quad = eval(&[&["--series", "vartheta-hat", "--preset", "nontrivial", "--t1", "1", "--t2", "epsL"][..], &tau].concat());
    let four = eval(&[&["--series", "vartheta-fourier", "--preset", "nontrivial", "--t1", "1", "--t2", "epsL"][..], &tau].concat());
    assert!((quad.value[0] - four.value[0]).abs() < 1e-8 && (quad.value[1] - four.value[1]).abs() < 1e-8);
    assert_eq!(quad.t1_t2.unwrap()[0], 1.0);
    assert!(quad.t.is_none());
}

#[test]
fn eval_hat_p_constant_polynomial_is_hat() {
    let base = ["--preset", "cohen", "--coset", "h3", "--tau", "0.3,0.7", "--t1", "6/5", "--t2", "3"];
    let p = eval(&[&["--series", "vartheta-hat-P", "--poly", "2"][..], &base].concat());
    let h = eval(&[&["--series", "vartheta-hat"][..], &base].concat());
    assert!((p.value[0] - 2.0 * h.value[0]).abs() < 1e-9);
    assert_eq!(mm(&[&["eval", "--series", "vartheta-hat-P"][..], &base].concat()).0, 2);
}

#[test]
fn eval_rejects_bad_parameters() {
    for args in [
        vec!["--series", "theta", "--tau", "0.1,0", "--t", "1"],
        vec!["--series", "theta", "--tau", "0.1", "--t", "1"],
        vec!["--series", "theta", "--tau", "0.1,1", "--t", "-2"],
        vec!["--series", "theta", "--tau", "0.1,1"],
        vec!["--series", "theta", "--tau", "0.1,1", "--t", "1", "--tol", "0"],
        vec!["--series", "theta", "--tau", "0.1,1", "--t", "1", "--coset", "h9", "--preset", "cohen"],
        vec!["--series", "vartheta-hat", "--tau", "0.1,1", "--t1", "1"],
    ] {
        assert_eq!(mm(&[&["eval"][..], &args].concat()).0, 2, "{args:?}");
    }
}

#[test]
fn verify_streams_reports() {
    let (code, out, _) = mm(&["verify", "--suite", "bessel"]);
    assert_eq!(code, 0);
    let reports: Vec<CheckReport> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r.passed));
    // an impossible tolerance turns passes into failures, exit 1
    let (code, out, _) = mm(&["verify", "--suite", "bessel", "--tol", "1e-300"]);
    assert_eq!(code, 1);
    assert!(out.lines().any(|l| l.contains("\"passed\":false")));
    assert_eq!(mm(&["verify", "--suite", "bessel", "--tol", "-1"]).0, 2);
    assert_eq!(mm(&["verify", "--preset", "other"]).0, 2);
}

#[test]
fn literal_suite_reports_printed_values() {
    let (code, out, _) = mm(&["verify", "--suite", "literal", "--preset", "nontrivial"]);
    assert_eq!(code, 1);
    let reports: Vec<CheckReport> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let theta = reports.iter().find(|r| r.check_id == "theta11:eta-g-printed").unwrap();
    assert!((theta.inputs["ratio"][0].as_f64().unwrap() - 0.5).abs() < 1e-9);
}

#[test]
fn cohen_table() {
    let (code, out, _) = mm(&["cohen", "--max-n", "100", "--json"]);
    assert_eq!(code, 0);
    let rows: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let t = |n: i64| rows.iter().find(|r| r["n"] == n).unwrap()["t"].as_i64().unwrap();
    assert_eq!((t(1), t(-23), t(49), t(73), t(-95)), (1, -2, -1, 2, 0));
    assert!(rows.iter().all(|r| r["agree"] == true));
    assert_eq!(mm(&["cohen", "--max-n", "0"]).0, 2);
}
