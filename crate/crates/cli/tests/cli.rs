use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nullsim::catalog::{example_curve, null_helix, self_similar_case, CatalogParams, SelfSimilarCase};
use nullsim::mink::{MinkVector4, NullRotationParams, PSimilarity};
use nullsim::numeric::interp_cubic;
use tempfile::TempDir;

fn nullsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nullsim")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = nullsim(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Exit code and first stderr line.
fn fails(args: &[&str]) -> (i32, String) {
    let out = nullsim(args);
    let err = String::from_utf8(out.stderr).unwrap();
    (out.status.code().unwrap(), err.lines().next().unwrap_or_default().to_string())
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(TempDir::new().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_string()
    }

    fn write(&self, name: &str, text: &str) -> String {
        std::fs::write(self.path(name), text).unwrap();
        self.arg(name)
    }
}

fn read_curve(path: &Path) -> (Vec<f64>, Vec<MinkVector4>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x0,x1,x2,x3"));
    lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|f| f.parse().unwrap()).collect();
            (v[0], MinkVector4([v[1], v[2], v[3], v[4]]))
        })
        .unzip()
}

struct Sig {
    sigma: Vec<f64>,
    kappa_tilde: Vec<f64>,
    tau_tilde: Vec<f64>,
}

fn read_sig(path: &Path) -> Sig {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let col = |k: &str| v[k].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect::<Vec<_>>();
    Sig { sigma: col("sigma"), kappa_tilde: col("kappa_tilde"), tau_tilde: col("tau_tilde") }
}

fn verdict(stdout: &str) -> serde_json::Value {
    serde_json::from_str(stdout).unwrap()
}

#[test]
fn analyze_helix_has_flat_signature() {
    let d = Dir::new();
    ok(&["generate", "--kind", "helix", "--kappa", "0", "--tau", "1", "--out", &d.arg("h.csv")]);
    ok(&["analyze", &d.arg("h.csv"), "--out", &d.arg("s.json")]);
    let s = read_sig(&d.path("s.json"));
    assert!(s.sigma.len() > 50);
    assert!(s.kappa_tilde.iter().chain(&s.tau_tilde).all(|v| v.abs() < 1e-6));
}

#[test]
fn analyze_example_recovers_tau_tilde() {
    let d = Dir::new();
    ok(&["generate", "--kind", "example", "--out", &d.arg("e.csv")]);
    ok(&[
        "analyze", &d.arg("e.csv"), "--sigma-origin", "1", "--sigma-offset", "1",
        "--out", &d.arg("s.json"), "--profile-out", &d.arg("p.csv"),
    ]);
    let s = read_sig(&d.path("s.json"));
    for i in 0..s.sigma.len() {
        let x = s.sigma[i];
        assert!((s.tau_tilde[i] - 1.0 / x).abs() < 1e-3, "sigma {x}: {}", s.tau_tilde[i]);
        assert!((s.kappa_tilde[i] - 1.5 / (x * x)).abs() < 1e-3);
    }
    let profile = std::fs::read_to_string(d.path("p.csv")).unwrap();
    assert!(profile.starts_with("s,sigma,kappa,tau_mag\n"));
    assert_eq!(profile.lines().count(), s.sigma.len() + 1);
}

#[test]
fn analyze_rejects_timelike_curve() {
    let d = Dir::new();
    let mut text = String::from("t,x0,x1,x2,x3\n");
    for i in 0..40 {
        let t = i as f64 * 0.05;
        text.push_str(&format!("{t},{},{},{},{}\n", 2.0 * t, t.cos(), t.sin(), t * t));
    }
    let f = d.write("timelike.csv", &text);
    let (code, line) = fails(&["analyze", &f]);
    assert_eq!(code, 2);
    assert!(line.starts_with("ERROR NotNullCurve: "), "{line}");
}

#[test]
fn csv_errors_name_the_line() {
    let d = Dir::new();
    let mut rows: Vec<String> = (0..12).map(|i| format!("{i},0,0,0,0")).collect();
    let file = |rows: &[String], header: &str| format!("{header}\n{}\n", rows.join("\n"));

    let bad_header = d.write("a.csv", &file(&rows, "t,x,y,z,w"));
    assert_eq!(fails(&["analyze", &bad_header]), (2, format!("ERROR ParseError: {bad_header}: line 1: expected header t,x0,x1,x2,x3")));

    rows[4] = "4,0,zero,0,0".into();
    let (code, line) = fails(&["analyze", &d.write("b.csv", &file(&rows, "t,x0,x1,x2,x3"))]);
    assert_eq!(code, 2);
    assert!(line.contains("line 6: not a finite number: 'zero'"), "{line}");

    rows[4] = "2.5,0,0,0,0".into();
    let (_, line) = fails(&["analyze", &d.write("c.csv", &file(&rows, "t,x0,x1,x2,x3"))]);
    assert!(line.contains("line 6: t = 2.5 does not increase"), "{line}");

    rows[4] = "4,0,0,0,0".into();
    let (_, line) = fails(&["analyze", &d.write("d.csv", &file(&rows[..9], "t,x0,x1,x2,x3"))]);
    assert!(line.starts_with("ERROR InsufficientSamples: "), "{line}");

    let (_, line) = fails(&["analyze", &d.arg("missing.csv")]);
    assert!(line.starts_with("ERROR IoError: "), "{line}");
}

#[test]
fn generate_matches_closed_forms() {
    let d = Dir::new();
    ok(&["generate", "--kind", "helix", "--kappa", "0", "--tau", "1", "--out", &d.arg("h.csv")]);
    let (t, x) = read_curve(&d.path("h.csv"));
    assert_eq!((t.len(), t[0], t[t.len() - 1]), (2001, 0.0, 2.0));
    for (ti, xi) in t.iter().zip(&x) {
        assert_eq!(*xi, null_helix(0.0, 1.0, *ti).unwrap());
    }

    ok(&["generate", "--kind", "case1", "--c", "1", "--out", &d.arg("c1.csv")]);
    ok(&["generate", "--kind", "case3", "--a", "0", "--c", "1", "--out", &d.arg("c3.csv")]);
    let (t, x) = read_curve(&d.path("c1.csv"));
    let p = CatalogParams { c: 1.0, ..Default::default() };
    for (ti, xi) in t.iter().zip(&x) {
        assert_eq!(*xi, self_similar_case(SelfSimilarCase::One, &p, *ti).unwrap());
    }
    assert_eq!(std::fs::read(d.path("c1.csv")).unwrap(), std::fs::read(d.path("c3.csv")).unwrap());

    ok(&["generate", "--kind", "case4", "--a", "0.5", "--b", "0.3", "--range", "-1,1", "--step", "0.01", "--out", &d.arg("c4.csv")]);
    let (t, _) = read_curve(&d.path("c4.csv"));
    assert_eq!((t.len(), t[0], t[200]), (201, -1.0, 1.0));
}

#[test]
fn generate_rejects_bad_params() {
    let d = Dir::new();
    let out = d.arg("x.csv");
    for args in [
        vec!["generate", "--kind", "case2", "--out", &out],
        vec!["generate", "--kind", "helix", "--kappa", "1", "--out", &out],
        vec!["generate", "--kind", "case2", "--b", "0.5", "--out", &out],
        vec!["generate", "--kind", "case1", "--c", "1", "--a", "2", "--out", &out],
    ] {
        let (code, line) = fails(&args);
        assert_eq!(code, 2);
        assert!(line.starts_with("ERROR InvalidParams: "), "{args:?}: {line}");
    }
    assert!(!d.path("x.csv").exists());
    let (code, line) = fails(&["generate", "--kind", "example", "--range", "3,1", "--out", &out]);
    assert_eq!((code, line.starts_with("ERROR UsageError: ")), (2, true));
}

#[test]
fn reconstruct_example_and_case_one() {
    let d = Dir::new();
    let stdout = ok(&["reconstruct", "--z1", "0", "--z2", "1/x", "--frame", "n8", "--sigma0", "1", "--sigma-end", "3", "--out", &d.arg("e.csv")]);
    let drift: f64 = stdout.trim().strip_prefix("orthonormality_drift ").unwrap().parse().unwrap();
    assert!(drift < 1e-10);
    let (t, x) = read_curve(&d.path("e.csv"));
    let shift = example_curve(1.0);
    let err = t.iter().zip(&x).map(|(s, xi)| xi.max_abs_diff(&(example_curve(*s) - shift))).fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");

    ok(&["reconstruct", "--z1", "0", "--z2", "0", "--sigma0", "0", "--sigma-end", "2", "--out", &d.arg("c1.csv")]);
    let (t, x) = read_curve(&d.path("c1.csv"));
    let p = CatalogParams { c: 1.0, ..Default::default() };
    let at0 = self_similar_case(SelfSimilarCase::One, &p, 0.0).unwrap();
    let err = t
        .iter()
        .zip(&x)
        .map(|(s, xi)| xi.max_abs_diff(&(self_similar_case(SelfSimilarCase::One, &p, *s).unwrap() - at0)))
        .fold(0.0, f64::max);
    assert!(err < 1e-6, "{err}");
}

#[test]
fn reconstruct_step_halving_is_fourth_order() {
    let d = Dir::new();
    let run = |step: &str, name: &str| {
        let out = ok(&["reconstruct", "--z1", "0", "--z2", "1/x", "--sigma0", "1", "--sigma-end", "3", "--step", step, "--out", &d.arg(name)]);
        let drift: f64 = out.trim().rsplit(' ').next().unwrap().parse().unwrap();
        let (t, x) = read_curve(&d.path(name));
        let err = t.iter().zip(&x).map(|(s, xi)| xi.max_abs_diff(&(example_curve(*s) - example_curve(1.0)))).fold(0.0, f64::max);
        (err, drift)
    };
    let (e1, d1) = run("0.1", "a.csv");
    let (e2, d2) = run("0.05", "b.csv");
    assert!((12.0..=20.0).contains(&(e1 / e2)), "error ratio {}", e1 / e2);
    assert!(d1 / d2 > 8.0, "drift ratio {}", d1 / d2);
}

#[test]
fn reconstruct_errors() {
    let d = Dir::new();
    let out = d.arg("r.csv");
    let (code, line) = fails(&["reconstruct", "--z1", "sin(", "--z2", "0", "--sigma0", "0", "--sigma-end", "1", "--out", &out]);
    assert_eq!(code, 2);
    assert!(line.starts_with("ERROR ParseError: --z1 'sin(': "), "{line}");

    let (code, line) = fails(&["reconstruct", "--z1", "0", "--z2", "1/x", "--sigma0", "-1", "--sigma-end", "1", "--frame-sigma", "-1", "--out", &out]);
    assert_eq!(code, 2, "{line}");
    assert!(line.starts_with("ERROR "));

    let skew = r#"{"L":[1,0,1,0],"N":[-1,0,1,0],"W1":[0,1,0,1],"W2":[0,-1,0,1]}"#;
    let (code, line) = fails(&["reconstruct", "--z1", "0", "--z2", "0", "--frame", skew, "--sigma0", "0", "--sigma-end", "1", "--out", &out]);
    assert_eq!(code, 2);
    assert!(line.starts_with("ERROR NotPseudoOrthonormal: "), "{line}");

    // a measured signature only covers its own sigma range
    ok(&["generate", "--kind", "example", "--out", &d.arg("e.csv")]);
    ok(&["analyze", &d.arg("e.csv"), "--sigma-origin", "1", "--sigma-offset", "1", "--out", &d.arg("s.json")]);
    let (s, e) = (d.arg("s.json"), d.arg("s.json"));
    let (code, line) = fails(&["reconstruct", "--z1", &s, "--z2", &e, "--sigma0", "1.5", "--sigma-end", "3", "--frame-sigma", "1.5", "--out", &out]);
    assert_eq!(code, 2);
    assert!(line.starts_with("ERROR DomainError: "), "{line}");
    assert!(!d.path("r.csv").exists());
}

#[test]
fn inline_frame_matches_named_reference() {
    let d = Dir::new();
    let a = std::f64::consts::FRAC_1_SQRT_2;
    let json = format!(r#"{{"L":[{a},0,{a},0],"N":[-{a},0,{a},0],"W1":[0,{a},0,{a}],"W2":[0,-{a},0,{a}]}}"#);
    let frame_file = d.write("frame.json", &json);
    for (frame, name) in [("n8", "a.csv"), (json.as_str(), "b.csv"), (frame_file.as_str(), "c.csv")] {
        ok(&["reconstruct", "--z1", "2+sin(x)", "--z2", "0.1", "--frame", frame, "--frame-sigma", "0", "--sigma0", "0", "--sigma-end", "1", "--x0", "1,2,3,4", "--out", &d.arg(name)]);
    }
    let a = std::fs::read(d.path("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(d.path("b.csv")).unwrap());
    assert_eq!(a, std::fs::read(d.path("c.csv")).unwrap());
    let (t, x) = read_curve(&d.path("a.csv"));
    assert_eq!((t[0], x[0]), (0.0, MinkVector4([1.0, 2.0, 3.0, 4.0])));
}

#[test]
fn backward_reconstruction_is_written_in_increasing_order() {
    let d = Dir::new();
    ok(&["reconstruct", "--z1", "0", "--z2", "0", "--sigma0", "1", "--sigma-end", "-1", "--out", &d.arg("r.csv")]);
    let (t, x) = read_curve(&d.path("r.csv"));
    assert_eq!((t[0], t[t.len() - 1]), (-1.0, 1.0));
    assert_eq!(x[x.len() - 1], MinkVector4::ZERO);
}

#[test]
fn match_verdicts_and_exit_codes() {
    let d = Dir::new();
    ok(&["generate", "--kind", "helix", "--kappa", "1", "--tau", "1", "--out", &d.arg("h1.csv")]);
    ok(&["generate", "--kind", "helix", "--kappa", "2", "--tau", "1", "--out", &d.arg("h2.csv")]);
    ok(&["transform", &d.arg("h1.csv"), "--mu", "4", "--lambda", "1.5", "--epsilon", "0.3", "--zeta", "-0.2", "--theta", "1", "--b", "1,-2,0.5,3", "--out", &d.arg("h1t.csv")]);

    let v = verdict(&ok(&["match", &d.arg("h1.csv"), &d.arg("h1.csv")]));
    assert_eq!(v["similar"], true);
    assert_eq!(v["mu"].as_f64(), Some(1.0));

    let stdout = ok(&["match", &d.arg("h1.csv"), &d.arg("h1t.csv"), "--json-out", &d.arg("v.json")]);
    let v = verdict(&stdout);
    assert_eq!(v["similar"], true);
    assert!((v["mu"].as_f64().unwrap() - 4.0).abs() < 1e-4, "{v}");
    assert_eq!(std::fs::read_to_string(d.path("v.json")).unwrap(), stdout);

    let out = nullsim(&["match", &d.arg("h1.csv"), &d.arg("h2.csv")]);
    assert_eq!(out.status.code(), Some(1));
    let v = verdict(&String::from_utf8(out.stdout).unwrap());
    assert_eq!((v["similar"].as_bool(), v["mu"].is_null()), (Some(false), true));

    let (code, line) = fails(&["match", &d.arg("h1.csv"), &d.arg("nope.csv")]);
    assert_eq!((code, line.starts_with("ERROR IoError: ")), (2, true));
}

#[test]
fn transform_identity_is_byte_identical() {
    let d = Dir::new();
    ok(&["generate", "--kind", "case4", "--a", "0.5", "--b", "0.3", "--out", &d.arg("c.csv")]);
    ok(&["transform", &d.arg("c.csv"), "--out", &d.arg("id.csv")]);
    ok(&["transform", &d.arg("c.csv"), "--mu", "1", "--lambda", "1", "--epsilon", "0", "--zeta", "0", "--theta", "0", "--b", "0,0,0,0", "--out", &d.arg("id2.csv")]);
    let orig = std::fs::read(d.path("c.csv")).unwrap();
    assert_eq!(orig, std::fs::read(d.path("id.csv")).unwrap());
    assert_eq!(orig, std::fs::read(d.path("id2.csv")).unwrap());
}

#[test]
fn transform_rejects_nonpositive_scale() {
    let d = Dir::new();
    ok(&["generate", "--kind", "example", "--out", &d.arg("e.csv")]);
    for mu in ["0", "-2"] {
        let (code, line) = fails(&["transform", &d.arg("e.csv"), "--mu", mu, "--out", &d.arg("t.csv")]);
        assert_eq!(code, 2);
        assert!(line.starts_with("ERROR NonPositiveScale: "), "{line}");
    }
    let (code, line) = fails(&["transform", &d.arg("e.csv"), "--lambda", "0", "--out", &d.arg("t.csv")]);
    assert_eq!((code, line.starts_with("ERROR ZeroLambda: ")), (2, true));
}

#[test]
fn transform_scales_curvature() {
    let d = Dir::new();
    ok(&["generate", "--kind", "helix", "--kappa", "1", "--tau", "2", "--out", &d.arg("h.csv")]);
    ok(&["transform", &d.arg("h.csv"), "--mu", "4", "--theta", "0.7", "--epsilon", "0.4", "--out", &d.arg("ht.csv")]);
    ok(&["analyze", &d.arg("h.csv"), "--out", &d.arg("a.json"), "--profile-out", &d.arg("a.csv")]);
    ok(&["analyze", &d.arg("ht.csv"), "--out", &d.arg("b.json"), "--profile-out", &d.arg("b.csv")]);
    let kappa = |name: &str| -> Vec<f64> {
        let text = std::fs::read_to_string(d.path(name)).unwrap();
        text.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect()
    };
    let (ka, kb) = (kappa("a.csv"), kappa("b.csv"));
    assert_eq!(ka.len(), kb.len());
    for (a, b) in ka.iter().zip(&kb) {
        assert!((b / a - 0.25).abs() < 1e-6, "{}", b / a);
    }
}

#[test]
fn transforms_compose() {
    let d = Dir::new();
    ok(&["generate", "--kind", "example", "--out", &d.arg("e.csv")]);
    let f = PSimilarity::new(2.0, NullRotationParams::new(1.3, 0.2, -0.5, 0.4).unwrap(), MinkVector4([1.0, 0.0, -1.0, 2.0])).unwrap();
    let g = PSimilarity::new(0.7, NullRotationParams::new(0.8, -0.1, 0.3, 2.0).unwrap(), MinkVector4([0.5, 0.5, 0.0, -1.0])).unwrap();
    let flags = |s: &PSimilarity| -> Vec<String> {
        let r = s.rotation();
        let b = s.translation().0;
        [
            ("--mu", s.mu()),
            ("--lambda", r.lambda()),
            ("--epsilon", r.epsilon()),
            ("--zeta", r.zeta()),
            ("--theta", r.theta()),
        ]
        .iter()
        .flat_map(|(k, v)| [k.to_string(), format!("{v:e}")])
        .chain(["--b".to_string(), format!("{:e},{:e},{:e},{:e}", b[0], b[1], b[2], b[3])])
        .collect()
    };
    let run = |input: &str, s: &PSimilarity, out: &str| {
        let mut args = vec!["transform".to_string(), d.arg(input)];
        args.extend(flags(s));
        args.extend(["--out".to_string(), d.arg(out)]);
        ok(&args.iter().map(String::as_str).collect::<Vec<_>>());
    };
    run("e.csv", &f, "f.csv");
    run("f.csv", &g, "gf.csv");
    run("e.csv", &g.compose(&f), "c.csv");
    let (_, two) = read_curve(&d.path("gf.csv"));
    let (_, one) = read_curve(&d.path("c.csv"));
    let err = two.iter().zip(&one).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max);
    assert!(err < 1e-12, "{err}");
}

#[test]
fn pipeline_closure() {
    let d = Dir::new();
    ok(&["generate", "--kind", "example", "--out", &d.arg("e.csv")]);
    ok(&["analyze", &d.arg("e.csv"), "--sigma-origin", "1", "--sigma-offset", "1", "--out", &d.arg("a.json")]);
    let a = read_sig(&d.path("a.json"));
    let (s0, s1) = (a.sigma[0].to_string(), a.sigma[a.sigma.len() - 1].to_string());
    ok(&[
        "reconstruct", "--z1", &d.arg("a.json"), "--z2", &d.arg("a.json"), "--frame-system", "consistent",
        "--frame-sigma", &s0, "--sigma0", &s0, "--sigma-end", &s1, "--out", &d.arg("r.csv"),
    ]);
    ok(&["analyze", &d.arg("r.csv"), "--sigma-origin", &s0, "--sigma-offset", &s0, "--out", &d.arg("b.json")]);
    let b = read_sig(&d.path("b.json"));
    let interp = |xs: &[f64], ys: &[f64], p: f64| interp_cubic(xs, ys, p).unwrap();
    let mut worst: f64 = 0.0;
    for i in 0..b.sigma.len() {
        let s = b.sigma[i];
        worst = worst
            .max((b.kappa_tilde[i] - interp(&a.sigma, &a.kappa_tilde, s)).abs())
            .max((b.tau_tilde[i] - interp(&a.sigma, &a.tau_tilde, s)).abs());
    }
    assert!(worst < 1e-5, "{worst}");
}

#[test]
fn usage_and_output_errors() {
    let d = Dir::new();
    for args in [vec!["bogus"], vec![], vec!["generate", "--kind", "spiral", "--out", "x.csv"], vec!["analyze"]] {
        let (code, line) = fails(&args);
        assert_eq!(code, 2, "{args:?}");
        assert!(line.starts_with("ERROR UsageError: "), "{args:?}: {line}");
    }
    let help = nullsim(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8(help.stdout).unwrap().contains("reconstruct"));

    ok(&["generate", "--kind", "example", "--out", &d.arg("e.csv")]);
    let (code, line) = fails(&["generate", "--kind", "example", "--out", &d.arg("e.csv")]);
    assert_eq!((code, line.starts_with("ERROR OutputExists: ")), (2, true));
}
