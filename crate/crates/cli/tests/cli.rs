use std::process::Command;

fn run(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sieve-lab").chain(args.iter().copied());
    let code = sieve_lab::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn kloosterman_prints_value() {
    let (code, out, _) = run(&["kloosterman", "--m", "1", "--n", "1", "--c", "2+i"]);
    assert_eq!(code, 0);
    let rows = body(&out);
    assert_eq!(rows.len(), 2);
    assert!(rows[1].ends_with("2.618034"), "{out}");
}

#[test]
fn header_echoes_config_quadrature_and_version() {
    let (_, out, _) = run(&["fsum", "--w", "1", "--c", "3", "--format", "csv"]);
    assert!(out.starts_with(&format!("# sieve-lab {}", gauss_sieve::VERSION)));
    assert!(out.contains("# command = fsum"));
    assert!(out.contains("# c = 3"));
    assert!(out.contains("# quadrature.gauss_order = "));
    assert_eq!(body(&out)[0], "w,c,F");
}

#[test]
fn json_wraps_config_and_rows() {
    let (code, out, _) = run(&["plancherel", "--T", "1", "--P", "1", "--format", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["version"], gauss_sieve::VERSION);
    assert_eq!(doc["config"]["command"], "plancherel");
    assert!(doc["quadrature"].is_object());
    let row = &doc["result"]["rows"][0];
    let closed = row[2].as_f64().unwrap();
    assert!((closed - 3.1387101531089443).abs() < 1e-9);
}

#[test]
fn bessel_compare_reports_three_forms() {
    let (code, out, _) = run(&["bessel", "--z", "1", "--T", "1", "--P", "1", "--compare"]);
    assert_eq!(code, 0, "{out}");
    let rows = body(&out);
    for form in ["spectral", "geometric0", "geometric2"] {
        assert!(rows.iter().any(|r| r.starts_with(form)), "{out}");
    }
    assert!(out.contains("max pairwise relative deviation"));
}

#[test]
fn verify_minimal_passes_and_zero_tolerance_fails() {
    let (code, out, _) = run(&["verify", "--max-norm", "2"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(body(&out).len(), 1 + 8);
    assert!(!out.contains("FAIL"));

    let (code, out, _) = run(&["verify", "charsum", "--max-norm", "10", "--tolerance", "0"]);
    assert_eq!(code, 1);
    assert!(out.contains("# FAIL charsum: "), "{out}");
}

#[test]
fn lemma_check_flags_dyadic_exceptions() {
    let (code, out, _) = run(&["lemma-check", "--c", "3"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["lemma-check", "--c", "8"]);
    assert_eq!(code, 1);
    assert!(out.contains("# 2 of "), "{out}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["kloosterman", "--m", "1", "--n", "1", "--c", "2 + i"][..],
        &["kloosterman", "--m", "1", "--n", "1"][..],
        &["fsum", "--w", "1", "--c", "3", "--bogus", "1"][..],
        &["nonsense"][..],
        &["verify", "unknown-suite"][..],
        &["fsum", "--w", "1", "--c", "0"][..],
        &["plancherel", "--T", "-1"][..],
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 2, "{args:?}");
        assert!(!err.is_empty());
    }
}

#[test]
fn overflow_names_the_operation() {
    let big = format!("{}", i64::MAX / 2);
    let (code, _, err) = run(&["kloosterman", "--m", "1", "--n", "1", "--c", &big]);
    assert_eq!(code, 2);
    assert!(err.contains("overflow in"), "{err}");
}

#[test]
fn experiments_are_reproducible_and_seeded() {
    let args = ["hybrid", "--C", "2", "--T", "1", "--N", "8", "--trials", "4", "--format", "csv"];
    let (code, a, _) = run(&args);
    assert_eq!(code, 0);
    let (_, b, _) = run(&args);
    assert_eq!(a, b);
    let reports = gauss_sieve::lab::read_csv(a.as_bytes()).unwrap();
    assert_eq!(reports.len(), 5);
    assert!(reports.iter().all(|r| r.seed == gauss_sieve::lab::DEFAULT_SEED));
    let mut seeded = args.to_vec();
    seeded.extend(["--seed", "7"]);
    let (_, c, _) = run(&seeded);
    assert_ne!(a, c);
    assert!(c.contains("# seed = 7"));
}

#[test]
fn eisenstein_weight_and_pole_band() {
    let (code, out, _) = run(&["eisenstein", "--t", "1", "--p", "1"]);
    assert_eq!(code, 0);
    assert!(body(&out)[1].ends_with("0.641602"), "{out}");
    let (code, _, err) = run(&["eisenstein", "--t", "0.01", "--p", "0"]);
    assert_eq!(code, 2);
    assert!(err.contains("excluded band"), "{err}");
}

#[test]
fn quadrature_file_overrides_defaults() {
    let dir = std::env::temp_dir().join(format!("sieve-lab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = gauss_sieve::archimedean::QuadratureConfig {
        gauss_order: 20,
        ..Default::default()
    };
    let path = dir.join("quad.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let out_path = dir.join("report.txt");
    let (code, out, _) = run(&[
        "plancherel",
        "--quadrature",
        path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert!(written.contains("# quadrature.gauss_order = 20"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn binary_exit_codes_and_thread_cap() {
    let bin = env!("CARGO_BIN_EXE_sieve-lab");
    let ok = Command::new(bin)
        .args(["verify", "--max-norm", "2"])
        .env("SIEVE_LAB_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin)
        .args(["verify", "--max-norm", "2"])
        .env("SIEVE_LAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let usage = Command::new(bin).arg("--format").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
