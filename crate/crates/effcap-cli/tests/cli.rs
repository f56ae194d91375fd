//! End-to-end tests of the `effcap` binary: golden records, routing
//! surfaced in output, exit codes, determinism, config merging, preset
//! tables, and the validation harness — all through real process spawns.

use std::collections::HashMap;
use std::process::{Command, Output};

use effcap::specfun::{kummer_1f1, ln_gamma_pos};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_effcap"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

/// Parse CSV output into (column -> index, data rows), skipping `#` lines.
fn parse_csv(text: &str) -> (HashMap<String, usize>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().expect("header row present");
    let cols: HashMap<String, usize> = header
        .split(',')
        .enumerate()
        .map(|(i, c)| (c.to_string(), i))
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (cols, rows)
}

/// Drop the wall-time column (by header name) so reruns compare equal.
fn strip_wall(text: &str) -> String {
    let mut out = String::new();
    let mut wall_idx = None;
    for line in text.lines() {
        if line.starts_with('#') {
            out.push_str(line);
            out.push('\n');
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let idx = *wall_idx.get_or_insert_with(|| {
            fields
                .iter()
                .position(|&f| f == "wall_ms")
                .expect("wall_ms column present")
        });
        let kept: Vec<&str> = fields
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, &f)| f)
            .collect();
        out.push_str(&kept.join(","));
        out.push('\n');
    }
    out
}

fn f(row: &[String], cols: &HashMap<String, usize>, name: &str) -> f64 {
    row[cols[name]].parse().unwrap_or(f64::NAN)
}

// ---------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------

#[test]
fn golden_point_record_matches_the_frozen_value() {
    let out = run(&[
        "capacity", "--kappa", "1", "--mu", "2", "--m", "1", "--A", "1", "--snr-db", "10",
        "--format", "json",
    ]);
    assert!(out.status.success(), "exit 0: {}", stderr_str(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let row = &doc["rows"][0];
    let value = row["capacity"].as_f64().unwrap();
    assert!(
        (value - 2.751_781_786_103_516).abs() < 1e-9,
        "golden record value drifted: {value}"
    );
    assert_eq!(row["method"], "exact", "auto resolves to the exact chain");
    assert_eq!(row["snr_db"], 10.0, "axis column echoes the dB input");
    assert_eq!(doc["meta"]["mu"], 2.0, "meta carries the parameters");
}

#[test]
fn m_eq_mu_routing_is_surfaced_in_the_method_field() {
    let out = run(&[
        "capacity", "--kappa", "3", "--mu", "2", "--m", "2", "--A", "1", "--snr-db", "10",
        "--format", "json",
    ]);
    assert!(out.status.success(), "exit 0: {}", stderr_str(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(
        doc["rows"][0]["method"], "m_eq_mu",
        "the m = mu line must be tagged in the record"
    );
}

#[test]
fn high_snr_refusal_names_the_constraint_with_exit_2() {
    let out = run(&[
        "capacity", "--kappa", "1", "--mu", "2", "--m", "1", "--A", "3", "--snr-db", "30",
        "--method", "high-snr",
    ]);
    assert_eq!(out.status.code(), Some(2), "domain errors exit 2");
    let err = stderr_str(&out);
    assert!(
        err.contains("A < mu"),
        "message must name the A < mu constraint: {err}"
    );
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = std::env::temp_dir();
    let path = dir.join("effcap_cli_test.conf");
    std::fs::write(&path, "kappa = 3\nmu = 2\nm = 1\nA = 1\nsnr-db = 10\n").unwrap();
    let out = run(&[
        "capacity", "--config", path.to_str().unwrap(), "--m", "2", "--format", "json",
    ]);
    assert!(out.status.success(), "exit 0: {}", stderr_str(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(
        doc["meta"]["m"], 2.0,
        "the --m flag must override the config value 1"
    );
    assert_eq!(
        doc["rows"][0]["method"], "m_eq_mu",
        "overridden m = 2 lands on the m = mu line"
    );
    std::fs::remove_file(&path).ok();
}

// ---------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------

#[test]
fn identical_invocations_are_deterministic_excluding_wall_time() {
    let args = [
        "sweep", "--mu", "2", "--m", "1", "--A", "1", "--snr-db", "10", "--sweep", "kappa",
        "--range", "0.5:2.5:1", "--methods", "quadrature,monte-carlo", "--mc-samples", "20000",
        "--seed", "9",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success(), "exit 0: {}", stderr_str(&first));
    let a = strip_wall(&stdout_str(&first));
    let b = strip_wall(&stdout_str(&second));
    assert_eq!(a, b, "reruns must be byte-identical apart from wall time");
    let (cols, rows) = parse_csv(&a);
    assert_eq!(rows.len(), 6, "3 range values x 2 methods");
    assert_eq!(rows[0][cols["kappa"]], "0.5", "range expands from the start");
    assert_eq!(rows[5][cols["kappa"]], "2.5", "range is inclusive of the stop");
}

#[test]
fn single_point_sweep_equals_the_capacity_record() {
    let cap = run(&[
        "capacity", "--kappa", "1.5", "--mu", "1.8", "--m", "0.9", "--A", "0.7", "--snr-db", "12",
    ]);
    let sweep = run(&[
        "sweep", "--kappa", "1.5", "--mu", "1.8", "--m", "0.9", "--A", "0.7", "--sweep",
        "snr-db", "--values", "12",
    ]);
    assert!(cap.status.success() && sweep.status.success(), "both exit 0");
    assert_eq!(
        strip_wall(&stdout_str(&cap)),
        strip_wall(&stdout_str(&sweep)),
        "a one-value, one-method sweep is the capacity record"
    );
}

#[test]
fn sweep_partial_failures_exit_4_with_error_rows() {
    // mu - m = -1 at m = 3.5 has no contour representation, so forcing the
    // exact method fails that row while m = 0.5 still succeeds.
    let out = run(&[
        "sweep", "--kappa", "1", "--mu", "2.5", "--A", "1", "--snr-db", "10", "--sweep", "m",
        "--values", "0.5,3.5", "--methods", "exact",
    ]);
    assert_eq!(out.status.code(), Some(4), "partial failure exits 4");
    let (cols, rows) = parse_csv(&stdout_str(&out));
    assert_eq!(rows.len(), 2, "both rows still emitted");
    assert!(
        rows[0][cols["error"]].is_empty() && !rows[0][cols["capacity"]].is_empty(),
        "the clean row carries a value"
    );
    assert!(
        rows[1][cols["capacity"]].is_empty() && !rows[1][cols["error"]].is_empty(),
        "the failed row carries the error text instead: {:?}",
        rows[1]
    );
}

#[test]
fn fig1_preset_shows_the_high_snr_gap_structure() {
    let out = run(&["sweep", "--preset", "fig1", "--mc-samples", "20000"]);
    assert!(out.status.success(), "preset exits 0: {}", stderr_str(&out));
    let (cols, rows) = parse_csv(&stdout_str(&out));
    let mut analytical = HashMap::new();
    let mut asymptote = HashMap::new();
    for row in &rows {
        let key = (
            row[cols["m"]].clone(),
            row[cols["a_cap"]].clone(),
            row[cols["snr_db"]].clone(),
        );
        match row[cols["method"]].as_str() {
            "exact" | "series" => {
                analytical.insert(key, f(row, &cols, "capacity"));
            }
            "high_snr" => {
                assert_eq!(
                    row[cols["a_cap"]], "1",
                    "high_snr rows must only exist on the A = 1 curves"
                );
                asymptote.insert(key, f(row, &cols, "capacity"));
            }
            _ => {}
        }
    }
    assert_eq!(asymptote.len(), 27, "3 curves x 9 SNR points carry the asymptote");
    for (key, hs) in &asymptote {
        let snr_db: f64 = key.2.parse().unwrap();
        if snr_db < 25.0 {
            continue;
        }
        let gap = (analytical[key] - hs).abs();
        if key.0 == "0.5" && snr_db == 25.0 {
            assert!(
                (0.050..=0.060).contains(&gap),
                "known slow-convergence point moved: gap {gap:.4} at {key:?}"
            );
        } else {
            assert!(gap <= 0.05, "gap {gap:.4} > 0.05 at {key:?}");
        }
    }
}

#[test]
fn fig2_preset_shows_the_shrinking_mu_gap() {
    let out = run(&["sweep", "--preset", "fig2"]);
    assert!(out.status.success(), "preset exits 0: {}", stderr_str(&out));
    let (cols, rows) = parse_csv(&stdout_str(&out));
    let mut by_curve: HashMap<(String, String), f64> = HashMap::new();
    for row in &rows {
        by_curve.insert(
            (row[cols["mu"]].clone(), format!("{}@{}", row[cols["kappa"]], row[cols["snr_db"]])),
            f(row, &cols, "capacity"),
        );
    }
    for kappa in ["1", "5"] {
        for snr in ["0", "5", "10", "15", "20", "25", "30", "35", "40"] {
            let at = |mu: &str| by_curve[&(mu.to_string(), format!("{kappa}@{snr}"))];
            let low_gap = at("2") - at("1");
            let high_gap = at("4") - at("2");
            assert!(
                high_gap > 0.0 && high_gap < low_gap,
                "gap between mu curves must shrink as mu grows: \
                 {low_gap:.4} then {high_gap:.4} at kappa={kappa}, {snr} dB"
            );
        }
    }
}

// ---------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------

#[test]
fn sample_runs_are_deterministic_with_full_header() {
    let args = [
        "sample", "--kappa", "1", "--mu", "2", "--m", "1", "--snr-db", "10", "--count", "5",
        "--seed", "7",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success(), "exit 0: {}", stderr_str(&first));
    let text = stdout_str(&first);
    assert_eq!(text, stdout_str(&second), "fixed seed reproduces the file");
    for needle in ["# kappa = 1", "# mu = 2", "# m = 1", "# seed = 7", "# count = 5"] {
        assert!(text.contains(needle), "header must record {needle:?}");
    }
    let draws = text
        .lines()
        .filter(|l| !l.starts_with('#') && *l != "gamma")
        .count();
    assert_eq!(draws, 5, "one draw per line");
}

#[test]
fn kappa_zero_samples_pass_a_gamma_ks_test() {
    // With no dominant components the instantaneous SNR is exactly
    // Gamma(mu) with mean gbar, so the sampler must pass a 1% KS test
    // against that CDF.
    let (mu, gbar, n) = (1.7f64, 2.0f64, 20_000usize);
    let out = run(&[
        "sample", "--kappa", "0", "--mu", "1.7", "--m", "1", "--snr", "2", "--count", "20000",
        "--seed", "11",
    ]);
    assert!(out.status.success(), "exit 0: {}", stderr_str(&out));
    let mut draws: Vec<f64> = stdout_str(&out)
        .lines()
        .filter(|l| !l.starts_with('#') && *l != "gamma")
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(draws.len(), n, "all requested draws present");
    draws.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Regularized lower incomplete gamma via the confluent series:
    // P(a, x) = x^a e^(-x) M(1, a+1, x) / Gamma(a+1).
    let gamma_cdf = |x: f64| -> f64 {
        let (m1f1, _) = kummer_1f1(1.0, mu + 1.0, x, 1e-12).unwrap();
        (mu * x.ln() - x - ln_gamma_pos(mu + 1.0).unwrap()).exp() * m1f1
    };
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &g) in draws.iter().enumerate() {
        let cdf = gamma_cdf(mu * g / gbar);
        d = d.max(((i + 1) as f64 / nf - cdf).abs());
        d = d.max((cdf - i as f64 / nf).abs());
    }
    let critical = 1.6276 / nf.sqrt();
    assert!(
        d < critical,
        "KS distance {d:.5} >= 1% critical value {critical:.5}"
    );
}

// ---------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------

#[test]
fn validate_passes_and_counts_grid_times_method_pairs() {
    let out = run(&["validate"]);
    assert_eq!(out.status.code(), Some(0), "clean build validates");
    let (cols, rows) = parse_csv(&stdout_str(&out));
    assert_eq!(rows.len(), 48, "24 grid points x 2 checks");
    for row in &rows {
        assert_eq!(
            row[cols["status"]], "ok",
            "every check reports its discrepancy and passes: {row:?}"
        );
        assert!(
            !row[cols["rel_discrepancy"]].is_empty(),
            "measured discrepancy recorded: {row:?}"
        );
    }
}

#[test]
fn validate_flags_disagreements_under_an_absurd_threshold() {
    let out = run(&["validate", "--tol", "1e-15"]);
    assert_eq!(out.status.code(), Some(1), "failures exit 1");
    let (cols, rows) = parse_csv(&stdout_str(&out));
    let failures = rows
        .iter()
        .filter(|r| r[cols["status"]].starts_with("FAIL"))
        .count();
    assert!(
        failures > 0,
        "an unreachable threshold must produce reported failures"
    );
    assert_eq!(rows.len(), 48, "failing checks are still all listed");
}
