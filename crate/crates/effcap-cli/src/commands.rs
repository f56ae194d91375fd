//! Subcommand implementations.
//!
//! All four commands funnel machine output through `output::Table` (or, for
//! `sample` and `validate`, purpose-built emitters with the same metadata
//! conventions) so that formats stay consistent. `capacity` is literally a
//! one-value, one-method sweep: the record it prints is byte-identical to
//! the table a single-point sweep emits, apart from the wall-time column.

use std::time::Instant;

use serde_json::{json, Value};

use effcap::capacity::{capacity, capacity_quadrature};
use effcap::{CapacityResult, ChannelParams, Error, EvalOptions, Method, QosParams};

use crate::args::{
    method_field, parse_method, CapacityArgs, Cli, CliError, Command, Format, RunValues,
    SampleArgs, SnrSpec, SweepArgs, ValidateArgs,
};
use crate::config::Config;
use crate::output::{write_out, Row, Table};

const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Capacity(args) => cmd_capacity(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Validate(args) => cmd_validate(args),
    }
}

/// Exit code for a library error: invalid parameters are domain errors (2),
/// everything else is a convergence failure (3).
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Domain(_) => 2,
        _ => 3,
    }
}

fn build_opts(run: &RunValues) -> EvalOptions {
    let mut opts = EvalOptions::default();
    if let Some(tol) = run.tol {
        opts.tol = tol;
        opts.quad_rel = opts.quad_rel.min(tol);
    }
    if let Some(seed) = run.seed {
        opts.seed = seed;
    }
    if let Some(n) = run.mc_samples {
        opts.mc_samples = n;
    }
    opts.paranoid = run.paranoid;
    opts
}

// ---------------------------------------------------------------------
// Sweep plumbing shared by capacity, sweep, and the presets
// ---------------------------------------------------------------------

/// One fully specified evaluation point with its table-key values.
struct CurvePoint {
    keys: Vec<f64>,
    kappa: f64,
    mu: f64,
    m: f64,
    mean_snr: f64,
    a_cap: f64,
    methods: Vec<Method>,
}

/// Evaluate every (point, method) pair in order. Failures become rows with
/// an error column instead of aborting the table.
fn run_points(
    key_cols: Vec<&'static str>,
    points: &[CurvePoint],
    opts: &EvalOptions,
    meta: Vec<(String, Value)>,
) -> (Table, Vec<Result<CapacityResult, Error>>) {
    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for point in points {
        let prepared = ChannelParams::new(point.kappa, point.mu, point.m, point.mean_snr)
            .and_then(|p| QosParams::from_exponent(point.a_cap).map(|q| (p, q)));
        for &requested in &point.methods {
            let start = Instant::now();
            let outcome = prepared
                .as_ref()
                .map_err(|e| e.clone())
                .and_then(|(p, q)| capacity(p, q, requested, opts));
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            rows.push(match &outcome {
                Ok(r) => Row {
                    keys: point.keys.clone(),
                    method: method_field(r.method),
                    capacity: Some(r.value),
                    error_estimate: Some(r.error_estimate),
                    route: r
                        .diagnostics
                        .get("route")
                        .cloned()
                        .unwrap_or_else(|| method_field(r.method).to_string()),
                    wall_ms,
                    error: None,
                },
                Err(e) => Row {
                    keys: point.keys.clone(),
                    method: method_field(requested),
                    capacity: None,
                    error_estimate: None,
                    route: String::new(),
                    wall_ms,
                    error: Some(e.to_string()),
                },
            });
            outcomes.push(outcome);
        }
    }
    (
        Table {
            meta,
            key_cols,
            rows,
        },
        outcomes,
    )
}

/// Axis of a plain single-axis sweep.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Axis {
    SnrDb,
    Snr,
    Kappa,
    Mu,
    M,
    ACap,
}

impl Axis {
    fn parse(name: &str) -> Result<Self, CliError> {
        match name.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "snr-db" => Ok(Axis::SnrDb),
            "snr" => Ok(Axis::Snr),
            "kappa" => Ok(Axis::Kappa),
            "mu" => Ok(Axis::Mu),
            "m" => Ok(Axis::M),
            "a" | "a-cap" => Ok(Axis::ACap),
            other => Err(CliError::domain(format!(
                "unknown sweep axis {other:?}; expected snr-db, snr, kappa, mu, m, or A"
            ))),
        }
    }

    fn column(self) -> &'static str {
        match self {
            Axis::SnrDb => "snr_db",
            Axis::Snr => "mean_snr",
            Axis::Kappa => "kappa",
            Axis::Mu => "mu",
            Axis::M => "m",
            Axis::ACap => "a_cap",
        }
    }
}

/// A plain sweep: one axis, fixed values for everything else.
struct SweepPlan {
    axis: Axis,
    values: Vec<f64>,
    methods: Vec<Method>,
    kappa: Option<f64>,
    mu: Option<f64>,
    m: Option<f64>,
    snr: Option<SnrSpec>,
    a_cap: Option<f64>,
}

impl SweepPlan {
    fn require(v: Option<f64>, flag: &str) -> Result<f64, CliError> {
        v.ok_or_else(|| CliError::domain(format!("missing {flag} (flag or config)")))
    }

    /// Check axis/fixed-flag consistency and materialize the points.
    fn points(&self) -> Result<Vec<CurvePoint>, CliError> {
        let conflict = |given: bool, flag: &str| {
            if given {
                Err(CliError::domain(format!(
                    "{flag} conflicts with sweeping that axis; drop the flag"
                )))
            } else {
                Ok(())
            }
        };
        match self.axis {
            Axis::SnrDb | Axis::Snr => conflict(self.snr.is_some(), "--snr/--snr-db")?,
            Axis::Kappa => conflict(self.kappa.is_some(), "--kappa")?,
            Axis::Mu => conflict(self.mu.is_some(), "--mu")?,
            Axis::M => conflict(self.m.is_some(), "--m")?,
            Axis::ACap => conflict(self.a_cap.is_some(), "--A")?,
        }
        if self.values.is_empty() {
            return Err(CliError::domain(
                "no axis values; give --values or --range",
            ));
        }
        for pair in self.values.windows(2) {
            if pair[1] <= pair[0] {
                return Err(CliError::domain(format!(
                    "axis values must be strictly increasing, got {} after {}",
                    pair[1], pair[0]
                )));
            }
        }

        let mut points = Vec::new();
        for &v in &self.values {
            let kappa = match self.axis {
                Axis::Kappa => v,
                _ => Self::require(self.kappa, "--kappa")?,
            };
            let mu = match self.axis {
                Axis::Mu => v,
                _ => Self::require(self.mu, "--mu")?,
            };
            let m = match self.axis {
                Axis::M => v,
                _ => Self::require(self.m, "--m")?,
            };
            let mean_snr = match self.axis {
                Axis::SnrDb => SnrSpec::Db(v).linear(),
                Axis::Snr => v,
                _ => Self::require(self.snr.map(|s| s.linear()), "--snr or --snr-db")?,
            };
            let a_cap = match self.axis {
                Axis::ACap => v,
                _ => Self::require(self.a_cap, "--A")?,
            };
            points.push(CurvePoint {
                keys: vec![v],
                kappa,
                mu,
                m,
                mean_snr,
                a_cap,
                methods: self.methods.clone(),
            });
        }
        Ok(points)
    }

    /// Provenance metadata shared verbatim by `capacity` and single-axis
    /// `sweep` so their outputs coincide.
    fn meta(&self, opts: &EvalOptions) -> Vec<(String, Value)> {
        let mut meta = vec![("effcap".to_string(), json!(VERSION))];
        if let Some(v) = self.kappa {
            meta.push(("kappa".into(), json!(v)));
        }
        if let Some(v) = self.mu {
            meta.push(("mu".into(), json!(v)));
        }
        if let Some(v) = self.m {
            meta.push(("m".into(), json!(v)));
        }
        if let Some(snr) = self.snr {
            let (col, v) = snr.axis();
            meta.push((col.into(), json!(v)));
            if let SnrSpec::Db(_) = snr {
                meta.push(("mean_snr".into(), json!(snr.linear())));
            }
        }
        if let Some(v) = self.a_cap {
            meta.push(("A".into(), json!(v)));
        }
        meta.push(("sweep".into(), json!(self.axis.column())));
        meta.push((
            "values".into(),
            json!(self
                .values
                .iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(",")),
        ));
        meta.push((
            "methods".into(),
            json!(self
                .methods
                .iter()
                .map(|&m| method_field(m))
                .collect::<Vec<_>>()
                .join(",")),
        ));
        push_opts_meta(&mut meta, opts);
        meta
    }
}

fn push_opts_meta(meta: &mut Vec<(String, Value)>, opts: &EvalOptions) {
    meta.push(("tol".into(), json!(opts.tol)));
    meta.push(("quad_rel".into(), json!(opts.quad_rel)));
    meta.push(("seed".into(), json!(opts.seed)));
    meta.push(("mc_samples".into(), json!(opts.mc_samples)));
    meta.push(("paranoid".into(), json!(opts.paranoid)));
}

// ---------------------------------------------------------------------
// capacity
// ---------------------------------------------------------------------

fn cmd_capacity(args: CapacityArgs) -> Result<i32, CliError> {
    let cfg = Config::load(args.run.config.as_deref())?;
    let point = args.point.merge(&cfg)?;
    let run = args.run.merge(&cfg)?;
    let opts = build_opts(&run);

    let snr = point
        .snr
        .ok_or_else(|| CliError::domain("missing --snr or --snr-db (flag or config)"))?;
    let (_, axis_value) = snr.axis();
    let plan = SweepPlan {
        axis: match snr {
            SnrSpec::Db(_) => Axis::SnrDb,
            SnrSpec::Linear(_) => Axis::Snr,
        },
        values: vec![axis_value],
        methods: vec![run.method.unwrap_or(Method::Auto)],
        kappa: point.kappa,
        mu: point.mu,
        m: point.m,
        snr: None, // the axis carries it
        a_cap: point.a_cap,
    };
    let points = plan.points()?;
    let meta = plan.meta(&opts);
    let (table, outcomes) = run_points(vec![plan.axis.column()], &points, &opts, meta);

    match &outcomes[0] {
        Err(e) => Err(CliError::new(exit_code(e), e.to_string())),
        Ok(result) => {
            eprintln!(
                "effcap: R = {:.12} bit/s/Hz via {} (error estimate {:.3e})",
                result.value,
                method_field(result.method),
                result.error_estimate
            );
            for (key, value) in &result.diagnostics {
                eprintln!("effcap:   {key} = {value}");
            }
            write_out(run.out.as_deref(), &table.render(run.format))?;
            Ok(0)
        }
    }
}

// ---------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------

fn parse_range(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let err = || {
        CliError::domain(format!(
            "range must be start:stop:step with step > 0, got {spec:?}"
        ))
    };
    if parts.len() != 3 {
        return Err(err());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| err()))
        .collect::<Result<_, _>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0 && stop >= start) {
        return Err(err());
    }
    let mut values = Vec::new();
    let mut k = 0u32;
    loop {
        let v = start + f64::from(k) * step;
        if v > stop + step * 1e-9 {
            break;
        }
        values.push(v);
        k += 1;
    }
    Ok(values)
}

fn cmd_sweep(args: SweepArgs) -> Result<i32, CliError> {
    let cfg = Config::load(args.run.config.as_deref())?;
    let run = args.run.merge(&cfg)?;
    let opts = build_opts(&run);

    let (table, outcomes) = if let Some(preset) = &args.preset {
        let point_flags_given = args.point.kappa.is_some()
            || args.point.mu.is_some()
            || args.point.m.is_some()
            || args.point.snr.is_some()
            || args.point.snr_db.is_some()
            || args.point.a_cap.is_some()
            || args.point.theta.is_some();
        if point_flags_given || args.sweep.is_some() || !args.values.is_empty()
            || args.range.is_some() || !args.methods.is_empty()
        {
            return Err(CliError::domain(
                "--preset defines its own grid; drop parameter, axis, and method flags",
            ));
        }
        run_preset(preset, &opts)?
    } else {
        let point = args.point.merge(&cfg)?;
        let axis_name = args
            .sweep
            .clone()
            .or_else(|| cfg.get("sweep").map(str::to_owned))
            .ok_or_else(|| CliError::domain("missing --sweep axis (or --preset)"))?;
        let axis = Axis::parse(&axis_name)?;
        let values = if !args.values.is_empty() {
            args.values.clone()
        } else if let Some(range) = &args.range {
            parse_range(range)?
        } else if let Some(list) = cfg.get("values") {
            list.split(',')
                .map(|v| {
                    v.trim().parse::<f64>().map_err(|_| {
                        CliError::domain(format!("config values: {v:?} is not a number"))
                    })
                })
                .collect::<Result<_, _>>()?
        } else if let Some(range) = cfg.get("range") {
            parse_range(range)?
        } else {
            Vec::new()
        };
        let methods = if !args.methods.is_empty() {
            args.methods
                .iter()
                .map(|m| parse_method(m))
                .collect::<Result<Vec<_>, _>>()?
        } else if let Some(list) = cfg.get("methods") {
            list.split(',')
                .map(parse_method)
                .collect::<Result<Vec<_>, _>>()?
        } else {
            vec![run.method.unwrap_or(Method::Auto)]
        };
        let plan = SweepPlan {
            axis,
            values,
            methods,
            kappa: point.kappa,
            mu: point.mu,
            m: point.m,
            snr: point.snr,
            a_cap: point.a_cap,
        };
        let points = plan.points()?;
        let meta = plan.meta(&opts);
        run_points(vec![axis.column()], &points, &opts, meta)
    };

    let failed = outcomes.iter().filter(|o| o.is_err()).count();
    write_out(run.out.as_deref(), &table.render(run.format))?;
    if failed > 0 {
        eprintln!(
            "effcap: {failed} of {} rows failed; see the error column",
            outcomes.len()
        );
        Ok(4)
    } else {
        Ok(0)
    }
}

// ---------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------

/// Built-in tables: `fig1` compares quadrature, the exact analytical chain,
/// the high-SNR asymptote, and Monte Carlo over SNR for six (m, A) curves
/// at kappa = 1, mu = 2; `fig2` traces the analytical capacity over SNR
/// for six (mu, kappa) curves at m = 1, A = 1.
fn run_preset(
    name: &str,
    opts: &EvalOptions,
) -> Result<(Table, Vec<Result<CapacityResult, Error>>), CliError> {
    let snr_dbs: Vec<f64> = (0..=8).map(|i| 5.0 * i as f64).collect();
    match name.trim().to_ascii_lowercase().as_str() {
        "fig1" => {
            let (kappa, mu) = (1.0, 2.0);
            let mut points = Vec::new();
            for &m in &[0.5, 1.0, 5.0] {
                for &a_cap in &[1.0, 5.0] {
                    for &db in &snr_dbs {
                        let mut methods =
                            vec![Method::Quadrature, Method::Auto, Method::MonteCarlo];
                        if a_cap < mu {
                            methods.insert(2, Method::HighSnr);
                        }
                        points.push(CurvePoint {
                            keys: vec![m, a_cap, db],
                            kappa,
                            mu,
                            m,
                            mean_snr: SnrSpec::Db(db).linear(),
                            a_cap,
                            methods,
                        });
                    }
                }
            }
            let mut meta = vec![
                ("effcap".to_string(), json!(VERSION)),
                ("preset".into(), json!("fig1")),
                ("kappa".into(), json!(kappa)),
                ("mu".into(), json!(mu)),
                ("m".into(), json!("0.5,1,5")),
                ("A".into(), json!("1,5")),
                ("sweep".into(), json!("snr_db")),
                ("values".into(), json!("0,5,10,15,20,25,30,35,40")),
                (
                    "methods".into(),
                    json!("quadrature,auto,high_snr,monte_carlo"),
                ),
                (
                    "note".into(),
                    json!("high_snr rows omitted where A >= mu (outside the asymptote's validity)"),
                ),
            ];
            push_opts_meta(&mut meta, opts);
            Ok(run_points(vec!["m", "a_cap", "snr_db"], &points, opts, meta))
        }
        "fig2" => {
            let (m, a_cap) = (1.0, 1.0);
            let mut points = Vec::new();
            for &mu in &[1.0, 2.0, 4.0] {
                for &kappa in &[1.0, 5.0] {
                    for &db in &snr_dbs {
                        points.push(CurvePoint {
                            keys: vec![mu, kappa, db],
                            kappa,
                            mu,
                            m,
                            mean_snr: SnrSpec::Db(db).linear(),
                            a_cap,
                            methods: vec![Method::Auto],
                        });
                    }
                }
            }
            let mut meta = vec![
                ("effcap".to_string(), json!(VERSION)),
                ("preset".into(), json!("fig2")),
                ("m".into(), json!(m)),
                ("A".into(), json!(a_cap)),
                ("mu".into(), json!("1,2,4")),
                ("kappa".into(), json!("1,5")),
                ("sweep".into(), json!("snr_db")),
                ("values".into(), json!("0,5,10,15,20,25,30,35,40")),
                ("methods".into(), json!("auto")),
            ];
            push_opts_meta(&mut meta, opts);
            Ok(run_points(
                vec!["mu", "kappa", "snr_db"],
                &points,
                opts,
                meta,
            ))
        }
        other => Err(CliError::domain(format!(
            "unknown preset {other:?}; expected fig1 or fig2"
        ))),
    }
}

// ---------------------------------------------------------------------
// sample
// ---------------------------------------------------------------------

fn cmd_sample(args: SampleArgs) -> Result<i32, CliError> {
    let cfg = Config::load(args.run.config.as_deref())?;
    let point = args.point.merge(&cfg)?;
    let run = args.run.merge(&cfg)?;
    let count = match args.count {
        Some(n) => n,
        None => cfg.get_u64("count")?.map(|n| n as usize).unwrap_or(1000),
    };
    let seed = run.seed.unwrap_or(42);

    let snr = point
        .snr
        .ok_or_else(|| CliError::domain("missing --snr or --snr-db (flag or config)"))?;
    let params = ChannelParams::new(
        SweepPlan::require(point.kappa, "--kappa")?,
        SweepPlan::require(point.mu, "--mu")?,
        SweepPlan::require(point.m, "--m")?,
        snr.linear(),
    )
    .map_err(|e| CliError::new(exit_code(&e), e.to_string()))?;
    let batch = params
        .sample(count, seed)
        .map_err(|e| CliError::new(exit_code(&e), e.to_string()))?;

    let mut meta = vec![
        ("effcap".to_string(), json!(VERSION)),
        ("kappa".into(), json!(params.kappa())),
        ("mu".into(), json!(params.mu())),
        ("m".into(), json!(params.m())),
    ];
    let (col, v) = snr.axis();
    meta.push((col.into(), json!(v)));
    if let SnrSpec::Db(_) = snr {
        meta.push(("mean_snr".into(), json!(snr.linear())));
    }
    meta.push(("count".into(), json!(count)));
    meta.push(("seed".into(), json!(seed)));

    let content = match run.format {
        Format::Csv => {
            let mut out = String::new();
            for (key, value) in &meta {
                let text = match value {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("# {key} = {text}\n"));
            }
            out.push_str("gamma\n");
            for v in &batch.values {
                out.push_str(&format!("{v:.16e}\n"));
            }
            out
        }
        Format::Json => {
            let meta: serde_json::Map<String, Value> =
                meta.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            let mut text = serde_json::to_string_pretty(&json!({
                "meta": meta,
                "samples": batch.values,
            }))
            .expect("samples serialize");
            text.push('\n');
            text
        }
    };
    write_out(run.out.as_deref(), &content)?;
    Ok(0)
}

// ---------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------

/// The agreement grid: three kappa values, four (mu, m) shapes including
/// the degenerate-gap pole case, and two (A, SNR-dB) profiles. Each point
/// is checked twice (auto-routed analytical chain and the series) against
/// the defining-integral quadrature oracle.
fn agreement_grid() -> Vec<(f64, f64, f64, f64, f64)> {
    let mut grid = Vec::new();
    for &kappa in &[0.5, 1.0, 5.0] {
        for &(mu, m) in &[(2.0, 1.0), (1.0, 0.5), (1.5, 0.8), (2.5, 3.5)] {
            for &(a_cap, db) in &[(0.5, 10.0), (2.0, 30.0)] {
                grid.push((kappa, mu, m, a_cap, db));
            }
        }
    }
    grid
}

struct Check {
    kappa: f64,
    mu: f64,
    m: f64,
    a_cap: f64,
    snr_db: f64,
    check: &'static str,
    method: String,
    capacity: Option<f64>,
    oracle: Option<f64>,
    discrepancy: Option<f64>,
    status: String,
}

fn cmd_validate(args: ValidateArgs) -> Result<i32, CliError> {
    let cfg = Config::load(args.run.config.as_deref())?;
    let run = args.run.merge(&cfg)?;
    // --tol is the agreement threshold here; evaluation itself runs at the
    // library defaults so an absurd threshold cannot mask real behavior.
    let threshold = run.tol.unwrap_or(1e-6);
    if !(threshold > 0.0) {
        return Err(CliError::domain(format!(
            "validation threshold must be > 0, got {threshold}"
        )));
    }
    let opts = EvalOptions {
        paranoid: run.paranoid,
        ..EvalOptions::default()
    };

    let mut checks = Vec::new();
    let mut failures = 0usize;
    for (kappa, mu, m, a_cap, snr_db) in agreement_grid() {
        let p = ChannelParams::new(kappa, mu, m, SnrSpec::Db(snr_db).linear())
            .map_err(|e| CliError::new(exit_code(&e), e.to_string()))?;
        let q = QosParams::from_exponent(a_cap)
            .map_err(|e| CliError::new(exit_code(&e), e.to_string()))?;
        let oracle = capacity_quadrature(&p, &q, &opts);
        for (label, requested) in [("auto", Method::Auto), ("series", Method::Series)] {
            let mut check = Check {
                kappa,
                mu,
                m,
                a_cap,
                snr_db,
                check: label,
                method: String::new(),
                capacity: None,
                oracle: None,
                discrepancy: None,
                status: String::new(),
            };
            match (&oracle, capacity(&p, &q, requested, &opts)) {
                (Ok(o), Ok(r)) => {
                    let rel = ((r.value - o.value) / o.value).abs();
                    check.method = method_field(r.method).to_string();
                    check.capacity = Some(r.value);
                    check.oracle = Some(o.value);
                    check.discrepancy = Some(rel);
                    if rel <= threshold {
                        check.status = "ok".into();
                    } else {
                        check.status = format!("FAIL: {rel:.3e} > {threshold:.3e}");
                        failures += 1;
                    }
                }
                (Err(e), _) => {
                    check.status = format!("FAIL: oracle failed: {e}");
                    failures += 1;
                }
                (_, Err(e)) => {
                    check.method = method_field(requested).to_string();
                    check.status = format!("FAIL: {e}");
                    failures += 1;
                }
            }
            checks.push(check);
        }
    }

    let mut meta = vec![
        ("effcap".to_string(), json!(VERSION)),
        ("report".into(), json!("cross-method agreement")),
        ("threshold".into(), json!(threshold)),
        ("checks".into(), json!(checks.len())),
        ("failures".into(), json!(failures)),
    ];
    push_opts_meta(&mut meta, &opts);

    let content = match run.format {
        Format::Csv => {
            let mut out = String::new();
            for (key, value) in &meta {
                let text = match value {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("# {key} = {text}\n"));
            }
            out.push_str(
                "kappa,mu,m,a_cap,snr_db,check,method,capacity,oracle,rel_discrepancy,status\n",
            );
            for c in &checks {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    c.kappa,
                    c.mu,
                    c.m,
                    c.a_cap,
                    c.snr_db,
                    c.check,
                    c.method,
                    c.capacity.map_or(String::new(), |v| format!("{v:.16e}")),
                    c.oracle.map_or(String::new(), |v| format!("{v:.16e}")),
                    c.discrepancy.map_or(String::new(), |v| format!("{v:.3e}")),
                    if c.status.contains(',') {
                        format!("\"{}\"", c.status.replace('"', "\"\""))
                    } else {
                        c.status.clone()
                    },
                ));
            }
            out
        }
        Format::Json => {
            let meta: serde_json::Map<String, Value> =
                meta.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            let rows: Vec<Value> = checks
                .iter()
                .map(|c| {
                    json!({
                        "kappa": c.kappa,
                        "mu": c.mu,
                        "m": c.m,
                        "a_cap": c.a_cap,
                        "snr_db": c.snr_db,
                        "check": c.check,
                        "method": c.method,
                        "capacity": c.capacity,
                        "oracle": c.oracle,
                        "rel_discrepancy": c.discrepancy,
                        "status": c.status,
                    })
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&json!({
                "meta": meta,
                "checks": rows,
            }))
            .expect("report serializes");
            text.push('\n');
            text
        }
    };
    write_out(run.out.as_deref(), &content)?;
    eprintln!(
        "effcap: validate ran {} checks at threshold {threshold:.1e}: {failures} failed",
        checks.len()
    );
    Ok(if failures > 0 { 1 } else { 0 })
}
