//! Batch front end: runs one solve or one study from a [`RunConfig`] and
//! writes tables and plot data into an output directory.
//!
//! Exit codes: 0 success, 1 usage/config/IO error, 2 numerical failure,
//! 3 acceptance-gate failure.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    delta_sweep, linear_fit_r2, random_stability_suite, run_h_study, run_hp_study, run_single, sweep_curves,
    ConvergenceReport, DeltaSweepConfig, HStudyConfig, HpStudyConfig,
};
use crate::error::{Error, Result};
use crate::kernel::{coercivity_constants, mass_matrix, memory_form_matrix, FractionalOrder};
use crate::mesh::{default_first_interval_linear, TimeMesh};
pub use config::{ConfigDoc, Diagnostics, Expectations, MeshSpec, RunConfig, StudySpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_GATE: i32 = 3;

/// Exit code for an error that aborted a command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// What a finished command produced.
#[derive(Debug, Clone, Default)]
pub struct CommandOutcome {
    pub files: Vec<PathBuf>,
    /// Violated `expect` gates, one message each.
    pub gate_failures: Vec<String>,
    /// Study cells that failed numerically.
    pub numerical_failures: Vec<String>,
}

impl CommandOutcome {
    pub fn exit_code(&self) -> i32 {
        if !self.numerical_failures.is_empty() {
            EXIT_NUMERICAL
        } else if !self.gate_failures.is_empty() {
            EXIT_GATE
        } else {
            EXIT_OK
        }
    }
}

/// Options shared by every command.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Zero timings and no timestamps, so reruns compare byte for byte.
    pub deterministic: bool,
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    RunConfig::parse(&text)
}

fn build_mesh(spec: &MeshSpec, final_time: f64) -> Result<TimeMesh> {
    match *spec {
        MeshSpec::Graded {
            gamma,
            n,
            p,
            first_interval_linear,
        } => TimeMesh::graded(
            final_time,
            n,
            gamma,
            p,
            first_interval_linear.unwrap_or_else(|| default_first_interval_linear(gamma)),
        ),
        MeshSpec::Geometric {
            delta,
            levels,
            mu,
            t1,
            coarse_count,
            degree_floor,
        } => TimeMesh::geometric_with_floor(final_time, t1, delta, levels, mu, coarse_count, degree_floor),
        MeshSpec::Uniform { n, p } => TimeMesh::uniform(final_time, n, p),
    }
}

fn gate_max(failures: &mut Vec<String>, name: &str, limit: Option<f64>, what: &str, value: f64) {
    if let Some(limit) = limit {
        if !(value <= limit) {
            failures.push(format!("{name}: {what} = {value:.6e} exceeds {limit}"));
        }
    }
}

fn gate_min(failures: &mut Vec<String>, name: &str, limit: Option<f64>, what: &str, value: f64) {
    if let Some(limit) = limit {
        if !(value >= limit) {
            failures.push(format!("{name}: {what} = {value:.6} below {limit}"));
        }
    }
}

/// Solves once and writes `<stem>_traces.csv`, `<stem>_summary.csv` and,
/// when requested, stability and coercivity diagnostics.
pub fn cmd_solve(config: &RunConfig, opts: &RunOptions) -> Result<CommandOutcome> {
    let spec = config
        .mesh
        .as_ref()
        .ok_or_else(|| Error::config("mesh", "solve needs a [mesh] section"))?;
    let mesh = build_mesh(spec, config.final_time)?;
    let problem = config.problem.build(config.alpha)?;
    let backend = config.backend.build(&problem)?;
    let outcome = run_single(
        &problem,
        &backend,
        &mesh,
        config.m,
        &config.kernel,
        config.diagnostics.stability_report,
    )?;
    let stem = config.stem.clone().unwrap_or_else(|| "solve".to_string());
    let hash = config.hash();
    fs::create_dir_all(&opts.out)?;
    let mut out = CommandOutcome::default();

    let sol = &outcome.solution;
    let mut traces = format!("# config_hash={hash}\nmode,node,t,left,right,jump\n");
    for mode in 0..sol.num_modes() {
        let left = sol.left_traces(mode);
        let right = sol.right_traces(mode);
        let jumps = sol.jumps(mode);
        for (n, &t) in mesh.nodes().iter().enumerate() {
            // node 0 takes the initial value as its left trace; node N has no right trace
            let l = if n == 0 { sol.initial_value(mode) } else { left[n - 1] };
            let r = right.get(n).map(|v| format!("{v:.15e}")).unwrap_or_default();
            let j = jumps.get(n).map(|v| format!("{v:.15e}")).unwrap_or_default();
            let _ = writeln!(traces, "{mode},{n},{t:.15e},{l:.15e},{r},{j}");
        }
    }
    let path = opts.out.join(format!("{stem}_traces.csv"));
    fs::write(&path, traces)?;
    out.files.push(path);

    let seconds = if opts.deterministic { 0.0 } else { outcome.seconds };
    let mut summary = format!("# config_hash={hash}\n# m={}\n", config.m);
    summary.push_str("problem,alpha,backend,mesh,intervals,dofs,modes,error,seconds\n");
    let _ = writeln!(
        summary,
        "{},{},{},{},{},{},{},{:.6e},{seconds:.3}",
        problem.name,
        config.alpha,
        backend.label(),
        mesh.family(),
        mesh.num_intervals(),
        mesh.dof_count(),
        sol.num_modes(),
        outcome.error
    );
    let path = opts.out.join(format!("{stem}_summary.csv"));
    fs::write(&path, summary)?;
    out.files.push(path);
    gate_max(
        &mut out.gate_failures,
        "solve",
        config.expect.error_max,
        "error",
        outcome.error,
    );

    if let Some(report) = &outcome.stability {
        let mut body = format!("# config_hash={hash}\nnode,t,lhs,rhs,holds\n");
        for (i, (l, r)) in report.lhs.iter().zip(&report.rhs).enumerate() {
            let holds = !report.violations.contains(&(i + 1));
            let _ = writeln!(body, "{},{:.15e},{l:.15e},{r:.15e},{holds}", i + 1, mesh.nodes()[i + 1]);
        }
        let path = opts.out.join(format!("{stem}_stability.csv"));
        fs::write(&path, body)?;
        out.files.push(path);
        if config.expect.stability == Some(true) && !report.holds() {
            out.gate_failures.push(format!(
                "solve: stability estimate violated at nodes {:?}",
                report.violations
            ));
        }
    } else if config.expect.stability == Some(true) {
        out.gate_failures
            .push("solve: expect.stability needs diagnostics.stability_report = true".to_string());
    }

    if config.diagnostics.coercivity_check {
        let check = coercivity_check(&mesh, config.alpha, config.seed, 20, &config.kernel)?;
        let mut body = format!("# config_hash={hash}\ntrial,form,l2_sq,coercivity_ratio,continuity_ratio\n");
        for (i, c) in check.iter().enumerate() {
            let _ = writeln!(
                body,
                "{i},{:.15e},{:.15e},{:.15e},{:.15e}",
                c.form, c.l2_sq, c.coercivity_ratio, c.continuity_ratio
            );
        }
        let path = opts.out.join(format!("{stem}_coercivity.csv"));
        fs::write(&path, body)?;
        out.files.push(path);
        for (i, c) in check.iter().enumerate() {
            if c.coercivity_ratio < 1.0 - 1e-10 || c.continuity_ratio > 1.0 + 1e-10 {
                out.gate_failures
                    .push(format!("solve: coercivity/continuity check failed on trial {i}"));
            }
        }
    }
    log::info!(
        "solve: error {:.6e} on {} intervals",
        outcome.error,
        mesh.num_intervals()
    );
    Ok(out)
}

/// One random trial of the coercivity and continuity bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CoercivityTrial {
    /// `int B_alpha v v`.
    pub form: f64,
    /// `int v^2`.
    pub l2_sq: f64,
    /// `form / (c_alpha T^alpha int v^2)`; at least 1 when the bound holds.
    pub coercivity_ratio: f64,
    /// `(int B_alpha v w)^2 / (d_alpha^2 form(v) form(w))`; at most 1.
    pub continuity_ratio: f64,
}

/// Tests both bounds for random piecewise polynomials on `mesh`.
pub fn coercivity_check(
    mesh: &TimeMesh,
    alpha: f64,
    seed: u64,
    trials: usize,
    kernel: &crate::kernel::KernelConfig,
) -> Result<Vec<CoercivityTrial>> {
    let order = FractionalOrder::new(alpha)?;
    let (c, d) = coercivity_constants(alpha)?;
    let g = memory_form_matrix(mesh, &order, kernel)?;
    let mass = mass_matrix(mesh);
    let t_final = mesh.final_time();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = g.nrows();
    let mut random = || nalgebra::DVector::from_fn(dim, |_, _| rng.gen_range(-1.0..1.0));
    Ok((0..trials)
        .map(|_| {
            let v = random();
            let w = random();
            let form = v.dot(&(&g * &v));
            let form_w = w.dot(&(&g * &w));
            let cross = w.dot(&(&g * &v));
            let l2_sq = v.dot(&(&mass * &v));
            CoercivityTrial {
                form,
                l2_sq,
                coercivity_ratio: form / (c * t_final.powf(alpha) * l2_sq),
                continuity_ratio: cross * cross / (d * d * form * form_w),
            }
        })
        .collect())
}

fn h_study_config(config: &RunConfig) -> HStudyConfig {
    let d = HStudyConfig::default();
    let s = &config.study;
    HStudyConfig {
        alpha: config.alpha,
        final_time: config.final_time,
        gammas: s.gammas.clone().unwrap_or(d.gammas),
        degrees: s.degrees.clone().unwrap_or(d.degrees),
        ns: s.ns.clone().unwrap_or(d.ns),
        problem: config.problem.clone(),
        backend: config.backend.clone(),
        m: config.m,
        first_interval_linear: s.first_interval_linear,
        kernel: config.kernel.clone(),
    }
}

fn hp_study_config(config: &RunConfig) -> HpStudyConfig {
    let d = HpStudyConfig::default();
    let s = &config.study;
    HpStudyConfig {
        alpha: config.alpha,
        final_time: config.final_time,
        t1: s.t1.unwrap_or(config.final_time),
        mu: s.mu.unwrap_or(d.mu),
        deltas: s.deltas.clone().unwrap_or(d.deltas),
        levels: s.levels.clone().unwrap_or(d.levels),
        problem: config.problem.clone(),
        backend: config.backend.clone(),
        m: config.m,
        kernel: config.kernel.clone(),
    }
}

fn sweep_config(config: &RunConfig) -> DeltaSweepConfig {
    let d = DeltaSweepConfig::default();
    let s = &config.study;
    DeltaSweepConfig {
        alphas: s.alphas.clone().unwrap_or_else(|| vec![config.alpha]),
        deltas: s.deltas.clone().unwrap_or(d.deltas),
        dofs: s.dofs.unwrap_or(d.dofs),
        final_time: config.final_time,
        t1: s.t1.unwrap_or(config.final_time),
        mu: s.mu.unwrap_or(d.mu),
        problem: config.problem.clone(),
        backend: config.backend.clone(),
        m: config.m,
        kernel: config.kernel.clone(),
    }
}

fn finish_report(
    mut report: ConvergenceReport,
    config: &RunConfig,
    opts: &RunOptions,
    default_stem: &str,
) -> Result<(ConvergenceReport, CommandOutcome)> {
    report.metadata.config_hash = config.hash();
    let stem = config.stem.clone().unwrap_or_else(|| default_stem.to_string());
    let files = report.write(&opts.out, &stem, opts.deterministic)?;
    let mut out = CommandOutcome {
        files,
        numerical_failures: report.failures.clone(),
        ..Default::default()
    };
    for r in &report.rows {
        let name = format!(
            "{} alpha={} param={} count={}",
            r.family, r.alpha, r.gamma_or_delta, r.n_or_l
        );
        gate_max(&mut out.gate_failures, &name, config.expect.error_max, "error", r.error);
    }
    Ok((report, out))
}

pub fn cmd_h_study(config: &RunConfig, opts: &RunOptions) -> Result<CommandOutcome> {
    let report = run_h_study(&h_study_config(config))?;
    let (report, mut out) = finish_report(report, config, opts, "h_study")?;
    for r in &report.rows {
        if let Some(rate) = r.rate_or_b {
            let name = format!("gamma={} p={} N={}", r.gamma_or_delta, r.p_or_mu, r.n_or_l);
            gate_min(&mut out.gate_failures, &name, config.expect.rate_min, "rate", rate);
            gate_max(&mut out.gate_failures, &name, config.expect.rate_max, "rate", rate);
        }
    }
    Ok(out)
}

/// `R^2` of `ln(error)` against `sqrt(dofs)`, per `delta`.
pub fn hp_regressions(report: &ConvergenceReport) -> Vec<(f64, f64)> {
    let mut deltas: Vec<f64> = Vec::new();
    for r in &report.rows {
        if !deltas.contains(&r.gamma_or_delta) {
            deltas.push(r.gamma_or_delta);
        }
    }
    deltas
        .into_iter()
        .map(|delta| {
            let (x, y): (Vec<f64>, Vec<f64>) = report
                .rows
                .iter()
                .filter(|r| r.gamma_or_delta == delta)
                .map(|r| ((r.dofs as f64).sqrt(), r.error.ln()))
                .unzip();
            (delta, if x.len() >= 3 { linear_fit_r2(&x, &y) } else { f64::NAN })
        })
        .collect()
}

pub fn cmd_hp_study(config: &RunConfig, opts: &RunOptions) -> Result<CommandOutcome> {
    let report = run_hp_study(&hp_study_config(config))?;
    let (report, mut out) = finish_report(report, config, opts, "hp_study")?;
    for r in &report.rows {
        if let Some(b) = r.rate_or_b {
            let name = format!("delta={} L={}", r.gamma_or_delta, r.n_or_l);
            gate_min(&mut out.gate_failures, &name, config.expect.b_min, "b", b);
            gate_max(&mut out.gate_failures, &name, config.expect.b_max, "b", b);
        }
    }
    let fits = hp_regressions(&report);
    let stem = config.stem.clone().unwrap_or_else(|| "hp_study".to_string());
    let mut body = format!("# config_hash={}\ndelta,r2\n", report.metadata.config_hash);
    for (delta, r2) in &fits {
        let _ = writeln!(body, "{delta},{r2:.6}");
        gate_min(
            &mut out.gate_failures,
            &format!("delta={delta}"),
            config.expect.r2_min,
            "R^2",
            *r2,
        );
    }
    let path = opts.out.join(format!("{stem}_regression.csv"));
    fs::write(&path, body)?;
    out.files.push(path);
    Ok(out)
}

/// `delta` minimizing the error, per order.
pub fn best_deltas(report: &ConvergenceReport) -> Vec<(f64, f64)> {
    sweep_curves(report)
        .into_iter()
        .filter_map(|(alpha, pts)| {
            pts.into_iter()
                .filter(|p| p.1.is_finite())
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(d, _)| (alpha, d))
        })
        .collect()
}

pub fn cmd_delta_sweep(config: &RunConfig, opts: &RunOptions) -> Result<CommandOutcome> {
    let report = delta_sweep(&sweep_config(config))?;
    let (report, mut out) = finish_report(report, config, opts, "delta_sweep")?;
    let stem = config.stem.clone().unwrap_or_else(|| "delta_sweep".to_string());
    let mut body = format!("# config_hash={}\nalpha,best_delta\n", report.metadata.config_hash);
    for (alpha, delta) in best_deltas(&report) {
        let _ = writeln!(body, "{alpha},{delta}");
        let name = format!("alpha={alpha}");
        gate_min(
            &mut out.gate_failures,
            &name,
            config.expect.best_delta_min,
            "best delta",
            delta,
        );
        gate_max(
            &mut out.gate_failures,
            &name,
            config.expect.best_delta_max,
            "best delta",
            delta,
        );
    }
    let path = opts.out.join(format!("{stem}_best.csv"));
    fs::write(&path, body)?;
    out.files.push(path);
    Ok(out)
}

/// Built-in configurations run by `selftest`.
pub fn selftest_configs() -> Vec<(&'static str, RunConfig)> {
    let table1 = "
[run]
alpha = -0.7
m = 10
[study]
gammas = 1, 1.3, 1.6, 2.3
degrees = 1, 2
ns = 18, 27, 36, 72
[backend]
kind = spectral
[output]
stem = table1
";
    let table2 = "
[run]
alpha = -0.7
m = 60
[study]
deltas = 0.21, 0.24, 0.27, 0.3
levels = 3, 4, 5, 6, 7
mu = 1
t1 = 1
[output]
stem = table2
";
    let fig2 = "
[run]
alpha = -0.7
m = 60
[study]
alphas = -0.3, -0.5, -0.7
deltas = 0.15, 0.18, 0.21, 0.24, 0.27, 0.3, 0.33, 0.36
dofs = 44
[output]
stem = fig2
";
    let parse = |t: &str| RunConfig::parse(t).expect("built-in config is valid");
    vec![
        ("h-study", parse(table1)),
        ("hp-study", parse(table2)),
        ("delta-sweep", parse(fig2)),
    ]
}

fn run_suite(dir: &Path, seed: u64, stability_runs: usize) -> Result<CommandOutcome> {
    let opts = RunOptions {
        out: dir.to_path_buf(),
        deterministic: true,
    };
    let mut total = CommandOutcome::default();
    for (kind, cfg) in selftest_configs() {
        let out = match kind {
            "h-study" => cmd_h_study(&cfg, &opts)?,
            "hp-study" => cmd_hp_study(&cfg, &opts)?,
            _ => cmd_delta_sweep(&cfg, &opts)?,
        };
        total.files.extend(out.files);
        total.numerical_failures.extend(out.numerical_failures);
    }
    let trials = random_stability_suite(seed, stability_runs)?;
    let mut body = format!("# seed={seed}\nrun,alpha,intervals,degree,min_relative_slack,holds\n");
    for (i, t) in trials.iter().enumerate() {
        let _ = writeln!(
            body,
            "{i},{},{},{},{:.15e},{}",
            t.alpha, t.intervals, t.degree, t.min_relative_slack, t.holds
        );
        if !t.holds {
            total
                .gate_failures
                .push(format!("stability run {i} violated the estimate"));
        }
    }
    let path = dir.join("stability.csv");
    fs::write(&path, body)?;
    total.files.push(path);
    Ok(total)
}

/// Runs the built-in suite twice into `<out>/selftest/run1` and `run2` and
/// compares every output file byte for byte.
pub fn cmd_selftest(out: &Path, seed: u64, stability_runs: usize) -> Result<CommandOutcome> {
    let root = out.join("selftest");
    let first = run_suite(&root.join("run1"), seed, stability_runs)?;
    let second = run_suite(&root.join("run2"), seed, stability_runs)?;
    let mut outcome = CommandOutcome {
        files: first.files.clone(),
        gate_failures: first.gate_failures,
        numerical_failures: first.numerical_failures,
    };
    if first.files.len() != second.files.len() {
        outcome
            .gate_failures
            .push("selftest runs produced different file sets".to_string());
    }
    let mut report = String::new();
    for (a, b) in first.files.iter().zip(&second.files) {
        let same = fs::read(a)? == fs::read(b)?;
        let name = a
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let _ = writeln!(report, "{name},{}", if same { "identical" } else { "DIFFERENT" });
        if !same {
            outcome
                .gate_failures
                .push(format!("selftest output {name} differs between runs"));
        }
    }
    let path = root.join("comparison.csv");
    fs::write(&path, report)?;
    outcome.files.push(path);
    Ok(outcome)
}
