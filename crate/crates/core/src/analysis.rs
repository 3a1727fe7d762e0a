//! Error measurement and convergence studies.
//!
//! The error `|||v|||_m` is the maximum of the spatial `L2` norm over the
//! fine grid `{t_{j-1} + n k_j / m}`. The DG solution is taken left-continuous
//! there: a grid point that coincides with a node `t_n` sees `U^n_-`, and
//! `t = 0` sees the initial value `U^0_-`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{FractionalOrder, KernelConfig};
use crate::mesh::{default_first_interval_linear, TimeMesh};
use crate::problems::{ManufacturedProblem, ProblemSpec};
use crate::spatial::{fem_backend, spectral_backend, ModeSystem};
use crate::stepper::{solve, stability_report, DgSolution, StabilityReport, StepperConfig};

/// Mode values `U_m(t)` with the left-continuous convention.
fn mode_values(solution: &DgSolution, t: f64) -> Result<Vec<f64>> {
    (0..solution.num_modes())
        .map(|m| {
            if t == 0.0 {
                Ok(solution.initial_value(m))
            } else {
                solution.evaluate(m, t)
            }
        })
        .collect()
}

fn check_modes(solution: &DgSolution, backend: &ModeSystem) -> Result<()> {
    if solution.num_modes() != backend.mode_count() {
        return Err(Error::domain(format!(
            "solution has {} modes, backend {}",
            solution.num_modes(),
            backend.mode_count()
        )));
    }
    Ok(())
}

/// `|||U - u|||_m`. The spectral backend uses orthonormality of the modes
/// (components of `u` beyond the last mode count in full); the finite element
/// backend uses composite Gauss with `r + 1` points per element.
pub fn error_measure(
    solution: &DgSolution,
    problem: &ManufacturedProblem,
    backend: &ModeSystem,
    m: usize,
) -> Result<f64> {
    check_modes(solution, backend)?;
    if backend.is_spectral() {
        let profiles = problem.modal_profiles(backend.mode_count());
        let tail: Vec<_> = problem
            .components
            .iter()
            .filter(|c| c.wavenumber > backend.mode_count())
            .map(|c| c.modal_profile())
            .collect();
        let mut worst = 0.0f64;
        for t in solution.mesh().fine_grid(m) {
            let vals = mode_values(solution, t)?;
            let mut sq: f64 = vals.iter().zip(&profiles).map(|(u, e)| (u - e.eval(t)).powi(2)).sum();
            sq += tail.iter().map(|p| p.eval(t).powi(2)).sum::<f64>();
            worst = worst.max(sq.sqrt());
        }
        Ok(worst)
    } else {
        let points = backend.fem_space().map(|s| s.degree() + 1).unwrap_or(2);
        error_measure_quadrature(solution, problem, backend, m, points)
    }
}

/// `|||U - u|||_m` with the spatial norm computed by composite Gauss
/// quadrature; `points` per element for the finite element backend, per
/// cell of a 64-cell partition for the spectral backend.
pub fn error_measure_quadrature(
    solution: &DgSolution,
    problem: &ManufacturedProblem,
    backend: &ModeSystem,
    m: usize,
    points: usize,
) -> Result<f64> {
    check_modes(solution, backend)?;
    let quad: Vec<(f64, f64)> = match backend.fem_space() {
        Some(space) => space.quadrature(points),
        None => {
            let rule = crate::kernel::quadrature::legendre_rule(points);
            (0..64)
                .flat_map(|i| rule.mapped(i as f64 / 64.0, (i + 1) as f64 / 64.0).collect::<Vec<_>>())
                .collect()
        }
    };
    let xs: Vec<f64> = quad.iter().map(|q| q.0).collect();
    // column m holds mode m sampled at the quadrature points
    let mut shapes = DMatrix::zeros(xs.len(), backend.mode_count());
    let mut unit = vec![0.0; backend.mode_count()];
    for col in 0..backend.mode_count() {
        unit[col] = 1.0;
        let v = backend.synthesize(&unit, &xs);
        shapes.set_column(col, &DVector::from_vec(v));
        unit[col] = 0.0;
    }
    let mut worst = 0.0f64;
    for t in solution.mesh().fine_grid(m) {
        let vals = DVector::from_vec(mode_values(solution, t)?);
        let uh = &shapes * vals;
        let sq: f64 = quad
            .iter()
            .zip(uh.iter())
            .map(|(&(x, w), v)| w * (v - problem.exact(x, t)).powi(2))
            .sum();
        worst = worst.max(sq.sqrt());
    }
    Ok(worst)
}

fn log_ratio(prev: f64, cur: f64) -> Option<f64> {
    if prev > 0.0 && cur > 0.0 && prev.is_finite() && cur.is_finite() {
        Some((prev / cur).ln())
    } else {
        None
    }
}

/// Empirical orders `ln(e_{i-1}/e_i) / ln(N_i/N_{i-1})`; entry 0 is `None`,
/// as is any entry with a non-positive error.
pub fn eoc(errors: &[f64], ns: &[usize]) -> Vec<Option<f64>> {
    let mut out = vec![None; errors.len()];
    for i in 1..errors.len().min(ns.len()) {
        if ns[i] > ns[i - 1] {
            out[i] = log_ratio(errors[i - 1], errors[i]).map(|r| r / (ns[i] as f64 / ns[i - 1] as f64).ln());
        }
    }
    out
}

/// Exponential coefficients `ln(e_{L-1}/e_L) / (sqrt(N_L) - sqrt(N_{L-1}))`.
pub fn exp_coefficient(errors: &[f64], dofs: &[usize]) -> Vec<Option<f64>> {
    let mut out = vec![None; errors.len()];
    for i in 1..errors.len().min(dofs.len()) {
        let d = (dofs[i] as f64).sqrt() - (dofs[i - 1] as f64).sqrt();
        if d > 0.0 {
            out[i] = log_ratio(errors[i - 1], errors[i]).map(|r| r / d);
        }
    }
    out
}

/// Coefficient of determination of the least-squares line through `(x, y)`.
pub fn linear_fit_r2(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 1.0;
    }
    sxy * sxy / (sxx * syy)
}

/// Spatial discretization requested by a study.
#[derive(Debug, Clone, PartialEq)]
pub enum BackendSpec {
    /// Exact eigenpairs; `modes = None` takes the largest active wavenumber.
    Spectral {
        modes: Option<usize>,
    },
    Fem {
        elements: usize,
        degree: usize,
    },
}

impl BackendSpec {
    pub fn build(&self, problem: &ManufacturedProblem) -> Result<ModeSystem> {
        match *self {
            BackendSpec::Spectral { modes } => spectral_backend(
                modes.unwrap_or_else(|| problem.max_wavenumber().max(1)),
                problem.diffusivity,
            ),
            BackendSpec::Fem { elements, degree } => Ok(fem_backend(elements, degree, problem.diffusivity)?.1),
        }
    }
}

impl Default for BackendSpec {
    fn default() -> Self {
        BackendSpec::Spectral { modes: None }
    }
}

/// Outcome of a single solve against a manufactured solution.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: DgSolution,
    pub error: f64,
    pub stability: Option<StabilityReport>,
    pub seconds: f64,
}

/// Solves `problem` on `mesh` and measures the error.
pub fn run_single(
    problem: &ManufacturedProblem,
    backend: &ModeSystem,
    mesh: &TimeMesh,
    m: usize,
    kernel: &KernelConfig,
    with_stability: bool,
) -> Result<SolveOutcome> {
    let start = Instant::now();
    let order = FractionalOrder::new(problem.alpha)?;
    let modes = backend.mode_problems(problem)?;
    let config = StepperConfig { kernel: kernel.clone() };
    let solution = solve(&modes, mesh, &order, &config)?;
    let error = error_measure(&solution, problem, backend, m)?;
    if !error.is_finite() {
        return Err(Error::LinearAlgebra(format!("non-finite error on {}", mesh.family())));
    }
    let stability = if with_stability {
        Some(stability_report(&solution, &modes, &order)?)
    } else {
        None
    };
    Ok(SolveOutcome {
        solution,
        error,
        stability,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// One line of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    /// `graded` or `geometric`.
    pub family: String,
    pub alpha: f64,
    pub backend: String,
    pub gamma_or_delta: f64,
    /// Uniform degree `p` (graded) or slope `mu` (geometric).
    pub p_or_mu: f64,
    /// Interval count `N` (graded) or levels `L` (geometric).
    pub n_or_l: usize,
    pub dofs: usize,
    pub error: f64,
    pub rate_or_b: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ReportMetadata {
    pub m: usize,
    pub config_hash: String,
    /// Seconds since the Unix epoch; omitted from deterministic output.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub metadata: ReportMetadata,
    /// Cells that failed, with the reason; the other rows are still valid.
    pub failures: Vec<String>,
    /// Plot error against delta, one curve per order, instead of convergence curves.
    pub sweep: bool,
}

pub const CSV_HEADER: &str = "family,alpha,backend,gamma_or_delta,p_or_mu,N_or_L,dofs,error,rate_or_b,seconds";

impl ConvergenceReport {
    /// CSV text. Comment lines carry the metadata; `deterministic` drops the
    /// timestamp and writes zero timings so reruns compare byte for byte.
    pub fn to_csv(&self, deterministic: bool) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# config_hash={}", self.metadata.config_hash);
        let _ = writeln!(s, "# m={}", self.metadata.m);
        if !deterministic {
            let _ = writeln!(s, "# timestamp={}", self.metadata.timestamp);
        }
        for f in &self.failures {
            let _ = writeln!(s, "# failed: {f}");
        }
        let _ = writeln!(s, "{CSV_HEADER}");
        for r in &self.rows {
            let rate = r.rate_or_b.map(|v| format!("{v:.6}")).unwrap_or_default();
            let secs = if deterministic { 0.0 } else { r.seconds };
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{:.6e},{},{:.3}",
                r.family, r.alpha, r.backend, r.gamma_or_delta, r.p_or_mu, r.n_or_l, r.dofs, r.error, rate, secs
            );
        }
        s
    }

    /// Curves for plotting: one per `(alpha, gamma or delta, p or mu)` group
    /// for studies, `x = N` (graded) or `x = sqrt(dofs)` (geometric); one per
    /// order with `x = delta` for sweeps.
    pub fn curves(&self) -> Vec<(String, Vec<(f64, f64)>)> {
        if self.sweep {
            return sweep_curves(self)
                .into_iter()
                .map(|(alpha, pts)| (format!("sweep_alpha{alpha}"), pts))
                .collect();
        }
        let mut out: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
        for r in &self.rows {
            let name = format!(
                "{}_alpha{}_{}{}_{}{}",
                r.family,
                r.alpha,
                if r.family == "graded" { "gamma" } else { "delta" },
                r.gamma_or_delta,
                if r.family == "graded" { "p" } else { "mu" },
                r.p_or_mu
            );
            let x = if r.family == "graded" {
                r.n_or_l as f64
            } else {
                (r.dofs as f64).sqrt()
            };
            match out.iter_mut().find(|(n, _)| *n == name) {
                Some((_, pts)) => pts.push((x, r.error)),
                None => out.push((name, vec![(x, r.error)])),
            }
        }
        out
    }

    /// Writes `<stem>.csv`, one `x,y` file per curve and `<stem>_manifest.txt`.
    pub fn write(&self, dir: &Path, stem: &str, deterministic: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let csv = dir.join(format!("{stem}.csv"));
        fs::write(&csv, self.to_csv(deterministic))?;
        written.push(csv);
        let mut manifest = String::new();
        for (name, pts) in self.curves() {
            let file = format!("{stem}_{name}.dat");
            let mut body = String::from("x,y\n");
            for (x, y) in pts {
                let _ = writeln!(body, "{x},{y:.6e}");
            }
            let path = dir.join(&file);
            fs::write(&path, body)?;
            written.push(path);
            let _ = writeln!(manifest, "{name}\t{file}");
        }
        let mpath = dir.join(format!("{stem}_manifest.txt"));
        fs::write(&mpath, manifest)?;
        written.push(mpath);
        Ok(written)
    }
}

/// Graded-mesh (h-version) study over `gammas x degrees x ns`.
#[derive(Debug, Clone, PartialEq)]
pub struct HStudyConfig {
    pub alpha: f64,
    pub final_time: f64,
    pub gammas: Vec<f64>,
    pub degrees: Vec<usize>,
    pub ns: Vec<usize>,
    pub problem: ProblemSpec,
    pub backend: BackendSpec,
    pub m: usize,
    /// `None` applies [`default_first_interval_linear`].
    pub first_interval_linear: Option<bool>,
    pub kernel: KernelConfig,
}

impl Default for HStudyConfig {
    fn default() -> Self {
        HStudyConfig {
            alpha: -0.7,
            final_time: 1.0,
            gammas: vec![1.0, 1.3, 1.6],
            degrees: vec![1],
            ns: vec![18, 27, 36, 72],
            problem: ProblemSpec::default(),
            backend: BackendSpec::default(),
            m: 10,
            first_interval_linear: None,
            kernel: KernelConfig::default(),
        }
    }
}

/// Geometric-mesh (hp-version) study over `deltas x levels`.
#[derive(Debug, Clone, PartialEq)]
pub struct HpStudyConfig {
    pub alpha: f64,
    pub final_time: f64,
    pub t1: f64,
    pub mu: f64,
    pub deltas: Vec<f64>,
    pub levels: Vec<usize>,
    pub problem: ProblemSpec,
    pub backend: BackendSpec,
    pub m: usize,
    pub kernel: KernelConfig,
}

impl Default for HpStudyConfig {
    fn default() -> Self {
        HpStudyConfig {
            alpha: -0.7,
            final_time: 1.0,
            t1: 1.0,
            mu: 1.0,
            deltas: vec![0.21, 0.24, 0.27, 0.30],
            levels: vec![3, 4, 5, 6, 7],
            problem: ProblemSpec::default(),
            backend: BackendSpec::default(),
            m: 60,
            kernel: KernelConfig::default(),
        }
    }
}

/// Error against `delta` at a fixed dof count, for several orders.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSweepConfig {
    pub alphas: Vec<f64>,
    pub deltas: Vec<f64>,
    pub dofs: usize,
    pub final_time: f64,
    pub t1: f64,
    pub mu: f64,
    pub problem: ProblemSpec,
    pub backend: BackendSpec,
    pub m: usize,
    pub kernel: KernelConfig,
}

impl Default for DeltaSweepConfig {
    fn default() -> Self {
        DeltaSweepConfig {
            alphas: vec![-0.3, -0.5, -0.7],
            deltas: (0..8).map(|i| 0.15 + 0.03 * i as f64).collect(),
            dofs: 44,
            final_time: 1.0,
            t1: 1.0,
            mu: 1.0,
            problem: ProblemSpec::default(),
            backend: BackendSpec::default(),
            m: 60,
            kernel: KernelConfig::default(),
        }
    }
}

struct Cell {
    alpha: f64,
    param: f64,
    degree_or_mu: f64,
    count: usize,
    mesh: Result<TimeMesh>,
}

fn run_cells(
    cells: Vec<Cell>,
    family: &str,
    problem: &ProblemSpec,
    backend: &BackendSpec,
    m: usize,
    kernel: &KernelConfig,
) -> (Vec<ReportRow>, Vec<String>) {
    let results: Vec<std::result::Result<ReportRow, String>> = cells
        .into_par_iter()
        .map(|cell| {
            let describe = |e: Error| {
                format!(
                    "{family} alpha={} param={} count={}: {e}",
                    cell.alpha, cell.param, cell.count
                )
            };
            let mesh = cell.mesh.map_err(describe)?;
            let problem = problem.build(cell.alpha).map_err(describe)?;
            let system = backend.build(&problem).map_err(describe)?;
            let out = run_single(&problem, &system, &mesh, m, kernel, false).map_err(describe)?;
            Ok(ReportRow {
                family: family.to_string(),
                alpha: cell.alpha,
                backend: system.label(),
                gamma_or_delta: cell.param,
                p_or_mu: cell.degree_or_mu,
                n_or_l: cell.count,
                dofs: mesh.dof_count(),
                error: out.error,
                rate_or_b: None,
                seconds: out.seconds,
            })
        })
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                log::error!("{e}");
                failures.push(e);
            }
        }
    }
    (rows, failures)
}

/// Fills `rate_or_b` within runs of rows sharing alpha, parameter and degree.
fn fill_rates(rows: &mut [ReportRow], exponential: bool) {
    let mut start = 0;
    while start < rows.len() {
        let key = |r: &ReportRow| (r.alpha, r.gamma_or_delta, r.p_or_mu);
        let mut end = start + 1;
        while end < rows.len() && key(&rows[end]) == key(&rows[start]) {
            end += 1;
        }
        let errors: Vec<f64> = rows[start..end].iter().map(|r| r.error).collect();
        let rates = if exponential {
            let dofs: Vec<usize> = rows[start..end].iter().map(|r| r.dofs).collect();
            exp_coefficient(&errors, &dofs)
        } else {
            let ns: Vec<usize> = rows[start..end].iter().map(|r| r.n_or_l).collect();
            eoc(&errors, &ns)
        };
        for (r, v) in rows[start..end].iter_mut().zip(rates) {
            r.rate_or_b = v;
        }
        start = end;
    }
}

fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn run_h_study(config: &HStudyConfig) -> Result<ConvergenceReport> {
    FractionalOrder::new(config.alpha)?;
    let mut cells = Vec::new();
    for &p in &config.degrees {
        for &gamma in &config.gammas {
            let linear = config
                .first_interval_linear
                .unwrap_or_else(|| default_first_interval_linear(gamma));
            for &n in &config.ns {
                cells.push(Cell {
                    alpha: config.alpha,
                    param: gamma,
                    degree_or_mu: p as f64,
                    count: n,
                    mesh: TimeMesh::graded(config.final_time, n, gamma, p, linear),
                });
            }
        }
    }
    let (mut rows, failures) = run_cells(
        cells,
        "graded",
        &config.problem,
        &config.backend,
        config.m,
        &config.kernel,
    );
    fill_rates(&mut rows, false);
    Ok(ConvergenceReport {
        rows,
        metadata: ReportMetadata {
            m: config.m,
            config_hash: String::new(),
            timestamp: timestamp(),
        },
        failures,
        sweep: false,
    })
}

pub fn run_hp_study(config: &HpStudyConfig) -> Result<ConvergenceReport> {
    FractionalOrder::new(config.alpha)?;
    let mut cells = Vec::new();
    for &delta in &config.deltas {
        for &l in &config.levels {
            cells.push(Cell {
                alpha: config.alpha,
                param: delta,
                degree_or_mu: config.mu,
                count: l,
                mesh: TimeMesh::geometric(config.final_time, config.t1, delta, l, config.mu, 1),
            });
        }
    }
    let (mut rows, failures) = run_cells(
        cells,
        "geometric",
        &config.problem,
        &config.backend,
        config.m,
        &config.kernel,
    );
    fill_rates(&mut rows, true);
    Ok(ConvergenceReport {
        rows,
        metadata: ReportMetadata {
            m: config.m,
            config_hash: String::new(),
            timestamp: timestamp(),
        },
        failures,
        sweep: false,
    })
}

/// Number of levels giving exactly `dofs` temporal degrees of freedom.
pub fn levels_for_dofs(final_time: f64, t1: f64, mu: f64, dofs: usize) -> Result<usize> {
    (0..=200)
        .find(|&l| {
            TimeMesh::geometric(final_time, t1, 0.5, l, mu, 1)
                .map(|m| m.dof_count() == dofs)
                .unwrap_or(false)
        })
        .ok_or_else(|| Error::Mesh(format!("no level count gives {dofs} degrees of freedom")))
}

pub fn delta_sweep(config: &DeltaSweepConfig) -> Result<ConvergenceReport> {
    let levels = levels_for_dofs(config.final_time, config.t1, config.mu, config.dofs)?;
    let mut cells = Vec::new();
    for &alpha in &config.alphas {
        FractionalOrder::new(alpha)?;
        for &delta in &config.deltas {
            cells.push(Cell {
                alpha,
                param: delta,
                degree_or_mu: config.mu,
                count: levels,
                mesh: TimeMesh::geometric(config.final_time, config.t1, delta, levels, config.mu, 1),
            });
        }
    }
    let (rows, failures) = run_cells(
        cells,
        "geometric",
        &config.problem,
        &config.backend,
        config.m,
        &config.kernel,
    );
    Ok(ConvergenceReport {
        rows,
        metadata: ReportMetadata {
            m: config.m,
            config_hash: String::new(),
            timestamp: timestamp(),
        },
        failures,
        sweep: true,
    })
}

/// Curves of a delta sweep: one per alpha, `x = delta`.
pub fn sweep_curves(report: &ConvergenceReport) -> Vec<(f64, Vec<(f64, f64)>)> {
    let mut out: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    for r in &report.rows {
        match out.iter_mut().find(|(a, _)| *a == r.alpha) {
            Some((_, pts)) => pts.push((r.gamma_or_delta, r.error)),
            None => out.push((r.alpha, vec![(r.gamma_or_delta, r.error)])),
        }
    }
    out
}

/// One randomized check of the discrete stability estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityTrial {
    pub alpha: f64,
    pub intervals: usize,
    pub degree: usize,
    pub min_relative_slack: f64,
    pub holds: bool,
}

/// Random orders, graded meshes, initial values and polynomial forcings;
/// every other run is unforced. Reproducible for a given seed.
pub fn random_stability_suite(seed: u64, runs: usize) -> Result<Vec<StabilityTrial>> {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(runs);
    for r in 0..runs {
        let alpha: f64 = rng.gen_range(-0.95..-0.05);
        let n: usize = rng.gen_range(2..=10);
        let gamma: f64 = rng.gen_range(1.0..3.0);
        let p: usize = rng.gen_range(1..=3);
        let modes: usize = rng.gen_range(1..=3);
        let problems: Vec<crate::stepper::ModeProblem> = (0..modes)
            .map(|_| {
                let lambda = rng.gen_range(0.5..60.0);
                let u0 = rng.gen_range(-1.0..1.0);
                let mut f = crate::timefn::PowerSeries::default();
                if r % 2 == 1 {
                    for e in 0..=rng.gen_range(0..=2) {
                        f.push(rng.gen_range(-2.0..2.0), e as f64);
                    }
                }
                crate::stepper::ModeProblem {
                    lambda,
                    forcing: f.into(),
                    u0,
                }
            })
            .collect();
        cases.push((alpha, n, gamma, p, problems));
    }
    cases
        .into_par_iter()
        .map(|(alpha, n, gamma, p, problems)| {
            let order = FractionalOrder::new(alpha)?;
            let mesh = TimeMesh::graded(1.0, n, gamma, p, false)?;
            let sol = solve(&problems, &mesh, &order, &StepperConfig::default())?;
            let report = stability_report(&sol, &problems, &order)?;
            Ok(StabilityTrial {
                alpha,
                intervals: n,
                degree: p,
                min_relative_slack: report.min_relative_slack(),
                holds: report.holds(),
            })
        })
        .collect()
}
