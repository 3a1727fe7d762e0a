//! Time marching for decoupled scalar modes
//! `u_m' + lambda_m B_alpha u_m = f_m`.
//!
//! On interval `I_n` the unknown `U_m = sum_l c_l P_l` solves, for every test
//! polynomial `w`,
//!
//! ```text
//! U^{n-1}_+ w^{n-1}_+ + int_{I_n} (U' w + lambda B_alpha U w) dt
//!     = U^{n-1}_- w^{n-1}_+ + int_{I_n} f w dt
//! ```
//!
//! where `B_alpha U` couples back to every earlier interval through the
//! memory blocks of [`crate::kernel`].

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::{legendre, memory_block, FractionalOrder, KernelConfig, MemoryBlock};
use crate::mesh::TimeMesh;
use crate::timefn::TimeFunction;

/// One decoupled mode: eigenvalue, forcing and initial value.
#[derive(Debug, Clone)]
pub struct ModeProblem {
    pub lambda: f64,
    pub forcing: TimeFunction,
    pub u0: f64,
}

impl ModeProblem {
    pub fn new(lambda: f64, forcing: TimeFunction, u0: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::domain(format!("mode eigenvalue must be >= 0, got {lambda}")));
        }
        Ok(ModeProblem { lambda, forcing, u0 })
    }
}

#[derive(Debug, Clone, Default)]
pub struct StepperConfig {
    pub kernel: KernelConfig,
}

/// Piecewise polynomial solution: Legendre coefficients per mode and interval.
#[derive(Debug, Clone)]
pub struct DgSolution {
    mesh: TimeMesh,
    coeffs: Vec<Vec<DVector<f64>>>,
    initial: Vec<f64>,
    /// `int_{I_n} B_alpha U_m * U_m dt` per mode and interval.
    memory_energy: Vec<Vec<f64>>,
}

impl DgSolution {
    /// Builds a solution from explicit coefficients (`coeffs[mode][interval]`).
    pub fn from_coefficients(mesh: TimeMesh, coeffs: Vec<Vec<DVector<f64>>>, initial: Vec<f64>) -> Result<Self> {
        if coeffs.len() != initial.len() {
            return Err(Error::domain("one initial value per mode is required"));
        }
        for per_mode in &coeffs {
            if per_mode.len() != mesh.num_intervals() {
                return Err(Error::domain("coefficient blocks do not match the mesh"));
            }
            for (n, c) in per_mode.iter().enumerate() {
                if c.len() != mesh.degree(n) + 1 {
                    return Err(Error::domain(format!(
                        "interval {n}: {} coefficients for degree {}",
                        c.len(),
                        mesh.degree(n)
                    )));
                }
            }
        }
        let memory_energy = vec![Vec::new(); coeffs.len()];
        Ok(DgSolution {
            mesh,
            coeffs,
            initial,
            memory_energy,
        })
    }

    pub fn mesh(&self) -> &TimeMesh {
        &self.mesh
    }

    pub fn num_modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self, mode: usize, interval: usize) -> &DVector<f64> {
        &self.coeffs[mode][interval]
    }

    /// `U^0_-` for `mode`.
    pub fn initial_value(&self, mode: usize) -> f64 {
        self.initial[mode]
    }

    /// Value of the polynomial of `interval` at `t` (extrapolated if `t` lies outside it).
    pub fn evaluate_on(&self, mode: usize, interval: usize, t: f64) -> f64 {
        let (a, b) = self.mesh.interval(interval);
        legendre::eval_series(self.coeffs[mode][interval].as_slice(), legendre::to_reference(t, a, b))
    }

    /// `U_m(t)`; interior nodes take the left limit, `t = 0` the right limit.
    pub fn evaluate(&self, mode: usize, t: f64) -> Result<f64> {
        let i = self
            .mesh
            .locate(t)
            .ok_or_else(|| Error::domain(format!("t = {t} outside [0, {}]", self.mesh.final_time())))?;
        Ok(self.evaluate_on(mode, i, t))
    }

    /// `U^n_-` for `n = 1..=N` (index `n - 1`).
    pub fn left_traces(&self, mode: usize) -> Vec<f64> {
        self.coeffs[mode].iter().map(|c| c.iter().sum()).collect()
    }

    /// `U^{n}_+` for `n = 0..N-1`.
    pub fn right_traces(&self, mode: usize) -> Vec<f64> {
        self.coeffs[mode]
            .iter()
            .map(|c| c.iter().enumerate().map(|(k, v)| legendre::left_value(k) * v).sum())
            .collect()
    }

    /// `int_0^T B_alpha U_m * U_m dt`, available for solutions produced by [`solve`].
    pub fn memory_form(&self, mode: usize) -> Option<f64> {
        let e = &self.memory_energy[mode];
        (e.len() == self.mesh.num_intervals()).then(|| e.iter().sum())
    }

    /// `int_0^T U_m^2 dt`.
    pub fn l2_norm_sq(&self, mode: usize) -> f64 {
        self.coeffs[mode]
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let k = self.mesh.step(n);
                c.iter()
                    .enumerate()
                    .map(|(i, v)| v * v * k / (2 * i + 1) as f64)
                    .sum::<f64>()
            })
            .sum()
    }

    /// Jumps `[U]^n = U^n_+ - U^n_-` for `n = 0..N-1`, with `U^0_-` the initial value.
    pub fn jumps(&self, mode: usize) -> Vec<f64> {
        let left = self.left_traces(mode);
        let right = self.right_traces(mode);
        (0..self.mesh.num_intervals())
            .map(|n| {
                let prev = if n == 0 { self.initial[mode] } else { left[n - 1] };
                right[n] - prev
            })
            .collect()
    }
}

/// Mode-independent part of the local matrix: upwind pairing plus transport.
fn transport_matrix(p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(p + 1, p + 1, |r, l| {
        legendre::left_value(r) * legendre::left_value(l) + legendre::transport_entry(r, l)
    })
}

/// Local matrix and right-hand side on interval `n` for one mode.
///
/// `history` is `sum_{j<n} M^{(n,j)} c^{(j)}`, the memory load of earlier
/// intervals; `incoming` is `U^{n-1}_-`.
pub fn assemble_local_system(
    problem: &ModeProblem,
    mesh: &TimeMesh,
    n: usize,
    local_block: &MemoryBlock,
    history: &DVector<f64>,
    incoming: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let p = mesh.degree(n);
    let (a, b) = mesh.interval(n);
    let matrix = transport_matrix(p) + &local_block.matrix * problem.lambda;
    let load = problem.forcing.legendre_moments(a, b, p);
    let rhs = DVector::from_fn(p + 1, |r, _| {
        incoming * legendre::left_value(r) + load[r] - problem.lambda * history[r]
    });
    (matrix, rhs)
}

/// All memory blocks with target `n`, ordered by source.
fn blocks_for_target(
    mesh: &TimeMesh,
    n: usize,
    order: &FractionalOrder,
    config: &KernelConfig,
) -> Result<Vec<MemoryBlock>> {
    (0..=n)
        .into_par_iter()
        .map(|j| memory_block(mesh, j, n, order, config))
        .collect()
}

/// Marches all modes over the mesh. Modes run in parallel; each reduction
/// over source intervals is sequential so results are bitwise reproducible.
pub fn solve(
    problems: &[ModeProblem],
    mesh: &TimeMesh,
    order: &FractionalOrder,
    config: &StepperConfig,
) -> Result<DgSolution> {
    let nint = mesh.num_intervals();
    let modes = problems.len();
    let mut coeffs: Vec<Vec<DVector<f64>>> = vec![Vec::with_capacity(nint); modes];
    let mut energy: Vec<Vec<f64>> = vec![Vec::with_capacity(nint); modes];
    let mut incoming: Vec<f64> = problems.iter().map(|p| p.u0).collect();

    for n in 0..nint {
        let blocks = blocks_for_target(mesh, n, order, &config.kernel)?;
        let local = &blocks[n];
        let results: Vec<Result<(DVector<f64>, f64)>> = problems
            .par_iter()
            .enumerate()
            .map(|(m, prob)| {
                let p = mesh.degree(n);
                let mut history = DVector::zeros(p + 1);
                for (j, blk) in blocks[..n].iter().enumerate() {
                    history += &blk.matrix * &coeffs[m][j];
                }
                let (mat, rhs) = assemble_local_system(prob, mesh, n, local, &history, incoming[m]);
                let c = mat
                    .lu()
                    .solve(&rhs)
                    .filter(|c| c.iter().all(|v| v.is_finite()))
                    .ok_or(Error::SingularLocalSystem { interval: n, mode: m })?;
                let memory = history + &local.matrix * &c;
                Ok((c.clone(), c.dot(&memory)))
            })
            .collect();
        for (m, r) in results.into_iter().enumerate() {
            let (c, e) = r?;
            incoming[m] = c.iter().sum();
            coeffs[m].push(c);
            energy[m].push(e);
        }
    }
    Ok(DgSolution {
        mesh: mesh.clone(),
        coeffs,
        initial: problems.iter().map(|p| p.u0).collect(),
        memory_energy: energy,
    })
}

/// Projection with `Pi u(t_n^-) = u(t_n)` and `u - Pi u` orthogonal to
/// polynomials of degree `p_n - 1` on every interval.
pub fn pi_projection(profiles: &[TimeFunction], mesh: &TimeMesh) -> DgSolution {
    let coeffs = profiles
        .iter()
        .map(|u| {
            (0..mesh.num_intervals())
                .map(|n| {
                    let (a, b) = mesh.interval(n);
                    let p = mesh.degree(n);
                    let moments = u.legendre_moments(a, b, p);
                    let mut c = DVector::zeros(p + 1);
                    let mut partial = 0.0;
                    for k in 0..p {
                        c[k] = (2 * k + 1) as f64 / (b - a) * moments[k];
                        partial += c[k];
                    }
                    c[p] = u.eval(b) - partial;
                    c
                })
                .collect()
        })
        .collect();
    let initial = profiles.iter().map(|u| u.eval(0.0)).collect();
    DgSolution {
        mesh: mesh.clone(),
        coeffs,
        initial,
        memory_energy: vec![Vec::new(); profiles.len()],
    }
}

/// Both sides of the discrete stability estimate at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// `||U^n_-||^2 + ||U^{n-1}_+||^2 + 2 int_0^{t_n} A(B_alpha U, U) dt`.
    pub lhs: Vec<f64>,
    /// `4 ||U^0_-||^2 + 4 d_alpha^2 int_0^{t_n} |<g, A^{-1} f>| dt`, `g = I^{-alpha} f`.
    pub rhs: Vec<f64>,
    /// Nodes (1-based) where `lhs > rhs` beyond the relative slack.
    pub violations: Vec<usize>,
}

impl StabilityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    /// Smallest `(rhs - lhs) / max(rhs, tiny)` over all nodes.
    pub fn min_relative_slack(&self) -> f64 {
        self.lhs
            .iter()
            .zip(&self.rhs)
            .map(|(l, r)| {
                if *r == 0.0 && *l == 0.0 {
                    0.0
                } else {
                    (r - l) / r.abs().max(1e-300)
                }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Evaluates the stability estimate for a solution of `problems`.
pub fn stability_report(
    solution: &DgSolution,
    problems: &[ModeProblem],
    order: &FractionalOrder,
) -> Result<StabilityReport> {
    if problems.len() != solution.num_modes() {
        return Err(Error::domain("problem count does not match solution modes"));
    }
    if solution
        .memory_energy
        .iter()
        .any(|e| e.len() != solution.mesh.num_intervals())
    {
        return Err(Error::domain(
            "stability report needs a solution produced by the stepper",
        ));
    }
    let active: Vec<&ModeProblem> = problems.iter().filter(|p| !p.forcing_is_zero()).collect();
    if active.iter().any(|p| p.lambda <= 0.0) {
        return Err(Error::domain("A^{-1} f needs positive eigenvalues on forced modes"));
    }
    let mesh = &solution.mesh;
    let beta = -order.alpha();
    let d2 = order.d_alpha().powi(2);

    // h(t) = sum_m g_m(t) f_m(t) / lambda_m
    let h = |t: f64| -> f64 {
        active
            .iter()
            .map(|p| p.forcing.fractional_integral_at(beta, t) * p.forcing.eval(t) / p.lambda)
            .sum()
    };
    let lead = active
        .iter()
        .map(|p| 2.0 * p.forcing.singular_exponent() + beta)
        .fold(0.0f64, f64::min)
        .max(-0.999);

    let u0_norm2: f64 = solution.initial.iter().map(|v| v * v).sum();
    let mut lhs = Vec::with_capacity(mesh.num_intervals());
    let mut rhs = Vec::with_capacity(mesh.num_intervals());
    let mut forcing_integral = 0.0;
    let mut energy_sum = vec![0.0; problems.len()];
    let lefts: Vec<Vec<f64>> = (0..problems.len()).map(|m| solution.left_traces(m)).collect();
    let rights: Vec<Vec<f64>> = (0..problems.len()).map(|m| solution.right_traces(m)).collect();

    for n in 0..mesh.num_intervals() {
        let (a, b) = mesh.interval(n);
        if !active.is_empty() {
            forcing_integral += if n == 0 && lead != 0.0 {
                crate::kernel::quadrature::gauss_jacobi_rule(40, lead, (0.0, b))?
                    .iter()
                    .map(|&(t, w)| w * h(t).abs() / t.powf(lead))
                    .sum::<f64>()
            } else {
                crate::kernel::quadrature::integrate_near_singular(
                    |t| h(t).abs(),
                    a,
                    b,
                    if a > 0.0 { 0.0 } else { -b },
                    24,
                )
            };
        }
        let mut l = 0.0;
        for (m, p) in problems.iter().enumerate() {
            energy_sum[m] += solution.memory_energy[m][n];
            l += lefts[m][n].powi(2) + rights[m][n].powi(2) + 2.0 * p.lambda * energy_sum[m];
        }
        lhs.push(l);
        rhs.push(4.0 * u0_norm2 + 4.0 * d2 * forcing_integral);
    }
    let violations = lhs
        .iter()
        .zip(&rhs)
        .enumerate()
        .filter(|(_, (l, r))| **l > **r + 1e-8 * r.abs().max(1e-300))
        .map(|(i, _)| i + 1)
        .collect();
    Ok(StabilityReport { lhs, rhs, violations })
}

impl ModeProblem {
    fn forcing_is_zero(&self) -> bool {
        matches!(&self.forcing, TimeFunction::Powers(p) if p.is_zero())
    }
}
