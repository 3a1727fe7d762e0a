//! Spatial backends on `(0,1)` with homogeneous Dirichlet conditions.
//!
//! Both backends reduce the problem to decoupled scalar modes: the spectral
//! backend uses the exact eigenpairs of `-K d^2/dx^2`, the finite element
//! backend diagonalizes the discrete pencil (stiffness, mass) so that the
//! fully discrete scheme is solved exactly in the discrete eigenbasis.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernel::quadrature::legendre_rule;
use crate::problems::ManufacturedProblem;
use crate::stepper::ModeProblem;
use crate::timefn::{PowerSeries, TimeFunction};

/// Continuous piecewise `P_r` Lagrange elements on a uniform mesh of `(0,1)`.
#[derive(Debug, Clone)]
pub struct FemSpace {
    elements: usize,
    degree: usize,
    diffusivity: f64,
    /// Interior node coordinates (the unknowns).
    nodes: Vec<f64>,
    stiffness: DMatrix<f64>,
    mass: DMatrix<f64>,
}

/// Lagrange basis on equispaced nodes of `[0,1]`: values and derivatives at `xi`.
fn lagrange(r: usize, xi: f64) -> (Vec<f64>, Vec<f64>) {
    let pts: Vec<f64> = (0..=r).map(|i| i as f64 / r as f64).collect();
    let mut val = vec![0.0; r + 1];
    let mut der = vec![0.0; r + 1];
    for i in 0..=r {
        let mut v = 1.0;
        let mut d = 0.0;
        for j in (0..=r).filter(|&j| j != i) {
            let den = pts[i] - pts[j];
            d = d * (xi - pts[j]) / den + v / den;
            v *= (xi - pts[j]) / den;
        }
        val[i] = v;
        der[i] = d;
    }
    (val, der)
}

impl FemSpace {
    pub fn new(elements: usize, degree: usize, diffusivity: f64) -> Result<Self> {
        if elements < 2 {
            return Err(Error::domain(format!("need at least 2 elements, got {elements}")));
        }
        if !(1..=8).contains(&degree) {
            return Err(Error::domain(format!("element degree must be in 1..=8, got {degree}")));
        }
        if !(diffusivity > 0.0) {
            return Err(Error::domain(format!(
                "diffusivity must be positive, got {diffusivity}"
            )));
        }
        let h = 1.0 / elements as f64;
        let total = elements * degree + 1;
        let n = total - 2;
        let mut stiffness = DMatrix::zeros(n, n);
        let mut mass = DMatrix::zeros(n, n);
        let rule = legendre_rule(degree + 2);
        for e in 0..elements {
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let xi = 0.5 * (x + 1.0);
                let w = 0.5 * w * h;
                let (val, der) = lagrange(degree, xi);
                for i in 0..=degree {
                    let gi = e * degree + i;
                    if gi == 0 || gi == total - 1 {
                        continue;
                    }
                    for j in 0..=degree {
                        let gj = e * degree + j;
                        if gj == 0 || gj == total - 1 {
                            continue;
                        }
                        stiffness[(gi - 1, gj - 1)] += w * diffusivity * der[i] * der[j] / (h * h);
                        mass[(gi - 1, gj - 1)] += w * val[i] * val[j];
                    }
                }
            }
        }
        let nodes = (1..total - 1).map(|g| g as f64 * h / degree as f64).collect();
        Ok(FemSpace {
            elements,
            degree,
            diffusivity,
            nodes,
            stiffness,
            mass,
        })
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn mesh_width(&self) -> f64 {
        1.0 / self.elements as f64
    }

    pub fn diffusivity(&self) -> f64 {
        self.diffusivity
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn stiffness(&self) -> &DMatrix<f64> {
        &self.stiffness
    }

    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// Composite Gauss points with `points` nodes per element.
    pub fn quadrature(&self, points: usize) -> Vec<(f64, f64)> {
        let rule = legendre_rule(points);
        let h = self.mesh_width();
        (0..self.elements)
            .flat_map(|e| {
                let a = e as f64 * h;
                rule.mapped(a, a + h).collect::<Vec<_>>()
            })
            .collect()
    }

    /// Value at `x` of the finite element function with interior nodal values `u`.
    pub fn evaluate(&self, u: &[f64], x: f64) -> f64 {
        let h = self.mesh_width();
        let e = ((x / h).floor() as usize).min(self.elements - 1);
        let xi = (x - e as f64 * h) / h;
        let (val, _) = lagrange(self.degree, xi);
        let total = self.nodes.len() + 2;
        (0..=self.degree)
            .map(|i| {
                let g = e * self.degree + i;
                if g == 0 || g == total - 1 {
                    0.0
                } else {
                    val[i] * u[g - 1]
                }
            })
            .sum()
    }

    /// Load vector `int g chi_i dx`, accurate for smooth `g`.
    pub fn load<G: Fn(f64) -> f64>(&self, g: G) -> DVector<f64> {
        self.assemble_load(|x, v, _| g(x) * v)
    }

    fn assemble_load<F: Fn(f64, f64, f64) -> f64>(&self, integrand: F) -> DVector<f64> {
        let h = self.mesh_width();
        let total = self.nodes.len() + 2;
        let mut b = DVector::zeros(self.nodes.len());
        let rule = legendre_rule(self.degree + 4);
        for e in 0..self.elements {
            for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
                let xi = 0.5 * (x + 1.0);
                let xx = e as f64 * h + xi * h;
                let w = 0.5 * w * h;
                let (val, der) = lagrange(self.degree, xi);
                for i in 0..=self.degree {
                    let g = e * self.degree + i;
                    if g == 0 || g == total - 1 {
                        continue;
                    }
                    b[g - 1] += w * integrand(xx, val[i], der[i] / h);
                }
            }
        }
        b
    }
}

/// Result of a Ritz projection.
#[derive(Debug, Clone)]
pub struct RitzProjection {
    /// Interior nodal values of `R_h u0`.
    pub nodal: DVector<f64>,
    /// Set when `u0` does not vanish on the boundary.
    pub warning: Option<String>,
}

/// `A(R_h u0, chi) = A(u0, chi)` for all `chi`; needs `u0` and its derivative.
pub fn ritz_projection<U, D>(space: &FemSpace, u0: U, du0: D) -> Result<RitzProjection>
where
    U: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (left, right) = (u0(0.0), u0(1.0));
    let warning = if left.abs() > 1e-12 || right.abs() > 1e-12 {
        let msg = format!("initial datum violates the Dirichlet condition: u0(0) = {left}, u0(1) = {right}");
        log::warn!("{msg}");
        Some(msg)
    } else {
        None
    };
    let k = space.diffusivity;
    let load = space.assemble_load(|x, _, d| k * du0(x) * d);
    let nodal = space
        .stiffness
        .clone()
        .cholesky()
        .ok_or_else(|| Error::LinearAlgebra("stiffness matrix is not positive definite".into()))?
        .solve(&load);
    Ok(RitzProjection { nodal, warning })
}

#[derive(Debug, Clone)]
enum Shapes {
    Sine,
    /// Mass-orthonormal eigenvectors as columns.
    Discrete {
        space: FemSpace,
        vectors: DMatrix<f64>,
    },
}

/// Eigenvalues and mode shapes of the spatial operator.
#[derive(Debug, Clone)]
pub struct ModeSystem {
    eigenvalues: Vec<f64>,
    diffusivity: f64,
    shapes: Shapes,
}

/// Exact sine eigensystem with `M` modes.
pub fn spectral_backend(modes: usize, diffusivity: f64) -> Result<ModeSystem> {
    if modes == 0 {
        return Err(Error::domain("need at least one mode"));
    }
    if !(diffusivity > 0.0) {
        return Err(Error::domain(format!(
            "diffusivity must be positive, got {diffusivity}"
        )));
    }
    Ok(ModeSystem {
        eigenvalues: (1..=modes).map(|m| diffusivity * (m as f64 * PI).powi(2)).collect(),
        diffusivity,
        shapes: Shapes::Sine,
    })
}

/// Finite element space and its discrete eigensystem (all modes).
pub fn fem_backend(elements: usize, degree: usize, diffusivity: f64) -> Result<(FemSpace, ModeSystem)> {
    let space = FemSpace::new(elements, degree, diffusivity)?;
    let chol = space
        .mass
        .clone()
        .cholesky()
        .ok_or_else(|| Error::LinearAlgebra("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::LinearAlgebra("singular mass factor".into()))?;
    let c = &l_inv * &space.stiffness * l_inv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..space.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let back = l_inv.transpose();
    let mut vectors = DMatrix::zeros(space.dim(), space.dim());
    let mut eigenvalues = Vec::with_capacity(space.dim());
    for (col, &i) in order.iter().enumerate() {
        let mut z = &back * eig.eigenvectors.column(i);
        // fix the sign so that mode shapes start positive near x = 0
        if z[0] < 0.0 {
            z = -z;
        }
        vectors.set_column(col, &z);
        eigenvalues.push(eig.eigenvalues[i]);
    }
    if eigenvalues[0] <= 0.0 {
        return Err(Error::LinearAlgebra("non-positive discrete eigenvalue".into()));
    }
    let system = ModeSystem {
        eigenvalues,
        diffusivity,
        shapes: Shapes::Discrete {
            space: space.clone(),
            vectors,
        },
    };
    Ok((space, system))
}

impl ModeSystem {
    pub fn mode_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn diffusivity(&self) -> f64 {
        self.diffusivity
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self.shapes, Shapes::Sine)
    }

    pub fn fem_space(&self) -> Option<&FemSpace> {
        match &self.shapes {
            Shapes::Sine => None,
            Shapes::Discrete { space, .. } => Some(space),
        }
    }

    /// Mass-orthonormal eigenvectors of the finite element backend.
    pub fn mode_vectors(&self) -> Option<&DMatrix<f64>> {
        match &self.shapes {
            Shapes::Sine => None,
            Shapes::Discrete { vectors, .. } => Some(vectors),
        }
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        match &self.shapes {
            Shapes::Sine => format!("spectral(M={})", self.mode_count()),
            Shapes::Discrete { space, .. } => format!("fem(elements={},r={})", space.elements, space.degree),
        }
    }

    /// `<g, phi_m>` for every mode. The finite element backend uses the
    /// `L2` projection onto the discrete space.
    pub fn decompose<G: Fn(f64) -> f64>(&self, g: G) -> Vec<f64> {
        match &self.shapes {
            Shapes::Sine => {
                let pts = sine_quadrature(self.mode_count());
                (1..=self.mode_count())
                    .map(|m| {
                        pts.iter()
                            .map(|&(x, w)| w * g(x) * SQRT_2 * (m as f64 * PI * x).sin())
                            .sum()
                    })
                    .collect()
            }
            Shapes::Discrete { space, vectors } => {
                let b = space.load(g);
                (vectors.transpose() * b).iter().copied().collect()
            }
        }
    }

    /// `sum_m values[m] phi_m(x)` at each point of `xs`.
    pub fn synthesize(&self, values: &[f64], xs: &[f64]) -> Vec<f64> {
        match &self.shapes {
            Shapes::Sine => xs
                .iter()
                .map(|&x| {
                    values
                        .iter()
                        .enumerate()
                        .map(|(m, v)| v * SQRT_2 * ((m + 1) as f64 * PI * x).sin())
                        .sum()
                })
                .collect(),
            Shapes::Discrete { space, vectors } => {
                let nodal = vectors * DVector::from_column_slice(values);
                xs.iter().map(|&x| space.evaluate(nodal.as_slice(), x)).collect()
            }
        }
    }

    /// Decoupled scalar problems for a manufactured problem. The finite
    /// element backend starts from the Ritz projection of `u0` and projects the
    /// forcing onto each discrete mode.
    pub fn mode_problems(&self, problem: &ManufacturedProblem) -> Result<Vec<ModeProblem>> {
        if (problem.diffusivity - self.diffusivity).abs() > 1e-14 * self.diffusivity {
            return Err(Error::domain(format!(
                "problem diffusivity {} differs from backend diffusivity {}",
                problem.diffusivity, self.diffusivity
            )));
        }
        match &self.shapes {
            Shapes::Sine => {
                let mut modes = problem.spectral_modes(self.mode_count());
                for (m, mode) in modes.iter_mut().enumerate() {
                    mode.lambda = self.eigenvalues[m];
                }
                Ok(modes)
            }
            Shapes::Discrete { space, vectors } => {
                let u0 = |x: f64| problem.initial(x);
                let du0 = |x: f64| {
                    problem
                        .components
                        .iter()
                        .map(|c| {
                            let k = c.wavenumber as f64 * PI;
                            c.profile.eval(0.0) * k * (k * x).cos()
                        })
                        .sum::<f64>()
                };
                let ritz = ritz_projection(space, u0, du0)?;
                let initial = vectors.transpose() * (&space.mass * &ritz.nodal);
                let loads: Vec<DVector<f64>> = problem
                    .components
                    .iter()
                    .map(|c| {
                        let k = c.wavenumber as f64 * PI;
                        vectors.transpose() * space.load(|x| (k * x).sin())
                    })
                    .collect();
                Ok((0..self.mode_count())
                    .map(|m| {
                        let mut forcing = PowerSeries::default();
                        for (c, load) in problem.components.iter().zip(&loads) {
                            forcing = forcing.plus(&c.forcing.scaled(load[m]));
                        }
                        ModeProblem {
                            lambda: self.eigenvalues[m],
                            forcing: TimeFunction::Powers(forcing),
                            u0: initial[m],
                        }
                    })
                    .collect())
            }
        }
    }
}

/// Composite Gauss rule on `(0,1)` fine enough for products of sines up to
/// wavenumber `modes` with a smooth function.
fn sine_quadrature(modes: usize) -> Vec<(f64, f64)> {
    let pieces = 4 * modes.max(4);
    let rule = legendre_rule(12);
    let h = 1.0 / pieces as f64;
    (0..pieces)
        .flat_map(|i| rule.mapped(i as f64 * h, (i + 1) as f64 * h).collect::<Vec<_>>())
        .collect()
}
