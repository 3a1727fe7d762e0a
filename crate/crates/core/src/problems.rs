//! Manufactured problems on `(0,1)` with `A = -K d^2/dx^2`.
//!
//! The exact solution is a finite sine expansion `u = sum_k a_k(t) sin(k pi x)`
//! with power-series profiles `a_k`, so every forcing follows in closed form
//! from `B_alpha t^nu = Gamma(nu+1)/Gamma(nu+1+alpha) t^{nu+alpha}`.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::kernel::FractionalOrder;
use crate::stepper::ModeProblem;
use crate::timefn::{PowerSeries, TimeFunction};

/// One sine component `a(t) sin(k pi x)` of the exact solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactComponent {
    pub wavenumber: usize,
    /// `K k^2 pi^2`.
    pub lambda: f64,
    /// `a(t)`, amplitude against the unnormalized `sin(k pi x)`.
    pub profile: PowerSeries,
    /// `a' + lambda B_alpha a`.
    pub forcing: PowerSeries,
}

impl ExactComponent {
    /// Coefficient against the orthonormal mode `sqrt(2) sin(k pi x)`.
    pub fn modal_profile(&self) -> PowerSeries {
        self.profile.scaled(1.0 / SQRT_2)
    }

    pub fn modal_forcing(&self) -> PowerSeries {
        self.forcing.scaled(1.0 / SQRT_2)
    }

    /// `f(t) = O(t^e)` at zero.
    pub fn forcing_singularity(&self) -> f64 {
        self.forcing.leading_exponent()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManufacturedProblem {
    pub name: String,
    pub alpha: f64,
    pub diffusivity: f64,
    /// Regularity exponent: `||u^{(j)}(t)|| <= M t^{sigma - j}`.
    pub sigma: f64,
    pub components: Vec<ExactComponent>,
}

fn forcing_for(profile: &PowerSeries, lambda: f64, alpha: f64) -> PowerSeries {
    profile.derivative().plus(&profile.rl_derivative(alpha).scaled(lambda))
}

/// Regularity exponent of a sum of powers: smallest non-integer exponent, or
/// infinity when the profile is a polynomial.
fn regularity(profile: &PowerSeries) -> f64 {
    profile
        .terms()
        .iter()
        .filter(|t| t.exponent.fract() != 0.0)
        .map(|t| t.exponent)
        .fold(f64::INFINITY, f64::min)
}

impl ManufacturedProblem {
    /// Builds a problem from `(wavenumber, profile)` pairs.
    pub fn from_profiles(
        name: &str,
        alpha: f64,
        diffusivity: f64,
        profiles: Vec<(usize, PowerSeries)>,
    ) -> Result<Self> {
        FractionalOrder::new(alpha)?;
        if !(diffusivity > 0.0) {
            return Err(Error::domain(format!(
                "diffusivity must be positive, got {diffusivity}"
            )));
        }
        let mut components: Vec<ExactComponent> = Vec::new();
        for (k, profile) in profiles {
            if k == 0 {
                return Err(Error::domain("wavenumbers start at 1"));
            }
            if components.iter().any(|c| c.wavenumber == k) {
                return Err(Error::domain(format!("wavenumber {k} given twice")));
            }
            if let Some(t) = profile
                .terms()
                .iter()
                .find(|t| t.exponent < 0.0 || t.exponent + alpha <= -1.0)
            {
                return Err(Error::domain(format!(
                    "profile exponent {} gives a non-integrable forcing for alpha = {alpha}",
                    t.exponent
                )));
            }
            let lambda = diffusivity * (k as f64 * PI).powi(2);
            let forcing = forcing_for(&profile, lambda, alpha);
            components.push(ExactComponent {
                wavenumber: k,
                lambda,
                profile,
                forcing,
            });
        }
        components.sort_by_key(|c| c.wavenumber);
        let sigma = components
            .iter()
            .map(|c| regularity(&c.profile))
            .fold(f64::INFINITY, f64::min);
        Ok(ManufacturedProblem {
            name: name.to_string(),
            alpha,
            diffusivity,
            sigma,
            components,
        })
    }

    /// `u = sin(pi x) - t^{alpha+2} sin(2 pi x)` with `K = 1`.
    pub fn two_mode_example(alpha: f64) -> Result<Self> {
        Self::from_profiles(
            "two_mode",
            alpha,
            1.0,
            vec![
                (1, PowerSeries::constant(1.0)),
                (2, PowerSeries::monomial(-1.0, alpha + 2.0)),
            ],
        )
    }

    /// Single mode with profile `t^nu` and eigenvalue `lambda`, realized as
    /// `u = t^nu sin(pi x)` with diffusivity `lambda / pi^2`.
    pub fn power_mode_problem(lambda: f64, nu: f64, alpha: f64) -> Result<Self> {
        FractionalOrder::new(alpha)?;
        if !(nu >= 0.0) {
            return Err(Error::domain(format!("power must be >= 0, got {nu}")));
        }
        if nu + alpha <= -1.0 {
            return Err(Error::domain(format!(
                "t^{nu} gives a non-integrable forcing for alpha = {alpha}"
            )));
        }
        if !(lambda >= 0.0) {
            return Err(Error::domain(format!("eigenvalue must be >= 0, got {lambda}")));
        }
        let profile = PowerSeries::monomial(1.0, nu);
        let forcing = forcing_for(&profile, lambda, alpha);
        Ok(ManufacturedProblem {
            name: format!("power_mode(nu={nu})"),
            alpha,
            diffusivity: lambda / (PI * PI),
            sigma: if nu.fract() == 0.0 { f64::INFINITY } else { nu },
            components: vec![ExactComponent {
                wavenumber: 1,
                lambda,
                profile,
                forcing,
            }],
        })
    }

    /// Largest wavenumber in the expansion (spectral modes needed).
    pub fn max_wavenumber(&self) -> usize {
        self.components.iter().map(|c| c.wavenumber).max().unwrap_or(0)
    }

    pub fn exact(&self, x: f64, t: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.profile.eval(t) * (c.wavenumber as f64 * PI * x).sin())
            .sum()
    }

    pub fn initial(&self, x: f64) -> f64 {
        self.exact(x, 0.0)
    }

    pub fn forcing(&self, x: f64, t: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.forcing.eval(t) * (c.wavenumber as f64 * PI * x).sin())
            .sum()
    }

    /// Modal coefficient profiles `u_m(t)` for modes `1..=modes` (zero if inactive).
    pub fn modal_profiles(&self, modes: usize) -> Vec<TimeFunction> {
        (1..=modes)
            .map(|m| match self.components.iter().find(|c| c.wavenumber == m) {
                Some(c) => TimeFunction::Powers(c.modal_profile()),
                None => TimeFunction::zero(),
            })
            .collect()
    }

    /// Scalar problems for the first `modes` spectral modes, `U^0_- = u_0`.
    pub fn spectral_modes(&self, modes: usize) -> Vec<ModeProblem> {
        (1..=modes)
            .map(|m| {
                let lambda = self.diffusivity * (m as f64 * PI).powi(2);
                match self.components.iter().find(|c| c.wavenumber == m) {
                    Some(c) => ModeProblem {
                        lambda: c.lambda,
                        forcing: TimeFunction::Powers(c.modal_forcing()),
                        u0: c.modal_profile().eval(0.0),
                    },
                    None => ModeProblem {
                        lambda,
                        forcing: TimeFunction::zero(),
                        u0: 0.0,
                    },
                }
            })
            .collect()
    }

    /// The scalar problem of a single-mode generator, keeping its own eigenvalue.
    pub fn scalar_mode(&self) -> Result<ModeProblem> {
        match self.components.as_slice() {
            [c] => Ok(ModeProblem {
                lambda: c.lambda,
                forcing: TimeFunction::Powers(c.forcing.clone()),
                u0: c.profile.eval(0.0),
            }),
            _ => Err(Error::domain("scalar_mode needs exactly one component")),
        }
    }
}

/// Named problem selection, resolved for a given order.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum ProblemSpec {
    /// `sin(pi x) - t^{alpha+2} sin(2 pi x)`.
    #[default]
    TwoModeExample,
    PowerMode {
        lambda: f64,
        nu: f64,
    },
    /// Sine components with power-series profiles.
    Profiles {
        diffusivity: f64,
        profiles: Vec<(usize, PowerSeries)>,
    },
}

impl ProblemSpec {
    pub fn build(&self, alpha: f64) -> Result<ManufacturedProblem> {
        match self {
            ProblemSpec::TwoModeExample => ManufacturedProblem::two_mode_example(alpha),
            ProblemSpec::PowerMode { lambda, nu } => ManufacturedProblem::power_mode_problem(*lambda, *nu, alpha),
            ProblemSpec::Profiles { diffusivity, profiles } => {
                ManufacturedProblem::from_profiles("profiles", alpha, *diffusivity, profiles.clone())
            }
        }
    }
}
