//! Scalar functions of time: closed-form power series `sum c t^e` and opaque
//! closures tagged with the strength of their singularity at `t = 0`.

use std::fmt;
use std::sync::Arc;

use crate::kernel::legendre;
use crate::kernel::quadrature::{gauss_jacobi_rule, graded_pieces, jacobi_rule, legendre_rule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

/// `sum_i coeff_i * t^{exponent_i}` for `t > 0`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerSeries {
    terms: Vec<PowerTerm>,
}

fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

impl PowerSeries {
    pub fn new(terms: Vec<PowerTerm>) -> Self {
        let mut s = PowerSeries { terms: Vec::new() };
        for t in terms {
            s.push(t.coeff, t.exponent);
        }
        s
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(c, 0.0)
    }

    pub fn monomial(coeff: f64, exponent: f64) -> Self {
        Self::new(vec![PowerTerm { coeff, exponent }])
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    /// Adds `coeff * t^exponent`, merging with an existing term of equal exponent.
    pub fn push(&mut self, coeff: f64, exponent: f64) {
        if coeff == 0.0 {
            return;
        }
        if let Some(t) = self.terms.iter_mut().find(|t| t.exponent == exponent) {
            t.coeff += coeff;
        } else {
            self.terms.push(PowerTerm { coeff, exponent });
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| PowerTerm {
                    coeff: t.coeff * factor,
                    exponent: t.exponent,
                })
                .collect(),
        )
    }

    pub fn plus(&self, other: &PowerSeries) -> Self {
        let mut out = self.clone();
        for t in &other.terms {
            out.push(t.coeff, t.exponent);
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| {
                if term.exponent == 0.0 {
                    term.coeff
                } else {
                    term.coeff * t.powf(term.exponent)
                }
            })
            .sum()
    }

    /// `d/dt`; constant terms drop out.
    pub fn derivative(&self) -> Self {
        Self::new(
            self.terms
                .iter()
                .filter(|t| t.exponent != 0.0)
                .map(|t| PowerTerm {
                    coeff: t.coeff * t.exponent,
                    exponent: t.exponent - 1.0,
                })
                .collect(),
        )
    }

    /// Riemann-Liouville `B_alpha` via `B_alpha t^nu = Gamma(nu+1)/Gamma(nu+1+alpha) t^{nu+alpha}`.
    pub fn rl_derivative(&self, alpha: f64) -> Self {
        Self::new(
            self.terms
                .iter()
                .map(|t| PowerTerm {
                    coeff: t.coeff * gamma(t.exponent + 1.0) / gamma(t.exponent + 1.0 + alpha),
                    exponent: t.exponent + alpha,
                })
                .collect(),
        )
    }

    /// Fractional integral of order `beta > 0`, `I^beta t^nu = Gamma(nu+1)/Gamma(nu+1+beta) t^{nu+beta}`.
    pub fn fractional_integral(&self, beta: f64) -> Self {
        self.rl_derivative(beta)
    }

    /// Smallest exponent, capped above at 0.
    pub fn leading_exponent(&self) -> f64 {
        self.terms.iter().map(|t| t.exponent).fold(0.0, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*t^{}", t.coeff, t.exponent)?;
        }
        Ok(())
    }
}

/// A forcing or profile in time.
#[derive(Clone)]
pub enum TimeFunction {
    Powers(PowerSeries),
    /// Arbitrary function; `singular_exponent = Some(e)` declares `f(t) ~ t^e`
    /// near zero so that loads on the first interval use a Gauss-Jacobi rule.
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        singular_exponent: Option<f64>,
    },
}

impl fmt::Debug for TimeFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimeFunction::Powers(p) => write!(f, "Powers({p})"),
            TimeFunction::Custom { singular_exponent, .. } => {
                write!(f, "Custom(singular_exponent={singular_exponent:?})")
            }
        }
    }
}

impl From<PowerSeries> for TimeFunction {
    fn from(p: PowerSeries) -> Self {
        TimeFunction::Powers(p)
    }
}

impl TimeFunction {
    pub fn zero() -> Self {
        TimeFunction::Powers(PowerSeries::default())
    }

    pub fn custom<F>(f: F, singular_exponent: Option<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        TimeFunction::Custom {
            f: Arc::new(f),
            singular_exponent,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeFunction::Powers(p) => p.eval(t),
            TimeFunction::Custom { f, .. } => f(t),
        }
    }

    /// Exponent `e` with `f(t) = O(t^e)` as `t -> 0` (0 when smooth).
    pub fn singular_exponent(&self) -> f64 {
        match self {
            TimeFunction::Powers(p) => p.leading_exponent(),
            TimeFunction::Custom { singular_exponent, .. } => singular_exponent.unwrap_or(0.0).min(0.0),
        }
    }

    /// Load vector `int_a^b f(t) P_r(t) dt`, `r = 0..=p`, with `P_r` the
    /// Legendre basis of `(a, b)`.
    pub fn legendre_moments(&self, a: f64, b: f64, p: usize) -> Vec<f64> {
        let mut out = vec![0.0; p + 1];
        let mut vals = vec![0.0; p + 1];
        let mut accumulate = |t: f64, w: f64, out: &mut Vec<f64>| {
            legendre::fill_values(legendre::to_reference(t, a, b), &mut vals);
            for r in 0..=p {
                out[r] += w * vals[r];
            }
        };
        match self {
            TimeFunction::Powers(series) => {
                for term in series.terms() {
                    let e = term.exponent;
                    if a == 0.0 && e != e.round() {
                        for (t, w) in gauss_jacobi_rule(p / 2 + 2, e, (0.0, b)).expect("exponent > -1") {
                            accumulate(t, term.coeff * w, &mut out);
                        }
                    } else if e == e.round() && e >= 0.0 {
                        let rule = legendre_rule((p + e as usize) / 2 + 1);
                        for (t, w) in rule.mapped(a, b) {
                            accumulate(t, term.coeff * w * t.powi(e as i32), &mut out);
                        }
                    } else {
                        let rule = legendre_rule(16 + p / 2);
                        for (lo, hi) in graded_pieces(a, b, 0.0, 1.0) {
                            for (t, w) in rule.mapped(lo, hi) {
                                accumulate(t, term.coeff * w * t.powf(e), &mut out);
                            }
                        }
                    }
                }
            }
            TimeFunction::Custom { f, singular_exponent } => {
                let npts = p + 6;
                match singular_exponent {
                    Some(e) if a == 0.0 && *e != 0.0 => {
                        for (t, w) in gauss_jacobi_rule(npts, *e, (0.0, b)).expect("exponent > -1") {
                            accumulate(t, w * f(t) / t.powf(*e), &mut out);
                        }
                    }
                    Some(e) if *e != 0.0 => {
                        let rule = legendre_rule(npts);
                        for (lo, hi) in graded_pieces(a, b, 0.0, 1.0) {
                            for (t, w) in rule.mapped(lo, hi) {
                                accumulate(t, w * f(t), &mut out);
                            }
                        }
                    }
                    _ => {
                        for (t, w) in legendre_rule(npts).mapped(a, b) {
                            accumulate(t, w * f(t), &mut out);
                        }
                    }
                }
            }
        }
        out
    }

    /// `(I^beta f)(t) = int_0^t omega_beta(t - s) f(s) ds` for `beta > 0`.
    pub fn fractional_integral_at(&self, beta: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            TimeFunction::Powers(p) => p.fractional_integral(beta).eval(t),
            TimeFunction::Custom { f, singular_exponent } => {
                let e = singular_exponent.unwrap_or(0.0).min(0.0);
                // weight (1-x)^{beta-1} (1+x)^e on [-1,1], s = t (1+x)/2
                let rule = jacobi_rule(30, beta - 1.0, e).expect("valid exponents");
                let half = 0.5 * t;
                let scale = half.powf(beta + e) / gamma(beta);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&x, &w)| {
                        let s = half * (1.0 + x);
                        let ratio = if e == 0.0 { f(s) } else { f(s) / s.powf(e) };
                        w * ratio
                    })
                    .sum::<f64>()
                    * scale
            }
        }
    }
}
