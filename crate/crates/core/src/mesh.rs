//! Time partitions of `[0, T]` with a polynomial degree per interval.

use std::fmt;

use crate::error::{Error, Result};

/// How a mesh was generated; kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshFamily {
    /// `t_n = (n k)^gamma`, `k = T^{1/gamma} / N`.
    Graded {
        gamma: f64,
    },
    /// Geometric refinement of `(0, T_1)` into `levels + 1` pieces, followed by
    /// uniform coarse intervals on `(T_1, T)`.
    Geometric {
        delta: f64,
        levels: usize,
        t1: f64,
        mu: f64,
        coarse_count: usize,
    },
    Uniform,
    Manual,
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshFamily::Graded { gamma } => write!(f, "graded(gamma={gamma})"),
            MeshFamily::Geometric { delta, levels, .. } => write!(f, "geometric(delta={delta},L={levels})"),
            MeshFamily::Uniform => write!(f, "uniform"),
            MeshFamily::Manual => write!(f, "manual"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeMesh {
    nodes: Vec<f64>,
    degrees: Vec<usize>,
    family: MeshFamily,
    first_interval_linear: bool,
}

/// Heuristic default for the h-version: use a linear space on the first
/// interval only for very strong grading. For `gamma < 3` the full degree on
/// the first interval gives the smaller error.
pub fn default_first_interval_linear(gamma: f64) -> bool {
    gamma >= 3.0
}

impl TimeMesh {
    /// Builds a mesh from explicit nodes `0 = t_0 < ... < t_N` and degrees `p_1..p_N`.
    pub fn manual(nodes: Vec<f64>, degrees: Vec<usize>) -> Result<Self> {
        Self::checked(nodes, degrees, MeshFamily::Manual, false)
    }

    fn checked(nodes: Vec<f64>, degrees: Vec<usize>, family: MeshFamily, first_interval_linear: bool) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Mesh("a mesh needs at least one interval".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::Mesh(format!("first node must be 0, got {}", nodes[0])));
        }
        if nodes.iter().any(|t| !t.is_finite()) {
            return Err(Error::Mesh("non-finite node".into()));
        }
        for (i, w) in nodes.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::Mesh(format!(
                    "nodes must be strictly increasing: t_{} = {} >= t_{} = {}",
                    i,
                    w[0],
                    i + 1,
                    w[1]
                )));
            }
        }
        if degrees.len() + 1 != nodes.len() {
            return Err(Error::Mesh(format!(
                "{} degrees given for {} intervals",
                degrees.len(),
                nodes.len() - 1
            )));
        }
        Ok(TimeMesh {
            nodes,
            degrees,
            family,
            first_interval_linear,
        })
    }

    pub fn uniform(t_final: f64, n: usize, p: usize) -> Result<Self> {
        if !(t_final > 0.0) || n == 0 {
            return Err(Error::domain("uniform mesh needs T > 0 and N >= 1"));
        }
        let mut nodes: Vec<f64> = (0..=n).map(|i| t_final * i as f64 / n as f64).collect();
        nodes[n] = t_final;
        Self::checked(nodes, vec![p; n], MeshFamily::Uniform, false)
    }

    /// Graded mesh `t_n = (n k)^gamma` with degrees `(1, p, ..., p)` when
    /// `first_interval_linear` is set and `(p, ..., p)` otherwise.
    pub fn graded(t_final: f64, n: usize, gamma: f64, p: usize, first_interval_linear: bool) -> Result<Self> {
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(Error::domain(format!("T must be positive, got {t_final}")));
        }
        if n == 0 {
            return Err(Error::domain("N must be at least 1"));
        }
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::domain(format!(
                "grading exponent gamma must be >= 1, got {gamma}"
            )));
        }
        if p == 0 {
            return Err(Error::domain("degree p must be at least 1"));
        }
        let k = t_final.powf(1.0 / gamma) / n as f64;
        let mut nodes: Vec<f64> = (0..=n).map(|i| (i as f64 * k).powf(gamma)).collect();
        nodes[n] = t_final;
        let mut degrees = vec![p; n];
        if first_interval_linear {
            degrees[0] = 1;
        }
        let mesh = Self::checked(nodes, degrees, MeshFamily::Graded { gamma }, first_interval_linear)?;
        let steps: Vec<f64> = (0..n).map(|i| mesh.step(i)).collect();
        for w in steps.windows(2) {
            if w[1] < w[0] * (1.0 - 1e-12) {
                return Err(Error::Mesh("graded mesh produced decreasing steps".into()));
            }
        }
        Ok(mesh)
    }

    /// Geometric mesh: `(0, T_1)` split at `delta^{L+1-n} T_1`, degrees
    /// `floor(mu n)` there (at least 1), uniform coarse intervals of width at
    /// most `T_1` on `(T_1, T)` carrying the last geometric degree.
    pub fn geometric(t_final: f64, t1: f64, delta: f64, levels: usize, mu: f64, coarse_count: usize) -> Result<Self> {
        Self::geometric_with_floor(t_final, t1, delta, levels, mu, coarse_count, true)
    }

    pub fn geometric_with_floor(
        t_final: f64,
        t1: f64,
        delta: f64,
        levels: usize,
        mu: f64,
        coarse_count: usize,
        floor_at_one: bool,
    ) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::domain(format!("delta must lie in (0,1), got {delta}")));
        }
        if !(t1 > 0.0 && t1 <= t_final) {
            return Err(Error::domain(format!("need 0 < T_1 <= T, got T_1={t1}, T={t_final}")));
        }
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::domain(format!("slope mu must be positive, got {mu}")));
        }
        if coarse_count == 0 {
            return Err(Error::domain("coarse_count must be at least 1"));
        }
        let mut nodes = vec![0.0];
        let mut degrees = Vec::new();
        for n in 1..=levels + 1 {
            nodes.push(delta.powi((levels + 1 - n) as i32) * t1);
            let mut p = (mu * n as f64 + 1e-9).floor() as usize;
            if floor_at_one {
                p = p.max(1);
            }
            degrees.push(p);
        }
        let last = nodes.len() - 1;
        nodes[last] = t1;
        let p_top = *degrees.last().unwrap();
        if t1 < t_final {
            let span = t_final - t1;
            let pieces = (coarse_count.saturating_sub(1))
                .max((span / t1 - 1e-12).ceil() as usize)
                .max(1);
            for i in 1..=pieces {
                nodes.push(t1 + span * i as f64 / pieces as f64);
                degrees.push(p_top);
            }
            let last = nodes.len() - 1;
            nodes[last] = t_final;
        }
        Self::checked(
            nodes,
            degrees,
            MeshFamily::Geometric {
                delta,
                levels,
                t1,
                mu,
                coarse_count,
            },
            false,
        )
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn family(&self) -> &MeshFamily {
        &self.family
    }

    pub fn first_interval_linear(&self) -> bool {
        self.first_interval_linear
    }

    pub fn num_intervals(&self) -> usize {
        self.degrees.len()
    }

    pub fn final_time(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Endpoints of interval `i` (0-based).
    pub fn interval(&self, i: usize) -> (f64, f64) {
        (self.nodes[i], self.nodes[i + 1])
    }

    pub fn step(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Temporal degrees of freedom per mode, `sum_n (p_n + 1)`.
    pub fn dof_count(&self) -> usize {
        self.degrees.iter().map(|p| p + 1).sum()
    }

    /// Index of the interval containing `t`; nodes belong to the interval on their left.
    pub fn locate(&self, t: f64) -> Option<usize> {
        if !(t >= 0.0 && t <= self.final_time()) {
            return None;
        }
        let idx = self.nodes.partition_point(|&x| x < t);
        Some(idx.saturating_sub(1).min(self.num_intervals() - 1))
    }

    /// Sampling grid `{t_{j-1} + n k_j / m}` used by the error measure.
    pub fn fine_grid(&self, m: usize) -> Vec<f64> {
        let m = m.max(1);
        let mut out = Vec::with_capacity(self.num_intervals() * m + 1);
        for i in 0..self.num_intervals() {
            let (a, b) = self.interval(i);
            for n in 0..m {
                out.push(a + n as f64 * (b - a) / m as f64);
            }
        }
        out.push(self.final_time());
        out
    }
}
