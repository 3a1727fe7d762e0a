//! The fractional kernel `omega_{alpha+1}(t) = t^alpha / Gamma(alpha+1)` and the
//! memory blocks that discretize `int B_alpha U * X dt` for broken polynomials.
//!
//! For `U` piecewise polynomial with coefficients `c^{(j)}` on interval `j`,
//! the Riemann-Liouville derivative restricted to interval `n` is
//!
//! ```text
//! B_alpha U = sum_{j <= n} sum_l c^{(j)}_l  d/dt int_{I_j, s < t} omega_{alpha+1}(t - s) P_l(s) ds
//! ```
//!
//! so every block is the action of one source basis function on one target
//! test function. For the local pair the derivative is taken through the
//! jump form `omega_{alpha+1}(t - t_{n-1}) P_l(t_{n-1}^+) + int omega_{alpha+1}(t-s) P_l'(s) ds`;
//! for `j < n` it is the kernel `omega_alpha(t - s) = (t-s)^{alpha-1}/Gamma(alpha)`
//! applied directly. All singular integrals are evaluated with Gauss-Jacobi
//! rules that are exact for the polynomial factors.

pub mod legendre;
pub mod quadrature;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::TimeMesh;
use quadrature::{
    gauss_jacobi_rule, gauss_jacobi_rule_right, graded_pieces, integrate_near_singular, jacobi_rule, legendre_rule,
};

/// Order `alpha` of the problem together with the constants of the
/// coercivity and continuity estimates for `B_alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    alpha: f64,
    c_alpha: f64,
    d_alpha: f64,
    inv_gamma_alpha: f64,
    inv_gamma_alpha1: f64,
    inv_gamma_alpha2: f64,
}

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        let (c_alpha, d_alpha) = coercivity_constants(alpha)?;
        Ok(FractionalOrder {
            alpha,
            c_alpha,
            d_alpha,
            inv_gamma_alpha: 1.0 / libm::tgamma(alpha),
            inv_gamma_alpha1: 1.0 / libm::tgamma(alpha + 1.0),
            inv_gamma_alpha2: 1.0 / libm::tgamma(alpha + 2.0),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Coercivity constant `c_alpha`.
    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    /// Continuity constant `d_alpha`.
    pub fn d_alpha(&self) -> f64 {
        self.d_alpha
    }

    /// `omega_{alpha+1}(t)`.
    #[inline]
    pub fn omega(&self, t: f64) -> f64 {
        t.powf(self.alpha) * self.inv_gamma_alpha1
    }

    /// `omega_{alpha+2}(t)`, the antiderivative of `omega_{alpha+1}`.
    #[inline]
    pub fn omega_integrated(&self, t: f64) -> f64 {
        t.powf(self.alpha + 1.0) * self.inv_gamma_alpha2
    }

    /// `omega_alpha(t) = t^{alpha-1} / Gamma(alpha)`, the derivative of `omega_{alpha+1}`.
    #[inline]
    pub fn omega_derivative(&self, t: f64) -> f64 {
        t.powf(self.alpha - 1.0) * self.inv_gamma_alpha
    }
}

/// Returns `(c_alpha, d_alpha)` with
/// `c_alpha = cos(alpha pi/2) / pi^alpha * |alpha|^{-alpha} / (1-alpha)^{1-alpha}`
/// and `d_alpha = 1 / cos(alpha pi / 2)`.
pub fn coercivity_constants(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > -1.0 && alpha < 0.0) {
        return Err(Error::domain(format!("alpha must lie in (-1, 0), got {alpha}")));
    }
    let cos = (alpha * std::f64::consts::PI / 2.0).cos();
    let c = cos / std::f64::consts::PI.powf(alpha) * alpha.abs().powf(-alpha) / (1.0 - alpha).powf(1.0 - alpha);
    Ok((c, 1.0 / cos))
}

/// `omega_{alpha+1}(t)` for `beta_shift = 0`, `omega_{alpha+2}(t)` for `beta_shift = 1`.
pub fn omega_weight(order: &FractionalOrder, beta_shift: u32, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("kernel argument must be positive, got {t}")));
    }
    match beta_shift {
        0 => Ok(order.omega(t)),
        1 => Ok(order.omega_integrated(t)),
        s => Err(Error::domain(format!("beta_shift must be 0 or 1, got {s}"))),
    }
}

/// Tuning knobs for block assembly.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelConfig {
    /// Largest Legendre degree accepted by the moment routines.
    pub max_degree: usize,
    /// A pair of intervals counts as well separated once the gap between
    /// them is at least this multiple of the larger step.
    pub separation_threshold: f64,
    /// Extra Gauss-Legendre points beyond the polynomial degree for well
    /// separated pairs.
    pub far_field_padding: usize,
    /// Base Gauss-Legendre count on geometrically graded pieces.
    pub near_points: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            max_degree: 64,
            separation_threshold: 2.0,
            far_field_padding: 12,
            near_points: 16,
        }
    }
}

/// `int_a^{min(b,t)} (t - s)^alpha P_k(s) ds` with `P_k` the Legendre polynomial
/// mapped to `[a, b]`.
pub fn frac_moment(a: f64, b: f64, t: f64, k: usize, alpha: f64, config: &KernelConfig) -> Result<f64> {
    if k > config.max_degree {
        return Err(Error::Capacity {
            requested: k,
            max: config.max_degree,
        });
    }
    if !(b > a) {
        return Err(Error::domain(format!("empty interval ({a}, {b})")));
    }
    if !(t > a) {
        return Err(Error::domain(format!(
            "evaluation time {t} must exceed interval start {a}"
        )));
    }
    if !(alpha > -1.0) {
        return Err(Error::domain(format!("kernel exponent must exceed -1, got {alpha}")));
    }
    let basis = |s: f64| legendre::values(k, legendre::to_reference(s, a, b))[k];
    if t <= b {
        let rule = gauss_jacobi_rule_right(k / 2 + 2, alpha, (a, t))?;
        Ok(rule.iter().map(|&(s, w)| w * basis(s)).sum())
    } else {
        Ok(integrate_near_singular(
            |s| (t - s).powf(alpha) * basis(s),
            a,
            b,
            t,
            config.near_points + k / 2,
        ))
    }
}

/// Memory coupling between a source interval `j` and a target interval `n >= j`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryBlock {
    pub source: usize,
    pub target: usize,
    /// `(p_n + 1) x (p_j + 1)`; entry `(i, l)` is `int_{I_n} [B_alpha P^{(j)}_l] P^{(n)}_i dt`.
    pub matrix: DMatrix<f64>,
    /// `int_{I_n} omega_{alpha+1}(t - t_{j-1}) P^{(n)}_i(t) dt`, the weight with
    /// which a jump at the left node of the source interval enters.
    pub jump_column: DVector<f64>,
}

/// Builds the memory block for source interval `j` and target interval `n`
/// (0-based, `j <= n`).
pub fn memory_block(
    mesh: &TimeMesh,
    j: usize,
    n: usize,
    order: &FractionalOrder,
    config: &KernelConfig,
) -> Result<MemoryBlock> {
    if j > n || n >= mesh.num_intervals() {
        return Err(Error::domain(format!(
            "block indices out of range: source {j}, target {n}, intervals {}",
            mesh.num_intervals()
        )));
    }
    let src = mesh.interval(j);
    let tgt = mesh.interval(n);
    let (pj, pn) = (mesh.degree(j), mesh.degree(n));
    for p in [pj, pn] {
        if p > config.max_degree {
            return Err(Error::Capacity {
                requested: p,
                max: config.max_degree,
            });
        }
    }
    let matrix = if j == n {
        local_block(src, pj, order)?
    } else {
        interaction_block(src, pj, tgt, pn, order, config)?
    };
    let jump_column = jump_weights(src.0, tgt, pn, order, config)?;
    Ok(MemoryBlock {
        source: j,
        target: n,
        matrix,
        jump_column,
    })
}

/// Global matrix `G` of `int_0^T B_alpha v * w dt` for broken polynomials in
/// the Legendre basis: `w^T G v`, unknowns ordered interval by interval.
pub fn memory_form_matrix(mesh: &TimeMesh, order: &FractionalOrder, config: &KernelConfig) -> Result<DMatrix<f64>> {
    let offsets: Vec<usize> = mesh
        .degrees()
        .iter()
        .scan(0, |acc, p| {
            let start = *acc;
            *acc += p + 1;
            Some(start)
        })
        .collect();
    let mut g = DMatrix::zeros(mesh.dof_count(), mesh.dof_count());
    for n in 0..mesh.num_intervals() {
        for j in 0..=n {
            let blk = memory_block(mesh, j, n, order, config)?;
            g.view_mut((offsets[n], offsets[j]), blk.matrix.shape())
                .copy_from(&blk.matrix);
        }
    }
    Ok(g)
}

/// Block-diagonal Legendre mass matrix `int_0^T v w dt`.
pub fn mass_matrix(mesh: &TimeMesh) -> DMatrix<f64> {
    let mut diag = Vec::with_capacity(mesh.dof_count());
    for n in 0..mesh.num_intervals() {
        let k = mesh.step(n);
        diag.extend((0..=mesh.degree(n)).map(|i| k / (2 * i + 1) as f64));
    }
    DMatrix::from_diagonal(&DVector::from_vec(diag))
}

/// `int_{I} omega_{alpha+1}(t - e) P_i(t) dt` for `e <= ` left end of `I`.
fn jump_weights(
    e: f64,
    tgt: (f64, f64),
    p: usize,
    order: &FractionalOrder,
    config: &KernelConfig,
) -> Result<DVector<f64>> {
    let (c, d) = tgt;
    let mut out = DVector::zeros(p + 1);
    let mut vals = vec![0.0; p + 1];
    if e >= c {
        for (t, w) in gauss_jacobi_rule(p / 2 + 2, order.alpha, (c, d))? {
            legendre::fill_values(legendre::to_reference(t, c, d), &mut vals);
            for i in 0..=p {
                out[i] += w * vals[i];
            }
        }
        out *= order.inv_gamma_alpha1;
    } else {
        let rule = legendre_rule(config.near_points + p / 2);
        for (lo, hi) in graded_pieces(c, d, e, 1.0) {
            for (t, w) in rule.mapped(lo, hi) {
                legendre::fill_values(legendre::to_reference(t, c, d), &mut vals);
                let k = order.omega(t - e);
                for i in 0..=p {
                    out[i] += w * k * vals[i];
                }
            }
        }
    }
    Ok(out)
}

/// Block of an interval with itself.
fn local_block(iv: (f64, f64), p: usize, order: &FractionalOrder) -> Result<DMatrix<f64>> {
    let (a, b) = iv;
    let alpha = order.alpha;
    let h = b - a;
    let scale = 2.0 / h;
    let mut m = DMatrix::zeros(p + 1, p + 1);

    // Jump part: omega_{alpha+1}(t - a) * P_l(a^+), with P_l(a^+) = (-1)^l.
    let mut vals = vec![0.0; p + 1];
    let jump = gauss_jacobi_rule(p / 2 + 2, alpha, (a, b))?;
    for &(t, w) in &jump {
        legendre::fill_values(legendre::to_reference(t, a, b), &mut vals);
        for i in 0..=p {
            for l in 0..=p {
                m[(i, l)] += w * vals[i] * legendre::left_value(l);
            }
        }
    }
    m *= order.inv_gamma_alpha1;

    if p >= 1 {
        // Derivative part: int_a^b P_i(t) int_a^t omega_{alpha+1}(t-s) P_l'(s) ds dt.
        // Inner, with s = a + (t-a) z: (t-a)^{alpha+1} int_0^1 (1-z)^alpha P_l'(..) dz.
        let inner = jacobi_rule(p / 2 + 2, alpha, 0.0)?;
        let outer = gauss_jacobi_rule(p + 2, alpha + 1.0, (a, b))?;
        let mut inner_sum = vec![0.0; p + 1];
        for &(t, w) in &outer {
            inner_sum.iter_mut().for_each(|v| *v = 0.0);
            let half = 0.5 * (t - a);
            let zscale = half.powf(alpha + 1.0) / (t - a).powf(alpha + 1.0);
            for (&x, &wz) in inner.nodes.iter().zip(&inner.weights) {
                // z = (1+x)/2 on [0,1], weight (1-z)^alpha dz = 2^{-alpha-1} (1-x)^alpha dx
                let s = a + half * (1.0 + x);
                let d = legendre::derivatives(p, legendre::to_reference(s, a, b));
                for l in 0..=p {
                    inner_sum[l] += wz * zscale * d[l] * scale;
                }
            }
            legendre::fill_values(legendre::to_reference(t, a, b), &mut vals);
            for i in 0..=p {
                for l in 1..=p {
                    m[(i, l)] += w * vals[i] * inner_sum[l] * order.inv_gamma_alpha1;
                }
            }
        }
    }
    Ok(m)
}

/// Block for a source interval strictly before the target interval.
fn interaction_block(
    src: (f64, f64),
    pj: usize,
    tgt: (f64, f64),
    pn: usize,
    order: &FractionalOrder,
    config: &KernelConfig,
) -> Result<DMatrix<f64>> {
    let (a, b) = src;
    let (c, d) = tgt;
    let gap = c - b;
    let mut m = DMatrix::zeros(pn + 1, pj + 1);
    let mut vt = vec![0.0; pn + 1];
    let mut vs = vec![0.0; pj + 1];
    let pmax = pj.max(pn);

    if gap <= 0.0 {
        adjacent_block(src, pj, tgt, pn, order, config, &mut m)?;
        return Ok(m);
    }

    let mut add_rect = |s_lo: f64, s_hi: f64, t_lo: f64, t_hi: f64, npts: usize| {
        let rule = legendre_rule(npts);
        for (t, wt) in rule.mapped(t_lo, t_hi) {
            legendre::fill_values(legendre::to_reference(t, c, d), &mut vt);
            for (s, ws) in rule.mapped(s_lo, s_hi) {
                legendre::fill_values(legendre::to_reference(s, a, b), &mut vs);
                let k = wt * ws * order.omega_derivative(t - s);
                for i in 0..=pn {
                    let ki = k * vt[i];
                    for l in 0..=pj {
                        m[(i, l)] += ki * vs[l];
                    }
                }
            }
        }
    };

    let longest = (b - a).max(d - c);
    if gap >= config.separation_threshold * longest {
        add_rect(a, b, c, d, pmax + config.far_field_padding);
    } else {
        let npts = config.near_points + pmax;
        let src_pieces = graded_pieces(a, b, c, 1.0);
        let tgt_pieces = graded_pieces(c, d, b, 1.0);
        for &(t_lo, t_hi) in &tgt_pieces {
            for &(s_lo, s_hi) in &src_pieces {
                add_rect(s_lo, s_hi, t_lo, t_hi, npts);
            }
        }
    }
    Ok(m)
}

/// Touching intervals `[a, b]`, `[b, d]`: the kernel `(t-s)^{alpha-1}` is
/// singular only at the shared corner. With `x = b - s`, `y = t - b` and polar
/// coordinates `x = r theta`, `y = r (1 - theta)` the radial integral carries
/// the Jacobi weight `r^alpha`; the angular integral is analytic and split at
/// the corner diagonal.
fn adjacent_block(
    src: (f64, f64),
    pj: usize,
    tgt: (f64, f64),
    pn: usize,
    order: &FractionalOrder,
    config: &KernelConfig,
    m: &mut DMatrix<f64>,
) -> Result<()> {
    let (a, b) = src;
    let (c, d) = tgt;
    let k1 = b - a;
    let k2 = d - c;
    let alpha = order.alpha;
    // radial rule on [0,1] with weight z^alpha
    let radial = jacobi_rule((pj + pn) / 2 + 2, 0.0, alpha)?;
    let rscale = 0.5f64.powf(alpha + 1.0);
    let angular = legendre_rule(config.near_points + pj.max(pn));
    let mut vt = vec![0.0; pn + 1];
    let mut vs = vec![0.0; pj + 1];

    // Piece A: u in [0, k1/k2], x = k2 z u, y = k2 z, factor k2^{alpha+1} (1+u)^{alpha-1}.
    // Piece B: v in [0, k2/k1], x = k1 z, y = k1 z v, factor k1^{alpha+1} (1+v)^{alpha-1}.
    for (kk, upper, swap) in [(k2, k1 / k2, false), (k1, k2 / k1, true)] {
        let pref = kk.powf(alpha + 1.0) * order.inv_gamma_alpha;
        for (lo, hi) in graded_pieces(0.0, upper, -1.0, 1.0) {
            for (u, wu) in angular.mapped(lo, hi) {
                let fu = wu * pref * (1.0 + u).powf(alpha - 1.0);
                for (&xr, &wr) in radial.nodes.iter().zip(&radial.weights) {
                    let z = 0.5 * (1.0 + xr);
                    let (x, y) = if swap {
                        (kk * z, kk * z * u)
                    } else {
                        (kk * z * u, kk * z)
                    };
                    legendre::fill_values(legendre::to_reference(c + y, c, d), &mut vt);
                    legendre::fill_values(legendre::to_reference(b - x, a, b), &mut vs);
                    let w = fu * wr * rscale;
                    for i in 0..=pn {
                        let wi = w * vt[i];
                        for l in 0..=pj {
                            m[(i, l)] += wi * vs[l];
                        }
                    }
                }
            }
        }
    }
    Ok(())
}
