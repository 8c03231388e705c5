//! Grid estimates of the arc constants and the divided-difference and
//! interpolation-error bounds built from them.
//!
//! The constants are suprema over a continuum. They are estimated on a grid of
//! parameter pairs, polished by a local search, and reported together with the
//! change observed when the grid is halved.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arc::{diameter, make_arc, ArcSpec, JordanArc, DEFAULT_DIAMETER_GRID};
use crate::calculus::arc_derivative;
use crate::divided_difference::{dd_lagrange, LagrangeDd, NodeSet};
use crate::error::{Error, Result};
use crate::function::{ArcFunction, FunctionSpec};
use crate::interpolation::NodeRecord;
use crate::optimize::{golden_max, nelder_mead_max_2d};
use crate::quadrature::{integrate_adaptive, GaussLegendre, DEFAULT_MAX_PANELS};

pub const DEFAULT_CONSTANT_GRID: usize = 128;
pub const DEFAULT_DIAGONAL_CUTOFF: f64 = 1e-4;
pub const DEFAULT_UNSTABLE_FRACTION: f64 = 0.5;
pub const DEFAULT_SAFETY_FACTOR: f64 = 1.05;
/// Refinement deltas below this are never reported as unstable.
pub const UNSTABLE_ABS_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimationConfig {
    /// Cells per unit parameter for the pair grid; also sets the sup grid.
    pub constant_grid: usize,
    pub diameter_grid: usize,
    pub quad_tol: f64,
    /// Pairs closer than this in parameter use the diagonal limit of the quotient.
    pub diagonal_cutoff: f64,
    /// Local search from the best grid pair and grid point.
    pub polish: bool,
    /// Refinement deltas above this fraction of the estimate are rejected.
    pub unstable_fraction: f64,
    /// Take `C_gamma` over `k = 1..=n` instead of `k = 1..=n-1` in the error bound.
    pub extended_k_range: bool,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            constant_grid: DEFAULT_CONSTANT_GRID,
            diameter_grid: DEFAULT_DIAMETER_GRID,
            quad_tol: 1e-10,
            diagonal_cutoff: DEFAULT_DIAGONAL_CUTOFF,
            polish: true,
            unstable_fraction: DEFAULT_UNSTABLE_FRACTION,
            extended_k_range: false,
        }
    }
}

impl EstimationConfig {
    fn validate(&self) -> Result<()> {
        if self.constant_grid < 2 {
            return Err(Error::InvalidArgument("constant grid must have at least 2 cells".into()));
        }
        if !(self.quad_tol > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerance must be positive".into()));
        }
        if !(self.diagonal_cutoff >= 0.0) {
            return Err(Error::InvalidArgument("diagonal cutoff must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupEstimate {
    pub estimate: f64,
    pub refinement_delta: f64,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Values `(z_q, w_q g(t_q) phi'(t_q))` at the Gauss nodes of each of `cells`
/// equal parameter cells; the integral over cell `c` is the sum of row `c`.
struct CellRule {
    points: Vec<[Complex64; 16]>,
    weights: Vec<[Complex64; 16]>,
    ends: Vec<Complex64>,
}

fn cell_rule<G>(g: &G, arc: &JordanArc, cells: usize) -> Result<CellRule>
where
    G: Fn(f64) -> Result<Complex64> + Sync,
{
    let rule = GaussLegendre::standard();
    let rows: Vec<Result<([Complex64; 16], [Complex64; 16])>> = (0..cells)
        .into_par_iter()
        .map(|c| {
            let a = c as f64 / cells as f64;
            let b = (c + 1) as f64 / cells as f64;
            let mut pts = [Complex64::new(0.0, 0.0); 16];
            let mut wts = [Complex64::new(0.0, 0.0); 16];
            for (q, (t, w)) in rule.mapped(a, b).enumerate() {
                pts[q] = arc.point(t);
                wts[q] = g(t)? * arc.tangent(t) * w;
            }
            Ok((pts, wts))
        })
        .collect();
    let mut points = Vec::with_capacity(cells);
    let mut weights = Vec::with_capacity(cells);
    for r in rows {
        let (p, w) = r?;
        points.push(p);
        weights.push(w);
    }
    let ends = (0..=cells).map(|i| arc.point(i as f64 / cells as f64)).collect();
    Ok(CellRule {
        points,
        weights,
        ends,
    })
}

fn cell_moment(rule: &CellRule, c: usize, base: Complex64, power: i32) -> Complex64 {
    rule.points[c]
        .iter()
        .zip(&rule.weights[c])
        .map(|(&z, &w)| (z - base).powi(power) * w)
        .sum()
}

/// Shape of the quotient `|∫_{z2}^{z1} (z-z2)^p g(z) dz| / |z1-z2|^q`.
#[derive(Debug, Clone, Copy)]
struct Quotient {
    num_power: i32,
    den_power: i32,
}

impl Quotient {
    /// Value approached as `z1 -> z2` along the arc.
    fn diagonal_limit(&self, g_at_base: Complex64) -> f64 {
        match self.den_power - self.num_power {
            1 => g_at_base.norm() / (self.num_power + 1) as f64,
            d if d <= 0 => 0.0,
            _ => f64::INFINITY,
        }
    }
}

/// Best grid pair: `(value, base cell boundary, signed cell offset)`.
fn grid_sup(rule: &CellRule, q: Quotient, closed: bool) -> (f64, usize, isize) {
    let cells = rule.points.len();
    let per_base: Vec<(f64, usize, isize)> = (0..=cells)
        .into_par_iter()
        .map(|j| {
            let z2 = rule.ends[j];
            let mut best = (0.0_f64, j, 0_isize);
            let mut consider = |acc: Complex64, i: usize, offset: isize| {
                let d = (rule.ends[i] - z2).norm();
                if d == 0.0 {
                    return;
                }
                let v = acc.norm() / d.powi(q.den_power);
                if v > best.0 {
                    best = (v, j, offset);
                }
            };
            if closed && j == cells {
                return best;
            }
            let span = if closed { cells - 1 } else { cells - j };
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..span {
                let c = (j + s) % cells;
                acc += cell_moment(rule, c, z2, q.num_power);
                let i = if closed { (j + s + 1) % cells } else { j + s + 1 };
                consider(acc, i, (s + 1) as isize);
            }
            let span = if closed { cells - 1 } else { j };
            let mut acc = Complex64::new(0.0, 0.0);
            for s in 0..span {
                let c = (j + cells - 1 - s) % cells;
                acc -= cell_moment(rule, c, z2, q.num_power);
                consider(acc, (j + cells - 1 - s) % cells, -((s + 1) as isize));
            }
            best
        })
        .collect();
    per_base
        .into_iter()
        .fold((0.0, 0, 0), |a, b| if b.0 > a.0 { b } else { a })
}

/// `∫` along the arc from parameter `t2` to `t2 + s`, wrapping through the
/// seam of a closed curve.
fn path_integral<G>(g: &G, arc: &JordanArc, t2: f64, s: f64, tol: f64) -> Result<Complex64>
where
    G: Fn(f64) -> Result<Complex64>,
{
    let f = |t: f64| Ok(g(t)? * arc.tangent(t));
    let end = t2 + s;
    if arc.is_closed() && !(0.0..=1.0).contains(&end) {
        let seam = if end > 1.0 { 1.0 } else { 0.0 };
        let a = integrate_adaptive(&f, t2, seam, tol, DEFAULT_MAX_PANELS)?;
        let b = integrate_adaptive(&f, 1.0 - seam, end.rem_euclid(1.0), tol, DEFAULT_MAX_PANELS)?;
        return Ok(a + b);
    }
    integrate_adaptive(&f, t2, end.clamp(0.0, 1.0), tol, DEFAULT_MAX_PANELS)
}

fn sup_quotient<G>(g: &G, arc: &JordanArc, q: Quotient, cfg: &EstimationConfig) -> Result<SupEstimate>
where
    G: Fn(f64) -> Result<Complex64> + Sync,
{
    cfg.validate()?;
    let closed = arc.is_closed();
    let fine = cfg.constant_grid;
    let coarse = (fine / 2).max(1);
    let fine_rule = cell_rule(g, arc, fine)?;
    let (fine_val, j, offset) = grid_sup(&fine_rule, q, closed);
    let coarse_val = grid_sup(&cell_rule(g, arc, coarse)?, q, closed).0;

    // the diagonal limit is itself a supremum candidate
    let diag = {
        let limit = |t: f64| -> f64 {
            g(t).map(|v| q.diagonal_limit(v)).unwrap_or(f64::NAN)
        };
        let best = (0..=fine)
            .map(|i| i as f64 / fine as f64)
            .map(|t| (t, limit(t)))
            .fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        if cfg.polish && best.1 > 0.0 {
            let h = 1.0 / fine as f64;
            let lo = (best.0 - h).max(0.0);
            let hi = (best.0 + h).min(1.0);
            golden_max(limit, lo, hi, 1e-9).1.max(best.1)
        } else {
            best.1
        }
    };

    let mut estimate = fine_val.max(diag);
    if cfg.polish && fine_val > 0.0 && fine_val >= diag {
        let h = 1.0 / fine as f64;
        let t2_0 = j as f64 * h;
        let s_0 = offset as f64 * h;
        let dir = s_0.signum();
        let value = |t2: f64, s: f64| -> f64 {
            if s.abs() < cfg.diagonal_cutoff {
                return g(t2).map(|v| q.diagonal_limit(v)).unwrap_or(0.0);
            }
            let z2 = arc.point(t2);
            let t1 = if closed { (t2 + s).rem_euclid(1.0) } else { (t2 + s).clamp(0.0, 1.0) };
            let z1 = arc.point(t1);
            let d = (z1 - z2).norm();
            if d == 0.0 {
                return 0.0;
            }
            let integrand = |t: f64| Ok((arc.point(t) - z2).powi(q.num_power) * g(t)?);
            match path_integral(&integrand, arc, t2, s, cfg.quad_tol) {
                Ok(v) => v.norm() / d.powi(q.den_power),
                Err(_) => f64::NAN,
            }
        };
        let polished = if closed {
            // (t2, |s|) with the direction fixed by the grid winner; |s| < 1
            nelder_mead_max_2d(
                |p| if p[1] >= 1.0 { 0.0 } else { value(p[0], dir * p[1]) },
                [t2_0, s_0.abs()],
                h,
                200,
            )
            .1
        } else {
            nelder_mead_max_2d(
                |p| value(p[1], p[0] - p[1]),
                [t2_0 + s_0, t2_0],
                h,
                200,
            )
            .1
        };
        if polished.is_finite() {
            estimate = estimate.max(polished);
        }
    }
    Ok(SupEstimate {
        estimate,
        refinement_delta: (fine_val.max(diag) - coarse_val.max(diag)).abs(),
    })
}

/// Supremum over pairs of `|∫_{z2}^{z1} (z-z2)^k g(z) dz| / |z1-z2|^{k+1}`.
///
/// `g(t)` returns the integrand at `phi(t)`; near the diagonal the quotient
/// tends to `|g(z2)|/(k+1)`.
pub fn constant_mk<G>(g: G, arc: &JordanArc, k: usize, cfg: &EstimationConfig) -> Result<SupEstimate>
where
    G: Fn(f64) -> Result<Complex64> + Sync,
{
    let q = Quotient {
        num_power: k as i32,
        den_power: k as i32 + 1,
    };
    sup_quotient(&g, arc, q, cfg)
}

/// Grid supremum of `|f^{(k)}(phi(t))|` with golden-section polishing.
pub fn sup_abs_derivative(
    f: &ArcFunction,
    arc: &JordanArc,
    k: usize,
    cfg: &EstimationConfig,
) -> Result<SupEstimate> {
    cfg.validate()?;
    let grid_max = |m: usize| -> Result<(f64, f64)> {
        let vals: Vec<Result<(f64, f64)>> = (0..=m)
            .into_par_iter()
            .map(|i| {
                let t = i as f64 / m as f64;
                Ok((t, arc_derivative(f, arc, t, k)?.norm()))
            })
            .collect();
        let mut best = (0.0, 0.0);
        for v in vals {
            let v = v?;
            if v.1 > best.1 {
                best = v;
            }
        }
        Ok(best)
    };
    let m = 8 * cfg.constant_grid;
    let (t, fine) = grid_max(m)?;
    let (_, coarse) = grid_max(m / 2)?;
    let mut estimate = fine;
    if cfg.polish {
        let h = 1.0 / m as f64;
        let obj = |s: f64| arc_derivative(f, arc, s, k).map(|v| v.norm()).unwrap_or(0.0);
        let (_, polished) = golden_max(obj, (t - h).max(0.0), (t + h).min(1.0), 1e-10);
        estimate = estimate.max(polished);
    }
    Ok(SupEstimate {
        estimate,
        refinement_delta: (fine - coarse).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CkEstimate {
    pub k: usize,
    /// `C_{gamma,k} = sup_deriv + m_term`.
    pub estimate: f64,
    /// `sup |f^{(k+1)}|` on the arc.
    pub sup_deriv: f64,
    /// `M_{gamma,k}`.
    pub m_term: f64,
    pub refinement_delta: f64,
}

/// `C_{gamma,k} = sup|f^{(k+1)}| + sup |∫_{z2}^{z1} (z-z2)^{k+1} f^{(k+2)}(z) dz| / |z1-z2|^{k+1}`.
pub fn constant_cgamma_k(
    f: &ArcFunction,
    arc: &JordanArc,
    k: usize,
    cfg: &EstimationConfig,
) -> Result<CkEstimate> {
    if k == 0 {
        return Err(Error::InvalidArgument("C_gamma,k needs k >= 1".into()));
    }
    if k + 2 > f.max_order() {
        return Err(Error::InsufficientJetOrder {
            requested: k + 2,
            available: f.max_order(),
        });
    }
    let sup = sup_abs_derivative(f, arc, k + 1, cfg)?;
    let q = Quotient {
        num_power: k as i32 + 1,
        den_power: k as i32 + 1,
    };
    let m = sup_quotient(&|t| arc_derivative(f, arc, t, k + 2), arc, q, cfg)?;
    Ok(CkEstimate {
        k,
        estimate: sup.estimate + m.estimate,
        sup_deriv: sup.estimate,
        m_term: m.estimate,
        refinement_delta: sup.refinement_delta + m.refinement_delta,
    })
}

/// The constants of one `(f, arc)` pair, for `k = 1..=k_max`.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantTable {
    pub arc_label: String,
    pub function_label: String,
    pub rows: Vec<CkEstimate>,
    pub diam: f64,
    pub meta: EstimationConfig,
}

impl ConstantTable {
    pub fn estimate(
        f: &ArcFunction,
        arc: &JordanArc,
        k_max: usize,
        cfg: &EstimationConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let mut rows = Vec::with_capacity(k_max);
        for k in 1..=k_max {
            let row = constant_cgamma_k(f, arc, k, cfg)?;
            let scale = row.estimate.max(0.0);
            if row.refinement_delta > cfg.unstable_fraction * scale
                && row.refinement_delta > UNSTABLE_ABS_FLOOR
            {
                return Err(Error::EstimationUnstable {
                    k,
                    estimate: row.estimate,
                    delta: row.refinement_delta,
                });
            }
            rows.push(row);
        }
        Ok(ConstantTable {
            arc_label: arc.label().to_string(),
            function_label: f.label().to_string(),
            rows,
            diam: diameter(arc, cfg.diameter_grid),
            meta: *cfg,
        })
    }

    pub fn k_max(&self) -> usize {
        self.rows.len()
    }

    /// `max_{k <= k_max} C_{gamma,k}`.
    pub fn c_gamma(&self, k_max: usize) -> Result<f64> {
        if k_max > self.rows.len() {
            return Err(Error::InsufficientJetOrder {
                requested: k_max,
                available: self.rows.len(),
            });
        }
        Ok(self.rows[..k_max].iter().map(|r| r.estimate).fold(0.0, f64::max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PivotChoice {
    pub pivot_index: usize,
    pub excluded_index: usize,
    pub value: f64,
}

fn pivot_product(points: &[Complex64], i: usize, j: usize) -> f64 {
    let zi = points[i];
    points
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != i && m != j)
        .map(|(_, &zm)| 1.0 + (zi - zm).norm())
        .product()
}

/// `min_{i != j} prod_{m ∉ {i,j}} (1 + |z_i - z_m|)`; ties go to the smallest `(i, j)`.
pub fn minimize_pivot_product(points: &[Complex64]) -> Result<PivotChoice> {
    if points.len() < 3 {
        return Err(Error::NotApplicable(format!(
            "pivot product needs at least 3 points, got {}",
            points.len()
        )));
    }
    let mut best = PivotChoice {
        pivot_index: 0,
        excluded_index: 1,
        value: f64::INFINITY,
    };
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i == j {
                continue;
            }
            let v = pivot_product(points, i, j);
            if v < best.value {
                best = PivotChoice {
                    pivot_index: i,
                    excluded_index: j,
                    value: v,
                };
            }
        }
    }
    Ok(best)
}

/// `C_gamma * min_sigma prod_{k=2}^n (1 + |z_sigma(1) - z_sigma(k+1)|) / n!`.
pub fn bound_sharper(c_gamma: f64, points: &[Complex64]) -> Result<f64> {
    if !(c_gamma >= 0.0) {
        return Err(Error::InvalidArgument("C_gamma must be nonnegative".into()));
    }
    let choice = minimize_pivot_product(points)?;
    Ok(c_gamma * choice.value / factorial(points.len() - 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SequenceBound {
    pub i_hat_n0: f64,
    pub closed_form: f64,
}

/// Runs `Î_{1,m} = C/(m+1)`, `Î_{k,m} = (Î_{k-1,m+1} + L_k Î_{k-1,m+2})/(m+1)`
/// up to `Î_{n,0}`; `l[i]` holds `L_{i+2}`.
pub fn lemma_sequence_bound(c: f64, l: &[f64], n: usize) -> Result<SequenceBound> {
    if n < 2 {
        return Err(Error::NotApplicable(format!("sequence bound needs n >= 2, got {n}")));
    }
    if l.len() != n - 1 {
        return Err(Error::InvalidArgument(format!(
            "expected {} entries L_2..L_n, got {}",
            n - 1,
            l.len()
        )));
    }
    if !(c >= 0.0) || l.iter().any(|x| !(*x >= 0.0)) {
        return Err(Error::InvalidArgument("C and L_k must be nonnegative".into()));
    }
    // level k needs m = 0..=2(n-k)
    let mut level: Vec<f64> = (0..=2 * (n - 1)).map(|m| c / (m + 1) as f64).collect();
    for k in 2..=n {
        let lk = l[k - 2];
        level = (0..=2 * (n - k))
            .map(|m| (level[m + 1] + lk * level[m + 2]) / (m + 1) as f64)
            .collect();
    }
    let closed_form = c * l.iter().map(|x| 1.0 + x).product::<f64>() / factorial(n);
    Ok(SequenceBound {
        i_hat_n0: level[0],
        closed_form,
    })
}

/// Rounding allowance for a Lagrange-sum divided difference of order `n`:
/// input error amplified through the sum, plus the final rounding to double.
pub fn rounding_floor(dd: &LagrangeDd, n: usize) -> f64 {
    8.0 * (n + 1) as f64 * dd.value_roundoff * dd.abs_term_sum + f64::EPSILON * dd.value.norm()
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub arc_label: String,
    pub function_label: String,
    pub n: usize,
    pub nodes: Vec<NodeRecord>,
    pub constants: Vec<CkEstimate>,
    #[serde(rename = "C_gamma")]
    pub c_gamma: f64,
    pub diam: f64,
    #[serde(rename = "L")]
    pub l: Vec<f64>,
    pub product_bound: f64,
    pub diam_bound: f64,
    pub sharper_bound: f64,
    pub pivot: PivotChoice,
    pub abs_dn: f64,
    pub rounding_floor: f64,
    /// `abs_dn - rounding_floor <= product_bound`.
    pub holds: bool,
    pub estimation_meta: EstimationConfig,
}

/// Fills a certificate for `nodes` from precomputed constants.
pub fn certify(table: &ConstantTable, f: &ArcFunction, nodes: &NodeSet) -> Result<BoundCertificate> {
    let n = nodes.order();
    if n < 2 {
        return Err(Error::NotApplicable(format!("bounds need n >= 2, got {n}")));
    }
    nodes.require_distinct()?;
    let c_gamma = table.c_gamma(n - 1)?;
    let points = nodes.points();
    let l: Vec<f64> = points[2..].iter().map(|&z| (points[0] - z).norm()).collect();
    let node_diam = points
        .iter()
        .flat_map(|a| points.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    let diam = table.diam.max(node_diam);
    let nf = factorial(n);
    let identity: f64 = l.iter().map(|x| 1.0 + x).product();
    let mut diam_pow = 1.0;
    for _ in 0..n - 1 {
        diam_pow *= 1.0 + diam;
    }
    let pivot = minimize_pivot_product(points)?;
    let dd = dd_lagrange(f, nodes)?;
    let abs_dn = dd.value.norm();
    let floor = rounding_floor(&dd, n);
    let product_bound = c_gamma * identity / nf;
    Ok(BoundCertificate {
        arc_label: table.arc_label.clone(),
        function_label: table.function_label.clone(),
        n,
        nodes: nodes
            .params()
            .iter()
            .zip(points)
            .map(|(&t, z)| NodeRecord { t, z: [z.re, z.im] })
            .collect(),
        constants: table.rows[..n - 1].to_vec(),
        c_gamma,
        diam,
        l,
        product_bound,
        diam_bound: c_gamma * diam_pow / nf,
        sharper_bound: c_gamma * pivot.value / nf,
        pivot,
        abs_dn,
        rounding_floor: floor,
        holds: (abs_dn - floor).max(0.0) <= product_bound,
        estimation_meta: table.meta,
    })
}

/// Estimates the constants for `k = 1..n-1` and certifies `nodes`.
pub fn bound_theorem(
    f: &ArcFunction,
    arc: &JordanArc,
    nodes: &NodeSet,
    cfg: &EstimationConfig,
) -> Result<BoundCertificate> {
    let n = nodes.order();
    if n < 2 {
        return Err(Error::NotApplicable(format!("bounds need n >= 2, got {n}")));
    }
    let table = ConstantTable::estimate(f, arc, n - 1, cfg)?;
    certify(&table, f, nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBound {
    pub bound: f64,
    pub c_gamma: f64,
    pub pivot_value: f64,
    pub node_product: f64,
}

/// `C_gamma` range for the interpolation error with `n + 1` nodes: the error is
/// `d_{n+1}` times the node polynomial, so the constants of order `n + 1` apply.
pub fn error_k_max(n: usize, extended: bool) -> usize {
    if extended {
        n + 1
    } else {
        n
    }
}

/// Bound on `|f(z) - p_n(z)|` at `z = phi(t)` from constants already estimated.
pub fn error_bound_from(table: &ConstantTable, nodes: &NodeSet, t: f64) -> Result<ErrorBound> {
    let n = nodes.order();
    if n < 2 {
        return Err(Error::NotApplicable(format!("error bound needs n >= 2, got {n}")));
    }
    let k_max = error_k_max(n, table.meta.extended_k_range);
    let c_gamma = table.c_gamma(k_max)?;
    let z = nodes.arc().point(t);
    let node_product: f64 = nodes.points().iter().map(|&zk| (z - zk).norm()).product();
    if node_product == 0.0 {
        return Ok(ErrorBound {
            bound: 0.0,
            c_gamma,
            pivot_value: 0.0,
            node_product,
        });
    }
    let mut all = nodes.points().to_vec();
    all.push(z);
    let pivot = minimize_pivot_product(&all)?;
    Ok(ErrorBound {
        bound: c_gamma * pivot.value / factorial(n + 1) * node_product,
        c_gamma,
        pivot_value: pivot.value,
        node_product,
    })
}

pub fn error_bound(
    f: &ArcFunction,
    arc: &JordanArc,
    nodes: &NodeSet,
    t: f64,
    cfg: &EstimationConfig,
) -> Result<ErrorBound> {
    let n = nodes.order();
    if n < 2 {
        return Err(Error::NotApplicable(format!("error bound needs n >= 2, got {n}")));
    }
    let table = ConstantTable::estimate(f, arc, error_k_max(n, cfg.extended_k_range), cfg)?;
    error_bound_from(&table, nodes, t)
}

fn real_sup(f: &FunctionSpec, interval: [f64; 2], k: usize, cfg: &EstimationConfig) -> Result<f64> {
    let [a, b] = interval;
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("empty interval [{a}, {b}]")));
    }
    let arc = make_arc(&ArcSpec::Segment {
        a: Complex64::new(a, 0.0),
        b: Complex64::new(b, 0.0),
    })?;
    Ok(sup_abs_derivative(&f.on_arc(&arc), &arc, k, cfg)?.estimate)
}

/// `sup_{[a,b]} |f^{(n)}| / n!`, the classical bound on `|d_n|` for real nodes.
pub fn real_line_dd_bound(f: &FunctionSpec, interval: [f64; 2], n: usize, cfg: &EstimationConfig) -> Result<f64> {
    Ok(real_sup(f, interval, n, cfg)? / factorial(n))
}

/// `sup_{[a,b]} |f^{(n+1)}| / (n+1)! * prod |z - x_k|`.
pub fn real_line_baseline(
    f: &FunctionSpec,
    interval: [f64; 2],
    nodes: &[f64],
    z: f64,
    cfg: &EstimationConfig,
) -> Result<f64> {
    let [a, b] = interval;
    if nodes.is_empty() {
        return Err(Error::InvalidArgument("node set is empty".into()));
    }
    if let Some(x) = nodes.iter().chain(std::iter::once(&z)).find(|x| !(a..=b).contains(*x)) {
        return Err(Error::InvalidArgument(format!("point {x} outside [{a}, {b}]")));
    }
    let n = nodes.len() - 1;
    let product: f64 = nodes.iter().map(|x| (z - x).abs()).product();
    Ok(real_sup(f, interval, n + 1, cfg)? / factorial(n + 1) * product)
}
