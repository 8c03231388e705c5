//! Divided differences on an arc: recursive table, Lagrange sum, confluent
//! values, the integral representation in the first node, and a Monte Carlo
//! evaluation of the simplex (Hermite) integral used as an oracle.

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::arc::JordanArc;
use crate::calculus::{along_arc_jet, arc_derivative, arc_integral};
use crate::error::{Error, Result};
use crate::function::ArcFunction;
use crate::jet::Jet;
use crate::quadrature::{integrate_adaptive, DEFAULT_MAX_PANELS};
use crate::wide::Cdd;

/// Parameters closer than this are treated as the same node.
pub const CONFLUENCE_THRESHOLD: f64 = 1e-9;

/// `prod |z_k - z_i|` below this attaches a conditioning warning to Lagrange sums.
pub const CONDITIONING_FLOOR: f64 = 1e-200;

pub const DEFAULT_HERMITE_BUDGET: usize = 2_000_000;

/// Highest node count handled by the Monte Carlo simplex oracle is `MAX_HERMITE_ORDER + 1`.
pub const MAX_HERMITE_ORDER: usize = 4;

/// Within this parameter distance of a fixed node, jets of the leading-node
/// function are built from a series about that node instead of by direct division.
const SERIES_SWITCH: f64 = 0.02;
const SERIES_EXTRA_ORDER: usize = 24;

/// Highest derivative order in the first node supported by [`relation_check`].
pub const MAX_RELATION_DEPTH: usize = 3;

/// Conservative relative accuracy of double-double function values (2^-96),
/// leaving a few bits for the elementary-function evaluation.
pub const WIDE_ROUNDOFF: f64 = 1.262_177_448_353_619e-29;

/// Relative accuracy of node values as data for `d_n` on the arc. Node points
/// are `phi(t)` rounded to double, i.e. off the arc by about `eps`. For analytic
/// `f` that only moves `d_n` smoothly; otherwise `f` changes by about `eps` in an
/// arbitrary direction, which is as bad as rounding the values to double.
pub fn value_roundoff(f: &ArcFunction) -> f64 {
    if f.has_wide_value() && f.analytic().is_some() {
        WIDE_ROUNDOFF
    } else {
        f64::EPSILON
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct NodeSet {
    params: Vec<f64>,
    points: Vec<Complex64>,
    arc: JordanArc,
}

impl NodeSet {
    pub fn new(arc: &JordanArc, params: Vec<f64>) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::InvalidArgument("node set is empty".into()));
        }
        if let Some(t) = params.iter().find(|t| !(0.0..=1.0).contains(*t)) {
            return Err(Error::InvalidArgument(format!("node parameter {t} outside [0, 1]")));
        }
        let points = params.iter().map(|&t| arc.point(t)).collect();
        Ok(NodeSet {
            params,
            points,
            arc: arc.clone(),
        })
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn arc(&self) -> &JordanArc {
        &self.arc
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Order of the top divided difference, `n = len - 1`.
    pub fn order(&self) -> usize {
        self.params.len() - 1
    }

    /// `(min |z_i - z_j|, i, j)`; infinite for a single node.
    pub fn min_point_gap(&self) -> (f64, usize, usize) {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                let d = (self.points[i] - self.points[j]).norm();
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        best
    }

    /// `(min parameter gap, i, j)`, wrapping for closed curves.
    pub fn min_param_gap(&self) -> (f64, usize, usize) {
        let mut best = (f64::INFINITY, 0, 0);
        for i in 0..self.params.len() {
            for j in (i + 1)..self.params.len() {
                let d = self.arc.parameter_gap(self.params[i], self.params[j]);
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        best
    }

    /// Fails with [`Error::NodesTooClose`] if two nodes are confluent.
    pub fn require_distinct(&self) -> Result<()> {
        let (gap, i, j) = self.min_param_gap();
        if gap < CONFLUENCE_THRESHOLD {
            return Err(Error::NodesTooClose { i, j, gap });
        }
        let (gap, i, j) = self.min_point_gap();
        if gap == 0.0 {
            return Err(Error::NodesTooClose { i, j, gap });
        }
        Ok(())
    }

    /// The nodes reordered as `perm[0], perm[1], ...`.
    pub fn permuted(&self, perm: &[usize]) -> NodeSet {
        NodeSet {
            params: perm.iter().map(|&i| self.params[i]).collect(),
            points: perm.iter().map(|&i| self.points[i]).collect(),
            arc: self.arc.clone(),
        }
    }

    /// Appends one node.
    pub fn with_node(&self, t: f64) -> Result<NodeSet> {
        let mut params = self.params.clone();
        params.push(t);
        NodeSet::new(&self.arc, params)
    }

    pub fn values(&self, f: &ArcFunction) -> Result<Vec<Complex64>> {
        self.params.iter().map(|&t| f.value(t)).collect()
    }

    /// Node values in double-double; see [`ArcFunction::with_wide_value`].
    pub fn wide_values(&self, f: &ArcFunction) -> Result<Vec<Cdd>> {
        self.params.iter().map(|&t| f.wide_value(t)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DdMethod {
    Recursive,
    Lagrange,
    ConfluentAugmented,
}

/// Triangular table with `entries[k][i] = d_k(f | z_i, ..., z_{i+k})`.
#[derive(Debug, Clone)]
pub struct DividedDifferenceTable {
    pub nodes: NodeSet,
    pub entries: Vec<Vec<Complex64>>,
    pub method: DdMethod,
}

impl DividedDifferenceTable {
    /// `d_n(f | z_1, ..., z_{n+1})`.
    pub fn top(&self) -> Complex64 {
        self.entries[self.entries.len() - 1][0]
    }

    /// `[d_0(z_1), d_1(z_1, z_2), ..., d_n(z_1..z_{n+1})]`, the Newton coefficients.
    pub fn diagonal(&self) -> Vec<Complex64> {
        self.entries.iter().map(|row| row[0]).collect()
    }
}

type Wide = Cdd;

fn widen(z: Complex64) -> Wide {
    Cdd::from(z)
}

fn narrow(z: Wide) -> Complex64 {
    z.to_c64()
}

/// Adjacent-difference table on raw points. Points must be pairwise distinct.
///
/// Differences are carried in double-double so that cancellation between
/// close nodes does not leak into the result; entries are rounded once.
pub fn newton_table(points: &[Complex64], values: &[Complex64]) -> Vec<Vec<Complex64>> {
    let values: Vec<Wide> = values.iter().map(|&v| widen(v)).collect();
    newton_table_wide(points, &values)
}

/// [`newton_table`] on double-double values.
pub fn newton_table_wide(points: &[Complex64], values: &[Cdd]) -> Vec<Vec<Complex64>> {
    assert_eq!(points.len(), values.len());
    let n = points.len();
    let zs: Vec<Wide> = points.iter().map(|&z| widen(z)).collect();
    let mut prev: Vec<Wide> = values.to_vec();
    let mut entries = vec![values.iter().map(|&v| narrow(v)).collect()];
    for k in 1..n {
        let row: Vec<Wide> = (0..n - k)
            .map(|i| (prev[i + 1] - prev[i]) / (zs[i + k] - zs[i]))
            .collect();
        entries.push(row.iter().map(|&v| narrow(v)).collect());
        prev = row;
    }
    entries
}

/// `sum_k f(z_k) / w_k(z_k)`, also returning `sum_k |f(z_k) / w_k(z_k)|` and the
/// smallest `|w_k(z_k)|`. The sum is accumulated in double-double.
pub fn lagrange_sum(points: &[Complex64], values: &[Complex64]) -> (Complex64, f64, f64) {
    let values: Vec<Wide> = values.iter().map(|&v| widen(v)).collect();
    lagrange_sum_wide(points, &values)
}

/// [`lagrange_sum`] on double-double values.
pub fn lagrange_sum_wide(points: &[Complex64], values: &[Cdd]) -> (Complex64, f64, f64) {
    let zs: Vec<Wide> = points.iter().map(|&z| widen(z)).collect();
    let mut sum = widen(ZERO);
    let mut abs_sum = 0.0;
    let mut min_w = f64::INFINITY;
    for (k, &fk) in values.iter().enumerate() {
        let w: Wide = zs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .fold(Cdd::ONE, |acc, (_, &zi)| acc * (zs[k] - zi));
        let term = fk / w;
        sum = sum + term;
        abs_sum += narrow(term).norm();
        min_w = min_w.min(narrow(w).norm());
    }
    (narrow(sum), abs_sum, min_w)
}

/// Builds the triangular table by the adjacent-nodes recursion.
pub fn dd_recursive(f: &ArcFunction, nodes: &NodeSet) -> Result<DividedDifferenceTable> {
    nodes.require_distinct()?;
    let values = nodes.wide_values(f)?;
    Ok(DividedDifferenceTable {
        nodes: nodes.clone(),
        entries: newton_table_wide(nodes.points(), &values),
        method: DdMethod::Recursive,
    })
}

/// Recursive table that accepts coincident nodes: nodes are sorted by parameter
/// so that coincident ones are adjacent, and `d_k(z, ..., z) = f^{(k)}(z) / k!`.
pub fn dd_recursive_confluent(f: &ArcFunction, nodes: &NodeSet) -> Result<DividedDifferenceTable> {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes.params[a].total_cmp(&nodes.params[b]));
    let sorted = nodes.permuted(&order);
    let n = sorted.len();
    let values = sorted.values(f)?;
    let mut entries = vec![values];
    for k in 1..n {
        let mut row = Vec::with_capacity(n - k);
        for i in 0..n - k {
            let (ta, tb) = (sorted.params[i], sorted.params[i + k]);
            if sorted.arc.parameter_gap(ta, tb) < CONFLUENCE_THRESHOLD {
                let fact: f64 = (1..=k).map(|j| j as f64).product();
                row.push(arc_derivative(f, &sorted.arc, ta, k)? / fact);
            } else {
                let prev = &entries[k - 1];
                row.push((prev[i + 1] - prev[i]) / (sorted.points[i + k] - sorted.points[i]));
            }
        }
        entries.push(row);
    }
    Ok(DividedDifferenceTable {
        nodes: sorted,
        entries,
        method: DdMethod::ConfluentAugmented,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LagrangeDd {
    pub value: Complex64,
    /// `sum_k |f(z_k)/w_k(z_k)|`; the rounding error is a small multiple of
    /// `value_roundoff` times this.
    pub abs_term_sum: f64,
    /// Relative accuracy of the node values fed to the sum.
    pub value_roundoff: f64,
    pub conditioning_warning: Option<String>,
}

/// `d_n = sum_k f(z_k) / w_k(z_k)` with `w_k(z) = prod_{i != k}(z - z_i)`.
pub fn dd_lagrange(f: &ArcFunction, nodes: &NodeSet) -> Result<LagrangeDd> {
    let (gap, i, j) = nodes.min_point_gap();
    if gap == 0.0 {
        return Err(Error::NodesTooClose { i, j, gap });
    }
    let values = nodes.wide_values(f)?;
    let (value, abs_term_sum, min_w) = lagrange_sum_wide(nodes.points(), &values);
    let value_roundoff = value_roundoff(f);
    let conditioning_warning = (min_w < CONDITIONING_FLOOR).then(|| {
        format!("node product {min_w:e} is below the conditioning floor {CONDITIONING_FLOOR:e}")
    });
    Ok(LagrangeDd {
        value,
        abs_term_sum,
        value_roundoff,
        conditioning_warning,
    })
}

/// Declares which hypothesis licenses the simplex representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HermiteHypothesis {
    /// `f` is analytic near the convex hull of the nodes; uses `ArcFunction::analytic`.
    AnalyticOnHull,
    /// All nodes are real and the arc is a real segment containing them.
    RealSegment,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub estimate: Complex64,
    pub standard_error: f64,
    pub samples: usize,
}

/// Monte Carlo value of the simplex integral of `f^{(n)}` at
/// `(1-t_1) z_1 + (t_1-t_2) z_2 + ... + t_n z_{n+1}` over `1 >= t_1 >= ... >= t_n >= 0`.
/// For `n = 1` the integral is one-dimensional and done by quadrature.
pub fn dd_hermite_oracle<R: Rng + ?Sized>(
    f: &ArcFunction,
    nodes: &NodeSet,
    hypothesis: Option<HermiteHypothesis>,
    sample_budget: usize,
    rng: &mut R,
) -> Result<MonteCarloEstimate> {
    let n = nodes.order();
    if n > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder(format!(
            "simplex oracle supports n <= {MAX_HERMITE_ORDER}, got {n}"
        )));
    }
    let deriv = hermite_derivative(f, nodes, hypothesis, n)?;
    let z = nodes.points();
    if n == 0 {
        return Ok(MonteCarloEstimate {
            estimate: deriv(z[0])?,
            standard_error: 0.0,
            samples: 1,
        });
    }
    if n == 1 {
        let g = |s: f64| deriv(z[0] * (1.0 - s) + z[1] * s);
        let estimate = integrate_adaptive(&g, 0.0, 1.0, 1e-13, DEFAULT_MAX_PANELS)?;
        return Ok(MonteCarloEstimate {
            estimate,
            standard_error: 0.0,
            samples: 0,
        });
    }
    if sample_budget < 2 {
        return Err(Error::InvalidArgument("sample budget must be at least 2".into()));
    }
    let mut ts = vec![0.0; n];
    let mut sum = ZERO;
    let mut sum_sq = 0.0;
    for _ in 0..sample_budget {
        for t in ts.iter_mut() {
            *t = rng.gen::<f64>();
        }
        ts.sort_by(|a, b| b.total_cmp(a));
        let mut point = z[0] * (1.0 - ts[0]) + z[n] * ts[n - 1];
        for j in 1..n {
            point += z[j] * (ts[j - 1] - ts[j]);
        }
        let v = deriv(point)?;
        sum += v;
        sum_sq += v.norm_sqr();
    }
    let m = sample_budget as f64;
    let mean = sum / m;
    let var = ((sum_sq - m * mean.norm_sqr()) / (m - 1.0)).max(0.0);
    let volume: f64 = 1.0 / (1..=n).map(|j| j as f64).product::<f64>();
    Ok(MonteCarloEstimate {
        estimate: mean * volume,
        standard_error: (var / m).sqrt() * volume,
        samples: sample_budget,
    })
}

type PointDerivative<'a> = Box<dyn Fn(Complex64) -> Result<Complex64> + 'a>;

fn hermite_derivative<'a>(
    f: &'a ArcFunction,
    nodes: &'a NodeSet,
    hypothesis: Option<HermiteHypothesis>,
    n: usize,
) -> Result<PointDerivative<'a>> {
    match hypothesis {
        Some(HermiteHypothesis::AnalyticOnHull) => {
            let d = f.analytic().ok_or_else(|| {
                Error::HypothesisViolated(format!("`{}` carries no analytic extension", f.label()))
            })?;
            Ok(Box::new(move |z| Ok(d(z, n))))
        }
        Some(HermiteHypothesis::RealSegment) => {
            let arc = nodes.arc();
            let (a, b) = arc.segment_endpoints().ok_or_else(|| {
                Error::HypothesisViolated("real-node branch needs a segment arc".into())
            })?;
            let scale = 1.0 + a.norm().max(b.norm());
            let real = |z: Complex64| z.im.abs() <= 1e-14 * scale;
            if !real(a) || !real(b) || !nodes.points().iter().all(|&z| real(z)) {
                return Err(Error::HypothesisViolated("nodes are not on a real segment".into()));
            }
            let (a, b) = (a.re, b.re);
            Ok(Box::new(move |z: Complex64| {
                let t = ((z.re - a) / (b - a)).clamp(0.0, 1.0);
                arc_derivative(f, arc, t, n)
            }))
        }
        None => Err(Error::HypothesisViolated(
            "neither analyticity on the hull nor real nodes were declared".into(),
        )),
    }
}

/// `d_1^{k-1}(f | z_1, z_2) = ∫_{z_2}^{z_1} (z - z_2)^{k-1} f^{(k)}(z) dz / (z_1 - z_2)^k`.
pub fn d1_partial(
    f: &ArcFunction,
    arc: &JordanArc,
    t1: f64,
    t2: f64,
    k: usize,
    tol: f64,
) -> Result<Complex64> {
    if k == 0 || k + 1 > f.max_order() {
        return Err(Error::UnsupportedOrder(format!(
            "need 1 <= k <= {} for `{}`, got {k}",
            f.max_order().saturating_sub(1),
            f.label()
        )));
    }
    if arc.parameter_gap(t1, t2) < CONFLUENCE_THRESHOLD {
        return Err(Error::ConfluenceRegion { t1, t2 });
    }
    let z1 = arc.point(t1);
    let z2 = arc.point(t2);
    let integrand = |t: f64| {
        let z = arc.point(t);
        Ok((z - z2).powu((k - 1) as u32) * arc_derivative(f, arc, t, k)?)
    };
    Ok(arc_integral(integrand, arc, t2, t1, tol)? / (z1 - z2).powu(k as u32))
}

/// The confluent value `d_1^{k-1}(f | z_2, z_2) = f^{(k)}(z_2) / k`.
pub fn d1_confluent(f: &ArcFunction, arc: &JordanArc, t2: f64, k: usize) -> Result<Complex64> {
    if k == 0 {
        return Err(Error::UnsupportedOrder("confluent value needs k >= 1".into()));
    }
    Ok(arc_derivative(f, arc, t2, k)? / k as f64)
}

/// Jet in `t` of `t -> d_j(f | phi(t), z_2, ..., z_{j+1})`, where `fixed`
/// holds the parameters of `z_2, ..., z_{j+1}` (so `j = fixed.len()`).
///
/// Uses `d_j(z, ...) = (d_{j-1}(z, z_2..z_j) - d_{j-1}(z_{j+1}, z_2..z_j)) / (z - z_{j+1})`.
/// Near `z_{j+1}` the removable singularity is cancelled on a series about
/// that node, which is then re-expanded at `t`.
pub fn leading_node_jet(
    f: &ArcFunction,
    arc: &JordanArc,
    fixed: &[f64],
    t: f64,
    order: usize,
) -> Result<Jet> {
    let Some((&pivot, rest)) = fixed.split_last() else {
        return f.jet(t, order);
    };
    let mut anchor = pivot;
    if arc.is_closed() {
        // periodic extension: pick the copy of the node nearest to t
        if t - anchor > 0.5 {
            anchor += 1.0;
        } else if anchor - t > 0.5 {
            anchor -= 1.0;
        }
    }
    let z_pivot = arc.point(pivot);
    if (t - anchor).abs() < SERIES_SWITCH {
        let wide = order + SERIES_EXTRA_ORDER;
        match leading_node_jet(f, arc, rest, anchor, wide) {
            Ok(inner) => {
                let num = &inner - inner.value();
                let den = &arc.jet(anchor, wide) - arc.jet(anchor, 0).value();
                let q = Jet::div_removable(&num, &den)?;
                return Ok(q.shift(t).truncate(order));
            }
            Err(Error::InsufficientJetOrder { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let inner = leading_node_jet(f, arc, rest, t, order)?;
    let at_pivot = leading_node_jet(f, arc, rest, pivot, 0)?.value();
    let num = &inner - at_pivot;
    let den = &arc.jet(t, order) - z_pivot;
    num.div(&den)
}

/// `d_k^m(f | phi(t_1), z_2, ..., z_{k+1})`: the m-th derivative along the arc,
/// in the first node, of the order-k divided difference. `fixed` holds
/// the parameters of `z_2, ..., z_{k+1}`.
pub fn dd_first_node_derivative(
    f: &ArcFunction,
    arc: &JordanArc,
    t1: f64,
    fixed: &[f64],
    m: usize,
) -> Result<Complex64> {
    let g = leading_node_jet(f, arc, fixed, t1, m)?;
    let phi = arc.jet(t1, m + 1);
    Ok(along_arc_jet(&g, &phi, m)?.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelationCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

/// Compares `d_k^m` computed by jet differentiation against the integral
/// `∫_{z_{k+1}}^{z_1} (z - z_{k+1})^m d_{k-1}^{m+1}(f | z, z_2..z_k) dz / (z_1 - z_{k+1})^{m+1}`.
pub fn relation_check(
    f: &ArcFunction,
    arc: &JordanArc,
    nodes: &NodeSet,
    k: usize,
    m: usize,
    tol: f64,
) -> Result<RelationCheck> {
    if k == 0 || k > MAX_RELATION_DEPTH || m > MAX_RELATION_DEPTH {
        return Err(Error::UnsupportedOrder(format!(
            "relation check supports 1 <= k <= {MAX_RELATION_DEPTH}, m <= {MAX_RELATION_DEPTH}; got k = {k}, m = {m}"
        )));
    }
    if k + m + 1 > f.max_order() {
        return Err(Error::InsufficientJetOrder {
            requested: k + m + 1,
            available: f.max_order(),
        });
    }
    if nodes.len() != k + 1 {
        return Err(Error::InvalidArgument(format!(
            "relation check of order {k} needs {} nodes, got {}",
            k + 1,
            nodes.len()
        )));
    }
    let ts = nodes.params();
    let (t1, t_last) = (ts[0], ts[k]);
    if arc.parameter_gap(t1, t_last) < CONFLUENCE_THRESHOLD {
        return Err(Error::ConfluenceRegion { t1, t2: t_last });
    }
    let lhs = dd_first_node_derivative(f, arc, t1, &ts[1..], m)?;

    let inner_fixed = &ts[1..k];
    let z_last = nodes.points()[k];
    let z1 = nodes.points()[0];
    let integrand = |t: f64| {
        let z = arc.point(t);
        let d = dd_first_node_derivative(f, arc, t, inner_fixed, m + 1)?;
        Ok((z - z_last).powu(m as u32) * d)
    };
    let rhs = arc_integral(integrand, arc, t_last, t1, tol)? / (z1 - z_last).powu(m as u32 + 1);
    Ok(RelationCheck {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arc::{make_arc, ArcSpec};
    use crate::calculus::DEFAULT_QUAD_TOL;
    use crate::function::FunctionSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn segment() -> JordanArc {
        make_arc(&ArcSpec::Segment { a: c(0.0, 0.0), b: c(1.0, 0.0) }).unwrap()
    }

    fn circle() -> JordanArc {
        make_arc(&ArcSpec::Circle { center: c(0.0, 0.0), radius: 1.0 }).unwrap()
    }

    fn named(name: &str, arc: &JordanArc) -> ArcFunction {
        FunctionSpec::from_name(name).unwrap().on_arc(arc)
    }

    /// Independent oracle: Lagrange sum written out longhand.
    fn lagrange_oracle(points: &[Complex64], values: &[Complex64]) -> Complex64 {
        let mut s = c(0.0, 0.0);
        for k in 0..points.len() {
            let mut w = c(1.0, 0.0);
            for i in 0..points.len() {
                if i != k {
                    w *= points[k] - points[i];
                }
            }
            s += values[k] / w;
        }
        s
    }

    #[test]
    fn square_first_difference() {
        let arc = segment();
        let nodes = NodeSet::new(&arc, vec![0.0, 1.0]).unwrap();
        let t = dd_recursive(&named("z2", &arc), &nodes).unwrap();
        assert!((t.top() - 1.0).norm() < 1e-15);
        assert_eq!(t.entries[0], vec![c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn identity_second_difference_vanishes() {
        let arc = circle();
        let nodes = NodeSet::new(&arc, vec![0.1, 0.45, 0.8]).unwrap();
        let t = dd_recursive(&named("z", &arc), &nodes).unwrap();
        assert!(t.top().norm() < 1e-14);
    }

    #[test]
    fn exp_second_difference_matches_lagrange_oracle() {
        let arc = segment();
        let nodes = NodeSet::new(&arc, vec![0.0, 0.5, 1.0]).unwrap();
        let f = FunctionSpec::Exp.on_arc(&arc);
        let t = dd_recursive(&f, &nodes).unwrap();
        let oracle = lagrange_oracle(nodes.points(), &nodes.values(&f).unwrap());
        // frozen from the oracle: 2 (e - 2 sqrt(e) + 1) = 0.8416833...
        let frozen = 2.0 * (std::f64::consts::E - 2.0 * 0.5f64.exp() + 1.0);
        assert!((oracle.re - frozen).abs() < 1e-14);
        assert!((t.top() - oracle).norm() < 1e-14);
        assert!((t.top().re - 0.84168).abs() < 1e-5);
    }

    #[test]
    fn lagrange_examples() {
        let arc = circle();
        let one = named("one", &arc);
        let nodes = NodeSet::new(&arc, vec![0.0, 0.2, 0.5, 0.7]).unwrap();
        assert!(dd_lagrange(&one, &nodes).unwrap().value.norm() < 1e-14);

        // {i, -i}: quarter and three-quarter turns
        let nodes = NodeSet::new(&arc, vec![0.25, 0.75]).unwrap();
        let d = dd_lagrange(&named("z2", &arc), &nodes).unwrap();
        assert!(d.value.norm() < 1e-14);
        assert!(d.conditioning_warning.is_none());
    }

    #[test]
    fn conj_on_ellipse_lagrange_matches_recursive() {
        let arc = make_arc(&ArcSpec::EllipseArc {
            center: c(0.0, 0.0),
            semi_axes: [2.0, 1.0],
            angle_range: [0.0, 1.5 * PI],
        })
        .unwrap();
        let f = FunctionSpec::Conj.on_arc(&arc);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params: Vec<f64> = (0..5).map(|_| rng.gen::<f64>()).collect();
        let nodes = NodeSet::new(&arc, params).unwrap();
        let a = dd_lagrange(&f, &nodes).unwrap().value;
        let b = dd_recursive(&f, &nodes).unwrap().top();
        assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()), "{a} vs {b}");
    }

    #[test]
    fn coincident_nodes_are_rejected_or_routed() {
        let arc = segment();
        let f = FunctionSpec::Exp.on_arc(&arc);
        let nodes = NodeSet::new(&arc, vec![0.3, 0.3, 0.8]).unwrap();
        assert!(matches!(dd_recursive(&f, &nodes), Err(Error::NodesTooClose { .. })));
        assert!(matches!(dd_lagrange(&f, &nodes), Err(Error::NodesTooClose { .. })));
        let t = dd_recursive_confluent(&f, &nodes).unwrap();
        // d_1(0.3, 0.3) = e^0.3
        assert!((t.entries[1][0] - 0.3f64.exp()).norm() < 1e-13);
        // oracle for the top entry: limit of distinct-node values
        let h = 1e-5;
        let near = NodeSet::new(&arc, vec![0.3, 0.3 + h, 0.8]).unwrap();
        let limit = dd_recursive(&f, &near).unwrap().top();
        assert!((t.top() - limit).norm() < 1e-4);
        assert_eq!(t.method, DdMethod::ConfluentAugmented);
    }

    #[test]
    fn closed_curve_wraps_parameter_gap() {
        let arc = circle();
        let nodes = NodeSet::new(&arc, vec![0.0, 0.5, 1.0]).unwrap();
        assert!(matches!(nodes.require_distinct(), Err(Error::NodesTooClose { .. })));
    }

    #[test]
    fn hermite_examples() {
        let arc = segment();
        let f = FunctionSpec::Exp.on_arc(&arc);
        let mut rng = ChaCha8Rng::seed_from_u64(11);

        let two = NodeSet::new(&arc, vec![0.0, 1.0]).unwrap();
        let e = dd_hermite_oracle(&f, &two, Some(HermiteHypothesis::RealSegment), 10, &mut rng).unwrap();
        assert!((e.estimate - (std::f64::consts::E - 1.0)).norm() < 1e-12);

        let same = NodeSet::new(&arc, vec![0.0, 0.0]).unwrap();
        let e = dd_hermite_oracle(&f, &same, Some(HermiteHypothesis::AnalyticOnHull), 10, &mut rng).unwrap();
        assert!((e.estimate - 1.0).norm() < 1e-14);

        let three = NodeSet::new(&arc, vec![0.0, 0.5, 1.0]).unwrap();
        let exact = dd_lagrange(&f, &three).unwrap().value;
        let e = dd_hermite_oracle(&f, &three, Some(HermiteHypothesis::RealSegment), 200_000, &mut rng)
            .unwrap();
        assert!((e.estimate - exact).norm() <= 3.0 * e.standard_error, "{e:?} vs {exact}");
    }

    #[test]
    fn hermite_preconditions() {
        let arc = circle();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let conj = FunctionSpec::Conj.on_arc(&arc);
        let nodes = NodeSet::new(&arc, vec![0.0, 0.3, 0.6]).unwrap();
        assert!(matches!(
            dd_hermite_oracle(&conj, &nodes, None, 10, &mut rng),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            dd_hermite_oracle(&conj, &nodes, Some(HermiteHypothesis::AnalyticOnHull), 10, &mut rng),
            Err(Error::HypothesisViolated(_))
        ));
        assert!(matches!(
            dd_hermite_oracle(&conj, &nodes, Some(HermiteHypothesis::RealSegment), 10, &mut rng),
            Err(Error::HypothesisViolated(_))
        ));
        let many = NodeSet::new(&arc, vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5]).unwrap();
        assert!(matches!(
            dd_hermite_oracle(&FunctionSpec::Exp.on_arc(&arc), &many, Some(HermiteHypothesis::AnalyticOnHull), 10, &mut rng),
            Err(Error::UnsupportedOrder(_))
        ));
    }

    #[test]
    fn d1_partial_examples() {
        let seg = segment();
        let sq = named("z2", &seg);
        let v = d1_partial(&sq, &seg, 1.0, 0.0, 1, DEFAULT_QUAD_TOL).unwrap();
        assert!((v - 1.0).norm() < 1e-13);

        let circ = circle();
        let conj = FunctionSpec::Conj.on_arc(&circ);
        let v = d1_partial(&conj, &circ, 0.25, 0.0, 1, DEFAULT_QUAD_TOL).unwrap();
        let (z1, z2) = (circ.point(0.25), circ.point(0.0));
        let direct = (z1.conj() - z2.conj()) / (z1 - z2);
        assert!((v - direct).norm() < 1e-12);

        // k = 2: oracle is the jet derivative of t1 -> d_1(f | phi(t1), z_2) over phi'(t1)
        let exp = FunctionSpec::Exp.on_arc(&seg);
        let (t1, t2) = (0.7, 0.2);
        let v = d1_partial(&exp, &seg, t1, t2, 2, DEFAULT_QUAD_TOL).unwrap();
        let z2 = seg.point(t2);
        let num = &exp.jet(t1, 1).unwrap() - exp.value(t2).unwrap();
        let den = &seg.jet(t1, 1) - z2;
        let d1 = num.div(&den).unwrap();
        let oracle = d1.coeff(1) / seg.tangent(t1);
        assert!((v - oracle).norm() < 1e-12);
    }

    #[test]
    fn d1_partial_rejects_confluent_nodes() {
        let seg = segment();
        let f = FunctionSpec::Exp.on_arc(&seg);
        assert!(matches!(
            d1_partial(&f, &seg, 0.4, 0.4, 1, DEFAULT_QUAD_TOL),
            Err(Error::ConfluenceRegion { .. })
        ));
    }

    #[test]
    fn d1_confluent_examples() {
        let seg = segment();
        let v = d1_confluent(&named("z2", &seg), &seg, 0.5, 1).unwrap();
        assert!((v - 1.0).norm() < 1e-14);
        let v = d1_confluent(&FunctionSpec::Exp.on_arc(&seg), &seg, 0.0, 3).unwrap();
        assert!((v - 1.0 / 3.0).norm() < 1e-14);
        let circ = circle();
        let conj = FunctionSpec::Conj.on_arc(&circ);
        let v = d1_confluent(&conj, &circ, 0.3, 1).unwrap();
        assert!((v - arc_derivative(&conj, &circ, 0.3, 1).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn confluent_limit_residual_shrinks() {
        let circ = circle();
        let conj = FunctionSpec::Conj.on_arc(&circ);
        for k in 1..=3 {
            let target = d1_confluent(&conj, &circ, 0.3, k).unwrap();
            let mut prev = f64::INFINITY;
            for sep in [1e-1, 1e-2, 1e-3] {
                let r = (d1_partial(&conj, &circ, 0.3 + sep, 0.3, k, DEFAULT_QUAD_TOL).unwrap() - target)
                    .norm();
                assert!(r < prev, "k = {k}, sep = {sep}: {r} >= {prev}");
                prev = r;
            }
        }
    }

    #[test]
    fn leading_node_jet_value_is_divided_difference() {
        let arc = circle();
        let f = FunctionSpec::CubePlusConj.on_arc(&arc);
        let ts = [0.13, 0.4, 0.72, 0.9];
        let nodes = NodeSet::new(&arc, ts.to_vec()).unwrap();
        let direct = dd_lagrange(&f, &nodes).unwrap().value;
        let jet = leading_node_jet(&f, &arc, &ts[1..], ts[0], 3).unwrap();
        assert!((jet.value() - direct).norm() < 1e-12);
    }

    #[test]
    fn series_and_direct_branches_agree_at_switch() {
        let arc = make_arc(&ArcSpec::EllipseArc {
            center: c(0.0, 0.0),
            semi_axes: [2.0, 1.0],
            angle_range: [0.0, 1.5 * PI],
        })
        .unwrap();
        for spec in [FunctionSpec::Exp, FunctionSpec::Conj, FunctionSpec::CubePlusConj] {
            let f = spec.on_arc(&arc);
            let fixed = [0.5, 0.2];
            let inside = leading_node_jet(&f, &arc, &fixed, 0.2 + 0.999 * SERIES_SWITCH, 3).unwrap();
            let outside = leading_node_jet(&f, &arc, &fixed, 0.2 + 1.001 * SERIES_SWITCH, 3).unwrap();
            // both are expansions of one smooth function; compare by re-expanding
            let moved = inside.shift(0.2 + 1.001 * SERIES_SWITCH);
            for j in 0..=1 {
                let (a, b) = (moved.coeff(j), outside.coeff(j));
                assert!((a - b).norm() < 1e-6 * (1.0 + b.norm()), "{spec:?} coeff {j}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn relation_base_case_is_first_difference() {
        let arc = segment();
        let f = named("z2", &arc);
        let nodes = NodeSet::new(&arc, vec![0.8, 0.1]).unwrap();
        let r = relation_check(&f, &arc, &nodes, 1, 0, DEFAULT_QUAD_TOL).unwrap();
        assert!((r.lhs - 0.9).norm() < 1e-13);
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn relation_holds_for_exp_on_real_nodes() {
        let arc = segment();
        let f = FunctionSpec::Exp.on_arc(&arc);
        let nodes = NodeSet::new(&arc, vec![0.0, 0.3, 1.0]).unwrap();
        let r = relation_check(&f, &arc, &nodes, 2, 0, DEFAULT_QUAD_TOL).unwrap();
        let oracle = dd_recursive(&f, &nodes).unwrap().top();
        assert!((r.lhs - oracle).norm() < 1e-12);
        assert!(r.residual < 1e-10, "{r:?}");
    }

    #[test]
    fn relation_holds_for_conj_on_circle() {
        let arc = circle();
        let f = FunctionSpec::Conj.on_arc(&arc);
        let nodes = NodeSet::new(&arc, vec![0.6, 0.15]).unwrap();
        let r = relation_check(&f, &arc, &nodes, 1, 1, DEFAULT_QUAD_TOL).unwrap();
        assert!(r.residual < 1e-10, "{r:?}");
        let nodes = NodeSet::new(&arc, vec![0.6, 0.3, 0.15, 0.9]).unwrap();
        let r = relation_check(&f, &arc, &nodes, 3, 2, DEFAULT_QUAD_TOL).unwrap();
        assert!(r.residual < 1e-8, "{r:?}");
    }

    #[test]
    fn relation_range_is_enforced() {
        let arc = segment();
        let f = FunctionSpec::Exp.on_arc(&arc);
        let nodes = NodeSet::new(&arc, vec![0.0, 0.2, 0.4, 0.6, 0.8]).unwrap();
        assert!(matches!(
            relation_check(&f, &arc, &nodes, 4, 0, DEFAULT_QUAD_TOL),
            Err(Error::UnsupportedOrder(_))
        ));
    }
}
