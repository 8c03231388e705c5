//! Newton-form interpolation on complex nodes.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::divided_difference::{dd_lagrange, newton_table_wide, NodeSet};
use crate::error::Result;
use crate::function::ArcFunction;

/// Node count from which [`NodeOrdering::Auto`] switches to Leja order.
pub const LEJA_AUTO_NODES: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeOrdering {
    AsGiven,
    Leja,
    /// Leja for `n >= 6`, as given otherwise.
    Auto,
}

#[derive(Debug, Clone)]
pub struct NewtonInterpolant {
    nodes: NodeSet,
    coeffs: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub t: f64,
    pub z: [f64; 2],
}

/// Export form of an interpolant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolantRecord {
    pub nodes: Vec<NodeRecord>,
    pub coefficients: Vec<[f64; 2]>,
}

impl NewtonInterpolant {
    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    /// `[d_0, d_1, ..., d_n]` in build order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Nested evaluation `d_0 + (z - z_1)(d_1 + (z - z_2)(...))`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        newton_eval(self, z)
    }

    pub fn record(&self) -> InterpolantRecord {
        InterpolantRecord {
            nodes: self
                .nodes
                .params()
                .iter()
                .zip(self.nodes.points())
                .map(|(&t, z)| NodeRecord { t, z: [z.re, z.im] })
                .collect(),
            coefficients: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

pub fn newton_build(f: &ArcFunction, nodes: &NodeSet, ordering: NodeOrdering) -> Result<NewtonInterpolant> {
    nodes.require_distinct()?;
    let use_leja = match ordering {
        NodeOrdering::AsGiven => false,
        NodeOrdering::Leja => true,
        NodeOrdering::Auto => nodes.len() >= LEJA_AUTO_NODES,
    };
    let nodes = if use_leja {
        nodes.permuted(&leja_order(nodes.points()))
    } else {
        nodes.clone()
    };
    let values = nodes.wide_values(f)?;
    let coeffs = newton_table_wide(nodes.points(), &values)
        .into_iter()
        .map(|row| row[0])
        .collect();
    Ok(NewtonInterpolant { nodes, coeffs })
}

pub fn newton_eval(p: &NewtonInterpolant, z: Complex64) -> Complex64 {
    let pts = p.nodes.points();
    let n = p.coeffs.len();
    let mut acc = p.coeffs[n - 1];
    for k in (0..n - 1).rev() {
        acc = acc * (z - pts[k]) + p.coeffs[k];
    }
    acc
}

/// Lagrange form `sum_k f(z_k) w_k(z) / w_k(z_k)`; a cross-check for Newton evaluation.
pub fn lagrange_eval(points: &[Complex64], values: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, (&zk, &fk)) in points.iter().zip(values).enumerate() {
        if z == zk {
            return fk;
        }
        let mut ratio = Complex64::new(1.0, 0.0);
        for (i, &zi) in points.iter().enumerate() {
            if i != k {
                ratio *= (z - zi) / (zk - zi);
            }
        }
        acc += fk * ratio;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemainderCheck {
    pub f_z: Complex64,
    pub p_z: Complex64,
    pub next_difference: Complex64,
    pub node_product: Complex64,
    pub residual: f64,
}

/// Residual of `f(z) = p_n(z) + d_{n+1}(f | z_1, ..., z_{n+1}, z) prod (z - z_k)`
/// at `z = phi(t)`.
pub fn remainder_check(f: &ArcFunction, p: &NewtonInterpolant, t: f64) -> Result<RemainderCheck> {
    let extended = p.nodes.with_node(t)?;
    extended.require_distinct()?;
    let z = extended.points()[extended.len() - 1];
    let f_z = f.value(t)?;
    let p_z = p.eval(z);
    let next_difference = dd_lagrange(f, &extended)?.value;
    let node_product: Complex64 = p.nodes.points().iter().map(|&zk| z - zk).product();
    Ok(RemainderCheck {
        f_z,
        p_z,
        next_difference,
        node_product,
        residual: (f_z - p_z - next_difference * node_product).norm(),
    })
}

/// Greedy Leja ordering: start from the lower-indexed end of the widest pair,
/// then repeatedly take the node maximizing the product of distances to those
/// already chosen. Ties go to the lower index.
pub fn leja_order(points: &[Complex64]) -> Vec<usize> {
    let n = points.len();
    if n <= 1 {
        return (0..n).collect();
    }
    let mut first = 0;
    let mut widest = -1.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (points[i] - points[j]).norm();
            if d > widest {
                widest = d;
                first = i;
            }
        }
    }
    let mut order = vec![first];
    let mut used = vec![false; n];
    used[first] = true;
    // running sum of log-distances to the chosen nodes
    let mut score: Vec<f64> = points.iter().map(|&z| (z - points[first]).norm().ln()).collect();
    while order.len() < n {
        let mut best = None;
        for i in 0..n {
            if used[i] {
                continue;
            }
            match best {
                Some((_, s)) if score[i] <= s => {}
                _ => best = Some((i, score[i])),
            }
        }
        let (next, _) = best.expect("an unused node remains");
        used[next] = true;
        order.push(next);
        for i in 0..n {
            if !used[i] {
                score[i] += (points[i] - points[next]).norm().ln();
            }
        }
    }
    order
}
