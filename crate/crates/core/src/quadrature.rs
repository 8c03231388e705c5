//! Composite Gauss–Legendre quadrature with dyadic panel refinement.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Points per panel.
pub const GL_POINTS: usize = 16;

/// Default cap on the number of panels before giving up.
pub const DEFAULT_MAX_PANELS: usize = 4096;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes the `n`-point rule on [-1, 1] by Newton iteration on P_n.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// The shared 16-point rule.
    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(GL_POINTS))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Maps the rule onto [a, b]: returns `(t, w)` pairs.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// Composite rule with `panels` equal panels on [a, b].
    pub fn composite<F>(&self, f: &F, a: f64, b: f64, panels: usize) -> Result<Complex64>
    where
        F: Fn(f64) -> Result<Complex64> + ?Sized,
    {
        let h = (b - a) / panels as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let lo = a + h * p as f64;
            let hi = if p + 1 == panels { b } else { lo + h };
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, w) in self.mapped(lo, hi) {
                acc += f(t)? * w;
            }
            total += acc;
        }
        Ok(total)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrates `f` over [a, b] (either orientation), doubling the panel count
/// until two successive estimates differ by at most `max(tol, tol * |estimate|)`.
pub fn integrate_adaptive<F>(f: &F, a: f64, b: f64, tol: f64, max_panels: usize) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64> + ?Sized,
{
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rule = GaussLegendre::standard();
    let mut panels = 1;
    let mut prev = rule.composite(f, a, b, panels)?;
    let mut last_change = f64::INFINITY;
    while panels * 2 <= max_panels {
        panels *= 2;
        let next = rule.composite(f, a, b, panels)?;
        last_change = (next - prev).norm();
        if !next.is_finite() {
            break;
        }
        if last_change <= tol.max(tol * next.norm()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NoConvergence {
        panels,
        last_change,
    })
}
