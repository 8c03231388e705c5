//! Derivatives and contour integrals of functions along an arc.

use num_complex::Complex64;

use crate::arc::{JordanArc, DEFAULT_ADMISSIBILITY_DELTA};
use crate::error::{Error, Result};
use crate::function::ArcFunction;
use crate::jet::Jet;
use crate::quadrature::{integrate_adaptive, DEFAULT_MAX_PANELS};

pub const DEFAULT_QUAD_TOL: f64 = 1e-12;

/// Given the jet of `G = g∘phi` (order p) and of `phi`, returns the jet of the
/// k-th derivative of `g` along the arc, of order `p - k`.
///
/// `F_0 = G`, `F_j = F_{j-1}' / phi'`.
pub fn along_arc_jet(g: &Jet, phi: &Jet, k: usize) -> Result<Jet> {
    if k > g.order() {
        return Err(Error::InsufficientJetOrder {
            requested: k,
            available: g.order(),
        });
    }
    let speed = phi.derivative();
    let mut f = g.clone();
    for _ in 0..k {
        f = f.derivative().div(&speed)?;
    }
    Ok(f)
}

fn check_speed(arc: &JordanArc, t: f64) -> Result<Jet> {
    let phi = arc.jet(t, 1);
    let speed = phi.coeff(1).norm();
    if !(speed >= DEFAULT_ADMISSIBILITY_DELTA) {
        return Err(Error::NonAdmissiblePoint { t, speed });
    }
    Ok(phi)
}

/// `f^{(k)}(phi(t))`, the k-th derivative along the arc. `k = 0` gives the value.
pub fn arc_derivative(f: &ArcFunction, arc: &JordanArc, t: f64, k: usize) -> Result<Complex64> {
    check_speed(arc, t)?;
    let g = f.jet(t, k)?;
    let phi = arc.jet(t, k + 1);
    Ok(along_arc_jet(&g, &phi, k)?.value())
}

/// Jet (in t) of `f^{(k)}∘phi` of order `order`.
pub fn arc_derivative_jet(
    f: &ArcFunction,
    arc: &JordanArc,
    t: f64,
    k: usize,
    order: usize,
) -> Result<Jet> {
    check_speed(arc, t)?;
    let g = f.jet(t, k + order)?;
    let phi = arc.jet(t, k + order + 1);
    along_arc_jet(&g, &phi, k)
}

/// `∫_{phi(t_a)}^{phi(t_b)} g(z) dz = ∫_{t_a}^{t_b} g(phi(t)) phi'(t) dt`.
///
/// `g` is evaluated at the parameter, i.e. it returns `g(phi(t))`.
pub fn arc_integral<G>(g: G, arc: &JordanArc, t_a: f64, t_b: f64, tol: f64) -> Result<Complex64>
where
    G: Fn(f64) -> Result<Complex64>,
{
    if !(0.0..=1.0).contains(&t_a) || !(0.0..=1.0).contains(&t_b) {
        return Err(Error::InvalidArgument(format!(
            "integration limits {t_a}, {t_b} outside [0, 1]"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let integrand = |t: f64| Ok(g(t)? * arc.tangent(t));
    integrate_adaptive(&integrand, t_a, t_b, tol, DEFAULT_MAX_PANELS)
}

/// [`arc_integral`] of an [`ArcFunction`].
pub fn arc_integral_fn(f: &ArcFunction, arc: &JordanArc, t_a: f64, t_b: f64, tol: f64) -> Result<Complex64> {
    arc_integral(|t| f.value(t), arc, t_a, t_b, tol)
}
