//! Functions on an arc, supplied as jets of `f∘phi` in the parameter `t`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arc::JordanArc;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::wide::Cdd;

/// Jet order cap for the built-in roster; their providers are exact at any order.
pub const BUILTIN_MAX_ORDER: usize = 256;

pub type ComposedProvider = dyn Fn(f64, usize) -> Result<Jet> + Send + Sync;
/// `(z, k) -> f^{(k)}(z)` for functions analytic near the arc.
pub type ComplexDerivative = dyn Fn(Complex64, usize) -> Complex64 + Send + Sync;
pub type WideValue = dyn Fn(f64) -> Cdd + Send + Sync;

#[derive(Clone)]
pub struct ArcFunction {
    composed: Arc<ComposedProvider>,
    max_order: usize,
    label: String,
    analytic: Option<Arc<ComplexDerivative>>,
    wide: Option<Arc<WideValue>>,
}

impl fmt::Debug for ArcFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ArcFunction")
            .field("label", &self.label)
            .field("max_order", &self.max_order)
            .field("analytic", &self.analytic.is_some())
            .field("wide", &self.wide.is_some())
            .finish()
    }
}

impl ArcFunction {
    pub fn new<F>(label: impl Into<String>, max_order: usize, composed: F) -> Self
    where
        F: Fn(f64, usize) -> Result<Jet> + Send + Sync + 'static,
    {
        ArcFunction {
            composed: Arc::new(composed),
            max_order,
            label: label.into(),
            analytic: None,
            wide: None,
        }
    }

    /// Declares `f` analytic on a neighbourhood of the convex hull of the arc,
    /// with complex derivatives given by `deriv`.
    pub fn with_analytic<D>(mut self, deriv: D) -> Self
    where
        D: Fn(Complex64, usize) -> Complex64 + Send + Sync + 'static,
    {
        self.analytic = Some(Arc::new(deriv));
        self
    }

    /// Supplies `f(phi(t))` in double-double, evaluated at the double point `phi(t)`.
    /// Divided differences then lose only double-double precision to cancellation.
    pub fn with_wide_value<W>(mut self, wide: W) -> Self
    where
        W: Fn(f64) -> Cdd + Send + Sync + 'static,
    {
        self.wide = Some(Arc::new(wide));
        self
    }

    pub fn has_wide_value(&self) -> bool {
        self.wide.is_some()
    }

    /// `f(phi(t))` in double-double when available, else the double value widened.
    pub fn wide_value(&self, t: f64) -> Result<Cdd> {
        match &self.wide {
            Some(w) => Ok(w(t)),
            None => Ok(Cdd::from(self.value(t)?)),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn analytic(&self) -> Option<&ComplexDerivative> {
        self.analytic.as_deref()
    }

    /// Jet of `f∘phi` at `t`.
    pub fn jet(&self, t: f64, order: usize) -> Result<Jet> {
        if order > self.max_order {
            return Err(Error::InsufficientJetOrder {
                requested: order,
                available: self.max_order,
            });
        }
        (self.composed)(t, order)
    }

    /// `f(phi(t))`.
    pub fn value(&self, t: f64) -> Result<Complex64> {
        Ok(self.jet(t, 0)?.value())
    }
}

/// Built-in function roster, by name or as a config entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// Monomial coefficients, lowest degree first.
    Polynomial { coeffs: Vec<Complex64> },
    Exp,
    Sin,
    /// `z -> conj(z)`, not analytic anywhere.
    Conj,
    /// `z -> |z|^2`.
    AbsSquared,
    /// `z -> z^3 + conj(z)`.
    CubePlusConj,
}

impl FunctionSpec {
    /// Parses the short names used on the command line.
    pub fn from_name(name: &str) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Ok(match name {
            "exp" => FunctionSpec::Exp,
            "sin" => FunctionSpec::Sin,
            "conj" => FunctionSpec::Conj,
            "abs2" => FunctionSpec::AbsSquared,
            "z3+conj" | "cube_plus_conj" => FunctionSpec::CubePlusConj,
            "one" => FunctionSpec::Polynomial { coeffs: vec![one] },
            "z" => FunctionSpec::Polynomial { coeffs: vec![zero, one] },
            "z2" => FunctionSpec::Polynomial { coeffs: vec![zero, zero, one] },
            "z3" => FunctionSpec::Polynomial { coeffs: vec![zero, zero, zero, one] },
            other => {
                return Err(Error::InvalidArgument(format!("unknown function `{other}`")));
            }
        })
    }

    pub fn name(&self) -> String {
        match self {
            FunctionSpec::Polynomial { coeffs } => {
                let terms: Vec<String> = coeffs
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() != 0.0)
                    .map(|(k, c)| format!("({}{:+}i)z^{}", c.re, c.im, k))
                    .collect();
                if terms.is_empty() {
                    "0".into()
                } else {
                    terms.join("+")
                }
            }
            FunctionSpec::Exp => "exp".into(),
            FunctionSpec::Sin => "sin".into(),
            FunctionSpec::Conj => "conj".into(),
            FunctionSpec::AbsSquared => "abs2".into(),
            FunctionSpec::CubePlusConj => "z3+conj".into(),
        }
    }

    pub fn is_analytic(&self) -> bool {
        matches!(
            self,
            FunctionSpec::Polynomial { .. } | FunctionSpec::Exp | FunctionSpec::Sin
        )
    }

    /// Composes with the arc's parametrization.
    pub fn on_arc(&self, arc: &JordanArc) -> ArcFunction {
        let spec = self.clone();
        let phi = arc.clone();
        self.composed_on(arc)
            .with_wide_value(move |t| spec.wide_at(phi.point(t)))
    }

    /// `f(z)` in double-double at a double point.
    pub fn wide_at(&self, z: Complex64) -> Cdd {
        let w = Cdd::from(z);
        match self {
            FunctionSpec::Polynomial { coeffs } => coeffs
                .iter()
                .rev()
                .fold(Cdd::ZERO, |acc, &c| acc * w + Cdd::from(c)),
            FunctionSpec::Exp => Cdd::exp_at(z),
            FunctionSpec::Sin => Cdd::sin_at(z),
            FunctionSpec::Conj => w.conj(),
            FunctionSpec::AbsSquared => w * w.conj(),
            FunctionSpec::CubePlusConj => w * w * w + w.conj(),
        }
    }

    fn composed_on(&self, arc: &JordanArc) -> ArcFunction {
        let arc = arc.clone();
        let label = self.name();
        match self.clone() {
            FunctionSpec::Polynomial { coeffs } => {
                let c2 = coeffs.clone();
                ArcFunction::new(label, BUILTIN_MAX_ORDER, move |t, order| {
                    let z = arc.jet(t, order);
                    let mut acc = Jet::constant(t, Complex64::new(0.0, 0.0), order);
                    for &c in coeffs.iter().rev() {
                        acc = &(&acc * &z) + c;
                    }
                    Ok(acc)
                })
                .with_analytic(move |z, k| polynomial_derivative(&c2, z, k))
            }
            FunctionSpec::Exp => ArcFunction::new(label, BUILTIN_MAX_ORDER, move |t, order| {
                Ok(arc.jet(t, order).exp())
            })
            .with_analytic(|z, _| z.exp()),
            FunctionSpec::Sin => ArcFunction::new(label, BUILTIN_MAX_ORDER, move |t, order| {
                Ok(arc.jet(t, order).sin())
            })
            .with_analytic(|z, k| match k % 4 {
                0 => z.sin(),
                1 => z.cos(),
                2 => -z.sin(),
                _ => -z.cos(),
            }),
            FunctionSpec::Conj => ArcFunction::new(label, BUILTIN_MAX_ORDER, move |t, order| {
                Ok(arc.jet(t, order).conj())
            }),
            FunctionSpec::AbsSquared => {
                ArcFunction::new(label, BUILTIN_MAX_ORDER, move |t, order| {
                    let z = arc.jet(t, order);
                    Ok(&z * &z.conj())
                })
            }
            FunctionSpec::CubePlusConj => {
                ArcFunction::new(label, BUILTIN_MAX_ORDER, move |t, order| {
                    let z = arc.jet(t, order);
                    Ok(&z.powi(3) + &z.conj())
                })
            }
        }
    }
}

fn polynomial_derivative(coeffs: &[Complex64], z: Complex64, k: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &c) in coeffs.iter().enumerate().skip(k).rev() {
        let falling: f64 = ((j - k + 1)..=j).map(|i| i as f64).product();
        acc = acc * z + c * falling;
    }
    acc
}
