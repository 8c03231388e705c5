//! Admissible Jordan arcs and curves given by a parametrization `phi: [0,1] -> C`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::optimize::nelder_mead_max_2d;

/// Default floor on `|phi'|` for admissibility.
pub const DEFAULT_ADMISSIBILITY_DELTA: f64 = 1e-8;
pub const DEFAULT_ADMISSIBILITY_GRID: usize = 1024;
pub const DEFAULT_DIAMETER_GRID: usize = 512;

const CLOSURE_TOL: f64 = 1e-10;
const ONE_SIDED_INSET: f64 = 1e-12;

pub type PhiProvider = dyn Fn(f64, usize) -> Jet + Send + Sync;

/// Geometric description of an arc, as accepted by [`make_arc`] and the config format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ArcSpec {
    Segment {
        a: Complex64,
        b: Complex64,
    },
    Circle {
        center: Complex64,
        radius: f64,
    },
    CircularArc {
        center: Complex64,
        radius: f64,
        angle_range: [f64; 2],
    },
    EllipseArc {
        center: Complex64,
        semi_axes: [f64; 2],
        angle_range: [f64; 2],
    },
}

/// A smooth change of parameter `tau: [0,1] -> [0,1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reparam {
    /// `tau(t) = t + alpha * t * (t - 1)`; admissible for `|alpha| < 1`.
    Quadratic { alpha: f64 },
    /// `tau(t) = t^2`; not admissible at `t = 0`.
    Square,
}

impl Reparam {
    pub fn jet(&self, t: f64, order: usize) -> Jet {
        let poly = match *self {
            Reparam::Quadratic { alpha } => vec![0.0, 1.0 - alpha, alpha],
            Reparam::Square => vec![0.0, 0.0, 1.0],
        };
        let poly: Vec<Complex64> = poly.into_iter().map(|c| Complex64::new(c, 0.0)).collect();
        Jet::from_polynomial(t, &poly, order)
    }
}

#[derive(Clone)]
pub struct JordanArc {
    phi: Arc<PhiProvider>,
    closed: bool,
    one_sided: bool,
    label: String,
    spec: Option<ArcSpec>,
}

impl fmt::Debug for JordanArc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JordanArc")
            .field("label", &self.label)
            .field("closed", &self.closed)
            .field("spec", &self.spec)
            .finish()
    }
}

/// Builds an arc from its geometric description.
pub fn make_arc(spec: &ArcSpec) -> Result<JordanArc> {
    let (phi, closed, label): (Arc<PhiProvider>, bool, String) = match *spec {
        ArcSpec::Segment { a, b } => {
            if a == b || !(a - b).norm().is_finite() {
                return Err(Error::DegenerateArc("segment endpoints coincide".into()));
            }
            let phi = move |t: f64, order: usize| &(&Jet::variable(t, order) * (b - a)) + a;
            (Arc::new(phi), false, "segment".into())
        }
        ArcSpec::Circle { center, radius } => {
            check_radius(radius)?;
            let phi = move |t: f64, order: usize| {
                let angle = &Jet::variable(t, order) * Complex64::new(0.0, 2.0 * PI);
                &angle.exp().scale(Complex64::new(radius, 0.0)) + center
            };
            (Arc::new(phi), true, "circle".into())
        }
        ArcSpec::CircularArc {
            center,
            radius,
            angle_range,
        } => {
            check_radius(radius)?;
            let (start, span) = check_angles(angle_range)?;
            let phi = move |t: f64, order: usize| {
                let angle = &(&Jet::variable(t, order) * Complex64::new(span, 0.0)) + Complex64::new(start, 0.0);
                &(&angle * Complex64::i()).exp().scale(Complex64::new(radius, 0.0)) + center
            };
            (Arc::new(phi), is_full_turn(span), "circular_arc".into())
        }
        ArcSpec::EllipseArc {
            center,
            semi_axes,
            angle_range,
        } => {
            let [ax, by] = semi_axes;
            if !(ax > 0.0 && by > 0.0 && ax.is_finite() && by.is_finite()) {
                return Err(Error::DegenerateArc(format!(
                    "ellipse semi-axes must be positive, got {ax}, {by}"
                )));
            }
            let (start, span) = check_angles(angle_range)?;
            let phi = move |t: f64, order: usize| {
                let angle = &(&Jet::variable(t, order) * Complex64::new(span, 0.0)) + Complex64::new(start, 0.0);
                let (s, c) = angle.sin_cos();
                &(&c.scale(Complex64::new(ax, 0.0)) + &s.scale(Complex64::new(0.0, by))) + center
            };
            (Arc::new(phi), is_full_turn(span), "ellipse_arc".into())
        }
    };
    Ok(JordanArc {
        phi,
        closed,
        one_sided: false,
        label,
        spec: Some(spec.clone()),
    })
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateArc(format!("radius must be positive, got {radius}")))
    }
}

fn check_angles(range: [f64; 2]) -> Result<(f64, f64)> {
    let span = range[1] - range[0];
    if span == 0.0 || !span.is_finite() {
        return Err(Error::DegenerateArc("angle range has zero length".into()));
    }
    if span.abs() > 2.0 * PI + 1e-12 {
        return Err(Error::DegenerateArc("angle range exceeds a full turn".into()));
    }
    Ok((range[0], span))
}

fn is_full_turn(span: f64) -> bool {
    (span.abs() - 2.0 * PI).abs() <= 1e-12
}

impl JordanArc {
    /// Wraps a user-supplied jet provider for `phi`.
    pub fn custom<F>(label: impl Into<String>, closed: bool, phi: F) -> Self
    where
        F: Fn(f64, usize) -> Jet + Send + Sync + 'static,
    {
        JordanArc {
            phi: Arc::new(phi),
            closed,
            one_sided: false,
            label: label.into(),
            spec: None,
        }
    }

    /// Marks the provider as valid only on [0, 1]; endpoint jets are then taken
    /// just inside the interval and re-expanded at the endpoint.
    pub fn with_one_sided_endpoints(mut self, one_sided: bool) -> Self {
        self.one_sided = one_sided;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The same point set traced as `phi(tau(t))`.
    pub fn reparametrized(&self, tau: Reparam) -> JordanArc {
        let inner = self.clone();
        JordanArc {
            phi: Arc::new(move |t: f64, order: usize| {
                let tj = tau.jet(t, order);
                let s = tj.value().re;
                inner.jet(s, order).compose(&tj)
            }),
            closed: self.closed,
            one_sided: false,
            label: format!("{}~reparam", self.label),
            spec: None,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn spec(&self) -> Option<&ArcSpec> {
        self.spec.as_ref()
    }

    /// Jet of `phi` at `t` of the given order.
    pub fn jet(&self, t: f64, order: usize) -> Jet {
        if self.one_sided && (t <= 0.0 || t >= 1.0) {
            let inside = t.clamp(ONE_SIDED_INSET, 1.0 - ONE_SIDED_INSET);
            return (self.phi)(inside, order).shift(t);
        }
        (self.phi)(t, order)
    }

    pub fn point(&self, t: f64) -> Complex64 {
        self.jet(t, 0).value()
    }

    /// `phi'(t)`.
    pub fn tangent(&self, t: f64) -> Complex64 {
        self.jet(t, 1).coeff(1)
    }

    /// Endpoints when the arc is a straight segment.
    pub fn segment_endpoints(&self) -> Option<(Complex64, Complex64)> {
        match self.spec {
            Some(ArcSpec::Segment { a, b }) => Some((a, b)),
            _ => None,
        }
    }

    /// Distance between two parameters; wraps around for closed curves.
    pub fn parameter_gap(&self, t1: f64, t2: f64) -> f64 {
        let d = (t1 - t2).abs();
        if self.closed {
            d.min(1.0 - d)
        } else {
            d
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub min_speed: f64,
    pub argmin_t: f64,
    pub delta: f64,
    pub passed: bool,
    /// `(|phi(0) - phi(1)|, |phi'(0) - phi'(1)|)` for closed curves.
    pub closure_residuals: Option<(f64, f64)>,
}

/// Samples `|phi'|` on a uniform grid and checks the closing conditions for curves.
pub fn admissibility_check(arc: &JordanArc, grid_size: usize, delta: f64) -> AdmissibilityReport {
    let grid_size = grid_size.max(2);
    let mut min_speed = f64::INFINITY;
    let mut argmin_t = 0.0;
    for i in 0..grid_size {
        let t = i as f64 / (grid_size - 1) as f64;
        let s = arc.tangent(t).norm();
        if !(s >= min_speed) {
            min_speed = s;
            argmin_t = t;
        }
    }
    let closure_residuals = arc.closed.then(|| {
        let j0 = arc.jet(0.0, 1);
        let j1 = arc.jet(1.0, 1);
        (
            (j0.coeff(0) - j1.coeff(0)).norm(),
            (j0.coeff(1) - j1.coeff(1)).norm(),
        )
    });
    let closes = closure_residuals.map_or(true, |(a, b)| {
        a <= CLOSURE_TOL * (1.0 + arc.point(0.0).norm()) && b <= CLOSURE_TOL * (1.0 + min_speed)
    });
    AdmissibilityReport {
        min_speed,
        argmin_t,
        delta,
        passed: min_speed >= delta && closes,
        closure_residuals,
    }
}

/// Estimated `max |phi(u) - phi(v)|`: grid maximum polished by a local search.
pub fn diameter(arc: &JordanArc, grid_size: usize) -> f64 {
    let g = grid_size.max(2);
    let ts: Vec<f64> = (0..g).map(|i| i as f64 / (g - 1) as f64).collect();
    let pts: Vec<Complex64> = ts.iter().map(|&t| arc.point(t)).collect();
    let mut best = (0.0, 0, 0);
    for i in 0..g {
        for j in (i + 1)..g {
            let d = (pts[i] - pts[j]).norm();
            if d > best.0 {
                best = (d, i, j);
            }
        }
    }
    let (grid_max, i, j) = best;
    let f = |p: [f64; 2]| (arc.point(p[0]) - arc.point(p[1])).norm();
    let step = 1.0 / (g - 1) as f64;
    let (_, refined) = nelder_mead_max_2d(f, [ts[i], ts[j]], step, 200);
    grid_max.max(refined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_circle() -> JordanArc {
        make_arc(&ArcSpec::Circle {
            center: c(0.0, 0.0),
            radius: 1.0,
        })
        .unwrap()
    }

    #[test]
    fn segment_is_identity_parametrization() {
        let arc = make_arc(&ArcSpec::Segment {
            a: c(0.0, 0.0),
            b: c(1.0, 0.0),
        })
        .unwrap();
        assert!(!arc.is_closed());
        assert_eq!(arc.point(0.37), c(0.37, 0.0));
        assert_eq!(arc.tangent(0.2), c(1.0, 0.0));
        assert_relative_eq!(diameter(&arc, 64), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn circle_is_closed_standard_parametrization() {
        let arc = unit_circle();
        assert!(arc.is_closed());
        let z = arc.point(0.125);
        let w = Complex64::from_polar(1.0, PI / 4.0);
        assert!((z - w).norm() < 1e-15);
        assert_relative_eq!(diameter(&arc, DEFAULT_DIAMETER_GRID), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn half_circle_diameter_is_two() {
        let arc = make_arc(&ArcSpec::CircularArc {
            center: c(0.0, 0.0),
            radius: 1.0,
            angle_range: [0.0, PI],
        })
        .unwrap();
        assert!(!arc.is_closed());
        assert_relative_eq!(diameter(&arc, 33), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn full_ellipse_is_closed() {
        let arc = make_arc(&ArcSpec::EllipseArc {
            center: c(1.0, 1.0),
            semi_axes: [2.0, 1.0],
            angle_range: [0.0, 2.0 * PI],
        })
        .unwrap();
        assert!(arc.is_closed());
        assert!(admissibility_check(&arc, 256, DEFAULT_ADMISSIBILITY_DELTA).passed);
        assert_relative_eq!(diameter(&arc, 100), 4.0, max_relative = 1e-9);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let bad = [
            ArcSpec::Segment { a: c(1.0, 1.0), b: c(1.0, 1.0) },
            ArcSpec::Circle { center: c(0.0, 0.0), radius: 0.0 },
            ArcSpec::Circle { center: c(0.0, 0.0), radius: -1.0 },
            ArcSpec::CircularArc { center: c(0.0, 0.0), radius: 1.0, angle_range: [1.0, 1.0] },
            ArcSpec::EllipseArc { center: c(0.0, 0.0), semi_axes: [1.0, 0.0], angle_range: [0.0, 1.0] },
        ];
        for spec in bad {
            assert!(matches!(make_arc(&spec), Err(Error::DegenerateArc(_))), "{spec:?}");
        }
    }

    #[test]
    fn admissibility_of_standard_arcs() {
        let seg = make_arc(&ArcSpec::Segment { a: c(0.0, 0.0), b: c(1.0, 0.0) }).unwrap();
        let r = admissibility_check(&seg, DEFAULT_ADMISSIBILITY_GRID, DEFAULT_ADMISSIBILITY_DELTA);
        assert!(r.passed);
        assert_relative_eq!(r.min_speed, 1.0);
        assert!(r.closure_residuals.is_none());

        let r = admissibility_check(&unit_circle(), DEFAULT_ADMISSIBILITY_GRID, DEFAULT_ADMISSIBILITY_DELTA);
        assert!(r.passed);
        assert_relative_eq!(r.min_speed, 2.0 * PI, max_relative = 1e-12);
        let (a, b) = r.closure_residuals.unwrap();
        assert!(a < 1e-12 && b < 1e-12);
    }

    #[test]
    fn squared_parameter_fails_admissibility() {
        let arc = JordanArc::custom("t^2", false, |t, order| {
            Jet::from_polynomial(t, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], order)
        });
        let r = admissibility_check(&arc, DEFAULT_ADMISSIBILITY_GRID, DEFAULT_ADMISSIBILITY_DELTA);
        assert!(!r.passed);
        assert_eq!(r.min_speed, 0.0);
        assert_eq!(r.argmin_t, 0.0);
    }

    #[test]
    fn reparametrization_traces_same_points() {
        let arc = make_arc(&ArcSpec::CircularArc {
            center: c(0.0, 0.0),
            radius: 1.0,
            angle_range: [0.0, PI],
        })
        .unwrap();
        let re = arc.reparametrized(Reparam::Quadratic { alpha: 0.5 });
        for &t in &[0.0, 0.1, 0.5, 0.9, 1.0] {
            let s = t + 0.5 * t * (t - 1.0);
            assert!((re.point(t) - arc.point(s)).norm() < 1e-15);
            let chain = arc.tangent(s) * (1.0 + 0.5 * (2.0 * t - 1.0));
            assert!((re.tangent(t) - chain).norm() < 1e-13);
        }
    }

    #[test]
    fn one_sided_provider_is_not_evaluated_outside() {
        let arc = JordanArc::custom("sqrt-guarded", false, |t, order| {
            assert!((0.0..=1.0).contains(&t) && t > 0.0 && t < 1.0, "evaluated at {t}");
            &Jet::variable(t, order) * c(1.0, 1.0)
        })
        .with_one_sided_endpoints(true);
        assert!((arc.point(0.0)).norm() < 1e-11);
        assert!((arc.tangent(1.0) - c(1.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn diameter_is_monotone_under_grid_doubling() {
        let arc = make_arc(&ArcSpec::EllipseArc {
            center: c(0.0, 0.0),
            semi_axes: [1.5, 0.7],
            angle_range: [0.3, 4.0],
        })
        .unwrap();
        let mut prev = 0.0;
        for g in [9, 17, 33, 65, 129] {
            let d = diameter(&arc, g);
            assert!(d >= prev - 1e-12, "grid {g}: {d} < {prev}");
            prev = d;
        }
    }

    #[test]
    fn arc_spec_round_trips_through_json() {
        let spec = ArcSpec::EllipseArc {
            center: c(0.5, -1.0),
            semi_axes: [2.0, 1.0],
            angle_range: [0.0, 3.0],
        };
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains("\"kind\":\"ellipse_arc\""));
        let back: ArcSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back, spec);
    }
}
