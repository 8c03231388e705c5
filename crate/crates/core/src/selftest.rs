//! Reduced-scale versions of the invariant suites, runnable from the CLI.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{lemma_sequence_bound, minimize_pivot_product};
use crate::config::{ArcEntry, ScenarioConfig, NAMED_ARCS};
use crate::divided_difference::{dd_lagrange, dd_recursive, NodeSet};
use crate::error::Result;
use crate::function::FunctionSpec;
use crate::harness::{run_verification_suite, sample_params};
use crate::interpolation::{newton_build, NodeOrdering};

const SEED: u64 = 0x5e1f_7e57;

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn outcome(name: &'static str, r: Result<(bool, String)>) -> CheckOutcome {
    match r {
        Ok((pass, detail)) => CheckOutcome { name, pass, detail },
        Err(e) => CheckOutcome {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

fn random_nodes(rng: &mut ChaCha8Rng, arc_name: &str, count: usize) -> Result<NodeSet> {
    let arc = ArcEntry::Named(arc_name.into()).build()?;
    let params = sample_params(rng, count, 1e-3, arc.is_closed())?;
    NodeSet::new(&arc, params)
}

fn cross_representation() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0_f64;
    for arc_name in NAMED_ARCS {
        for _ in 0..10 {
            let n = rng.gen_range(1..=6);
            let nodes = random_nodes(&mut rng, arc_name, n + 1)?;
            let f = FunctionSpec::Exp.on_arc(nodes.arc());
            let a = dd_recursive(&f, &nodes)?.top();
            let b = dd_lagrange(&f, &nodes)?.value;
            worst = worst.max((a - b).norm() / a.norm().max(b.norm()));
        }
    }
    Ok((worst <= 1e-9, format!("max relative difference {worst:.3e}")))
}

fn permutation_invariance() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let nodes = random_nodes(&mut rng, "ellipse-arc", 6)?;
        let f = FunctionSpec::CubePlusConj.on_arc(nodes.arc());
        let base = dd_lagrange(&f, &nodes)?.value;
        for _ in 0..5 {
            let mut perm: Vec<usize> = (0..nodes.len()).collect();
            perm.shuffle(&mut rng);
            let v = dd_lagrange(&f, &nodes.permuted(&perm))?.value;
            worst = worst.max((v - base).norm() / base.norm());
        }
    }
    Ok((worst <= 1e-10, format!("max relative spread {worst:.3e}")))
}

fn polynomial_exactness() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let coeffs: Vec<Complex64> = (0..4).map(|k| Complex64::new(1.0, k as f64 - 1.5)).collect();
    let spec = FunctionSpec::Polynomial { coeffs };
    let nodes = random_nodes(&mut rng, "ellipse-arc", 4)?;
    let f = spec.on_arc(nodes.arc());
    let p = newton_build(&f, &nodes, NodeOrdering::AsGiven)?;
    let mut worst = 0.0_f64;
    for i in 0..10 {
        let t = (i as f64 + 0.5) / 10.0;
        let fz = f.value(t)?;
        worst = worst.max((fz - p.eval(nodes.arc().point(t))).norm() / fz.norm().max(1.0));
    }
    Ok((worst <= 1e-10, format!("max error {worst:.3e}")))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn pivot_brute_force() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 3);
    let mut mismatches = 0;
    for _ in 0..20 {
        let m = rng.gen_range(3..=6);
        let pts: Vec<Complex64> = (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let brute = permutations(m)
            .into_iter()
            .map(|s| {
                let zi = pts[s[0]];
                s[2..]
                    .iter()
                    .map(|&k| 1.0 + (zi - pts[k]).norm())
                    .product::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        let fast = minimize_pivot_product(&pts)?.value;
        if (fast - brute).abs() > 4.0 * f64::EPSILON * brute {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("{mismatches} mismatches in 20 instances")))
}

fn sequence_lemma() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut violations = 0;
    for _ in 0..100 {
        let n = rng.gen_range(2..=12);
        let c = rng.gen_range(0.0..5.0);
        let l: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.0..3.0)).collect();
        let r = lemma_sequence_bound(c, &l, n)?;
        if r.i_hat_n0 > r.closed_form {
            violations += 1;
        }
    }
    Ok((violations == 0, format!("{violations} violations in 100 inputs")))
}

fn bound_validity() -> Result<(bool, String)> {
    let cfg = ScenarioConfig::from_json(
        r#"{"arcs":["segment","circle"],"functions":["exp","conj"],"orders":[2,3,4],
            "trials":5,"seed":11,"grids":{"constant_grid":32}}"#,
    )?;
    let rep = run_verification_suite(&cfg)?;
    let misordered = rep
        .rows
        .iter()
        .filter(|r| !(r.sharper_bound <= r.product_bound && r.product_bound <= r.diam_bound))
        .count();
    let s = &rep.summary;
    Ok((
        rep.is_clean() && misordered == 0,
        format!(
            "{} rows, {} violations, {} failures, {misordered} misordered, max ratio {:.3e}",
            s.trials, s.violations, s.failures, s.max_ratio
        ),
    ))
}

pub fn run_selftest() -> Vec<CheckOutcome> {
    vec![
        outcome("cross-representation", cross_representation()),
        outcome("permutation-invariance", permutation_invariance()),
        outcome("polynomial-exactness", polynomial_exactness()),
        outcome("pivot-brute-force", pivot_brute_force()),
        outcome("sequence-lemma", sequence_lemma()),
        outcome("bound-validity", bound_validity()),
    ]
}
