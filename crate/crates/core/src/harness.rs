//! Batch verification of the divided-difference bounds and tightness sweeps.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arc::JordanArc;
use crate::bounds::{certify, ConstantTable, CkEstimate};
use crate::config::{NodeLayout, ScenarioConfig};
use crate::divided_difference::{dd_lagrange, dd_recursive, NodeSet};
use crate::error::{Error, Result};
use crate::function::ArcFunction;
use crate::interpolation::leja_order;

pub const SCHEMA_VERSION: u32 = 1;
pub const THREADS_ENV: &str = "ARCINTERP_THREADS";
pub const ROW_CSV_HEADER: &str = "arc,function,n,trial,abs_dn,product_bound,diam_bound,sharper_bound,ratio,pass";
pub const SWEEP_CSV_HEADER: &str =
    "arc,function,n,trials,product_min,product_median,product_max,sharper_min,sharper_median,sharper_max";
const MAX_REJECTIONS: usize = 100_000;
const LEJA_CANDIDATES: usize = 1024;

#[derive(Debug, Clone, Serialize)]
pub struct TrialRow {
    pub arc: String,
    pub function: String,
    pub n: usize,
    pub trial: usize,
    pub params: Vec<f64>,
    pub abs_dn: f64,
    pub rounding_floor: f64,
    /// Newton-table value against the Lagrange value, relative to the larger modulus.
    pub cross_check_rel: f64,
    pub cross_check_ok: bool,
    pub c_gamma: f64,
    pub product_bound: f64,
    pub diam_bound: f64,
    pub sharper_bound: f64,
    /// `max(|d_n| - rounding_floor, 0) / (safety_factor * product_bound)`.
    pub ratio: f64,
    /// Same numerator over `safety_factor * sharper_bound`.
    pub sharper_ratio: f64,
    /// The numerator exceeds `product_bound` before the safety factor.
    pub raw_violation: bool,
    pub pass: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsEntry {
    pub arc: String,
    pub function: String,
    pub rows: Vec<CkEstimate>,
    pub diam: f64,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub violations: usize,
    pub raw_violations: usize,
    /// Rows that errored or failed the Newton/Lagrange cross-check.
    pub failures: usize,
    pub max_ratio: f64,
    pub safety_factor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub config: ScenarioConfig,
    pub constants: Vec<ConstantsEntry>,
    pub rows: Vec<TrialRow>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.summary.violations == 0 && self.summary.failures == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(ROW_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                csv_field(&r.arc),
                csv_field(&r.function),
                r.n,
                r.trial,
                num(r.abs_dn),
                num(r.product_bound),
                num(r.diam_bound),
                num(r.sharper_bound),
                num(r.ratio),
                r.pass
            );
        }
        out
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Per-trial generator seed; independent of scheduling.
pub fn trial_seed(seed: u64, arc: usize, function: usize, n: usize, trial: usize) -> u64 {
    [arc, function, n, trial]
        .iter()
        .fold(splitmix(seed), |h, &x| splitmix(h ^ x as u64))
}

fn circular_gap_ok(sorted: &[f64], min_gap: f64, closed: bool) -> bool {
    let inner = sorted.windows(2).all(|w| w[1] - w[0] >= min_gap);
    let wrap = !closed || sorted.len() < 2 || sorted[0] + 1.0 - sorted[sorted.len() - 1] >= min_gap;
    inner && wrap
}

/// `count` parameters uniform in `[0,1]` (or `[0,1)` on closed curves), in draw
/// order, redrawn until all sorted gaps are at least `min_gap`.
pub fn sample_params<R: Rng>(rng: &mut R, count: usize, min_gap: f64, closed: bool) -> Result<Vec<f64>> {
    for _ in 0..MAX_REJECTIONS {
        let params: Vec<f64> = (0..count)
            .map(|_| if closed { rng.gen_range(0.0..1.0) } else { rng.gen_range(0.0..=1.0) })
            .collect();
        let mut sorted = params.clone();
        sorted.sort_by(f64::total_cmp);
        if circular_gap_ok(&sorted, min_gap, closed) {
            return Ok(params);
        }
    }
    Err(Error::InvalidArgument(format!(
        "could not place {count} nodes with parameter gap {min_gap}"
    )))
}

fn layout_params(arc: &JordanArc, layout: NodeLayout, count: usize) -> Vec<f64> {
    match layout {
        NodeLayout::Random => unreachable!("random layouts are sampled per trial"),
        NodeLayout::Equispaced => {
            let denom = if arc.is_closed() { count } else { count - 1 } as f64;
            (0..count).map(|k| k as f64 / denom).collect()
        }
        NodeLayout::Leja => {
            let m = LEJA_CANDIDATES;
            let ts: Vec<f64> = if arc.is_closed() {
                (0..m).map(|i| i as f64 / m as f64).collect()
            } else {
                (0..=m).map(|i| i as f64 / m as f64).collect()
            };
            let pts: Vec<Complex64> = ts.iter().map(|&t| arc.point(t)).collect();
            leja_order(&pts).into_iter().take(count).map(|i| ts[i]).collect()
        }
    }
}

/// Worker pool honouring [`THREADS_ENV`].
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::config(THREADS_ENV, format!("expected a thread count, got `{v}`")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

struct Prepared {
    arcs: Vec<JordanArc>,
    functions: Vec<Vec<ArcFunction>>,
    tables: Vec<Vec<Result<ConstantTable>>>,
}

fn prepare(config: &ScenarioConfig) -> Result<Prepared> {
    config.validate()?;
    let arcs: Vec<JordanArc> = config.arcs.iter().map(|a| a.build()).collect::<Result<_>>()?;
    let specs: Vec<_> = config.functions.iter().map(|f| f.spec()).collect::<Result<_>>()?;
    let functions: Vec<Vec<ArcFunction>> = arcs
        .iter()
        .map(|arc| specs.iter().map(|s| s.on_arc(arc)).collect())
        .collect();
    let n_max = *config.orders.iter().max().expect("validated non-empty");
    let k_max = if config.extended_k_range { n_max } else { n_max - 1 };
    let est = config.estimation();
    let pairs: Vec<(usize, usize)> = (0..arcs.len())
        .flat_map(|a| (0..specs.len()).map(move |f| (a, f)))
        .collect();
    let flat: Vec<Result<ConstantTable>> = pairs
        .par_iter()
        .map(|&(a, f)| ConstantTable::estimate(&functions[a][f], &arcs[a], k_max, &est))
        .collect();
    let mut tables: Vec<Vec<Result<ConstantTable>>> = (0..arcs.len()).map(|_| Vec::new()).collect();
    for ((a, _), t) in pairs.into_iter().zip(flat) {
        tables[a].push(t);
    }
    Ok(Prepared {
        arcs,
        functions,
        tables,
    })
}

fn run_trial(
    config: &ScenarioConfig,
    prepared: &Prepared,
    fixed: &[Vec<f64>],
    (a, f, ni, trial): (usize, usize, usize, usize),
) -> TrialRow {
    let arc = &prepared.arcs[a];
    let func = &prepared.functions[a][f];
    let n = config.orders[ni];
    let safety = config.tolerances.safety_factor;
    let mut row = TrialRow {
        arc: arc.label().to_string(),
        function: func.label().to_string(),
        n,
        trial,
        params: Vec::new(),
        abs_dn: f64::NAN,
        rounding_floor: f64::NAN,
        cross_check_rel: f64::NAN,
        cross_check_ok: false,
        c_gamma: f64::NAN,
        product_bound: f64::NAN,
        diam_bound: f64::NAN,
        sharper_bound: f64::NAN,
        ratio: f64::NAN,
        sharper_ratio: f64::NAN,
        raw_violation: false,
        pass: false,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let table = prepared.tables[a][f].as_ref().map_err(Clone::clone)?;
        let params = match config.sampling.layout {
            NodeLayout::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, a, f, n, trial));
                sample_params(&mut rng, n + 1, config.sampling.min_gap, arc.is_closed())?
            }
            _ => fixed[a * config.orders.len() + ni].clone(),
        };
        row.params = params.clone();
        let nodes = NodeSet::new(arc, params)?;
        let cert = certify(table, func, &nodes)?;
        let newton = dd_recursive(func, &nodes)?.top();
        let lagrange = dd_lagrange(func, &nodes)?.value;
        let diff = (newton - lagrange).norm();
        let scale = lagrange.norm().max(newton.norm());
        row.cross_check_rel = if scale == 0.0 { 0.0 } else { diff / scale };
        row.cross_check_ok = diff <= config.tolerances.cross_check_rtol * scale + 2.0 * cert.rounding_floor;
        row.abs_dn = cert.abs_dn;
        row.rounding_floor = cert.rounding_floor;
        row.c_gamma = cert.c_gamma;
        row.product_bound = cert.product_bound;
        row.diam_bound = cert.diam_bound;
        row.sharper_bound = cert.sharper_bound;
        let excess = (cert.abs_dn - cert.rounding_floor).max(0.0);
        let ratio = |bound: f64| {
            if excess == 0.0 {
                0.0
            } else {
                excess / (safety * bound)
            }
        };
        row.ratio = ratio(cert.product_bound);
        row.sharper_ratio = ratio(cert.sharper_bound);
        row.raw_violation = excess > cert.product_bound;
        row.pass = row.ratio <= 1.0;
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
        row.pass = false;
    }
    row
}

/// Runs every `(arc, function, n, trial)` combination; rows come out in that order.
pub fn run_verification_suite(config: &ScenarioConfig) -> Result<VerificationReport> {
    let pool = thread_pool()?;
    pool.install(|| run_in_pool(config))
}

fn run_in_pool(config: &ScenarioConfig) -> Result<VerificationReport> {
    let prepared = prepare(config)?;
    let fixed: Vec<Vec<f64>> = match config.sampling.layout {
        NodeLayout::Random => Vec::new(),
        layout => prepared
            .arcs
            .iter()
            .flat_map(|arc| config.orders.iter().map(move |&n| layout_params(arc, layout, n + 1)))
            .collect(),
    };
    let mut tasks = Vec::new();
    for a in 0..prepared.arcs.len() {
        for f in 0..config.functions.len() {
            for ni in 0..config.orders.len() {
                for trial in 0..config.trials {
                    tasks.push((a, f, ni, trial));
                }
            }
        }
    }
    let rows: Vec<TrialRow> = tasks
        .into_par_iter()
        .map(|task| run_trial(config, &prepared, &fixed, task))
        .collect();

    let constants = prepared
        .tables
        .iter()
        .enumerate()
        .flat_map(|(a, per_fn)| {
            let prepared = &prepared;
            per_fn.iter().enumerate().map(move |(f, t)| {
                let arc = prepared.arcs[a].label().to_string();
                let function = prepared.functions[a][f].label().to_string();
                match t {
                    Ok(t) => ConstantsEntry {
                        arc,
                        function,
                        rows: t.rows.clone(),
                        diam: t.diam,
                        error: None,
                    },
                    Err(e) => ConstantsEntry {
                        arc,
                        function,
                        rows: Vec::new(),
                        diam: f64::NAN,
                        error: Some(e.to_string()),
                    },
                }
            })
        })
        .collect();

    let summary = Summary {
        trials: rows.len(),
        violations: rows.iter().filter(|r| r.error.is_none() && r.ratio > 1.0).count(),
        raw_violations: rows.iter().filter(|r| r.raw_violation).count(),
        failures: rows
            .iter()
            .filter(|r| r.error.is_some() || !r.cross_check_ok)
            .count(),
        max_ratio: rows
            .iter()
            .filter(|r| r.error.is_none())
            .map(|r| r.ratio)
            .fold(0.0, f64::max),
        safety_factor: config.tolerances.safety_factor,
    };
    Ok(VerificationReport {
        schema: SCHEMA_VERSION,
        config: config.clone(),
        constants,
        rows,
        summary,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub arc: String,
    pub function: String,
    pub n: usize,
    pub trials: usize,
    pub product_min: f64,
    pub product_median: f64,
    pub product_max: f64,
    pub sharper_min: f64,
    pub sharper_median: f64,
    pub sharper_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub rows: Vec<SweepRow>,
    pub verification: Summary,
}

impl SweepReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sweep serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                csv_field(&r.arc),
                csv_field(&r.function),
                r.n,
                r.trials,
                num(r.product_min),
                num(r.product_median),
                num(r.product_max),
                num(r.sharper_min),
                num(r.sharper_median),
                num(r.sharper_max)
            );
        }
        out
    }
}

/// `(min, median, max)`; the median of an even count is the mean of the middle pair.
fn stats(mut xs: Vec<f64>) -> (f64, f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN, f64::NAN);
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len();
    let median = if m % 2 == 1 {
        xs[m / 2]
    } else {
        0.5 * (xs[m / 2 - 1] + xs[m / 2])
    };
    (xs[0], median, xs[m - 1])
}

/// Ratio statistics per `(arc, function, n)` from a verification run; errored rows are left out.
pub fn sweep_from_report(report: &VerificationReport) -> SweepReport {
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut groups: Vec<((String, String, usize), Vec<&TrialRow>)> = Vec::new();
    for r in &report.rows {
        let key = (r.arc.clone(), r.function.clone(), r.n);
        match groups.last_mut() {
            Some((k, v)) if *k == key => v.push(r),
            _ => groups.push((key, vec![r])),
        }
    }
    for ((arc, function, n), members) in groups {
        let ok: Vec<&TrialRow> = members.into_iter().filter(|r| r.error.is_none()).collect();
        let (product_min, product_median, product_max) = stats(ok.iter().map(|r| r.ratio).collect());
        let (sharper_min, sharper_median, sharper_max) = stats(ok.iter().map(|r| r.sharper_ratio).collect());
        rows.push(SweepRow {
            arc,
            function,
            n,
            trials: ok.len(),
            product_min,
            product_median,
            product_max,
            sharper_min,
            sharper_median,
            sharper_max,
        });
    }
    SweepReport {
        schema: SCHEMA_VERSION,
        rows,
        verification: report.summary.clone(),
    }
}

pub fn sweep_tightness(config: &ScenarioConfig) -> Result<SweepReport> {
    Ok(sweep_from_report(&run_verification_suite(config)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> ScenarioConfig {
        ScenarioConfig::from_json(json).unwrap()
    }

    #[test]
    fn linear_function_has_no_violations() {
        let cfg = config(r#"{"arcs":["circle","ellipse-arc"],"functions":["z"],"orders":[2],"trials":5,"seed":1,"grids":{"constant_grid":16}}"#);
        let rep = run_verification_suite(&cfg).unwrap();
        assert_eq!(rep.summary.trials, 10);
        assert_eq!(rep.summary.violations, 0);
        assert!(rep.rows.iter().all(|r| r.pass && r.product_bound == 0.0));
    }

    #[test]
    fn rows_follow_task_order() {
        let cfg = config(r#"{"arcs":["segment"],"functions":["exp","sin"],"orders":[2,3],"trials":2,"seed":3,"grids":{"constant_grid":16}}"#);
        let rep = run_verification_suite(&cfg).unwrap();
        let keys: Vec<(String, usize, usize)> =
            rep.rows.iter().map(|r| (r.function.clone(), r.n, r.trial)).collect();
        assert_eq!(keys[0], ("exp".into(), 2, 0));
        assert_eq!(keys[3], ("exp".into(), 3, 1));
        assert_eq!(keys[4], ("sin".into(), 2, 0));
    }

    #[test]
    fn sampled_nodes_respect_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for closed in [false, true] {
            for _ in 0..50 {
                let mut p = sample_params(&mut rng, 7, 0.05, closed).unwrap();
                p.sort_by(f64::total_cmp);
                assert!(circular_gap_ok(&p, 0.05, closed));
            }
        }
        assert!(sample_params(&mut rng, 30, 0.05, false).is_err());
    }

    #[test]
    fn trial_seeds_differ() {
        let a = trial_seed(1, 0, 0, 2, 0);
        assert_ne!(a, trial_seed(1, 0, 0, 2, 1));
        assert_ne!(a, trial_seed(1, 0, 1, 2, 0));
        assert_ne!(a, trial_seed(2, 0, 0, 2, 0));
        assert_eq!(a, trial_seed(1, 0, 0, 2, 0));
    }

    #[test]
    fn csv_uses_fixed_header_and_precision() {
        let cfg = config(r#"{"arcs":["segment"],"functions":["exp"],"orders":[2],"trials":1,"seed":3,"grids":{"constant_grid":16}}"#);
        let csv = run_verification_suite(&cfg).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(ROW_CSV_HEADER));
        let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(fields.len(), 10);
        let mantissa = fields[4].split('e').next().unwrap();
        assert_eq!(mantissa.replace(['.', '-'], "").len(), 17);
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn single_trial_sweep_collapses_statistics() {
        let cfg = config(r#"{"arcs":["half-circle"],"functions":["exp"],"orders":[2,3],"trials":1,"seed":9,"grids":{"constant_grid":16}}"#);
        let sweep = sweep_tightness(&cfg).unwrap();
        for r in &sweep.rows {
            assert_eq!(r.product_min, r.product_median);
            assert_eq!(r.product_median, r.product_max);
            assert!(r.sharper_min >= r.product_min);
        }
    }

    #[test]
    fn stats_of_even_count() {
        assert_eq!(stats(vec![4.0, 1.0, 3.0, 2.0]), (1.0, 2.5, 4.0));
    }
}
