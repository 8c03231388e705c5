//! Small derivative-free local maximizers used to polish grid suprema.

/// Nelder–Mead maximization of `f` over the box `[0,1]^2`, starting from `start`
/// with an initial simplex of size `step`. Returns the best point and value seen.
pub fn nelder_mead_max_2d<F>(f: F, start: [f64; 2], step: f64, max_iter: usize) -> ([f64; 2], f64)
where
    F: Fn([f64; 2]) -> f64,
{
    let clamp = |p: [f64; 2]| [p[0].clamp(0.0, 1.0), p[1].clamp(0.0, 1.0)];
    let eval = |p: [f64; 2]| {
        let v = f(p);
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut simplex: Vec<([f64; 2], f64)> = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ]
    .into_iter()
    .map(|p| {
        let p = clamp(p);
        (p, eval(p))
    })
    .collect();

    for _ in 0..max_iter {
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (best, worst) = (simplex[0], simplex[2]);
        let size = (0..2)
            .map(|i| (simplex[1].0[i] - best.0[i]).abs().max((worst.0[i] - best.0[i]).abs()))
            .fold(0.0, f64::max);
        if size < 1e-10 {
            break;
        }
        let centroid = [
            0.5 * (simplex[0].0[0] + simplex[1].0[0]),
            0.5 * (simplex[0].0[1] + simplex[1].0[1]),
        ];
        let along = |s: f64| {
            clamp([
                centroid[0] + s * (worst.0[0] - centroid[0]),
                centroid[1] + s * (worst.0[1] - centroid[1]),
            ])
        };
        let r = along(-1.0);
        let fr = eval(r);
        if fr > best.1 {
            let e = along(-2.0);
            let fe = eval(e);
            simplex[2] = if fe > fr { (e, fe) } else { (r, fr) };
        } else if fr > simplex[1].1 {
            simplex[2] = (r, fr);
        } else {
            let c = along(0.5);
            let fc = eval(c);
            if fc > worst.1 {
                simplex[2] = (c, fc);
            } else {
                for i in 1..3 {
                    let p = clamp([
                        best.0[0] + 0.5 * (simplex[i].0[0] - best.0[0]),
                        best.0[1] + 0.5 * (simplex[i].0[1] - best.0[1]),
                    ]);
                    simplex[i] = (p, eval(p));
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    simplex[0]
}

/// Golden-section maximization of `f` on `[lo, hi]`. Returns `(t, f(t))`.
pub fn golden_max<F>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}
