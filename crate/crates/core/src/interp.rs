//! Small numerical helpers: finite-difference weights on arbitrary grids,
//! Hermite interpolation, golden-section search and adaptive Simpson.

/// Weights `c` with `Σ c_j g(x_j) ≈ g'(at)`, from differentiating the
/// Lagrange basis.
pub fn derivative_weights(nodes: &[f64], at: f64) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|j| {
            let mut total = 0.0;
            for k in (0..n).filter(|&k| k != j) {
                let mut term = 1.0 / (nodes[j] - nodes[k]);
                for l in (0..n).filter(|&l| l != j && l != k) {
                    term *= (at - nodes[l]) / (nodes[j] - nodes[l]);
                }
                total += term;
            }
            total
        })
        .collect()
}

/// Derivative at `xs[i]` of samples `ys`, from a centered five-point stencil
/// when available and three points otherwise.
pub fn centered_derivative(xs: &[f64], ys: &[f64], i: usize) -> f64 {
    let n = xs.len();
    let (lo, hi) = if i >= 2 && i + 2 < n {
        (i - 2, i + 2)
    } else if i >= 1 && i + 1 < n {
        (i - 1, i + 1)
    } else if i == 0 {
        (0, 2.min(n - 1))
    } else {
        (n.saturating_sub(3), n - 1)
    };
    let w = derivative_weights(&xs[lo..=hi], xs[i]);
    w.iter().zip(&ys[lo..=hi]).map(|(c, y)| c * y).sum()
}

/// Cubic Hermite value on `[x0, x1]` from end values and slopes.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
    let h10 = t * (1.0 - t) * (1.0 - t);
    let h01 = t * t * (3.0 - 2.0 * t);
    let h11 = t * t * (t - 1.0);
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Fritsch–Carlson limiting of end slopes against the secant, so the cubic
/// stays monotone on the interval.
pub fn limit_slopes(secant: f64, d0: f64, d1: f64) -> (f64, f64) {
    if secant == 0.0 {
        return (0.0, 0.0);
    }
    let mut a = d0 / secant;
    let mut b = d1 / secant;
    if a < 0.0 {
        a = 0.0;
    }
    if b < 0.0 {
        b = 0.0;
    }
    let r = a * a + b * b;
    if r > 9.0 {
        let s = 3.0 / r.sqrt();
        a *= s;
        b *= s;
    }
    (a * secant, b * secant)
}

/// Index `i` with `xs[i] <= x < xs[i+1]`, clamped to the valid range.
pub fn locate(xs: &[f64], x: f64) -> usize {
    match xs.partition_point(|&v| v <= x) {
        0 => 0,
        i if i >= xs.len() => xs.len() - 2,
        i => i - 1,
    }
}

/// Minimizes a unimodal function on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
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
    0.5 * (a + b)
}

/// Adaptive Simpson quadrature; `None` if the recursion depth is exhausted
/// before the tolerance is met.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Option<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if diff.abs() <= 15.0 * tol {
        return Some(left + right + diff / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Some(l + r)
}
