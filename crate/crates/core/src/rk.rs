//! Dormand–Prince 5(4) embedded pair with an I-controller.
//!
//! The right-hand side returns `None` when the state is outside the domain of
//! the vector field (for example a negative base under a fractional power);
//! such trial steps are rejected and retried with a smaller step.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// b - b* (fifth-order weights minus embedded fourth-order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stepper {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_min: f64,
    pub h_max: f64,
}

#[derive(Debug, Clone, Copy)]
pub enum Advance<const D: usize> {
    Accepted { t: f64, y: [f64; D], h_next: f64 },
    /// The step size fell below `h_min` without an acceptable step.
    Underflow { h: f64 },
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    let mut out = *y;
    for i in 0..D {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl Stepper {
    /// One Dormand–Prince step; returns the fifth-order solution and the
    /// scaled error norm.
    pub fn trial<const D: usize, F>(&self, f: &F, t: f64, y: &[f64; D], h: f64) -> Option<([f64; D], f64)>
    where
        F: Fn(f64, &[f64; D]) -> Option<[f64; D]>,
    {
        let k1 = f(t, y)?;
        let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(
            t + C5 * h,
            &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = f(
            t + h,
            &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y5 = axpy(y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y5)?;
        let mut err = 0.0;
        for i in 0..D {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = self.abs_tol + self.rel_tol * y[i].abs().max(y5[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / D as f64).sqrt();
        if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some((y5, err))
    }

    /// Takes one accepted step starting with trial size `h`, never stepping
    /// beyond `t + h_cap`.
    pub fn advance<const D: usize, F>(&self, f: &F, t: f64, y: &[f64; D], h: f64, h_cap: f64) -> Advance<D>
    where
        F: Fn(f64, &[f64; D]) -> Option<[f64; D]>,
    {
        let mut h = h.min(self.h_max).min(h_cap);
        loop {
            if h < self.h_min && h < h_cap {
                return Advance::Underflow { h };
            }
            match self.trial(f, t, y, h) {
                Some((y_new, err)) if err <= 1.0 => {
                    let factor = if err == 0.0 {
                        MAX_FACTOR
                    } else {
                        (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                    };
                    return Advance::Accepted {
                        t: t + h,
                        y: y_new,
                        h_next: (h * factor).min(self.h_max),
                    };
                }
                Some((_, err)) => {
                    h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
                }
                None => h *= 0.25,
            }
        }
    }

    /// Integrates from `t0` to exactly `t1` (forward), returning the final
    /// state and the last suggested step size.
    pub fn integrate_to<const D: usize, F>(
        &self,
        f: &F,
        t0: f64,
        y0: &[f64; D],
        t1: f64,
        h0: f64,
    ) -> Option<([f64; D], f64)>
    where
        F: Fn(f64, &[f64; D]) -> Option<[f64; D]>,
    {
        let mut t = t0;
        let mut y = *y0;
        let mut h = h0;
        while t < t1 {
            let remaining = t1 - t;
            match self.advance(f, t, &y, h, remaining) {
                Advance::Accepted { t: tn, y: yn, h_next } => {
                    // land exactly on t1 when the capped step reached it
                    t = if (t1 - tn).abs() <= 4.0 * f64::EPSILON * t1.abs().max(1.0) { t1 } else { tn };
                    y = yn;
                    h = h_next;
                }
                Advance::Underflow { .. } => return None,
            }
        }
        Some((y, h))
    }
}

/// L-stable Rosenbrock 2(3) pair for autonomous stiff systems, with a
/// forward-difference Jacobian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rosenbrock {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub h_min: f64,
    pub h_max: f64,
}

fn jacobian<const D: usize, F>(f: &F, t: f64, y: &[f64; D], f0: &[f64; D]) -> Option<[[f64; D]; D]>
where
    F: Fn(f64, &[f64; D]) -> Option<[f64; D]>,
{
    let mut jac = [[0.0; D]; D];
    for j in 0..D {
        let dy = f64::EPSILON.sqrt() * y[j].abs().max(1e-30);
        let mut yp = *y;
        yp[j] += dy;
        let fp = f(t, &yp).or_else(|| {
            yp[j] = y[j] - dy;
            None
        });
        let (fp, dy) = match fp {
            Some(v) => (v, dy),
            None => (f(t, &yp)?, -dy),
        };
        for i in 0..D {
            jac[i][j] = (fp[i] - f0[i]) / dy;
        }
    }
    Some(jac)
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn solve<const D: usize>(mut a: [[f64; D]; D], mut b: [f64; D]) -> Option<[f64; D]> {
    for col in 0..D {
        let piv = (col..D).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..D {
            let r = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (dst, src) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= r * src;
            }
            b[row] -= r * b[col];
        }
    }
    let mut x = [0.0; D];
    for row in (0..D).rev() {
        let mut acc = b[row];
        for k in row + 1..D {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

impl Rosenbrock {
    pub fn trial<const D: usize, F>(&self, f: &F, t: f64, y: &[f64; D], h: f64) -> Option<([f64; D], f64)>
    where
        F: Fn(f64, &[f64; D]) -> Option<[f64; D]>,
    {
        let d = 1.0 / (2.0 + std::f64::consts::SQRT_2);
        let e32 = 6.0 + std::f64::consts::SQRT_2;
        let f0 = f(t, y)?;
        let jac = jacobian(f, t, y, &f0)?;
        let mut w = [[0.0; D]; D];
        for i in 0..D {
            for j in 0..D {
                w[i][j] = if i == j { 1.0 } else { 0.0 } - h * d * jac[i][j];
            }
        }
        let k1 = solve(w, f0)?;
        let f1 = f(t + 0.5 * h, &axpy(y, h, &[(0.5, &k1)]))?;
        let mut rhs = [0.0; D];
        for i in 0..D {
            rhs[i] = f1[i] - k1[i];
        }
        let mut k2 = solve(w, rhs)?;
        for i in 0..D {
            k2[i] += k1[i];
        }
        let y_new = axpy(y, h, &[(1.0, &k2)]);
        let f2 = f(t + h, &y_new)?;
        for i in 0..D {
            rhs[i] = f2[i] - e32 * (k2[i] - f1[i]) - 2.0 * (k1[i] - f0[i]);
        }
        let k3 = solve(w, rhs)?;
        let mut err = 0.0;
        for i in 0..D {
            let e = h / 6.0 * (k1[i] - 2.0 * k2[i] + k3[i]);
            let sc = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / D as f64).sqrt();
        if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            return None;
        }
        Some((y_new, err))
    }

    pub fn advance<const D: usize, F>(&self, f: &F, t: f64, y: &[f64; D], h: f64, h_cap: f64) -> Advance<D>
    where
        F: Fn(f64, &[f64; D]) -> Option<[f64; D]>,
    {
        let mut h = h.min(self.h_max).min(h_cap);
        loop {
            if h < self.h_min && h < h_cap {
                return Advance::Underflow { h };
            }
            match self.trial(f, t, y, h) {
                Some((y_new, err)) if err <= 1.0 => {
                    let factor = if err == 0.0 {
                        MAX_FACTOR
                    } else {
                        (SAFETY * err.powf(-1.0 / 3.0)).clamp(MIN_FACTOR, MAX_FACTOR)
                    };
                    return Advance::Accepted { t: t + h, y: y_new, h_next: (h * factor).min(self.h_max) };
                }
                Some((_, err)) => h *= (SAFETY * err.powf(-1.0 / 3.0)).clamp(MIN_FACTOR, 1.0),
                None => h *= 0.25,
            }
        }
    }
}
