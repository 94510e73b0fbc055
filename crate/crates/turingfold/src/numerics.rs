//! Shared numerical utilities: exponential-integrator phi functions, a complex
//! cubic root solver, damped Newton iteration, finite-difference helpers, and
//! fixed-significant-digit formatting for text output.

use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Format a finite value with a fixed number of significant digits, using
/// plain decimal notation in a wide range of magnitudes and scientific
/// notation outside it. Deterministic across runs.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.*e}", sig - 1, x);
    let (_, exp) = s.split_once('e').expect("exponential format");
    let e: i32 = exp.parse().expect("exponent parse");
    if e >= -4 && e < 16 {
        let decimals = (sig as i32 - 1 - e).max(0) as usize;
        format!("{:.*}", decimals, x)
    } else {
        s
    }
}

const PHI_TAYLOR_TERMS: usize = 25;

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// phi_j(z) evaluated by a 25-term Taylor series for |z| < 0.5 and by the
/// expm1-based closed form otherwise; phi_1(z) = (e^z - 1)/z etc.
fn phi_shifted(shift: usize, z: f64) -> f64 {
    if z.abs() < 0.5 {
        let mut acc = 0.0;
        for n in (0..PHI_TAYLOR_TERMS).rev() {
            acc = acc * z + 1.0 / factorial(n + shift);
        }
        acc
    } else {
        match shift {
            1 => z.exp_m1() / z,
            2 => (z.exp_m1() - z) / (z * z),
            3 => (z.exp_m1() - z - 0.5 * z * z) / (z * z * z),
            _ => unreachable!("phi order not used"),
        }
    }
}

pub fn phi1(z: f64) -> f64 {
    phi_shifted(1, z)
}
pub fn phi2(z: f64) -> f64 {
    phi_shifted(2, z)
}
pub fn phi3(z: f64) -> f64 {
    phi_shifted(3, z)
}

/// All roots of the monic cubic z^3 + a2 z^2 + a1 z + a0 with complex
/// coefficients (Cardano with a cancellation-aware cube-root choice, polished
/// by one Newton step per root).
pub fn cubic_roots(a2: Complex64, a1: Complex64, a0: Complex64) -> [Complex64; 3] {
    let third = Complex64::new(1.0 / 3.0, 0.0);
    let p = a1 - a2 * a2 * third;
    let q = a2 * a2 * a2 * Complex64::new(2.0 / 27.0, 0.0) - a2 * a1 * third + a0;
    let shift = -a2 * third;
    let mut roots = if p.norm() == 0.0 && q.norm() == 0.0 {
        [shift; 3]
    } else {
        let half_q = q * 0.5;
        let disc = (half_q * half_q + p * p * p / 27.0).sqrt();
        let u1 = -half_q + disc;
        let u2 = -half_q - disc;
        let u = if u1.norm() >= u2.norm() { u1 } else { u2 };
        let c = u.powf(1.0 / 3.0);
        let omega = Complex64::new(-0.5, 0.5 * 3.0_f64.sqrt());
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let mut ck = c;
        for root in &mut out {
            *root = ck - p / (ck * 3.0) + shift;
            ck *= omega;
        }
        out
    };
    // one Newton polish step on the original cubic; near a multiple root both
    // f and f' are roundoff-level, so only accept a step that reduces |f|
    let eval = |z: Complex64| ((z + a2) * z + a1) * z + a0;
    for r in &mut roots {
        let f = eval(*r);
        let df = (*r * 3.0 + a2 * 2.0) * *r + a1;
        if df.norm() > 0.0 {
            let step = f / df;
            if step.norm().is_finite() {
                let trial = *r - step;
                if eval(trial).norm() < f.norm() {
                    *r = trial;
                }
            }
        }
    }
    roots
}

/// Finite-difference step scale h = 1e-6 * max(1, |x|) for first derivatives.
pub fn fd_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Wider step scale (~1e-4) for second-order differences, where the 1/h²
/// amplification of rounding error dominates over truncation.
pub fn fd_step2(x: f64) -> f64 {
    fd_step(x).sqrt() * 1e-1
}

/// Central finite-difference first derivative of a scalar function.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = fd_step(x);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Central finite-difference second derivative of a scalar function.
pub fn central_diff2<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = fd_step2(x);
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Central finite-difference Jacobian of a vector map.
pub fn fd_jacobian<F: Fn(&DVector<f64>) -> DVector<f64>>(f: F, x: &DVector<f64>) -> DMatrix<f64> {
    let n = x.len();
    let f0 = f(x);
    let m = f0.len();
    let mut jac = DMatrix::zeros(m, n);
    for j in 0..n {
        let h = fd_step(x[j]);
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;
        let fp = f(&xp);
        let fm = f(&xm);
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Damped (backtracking line-search) Newton iteration for F(x) = 0.
pub fn newton_damped<F, J>(
    f: F,
    jac: J,
    x0: &DVector<f64>,
    tol: f64,
    max_iter: usize,
    context: &str,
) -> Result<DVector<f64>>
where
    F: Fn(&DVector<f64>) -> DVector<f64>,
    J: Fn(&DVector<f64>) -> DMatrix<f64>,
{
    let mut x = x0.clone();
    let mut r = f(&x);
    let mut rnorm = r.norm();
    for iter in 0..max_iter {
        if !rnorm.is_finite() {
            return Err(Error::NoConvergence {
                context: context.to_string(),
                iterations: iter,
                residual: rnorm,
            });
        }
        if rnorm < tol {
            return Ok(x);
        }
        let j = jac(&x);
        let delta = match j.clone().lu().solve(&(-&r)) {
            Some(d) => d,
            None => {
                // fall back to a least-squares step for a (near-)singular Jacobian
                let svd = j.svd(true, true);
                svd.solve(&(-&r), 1e-13).map_err(|_| Error::NoConvergence {
                    context: format!("{context}: singular Jacobian"),
                    iterations: iter,
                    residual: rnorm,
                })?
            }
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let xt = &x + &delta * lambda;
            let rt = f(&xt);
            let rtn = rt.norm();
            if rtn.is_finite() && rtn < rnorm {
                x = xt;
                r = rt;
                rnorm = rtn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NoConvergence {
                context: format!("{context}: line search stalled"),
                iterations: iter,
                residual: rnorm,
            });
        }
    }
    if rnorm < tol {
        Ok(x)
    } else {
        Err(Error::NoConvergence {
            context: context.to_string(),
            iterations: max_iter,
            residual: rnorm,
        })
    }
}

/// Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) must have
/// opposite signs.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64, context: &str) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket {
            context: context.to_string(),
            lo,
            hi,
        });
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() < tol {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section maximization of f on [a, b]; returns (argmax, max).
pub fn golden_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc > fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
