//! Modified Bessel functions of the second kind, K0 and K1.
//!
//! Small arguments (x <= 2) use the convergent power series built on the
//! I0/I1 series. Larger arguments use Chebyshev expansions of the scaled
//! functions K_n(x) e^x sqrt(x) in the variable 8/x, fitted once at startup
//! from a trapezoidal evaluation of the integral representation
//! K_n(x) = int_0^inf exp(-x cosh t) cosh(n t) dt. The integrand is even
//! and decays double-exponentially, so the trapezoid rule converges to
//! machine precision at modest step sizes.

use once_cell::sync::Lazy;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments past this point underflow to zero in f64.
const X_CUTOFF: f64 = 705.0;

const CHEB_DEGREE: usize = 30;

/// K0(x) for x > 0. Returns +inf at x <= 0 boundary handling is the
/// caller's job; arguments beyond the underflow cutoff return 0.
pub fn bessel_k0(x: f64) -> f64 {
    debug_assert!(x > 0.0, "bessel_k0 requires x > 0");
    if x <= 2.0 {
        k0_series(x)
    } else if x < X_CUTOFF {
        let v = 8.0 / x / 2.0 - 1.0;
        clenshaw(&TABLES.c0, v) * (-x).exp() / x.sqrt()
    } else {
        0.0
    }
}

/// K1(x) for x > 0.
pub fn bessel_k1(x: f64) -> f64 {
    debug_assert!(x > 0.0, "bessel_k1 requires x > 0");
    if x <= 2.0 {
        k1_series(x)
    } else if x < X_CUTOFF {
        let v = 8.0 / x / 2.0 - 1.0;
        clenshaw(&TABLES.c1, v) * (-x).exp() / x.sqrt()
    } else {
        0.0
    }
}

fn i0_series(x: f64) -> f64 {
    let t = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while term > 1e-20 * sum {
        term *= t / (k * k);
        sum += term;
        k += 1.0;
    }
    sum
}

fn i1_series(x: f64) -> f64 {
    let t = x * x / 4.0;
    let mut term = x / 2.0;
    let mut sum = term;
    let mut k = 1.0;
    while term.abs() > 1e-20 * sum.abs() {
        term *= t / (k * (k + 1.0));
        sum += term;
        k += 1.0;
    }
    sum
}

fn k0_series(x: f64) -> f64 {
    let t = x * x / 4.0;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= t / (kf * kf);
        harmonic += 1.0 / kf;
        let add = term * harmonic;
        sum += add;
        if add < 1e-20 * sum.max(1e-300) {
            break;
        }
    }
    -((x / 2.0).ln() + EULER_GAMMA) * i0_series(x) + sum
}

fn k1_series(x: f64) -> f64 {
    let t = x * x / 4.0;
    let mut factor = 1.0; // (x^2/4)^k / (k! (k+1)!)
    let mut h_k = 0.0;
    let mut sum = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            factor *= t / (kf * (kf + 1.0));
            h_k += 1.0 / kf;
        }
        let h_k1 = h_k + 1.0 / (kf + 1.0);
        sum += factor * (-2.0 * EULER_GAMMA + h_k + h_k1);
    }
    (x / 2.0).ln() * i1_series(x) + 1.0 / x - (x / 4.0) * sum
}

/// Trapezoidal quadrature of the integral representation, in the scaled
/// form K_n(x) e^x sqrt(x) so it stays representable for any x. Slow but
/// accurate to machine precision; used only to fit the Chebyshev tables.
fn k_quadrature_scaled(order: u32, x: f64) -> f64 {
    let h = (0.5 / x.sqrt()).min(0.05);
    let t_max = (1.0 + 745.0 / x).acosh();
    let n = (t_max / h) as usize + 2;
    let mut sum = 0.0;
    for i in 0..n {
        let t = i as f64 * h;
        let w = (-x * (t.cosh() - 1.0)).exp() * (order as f64 * t).cosh();
        sum += if i == 0 { 0.5 * w } else { w };
    }
    sum * h * x.sqrt()
}

#[cfg(test)]
fn k_quadrature(order: u32, x: f64) -> f64 {
    k_quadrature_scaled(order, x) * (-x).exp() / x.sqrt()
}

struct ChebTables {
    c0: [f64; CHEB_DEGREE + 1],
    c1: [f64; CHEB_DEGREE + 1],
}

static TABLES: Lazy<ChebTables> = Lazy::new(|| ChebTables {
    c0: fit_scaled(0),
    c1: fit_scaled(1),
});

/// Chebyshev coefficients of phi(v) = K_n(x) e^x sqrt(x) with
/// v = 8/(2x) - 1, covering x in [2, inf). The v = -1 endpoint is the
/// x -> inf limit sqrt(pi/2).
fn fit_scaled(order: u32) -> [f64; CHEB_DEGREE + 1] {
    let n = CHEB_DEGREE;
    let mut node_values = [0.0; CHEB_DEGREE + 1];
    for (j, val) in node_values.iter_mut().enumerate() {
        let v = (PI * j as f64 / n as f64).cos();
        *val = if v <= -1.0 + 1e-14 {
            (PI / 2.0).sqrt()
        } else {
            let x = 8.0 / (2.0 + 2.0 * v);
            k_quadrature_scaled(order, x)
        };
    }
    let mut coeffs = [0.0; CHEB_DEGREE + 1];
    for (k, ck) in coeffs.iter_mut().enumerate() {
        let mut s = 0.5 * (node_values[0] + node_values[n] * (PI * k as f64).cos());
        for (m, fm) in node_values.iter().enumerate().take(n).skip(1) {
            s += fm * (PI * k as f64 * m as f64 / n as f64).cos();
        }
        *ck = 2.0 / n as f64 * s;
    }
    coeffs[0] *= 0.5;
    coeffs[n] *= 0.5;
    coeffs
}

fn clenshaw(coeffs: &[f64], v: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let next = 2.0 * v * b1 - b2 + c;
        b2 = b1;
        b1 = next;
    }
    v * b1 - b2 + coeffs[0]
}
