use std::f64::consts::PI;

use crate::error::{require_positive, Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;

/// Modified Bessel function of the second kind, order one.
pub fn bessel_k1(x: f64) -> Result<f64> {
    require_positive("x", x)?;
    if x <= SERIES_LIMIT {
        Ok(k1_series(x))
    } else {
        Ok(k1_scaled_cf(x)? * (-x).exp())
    }
}

/// `eˣ K₁(x)`, finite for every positive `x`.
pub fn bessel_k1_scaled(x: f64) -> Result<f64> {
    require_positive("x", x)?;
    if x <= SERIES_LIMIT {
        Ok(k1_series(x) * x.exp())
    } else {
        k1_scaled_cf(x)
    }
}

/// `K₁(x) = 1/x + ln(x/2) I₁(x) − (x/4) Σ (ψ(k+1) + ψ(k+2)) (x²/4)^k / (k!(k+1)!)`.
fn k1_series(x: f64) -> f64 {
    let y = 0.25 * x * x;
    let mut term = 1.0; // (x²/4)^k / (k!(k+1)!)
    let mut psi1 = -EULER_GAMMA; // ψ(k+1)
    let mut psi2 = 1.0 - EULER_GAMMA; // ψ(k+2)
    let mut i1 = 0.0;
    let mut digamma_sum = 0.0;
    for k in 0..60 {
        if k > 0 {
            let kf = k as f64;
            term *= y / (kf * (kf + 1.0));
            psi1 += 1.0 / kf;
            psi2 += 1.0 / (kf + 1.0);
        }
        i1 += term;
        digamma_sum += (psi1 + psi2) * term;
        if term < 1e-18 * i1 {
            break;
        }
    }
    let i1 = 0.5 * x * i1;
    1.0 / x + (0.5 * x).ln() * i1 - 0.25 * x * digamma_sum
}

/// Steed's continued fraction for `K₀` and `K₁` at `x > 2`, returned scaled
/// by `eˣ`.
fn k1_scaled_cf(x: f64) -> Result<f64> {
    let a1 = 0.25; // 1/4 − ν² with ν = 0
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            let k0 = (PI / (2.0 * x)).sqrt() / s;
            return Ok(k0 * (x + 0.5 - a1 * h) / x);
        }
    }
    Err(Error::NonConvergence {
        method: "Bessel K continued fraction",
        residual: delh.abs(),
    })
}
