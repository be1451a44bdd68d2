use num_complex::Complex64;

use super::gamma::log_gamma;
use crate::error::{invalid, Error, Result};

const SERIES_MAX_TERMS: usize = 200_000;
const CF_MAX_TERMS: usize = 20_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Lower incomplete gamma `γ(s, z) = ∫₀^z u^{s−1} e^{−u} du` along the
/// straight ray from 0, with the principal branch of `u^{s−1}`.
pub fn lower_incomplete_gamma(s: Complex64, z: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        check_s(s)?;
        if s.re > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(invalid("z", "γ(s, 0) has no limit for Re s ≤ 0"));
    }
    let scaled = lower_gamma_scaled(s, z)?;
    Ok((s * z.ln()).exp() * scaled)
}

/// `z^{−s} γ(s, z)`, an entire function of `z` equal to `1/s` at the origin.
/// This is the form the phase integrals need: it stays bounded where
/// `z^s` alone would overflow or lose its branch.
pub fn lower_gamma_scaled(s: Complex64, z: Complex64) -> Result<Complex64> {
    check_s(s)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(invalid("z", format!("must be finite, got {z}")));
    }
    if z == Complex64::new(0.0, 0.0) {
        return Ok(1.0 / s);
    }
    let use_series = z.norm() < s.norm() + 4.0 || (z.re < 0.0 && z.im.abs() < -0.5 * z.re);
    if use_series {
        series(s, z)
    } else {
        match continued_fraction(s, z) {
            Ok(v) => Ok(v),
            Err(cf_err) => series(s, z).map_err(|_| cf_err),
        }
    }
}

fn check_s(s: Complex64) -> Result<()> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(invalid("s", format!("must be finite, got {s}")));
    }
    if s.im == 0.0 && s.re <= 0.0 && s.re == s.re.floor() {
        return Err(invalid("s", format!("must not be a non-positive integer, got {}", s.re)));
    }
    Ok(())
}

/// `e^{−z} Σ zⁿ / (s (s+1) … (s+n))`.
fn series(s: Complex64, z: Complex64) -> Result<Complex64> {
    let mut term = 1.0 / s;
    let mut sum = term;
    for n in 1..SERIES_MAX_TERMS {
        term *= z / (s + n as f64);
        sum += term;
        if term.norm() <= EPS * sum.norm() && (n as f64) > z.norm() - s.re {
            return Ok((-z).exp() * sum);
        }
    }
    Err(Error::NonConvergence {
        method: "incomplete gamma power series",
        residual: term.norm() / sum.norm(),
    })
}

/// `Γ(s) z^{−s} − e^{−z}·CF`, with the modified Lentz evaluation of the
/// Legendre continued fraction for `z^{−s} e^{z} Γ(s, z)`.
fn continued_fraction(s: Complex64, z: Complex64) -> Result<Complex64> {
    let tiny = Complex64::new(TINY, 0.0);
    let mut b = z + 1.0 - s;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut residual = f64::INFINITY;
    for i in 1..CF_MAX_TERMS {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = tiny;
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        residual = (del - 1.0).norm();
        if residual < EPS {
            let complete = (log_gamma(s)? - s * z.ln()).exp();
            return Ok(complete - (-z).exp() * h);
        }
    }
    Err(Error::NonConvergence {
        method: "incomplete gamma continued fraction",
        residual,
    })
}
