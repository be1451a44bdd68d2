use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Below this |Im z| the left half-plane goes through reflection; above it
/// the upward recurrence is both accurate and branch-continuous.
const REFLECTION_MAX_IM: f64 = 7.0;

/// Principal branch of `ln Γ(z)`, continuous off the negative real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(invalid("z", format!("must be finite, got {z}")));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.floor() {
        return Err(Error::Pole(z.re));
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        return lanczos(z);
    }
    if z.im.abs() > REFLECTION_MAX_IM {
        // ln Γ(z) = ln Γ(z + n) − Σ ln(z + j); each principal log stays on
        // one side of the cut, so the sum reproduces the principal branch.
        let n = (0.5 - z.re).ceil() as usize;
        let mut acc = lanczos(z + n as f64);
        for j in 0..n {
            acc -= (z + j as f64).ln();
        }
        return acc;
    }
    // Γ(z)Γ(1−z) = π / sin(πz); the 2πi multiple keeps the branch principal.
    let turns = (0.5 * z.re + 0.25).floor();
    let sign = if z.im.is_sign_negative() { -1.0 } else { 1.0 };
    let shift = Complex64::new(LN_PI, sign * 2.0 * PI * turns);
    shift - sin_pi(z).ln() - lanczos(1.0 - z)
}

fn sin_pi(z: Complex64) -> Complex64 {
    // Reduce the real part first so large |Re z| keeps full accuracy.
    let r = z.re - 2.0 * (0.5 * z.re).round();
    (Complex64::new(r, z.im) * PI).sin()
}

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    log_gamma(z).map(|l| l.exp())
}
