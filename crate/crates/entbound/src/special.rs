//! Gamma-family special functions on the right half plane, as needed by the
//! analytic log-fidelity formulas: digamma, Hurwitz zeta, and polygamma of
//! complex argument.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// B_{2n}/(2n) for the digamma asymptotic series.
const DIGAMMA_COEFFS: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
];

/// Bernoulli numbers B_2, B_4, ..., B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

fn require_right_half_plane(z: Complex64) -> Result<()> {
    if z.re <= 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::OutOfRange(format!(
            "special function argument {z} must have Re z > 0"
        )));
    }
    Ok(())
}

/// Digamma psi(z) for Re z > 0: recurrence shift into Re z >= 10 followed by
/// the asymptotic series. The polygamma series diverges at m = 0, so this is
/// the separate route for that order.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    require_right_half_plane(z)?;
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    while z.re < 10.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let mut res = z.ln() - 0.5 / z;
    let z2 = 1.0 / (z * z);
    let mut p = z2;
    for c in DIGAMMA_COEFFS {
        res -= c * p;
        p *= z2;
    }
    Ok(acc + res)
}

/// Hurwitz zeta zeta(s, z) = sum_k (z+k)^{-s} for real s > 1 and Re z > 0,
/// via Euler-Maclaurin acceleration of the tail.
pub fn hurwitz_zeta(s: f64, z: Complex64) -> Result<Complex64> {
    require_right_half_plane(z)?;
    if s <= 1.0 {
        return Err(Error::OutOfRange(format!("hurwitz_zeta order s = {s} <= 1")));
    }
    // direct terms until the shifted argument is comfortably large
    let n = if z.norm() >= 14.0 {
        0
    } else {
        (14.0 - z.re).ceil().max(0.0) as usize
    };
    let mut head = Complex64::new(0.0, 0.0);
    for k in 0..n {
        head += (z + k as f64).powf(-s);
    }
    let w = z + n as f64;
    let mut tail = w.powf(1.0 - s) / (s - 1.0) + 0.5 * w.powf(-s);
    // Euler-Maclaurin correction: sum_j B_{2j}/(2j)! (s)_{2j-1} w^{-s-2j+1}
    let mut rising = s; // (s)_1
    let mut fact = 2.0f64; // (2j)!
    for (j, b) in BERNOULLI.iter().enumerate() {
        let power = w.powf(-(s + 2.0 * j as f64 + 1.0));
        tail += b / fact * rising * power;
        // advance (s)_{2j-1} -> (s)_{2j+1} and (2j)! -> (2j+2)!
        rising *= (s + 2.0 * j as f64 + 1.0) * (s + 2.0 * j as f64 + 2.0);
        fact *= (2.0 * j as f64 + 3.0) * (2.0 * j as f64 + 4.0);
    }
    Ok(head + tail)
}

/// Polygamma Psi^m(z) = sum_k (-1)^{m+1} m! / (z+k)^{m+1} for integer m >= 1;
/// m = 0 falls back to the digamma route.
pub fn polygamma(m: u32, z: Complex64) -> Result<Complex64> {
    if m == 0 {
        return digamma(z);
    }
    let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
    let mut mfact = 1.0f64;
    for k in 2..=m {
        mfact *= k as f64;
    }
    Ok(sign * mfact * hurwitz_zeta((m + 1) as f64, z)?)
}

/// Polygamma of non-integer positive order nu, with the alternating sign taken
/// on the principal branch: e^{i pi (nu+1)} Gamma(nu+1) zeta(nu+1, z).
/// Used only by the best-effort general-Ohmicity path.
pub fn polygamma_fractional(nu: f64, z: Complex64) -> Result<Complex64> {
    if nu <= 0.0 {
        return Err(Error::OutOfRange(format!(
            "fractional polygamma order nu = {nu} must be positive"
        )));
    }
    let sign = Complex64::new(0.0, std::f64::consts::PI * (nu + 1.0)).exp();
    let gamma = ln_gamma(nu + 1.0).exp();
    Ok(sign * gamma * hurwitz_zeta(nu + 1.0, z)?)
}

/// Log-gamma for positive real argument (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEFFS: [f64; 9] = [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    assert!(x > 0.0, "ln_gamma needs a positive argument, got {x}");
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = COEFFS[0];
    for (i, c) in COEFFS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}
