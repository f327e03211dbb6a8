//! Dependency-free special functions used as validation oracles: the gamma
//! function (Lanczos), Bessel functions of fractional order (power series
//! with a large-argument asymptotic branch), and the scaled imaginary error
//! function (the antiderivative of exp(t^2)).

use crate::error::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Euler-Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest Bessel order the implementation is certified for.
const MAX_ORDER: f64 = 2.0;

/// Series/asymptotic switch point for the Bessel functions.
const ASYMPTOTIC_SWITCH: f64 = 12.0;

// Lanczos coefficients, g = 7, n = 9 (the GSL set).
const LANCZOS: [f64; 9] = [
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

fn is_non_positive_integer(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

/// Gamma function via the Lanczos approximation with reflection for
/// arguments below one half.
pub fn gamma(x: f64) -> Result<f64> {
    if is_non_positive_integer(x) {
        return Err(Error::GammaPole { x });
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma_unchecked(1.0 - x));
    }
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + 7.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

/// 1/Gamma(x); zero at the poles, so Bessel series terms vanish there.
fn recip_gamma(x: f64) -> f64 {
    if is_non_positive_integer(x) {
        0.0
    } else {
        1.0 / gamma_unchecked(x)
    }
}

fn check_order(nu: f64) -> Result<()> {
    if !nu.is_finite() || nu.abs() > MAX_ORDER {
        return Err(Error::UnsupportedArgument {
            reason: format!("Bessel order {nu} outside supported range |nu| <= {MAX_ORDER}"),
        });
    }
    Ok(())
}

/// Bessel function of the first kind J_nu(w) for |nu| <= 2 and w >= 0.
pub fn bessel_j(nu: f64, w: f64) -> Result<f64> {
    check_order(nu)?;
    if !(w >= 0.0) {
        return Err(Error::UnsupportedArgument {
            reason: format!("J_nu requires w >= 0, got {w}"),
        });
    }
    // Negative integer orders via the parity identity J_{-n} = (-1)^n J_n.
    if nu < 0.0 && nu.fract() == 0.0 {
        let n = -nu;
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        return Ok(sign * bessel_j(n, w)?);
    }
    if w == 0.0 {
        if nu == 0.0 {
            return Ok(1.0);
        }
        if nu > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::UnsupportedArgument {
            reason: format!("J_nu diverges at w = 0 for negative order {nu}"),
        });
    }
    if w <= ASYMPTOTIC_SWITCH {
        Ok(bessel_j_series(nu, w))
    } else {
        Ok(bessel_asymptotic(nu, w).0)
    }
}

/// Bessel function of the second kind Y_nu(w) for |nu| <= 2 and w > 0.
///
/// Non-integer orders use the reflection formula; integer orders use the
/// logarithmic series (or the two-term recurrence beyond order one).
pub fn bessel_y(nu: f64, w: f64) -> Result<f64> {
    check_order(nu)?;
    if !(w > 0.0) {
        return Err(Error::UnsupportedArgument {
            reason: format!("Y_nu requires w > 0, got {w}"),
        });
    }
    if nu.fract() == 0.0 {
        if nu < 0.0 {
            let n = -nu;
            let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(sign * bessel_y(n, w)?);
        }
        if w > ASYMPTOTIC_SWITCH {
            return Ok(bessel_asymptotic(nu, w).1);
        }
        let y0 = bessel_y_integer_series(0, w);
        if nu == 0.0 {
            return Ok(y0);
        }
        let y1 = bessel_y_integer_series(1, w);
        if nu == 1.0 {
            return Ok(y1);
        }
        // Y_2 from the recurrence Y_{n+1} = (2n/w) Y_n - Y_{n-1}.
        Ok(2.0 / w * y1 - y0)
    } else {
        if w > ASYMPTOTIC_SWITCH {
            return Ok(bessel_asymptotic(nu, w).1);
        }
        let jp = bessel_j_series(nu, w);
        let jm = bessel_j_series(-nu, w);
        Ok((jp * (nu * PI).cos() - jm) / (nu * PI).sin())
    }
}

/// Ascending power series for J_nu, adequate for w up to the switch point.
fn bessel_j_series(nu: f64, w: f64) -> f64 {
    let half = 0.5 * w;
    let prefactor = half.powf(nu);
    let q = -half * half;
    let mut term = recip_gamma(nu + 1.0);
    let mut sum = term;
    for k in 1..300 {
        let kf = k as f64;
        let denom = kf * (nu + kf);
        if denom == 0.0 {
            // crossing a pole of the gamma in the denominator: restart the
            // running term from the explicit formula
            term = recip_gamma(kf + 1.0) * recip_gamma(nu + kf + 1.0) * q.powi(k);
        } else {
            term *= q / denom;
        }
        let next = sum + term;
        if next == sum {
            break;
        }
        sum = next;
    }
    prefactor * sum
}

/// Logarithmic series for integer-order Y_n, n in {0, 1}.
fn bessel_y_integer_series(n: usize, w: f64) -> f64 {
    let half = 0.5 * w;
    let jn = bessel_j_series(n as f64, w);
    let log_term = 2.0 / PI * half.ln() * jn;

    // Finite sum of the singular part.
    let mut singular = 0.0;
    if n > 0 {
        let mut factorial = 1.0; // (n-k-1)! running value for k = 0 is (n-1)!
        for j in 1..n {
            factorial *= j as f64;
        }
        let mut kfact = 1.0;
        let mut power = half.powi(-(n as i32));
        for k in 0..n {
            singular += factorial / kfact * power;
            if k + 1 < n {
                factorial /= (n - k - 1) as f64;
                kfact *= (k + 1) as f64;
                power *= half * half;
            }
        }
        singular /= PI;
    }

    // Regular part with digamma weights.
    let mut psi_k = -EULER_GAMMA; // psi(1)
    let mut psi_nk = -EULER_GAMMA; // psi(n+1)
    for j in 1..=n {
        psi_nk += 1.0 / j as f64;
    }
    let mut kfact = 1.0;
    let mut nkfact = 1.0;
    for j in 1..=n {
        nkfact *= j as f64;
    }
    let mut power = half.powi(n as i32);
    let q = -half * half;
    let mut regular = (psi_k + psi_nk) / (kfact * nkfact) * power;
    for k in 1..300 {
        let kf = k as f64;
        psi_k += 1.0 / kf;
        psi_nk += 1.0 / (n as f64 + kf);
        kfact *= kf;
        nkfact *= n as f64 + kf;
        power *= q;
        let term = (psi_k + psi_nk) / (kfact * nkfact) * power;
        let next = regular + term;
        if next == regular {
            break;
        }
        regular = next;
    }
    regular /= PI;

    log_term - singular - regular
}

/// Hankel large-argument expansion; returns (J_nu, Y_nu). Terms are summed
/// to optimal truncation.
fn bessel_asymptotic(nu: f64, w: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let chi = w - (0.5 * nu + 0.25) * PI;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 0..40 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            term *= (mu - odd * odd) / (k as f64 * 8.0 * w);
        }
        if term.abs() > prev_abs {
            break; // divergent tail of the asymptotic series
        }
        prev_abs = term.abs();
        let phase = k % 4;
        match phase {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if term.abs() < 1e-18 {
            break;
        }
    }
    let amp = (2.0 / (PI * w)).sqrt();
    (
        amp * (p * chi.cos() - q * chi.sin()),
        amp * (p * chi.sin() + q * chi.cos()),
    )
}

/// Zero-energy mode of the potential V(z) = -z*z built from quarter-order
/// Bessel functions: sqrt(z) * (c1 * J_{1/4}(z^2/2) + c2 * Y_{1/4}(z^2/2)).
pub fn bessel_zero_mode(z: f64, c1: f64, c2: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::UnsupportedArgument {
            reason: format!("the quarter-order mode requires z > 0, got {z}"),
        });
    }
    let w = 0.5 * z * z;
    let mut value = 0.0;
    if c1 != 0.0 {
        value += c1 * bessel_j(0.25, w)?;
    }
    if c2 != 0.0 {
        value += c2 * bessel_y(0.25, w)?;
    }
    Ok(z.sqrt() * value)
}

/// z-derivative of [`bessel_zero_mode`], via F'(w) = (F_{nu-1} - F_{nu+1})/2.
pub fn bessel_zero_mode_derivative(z: f64, c1: f64, c2: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::UnsupportedArgument {
            reason: format!("the quarter-order mode requires z > 0, got {z}"),
        });
    }
    let w = 0.5 * z * z;
    let sqrt_z = z.sqrt();
    let mut value = 0.0;
    if c1 != 0.0 {
        let f = bessel_j(0.25, w)?;
        let df = 0.5 * (bessel_j(-0.75, w)? - bessel_j(1.25, w)?);
        value += c1 * (f / (2.0 * sqrt_z) + sqrt_z * z * df);
    }
    if c2 != 0.0 {
        let f = bessel_y(0.25, w)?;
        let df = 0.5 * (bessel_y(-0.75, w)? - bessel_y(1.25, w)?);
        value += c2 * (f / (2.0 * sqrt_z) + sqrt_z * z * df);
    }
    Ok(value)
}

/// Antiderivative of exp(t^2) from 0 to x, by its everywhere-convergent
/// power series: sum of x^(2n+1) / (n! (2n+1)). Equals (sqrt(pi)/2) erfi(x).
pub fn erfi_scaled(x: f64) -> Result<f64> {
    if x.abs() > 3.0 {
        return Err(Error::UnsupportedArgument {
            reason: format!(
                "erfi_scaled supports |x| <= 3 (got {x}); integrate exp(t^2) piecewise instead"
            ),
        });
    }
    let x2 = x * x;
    let mut power = x;
    let mut fact = 1.0;
    let mut sum = x;
    for n in 1..200 {
        power *= x2;
        fact *= n as f64;
        let term = power / (fact * (2 * n + 1) as f64);
        let next = sum + term;
        if next == sum {
            break;
        }
        sum = next;
    }
    Ok(sum)
}
