//! Complex roots of small integer polynomials.
//!
//! Repeated roots are removed exactly first (division by `gcd(p, p')` over
//! `Q`), so the floating-point stage only ever sees simple roots.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 500;

type QPoly = Vec<BigRational>;

fn trim(p: &mut QPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn q_rem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db && !r.is_empty() {
        let top = r.len() - 1;
        let c = &r[top] / lead;
        for (i, bc) in b.iter().enumerate() {
            r[top - db + i] -= &c * bc;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

fn q_div_exact(a: &QPoly, b: &QPoly) -> QPoly {
    let db = b.len() - 1;
    let mut r = a.clone();
    let mut quot = vec![BigRational::zero(); a.len() - db];
    for k in (0..quot.len()).rev() {
        let c = &r[k + db] / &b[db];
        for (i, bc) in b.iter().enumerate() {
            r[k + i] -= &c * bc;
        }
        quot[k] = c;
    }
    quot
}

/// `p / gcd(p, p')`, the product of the distinct irreducible factors of `p`.
pub(crate) fn squarefree_part(coeffs: &[i64]) -> Vec<BigRational> {
    let mut p: QPoly = coeffs
        .iter()
        .map(|&c| BigRational::from_integer(BigInt::from(c)))
        .collect();
    trim(&mut p);
    if p.len() <= 2 {
        return p;
    }
    let dp: QPoly = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    let (mut a, mut b) = (p.clone(), dp);
    while !b.is_empty() {
        let r = q_rem(&a, &b);
        a = b;
        b = r;
    }
    if a.len() <= 1 {
        return p;
    }
    q_div_exact(&p, &a)
}

fn horner(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut val = Complex64::zero();
    let mut der = Complex64::zero();
    for c in p.iter().rev() {
        der = der * z + val;
        val = val * z + c;
    }
    (val, der)
}

/// All complex roots of `p` (coefficients constant term first) by
/// Aberth–Ehrlich iteration. Intended for simple roots of low degree.
pub(crate) fn aberth(p: &[f64]) -> Result<Vec<Complex64>> {
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = p[deg];
    let pc: Vec<Complex64> = p.iter().map(|&c| Complex64::new(c / lead, 0.0)).collect();
    let radius = 1.0
        + pc[..deg]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, theta)
        })
        .collect();
    for _ in 0..MAX_ITERATIONS {
        let mut max_step = 0.0f64;
        for k in 0..deg {
            let (val, der) = horner(&pc, z[k]);
            if val.norm() == 0.0 {
                continue;
            }
            let ratio = val / der;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != k)
                .map(|j| Complex64::new(1.0, 0.0) / (z[k] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[k] -= step;
            max_step = max_step.max(step.norm() / z[k].norm().max(1e-300));
        }
        if max_step < 1e-15 {
            // a couple of Newton steps to polish
            for zk in z.iter_mut() {
                for _ in 0..2 {
                    let (val, der) = horner(&pc, *zk);
                    if der.norm() > 0.0 {
                        *zk -= val / der;
                    }
                }
            }
            return Ok(z);
        }
    }
    Err(Error::RootFinderDiverged {
        iterations: MAX_ITERATIONS,
    })
}

/// Distinct complex roots of an integer polynomial, computed after the exact
/// squarefree reduction and the substitution `u = v * scale`.
pub(crate) fn distinct_roots_scaled(coeffs: &[i64], scale: f64) -> Result<Vec<Complex64>> {
    let sqf = squarefree_part(coeffs);
    let scaled: Vec<f64> = sqf
        .iter()
        .enumerate()
        .map(|(i, c)| c.to_f64().unwrap_or(f64::NAN) * scale.powi(i as i32))
        .collect();
    Ok(aberth(&scaled)?
        .into_iter()
        .map(|v| v * scale)
        .collect())
}
