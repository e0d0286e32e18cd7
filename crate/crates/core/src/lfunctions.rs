//! L-polynomials of quadratic characters, their completed forms, values at
//! `s = 1`, short Euler products and the arithmetic functions used by the
//! moment and resonator computations.
//!
//! For squarefree monic `D`, `L(u, chi_D) = sum_n c_n u^n` with
//! `c_n = sum_{f in M_n} chi_D(f)`; `c_n = 0` once `n >= deg D`. Removing the
//! trivial zero `(1 - u)^lambda` leaves `L*(u)` of degree `2g`, and
//! `L(1, chi_D)` means the value at `u = 1/q`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::characters::{char_sum_over_mn, PrimeCharacters};
use crate::error::{Error, Result};
use crate::poly::{FactoredPoly, Fq, Poly};
use crate::roots;

/// Default tolerance for `| |u_j| - q^(-1/2) |`.
pub const RH_TOLERANCE: f64 = 1e-8;

/// A completed L-function record for one squarefree `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LData {
    pub q: u32,
    pub d: Poly,
    /// `c_0, ..., c_{deg D - 1}`.
    pub coeffs: Vec<i64>,
    pub lambda: u32,
    pub genus: usize,
    /// Coefficients `a_0, ..., a_{2g}` of `L*(u)`.
    pub star_coeffs: Vec<i64>,
    pub value_at_one: BigRational,
}

fn check_squarefree(fq: Fq, d: &Poly) -> Result<()> {
    if !d.is_monic() {
        return Err(Error::NotMonic("L-function modulus"));
    }
    if d.deg() == 0 {
        return Err(Error::InvalidArgument(
            "L-function modulus must have positive degree".into(),
        ));
    }
    if !fq.is_squarefree(d)? {
        return Err(Error::NotSquarefree(d.to_string()));
    }
    Ok(())
}

/// Multiplies the power series `c` (truncated to its length) by
/// `(1 - chi u^deg)^(-1)`.
fn apply_euler_factor(c: &mut [i64], chi: i8, deg: usize) {
    if chi == 0 || deg >= c.len() {
        return;
    }
    let chi = chi as i64;
    for k in deg..c.len() {
        c[k] += chi * c[k - deg];
    }
}

/// `c_0, ..., c_{len-1}` from the Euler product over primes of degree `< len`.
fn euler_series(pc: &PrimeCharacters, d: &Poly, len: usize) -> Result<Vec<i64>> {
    if len > 1 && pc.max_degree() < len - 1 {
        return Err(Error::TableTooSmall {
            needed: len - 1,
            have: pc.max_degree(),
        });
    }
    let mut c = vec![0i64; len];
    c[0] = 1;
    let count = pc.count_up_to(len.saturating_sub(1));
    for i in 0..count {
        apply_euler_factor(&mut c, pc.chi(d, i), pc.prime(i).deg());
    }
    Ok(c)
}

/// Coefficients `c_0..c_{deg D - 1}` via the Euler product over all primes of
/// degree `< deg D`.
pub fn l_coefficients(pc: &PrimeCharacters, d: &Poly) -> Result<Vec<i64>> {
    check_squarefree(pc.field(), d)?;
    euler_series(pc, d, d.deg())
}

/// Coefficients by direct character sums over `M_n`; the reference route.
pub fn l_coefficients_direct(fq: Fq, d: &Poly) -> Result<Vec<i64>> {
    check_squarefree(fq, d)?;
    (0..d.deg()).map(|n| char_sum_over_mn(fq, d, n)).collect()
}

/// `lambda` and `g` for a modulus of degree `deg_d >= 1`.
pub fn lambda_genus(deg_d: usize) -> (u32, usize) {
    let lambda = u32::from(deg_d % 2 == 0);
    (lambda, (deg_d - 1 - lambda as usize) / 2)
}

impl LData {
    /// Completes a coefficient vector: divides out `(1 - u)^lambda` exactly and
    /// evaluates at `u = 1/q`.
    pub fn from_coefficients(fq: Fq, d: &Poly, coeffs: Vec<i64>) -> Result<Self> {
        let deg_d = d.deg();
        if coeffs.len() != deg_d {
            return Err(Error::InvalidArgument(format!(
                "expected {deg_d} coefficients, got {}",
                coeffs.len()
            )));
        }
        let (lambda, genus) = lambda_genus(deg_d);
        let mut star = coeffs.clone();
        for _ in 0..lambda {
            // synthetic division by (1 - u): a_i = sum_{j <= i} c_j
            let mut acc = 0i64;
            for s in star.iter_mut() {
                acc += *s;
                *s = acc;
            }
            if star.pop() != Some(0) {
                return Err(Error::Inconsistency(format!(
                    "L(u, chi_D) for D = {d} does not vanish at u = 1"
                )));
            }
        }
        debug_assert_eq!(star.len(), 2 * genus + 1);

        let q = BigInt::from(fq.q());
        let top = deg_d - 1;
        let mut num = BigInt::zero();
        for (n, &c) in coeffs.iter().enumerate() {
            num += BigInt::from(c) * q.pow((top - n) as u32);
        }
        let value_at_one = BigRational::new(num, q.pow(top as u32));

        Ok(Self {
            q: fq.q(),
            d: d.clone(),
            coeffs,
            lambda,
            genus,
            star_coeffs: star,
            value_at_one,
        })
    }
}

/// Full L-data using the Euler-product coefficients.
pub fn completed_l(pc: &PrimeCharacters, d: &Poly) -> Result<LData> {
    let coeffs = l_coefficients(pc, d)?;
    LData::from_coefficients(pc.field(), d, coeffs)
}

/// L-data from only the primes of degree `<= g`: computes `a_0..a_g` and
/// fills the rest of `L*` from the functional equation. This is the fast path
/// for large scans; [`completed_l`] is the independent full computation.
pub fn completed_l_symmetric(pc: &PrimeCharacters, d: &Poly) -> Result<LData> {
    let fq = pc.field();
    check_squarefree(fq, d)?;
    let deg_d = d.deg();
    let (lambda, genus) = lambda_genus(deg_d);
    let head = euler_series(pc, d, genus + 1)?;
    let mut star = vec![0i64; 2 * genus + 1];
    let mut acc = 0i64;
    for (i, &c) in head.iter().enumerate() {
        acc = if lambda == 1 { acc + c } else { c };
        star[i] = acc;
    }
    let q = fq.q() as i64;
    for i in 0..genus {
        star[2 * genus - i] = q.pow((genus - i) as u32) * star[i];
    }
    let mut coeffs = star.clone();
    if lambda == 1 {
        coeffs.push(0);
        for k in (1..coeffs.len()).rev() {
            coeffs[k] -= coeffs[k - 1];
        }
    }
    LData::from_coefficients(fq, d, coeffs)
}

/// Checks `a_{2g-i} = q^(g-i) a_i` for every `0 <= i <= 2g`, the coefficient
/// form of `L*(u) = (q u^2)^g L*(1/(q u))`.
pub fn verify_functional_equation(l: &LData) -> bool {
    let g = l.genus as i64;
    let q = l.q as i128;
    if l.star_coeffs.len() != 2 * l.genus + 1 {
        return false;
    }
    (0..=2 * g).all(|i| {
        let lhs = l.star_coeffs[(2 * g - i) as usize] as i128;
        let rhs = l.star_coeffs[i as usize] as i128;
        let e = g - i;
        if e >= 0 {
            lhs == q.pow(e as u32) * rhs
        } else {
            lhs * q.pow((-e) as u32) == rhs
        }
    })
}

/// Numerically checks that every root of `L*` lies on `|u| = q^(-1/2)`.
pub fn verify_rh_zeros(l: &LData, tol: f64) -> Result<bool> {
    Ok(max_rh_deviation(l)? <= tol)
}

/// `max_j | |u_j| - q^(-1/2) |` over the roots of `L*` (0 when `g = 0`).
pub fn max_rh_deviation(l: &LData) -> Result<f64> {
    if l.genus == 0 && l.star_coeffs.len() == 1 {
        return Ok(0.0);
    }
    let radius = (l.q as f64).powf(-0.5);
    let roots = roots::distinct_roots_scaled(&l.star_coeffs, radius)?;
    Ok(roots
        .iter()
        .map(|u| (u.norm() - radius).abs())
        .fold(0.0, f64::max))
}

pub fn l_value_one(l: &LData) -> &BigRational {
    &l.value_at_one
}

/// `prod_{deg P <= y} (1 - chi(P)/|P|)^(-1)` given the character values of the
/// covered primes; `chis[i]` pairs with `pc.prime(i)`.
pub fn short_euler_from_chis(pc: &PrimeCharacters, chis: &[i8], y: usize) -> BigRational {
    let fq = pc.field();
    let count = pc.count_up_to(y).min(chis.len());
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (i, &chi) in chis.iter().enumerate().take(count) {
        if chi == 0 {
            continue;
        }
        let norm = BigInt::from(pc.prime(i).norm(fq));
        // (1 - chi/|P|)^(-1) = |P| / (|P| - chi)
        den *= &norm - BigInt::from(chi);
        num *= norm;
    }
    BigRational::new(num, den)
}

/// Short Euler product `L(1, chi_D; y)`, exact.
pub fn short_euler_l(pc: &PrimeCharacters, d: &Poly, y: usize) -> Result<BigRational> {
    if y > pc.max_degree() {
        return Err(Error::TableTooSmall {
            needed: y,
            have: pc.max_degree(),
        });
    }
    let chis = pc.chi_prefix(d, pc.count_up_to(y));
    Ok(short_euler_from_chis(pc, &chis, y))
}

fn to_positive_integer(x: &BigRational, what: &str, d: &Poly) -> Result<BigInt> {
    if !x.is_integer() || !x.is_positive() {
        return Err(Error::Inconsistency(format!(
            "{what} for D = {d} is {x}, not a positive integer"
        )));
    }
    Ok(x.to_integer())
}

/// `h_D = q^g L(1, chi_D)` for odd `deg D`.
pub fn class_number_odd(l: &LData) -> Result<BigInt> {
    if l.d.deg() % 2 == 0 {
        return Err(Error::InvalidArgument(
            "class_number_odd needs odd deg D".into(),
        ));
    }
    let scale = BigRational::from_integer(BigInt::from(l.q).pow(l.genus as u32));
    to_positive_integer(&(&l.value_at_one * scale), "q^g L(1)", &l.d)
}

/// `h_D R_D = q^(g+1) L(1, chi_D) / (q - 1)` for even `deg D`.
pub fn class_number_regulator_even(l: &LData) -> Result<BigInt> {
    if l.d.deg() % 2 == 1 {
        return Err(Error::InvalidArgument(
            "class_number_regulator_even needs even deg D".into(),
        ));
    }
    let q = BigInt::from(l.q);
    let scale = BigRational::new(q.pow(l.genus as u32 + 1), q - 1);
    to_positive_integer(&(&l.value_at_one * scale), "q^(g+1) L(1)/(q-1)", &l.d)
}

/// `d_r(P^a) = Gamma(r + a) / (Gamma(r) a!)`, evaluated as the rising
/// factorial `prod_{j<a} (r + j)/(j + 1)`; this also covers `r = 0`.
pub fn divisor_local(r: f64, a: u32) -> f64 {
    (0..a).map(|j| (r + j as f64) / (j as f64 + 1.0)).product()
}

/// Generalized divisor function `d_r(f)`, multiplicative.
pub fn divisor_fn(r: f64, f: &FactoredPoly) -> f64 {
    f.factors.iter().map(|(_, a)| divisor_local(r, *a)).product()
}

/// `d_k(f)` for integer `k`, exactly: `prod binom(k + a - 1, a)`.
pub fn divisor_fn_exact(k: u32, f: &FactoredPoly) -> BigUint {
    f.factors
        .iter()
        .map(|(_, a)| binomial(k as u64 + *a as u64 - 1, *a as u64, k == 0))
        .product()
}

fn binomial(n: u64, k: u64, zero_order: bool) -> BigUint {
    if zero_order {
        // d_0(P^a) = 0 for a >= 1
        return if k == 0 { BigUint::one() } else { BigUint::zero() };
    }
    let mut acc = BigUint::one();
    for j in 0..k {
        acc = acc * BigUint::from(n - j) / BigUint::from(j + 1);
    }
    acc
}

/// `h(f) = prod_{P | f} |P|/(|P| + 1)`.
pub fn h_fn(fq: Fq, f: &FactoredPoly) -> BigRational {
    f.primes().fold(BigRational::one(), |acc, p| {
        let norm = BigInt::from(p.norm(fq));
        acc * BigRational::new(norm.clone(), norm + 1)
    })
}

/// The multiplicative functions appearing in moment and resonator sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ArithmeticFn {
    Divisor(f64),
    H,
    /// 1 iff every prime factor has degree `<= bound`.
    Smooth(usize),
}

impl ArithmeticFn {
    pub fn eval(&self, fq: Fq, f: &FactoredPoly) -> f64 {
        match *self {
            ArithmeticFn::Divisor(r) => divisor_fn(r, f),
            ArithmeticFn::H => h_fn(fq, f).to_f64().unwrap_or(f64::NAN),
            ArithmeticFn::Smooth(bound) => {
                if f.primes().all(|p| p.deg() <= bound) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
