//! Long resonator `R_D = prod_{deg P < N} (1 - r_P chi_D(P))^(-1)` with
//! `r_P = 1 - |P|/q^N`, the exact resonated average `S_1/S_2`, and the local
//! factor algebra behind its Euler-product evaluation.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::characters::PrimeCharacters;
use crate::ensemble::{round_degree, Ensemble};
use crate::error::{Error, Result};
use crate::lfunctions::{rational_to_f64, short_euler_from_chis};
use crate::poly::{big_pi_q, pi_q_exact, FactoredPoly, Fq, Poly};
use crate::random_model::{c3, c_star, e_gamma, log_q, zeta_a2};

/// `N = round(log n + log log n + log c)`, base-q logs, at least 1.
pub fn truncation_degree(q: u32, n: usize, c: f64) -> Result<usize> {
    if n < 2 || !(c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "truncation degree needs n >= 2 and c > 0 (n = {n}, c = {c})"
        )));
    }
    let ln = log_q(q, n as f64);
    Ok(round_degree(ln + log_q(q, ln) + log_q(q, c)))
}

/// `M = round(3 log n)`, base-q log, at least 1.
pub fn default_euler_length(q: u32, n: usize) -> usize {
    round_degree(3.0 * log_q(q, n as f64))
}

/// `r_P` for a prime of degree `deg`.
pub fn resonator_prime_coeff(fq: Fq, deg: usize, n_trunc: usize) -> BigRational {
    if deg >= n_trunc {
        return BigRational::zero();
    }
    let q = BigInt::from(fq.q());
    BigRational::one() - BigRational::new(q.pow(deg as u32), q.pow(n_trunc as u32))
}

/// `r_f`, completely multiplicative in `f`.
pub fn resonator_coeff(fq: Fq, f: &FactoredPoly, n_trunc: usize) -> BigRational {
    f.factors
        .iter()
        .fold(BigRational::one(), |acc, (p, e)| {
            acc * resonator_prime_coeff(fq, p.deg(), n_trunc).pow(*e as i32)
        })
}

/// `R_D` from precomputed `chi_D(P_i)`; `chis` must cover every prime of
/// degree `< n_trunc`.
pub fn resonator_from_chis(pc: &PrimeCharacters, chis: &[i8], n_trunc: usize) -> BigRational {
    let fq = pc.field();
    let q = BigInt::from(fq.q());
    let qn = q.pow(n_trunc as u32);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    let count = pc.count_up_to(n_trunc.saturating_sub(1)).min(chis.len());
    for (i, &chi) in chis.iter().enumerate().take(count) {
        if chi == 0 {
            continue;
        }
        let norm = q.pow(pc.prime(i).deg() as u32);
        // r = (q^N - |P|)/q^N, so (1 - r chi)^(-1) = q^N / (q^N - chi (q^N - |P|))
        let rn = &qn - &norm;
        den *= if chi > 0 { norm } else { &qn + rn };
        num *= &qn;
    }
    BigRational::new(num, den)
}

pub fn resonator_value(pc: &PrimeCharacters, d: &Poly, n_trunc: usize) -> Result<BigRational> {
    if n_trunc == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let need = n_trunc - 1;
    if pc.max_degree() < need {
        return Err(Error::TableTooSmall {
            needed: need,
            have: pc.max_degree(),
        });
    }
    let chis = pc.chi_prefix(d, pc.count_up_to(need));
    Ok(resonator_from_chis(pc, &chis, n_trunc))
}

/// `N Pi_q(N) - sum_{m <= N} m pi_q(m)`, a bound for `log_q R_D`.
pub fn log_rd_bound(q: u32, n_trunc: usize) -> u128 {
    let q = q as u64;
    let weighted: u128 = (1..=n_trunc)
        .map(|m| m as u128 * pi_q_exact(q, m))
        .sum();
    n_trunc as u128 * big_pi_q(q, n_trunc) - weighted
}

/// Lower bound for `S_1/S_2` without its error term, base-q logs.
pub fn theory_ratio_bound(q: u32, n: usize, c: f64) -> Result<f64> {
    if (n as u64) < q as u64 || !(c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "theory_ratio_bound needs n >= q and c > 0 (n = {n}, q = {q}, c = {c})"
        )));
    }
    let ln = log_q(q, n as f64);
    Ok(e_gamma() * (ln + log_q(q, ln) + 0.5 - c3() * zeta_a2(q) + log_q(q, c)))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonanceConfig {
    pub c: f64,
    pub n_override: Option<usize>,
    pub m_override: Option<usize>,
}

impl ResonanceConfig {
    /// `c = 0.9 c*`, derived `N` and `M`.
    pub fn default_for(q: u32) -> Self {
        Self {
            c: 0.9 * c_star(q),
            n_override: None,
            m_override: None,
        }
    }

    pub fn truncation(&self, q: u32, n: usize) -> Result<usize> {
        match self.n_override {
            Some(0) => Err(Error::InvalidArgument("N must be >= 1".into())),
            Some(v) => Ok(v),
            None => truncation_degree(q, n, self.c),
        }
    }

    pub fn euler_length(&self, q: u32, n: usize) -> Result<usize> {
        match self.m_override {
            Some(0) => Err(Error::InvalidArgument("M must be >= 1".into())),
            Some(v) => Ok(v),
            None => Ok(default_euler_length(q, n)),
        }
    }

    /// Largest prime degree a run touches.
    pub fn prime_degree(&self, q: u32, n: usize) -> Result<usize> {
        Ok(self.truncation(q, n)?.max(self.euler_length(q, n)?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResonatorRun {
    pub q: u32,
    pub n: usize,
    pub c: f64,
    pub n_trunc: usize,
    pub m: usize,
    pub s1: BigRational,
    pub s2: BigRational,
    pub ratio: BigRational,
    pub argmax_d: Poly,
    pub max_l_short: BigRational,
    pub min_l_short: BigRational,
    /// Unweighted mean of `L(1, chi_D; M)`.
    pub mean_l_short: BigRational,
    pub sandwich_holds: bool,
    pub ratio_ge_mean: bool,
    /// `sum_D L(1, chi_D; N) R_D^2`.
    pub s1_n_smooth: BigRational,
    /// `S_1` with the `N`-term product is at most `S_1`; `None` when `N > M`.
    pub n_smooth_le_m_smooth: Option<bool>,
    pub log_rd_bound: u128,
    /// `max_D log_q R_D`.
    pub max_log_rd: f64,
    pub rd_bound_holds: bool,
    /// `sum_D L(1, chi_D) R_D^2 / S_2`, when full L-values were supplied.
    pub full_ratio: Option<BigRational>,
    pub theory_bound: Option<f64>,
    pub warnings: Vec<String>,
}

struct Group {
    count: u64,
    first: usize,
}

/// Exact `S_1`, `S_2` and their diagnostics over `H_n`.
pub fn run_resonance(
    ens: &Ensemble,
    pc: &PrimeCharacters,
    cfg: &ResonanceConfig,
    full_l: Option<&[BigRational]>,
) -> Result<ResonatorRun> {
    let fq = ens.field();
    let q = fq.q();
    let n = ens.degree();
    if !(cfg.c > 0.0) {
        return Err(Error::InvalidArgument(format!("c must be > 0, got {}", cfg.c)));
    }
    let n_trunc = cfg.truncation(q, n)?;
    let m = cfg.euler_length(q, n)?;
    let top = n_trunc.max(m);
    if pc.max_degree() < top {
        return Err(Error::TableTooSmall {
            needed: top,
            have: pc.max_degree(),
        });
    }
    if let Some(l) = full_l {
        if l.len() != ens.len() {
            return Err(Error::InvalidArgument("one L-value per member expected".into()));
        }
    }
    let mut warnings = Vec::new();
    let cap = c_star(q);
    if cfg.c >= cap {
        warnings.push(format!("c = {} is not below the cap {cap}", cfg.c));
    }

    let count = pc.count_up_to(top);
    let chis: Vec<Vec<i8>> = ens
        .members()
        .par_iter()
        .map(|d| pc.chi_prefix(d, count))
        .collect();

    let mut groups: BTreeMap<&[i8], Group> = BTreeMap::new();
    for (i, key) in chis.iter().enumerate() {
        groups
            .entry(key.as_slice())
            .and_modify(|g| g.count += 1)
            .or_insert(Group { count: 1, first: i });
    }
    let mut ordered: Vec<(&[i8], Group)> = groups.into_iter().collect();
    ordered.sort_by_key(|(_, g)| g.first);

    let per_group: Vec<(BigRational, BigRational, BigRational)> = ordered
        .par_iter()
        .map(|(key, _)| {
            let r = resonator_from_chis(pc, key, n_trunc);
            (
                short_euler_from_chis(pc, key, m),
                short_euler_from_chis(pc, key, n_trunc),
                &r * &r,
            )
        })
        .collect();

    let bound = log_rd_bound(q, n_trunc);
    let q_bound = BigRational::from_integer(BigInt::from(q).pow(bound as u32));
    let mut s1 = BigRational::zero();
    let mut s1_n = BigRational::zero();
    let mut s2 = BigRational::zero();
    let mut sum_l = BigRational::zero();
    let mut max_l: Option<(&BigRational, usize)> = None;
    let mut min_l: Option<&BigRational> = None;
    let mut max_r2 = BigRational::zero();
    for ((_, g), (l_m, l_n, r2)) in ordered.iter().zip(&per_group) {
        let cnt = BigInt::from(g.count);
        s1 += l_m * r2 * &cnt;
        s1_n += l_n * r2 * &cnt;
        s2 += r2 * &cnt;
        sum_l += l_m * &cnt;
        if max_l.is_none_or(|(v, first)| l_m > v || (l_m == v && g.first < first)) {
            max_l = Some((l_m, g.first));
        }
        if min_l.is_none_or(|v| l_m < v) {
            min_l = Some(l_m);
        }
        if *r2 > max_r2 {
            max_r2 = r2.clone();
        }
    }
    let (max_l, argmax) = max_l.ok_or_else(|| Error::InvalidArgument("empty ensemble".into()))?;
    let max_l = max_l.clone();
    let min_l = min_l.cloned().unwrap_or_default();
    let ratio = &s1 / &s2;
    let mean = sum_l / BigInt::from(ens.len());
    let full_ratio = full_l.map(|l| {
        let mut acc = BigRational::zero();
        for (i, key) in chis.iter().enumerate() {
            let r = resonator_from_chis(pc, key, n_trunc);
            acc += &l[i] * &r * &r;
        }
        acc / &s2
    });
    let max_rd_sq = rational_to_f64(&max_r2);
    Ok(ResonatorRun {
        q,
        n,
        c: cfg.c,
        n_trunc,
        m,
        sandwich_holds: min_l <= ratio && ratio <= max_l,
        ratio_ge_mean: ratio >= mean,
        n_smooth_le_m_smooth: (n_trunc <= m).then(|| s1_n <= s1),
        rd_bound_holds: max_r2 <= &q_bound * &q_bound,
        max_log_rd: log_q(q, max_rd_sq) / 2.0,
        log_rd_bound: bound,
        theory_bound: theory_ratio_bound(q, n, cfg.c).ok(),
        argmax_d: ens.members()[argmax].clone(),
        s1,
        s2,
        ratio,
        max_l_short: max_l,
        min_l_short: min_l,
        mean_l_short: mean,
        s1_n_smooth: s1_n,
        full_ratio,
        warnings,
    })
}

/// Local data at one prime: `B = (1 - |P|^-2)^-1`, `R = (1 - r^2)^-1`,
/// `h = |P|/(|P|+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFactors {
    pub p_norm: u64,
    pub r: BigRational,
    pub b: BigRational,
    pub rr: BigRational,
    pub h: BigRational,
}

impl LocalFactors {
    pub fn new(p_norm: u64, r: BigRational) -> Result<Self> {
        if p_norm < 3 {
            return Err(Error::InvalidArgument(format!("|P| must be >= 3, got {p_norm}")));
        }
        if r.is_negative() || r >= BigRational::one() {
            return Err(Error::InvalidArgument(format!(
                "r must lie in [0, 1), got {r}; the series diverges for r >= 1"
            )));
        }
        let p = BigRational::from_integer(BigInt::from(p_norm));
        let one = BigRational::one();
        Ok(Self {
            b: (&one - (&p * &p).recip()).recip(),
            rr: (&one - &r * &r).recip(),
            h: &p / (&p + &one),
            p_norm,
            r,
        })
    }

    /// Replaces `h`; used to show the identities depend on it.
    pub fn with_h(mut self, h: BigRational) -> Self {
        self.h = h;
        self
    }

    fn p(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(self.p_norm))
    }
}

/// The nine-term local factor of the resonated first moment against its
/// factored form.
pub fn local_factor_s_identity(lf: &LocalFactors) -> (BigRational, BigRational) {
    let p = lf.p();
    let p2 = &p * &p;
    let r = &lf.r;
    let r2 = r * r;
    let r3 = &r2 * r;
    let r4 = &r2 * &r2;
    let (b, rr, h) = (&lf.b, &lf.rr, &lf.h);
    let rr2 = rr * rr;
    let two = BigRational::from_integer(2.into());
    let one = BigRational::one();

    let lhs = &one
        + &two * r / &p * b * rr * h
        + &two * &r3 / &p * b * &rr2 * h
        + &r2 * &rr2 * h
        + &r2 / &p2 * b * &rr2 * h
        + b * h / &p2
        + &two * &r2 / &p2 * b * rr * h
        + &r4 / &p2 * b * &rr2 * h
        + &two * &r2 * rr * h
        + &r4 * &rr2 * h;

    let one_minus_r2 = &one - &r2;
    let rhs = b
        * &rr2
        * h
        * (&one + &r2 + &two * r / &p
            + (&one_minus_r2 * &one_minus_r2) / &p * (&one - (&one / &p2)));
    (lhs, rhs)
}

/// `(1 - r^2)^-2 (1 + r^2)`, the local factor of `E(N)`.
pub fn local_e(r: &BigRational) -> BigRational {
    let one = BigRational::one();
    let r2 = r * r;
    let d = &one - &r2;
    (&one + &r2) / (&d * &d)
}

/// Local factor of `E_1(N)`.
pub fn local_e1(p_norm: u64, r: &BigRational) -> BigRational {
    let one = BigRational::one();
    let p = BigRational::from_integer(BigInt::from(p_norm));
    let r2 = r * r;
    let omr = &one - r;
    let omr2 = &one - &r2;
    &one - &omr * &omr / ((&p + &one) * (&one + &r2))
        + (&one - (&one / &p)) * &omr2 * &omr2 / (&p * (&one + &r2))
}

/// Local factor of `E_2(N)`.
pub fn local_e2(p_norm: u64, r: &BigRational) -> BigRational {
    let one = BigRational::one();
    let p = BigRational::from_integer(BigInt::from(p_norm));
    let r2 = r * r;
    let den = (&p + &one) * (&one + &r2);
    &one - BigRational::from_integer(3.into()) * &r2 / &den + &r2 * &r2 / den
}

/// `E * E_1 * (1 - 1/|P|)^-1 * h` at one prime; equals both sides of
/// [`local_factor_s_identity`].
pub fn local_factor_s_euler_form(lf: &LocalFactors) -> BigRational {
    let one = BigRational::one();
    let p = lf.p();
    local_e(&lf.r) * local_e1(lf.p_norm, &lf.r) * (&p / (&p - &one)) * &lf.h
}

/// `1 + h sum_{k>=1} (2k+1) r^(2k)` against
/// `(1 - r^2)^-2 (1 + (|P|-2)/(|P|+1) r^2 + r^4/(|P|+1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct RIdentity {
    pub closed_form: BigRational,
    pub partial_sum: BigRational,
    pub terms: usize,
    /// Upper bound for the omitted terms `k > terms`.
    pub tail_bound: BigRational,
    pub holds: bool,
}

impl RIdentity {
    /// `E * E_2` at the same prime, for the product form.
    pub fn euler_form(lf: &LocalFactors) -> BigRational {
        local_e(&lf.r) * local_e2(lf.p_norm, &lf.r)
    }
}

pub fn local_factor_r_identity(lf: &LocalFactors, terms: usize) -> RIdentity {
    let one = BigRational::one();
    let p = lf.p();
    let x = &lf.r * &lf.r;
    let closed = {
        let d = &one - &x;
        (&one + (&p - BigRational::from_integer(2.into())) / (&p + &one) * &x
            + &x * &x / (&p + &one))
            / (&d * &d)
    };
    // sum_{k<=K} (2k+1) x^k over the common denominator den(x)^K
    let (xn, xd) = (x.numer(), x.denom());
    let mut acc = BigInt::zero();
    let mut xn_k = BigInt::one();
    let mut xd_k = BigInt::one();
    for k in 1..=terms {
        xn_k *= xn;
        xd_k *= xd;
        acc = acc * xd + BigInt::from(2 * k + 1) * &xn_k;
    }
    let partial = &one + &lf.h * BigRational::new(acc, xd_k.clone());
    let xk = BigRational::new(xn_k, xd_k);

    // For k > K: (2k+1) x^k <= (2K+3) x^(K+1) rho^(k-K-1),
    // rho = x (2K+5)/(2K+3); valid once rho < 1.
    let kk = BigInt::from(terms);
    let a = BigRational::from_integer(&kk * 2u32 + 3u32);
    let rho = &x * BigRational::from_integer(&kk * 2u32 + 5u32) / &a;
    let tail_bound = if x.is_zero() {
        BigRational::zero()
    } else if rho < one {
        lf.h.abs() * a * &xk * &x / (&one - rho)
    } else {
        // no certificate at this many terms
        BigRational::from_integer(BigInt::from(u64::MAX))
    };
    let diff = (&closed - &partial).abs();
    RIdentity {
        holds: diff <= tail_bound,
        closed_form: closed,
        partial_sum: partial,
        terms,
        tail_bound,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EProducts {
    pub n_trunc: usize,
    pub e: f64,
    pub e1: f64,
    pub e2: f64,
    pub ln_e: f64,
    /// `zeta_A(2) (2 + pi/2 - 3 ln 2)/ln q * q^N/N`.
    pub ln_e_asymptotic: f64,
    /// `K(q) q^N/N` with `K` from [`ln_e_discrete_constant`].
    pub ln_e_discrete: f64,
}

impl EProducts {
    pub fn asymptotic_ratio(&self) -> f64 {
        self.ln_e / self.ln_e_asymptotic
    }
}

/// `E(N)`, `E_1(N)`, `E_2(N)` over primes of degree `< N`, grouped by degree.
pub fn euler_e_products(q: u32, n_trunc: usize) -> Result<EProducts> {
    if n_trunc == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    let qf = q as f64;
    let (mut ln_e, mut ln_e1, mut ln_e2) = (0.0, 0.0, 0.0);
    for d in 1..n_trunc {
        let mult = pi_q_exact(q as u64, d) as f64;
        let p = qf.powi(d as i32);
        let r = 1.0 - qf.powi(d as i32 - n_trunc as i32);
        let r2 = r * r;
        ln_e += mult * ((1.0 + r2).ln() - 2.0 * (1.0 - r2).ln());
        let e1 = 1.0 - (1.0 - r) * (1.0 - r) / ((p + 1.0) * (1.0 + r2))
            + (1.0 - 1.0 / p) * (1.0 - r2) * (1.0 - r2) / (p * (1.0 + r2));
        ln_e1 += mult * e1.ln();
        let e2 = 1.0 - 3.0 * r2 / ((p + 1.0) * (1.0 + r2)) + r2 * r2 / ((p + 1.0) * (1.0 + r2));
        ln_e2 += mult * e2.ln();
    }
    let shape = 2.0 + std::f64::consts::FRAC_PI_2 - 3.0 * std::f64::consts::LN_2;
    Ok(EProducts {
        n_trunc,
        e: ln_e.exp(),
        e1: ln_e1.exp(),
        e2: ln_e2.exp(),
        ln_e,
        ln_e_asymptotic: zeta_a2(q) * shape / qf.ln() * qf.powi(n_trunc as i32) / n_trunc as f64,
        ln_e_discrete: ln_e_discrete_constant(q) * qf.powi(n_trunc as i32) / n_trunc as f64,
    })
}

/// `lim ln E(N) N / q^N = sum_{j>=1} q^-j f(q^-j)` with
/// `f(x) = ln(1 + (1-x)^2) - 2 ln(x (2-x))`, from `pi_q(N-j) ~ q^(N-j)/N`.
///
/// Prime degrees are integers, so this sum replaces the integral behind
/// `ln_e_asymptotic`; the two constants differ.
pub fn ln_e_discrete_constant(q: u32) -> f64 {
    let mut total = 0.0;
    let mut x = 1.0;
    for _ in 0..200 {
        x /= q as f64;
        let term = x * ((1.0 + (1.0 - x) * (1.0 - x)).ln() - 2.0 * (x * (2.0 - x)).ln());
        total += term;
        if term < 1e-18 {
            break;
        }
    }
    total
}
