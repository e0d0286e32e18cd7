//! Exhaustive scans over `H_n`.
//!
//! Members are held in canonical order. Per-member work runs on the rayon
//! pool with order-preserving collection; every reduction afterwards is
//! sequential in canonical order, so reports do not depend on thread count.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::characters::{jacobi_symbol, PrimeCharacters};
use crate::error::{Error, Result};
use crate::lfunctions::{completed_l, completed_l_symmetric, h_fn, rational_to_f64, LData};
use crate::poly::{Fq, IrreducibleTable, Poly};
use crate::random_model::{chernoff_tail, e_gamma, log_q, model_moment, ModelParams};

/// `|H_n|`: `q^n - q^(n-1)` for `n >= 2`, `q` for `n = 1`.
pub fn ensemble_size(q: u64, n: usize) -> u64 {
    match n {
        0 => 1,
        1 => q,
        _ => q.pow(n as u32) - q.pow(n as u32 - 1),
    }
}

/// Monic squarefree polynomials of degree `n` in canonical order.
pub fn enumerate_h_n(fq: Fq, n: usize) -> Result<impl Iterator<Item = Poly>> {
    if n == 0 {
        return Err(Error::InvalidArgument("H_n needs n >= 1".into()));
    }
    Ok((0..fq.pow_q(n))
        .map(move |i| Poly::monic_from_index(fq, n, i))
        .filter(move |d| fq.is_squarefree(d).expect("monic, nonzero")))
}

/// Rounds a real truncation degree to the nearest integer, ties down, at
/// least 1.
pub fn round_degree(x: f64) -> usize {
    if !x.is_finite() {
        return 1;
    }
    ((x - 0.5).ceil().max(1.0)) as usize
}

/// How L-data is completed during scans.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LRoute {
    /// Euler product over every prime of degree `< deg D`.
    Full,
    /// Primes of degree `<= g` and the functional equation.
    Symmetric,
}

impl LRoute {
    /// Largest prime degree the route needs for `deg D = n`.
    pub fn prime_degree(self, n: usize) -> usize {
        match self {
            LRoute::Full => n.saturating_sub(1),
            LRoute::Symmetric => crate::lfunctions::lambda_genus(n.max(1)).1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Ensemble {
    fq: Fq,
    n: usize,
    members: Vec<Poly>,
}

impl Ensemble {
    pub fn new(fq: Fq, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("H_n needs n >= 1".into()));
        }
        let members: Vec<Poly> = (0..fq.pow_q(n))
            .into_par_iter()
            .map(|i| Poly::monic_from_index(fq, n, i))
            .filter(|d| fq.is_squarefree(d).expect("monic, nonzero"))
            .collect();
        debug_assert_eq!(members.len() as u64, ensemble_size(fq.q_u64(), n));
        Ok(Self { fq, n, members })
    }

    pub fn field(&self) -> Fq {
        self.fq
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Poly] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn size_big(&self) -> BigInt {
        BigInt::from(self.members.len())
    }

    /// L-data for every member, in canonical order.
    pub fn l_data(&self, pc: &PrimeCharacters, route: LRoute) -> Result<Vec<LData>> {
        self.members
            .par_iter()
            .map(|d| match route {
                LRoute::Full => completed_l(pc, d),
                LRoute::Symmetric => completed_l_symmetric(pc, d),
            })
            .collect()
    }

    /// `L(1, chi_D)` for every member, in canonical order.
    pub fn l_values(&self, pc: &PrimeCharacters, route: LRoute) -> Result<Vec<BigRational>> {
        Ok(self
            .l_data(pc, route)?
            .into_iter()
            .map(|l| l.value_at_one)
            .collect())
    }

    /// `L(1, chi_D; y)` for every member, in canonical order.
    pub fn short_values(&self, pc: &PrimeCharacters, y: usize) -> Result<Vec<BigRational>> {
        check_cover(pc, y)?;
        let count = pc.count_up_to(y);
        Ok(self
            .members
            .par_iter()
            .map(|d| {
                let chis = pc.chi_prefix(d, count);
                crate::lfunctions::short_euler_from_chis(pc, &chis, y)
            })
            .collect())
    }

    /// Members grouped by how many primes of each degree `<= y` have
    /// `chi_D(P) = +1` and `-1`. `L(1, chi_D; y)` depends only on this.
    pub fn sign_profile(&self, pc: &PrimeCharacters, y: usize) -> Result<SignProfile> {
        check_cover(pc, y)?;
        let count = pc.count_up_to(y);
        let keys: Vec<Vec<(u32, u32)>> = self
            .members
            .par_iter()
            .map(|d| {
                let mut key = vec![(0u32, 0u32); y];
                for i in 0..count {
                    let slot = &mut key[pc.prime(i).deg() - 1];
                    match pc.chi(d, i) {
                        1 => slot.0 += 1,
                        -1 => slot.1 += 1,
                        _ => {}
                    }
                }
                key
            })
            .collect();
        let mut groups = BTreeMap::new();
        for key in keys {
            *groups.entry(key).or_insert(0u64) += 1;
        }
        Ok(SignProfile {
            q: self.fq.q_u64(),
            total: self.members.len() as u64,
            groups,
        })
    }
}

fn check_cover(pc: &PrimeCharacters, y: usize) -> Result<()> {
    if y == 0 {
        return Err(Error::InvalidArgument("degree bound must be >= 1".into()));
    }
    if pc.max_degree() < y {
        return Err(Error::TableTooSmall {
            needed: y,
            have: pc.max_degree(),
        });
    }
    Ok(())
}

/// Distribution of `(#{chi = +1}, #{chi = -1})` per prime degree over `H_n`.
#[derive(Clone, Debug)]
pub struct SignProfile {
    q: u64,
    total: u64,
    groups: BTreeMap<Vec<(u32, u32)>, u64>,
}

impl SignProfile {
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn groups(&self) -> usize {
        self.groups.len()
    }

    fn short_value(&self, key: &[(u32, u32)]) -> BigRational {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for (d, &(plus, minus)) in key.iter().enumerate() {
            let p = BigInt::from(self.q.pow(d as u32 + 1));
            num *= p.pow(plus + minus);
            den *= (&p - 1u32).pow(plus) * (&p + 1u32).pow(minus);
        }
        BigRational::new(num, den)
    }

    /// `(1/|H_n|) sum_D L(1, chi_D; y)^k`, exact.
    pub fn moment_exact(&self, k: u32) -> BigRational {
        let mut acc = BigRational::zero();
        for (key, &count) in &self.groups {
            acc += self.short_value(key).pow(k as i32) * BigInt::from(count);
        }
        acc / BigInt::from(self.total)
    }

    /// `(1/|H_n|) sum_D L(1, chi_D; y)^k` for real `k >= 0`.
    pub fn moment(&self, k: f64) -> f64 {
        let mut acc = 0.0;
        for (key, &count) in &self.groups {
            let ln_l: f64 = key
                .iter()
                .enumerate()
                .map(|(d, &(plus, minus))| {
                    let p = self.q.pow(d as u32 + 1) as f64;
                    -(plus as f64) * (1.0 - 1.0 / p).ln() - (minus as f64) * (1.0 + 1.0 / p).ln()
                })
                .sum();
            acc += count as f64 * (k * ln_l).exp();
        }
        acc / self.total as f64
    }
}

/// One grid point of `phi_n(tau)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TailRecord {
    pub tau: f64,
    /// `e^gamma tau` as an exact binary fraction.
    pub threshold: BigRational,
    pub count: u64,
    pub phi: BigRational,
    /// `exp(chernoff exponent)`, an upper bound for the model tail.
    pub model_tail: Option<f64>,
}

/// `phi_n(tau) = #{D : L(1, chi_D) >= e^gamma tau} / |H_n|` on a grid.
pub fn tail_distribution(
    l_values: &[BigRational],
    tau_grid: &[f64],
    model: Option<&ModelParams>,
) -> Result<Vec<TailRecord>> {
    let mut sorted: Vec<&BigRational> = l_values.iter().collect();
    sorted.sort();
    let total = BigInt::from(l_values.len().max(1));
    tau_grid
        .iter()
        .map(|&tau| {
            if !tau.is_finite() || tau < 0.0 {
                return Err(Error::InvalidArgument(format!("bad tau {tau}")));
            }
            let threshold = BigRational::from_float(e_gamma() * tau)
                .ok_or_else(|| Error::InvalidArgument(format!("bad tau {tau}")))?;
            let below = sorted.partition_point(|v| **v < threshold);
            let count = (sorted.len() - below) as u64;
            let model_tail = match model {
                Some(p) if tau > 0.0 => Some(chernoff_tail(p, tau)?.chernoff_exponent.exp()),
                Some(_) => Some(1.0),
                None => None,
            };
            Ok(TailRecord {
                tau,
                threshold,
                count,
                phi: BigRational::new(BigInt::from(count), total.clone()),
                model_tail,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum MomentValue {
    Exact(BigRational),
    Real(f64),
}

impl MomentValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            MomentValue::Exact(r) => rational_to_f64(r),
            MomentValue::Real(x) => *x,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentRecord {
    pub k: f64,
    pub y: usize,
    pub empirical: MomentValue,
    pub model: f64,
    pub ratio: f64,
}

/// Empirical `k`-th moment of `L(1, chi_D; y)` over `H_n` next to the model
/// moment. Integer `k` is exact.
pub fn empirical_moment(profile: &SignProfile, y: usize, k: f64, fq: Fq) -> Result<MomentRecord> {
    if !(k >= 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!("moment order must be >= 0, got {k}")));
    }
    let empirical = if k.fract() == 0.0 && k <= u32::MAX as f64 {
        MomentValue::Exact(profile.moment_exact(k as u32))
    } else {
        MomentValue::Real(profile.moment(k))
    };
    let model = model_moment(&ModelParams::new(fq, y, 0, 1)?, k);
    Ok(MomentRecord {
        k,
        y,
        ratio: empirical.to_f64() / model,
        empirical,
        model,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalityRecord {
    pub f: Poly,
    /// `(1/|H_n|) sum_D chi_D(f^2)`.
    pub observed: BigRational,
    /// `prod_{P | f} (1 + 1/|P|)^(-1)`.
    pub predicted: BigRational,
    pub abs_err: f64,
    /// `|observed - predicted| * |H_n|`.
    pub scaled_err: f64,
}

/// Small-degree factoring with a table sized for `f`.
fn factor_standalone(fq: Fq, f: &Poly) -> Result<crate::poly::FactoredPoly> {
    IrreducibleTable::build(fq, (f.deg() / 2).max(1)).factor(f)
}

pub fn square_orthogonality_check(ens: &Ensemble, f_list: &[Poly]) -> Result<Vec<OrthogonalityRecord>> {
    let fq = ens.field();
    f_list
        .iter()
        .map(|f| {
            if !f.is_monic() {
                return Err(Error::NotMonic("square_orthogonality_check"));
            }
            let f2 = fq.mul(f, f);
            let signs: Vec<i8> = ens
                .members()
                .par_iter()
                .map(|d| jacobi_symbol(fq, &f2, d).map(|s| s.value()))
                .collect::<Result<_>>()?;
            let sum: i64 = signs.iter().map(|&s| s as i64).sum();
            let observed = BigRational::new(BigInt::from(sum), ens.size_big());
            let predicted = h_fn(fq, &factor_standalone(fq, f)?);
            let diff = (&observed - &predicted).abs();
            Ok(OrthogonalityRecord {
                f: f.clone(),
                abs_err: rational_to_f64(&diff),
                scaled_err: rational_to_f64(&(diff * ens.size_big())),
                observed,
                predicted,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CancellationRecord {
    pub ell: Poly,
    pub sum: i64,
    pub abs_sum: u64,
    /// `|sum| / q^(0.6 n)`.
    pub normalized: f64,
}

pub fn nonsquare_cancellation_check(ens: &Ensemble, ell_list: &[Poly]) -> Result<Vec<CancellationRecord>> {
    let fq = ens.field();
    ell_list
        .iter()
        .map(|ell| {
            if !ell.is_monic() {
                return Err(Error::NotMonic("nonsquare_cancellation_check"));
            }
            if factor_standalone(fq, ell)?.is_square() {
                return Err(Error::PerfectSquare(ell.to_string()));
            }
            let signs: Vec<i8> = ens
                .members()
                .par_iter()
                .map(|d| jacobi_symbol(fq, ell, d).map(|s| s.value()))
                .collect::<Result<_>>()?;
            let sum: i64 = signs.iter().map(|&s| s as i64).sum();
            Ok(CancellationRecord {
                ell: ell.clone(),
                sum,
                abs_sum: sum.unsigned_abs(),
                normalized: sum.unsigned_abs() as f64 / (fq.q() as f64).powf(0.6 * ens.degree() as f64),
            })
        })
        .collect()
}

/// `N = log n + log log n + 3 log f` in base-q logs, rounded.
pub fn truncation_length(q: u32, n: usize, f_param: f64) -> Result<usize> {
    if n < 2 {
        return Err(Error::InvalidArgument("truncation needs n >= 2".into()));
    }
    let ln = log_q(q, n as f64);
    Ok(round_degree(ln + log_q(q, ln) + 3.0 * log_q(q, f_param)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncationRecord {
    pub f_param: f64,
    pub n_trunc: usize,
    /// `1/(f log_q n)`.
    pub threshold: f64,
    pub exceed: u64,
    pub exceed_fraction: BigRational,
    /// `q^(7n/10) / |H_n|`.
    pub budget: f64,
}

impl TruncationRecord {
    pub fn within_budget(&self) -> bool {
        rational_to_f64(&self.exceed_fraction) <= self.budget
    }
}

/// Fraction of `D` with `|L(1, chi_D)/L(1, chi_D; N) - 1| > 1/(f log_q n)`,
/// for each truncation length in `lengths`.
pub fn truncation_experiment(
    ens: &Ensemble,
    pc: &PrimeCharacters,
    l_values: &[BigRational],
    f_param: f64,
    lengths: &[usize],
) -> Result<Vec<TruncationRecord>> {
    if !(f_param > 0.0) {
        return Err(Error::InvalidArgument("f_param must be > 0".into()));
    }
    if l_values.len() != ens.len() {
        return Err(Error::InvalidArgument("one L-value per member expected".into()));
    }
    let q = ens.field().q();
    let n = ens.degree();
    let threshold = 1.0 / (f_param * log_q(q, n as f64));
    let thr = BigRational::from_float(threshold)
        .ok_or_else(|| Error::InvalidArgument("threshold not finite".into()))?;
    let budget = (q as f64).powf(0.7 * n as f64) / ens.len() as f64;
    lengths
        .iter()
        .map(|&len| {
            let short = ens.short_values(pc, len)?;
            let exceed = l_values
                .iter()
                .zip(&short)
                .filter(|(l, s)| (*l / *s - BigRational::one()).abs() > thr)
                .count() as u64;
            Ok(TruncationRecord {
                f_param,
                n_trunc: len,
                threshold,
                exceed,
                exceed_fraction: BigRational::new(BigInt::from(exceed), ens.size_big()),
                budget,
            })
        })
        .collect()
}

/// All scan results for one `(q, n)`; sections left empty when not run.
#[derive(Clone, Debug, Default)]
pub struct EnsembleReport {
    pub q: u32,
    pub n: usize,
    pub ensemble_size: u64,
    pub tail: Vec<TailRecord>,
    pub moments: Vec<MomentRecord>,
    pub orthogonality: Vec<OrthogonalityRecord>,
    pub cancellation: Vec<CancellationRecord>,
    pub truncation: Vec<TruncationRecord>,
}

impl EnsembleReport {
    pub fn new(ens: &Ensemble) -> Self {
        Self {
            q: ens.field().q(),
            n: ens.degree(),
            ensemble_size: ens.len() as u64,
            ..Self::default()
        }
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        self.tail.iter().map(|r| r.tau).collect()
    }

    pub fn phi_values(&self) -> Vec<BigRational> {
        self.tail.iter().map(|r| r.phi.clone()).collect()
    }
}
