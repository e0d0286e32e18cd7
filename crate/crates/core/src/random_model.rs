//! The random Euler product `L(1, X; y) = prod_{deg P <= y} (1 - X(P)/|P|)^(-1)`
//! with independent `X(P)`: 0 with probability `1/(|P|+1)`, and +1 or -1 each
//! with probability `|P|/(2(|P|+1))`.
//!
//! Closed-form moments, seeded Monte Carlo, a numeric Chernoff tail and the
//! explicit constants attached to the resonance lower bound live here. All of
//! this is `f64`, except for integer moment orders which also have an exact
//! rational path.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{pi_q_exact, Fq};

/// The Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub fn e_gamma() -> f64 {
    EULER_GAMMA.exp()
}

/// Logarithm to base `q`.
pub fn log_q(q: u32, x: f64) -> f64 {
    x.ln() / (q as f64).ln()
}

/// `zeta_A(2) = q/(q-1)`.
pub fn zeta_a2(q: u32) -> f64 {
    q as f64 / (q as f64 - 1.0)
}

/// `pi/4 - ln(2)/2`.
pub fn c3() -> f64 {
    std::f64::consts::FRAC_PI_4 - std::f64::consts::LN_2 / 2.0
}

/// Upper limit for the resonator constant: `ln q / (2 (3 ln 2 - pi/2) zeta_A(2))`.
pub fn c_star(q: u32) -> f64 {
    (q as f64).ln() / (2.0 * (3.0 * std::f64::consts::LN_2 - std::f64::consts::FRAC_PI_2) * zeta_a2(q))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub q: Fq,
    pub y: usize,
    pub seed: u64,
    pub mc_samples: usize,
}

impl ModelParams {
    pub fn new(q: Fq, y: usize, seed: u64, mc_samples: usize) -> Result<Self> {
        if y == 0 {
            return Err(Error::InvalidArgument("model needs y >= 1".into()));
        }
        if mc_samples == 0 {
            return Err(Error::InvalidArgument("mc_samples must be >= 1".into()));
        }
        Ok(Self {
            q,
            y,
            seed,
            mc_samples,
        })
    }

    /// `(|P|, multiplicity)` for each degree `1..=y`.
    pub fn norm_classes(&self) -> Vec<(u64, u128)> {
        (1..=self.y)
            .map(|d| (self.q.pow_q(d), pi_q_exact(self.q.q_u64(), d)))
            .collect()
    }
}

/// Local factor `E_P(k) = E[(1 - X(P)/|P|)^(-k)]`.
pub fn local_expectation(p_norm: u64, k: f64) -> f64 {
    let p = p_norm as f64;
    1.0 / (p + 1.0)
        + p / (2.0 * (p + 1.0)) * ((1.0 - 1.0 / p).powf(-k) + (1.0 + 1.0 / p).powf(-k))
}

/// `ln E_P(k)`, stable for large `k`.
pub fn ln_local_expectation(p_norm: u64, k: f64) -> f64 {
    let p = p_norm as f64;
    let w0 = (1.0 / (p + 1.0)).ln();
    let w1 = (p / (2.0 * (p + 1.0))).ln();
    let up = w1 - k * (1.0 - 1.0 / p).ln();
    let down = w1 - k * (1.0 + 1.0 / p).ln();
    let m = w0.max(up).max(down);
    m + ((w0 - m).exp() + (up - m).exp() + (down - m).exp()).ln()
}

/// `E_P(k)` for integer `k`, exactly.
pub fn local_expectation_exact(p_norm: u64, k: u32) -> BigRational {
    let p = BigInt::from(p_norm);
    let one = BigInt::one();
    let minus = BigRational::new(p.clone(), &p - &one).pow(k as i32);
    let plus = BigRational::new(p.clone(), &p + &one).pow(k as i32);
    BigRational::new(one, &p + 1u32)
        + BigRational::new(p.clone(), (&p + 1u32) * 2u32) * (minus + plus)
}

/// `E(L(1, X; y)^k) = prod_{d <= y} E_{q^d}(k)^{pi_q(d)}`.
pub fn model_moment(params: &ModelParams, k: f64) -> f64 {
    ln_model_moment(params, k).exp()
}

pub fn ln_model_moment(params: &ModelParams, k: f64) -> f64 {
    params
        .norm_classes()
        .into_iter()
        .map(|(norm, mult)| mult as f64 * ln_local_expectation(norm, k))
        .sum()
}

pub fn model_moment_exact(params: &ModelParams, k: u32) -> BigRational {
    params
        .norm_classes()
        .into_iter()
        .fold(BigRational::one(), |acc, (norm, mult)| {
            acc * local_expectation_exact(norm, k).pow(mult as i32)
        })
}

/// Seeded sampler for `L(1, X; y)`.
///
/// Sample `i` draws from its own ChaCha8 stream (`seed`, stream `i`), one
/// prime after another in canonical order, so results do not depend on how
/// samples are split across threads.
#[derive(Clone, Debug)]
pub struct ModelSampler {
    seed: u64,
    norms: Vec<u64>,
}

impl ModelSampler {
    pub fn new(params: &ModelParams) -> Self {
        let norms = params
            .norm_classes()
            .into_iter()
            .flat_map(|(norm, mult)| std::iter::repeat_n(norm, mult as usize))
            .collect();
        Self {
            seed: params.seed,
            norms,
        }
    }

    /// Draws `X(P)` for every prime of sample `index`.
    pub fn draw_signs(&self, index: u64) -> Vec<i8> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        self.norms
            .iter()
            .map(|&p| {
                // 2 of the 2(p+1) outcomes give 0; the rest split evenly.
                let v = rng.random_range(0..2 * (p + 1));
                if v < 2 {
                    0
                } else if v % 2 == 0 {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    pub fn sample(&self, index: u64) -> f64 {
        self.draw_signs(index)
            .iter()
            .zip(&self.norms)
            .map(|(&x, &p)| 1.0 / (1.0 - x as f64 / p as f64))
            .product()
    }

    /// Samples `start..start+count`, in index order.
    pub fn samples(&self, start: u64, count: usize) -> Vec<f64> {
        (start..start + count as u64)
            .into_par_iter()
            .map(|i| self.sample(i))
            .collect()
    }
}

/// `mc_samples` i.i.d. draws of `L(1, X; y)`, deterministic in the seed.
pub fn sample_model(params: &ModelParams) -> Vec<f64> {
    ModelSampler::new(params).samples(0, params.mc_samples)
}

/// Which end of the search bracket the Chernoff minimizer hit, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    /// Threshold at or below the typical value: the bound is trivial.
    Lower,
    /// Threshold above the largest attainable value: the bound keeps falling.
    Upper,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEstimate {
    pub tau: f64,
    /// `min_r [ln E(L^r) - r ln(e^gamma tau)]`, an upper bound for
    /// `ln P[L >= e^gamma tau]`.
    pub chernoff_exponent: f64,
    pub minimizing_r: f64,
    pub boundary: Option<Boundary>,
}

const R_MIN: f64 = 1e-6;
const R_MAX: f64 = 1e6;

/// Chernoff bound for `P[L(1, X; y) >= e^gamma tau]`, minimized over the
/// moment order `r > 0` by golden-section search in `ln r`.
pub fn chernoff_tail(params: &ModelParams, tau: f64) -> Result<TailEstimate> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be > 0, got {tau}")));
    }
    let ln_threshold = (e_gamma() * tau).ln();
    let classes = params.norm_classes();
    let objective = |s: f64| {
        let r = s.exp();
        let ln_m: f64 = classes
            .iter()
            .map(|&(norm, mult)| mult as f64 * ln_local_expectation(norm, r))
            .sum();
        ln_m - r * ln_threshold
    };

    let (mut a, mut b) = (R_MIN.ln(), R_MAX.ln());
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while b - a > 1e-10 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    let s = 0.5 * (a + b);
    let mut exponent = objective(s);
    let mut boundary = None;
    if s <= R_MIN.ln() + 1e-6 || exponent >= 0.0 {
        boundary = Some(Boundary::Lower);
        exponent = exponent.min(0.0);
        if exponent > -1e-9 {
            exponent = 0.0;
        }
    } else if s >= R_MAX.ln() - 1e-6 {
        boundary = Some(Boundary::Upper);
    }
    Ok(TailEstimate {
        tau,
        chernoff_exponent: exponent,
        minimizing_r: s.exp(),
        boundary,
    })
}

/// `C_2(q)` as displayed with the resonance theorem, final logarithm base q:
/// `1/2 - (pi/4 - ln2/2) q/(q-1) + log_q((q-1) ln q / (2q(3 ln 2 - pi/2)))`.
pub fn constant_c2(q: u32) -> f64 {
    let qf = q as f64;
    let inner = (qf - 1.0) * qf.ln()
        / (2.0 * qf * (3.0 * std::f64::consts::LN_2 - std::f64::consts::FRAC_PI_2));
    0.5 - c3() * qf / (qf - 1.0) + log_q(q, inner)
}

/// The only numeric value of `C_2` quoted alongside the formula.
pub const C2_REFERENCE: (u32, f64) = (17, 0.04);
/// Band around the quoted value treated as agreement.
pub const C2_REFERENCE_BAND: (f64, f64) = (0.03, 0.05);

/// `C_2(q)` plus its comparison against the quoted reference value.
///
/// The printed formula gives about 0.374 at `q = 17`, not 0.04, so the record
/// carries a few alternative readings of the formula for inspection. None of
/// them is treated as the correct one.
#[derive(Clone, Debug, PartialEq)]
pub struct C2Report {
    pub q: u32,
    pub computed: f64,
    pub reference: Option<f64>,
    pub discrepancy: Option<bool>,
    pub alternatives: Vec<(&'static str, f64)>,
}

pub fn c2_report(q: u32) -> C2Report {
    let computed = constant_c2(q);
    let qf = q as f64;
    let inner = (qf - 1.0) * qf.ln()
        / (2.0 * qf * (3.0 * std::f64::consts::LN_2 - std::f64::consts::FRAC_PI_2));
    let head = 0.5 - c3() * qf / (qf - 1.0);
    let reference = (q == C2_REFERENCE.0).then_some(C2_REFERENCE.1);
    let discrepancy = reference
        .map(|_| !(C2_REFERENCE_BAND.0..=C2_REFERENCE_BAND.1).contains(&computed));
    C2Report {
        q,
        computed,
        reference,
        discrepancy,
        alternatives: vec![
            ("natural_log_last_term", head + inner.ln()),
            ("without_log_term", head),
            ("log_term_only", log_q(q, inner)),
            ("c3_without_zeta_factor", 0.5 - c3() + log_q(q, inner)),
        ],
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauBeta {
    pub value: f64,
    /// False when the threshold is not positive.
    pub useful: bool,
}

/// `tau_{beta,n} = e^gamma (log n + log log n + C_2(q) - beta)`, base-q logs.
pub fn tau_beta_n(q: u32, n: usize, beta: f64) -> Result<TauBeta> {
    if (n as u64) < q as u64 {
        return Err(Error::InvalidArgument(format!(
            "tau_beta_n needs n >= q (n = {n}, q = {q})"
        )));
    }
    let ln = log_q(q, n as f64);
    let value = e_gamma() * (ln + log_q(q, ln) + constant_c2(q) - beta);
    Ok(TauBeta {
        value,
        useful: value > 0.0,
    })
}

/// `exp(-q^(-beta) ln q / 2)`, the asserted lower bound for the tail
/// fraction at `tau_{beta,n}` without its `o(1)`.
pub fn resonance_tail_target(q: u32, beta: f64) -> f64 {
    let qf = q as f64;
    (-qf.powf(-beta) * qf.ln() / 2.0).exp()
}

/// `log c = log c* - beta + refinement / sqrt(log n)` with base-q logs;
/// returns `c`.
pub fn resonator_constant(q: u32, n: usize, beta: f64, refine: bool) -> f64 {
    let mut lc = log_q(q, c_star(q)) - beta;
    if refine {
        lc += 1.0 / log_q(q, n as f64).sqrt();
    }
    (q as f64).powf(lc)
}
