//! Independent evaluation routes checked against the library's fast paths.

use hyperell_core::characters::{jacobi_symbol, PrimeCharacters};
use hyperell_core::ensemble::{
    nonsquare_cancellation_check, square_orthogonality_check, tail_distribution, Ensemble, LRoute,
};
use hyperell_core::lfunctions::{
    completed_l, l_coefficients, l_coefficients_direct, rational_to_f64, short_euler_l, LData,
};
use hyperell_core::random_model::e_gamma;
use hyperell_core::resonator::{log_rd_bound, resonator_value, run_resonance, ResonanceConfig};
use hyperell_core::{Fq, IrreducibleTable, Poly};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn setup(q: u64, deg: usize) -> (Fq, IrreducibleTable, PrimeCharacters) {
    let fq = Fq::new(q).unwrap();
    let table = IrreducibleTable::build(fq, deg);
    let pc = PrimeCharacters::new(&table, deg).unwrap();
    (fq, table, pc)
}

/// Moments by expanding `L(1, chi_D; y)^k = sum_f d_k(f) chi_D(f)/|f|` and
/// grouping `f` by which primes occur to an odd or a positive even power.
/// Odd powers contribute `chi_D(P)`, even powers `chi_D(P^2) = [P not | D]`,
/// with weights `(A - B)/2` and `(A + B)/2 - 1`, `A = (1 - 1/|P|)^-k`,
/// `B = (1 + 1/|P|)^-k`.
fn moment_by_expansion(fq: Fq, table: &IrreducibleTable, ens: &Ensemble, k: u32, y: usize) -> BigRational {
    let primes: Vec<&Poly> = table.up_to(y).collect();
    let weights: Vec<(BigRational, BigRational)> = primes
        .iter()
        .map(|p| {
            let norm = BigInt::from(p.norm(fq));
            let a = BigRational::new(norm.clone(), &norm - 1u32).pow(k as i32);
            let b = BigRational::new(norm.clone(), &norm + 1u32).pow(k as i32);
            let two = BigRational::from_integer(2.into());
            ((&a + &b) / &two - BigRational::one(), (a - b) / two)
        })
        .collect();
    let m = primes.len();
    let mut total = BigRational::zero();
    for code in 0..3u64.pow(m as u32) {
        let mut c = code;
        let mut weight = BigRational::one();
        let mut f = Poly::one();
        for i in 0..m {
            match c % 3 {
                1 => {
                    weight *= &weights[i].0;
                    f = fq.mul(&f, &fq.mul(primes[i], primes[i]));
                }
                2 => {
                    weight *= &weights[i].1;
                    f = fq.mul(&f, primes[i]);
                }
                _ => {}
            }
            c /= 3;
        }
        if weight.is_zero() {
            continue;
        }
        let s: i64 = ens
            .members()
            .iter()
            .map(|d| jacobi_symbol(fq, &f, d).unwrap().value() as i64)
            .sum();
        total += weight * BigInt::from(s);
    }
    total / BigInt::from(ens.len())
}

#[test]
fn moments_match_character_sum_expansion() {
    let (fq, table, pc) = setup(3, 2);
    for n in 1..=3 {
        let ens = Ensemble::new(fq, n).unwrap();
        for y in 1..=2 {
            let profile = ens.sign_profile(&pc, y).unwrap();
            for k in 0..=2 {
                assert_eq!(
                    profile.moment_exact(k),
                    moment_by_expansion(fq, &table, &ens, k, y),
                    "n={n} y={y} k={k}"
                );
            }
        }
    }
}

#[test]
fn moment_q5_n4_frozen() {
    let (fq, _, pc) = setup(5, 1);
    let ens = Ensemble::new(fq, 4).unwrap();
    let direct: BigRational = ens
        .members()
        .iter()
        .map(|d| short_euler_l(&pc, d, 1).unwrap())
        .fold(BigRational::zero(), |a, b| a + b)
        / BigInt::from(ens.len());
    let prof = ens.sign_profile(&pc, 1).unwrap();
    assert_eq!(prof.moment_exact(1), direct);
    assert_eq!(direct, rat(2_896_129, 2_488_320));
}

#[test]
fn euler_route_matches_character_sums() {
    for (q, max_deg) in [(3u64, 5usize), (5, 4)] {
        let (fq, _, pc) = setup(q, max_deg - 1);
        for n in 1..=max_deg {
            for d in Ensemble::new(fq, n).unwrap().members() {
                assert_eq!(
                    l_coefficients(&pc, d).unwrap(),
                    l_coefficients_direct(fq, d).unwrap(),
                    "D={d}"
                );
            }
        }
    }
}

#[test]
fn tail_q5_n3_frozen() {
    let fq = Fq::new(5).unwrap();
    let ens = Ensemble::new(fq, 3).unwrap();
    let direct: Vec<BigRational> = ens
        .members()
        .iter()
        .map(|d| {
            LData::from_coefficients(fq, d, l_coefficients_direct(fq, d).unwrap())
                .unwrap()
                .value_at_one
        })
        .collect();
    let tau = 1.0 / e_gamma();
    let recs = tail_distribution(&direct, &[0.0, tau, 1.0, 1.5, 1e9], None).unwrap();
    assert_eq!(recs[1].phi, rat(7, 10));
    assert!(recs.windows(2).all(|w| w[1].phi <= w[0].phi));
    assert_eq!(recs[0].phi, rat(1, 1));
    assert_eq!(recs[4].phi, rat(0, 1));
}

#[test]
fn short_products_approach_full_value() {
    let (fq, _, pc) = setup(3, 7);
    let ens = Ensemble::new(fq, 5).unwrap();
    let sample: Vec<&Poly> = ens.members().iter().step_by(7).collect();
    let mean_err: Vec<f64> = (1..=7)
        .map(|y| {
            sample
                .iter()
                .map(|d| {
                    let full = completed_l(&pc, d).unwrap().value_at_one;
                    let short = short_euler_l(&pc, d, y).unwrap();
                    rational_to_f64(&(short / full - BigRational::one()).abs())
                })
                .sum::<f64>()
                / sample.len() as f64
        })
        .collect();
    assert!(mean_err[6] < mean_err[0] / 4.0, "{mean_err:?}");
    assert!(mean_err[6] < mean_err[4], "{mean_err:?}");
}

#[test]
fn square_average_depends_on_radical() {
    let fq = Fq::new(5).unwrap();
    let ens = Ensemble::new(fq, 3).unwrap();
    // t^4 + 2 is irreducible over F_5 and has degree above n
    let big = fq.poly(&[2, 0, 0, 0, 1]);
    assert!(fq.is_irreducible(&big).unwrap());
    let t = Poly::t();
    let recs = square_orthogonality_check(&ens, &[t.clone(), fq.mul(&t, &t), big.clone(), fq.mul(&t, &big)]).unwrap();
    assert_eq!(recs[0].observed, recs[1].observed);
    assert_eq!(recs[0].predicted, recs[1].predicted);
    assert_eq!(recs[2].predicted, rat(625, 626));
    // D has degree 3 < 4, so the large prime never divides D
    assert_eq!(recs[2].observed, rat(1, 1));
    assert_eq!(recs[3].observed, recs[0].observed);
}

#[test]
fn cancellation_scan_orders_agree() {
    let fq = Fq::new(5).unwrap();
    let t = Poly::t();
    let mut normalized = Vec::new();
    for n in 3..=5 {
        let ens = Ensemble::new(fq, n).unwrap();
        let rec = &nonsquare_cancellation_check(&ens, &[t.clone()]).unwrap()[0];
        let reversed: i64 = ens
            .members()
            .iter()
            .rev()
            .map(|d| jacobi_symbol(fq, &t, d).unwrap().value() as i64)
            .sum();
        assert_eq!(rec.sum, reversed);
        assert!(rec.abs_sum <= ens.len() as u64);
        normalized.push(rec.normalized);
    }
    // for odd n the sum over H_n vanishes exactly
    assert_eq!(normalized[0], 0.0);
    assert!(normalized[2] <= normalized[0], "{normalized:?}");
}

/// `sum_{f N-smooth, deg f <= T} r_f chi_D(f)` by enumerating exponent
/// vectors, with the exact remainder of the all-positive series as the tail.
fn resonator_series(fq: Fq, primes: &[Poly], r: &[BigRational], d: &Poly, top: usize) -> (BigRational, BigRational) {
    let mut partial = BigRational::zero();
    let mut positive = BigRational::zero();
    let mut stack = vec![(0usize, 0usize, Poly::one(), BigRational::one())];
    while let Some((i, deg, f, rf)) = stack.pop() {
        if i == primes.len() {
            let chi = jacobi_symbol(fq, &f, d).unwrap().value();
            partial += &rf * BigInt::from(chi);
            positive += rf;
            continue;
        }
        let (mut deg, mut f, mut rf) = (deg, f, rf);
        loop {
            stack.push((i + 1, deg, f.clone(), rf.clone()));
            deg += primes[i].deg();
            if deg > top {
                break;
            }
            f = fq.mul(&f, &primes[i]);
            rf *= &r[i];
        }
    }
    let full: BigRational = r
        .iter()
        .fold(BigRational::one(), |acc, x| acc / (BigRational::one() - x));
    (partial, full - positive)
}

#[test]
fn resonator_series_matches_product() {
    let (fq, table, pc) = setup(5, 2);
    let ens = Ensemble::new(fq, 3).unwrap();
    for n_trunc in [1usize, 2, 3] {
        let primes: Vec<Poly> = table.up_to(n_trunc - 1).cloned().collect();
        let r: Vec<BigRational> = primes
            .iter()
            .map(|p| BigRational::one() - rat(p.norm(fq) as i64, 5i64.pow(n_trunc as u32)))
            .collect();
        for d in ens.members().iter().step_by(9) {
            let value = resonator_value(&pc, d, n_trunc).unwrap();
            for top in [3 * n_trunc, 12] {
                if n_trunc == 3 && top > 9 {
                    continue;
                }
                let (partial, tail) = resonator_series(fq, &primes, &r, d, top);
                assert!((&value - &partial).abs() <= tail, "D={d} N={n_trunc} T={top}");
            }
        }
    }
}

#[test]
fn resonator_log_bound_exhaustive() {
    let (fq, _, pc) = setup(5, 3);
    for n in 3..=5 {
        let ens = Ensemble::new(fq, n).unwrap();
        for n_trunc in 1..=3 {
            let bound = log_rd_bound(5, n_trunc);
            let cap = BigRational::from_integer(BigInt::from(5).pow(bound as u32));
            for d in ens.members() {
                let r = resonator_value(&pc, d, n_trunc).unwrap();
                assert!(r.is_positive());
                assert!(r <= cap, "D={d} N={n_trunc}");
            }
        }
    }
}

#[test]
fn resonator_trivial_regime_is_plain_mean() {
    let (fq, _, pc) = setup(5, 3);
    let ens = Ensemble::new(fq, 4).unwrap();
    let run = run_resonance(&ens, &pc, &ResonanceConfig::default_for(5), None).unwrap();
    assert_eq!(run.n_trunc, 1);
    assert_eq!(run.s2, BigRational::from_integer(BigInt::from(ens.len())));
    assert_eq!(run.ratio, run.mean_l_short);
    assert!(run.sandwich_holds);
    assert!(run.max_l_short >= run.ratio);
    let prof = ens.sign_profile(&pc, run.m).unwrap();
    assert_eq!(run.mean_l_short, prof.moment_exact(1));
    let full = ens.l_values(&pc, LRoute::Full).unwrap();
    let with_full = run_resonance(&ens, &pc, &ResonanceConfig::default_for(5), Some(&full)).unwrap();
    let mean_full = full.iter().fold(BigRational::zero(), |a, b| a + b) / BigInt::from(ens.len());
    assert_eq!(with_full.full_ratio, Some(mean_full));
}
