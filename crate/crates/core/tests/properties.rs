use hyperell_core::characters::{jacobi_by_factorization, jacobi_symbol, reciprocity_sign, Sign};
use hyperell_core::lfunctions::{divisor_fn, divisor_fn_exact, h_fn};
use hyperell_core::resonator::{local_factor_s_euler_form, local_factor_s_identity, local_factor_r_identity, LocalFactors, RIdentity};
use hyperell_core::{enumerate_monic, pi_q_exact, Fq, IrreducibleTable, Poly};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::OnceLock;

const PRIMES: [u64; 4] = [3, 5, 7, 13];

fn table_for(fq: Fq) -> &'static IrreducibleTable {
    static TABLES: OnceLock<Vec<IrreducibleTable>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        PRIMES
            .iter()
            .map(|&q| IrreducibleTable::build(Fq::new(q).unwrap(), 4))
            .collect()
    });
    &tables[PRIMES.iter().position(|&q| q == fq.q_u64()).unwrap()]
}

fn poly_in(q: u64, max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0..q as u32, 0..=max_len).prop_map(Poly::from_residues)
}

fn monic_in(q: u64, max_deg: usize) -> impl Strategy<Value = Poly> {
    (0..=max_deg).prop_flat_map(move |d| {
        prop::collection::vec(0..q as u32, d).prop_map(|mut c| {
            c.push(1);
            Poly::from_residues(c)
        })
    })
}

fn field_and_polys() -> impl Strategy<Value = (Fq, Poly, Poly, Poly)> {
    prop::sample::select(PRIMES.to_vec()).prop_flat_map(|q| {
        (
            Just(Fq::new(q).unwrap()),
            poly_in(q, 7),
            poly_in(q, 7),
            poly_in(q, 7),
        )
    })
}

proptest! {
    #[test]
    fn ring_axioms((fq, a, b, c) in field_and_polys()) {
        prop_assert_eq!(fq.add(&a, &b), fq.add(&b, &a));
        prop_assert_eq!(fq.mul(&a, &b), fq.mul(&b, &a));
        prop_assert_eq!(fq.mul(&fq.mul(&a, &b), &c), fq.mul(&a, &fq.mul(&b, &c)));
        prop_assert_eq!(
            fq.mul(&a, &fq.add(&b, &c)),
            fq.add(&fq.mul(&a, &b), &fq.mul(&a, &c))
        );
        prop_assert!(fq.sub(&a, &a).is_zero());
        prop_assert_eq!(fq.mul(&a, &Poly::one()), a.clone());
    }

    #[test]
    fn division((fq, a, b, _c) in field_and_polys()) {
        prop_assume!(!b.is_zero());
        let (quot, rem) = fq.div_rem(&a, &b).unwrap();
        prop_assert_eq!(fq.add(&fq.mul(&quot, &b), &rem), a.clone());
        prop_assert!(rem.is_zero() || rem.deg() < b.deg());
    }

    #[test]
    fn gcd_divides((fq, a, b, _c) in field_and_polys()) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let g = fq.gcd(&a, &b).unwrap();
        prop_assert!(g.is_monic());
        prop_assert!(fq.rem(&a, &g).unwrap().is_zero());
        prop_assert!(fq.rem(&b, &g).unwrap().is_zero());
    }

    #[test]
    fn factor_recomposes((fq, a, _b, _c) in field_and_polys()) {
        prop_assume!(!a.is_zero());
        let table = table_for(fq);
        let f = table.factor(&a).unwrap();
        prop_assert_eq!(f.recompose(fq), a.clone());
        for p in f.primes() {
            prop_assert!(fq.is_irreducible(p).unwrap());
        }
        // squarefree iff every exponent is 1
        if a.deg() > 0 {
            let sqf = fq.is_squarefree(&a).unwrap();
            prop_assert_eq!(sqf, f.factors.iter().all(|(_, e)| *e == 1));
        }
    }

    #[test]
    fn symbol_routes_agree(q in prop::sample::select(PRIMES.to_vec()), seed in any::<u64>()) {
        let fq = Fq::new(q).unwrap();
        let table = table_for(fq);
        let mut s = seed;
        let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) as u32 };
        let f = Poly::from_residues((0..(next() % 7)).map(|_| next() % q as u32).collect());
        let dd = 1 + (next() % 6) as usize;
        let mut dc: Vec<u32> = (0..dd).map(|_| next() % q as u32).collect();
        dc.push(1);
        let d = Poly::from_residues(dc);
        prop_assert_eq!(
            jacobi_symbol(fq, &f, &d).unwrap(),
            jacobi_by_factorization(fq, table, &f, &d).unwrap()
        );
    }

    #[test]
    fn character_is_multiplicative(
        (fq, f, g, d) in prop::sample::select(PRIMES.to_vec()).prop_flat_map(|q| {
            (Just(Fq::new(q).unwrap()), poly_in(q, 7), poly_in(q, 7), monic_in(q, 6))
        }),
    ) {
        prop_assume!(d.deg() > 0);
        let lhs = jacobi_symbol(fq, &fq.mul(&f, &g), &d).unwrap();
        let rhs = jacobi_symbol(fq, &f, &d).unwrap() * jacobi_symbol(fq, &g, &d).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reciprocity_law(q in prop::sample::select(PRIMES.to_vec()), seed in any::<u64>()) {
        let fq = Fq::new(q).unwrap();
        let mut s = seed | 1;
        let mut next = || { s ^= s << 13; s ^= s >> 7; s ^= s << 17; s };
        let mk = |n: &mut dyn FnMut() -> u64| {
            let deg = 1 + (n() % 5) as usize;
            let mut c: Vec<u32> = (0..deg).map(|_| (n() % q) as u32).collect();
            c.push(1);
            Poly::from_residues(c)
        };
        let a = mk(&mut next);
        let b = mk(&mut next);
        prop_assume!(fq.gcd(&a, &b).unwrap().is_one());
        let ab = jacobi_symbol(fq, &a, &b).unwrap().value();
        let ba = jacobi_symbol(fq, &b, &a).unwrap().value();
        prop_assert_eq!(ab * ba, reciprocity_sign(fq, a.deg(), b.deg()));
    }

    #[test]
    fn s_identity_random(p in 3u64..500, num in 0u64..1000, den in 1u64..1000) {
        prop_assume!(num < den);
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        let lf = LocalFactors::new(p, r).unwrap();
        let (lhs, rhs) = local_factor_s_identity(&lf);
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(local_factor_s_euler_form(&lf), lhs);
    }

    #[test]
    fn r_identity_random(p in 3u64..500, num in 0u64..100, den in 1u64..100) {
        prop_assume!(4 * num < 3 * den);
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        let lf = LocalFactors::new(p, r).unwrap();
        let id = local_factor_r_identity(&lf, 120);
        prop_assert!(id.holds);
        prop_assert_eq!(RIdentity::euler_form(&lf), id.closed_form);
    }

    #[test]
    fn divisor_function_consistency(k in 1u32..5, (fq, a, _b, _c) in field_and_polys()) {
        prop_assume!(!a.is_zero());
        let table = table_for(fq);
        let f = table.factor(&a).unwrap();
        let exact = divisor_fn_exact(k, &f);
        let approx = divisor_fn(k as f64, &f);
        let e: f64 = exact.to_string().parse().unwrap();
        prop_assert!((approx / e - 1.0).abs() < 1e-12);
        // h depends on the radical only
        let mut sq = f.clone();
        sq.unit = fq.pow_elem(f.unit, 2);
        for (_, e) in sq.factors.iter_mut() {
            *e *= 2;
        }
        prop_assert_eq!(sq.recompose(fq), fq.mul(&a, &a));
        prop_assert_eq!(h_fn(fq, &f), h_fn(fq, &sq));
    }
}

#[test]
fn gauss_count_matches_enumeration() {
    for q in [3u64, 5] {
        let fq = Fq::new(q).unwrap();
        for n in 1..=4 {
            let count = enumerate_monic(fq, n)
                .filter(|p| fq.is_irreducible(p).unwrap())
                .count() as u128;
            assert_eq!(count, pi_q_exact(q, n), "q={q} n={n}");
        }
        // sum_{d | n} d pi_q(d) = q^n
        for n in 1..=12usize {
            let total: u128 = (1..=n)
                .filter(|d| n % d == 0)
                .map(|d| d as u128 * pi_q_exact(q, d))
                .sum();
            assert_eq!(total, (q as u128).pow(n as u32));
        }
    }
}

#[test]
fn legendre_constant_rule() {
    // (a/B) = legendre(a)^deg B for a nonzero constant a
    let fq = Fq::new(5).unwrap();
    for d in enumerate_monic(fq, 3) {
        for a in 1..5i64 {
            let s = jacobi_symbol(fq, &fq.poly(&[a]), &d).unwrap();
            let expect = if fq.legendre_elem(a as u32) == 1 { Sign::Plus } else { Sign::Minus };
            assert_eq!(s, expect);
        }
    }
}
