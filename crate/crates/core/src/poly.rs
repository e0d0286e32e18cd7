//! Dense polynomials over a prime field `F_q`, for odd prime `q`.
//!
//! Polynomials store residues constant-term first; the zero polynomial is the
//! empty vector. All arithmetic goes through an [`Fq`] context so the field
//! order is fixed once and threaded through every call.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// An odd prime field order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fq {
    q: u32,
}

impl Fq {
    pub fn new(q: u64) -> Result<Self> {
        if q < 3 || q % 2 == 0 || q > u32::MAX as u64 / 2 || !is_prime_u64(q) {
            return Err(Error::InvalidFieldOrder(q));
        }
        Ok(Self { q: q as u32 })
    }

    #[inline]
    pub fn q(self) -> u32 {
        self.q
    }

    #[inline]
    pub fn q_u64(self) -> u64 {
        self.q as u64
    }

    /// `q^n` as an integer; panics on overflow, which only happens far
    /// outside any enumerable range.
    pub fn pow_q(self, n: usize) -> u64 {
        self.q_u64()
            .checked_pow(n as u32)
            .expect("q^n overflows u64")
    }

    #[inline]
    pub fn elem(self, x: i64) -> u32 {
        x.rem_euclid(self.q as i64) as u32
    }

    #[inline]
    pub(crate) fn add_e(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn sub_e(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub(crate) fn mul_e(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    pub fn pow_elem(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.q;
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_e(acc, base);
            }
            base = self.mul_e(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero residue.
    pub fn inv_elem(self, a: u32) -> u32 {
        debug_assert!(a % self.q != 0);
        self.pow_elem(a, self.q_u64() - 2)
    }

    /// Legendre symbol of a residue modulo `q`.
    pub fn legendre_elem(self, a: u32) -> i8 {
        match self.pow_elem(a, (self.q_u64() - 1) / 2) {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    /// Builds a polynomial from arbitrary integer coefficients, reducing mod q.
    pub fn poly(self, coeffs: &[i64]) -> Poly {
        Poly::from_residues(coeffs.iter().map(|&c| self.elem(c)).collect())
    }

    /// Parses the canonical text format: comma-separated residues, constant
    /// term first. The empty string is the zero polynomial.
    pub fn parse_poly(self, s: &str) -> Result<Poly> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Poly::zero());
        }
        let mut coeffs = Vec::new();
        for tok in s.split(',') {
            let v: u64 = tok
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient `{tok}` in `{s}`")))?;
            if v >= self.q_u64() {
                return Err(Error::Parse(format!(
                    "coefficient {v} is not a residue mod {}",
                    self.q
                )));
            }
            coeffs.push(v as u32);
        }
        Ok(Poly::from_residues(coeffs))
    }

    pub fn add(self, a: &Poly, b: &Poly) -> Poly {
        let (long, short) = if a.coeffs.len() >= b.coeffs.len() {
            (a, b)
        } else {
            (b, a)
        };
        let mut out = long.coeffs.clone();
        for (o, &s) in out.iter_mut().zip(&short.coeffs) {
            *o = self.add_e(*o, s);
        }
        Poly::from_residues(out)
    }

    pub fn neg(self, a: &Poly) -> Poly {
        Poly::from_residues(a.coeffs.iter().map(|&c| self.sub_e(0, c)).collect())
    }

    pub fn sub(self, a: &Poly, b: &Poly) -> Poly {
        self.add(a, &self.neg(b))
    }

    pub fn scale(self, a: &Poly, c: u32) -> Poly {
        Poly::from_residues(a.coeffs.iter().map(|&x| self.mul_e(x, c)).collect())
    }

    pub fn mul(self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let q = self.q as u64;
        // Accumulate in u64 and reduce lazily; each product is < q^2 < 2^62.
        let mut acc = vec![0u64; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                let slot = &mut acc[i + j];
                *slot = (*slot + x as u64 * y as u64) % q;
            }
        }
        Poly::from_residues(acc.into_iter().map(|v| v as u32).collect())
    }

    /// Euclidean division `a = quot * b + rem` with `deg rem < deg b`.
    pub fn div_rem(self, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
        let lead = b.leading().ok_or(Error::DivisionByZero)?;
        let db = b.coeffs.len() - 1;
        if a.coeffs.len() < b.coeffs.len() {
            return Ok((Poly::zero(), a.clone()));
        }
        let inv = self.inv_elem(lead);
        let mut rem = a.coeffs.clone();
        let mut quot = vec![0u32; a.coeffs.len() - db];
        for k in (0..quot.len()).rev() {
            let c = self.mul_e(rem[k + db], inv);
            quot[k] = c;
            if c != 0 {
                for (i, &bc) in b.coeffs.iter().enumerate() {
                    rem[k + i] = self.sub_e(rem[k + i], self.mul_e(c, bc));
                }
            }
        }
        rem.truncate(db);
        Ok((Poly::from_residues(quot), Poly::from_residues(rem)))
    }

    pub fn rem(self, a: &Poly, m: &Poly) -> Result<Poly> {
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut buf = a.coeffs.clone();
        self.rem_in_place(&mut buf, m);
        Ok(Poly::from_residues(buf))
    }

    /// Reduces `buf` modulo the nonzero polynomial `m`, leaving at most
    /// `deg m` residues (not normalized).
    pub(crate) fn rem_in_place(self, buf: &mut Vec<u32>, m: &Poly) {
        let dm = m.coeffs.len() - 1;
        let lead = m.coeffs[dm];
        let inv = if lead == 1 { 1 } else { self.inv_elem(lead) };
        while buf.len() > dm {
            let top = buf.len() - 1;
            let c = self.mul_e(buf[top], inv);
            if c != 0 {
                let shift = top - dm;
                for (i, &mc) in m.coeffs[..dm].iter().enumerate() {
                    buf[shift + i] = self.sub_e(buf[shift + i], self.mul_e(c, mc));
                }
            }
            buf.pop();
        }
    }

    pub fn mul_mod(self, a: &Poly, b: &Poly, m: &Poly) -> Result<Poly> {
        self.rem(&self.mul(a, b), m)
    }

    /// Splits off the leading coefficient: returns `(lead, monic)`.
    pub fn make_monic(self, a: &Poly) -> (u32, Poly) {
        match a.leading() {
            None => (0, Poly::zero()),
            Some(1) => (1, a.clone()),
            Some(lead) => (lead, self.scale(a, self.inv_elem(lead))),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(self, a: &Poly, b: &Poly) -> Result<Poly> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::InvalidArgument("gcd(0, 0) is undefined".into()));
        }
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y)?;
            x = y;
            y = r;
        }
        Ok(self.make_monic(&x).1)
    }

    pub fn derivative(self, a: &Poly) -> Poly {
        Poly::from_residues(
            a.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| self.mul_e(c, (i as u64 % self.q as u64) as u32))
                .collect(),
        )
    }

    /// `base^e mod m` by square-and-multiply with an arbitrary-precision exponent.
    pub fn pow_mod(self, base: &Poly, e: &BigUint, m: &Poly) -> Result<Poly> {
        if m.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut acc = self.rem(&Poly::one(), m)?;
        let b = self.rem(base, m)?;
        for i in (0..e.bits()).rev() {
            acc = self.mul_mod(&acc, &acc, m)?;
            if e.bit(i) {
                acc = self.mul_mod(&acc, &b, m)?;
            }
        }
        Ok(acc)
    }

    pub fn pow_mod_u64(self, base: &Poly, e: u64, m: &Poly) -> Result<Poly> {
        self.pow_mod(base, &BigUint::from(e), m)
    }

    /// True iff no square of a nonconstant polynomial divides `f`.
    pub fn is_squarefree(self, f: &Poly) -> Result<bool> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial("is_squarefree"));
        }
        if f.degree() == Some(0) {
            return Ok(true);
        }
        let d = self.derivative(f);
        if d.is_zero() {
            // f is a p-th power
            return Ok(false);
        }
        Ok(self.gcd(f, &d)?.is_one())
    }

    /// Rabin's irreducibility test for a monic polynomial of positive degree.
    pub fn is_irreducible(self, f: &Poly) -> Result<bool> {
        if !f.is_monic() {
            return Err(Error::NotMonic("is_irreducible"));
        }
        let n = f.coeffs.len() - 1;
        if n == 0 {
            return Err(Error::InvalidArgument(
                "is_irreducible needs positive degree".into(),
            ));
        }
        if n == 1 {
            return Ok(true);
        }
        // frob[k] = t^(q^k) mod f
        let t = Poly::t();
        let mut frob = Vec::with_capacity(n + 1);
        frob.push(self.rem(&t, f)?);
        for k in 1..=n {
            let next = self.pow_mod_u64(&frob[k - 1], self.q_u64(), f)?;
            frob.push(next);
        }
        if !self.sub(&frob[n], &t).is_zero() {
            return Ok(false);
        }
        for ell in prime_divisors(n as u64) {
            let h = self.sub(&frob[n / ell as usize], &t);
            if h.is_zero() || !self.gcd(f, &h)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A polynomial over `F_q`, residues stored constant term first.
///
/// The field order is not stored; arithmetic happens through [`Fq`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<u32>,
}

impl Poly {
    /// Builds a polynomial from residues already reduced mod q, trimming
    /// trailing zeros.
    pub fn from_residues(mut coeffs: Vec<u32>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    pub fn t() -> Self {
        Self { coeffs: vec![0, 1] }
    }

    /// The `index`-th monic polynomial of degree `n` in canonical order: the
    /// lower coefficients are the base-q digits of `index`, constant term
    /// least significant.
    pub fn monic_from_index(fq: Fq, n: usize, mut index: u64) -> Self {
        let q = fq.q_u64();
        let mut coeffs = Vec::with_capacity(n + 1);
        for _ in 0..n {
            coeffs.push((index % q) as u32);
            index /= q;
        }
        coeffs.push(1);
        Self { coeffs }
    }

    /// Position of this polynomial among polynomials of its degree when its
    /// leading coefficient is ignored; inverse of [`Poly::monic_from_index`].
    pub fn monic_index(&self, fq: Fq) -> u64 {
        let q = fq.q_u64();
        let body = &self.coeffs[..self.coeffs.len().saturating_sub(1)];
        body.iter().rev().fold(0u64, |acc, &c| acc * q + c as u64)
    }

    /// Base-q encoding of the full residue vector (used for residues mod a
    /// fixed modulus, where every residue of degree < d gets a slot).
    pub fn residue_index(coeffs: &[u32], q: u64) -> usize {
        coeffs.iter().rev().fold(0u64, |acc, &c| acc * q + c as u64) as usize
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0; only for callers that
    /// have already excluded zero.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Option<u32> {
        self.coeffs.last().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(1)
    }

    /// `|f| = q^deg f`, with `|0| = 0`.
    pub fn norm(&self, fq: Fq) -> u64 {
        match self.degree() {
            None => 0,
            Some(d) => fq.pow_q(d),
        }
    }
}

impl Ord for Poly {
    /// Canonical order: by degree, then coefficients from the top down. This
    /// agrees with [`enumerate_monic`] order within a degree.
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// All `q^n` monic polynomials of degree `n`, constant term varying fastest.
pub fn enumerate_monic(fq: Fq, n: usize) -> impl Iterator<Item = Poly> + Clone {
    (0..fq.pow_q(n)).map(move |i| Poly::monic_from_index(fq, n, i))
}

/// Canonical factorization `unit * prod P_i^e_i`, factors monic and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactoredPoly {
    pub unit: u32,
    pub factors: Vec<(Poly, u32)>,
}

impl FactoredPoly {
    pub fn recompose(&self, fq: Fq) -> Poly {
        let mut acc = Poly::from_residues(vec![self.unit]);
        for (p, e) in &self.factors {
            for _ in 0..*e {
                acc = fq.mul(&acc, p);
            }
        }
        acc
    }

    /// Distinct prime divisors.
    pub fn primes(&self) -> impl Iterator<Item = &Poly> {
        self.factors.iter().map(|(p, _)| p)
    }

    /// True iff every multiplicity is even (a monic perfect square).
    pub fn is_square(&self) -> bool {
        self.factors.iter().all(|(_, e)| e % 2 == 0)
    }
}

/// Monic irreducibles of every degree up to a bound, each degree sorted.
#[derive(Clone, Debug)]
pub struct IrreducibleTable {
    fq: Fq,
    // by_degree[d] holds the degree-d irreducibles; by_degree[0] is empty.
    by_degree: Vec<Vec<Poly>>,
}

impl IrreducibleTable {
    pub fn build(fq: Fq, max_deg: usize) -> Self {
        let mut table = Self {
            fq,
            by_degree: vec![Vec::new()],
        };
        table.extend_to(max_deg);
        table
    }

    /// Assembles a table from precomputed lists (e.g. a cache file).
    pub fn from_lists(fq: Fq, mut by_degree: Vec<Vec<Poly>>) -> Self {
        if by_degree.is_empty() {
            by_degree.push(Vec::new());
        }
        for list in by_degree.iter_mut() {
            list.sort();
        }
        Self { fq, by_degree }
    }

    pub fn extend_to(&mut self, max_deg: usize) {
        let fq = self.fq;
        while self.max_degree() < max_deg {
            let d = self.max_degree() + 1;
            let list: Vec<Poly> = if d == 1 {
                enumerate_monic(fq, 1).collect()
            } else {
                (0..fq.pow_q(d))
                    .into_par_iter()
                    .map(|i| Poly::monic_from_index(fq, d, i))
                    .filter(|p| fq.is_irreducible(p).expect("monic, positive degree"))
                    .collect()
            };
            self.by_degree.push(list);
        }
    }

    pub fn field(&self) -> Fq {
        self.fq
    }

    pub fn max_degree(&self) -> usize {
        self.by_degree.len() - 1
    }

    pub fn degree(&self, d: usize) -> &[Poly] {
        self.by_degree.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Irreducibles of degree `1..=max_deg` in canonical order.
    pub fn up_to(&self, max_deg: usize) -> impl Iterator<Item = &Poly> {
        self.by_degree
            .iter()
            .take(max_deg.min(self.max_degree()) + 1)
            .flatten()
    }

    /// Factorization by trial division against the table.
    pub fn factor(&self, f: &Poly) -> Result<FactoredPoly> {
        let fq = self.fq;
        let deg = f.degree().ok_or(Error::ZeroPolynomial("factor"))?;
        if deg / 2 > self.max_degree() {
            return Err(Error::TableTooSmall {
                needed: deg / 2,
                have: self.max_degree(),
            });
        }
        let (unit, mut rest) = fq.make_monic(f);
        let mut factors = Vec::new();
        'outer: for d in 1..=self.max_degree() {
            for p in self.degree(d) {
                if 2 * d > rest.deg() {
                    break 'outer;
                }
                let mut e = 0;
                loop {
                    let (quot, rem) = fq.div_rem(&rest, p)?;
                    if !rem.is_zero() {
                        break;
                    }
                    rest = quot;
                    e += 1;
                }
                if e > 0 {
                    factors.push((p.clone(), e));
                }
            }
        }
        if rest.deg() >= 1 {
            // no factor of degree <= half its degree remains
            factors.push((rest, 1));
        }
        factors.sort();
        Ok(FactoredPoly { unit, factors })
    }
}

/// Exact number of monic irreducibles of degree `n`:
/// `(1/n) * sum_{d | n} mu(d) q^(n/d)`.
pub fn pi_q_exact(q: u64, n: usize) -> u128 {
    assert!(n >= 1, "pi_q is defined for n >= 1");
    let mut total: i128 = 0;
    for d in 1..=n {
        if n % d == 0 {
            let mu = mobius(d as u64) as i128;
            if mu != 0 {
                total += mu * (q as i128).pow((n / d) as u32);
            }
        }
    }
    (total / n as i128) as u128
}

/// `Pi_q(n) = sum_{m <= n} pi_q(m)`.
pub fn big_pi_q(q: u64, n: usize) -> u128 {
    (1..=n).map(|m| pi_q_exact(q, m)).sum()
}

pub fn mobius(mut n: u64) -> i32 {
    assert!(n >= 1);
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn is_prime_u64(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f5() -> Fq {
        Fq::new(5).unwrap()
    }

    #[test]
    fn rejects_bad_orders() {
        for q in [0, 1, 2, 4, 9, 15, 21] {
            assert!(Fq::new(q).is_err(), "q={q}");
        }
        for q in [3, 5, 7, 13, 17] {
            assert!(Fq::new(q).is_ok());
        }
    }

    #[test]
    fn mul_examples() {
        let f = f5();
        let a = f.poly(&[1, 1]);
        let b = f.poly(&[4, 1]);
        assert_eq!(f.mul(&a, &b), f.poly(&[4, 0, 1]));
        assert_eq!(f.mul(&a, &Poly::one()), a);
        assert_eq!(f.mul(&a, &Poly::zero()), Poly::zero());
    }

    #[test]
    fn div_rem_examples() {
        let f = f5();
        let (q, r) = f.div_rem(&f.poly(&[0, 0, 1]), &f.poly(&[2, 1])).unwrap();
        assert_eq!(q, f.poly(&[3, 1]));
        assert_eq!(r, f.poly(&[4]));

        let a = f.poly(&[3, 1, 1]);
        assert_eq!(f.div_rem(&a, &a).unwrap(), (Poly::one(), Poly::zero()));

        let small = f.poly(&[1, 2]);
        let big = f.poly(&[1, 0, 0, 1]);
        assert_eq!(f.div_rem(&small, &big).unwrap(), (Poly::zero(), small));

        assert!(matches!(
            f.div_rem(&a, &Poly::zero()),
            Err(Error::DivisionByZero)
        ));
    }

    #[test]
    fn gcd_examples() {
        let f = f5();
        let a = f.poly(&[2, 4]); // 4t + 2, monic form t + 3
        assert_eq!(f.gcd(&a, &Poly::zero()).unwrap(), f.poly(&[3, 1]));
        assert_eq!(
            f.gcd(&f.poly(&[4, 0, 1]), &f.poly(&[1, 1])).unwrap(),
            f.poly(&[1, 1])
        );
        assert!(f.gcd(&f.poly(&[2, 0, 1]), &f.poly(&[0, 1])).unwrap().is_one());
        assert!(f.gcd(&Poly::zero(), &Poly::zero()).is_err());
    }

    #[test]
    fn pow_mod_examples() {
        let f = f5();
        let m = f.poly(&[2, 0, 1]);
        let t = Poly::t();
        assert_eq!(f.pow_mod_u64(&t, 12, &m).unwrap(), f.poly(&[4]));
        assert!(f.pow_mod_u64(&t, 0, &m).unwrap().is_one());
        let b = f.poly(&[1, 2, 3]);
        assert_eq!(f.pow_mod_u64(&b, 1, &m).unwrap(), f.rem(&b, &m).unwrap());
        assert!(f.pow_mod_u64(&t, 3, &Poly::zero()).is_err());
    }

    #[test]
    fn squarefree_examples() {
        let f = f5();
        assert!(!f.is_squarefree(&f.poly(&[0, 0, 1])).unwrap());
        assert!(f.is_squarefree(&f.poly(&[1, 0, 1])).unwrap());
        let f3 = Fq::new(3).unwrap();
        assert!(!f3.is_squarefree(&f3.poly(&[0, 0, 0, 1])).unwrap());
        assert!(f.is_squarefree(&Poly::zero()).is_err());
    }

    #[test]
    fn irreducible_examples() {
        let f = f5();
        assert!(f.is_irreducible(&Poly::t()).unwrap());
        assert!(f.is_irreducible(&f.poly(&[2, 0, 1])).unwrap());
        assert!(!f.is_irreducible(&f.poly(&[1, 0, 1])).unwrap());
        assert!(matches!(
            f.is_irreducible(&f.poly(&[1, 2])),
            Err(Error::NotMonic(_))
        ));
    }

    #[test]
    fn enumeration_order() {
        let f = f5();
        let linear: Vec<_> = enumerate_monic(f, 1).collect();
        let expect: Vec<_> = (0..5).map(|a| f.poly(&[a, 1])).collect();
        assert_eq!(linear, expect);
        assert_eq!(enumerate_monic(f, 0).collect::<Vec<_>>(), vec![Poly::one()]);
        let f3 = Fq::new(3).unwrap();
        assert_eq!(enumerate_monic(f3, 2).count(), 9);
        let all: Vec<_> = enumerate_monic(f, 3).collect();
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        for (i, p) in all.iter().enumerate() {
            assert_eq!(p.monic_index(f), i as u64);
        }
    }

    #[test]
    fn irreducible_counts() {
        let f = f5();
        let table = IrreducibleTable::build(f, 2);
        assert_eq!(table.degree(1).len(), 5);
        assert_eq!(table.degree(2).len(), 10);
        let f3 = Fq::new(3).unwrap();
        assert_eq!(IrreducibleTable::build(f3, 4).degree(4).len(), 18);
        assert_eq!(pi_q_exact(5, 1), 5);
        assert_eq!(pi_q_exact(5, 2), 10);
        assert_eq!(pi_q_exact(3, 3), 8);
    }

    #[test]
    fn factor_examples() {
        let f = f5();
        let table = IrreducibleTable::build(f, 3);
        assert_eq!(
            table.factor(&Poly::t()).unwrap().factors,
            vec![(Poly::t(), 1)]
        );
        assert_eq!(
            table.factor(&f.poly(&[1, 0, 1])).unwrap().factors,
            vec![(f.poly(&[2, 1]), 1), (f.poly(&[3, 1]), 1)]
        );
        assert_eq!(
            table.factor(&f.poly(&[1, 2, 1])).unwrap().factors,
            vec![(f.poly(&[1, 1]), 2)]
        );
        assert!(table.factor(&Poly::zero()).is_err());
        let fp = table.factor(&f.poly(&[3, 0, 2])).unwrap();
        assert_eq!(fp.unit, 2);
        assert_eq!(fp.recompose(f), f.poly(&[3, 0, 2]));
    }

    #[test]
    fn text_format() {
        let f = f5();
        let p = f.parse_poly("1,3,1").unwrap();
        assert_eq!(p, f.poly(&[1, 3, 1]));
        assert_eq!(p.to_string(), "1,3,1");
        assert_eq!(f.parse_poly("").unwrap(), Poly::zero());
        assert!(f.parse_poly("1,7").is_err());
        assert!(f.parse_poly("1,x").is_err());
    }

    #[test]
    fn mobius_values() {
        let expect = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0];
        for (n, &m) in (1..=12).zip(&expect) {
            assert_eq!(mobius(n), m, "mu({n})");
        }
    }
}
