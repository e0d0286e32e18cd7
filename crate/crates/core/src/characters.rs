//! Quadratic residue symbols over `F_q[t]` and the characters `chi_D(f) = (f/D)`.
//!
//! Two independent evaluations are kept side by side: the Euler criterion on
//! each prime factor of the modulus, and a Euclid-style reciprocity loop. The
//! reciprocity law used is, for coprime monic `A`, `B`,
//! `(A/B)(B/A) = (-1)^((q-1)/2 * deg A * deg B)`, and a nonzero constant `a`
//! satisfies `(a/B) = legendre(a)^(deg B)`.

use std::ops::Mul;

use num_bigint::BigUint;

use crate::error::{Error, Result};
use crate::poly::{enumerate_monic, Fq, IrreducibleTable, Poly};

/// Value of a quadratic character: -1, 0 or +1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Zero,
    Plus,
}

impl Sign {
    pub fn from_i8(v: i8) -> Self {
        match v.signum() {
            -1 => Sign::Minus,
            0 => Sign::Zero,
            _ => Sign::Plus,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Zero => 0,
            Sign::Plus => 1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_i8(self.value() * rhs.value())
    }
}

/// `(-1)^((q-1)/2 * deg_a * deg_b)` as +1 or -1.
pub fn reciprocity_sign(fq: Fq, deg_a: usize, deg_b: usize) -> i8 {
    let half = (fq.q_u64() - 1) / 2;
    if (half * deg_a as u64 * deg_b as u64) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(f/P)` for a monic irreducible `P`, computed as `f^((|P|-1)/2) mod P`.
pub fn legendre_symbol_euler(fq: Fq, f: &Poly, p: &Poly) -> Result<Sign> {
    if !p.is_monic() || p.deg() == 0 || !fq.is_irreducible(p)? {
        return Err(Error::NotIrreducible(p.to_string()));
    }
    legendre_unchecked(fq, f, p)
}

fn legendre_unchecked(fq: Fq, f: &Poly, p: &Poly) -> Result<Sign> {
    let norm = BigUint::from(fq.q()).pow(p.deg() as u32);
    let exp = (norm - 1u32) >> 1;
    let r = fq.pow_mod(f, &exp, p)?;
    if r.is_zero() {
        Ok(Sign::Zero)
    } else if r.is_one() {
        Ok(Sign::Plus)
    } else if r.coeffs() == [fq.q() - 1] {
        Ok(Sign::Minus)
    } else {
        Err(Error::Inconsistency(format!(
            "Euler criterion gave {r} modulo {p}, not 0 or +-1"
        )))
    }
}

/// `chi_D(f) = (f/D)` for monic `D` by the reciprocity loop. `D = 1` gives +1.
pub fn jacobi_symbol(fq: Fq, f: &Poly, d: &Poly) -> Result<Sign> {
    if d.is_zero() {
        return Err(Error::ZeroPolynomial("jacobi_symbol"));
    }
    if !d.is_monic() {
        return Err(Error::NotMonic("jacobi_symbol"));
    }
    Ok(Sign::from_i8(jacobi_residues(fq, f.coeffs(), d.coeffs())))
}

/// Stack capacity of the allocation-free path.
const SMALL: usize = 24;

/// `(f/d)` for residue slices, `d` monic and trimmed.
pub(crate) fn jacobi_residues(fq: Fq, f: &[u32], d: &[u32]) -> i8 {
    if f.len() <= SMALL && d.len() <= SMALL {
        jacobi_small(fq, f, d, |x| fq.inv_elem(x), |x| fq.legendre_elem(x), |x, y| fq.mul_e(x, y))
    } else {
        jacobi_generic(fq, f, d)
    }
}

/// Largest q given a full multiplication table.
const MUL_TABLE_MAX: u32 = 256;

/// Inverse, Legendre and (for small q) multiplication tables for repeated
/// symbol evaluation.
pub struct SymbolKernel {
    fq: Fq,
    inv: Vec<u32>,
    leg: Vec<i8>,
    mul: Vec<u32>,
}

impl SymbolKernel {
    /// Tables are `O(q)` in size.
    pub fn new(fq: Fq) -> Self {
        let q = fq.q();
        let mut inv = vec![0u32; q as usize];
        let mut leg = vec![0i8; q as usize];
        for x in 1..q {
            inv[x as usize] = fq.inv_elem(x);
            leg[x as usize] = fq.legendre_elem(x);
        }
        let mul = if q <= MUL_TABLE_MAX {
            (0..q * q).map(|i| fq.mul_e(i / q, i % q)).collect()
        } else {
            Vec::new()
        };
        Self { fq, inv, leg, mul }
    }

    /// `sum_{f in M_n} chi_D(f)`, stepping through `M_n` in place.
    pub fn char_sum_over_mn(&self, d: &Poly, n: usize) -> Result<i64> {
        if d.is_zero() {
            return Err(Error::ZeroPolynomial("char_sum_over_mn"));
        }
        if !d.is_monic() {
            return Err(Error::NotMonic("char_sum_over_mn"));
        }
        let q = self.fq.q();
        let mut f = vec![0u32; n + 1];
        f[n] = 1;
        let mut total = 0i64;
        loop {
            let len = f.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
            total += self.symbol(&f[..len], d.coeffs()) as i64;
            let mut i = 0;
            while i < n && f[i] == q - 1 {
                f[i] = 0;
                i += 1;
            }
            if i == n {
                return Ok(total);
            }
            f[i] += 1;
        }
    }

    /// `(f/d)` for monic trimmed `d`.
    pub fn symbol(&self, f: &[u32], d: &[u32]) -> i8 {
        let fq = self.fq;
        if f.len() > SMALL || d.len() > SMALL {
            return jacobi_generic(fq, f, d);
        }
        let inv = |x: u32| self.inv[x as usize];
        let leg = |x: u32| self.leg[x as usize];
        if self.mul.is_empty() {
            jacobi_small(fq, f, d, inv, leg, |x, y| fq.mul_e(x, y))
        } else {
            let q = fq.q();
            let tab = &self.mul[..];
            jacobi_small(fq, f, d, inv, leg, move |x, y| tab[(x * q + y) as usize])
        }
    }
}

fn jacobi_generic(fq: Fq, f: &[u32], d: &[u32]) -> i8 {
    let d = Poly::from_residues(d.to_vec());
    let mut a = fq.rem(&Poly::from_residues(f.to_vec()), &d).expect("nonzero modulus");
    let mut b = d;
    let mut sign = 1i8;
    loop {
        if b.deg() == 0 {
            return sign;
        }
        if a.is_zero() {
            return 0;
        }
        let (lead, am) = fq.make_monic(&a);
        if b.deg() % 2 == 1 {
            sign *= fq.legendre_elem(lead);
        }
        if am.deg() == 0 {
            return sign;
        }
        sign *= reciprocity_sign(fq, am.deg(), b.deg());
        a = fq.rem(&b, &am).expect("nonzero modulus");
        b = am;
    }
}

/// `a mod b` in place for monic `b`; `len` is updated and trimmed.
#[inline]
fn rem_monic_small(fq: Fq, a: &mut [u32], len: &mut usize, b: &[u32]) {
    rem_monic_with(fq, a, len, b, |x, y| fq.mul_e(x, y))
}

#[inline]
fn rem_monic_with(fq: Fq, a: &mut [u32], len: &mut usize, b: &[u32], mul: impl Fn(u32, u32) -> u32) {
    let db = b.len() - 1;
    while *len > db {
        let top = *len - 1;
        let c = a[top];
        if c != 0 {
            let shift = top - db;
            for (i, &bc) in b[..db].iter().enumerate() {
                a[shift + i] = fq.sub_e(a[shift + i], mul(c, bc));
            }
        }
        *len -= 1;
    }
    while *len > 0 && a[*len - 1] == 0 {
        *len -= 1;
    }
}

#[inline]
fn jacobi_small(
    fq: Fq,
    f: &[u32],
    d: &[u32],
    inv: impl Fn(u32) -> u32,
    leg: impl Fn(u32) -> i8,
    mul: impl Fn(u32, u32) -> u32 + Copy,
) -> i8 {
    let mut bufs = [[0u32; SMALL]; 2];
    let mut lens = [f.len(), d.len()];
    bufs[0][..f.len()].copy_from_slice(f);
    bufs[1][..d.len()].copy_from_slice(d);
    // a = bufs[ia], b = bufs[1 - ia]
    let mut ia = 0usize;
    {
        let (x, y) = bufs.split_at_mut(1);
        let lb = lens[1];
        rem_monic_with(fq, &mut x[0], &mut lens[0], &y[0][..lb], mul);
    }
    let mut sign = 1i8;
    loop {
        let ib = 1 - ia;
        let (la, lb) = (lens[ia], lens[ib]);
        if lb == 1 {
            return sign;
        }
        if la == 0 {
            return 0;
        }
        let lead = bufs[ia][la - 1];
        if (lb - 1) % 2 == 1 {
            sign *= leg(lead);
        }
        if la == 1 {
            return sign;
        }
        if lead != 1 {
            let v = inv(lead);
            for x in bufs[ia][..la].iter_mut() {
                *x = mul(*x, v);
            }
        }
        sign *= reciprocity_sign(fq, la - 1, lb - 1);
        // b <- b mod a, then the roles swap
        let (x, y) = bufs.split_at_mut(1);
        let (bm, am) = if ib == 0 { (&mut x[0], &y[0]) } else { (&mut y[0], &x[0]) };
        rem_monic_with(fq, bm, &mut lens[ib], &am[..la], mul);
        ia = ib;
    }
}

/// Euler-criterion values `x^((|P|-1)/2)` for every residue `x` modulo a
/// prime `P`. A generator `g` is located and checked to satisfy
/// `g^((|P|-1)/2) = -1`; then `(g^i)^((|P|-1)/2) = (-1)^i`, so walking the
/// powers of `g` fills the table.
pub struct EulerTable {
    prime: Poly,
    values: Vec<i8>,
}

impl EulerTable {
    pub fn new(fq: Fq, p: &Poly) -> Result<Self> {
        if !p.is_monic() || p.deg() == 0 {
            return Err(Error::NotIrreducible(p.to_string()));
        }
        let q = fq.q_u64();
        let d = p.deg();
        let norm = p.norm(fq);
        let order = norm - 1;
        let g = find_generator(fq, p, order)?;
        let half = fq.pow_mod_u64(&g, order / 2, p)?;
        if half.coeffs() != [fq.q() - 1] {
            return Err(Error::Inconsistency(format!(
                "generator {g} of ({p}) has half power {half}"
            )));
        }
        let mut values = vec![0i8; norm as usize];
        let mut x = vec![0u32; d];
        x[0] = 1;
        let gc = g.coeffs();
        let mut prod = vec![0u32; 2 * d];
        for i in 0..order {
            let idx = Poly::residue_index(&x, q);
            if values[idx] != 0 {
                return Err(Error::Inconsistency(format!("{g} is not a generator modulo {p}")));
            }
            values[idx] = if i % 2 == 0 { 1 } else { -1 };
            prod.iter_mut().for_each(|c| *c = 0);
            for (i, &a) in x.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in gc.iter().enumerate() {
                    prod[i + j] = fq.add_e(prod[i + j], fq.mul_e(a, b));
                }
            }
            let mut len = prod.len();
            rem_monic_small(fq, &mut prod, &mut len, p.coeffs());
            x.iter_mut().for_each(|c| *c = 0);
            x[..len].copy_from_slice(&prod[..len]);
        }
        Ok(Self {
            prime: p.clone(),
            values,
        })
    }

    pub fn prime(&self) -> &Poly {
        &self.prime
    }

    /// `(f/P)` for residue coefficients of any length.
    pub fn symbol(&self, fq: Fq, f: &[u32]) -> i8 {
        let mut buf = [0u32; SMALL];
        if f.len() > SMALL {
            let mut v = f.to_vec();
            fq.rem_in_place(&mut v, &self.prime);
            return self.values[Poly::residue_index(&v, fq.q_u64())];
        }
        let mut len = f.len();
        buf[..len].copy_from_slice(f);
        rem_monic_small(fq, &mut buf, &mut len, self.prime.coeffs());
        self.values[Poly::residue_index(&buf[..len], fq.q_u64())]
    }
}

fn find_generator(fq: Fq, p: &Poly, order: u64) -> Result<Poly> {
    let mut factors = Vec::new();
    let mut m = order;
    let mut r = 2;
    while r * r <= m {
        if m % r == 0 {
            factors.push(r);
            while m % r == 0 {
                m /= r;
            }
        }
        r += 1;
    }
    if m > 1 {
        factors.push(m);
    }
    let d = p.deg();
    let q = fq.q_u64();
    for idx in 1..=order {
        let mut rest = idx;
        let coeffs: Vec<u32> = (0..d)
            .map(|_| {
                let c = (rest % q) as u32;
                rest /= q;
                c
            })
            .collect();
        let g = Poly::from_residues(coeffs);
        let mut ok = true;
        for &f in &factors {
            if fq.pow_mod_u64(&g, order / f, p)?.is_one() {
                ok = false;
                break;
            }
        }
        if ok {
            return Ok(g);
        }
    }
    Err(Error::NotIrreducible(p.to_string()))
}

/// Result of comparing the reciprocity loop against factored Euler symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolComparison {
    pub q: u64,
    pub max_deg: usize,
    pub pairs: u64,
    pub mismatches: u64,
    /// First disagreement as `(f, D)` in canonical order.
    pub first_mismatch: Option<(Poly, Poly)>,
}

/// Compares [`jacobi_symbol`] with the product of Euler-criterion symbols
/// over the factorization of `D`, for every monic `D` with `deg D <= max_deg`
/// and every `f` that is zero, a nonzero constant, or monic of degree
/// `<= max_deg`.
pub fn compare_symbol_routes(table: &IrreducibleTable, max_deg: usize) -> Result<SymbolComparison> {
    use rayon::prelude::*;
    use std::collections::HashMap;

    let fq = table.field();
    let mut fs: Vec<Poly> = vec![Poly::zero()];
    fs.extend((1..fq.q()).map(|c| Poly::from_residues(vec![c])));
    for n in 1..=max_deg {
        fs.extend(enumerate_monic(fq, n));
    }
    let ds: Vec<Poly> = (0..=max_deg).flat_map(|n| enumerate_monic(fq, n)).collect();
    let factored = ds
        .iter()
        .map(|d| table.factor(d))
        .collect::<Result<Vec<_>>>()?;

    // Euler symbols of every f modulo a prime, over the list fs
    let column = |p: &Poly| -> Result<Vec<i8>> {
        let tab = EulerTable::new(fq, p)?;
        Ok(fs.iter().map(|f| tab.symbol(fq, f.coeffs())).collect())
    };
    // primes that can share a modulus with a larger prime are kept
    let small: HashMap<Poly, Vec<i8>> = table
        .up_to(max_deg / 2)
        .map(|p| Ok((p.clone(), column(p)?)))
        .collect::<Result<_>>()?;

    let mut groups: HashMap<Option<Poly>, Vec<usize>> = HashMap::new();
    for (i, fd) in factored.iter().enumerate() {
        let key = fd
            .primes()
            .filter(|p| !small.contains_key(*p))
            .max_by(|a, b| a.deg().cmp(&b.deg()))
            .cloned();
        groups.entry(key).or_default().push(i);
    }
    let mut groups: Vec<(Option<Poly>, Vec<usize>)> = groups.into_iter().collect();
    groups.sort_by_key(|(_, v)| v[0]);

    let kernel = SymbolKernel::new(fq);
    let results = groups
        .par_iter()
        .map(|(key, members)| -> Result<(u64, Option<(usize, usize)>)> {
            let big = key.as_ref().map(|p| Ok::<_, Error>((p, column(p)?))).transpose()?;
            let mut bad = 0u64;
            let mut first: Option<(usize, usize)> = None;
            let mut acc = vec![1i8; fs.len()];
            for &di in members {
                let d = &ds[di];
                acc.iter_mut().for_each(|a| *a = 1);
                for (p, e) in &factored[di].factors {
                    let col = match small.get(p) {
                        Some(c) => c,
                        None => big
                            .as_ref()
                            .filter(|(bp, _)| *bp == p)
                            .map(|(_, c)| c)
                            .ok_or_else(|| Error::Inconsistency(format!("two large primes in {d}")))?,
                    };
                    for (a, &s) in acc.iter_mut().zip(col) {
                        if e % 2 == 1 || s == 0 {
                            *a *= s;
                        }
                    }
                }
                for (fi, f) in fs.iter().enumerate() {
                    if kernel.symbol(f.coeffs(), d.coeffs()) != acc[fi] {
                        bad += 1;
                        if first.is_none_or(|(fd, ff)| (di, fi) < (fd, ff)) {
                            first = Some((di, fi));
                        }
                    }
                }
            }
            Ok((bad, first))
        })
        .collect::<Result<Vec<_>>>()?;

    let mismatches = results.iter().map(|r| r.0).sum();
    let first = results.iter().filter_map(|r| r.1).min();
    Ok(SymbolComparison {
        q: fq.q_u64(),
        max_deg,
        pairs: fs.len() as u64 * ds.len() as u64,
        mismatches,
        first_mismatch: first.map(|(di, fi)| (fs[fi].clone(), ds[di].clone())),
    })
}

/// `chi_D(f)` as the product of Euler-criterion symbols over the
/// factorization of `D`. Independent of [`jacobi_symbol`].
pub fn jacobi_by_factorization(
    fq: Fq,
    table: &IrreducibleTable,
    f: &Poly,
    d: &Poly,
) -> Result<Sign> {
    if !d.is_monic() {
        return Err(Error::NotMonic("jacobi_by_factorization"));
    }
    let fd = table.factor(d)?;
    let mut acc = Sign::Plus;
    for (p, e) in &fd.factors {
        let s = legendre_unchecked(fq, f, p)?;
        if e % 2 == 1 || s == Sign::Zero {
            acc = acc * s;
        }
    }
    Ok(acc)
}

/// `sum_{f in M_n} chi_D(f)` by direct enumeration.
pub fn char_sum_over_mn(fq: Fq, d: &Poly, n: usize) -> Result<i64> {
    SymbolKernel::new(fq).char_sum_over_mn(d, n)
}

/// Largest residue table kept per prime; bigger primes fall back to the
/// reciprocity loop.
const MAX_RESIDUE_TABLE: u64 = 1 << 16;

struct PrimeEntry {
    poly: Poly,
    // squares[i] is (x/P) for the residue x with base-q index i
    squares: Option<Vec<i8>>,
}

/// Precomputed data for evaluating `chi_D(P)` over a fixed list of primes,
/// for many moduli `D`. Shared read-only across workers.
pub struct PrimeCharacters {
    fq: Fq,
    max_deg: usize,
    entries: Vec<PrimeEntry>,
}

impl PrimeCharacters {
    /// Covers every irreducible of degree `<= max_deg` in canonical order.
    pub fn new(table: &IrreducibleTable, max_deg: usize) -> Result<Self> {
        if table.max_degree() < max_deg {
            return Err(Error::TableTooSmall {
                needed: max_deg,
                have: table.max_degree(),
            });
        }
        let fq = table.field();
        let entries = table
            .up_to(max_deg)
            .map(|p| PrimeEntry {
                poly: p.clone(),
                squares: (p.norm(fq) <= MAX_RESIDUE_TABLE).then(|| residue_table(fq, p)),
            })
            .collect();
        Ok(Self {
            fq,
            max_deg,
            entries,
        })
    }

    pub fn field(&self) -> Fq {
        self.fq
    }

    pub fn max_degree(&self) -> usize {
        self.max_deg
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn prime(&self, i: usize) -> &Poly {
        &self.entries[i].poly
    }

    pub fn primes(&self) -> impl Iterator<Item = &Poly> {
        self.entries.iter().map(|e| &e.poly)
    }

    /// Number of covered primes of degree `<= deg`; primes are sorted by
    /// degree so these form a prefix.
    pub fn count_up_to(&self, deg: usize) -> usize {
        self.entries.partition_point(|e| e.poly.deg() <= deg)
    }

    /// `chi_D(P_i) = (P_i/D) = sign * (D mod P_i / P_i)` for monic `D`.
    pub fn chi(&self, d: &Poly, i: usize) -> i8 {
        let entry = &self.entries[i];
        let p = &entry.poly;
        let mut buf = d.coeffs().to_vec();
        self.fq.rem_in_place(&mut buf, p);
        let s = match &entry.squares {
            Some(tab) => tab[Poly::residue_index(&buf, self.fq.q_u64())],
            None => jacobi_symbol(self.fq, &Poly::from_residues(buf), p)
                .expect("monic prime modulus")
                .value(),
        };
        s * reciprocity_sign(self.fq, d.deg(), p.deg())
    }

    /// `chi_D(P)` for the first `count` primes.
    pub fn chi_prefix(&self, d: &Poly, count: usize) -> Vec<i8> {
        (0..count).map(|i| self.chi(d, i)).collect()
    }
}

/// Quadratic-residue indicator for every residue class modulo the prime `p`.
fn residue_table(fq: Fq, p: &Poly) -> Vec<i8> {
    let size = p.norm(fq) as usize;
    let q = fq.q_u64();
    let d = p.deg();
    let mut tab = vec![-1i8; size];
    tab[0] = 0;
    let mut x = vec![0u32; d];
    for idx in 1..size {
        let mut rest = idx as u64;
        for c in x.iter_mut() {
            *c = (rest % q) as u32;
            rest /= q;
        }
        let xp = Poly::from_residues(x.clone());
        let mut sq = fq.mul(&xp, &xp).coeffs().to_vec();
        fq.rem_in_place(&mut sq, p);
        tab[Poly::residue_index(&sq, q)] = 1;
    }
    tab
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euler_examples() {
        let f = Fq::new(5).unwrap();
        let t = Poly::t();
        assert_eq!(legendre_symbol_euler(f, &t, &t).unwrap(), Sign::Zero);
        assert_eq!(
            legendre_symbol_euler(f, &f.poly(&[2]), &t).unwrap(),
            Sign::Minus
        );
        assert_eq!(
            legendre_symbol_euler(f, &t, &f.poly(&[2, 0, 1])).unwrap(),
            Sign::Minus
        );
        assert!(matches!(
            legendre_symbol_euler(f, &t, &f.poly(&[1, 0, 1])),
            Err(Error::NotIrreducible(_))
        ));
    }

    #[test]
    fn reciprocity_examples() {
        let f = Fq::new(5).unwrap();
        let t = Poly::t();
        let d = f.poly(&[2, 0, 1]);
        assert_eq!(jacobi_symbol(f, &t, &d).unwrap(), Sign::Minus);
        assert_eq!(jacobi_symbol(f, &Poly::one(), &d).unwrap(), Sign::Plus);
        assert_eq!(
            jacobi_symbol(f, &f.poly(&[2, 1]), &f.poly(&[1, 0, 1])).unwrap(),
            Sign::Zero
        );
        assert_eq!(jacobi_symbol(f, &t, &Poly::one()).unwrap(), Sign::Plus);
        assert!(jacobi_symbol(f, &t, &Poly::zero()).is_err());
        assert!(jacobi_symbol(f, &t, &f.poly(&[1, 2])).is_err());
    }

    #[test]
    fn char_sum_examples() {
        let f = Fq::new(5).unwrap();
        let d = f.poly(&[2, 0, 1]);
        assert_eq!(char_sum_over_mn(f, &d, 0).unwrap(), 1);
        assert_eq!(char_sum_over_mn(f, &d, 1).unwrap(), -1);
        assert_eq!(char_sum_over_mn(f, &d, 2).unwrap(), 0);
        assert_eq!(char_sum_over_mn(f, &d, 3).unwrap(), 0);
    }

    #[test]
    fn prime_characters_match_symbol() {
        let f = Fq::new(3).unwrap();
        let table = IrreducibleTable::build(f, 3);
        let pc = PrimeCharacters::new(&table, 3).unwrap();
        assert_eq!(pc.count_up_to(1), 3);
        assert_eq!(pc.count_up_to(2), 6);
        for n in 1..=4 {
            for d in enumerate_monic(f, n) {
                for (i, p) in pc.primes().enumerate() {
                    let expect = jacobi_symbol(f, p, &d).unwrap().value();
                    assert_eq!(pc.chi(&d, i), expect, "D={d} P={p}");
                }
            }
        }
    }

    #[test]
    fn sign_arithmetic() {
        assert_eq!(Sign::Minus * Sign::Minus, Sign::Plus);
        assert_eq!(Sign::Minus * Sign::Zero, Sign::Zero);
        assert_eq!(Sign::from_i8(-3), Sign::Minus);
    }

    #[test]
    fn euler_table_matches_pow_mod() {
        for q in [3u64, 5, 7] {
            let f = Fq::new(q).unwrap();
            let table = IrreducibleTable::build(f, 3);
            for p in table.up_to(3) {
                let et = EulerTable::new(f, p).unwrap();
                for g in enumerate_monic(f, 2).chain([Poly::zero(), f.poly(&[2])]) {
                    let expect = legendre_unchecked(f, &g, p).unwrap().value();
                    assert_eq!(et.symbol(f, g.coeffs()), expect, "f={g} P={p}");
                }
            }
        }
    }

    #[test]
    fn fast_kernel_matches_generic() {
        let f = Fq::new(7).unwrap();
        let d = f.poly(&[3, 1, 0, 2, 5, 1]);
        for g in enumerate_monic(f, 3) {
            assert_eq!(
                jacobi_residues(f, g.coeffs(), d.coeffs()),
                jacobi_generic(f, g.coeffs(), d.coeffs())
            );
        }
    }

    #[test]
    fn symbol_routes_small_field() {
        let f = Fq::new(3).unwrap();
        let table = IrreducibleTable::build(f, 3);
        let cmp = compare_symbol_routes(&table, 3).unwrap();
        assert_eq!(cmp.mismatches, 0);
        assert_eq!(cmp.pairs, (1 + 2 + 3 + 9 + 27) * (1 + 3 + 9 + 27));
        assert!(cmp.first_mismatch.is_none());
    }
}
