//! On-disk CSV caches for irreducible tables and L-data.
//!
//! Each file starts with a version comment line. A file with a different
//! version, or whose rows fail validation, is reported as stale and rebuilt.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;

use crate::characters::PrimeCharacters;
use crate::ensemble::{Ensemble, LRoute};
use crate::error::{Error, Result};
use crate::lfunctions::LData;
use crate::poly::{Fq, IrreducibleTable, Poly};

pub const PTABLE_VERSION: &str = "#hyperell-l1 ptable v1";
pub const LCACHE_VERSION: &str = "#hyperell-l1 lcache v1";

/// Outcome of reading a cache file.
#[derive(Debug)]
pub enum CacheLoad<T> {
    Hit(T),
    Missing,
    /// Present but unusable; the message says why.
    Stale(String),
}

fn split_version(text: &str) -> (&str, &str) {
    match text.split_once('\n') {
        Some((first, rest)) => (first.trim_end_matches('\r'), rest),
        None => (text, ""),
    }
}

fn read_versioned(path: &Path, version: &str) -> Result<CacheLoad<String>> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(CacheLoad::Missing),
        Err(e) => return Err(e.into()),
    };
    let (first, rest) = split_version(&text);
    if first != version {
        return Ok(CacheLoad::Stale(
            Error::CacheVersion {
                path: path.display().to_string(),
                expected: version.to_string(),
                found: first.to_string(),
            }
            .to_string(),
        ));
    }
    Ok(CacheLoad::Hit(rest.to_string()))
}

/// Writes through a temporary file so readers never see a partial cache.
fn write_atomic(path: &Path, version: &str, body: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension("csv.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        writeln!(f, "{version}")?;
        f.write_all(body)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn join_i64(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_i64_list(s: &str) -> Result<Vec<i64>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer {t:?}")))
        })
        .collect()
}

pub fn write_ptable(path: &Path, table: &IrreducibleTable) -> Result<()> {
    let q = table.field().q();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["q", "deg", "coeffs"])?;
    for p in table.up_to(table.max_degree()) {
        w.write_record([q.to_string(), p.deg().to_string(), p.to_string()])?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(path, PTABLE_VERSION, &body)
}

/// Reads a table; the degree bound is the largest degree present.
pub fn read_ptable(path: &Path, fq: Fq) -> Result<CacheLoad<IrreducibleTable>> {
    let body = match read_versioned(path, PTABLE_VERSION)? {
        CacheLoad::Hit(b) => b,
        CacheLoad::Missing => return Ok(CacheLoad::Missing),
        CacheLoad::Stale(m) => return Ok(CacheLoad::Stale(m)),
    };
    let mut by_degree: Vec<Vec<Poly>> = vec![Vec::new()];
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    for rec in rdr.records() {
        let rec = rec?;
        let parsed = (|| -> Result<(usize, Poly)> {
            let q: u32 = rec[0].parse().map_err(|_| Error::Parse("q".into()))?;
            if q != fq.q() {
                return Err(Error::Parse(format!("row for q = {q}")));
            }
            let deg: usize = rec[1].parse().map_err(|_| Error::Parse("deg".into()))?;
            let p = fq.parse_poly(&rec[2])?;
            if p.deg() != deg || deg == 0 || !fq.is_irreducible(&p)? {
                return Err(Error::Parse(format!("row {p} is not a degree-{deg} irreducible")));
            }
            Ok((deg, p))
        })();
        match parsed {
            Ok((deg, p)) => {
                if by_degree.len() <= deg {
                    by_degree.resize(deg + 1, Vec::new());
                }
                by_degree[deg].push(p);
            }
            Err(e) => return Ok(CacheLoad::Stale(e.to_string())),
        }
    }
    let table = IrreducibleTable::from_lists(fq, by_degree);
    for d in 1..=table.max_degree() {
        if table.degree(d).len() as u128 != crate::poly::pi_q_exact(fq.q_u64(), d) {
            return Ok(CacheLoad::Stale(format!("degree {d} list is incomplete")));
        }
    }
    Ok(CacheLoad::Hit(table))
}

pub fn write_lcache(path: &Path, n: usize, data: &[LData]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["q", "n", "D", "lambda", "genus", "coeffs", "L1_num", "L1_den"])?;
    for l in data {
        w.write_record([
            l.q.to_string(),
            n.to_string(),
            l.d.to_string(),
            l.lambda.to_string(),
            l.genus.to_string(),
            join_i64(&l.coeffs),
            l.value_at_one.numer().to_string(),
            l.value_at_one.denom().to_string(),
        ])?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    write_atomic(path, LCACHE_VERSION, &body)
}

/// Reads L-data for `H_n`. Every row is re-completed from its coefficients and
/// must reproduce the stored lambda, genus and `L(1)`; the rows must list
/// `expected` in order.
pub fn read_lcache(path: &Path, fq: Fq, n: usize, expected: &[Poly]) -> Result<CacheLoad<Vec<LData>>> {
    let body = match read_versioned(path, LCACHE_VERSION)? {
        CacheLoad::Hit(b) => b,
        CacheLoad::Missing => return Ok(CacheLoad::Missing),
        CacheLoad::Stale(m) => return Ok(CacheLoad::Stale(m)),
    };
    let mut out = Vec::with_capacity(expected.len());
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parsed = (|| -> Result<LData> {
            let field = |j: usize| -> Result<u64> {
                rec[j].parse().map_err(|_| Error::Parse(format!("column {j}")))
            };
            if field(0)? != fq.q_u64() || field(1)? != n as u64 {
                return Err(Error::Parse("row for another (q, n)".into()));
            }
            let d = fq.parse_poly(&rec[2])?;
            if expected.get(i) != Some(&d) {
                return Err(Error::Parse(format!("row {i} is {d}, out of order")));
            }
            let l = LData::from_coefficients(fq, &d, parse_i64_list(&rec[5])?)?;
            let num: BigInt = rec[6].parse().map_err(|_| Error::Parse("L1_num".into()))?;
            let den: BigInt = rec[7].parse().map_err(|_| Error::Parse("L1_den".into()))?;
            if l.lambda as u64 != field(3)?
                || l.genus as u64 != field(4)?
                || *l.value_at_one.numer() != num
                || *l.value_at_one.denom() != den
            {
                return Err(Error::Parse(format!("row for {d} does not validate")));
            }
            Ok(l)
        })();
        match parsed {
            Ok(l) => out.push(l),
            Err(e) => return Ok(CacheLoad::Stale(e.to_string())),
        }
    }
    if out.len() != expected.len() {
        return Ok(CacheLoad::Stale(format!(
            "{} rows, expected {}",
            out.len(),
            expected.len()
        )));
    }
    Ok(CacheLoad::Hit(out))
}

/// A cache directory; `None` disables caching.
#[derive(Clone, Debug, Default)]
pub struct Cache {
    root: Option<PathBuf>,
    notices: Vec<String>,
}

impl Cache {
    pub fn new(root: Option<PathBuf>) -> Self {
        Self {
            root,
            notices: Vec::new(),
        }
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    /// Messages about stale files that were rebuilt.
    pub fn notices(&self) -> &[String] {
        &self.notices
    }

    pub fn ptable_path(&self, q: u32) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(format!("ptable_q{q}.csv")))
    }

    pub fn lcache_path(&self, q: u32, n: usize) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(format!("lcache_q{q}_n{n}.csv")))
    }

    /// An irreducible table covering at least `max_deg`.
    pub fn table(&mut self, fq: Fq, max_deg: usize) -> Result<IrreducibleTable> {
        let Some(path) = self.ptable_path(fq.q()) else {
            return Ok(IrreducibleTable::build(fq, max_deg));
        };
        let mut table = match read_ptable(&path, fq)? {
            CacheLoad::Hit(t) => t,
            CacheLoad::Missing => IrreducibleTable::build(fq, 0),
            CacheLoad::Stale(m) => {
                self.notices.push(format!("rebuilding {}: {m}", path.display()));
                IrreducibleTable::build(fq, 0)
            }
        };
        if table.max_degree() < max_deg {
            table.extend_to(max_deg);
            write_ptable(&path, &table)?;
        }
        Ok(table)
    }

    /// L-data for every member of `ens`, from the cache when it validates.
    pub fn l_data(&mut self, ens: &Ensemble, pc: &PrimeCharacters, route: LRoute) -> Result<Vec<LData>> {
        let fq = ens.field();
        let Some(path) = self.lcache_path(fq.q(), ens.degree()) else {
            return ens.l_data(pc, route);
        };
        match read_lcache(&path, fq, ens.degree(), ens.members())? {
            CacheLoad::Hit(v) => return Ok(v),
            CacheLoad::Missing => {}
            CacheLoad::Stale(m) => self.notices.push(format!("rebuilding {}: {m}", path.display())),
        }
        let data = ens.l_data(pc, route)?;
        write_lcache(&path, ens.degree(), &data)?;
        Ok(data)
    }
}
