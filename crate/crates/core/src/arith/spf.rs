//! Segmented smallest-prime-factor tables and factorization.

use std::cmp::Ordering;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::primes::{isqrt, primes_up_to, smallest_factor_trial};
use crate::error::{Error, Result};

/// Default upper limit on `hi` for table construction.
pub const DEFAULT_CAP: u64 = 1 << 31;

/// Environment variable naming the directory for persisted tables.
pub const CACHE_DIR_ENV: &str = "PRETENTIOUS_CACHE_DIR";

const CACHE_MAGIC: [u8; 4] = *b"SPF1";
const CACHE_VERSION: u32 = 1;
const BLOCK: usize = 1 << 16;

/// Smallest prime factor with the convention that `P^-(1)` is infinite.
///
/// The derived ordering puts `Infinite` above every finite prime, so
/// `LeastPrime::of(1) > LeastPrime::Prime(y)` for every `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LeastPrime {
    Prime(u64),
    Infinite,
}

impl LeastPrime {
    /// True when the integer is `y`-rough, i.e. `P^-(n) > y`.
    pub fn exceeds(self, y: u64) -> bool {
        match self {
            LeastPrime::Infinite => true,
            LeastPrime::Prime(p) => p > y,
        }
    }
}

impl PartialOrd for LeastPrime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LeastPrime {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (LeastPrime::Infinite, LeastPrime::Infinite) => Ordering::Equal,
            (LeastPrime::Infinite, _) => Ordering::Greater,
            (_, LeastPrime::Infinite) => Ordering::Less,
            (LeastPrime::Prime(a), LeastPrime::Prime(b)) => a.cmp(b),
        }
    }
}

/// Prime factorization of `n` as strictly increasing `(prime, exponent)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub pairs: Vec<(u64, u32)>,
}

impl Factorization {
    /// Ω(n): number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.pairs.iter().map(|&(_, e)| e).sum()
    }

    /// ω(n): number of distinct prime factors.
    pub fn distinct(&self) -> usize {
        self.pairs.len()
    }

    pub fn least_prime(&self) -> LeastPrime {
        self.pairs.first().map_or(LeastPrime::Infinite, |&(p, _)| LeastPrime::Prime(p))
    }

    /// P^+(n), with `None` for `n = 1`.
    pub fn largest_prime(&self) -> Option<u64> {
        self.pairs.last().map(|&(p, _)| p)
    }

    /// Multiplies the factorization back out.
    pub fn product(&self) -> u64 {
        self.pairs.iter().fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }
}

/// Smallest prime factors of every integer in `[base_offset, limit]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpfTable {
    base_offset: u64,
    spf: Vec<u32>,
    limit: u64,
}

/// Builds a table over `[lo, hi]` with the default capacity cap.
pub fn build_spf_table(lo: u64, hi: u64) -> Result<SpfTable> {
    SpfTable::build(lo, hi)
}

/// Factorizes `n` with `table`, falling back to trial division for
/// `n <= limit^2` outside the table.
pub fn factorize(n: u64, table: &SpfTable) -> Result<Factorization> {
    table.factorize(n)
}

impl SpfTable {
    pub fn build(lo: u64, hi: u64) -> Result<Self> {
        Self::build_with_cap(lo, hi, DEFAULT_CAP)
    }

    pub fn build_with_cap(lo: u64, hi: u64, cap: u64) -> Result<Self> {
        if lo == 0 {
            return Err(Error::arg("table lower end must be at least 1"));
        }
        if lo > hi {
            return Err(Error::arg(format!("lo = {lo} exceeds hi = {hi}")));
        }
        let cap = cap.min(u32::MAX as u64);
        if hi > cap {
            return Err(Error::Capacity { what: "hi", value: hi, cap });
        }
        let base = primes_up_to(isqrt(hi));
        let len = (hi - lo + 1) as usize;
        let mut spf = vec![0u32; len];
        spf.par_chunks_mut(BLOCK).enumerate().for_each(|(b, chunk)| {
            let start = lo + (b * BLOCK) as u64;
            sieve_block(start, chunk, &base);
        });
        Ok(Self { base_offset: lo, spf, limit: hi })
    }

    /// Joins adjacent tables into one. Segments must be given in order and
    /// must tile a contiguous range.
    pub fn concat(parts: &[SpfTable]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::arg("no segments to join"))?;
        let mut spf = Vec::new();
        let mut next = first.base_offset;
        for part in parts {
            if part.base_offset != next {
                return Err(Error::arg(format!(
                    "segment starting at {} does not continue at {next}",
                    part.base_offset
                )));
            }
            spf.extend_from_slice(&part.spf);
            next = part.limit + 1;
        }
        Ok(Self { base_offset: first.base_offset, spf, limit: next - 1 })
    }

    pub fn lo(&self) -> u64 {
        self.base_offset
    }

    /// Largest covered integer.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn len(&self) -> usize {
        self.spf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spf.is_empty()
    }

    pub fn raw(&self) -> &[u32] {
        &self.spf
    }

    pub fn covers(&self, n: u64) -> bool {
        n >= self.base_offset && n <= self.limit
    }

    /// Raw smallest prime factor, `1` for `n = 1`, `None` outside the table.
    pub fn spf(&self, n: u64) -> Option<u64> {
        self.covers(n).then(|| self.spf[(n - self.base_offset) as usize] as u64)
    }

    pub fn least_prime(&self, n: u64) -> Option<LeastPrime> {
        self.spf(n).map(|p| if p == 1 { LeastPrime::Infinite } else { LeastPrime::Prime(p) })
    }

    pub fn is_prime(&self, n: u64) -> Option<bool> {
        self.spf(n).map(|p| n >= 2 && p == n)
    }

    /// Largest `n` that [`SpfTable::factorize`] accepts.
    pub fn fallback_limit(&self) -> u64 {
        self.limit.saturating_mul(self.limit)
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(Error::arg("cannot factorize 0"));
        }
        if !self.covers(n) && n > self.fallback_limit() {
            return Err(Error::OutOfRange {
                n,
                lo: self.base_offset,
                hi: self.limit,
                fallback: self.fallback_limit(),
            });
        }
        let mut pairs = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = match self.spf(m) {
                Some(p) => p,
                None => smallest_factor_trial(m),
            };
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            pairs.push((p, e));
        }
        Ok(Factorization { n, pairs })
    }

    /// Writes the table as a 16-byte header (magic, version, lo, hi)
    /// followed by little-endian 32-bit entries.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let mut buf = Vec::with_capacity(16 + 4 * self.spf.len());
        buf.extend_from_slice(&CACHE_MAGIC);
        buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.base_offset as u32).to_le_bytes());
        buf.extend_from_slice(&(self.limit as u32).to_le_bytes());
        for &v in &self.spf {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() < 16 || bytes[..4] != CACHE_MAGIC {
            return Err(Error::CacheFormat("bad magic".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        if word(4) != CACHE_VERSION {
            return Err(Error::CacheFormat(format!("unsupported version {}", word(4))));
        }
        let lo = word(8) as u64;
        let hi = word(12) as u64;
        if lo == 0 || lo > hi || bytes.len() != 16 + 4 * (hi - lo + 1) as usize {
            return Err(Error::CacheFormat("header does not match payload".into()));
        }
        let spf = bytes[16..].chunks_exact(4).map(|c| u32::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Self { base_offset: lo, spf, limit: hi })
    }

    /// File name used for a persisted `[lo, hi]` table inside a cache dir.
    pub fn cache_path(dir: &Path, lo: u64, hi: u64) -> PathBuf {
        dir.join(format!("spf_{lo}_{hi}.bin"))
    }

    /// Loads `[lo, hi]` from `dir` if present, otherwise builds and stores it.
    pub fn build_cached_in(dir: &Path, lo: u64, hi: u64) -> Result<Self> {
        let path = Self::cache_path(dir, lo, hi);
        if let Ok(file) = fs::File::open(&path) {
            if let Ok(table) = Self::read_from(std::io::BufReader::new(file)) {
                if table.base_offset == lo && table.limit == hi {
                    return Ok(table);
                }
            }
        }
        let table = Self::build(lo, hi)?;
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        table.write_to(std::io::BufWriter::new(fs::File::create(&tmp)?))?;
        fs::rename(tmp, path)?;
        Ok(table)
    }

    /// Uses the directory in [`CACHE_DIR_ENV`] when set.
    pub fn build_cached(lo: u64, hi: u64) -> Result<Self> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Self::build_cached_in(Path::new(&dir), lo, hi),
            _ => Self::build(lo, hi),
        }
    }
}

fn sieve_block(start: u64, chunk: &mut [u32], base: &[u64]) {
    let end = start + chunk.len() as u64 - 1;
    for &p in base {
        if p * p > end {
            break;
        }
        let first = (p * p).max(start.div_ceil(p) * p);
        let mut m = first;
        while m <= end {
            let slot = &mut chunk[(m - start) as usize];
            if *slot == 0 {
                *slot = p as u32;
            }
            m += p;
        }
    }
    for (i, slot) in chunk.iter_mut().enumerate() {
        if *slot == 0 {
            // No base prime divides it: 1 or a prime.
            *slot = (start + i as u64) as u32;
        }
    }
}
