//! Segmented streaming evaluation of completely multiplicative functions.
//!
//! A segment `[lo, lo + len)` is processed by walking every base prime power
//! `p^e <= hi` across it, multiplying in `f(p)` and tracking the smooth part.
//! Whatever remains after dividing out the smooth part is a single prime
//! above `sqrt(hi)`, evaluated directly.

use num_complex::Complex64;
use rayon::prelude::*;

use super::assignment::{PrimeAssignment, PrimeValues};
use super::primes::{isqrt, primes_up_to};
use super::spf::DEFAULT_CAP;
use crate::error::{Error, Result};

/// Default number of integers per segment.
pub const DEFAULT_SEGMENT: usize = 1 << 15;

/// One evaluated segment. `values[i] = f(lo + i)` and `spf[i]` is the
/// smallest prime factor of `lo + i` (1 for the integer 1).
pub struct Segment<'a> {
    pub lo: u64,
    pub values: &'a [Complex64],
    pub spf: &'a [u32],
}

impl Segment<'_> {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn n(&self, i: usize) -> u64 {
        self.lo + i as u64
    }
}

/// Reusable per-worker buffers.
#[derive(Default)]
struct Scratch {
    values: Vec<Complex64>,
    smooth: Vec<u32>,
    spf: Vec<u32>,
}

/// Streams `f(n)` over `[1, hi]` in segments.
pub struct CmStream<'f> {
    f: &'f PrimeAssignment,
    hi: u64,
    base: Vec<u64>,
    cache: PrimeValues,
    segment: usize,
}

impl<'f> CmStream<'f> {
    pub fn new(f: &'f PrimeAssignment, hi: u64) -> Result<Self> {
        Self::with_segment(f, hi, DEFAULT_SEGMENT)
    }

    pub fn with_segment(f: &'f PrimeAssignment, hi: u64, segment: usize) -> Result<Self> {
        if hi > DEFAULT_CAP {
            return Err(Error::Capacity { what: "x", value: hi, cap: DEFAULT_CAP });
        }
        if segment == 0 {
            return Err(Error::arg("segment length must be positive"));
        }
        let base = primes_up_to(isqrt(hi));
        let cache = f.cache_for(&base);
        Ok(Self { f, hi, base, cache, segment })
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn segment_len(&self) -> usize {
        self.segment
    }

    /// Segment boundaries covering `[lo, hi]`, aligned to multiples of the
    /// segment length so that results do not depend on `lo`.
    fn bounds(&self, lo: u64, hi: u64) -> Vec<(u64, u64)> {
        let hi = hi.min(self.hi);
        let lo = lo.max(1);
        let mut out = Vec::new();
        if lo > hi {
            return out;
        }
        let seg = self.segment as u64;
        let mut a = lo;
        while a <= hi {
            let b = ((a - 1) / seg + 1) * seg;
            let b = b.min(hi);
            out.push((a, b));
            a = b + 1;
        }
        out
    }

    fn fill<'s>(&self, lo: u64, hi: u64, scratch: &'s mut Scratch) -> Segment<'s> {
        let len = (hi - lo + 1) as usize;
        let Scratch { values, smooth, spf } = scratch;
        values.clear();
        values.resize(len, Complex64::new(1.0, 0.0));
        smooth.clear();
        smooth.resize(len, 1);
        spf.clear();
        spf.resize(len, 0);
        for (idx, &p) in self.base.iter().enumerate() {
            let fp = self.cache.get(idx);
            let mut pk = p;
            let mut first_power = true;
            loop {
                let mut m = lo.div_ceil(pk) * pk;
                while m <= hi {
                    let i = (m - lo) as usize;
                    values[i] *= fp;
                    smooth[i] *= p as u32;
                    if first_power && spf[i] == 0 {
                        spf[i] = p as u32;
                    }
                    m += pk;
                }
                first_power = false;
                match pk.checked_mul(p) {
                    Some(next) if next <= hi => pk = next,
                    _ => break,
                }
            }
        }
        for i in 0..len {
            let n = lo + i as u64;
            let rest = n / smooth[i] as u64;
            if rest > 1 {
                values[i] *= self.f.eval_at_prime(rest);
                if spf[i] == 0 {
                    spf[i] = rest as u32;
                }
            } else if n == 1 {
                spf[i] = 1;
            }
        }
        Segment { lo, values, spf }
    }

    /// Visits segments of `[lo, hi]` in increasing order on the calling thread.
    pub fn for_each_segment(&self, lo: u64, hi: u64, mut visit: impl FnMut(&Segment<'_>)) {
        let mut scratch = Scratch::default();
        for (a, b) in self.bounds(lo, hi) {
            let seg = self.fill(a, b, &mut scratch);
            visit(&seg);
        }
    }

    /// Maps every segment of `[lo, hi]` in parallel, returning the results in
    /// segment order. Reductions over the output are therefore independent
    /// of the thread count.
    pub fn map_segments<R, F>(&self, lo: u64, hi: u64, map: F) -> Vec<R>
    where
        R: Send,
        F: Fn(&Segment<'_>) -> R + Sync,
    {
        self.bounds(lo, hi)
            .into_par_iter()
            .map_init(Scratch::default, |scratch, (a, b)| {
                let seg = self.fill(a, b, scratch);
                map(&seg)
            })
            .collect()
    }

    /// Dense `f(1..=hi)` (index 0 holds `f(1)`), for moderate `hi`.
    pub fn collect_values(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.hi as usize);
        self.for_each_segment(1, self.hi, |seg| out.extend_from_slice(seg.values));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::assignment::{eval_cm, PrimeRule};
    use crate::arith::spf::build_spf_table;

    #[test]
    fn stream_matches_pointwise() {
        let f = PrimeAssignment::new("k", PrimeRule::Kronecker { d: -3 }.twisted(0.7));
        let hi = 100_000;
        let table = build_spf_table(1, hi).unwrap();
        let s = CmStream::with_segment(&f, hi, 4096).unwrap();
        s.for_each_segment(1, hi, |seg| {
            for i in 0..seg.len() {
                let n = seg.n(i);
                let want = eval_cm(&f, n, &table).unwrap();
                assert!((seg.values[i] - want).norm() < 1e-12, "n = {n}");
                assert_eq!(seg.spf[i] as u64, table.spf(n).unwrap(), "spf n = {n}");
            }
        });
    }

    #[test]
    fn partial_ranges_and_parallel_order() {
        let f = PrimeAssignment::new("l", PrimeRule::Constant(Complex64::new(-1.0, 0.0)));
        let s = CmStream::with_segment(&f, 50_000, 1000).unwrap();
        let sums: Vec<f64> = s.map_segments(123, 45_678, |seg| seg.values.iter().map(|z| z.re).sum());
        let mut seq = Vec::new();
        s.for_each_segment(123, 45_678, |seg| seq.push(seg.values.iter().map(|z| z.re).sum::<f64>()));
        assert_eq!(sums, seq);
    }
}
