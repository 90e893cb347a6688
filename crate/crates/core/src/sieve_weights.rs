//! Upper and lower sieve weights `lambda^{+-}` from the beta-sieve
//! truncation of the Möbius function, with exact sandwich verification.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::primes::primes_up_to;
use crate::arith::PrimeAssignment;
use crate::catalog::{catalog_get, FunctionSpec};
use crate::compensated::CompensatedSum;
use crate::error::{Error, Result};

/// Sieve parameter of the truncation `p_1 ... p_{m-1} p_m^{BETA+1} < D`.
pub const BETA: u32 = 2;
pub const MAX_SUPPORT: f64 = 1e12;
pub const MAX_LEVEL: u64 = 10_000;
pub const MAX_SCAN: u64 = 1 << 31;
const SCAN_CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveWeights {
    pub y: u64,
    pub u: f64,
    /// Support bound `D = y^u`.
    pub d: f64,
    /// Nonzero weights only; every value is `+-1`.
    pub lambda_plus: BTreeMap<u64, i8>,
    pub lambda_minus: BTreeMap<u64, i8>,
}

impl SieveWeights {
    pub fn plus(&self, d: u64) -> i8 {
        self.lambda_plus.get(&d).copied().unwrap_or(0)
    }

    pub fn minus(&self, d: u64) -> i8 {
        self.lambda_minus.get(&d).copied().unwrap_or(0)
    }
}

/// Squarefree `d = p_1 ... p_r` with `y >= p_1 > ... > p_r`; `d` is kept in
/// `lambda^+` when `p_1 ... p_{m-1} p_m^3 < D` for every odd `m <= r`, and
/// in `lambda^-` when it holds for every even `m <= r`.
pub fn build_beta_sieve(y: u64, u: f64) -> Result<SieveWeights> {
    if y < 2 {
        return Err(Error::arg("y must be at least 2"));
    }
    if y > MAX_LEVEL {
        return Err(Error::Capacity { what: "y", value: y, cap: MAX_LEVEL });
    }
    if !(u >= 2.0) || !u.is_finite() {
        return Err(Error::arg("u must be at least 2"));
    }
    let d = (y as f64).powf(u);
    if d > MAX_SUPPORT {
        return Err(Error::Capacity { what: "y^u", value: d as u64, cap: MAX_SUPPORT as u64 });
    }
    let mut primes = primes_up_to(y);
    primes.reverse();
    let mut plus = BTreeMap::new();
    let mut minus = BTreeMap::new();
    plus.insert(1, 1);
    minus.insert(1, 1);

    struct Walk<'a> {
        primes: &'a [u64],
        d: f64,
        plus: &'a mut BTreeMap<u64, i8>,
        minus: &'a mut BTreeMap<u64, i8>,
    }
    impl Walk<'_> {
        // `prod` = p_1 ... p_{r}; the next prime is p_{r+1} = primes[i] for i >= start.
        fn go(&mut self, start: usize, prod: u64, r: u32, ok_plus: bool, ok_minus: bool) {
            for i in start..self.primes.len() {
                let p = self.primes[i];
                let m = r + 1;
                let test = (prod as f64) * (p as f64).powi(BETA as i32 + 1) < self.d;
                let np = ok_plus && (m % 2 == 0 || test);
                let nm = ok_minus && (m % 2 == 1 || test);
                if !np && !nm {
                    continue;
                }
                let n = prod * p;
                let sign = if m % 2 == 0 { 1 } else { -1 };
                if np {
                    self.plus.insert(n, sign);
                }
                if nm {
                    self.minus.insert(n, sign);
                }
                self.go(i + 1, n, m, np, nm);
            }
        }
    }
    Walk { primes: &primes, d, plus: &mut plus, minus: &mut minus }.go(0, 1, 0, true, true);
    Ok(SieveWeights { y, u, d, lambda_plus: plus, lambda_minus: minus })
}

/// `(sum_d lambda^+(d) g(d)/d, sum_d lambda^-(d) g(d)/d)` divided by
/// `prod_{p <= y} (1 - g(p)/p)`.
pub fn main_term_ratio(w: &SieveWeights, g: &FunctionSpec) -> Result<(f64, f64)> {
    main_term_ratio_with(w, &catalog_get(g)?)
}

pub fn main_term_ratio_with(w: &SieveWeights, g: &PrimeAssignment) -> Result<(f64, f64)> {
    let primes = primes_up_to(w.y);
    let mut gp = BTreeMap::new();
    let mut prod = 1.0;
    for &p in &primes {
        let v = g.eval_at_prime(p);
        if v.im.abs() > 1e-12 || !(-1e-12..=1.0 + 1e-12).contains(&v.re) {
            return Err(Error::arg(format!("g({p}) = {v} is not in [0, 1]")));
        }
        let factor = 1.0 - v.re / p as f64;
        if factor == 0.0 {
            return Err(Error::Degenerate(format!("1 - g({p})/{p} vanishes")));
        }
        prod *= factor;
        gp.insert(p, v.re / p as f64);
    }
    let weighted = |map: &BTreeMap<u64, i8>| {
        let mut acc = CompensatedSum::new();
        for (&d, &s) in map {
            let mut rest = d;
            let mut val = 1.0;
            for (&p, &h) in &gp {
                if rest == 1 {
                    break;
                }
                if rest % p == 0 {
                    val *= h;
                    rest /= p;
                }
            }
            acc.add(s as f64 * val);
        }
        acc.value()
    };
    Ok((weighted(&w.lambda_plus) / prod, weighted(&w.lambda_minus) / prod))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub y: u64,
    pub u: f64,
    pub x: u64,
    /// Integers `n <= x` with `P^-(n) > y` (including `n = 1`).
    pub rough: u64,
    /// Rough `n` where either convolution differs from 1, plus the others
    /// where `lambda^- * 1 <= 0 <= lambda^+ * 1` fails.
    pub violations: u64,
    pub first_violation: Option<u64>,
    pub min_plus: i64,
    pub max_minus: i64,
}

/// Checks `(lambda^- * 1)(n) <= 0 <= (lambda^+ * 1)(n)` for every non-rough
/// `n <= x` and equality with 1 for every rough `n`.
pub fn sandwich_scan(w: &SieveWeights, x: u64) -> Result<SandwichReport> {
    if x > MAX_SCAN {
        return Err(Error::Capacity { what: "x", value: x, cap: MAX_SCAN });
    }
    let primes = primes_up_to(w.y);
    let plus: Vec<(u64, i32)> = w.lambda_plus.iter().map(|(&d, &s)| (d, s as i32)).collect();
    let minus: Vec<(u64, i32)> = w.lambda_minus.iter().map(|(&d, &s)| (d, s as i32)).collect();
    let chunks: Vec<u64> = (0..x.div_ceil(SCAN_CHUNK)).collect();
    let parts: Vec<(u64, u64, Option<u64>, i64, i64)> = chunks
        .par_iter()
        .map(|&c| {
            let lo = c * SCAN_CHUNK + 1;
            let hi = ((c + 1) * SCAN_CHUNK).min(x);
            let len = (hi - lo + 1) as usize;
            let fill = |ws: &[(u64, i32)]| {
                let mut acc = vec![0i32; len];
                for &(d, s) in ws.iter().take_while(|&&(d, _)| d <= hi) {
                    let mut m = lo.div_ceil(d) * d;
                    while m <= hi {
                        acc[(m - lo) as usize] += s;
                        m += d;
                    }
                }
                acc
            };
            let ap = fill(&plus);
            let am = fill(&minus);
            let mut rough = vec![true; len];
            for &p in &primes {
                let mut m = lo.div_ceil(p) * p;
                while m <= hi {
                    rough[(m - lo) as usize] = false;
                    m += p;
                }
            }
            let (mut nr, mut bad, mut first) = (0u64, 0u64, None);
            let (mut min_plus, mut max_minus) = (i64::MAX, i64::MIN);
            for i in 0..len {
                let ok = if rough[i] {
                    nr += 1;
                    ap[i] == 1 && am[i] == 1
                } else {
                    min_plus = min_plus.min(ap[i] as i64);
                    max_minus = max_minus.max(am[i] as i64);
                    am[i] <= 0 && ap[i] >= 0
                };
                if !ok {
                    bad += 1;
                    first.get_or_insert(lo + i as u64);
                }
            }
            (nr, bad, first, min_plus, max_minus)
        })
        .collect();
    let mut report =
        SandwichReport { y: w.y, u: w.u, x, rough: 0, violations: 0, first_violation: None, min_plus: i64::MAX, max_minus: i64::MIN };
    for (nr, bad, first, mp, mm) in parts {
        report.rough += nr;
        report.violations += bad;
        if report.first_violation.is_none() {
            report.first_violation = first;
        }
        report.min_plus = report.min_plus.min(mp);
        report.max_minus = report.max_minus.max(mm);
    }
    Ok(report)
}
