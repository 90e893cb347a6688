//! Generalized von Mangoldt functions `Lambda_k = mu * log^k`.

use serde::{Deserialize, Serialize};

use crate::arith::primes::primes_up_to;
use crate::compensated::CompensatedSum;
use crate::error::{Error, Result};

pub const MAX_K: u32 = 8;
pub const MAX_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaTable {
    pub k: u32,
    pub limit: u64,
    /// `values[n] = Lambda_k(n)`; index 0 is unused and holds 0.
    pub values: Vec<f64>,
}

impl LambdaTable {
    pub fn get(&self, n: u64) -> f64 {
        self.values[n as usize]
    }
}

fn check(k: u32, limit: u64) -> Result<()> {
    if k > MAX_K {
        return Err(Error::Capacity { what: "k", value: k as u64, cap: MAX_K as u64 });
    }
    if limit > MAX_LIMIT {
        return Err(Error::Capacity { what: "limit", value: limit, cap: MAX_LIMIT });
    }
    if limit == 0 {
        return Err(Error::arg("limit must be at least 1"));
    }
    Ok(())
}

/// `(prime power, log p)` pairs up to `limit`.
fn prime_powers(limit: u64) -> Vec<(u64, f64)> {
    let mut out = Vec::new();
    for p in primes_up_to(limit) {
        let lp = (p as f64).ln();
        let mut q = p;
        loop {
            out.push((q, lp));
            match q.checked_mul(p) {
                Some(n) if n <= limit => q = n,
                _ => break,
            }
        }
    }
    out
}

/// `Lambda_k` on `[1, limit]` via `Lambda_{j+1} = Lambda_j log + Lambda * Lambda_j`.
pub fn lambda_k_table(k: u32, limit: u64) -> Result<LambdaTable> {
    Ok(lambda_k_tables(k, limit)?.pop().unwrap())
}

/// `Lambda_0, ..., Lambda_k` from one run of the recursion.
pub fn lambda_k_tables(k: u32, limit: u64) -> Result<Vec<LambdaTable>> {
    check(k, limit)?;
    let len = limit as usize + 1;
    let logs: Vec<f64> = (0..len).map(|n| if n == 0 { 0.0 } else { (n as f64).ln() }).collect();
    let pp = prime_powers(limit);
    let mut out = Vec::with_capacity(k as usize + 1);
    let mut delta = vec![0.0; len];
    delta[1] = 1.0;
    out.push(LambdaTable { k: 0, limit, values: delta });
    if k == 0 {
        return Ok(out);
    }
    let mut cur = vec![0.0; len];
    for &(q, lp) in &pp {
        cur[q as usize] = lp;
    }
    out.push(LambdaTable { k: 1, limit, values: cur.clone() });
    for j in 2..=k {
        let mut next: Vec<f64> = cur.iter().zip(&logs).map(|(v, l)| v * l).collect();
        for &(q, lp) in &pp {
            let q = q as usize;
            for m in 1..=(len - 1) / q {
                let v = cur[m];
                if v != 0.0 {
                    next[q * m] += lp * v;
                }
            }
        }
        out.push(LambdaTable { k: j, limit, values: next.clone() });
        cur = next;
    }
    Ok(out)
}

/// Möbius function on `[0, limit]` by a linear sieve.
pub fn mobius_table(limit: u64) -> Vec<i8> {
    let len = limit as usize + 1;
    let mut mu = vec![1i8; len];
    let mut is_comp = vec![false; len];
    let mut primes = Vec::new();
    if len > 0 {
        mu[0] = 0;
    }
    for i in 2..len {
        if !is_comp[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip >= len {
                break;
            }
            is_comp[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Independent oracle: `sum_{d | n} mu(d) (log(n/d))^k` by direct
/// convolution over squarefree `d`, compensated per entry.
pub fn lambda_k_oracle(k: u32, limit: u64) -> Result<LambdaTable> {
    check(k, limit)?;
    let len = limit as usize + 1;
    let mu = mobius_table(limit);
    let powk: Vec<f64> = (0..len).map(|m| if m == 0 { 0.0 } else { (m as f64).ln().powi(k as i32) }).collect();
    let mut acc = vec![CompensatedSum::new(); len];
    for d in 1..len {
        if mu[d] == 0 {
            continue;
        }
        let sign = mu[d] as f64;
        for m in 1..=(len - 1) / d {
            let v = if k == 0 { 1.0 } else { powk[m] };
            acc[d * m].add(sign * v);
        }
    }
    let values = acc.iter().enumerate().map(|(n, a)| if n == 0 { 0.0 } else { a.value() }).collect();
    Ok(LambdaTable { k, limit, values })
}

/// `|a - b| / max(|a|, |b|, 1)`.
pub fn relative_deviation(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Largest prime factor of every `n <= limit` (`lpf[1] = 1`).
pub fn largest_prime_factor_table(limit: u64) -> Vec<u32> {
    let len = limit as usize + 1;
    let mut lpf = vec![1u32; len];
    for p in primes_up_to(limit) {
        let p = p as usize;
        for m in (p..len).step_by(p) {
            lpf[m] = p as u32;
        }
    }
    lpf
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevRow {
    pub k: u32,
    pub z: u64,
    pub x: f64,
    pub lhs: f64,
    /// `k! min(log z, log x)^k`.
    pub scale: f64,
    /// Smallest constant `C` with `lhs <= C scale`.
    pub c: f64,
}

/// `sum_{n <= limit, P^+(n) <= z} Lambda_k(n) / n^{1 + 1/log x}` against
/// `k! min(log z, log x)^k`, reporting the smallest working constant.
pub fn chebyshev_monitor(table: &LambdaTable, lpf: &[u32], z: u64, x: f64) -> ChebyshevRow {
    let sigma = 1.0 + 1.0 / x.ln();
    let mut acc = CompensatedSum::new();
    for n in 2..table.values.len() {
        let v = table.values[n];
        if v != 0.0 && (lpf[n] as u64) <= z {
            acc.add(v * (-(sigma) * (n as f64).ln()).exp());
        }
    }
    let fact: f64 = (1..=table.k).map(|j| j as f64).product();
    let scale = fact * (z as f64).ln().min(x.ln()).powi(table.k as i32);
    ChebyshevRow { k: table.k, z, x, lhs: acc.value(), scale, c: acc.value() / scale }
}
