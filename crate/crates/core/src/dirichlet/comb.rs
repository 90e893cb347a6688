//! Higher derivatives of `-F'/F` from derivatives of `F`.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive};

use crate::compensated::ComplexSum;
use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 10;

/// Multiplicity vectors `a` (index `j - 1` holds `a_j`) with
/// `sum_j j a_j = k`.
pub fn partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, part: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        if part == 0 {
            return;
        }
        for a in (0..=rem / part).rev() {
            cur[part - 1] = a;
            rec(rem - a * part, part - 1, cur, out);
        }
        cur[part - 1] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; k];
    rec(k, k, &mut cur, &mut out);
    out
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, j| acc * BigUint::from(j))
}

/// Exact `k! (m-1)! / prod_j (a_j! (j!)^{a_j})` with `m = sum a_j`.
pub fn coefficient(a: &[usize]) -> BigUint {
    let k: usize = a.iter().enumerate().map(|(i, &aj)| (i + 1) * aj).sum();
    let m: usize = a.iter().sum();
    let num = factorial(k) * factorial(m.saturating_sub(1));
    let den = a.iter().enumerate().fold(BigUint::one(), |acc, (i, &aj)| {
        acc * factorial(aj) * factorial(i + 1).pow(aj as u32)
    });
    debug_assert!((&num % &den) == BigUint::from(0u32));
    num / den
}

/// `(-F'/F)^{(k-1)}(s)` from `derivs = [F(s), F'(s), ..., F^{(k)}(s)]`.
pub fn comb_log_derivative(derivs: &[Complex64]) -> Result<Complex64> {
    if derivs.len() < 2 {
        return Err(Error::arg("need at least F and F'"));
    }
    let k = derivs.len() - 1;
    if k > MAX_ORDER {
        return Err(Error::arg(format!("order {k} exceeds {MAX_ORDER}")));
    }
    let f0 = derivs[0];
    if f0.norm() == 0.0 || !f0.is_finite() {
        return Err(Error::ZeroDenominator("F(s) = 0".into()));
    }
    // z_j = -F^{(j)} / F, all powers precomputed.
    let z: Vec<Complex64> = derivs[1..].iter().map(|d| -d / f0).collect();
    let mut acc = ComplexSum::new();
    for a in partitions(k) {
        let c = coefficient(&a).to_f64().unwrap_or(f64::INFINITY);
        let mut term = Complex64::new(c, 0.0);
        for (j, &aj) in a.iter().enumerate() {
            for _ in 0..aj {
                term *= z[j];
            }
        }
        acc.add(term);
    }
    Ok(acc.value())
}

/// `(M, N)` with `M = max_j (|F^{(j)}/F| / j!)^{1/j}` and
/// `N = max_j (|(F'/F)^{(j-1)}| / j!)^{1/j}`; errors if `M/2 <= N <= 2M` fails.
pub fn der_ratio_check(derivs: &[Complex64]) -> Result<(f64, f64)> {
    let (m, n) = der_ratio(derivs)?;
    let slack = 1e-12 * m.max(n);
    if m / 2.0 > n + slack || n > 2.0 * m + slack {
        return Err(Error::SandwichViolated { m, n });
    }
    Ok((m, n))
}

/// The two maxima without the sandwich assertion.
pub fn der_ratio(derivs: &[Complex64]) -> Result<(f64, f64)> {
    if derivs.is_empty() {
        return Err(Error::arg("need F(s)"));
    }
    let f0 = derivs[0];
    if f0.norm() == 0.0 {
        return Err(Error::ZeroDenominator("F(s) = 0".into()));
    }
    let k = derivs.len() - 1;
    let mut m = 0.0f64;
    let mut n = 0.0f64;
    let mut fact = 1.0;
    for j in 1..=k {
        fact *= j as f64;
        let e = 1.0 / j as f64;
        m = m.max(((derivs[j] / f0).norm() / fact).powf(e));
        let g = comb_log_derivative(&derivs[..=j])?;
        n = n.max((g.norm() / fact).powf(e));
    }
    Ok((m, n))
}
