//! Consistency monitors for truncated `L_y`: Euler-product factorization
//! and the bounded-error link between `log|L_y|` and prime sums.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::series::{euler_factor, l_y_derivative_with, RoughTerms};
use crate::arith::primes::for_each_prime;
use crate::arith::PrimeAssignment;
use crate::compensated::CompensatedSum;
use crate::error::{Error, Result};
use crate::sums::log_grid;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerCheck {
    pub s: Complex64,
    pub y: u64,
    pub l_y: Complex64,
    /// `L(s, f) prod_{p <= y} (1 - f(p) p^{-s})`.
    pub factored: Complex64,
    pub difference: f64,
    /// `T_y + T_1 |prod|` from the two truncations.
    pub bound: f64,
    pub holds: bool,
}

/// Compares the rough series to the full series times the Euler factor over `p <= y`.
pub fn euler_product_check(f: &PrimeAssignment, y: u64, s: Complex64, n: u64) -> Result<EulerCheck> {
    if s.re < 1.2 {
        return Err(Error::arg("the Euler-product check is run for Re(s) >= 1.2"));
    }
    if !(1..=1000).contains(&y) {
        return Err(Error::arg("the Euler-product check is run for y <= 1000"));
    }
    let rough = l_y_derivative_with(f, y, s, 0, n)?;
    let full = l_y_derivative_with(f, 1, s, 0, n)?;
    let e = euler_factor(f, y, s);
    let factored = full.value * e;
    let difference = (rough.value - factored).norm();
    let bound = rough.tail_bound + full.tail_bound * e.norm() + 1e-12 * (1.0 + factored.norm());
    Ok(EulerCheck { s, y, l_y: rough.value, factored, difference, bound, holds: difference <= bound })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeRow {
    pub function: String,
    pub x: u64,
    pub t: f64,
    pub log_abs_l: f64,
    pub prime_sum: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    pub y: u64,
    pub envelope: f64,
    pub rows: Vec<EnvelopeRow>,
    pub max_deviation: f64,
    pub violations: usize,
}

impl EnvelopeReport {
    pub fn to_csv(&self) -> String {
        use crate::harness::fmt_f64;
        let mut s = String::from("function,x,t,log_abs_l,prime_sum,deviation\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.function,
                r.x,
                fmt_f64(r.t),
                fmt_f64(r.log_abs_l),
                fmt_f64(r.prime_sum),
                fmt_f64(r.deviation)
            ));
        }
        s
    }
}

/// `|log|L_y(1 + 1/log x + it, f)| - sum_{y<p<=x} Re(f(p) p^{-it})/p|` on
/// the grid `xs x ts`, with `L_y` truncated at `N = x`.
pub fn lemma_envelope(
    functions: &[PrimeAssignment],
    y: u64,
    xs: &[u64],
    ts: &[f64],
    envelope: f64,
) -> Result<EnvelopeReport> {
    if xs.iter().any(|&x| x <= y.max(2)) {
        return Err(Error::arg("every x must exceed max(y, 2)"));
    }
    let mut rows = Vec::new();
    for f in functions {
        let primes = {
            let mut v = Vec::new();
            for_each_prime(y + 1, *xs.iter().max().unwrap_or(&0), |p| v.push(p));
            v
        };
        for &x in xs {
            let sigma = 1.0 + 1.0 / (x as f64).ln();
            let terms = RoughTerms::new(f, y, sigma, x)?;
            for &t in ts {
                let l = terms.eval_at(t, 0)[0];
                let mut ps = CompensatedSum::new();
                for &p in primes.iter().take_while(|&&p| p <= x) {
                    let lp = (p as f64).ln();
                    let z = f.eval_at_prime(p) * Complex64::from_polar(1.0, -t * lp);
                    ps.add(z.re / p as f64);
                }
                let log_abs_l = l.norm().ln();
                let prime_sum = ps.value();
                rows.push(EnvelopeRow {
                    function: f.label.clone(),
                    x,
                    t,
                    log_abs_l,
                    prime_sum,
                    deviation: (log_abs_l - prime_sum).abs(),
                });
            }
        }
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    let violations = rows.iter().filter(|r| !(r.deviation <= envelope)).count();
    Ok(EnvelopeReport { y, envelope, rows, max_deviation, violations })
}

/// Ten log-spaced `x` in `[10^3, 10^6]` and ten `t` in `[-20, 20]`.
pub fn default_envelope_grid() -> (Vec<u64>, Vec<f64>) {
    let xs = log_grid(1_000, 1_000_000, 10);
    let ts = (0..10).map(|i| -20.0 + 40.0 * i as f64 / 9.0).collect();
    (xs, ts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_get, FunctionSpec};

    #[test]
    fn euler_product_holds() {
        let f = catalog_get(&FunctionSpec::kronecker(-3)).unwrap();
        let c = euler_product_check(&f, 30, Complex64::new(1.5, 4.0), 100_000).unwrap();
        assert!(c.holds, "{c:?}");
        assert!(euler_product_check(&f, 30, Complex64::new(1.1, 0.0), 1000).is_err());
    }

    #[test]
    fn small_envelope() {
        let f = catalog_get(&FunctionSpec::liouville()).unwrap();
        let r = lemma_envelope(&[f], 2, &[1000, 10_000], &[0.0, 5.0], 3.0).unwrap();
        assert_eq!(r.rows.len(), 4);
        assert_eq!(r.violations, 0, "{r:?}");
    }
}
