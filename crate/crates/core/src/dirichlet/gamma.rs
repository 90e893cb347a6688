//! The constant `gamma_{s,y}` in the rough-number count, solved from data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::series::rough_zeta_sums;
use crate::arith::primes::for_each_prime;
use crate::distance::v_sub_t;
use crate::error::{Error, Result};

/// Cutoffs sampled in `[x/2, x]` to size the error bar.
const BAR_POINTS: usize = 33;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub s: Complex64,
    pub y: u64,
    pub x_proxy: u64,
    pub value: Complex64,
    /// Largest deviation of the estimate over cutoffs in `[x/2, x]`.
    pub error_bar: f64,
    /// `|gamma| / log y`.
    pub log_y_ratio: f64,
    /// Set when `y < V_t^{100}`.
    pub warning: Option<String>,
}

/// `(1 - x^{1-s}) / (s - 1)`, equal to `log x` at `s = 1`.
pub fn main_term(x: f64, s: Complex64) -> Complex64 {
    let l = x.ln();
    let w = (Complex64::new(1.0, 0.0) - s) * l;
    if w.norm() < 1e-6 {
        // -(e^w - 1) / (s - 1) = l (1 + w/2 + w^2/6 + ...)
        return Complex64::new(l, 0.0) * (Complex64::new(1.0, 0.0) + w / 2.0 + w * w / 6.0 + w * w * w / 24.0);
    }
    (Complex64::new(1.0, 0.0) - w.exp()) / (s - Complex64::new(1.0, 0.0))
}

/// `prod_{p <= y} (1 - 1/p)`.
pub fn mertens_product(y: u64) -> f64 {
    let mut prod = 1.0;
    for_each_prime(2, y, |p| prod *= 1.0 - 1.0 / p as f64);
    prod
}

/// Solves `sum_{n<=x, P^-(n)>y} n^{-s} = ((1 - x^{1-s})/(s-1) + gamma) prod_{p<=y}(1 - 1/p)`
/// for `gamma` at `x = x_proxy`.
pub fn zeta_y_gamma(y: u64, s: Complex64, x_proxy: u64) -> Result<GammaEstimate> {
    if y < 2 {
        return Err(Error::arg("y must be at least 2"));
    }
    let floor = 1.0 - 1.0 / (60.0 * (y as f64).ln());
    if !(s.re >= floor) {
        return Err(Error::arg(format!("Re(s) = {} is below 1 - 1/(60 log y) = {floor}", s.re)));
    }
    if x_proxy <= 2 * y {
        return Err(Error::arg("x_proxy must exceed 2y"));
    }
    let half = x_proxy / 2;
    let mut xs: Vec<u64> =
        (0..BAR_POINTS).map(|i| half + ((x_proxy - half) as f64 * i as f64 / (BAR_POINTS - 1) as f64) as u64).collect();
    xs.dedup();
    *xs.last_mut().unwrap() = x_proxy;
    let sums = rough_zeta_sums(y, s, &xs)?;
    let prod = mertens_product(y);
    let gammas: Vec<Complex64> = xs.iter().zip(&sums).map(|(&x, &v)| v / prod - main_term(x as f64, s)).collect();
    let value = *gammas.last().unwrap();
    let error_bar = gammas.iter().map(|g| (g - value).norm()).fold(0.0, f64::max);
    let vt = v_sub_t(s.im);
    let warning = ((y as f64).ln() < 100.0 * vt.ln())
        .then(|| format!("y = {y} is below V_t^100 = exp({:.3}); the identity is outside its proven range", 100.0 * vt.ln()));
    Ok(GammaEstimate {
        s,
        y,
        x_proxy,
        value,
        error_bar,
        log_y_ratio: value.norm() / (y as f64).ln(),
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_term_limits() {
        let x = 1e6f64;
        assert!((main_term(x, Complex64::new(1.0, 0.0)).re - x.ln()).abs() < 1e-12);
        let a = main_term(x, Complex64::new(1.0 + 1e-9, 0.0));
        let b = main_term(x, Complex64::new(1.0 + 1e-5, 0.0));
        assert!((a.re - x.ln()).abs() < 1e-6);
        assert!(b.re < x.ln());
    }

    #[test]
    fn real_s_gives_real_gamma() {
        let g = zeta_y_gamma(10, Complex64::new(1.0, 0.0), 200_000).unwrap();
        assert_eq!(g.value.im, 0.0);
        assert!(g.warning.is_some());
        assert!(zeta_y_gamma(10, Complex64::new(0.5, 0.0), 200_000).is_err());
    }
}
