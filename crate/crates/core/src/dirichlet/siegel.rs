//! Pretentious scale `Q'` and the real-zero locator near `s = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::series::{l_continued, l_y_derivative_with, ContinuedEvaluation};
use crate::arith::PrimeAssignment;
use crate::catalog::{catalog_get, FunctionSpec};
use crate::error::{Error, Result};

/// Below this `|L_Q(1, f)|` the scale is reported as infinite.
pub const DEGENERATE_FLOOR: f64 = 1e-8;
/// Default truncation for window evaluations.
pub const DEFAULT_WINDOW_N: u64 = 1_000_000;
pub const DEFAULT_C_WINDOW: f64 = 0.5;
pub const MIN_SAMPLES: usize = 16;
const BISECTIONS: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMethod {
    /// Smoothed continued sum at `sigma = 1`.
    Continued,
    /// Convergent series at `1 + 1/log x_proxy`.
    Proxy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PretentiousScale {
    pub q: u64,
    pub x_proxy: u64,
    /// `log Q'`, or `+inf` when `|L_Q(1, f)|` is indistinguishable from 0.
    pub log_q_prime: f64,
    pub l_value: Complex64,
    pub l_error: f64,
    pub method: ScaleMethod,
    pub degenerate: bool,
}

/// `log Q' ~ log Q / |L_Q(1, f)|`.
///
/// `L_Q(1, f)` comes from the continued evaluation truncated at `x_proxy`
/// when it settles; otherwise from the series at `s = 1 + 1/log x_proxy`.
pub fn pretentious_scale(f: &FunctionSpec, q: u64, x_proxy: u64) -> Result<PretentiousScale> {
    pretentious_scale_with(&catalog_get(f)?, q, x_proxy)
}

pub fn pretentious_scale_with(f: &PrimeAssignment, q: u64, x_proxy: u64) -> Result<PretentiousScale> {
    if q < 2 {
        return Err(Error::arg("Q must be at least 2"));
    }
    if x_proxy <= q {
        return Err(Error::arg("x_proxy must exceed Q"));
    }
    let log_q = (q as f64).ln();
    let cont = l_continued(f, q, 1.0, x_proxy)?;
    let (value, error, method) = if cont.converged {
        (cont.value, cont.error, ScaleMethod::Continued)
    } else {
        let s = Complex64::new(1.0 + 1.0 / (x_proxy as f64).ln(), 0.0);
        let e = l_y_derivative_with(f, q, s, 0, x_proxy)?;
        (e.value, e.tail_bound, ScaleMethod::Proxy)
    };
    // The proxy tail majorant is one-sided in size, so only the continued
    // value's error radius can certify a vanishing L_Q(1, f).
    let degenerate = value.norm() <= DEGENERATE_FLOOR || (method == ScaleMethod::Continued && value.norm() <= error);
    Ok(PretentiousScale {
        q,
        x_proxy,
        log_q_prime: if degenerate { f64::INFINITY } else { log_q / value.norm() },
        l_value: value,
        l_error: error,
        method,
        degenerate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiegelSample {
    pub sigma: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiegelProfile {
    pub q: u64,
    pub beta: f64,
    /// True when a significant sign change was found.
    pub beta_is_zero: bool,
    pub samples: Vec<SiegelSample>,
    pub c_window: f64,
    /// Range of `L_Q(sigma, f) / ((sigma - beta) log Q)` over
    /// `[1 - c/log Q, 1 + c/log Q]`.
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// `prod_{p > Q} (1 - f(p)/p)^{-1}`, estimated as `L_Q(1, f)`.
    pub eta: f64,
    pub truncation_n: u64,
}

impl SiegelProfile {
    pub fn to_csv(&self) -> String {
        use crate::harness::fmt_f64;
        let mut s = String::from("sigma,value,error\n");
        for p in &self.samples {
            s.push_str(&format!("{},{},{}\n", fmt_f64(p.sigma), fmt_f64(p.value), fmt_f64(p.error)));
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile serializes")
    }
}

fn eval_real(f: &PrimeAssignment, q: u64, sigma: f64, n: u64) -> Result<ContinuedEvaluation> {
    l_continued(f, q, sigma, n)
}

/// Scans `[1 - 2c/log Q, 1 + c/log Q]` for a sign change of `L_Q(sigma, f)`.
pub fn siegel_locate(f: &FunctionSpec, q: u64, c_window: f64, samples: usize) -> Result<SiegelProfile> {
    siegel_locate_with(&catalog_get(f)?, q, c_window, samples, DEFAULT_WINDOW_N)
}

pub fn siegel_locate_with(f: &PrimeAssignment, q: u64, c_window: f64, samples: usize, n: u64) -> Result<SiegelProfile> {
    if !f.is_real() {
        return Err(Error::arg("siegel_locate needs a real-valued function"));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::Degenerate(format!("samples = {samples}; at least {MIN_SAMPLES} are needed")));
    }
    if q < 3 {
        return Err(Error::arg("Q must be at least 3"));
    }
    let log_q = (q as f64).ln();
    if !(c_window > 0.0) || 2.0 * c_window >= log_q {
        return Err(Error::arg("c_window must lie in (0, log Q / 2)"));
    }
    let lo = 1.0 - 2.0 * c_window / log_q;
    let hi = 1.0 + c_window / log_q;
    let mut pts = Vec::with_capacity(samples);
    for i in 0..samples {
        let sigma = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let e = eval_real(f, q, sigma, n)?;
        pts.push(SiegelSample { sigma, value: e.value.re, error: e.error });
    }

    // Consecutive opposite signs, both beyond their error radius.
    let significant: Vec<&SiegelSample> = pts.iter().filter(|p| p.value.abs() > p.error).collect();
    let changes: Vec<(f64, f64)> = significant
        .windows(2)
        .filter(|w| w[0].value.signum() != w[1].value.signum())
        .map(|w| (w[0].sigma, w[1].sigma))
        .collect();
    if changes.len() > 1 {
        return Err(Error::MultipleSignChanges { count: changes.len() });
    }
    let (beta, beta_is_zero) = match changes.first() {
        None => (lo, false),
        Some(&(mut a, mut b)) => {
            let fa = eval_real(f, q, a, n)?.value.re;
            for _ in 0..BISECTIONS {
                let m = 0.5 * (a + b);
                let fm = eval_real(f, q, m, n)?.value.re;
                if fm.signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            ((0.5 * (a + b)).min(1.0), true)
        }
    };

    let inner_lo = 1.0 - c_window / log_q;
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = f64::NEG_INFINITY;
    for p in pts.iter().filter(|p| p.sigma >= inner_lo - 1e-15 && (p.sigma - beta).abs() > 1e-9) {
        let r = p.value / ((p.sigma - beta) * log_q);
        ratio_min = ratio_min.min(r);
        ratio_max = ratio_max.max(r);
    }
    let eta = eval_real(f, q, 1.0, n)?.value.re;
    Ok(SiegelProfile {
        q,
        beta,
        beta_is_zero,
        samples: pts,
        c_window,
        ratio_min,
        ratio_max,
        eta,
        truncation_n: n,
    })
}
