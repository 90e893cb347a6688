//! Truncated `L_y(s, f)` and its derivatives, convergent and continued.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::primes::for_each_prime;
use crate::arith::spf::DEFAULT_CAP;
use crate::arith::{CmStream, PrimeAssignment, PrimeRule};
use crate::catalog::{catalog_get, FunctionSpec};
use crate::compensated::ComplexSum;
use crate::error::{Error, Result};
use crate::sums::{dirichlet_sums_at, MAX_LOG_POWER};

/// `Gamma(m + 1, z) = m! e^{-z} sum_{j <= m} z^j / j!` for integer `m`.
pub fn upper_gamma_int(m: u32, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=m {
        term *= z / j as f64;
        sum += term;
    }
    let fact: f64 = (1..=m).map(|j| j as f64).product();
    fact * (-z).exp() * sum
}

/// Majorant for `sum_{n > N} (log n)^k n^{-sigma}`: the integral
/// `int_N^inf (log u)^k u^{-sigma} du`, plus the peak of the summand when
/// it is still increasing at `N`.
pub fn tail_majorant(sigma: f64, k: u32, n: u64) -> f64 {
    debug_assert!(sigma > 1.0);
    let ln = (n.max(1) as f64).ln();
    let d = sigma - 1.0;
    let mut bound = upper_gamma_int(k, d * ln) / d.powi(k as i32 + 1);
    let peak = k as f64 / sigma;
    if ln < peak {
        bound += peak.powi(k as i32) * (-(k as f64)).exp();
    }
    bound
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesEvaluation {
    pub s: Complex64,
    pub y: u64,
    pub k: u32,
    pub value: Complex64,
    pub truncation_n: u64,
    pub tail_bound: f64,
}

/// `L_y^{(k)}(s, f)`, truncated at `N` with the integral tail majorant.
pub fn l_y_derivative(f: &FunctionSpec, y: u64, s: Complex64, k: u32, n: u64) -> Result<SeriesEvaluation> {
    l_y_derivative_with(&catalog_get(f)?, y, s, k, n)
}

pub fn l_y_derivative_with(f: &PrimeAssignment, y: u64, s: Complex64, k: u32, n: u64) -> Result<SeriesEvaluation> {
    Ok(l_y_derivatives_with(f, y, s, k, n)?.pop().unwrap())
}

/// `L_y^{(j)}(s, f)` for every `j <= k_max` from one pass.
pub fn l_y_derivatives_with(f: &PrimeAssignment, y: u64, s: Complex64, k_max: u32, n: u64) -> Result<Vec<SeriesEvaluation>> {
    if !(s.re > 1.0) {
        return Err(Error::Divergence { sigma: s.re });
    }
    if k_max > MAX_LOG_POWER {
        return Err(Error::arg(format!("derivative order {k_max} exceeds {MAX_LOG_POWER}")));
    }
    if n == 0 {
        return Err(Error::arg("truncation N must be at least 1"));
    }
    if n > DEFAULT_CAP {
        return Err(Error::Capacity { what: "N", value: n, cap: DEFAULT_CAP });
    }
    let stream = CmStream::new(f, n)?;
    let kk = k_max as usize + 1;
    let pieces = stream.map_segments(1, n, |seg| {
        let mut acc = vec![ComplexSum::new(); kk];
        for i in 0..seg.len() {
            let spf = seg.spf[i] as u64;
            if spf != 1 && spf <= y {
                continue;
            }
            let fv = seg.values[i];
            if fv.re == 0.0 && fv.im == 0.0 {
                continue;
            }
            let m = seg.n(i);
            let l = (m as f64).ln();
            let mut z = fv * Complex64::from_polar((-s.re * l).exp(), -s.im * l);
            for slot in acc.iter_mut() {
                slot.add(z);
                z *= -l;
            }
        }
        acc
    });
    let mut total = vec![ComplexSum::new(); kk];
    for piece in &pieces {
        for (t, p) in total.iter_mut().zip(piece) {
            t.merge(p);
        }
    }
    Ok(total
        .iter()
        .enumerate()
        .map(|(j, acc)| SeriesEvaluation {
            s,
            y,
            k: j as u32,
            value: acc.value(),
            truncation_n: n,
            tail_bound: tail_majorant(s.re, j as u32, n) + acc.compensation(),
        })
        .collect())
}

/// Dense terms `f(n) n^{-sigma}` and `log n` over `P^-(n) > y`, `n <= N`,
/// for evaluating the truncated series at many heights `t`.
pub struct RoughTerms {
    pub sigma: f64,
    pub y: u64,
    pub n_max: u64,
    logn: Vec<f64>,
    a: Vec<Complex64>,
}

/// Heights per parallel chunk on a `t` grid.
const T_CHUNK: usize = 64;

impl RoughTerms {
    pub fn new(f: &PrimeAssignment, y: u64, sigma: f64, n: u64) -> Result<Self> {
        if n > DEFAULT_CAP {
            return Err(Error::Capacity { what: "N", value: n, cap: DEFAULT_CAP });
        }
        let stream = CmStream::new(f, n.max(1))?;
        let mut logn = Vec::new();
        let mut a = Vec::new();
        stream.for_each_segment(1, n, |seg| {
            for i in 0..seg.len() {
                let spf = seg.spf[i] as u64;
                let fv = seg.values[i];
                if (spf != 1 && spf <= y) || fv == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let l = (seg.n(i) as f64).ln();
                logn.push(l);
                a.push(fv * (-sigma * l).exp());
            }
        });
        Ok(Self { sigma, y, n_max: n, logn, a })
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `[sum a_n (-log n)^j n^{-it}]_{j <= k_max}` at one height.
    pub fn eval_at(&self, t: f64, k_max: u32) -> Vec<Complex64> {
        self.eval_run(t, 0.0, 1, k_max).pop().unwrap()
    }

    /// Values at `t0 + i dt`, `i < count`; each chunk of heights restarts the
    /// phase recurrence from a direct evaluation.
    pub fn eval_grid(&self, t0: f64, dt: f64, count: usize, k_max: u32) -> Vec<Vec<Complex64>> {
        let starts: Vec<usize> = (0..count).step_by(T_CHUNK).collect();
        starts
            .par_iter()
            .flat_map_iter(|&i0| {
                let c = T_CHUNK.min(count - i0);
                self.eval_run(t0 + i0 as f64 * dt, dt, c, k_max)
            })
            .collect()
    }

    fn eval_run(&self, t0: f64, dt: f64, count: usize, k_max: u32) -> Vec<Vec<Complex64>> {
        let kk = k_max as usize + 1;
        let mut acc = vec![ComplexSum::new(); count * kk];
        for (&l, &a) in self.logn.iter().zip(&self.a) {
            let mut w = Complex64::from_polar(1.0, -t0 * l);
            let r = Complex64::from_polar(1.0, -dt * l);
            for row in acc.chunks_exact_mut(kk) {
                let mut z = a * w;
                for slot in row.iter_mut() {
                    slot.add(z);
                    z *= -l;
                }
                w *= r;
            }
        }
        acc.chunks_exact(kk).map(|row| row.iter().map(|c| c.value()).collect()).collect()
    }
}

/// Smooth cutoff: 1 on `[0, 1/2]`, 0 on `[1, inf)`, `C^inf` in between.
pub fn smooth_cutoff(u: f64) -> f64 {
    if u <= 0.5 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        let v = 2.0 * (1.0 - u);
        let a = (-1.0 / v).exp();
        let b = (-1.0 / (1.0 - v)).exp();
        a / (a + b)
    }
}

/// Real-point evaluation of `L_y(sigma, f)` valid on both sides of 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuedEvaluation {
    pub sigma: f64,
    pub y: u64,
    pub value: Complex64,
    /// Error radius. Rigorous for characters; otherwise an extrapolation
    /// estimate from the three smoothing scales.
    pub error: f64,
    pub rigorous: bool,
    /// True when the smoothed values contract towards a limit.
    pub converged: bool,
    pub accelerated: bool,
    /// Smoothed sums at cutoffs `N/4, N/2, N`.
    pub smoothed: [Complex64; 3],
    pub truncation_n: u64,
}

/// Largest `|sum_{n <= m} chi(n)|` over one period, and whether the period
/// sum vanishes.
fn character_sup(rule: &PrimeRule, q: u64) -> Option<f64> {
    let f = PrimeAssignment::new("chi", rule.clone());
    let stream = CmStream::new(&f, q).ok()?;
    let vals = stream.collect_values();
    let mut s = 0.0f64;
    let mut sup = 0.0f64;
    for v in &vals {
        s += v.re;
        sup = sup.max(s.abs());
    }
    (s.abs() < 0.5).then_some(sup)
}

/// Euler factor `prod_{p <= y} (1 - f(p) p^{-sigma})`.
pub fn euler_factor(f: &PrimeAssignment, y: u64, s: Complex64) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for_each_prime(2, y, |p| {
        let l = (p as f64).ln();
        prod *= Complex64::new(1.0, 0.0) - f.eval_at_prime(p) * Complex64::from_polar((-s.re * l).exp(), -s.im * l);
    });
    prod
}

/// `L_y(sigma, f) = L(sigma, f) prod_{p <= y} (1 - f(p) p^{-sigma})`, with
/// `L(sigma, f)` summed with a smooth cutoff at three scales.
///
/// For Kronecker characters with vanishing period sum the value at scale N
/// is returned with the partial-summation bound `2 sup|S| (N/2)^{-sigma}`.
/// Otherwise the three scales are Aitken-extrapolated when they contract
/// geometrically, and the error is the size of the last correction.
pub fn l_continued(f: &PrimeAssignment, y: u64, sigma: f64, n: u64) -> Result<ContinuedEvaluation> {
    if !sigma.is_finite() || sigma <= 0.0 {
        return Err(Error::arg(format!("continued evaluation needs sigma > 0, got {sigma}")));
    }
    if n < 16 {
        return Err(Error::arg("continued evaluation needs N >= 16"));
    }
    if n > DEFAULT_CAP {
        return Err(Error::Capacity { what: "N", value: n, cap: DEFAULT_CAP });
    }
    let scales = [n as f64 / 4.0, n as f64 / 2.0, n as f64];
    let stream = CmStream::new(f, n)?;
    let pieces = stream.map_segments(1, n, |seg| {
        let mut acc = [ComplexSum::new(); 3];
        let mut mag = 0.0f64;
        for i in 0..seg.len() {
            let fv = seg.values[i];
            if fv == Complex64::new(0.0, 0.0) {
                continue;
            }
            let m = seg.n(i) as f64;
            let z = fv * (-sigma * m.ln()).exp();
            mag += z.norm();
            for (slot, &sc) in acc.iter_mut().zip(&scales) {
                let w = smooth_cutoff(m / sc);
                if w > 0.0 {
                    slot.add(z * w);
                }
            }
        }
        (acc, mag)
    });
    let mut acc = [ComplexSum::new(); 3];
    let mut mag = 0.0;
    for (p, m) in &pieces {
        for (a, b) in acc.iter_mut().zip(p) {
            a.merge(b);
        }
        mag += m;
    }
    let v = [acc[0].value(), acc[1].value(), acc[2].value()];
    let rounding = 4.0 * f64::EPSILON * mag;
    let factor = euler_factor(f, y, Complex64::new(sigma, 0.0));

    let period = f.rule.character_period();
    if let Some(sup) = period.and_then(|q| character_sup(&f.rule, q)) {
        let err = 2.0 * sup * (n as f64 / 2.0).powf(-sigma) + rounding;
        return Ok(ContinuedEvaluation {
            sigma,
            y,
            value: v[2] * factor,
            error: err * factor.norm(),
            rigorous: true,
            converged: true,
            accelerated: false,
            smoothed: v.map(|z| z * factor),
            truncation_n: n,
        });
    }

    let d1 = v[1] - v[0];
    let d2 = v[2] - v[1];
    let scale = v[2].norm().max(1e-300);
    let tiny = 1e-13 * scale.max(1.0) + rounding;
    let (value, err, converged, accelerated) = if d1.norm() <= tiny && d2.norm() <= tiny {
        (v[2], d1.norm().max(d2.norm()).max(rounding), true, false)
    } else {
        let rho = if d1.norm() > 0.0 { d2.norm() / d1.norm() } else { f64::INFINITY };
        let denom = d2 - d1;
        if rho < 0.9 && denom.norm() > 0.0 {
            let corr = d2 * d2 / denom;
            let acc_v = v[2] - corr;
            (acc_v, corr.norm() + rounding, rho < 0.75, true)
        } else {
            (v[2], d2.norm() + rounding, false, false)
        }
    };
    Ok(ContinuedEvaluation {
        sigma,
        y,
        value: value * factor,
        error: err * factor.norm(),
        rigorous: false,
        converged,
        accelerated,
        smoothed: v.map(|z| z * factor),
        truncation_n: n,
    })
}

/// Rough partial sums `sum_{n <= x, P^-(n) > y} n^{-s}` through the sums
/// engine, for callers that need several cutoffs at once.
pub(crate) fn rough_zeta_sums(y: u64, s: Complex64, xs: &[u64]) -> Result<Vec<Complex64>> {
    let one = PrimeAssignment::new("one", PrimeRule::Constant(Complex64::new(1.0, 0.0)));
    Ok(dirichlet_sums_at(&one, xs, 0, Some(y), s)?.iter().map(|r| r.value).collect())
}
