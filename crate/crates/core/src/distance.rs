//! Pretentious distance, the Halász functional and the exponent calculators.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::primes::for_each_prime;
use crate::arith::spf::DEFAULT_CAP;
use crate::arith::PrimeAssignment;
use crate::catalog::{catalog_get, FunctionSpec};
use crate::compensated::CompensatedSum;
use crate::error::{Error, Result};

/// Golden-section tolerance in `t`.
pub const REFINE_TOL: f64 = 1e-4;

/// Grid points per parallel chunk. Within a chunk the phases `p^{-it}` are
/// advanced by recurrence; each chunk restarts from a direct evaluation.
const CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub value: f64,
    pub y: u64,
    pub x: u64,
    pub primes_used: u64,
}

impl DistanceResult {
    /// `D(f, g; y, x)`, the square root of the stored value.
    pub fn distance(&self) -> f64 {
        self.value.max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizerResult {
    pub value: f64,
    pub t_star: f64,
    pub t_max: f64,
    pub grid_step: f64,
    pub refined: bool,
    /// `(t, objective)` at every grid point, in increasing `t`.
    pub profile: Vec<(f64, f64)>,
}

impl MinimizerResult {
    /// `t,distance` rows plus a closing `summary` row with `t_star` and the minimum.
    pub fn to_csv(&self) -> String {
        use crate::harness::fmt_f64;
        let mut s = String::from("t,distance\n");
        for &(t, v) in &self.profile {
            s.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(v)));
        }
        s.push_str(&format!("summary,{},{}\n", fmt_f64(self.t_star), fmt_f64(self.value)));
        s
    }
}

fn check_range(y: u64, x: u64) -> Result<()> {
    if x > DEFAULT_CAP {
        return Err(Error::Capacity { what: "x", value: x, cap: DEFAULT_CAP });
    }
    if y < 1 || y >= x {
        return Err(Error::arg(format!("need 1 <= y < x, got y = {y}, x = {x}")));
    }
    Ok(())
}

/// `sum_{y<p<=x} (1 - Re(f(p) conj(g(p)))) / p`.
pub fn distance_sq(f: &FunctionSpec, g: &FunctionSpec, y: u64, x: u64) -> Result<DistanceResult> {
    distance_sq_with(&catalog_get(f)?, &catalog_get(g)?, y, x)
}

pub fn distance_sq_with(f: &PrimeAssignment, g: &PrimeAssignment, y: u64, x: u64) -> Result<DistanceResult> {
    check_range(y, x)?;
    let mut acc = CompensatedSum::new();
    let mut count = 0;
    for_each_prime(y + 1, x, |p| {
        let z = f.eval_at_prime(p) * g.eval_at_prime(p).conj();
        acc.add((1.0 - z.re) / p as f64);
        count += 1;
    });
    Ok(DistanceResult { value: acc.value(), y, x, primes_used: count })
}

/// `sum (1 - Re(f(p) conj(g(p)))) / p` over `primes`, from values
/// `fv[i] = f(primes[i])` and `gv[i] = g(primes[i])`.
pub fn distance_sq_values(fv: &[Complex64], gv: &[Complex64], primes: &[u64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for ((a, b), &p) in fv.iter().zip(gv).zip(primes) {
        acc.add((1.0 - (a * b.conj()).re) / p as f64);
    }
    acc.value()
}

/// `sum_{y<p<=x} 1/p`, the scale of the distance cap.
pub fn reciprocal_prime_sum(y: u64, x: u64) -> f64 {
    let mut acc = CompensatedSum::new();
    for_each_prime(y + 1, x, |p| acc.add(1.0 / p as f64));
    acc.value()
}

/// Primes in a range with `log p` and `f(p)/p`, for repeated twisted sums
/// `sum Re(f(p) p^{-1-it})`.
pub struct TwistKernel {
    pub primes: Vec<u64>,
    pub logp: Vec<f64>,
    /// `f(p) / p`.
    pub weight: Vec<Complex64>,
    /// Compensated partial sums of `1/p` from the top: `tail_inv[i] = sum_{j >= i} 1/p_j`.
    tail_inv: Vec<f64>,
}

impl TwistKernel {
    /// Kernel over the primes in `(y, x]`.
    pub fn new(f: &PrimeAssignment, y: u64, x: u64) -> Self {
        let mut primes = Vec::new();
        for_each_prime(y + 1, x, |p| primes.push(p));
        Self::from_primes(f, primes)
    }

    pub fn from_primes(f: &PrimeAssignment, primes: Vec<u64>) -> Self {
        let logp = primes.iter().map(|&p| (p as f64).ln()).collect();
        let weight = primes.iter().map(|&p| f.eval_at_prime(p) / p as f64).collect();
        let mut tail_inv = vec![0.0; primes.len() + 1];
        let mut acc = CompensatedSum::new();
        for i in (0..primes.len()).rev() {
            acc.add(1.0 / primes[i] as f64);
            tail_inv[i] = acc.value();
        }
        Self { primes, logp, weight, tail_inv }
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Index of the first prime `> q`.
    pub fn start_above(&self, q: f64) -> usize {
        self.primes.partition_point(|&p| (p as f64) <= q)
    }

    /// `sum_{i >= start} 1/p_i`.
    pub fn inv_sum_from(&self, start: usize) -> f64 {
        self.tail_inv[start]
    }

    /// `sum_{i >= start} Re(f(p) p^{-1-it})`, direct phases.
    pub fn re_twisted_from(&self, t: f64, start: usize) -> f64 {
        let mut acc = CompensatedSum::new();
        for i in start..self.primes.len() {
            let w = Complex64::from_polar(1.0, -t * self.logp[i]);
            acc.add((self.weight[i] * w).re);
        }
        acc.value()
    }

    /// As [`TwistKernel::re_twisted_from`] on the evenly spaced points
    /// `t0 + j dt`, using the phase recurrence within the run.
    fn re_twisted_run(&self, t0: f64, dt: f64, count: usize, start: &[usize]) -> Vec<f64> {
        let mut acc = vec![CompensatedSum::new(); count];
        let first = start.iter().copied().min().unwrap_or(0);
        for i in first..self.primes.len() {
            let mut w = Complex64::from_polar(1.0, -t0 * self.logp[i]);
            let r = Complex64::from_polar(1.0, -dt * self.logp[i]);
            let a = self.weight[i];
            for (j, slot) in acc.iter_mut().enumerate() {
                if i >= start[j] {
                    slot.add((a * w).re);
                }
                w *= r;
            }
        }
        acc.iter().map(|a| a.value()).collect()
    }

    /// Evaluates `obj(t, re_sum_from(start(t)))` on a symmetric grid in
    /// parallel; the reduction is identical for any thread count.
    fn grid_eval(&self, grid: &[f64], start: impl Fn(f64) -> usize + Sync) -> Vec<f64> {
        if grid.is_empty() {
            return Vec::new();
        }
        grid.par_chunks(CHUNK)
            .flat_map_iter(|chunk| {
                // Chunks are evenly spaced except possibly at the clamped ends.
                let dt = if chunk.len() > 1 { chunk[1] - chunk[0] } else { 0.0 };
                let even = chunk.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-12 * dt.abs().max(1.0));
                let starts: Vec<usize> = chunk.iter().map(|&t| start(t)).collect();
                if even {
                    self.re_twisted_run(chunk[0], dt, chunk.len(), &starts)
                } else {
                    chunk.iter().zip(&starts).map(|(&t, &s)| self.re_twisted_from(t, s)).collect()
                }
            })
            .collect()
    }
}

/// Symmetric grid `i * step` over `[-T, T]`, always containing 0 and `±T`.
pub fn t_grid(t_max: f64, step: f64) -> Vec<f64> {
    if t_max == 0.0 {
        return vec![0.0];
    }
    let m = (t_max / step).floor() as i64;
    let mut g: Vec<f64> = (-m..=m).map(|i| i as f64 * step).collect();
    if (m as f64) * step < t_max {
        g.insert(0, -t_max);
        g.push(t_max);
    }
    g
}

/// Minimizes a unimodal-near-the-bracket function by golden sections.
pub fn golden_section(mut a: f64, mut b: f64, tol: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn check_t(t_max: f64, step: f64) -> Result<()> {
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::arg(format!("T = {t_max} must be finite and nonnegative")));
    }
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::arg(format!("grid step {step} must be positive")));
    }
    Ok(())
}

/// Default grid step `1 / log x`.
pub fn default_step(x: u64) -> f64 {
    1.0 / (x as f64).ln()
}

/// `M_f(x; T) = min_{|t|<=T} D^2(f(n), n^{it}; 1, x)`.
pub fn halasz_m(f: &FunctionSpec, x: u64, t_max: f64, grid_step: f64) -> Result<MinimizerResult> {
    halasz_m_with(&catalog_get(f)?, x, t_max, grid_step)
}

pub fn halasz_m_with(f: &PrimeAssignment, x: u64, t_max: f64, grid_step: f64) -> Result<MinimizerResult> {
    check_range(1, x)?;
    check_t(t_max, grid_step)?;
    let kernel = TwistKernel::new(f, 1, x);
    halasz_m_kernel(&kernel, t_max, grid_step)
}

/// Halász minimization over a prebuilt kernel on `(1, x]`.
pub fn halasz_m_kernel(kernel: &TwistKernel, t_max: f64, grid_step: f64) -> Result<MinimizerResult> {
    check_t(t_max, grid_step)?;
    let h = kernel.inv_sum_from(0);
    let grid = t_grid(t_max, grid_step);
    let re = kernel.grid_eval(&grid, |_| 0);
    let profile: Vec<(f64, f64)> = grid.iter().zip(&re).map(|(&t, &r)| (t, h - r)).collect();
    let (mut t_star, mut value) = best(&profile);
    let mut refined = false;
    if grid.len() > 1 {
        let a = (t_star - grid_step).max(-t_max);
        let b = (t_star + grid_step).min(t_max);
        let (tr, vr) = golden_section(a, b, REFINE_TOL, |t| h - kernel.re_twisted_from(t, 0));
        refined = true;
        if vr < value {
            t_star = tr;
            value = vr;
        }
    }
    Ok(MinimizerResult { value, t_star, t_max, grid_step, refined, profile })
}

fn best(profile: &[(f64, f64)]) -> (f64, f64) {
    let mut b = profile[0];
    for &(t, v) in &profile[1..] {
        // Ties go to the smaller |t|, so the choice is symmetric-stable.
        if v < b.1 || (v == b.1 && t.abs() < b.0.abs()) {
            b = (t, v);
        }
    }
    b
}

/// `Q_t = exp(2 log Q (1+|t|)^{1/(A-2)})`.
pub fn q_sub_t(q: f64, a: f64, t: f64) -> Result<f64> {
    Ok(log_q_sub_t(q, a, t)?.exp())
}

/// `log Q_t`, finite even when `Q_t` itself overflows.
pub fn log_q_sub_t(q: f64, a: f64, t: f64) -> Result<f64> {
    if !(a > 2.0) {
        return Err(Error::arg(format!("A = {a} must exceed 2")));
    }
    if !(q >= 3.0) {
        return Err(Error::arg(format!("Q = {q} must be at least 3")));
    }
    if !t.is_finite() {
        return Err(Error::arg("t must be finite"));
    }
    Ok(2.0 * q.ln() * (1.0 + t.abs()).powf(1.0 / (a - 2.0)))
}

/// Raw ingredients of the lower bound `max{M_{mu f}/2 + O(1), 2 log Q}`,
/// reported without absorbing any constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NWitnesses {
    /// `M_{mu f}(x; T)`, computed with `mu` realized as Liouville on primes.
    pub m_mu_f: f64,
    pub half_m_mu_f: f64,
    /// `log log Q_0 = log(2 log Q)`.
    pub log_log_q0: f64,
    /// `2 log Q`, as printed in the lower-bound display.
    pub two_log_q: f64,
    pub n_minus_half_m: f64,
    pub n_minus_log_log_q0: f64,
    pub n_minus_two_log_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BigNResult {
    pub min: MinimizerResult,
    /// Largest `|t|` with `Q_t <= x`.
    pub t_feasible: f64,
    pub witnesses: NWitnesses,
}

/// `N(x; T) = min_{|t|<=T, Q_t<=x} log log Q_t + D^2(f(n), mu(n) n^{it}; Q_t, x)`.
pub fn big_n(f: &FunctionSpec, x: u64, t_max: f64, q: f64, a: f64, grid_step: f64) -> Result<BigNResult> {
    big_n_with(&catalog_get(f)?, x, t_max, q, a, grid_step)
}

pub fn big_n_with(f: &PrimeAssignment, x: u64, t_max: f64, q: f64, a: f64, grid_step: f64) -> Result<BigNResult> {
    check_t(t_max, grid_step)?;
    let log_q0 = log_q_sub_t(q, a, 0.0)?;
    let log_x = (x as f64).ln();
    if x > DEFAULT_CAP {
        return Err(Error::Capacity { what: "x", value: x, cap: DEFAULT_CAP });
    }
    if log_q0 > log_x {
        return Err(Error::Infeasible(format!("Q_0 = Q^2 = {} exceeds x = {x}", log_q0.exp())));
    }
    let t_feasible = (log_x / log_q0).powf(a - 2.0) - 1.0;
    let te = t_max.min(t_feasible.max(0.0));
    // D^2(f, -p^{it}) = sum (1 + Re(f(p) p^{-it})) / p over Q_t < p <= x.
    let q0 = log_q0.exp();
    let kernel = TwistKernel::new(f, q0.floor() as u64, x);
    let log_qt = |t: f64| 2.0 * q.ln() * (1.0 + t.abs()).powf(1.0 / (a - 2.0));
    let start = |t: f64| kernel.start_above(log_qt(t).exp());
    let objective = |t: f64, re: f64| log_qt(t).ln() + kernel.inv_sum_from(start(t)) + re;
    let grid = t_grid(te, grid_step);
    let re = kernel.grid_eval(&grid, start);
    let profile: Vec<(f64, f64)> = grid.iter().zip(&re).map(|(&t, &r)| (t, objective(t, r))).collect();
    let (mut t_star, mut value) = best(&profile);
    let mut refined = false;
    if grid.len() > 1 {
        let lo = (t_star - grid_step).max(-te);
        let hi = (t_star + grid_step).min(te);
        let (tr, vr) = golden_section(lo, hi, REFINE_TOL, |t| objective(t, kernel.re_twisted_from(t, start(t))));
        refined = true;
        if vr < value {
            t_star = tr;
            value = vr;
        }
    }
    let mu_f = PrimeAssignment::new(
        format!("product(liouville;{})", f.label),
        crate::arith::PrimeRule::Product(
            Box::new(crate::arith::PrimeRule::Constant(Complex64::new(-1.0, 0.0))),
            Box::new(f.rule.clone()),
        ),
    );
    let m = halasz_m_with(&mu_f, x, t_max, grid_step)?.value;
    let log_log_q0 = log_q0.ln();
    let witnesses = NWitnesses {
        m_mu_f: m,
        half_m_mu_f: m / 2.0,
        log_log_q0,
        two_log_q: log_q0,
        n_minus_half_m: value - m / 2.0,
        n_minus_log_log_q0: value - log_log_q0,
        n_minus_two_log_q: value - log_q0,
    };
    Ok(BigNResult {
        min: MinimizerResult { value, t_star, t_max: te, grid_step, refined, profile },
        t_feasible,
        witnesses,
    })
}

/// Exponent `B(A)` of the prime-sum bound.
pub fn bound_exponent_b(a: f64) -> Result<f64> {
    if !(a > 2.0) || !a.is_finite() {
        return Err(Error::arg(format!("A = {a} must exceed 2")));
    }
    Ok(if a < 3.0 {
        (a - 2.0) / (2.0 * a - 2.0)
    } else if a < 4.0 {
        3.0 * (a - 2.0) / (2.0 * a - 2.0)
    } else {
        2.0 * a / 3.0 - 2.0
    })
}

/// Improved exponent `B'(A)` with `k = floor(A - 2)`.
pub fn bound_exponent_bprime(a: f64) -> Result<f64> {
    if !(a > 2.0) || !a.is_finite() {
        return Err(Error::arg(format!("A = {a} must exceed 2")));
    }
    let k = (a - 2.0).floor();
    let first = k + 0.5 - (k + 1.0) * (k + 2.0) / (4.0 * (a - 1.0));
    let second = (a - 2.0) * (2.0 * k + 1.0) / (2.0 * k + a - 1.0);
    Ok(first.min(second))
}

/// `(31 + sqrt(681)) / 10`, the quoted onset of the improvement.
pub fn improvement_threshold() -> f64 {
    (31.0 + 681f64.sqrt()) / 10.0
}

/// `V_t = exp((log(3+|t|))^{2/3} (log log(3+|t|))^{1/3})`.
pub fn v_sub_t(t: f64) -> f64 {
    let l = (3.0 + t.abs()).ln();
    (l.powf(2.0 / 3.0) * l.ln().cbrt()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_sub_t_values() {
        assert!((q_sub_t(3.0, 3.0, 0.0).unwrap() - 9.0).abs() < 1e-12);
        assert!((q_sub_t(3.0, 3.0, 7.0).unwrap() / 3f64.powi(16) - 1.0).abs() < 1e-12);
        assert_eq!(q_sub_t(10.0, 2.5, -2.0).unwrap(), q_sub_t(10.0, 2.5, 2.0).unwrap());
        assert!(matches!(q_sub_t(10.0, 2.0, 0.0), Err(Error::Argument(_))));
    }

    #[test]
    fn b_branches() {
        assert!((bound_exponent_b(2.5).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((bound_exponent_b(3.0).unwrap() - 0.75).abs() < 1e-15);
        assert!((bound_exponent_b(6.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(bound_exponent_bprime(6.0).unwrap() >= 2.0);
        assert!(bound_exponent_b(2.0).is_err());
        assert!(bound_exponent_bprime(1.0).is_err());
    }

    #[test]
    fn v_sub_t_base() {
        let l3 = 3f64.ln();
        assert!((v_sub_t(0.0) - (l3.powf(2.0 / 3.0) * l3.ln().cbrt()).exp()).abs() < 1e-15);
        assert_eq!(v_sub_t(-4.0), v_sub_t(4.0));
    }

    #[test]
    fn grid_shape() {
        assert_eq!(t_grid(0.0, 0.1), vec![0.0]);
        let g = t_grid(1.0, 0.3);
        assert_eq!(g.first(), Some(&-1.0));
        assert_eq!(g.last(), Some(&1.0));
        assert!(g.contains(&0.0));
    }
}
