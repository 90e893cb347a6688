//! Mean-square norms of `S_k(e^u; Lambda f)` and their Plancherel duals.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::comb::comb_log_derivative;
use super::series::{tail_majorant, upper_gamma_int, RoughTerms};
use crate::arith::primes::primes_up_to;
use crate::arith::spf::DEFAULT_CAP;
use crate::arith::PrimeAssignment;
use crate::catalog::{catalog_get, FunctionSpec};
use crate::compensated::{CompensatedSum, ComplexSum};
use crate::error::{Error, Result};

/// Rosser-Schoenfeld: `psi(x) < 1.03883 x` for all `x > 0`.
const PSI_CONSTANT: f64 = 1.03883;

/// Default height step for the `t` quadrature.
pub const DEFAULT_T_STEP: f64 = 0.05;

/// `(n, Lambda(n) f(n) (log n)^k)` for prime powers `n <= x`, ascending.
fn lambda_f_terms(f: &PrimeAssignment, k: u32, x: u64) -> Vec<(u64, Complex64)> {
    let mut out = Vec::new();
    for p in primes_up_to(x) {
        let fp = f.eval_at_prime(p);
        let lp = (p as f64).ln();
        let (mut q, mut fq, mut a) = (p, fp, 1u32);
        loop {
            out.push((q, fq * lp * (a as f64 * lp).powi(k as i32)));
            match q.checked_mul(p) {
                Some(n) if n <= x => {
                    q = n;
                    fq *= fp;
                    a += 1;
                }
                _ => break,
            }
        }
    }
    out.sort_unstable_by_key(|&(n, _)| n);
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IkNorm {
    /// `I_k`, the square root of the trapezoid integral.
    pub value: f64,
    /// Trapezoid value of `int_0^{u_max} |S_k(e^u)|^2 e^{-2 sigma u} du`.
    pub integral: f64,
    /// Same integral evaluated piecewise exactly between jumps.
    pub exact_integral: f64,
    /// `step * TV(integrand)`, bounding the trapezoid error.
    pub quadrature_error: f64,
    /// Majorant of the integral over `(u_max, inf)` from `psi(x) < 1.04 x`.
    pub tail_majorant: f64,
    pub sigma: f64,
    pub u_max: f64,
    pub step: f64,
}

fn check_inputs(sigma: f64, u_max: f64) -> Result<u64> {
    if !(sigma > 1.0) {
        return Err(Error::Divergence { sigma });
    }
    if !(u_max > 0.0) || !u_max.is_finite() {
        return Err(Error::arg("u_max must be positive"));
    }
    let x = u_max.exp().floor();
    if x > DEFAULT_CAP as f64 {
        return Err(Error::Capacity { what: "e^u_max", value: x as u64, cap: DEFAULT_CAP });
    }
    Ok(x as u64)
}

pub fn i_k_norm(f: &FunctionSpec, k: u32, sigma: f64, u_max: f64, step: f64) -> Result<IkNorm> {
    i_k_norm_with(&catalog_get(f)?, k, sigma, u_max, step)
}

pub fn i_k_norm_with(f: &PrimeAssignment, k: u32, sigma: f64, u_max: f64, step: f64) -> Result<IkNorm> {
    let x = check_inputs(sigma, u_max)?;
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::arg("step must be positive"));
    }
    let terms = lambda_f_terms(f, k, x);
    let two_s = 2.0 * sigma;

    // Exact integral and total variation over the pieces [log n_j, log n_{j+1}).
    let mut exact = CompensatedSum::new();
    let mut tv = CompensatedSum::new();
    let mut s = Complex64::new(0.0, 0.0);
    for (j, &(n, c)) in terms.iter().enumerate() {
        let before = s.norm_sqr();
        s += c;
        let after = s.norm_sqr();
        let u0 = (n as f64).ln();
        let u1 = terms.get(j + 1).map_or(u_max, |&(m, _)| (m as f64).ln()).min(u_max);
        let e0 = (-two_s * u0).exp();
        let e1 = (-two_s * u1).exp();
        tv.add((after - before).abs() * e0);
        tv.add(after * (e0 - e1));
        exact.add(after * (e0 - e1) / two_s);
    }

    // Trapezoid on the uniform grid, plus a last partial cell.
    let mut nodes: Vec<f64> = (0..).map(|i| i as f64 * step).take_while(|&u| u <= u_max).collect();
    if *nodes.last().unwrap() < u_max {
        nodes.push(u_max);
    }
    let mut idx = 0;
    let mut s = Complex64::new(0.0, 0.0);
    let values: Vec<f64> = nodes
        .iter()
        .map(|&u| {
            let cut = u.exp() * (1.0 + 1e-15);
            while idx < terms.len() && (terms[idx].0 as f64) <= cut {
                s += terms[idx].1;
                idx += 1;
            }
            s.norm_sqr() * (-two_s * u).exp()
        })
        .collect();
    let mut trap = CompensatedSum::new();
    for w in 0..nodes.len() - 1 {
        trap.add(0.5 * (nodes[w + 1] - nodes[w]) * (values[w] + values[w + 1]));
    }

    let d = 2.0 * (sigma - 1.0);
    let tail = PSI_CONSTANT * PSI_CONSTANT * upper_gamma_int(2 * k, d * u_max) / d.powi(2 * k as i32 + 1);
    let integral = trap.value();
    Ok(IkNorm {
        value: integral.max(0.0).sqrt(),
        integral,
        exact_integral: exact.value(),
        quadrature_error: step * tv.value(),
        tail_majorant: tail,
        sigma,
        u_max,
        step,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlancherelPair {
    /// `int_0^{u_max} |S_k(e^u; Lambda f) e^{-sigma u}|^2 du`.
    pub lhs: f64,
    /// `(1/2pi) int_{|t|<=t_max} |(L'/L)^{(k)}(sigma+it)|^2 / (sigma^2+t^2) dt`.
    pub rhs: f64,
    /// Missing mass of the left side beyond `u_max` (majorant).
    pub lhs_deficit: f64,
    /// Missing mass of the right side beyond `t_max` (majorant).
    pub rhs_deficit: f64,
    pub lhs_quadrature_error: f64,
    pub relative_gap: f64,
    pub t_step: f64,
    pub truncation_n: u64,
    /// `(t, |(L'/L)^{(k)}|^2)` samples.
    pub profile: Vec<(f64, f64)>,
}

impl PlancherelPair {
    pub fn to_csv(&self) -> String {
        use crate::harness::fmt_f64;
        let mut s = String::from("t,abs_log_derivative_sq\n");
        for &(t, v) in &self.profile {
            s.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(v)));
        }
        s
    }
}

pub fn plancherel_pair(f: &FunctionSpec, k: u32, sigma: f64, u_max: f64, t_max: f64) -> Result<PlancherelPair> {
    plancherel_pair_with(&catalog_get(f)?, k, sigma, u_max, t_max, DEFAULT_T_STEP)
}

pub fn plancherel_pair_with(
    f: &PrimeAssignment,
    k: u32,
    sigma: f64,
    u_max: f64,
    t_max: f64,
    t_step: f64,
) -> Result<PlancherelPair> {
    let x = check_inputs(sigma, u_max)?;
    if !(t_max > 0.0) || !t_max.is_finite() || !(t_step > 0.0) {
        return Err(Error::arg("t_max and t_step must be positive and finite"));
    }
    if k as usize + 1 > super::comb::MAX_ORDER {
        return Err(Error::arg("derivative order too large"));
    }
    let ik = i_k_norm_with(f, k, sigma, u_max, u_max / 131_072.0)?;

    let terms = RoughTerms::new(f, 1, sigma, x)?;
    let real = f.is_real();
    let count = (t_max / t_step).floor() as usize + 1;
    let t0 = if real { 0.0 } else { -(count as f64 - 1.0) * t_step };
    let total = if real { count } else { 2 * count - 1 };
    let rows = terms.eval_grid(t0, t_step, total, k + 1);
    let l_tail = tail_majorant(sigma, 0, x);
    let mut profile = Vec::with_capacity(total);
    let mut acc = CompensatedSum::new();
    for (i, derivs) in rows.iter().enumerate() {
        let t = t0 + i as f64 * t_step;
        if derivs[0].norm() <= l_tail {
            return Err(Error::ZeroOnGrid { t });
        }
        // comb gives (-L'/L)^{(k)}; the modulus is what enters.
        let g = comb_log_derivative(derivs)?;
        let v = g.norm_sqr();
        profile.push((t, v));
        let w = if i == 0 || i == total - 1 { 0.5 } else { 1.0 };
        let sym = if real && i > 0 { 2.0 } else { 1.0 };
        acc.add(w * sym * t_step * v / (sigma * sigma + t * t));
    }
    let rhs = acc.value() / (2.0 * std::f64::consts::PI);

    // sup over the line of |sum Lambda f (log n)^k n^{-s}| <= sum Lambda (log n)^k n^{-sigma}.
    let one = PrimeAssignment::new("one", crate::arith::PrimeRule::Constant(Complex64::new(1.0, 0.0)));
    let sup: f64 = lambda_f_terms(&one, k, x).iter().map(|&(n, c)| c.re * (n as f64).powf(-sigma)).sum::<f64>()
        + tail_majorant(sigma, k + 1, x);
    let rhs_deficit = sup * sup / (std::f64::consts::PI * t_max);
    let lhs = ik.integral;
    Ok(PlancherelPair {
        lhs,
        rhs,
        lhs_deficit: ik.tail_majorant,
        rhs_deficit,
        lhs_quadrature_error: ik.quadrature_error,
        relative_gap: (lhs - rhs).abs() / lhs,
        t_step,
        truncation_n: x,
        profile,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MontgomeryRow {
    pub t_max: f64,
    /// `int_{-T}^{T} |A(sigma+it)|^2 dt`.
    pub a_mean_square: f64,
    /// `int_{-T}^{T} |B(sigma+it)|^2 dt`.
    pub b_mean_square: f64,
    /// `a / (3 b)`; the majorization holds when this is at most 1.
    pub ratio: f64,
    pub holds: bool,
}

/// Exact truncated mean squares of `A = sum a_n n^{-s}` and `B = sum b_n n^{-s}`
/// with `a_n = f(n) Lambda(n)`, `b_n = Lambda(n)` over `n <= N`, using
/// `int_{-T}^{T} (m/n)^{it} dt = 2 sin(T log(m/n)) / log(m/n)`.
pub fn montgomery_check(f: &PrimeAssignment, n: u64, sigma: f64, t_values: &[f64]) -> Result<Vec<MontgomeryRow>> {
    if n > DEFAULT_CAP {
        return Err(Error::Capacity { what: "N", value: n, cap: DEFAULT_CAP });
    }
    let one = PrimeAssignment::new("one", crate::arith::PrimeRule::Constant(Complex64::new(1.0, 0.0)));
    let b = lambda_f_terms(&one, 0, n);
    let a = lambda_f_terms(f, 0, n);
    let logs: Vec<f64> = b.iter().map(|&(m, _)| (m as f64).ln()).collect();
    let wb: Vec<f64> = b.iter().zip(&logs).map(|(&(_, c), l)| c.re * (-sigma * l).exp()).collect();
    let wa: Vec<Complex64> = a.iter().zip(&logs).map(|(&(_, c), l)| c * (-sigma * l).exp()).collect();
    let tv = t_values.to_vec();
    let rows: Vec<(Vec<ComplexSum>, Vec<CompensatedSum>)> = (0..b.len())
        .into_par_iter()
        .map(|i| {
            let mut sa = vec![ComplexSum::new(); tv.len()];
            let mut sb = vec![CompensatedSum::new(); tv.len()];
            for (ti, &t) in tv.iter().enumerate() {
                sa[ti].add(wa[i] * wa[i].conj() * (2.0 * t));
                sb[ti].add(wb[i] * wb[i] * (2.0 * t));
            }
            for j in i + 1..b.len() {
                let d = logs[i] - logs[j];
                let pa = wa[i] * wa[j].conj();
                let pb = wb[i] * wb[j];
                for (ti, &t) in tv.iter().enumerate() {
                    let kern = 4.0 * (t * d).sin() / d;
                    sa[ti].add(Complex64::new(pa.re * kern, 0.0));
                    sb[ti].add(pb * kern);
                }
            }
            (sa, sb)
        })
        .collect();
    let mut out = Vec::new();
    for (ti, &t) in tv.iter().enumerate() {
        let mut sa = ComplexSum::new();
        let mut sb = CompensatedSum::new();
        for (ra, rb) in &rows {
            sa.merge(&ra[ti]);
            sb.merge(&rb[ti]);
        }
        let am = sa.value().re;
        let bm = sb.value();
        let ratio = am / (3.0 * bm);
        out.push(MontgomeryRow { t_max: t, a_mean_square: am, b_mean_square: bm, ratio, holds: ratio <= 1.0 });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeRule;

    #[test]
    fn leading_segment_is_empty() {
        let lam = PrimeAssignment::new("l", PrimeRule::Constant(Complex64::new(-1.0, 0.0)));
        let a = i_k_norm_with(&lam, 0, 1.5, 2f64.ln() * 0.999, 0.01).unwrap();
        assert_eq!(a.integral, 0.0);
        assert_eq!(a.exact_integral, 0.0);
    }

    #[test]
    fn trapezoid_tracks_exact() {
        let lam = PrimeAssignment::new("l", PrimeRule::Constant(Complex64::new(-1.0, 0.0)));
        let a = i_k_norm_with(&lam, 1, 1.3, 8.0, 0.001).unwrap();
        assert!((a.integral - a.exact_integral).abs() <= a.quadrature_error);
    }

    #[test]
    fn montgomery_small() {
        let lam = PrimeAssignment::new("l", PrimeRule::Constant(Complex64::new(-1.0, 0.0)));
        let rows = montgomery_check(&lam, 2000, 1.0, &[10.0]).unwrap();
        assert!(rows[0].holds);
        // |a_n| = b_n here, so the mean squares cannot differ wildly.
        assert!(rows[0].a_mean_square > 0.0);
    }
}
