//! Theorem-shaped bound monitors. Each one tabulates `lhs / rhs` over an
//! `x` grid; constants hidden in the asymptotic bounds are absorbed by the
//! configured threshold.

use num_complex::Complex64;

use super::config::{ExperimentConfig, Scenario};
use super::report::{BoundReport, BoundRow};
use crate::arith::primes::for_each_prime;
use crate::arith::PrimeAssignment;
use crate::catalog::{catalog_get, twist, FunctionSpec};
use crate::compensated::CompensatedSum;
use crate::dirichlet::{l_continued, pretentious_scale_with, siegel_locate_with};
use crate::distance::{big_n_with, bound_exponent_b, default_step, halasz_m_with, log_q_sub_t};
use crate::error::{Error, Result};
use crate::sums::{certify_small_on_average_with, log_grid, partial_sums_at};

/// Tolerance for numerically vanishing `L(1 + it_0, f)`.
pub const ZERO_TOLERANCE: f64 = 1e-3;
/// Truncation for the zero checks at `sigma = 1`.
pub const ZERO_CHECK_N: u64 = 10_000_000;
/// The unspecified constant `c` of the power-saving branch.
pub const POWER_C: f64 = 1.0;

fn grid(cfg: &ExperimentConfig, lo: u64, hi: u64, n: usize) -> Vec<u64> {
    let mut g = cfg.x_grid.clone().unwrap_or_else(|| log_grid(lo, hi, n));
    g.sort_unstable();
    g.dedup();
    g
}

/// `sum_{p <= x} w(p)` at every `x` in the sorted grid, in one pass.
pub fn prime_prefix(xs: &[u64], w: impl Fn(u64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = CompensatedSum::new();
    let mut lo = 2;
    for &x in xs {
        if x >= lo {
            for_each_prime(lo, x, |p| acc.add(w(p)));
            lo = x + 1;
        }
        out.push(acc.value());
    }
    out
}

fn log_p(p: u64) -> f64 {
    (p as f64).ln()
}

fn assignment(cfg: &ExperimentConfig) -> Result<(PrimeAssignment, String)> {
    let spec = cfg.function()?;
    Ok((catalog_get(spec)?, spec.to_string()))
}

fn certify(cfg: &ExperimentConfig, f: &PrimeAssignment, q: u64, a: f64, xs: &[u64]) -> Result<f64> {
    let x_max = *xs.last().unwrap();
    let cert_grid: Vec<u64> = log_grid(q, x_max.max(q + 1), 64).into_iter().chain(xs.iter().copied().filter(|&x| x >= q)).collect();
    let mut cert_grid = cert_grid;
    cert_grid.sort_unstable();
    cert_grid.dedup();
    let rep = certify_small_on_average_with(f, q, a, x_max.max(q + 1), Some(&cert_grid))?;
    if !rep.holds() {
        return Err(Error::HypothesisUnmet(format!(
            "{} is not small on average at Q = {q}, A = {a}: ratio {:.4} at x = {}",
            cfg.function().map(|s| s.to_string()).unwrap_or_default(),
            rep.max_ratio,
            rep.argmax_x
        )));
    }
    Ok(rep.max_ratio)
}

/// `|S_0(x; f)| / x` against `(M + 1) e^{-M} + 1/T`.
pub fn run_halasz_monitor(cfg: &ExperimentConfig) -> Result<BoundReport> {
    let (f, name) = assignment(cfg)?;
    let t_max = cfg.t_max();
    let xs = grid(cfg, 10_000, 1_000_000, 8);
    let sums = partial_sums_at(&f, &xs)?;
    let mut rows = Vec::with_capacity(xs.len());
    for (&x, s) in xs.iter().zip(&sums) {
        let m = halasz_m_with(&f, x, t_max, default_step(x))?.value;
        let rhs = (m + 1.0) * (-m).exp() + 1.0 / t_max;
        rows.push(BoundRow::new(x as f64, s.norm() / x as f64, rhs));
    }
    Ok(BoundReport::new(Scenario::HalaszBound, name, cfg.threshold(), rows).note("T", t_max).note("inverse_T", 1.0 / t_max))
}

/// `|sum_{p<=x} f(p) log p| / x` against `(N - log log Q)^2 (log Q / e^N)^B + 1/T`.
pub fn run_thm12a_monitor(cfg: &ExperimentConfig) -> Result<BoundReport> {
    cfg.validate()?;
    let (f, name) = assignment(cfg)?;
    let q = cfg.require_q()?;
    let a = cfg.require_a()?;
    let t_max = cfg.t_max();
    let qf = q as f64;
    let lo = q.saturating_mul(q).max(1000);
    let xs: Vec<u64> = grid(cfg, lo, lo.max(1_000_000), 6).into_iter().filter(|&x| x >= q * q).collect();
    if xs.is_empty() {
        return Err(Error::Usage("no grid point satisfies x >= Q^2".into()));
    }
    let cert = certify(cfg, &f, q, a, &xs)?;
    let b = bound_exponent_b(a)?;
    let lhs = prime_prefix(&xs, |p| (f.eval_at_prime(p) * log_p(p)).re);
    let lhs_im = prime_prefix(&xs, |p| (f.eval_at_prime(p) * log_p(p)).im);
    let mut rows = Vec::new();
    let mut min_n = f64::INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        let n = big_n_with(&f, x, t_max, qf, a, default_step(x))?;
        let nv = n.min.value;
        min_n = min_n.min(nv);
        let rhs = (nv - qf.ln().ln()).powi(2) * (qf.ln() / nv.exp()).powf(b) + 1.0 / t_max;
        let l = Complex64::new(lhs[i], lhs_im[i]).norm() / x as f64;
        rows.push(BoundRow::new(x as f64, l, rhs));
    }
    Ok(BoundReport::new(Scenario::Thm12aBound, name, cfg.threshold(), rows)
        .note("B", b)
        .note("certification_max_ratio", cert)
        .note("min_N", min_n)
        .note("inverse_T", 1.0 / t_max))
}

/// Checks `L(1 + it_0, f) = 0` numerically through the twist `f(p) p^{-it_0}`.
fn zero_at(f: &PrimeAssignment, t0: f64, n: u64) -> Result<(Complex64, f64)> {
    let g = twist(f, t0);
    let e = l_continued(&g, 1, 1.0, n)?;
    if !(e.value.norm() <= ZERO_TOLERANCE.max(e.error)) {
        return Err(Error::HypothesisUnmet(format!(
            "|L(1 + i{t0}, f)| = {:.3e} exceeds the zero tolerance {ZERO_TOLERANCE:e}",
            e.value.norm()
        )));
    }
    Ok((e.value, e.error))
}

/// `(1/x) sum_{p<=x} (1 + Re f(p) p^{-it_0}) log p` against
/// `(log Q_{t_0} / log x)^{A-2}`, with the `|1 + f(p) p^{-it_0}|` variant at
/// exponent `(A-2)/2` reported as `cs_*` notes.
pub fn run_thm12b_monitor(cfg: &ExperimentConfig) -> Result<BoundReport> {
    cfg.validate()?;
    let (f, name) = assignment(cfg)?;
    let q = cfg.require_q()? as f64;
    let a = cfg.require_a()?;
    let t0 = cfg.require_t0()?;
    let (lz, _) = zero_at(&f, t0, ZERO_CHECK_N)?;
    let log_qt = log_q_sub_t(q, a, t0)?;
    let lo = (log_qt.exp().ceil() as u64).max(1000);
    let xs: Vec<u64> = grid(cfg, lo, lo.max(1_000_000), 8).into_iter().filter(|&x| (x as f64).ln() >= log_qt).collect();
    if xs.is_empty() {
        return Err(Error::Usage("no grid point satisfies x >= Q_{t0}".into()));
    }
    let twisted = |p: u64| f.eval_at_prime(p) * Complex64::from_polar(1.0, -t0 * log_p(p));
    let lhs = prime_prefix(&xs, |p| (1.0 + twisted(p).re) * log_p(p));
    let cs = prime_prefix(&xs, |p| (Complex64::new(1.0, 0.0) + twisted(p)).norm() * log_p(p));
    let mut rows = Vec::new();
    let mut cs_max = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let r = log_qt / (x as f64).ln();
        rows.push(BoundRow::new(x as f64, lhs[i] / x as f64, r.powf(a - 2.0)));
        cs_max = cs_max.max(cs[i] / x as f64 / r.powf((a - 2.0) / 2.0));
    }
    Ok(BoundReport::new(Scenario::Thm12bZero, name, cfg.threshold(), rows)
        .note("abs_L_at_zero", lz.norm())
        .note("log_Q_t0", log_qt)
        .note("cs_max_ratio", cs_max))
}

fn require_real(cfg: &ExperimentConfig, f: &PrimeAssignment) -> Result<()> {
    if !f.is_real() {
        return Err(Error::Usage(format!("scenario {} needs a real-valued function", cfg.scenario)));
    }
    Ok(())
}

/// Real-valued form: with `log Q' = log Q / eta`, `eta = L_Q(1, f)`,
/// `|sum f(p) log p| / x <<  log(2 log x / log Q') (log Q' / log x)^B` for
/// `x >= Q'`; when `L(1, f) = 0`, `sum (1 + f(p)) log p / x << (log Q / log x)^{A-2}`.
pub fn run_cor15_real(cfg: &ExperimentConfig) -> Result<BoundReport> {
    cfg.validate()?;
    let (f, name) = assignment(cfg)?;
    require_real(cfg, &f)?;
    let q = cfg.require_q()?;
    let a = cfg.require_a()?;
    let b = bound_exponent_b(a)?;
    let scale = pretentious_scale_with(&f, q, ZERO_CHECK_N)?;
    let log_q = (q as f64).ln();
    let xs0 = grid(cfg, q.max(1000), 1_000_000, 8);
    let cert = certify(cfg, &f, q, a, &xs0)?;
    let rows: Vec<BoundRow>;
    let mut report_notes = vec![("log_Q_prime", scale.log_q_prime), ("certification_max_ratio", cert), ("B", b)];
    if scale.degenerate {
        let xs: Vec<u64> = xs0.into_iter().filter(|&x| x >= q).collect();
        let lhs = prime_prefix(&xs, |p| (1.0 + f.eval_at_prime(p).re) * log_p(p));
        rows = xs
            .iter()
            .zip(&lhs)
            .map(|(&x, &l)| BoundRow::new(x as f64, l / x as f64, (log_q / (x as f64).ln()).powf(a - 2.0)))
            .collect();
        report_notes.push(("zero_branch", 1.0));
    } else {
        let lqp = scale.log_q_prime;
        let xs: Vec<u64> = xs0.into_iter().filter(|&x| (x as f64).ln() >= lqp).collect();
        let lhs = prime_prefix(&xs, |p| f.eval_at_prime(p).re * log_p(p));
        rows = xs
            .iter()
            .zip(&lhs)
            .map(|(&x, &l)| {
                let lx = (x as f64).ln();
                BoundRow::new(x as f64, l.abs() / x as f64, (2.0 * lx / lqp).ln() * (lqp / lx).powf(b))
            })
            .collect();
        report_notes.push(("zero_branch", 0.0));
    }
    let mut rep = BoundReport::new(Scenario::Cor15Real, name, cfg.threshold(), rows);
    for (k, v) in report_notes {
        rep = rep.note(k, v);
    }
    Ok(rep)
}

/// Power-saving form with `delta = 1/log Q`: certifies
/// `|S_0(x)| <= x^{1-delta} / (log x)^2`, then monitors branch (a)
/// `|sum f(p) log p| << x e^{-c sqrt(log x)} + x^{1 - c eta / log Q}`
/// or branch (b) `sum (1 + f(p)) log p << x^{1 - 1/(61 log Q)}`, and
/// reports `eta / ((1 - beta) log Q)`.
pub fn run_thm16_power(cfg: &ExperimentConfig) -> Result<BoundReport> {
    cfg.validate()?;
    let (f, name) = assignment(cfg)?;
    require_real(cfg, &f)?;
    let q = cfg.require_q()?;
    let log_q = (q as f64).ln();
    let delta = 1.0 / log_q;
    if delta >= 1.0 / 3.0 {
        return Err(Error::HypothesisUnmet(format!("delta = 1/log Q = {delta:.4} is not below 1/3")));
    }
    let xs: Vec<u64> = grid(cfg, q.max(1000), 1_000_000, 8).into_iter().filter(|&x| x >= q).collect();
    if xs.is_empty() {
        return Err(Error::Usage("no grid point satisfies x >= Q".into()));
    }
    let cert_grid: Vec<u64> = {
        let mut g: Vec<u64> = log_grid(*xs.first().unwrap(), *xs.last().unwrap(), 64).into_iter().chain(xs.iter().copied()).collect();
        g.sort_unstable();
        g.dedup();
        g
    };
    let sums = partial_sums_at(&f, &cert_grid)?;
    let mut cert = 0.0f64;
    for (&x, s) in cert_grid.iter().zip(&sums) {
        let xf = x as f64;
        cert = cert.max(s.norm() / (xf.powf(1.0 - delta) / xf.ln().powi(2)));
    }
    if cert > 1.0 {
        return Err(Error::HypothesisUnmet(format!("power saving fails: ratio {cert:.4} at delta = {delta:.4}")));
    }
    let scale = pretentious_scale_with(&f, q, ZERO_CHECK_N)?;
    let mut rows = Vec::new();
    let mut rep_notes = vec![("delta", delta), ("certification_max_ratio", cert)];
    if scale.degenerate {
        let lhs = prime_prefix(&xs, |p| (1.0 + f.eval_at_prime(p).re) * log_p(p));
        for (&x, &l) in xs.iter().zip(&lhs) {
            rows.push(BoundRow::new(x as f64, l, (x as f64).powf(1.0 - 1.0 / (61.0 * log_q))));
        }
        rep_notes.push(("zero_branch", 1.0));
    } else {
        let eta = scale.l_value.re;
        let profile = siegel_locate_with(&f, q, crate::dirichlet::siegel::DEFAULT_C_WINDOW, 16, 1_000_000)?;
        let lhs = prime_prefix(&xs, |p| f.eval_at_prime(p).re * log_p(p));
        for (&x, &l) in xs.iter().zip(&lhs) {
            let xf = x as f64;
            let rhs = xf * (-POWER_C * xf.ln().sqrt()).exp() + xf.powf(1.0 - POWER_C * eta / log_q);
            rows.push(BoundRow::new(xf, l.abs(), rhs));
        }
        rep_notes.push(("zero_branch", 0.0));
        rep_notes.push(("eta", eta));
        rep_notes.push(("beta", profile.beta));
        rep_notes.push(("eta_over_one_minus_beta_log_q", eta / ((1.0 - profile.beta) * log_q)));
    }
    let mut rep = BoundReport::new(Scenario::Thm16Power, name, cfg.threshold(), rows);
    for (k, v) in rep_notes {
        rep = rep.note(k, v);
    }
    Ok(rep)
}

/// The interval indicator of `(y, 2y]` on `x` in `(3y/2, 2y]`: Halász
/// ratios, the exact count `1 + pi(x) - pi(y)` and `S_0(x) log x / x`.
pub fn run_example11(cfg: &ExperimentConfig) -> Result<BoundReport> {
    let y = cfg.y.unwrap_or(1000);
    let spec = FunctionSpec::interval(y as f64);
    let f = catalog_get(&spec)?;
    let t_max = cfg.t_max();
    let lo = 3 * y / 2 + 1;
    let xs: Vec<u64> = match &cfg.x_grid {
        Some(g) => g.iter().copied().filter(|&x| x >= lo && x <= 2 * y).collect(),
        None => (0..16).map(|i| lo + (2 * y - lo) * i / 15).collect(),
    };
    if xs.is_empty() {
        return Err(Error::Usage("no grid point in (3y/2, 2y]".into()));
    }
    let sums = partial_sums_at(&f, &xs)?;
    let pi = prime_prefix(&xs, |_| 1.0);
    let pi_y = prime_prefix(&[y], |_| 1.0)[0];
    let mut rows = Vec::new();
    let mut count_mismatch = 0.0;
    let (mut band_lo, mut band_hi) = (f64::INFINITY, 0.0f64);
    for (i, &x) in xs.iter().enumerate() {
        let s = sums[i].re;
        if s != 1.0 + pi[i] - pi_y {
            count_mismatch += 1.0;
        }
        let band = s * (x as f64).ln() / x as f64;
        band_lo = band_lo.min(band);
        band_hi = band_hi.max(band);
        let m = halasz_m_with(&f, x, t_max, default_step(x))?.value;
        rows.push(BoundRow::new(x as f64, s.abs() / x as f64, (m + 1.0) * (-m).exp() + 1.0 / t_max));
    }
    Ok(BoundReport::new(Scenario::Example11Extremal, spec.to_string(), cfg.threshold(), rows)
        .note("y", y as f64)
        .note("count_mismatches", count_mismatch)
        .note("band_min", band_lo)
        .note("band_max", band_hi))
}
