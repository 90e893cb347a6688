//! Streaming partial sums of completely multiplicative functions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::primes::for_each_prime;
use crate::arith::spf::DEFAULT_CAP;
use crate::arith::{CmStream, PrimeAssignment};
use crate::catalog::{catalog_get, FunctionSpec};
use crate::compensated::ComplexSum;
use crate::error::{Error, Result};

/// Largest supported log-power.
pub const MAX_LOG_POWER: u32 = 12;

/// Default number of log-spaced certification points.
pub const DEFAULT_GRID_POINTS: usize = 64;

/// Per-term weight multiplying `f(n) (log n)^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Weight {
    #[default]
    Unit,
    /// `log p` on primes only; implies a prime-only sum.
    LogP,
    /// `Lambda(n)`: `log p` on every prime power `p^a`.
    VonMangoldt,
    /// `n^{-s}` with `s = re + i im`.
    Reciprocal { re: f64, im: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumRequest {
    pub f: FunctionSpec,
    pub x: u64,
    #[serde(default)]
    pub k: u32,
    /// Restrict to `P^-(n) > y`.
    #[serde(default)]
    pub y: Option<u64>,
    #[serde(default)]
    pub prime_only: bool,
    #[serde(default)]
    pub weight: Weight,
}

impl SumRequest {
    pub fn new(f: FunctionSpec, x: u64) -> Self {
        Self { f, x, k: 0, y: None, prime_only: false, weight: Weight::Unit }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k > MAX_LOG_POWER {
            return Err(Error::arg(format!("log power k = {} exceeds {MAX_LOG_POWER}", self.k)));
        }
        if self.x > DEFAULT_CAP {
            return Err(Error::Capacity { what: "x", value: self.x, cap: DEFAULT_CAP });
        }
        if let Some(y) = self.y {
            if y >= self.x {
                return Err(Error::arg(format!("roughness level y = {y} must be below x = {}", self.x)));
            }
        }
        if self.prime_only && self.weight == Weight::VonMangoldt {
            return Err(Error::arg("von_mangoldt already ranges over prime powers; drop prime_only"));
        }
        if let Weight::Reciprocal { re, im } = self.weight {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::arg("reciprocal weight needs a finite point s"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumResult {
    pub value: Complex64,
    /// Number of integers in the summation set.
    pub terms: u64,
    /// Magnitude of the compensation carried by the accumulator.
    pub compensation: f64,
    /// Largest `|weight(n)| (log n)^k` over the set.
    pub max_weight: f64,
}

#[derive(Clone, Default)]
struct Acc {
    sum: ComplexSum,
    terms: u64,
    max_weight: f64,
}

impl Acc {
    #[inline]
    fn push(&mut self, z: Complex64, w: f64) {
        self.sum.add(z);
        self.terms += 1;
        if w > self.max_weight {
            self.max_weight = w;
        }
    }

    fn merge(&mut self, o: &Acc) {
        self.sum.merge(&o.sum);
        self.terms += o.terms;
        self.max_weight = self.max_weight.max(o.max_weight);
    }

    fn finish(&self) -> SumResult {
        let r = SumResult {
            value: self.sum.value(),
            terms: self.terms,
            compensation: self.sum.compensation(),
            max_weight: self.max_weight,
        };
        let cap = r.terms as f64 * r.max_weight;
        assert!(r.value.norm() <= cap * (1.0 + 1e-9) + 1e-300, "sum exceeds terms * max weight");
        r
    }
}

/// Weight of the integer `n` (log-power included), or `None` if `n` is
/// outside the set.
type TermFn<'a> = dyn Fn(u64, u32) -> Option<(Complex64, f64)> + Sync + 'a;

/// Prefix accumulators of `sum_{n <= x} f(n) w(n)` at every `x` in `xs`
/// (ascending), from one streaming pass.
fn stream_prefix(f: &PrimeAssignment, xs: &[u64], term: &TermFn<'_>) -> Result<Vec<Acc>> {
    debug_assert!(xs.windows(2).all(|w| w[0] <= w[1]));
    let hi = match xs.last() {
        Some(&h) => h,
        None => return Ok(Vec::new()),
    };
    if hi == 0 {
        return Ok(vec![Acc::default(); xs.len()]);
    }
    let stream = CmStream::new(f, hi)?;
    let pieces = stream.map_segments(1, hi, |seg| {
        let seg_hi = seg.lo + seg.len() as u64 - 1;
        let mut acc = Acc::default();
        let mut marks = Vec::new();
        let mut j = xs.partition_point(|&x| x < seg.lo);
        for i in 0..seg.len() {
            let n = seg.n(i);
            if let Some((w, mag)) = term(n, seg.spf[i]) {
                acc.push(seg.values[i] * w, mag);
            }
            while j < xs.len() && xs[j] == n {
                marks.push(acc.clone());
                j += 1;
            }
        }
        debug_assert!(j == xs.len() || xs[j] > seg_hi);
        (acc, marks)
    });
    let mut running = Acc::default();
    let mut out = Vec::with_capacity(xs.len());
    // Points equal to 0 precede every segment.
    for _ in xs.iter().take_while(|&&x| x == 0) {
        out.push(Acc::default());
    }
    for (acc, marks) in &pieces {
        for m in marks {
            let mut at = running.clone();
            at.merge(m);
            out.push(at);
        }
        running.merge(acc);
    }
    Ok(out)
}

fn log_power(n: u64, k: u32) -> f64 {
    if k == 0 {
        1.0
    } else {
        (n as f64).ln().powi(k as i32)
    }
}

/// `n^{-s}`.
#[inline]
pub fn n_pow_neg(n: u64, s: Complex64) -> Complex64 {
    let l = (n as f64).ln();
    Complex64::from_polar((-s.re * l).exp(), -s.im * l)
}

fn integer_term<'a>(req: &'a SumRequest) -> impl Fn(u64, u32) -> Option<(Complex64, f64)> + Sync + 'a {
    move |n, spf| {
        if let Some(y) = req.y {
            // spf == 1 only for n = 1, whose least prime factor is infinite.
            if spf != 1 && (spf as u64) <= y {
                return None;
            }
        }
        let lp = log_power(n, req.k);
        let w = match req.weight {
            Weight::Reciprocal { re, im } => n_pow_neg(n, Complex64::new(re, im)),
            _ => Complex64::new(1.0, 0.0),
        };
        Some((w * lp, w.norm() * lp))
    }
}

/// Prime and prime-power sums over `y < p <= x`, sequential in `p`.
fn prime_sum(f: &PrimeAssignment, req: &SumRequest) -> SumResult {
    let mut acc = Acc::default();
    let lo = req.y.map_or(2, |y| y + 1);
    let s = match req.weight {
        Weight::Reciprocal { re, im } => Some(Complex64::new(re, im)),
        _ => None,
    };
    for_each_prime(lo, req.x, |p| {
        let fp = f.eval_at_prime(p);
        let lp = (p as f64).ln();
        match req.weight {
            Weight::VonMangoldt => {
                let mut pa = p;
                let mut fa = fp;
                let mut a = 1u32;
                loop {
                    let mag = lp * (a as f64 * lp).powi(req.k as i32);
                    acc.push(fa * mag, mag);
                    match pa.checked_mul(p) {
                        Some(next) if next <= req.x => {
                            pa = next;
                            fa *= fp;
                            a += 1;
                        }
                        _ => break,
                    }
                }
            }
            Weight::LogP => {
                let mag = lp * lp.powi(req.k as i32);
                acc.push(fp * mag, mag);
            }
            _ => {
                let lk = lp.powi(req.k as i32);
                let w = s.map_or(Complex64::new(1.0, 0.0), |s| n_pow_neg(p, s));
                acc.push(fp * w * lk, w.norm() * lk);
            }
        }
    });
    acc.finish()
}

/// Exact finite sum of `f(n) weight(n) (log n)^k` over the requested set.
pub fn partial_sum(req: &SumRequest) -> Result<SumResult> {
    req.validate()?;
    let f = catalog_get(&req.f)?;
    partial_sum_with(&f, req)
}

/// As [`partial_sum`] with an already-resolved assignment (`req.f` ignored).
pub fn partial_sum_with(f: &PrimeAssignment, req: &SumRequest) -> Result<SumResult> {
    req.validate()?;
    if req.prime_only || matches!(req.weight, Weight::LogP | Weight::VonMangoldt) {
        return Ok(prime_sum(f, req));
    }
    let term = integer_term(req);
    let accs = stream_prefix(f, &[req.x], &term)?;
    Ok(accs[0].finish())
}

/// `sum_{n <= x, P^-(n) > y} f(n) (log n)^k n^{-s}` at each point of an
/// ascending grid, from one streaming pass.
pub fn dirichlet_sums_at(
    f: &PrimeAssignment,
    xs: &[u64],
    k: u32,
    y: Option<u64>,
    s: Complex64,
) -> Result<Vec<SumResult>> {
    check_grid(xs)?;
    if k > MAX_LOG_POWER {
        return Err(Error::arg(format!("log power k = {k} exceeds {MAX_LOG_POWER}")));
    }
    let req = SumRequest {
        f: FunctionSpec::one(),
        x: 0,
        k,
        y,
        prime_only: false,
        weight: Weight::Reciprocal { re: s.re, im: s.im },
    };
    let term = integer_term(&req);
    Ok(stream_prefix(f, xs, &term)?.iter().map(Acc::finish).collect())
}

fn check_grid(xs: &[u64]) -> Result<()> {
    if xs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::arg("grid must be ascending"));
    }
    if let Some(&hi) = xs.last() {
        if hi > DEFAULT_CAP {
            return Err(Error::Capacity { what: "x", value: hi, cap: DEFAULT_CAP });
        }
    }
    Ok(())
}

/// `sum_{n <= x} f(n)` at each point of an ascending grid, one pass.
pub fn partial_sums_at(f: &PrimeAssignment, xs: &[u64]) -> Result<Vec<Complex64>> {
    weighted_sums_at(f, xs, 0, None)
}

/// `sum_{n <= x, P^-(n) > y} f(n) (log n)^k` at each point of an ascending grid.
pub fn weighted_sums_at(f: &PrimeAssignment, xs: &[u64], k: u32, y: Option<u64>) -> Result<Vec<Complex64>> {
    check_grid(xs)?;
    let req = SumRequest { f: FunctionSpec::one(), x: 0, k, y, prime_only: false, weight: Weight::Unit };
    let term = integer_term(&req);
    Ok(stream_prefix(f, xs, &term)?.iter().map(|a| a.sum.value()).collect())
}

/// `sum_{p <= x} f(p) log p` over primes only.
pub fn prime_log_sum(f: &FunctionSpec, x: u64) -> Result<SumResult> {
    let req = SumRequest { f: f.clone(), x, k: 0, y: None, prime_only: true, weight: Weight::LogP };
    partial_sum(&req)
}

/// `sum_{y < p <= x} f(p) / p^{1+it}`; zero when `y >= x`.
pub fn prime_reciprocal_sum(f: &FunctionSpec, y: u64, x: u64, t: f64) -> Result<Complex64> {
    let f = catalog_get(f)?;
    prime_reciprocal_sum_with(&f, y, x, t)
}

pub fn prime_reciprocal_sum_with(f: &PrimeAssignment, y: u64, x: u64, t: f64) -> Result<Complex64> {
    if x > DEFAULT_CAP {
        return Err(Error::Capacity { what: "x", value: x, cap: DEFAULT_CAP });
    }
    if !t.is_finite() {
        return Err(Error::arg("t must be finite"));
    }
    let mut acc = ComplexSum::new();
    for_each_prime(y + 1, x, |p| acc.add(f.eval_at_prime(p) * n_pow_neg(p, Complex64::new(1.0, t))));
    Ok(acc.value())
}

/// One row of a certification grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyRow {
    pub x: u64,
    pub re: f64,
    pub im: f64,
    pub terms: u64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub q: u64,
    pub a: f64,
    pub grid: Vec<u64>,
    pub rows: Vec<CertifyRow>,
    pub max_ratio: f64,
    pub argmax_x: u64,
    /// Rigorous upper bound for the ratio anywhere between the first and
    /// last grid points, using `|f| <= 1` across each cell.
    pub envelope: f64,
    /// `envelope - max_ratio`: how much a refined grid could still add.
    pub resolution_bound: f64,
}

impl CertifyReport {
    /// True when the ratio stays at most 1 on the grid.
    pub fn holds(&self) -> bool {
        self.max_ratio <= 1.0
    }

    /// True when the ratio stays at most `c` on the grid.
    pub fn holds_with(&self, c: f64) -> bool {
        self.max_ratio <= c
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,re,im,terms,bound,ratio\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.x,
                crate::harness::fmt_f64(r.re),
                crate::harness::fmt_f64(r.im),
                r.terms,
                crate::harness::fmt_f64(r.bound),
                crate::harness::fmt_f64(r.ratio)
            ));
        }
        s
    }
}

/// `n` log-spaced integers in `[lo, hi]`, deduplicated, both ends included.
pub fn log_grid(lo: u64, hi: u64, n: usize) -> Vec<u64> {
    if n <= 1 || lo >= hi {
        return vec![hi];
    }
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut g: Vec<u64> = (0..n)
        .map(|i| {
            let v = (a + (b - a) * i as f64 / (n - 1) as f64).exp().round() as u64;
            v.clamp(lo, hi)
        })
        .collect();
    g[0] = lo;
    g[n - 1] = hi;
    g.dedup();
    g
}

/// `x (log Q)^{A-2} / (log x)^A`.
pub fn small_q_bound(x: f64, q: f64, a: f64) -> f64 {
    x * q.ln().powf(a - 2.0) / x.ln().powf(a)
}

/// Checks `|S_0(x; f)| <= x (log Q)^{A-2} / (log x)^A` on a finite grid.
pub fn certify_small_on_average(
    f: &FunctionSpec,
    q: u64,
    a: f64,
    x_max: u64,
    grid: Option<&[u64]>,
) -> Result<CertifyReport> {
    let fa = catalog_get(f)?;
    certify_small_on_average_with(&fa, q, a, x_max, grid)
}

pub fn certify_small_on_average_with(
    f: &PrimeAssignment,
    q: u64,
    a: f64,
    x_max: u64,
    grid: Option<&[u64]>,
) -> Result<CertifyReport> {
    if !(a >= 2.0) {
        return Err(Error::arg(format!("A = {a} must be at least 2")));
    }
    if q < 2 || q > x_max {
        return Err(Error::arg(format!("need 2 <= Q <= x_max, got Q = {q}, x_max = {x_max}")));
    }
    if x_max > DEFAULT_CAP {
        return Err(Error::Capacity { what: "x_max", value: x_max, cap: DEFAULT_CAP });
    }
    let grid: Vec<u64> = match grid {
        Some(g) => {
            let mut g = g.to_vec();
            g.sort_unstable();
            g.dedup();
            if g.is_empty() || g[0] < q || *g.last().unwrap() > x_max {
                return Err(Error::arg("grid must be a nonempty subset of [Q, x_max]"));
            }
            g
        }
        None => log_grid(q, x_max, DEFAULT_GRID_POINTS),
    };
    let sums = partial_sums_at(f, &grid)?;
    let qf = q as f64;
    let bound = |x: f64| small_q_bound(x, qf, a);
    let mut rows = Vec::with_capacity(grid.len());
    let (mut max_ratio, mut argmax_x) = (f64::NEG_INFINITY, grid[0]);
    for (&x, s) in grid.iter().zip(&sums) {
        let b = bound(x as f64);
        let ratio = s.norm() / b;
        if ratio > max_ratio {
            max_ratio = ratio;
            argmax_x = x;
        }
        rows.push(CertifyRow { x, re: s.re, im: s.im, terms: x, bound: b, ratio });
    }
    // Between grid points |S| grows by at most the number of new terms; the
    // bound is unimodal in x with its minimum at x = e^A.
    let mut envelope = max_ratio;
    for i in 0..grid.len().saturating_sub(1) {
        let (x0, x1) = (grid[i] as f64, grid[i + 1] as f64);
        let mut bmin = bound(x0).min(bound(x1));
        let turn = a.exp();
        if turn > x0 && turn < x1 {
            bmin = bmin.min(bound(turn));
        }
        envelope = envelope.max((sums[i].norm() + (x1 - x0 - 1.0).max(0.0)) / bmin);
    }
    Ok(CertifyReport {
        q,
        a,
        grid,
        rows,
        max_ratio,
        argmax_x,
        envelope,
        resolution_bound: envelope - max_ratio,
    })
}

/// Reconstruction of `S_1(x; f)` from `S_0` by partial summation:
/// `S_1(x) = S_0(x) log x - int_1^x S_0(u) du / u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbelReconstruction {
    pub value: Complex64,
    /// Bound on the quadrature error, from `|S_0(u) - S_0(u_j)| <= u - u_j`.
    pub error_bound: f64,
}

/// Evaluates the partial-summation integral on a grid that is every integer
/// up to `dense` and then `points_per_octave` geometric points per doubling.
pub fn abel_s1_from_s0(f: &PrimeAssignment, x: u64, dense: u64, points_per_octave: usize) -> Result<AbelReconstruction> {
    if x < 1 || points_per_octave == 0 {
        return Err(Error::arg("need x >= 1 and a positive grid density"));
    }
    let mut grid: Vec<u64> = (1..=dense.min(x)).collect();
    let ratio = 2f64.powf(1.0 / points_per_octave as f64);
    let mut u = dense.max(1) as f64;
    while (u as u64) < x {
        u *= ratio;
        grid.push((u.round() as u64).min(x));
    }
    grid.push(x);
    grid.dedup();
    let s = partial_sums_at(f, &grid)?;
    let mut integral = ComplexSum::new();
    let mut err = 0.0;
    for j in 0..grid.len() - 1 {
        let (a, b) = (grid[j] as f64, grid[j + 1] as f64);
        let lr = (b / a).ln();
        integral.add(s[j] * lr);
        if grid[j + 1] - grid[j] > 1 {
            // S_0 is constant on [a, a+1); beyond that it drifts by <= u - (a+1).
            err += ((b - a - 1.0) - a * (b / (a + 1.0)).ln()).max(0.0);
        }
    }
    let last = *s.last().unwrap();
    Ok(AbelReconstruction { value: last * (x as f64).ln() - integral.value(), error_bound: err })
}
