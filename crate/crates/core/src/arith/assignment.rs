//! Prime-value rules generating completely multiplicative functions.

use num_complex::Complex64;

use super::spf::SpfTable;
use crate::error::Result;

/// Slack allowed on `|f(p)| <= 1` for rounding in transcendental rules.
pub const UNIT_DISC_SLACK: f64 = 1e-12;

/// How `f(p)` is computed from a prime `p`.
#[derive(Debug, Clone, PartialEq)]
pub enum PrimeRule {
    /// `f(p) = v` for every prime.
    Constant(Complex64),
    /// `f(p) = p^{it}`.
    Archimedean { t: f64 },
    /// `f(p) = (d/p)`, the Kronecker symbol.
    Kronecker { d: i64 },
    /// `f(p) = 1` for `y < p <= 2y`, else 0.
    Interval { y: f64 },
    /// `f(p) = base(p) p^{-it}`.
    Twisted { base: Box<PrimeRule>, t: f64 },
    /// Pointwise product of prime values.
    Product(Box<PrimeRule>, Box<PrimeRule>),
}

impl PrimeRule {
    pub fn eval(&self, p: u64) -> Complex64 {
        match self {
            PrimeRule::Constant(v) => *v,
            PrimeRule::Archimedean { t } => Complex64::from_polar(1.0, t * (p as f64).ln()),
            PrimeRule::Kronecker { d } => Complex64::new(kronecker_prime(*d, p) as f64, 0.0),
            PrimeRule::Interval { y } => {
                let pf = p as f64;
                Complex64::new(if pf > *y && pf <= 2.0 * y { 1.0 } else { 0.0 }, 0.0)
            }
            PrimeRule::Twisted { base, t } => {
                let b = base.eval(p);
                if *t == 0.0 {
                    b
                } else {
                    b * Complex64::from_polar(1.0, -t * (p as f64).ln())
                }
            }
            PrimeRule::Product(a, b) => a.eval(p) * b.eval(p),
        }
    }

    /// True if every prime value is real.
    pub fn is_real(&self) -> bool {
        match self {
            PrimeRule::Constant(v) => v.im == 0.0,
            PrimeRule::Archimedean { t } => *t == 0.0,
            PrimeRule::Kronecker { .. } | PrimeRule::Interval { .. } => true,
            PrimeRule::Twisted { base, t } => *t == 0.0 && base.is_real(),
            PrimeRule::Product(a, b) => a.is_real() && b.is_real(),
        }
    }

    /// Composes a twist by `p^{-it}`, merging nested twists additively.
    pub fn twisted(self, t: f64) -> PrimeRule {
        match self {
            PrimeRule::Twisted { base, t: t0 } => PrimeRule::Twisted { base, t: t0 + t },
            other => PrimeRule::Twisted { base: Box::new(other), t },
        }
    }

    /// For Kronecker-type rules, a modulus `q` such that the completely
    /// multiplicative extension is periodic mod `q` and sums to zero over
    /// a period. Used to certify exact tails of continued series.
    pub fn character_period(&self) -> Option<u64> {
        match self {
            PrimeRule::Kronecker { d } if *d != 0 && !is_square(*d) => {
                let a = d.unsigned_abs();
                // (d/.) has period |d| for d = 1 mod 4, else 4|d|.
                Some(if d.rem_euclid(4) == 1 { a } else { 4 * a })
            }
            _ => None,
        }
    }
}

fn is_square(d: i64) -> bool {
    if d < 0 {
        return false;
    }
    let r = (d as f64).sqrt().round() as i64;
    r * r == d
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol `(d/p)` at a prime `p`.
pub fn kronecker_prime(d: i64, p: u64) -> i8 {
    if p == 2 {
        if d % 2 == 0 {
            0
        } else {
            match d.rem_euclid(8) {
                1 | 7 => 1,
                _ => -1,
            }
        }
    } else {
        jacobi(d, p)
    }
}

/// A named prime rule: the generator of a completely multiplicative `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeAssignment {
    pub label: String,
    pub rule: PrimeRule,
}

impl PrimeAssignment {
    pub fn new(label: impl Into<String>, rule: PrimeRule) -> Self {
        Self { label: label.into(), rule }
    }

    #[inline]
    pub fn eval_at_prime(&self, p: u64) -> Complex64 {
        self.rule.eval(p)
    }

    pub fn is_real(&self) -> bool {
        self.rule.is_real()
    }

    /// Prime values for `primes`, aligned by index.
    pub fn cache_for(&self, primes: &[u64]) -> PrimeValues {
        PrimeValues { values: primes.iter().map(|&p| self.eval_at_prime(p)).collect() }
    }
}

/// Memoized `f(p)` for a fixed list of primes, indexed by prime index.
/// Built once and then read-only, so it can be shared across workers.
#[derive(Debug, Clone, Default)]
pub struct PrimeValues {
    values: Vec<Complex64>,
}

impl PrimeValues {
    #[inline]
    pub fn get(&self, index: usize) -> Complex64 {
        self.values[index]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.values
    }
}

/// `f(p)^a` by repeated multiplication.
#[inline]
pub fn pow_by_mult(z: Complex64, a: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..a {
        acc *= z;
    }
    acc
}

/// `f(n) = prod f(p)^a` over the factorization of `n`.
pub fn eval_cm(f: &PrimeAssignment, n: u64, table: &SpfTable) -> Result<Complex64> {
    let fac = table.factorize(n)?;
    Ok(fac.pairs.iter().fold(Complex64::new(1.0, 0.0), |acc, &(p, a)| acc * pow_by_mult(f.eval_at_prime(p), a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::spf::build_spf_table;

    fn legendre_oracle(a: i64, p: u64) -> i8 {
        let r = a.rem_euclid(p as i64) as u64;
        if r == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == r) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn jacobi_matches_residue_oracle() {
        for p in [3u64, 5, 7, 11, 13, 101, 997] {
            for a in -40i64..40 {
                assert_eq!(jacobi(a, p), legendre_oracle(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn kronecker_at_two() {
        assert_eq!(kronecker_prime(5, 2), -1);
        assert_eq!(kronecker_prime(-3, 2), -1);
        assert_eq!(kronecker_prime(-7, 2), 1);
        assert_eq!(kronecker_prime(8, 2), 0);
        assert_eq!(kronecker_prime(17, 2), 1);
    }

    #[test]
    fn eval_examples() {
        let t = build_spf_table(1, 100).unwrap();
        let lam = PrimeAssignment::new("liouville", PrimeRule::Constant(Complex64::new(-1.0, 0.0)));
        assert_eq!(eval_cm(&lam, 12, &t).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(eval_cm(&lam, 1, &t).unwrap(), Complex64::new(1.0, 0.0));
        let tw = PrimeAssignment::new("arch", PrimeRule::Archimedean { t: 1.0 });
        let z = eval_cm(&tw, 2, &t).unwrap();
        let l2 = 2f64.ln();
        assert!((z - Complex64::new(l2.cos(), l2.sin())).norm() < 1e-15);
    }

    #[test]
    fn periods() {
        assert_eq!(PrimeRule::Kronecker { d: 5 }.character_period(), Some(5));
        assert_eq!(PrimeRule::Kronecker { d: -3 }.character_period(), Some(3));
        assert_eq!(PrimeRule::Kronecker { d: 8 }.character_period(), Some(32));
        assert_eq!(PrimeRule::Kronecker { d: 9 }.character_period(), None);
    }
}
