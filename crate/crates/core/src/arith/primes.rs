//! Plain prime generation: a segmented, odd-only sieve of Eratosthenes.

/// Integer square root (floor).
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

const SEGMENT: u64 = 1 << 18;

/// All primes `p <= n`, in increasing order.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    primes_in_range(2, n)
}

/// All primes in `[lo, hi]`, in increasing order.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime(lo, hi, |p| out.push(p));
    out
}

/// Calls `visit` on every prime in `[lo, hi]` in increasing order without
/// materializing the full list.
pub fn for_each_prime(lo: u64, hi: u64, mut visit: impl FnMut(u64)) {
    if hi < 2 || lo > hi {
        return;
    }
    let lo = lo.max(2);
    if lo <= 2 {
        visit(2);
    }
    let root = isqrt(hi);
    let base = small_odd_primes(root);
    // Odd numbers in [lo, hi]; index i <-> 2i + 1.
    let mut start = lo.max(3) | 1;
    let mut mark = vec![false; (SEGMENT / 2) as usize];
    while start <= hi {
        let end = (start + SEGMENT - 2).min(hi); // inclusive, odd range
        let count = ((end - start) / 2 + 1) as usize;
        let mark = &mut mark[..count];
        mark.fill(false);
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut m = (p * p).max(start.div_ceil(p) * p);
            if m % 2 == 0 {
                m += p;
            }
            while m <= end {
                mark[((m - start) / 2) as usize] = true;
                m += 2 * p;
            }
        }
        for (i, &composite) in mark.iter().enumerate() {
            if !composite {
                let n = start + 2 * i as u64;
                if n > 1 {
                    visit(n);
                }
            }
        }
        start = end + 2;
    }
}

/// Odd primes up to `n` by a simple dense sieve (used for base primes).
fn small_odd_primes(n: u64) -> Vec<u64> {
    if n < 3 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

/// Deterministic trial-division primality test; only used by oracles and
/// the fallback factorization path.
pub fn is_prime_trial(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest prime factor by trial division. `n >= 2`.
pub fn smallest_factor_trial(n: u64) -> u64 {
    debug_assert!(n >= 2);
    if n % 2 == 0 {
        return 2;
    }
    if n % 3 == 0 {
        return 3;
    }
    let mut d = 5;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        if n % (d + 2) == 0 {
            return d + 2;
        }
        d += 6;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_pi() {
        assert_eq!(primes_up_to(100).len(), 25);
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
        assert_eq!(primes_up_to(2).len(), 1);
        assert!(primes_up_to(1).is_empty());
    }

    #[test]
    fn range_matches_trial_division() {
        let lo = 999_000;
        let hi = 1_001_000;
        let fast = primes_in_range(lo, hi);
        let slow: Vec<u64> = (lo..=hi).filter(|&n| is_prime_trial(n)).collect();
        assert_eq!(fast, slow);
    }

    #[test]
    fn isqrt_edges() {
        for n in [0u64, 1, 2, 3, 4, 15, 16, 17, 1 << 40, (1 << 40) - 1, u32::MAX as u64] {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n, "n = {n}");
        }
    }
}
