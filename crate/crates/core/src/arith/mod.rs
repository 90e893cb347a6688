//! Primes, smallest-prime-factor tables, and completely multiplicative
//! function evaluation.

pub mod assignment;
pub mod primes;
pub mod spf;
pub mod stream;

pub use assignment::{eval_cm, kronecker_prime, PrimeAssignment, PrimeRule, PrimeValues};
pub use primes::{isqrt, primes_in_range, primes_up_to};
pub use spf::{build_spf_table, factorize, Factorization, LeastPrime, SpfTable};
pub use stream::{CmStream, Segment};
