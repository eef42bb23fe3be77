//! Arithmetic in the prime field F_p for word-sized primes.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimeError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is too large for word-sized modular arithmetic")]
    TooLarge(u64),
}

/// Deterministic trial-division primality; the primes used here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// A prime `p < 2^31`, so products of residues fit in a `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self, PrimeError> {
        if p >= 1 << 31 {
            return Err(PrimeError::TooLarge(p));
        }
        if !is_prime(p) {
            return Err(PrimeError::NotPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn add(self, a: u64, b: u64) -> u64 {
        (a + b) % self.0
    }

    #[inline]
    pub fn sub(self, a: u64, b: u64) -> u64 {
        (a + self.0 - b % self.0) % self.0
    }

    #[inline]
    pub fn mul(self, a: u64, b: u64) -> u64 {
        a * b % self.0
    }

    #[inline]
    pub fn neg(self, a: u64) -> u64 {
        (self.0 - a % self.0) % self.0
    }

    pub fn pow(self, base: u64, mut exp: u64) -> u64 {
        let mut result = 1 % self.0;
        let mut b = base % self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            exp >>= 1;
        }
        result
    }

    /// Inverse via Fermat; `None` for zero.
    pub fn inv(self, a: u64) -> Option<u64> {
        let a = a % self.0;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.0 - 2))
        }
    }

    /// `a^e` for a signed exponent; negative exponents need `a` invertible.
    pub fn pow_signed(self, a: u64, e: i64) -> Option<u64> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.inv(a).map(|i| self.pow(i, e.unsigned_abs()))
        }
    }

    pub fn reduce_int(self, n: &BigInt) -> u64 {
        let m = BigInt::from(self.0);
        n.mod_floor(&m).to_u64().expect("residue fits in u64")
    }

    pub fn reduce_i64(self, n: i64) -> u64 {
        n.rem_euclid(self.0 as i64) as u64
    }

    /// Reduce `r/s` to a residue; `None` when `p | s`.
    pub fn reduce(self, q: &BigRational) -> Option<u64> {
        let den = self.reduce_int(q.denom());
        let inv = self.inv(den)?;
        Some(self.mul(self.reduce_int(q.numer()), inv))
    }

    /// Symmetric lift into `(-p/2, p/2]`, handy for printing.
    pub fn lift_signed(self, a: u64) -> i64 {
        let a = (a % self.0) as i64;
        if a > (self.0 / 2) as i64 {
            a - self.0 as i64
        } else {
            a
        }
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Prime {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(self.0)
    }
}

/// Factorials `0!..(p-1)!` and their inverses mod p.
///
/// Multinomials `e!/(a_1!...a_k!)` with `e < p` never involve a factor of p,
/// so they are exact products of table entries.
#[derive(Debug, Clone)]
pub struct FactorialTable {
    prime: Prime,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl FactorialTable {
    pub fn new(prime: Prime) -> Self {
        let p = prime.get() as usize;
        let mut fact = vec![1u64; p];
        for i in 1..p {
            fact[i] = prime.mul(fact[i - 1], i as u64);
        }
        let mut inv_fact = vec![1u64; p];
        inv_fact[p - 1] = prime.inv(fact[p - 1]).expect("(p-1)! is a unit");
        for i in (1..p).rev() {
            inv_fact[i - 1] = prime.mul(inv_fact[i], i as u64);
        }
        FactorialTable {
            prime,
            fact,
            inv_fact,
        }
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn factorial(&self, n: usize) -> u64 {
        self.fact[n]
    }

    pub fn inv_factorial(&self, n: usize) -> u64 {
        self.inv_fact[n]
    }

    pub fn binomial(&self, n: usize, k: usize) -> u64 {
        if k > n {
            return 0;
        }
        let p = self.prime;
        p.mul(self.fact[n], p.mul(self.inv_fact[k], self.inv_fact[n - k]))
    }

    /// `(sum parts)! / prod(parts!)`; the sum must be below p.
    pub fn multinomial(&self, parts: &[u64]) -> u64 {
        let total: u64 = parts.iter().sum();
        let p = self.prime;
        debug_assert!(total < p.get());
        parts.iter().fold(self.fact[total as usize], |acc, &a| {
            p.mul(acc, self.inv_fact[a as usize])
        })
    }
}

/// Parse `r/s`, `-r/s` or an integer into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() {
        return None;
    }
    Some(BigRational::new(num, den))
}

/// `r/s` (or `r` when integral) with the sign on the numerator.
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        let (n, d) = if q.denom().is_negative() {
            (-q.numer(), -q.denom())
        } else {
            (q.numer().clone(), q.denom().clone())
        };
        format!("{n}/{d}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(is_prime(1_000_003));
        assert!(!is_prime(1_000_001));
        assert_eq!(Prime::new(9), Err(PrimeError::NotPrime(9)));
    }

    #[test]
    fn inverses_and_reduction() {
        let p = Prime::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(p.mul(a, p.inv(a).unwrap()), 1);
        }
        assert_eq!(p.inv(0), None);
        let q = parse_rational("3/4").unwrap();
        assert_eq!(p.reduce(&q), Some(6));
        assert_eq!(p.reduce(&parse_rational("-1/2").unwrap()), Some(3));
        assert_eq!(p.reduce(&parse_rational("1/14").unwrap()), None);
    }

    #[test]
    fn factorial_table() {
        let p = Prime::new(13).unwrap();
        let t = FactorialTable::new(p);
        // Wilson
        assert_eq!(t.factorial(12), 12);
        assert_eq!(t.binomial(12, 5), 792 % 13);
        assert_eq!(t.multinomial(&[1, 1, 1, 1]), 24 % 13);
        assert_eq!(t.multinomial(&[2, 3, 0]), 10);
    }

    #[test]
    fn rational_text() {
        assert_eq!(format_rational(&parse_rational("-6/4").unwrap()), "-3/2");
        assert_eq!(format_rational(&parse_rational("8").unwrap()), "8");
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }
}
