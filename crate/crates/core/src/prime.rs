//! Arbitrary-precision primes.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_prime::nt_funcs::is_prime;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimeError {
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("cannot read {0:?} as a natural number")]
    Malformed(String),
}

/// A rational prime, checked at construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Prime(BigUint);

impl Prime {
    pub fn new(value: BigUint) -> Result<Self, PrimeError> {
        // `Probable` only shows up far beyond the deterministic range of the test.
        if is_prime(&value, None).probably() {
            Ok(Prime(value))
        } else {
            Err(PrimeError::NotPrime(value))
        }
    }

    pub fn from_u64(value: u64) -> Result<Self, PrimeError> {
        Self::new(BigUint::from(value))
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    /// The prime as a machine word, if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    /// The first `count` primes in ascending order.
    pub fn first(count: usize) -> Vec<Prime> {
        num_prime::nt_funcs::nprimes(count)
            .into_iter()
            .map(|p| Prime(BigUint::from(p)))
            .collect()
    }

    /// The `i`-th prime, counting from zero (`nth(0) == 2`).
    pub fn nth(i: usize) -> Prime {
        Prime(BigUint::from(num_prime::nt_funcs::nth_prime(i as u64 + 1)))
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Prime {
    type Err = PrimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let value =
            BigUint::from_str(s.trim()).map_err(|_| PrimeError::Malformed(s.to_string()))?;
        Prime::new(value)
    }
}

impl TryFrom<String> for Prime {
    type Error = PrimeError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Prime> for String {
    fn from(p: Prime) -> String {
        p.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composites_and_units() {
        assert!(Prime::from_u64(0).is_err());
        assert!(Prime::from_u64(1).is_err());
        assert!(Prime::from_u64(91).is_err());
        assert!(Prime::from_u64(97).is_ok());
    }

    #[test]
    fn large_primes_are_accepted() {
        // 2^127 - 1
        let m127 = (BigUint::from(1u8) << 127usize) - BigUint::from(1u8);
        assert!(Prime::new(m127.clone()).is_ok());
        assert!(Prime::new(m127 + BigUint::from(2u8)).is_err());
    }

    #[test]
    fn enumeration_starts_at_two() {
        let ps: Vec<u64> = Prime::first(5).iter().map(|p| p.to_u64().unwrap()).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11]);
        assert_eq!(Prime::nth(0).to_u64(), Some(2));
        assert_eq!(Prime::nth(4).to_u64(), Some(11));
    }
}
