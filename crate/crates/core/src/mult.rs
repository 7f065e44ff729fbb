//! Cardinal multiplicities `1, 2, ..., ω` with `n + ω = ω`.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

/// A positive finite count or countably infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Mult {
    Finite(u64),
    Omega,
}

impl Mult {
    pub const ONE: Mult = Mult::Finite(1);

    pub fn is_finite(self) -> bool {
        matches!(self, Mult::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Mult::Finite(n) => Some(n),
            Mult::Omega => None,
        }
    }
}

impl Add for Mult {
    type Output = Mult;

    fn add(self, rhs: Mult) -> Mult {
        match (self, rhs) {
            (Mult::Finite(a), Mult::Finite(b)) => Mult::Finite(a.saturating_add(b)),
            _ => Mult::Omega,
        }
    }
}

impl Mul for Mult {
    type Output = Mult;

    fn mul(self, rhs: Mult) -> Mult {
        match (self, rhs) {
            (Mult::Finite(a), Mult::Finite(b)) => Mult::Finite(a.saturating_mul(b)),
            _ => Mult::Omega,
        }
    }
}

impl fmt::Display for Mult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mult::Finite(n) => write!(f, "{n}"),
            Mult::Omega => f.write_str("w"),
        }
    }
}

/// A rank or cardinal that is either finite or infinite. Ranks of p-adic
/// modules are uncountable; they are reported as `Infinite` all the same.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rank {
    Finite(u64),
    Infinite,
}

impl Rank {
    pub fn is_finite(self) -> bool {
        matches!(self, Rank::Finite(_))
    }

    pub fn scaled(self, m: Mult) -> Rank {
        match (self, m) {
            (Rank::Finite(0), _) => Rank::Finite(0),
            (Rank::Finite(r), Mult::Finite(n)) => Rank::Finite(r.saturating_mul(n)),
            _ => Rank::Infinite,
        }
    }
}

impl Add for Rank {
    type Output = Rank;

    fn add(self, rhs: Rank) -> Rank {
        match (self, rhs) {
            (Rank::Finite(a), Rank::Finite(b)) => Rank::Finite(a.saturating_add(b)),
            _ => Rank::Infinite,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(n) => write!(f, "{n}"),
            Rank::Infinite => f.write_str("infinite"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_absorbs() {
        assert_eq!(Mult::Finite(2) + Mult::Omega, Mult::Omega);
        assert_eq!(Mult::Finite(2) + Mult::Finite(3), Mult::Finite(5));
        assert_eq!(Mult::Finite(3) * Mult::Omega, Mult::Omega);
        assert_eq!(Rank::Finite(0).scaled(Mult::Omega), Rank::Finite(0));
        assert_eq!(Rank::Finite(1).scaled(Mult::Omega), Rank::Infinite);
    }
}
