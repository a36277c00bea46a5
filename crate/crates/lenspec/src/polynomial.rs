//! Exact dense Laurent-polynomial arithmetic with arbitrary-precision
//! integer coefficients.
//!
//! The comparison polynomials live on a short exponent window around the
//! origin, so a dense vector plus a (possibly negative) minimum exponent
//! is the whole representation. Everything is schoolbook; degrees stay
//! in the low hundreds.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numtheory::IntPoly;

/// Dense Laurent polynomial. Slot `i` of `coeffs` holds the coefficient
/// of `z^(min_exp + i)`. Canonical zero is the empty vector with
/// `min_exp = 0`; otherwise the first and last stored coefficients are
/// nonzero. Equality is structural on this normalized form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    min_exp: i64,
    coeffs: Vec<BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly {
            min_exp: 0,
            coeffs: Vec::new(),
        }
    }

    pub fn one() -> Self {
        LaurentPoly {
            min_exp: 0,
            coeffs: vec![BigInt::one()],
        }
    }

    /// `c * z^e`.
    pub fn monomial(c: BigInt, e: i64) -> Self {
        let mut p = LaurentPoly {
            min_exp: e,
            coeffs: vec![c],
        };
        p.normalize();
        p
    }

    /// Build from a coefficient window starting at `min_exp`; trims and
    /// normalizes.
    pub fn from_coeffs(min_exp: i64, coeffs: Vec<BigInt>) -> Self {
        let mut p = LaurentPoly { min_exp, coeffs };
        p.normalize();
        p
    }

    pub fn from_i64_coeffs(min_exp: i64, coeffs: &[i64]) -> Self {
        Self::from_coeffs(min_exp, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest exponent with nonzero coefficient (0 for the zero polynomial).
    pub fn min_exp(&self) -> i64 {
        self.min_exp
    }

    /// Highest exponent with nonzero coefficient (0 for the zero polynomial).
    pub fn max_exp(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.min_exp + self.coeffs.len() as i64 - 1
        }
    }

    pub fn coefficient(&self, e: i64) -> BigInt {
        if self.is_zero() || e < self.min_exp || e > self.max_exp() {
            return BigInt::zero();
        }
        self.coeffs[(e - self.min_exp) as usize].clone()
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
        let leading_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if leading_zeros > 0 {
            self.coeffs.drain(..leading_zeros);
            self.min_exp += leading_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.min_exp = 0;
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let min = self.min_exp.min(other.min_exp);
        let max = self.max_exp().max(other.max_exp());
        let mut coeffs = vec![BigInt::zero(); (max - min + 1) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.min_exp - min) as usize + i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[(other.min_exp - min) as usize + i] += c;
        }
        LaurentPoly::from_coeffs(min, coeffs)
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.scale(&BigInt::from(-1)))
    }

    pub fn scale(&self, c: &BigInt) -> LaurentPoly {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            min_exp: self.min_exp,
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        if self.is_zero() || other.is_zero() {
            return LaurentPoly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LaurentPoly::from_coeffs(self.min_exp + other.min_exp, coeffs)
    }

    /// `e`-fold product; `pow(a, 0) = 1`.
    pub fn pow(&self, e: u32) -> LaurentPoly {
        let mut acc = LaurentPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The substitution `z -> z^m`: the coefficient of `z^j` moves to
    /// `z^(j*m)`. Only defined for polynomials with `min_exp >= 0`.
    ///
    /// # Panics
    ///
    /// Panics on negative-exponent inputs.
    pub fn substitute_power(&self, m: u32) -> LaurentPoly {
        assert!(m >= 1, "substitute_power: m must be positive");
        assert!(
            self.min_exp >= 0,
            "substitute_power is only defined for ordinary polynomials"
        );
        if self.is_zero() || m == 1 {
            return self.clone();
        }
        let m = m as usize;
        let mut coeffs = vec![BigInt::zero(); (self.coeffs.len() - 1) * m + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * m] = c.clone();
        }
        LaurentPoly::from_coeffs(self.min_exp * m as i64, coeffs)
    }

    /// Value at `z = 1`.
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }

    /// Deterministic, platform-independent 64-bit content hash (FNV-1a
    /// over the normalized representation). Equal polynomials hash equal;
    /// unequal hashes certify inequality.
    pub fn content_hash(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write(&self.min_exp.to_le_bytes());
        h.write(&(self.coeffs.len() as u64).to_le_bytes());
        for c in &self.coeffs {
            let bytes = c.to_signed_bytes_le();
            h.write(&(bytes.len() as u32).to_le_bytes());
            h.write(&bytes);
        }
        h.finish()
    }
}

impl From<&IntPoly> for LaurentPoly {
    fn from(p: &IntPoly) -> Self {
        LaurentPoly::from_coeffs(0, p.coeffs.clone())
    }
}

impl std::fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = self.min_exp + i as i64;
            if first {
                write!(f, "{c}")?;
                first = false;
            } else if c.sign() == num_bigint::Sign::Minus {
                write!(f, " - {}", -c)?;
            } else {
                write!(f, " + {c}")?;
            }
            if e != 0 {
                write!(f, "*z^{e}")?;
            }
        }
        Ok(())
    }
}

/// Minimal FNV-1a, kept local so hashes are stable across platforms and
/// toolchain versions (the checkpoint format depends on that).
pub struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

impl Default for Fnv1a {
    fn default() -> Self {
        Self::new()
    }
}
