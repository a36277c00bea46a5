//! Elementary number theory: totients, unit residues, factor-shape
//! classification, and cyclotomic polynomials with exact integer
//! coefficients.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Euclidean gcd.
pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b > 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// Modular inverse of `a` mod `m` for gcd(a, m) = 1.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    if r != 1 {
        return None;
    }
    Some(t.rem_euclid(m as i128) as u64)
}

/// Prime factorization by trial division, `(prime, multiplicity)` pairs
/// in ascending prime order. Ample for the q < 10^6 this crate targets.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        factors.push((n, 1));
    }
    factors
}

/// Euler's totient function.
pub fn euler_phi(q: u64) -> u64 {
    assert!(q >= 1, "euler_phi: q must be positive");
    let mut phi = q;
    for (p, _) in factorize(q) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// The factor shape of a modulus, driving which comparison-polynomial
/// formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeClass {
    Prime(u64),
    PrimeSquare(u64),
    PrimeCube(u64),
    /// `Semiprime(q1, q2)` with `q1 < q2`, both prime.
    Semiprime(u64, u64),
    Unsupported,
}

/// A modulus together with its factor-shape classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QShape {
    pub q: u64,
    pub class: ShapeClass,
}

impl QShape {
    pub fn is_supported(&self) -> bool {
        self.class != ShapeClass::Unsupported
    }

    /// Short human-readable description, e.g. `"prime(67)"` or
    /// `"unsupported (12 = 2^2 . 3)"`.
    pub fn describe(&self) -> String {
        match self.class {
            ShapeClass::Prime(p) => format!("prime({p})"),
            ShapeClass::PrimeSquare(p) => format!("prime-square({p}^2)"),
            ShapeClass::PrimeCube(p) => format!("prime-cube({p}^3)"),
            ShapeClass::Semiprime(p, r) => format!("semiprime({p}.{r})"),
            ShapeClass::Unsupported => {
                let fact = factorize(self.q)
                    .iter()
                    .map(|&(p, e)| {
                        if e == 1 {
                            p.to_string()
                        } else {
                            format!("{p}^{e}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" . ");
                format!("unsupported ({} = {})", self.q, fact)
            }
        }
    }
}

/// Classify `q` into one of the supported shapes. Semiprimes with an even
/// factor are classified `Unsupported` here; see
/// [`classify_shape_allow_even`] for the explicit override.
pub fn classify_shape(q: u64) -> QShape {
    classify_shape_allow_even(q, false)
}

/// Classification with an opt-in for semiprimes `2 * p`. The corrected
/// comparison formulas are stated for odd primes, but the even-factor
/// case ran historically; callers must opt in deliberately.
pub fn classify_shape_allow_even(q: u64, allow_even_semiprime: bool) -> QShape {
    assert!(q >= 1, "classify_shape: q must be positive");
    if q <= 2 {
        return QShape {
            q,
            class: ShapeClass::Unsupported,
        };
    }
    let factors = factorize(q);
    let class = match factors.as_slice() {
        [(p, 1)] => ShapeClass::Prime(*p),
        [(p, 2)] => ShapeClass::PrimeSquare(*p),
        [(p, 3)] => ShapeClass::PrimeCube(*p),
        [(p1, 1), (p2, 1)] => {
            if *p1 == 2 && !allow_even_semiprime {
                ShapeClass::Unsupported
            } else {
                ShapeClass::Semiprime(*p1, *p2)
            }
        }
        _ => ShapeClass::Unsupported,
    };
    QShape { q, class }
}

/// The full set of unit residues of `q` in `(0, q)`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitSet {
    pub q: u64,
    pub residues: Vec<u64>,
}

impl UnitSet {
    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn contains(&self, t: u64) -> bool {
        self.residues.binary_search(&t).is_ok()
    }
}

/// All residues `t` with `0 < t < q` and `gcd(t, q) = 1`.
/// Rejects `q < 3`: no valid lens-space setup exists there.
pub fn unit_residues(q: u64) -> Result<UnitSet> {
    if q < 3 {
        return Err(Error::InvalidParameter(format!(
            "unit_residues requires q >= 3, got {q}"
        )));
    }
    let residues = (1..q).filter(|&t| gcd(t, q) == 1).collect();
    Ok(UnitSet { q, residues })
}

/// Dense integer polynomial, constant term first, trailing coefficient
/// nonzero unless zero (empty vector).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPoly {
    pub coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        let mut p = IntPoly {
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        };
        p.normalize();
        p
    }

    /// The polynomial `z^n - 1`.
    pub fn z_pow_minus_one(n: usize) -> Self {
        assert!(n >= 1);
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[0] = -BigInt::one();
        coeffs[n] = BigInt::one();
        IntPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of a nonzero polynomial.
    pub fn degree(&self) -> usize {
        assert!(!self.is_zero(), "degree of the zero polynomial");
        self.coeffs.len() - 1
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
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
        let mut p = IntPoly { coeffs };
        p.normalize();
        p
    }

    /// Exact division by a monic divisor. Returns `None` when the division
    /// leaves a remainder.
    pub fn exact_div(&self, divisor: &IntPoly) -> Option<IntPoly> {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        assert!(
            divisor.coeffs.last().unwrap().is_one(),
            "exact_div expects a monic divisor"
        );
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if self.degree() < divisor.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let qdeg = self.degree() - divisor.degree();
        let mut quot = vec![BigInt::zero(); qdeg + 1];
        for i in (0..=qdeg).rev() {
            let lead = std::mem::take(&mut rem[i + divisor.degree()]);
            if lead.is_zero() {
                continue;
            }
            for (j, d) in divisor.coeffs.iter().enumerate().take(divisor.degree()) {
                rem[i + j] -= &lead * d;
            }
            quot[i] = lead;
        }
        if rem.iter().take(divisor.degree()).any(|c| !c.is_zero()) {
            return None;
        }
        let mut q = IntPoly { coeffs: quot };
        q.normalize();
        Some(q)
    }

    /// Value at `z = 1`.
    pub fn eval_one(&self) -> BigInt {
        self.coeffs.iter().sum()
    }
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut divs = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            divs.push(i);
            if i != n / i {
                divs.push(n / i);
            }
        }
        i += 1;
    }
    divs.sort_unstable();
    divs
}

/// The monic cyclotomic polynomial of `d`, degree `phi(d)`.
///
/// Computed by exact division of `z^d - 1` by the product of the
/// proper-divisor cyclotomics, one code path for every d.
pub fn cyclotomic(d: u64) -> IntPoly {
    assert!(d >= 1, "cyclotomic: d must be positive");
    if d == 1 {
        return IntPoly::from_i64(&[-1, 1]);
    }
    // Build bottom-up over the divisors of d so each cyclotomic is
    // computed once.
    let divs = divisors(d);
    let mut table: Vec<(u64, IntPoly)> = Vec::with_capacity(divs.len());
    for &e in &divs {
        if e == 1 {
            table.push((1, IntPoly::from_i64(&[-1, 1])));
            continue;
        }
        let mut denom = IntPoly::one();
        for &(f, ref poly) in &table {
            if e % f == 0 {
                denom = denom.mul(poly);
            }
        }
        let psi = IntPoly::z_pow_minus_one(e as usize)
            .exact_div(&denom)
            .expect("cyclotomic division is exact");
        table.push((e, psi));
    }
    table.pop().expect("divisor table nonempty").1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_values() {
        assert_eq!(euler_phi(61), 60);
        assert_eq!(euler_phi(65), 48);
        assert_eq!(euler_phi(27), 18);
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(2), 1);
    }

    #[test]
    fn phi_even_for_q_ge_3() {
        for q in 3..500 {
            assert_eq!(euler_phi(q) % 2, 0, "phi({q}) must be even");
        }
    }

    #[test]
    fn shape_classification() {
        assert_eq!(classify_shape(67).class, ShapeClass::Prime(67));
        assert_eq!(classify_shape(49).class, ShapeClass::PrimeSquare(7));
        assert_eq!(classify_shape(343).class, ShapeClass::PrimeCube(7));
        assert_eq!(classify_shape(65).class, ShapeClass::Semiprime(5, 13));
        assert_eq!(classify_shape(12).class, ShapeClass::Unsupported);
        assert_eq!(classify_shape(1).class, ShapeClass::Unsupported);
        assert_eq!(classify_shape(2).class, ShapeClass::Unsupported);
    }

    #[test]
    fn even_semiprime_needs_override() {
        assert_eq!(classify_shape(62).class, ShapeClass::Unsupported);
        assert_eq!(
            classify_shape_allow_even(62, true).class,
            ShapeClass::Semiprime(2, 31)
        );
        // The override is specific to the even case.
        assert_eq!(
            classify_shape_allow_even(15, false).class,
            ShapeClass::Semiprime(3, 5)
        );
    }

    #[test]
    fn shape_reconstructs_q() {
        for q in 1..1000 {
            let shape = classify_shape_allow_even(q, true);
            let reconstructed = match shape.class {
                ShapeClass::Prime(p) => Some(p),
                ShapeClass::PrimeSquare(p) => Some(p * p),
                ShapeClass::PrimeCube(p) => Some(p * p * p),
                ShapeClass::Semiprime(p1, p2) => {
                    assert!(p1 < p2);
                    Some(p1 * p2)
                }
                ShapeClass::Unsupported => None,
            };
            if let Some(r) = reconstructed {
                assert_eq!(r, q);
            }
            assert_eq!(shape.q, q);
        }
    }

    #[test]
    fn unit_residue_sets() {
        assert_eq!(unit_residues(9).unwrap().residues, vec![1, 2, 4, 5, 7, 8]);
        assert_eq!(unit_residues(5).unwrap().residues, vec![1, 2, 3, 4]);
        // Direct gcd filter as the oracle for q = 62.
        let expected: Vec<u64> = (1..62).filter(|&t| gcd(t, 62) == 1).collect();
        assert_eq!(expected.len(), 30);
        assert_eq!(unit_residues(62).unwrap().residues, expected);
        assert!(unit_residues(2).is_err());
    }

    #[test]
    fn unit_residues_closed_under_negation() {
        for q in 3..200 {
            let units = unit_residues(q).unwrap();
            assert_eq!(units.len() as u64, euler_phi(q));
            for &t in &units.residues {
                assert!(units.contains(q - t), "q={q}, t={t}");
            }
        }
    }

    #[test]
    fn cyclotomic_values() {
        assert_eq!(cyclotomic(1), IntPoly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(2), IntPoly::from_i64(&[1, 1]));
        assert_eq!(cyclotomic(5), IntPoly::from_i64(&[1, 1, 1, 1, 1]));
        // Derived by dividing z^15 - 1 by psi_1 psi_3 psi_5.
        assert_eq!(
            cyclotomic(15),
            IntPoly::from_i64(&[1, -1, 0, 1, -1, 1, 0, -1, 1])
        );
    }

    #[test]
    fn cyclotomic_degree_is_phi() {
        for d in 1..120 {
            assert_eq!(cyclotomic(d).degree() as u64, euler_phi(d), "d={d}");
        }
    }

    #[test]
    fn cyclotomic_product_identity() {
        for q in [5u64, 9, 27, 49, 65, 67, 121] {
            let mut prod = IntPoly::one();
            for d in divisors(q) {
                prod = prod.mul(&cyclotomic(d));
            }
            assert_eq!(prod, IntPoly::z_pow_minus_one(q as usize), "q={q}");
        }
    }

    #[test]
    fn cyclotomic_prime_power_substitution() {
        // psi_{p^m}(z) = psi_p(z^{p^(m-1)}) for m = 2, 3.
        for (q, p, step) in [(25u64, 5u64, 5usize), (27, 3, 9), (49, 7, 7), (8, 2, 4)] {
            let base = cyclotomic(p);
            let mut expanded = vec![BigInt::zero(); base.degree() * step + 1];
            for (i, c) in base.coeffs.iter().enumerate() {
                expanded[i * step] = c.clone();
            }
            assert_eq!(cyclotomic(q), IntPoly { coeffs: expanded }, "q={q}");
        }
    }

    #[test]
    fn exact_div_detects_remainder() {
        let a = IntPoly::from_i64(&[1, 2, 1]);
        let b = IntPoly::from_i64(&[1, 1]);
        assert_eq!(a.exact_div(&b), Some(IntPoly::from_i64(&[1, 1])));
        let c = IntPoly::from_i64(&[2, 2, 1]);
        assert_eq!(c.exact_div(&b), None);
    }

    #[test]
    fn mod_inverse_roundtrip() {
        for q in [5u64, 7, 9, 62, 65, 67] {
            for t in unit_residues(q).unwrap().residues {
                let inv = mod_inverse(t, q).unwrap();
                assert_eq!((t as u128 * inv as u128 % q as u128) as u64, 1);
            }
        }
        assert_eq!(mod_inverse(6, 9), None);
    }
}
