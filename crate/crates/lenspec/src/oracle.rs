//! Independent floating-point and brute-force verification.
//!
//! Nothing here shares code with the exact path: characters come from
//! complex eigenvalue products, determinants from quadratic factors, and
//! the generating functions are evaluated numerically at fixed sample
//! points. Agreement with the exact comparison polynomials is a
//! redundancy check on both routes.

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::chartables::{count_matrices_for_shape, GeneratorChoice, SubsetSumTable};
use crate::error::{Error, Result};
use crate::numtheory::{classify_shape, cyclotomic, euler_phi, gcd, IntPoly, QShape, ShapeClass};
use crate::search::enumerate_choices;
use crate::spectra::{build_profile, profile_from_matrices, SpectralProfile};

use num_bigint::BigInt;

/// Fixed real sample points, away from the unit circle and from 1.
pub const SAMPLE_POINTS: [f64; 5] = [0.3, 0.5, 0.7, 1.3, 2.0];

/// Residuals below this certify agreement.
pub const MATCH_TOLERANCE: f64 = 1e-8;

/// Residuals above this certify disagreement; the band in between is
/// reported as inconclusive, never silently classified.
pub const MISMATCH_THRESHOLD: f64 = 1e-4;

/// Absolute tolerance for the root-of-unity and determinant identities.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

const POLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OracleVerdict {
    Match,
    Mismatch,
    Inconclusive,
}

/// Classify a residual against the match/mismatch band.
pub fn classify_residual(residual: f64) -> OracleVerdict {
    if residual < MATCH_TOLERANCE {
        OracleVerdict::Match
    } else if residual > MISMATCH_THRESHOLD {
        OracleVerdict::Mismatch
    } else {
        OracleVerdict::Inconclusive
    }
}

/// First failing case of a verification suite, serializable for reports.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub suite: String,
    pub q: u64,
    pub detail: String,
}

/// Rotation parameters of one generator block: `q` and one residue per
/// `±` pair. Eigenangles are `2 pi t r / q`.
#[derive(Debug, Clone)]
pub struct EigenData {
    pub q: u64,
    pub residues: Vec<u64>,
}

impl EigenData {
    pub fn new(q: u64, residues: Vec<u64>) -> Self {
        debug_assert!(residues.iter().all(|&r| gcd(r, q) == 1));
        EigenData { q, residues }
    }

    /// The 2n-dimensional block of a choice (built from `±R`).
    pub fn g_side(choice: &GeneratorChoice) -> Self {
        EigenData::new(choice.q, choice.r_half())
    }

    /// The 2k-dimensional block of a choice (built from `±S`).
    pub fn g_bar_side(choice: &GeneratorChoice) -> Self {
        EigenData::new(choice.q, choice.s_half())
    }
}

/// Exterior-power characters of the `t`-th power of the rotation block:
/// the coefficient vector of `prod_j (1 + x e^{i a_j})(1 + x e^{-i a_j})`
/// with `a_j = 2 pi t r_j / q`, indices `0..=2m`.
pub fn char_values(e: &EigenData, t: i64) -> Vec<Complex64> {
    let mut poly = vec![Complex64::one()];
    for &r in &e.residues {
        let angle = 2.0 * std::f64::consts::PI * (t as f64) * (r as f64) / (e.q as f64);
        for eig in [Complex64::from_polar(1.0, angle), Complex64::from_polar(1.0, -angle)] {
            let mut next = vec![Complex64::zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c * eig;
            }
            poly = next;
        }
    }
    poly
}

/// `det(z - g^t)` as the product of the quadratic factors
/// `z^2 - 2 cos(2 pi t r_j / q) z + 1`.
pub fn det_value(e: &EigenData, t: i64, z: Complex64) -> Complex64 {
    let mut acc = Complex64::one();
    for &r in &e.residues {
        let angle = 2.0 * std::f64::consts::PI * (t as f64) * (r as f64) / (e.q as f64);
        acc *= z * z - 2.0 * angle.cos() * z + 1.0;
    }
    acc
}

/// Reject evaluation points within `POLE_TOLERANCE` of a pole (the q-th
/// roots of unity, and 1 in particular).
fn check_pole_distance(q: u64, z: Complex64) -> Result<()> {
    if (z - Complex64::one()).norm() < POLE_TOLERANCE {
        return Err(Error::PoleProximity(format!("{z}")));
    }
    if (z.norm() - 1.0).abs() < POLE_TOLERANCE {
        let step = 2.0 * std::f64::consts::PI / q as f64;
        let nearest = (z.arg() / step).round() * step;
        if (z - Complex64::from_polar(1.0, nearest)).norm() < POLE_TOLERANCE {
            return Err(Error::PoleProximity(format!("{z}")));
        }
    }
    Ok(())
}

/// The per-degree sums `sum_t chi^a(g^t) / det(z - g^t)` for
/// `a = 0..=2n`, the building block of the generating function.
///
/// The `t = q` term is the identity contribution
/// `binom(2n, a) / (z - 1)^(2n)`; it is evaluated in closed form when
/// included (the trigonometric route loses it to rounding), and it is
/// excluded entirely for pair residuals, where it cancels exactly
/// between choices sharing `n`.
fn char_det_sums_impl(e: &EigenData, z: Complex64, include_identity: bool) -> Result<Vec<Complex64>> {
    check_pole_distance(e.q, z)?;
    let dim = 2 * e.residues.len();
    let mut sums = vec![Complex64::zero(); dim + 1];
    for t in 1..e.q as i64 {
        let det = det_value(e, t, z);
        let chars = char_values(e, t);
        for (a, c) in chars.iter().enumerate() {
            sums[a] += c / det;
        }
    }
    if include_identity {
        let det_identity = (z - Complex64::one()).powi(dim as i32);
        let mut binom = 1.0f64;
        for (a, slot) in sums.iter_mut().enumerate() {
            if a > 0 {
                binom = binom * (dim - a + 1) as f64 / a as f64;
            }
            *slot += binom / det_identity;
        }
    }
    Ok(sums)
}

/// Full-group sums `sum_{t=1}^{q} chi^a(g^t) / det(z - g^t)`.
pub fn char_det_sums(e: &EigenData, z: Complex64) -> Result<Vec<Complex64>> {
    char_det_sums_impl(e, z, true)
}

/// Numeric value of the degree-`p` generating function of a choice:
///
/// ```text
/// F^p(z) = q^{-1} sum_{b=0}^{p} (-1)^b (z^{-b} - z^{b+2})
///            sum_{t=1}^{q} chi^{p-b}(g^t) / det(z - g^t)
///          + (-1)^{p+1} z^{-p}
/// ```
pub fn eval_f(choice: &GeneratorChoice, p: usize, z: Complex64) -> Result<Complex64> {
    let sums = char_det_sums(&EigenData::g_side(choice), z)?;
    Ok(eval_f_from_sums(choice.q, &sums, p, z))
}

/// Combine precomputed character/determinant sums into `F^p(z)`.
/// Characters outside `0..=2n` vanish (exterior algebra dimensions).
pub fn eval_f_from_sums(q: u64, sums: &[Complex64], p: usize, z: Complex64) -> Complex64 {
    let mut acc = Complex64::zero();
    for b in 0..=p {
        let w = sums.get(p - b).copied().unwrap_or_else(Complex64::zero);
        let factor = z.powi(-(b as i32)) - z.powi(b as i32 + 2);
        let term = factor * w;
        acc += if b % 2 == 0 { term } else { -term };
    }
    let tail = z.powi(-(p as i32));
    acc / (q as f64) + if p % 2 == 0 { -tail } else { tail }
}

/// Exhaustive subset enumeration with the same contract as the dynamic
/// program it cross-checks. Capped at 20 source elements.
pub fn brute_subset_table(residues: &[u64], modulus: u64) -> Result<SubsetSumTable> {
    const CAP: usize = 20;
    if residues.len() > CAP {
        return Err(Error::BruteForceCap(residues.len(), CAP));
    }
    let m = modulus as usize;
    let mut counts = vec![vec![BigInt::zero(); m]; residues.len() + 1];
    for mask in 0u32..(1 << residues.len()) {
        let card = mask.count_ones() as usize;
        let mut sum = 0u64;
        for (i, &r) in residues.iter().enumerate() {
            if mask >> i & 1 == 1 {
                sum += r;
            }
        }
        counts[card][(sum % modulus) as usize] += 1;
    }
    Ok(SubsetSumTable {
        source_size: residues.len(),
        modulus,
        counts,
    })
}

fn eval_intpoly(p: &IntPoly, z: Complex64) -> Complex64 {
    let mut acc = Complex64::zero();
    for c in p.coeffs.iter().rev() {
        // coefficients stay small here (cyclotomics)
        let cf = c.to_string().parse::<f64>().expect("coefficient fits f64");
        acc = acc * z + cf;
    }
    acc
}

fn sum_of_powers(q: u64, ell: u64) -> Complex64 {
    let mut acc = Complex64::zero();
    for t in 1..=q {
        let angle = 2.0 * std::f64::consts::PI * (t as f64) * (ell as f64) / (q as f64);
        acc += Complex64::from_polar(1.0, angle);
    }
    acc
}

/// Verify the root-of-unity case tables: for every residue class of the
/// exponent, the full sum over the group is `q` when the modulus divides
/// it and `0` otherwise, with each gcd class of the shape exercised.
pub fn root_of_unity_suite(q: u64) -> std::result::Result<(), Counterexample> {
    let shape = classify_shape(q);
    let mut seen_classes = std::collections::BTreeSet::new();
    for ell in 0..3 * q {
        let expected = if ell % q == 0 { q as f64 } else { 0.0 };
        let observed = sum_of_powers(q, ell);
        let residual = (observed - Complex64::new(expected, 0.0)).norm();
        if residual > IDENTITY_TOLERANCE {
            return Err(Counterexample {
                suite: "root-of-unity".into(),
                q,
                detail: format!("ell = {ell}: |sum - {expected}| = {residual:.3e}"),
            });
        }
        seen_classes.insert(gcd(ell % q, q));
    }
    let expected_classes: std::collections::BTreeSet<u64> = match shape.class {
        ShapeClass::Prime(p) => [1, p].into(),
        ShapeClass::Semiprime(p1, p2) => [1, p1, p2, q].into(),
        ShapeClass::PrimeSquare(p) => [1, p, q].into(),
        ShapeClass::PrimeCube(p) => [1, p, p * p, q].into(),
        ShapeClass::Unsupported => seen_classes.clone(),
    };
    if seen_classes != expected_classes {
        return Err(Counterexample {
            suite: "root-of-unity".into(),
            q,
            detail: format!("gcd classes exercised {seen_classes:?} != expected {expected_classes:?}"),
        });
    }
    Ok(())
}

/// Predicted value of `det(z - g^t) det(z - gbar^t)` per the shape's
/// case split.
fn predicted_det_product(shape: &QShape, t: u64, z: Complex64) -> Complex64 {
    let q = shape.q;
    let d = gcd(t, q);
    if d == 1 {
        return eval_intpoly(&cyclotomic(q), z);
    }
    match shape.class {
        ShapeClass::Semiprime(q1, q2) => {
            // t shares exactly one prime factor with q
            let (base, exp) = if d == q1 { (q2, q1 - 1) } else { (q1, q2 - 1) };
            eval_intpoly(&cyclotomic(base), z).powi(exp as i32)
        }
        ShapeClass::PrimeSquare(q1) | ShapeClass::PrimeCube(q1) => {
            let mut m_prime = 0u32;
            let mut dd = d;
            while dd % q1 == 0 {
                dd /= q1;
                m_prime += 1;
            }
            let base = q / q1.pow(m_prime);
            eval_intpoly(&cyclotomic(base), z).powi(q1.pow(m_prime) as i32)
        }
        _ => eval_intpoly(&cyclotomic(q), z),
    }
}

/// Verify the determinant-product identity for every `t != q` at the
/// sample points, relative tolerance 1e-9.
pub fn det_product_suite(q: u64) -> std::result::Result<(), Counterexample> {
    let shape = classify_shape(q);
    let fail = |detail: String| Counterexample {
        suite: "det-product".into(),
        q,
        detail,
    };
    let mut choices = enumerate_choices(q, 1).map_err(|e| fail(e.to_string()))?;
    if let Ok(mut more) = enumerate_choices(q, 2) {
        choices.append(&mut more);
    }
    for choice in &choices {
        let g = EigenData::g_side(choice);
        let gbar = EigenData::g_bar_side(choice);
        for t in 1..q {
            for x in SAMPLE_POINTS {
                let z = Complex64::new(x, 0.0);
                let observed = det_value(&g, t as i64, z) * det_value(&gbar, t as i64, z);
                let predicted = predicted_det_product(&shape, t, z);
                let rel = (observed - predicted).norm() / predicted.norm().max(1.0);
                if rel > IDENTITY_TOLERANCE {
                    return Err(fail(format!(
                        "k = {}, S = {:?}, t = {t}, z = {x}: relative error {rel:.3e}",
                        choice.k, choice.s_plus_minus
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Numeric residual between the generating functions of two profiles at
/// one degree: the maximum of `|F_a^p(z) - F_b^p(z)|` over the sample
/// points, from precomputed per-choice sums.
fn residual_from_sums(q: u64, a: &[Vec<Complex64>], b: &[Vec<Complex64>], p: usize) -> f64 {
    SAMPLE_POINTS
        .iter()
        .enumerate()
        .map(|(zi, &x)| {
            let z = Complex64::new(x, 0.0);
            let fa = eval_f_from_sums(q, &a[zi], p, z);
            let fb = eval_f_from_sums(q, &b[zi], p, z);
            (fa - fb).norm()
        })
        .fold(0.0, f64::max)
}

/// Per-degree oracle residuals for one pair of choices.
pub fn pair_residuals(a: &GeneratorChoice, b: &GeneratorChoice) -> Result<Vec<f64>> {
    assert_eq!(a.q, b.q);
    assert_eq!(a.k, b.k);
    let sums_a = sample_sums(a)?;
    let sums_b = sample_sums(b)?;
    Ok((0..=a.n())
        .map(|p| residual_from_sums(a.q, &sums_a, &sums_b, p))
        .collect())
}

/// Per-sample sums with the identity term dropped: it is independent of
/// the choice (only `n` and `z` enter), so differences of generating
/// functions are unchanged, while the huge identity magnitudes would
/// otherwise drown the residual in rounding noise.
fn sample_sums(choice: &GeneratorChoice) -> Result<Vec<Vec<Complex64>>> {
    let g = EigenData::g_side(choice);
    SAMPLE_POINTS
        .iter()
        .map(|&x| char_det_sums_impl(&g, Complex64::new(x, 0.0), false))
        .collect()
}

/// Full consistency sweep at one modulus: for every feasible `k`, every
/// class pair and every degree, exact equality of the comparison
/// polynomials must coincide with a sub-tolerance oracle residual, with
/// nothing in the inconclusive band.
///
/// `inject_fault` perturbs one pair-count entry of the first class and
/// checks the perturbed rebuild against the honest one; the suite must
/// then report an inconsistency (harness sanity check).
pub fn consistency_suite(q: u64, inject_fault: bool) -> std::result::Result<(), Counterexample> {
    let shape = classify_shape(q);
    let fail = |detail: String| Counterexample {
        suite: "h-f-consistency".into(),
        q,
        detail,
    };
    let phi = euler_phi(q) as usize;
    let mut injected = inject_fault;
    for k in 1..phi / 2 {
        let classes = enumerate_choices(q, k).map_err(|e| fail(e.to_string()))?;
        let mut profiles: Vec<SpectralProfile> = Vec::with_capacity(classes.len());
        for c in &classes {
            profiles.push(build_profile(c, &shape).map_err(|e| fail(e.to_string()))?);
        }
        let sums: Vec<Vec<Vec<Complex64>>> = classes
            .iter()
            .map(|c| sample_sums(c).map_err(|e| fail(e.to_string())))
            .collect::<std::result::Result<_, _>>()?;

        let mut jobs: Vec<(usize, usize)> = Vec::new();
        for i in 0..classes.len() {
            for j in i + 1..classes.len() {
                jobs.push((i, j));
            }
        }
        let mut perturbed: Option<SpectralProfile> = None;
        if injected && !classes.is_empty() {
            let mut matrices =
                count_matrices_for_shape(&classes[0], &shape).map_err(|e| fail(e.to_string()))?;
            matrices[0].entries[0][0] += 1;
            perturbed = Some(
                profile_from_matrices(&classes[0], &shape, &matrices)
                    .map_err(|e| fail(e.to_string()))?,
            );
            injected = false;
        }

        for (i, j) in jobs {
            for p in 0..=classes[i].n() {
                let h_equal = profiles[i].polys[p] == profiles[j].polys[p];
                let residual = residual_from_sums(q, &sums[i], &sums[j], p);
                check_consistent(q, k, p, h_equal, residual, &classes[i], &classes[j])?;
            }
        }
        if let Some(bad) = perturbed {
            // perturbed H against the honest oracle of the same choice
            for p in 0..=classes[0].n() {
                let h_equal = bad.polys[p] == profiles[0].polys[p];
                let residual = residual_from_sums(q, &sums[0], &sums[0], p);
                check_consistent(q, k, p, h_equal, residual, &classes[0], &classes[0])?;
            }
        }
    }
    Ok(())
}

fn check_consistent(
    q: u64,
    k: usize,
    p: usize,
    h_equal: bool,
    residual: f64,
    a: &GeneratorChoice,
    b: &GeneratorChoice,
) -> std::result::Result<(), Counterexample> {
    let verdict = classify_residual(residual);
    let consistent = matches!(
        (h_equal, verdict),
        (true, OracleVerdict::Match) | (false, OracleVerdict::Mismatch)
    );
    if consistent {
        return Ok(());
    }
    Err(Counterexample {
        suite: "h-f-consistency".into(),
        q,
        detail: format!(
            "k = {k}, p = {p}, S_a = {:?}, S_b = {:?}: exact equality {h_equal}, residual {residual:.3e} ({verdict:?})",
            a.s_plus_minus, b.s_plus_minus
        ),
    })
}
