//! Comparison polynomials: builds the exact Laurent polynomials whose
//! degree-by-degree equality certifies equality of closed/coclosed
//! p-form spectra, and compares them pairwise.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::chartables::{count_matrices_for_shape, GeneratorChoice, PairCountMatrix};
use crate::error::{Error, Result};
use crate::numtheory::{cyclotomic, QShape, ShapeClass};
use crate::polynomial::LaurentPoly;

/// The family of comparison polynomials of one generator choice, indexed
/// by form degree `p = 0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralProfile {
    pub choice: GeneratorChoice,
    pub polys: Vec<LaurentPoly>,
}

impl SpectralProfile {
    pub fn degree_count(&self) -> usize {
        self.polys.len()
    }

    /// Per-degree content hashes; unequal hashes certify unequal
    /// polynomials.
    pub fn hashes(&self) -> Vec<u64> {
        self.polys.iter().map(|p| p.content_hash()).collect()
    }
}

/// The two double sums over a pair-count matrix that form the core of
/// every comparison polynomial:
///
/// ```text
///   sum_{c=-p}^{2k} (-1)^c z^c sum_{a=max(0,c)}^{min(2k,c+p)} M[a][p-a+c]
/// + sum_{c=2}^{2k+p+2} (-1)^{c+1} z^c sum_{a=max(0,c-2-p)}^{min(2k,c-2)} M[a][p+2+a-c]
/// ```
///
/// # Panics
///
/// Panics when a column index falls outside the matrix; for `p <= n`
/// the stated ranges always stay inside, so that signals an internal
/// inconsistency.
pub fn bracket_poly(m: &PairCountMatrix, p: usize, k: usize) -> LaurentPoly {
    assert_eq!(m.rows(), 2 * k + 1, "matrix rows must be 2k + 1");
    let two_n = m.cols() - 1;
    assert!(2 * p <= two_n, "degree {p} exceeds n");
    let p_i = p as i64;
    let two_k = 2 * k as i64;
    let min_exp = -p_i;
    let max_exp = two_k + p_i + 2;
    let mut coeffs = vec![BigInt::zero(); (max_exp - min_exp + 1) as usize];

    let mut term = |c: i64, value: BigInt| {
        coeffs[(c - min_exp) as usize] += value;
    };

    for c in -p_i..=two_k {
        let sign_neg = c.rem_euclid(2) == 1;
        let lo = c.max(0) as usize;
        let hi = (c + p_i).min(two_k) as usize;
        let mut acc = BigInt::zero();
        for a in lo..=hi {
            let beta = p_i - a as i64 + c;
            assert!(
                (0..=two_n as i64).contains(&beta),
                "column index {beta} out of range"
            );
            acc += &m.entries[a][beta as usize];
        }
        term(c, if sign_neg { -acc } else { acc });
    }

    for c in 2..=two_k + p_i + 2 {
        let sign_neg = c.rem_euclid(2) == 0;
        let lo = (c - 2 - p_i).max(0) as usize;
        let hi = (c - 2).min(two_k) as usize;
        if lo > hi {
            continue;
        }
        let mut acc = BigInt::zero();
        for a in lo..=hi {
            let beta = p_i + 2 + a as i64 - c;
            assert!(
                (0..=two_n as i64).contains(&beta),
                "column index {beta} out of range"
            );
            acc += &m.entries[a][beta as usize];
        }
        term(c, if sign_neg { -acc } else { acc });
    }

    LaurentPoly::from_coeffs(min_exp, coeffs)
}

/// Cyclotomic multiplier attached to each divisor level, ordered like the
/// level list (highest level first).
pub fn shape_multipliers(shape: &QShape) -> Result<Vec<LaurentPoly>> {
    match shape.class {
        ShapeClass::Prime(_) => Ok(vec![LaurentPoly::one()]),
        ShapeClass::Semiprime(q1, q2) => {
            let psi_q = LaurentPoly::from(&cyclotomic(shape.q));
            let psi1_pow = LaurentPoly::from(&cyclotomic(q1)).pow((q2 - 1) as u32);
            let psi2_pow = LaurentPoly::from(&cyclotomic(q2)).pow((q1 - 1) as u32);
            Ok(vec![
                psi1_pow.mul(&psi2_pow),
                psi_q.mul(&psi1_pow),
                psi_q.mul(&psi2_pow),
            ])
        }
        ShapeClass::PrimeSquare(q1) => {
            let psi = LaurentPoly::from(&cyclotomic(q1));
            Ok(vec![psi.pow(q1 as u32), psi.substitute_power(q1 as u32)])
        }
        ShapeClass::PrimeCube(q1) => {
            let psi = LaurentPoly::from(&cyclotomic(q1));
            let plain = psi.pow((q1 * q1) as u32);
            let comp1 = psi.substitute_power(q1 as u32).pow(q1 as u32);
            let comp2 = psi.substitute_power((q1 * q1) as u32);
            Ok(vec![comp1.mul(&plain), comp2.mul(&plain), comp2.mul(&psi.substitute_power(q1 as u32).pow(q1 as u32))])
        }
        ShapeClass::Unsupported => Err(Error::UnsupportedShape(shape.describe())),
    }
}

/// Entrywise level combinations each multiplier applies to, in the
/// directly-derived form of the comparison polynomial.
fn direct_combos(class: ShapeClass, ms: &[PairCountMatrix]) -> Vec<PairCountMatrix> {
    match class {
        ShapeClass::Prime(_) => vec![ms[0].clone()],
        ShapeClass::Semiprime(_, _) => vec![
            ms[0].minus(&ms[1]).minus(&ms[2]),
            ms[1].clone(),
            ms[2].clone(),
        ],
        ShapeClass::PrimeSquare(_) => vec![ms[0].minus(&ms[1]), ms[1].clone()],
        ShapeClass::PrimeCube(_) => vec![
            ms[0].minus(&ms[1]).minus(&ms[2]),
            ms[1].minus(&ms[2]),
            ms[2].clone(),
        ],
        ShapeClass::Unsupported => unreachable!("unsupported shape has no combos"),
    }
}

/// Assemble the comparison polynomials for `p = 0..=n` from already-built
/// count matrices. Exposed separately from [`build_profile`] so harness
/// checks can perturb the matrices and cross-checks can reuse the path.
pub fn profile_from_matrices(
    choice: &GeneratorChoice,
    shape: &QShape,
    matrices: &[PairCountMatrix],
) -> Result<SpectralProfile> {
    let multipliers = shape_multipliers(shape)?;
    assert_eq!(multipliers.len(), matrices.len(), "level count mismatch");
    let combos = direct_combos(shape.class, matrices);
    let n = choice.n();
    let polys = (0..=n)
        .map(|p| {
            let mut h = LaurentPoly::zero();
            for (mult, combo) in multipliers.iter().zip(&combos) {
                h = h.add(&mult.mul(&bracket_poly(combo, p, choice.k)));
            }
            h
        })
        .collect();
    Ok(SpectralProfile {
        choice: choice.clone(),
        polys,
    })
}

/// Build the full comparison-polynomial family of a choice.
pub fn build_profile(choice: &GeneratorChoice, shape: &QShape) -> Result<SpectralProfile> {
    let matrices = count_matrices_for_shape(choice, shape)?;
    profile_from_matrices(choice, shape, &matrices)
}

/// Alternate assembly from the regrouped form of the same polynomial
/// (multiplier differences against the raw level matrices). Kept as an
/// independent route for cross-checking [`build_profile`].
pub fn profile_from_matrices_regrouped(
    choice: &GeneratorChoice,
    shape: &QShape,
    matrices: &[PairCountMatrix],
) -> Result<SpectralProfile> {
    let m = shape_multipliers(shape)?;
    let multipliers: Vec<LaurentPoly> = match shape.class {
        ShapeClass::Prime(_) => vec![m[0].clone()],
        ShapeClass::Semiprime(_, _) => {
            vec![m[0].clone(), m[1].sub(&m[0]), m[2].sub(&m[0])]
        }
        ShapeClass::PrimeSquare(_) => vec![m[0].clone(), m[1].sub(&m[0])],
        ShapeClass::PrimeCube(_) => vec![
            m[0].clone(),
            m[1].sub(&m[0]),
            m[2].sub(&m[1]).sub(&m[0]),
        ],
        ShapeClass::Unsupported => return Err(Error::UnsupportedShape(shape.describe())),
    };
    let n = choice.n();
    let polys = (0..=n)
        .map(|p| {
            let mut h = LaurentPoly::zero();
            for (mult, matrix) in multipliers.iter().zip(matrices) {
                h = h.add(&mult.mul(&bracket_poly(matrix, p, choice.k)));
            }
            h
        })
        .collect();
    Ok(SpectralProfile {
        choice: choice.clone(),
        polys,
    })
}

/// Degree-by-degree equality verdict for a pair of profiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchReport {
    /// Canonical identifier of the lexicographically smaller choice.
    pub first_set: Vec<u64>,
    /// Canonical identifier of the larger choice.
    pub second_set: Vec<u64>,
    pub equal_at_degree: Vec<bool>,
    /// Maximal `[start, end]` intervals (inclusive) of equal degrees.
    pub runs: Vec<(usize, usize)>,
}

impl MatchReport {
    /// Build a report from the per-degree equality vector, computing the
    /// runs and ordering the identifiers.
    pub fn new(a_set: Vec<u64>, b_set: Vec<u64>, equal_at_degree: Vec<bool>) -> MatchReport {
        let runs = equal_runs(&equal_at_degree);
        let (first_set, second_set) = if a_set <= b_set {
            (a_set, b_set)
        } else {
            (b_set, a_set)
        };
        MatchReport {
            first_set,
            second_set,
            equal_at_degree,
            runs,
        }
    }

    pub fn equal_degrees(&self) -> Vec<usize> {
        self.equal_at_degree
            .iter()
            .enumerate()
            .filter_map(|(p, &e)| e.then_some(p))
            .collect()
    }

    /// Full p-form isospectrality needs equality at both `p` and `p - 1`.
    pub fn p_form_isospectral(&self, p: usize) -> bool {
        p >= 1 && p < self.equal_at_degree.len() && self.equal_at_degree[p] && self.equal_at_degree[p - 1]
    }

    pub fn any_equality(&self) -> bool {
        self.equal_at_degree.iter().any(|&e| e)
    }

    /// Equal at some degree p >= 1 while unequal on functions (degree 0).
    pub fn forms_not_functions(&self) -> bool {
        !self.equal_at_degree[0] && self.equal_at_degree.iter().skip(1).any(|&e| e)
    }

    /// The reporting predicate of the original exhaustive runs: at least
    /// two runs of two or more consecutive equal degrees, or exactly one
    /// such run that does not start at degree 0.
    pub fn nontrivial(&self) -> bool {
        let long: Vec<&(usize, usize)> = self.runs.iter().filter(|(s, e)| e > s).collect();
        long.len() > 1 || (long.len() == 1 && long[0].0 > 0)
    }
}

/// Maximal intervals of `true` positions.
fn equal_runs(equal: &[bool]) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (i, &e) in equal.iter().enumerate() {
        match (e, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, equal.len() - 1));
    }
    runs
}

/// Compare two profiles degree by degree. The report is symmetric in its
/// arguments; identifiers are ordered lexicographically.
pub fn compare_profiles(a: &SpectralProfile, b: &SpectralProfile) -> Result<MatchReport> {
    if a.choice.q != b.choice.q || a.choice.k != b.choice.k || a.polys.len() != b.polys.len() {
        return Err(Error::InvalidParameter(format!(
            "profiles not comparable: (q={}, k={}, degrees={}) vs (q={}, k={}, degrees={})",
            a.choice.q,
            a.choice.k,
            a.polys.len(),
            b.choice.q,
            b.choice.k,
            b.polys.len()
        )));
    }
    let equal: Vec<bool> = a
        .polys
        .iter()
        .zip(&b.polys)
        .map(|(pa, pb)| pa == pb)
        .collect();
    Ok(MatchReport::new(
        a.choice.s_plus_minus.clone(),
        b.choice.s_plus_minus.clone(),
        equal,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chartables::{build_subset_sum_table, pair_count_matrix};
    use crate::numtheory::classify_shape;

    fn q5_matrix() -> PairCountMatrix {
        let ts = build_subset_sum_table(&[1, 4], 5);
        let tr = build_subset_sum_table(&[2, 3], 5);
        pair_count_matrix(&ts, &tr, 5, 5)
    }

    /// Independent oracle: the pre-regrouped double sum
    /// `sum_a sum_b (-1)^(a+b) (z^(a-b) - z^(a+b+2)) M[a][p-b]`.
    fn bracket_reference(m: &PairCountMatrix, p: usize, k: usize) -> LaurentPoly {
        let mut acc = LaurentPoly::zero();
        for a in 0..=2 * k {
            for b in 0..=p {
                let c = &m.entries[a][p - b];
                if c.is_zero() {
                    continue;
                }
                let sign = if (a + b) % 2 == 0 { 1 } else { -1 };
                let coeff = c * BigInt::from(sign);
                let lo = LaurentPoly::monomial(coeff.clone(), a as i64 - b as i64);
                let hi = LaurentPoly::monomial(-coeff, (a + b + 2) as i64);
                acc = acc.add(&lo).add(&hi);
            }
        }
        acc
    }

    #[test]
    fn bracket_q5_frozen_values() {
        let m = q5_matrix();
        // derived by hand-expanding both sums; cross-checked below
        assert_eq!(
            bracket_poly(&m, 0, 1),
            LaurentPoly::from_i64_coeffs(0, &[5, 0, 0, 0, -5])
        );
        assert_eq!(
            bracket_poly(&m, 1, 1),
            LaurentPoly::from_i64_coeffs(-1, &[-5, 0, -5, 0, 5, 0, 5])
        );
        assert_eq!(bracket_reference(&m, 0, 1), bracket_poly(&m, 0, 1));
        assert_eq!(bracket_reference(&m, 1, 1), bracket_poly(&m, 1, 1));
    }

    #[test]
    fn bracket_zero_matrix() {
        let mut m = q5_matrix();
        for row in &mut m.entries {
            for e in row {
                *e = BigInt::zero();
            }
        }
        assert!(bracket_poly(&m, 1, 1).is_zero());
    }

    #[test]
    fn bracket_matches_reference_on_real_choices() {
        // the appendix-style construction (powers [a-t, a+t+2] with signs
        // (-1)^(t+a)) regroups to the same polynomial; checked on every
        // feasible prime choice for q <= 13
        for q in [5u64, 7, 11, 13] {
            let shape = classify_shape(q);
            let choices = crate::search::enumerate_choices(q, 1).unwrap();
            let more = if crate::numtheory::euler_phi(q) / 2 > 2 {
                crate::search::enumerate_choices(q, 2).unwrap()
            } else {
                Vec::new()
            };
            for choice in choices.iter().chain(&more) {
                let ms = count_matrices_for_shape(choice, &shape).unwrap();
                for p in 0..=choice.n() {
                    assert_eq!(
                        bracket_poly(&ms[0], p, choice.k),
                        bracket_reference(&ms[0], p, choice.k),
                        "q={q} k={} p={p}",
                        choice.k
                    );
                }
            }
        }
    }

    #[test]
    fn profile_q5_frozen() {
        let choice = GeneratorChoice::from_full_set(5, &[1, 4]).unwrap();
        let profile = build_profile(&choice, &classify_shape(5)).unwrap();
        assert_eq!(profile.polys.len(), 2);
        assert_eq!(
            profile.polys[0],
            LaurentPoly::from_i64_coeffs(0, &[5, 0, 0, 0, -5])
        );
        assert_eq!(
            profile.polys[1],
            LaurentPoly::from_i64_coeffs(-1, &[-5, 0, -5, 0, 5, 0, 5])
        );
    }

    #[test]
    fn profile_is_deterministic() {
        let choice = GeneratorChoice::from_full_set(15, &[1, 14, 2, 13]).unwrap();
        let shape = classify_shape(15);
        let a = build_profile(&choice, &shape).unwrap();
        let b = build_profile(&choice, &shape).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.hashes(), b.hashes());
    }

    #[test]
    fn regrouped_assembly_agrees() {
        for (q, set) in [
            (15u64, vec![1u64, 14, 2, 13]),
            (25, vec![1, 24]),
            (27, vec![1, 26, 4, 23]),
            (35, vec![1, 34]),
            (9, vec![1, 8]),
        ] {
            let choice = GeneratorChoice::from_full_set(q, &set).unwrap();
            let shape = classify_shape(q);
            let ms = count_matrices_for_shape(&choice, &shape).unwrap();
            let direct = profile_from_matrices(&choice, &shape, &ms).unwrap();
            let regrouped = profile_from_matrices_regrouped(&choice, &shape, &ms).unwrap();
            assert_eq!(direct.polys, regrouped.polys, "q={q}");
        }
    }

    #[test]
    fn exponent_window_bound() {
        for (q, set) in [(15u64, vec![1u64, 14]), (27, vec![1, 26]), (13, vec![1, 12])] {
            let choice = GeneratorChoice::from_full_set(q, &set).unwrap();
            let shape = classify_shape(q);
            let mult_deg: i64 = shape_multipliers(&shape)
                .unwrap()
                .iter()
                .map(|m| m.max_exp())
                .max()
                .unwrap();
            let profile = build_profile(&choice, &shape).unwrap();
            for (p, poly) in profile.polys.iter().enumerate() {
                if poly.is_zero() {
                    continue;
                }
                assert!(poly.min_exp() >= -(p as i64), "q={q} p={p}");
                assert!(
                    poly.max_exp() <= 2 * choice.k as i64 + p as i64 + 2 + mult_deg,
                    "q={q} p={p}"
                );
            }
        }
    }

    #[test]
    fn unit_multiplication_leaves_profile_fixed() {
        let q = 13u64;
        let shape = classify_shape(q);
        let choice = GeneratorChoice::from_full_set(q, &[1, 12, 5, 8]).unwrap();
        let base = build_profile(&choice, &shape).unwrap();
        for u in crate::numtheory::unit_residues(q).unwrap().residues {
            let scaled: Vec<u64> = choice.s_plus_minus.iter().map(|&s| s * u % q).collect();
            let scaled_choice = GeneratorChoice::from_full_set(q, &scaled).unwrap();
            let scaled_profile = build_profile(&scaled_choice, &shape).unwrap();
            assert_eq!(base.polys, scaled_profile.polys, "u={u}");
        }
    }

    #[test]
    fn compare_self_reports_full_run() {
        let choice = GeneratorChoice::from_full_set(13, &[1, 12, 5, 8]).unwrap();
        let shape = classify_shape(13);
        let profile = build_profile(&choice, &shape).unwrap();
        let report = compare_profiles(&profile, &profile).unwrap();
        assert!(report.equal_at_degree.iter().all(|&e| e));
        assert_eq!(report.runs, vec![(0, choice.n())]);
        assert!(report.any_equality());
        assert!(!report.forms_not_functions());
    }

    #[test]
    fn compare_rejects_mismatched_profiles() {
        let a = build_profile(
            &GeneratorChoice::from_full_set(13, &[1, 12]).unwrap(),
            &classify_shape(13),
        )
        .unwrap();
        let b = build_profile(
            &GeneratorChoice::from_full_set(11, &[1, 10]).unwrap(),
            &classify_shape(11),
        )
        .unwrap();
        assert!(compare_profiles(&a, &b).is_err());
    }

    #[test]
    fn runs_partition_equalities() {
        let equal = vec![true, true, false, true, false, false, true];
        assert_eq!(equal_runs(&equal), vec![(0, 1), (3, 3), (6, 6)]);
        assert_eq!(equal_runs(&[false, false]), vec![]);
        assert_eq!(equal_runs(&[true]), vec![(0, 0)]);
    }

    #[test]
    fn report_predicates() {
        let report = MatchReport {
            first_set: vec![1],
            second_set: vec![2],
            equal_at_degree: vec![false, true, true, false, true],
            runs: vec![(1, 2), (4, 4)],
        };
        assert!(report.any_equality());
        assert!(report.forms_not_functions());
        assert!(report.nontrivial()); // one long run starting at 1
        assert!(report.p_form_isospectral(2));
        assert!(!report.p_form_isospectral(1));
        assert_eq!(report.equal_degrees(), vec![1, 2, 4]);

        let trivial = MatchReport {
            first_set: vec![1],
            second_set: vec![2],
            equal_at_degree: vec![true, true, false],
            runs: vec![(0, 1)],
        };
        assert!(!trivial.nontrivial()); // single long run starting at 0
    }
}
