//! Exact character data via subset-sum counting.
//!
//! The character of the induced action on an exterior power is a sum of
//! roots of unity indexed by fixed-size subsets of the residue set, so
//! all character sums over the group reduce to counting subsets by
//! cardinality and sum-residue. This module builds those count tables
//! for the two halves of a generator choice and combines them into the
//! weighted pair-count matrices each q-shape consumes.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numtheory::{unit_residues, QShape, ShapeClass};

/// A lens-space generator choice for modulus `q`: the negation-closed
/// residue set `±S` of size `2k` and its complement `±R` within the unit
/// residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorChoice {
    pub q: u64,
    pub k: usize,
    /// Sorted ascending, size `2k`, closed under `t -> q - t`.
    pub s_plus_minus: Vec<u64>,
    /// Sorted ascending, size `2n`; the remaining unit residues.
    pub r_plus_minus: Vec<u64>,
}

impl GeneratorChoice {
    /// Build a choice from the full `±S` list, validating every invariant.
    /// Validation failures name the offending residue.
    pub fn from_full_set(q: u64, set: &[u64]) -> Result<GeneratorChoice> {
        let units = unit_residues(q)?;
        if set.is_empty() || set.len() % 2 != 0 {
            return Err(Error::InvalidSet(format!(
                "expected a nonempty set of even size 2k, got {} residues",
                set.len()
            )));
        }
        let mut s: Vec<u64> = set.to_vec();
        s.sort_unstable();
        for window in s.windows(2) {
            if window[0] == window[1] {
                return Err(Error::InvalidSet(format!(
                    "duplicate residue {} (mod {q})",
                    window[0]
                )));
            }
        }
        for &t in &s {
            if t == 0 || t >= q {
                return Err(Error::InvalidSet(format!(
                    "residue {t} outside the range (0, {q})"
                )));
            }
            if !units.contains(t) {
                return Err(Error::InvalidSet(format!(
                    "residue {t} is not coprime to {q}"
                )));
            }
        }
        for &t in &s {
            if s.binary_search(&(q - t)).is_err() {
                return Err(Error::InvalidSet(format!(
                    "set is not closed under negation: {t} present, {} missing",
                    q - t
                )));
            }
        }
        let k = s.len() / 2;
        let r: Vec<u64> = units
            .residues
            .iter()
            .copied()
            .filter(|t| s.binary_search(t).is_err())
            .collect();
        if r.len() < 2 {
            return Err(Error::InvalidSet(format!(
                "k = {k} leaves n = {} (need n >= 1 for phi({q}) = {})",
                r.len() / 2,
                units.len()
            )));
        }
        Ok(GeneratorChoice {
            q,
            k,
            s_plus_minus: s,
            r_plus_minus: r,
        })
    }

    pub fn n(&self) -> usize {
        self.r_plus_minus.len() / 2
    }

    /// One representative per `±` pair of `±S` (the smaller element).
    pub fn s_half(&self) -> Vec<u64> {
        self.s_plus_minus
            .iter()
            .copied()
            .filter(|&t| 2 * t < self.q)
            .collect()
    }

    /// One representative per `±` pair of `±R`.
    pub fn r_half(&self) -> Vec<u64> {
        self.r_plus_minus
            .iter()
            .copied()
            .filter(|&t| 2 * t < self.q)
            .collect()
    }
}

/// Counts of subsets of a residue set, indexed by cardinality and
/// sum-residue: `counts[a][j]` is the number of `a`-element subsets with
/// sum congruent to `j` modulo `modulus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSumTable {
    pub source_size: usize,
    pub modulus: u64,
    pub counts: Vec<Vec<BigInt>>,
}

impl SubsetSumTable {
    pub fn count(&self, cardinality: usize, residue: u64) -> &BigInt {
        &self.counts[cardinality][residue as usize]
    }
}

/// Build the subset-sum table by dynamic programming: process one residue
/// at a time, updating cardinalities in descending order.
pub fn build_subset_sum_table(residues: &[u64], modulus: u64) -> SubsetSumTable {
    assert!(modulus >= 1, "modulus must be positive");
    let m = modulus as usize;
    let size = residues.len();
    let mut counts = vec![vec![BigInt::zero(); m]; size + 1];
    counts[0][0] = BigInt::one();
    for (idx, &res) in residues.iter().enumerate() {
        debug_assert!(res < modulus, "residues must be reduced");
        let r = res as usize;
        for a in (1..=idx + 1).rev() {
            let (lower, upper) = counts.split_at_mut(a);
            let prev = &lower[a - 1];
            let row = &mut upper[0];
            for j in 0..m {
                if prev[j].is_zero() {
                    continue;
                }
                let jj = (j + r) % m;
                row[jj] += &prev[j];
            }
        }
    }
    SubsetSumTable {
        source_size: size,
        modulus,
        counts,
    }
}

/// Collapse a table to a divisor of its modulus: column `j` of the result
/// sums every original column congruent to `j` mod `d`.
///
/// # Panics
///
/// Panics unless `d` divides the table's modulus.
pub fn fold_table(table: &SubsetSumTable, d: u64) -> SubsetSumTable {
    assert!(d >= 1 && table.modulus % d == 0, "fold target must divide the modulus");
    if d == table.modulus {
        return table.clone();
    }
    let counts = table
        .counts
        .iter()
        .map(|row| {
            let mut folded = vec![BigInt::zero(); d as usize];
            for (j, c) in row.iter().enumerate() {
                folded[j % d as usize] += c;
            }
            folded
        })
        .collect();
    SubsetSumTable {
        source_size: table.source_size,
        modulus: d,
        counts,
    }
}

/// Weighted pair-count matrix: entry `[a][b]` is `weight` times the number
/// of pairs of subsets (one of each cardinality from the two sources)
/// whose combined sum vanishes modulo the table modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCountMatrix {
    /// Divisor level this matrix is labeled with (the superscript in the
    /// count-matrix notation). For prime-power shapes this equals the
    /// counting modulus; for semiprimes the level names the shared factor
    /// of the group exponent while the counting runs at the complementary
    /// factor.
    pub level: u64,
    /// Modulus the pair sums were counted at.
    pub modulus: u64,
    /// Positive weight multiplying every raw count.
    pub weight: u64,
    /// `(2k + 1) x (2n + 1)` entries.
    pub entries: Vec<Vec<BigInt>>,
}

impl PairCountMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries[0].len()
    }

    /// Entrywise difference, keeping the left-hand labeling. Used to form
    /// the level combinations the comparison polynomials consume; the
    /// divisibility invariants of freshly counted matrices do not apply
    /// to differences.
    pub fn minus(&self, other: &PairCountMatrix) -> PairCountMatrix {
        assert_eq!(self.rows(), other.rows());
        assert_eq!(self.cols(), other.cols());
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a - b).collect())
            .collect();
        PairCountMatrix {
            level: self.level,
            modulus: self.modulus,
            weight: self.weight,
            entries,
        }
    }
}

/// Combine two subset-sum tables (already folded to the same modulus `d`)
/// into the weighted pair-count matrix with weight `w`.
///
/// # Panics
///
/// Panics on a modulus mismatch.
pub fn pair_count_matrix(
    table_s: &SubsetSumTable,
    table_r: &SubsetSumTable,
    d: u64,
    w: u64,
) -> PairCountMatrix {
    assert_eq!(table_s.modulus, d, "S table not folded to the pair modulus");
    assert_eq!(table_r.modulus, d, "R table not folded to the pair modulus");
    let m = d as usize;
    let weight = BigInt::from(w);
    let entries = table_s
        .counts
        .iter()
        .map(|srow| {
            table_r
                .counts
                .iter()
                .map(|rrow| {
                    let mut total = BigInt::zero();
                    for j in 0..m {
                        if srow[j].is_zero() {
                            continue;
                        }
                        let jj = (m - j) % m;
                        if rrow[jj].is_zero() {
                            continue;
                        }
                        total += &srow[j] * &rrow[jj];
                    }
                    total * &weight
                })
                .collect()
        })
        .collect();
    PairCountMatrix {
        level: d,
        modulus: d,
        weight: w,
        entries,
    }
}

/// The `(level, modulus, weight)` triples a shape's comparison formula
/// consumes, highest level first.
pub fn levels_for_shape(shape: &QShape) -> Result<Vec<(u64, u64, u64)>> {
    let q = shape.q;
    match shape.class {
        ShapeClass::Prime(_) => Ok(vec![(q, q, q)]),
        ShapeClass::Semiprime(q1, q2) => Ok(vec![(q, q, q), (q1, q2, q2), (q2, q1, q1)]),
        ShapeClass::PrimeSquare(q1) => Ok(vec![(q, q, q), (q1, q1, q1)]),
        ShapeClass::PrimeCube(q1) => Ok(vec![(q, q, q), (q1 * q1, q1 * q1, q1 * q1), (q1, q1, q1)]),
        ShapeClass::Unsupported => Err(Error::UnsupportedShape(shape.describe())),
    }
}

/// Build exactly the pair-count matrices the shape's comparison formula
/// consumes, labeled by divisor level and ordered highest level first.
/// The full-modulus tables are built once and folded per level.
pub fn count_matrices_for_shape(
    choice: &GeneratorChoice,
    shape: &QShape,
) -> Result<Vec<PairCountMatrix>> {
    assert_eq!(choice.q, shape.q, "choice/shape modulus mismatch");
    let levels = levels_for_shape(shape)?;
    let table_s = build_subset_sum_table(&choice.s_plus_minus, choice.q);
    let table_r = build_subset_sum_table(&choice.r_plus_minus, choice.q);
    Ok(levels
        .into_iter()
        .map(|(level, d, w)| {
            let ts = fold_table(&table_s, d);
            let tr = fold_table(&table_r, d);
            let mut m = pair_count_matrix(&ts, &tr, d, w);
            m.level = level;
            m
        })
        .collect())
}
