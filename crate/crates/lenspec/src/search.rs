//! Enumeration of admissible generator choices, canonicalization under
//! unit multiplication, and the all-pairs comparison driver.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::chartables::GeneratorChoice;
use crate::error::{Error, Result};
use crate::numtheory::{euler_phi, mod_inverse, unit_residues, QShape};
use crate::polynomial::{Fnv1a, LaurentPoly};
use crate::spectra::{build_profile, MatchReport, SpectralProfile};

/// Which pairs a search reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchFilter {
    /// Equal at at least one degree.
    AnyEquality,
    /// The original exhaustive-run predicate: two or more runs of
    /// consecutive equal degrees, or one such run away from degree 0.
    Nontrivial,
    /// Equal at some degree p >= 1 but not on functions.
    FormsNotFunctions,
    /// Every pair, equal or not.
    All,
}

impl MatchFilter {
    pub fn passes(&self, report: &MatchReport) -> bool {
        match self {
            MatchFilter::AnyEquality => report.any_equality(),
            MatchFilter::Nontrivial => report.nontrivial(),
            MatchFilter::FormsNotFunctions => report.forms_not_functions(),
            MatchFilter::All => true,
        }
    }
}

impl fmt::Display for MatchFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatchFilter::AnyEquality => "any-equality",
            MatchFilter::Nontrivial => "nontrivial",
            MatchFilter::FormsNotFunctions => "forms-not-functions",
            MatchFilter::All => "all",
        };
        f.write_str(s)
    }
}

impl FromStr for MatchFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "any-equality" => Ok(MatchFilter::AnyEquality),
            "nontrivial" => Ok(MatchFilter::Nontrivial),
            "forms-not-functions" => Ok(MatchFilter::FormsNotFunctions),
            "all" => Ok(MatchFilter::All),
            other => Err(Error::InvalidParameter(format!(
                "unknown filter {other:?}; expected any-equality, nontrivial, forms-not-functions or all"
            ))),
        }
    }
}

/// One search invocation over a single `(q, k)`.
#[derive(Debug, Clone)]
pub struct SearchTask {
    pub q: u64,
    pub k: usize,
    pub shape: QShape,
    pub filter: MatchFilter,
    /// Sub-range of the enumeration index to process this run; `None`
    /// processes everything.
    pub chunk: Option<Range<usize>>,
    /// Worker thread count; `None` uses the default pool.
    pub jobs: Option<usize>,
    /// Checkpoint cache file for chunked/resumable execution.
    pub checkpoint: Option<PathBuf>,
}

/// What a search produced.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub reports: Vec<MatchReport>,
    /// Canonical classes enumerated.
    pub class_count: usize,
    /// Raw candidates before orbit deduplication.
    pub candidate_count: u64,
    /// False when the processed chunks do not yet cover the enumeration;
    /// comparisons only run on full coverage.
    pub complete: bool,
}

/// Lexicographically smallest image of a negation-closed residue set
/// under unit multiplication.
///
/// The minimum always contains 1 (scale by the inverse of any element),
/// so only the inverses of the set's own elements need scanning.
pub fn canonical_set(q: u64, set: &[u64]) -> Vec<u64> {
    let mut best: Option<Vec<u64>> = None;
    for &s in set {
        let u = mod_inverse(s, q).expect("set elements are units");
        let mut image: Vec<u64> = set
            .iter()
            .map(|&t| (t as u128 * u as u128 % q as u128) as u64)
            .collect();
        image.sort_unstable();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    best.expect("nonempty set")
}

/// Canonical orbit representative of a choice; idempotent.
pub fn canonicalize(choice: &GeneratorChoice) -> GeneratorChoice {
    let set = canonical_set(choice.q, &choice.s_plus_minus);
    GeneratorChoice::from_full_set(choice.q, &set).expect("canonical image stays valid")
}

fn for_each_combination<T: Copy>(items: &[T], r: usize, mut f: impl FnMut(&[T])) {
    if r > items.len() {
        return;
    }
    if r == 0 {
        f(&[]);
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    let mut buf: Vec<T> = idx.iter().map(|&i| items[i]).collect();
    loop {
        f(&buf);
        // advance to the lexicographic successor
        let mut i = r;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + items.len() - r {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
        for j in i..r {
            buf[j] = items[idx[j]];
        }
    }
}

/// Number of raw candidates `enumerate_choices(q, k)` deduplicates.
pub fn candidate_count(q: u64, k: usize) -> Result<u64> {
    let reps = half_representatives(q, k)?;
    let n = reps.len() as u64;
    let r = (k - 1) as u64;
    let mut count = 1u64;
    for i in 0..r {
        count = count * (n - i) / (i + 1);
    }
    Ok(count)
}

fn half_representatives(q: u64, k: usize) -> Result<Vec<u64>> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let units = unit_residues(q)?;
    let phi = units.len();
    if 2 * k >= phi {
        return Err(Error::InvalidParameter(format!(
            "k = {k} infeasible for q = {q}: need 1 <= k < phi(q)/2 = {}",
            phi / 2
        )));
    }
    let reps: Vec<u64> = units
        .residues
        .iter()
        .copied()
        .filter(|&t| t >= 2 && 2 * t < q)
        .collect();
    if k - 1 > reps.len() {
        return Err(Error::InvalidParameter(format!(
            "k = {k} infeasible for q = {q}: only {} representatives available",
            reps.len()
        )));
    }
    Ok(reps)
}

/// All admissible choices with `1` in the generating half-set, one
/// canonical representative per unit-multiplication orbit, sorted.
///
/// Fixing 1 loses no orbits: any set scales by an element's inverse to
/// contain 1.
pub fn enumerate_choices(q: u64, k: usize) -> Result<Vec<GeneratorChoice>> {
    let reps = half_representatives(q, k)?;
    let mut canon: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut full = Vec::with_capacity(2 * k);
    for_each_combination(&reps, k - 1, |half| {
        full.clear();
        full.push(1);
        full.push(q - 1);
        for &t in half {
            full.push(t);
            full.push(q - t);
        }
        canon.insert(canonical_set(q, &full));
    });
    canon
        .into_iter()
        .map(|set| GeneratorChoice::from_full_set(q, &set))
        .collect()
}

const CHECKPOINT_FORMAT: u32 = 1;
const BATCH_SIZE: usize = 256;

fn parameter_hash(q: u64, k: usize, shape: &QShape, classes: usize) -> u64 {
    let mut h = Fnv1a::new();
    h.write(&CHECKPOINT_FORMAT.to_le_bytes());
    h.write(&q.to_le_bytes());
    h.write(&(k as u64).to_le_bytes());
    h.write(shape.describe().as_bytes());
    h.write(&(classes as u64).to_le_bytes());
    h.finish()
}

fn header_line(q: u64, k: usize, shape: &QShape, classes: usize) -> String {
    format!(
        "lenspec-cache v{CHECKPOINT_FORMAT} q={q} k={k} shape={} classes={classes} params={:016x}",
        shape.describe(),
        parameter_hash(q, k, shape, classes)
    )
}

fn parse_record(line: &str, classes: &[GeneratorChoice], degrees: usize) -> Result<(usize, Vec<u64>)> {
    let corrupt = |msg: &str| Error::Cache(format!("{msg}: {line:?}"));
    let mut parts = line.split_whitespace();
    let idx: usize = parts
        .next()
        .ok_or_else(|| corrupt("missing index"))?
        .parse()
        .map_err(|_| corrupt("bad index"))?;
    if idx >= classes.len() {
        return Err(corrupt("index out of range"));
    }
    let set: Vec<u64> = parts
        .next()
        .ok_or_else(|| corrupt("missing residues"))?
        .split(',')
        .map(|t| t.parse().map_err(|_| corrupt("bad residue")))
        .collect::<Result<_>>()?;
    if set != classes[idx].s_plus_minus {
        return Err(corrupt("residues do not match the enumeration"));
    }
    let hashes: Vec<u64> = parts
        .next()
        .ok_or_else(|| corrupt("missing hashes"))?
        .split(',')
        .map(|t| u64::from_str_radix(t, 16).map_err(|_| corrupt("bad hash")))
        .collect::<Result<_>>()?;
    if hashes.len() != degrees {
        return Err(corrupt("wrong hash count"));
    }
    if parts.next().is_some() {
        return Err(corrupt("trailing fields"));
    }
    Ok((idx, hashes))
}

/// Load an existing checkpoint, validating the header and every record
/// against the current enumeration.
fn load_checkpoint(
    path: &Path,
    header: &str,
    classes: &[GeneratorChoice],
    degrees: usize,
) -> Result<BTreeMap<usize, Vec<u64>>> {
    let file = fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let first = match lines.next() {
        None => return Err(Error::Cache("checkpoint file is empty".into())),
        Some(l) => l?,
    };
    if first != header {
        return Err(Error::Cache(format!(
            "header mismatch: expected {header:?}, found {first:?}"
        )));
    }
    let mut records = BTreeMap::new();
    for line in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let (idx, hashes) = parse_record(&line, classes, degrees)?;
        if records.insert(idx, hashes).is_some() {
            return Err(Error::Cache(format!("duplicate record for index {idx}")));
        }
    }
    Ok(records)
}

struct CheckpointWriter {
    file: fs::File,
}

impl CheckpointWriter {
    fn append_batch(&mut self, batch: &[(usize, Vec<u64>)], classes: &[GeneratorChoice]) -> Result<()> {
        let mut buf = String::new();
        for (idx, hashes) in batch {
            let set = classes[*idx]
                .s_plus_minus
                .iter()
                .map(|t| t.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let hx = hashes
                .iter()
                .map(|h| format!("{h:016x}"))
                .collect::<Vec<_>>()
                .join(",");
            buf.push_str(&format!("{idx} {set} {hx}\n"));
        }
        self.file.write_all(buf.as_bytes())?;
        self.file.sync_data()?;
        Ok(())
    }
}

fn run_in_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Run the full search: enumerate classes, build profiles (in parallel),
/// record per-degree hashes (optionally checkpointed), then compare all
/// unordered pairs exactly and report those passing the filter.
///
/// Pairs are screened by per-degree content hashes; only pairs sharing
/// a hash at some degree are rebuilt for exact confirmation, so hash
/// inequality (a sound certificate of polynomial inequality) never
/// triggers a rebuild. Output order is fixed by canonical identifiers,
/// independent of parallelism and chunking.
pub fn run_search(task: &SearchTask) -> Result<SearchOutcome> {
    if !task.shape.is_supported() {
        return Err(Error::UnsupportedShape(task.shape.describe()));
    }
    let q = task.q;
    let phi = euler_phi(q) as usize;
    let n = phi / 2 - task.k;
    let degrees = n + 1;
    let classes = enumerate_choices(q, task.k)?;
    let total = classes.len();
    let candidates = candidate_count(q, task.k)?;
    let shape = task.shape;

    let header = header_line(q, task.k, &shape, total);
    let mut known: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    let mut writer = match &task.checkpoint {
        None => None,
        Some(path) => {
            if path.exists() && fs::metadata(path)?.len() > 0 {
                known = load_checkpoint(path, &header, &classes, degrees)?;
            } else {
                let mut file = fs::File::create(path)?;
                writeln!(file, "{header}")?;
                file.sync_data()?;
            }
            let file = fs::OpenOptions::new().append(true).open(path)?;
            Some(CheckpointWriter { file })
        }
    };

    let chunk = task.chunk.clone().unwrap_or(0..total);
    let todo: Vec<usize> = chunk
        .filter(|i| *i < total && !known.contains_key(i))
        .collect();

    for batch in todo.chunks(BATCH_SIZE) {
        let results: Vec<(usize, Vec<u64>)> = run_in_pool(task.jobs, || {
            batch
                .par_iter()
                .map(|&i| {
                    let profile = build_profile(&classes[i], &shape)?;
                    Ok((i, profile.hashes()))
                })
                .collect::<Result<Vec<_>>>()
        })??;
        if let Some(w) = writer.as_mut() {
            w.append_batch(&results, &classes)?;
        }
        known.extend(results);
    }

    if known.len() < total {
        return Ok(SearchOutcome {
            reports: Vec::new(),
            class_count: total,
            candidate_count: candidates,
            complete: false,
        });
    }

    // Per-degree hash populations. Hash inequality certifies polynomial
    // inequality, so only hashes shared by two or more classes need an
    // exact look.
    let hashes: Vec<&Vec<u64>> = (0..total).map(|i| &known[&i]).collect();
    let shared: Vec<HashMap<u64, u32>> = (0..degrees)
        .map(|p| {
            let mut counts: HashMap<u64, u32> = HashMap::new();
            for h in &hashes {
                *counts.entry(h[p]).or_insert(0) += 1;
            }
            counts.retain(|_, c| *c >= 2);
            counts
        })
        .collect();
    let involved: Vec<usize> = (0..total)
        .filter(|&i| (0..degrees).any(|p| shared[p].contains_key(&hashes[i][p])))
        .collect();

    // Exact per-degree equality partition: rebuild each involved class
    // once (in batches, parallel) and group equal polynomials behind
    // their hash bucket's representatives. eq_id[p][i] == eq_id[p][j]
    // iff the degree-p polynomials are exactly equal.
    let mut eq_id: Vec<Vec<u32>> = (0..degrees)
        .map(|_| (0..total as u32).collect::<Vec<u32>>())
        .collect();
    let mut reps: Vec<HashMap<u64, Vec<(u32, LaurentPoly)>>> =
        (0..degrees).map(|_| HashMap::new()).collect();
    for batch in involved.chunks(BATCH_SIZE) {
        let profiles: Vec<(usize, SpectralProfile)> = run_in_pool(task.jobs, || {
            batch
                .par_iter()
                .map(|&i| Ok((i, build_profile(&classes[i], &shape)?)))
                .collect::<Result<Vec<_>>>()
        })??;
        for (i, profile) in profiles {
            for p in 0..degrees {
                let h = hashes[i][p];
                if !shared[p].contains_key(&h) {
                    continue;
                }
                let bucket = reps[p].entry(h).or_default();
                match bucket.iter().find(|(_, poly)| poly == &profile.polys[p]) {
                    Some(&(rep, _)) => eq_id[p][i] = rep,
                    None => bucket.push((i as u32, profile.polys[p].clone())),
                }
            }
        }
    }
    drop(reps);

    // Pairs worth reporting: co-partitioned at some degree (all pairs for
    // the `all` filter). Classes are in canonical sorted order, so pairs
    // in (i, j) order come out ordered by identifiers.
    let mut reports: Vec<MatchReport> = Vec::new();
    let emit = |i: usize, j: usize, reports: &mut Vec<MatchReport>| {
        let equal: Vec<bool> = (0..degrees).map(|p| eq_id[p][i] == eq_id[p][j]).collect();
        let report = MatchReport::new(
            classes[i].s_plus_minus.clone(),
            classes[j].s_plus_minus.clone(),
            equal,
        );
        if task.filter.passes(&report) {
            reports.push(report);
        }
    };
    if task.filter == MatchFilter::All {
        for i in 0..total {
            for j in i + 1..total {
                emit(i, j, &mut reports);
            }
        }
    } else {
        let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
        for p in 0..degrees {
            let mut groups: HashMap<u32, Vec<usize>> = HashMap::new();
            for i in 0..total {
                groups.entry(eq_id[p][i]).or_default().push(i);
            }
            for group in groups.values() {
                for (a, &i) in group.iter().enumerate() {
                    for &j in &group[a + 1..] {
                        pairs.insert((i.min(j), i.max(j)));
                    }
                }
            }
        }
        for &(i, j) in &pairs {
            emit(i, j, &mut reports);
        }
    }

    Ok(SearchOutcome {
        reports,
        class_count: total,
        candidate_count: candidates,
        complete: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::classify_shape;

    #[test]
    fn enumerate_q5_k1_single_choice() {
        let choices = enumerate_choices(5, 1).unwrap();
        assert_eq!(choices.len(), 1);
        assert_eq!(choices[0].s_plus_minus, vec![1, 4]);
    }

    #[test]
    fn enumerate_q7_k2_one_orbit() {
        // candidates {1,2,5,6} and {1,3,4,6} collapse: 3 * {1,2,5,6} = {1,3,4,6}
        let choices = enumerate_choices(7, 2).unwrap();
        assert_eq!(choices.len(), 1);
        assert_eq!(choices[0].s_plus_minus, vec![1, 2, 5, 6]);
        assert_eq!(candidate_count(7, 2).unwrap(), 2);
    }

    #[test]
    fn enumerate_q11_k2_matches_brute_force() {
        assert_eq!(candidate_count(11, 2).unwrap(), 4);
        let choices = enumerate_choices(11, 2).unwrap();
        let orbits = brute_force_orbits(11, 2);
        assert_eq!(choices.len(), orbits.len());
    }

    #[test]
    fn canonicalize_examples() {
        let c = GeneratorChoice::from_full_set(7, &[1, 3, 4, 6]).unwrap();
        assert_eq!(canonicalize(&c).s_plus_minus, vec![1, 2, 5, 6]);
        // already canonical: fixed point
        let canon = canonicalize(&c);
        assert_eq!(canonicalize(&canon), canon);
        // 3 * {2,3} = {1,4} mod 5
        let c = GeneratorChoice::from_full_set(5, &[2, 3]).unwrap();
        assert_eq!(canonicalize(&c).s_plus_minus, vec![1, 4]);
    }

    /// Reference canonical form: minimum over every unit, not just the
    /// element inverses.
    fn canonical_set_all_units(q: u64, set: &[u64]) -> Vec<u64> {
        let mut best: Option<Vec<u64>> = None;
        for u in unit_residues(q).unwrap().residues {
            let mut image: Vec<u64> = set.iter().map(|&t| t * u % q).collect();
            image.sort_unstable();
            if best.as_ref().is_none_or(|b| image < *b) {
                best = Some(image);
            }
        }
        best.unwrap()
    }

    /// Orbit partition of all negation-closed 2k-subsets of the units.
    fn brute_force_orbits(q: u64, k: usize) -> BTreeSet<Vec<u64>> {
        let half: Vec<u64> = unit_residues(q)
            .unwrap()
            .residues
            .into_iter()
            .filter(|&t| 2 * t < q)
            .collect();
        let mut orbits = BTreeSet::new();
        for_each_combination(&half, k, |picked| {
            let mut full: Vec<u64> = picked.iter().flat_map(|&t| [t, q - t]).collect();
            full.sort_unstable();
            orbits.insert(canonical_set_all_units(q, &full));
        });
        orbits
    }

    #[test]
    fn canonical_shortcut_matches_full_scan() {
        for q in [5u64, 7, 9, 11, 13, 15] {
            let half: Vec<u64> = unit_residues(q)
                .unwrap()
                .residues
                .into_iter()
                .filter(|&t| 2 * t < q)
                .collect();
            for k in 1..half.len() {
                for_each_combination(&half, k, |picked| {
                    let mut full: Vec<u64> = picked.iter().flat_map(|&t| [t, q - t]).collect();
                    full.sort_unstable();
                    assert_eq!(
                        canonical_set(q, &full),
                        canonical_set_all_units(q, &full),
                        "q={q} set={full:?}"
                    );
                });
            }
        }
    }

    #[test]
    fn enumeration_matches_orbit_partition() {
        // every orbit appears exactly once, for all feasible k, q <= 19
        for q in [5u64, 7, 9, 11, 13, 15, 16, 17, 19] {
            let shape = classify_shape(q);
            if !shape.is_supported() {
                continue;
            }
            let phi = euler_phi(q) as usize;
            for k in 1..phi / 2 {
                let choices = enumerate_choices(q, k).unwrap();
                let listed: BTreeSet<Vec<u64>> =
                    choices.iter().map(|c| c.s_plus_minus.clone()).collect();
                assert_eq!(listed.len(), choices.len(), "duplicates at q={q} k={k}");
                assert_eq!(listed, brute_force_orbits(q, k), "q={q} k={k}");
            }
        }
    }

    #[test]
    fn unit_scaling_fixes_canonical_form() {
        let q = 13u64;
        let set = [1u64, 12, 4, 9];
        let base = canonical_set(q, &set);
        for u in unit_residues(q).unwrap().residues {
            let scaled: Vec<u64> = set.iter().map(|&t| t * u % q).collect();
            assert_eq!(canonical_set(q, &scaled), base, "u={u}");
        }
    }

    #[test]
    fn infeasible_k_rejected() {
        assert!(enumerate_choices(5, 2).is_err());
        assert!(enumerate_choices(5, 0).is_err());
        assert!(enumerate_choices(2, 1).is_err());
    }

    #[test]
    fn search_q5_k1_empty() {
        let task = SearchTask {
            q: 5,
            k: 1,
            shape: classify_shape(5),
            filter: MatchFilter::AnyEquality,
            chunk: None,
            jobs: None,
            checkpoint: None,
        };
        let outcome = run_search(&task).unwrap();
        assert!(outcome.complete);
        assert_eq!(outcome.class_count, 1);
        assert!(outcome.reports.is_empty());
    }

    #[test]
    fn search_deterministic_across_jobs_and_chunks() {
        let shape = classify_shape(13);
        let base = SearchTask {
            q: 13,
            k: 2,
            shape,
            filter: MatchFilter::All,
            chunk: None,
            jobs: None,
            checkpoint: None,
        };
        let reference = run_search(&base).unwrap();
        assert!(reference.complete);

        let jobs2 = SearchTask {
            jobs: Some(2),
            ..base.clone()
        };
        assert_eq!(run_search(&jobs2).unwrap().reports, reference.reports);

        // chunked with resume across two invocations
        let dir = std::env::temp_dir().join(format!("lenspec-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let ckpt = dir.join("q13k2.cache");
        let _ = fs::remove_file(&ckpt);
        let total = reference.class_count;
        let first = SearchTask {
            chunk: Some(0..total / 2),
            checkpoint: Some(ckpt.clone()),
            ..base.clone()
        };
        let partial = run_search(&first).unwrap();
        assert!(!partial.complete);
        assert!(partial.reports.is_empty());
        let second = SearchTask {
            chunk: None,
            checkpoint: Some(ckpt.clone()),
            ..base.clone()
        };
        let resumed = run_search(&second).unwrap();
        assert!(resumed.complete);
        assert_eq!(resumed.reports, reference.reports);
        fs::remove_file(&ckpt).unwrap();
    }

    #[test]
    fn checkpoint_mismatch_rejected() {
        let dir = std::env::temp_dir().join(format!("lenspec-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let ckpt = dir.join("mismatch.cache");
        fs::write(&ckpt, "lenspec-cache v1 q=99 k=9 shape=x classes=0 params=0\n").unwrap();
        let task = SearchTask {
            q: 13,
            k: 2,
            shape: classify_shape(13),
            filter: MatchFilter::All,
            chunk: None,
            jobs: None,
            checkpoint: Some(ckpt.clone()),
        };
        let err = run_search(&task).unwrap_err();
        assert!(matches!(err, Error::Cache(_)), "{err}");
        fs::remove_file(&ckpt).unwrap();
    }

    #[test]
    fn checkpoint_corrupt_record_rejected() {
        let shape = classify_shape(13);
        let dir = std::env::temp_dir().join(format!("lenspec-test-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let ckpt = dir.join("corrupt.cache");
        let header = header_line(13, 2, &shape, enumerate_choices(13, 2).unwrap().len());
        fs::write(&ckpt, format!("{header}\n0 1,2 nonsense\n")).unwrap();
        let task = SearchTask {
            q: 13,
            k: 2,
            shape,
            filter: MatchFilter::All,
            chunk: None,
            jobs: None,
            checkpoint: Some(ckpt.clone()),
        };
        let err = run_search(&task).unwrap_err();
        assert!(matches!(err, Error::Cache(_)), "{err}");
        fs::remove_file(&ckpt).unwrap();
    }
}
