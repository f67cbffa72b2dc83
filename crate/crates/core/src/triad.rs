//! Preference triads, their canonical form under node and alternative
//! relabeling, and the equivalence classes that canonical form induces.
//!
//! Two triads are equivalent when one becomes the other after permuting the
//! three nodes and applying one common relabeling of alternatives to all three
//! orderings. Every orbit contains triads whose first ordering is the
//! identity; the canonical form is the lexicographically smallest of those.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::sync::LazyLock;

use thiserror::Error;

use crate::perm::{kendall_tau_distance, AlternativeAlphabet, PermError, Permutation};

/// Class identifier. For three alternatives classes are numbered 1..=10 in
/// the standard table order; for other sizes by ascending canonical form.
pub type ClassId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriadError {
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error("triad orderings must share one size, got {0:?}")]
    MixedSizes([usize; 3]),
    #[error("operation supports only 3 alternatives, got {0}; use canonicalize or enumerate_classes for other sizes")]
    UnsupportedSize(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("enumeration budget exhausted after {processed} of {total} pairs ({classes_found} classes found so far)")]
    ResourceLimit {
        processed: u64,
        total: u64,
        classes_found: usize,
    },
}

/// One ordering per node of a triangle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PreferenceTriad {
    orderings: [Permutation; 3],
}

impl PreferenceTriad {
    pub fn new(a: Permutation, b: Permutation, c: Permutation) -> Result<Self, TriadError> {
        let sizes = [a.len(), b.len(), c.len()];
        if sizes[0] != sizes[1] || sizes[1] != sizes[2] {
            return Err(TriadError::MixedSizes(sizes));
        }
        Ok(Self {
            orderings: [a, b, c],
        })
    }

    /// Parses three orderings with the default single-letter alphabet.
    pub fn parse(a: &str, b: &str, c: &str) -> Result<Self, TriadError> {
        Self::new(
            crate::perm::parse_ordering(a)?,
            crate::perm::parse_ordering(b)?,
            crate::perm::parse_ordering(c)?,
        )
    }

    pub fn alternatives(&self) -> usize {
        self.orderings[0].len()
    }

    pub fn orderings(&self) -> &[Permutation; 3] {
        &self.orderings
    }

    /// Moves the ordering of node `i` to position `node_map[i]` and relabels
    /// every ordering with `relabel`.
    pub fn transform(
        &self,
        node_map: [usize; 3],
        relabel: &Permutation,
    ) -> Result<Self, TriadError> {
        let mut sorted = node_map;
        sorted.sort_unstable();
        if sorted != [0, 1, 2] {
            return Err(TriadError::InvalidArgument(format!(
                "node map {node_map:?} is not a permutation of the three nodes"
            )));
        }
        let mut slots: [Option<Permutation>; 3] = [None, None, None];
        for (i, o) in self.orderings.iter().enumerate() {
            slots[node_map[i]] = Some(relabel.compose(o)?);
        }
        let [a, b, c] = slots.map(Option::unwrap);
        Ok(Self {
            orderings: [a, b, c],
        })
    }

    /// Every triad reachable through the 6 node permutations and the n!
    /// relabelings, without duplicates.
    pub fn orbit(&self) -> Result<Vec<PreferenceTriad>, TriadError> {
        let mut out = std::collections::BTreeSet::new();
        for relabel in Permutation::all(self.alternatives())? {
            for node_map in NODE_PERMUTATIONS {
                out.insert(self.transform(node_map, &relabel)?);
            }
        }
        Ok(out.into_iter().collect())
    }

    pub fn format(&self, alphabet: &AlternativeAlphabet) -> String {
        self.orderings
            .iter()
            .map(|o| alphabet.format(o))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for PreferenceTriad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.orderings;
        write!(f, "({a}, {b}, {c})")
    }
}

pub const NODE_PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// The orbit representative returned by [`canonicalize`]: first ordering is
/// the identity and the triad is lexicographically minimal among such members.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalTriad(PreferenceTriad);

impl CanonicalTriad {
    pub fn triad(&self) -> &PreferenceTriad {
        &self.0
    }

    pub fn into_triad(self) -> PreferenceTriad {
        self.0
    }
}

impl fmt::Display for CanonicalTriad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Relabels each node's ordering to the identity in turn and keeps the
/// smallest of the six resulting `(identity, x, y)` candidates.
pub fn canonicalize(t: &PreferenceTriad) -> CanonicalTriad {
    let [a, b, c] = &t.orderings;
    let mut best: Option<(Permutation, Permutation)> = None;
    for (base, x, y) in [(a, b, c), (b, a, c), (c, a, b)] {
        let to_identity = base.inverse();
        let x = to_identity.compose_unchecked(x);
        let y = to_identity.compose_unchecked(y);
        let candidate = if x <= y { (x, y) } else { (y, x) };
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
    }
    let (x, y) = best.unwrap();
    let identity = Permutation::identity(x.len()).unwrap();
    CanonicalTriad(PreferenceTriad {
        orderings: [identity, x, y],
    })
}

/// Class membership by case number (1..=36) for three alternatives.
///
/// Case `6*(i-1)+j` is the triad `(ABC, s_i, s_j)` where `s_1..s_6` are the
/// orderings in lexicographic order.
pub const CLASS_CASES_3: [&[usize]; 10] = [
    &[1],
    &[2, 7, 8],
    &[9, 11, 14, 16, 21, 26],
    &[10, 12, 20, 30, 32, 35],
    &[3, 13, 15],
    &[17, 18, 24, 27, 33, 34],
    &[4, 19, 29],
    &[5, 22, 25],
    &[6, 31, 36],
    &[23, 28],
];

/// Orbit sizes among the 36 triads with first ordering ABC, for classes 1..=10.
pub const ORBIT_SIZES_36: [u64; 10] = [1, 3, 6, 6, 3, 6, 3, 3, 3, 2];

/// Case number (1..=36) of a 3-alternative triad whose first ordering is ABC.
pub fn case_number(t: &PreferenceTriad) -> Result<usize, TriadError> {
    if t.alternatives() != 3 {
        return Err(TriadError::UnsupportedSize(t.alternatives()));
    }
    if !t.orderings[0].is_identity() {
        return Err(TriadError::InvalidArgument(format!(
            "case numbers need the first ordering to be ABC, got {}",
            t.orderings[0]
        )));
    }
    Ok(6 * t.orderings[1].lex_index() + t.orderings[2].lex_index() + 1)
}

/// The triad `(ABC, s_i, s_j)` for a case number.
pub fn case_triad(case: usize) -> Result<PreferenceTriad, TriadError> {
    if !(1..=36).contains(&case) {
        return Err(TriadError::InvalidArgument(format!(
            "case number {case} is outside 1..=36"
        )));
    }
    let i = (case - 1) / 6;
    let j = (case - 1) % 6;
    PreferenceTriad::new(
        Permutation::identity(3)?,
        Permutation::from_lex_index(3, i)?,
        Permutation::from_lex_index(3, j)?,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassEntry {
    pub id: ClassId,
    pub canonical: CanonicalTriad,
    /// Triads `(identity, x, y)` in the class.
    pub fixed_first_size: u64,
    /// Triads in the class among all `(n!)^3`.
    pub full_size: u64,
}

/// Canonical forms and orbit sizes of every class for one alternative count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTable {
    n: usize,
    entries: Vec<ClassEntry>,
    by_canonical: HashMap<CanonicalTriad, usize>,
}

impl ClassTable {
    fn from_entries(n: usize, entries: Vec<ClassEntry>) -> Self {
        let by_canonical = entries
            .iter()
            .enumerate()
            .map(|(i, e)| (e.canonical.clone(), i))
            .collect();
        Self {
            n,
            entries,
            by_canonical,
        }
    }

    /// The hardcoded table for three alternatives.
    pub fn three() -> &'static ClassTable {
        &CLASS_TABLE_3
    }

    pub fn alternatives(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[ClassEntry] {
        &self.entries
    }

    pub fn get(&self, id: ClassId) -> Option<&ClassEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn lookup(&self, canonical: &CanonicalTriad) -> Option<ClassId> {
        self.by_canonical
            .get(canonical)
            .map(|&i| self.entries[i].id)
    }

    pub fn classify(&self, t: &PreferenceTriad) -> Option<ClassId> {
        self.lookup(&canonicalize(t))
    }

    /// CSV with columns `class_id, canonical_triad, orbit_size_<(n!)^2>,
    /// orbit_size_<(n!)^3>`, i.e. `orbit_size_36, orbit_size_216` for n = 3.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let fact: u64 = (1..=self.n as u64).product();
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "class_id".to_string(),
            "canonical_triad".to_string(),
            format!("orbit_size_{}", fact * fact),
            format!("orbit_size_{}", fact * fact * fact),
        ])?;
        let alphabet = AlternativeAlphabet::default_for(self.n);
        for e in &self.entries {
            let canonical = e
                .canonical
                .triad()
                .orderings()
                .iter()
                .map(|o| alphabet.format(o))
                .collect::<Vec<_>>()
                .join(">");
            w.write_record([
                e.id.to_string(),
                canonical,
                e.fixed_first_size.to_string(),
                e.full_size.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

static CLASS_TABLE_3: LazyLock<ClassTable> = LazyLock::new(|| {
    let entries = CLASS_CASES_3
        .iter()
        .enumerate()
        .map(|(i, cases)| ClassEntry {
            id: i + 1,
            canonical: canonicalize(&case_triad(cases[0]).unwrap()),
            fixed_first_size: cases.len() as u64,
            full_size: 6 * cases.len() as u64,
        })
        .collect();
    ClassTable::from_entries(3, entries)
});

/// Class id for each of the 216 triads on three alternatives, indexed by
/// `36*a + 6*b + c` over the lexicographic indices of the three orderings.
static CLASS_BY_INDEX_3: LazyLock<[u8; 216]> = LazyLock::new(|| {
    let table = ClassTable::three();
    let mut out = [0u8; 216];
    for (k, slot) in out.iter_mut().enumerate() {
        let t = PreferenceTriad {
            orderings: [k / 36, (k / 6) % 6, k % 6]
                .map(|i| Permutation::from_lex_index(3, i).unwrap()),
        };
        *slot = table.classify(&t).expect("every triad has a class") as u8;
    }
    out
});

/// Class (1..=10) of a three-alternative triad.
pub fn classify3(t: &PreferenceTriad) -> Result<ClassId, TriadError> {
    if t.alternatives() != 3 {
        return Err(TriadError::UnsupportedSize(t.alternatives()));
    }
    let [a, b, c] = &t.orderings;
    Ok(classify3_by_index(
        a.lex_index(),
        b.lex_index(),
        c.lex_index(),
    ))
}

/// Table lookup for orderings given by lexicographic index in `0..6`.
///
/// # Panics
/// If an index is not below 6.
pub fn classify3_by_index(a: usize, b: usize, c: usize) -> ClassId {
    assert!(a < 6 && b < 6 && c < 6, "ordering index out of range");
    CLASS_BY_INDEX_3[36 * a + 6 * b + c] as ClassId
}

/// Brute-force class enumeration over all `(identity, x, y)`.
///
/// `budget` caps the number of `(x, y)` pairs examined.
pub fn enumerate_classes(n: usize, budget: Option<u64>) -> Result<ClassTable, TriadError> {
    let fact = (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k));
    let identity = Permutation::identity(n)?;
    let total = fact.and_then(|f| f.checked_mul(f)).unwrap_or(u64::MAX);
    let mut counts: BTreeMap<CanonicalTriad, u64> = BTreeMap::new();
    let mut processed = 0u64;
    for x in Permutation::all(n)? {
        for y in Permutation::all(n)? {
            if budget.is_some_and(|b| processed >= b) {
                return Err(TriadError::ResourceLimit {
                    processed,
                    total,
                    classes_found: counts.len(),
                });
            }
            let t = PreferenceTriad {
                orderings: [identity.clone(), x.clone(), y],
            };
            *counts.entry(canonicalize(&t)).or_default() += 1;
            processed += 1;
        }
    }
    let fact = fact.expect("enumeration finished, so n! fits");
    let mut entries: Vec<ClassEntry> = counts
        .into_iter()
        .enumerate()
        .map(|(i, (canonical, size))| ClassEntry {
            id: i + 1,
            canonical,
            fixed_first_size: size,
            full_size: size * fact,
        })
        .collect();
    if n == 3 {
        let reference = ClassTable::three();
        for e in &mut entries {
            e.id = reference
                .lookup(&e.canonical)
                .expect("enumerated canonical form missing from the n = 3 table");
        }
        entries.sort_by_key(|e| e.id);
    }
    Ok(ClassTable::from_entries(n, entries))
}

/// Relabeling-invariant summary of a triad.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct ClassDescriptor {
    /// Node pairs with equal orderings: 0, 1 or 3.
    pub identical_pairs: u8,
    /// Size of the largest group of nodes sharing a top choice.
    pub shared_top: u8,
    /// The three pairwise Kendall tau distances, ascending.
    pub pairwise_distances: [u64; 3],
}

pub fn describe_class(t: &PreferenceTriad) -> ClassDescriptor {
    let o = &t.orderings;
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let identical_pairs = pairs.iter().filter(|&&(i, j)| o[i] == o[j]).count() as u8;
    let tops = [o[0].word()[0], o[1].word()[0], o[2].word()[0]];
    let shared_top = tops
        .iter()
        .map(|t| tops.iter().filter(|&u| u == t).count())
        .max()
        .unwrap() as u8;
    let mut pairwise_distances =
        pairs.map(|(i, j)| kendall_tau_distance(&o[i], &o[j]).expect("triad sizes agree"));
    pairwise_distances.sort_unstable();
    ClassDescriptor {
        identical_pairs,
        shared_top,
        pairwise_distances,
    }
}
