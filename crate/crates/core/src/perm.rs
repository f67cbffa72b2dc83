//! Permutations of `n` alternatives.
//!
//! A [`Permutation`] is stored as a word of alternative indices. Read as a
//! preference ordering, `word[k]` is the alternative at rank `k` (rank 0 is the
//! most preferred). Read as a relabeling map, `word[k]` is the image of
//! alternative `k`. Relabeling an ordering `s` with a map `t` is the left
//! composition `t.compose(&s)`: every letter of the word is replaced by its image.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("permutations need at least 2 alternatives, got {0}")]
    InvalidSize(usize),
    #[error("size mismatch: {left} vs {right} alternatives")]
    IncompatibleSize { left: usize, right: usize },
    #[error("word is not a permutation of 0..{n}: {reason}")]
    NotAPermutation { n: usize, reason: String },
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("missing label `{0}`")]
    MissingLabel(String),
    #[error("a restriction must keep at least 2 alternatives, got {0}")]
    InvalidSubset(usize),
    #[error("alternative {index} is out of range for {n} alternatives")]
    OutOfRange { index: usize, n: usize },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
}

/// A bijection on `0..n`, `n >= 2`.
///
/// `Ord` compares words lexicographically, so for three alternatives the
/// orderings sort as ABC < ACB < BAC < BCA < CAB < CBA.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    word: Vec<usize>,
}

impl Permutation {
    pub fn new(word: Vec<usize>) -> Result<Self, PermError> {
        let n = word.len();
        if n < 2 {
            return Err(PermError::InvalidSize(n));
        }
        let mut seen = vec![false; n];
        for &x in &word {
            if x >= n {
                return Err(PermError::NotAPermutation {
                    n,
                    reason: format!("entry {x} out of range"),
                });
            }
            if std::mem::replace(&mut seen[x], true) {
                return Err(PermError::NotAPermutation {
                    n,
                    reason: format!("entry {x} repeated"),
                });
            }
        }
        Ok(Self { word })
    }

    pub fn identity(n: usize) -> Result<Self, PermError> {
        if n < 2 {
            return Err(PermError::InvalidSize(n));
        }
        Ok(Self {
            word: (0..n).collect(),
        })
    }

    /// Number of alternatives.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn into_word(self) -> Vec<usize> {
        self.word
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().enumerate().all(|(k, &x)| k == x)
    }

    /// `self ∘ inner`, i.e. `result[k] = self[inner[k]]`.
    pub fn compose(&self, inner: &Permutation) -> Result<Permutation, PermError> {
        if self.len() != inner.len() {
            return Err(PermError::IncompatibleSize {
                left: self.len(),
                right: inner.len(),
            });
        }
        Ok(self.compose_unchecked(inner))
    }

    pub(crate) fn compose_unchecked(&self, inner: &Permutation) -> Permutation {
        debug_assert_eq!(self.len(), inner.len());
        Permutation {
            word: inner.word.iter().map(|&k| self.word[k]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut word = vec![0; self.len()];
        for (k, &x) in self.word.iter().enumerate() {
            word[x] = k;
        }
        Permutation { word }
    }

    /// `self` composed with itself `k` times; `pow(0)` is the identity.
    pub fn pow(&self, k: u32) -> Permutation {
        let mut acc = Permutation {
            word: (0..self.len()).collect(),
        };
        for _ in 0..k {
            acc = self.compose_unchecked(&acc);
        }
        acc
    }

    /// Disjoint cycles, each starting at its smallest element, fixed points included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.word[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Order of the permutation in the symmetric group: the lcm of its cycle lengths.
    pub fn order(&self) -> BigUint {
        self.cycles().iter().fold(BigUint::from(1u32), |acc, c| {
            acc.lcm(&BigUint::from(c.len()))
        })
    }

    /// Rank (0-based) at which `alternative` appears when read as an ordering.
    pub fn position_of(&self, alternative: usize) -> Option<usize> {
        self.word.iter().position(|&x| x == alternative)
    }

    /// Keeps only the alternatives in `keep`, preserving their relative order,
    /// and re-indexes them `0..keep.len()` by ascending original index.
    pub fn restrict(&self, keep: &[usize]) -> Result<Permutation, PermError> {
        let n = self.len();
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() < 2 {
            return Err(PermError::InvalidSubset(sorted.len()));
        }
        if let Some(&bad) = sorted.iter().find(|&&x| x >= n) {
            return Err(PermError::OutOfRange { index: bad, n });
        }
        let mut new_index = vec![usize::MAX; n];
        for (i, &x) in sorted.iter().enumerate() {
            new_index[x] = i;
        }
        let word = self
            .word
            .iter()
            .filter_map(|&x| (new_index[x] != usize::MAX).then_some(new_index[x]))
            .collect();
        Ok(Permutation { word })
    }

    /// Position of this word in the lexicographic listing of all `n!` words.
    ///
    /// Only meaningful while `n!` fits in a `usize` (n <= 20 on 64-bit targets).
    pub fn lex_index(&self) -> usize {
        let n = self.len();
        let mut index = 0usize;
        for i in 0..n {
            let smaller_later = self.word[i + 1..]
                .iter()
                .filter(|&&x| x < self.word[i])
                .count();
            index = index * (n - i) + smaller_later;
        }
        index
    }

    /// Inverse of [`Permutation::lex_index`].
    pub fn from_lex_index(n: usize, mut index: usize) -> Result<Permutation, PermError> {
        if n < 2 {
            return Err(PermError::InvalidSize(n));
        }
        let mut digits = vec![0usize; n];
        for radix in 1..=n {
            digits[n - radix] = index % radix;
            index /= radix;
        }
        if index != 0 {
            return Err(PermError::OutOfRange { index, n });
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let word = digits.into_iter().map(|d| pool.remove(d)).collect();
        Ok(Permutation { word })
    }

    /// Rearranges the word into its lexicographic successor; returns `false`
    /// (leaving the word sorted descending) when it is already the last one.
    fn advance(&mut self) -> bool {
        let w = &mut self.word;
        let Some(i) = (0..w.len() - 1).rev().find(|&i| w[i] < w[i + 1]) else {
            return false;
        };
        let j = (i + 1..w.len()).rev().find(|&j| w[j] > w[i]).unwrap();
        w.swap(i, j);
        w[i + 1..].reverse();
        true
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> Result<AllPermutations, PermError> {
        Ok(AllPermutations {
            next: Some(Permutation::identity(n)?),
        })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphabet = AlternativeAlphabet::default_for(self.len());
        f.write_str(&alphabet.format(self))
    }
}

/// Lexicographic iterator over a symmetric group, see [`Permutation::all`].
#[derive(Debug, Clone)]
pub struct AllPermutations {
    next: Option<Permutation>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if succ.advance() {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Kendall tau distance: the number of alternative pairs the two orderings rank
/// in opposite order.
pub fn kendall_tau_distance(a: &Permutation, b: &Permutation) -> Result<u64, PermError> {
    if a.len() != b.len() {
        return Err(PermError::IncompatibleSize {
            left: a.len(),
            right: b.len(),
        });
    }
    // Rewrite b in a's rank coordinates and count inversions.
    let mut rank_in_a = vec![0; a.len()];
    for (r, &x) in a.word.iter().enumerate() {
        rank_in_a[x] = r;
    }
    let seq: Vec<usize> = b.word.iter().map(|&x| rank_in_a[x]).collect();
    let mut inversions = 0u64;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    Ok(inversions)
}

/// Display names for the alternatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlternativeAlphabet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl AlternativeAlphabet {
    pub fn new<I, S>(labels: I) -> Result<Self, PermError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 {
            return Err(PermError::InvalidSize(labels.len()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.trim().is_empty() {
                return Err(PermError::InvalidAlphabet("empty label".into()));
            }
            if label.contains('>') {
                return Err(PermError::InvalidAlphabet(format!(
                    "label `{label}` contains the separator `>`"
                )));
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(PermError::DuplicateLabel(label.clone()));
            }
        }
        Ok(Self { labels, index })
    }

    /// "A", "B", ..., "Z", then "AA", "AB", ... for larger `n`.
    pub fn default_for(n: usize) -> Self {
        let labels: Vec<String> = (0..n).map(spreadsheet_label).collect();
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        Self { labels, index }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    fn single_char(&self) -> bool {
        self.labels.iter().all(|l| l.chars().count() == 1)
    }

    /// Parses either a `>`-separated list of labels or, for single-character
    /// alphabets, a plain concatenation such as `"ACB"`.
    pub fn parse(&self, text: &str) -> Result<Permutation, PermError> {
        let text = text.trim();
        let tokens: Vec<String> = if text.contains('>') {
            text.split('>').map(|t| t.trim().to_string()).collect()
        } else if self.single_char() {
            text.chars()
                .filter(|c| !c.is_whitespace())
                .map(String::from)
                .collect()
        } else {
            vec![text.to_string()]
        };
        let n = self.len();
        let mut seen = vec![false; n];
        let mut word = Vec::with_capacity(n);
        for token in tokens {
            let i = self
                .index_of(&token)
                .ok_or_else(|| PermError::UnknownLabel(token.clone()))?;
            if std::mem::replace(&mut seen[i], true) {
                return Err(PermError::DuplicateLabel(token));
            }
            word.push(i);
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(PermError::MissingLabel(self.labels[missing].clone()));
        }
        Permutation::new(word)
    }

    /// Concatenated labels for single-character alphabets, `>`-joined otherwise.
    pub fn format(&self, p: &Permutation) -> String {
        if self.single_char() {
            self.format_with(p, "")
        } else {
            self.format_with(p, ">")
        }
    }

    pub fn format_with(&self, p: &Permutation, separator: &str) -> String {
        p.word()
            .iter()
            .map(|&i| self.labels[i].as_str())
            .collect::<Vec<_>>()
            .join(separator)
    }

    /// The sub-alphabet for `keep`, in ascending index order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self, PermError> {
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if let Some(&bad) = sorted.iter().find(|&&x| x >= self.len()) {
            return Err(PermError::OutOfRange {
                index: bad,
                n: self.len(),
            });
        }
        Self::new(sorted.iter().map(|&i| self.labels[i].clone()))
    }
}

fn spreadsheet_label(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

/// Parses an ordering with the default single-letter alphabet of matching size.
pub fn parse_ordering(text: &str) -> Result<Permutation, PermError> {
    let n = if text.contains('>') {
        text.split('>').count()
    } else {
        text.chars().filter(|c| !c.is_whitespace()).count()
    };
    AlternativeAlphabet::default_for(n).parse(text)
}
