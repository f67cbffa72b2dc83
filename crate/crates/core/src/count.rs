//! Closed-form counts: order-3 elements of the symmetric group and the number
//! of triad equivalence classes for any number of alternatives.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::perm::PermError;

pub type BigCount = BigUint;

pub fn factorial(n: usize) -> BigCount {
    (1..=n).fold(BigCount::one(), |acc, k| acc * BigCount::from(k))
}

fn exact_div(num: BigCount, den: &BigCount) -> BigCount {
    let (q, r) = num.div_rem(den);
    assert!(r.is_zero(), "inexact division");
    q
}

/// Number of elements of order 3 in S_n: permutations made of `m >= 1`
/// disjoint 3-cycles and fixed points, summed over `m`.
pub fn order3_count(n: usize) -> BigCount {
    let n_fact = factorial(n);
    (1..=n / 3).fold(BigCount::zero(), |acc, m| {
        let den = factorial(n - 3 * m) * factorial(m) * BigCount::from(3u32).pow(m as u32);
        acc + exact_div(n_fact.clone(), &den)
    })
}

/// Number of triad equivalence classes on `n` alternatives:
/// `(n!(n! + 3) + 2(l_n + 1)) / 6` with `l_n = order3_count(n)`.
pub fn class_count(n: usize) -> Result<BigCount, PermError> {
    if n < 2 {
        return Err(PermError::InvalidSize(n));
    }
    let f = factorial(n);
    let num = &f * (&f + 3u32) + (order3_count(n) + 1u32) * 2u32;
    Ok(exact_div(num, &BigCount::from(6u32)))
}

/// Classes split by the shape of their `(identity, x, y)` representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitCaseCounts {
    /// All three orderings equal.
    pub all_equal: BigCount,
    /// Exactly two orderings equal: `n! - 1`.
    pub one_pair_equal: BigCount,
    /// `(id, s, s^2)` with `s` of order 3: `l_n / 2`.
    pub cyclic: BigCount,
    /// Everything else, six representatives per class.
    pub generic: BigCount,
}

impl OrbitCaseCounts {
    pub fn total(&self) -> BigCount {
        &self.all_equal + &self.one_pair_equal + &self.cyclic + &self.generic
    }
}

pub fn orbit_case_counts(n: usize) -> Result<OrbitCaseCounts, PermError> {
    if n < 2 {
        return Err(PermError::InvalidSize(n));
    }
    let f = factorial(n);
    let l = order3_count(n);
    let one_pair_equal = &f - 1u32;
    let cyclic = exact_div(l.clone(), &BigCount::from(2u32));
    // (n!)^2 - 1 - 3(n! - 1) - l_n
    let generic_members = &f * &f - 1u32 - &one_pair_equal * 3u32 - &l;
    Ok(OrbitCaseCounts {
        all_equal: BigCount::one(),
        one_pair_equal,
        cyclic,
        generic: exact_div(generic_members, &BigCount::from(6u32)),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRow {
    pub n: usize,
    pub factorial: BigCount,
    pub order3: BigCount,
    pub classes: BigCount,
}

/// Rows `n, n!, l_n, class_count(n)` for `n` in `lo..=hi`.
pub fn count_table(lo: usize, hi: usize) -> Result<Vec<CountRow>, PermError> {
    (lo..=hi)
        .map(|n| {
            Ok(CountRow {
                n,
                factorial: factorial(n),
                order3: order3_count(n),
                classes: class_count(n)?,
            })
        })
        .collect()
}

pub fn write_count_csv<W: std::io::Write>(rows: &[CountRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "factorial", "order3_count", "class_count"])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.factorial.to_string(),
            r.order3.to_string(),
            r.classes.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
