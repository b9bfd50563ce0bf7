use std::fmt;

use serde::{Deserialize, Serialize};

use super::OracleError;

/// Largest ground set for which masks are stored as a single machine word.
pub const WORD_LIMIT: usize = 63;

/// The ground set `{0, .., n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self, OracleError> {
        if n == 0 {
            return Err(OracleError::EmptyGroundSet);
        }
        Ok(GroundSet { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn empty_set(&self) -> SubsetMask {
        SubsetMask::empty(self.n)
    }

    pub fn full_set(&self) -> SubsetMask {
        SubsetMask::full(self.n)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Word(u64),
    Sorted(Vec<u32>),
}

/// A subset of `{0, .., n-1}`.
///
/// Ground sets with at most [`WORD_LIMIT`] elements use a single `u64`; larger
/// ground sets keep a sorted list of member indices. The representation is a
/// function of `n` alone, so structural equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MaskRecord", into = "MaskRecord")]
pub struct SubsetMask {
    n: usize,
    repr: Repr,
}

#[derive(Serialize, Deserialize)]
struct MaskRecord {
    n: usize,
    members: Vec<usize>,
}

impl TryFrom<MaskRecord> for SubsetMask {
    type Error = OracleError;

    fn try_from(r: MaskRecord) -> Result<Self, OracleError> {
        SubsetMask::from_indices(r.n, r.members)
    }
}

impl From<SubsetMask> for MaskRecord {
    fn from(s: SubsetMask) -> Self {
        MaskRecord { n: s.n, members: s.to_vec() }
    }
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl SubsetMask {
    pub fn empty(n: usize) -> Self {
        let repr = if n <= WORD_LIMIT {
            Repr::Word(0)
        } else {
            Repr::Sorted(Vec::new())
        };
        SubsetMask { n, repr }
    }

    pub fn full(n: usize) -> Self {
        let repr = if n <= WORD_LIMIT {
            Repr::Word(low_bits(n))
        } else {
            Repr::Sorted((0..n as u32).collect())
        };
        SubsetMask { n, repr }
    }

    pub fn singleton(n: usize, v: usize) -> Result<Self, OracleError> {
        Self::from_indices(n, [v])
    }

    /// Builds a mask from member indices. Duplicates are ignored.
    pub fn from_indices<I>(n: usize, indices: I) -> Result<Self, OracleError>
    where
        I: IntoIterator<Item = usize>,
    {
        if n <= WORD_LIMIT {
            let mut bits = 0u64;
            for v in indices {
                if v >= n {
                    return Err(OracleError::ElementOutOfRange { element: v, n });
                }
                bits |= 1 << v;
            }
            Ok(SubsetMask { n, repr: Repr::Word(bits) })
        } else {
            let mut members = Vec::new();
            for v in indices {
                if v >= n {
                    return Err(OracleError::ElementOutOfRange { element: v, n });
                }
                members.push(v as u32);
            }
            members.sort_unstable();
            members.dedup();
            Ok(SubsetMask { n, repr: Repr::Sorted(members) })
        }
    }

    /// Builds a mask from a bit word (bit `i` set means element `i` is a member).
    pub fn from_word(n: usize, bits: u64) -> Result<Self, OracleError> {
        if n > 64 {
            return Err(OracleError::WordTooNarrow { n });
        }
        if bits & !low_bits(n) != 0 {
            let element = 63 - (bits & !low_bits(n)).leading_zeros() as usize;
            return Err(OracleError::ElementOutOfRange { element, n });
        }
        if n <= WORD_LIMIT {
            Ok(SubsetMask { n, repr: Repr::Word(bits) })
        } else {
            Self::from_indices(n, (0..n).filter(|&i| bits >> i & 1 == 1))
        }
    }

    /// Builds a mask from a membership predicate.
    pub fn from_fn(n: usize, mut member: impl FnMut(usize) -> bool) -> Self {
        if n <= WORD_LIMIT {
            let mut bits = 0u64;
            for i in 0..n {
                if member(i) {
                    bits |= 1 << i;
                }
            }
            SubsetMask { n, repr: Repr::Word(bits) }
        } else {
            let members = (0..n).filter(|&i| member(i)).map(|i| i as u32).collect();
            SubsetMask { n, repr: Repr::Sorted(members) }
        }
    }

    /// Size of the ground set this mask lives in.
    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Word(b) => b.count_ones() as usize,
            Repr::Sorted(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.n
    }

    pub fn as_word(&self) -> Option<u64> {
        match &self.repr {
            Repr::Word(b) => Some(*b),
            Repr::Sorted(_) => None,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        match &self.repr {
            Repr::Word(b) => v < self.n && b >> v & 1 == 1,
            Repr::Sorted(m) => m.binary_search(&(v as u32)).is_ok(),
        }
    }

    pub fn iter(&self) -> Members<'_> {
        match &self.repr {
            Repr::Word(b) => Members::Word(*b),
            Repr::Sorted(m) => Members::Sorted(m.iter()),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn insert(&mut self, v: usize) {
        assert!(v < self.n, "element {v} outside ground set of size {}", self.n);
        match &mut self.repr {
            Repr::Word(b) => *b |= 1 << v,
            Repr::Sorted(m) => {
                if let Err(pos) = m.binary_search(&(v as u32)) {
                    m.insert(pos, v as u32);
                }
            }
        }
    }

    pub fn remove(&mut self, v: usize) {
        match &mut self.repr {
            Repr::Word(b) => {
                if v < 64 {
                    *b &= !(1 << v)
                }
            }
            Repr::Sorted(m) => {
                if let Ok(pos) = m.binary_search(&(v as u32)) {
                    m.remove(pos);
                }
            }
        }
    }

    pub fn with(&self, v: usize) -> Self {
        let mut s = self.clone();
        s.insert(v);
        s
    }

    pub fn without(&self, v: usize) -> Self {
        let mut s = self.clone();
        s.remove(v);
        s
    }

    pub fn complement(&self) -> Self {
        match &self.repr {
            Repr::Word(b) => SubsetMask {
                n: self.n,
                repr: Repr::Word(!b & low_bits(self.n)),
            },
            Repr::Sorted(_) => SubsetMask::from_fn(self.n, |i| !self.contains(i)),
        }
    }

    fn check_same(&self, other: &Self) {
        assert_eq!(
            self.n, other.n,
            "masks over different ground sets ({} vs {})",
            self.n, other.n
        );
    }

    fn merge(&self, other: &Self, keep: impl Fn(bool, bool) -> bool) -> Self {
        self.check_same(other);
        match (&self.repr, &other.repr) {
            (Repr::Word(a), Repr::Word(b)) => {
                let mut bits = 0u64;
                if keep(true, true) {
                    bits |= a & b;
                }
                if keep(true, false) {
                    bits |= a & !b;
                }
                if keep(false, true) {
                    bits |= !a & b & low_bits(self.n);
                }
                SubsetMask { n: self.n, repr: Repr::Word(bits) }
            }
            (Repr::Sorted(a), Repr::Sorted(b)) => {
                let mut out = Vec::with_capacity(a.len().max(b.len()));
                let (mut i, mut j) = (0, 0);
                while i < a.len() || j < b.len() {
                    let x = a.get(i).copied();
                    let y = b.get(j).copied();
                    match (x, y) {
                        (Some(p), Some(q)) if p == q => {
                            if keep(true, true) {
                                out.push(p);
                            }
                            i += 1;
                            j += 1;
                        }
                        (Some(p), Some(q)) if p < q => {
                            if keep(true, false) {
                                out.push(p);
                            }
                            i += 1;
                        }
                        (Some(p), None) => {
                            if keep(true, false) {
                                out.push(p);
                            }
                            i += 1;
                        }
                        (_, Some(q)) => {
                            if keep(false, true) {
                                out.push(q);
                            }
                            j += 1;
                        }
                        (None, None) => unreachable!(),
                    }
                }
                SubsetMask { n: self.n, repr: Repr::Sorted(out) }
            }
            _ => unreachable!("representation is determined by n"),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.merge(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.merge(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.merge(other, |a, b| a && !b)
    }

    /// `|self ∩ other|` without allocating.
    pub fn intersection_len(&self, other: &Self) -> usize {
        self.check_same(other);
        match (&self.repr, &other.repr) {
            (Repr::Word(a), Repr::Word(b)) => (a & b).count_ones() as usize,
            (Repr::Sorted(a), Repr::Sorted(b)) => {
                let (mut i, mut j, mut c) = (0, 0, 0);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            c += 1;
                            i += 1;
                            j += 1;
                        }
                    }
                }
                c
            }
            _ => unreachable!("representation is determined by n"),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.intersection_len(other) == self.len()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection_len(other) == 0
    }

    /// Sum of `weights[v]` over members `v`.
    pub fn weight(&self, weights: &[f64]) -> f64 {
        self.iter().map(|v| weights[v]).sum()
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, v) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}/{}", self.n)
    }
}

pub enum Members<'a> {
    Word(u64),
    Sorted(std::slice::Iter<'a, u32>),
}

impl Iterator for Members<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        match self {
            Members::Word(b) => {
                if *b == 0 {
                    None
                } else {
                    let v = b.trailing_zeros() as usize;
                    *b &= *b - 1;
                    Some(v)
                }
            }
            Members::Sorted(it) => it.next().map(|&v| v as usize),
        }
    }
}
