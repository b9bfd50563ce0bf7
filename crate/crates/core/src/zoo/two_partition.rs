use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{invalid, random_subset, ZooError};
use crate::oracle::{OracleFlags, SetFunction, SubsetMask, DEFAULT_TOLERANCE};

/// A two-partition ("2P") function: `f(S) = F[|S ∩ R|][|S \ R|]` for a fixed
/// set `R` with `|R| = K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRecord", into = "TableRecord")]
pub struct TwoPartitionTable {
    hidden: SubsetMask,
    k_size: usize,
    l_size: usize,
    grid: Vec<f64>,
    monotone: bool,
}

#[derive(Serialize, Deserialize)]
struct TableRecord {
    n: usize,
    hidden: Vec<usize>,
    grid: Vec<Vec<f64>>,
}

impl TryFrom<TableRecord> for TwoPartitionTable {
    type Error = ZooError;

    fn try_from(r: TableRecord) -> Result<Self, ZooError> {
        let hidden = SubsetMask::from_indices(r.n, r.hidden)?;
        TwoPartitionTable::from_grid(hidden, r.grid)
    }
}

impl From<TwoPartitionTable> for TableRecord {
    fn from(t: TwoPartitionTable) -> Self {
        TableRecord {
            n: t.hidden.universe(),
            hidden: t.hidden.to_vec(),
            grid: t.rows(),
        }
    }
}

impl TwoPartitionTable {
    /// Fills the grid from `gen(k, l)` and validates it.
    pub fn from_fn(
        hidden: SubsetMask,
        gen: impl Fn(usize, usize) -> f64,
    ) -> Result<Self, ZooError> {
        let k_size = hidden.len();
        let l_size = hidden.universe() - k_size;
        let rows = (0..=k_size)
            .map(|k| (0..=l_size).map(|l| gen(k, l)).collect())
            .collect();
        Self::from_grid(hidden, rows)
    }

    /// Table over `n` elements with `R = {0, .., k-1}`.
    pub fn from_closed_form(
        n: usize,
        k: usize,
        gen: impl Fn(usize, usize) -> f64,
    ) -> Result<Self, ZooError> {
        if n == 0 || k > n {
            return Err(invalid("two_partition", format!("need 0 <= K <= n and n >= 1, got K={k}, n={n}")));
        }
        let hidden = SubsetMask::from_indices(n, 0..k)?;
        Self::from_fn(hidden, gen)
    }

    pub fn from_grid(hidden: SubsetMask, rows: Vec<Vec<f64>>) -> Result<Self, ZooError> {
        let k_size = hidden.len();
        let l_size = hidden.universe() - k_size;
        if rows.len() != k_size + 1 || rows.iter().any(|r| r.len() != l_size + 1) {
            return Err(invalid(
                "two_partition",
                format!("grid must be {}x{} for |R| = {k_size}", k_size + 1, l_size + 1),
            ));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(invalid("two_partition", "grid values must be finite"));
        }
        let grid = rows.into_iter().flatten().collect();
        let mut table = TwoPartitionTable { hidden, k_size, l_size, grid, monotone: false };
        table.validate(DEFAULT_TOLERANCE)?;
        table.monotone = table.first_differences_nonnegative(DEFAULT_TOLERANCE);
        Ok(table)
    }

    pub fn hidden(&self) -> &SubsetMask {
        &self.hidden
    }

    /// `K = |R|`.
    pub fn k_size(&self) -> usize {
        self.k_size
    }

    /// `L = n - K`.
    pub fn l_size(&self) -> usize {
        self.l_size
    }

    pub fn cell(&self, k: usize, l: usize) -> f64 {
        self.grid[k * (self.l_size + 1) + l]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.grid.chunks(self.l_size + 1).map(<[f64]>::to_vec).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// A set with exactly `k` members in `R` and `l` outside it: the `k`
    /// smallest members of `R` plus the `l` smallest non-members.
    pub fn representative(&self, k: usize, l: usize) -> SubsetMask {
        assert!(k <= self.k_size && l <= self.l_size);
        representative(&self.hidden, k, l)
    }

    /// Position of `S` in the grid.
    pub fn coordinates(&self, s: &SubsetMask) -> (usize, usize) {
        let k = s.intersection_len(&self.hidden);
        (k, s.len() - k)
    }

    fn dk(&self, k: usize, l: usize) -> f64 {
        self.cell(k + 1, l) - self.cell(k, l)
    }

    fn dl(&self, k: usize, l: usize) -> f64 {
        self.cell(k, l + 1) - self.cell(k, l)
    }

    /// Discrete submodularity on the grid: both first differences are
    /// nonincreasing in both coordinates.
    fn validate(&self, tol: f64) -> Result<(), ZooError> {
        let (kk, ll) = (self.k_size, self.l_size);
        for k in 0..=kk {
            for l in 0..=ll {
                if k + 2 <= kk && self.dk(k + 1, l) > self.dk(k, l) + tol {
                    return Err(ZooError::NotSubmodular { k, l, condition: "R-difference increases in k" });
                }
                if k < kk && l < ll && self.dk(k, l + 1) > self.dk(k, l) + tol {
                    return Err(ZooError::NotSubmodular { k, l, condition: "R-difference increases in l" });
                }
                if l + 2 <= ll && self.dl(k, l + 1) > self.dl(k, l) + tol {
                    return Err(ZooError::NotSubmodular { k, l, condition: "complement-difference increases in l" });
                }
            }
        }
        Ok(())
    }

    fn first_differences_nonnegative(&self, tol: f64) -> bool {
        (0..=self.k_size).all(|k| {
            (0..=self.l_size).all(|l| {
                (k == self.k_size || self.dk(k, l) >= -tol) && (l == self.l_size || self.dl(k, l) >= -tol)
            })
        })
    }
}

pub(crate) fn representative(hidden: &SubsetMask, k: usize, l: usize) -> SubsetMask {
    let n = hidden.universe();
    let inside = hidden.iter().take(k);
    let outside = (0..n).filter(|&v| !hidden.contains(v)).take(l);
    SubsetMask::from_indices(n, inside.chain(outside)).expect("indices are in range")
}

impl SetFunction for TwoPartitionTable {
    fn ground_size(&self) -> usize {
        self.hidden.universe()
    }

    fn value(&self, s: &SubsetMask) -> f64 {
        let (k, l) = self.coordinates(s);
        self.cell(k, l)
    }

    fn flags(&self) -> OracleFlags {
        let nonnegative = self.grid.iter().all(|&v| v >= 0.0);
        OracleFlags { monotone: self.monotone, symmetric: false, nonnegative }
    }
}

/// A random monotone submodular 2P function on `n` elements with a random
/// hidden set.
///
/// The grid is a nonnegative combination of concave nondecreasing functions of
/// `k`, `l`, `k + l` and one skewed linear form, each of which is submodular
/// on the grid. About one draw in eight depends on `|S|` only.
pub fn random_monotone_table<R: Rng + ?Sized>(n: usize, rng: &mut R) -> TwoPartitionTable {
    let k = rng.gen_range(1..n.max(2));
    let hidden = random_subset(rng, n, k.min(n));
    let size_only = rng.gen_ratio(1, 8);
    let mut coef = |lo: f64, hi: f64| (rng.gen_range(lo..hi) * 4.0).round() / 4.0;
    let (a, b, c, d) = if size_only {
        (0.0, 0.0, coef(0.5, 3.0), 0.0)
    } else {
        (coef(0.0, 3.0), coef(0.0, 3.0), coef(0.0, 2.0), coef(0.0, 2.0))
    };
    let cap_k = rng.gen_range(1..=n) as f64;
    let cap_l = rng.gen_range(1..=n) as f64;
    let cap_s = rng.gen_range(1..=n) as f64;
    let cap_mix = rng.gen_range(1..=2 * n) as f64;
    let skew = rng.gen_range(1..=3) as f64;
    let gen = move |k: usize, l: usize| {
        let (kf, lf) = (k as f64, l as f64);
        a * kf.min(cap_k)
            + b * lf.min(cap_l)
            + c * (kf + lf).min(cap_s)
            + d * (skew * kf + lf).min(cap_mix)
    };
    TwoPartitionTable::from_fn(hidden, gen).expect("concave compositions are submodular")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn min_k_one_plus_l_is_monotone_submodular() {
        let t = TwoPartitionTable::from_closed_form(4, 2, |k, l| k.min(1) as f64 + l as f64).unwrap();
        assert!(t.is_monotone());
        assert_eq!(t.rows(), vec![vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0], vec![1.0, 2.0, 3.0]]);
    }

    #[test]
    fn product_grid_is_rejected_at_origin() {
        let err = TwoPartitionTable::from_closed_form(4, 2, |k, l| (k * l) as f64).unwrap_err();
        assert!(matches!(err, ZooError::NotSubmodular { k: 0, l: 0, .. }), "{err}");
    }

    #[test]
    fn zero_grid_is_valid() {
        let t = TwoPartitionTable::from_closed_form(5, 3, |_, _| 0.0).unwrap();
        assert!(t.is_monotone());
        assert_eq!(t.value(&SubsetMask::full(5)), 0.0);
    }

    #[test]
    fn representative_sets_hit_their_cell() {
        let hidden = SubsetMask::from_indices(7, [1, 4, 6]).unwrap();
        let t = TwoPartitionTable::from_fn(hidden, |k, l| (k + l) as f64).unwrap();
        for k in 0..=3 {
            for l in 0..=4 {
                assert_eq!(t.coordinates(&t.representative(k, l)), (k, l));
            }
        }
    }

    #[test]
    fn random_tables_validate_and_serialize() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let t = random_monotone_table(10, &mut rng);
            assert!(t.is_monotone());
            let json = serde_json::to_string(&t).unwrap();
            let back: TwoPartitionTable = serde_json::from_str(&json).unwrap();
            assert_eq!(back, t);
        }
    }

    #[test]
    fn malformed_grid_is_reported() {
        let hidden = SubsetMask::from_indices(3, [0]).unwrap();
        assert!(TwoPartitionTable::from_grid(hidden, vec![vec![0.0; 3]]).is_err());
    }
}
