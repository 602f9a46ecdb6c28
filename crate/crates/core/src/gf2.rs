//! Bit-exact linear algebra over GF(2) on small dense matrices.
//!
//! Rows are packed into single `u64` words, so matrices are limited to 64
//! columns. Every matrix this crate ranks is guarded well below that bound
//! (the brute-force sweep alone caps the dimension around two dozen).

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("row index {index} out of range for matrix with {n_rows} rows")]
    RowOutOfRange { index: usize, n_rows: usize },
    #[error("matrix has {n_rows} rows, exceeding the subset-sweep guard of {limit}")]
    SizeGuardExceeded { n_rows: usize, limit: usize },
}

/// Dense 0/1 matrix with rows packed into `u64` words.
///
/// Bit `c` of `rows[r]` is the entry in row `r`, column `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    n_rows: usize,
    n_cols: usize,
    rows: Vec<u64>,
}

impl Gf2Matrix {
    /// All-zero matrix. Panics if `n_cols > 64`.
    pub fn zero(n_rows: usize, n_cols: usize) -> Self {
        assert!(n_cols <= 64, "Gf2Matrix supports at most 64 columns");
        Gf2Matrix {
            n_rows,
            n_cols,
            rows: vec![0; n_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Gf2Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows written as strings of `0`/`1` characters.
    ///
    /// All rows must have equal length. Intended for tests and fixtures.
    pub fn from_bit_rows(rows: &[&str]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.len());
        let mut m = Gf2Matrix::zero(rows.len(), n_cols);
        for (r, text) in rows.iter().enumerate() {
            assert_eq!(text.len(), n_cols, "jagged bit rows");
            for (c, ch) in text.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => m.set(r, c, true),
                    _ => panic!("invalid bit character {ch:?}"),
                }
            }
        }
        m
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.n_rows && c < self.n_cols);
        (self.rows[r] >> c) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        debug_assert!(r < self.n_rows && c < self.n_cols);
        if bit {
            self.rows[r] |= 1 << c;
        } else {
            self.rows[r] &= !(1 << c);
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.n_rows && c < self.n_cols);
        self.rows[r] ^= 1 << c;
    }

    pub fn row_word(&self, r: usize) -> u64 {
        self.rows[r]
    }

    /// GF(2) row rank via Gauss-Jordan elimination on a copy.
    ///
    /// Pivots are taken left to right and eliminated both below and above,
    /// so the implicit reduced form is unique and witness extraction stays
    /// deterministic.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.n_cols {
            let mask = 1u64 << col;
            let Some(pivot) = (rank..self.n_rows).find(|&r| rows[r] & mask != 0) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && *row & mask != 0 {
                    *row ^= pivot_row;
                }
            }
            rank += 1;
            if rank == self.n_rows {
                break;
            }
        }
        rank
    }

    /// Rank of the submatrix formed by the given rows.
    pub fn rank_of_rows(&self, row_set: &[usize]) -> Result<usize, Gf2Error> {
        let rows = self.gather(row_set)?;
        Ok(rank_of_words(&rows, self.n_cols))
    }

    /// Largest multiset of identical rows.
    pub fn max_identical_rows(&self) -> usize {
        let mut sorted = self.rows.clone();
        sorted.sort_unstable();
        let mut best = 0;
        let mut run = 0;
        let mut prev = None;
        for w in sorted {
            if Some(w) == prev {
                run += 1;
            } else {
                run = 1;
                prev = Some(w);
            }
            best = best.max(run);
        }
        best
    }

    /// True iff the rows XOR to zero and every proper nonempty subset is
    /// linearly independent.
    ///
    /// Minimality only needs the maximal proper subsets checked: a dependent
    /// smaller subset would sit inside one of them and lower its rank.
    pub fn is_minimally_dependent(&self, row_set: &[usize]) -> Result<bool, Gf2Error> {
        let rows = self.gather(row_set)?;
        if rows.is_empty() {
            return Ok(false);
        }
        if rows.iter().fold(0u64, |acc, r| acc ^ r) != 0 {
            return Ok(false);
        }
        for skip in 0..rows.len() {
            let sub: Vec<u64> = rows
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &w)| w)
                .collect();
            if rank_of_words(&sub, self.n_cols) != sub.len() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every minimally dependent row subset, as sorted index lists.
    ///
    /// Sweeps all `2^n_rows` subsets, so callers must stay under
    /// `limit_rows`. Output is ordered by subset mask value.
    pub fn enumerate_minimally_dependent_sets(
        &self,
        limit_rows: usize,
    ) -> Result<Vec<Vec<usize>>, Gf2Error> {
        if self.n_rows > limit_rows {
            return Err(Gf2Error::SizeGuardExceeded {
                n_rows: self.n_rows,
                limit: limit_rows,
            });
        }
        let total = 1usize << self.n_rows;
        let mut xor_of = vec![0u64; total];
        for mask in 1..total {
            let low = mask.trailing_zeros() as usize;
            xor_of[mask] = xor_of[mask & (mask - 1)] ^ self.rows[low];
        }
        let zero_masks: Vec<usize> = (1..total).filter(|&m| xor_of[m] == 0).collect();
        let mut out = Vec::new();
        'outer: for &mask in &zero_masks {
            // minimal iff no proper nonempty zero-XOR submask
            let mut sub = (mask - 1) & mask;
            while sub != 0 {
                if xor_of[sub] == 0 {
                    continue 'outer;
                }
                sub = (sub - 1) & mask;
            }
            out.push((0..self.n_rows).filter(|&r| mask >> r & 1 == 1).collect());
        }
        Ok(out)
    }

    /// Rows rendered as lines of `0`/`1` characters.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in 0..self.n_rows {
            for c in 0..self.n_cols {
                s.push(if self.get(r, c) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    fn gather(&self, row_set: &[usize]) -> Result<Vec<u64>, Gf2Error> {
        row_set
            .iter()
            .map(|&r| {
                self.rows.get(r).copied().ok_or(Gf2Error::RowOutOfRange {
                    index: r,
                    n_rows: self.n_rows,
                })
            })
            .collect()
    }
}

fn rank_of_words(words: &[u64], n_cols: usize) -> usize {
    let mut rows = words.to_vec();
    let mut rank = 0;
    for col in 0..n_cols {
        let mask = 1u64 << col;
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] & mask != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row & mask != 0 {
                *row ^= pivot_row;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig3_a() -> Gf2Matrix {
        Gf2Matrix::from_bit_rows(&["10010", "01010", "00100", "00011", "00101"])
    }

    fn fig3_a_c() -> Gf2Matrix {
        Gf2Matrix::from_bit_rows(&["10010", "01000", "00101", "10010", "00101"])
    }

    /// Independent oracle: rank as the largest cardinality of a linearly
    /// independent row subset, found by exhaustive subset search.
    fn rank_by_subset_search(m: &Gf2Matrix) -> usize {
        let n = m.n_rows();
        let mut best = 0;
        for mask in 0usize..1 << n {
            let rows: Vec<usize> = (0..n).filter(|&r| mask >> r & 1 == 1).collect();
            if rows.len() <= best {
                continue;
            }
            if m.rank_of_rows(&rows).unwrap() == rows.len() {
                best = rows.len();
            }
        }
        best
    }

    #[test]
    fn rank_examples() {
        assert_eq!(fig3_a().rank(), 5);
        assert_eq!(fig3_a_c().rank(), 3);
        assert_eq!(Gf2Matrix::identity(7).rank(), 7);
        assert_eq!(Gf2Matrix::zero(4, 6).rank(), 0);
        assert_eq!(Gf2Matrix::zero(0, 0).rank(), 0);
        assert_eq!(Gf2Matrix::zero(0, 5).rank(), 0);
        assert_eq!(Gf2Matrix::zero(5, 0).rank(), 0);
    }

    #[test]
    fn minimally_dependent_checks() {
        let ac = fig3_a_c();
        // identical pair
        assert_eq!(ac.is_minimally_dependent(&[0, 3]), Ok(true));
        // superset of a dependent pair
        assert_eq!(ac.is_minimally_dependent(&[0, 1, 3]), Ok(false));
        // independent singleton
        assert_eq!(ac.is_minimally_dependent(&[1]), Ok(false));
        // a zero row alone is dependent and minimal
        let z = Gf2Matrix::zero(2, 3);
        assert_eq!(z.is_minimally_dependent(&[0]), Ok(true));
        // out of range
        assert_eq!(
            ac.is_minimally_dependent(&[0, 9]),
            Err(Gf2Error::RowOutOfRange { index: 9, n_rows: 5 })
        );
    }

    #[test]
    fn enumerate_minimally_dependent_examples() {
        let ac = fig3_a_c();
        let sets = ac.enumerate_minimally_dependent_sets(16).unwrap();
        assert!(sets.contains(&vec![0, 3]));
        assert!(sets.contains(&vec![2, 4]));
        assert!(sets.len() >= 5 - 3);

        let id = Gf2Matrix::identity(5);
        assert!(id.enumerate_minimally_dependent_sets(16).unwrap().is_empty());

        let twin = Gf2Matrix::from_bit_rows(&["101", "101"]);
        assert_eq!(
            twin.enumerate_minimally_dependent_sets(16).unwrap(),
            vec![vec![0, 1]]
        );

        let wide = Gf2Matrix::zero(17, 3);
        assert_eq!(
            wide.enumerate_minimally_dependent_sets(16),
            Err(Gf2Error::SizeGuardExceeded { n_rows: 17, limit: 16 })
        );
    }

    #[test]
    fn render_round_trip() {
        let a = fig3_a();
        assert_eq!(a.render(), "10010\n01010\n00100\n00011\n00101\n");
    }

    proptest! {
        #[test]
        fn rank_matches_subset_search(rows in proptest::collection::vec(0u64..64, 0..7)) {
            let m = Gf2Matrix { n_rows: rows.len(), n_cols: 6, rows };
            prop_assert_eq!(m.rank(), rank_by_subset_search(&m));
        }

        #[test]
        fn rank_invariant_under_row_ops(
            rows in proptest::collection::vec(0u64..256, 2..8),
            i in 0usize..8,
            j in 0usize..8,
        ) {
            let n = rows.len();
            let m = Gf2Matrix { n_rows: n, n_cols: 8, rows: rows.clone() };
            let (i, j) = (i % n, j % n);

            let mut swapped = rows.clone();
            swapped.swap(i, j);
            let ms = Gf2Matrix { n_rows: n, n_cols: 8, rows: swapped };
            prop_assert_eq!(m.rank(), ms.rank());

            if i != j {
                let mut xored = rows;
                xored[i] ^= xored[j];
                let mx = Gf2Matrix { n_rows: n, n_cols: 8, rows: xored };
                prop_assert_eq!(m.rank(), mx.rank());
            }
        }

        #[test]
        fn minimally_dependent_count_lower_bound(
            rows in proptest::collection::vec(0u64..4096, 0..12),
        ) {
            let m = Gf2Matrix { n_rows: rows.len(), n_cols: 12, rows };
            let sets = m.enumerate_minimally_dependent_sets(12).unwrap();
            prop_assert!(sets.len() >= m.n_rows() - m.rank());
            for s in &sets {
                prop_assert_eq!(m.is_minimally_dependent(s), Ok(true));
            }
        }
    }
}
