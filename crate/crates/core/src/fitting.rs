//! The general-form fitting matrix of a side-information graph and the
//! brute-force minrank oracle that sweeps all of its instantiations.
//!
//! A fitting matrix has ones on the diagonal, zeros wherever no
//! side-information edge exists, and a free 0/1 choice at position `(i, j)`
//! exactly when the receiver demanding message `i` caches message `j`. The
//! minimum GF(2) rank over all `2^(free positions)` choices is the minrank.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::gf2::Gf2Matrix;
use crate::graph::SideInformationGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FittingError {
    #[error("bit string has {got} bits, pattern has {expected} free positions")]
    LengthMismatch { expected: usize, got: usize },
    #[error("sweep of 2^{free_positions} instantiations exceeds the budget of {budget}")]
    SizeGuardExceeded { free_positions: usize, budget: u64 },
    #[error("({row},{col}) is not a free position of the pattern")]
    UnknownFreePosition { row: usize, col: usize },
}

/// An assignment to the free positions of a pattern, at most 63 bits.
///
/// Bit `k` corresponds to the `k`-th free position in row-major order.
/// Lexicographic comparisons read the bits in that order, index 0 first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeBits {
    mask: u64,
    len: usize,
}

impl FreeBits {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= 63);
        FreeBits { mask: 0, len }
    }

    pub fn from_mask(mask: u64, len: usize) -> Self {
        assert!(len <= 63);
        debug_assert!(len == 63 || mask < (1u64 << len));
        FreeBits { mask, len }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut mask = 0u64;
        for (k, &b) in bits.iter().enumerate() {
            if b {
                mask |= 1 << k;
            }
        }
        FreeBits {
            mask,
            len: bits.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, k: usize) -> bool {
        debug_assert!(k < self.len);
        (self.mask >> k) & 1 == 1
    }

    pub fn with_flipped(&self, k: usize) -> Self {
        debug_assert!(k < self.len);
        FreeBits {
            mask: self.mask ^ (1 << k),
            len: self.len,
        }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn count_ones(&self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Orders bit strings by their first differing position.
    pub fn lex_cmp(&self, other: &FreeBits) -> Ordering {
        debug_assert_eq!(self.len, other.len);
        let diff = self.mask ^ other.mask;
        if diff == 0 {
            return Ordering::Equal;
        }
        let k = diff.trailing_zeros();
        if (self.mask >> k) & 1 == 0 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }
}

impl fmt::Display for FreeBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in 0..self.len {
            f.write_str(if self.get(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// The general-form fitting matrix: dimension plus the row-major list of
/// free positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FittingPattern {
    n: usize,
    free: Vec<(usize, usize)>,
}

/// Result of the exhaustive sweep: the minimum rank, the lexicographically
/// smallest bit string achieving it, and the matrix it instantiates.
#[derive(Debug, Clone)]
pub struct BruteForceResult {
    pub minrank: usize,
    pub witness_bits: FreeBits,
    pub witness: Gf2Matrix,
}

impl FittingPattern {
    /// Free position `(i, j)` for every edge `j -> i` of the graph, sorted
    /// row-major so bit indexing is deterministic.
    pub fn general_form(g: &SideInformationGraph) -> Self {
        let mut free = Vec::with_capacity(g.sum_kappa());
        for (u, v) in g.edges() {
            free.push((v, u));
        }
        free.sort_unstable();
        FittingPattern { n: g.n(), free }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn free_positions(&self) -> &[(usize, usize)] {
        &self.free
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    /// Bit string with ones exactly at the listed free positions.
    pub fn bits_for(&self, set_positions: &[(usize, usize)]) -> Result<FreeBits, FittingError> {
        let mut mask = 0u64;
        for &(row, col) in set_positions {
            let k = self
                .free
                .iter()
                .position(|&p| p == (row, col))
                .ok_or(FittingError::UnknownFreePosition { row, col })?;
            mask |= 1 << k;
        }
        Ok(FreeBits::from_mask(mask, self.free.len()))
    }

    /// Diagonal ones, forced zeros, and the `k`-th free position set to bit `k`.
    pub fn instantiate(&self, bits: FreeBits) -> Result<Gf2Matrix, FittingError> {
        if bits.len() != self.free.len() {
            return Err(FittingError::LengthMismatch {
                expected: self.free.len(),
                got: bits.len(),
            });
        }
        Ok(self.instantiate_mask(bits.mask()))
    }

    fn instantiate_mask(&self, mask: u64) -> Gf2Matrix {
        let mut m = Gf2Matrix::identity(self.n);
        for (k, &(r, c)) in self.free.iter().enumerate() {
            if (mask >> k) & 1 == 1 {
                m.set(r, c, true);
            }
        }
        m
    }

    /// Exhaustive minrank over all instantiations.
    ///
    /// The sweep walks bit strings in Gray-code order, flipping one matrix
    /// entry per step and recomputing the rank from scratch. Ties on the
    /// minimum rank break toward the lexicographically smallest bit string,
    /// so the witness does not depend on visit order.
    pub fn brute_force_minrank(&self, budget: u64) -> Result<BruteForceResult, FittingError> {
        self.brute_force_minrank_with_workers(budget, 1)
    }

    /// Same sweep partitioned into contiguous index ranges, one per worker.
    /// The merged result is identical for every worker count.
    pub fn brute_force_minrank_with_workers(
        &self,
        budget: u64,
        workers: usize,
    ) -> Result<BruteForceResult, FittingError> {
        let f = self.free.len();
        if f >= 64 || (1u64 << f) > budget {
            return Err(FittingError::SizeGuardExceeded {
                free_positions: f,
                budget,
            });
        }
        let total = 1u64 << f;
        let workers = workers.max(1).min(total as usize).max(1);
        let best = if workers == 1 {
            self.sweep_range(0, total)
        } else {
            let chunk = total.div_ceil(workers as u64);
            let ranges: Vec<(u64, u64)> = (0..workers as u64)
                .map(|w| (w * chunk, ((w + 1) * chunk).min(total)))
                .filter(|(a, b)| a < b)
                .collect();
            let mut results = Vec::with_capacity(ranges.len());
            std::thread::scope(|scope| {
                let handles: Vec<_> = ranges
                    .iter()
                    .map(|&(a, b)| scope.spawn(move || self.sweep_range(a, b)))
                    .collect();
                for h in handles {
                    results.push(h.join().expect("sweep worker panicked"));
                }
            });
            results
                .into_iter()
                .reduce(|a, b| merge_candidates(a, b, f))
                .expect("at least one range")
        };
        let witness_bits = FreeBits::from_mask(best.1, f);
        Ok(BruteForceResult {
            minrank: best.0,
            witness: self.instantiate_mask(best.1),
            witness_bits,
        })
    }

    /// Sweeps Gray codes of indices `start..end`, returning `(rank, mask)`
    /// of the best candidate under (rank, lexicographic bits).
    fn sweep_range(&self, start: u64, end: u64) -> (usize, u64) {
        let mut cur = gray(start);
        let mut m = self.instantiate_mask(cur);
        let mut best = (m.rank(), cur);
        for i in start + 1..end {
            let k = i.trailing_zeros() as usize;
            let (r, c) = self.free[k];
            m.flip(r, c);
            cur ^= 1 << k;
            let rank = m.rank();
            best = merge_candidates(best, (rank, cur), self.free.len());
        }
        best
    }

    /// True iff the instantiation attains the given minrank and zeroing any
    /// single set bit strictly raises the rank.
    pub fn is_critical_fitting_matrix(&self, bits: FreeBits, minrank: usize) -> bool {
        let Ok(mut m) = self.instantiate(bits) else {
            return false;
        };
        if m.rank() != minrank {
            return false;
        }
        for (k, &(r, c)) in self.free.iter().enumerate() {
            if bits.get(k) {
                m.set(r, c, false);
                let raised = m.rank() > minrank;
                m.set(r, c, true);
                if !raised {
                    return false;
                }
            }
        }
        true
    }

    /// Largest multiset of identical rows over all instantiations.
    pub fn max_identical_row_multiplicity(&self, budget: u64) -> Result<usize, FittingError> {
        let f = self.free.len();
        if f >= 64 || (1u64 << f) > budget {
            return Err(FittingError::SizeGuardExceeded {
                free_positions: f,
                budget,
            });
        }
        let total = 1u64 << f;
        let mut m = self.instantiate_mask(0);
        let mut best = m.max_identical_rows();
        for i in 1..total {
            let k = i.trailing_zeros() as usize;
            let (r, c) = self.free[k];
            m.flip(r, c);
            best = best.max(m.max_identical_rows());
        }
        Ok(best)
    }

    /// Free-bit assignment rendered as space-separated `(row,col)=bit`
    /// pairs, 1-based.
    pub fn render_assignment(&self, bits: FreeBits) -> String {
        self.free
            .iter()
            .enumerate()
            .map(|(k, &(r, c))| format!("({},{})={}", r + 1, c + 1, u8::from(bits.get(k))))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

fn merge_candidates(a: (usize, u64), b: (usize, u64), len: usize) -> (usize, u64) {
    match a.0.cmp(&b.0) {
        Ordering::Less => a,
        Ordering::Greater => b,
        Ordering::Equal => {
            let fa = FreeBits::from_mask(a.1, len);
            let fb = FreeBits::from_mask(b.1, len);
            if fa.lex_cmp(&fb) == Ordering::Greater {
                b
            } else {
                a
            }
        }
    }
}
