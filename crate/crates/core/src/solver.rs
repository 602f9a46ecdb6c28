//! The table-enumeration minrank solver and critical-bit extraction.
//!
//! Every way of arranging each receiver's demands into the slots of an
//! `N x w_max` table splits the instance into `w_max` single-unicast
//! uniprior sub-problems, one per column. Inside a column the
//! side-information graph restricts to out-degree at most one, so each
//! column solves in linear time by cycle counting: its minrank is the
//! number of entries minus the number of cycles. The instance minrank is
//! the minimum table score, and the optimal table's cycles are disjoint
//! unicycles whose edges carry the critical side-information bits.

use std::collections::BTreeSet;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use thiserror::Error;

use crate::graph::{
    build_side_info_graph, count_cycles_outdeg_le1, critical_graph_from_unicycles, GraphError,
    SideInformationGraph,
};
use crate::problem::{IndexCodingProblem, Violation};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid instance: {}", render_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("enumeration of {beta} tables exceeds the table budget of {budget}")]
    BetaBudgetExceeded { beta: BigUint, budget: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn render_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).join("; ")
}

/// Knobs for the fast solver.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Refuse to enumerate more tables than this.
    pub beta_budget: u64,
    /// Contiguous index ranges handed to this many threads. The result is
    /// byte-identical for every worker count.
    pub workers: usize,
    /// Skip tables whose columns are not sorted by smallest demanded
    /// message. Column order never changes the score, so the minrank is
    /// unaffected; the reported optimal table becomes the first canonical
    /// minimizer.
    pub canonical_columns: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            beta_budget: 10_000_000,
            workers: 1,
            canonical_columns: false,
        }
    }
}

/// An `N x w_max` placement of every receiver's demands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandTable {
    pub w_max: usize,
    /// `rows[k][c]` is the message receiver `k` placed in column `c`.
    pub rows: Vec<Vec<Option<usize>>>,
}

/// One column of a demand table: a single-unicast uniprior sub-problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnProblem {
    /// `(receiver, demanded message)` pairs, at most one per receiver.
    pub entries: Vec<(usize, usize)>,
}

impl DemandTable {
    pub fn column(&self, c: usize) -> ColumnProblem {
        ColumnProblem {
            entries: self
                .rows
                .iter()
                .enumerate()
                .filter_map(|(k, row)| row[c].map(|m| (k, m)))
                .collect(),
        }
    }

    pub fn columns(&self) -> Vec<ColumnProblem> {
        (0..self.w_max).map(|c| self.column(c)).collect()
    }

    /// Grid rendering, 1-based, empty cells dashed.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Some(m) => format!("x{}", m + 1),
                    None => "-".to_string(),
                })
                .collect();
            s.push_str(&format!("D{}: {}\n", k + 1, cells.join(" ")));
        }
        s
    }
}

/// Exact rational `1/minrank`, the best symmetric rate of a scalar linear
/// code for the instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymmetricRate {
    pub denominator: usize,
}

impl fmt::Display for SymmetricRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1/{}", self.denominator)
    }
}

/// Output of the fast solver, with certificates.
#[derive(Debug, Clone)]
pub struct MinrankResult {
    pub minrank: usize,
    /// Number of tables enumerated (or eligible, in canonical mode).
    pub beta: u64,
    /// Index of the optimal table in enumeration order.
    pub optimal_index: u64,
    pub optimal_table: DemandTable,
    /// Minrank of each column of the optimal table.
    pub column_ranks: Vec<usize>,
    /// Per-column disjoint cycles, each a vertex list starting at its
    /// smallest vertex.
    pub cycle_certificates: Vec<Vec<Vec<usize>>>,
    /// Union of the certificate cycles' edges.
    pub critical_edges: BTreeSet<(usize, usize)>,
    pub symmetric_rate: SymmetricRate,
}

/// One critical cached bit: `receiver` caches `message`, and that bit sits
/// on the critical edge `message -> row`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CriticalBit {
    pub receiver: usize,
    pub row: usize,
    pub message: usize,
}

/// The pruned graph retaining only certificate edges, with the cached bits
/// those edges stand for.
#[derive(Debug, Clone)]
pub struct CriticalSideInfo {
    pub critical_graph: SideInformationGraph,
    pub bits: Vec<CriticalBit>,
}

// ---------------------------------------------------------------------------
// table enumeration
// ---------------------------------------------------------------------------

/// Precomputed placements per receiver plus the mixed-radix index space.
///
/// Enumeration order: for each receiver, slot combinations in lexicographic
/// order, then its (ascending) messages permuted in lexicographic order and
/// written into the chosen slots in slot order. Tables follow the
/// mixed-radix odometer over receivers with the last receiver's placement
/// varying fastest.
struct TableSpace {
    w_max: usize,
    placements: Vec<Vec<Vec<Option<usize>>>>,
    radices: Vec<u64>,
    beta: u64,
}

impl TableSpace {
    fn build(
        demands: &[Vec<usize>],
        beta_exact: &BigUint,
        budget: u64,
    ) -> Result<Self, SolverError> {
        if *beta_exact > BigUint::from(budget) {
            return Err(SolverError::BetaBudgetExceeded {
                beta: beta_exact.clone(),
                budget,
            });
        }
        let w_max = demands.iter().map(Vec::len).max().unwrap_or(0);
        let mut placements = Vec::with_capacity(demands.len());
        for wants in demands {
            let mut list = Vec::new();
            for combo in (0..w_max).combinations(wants.len()) {
                for perm in wants.iter().copied().permutations(wants.len()) {
                    let mut cells = vec![None; w_max];
                    for (slot, m) in combo.iter().zip(perm) {
                        cells[*slot] = Some(m);
                    }
                    list.push(cells);
                }
            }
            placements.push(list);
        }
        let radices: Vec<u64> = placements.iter().map(|p| p.len() as u64).collect();
        let beta = radices.iter().product();
        debug_assert_eq!(BigUint::from(beta), *beta_exact);
        Ok(TableSpace {
            w_max,
            placements,
            radices,
            beta,
        })
    }

    fn digits_for(&self, mut index: u64) -> Vec<usize> {
        let mut digits = vec![0usize; self.radices.len()];
        for k in (0..self.radices.len()).rev() {
            digits[k] = (index % self.radices[k]) as usize;
            index /= self.radices[k];
        }
        digits
    }

    fn advance(&self, digits: &mut [usize]) {
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if (digits[k] as u64) < self.radices[k] {
                return;
            }
            digits[k] = 0;
        }
    }

    fn table_at(&self, digits: &[usize]) -> DemandTable {
        DemandTable {
            w_max: self.w_max,
            rows: digits
                .iter()
                .enumerate()
                .map(|(k, &d)| self.placements[k][d].clone())
                .collect(),
        }
    }

    /// Columns sorted by smallest demanded message, empties last.
    fn is_canonical(&self, digits: &[usize]) -> bool {
        let mut prev = 0usize;
        for c in 0..self.w_max {
            let key = digits
                .iter()
                .enumerate()
                .filter_map(|(k, &d)| self.placements[k][d][c])
                .min()
                .unwrap_or(usize::MAX);
            if key < prev {
                return false;
            }
            prev = key;
        }
        true
    }
}

/// Streams every demand table of a valid instance in enumeration order.
pub struct TableEnumerator {
    space: TableSpace,
    digits: Vec<usize>,
    index: u64,
}

impl Iterator for TableEnumerator {
    type Item = DemandTable;

    fn next(&mut self) -> Option<DemandTable> {
        if self.index >= self.space.beta {
            return None;
        }
        let table = self.space.table_at(&self.digits);
        self.space.advance(&mut self.digits);
        self.index += 1;
        Some(table)
    }
}

/// All `beta` demand tables of a valid instance, as a lazy stream.
pub fn enumerate_tables(
    p: &IndexCodingProblem,
    beta_budget: u64,
) -> Result<TableEnumerator, SolverError> {
    let violations = p.validate();
    if !violations.is_empty() {
        return Err(SolverError::Invalid(violations));
    }
    let demands = demand_lists(p);
    let space = TableSpace::build(&demands, &p.table_instance_count(), beta_budget)?;
    let digits = space.digits_for(0);
    Ok(TableEnumerator {
        space,
        digits,
        index: 0,
    })
}

fn demand_lists(p: &IndexCodingProblem) -> Vec<Vec<usize>> {
    p.receivers()
        .iter()
        .map(|r| r.wants.iter().copied().collect())
        .collect()
}

fn beta_of_demands(demands: &[Vec<usize>]) -> BigUint {
    let w_max = demands.iter().map(Vec::len).max().unwrap_or(0);
    let mut beta = BigUint::from(1u8);
    for wants in demands {
        let s = wants.len();
        let mut count = BigUint::from(1u8);
        // C(w_max, s) * s! = w_max * (w_max-1) * ... * (w_max-s+1)
        for i in 0..s {
            count *= BigUint::from((w_max - i) as u64);
        }
        beta *= count;
    }
    beta
}

// ---------------------------------------------------------------------------
// column solving
// ---------------------------------------------------------------------------

/// Minrank of one column: entries minus cycles of the out-degree-one
/// restriction, with the cycles as certificates.
pub fn column_minrank(
    column: &ColumnProblem,
    g: &SideInformationGraph,
) -> Result<(usize, Vec<Vec<usize>>), GraphError> {
    let vertices: Vec<usize> = column.entries.iter().map(|&(_, m)| m).sorted().collect();
    let cycles = count_cycles_outdeg_le1(g, &vertices)?;
    Ok((vertices.len() - cycles.len(), cycles))
}

/// Sum of column minranks of a table.
pub fn table_score(t: &DemandTable, g: &SideInformationGraph) -> Result<usize, GraphError> {
    let mut score = 0;
    for c in 0..t.w_max {
        score += column_minrank(&t.column(c), g)?.0;
    }
    Ok(score)
}

/// Allocation-free column cycle counter used in the enumeration hot loop.
///
/// Stamp arrays replace clearing: a cell belongs to the current column or
/// walk only if its stamp matches the current token.
struct CycleCounter {
    in_col: Vec<u64>,
    done: Vec<u64>,
    on_path: Vec<u64>,
    path: Vec<usize>,
    col_token: u64,
    walk_token: u64,
}

impl CycleCounter {
    fn new(n: usize) -> Self {
        CycleCounter {
            in_col: vec![0; n],
            done: vec![0; n],
            on_path: vec![0; n],
            path: Vec::with_capacity(n),
            col_token: 0,
            walk_token: 0,
        }
    }

    /// Cycles in the restriction of `g` to the column entries of `digits`'
    /// column `c`. The restriction has out-degree <= 1 because a column
    /// holds at most one demand per receiver.
    fn column_cycles(
        &mut self,
        g: &SideInformationGraph,
        placements: &[Vec<Vec<Option<usize>>>],
        digits: &[usize],
        c: usize,
    ) -> usize {
        self.col_token += 1;
        let token = self.col_token;
        let mut count = 0usize;
        let mut vertices_start = usize::MAX;
        for (k, &d) in digits.iter().enumerate() {
            if let Some(m) = placements[k][d][c] {
                self.in_col[m] = token;
                if vertices_start == usize::MAX {
                    vertices_start = k;
                }
            }
        }
        for (k, &d) in digits.iter().enumerate() {
            let Some(start) = placements[k][d][c] else {
                continue;
            };
            if self.done[start] == token {
                continue;
            }
            self.walk_token += 1;
            self.path.clear();
            let mut cur = start;
            loop {
                if self.done[cur] == token {
                    break;
                }
                if self.on_path[cur] == self.walk_token {
                    count += 1;
                    break;
                }
                self.on_path[cur] = self.walk_token;
                self.path.push(cur);
                let mut next = None;
                for &w in g.out_edges(cur) {
                    if self.in_col[w] == token {
                        next = Some(w);
                        break;
                    }
                }
                match next {
                    Some(w) => cur = w,
                    None => break,
                }
            }
            for &m in &self.path {
                self.done[m] = token;
            }
        }
        let _ = k_unused(vertices_start);
        count
    }
}

fn k_unused(_v: usize) {}

// ---------------------------------------------------------------------------
// the solver
// ---------------------------------------------------------------------------

/// Fast exact minrank of a valid unicast-uniprior instance.
pub fn minrank_fast(
    p: &IndexCodingProblem,
    opts: &SolveOptions,
) -> Result<MinrankResult, SolverError> {
    let split = p.split_to_single_unicast().map_err(SolverError::Invalid)?;
    let graph = build_side_info_graph(&split);
    solve_tables(&demand_lists(p), &graph, opts)
}

/// Table enumeration over an explicit demand partition and graph.
///
/// `demands` must be pairwise disjoint message lists and `graph` must
/// restrict to out-degree <= 1 on every possible column (any subgraph of a
/// valid instance's side-information graph qualifies). This entry point
/// exists so pruned graphs can be re-solved without re-validating coverage.
pub fn solve_tables(
    demands: &[Vec<usize>],
    graph: &SideInformationGraph,
    opts: &SolveOptions,
) -> Result<MinrankResult, SolverError> {
    let space = TableSpace::build(demands, &beta_of_demands(demands), opts.beta_budget)?;
    let n: usize = demands.iter().map(Vec::len).sum();

    let best = scan_best(&space, graph, opts, n);
    let (_, best_index) = best.expect("at least one table is canonical");

    // rebuild the winner and derive certificates through the public path
    let digits = space.digits_for(best_index);
    let table = space.table_at(&digits);
    let mut column_ranks = Vec::with_capacity(space.w_max);
    let mut cycle_certificates = Vec::with_capacity(space.w_max);
    let mut critical_edges = BTreeSet::new();
    for c in 0..space.w_max {
        let (rank, cycles) = column_minrank(&table.column(c), graph)?;
        column_ranks.push(rank);
        for cycle in &cycles {
            for i in 0..cycle.len() {
                critical_edges.insert((cycle[i], cycle[(i + 1) % cycle.len()]));
            }
        }
        cycle_certificates.push(cycles);
    }
    let minrank: usize = column_ranks.iter().sum();
    Ok(MinrankResult {
        minrank,
        beta: space.beta,
        optimal_index: best_index,
        optimal_table: table,
        column_ranks,
        cycle_certificates,
        critical_edges,
        symmetric_rate: SymmetricRate {
            denominator: minrank,
        },
    })
}

/// Scans all tables and returns `(cycles, index)` of the first table
/// attaining the maximum total cycle count (equivalently the minimum
/// score). Partitioned across workers by contiguous index ranges; the
/// reduction keeps the globally smallest index, so worker count never
/// changes the winner.
fn scan_best(
    space: &TableSpace,
    graph: &SideInformationGraph,
    opts: &SolveOptions,
    n: usize,
) -> Option<(usize, u64)> {
    let workers = opts.workers.max(1).min(space.beta.max(1) as usize).max(1);
    if workers == 1 {
        return scan_range(space, graph, opts, n, 0, space.beta);
    }
    let chunk = space.beta.div_ceil(workers as u64);
    let ranges: Vec<(u64, u64)> = (0..workers as u64)
        .map(|w| (w * chunk, ((w + 1) * chunk).min(space.beta)))
        .filter(|(a, b)| a < b)
        .collect();
    let mut results = Vec::with_capacity(ranges.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|&(a, b)| scope.spawn(move || scan_range(space, graph, opts, n, a, b)))
            .collect();
        for h in handles {
            results.push(h.join().expect("table scan worker panicked"));
        }
    });
    results.into_iter().flatten().reduce(|a, b| {
        // more cycles wins; ties break to the earlier table
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    })
}

fn scan_range(
    space: &TableSpace,
    graph: &SideInformationGraph,
    opts: &SolveOptions,
    _n: usize,
    start: u64,
    end: u64,
) -> Option<(usize, u64)> {
    let mut counter = CycleCounter::new(graph.n());
    let mut digits = space.digits_for(start);
    let mut best: Option<(usize, u64)> = None;
    for index in start..end {
        if !opts.canonical_columns || space.is_canonical(&digits) {
            let mut cycles = 0;
            for c in 0..space.w_max {
                cycles += counter.column_cycles(graph, &space.placements, &digits, c);
            }
            if best.is_none_or(|(b, _)| cycles > b) {
                best = Some((cycles, index));
            }
        }
        space.advance(&mut digits);
    }
    best
}

// ---------------------------------------------------------------------------
// critical side information
// ---------------------------------------------------------------------------

/// Runs the fast solver and extracts the critical graph and bits from the
/// optimal table's cycle certificates.
pub fn critical_side_information(
    p: &IndexCodingProblem,
    opts: &SolveOptions,
) -> Result<(MinrankResult, CriticalSideInfo), SolverError> {
    let result = minrank_fast(p, opts)?;
    let info = critical_info_from_result(p, &result)?;
    Ok((result, info))
}

/// Critical graph and bits for an already-computed result.
pub fn critical_info_from_result(
    p: &IndexCodingProblem,
    result: &MinrankResult,
) -> Result<CriticalSideInfo, SolverError> {
    let split = p.split_to_single_unicast().map_err(SolverError::Invalid)?;
    let graph = build_side_info_graph(&split);
    let all_cycles: Vec<Vec<usize>> = result
        .cycle_certificates
        .iter()
        .flatten()
        .cloned()
        .collect();
    let critical_graph = critical_graph_from_unicycles(&graph, &all_cycles)?;
    let bits = bits_from_edges(p, &critical_graph);
    Ok(CriticalSideInfo {
        critical_graph,
        bits,
    })
}

/// Unions certificate edges over every score-minimizing table. Costs a
/// second full enumeration with certificate extraction per minimizer.
pub fn critical_union_over_optima(
    p: &IndexCodingProblem,
    opts: &SolveOptions,
) -> Result<(MinrankResult, CriticalSideInfo), SolverError> {
    let result = minrank_fast(p, opts)?;
    let split = p.split_to_single_unicast().map_err(SolverError::Invalid)?;
    let graph = build_side_info_graph(&split);
    let demands = demand_lists(p);
    let space = TableSpace::build(&demands, &beta_of_demands(&demands), opts.beta_budget)?;

    let n = p.n();
    let target = n - result.minrank;
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut counter = CycleCounter::new(graph.n());
    let mut digits = space.digits_for(0);
    for _ in 0..space.beta {
        if !opts.canonical_columns || space.is_canonical(&digits) {
            let mut cycles = 0;
            for c in 0..space.w_max {
                cycles += counter.column_cycles(graph, &space.placements, &digits, c);
            }
            if cycles == target {
                let table = space.table_at(&digits);
                for c in 0..space.w_max {
                    let (_, cycle_list) = column_minrank(&table.column(c), &graph)?;
                    for cycle in cycle_list {
                        for i in 0..cycle.len() {
                            edges.insert((cycle[i], cycle[(i + 1) % cycle.len()]));
                        }
                    }
                }
            }
        }
        space.advance(&mut digits);
    }
    let critical_graph = SideInformationGraph::from_edges(n, edges.iter().copied());
    let bits = bits_from_edges(p, &critical_graph);
    Ok((
        result,
        CriticalSideInfo {
            critical_graph,
            bits,
        },
    ))
}

fn bits_from_edges(p: &IndexCodingProblem, g: &SideInformationGraph) -> Vec<CriticalBit> {
    let owner = p.owner_of_message();
    let mut bits: Vec<CriticalBit> = g
        .edges()
        .map(|(message, row)| CriticalBit {
            receiver: owner[row],
            row,
            message,
        })
        .collect();
    bits.sort();
    bits
}
