//! Side-information graphs and supergraphs: construction, cycle detection in
//! out-degree-one restrictions, unicycle tests, and critical-graph assembly.
//!
//! The side-information graph has an edge `u -> v` exactly when the receiver
//! demanding message `v` caches message `u`. In a uniprior instance every
//! message is cached by one receiver, so the out-neighbors of `u` are
//! precisely that receiver's demands.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::problem::{IndexCodingProblem, SingleUnicastProblem};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex x{} has {out_degree} out-edges inside the restriction", vertex + 1)]
    OutDegreeViolation { vertex: usize, out_degree: usize },
    #[error("vertex set {0:?} does not induce a unicycle")]
    NotAUnicycle(Vec<usize>),
    #[error("vertex x{} appears in two unicycles", vertex + 1)]
    OverlappingUnicycles { vertex: usize },
}

/// Directed graph on message vertices; `out[u]` holds every `v` with an edge
/// `u -> v`. Self-loops are never present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideInformationGraph {
    n: usize,
    out: Vec<BTreeSet<usize>>,
}

impl SideInformationGraph {
    pub fn empty(n: usize) -> Self {
        SideInformationGraph {
            n,
            out: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = SideInformationGraph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u < self.n && v < self.n, "edge endpoint out of range");
        assert_ne!(u, v, "side-information graphs carry no self-loops");
        self.out[u].insert(v);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        self.out[u].remove(&v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(&v)
    }

    pub fn out_edges(&self, u: usize) -> &BTreeSet<usize> {
        &self.out[u]
    }

    /// Out-degree of a vertex.
    pub fn kappa(&self, u: usize) -> usize {
        self.out[u].len()
    }

    /// Sum of all out-degrees; the exponent of the fitting-matrix count.
    pub fn sum_kappa(&self) -> usize {
        self.out.iter().map(BTreeSet::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.sum_kappa()
    }

    /// True iff some edge `u -> v` of a directed cycle passes through;
    /// equivalently, `v` reaches `u`.
    pub fn edge_lies_on_cycle(&self, u: usize, v: usize) -> bool {
        debug_assert!(self.has_edge(u, v));
        let mut seen = vec![false; self.n];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(x) = stack.pop() {
            if x == u {
                return true;
            }
            for &y in &self.out[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        false
    }

    /// Edge list in `u -> v` text form, 1-based, for debugging dumps.
    pub fn render_edge_list(&self) -> String {
        let mut s = String::new();
        for (u, v) in self.edges() {
            let _ = writeln!(s, "x{} -> x{}", u + 1, v + 1);
        }
        s
    }
}

/// Builds the side-information graph of a split instance: edge `u -> v` iff
/// row `v`'s prior set contains `u`.
pub fn build_side_info_graph(s: &SingleUnicastProblem) -> SideInformationGraph {
    let mut g = SideInformationGraph::empty(s.n);
    for (v, prior) in s.prior_of_row.iter().enumerate() {
        for &u in prior {
            g.add_edge(u, v);
        }
    }
    g
}

/// The side-information supergraph: demand vertices grouped per receiver,
/// with edges from a receiver's supernode to every message it caches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Supergraph {
    /// Vertex ids grouped by receiver, in receiver order.
    pub groups: Vec<Vec<usize>>,
    /// `(supernode, vertex)` pairs.
    pub edges: BTreeSet<(usize, usize)>,
    n: usize,
}

impl Supergraph {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of supernode edges entering a vertex.
    pub fn incoming_count(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(_, x)| x == v).count()
    }

    /// Replaces each supernode edge `(S_j, v)` by vertex edges from `v` into
    /// every member of group `j`, reproducing the side-information graph.
    pub fn expand(&self) -> SideInformationGraph {
        let mut g = SideInformationGraph::empty(self.n);
        for &(j, v) in &self.edges {
            for &w in &self.groups[j] {
                g.add_edge(v, w);
            }
        }
        g
    }

    /// Text dump: one `u -> v` line per expanded edge plus the supernode
    /// membership section.
    pub fn render(&self) -> String {
        let mut s = self.expand().render_edge_list();
        for (j, group) in self.groups.iter().enumerate() {
            let members: Vec<String> = group.iter().map(|&v| format!("x{}", v + 1)).collect();
            let _ = writeln!(s, "supernode {}: {}", j + 1, members.join(" "));
        }
        s
    }
}

/// Builds the supergraph of a valid instance.
pub fn build_supergraph(p: &IndexCodingProblem) -> Supergraph {
    let groups: Vec<Vec<usize>> = p
        .receivers()
        .iter()
        .map(|r| r.wants.iter().copied().collect())
        .collect();
    let mut edges = BTreeSet::new();
    for (j, r) in p.receivers().iter().enumerate() {
        for &v in &r.has {
            edges.insert((j, v));
        }
    }
    Supergraph {
        groups,
        edges,
        n: p.n(),
    }
}

/// True iff three vertices are pairwise joined by edges in both directions.
pub fn has_clique_of_size_three(g: &SideInformationGraph) -> bool {
    let n = g.n();
    let bidir = |a: usize, b: usize| g.has_edge(a, b) && g.has_edge(b, a);
    for a in 0..n {
        for b in a + 1..n {
            if !bidir(a, b) {
                continue;
            }
            for c in b + 1..n {
                if bidir(a, c) && bidir(b, c) {
                    return true;
                }
            }
        }
    }
    false
}

/// Counts the directed cycles of the restriction of `g` to `vertices`.
///
/// The restriction must have out-degree at most one everywhere, which makes
/// it a partial functional graph: every cycle is vertex-disjoint from every
/// other and pointer-chasing finds all of them in linear time. Cycles come
/// back sorted by their smallest vertex, each rotated to start there.
pub fn count_cycles_outdeg_le1(
    g: &SideInformationGraph,
    vertices: &[usize],
) -> Result<Vec<Vec<usize>>, GraphError> {
    let mut in_set = vec![false; g.n()];
    for &v in vertices {
        in_set[v] = true;
    }
    // successor inside the restriction
    let mut succ = vec![None; g.n()];
    for &v in vertices {
        let mut inside = g.out_edges(v).iter().copied().filter(|&w| in_set[w]);
        succ[v] = inside.next();
        if inside.next().is_some() {
            let out_degree = g.out_edges(v).iter().filter(|&&w| in_set[w]).count();
            return Err(GraphError::OutDegreeViolation {
                vertex: v,
                out_degree,
            });
        }
    }

    const UNSEEN: usize = usize::MAX;
    let mut walk_of = vec![UNSEEN; g.n()];
    let mut pos_of = vec![0usize; g.n()];
    let mut cycles = Vec::new();
    for (walk_id, &start) in vertices.iter().enumerate() {
        if walk_of[start] != UNSEEN {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            if walk_of[cur] == walk_id {
                // closed back on the current walk
                let cycle_start = pos_of[cur];
                cycles.push(path[cycle_start..].to_vec());
                break;
            }
            if walk_of[cur] != UNSEEN {
                break;
            }
            walk_of[cur] = walk_id;
            pos_of[cur] = path.len();
            path.push(cur);
            match succ[cur] {
                Some(next) => cur = next,
                None => break,
            }
        }
    }
    for cycle in &mut cycles {
        rotate_to_min(cycle);
    }
    cycles.sort_by_key(|c| c[0]);
    Ok(cycles)
}

fn rotate_to_min(cycle: &mut [usize]) {
    let min_pos = cycle
        .iter()
        .enumerate()
        .min_by_key(|&(_, v)| v)
        .map(|(i, _)| i)
        .unwrap_or(0);
    cycle.rotate_left(min_pos);
}

/// True iff the subgraph induced by `vertices` is exactly one Hamiltonian
/// cycle on them: every vertex has in- and out-degree one inside the set and
/// a single cycle covers all of them.
pub fn is_unicycle(g: &SideInformationGraph, vertices: &[usize]) -> bool {
    if vertices.is_empty() {
        return false;
    }
    let mut in_set = vec![false; g.n()];
    for &v in vertices {
        if in_set[v] {
            return false; // duplicate vertex
        }
        in_set[v] = true;
    }
    let mut succ = vec![usize::MAX; g.n()];
    let mut in_deg = vec![0usize; g.n()];
    for &v in vertices {
        let inside: Vec<usize> = g
            .out_edges(v)
            .iter()
            .copied()
            .filter(|&w| in_set[w])
            .collect();
        if inside.len() != 1 {
            return false;
        }
        succ[v] = inside[0];
        in_deg[inside[0]] += 1;
    }
    if vertices.iter().any(|&v| in_deg[v] != 1) {
        return false;
    }
    // one cycle covering everything
    let start = vertices[0];
    let mut cur = start;
    for _ in 0..vertices.len() {
        cur = succ[cur];
    }
    cur == start && {
        let mut visited = 0;
        let mut c = start;
        loop {
            visited += 1;
            c = succ[c];
            if c == start {
                break;
            }
        }
        visited == vertices.len()
    }
}

/// Keeps only the edges of the given unicycles, yielding the critical graph.
///
/// Each vertex set must induce a unicycle and the sets must be pairwise
/// disjoint; overlaps are an error rather than silently resolved because the
/// solver only ever emits disjoint certificates.
pub fn critical_graph_from_unicycles(
    g: &SideInformationGraph,
    unicycles: &[Vec<usize>],
) -> Result<SideInformationGraph, GraphError> {
    let mut used = vec![false; g.n()];
    let mut pruned = SideInformationGraph::empty(g.n());
    for cycle in unicycles {
        if !is_unicycle(g, cycle) {
            return Err(GraphError::NotAUnicycle(cycle.clone()));
        }
        for &v in cycle {
            if used[v] {
                return Err(GraphError::OverlappingUnicycles { vertex: v });
            }
            used[v] = true;
        }
        for i in 0..cycle.len() {
            pruned.add_edge(cycle[i], cycle[(i + 1) % cycle.len()]);
        }
    }
    Ok(pruned)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn one_based(edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
        edges.iter().map(|&(u, v)| (u - 1, v - 1)).collect()
    }

    /// The split of the five-message sample yields this graph.
    fn sample_graph() -> SideInformationGraph {
        let split = samples::five_messages().split_to_single_unicast().unwrap();
        build_side_info_graph(&split)
    }

    #[test]
    fn graph_from_split_matches_expected_edges() {
        let g = sample_graph();
        let expected: BTreeSet<(usize, usize)> = one_based(&[
            (4, 1),
            (4, 2),
            (1, 3),
            (5, 3),
            (1, 4),
            (5, 4),
            (2, 5),
            (3, 5),
        ])
        .into_iter()
        .collect();
        let got: BTreeSet<(usize, usize)> = g.edges().collect();
        assert_eq!(got, expected);
        assert_eq!(g.sum_kappa(), 8);
    }

    #[test]
    fn graph_edge_cases() {
        let s = SingleUnicastProblem {
            n: 3,
            prior_of_row: vec![BTreeSet::new(); 3],
            row_group_of: vec![0, 1, 2],
        };
        assert_eq!(build_side_info_graph(&s).edge_count(), 0);

        let s = SingleUnicastProblem {
            n: 2,
            prior_of_row: vec![[1].into(), [0].into()],
            row_group_of: vec![0, 1],
        };
        let g = build_side_info_graph(&s);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
    }

    #[test]
    fn supergraph_structure() {
        let p = samples::five_messages();
        let sg = build_supergraph(&p);
        let expected: BTreeSet<(usize, usize)> = [(0, 3), (1, 4), (1, 0), (2, 1), (2, 2)]
            .into_iter()
            .collect();
        assert_eq!(sg.edges, expected);
        // vertex x4 gets its single incoming edge from supernode 1
        assert_eq!(sg.incoming_count(3), 1);
        assert!(sg.edges.contains(&(0, 3)));
        for v in 0..p.n() {
            assert_eq!(sg.incoming_count(v), 1);
        }
    }

    #[test]
    fn supergraph_expansion_reproduces_graph() {
        let p = samples::five_messages();
        let sg = build_supergraph(&p);
        assert_eq!(sg.expand(), sample_graph());

        // all-singleton demands: supergraph degenerates to the graph itself
        let p = crate::problem::IndexCodingProblem::from_one_based(
            3,
            &[(&[1], &[2]), (&[2], &[3]), (&[3], &[1])],
        );
        let sg = build_supergraph(&p);
        let split = p.split_to_single_unicast().unwrap();
        assert_eq!(sg.expand(), build_side_info_graph(&split));
    }

    #[test]
    fn clique_detection() {
        assert!(!has_clique_of_size_three(&sample_graph()));

        let triangle = SideInformationGraph::from_edges(
            3,
            [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)],
        );
        assert!(has_clique_of_size_three(&triangle));

        let pair = SideInformationGraph::from_edges(2, [(0, 1), (1, 0)]);
        assert!(!has_clique_of_size_three(&pair));
    }

    #[test]
    fn cycle_counting_in_column_restriction() {
        // first column of the first demand table of the n10 five-receiver
        // sample: demands x1, x3, x4, x9, x7
        let p = samples::ten_messages_five_receivers();
        let split = p.split_to_single_unicast().unwrap();
        let g = build_side_info_graph(&split);
        let vertices: Vec<usize> = [1, 3, 4, 9, 7].iter().map(|&v| v - 1).collect();
        let cycles = count_cycles_outdeg_le1(&g, &vertices).unwrap();
        assert_eq!(cycles, vec![vec![0, 2]]); // the 2-cycle (x1, x3)
    }

    #[test]
    fn cycle_counting_edge_cases() {
        // a single 4-cycle
        let g = SideInformationGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let cycles = count_cycles_outdeg_le1(&g, &[0, 1, 2, 3]).unwrap();
        assert_eq!(cycles, vec![vec![0, 1, 2, 3]]);

        // a directed path has no cycle
        let g = SideInformationGraph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        assert!(count_cycles_outdeg_le1(&g, &[0, 1, 2, 3]).unwrap().is_empty());

        // out-degree 2 in the restriction is an error
        let g = SideInformationGraph::from_edges(3, [(0, 1), (0, 2)]);
        assert_eq!(
            count_cycles_outdeg_le1(&g, &[0, 1, 2]),
            Err(GraphError::OutDegreeViolation {
                vertex: 0,
                out_degree: 2
            })
        );
        // restricting away one head removes the violation
        assert!(count_cycles_outdeg_le1(&g, &[0, 1]).unwrap().is_empty());
    }

    #[test]
    fn cycles_are_disjoint_and_unicycles() {
        let g = sample_graph();
        // restriction to {x1, x4} and {x3, x5} simultaneously is not
        // out-degree <= 1 (x1 points at both x3 and x4), so check columns
        let cycles = count_cycles_outdeg_le1(&g, &[0, 3]).unwrap();
        assert_eq!(cycles, vec![vec![0, 3]]);
        let cycles = count_cycles_outdeg_le1(&g, &[2, 4]).unwrap();
        assert_eq!(cycles, vec![vec![2, 4]]);
    }

    #[test]
    fn unicycle_checks() {
        let g = sample_graph();
        assert!(is_unicycle(&g, &[0, 3])); // (x1, x4)
        assert!(is_unicycle(&g, &[2, 4])); // (x3, x5)
        // directed cycle whose induced subgraph carries extra edges
        assert!(!is_unicycle(&g, &[0, 3, 4, 2]));
        assert!(!is_unicycle(&g, &[0])); // no self-loops
        assert!(!is_unicycle(&g, &[]));
    }

    #[test]
    fn critical_graph_construction() {
        let g = sample_graph();
        let pruned = critical_graph_from_unicycles(&g, &[vec![0, 3], vec![2, 4]]).unwrap();
        let expected: BTreeSet<(usize, usize)> =
            [(0, 3), (3, 0), (2, 4), (4, 2)].into_iter().collect();
        assert_eq!(pruned.edges().collect::<BTreeSet<_>>(), expected);

        assert_eq!(
            critical_graph_from_unicycles(&g, &[]).unwrap().edge_count(),
            0
        );

        assert_eq!(
            critical_graph_from_unicycles(&g, &[vec![0, 3], vec![0, 3]]),
            Err(GraphError::OverlappingUnicycles { vertex: 0 })
        );
        assert!(matches!(
            critical_graph_from_unicycles(&g, &[vec![0, 3, 4, 2]]),
            Err(GraphError::NotAUnicycle(_))
        ));
    }

    #[test]
    fn full_hamiltonian_unicycle() {
        let g = SideInformationGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert!(is_unicycle(&g, &[0, 1, 2, 3]));
        let pruned = critical_graph_from_unicycles(&g, &[vec![0, 1, 2, 3]]).unwrap();
        assert_eq!(pruned, g);
    }

    #[test]
    fn edge_on_cycle_detection() {
        let g = SideInformationGraph::from_edges(4, [(0, 1), (1, 0), (1, 2), (2, 3)]);
        assert!(g.edge_lies_on_cycle(0, 1));
        assert!(g.edge_lies_on_cycle(1, 0));
        assert!(!g.edge_lies_on_cycle(1, 2));
        assert!(!g.edge_lies_on_cycle(2, 3));
    }

    #[test]
    fn render_formats() {
        let g = SideInformationGraph::from_edges(3, [(0, 1), (2, 0)]);
        assert_eq!(g.render_edge_list(), "x1 -> x2\nx3 -> x1\n");

        let p = samples::five_messages();
        let sg = build_supergraph(&p);
        let dump = sg.render();
        assert!(dump.contains("supernode 1: x1 x2"));
        assert!(dump.contains("x4 -> x1"));
    }
}
