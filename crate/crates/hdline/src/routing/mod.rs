//! Half-duplex routing on general directed networks.
//!
//! A relay on a path can either listen or talk at any moment, so the rate
//! it sustains between an incoming edge of capacity `x` and an outgoing
//! edge of capacity `y` is the harmonic mean split `xy / (x + y)`: the
//! best time division between receiving and forwarding. The capacity of a
//! simple path is the worst such bottleneck over its interior vertices.
//! Finding the best simple path under this objective is NP-hard (see
//! [`reduction`]), so the search here is an exact branch-and-bound over
//! simple paths, not a shortest-path shortcut.

pub mod reduction;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::ExtRational;

/// Default cap on branch-and-bound edge extensions before giving up.
pub const DEFAULT_MAX_VISITS: usize = 4_000_000;

/// A directed graph with positive (possibly infinite) edge capacities and
/// designated source and destination vertices. Vertices are labeled by
/// strings; neighbor iteration is in label order, so all searches are
/// deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapGraph {
    source: String,
    dest: String,
    adj: BTreeMap<String, BTreeMap<String, ExtRational>>,
    vertices: BTreeSet<String>,
    num_edges: usize,
}

impl CapGraph {
    pub fn new(source: impl Into<String>, dest: impl Into<String>) -> Result<Self> {
        let source = source.into();
        let dest = dest.into();
        if source == dest {
            return Err(Error::Graph(
                "source and destination must be distinct".into(),
            ));
        }
        let mut vertices = BTreeSet::new();
        vertices.insert(source.clone());
        vertices.insert(dest.clone());
        Ok(CapGraph {
            source,
            dest,
            adj: BTreeMap::new(),
            vertices,
            num_edges: 0,
        })
    }

    pub fn add_edge(
        &mut self,
        u: impl Into<String>,
        v: impl Into<String>,
        cap: ExtRational,
    ) -> Result<()> {
        let u = u.into();
        let v = v.into();
        if u == v {
            return Err(Error::Graph(format!("self-loop at {u:?}")));
        }
        if cap.is_zero() {
            return Err(Error::Graph(format!("zero capacity on edge {u:?} -> {v:?}")));
        }
        let out = self.adj.entry(u.clone()).or_default();
        if out.contains_key(&v) {
            return Err(Error::Graph(format!("duplicate edge {u:?} -> {v:?}")));
        }
        out.insert(v.clone(), cap);
        self.vertices.insert(u);
        self.vertices.insert(v);
        self.num_edges += 1;
        Ok(())
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn dest(&self) -> &str {
        &self.dest
    }

    pub fn edge(&self, u: &str, v: &str) -> Option<&ExtRational> {
        self.adj.get(u)?.get(v)
    }

    /// Outgoing neighbors of `u` with capacities, in label order.
    pub fn successors(&self, u: &str) -> impl Iterator<Item = (&str, &ExtRational)> {
        self.adj
            .get(u)
            .into_iter()
            .flat_map(|m| m.iter().map(|(v, c)| (v.as_str(), c)))
    }

    pub fn vertices(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(|s| s.as_str())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    /// Capacity of a given simple path under half-duplex relaying: the
    /// minimum over interior vertices of the harmonic mean split of their
    /// incoming and outgoing edge capacities. A single edge has no relay
    /// in the middle, so its path capacity is the edge capacity itself.
    pub fn path_capacity<S: AsRef<str>>(&self, path: &[S]) -> Result<ExtRational> {
        if path.len() < 2 {
            return Err(Error::Graph("a path needs at least one edge".into()));
        }
        let mut seen = HashSet::new();
        for v in path {
            if !seen.insert(v.as_ref()) {
                return Err(Error::Graph(format!(
                    "vertex {:?} repeats; paths must be simple",
                    v.as_ref()
                )));
            }
        }
        let mut caps = Vec::with_capacity(path.len() - 1);
        for hop in path.windows(2) {
            let (u, v) = (hop[0].as_ref(), hop[1].as_ref());
            match self.edge(u, v) {
                Some(c) => caps.push(c),
                None => return Err(Error::Graph(format!("no edge {u:?} -> {v:?}"))),
            }
        }
        if caps.len() == 1 {
            return Ok(caps[0].clone());
        }
        let mut min = ExtRational::infinity();
        for pair in caps.windows(2) {
            min = min.min(ExtRational::hm(pair[0], pair[1]));
        }
        Ok(min)
    }

    /// The best simple source-to-destination path under the half-duplex
    /// objective, or `None` when the destination is unreachable. Exact
    /// exhaustive search with monotone pruning: extending a path can only
    /// lower its capacity, so branches that cannot strictly beat the
    /// incumbent are cut. Among equal-capacity optima the lexicographically
    /// smallest vertex sequence wins, because paths are explored in label
    /// order and replacement requires strict improvement.
    ///
    /// `max_visits` bounds the number of edge extensions tried.
    pub fn best_path(&self, max_visits: usize) -> Result<Option<HdPath>> {
        let mut best: Option<HdPath> = None;
        let mut path = vec![self.source.clone()];
        let mut visited: HashSet<String> = HashSet::new();
        visited.insert(self.source.clone());
        let mut visits = 0usize;
        self.search(
            &self.source,
            None,
            ExtRational::infinity(),
            &mut path,
            &mut visited,
            &mut best,
            &mut visits,
            max_visits,
        )?;
        Ok(best)
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        at: &str,
        entered_by: Option<&ExtRational>,
        running: ExtRational,
        path: &mut Vec<String>,
        visited: &mut HashSet<String>,
        best: &mut Option<HdPath>,
        visits: &mut usize,
        max_visits: usize,
    ) -> Result<()> {
        // Cloning the successor list sidesteps borrowing self across the
        // recursion; merged reduction graphs have small out-degrees.
        let succ: Vec<(String, ExtRational)> = self
            .successors(at)
            .map(|(v, c)| (v.to_string(), c.clone()))
            .collect();
        for (next, cap) in succ {
            if visited.contains(&next) {
                continue;
            }
            *visits += 1;
            if *visits > max_visits {
                return Err(Error::LimitExceeded {
                    what: "path search edge extensions",
                    requested: *visits,
                    limit: max_visits,
                });
            }
            // Finalize the interior vertex we are stepping over.
            let extended = match entered_by {
                None => ExtRational::infinity(),
                Some(prev) => running.clone().min(ExtRational::hm(prev, &cap)),
            };
            if next == self.dest {
                let capacity = if path.len() == 1 {
                    cap.clone()
                } else {
                    extended.clone()
                };
                if best.as_ref().is_none_or(|b| capacity > b.capacity) {
                    let mut vertices = path.clone();
                    vertices.push(next.clone());
                    *best = Some(HdPath { capacity, vertices });
                }
                continue;
            }
            if best.as_ref().is_some_and(|b| extended <= b.capacity) {
                continue;
            }
            path.push(next.clone());
            visited.insert(next.clone());
            self.search(
                &next,
                Some(&cap),
                extended,
                path,
                visited,
                best,
                visits,
                max_visits,
            )?;
            visited.remove(&next);
            path.pop();
        }
        Ok(())
    }
}

/// A simple path together with its half-duplex capacity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HdPath {
    pub capacity: ExtRational,
    pub vertices: Vec<String>,
}

impl Serialize for CapGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut edges: Vec<(&str, &str, &ExtRational)> = Vec::with_capacity(self.num_edges);
        for (u, out) in &self.adj {
            for (v, c) in out {
                edges.push((u, v, c));
            }
        }
        let mut st = serializer.serialize_struct("CapGraph", 3)?;
        st.serialize_field("source", &self.source)?;
        st.serialize_field("dest", &self.dest)?;
        st.serialize_field("edges", &edges)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CapGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            source: String,
            dest: String,
            edges: Vec<(String, String, ExtRational)>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let mut graph = CapGraph::new(repr.source, repr.dest).map_err(de::Error::custom)?;
        for (u, v, c) in repr.edges {
            graph.add_edge(u, v, c).map_err(de::Error::custom)?;
        }
        Ok(graph)
    }
}

impl fmt::Display for CapGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} -> {} ({} vertices, {} edges)",
            self.source,
            self.dest,
            self.num_vertices(),
            self.num_edges
        )?;
        for (u, out) in &self.adj {
            for (v, c) in out {
                writeln!(f, "  {u} -> {v}: {c}")?;
            }
        }
        Ok(())
    }
}

/// A CNF formula: clauses of nonzero literals, variable `v` appearing as
/// `v` (positive) or `-v` (negated).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<Vec<i32>>) -> Result<Self> {
        for (ci, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 {
                    return Err(Error::Formula(format!("literal 0 in clause {}", ci + 1)));
                }
                if lit.unsigned_abs() as usize > num_vars {
                    return Err(Error::Formula(format!(
                        "literal {lit} exceeds declared variable count {num_vars}"
                    )));
                }
            }
        }
        Ok(Cnf { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<i32>] {
        &self.clauses
    }

    /// Parses DIMACS CNF: comment lines start with `c`, the header is
    /// `p cnf <vars> <clauses>`, and clauses are zero-terminated integer
    /// sequences that may span lines.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses: Vec<Vec<i32>> = Vec::new();
        let mut current: Vec<i32> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                if header.is_some() {
                    return Err(Error::Formula("duplicate problem line".into()));
                }
                let fields: Vec<&str> = rest.split_whitespace().collect();
                if fields.len() != 3 || fields[0] != "cnf" {
                    return Err(Error::Formula(format!("malformed problem line {line:?}")));
                }
                let vars = fields[1]
                    .parse::<usize>()
                    .map_err(|e| Error::Formula(format!("bad variable count: {e}")))?;
                let count = fields[2]
                    .parse::<usize>()
                    .map_err(|e| Error::Formula(format!("bad clause count: {e}")))?;
                header = Some((vars, count));
                continue;
            }
            if header.is_none() {
                return Err(Error::Formula(format!(
                    "clause data before problem line: {line:?}"
                )));
            }
            for token in line.split_whitespace() {
                let lit = token
                    .parse::<i32>()
                    .map_err(|e| Error::Formula(format!("bad literal {token:?}: {e}")))?;
                if lit == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(lit);
                }
            }
        }
        let (num_vars, declared) =
            header.ok_or_else(|| Error::Formula("missing problem line".into()))?;
        if !current.is_empty() {
            return Err(Error::Formula("unterminated final clause".into()));
        }
        if clauses.len() != declared {
            return Err(Error::Formula(format!(
                "problem line declares {declared} clauses, found {}",
                clauses.len()
            )));
        }
        Cnf::new(num_vars, clauses)
    }

    /// `assignment[v - 1]` is the value of variable `v`.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        assignment.len() == self.num_vars
            && self.clauses.iter().all(|clause| {
                clause.iter().any(|&lit| {
                    let value = assignment[(lit.unsigned_abs() - 1) as usize];
                    if lit > 0 {
                        value
                    } else {
                        !value
                    }
                })
            })
    }

    /// First satisfying assignment in binary counting order, by truth
    /// table. Exponential; bounded by `limit` variables.
    pub fn first_satisfying_assignment(&self, limit: usize) -> Result<Option<Vec<bool>>> {
        if self.num_vars > limit {
            return Err(Error::LimitExceeded {
                what: "truth table satisfiability scan",
                requested: self.num_vars,
                limit,
            });
        }
        for mask in 0..(1u64 << self.num_vars) {
            let assignment: Vec<bool> = (0..self.num_vars).map(|v| mask >> v & 1 == 1).collect();
            if self.is_satisfied_by(&assignment) {
                return Ok(Some(assignment));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line::{closed_form_capacity, LineNetwork};

    fn q(s: &str) -> ExtRational {
        s.parse().unwrap()
    }

    fn diamond() -> CapGraph {
        // Two routes: a slow two-hop and a fast two-hop.
        let mut g = CapGraph::new("S", "D").unwrap();
        g.add_edge("S", "a", q("2")).unwrap();
        g.add_edge("a", "D", q("2")).unwrap();
        g.add_edge("S", "b", q("6")).unwrap();
        g.add_edge("b", "D", q("3")).unwrap();
        g
    }

    #[test]
    fn construction_rejects_degenerate_edges() {
        assert!(CapGraph::new("S", "S").is_err());
        let mut g = CapGraph::new("S", "D").unwrap();
        assert!(g.add_edge("a", "a", q("1")).is_err());
        assert!(g.add_edge("a", "b", q("0")).is_err());
        g.add_edge("a", "b", q("1")).unwrap();
        assert!(g.add_edge("a", "b", q("2")).is_err());
    }

    #[test]
    fn path_capacity_hand_values() {
        let g = diamond();
        assert_eq!(g.path_capacity(&["S", "a", "D"]).unwrap(), q("1"));
        assert_eq!(g.path_capacity(&["S", "b", "D"]).unwrap(), q("2"));
        assert!(g.path_capacity(&["S", "a"]).unwrap() == q("2"));
        assert!(g.path_capacity(&["S"]).is_err());
        assert!(g.path_capacity(&["S", "D"]).is_err());
        assert!(g.path_capacity(&["S", "a", "S"]).is_err());
    }

    #[test]
    fn single_edge_path_is_not_relayed() {
        let mut g = CapGraph::new("S", "D").unwrap();
        g.add_edge("S", "D", q("5")).unwrap();
        assert_eq!(g.path_capacity(&["S", "D"]).unwrap(), q("5"));
        let best = g.best_path(1000).unwrap().unwrap();
        assert_eq!(best.capacity, q("5"));
        assert_eq!(best.vertices, vec!["S", "D"]);
    }

    #[test]
    fn best_path_picks_the_wider_route() {
        let best = diamond().best_path(1000).unwrap().unwrap();
        assert_eq!(best.capacity, q("2"));
        assert_eq!(best.vertices, vec!["S", "b", "D"]);
    }

    #[test]
    fn best_path_tie_break_is_lexicographic() {
        let mut g = CapGraph::new("S", "D").unwrap();
        g.add_edge("S", "x", q("2")).unwrap();
        g.add_edge("x", "D", q("2")).unwrap();
        g.add_edge("S", "m", q("2")).unwrap();
        g.add_edge("m", "D", q("2")).unwrap();
        let best = g.best_path(1000).unwrap().unwrap();
        assert_eq!(best.capacity, q("1"));
        assert_eq!(best.vertices, vec!["S", "m", "D"]);
    }

    #[test]
    fn unreachable_destination_yields_none() {
        let mut g = CapGraph::new("S", "D").unwrap();
        g.add_edge("S", "a", q("1")).unwrap();
        assert_eq!(g.best_path(1000).unwrap(), None);
    }

    #[test]
    fn visit_limit_is_enforced() {
        let mut g = CapGraph::new("S", "D").unwrap();
        for u in ["S", "a", "b", "c"] {
            for v in ["a", "b", "c", "D"] {
                if u != v {
                    g.add_edge(u, v, q("1")).unwrap();
                }
            }
        }
        assert!(matches!(
            g.best_path(3),
            Err(Error::LimitExceeded { .. })
        ));
    }

    #[test]
    fn line_graph_path_matches_line_network_capacity() {
        // A bare chain is exactly a line network; the lone path's capacity
        // must agree with the closed form.
        let caps = ["2", "2", "3", "1"];
        let mut g = CapGraph::new("S", "D").unwrap();
        let mut prev = "S".to_string();
        for (i, c) in caps.iter().enumerate() {
            let next = if i + 1 == caps.len() {
                "D".to_string()
            } else {
                format!("u{}", i + 1)
            };
            g.add_edge(prev.clone(), next.clone(), q(c)).unwrap();
            prev = next;
        }
        let net = LineNetwork::parse_links("2,2,3,1").unwrap();
        let best = g.best_path(1000).unwrap().unwrap();
        assert_eq!(best.capacity, closed_form_capacity(&net));
        assert_eq!(best.vertices, vec!["S", "u1", "u2", "u3", "D"]);
    }

    #[test]
    fn graph_json_round_trip_and_shape() {
        let g = diamond();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(
            json,
            r#"{"source":"S","dest":"D","edges":[["S","a","2"],["S","b","6"],["a","D","2"],["b","D","3"]]}"#
        );
        let back: CapGraph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<CapGraph>(
            r#"{"source":"S","dest":"D","edges":[["S","S","1"]]}"#
        )
        .is_err());
    }

    #[test]
    fn infinite_capacities_flow_through() {
        let mut g = CapGraph::new("S", "D").unwrap();
        g.add_edge("S", "a", q("inf")).unwrap();
        g.add_edge("a", "D", q("inf")).unwrap();
        let best = g.best_path(1000).unwrap().unwrap();
        assert!(best.capacity.is_infinite());
    }

    #[test]
    fn dimacs_round_trip_of_the_running_formula() {
        let text = "c running example\np cnf 5 3\n-1 2 3 0\n4 1 -2 0\n-1 3 -5 0\n";
        let cnf = Cnf::parse_dimacs(text).unwrap();
        assert_eq!(cnf.num_vars(), 5);
        assert_eq!(
            cnf.clauses(),
            &[vec![-1, 2, 3], vec![4, 1, -2], vec![-1, 3, -5]]
        );
    }

    #[test]
    fn dimacs_clauses_may_span_lines() {
        let cnf = Cnf::parse_dimacs("p cnf 2 2\n1\n-2 0 2\n0\n").unwrap();
        assert_eq!(cnf.clauses(), &[vec![1, -2], vec![2]]);
    }

    #[test]
    fn dimacs_rejects_malformed_input() {
        assert!(Cnf::parse_dimacs("1 2 0").is_err());
        assert!(Cnf::parse_dimacs("p cnf 2\n1 0").is_err());
        assert!(Cnf::parse_dimacs("p cnf 2 1\n1").is_err());
        assert!(Cnf::parse_dimacs("p cnf 2 2\n1 0").is_err());
        assert!(Cnf::parse_dimacs("p cnf 1 1\n2 0").is_err());
        assert!(Cnf::parse_dimacs("p cnf 1 1\n0\n").is_ok());
    }

    #[test]
    fn satisfaction_and_truth_table() {
        let cnf = Cnf::new(2, vec![vec![1, -2], vec![2]]).unwrap();
        assert!(cnf.is_satisfied_by(&[true, true]));
        assert!(!cnf.is_satisfied_by(&[false, true]));
        assert_eq!(
            cnf.first_satisfying_assignment(8).unwrap(),
            Some(vec![true, true])
        );

        let unsat = Cnf::new(1, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(unsat.first_satisfying_assignment(8).unwrap(), None);

        let empty_clause = Cnf::new(1, vec![vec![]]).unwrap();
        assert_eq!(empty_clause.first_satisfying_assignment(8).unwrap(), None);

        let wide = Cnf::new(40, vec![vec![1]]).unwrap();
        assert!(wide.first_satisfying_assignment(24).is_err());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_graph() -> impl Strategy<Value = CapGraph> {
            // Layered digraph on up to 6 interior vertices with random
            // integer capacities; always includes a fallback route so a
            // path exists.
            (
                proptest::collection::vec((0usize..8, 0usize..8, 1u64..20), 1..20),
                1u64..20,
            )
                .prop_map(|(raw, fallback)| {
                    let name = |i: usize| match i {
                        0 => "S".to_string(),
                        7 => "D".to_string(),
                        i => format!("n{i}"),
                    };
                    let mut g = CapGraph::new("S", "D").unwrap();
                    g.add_edge("S", "n1", ExtRational::from_integer(fallback))
                        .unwrap();
                    g.add_edge("n1", "D", ExtRational::from_integer(fallback))
                        .unwrap();
                    for (u, v, c) in raw {
                        if u < v {
                            let _ = g.add_edge(name(u), name(v), ExtRational::from_integer(c));
                        }
                    }
                    g
                })
        }

        fn scaled(g: &CapGraph, factor: u64) -> CapGraph {
            let mut out = CapGraph::new(g.source(), g.dest()).unwrap();
            let vs: Vec<String> = g.vertices().map(|s| s.to_string()).collect();
            for u in &vs {
                for (v, c) in g.successors(u) {
                    out.add_edge(u.clone(), v, c * &ExtRational::from_integer(factor))
                        .unwrap();
                }
            }
            out
        }

        proptest! {
            #[test]
            fn best_path_beats_every_enumerated_route(g in arb_graph()) {
                let best = g.best_path(100_000).unwrap().unwrap();
                prop_assert_eq!(
                    g.path_capacity(&best.vertices).unwrap(),
                    best.capacity.clone()
                );
                // Spot-check against the direct two-hop routes.
                let vs: Vec<String> = g.vertices().map(|s| s.to_string()).collect();
                for mid in vs {
                    if mid != "S" && mid != "D"
                        && g.edge("S", &mid).is_some()
                        && g.edge(&mid, "D").is_some()
                    {
                        let cap = g.path_capacity(&["S".to_string(), mid, "D".to_string()]).unwrap();
                        prop_assert!(cap <= best.capacity);
                    }
                }
            }

            #[test]
            fn scaling_capacities_keeps_the_argmax_path(g in arb_graph(), factor in 2u64..7) {
                let base = g.best_path(100_000).unwrap().unwrap();
                let big = scaled(&g, factor).best_path(100_000).unwrap().unwrap();
                prop_assert_eq!(&big.vertices, &base.vertices);
                prop_assert_eq!(
                    big.capacity,
                    &base.capacity * &ExtRational::from_integer(factor)
                );
            }
        }
    }
}
