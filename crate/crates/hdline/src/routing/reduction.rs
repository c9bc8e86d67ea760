//! Hardness of best-path routing under half-duplex relaying, by reduction
//! from 3SAT.
//!
//! A CNF formula becomes a chain of clause gadgets: the path must cross
//! every gadget, and crossing it means committing to one literal of that
//! clause. Complementary literal choices in different clauses are
//! forbidden by merging their branch vertices, so a simple path cannot
//! take both. Capacities are set so that an honest traversal sustains `z`,
//! any shortcut through a merged vertex drops to `z / 2`, and the reverse
//! shortcut forces a revisit and dies on path simplicity. The formula is
//! satisfiable exactly when the best simple path reaches capacity `z`,
//! so an algorithm for best half-duplex routing decides 3SAT.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::ExtRational;
use crate::routing::{CapGraph, Cnf, HdPath};

/// A literal occurrence: (clause index, slot index), both 1-based.
pub type Occurrence = (usize, usize);

/// Everything the reduction produces for one formula.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionArtifacts {
    /// The clause-gadget chain, one branch per literal, all capacities
    /// infinite.
    pub base: CapGraph,
    /// The chain with every conflicted branch vertex split into wrapped
    /// copies, one per conflict partner, still all infinite.
    pub expanded: CapGraph,
    /// The final graph: conflicting copies merged and capacities assigned.
    pub merged: CapGraph,
    /// Cross-clause complementary literal pairs, first clause index lower.
    pub conflicts: Vec<(Occurrence, Occurrence)>,
    /// The copy-vertex label pairs of `expanded` that `merged` fuses.
    pub merged_copies: Vec<(String, String)>,
    /// The capacity level of an honest traversal.
    pub z: ExtRational,
}

fn t_label(i: usize) -> String {
    format!("t{i}")
}

fn r_label(i: usize) -> String {
    format!("r{i}")
}

fn v_label((i, j): Occurrence) -> String {
    format!("v{i}{j}")
}

fn copy_label(own: Occurrence, partner: Occurrence) -> String {
    format!("v_{}{}_{}{}", own.0, own.1, partner.0, partner.1)
}

fn a_label(own: Occurrence, partner: Occurrence) -> String {
    format!("a_{}{}_{}{}", own.0, own.1, partner.0, partner.1)
}

fn b_label(own: Occurrence, partner: Occurrence) -> String {
    format!("b_{}{}_{}{}", own.0, own.1, partner.0, partner.1)
}

fn f_label(first: Occurrence, second: Occurrence) -> String {
    format!("f_{}{}_{}{}", first.0, first.1, second.0, second.1)
}

/// All cross-clause complementary literal pairs, in clause-major order.
pub fn find_conflicts(cnf: &Cnf) -> Vec<(Occurrence, Occurrence)> {
    let clauses = cnf.clauses();
    let mut out = Vec::new();
    for i in 0..clauses.len() {
        for k in i + 1..clauses.len() {
            for (j, &lit_a) in clauses[i].iter().enumerate() {
                for (l, &lit_b) in clauses[k].iter().enumerate() {
                    if lit_a == -lit_b {
                        out.push(((i + 1, j + 1), (k + 1, l + 1)));
                    }
                }
            }
        }
    }
    out
}

/// Sorted conflict partners of one occurrence.
fn partners(conflicts: &[(Occurrence, Occurrence)], occ: Occurrence) -> Vec<Occurrence> {
    let mut out: Vec<Occurrence> = conflicts
        .iter()
        .filter_map(|&(p, q)| {
            if p == occ {
                Some(q)
            } else if q == occ {
                Some(p)
            } else {
                None
            }
        })
        .collect();
    out.sort_unstable();
    out
}

fn check_three_sat(cnf: &Cnf) -> Result<()> {
    if cnf.clauses().is_empty() {
        return Err(Error::Formula("the reduction needs at least one clause".into()));
    }
    for (ci, clause) in cnf.clauses().iter().enumerate() {
        if clause.len() > 3 {
            return Err(Error::Formula(format!(
                "clause {} has {} literals; at most 3 are supported",
                ci + 1,
                clause.len()
            )));
        }
    }
    Ok(())
}

/// The spine shared by all three graphs: source into the first gadget,
/// gadget-to-gadget links, last gadget into the destination.
fn add_spine(g: &mut CapGraph, m: usize) -> Result<()> {
    let inf = ExtRational::infinity;
    g.add_edge("S", t_label(1), inf())?;
    for i in 1..m {
        g.add_edge(r_label(i), t_label(i + 1), inf())?;
    }
    g.add_edge(r_label(m), "D", inf())?;
    Ok(())
}

/// The plain clause-gadget chain, one parallel branch per literal.
pub fn build_base(cnf: &Cnf) -> Result<CapGraph> {
    check_three_sat(cnf)?;
    let mut g = CapGraph::new("S", "D")?;
    add_spine(&mut g, cnf.clauses().len())?;
    let inf = ExtRational::infinity;
    for (ci, clause) in cnf.clauses().iter().enumerate() {
        let i = ci + 1;
        for j in 1..=clause.len() {
            g.add_edge(t_label(i), v_label((i, j)), inf())?;
            g.add_edge(v_label((i, j)), r_label(i), inf())?;
        }
    }
    Ok(g)
}

/// How the middle vertex of a wrapped copy is labeled and capacitated.
enum MidKind {
    /// Expanded graph: every copy is its own vertex, all infinite.
    Copies,
    /// Merged graph: conflicting copies share one vertex, and the side
    /// whose clause comes first carries `z` on entry, the other on exit.
    Merged(ExtRational),
}

fn build_chained(
    cnf: &Cnf,
    conflicts: &[(Occurrence, Occurrence)],
    kind: MidKind,
) -> Result<CapGraph> {
    let mut g = CapGraph::new("S", "D")?;
    add_spine(&mut g, cnf.clauses().len())?;
    let inf = ExtRational::infinity;
    for (ci, clause) in cnf.clauses().iter().enumerate() {
        let i = ci + 1;
        for j in 1..=clause.len() {
            let occ = (i, j);
            let ps = partners(conflicts, occ);
            if ps.is_empty() {
                g.add_edge(t_label(i), v_label(occ), inf())?;
                g.add_edge(v_label(occ), r_label(i), inf())?;
                continue;
            }
            let mut prev = t_label(i);
            for (idx, &partner) in ps.iter().enumerate() {
                let own_first = occ < partner;
                let (mid, into_mid, out_of_mid) = match &kind {
                    MidKind::Copies => (copy_label(occ, partner), inf(), inf()),
                    MidKind::Merged(z) => {
                        let mid = if own_first {
                            f_label(occ, partner)
                        } else {
                            f_label(partner, occ)
                        };
                        // The earlier clause meters its entry, the later
                        // one its exit; an honest crossing sees z once,
                        // a forward shortcut sees z twice and is halved.
                        if own_first {
                            (mid, z.clone(), inf())
                        } else {
                            (mid, inf(), z.clone())
                        }
                    }
                };
                g.add_edge(prev, a_label(occ, partner), inf())?;
                g.add_edge(a_label(occ, partner), mid.clone(), into_mid)?;
                g.add_edge(mid, b_label(occ, partner), out_of_mid)?;
                prev = b_label(occ, partner);
                if idx + 1 == ps.len() {
                    g.add_edge(prev.clone(), r_label(i), inf())?;
                }
            }
        }
    }
    Ok(g)
}

/// The chain with each conflicted branch split into wrapped copies.
pub fn build_expanded(cnf: &Cnf, conflicts: &[(Occurrence, Occurrence)]) -> Result<CapGraph> {
    check_three_sat(cnf)?;
    build_chained(cnf, conflicts, MidKind::Copies)
}

/// The final reduction graph with merged copies and capacities.
pub fn build_merged(
    cnf: &Cnf,
    conflicts: &[(Occurrence, Occurrence)],
    z: &ExtRational,
) -> Result<CapGraph> {
    check_three_sat(cnf)?;
    build_chained(cnf, conflicts, MidKind::Merged(z.clone()))
}

/// Runs the whole reduction and certifies the construction is polynomial:
/// vertex and edge counts are pinned to closed forms in the clause count,
/// literal count, and conflict count.
pub fn reduce(cnf: &Cnf, z: &ExtRational) -> Result<ReductionArtifacts> {
    check_three_sat(cnf)?;
    if !z.is_finite() || z.is_zero() {
        return Err(Error::Formula(
            "the capacity level z must be finite and positive".into(),
        ));
    }
    let conflicts = find_conflicts(cnf);
    let base = build_base(cnf)?;
    let expanded = build_expanded(cnf, &conflicts)?;
    let merged = build_merged(cnf, &conflicts, z)?;
    let merged_copies: Vec<(String, String)> = conflicts
        .iter()
        .map(|&(p, q)| (copy_label(p, q), copy_label(q, p)))
        .collect();

    let m = cnf.clauses().len();
    let literals: usize = cnf.clauses().iter().map(|c| c.len()).sum();
    let conflicted = cnf
        .clauses()
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| (1..=c.len()).map(move |j| (ci + 1, j)))
        .filter(|&occ| !partners(&conflicts, occ).is_empty())
        .count();
    let f = conflicts.len();
    // S, D, the spine, one vertex per clean branch, and per conflict two
    // wrappers on each side plus the shared middle.
    let expect_v = 2 + 2 * m + (literals - conflicted) + 5 * f;
    if merged.num_vertices() != expect_v {
        return Err(Error::Internal(format!(
            "merged graph has {} vertices, expected {expect_v}",
            merged.num_vertices()
        )));
    }
    // Spine has m + 1 edges, a clean branch 2, a conflicted branch with d
    // partners 3d + 1.
    let expect_e = (m + 1) + 2 * (literals - conflicted) + conflicted + 6 * f;
    if merged.num_edges() != expect_e {
        return Err(Error::Internal(format!(
            "merged graph has {} edges, expected {expect_e}",
            merged.num_edges()
        )));
    }

    Ok(ReductionArtifacts {
        base,
        expanded,
        merged,
        conflicts,
        merged_copies,
        z: z.clone(),
    })
}

/// Reads a satisfying assignment off a capacity-`z` path: each plain
/// branch vertex or honestly-crossed merged vertex commits one literal;
/// variables the path never commits default to false.
pub fn extract_assignment(cnf: &Cnf, path: &HdPath) -> Result<Vec<bool>> {
    let mut assignment: Vec<Option<bool>> = vec![None; cnf.num_vars()];
    let mut commit = |occ: Occurrence| -> Result<()> {
        let (i, j) = occ;
        let lit = *cnf
            .clauses()
            .get(i - 1)
            .and_then(|c| c.get(j - 1))
            .ok_or_else(|| Error::Formula(format!("no literal at clause {i}, slot {j}")))?;
        let var = lit.unsigned_abs() as usize;
        let value = lit > 0;
        match assignment[var - 1] {
            Some(old) if old != value => Err(Error::Formula(format!(
                "path commits variable {var} both ways"
            ))),
            _ => {
                assignment[var - 1] = Some(value);
                Ok(())
            }
        }
    };
    let parse_occ = |digits: &str| -> Option<Occurrence> {
        // Slot indices are single digits (at most 3 literals per clause),
        // so the last character is the slot and the rest is the clause.
        let (i, j) = digits.split_at(digits.len().checked_sub(1)?);
        Some((i.parse().ok()?, j.parse().ok()?))
    };
    for pair in path.vertices.windows(2) {
        let (prev, cur) = (pair[0].as_str(), pair[1].as_str());
        if let Some(digits) = cur.strip_prefix('v') {
            if !digits.starts_with('_') {
                let occ = parse_occ(digits)
                    .ok_or_else(|| Error::Formula(format!("unparsable branch label {cur:?}")))?;
                commit(occ)?;
            }
        } else if cur.starts_with("f_") {
            // The owner of this crossing is whichever side's entry wrapper
            // precedes the merged vertex on the path.
            let digits = prev
                .strip_prefix("a_")
                .ok_or_else(|| Error::Formula(format!("merged vertex {cur:?} entered from {prev:?}, not an entry wrapper")))?;
            let own = digits
                .split('_')
                .next()
                .and_then(parse_occ)
                .ok_or_else(|| Error::Formula(format!("unparsable wrapper label {prev:?}")))?;
            commit(own)?;
        }
    }
    Ok(assignment.into_iter().map(|v| v.unwrap_or(false)).collect())
}

/// Both sides of the reduction run on one formula, for cross-checking.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionCheck {
    pub satisfiable: bool,
    pub best_capacity: Option<ExtRational>,
    pub best_path: Option<Vec<String>>,
    /// Whether the best path reaches capacity `z`.
    pub decision: bool,
    /// `satisfiable == decision`; the point of the construction.
    pub agree: bool,
    pub assignment: Option<Vec<bool>>,
    pub assignment_satisfies: Option<bool>,
}

/// Decides the formula twice: by truth table, and by best-path search on
/// the reduction graph, extracting and checking an assignment from the
/// path when the search side says satisfiable.
pub fn verify_reduction(
    cnf: &Cnf,
    z: &ExtRational,
    truth_table_limit: usize,
    max_visits: usize,
) -> Result<ReductionCheck> {
    let artifacts = reduce(cnf, z)?;
    let satisfiable = cnf.first_satisfying_assignment(truth_table_limit)?.is_some();
    let best = artifacts.merged.best_path(max_visits)?;
    let decision = best.as_ref().is_some_and(|p| p.capacity >= *z);
    let (assignment, assignment_satisfies) = match (&best, decision) {
        (Some(path), true) => {
            let a = extract_assignment(cnf, path)?;
            let ok = cnf.is_satisfied_by(&a);
            (Some(a), Some(ok))
        }
        _ => (None, None),
    };
    Ok(ReductionCheck {
        satisfiable,
        best_capacity: best.as_ref().map(|p| p.capacity.clone()),
        best_path: best.map(|p| p.vertices),
        decision,
        agree: satisfiable == decision,
        assignment,
        assignment_satisfies,
    })
}
