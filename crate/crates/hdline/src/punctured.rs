//! Punctured subsets and the exponential lower bound on schedule state
//! spaces.
//!
//! A subset of `[a:b]` is *punctured* when it contains no two consecutive
//! integers, and *primitive* when no further element can be added without
//! breaking that. Primitive punctured subsets of `[1:N+1]` are exactly the
//! crossing-link sets of the cuts that can be the unique bottleneck of some
//! network, so their count `T(N+1)` lower-bounds the number of states any
//! universal schedule family must contain. `T` satisfies
//! `T(n) = T(n-2) + T(n-3)`, which grows like `2^{n/3}`.

use num::bigint::BigUint;
use num::{One, ToPrimitive};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::line::{Cut, LineNetwork, State};
use crate::rational::ExtRational;

/// Default maximum span `b - a` accepted by the enumerators.
pub const DEFAULT_MAX_SPAN: i64 = 40;

/// A punctured subset of the integer interval `[a:b]`: sorted, strictly
/// increasing elements with no two consecutive. The empty set is punctured;
/// an empty interval (`a > b`) admits only the empty set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PuncturedSet {
    a: i64,
    b: i64,
    elems: Vec<i64>,
}

impl PuncturedSet {
    pub fn new(a: i64, b: i64, elems: Vec<i64>) -> Result<Self> {
        for pair in elems.windows(2) {
            if pair[1] <= pair[0] + 1 {
                return Err(Error::Parse(format!(
                    "elements {} and {} are not strictly increasing with gap >= 2",
                    pair[0], pair[1]
                )));
            }
        }
        if let (Some(&first), Some(&last)) = (elems.first(), elems.last()) {
            if first < a || last > b {
                return Err(Error::Parse(format!(
                    "elements escape the interval [{a}:{b}]"
                )));
            }
        }
        Ok(PuncturedSet { a, b, elems })
    }

    pub fn empty(a: i64, b: i64) -> Self {
        PuncturedSet { a, b, elems: Vec::new() }
    }

    pub fn bounds(&self) -> (i64, i64) {
        (self.a, self.b)
    }

    pub fn elems(&self) -> &[i64] {
        &self.elems
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn contains(&self, v: i64) -> bool {
        self.elems.binary_search(&v).is_ok()
    }

    /// Largest element; `None` when empty.
    pub fn sup(&self) -> Option<i64> {
        self.elems.last().copied()
    }

    /// The same elements viewed inside a different interval.
    pub fn rebound(&self, a: i64, b: i64) -> Result<Self> {
        PuncturedSet::new(a, b, self.elems.clone())
    }
}

/// A punctured set is primitive when every interval element outside it has
/// a neighbor (or itself) blocking insertion: adding any `i` in
/// `[a:b] \ H` would create a consecutive pair.
pub fn is_primitive(set: &PuncturedSet) -> bool {
    let (a, b) = set.bounds();
    for i in a..=b {
        if !set.contains(i) && !set.contains(i - 1) && !set.contains(i + 1) {
            return false;
        }
    }
    true
}

fn check_span(a: i64, b: i64, limit: i64) -> Result<()> {
    if b - a > limit {
        return Err(Error::LimitExceeded {
            what: "punctured set enumeration",
            requested: (b - a) as usize,
            limit: limit as usize,
        });
    }
    Ok(())
}

/// All punctured subsets of `[a:b]`, including the empty set, in
/// lexicographic order of their element lists. Exponential in the span
/// (about `1.62^(b-a)` sets); bounded by [`DEFAULT_MAX_SPAN`].
pub fn enumerate_punctured(a: i64, b: i64) -> Result<Vec<PuncturedSet>> {
    check_span(a, b, DEFAULT_MAX_SPAN)?;
    let mut out = vec![PuncturedSet::empty(a, b)];
    let mut stack: Vec<i64> = Vec::new();
    fn extend(from: i64, b: i64, stack: &mut Vec<i64>, out: &mut Vec<PuncturedSet>, a: i64) {
        for next in from..=b {
            stack.push(next);
            out.push(PuncturedSet {
                a,
                b,
                elems: stack.clone(),
            });
            extend(next + 2, b, stack, out, a);
            stack.pop();
        }
    }
    extend(a, b, &mut stack, &mut out, a);
    Ok(out)
}

/// All primitive punctured subsets of `[a:b]`, in lexicographic order of
/// their element lists. For `a > b` the answer is the empty set alone.
///
/// Primitivity pins the shape: the first element is `a` or `a + 1`,
/// consecutive gaps are 2 or 3, and the last element is `b - 1` or `b`;
/// the enumeration walks exactly those choices.
pub fn enumerate_primitive(a: i64, b: i64) -> Result<Vec<PuncturedSet>> {
    check_span(a, b, DEFAULT_MAX_SPAN)?;
    if a > b {
        return Ok(vec![PuncturedSet::empty(a, b)]);
    }
    let mut out = Vec::new();
    let mut stack: Vec<i64> = Vec::new();
    fn extend(x: i64, a: i64, b: i64, stack: &mut Vec<i64>, out: &mut Vec<PuncturedSet>) {
        stack.push(x);
        if x >= b - 1 {
            out.push(PuncturedSet {
                a,
                b,
                elems: stack.clone(),
            });
        } else {
            for step in [2, 3] {
                if x + step <= b {
                    extend(x + step, a, b, stack, out);
                }
            }
        }
        stack.pop();
    }
    for first in [a, a + 1] {
        if first <= b {
            extend(first, a, b, &mut stack, &mut out);
        }
    }
    Ok(out)
}

/// `T(n)`, the number of primitive punctured subsets of an interval of `n`
/// integers, by the recurrence `T(n) = T(n-2) + T(n-3)` with
/// `T(1) = 1, T(2) = 2, T(3) = 2`.
pub fn count_primitive_recurrence(n: u64) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            lo: 1,
            hi: usize::MAX,
        });
    }
    let mut table: Vec<BigUint> = vec![BigUint::one(), BigUint::from(2u32), BigUint::from(2u32)];
    for i in 3..n as usize {
        let next = &table[i - 2] + &table[i - 3];
        table.push(next);
    }
    Ok(table[(n - 1) as usize].clone())
}

/// The crossing-link set of a cut, as a punctured subset of `[1:N+1]`.
/// Link `i` crosses when `i` is on the destination side and `i - 1` on the
/// source side; two consecutive links can never both cross.
pub fn cut_to_punctured(cut: &Cut, n: usize) -> PuncturedSet {
    let elems = cut
        .crossing_links(n)
        .into_iter()
        .map(|i| i as i64)
        .collect();
    PuncturedSet {
        a: 1,
        b: n as i64 + 1,
        elems,
    }
}

/// The canonical cut whose crossing links are a given punctured subset of
/// `[1:N+1]`: every relay above the largest element joins the destination
/// side, as do the elements themselves (except `N + 1`).
///
/// Inverts [`cut_to_punctured`] on every nonempty punctured set. For the
/// empty set the supremum is taken as 0, which puts every relay on the
/// destination side; the second return flags that degenerate case (the
/// resulting cut's own crossing set is `{1}`, not the empty set, so the
/// round trip does not apply there). No cut has an empty crossing set:
/// the smallest member of `A` joined with `N + 1` always crosses.
pub fn punctured_to_cut(set: &PuncturedSet, n: usize) -> Result<(Cut, bool)> {
    if set.bounds() != (1, n as i64 + 1) {
        return Err(Error::Parse(format!(
            "expected a punctured subset of [1:{}], got bounds [{}:{}]",
            n as i64 + 1,
            set.bounds().0,
            set.bounds().1
        )));
    }
    let sup = set.sup().unwrap_or(0);
    let mut members: Vec<u32> = set
        .elems()
        .iter()
        .filter(|&&i| i <= n as i64)
        .map(|&i| i as u32)
        .collect();
    for i in 1..=n as i64 {
        if i > sup {
            members.push(i as u32);
        }
    }
    Ok((Cut::new(members, n)?, set.is_empty()))
}

/// The cut objective in link terms: total capacity of the crossing links.
pub fn objective_g1(cut: &Cut, net: &LineNetwork) -> ExtRational {
    cut.crossing_links(net.relay_count())
        .into_iter()
        .map(|i| net.link(i).clone())
        .sum()
}

/// The same objective in punctured-set terms: total capacity of the
/// member links.
pub fn objective_g2(set: &PuncturedSet, net: &LineNetwork) -> ExtRational {
    set.elems().iter().map(|&i| net.link(i as usize).clone()).sum()
}

/// The transmit pattern `1_{A^c}`: relay `i` transmits exactly when it is
/// not a member of the cut. This state activates precisely the crossing
/// links of the cut.
pub fn marked_state(cut: &Cut, n: usize) -> State {
    State::from_bits(&(1..=n).map(|i| !cut.contains(i)).collect::<Vec<_>>())
}

/// The witness network of a cut: unit capacity on each crossing link,
/// infinite elsewhere. Only defined for cuts that are the canonical cut of
/// a primitive punctured set; on such networks the full-duplex capacity is
/// 1 and it is met exactly by the single state [`marked_state`].
pub fn witness_network_for_cut(cut: &Cut, n: usize) -> Result<LineNetwork> {
    let b = cut_to_punctured(cut, n);
    let (canonical, _) = punctured_to_cut(&b, n)?;
    if !is_primitive(&b) || &canonical != cut {
        return Err(Error::WitnessNotApplicable);
    }
    LineNetwork::new(
        (1..=n + 1)
            .map(|i| {
                if b.contains(i as i64) {
                    ExtRational::one()
                } else {
                    ExtRational::infinity()
                }
            })
            .collect(),
    )
}

/// Single-state scan of a witness network.
///
/// `unique_among_candidates` is the load-bearing fact for the lower bound:
/// among the marked states of all primitive punctured subsets, only this
/// cut's own marked state attains the full-duplex capacity of this cut's
/// witness network, so no marked state can be dropped from the family.
/// Globally, every maximizing state activates all crossing links; the
/// marked state always does, but when the crossing set has an internal gap
/// of 3 the relay inside the gap is unconstrained and flipping it yields
/// further (non-candidate) maximizers, counted in
/// `global_maximizer_count`.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub network: LineNetwork,
    pub marked: String,
    pub rate_marked: ExtRational,
    pub fd_capacity: ExtRational,
    pub attains_fd: bool,
    pub unique_among_candidates: bool,
    pub global_maximizer_count: usize,
    pub unique_globally: bool,
}

/// Scans all `2^N` single-state schedules of the witness network of `cut`
/// and all candidate marked states. Exponential; bounded by `limit` relays.
pub fn witness_report(cut: &Cut, n: usize, limit: usize) -> Result<WitnessReport> {
    if n > limit {
        return Err(Error::LimitExceeded {
            what: "witness single-state scan",
            requested: n,
            limit,
        });
    }
    let network = witness_network_for_cut(cut, n)?;
    let marked = marked_state(cut, n);
    let rate_of = |state: &State| -> Result<ExtRational> {
        let sched = crate::line::Schedule::single(state.clone())?;
        crate::line::schedule_rate_fundamental(&sched, &network)
    };
    let rate_marked = rate_of(&marked)?;
    let fd = crate::line::fd_capacity(&network);

    let mut global_max = ExtRational::zero();
    let mut maximizers = 0usize;
    for mask in 0..(1u64 << n) {
        let state = State::from_bits(&(0..n).map(|b| mask >> b & 1 == 1).collect::<Vec<_>>());
        let rate = rate_of(&state)?;
        match rate.cmp(&global_max) {
            std::cmp::Ordering::Greater => {
                global_max = rate;
                maximizers = 1;
            }
            std::cmp::Ordering::Equal => maximizers += 1,
            std::cmp::Ordering::Less => {}
        }
    }

    let mut unique_among_candidates = true;
    for other in enumerate_primitive(1, n as i64 + 1)? {
        let (other_cut, _) = punctured_to_cut(&other, n)?;
        if other_cut == *cut {
            continue;
        }
        let other_rate = rate_of(&marked_state(&other_cut, n))?;
        if other_rate >= rate_marked {
            unique_among_candidates = false;
        }
    }

    Ok(WitnessReport {
        attains_fd: rate_marked == fd && rate_marked == global_max,
        unique_globally: maximizers == 1,
        marked: marked.to_string(),
        rate_marked,
        fd_capacity: fd,
        unique_among_candidates,
        global_maximizer_count: maximizers,
        network,
    })
}

#[derive(Clone, Debug)]
enum NumRepr {
    Small(u64),
    Big(String),
}

impl Serialize for NumRepr {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NumRepr::Small(v) => serializer.serialize_u64(*v),
            NumRepr::Big(s) => serializer.serialize_str(s),
        }
    }
}

fn num_repr(v: &BigUint) -> NumRepr {
    match v.to_u64() {
        Some(small) => NumRepr::Small(small),
        None => NumRepr::Big(v.to_string()),
    }
}

/// Certificate that the state-space lower bound holds at `relays` relays:
/// the primitive punctured subsets of `[1:relays+1]` counted two ways, and
/// the comparison `2 T(relays+1) >= 2^{(relays+1)/3}`, checked exactly as
/// `(2T)^3 >= 2^{relays+1}`.
#[derive(Clone, Debug)]
pub struct LowerBoundReport {
    pub relays: usize,
    pub enumerated: u64,
    pub recurrence: BigUint,
    pub bound_holds: bool,
    /// `T(relays+1) / T(relays)`, an estimate of the growth base.
    pub growth_ratio: f64,
}

impl Serialize for LowerBoundReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut out = serializer.serialize_struct("LowerBoundReport", 5)?;
        out.serialize_field("relays", &self.relays)?;
        out.serialize_field("enumerated", &self.enumerated)?;
        out.serialize_field("recurrence", &num_repr(&self.recurrence))?;
        out.serialize_field("bound_holds", &self.bound_holds)?;
        out.serialize_field("growth_ratio", &self.growth_ratio)?;
        out.end()
    }
}

/// Checks `2 T(n) >= 2^{n/3}` exactly.
pub fn lower_bound_holds(n: u64, t: &BigUint) -> bool {
    let doubled = t * 2u32;
    doubled.pow(3) >= BigUint::one() << n
}

/// Counts primitive punctured subsets of `[1:relays+1]` by enumeration and
/// by recurrence; errors if they disagree, certifying the `2^{N/3}` growth
/// otherwise.
pub fn lower_bound_certificate(relays: usize) -> Result<LowerBoundReport> {
    if relays == 0 {
        return Err(Error::IndexOutOfRange {
            index: 0,
            lo: 1,
            hi: usize::MAX,
        });
    }
    let n = relays as u64 + 1;
    let enumerated = enumerate_primitive(1, n as i64)?.len() as u64;
    let recurrence = count_primitive_recurrence(n)?;
    if BigUint::from(enumerated) != recurrence {
        return Err(Error::Internal(format!(
            "primitive set count mismatch at n = {n}: enumeration {enumerated}, recurrence {recurrence}"
        )));
    }
    let prev = count_primitive_recurrence(n - 1)?;
    let growth_ratio =
        recurrence.to_f64().unwrap_or(f64::INFINITY) / prev.to_f64().unwrap_or(f64::INFINITY);
    Ok(LowerBoundReport {
        relays,
        enumerated,
        bound_holds: lower_bound_holds(n, &recurrence),
        recurrence,
        growth_ratio,
    })
}
