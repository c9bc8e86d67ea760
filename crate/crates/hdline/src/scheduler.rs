//! Construction of optimal simple schedules by edge coloring.
//!
//! For integer capacities, each link `i` needs `n_i = M / l_i` activation
//! slots out of `delta` to carry `M` units, where `M = lcm(l_i)` and
//! `delta = max_i (n_i + n_{i+1})`. Assigning links color intervals that
//! alternate between the bottom and the top of `[1:delta]` keeps adjacent
//! links disjoint; grouping equal-membership colors into network states then
//! yields a schedule with at most `N + 1` states whose rate `M / delta`
//! meets the closed-form capacity exactly. Rational capacities are lifted
//! to integers first; real capacities are truncated to rationals with a
//! controlled error.

use num::bigint::{BigInt, BigUint};
use num::integer::Integer;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::line::{schedule_rate_fundamental, LineNetwork, Schedule, State};
use crate::rational::ExtRational;

/// Default denominator for rationalizing real-valued capacities.
pub const DEFAULT_DENOMINATOR: u64 = 1_000_000;

/// Slot counts for an integer network: `m = lcm` of the capacities and
/// `n[i-1] = m / l_i` slots needed by link `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplicities {
    pub m: BigUint,
    pub n: Vec<BigUint>,
}

/// Color interval `[lo:hi]` (inclusive) assigned to each link, within the
/// palette `[1:delta]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorAssignment {
    pub delta: BigUint,
    pub intervals: Vec<(BigUint, BigUint)>,
}

/// One group of colors: a maximal interval on which every link keeps the
/// same active/idle status, together with the network state realizing that
/// status and the fraction of time it runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub color_lo: BigUint,
    pub color_hi: BigUint,
    pub state: State,
    pub weight: ExtRational,
}

/// The schedule in color-group form, groups listed in descending color
/// order. `boundaries` are the distinct interval endpoints that delimit the
/// groups, also descending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupedSchedule {
    pub delta: BigUint,
    pub boundaries: Vec<BigUint>,
    pub groups: Vec<Group>,
}

impl GroupedSchedule {
    /// Collapses the groups into a plain schedule, summing weights of any
    /// repeated states.
    pub fn to_schedule(&self) -> Result<Schedule> {
        Schedule::new(
            self.groups
                .iter()
                .map(|g| (g.state.clone(), g.weight.clone())),
        )
    }
}

#[derive(Serialize)]
#[serde(untagged)]
enum ColorRepr {
    Small(u64),
    Big(String),
}

fn color_repr(c: &BigUint) -> ColorRepr {
    match c.to_u64() {
        Some(v) => ColorRepr::Small(v),
        None => ColorRepr::Big(c.to_string()),
    }
}

impl Serialize for GroupedSchedule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct GroupRepr {
            s: String,
            w: ExtRational,
            colors: [ColorRepr; 2],
        }
        let states: Vec<GroupRepr> = self
            .groups
            .iter()
            .map(|g| GroupRepr {
                s: g.state.to_string(),
                w: g.weight.clone(),
                colors: [color_repr(&g.color_lo), color_repr(&g.color_hi)],
            })
            .collect();
        let mut out = serializer.serialize_struct("GroupedSchedule", 1)?;
        out.serialize_field("states", &states)?;
        out.end()
    }
}

/// Scales a finite positive rational network to the smallest integer
/// multiple: multiplies by the lcm of the capacity denominators and returns
/// the integer network together with `scale`, where
/// `original = integer * scale`. Integer networks pass through unchanged.
pub fn integerize(net: &LineNetwork) -> Result<(LineNetwork, BigRational)> {
    let mut denominators_lcm = BigInt::one();
    for (idx, cap) in net.links().iter().enumerate() {
        let ratio = cap.as_ratio().ok_or_else(|| Error::UnsupportedCapacity {
            index: idx + 1,
            value: cap.to_string(),
            expected: "a positive finite rational",
        })?;
        if ratio.is_zero() {
            return Err(Error::UnsupportedCapacity {
                index: idx + 1,
                value: cap.to_string(),
                expected: "a positive finite rational",
            });
        }
        denominators_lcm = denominators_lcm.lcm(ratio.denom());
    }
    let factor = BigRational::from_integer(denominators_lcm.clone());
    let integer_net = net.scaled(&factor)?;
    debug_assert!(integer_net.is_integer());
    let scale = BigRational::new(BigInt::one(), denominators_lcm);
    Ok((integer_net, scale))
}

/// Slot counts for an integer network.
pub fn multiplicities(net: &LineNetwork) -> Result<Multiplicities> {
    let mut caps = Vec::with_capacity(net.num_links());
    for (idx, cap) in net.links().iter().enumerate() {
        let value = cap
            .as_ratio()
            .filter(|r| r.is_integer() && !r.is_zero())
            .ok_or_else(|| Error::UnsupportedCapacity {
                index: idx + 1,
                value: cap.to_string(),
                expected: "a positive integer capacity (integerize first)",
            })?;
        caps.push(value.numer().to_biguint().expect("positive capacity"));
    }
    let mut m = BigUint::one();
    for cap in &caps {
        m = m.lcm(cap);
    }
    let n = caps.iter().map(|cap| &m / cap).collect();
    Ok(Multiplicities { m, n })
}

/// Assigns each link its color interval: even links take the lowest `n_i`
/// colors, odd links the highest, inside a palette of
/// `delta = max_i (n_i + n_{i+1})` colors. Adjacent links always get
/// disjoint intervals.
pub fn color_intervals(mult: &Multiplicities) -> ColorAssignment {
    let delta = mult
        .n
        .windows(2)
        .map(|w| &w[0] + &w[1])
        .max()
        .expect("at least two links");
    let intervals = mult
        .n
        .iter()
        .enumerate()
        .map(|(idx, n_i)| {
            let link = idx + 1;
            if link % 2 == 0 {
                (BigUint::one(), n_i.clone())
            } else {
                (&delta - n_i + 1u32, delta.clone())
            }
        })
        .collect();
    ColorAssignment { delta, intervals }
}

/// Groups colors with identical link membership into network states.
///
/// The distinct interval endpoints split the palette into maximal runs; a
/// run lying inside `C_i` means link `i` is active throughout it, which
/// forces relay `i` to receive and relay `i - 1` to transmit. Relays not
/// forced by any containment keep a carry bit that is `1` until the first
/// containing interval is seen, which routes them around the active links.
pub fn group_colors(assign: &ColorAssignment) -> Result<GroupedSchedule> {
    let num_links = assign.intervals.len();
    if num_links < 2 {
        return Err(Error::Internal(
            "color assignment must cover at least two links".into(),
        ));
    }
    let relays = num_links - 1;
    let delta = &assign.delta;
    let one = BigUint::one();
    for (idx, (lo, hi)) in assign.intervals.iter().enumerate() {
        if lo < &one || hi > delta || lo > hi {
            return Err(Error::Internal(format!(
                "interval [{lo}:{hi}] of link {} escapes the palette [1:{delta}]",
                idx + 1
            )));
        }
    }

    let mut boundaries: Vec<BigUint> = Vec::with_capacity(2 * num_links);
    for (lo, hi) in &assign.intervals {
        boundaries.push(lo.clone());
        boundaries.push(hi + 1u32);
    }
    boundaries.sort_unstable_by(|a, b| b.cmp(a));
    boundaries.dedup();

    let mut groups = Vec::with_capacity(boundaries.len() - 1);
    for j in 0..boundaries.len() - 1 {
        let hi = &boundaries[j] - 1u32;
        let lo = boundaries[j + 1].clone();
        let size = &hi - &lo + 1u32;
        let weight = ExtRational::new(
            BigInt::from(size),
            BigInt::from(delta.clone()),
        )?;
        let mut state = State::all_receive(relays);
        let mut carry = true;
        for i in 1..=num_links {
            let (c_lo, c_hi) = &assign.intervals[i - 1];
            if &lo >= c_lo && &hi <= c_hi {
                carry = false;
                if i < num_links {
                    state.set_bit(i, false);
                }
                if i > 1 {
                    state.set_bit(i - 1, true);
                }
            } else if i < num_links {
                state.set_bit(i, carry);
            }
        }
        groups.push(Group {
            color_lo: lo,
            color_hi: hi,
            state,
            weight,
        });
    }
    Ok(GroupedSchedule {
        delta: delta.clone(),
        boundaries,
        groups,
    })
}

/// Every intermediate of the schedule construction, kept for inspection.
#[derive(Clone, Debug)]
pub struct SchedulePipeline {
    /// The integerized network the coloring ran on.
    pub integer_network: LineNetwork,
    /// `original = integer_network * scale`.
    pub scale: BigRational,
    pub multiplicities: Multiplicities,
    pub colors: ColorAssignment,
    pub grouped: GroupedSchedule,
    pub schedule: Schedule,
    /// Exact rate of the schedule on the original network.
    pub rate: ExtRational,
}

/// Runs the full pipeline on a finite positive rational network.
pub fn build_pipeline(net: &LineNetwork) -> Result<SchedulePipeline> {
    let (integer_network, scale) = integerize(net)?;
    let mult = multiplicities(&integer_network)?;
    let colors = color_intervals(&mult);
    let grouped = group_colors(&colors)?;
    let schedule = grouped.to_schedule()?;
    let rate = schedule_rate_fundamental(&schedule, net)?;
    Ok(SchedulePipeline {
        integer_network,
        scale,
        multiplicities: mult,
        colors,
        grouped,
        schedule,
        rate,
    })
}

/// Builds an optimal simple schedule for a finite positive rational
/// network. The schedule has at most `N + 1` states and its rate equals the
/// closed-form capacity.
pub fn build_simple_schedule(net: &LineNetwork) -> Result<Schedule> {
    Ok(build_pipeline(net)?.schedule)
}

/// Truncates real capacities to rationals with denominator `d`:
/// `q_i = floor(l_i * d) / d`, so `l_i - 1/d <= q_i <= l_i` exactly.
/// Conversion from `f64` is exact, so the guarantee holds with no float
/// rounding caveats.
pub fn rationalize_links(links: &[f64], denominator: u64) -> Result<Vec<BigRational>> {
    if denominator == 0 {
        return Err(Error::Parse("denominator must be positive".into()));
    }
    let d = BigInt::from(denominator);
    links
        .iter()
        .enumerate()
        .map(|(idx, &x)| {
            if !x.is_finite() || x <= 0.0 {
                return Err(Error::UnsupportedCapacity {
                    index: idx + 1,
                    value: x.to_string(),
                    expected: "a positive finite float",
                });
            }
            let exact = BigRational::from_float(x).expect("finite float");
            let scaled = exact * BigRational::from_integer(d.clone());
            let floored = scaled.floor().to_integer();
            if floored.is_zero() {
                return Err(Error::ResolutionTooCoarse {
                    index: idx + 1,
                    denominator,
                });
            }
            Ok(BigRational::new(floored, d.clone()))
        })
        .collect()
}

/// Rationalizes a real network and returns it with the error budget
/// `epsilon = 1/d`. The resulting capacity sandwich is checked by
/// [`crate::verify::epsilon_sandwich_check`].
pub fn rationalize_real(links: &[f64], denominator: u64) -> Result<(LineNetwork, BigRational)> {
    let rationals = rationalize_links(links, denominator)?;
    let net = LineNetwork::new(
        rationals
            .into_iter()
            .map(|r| ExtRational::from_ratio(r).expect("nonnegative"))
            .collect::<Vec<_>>(),
    )?;
    let epsilon = BigRational::new(BigInt::one(), BigInt::from(denominator));
    Ok((net, epsilon))
}
