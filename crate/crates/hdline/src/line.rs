//! Model of a half-duplex line network and the exact evaluation of
//! schedules against it.
//!
//! A line network has one source, `N` relays, and one destination, joined by
//! links `1..=N+1` with point-to-point capacities. Every relay either
//! transmits or receives at any instant, so the network state is a bit
//! vector over the relays (`1` = transmit). The source always transmits and
//! the destination always receives. A schedule is a probability distribution
//! over states; it is *simple* when it uses at most `N + 1` states.

use num::rational::BigRational;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::ExtRational;

/// Capacities of links `1..=N+1` for a network with `N = links.len() - 1`
/// relays. Requires at least two links (one relay); zero capacities are
/// rejected by [`LineNetwork::new`] and allowed by
/// [`LineNetwork::new_allow_zero`] for degenerate constructions such as cut
/// witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineNetwork {
    links: Vec<ExtRational>,
}

impl LineNetwork {
    pub fn new(links: Vec<ExtRational>) -> Result<Self> {
        let net = Self::new_allow_zero(links)?;
        for (idx, cap) in net.links.iter().enumerate() {
            if cap.is_zero() {
                return Err(Error::ZeroCapacity { index: idx + 1 });
            }
        }
        Ok(net)
    }

    pub fn new_allow_zero(links: Vec<ExtRational>) -> Result<Self> {
        match links.len() {
            0 => Err(Error::EmptyNetwork),
            1 => Err(Error::NoRelay {
                capacity: links[0].clone(),
            }),
            _ => Ok(LineNetwork { links }),
        }
    }

    /// Convenience constructor from integer capacities.
    pub fn from_integers(caps: &[u64]) -> Result<Self> {
        Self::new(caps.iter().map(|&c| ExtRational::from_integer(c)).collect())
    }

    /// Parses a comma-separated capacity list such as `"2,2,3,1"` or
    /// `"1/2,inf,3"`.
    pub fn parse_links(s: &str) -> Result<Self> {
        let links = s
            .split(',')
            .map(|tok| tok.trim().parse::<ExtRational>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(links)
    }

    pub fn links(&self) -> &[ExtRational] {
        &self.links
    }

    /// Capacity of link `i`, 1-indexed.
    pub fn link(&self, i: usize) -> &ExtRational {
        &self.links[i - 1]
    }

    pub fn relay_count(&self) -> usize {
        self.links.len() - 1
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn is_integer(&self) -> bool {
        self.links.iter().all(|c| c.is_integer())
    }

    pub fn is_finite(&self) -> bool {
        self.links.iter().all(|c| c.is_finite())
    }

    /// Network with every capacity multiplied by a positive rational.
    pub fn scaled(&self, factor: &BigRational) -> Result<Self> {
        let factor = ExtRational::from_ratio(factor.clone())?;
        if factor.is_zero() {
            return Err(Error::ZeroCapacity { index: 0 });
        }
        Ok(LineNetwork {
            links: self.links.iter().map(|c| c * &factor).collect(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct LineNetworkRepr {
    links: Vec<ExtRational>,
}

impl Serialize for LineNetwork {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        LineNetworkRepr {
            links: self.links.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LineNetwork {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = LineNetworkRepr::deserialize(deserializer)?;
        LineNetwork::new(repr.links).map_err(D::Error::custom)
    }
}

/// Relay transmit/receive pattern, bit `i` (1-indexed) set when relay `i`
/// transmits. Rendered leftmost-first: `"010"` means relay 2 transmits.
///
/// Bits are packed most-significant-first so that the derived ordering of
/// states equals the lexicographic ordering of their bit strings.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    n: usize,
    words: Vec<u64>,
}

impl State {
    /// The all-receive state on `n` relays.
    pub fn all_receive(n: usize) -> Self {
        State {
            n,
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut s = State::all_receive(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.set_bit(i + 1, true);
            }
        }
        s
    }

    pub fn width(&self) -> usize {
        self.n
    }

    /// Whether relay `i` transmits; `i` is 1-indexed and must be in `[1:n]`.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.n, "relay index {i} out of range");
        let pos = i - 1;
        self.words[pos / 64] >> (63 - pos % 64) & 1 == 1
    }

    pub fn set_bit(&mut self, i: usize, value: bool) {
        assert!(i >= 1 && i <= self.n, "relay index {i} out of range");
        let pos = i - 1;
        let mask = 1u64 << (63 - pos % 64);
        if value {
            self.words[pos / 64] |= mask;
        } else {
            self.words[pos / 64] &= !mask;
        }
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (1..=self.n).map(|i| self.bit(i))
    }
}

impl FromStr for State {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("empty state string".into()));
        }
        let mut state = State::all_receive(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => state.set_bit(i + 1, true),
                _ => return Err(Error::Parse(format!("invalid state string '{s}'"))),
            }
        }
        Ok(state)
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// True when link `i` carries data in state `s`: its head must transmit and
/// its tail must receive. The source (head of link 1) always transmits and
/// the destination (tail of link `N+1`) always receives.
pub fn state_activates_link(s: &State, i: usize) -> Result<bool> {
    let n = s.width();
    if i < 1 || i > n + 1 {
        return Err(Error::IndexOutOfRange {
            index: i,
            lo: 1,
            hi: n + 1,
        });
    }
    let tail_receives = i == n + 1 || !s.bit(i);
    let head_transmits = i == 1 || s.bit(i - 1);
    Ok(tail_receives && head_transmits)
}

/// A probability distribution over states of a fixed width. Weights are
/// positive exact rationals summing to one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    n: usize,
    entries: BTreeMap<State, ExtRational>,
}

impl Schedule {
    pub fn new(entries: impl IntoIterator<Item = (State, ExtRational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut width = None;
        for (state, weight) in entries {
            match width {
                None => width = Some(state.width()),
                Some(w) if w == state.width() => {}
                Some(w) => {
                    return Err(Error::InvalidSchedule(format!(
                        "state {state} has width {} but the schedule has width {w}",
                        state.width()
                    )))
                }
            }
            if weight.is_infinite() || weight.is_zero() {
                return Err(Error::InvalidSchedule(format!(
                    "state {state} has weight {weight}; weights must be positive and finite"
                )));
            }
            let slot = map.entry(state).or_insert_with(ExtRational::zero);
            *slot = &*slot + &weight;
        }
        let n = width.ok_or_else(|| Error::InvalidSchedule("schedule has no states".into()))?;
        if n == 0 {
            return Err(Error::InvalidSchedule("states must cover at least one relay".into()));
        }
        let total: ExtRational = map.values().cloned().sum();
        if total != ExtRational::one() {
            return Err(Error::InvalidSchedule(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(Schedule { n, entries: map })
    }

    /// The deterministic schedule concentrated on one state.
    pub fn single(state: State) -> Result<Self> {
        Self::new([(state, ExtRational::one())])
    }

    /// Number of relays the schedule covers.
    pub fn width(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// A schedule is simple when it uses at most `N + 1` states.
    pub fn is_simple(&self) -> bool {
        self.entries.len() <= self.n + 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (&State, &ExtRational)> {
        self.entries.iter()
    }

    pub fn weight(&self, state: &State) -> Option<&ExtRational> {
        self.entries.get(state)
    }

    /// Total weight of the states that activate each link; entry `i - 1`
    /// covers link `i`.
    pub fn link_activation_fractions(&self) -> Vec<ExtRational> {
        let mut fractions = vec![ExtRational::zero(); self.n + 1];
        for (state, weight) in &self.entries {
            for (idx, fraction) in fractions.iter_mut().enumerate() {
                if state_activates_link(state, idx + 1).expect("link index in range") {
                    *fraction = &*fraction + weight;
                }
            }
        }
        fractions
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleEntryRepr {
    s: String,
    w: ExtRational,
}

#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    states: Vec<ScheduleEntryRepr>,
}

impl Serialize for Schedule {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        ScheduleRepr {
            states: self
                .entries
                .iter()
                .map(|(state, weight)| ScheduleEntryRepr {
                    s: state.to_string(),
                    w: weight.clone(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = ScheduleRepr::deserialize(deserializer)?;
        let entries = repr
            .states
            .into_iter()
            .map(|e| Ok((e.s.parse::<State>().map_err(D::Error::custom)?, e.w)))
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Schedule::new(entries).map_err(D::Error::custom)
    }
}

/// A cut of the line network: the set of relays on the destination side.
/// Members are 1-indexed and kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cut {
    members: Vec<u32>,
}

impl Cut {
    pub fn new(mut members: Vec<u32>, n: usize) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            if m < 1 || m as usize > n {
                return Err(Error::IndexOutOfRange {
                    index: m as usize,
                    lo: 1,
                    hi: n,
                });
            }
        }
        Ok(Cut { members })
    }

    pub fn empty() -> Self {
        Cut { members: Vec::new() }
    }

    /// The suffix cut `[i:N]`.
    pub fn suffix(i: usize, n: usize) -> Self {
        Cut {
            members: (i as u32..=n as u32).collect(),
        }
    }

    /// Decodes a bitmask where bit `i - 1` means relay `i` is a member.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Cut {
            members: (1..=n as u32).filter(|&i| mask >> (i - 1) & 1 == 1).collect(),
        }
    }

    /// Encodes the cut as a bitmask; requires `n <= 64`.
    pub fn mask(&self) -> u64 {
        self.members.iter().fold(0u64, |m, &i| m | 1 << (i - 1))
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&(i as u32)).is_ok()
    }

    /// Links that cross the cut: link `i` crosses when its tail is on the
    /// destination side (`i` is a member, or `i = N+1`) and its head is on
    /// the source side (`i - 1` is not a member, or `i = 1`).
    pub fn crossing_links(&self, n: usize) -> Vec<usize> {
        (1..=n + 1)
            .filter(|&i| {
                let tail_dest = i == n + 1 || self.contains(i);
                let head_src = i == 1 || !self.contains(i - 1);
                tail_dest && head_src
            })
            .collect()
    }
}

/// Converts channel gain magnitudes to link capacities
/// `log2(1 + |h|^2)`. Gains must be finite and nonnegative.
pub fn from_channel_gains(gains: &[f64]) -> Result<Vec<f64>> {
    gains
        .iter()
        .enumerate()
        .map(|(idx, &h)| {
            if !h.is_finite() || h < 0.0 {
                Err(Error::InvalidGain { index: idx + 1 })
            } else {
                Ok((1.0 + h * h).log2())
            }
        })
        .collect()
}

/// Converts complex channel gains `(re, im)` to link capacities.
pub fn from_complex_gains(gains: &[(f64, f64)]) -> Result<Vec<f64>> {
    gains
        .iter()
        .enumerate()
        .map(|(idx, &(re, im))| {
            if !re.is_finite() || !im.is_finite() {
                Err(Error::InvalidGain { index: idx + 1 })
            } else {
                Ok((1.0 + re * re + im * im).log2())
            }
        })
        .collect()
}

/// The approximate capacity in closed form: the minimum over adjacent link
/// pairs of half their harmonic mean.
pub fn closed_form_capacity(net: &LineNetwork) -> ExtRational {
    (1..=net.relay_count())
        .map(|i| net.link(i).hm(net.link(i + 1)))
        .min()
        .expect("network has at least one relay")
}

/// Prefix minima of the closed form: `m[i-1]` is the approximate capacity of
/// the subnetwork ending at relay `i`, computable left to right with one
/// `hm` and one `min` per relay. The last entry equals
/// [`closed_form_capacity`].
pub fn distributed_capacity_fold(net: &LineNetwork) -> Vec<ExtRational> {
    let mut out = Vec::with_capacity(net.relay_count());
    let mut running = ExtRational::infinity();
    for i in 1..=net.relay_count() {
        let pair = net.link(i).hm(net.link(i + 1));
        running = running.min(pair);
        out.push(running.clone());
    }
    out
}

/// Capacity if every relay could transmit and receive simultaneously: the
/// smallest link capacity.
pub fn fd_capacity(net: &LineNetwork) -> ExtRational {
    net.links().iter().min().cloned().expect("nonempty network")
}

/// The exact rate of a fixed schedule, evaluated over the fundamental cuts:
/// the minimum over links of (activation fraction) x (capacity).
///
/// A link of infinite capacity never constrains the rate, whatever its
/// activation fraction; it contributes only if every link is infinite, in
/// which case the rate is infinite.
pub fn schedule_rate_fundamental(sched: &Schedule, net: &LineNetwork) -> Result<ExtRational> {
    if sched.width() != net.relay_count() {
        return Err(Error::InvalidSchedule(format!(
            "schedule covers {} relays but the network has {}",
            sched.width(),
            net.relay_count()
        )));
    }
    let fractions = sched.link_activation_fractions();
    let mut rate = ExtRational::infinity();
    for (idx, fraction) in fractions.iter().enumerate() {
        let cap = net.link(idx + 1);
        if cap.is_infinite() {
            continue;
        }
        rate = rate.min(fraction * cap);
    }
    Ok(rate)
}

/// The value of one cut under a fixed schedule: the expected total capacity
/// of crossing links that are active, state by state.
pub fn cut_value(sched: &Schedule, cut: &Cut, net: &LineNetwork) -> Result<ExtRational> {
    let n = net.relay_count();
    if sched.width() != n {
        return Err(Error::InvalidSchedule(format!(
            "schedule covers {} relays but the network has {}",
            sched.width(),
            n
        )));
    }
    if let Some(&m) = cut.members().iter().find(|&&m| m as usize > n) {
        return Err(Error::IndexOutOfRange {
            index: m as usize,
            lo: 1,
            hi: n,
        });
    }
    let crossing = cut.crossing_links(n);
    let mut total = ExtRational::zero();
    for (state, weight) in sched.iter() {
        for &i in &crossing {
            if state_activates_link(state, i)? {
                total = &total + &(weight * net.link(i));
            }
        }
    }
    Ok(total)
}
