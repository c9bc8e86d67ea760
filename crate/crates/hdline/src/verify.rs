//! Certification of schedules against brute-force oracles.
//!
//! The rate formula used everywhere else in the crate minimizes over the
//! `N + 1` fundamental cuts only. This module provides the independent
//! oracle that minimizes over all `2^N` cuts, certificates comparing a
//! schedule's rate to the closed-form capacity, and the sandwich check for
//! rationalized real capacities.

use num::rational::BigRational;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::line::{
    closed_form_capacity, cut_value, schedule_rate_fundamental, Cut, LineNetwork, Schedule,
};
use crate::rational::ExtRational;
use crate::scheduler::{build_simple_schedule, rationalize_real};

/// Largest relay count accepted by the exhaustive cut oracle by default.
pub const DEFAULT_MAX_EXHAUSTIVE: usize = 20;

/// The `N + 1` fundamental cuts: the empty cut and every suffix `[i:N]`,
/// listed as the empty cut first, then suffixes from the shortest tail to
/// the full relay set.
pub fn fundamental_cuts(n: usize) -> Vec<Cut> {
    let mut cuts = Vec::with_capacity(n + 1);
    cuts.push(Cut::empty());
    for i in (1..=n).rev() {
        cuts.push(Cut::suffix(i, n));
    }
    cuts
}

/// Minimum cut value over the fundamental cuts only, with its argmin.
pub fn min_over_fundamental(sched: &Schedule, net: &LineNetwork) -> Result<(ExtRational, Cut)> {
    let mut best: Option<(ExtRational, Cut)> = None;
    for cut in fundamental_cuts(net.relay_count()) {
        let value = cut_value(sched, &cut, net)?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, cut));
        }
    }
    Ok(best.expect("at least the empty cut"))
}

/// Minimum cut value over all `2^N` cuts, with the argmin of lowest bitmask
/// encoding. Refuses networks above `limit` relays (default
/// [`DEFAULT_MAX_EXHAUSTIVE`]) since the scan is exponential.
pub fn min_cut_exhaustive(sched: &Schedule, net: &LineNetwork) -> Result<(ExtRational, Cut)> {
    min_cut_exhaustive_with_limit(sched, net, DEFAULT_MAX_EXHAUSTIVE)
}

pub fn min_cut_exhaustive_with_limit(
    sched: &Schedule,
    net: &LineNetwork,
    limit: usize,
) -> Result<(ExtRational, Cut)> {
    let n = net.relay_count();
    if n > limit {
        return Err(Error::LimitExceeded {
            what: "exhaustive cut scan",
            requested: n,
            limit,
        });
    }
    if sched.width() != n {
        return Err(Error::InvalidSchedule(format!(
            "schedule covers {} relays but the network has {}",
            sched.width(),
            n
        )));
    }
    // Contribution of each link if it crosses: activation fraction times
    // capacity, except that a never-active link contributes nothing even at
    // infinite capacity (the sum over states sees no term at all).
    let fractions = sched.link_activation_fractions();
    let contributions: Vec<ExtRational> = fractions
        .iter()
        .enumerate()
        .map(|(idx, fraction)| {
            if fraction.is_zero() {
                ExtRational::zero()
            } else {
                fraction * net.link(idx + 1)
            }
        })
        .collect();

    let mut best_value: Option<ExtRational> = None;
    let mut best_mask = 0u64;
    for mask in 0..(1u64 << n) {
        let mut value = ExtRational::zero();
        for i in 1..=n + 1 {
            let tail_dest = i == n + 1 || mask >> (i - 1) & 1 == 1;
            let head_src = i == 1 || mask >> (i - 2) & 1 == 0;
            if tail_dest && head_src {
                value = &value + &contributions[i - 1];
            }
        }
        if best_value.as_ref().is_none_or(|b| value < *b) {
            best_value = Some(value);
            best_mask = mask;
        }
    }
    Ok((
        best_value.expect("at least one cut"),
        Cut::from_mask(best_mask, n),
    ))
}

/// Certificate that a schedule attains (or misses) the closed-form
/// capacity. `bottleneck` is the smallest link index minimizing the
/// closed-form pair term.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub rate: ExtRational,
    pub bound: ExtRational,
    pub optimal: bool,
    pub bottleneck: usize,
}

/// Compares a schedule's exact rate with the closed-form capacity. The rate
/// of any schedule never exceeds the bound; equality certifies optimality.
pub fn certify_schedule_optimal(sched: &Schedule, net: &LineNetwork) -> Result<Certificate> {
    let rate = schedule_rate_fundamental(sched, net)?;
    let bound = closed_form_capacity(net);
    let bottleneck = (1..=net.relay_count())
        .min_by_key(|&i| net.link(i).hm(net.link(i + 1)))
        .expect("at least one relay");
    Ok(Certificate {
        optimal: rate == bound,
        rate,
        bound,
        bottleneck,
    })
}

/// Result of rationalizing a real network and checking the capacity
/// sandwich: with `q_i = floor(l_i d)/d` and `epsilon = 1/d`,
///
/// ```text
/// C(q) <= rate of the q-optimal schedule on l <= C(l) <= C(q) + epsilon
/// ```
///
/// All quantities are exact (`f64` inputs convert to rationals exactly), so
/// each inequality is decided with no tolerance at all.
#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    /// The rationalized network.
    pub rationalized: LineNetwork,
    /// `1/d`, serialized as a rational string.
    pub epsilon: ExtRational,
    /// Closed-form capacity of the rationalized network.
    pub capacity_rationalized: ExtRational,
    /// Rate of the rationalized network's optimal schedule, evaluated on
    /// the real network.
    pub rate_on_real: ExtRational,
    /// Closed-form capacity of the real network.
    pub capacity_real: ExtRational,
    pub lower_holds: bool,
    pub rate_below_capacity: bool,
    pub upper_holds: bool,
    pub gap_within_epsilon: bool,
}

impl SandwichReport {
    pub fn all_hold(&self) -> bool {
        self.lower_holds && self.rate_below_capacity && self.upper_holds && self.gap_within_epsilon
    }
}

/// Rationalizes `links` with denominator `d` and verifies the sandwich.
pub fn epsilon_sandwich_check(links: &[f64], denominator: u64) -> Result<SandwichReport> {
    let (q_net, epsilon) = rationalize_real(links, denominator)?;
    let real_net = LineNetwork::new(
        links
            .iter()
            .map(|&x| {
                BigRational::from_float(x)
                    .ok_or(Error::UnsupportedCapacity {
                        index: 0,
                        value: x.to_string(),
                        expected: "a positive finite float",
                    })
                    .and_then(ExtRational::from_ratio)
            })
            .collect::<Result<Vec<_>>>()?,
    )?;
    let capacity_rationalized = closed_form_capacity(&q_net);
    let schedule = build_simple_schedule(&q_net)?;
    let rate_on_real = schedule_rate_fundamental(&schedule, &real_net)?;
    let capacity_real = closed_form_capacity(&real_net);
    let epsilon = ExtRational::from_ratio(epsilon)?;
    let upper_bound = &capacity_rationalized + &epsilon;
    let gap = capacity_real.try_sub(&rate_on_real);
    Ok(SandwichReport {
        lower_holds: capacity_rationalized <= rate_on_real,
        rate_below_capacity: rate_on_real <= capacity_real,
        upper_holds: capacity_real <= upper_bound,
        gap_within_epsilon: gap.is_some_and(|g| g <= epsilon),
        rationalized: q_net,
        epsilon,
        capacity_rationalized,
        rate_on_real,
        capacity_real,
    })
}
