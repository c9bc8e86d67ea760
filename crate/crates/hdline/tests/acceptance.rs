//! Acceptance suite: one test per shipping criterion, each ending in a
//! single PASS line with its measured numbers. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::{Duration, Instant};

use num::bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hdline::line::{
    closed_form_capacity, schedule_rate_fundamental, Cut, LineNetwork, Schedule, State,
};
use hdline::punctured::{
    count_primitive_recurrence, cut_to_punctured, enumerate_primitive, enumerate_punctured,
    lower_bound_holds, objective_g1, objective_g2, punctured_to_cut, witness_report,
};
use hdline::rational::ExtRational;
use hdline::routing::{reduction, Cnf};
use hdline::scheduler::{build_pipeline, DEFAULT_DENOMINATOR};
use hdline::verify::{epsilon_sandwich_check, min_cut_exhaustive, min_over_fundamental};

fn q(s: &str) -> ExtRational {
    s.parse().unwrap()
}

fn ratio(numer: u64, denom: u64) -> ExtRational {
    ExtRational::new(BigInt::from(numer), BigInt::from(denom)).unwrap()
}

/// Random network with `n` relays, numerators up to 100, denominators up
/// to 10.
fn random_network(rng: &mut ChaCha8Rng, n: usize) -> LineNetwork {
    LineNetwork::new(
        (0..=n)
            .map(|_| ratio(rng.gen_range(1..=100), rng.gen_range(1..=10)))
            .collect(),
    )
    .unwrap()
}

#[test]
fn criterion_1_running_example_is_exact_and_instant() {
    let net = LineNetwork::parse_links("2,2,3,1").unwrap();
    assert_eq!(closed_form_capacity(&net), q("3/4"));

    let pipeline = build_pipeline(&net).unwrap();
    assert_eq!(pipeline.rate, q("3/4"));
    let rows: Vec<(String, String, String)> = pipeline
        .grouped
        .groups
        .iter()
        .map(|g| {
            (
                g.state.to_string(),
                g.weight.to_string(),
                format!("[{}:{}]", g.color_lo, g.color_hi),
            )
        })
        .collect();
    assert_eq!(
        rows,
        vec![
            ("010".into(), "1/4".into(), "[7:8]".into()),
            ("001".into(), "1/8".into(), "[6:6]".into()),
            ("111".into(), "1/4".into(), "[4:5]".into()),
            ("101".into(), "3/8".into(), "[1:3]".into()),
        ]
    );

    let best = (0..20)
        .map(|_| {
            let t = Instant::now();
            let c = closed_form_capacity(&net);
            let p = build_pipeline(&net).unwrap();
            assert_eq!(c, p.rate);
            t.elapsed()
        })
        .min()
        .unwrap();
    assert!(best < Duration::from_millis(1), "took {best:?}");
    println!(
        "criterion 1: capacity 3/4 and the four-group schedule reproduced in {best:?} (< 1 ms): PASS"
    );
}

#[test]
fn criterion_2_two_state_schedules_top_out_strictly_below_capacity() {
    let net = LineNetwork::parse_links("2,2,3,1").unwrap();
    let s010: State = "010".parse().unwrap();
    let s101: State = "101".parse().unwrap();

    // Exact sweep of every mixture k/300 over the two states.
    let mut best = ExtRational::zero();
    let mut argmax = 0u64;
    for k in 1..300u64 {
        let sched = Schedule::new([
            (s010.clone(), ratio(k, 300)),
            (s101.clone(), ratio(300 - k, 300)),
        ])
        .unwrap();
        let rate = schedule_rate_fundamental(&sched, &net).unwrap();
        assert!(rate <= q("2/3"), "mixture {k}/300 exceeds 2/3");
        if rate > best {
            best = rate;
            argmax = k;
        }
    }
    assert_eq!(best, q("2/3"));
    assert_eq!(argmax, 100);
    assert!(q("2/3") < closed_form_capacity(&net));
    println!(
        "criterion 2: best two-state mixture is 2/3 at weight 1/3, strictly below capacity 3/4: PASS"
    );
}

#[test]
fn criterion_3_five_hundred_random_networks_schedule_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let start = Instant::now();
    for round in 0..500 {
        let n = rng.gen_range(1..=20);
        let net = random_network(&mut rng, n);
        let p = build_pipeline(&net).unwrap();

        assert!(p.schedule.is_simple(), "round {round}: not simple");
        let total: ExtRational = p.schedule.iter().map(|(_, w)| w.clone()).sum();
        assert_eq!(total, ExtRational::one(), "round {round}: weights");

        let delta = BigInt::from(p.colors.delta.clone());
        let fractions = p.schedule.link_activation_fractions();
        for i in 1..=n + 1 {
            let expect =
                ExtRational::new(BigInt::from(p.multiplicities.n[i - 1].clone()), delta.clone())
                    .unwrap();
            assert_eq!(fractions[i - 1], expect, "round {round}: link {i}");
        }

        assert_eq!(
            p.rate,
            closed_form_capacity(&net),
            "round {round}: rate is not the capacity"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "criterion 3: 500 random networks (up to 20 relays) scheduled simply, exactly, and \
         optimally in {elapsed:?} (< 5 s): PASS"
    );
}

#[test]
fn criterion_4_exhaustive_cut_scans_agree_with_fundamental_cuts() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let start = Instant::now();
    for round in 0..200 {
        let n = rng.gen_range(1..=12);
        let net = random_network(&mut rng, n);
        let k = rng.gen_range(1..=n + 2);
        let weights: Vec<u64> = (0..k).map(|_| rng.gen_range(1..=100)).collect();
        let total: u64 = weights.iter().sum();
        let sched = Schedule::new(weights.iter().map(|&w| {
            (
                State::from_bits(
                    &(0..n)
                        .map(|_| rng.gen_bool(0.5))
                        .collect::<Vec<_>>(),
                ),
                ratio(w, total),
            )
        }))
        .unwrap();

        let (exhaustive, _) = min_cut_exhaustive(&sched, &net).unwrap();
        let (fundamental, _) = min_over_fundamental(&sched, &net).unwrap();
        assert_eq!(exhaustive, fundamental, "round {round}");
        let rate = schedule_rate_fundamental(&sched, &net).unwrap();
        assert_eq!(exhaustive, rate, "round {round}: per-link form");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "criterion 4: 200 random schedules, all 2^N cuts vs the N+1 fundamental ones, equal \
         every time in {elapsed:?} (< 30 s): PASS"
    );
}

#[test]
fn criterion_5_truncation_sandwich_holds_on_random_real_networks() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let start = Instant::now();
    for round in 0..200 {
        let n = rng.gen_range(1..=10);
        let links: Vec<f64> = (0..=n).map(|_| rng.gen_range(0.05..9.5)).collect();
        let report = epsilon_sandwich_check(&links, DEFAULT_DENOMINATOR).unwrap();
        assert!(report.all_hold(), "round {round}: {report:?}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "criterion 5: 200 random real networks truncated at 10^-6, all four sandwich \
         inequalities exact in {elapsed:?} (< 60 s): PASS"
    );
}

#[test]
fn criterion_6_primitive_set_counting_and_growth() {
    // The nine primitive punctured subsets of [1:8], in order.
    let got: Vec<Vec<i64>> = enumerate_primitive(1, 8)
        .unwrap()
        .iter()
        .map(|s| s.elems().to_vec())
        .collect();
    assert_eq!(
        got,
        vec![
            vec![1, 3, 5, 7],
            vec![1, 3, 5, 8],
            vec![1, 3, 6, 8],
            vec![1, 4, 6, 8],
            vec![1, 4, 7],
            vec![2, 4, 6, 8],
            vec![2, 4, 7],
            vec![2, 5, 7],
            vec![2, 5, 8],
        ]
    );

    for n in 1..=22i64 {
        let counted = count_primitive_recurrence(n as u64).unwrap();
        let enumerated = enumerate_primitive(1, n).unwrap().len();
        assert_eq!(counted, enumerated.into(), "n = {n}");
    }

    for n in 4..=60u64 {
        let t = count_primitive_recurrence(n).unwrap();
        assert!(lower_bound_holds(n, &t), "bound fails at n = {n}");
    }

    for a in -3i64..=3 {
        for span in 0..=15i64 {
            let b = a + span;
            let sets = enumerate_primitive(a, b).unwrap();
            // Smallest element hugs the left end.
            for s in &sets {
                if let Some(&first) = s.elems().first() {
                    assert!(first <= a + 1, "[{a}:{b}] {s:?}");
                }
            }
            // Sets starting at a+1 are the left-anchored sets of [a+1:b].
            let starting_high: Vec<_> = sets
                .iter()
                .filter(|s| s.elems().first() == Some(&(a + 1)))
                .map(|s| s.elems().to_vec())
                .collect();
            let anchored: Vec<_> = enumerate_primitive(a + 1, b)
                .unwrap()
                .iter()
                .filter(|s| s.elems().first() == Some(&(a + 1)))
                .map(|s| s.elems().to_vec())
                .collect();
            assert_eq!(starting_high, anchored, "[{a}:{b}]");
            // Sets starting at a peel into {a} plus a set of [a+2:b].
            let starting_low: Vec<_> = sets
                .iter()
                .filter(|s| s.elems().first() == Some(&a))
                .map(|s| s.elems().to_vec())
                .collect();
            let glued: Vec<_> = enumerate_primitive(a + 2, b)
                .unwrap()
                .iter()
                .map(|s| {
                    let mut v = vec![a];
                    v.extend_from_slice(s.elems());
                    v
                })
                .collect();
            assert_eq!(starting_low, glued, "[{a}:{b}]");
        }
    }
    println!(
        "criterion 6: primitive counts match the T(n) = T(n-2) + T(n-3) recurrence through \
         n = 22, the cube bound (2T)^3 >= 2^n holds through n = 60, and the three structure \
         properties hold on every interval of span <= 15: PASS"
    );
}

#[test]
fn criterion_7_cut_bijection_and_witness_networks() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=10usize {
        let net = random_network(&mut rng, n);
        // The crossing-set bijection preserves the objective, and its
        // maximum is already attained among primitive sets.
        let mut max_g1 = ExtRational::zero();
        for mask in 0..(1u64 << n) {
            let cut = Cut::from_mask(mask, n);
            let g1 = objective_g1(&cut, &net);
            assert_eq!(g1, objective_g2(&cut_to_punctured(&cut, n), &net));
            max_g1 = max_g1.max(g1);
        }
        let max_punctured = enumerate_punctured(1, n as i64 + 1)
            .unwrap()
            .iter()
            .map(|b| objective_g2(b, &net))
            .max()
            .unwrap();
        let max_primitive = enumerate_primitive(1, n as i64 + 1)
            .unwrap()
            .iter()
            .map(|b| objective_g2(b, &net))
            .max()
            .unwrap();
        assert_eq!(max_g1, max_punctured, "n = {n}");
        assert_eq!(max_g1, max_primitive, "n = {n}");

        // Round trip on every nonempty punctured set.
        for b in enumerate_punctured(1, n as i64 + 1).unwrap() {
            if b.is_empty() {
                continue;
            }
            let (cut, degenerate) = punctured_to_cut(&b, n).unwrap();
            assert!(!degenerate);
            assert_eq!(cut_to_punctured(&cut, n), b, "n = {n}");
        }

        // Every primitive set's witness network is uniquely served by its
        // own marked state among all candidates, at full-duplex capacity.
        for b in enumerate_primitive(1, n as i64 + 1).unwrap() {
            let (cut, _) = punctured_to_cut(&b, n).unwrap();
            let report = witness_report(&cut, n, 16).unwrap();
            assert!(report.attains_fd, "n = {n}, B = {b:?}");
            assert!(report.unique_among_candidates, "n = {n}, B = {b:?}");
        }
    }
    println!(
        "criterion 7: crossing-set bijection preserves cut values, primitive sets suffice for \
         the maximum, and each witness network is uniquely served by its own marked state \
         (relay counts 1..=10): PASS"
    );
}

#[test]
fn criterion_8_routing_reduction_decides_random_formulas() {
    let z = q("1");
    let start = Instant::now();

    // The worked formula and the plain contradiction first.
    let running = Cnf::new(5, vec![vec![-1, 2, 3], vec![4, 1, -2], vec![-1, 3, -5]]).unwrap();
    let check = reduction::verify_reduction(&running, &z, 8, 4_000_000).unwrap();
    assert!(check.satisfiable && check.decision && check.agree);
    assert_eq!(check.assignment_satisfies, Some(true));

    let contradiction = Cnf::new(1, vec![vec![1], vec![-1]]).unwrap();
    let check = reduction::verify_reduction(&contradiction, &z, 8, 4_000_000).unwrap();
    assert!(!check.satisfiable && !check.decision && check.agree);
    assert_eq!(check.best_capacity, Some(q("1/2")));

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for round in 0..100 {
        let vars = rng.gen_range(1..=4usize);
        let clauses: Vec<Vec<i32>> = (0..rng.gen_range(1..=4usize))
            .map(|_| {
                (0..rng.gen_range(1..=3usize))
                    .map(|_| {
                        let v = rng.gen_range(1..=vars) as i32;
                        if rng.gen_bool(0.5) {
                            v
                        } else {
                            -v
                        }
                    })
                    .collect()
            })
            .collect();
        let cnf = Cnf::new(vars, clauses).unwrap();
        let check = reduction::verify_reduction(&cnf, &z, 8, 4_000_000).unwrap();
        assert!(check.agree, "round {round}: {:?}", cnf.clauses());
        if check.decision {
            assert_eq!(
                check.assignment_satisfies,
                Some(true),
                "round {round}: extracted assignment fails"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "criterion 8: best-path decision matches the truth table on the worked formula, the \
         contradiction, and 100 random 3-CNFs, with extracted assignments satisfying, in \
         {elapsed:?} (< 60 s): PASS"
    );
}

#[test]
fn criterion_9_scaling_stays_near_quadratic_and_linear() {
    let sizes = [1000usize, 2000, 4000];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let nets: Vec<LineNetwork> = sizes
        .iter()
        .map(|&n| {
            LineNetwork::new(
                (0..=n)
                    .map(|_| ExtRational::from_integer(rng.gen_range(1..=9)))
                    .collect(),
            )
            .unwrap()
        })
        .collect();

    // Capacity is linear-time and fast; time it in batches to defeat
    // clock granularity. Scheduling is quadratic; single runs suffice.
    let capacity_times: Vec<Duration> = nets
        .iter()
        .map(|net| {
            (0..5)
                .map(|_| {
                    let t = Instant::now();
                    for _ in 0..50 {
                        std::hint::black_box(closed_form_capacity(std::hint::black_box(net)));
                    }
                    t.elapsed() / 50
                })
                .min()
                .unwrap()
        })
        .collect();
    let schedule_times: Vec<Duration> = nets
        .iter()
        .map(|net| {
            (0..3)
                .map(|_| {
                    let t = Instant::now();
                    let p = build_pipeline(std::hint::black_box(net)).unwrap();
                    assert_eq!(p.rate, closed_form_capacity(net));
                    t.elapsed()
                })
                .min()
                .unwrap()
        })
        .collect();

    for i in 0..2 {
        let cap_ratio = capacity_times[i + 1].as_secs_f64() / capacity_times[i].as_secs_f64();
        let sched_ratio = schedule_times[i + 1].as_secs_f64() / schedule_times[i].as_secs_f64();
        assert!(
            cap_ratio <= 2.5,
            "capacity time ratio {cap_ratio:.2} from {} to {} relays",
            sizes[i],
            sizes[i + 1]
        );
        assert!(
            sched_ratio <= 4.5,
            "schedule time ratio {sched_ratio:.2} from {} to {} relays",
            sizes[i],
            sizes[i + 1]
        );
    }
    println!(
        "criterion 9: capacity {:?}/{:?}/{:?} and schedule {:?}/{:?}/{:?} at 1000/2000/4000 \
         relays, doubling ratios within 2.5x and 4.5x: PASS",
        capacity_times[0],
        capacity_times[1],
        capacity_times[2],
        schedule_times[0],
        schedule_times[1],
        schedule_times[2]
    );
}
