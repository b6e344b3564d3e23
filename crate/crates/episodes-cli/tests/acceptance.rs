//! Sign-off suite: ten scripted checks covering hand-verified traces, oracle
//! conformance at scale, throughput and memory behavior, and the alert rules
//! layer. Every criterion prints one PASS/FAIL line; the test asserts only
//! at the end so a single run reports the full picture.
//!
//! Run with:
//!
//! ```text
//! cargo test -p episodes-cli --test acceptance -- --nocapture
//! ```

use std::time::Instant;

use episodes::model::{Episode, Event, FrequencyKind, SymbolTable};
use episodes::oracle::{self, ConformanceConfig};
use episodes::rules::{bind_rules, load_rules, Populations};
use episodes::Engine;
use episodes_cli::bench;

const CAP: usize = 200_000;

/// Feeds a named-symbol stream through one counter; returns the final
/// frequency, every emitted occurrence, and the state snapshot after each
/// event.
fn run_episode(
    text: &str,
    kind: FrequencyKind,
    stream: &[(&str, u64)],
) -> (u64, Vec<Vec<u64>>, Vec<String>) {
    let mut table = SymbolTable::new();
    let episode = Episode::parse(text, &mut table).expect("episode text is valid");
    let mut engine = Engine::new();
    let h = engine.register(episode, kind);
    let mut emitted = Vec::new();
    let mut snaps = Vec::new();
    for &(name, t) in stream {
        let sym = table.intern(name).expect("symbol names are non-empty");
        for (_, occ) in engine.process_event(Event::new(sym, t)).expect("stream is ordered") {
            emitted.push(occ.times().to_vec());
        }
        snaps.push(engine.occ_map(h).expect("handle is live").snapshot(&table));
    }
    (engine.frequency(h).expect("handle is live"), emitted, snaps)
}

fn events_from(table: &mut SymbolTable, stream: &[(&str, u64)]) -> Vec<Event> {
    stream
        .iter()
        .map(|&(name, t)| Event::new(table.intern(name).expect("non-empty"), t))
        .collect()
}

struct Tally {
    failures: Vec<String>,
}

impl Tally {
    fn report(&mut self, n: u32, result: Result<String, String>) {
        match result {
            Ok(detail) => println!("criterion {n}: PASS - {detail}"),
            Err(detail) => {
                println!("criterion {n}: FAIL - {detail}");
                self.failures.push(format!("criterion {n}: {detail}"));
            }
        }
    }
}

fn check(problems: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        problems.push(msg());
    }
}

fn verdict(problems: Vec<String>, pass_detail: String) -> Result<String, String> {
    if problems.is_empty() {
        Ok(pass_detail)
    } else {
        Err(problems.join("; "))
    }
}

const FIFTEEN_EVENTS: [(&str, u64); 15] = [
    ("A", 1),
    ("A", 2),
    ("B", 3),
    ("A", 4),
    ("C", 5),
    ("A", 6),
    ("A", 7),
    ("B", 8),
    ("A", 9),
    ("C", 10),
    ("C", 11),
    ("A", 12),
    ("B", 13),
    ("A", 14),
    ("B", 15),
];

const SPREAD_AS: [(&str, u64); 6] =
    [("A", 1), ("A", 3), ("A", 5), ("A", 7), ("B", 9), ("B", 10)];

const BURST: [(&str, u64); 6] =
    [("A", 1), ("A", 2), ("A", 3), ("A", 4), ("B", 5), ("B", 6)];

const FIVE_EVENTS: [(&str, u64); 5] = [("A", 1), ("B", 2), ("A", 3), ("A", 4), ("B", 5)];

fn criterion_1() -> Result<String, String> {
    let (freq, emitted, snaps) =
        run_episode("A,A,B@tau=3", FrequencyKind::NonOverlapped, &FIFTEEN_EVENTS);
    let mut problems = Vec::new();
    check(&mut problems, freq == 3, || format!("frequency {freq} != 3"));
    let want_emitted = vec![vec![1, 2, 3], vec![6, 7, 8], vec![12, 14, 15]];
    check(&mut problems, emitted == want_emitted, || format!("emitted {emitted:?}"));
    let empty = "L1(A):\nL2(A):\nL3(B):\nell=1";
    let want_states = [
        (3, empty),
        (8, empty),
        (13, "L1(A): 12\nL2(A):\nL3(B):\nell=2"),
        (15, empty),
    ];
    for (step, want) in want_states {
        let got = &snaps[step - 1];
        check(&mut problems, got == want, || {
            format!("state after event {step} diverged: {got:?}")
        });
    }
    verdict(
        problems,
        "15-event trace counts 3; states after events 3/8/13/15 match".into(),
    )
}

fn criterion_2() -> Result<String, String> {
    let (d9, d9_occ, _) = run_episode("A,A,B@tau=9", FrequencyKind::Distinct, &SPREAD_AS);
    let (d7, _, _) = run_episode("A,A,B@tau=7", FrequencyKind::Distinct, &SPREAD_AS);
    let (n9, n9_occ, _) = run_episode("A,A,B@tau=9", FrequencyKind::NonOverlapped, &SPREAD_AS);
    let (n7, n7_occ, _) = run_episode("A,A,B@tau=7", FrequencyKind::NonOverlapped, &SPREAD_AS);
    let mut problems = Vec::new();
    check(&mut problems, d9 == 2, || format!("distinct tau=9 {d9} != 2"));
    check(&mut problems, d9_occ == vec![vec![1, 3, 9], vec![5, 7, 10]], || {
        format!("distinct tau=9 emitted {d9_occ:?}")
    });
    check(&mut problems, d7 == 1, || format!("distinct tau=7 {d7} != 1"));
    check(&mut problems, n9 == 1 && n7 == 1, || {
        format!("non-overlapped counts {n9}/{n7} != 1/1")
    });
    let only = vec![vec![5, 7, 9]];
    check(&mut problems, n9_occ == only && n7_occ == only, || {
        format!("non-overlapped emitted {n9_occ:?} and {n7_occ:?}")
    });
    verdict(
        problems,
        "spread-starts stream: distinct 2@tau=9 / 1@tau=7, non-overlapped (5,7,9)".into(),
    )
}

fn criterion_3() -> Result<String, String> {
    let (n, _, _) = run_episode("A,A,B@tau=4", FrequencyKind::NonOverlapped, &BURST);
    let (d, d_occ, _) = run_episode("A,A,B@tau=4", FrequencyKind::Distinct, &BURST);
    let mut problems = Vec::new();
    check(&mut problems, n == 1, || format!("non-overlapped {n} != 1"));
    check(&mut problems, d == 2, || format!("distinct {d} != 2"));
    check(&mut problems, d_occ == vec![vec![1, 2, 5], vec![3, 4, 6]], || {
        format!("distinct emitted {d_occ:?}")
    });
    verdict(
        problems,
        "burst stream: non-overlapped 1, distinct pair (1,2,5)/(3,4,6)".into(),
    )
}

fn criterion_9() -> Result<String, String> {
    let (tight, tight_occ, _) = run_episode("A,B@tau=1", FrequencyKind::NonOverlapped, &FIVE_EVENTS);
    // tau = 4 covers the whole stream span, so the window stops constraining.
    let (wide, wide_occ, _) = run_episode("A,B@tau=4", FrequencyKind::NonOverlapped, &FIVE_EVENTS);
    let mut table = SymbolTable::new();
    let episode = Episode::parse("A,B@tau=4", &mut table).expect("valid");
    let events = events_from(&mut table, &FIVE_EVENTS);
    let unconstrained =
        oracle::max_nonoverlapped(&episode, &events, CAP).expect("tiny search space");
    let mut problems = Vec::new();
    let pairs = vec![vec![1, 2], vec![4, 5]];
    check(&mut problems, tight == 2 && tight_occ == pairs, || {
        format!("tau=1 counted {tight} with {tight_occ:?}")
    });
    check(&mut problems, wide == 2 && wide_occ == pairs, || {
        format!("tau=span counted {wide} with {wide_occ:?}")
    });
    check(&mut problems, unconstrained == 2, || {
        format!("oracle without a binding window says {unconstrained}")
    });
    verdict(
        problems,
        "two-symbol episode counts (1,2) and (4,5) at tau=1 and tau=span".into(),
    )
}

fn criterion_10() -> Result<String, String> {
    let rules_text = "\
storm: outage,outage,restore @tau=10 threshold=2 of districts by district
wave: alarm,ack @tau=5 threshold=50% of districts by district mode=distinct
";
    let populations =
        Populations::load("districts,d1,4\ndistricts,d2,4\ndistricts,d3,2\n").expect("valid csv");
    let specs = load_rules(rules_text).expect("rules parse");
    let mut table = SymbolTable::new();
    let mut engine = Engine::new();
    let mut book = bind_rules(&specs, &populations, 60, &mut table, &mut engine)
        .expect("rules bind against the population");

    let stream = [
        ("outage@d1", 1),
        ("outage@d1", 2),
        ("restore@d1", 3),
        ("alarm@d3", 4),
        ("ack@d3", 5),
        ("outage@d1", 6),
        ("alarm@d2", 7),
        ("outage@d1", 8),
        ("restore@d1", 9),
        ("ack@d2", 10),
        ("alarm@d2", 11),
        ("ack@d2", 12),
        ("outage@d2", 13),
        ("alarm@d3", 14),
        ("ack@d3", 15),
    ];
    let mut problems = Vec::new();
    let mut alerts = Vec::new();
    for (name, t) in stream {
        let sym = table.intern(name).expect("non-empty");
        for (handle, _) in engine.process_event(Event::new(sym, t)).expect("ordered stream") {
            let freq = engine.frequency(handle).expect("handle is live");
            if let Some(alert) = book.on_emission(handle, freq, t) {
                check(&mut problems, alert.count == freq, || {
                    format!("alert count {} != engine frequency {freq} at t={t}", alert.count)
                });
                alerts.push(alert.to_string());
            }
        }
    }
    let expected = [
        "ALERT wave d3 count=1 t=5",
        "ALERT storm d1 count=2 t=9",
        "ALERT wave d2 count=2 t=12",
    ];
    check(&mut problems, alerts == expected, || format!("alerts were {alerts:?}"));
    let fired: Vec<(String, String, bool)> = book
        .rules()
        .iter()
        .flat_map(|r| {
            r.groups
                .iter()
                .map(|g| (r.spec.name.clone(), g.group.clone(), g.fired))
        })
        .collect();
    let want_fired = [
        ("storm", "d1", true),
        ("storm", "d2", false),
        ("storm", "d3", false),
        ("wave", "d1", false),
        ("wave", "d2", true),
        ("wave", "d3", true),
    ];
    let fired_ok = fired.len() == want_fired.len()
        && fired
            .iter()
            .zip(want_fired.iter())
            .all(|(got, want)| got.0 == want.0 && got.1 == want.1 && got.2 == want.2);
    check(&mut problems, fired_ok, || format!("latch states were {fired:?}"));
    verdict(
        problems,
        "3-district scenario raises exactly 3 latched alerts at mixed thresholds".into(),
    )
}

#[test]
fn acceptance() {
    let mut tally = Tally { failures: Vec::new() };

    tally.report(1, criterion_1());
    tally.report(2, criterion_2());
    tally.report(3, criterion_3());

    // Criteria 4 and 5 share one conformance pass: every random instance is
    // checked in both counting modes against the brute-force oracles.
    let config = ConformanceConfig {
        trials: 10_000,
        max_events: 30,
        max_k: 4,
        max_sigma: 4,
        max_tau: 12,
        seed: 20260817,
    };
    let start = Instant::now();
    let outcome = oracle::run_conformance(&config);
    let elapsed = start.elapsed().as_secs_f64();

    let non_overlapped_failures = outcome.failures_for(FrequencyKind::NonOverlapped);
    tally.report(4, {
        let mut problems = Vec::new();
        check(&mut problems, non_overlapped_failures == 0, || {
            format!("{non_overlapped_failures} mismatches vs the interval-scheduling oracle")
        });
        check(&mut problems, elapsed < 60.0, || format!("took {elapsed:.1}s (budget 60s)"));
        verdict(
            problems,
            format!("{} random instances match the oracle exactly in {elapsed:.1}s", outcome.trials),
        )
    });

    let distinct_failures = outcome.failures_for(FrequencyKind::Distinct);
    tally.report(5, {
        let mut problems = Vec::new();
        check(&mut problems, distinct_failures == 0, || {
            format!("{distinct_failures} mismatches vs the greedy/exhaustive distinct oracles")
        });
        check(&mut problems, elapsed < 120.0, || format!("took {elapsed:.1}s (budget 120s)"));
        verdict(
            problems,
            format!(
                "greedy parity on {} instances; bound checked on {}; {} gap(s) noted in {elapsed:.1}s",
                outcome.trials, outcome.distinct_bound_checked, outcome.distinct_gaps
            ),
        )
    });
    if outcome.distinct_gaps > 0 {
        // Documented finding, not a failure: the one-pass policy (and the
        // greedy oracle it matches) can fall below the exhaustive maximum.
        for example in &outcome.gap_examples {
            println!("  finding (greedy below exhaustive max): {example}");
        }
    }
    for failure in &outcome.failures {
        println!("  conformance failure: {failure}");
    }

    // Criterion 6: scaling behavior.
    let ns: Vec<u64> = (1..=7).map(|i| i * 100_000).collect();
    let rows_n = bench::run_n_sweep(&ns, 1_000, 42, 3);
    let xs: Vec<f64> = rows_n.iter().map(|r| r.measurement.events as f64).collect();
    let ys: Vec<f64> = rows_n.iter().map(|r| r.measurement.seconds).collect();
    let (_, _, r2) = bench::linear_fit(&xs, &ys);

    let rows_tau = bench::run_tau_sweep(&[10, 100, 1_000, 10_000], 200_000, 42, 3);
    let rates: Vec<f64> = rows_tau.iter().map(|r| r.measurement.events_per_sec).collect();
    let rate_min = rates.iter().copied().fold(f64::INFINITY, f64::min);
    let rate_max = rates.iter().copied().fold(0.0f64, f64::max);
    let tau_ratio = rate_max / rate_min;

    // Adversarial all-match streams at one event per tick (rate 1), so the
    // state bound is exactly k * tau.
    let mut t1 = SymbolTable::new();
    let short_repeat = bench::repeat_episode(3, 25, &mut t1);
    let a = t1.intern("A").expect("non-empty");
    let all_a: Vec<Event> = (1..=20_000).map(|t| Event::new(a, t)).collect();
    let m_all_a = bench::measure_counter(&short_repeat, FrequencyKind::NonOverlapped, &all_a, 1, true);
    let bound_all_a = 3 * 25;
    let mut t2 = SymbolTable::new();
    let long_repeat = bench::repeat_episode(5, 50, &mut t2);
    let pulse = bench::pulse_stream(20_000, 101, &mut t2);
    let m_pulse = bench::measure_counter(&long_repeat, FrequencyKind::NonOverlapped, &pulse, 1, true);
    let bound_pulse = 5 * 50;

    tally.report(6, {
        let mut problems = Vec::new();
        check(&mut problems, r2 >= 0.98, || {
            format!("(a) time-vs-n fit R2={r2:.4} below 0.98 over n={ns:?}")
        });
        check(&mut problems, tau_ratio < 2.0, || {
            format!("(b) throughput varies {tau_ratio:.2}x across tau sweep (rates {rates:?})")
        });
        check(&mut problems, m_all_a.peak_entries <= bound_all_a, || {
            format!("(c) peak {} exceeds k*tau*rate {bound_all_a} on the all-match stream", m_all_a.peak_entries)
        });
        check(&mut problems, m_pulse.peak_entries <= bound_pulse, || {
            format!("(c) peak {} exceeds k*tau*rate {bound_pulse} on the pulse stream", m_pulse.peak_entries)
        });
        verdict(
            problems,
            format!(
                "(a) linear fit R2={r2:.4} (b) tau-sweep spread {tau_ratio:.2}x (c) peaks {}/{} within bounds {bound_all_a}/{bound_pulse}",
                m_all_a.peak_entries, m_pulse.peak_entries
            ),
        )
    });

    // Criterion 7: throughput floor, reported to the CSV alongside the sweeps.
    let mut table = SymbolTable::new();
    let episode = bench::chain_episode(5, 1_000, &mut table);
    let events = bench::uniform_stream(500_000, 5, 7, &mut table);
    let m_throughput =
        bench::measure_counter(&episode, FrequencyKind::NonOverlapped, &events, 5, false);

    let rows_k = bench::run_k_sweep(&[3, 5, 7, 9, 11], 100_000, 200, 101);

    let csv_path = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-bench.csv");
    let mut rows = Vec::new();
    rows.extend(rows_n);
    rows.extend(rows_tau);
    rows.push(bench::BenchRow {
        suite: "throughput",
        label: "k=5".into(),
        measurement: m_throughput.clone(),
    });
    rows.extend(rows_k.iter().cloned());
    let csv_ok = std::fs::File::create(&csv_path)
        .and_then(|mut f| bench::write_csv(&mut f, &rows))
        .is_ok();

    tally.report(7, {
        let mut problems = Vec::new();
        check(&mut problems, m_throughput.events_per_sec >= 1e5, || {
            format!("{:.0} events/s below the 100000/s floor", m_throughput.events_per_sec)
        });
        check(&mut problems, csv_ok, || format!("could not write {}", csv_path.display()));
        verdict(
            problems,
            format!(
                "{:.2}M events/s on a 5-symbol counter; report at {}",
                m_throughput.events_per_sec / 1e6,
                csv_path.display()
            ),
        )
    });

    let peaks: Vec<usize> = rows_k.iter().map(|r| r.measurement.peak_entries).collect();
    tally.report(8, {
        let mut problems = Vec::new();
        let monotone = peaks.windows(2).all(|w| w[0] <= w[1]);
        check(&mut problems, monotone, || {
            format!("peak entries {peaks:?} not nondecreasing over k=3,5,7,9,11")
        });
        verdict(problems, format!("peak entries {peaks:?} grow with k"))
    });

    tally.report(9, criterion_9());
    tally.report(10, criterion_10());

    assert!(
        tally.failures.is_empty(),
        "{} criterion(s) failed:\n{}",
        tally.failures.len(),
        tally.failures.join("\n")
    );
}
