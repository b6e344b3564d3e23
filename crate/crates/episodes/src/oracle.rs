//! Brute-force reference implementations and a randomized conformance
//! runner.
//!
//! Everything here trades speed for obviousness: occurrences are found by
//! exhaustive search and the counting problems are solved directly from the
//! definitions. The streaming engine is checked against these oracles by the
//! differential test suites and by the `oracle-check` command. None of this
//! is meant for production streams; search is capped and returns
//! [`OracleError::SearchSpaceExceeded`] when a stream is too rich.
//!
//! All functions expect events in nondecreasing time order, the same order
//! the engine consumes them in.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::Engine;
use crate::model::{are_distinct, Episode, Event, FrequencyKind, Occurrence, Symbol, SymbolTable};

/// Default cap on enumerated occurrences for the counting oracles.
pub const DEFAULT_ENUMERATION_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("occurrence search exceeded the cap of {cap} results")]
    SearchSpaceExceeded { cap: usize },
}

fn assert_time_ordered(events: &[Event]) {
    debug_assert!(
        events.windows(2).all(|w| w[0].time <= w[1].time),
        "oracle input must be in nondecreasing time order"
    );
}

/// Enumerates every occurrence of `episode` in `events`, in lexicographic
/// order of timestamp vectors. Errors once more than `cap` occurrences
/// exist. Two events with the same symbol and timestamp are one instance
/// and are tried once.
pub fn enumerate_occurrences(
    episode: &Episode,
    events: &[Event],
    cap: usize,
) -> Result<Vec<Occurrence>, OracleError> {
    assert_time_ordered(events);
    let mut out = Vec::new();
    let mut chain = Vec::with_capacity(episode.len());
    extend_chain(episode, events, 0, &mut chain, &mut out, cap)?;
    Ok(out)
}

fn extend_chain(
    episode: &Episode,
    events: &[Event],
    from: usize,
    chain: &mut Vec<u64>,
    out: &mut Vec<Occurrence>,
    cap: usize,
) -> Result<(), OracleError> {
    if chain.len() == episode.len() {
        if out.len() >= cap {
            return Err(OracleError::SearchSpaceExceeded { cap });
        }
        out.push(Occurrence::from_sorted(chain.clone()));
        return Ok(());
    }
    let want = episode.symbol(chain.len());
    let mut tried: Option<u64> = None;
    for (i, ev) in events.iter().enumerate().skip(from) {
        if let Some(first) = chain.first() {
            // Events are time-ordered, so nothing later fits either.
            if ev.time - first > episode.tau() {
                break;
            }
        }
        if ev.symbol != want {
            continue;
        }
        if chain.last().is_some_and(|&last| ev.time <= last) {
            continue;
        }
        if tried == Some(ev.time) {
            continue;
        }
        tried = Some(ev.time);
        chain.push(ev.time);
        extend_chain(episode, events, i + 1, chain, out, cap)?;
        chain.pop();
    }
    Ok(())
}

/// Occurrences whose window `[t_1, t_k]` strictly contains no other
/// occurrence's window. The time constraint is deliberately ignored (the
/// search runs unbounded); filter by span afterwards when needed.
pub fn minimal_occurrences(
    episode: &Episode,
    events: &[Event],
    cap: usize,
) -> Result<Vec<Occurrence>, OracleError> {
    let unbounded = Episode::new(episode.symbols().to_vec(), u64::MAX)
        .expect("existing episode stays well-formed under a larger span");
    let all = enumerate_occurrences(&unbounded, events, cap)?;
    let minimal = all
        .iter()
        .filter(|o| {
            !all.iter().any(|other| {
                other.start() >= o.start()
                    && other.end() <= o.end()
                    && (other.start() > o.start() || other.end() < o.end())
            })
        })
        .cloned()
        .collect();
    Ok(minimal)
}

/// Exact maximum number of pairwise non-overlapped occurrences.
///
/// Occurrence windows are intervals, so the classic earliest-end greedy scan
/// over all occurrences is optimal.
pub fn max_nonoverlapped(
    episode: &Episode,
    events: &[Event],
    cap: usize,
) -> Result<u64, OracleError> {
    let occs = enumerate_occurrences(episode, events, cap)?;
    let mut windows: Vec<(u64, u64)> = occs.iter().map(|o| (o.end(), o.start())).collect();
    windows.sort_unstable();
    let mut count = 0u64;
    let mut last_end: Option<u64> = None;
    for (end, start) in windows {
        if last_end.map_or(true, |prev| start > prev) {
            count += 1;
            last_end = Some(end);
        }
    }
    Ok(count)
}

/// Exact maximum number of pairwise distinct occurrences, by exhaustive
/// search over subsets. Errors when the stream admits more than
/// `max_occurrences` occurrences; keep the limit small (the search is
/// exponential in it).
pub fn max_distinct(
    episode: &Episode,
    events: &[Event],
    max_occurrences: usize,
) -> Result<u64, OracleError> {
    let occs = enumerate_occurrences(episode, events, max_occurrences)?;
    let n = occs.len();
    let mut compat = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                compat[i][j] = are_distinct(episode, &occs[i], &occs[j])
                    .expect("enumerated occurrences match the episode length");
            }
        }
    }
    let mut chosen: Vec<usize> = Vec::new();
    Ok(best_distinct_from(0, n, &compat, &mut chosen))
}

fn best_distinct_from(i: usize, n: usize, compat: &[Vec<bool>], chosen: &mut Vec<usize>) -> u64 {
    if i == n {
        return chosen.len() as u64;
    }
    let mut best = best_distinct_from(i + 1, n, compat, chosen);
    if chosen.iter().all(|&j| compat[j][i]) {
        chosen.push(i);
        best = best.max(best_distinct_from(i + 1, n, compat, chosen));
        chosen.pop();
    }
    best
}

/// Greedy distinct count: repeatedly take the lexicographically smallest
/// valid occurrence built from event instances no earlier pick used, until
/// none remains. This is the sequence a one-pass counter can realize, and
/// the distinct-mode engine is held to it exactly.
pub fn greedy_distinct(episode: &Episode, events: &[Event]) -> u64 {
    assert_time_ordered(events);
    let mut consumed: HashSet<(Symbol, u64)> = HashSet::new();
    let mut count = 0u64;
    while let Some(times) = lex_min_occurrence(episode, events, &consumed) {
        for (i, &t) in times.iter().enumerate() {
            consumed.insert((episode.symbol(i), t));
        }
        count += 1;
    }
    count
}

fn lex_min_occurrence(
    episode: &Episode,
    events: &[Event],
    consumed: &HashSet<(Symbol, u64)>,
) -> Option<Vec<u64>> {
    let mut chain = Vec::with_capacity(episode.len());
    if search_lex_min(episode, events, consumed, 0, &mut chain) {
        Some(chain)
    } else {
        None
    }
}

fn search_lex_min(
    episode: &Episode,
    events: &[Event],
    consumed: &HashSet<(Symbol, u64)>,
    from: usize,
    chain: &mut Vec<u64>,
) -> bool {
    if chain.len() == episode.len() {
        return true;
    }
    let want = episode.symbol(chain.len());
    let mut tried: Option<u64> = None;
    for (i, ev) in events.iter().enumerate().skip(from) {
        if let Some(first) = chain.first() {
            if ev.time - first > episode.tau() {
                break;
            }
        }
        if ev.symbol != want {
            continue;
        }
        if chain.last().is_some_and(|&last| ev.time <= last) {
            continue;
        }
        if tried == Some(ev.time) || consumed.contains(&(want, ev.time)) {
            continue;
        }
        tried = Some(ev.time);
        chain.push(ev.time);
        if search_lex_min(episode, events, consumed, i + 1, chain) {
            return true;
        }
        chain.pop();
    }
    false
}

/// Parameters for the randomized engine-versus-oracle sweep. The defaults
/// match the conformance envelope the test suite pins down: short streams
/// over tiny alphabets where exhaustive search is instant.
#[derive(Debug, Clone)]
pub struct ConformanceConfig {
    pub trials: u64,
    /// Maximum stream length per trial.
    pub max_events: usize,
    /// Maximum episode length.
    pub max_k: usize,
    /// Maximum alphabet size.
    pub max_sigma: usize,
    /// Maximum time constraint.
    pub max_tau: u64,
    pub seed: u64,
}

impl Default for ConformanceConfig {
    fn default() -> Self {
        ConformanceConfig {
            trials: 1_000,
            max_events: 30,
            max_k: 4,
            max_sigma: 4,
            max_tau: 12,
            seed: 7,
        }
    }
}

/// One engine/oracle disagreement (or a broken state invariant) with enough
/// context to replay it by hand.
#[derive(Debug, Clone)]
pub struct ConformanceFailure {
    pub trial: u64,
    pub kind: FrequencyKind,
    pub episode: String,
    pub stream: String,
    pub engine: u64,
    pub expected: u64,
    pub detail: String,
}

impl fmt::Display for ConformanceFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "trial {} [{}] {}: engine={} expected={} ({}) stream={}",
            self.trial, self.kind, self.episode, self.engine, self.expected, self.detail, self.stream
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct ConformanceOutcome {
    pub trials: u64,
    pub failures: Vec<ConformanceFailure>,
    /// Trials small enough for the exhaustive distinct bound to be checked.
    pub distinct_bound_checked: u64,
    /// Trials where the greedy distinct count fell short of the exhaustive
    /// maximum. Informational: the engine tracks the greedy count.
    pub distinct_gaps: u64,
    pub gap_examples: Vec<String>,
    /// Trials skipped because enumeration outgrew its cap.
    pub skipped_large: u64,
}

impl ConformanceOutcome {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures_for(&self, kind: FrequencyKind) -> usize {
        self.failures.iter().filter(|f| f.kind == kind).count()
    }
}

fn render_stream(events: &[Event], table: &SymbolTable) -> String {
    let mut s = String::new();
    for ev in events {
        s.push('(');
        s.push_str(table.name(ev.symbol));
        s.push(',');
        s.push_str(&ev.time.to_string());
        s.push(')');
    }
    s
}

/// Runs `config.trials` random instances. Each trial draws an episode, a
/// time constraint, and a strictly time-ordered stream, runs one engine per
/// frequency kind (checking state invariants after every event), and
/// compares the final counts against [`max_nonoverlapped`] and
/// [`greedy_distinct`]. When the instance admits at most 15 occurrences the
/// distinct count is additionally checked against the exhaustive
/// [`max_distinct`] upper bound.
pub fn run_conformance(config: &ConformanceConfig) -> ConformanceOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut table = SymbolTable::new();
    let alphabet: Vec<Symbol> = (0..config.max_sigma.max(1))
        .map(|i| table.intern(&format!("s{i}")).expect("generated names are non-empty"))
        .collect();

    let mut outcome = ConformanceOutcome::default();
    for trial in 0..config.trials {
        let sigma = rng.gen_range(1..=alphabet.len());
        let k = rng.gen_range(1..=config.max_k.max(1));
        let symbols: Vec<Symbol> = (0..k).map(|_| alphabet[rng.gen_range(0..sigma)]).collect();
        let tau = rng.gen_range(1..=config.max_tau.max(1));
        let episode = Episode::new(symbols, tau).expect("generated episodes are non-empty");

        let n = rng.gen_range(1..=config.max_events.max(1));
        let dense = rng.gen_bool(0.5);
        let mut t = 1u64;
        let mut events = Vec::with_capacity(n);
        for i in 0..n {
            // Zero gaps produce tied timestamps: legal input (the stream
            // contract is nondecreasing) and the nastiest case for the
            // strict-increase rules in both the engine and the oracles.
            if i > 0 {
                t += if dense { rng.gen_range(0..=1) } else { rng.gen_range(0..=4) };
            }
            events.push(Event::new(alphabet[rng.gen_range(0..sigma)], t));
        }

        let mut engine = Engine::new();
        let hn = engine.register(episode.clone(), FrequencyKind::NonOverlapped);
        let hd = engine.register(episode.clone(), FrequencyKind::Distinct);
        let mut broken = false;
        for ev in &events {
            engine.process_event(*ev).expect("generated stream is time-ordered");
            for (handle, kind) in [(hn, FrequencyKind::NonOverlapped), (hd, FrequencyKind::Distinct)] {
                if let Err(msg) = engine.occ_map(handle).expect("handle is live").verify_invariants()
                {
                    outcome.failures.push(ConformanceFailure {
                        trial,
                        kind,
                        episode: episode.display_with(&table),
                        stream: render_stream(&events, &table),
                        engine: engine.frequency(handle).expect("handle is live"),
                        expected: 0,
                        detail: format!("state invariant broken at t={}: {msg}", ev.time),
                    });
                    broken = true;
                }
            }
            if broken {
                break;
            }
        }
        outcome.trials += 1;
        if broken {
            continue;
        }

        let engine_n = engine.frequency(hn).expect("handle is live");
        let engine_d = engine.frequency(hd).expect("handle is live");

        match max_nonoverlapped(&episode, &events, DEFAULT_ENUMERATION_CAP) {
            Ok(expected) => {
                if engine_n != expected {
                    outcome.failures.push(ConformanceFailure {
                        trial,
                        kind: FrequencyKind::NonOverlapped,
                        episode: episode.display_with(&table),
                        stream: render_stream(&events, &table),
                        engine: engine_n,
                        expected,
                        detail: "count differs from the exact maximum".into(),
                    });
                }
            }
            Err(OracleError::SearchSpaceExceeded { .. }) => {
                outcome.skipped_large += 1;
                continue;
            }
        }

        let expected_d = greedy_distinct(&episode, &events);
        if engine_d != expected_d {
            outcome.failures.push(ConformanceFailure {
                trial,
                kind: FrequencyKind::Distinct,
                episode: episode.display_with(&table),
                stream: render_stream(&events, &table),
                engine: engine_d,
                expected: expected_d,
                detail: "count differs from the greedy reference".into(),
            });
        }

        if let Ok(upper) = max_distinct(&episode, &events, 15) {
            outcome.distinct_bound_checked += 1;
            if engine_d > upper {
                outcome.failures.push(ConformanceFailure {
                    trial,
                    kind: FrequencyKind::Distinct,
                    episode: episode.display_with(&table),
                    stream: render_stream(&events, &table),
                    engine: engine_d,
                    expected: upper,
                    detail: "count exceeds the exhaustive maximum".into(),
                });
            } else if expected_d < upper {
                outcome.distinct_gaps += 1;
                if outcome.gap_examples.len() < 8 {
                    outcome.gap_examples.push(format!(
                        "trial {trial} {}: greedy={expected_d} maximum={upper} stream={}",
                        episode.display_with(&table),
                        render_stream(&events, &table)
                    ));
                }
            }
        }
    }
    outcome
}
