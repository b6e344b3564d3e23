//! Measurement harness behind the `bench` subcommand and the acceptance
//! suite's scaling checks.

use std::io::{self, Write};
use std::time::Instant;

use episodes::model::{Episode, Event, FrequencyKind, Symbol, SymbolTable};
use episodes::streamio::{generate_uniform, UniformSpec};
use episodes::Engine;

/// One timed run of a single counter over one stream.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub events: u64,
    /// Median wall-clock seconds across the timing repeats.
    pub seconds: f64,
    pub events_per_sec: f64,
    /// Largest total state size seen after any event; 0 unless tracked.
    pub peak_entries: usize,
    pub frequency: u64,
}

/// Feeds `events` through one fresh counter per repeat and reports the
/// median time. Peak state size is tracked in a separate untimed pass so
/// the polling cannot skew throughput numbers.
pub fn measure_counter(
    episode: &Episode,
    kind: FrequencyKind,
    events: &[Event],
    repeats: usize,
    track_peak: bool,
) -> Measurement {
    let repeats = repeats.max(1);
    let mut seconds = Vec::with_capacity(repeats);
    let mut frequency = 0;
    for _ in 0..repeats {
        let mut engine = Engine::new();
        let h = engine.register(episode.clone(), kind);
        let start = Instant::now();
        for ev in events {
            engine.process_event(*ev).expect("bench stream is time-ordered");
        }
        seconds.push(start.elapsed().as_secs_f64());
        frequency = engine.frequency(h).expect("handle is live");
    }
    seconds.sort_by(f64::total_cmp);
    let median = seconds[seconds.len() / 2];

    let mut peak_entries = 0;
    if track_peak {
        let mut engine = Engine::new();
        let h = engine.register(episode.clone(), kind);
        for ev in events {
            engine.process_event(*ev).expect("bench stream is time-ordered");
            let entries = engine.occ_map(h).expect("handle is live").total_entries();
            peak_entries = peak_entries.max(entries);
        }
    }

    let events_per_sec = if median > 0.0 {
        events.len() as f64 / median
    } else {
        f64::INFINITY
    };
    Measurement {
        events: events.len() as u64,
        seconds: median,
        events_per_sec,
        peak_entries,
        frequency,
    }
}

/// Least-squares line through `(xs, ys)`: returns (slope, intercept, r2).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    assert!(xs.len() >= 2, "need at least two points");
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, intercept, r2)
}

/// Chain episode over the first `k` generated symbols: `s0,s1,...,s(k-1)`.
pub fn chain_episode(k: usize, tau: u64, table: &mut SymbolTable) -> Episode {
    let symbols: Vec<Symbol> = (0..k)
        .map(|i| table.intern(&format!("s{i}")).expect("generated names are non-empty"))
        .collect();
    Episode::new(symbols, tau).expect("k >= 1 and tau >= 1")
}

/// `A,...,A,B` with `k - 1` copies of A.
pub fn repeat_episode(k: usize, tau: u64, table: &mut SymbolTable) -> Episode {
    let a = table.intern("A").expect("non-empty");
    let b = table.intern("B").expect("non-empty");
    let mut symbols = vec![a; k - 1];
    symbols.push(b);
    Episode::new(symbols, tau).expect("k >= 1 and tau >= 1")
}

/// One event per tick: A everywhere, with B at multiples of `period`.
/// `period` beyond `n` gives a pure-A stream. This is the adversarial shape
/// for state growth: every event matches the repeated prefix of an
/// `A,...,A,B` episode, and completions are rare.
pub fn pulse_stream(n: u64, period: u64, table: &mut SymbolTable) -> Vec<Event> {
    let a = table.intern("A").expect("non-empty");
    let b = table.intern("B").expect("non-empty");
    (1..=n)
        .map(|t| Event::new(if t % period == 0 { b } else { a }, t))
        .collect()
}

/// Uniform random stream over `alphabet` symbols, one event per tick.
pub fn uniform_stream(n: u64, alphabet: usize, seed: u64, table: &mut SymbolTable) -> Vec<Event> {
    let spec = UniformSpec { events: n, alphabet, tick: 1, seed };
    generate_uniform(&spec, table).collect()
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub suite: &'static str,
    pub label: String,
    pub measurement: Measurement,
}

/// Stream-length sweep: a 5-symbol chain at fixed tau over uniform streams
/// of increasing length.
pub fn run_n_sweep(ns: &[u64], tau: u64, seed: u64, repeats: usize) -> Vec<BenchRow> {
    ns.iter()
        .map(|&n| {
            let mut table = SymbolTable::new();
            let episode = chain_episode(5, tau, &mut table);
            let events = uniform_stream(n, 5, seed, &mut table);
            let m = measure_counter(&episode, FrequencyKind::NonOverlapped, &events, repeats, false);
            BenchRow { suite: "n-sweep", label: n.to_string(), measurement: m }
        })
        .collect()
}

/// Time-constraint sweep: same stream and episode shape, tau varying.
pub fn run_tau_sweep(taus: &[u64], n: u64, seed: u64, repeats: usize) -> Vec<BenchRow> {
    let mut table = SymbolTable::new();
    let events = uniform_stream(n, 5, seed, &mut table);
    taus.iter()
        .map(|&tau| {
            let mut t = SymbolTable::new();
            let episode = chain_episode(5, tau, &mut t);
            let m = measure_counter(&episode, FrequencyKind::NonOverlapped, &events, repeats, false);
            BenchRow { suite: "tau-sweep", label: tau.to_string(), measurement: m }
        })
        .collect()
}

/// Episode-length sweep over one fixed pulse stream, tracking peak state.
pub fn run_k_sweep(ks: &[usize], n: u64, tau: u64, period: u64) -> Vec<BenchRow> {
    let mut table = SymbolTable::new();
    let events = pulse_stream(n, period, &mut table);
    ks.iter()
        .map(|&k| {
            let mut t = SymbolTable::new();
            let episode = repeat_episode(k, tau, &mut t);
            let m = measure_counter(&episode, FrequencyKind::NonOverlapped, &events, 1, true);
            BenchRow { suite: "k-sweep", label: k.to_string(), measurement: m }
        })
        .collect()
}

pub fn write_csv<W: Write>(w: &mut W, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(w, "suite,label,events,seconds,events_per_sec,peak_entries,frequency")?;
    for row in rows {
        let m = &row.measurement;
        writeln!(
            w,
            "{},{},{},{:.6},{:.0},{},{}",
            row.suite, row.label, m.events, m.seconds, m.events_per_sec, m.peak_entries, m.frequency
        )?;
    }
    Ok(())
}

pub fn write_table<W: Write>(w: &mut W, rows: &[BenchRow]) -> io::Result<()> {
    writeln!(
        w,
        "{:<12} {:>8} {:>9} {:>10} {:>14} {:>12} {:>10}",
        "suite", "label", "events", "seconds", "events/sec", "peak", "frequency"
    )?;
    for row in rows {
        let m = &row.measurement;
        writeln!(
            w,
            "{:<12} {:>8} {:>9} {:>10.4} {:>14.0} {:>12} {:>10}",
            row.suite, row.label, m.events, m.seconds, m.events_per_sec, m.peak_entries, m.frequency
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_fit_recovers_an_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let (slope, intercept, r2) = linear_fit(&xs, &ys);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_fit_flags_nonlinear_data() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let ys = [1.0, 4.0, 9.0, 16.0, 25.0];
        let (_, _, r2) = linear_fit(&xs, &ys);
        assert!(r2 < 0.99, "a parabola should not fit a line perfectly, r2={r2}");
    }

    #[test]
    fn pulse_stream_places_pulses_on_the_period() {
        let mut table = SymbolTable::new();
        let events = pulse_stream(10, 4, &mut table);
        let b = table.lookup("B").unwrap();
        let pulses: Vec<u64> =
            events.iter().filter(|e| e.symbol == b).map(|e| e.time).collect();
        assert_eq!(pulses, vec![4, 8]);
        assert_eq!(events.len(), 10);
    }

    #[test]
    fn measure_counter_reports_counts_and_peaks() {
        let mut table = SymbolTable::new();
        let episode = repeat_episode(3, 10, &mut table);
        let events = pulse_stream(1_000, 25, &mut table);
        let m = measure_counter(&episode, FrequencyKind::NonOverlapped, &events, 2, true);
        assert_eq!(m.events, 1_000);
        assert_eq!(m.frequency, 40);
        // Two A layers, each holding at most a window of 11 entries.
        assert!(m.peak_entries > 0 && m.peak_entries <= 22, "peak {}", m.peak_entries);
        assert!(m.seconds >= 0.0);
    }

    #[test]
    fn csv_output_has_a_stable_header() {
        let rows = run_k_sweep(&[3], 500, 10, 50);
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "suite,label,events,seconds,events_per_sec,peak_entries,frequency"
        );
        assert!(lines.next().unwrap().starts_with("k-sweep,3,500,"));
    }
}
