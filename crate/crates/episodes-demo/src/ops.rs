//! The playground's operations, kept independent of the browser bindings so
//! they compile and test on the host. Each function takes plain text from
//! the page's inputs and returns a JSON document for the page to render, or
//! a human-readable error string.

use std::io::Cursor;

use episodes::model::{Episode, FrequencyKind, Symbol, SymbolTable};
use episodes::streamio::{read_stream, StreamRecord};
use episodes::Engine;
use serde::Serialize;

/// Hard cap on stream length; the playground is for studying small streams,
/// not for benchmarking inside a browser tab.
pub const MAX_EVENTS: usize = 20_000;
/// The trace view renders every per-event state, so it gets a tighter cap.
pub const MAX_TRACE_EVENTS: usize = 500;
/// Upper end of the sweepable window range.
pub const MAX_TAU: u64 = 100_000;
/// A sweep samples at most this many window sizes.
const MAX_SWEEP_POINTS: u64 = 120;
/// Budget on (window sizes) x (records) per sweep call, to keep one click
/// comfortably under a second.
const MAX_SWEEP_WORK: u64 = 1_500_000;

#[derive(Serialize)]
pub struct TraceStep {
    /// 1-based record number.
    pub index: usize,
    pub time: u64,
    /// Symbol names arriving at this instant (several for a complex event).
    pub symbols: Vec<String>,
    /// Layer contents after the record, bottom of the chain last.
    pub layers: Vec<Vec<u64>>,
    /// 1-based index of the first empty layer, k+1 when all are filled.
    pub active_layer: usize,
    /// Occurrences accepted while processing this record.
    pub emitted: Vec<Vec<u64>>,
    pub frequency: u64,
}

#[derive(Serialize)]
pub struct TraceResult {
    pub episode: String,
    pub mode: String,
    pub tau: u64,
    /// One name per layer, in episode order.
    pub layer_symbols: Vec<String>,
    pub steps: Vec<TraceStep>,
    pub frequency: u64,
    pub events: u64,
    /// Timestamps inserted into the counter's lists across the run.
    pub matches: u64,
}

#[derive(Serialize)]
pub struct ModeCount {
    pub mode: String,
    pub frequency: u64,
    pub occurrences: Vec<Vec<u64>>,
}

#[derive(Serialize)]
pub struct CompareResult {
    pub episode: String,
    pub tau: u64,
    pub events: u64,
    pub nonoverlapped: ModeCount,
    pub distinct: ModeCount,
}

#[derive(Serialize)]
pub struct SweepPoint {
    pub tau: u64,
    pub nonoverlapped: u64,
    pub distinct: u64,
}

#[derive(Serialize)]
pub struct SweepResult {
    pub symbols: Vec<String>,
    pub events: u64,
    pub points: Vec<SweepPoint>,
}

fn parse_stream(text: &str, table: &mut SymbolTable) -> Result<Vec<StreamRecord>, String> {
    let mut records = Vec::new();
    for record in read_stream(Cursor::new(text), table) {
        let record = record.map_err(|e| e.to_string())?;
        records.push(record);
        if records.len() > MAX_EVENTS {
            return Err(format!("stream too long for the playground (over {MAX_EVENTS} records)"));
        }
    }
    if records.is_empty() {
        return Err("the stream is empty; add lines like `3,A`".into());
    }
    Ok(records)
}

fn feed(engine: &mut Engine, record: &StreamRecord) -> Result<Vec<Vec<u64>>, String> {
    let emissions = match record {
        StreamRecord::Event(ev) => engine.process_event(*ev),
        StreamRecord::Batch(batch) => engine.process_batch(batch),
    }
    .map_err(|e| e.to_string())?;
    Ok(emissions.into_iter().map(|(_, occ)| occ.times().to_vec()).collect())
}

fn count_run(
    episode: &Episode,
    kind: FrequencyKind,
    records: &[StreamRecord],
) -> Result<(u64, Vec<Vec<u64>>), String> {
    let mut engine = Engine::new();
    let h = engine.register(episode.clone(), kind);
    let mut occurrences = Vec::new();
    for record in records {
        occurrences.extend(feed(&mut engine, record)?);
    }
    Ok((engine.frequency(h).expect("handle is live"), occurrences))
}

/// Runs one counter over the stream and reports the state after every
/// record: layer contents, active layer, emissions, and the running count.
pub fn trace_json(episode_text: &str, mode_text: &str, stream_text: &str) -> Result<String, String> {
    let mode: FrequencyKind = mode_text.trim().parse().map_err(|e: episodes::ModelError| e.to_string())?;
    let mut table = SymbolTable::new();
    let episode = Episode::parse(episode_text.trim(), &mut table).map_err(|e| e.to_string())?;
    let records = parse_stream(stream_text, &mut table)?;
    if records.len() > MAX_TRACE_EVENTS {
        return Err(format!(
            "the trace view walks at most {MAX_TRACE_EVENTS} records; use Compare for longer streams"
        ));
    }

    let layer_symbols: Vec<String> =
        episode.symbols().iter().map(|&s| table.name(s).to_owned()).collect();
    let tau = episode.tau();
    let episode_name = episode.display_with(&table);

    let mut engine = Engine::new();
    let h = engine.register(episode, mode);
    let mut steps = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let symbols: Vec<String> = match record {
            StreamRecord::Event(ev) => vec![table.name(ev.symbol).to_owned()],
            StreamRecord::Batch(batch) => {
                batch.symbols().iter().map(|&s| table.name(s).to_owned()).collect()
            }
        };
        let emitted = feed(&mut engine, record)?;
        let map = engine.occ_map(h).expect("handle is live");
        let layers: Vec<Vec<u64>> =
            (1..=map.k()).map(|j| map.layer(j).iter().copied().collect()).collect();
        steps.push(TraceStep {
            index: i + 1,
            time: record.time(),
            symbols,
            layers,
            active_layer: map.active_layer(),
            emitted,
            frequency: engine.frequency(h).expect("handle is live"),
        });
    }

    let metrics = engine.metrics();
    let result = TraceResult {
        episode: episode_name,
        mode: mode.to_string(),
        tau,
        layer_symbols,
        frequency: engine.frequency(h).expect("handle is live"),
        steps,
        events: metrics.events_processed,
        matches: metrics.matches,
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

/// Counts the same episode in both modes over one stream.
pub fn compare_json(episode_text: &str, stream_text: &str) -> Result<String, String> {
    let mut table = SymbolTable::new();
    let episode = Episode::parse(episode_text.trim(), &mut table).map_err(|e| e.to_string())?;
    let records = parse_stream(stream_text, &mut table)?;
    let (non_freq, non_occ) = count_run(&episode, FrequencyKind::NonOverlapped, &records)?;
    let (dis_freq, dis_occ) = count_run(&episode, FrequencyKind::Distinct, &records)?;
    let result = CompareResult {
        episode: episode.display_with(&table),
        tau: episode.tau(),
        events: records.len() as u64,
        nonoverlapped: ModeCount {
            mode: FrequencyKind::NonOverlapped.to_string(),
            frequency: non_freq,
            occurrences: non_occ,
        },
        distinct: ModeCount {
            mode: FrequencyKind::Distinct.to_string(),
            frequency: dis_freq,
            occurrences: dis_occ,
        },
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

/// Counts the episode at a ladder of window sizes from 1 to `tau_max`,
/// in both modes, for the frequency-vs-window chart. Accepts either bare
/// symbols (`A,A,B`) or full episode text (the `@tau=` suffix is ignored).
pub fn tau_sweep_json(symbols_text: &str, stream_text: &str, tau_max: u64) -> Result<String, String> {
    if tau_max == 0 {
        return Err("the window range must reach at least 1".into());
    }
    if tau_max > MAX_TAU {
        return Err(format!("window range capped at {MAX_TAU}"));
    }
    let base = symbols_text.trim();
    let base = base.split_once("@tau=").map_or(base, |(head, _)| head);
    let mut table = SymbolTable::new();
    let symbols: Vec<Symbol> = base
        .split(',')
        .map(|name| table.intern(name.trim()))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let records = parse_stream(stream_text, &mut table)?;

    let step = (tau_max / MAX_SWEEP_POINTS).max(1);
    let mut taus: Vec<u64> = (1..=tau_max).step_by(step as usize).collect();
    if taus.last() != Some(&tau_max) {
        taus.push(tau_max);
    }
    if taus.len() as u64 * records.len() as u64 > MAX_SWEEP_WORK {
        return Err("sweep too large; shorten the stream or the window range".into());
    }

    let mut points = Vec::with_capacity(taus.len());
    for tau in taus {
        let episode = Episode::new(symbols.clone(), tau).map_err(|e| e.to_string())?;
        let (non, _) = count_run(&episode, FrequencyKind::NonOverlapped, &records)?;
        let (dis, _) = count_run(&episode, FrequencyKind::Distinct, &records)?;
        points.push(SweepPoint { tau, nonoverlapped: non, distinct: dis });
    }
    let result = SweepResult {
        symbols: symbols.iter().map(|&s| table.name(s).to_owned()).collect(),
        events: records.len() as u64,
        points,
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}
