//! Multi-episode counting engine.
//!
//! An [`Engine`] owns one [`OccMap`] per registered episode and routes each
//! arriving event to the counters whose episode alphabet contains its
//! symbol, so unrelated events cost one hash probe. Processing is
//! single-threaded and deterministic; [`ShardedEngine`] partitions counters
//! across worker threads and produces identical per-counter results.

use std::collections::{BTreeMap, HashMap};
use std::sync::mpsc;
use std::thread;

use thiserror::Error;

use crate::model::{Episode, Event, EventBatch, FrequencyKind, Occurrence, Symbol};
use crate::occmap::OccMap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("event at t={got} arrived after t={last}; stream must be nondecreasing")]
    OutOfOrder { last: u64, got: u64 },
    #[error("unknown counter handle")]
    UnknownHandle,
}

/// Identifies one registered counter within its engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CounterHandle(u32);

impl CounterHandle {
    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

/// Point-in-time snapshot of engine counters.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EngineMetrics {
    /// Events fed in, matching or not (batch members count individually).
    pub events_processed: u64,
    /// Timestamp insertions across all counters and layers.
    pub matches: u64,
    /// Current stored timestamps per counter.
    pub per_counter_entries: BTreeMap<CounterHandle, usize>,
    /// Current frequency per counter.
    pub per_counter_frequency: BTreeMap<CounterHandle, u64>,
}

struct Counter {
    map: OccMap,
    episode: Episode,
    freq: u64,
}

/// Single-threaded deterministic episode counter.
pub struct Engine {
    counters: Vec<Counter>,
    dispatch: HashMap<Symbol, Vec<u32>>,
    last_time: Option<u64>,
    events_processed: u64,
    matches: u64,
}

impl Engine {
    pub fn new() -> Self {
        Engine {
            counters: Vec::new(),
            dispatch: HashMap::new(),
            last_time: None,
            events_processed: 0,
            matches: 0,
        }
    }

    /// Registers an episode under a frequency mode. Registering the same
    /// episode twice creates two independent counters.
    pub fn register(&mut self, episode: Episode, mode: FrequencyKind) -> CounterHandle {
        let idx = self.counters.len() as u32;
        for &sym in episode.symbols() {
            let targets = self.dispatch.entry(sym).or_default();
            if targets.last() != Some(&idx) {
                targets.push(idx);
            }
        }
        self.counters.push(Counter {
            map: OccMap::new(&episode, mode),
            episode,
            freq: 0,
        });
        CounterHandle(idx)
    }

    /// Feeds one event. Returns the occurrences accepted by counters in
    /// registration order (at most one per counter per event). Rejects
    /// out-of-order timestamps without touching state.
    pub fn process_event(
        &mut self,
        event: Event,
    ) -> Result<Vec<(CounterHandle, Occurrence)>, EngineError> {
        if let Some(last) = self.last_time {
            if event.time < last {
                return Err(EngineError::OutOfOrder { last, got: event.time });
            }
        }
        self.last_time = Some(event.time);
        self.events_processed += 1;

        let mut emissions = Vec::new();
        if let Some(targets) = self.dispatch.get(&event.symbol) {
            for &idx in targets {
                let counter = &mut self.counters[idx as usize];
                let up = counter
                    .map
                    .list_update(event)
                    .expect("engine enforces stream order");
                self.matches += u64::from(up.inserted);
                if up.bottom_filled {
                    if let crate::occmap::Validation::Accepted(occ) =
                        counter.map.validate().expect("bottom layer was just filled")
                    {
                        counter.freq += 1;
                        emissions.push((CounterHandle(idx), occ));
                    }
                }
            }
        }
        Ok(emissions)
    }

    /// Feeds a batch as its member events in symbol order, all sharing the
    /// batch timestamp.
    pub fn process_batch(
        &mut self,
        batch: &EventBatch,
    ) -> Result<Vec<(CounterHandle, Occurrence)>, EngineError> {
        let mut emissions = Vec::new();
        for event in batch.events() {
            emissions.extend(self.process_event(event)?);
        }
        Ok(emissions)
    }

    pub fn frequency(&self, handle: CounterHandle) -> Result<u64, EngineError> {
        self.counter(handle).map(|c| c.freq)
    }

    pub fn episode(&self, handle: CounterHandle) -> Result<&Episode, EngineError> {
        self.counter(handle).map(|c| &c.episode)
    }

    pub fn mode(&self, handle: CounterHandle) -> Result<FrequencyKind, EngineError> {
        self.counter(handle).map(|c| c.map.mode())
    }

    /// Read access to a counter's match state (diagnostics, snapshots).
    pub fn occ_map(&self, handle: CounterHandle) -> Result<&OccMap, EngineError> {
        self.counter(handle).map(|c| &c.map)
    }

    /// Clears one counter's match state and zeroes its frequency. Global
    /// metrics and stream-order enforcement are unaffected.
    pub fn reset(&mut self, handle: CounterHandle) -> Result<(), EngineError> {
        let counter = self
            .counters
            .get_mut(handle.index())
            .ok_or(EngineError::UnknownHandle)?;
        counter.map.reset();
        counter.freq = 0;
        Ok(())
    }

    pub fn metrics(&self) -> EngineMetrics {
        let mut per_counter_entries = BTreeMap::new();
        let mut per_counter_frequency = BTreeMap::new();
        for (i, c) in self.counters.iter().enumerate() {
            per_counter_entries.insert(CounterHandle(i as u32), c.map.total_entries());
            per_counter_frequency.insert(CounterHandle(i as u32), c.freq);
        }
        EngineMetrics {
            events_processed: self.events_processed,
            matches: self.matches,
            per_counter_entries,
            per_counter_frequency,
        }
    }

    pub fn counter_count(&self) -> usize {
        self.counters.len()
    }

    fn counter(&self, handle: CounterHandle) -> Result<&Counter, EngineError> {
        self.counters.get(handle.index()).ok_or(EngineError::UnknownHandle)
    }
}

impl Default for Engine {
    fn default() -> Self {
        Self::new()
    }
}

enum ShardMsg {
    Event(Event),
    Reset(u32),
}

/// Counters partitioned round-robin across worker threads. Events are
/// fanned out by value to the shards whose counters listen for the symbol;
/// per-counter results are identical to a single-threaded [`Engine`]
/// because a counter's state depends only on the subsequence of events
/// matching its own alphabet.
pub struct ShardedEngine {
    senders: Vec<mpsc::SyncSender<ShardMsg>>,
    workers: Vec<thread::JoinHandle<Engine>>,
    /// Global handle -> (shard, handle within the shard's engine).
    placement: Vec<(usize, CounterHandle)>,
    /// Symbol -> shards with at least one listening counter.
    routes: HashMap<Symbol, Vec<usize>>,
    last_time: Option<u64>,
    events_processed: u64,
}

impl ShardedEngine {
    /// Spawns `shards` workers (at least one) and registers the given
    /// episodes round-robin.
    pub fn new(specs: Vec<(Episode, FrequencyKind)>, shards: usize) -> Self {
        let shards = shards.max(1).min(specs.len().max(1));
        let mut senders = Vec::with_capacity(shards);
        let mut receivers = Vec::with_capacity(shards);
        for _ in 0..shards {
            let (tx, rx) = mpsc::sync_channel::<ShardMsg>(8192);
            senders.push(tx);
            receivers.push(rx);
        }

        let mut engines: Vec<Engine> = (0..shards).map(|_| Engine::new()).collect();
        let mut placement = Vec::with_capacity(specs.len());
        let mut routes: HashMap<Symbol, Vec<usize>> = HashMap::new();
        for (i, (episode, mode)) in specs.into_iter().enumerate() {
            let shard = i % shards;
            for &sym in episode.symbols() {
                let list = routes.entry(sym).or_default();
                if !list.contains(&shard) {
                    list.push(shard);
                }
            }
            let handle = engines[shard].register(episode, mode);
            placement.push((shard, handle));
        }

        let workers = engines
            .into_iter()
            .zip(receivers)
            .map(|(mut engine, rx)| {
                thread::spawn(move || {
                    while let Ok(msg) = rx.recv() {
                        match msg {
                            ShardMsg::Event(ev) => {
                                engine.process_event(ev).expect("router enforces order");
                            }
                            ShardMsg::Reset(idx) => {
                                engine.reset(CounterHandle(idx)).expect("router owns placement");
                            }
                        }
                    }
                    engine
                })
            })
            .collect();

        ShardedEngine {
            senders,
            workers,
            placement,
            routes,
            last_time: None,
            events_processed: 0,
        }
    }

    pub fn handles(&self) -> Vec<CounterHandle> {
        (0..self.placement.len() as u32).map(CounterHandle).collect()
    }

    pub fn process_event(&mut self, event: Event) -> Result<(), EngineError> {
        if let Some(last) = self.last_time {
            if event.time < last {
                return Err(EngineError::OutOfOrder { last, got: event.time });
            }
        }
        self.last_time = Some(event.time);
        self.events_processed += 1;
        if let Some(shards) = self.routes.get(&event.symbol) {
            for &s in shards {
                self.senders[s]
                    .send(ShardMsg::Event(event))
                    .expect("worker alive until finish");
            }
        }
        Ok(())
    }

    pub fn process_batch(&mut self, batch: &EventBatch) -> Result<(), EngineError> {
        for event in batch.events() {
            self.process_event(event)?;
        }
        Ok(())
    }

    pub fn reset(&mut self, handle: CounterHandle) -> Result<(), EngineError> {
        let &(shard, local) = self
            .placement
            .get(handle.index())
            .ok_or(EngineError::UnknownHandle)?;
        self.senders[shard]
            .send(ShardMsg::Reset(local.0))
            .expect("worker alive until finish");
        Ok(())
    }

    /// Joins the workers and returns per-counter frequencies in
    /// registration order plus merged metrics.
    pub fn finish(self) -> (Vec<u64>, EngineMetrics) {
        drop(self.senders);
        let engines: Vec<Engine> = self.workers.into_iter().map(|w| w.join().unwrap()).collect();
        let mut freqs = Vec::with_capacity(self.placement.len());
        let mut metrics = EngineMetrics {
            events_processed: self.events_processed,
            ..EngineMetrics::default()
        };
        for (i, &(shard, local)) in self.placement.iter().enumerate() {
            let engine = &engines[shard];
            let freq = engine.frequency(local).unwrap();
            let entries = engine.occ_map(local).unwrap().total_entries();
            freqs.push(freq);
            let global = CounterHandle(i as u32);
            metrics.per_counter_frequency.insert(global, freq);
            metrics.per_counter_entries.insert(global, entries);
        }
        metrics.matches = engines.iter().map(|e| e.metrics().matches).sum();
        (freqs, metrics)
    }
}
