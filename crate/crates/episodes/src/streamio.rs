//! Reading, writing, and generating event streams.
//!
//! The text format is line oriented:
//!
//! ```text
//! # comment
//! 3,login
//! 4,login|alarm      <- several symbols sharing one timestamp
//! ```
//!
//! Each line is `<timestamp>,<symbol>` with `|` separating the members of a
//! batch. Timestamps must be nondecreasing across lines. Blank lines and
//! lines starting with `#` are skipped. Symbol names may contain spaces but
//! not `,` or `|`; surrounding whitespace is trimmed.

use std::io::{self, BufRead, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::Engine;
use crate::model::{Episode, Event, EventBatch, FrequencyKind, Symbol, SymbolTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("expected <timestamp>,<symbols>")]
    MissingComma,
    #[error("bad timestamp {0:?}")]
    BadTimestamp(String),
    #[error("empty symbol name")]
    EmptySymbol,
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error("line {line}: {error}")]
    Parse {
        line: u64,
        #[source]
        error: ParseError,
    },
    #[error("line {line}: timestamp {got} is behind the previous timestamp {prev}")]
    OutOfOrder { line: u64, prev: u64, got: u64 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One parsed stream line: a single event or a same-timestamp batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StreamRecord {
    Event(Event),
    Batch(EventBatch),
}

impl StreamRecord {
    pub fn time(&self) -> u64 {
        match self {
            StreamRecord::Event(ev) => ev.time,
            StreamRecord::Batch(batch) => batch.time(),
        }
    }
}

/// Parses one line. Blank lines and `#` comments yield `Ok(None)`.
pub fn parse_record(
    line: &str,
    table: &mut SymbolTable,
) -> Result<Option<StreamRecord>, ParseError> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let (time_text, symbols_text) = line.split_once(',').ok_or(ParseError::MissingComma)?;
    let time_text = time_text.trim();
    let time: u64 = time_text
        .parse()
        .map_err(|_| ParseError::BadTimestamp(time_text.to_owned()))?;
    let mut symbols = Vec::new();
    for part in symbols_text.split('|') {
        let name = part.trim();
        if name.is_empty() {
            return Err(ParseError::EmptySymbol);
        }
        symbols.push(table.intern(name).expect("name is non-empty"));
    }
    if symbols.len() == 1 {
        Ok(Some(StreamRecord::Event(Event::new(symbols[0], time))))
    } else {
        let batch = EventBatch::new(time, symbols).expect("at least two symbols");
        Ok(Some(StreamRecord::Batch(batch)))
    }
}

/// Streaming reader over the line format. Yields records in file order and
/// fails fast on malformed lines or backwards timestamps, reporting
/// one-based line numbers.
pub struct StreamReader<'t, R> {
    lines: io::Lines<R>,
    table: &'t mut SymbolTable,
    line: u64,
    last_time: Option<u64>,
}

pub fn read_stream<R: BufRead>(reader: R, table: &mut SymbolTable) -> StreamReader<'_, R> {
    StreamReader {
        lines: reader.lines(),
        table,
        line: 0,
        last_time: None,
    }
}

impl<R: BufRead> Iterator for StreamReader<'_, R> {
    type Item = Result<StreamRecord, StreamError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let text = match self.lines.next()? {
                Ok(text) => text,
                Err(err) => return Some(Err(err.into())),
            };
            self.line += 1;
            match parse_record(&text, self.table) {
                Err(error) => return Some(Err(StreamError::Parse { line: self.line, error })),
                Ok(None) => continue,
                Ok(Some(record)) => {
                    let t = record.time();
                    if let Some(prev) = self.last_time {
                        if t < prev {
                            return Some(Err(StreamError::OutOfOrder {
                                line: self.line,
                                prev,
                                got: t,
                            }));
                        }
                    }
                    self.last_time = Some(t);
                    return Some(Ok(record));
                }
            }
        }
    }
}

/// Writes one record in the line format.
pub fn write_record<W: Write>(
    w: &mut W,
    record: &StreamRecord,
    table: &SymbolTable,
) -> io::Result<()> {
    match record {
        StreamRecord::Event(ev) => writeln!(w, "{},{}", ev.time, table.name(ev.symbol)),
        StreamRecord::Batch(batch) => {
            write!(w, "{},", batch.time())?;
            for (i, &sym) in batch.symbols().iter().enumerate() {
                if i > 0 {
                    w.write_all(b"|")?;
                }
                w.write_all(table.name(sym).as_bytes())?;
            }
            writeln!(w)
        }
    }
}

/// Parameters for [`generate_uniform`].
#[derive(Debug, Clone)]
pub struct UniformSpec {
    pub events: u64,
    /// Alphabet size; symbols are named `s0`, `s1`, ...
    pub alphabet: usize,
    /// Gap between consecutive timestamps.
    pub tick: u64,
    pub seed: u64,
}

/// Deterministic synthetic stream: event `i` (one-based) carries timestamp
/// `i * tick` and a symbol drawn uniformly from the alphabet.
///
/// Panics if `alphabet` is zero or `tick` is zero.
pub fn generate_uniform(spec: &UniformSpec, table: &mut SymbolTable) -> UniformStream {
    assert!(spec.alphabet > 0, "alphabet must be non-empty");
    assert!(spec.tick > 0, "tick must be positive");
    let symbols: Vec<Symbol> = (0..spec.alphabet)
        .map(|i| table.intern(&format!("s{i}")).expect("generated names are non-empty"))
        .collect();
    UniformStream {
        symbols,
        remaining: spec.events,
        next_index: 1,
        tick: spec.tick,
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
    }
}

pub struct UniformStream {
    symbols: Vec<Symbol>,
    remaining: u64,
    next_index: u64,
    tick: u64,
    rng: ChaCha8Rng,
}

impl Iterator for UniformStream {
    type Item = Event;

    fn next(&mut self) -> Option<Event> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let time = self.next_index * self.tick;
        self.next_index += 1;
        let symbol = self.symbols[self.rng.gen_range(0..self.symbols.len())];
        Some(Event::new(symbol, time))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).ok();
        (n.unwrap_or(usize::MAX), n)
    }
}

/// Average number of layer insertions per event for `episode` over a sample
/// stream. This is the match density the per-event cost scales with; it can
/// exceed 1 when several layers accept the same symbol.
pub fn measure_selectivity(episode: &Episode, kind: FrequencyKind, events: &[Event]) -> f64 {
    if events.is_empty() {
        return 0.0;
    }
    let mut engine = Engine::new();
    engine.register(episode.clone(), kind);
    for ev in events {
        engine.process_event(*ev).expect("sample stream must be time-ordered");
    }
    let metrics = engine.metrics();
    metrics.matches as f64 / metrics.events_processed as f64
}
