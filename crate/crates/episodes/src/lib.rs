//! One-pass counting of serial episode occurrences in event streams.
//!
//! An episode is an ordered list of event symbols with a hard time span
//! bound `tau`. Feeding a stream of `(symbol, timestamp)` events through an
//! [`engine::Engine`] counts, per registered episode, either the maximum
//! number of pairwise non-overlapped occurrences or the number of
//! occurrences that share no event instance (distinct), without ever
//! buffering the stream.
//!
//! Modules:
//! - [`model`]: symbols, events, episodes, occurrences, and the predicates
//!   that define validity, overlap, and distinctness.
//! - [`occmap`]: the per-episode match state (one timestamp list per
//!   episode position) and its update/validate operations.
//! - [`engine`]: multi-episode dispatch, counting, metrics, sharding.
//! - [`oracle`]: brute-force reference counters for small inputs plus a
//!   randomized engine-vs-oracle conformance runner.
//! - [`streamio`]: the line-oriented event file format, a seeded uniform
//!   stream generator, and selectivity measurement.
//! - [`rules`]: threshold alert rules compiled down to engine counters.

pub mod engine;
pub mod model;
pub mod occmap;
pub mod oracle;
pub mod rules;
pub mod streamio;

pub use engine::{CounterHandle, Engine, EngineError, EngineMetrics};
pub use model::{
    Episode, Event, EventBatch, FrequencyKind, ModelError, Occurrence, Symbol, SymbolTable,
};
pub use occmap::{OccMap, OccMapError, Validation};
