//! Core vocabulary: symbols, events, batches, episodes, occurrences, and
//! the predicates that define occurrence validity, overlap, and
//! distinctness.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("symbol name must be non-empty")]
    EmptySymbolName,
    #[error("symbol name {0:?} contains a reserved character")]
    ReservedCharacter(String),
    #[error("episode needs at least one symbol")]
    EmptyEpisode,
    #[error("time constraint must be positive")]
    ZeroTau,
    #[error("batch needs at least one symbol")]
    EmptyBatch,
    #[error("occurrence timestamps must be strictly increasing")]
    NonIncreasingOccurrence,
    #[error("occurrence has {got} timestamps but the episode has {want} positions")]
    LengthMismatch { want: usize, got: usize },
    #[error("bad episode syntax: {0}")]
    BadEpisodeSyntax(String),
}

/// Interned event type identifier. Cheap to copy, compare, and hash.
///
/// Ids are only meaningful relative to the [`SymbolTable`] that produced
/// them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u32);

impl Symbol {
    pub const fn from_raw(id: u32) -> Self {
        Symbol(id)
    }

    pub const fn raw(self) -> u32 {
        self.0
    }
}

/// Interns symbol names to dense ids. Interning the same name twice yields
/// the same id. Not internally synchronized; wrap it in a lock or confine
/// interning to one thread when sharing.
#[derive(Debug, Default, Clone)]
pub struct SymbolTable {
    names: Vec<String>,
    index: HashMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns `name`, returning the existing id when already present.
    pub fn intern(&mut self, name: &str) -> Result<Symbol, ModelError> {
        if name.is_empty() {
            return Err(ModelError::EmptySymbolName);
        }
        if let Some(&sym) = self.index.get(name) {
            return Ok(sym);
        }
        let sym = Symbol(self.names.len() as u32);
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), sym);
        Ok(sym)
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.index.get(name).copied()
    }

    /// Name for `sym`. Panics if `sym` came from a different table.
    pub fn name(&self, sym: Symbol) -> &str {
        &self.names[sym.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// A single event instance: one symbol at one timestamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub symbol: Symbol,
    pub time: u64,
}

impl Event {
    pub const fn new(symbol: Symbol, time: u64) -> Self {
        Event { symbol, time }
    }
}

/// A set of symbols sharing one timestamp (one slot of a complex stream).
/// Symbols are kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventBatch {
    time: u64,
    symbols: Vec<Symbol>,
}

impl EventBatch {
    pub fn new(time: u64, symbols: impl IntoIterator<Item = Symbol>) -> Result<Self, ModelError> {
        let mut symbols: Vec<Symbol> = symbols.into_iter().collect();
        symbols.sort_unstable();
        symbols.dedup();
        if symbols.is_empty() {
            return Err(ModelError::EmptyBatch);
        }
        Ok(EventBatch { time, symbols })
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        self.symbols.iter().map(move |&s| Event::new(s, self.time))
    }
}

/// How occurrence counts are accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrequencyKind {
    /// Maximum set of occurrences whose `[t_1, t_k]` spans are pairwise
    /// disjoint (strictly: one must end before the other starts).
    NonOverlapped,
    /// Maximum set of occurrences sharing no event instance.
    Distinct,
}

impl fmt::Display for FrequencyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrequencyKind::NonOverlapped => f.write_str("nonoverlapped"),
            FrequencyKind::Distinct => f.write_str("distinct"),
        }
    }
}

impl std::str::FromStr for FrequencyKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nonoverlapped" | "non-overlapped" => Ok(FrequencyKind::NonOverlapped),
            "distinct" => Ok(FrequencyKind::Distinct),
            other => Err(ModelError::BadEpisodeSyntax(format!(
                "unknown frequency mode {other:?} (expected nonoverlapped or distinct)"
            ))),
        }
    }
}

/// A serial episode: an ordered list of symbols (repeats allowed) that must
/// occur at strictly increasing timestamps spanning at most `tau` ticks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Episode {
    symbols: Vec<Symbol>,
    tau: u64,
}

impl Episode {
    pub fn new(symbols: Vec<Symbol>, tau: u64) -> Result<Self, ModelError> {
        if symbols.is_empty() {
            return Err(ModelError::EmptyEpisode);
        }
        if tau == 0 {
            return Err(ModelError::ZeroTau);
        }
        Ok(Episode { symbols, tau })
    }

    /// Parses `sym,sym,...@tau=<ticks>`. Symbol names are trimmed and may
    /// contain anything except `,` and `|`; the tau marker is searched from
    /// the right so names may contain `@`.
    pub fn parse(text: &str, table: &mut SymbolTable) -> Result<Self, ModelError> {
        let (head, tau_text) = text
            .rsplit_once("@tau=")
            .ok_or_else(|| ModelError::BadEpisodeSyntax(format!("missing @tau= in {text:?}")))?;
        let tau: u64 = tau_text.trim().parse().map_err(|_| {
            ModelError::BadEpisodeSyntax(format!("bad tau value {:?}", tau_text.trim()))
        })?;
        let mut symbols = Vec::new();
        for name in head.split(',') {
            let name = name.trim();
            if name.contains('|') {
                return Err(ModelError::ReservedCharacter(name.to_owned()));
            }
            symbols.push(table.intern(name)?);
        }
        Episode::new(symbols, tau)
    }

    /// Renders the episode back into the `sym,sym,...@tau=<ticks>` syntax.
    pub fn display_with(&self, table: &SymbolTable) -> String {
        let names: Vec<&str> = self.symbols.iter().map(|&s| table.name(s)).collect();
        format!("{}@tau={}", names.join(","), self.tau)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, position: usize) -> Symbol {
        self.symbols[position]
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }
}

/// Timestamps of one episode occurrence, strictly increasing, one per
/// episode position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Occurrence(Vec<u64>);

impl Occurrence {
    pub fn new(times: Vec<u64>) -> Result<Self, ModelError> {
        if times.is_empty() {
            return Err(ModelError::NonIncreasingOccurrence);
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModelError::NonIncreasingOccurrence);
        }
        Ok(Occurrence(times))
    }

    /// Internal constructor for timestamps already known to be strictly
    /// increasing.
    pub(crate) fn from_sorted(times: Vec<u64>) -> Self {
        debug_assert!(times.windows(2).all(|w| w[0] < w[1]) && !times.is_empty());
        Occurrence(times)
    }

    pub fn times(&self) -> &[u64] {
        &self.0
    }

    pub fn start(&self) -> u64 {
        self.0[0]
    }

    pub fn end(&self) -> u64 {
        *self.0.last().unwrap()
    }

    pub fn span(&self) -> u64 {
        self.end() - self.start()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, ")")
    }
}

/// True iff `occ` is a valid occurrence of `episode` in `events`: right
/// length (an error otherwise), strictly increasing, span within tau, and
/// every position backed by an event instance with the matching symbol.
pub fn is_valid_occurrence(
    episode: &Episode,
    events: &[Event],
    occ: &Occurrence,
) -> Result<bool, ModelError> {
    if occ.len() != episode.len() {
        return Err(ModelError::LengthMismatch {
            want: episode.len(),
            got: occ.len(),
        });
    }
    if occ.span() > episode.tau() {
        return Ok(false);
    }
    for (i, &t) in occ.times().iter().enumerate() {
        let sym = episode.symbol(i);
        if !events.iter().any(|ev| ev.symbol == sym && ev.time == t) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff the two occurrences' spans are disjoint: one starts strictly
/// after the other ends. Touching at a boundary timestamp counts as
/// overlap.
pub fn are_nonoverlapped(a: &Occurrence, b: &Occurrence) -> bool {
    b.start() > a.end() || a.start() > b.end()
}

/// True iff the two occurrences share no event instance: for any positions
/// `i, j` with equal episode symbols, `a.t_i != b.t_j`.
pub fn are_distinct(episode: &Episode, a: &Occurrence, b: &Occurrence) -> Result<bool, ModelError> {
    for occ in [a, b] {
        if occ.len() != episode.len() {
            return Err(ModelError::LengthMismatch {
                want: episode.len(),
                got: occ.len(),
            });
        }
    }
    for (i, &ta) in a.times().iter().enumerate() {
        for (j, &tb) in b.times().iter().enumerate() {
            if episode.symbol(i) == episode.symbol(j) && ta == tb {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
