//! Per-episode match state.
//!
//! An [`OccMap`] keeps one ascending timestamp list `L_i` per episode
//! position plus the index of the first empty list (the active layer
//! `ell`). An arriving event is appended to every active list whose symbol
//! matches; when the bottom list fills, a validation pass either extracts
//! an occurrence and charges the frequency or eliminates entries that can
//! no longer contribute.
//!
//! Invariants maintained between events:
//! - each list is strictly ascending and spans at most `tau` ticks;
//! - nonempty lists form a prefix `L_1..L_{ell-1}`, lists `L_ell..L_k` are
//!   empty;
//! - in NonOverlapped mode the list minima strictly increase across the
//!   nonempty prefix.

use std::collections::VecDeque;

use thiserror::Error;

use crate::model::{Episode, Event, FrequencyKind, Occurrence, Symbol, SymbolTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OccMapError {
    #[error("event at t={got} arrived after t={last}; stream must be nondecreasing")]
    OutOfOrder { last: u64, got: u64 },
    #[error("validation requires a nonempty bottom layer")]
    EmptyBottom,
}

/// Outcome of feeding one event through [`OccMap::list_update`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ListUpdate {
    /// True iff the bottom layer is nonempty after the update, i.e. a
    /// validation pass is due.
    pub bottom_filled: bool,
    /// Number of timestamp insertions performed (an event can land in
    /// several layers when the episode repeats its symbol).
    pub inserted: u32,
}

/// Outcome of a validation pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validation {
    Accepted(Occurrence),
    Rejected,
}

/// Match state for a single episode under one frequency mode.
#[derive(Debug, Clone)]
pub struct OccMap {
    symbols: Vec<Symbol>,
    tau: u64,
    mode: FrequencyKind,
    layers: Vec<VecDeque<u64>>,
    /// Last timestamp ever appended to each layer. Survives elimination so
    /// a record replaying an already-consumed (symbol, time) instance
    /// cannot re-enter a layer as a fresh instance.
    last_appended: Vec<Option<u64>>,
    /// 1-based index of the first empty layer; `k + 1` when none is empty.
    active: usize,
    last_time: Option<u64>,
    /// NonOverlapped only: end of the last accepted occurrence. Appends at
    /// or before it are suppressed, since any occurrence through them would
    /// overlap the accepted one (possible only inside same-timestamp
    /// batches).
    last_accept_end: Option<u64>,
}

impl OccMap {
    pub fn new(episode: &Episode, mode: FrequencyKind) -> Self {
        let k = episode.len();
        OccMap {
            symbols: episode.symbols().to_vec(),
            tau: episode.tau(),
            mode,
            layers: vec![VecDeque::new(); k],
            last_appended: vec![None; k],
            active: 1,
            last_time: None,
            last_accept_end: None,
        }
    }

    pub fn k(&self) -> usize {
        self.symbols.len()
    }

    pub fn tau(&self) -> u64 {
        self.tau
    }

    pub fn mode(&self) -> FrequencyKind {
        self.mode
    }

    /// 1-based index of the first empty layer (`k + 1` when all layers are
    /// nonempty).
    pub fn active_layer(&self) -> usize {
        self.active
    }

    /// Timestamps currently held by the 1-based layer `i`.
    pub fn layer(&self, i: usize) -> &VecDeque<u64> {
        &self.layers[i - 1]
    }

    pub fn total_entries(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    /// Clears all match state. Stream-order enforcement continues from the
    /// last seen timestamp.
    pub fn reset(&mut self) {
        for l in &mut self.layers {
            l.clear();
        }
        for a in &mut self.last_appended {
            *a = None;
        }
        self.active = 1;
        self.last_accept_end = None;
    }

    /// Feeds one event: appends its timestamp to every active layer with a
    /// matching symbol, drops layer heads that fell out of the `tau`
    /// window, and reports whether the bottom layer now holds an entry.
    ///
    /// The active-layer cutoff is the value of `ell` before this event, so
    /// an event never chains with itself across repeated symbols. Tied
    /// timestamps from other records (complex batches, equal-time lines)
    /// are kept out of layers they could never chain in: occurrences need
    /// strictly increasing times, so a timestamp enters layer j >= 2 only
    /// under a strictly earlier entry of layer j-1.
    pub fn list_update(&mut self, event: Event) -> Result<ListUpdate, OccMapError> {
        let t = event.time;
        if let Some(last) = self.last_time {
            if t < last {
                return Err(OccMapError::OutOfOrder { last, got: t });
            }
        }
        self.last_time = Some(t);

        let k = self.k();
        let suppressed = self.mode == FrequencyKind::NonOverlapped
            && self.last_accept_end.is_some_and(|end| t <= end);
        let mut inserted = 0u32;
        if !suppressed {
            let cutoff = self.active.min(k);
            let mut trimmed = false;
            for j in 0..cutoff {
                if self.symbols[j] != event.symbol {
                    continue;
                }
                // No predecessor strictly below t means no occurrence can
                // ever route through this entry (later arrivals are >= t),
                // and in NonOverlapped mode it would stall the bottom-up
                // search by tying the layer minima.
                if j > 0 && !self.layers[j - 1].front().is_some_and(|&p| p < t) {
                    continue;
                }
                // Same (symbol, time) seen again (batch replay, tied
                // records) is the same instance: it enters a layer once,
                // even if elimination already consumed the first copy.
                if self.last_appended[j] == Some(t) {
                    continue;
                }
                self.last_appended[j] = Some(t);
                let layer = &mut self.layers[j];
                layer.push_back(t);
                inserted += 1;
                while t - *layer.front().unwrap() > self.tau {
                    layer.pop_front();
                    trimmed = true;
                }
            }
            if trimmed && self.mode == FrequencyKind::NonOverlapped {
                self.repair_monotonicity();
            }
            self.recompute_active();
        }
        Ok(ListUpdate {
            bottom_filled: !self.layers[k - 1].is_empty(),
            inserted,
        })
    }

    /// Restores strictly increasing layer minima after head trims
    /// (NonOverlapped mode). A leading entry of `L_i` with no strictly
    /// earlier entry left in `L_{i-1}` can never head a valid chain again:
    /// its predecessors were trimmed as tau-stale and future appends only
    /// carry later timestamps.
    pub fn repair_monotonicity(&mut self) {
        for i in 1..self.k() {
            let (head, tail) = self.layers.split_at_mut(i);
            let prev = &head[i - 1];
            let cur = &mut tail[0];
            while let Some(&f) = cur.front() {
                match prev.front() {
                    Some(&p) if f > p => break,
                    _ => {
                        cur.pop_front();
                    }
                }
            }
        }
        self.recompute_active();
    }

    /// Runs the validation pass matching this map's frequency mode.
    pub fn validate(&mut self) -> Result<Validation, OccMapError> {
        match self.mode {
            FrequencyKind::NonOverlapped => self.validate_eliminate(),
            FrequencyKind::Distinct => self.validate_eliminate_plus(),
        }
    }

    /// NonOverlapped validation: extracts the minimal candidate occurrence
    /// ending at the bottom entry (bottom-up, each position the latest
    /// entry strictly below its successor). Within `tau` the occurrence is
    /// accepted and all state cleared; otherwise every entry at or below
    /// its extracted position is eliminated.
    pub fn validate_eliminate(&mut self) -> Result<Validation, OccMapError> {
        let k = self.k();
        if self.layers[k - 1].is_empty() {
            return Err(OccMapError::EmptyBottom);
        }
        let mut picks = vec![0u64; k];
        picks[k - 1] = *self.layers[k - 1].front().unwrap();
        for i in (0..k - 1).rev() {
            picks[i] = largest_below(&self.layers[i], picks[i + 1])
                .expect("minimum-monotonicity guarantees a predecessor entry");
        }
        if picks[k - 1] - picks[0] <= self.tau {
            for l in &mut self.layers {
                l.clear();
            }
            self.active = 1;
            self.last_accept_end = Some(picks[k - 1]);
            return Ok(Validation::Accepted(Occurrence::from_sorted(picks)));
        }
        // Too wide: everything at or below the extracted chain is useless
        // for any later, necessarily wider, chain.
        for (i, layer) in self.layers.iter_mut().enumerate() {
            drop_through(layer, picks[i]);
        }
        // Restore strictly increasing minima; a layer whose predecessor
        // emptied is cleared outright.
        for i in 1..k - 1 {
            let (head, tail) = self.layers.split_at_mut(i);
            match head[i - 1].front() {
                Some(&p) => drop_through(&mut tail[0], p),
                None => tail[0].clear(),
            }
        }
        self.recompute_active();
        Ok(Validation::Rejected)
    }

    /// Distinct validation: extracts the leftmost candidate occurrence
    /// ending at the bottom entry (top-down, earliest feasible start, then
    /// each position the earliest entry strictly above its predecessor).
    /// On acceptance the consumed instances and everything at or below
    /// each pick are eliminated. When no start lies within `tau` of the
    /// anchor all state is dead and cleared; when a later position fails,
    /// only the anchor is dead and dropped.
    pub fn validate_eliminate_plus(&mut self) -> Result<Validation, OccMapError> {
        let k = self.k();
        if self.layers[k - 1].is_empty() {
            return Err(OccMapError::EmptyBottom);
        }
        let anchor = *self.layers[k - 1].front().unwrap();
        let earliest_feasible = anchor.saturating_sub(self.tau);
        let Some(start) = at_or_after(&self.layers[0], earliest_feasible) else {
            // The whole start layer is tau-stale for this and every later
            // anchor, so nothing stored can ever chain again.
            for l in &mut self.layers {
                l.clear();
            }
            self.active = 1;
            return Ok(Validation::Rejected);
        };
        let mut picks = vec![0u64; k];
        picks[0] = start;
        for i in 1..k {
            match smallest_above(&self.layers[i], picks[i - 1]) {
                Some(t) => picks[i] = t,
                None => {
                    // No chain can end at this anchor (the search is the
                    // most permissive one), and later anchors only shrink
                    // the window; the anchor alone is dead.
                    self.layers[k - 1].pop_front();
                    self.recompute_active();
                    return Ok(Validation::Rejected);
                }
            }
        }
        for (i, layer) in self.layers.iter_mut().enumerate() {
            drop_through(layer, picks[i]);
        }
        // A consumed instance is a (symbol, time) pair: copies of it in
        // other layers of the same symbol go too, while a tied time under
        // another symbol is a different instance and stays usable.
        for i in 0..k {
            let consumed: Vec<u64> = (0..k)
                .filter(|&p| self.symbols[p] == self.symbols[i])
                .map(|p| picks[p])
                .collect();
            self.layers[i].retain(|t| !consumed.contains(t));
        }
        // Entries stranded behind an empty layer can never complete a
        // chain: they would need a strictly earlier entry above, but all
        // future appends are at or after them.
        if let Some(first_empty) = self.layers.iter().position(|l| l.is_empty()) {
            for l in &mut self.layers[first_empty + 1..] {
                l.clear();
            }
        }
        self.recompute_active();
        Ok(Validation::Accepted(Occurrence::from_sorted(picks)))
    }

    /// Renders layer contents and the active index, one line per layer:
    /// `L<i>(<symbol>): t1 t2 ...` followed by `ell=<active>`.
    pub fn snapshot(&self, table: &SymbolTable) -> String {
        let mut out = String::new();
        for (i, layer) in self.layers.iter().enumerate() {
            out.push_str(&format!("L{}({}):", i + 1, table.name(self.symbols[i])));
            for t in layer {
                out.push_str(&format!(" {t}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("ell={}", self.active));
        out
    }

    /// Checks the structural invariants, returning a description of the
    /// first violation. Test support.
    #[doc(hidden)]
    pub fn verify_invariants(&self) -> Result<(), String> {
        let k = self.k();
        for (i, layer) in self.layers.iter().enumerate() {
            let v: Vec<u64> = layer.iter().copied().collect();
            if v.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("layer {} not strictly ascending: {v:?}", i + 1));
            }
            if let (Some(&f), Some(&b)) = (layer.front(), layer.back()) {
                if b - f > self.tau {
                    return Err(format!("layer {} spans {} > tau {}", i + 1, b - f, self.tau));
                }
            }
        }
        let first_empty = self.layers.iter().position(|l| l.is_empty());
        let expect_active = first_empty.map_or(k + 1, |i| i + 1);
        if self.active != expect_active {
            return Err(format!("active={} but first empty layer gives {expect_active}", self.active));
        }
        if let Some(fe) = first_empty {
            if self.layers[fe..].iter().any(|l| !l.is_empty()) {
                return Err("nonempty layer after an empty one".into());
            }
        }
        if self.mode == FrequencyKind::NonOverlapped {
            for i in 1..k {
                if let (Some(&a), Some(&b)) = (self.layers[i - 1].front(), self.layers[i].front()) {
                    if a >= b {
                        return Err(format!(
                            "layer minima not strictly increasing at {}..{}: {a} >= {b}",
                            i,
                            i + 1
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn recompute_active(&mut self) {
        self.active = self
            .layers
            .iter()
            .position(|l| l.is_empty())
            .map_or(self.k() + 1, |i| i + 1);
    }
}

/// Largest entry strictly below `x`, if any.
fn largest_below(layer: &VecDeque<u64>, x: u64) -> Option<u64> {
    let i = layer.partition_point(|&v| v < x);
    if i == 0 {
        None
    } else {
        Some(layer[i - 1])
    }
}

/// Smallest entry strictly above `x`, if any.
fn smallest_above(layer: &VecDeque<u64>, x: u64) -> Option<u64> {
    let i = layer.partition_point(|&v| v <= x);
    layer.get(i).copied()
}

/// Smallest entry at or above `x`, if any.
fn at_or_after(layer: &VecDeque<u64>, x: u64) -> Option<u64> {
    let i = layer.partition_point(|&v| v < x);
    layer.get(i).copied()
}

/// Removes every entry `<= x` from the front.
fn drop_through(layer: &mut VecDeque<u64>, x: u64) {
    while layer.front().is_some_and(|&f| f <= x) {
        layer.pop_front();
    }
}
