//! Threshold rules over episode counts, grouped by a partition key.
//!
//! A rules file holds one rule per line (blank lines and `#` comments are
//! skipped):
//!
//! ```text
//! <name>: <sym>,<sym>,... @tau=<n>[m|h] threshold=<n>[%] [of <population>] by <key> [mode=<kind>]
//! ```
//!
//! For example:
//!
//! ```text
//! storm: outage,outage,restore @tau=30m threshold=25% of districts by district mode=distinct
//! probe: scan,login @tau=90 threshold=3 by host
//! ```
//!
//! The symbols are base names; the rule is instantiated once per group with
//! every symbol rewritten to `<base>@<group>` (so streams tag events with
//! the group they belong to, e.g. `outage@d1`). Groups come from a
//! populations file when the rule says `of <population>`, in CSV form
//! `<population>,<group>,<count>`; otherwise groups can be added on the fly
//! as they appear in the stream. Percentage thresholds are resolved against
//! the group's population count, rounding up, and therefore require `of`.
//!
//! Durations without a suffix are engine ticks; `m` and `h` convert via a
//! ticks-per-minute factor chosen at bind time. Alerts latch: each rule
//! fires at most once per group, when the group's count first reaches its
//! threshold.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::engine::{CounterHandle, Engine};
use crate::model::{Episode, FrequencyKind, ModelError, SymbolTable};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("line {0}: expected '<name>: <symbols> @tau=...'")]
    MissingColon(u64),
    #[error("line {0}: empty rule name")]
    EmptyName(u64),
    #[error("line {0}: expected '@tau=' after the symbol list")]
    MissingTau(u64),
    #[error("line {0}: bad duration {1:?} (digits with an optional m or h suffix)")]
    BadDuration(u64, String),
    #[error("line {0}: time constraint must be positive")]
    ZeroTau(u64),
    #[error("line {0}: bad threshold {1:?}")]
    BadThreshold(u64, String),
    #[error("line {0}: threshold must be positive")]
    ZeroThreshold(u64),
    #[error("line {0}: percentage threshold needs 'of <population>'")]
    PercentWithoutPopulation(u64),
    #[error("line {0}: expected {2}, found {1:?}")]
    Unexpected(u64, String, &'static str),
    #[error("line {0}: {1}")]
    BadName(u64, ModelError),
    #[error("duplicate rule name {0:?}")]
    DuplicateRule(String),
    #[error("line {0}: expected '<population>,<group>,<count>'")]
    BadPopulationLine(u64),
    #[error("line {0}: bad count {1:?}")]
    BadCount(u64, String),
    #[error("population {0:?} is not defined")]
    UnknownPopulation(String),
    #[error("duration overflows the tick scale")]
    DurationOverflow,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Duration units accepted after `@tau=`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeUnit {
    Ticks,
    Minutes,
    Hours,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdSpec {
    Absolute(u64),
    Percent(u32),
}

/// One parsed (unbound) rule line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSpec {
    pub name: String,
    /// Base symbol names, composed per group at bind time.
    pub symbols: Vec<String>,
    pub tau_value: u64,
    pub tau_unit: TimeUnit,
    pub threshold: ThresholdSpec,
    /// Population the groups (and percentage thresholds) come from.
    pub population: Option<String>,
    /// The partition key; purely descriptive, it names what groups are.
    pub group_key: String,
    pub mode: FrequencyKind,
}

impl RuleSpec {
    /// Time constraint in engine ticks.
    pub fn tau_ticks(&self, ticks_per_minute: u64) -> Result<u64, RuleError> {
        let ticks = match self.tau_unit {
            TimeUnit::Ticks => Some(self.tau_value),
            TimeUnit::Minutes => self.tau_value.checked_mul(ticks_per_minute),
            TimeUnit::Hours => self
                .tau_value
                .checked_mul(ticks_per_minute)
                .and_then(|v| v.checked_mul(60)),
        };
        ticks.filter(|&t| t > 0).ok_or(RuleError::DurationOverflow)
    }
}

fn validate_base_name(line: u64, name: &str) -> Result<(), RuleError> {
    if name.is_empty() {
        return Err(RuleError::BadName(line, ModelError::EmptySymbolName));
    }
    if name.contains('@') {
        return Err(RuleError::BadName(
            line,
            ModelError::ReservedCharacter(name.to_owned()),
        ));
    }
    Ok(())
}

/// Joins a base symbol with its group: `outage` + `d1` -> `outage@d1`.
/// Rejects names that already contain the separator.
pub fn compose_symbol(base: &str, group: &str) -> Result<String, ModelError> {
    if base.is_empty() || group.is_empty() {
        return Err(ModelError::EmptySymbolName);
    }
    for part in [base, group] {
        if part.contains('@') {
            return Err(ModelError::ReservedCharacter(part.to_owned()));
        }
    }
    Ok(format!("{base}@{group}"))
}

fn parse_duration(line: u64, text: &str) -> Result<(u64, TimeUnit), RuleError> {
    let bad = || RuleError::BadDuration(line, text.to_owned());
    let (digits, unit) = match text.strip_suffix(['m', 'h']) {
        Some(digits) if text.ends_with('m') => (digits, TimeUnit::Minutes),
        Some(digits) => (digits, TimeUnit::Hours),
        None => (text, TimeUnit::Ticks),
    };
    if digits.is_empty() {
        return Err(bad());
    }
    let value: u64 = digits.parse().map_err(|_| bad())?;
    if value == 0 {
        return Err(RuleError::ZeroTau(line));
    }
    Ok((value, unit))
}

fn parse_threshold(line: u64, text: &str) -> Result<ThresholdSpec, RuleError> {
    let bad = || RuleError::BadThreshold(line, text.to_owned());
    let spec = match text.strip_suffix('%') {
        Some(digits) => ThresholdSpec::Percent(digits.parse().map_err(|_| bad())?),
        None => ThresholdSpec::Absolute(text.parse().map_err(|_| bad())?),
    };
    let zero = matches!(
        spec,
        ThresholdSpec::Absolute(0) | ThresholdSpec::Percent(0)
    );
    if zero {
        return Err(RuleError::ZeroThreshold(line));
    }
    Ok(spec)
}

/// Parses one rule line (one-based `line` is used in errors).
pub fn parse_rule(line: u64, text: &str) -> Result<RuleSpec, RuleError> {
    let (name, rest) = text.split_once(':').ok_or(RuleError::MissingColon(line))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(RuleError::EmptyName(line));
    }
    let (symbol_text, tail) = rest.rsplit_once("@tau=").ok_or(RuleError::MissingTau(line))?;
    let mut symbols = Vec::new();
    for part in symbol_text.split(',') {
        let base = part.trim();
        validate_base_name(line, base)?;
        symbols.push(base.to_owned());
    }

    let tokens: Vec<&str> = tail.split_whitespace().collect();
    let mut pos = 0;
    let mut next = |expected: &'static str| -> Result<&str, RuleError> {
        let tok = tokens.get(pos).copied().ok_or_else(|| {
            RuleError::Unexpected(line, "end of line".to_owned(), expected)
        })?;
        pos += 1;
        Ok(tok)
    };

    let (tau_value, tau_unit) = parse_duration(line, next("a duration")?)?;
    let threshold_tok = next("threshold=<n>")?;
    let threshold_text = threshold_tok
        .strip_prefix("threshold=")
        .ok_or_else(|| RuleError::Unexpected(line, threshold_tok.to_owned(), "threshold=<n>"))?;
    let threshold = parse_threshold(line, threshold_text)?;

    let mut population = None;
    let mut tok = next("'by <key>'")?;
    if tok == "of" {
        population = Some(next("a population name")?.to_owned());
        tok = next("'by <key>'")?;
    }
    if tok != "by" {
        return Err(RuleError::Unexpected(line, tok.to_owned(), "'by <key>'"));
    }
    let group_key = next("a group key")?.to_owned();

    let mut mode = FrequencyKind::NonOverlapped;
    if let Some(&tok) = tokens.get(pos) {
        pos += 1;
        let text = tok
            .strip_prefix("mode=")
            .ok_or_else(|| RuleError::Unexpected(line, tok.to_owned(), "mode=<kind> or end of line"))?;
        mode = text
            .parse()
            .map_err(|_| RuleError::Unexpected(line, tok.to_owned(), "mode=nonoverlapped or mode=distinct"))?;
    }
    if let Some(&extra) = tokens.get(pos) {
        return Err(RuleError::Unexpected(line, extra.to_owned(), "end of line"));
    }

    if matches!(threshold, ThresholdSpec::Percent(_)) && population.is_none() {
        return Err(RuleError::PercentWithoutPopulation(line));
    }

    Ok(RuleSpec {
        name: name.to_owned(),
        symbols,
        tau_value,
        tau_unit,
        threshold,
        population,
        group_key,
        mode,
    })
}

/// Parses a whole rules file, rejecting duplicate rule names.
pub fn load_rules(text: &str) -> Result<Vec<RuleSpec>, RuleError> {
    let mut rules = Vec::new();
    let mut names = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let spec = parse_rule(idx as u64 + 1, line)?;
        if !names.insert(spec.name.clone()) {
            return Err(RuleError::DuplicateRule(spec.name));
        }
        rules.push(spec);
    }
    Ok(rules)
}

/// Named group lists with population counts, loaded from CSV lines of
/// `<population>,<group>,<count>`.
#[derive(Debug, Clone, Default)]
pub struct Populations {
    groups: HashMap<String, Vec<(String, u64)>>,
}

impl Populations {
    pub fn load(text: &str) -> Result<Self, RuleError> {
        let mut groups: HashMap<String, Vec<(String, u64)>> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let no = idx as u64 + 1;
            let mut parts = line.splitn(3, ',');
            let (pop, group, count) = match (parts.next(), parts.next(), parts.next()) {
                (Some(p), Some(g), Some(c)) => (p.trim(), g.trim(), c.trim()),
                _ => return Err(RuleError::BadPopulationLine(no)),
            };
            if pop.is_empty() || group.is_empty() {
                return Err(RuleError::BadPopulationLine(no));
            }
            let count: u64 = count
                .parse()
                .map_err(|_| RuleError::BadCount(no, count.to_owned()))?;
            groups.entry(pop.to_owned()).or_default().push((group.to_owned(), count));
        }
        Ok(Populations { groups })
    }

    pub fn get(&self, name: &str) -> Option<&[(String, u64)]> {
        self.groups.get(name).map(Vec::as_slice)
    }
}

fn resolve_threshold(spec: ThresholdSpec, population: u64) -> u64 {
    match spec {
        ThresholdSpec::Absolute(v) => v,
        // Round up: "25% of 49" means 13 hits.
        ThresholdSpec::Percent(p) => (u64::from(p) * population).div_ceil(100),
    }
}

/// One group instance of a rule: its counter plus the latch state.
#[derive(Debug, Clone)]
pub struct BoundGroup {
    pub group: String,
    pub threshold: u64,
    pub handle: CounterHandle,
    pub fired: bool,
}

/// A rule bound to an engine: one counter per group.
#[derive(Debug, Clone)]
pub struct BoundRule {
    pub spec: RuleSpec,
    pub tau_ticks: u64,
    pub groups: Vec<BoundGroup>,
}

/// A fired threshold crossing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alert {
    pub rule: String,
    pub group: String,
    pub count: u64,
    pub time: u64,
}

impl fmt::Display for Alert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ALERT {} {} count={} t={}",
            self.rule, self.group, self.count, self.time
        )
    }
}

/// All bound rules plus the handle-to-group index the alert path uses.
#[derive(Debug, Default)]
pub struct RuleBook {
    rules: Vec<BoundRule>,
    by_handle: HashMap<CounterHandle, (usize, usize)>,
}

/// Registers one counter per rule and group on `engine`. Rules with a
/// population get their groups now; the rest start empty and grow through
/// [`RuleBook::ensure_group`] as groups show up in the stream.
pub fn bind_rules(
    specs: &[RuleSpec],
    populations: &Populations,
    ticks_per_minute: u64,
    table: &mut SymbolTable,
    engine: &mut Engine,
) -> Result<RuleBook, RuleError> {
    let mut book = RuleBook::default();
    for spec in specs {
        let tau_ticks = spec.tau_ticks(ticks_per_minute)?;
        let mut rule = BoundRule { spec: spec.clone(), tau_ticks, groups: Vec::new() };
        if let Some(pop_name) = &spec.population {
            let members = populations
                .get(pop_name)
                .ok_or_else(|| RuleError::UnknownPopulation(pop_name.clone()))?;
            let rule_idx = book.rules.len();
            for (group, count) in members {
                let bound = register_group(&rule, group, *count, table, engine)?;
                book.by_handle.insert(bound.handle, (rule_idx, rule.groups.len()));
                rule.groups.push(bound);
            }
        }
        book.rules.push(rule);
    }
    Ok(book)
}

fn register_group(
    rule: &BoundRule,
    group: &str,
    population: u64,
    table: &mut SymbolTable,
    engine: &mut Engine,
) -> Result<BoundGroup, RuleError> {
    let mut symbols = Vec::with_capacity(rule.spec.symbols.len());
    for base in &rule.spec.symbols {
        let name = compose_symbol(base, group)?;
        symbols.push(table.intern(&name)?);
    }
    let episode = Episode::new(symbols, rule.tau_ticks)?;
    let handle = engine.register(episode, rule.spec.mode);
    Ok(BoundGroup {
        group: group.to_owned(),
        threshold: resolve_threshold(rule.spec.threshold, population),
        handle,
        fired: false,
    })
}

impl RuleBook {
    pub fn rules(&self) -> &[BoundRule] {
        &self.rules
    }

    /// Adds `group` to rule `rule_idx` if the rule discovers groups
    /// dynamically and the group is new. Returns whether a counter was
    /// registered. Population-backed rules never change.
    pub fn ensure_group(
        &mut self,
        rule_idx: usize,
        group: &str,
        table: &mut SymbolTable,
        engine: &mut Engine,
    ) -> Result<bool, RuleError> {
        let rule = &self.rules[rule_idx];
        if rule.spec.population.is_some() || rule.groups.iter().any(|g| g.group == group) {
            return Ok(false);
        }
        let bound = register_group(rule, group, 0, table, engine)?;
        self.by_handle.insert(bound.handle, (rule_idx, rule.groups.len()));
        self.rules[rule_idx].groups.push(bound);
        Ok(true)
    }

    /// Records an emission on `handle` with the counter's updated `count`.
    /// Returns the alert the first time a group reaches its threshold.
    pub fn on_emission(&mut self, handle: CounterHandle, count: u64, time: u64) -> Option<Alert> {
        let &(rule_idx, group_idx) = self.by_handle.get(&handle)?;
        let rule = &mut self.rules[rule_idx];
        let group = &mut rule.groups[group_idx];
        if group.fired || count < group.threshold {
            return None;
        }
        group.fired = true;
        Some(Alert {
            rule: rule.spec.name.clone(),
            group: group.group.clone(),
            count,
            time,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Event;

    #[test]
    fn parses_a_full_rule_line() {
        let spec = parse_rule(
            1,
            "storm: outage,outage,restore @tau=30m threshold=25% of districts by district mode=distinct",
        )
        .unwrap();
        assert_eq!(spec.name, "storm");
        assert_eq!(spec.symbols, vec!["outage", "outage", "restore"]);
        assert_eq!((spec.tau_value, spec.tau_unit), (30, TimeUnit::Minutes));
        assert_eq!(spec.threshold, ThresholdSpec::Percent(25));
        assert_eq!(spec.population.as_deref(), Some("districts"));
        assert_eq!(spec.group_key, "district");
        assert_eq!(spec.mode, FrequencyKind::Distinct);
    }

    #[test]
    fn defaults_fill_in_for_short_rules() {
        let spec = parse_rule(1, "probe: scan,login @tau=90 threshold=3 by host").unwrap();
        assert_eq!((spec.tau_value, spec.tau_unit), (90, TimeUnit::Ticks));
        assert_eq!(spec.threshold, ThresholdSpec::Absolute(3));
        assert_eq!(spec.population, None);
        assert_eq!(spec.mode, FrequencyKind::NonOverlapped);
    }

    #[test]
    fn symbol_names_may_contain_spaces() {
        let spec =
            parse_rule(1, "door: door open,alarm raised @tau=2h threshold=1 by site").unwrap();
        assert_eq!(spec.symbols, vec!["door open", "alarm raised"]);
        assert_eq!(spec.tau_unit, TimeUnit::Hours);
    }

    #[test]
    fn rejects_malformed_rules() {
        assert_eq!(parse_rule(4, "no colon here").unwrap_err(), RuleError::MissingColon(4));
        assert_eq!(parse_rule(1, ": a @tau=5 threshold=1 by k").unwrap_err(), RuleError::EmptyName(1));
        assert_eq!(parse_rule(2, "r: a,b threshold=1 by k").unwrap_err(), RuleError::MissingTau(2));
        assert_eq!(
            parse_rule(1, "r: a @tau=5x threshold=1 by k").unwrap_err(),
            RuleError::BadDuration(1, "5x".into())
        );
        assert_eq!(parse_rule(1, "r: a @tau=0 threshold=1 by k").unwrap_err(), RuleError::ZeroTau(1));
        assert_eq!(
            parse_rule(1, "r: a @tau=5 threshold=0 by k").unwrap_err(),
            RuleError::ZeroThreshold(1)
        );
        assert_eq!(
            parse_rule(3, "r: a @tau=5 threshold=10% by k").unwrap_err(),
            RuleError::PercentWithoutPopulation(3)
        );
        assert_eq!(
            parse_rule(1, "r: a @tau=5 threshold=1 by k extra").unwrap_err(),
            RuleError::Unexpected(1, "extra".into(), "mode=<kind> or end of line")
        );
        assert_eq!(
            parse_rule(1, "r: a@x @tau=5 threshold=1 by k").unwrap_err(),
            RuleError::BadName(1, ModelError::ReservedCharacter("a@x".into()))
        );
        assert_eq!(
            parse_rule(1, "r: a @tau=5 threshold=1 of p").unwrap_err(),
            RuleError::Unexpected(1, "end of line".into(), "'by <key>'")
        );
    }

    #[test]
    fn load_rules_skips_comments_and_rejects_duplicates() {
        let rules = load_rules("# two rules\n\nr1: a @tau=5 threshold=1 by k\nr2: b @tau=5 threshold=2 by k\n").unwrap();
        assert_eq!(rules.len(), 2);
        let err = load_rules("r1: a @tau=5 threshold=1 by k\nr1: b @tau=5 threshold=1 by k\n")
            .unwrap_err();
        assert_eq!(err, RuleError::DuplicateRule("r1".into()));
    }

    #[test]
    fn populations_load_and_lookup() {
        let pops = Populations::load("# city\ndistricts,d1,120\ndistricts,d2,80\nsites,lab,5\n")
            .unwrap();
        assert_eq!(
            pops.get("districts").unwrap(),
            &[("d1".to_owned(), 120), ("d2".to_owned(), 80)]
        );
        assert_eq!(pops.get("sites").unwrap().len(), 1);
        assert!(pops.get("missing").is_none());

        assert_eq!(
            Populations::load("districts,d1\n").unwrap_err(),
            RuleError::BadPopulationLine(1)
        );
        assert_eq!(
            Populations::load("districts,d1,many\n").unwrap_err(),
            RuleError::BadCount(1, "many".into())
        );
    }

    #[test]
    fn thresholds_resolve_with_ceiling_percentages() {
        assert_eq!(resolve_threshold(ThresholdSpec::Absolute(7), 1000), 7);
        assert_eq!(resolve_threshold(ThresholdSpec::Percent(25), 48), 12);
        assert_eq!(resolve_threshold(ThresholdSpec::Percent(25), 49), 13);
        assert_eq!(resolve_threshold(ThresholdSpec::Percent(100), 3), 3);
        assert_eq!(resolve_threshold(ThresholdSpec::Percent(150), 2), 3);
    }

    #[test]
    fn tick_conversion_scales_and_checks_overflow() {
        let spec = parse_rule(1, "r: a @tau=5m threshold=1 by k").unwrap();
        assert_eq!(spec.tau_ticks(60).unwrap(), 300);
        let spec = parse_rule(1, "r: a @tau=2h threshold=1 by k").unwrap();
        assert_eq!(spec.tau_ticks(60).unwrap(), 7200);
        let spec = parse_rule(1, "r: a @tau=9000000000000000000h threshold=1 by k").unwrap();
        assert_eq!(spec.tau_ticks(60), Err(RuleError::DurationOverflow));
    }

    #[test]
    fn compose_keeps_the_separator_reserved() {
        assert_eq!(compose_symbol("outage", "d1").unwrap(), "outage@d1");
        assert!(matches!(
            compose_symbol("out@age", "d1"),
            Err(ModelError::ReservedCharacter(_))
        ));
        assert!(matches!(
            compose_symbol("outage", "d@1"),
            Err(ModelError::ReservedCharacter(_))
        ));
        assert_eq!(compose_symbol("", "d1"), Err(ModelError::EmptySymbolName));
    }

    fn feed(engine: &mut Engine, table: &mut SymbolTable, book: &mut RuleBook, name: &str, t: u64) -> Vec<Alert> {
        let sym = table.intern(name).unwrap();
        let mut alerts = Vec::new();
        for (handle, _) in engine.process_event(Event::new(sym, t)).unwrap() {
            let count = engine.frequency(handle).unwrap();
            alerts.extend(book.on_emission(handle, count, t));
        }
        alerts
    }

    #[test]
    fn bound_rules_latch_one_alert_per_group() {
        let specs = load_rules("surge: spike,spike @tau=10 threshold=2% of feeders by feeder\n")
            .unwrap();
        let pops = Populations::load("feeders,f1,100\nfeeders,f2,100\n").unwrap();
        let mut table = SymbolTable::new();
        let mut engine = Engine::new();
        let mut book = bind_rules(&specs, &pops, 60, &mut table, &mut engine).unwrap();
        assert_eq!(book.rules()[0].groups.len(), 2);
        assert_eq!(book.rules()[0].groups[0].threshold, 2);

        // Two spikes complete one occurrence; the second occurrence trips
        // the latch on f1 only.
        assert!(feed(&mut engine, &mut table, &mut book, "spike@f1", 1).is_empty());
        assert!(feed(&mut engine, &mut table, &mut book, "spike@f1", 2).is_empty());
        assert!(feed(&mut engine, &mut table, &mut book, "spike@f2", 3).is_empty());
        assert!(feed(&mut engine, &mut table, &mut book, "spike@f1", 4).is_empty());
        let alerts = feed(&mut engine, &mut table, &mut book, "spike@f1", 5);
        assert_eq!(
            alerts,
            vec![Alert { rule: "surge".into(), group: "f1".into(), count: 2, time: 5 }]
        );
        assert_eq!(alerts[0].to_string(), "ALERT surge f1 count=2 t=5");

        // Latched: further hits stay quiet.
        assert!(feed(&mut engine, &mut table, &mut book, "spike@f1", 6).is_empty());
        assert!(feed(&mut engine, &mut table, &mut book, "spike@f1", 7).is_empty());
    }

    #[test]
    fn dynamic_rules_grow_groups_on_demand() {
        let specs = load_rules("probe: scan,login @tau=5 threshold=1 by host\n").unwrap();
        let mut table = SymbolTable::new();
        let mut engine = Engine::new();
        let mut book =
            bind_rules(&specs, &Populations::default(), 60, &mut table, &mut engine).unwrap();
        assert!(book.rules()[0].groups.is_empty());

        assert!(book.ensure_group(0, "web01", &mut table, &mut engine).unwrap());
        assert!(!book.ensure_group(0, "web01", &mut table, &mut engine).unwrap());
        assert_eq!(book.rules()[0].groups.len(), 1);

        assert!(feed(&mut engine, &mut table, &mut book, "scan@web01", 1).is_empty());
        let alerts = feed(&mut engine, &mut table, &mut book, "login@web01", 2);
        assert_eq!(alerts.len(), 1);
        assert_eq!(alerts[0].to_string(), "ALERT probe web01 count=1 t=2");
    }

    #[test]
    fn population_backed_rules_reject_unknown_populations() {
        let specs = load_rules("r: a @tau=5 threshold=10% of ghosts by g\n").unwrap();
        let mut table = SymbolTable::new();
        let mut engine = Engine::new();
        let err = bind_rules(&specs, &Populations::default(), 60, &mut table, &mut engine)
            .unwrap_err();
        assert_eq!(err, RuleError::UnknownPopulation("ghosts".into()));
    }
}
