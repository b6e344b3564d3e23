//! Subcommand implementations.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use episodes::engine::ShardedEngine;
use episodes::model::{Episode, FrequencyKind, Symbol, SymbolTable};
use episodes::oracle::{run_conformance, ConformanceConfig};
use episodes::rules::{bind_rules, load_rules, Populations};
use episodes::streamio::{generate_uniform, parse_record, read_stream, StreamRecord, UniformSpec};
use episodes::Engine;

use crate::args::{
    BenchArgs, BenchSuite, Cli, Command, CountArgs, GenArgs, MonitorArgs, OracleCheckArgs,
};
use crate::bench;

/// Failures after argument parsing: bad input (exit 2) or a failed
/// conformance run (exit 3).
#[derive(Debug)]
pub enum CmdError {
    Input(String),
    Conformance(usize),
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Input(msg) => f.write_str(msg),
            CmdError::Conformance(n) => write!(f, "conformance check failed: {n} disagreement(s)"),
        }
    }
}

impl std::error::Error for CmdError {}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Input(_) => 2,
            CmdError::Conformance(_) => 3,
        }
    }
}

fn input(err: impl std::fmt::Display) -> CmdError {
    CmdError::Input(err.to_string())
}

fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>, CmdError> {
    match path {
        None => Ok(Box::new(io::stdin().lock())),
        Some(p) if p == Path::new("-") => Ok(Box::new(io::stdin().lock())),
        Some(p) => {
            let file = File::open(p).map_err(|e| input(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufReader::new(file)))
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CmdError> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) => {
            let file = File::create(p).map_err(|e| input(format!("{}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Count(args) => cmd_count(&args),
        Command::Gen(args) => cmd_gen(&args),
        Command::OracleCheck(args) => cmd_oracle_check(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Monitor(args) => cmd_monitor(&args),
    }
}

fn parse_episodes(
    texts: &[String],
    table: &mut SymbolTable,
) -> Result<(Vec<Episode>, Vec<String>), CmdError> {
    let mut episodes = Vec::with_capacity(texts.len());
    let mut names = Vec::with_capacity(texts.len());
    for text in texts {
        let episode = Episode::parse(text, table).map_err(input)?;
        names.push(episode.display_with(table));
        episodes.push(episode);
    }
    Ok((episodes, names))
}

fn cmd_count(args: &CountArgs) -> Result<(), CmdError> {
    let mut table = SymbolTable::new();
    let (episodes, names) = parse_episodes(&args.episodes, &mut table)?;
    let kind: FrequencyKind = args.mode.into();
    let stdout = io::stdout();

    if args.shards > 1 {
        if args.emit {
            return Err(input("--emit needs --shards 1; sharded runs only report final counts"));
        }
        let specs: Vec<(Episode, FrequencyKind)> =
            episodes.iter().map(|e| (e.clone(), kind)).collect();
        let mut engine = ShardedEngine::new(specs, args.shards);
        let reader = open_input(args.input.as_deref())?;
        for record in read_stream(reader, &mut table) {
            match record.map_err(input)? {
                StreamRecord::Event(ev) => engine.process_event(ev).map_err(input)?,
                StreamRecord::Batch(batch) => engine.process_batch(&batch).map_err(input)?,
            }
        }
        let (freqs, metrics) = engine.finish();
        let mut out = stdout.lock();
        for (name, freq) in names.iter().zip(&freqs) {
            writeln!(out, "{name} {kind} {freq}").map_err(input)?;
        }
        if args.metrics {
            writeln!(out, "# events={} matches={}", metrics.events_processed, metrics.matches)
                .map_err(input)?;
        }
        return Ok(());
    }

    let mut engine = Engine::new();
    let handles: Vec<_> =
        episodes.iter().map(|e| engine.register(e.clone(), kind)).collect();
    let reader = open_input(args.input.as_deref())?;
    let mut out = stdout.lock();
    for record in read_stream(reader, &mut table) {
        let emissions = match record.map_err(input)? {
            StreamRecord::Event(ev) => engine.process_event(ev).map_err(input)?,
            StreamRecord::Batch(batch) => engine.process_batch(&batch).map_err(input)?,
        };
        if args.emit {
            for (handle, occ) in emissions {
                writeln!(out, "{} -> {}", names[handle.index()], occ).map_err(input)?;
            }
        }
    }
    for (name, &handle) in names.iter().zip(&handles) {
        let freq = engine.frequency(handle).expect("handle is live");
        writeln!(out, "{name} {kind} {freq}").map_err(input)?;
    }
    if args.metrics {
        let metrics = engine.metrics();
        writeln!(out, "# events={} matches={}", metrics.events_processed, metrics.matches)
            .map_err(input)?;
        for (name, &handle) in names.iter().zip(&handles) {
            writeln!(out, "# entries[{name}]={}", metrics.per_counter_entries[&handle])
                .map_err(input)?;
        }
    }
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<(), CmdError> {
    if args.alphabet == 0 {
        return Err(input("--alphabet must be at least 1"));
    }
    if args.tick == 0 {
        return Err(input("--tick must be at least 1"));
    }
    let spec = UniformSpec {
        events: args.events,
        alphabet: args.alphabet,
        tick: args.tick,
        seed: args.seed,
    };
    let mut table = SymbolTable::new();
    let mut out = open_output(args.output.as_deref())?;
    writeln!(
        out,
        "# uniform stream: events={} alphabet={} tick={} seed={}",
        args.events, args.alphabet, args.tick, args.seed
    )
    .map_err(input)?;
    for ev in generate_uniform(&spec, &mut table) {
        writeln!(out, "{},{}", ev.time, table.name(ev.symbol)).map_err(input)?;
    }
    out.flush().map_err(input)
}

fn cmd_oracle_check(args: &OracleCheckArgs) -> Result<(), CmdError> {
    let config = ConformanceConfig {
        trials: args.trials,
        max_events: args.max_events,
        max_k: args.max_k,
        max_sigma: args.max_sigma,
        max_tau: args.max_tau,
        seed: args.seed,
    };
    let outcome = run_conformance(&config);
    let mut out = io::stdout().lock();
    for failure in &outcome.failures {
        writeln!(out, "{failure}").map_err(input)?;
    }
    writeln!(
        out,
        "trials={} failures={} distinct-bound-checked={} greedy-gaps={} skipped={}",
        outcome.trials,
        outcome.failures.len(),
        outcome.distinct_bound_checked,
        outcome.distinct_gaps,
        outcome.skipped_large
    )
    .map_err(input)?;
    if outcome.is_clean() {
        Ok(())
    } else {
        Err(CmdError::Conformance(outcome.failures.len()))
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CmdError> {
    let mut rows = Vec::new();
    let n = args.events.max(10_000);
    if matches!(args.suite, BenchSuite::N | BenchSuite::All) {
        let ns: Vec<u64> = (1..=4).map(|i| i * n / 4).collect();
        rows.extend(bench::run_n_sweep(&ns, 1_000, args.seed, args.repeats));
    }
    if matches!(args.suite, BenchSuite::Tau | BenchSuite::All) {
        rows.extend(bench::run_tau_sweep(&[10, 100, 1_000, 10_000], n, args.seed, args.repeats));
    }
    if matches!(args.suite, BenchSuite::K | BenchSuite::All) {
        rows.extend(bench::run_k_sweep(&[3, 5, 7, 9, 11], n.min(100_000), 200, 101));
    }
    if matches!(args.suite, BenchSuite::Throughput | BenchSuite::All) {
        let mut table = SymbolTable::new();
        let episode = bench::chain_episode(5, 1_000, &mut table);
        let events = bench::uniform_stream(n, 5, args.seed, &mut table);
        let m = bench::measure_counter(
            &episode,
            FrequencyKind::NonOverlapped,
            &events,
            args.repeats,
            false,
        );
        rows.push(bench::BenchRow { suite: "throughput", label: "k=5".into(), measurement: m });
    }

    let mut out = io::stdout().lock();
    bench::write_table(&mut out, &rows).map_err(input)?;
    if let Some(path) = &args.csv {
        let file = File::create(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        bench::write_csv(&mut w, &rows).map_err(input)?;
        w.flush().map_err(input)?;
    }
    Ok(())
}

fn cmd_monitor(args: &MonitorArgs) -> Result<(), CmdError> {
    let rules_text = std::fs::read_to_string(&args.rules)
        .map_err(|e| input(format!("{}: {e}", args.rules.display())))?;
    let specs = load_rules(&rules_text).map_err(input)?;
    let populations = match &args.populations {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| input(format!("{}: {e}", path.display())))?;
            Populations::load(&text).map_err(input)?
        }
        None => Populations::default(),
    };
    if args.ticks_per_minute == 0 {
        return Err(input("--ticks-per-minute must be at least 1"));
    }

    let mut table = SymbolTable::new();
    let mut engine = Engine::new();
    let mut book = bind_rules(&specs, &populations, args.ticks_per_minute, &mut table, &mut engine)
        .map_err(input)?;

    // Rules without a population discover their groups from the stream, so
    // the reader loop stays line-by-line: each record may register new
    // counters before the engine sees it.
    let dynamic: Vec<usize> = book
        .rules()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.spec.population.is_none())
        .map(|(i, _)| i)
        .collect();

    let reader = open_input(args.input.as_deref())?;
    let mut out = io::stdout().lock();
    let mut line_no = 0u64;
    let mut last_time: Option<u64> = None;
    for line in reader.lines() {
        let line = line.map_err(input)?;
        line_no += 1;
        let record = parse_record(&line, &mut table)
            .map_err(|e| input(format!("line {line_no}: {e}")))?;
        let Some(record) = record else { continue };
        let t = record.time();
        if let Some(prev) = last_time {
            if t < prev {
                return Err(input(format!(
                    "line {line_no}: timestamp {t} is behind the previous timestamp {prev}"
                )));
            }
        }
        last_time = Some(t);

        if !dynamic.is_empty() {
            let symbols: Vec<Symbol> = match &record {
                StreamRecord::Event(ev) => vec![ev.symbol],
                StreamRecord::Batch(batch) => batch.symbols().to_vec(),
            };
            for sym in symbols {
                let name = table.name(sym).to_owned();
                let Some((base, group)) = name.split_once('@') else { continue };
                for &idx in &dynamic {
                    if book.rules()[idx].spec.symbols.iter().any(|s| s == base) {
                        book.ensure_group(idx, group, &mut table, &mut engine).map_err(input)?;
                    }
                }
            }
        }

        let emissions = match &record {
            StreamRecord::Event(ev) => engine.process_event(*ev).map_err(input)?,
            StreamRecord::Batch(batch) => engine.process_batch(batch).map_err(input)?,
        };
        for (handle, _) in emissions {
            let count = engine.frequency(handle).expect("handle is live");
            if let Some(alert) = book.on_emission(handle, count, t) {
                writeln!(out, "{alert}").map_err(input)?;
            }
        }
    }

    writeln!(out, "--").map_err(input)?;
    for rule in book.rules() {
        for group in &rule.groups {
            let count = engine.frequency(group.handle).expect("handle is live");
            writeln!(
                out,
                "{} {} count={} threshold={}{}",
                rule.spec.name,
                group.group,
                count,
                group.threshold,
                if group.fired { " FIRED" } else { "" }
            )
            .map_err(input)?;
        }
    }
    Ok(())
}
