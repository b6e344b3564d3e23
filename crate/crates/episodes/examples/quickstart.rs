//! The README's library example: register an episode, feed events, react
//! to accepted occurrences, and read the final count.

use episodes::model::{Episode, Event, FrequencyKind, SymbolTable};
use episodes::Engine;

fn main() {
    let mut table = SymbolTable::new();
    let episode = Episode::parse("A,A,B@tau=3", &mut table).unwrap();
    let a = table.lookup("A").unwrap();
    let b = table.lookup("B").unwrap();

    let mut engine = Engine::new();
    let h = engine.register(episode, FrequencyKind::NonOverlapped);
    for (sym, t) in [(a, 1), (a, 2), (b, 3)] {
        for (_, occurrence) in engine.process_event(Event::new(sym, t)).unwrap() {
            println!("accepted {:?}", occurrence.times());
        }
    }
    assert_eq!(engine.frequency(h).unwrap(), 1);
}
