//! Browser playground for the episode counting engine.
//!
//! The logic lives in [`ops`] and is exercised by plain host tests; this
//! crate's wasm-bindgen surface is a thin shim that maps each operation's
//! `Result<String, String>` (JSON out, message out) onto a JS promise-style
//! `string`/exception pair. Build the browser bundle with:
//!
//! ```text
//! wasm-pack build crates/episodes-demo --target web --out-dir www/pkg
//! ```
//!
//! then serve `crates/episodes-demo/www/` from any static file server.

pub mod ops;

#[cfg(target_arch = "wasm32")]
mod wasm {
    use wasm_bindgen::prelude::*;

    /// Per-record walk of one counter: layer states, emissions, running
    /// count. JSON shape: see `ops::TraceResult`.
    #[wasm_bindgen]
    pub fn trace(episode: &str, mode: &str, stream: &str) -> Result<String, JsError> {
        crate::ops::trace_json(episode, mode, stream).map_err(|e| JsError::new(&e))
    }

    /// Both counting policies over one stream. JSON shape: see
    /// `ops::CompareResult`.
    #[wasm_bindgen(js_name = compareModes)]
    pub fn compare_modes(episode: &str, stream: &str) -> Result<String, JsError> {
        crate::ops::compare_json(episode, stream).map_err(|e| JsError::new(&e))
    }

    /// Frequency at a ladder of window sizes, both policies. JSON shape:
    /// see `ops::SweepResult`.
    #[wasm_bindgen(js_name = tauSweep)]
    pub fn tau_sweep(symbols: &str, stream: &str, tau_max: u32) -> Result<String, JsError> {
        crate::ops::tau_sweep_json(symbols, stream, u64::from(tau_max)).map_err(|e| JsError::new(&e))
    }
}
