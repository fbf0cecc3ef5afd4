//! scrawl — a guided, security-aware crawler and staged taint-inference
//! engine for web applications written in GSL, a deterministic
//! JavaScript-like subset executed by a built-in simulated browser.
//!
//! The library is the primary interface; see the `examples/` directory for
//! one runnable program per capability. A thin `scrawl` binary exposes the
//! same functionality as `crawl` and `compare` subcommands.
//!
//! Module map:
//! - [`gsl`] — lexer, parser, AST and printer for the script subset
//! - [`bundle`] — app-bundle loading and static link extraction
//! - [`runtime`] — the simulated browser: DOM, interpreter, events, traces
//! - [`callgraph`] — pessimistic approximate call graphs, refinement from
//!   traces, and distance-to-target queries
//! - [`taint`] — the four-stage taint-flow inference pipeline
//! - [`inputgen`] — constraint harvesting and URL rewriting to bypass guards
//! - [`crawler`] — the state-aware, feedback-driven crawl loop
//! - [`analysis`] — target analyses (DOM-XSS, AJAX discovery) and reports
//! - [`cli`] — the command-line front end used by the `scrawl` binary

pub mod bundle;
pub mod gsl;
pub mod taint;
pub mod trace;
pub mod weburl;
