//! Execution trace records. The runtime emits one [`TraceEvent`] per observed
//! operation; the taint stages, call-graph refinement and input generator all
//! consume these rather than instrumenting values directly.
//!
//! With `--trace-log` the CLI writes every event as one JSON object per line;
//! the schema ships as `schemas/trace-event.schema.json`.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::gsl::{ScriptId, SourceLoc};

/// Identity of a callable: a script's top-level code or a function definition
/// (keyed by its definition site).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FnRef {
    Script(ScriptId),
    Func(SourceLoc),
}

impl std::fmt::Display for FnRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FnRef::Script(id) => write!(f, "script:{id}"),
            FnRef::Func(loc) => write!(f, "fn:{loc}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum SourceKind {
    UrlHref,
    UrlHash,
    UrlSearch,
    Cookie,
    Storage { key: String },
    InputValue { element_id: String },
}

impl SourceKind {
    /// Sources whose value comes straight from the URL.
    pub fn is_url(&self) -> bool {
        matches!(
            self,
            SourceKind::UrlHref | SourceKind::UrlHash | SourceKind::UrlSearch
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SinkKind {
    DocumentWrite,
    InnerHtml,
    FetchUrl,
}

/// One observed string manipulation: `base.op(args) == result`. The `+`
/// operator records as op `concat` with the right operand as the argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StringOpRecord {
    pub op: String,
    pub base: String,
    pub args: Vec<String>,
    pub result: String,
    pub loc: SourceLoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum TraceEvent {
    Call {
        /// `None` for root invocations: page-load script execution and
        /// event-handler firings.
        caller: Option<FnRef>,
        callee: FnRef,
        site: SourceLoc,
    },
    StringOp(StringOpRecord),
    Branch {
        loc: SourceLoc,
        left: String,
        right: String,
        op: String,
        outcome: bool,
    },
    SourceRead {
        loc: SourceLoc,
        source_kind: SourceKind,
        value: String,
    },
    SinkWrite {
        loc: SourceLoc,
        sink_kind: SinkKind,
        value: String,
    },
    NetRequest {
        method: String,
        url: String,
        loc: SourceLoc,
    },
    HandlerFired {
        event_type: String,
        element_path: Vec<usize>,
        handler: FnRef,
    },
}

/// A trace event with its position in the execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeqEvent {
    pub seq: u64,
    #[serde(flatten)]
    pub event: TraceEvent,
}

/// One execution's worth of events, in order. `error` is set when the
/// execution aborted (type error, loop cap, unresolvable navigation); call
/// refutation bookkeeping skips such traces.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub id: u64,
    pub events: Vec<SeqEvent>,
    pub error: Option<String>,
}

static NEXT_TRACE_ID: AtomicU64 = AtomicU64::new(1);

impl Trace {
    pub fn new() -> Trace {
        Trace {
            id: NEXT_TRACE_ID.fetch_add(1, Ordering::Relaxed),
            events: Vec::new(),
            error: None,
        }
    }

    pub fn push(&mut self, event: TraceEvent) {
        let seq = self.events.len() as u64 + 1;
        self.events.push(SeqEvent { seq, event });
    }

    pub fn completed(&self) -> bool {
        self.error.is_none()
    }

    pub fn calls(&self) -> impl Iterator<Item = (&Option<FnRef>, &FnRef, &SourceLoc)> {
        self.events.iter().filter_map(|e| match &e.event {
            TraceEvent::Call {
                caller,
                callee,
                site,
            } => Some((caller, callee, site)),
            _ => None,
        })
    }

    pub fn string_ops(&self) -> impl Iterator<Item = (u64, &StringOpRecord)> {
        self.events.iter().filter_map(|e| match &e.event {
            TraceEvent::StringOp(op) => Some((e.seq, op)),
            _ => None,
        })
    }

    pub fn net_requests(&self) -> impl Iterator<Item = (&str, &str, &SourceLoc)> {
        self.events.iter().filter_map(|e| match &e.event {
            TraceEvent::NetRequest { method, url, loc } => {
                Some((method.as_str(), url.as_str(), loc))
            }
            _ => None,
        })
    }

    pub fn sink_writes(&self) -> impl Iterator<Item = (u64, &SourceLoc, &SinkKind, &str)> {
        self.events.iter().filter_map(|e| match &e.event {
            TraceEvent::SinkWrite {
                loc,
                sink_kind,
                value,
            } => Some((e.seq, loc, sink_kind, value.as_str())),
            _ => None,
        })
    }

    pub fn source_reads(&self) -> impl Iterator<Item = (u64, &SourceLoc, &SourceKind, &str)> {
        self.events.iter().filter_map(|e| match &e.event {
            TraceEvent::SourceRead {
                loc,
                source_kind,
                value,
            } => Some((e.seq, loc, source_kind, value.as_str())),
            _ => None,
        })
    }
}

impl Default for Trace {
    fn default() -> Self {
        Trace::new()
    }
}

/// Source/sink interception configuration: which host APIs count as taint
/// sources and which as sinks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSinkSpec {
    pub sources: Vec<String>,
    pub sinks: Vec<String>,
}

impl Default for SourceSinkSpec {
    fn default() -> Self {
        SourceSinkSpec {
            sources: vec![
                "location.href".into(),
                "location.hash".into(),
                "location.search".into(),
                "document.cookie".into(),
                "localStorage.getItem".into(),
                "input.value".into(),
            ],
            sinks: vec![
                "document.write".into(),
                "innerHTML".into(),
                "fetch".into(),
            ],
        }
    }
}
