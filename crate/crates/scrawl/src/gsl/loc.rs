use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifier of a loaded script, normally the script's file name inside the
/// app bundle. Two pages referencing the same file share one id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ScriptId(pub String);

impl ScriptId {
    pub fn new(name: impl Into<String>) -> Self {
        ScriptId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ScriptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A 1-based position inside a loaded script. Sources, sinks, call sites and
/// constraints are all keyed by these.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceLoc {
    pub script: ScriptId,
    pub line: u32,
    pub col: u32,
}

impl SourceLoc {
    pub fn new(script: ScriptId, line: u32, col: u32) -> Self {
        debug_assert!(line >= 1 && col >= 1);
        SourceLoc { script, line, col }
    }
}

impl fmt::Display for SourceLoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.script, self.line, self.col)
    }
}
