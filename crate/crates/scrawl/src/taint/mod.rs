//! Staged taint-flow inference.
//!
//! Flows are inferred by correlating observed source and sink values, never
//! by attaching labels. Four stages run in order, each a stricter filter:
//!
//! 1. **Substring** — exact containment of one value in the other, gated on
//!    a minimum length θ. A match reports a flow immediately.
//! 2. **Edit distance** — LCS-derived insertion/deletion counts; accept when
//!    `(L - (d_i + d_d)) / L >= η` with `L = max(len)`.
//! 3. **Sink check** — mutate the source value, re-execute, and compare the
//!    sink value: an identical sink means the source had no impact.
//! 4. **Trace check** — count tainted string operations that insert and
//!    delete; reject when the observed counts cannot account for `d_i`/`d_d`.

mod lcs;
mod mutate;

use serde::{Deserialize, Serialize};

pub use lcs::{lcs_counts, lcs_len, structure_diff};
pub use mutate::mutate_value;

use crate::gsl::SourceLoc;
use crate::trace::{SinkKind, SourceKind, StringOpRecord, Trace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaintParams {
    /// Minimum length for a substring match to count (θ).
    pub theta: usize,
    /// Edit-distance similarity threshold (η).
    pub eta: f64,
    /// Value-length cap for the quadratic LCS; longer pairs degrade to the
    /// substring stage only.
    pub max_lcs_len: usize,
    /// Fraction of characters the sink-check mutation rewrites.
    pub mutation_fraction: f64,
    pub seed: u64,
}

impl Default for TaintParams {
    fn default() -> Self {
        TaintParams {
            theta: 6,
            eta: 0.1,
            max_lcs_len: 2000,
            mutation_fraction: 0.25,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubstringOutcome {
    Match,
    NoMatch,
}

/// Stage 1: does either string contain the other, with the shorter one at
/// least θ characters long?
pub fn substring_stage(a_v: &str, b_v: &str, theta: usize) -> SubstringOutcome {
    let shorter = a_v.chars().count().min(b_v.chars().count());
    if shorter >= theta && (a_v.contains(b_v) || b_v.contains(a_v)) {
        SubstringOutcome::Match
    } else {
        SubstringOutcome::NoMatch
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EditDistanceOutcome {
    pub accepted: bool,
    pub d_i: usize,
    pub d_d: usize,
    pub similarity: f64,
}

/// Stage 2: LCS counts plus the similarity score, inclusive at the threshold.
pub fn edit_distance_stage(a_v: &str, b_v: &str, eta: f64) -> EditDistanceOutcome {
    let (d_i, d_d) = lcs_counts(a_v, b_v);
    let longest = a_v.chars().count().max(b_v.chars().count());
    let similarity = if longest == 0 {
        1.0
    } else {
        (longest as f64 - (d_i + d_d) as f64) / longest as f64
    };
    EditDistanceOutcome {
        accepted: similarity >= eta,
        d_i,
        d_d,
        similarity,
    }
}

/// Does a recorded string operation involve the source value, via the same
/// substring and edit-distance checks? The base is consulted first, then each
/// argument; the first operand that matches is the tainted operand.
pub fn tainted_operand<'op>(
    op: &'op StringOpRecord,
    theta: usize,
    eta: f64,
    a_v: &str,
) -> Option<&'op str> {
    std::iter::once(op.base.as_str())
        .chain(op.args.iter().map(|s| s.as_str()))
        .find(|operand| {
            !operand.is_empty()
                && (substring_stage(a_v, operand, theta) == SubstringOutcome::Match
                    || edit_distance_stage(a_v, operand, eta).accepted)
        })
}

pub fn is_op_tainted(op: &StringOpRecord, theta: usize, eta: f64, a_v: &str) -> bool {
    tainted_operand(op, theta, eta, a_v).is_some()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpDelta {
    Insertion,
    Deletion,
    Neither,
}

/// Operation-agnostic insertion/deletion classification: the result grew or
/// shrank relative to the tainted input operand.
pub fn classify_op(op: &StringOpRecord, tainted_operand: &str) -> OpDelta {
    let result_len = op.result.chars().count();
    let input_len = tainted_operand.chars().count();
    match result_len.cmp(&input_len) {
        std::cmp::Ordering::Greater => OpDelta::Insertion,
        std::cmp::Ordering::Less => OpDelta::Deletion,
        std::cmp::Ordering::Equal => OpDelta::Neither,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceCheckOutcome {
    pub matches: bool,
    pub d_ti: u32,
    pub d_td: u32,
}

/// Stage 4: count tainted insertions and deletions among the recorded string
/// operations; reject when `d_i > 0` with no insertion observed, or `d_d > 0`
/// with no deletion observed.
pub fn trace_check_stage(
    a_v: &str,
    d_i: usize,
    d_d: usize,
    ops: &[StringOpRecord],
    params: &TaintParams,
) -> TraceCheckOutcome {
    let mut d_ti = 0u32;
    let mut d_td = 0u32;
    for op in ops {
        if let Some(operand) = tainted_operand(op, params.theta, params.eta, a_v) {
            match classify_op(op, operand) {
                OpDelta::Insertion => d_ti += 1,
                OpDelta::Deletion => d_td += 1,
                OpDelta::Neither => {}
            }
        }
    }
    let rejected = (d_i > 0 && d_ti == 0) || (d_d > 0 && d_td == 0);
    TraceCheckOutcome {
        matches: !rejected,
        d_ti,
        d_td,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObsKind {
    Source(SourceKind),
    Sink(SinkKind),
}

/// One runtime observation at a source or sink: the exact string the host
/// API saw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub loc: SourceLoc,
    pub kind: ObsKind,
    pub value: String,
    pub state: u64,
    pub seq: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub source: Observation,
    pub sink: Observation,
    pub d_i: usize,
    pub d_d: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageReached {
    Substring,
    EditDistance,
    SinkCheck,
    TraceCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Flow,
    NoFlow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MutationOutcome {
    SinkMissed,
    SinkChanged,
    SinkIdentical,
    NotRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowVerdict {
    pub pair: CandidatePair,
    pub stage_reached: StageReached,
    pub verdict: Verdict,
    pub d_ti: u32,
    pub d_td: u32,
    pub mutation_outcome: MutationOutcome,
    /// Value exceeded `max_lcs_len`; only the substring stage ran.
    pub degraded: bool,
    /// The sink-check re-execution failed; treated as "proceed".
    pub rerun_warning: bool,
}

/// Re-execution hook for the sink check: run the recorded execution again
/// with the source at `pair.source.loc` replaced by `mutated`, and return
/// the value observed at the pair's sink location (`None` if unreached).
pub trait SinkRerun {
    fn rerun(&mut self, pair: &CandidatePair, mutated: &str) -> Result<Option<String>, String>;
}

impl<F> SinkRerun for F
where
    F: FnMut(&CandidatePair, &str) -> Result<Option<String>, String>,
{
    fn rerun(&mut self, pair: &CandidatePair, mutated: &str) -> Result<Option<String>, String> {
        self(pair, mutated)
    }
}

/// The source reads, sink writes and string operations of one execution,
/// extracted from its trace.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionSlice {
    pub sources: Vec<Observation>,
    pub sinks: Vec<Observation>,
    pub string_ops: Vec<(u64, StringOpRecord)>,
}

impl ExecutionSlice {
    pub fn from_trace(trace: &Trace, state: u64) -> ExecutionSlice {
        let sources = trace
            .source_reads()
            .map(|(seq, loc, kind, value)| Observation {
                loc: loc.clone(),
                kind: ObsKind::Source(kind.clone()),
                value: value.to_string(),
                state,
                seq,
            })
            .collect();
        let sinks = trace
            .sink_writes()
            .map(|(seq, loc, kind, value)| Observation {
                loc: loc.clone(),
                kind: ObsKind::Sink(*kind),
                value: value.to_string(),
                state,
                seq,
            })
            .collect();
        let string_ops = trace
            .string_ops()
            .map(|(seq, op)| (seq, op.clone()))
            .collect();
        ExecutionSlice {
            sources,
            sinks,
            string_ops,
        }
    }
}

/// Run the full pipeline over the executions observed for one state.
///
/// Pairs are formed per execution from each sink write back to the latest
/// preceding read of each source location; verdicts are keyed by
/// `(sink loc, source loc)` and a later execution may upgrade a NoFlow to a
/// Flow but never the reverse.
pub fn run_pipeline(
    executions: &[ExecutionSlice],
    rerun: &mut dyn SinkRerun,
    params: &TaintParams,
) -> Vec<FlowVerdict> {
    use std::collections::BTreeMap;

    let mut verdicts: BTreeMap<(SourceLoc, SourceLoc), FlowVerdict> = BTreeMap::new();
    for exec in executions {
        for sink in &exec.sinks {
            if sink.value.is_empty() {
                continue;
            }
            // Latest non-empty read of each source location before this sink.
            let mut latest: BTreeMap<SourceLoc, &Observation> = BTreeMap::new();
            for source in &exec.sources {
                if source.seq < sink.seq && !source.value.is_empty() {
                    latest.insert(source.loc.clone(), source);
                }
            }
            for (_, source) in latest {
                let key = (sink.loc.clone(), source.loc.clone());
                if matches!(verdicts.get(&key), Some(v) if v.verdict == Verdict::Flow) {
                    continue;
                }
                let verdict = evaluate_pair(source, sink, exec, rerun, params);
                if verdict.verdict == Verdict::Flow || !verdicts.contains_key(&key) {
                    verdicts.insert(key, verdict);
                }
            }
        }
    }
    verdicts.into_values().collect()
}

fn evaluate_pair(
    source: &Observation,
    sink: &Observation,
    exec: &ExecutionSlice,
    rerun: &mut dyn SinkRerun,
    params: &TaintParams,
) -> FlowVerdict {
    let a_v = &source.value;
    let b_v = &sink.value;
    let mut pair = CandidatePair {
        source: source.clone(),
        sink: sink.clone(),
        d_i: 0,
        d_d: 0,
    };

    let oversized =
        a_v.chars().count() > params.max_lcs_len || b_v.chars().count() > params.max_lcs_len;
    if substring_stage(a_v, b_v, params.theta) == SubstringOutcome::Match {
        return FlowVerdict {
            pair,
            stage_reached: StageReached::Substring,
            verdict: Verdict::Flow,
            d_ti: 0,
            d_td: 0,
            mutation_outcome: MutationOutcome::NotRun,
            degraded: oversized,
            rerun_warning: false,
        };
    }
    if oversized {
        return FlowVerdict {
            pair,
            stage_reached: StageReached::Substring,
            verdict: Verdict::NoFlow,
            d_ti: 0,
            d_td: 0,
            mutation_outcome: MutationOutcome::NotRun,
            degraded: true,
            rerun_warning: false,
        };
    }

    let edit = edit_distance_stage(a_v, b_v, params.eta);
    pair.d_i = edit.d_i;
    pair.d_d = edit.d_d;
    if !edit.accepted {
        return FlowVerdict {
            pair,
            stage_reached: StageReached::EditDistance,
            verdict: Verdict::NoFlow,
            d_ti: 0,
            d_td: 0,
            mutation_outcome: MutationOutcome::NotRun,
            degraded: false,
            rerun_warning: false,
        };
    }

    let mutated = mutate_value(a_v, params.mutation_fraction, params.seed);
    let (mutation_outcome, rerun_warning) = match rerun.rerun(&pair, &mutated) {
        Err(_) => (MutationOutcome::NotRun, true),
        Ok(None) => (MutationOutcome::SinkMissed, false),
        Ok(Some(b2)) if b2 != *b_v => (MutationOutcome::SinkChanged, false),
        Ok(Some(_)) => {
            return FlowVerdict {
                pair,
                stage_reached: StageReached::SinkCheck,
                verdict: Verdict::NoFlow,
                d_ti: 0,
                d_td: 0,
                mutation_outcome: MutationOutcome::SinkIdentical,
                degraded: false,
                rerun_warning: false,
            }
        }
    };

    // Stage 4 inspects the operations recorded between the pair's read and
    // write in the original (unmutated) execution.
    let ops: Vec<StringOpRecord> = exec
        .string_ops
        .iter()
        .filter(|(seq, _)| *seq > source.seq && *seq < sink.seq)
        .map(|(_, op)| op.clone())
        .collect();
    let check = trace_check_stage(a_v, pair.d_i, pair.d_d, &ops, params);
    FlowVerdict {
        pair,
        stage_reached: StageReached::TraceCheck,
        verdict: if check.matches {
            Verdict::Flow
        } else {
            Verdict::NoFlow
        },
        d_ti: check.d_ti,
        d_td: check.d_td,
        mutation_outcome,
        degraded: false,
        rerun_warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsl::{ScriptId, SourceLoc};

    fn loc(line: u32) -> SourceLoc {
        SourceLoc::new(ScriptId::new("t.gs"), line, 1)
    }

    fn op(name: &str, base: &str, args: &[&str], result: &str) -> StringOpRecord {
        StringOpRecord {
            op: name.to_string(),
            base: base.to_string(),
            args: args.iter().map(|s| s.to_string()).collect(),
            result: result.to_string(),
            loc: loc(1),
        }
    }

    #[test]
    fn substring_containment() {
        assert_eq!(
            substring_stage("#payload", "pre#payloadpost", 6),
            SubstringOutcome::Match
        );
    }

    #[test]
    fn substring_rejects_dissimilar_values() {
        assert_eq!(substring_stage("#payload", "23", 6), SubstringOutcome::NoMatch);
    }

    #[test]
    fn substring_length_gate_dominates() {
        assert_eq!(substring_stage("ab", "ab", 6), SubstringOutcome::NoMatch);
    }

    #[test]
    fn edit_distance_paper_values() {
        let out = edit_distance_stage("#payload", "yloa123", 0.1);
        assert!(out.accepted);
        assert_eq!((out.d_i, out.d_d), (3, 4));
        assert_eq!(out.similarity, 0.125);
    }

    #[test]
    fn edit_distance_threshold_is_inclusive() {
        assert!(edit_distance_stage("#payload", "yloa123", 0.125).accepted);
        assert!(!edit_distance_stage("#payload", "yloa123", 0.126).accepted);
    }

    #[test]
    fn edit_distance_rejects_disjoint() {
        let out = edit_distance_stage("#payload", "23", 0.1);
        assert!(!out.accepted);
        assert_eq!((out.d_i, out.d_d), (2, 8));
        assert!(out.similarity < 0.0);
    }

    #[test]
    fn identical_values_have_similarity_one() {
        let out = edit_distance_stage("same", "same", 1.0);
        assert!(out.accepted);
        assert_eq!(out.similarity, 1.0);
    }

    #[test]
    fn listing_style_trace_check() {
        // Two shrinking substrings and one growing concat on the source
        // value: one insertion, two deletions.
        let ops = vec![
            op("substring", "#payload", &["1"], "payload"),
            op("substring", "payload", &["2", "6"], "yloa"),
            op("concat", "yloa", &["123"], "yloa123"),
        ];
        let out = trace_check_stage("#payload", 3, 4, &ops, &TaintParams::default());
        assert!(out.matches);
        assert_eq!((out.d_ti, out.d_td), (1, 2));
    }

    #[test]
    fn vacuous_counts_match() {
        let out = trace_check_stage("#payload", 0, 0, &[], &TaintParams::default());
        assert!(out.matches);
    }

    #[test]
    fn deletions_required_but_absent() {
        let ops = vec![op("concat", "#payload", &["x"], "#payloadx")];
        let out = trace_check_stage("#payload", 0, 4, &ops, &TaintParams::default());
        assert!(!out.matches);
        assert_eq!(out.d_td, 0);
    }

    #[test]
    fn op_taint_via_base_and_args() {
        let direct = op("substring", "#payload", &["1"], "payload");
        assert!(is_op_tainted(&direct, 6, 0.1, "#payload"));

        let constants = op("concat", "aaaa", &["bbbb"], "aaaabbbb");
        assert!(!is_op_tainted(&constants, 6, 0.1, "#payload"));

        // "yloa" is a containment hit at θ=4, and an edit-distance hit at
        // θ=6 (similarity 0.5).
        let via_arg = op("concat", "zzzz", &["yloa"], "zzzzyloa");
        assert!(is_op_tainted(&via_arg, 4, 0.1, "#payload"));
        assert!(is_op_tainted(&via_arg, 6, 0.1, "#payload"));
        assert!(!is_op_tainted(&via_arg, 6, 0.6, "#payload"));
    }

    fn obs_source(value: &str, seq: u64) -> Observation {
        Observation {
            loc: loc(1),
            kind: ObsKind::Source(crate::trace::SourceKind::UrlHash),
            value: value.to_string(),
            state: 0,
            seq,
        }
    }

    fn obs_sink(value: &str, line: u32, seq: u64) -> Observation {
        Observation {
            loc: loc(line),
            kind: ObsKind::Sink(SinkKind::DocumentWrite),
            value: value.to_string(),
            state: 0,
            seq,
        }
    }

    #[test]
    fn pipeline_reports_transformed_flow_and_filters_length_sink() {
        let exec = ExecutionSlice {
            sources: vec![obs_source("#payload", 1)],
            sinks: vec![obs_sink("23", 5, 5), obs_sink("yloa123", 6, 6)],
            string_ops: vec![
                (2, op("substring", "#payload", &["1"], "payload")),
                (3, op("substring", "payload", &["2", "6"], "yloa")),
                (4, op("concat", "yloa", &["123"], "yloa123")),
            ],
        };
        // Re-running with a mutated fragment produces a different sink value.
        let mut rerun = |_pair: &CandidatePair, mutated: &str| -> Result<Option<String>, String> {
            let tail: String = mutated.chars().skip(3).take(4).collect();
            Ok(Some(format!("{tail}123")))
        };
        let verdicts = run_pipeline(&[exec], &mut rerun, &TaintParams::default());
        assert_eq!(verdicts.len(), 2);
        let flow: Vec<_> = verdicts
            .iter()
            .filter(|v| v.verdict == Verdict::Flow)
            .collect();
        assert_eq!(flow.len(), 1);
        let flow = flow[0];
        assert_eq!(flow.pair.sink.value, "yloa123");
        assert_eq!((flow.pair.d_i, flow.pair.d_d), (3, 4));
        assert_eq!((flow.d_ti, flow.d_td), (1, 2));
        assert_eq!(flow.stage_reached, StageReached::TraceCheck);
        assert_eq!(flow.mutation_outcome, MutationOutcome::SinkChanged);

        let no_flow = verdicts
            .iter()
            .find(|v| v.verdict == Verdict::NoFlow)
            .unwrap();
        assert_eq!(no_flow.pair.sink.value, "23");
        assert_eq!(no_flow.stage_reached, StageReached::EditDistance);
    }

    #[test]
    fn sink_identical_kills_pair() {
        let exec = ExecutionSlice {
            sources: vec![obs_source("#payloax", 1)],
            sinks: vec![obs_sink("payload-banner", 3, 3)],
            string_ops: vec![],
        };
        let mut rerun = |_: &CandidatePair, _: &str| -> Result<Option<String>, String> {
            Ok(Some("payload-banner".to_string()))
        };
        let verdicts = run_pipeline(&[exec], &mut rerun, &TaintParams::default());
        assert_eq!(verdicts.len(), 1);
        assert_eq!(verdicts[0].verdict, Verdict::NoFlow);
        assert_eq!(verdicts[0].stage_reached, StageReached::SinkCheck);
        assert_eq!(verdicts[0].mutation_outcome, MutationOutcome::SinkIdentical);
    }

    #[test]
    fn rerun_failure_proceeds_with_warning() {
        let exec = ExecutionSlice {
            sources: vec![obs_source("#payload", 1)],
            sinks: vec![obs_sink("yloa123", 5, 5)],
            string_ops: vec![
                (2, op("substring", "#payload", &["1"], "payload")),
                (3, op("substring", "payload", &["2", "6"], "yloa")),
                (4, op("concat", "yloa", &["123"], "yloa123")),
            ],
        };
        let mut rerun = |_: &CandidatePair, _: &str| -> Result<Option<String>, String> {
            Err("replay diverged".to_string())
        };
        let verdicts = run_pipeline(&[exec], &mut rerun, &TaintParams::default());
        assert_eq!(verdicts[0].verdict, Verdict::Flow);
        assert!(verdicts[0].rerun_warning);
        assert_eq!(verdicts[0].mutation_outcome, MutationOutcome::NotRun);
    }

    #[test]
    fn substring_match_short_circuits() {
        let exec = ExecutionSlice {
            sources: vec![obs_source("http://a.local/#show", 1)],
            sinks: vec![obs_sink("mode: http://a.local/#show", 2, 2)],
            string_ops: vec![],
        };
        let mut rerun = |_: &CandidatePair, _: &str| -> Result<Option<String>, String> {
            panic!("substring flows must not re-execute");
        };
        let verdicts = run_pipeline(&[exec], &mut rerun, &TaintParams::default());
        assert_eq!(verdicts[0].verdict, Verdict::Flow);
        assert_eq!(verdicts[0].stage_reached, StageReached::Substring);
        assert_eq!(verdicts[0].mutation_outcome, MutationOutcome::NotRun);
        assert_eq!((verdicts[0].d_ti, verdicts[0].d_td), (0, 0));
    }

    #[test]
    fn empty_values_never_pair() {
        let exec = ExecutionSlice {
            sources: vec![obs_source("", 1)],
            sinks: vec![obs_sink("banner", 2, 2)],
            string_ops: vec![],
        };
        let mut rerun = |_: &CandidatePair, _: &str| -> Result<Option<String>, String> { Ok(None) };
        assert!(run_pipeline(&[exec], &mut rerun, &TaintParams::default()).is_empty());
    }

    #[test]
    fn oversized_values_degrade_to_substring_only() {
        let big = "x".repeat(3000);
        let exec = ExecutionSlice {
            sources: vec![obs_source(&big, 1)],
            sinks: vec![obs_sink(&format!("pre {big}"), 2, 2)],
            string_ops: vec![],
        };
        let mut rerun = |_: &CandidatePair, _: &str| -> Result<Option<String>, String> { Ok(None) };
        let verdicts = run_pipeline(&[exec], &mut rerun, &TaintParams::default());
        assert_eq!(verdicts[0].verdict, Verdict::Flow);
        assert!(verdicts[0].degraded);
    }
}
