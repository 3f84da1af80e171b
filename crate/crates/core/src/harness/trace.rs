//! Trace rows and their CSV form.
//!
//! One row per (seed, step, agent). Header:
//! `seed,k,agent,x0,...,x{d-1},decision,dist_own,d0,spread_max`.
//! Agent ids are 1-based in the file. The `decision` column carries the
//! action that produced the row's state; initial rows carry `init`. Floats
//! print in shortest round-trip form, so identical runs serialize to
//! identical bytes.

use std::io::{BufRead, BufReader, Read};

use super::HarnessError;
use crate::metrics::StepMetrics;
use crate::protocol::{Decision, NetworkState};

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub seed: u64,
    pub k: u64,
    /// 1-based agent id.
    pub agent: usize,
    pub coords: Vec<f64>,
    /// "average", "project" or "init".
    pub decision: String,
    pub dist_own: f64,
    pub d0: f64,
    pub spread_max: f64,
}

pub fn csv_header(dim: usize) -> String {
    let mut header = String::from("seed,k,agent");
    for c in 0..dim {
        header.push_str(&format!(",x{c}"));
    }
    header.push_str(",decision,dist_own,d0,spread_max\n");
    header
}

/// Appends the rows of one recorded step for all agents.
pub fn push_step_rows(out: &mut String, seed: u64, state: &NetworkState, metrics: &StepMetrics) {
    for agent in 0..state.n() {
        let decision = match &metrics.decisions {
            Some(d) => d[agent].as_str(),
            None => "init",
        };
        out.push_str(&format!("{seed},{}", metrics.k));
        out.push_str(&format!(",{}", agent + 1));
        for c in state.states[agent].coords() {
            out.push_str(&format!(",{c}"));
        }
        out.push_str(&format!(
            ",{decision},{},{},{}\n",
            metrics.per_agent_own[agent], metrics.d0, metrics.spread_max
        ));
    }
}

/// Parses a trace CSV back into rows; the summary statistics are
/// recomputable from these alone.
pub fn read_trace_csv(reader: impl Read) -> Result<Vec<TraceRow>, HarnessError> {
    let mut lines = BufReader::new(reader).lines();
    let header = match lines.next() {
        Some(h) => h.map_err(|source| HarnessError::Io {
            path: "<trace>".into(),
            source,
        })?,
        None => return Ok(Vec::new()),
    };
    let columns: Vec<&str> = header.trim_end().split(',').collect();
    let dim = columns
        .iter()
        .filter(|c| c.starts_with('x') && c[1..].chars().all(|ch| ch.is_ascii_digit()))
        .count();
    let parse_err = |line: usize, message: String| HarnessError::Parse {
        path: format!("<trace>:{line}"),
        message,
    };
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line.map_err(|source| HarnessError::Io {
            path: "<trace>".into(),
            source,
        })?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 7 {
            return Err(parse_err(idx + 2, format!("expected {} fields", dim + 7)));
        }
        let num = |s: &str| -> Result<f64, HarnessError> {
            s.parse()
                .map_err(|e| parse_err(idx + 2, format!("bad number {s:?}: {e}")))
        };
        let int = |s: &str| -> Result<u64, HarnessError> {
            s.parse()
                .map_err(|e| parse_err(idx + 2, format!("bad integer {s:?}: {e}")))
        };
        rows.push(TraceRow {
            seed: int(fields[0])?,
            k: int(fields[1])?,
            agent: int(fields[2])? as usize,
            coords: fields[3..3 + dim]
                .iter()
                .map(|s| num(s))
                .collect::<Result<_, _>>()?,
            decision: fields[3 + dim].to_string(),
            dist_own: num(fields[4 + dim])?,
            d0: num(fields[5 + dim])?,
            spread_max: num(fields[6 + dim])?,
        });
    }
    Ok(rows)
}

impl TraceRow {
    /// Decision column as a typed value, when it is not an initial row.
    pub fn decision_tag(&self) -> Option<Decision> {
        match self.decision.as_str() {
            "average" => Some(Decision::Average),
            "project" => Some(Decision::Project),
            _ => None,
        }
    }
}
