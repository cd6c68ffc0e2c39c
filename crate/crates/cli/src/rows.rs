//! Trace serialization: the fixed row schema shared by the CSV and JSON
//! emitters.
//!
//! A trace file carries one row per solver iteration plus one terminal row.
//! Iteration rows mirror the solver's per-iteration records. The terminal
//! row reports the final state: its `k` is the iteration count, its `f_gap`
//! is the final gap, and its cumulative counters equal the run's oracle
//! totals exactly — including evaluations made after the last full iteration
//! (the stopping check's refresh, the regularization reduction's final
//! re-evaluation), so the last line of every trace accounts for every oracle
//! call the run made.

use std::io::{self, Write};

use serde::Serialize;

use quasar_opt::{SolverTrace, Termination};

/// Fixed CSV header; column order is part of the output contract.
pub const TRACE_HEADER: &str =
    "k,f_gap,grad_norm_at_y,alpha_k,eta_k,linesearch_evals,cum_fn_evals,cum_grad_evals";

/// One trace line. `None` serializes as an empty CSV cell / JSON `null`:
/// gap columns when the optimum is unknown, step columns on plain
/// gradient-descent rows, and the per-iteration columns of the terminal row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub k: u64,
    pub f_gap: Option<f64>,
    pub grad_norm_at_y: Option<f64>,
    pub alpha_k: Option<f64>,
    pub eta_k: Option<f64>,
    pub linesearch_evals: Option<u64>,
    pub cum_fn_evals: u64,
    pub cum_grad_evals: u64,
}

/// Whole-run JSON document: run-level outcome fields plus the same rows the
/// CSV carries, under the same field names.
#[derive(Debug, Clone, Serialize)]
pub struct TraceDocument {
    pub solver: String,
    pub instance: String,
    pub termination: String,
    pub iterations: u64,
    pub total_fn_evals: u64,
    pub total_grad_evals: u64,
    pub initial_gap: Option<f64>,
    pub final_gap: Option<f64>,
    pub rows: Vec<TraceRow>,
}

/// Maps a solver trace to output rows: every iteration record in order,
/// then the terminal row.
pub fn rows_from_trace(trace: &SolverTrace) -> Vec<TraceRow> {
    let mut rows: Vec<TraceRow> = trace
        .records
        .iter()
        .map(|r| TraceRow {
            k: r.k,
            f_gap: r.f_gap,
            grad_norm_at_y: Some(r.grad_norm_at_y),
            alpha_k: r.alpha,
            eta_k: r.eta,
            linesearch_evals: Some(r.linesearch_evals),
            cum_fn_evals: r.cum_fn_evals,
            cum_grad_evals: r.cum_grad_evals,
        })
        .collect();
    rows.push(TraceRow {
        k: trace.iterations,
        f_gap: trace.final_gap,
        grad_norm_at_y: None,
        alpha_k: None,
        eta_k: None,
        linesearch_evals: None,
        cum_fn_evals: trace.total_fn_evals,
        cum_grad_evals: trace.total_grad_evals,
    });
    rows
}

pub fn document_from_trace(solver: &str, instance: &str, trace: &SolverTrace) -> TraceDocument {
    TraceDocument {
        solver: solver.to_string(),
        instance: instance.to_string(),
        termination: trace.termination.as_str().to_string(),
        iterations: trace.iterations,
        total_fn_evals: trace.total_fn_evals,
        total_grad_evals: trace.total_grad_evals,
        initial_gap: trace.initial_gap,
        final_gap: trace.final_gap,
        rows: rows_from_trace(trace),
    }
}

fn push_opt_f64(line: &mut String, value: Option<f64>) {
    if let Some(v) = value {
        line.push_str(&v.to_string());
    }
}

/// One CSV line, no trailing newline. All columns are numeric, so no
/// quoting is ever needed.
pub fn csv_line(row: &TraceRow) -> String {
    let mut line = String::new();
    line.push_str(&row.k.to_string());
    line.push(',');
    push_opt_f64(&mut line, row.f_gap);
    line.push(',');
    push_opt_f64(&mut line, row.grad_norm_at_y);
    line.push(',');
    push_opt_f64(&mut line, row.alpha_k);
    line.push(',');
    push_opt_f64(&mut line, row.eta_k);
    line.push(',');
    if let Some(evals) = row.linesearch_evals {
        line.push_str(&evals.to_string());
    }
    line.push(',');
    line.push_str(&row.cum_fn_evals.to_string());
    line.push(',');
    line.push_str(&row.cum_grad_evals.to_string());
    line
}

pub fn write_csv<W: Write + ?Sized>(writer: &mut W, rows: &[TraceRow]) -> io::Result<()> {
    writeln!(writer, "{TRACE_HEADER}")?;
    for row in rows {
        writeln!(writer, "{}", csv_line(row))?;
    }
    Ok(())
}

pub fn write_json<W: Write + ?Sized>(writer: &mut W, document: &TraceDocument) -> io::Result<()> {
    serde_json::to_writer(&mut *writer, document)?;
    writeln!(writer)
}

/// Exit code for a completed solver run: 0 for the two regular termination
/// reasons, 2 when a guard tripped (the trace is still written; the exit
/// code flags that the run's certification failed).
pub fn exit_code_for(termination: Termination) -> i32 {
    match termination {
        Termination::IterationBudget | Termination::TargetReached => 0,
        Termination::GuardTripped => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use quasar_opt::IterateRecord;

    fn sample_trace() -> SolverTrace {
        SolverTrace {
            records: vec![
                IterateRecord {
                    k: 0,
                    f_gap: Some(0.5),
                    grad_norm_at_y: 0.25,
                    alpha: Some(1.0),
                    eta: Some(0.125),
                    linesearch_evals: 3,
                    cum_fn_evals: 6,
                    cum_grad_evals: 6,
                    ..IterateRecord::default()
                },
                IterateRecord {
                    k: 1,
                    f_gap: Some(0.125),
                    grad_norm_at_y: 0.1,
                    alpha: Some(0.75),
                    eta: Some(0.125),
                    linesearch_evals: 5,
                    cum_fn_evals: 13,
                    cum_grad_evals: 13,
                    ..IterateRecord::default()
                },
            ],
            iterations: 2,
            final_point: vec![0.0],
            final_momentum: vec![0.0],
            final_gap: Some(1e-10),
            initial_gap: Some(0.5),
            final_potential: Some(1e-10),
            termination: Termination::TargetReached,
            total_fn_evals: 14,
            total_grad_evals: 14,
            quasar_violation_at: None,
        }
    }

    #[test]
    fn rows_end_with_terminal_accounting_row() {
        let trace = sample_trace();
        let rows = rows_from_trace(&trace);
        assert_eq!(rows.len(), 3);
        let last = rows.last().unwrap();
        assert_eq!(last.k, 2);
        assert_eq!(last.f_gap, Some(1e-10));
        assert_eq!(last.grad_norm_at_y, None);
        assert_eq!(last.alpha_k, None);
        assert_eq!(last.linesearch_evals, None);
        assert_eq!(last.cum_fn_evals, 14);
        assert_eq!(last.cum_grad_evals, 14);
    }

    #[test]
    fn csv_has_fixed_header_and_blank_cells() {
        let trace = sample_trace();
        let mut out = Vec::new();
        write_csv(&mut out, &rows_from_trace(&trace)).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), TRACE_HEADER);
        assert_eq!(lines.next().unwrap(), "0,0.5,0.25,1,0.125,3,6,6");
        assert_eq!(lines.next().unwrap(), "1,0.125,0.1,0.75,0.125,5,13,13");
        assert_eq!(lines.next().unwrap(), "2,0.0000000001,,,,,14,14");
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn json_document_mirrors_field_names() {
        let trace = sample_trace();
        let doc = document_from_trace("agd-strong", "quadratic(...)", &trace);
        let mut out = Vec::new();
        write_json(&mut out, &doc).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(value["termination"], "target-reached");
        assert_eq!(value["rows"][0]["f_gap"], 0.5);
        assert_eq!(value["rows"][2]["alpha_k"], serde_json::Value::Null);
        assert_eq!(value["rows"][2]["cum_grad_evals"], 14);
        assert!(out.ends_with(b"\n"));
    }

    #[test]
    fn guard_maps_to_exit_two() {
        assert_eq!(exit_code_for(Termination::TargetReached), 0);
        assert_eq!(exit_code_for(Termination::IterationBudget), 0);
        assert_eq!(exit_code_for(Termination::GuardTripped), 2);
    }
}
