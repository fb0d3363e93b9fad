//! CSV and JSON writers. CSV uses LF line endings and fixed column order.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use rmc_core::harness::{RowSource, Table2Row, Table3Row};
use rmc_core::RunResult;

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn trace_csv(result: &RunResult, dimension: usize) -> String {
    let mut out = String::from("generation,event");
    for i in 0..dimension {
        write!(out, ",x_{i}").unwrap();
    }
    out.push_str(",fitness\n");
    for e in &result.trajectory {
        write!(out, "{},{}", e.generation, e.event.as_str()).unwrap();
        for x in &e.point {
            write!(out, ",{}", num(*x)).unwrap();
        }
        writeln!(out, ",{}", num(e.fitness)).unwrap();
    }
    out
}

/// Writes one CSV record per trajectory event, header included.
pub fn emit_trace(result: &RunResult, dimension: usize, path: &Path) -> io::Result<()> {
    std::fs::write(path, trace_csv(result, dimension))
}

fn termination(r: &RunResult) -> String {
    format!("{:?}", r.termination_reason)
}

pub fn run_header(dimension: usize) -> String {
    let mut h = String::from(
        "seed,best_fitness,trm,tc,generations,termination_reason,evaluations",
    );
    for i in 0..dimension {
        write!(h, ",x_{i}").unwrap();
    }
    h.push('\n');
    h
}

pub fn run_row(seed: u64, r: &RunResult) -> String {
    let mut row = format!(
        "{seed},{},{},{},{},{},{}",
        num(r.best_fitness),
        r.counters.trm,
        r.counters.tc,
        r.generations(),
        termination(r),
        r.evaluations
    );
    for x in &r.best_point.coords {
        write!(row, ",{}", num(*x)).unwrap();
    }
    row.push('\n');
    row
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn table2_csv(rows: &[Table2Row]) -> String {
    let mut out = String::from(
        "function,rms,trm,tc,bp,bp_noiseless,sd,runs,best_run_trm,best_run_tc,best_point\n",
    );
    for r in rows {
        let point: Vec<String> = r.best_point.coords.iter().map(|x| num(*x)).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.function_id.label(),
            opt(r.rms),
            num(r.trm),
            num(r.tc),
            num(r.bp),
            num(r.bp_noiseless),
            num(r.sd),
            r.runs,
            r.best_run.trm,
            r.best_run.tc,
            point.join(" ")
        )
        .unwrap();
    }
    out
}

fn source_name(s: RowSource) -> &'static str {
    match s {
        RowSource::Measured => "measured",
        RowSource::LiteratureConstant => "literature",
    }
}

/// Shortest round-trip decimal, so `157.0` prints as `157`.
fn plain(x: f64) -> String {
    format!("{x}")
}

pub fn table3_csv(rows: &[Table3Row], png: &[(String, [f64; 5], &'static str)]) -> String {
    let mut out = String::from("algorithm,F1,F2,F3,F4,F5,source\n");
    for r in rows {
        let g: Vec<String> = r.generations.iter().map(|v| plain(*v)).collect();
        writeln!(out, "{},{},{}", r.algorithm_label, g.join(","), source_name(r.source)).unwrap();
    }
    for (label, values, source) in png {
        let g: Vec<String> = values.iter().map(|v| plain(*v)).collect();
        writeln!(out, "{label},{},{source}", g.join(",")).unwrap();
    }
    out
}

pub fn write_output(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rmc_core::{EventKind, GenerationCounters, Point, TerminationReason, TraceEvent};

    fn result(events: usize) -> RunResult {
        RunResult {
            best_point: Point::with_fitness(vec![1.0, -2.0], 0.5),
            best_fitness: 0.5,
            counters: GenerationCounters { trm: 2, tc: 1 },
            termination_reason: TerminationReason::BoxCollapsed,
            evaluations: 9,
            trajectory: (0..events)
                .map(|g| TraceEvent {
                    generation: g as u64,
                    event: EventKind::Mutation,
                    point: vec![0.1, 0.2],
                    fitness: 1.0 / 3.0,
                })
                .collect(),
            boxes: Vec::new(),
        }
    }

    #[test]
    fn trace_row_count() {
        assert_eq!(trace_csv(&result(3), 2).lines().count(), 4);
        assert_eq!(trace_csv(&result(0), 2), "generation,event,x_0,x_1,fitness\n");
    }

    #[test]
    fn trace_number_format() {
        let csv = trace_csv(&result(1), 2);
        let row = csv.lines().nth(1).unwrap();
        assert_eq!(row, "0,Mutation,1.0000000000000001e-1,2.0000000000000001e-1,3.3333333333333331e-1");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456.789] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }
}
