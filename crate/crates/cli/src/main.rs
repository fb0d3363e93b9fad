mod report;
mod settings;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;
use serde_json::json;

use rmc_core::harness::{
    literature_table3, measure_table3_row, png_row, run_once, successful, truncate_3,
    DEFAULT_DE_REPLICATES, DEFAULT_RMC_REPLICATES, DE_LABEL, RMCGA_LABEL,
};
use rmc_core::{
    grid_oracle, run_experiment, summarize_table2, AlgorithmConfig, ExperimentSpec, ObjectiveId,
    ObjectiveSpec, RmcError, Table3Row,
};

use settings::{parse_config, Algorithm, Cli, Command, Format, Options, UsageError};

const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;
const EXIT_IO: u8 = 4;

enum Failure {
    Usage(String),
    Runtime(RmcError),
    Io(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

impl From<RmcError> for Failure {
    fn from(e: RmcError) -> Self {
        match e {
            RmcError::Config(msg) => Failure::Usage(msg),
            other => Failure::Runtime(other),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn experiment(opts: &Options, id: ObjectiveId) -> ExperimentSpec {
    let mut spec = match opts.algorithm() {
        Algorithm::Rmc => {
            let mut s = ExperimentSpec::rmc(id);
            s.algorithm = AlgorithmConfig::Rmc(opts.rmc_config());
            s
        }
        Algorithm::De => {
            let mut s = ExperimentSpec::de(id);
            if let AlgorithmConfig::De(c) = s.algorithm {
                s.algorithm = AlgorithmConfig::De(opts.de_config(c));
            }
            s
        }
    };
    if let Some(r) = opts.replicates {
        spec.replicates = r;
    }
    spec.base_seed = opts.seed();
    spec
}

fn optimize(opts: &Options) -> Result<String, Failure> {
    let spec = experiment(opts, opts.require_function()?);
    spec.validate()?;
    let result = run_once(&spec, opts.seed())?;
    if let Some(path) = &opts.trace {
        report::emit_trace(&result, spec.objective.dimension, path).map_err(|e| io_error(path, e))?;
    }
    Ok(match opts.format() {
        Format::Json => to_json(&result),
        Format::Csv => report::run_header(spec.objective.dimension) + &report::run_row(opts.seed(), &result),
    })
}

fn benchmark(opts: &Options) -> Result<String, Failure> {
    let spec = experiment(opts, opts.require_function()?);
    let results = run_experiment(&spec)?;
    for (k, r) in results.iter().enumerate() {
        if let Err(e) = r {
            eprintln!("run with seed {} failed: {e}", spec.seed_for(k));
        }
    }
    Ok(match opts.format() {
        Format::Json => {
            let records: Vec<_> = results
                .iter()
                .enumerate()
                .map(|(k, r)| match r {
                    Ok(run) => json!({ "seed": spec.seed_for(k), "result": run }),
                    Err(e) => json!({ "seed": spec.seed_for(k), "error": e.to_string() }),
                })
                .collect();
            to_json(&records)
        }
        Format::Csv => {
            let mut out = report::run_header(spec.objective.dimension);
            for (k, r) in results.iter().enumerate() {
                if let Ok(run) = r {
                    out.push_str(&report::run_row(spec.seed_for(k), run));
                }
            }
            out
        }
    })
}

fn table2(opts: &Options) -> Result<String, Failure> {
    let ids = match opts.function {
        Some(id) => vec![id],
        None => ObjectiveId::DE_JONG.to_vec(),
    };
    let mut rows = Vec::new();
    for id in ids {
        let spec = experiment(opts, id);
        let runs = successful(&run_experiment(&spec)?);
        rows.push(summarize_table2(&runs, &spec)?);
    }
    Ok(match opts.format() {
        Format::Json => to_json(&rows),
        Format::Csv => report::table2_csv(&rows),
    })
}

fn truncated(values: [f64; 5]) -> [f64; 5] {
    values.map(truncate_3)
}

fn table3(opts: &Options) -> Result<String, Failure> {
    let mut rows = literature_table3();
    let find = |rows: &[Table3Row], label: &str| {
        rows.iter()
            .find(|r| r.algorithm_label == label)
            .cloned()
            .expect("literature rows include both labels")
    };
    let published_png = png_row(&find(&rows, DE_LABEL), &find(&rows, RMCGA_LABEL))?;

    let rmc = measure_table3_row(
        &AlgorithmConfig::Rmc(opts.rmc_config()),
        opts.replicates.unwrap_or(DEFAULT_RMC_REPLICATES),
        opts.seed(),
    )?;
    let de = measure_table3_row(
        &AlgorithmConfig::De(opts.de_config(Default::default())),
        opts.replicates.unwrap_or(DEFAULT_DE_REPLICATES),
        opts.seed(),
    )?;
    let measured_png = png_row(&de, &rmc)?;
    rows.push(rmc);
    rows.push(de);

    let png = vec![
        ("PNG".to_string(), truncated(published_png), "literature"),
        ("PNG".to_string(), truncated(measured_png), "measured"),
    ];
    Ok(match opts.format() {
        Format::Json => {
            let png: Vec<_> = png
                .iter()
                .map(|(label, values, source)| json!({ "label": label, "values": values, "source": source }))
                .collect();
            to_json(&json!({ "rows": rows, "png": png }))
        }
        Format::Csv => report::table3_csv(&rows, &png),
    })
}

fn oracle(opts: &Options) -> Result<String, Failure> {
    let id = opts.require_function()?;
    let resolution = opts.resolution.unwrap_or(201);
    let spec = ObjectiveSpec::new(id);
    let (point, value) = grid_oracle(&spec, resolution)?;
    Ok(match opts.format() {
        Format::Json => to_json(&json!({
            "function": id.name(),
            "resolution": resolution,
            "point": point,
            "value": value,
        })),
        Format::Csv => {
            let mut out = String::from("function,resolution,value");
            for i in 0..point.len() {
                out.push_str(&format!(",x_{i}"));
            }
            out.push('\n');
            out.push_str(&format!("{},{resolution},{}", id.name(), report::num(value)));
            for x in &point {
                out.push_str(&format!(",{}", report::num(*x)));
            }
            out.push('\n');
            out
        }
    })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut opts = cli.command.options().clone();
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        opts = opts.merge(&parse_config(&text)?)?;
    }
    opts.check_algorithm_flags()?;
    if opts.trace.is_some() && !matches!(cli.command, Command::Optimize(_)) {
        return Err(Failure::Usage("--trace only applies to optimize".into()));
    }
    let text = match cli.command {
        Command::Optimize(_) => optimize(&opts)?,
        Command::Benchmark(_) => benchmark(&opts)?,
        Command::Table2(_) => table2(&opts)?,
        Command::Table3(_) => table3(&opts)?,
        Command::Oracle(_) => oracle(&opts)?,
    };
    let out = opts.output.as_deref();
    report::write_output(out, &text).map_err(|e| match out {
        Some(p) => io_error(p, e),
        None => Failure::Io(format!("stdout: {e}")),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
