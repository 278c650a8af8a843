use std::path::PathBuf;
use std::process::ExitCode;

use barcode_entropy::filtration::DEFAULT_SIMPLEX_BUDGET;
use barcode_entropy::pipeline::{
    cmd_analyze, cmd_classify_barcode, cmd_sample, InputSource, RunConfig, SampleSpec,
};
use barcode_entropy::{Error, ReportFormat, Threshold, TorusSampling};
use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(version, about = "Rips persistence barcodes and persistent-entropy feature detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Point file: CSV or whitespace-separated rows, '#' lines skipped.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Sample a circle: COUNT[,RADIUS] (radius defaults to 2).
    #[arg(long, value_name = "COUNT[,RADIUS]")]
    circle: Option<String>,
    /// Sample a torus: COUNT[,MAJOR,MINOR] (radii default to 2 and 1).
    #[arg(long, value_name = "COUNT[,MAJOR,MINOR]")]
    torus: Option<String>,
    /// Torus point placement: "stratified" (jittered grid) or "uniform" angles.
    #[arg(long, default_value = "stratified", value_name = "MODE")]
    torus_sampling: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a sampled point cloud as CSV.
    Sample {
        #[arg(long, value_name = "COUNT[,RADIUS]", conflicts_with = "torus", required_unless_present = "torus")]
        circle: Option<String>,
        #[arg(long, value_name = "COUNT[,MAJOR,MINOR]")]
        torus: Option<String>,
        /// Torus point placement: "stratified" (jittered grid) or "uniform" angles.
        #[arg(long, default_value = "stratified", value_name = "MODE")]
        torus_sampling: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the Rips filtration, compute the barcode and classify it.
    Analyze {
        #[command(flatten)]
        source: Source,
        /// Largest simplex dimension (default 2; 3 for --torus).
        #[arg(long)]
        max_dim: Option<usize>,
        /// Filtration cap on the radius scale, or "full" (default; 0.9 for --torus).
        #[arg(long)]
        threshold: Option<String>,
        /// Classify each homology dimension separately.
        #[arg(long)]
        per_dim: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "table")]
        format: String,
        /// Maximum number of simplices.
        #[arg(long, default_value_t = DEFAULT_SIMPLEX_BUDGET)]
        budget: usize,
        /// Where to write the barcode file.
        #[arg(long)]
        barcode: Option<PathBuf>,
        /// Where to write the report; stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write (birth, death, dim, flag) rows for plotting.
        #[arg(long)]
        dump_plot: Option<PathBuf>,
        /// Write the filtered complex, one simplex per line.
        #[arg(long)]
        dump_complex: Option<PathBuf>,
    },
    /// Classify the intervals of an existing barcode file.
    ClassifyBarcode {
        barcode: PathBuf,
        #[arg(long)]
        per_dim: bool,
        #[arg(long, default_value = "table")]
        format: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Sample { circle, torus, torus_sampling, seed, out } => {
            let mode = torus_sampling.parse::<TorusSampling>()?;
            let spec = match (circle, torus) {
                (Some(c), _) => SampleSpec::parse_circle(&c)?,
                (None, Some(t)) => SampleSpec::parse_torus(&t)?.with_sampling(mode),
                (None, None) => unreachable!("clap requires one sampler"),
            };
            let (cloud, diameter) = cmd_sample(&spec, seed, out.as_deref())?;
            if out.is_none() {
                print!("{}", cloud.to_csv());
            }
            eprintln!("points={} diameter={diameter}", cloud.len());
        }
        Command::Analyze {
            source,
            max_dim,
            threshold,
            per_dim,
            seed,
            format,
            budget,
            barcode,
            report,
            dump_plot,
            dump_complex,
        } => {
            let mode = source.torus_sampling.parse::<TorusSampling>()?;
            let input = match (source.input, source.circle, source.torus) {
                (Some(p), _, _) => InputSource::File(p),
                (_, Some(c), _) => InputSource::Sample(SampleSpec::parse_circle(&c)?),
                (_, _, Some(t)) => InputSource::Sample(SampleSpec::parse_torus(&t)?.with_sampling(mode)),
                _ => unreachable!("clap requires one input source"),
            };
            let mut cfg = RunConfig::new(input);
            if let Some(d) = max_dim {
                cfg.max_dim = d;
            }
            if let Some(t) = threshold {
                cfg.threshold = t.parse::<Threshold>()?;
            }
            cfg.per_dim = per_dim;
            cfg.seed = seed;
            cfg.format = format.parse::<ReportFormat>()?;
            cfg.budget = budget;
            cfg.barcode_out = barcode;
            cfg.report_out = report;
            cfg.plot_out = dump_plot;
            cfg.complex_out = dump_complex;
            let (analysis, rendered) = cmd_analyze(&cfg)?;
            if cfg.report_out.is_none() {
                print!("{rendered}");
            }
            eprintln!(
                "points={} diameter={} simplices={} intervals={} features={}",
                analysis.points,
                analysis.diameter,
                analysis.simplex_count,
                analysis.barcode.len(),
                analysis.feature_count()
            );
        }
        Command::ClassifyBarcode { barcode, per_dim, format, report } => {
            let format = format.parse::<ReportFormat>()?;
            let (_, rendered) = cmd_classify_barcode(&barcode, per_dim, format, report.as_deref())?;
            if report.is_none() {
                print!("{rendered}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.class().exit_code() as u8)
        }
    }
}
