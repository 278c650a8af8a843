//! End-to-end runs: point source, Rips filtration, barcode, entropy reports.
//!
//! Everything here computes first and writes last, so a failing run leaves
//! no partial output files behind.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufReader, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::{info, warn};

use crate::entropy::{classify, lengths_from_barcode, render_report, EntropyReport, ReportFormat};
use crate::error::{Error, Result};
use crate::filtration::{build_rips, RipsOptions, Threshold, DEFAULT_SIMPLEX_BUDGET};
use crate::persistence::{apply_essential_cap, compute_barcode, read_barcode, Barcode};
use crate::pointcloud::{
    distance_matrix, load_points, sample_circle, sample_torus, sample_torus_stratified, PointCloud, TorusSampling, PointFormat, RNG_ALGORITHM,
};

/// Default radius of `--circle` samples.
pub const CIRCLE_DEFAULT_RADIUS: f64 = 2.0;
pub const TORUS_DEFAULT_MAJOR: f64 = 2.0;
pub const TORUS_DEFAULT_MINOR: f64 = 1.0;
/// Simplex dimension used for torus samples unless overridden.
pub const TORUS_DEFAULT_MAX_DIM: usize = 3;
/// Filtration cap for torus samples unless overridden. Large enough for both
/// tunnels and the void to be born; essential classes end here.
pub const TORUS_DEFAULT_THRESHOLD: f64 = 0.9;
pub const DEFAULT_MAX_DIM: usize = 2;

const CONVENTION: &str = "simplex value = max pairwise distance / 2; essential death = diameter / 2 (full) or threshold";

/// A generated point set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleSpec {
    Circle { count: usize, radius: f64 },
    Torus { count: usize, major: f64, minor: f64, sampling: TorusSampling },
}

impl SampleSpec {
    /// Parses `COUNT[,RADIUS]` for a circle.
    pub fn parse_circle(s: &str) -> Result<Self> {
        let nums = parse_list(s, "circle")?;
        let spec = match nums.as_slice() {
            [count] => SampleSpec::Circle {
                count: to_count(*count)?,
                radius: CIRCLE_DEFAULT_RADIUS,
            },
            [count, radius] => SampleSpec::Circle {
                count: to_count(*count)?,
                radius: *radius,
            },
            _ => return Err(spec_error(s, "circle", "COUNT[,RADIUS]")),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Parses `COUNT[,MAJOR,MINOR]` for a torus.
    pub fn parse_torus(s: &str) -> Result<Self> {
        let nums = parse_list(s, "torus")?;
        let spec = match nums.as_slice() {
            [count] => SampleSpec::Torus {
                count: to_count(*count)?,
                major: TORUS_DEFAULT_MAJOR,
                minor: TORUS_DEFAULT_MINOR,
                sampling: TorusSampling::default(),
            },
            [count, major, minor] => SampleSpec::Torus {
                count: to_count(*count)?,
                major: *major,
                minor: *minor,
                sampling: TorusSampling::default(),
            },
            _ => return Err(spec_error(s, "torus", "COUNT[,MAJOR,MINOR]")),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The same spec with a different torus sampling mode; circles are unchanged.
    pub fn with_sampling(self, mode: TorusSampling) -> Self {
        match self {
            SampleSpec::Torus { count, major, minor, .. } => SampleSpec::Torus { count, major, minor, sampling: mode },
            other => other,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            SampleSpec::Circle { count, radius } => {
                if count == 0 || radius.is_nan() || radius <= 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "circle needs count >= 1 and radius > 0, got {count} and {radius}"
                    )));
                }
            }
            SampleSpec::Torus { count, major, minor, .. } => {
                if count == 0 || !(minor > 0.0 && major > minor) {
                    return Err(Error::InvalidParameter(format!(
                        "torus needs count >= 1 and major > minor > 0, got {count}, {major}, {minor}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, seed: u64) -> Result<PointCloud> {
        match *self {
            SampleSpec::Circle { count, radius } => sample_circle(count, radius, seed),
            SampleSpec::Torus { count, major, minor, sampling } => match sampling {
                TorusSampling::Uniform => sample_torus(count, major, minor, seed),
                TorusSampling::Stratified => sample_torus_stratified(count, major, minor, seed),
            },
        }
    }

    fn describe(&self) -> String {
        match *self {
            SampleSpec::Circle { count, radius } => format!("circle({count},{radius:?})"),
            SampleSpec::Torus { count, major, minor, sampling } => {
                format!("torus({count},{major:?},{minor:?},{sampling})")
            }
        }
    }
}

fn parse_list(s: &str, kind: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| spec_error(s, kind, if kind == "circle" { "COUNT[,RADIUS]" } else { "COUNT[,MAJOR,MINOR]" }))
}

fn to_count(x: f64) -> Result<usize> {
    if x.fract() != 0.0 || x < 1.0 || x > u32::MAX as f64 {
        return Err(Error::InvalidParameter(format!("point count must be a positive integer, got {x}")));
    }
    Ok(x as usize)
}

fn spec_error(s: &str, kind: &str, syntax: &str) -> Error {
    Error::InvalidParameter(format!("bad {kind} spec {s:?}, expected {syntax}"))
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSource {
    File(PathBuf),
    Sample(SampleSpec),
}

/// Everything one `analyze` run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: InputSource,
    pub max_dim: usize,
    pub threshold: Threshold,
    pub per_dim: bool,
    pub seed: u64,
    pub format: ReportFormat,
    pub budget: usize,
    pub barcode_out: Option<PathBuf>,
    pub report_out: Option<PathBuf>,
    pub plot_out: Option<PathBuf>,
    pub complex_out: Option<PathBuf>,
}

impl RunConfig {
    /// Defaults for `input`: torus samples get the torus dimension and threshold.
    pub fn new(input: InputSource) -> Self {
        let torus = matches!(input, InputSource::Sample(SampleSpec::Torus { .. }));
        Self {
            input,
            max_dim: if torus { TORUS_DEFAULT_MAX_DIM } else { DEFAULT_MAX_DIM },
            threshold: if torus {
                Threshold::Value(TORUS_DEFAULT_THRESHOLD)
            } else {
                Threshold::Full
            },
            per_dim: false,
            seed: 0,
            format: ReportFormat::Table,
            budget: DEFAULT_SIMPLEX_BUDGET,
            barcode_out: None,
            report_out: None,
            plot_out: None,
            complex_out: None,
        }
    }
}

/// Results of a run, before anything is written.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub points: usize,
    pub diameter: f64,
    pub simplex_count: usize,
    pub barcode: Barcode,
    pub reports: Vec<EntropyReport>,
    pub complex_dump: Option<String>,
}

impl Analysis {
    pub fn feature_count(&self) -> usize {
        self.reports.iter().map(EntropyReport::feature_count).sum()
    }
}

pub fn load_point_file(path: &Path) -> Result<PointCloud> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    load_points(BufReader::new(text.as_bytes()), PointFormat::detect(&text))
}

pub fn load_barcode_file(path: &Path) -> Result<Barcode> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_barcode(BufReader::new(file))
}

/// Classifies the combined barcode, or each dimension separately when
/// `per_dim` is set. Dimensions with only zero-length intervals are skipped
/// in per-dimension mode.
pub fn classify_barcode(barcode: &Barcode, per_dim: bool) -> Result<Vec<EntropyReport>> {
    if !per_dim {
        return Ok(vec![classify(&lengths_from_barcode(barcode, None)?)]);
    }
    let mut reports = Vec::new();
    for dim in barcode.dims() {
        match lengths_from_barcode(barcode, Some(dim)) {
            Ok(list) => {
                let mut report = classify(&list);
                report.dim = Some(dim);
                reports.push(report);
            }
            Err(Error::DegenerateBarcode(msg)) => warn!("skipping dimension {dim}: {msg}"),
            Err(e) => return Err(e),
        }
    }
    if reports.is_empty() {
        return Err(Error::DegenerateBarcode("no dimension has an interval of positive length".into()));
    }
    Ok(reports)
}

fn barcode_metadata(barcode: &Barcode) -> Vec<(String, String)> {
    vec![
        ("cap".into(), barcode.cap.map_or("none".into(), |c| format!("{c:?}"))),
        ("threshold".into(), barcode.meta.threshold.to_string()),
        ("points".into(), barcode.meta.points.to_string()),
    ]
}

/// Runs the whole pipeline in memory.
pub fn analyze(cfg: &RunConfig) -> Result<Analysis> {
    let cloud = match &cfg.input {
        InputSource::File(path) => load_point_file(path)?,
        InputSource::Sample(spec) => spec.sample(cfg.seed)?,
    };
    let matrix = distance_matrix(&cloud);
    let options = RipsOptions {
        max_dim: cfg.max_dim,
        threshold: cfg.threshold,
        budget: cfg.budget,
    };
    let complex = build_rips(&matrix, &options)?;
    info!(
        "{} points, diameter {:.6}, {} simplices {:?}",
        cloud.len(),
        complex.diameter(),
        complex.len(),
        complex.counts_by_dim()
    );
    let raw = compute_barcode(&complex);
    let barcode = apply_essential_cap(&raw, complex.diameter(), cfg.threshold);
    let mut reports = classify_barcode(&barcode, cfg.per_dim)?;

    let input = match &cfg.input {
        InputSource::File(path) => path.display().to_string(),
        InputSource::Sample(spec) => spec.describe(),
    };
    for report in &mut reports {
        let md = &mut report.metadata;
        md.extend(barcode_metadata(&barcode));
        md.insert("input".into(), input.clone());
        md.insert("seed".into(), cfg.seed.to_string());
        md.insert("rng".into(), RNG_ALGORITHM.into());
        md.insert("max_dim".into(), cfg.max_dim.to_string());
        md.insert("budget".into(), cfg.budget.to_string());
        md.insert("simplices".into(), complex.len().to_string());
        md.insert("diameter".into(), format!("{:?}", complex.diameter()));
        md.insert("convention".into(), CONVENTION.into());
    }

    Ok(Analysis {
        points: cloud.len(),
        diameter: complex.diameter(),
        simplex_count: complex.len(),
        complex_dump: cfg.complex_out.as_ref().map(|_| complex.dump()),
        barcode,
        reports,
    })
}

/// Renders one report, or one section per dimension. JSON output is an
/// object for a single report and an array otherwise.
pub fn render_reports(reports: &[EntropyReport], format: ReportFormat, per_dim: bool) -> Result<String> {
    if format == ReportFormat::Json && per_dim {
        let mut out = serde_json::to_string_pretty(reports)?;
        out.push('\n');
        return Ok(out);
    }
    let mut out = String::new();
    for (k, report) in reports.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        out.push_str(&render_report(report, format)?);
    }
    Ok(out)
}

/// `birth death dim flag` for every barcode interval; zero-length intervals
/// are flagged `zero`.
pub fn plot_rows(barcode: &Barcode, reports: &[EntropyReport]) -> String {
    let mut claimed = vec![false; reports.iter().map(|r| r.rows.len()).sum()];
    let rows: Vec<_> = reports.iter().flat_map(|r| r.rows.iter()).collect();
    let mut out = String::from("# birth death dim feature\n");
    for iv in &barcode.intervals {
        let flag = if iv.length() <= 0.0 {
            "zero"
        } else {
            let hit = rows.iter().enumerate().position(|(k, row)| {
                !claimed[k]
                    && row
                        .interval
                        .is_some_and(|r| r.dim == iv.dim && r.birth == iv.birth && r.death == iv.death)
            });
            match hit {
                Some(k) => {
                    claimed[k] = true;
                    if rows[k].feature {
                        "yes"
                    } else {
                        "no"
                    }
                }
                None => "unclassified",
            }
        };
        let _ = writeln!(out, "{:.16e} {:.16e} {} {}", iv.birth, iv.death, iv.dim, flag);
    }
    out
}

/// Writes `contents` through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(path, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// Runs [`analyze`] and writes every requested output. The rendered report
/// is returned so callers can print it when no report path was given.
pub fn cmd_analyze(cfg: &RunConfig) -> Result<(Analysis, String)> {
    let analysis = analyze(cfg)?;
    let report = render_reports(&analysis.reports, cfg.format, cfg.per_dim)?;
    let mut outputs: Vec<(&Path, String)> = Vec::new();
    if let Some(p) = &cfg.barcode_out {
        outputs.push((p, analysis.barcode.to_text()));
    }
    if let Some(p) = &cfg.report_out {
        outputs.push((p, report.clone()));
    }
    if let Some(p) = &cfg.plot_out {
        outputs.push((p, plot_rows(&analysis.barcode, &analysis.reports)));
    }
    if let (Some(p), Some(dump)) = (&cfg.complex_out, &analysis.complex_dump) {
        outputs.push((p, dump.clone()));
    }
    for (path, contents) in outputs {
        write_atomic(path, &contents)?;
    }
    Ok((analysis, report))
}

/// Classifies an existing barcode file without recomputing persistence.
pub fn cmd_classify_barcode(
    path: &Path,
    per_dim: bool,
    format: ReportFormat,
    out: Option<&Path>,
) -> Result<(Vec<EntropyReport>, String)> {
    let barcode = load_barcode_file(path)?;
    let mut reports = classify_barcode(&barcode, per_dim)?;
    for report in &mut reports {
        report.metadata.extend(barcode_metadata(&barcode));
        report.metadata.insert("input".into(), path.display().to_string());
    }
    let rendered = render_reports(&reports, format, per_dim)?;
    if let Some(p) = out {
        write_atomic(p, &rendered)?;
    }
    Ok((reports, rendered))
}

/// Samples a cloud and writes it as CSV. Returns the cloud and its diameter.
pub fn cmd_sample(spec: &SampleSpec, seed: u64, out: Option<&Path>) -> Result<(PointCloud, f64)> {
    let cloud = spec.sample(seed)?;
    let diameter = distance_matrix(&cloud).diameter();
    if let Some(p) = out {
        write_atomic(p, &cloud.to_csv())?;
    }
    Ok((cloud, diameter))
}

impl FromStr for SampleSpec {
    type Err = Error;

    /// `circle:COUNT[,RADIUS]` or `torus:COUNT[,MAJOR,MINOR]`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some(("circle", rest)) => SampleSpec::parse_circle(rest),
            Some(("torus", rest)) => SampleSpec::parse_torus(rest),
            _ => Err(Error::InvalidParameter(format!(
                "bad sample spec {s:?}, expected circle:COUNT[,RADIUS] or torus:COUNT[,MAJOR,MINOR]"
            ))),
        }
    }
}
