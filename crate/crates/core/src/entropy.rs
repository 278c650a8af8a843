//! Persistent entropy of a barcode and the entropy-based split of its
//! intervals into topological features and noise.
//!
//! For lengths `l_1 >= ... >= l_n` with total `S`, the persistent entropy is
//! `H = -sum (l_i / S) ln(l_i / S)`, which lies in `[0, ln n]`. Among all
//! lists that share a fixed tail, entropy is maximised by giving every free
//! slot the common value `S_tail / exp(H_tail)`. The classifier replaces the
//! `i` longest intervals by that value for `i = 0..=n`, tracks the entropy
//! `Q(i)` of each substituted list, and calls interval `i` a feature when its
//! normalised increment `(Q(i) - Q(i-1)) / (ln n - H)` exceeds `(i - 1) / n`.
//!
//! Logarithms are natural throughout.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::{Barcode, Interval};

/// Below this gap between `ln n` and the entropy all lengths are taken as equal.
pub const DEGENERATE_GAP: f64 = 1e-12;

/// Positive interval lengths sorted non-increasing, with their total.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthList {
    lengths: Vec<f64>,
    total: f64,
    origin: Vec<Option<Interval>>,
    excluded_zero_length: usize,
}

impl LengthList {
    /// Sorts the given lengths; every entry must be positive and finite.
    pub fn new(lengths: impl IntoIterator<Item = f64>) -> Result<Self> {
        let items: Vec<(f64, Option<Interval>)> = lengths.into_iter().map(|l| (l, None)).collect();
        Self::build(items, 0)
    }

    fn build(mut items: Vec<(f64, Option<Interval>)>, excluded_zero_length: usize) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::DegenerateBarcode(
                "no interval of positive length to analyse".into(),
            ));
        }
        if let Some((l, _)) = items.iter().find(|(l, _)| !(*l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "interval lengths must be positive and finite, got {l}"
            )));
        }
        // stable: equal lengths keep their incoming order
        items.sort_by(|a, b| b.0.total_cmp(&a.0));
        let (lengths, origin): (Vec<f64>, Vec<Option<Interval>>) = items.into_iter().unzip();
        let total = lengths.iter().sum();
        Ok(Self {
            lengths,
            total,
            origin,
            excluded_zero_length,
        })
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    /// Always false; a list holds at least one length.
    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Source interval of each length, when the list came from a barcode.
    pub fn origin(&self) -> &[Option<Interval>] {
        &self.origin
    }

    pub fn excluded_zero_length(&self) -> usize {
        self.excluded_zero_length
    }
}

/// Lengths of the intervals of `b` (only dimension `per_dim` when given),
/// with zero-length intervals dropped.
pub fn lengths_from_barcode(b: &Barcode, per_dim: Option<usize>) -> Result<LengthList> {
    let mut items = Vec::new();
    let mut zero = 0;
    for interval in b.intervals.iter().filter(|i| per_dim.is_none_or(|d| i.dim == d)) {
        let length = interval.length();
        if !length.is_finite() {
            return Err(Error::InvalidParameter(
                "barcode has essential intervals without a finite cap".into(),
            ));
        }
        if length <= 0.0 {
            zero += 1;
        } else {
            items.push((length, Some(*interval)));
        }
    }
    if items.is_empty() {
        let scope = match per_dim {
            Some(d) => format!("dimension {d}"),
            None => "the barcode".to_string(),
        };
        return Err(Error::DegenerateBarcode(format!(
            "every interval of {scope} has zero length ({zero} dropped)"
        )));
    }
    LengthList::build(items, zero)
}

/// Term-by-term `-sum p ln p` over `p = l / sum(l)`, left to right.
pub fn entropy_of(lengths: &[f64]) -> f64 {
    let total: f64 = lengths.iter().sum();
    let h: f64 = lengths
        .iter()
        .map(|&l| {
            let p = l / total;
            -p * p.ln()
        })
        .sum();
    h.max(0.0)
}

pub fn persistent_entropy(list: &LengthList) -> f64 {
    entropy_of(&list.lengths)
}

/// Sum and entropy of the suffix `l_i, ..., l_n` (1-based `i`).
pub fn tail_entropy(list: &LengthList, i: usize) -> Result<(f64, f64)> {
    let n = list.len();
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let tail = &list.lengths[i - 1..];
    Ok((tail.iter().sum(), entropy_of(tail)))
}

/// The list `R(i)`: the `i` longest lengths replaced by the value that
/// maximises entropy given the remaining tail. `R(0)` is the list itself
/// and `R(n)` is uniform with the same total.
pub fn max_entropy_substitution(list: &LengthList, i: usize) -> Result<LengthList> {
    let n = list.len();
    if i > n {
        return Err(Error::IndexOutOfRange { index: i, len: n });
    }
    let lengths = match i {
        0 => return Ok(list.clone()),
        _ if i == n => vec![list.total / n as f64; n],
        _ => {
            let (sum, h) = tail_entropy(list, i + 1)?;
            let c = sum / h.exp();
            let mut out = vec![c; i];
            out.extend_from_slice(&list.lengths[i..]);
            out
        }
    };
    let total = lengths.iter().sum();
    Ok(LengthList {
        lengths,
        total,
        origin: list.origin.clone(),
        excluded_zero_length: list.excluded_zero_length,
    })
}

/// Neumaier-compensated running sum.
#[derive(Default, Clone, Copy)]
struct Sum {
    sum: f64,
    comp: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// Entropy of a list with total `s` and `t = sum l ln l`, bounded to `[0, ln count]`.
fn entropy_from_moments(s: f64, t: f64, count: usize) -> f64 {
    (s.ln() - t / s).clamp(0.0, (count as f64).ln())
}

/// One classified interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    /// 1-based rank by decreasing length.
    pub index: usize,
    pub length: f64,
    /// `length / S_L`.
    pub share: f64,
    /// Common value given to the `index` longest intervals in `R(index)`.
    pub substitute: f64,
    /// `substitute / total(R(index))`.
    pub substitute_share: f64,
    /// `Q(index)`, the entropy of `R(index)`.
    pub entropy: f64,
    /// `Q(index) / ln n`.
    pub normalized_entropy: f64,
    /// `(Q(index) - Q(index - 1)) / (ln n - H_L)`.
    pub relative_gain: f64,
    /// `(index - 1) / n`.
    pub threshold: f64,
    pub feature: bool,
    pub interval: Option<IntervalRef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalRef {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl From<Interval> for IntervalRef {
    fn from(i: Interval) -> Self {
        Self {
            dim: i.dim,
            birth: i.birth,
            death: i.death,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub n: usize,
    /// `H_L`, the persistent entropy of the input list.
    pub entropy: f64,
    pub log_n: f64,
    pub total: f64,
    /// Set when only one homology dimension was analysed.
    pub dim: Option<usize>,
    pub excluded_zero_length: usize,
    pub rows: Vec<ReportRow>,
    pub warnings: Vec<String>,
    pub metadata: BTreeMap<String, String>,
}

impl EntropyReport {
    pub fn features(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.feature)
    }

    pub fn feature_count(&self) -> usize {
        self.features().count()
    }

    pub fn flags(&self) -> Vec<bool> {
        self.rows.iter().map(|r| r.feature).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Runs the feature/noise split on `list`.
pub fn classify(list: &LengthList) -> EntropyReport {
    let n = list.len();
    let lengths = list.lengths();
    let total = list.total();
    let log_n = (n as f64).ln();
    let h = persistent_entropy(list);

    // suffix moments: sums[k] = sum of lengths[k..], moments[k] = sum of l ln l
    let mut sums = vec![0.0; n + 1];
    let mut moments = vec![0.0; n + 1];
    let (mut s, mut t) = (Sum::default(), Sum::default());
    for k in (0..n).rev() {
        s.add(lengths[k]);
        t.add(lengths[k] * lengths[k].ln());
        sums[k] = s.value();
        moments[k] = t.value();
    }

    // q[i] = entropy of R(i); substitute value and its share of R(i)
    let mut q = Vec::with_capacity(n + 1);
    let mut subs = Vec::with_capacity(n);
    q.push(h);
    for i in 1..=n {
        if i == n {
            q.push(log_n);
            subs.push((total / n as f64, 1.0 / n as f64));
            continue;
        }
        let tail_h = entropy_from_moments(sums[i], moments[i], n - i);
        let log_c = sums[i].ln() - tail_h;
        let c = log_c.exp();
        let r_total = i as f64 * c + sums[i];
        let r_moment = i as f64 * c * log_c + moments[i];
        q.push(entropy_from_moments(r_total, r_moment, n));
        subs.push((c, c / r_total));
    }

    let gap = log_n - h;
    let mut warnings = Vec::new();
    let single = n == 1;
    let flat = !single && gap < DEGENERATE_GAP;
    if single {
        warnings.push("single interval: flagged as a feature by convention".to_string());
    } else if flat {
        warnings.push(format!(
            "all {n} lengths are equal (ln n - H = {gap:e}); no interval separates, all marked noise"
        ));
    }
    for w in &warnings {
        warn!("{w}");
    }

    let rows = (1..=n)
        .map(|i| {
            let threshold = (i - 1) as f64 / n as f64;
            let relative_gain = if single || flat { 0.0 } else { (q[i] - q[i - 1]) / gap };
            let feature = if single {
                true
            } else if flat {
                false
            } else {
                relative_gain > threshold
            };
            ReportRow {
                index: i,
                length: lengths[i - 1],
                share: lengths[i - 1] / total,
                substitute: subs[i - 1].0,
                substitute_share: subs[i - 1].1,
                entropy: q[i],
                normalized_entropy: if single { 1.0 } else { q[i] / log_n },
                relative_gain,
                threshold,
                feature,
                interval: list.origin()[i - 1].map(IntervalRef::from),
            }
        })
        .collect();

    EntropyReport {
        n,
        entropy: h,
        log_n,
        total,
        dim: None,
        excluded_zero_length: list.excluded_zero_length(),
        rows,
        warnings,
        metadata: BTreeMap::new(),
    }
}

/// Output encodings for [`render_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(ReportFormat::Table),
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Table => "table",
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

/// Ten significant digits, positional notation unless the magnitude is extreme.
fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0.000000000".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..9).contains(&mag) {
        return format!("{x:.9e}");
    }
    format!("{x:.*}", (9 - mag) as usize)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn header_lines(r: &EntropyReport) -> Vec<String> {
    let mut lines = vec![format!(
        "n={} H_L={} ln_n={} total={} excluded_zero_length={}{}",
        r.n,
        sig(r.entropy),
        sig(r.log_n),
        sig(r.total),
        r.excluded_zero_length,
        r.dim.map(|d| format!(" dim={d}")).unwrap_or_default()
    )];
    lines.extend(r.metadata.iter().map(|(k, v)| format!("{k}={v}")));
    lines.extend(r.warnings.iter().map(|w| format!("warning: {w}")));
    lines
}

pub fn render_report(r: &EntropyReport, format: ReportFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        ReportFormat::Json => {
            out = serde_json::to_string_pretty(r)?;
            out.push('\n');
        }
        ReportFormat::Csv => {
            for line in header_lines(r) {
                let _ = writeln!(out, "# {line}");
            }
            out.push_str("i,length,length_share,substitute,substitute_share,normalized_entropy,relative_gain,feature,dim,birth,death\n");
            for row in &r.rows {
                let _ = write!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    row.index,
                    sig(row.length),
                    sig(row.share),
                    sig(row.substitute),
                    sig(row.substitute_share),
                    sig(row.normalized_entropy),
                    sig(row.relative_gain),
                    yes_no(row.feature)
                );
                match row.interval {
                    Some(iv) => {
                        let _ = writeln!(out, ",{},{},{}", iv.dim, sig(iv.birth), sig(iv.death));
                    }
                    None => out.push_str(",,,\n"),
                }
            }
        }
        ReportFormat::Table => {
            for line in header_lines(r) {
                let _ = writeln!(out, "# {line}");
            }
            let _ = writeln!(
                out,
                "{:>5} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14} {:>7} {:>4} {:>14} {:>14}",
                "i", "l_i", "l_i/S_L", "l'_i", "l'_i/S_R(i)", "H_R(i)/ln_n", "H_rel(i)", "feature", "dim", "birth", "death"
            );
            for row in &r.rows {
                let (dim, birth, death) = match row.interval {
                    Some(iv) => (iv.dim.to_string(), sig(iv.birth), sig(iv.death)),
                    None => ("-".into(), "-".into(), "-".into()),
                };
                let _ = writeln!(
                    out,
                    "{:>5} {:>14} {:>14} {:>14} {:>14} {:>14} {:>14} {:>7} {:>4} {:>14} {:>14}",
                    row.index,
                    sig(row.length),
                    sig(row.share),
                    sig(row.substitute),
                    sig(row.substitute_share),
                    sig(row.normalized_entropy),
                    sig(row.relative_gain),
                    yes_no(row.feature),
                    dim,
                    birth,
                    death
                );
            }
        }
    }
    Ok(out)
}
