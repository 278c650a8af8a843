//! Point clouds: parsing, seeded samplers and the Euclidean distance matrix.

use std::f64::consts::TAU;
use std::fmt;
use std::fmt::Write as _;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Name of the generator behind the samplers in this module.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng (rand_chacha 0.3, seed_from_u64)";

/// A finite, non-empty set of points in `R^n`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from rows of equal length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyInput)?;
        let dim = first.as_ref().len();
        let mut coords = Vec::with_capacity(dim * rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::RaggedRow {
                    row: i + 1,
                    expected: dim,
                    found: row.len(),
                });
            }
            coords.extend_from_slice(row);
        }
        Self::from_flat(coords, dim)
    }

    /// Builds a cloud from a flat row-major buffer of `len * dim` coordinates.
    pub fn from_flat(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidCloud("points must have dimension >= 1".into()));
        }
        if coords.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidCloud(format!(
                "{} coordinates do not divide into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim + 1,
                field: pos % dim + 1,
            });
        }
        Ok(Self { dim, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false; a cloud holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Renders the cloud as comma-separated rows with full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for p in self.points() {
            for (j, c) in p.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{c:?}");
            }
            out.push('\n');
        }
        out
    }
}

/// Field separator of a point file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointFormat {
    Csv,
    Whitespace,
}

impl PointFormat {
    /// Guesses the format from the first data line: commas mean CSV.
    pub fn detect(text: &str) -> Self {
        let first = text
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty() && !l.starts_with('#'));
        match first {
            Some(l) if l.contains(',') => PointFormat::Csv,
            _ => PointFormat::Whitespace,
        }
    }
}

/// Parses one point per line. Lines starting with `#` and blank lines are
/// skipped; errors carry the 1-based line number.
pub fn load_points<R: BufRead>(source: R, format: PointFormat) -> Result<PointCloud> {
    let mut coords = Vec::new();
    let mut dim = None;
    for (idx, line) in source.lines().enumerate() {
        let row = idx + 1;
        let line = line.map_err(|e| Error::io("<points>", e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = match format {
            PointFormat::Csv => line.split(',').map(str::trim).collect(),
            PointFormat::Whitespace => line.split_whitespace().collect(),
        };
        let expected = *dim.get_or_insert(fields.len());
        if fields.len() != expected {
            return Err(Error::RaggedRow {
                row,
                expected,
                found: fields.len(),
            });
        }
        for (j, text) in fields.iter().enumerate() {
            let value: f64 = text.parse().map_err(|_| Error::NonNumeric {
                row,
                field: j + 1,
                text: text.to_string(),
            })?;
            if !value.is_finite() {
                return Err(Error::NonFinite { row, field: j + 1 });
            }
            coords.push(value);
        }
    }
    match dim {
        Some(d) => PointCloud::from_flat(coords, d),
        None => Err(Error::EmptyInput),
    }
}

/// `count` points on the circle of the given radius, angles uniform on `[0, 2pi)`.
pub fn sample_circle(count: usize, radius: f64, seed: u64) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::InvalidParameter("circle point count must be >= 1".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "circle radius must be positive, got {radius}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(2 * count);
    for _ in 0..count {
        let theta = rng.gen::<f64>() * TAU;
        coords.push(radius * theta.cos());
        coords.push(radius * theta.sin());
    }
    PointCloud::from_flat(coords, 2)
}

/// `count` points on the torus of revolution about the z-axis with tube
/// centre radius `major` and tube radius `minor`. Both angles are drawn
/// uniformly, so points are not area-uniform on the surface.
pub fn sample_torus(count: usize, major: f64, minor: f64, seed: u64) -> Result<PointCloud> {
    check_torus(count, major, minor)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(3 * count);
    for _ in 0..count {
        let theta = rng.gen::<f64>() * TAU;
        let phi = rng.gen::<f64>() * TAU;
        push_torus_point(&mut coords, major, minor, theta, phi);
    }
    PointCloud::from_flat(coords, 3)
}

/// How torus points are placed on the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TorusSampling {
    /// Both angles independent and uniform ([`sample_torus`]).
    Uniform,
    /// Area-balanced jittered grid ([`sample_torus_stratified`]).
    #[default]
    Stratified,
}

impl TorusSampling {
    pub fn name(self) -> &'static str {
        match self {
            TorusSampling::Uniform => "uniform",
            TorusSampling::Stratified => "stratified",
        }
    }
}

impl std::str::FromStr for TorusSampling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(TorusSampling::Uniform),
            "stratified" => Ok(TorusSampling::Stratified),
            _ => Err(Error::InvalidParameter(format!(
                "unknown torus sampling {s:?}, expected uniform or stratified"
            ))),
        }
    }
}

impl fmt::Display for TorusSampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fraction of a grid cell over which [`sample_torus_stratified`] jitters
/// each point about the cell centre, per angle.
pub const TORUS_JITTER: f64 = 0.5;

/// `count` points on the same torus as [`sample_torus`], spread evenly by
/// area: the tube angle is cut into rings of roughly square cells whose
/// point counts follow the ring circumference, and each point is jittered
/// about its cell centre by up to half of [`TORUS_JITTER`] of a cell.
pub fn sample_torus_stratified(
    count: usize,
    major: f64,
    minor: f64,
    seed: u64,
) -> Result<PointCloud> {
    check_torus(count, major, minor)?;
    let spacing = (TAU * TAU * major * minor / count as f64).sqrt();
    let rings = ((TAU * minor / spacing).round() as usize).clamp(1, count);
    let centre = |j: usize| (j as f64 + 0.5) * TAU / rings as f64;
    let weights: Vec<f64> = (0..rings).map(|j| major + minor * centre(j).cos()).collect();
    let sizes = apportion(count, &weights);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(3 * count);
    for (j, &size) in sizes.iter().enumerate() {
        for i in 0..size {
            let du = TORUS_JITTER * (rng.gen::<f64>() - 0.5);
            let dv = TORUS_JITTER * (rng.gen::<f64>() - 0.5);
            let theta = (i as f64 + 0.5 + du) * TAU / size as f64;
            let phi = (j as f64 + 0.5 + dv) * TAU / rings as f64;
            push_torus_point(&mut coords, major, minor, theta, phi);
        }
    }
    PointCloud::from_flat(coords, 3)
}

/// Splits `total` into integer parts proportional to `weights` by largest
/// remainder; ties go to the lower index.
fn apportion(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut parts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    let missing = total - parts.iter().sum::<usize>();
    for &k in order.iter().take(missing) {
        parts[k] += 1;
    }
    parts
}

fn check_torus(count: usize, major: f64, minor: f64) -> Result<()> {
    if count == 0 {
        return Err(Error::InvalidParameter("torus point count must be >= 1".into()));
    }
    if !(minor > 0.0 && major > minor && major.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "torus radii must satisfy major > minor > 0, got {major} and {minor}"
        )));
    }
    Ok(())
}

fn push_torus_point(coords: &mut Vec<f64>, major: f64, minor: f64, theta: f64, phi: f64) {
    let ring = major + minor * phi.cos();
    coords.push(ring * theta.cos());
    coords.push(ring * theta.sin());
    coords.push(minor * phi.sin());
}

/// Symmetric matrix of pairwise Euclidean distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    /// Largest pairwise distance; zero for a single point.
    pub fn diameter(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }
}

pub fn distance_matrix(cloud: &PointCloud) -> DistanceMatrix {
    let n = cloud.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        let p = cloud.point(i);
        for j in (i + 1)..n {
            let q = cloud.point(j);
            let d = p
                .iter()
                .zip(q)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    DistanceMatrix { size: n, entries }
}

pub fn diameter(m: &DistanceMatrix) -> f64 {
    m.diameter()
}
