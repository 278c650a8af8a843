//! Persistence barcodes by boundary-matrix reduction over Z/2.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::filtration::{FilteredComplex, Threshold};
use crate::z2::BitMatrix;

/// A half-open interval `[birth, death)` in homology dimension `dim`.
///
/// Essential classes of an uncapped barcode have `death == f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub dim: usize,
    pub birth: f64,
    pub death: f64,
}

impl Interval {
    pub fn length(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    /// Whether the class is alive at scale `t`.
    pub fn contains(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarcodeMeta {
    pub threshold: Threshold,
    /// Largest simplex dimension of the source complex, when known.
    pub max_dim: Option<usize>,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Barcode {
    pub intervals: Vec<Interval>,
    /// Death value substituted for essential classes; `None` until capped.
    pub cap: Option<f64>,
    pub meta: BarcodeMeta,
}

impl Barcode {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self.intervals.iter().map(|i| i.dim).collect();
        dims.sort_unstable();
        dims.dedup();
        dims
    }

    /// Number of intervals of dimension `dim` alive at `t`.
    pub fn rank_at(&self, dim: usize, t: f64) -> usize {
        self.intervals
            .iter()
            .filter(|i| i.dim == dim && i.contains(t))
            .count()
    }

    /// Serializes as a `# cap=.. threshold=.. points=..` header followed by
    /// `dim birth death` lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let cap = self.cap.unwrap_or(f64::INFINITY);
        let _ = writeln!(
            out,
            "# cap={} threshold={} points={}",
            fmt_num(cap),
            self.meta.threshold,
            self.meta.points
        );
        for i in &self.intervals {
            let _ = writeln!(out, "{} {} {}", i.dim, fmt_num(i.birth), fmt_num(i.death));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        read_barcode(text.as_bytes())
    }
}

fn fmt_num(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Parses the format written by [`Barcode::to_text`]. The header is
/// optional so hand-written or external barcodes can be read: without it
/// the cap is unknown, the threshold is "full" and the point count is 0.
/// Other `#` lines and unknown header keys are ignored.
pub fn read_barcode<R: BufRead>(source: R) -> Result<Barcode> {
    let malformed = |line: usize, message: String| Error::MalformedBarcode { line, message };
    let (mut cap, mut threshold, mut points) = (None, Threshold::Full, 0);
    let mut intervals = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io("<barcode>", e))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            for field in rest.split_whitespace() {
                let Some((key, value)) = field.split_once('=') else {
                    continue;
                };
                match key {
                    "cap" => {
                        let v = parse_num(value).ok_or_else(|| malformed(lineno, format!("bad cap {value:?}")))?;
                        cap = v.is_finite().then_some(v);
                    }
                    "threshold" => {
                        threshold = value.parse::<Threshold>().map_err(|e| malformed(lineno, e.to_string()))?;
                    }
                    "points" => {
                        points = value
                            .parse::<usize>()
                            .map_err(|_| malformed(lineno, format!("bad point count {value:?}")))?;
                    }
                    _ => {}
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(malformed(lineno, format!("expected \"dim birth death\", found {} fields", fields.len())));
        }
        let dim = fields[0]
            .parse::<usize>()
            .map_err(|_| malformed(lineno, format!("bad dimension {:?}", fields[0])))?;
        let birth = parse_num(fields[1])
            .filter(|b| b.is_finite())
            .ok_or_else(|| malformed(lineno, format!("bad birth {:?}", fields[1])))?;
        let death = parse_num(fields[2]).ok_or_else(|| malformed(lineno, format!("bad death {:?}", fields[2])))?;
        if !(birth >= 0.0 && death >= birth) {
            return Err(malformed(lineno, format!("need 0 <= birth <= death, got [{birth}, {death})")));
        }
        intervals.push(Interval { dim, birth, death });
    }
    Ok(Barcode {
        intervals,
        cap,
        meta: BarcodeMeta {
            threshold,
            max_dim: None,
            points,
        },
    })
}

fn parse_num(s: &str) -> Option<f64> {
    match s {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        _ => s.parse::<f64>().ok().filter(|v| !v.is_nan()),
    }
}

/// Column reduction strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Left-to-right over all columns.
    Standard,
    /// Highest dimension first, zeroing columns known to be positive
    /// ("clearing"). Produces the same pairing as `Standard`.
    #[default]
    Twist,
}

/// Simplex indices (positions in filtration order) paired by the reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    /// `(birth, death)` pairs, sorted by birth.
    pub pairs: Vec<(usize, usize)>,
    /// Unpaired positive simplices, ascending.
    pub essential: Vec<usize>,
}

const NONE: u32 = u32::MAX;

/// Sparse boundary matrix: column `j` lists the positions of the facets of
/// simplex `j`, ascending.
fn boundary_columns(fc: &FilteredComplex) -> Vec<Vec<u32>> {
    let simplices = fc.simplices();
    // per dimension, positions sorted by vertex list, for facet lookup
    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); fc.max_dim() + 1];
    for (pos, s) in simplices.iter().enumerate() {
        by_dim[s.simplex.dim()].push(pos as u32);
    }
    for list in &mut by_dim {
        list.sort_unstable_by(|&a, &b| {
            simplices[a as usize]
                .simplex
                .vertices()
                .cmp(simplices[b as usize].simplex.vertices())
        });
    }
    let mut facet = Vec::with_capacity(fc.max_dim() + 1);
    simplices
        .iter()
        .map(|s| {
            let verts = s.simplex.vertices();
            let dim = verts.len() - 1;
            if dim == 0 {
                return Vec::new();
            }
            let lookup = &by_dim[dim - 1];
            let mut col: Vec<u32> = (0..verts.len())
                .map(|skip| {
                    facet.clear();
                    facet.extend(verts.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v));
                    let at = lookup
                        .binary_search_by(|&p| simplices[p as usize].simplex.vertices().cmp(&facet))
                        .expect("filtered complex is closed under faces");
                    lookup[at]
                })
                .collect();
            col.sort_unstable();
            col
        })
        .collect()
}

/// Symmetric difference of two ascending index lists.
fn add_columns(target: &[u32], source: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < source.len() {
        match target[i].cmp(&source[j]) {
            std::cmp::Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(source[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&target[i..]);
    out.extend_from_slice(&source[j..]);
}

struct Reducer {
    columns: Vec<Vec<u32>>,
    /// pivot_of[row] = column whose lowest entry is `row`
    pivot_of: Vec<u32>,
    scratch: Vec<u32>,
}

impl Reducer {
    fn reduce_column(&mut self, j: usize) {
        while let Some(&low) = self.columns[j].last() {
            let k = self.pivot_of[low as usize];
            if k == NONE {
                self.pivot_of[low as usize] = j as u32;
                return;
            }
            add_columns(&self.columns[j], &self.columns[k as usize], &mut self.scratch);
            std::mem::swap(&mut self.columns[j], &mut self.scratch);
        }
    }
}

/// Pairs every simplex of `fc` with the standard persistence algorithm.
pub fn compute_pairing(fc: &FilteredComplex, reduction: Reduction) -> Pairing {
    let n = fc.len();
    let mut r = Reducer {
        columns: boundary_columns(fc),
        pivot_of: vec![NONE; n],
        scratch: Vec::new(),
    };
    match reduction {
        Reduction::Standard => {
            for j in 0..n {
                r.reduce_column(j);
            }
        }
        Reduction::Twist => {
            let mut by_dim: Vec<Vec<usize>> = vec![Vec::new(); fc.max_dim() + 1];
            for (pos, s) in fc.simplices().iter().enumerate() {
                by_dim[s.simplex.dim()].push(pos);
            }
            for dim in (1..by_dim.len()).rev() {
                for &j in &by_dim[dim] {
                    if r.columns[j].is_empty() {
                        continue;
                    }
                    r.reduce_column(j);
                    if let Some(&low) = r.columns[j].last() {
                        r.columns[low as usize] = Vec::new();
                    }
                }
            }
        }
    }

    let mut pairs = Vec::new();
    let mut paired = vec![false; n];
    for (j, col) in r.columns.iter().enumerate() {
        if let Some(&low) = col.last() {
            pairs.push((low as usize, j));
            paired[low as usize] = true;
            paired[j] = true;
        }
    }
    pairs.sort_unstable();
    let essential = (0..n).filter(|&i| !paired[i]).collect();
    Pairing { pairs, essential }
}

/// Homology dimensions whose classes are meaningful for a complex truncated
/// at `max_dim`: top-dimensional simplices are never killed.
pub fn reported_dims(max_dim: usize) -> std::ops::Range<usize> {
    0..max_dim.max(1)
}

/// Raw barcode of `fc`: zero-length intervals are kept and essential
/// classes have infinite death. Only dimensions in [`reported_dims`] appear.
pub fn compute_barcode(fc: &FilteredComplex) -> Barcode {
    compute_barcode_with(fc, Reduction::default())
}

pub fn compute_barcode_with(fc: &FilteredComplex, reduction: Reduction) -> Barcode {
    let pairing = compute_pairing(fc, reduction);
    let simplices = fc.simplices();
    let dims = reported_dims(fc.max_dim());
    let mut intervals: Vec<Interval> = pairing
        .pairs
        .iter()
        .map(|&(b, d)| Interval {
            dim: simplices[b].simplex.dim(),
            birth: simplices[b].value,
            death: simplices[d].value,
        })
        .chain(pairing.essential.iter().map(|&b| Interval {
            dim: simplices[b].simplex.dim(),
            birth: simplices[b].value,
            death: f64::INFINITY,
        }))
        .filter(|i| dims.contains(&i.dim))
        .collect();
    sort_intervals(&mut intervals);
    Barcode {
        intervals,
        cap: None,
        meta: BarcodeMeta {
            threshold: fc.threshold(),
            max_dim: Some(fc.max_dim()),
            points: fc.point_count(),
        },
    }
}

pub(crate) fn sort_intervals(intervals: &mut [Interval]) {
    intervals.sort_by(|a, b| {
        a.dim
            .cmp(&b.dim)
            .then(a.birth.total_cmp(&b.birth))
            .then(a.death.total_cmp(&b.death))
    });
}

/// Replaces infinite deaths by `diameter / 2` for a full filtration, or by
/// the threshold value for a truncated one.
pub fn apply_essential_cap(raw: &Barcode, diameter: f64, threshold: Threshold) -> Barcode {
    let cap = threshold.resolve(diameter);
    let mut intervals: Vec<Interval> = raw
        .intervals
        .iter()
        .map(|&i| Interval {
            death: if i.is_essential() { cap } else { i.death },
            ..i
        })
        .collect();
    sort_intervals(&mut intervals);
    Barcode {
        intervals,
        cap: Some(cap),
        meta: BarcodeMeta { threshold, ..raw.meta },
    }
}

/// Betti numbers of the subcomplex `K(t)` in dimensions `0..=max_dim`, from
/// ranks of its boundary matrices. Independent of the reduction above.
pub fn betti_numbers_at(fc: &FilteredComplex, t: f64) -> Vec<usize> {
    let top = fc.max_dim();
    let mut index: Vec<HashMap<&[u32], usize>> = vec![HashMap::new(); top + 1];
    for s in fc.simplices().iter().filter(|s| s.value <= t) {
        let verts = s.simplex.vertices();
        let map = &mut index[verts.len() - 1];
        let next = map.len();
        map.insert(verts, next);
    }
    let counts: Vec<usize> = index.iter().map(HashMap::len).collect();

    // rank of the boundary map from dimension k to k - 1, for k = 1..=top
    let mut ranks = vec![0usize; top + 2];
    let mut facet = Vec::new();
    for k in 1..=top {
        let mut m = BitMatrix::zeros(counts[k - 1], counts[k]);
        for (verts, &col) in &index[k] {
            for skip in 0..verts.len() {
                facet.clear();
                facet.extend(verts.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
                let row = index[k - 1][facet.as_slice()];
                m.set(row, col);
            }
        }
        ranks[k] = m.rank();
    }
    (0..=top).map(|k| counts[k] - ranks[k] - ranks[k + 1]).collect()
}
