//! Vietoris-Rips filtrations.
//!
//! A simplex enters the filtration at half of the largest pairwise distance
//! among its vertices: balls of radius `t` around two points meet exactly
//! when the points are at most `2t` apart. Vertices enter at 0.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::pointcloud::DistanceMatrix;

/// Default cap on the number of simplices a filtration may contain.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 10_000_000;

/// Sorted vertex indices of a simplex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(SmallVec<[u32; 4]>);

impl Simplex {
    /// Rejects vertex lists that are empty or not strictly increasing.
    pub fn new(vertices: impl IntoIterator<Item = u32>) -> Result<Self> {
        let v: SmallVec<[u32; 4]> = vertices.into_iter().collect();
        if v.is_empty() {
            return Err(Error::InvalidParameter("a simplex needs at least one vertex".into()));
        }
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "simplex vertices must be strictly increasing, got {v:?}"
            )));
        }
        Ok(Simplex(v))
    }

    pub fn vertices(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces, the `k`-th omitting vertex `k`.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.0.len() > 1 { self.0.len() } else { 0 };
        (0..n).map(move |skip| {
            Simplex(
                self.0
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != skip)
                    .map(|(_, &v)| v)
                    .collect(),
            )
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_char(',')?;
            }
            write!(f, "{v}")?;
        }
        f.write_char('}')
    }
}

/// Upper end of the filtration: an explicit scale or the full complex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Up to half the diameter, where the complex becomes a full simplex.
    Full,
    Value(f64),
}

impl Threshold {
    pub fn resolve(self, diameter: f64) -> f64 {
        match self {
            Threshold::Full => diameter / 2.0,
            Threshold::Value(t) => t,
        }
    }

    pub fn is_full(self) -> bool {
        matches!(self, Threshold::Full)
    }

    fn validate(self) -> Result<()> {
        match self {
            Threshold::Value(t) if !(t > 0.0 && t.is_finite()) => Err(Error::InvalidParameter(
                format!("threshold must be positive and finite, got {t}"),
            )),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Full => f.write_str("full"),
            Threshold::Value(t) => write!(f, "{t:?}"),
        }
    }
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("full") {
            return Ok(Threshold::Full);
        }
        let t: f64 = s
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("threshold {s:?} is neither a number nor \"full\"")))?;
        let t = Threshold::Value(t);
        t.validate()?;
        Ok(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipsOptions {
    /// Largest simplex dimension to build.
    pub max_dim: usize,
    pub threshold: Threshold,
    /// Hard limit on the total simplex count.
    pub budget: usize,
}

impl Default for RipsOptions {
    fn default() -> Self {
        Self {
            max_dim: 2,
            threshold: Threshold::Full,
            budget: DEFAULT_SIMPLEX_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredSimplex {
    pub simplex: Simplex,
    pub value: f64,
}

/// Simplices sorted by `(value, dim, vertices)`; every face precedes its cofaces.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    simplices: Vec<FilteredSimplex>,
    point_count: usize,
    max_dim: usize,
    threshold: Threshold,
    effective_threshold: f64,
    diameter: f64,
}

impl FilteredComplex {
    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplices(&self) -> &[FilteredSimplex] {
        &self.simplices
    }

    /// Simplices in filtration order.
    pub fn simplex_stream(&self) -> impl ExactSizeIterator<Item = (&Simplex, f64)> {
        self.simplices.iter().map(|s| (&s.simplex, s.value))
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn threshold(&self) -> Threshold {
        self.threshold
    }

    /// The numeric upper end of the filtration.
    pub fn effective_threshold(&self) -> f64 {
        self.effective_threshold
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Number of simplices of each dimension `0..=max_dim`.
    pub fn counts_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_dim + 1];
        for s in &self.simplices {
            counts[s.simplex.dim()] += 1;
        }
        counts
    }

    /// One line per simplex: `dim v0 v1 ... vk value`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in &self.simplices {
            let _ = write!(out, "{}", s.simplex.dim());
            for v in s.simplex.vertices() {
                let _ = write!(out, " {v}");
            }
            let _ = writeln!(out, " {:.16e}", s.value);
        }
        out
    }
}

pub(crate) fn filtration_order(a: &FilteredSimplex, b: &FilteredSimplex) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then_with(|| a.simplex.dim().cmp(&b.simplex.dim()))
        .then_with(|| a.simplex.vertices().cmp(b.simplex.vertices()))
}

/// Builds the Rips filtration by enumerating edges under the threshold and
/// expanding cliques through upper-neighbour intersections.
pub fn build_rips(m: &DistanceMatrix, options: &RipsOptions) -> Result<FilteredComplex> {
    options.threshold.validate()?;
    let n = m.size();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > u32::MAX as usize {
        return Err(Error::InvalidParameter(format!("{n} points exceed the vertex index range")));
    }
    let diameter = m.diameter();
    let limit = options.threshold.resolve(diameter);
    let budget = options.budget;

    let over_budget = |dim| Error::BudgetExceeded { budget, dim };
    if n > budget {
        return Err(over_budget(0));
    }

    let mut simplices: Vec<FilteredSimplex> = (0..n as u32)
        .map(|v| FilteredSimplex {
            simplex: Simplex(SmallVec::from_slice(&[v])),
            value: 0.0,
        })
        .collect();

    if options.max_dim >= 1 {
        // upper[v]: neighbours w > v with d(v, w) / 2 <= limit, ascending.
        let upper: Vec<Vec<u32>> = (0..n)
            .map(|v| {
                let row = m.row(v);
                ((v + 1)..n)
                    .filter(|&w| row[w] / 2.0 <= limit)
                    .map(|w| w as u32)
                    .collect()
            })
            .collect();

        let mut expander = Expander {
            m,
            upper: &upper,
            max_dim: options.max_dim,
            budget,
            out: &mut simplices,
        };
        for v in 0..n as u32 {
            let mut stack: SmallVec<[u32; 4]> = SmallVec::new();
            stack.push(v);
            expander.expand(&mut stack, 0.0, &upper[v as usize])?;
        }
    }

    simplices.sort_by(filtration_order);

    Ok(FilteredComplex {
        simplices,
        point_count: n,
        max_dim: options.max_dim,
        threshold: options.threshold,
        effective_threshold: limit,
        diameter,
    })
}

struct Expander<'a> {
    m: &'a DistanceMatrix,
    upper: &'a [Vec<u32>],
    max_dim: usize,
    budget: usize,
    out: &'a mut Vec<FilteredSimplex>,
}

impl Expander<'_> {
    /// Adds every coface of `base` formed by appending one of `candidates`,
    /// then recurses with the narrowed candidate set.
    fn expand(&mut self, base: &mut SmallVec<[u32; 4]>, value: f64, candidates: &[u32]) -> Result<()> {
        let dim = base.len();
        for (k, &w) in candidates.iter().enumerate() {
            if self.out.len() >= self.budget {
                return Err(Error::BudgetExceeded {
                    budget: self.budget,
                    dim,
                });
            }
            let row = self.m.row(w as usize);
            let entry = base
                .iter()
                .map(|&u| row[u as usize] / 2.0)
                .fold(value, f64::max);
            base.push(w);
            self.out.push(FilteredSimplex {
                simplex: Simplex(base.clone()),
                value: entry,
            });
            if dim < self.max_dim {
                let next = intersect_sorted(&candidates[k + 1..], &self.upper[w as usize]);
                if !next.is_empty() {
                    self.expand(base, entry, &next)?;
                }
            }
            base.pop();
        }
        Ok(())
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
