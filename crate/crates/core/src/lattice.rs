//! Discretized slope clouds, pair masks, density tables and simple slope fields.
//!
//! A density `W: R^d x R^d -> R` is stored as its values on `P x P` for a finite
//! cloud `P`. Sets `E ⊂ R^d x R^d` are stored as boolean masks on the same
//! product, with entry `(i, j)` meaning `(p_i, p_j) ∈ E`. Both are row-major:
//! the first argument selects the row.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::exprlang::DensityExpr;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidInput(format!(
                "interval ({a}, {b}) must have finite endpoints with a < b"
            )));
        }
        Ok(Interval { a, b })
    }

    pub fn unit() -> Self {
        Interval { a: 0.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }
}

/// Parameters of a uniform (product) grid: `n` points per axis on `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformGrid {
    pub n: usize,
    pub min: f64,
    pub max: f64,
}

impl UniformGrid {
    pub fn axis(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i + 1 == self.n {
                    self.max
                } else {
                    self.min + span * i as f64 / last
                }
            })
            .collect()
    }
}

/// A finite set of distinct slope points in `R^d`, `d ∈ {1, 2}`, sorted
/// lexicographically.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeCloud {
    dim: usize,
    coords: Vec<f64>,
    spacing: f64,
    grid: Option<UniformGrid>,
}

impl SlopeCloud {
    /// Uniform grid with `n` points per axis; for `d = 2` the product grid with
    /// point index `i * n + j` holding `(x_i, x_j)`.
    pub fn uniform(dim: usize, n: usize, min: f64, max: f64) -> Result<Self> {
        check_dim(dim)?;
        if n == 0 {
            return Err(Error::InvalidInput("cloud needs at least one point".into()));
        }
        if !(min.is_finite() && max.is_finite()) || (n > 1 && min >= max) {
            return Err(Error::InvalidInput(format!(
                "grid range [{min}, {max}] is not a valid finite range"
            )));
        }
        let grid = UniformGrid {
            n,
            min,
            max: if n == 1 { min } else { max },
        };
        let axis = grid.axis();
        let coords = match dim {
            1 => axis.clone(),
            _ => axis
                .iter()
                .flat_map(|&x| axis.iter().flat_map(move |&y| [x, y]))
                .collect(),
        };
        let spacing = axis
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        if spacing <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "grid [{min}, {max}] with {n} points has coincident nodes"
            )));
        }
        Ok(SlopeCloud {
            dim,
            coords,
            spacing,
            grid: Some(grid),
        })
    }

    /// Arbitrary cloud; points are sorted lexicographically and must be distinct.
    pub fn from_points(dim: usize, mut points: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(dim)?;
        if points.is_empty() {
            return Err(Error::InvalidInput("cloud needs at least one point".into()));
        }
        for p in &points {
            if p.len() != dim || p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "cloud point {p:?} is not a finite point of R^{dim}"
                )));
            }
        }
        points.sort_by(|p, q| lex_cmp(p, q));
        let mut spacing = f64::INFINITY;
        if dim == 1 {
            for w in points.windows(2) {
                spacing = spacing.min(w[1][0] - w[0][0]);
            }
        } else {
            for (i, p) in points.iter().enumerate() {
                for q in &points[i + 1..] {
                    spacing = spacing.min(distance(p, q));
                }
            }
        }
        if spacing <= 0.0 {
            return Err(Error::InvalidInput("cloud points must be distinct".into()));
        }
        Ok(SlopeCloud {
            dim,
            coords: points.into_iter().flatten().collect(),
            spacing,
            grid: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks(self.dim)
    }

    /// Minimum pairwise distance `h`; infinite for a single point.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn grid(&self) -> Option<UniformGrid> {
        self.grid
    }

    /// Nearest cloud point and its distance; ties go to the lexicographically
    /// smaller point.
    pub fn nearest(&self, x: &[f64]) -> (usize, f64) {
        debug_assert_eq!(x.len(), self.dim);
        if self.dim == 1 {
            let v = x[0];
            let n = self.len();
            let k = self.coords.partition_point(|&p| p < v);
            let mut best = (k.min(n - 1), (self.coords[k.min(n - 1)] - v).abs());
            if k > 0 {
                let d = (v - self.coords[k - 1]).abs();
                if d <= best.1 {
                    best = (k - 1, d);
                }
            }
            return best;
        }
        let mut best = (0, f64::INFINITY);
        for (i, p) in self.points().enumerate() {
            let d = distance(p, x);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Index of the nearest cloud point if it lies within `tol`.
    pub fn snap(&self, x: &[f64], tol: f64) -> Result<usize> {
        if x.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "slope {x:?} has dimension {}, cloud has {}",
                x.len(),
                self.dim
            )));
        }
        let (i, d) = self.nearest(x);
        if d <= tol {
            Ok(i)
        } else {
            Err(Error::OutsideCloud {
                slope: x.to_vec(),
                tol,
            })
        }
    }

    /// Snap with the default tolerance `h / 2`.
    pub fn snap_default(&self, x: &[f64]) -> Result<usize> {
        self.snap(x, self.spacing / 2.0)
    }

    /// Largest Euclidean norm of a cloud point.
    pub fn radius(&self) -> f64 {
        self.points().map(norm).fold(0.0, f64::max)
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension {
            op: "SlopeCloud",
            supported: "1 or 2",
            dim,
        })
    }
}

pub(crate) fn lex_cmp(p: &[f64], q: &[f64]) -> Ordering {
    for (a, b) in p.iter().zip(q) {
        match a.total_cmp(b) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

pub(crate) fn distance(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn norm(p: &[f64]) -> f64 {
    p.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Euclidean norm of the pair `(ξ, η) ∈ R^{2d}`.
fn pair_norm(xi: &[f64], eta: &[f64]) -> f64 {
    xi.iter().chain(eta).map(|a| a * a).sum::<f64>().sqrt()
}

/// A subset of `P x P`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairMask {
    cloud: Arc<SlopeCloud>,
    bits: Vec<bool>,
}

impl PairMask {
    pub fn empty(cloud: Arc<SlopeCloud>) -> Self {
        let n = cloud.len();
        PairMask {
            cloud,
            bits: vec![false; n * n],
        }
    }

    pub fn full(cloud: Arc<SlopeCloud>) -> Self {
        let n = cloud.len();
        PairMask {
            cloud,
            bits: vec![true; n * n],
        }
    }

    pub fn from_bits(cloud: Arc<SlopeCloud>, bits: Vec<bool>) -> Result<Self> {
        let n = cloud.len();
        if bits.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "mask has {} entries, cloud of {n} points needs {}",
                bits.len(),
                n * n
            )));
        }
        Ok(PairMask { cloud, bits })
    }

    pub fn from_fn(cloud: Arc<SlopeCloud>, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let n = cloud.len();
        let bits = (0..n * n).map(|k| f(k / n, k % n)).collect();
        PairMask { cloud, bits }
    }

    pub fn from_pairs(cloud: Arc<SlopeCloud>, pairs: &[(usize, usize)]) -> Self {
        let mut m = PairMask::empty(cloud);
        for &(i, j) in pairs {
            m.set(i, j, true);
        }
        m
    }

    pub fn cloud(&self) -> &Arc<SlopeCloud> {
        &self.cloud
    }

    /// Number of cloud points `|P|`.
    pub fn n(&self) -> usize {
        self.cloud.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let n = self.n();
        self.bits[i * n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[bool] {
        let n = self.n();
        &self.bits[i * n..(i + 1) * n]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n();
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(k, _)| (k / n, k % n))
    }

    pub fn is_subset(&self, other: &PairMask) -> bool {
        self.bits.len() == other.bits.len()
            && self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn union(&self, other: &PairMask) -> PairMask {
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| a || b)
            .collect();
        PairMask {
            cloud: self.cloud.clone(),
            bits,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        self.iter_set()
            .all(|(i, j)| self.get(i, i) && self.get(j, j))
    }
}

/// A density sampled on `P x P`, with an optional linear-growth constant.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityTable {
    cloud: Arc<SlopeCloud>,
    values: Vec<f64>,
    coercivity: Option<f64>,
}

impl DensityTable {
    /// Builds a table and estimates its coercivity constant.
    pub fn new(cloud: Arc<SlopeCloud>, values: Vec<f64>) -> Result<Self> {
        let n = cloud.len();
        if values.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "table has {} entries, cloud of {n} points needs {}",
                values.len(),
                n * n
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteDensity {
                xi: cloud.point(k / n).to_vec(),
                eta: cloud.point(k % n).to_vec(),
                reason: format!("entry {} is not finite", values[k]),
            });
        }
        let coercivity = estimate_coercivity(&cloud, &values);
        Ok(DensityTable {
            cloud,
            values,
            coercivity,
        })
    }

    pub fn from_fn(cloud: Arc<SlopeCloud>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = cloud.len();
        let values = (0..n * n).map(|k| f(k / n, k % n)).collect();
        DensityTable::new(cloud, values)
    }

    /// Replaces the coercivity constant after checking it against every entry.
    pub fn with_coercivity(mut self, coercivity: Option<f64>) -> Result<Self> {
        if let Some(c) = coercivity {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "coercivity constant {c} must be positive"
                )));
            }
            if !certifies(&self.cloud, &self.values, c) {
                return Err(Error::InvalidInput(format!(
                    "coercivity constant {c} is violated by the table"
                )));
            }
        }
        self.coercivity = coercivity;
        Ok(self)
    }

    pub fn cloud(&self) -> &Arc<SlopeCloud> {
        &self.cloud
    }

    pub fn n(&self) -> usize {
        self.cloud.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn coercivity(&self) -> Option<f64> {
        self.coercivity
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n() + j]
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (i + 1..n).all(|j| self.get(i, j) == self.get(j, i)))
    }

    /// `W(ξ, η) = max{W(ξ, ξ), W(ξ, η), W(η, η)}` at every pair.
    pub fn is_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| self.get(i, j) >= self.get(i, i).max(self.get(j, j))))
    }

    pub fn is_symmetric_diagonal(&self) -> bool {
        self.is_symmetric() && self.is_diagonal()
    }

    /// Distinct entries in ascending order.
    pub fn distinct_values(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Entrywise `self ≤ other`.
    pub fn le(&self, other: &DensityTable) -> bool {
        self.values.len() == other.values.len()
            && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    /// The same density shifted by a constant.
    pub fn shifted(&self, k: f64) -> Result<DensityTable> {
        DensityTable::new(
            self.cloud.clone(),
            self.values.iter().map(|v| v + k).collect(),
        )
    }
}

/// Minimum of `W / |(ξ, η)|` over pairs off the origin, if positive and
/// consistent with the origin pair, lowered by a few ulps if needed so that
/// `W ≥ C' |(ξ, η)|` holds in floating point.
fn estimate_coercivity(cloud: &SlopeCloud, values: &[f64]) -> Option<f64> {
    let n = cloud.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            let v = values[i * n + j];
            let r = pair_norm(cloud.point(i), cloud.point(j));
            if r > 0.0 {
                best = best.min(v / r);
            } else if v < 0.0 {
                return None;
            }
        }
    }
    if !(best > 0.0 && best.is_finite()) {
        return None;
    }
    while !certifies(cloud, values, best) {
        best = f64::from_bits(best.to_bits() - 1);
        if best <= 0.0 {
            return None;
        }
    }
    Some(best)
}

fn certifies(cloud: &SlopeCloud, values: &[f64], c: f64) -> bool {
    let n = cloud.len();
    (0..n * n).all(|k| {
        let r = pair_norm(cloud.point(k / n), cloud.point(k % n));
        let v = values[k];
        if r > 0.0 {
            v >= c * r
        } else {
            v >= 0.0
        }
    })
}

/// Evaluates `expr` at every pair of cloud points.
///
/// The first non-finite or failing evaluation in row-major order is reported.
pub fn sample_density(
    expr: &DensityExpr,
    cloud: Arc<SlopeCloud>,
    exec: Exec,
) -> Result<DensityTable> {
    let d = cloud.dim();
    if expr.max_index() > d {
        return Err(Error::InvalidInput(format!(
            "expression uses index {} but the cloud has dimension {d}",
            expr.max_index()
        )));
    }
    let n = cloud.len();
    let rows: Vec<Result<Vec<f64>>> = exec.map_range(n, |i| {
        let xi = cloud.point(i);
        (0..n)
            .map(|j| {
                let eta = cloud.point(j);
                expr.evaluate(xi, eta).map_err(|e| Error::NonFiniteDensity {
                    xi: xi.to_vec(),
                    eta: eta.to_vec(),
                    reason: e.to_string(),
                })
            })
            .collect()
    });
    let mut values = Vec::with_capacity(n * n);
    for row in rows {
        values.extend(row?);
    }
    DensityTable::new(cloud, values)
}

/// The sublevel set `L_c(W) = {W ≤ c}`.
pub fn sublevel(w: &DensityTable, c: f64) -> PairMask {
    PairMask {
        cloud: w.cloud.clone(),
        bits: w.values.iter().map(|&v| v <= c).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub right: f64,
    pub slope: Vec<f64>,
}

/// A simple function on `I`: one constant slope per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldRepr", into = "FieldRepr")]
pub struct SlopeField {
    interval: Interval,
    dim: usize,
    cells: Vec<Cell>,
}

#[derive(Serialize, Deserialize)]
struct FieldRepr {
    interval: [f64; 2],
    cells: Vec<Cell>,
}

impl TryFrom<FieldRepr> for SlopeField {
    type Error = Error;

    fn try_from(r: FieldRepr) -> Result<Self> {
        SlopeField::new(Interval::new(r.interval[0], r.interval[1])?, r.cells)
    }
}

impl From<SlopeField> for FieldRepr {
    fn from(s: SlopeField) -> Self {
        FieldRepr {
            interval: [s.interval.a(), s.interval.b()],
            cells: s.cells,
        }
    }
}

impl SlopeField {
    pub fn new(interval: Interval, cells: Vec<Cell>) -> Result<Self> {
        let Some(first) = cells.first() else {
            return Err(Error::InvalidInput(
                "slope field needs at least one cell".into(),
            ));
        };
        let dim = first.slope.len();
        if dim == 0 {
            return Err(Error::InvalidInput(
                "slopes must have dimension >= 1".into(),
            ));
        }
        let mut left = interval.a();
        for (k, c) in cells.iter().enumerate() {
            if c.slope.len() != dim || c.slope.iter().any(|s| !s.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "cell {k} slope {:?} is not a finite point of R^{dim}",
                    c.slope
                )));
            }
            if c.right.partial_cmp(&left) != Some(Ordering::Greater) {
                return Err(Error::InvalidInput(format!(
                    "cell {k} right endpoint {} does not exceed {left}",
                    c.right
                )));
            }
            left = c.right;
        }
        if left != interval.b() {
            return Err(Error::InvalidInput(format!(
                "last right endpoint {left} differs from b = {}",
                interval.b()
            )));
        }
        Ok(SlopeField {
            interval,
            dim,
            cells,
        })
    }

    /// Equal-length cells carrying the given slopes.
    pub fn uniform(interval: Interval, slopes: Vec<Vec<f64>>) -> Result<Self> {
        let m = slopes.len();
        let cells = slopes
            .into_iter()
            .enumerate()
            .map(|(k, slope)| Cell {
                right: if k + 1 == m {
                    interval.b()
                } else {
                    interval.a() + interval.length() * (k + 1) as f64 / m as f64
                },
                slope,
            })
            .collect();
        SlopeField::new(interval, cells)
    }

    pub fn constant(interval: Interval, slope: Vec<f64>) -> Result<Self> {
        SlopeField::uniform(interval, vec![slope])
    }

    /// Scalar convenience constructor for `d = 1`.
    pub fn scalar(interval: Interval, slopes: &[f64]) -> Result<Self> {
        SlopeField::uniform(interval, slopes.iter().map(|&s| vec![s]).collect())
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn left(&self, k: usize) -> f64 {
        if k == 0 {
            self.interval.a()
        } else {
            self.cells[k - 1].right
        }
    }

    pub fn cell_length(&self, k: usize) -> f64 {
        self.cells[k].right - self.left(k)
    }

    /// Merges neighbouring cells with identical slopes.
    pub fn coalesce(&self) -> SlopeField {
        let mut cells: Vec<Cell> = Vec::with_capacity(self.cells.len());
        for c in &self.cells {
            match cells.last_mut() {
                Some(last) if last.slope == c.slope => last.right = c.right,
                _ => cells.push(c.clone()),
            }
        }
        SlopeField {
            interval: self.interval,
            dim: self.dim,
            cells,
        }
    }

    /// Splits the longest cell (first on ties) in half until there are `k` cells.
    pub fn refine_to(&self, k: usize) -> Result<SlopeField> {
        if k < self.cells.len() {
            return Err(Error::Precondition(format!(
                "refinement to {k} cells is coarser than the field's {} cells",
                self.cells.len()
            )));
        }
        let mut out = self.clone();
        while out.cells.len() < k {
            let (idx, _) = (0..out.cells.len()).map(|i| (i, out.cell_length(i))).fold(
                (0, f64::NEG_INFINITY),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
            let left = out.left(idx);
            let mid = left + 0.5 * out.cell_length(idx);
            if !(mid > left && mid < out.cells[idx].right) {
                return Err(Error::InvalidInput(
                    "cells became too short to subdivide".into(),
                ));
            }
            let slope = out.cells[idx].slope.clone();
            out.cells.insert(idx, Cell { right: mid, slope });
        }
        Ok(out)
    }

    /// The slope value on the open cell containing `x` (left cell at breakpoints).
    pub fn slope_at(&self, x: f64) -> &[f64] {
        let k = self
            .cells
            .partition_point(|c| c.right < x)
            .min(self.cells.len() - 1);
        &self.cells[k].slope
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        std::iter::once(self.interval.a())
            .chain(self.cells.iter().map(|c| c.right))
            .collect()
    }
}

/// `u(x) = c + ∫_a^x s(t) dt` for a simple slope field `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct PwAffineFn {
    base: Vec<f64>,
    derivative: SlopeField,
}

impl PwAffineFn {
    pub fn new(base: Vec<f64>, derivative: SlopeField) -> Result<Self> {
        if base.len() != derivative.dim() || base.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "base value {base:?} must be a finite point of R^{}",
                derivative.dim()
            )));
        }
        Ok(PwAffineFn { base, derivative })
    }

    /// Recovers the function from its values at strictly increasing nodes.
    pub fn from_nodes(interval: Interval, nodes: &[f64], values: &[Vec<f64>]) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::InvalidInput(
                "need at least two nodes with one value each".into(),
            ));
        }
        if nodes[0] != interval.a() {
            return Err(Error::InvalidInput("first node must be a".into()));
        }
        let cells = nodes
            .windows(2)
            .zip(values.windows(2))
            .map(|(x, u)| Cell {
                right: x[1],
                slope: u[1]
                    .iter()
                    .zip(&u[0])
                    .map(|(hi, lo)| (hi - lo) / (x[1] - x[0]))
                    .collect(),
            })
            .collect();
        PwAffineFn::new(values[0].clone(), SlopeField::new(interval, cells)?)
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn derivative(&self) -> &SlopeField {
        &self.derivative
    }

    pub fn interval(&self) -> Interval {
        self.derivative.interval()
    }

    /// Values at `a` and at every right endpoint.
    pub fn node_values(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.derivative.cells().len() + 1);
        let mut u = self.base.clone();
        out.push(u.clone());
        for k in 0..self.derivative.cells().len() {
            let len = self.derivative.cell_length(k);
            for (ui, si) in u.iter_mut().zip(&self.derivative.cells()[k].slope) {
                *ui += si * len;
            }
            out.push(u.clone());
        }
        out
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        let s = &self.derivative;
        let x = x.clamp(s.interval().a(), s.interval().b());
        let mut u = self.base.clone();
        for k in 0..s.cells().len() {
            let left = s.left(k);
            if x <= left {
                break;
            }
            let span = x.min(s.cells()[k].right) - left;
            for (ui, si) in u.iter_mut().zip(&s.cells()[k].slope) {
                *ui += si * span;
            }
        }
        u
    }

    /// `sup_x |self(x) - other(x)|`, attained at a breakpoint of either function.
    pub fn sup_distance(&self, other: &PwAffineFn) -> f64 {
        let mut xs = self.derivative.breakpoints();
        xs.extend(other.derivative.breakpoints());
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        let mut best = 0.0f64;
        let (mut i, mut j) = (Walker::new(self), Walker::new(other));
        for x in xs {
            best = best.max(distance(&i.at(x), &j.at(x)));
        }
        best
    }
}

/// Incremental evaluation at nondecreasing abscissae.
struct Walker<'a> {
    f: &'a PwAffineFn,
    cell: usize,
    left_value: Vec<f64>,
}

impl<'a> Walker<'a> {
    fn new(f: &'a PwAffineFn) -> Self {
        Walker {
            f,
            cell: 0,
            left_value: f.base.clone(),
        }
    }

    fn at(&mut self, x: f64) -> Vec<f64> {
        let s = &self.f.derivative;
        while self.cell + 1 < s.cells().len() && s.cells()[self.cell].right < x {
            let len = s.cell_length(self.cell);
            for (u, si) in self.left_value.iter_mut().zip(&s.cells()[self.cell].slope) {
                *u += si * len;
            }
            self.cell += 1;
        }
        let span = x - s.left(self.cell);
        self.left_value
            .iter()
            .zip(&s.cells()[self.cell].slope)
            .map(|(u, si)| u + si * span)
            .collect()
    }
}
