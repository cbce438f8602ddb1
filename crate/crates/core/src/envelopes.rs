//! Function-level envelopes obtained by convexifying sublevel sets.
//!
//! Every envelope here is computed by an ascending sweep over the distinct
//! values of the input table: the value assigned to a grid pair is the first
//! level whose convexified sublevel set covers it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{Exec, Settings};
use crate::hulls::{cartesian_closure, sc_fill};
use crate::lattice::{DensityTable, PairMask};

/// An envelope table together with the sweep that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeResult {
    pub table: DensityTable,
    /// Distinct input values, strictly ascending.
    pub levels: Vec<f64>,
    /// Number of entries strictly below the input.
    pub fixups: usize,
}

/// The JSON sidecar written next to an envelope table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSidecar {
    pub levels: Vec<f64>,
    pub fixups: usize,
}

impl EnvelopeResult {
    pub fn sidecar(&self) -> EnvelopeSidecar {
        EnvelopeSidecar {
            levels: self.levels.clone(),
            fixups: self.fixups,
        }
    }
}

/// `Ŵ(ξ, η) = max{W(ξ, ξ), W(ξ, η), W(η, ξ), W(η, η)}`, the smallest symmetric
/// diagonal density above `W`.
pub fn hat_density(w: &DensityTable) -> DensityTable {
    let n = w.n();
    let values = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            w.get(i, j)
                .max(w.get(j, i))
                .max(w.get(i, i))
                .max(w.get(j, j))
        })
        .collect();
    DensityTable::new(w.cloud().clone(), values).expect("maxima of finite entries are finite")
}

/// Separately level convex envelope on a `d = 1` grid.
pub fn slc_envelope(v: &DensityTable) -> Result<EnvelopeResult> {
    slc_envelope_with(v, Exec::default())
}

pub fn slc_envelope_with(v: &DensityTable, exec: Exec) -> Result<EnvelopeResult> {
    let dim = v.cloud().dim();
    if dim != 1 {
        return Err(Error::UnsupportedDimension {
            op: "slc_envelope",
            supported: "1",
            dim,
        });
    }
    if !v.is_symmetric_diagonal() {
        return Err(Error::NotSymmetricDiagonal { op: "slc_envelope" });
    }
    let n = v.n();
    let order = sorted_cells(v);
    let levels = v.distinct_values();
    let mut hull = vec![false; n * n];
    let mut out = vec![f64::NAN; n * n];
    let mut next = 0;
    for &c in &levels {
        while next < order.len() && v.values()[order[next]] <= c {
            hull[order[next]] = true;
            next += 1;
        }
        // the previous level's hull is separately convex, so it is a valid warm start
        sc_fill(&mut hull, n, exec);
        assign_new(&hull, &mut out, c);
    }
    finish(v, out, levels)
}

/// Cartesian level convex envelope, `d ∈ {1, 2}`.
///
/// Fails at the first level whose sublevel set has no basic Cartesian
/// convexification.
pub fn cartesian_lc_envelope(w: &DensityTable) -> Result<EnvelopeResult> {
    cartesian_lc_envelope_with(w, &Settings::default())
}

pub fn cartesian_lc_envelope_with(w: &DensityTable, settings: &Settings) -> Result<EnvelopeResult> {
    let dim = w.cloud().dim();
    if !(dim == 1 || dim == 2) {
        return Err(Error::UnsupportedDimension {
            op: "cartesian_lc_envelope",
            supported: "1 or 2",
            dim,
        });
    }
    if !w.is_symmetric_diagonal() {
        return Err(Error::NotSymmetricDiagonal {
            op: "cartesian_lc_envelope",
        });
    }
    let n = w.n();
    let order = sorted_cells(w);
    let levels = w.distinct_values();
    let mut sub = PairMask::empty(w.cloud().clone());
    let mut closed: Option<PairMask> = None;
    let mut out = vec![f64::NAN; n * n];
    let mut next = 0;
    for &c in &levels {
        let mut covered = true;
        while next < order.len() && w.values()[order[next]] <= c {
            let k = order[next];
            sub.bits_mut()[k] = true;
            covered &= closed.as_ref().is_some_and(|m| m.bits()[k]);
            next += 1;
        }
        // a fixed point of the closure that already contains the sublevel set is its closure
        if covered && closed.is_some() {
            continue;
        }
        let m = cartesian_closure(&sub, settings)?;
        if cartesian_closure(&m, settings)? != m {
            return Err(Error::NoBasicConvexification { level: c });
        }
        assign_new(m.bits(), &mut out, c);
        closed = Some(m);
    }
    finish(w, out, levels)
}

/// Cell indices sorted by value (stable).
fn sorted_cells(w: &DensityTable) -> Vec<usize> {
    let mut order: Vec<usize> = (0..w.values().len()).collect();
    order.sort_by(|&a, &b| w.values()[a].total_cmp(&w.values()[b]));
    order
}

fn assign_new(covered: &[bool], out: &mut [f64], c: f64) {
    for (o, &b) in out.iter_mut().zip(covered) {
        if b && o.is_nan() {
            *o = c;
        }
    }
}

fn finish(input: &DensityTable, out: Vec<f64>, levels: Vec<f64>) -> Result<EnvelopeResult> {
    if let Some(k) = out.iter().position(|x| x.is_nan()) {
        return Err(Error::Internal(format!(
            "cell {k} was not covered by any level up to the table maximum"
        )));
    }
    let fixups = out
        .iter()
        .zip(input.values())
        .filter(|(e, v)| e < v)
        .count();
    let table = DensityTable::new(input.cloud().clone(), out)?;
    Ok(EnvelopeResult {
        table,
        levels,
        fixups,
    })
}
