//! The nonlocal supremal functional and the nonlocal indicator on simple
//! slope fields.

use crate::error::{Error, Result};
use crate::lattice::{
    distance, lex_cmp, Cell, DensityTable, PairMask, PwAffineFn, SlopeCloud, SlopeField,
};

/// Cloud index of every cell slope, snapped within `h / 2`.
pub fn snap_field(cloud: &SlopeCloud, s: &SlopeField) -> Result<Vec<usize>> {
    s.cells()
        .iter()
        .map(|c| cloud.snap_default(&c.slope))
        .collect()
}

/// Sorted distinct cloud indices taken by the field.
pub fn slope_indices(cloud: &SlopeCloud, s: &SlopeField) -> Result<Vec<usize>> {
    let mut idx = snap_field(cloud, s)?;
    idx.sort_unstable();
    idx.dedup();
    Ok(idx)
}

/// `max W(p_a, p_b)` over ordered pairs drawn from `indices`.
pub fn sup_over_indices(w: &DensityTable, indices: &[usize]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for &a in indices {
        for &b in indices {
            best = best.max(w.get(a, b));
        }
    }
    best
}

/// `J(u) = esssup_{I x I} W(u'(x), u'(y))` for `u' = s`.
///
/// Cell boundaries are null sets, so only the slope values matter: the result
/// is the maximum over pairs of distinct slope values, diagonal included.
pub fn evaluate_sup(w: &DensityTable, s: &SlopeField) -> Result<f64> {
    check_dim(w.cloud(), s)?;
    Ok(sup_over_indices(w, &slope_indices(w.cloud(), s)?))
}

/// `u(x) = c + ∫_a^x s(t) dt`.
pub fn antiderivative(s: &SlopeField, c: &[f64]) -> Result<PwAffineFn> {
    PwAffineFn::new(c.to_vec(), s.clone())
}

/// Whether `(s(x), s(y)) ∈ E` for a.e. `(x, y)`.
pub fn feasibility(e: &PairMask, s: &SlopeField) -> Result<bool> {
    check_dim(e.cloud(), s)?;
    let idx = slope_indices(e.cloud(), s)?;
    Ok(idx.iter().all(|&a| idx.iter().all(|&b| e.get(a, b))))
}

/// `∬ χ_E(s(x), s(y)) dx dy`: zero on feasible fields, `+∞` otherwise.
pub fn indicator_integral(e: &PairMask, s: &SlopeField) -> Result<f64> {
    Ok(if feasibility(e, s)? {
        0.0
    } else {
        f64::INFINITY
    })
}

/// Cloud-valued `k`-cell refinement of `v` that stays inside `E`.
///
/// Each cell takes the nearest cloud point compatible with the slopes already
/// chosen (ties toward the lexicographically smaller point), searching within
/// distance `h`; the antiderivatives therefore differ by at most `h (b - a)`.
pub fn simple_approximation(v: &SlopeField, e: &PairMask, k: usize) -> Result<SlopeField> {
    let cloud = e.cloud();
    check_dim(cloud, v)?;
    if k < v.cells().len() {
        return Err(Error::Precondition(format!(
            "cell count {k} is below the field's {} cells",
            v.cells().len()
        )));
    }
    let reach = cloud.spacing();
    let mut chosen: Vec<usize> = Vec::new();
    let mut picks = Vec::with_capacity(v.cells().len());
    let mut bad = Vec::new();
    for (cell, c) in v.cells().iter().enumerate() {
        let mut candidates: Vec<(f64, usize)> = (0..cloud.len())
            .map(|i| (distance(cloud.point(i), &c.slope), i))
            .filter(|&(d, _)| d <= reach)
            .collect();
        candidates.sort_by(|a, b| {
            a.0.total_cmp(&b.0)
                .then(lex_cmp(cloud.point(a.1), cloud.point(b.1)))
        });
        let pick = candidates
            .into_iter()
            .map(|(_, i)| i)
            .find(|&i| e.get(i, i) && chosen.iter().all(|&j| e.get(i, j) && e.get(j, i)));
        match pick {
            Some(i) => {
                if !chosen.contains(&i) {
                    chosen.push(i);
                }
                picks.push(i);
            }
            None => bad.push(cell),
        }
    }
    if !bad.is_empty() {
        return Err(Error::Infeasible { cells: bad });
    }
    let cells = v
        .cells()
        .iter()
        .zip(&picks)
        .map(|(c, &i)| Cell {
            right: c.right,
            slope: cloud.point(i).to_vec(),
        })
        .collect();
    SlopeField::new(v.interval(), cells)?.refine_to(k)
}

fn check_dim(cloud: &SlopeCloud, s: &SlopeField) -> Result<()> {
    if cloud.dim() != s.dim() {
        return Err(Error::InvalidInput(format!(
            "slope field of dimension {} on a cloud of dimension {}",
            s.dim(),
            cloud.dim()
        )));
    }
    Ok(())
}
