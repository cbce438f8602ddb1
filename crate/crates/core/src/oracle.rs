//! Brute-force relaxation oracle, explicit recovery sequences and
//! lower-semicontinuity experiments.
//!
//! The relaxed value of a simple target field is computed without any
//! envelope: it is the smallest `max_{a,b ∈ A} W(a, b)` over slope sets `A`
//! whose convex hull contains every target slope. Oscillating between the
//! points of such an `A` in the right proportions produces fields that
//! converge weakly* to the target while their energy stays at that value.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::envelopes::{cartesian_lc_envelope_with, slc_envelope_with};
use crate::error::{Error, Result};
use crate::exec::Settings;
use crate::functionals::{evaluate_sup, slope_indices, sup_over_indices};
use crate::hulls::geometry::{cross, segment_param, Polytope};
use crate::lattice::{Cell, DensityTable, PwAffineFn, SlopeCloud, SlopeField};

/// Slope points of a recovery sequence and, per target cell, the fraction of
/// the cell spent on each point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub slopes: Vec<Vec<f64>>,
    /// `weights[cell][m]` is the share of slope `m` on that cell.
    pub weights: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KRecord {
    pub k: usize,
    #[serde(rename = "J")]
    pub j: f64,
    pub dist: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelaxReport {
    pub target: SlopeField,
    /// Cloud spacing; weighted witness means match the target within `h / 2`.
    pub h: f64,
    /// `None` when no admissible set fits under the subset cap.
    pub oracle_value: Option<f64>,
    pub cap_failure: bool,
    /// Max-pair value of the matching envelope; `None` when the envelope is
    /// not defined for this density.
    pub envelope_value: Option<f64>,
    pub gap: Option<f64>,
    pub witness: Option<Witness>,
    #[serde(default)]
    pub per_k: Vec<KRecord>,
}

pub fn relax_oracle(w: &DensityTable, target: &SlopeField) -> Result<RelaxReport> {
    relax_oracle_with(w, target, &Settings::default())
}

/// Oracle value and envelope value for `target`; the envelope is the
/// separately level convex one for `d = 1` and the Cartesian one for `d = 2`.
pub fn relax_oracle_with(
    w: &DensityTable,
    target: &SlopeField,
    settings: &Settings,
) -> Result<RelaxReport> {
    check_density(w)?;
    let envelope = match w.cloud().dim() {
        1 => Some(slc_envelope_with(w, settings.exec)?.table),
        _ => match cartesian_lc_envelope_with(w, settings) {
            Ok(e) => Some(e.table),
            Err(Error::NoBasicConvexification { .. }) => None,
            Err(e) => return Err(e),
        },
    };
    relax_oracle_against(w, target, envelope.as_ref(), settings)
}

/// As [`relax_oracle_with`], comparing against a precomputed envelope table.
pub fn relax_oracle_against(
    w: &DensityTable,
    target: &SlopeField,
    envelope: Option<&DensityTable>,
    settings: &Settings,
) -> Result<RelaxReport> {
    check_density(w)?;
    let cloud = w.cloud();
    if target.dim() != cloud.dim() {
        return Err(Error::InvalidInput(format!(
            "target of dimension {} on a cloud of dimension {}",
            target.dim(),
            cloud.dim()
        )));
    }
    let target_idx = slope_indices(cloud, target)?;
    let search = SubsetSearch::new(w, target, settings.subset_cap);

    let found = if cloud.dim() == 1 {
        let fast = search.pair_scan();
        if settings.cross_check {
            let general = search.exhaustive(settings)?;
            if fast.as_ref().map(|f| f.0) != general.as_ref().map(|g| g.0) {
                return Err(Error::Internal(format!(
                    "pair scan {:?} and subset search {:?} disagree",
                    fast.as_ref().map(|f| f.0),
                    general.as_ref().map(|g| g.0)
                )));
            }
            general
        } else {
            fast
        }
    } else {
        search.exhaustive(settings)?
    };

    let envelope_value = envelope.map(|e| sup_over_indices(e, &target_idx));
    let (oracle_value, witness) = match found {
        Some((value, set)) => {
            let slopes: Vec<Vec<f64>> = set.iter().map(|&i| cloud.point(i).to_vec()).collect();
            let weights = target
                .cells()
                .iter()
                .map(|c| convex_weights(&slopes, &c.slope))
                .collect();
            (Some(value), Some(Witness { slopes, weights }))
        }
        None => (None, None),
    };
    let gap = match (oracle_value, envelope_value) {
        (Some(o), Some(e)) => Some((o - e).abs()),
        _ => None,
    };
    Ok(RelaxReport {
        target: target.clone(),
        h: cloud.spacing(),
        oracle_value,
        cap_failure: oracle_value.is_none(),
        envelope_value,
        gap,
        witness,
        per_k: Vec::new(),
    })
}

fn check_density(w: &DensityTable) -> Result<()> {
    if !w.is_symmetric_diagonal() {
        return Err(Error::NotSymmetricDiagonal { op: "relax_oracle" });
    }
    Ok(())
}

/// Exhaustive search over index sets `A` (ascending, `|A| ≤ cap`) whose hull
/// contains every target slope within `h / 2`.
struct SubsetSearch<'a> {
    w: &'a DensityTable,
    cloud: &'a SlopeCloud,
    targets: Vec<Vec<f64>>,
    tol: f64,
    cap: usize,
    /// Smallest first coordinate among the targets.
    lead: f64,
}

impl<'a> SubsetSearch<'a> {
    fn new(w: &'a DensityTable, target: &SlopeField, cap: usize) -> Self {
        let mut targets: Vec<Vec<f64>> = target.cells().iter().map(|c| c.slope.clone()).collect();
        targets.sort_by(|a, b| crate::lattice::lex_cmp(a, b));
        targets.dedup();
        let lead = targets.iter().map(|t| t[0]).fold(f64::INFINITY, f64::min);
        SubsetSearch {
            w,
            cloud: w.cloud(),
            targets,
            tol: w.cloud().spacing() / 2.0,
            cap,
            lead,
        }
    }

    fn admissible(&self, set: &[usize]) -> bool {
        if self.cloud.dim() == 1 {
            let lo = self.cloud.point(set[0])[0];
            let hi = self.cloud.point(set[set.len() - 1])[0];
            return self
                .targets
                .iter()
                .all(|t| t[0] >= lo - self.tol && t[0] <= hi + self.tol);
        }
        let hull = Polytope::hull_of(set.iter().map(|&i| self.cloud.point(i)));
        self.targets.iter().all(|t| hull.contains(t, self.tol))
    }

    /// Cloud points are sorted lexicographically, so the first coordinate of
    /// an ascending index set is minimal at its first element; a set whose
    /// first element lies right of every target can never become admissible.
    fn first_ok(&self, i: usize) -> bool {
        self.cloud.point(i)[0] <= self.lead + self.tol
    }

    fn extend_value(&self, set: &[usize], cur: f64, v: usize) -> f64 {
        set.iter().fold(cur.max(self.w.get(v, v)), |m, &u| {
            m.max(self.w.get(u, v)).max(self.w.get(v, u))
        })
    }

    /// `d = 1` pairs `{a ≤ b}` straddling the targets; intervals are convex,
    /// so no larger set can do better.
    fn pair_scan(&self) -> Option<(f64, Vec<usize>)> {
        let n = self.cloud.len();
        let mut best: Option<(f64, Vec<usize>)> = None;
        let hi_t = self
            .targets
            .iter()
            .map(|t| t[0])
            .fold(f64::NEG_INFINITY, f64::max);
        let mut consider = |set: Vec<usize>| {
            let v = set.iter().fold(f64::NEG_INFINITY, |m, &a| {
                set.iter().fold(m, |m, &b| m.max(self.w.get(a, b)))
            });
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, set));
            }
        };
        // shortlex: singletons first, then pairs in lexicographic order
        for a in 0..n {
            let x = self.cloud.point(a)[0];
            if x <= self.lead + self.tol && x >= hi_t - self.tol {
                consider(vec![a]);
            }
        }
        for a in 0..n {
            if self.cap < 2 || self.cloud.point(a)[0] > self.lead + self.tol {
                break;
            }
            for b in a + 1..n {
                if self.cloud.point(b)[0] >= hi_t - self.tol {
                    consider(vec![a, b]);
                }
            }
        }
        best
    }

    /// Optimal value by branch and bound, then the shortlex-first optimal set.
    fn exhaustive(&self, settings: &Settings) -> Result<Option<(f64, Vec<usize>)>> {
        let n = self.cloud.len();
        let best = AtomicF64::new(f64::INFINITY);
        let roots: Vec<usize> = (0..n).filter(|&i| self.first_ok(i)).collect();
        settings.exec.map(&roots, |&i| {
            let mut set = vec![i];
            self.bound(&mut set, self.w.get(i, i), &best);
        });
        let value = best.load();
        if value == f64::INFINITY {
            return Ok(None);
        }
        for size in 1..=self.cap {
            let hits = settings.exec.map(&roots, |&i| {
                let mut set = vec![i];
                self.first_at(&mut set, self.w.get(i, i), size, value)
            });
            if let Some(set) = hits.into_iter().flatten().next() {
                return Ok(Some((value, set)));
            }
        }
        Err(Error::Internal(format!(
            "optimal value {value} found but no witness reproduces it"
        )))
    }

    fn bound(&self, set: &mut Vec<usize>, cur: f64, best: &AtomicF64) {
        if cur >= best.load() {
            return;
        }
        if self.admissible(set) {
            best.fetch_min(cur);
            return;
        }
        if set.len() == self.cap {
            return;
        }
        let last = *set.last().expect("nonempty");
        for v in last + 1..self.cloud.len() {
            let next = self.extend_value(set, cur, v);
            if next < best.load() {
                set.push(v);
                self.bound(set, next, best);
                set.pop();
            }
        }
    }

    fn first_at(
        &self,
        set: &mut Vec<usize>,
        cur: f64,
        size: usize,
        value: f64,
    ) -> Option<Vec<usize>> {
        if cur > value {
            return None;
        }
        if set.len() == size {
            return self.admissible(set).then(|| set.clone());
        }
        let last = *set.last().expect("nonempty");
        for v in last + 1..self.cloud.len() {
            let next = self.extend_value(set, cur, v);
            if next <= value {
                set.push(v);
                let hit = self.first_at(set, next, size, value);
                set.pop();
                if hit.is_some() {
                    return hit;
                }
            }
        }
        None
    }
}

struct AtomicF64(AtomicU64);

impl AtomicF64 {
    fn new(x: f64) -> Self {
        AtomicF64(AtomicU64::new(x.to_bits()))
    }

    fn load(&self) -> f64 {
        f64::from_bits(self.0.load(Ordering::Relaxed))
    }

    fn fetch_min(&self, x: f64) {
        let mut cur = self.0.load(Ordering::Relaxed);
        while x < f64::from_bits(cur) {
            match self.0.compare_exchange_weak(
                cur,
                x.to_bits(),
                Ordering::Relaxed,
                Ordering::Relaxed,
            ) {
                Ok(_) => return,
                Err(actual) => cur = actual,
            }
        }
    }
}

/// Convex weights over `points` whose mean is the point of their hull
/// closest to `t`.
pub fn convex_weights(points: &[Vec<f64>], t: &[f64]) -> Vec<f64> {
    let m = points.len();
    let mut w = vec![0.0; m];
    if m == 1 {
        w[0] = 1.0;
        return w;
    }
    if t.len() == 1 {
        let x = t[0];
        let below = (0..m)
            .filter(|&i| points[i][0] <= x)
            .max_by(|&a, &b| points[a][0].total_cmp(&points[b][0]));
        let above = (0..m)
            .filter(|&i| points[i][0] >= x)
            .min_by(|&a, &b| points[a][0].total_cmp(&points[b][0]));
        match (below, above) {
            (Some(a), Some(b)) if a == b => w[a] = 1.0,
            (Some(a), Some(b)) => {
                let (pa, pb) = (points[a][0], points[b][0]);
                w[a] = (pb - x) / (pb - pa);
                w[b] = (x - pa) / (pb - pa);
            }
            (Some(a), None) | (None, Some(a)) => w[a] = 1.0,
            (None, None) => unreachable!("nonempty point set"),
        }
        return w;
    }
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let (a, b, c) = (&points[i], &points[j], &points[k]);
                let area = cross(a, b, c);
                if area == 0.0 {
                    continue;
                }
                let la = cross(b, c, t) / area;
                let lb = cross(c, a, t) / area;
                let lc = cross(a, b, t) / area;
                if la >= 0.0 && lb >= 0.0 && lc >= 0.0 {
                    let s = la + lb + lc;
                    w[i] = la / s;
                    w[j] = lb / s;
                    w[k] = lc / s;
                    return w;
                }
            }
        }
    }
    // outside the hull: project onto the nearest edge
    let mut best = (f64::INFINITY, 0, 0, 0.0);
    for i in 0..m {
        for j in i + 1..m {
            let s = segment_param(&points[i], &points[j], t);
            let p: Vec<f64> = (0..2)
                .map(|d| points[i][d] + s * (points[j][d] - points[i][d]))
                .collect();
            let dist = crate::lattice::distance(&p, t);
            if dist < best.0 {
                best = (dist, i, j, s);
            }
        }
    }
    w[best.1] = 1.0 - best.3;
    w[best.2] += best.3;
    w
}

/// A recovery-sequence element and its distance to the target primitive.
#[derive(Clone, Debug, PartialEq)]
pub struct Oscillation {
    pub k: usize,
    pub sequence: PwAffineFn,
    /// `sup_x |u_k(x) - u(x)|` with both primitives starting at zero.
    pub sup_distance: f64,
}

/// Splits every target cell into `k` equal blocks and lays out the witness
/// slopes inside each block in the given proportions.
///
/// Weights must be nonnegative, sum to one per cell and average to the cell
/// slope within `tol`.
pub fn oscillation_sequence(
    slopes: &[Vec<f64>],
    weights: &[Vec<f64>],
    target: &SlopeField,
    k: usize,
    tol: f64,
) -> Result<Oscillation> {
    if k == 0 {
        return Err(Error::Precondition(
            "refinement k must be at least 1".into(),
        ));
    }
    if slopes.is_empty() || slopes.iter().any(|s| s.len() != target.dim()) {
        return Err(Error::Precondition(format!(
            "witness slopes must be nonempty points of R^{}",
            target.dim()
        )));
    }
    if weights.len() != target.cells().len() {
        return Err(Error::Precondition(format!(
            "{} weight rows for {} target cells",
            weights.len(),
            target.cells().len()
        )));
    }
    for (cell, (row, c)) in weights.iter().zip(target.cells()).enumerate() {
        if row.len() != slopes.len() || row.iter().any(|&x| x.is_nan() || x < 0.0) {
            return Err(Error::Precondition(format!(
                "cell {cell}: weights {row:?} are not {} nonnegative numbers",
                slopes.len()
            )));
        }
        let total: f64 = row.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "cell {cell}: weights sum to {total}, not 1"
            )));
        }
        let mean: Vec<f64> = (0..target.dim())
            .map(|d| row.iter().zip(slopes).map(|(w, s)| w * s[d]).sum())
            .collect();
        if crate::lattice::distance(&mean, &c.slope) > tol {
            return Err(Error::Precondition(format!(
                "cell {cell}: weighted mean {mean:?} misses the target slope {:?}",
                c.slope
            )));
        }
    }

    let mut cells = Vec::new();
    for (ci, row) in weights.iter().enumerate() {
        let left = target.left(ci);
        let right = target.cells()[ci].right;
        let len = right - left;
        let used: Vec<usize> = (0..slopes.len()).filter(|&m| row[m] > 0.0).collect();
        let mut pos = left;
        for b in 0..k {
            let mut acc = 0.0;
            for (u, &m) in used.iter().enumerate() {
                acc += row[m];
                let end = if u + 1 == used.len() {
                    if b + 1 == k {
                        right
                    } else {
                        left + len * (b + 1) as f64 / k as f64
                    }
                } else {
                    left + len * (b as f64 + acc) / k as f64
                };
                if end > pos {
                    cells.push(Cell {
                        right: end,
                        slope: slopes[m].clone(),
                    });
                    pos = end;
                }
            }
        }
    }
    let field = SlopeField::new(target.interval(), cells)?.coalesce();
    let zero = vec![0.0; target.dim()];
    let sequence = PwAffineFn::new(zero.clone(), field)?;
    let reference = PwAffineFn::new(zero, target.clone())?;
    let sup_distance = sequence.sup_distance(&reference);
    Ok(Oscillation {
        k,
        sequence,
        sup_distance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "lsc violated")]
    LscViolated,
    #[serde(rename = "consistent with lsc")]
    ConsistentWithLsc,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::LscViolated => "lsc violated",
            Verdict::ConsistentWithLsc => "consistent with lsc",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LscReport {
    pub verdict: Verdict,
    /// `J` of the target itself.
    pub j_target: f64,
    /// Smallest `J(u_k)` over the requested refinements.
    pub min_j: f64,
    pub h: f64,
    /// `max_k k * dist_k`: the measured constant in `dist_k ≤ C / k`.
    pub rate_constant: f64,
    pub relax: RelaxReport,
}

/// Builds the oracle's recovery sequence at each `k` and compares its energy
/// with the energy of the target.
pub fn lsc_experiment(
    w: &DensityTable,
    target: &SlopeField,
    k_list: &[usize],
    settings: &Settings,
) -> Result<LscReport> {
    let mut relax = relax_oracle_with(w, target, settings)?;
    let witness = relax.witness.clone().ok_or(Error::SubsetCap {
        cap: settings.subset_cap,
    })?;
    if k_list.is_empty() {
        return Err(Error::InvalidInput(
            "at least one refinement k is required".into(),
        ));
    }
    let h = w.cloud().spacing();
    let j_target = evaluate_sup(w, target)?;
    let mut min_j = f64::INFINITY;
    let mut rate_constant = 0.0f64;
    for &k in k_list {
        let osc = oscillation_sequence(&witness.slopes, &witness.weights, target, k, h / 2.0)?;
        let j = evaluate_sup(w, osc.sequence.derivative())?;
        min_j = min_j.min(j);
        rate_constant = rate_constant.max(k as f64 * osc.sup_distance);
        relax.per_k.push(KRecord {
            k,
            j,
            dist: osc.sup_distance,
        });
    }
    let verdict = if min_j < j_target - h {
        Verdict::LscViolated
    } else {
        Verdict::ConsistentWithLsc
    };
    Ok(LscReport {
        verdict,
        j_target,
        min_j,
        h,
        rate_constant,
        relax,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Interval;
    use std::sync::Arc;

    fn g(x: f64) -> f64 {
        (x * x - 1.0).abs() + 0.1 * x.abs()
    }

    fn grid81() -> Arc<SlopeCloud> {
        Arc::new(SlopeCloud::uniform(1, 81, -2.0, 2.0).unwrap())
    }

    fn sym(cloud: &Arc<SlopeCloud>, f: impl Fn(f64) -> f64) -> DensityTable {
        DensityTable::from_fn(cloud.clone(), |i, j| {
            f(cloud.point(i)[0]).max(f(cloud.point(j)[0]))
        })
        .unwrap()
    }

    #[test]
    fn level_convex_density_needs_no_relaxation() {
        let c = grid81();
        let w = sym(&c, f64::abs);
        let t = SlopeField::scalar(Interval::unit(), &[0.5]).unwrap();
        let r = relax_oracle(&w, &t).unwrap();
        assert_eq!(r.oracle_value, Some(0.5));
        assert_eq!(r.witness.as_ref().unwrap().slopes, vec![vec![0.5]]);
        assert_eq!(r.gap, Some(0.0));
    }

    #[test]
    fn double_well_at_zero() {
        let c = grid81();
        let v = sym(&c, g);
        let t = SlopeField::scalar(Interval::unit(), &[0.0]).unwrap();
        let r = relax_oracle(&v, &t).unwrap();
        // independent pair scan over a ≤ 0 ≤ b
        let mut brute = f64::INFINITY;
        for i in 0..c.len() {
            for j in 0..c.len() {
                let (a, b) = (c.point(i)[0], c.point(j)[0]);
                if a <= 0.0 && b >= 0.0 {
                    brute = brute.min(g(a).max(g(b)));
                }
            }
        }
        assert_eq!(r.oracle_value, Some(brute));
        let wit = r.witness.unwrap();
        assert_eq!(wit.slopes, vec![vec![-1.0], vec![1.0]]);
        assert_eq!(wit.weights, vec![vec![0.5, 0.5]]);
        assert!(r.gap.unwrap() <= 2.0 * c.spacing());
    }

    #[test]
    fn two_cell_target_never_exceeds_its_energy() {
        let c = grid81();
        let v = sym(&c, g);
        let t = SlopeField::scalar(Interval::unit(), &[-1.0, 1.0]).unwrap();
        let r = relax_oracle(&v, &t).unwrap();
        assert!(r.oracle_value.unwrap() <= evaluate_sup(&v, &t).unwrap());
    }

    #[test]
    fn oscillation_examples() {
        let t0 = SlopeField::scalar(Interval::unit(), &[0.0]).unwrap();
        let same = oscillation_sequence(&[vec![0.0]], &[vec![1.0]], &t0, 7, 0.0).unwrap();
        assert_eq!(same.sequence.derivative(), &t0);
        assert_eq!(same.sup_distance, 0.0);

        let saw = oscillation_sequence(&[vec![-1.0], vec![1.0]], &[vec![0.5, 0.5]], &t0, 10, 0.0)
            .unwrap();
        assert_eq!(saw.sequence.derivative().cells().len(), 20);
        assert!(saw.sup_distance <= 1.0 / 20.0 + 1e-15);

        let t = SlopeField::scalar(Interval::unit(), &[0.5]).unwrap();
        assert!(
            oscillation_sequence(&[vec![0.0], vec![2.0]], &[vec![0.75, 0.25]], &t, 4, 1e-12)
                .is_ok()
        );
        assert!(matches!(
            oscillation_sequence(&[vec![0.0], vec![2.0]], &[vec![0.5, 0.5]], &t, 4, 1e-12),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            oscillation_sequence(&[vec![0.0], vec![2.0]], &[vec![0.5, 0.6]], &t, 4, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn lsc_verdicts() {
        let c = grid81();
        let t = SlopeField::scalar(Interval::unit(), &[0.0]).unwrap();
        let v = sym(&c, g);
        let rep = lsc_experiment(&v, &t, &[2, 4, 8], &Settings::default()).unwrap();
        assert_eq!(rep.verdict, Verdict::LscViolated);
        assert_eq!(rep.j_target, 1.0);
        assert!((rep.min_j - 0.1).abs() < 1e-12);

        let w = sym(&c, f64::abs);
        let ok = lsc_experiment(&w, &t, &[2, 4, 8], &Settings::default()).unwrap();
        assert_eq!(ok.verdict, Verdict::ConsistentWithLsc);

        let zero = DensityTable::new(c.clone(), vec![0.0; 81 * 81]).unwrap();
        let z = lsc_experiment(&zero, &t, &[2], &Settings::default()).unwrap();
        assert_eq!(z.verdict, Verdict::ConsistentWithLsc);
        assert_eq!(z.min_j, z.j_target);
    }

    #[test]
    fn planar_weights_reproduce_the_target() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        let w = convex_weights(&pts, &[0.25, 0.25]);
        assert!((w[0] - 0.5).abs() < 1e-15 && (w[1] - 0.25).abs() < 1e-15);
        let out = convex_weights(&pts, &[1.0, 1.0]);
        assert!((out[1] - 0.5).abs() < 1e-15 && (out[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn planar_oracle_uses_the_square() {
        let c = Arc::new(SlopeCloud::uniform(2, 5, -1.0, 1.0).unwrap());
        let corners: Vec<usize> = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
            .iter()
            .map(|p| c.snap_default(p).unwrap())
            .collect();
        let w = DensityTable::from_fn(c.clone(), |i, j| {
            if corners.contains(&i) && corners.contains(&j) {
                0.0
            } else {
                1.0
            }
        })
        .unwrap();
        let t = SlopeField::constant(Interval::unit(), vec![0.5, 0.5]).unwrap();
        let r = relax_oracle(&w, &t).unwrap();
        assert_eq!(r.oracle_value, Some(0.0));
        assert_eq!(r.envelope_value, Some(0.0));
        assert_eq!(r.witness.unwrap().slopes.len(), 2);
    }
}
