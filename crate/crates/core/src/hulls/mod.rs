//! Set-level convexification on the grid: separately convex hulls, the
//! symmetric-diagonal core, maximal Cartesian squares and Cartesian hulls.

pub mod cliques;
pub mod geometry;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::{Exec, Settings};
use crate::lattice::{PairMask, SlopeCloud};

pub use geometry::Polytope;

/// Row count below which the hull sweeps stay sequential.
const PAR_MIN_ROWS: usize = 256;

/// Smallest grid set containing `e` whose rows and columns are index intervals.
pub fn separately_convex_hull(e: &PairMask) -> Result<PairMask> {
    separately_convex_hull_with(e, Exec::default())
}

pub fn separately_convex_hull_with(e: &PairMask, exec: Exec) -> Result<PairMask> {
    if e.cloud().dim() != 1 {
        return Err(Error::UnsupportedDimension {
            op: "separately_convex_hull",
            supported: "1",
            dim: e.cloud().dim(),
        });
    }
    let mut out = e.clone();
    let n = out.n();
    sc_fill(out.bits_mut(), n, exec);
    Ok(out)
}

/// In-place fixpoint of row fills followed by column fills.
///
/// Bits only turn on, so any starting set that already contains a separately
/// convex subset of the final hull converges to the same result.
pub(crate) fn sc_fill(bits: &mut [bool], n: usize, exec: Exec) {
    let exec = if n < PAR_MIN_ROWS {
        Exec::Sequential
    } else {
        exec
    };
    loop {
        let changed = AtomicBool::new(false);
        exec.for_each_chunk_mut(bits, n, |_, row| {
            if fill_interval(row) {
                changed.store(true, Ordering::Relaxed);
            }
        });
        let mut lo = vec![usize::MAX; n];
        let mut hi = vec![0usize; n];
        for i in 0..n {
            for j in 0..n {
                if bits[i * n + j] {
                    lo[j] = lo[j].min(i);
                    hi[j] = hi[j].max(i);
                }
            }
        }
        exec.for_each_chunk_mut(bits, n, |i, row| {
            for (j, b) in row.iter_mut().enumerate() {
                if !*b && lo[j] <= i && i <= hi[j] {
                    *b = true;
                    changed.store(true, Ordering::Relaxed);
                }
            }
        });
        if !changed.into_inner() {
            break;
        }
    }
}

fn fill_interval(row: &mut [bool]) -> bool {
    let Some(lo) = row.iter().position(|&b| b) else {
        return false;
    };
    let hi = row.iter().rposition(|&b| b).expect("row has a set bit");
    let mut changed = false;
    for b in &mut row[lo..=hi] {
        changed |= !*b;
        *b = true;
    }
    changed
}

/// `Ê = {(ξ, η) ∈ E : (η, ξ), (ξ, ξ), (η, η) ∈ E}`.
pub fn hat_subset(e: &PairMask) -> PairMask {
    PairMask::from_fn(e.cloud().clone(), |i, j| {
        e.get(i, j) && e.get(j, i) && e.get(i, i) && e.get(j, j)
    })
}

/// Maximal index sets `A` with `A x A ⊆ E`, sorted ascending and listed in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareFamily {
    cloud: Arc<SlopeCloud>,
    squares: Vec<Vec<usize>>,
}

impl SquareFamily {
    pub fn cloud(&self) -> &Arc<SlopeCloud> {
        &self.cloud
    }

    pub fn squares(&self) -> &[Vec<usize>] {
        &self.squares
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }
}

pub fn maximal_squares(e: &PairMask) -> Result<SquareFamily> {
    maximal_squares_with(e, &Settings::default())
}

/// Maximal cliques of the graph on `{i : (i, i) ∈ E}` with an edge `{i, j}`
/// whenever both `(i, j)` and `(j, i)` lie in `E`.
pub fn maximal_squares_with(e: &PairMask, settings: &Settings) -> Result<SquareFamily> {
    let n = e.n();
    let vertices: Vec<usize> = (0..n).filter(|&i| e.get(i, i)).collect();
    if vertices.len() > settings.clique_cap {
        return Err(Error::CliqueCap {
            vertices: vertices.len(),
            cap: settings.clique_cap,
        });
    }
    let g = cliques::Graph::new(n, vertices, |i, j| e.get(i, j) && e.get(j, i));
    let squares = g.maximal_cliques(settings.square_cap, settings.exec)?;
    Ok(SquareFamily {
        cloud: e.cloud().clone(),
        squares,
    })
}

/// A union of products `Q x Q` over convex polytopes `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolytopeProductSet {
    cloud: Arc<SlopeCloud>,
    factors: Vec<Polytope>,
}

impl PolytopeProductSet {
    pub fn new(cloud: Arc<SlopeCloud>, factors: Vec<Polytope>) -> Result<Self> {
        if let Some(f) = factors.iter().find(|f| f.dim() != cloud.dim()) {
            return Err(Error::InvalidInput(format!(
                "factor of dimension {} on a cloud of dimension {}",
                f.dim(),
                cloud.dim()
            )));
        }
        Ok(PolytopeProductSet { cloud, factors })
    }

    pub fn cloud(&self) -> &Arc<SlopeCloud> {
        &self.cloud
    }

    pub fn factors(&self) -> &[Polytope] {
        &self.factors
    }
}

pub fn cartesian_hull(e: &PairMask) -> Result<PolytopeProductSet> {
    cartesian_hull_with(e, &Settings::default())
}

/// `⋃ A^co x A^co` over the maximal Cartesian squares `A x A ⊆ E`.
pub fn cartesian_hull_with(e: &PairMask, settings: &Settings) -> Result<PolytopeProductSet> {
    let cloud = e.cloud().clone();
    if !(cloud.dim() == 1 || cloud.dim() == 2) {
        return Err(Error::UnsupportedDimension {
            op: "cartesian_hull",
            supported: "1 or 2",
            dim: cloud.dim(),
        });
    }
    let family = maximal_squares_with(e, settings)?;
    let factors = settings.exec.map(family.squares(), |sq| {
        Polytope::hull_of(sq.iter().map(|&i| cloud.point(i)))
    });
    Ok(PolytopeProductSet { cloud, factors })
}

/// Grid pairs `(i, j)` with `p_i, p_j` in a common factor, boundary tolerance `h / 2`.
pub fn rasterize(s: &PolytopeProductSet, cloud: &Arc<SlopeCloud>) -> Result<PairMask> {
    rasterize_with(s, cloud, Exec::default())
}

pub fn rasterize_with(
    s: &PolytopeProductSet,
    cloud: &Arc<SlopeCloud>,
    exec: Exec,
) -> Result<PairMask> {
    if s.cloud.dim() != cloud.dim() {
        return Err(Error::InvalidInput(format!(
            "cannot rasterize a d = {} set on a d = {} cloud",
            s.cloud.dim(),
            cloud.dim()
        )));
    }
    let tol = cloud.spacing() / 2.0;
    let members: Vec<Vec<usize>> = exec.map(&s.factors, |q| {
        (0..cloud.len())
            .filter(|&i| q.contains(cloud.point(i), tol))
            .collect()
    });
    let mut out = PairMask::empty(cloud.clone());
    for m in &members {
        for &i in m {
            for &j in m {
                out.set(i, j, true);
            }
        }
    }
    Ok(out)
}

/// `rasterize(cartesian_hull(E))` on the cloud of `E`.
pub fn cartesian_closure(e: &PairMask, settings: &Settings) -> Result<PairMask> {
    let hull = cartesian_hull_with(e, settings)?;
    rasterize_with(&hull, e.cloud(), settings.exec)
}

pub fn has_basic_cartesian_convexification(e: &PairMask) -> Result<bool> {
    has_basic_cartesian_convexification_with(e, &Settings::default())
}

/// The union of convexified maximal squares is itself Cartesian convex on the grid.
pub fn has_basic_cartesian_convexification_with(e: &PairMask, settings: &Settings) -> Result<bool> {
    let once = cartesian_closure(e, settings)?;
    let twice = cartesian_closure(&once, settings)?;
    Ok(once == twice)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, lo: f64, hi: f64) -> Arc<SlopeCloud> {
        Arc::new(SlopeCloud::uniform(1, n, lo, hi).unwrap())
    }

    fn idx(c: &SlopeCloud, x: f64) -> usize {
        c.snap_default(&[x]).unwrap()
    }

    #[test]
    fn corners_fill_the_square() {
        let c = grid(21, -1.0, 1.0);
        let (a, b) = (idx(&c, -1.0), idx(&c, 1.0));
        let e = PairMask::from_pairs(c.clone(), &[(a, a), (a, b), (b, a), (b, b)]);
        assert_eq!(separately_convex_hull(&e).unwrap(), PairMask::full(c));
    }

    #[test]
    fn separately_convex_sets_are_fixed() {
        let c = grid(21, -1.0, 1.0);
        let z = idx(&c, 0.0);
        let single = PairMask::from_pairs(c.clone(), &[(z, z)]);
        assert_eq!(separately_convex_hull(&single).unwrap(), single);
        let cross = PairMask::from_fn(c.clone(), |i, j| i == z || j == z);
        assert_eq!(separately_convex_hull(&cross).unwrap(), cross);
    }

    #[test]
    fn hull_rejects_planar_clouds() {
        let c = Arc::new(SlopeCloud::uniform(2, 3, 0.0, 1.0).unwrap());
        assert!(matches!(
            separately_convex_hull(&PairMask::empty(c)),
            Err(Error::UnsupportedDimension { .. })
        ));
    }

    #[test]
    fn hat_subset_examples() {
        let c = grid(3, 0.0, 2.0);
        assert!(hat_subset(&PairMask::from_pairs(c.clone(), &[(0, 1)])).is_empty());
        let sq = PairMask::from_pairs(c.clone(), &[(0, 0), (1, 1), (0, 1), (1, 0)]);
        assert_eq!(hat_subset(&sq), sq);
        let mut m = PairMask::full(c.clone());
        m.set(2, 2, false);
        let expect = PairMask::from_fn(c, |i, j| i != 2 && j != 2);
        assert_eq!(hat_subset(&m), expect);
    }

    #[test]
    fn maximal_squares_examples() {
        let c = grid(5, 0.0, 1.0);
        let full = maximal_squares(&PairMask::full(c.clone())).unwrap();
        assert_eq!(full.squares(), &[vec![0, 1, 2, 3, 4]]);
        let diag = maximal_squares(&PairMask::from_pairs(c.clone(), &[(0, 0), (1, 1)])).unwrap();
        assert_eq!(diag.squares(), &[vec![0], vec![1]]);
        let capped =
            maximal_squares_with(&PairMask::full(c), &Settings::default().with_clique_cap(4));
        assert!(matches!(
            capped,
            Err(Error::CliqueCap {
                vertices: 5,
                cap: 4
            })
        ));
    }

    #[test]
    fn cartesian_hull_in_one_dimension() {
        let c = grid(2, 0.0, 1.0);
        let e = PairMask::from_pairs(c.clone(), &[(0, 0), (1, 1), (0, 1), (1, 0)]);
        let h = cartesian_hull(&e).unwrap();
        assert_eq!(h.factors().len(), 1);
        assert_eq!(h.factors()[0].vertices(), &[vec![0.0], vec![1.0]]);

        let diag = PairMask::from_fn(c.clone(), |i, j| i == j);
        let hd = cartesian_hull(&diag).unwrap();
        assert_eq!(hd.factors().len(), 2);
        assert_eq!(rasterize(&hd, &c).unwrap(), diag);
        assert!(has_basic_cartesian_convexification(&diag).unwrap());
    }

    #[test]
    fn unit_square_factor_in_the_plane() {
        let c = Arc::new(SlopeCloud::uniform(2, 2, 0.0, 1.0).unwrap());
        let h = cartesian_hull(&PairMask::full(c.clone())).unwrap();
        assert_eq!(h.factors().len(), 1);
        assert_eq!(
            h.factors()[0].vertices(),
            &[
                vec![0.0, 0.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0],
                vec![0.0, 1.0]
            ]
        );
    }

    #[test]
    fn rasterize_examples() {
        let c = grid(3, 0.0, 1.0);
        let s = PolytopeProductSet::new(
            c.clone(),
            vec![Polytope::from_vertices(vec![vec![0.0], vec![1.0]])],
        )
        .unwrap();
        assert_eq!(rasterize(&s, &c).unwrap(), PairMask::full(c.clone()));
        let empty = PolytopeProductSet::new(c.clone(), vec![]).unwrap();
        assert!(rasterize(&empty, &c).unwrap().is_empty());

        let c2 = Arc::new(SlopeCloud::uniform(2, 5, 0.0, 1.0).unwrap());
        let tri = Polytope::from_vertices(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        let s2 = PolytopeProductSet::new(c2.clone(), vec![tri]).unwrap();
        let m = rasterize(&s2, &c2).unwrap();
        // h/2 = 0.125; a grid point off the triangle is at distance >= sqrt(2)/8 > 0.125
        let inside = |i: usize| {
            let p = c2.point(i);
            p[0] + p[1] <= 1.0 + 1e-12
        };
        assert_eq!(
            m,
            PairMask::from_fn(c2.clone(), |i, j| inside(i) && inside(j))
        );
    }

    /// Three segments forming a triangle: pairwise intersections create a new
    /// Cartesian square whose hull is not covered.
    #[test]
    fn crossing_segments_spawn_a_square() {
        let c = Arc::new(SlopeCloud::uniform(2, 5, 0.0, 4.0).unwrap());
        let at = |x: f64, y: f64| c.snap_default(&[x, y]).unwrap();
        let segs = [
            (at(0.0, 1.0), at(4.0, 1.0)),
            (at(1.0, 0.0), at(1.0, 4.0)),
            (at(4.0, 0.0), at(0.0, 4.0)),
        ];
        let mut pairs = Vec::new();
        for (p, q) in segs {
            pairs.extend([(p, p), (q, q), (p, q), (q, p)]);
        }
        let e = PairMask::from_pairs(c.clone(), &pairs);
        assert_eq!(maximal_squares(&e).unwrap().len(), 3);
        assert!(!has_basic_cartesian_convexification(&e).unwrap());
    }
}
