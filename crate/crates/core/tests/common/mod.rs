//! Generators and reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use suprelax::envelopes::hat_density;
use suprelax::exprlang::{BinOp, Expr, Func, Var};
use suprelax::hulls::hat_subset;
use suprelax::{DensityTable, Error, Interval, PairMask, SlopeCloud, SlopeField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cloud1(n: usize, lo: f64, hi: f64) -> Arc<SlopeCloud> {
    Arc::new(SlopeCloud::uniform(1, n, lo, hi).unwrap())
}

pub fn cloud2(n: usize, lo: f64, hi: f64) -> Arc<SlopeCloud> {
    Arc::new(SlopeCloud::uniform(2, n, lo, hi).unwrap())
}

/// `|ξ² − 1| + 0.1|ξ|`.
pub fn g(x: f64) -> f64 {
    (x * x - 1.0).abs() + 0.1 * x.abs()
}

/// `W(i, j) = max(f(p_i), f(p_j))` on a `d = 1` cloud.
pub fn max_of(cloud: &Arc<SlopeCloud>, f: impl Fn(f64) -> f64) -> DensityTable {
    DensityTable::from_fn(cloud.clone(), |i, j| {
        f(cloud.point(i)[0]).max(f(cloud.point(j)[0]))
    })
    .unwrap()
}

pub fn random_mask(rng: &mut ChaCha8Rng, cloud: &Arc<SlopeCloud>, density: f64) -> PairMask {
    PairMask::from_fn(cloud.clone(), |_, _| rng.gen_bool(density))
}

pub fn random_sym_diag_mask(
    rng: &mut ChaCha8Rng,
    cloud: &Arc<SlopeCloud>,
    density: f64,
) -> PairMask {
    let n = cloud.len();
    let mut m = PairMask::empty(cloud.clone());
    for i in 0..n {
        for j in i..n {
            if rng.gen_bool(density) {
                m.set(i, j, true);
                m.set(j, i, true);
            }
        }
    }
    hat_subset(&m.union(&PairMask::from_fn(cloud.clone(), |i, j| {
        i == j && rng.gen_bool(0.9)
    })))
}

/// Entries on a coarse lattice so that levels repeat.
pub fn random_table(rng: &mut ChaCha8Rng, cloud: &Arc<SlopeCloud>) -> DensityTable {
    DensityTable::from_fn(cloud.clone(), |_, _| rng.gen_range(0..12) as f64 * 0.25).unwrap()
}

/// `max(r_i, r_j, m_ij)` with `r_i ≥ |p_i| / 2`: symmetric, diagonal and coercive.
pub fn random_sym_diag_table(rng: &mut ChaCha8Rng, cloud: &Arc<SlopeCloud>) -> DensityTable {
    let n = cloud.len();
    let r: Vec<f64> = (0..n)
        .map(|i| suprelax_norm(cloud.point(i)) * (0.5 + rng.gen::<f64>()))
        .collect();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let dist: f64 = cloud
                .point(i)
                .iter()
                .zip(cloud.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let v = 0.4 * dist * rng.gen::<f64>();
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    DensityTable::from_fn(cloud.clone(), |i, j| r[i].max(r[j]).max(m[i * n + j])).unwrap()
}

/// Random symmetric diagonal table with few distinct levels.
pub fn random_lattice_sym_diag(rng: &mut ChaCha8Rng, cloud: &Arc<SlopeCloud>) -> DensityTable {
    hat_density(&random_table(rng, cloud))
}

fn suprelax_norm(p: &[f64]) -> f64 {
    p.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cloud-valued field with `1..=max_cells` cells of random lengths.
pub fn random_field(
    rng: &mut ChaCha8Rng,
    cloud: &SlopeCloud,
    interval: Interval,
    max_cells: usize,
) -> SlopeField {
    let m = rng.gen_range(1..=max_cells);
    let mut cuts: Vec<f64> = (0..m - 1)
        .map(|_| interval.a() + interval.length() * rng.gen_range(1..1000) as f64 / 1000.0)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.push(interval.b());
    let cells = cuts
        .into_iter()
        .map(|right| suprelax::Cell {
            right,
            slope: cloud.point(rng.gen_range(0..cloud.len())).to_vec(),
        })
        .collect();
    SlopeField::new(interval, cells).unwrap()
}

/// Random syntax tree over `xi_1, xi_2, eta_1, eta_2`.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.5) {
            let nums = [0.0, 0.5, 1.0, 2.0, 3.0, 0.1, 2.5, 1e-3, 7.25, 10.0];
            Expr::Num(*nums.choose(rng).unwrap())
        } else {
            let k = rng.gen_range(1..=2);
            Expr::Var(if rng.gen_bool(0.5) {
                Var::Xi(k)
            } else {
                Var::Eta(k)
            })
        };
    }
    match rng.gen_range(0..8) {
        0 => Expr::Neg(Box::new(random_expr(rng, depth - 1))),
        1 => Expr::Call(Func::Abs, vec![random_expr(rng, depth - 1)]),
        2 | 3 => {
            let n = rng.gen_range(2..=4);
            let f = if rng.gen_bool(0.5) {
                Func::Min
            } else {
                Func::Max
            };
            Expr::Call(f, (0..n).map(|_| random_expr(rng, depth - 1)).collect())
        }
        _ => {
            let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow]
                .choose(rng)
                .unwrap();
            Expr::Bin(
                op,
                Box::new(random_expr(rng, depth - 1)),
                Box::new(random_expr(rng, depth - 1)),
            )
        }
    }
}

#[derive(Debug, PartialEq)]
pub enum RefError {
    DivisionByZero,
    NonFinite,
}

/// Direct recursive evaluation of a syntax tree.
pub fn reference_eval(e: &Expr, xi: &[f64], eta: &[f64]) -> Result<f64, RefError> {
    let check = |v: f64| {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(RefError::NonFinite)
        }
    };
    match e {
        Expr::Num(x) => Ok(*x),
        Expr::Var(Var::Xi(k)) => Ok(xi[k - 1]),
        Expr::Var(Var::Eta(k)) => Ok(eta[k - 1]),
        Expr::Neg(a) => Ok(-reference_eval(a, xi, eta)?),
        Expr::Call(Func::Abs, args) => Ok(reference_eval(&args[0], xi, eta)?.abs()),
        Expr::Call(f, args) => {
            let mut best = reference_eval(&args[0], xi, eta)?;
            for a in &args[1..] {
                let v = reference_eval(a, xi, eta)?;
                best = if *f == Func::Min {
                    best.min(v)
                } else {
                    best.max(v)
                };
            }
            Ok(best)
        }
        Expr::Bin(op, l, r) => {
            let l = reference_eval(l, xi, eta)?;
            let r = reference_eval(r, xi, eta)?;
            match op {
                BinOp::Add => check(l + r),
                BinOp::Sub => check(l - r),
                BinOp::Mul => check(l * r),
                BinOp::Div if r == 0.0 => Err(RefError::DivisionByZero),
                BinOp::Div => check(l / r),
                BinOp::Pow => check(l.powf(r)),
            }
        }
    }
}

pub fn classify(r: suprelax::Result<f64>) -> Result<f64, RefError> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::DivisionByZero) => Err(RefError::DivisionByZero),
        Err(Error::NonFinite) => Err(RefError::NonFinite),
        Err(e) => panic!("unexpected evaluation error {e}"),
    }
}

/// All maximal `A` with `A x A ⊆ E`, by subset enumeration.
pub fn brute_squares(e: &PairMask) -> Vec<Vec<usize>> {
    let n = e.n();
    assert!(n <= 16);
    let ok =
        |s: u32| (0..n).all(|i| s >> i & 1 == 0 || (0..n).all(|j| s >> j & 1 == 0 || e.get(i, j)));
    let good: Vec<u32> = (1..1u32 << n).filter(|&s| ok(s)).collect();
    let mut out: Vec<Vec<usize>> = good
        .iter()
        .filter(|&&s| !good.iter().any(|&t| t != s && t & s == s))
        .map(|&s| (0..n).filter(|&i| s >> i & 1 == 1).collect())
        .collect();
    out.sort();
    out
}

pub fn shuffled<T: Clone>(rng: &mut ChaCha8Rng, v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.shuffle(rng);
    v
}

/// Proptest settings without on-disk regression files.
pub fn cases(n: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases: n,
        failure_persistence: None,
        ..Default::default()
    }
}
