//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.
//!
//! Run with `cargo test -p suprelax-core --test acceptance`.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use rand::Rng;
use suprelax::envelopes::{cartesian_lc_envelope_with, hat_density, slc_envelope};
use suprelax::exprlang::DensityExpr;
use suprelax::functionals::{evaluate_sup, slope_indices, sup_over_indices};
use suprelax::hulls::{hat_subset, maximal_squares, separately_convex_hull};
use suprelax::oracle::{lsc_experiment, oscillation_sequence, relax_oracle_against, Verdict};
use suprelax::{
    sublevel, DensityTable, Error, Interval, PairMask, Settings, SlopeCloud, SlopeField,
};

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn bbox(m: &PairMask) -> Option<(usize, usize, usize, usize)> {
    m.iter_set().fold(None, |b, (i, j)| match b {
        None => Some((i, i, j, j)),
        Some((r0, r1, c0, c1)) => Some((r0.min(i), r1.max(i), c0.min(j), c1.max(j))),
    })
}

fn hull_laws() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let c = cloud1(16, 0.0, 1.0);
    let mut violations = 0;
    for trial in 0..500 {
        let p = 0.01 + 0.3 * (trial % 10) as f64 / 10.0;
        let e = random_mask(&mut r, &c, p);
        let f = e.union(&random_mask(&mut r, &c, 0.03));
        let he = separately_convex_hull(&e).unwrap();
        let ok = e.is_subset(&he)
            && separately_convex_hull(&he).unwrap() == he
            && he.is_subset(&separately_convex_hull(&f).unwrap())
            && bbox(&he) == bbox(&e);
        violations += usize::from(!ok);
    }
    let t = start.elapsed();
    outcome(
        violations == 0 && t < Duration::from_secs(5),
        format!("500 masks 16x16, {violations} violations, {t:.2?} (limit 5 s)"),
    )
}

fn clique_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = r.gen_range(1..=12);
        let c = cloud1(n, 0.0, 1.0);
        let p = r.gen_range(0.2..0.95);
        let e = random_mask(&mut r, &c, p);
        if maximal_squares(&e).unwrap().squares() != brute_squares(&e).as_slice() {
            mismatches += 1;
        }
    }
    let t = start.elapsed();
    outcome(
        mismatches == 0 && t < Duration::from_secs(30),
        format!("200 masks |P| <= 12, {mismatches} mismatches, {t:.2?} (limit 30 s)"),
    )
}

fn level_set_identity() -> Outcome {
    let mut r = rng(3);
    let c = cloud1(41, -2.0, 2.0);
    let (mut levels, mut bad) = (0, 0);
    for k in 0..20 {
        let v = if k % 2 == 0 {
            random_sym_diag_table(&mut r, &c)
        } else {
            random_lattice_sym_diag(&mut r, &c)
        };
        let e = slc_envelope(&v).unwrap();
        for &lvl in &e.levels {
            levels += 1;
            if sublevel(&e.table, lvl) != separately_convex_hull(&sublevel(&v, lvl)).unwrap() {
                bad += 1;
            }
        }
    }
    outcome(
        bad == 0,
        format!("20 tables on 41 points, {levels} levels, {bad} mismatches"),
    )
}

fn hat_laws() -> Outcome {
    let mut r = rng(4);
    let c = cloud1(15, -1.0, 1.0);
    let mut bad = 0;
    let mut tables = Vec::new();
    for _ in 0..20 {
        let w = random_table(&mut r, &c);
        let h = hat_density(&w);
        let mut ok = w.le(&h) && hat_density(&h) == h && h.is_symmetric() && h.is_diagonal();
        for lvl in w.distinct_values() {
            ok &= sublevel(&h, lvl) == hat_subset(&sublevel(&w, lvl));
        }
        bad += usize::from(!ok);
        tables.push((w, h));
    }
    let mut field_bad = 0;
    for k in 0..200 {
        let (w, h) = &tables[k % tables.len()];
        let s = random_field(&mut r, &c, Interval::unit(), 6);
        if evaluate_sup(w, &s).unwrap() != evaluate_sup(h, &s).unwrap() {
            field_bad += 1;
        }
    }
    outcome(
        bad == 0 && field_bad == 0,
        format!("20 tables with {bad} law violations, 200 fields with {field_bad} mismatches"),
    )
}

fn suite_cloud() -> Arc<SlopeCloud> {
    cloud1(81, -2.0, 2.0)
}

fn suite() -> Vec<(&'static str, DensityTable)> {
    let c = suite_cloud();
    let near = |x: f64, set: &[f64]| set.iter().any(|&a| (x - a).abs() < 1e-9);
    let a_set = [-1.0, 1.0];
    let b_set = [-0.5, 1.5];
    let two_level = DensityTable::from_fn(c.clone(), |i, j| {
        let (x, y) = (c.point(i)[0], c.point(j)[0]);
        if (near(x, &a_set) && near(y, &a_set)) || (near(x, &b_set) && near(y, &b_set)) {
            0.5
        } else {
            2.0
        }
    })
    .unwrap();
    vec![
        ("max-abs", max_of(&c, f64::abs)),
        ("double-well", max_of(&c, g)),
        ("tilted double-well", max_of(&c, |x| g(x) + 0.05 * x)),
        ("two-level", two_level),
        ("random", random_sym_diag_table(&mut rng(5), &c)),
    ]
}

fn targets() -> Vec<(&'static str, SlopeField)> {
    let i = Interval::unit();
    vec![
        ("0", SlopeField::scalar(i, &[0.0]).unwrap()),
        ("0.5", SlopeField::scalar(i, &[0.5]).unwrap()),
        ("(-1,1)", SlopeField::scalar(i, &[-1.0, 1.0]).unwrap()),
        (
            "ramp",
            SlopeField::scalar(i, &[-0.75, -0.25, 0.25, 0.75]).unwrap(),
        ),
    ]
}

fn relaxation_matches_envelope(densities: &[(&str, DensityTable)]) -> Outcome {
    let h = suite_cloud().spacing();
    let mut pass = true;
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (name, v) in densities {
        let start = Instant::now();
        let env = slc_envelope(v).unwrap().table;
        for (tname, t) in targets() {
            let rep = relax_oracle_against(v, &t, Some(&env), &Settings::default()).unwrap();
            let idx = slope_indices(v.cloud(), &t).unwrap();
            let max_pair = sup_over_indices(&env, &idx);
            match rep.oracle_value {
                Some(o) => {
                    let gap = (o - max_pair).abs();
                    worst = worst.max(gap);
                    if gap > 2.0 * h {
                        pass = false;
                        lines.push(format!("{name}/{tname}: gap {gap}"));
                    }
                }
                None => {
                    pass = false;
                    lines.push(format!("{name}/{tname}: subset cap reached"));
                }
            }
        }
        let t = start.elapsed();
        if t >= Duration::from_secs(60) {
            pass = false;
        }
        lines.push(format!("{name} {t:.2?}"));
    }
    outcome(
        pass,
        format!(
            "5 densities x 4 targets, max gap {worst:.3e} (limit 2h = {:.3}); {}",
            2.0 * h,
            lines.join(", ")
        ),
    )
}

fn line_reduction(densities: &[(&str, DensityTable)]) -> Outcome {
    let settings = Settings::default().with_clique_cap(128);
    let mut pass = true;
    let (mut compared, mut skipped) = (0, 0);
    let mut notes = Vec::new();
    for (name, v) in densities {
        let slc = slc_envelope(v).unwrap().table;
        match cartesian_lc_envelope_with(v, &settings) {
            Ok(x) => {
                compared += 1;
                let diff = x
                    .table
                    .values()
                    .iter()
                    .zip(slc.values())
                    .filter(|(a, b)| a != b)
                    .count();
                if diff > 0 {
                    pass = false;
                    notes.push(format!("{name}: {diff} entries differ"));
                }
            }
            Err(Error::NoBasicConvexification { level }) => {
                skipped += 1;
                notes.push(format!("{name}: no basic convexification at {level}"));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{name}: {e}"));
            }
        }
    }
    outcome(
        pass,
        format!(
            "{compared} densities equal entrywise, {skipped} skipped{}{}",
            if notes.is_empty() { "" } else { "; " },
            notes.join(", ")
        ),
    )
}

fn lsc_characterization(densities: &[(&str, DensityTable)]) -> Outcome {
    let h = suite_cloud().spacing();
    let ks = [2, 4, 8, 16];
    let mut pass = true;
    let mut notes = Vec::new();
    let mut level_convex: Vec<(String, DensityTable)> =
        vec![("max-abs".into(), densities[0].1.clone())];
    for (name, v) in densities {
        level_convex.push((format!("slc({name})"), slc_envelope(v).unwrap().table));
    }
    let mut consistent = 0;
    for (name, v) in &level_convex {
        for (tname, t) in targets() {
            let rep = lsc_experiment(v, &t, &ks, &Settings::default()).unwrap();
            if rep.verdict == Verdict::ConsistentWithLsc {
                consistent += 1;
            } else {
                pass = false;
                notes.push(format!("{name}/{tname} reported a violation"));
            }
        }
    }
    let dw = &densities[1].1;
    let zero = SlopeField::scalar(Interval::unit(), &[0.0]).unwrap();
    let rep = lsc_experiment(dw, &zero, &ks, &Settings::default()).unwrap();
    let ok = rep.verdict == Verdict::LscViolated
        && rep.min_j <= 0.1 + 2.0 * h
        && (rep.j_target - 1.0).abs() <= h;
    pass &= ok;
    outcome(
        pass,
        format!(
            "{consistent}/{} level convex cases consistent; double well: {}, J(u_k) = {}, J(u) = {}{}",
            level_convex.len() * 4,
            rep.verdict,
            rep.min_j,
            rep.j_target,
            if notes.is_empty() { String::new() } else { format!("; {}", notes.join(", ")) }
        ),
    )
}

fn recovery_convergence(densities: &[(&str, DensityTable)]) -> Outcome {
    let dw = &densities[1].1;
    let zero = SlopeField::scalar(Interval::unit(), &[0.0]).unwrap();
    let rep = relax_oracle_against(dw, &zero, None, &Settings::default()).unwrap();
    let w = rep.witness.unwrap();
    let diam = w
        .slopes
        .iter()
        .flat_map(|a| w.slopes.iter().map(move |b| (a[0] - b[0]).abs()))
        .fold(0.0, f64::max);
    let len = zero.interval().length();
    let mut pass = true;
    let mut prev = f64::INFINITY;
    let mut dists = Vec::new();
    for k in [2usize, 4, 8, 16, 32] {
        let osc = oscillation_sequence(&w.slopes, &w.weights, &zero, k, rep.h / 2.0).unwrap();
        let bound = len * diam / (2.0 * k as f64);
        pass &= osc.sup_distance < prev && osc.sup_distance <= bound;
        prev = osc.sup_distance;
        dists.push(format!("k={k}: {:.4} <= {:.4}", osc.sup_distance, bound));
    }
    outcome(pass, format!("witness diam {diam}; {}", dists.join(", ")))
}

fn parser_fuzz() -> Outcome {
    let mut r = rng(9);
    let (mut round_trip_bad, mut eval_bad, mut errors) = (0, 0, 0);
    for _ in 0..200 {
        let tree = random_expr(&mut r, 5);
        let e = DensityExpr::from_tree(tree.clone());
        match DensityExpr::parse(&e.to_string()) {
            Ok(p) if *p.tree() == tree => {}
            _ => round_trip_bad += 1,
        }
        for _ in 0..100 {
            let xi = [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
            let eta = [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0)];
            let want = reference_eval(&tree, &xi, &eta);
            errors += usize::from(want.is_err());
            if classify(e.evaluate(&xi, &eta)) != want {
                eval_bad += 1;
            }
        }
    }
    outcome(
        round_trip_bad == 0 && eval_bad == 0,
        format!("200 expressions, {round_trip_bad} round-trip and {eval_bad} evaluation mismatches ({errors} agreeing error cases)"),
    )
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let densities = suite();
    let criteria: Vec<Criterion> = vec![
        ("hull laws", Box::new(hull_laws)),
        ("clique oracle equivalence", Box::new(clique_oracle)),
        ("level-set identity", Box::new(level_set_identity)),
        ("hat density laws", Box::new(hat_laws)),
        (
            "relaxation at desk scale",
            Box::new(|| relaxation_matches_envelope(&densities)),
        ),
        ("line reduction", Box::new(|| line_reduction(&densities))),
        (
            "lsc characterization",
            Box::new(|| lsc_characterization(&densities)),
        ),
        (
            "recovery-sequence convergence",
            Box::new(|| recovery_convergence(&densities)),
        ),
        ("expression parser", Box::new(parser_fuzz)),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        failed += usize::from(!o.pass);
        println!(
            "{} criterion {}: {name}: {} [{:.2?}]",
            if o.pass { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            start.elapsed()
        );
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
