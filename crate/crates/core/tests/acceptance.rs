//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::HashSet;
use std::process::ExitCode;
use std::time::Instant;

use fmcount::census::{canonical_curves, run_census, write_csv, CensusConfig, CurveSource};
use fmcount::curve::{curve_new, CurveGroup, CurvePoint, WeierstrassCurve};
use fmcount::fm::{
    fiber_table, fiber_template, BaseKind, BundleKind, FmError, Instance, SurfaceDescriptor, FIBER_ROW_LABELS,
};
use fmcount::structure::{
    automorphism_group, group_structure_check, torsion_subgroup, StructureError,
    TorsionStructure, Tower,
};
use rayon::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn totient(m: u64) -> u64 {
    (1..=m).filter(|&i| gcd(i, m) == 1).count() as u64
}

/// Trace of Frobenius by counting solutions of the curve equation mod p.
fn brute_trace(p: u32, a: [u32; 5]) -> i64 {
    let p = p as i64;
    let [a1, a2, a3, a4, a6] = a.map(|c| c as i64);
    let mut n = 1;
    for x in 0..p {
        for y in 0..p {
            let lhs = y * y + a1 * x * y + a3 * y;
            let rhs = x * x * x + a2 * x * x + a4 * x + a6;
            if (lhs - rhs).rem_euclid(p) == 0 {
                n += 1;
            }
        }
    }
    p + 1 - n
}

/// Expected automorphism count of `y^2 = x^3 + a4 x + a6`, `p >= 5`, read
/// off from which coefficient vanishes.
fn short_model_aut_order(a4: i64, a6: i64) -> usize {
    match (a4 == 0, a6 == 0) {
        (true, _) => 6,
        (_, true) => 4,
        _ => 2,
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn automorphism_table() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    for p in [5u32, 7, 11, 13] {
        for a4 in 0..p as i64 {
            for a6 in 0..p as i64 {
                let Ok(e) = curve_new(p, 0, 0, 0, a4, a6) else { continue };
                checked += 1;
                match automorphism_group(&e, &Tower::default()) {
                    Ok(g) if g.order() == short_model_aut_order(a4, a6) => {}
                    other => failures.push(format!("{e}: {:?}", other.map(|g| g.order()))),
                }
            }
        }
    }
    for (p, a, want, label) in [(3u32, [0i64, 0, 0, -1, 0], 12usize, "Z/3Z ⋊ Z/4Z"), (2, [0, 0, 1, 0, 0], 24, "Q ⋊ Z/3Z")] {
        let e = curve_new(p, a[0], a[1], a[2], a[3], a[4]).unwrap();
        checked += 1;
        let g = automorphism_group(&e, &Tower::default()).unwrap();
        let report = group_structure_check(&g, &e.over(g.field_degree).unwrap());
        if g.order() != want || g.label.to_string() != label || !report.ok() || report.abelian {
            failures.push(format!("{e}: order {} label {}", g.order(), g.label));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures.is_empty() && secs < 120.0,
        format!("{checked} curves, {} mismatches, {secs:.1}s {failures:?}", failures.len()),
    )
}

fn torsion_structure() -> Outcome {
    let mut found = 0;
    let mut escaped = Vec::new();
    let mut failures = Vec::new();
    for p in [5u32, 7] {
        for e in canonical_curves(p) {
            for m in (2..=10u64).filter(|m| m % p as u64 != 0) {
                match torsion_subgroup(&e, m, &Tower::default()) {
                    Ok(t) => {
                        found += 1;
                        let group = e.over(t.field_degree).unwrap();
                        let distinct: HashSet<_> = t.points.iter().collect();
                        let ok = t.structure == TorsionStructure::Rank2 { m }
                            && distinct.len() as u64 == m * m
                            && t.points.iter().all(|pt| group.contains(pt) && group.mul(m as i128, pt).is_infinity());
                        if !ok {
                            failures.push(format!("{e} m={m}"));
                        }
                    }
                    Err(StructureError::NotFoundWithinTower { .. }) => escaped.push(format!("{e} m={m}")),
                    Err(err) => failures.push(format!("{e} m={m}: {err}")),
                }
            }
            let supersingular = brute_trace(p, e.coefficients()) % p as i64 == 0;
            let t = torsion_subgroup(&e, p as u64, &Tower::default());
            let ok = match (&t, supersingular) {
                (Ok(t), true) => t.structure == TorsionStructure::Trivial && t.points == vec![CurvePoint::Infinity],
                (Ok(t), false) => {
                    t.structure == TorsionStructure::Cyclic { order: p as u64 } && t.points.len() == p as usize
                }
                _ => false,
            };
            if !ok {
                failures.push(format!("{e} p-torsion"));
            }
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{found} rank-2 instances verified, {} outside the tower {escaped:?}, failures {failures:?}",
            escaped.len()
        ),
    )
}

/// One resolved grid instance.
struct GridEntry {
    curve: WeierstrassCurve,
    m: u64,
    inst: Instance,
}

struct Grid {
    entries: Vec<GridEntry>,
    escaped: usize,
    unsupported: usize,
}

fn build_grid(primes: &[u32], m_max: u64) -> Grid {
    let jobs: Vec<(WeierstrassCurve, u64)> = primes
        .iter()
        .flat_map(|&p| canonical_curves(p))
        .flat_map(|e| (2..=m_max).map(move |m| (e.clone(), m)))
        .collect();
    let results: Vec<_> = jobs
        .into_par_iter()
        .map(|(e, m)| {
            let r = Instance::resolve(&e, m, &Tower::default());
            (e, m, r)
        })
        .collect();
    let mut grid = Grid {
        entries: Vec::new(),
        escaped: 0,
        unsupported: 0,
    };
    for (curve, m, r) in results {
        match r {
            Ok(inst) => grid.entries.push(GridEntry { curve, m, inst }),
            Err(FmError::Structure(StructureError::NotFoundWithinTower { .. })) => grid.escaped += 1,
            Err(FmError::NoPointOfOrder { .. } | FmError::Structure(StructureError::UnsupportedMixedOrder { .. })) => {
                grid.unsupported += 1
            }
            Err(err) => panic!("{curve} m={m}: {err}"),
        }
    }
    grid
}

fn stabilizers(grid: &Grid) -> Outcome {
    let results: Vec<(usize, Vec<String>)> = grid
        .entries
        .par_iter()
        .map(|g| {
            let group: &CurveGroup = &g.inst.group;
            let id = g.inst.aut.identity();
            let mut checked = 0;
            let mut bad = Vec::new();
            for a in &g.inst.torsion.points {
                let order = (1..=g.m)
                    .filter(|d| g.m % d == 0)
                    .find(|&d| group.mul(d as i128, a).is_infinity())
                    .unwrap();
                if order < 4 {
                    continue;
                }
                checked += 1;
                let fixers = g.inst.aut.elements.iter().filter(|phi| phi.apply(group, a) == *a).count();
                if fixers != 1 || g.inst.aut.elements.iter().any(|phi| phi != id && phi.apply(group, a) == *a) {
                    bad.push(format!("{} m={} a={a}", g.curve, g.m));
                }
            }
            (checked, bad)
        })
        .collect();
    let checked: usize = results.iter().map(|r| r.0).sum();
    let bad: Vec<String> = results.into_iter().flat_map(|r| r.1).collect();
    outcome(bad.is_empty() && checked > 0, format!("{checked} points of order >= 4, violations {bad:?}"))
}

fn h_laws(grid: &Grid) -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for g in grid.entries.iter().filter(|g| g.m >= 4) {
        checked += 1;
        let h = g.inst.h_group().unwrap();
        let m = g.m;
        let set: HashSet<u64> = h.members.iter().copied().collect();
        let closed = h.members.iter().all(|&i| h.members.iter().all(|&j| set.contains(&(i * j % m))));
        let inverses = h.members.iter().all(|&i| h.members.iter().any(|&j| i * j % m == 1));
        let units = h.members.iter().all(|&i| gcd(i, m) == 1);
        let ok = closed
            && inverses
            && units
            && set.contains(&1)
            && set.contains(&(m - 1))
            && [2, 4, 6].contains(&h.size())
            && g.inst.aut.order() % h.size() == 0;
        if !ok {
            bad.push(format!("{} m={m} H={:?}", g.curve, h.members));
        }
    }
    outcome(bad.is_empty() && checked > 0, format!("{checked} instances, violations {bad:?}"))
}

fn j1728_over_f5() -> Outcome {
    let e = curve_new(5, 0, 0, 0, 1, 0).unwrap();
    let t = brute_trace(5, e.coefficients());
    let inst = Instance::resolve(&e, 5, &Tower::default()).unwrap();
    let r = inst.partners().unwrap();
    let oracle = inst.oracle().unwrap();
    let ok = t == 2 && r.h.size() == 4 && inst.aut.order() == 4 && r.count == 1 && oracle == 1;
    outcome(
        ok,
        format!("t={t}, |H|={}, |Aut|={}, count={}, oracle={oracle}", r.h.size(), inst.aut.order(), r.count),
    )
}

fn oracle_equivalence(grid: &Grid) -> Outcome {
    let start = Instant::now();
    let results: Vec<Option<String>> = grid
        .entries
        .par_iter()
        .filter(|g| g.curve.p() >= 5)
        .map(|g| {
            let r = g.inst.partners().unwrap();
            let oracle = g.inst.oracle().unwrap();
            let ok = r.count == oracle && r.count * r.h.size() as u64 == totient(g.m);
            (!ok).then(|| format!("{} m={} count={} oracle={oracle}", g.curve, g.m, r.count))
        })
        .collect();
    let checked = results.len();
    let bad: Vec<String> = results.into_iter().flatten().collect();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        bad.is_empty() && checked > 0 && secs < 600.0,
        format!("{checked} instances, {} mismatches, {secs:.1}s {bad:?}", bad.len()),
    )
}

fn bound(grid: &Grid) -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for g in grid.entries.iter().filter(|g| g.m >= 3) {
        checked += 1;
        let r = g.inst.partners().unwrap();
        let phi = totient(g.m);
        let is_pm1 = r.h.members == vec![1, g.m - 1];
        if !(r.bound_ok && 2 * r.count <= phi && ((2 * r.count == phi) == is_pm1)) {
            bad.push(format!("{} m={} count={} H={:?}", g.curve, g.m, r.count, r.h.members));
        }
    }
    outcome(bad.is_empty() && checked > 0, format!("{checked} instances, violations {bad:?}"))
}

fn fiber_golden() -> Outcome {
    let golden = include_str!("golden/fiber_table.txt");
    let rendered: Vec<String> = FIBER_ROW_LABELS
        .iter()
        .map(|l| fiber_template(l).unwrap().table_line())
        .collect();
    let lines: Vec<&str> = golden.lines().collect();
    let mut bad: Vec<String> = lines
        .iter()
        .zip(&rendered)
        .filter(|(g, r)| **g != r.as_str())
        .map(|(g, r)| format!("{g:?} vs {r:?}"))
        .collect();
    if lines.len() != rendered.len() {
        bad.push(format!("{} golden rows, {} rendered", lines.len(), rendered.len()));
    }
    use BundleKind::*;
    let concrete = [
        (SurfaceDescriptor::decomposable(TrivialSum, 3), "no multiple fibers"),
        (SurfaceDescriptor::decomposable(LineSum { order: 7 }, 0), "(7,7)"),
        (SurfaceDescriptor::decomposable(LineSumInfinite, 5), "no elliptic fibrations"),
        (SurfaceDescriptor::decomposable(Indecomposable, 0), "no elliptic fibrations"),
        (SurfaceDescriptor::decomposable(Indecomposable, 7), "(5/7*)"),
        (SurfaceDescriptor::odd(3, None), "(2,2,2)"),
        (SurfaceDescriptor::odd(2, Some(BaseKind::Supersingular)), "(1/2*)"),
        (SurfaceDescriptor::odd(2, Some(BaseKind::Ordinary)), "(2, 0/2*)"),
    ];
    let mut labels = HashSet::new();
    for (d, want) in concrete {
        let row = fiber_table(&d).unwrap();
        labels.insert(row.label);
        if row.fibers() != want {
            bad.push(format!("{d:?}: {} != {want}", row.fibers()));
        }
    }
    if labels.len() != FIBER_ROW_LABELS.len() {
        bad.push("descriptor shapes do not reach every row".into());
    }
    outcome(bad.is_empty(), format!("{} rows against the golden file {bad:?}", rendered.len()))
}

fn headline() -> Outcome {
    let e = curve_new(7, 0, 0, 0, 1, 1).unwrap();
    let j = e.j_invariant();
    let inst = Instance::resolve(&e, 5, &Tower::default()).unwrap();
    let r = inst.partners().unwrap();
    let ok = j != 0 && j != 1728 % 7 && r.representatives == vec![1, 2] && r.count == 2 && r.count == totient(5) / 2;
    outcome(ok, format!("{e}: representatives {:?}, count {}", r.representatives, r.count))
}

fn determinism() -> Outcome {
    let config = CensusConfig {
        primes: vec![5, 7, 2],
        curve_source: CurveSource::CanonicalPerJ,
        m_range: 2..=12,
        verify_oracle: true,
        tower: Tower::default(),
    };
    let render = || {
        let rows = run_census(&config).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        buf
    };
    let a = render();
    let b = render();
    outcome(a == b && !a.is_empty(), format!("{} bytes per run", a.len()))
}

fn main() -> ExitCode {
    let mut all_pass = true;
    let mut clock = Instant::now();
    let mut report = |n: u32, name: &str, o: Outcome| {
        all_pass &= o.pass;
        println!(
            "criterion {n:>2} {} {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            clock.elapsed().as_secs_f64()
        );
        clock = Instant::now();
    };
    report(1, "automorphism table", automorphism_table());
    report(2, "torsion structure", torsion_structure());
    let start = Instant::now();
    let grid = build_grid(&[2, 3, 5, 7, 11, 13], 24);
    println!(
        "grid: {} instances resolved, {} outside the tower, {} unsupported, {:.1}s",
        grid.entries.len(),
        grid.escaped,
        grid.unsupported,
        start.elapsed().as_secs_f64()
    );
    report(3, "stabilizers of points of order >= 4", stabilizers(&grid));
    report(4, "H-subgroup laws", h_laws(&grid));
    report(5, "y^2 = x^3 + x over F_5, m = 5", j1728_over_f5());
    report(6, "oracle equivalence", oracle_equivalence(&grid));
    report(7, "partner bound", bound(&grid));
    report(8, "fiber table golden", fiber_golden());
    report(9, "generic curve, m = 5", headline());
    report(10, "census determinism", determinism());
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
