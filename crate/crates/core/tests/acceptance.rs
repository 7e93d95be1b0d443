//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use placement_core::analysis::{
    first_appearance, near_predicate_boundary, region_predicate_m4, sweep_plane, uniform_gap,
    verify_cor41, verify_counterexample, verify_prop51, verify_thm41, verify_thm42, Grid,
    PlaneRegion, RegionVerdict,
};
use placement_core::{
    closed_form_pe2, enumerate_partitions, error_probability, partition_count, simulate, Placement,
    SensorModel, TieRule,
};

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

/// Partition numbers from Euler's pentagonal recurrence.
fn pentagonal(max: usize) -> Vec<u64> {
    let mut p = vec![0i64; max + 1];
    p[0] = 1;
    for m in 1..=max {
        let mut total = 0i64;
        for k in 1.. {
            let k = k as i64;
            let sign = if k % 2 == 1 { 1 } else { -1 };
            let g1 = (k * (3 * k - 1) / 2) as usize;
            if g1 > m {
                break;
            }
            total += sign * p[m - g1];
            let g2 = (k * (3 * k + 1) / 2) as usize;
            if g2 <= m {
                total += sign * p[m - g2];
            }
        }
        p[m] = total;
    }
    p.into_iter().map(|v| v as u64).collect()
}

fn partitions() -> Outcome {
    let four: Vec<Vec<usize>> = enumerate_partitions(4).unwrap().items().to_vec();
    let expected = vec![
        vec![4],
        vec![3, 1],
        vec![2, 2],
        vec![2, 1, 1],
        vec![1, 1, 1, 1],
    ];
    let oracle = pentagonal(12);
    let mismatched: Vec<usize> = (1..=12)
        .filter(|&m| {
            partition_count(m).unwrap() != oracle[m]
                || enumerate_partitions(m).unwrap().len() as u64 != oracle[m]
        })
        .collect();
    let pass = partition_count(4).unwrap() == 5 && four == expected && mismatched.is_empty();
    outcome(
        pass,
        format!("p(4) list {four:?}; mismatches for m <= 12: {mismatched:?}"),
    )
}

fn two_sensor_oracle() -> Outcome {
    let stacked = Placement::new(&[2], 2).unwrap();
    let spread = Placement::new(&[1, 1], 2).unwrap();
    let mut worst: f64 = 0.0;
    let mut nodes = 0;
    for i_d in 0..=100 {
        for i_f in 0..=100 {
            let model = SensorModel::new(i_d as f64 / 100.0, i_f as f64 / 100.0).unwrap();
            let flipped = model.flip();
            for p in [&stacked, &spread] {
                let pe = error_probability(p, &model, 2).unwrap().value;
                worst = worst.max((pe - closed_form_pe2(p, &model).unwrap()).abs());
                worst = worst.max((pe - closed_form_pe2(p, &flipped).unwrap()).abs());
                worst = worst.max((pe - error_probability(p, &flipped, 2).unwrap().value).abs());
            }
            nodes += 1;
        }
    }
    outcome(
        worst <= 1e-12,
        format!("{nodes} nodes, max |diff| {worst:.2e} (tol 1e-12)"),
    )
}

fn uniform_vs_pair() -> Outcome {
    let report = verify_thm41(5, 0.02).unwrap();
    let grid = Grid::new(0.02).unwrap();
    let div = grid.divisions();
    let mut stray = Vec::new();
    for m in 2..=5 {
        for i_d in grid.interior() {
            for i_f in 1..=i_d {
                let model = SensorModel::new(grid.value(i_d), grid.value(i_f)).unwrap();
                let gap = uniform_gap(m, &model).unwrap();
                let on_curve = i_d == i_f || (m == 2 && i_d + i_f == div);
                if gap.abs() <= 1e-12 && !on_curve {
                    stray.push((m, grid.value(i_f), grid.value(i_d)));
                }
            }
        }
    }
    outcome(
        report.pass && stray.is_empty(),
        format!(
            "{} nodes, max violation {:.2e} (tol 1e-12); equality off the tie curves: {}",
            report.checked,
            report.max_violation,
            stray.len()
        ),
    )
}

fn scaled_differences() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for (m, n1, n2) in [(3, 4, 6), (4, 5, 7)] {
        let r = verify_thm42(m, n1, n2, 0.05).unwrap();
        pass &= r.pass;
        detail.push(format!(
            "({m},{n1},{n2}) {} pairs max {:.2e}",
            r.checked, r.max_violation
        ));
    }
    outcome(pass, format!("{} (tol 1e-10)", detail.join("; ")))
}

fn extra_point() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for m in [3, 4] {
        let (r, sets) = verify_cor41(m, 0.01).unwrap();
        pass &= r.pass;
        detail.push(format!(
            "m={m}: {{{}}} -> {{{}}}",
            sets.equal_points.join(", "),
            sets.extra_point.join(", ")
        ));
    }
    outcome(pass, detail.join("; "))
}

fn four_sensor_regions() -> Outcome {
    let step = 0.005;
    let map = sweep_plane(4, 4, step, PlaneRegion::PdGePf).unwrap();
    let (mut agree, mut far, mut near) = (0, 0, 0);
    for cell in &map.cells {
        let Some(best) = cell.optimum.strict_best() else {
            continue;
        };
        let (f, d) = (cell.node.p_f, cell.node.p_d);
        let RegionVerdict::Optimal(pred) = region_predicate_m4(f, d) else {
            continue;
        };
        if &pred == best {
            agree += 1;
        } else if near_predicate_boundary(f, d, step) {
            near += 1;
        } else {
            far += 1;
        }
    }
    let targets: [(&[usize], f64, &str); 3] = [
        (&[2, 2], 2.0 / 3.0, "2/3"),
        (&[3, 1], 373.0 / 539.0, "373/539"),
        (&[4], 947.0 / 1093.0, "947/1093"),
    ];
    let mut switches = Vec::new();
    let mut switches_ok = true;
    for (counts, expect, label) in targets {
        let target = Placement::new(counts, 4).unwrap();
        let found = first_appearance(4, 4, &target, step, 4000).unwrap();
        let ok = found.as_ref().is_some_and(|s| {
            (s.refined - expect).abs() <= step
                && s.grid_bracket.0 - step <= expect
                && expect <= s.grid_bracket.1 + step
        });
        switches_ok &= ok;
        match found {
            Some(s) => switches.push(format!("({target}) at {:.5} vs {label}", s.refined)),
            None => switches.push(format!("({target}) never appears")),
        }
    }
    outcome(
        far == 0 && switches_ok,
        format!(
            "{agree} agree, {near} disagree near a boundary, {far} disagree elsewhere; {}",
            switches.join(", ")
        ),
    )
}

fn monotone_small() -> Outcome {
    let r = verify_prop51(0.01).unwrap();
    outcome(
        r.pass,
        format!(
            "{} strict nodes checked on both axes, {} ties skipped, {} violations",
            r.checked, r.skipped, r.violations
        ),
    )
}

fn seven_sensor_counterexample() -> Outcome {
    let ev = verify_counterexample(0.01).unwrap();
    let probes: Vec<String> = ev
        .probes
        .iter()
        .map(|p| {
            format!(
                "({:.2},{:.2})->({}){}",
                p.p_f,
                p.p_d,
                p.optimum.first(),
                if p.reproduced { "" } else { " MISMATCH" }
            )
        })
        .collect();
    outcome(
        ev.pass,
        format!(
            "{}; violations along p_f {}, along p_d {}",
            probes.join(" "),
            ev.along_pf.violations,
            ev.along_pd.violations
        ),
    )
}

fn monte_carlo() -> Outcome {
    let trials = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_z: f64 = 0.0;
    let mut failures = 0;
    let mut first = None;
    for i in 0..20 {
        let m = rng.random_range(1..=6);
        let n = m + rng.random_range(0..=2);
        let parts = enumerate_partitions(m).unwrap();
        let counts = &parts.items()[rng.random_range(0..parts.len())];
        let placement = Placement::new(counts, n).unwrap();
        let p_d = rng.random_range(1..=19) as f64 / 20.0;
        let p_f = rng.random_range(1..=19) as f64 / 20.0;
        let model = SensorModel::new(p_d, p_f).unwrap();
        let exact = error_probability(&placement, &model, n).unwrap().value;
        let seed = 1000 + i;
        let r = simulate(&placement, &model, n, trials, seed, TieRule::UniformRandom).unwrap();
        let z = r.z_score(exact).abs();
        worst_z = worst_z.max(z);
        if z > 4.0 {
            failures += 1;
        }
        first.get_or_insert((placement, model, n, seed, r));
    }
    let (placement, model, n, seed, reference) = first.unwrap();
    let rerun = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate(&placement, &model, n, trials, seed, TieRule::UniformRandom))
            .unwrap()
    };
    let deterministic = rerun(1) == reference && rerun(4) == reference;
    outcome(
        failures == 0 && deterministic,
        format!(
            "20 instances, max |z| {worst_z:.2} (limit 4), outside {failures}; reproducible across 1/4 threads: {deterministic}"
        ),
    )
}

fn sweep_inventories() -> Outcome {
    let cases: [(usize, usize, &[&[usize]]); 5] = [
        (3, 3, &[&[3], &[2, 1]]),
        (3, 4, &[&[3], &[2, 1], &[1, 1, 1]]),
        (4, 4, &[&[4], &[3, 1], &[2, 2], &[2, 1, 1]]),
        (4, 5, &[&[4], &[3, 1], &[2, 2], &[2, 1, 1], &[1, 1, 1, 1]]),
        (
            5,
            6,
            &[
                &[5],
                &[4, 1],
                &[3, 2],
                &[2, 2, 1],
                &[2, 1, 1, 1],
                &[1, 1, 1, 1, 1],
            ],
        ),
    ];
    let mut pass = true;
    let mut detail = Vec::new();
    for (m, n, expected) in cases {
        let a = sweep_plane(m, n, 0.005, PlaneRegion::PdGePf).unwrap();
        let b = sweep_plane(m, n, 0.005, PlaneRegion::PdGePf).unwrap();
        let identical = a.to_csv() == b.to_csv();
        let expected: BTreeSet<Vec<usize>> = expected.iter().map(|c| c.to_vec()).collect();
        let found = a.strict_set();
        let ok = identical && found == expected;
        pass &= ok;
        detail.push(format!(
            "({m},{n}) {}{}",
            found.len(),
            if ok { "" } else { " MISMATCH" }
        ));
    }
    outcome(
        pass,
        format!("strict placements per map: {}", detail.join(", ")),
    )
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("partition facts", Duration::from_secs(1), partitions),
        (
            "two-sensor oracle",
            Duration::from_secs(5),
            two_sensor_oracle,
        ),
        (
            "uniform vs (2,1,...,1)",
            Duration::from_secs(120),
            uniform_vs_pair,
        ),
        (
            "scaled differences across N",
            Duration::from_secs(120),
            scaled_differences,
        ),
        (
            "extra point adds uniform",
            Duration::from_secs(300),
            extra_point,
        ),
        (
            "four-sensor regions",
            Duration::from_secs(180),
            four_sensor_regions,
        ),
        (
            "monotone on scale",
            Duration::from_secs(600),
            monotone_small,
        ),
        (
            "(7,8) counterexample",
            Duration::from_secs(60),
            seven_sensor_counterexample,
        ),
        (
            "monte carlo agreement",
            Duration::from_secs(120),
            monte_carlo,
        ),
        (
            "sweep inventories",
            Duration::from_secs(300),
            sweep_inventories,
        ),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = check();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= *limit;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<30} {} [{:.2}s / {}s] {}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            out.detail
        );
    }
    println!("acceptance: {} passed, {} failed", 10 - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
