//! Acceptance gate. Runs every criterion at its pinned tolerance, prints one
//! PASS/FAIL line each, and exits nonzero if any fails.

#![allow(clippy::needless_range_loop)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use ftle_core::bench::{reference_table1, suite_input, time_computation, SuiteConfig};
use ftle_core::flows::advect_rk4;
use ftle_core::io::{decode_flowmap, decode_ftle_field, decode_neighbor_table, encode_flowmap};
use ftle_core::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn identity_end_to_end() -> Outcome {
    let mesh =
        make_structured_grid(&[500, 400], &[1.0, 1.0], &[0.0, 0.0]).map_err(|e| e.to_string())?;
    let field = FlowmapField::identity(&mesh, 1.0);
    for s in [
        ExecutionStrategy::SinglePass,
        ExecutionStrategy::data_parallel(4, 4096).unwrap(),
    ] {
        let out = compute_ftle_field(&field, &mesh, s).map_err(|e| e.to_string())?;
        ensure(out.degenerate_count == 0, || {
            format!("{s}: degenerate_count={}", out.degenerate_count)
        })?;
        if let Some(p) = out.values.iter().position(|&v| v != 0.0) {
            return Err(format!("{s}: value {} at point {p}", out.values[p]));
        }
    }
    Ok("200000 points exactly 0, both strategies".into())
}

fn affine_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for dims in [&[500usize, 400][..], &[60, 50, 40][..]] {
        let d = dims.len();
        let mesh = make_structured_grid(dims, &vec![0.01; d], &vec![-1.0; d]).unwrap();
        let mut field = FlowmapField::identity(&mesh, 1.0);
        for p in 0..mesh.npoints() {
            field.values[d * p] *= 2.0;
        }
        for s in [
            ExecutionStrategy::SinglePass,
            ExecutionStrategy::data_parallel(4, 64).unwrap(),
        ] {
            let out = compute_ftle_field(&field, &mesh, s).map_err(|e| e.to_string())?;
            for p in (0..mesh.npoints()).filter(|&p| is_interior(&mesh, p)) {
                let err = (out.values[p] - 2f64.ln()).abs();
                worst = worst.max(err);
                ensure(err <= 1e-12, || {
                    format!("{d}D {s} point {p}: {} vs ln 2", out.values[p])
                })?;
            }
        }
    }
    Ok(format!("max |ftle - ln 2| = {worst:.2e} (2D and 3D)"))
}

fn eigen_residuals() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut worst_res: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    for n in [2, 3] {
        for k in 0..10_000 {
            let scale = [1e-3, 0.1, 1.0, 10.0, 300.0][k % 5];
            let s = random_spd(&mut rng, n, scale);
            let l = max_eigenvalue(&tensor(&s, n));
            let bound = 1e-8 * frobenius(&s, n).powi(n as i32).max(1.0);
            let res = char_det(&s, n, l).abs();
            worst_res = worst_res.max(res / bound);
            ensure(res <= bound, || {
                format!("{n}x{n} sample {k}: residual {res:e} > {bound:e}")
            })?;
            if n == 3 {
                let want = bisect_max_eigenvalue(&s);
                let rel = (l - want).abs() / want.abs();
                worst_rel = worst_rel.max(rel);
                ensure(rel <= 1e-9, || {
                    format!("3x3 sample {k}: {l} vs bisection {want}")
                })?;
            }
        }
    }
    Ok(format!(
        "20000 matrices; worst residual/bound {worst_res:.2e}, worst 3x3 rel err {worst_rel:.2e}"
    ))
}

fn strategy_equivalence() -> Outcome {
    let cfg = SuiteConfig::default();
    let (field, mesh) = suite_input(&cfg, Dim::Two, 200_000).map_err(|e| e.to_string())?;
    let reference = compute_ftle_field(&field, &mesh, ExecutionStrategy::SinglePass)
        .map_err(|e| e.to_string())?;
    for workers in [1, 2, 4, 8] {
        for chunk in [1, 64, 4096] {
            let s = ExecutionStrategy::data_parallel(workers, chunk).unwrap();
            let out = compute_ftle_field(&field, &mesh, s).map_err(|e| e.to_string())?;
            ensure(out.bit_eq(&reference), || {
                format!("{s} differs from single-pass")
            })?;
        }
    }
    Ok("12 data-parallel configurations bit-identical on 200000-point double gyre".into())
}

fn convergence() -> Outcome {
    let g = FlowSpec::double_gyre();
    let mut ratios = Vec::new();
    for x0 in [[0.3, 0.4], [1.2, 0.7], [0.9, 0.2]] {
        let run = |dt: f64| advect_rk4(&g, &x0, 0.0, 5.0, dt).unwrap();
        let dist = |a: &[f64], b: &[f64]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let (a, b, c) = (run(0.1), run(0.05), run(0.025));
        let r = dist(&a, &b) / dist(&b, &c);
        ensure((12.0..=20.0).contains(&r), || {
            format!("RK4 ratio {r} from {x0:?}")
        })?;
        ratios.push(r);
    }

    use std::f64::consts::PI;
    let map = |x: f64, y: f64| {
        (
            [
                x + 0.1 * (2.0 * PI * y).sin() * (PI * x).cos(),
                y + 0.2 * (PI * x).sin() + 0.05 * x * y * y,
            ],
            [
                [
                    1.0 - 0.1 * PI * (2.0 * PI * y).sin() * (PI * x).sin(),
                    0.2 * PI * (2.0 * PI * y).cos() * (PI * x).cos(),
                ],
                [0.2 * PI * (PI * x).cos() + 0.05 * y * y, 1.0 + 0.1 * x * y],
            ],
        )
    };
    let err = |n: usize| {
        let mesh = grid_on_box(&[n, n], &[(0.0, 1.0), (0.0, 1.0)]).unwrap();
        let values = (0..mesh.npoints())
            .flat_map(|p| map(mesh.coord(p)[0], mesh.coord(p)[1]).0)
            .collect();
        let field = FlowmapField::new(Dim::Two, values, 0.0, 1.0).unwrap();
        let mut worst: f64 = 0.0;
        for p in (0..mesh.npoints()).filter(|&p| is_interior(&mesh, p)) {
            let j = flowmap_gradient(&field, &mesh, p).unwrap();
            let exact = map(mesh.coord(p)[0], mesh.coord(p)[1]).1;
            for i in 0..2 {
                for k in 0..2 {
                    worst = worst.max((j.get(i, k) - exact[i][k]).abs());
                }
            }
        }
        worst
    };
    let gr = err(21) / err(41);
    ensure(gr >= 3.5, || format!("gradient ratio {gr}"))?;
    Ok(format!(
        "RK4 ratios {:.2}/{:.2}/{:.2}, gradient ratio {gr:.2}",
        ratios[0], ratios[1], ratios[2]
    ))
}

fn performance() -> Outcome {
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    let workers = cpus.max(4);
    let cfg = SuiteConfig::default();
    let mut lines = Vec::new();
    let mut failed = false;
    for dim in [Dim::Two, Dim::Three] {
        let (field, mesh) = suite_input(&cfg, dim, 600_000).map_err(|e| e.to_string())?;
        let dp = ExecutionStrategy::data_parallel(workers, 4096).unwrap();
        let dp = time_computation(&field, &mesh, dp, 5, 1).map_err(|e| e.to_string())?;
        let sp = time_computation(&field, &mesh, ExecutionStrategy::SinglePass, 5, 1)
            .map_err(|e| e.to_string())?;
        failed |= dp.median_ms >= sp.median_ms;
        lines.push(format!(
            "{dim} 600K: {} {:.1} ms vs single-pass {:.1} ms",
            dp.label, dp.median_ms, sp.median_ms
        ));
    }
    let detail = format!("{}; {cpus} logical CPU(s)", lines.join("; "));
    if failed {
        Err(detail)
    } else {
        Ok(detail)
    }
}

const PUBLISHED: [[f64; 6]; 7] = [
    [11.1, 22.3, 33.7, 371.7, 803.1, 1364.9],
    [10.7, 21.5, 32.5, 359.4, 777.6, 1275.7],
    [6635.5, 13316.5, 6281.4, 26892.7, 54207.4, 34863.8],
    [2085.7, 4116.1, 20034.4, 9194.2, 18455.6, 92703.2],
    [30.1, 51.1, 75.5, 71.5, 172.6, 240.1],
    [20.7, 32.5, 39.0, 41.3, 64.0, 90.1],
    [17.2, 23.1, 31.6, 33.0, 51.3, 70.6],
];
const ROWS: [&str; 7] = [
    "S-NR naïve",
    "O-NR naïve",
    "S-ST naïve",
    "O-ST naïve",
    "CPU 1 thread",
    "CPU 4 threads",
    "CPU 8 threads",
];
const COLS: [&str; 6] = [
    "2D 200K", "2D 400K", "2D 600K", "3D 200K", "3D 400K", "3D 600K",
];

fn reference_fidelity() -> Outcome {
    let t = reference_table1();
    let entries: Vec<_> = t.entries().collect();
    ensure(entries.len() == 42, || format!("{} entries", entries.len()))?;
    for (i, (label, dim, n, ms)) in entries.into_iter().enumerate() {
        let (r, c) = (i / 6, i % 6);
        ensure(label == ROWS[r], || format!("row {r} label {label}"))?;
        ensure(format!("{dim} {}K", n / 1000) == COLS[c], || {
            format!("column {c}: {dim} {n}")
        })?;
        ensure(ms == PUBLISHED[r][c], || format!("{label} {dim} {n}: {ms}"))?;
    }

    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run_with(
        ["ftle", "report", "--reference", "table1"],
        &mut out,
        &mut err,
    );
    ensure(code == 0, || format!("report exited {code}"))?;
    let text = String::from_utf8(out).unwrap();
    let header = text
        .lines()
        .find(|l| l.starts_with("| Implementation |"))
        .ok_or("no table header")?;
    let cols: Vec<&str> = header.trim_matches('|').split('|').map(str::trim).collect();
    for (label, col, want) in [
        ("S-NR naïve", "2D 200K", "11.1"),
        ("O-NR naïve", "2D 200K", "10.7"),
        ("O-ST naïve", "2D 600K", "20034.4"),
        ("CPU 8 threads", "3D 600K", "70.6"),
        ("S-NR naïve", "3D 600K", "1364.9"),
    ] {
        let row = text
            .lines()
            .find(|l| l.starts_with(&format!("| {label} |")))
            .ok_or_else(|| format!("no row {label}"))?;
        let cells: Vec<&str> = row.trim_matches('|').split('|').map(str::trim).collect();
        let j = cols
            .iter()
            .position(|&c| c == col)
            .ok_or_else(|| format!("no column {col}"))?;
        ensure(cells[j] == want, || {
            format!("{label}/{col}: {} != {want}", cells[j])
        })?;
    }
    Ok("42 values exact; report cells at expected positions".into())
}

fn random_input(rng: &mut StdRng) -> (FlowmapField, MeshTopology) {
    let three = rng.random_bool(0.5);
    let dims: Vec<usize> = if three {
        (0..3).map(|_| rng.random_range(3..7)).collect()
    } else {
        (0..2).map(|_| rng.random_range(3..20)).collect()
    };
    let d = dims.len();
    let spacing: Vec<f64> = (0..d).map(|_| rng.random_range(1e-3..10.0)).collect();
    let origin: Vec<f64> = (0..d).map(|_| rng.random_range(-100.0..100.0)).collect();
    let mut mesh = make_structured_grid(&dims, &spacing, &origin).unwrap();
    match rng.random_range(0..3) {
        0 => {}
        1 => mesh = mesh.to_unstructured(),
        _ => mesh = jitter_grid(&mesh, rng.random_range(0.0..0.9), rng).unwrap(),
    }
    let values = (0..mesh.npoints() * d)
        .map(|_| {
            f64::from_bits(
                rng.random::<u64>() & !(0x7ffu64 << 52) | (rng.random_range(900u64..1100) << 52),
            )
        })
        .collect();
    let horizon = if rng.random_bool(0.5) { 1.0 } else { -1.0 } * rng.random_range(1e-6..1e3);
    let field =
        FlowmapField::new(mesh.dim(), values, rng.random_range(-1e3..1e3), horizon).unwrap();
    (field, mesh)
}

fn format_robustness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(99);
    let mut valid = Vec::new();
    for i in 0..1000 {
        let (field, mesh) = random_input(&mut rng);
        let bytes = encode_flowmap(&field, &mesh).map_err(|e| e.to_string())?;
        let (f2, m2) = decode_flowmap(&bytes).map_err(|e| format!("input {i}: {e}"))?;
        let same = m2 == mesh
            && f2.t0.to_bits() == field.t0.to_bits()
            && f2.horizon.to_bits() == field.horizon.to_bits()
            && f2.values.len() == field.values.len()
            && f2
                .values
                .iter()
                .zip(&field.values)
                .all(|(a, b)| a.to_bits() == b.to_bits());
        ensure(same, || format!("input {i} did not round-trip"))?;
        ensure(encode_flowmap(&f2, &m2).unwrap() == bytes, || {
            format!("input {i} re-encodes differently")
        })?;
        valid.push(bytes);
    }

    let mut crashes = 0;
    let mut rejected = 0;
    let prev = std::panic::take_hook();
    std::panic::set_hook(Box::new(|i| {
        if std::env::var("FUZZ_DEBUG").is_ok() {
            eprintln!("{i}")
        }
    }));
    for k in 0..10_000 {
        let bytes: Vec<u8> = match k % 4 {
            0 => (0..rng.random_range(0..512))
                .map(|_| rng.random())
                .collect(),
            1 => {
                // valid header prefix, random tail
                let mut b = valid[k % valid.len()].clone();
                let cut = rng.random_range(0..b.len());
                b.truncate(cut);
                b.extend((0..rng.random_range(0..64)).map(|_| rng.random::<u8>()));
                b
            }
            2 => {
                let mut b = valid[k % valid.len()].clone();
                for _ in 0..rng.random_range(1..8) {
                    let i = rng.random_range(0..b.len());
                    b[i] ^= 1 << rng.random_range(0..8);
                }
                b
            }
            _ => {
                // corrupt a header field with an extreme value
                let mut b = valid[k % valid.len()].clone();
                let slot = [4usize, 8, 12, 20, 24][rng.random_range(0..5)];
                let v: u64 =
                    [0, 1, u64::MAX, u32::MAX as u64, rng.random()][rng.random_range(0..5)];
                let end = (slot + 8).min(b.len());
                b[slot..end].copy_from_slice(&v.to_le_bytes()[..end - slot]);
                b
            }
        };
        let r = catch_unwind(AssertUnwindSafe(|| {
            (
                decode_flowmap(&bytes).is_err(),
                decode_neighbor_table(&bytes).is_err(),
                decode_ftle_field(&bytes).is_err(),
            )
        }));
        match r {
            Ok((a, _, _)) => rejected += a as usize,
            Err(_) => crashes += 1,
        }
    }
    std::panic::set_hook(prev);
    ensure(crashes == 0, || {
        format!("{crashes} of 10000 fuzzed inputs panicked")
    })?;
    Ok(format!(
        "1000 round-trips bit-equal; 10000 fuzzed streams, 0 crashes, {rejected} rejected as flowmaps"
    ))
}

fn main() {
    let criteria = [
        Criterion {
            name: "identity end-to-end",
            budget: Some(Duration::from_secs(1)),
            run: identity_end_to_end,
        },
        Criterion {
            name: "affine oracle",
            budget: Some(Duration::from_secs(1)),
            run: affine_oracle,
        },
        Criterion {
            name: "eigen residuals",
            budget: None,
            run: eigen_residuals,
        },
        Criterion {
            name: "strategy equivalence",
            budget: Some(Duration::from_secs(120)),
            run: strategy_equivalence,
        },
        Criterion {
            name: "convergence",
            budget: None,
            run: convergence,
        },
        Criterion {
            name: "data-parallel faster than single-pass at 600K",
            budget: Some(Duration::from_secs(600)),
            run: performance,
        },
        Criterion {
            name: "reference fidelity",
            budget: None,
            run: reference_fidelity,
        },
        Criterion {
            name: "format robustness",
            budget: None,
            run: format_robustness,
        },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let mut result = (c.run)();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(budget)) = (&result, c.budget) {
            if elapsed > budget {
                result = Err(format!("{detail}; took {elapsed:.2?}, budget {budget:.0?}"));
            }
        }
        match result {
            Ok(detail) => println!("PASS  {:<48} {detail} [{elapsed:.2?}]", c.name),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {:<48} {detail} [{elapsed:.2?}]", c.name);
            }
        }
    }
    println!(
        "\nacceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
