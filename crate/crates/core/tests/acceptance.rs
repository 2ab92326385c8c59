//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::{Command, ExitCode};
use std::time::Instant;

use rayon::prelude::*;

use curv4::analyzer::{check_nnic, check_theorem1, implication_audit};
use curv4::models::{self, ModelSpec};
use curv4::numerics::{mix_seed, random_frame4, RngStream, SymMatrix6};
use curv4::oracle::{extremize, min_isotropic, Mode, Objective, OracleConfig};
use curv4::CurvatureOperatorF64 as Op;

const SEED: u64 = 20_240_601;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn random_tensor(seed: u64, index: u64) -> Op {
    models::random_bianchi(&mut RngStream::new(seed, index), 1.0).unwrap()
}

fn shifted(seed: u64, index: u64, scale: f64, shift: f64) -> Op {
    let base = models::random_bianchi(&mut RngStream::new(seed, index), scale).unwrap();
    Op::unvalidated(base.matrix().add(&SymMatrix6::scaled_identity(shift)))
}

fn named_models() -> Vec<Op> {
    [
        "sphere:1",
        "sphere:0.5",
        "space_form:-2",
        "product:1,1",
        "product:2,-1",
        "cp2",
        "cp2:3",
        "r_times_s3:1",
        "flat",
    ]
    .iter()
    .map(|s| s.parse::<ModelSpec>().unwrap().build::<f64>().unwrap())
    .collect()
}

/// Oracle biorthogonal extrema against the closed-form spectrum.
fn criterion_1() -> Outcome {
    let results: Vec<(f64, f64, bool)> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let op = random_tensor(SEED, i);
            let k = op.biortho_spectrum().unwrap();
            let cfg = OracleConfig::with_seed(mix_seed(SEED, i));
            let lo = extremize(&op, Objective::Biorthogonal, Mode::Min, &cfg)
                .unwrap()
                .value;
            let hi = extremize(&op, Objective::Biorthogonal, Mode::Max, &cfg)
                .unwrap()
                .value;
            let err_lo = (lo - k.k1).abs() / (1e-6 + 1e-6 * k.k1.abs());
            let err_hi = (hi - k.k3).abs() / (1e-6 + 1e-6 * k.k3.abs());
            let sound = lo >= k.k1 - 1e-9 && hi <= k.k3 + 1e-9;
            (err_lo, err_hi, sound)
        })
        .collect();
    let within = results.iter().filter(|r| r.0 <= 1.0 && r.1 <= 1.0).count();
    let sound = results.iter().filter(|r| r.2).count();
    let worst = results.iter().map(|r| r.0.max(r.1)).fold(0.0, f64::max);
    Outcome {
        pass: within == 500 && sound == 500,
        detail: format!(
            "{within}/500 within tolerance, {sound}/500 sound, worst error {worst:.3} of tolerance"
        ),
    }
}

/// `k1 + k2 + k3 = s/4`.
fn criterion_2() -> Outcome {
    let mut ops: Vec<Op> = (0..500).map(|i| random_tensor(SEED, i)).collect();
    ops.extend(named_models());
    let failures = ops
        .iter()
        .filter(|op| {
            let s = op.scalar_curvature();
            let k = op.biortho_spectrum().unwrap();
            !((k.k1 + k.k2 + k.k3 - s / 4.0).abs() <= 1e-12 * (1.0 + s.abs()))
        })
        .count();
    Outcome {
        pass: failures == 0,
        detail: format!("{} tensors, {failures} failures", ops.len()),
    }
}

/// Pinching hypothesis implies the eigenvalue NNIC test, step by step.
fn criterion_3() -> Outcome {
    // Unshifted Gaussians almost never satisfy a hypothesis, so the pool
    // also draws from ensembles pushed towards positive Einstein tensors.
    let ensembles = [
        (1.0, 0.0, 8000u64),
        (1.0, 1.5, 4000),
        (0.5, 1.5, 4000),
        (0.2, 1.0, 4000),
    ];
    let mut positive = 0usize;
    let mut applicable = [0usize; 2];
    let mut violations = 0usize;
    for (e, &(scale, shift, n)) in ensembles.iter().enumerate() {
        for i in 0..n {
            let op = shifted(mix_seed(SEED, 100 + e as u64), i, scale, shift);
            let check = check_theorem1(&op).unwrap();
            if !check.scalar_positive {
                continue;
            }
            positive += 1;
            if !check.applies() {
                continue;
            }
            applicable[0] += check.hypothesis_a.holds as usize;
            applicable[1] += check.hypothesis_b.holds as usize;
            let nnic = check_nnic(&op).unwrap();
            let audit = implication_audit(&op).unwrap();
            if !nnic.holds || !audit.is_consistent() {
                violations += 1;
            }
        }
    }
    Outcome {
        pass: positive >= 10_000 && applicable[0] > 0 && applicable[1] > 0 && violations == 0,
        detail: format!(
            "{positive} tensors with s > 0, hypothesis A on {}, B on {}, {violations} violations",
            applicable[0], applicable[1]
        ),
    }
}

/// Golden values of the model geometries.
fn criterion_4() -> Outcome {
    let mut bad: Vec<String> = Vec::new();
    let mut expect = |name: &str, got: f64, want: f64| {
        if !((got - want).abs() <= 1e-12) {
            bad.push(format!("{name}: {got} != {want}"));
        }
    };
    let spectrum = |op: &Op| op.biortho_spectrum().unwrap().values();

    let sphere = models::sphere(1.0).unwrap();
    expect("sphere s", sphere.scalar_curvature(), 12.0);
    for (k, w) in spectrum(&sphere).into_iter().zip([1.0; 3]) {
        expect("sphere K", k, w);
    }

    let product = models::product_surfaces(1.0, 1.0);
    expect("product s", product.scalar_curvature(), 4.0);
    for (k, w) in spectrum(&product).into_iter().zip([0.0, 0.0, 1.0]) {
        expect("product K", k, w);
    }
    let t = check_theorem1(&product).unwrap();
    expect("product A fails", t.hypothesis_a.holds as u8 as f64, 0.0);
    expect("product B fails", t.hypothesis_b.holds as u8 as f64, 0.0);

    let cp2 = models::cp2(1.0).unwrap();
    let d = cp2.decompose();
    expect("cp2 s", cp2.scalar_curvature(), 24.0);
    for (w, e) in d
        .wplus_spectrum()
        .unwrap()
        .values()
        .into_iter()
        .zip([-2.0, -2.0, 4.0])
    {
        expect("cp2 w+", w, e);
    }
    for w in d.wminus_spectrum().unwrap().values() {
        expect("cp2 w-", w, 0.0);
    }
    for (k, w) in spectrum(&cp2).into_iter().zip([1.0, 1.0, 4.0]) {
        expect("cp2 K", k, w);
    }
    let t = check_theorem1(&cp2).unwrap();
    expect("cp2 A margin", t.hypothesis_a.margin, 0.0);
    let n = check_nnic(&cp2).unwrap();
    expect("cp2 NNIC margin+", n.margin_plus, 0.0);
    expect("cp2 NNIC margin-", n.margin_minus, 4.0);

    let rs3 = models::r_times_s3(1.0).unwrap();
    let d = rs3.decompose();
    expect("rxs3 s", rs3.scalar_curvature(), 6.0);
    for (k, w) in spectrum(&rs3).into_iter().zip([0.5; 3]) {
        expect("rxs3 K", k, w);
    }
    expect("rxs3 |W+|", d.wplus.max_abs(), 0.0);
    expect("rxs3 |W-|", d.wminus.max_abs(), 0.0);
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j && i < 3 { 2.0 } else { 0.0 };
            expect("rxs3 Ric", d.ricci.get(i, j), want);
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            "all golden values exact to 1e-12".into()
        } else {
            bad.join("; ")
        },
    }
}

/// Sign of the sampled isotropic minimum against `min(s/6 − w₃±)`.
fn criterion_5() -> Outcome {
    let mut picked: Vec<(u64, f64)> = Vec::new();
    let mut i = 0u64;
    // A mix of plain and shifted tensors so both signs are well represented.
    while picked.len() < 200 {
        let op = if i.is_multiple_of(2) {
            random_tensor(SEED ^ 5, i)
        } else {
            shifted(SEED ^ 5, i, 1.0, 1.0)
        };
        let margin = check_nnic(&op).unwrap().min_margin();
        if margin.abs() > 1e-3 {
            picked.push((i, margin));
        }
        i += 1;
    }
    let agree: Vec<(bool, f64)> = picked
        .par_iter()
        .map(|&(i, margin)| {
            let op = if i.is_multiple_of(2) {
                random_tensor(SEED ^ 5, i)
            } else {
                shifted(SEED ^ 5, i, 1.0, 1.0)
            };
            let iso = min_isotropic(&op, &OracleConfig::with_seed(mix_seed(SEED ^ 5, i)))
                .unwrap()
                .value;
            ((iso > 0.0) == (margin > 0.0), (iso - 2.0 * margin).abs())
        })
        .collect();
    let agreed = agree.iter().filter(|a| a.0).count();
    let negatives = picked.iter().filter(|p| p.1 < 0.0).count();
    let identity_worst = agree.iter().map(|a| a.1).fold(0.0, f64::max);
    let border: Vec<f64> = [
        models::cp2(1.0).unwrap(),
        models::product_surfaces(1.0, 1.0),
    ]
    .iter()
    .map(|op| {
        min_isotropic(op, &OracleConfig::with_seed(SEED))
            .unwrap()
            .value
    })
    .collect();
    let border_ok = border.iter().all(|v| v.abs() <= 1e-4);
    Outcome {
        pass: agreed == 200 && border_ok,
        detail: format!(
            "{agreed}/200 signs agree ({negatives} negative), borderline cp2 {:.2e} product {:.2e}, \
             logged identity gap max {identity_worst:.2e}",
            border[0], border[1]
        ),
    }
}

/// Block traces and frame invariance.
fn criterion_6() -> Outcome {
    let mut rng = RngStream::new(SEED, 6);
    let mut trace_failures = 0;
    for _ in 0..1000 {
        let op = Op::unvalidated(SymMatrix6::from_upper(|_, _| rng.gaussian::<f64>()));
        let d = op.decompose();
        let diff = d.plus_block().trace() - d.minus_block().trace();
        if !((diff - 2.0 * op.bianchi_residual()).abs() <= 1e-12) {
            trace_failures += 1;
        }
    }

    let mut frame_failures = 0;
    let mut worst = 0.0f64;
    let mut tensors: Vec<Op> = (0..20).map(|i| random_tensor(SEED ^ 6, i)).collect();
    tensors.extend(named_models());
    for (t, op) in tensors.iter().enumerate() {
        let d = op.decompose();
        let s = d.scalar;
        let wp = d.wplus_spectrum().unwrap().values();
        let wm = d.wminus_spectrum().unwrap().values();
        let k = op.biortho_spectrum().unwrap().values();
        let mut frng = RngStream::new(SEED ^ 66, t as u64);
        for _ in 0..100 {
            let q = random_frame4::<f64>(&mut frng);
            let rotated = op.change_frame(&q);
            let d2 = rotated.decompose();
            let (mut wp2, mut wm2) = (
                d2.wplus_spectrum().unwrap().values(),
                d2.wminus_spectrum().unwrap().values(),
            );
            // An orientation-reversing frame exchanges the two halves.
            if q.determinant() < 0.0 {
                std::mem::swap(&mut wp2, &mut wm2);
            }
            let k2 = rotated.biortho_spectrum().unwrap().values();
            let mut err = (d2.scalar - s).abs();
            for (a, b) in wp
                .iter()
                .chain(&wm)
                .chain(&k)
                .zip(wp2.iter().chain(&wm2).chain(&k2))
            {
                err = err.max((a - b).abs());
            }
            worst = worst.max(err);
            if !(err <= 1e-9) {
                frame_failures += 1;
            }
        }
    }
    Outcome {
        pass: trace_failures == 0 && frame_failures == 0,
        detail: format!(
            "block-trace {}/1000 ok; frame invariance {} conjugations, {frame_failures} failures, worst {worst:.2e}",
            1000 - trace_failures,
            tensors.len() * 100
        ),
    }
}

/// Byte-identical `verify` output across runs and thread counts.
fn criterion_7() -> Outcome {
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_curv4"))
            .args([
                "--threads",
                threads,
                "verify",
                "--trials",
                "500",
                "--seed",
                "7",
                "--json",
            ])
            .output()
            .expect("curv4 binary runs");
        (out.status.code(), out.stdout)
    };
    let a = run("1");
    let b = run("1");
    let c = run("4");
    let same = a.1 == b.1 && a.1 == c.1;
    let summary = String::from_utf8_lossy(&a.1)
        .lines()
        .last()
        .unwrap_or("")
        .to_string();
    Outcome {
        pass: same && a.0 == Some(0) && b.0 == Some(0) && c.0 == Some(0) && !a.1.is_empty(),
        detail: format!(
            "exit codes {:?}/{:?}/{:?}, {} bytes, identical: {same}; {summary}",
            a.0,
            b.0,
            c.0,
            a.1.len()
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("closed-form/oracle equivalence", criterion_1),
        ("biorthogonal sum identity", criterion_2),
        ("pinching implies NNIC", criterion_3),
        ("model golden table", criterion_4),
        ("isotropic consistency", criterion_5),
        ("structural invariants", criterion_6),
        ("determinism", criterion_7),
    ];
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        failed += !o.pass as usize;
        println!(
            "criterion {} [{}] {}: {} ({:.1}s)",
            n + 1,
            if o.pass { "PASS" } else { "FAIL" },
            name,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
