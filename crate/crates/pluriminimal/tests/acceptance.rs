//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line. Tolerances are pinned here and intentionally not
//! shared with library defaults, so a library regression cannot silently
//! relax the gate.

use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use pluriminimal::checks::{check_closed, check_rank, conformality_residual, sample_polydisk};
use pluriminimal::data::{OneForm, WeierstrassData};
use pluriminimal::expr::HoloExpr;
use pluriminimal::family::{family_data, solve_family, FamilyInput};
use pluriminimal::geometry::{
    line_restriction_mean_curvature, metric_blocks, second_fundamental_form,
};
use pluriminimal::immerse::{immerse_via_dogleg, immerse_via_quadrature};
use pluriminimal::intersect::{self_intersect, SearchConfig};
use pluriminimal::relation::{
    build_mu, diagonalize, emit_map, isotropy_residual, kernel, relation_from_pairs, SYM2_CAP,
};
use pluriminimal::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BIN: &str = env!("CARGO_BIN_EXE_pluriminimal");

fn report(criterion: usize, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion} ({name}): {}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} ({name}) failed: {detail}");
}

/// A random polynomial of degree <= 5 in one variable with exact rational
/// coefficients scaled by 4^-k, keeping values O(1) on the radius-2 disk.
fn random_poly(rng: &mut ChaCha8Rng) -> HoloExpr {
    let z = HoloExpr::var(0, 1).unwrap();
    let degree = rng.gen_range(1..=5u32);
    let mut acc = HoloExpr::zero(1);
    for k in 0..=degree {
        let c: i64 = rng.gen_range(-3..=3);
        if c == 0 {
            continue;
        }
        let term = z.pow(k).scale_rational(c, 4i64.pow(k));
        acc = acc.add(&term);
    }
    acc
}

/// The 10 random polynomial pairs plus 2 transcendental pairs of
/// criterion 1, with the shared 100-point sample set.
fn criterion1_datasets() -> (Vec<WeierstrassData>, Vec<Vec<C64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let points = sample_polydisk(2, 100, 2.0, &mut rng);
    let mut datasets = Vec::new();
    for _ in 0..10 {
        let f = random_poly(&mut rng);
        let g = random_poly(&mut rng);
        let input = FamilyInput::new(f, g).unwrap();
        datasets.push(family_data(&input, &points).unwrap());
    }
    for (f, g) in [("exp(z1)", "sin(z1)"), ("sin(z1)", "cos(z1)")] {
        let input = FamilyInput::parse(f, g).unwrap();
        datasets.push(family_data(&input, &points).unwrap());
    }
    (datasets, points)
}

#[test]
fn criterion_01_theorem_forward_constructive() {
    let start = Instant::now();
    let (datasets, points) = criterion1_datasets();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut detail = String::new();
    let mut pass = true;
    for (idx, data) in datasets.iter().enumerate() {
        let closed = check_closed(data, &points, 1e-10).unwrap();
        let conf = conformality_residual(data, &points).unwrap();
        let rank = check_rank(data, &points, 1e-9).unwrap();
        let mut line = 0.0f64;
        for _ in 0..10 {
            let z = &points[rng.gen_range(0..points.len())];
            let v: Vec<C64> = (0..2)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            line = line.max(line_restriction_mean_curvature(data, z, &v, 1e-4).unwrap());
        }
        let ok = closed.worst_residual < 1e-10 && conf < 1e-12 && rank.pass && line < 1e-6;
        if !ok {
            pass = false;
            detail = format!(
                "dataset {idx}: closed {:.3e}, conf {conf:.3e}, rank pass {}, line {line:.3e}",
                closed.worst_residual, rank.pass
            );
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 30.0 {
        pass = false;
        detail = format!("runtime {elapsed:.1}s >= 30s");
    }
    report(1, "theorem forward, constructive", pass, &detail);
}

#[test]
fn criterion_02_necessity_discriminating() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let points = sample_polydisk(2, 50, 2.0, &mut rng);
    let e = |s: &str| HoloExpr::parse(s, 2).unwrap();
    let form = |a: &str, b: &str| OneForm::new(vec![e(a), e(b)]).unwrap();

    // Non-closed: z2 dz1, completed so conformality and rank still hold.
    let non_closed = WeierstrassData::new(
        vec![form("z2", "0"), form("0", "1"), form("1i*z2", "0"), form("0", "1i")],
        None,
        vec![C64::ZERO; 2],
        vec![0.0; 4],
    )
    .unwrap();
    // Rank-deficient but conformal: (dz1, i dz1).
    let deficient = WeierstrassData::new(
        vec![form("1", "0"), form("1i", "0")],
        None,
        vec![C64::ZERO; 2],
        vec![0.0; 2],
    )
    .unwrap();
    // Closed, full rank, not conformal: (dz1, dz2).
    let non_conformal = WeierstrassData::new(
        vec![form("1", "0"), form("0", "1")],
        None,
        vec![C64::ZERO; 2],
        vec![0.0; 2],
    )
    .unwrap();

    let closed = |d: &WeierstrassData| check_closed(d, &points, 1e-10).unwrap().pass;
    let conf = |d: &WeierstrassData| conformality_residual(d, &points).unwrap() < 1e-12;
    let rank = |d: &WeierstrassData| check_rank(d, &points, 1e-9).unwrap().pass;

    let pass = !closed(&non_closed)
        && conf(&non_closed)
        && rank(&non_closed)
        && closed(&deficient)
        && conf(&deficient)
        && !rank(&deficient)
        && closed(&non_conformal)
        && !conf(&non_conformal)
        && rank(&non_conformal);
    report(2, "necessity, designed counterexamples", pass, "a counterexample failed the wrong check");
}

#[test]
fn criterion_03_kahler_block_identities() {
    // Conformality forces AᵀA = BᵀB and AᵀB antisymmetric; with maximal
    // rank the metric is positive definite and J-invariant.
    let (datasets, points) = criterion1_datasets();
    let mut worst = 0.0f64;
    let mut min_eig = f64::INFINITY;
    for data in &datasets {
        for z in &points {
            let blocks = metric_blocks(data, z).unwrap();
            worst = worst
                .max(blocks.cross_block_residual())
                .max(blocks.diag_block_residual())
                .max(blocks.j_invariance_residual());
            min_eig = min_eig.min(blocks.min_eigenvalue());
        }
    }
    let pass = worst < 1e-10 && min_eig > 0.0;
    report(
        3,
        "kahler metric blocks",
        pass,
        &format!("worst residual {worst:.3e}, min eigenvalue {min_eig:.3e}"),
    );
}

#[test]
fn criterion_04_circularity() {
    let (datasets, points) = criterion1_datasets();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_circ = 0.0f64;
    let mut worst_mean = 0.0f64;
    for data in &datasets {
        for z in points.iter().take(20) {
            let sff = second_fundamental_form(data, z).unwrap();
            worst_circ = worst_circ.max(sff.circularity_residual());
            for _ in 0..10 {
                let v: Vec<C64> = (0..2)
                    .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                worst_mean = worst_mean.max(sff.mean_curvature_of_direction(&v));
            }
        }
    }
    let pass = worst_circ < 1e-9 && worst_mean < 1e-9;
    report(
        4,
        "circularity and mean curvature",
        pass,
        &format!("circularity {worst_circ:.3e}, mean curvature {worst_mean:.3e}"),
    );
}

#[test]
fn criterion_05_furuhata_reproduction() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("furuhata.json");
    let status = Command::new(BIN)
        .args(["family", "--f", "z1^3", "--g", "0", "--out"])
        .arg(&out)
        .output()
        .unwrap()
        .status;
    let mut pass = status.code() == Some(0);
    let mut detail = format!("family exit {:?}", status.code());

    // Recover the six functions from the written primitives: each pair
    // contributes q1 = Q1 + Q2, q2 = -i(Q1 - Q2).
    if pass {
        let data = WeierstrassData::load(&out).unwrap();
        let prims = data.primitives.clone().unwrap();
        let i = HoloExpr::i(2);
        let mut p = Vec::new();
        for pair in 0..3 {
            let q1 = &prims[2 * pair];
            let q2 = &prims[2 * pair + 1];
            let big_q1 = q1.add(&i.mul(q2)).scale_rational(1, 2);
            let big_q2 = q1.sub(&i.mul(q2)).scale_rational(1, 2);
            p.push(big_q1);
            p.push(if pair == 0 { big_q2.neg() } else { big_q2 });
        }
        let rat = |num: i64, den: i64| {
            (
                BigRational::new(BigInt::from(num), BigInt::from(den)),
                BigRational::from_integer(BigInt::from(0)),
            )
        };
        let expectations: [(usize, Vec<(Vec<u32>, (BigRational, BigRational))>); 6] = [
            (0, vec![(vec![1, 1], rat(1, 1))]),
            (1, vec![(vec![0, 2], rat(-3, 2))]),
            (2, vec![(vec![1, 0], rat(1, 1))]),
            (3, vec![(vec![0, 3], rat(-1, 2))]),
            (4, vec![(vec![0, 1], rat(1, 1))]),
            (5, vec![(vec![1, 2], rat(-3, 2))]),
        ];
        for (idx, expected) in expectations {
            let poly: Vec<_> = p[idx]
                .to_polynomial()
                .unwrap()
                .into_iter()
                .filter(|(_, (re, im))| {
                    !(re == &BigRational::from_integer(BigInt::from(0))
                        && im == &BigRational::from_integer(BigInt::from(0)))
                })
                .collect();
            if poly != expected {
                pass = false;
                detail = format!("P_{} expansion mismatch: {poly:?}", idx + 1);
            }
        }
        let verify = Command::new(BIN).arg("verify").arg(&out).output().unwrap();
        if verify.status.code() != Some(0) {
            pass = false;
            detail = format!("verify exit {:?}", verify.status.code());
        }
    }
    report(5, "Furuhata reproduction", pass, &detail);
}

#[test]
fn criterion_06_non_embedding_probe() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let points = sample_polydisk(2, 20, 2.0, &mut rng);
    let furuhata = family_data(&FamilyInput::parse("z1^3", "0").unwrap(), &points).unwrap();
    let trivial = family_data(&FamilyInput::parse("0", "0").unwrap(), &points).unwrap();
    let config = SearchConfig { starts: 64, ..Default::default() };

    let hit = self_intersect(&furuhata, &config).unwrap();
    let none = self_intersect(&trivial, &config).unwrap();
    let (pass, detail) = match (&hit, &none) {
        (Some(h), None) => (
            h.separation >= 0.1 && h.distance < 1e-8,
            format!("separation {:.3}, distance {:.3e}", h.separation, h.distance),
        ),
        _ => (false, format!("furuhata found: {}, trivial found: {}", hit.is_some(), none.is_some())),
    };
    report(6, "non-embedding probe", pass, &detail);
}

#[test]
fn criterion_07_relation_finder_oracles() {
    let start = Instant::now();
    let mut dims = Vec::new();
    let mut furuhata_member = false;
    for n in 1..=4 {
        let mu = build_mu(2, n, SYM2_CAP).unwrap();
        let kern = kernel(&mu);
        dims.push(kern.len());
        if n == 3 {
            let six = solve_family(&FamilyInput::parse("z1^3", "0").unwrap()).unwrap();
            let rel = relation_from_pairs(
                &mu.basis,
                &[
                    (six.p[0].clone(), six.p[1].clone(), 1),
                    (six.p[2].clone(), six.p[3].clone(), -1),
                    (six.p[4].clone(), six.p[5].clone(), -1),
                ],
            )
            .unwrap();
            furuhata_member = rel.is_in_kernel(&mu);
        }
    }
    let monotone = dims.windows(2).all(|w| w[1] >= w[0]);
    let elapsed = start.elapsed().as_secs_f64();
    let pass = dims[0] == 0 && furuhata_member && monotone && elapsed < 60.0;
    report(
        7,
        "relation finder oracles",
        pass,
        &format!("kernel dims {dims:?}, member {furuhata_member}, {elapsed:.1}s"),
    );
}

#[test]
fn criterion_08_pipeline_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let points = sample_polydisk(2, 100, 2.0, &mut rng);
    let mu = build_mu(2, 3, SYM2_CAP).unwrap();
    let element = kernel(&mu).into_iter().next().unwrap();
    let diag = diagonalize(&element, &mu, &points).unwrap();
    let bare = isotropy_residual(&diag.primitives, 2, &points).unwrap();
    let data = emit_map(&diag.primitives, 2, true, &points).unwrap();
    let conf = conformality_residual(&data, &points).unwrap();
    let closed = check_closed(&data, &points, 1e-10).unwrap();
    let rank = check_rank(&data, &points, 1e-9).unwrap();
    let pass = conf < 1e-10 && closed.pass && rank.pass && (conf - bare).abs() < 1e-14;
    report(
        8,
        "pipeline closure",
        pass,
        &format!(
            "conformality {conf:.3e}, closed {}, rank {}, pair delta {:.3e}",
            closed.pass,
            rank.pass,
            (conf - bare).abs()
        ),
    );
}

#[test]
fn criterion_09_path_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sample = sample_polydisk(2, 10, 2.0, &mut rng);
    let inputs = ["z1^2", "z1^3", "0.25*z1^4", "z1 - z1^2", "sin(z1)"];
    let datasets: Vec<WeierstrassData> = inputs
        .iter()
        .map(|f| family_data(&FamilyInput::parse(f, "0").unwrap(), &sample).unwrap())
        .collect();
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let data = &datasets[trial % datasets.len()];
        let endpoint: Vec<C64> = (0..2)
            .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let mid: Vec<C64> = (0..2)
            .map(|_| C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        let straight = immerse_via_quadrature(data, &endpoint, 1e-12).unwrap();
        let dogleg = immerse_via_dogleg(data, &mid, &endpoint, 1e-12).unwrap();
        for (a, b) in straight.iter().zip(&dogleg) {
            worst = worst.max((a - b).abs());
        }
    }
    report(9, "path independence", worst < 1e-9, &format!("worst disagreement {worst:.3e}"));
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let furuhata = dir.path().join("furuhata.json");
    assert!(Command::new(BIN)
        .args(["family", "--f", "z1^3", "--g", "0", "--out"])
        .arg(&furuhata)
        .output()
        .unwrap()
        .status
        .success());

    let run = |args: &[&str]| {
        let out = Command::new(BIN).args(args).current_dir(dir.path()).output().unwrap();
        (out.status.code(), out.stdout)
    };
    let furu = furuhata.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["verify", furu, "--seed", "11"],
        vec!["selfintersect", furu, "--budget", "4", "--seed", "11"],
        vec!["relations", "--m", "2", "--n", "3", "--out", "kern.json", "--emit", "0", "--ensure-immersion", "--emit-out", "em.json", "--seed", "11"],
        vec!["mesh", furu, "--curve", "z1", "--curve", "z1", "--resolution", "5", "--project", "0,1,3", "--out", "slice.obj"],
    ];
    let mut pass = true;
    let mut detail = String::new();
    for args in &commands {
        let first = run(args);
        let second = run(args);
        if first != second {
            pass = false;
            detail = format!("output differs for {args:?}");
        }
    }
    report(10, "byte determinism", pass, &detail);
}
