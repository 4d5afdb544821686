//! Acceptance suite. Each test is one acceptance criterion, run at its
//! committed tolerance, and prints one pass line on success (visible with
//! `cargo test --test acceptance -- --nocapture`).

use mobius_lattice::claims::{registry, run_report, strict_violations, ReportInputs};
use mobius_lattice::decompose::{
    decomposition_count_formula, enumerate_cube_splits, split_residual,
};
use mobius_lattice::distribution::JointDistribution;
use mobius_lattice::function::{LatticeFunction, LogBase, SignConvention};
use mobius_lattice::mask::full_mask;
use mobius_lattice::measures::{
    cll, delta, entropy_lattice, interaction_chain_oracle, interaction_information,
    multi_information,
};
use mobius_lattice::operators::{
    compare_matrices, to_matrix, verify_group_table, MobiusOperator, OperatorKind,
    OperatorMatrix, Verdict,
};
use mobius_lattice::transform::{
    fast_signed_transform, interval_transform, naive_convolve, Direction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::process::Command;
use std::time::Instant;

const LN2: f64 = std::f64::consts::LN_2;

fn max_abs_diff(a: &LatticeFunction, b: &LatticeFunction) -> f64 {
    a.values
        .iter()
        .zip(b.values.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mobius-lattice"))
}

#[test]
fn criterion_01_involution_suite() {
    let started = Instant::now();
    for n in 1..=6usize {
        for seed in 0..100u64 {
            let f = LatticeFunction::random(n, 1000 * n as u64 + seed).unwrap();
            for direction in [Direction::Down, Direction::Up] {
                let twice = fast_signed_transform(
                    &fast_signed_transform(&f, direction, SignConvention::SizeParity),
                    direction,
                    SignConvention::SizeParity,
                );
                let dev = max_abs_diff(&twice, &f);
                assert!(dev < 1e-12, "n={n} seed={seed} {direction:?} dev={dev}");
            }
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "involution suite took {elapsed:?}"
    );
    println!("criterion 01 involution suite: PASS ({elapsed:?})");
}

#[test]
fn criterion_02_complement_parity_law() {
    for n in 1..=6usize {
        let x = to_matrix(&MobiusOperator::new(OperatorKind::Complement), n).unwrap();
        let xx = x.multiply(&x).unwrap();
        let identity = OperatorMatrix::identity(n);
        let expected = if n % 2 == 0 {
            Verdict::ExactMatch
        } else {
            Verdict::SignFlip
        };
        assert_eq!(
            compare_matrices(&xx, &identity).unwrap(),
            expected,
            "n={n}"
        );
        let table = verify_group_table(n, SignConvention::SizeParity).unwrap();
        let cell = table.cell(OperatorKind::Complement, OperatorKind::Complement);
        assert_eq!(cell.verdict, expected, "table cell at n={n}");
    }
    println!("criterion 02 complement parity law: PASS");
}

#[test]
fn criterion_03_anchored_involutions() {
    for n in 1..=5usize {
        for reference in 0..(1u32 << n) {
            for seed in 0..20u64 {
                let f =
                    LatticeFunction::random(n, 7000 + 99 * n as u64 + seed).unwrap();
                let twice = interval_transform(
                    &interval_transform(&f, reference).unwrap(),
                    reference,
                )
                .unwrap();
                let dev = max_abs_diff(&twice, &f);
                assert!(dev < 1e-12, "n={n} ref={reference:#b} dev={dev}");
            }
        }
    }
    println!("criterion 03 anchored involutions: PASS");
}

#[test]
fn criterion_04_anchored_extremes_parity() {
    for n in 1..=5usize {
        let sign = if (n + 1) % 2 == 0 { 1 } else { -1 };
        let down = to_matrix(
            &MobiusOperator::new(OperatorKind::Down),
            n,
        )
        .unwrap();
        let up = to_matrix(&MobiusOperator::new(OperatorKind::Up), n).unwrap();
        let bottom = to_matrix(&MobiusOperator::new(OperatorKind::Interval(0)), n).unwrap();
        let top = to_matrix(
            &MobiusOperator::new(OperatorKind::Interval(full_mask(n))),
            n,
        )
        .unwrap();
        let signed_down = if sign == 1 { down } else { down.negated() };
        let signed_up = if sign == 1 { up } else { up.negated() };
        assert_eq!(
            compare_matrices(&bottom, &signed_down).unwrap(),
            Verdict::ExactMatch,
            "bottom anchor at n={n}"
        );
        assert_eq!(
            compare_matrices(&top, &signed_up).unwrap(),
            Verdict::ExactMatch,
            "top anchor at n={n}"
        );
    }
    println!("criterion 04 anchored extremes parity: PASS");
}

#[test]
fn criterion_05_whole_lattice_constancy() {
    for n in 2..=4usize {
        for seed in 0..50u64 {
            let f = LatticeFunction::random(n, 31 * n as u64 + seed).unwrap();
            let baseline = interval_transform(&f, 0).unwrap().value(full_mask(n));
            for mu in 0..(1u32 << n) {
                let value = interval_transform(&f, mu)
                    .unwrap()
                    .value(full_mask(n) ^ mu);
                assert!(
                    (value - baseline).abs() < 1e-12,
                    "n={n} mu={mu:#b}: {value} vs {baseline}"
                );
            }
        }
    }
    println!("criterion 05 whole-lattice constancy: PASS");
}

/// The five entropy identities checked per distribution; the pair-total-
/// correlation and conditional-log-likelihood forms only apply at three
/// variables.
fn check_entropy_identities(dist: &JointDistribution, three_variable_extras: bool) {
    let n = dist.variable_count();
    let h = entropy_lattice(dist, LogBase::Nats).unwrap();
    let g = interaction_information(&h);
    let omega = multi_information(&h);
    let omega_up = fast_signed_transform(&omega, Direction::Up, SignConvention::SizeParity);
    let top = full_mask(n);

    for x in 0..n {
        let d = delta(&h, x).unwrap();

        // Delta as the interaction increment and as the negated expected
        // conditional interaction information.
        assert!(rel_close(d, g.value(top) - g.value(top ^ (1 << x)), 1e-9));
        let mut conditional = 0.0;
        for value in 0..dist.cardinalities()[x] {
            if let Some((w, cond)) = dist.condition_on(x, value) {
                let ch = entropy_lattice(&cond, LogBase::Nats).unwrap();
                conditional += w * interaction_information(&ch).value(full_mask(n - 1));
            }
        }
        assert!(rel_close(d, -conditional, 1e-9), "conditional delta route");

        // Up transform of the total correlation at singletons.
        if n >= 3 {
            assert!(rel_close(omega_up.value(1 << x), -d, 1e-9));
        }

        if three_variable_extras {
            // Delta from the pair total-correlations.
            let pair_sum: f64 = (0..n)
                .filter(|&i| i != x)
                .map(|i| omega.value((1 << i) | (1 << x)))
                .sum();
            assert!(rel_close(d, pair_sum - omega.value(top), 1e-9));

            // Delta as differences of conditional log-likelihoods.
            let others: Vec<usize> = (0..n).filter(|&i| i != x).collect();
            let (a, b) = (others[0], others[1]);
            let via_a = -cll(dist, a, 1 << x, LogBase::Nats).unwrap()
                + cll(dist, a, (1 << x) | (1 << b), LogBase::Nats).unwrap();
            let via_b = -cll(dist, b, 1 << x, LogBase::Nats).unwrap()
                + cll(dist, b, (1 << x) | (1 << a), LogBase::Nats).unwrap();
            assert!(rel_close(d, via_a, 1e-9));
            assert!(rel_close(d, via_b, 1e-9));
        }
    }

    // Down transform of the total correlation at the top.
    let omega_down =
        fast_signed_transform(&omega, Direction::Down, SignConvention::SizeParity);
    assert!(rel_close(omega_down.value(top), -g.value(top), 1e-9));
}

#[test]
fn criterion_06_entropy_identity_suite() {
    for seed in 0..200u64 {
        check_entropy_identities(&JointDistribution::random(3, 40_000 + seed), true);
    }
    for n in 4..=5usize {
        for seed in 0..50u64 {
            check_entropy_identities(
                &JointDistribution::random(n, 50_000 + 100 * n as u64 + seed),
                false,
            );
        }
    }
    println!("criterion 06 entropy identity suite: PASS");
}

#[test]
fn criterion_07_chain_oracle_agreement() {
    fn orders(n: usize) -> Vec<Vec<usize>> {
        fn rec(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if rest.is_empty() {
                out.push(prefix.clone());
                return;
            }
            for i in 0..rest.len() {
                let v = rest.remove(i);
                prefix.push(v);
                rec(prefix, rest, out);
                prefix.pop();
                rest.insert(i, v);
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::new(), &mut (0..n).collect(), &mut out);
        out
    }

    for n in 2..=4usize {
        let all_orders = orders(n);
        for seed in 0..100u64 {
            let dist = JointDistribution::random(n, 60_000 + 1000 * n as u64 + seed);
            let h = entropy_lattice(&dist, LogBase::Nats).unwrap();
            let lattice_value = interaction_information(&h).value(full_mask(n));
            for order in &all_orders {
                let chain = interaction_chain_oracle(&dist, order).unwrap();
                assert!(
                    rel_close(chain, lattice_value, 1e-9),
                    "n={n} seed={seed} order={order:?}: {chain} vs {lattice_value}"
                );
            }
        }
    }
    println!("criterion 07 chain oracle agreement: PASS");
}

#[test]
fn criterion_08_parity_triple_fixed_points() {
    let dist = JointDistribution::parity_bits(3);
    let h = entropy_lattice(&dist, LogBase::Nats).unwrap();

    let interaction_full = interaction_information(&h).value(0b111);
    assert!(
        (interaction_full + LN2).abs() < 1e-12,
        "interaction at the full set: {interaction_full}"
    );

    let omega_full = multi_information(&h).value(0b111);
    assert!((omega_full - LN2).abs() < 1e-12, "total correlation: {omega_full}");

    let d = delta(&h, 0).unwrap();
    assert!((d + LN2).abs() < 1e-12, "delta: {d}");

    let pi = cll(&dist, 0, 0b110, LogBase::Nats).unwrap();
    assert!(pi.abs() < 1e-12, "conditional log-likelihood: {pi}");

    println!("criterion 08 parity-triple fixed points: PASS");
}

#[test]
fn criterion_09_decomposition_combinatorics() {
    assert_eq!(decomposition_count_formula(3).unwrap(), 48);
    assert_eq!(decomposition_count_formula(4).unwrap(), 6912);
    let splits = enumerate_cube_splits(3).unwrap();
    for seed in 0..50u64 {
        let f = LatticeFunction::random(3, 70_000 + seed).unwrap();
        for spec in &splits {
            let residual = split_residual(&f, spec).unwrap();
            assert!(residual < 1e-12, "seed={seed} residual={residual}");
        }
    }
    println!("criterion 09 decomposition combinatorics: PASS");
}

#[test]
fn criterion_10_fast_transform_performance() {
    // Exactness against the brute-force oracle up to twelve variables.
    for n in [4usize, 8, 12] {
        let f = LatticeFunction::random_integer(n, 80_000 + n as u64).unwrap();
        let down = fast_signed_transform(&f, Direction::Down, SignConvention::SizeParity);
        let up = fast_signed_transform(&f, Direction::Up, SignConvention::SizeParity);
        let top = full_mask(n);
        for tau in 0..(1u32 << n) {
            assert_eq!(
                down.value(tau),
                naive_convolve(&f, tau, 0, SignConvention::SizeParity).unwrap(),
                "down n={n} tau={tau:#b}"
            );
            assert_eq!(
                up.value(tau),
                naive_convolve(&f, tau, top, SignConvention::SizeParity).unwrap(),
                "up n={n} tau={tau:#b}"
            );
        }
    }

    // One single-threaded down transform over 2^22 entries in under two
    // seconds.
    let n = 22usize;
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let values: Vec<f64> = (0..1usize << n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = LatticeFunction::new(n, values).unwrap();
    let started = Instant::now();
    let transformed = fast_signed_transform(&f, Direction::Down, SignConvention::SizeParity);
    let elapsed = started.elapsed();
    assert_eq!(transformed.len(), 1 << n);
    assert!(
        elapsed.as_secs_f64() < 2.0,
        "down transform at n=22 took {elapsed:?}"
    );
    println!("criterion 10 fast transform performance: PASS ({elapsed:?} at n=22)");
}

#[test]
fn criterion_11_predictor_on_synthetic_parity_data() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("xor.csv");
    let mut rng = ChaCha8Rng::seed_from_u64(90_001);
    let mut text = String::from("X1,X2,X3\n");
    for _ in 0..10_000 {
        let b: u8 = rng.gen_range(0..2);
        let c: u8 = rng.gen_range(0..2);
        text.push_str(&format!("{},{},{}\n", b ^ c, b, c));
    }
    std::fs::write(&input, text).unwrap();

    let out = dir.path().join("pred.json");
    let status = bin()
        .args([
            "predict",
            "--input",
            input.to_str().unwrap(),
            "--target",
            "X1",
            "--max-degree",
            "2",
            "--output",
            out.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["selected"][0], "X2");
    assert_eq!(report["selected"][1], "X3");
    assert!(report["selected_expected_cll"].as_f64().unwrap() < 0.01);

    let out1 = dir.path().join("pred1.json");
    let status = bin()
        .args([
            "predict",
            "--input",
            input.to_str().unwrap(),
            "--target",
            "X1",
            "--max-degree",
            "1",
            "--output",
            out1.to_str().unwrap(),
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let report1: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out1).unwrap()).unwrap();
    let best_singleton = report1["per_size_best"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["size"] == 1)
        .expect("per-size table has size 1")["expected_cll"]
        .as_f64()
        .unwrap();
    assert!(
        (best_singleton - LN2).abs() < 0.05,
        "best singleton {best_singleton}"
    );
    println!("criterion 11 predictor on synthetic parity data: PASS");
}

#[test]
fn criterion_12_verification_report() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let status = bin()
            .args([
                "verify",
                "--n-min",
                "2",
                "--n-max",
                "4",
                "--strict",
                "--output",
                out.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0), "strict verify must exit 0");
    }
    let bytes_a = std::fs::read(&a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&b).unwrap(), "report not byte-deterministic");

    let report: serde_json::Value = serde_json::from_slice(&bytes_a).unwrap();
    let ids: Vec<&str> = report["claims"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    for claim in registry() {
        assert!(ids.contains(&claim.id), "claim {} missing", claim.id);
    }
    assert_eq!(report["table1"].as_array().unwrap().len(), 3);

    // The strict gate itself is sound: a doctored report fails it.
    let inputs = ReportInputs {
        n_min: 2,
        n_max: 2,
        seeds: vec![11],
    };
    let mut doctored = run_report(&inputs).unwrap();
    assert!(strict_violations(&doctored).is_empty());
    let idx = doctored
        .claims
        .iter()
        .position(|c| c.id == "down-involution")
        .unwrap();
    doctored.claims[idx].status = Verdict::Mismatch(0.5);
    assert!(!strict_violations(&doctored).is_empty());

    println!("criterion 12 verification report: PASS");
}
