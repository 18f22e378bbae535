//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line, written to
//! the process stdout directly so it shows up without `--nocapture`.

mod common;

use std::f64::consts::SQRT_2;
use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use approx::abs_diff_eq;
use common::*;
use photon_link::channel::*;
use photon_link::devices::*;
use photon_link::fock::{
    apply_annihilation_combination, apply_creation_combination, apply_ladder, two_mode_squeeze, DensityOperator,
    Ladder, ModeLayout, PolarizationRotation, DEFAULT_LEAKAGE_TOL,
};
use photon_link::rng::{Purpose, StreamFactory};
use photon_link::states::*;
use rand::Rng;
use rayon::prelude::*;

fn report(id: u32, title: &str, started: Instant, budget: Duration, checks: &[(String, bool)]) {
    let elapsed = started.elapsed();
    let in_time = elapsed <= budget;
    let ok = in_time && checks.iter().all(|(_, c)| *c);
    let details: Vec<String> = checks
        .iter()
        .map(|(what, c)| if *c { what.clone() } else { format!("NOT OK {what}") })
        .collect();
    let line = format!(
        "AC{id:<2} {} {title} ({:.2}s of {}s): {}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs(),
        details.join("; ")
    );
    // The test harness captures `println!` but not writes to the stdout handle.
    #[allow(clippy::explicit_write)]
    writeln!(std::io::stdout(), "{line}").unwrap();
    assert!(ok, "{line}");
}

fn check(what: impl Into<String>, ok: bool) -> (String, bool) {
    (what.into(), ok)
}

fn paper(m: u64) -> AmplifierModel {
    AmplifierModel::PaperDeterministic { m }
}

fn bell_paper(m: u64, trials: u64) -> RunConfig {
    RunConfig::new(SourceKind::Bell, paper(m), trials, 20_240_601)
}

fn differences(m: u64, bit: Bit, trials: u64) -> Vec<i64> {
    let link = Link::new(&bell_paper(m, trials)).unwrap();
    (0..trials)
        .into_par_iter()
        .map(|i| link.run_trial(bit, i).unwrap().counts.unwrap().difference())
        .collect()
}

#[test]
fn ac01_paper_amplifier_composition() {
    let t = Instant::now();
    let mut exact = true;
    for m in [0, 3, 100] {
        for angle in [0.0, 45.0, 90.0, 135.0, 22.5] {
            let beam = amplify_paper(angle, m);
            exact &= beam.photons_at(angle) == 2 * m + 1
                && beam.photons_at(angle + 90.0) == m
                && beam.total_photons() == 3 * m + 1;
        }
    }
    let checks = [check("m in {0, 3, 100} at five input angles", exact)];
    report(1, "paper amplifier emits (2m+1, m)", t, Duration::from_secs(1), &checks);
}

#[test]
fn ac02_bit_zero_signature() {
    let t = Instant::now();
    let mut checks = vec![];
    for m in [3, 100] {
        let d = differences(m, Bit::Zero, 10_000);
        let hits = d.iter().filter(|x| x.unsigned_abs() == m + 1).count();
        checks.push(check(format!("m = {m}: {hits}/10000 with |Δ| = m+1"), hits == 10_000));
    }
    report(
        2,
        "bit 0 gives |Δ| = m+1 in every trial",
        t,
        Duration::from_secs(10),
        &checks,
    );
}

#[test]
fn ac03_bit_one_statistics() {
    let t = Instant::now();
    let n = 100_000;
    let d = differences(100, Bit::One, n);
    let mean = d.iter().sum::<i64>() as f64 / n as f64;
    let var = d.iter().map(|x| (*x as f64 - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let checks = [
        check(format!("mean Δ = {mean:.4}"), mean.abs() <= 0.5),
        check(format!("var Δ = {var:.2} vs 301"), (var / 301.0 - 1.0).abs() <= 0.1),
    ];
    report(
        3,
        "bit 1 has mean Δ ≈ 0 and variance ≈ 3m+1",
        t,
        Duration::from_secs(30),
        &checks,
    );
}

#[test]
fn ac04_snr_grows_as_sqrt_m() {
    let t = Instant::now();
    let report_ = sweep_m(&bell_paper(0, 10_000), &[16, 64, 256, 1024]).unwrap();
    // Empirical SNR from bit-1 spread: (m+1) / sd(Δ | bit 1).
    let empirical: Vec<(f64, f64)> = [16u64, 64, 256, 1024]
        .iter()
        .map(|&m| {
            let d = differences(m, Bit::One, 20_000);
            let mean = d.iter().sum::<i64>() as f64 / d.len() as f64;
            let sd = (d.iter().map(|x| (*x as f64 - mean).powi(2)).sum::<f64>() / (d.len() - 1) as f64).sqrt();
            (m as f64, (m + 1) as f64 / sd)
        })
        .collect();
    let mc_slope = log_log_slope(&empirical).unwrap();
    let checks = [
        check(
            format!("analytic slope {:.4}", report_.snr_slope),
            (report_.snr_slope - 0.5).abs() <= 0.05,
        ),
        check(
            format!("Monte Carlo slope {mc_slope:.4}"),
            (mc_slope - 0.5).abs() <= 0.05,
        ),
    ];
    report(4, "SNR log-log slope is 1/2", t, Duration::from_secs(60), &checks);
}

#[test]
fn ac05_ber_falls_with_amplification() {
    let t = Instant::now();
    let ms = [25, 100, 400];
    let exact: Vec<f64> = ms
        .iter()
        .map(|&m| Link::new(&bell_paper(m, 1)).unwrap().exact_ber().unwrap())
        .collect();
    let mut checks = vec![check(
        "exact BER strictly decreasing",
        exact.windows(2).all(|w| w[1] < w[0]),
    )];
    let n = 100_000;
    for (&m, &p) in ms.iter().zip(&exact) {
        let est = estimate_channel(&bell_paper(m, n)).unwrap();
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        checks.push(check(
            format!("m = {m}: MC {:.4e} vs exact {p:.4e} (σ {sigma:.2e})", est.ber),
            (est.ber - p).abs() <= 3.0 * sigma.max(1.0 / n as f64),
        ));
    }
    report(
        5,
        "BER decreases with m; Monte Carlo matches the binomial oracle",
        t,
        Duration::from_secs(120),
        &checks,
    );
}

#[test]
fn ac06_signaling_contrast() {
    let t = Instant::now();
    let paper25 = no_signaling_test(&paper(25)).unwrap();
    let gain = 4.0;
    let params = CovariantParams {
        gain,
        n_max: CovariantParams::suggested_n_max(gain, DEFAULT_LEAKAGE_TOL).max(16),
        leakage_tol: DEFAULT_LEAKAGE_TOL,
    };
    let model = AmplifierModel::CovariantSqueezer(params);
    let cov = no_signaling_test(&model).unwrap();
    let est = estimate_channel(&RunConfig::new(SourceKind::Bell, model, 100_000, 6)).unwrap();
    let checks = [
        check(
            format!("paper m = 25 TV {:.6}", paper25.tv_distance),
            paper25.tv_distance >= 0.9,
        ),
        check(format!("covariant truncation {}", params.n_max), params.n_max >= 16),
        check(format!("covariant leakage {:.2e}", cov.leakage), cov.leakage < 1e-8),
        check(format!("covariant TV {:.2e}", cov.tv_distance), cov.tv_distance <= 1e-9),
        check(format!("covariant Monte Carlo MI {:.2e} bits", est.mi), est.mi <= 5e-3),
    ];
    report(
        6,
        "paper model signals, covariant amplifier does not",
        t,
        Duration::from_secs(300),
        &checks,
    );
}

#[test]
fn ac07_source_state_suite() {
    let t = Instant::now();
    let pair = spdc_unentangled(2).unwrap();
    let PairState::SpdcUnentangled(s) = &pair else {
        unreachable!()
    };
    let ev = pair.event_probabilities();
    let sig = double_detection_amplitude(&pair, SpdcBeam::Signal).unwrap();
    let idl = double_detection_amplitude(&pair, SpdcBeam::Idler).unwrap();
    let checks = [
        check(
            format!("norm {}", s.mode_state().norm_sqr()),
            abs_diff_eq!(s.mode_state().norm_sqr(), 1.0, epsilon = 1e-12),
        ),
        check(
            format!("beam-mode norm {}", s.beam_state().norm_sqr()),
            abs_diff_eq!(s.beam_state().norm_sqr(), 1.0, epsilon = 1e-12),
        ),
        check(
            format!("coincidence {}", ev.coincidence),
            abs_diff_eq!(ev.coincidence, 0.5, epsilon = 1e-12),
        ),
        check(
            format!("double detection signal {sig}, idler {idl}"),
            sig > 0.0 && idl > 0.0 && abs_diff_eq!(sig, idl, epsilon = 1e-12),
        ),
    ];
    report(
        7,
        "unentangled source: norm, coincidence, double detection",
        t,
        Duration::from_secs(1),
        &checks,
    );
}

#[test]
fn ac08_zero_information_endpoint() {
    let t = Instant::now();
    let n = 100_000u64;
    let factory = StreamFactory::new(8);
    let mut counts = vec![vec![0u64; 2]; 2];
    for i in 0..n {
        let mut rng = factory.stream(Purpose::Auxiliary, i);
        let sent = rng.random_bool(0.5) as usize;
        let read = if rng.random_bool(0.5) { sent } else { 1 - sent };
        counts[sent][read] += 1;
    }
    let mi = mutual_information_estimate(&counts).unwrap();
    let spdc = estimate_channel(&RunConfig::new(SourceKind::SpdcUnentangled, paper(100), n, 8)).unwrap();
    let checks = [
        check(
            format!(
                "50%-error channel MI {:.2e} (plug-in {:.2e})",
                mi.miller_madow, mi.plug_in
            ),
            mi.miller_madow <= 5e-3,
        ),
        check(
            format!("spdc-u random-bit BER {:.4}", spdc.ber),
            (spdc.ber - 0.25).abs() <= 0.01,
        ),
    ];
    report(
        8,
        "no information at 50% error; spdc-u BER is 1/4",
        t,
        Duration::from_secs(120),
        &checks,
    );
}

#[test]
fn ac09_oracle_equivalence() {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut rng = StreamFactory::new(9).stream(Purpose::Auxiliary, 0);
    let mut track = |x: f64| worst = worst.max(x);

    let cap = 6;
    let two = ModeLayout::new(["h", "v"], cap).unwrap();
    let big = ModeLayout::new(["h", "v"], 30).unwrap();
    for _ in 0..3 {
        let psi = random_state(&two, cap - 1, &mut rng);
        for (k, name) in ["h", "v"].iter().enumerate() {
            let a = annihilation(2, k, cap);
            track(max_abs_diff(
                apply_ladder(&psi, name, Ladder::Annihilation).unwrap().amplitudes(),
                &apply_real(&a, psi.amplitudes()),
            ));
            track(max_abs_diff(
                apply_ladder(&psi, name, Ladder::Creation).unwrap().amplitudes(),
                &apply_real(&a.transpose(), psi.amplitudes()),
            ));
        }
        let comb = annihilation(2, 0, cap) * 0.8 - annihilation(2, 1, cap) * 0.6;
        let terms = [("h", 0.8), ("v", -0.6)];
        track(max_abs_diff(
            apply_creation_combination(&psi, &terms).unwrap().amplitudes(),
            &apply_real(&comb.transpose(), psi.amplitudes()),
        ));
        track(max_abs_diff(
            apply_annihilation_combination(&psi, &terms).unwrap().amplitudes(),
            &apply_real(&comb, psi.amplitudes()),
        ));

        let squeezed = two_mode_squeeze(&psi, "h", "v", 0.3, 1.0).unwrap();
        let exact = project(&apply_real(&dense_squeezer(0.3, 30), &embed(&psi, &big)), &big, &two);
        track(max_abs_diff(squeezed.state.amplitudes(), &exact));
        let kept: f64 = exact.iter().map(|z| z.norm_sqr()).sum();
        track((squeezed.leakage - (1.0 - kept)).abs());

        let full = random_state(&two, cap, &mut rng);
        for theta in [10.0, 45.0, 100.0] {
            let u = dense_rotation(2, 0, 1, theta, cap);
            track(max_abs_diff(
                full.rotate_polarization("h", "v", theta).unwrap().amplitudes(),
                &apply_real(&u, full.amplitudes()),
            ));
        }
        let rho = DensityOperator::from_pure(&full).unwrap();
        let u = dense_rotation(2, 0, 1, 33.0, cap).map(|x| num_complex::Complex64::new(x, 0.0));
        let expected = &u * rho.matrix() * u.adjoint();
        track(
            (rho.rotate_polarization("h", "v", 33.0).unwrap().matrix() - expected)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        );
    }

    let urn = urn_pmf_exact(1);
    let by_paths = urn_by_paths(1);
    let chsh = chsh_value(&bell_pair(), ChshAngles::standard()).unwrap();
    let checks = [
        check(format!("worst operator deviation {worst:.2e}"), worst <= 1e-10),
        check(
            format!(
                "urn m = 1 pmf [{}] equals path enumeration",
                urn.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(", ")
            ),
            urn == by_paths,
        ),
        check(
            format!("CHSH {chsh:.12}"),
            abs_diff_eq!(chsh, 2.0 * SQRT_2, epsilon = 1e-9),
        ),
    ];
    report(
        9,
        "Fock operators, urn pmf and CHSH match their oracles",
        t,
        Duration::from_secs(60),
        &checks,
    );
}

/// Exact urn distribution by walking every emission sequence.
fn urn_by_paths(m: u64) -> Vec<num_rational::BigRational> {
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    let steps = 3 * m as usize;
    let mut pmf = vec![BigRational::zero(); steps + 1];
    for path in 0u32..(1 << steps) {
        let (mut par, mut perp) = (1i64, 0i64);
        let mut p = BigRational::one();
        for k in 0..steps {
            let total = par + perp + 2;
            let grow_par = path >> k & 1 == 0;
            let n = if grow_par { par + 1 } else { perp + 1 };
            p *= BigRational::new(n.into(), total.into());
            if grow_par {
                par += 1;
            } else {
                perp += 1;
            }
        }
        pmf[perp as usize] += p;
    }
    pmf
}

#[test]
fn ac10_cli_output_is_independent_of_jobs() {
    let t = Instant::now();
    let runs: [&[&str]; 4] = [
        &[
            "simulate",
            "--source",
            "spdc-u",
            "--amplifier",
            "urn",
            "--m",
            "20",
            "--trials",
            "20000",
        ],
        &[
            "--format",
            "csv",
            "simulate",
            "--source",
            "bell",
            "--amplifier",
            "covariant",
            "--m",
            "2",
            "--trials",
            "5000",
        ],
        &["sweep", "--m-values", "16,64,256", "--trials", "20000"],
        &["nosignal", "--amplifier", "covariant", "--m", "2"],
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut checks = vec![];
    for (r, args) in runs.iter().enumerate() {
        let mut outputs = vec![];
        for jobs in [1, 3, 8] {
            let out = dir.path().join(format!("run{r}-jobs{jobs}.out"));
            let trials = dir.path().join(format!("run{r}-jobs{jobs}.trials.csv"));
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_photon-link"));
            cmd.args([
                "--seed",
                "1234",
                "--jobs",
                &jobs.to_string(),
                "--out",
                out.to_str().unwrap(),
            ])
            .args(*args);
            if args.contains(&"simulate") {
                cmd.args(["--trials-out", trials.to_str().unwrap()]);
            }
            let status = cmd.status().unwrap();
            let mut bytes = std::fs::read(&out).unwrap_or_default();
            bytes.extend(std::fs::read(&trials).unwrap_or_default());
            outputs.push((status.success(), bytes));
        }
        let ok = outputs.iter().all(|(s, b)| *s && !b.is_empty() && *b == outputs[0].1);
        checks.push(check(format!("{} with --jobs 1, 3, 8", args.join(" ")), ok));
    }
    report(
        10,
        "CLI output is byte-identical across --jobs",
        t,
        Duration::from_secs(60),
        &checks,
    );
}
