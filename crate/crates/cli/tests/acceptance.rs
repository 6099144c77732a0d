//! Acceptance suite: one test per shipping requirement, each printing a
//! single PASS or FAIL line (visible with `--nocapture`). Tolerances are
//! part of the contract; fixtures are generated in place from seeded
//! generators so every run checks identical data.

mod common;

use std::time::Instant;

use common::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use volcorr::garchx::{self, GarchXParams};
use volcorr::scaling::{default_window_grid, dcca_curve, dfa_curve, fit_exponent};
use volcorr::series::normalize_abs;
use volcorr::tails::{
    alpha_from_tau, hill_estimator, mean_tau_curve, pdf_tail_fit, return_intervals, q_grid,
};
use volcorr::{corr, tails};

fn verdict(name: &str, violations: Vec<String>) {
    if violations.is_empty() {
        println!("PASS: {name}");
    } else {
        println!("FAIL: {name}: {}", violations.join("; "));
        panic!("{name}: {}", violations.join("; "));
    }
}

fn check(violations: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok {
        violations.push(msg());
    }
}

fn pareto_draws(n: usize, alpha: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| rng.gen_range(f64::MIN_POSITIVE..1.0_f64).powf(-1.0 / alpha))
        .collect()
}

/// Tail integral of `pdf` from `a` to infinity via Simpson's rule after the
/// substitution x = a/u, which maps the domain onto (0, 1].
fn simpson_tail(pdf: impl Fn(f64) -> f64, a: f64, panels: usize) -> f64 {
    let n = 2 * panels;
    let h = 1.0 / n as f64;
    let g = |u: f64| {
        if u == 0.0 {
            0.0
        } else {
            let x = a / u;
            pdf(x) * a / (u * u)
        }
    };
    let mut sum = g(0.0) + g(1.0);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(i as f64 * h);
    }
    sum * h / 3.0
}

// 1. All three tail estimators agree with the generating exponent on large
//    synthetic samples, fast enough for routine use.
#[test]
fn tail_estimator_trio_recovers_pareto_exponents() {
    let mut violations = Vec::new();
    let n = 1_000_000;
    for (i, &alpha) in [2.5_f64, 3.0, 4.0].iter().enumerate() {
        let t0 = Instant::now();
        let draws = pareto_draws(n, alpha, 100 + i as u64);
        let vol = normalize_abs(&draws).unwrap();

        let hill = hill_estimator(&vol.values, n / 10).unwrap();
        check(&mut violations, (hill.alpha - alpha).abs() <= 0.2, || {
            format!("order-statistics alpha {} for true {alpha}", hill.alpha)
        });

        let grid = q_grid(2.0, 8.0, 0.5);
        let sets: Vec<_> = grid.iter().map(|&q| return_intervals(&vol, q)).collect();
        let curve = mean_tau_curve(&sets, 50).unwrap();
        let tau = alpha_from_tau(&curve, (2.0, 8.0)).unwrap();
        check(&mut violations, (tau.alpha - alpha).abs() <= 0.2, || {
            format!("interval-scaling alpha {} for true {alpha}", tau.alpha)
        });

        // the density fit needs its range inside the distribution support
        let lo = (1.1 / vol.sigma).max(2.0);
        let hi = {
            let mut sorted = vol.values.clone();
            sorted.sort_unstable_by(|a, b| b.total_cmp(a));
            sorted[n / 10_000]
        };
        let (pdf, _) = pdf_tail_fit(&vol.values, 20, (lo, hi)).unwrap();
        check(&mut violations, (pdf.alpha - alpha).abs() <= 0.2, || {
            format!("density-fit alpha {} for true {alpha}", pdf.alpha)
        });

        let elapsed = t0.elapsed().as_secs_f64();
        check(&mut violations, elapsed < 30.0, || {
            format!("case alpha={alpha} took {elapsed:.1} s")
        });
    }
    verdict("tail estimator trio recovers synthetic exponents within 0.2", violations);
}

// 2. The mean return interval at threshold q is the reciprocal of the
//    exceedance probability: one exceedance per tau steps on average.
#[test]
fn inverse_mean_interval_matches_exceedance_probability() {
    let mut violations = Vec::new();
    let n = 10_000_000;
    let alpha = 3.0;
    let draws = pareto_draws(n, alpha, 7);
    let vol = normalize_abs(&draws).unwrap();

    let grid = q_grid(2.0, 8.0, 0.5);
    let sets: Vec<_> = grid.iter().map(|&q| return_intervals(&vol, q)).collect();
    let curve = mean_tau_curve(&sets, 50).unwrap();
    check(&mut violations, curve.thresholds.len() == grid.len(), || {
        format!("only {} of {} thresholds kept", curve.thresholds.len(), grid.len())
    });

    let density = |x: f64| if x >= 1.0 { alpha * x.powf(-alpha - 1.0) } else { 0.0 };
    for i in 0..curve.thresholds.len() {
        let q = curve.thresholds[i];
        let p_exceed = simpson_tail(density, q * vol.sigma, 1 << 13);
        let inv_tau = 1.0 / curve.mean_tau[i];
        let rel = (inv_tau / p_exceed - 1.0).abs();
        check(&mut violations, rel <= 0.03, || {
            format!("q={q}: 1/tau {inv_tau:.5e} vs probability {p_exceed:.5e} ({rel:.3} off)")
        });
    }
    verdict(
        "inverse mean interval equals the exceedance probability within 3%",
        violations,
    );
}

// 3. Fluctuation exponents calibrate to 0.5 on white noise and 1.5 on its
//    running sum.
#[test]
fn fluctuation_exponent_calibration_on_white_and_integrated_noise() {
    let mut violations = Vec::new();
    let t0 = Instant::now();
    let n = 1 << 14;
    let fit_range = Some((64, 2048));
    let mut white_sum = 0.0;
    let mut runsum_sum = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let white: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mut acc = 0.0;
        let runsum: Vec<f64> = white
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        let grid = default_window_grid(n);
        white_sum += fit_exponent(&dfa_curve(&white, &grid).unwrap(), fit_range)
            .unwrap()
            .exponent;
        runsum_sum += fit_exponent(&dfa_curve(&runsum, &grid).unwrap(), fit_range)
            .unwrap()
            .exponent;
    }
    let white_mean = white_sum / 20.0;
    let runsum_mean = runsum_sum / 20.0;
    check(&mut violations, (white_mean - 0.5).abs() <= 0.03, || {
        format!("white-noise exponent mean {white_mean:.4}")
    });
    check(&mut violations, (runsum_mean - 1.5).abs() <= 0.05, || {
        format!("running-sum exponent mean {runsum_mean:.4}")
    });
    let elapsed = t0.elapsed().as_secs_f64();
    check(&mut violations, elapsed < 10.0, || format!("took {elapsed:.1} s"));
    verdict(
        "fluctuation exponent calibrates on white and integrated noise",
        violations,
    );
}

// 4. The cross-fluctuation of a series with itself reduces to the
//    single-series fluctuation, identically.
#[test]
fn self_cross_fluctuation_reduces_to_single_series_exactly() {
    let mut violations = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..100 {
        let len = rng.gen_range(64..2000);
        let scale = 10.0_f64.powi(rng.gen_range(-6..7));
        let x: Vec<f64> = (0..len)
            .map(|_| rng.sample::<f64, _>(StandardNormal) * scale)
            .collect();
        let grid = default_window_grid(len);
        let dfa = dfa_curve(&x, &grid).unwrap();
        let dcca = dcca_curve(&x, &x, &grid).unwrap();
        check(&mut violations, dfa.window_sizes == dcca.window_sizes, || {
            format!("case {case}: window grids differ")
        });
        for i in 0..dfa.fluctuation.len() {
            let (a, b) = (dfa.fluctuation[i], dcca.fluctuation[i]);
            check(&mut violations, a.to_bits() == b.to_bits(), || {
                format!(
                    "case {case} (len {len}, scale {scale:e}), window {}: {a:e} vs {b:e}",
                    dfa.window_sizes[i]
                )
            });
        }
        if violations.len() > 5 {
            break;
        }
    }
    verdict(
        "self cross-fluctuation is bit-identical to the single-series curve",
        violations,
    );
}

// 5. Cross-variance coupling produces long-range cross-correlation between
//    the magnitudes of the two simulated series; removing the coupling
//    removes it.
#[test]
fn volatility_coupling_produces_long_range_cross_correlation() {
    let mut violations = Vec::new();
    let coupled = GarchXParams::symmetric(0.01, 0.14, 0.65, 0.2);
    let decoupled = GarchXParams::symmetric(0.01, 0.14, 0.65, 0.0);
    let t_len = 20_000;
    let max_lag = 200;
    let n_seeds = 50;

    let run = |params: &GarchXParams| -> (usize, Vec<usize>) {
        let mut lag0_hits = 0;
        let mut sig_counts = Vec::new();
        for seed in 0..n_seeds as u64 {
            let sim = garchx::simulate(params, t_len, seed, 1000).unwrap();
            let abs_a: Vec<f64> = sim.eps.iter().map(|v| v.abs()).collect();
            let abs_b: Vec<f64> = sim.eps_tilde.iter().map(|v| v.abs()).collect();
            let cf = corr::cross_correlation(&abs_a, &abs_b, max_lag).unwrap();
            let zero = cf.lags.iter().position(|&l| l == 0).unwrap();
            if cf.rho[zero] > cf.band {
                lag0_hits += 1;
            }
            sig_counts.push(corr::significant_lag_count(&cf));
        }
        sig_counts.sort_unstable();
        (lag0_hits, sig_counts)
    };

    let (hits, counts) = run(&coupled);
    let median = counts[counts.len() / 2];
    check(&mut violations, hits * 100 >= 95 * n_seeds, || {
        format!("lag-0 above band in only {hits}/{n_seeds} seeds")
    });
    check(&mut violations, median > 50, || {
        format!("median significant-lag count {median} (of {max_lag}) not above 50")
    });

    let (_, counts0) = run(&decoupled);
    let median0 = counts0[counts0.len() / 2];
    check(&mut violations, median0 <= 20, || {
        format!("decoupled median significant-lag count {median0} above chance levels")
    });
    verdict(
        "magnitude cross-correlation is long-range with coupling, absent without",
        violations,
    );
}

// 6. Closed-form stationary variance and the stability boundary.
#[test]
fn closed_form_variance_and_stability_boundary() {
    let mut violations = Vec::new();
    let params = GarchXParams::symmetric(0.01, 0.14, 0.65, 0.2);
    let (v, vt) = garchx::stationary_variance(&params).unwrap();
    check(&mut violations, (v - 1.0).abs() <= 1e-12, || {
        format!("variance {v} not 1 within 1e-12")
    });
    check(&mut violations, v.to_bits() == vt.to_bits(), || {
        format!("symmetric components differ: {v} vs {vt}")
    });

    let at_boundary = GarchXParams::symmetric(0.01, 0.14, 0.65, 0.2); // persistence 0.99
    check(&mut violations, garchx::check_stationarity(&at_boundary).stationary, || {
        "persistence 0.99 flagged nonstationary".to_string()
    });
    let beyond = GarchXParams::symmetric(0.01, 0.14, 0.65, 0.26); // persistence 1.05
    let rep = garchx::check_stationarity(&beyond);
    check(&mut violations, !rep.stationary, || {
        format!("persistence 1.05 flagged stationary (margin {})", rep.margin)
    });
    check(
        &mut violations,
        garchx::stationary_variance(&beyond).is_err(),
        || "nonstationary parameters produced a finite variance".to_string(),
    );
    verdict("closed-form variance and stability boundary", violations);
}

// 7. Published tail numbers for the reference daily dataset. Runs only
//    when the fixture is supplied (its redistribution is out of scope);
//    set SP500_FIXTURE or place the file at data/sp500.csv.
#[test]
fn reference_daily_fixture_reproduces_published_tail_numbers() {
    let path = std::env::var("SP500_FIXTURE").unwrap_or_else(|_| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/sp500.csv").to_string()
    });
    if !std::path::Path::new(&path).is_file() {
        println!("PASS: reference daily fixture (SKIPPED: no fixture at {path})");
        return;
    }
    let mut violations = Vec::new();
    let text = std::fs::read_to_string(&path).unwrap();
    let (series, _) = volcorr::ingest::parse_csv(
        &text,
        &volcorr::ingest::ColumnSchema::default(),
        "sp500",
    )
    .unwrap();

    let vol_changes = volcorr::series::log_changes(&series, volcorr::series::ChangeKind::Volume);
    let vol = normalize_abs(&vol_changes.values).unwrap();
    let n = vol.values.len();

    let hill = hill_estimator(&vol.values, (n as f64 * tails::DEFAULT_HILL_FRACTION) as usize)
        .unwrap();
    check(&mut violations, (hill.alpha - 2.80).abs() <= 0.07, || {
        format!("order-statistics volume-change alpha {:.3} vs 2.80 +/- 0.07", hill.alpha)
    });

    let grid = q_grid(2.0, 8.0, 0.5);
    let sets: Vec<_> = grid.iter().map(|&q| return_intervals(&vol, q)).collect();
    let tau = alpha_from_tau(&mean_tau_curve(&sets, 50).unwrap(), (2.0, 8.0)).unwrap();
    check(&mut violations, (tau.alpha - 2.97).abs() <= 0.15, || {
        format!("interval-scaling volume-change alpha {:.3} vs 2.97 +/- 0.15", tau.alpha)
    });

    let price_changes = volcorr::series::log_changes(&series, volcorr::series::ChangeKind::Price);
    let abs_p: Vec<f64> = price_changes.values.iter().map(|v| v.abs()).collect();
    let abs_v: Vec<f64> = vol_changes.values.iter().map(|v| v.abs()).collect();
    let cf = corr::cross_correlation(&abs_p, &abs_v, 200).unwrap();
    let sig = corr::significant_lag_count(&cf);
    check(&mut violations, sig > 50, || {
        format!("only {sig} significant magnitude cross-correlation lags")
    });
    verdict("reference daily fixture reproduces published tail numbers", violations);
}

// 8. Every command is byte-reproducible: same flags, same bytes, whatever
//    the environment's threading hints say.
#[test]
fn every_command_is_byte_reproducible() {
    let mut violations = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let daily = dir.path().join("daily.csv");
    write_daily_fixture(&daily, 2000, 41);
    let pareto = dir.path().join("pareto.csv");
    write_pareto_fixture(&pareto, 20_000, 3.0, 42);
    let daily = daily.to_string_lossy().into_owned();
    let pareto = pareto.to_string_lossy().into_owned();

    let command_sets: Vec<Vec<&str>> = vec![
        vec!["returns", "--input", &daily],
        vec!["ccf", "--input", &daily],
        vec!["dfa", "--input", &daily, "--format", "csv"],
        vec!["dcca", "--input", &daily],
        vec!["hill", "--input", &pareto, "--column", "x"],
        vec!["tauq", "--input", &pareto, "--column", "x"],
        vec!["pdf", "--input", &pareto, "--column", "x", "--format", "csv"],
        vec!["simulate", "--length", "5000", "--seed", "77"],
    ];
    for args in &command_sets {
        let first = bin().args(args).output().unwrap();
        assert!(first.status.success(), "{args:?}: {}", String::from_utf8_lossy(&first.stderr));
        let second = bin().args(args).output().unwrap();
        let third = bin()
            .args(args)
            .env("RAYON_NUM_THREADS", "8")
            .env("OMP_NUM_THREADS", "8")
            .output()
            .unwrap();
        check(&mut violations, first.stdout == second.stdout, || {
            format!("{}: two runs differ", args[0])
        });
        check(&mut violations, first.stdout == third.stdout, || {
            format!("{}: output depends on threading environment", args[0])
        });
    }

    // the composite: compare every artifact byte for byte
    let out_a = dir.path().join("rep_a");
    let out_b = dir.path().join("rep_b");
    for out in [&out_a, &out_b] {
        let st = bin()
            .args(["report", "--input", &daily, "--out", &out.to_string_lossy()])
            .output()
            .unwrap();
        assert!(st.status.success(), "report: {}", String::from_utf8_lossy(&st.stderr));
    }
    let mut names: Vec<String> = std::fs::read_dir(&out_a)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    check(&mut violations, !names.is_empty(), || "report produced nothing".to_string());
    for name in &names {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap_or_default();
        // the manifest echoes the output directory, which legitimately
        // differs between the two runs
        if name == "manifest.json" {
            let sa = String::from_utf8(a).unwrap().replace("rep_a", "X");
            let sb = String::from_utf8(b).unwrap().replace("rep_b", "X");
            check(&mut violations, sa == sb, || "manifests differ beyond the path".to_string());
        } else {
            check(&mut violations, a == b, || format!("artifact {name} differs"));
        }
    }
    verdict("every command is byte-reproducible", violations);
}
