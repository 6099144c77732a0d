//! Shared helpers for driving the binary and generating fixtures.
// shared across test binaries; each uses a subset
#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_volcorr"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("failed to spawn volcorr")
}

/// Runs the binary expecting success; returns stdout as UTF-8.
pub fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "volcorr {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout not UTF-8")
}

/// Runs the binary expecting failure; returns (exit code, stderr).
pub fn run_err(args: &[&str]) -> (i32, String) {
    let out = run(args);
    assert!(!out.status.success(), "volcorr {args:?} unexpectedly succeeded");
    (
        out.status.code().expect("no exit code"),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

pub fn parse_json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("output is not valid JSON")
}

/// Data rows of a CSV rendering: everything after the header line,
/// skipping `#` comment lines.
pub fn csv_data_rows(text: &str) -> Vec<&str> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect()
}

/// Valid, strictly increasing dates without needing a calendar: 28-day
/// months, 12 per year.
pub fn synth_date(i: usize) -> String {
    let year = 2000 + i / 336;
    let month = 1 + (i / 28) % 12;
    let day = 1 + i % 28;
    format!("{year:04}-{month:02}-{day:02}")
}

/// Standard Student-t draw with 3 degrees of freedom.
pub fn student_t3(rng: &mut ChaCha8Rng) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let chi2: f64 = (0..3).map(|_| rng.sample::<f64, _>(StandardNormal).powi(2)).sum();
    z / (chi2 / 3.0).sqrt()
}

/// Daily price/volume fixture with heavy-tailed (t3) log changes in both
/// columns and a common factor linking them.
pub fn write_daily_fixture(path: &Path, n_rows: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::from("Date,Adj Close,Volume\n");
    let mut log_p = 4.0_f64;
    let mut log_v = 10.0_f64;
    for i in 0..n_rows {
        text.push_str(&format!(
            "{},{},{}\n",
            synth_date(i),
            log_p.exp(),
            log_v.exp()
        ));
        let shock = student_t3(&mut rng);
        log_p += 0.01 * shock;
        log_v += 0.15 * shock + 0.15 * student_t3(&mut rng);
    }
    std::fs::write(path, text).unwrap();
}

/// One-column fixture of Pareto(alpha) draws with unit scale.
pub fn write_pareto_fixture(path: &Path, n: usize, alpha: f64, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut text = String::from("x\n");
    for _ in 0..n {
        let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        text.push_str(&format!("{}\n", u.powf(-1.0 / alpha)));
    }
    std::fs::write(path, text).unwrap();
}

/// Two-column fixture where column b leads column a by `shift` steps:
/// b[t] = a[t + shift].
pub fn write_shifted_fixture(path: &Path, n: usize, shift: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..n + shift).map(|_| rng.sample(StandardNormal)).collect();
    let mut text = String::from("a,b\n");
    for t in 0..n {
        text.push_str(&format!("{},{}\n", xs[t], xs[t + shift]));
    }
    std::fs::write(path, text).unwrap();
}
