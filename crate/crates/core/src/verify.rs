//! Pass/fail suite over the identities the rest of the crate relies on.
//!
//! A fault can be injected by name: the named check's measured quantity is
//! shifted by one before comparison, which must make it fail.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::exec::Exec;
use crate::ghz::{
    build_q_tensor, build_settings, norm_sq_closed_form, q_closed_form, scalar_product, tensor_entry_sum,
    tensor_norm_sq,
};
use crate::lhv::{
    lhv_bound, map_f, max_s_brute, max_s_factorized, s_lambda, s_lambda_factorized, violation_factor,
    DeterministicStrategy, BRUTE_MAX_PARTIES,
};
use crate::thresholds::{
    critical_efficiency, critical_efficiency_q_zero, critical_visibility, format_percent, old_visibility_threshold,
};

pub const IDENTITY_TOL: f64 = 1e-9;

pub const CHECK_NAMES: [&str; 10] = [
    "norm_identity",
    "entry_sum_identity",
    "bound_tightness_brute",
    "oracle_equivalence",
    "factorization_identity",
    "violation_factor",
    "visibility_thresholds",
    "old_thresholds",
    "critical_efficiencies",
    "f_mapping_soundness",
];

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Largest N for the exhaustive search (2..=8).
    pub brute_n_max: usize,
    pub inject_fault: Option<String>,
    pub exec: Exec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { brute_n_max: 6, inject_fault: None, exec: Exec::Parallel }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Outcome = std::result::Result<String, String>;

fn within(what: &str, got: f64, want: f64, tol: f64) -> std::result::Result<(), String> {
    if (got - want).abs() < tol {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, expected {want} (tol {tol:e})"))
    }
}

fn pct_eq(what: &str, got: f64, want: &str) -> std::result::Result<(), String> {
    let p = format_percent(got);
    if p == want {
        Ok(())
    } else {
        Err(format!("{what}: {p}% instead of {want}%"))
    }
}

fn norm_identity(shift: f64, _: &VerifyOptions) -> Outcome {
    for n in 2..=10 {
        let q = build_q_tensor(&build_settings(n).map_err(|e| e.to_string())?);
        within(&format!("||Q||² at N={n}"), tensor_norm_sq(&q) + shift, norm_sq_closed_form(n), IDENTITY_TOL)?;
    }
    Ok("||Q||² = 3^N/2 for N = 2..10".into())
}

fn entry_sum_identity(shift: f64, _: &VerifyOptions) -> Outcome {
    for n in 2..=10 {
        let q = build_q_tensor(&build_settings(n).map_err(|e| e.to_string())?);
        let sum = tensor_entry_sum(&q) + shift;
        within(&format!("q_({n})"), sum, q_closed_form(n), IDENTITY_TOL)?;
        if n % 3 == 1 && sum.abs() >= IDENTITY_TOL {
            return Err(format!("q_({n}) should vanish, got {sum}"));
        }
    }
    Ok("Σ Q = -2^N sin((N-1)π/3) for N = 2..10".into())
}

fn bound_tightness_brute(shift: f64, o: &VerifyOptions) -> Outcome {
    for n in 2..=o.brute_n_max {
        let r = max_s_brute(n, o.exec).map_err(|e| e.to_string())?;
        within(&format!("max S at N={n}"), r.max_s + shift, lhv_bound(n), IDENTITY_TOL)?;
    }
    Ok(format!("max over 8^N strategies = 2^(N-1)√3 for N = 2..{}", o.brute_n_max))
}

fn round9(x: f64) -> i64 {
    (x * 1e9).round() as i64
}

fn oracle_equivalence(shift: f64, o: &VerifyOptions) -> Outcome {
    for n in 2..=o.brute_n_max {
        let brute = max_s_brute(n, o.exec).map_err(|e| e.to_string())?.max_s + shift;
        let dp = max_s_factorized(n).map_err(|e| e.to_string())?.max_s;
        if round9(brute) != round9(dp) {
            return Err(format!("N={n}: brute {brute} vs factorized {dp}"));
        }
    }
    Ok(format!("brute force = phase-class DP for N = 2..{}", o.brute_n_max))
}

fn factorization_identity(shift: f64, _: &VerifyOptions) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for n in 2..=5usize {
        let grid = build_settings(n).map_err(|e| e.to_string())?;
        let q = build_q_tensor(&grid);
        let total = 8u64.pow(n as u32);
        let indices: Vec<u64> = if n <= 3 { (0..total).collect() } else { (0..10_000).map(|_| rng.gen_range(0..total)).collect() };
        for idx in indices {
            let s = DeterministicStrategy::from_index(n, idx);
            let a = s_lambda(&s, &q).map_err(|e| e.to_string())? + shift;
            let b = s_lambda_factorized(&s, &grid).map_err(|e| e.to_string())?;
            within(&format!("S_λ for strategy {idx} at N={n}"), a, b, IDENTITY_TOL)?;
        }
    }
    Ok("(Q, H_λ) = Re ∏ z_k, exhaustive N = 2,3, sampled N = 4,5".into())
}

fn violation_factor_check(shift: f64, _: &VerifyOptions) -> Outcome {
    for n in 2..=10 {
        let q = build_q_tensor(&build_settings(n).map_err(|e| e.to_string())?);
        let ratio = scalar_product(&q, &q).map_err(|e| e.to_string())? / lhv_bound(n) + shift;
        within(&format!("violation factor at N={n}"), ratio, violation_factor(n), 1e-12)?;
    }
    Ok("(Q,Q)/bound = (3/2)^N/√3 for N = 2..10".into())
}

fn visibility_thresholds(shift: f64, _: &VerifyOptions) -> Outcome {
    let v = |n| -> std::result::Result<f64, String> {
        let r = critical_visibility(n, 1.0).map_err(|e| e.to_string())?;
        r.v_critical.value().map(|v| v + shift).ok_or_else(|| "unattainable".to_string())
    };
    for (n, want) in [(2, "77.0"), (3, "51.3"), (4, "34.2"), (5, "22.8"), (10, "3.0")] {
        pct_eq(&format!("V_cr({n})"), v(n)?, want)?;
    }
    for n in 2..=20 {
        within(&format!("V_cr({n})"), v(n)?, 3f64.sqrt() * (2.0f64 / 3.0).powi(n as i32), 1e-12)?;
    }
    Ok("V_cr = √3(2/3)^N; 77.0, 51.3, 34.2, 22.8, 3.0 %".into())
}

fn old_thresholds(shift: f64, _: &VerifyOptions) -> Outcome {
    for (n, want) in [(2, "70.7"), (3, "50.0"), (4, "35.4"), (5, "25.0"), (10, "4.4")] {
        pct_eq(&format!("V_old({n})"), old_visibility_threshold(n) + shift, want)?;
    }
    Ok("2^((1-N)/2): 70.7, 50.0, 35.4, 25.0, 4.4 %".into())
}

fn critical_efficiencies(shift: f64, _: &VerifyOptions) -> Outcome {
    let eta = |n| critical_efficiency(n).map(|e| e + shift).map_err(|e| e.to_string());
    for (n, want) in [(2, "87.0"), (3, "79.8"), (4, "76.5"), (5, "74.4")] {
        pct_eq(&format!("η_cr({n})"), eta(n)?, want)?;
    }
    for n in [4, 7, 10] {
        let closed = critical_efficiency_q_zero(n).ok_or("q_(N) should vanish")?;
        within(&format!("η_cr({n}) closed form"), eta(n)?, closed, 1e-12)?;
    }
    let e40 = eta(40)?;
    if !(e40 > 0.6667 && e40 < 0.68) {
        return Err(format!("η_cr(40) = {e40} outside (0.6667, 0.68)"));
    }
    Ok("η_cr: 87.0, 79.8, 76.5, 74.4 %; closed form at q = 0; η_cr(40) ≈ 2/3".into())
}

fn f_mapping_soundness(shift: f64, _: &VerifyOptions) -> Outcome {
    let n = 3;
    let q = build_q_tensor(&build_settings(n).map_err(|e| e.to_string())?);
    let mut rng = ChaCha8Rng::seed_from_u64(0xf00d);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10_000 {
        let a = (0..n).map(|_| [0; 3].map(|_: i8| rng.gen_range(-1..=1))).collect();
        let s = DeterministicStrategy::three_outcome(a).map_err(|e| e.to_string())?;
        let v = s_lambda(&map_f(&s), &q).map_err(|e| e.to_string())? + shift;
        worst = worst.max(v);
        if v > lhv_bound(n) + IDENTITY_TOL {
            return Err(format!("S after f-mapping = {v} exceeds 4√3"));
        }
    }
    Ok(format!("10^4 three-outcome strategies at N=3, max S after f = {worst:.6}"))
}

/// Runs every check in [`CHECK_NAMES`] order.
pub fn run_checks(options: &VerifyOptions) -> Result<Vec<CheckResult>> {
    if !(2..=BRUTE_MAX_PARTIES).contains(&options.brute_n_max) {
        return Err(invalid(format!("brute-force depth must be in 2..={BRUTE_MAX_PARTIES}")));
    }
    if let Some(f) = &options.inject_fault {
        if !CHECK_NAMES.contains(&f.as_str()) {
            return Err(invalid(format!("unknown check {f:?}; known: {}", CHECK_NAMES.join(", "))));
        }
    }
    let checks: [fn(f64, &VerifyOptions) -> Outcome; 10] = [
        norm_identity,
        entry_sum_identity,
        bound_tightness_brute,
        oracle_equivalence,
        factorization_identity,
        violation_factor_check,
        visibility_thresholds,
        old_thresholds,
        critical_efficiencies,
        f_mapping_soundness,
    ];
    Ok(CHECK_NAMES
        .iter()
        .zip(checks)
        .map(|(name, check)| {
            let shift = if options.inject_fault.as_deref() == Some(*name) { 1.0 } else { 0.0 };
            let (passed, detail) = match check(shift, options) {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult { name: name.to_string(), passed, detail }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_passes() {
        let opts = VerifyOptions { brute_n_max: 4, ..Default::default() };
        for r in run_checks(&opts).unwrap() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }

    #[test]
    fn every_injected_fault_is_caught() {
        for name in CHECK_NAMES {
            let opts = VerifyOptions { brute_n_max: 3, inject_fault: Some(name.into()), ..Default::default() };
            let results = run_checks(&opts).unwrap();
            for r in results {
                assert_eq!(r.passed, r.name != name, "{}: {}", r.name, r.detail);
            }
        }
    }

    #[test]
    fn rejects_bad_options() {
        assert!(run_checks(&VerifyOptions { brute_n_max: 9, ..Default::default() }).is_err());
        let o = VerifyOptions { inject_fault: Some("nope".into()), ..Default::default() };
        assert!(run_checks(&o).is_err());
    }
}
