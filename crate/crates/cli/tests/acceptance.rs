//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use ghzbell::ghz::{build_q_tensor, build_settings, scalar_product, tensor_entry_sum, tensor_norm_sq};
use ghzbell::lhv::{lhv_bound, map_f, max_s_brute, max_s_factorized, s_lambda, violation_factor, DeterministicStrategy};
use ghzbell::sim::{run_experiment, run_tally, ExperimentConfig};
use ghzbell::thresholds::{
    critical_efficiency, critical_efficiency_q_zero, critical_visibility, format_percent, old_visibility_threshold,
};
use ghzbell::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(what: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    ensure((got - want).abs() < tol, || format!("{what}: {got} vs {want} (tol {tol:e})"))
}

fn q(n: usize) -> ghzbell::ghz::CorrelationTensor {
    build_q_tensor(&build_settings(n).unwrap())
}

fn ac1_norm_identity() -> Check {
    let start = Instant::now();
    for n in 2..=10 {
        within(&format!("N={n}"), tensor_norm_sq(&q(n)), 3f64.powi(n as i32) / 2.0, 1e-9)?;
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("||Q||² = 3^N/2, N = 2..10, {t:.2?}"))
}

fn ac2_entry_sum() -> Check {
    for n in 2..=10 {
        let closed = -(2f64.powi(n as i32)) * ((n as f64 - 1.0) * std::f64::consts::PI / 3.0).sin();
        let sum = tensor_entry_sum(&q(n));
        within(&format!("N={n}"), sum, closed, 1e-9)?;
        if n % 3 == 1 {
            within(&format!("q_({n}) = 0"), sum, 0.0, 1e-9)?;
        }
    }
    Ok("Σ Q = -2^N sin((N-1)π/3), N = 2..10; zero at N = 4, 7, 10".into())
}

fn ac3_bound_tightness() -> Check {
    let start = Instant::now();
    for n in 2..=6 {
        within(&format!("N={n}"), max_s_brute(n, Exec::Parallel).map_err(|e| e.to_string())?.max_s, lhv_bound(n), 1e-9)?;
    }
    let core = start.elapsed();
    let start = Instant::now();
    for n in 7..=8 {
        within(&format!("N={n}"), max_s_brute(n, Exec::Parallel).map_err(|e| e.to_string())?.max_s, lhv_bound(n), 1e-9)?;
    }
    let extra = start.elapsed();
    ensure(extra < Duration::from_secs(60), || format!("N = 7, 8 took {extra:?}"))?;
    Ok(format!("max over 8^N strategies = 2^(N-1)√3, N = 2..6 in {core:.2?}, N = 7..8 in {extra:.2?}"))
}

fn ac4_oracle_equivalence() -> Check {
    let round9 = |x: f64| (x * 1e9).round() as i64;
    for n in 2..=6 {
        let brute = max_s_brute(n, Exec::Parallel).map_err(|e| e.to_string())?.max_s;
        let dp = max_s_factorized(n).map_err(|e| e.to_string())?.max_s;
        ensure(round9(brute) == round9(dp), || format!("N={n}: {brute} vs {dp}"))?;
    }
    Ok("brute force = phase-class DP after rounding to 1e-9, N = 2..6".into())
}

fn ac5_violation_factor() -> Check {
    for n in 2..=10 {
        let qn = q(n);
        let ratio = scalar_product(&qn, &qn).unwrap() / lhv_bound(n);
        within(&format!("N={n}"), ratio, 1.5f64.powi(n as i32) / 3f64.sqrt(), 1e-12)?;
        within(&format!("N={n} closed"), violation_factor(n), ratio, 1e-12)?;
    }
    Ok("(Q,Q)/2^(N-1)√3 = (3/2)^N/√3, N = 2..10".into())
}

fn pct(what: &str, x: f64, want: &str) -> Result<(), String> {
    let got = format_percent(x);
    ensure(got == want, || format!("{what}: {got}% vs {want}%"))
}

fn ac6_threshold_table() -> Check {
    let v = |n| critical_visibility(n, 1.0).unwrap().v_critical.value().unwrap();
    for (n, want) in [(3, "51.3"), (4, "34.2"), (5, "22.8"), (10, "3.0"), (2, "77.0")] {
        pct(&format!("V_cr({n})"), v(n), want)?;
    }
    for (n, want) in [(2, "70.7"), (3, "50.0"), (4, "35.4"), (5, "25.0"), (10, "4.4")] {
        pct(&format!("V_old({n})"), old_visibility_threshold(n), want)?;
    }
    Ok("V_cr 77.0 51.3 34.2 22.8 3.0 %, V_old 70.7 50.0 35.4 25.0 4.4 %".into())
}

fn ac7_critical_efficiency() -> Check {
    let eta = |n| critical_efficiency(n).map_err(|e| e.to_string());
    for (n, want) in [(2, "87.0"), (3, "79.8"), (4, "76.5"), (5, "74.4")] {
        pct(&format!("η_cr({n})"), eta(n)?, want)?;
    }
    within("η_cr(4) closed form", eta(4)?, critical_efficiency_q_zero(4).ok_or("q_(4) != 0")?, 1e-12)?;
    let e40 = eta(40)?;
    ensure(e40 > 0.6667 && e40 < 0.68, || format!("η_cr(40) = {e40}"))?;
    Ok(format!("η_cr 87.0 79.8 76.5 74.4 %, η_cr(40) = {e40:.4}"))
}

fn ac8_f_mapping() -> Check {
    let qn = q(3);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut violations = 0;
    for _ in 0..10_000 {
        let a = (0..3).map(|_| [0i8; 3].map(|_| rng.gen_range(-1..=1))).collect();
        let s = DeterministicStrategy::three_outcome(a).unwrap();
        if s_lambda(&map_f(&s), &qn).unwrap() > 4.0 * 3f64.sqrt() + 1e-9 {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} violations"))?;
    Ok("10^4 random three-outcome strategies at N=3: S after f ≤ 4√3".into())
}

fn ac9_simulation() -> Check {
    let start = Instant::now();
    let cfg = |n, v, eta, trials| ExperimentConfig::new(n, v, eta, trials, 1).map_err(|e| e.to_string());
    let ideal = run_experiment(&cfg(3, 1.0, 1.0, 2_700_000)?, Exec::Parallel).map_err(|e| e.to_string())?;
    let t1 = start.elapsed();
    ensure((ideal.lhs - 13.5).abs() < 4.0 * ideal.standard_error_lhs, || {
        format!("lhs {} ± {} vs 13.5", ideal.lhs, ideal.standard_error_lhs)
    })?;
    ensure(ideal.violated, || "ideal run not violated".into())?;

    let start = Instant::now();
    let low = run_experiment(&cfg(3, 0.40, 1.0, 2_700_000)?, Exec::Parallel).map_err(|e| e.to_string())?;
    let t2 = start.elapsed();
    ensure(!low.violated, || format!("V=0.40 violated: lhs {} > rhs {}", low.lhs, low.rhs))?;

    let start = Instant::now();
    let tally = run_tally(&cfg(2, 1.0, 0.8, 1_000_000)?, Exec::Parallel).map_err(|e| e.to_string())?;
    let t3 = start.elapsed();
    let p0 = tally.p_all_zero();
    ensure((p0 - 0.04).abs() < 4.0 * tally.p_all_zero_standard_error(), || format!("p_all_zero {p0}"))?;
    let (offset, se) = tally.pooled_auxiliary_offset();
    ensure((offset - 0.04).abs() < 4.0 * se, || format!("offset {offset} ± {se}"))?;

    let limit = Duration::from_secs(120);
    ensure(t1 < limit && t2 < limit && t3 < limit, || format!("runtimes {t1:?} {t2:?} {t3:?}"))?;
    Ok(format!(
        "lhs {:.4} ± {:.4}; V=0.40 lhs {:.3} < rhs {:.3}; p0 {p0:.5}; offset {offset:.5} ± {se:.5}; max run {:.2?}",
        ideal.lhs,
        ideal.standard_error_lhs,
        low.lhs,
        low.rhs,
        t1.max(t2).max(t3)
    ))
}

fn ac10_determinism() -> Check {
    let run = |workers: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_ghzbell"))
            .args(["simulate", "--n", "3", "--v", "0.9", "--eta", "0.85", "--trials", "2700000", "--seed", "7"])
            .args(["--workers", workers])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
        Ok(out.stdout)
    };
    let one = run("1")?;
    let eight = run("8")?;
    ensure(one == eight, || "outputs differ".into())?;
    Ok(format!("--workers 1 and --workers 8 give identical {} byte JSON", one.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AC1 norm identity", ac1_norm_identity),
        ("AC2 entry-sum identity", ac2_entry_sum),
        ("AC3 bound tightness (exhaustive)", ac3_bound_tightness),
        ("AC4 oracle equivalence", ac4_oracle_equivalence),
        ("AC5 violation factor", ac5_violation_factor),
        ("AC6 visibility thresholds", ac6_threshold_table),
        ("AC7 critical efficiencies", ac7_critical_efficiency),
        ("AC8 f-mapping soundness", ac8_f_mapping),
        ("AC9 simulation statistics", ac9_simulation),
        ("AC10 worker-count determinism", ac10_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
