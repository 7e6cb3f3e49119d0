use std::f64::consts::PI;

use ghzbell::ghz::{
    build_q_tensor, build_settings, joint_probability, multi_index, quantum_correlation, tensor_entry_sum,
    tensor_norm_sq,
};

/// Phases in radians straight from the settings definition, independent of
/// the exact-phase machinery.
fn raw_phase(party: usize, setting: usize) -> f64 {
    let base = if party == 0 { PI / 6.0 } else { 0.0 };
    base + setting as f64 * PI / 3.0
}

fn oracle_q(n: usize) -> Vec<f64> {
    (0..3usize.pow(n as u32))
        .map(|flat| {
            let idx = multi_index(flat, n);
            idx.iter().enumerate().map(|(k, &i)| raw_phase(k, i)).sum::<f64>().cos()
        })
        .collect()
}

#[test]
fn q_tensor_matches_libm_oracle() {
    for n in 2..=6 {
        let q = build_q_tensor(&build_settings(n).unwrap());
        for (a, b) in q.entries().iter().zip(oracle_q(n)) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn norm_and_sum_closed_forms() {
    for n in 2..=6 {
        let q = build_q_tensor(&build_settings(n).unwrap());
        let oracle = oracle_q(n);
        let norm: f64 = oracle.iter().map(|x| x * x).sum();
        let sum: f64 = oracle.iter().sum();
        assert!((tensor_norm_sq(&q) - 3f64.powi(n as i32) / 2.0).abs() < 1e-9);
        assert!((norm - 3f64.powi(n as i32) / 2.0).abs() < 1e-9);
        let closed = -(2f64.powi(n as i32)) * ((n as f64 - 1.0) * PI / 3.0).sin();
        assert!((tensor_entry_sum(&q) - closed).abs() < 1e-9);
        assert!((sum - closed).abs() < 1e-9);
    }
}

#[test]
fn correlation_is_signed_sum_of_probabilities() {
    for n in 2..=4 {
        for flat in 0..3usize.pow(n as u32) {
            let angles: Vec<f64> = multi_index(flat, n).iter().enumerate().map(|(k, &i)| raw_phase(k, i)).collect();
            let mut e = 0.0;
            for bits in 0..(1u32 << n) {
                let r: Vec<i8> = (0..n).map(|k| if bits >> k & 1 == 1 { -1 } else { 1 }).collect();
                let sign: i8 = r.iter().product();
                e += f64::from(sign) * joint_probability(&r, &angles).unwrap();
            }
            assert!((e - quantum_correlation(&angles)).abs() < 1e-12);
        }
    }
}

#[test]
fn entries_take_sixth_values_only() {
    let allowed = [0.0, 0.5, -0.5, 3f64.sqrt() / 2.0, -(3f64.sqrt()) / 2.0, 1.0, -1.0];
    for n in 2..=6 {
        let q = build_q_tensor(&build_settings(n).unwrap());
        for &e in q.entries() {
            assert!(e.abs() <= 1.0);
            assert!(allowed.iter().any(|a| (a - e).abs() < 1e-15), "{e}");
        }
    }
}
