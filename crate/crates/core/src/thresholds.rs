//! Critical visibility and detection efficiency of the three-setting
//! inequality, and the two-setting thresholds they are compared against.
//!
//! With `B = 2^(N-1)√3`, `‖Q‖² = 3^N/2` and `q = Σ Q`, a GHZ experiment with
//! visibility `V` and per-station efficiency `η` violates the
//! detection-corrected inequality iff
//!
//! ```text
//! η^N · (3^N/2) · V  >  B − |q| (1 − η)^N
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::ghz::{norm_sq_closed_form, q_closed_form};
use crate::lhv::lhv_bound;

pub const BISECTION_LOWER: f64 = 1e-6;
pub const BISECTION_MAX_ITER: usize = 200;
pub const BISECTION_TOL: f64 = 1e-12;

/// Critical visibility, or the sentinel for "no visibility violates".
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum CriticalVisibility {
    /// May exceed 1, meaning the physical range `V ≤ 1` never violates.
    Finite(f64),
    Unattainable,
}

impl CriticalVisibility {
    pub fn value(&self) -> Option<f64> {
        match *self {
            CriticalVisibility::Finite(v) => Some(v),
            CriticalVisibility::Unattainable => None,
        }
    }

    /// Whether some `V ∈ [0, 1]` exceeds the threshold.
    pub fn is_attainable(&self) -> bool {
        self.value().is_some_and(|v| v < 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub n_parties: usize,
    pub eta: f64,
    pub v_critical: CriticalVisibility,
    /// Effective local bound `B − |q|(1−η)^N` that `|(Q, E_expt)|` must beat.
    pub bound_lhs: f64,
    pub q_n_abs: f64,
}

fn check_parties(n: usize) -> Result<()> {
    if n < 2 {
        return Err(invalid(format!("need at least 2 parties, got {n}")));
    }
    Ok(())
}

pub fn critical_visibility(n: usize, eta: f64) -> Result<ThresholdResult> {
    check_parties(n)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(invalid(format!("efficiency must lie in (0, 1], got {eta}")));
    }
    let nn = n as i32;
    let q_n_abs = q_closed_form(n).abs();
    let bound_lhs = lhv_bound(n) - q_n_abs * (1.0 - eta).powi(nn);
    let v_critical = if bound_lhs <= 0.0 {
        CriticalVisibility::Unattainable
    } else if eta == 1.0 {
        // Same value as the general expression; written out to keep the
        // η = 1 limit exact: √3·(2/3)^N.
        CriticalVisibility::Finite(3f64.sqrt() * (2.0f64 / 3.0).powi(nn))
    } else {
        CriticalVisibility::Finite(bound_lhs / (eta.powi(nn) * norm_sq_closed_form(n)))
    };
    Ok(ThresholdResult { n_parties: n, eta, v_critical, bound_lhs, q_n_abs })
}

/// `η^N (3^N/2) + |q|(1−η)^N − B`: positive iff perfect visibility violates.
fn efficiency_margin(n: usize, eta: f64) -> f64 {
    let nn = n as i32;
    eta.powi(nn) * norm_sq_closed_form(n) + q_closed_form(n).abs() * (1.0 - eta).powi(nn) - lhv_bound(n)
}

/// Smallest efficiency at which a perfect-visibility GHZ experiment still
/// violates, found by bisection on `[1e-6, 1]`.
pub fn critical_efficiency(n: usize) -> Result<f64> {
    check_parties(n)?;
    let f = |eta| efficiency_margin(n, eta);
    let (mut lo, mut hi) = (BISECTION_LOWER, 1.0);
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return Err(Error::Internal(format!("no sign change of the efficiency margin for n = {n}")));
    }
    // The margin dips before it rises (at n = 2 it starts at 0), so
    // monotonicity does not hold; what bisection needs is a single crossing.
    let scan = 4096;
    let crossings = (0..scan)
        .map(|i| f(lo + (hi - lo) * i as f64 / scan as f64) > 0.0)
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|w| w[0] != w[1])
        .count();
    if crossings != 1 {
        return Err(Error::Internal(format!("{crossings} sign changes on the bracket for n = {n}")));
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < BISECTION_TOL {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Closed form of the critical efficiency when `q_(N) = 0` (N ≡ 1 mod 3).
pub fn critical_efficiency_q_zero(n: usize) -> Option<f64> {
    (q_closed_form(n) == 0.0).then(|| (lhv_bound(n) / norm_sq_closed_form(n)).powf(1.0 / n as f64))
}

/// Two-setting visibility threshold `2^((1−N)/2)`.
pub fn old_visibility_threshold(n: usize) -> f64 {
    2f64.powf((1.0 - n as f64) / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRow {
    pub n: usize,
    pub v_cr_new: f64,
    pub v_cr_old: f64,
    pub eta_cr: f64,
}

pub fn threshold_table(n_max: usize) -> Result<Vec<ThresholdRow>> {
    if n_max < 2 {
        return Err(invalid(format!("n_max must be at least 2, got {n_max}")));
    }
    (2..=n_max)
        .map(|n| {
            let v = critical_visibility(n, 1.0)?.v_critical;
            Ok(ThresholdRow {
                n,
                v_cr_new: v.value().ok_or_else(|| Error::Internal("η = 1 is always attainable".into()))?,
                v_cr_old: old_visibility_threshold(n),
                eta_cr: critical_efficiency(n)?,
            })
        })
        .collect()
}

/// A fraction as a percentage with one decimal, ties rounded away from zero.
pub fn format_percent(fraction: f64) -> String {
    format!("{:.1}", (fraction * 1000.0).round() / 10.0)
}
