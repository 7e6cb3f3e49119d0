//! Settings grid and quantum reference quantities for the N-party GHZ state.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::phase::{cos_sixths, PiMultiple};

/// Number of local settings per party.
pub const SETTINGS: usize = 3;

/// The three local phases available to each party.
///
/// Party 1 uses `(π/6, π/2, 5π/6)`, every other party `(0, π/3, 2π/3)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettingsGrid {
    phases: Vec<[PiMultiple; SETTINGS]>,
}

const FIRST_PARTY: [i64; SETTINGS] = [1, 3, 5];
const OTHER_PARTY: [i64; SETTINGS] = [0, 2, 4];

pub fn build_settings(n: usize) -> Result<SettingsGrid> {
    if n < 2 {
        return Err(invalid(format!("need at least 2 parties, got {n}")));
    }
    let triple = |ks: [i64; SETTINGS]| ks.map(PiMultiple::sixths);
    let phases = (0..n)
        .map(|k| triple(if k == 0 { FIRST_PARTY } else { OTHER_PARTY }))
        .collect();
    Ok(SettingsGrid { phases })
}

impl SettingsGrid {
    pub fn n_parties(&self) -> usize {
        self.phases.len()
    }

    /// Phases of party `k` (0-based).
    pub fn party(&self, k: usize) -> &[PiMultiple; SETTINGS] {
        &self.phases[k]
    }

    pub fn parties(&self) -> impl Iterator<Item = &[PiMultiple; SETTINGS]> {
        self.phases.iter()
    }

    /// Phase class (multiple of π/6, mod 12) of party `k` at setting `i`.
    pub fn class(&self, k: usize, i: usize) -> u8 {
        self.phases[k][i]
            .sixths_class()
            .expect("grid phases are multiples of π/6")
    }

    /// Exact phase sum for a 0-based multi-index.
    pub fn phase_sum(&self, settings: &[usize]) -> PiMultiple {
        settings
            .iter()
            .zip(&self.phases)
            .fold(PiMultiple::ZERO, |acc, (&i, p)| acc + p[i])
    }

    /// `cos` of the phase sum, evaluated through the exact phase class.
    pub fn correlation_at(&self, settings: &[usize]) -> f64 {
        let class: i64 = settings
            .iter()
            .enumerate()
            .map(|(k, &i)| self.class(k, i) as i64)
            .sum();
        cos_sixths(class)
    }
}

/// Dense real tensor with one index in `{0,1,2}` per party, stored row-major
/// with the first party's index varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTensor")]
pub struct CorrelationTensor {
    n_parties: usize,
    entries: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTensor {
    n_parties: usize,
    entries: Vec<f64>,
}

impl TryFrom<RawTensor> for CorrelationTensor {
    type Error = Error;
    fn try_from(raw: RawTensor) -> Result<Self> {
        CorrelationTensor::from_entries(raw.n_parties, raw.entries)
    }
}

pub fn tensor_len(n_parties: usize) -> usize {
    SETTINGS.pow(n_parties as u32)
}

impl CorrelationTensor {
    pub fn zeros(n_parties: usize) -> Self {
        CorrelationTensor { n_parties, entries: vec![0.0; tensor_len(n_parties)] }
    }

    pub fn from_entries(n_parties: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != tensor_len(n_parties) {
            return Err(invalid(format!(
                "{} entries cannot index {n_parties} parties (need {})",
                entries.len(),
                tensor_len(n_parties)
            )));
        }
        if let Some(bad) = entries.iter().find(|e| !(-1.0..=1.0).contains(*e)) {
            return Err(invalid(format!("entry {bad} outside [-1, 1]")));
        }
        Ok(CorrelationTensor { n_parties, entries })
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry at a 0-based multi-index.
    pub fn get(&self, settings: &[usize]) -> f64 {
        self.entries[flat_index(settings)]
    }

    pub fn set(&mut self, settings: &[usize], value: f64) -> Result<()> {
        if !(-1.0..=1.0).contains(&value) {
            return Err(invalid(format!("entry {value} outside [-1, 1]")));
        }
        self.entries[flat_index(settings)] = value;
        Ok(())
    }
}

/// Row-major flat offset of a 0-based multi-index.
pub fn flat_index(settings: &[usize]) -> usize {
    settings.iter().fold(0, |acc, &i| acc * SETTINGS + i)
}

/// Inverse of [`flat_index`].
pub fn multi_index(mut flat: usize, n_parties: usize) -> Vec<usize> {
    let mut out = vec![0; n_parties];
    for slot in out.iter_mut().rev() {
        *slot = flat % SETTINGS;
        flat /= SETTINGS;
    }
    out
}

/// Probability of the ±1 outcome vector `results` at local phases `angles`
/// (radians) in an ideal GHZ measurement.
pub fn joint_probability(results: &[i8], angles: &[f64]) -> Result<f64> {
    if results.len() != angles.len() {
        return Err(Error::ShapeMismatch { expected: results.len(), found: angles.len() });
    }
    let mut sign = 1.0;
    for &r in results {
        match r {
            1 => {}
            -1 => sign = -sign,
            _ => return Err(invalid(format!("outcome {r} is not ±1"))),
        }
    }
    let n = results.len() as i32;
    Ok((1.0 + sign * quantum_correlation(angles)) / 2f64.powi(n))
}

/// GHZ correlation function: `cos` of the summed phases.
pub fn quantum_correlation(angles: &[f64]) -> f64 {
    angles.iter().sum::<f64>().cos()
}

/// The quantum correlation tensor `Q` on the grid.
pub fn build_q_tensor(grid: &SettingsGrid) -> CorrelationTensor {
    let n = grid.n_parties();
    let entries = (0..tensor_len(n))
        .map(|flat| grid.correlation_at(&multi_index(flat, n)))
        .collect();
    CorrelationTensor { n_parties: n, entries }
}

pub fn tensor_norm_sq(t: &CorrelationTensor) -> f64 {
    t.entries.iter().map(|e| e * e).sum()
}

pub fn tensor_entry_sum(t: &CorrelationTensor) -> f64 {
    t.entries.iter().sum()
}

pub fn scalar_product(a: &CorrelationTensor, b: &CorrelationTensor) -> Result<f64> {
    if a.n_parties != b.n_parties {
        return Err(Error::ShapeMismatch { expected: a.n_parties, found: b.n_parties });
    }
    Ok(a.entries.iter().zip(&b.entries).map(|(x, y)| x * y).sum())
}

/// `3^n / 2`.
pub fn norm_sq_closed_form(n: usize) -> f64 {
    3f64.powi(n as i32) / 2.0
}

/// `q_(n) = -2^n sin((n-1)π/3)`, the entry sum of `Q`.
pub fn q_closed_form(n: usize) -> f64 {
    // sin(x) = cos(π/2 - x); (n-1)π/3 is 2(n-1) sixths.
    -(2f64.powi(n as i32)) * cos_sixths(3 - 2 * (n as i64 - 1))
}
