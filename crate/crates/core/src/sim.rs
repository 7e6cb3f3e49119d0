//! Monte Carlo model of an imperfect N-party GHZ experiment.
//!
//! Each station registers its particle independently with probability `η`;
//! a missed particle is recorded as outcome `0`. When every station fires,
//! the sign vector follows `2^-N (1 + V ∏r cos Σφ)`. Otherwise each station
//! that did fire shows an independent fair sign.
//!
//! Sampling detections first and signs second reproduces the full model.
//! The all-detected branch carries weight `η^N` times the sign law above,
//! which is the experimental prediction. If station `k` is missed, the GHZ
//! sign law summed over `r_k` gives `2^-(N-1)` for every remaining sign
//! pattern, since the `∏r` term cancels. The same holds after removing more
//! stations, so patterns with a zero are uniform over the signs of the
//! stations that fired and do not depend on the settings. That is the
//! symmetry the detection-corrected inequality assumes. The all-detected
//! sign law itself depends on the signs only through `∏r`, so it is drawn
//! as a parity with `P(∏r = +1) = (1 + V cos Σφ)/2` followed by uniform
//! signs for the first `N-1` stations, the last sign fixing the parity.
//!
//! Trials are cut into fixed blocks of [`TRIAL_BLOCK`]. Block `b` draws from
//! ChaCha8 stream `b` under the configured seed, and all aggregation is
//! integer counting, so summaries do not depend on threads or scheduling.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::{fold_range, map_range, Exec};
use crate::ghz::{
    build_q_tensor, build_settings, multi_index, q_closed_form, scalar_product, tensor_len,
    CorrelationTensor, SettingsGrid, SETTINGS,
};
use crate::lhv::{f_map, lhv_bound};

/// Largest party count the simulator accepts (3^12 setting combinations).
pub const MAX_SIM_PARTIES: usize = 12;

/// Trials per independent random stream.
pub const TRIAL_BLOCK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SettingPolicy {
    /// Trial `t` uses setting combination `t mod 3^N`.
    #[default]
    RoundRobin,
    UniformRandom,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_parties: usize,
    pub visibility: f64,
    pub efficiency: f64,
    pub trials: u64,
    pub seed: u64,
    pub setting_policy: SettingPolicy,
}

impl ExperimentConfig {
    pub fn new(n_parties: usize, visibility: f64, efficiency: f64, trials: u64, seed: u64) -> Result<Self> {
        let c = ExperimentConfig {
            n_parties,
            visibility,
            efficiency,
            trials,
            seed,
            setting_policy: SettingPolicy::RoundRobin,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn with_policy(mut self, policy: SettingPolicy) -> Self {
        self.setting_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=MAX_SIM_PARTIES).contains(&self.n_parties) {
            return Err(invalid(format!(
                "simulation needs 2 <= n <= {MAX_SIM_PARTIES}, got {}",
                self.n_parties
            )));
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(invalid(format!("visibility must lie in [0, 1], got {}", self.visibility)));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(invalid(format!("efficiency must lie in [0, 1], got {}", self.efficiency)));
        }
        if self.trials == 0 {
            return Err(invalid("trial count must be positive"));
        }
        Ok(())
    }
}

/// One trial: 1-based setting index and outcome in `{-1, 0, 1}` per party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRecord {
    pub settings: Vec<u8>,
    pub outcomes: Vec<i8>,
}

impl TrialRecord {
    fn flat_setting(&self) -> usize {
        self.settings.iter().fold(0, |acc, &s| acc * SETTINGS + usize::from(s - 1))
    }
}

impl fmt::Display for TrialRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |it: &mut dyn Iterator<Item = String>| it.collect::<Vec<_>>().join(" ");
        write!(
            f,
            "{} | {}",
            join(&mut self.settings.iter().map(|s| s.to_string())),
            join(&mut self.outcomes.iter().map(|m| m.to_string()))
        )
    }
}

impl FromStr for TrialRecord {
    type Err = String;

    fn from_str(line: &str) -> std::result::Result<Self, String> {
        let (lhs, rhs) = line.split_once('|').ok_or("missing '|' separator")?;
        let settings = lhs
            .split_whitespace()
            .map(|t| match t.parse::<u8>() {
                Ok(s @ 1..=3) => Ok(s),
                _ => Err(format!("setting {t:?} not in 1..=3")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let outcomes = rhs
            .split_whitespace()
            .map(|t| match t.parse::<i8>() {
                Ok(m @ -1..=1) => Ok(m),
                _ => Err(format!("outcome {t:?} not in {{-1, 0, 1}}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if settings.is_empty() || settings.len() != outcomes.len() {
            return Err(format!("{} settings but {} outcomes", settings.len(), outcomes.len()));
        }
        Ok(TrialRecord { settings, outcomes })
    }
}

pub fn write_records<W: Write>(mut w: W, records: &[TrialRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(w, "{r}")?;
    }
    Ok(())
}

/// Parses newline-delimited records, skipping blank lines.
pub fn read_records<R: BufRead>(r: R) -> Result<Vec<TrialRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse { line: i + 1, reason: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(line.parse().map_err(|reason| Error::Parse { line: i + 1, reason })?);
    }
    Ok(out)
}

/// `P(∏r = +1 | all detected) = (1 + V cos Σφ) / 2`.
fn parity_plus_probability(grid: &SettingsGrid, settings: &[usize], visibility: f64) -> Result<f64> {
    let p = 0.5 * (1.0 + visibility * grid.correlation_at(settings));
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Internal(format!("negative joint probability at settings {settings:?}")));
    }
    Ok(p)
}

fn draw_outcomes<R: Rng>(eta: f64, p_plus: f64, rng: &mut R, out: &mut [i8]) {
    let n = out.len();
    let mut all = true;
    let signs: u64 = rng.gen();
    for (k, m) in out.iter_mut().enumerate() {
        let detected = rng.gen::<f64>() < eta;
        all &= detected;
        *m = if !detected {
            0
        } else if signs >> k & 1 == 1 {
            1
        } else {
            -1
        };
    }
    if all {
        let parity: i8 = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
        let head: i8 = out[..n - 1].iter().product();
        out[n - 1] = parity * head;
    }
}

/// Draws one trial at the given 1-based settings.
pub fn sample_trial<R: Rng>(config: &ExperimentConfig, settings: &[u8], rng: &mut R) -> Result<TrialRecord> {
    config.validate()?;
    if settings.len() != config.n_parties {
        return Err(Error::ShapeMismatch { expected: config.n_parties, found: settings.len() });
    }
    if settings.iter().any(|s| !(1..=3).contains(s)) {
        return Err(invalid(format!("settings {settings:?} must lie in 1..=3")));
    }
    let grid = build_settings(config.n_parties)?;
    let zero_based: Vec<usize> = settings.iter().map(|&s| usize::from(s - 1)).collect();
    let p_plus = parity_plus_probability(&grid, &zero_based, config.visibility)?;
    let mut outcomes = vec![0; config.n_parties];
    draw_outcomes(config.efficiency, p_plus, rng, &mut outcomes);
    Ok(TrialRecord { settings: settings.to_vec(), outcomes })
}

struct Sampler {
    config: ExperimentConfig,
    p_plus: Vec<f64>,
}

impl Sampler {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n_parties;
        let grid = build_settings(n)?;
        let p_plus = (0..tensor_len(n))
            .map(|flat| parity_plus_probability(&grid, &multi_index(flat, n), config.visibility))
            .collect::<Result<_>>()?;
        Ok(Sampler { config: *config, p_plus })
    }

    fn block_count(&self) -> u64 {
        self.config.trials.div_ceil(TRIAL_BLOCK)
    }

    /// Runs every trial of block `block`, in trial order.
    fn run_block(&self, block: u64, mut visit: impl FnMut(usize, &[i8])) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(block);
        let combos = self.p_plus.len();
        let start = block * TRIAL_BLOCK;
        let end = (start + TRIAL_BLOCK).min(self.config.trials);
        let mut out = vec![0i8; self.config.n_parties];
        for t in start..end {
            let flat = match self.config.setting_policy {
                SettingPolicy::RoundRobin => (t % combos as u64) as usize,
                SettingPolicy::UniformRandom => rng.gen_range(0..combos),
            };
            draw_outcomes(self.config.efficiency, self.p_plus[flat], &mut rng, &mut out);
            visit(flat, &out);
        }
    }
}

/// Per-setting integer counts from which every estimate is derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tally {
    n_parties: usize,
    counts: Vec<u64>,
    /// Σ ∏ m_k.
    product_sums: Vec<i64>,
    /// Trials where every station fired (Σ (∏ m_k)²).
    all_detected: Vec<u64>,
    /// Σ ∏ f(m_k).
    aux_sums: Vec<i64>,
    all_zero: u64,
    trials: u64,
}

impl Tally {
    pub fn new(n_parties: usize) -> Self {
        let len = tensor_len(n_parties);
        Tally {
            n_parties,
            counts: vec![0; len],
            product_sums: vec![0; len],
            all_detected: vec![0; len],
            aux_sums: vec![0; len],
            all_zero: 0,
            trials: 0,
        }
    }

    fn record(&mut self, flat: usize, outcomes: &[i8]) {
        let prod: i8 = outcomes.iter().product();
        let aux: i8 = outcomes.iter().map(|&m| f_map(m)).product();
        self.counts[flat] += 1;
        self.product_sums[flat] += i64::from(prod);
        self.all_detected[flat] += u64::from(prod != 0);
        self.aux_sums[flat] += i64::from(aux);
        self.all_zero += u64::from(outcomes.iter().all(|&m| m == 0));
        self.trials += 1;
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        let add_u = |a: &mut Vec<u64>, b: &[u64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        let add_i = |a: &mut Vec<i64>, b: &[i64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add_u(&mut self.counts, &other.counts);
        add_i(&mut self.product_sums, &other.product_sums);
        add_u(&mut self.all_detected, &other.all_detected);
        add_i(&mut self.aux_sums, &other.aux_sums);
        self.all_zero += other.all_zero;
        self.trials += other.trials;
        self
    }

    pub fn from_records(n_parties: usize, records: &[TrialRecord]) -> Result<Self> {
        let mut t = Tally::new(n_parties);
        for r in records {
            if r.settings.len() != n_parties || r.outcomes.len() != n_parties {
                return Err(Error::ShapeMismatch { expected: n_parties, found: r.settings.len() });
            }
            t.record(r.flat_setting(), &r.outcomes);
        }
        Ok(t)
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    fn means(&self, sums: &[i64]) -> CorrelationTensor {
        let entries = sums
            .iter()
            .zip(&self.counts)
            .map(|(&s, &c)| if c == 0 { 0.0 } else { s as f64 / c as f64 })
            .collect();
        CorrelationTensor::from_entries(self.n_parties, entries).expect("means of ±1 products lie in [-1, 1]")
    }

    /// Per-setting mean of `∏ m_k`; unvisited settings read 0.
    pub fn estimated_tensor(&self) -> CorrelationTensor {
        self.means(&self.product_sums)
    }

    /// Per-setting mean of `∏ f(m_k)`.
    pub fn auxiliary_tensor(&self) -> CorrelationTensor {
        self.means(&self.aux_sums)
    }

    fn standard_errors(&self, sums: &[i64], sq_sums: impl Iterator<Item = u64>) -> Vec<f64> {
        sums.iter()
            .zip(sq_sums)
            .zip(&self.counts)
            .map(|((&s, sq), &c)| {
                if c < 2 {
                    return f64::INFINITY;
                }
                let c = c as f64;
                let var = ((sq as f64 - (s as f64).powi(2) / c) / (c - 1.0)).max(0.0);
                (var / c).sqrt()
            })
            .collect()
    }

    /// 1σ standard error of each entry of [`Tally::estimated_tensor`].
    pub fn entry_standard_errors(&self) -> Vec<f64> {
        self.standard_errors(&self.product_sums, self.all_detected.iter().copied())
    }

    /// Per-setting mean of `∏ f(m_k) − ∏ m_k`.
    pub fn auxiliary_offsets(&self) -> Vec<f64> {
        let aux = self.auxiliary_tensor();
        let est = self.estimated_tensor();
        aux.entries().iter().zip(est.entries()).map(|(a, e)| a - e).collect()
    }

    /// 1σ standard error of each [`Tally::auxiliary_offsets`] entry. The
    /// per-trial difference is 0 when all stations fire and ±1 otherwise.
    pub fn auxiliary_offset_standard_errors(&self) -> Vec<f64> {
        let diffs: Vec<i64> = self.aux_sums.iter().zip(&self.product_sums).map(|(a, p)| a - p).collect();
        let sq = self.counts.iter().zip(&self.all_detected).map(|(c, d)| c - d);
        self.standard_errors(&diffs, sq)
    }

    /// Pooled mean of `∏ f(m_k) − ∏ m_k` over all trials, with its 1σ error.
    pub fn pooled_auxiliary_offset(&self) -> (f64, f64) {
        let t = self.trials as f64;
        let sum: i64 = self.aux_sums.iter().sum::<i64>() - self.product_sums.iter().sum::<i64>();
        let sq = (self.trials - self.all_detected.iter().sum::<u64>()) as f64;
        let mean = sum as f64 / t;
        let var = if self.trials < 2 { f64::INFINITY } else { ((sq - sum as f64 * mean) / (t - 1.0)).max(0.0) };
        (mean, (var / t).sqrt())
    }

    pub fn p_all_zero(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.all_zero as f64 / self.trials as f64
        }
    }

    /// Binomial 1σ error of [`Tally::p_all_zero`].
    pub fn p_all_zero_standard_error(&self) -> f64 {
        let p = self.p_all_zero();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub config: ExperimentConfig,
    pub estimated_tensor: CorrelationTensor,
    pub p_all_zero: f64,
    /// `|(Q, E_expt)|`.
    pub lhs: f64,
    /// `2^(N-1)√3 − P(0,…,0)·|q_(N)|`.
    pub rhs: f64,
    pub violated: bool,
    /// Infinite (serialized as `null`) when some setting saw fewer than two trials.
    pub standard_error_lhs: f64,
}

impl ExperimentSummary {
    pub fn from_tally(tally: &Tally, config: &ExperimentConfig) -> Result<Self> {
        let n = config.n_parties;
        if tally.n_parties != n {
            return Err(Error::ShapeMismatch { expected: n, found: tally.n_parties });
        }
        let q = build_q_tensor(&build_settings(n)?);
        let estimated_tensor = tally.estimated_tensor();
        let lhs = scalar_product(&q, &estimated_tensor)?.abs();
        let p_all_zero = tally.p_all_zero();
        let rhs = lhv_bound(n) - p_all_zero * q_closed_form(n).abs();
        let standard_error_lhs = q
            .entries()
            .iter()
            .zip(tally.entry_standard_errors())
            .map(|(w, se)| if *w == 0.0 { 0.0 } else { (w * se).powi(2) })
            .sum::<f64>()
            .sqrt();
        Ok(ExperimentSummary {
            config: *config,
            estimated_tensor,
            p_all_zero,
            lhs,
            rhs,
            violated: lhs > rhs,
            standard_error_lhs,
        })
    }
}

/// Simulates every trial and returns the aggregated counts.
pub fn run_tally(config: &ExperimentConfig, exec: Exec) -> Result<Tally> {
    let sampler = Sampler::new(config)?;
    let n = config.n_parties;
    Ok(fold_range(
        exec,
        0..sampler.block_count(),
        || Tally::new(n),
        |mut tally, block| {
            sampler.run_block(block, |flat, out| tally.record(flat, out));
            tally
        },
        Tally::merge,
    ))
}

pub fn run_experiment(config: &ExperimentConfig, exec: Exec) -> Result<ExperimentSummary> {
    ExperimentSummary::from_tally(&run_tally(config, exec)?, config)
}

/// The same trials as [`run_tally`], materialized in trial order.
pub fn simulate_records(config: &ExperimentConfig, exec: Exec) -> Result<Vec<TrialRecord>> {
    let sampler = Sampler::new(config)?;
    let n = config.n_parties;
    let blocks = map_range(exec, 0..sampler.block_count(), |block| {
        let mut recs = Vec::new();
        sampler.run_block(block, |flat, out| {
            recs.push(TrialRecord {
                settings: multi_index(flat, n).into_iter().map(|i| i as u8 + 1).collect(),
                outcomes: out.to_vec(),
            })
        });
        recs
    });
    Ok(blocks.into_iter().flatten().collect())
}

/// Correlation estimate after remapping non-detections to `-1`.
pub fn auxiliary_tensor(records: &[TrialRecord], config: &ExperimentConfig) -> Result<CorrelationTensor> {
    Ok(Tally::from_records(config.n_parties, records)?.auxiliary_tensor())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub visibility: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub violated: bool,
    pub standard_error_lhs: f64,
}

/// Runs one experiment per visibility, all with the same seed.
pub fn visibility_sweep(
    n: usize,
    eta: f64,
    v_grid: &[f64],
    trials_per_point: u64,
    seed: u64,
    exec: Exec,
) -> Result<Vec<SweepPoint>> {
    v_grid
        .iter()
        .map(|&v| {
            let s = run_experiment(&ExperimentConfig::new(n, v, eta, trials_per_point, seed)?, exec)?;
            Ok(SweepPoint {
                visibility: v,
                lhs: s.lhs,
                rhs: s.rhs,
                violated: s.violated,
                standard_error_lhs: s.standard_error_lhs,
            })
        })
        .collect()
}

/// Exact probability of outcome vector `m ∈ {-1,0,1}^N` under the model,
/// at 0-based settings. Brute-force reference for the sampler.
pub fn outcome_probability(config: &ExperimentConfig, settings: &[usize], outcomes: &[i8]) -> Result<f64> {
    let grid = build_settings(config.n_parties)?;
    let n = config.n_parties as i32;
    let detected = outcomes.iter().filter(|&&m| m != 0).count() as i32;
    let eta = config.efficiency;
    let p_detect = eta.powi(detected) * (1.0 - eta).powi(n - detected);
    if detected < n {
        return Ok(p_detect / 2f64.powi(detected));
    }
    let sign = f64::from(outcomes.iter().product::<i8>());
    Ok(p_detect * (1.0 + config.visibility * sign * grid.correlation_at(settings)) / 2f64.powi(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg(n: usize, v: f64, eta: f64, trials: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(n, v, eta, trials, seed).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::new(1, 1.0, 1.0, 10, 0).is_err());
        assert!(ExperimentConfig::new(13, 1.0, 1.0, 10, 0).is_err());
        assert!(ExperimentConfig::new(3, 1.5, 1.0, 10, 0).is_err());
        assert!(ExperimentConfig::new(3, 1.0, -0.1, 10, 0).is_err());
        assert!(ExperimentConfig::new(3, 1.0, 1.0, 0, 0).is_err());
    }

    #[test]
    fn record_text_format() {
        let r = TrialRecord { settings: vec![1, 2, 3], outcomes: vec![1, -1, 0] };
        assert_eq!(r.to_string(), "1 2 3 | 1 -1 0");
        assert_eq!("1 2 3 | 1 -1 0".parse::<TrialRecord>().unwrap(), r);
        assert!("1 4 | 1 1".parse::<TrialRecord>().is_err());
        assert!("1 2 | 1 2".parse::<TrialRecord>().is_err());
        assert!("1 2 1 1".parse::<TrialRecord>().is_err());
        assert!("1 2 | 1".parse::<TrialRecord>().is_err());
        let err = read_records("1 1 | 1 1\n\nbad\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn model_probabilities_normalize_and_are_nonnegative() {
        for &(v, eta) in &[(1.0, 1.0), (0.3, 0.7), (0.0, 0.2)] {
            let c = cfg(3, v, eta, 1, 0);
            for flat in 0..27 {
                let s = multi_index(flat, 3);
                let mut total = 0.0;
                for code in 0..27 {
                    let m: Vec<i8> = multi_index(code, 3).iter().map(|&d| d as i8 - 1).collect();
                    let p = outcome_probability(&c, &s, &m).unwrap();
                    assert!(p >= 0.0);
                    total += p;
                }
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eta_zero_gives_all_zeros() {
        let c = cfg(3, 0.7, 0.0, 1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            assert_eq!(sample_trial(&c, &[1, 2, 3], &mut rng).unwrap().outcomes, vec![0, 0, 0]);
        }
    }

    #[test]
    fn sample_trial_argument_checks() {
        let c = cfg(3, 1.0, 1.0, 1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_trial(&c, &[1, 2], &mut rng).is_err());
        assert!(sample_trial(&c, &[1, 2, 4], &mut rng).is_err());
    }

    #[test]
    fn zero_correlation_setting_is_uniform() {
        // Settings (2,1,1): phase sum π/2.
        let c = cfg(3, 1.0, 1.0, 1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trials = 400_000;
        let mut hist = [0u64; 8];
        for _ in 0..trials {
            let r = sample_trial(&c, &[2, 1, 1], &mut rng).unwrap();
            let code = r.outcomes.iter().fold(0, |acc, &m| acc << 1 | usize::from(m == 1));
            hist[code] += 1;
        }
        let p = 1.0 / 8.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for h in hist {
            assert!((h as f64 / trials as f64 - p).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn plus_plus_frequency_matches_model() {
        let c = cfg(2, 1.0, 1.0, 1, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 1_000_000;
        let hits = (0..trials)
            .filter(|_| sample_trial(&c, &[1, 1], &mut rng).unwrap().outcomes == [1, 1])
            .count();
        let p = 0.25 * (1.0 + (std::f64::consts::PI / 6.0).cos());
        assert_abs_diff_eq!(p, 0.46651, epsilon = 1e-5);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn records_and_tally_agree() {
        let c = cfg(3, 0.8, 0.9, 50_000, 5);
        let recs = simulate_records(&c, Exec::Parallel).unwrap();
        assert_eq!(recs.len(), 50_000);
        assert_eq!(Tally::from_records(3, &recs).unwrap(), run_tally(&c, Exec::Sequential).unwrap());
        let mut buf = Vec::new();
        write_records(&mut buf, &recs[..100]).unwrap();
        assert_eq!(read_records(buf.as_slice()).unwrap(), recs[..100]);
    }

    #[test]
    fn round_robin_counts_are_equal() {
        let t = run_tally(&cfg(2, 1.0, 1.0, 9 * 1000, 0), Exec::Parallel).unwrap();
        assert!(t.counts().iter().all(|&c| c == 1000));
    }

    #[test]
    fn sparse_uniform_sampling_flags_infinite_error() {
        let c = cfg(4, 1.0, 1.0, 20, 3).with_policy(SettingPolicy::UniformRandom);
        let s = run_experiment(&c, Exec::Sequential).unwrap();
        assert!(s.standard_error_lhs.is_infinite());
        let json = serde_json::to_value(&s).unwrap();
        assert!(json["standard_error_lhs"].is_null());
    }

    #[test]
    fn auxiliary_equals_estimate_at_full_efficiency() {
        let c = cfg(3, 0.6, 1.0, 27_000, 2);
        let recs = simulate_records(&c, Exec::Sequential).unwrap();
        let t = Tally::from_records(3, &recs).unwrap();
        assert_eq!(auxiliary_tensor(&recs, &c).unwrap(), t.estimated_tensor());
    }

    #[test]
    fn p_all_zero_two_parties() {
        let t = run_tally(&cfg(2, 0.5, 0.8, 900_000, 9), Exec::Parallel).unwrap();
        assert!((t.p_all_zero() - 0.04).abs() < 4.0 * t.p_all_zero_standard_error());
    }
}
