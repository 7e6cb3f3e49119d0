//! Deterministic local-hidden-variable strategies and the Bell bound
//! `2^(N-1)·√3`.
//!
//! Any local-realistic correlation tensor is a convex mixture of the
//! product tensors produced by deterministic strategies, and `(Q, H)` is
//! linear in `H`, so maximizing over strategies maximizes over all
//! local-realistic models.
//!
//! The bound is certified two independent ways:
//!
//! * [`max_s_brute`] contracts `Q` against every one of the `8^N`
//!   two-outcome strategies.
//! * [`max_s_factorized`] writes `S_λ = Re ∏_k z_k` with party phasors
//!   `z_k = Σ_i v_i e^{iφ_i}`. Each phasor is `0` or has modulus 2 and a
//!   phase that is a multiple of π/6 (odd multiples for party 1, even ones
//!   for everybody else), so the product phase is an odd multiple of π/6
//!   and `Re ∏ z_k ≤ 2^N cos(π/6)`. A dynamic program over the 12 phase
//!   classes finds the best reachable class and a strategy realizing it.

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::exec::{fold_range, Exec};
use crate::ghz::{build_q_tensor, build_settings, CorrelationTensor, SettingsGrid, SETTINGS};
use crate::phase::{cos_sixths, HALF_SQRT3};

/// Largest party count accepted by [`max_s_brute`].
pub const BRUTE_MAX_PARTIES: usize = 8;

/// Tolerance used to decide that two strategy values tie.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alphabet {
    TwoOutcome,
    ThreeOutcome,
}

impl Alphabet {
    fn admits(self, v: i8) -> bool {
        match self {
            Alphabet::TwoOutcome => v == 1 || v == -1,
            Alphabet::ThreeOutcome => (-1..=1).contains(&v),
        }
    }
}

/// One deterministic hidden state: an outcome for each setting of each party.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterministicStrategy {
    assignments: Vec<[i8; SETTINGS]>,
    alphabet: Alphabet,
}

impl Serialize for DeterministicStrategy {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.assignments.serialize(s)
    }
}

/// 3-bit code of a ±1 triple: setting 1 is the most significant bit and
/// `+1` is the set bit, so integer order is lexicographic order with `-1 < +1`.
fn triple_from_code(code: u64) -> [i8; SETTINGS] {
    let bit = |shift: u64| if code >> shift & 1 == 1 { 1 } else { -1 };
    [bit(2), bit(1), bit(0)]
}

fn code_from_triple(t: &[i8; SETTINGS]) -> u64 {
    t.iter().fold(0, |acc, &v| acc << 1 | u64::from(v == 1))
}

impl DeterministicStrategy {
    pub fn new(assignments: Vec<[i8; SETTINGS]>, alphabet: Alphabet) -> Result<Self> {
        if assignments.is_empty() {
            return Err(invalid("strategy needs at least one party"));
        }
        if let Some(v) = assignments.iter().flatten().find(|v| !alphabet.admits(**v)) {
            return Err(invalid(format!("outcome {v} not allowed in {alphabet:?} alphabet")));
        }
        Ok(DeterministicStrategy { assignments, alphabet })
    }

    pub fn two_outcome(assignments: Vec<[i8; SETTINGS]>) -> Result<Self> {
        Self::new(assignments, Alphabet::TwoOutcome)
    }

    pub fn three_outcome(assignments: Vec<[i8; SETTINGS]>) -> Result<Self> {
        Self::new(assignments, Alphabet::ThreeOutcome)
    }

    /// The two-outcome strategy with enumeration index `index` (party-major,
    /// setting-minor, `-1 < +1`).
    pub fn from_index(n_parties: usize, index: u64) -> Self {
        let assignments = (0..n_parties)
            .map(|k| triple_from_code(index >> (3 * (n_parties - 1 - k)) & 7))
            .collect();
        DeterministicStrategy { assignments, alphabet: Alphabet::TwoOutcome }
    }

    /// Enumeration index, for two-outcome strategies of at most 21 parties.
    pub fn index(&self) -> Option<u64> {
        (self.alphabet == Alphabet::TwoOutcome && self.assignments.len() <= 21)
            .then(|| self.assignments.iter().fold(0, |acc, t| acc << 3 | code_from_triple(t)))
    }

    pub fn n_parties(&self) -> usize {
        self.assignments.len()
    }

    pub fn assignments(&self) -> &[[i8; SETTINGS]] {
        &self.assignments
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn require_two_outcome(&self) -> Result<()> {
        match self.alphabet {
            Alphabet::TwoOutcome => Ok(()),
            Alphabet::ThreeOutcome => {
                Err(invalid("three-outcome strategy; remap it with map_f first"))
            }
        }
    }
}

/// `2^(n-1)·√3`.
pub fn lhv_bound(n: usize) -> f64 {
    2f64.powi(n as i32) * HALF_SQRT3
}

/// Ratio of `(Q,Q) = 3^n/2` to the local bound, `(3/2)^n / √3`.
pub fn violation_factor(n: usize) -> f64 {
    1.5f64.powi(n as i32) / 3f64.sqrt()
}

/// Correlation tensor of a deterministic strategy: `H_{i_1..i_N} = ∏_k v^k_{i_k}`.
pub fn hv_tensor(strategy: &DeterministicStrategy, grid: &SettingsGrid) -> Result<CorrelationTensor> {
    let n = grid.n_parties();
    if strategy.n_parties() != n {
        return Err(Error::ShapeMismatch { expected: n, found: strategy.n_parties() });
    }
    let mut entries = vec![1.0f64];
    for triple in strategy.assignments() {
        entries = entries
            .iter()
            .flat_map(|&e| triple.iter().map(move |&v| e * f64::from(v)))
            .collect();
    }
    CorrelationTensor::from_entries(n, entries)
}

/// Contracts the slowest index of `src` against `weights`.
fn contract_leading(src: &[f64], weights: [f64; SETTINGS], dst: &mut Vec<f64>) {
    let m = src.len() / SETTINGS;
    dst.clear();
    dst.extend((0..m).map(|j| weights[0] * src[j] + weights[1] * src[m + j] + weights[2] * src[2 * m + j]));
}

fn weights(t: &[i8; SETTINGS]) -> [f64; SETTINGS] {
    t.map(f64::from)
}

/// `S_λ = (Q, H_λ)` for a two-outcome strategy.
pub fn s_lambda(strategy: &DeterministicStrategy, q: &CorrelationTensor) -> Result<f64> {
    strategy.require_two_outcome()?;
    if strategy.n_parties() != q.n_parties() {
        return Err(Error::ShapeMismatch { expected: q.n_parties(), found: strategy.n_parties() });
    }
    let mut cur = q.entries().to_vec();
    let mut next = Vec::with_capacity(cur.len() / SETTINGS);
    for t in strategy.assignments() {
        contract_leading(&cur, weights(t), &mut next);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur[0])
}

/// Sum of a party's signed unit phasors, `Σ_i v_i e^{iφ_i}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartyPhasor {
    Zero,
    /// `2·e^{i·phase_class·π/6}`.
    Radius2 { phase_class: u8 },
}

impl PartyPhasor {
    pub fn magnitude(&self) -> f64 {
        match self {
            PartyPhasor::Zero => 0.0,
            PartyPhasor::Radius2 { .. } => 2.0,
        }
    }

    pub fn phase_class(&self) -> Option<u8> {
        match *self {
            PartyPhasor::Zero => None,
            PartyPhasor::Radius2 { phase_class } => Some(phase_class),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match *self {
            PartyPhasor::Zero => Complex64::new(0.0, 0.0),
            PartyPhasor::Radius2 { phase_class } => {
                let c = i64::from(phase_class);
                Complex64::new(2.0 * cos_sixths(c), 2.0 * cos_sixths(3 - c))
            }
        }
    }
}

/// `2·e^{ikπ/6}` as `(re_int, re_sqrt3, im_int, im_sqrt3)`, meaning
/// `(re_int + re_sqrt3·√3) + i(im_int + im_sqrt3·√3)`.
fn doubled_unit(class: i64) -> [i64; 4] {
    // 2cos(kπ/6) for k = 0..12 as (integer part, coefficient of √3).
    const TWO_COS: [(i64, i64); 12] = [
        (2, 0), (0, 1), (1, 0), (0, 0), (-1, 0), (0, -1),
        (-2, 0), (0, -1), (-1, 0), (0, 0), (1, 0), (0, 1),
    ];
    let (ra, rb) = TWO_COS[class.rem_euclid(12) as usize];
    let (ia, ib) = TWO_COS[(3 - class).rem_euclid(12) as usize];
    [ra, rb, ia, ib]
}

/// Exact party phasor of a ±1 triple at party `party` (0-based).
pub fn party_phasor(assignment: [i8; SETTINGS], party: usize, grid: &SettingsGrid) -> Result<PartyPhasor> {
    if party >= grid.n_parties() {
        return Err(invalid(format!("party {party} out of range for {} parties", grid.n_parties())));
    }
    if let Some(v) = assignment.iter().find(|v| v.abs() != 1) {
        return Err(invalid(format!("outcome {v} is not ±1")));
    }
    // Accumulates 2·z exactly.
    let mut twice = [0i64; 4];
    for (i, &v) in assignment.iter().enumerate() {
        let u = doubled_unit(i64::from(grid.class(party, i)));
        for (acc, x) in twice.iter_mut().zip(u) {
            *acc += i64::from(v) * x;
        }
    }
    if twice == [0; 4] {
        return Ok(PartyPhasor::Zero);
    }
    (0..12)
        .find(|&c| doubled_unit(c).map(|x| 2 * x) == twice)
        .map(|c| PartyPhasor::Radius2 { phase_class: c as u8 })
        .ok_or_else(|| Error::Internal(format!("phasor {twice:?} has no π/6 phase class")))
}

/// `Re ∏_k z_k` evaluated from exact phase classes.
pub fn s_lambda_factorized(strategy: &DeterministicStrategy, grid: &SettingsGrid) -> Result<f64> {
    strategy.require_two_outcome()?;
    if strategy.n_parties() != grid.n_parties() {
        return Err(Error::ShapeMismatch { expected: grid.n_parties(), found: strategy.n_parties() });
    }
    let mut class = 0i64;
    for (k, t) in strategy.assignments().iter().enumerate() {
        match party_phasor(*t, k, grid)? {
            PartyPhasor::Zero => return Ok(0.0),
            PartyPhasor::Radius2 { phase_class } => class += i64::from(phase_class),
        }
    }
    Ok(2f64.powi(strategy.n_parties() as i32) * cos_sixths(class))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceMax {
    pub n: usize,
    pub max_s: f64,
    pub min_s: f64,
    /// Lexicographically smallest strategy within [`TIE_TOLERANCE`] of `max_s`.
    pub argmax: DeterministicStrategy,
    pub maximizer_count: u64,
}

/// Walks every strategy whose first two parties are fixed by `prefix`
/// (a 6-bit code), calling `visit(index, S_λ)` in increasing index order.
fn enumerate_prefix(q: &[f64], n: usize, prefix: u64, visit: &mut impl FnMut(u64, f64)) {
    let mut first = Vec::with_capacity(q.len() / 3);
    contract_leading(q, weights(&triple_from_code(prefix >> 3)), &mut first);
    let mut second = Vec::with_capacity(first.len() / 3);
    contract_leading(&first, weights(&triple_from_code(prefix & 7)), &mut second);
    descend(&second, n - 2, prefix, visit);
}

fn descend(partial: &[f64], remaining: usize, index: u64, visit: &mut impl FnMut(u64, f64)) {
    match remaining {
        0 => visit(index, partial[0]),
        1 => {
            for code in 0..8 {
                let w = weights(&triple_from_code(code));
                visit(index << 3 | code, w[0] * partial[0] + w[1] * partial[1] + w[2] * partial[2]);
            }
        }
        _ => {
            let mut next = Vec::with_capacity(partial.len() / 3);
            for code in 0..8 {
                contract_leading(partial, weights(&triple_from_code(code)), &mut next);
                descend(&next, remaining - 1, index << 3 | code, visit);
            }
        }
    }
}

/// Exhaustive maximum of `S_λ` over all `8^n` two-outcome strategies.
pub fn max_s_brute(n: usize, exec: Exec) -> Result<BruteForceMax> {
    if !(2..=BRUTE_MAX_PARTIES).contains(&n) {
        return Err(invalid(format!(
            "exhaustive search needs 2 <= n <= {BRUTE_MAX_PARTIES}, got {n}; use max_s_factorized"
        )));
    }
    let q = build_q_tensor(&build_settings(n)?);
    let q = q.entries();
    let prefixes = 0..64u64;

    let (max_s, min_s) = fold_range(
        exec,
        prefixes.clone(),
        || (f64::NEG_INFINITY, f64::INFINITY),
        |(hi, lo), p| {
            let (mut hi, mut lo) = (hi, lo);
            enumerate_prefix(q, n, p, &mut |_, s| {
                hi = hi.max(s);
                lo = lo.min(s);
            });
            (hi, lo)
        },
        |a, b| (a.0.max(b.0), a.1.min(b.1)),
    );

    let (first, count) = fold_range(
        exec,
        prefixes,
        || (u64::MAX, 0u64),
        |(first, count), p| {
            let (mut first, mut count) = (first, count);
            enumerate_prefix(q, n, p, &mut |idx, s| {
                if s >= max_s - TIE_TOLERANCE {
                    first = first.min(idx);
                    count += 1;
                }
            });
            (first, count)
        },
        |a, b| (a.0.min(b.0), a.1 + b.1),
    );

    Ok(BruteForceMax {
        n,
        max_s,
        min_s,
        argmax: DeterministicStrategy::from_index(n, first),
        maximizer_count: count,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorizedMax {
    pub n: usize,
    /// Overflows to `inf` past about 1023 parties; see `log2_max_s`.
    pub max_s: f64,
    pub log2_max_s: f64,
    /// Phase class (multiple of π/6) of the maximizing product.
    pub phase_class: u8,
    pub argmax: DeterministicStrategy,
}

/// Nonzero phasors a party can realize, with the smallest triple for each class.
fn realizable_classes(party: usize, grid: &SettingsGrid) -> Result<Vec<(u8, [i8; SETTINGS])>> {
    let mut out: Vec<(u8, [i8; SETTINGS])> = Vec::new();
    for code in 0..8 {
        let t = triple_from_code(code);
        if let PartyPhasor::Radius2 { phase_class } = party_phasor(t, party, grid)? {
            if !out.iter().any(|(c, _)| *c == phase_class) {
                out.push((phase_class, t));
            }
        }
    }
    Ok(out)
}

/// Maximum of `Re ∏ z_k` by dynamic programming over phase classes.
pub fn max_s_factorized(n: usize) -> Result<FactorizedMax> {
    if n < 2 {
        return Err(invalid(format!("need at least 2 parties, got {n}")));
    }
    // Only party 1 differs; a two-party grid carries both phasor sets.
    let grid = build_settings(2)?;
    let first = realizable_classes(0, &grid)?;
    let rest = realizable_classes(1, &grid)?;

    // back[k][c] = (class before party k, triple of party k) reaching class c.
    type Layer = [Option<(u8, [i8; SETTINGS])>; 12];
    let mut back: Vec<Layer> = Vec::with_capacity(n);
    let mut layer = [None; 12];
    for &(c, t) in &first {
        layer[c as usize].get_or_insert((0, t));
    }
    back.push(layer);
    for _ in 1..n {
        let prev = back.last().unwrap();
        let mut layer = [None; 12];
        for (pc, _) in prev.iter().enumerate().filter(|(_, e)| e.is_some()) {
            for &(c, t) in &rest {
                layer[(pc + c as usize) % 12].get_or_insert((pc as u8, t));
            }
        }
        back.push(layer);
    }

    let last = back.last().unwrap();
    let best = (0..12u8)
        .filter(|&c| last[c as usize].is_some())
        .fold(None, |best: Option<u8>, c| match best {
            Some(b) if cos_sixths(i64::from(b)) >= cos_sixths(i64::from(c)) => Some(b),
            _ => Some(c),
        })
        .ok_or_else(|| Error::Internal("no reachable phase class".into()))?;
    let cos_best = cos_sixths(i64::from(best));
    if cos_best <= 0.0 {
        return Err(Error::Internal("best reachable product is not positive".into()));
    }

    let mut assignments = vec![[0i8; SETTINGS]; n];
    let mut class = best;
    for k in (0..n).rev() {
        let (prev, t) = back[k][class as usize].expect("reachable class has a predecessor");
        assignments[k] = t;
        class = prev;
    }

    Ok(FactorizedMax {
        n,
        max_s: 2f64.powi(n as i32) * cos_best,
        log2_max_s: n as f64 + cos_best.log2(),
        phase_class: best,
        argmax: DeterministicStrategy::two_outcome(assignments)?,
    })
}

/// Outcome remapping `f(±1) = ±1`, `f(0) = -1`.
pub fn f_map(m: i8) -> i8 {
    if m == 0 {
        -1
    } else {
        m
    }
}

/// Remaps every outcome of a strategy through [`f_map`].
pub fn map_f(strategy: &DeterministicStrategy) -> DeterministicStrategy {
    DeterministicStrategy {
        assignments: strategy.assignments.iter().map(|t| t.map(f_map)).collect(),
        alphabet: Alphabet::TwoOutcome,
    }
}
