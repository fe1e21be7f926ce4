//! Ray selection and baseband combining.
//!
//! A selection set `Ω` routes `|Ω| ≤ N_RF` of the `N` ports to RF chains; it is
//! the index form of the 0/1 switch matrix `S`. Single-user links use maximum
//! ratio combining, for which the best set is simply the strongest ports.
//! Multi-user links use per-user MMSE combining and pick `Ω` either greedily
//! (one ray per step) or by exhaustive enumeration.
//!
//! Sum rates are evaluated through `R = S(Σ_i h_i h_iᴴ + (M/P̄t)·I)Sᴴ`. With
//! `q_k = (S h_k)ᴴ R⁻¹ (S h_k)` the matrix inversion lemma gives
//! `1 + SINR_k = 1 / (1 - q_k)` for the MMSE combiner, so one Cholesky factor
//! serves every user. [`mmse_beamformer`] and [`sinr`] build `C_k` explicitly
//! instead and act as the independent route.

use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{RaaError, Result};
use crate::linalg::RowCholesky;

/// Default cap on the number of subsets exhaustive search may enumerate.
pub const DEFAULT_EXHAUSTIVE_CAP: u128 = 1_000_000;

/// Ordered set of selected ports. Entry `i` is the port wired to RF chain `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionSet {
    indices: Vec<usize>,
    capacity: usize,
    total: usize,
}

impl SelectionSet {
    pub fn new(indices: Vec<usize>, capacity: usize, total: usize) -> Result<Self> {
        if capacity == 0 {
            return Err(RaaError::InvalidArgument(
                "RF chain count must be positive".into(),
            ));
        }
        if indices.len() > capacity {
            return Err(RaaError::ConstraintViolation(format!(
                "{} ports selected for {capacity} RF chains",
                indices.len()
            )));
        }
        let mut seen = vec![false; total];
        for &i in &indices {
            if i >= total {
                return Err(RaaError::IndexOutOfRange {
                    index: i,
                    len: total,
                });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(RaaError::ConstraintViolation(format!(
                    "port {i} selected twice"
                )));
            }
        }
        Ok(Self {
            indices,
            capacity,
            total,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn sorted_indices(&self) -> Vec<usize> {
        let mut v = self.indices.clone();
        v.sort_unstable();
        v
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// The `|Ω| × N` switch matrix: row `i` has a single one at column `Ω_i`.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.indices
            .iter()
            .map(|&col| {
                let mut row = vec![0.0; self.total];
                row[col] = 1.0;
                row
            })
            .collect()
    }

    /// `S·h`.
    pub fn apply(&self, h: &[Complex64]) -> Vec<Complex64> {
        self.indices.iter().map(|&i| h[i]).collect()
    }

    fn check_against(&self, h: &[Complex64]) -> Result<()> {
        if h.len() != self.total {
            return Err(RaaError::InvalidArgument(format!(
                "channel has {} ports, selection expects {}",
                h.len(),
                self.total
            )));
        }
        Ok(())
    }
}

impl fmt::Display for SelectionSet {
    /// Ports joined with `;`, in RF chain order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(";"))
    }
}

/// Transmit SNR `P̄t = P_t / σ²` and the element count that scales the
/// post-combining noise to `M·σ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    transmit_snr: f64,
    elements_per_port: usize,
}

impl LinkBudget {
    pub fn new(transmit_snr: f64, elements_per_port: usize) -> Result<Self> {
        if !(transmit_snr > 0.0 && transmit_snr.is_finite()) {
            return Err(RaaError::InvalidArgument(format!(
                "transmit SNR must be positive and finite, got {transmit_snr}"
            )));
        }
        if elements_per_port == 0 {
            return Err(RaaError::InvalidArgument(
                "element count must be positive".into(),
            ));
        }
        Ok(Self {
            transmit_snr,
            elements_per_port,
        })
    }

    pub fn from_db(transmit_snr_db: f64, elements_per_port: usize) -> Result<Self> {
        Self::new(10f64.powf(transmit_snr_db / 10.0), elements_per_port)
    }

    pub fn transmit_snr(&self) -> f64 {
        self.transmit_snr
    }

    pub fn elements_per_port(&self) -> usize {
        self.elements_per_port
    }

    /// Diagonal loading `M / P̄t` of the interference-plus-noise covariance.
    pub fn noise_loading(&self) -> f64 {
        self.elements_per_port as f64 / self.transmit_snr
    }
}

/// Single-user SNR with MRC on the selected ports: `P̄t·‖S h‖² / M`.
pub fn snr_single_user(
    h: &[Complex64],
    selection: &SelectionSet,
    budget: &LinkBudget,
) -> Result<f64> {
    if selection.is_empty() {
        return Err(RaaError::EmptySelection);
    }
    selection.check_against(h)?;
    let energy: f64 = selection.indices().iter().map(|&i| h[i].norm_sqr()).sum();
    Ok(budget.transmit_snr() * energy / budget.elements_per_port() as f64)
}

/// The `n_rf` strongest ports, returned in ascending port order. Ties go to
/// the lower index.
pub fn select_rays_single_user(h: &[Complex64], n_rf: usize) -> Result<SelectionSet> {
    check_rf_count(n_rf, h.len())?;
    let mut order: Vec<usize> = (0..h.len()).collect();
    order.sort_by(|&a, &b| {
        h[b].norm_sqr()
            .partial_cmp(&h[a].norm_sqr())
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order.truncate(n_rf);
    order.sort_unstable();
    SelectionSet::new(order, n_rf, h.len())
}

fn check_rf_count(n_rf: usize, ports: usize) -> Result<()> {
    if n_rf == 0 || n_rf > ports {
        return Err(RaaError::InvalidArgument(format!(
            "RF chain count {n_rf} must lie in 1..={ports}"
        )));
    }
    Ok(())
}

fn check_channels(channels: &[Vec<Complex64>]) -> Result<usize> {
    let ports = channels
        .first()
        .map(Vec::len)
        .ok_or_else(|| RaaError::InvalidArgument("no user channels".into()))?;
    if ports == 0 || channels.iter().any(|h| h.len() != ports) {
        return Err(RaaError::InvalidArgument(
            "user channels must be non-empty and of equal length".into(),
        ));
    }
    Ok(ports)
}

/// MMSE combiner of user `k`: `f_k = C_k⁻¹ S h_k` with
/// `C_k = S(Σ_{i≠k} h_i h_iᴴ + (M/P̄t)·I)Sᴴ`.
pub fn mmse_beamformer(
    channels: &[Vec<Complex64>],
    selection: &SelectionSet,
    budget: &LinkBudget,
    k: usize,
) -> Result<Vec<Complex64>> {
    check_channels(channels)?;
    if k >= channels.len() {
        return Err(RaaError::IndexOutOfRange {
            index: k,
            len: channels.len(),
        });
    }
    if selection.is_empty() {
        return Err(RaaError::EmptySelection);
    }
    selection.check_against(&channels[0])?;
    let idx = selection.indices();
    let loading = budget.noise_loading();
    let cov: Vec<Vec<Complex64>> = idx
        .iter()
        .enumerate()
        .map(|(a, &pa)| {
            idx.iter()
                .enumerate()
                .map(|(b, &pb)| {
                    let mut v: Complex64 = channels
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != k)
                        .map(|(_, h)| h[pa] * h[pb].conj())
                        .sum();
                    if a == b {
                        v += loading;
                    }
                    v
                })
                .collect()
        })
        .collect();
    let chol = RowCholesky::factor(&cov)?;
    Ok(chol.solve(&selection.apply(&channels[k])))
}

/// SINR of user `k` under combiner `f`.
pub fn sinr(
    f: &[Complex64],
    k: usize,
    channels: &[Vec<Complex64>],
    selection: &SelectionSet,
    budget: &LinkBudget,
) -> Result<f64> {
    check_channels(channels)?;
    if k >= channels.len() {
        return Err(RaaError::IndexOutOfRange {
            index: k,
            len: channels.len(),
        });
    }
    if f.len() != selection.len() {
        return Err(RaaError::InvalidArgument(format!(
            "combiner has {} taps for {} selected ports",
            f.len(),
            selection.len()
        )));
    }
    selection.check_against(&channels[0])?;
    let f_norm: f64 = f.iter().map(|v| v.norm_sqr()).sum();
    if f_norm == 0.0 {
        return Err(RaaError::ZeroBeamformer);
    }
    let project = |h: &[Complex64]| -> f64 {
        selection
            .indices()
            .iter()
            .zip(f)
            .map(|(&p, fi)| fi.conj() * h[p])
            .sum::<Complex64>()
            .norm_sqr()
    };
    let pt = budget.transmit_snr();
    let signal = pt * project(&channels[k]);
    let interference: f64 = channels
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, h)| project(h))
        .sum();
    Ok(signal / (pt * interference + budget.elements_per_port() as f64 * f_norm))
}

/// `log2(1 + SINR_k)` from `q_k = (S h_k)ᴴ R⁻¹ (S h_k)`.
fn rate_term(q: f64) -> f64 {
    -(-q).ln_1p() / LN_2
}

/// Shared state for evaluating many sum rates on one channel realization.
struct SumRateContext<'a> {
    channels: &'a [Vec<Complex64>],
    ports: usize,
    /// `Σ_i h_i h_iᴴ + (M/P̄t)·I` over all ports, row-major.
    gram: Vec<Complex64>,
}

impl<'a> SumRateContext<'a> {
    fn new(channels: &'a [Vec<Complex64>], budget: &LinkBudget) -> Result<Self> {
        let ports = check_channels(channels)?;
        let loading = budget.noise_loading();
        let mut gram = vec![Complex64::new(0.0, 0.0); ports * ports];
        for a in 0..ports {
            for b in 0..ports {
                let mut v: Complex64 = channels.iter().map(|h| h[a] * h[b].conj()).sum();
                if a == b {
                    v += loading;
                }
                gram[a * ports + b] = v;
            }
        }
        Ok(Self {
            channels,
            ports,
            gram,
        })
    }

    fn users(&self) -> usize {
        self.channels.len()
    }
}

/// Factor and per-user forward solves for a growing prefix of ports.
struct PrefixState {
    chol: RowCholesky,
    ports: Vec<usize>,
    /// `y[k * cap + p]`: forward-solve entry `p` of user `k`.
    y: Vec<Complex64>,
    /// `q[p * users + k]`: running `‖y_k‖²` after `p + 1` rows.
    q: Vec<f64>,
    cap: usize,
}

impl PrefixState {
    fn new(cap: usize, users: usize) -> Self {
        Self {
            chol: RowCholesky::with_capacity(cap),
            ports: Vec::with_capacity(cap),
            y: vec![Complex64::new(0.0, 0.0); users * cap],
            q: vec![0.0; users * cap],
            cap,
        }
    }

    fn truncate(&mut self, depth: usize) {
        self.chol.truncate(depth);
        self.ports.truncate(depth);
    }

    fn push(&mut self, ctx: &SumRateContext<'_>, port: usize) -> Result<()> {
        let p = self.ports.len();
        let row = port * ctx.ports;
        let ports = &self.ports;
        self.chol.push_row(|c| {
            if c == p {
                ctx.gram[row + port]
            } else {
                ctx.gram[row + ports[c]]
            }
        })?;
        self.ports.push(port);
        let users = ctx.users();
        for (k, h) in ctx.channels.iter().enumerate() {
            let base = k * self.cap;
            let yp = self.chol.forward_step(&self.y[base..base + p], h[port]);
            self.y[base + p] = yp;
            let prev = if p == 0 {
                0.0
            } else {
                self.q[(p - 1) * users + k]
            };
            self.q[p * users + k] = prev + yp.norm_sqr();
        }
        Ok(())
    }

    fn rate(&self, users: usize) -> f64 {
        match self.ports.len() {
            0 => 0.0,
            d => self.q[(d - 1) * users..d * users]
                .iter()
                .map(|&q| rate_term(q))
                .sum(),
        }
    }
}

impl SumRateContext<'_> {
    /// Sum rate of a set of ports. The ports are factored in ascending order so
    /// that every route to the same set performs identical arithmetic.
    fn evaluate(&self, ports: &[usize], state: &mut PrefixState) -> Result<f64> {
        let mut sorted = ports.to_vec();
        sorted.sort_unstable();
        state.truncate(0);
        for &p in &sorted {
            state.push(self, p)?;
        }
        Ok(state.rate(self.users()))
    }
}

/// Maximum sum rate `Σ_k log2(1 + (S h_k)ᴴ C_k⁻¹ (S h_k))` for a selection.
pub fn sum_rate(
    selection: &SelectionSet,
    channels: &[Vec<Complex64>],
    budget: &LinkBudget,
) -> Result<f64> {
    if selection.is_empty() {
        return Err(RaaError::EmptySelection);
    }
    let ctx = SumRateContext::new(channels, budget)?;
    selection.check_against(&channels[0])?;
    let mut state = PrefixState::new(selection.len(), ctx.users());
    ctx.evaluate(selection.indices(), &mut state)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    /// Ports in the order they were picked.
    pub selection: SelectionSet,
    /// Sum rate after each step.
    pub step_rates: Vec<f64>,
    /// Number of sum-rate evaluations performed.
    pub evaluations: usize,
}

impl GreedyOutcome {
    pub fn rate(&self) -> f64 {
        self.step_rates.last().copied().unwrap_or(0.0)
    }
}

/// Greedy ray selection: each step adds the port that maximizes the sum rate
/// of the enlarged set. Costs `N + (N-1) + … + (N-N_RF+1)` evaluations.
pub fn greedy_selection(
    channels: &[Vec<Complex64>],
    n_rf: usize,
    budget: &LinkBudget,
) -> Result<GreedyOutcome> {
    let ctx = SumRateContext::new(channels, budget)?;
    check_rf_count(n_rf, ctx.ports)?;
    let mut state = PrefixState::new(n_rf, ctx.users());
    let mut chosen: Vec<usize> = Vec::with_capacity(n_rf);
    let mut remaining: Vec<usize> = (0..ctx.ports).collect();
    let mut step_rates = Vec::with_capacity(n_rf);
    let mut evaluations = 0;
    let mut candidate = Vec::with_capacity(n_rf);
    for _ in 0..n_rf {
        let mut best: Option<(usize, f64)> = None;
        for (slot, &port) in remaining.iter().enumerate() {
            candidate.clear();
            candidate.extend_from_slice(&chosen);
            candidate.push(port);
            let rate = ctx.evaluate(&candidate, &mut state)?;
            evaluations += 1;
            if best.is_none_or(|(_, r)| rate > r) {
                best = Some((slot, rate));
            }
        }
        let (slot, rate) = best.expect("remaining ports are never empty here");
        chosen.push(remaining.remove(slot));
        step_rates.push(rate);
    }
    Ok(GreedyOutcome {
        selection: SelectionSet::new(chosen, n_rf, ctx.ports)?,
        step_rates,
        evaluations,
    })
}

/// `n choose k`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveOutcome {
    /// Best set in ascending port order.
    pub selection: SelectionSet,
    pub rate: f64,
    pub candidates: u128,
}

/// Globally optimal selection by enumerating every `n_rf`-subset in
/// lexicographic order. Ties keep the lexicographically first subset.
pub fn exhaustive_selection(
    channels: &[Vec<Complex64>],
    n_rf: usize,
    budget: &LinkBudget,
    cap: u128,
) -> Result<ExhaustiveOutcome> {
    let ctx = SumRateContext::new(channels, budget)?;
    check_rf_count(n_rf, ctx.ports)?;
    let candidates = binomial(ctx.ports, n_rf);
    if candidates > cap {
        return Err(RaaError::CapExceeded { candidates, cap });
    }
    let mut search = Exhaustive {
        ctx: &ctx,
        n_rf,
        state: PrefixState::new(n_rf, ctx.users()),
        best_rate: f64::NEG_INFINITY,
        best: Vec::new(),
    };
    search.descend(0)?;
    let Exhaustive {
        best, best_rate, ..
    } = search;
    Ok(ExhaustiveOutcome {
        selection: SelectionSet::new(best, n_rf, ctx.ports)?,
        rate: best_rate,
        candidates,
    })
}

struct Exhaustive<'a, 'c> {
    ctx: &'a SumRateContext<'c>,
    n_rf: usize,
    state: PrefixState,
    best_rate: f64,
    best: Vec<usize>,
}

impl Exhaustive<'_, '_> {
    fn descend(&mut self, start: usize) -> Result<()> {
        let depth = self.state.ports.len();
        let last = self.ctx.ports - (self.n_rf - depth);
        for port in start..=last {
            self.state.truncate(depth);
            self.state.push(self.ctx, port)?;
            if depth + 1 == self.n_rf {
                let rate = self.state.rate(self.ctx.users());
                if rate > self.best_rate {
                    self.best_rate = rate;
                    self.best.clone_from(&self.state.ports);
                }
            } else {
                self.descend(port + 1)?;
            }
        }
        self.state.truncate(depth);
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectionMethod {
    Greedy,
    Exhaustive,
    TopMagnitude,
}

impl SelectionMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectionMethod::Greedy => "greedy",
            SelectionMethod::Exhaustive => "exhaustive",
            SelectionMethod::TopMagnitude => "top_magnitude",
        }
    }
}

impl fmt::Display for SelectionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SelectionMethod {
    type Err = RaaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "greedy" => Ok(SelectionMethod::Greedy),
            "exhaustive" => Ok(SelectionMethod::Exhaustive),
            "top_magnitude" => Ok(SelectionMethod::TopMagnitude),
            other => Err(RaaError::Config(format!(
                "unknown selection method `{other}`"
            ))),
        }
    }
}

pub const SELECTION_CSV_HEADER: &str = "trial,method,indices,rate,evaluations";

/// One selection result for reproducibility dumps.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRecord {
    pub trial: usize,
    pub method: SelectionMethod,
    pub selection: SelectionSet,
    pub rate: f64,
    pub evaluations: u128,
}

impl SelectionRecord {
    pub fn write_csv_row(&self, out: &mut String, prefix: &str) {
        let _ = writeln!(
            out,
            "{prefix}{},{},{},{},{}",
            self.trial, self.method, self.selection, self.rate, self.evaluations
        );
    }
}
