//! Brute-force path sum over all `2^t` coin histories.
//!
//! A history `(j_1, …, j_t)` contributes
//! `e^{i(J̄α + Jβ)} · B_{j_t j_{t−1}} ⋯ B_{j_2 j_1} · (B_{j_1 0} a + B_{j_1 1} b)`
//! to `|j_t⟩|x₀ + 2J − t⟩`, where `J = Σ j_i` and `J̄ = t − J`. This shares
//! no code with the step-by-step evolution and serves as its oracle.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::{build_coin, CoinParams, PhaseGateParams};
use crate::state::{InitialStateParams, PureState, Topology};

/// Largest `t` the enumeration accepts.
pub const MAX_PATH_STEPS: usize = 20;

/// One coin history and its contribution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathTerm {
    /// Bit `i − 1` holds `j_i`.
    pub history: u32,
    pub steps: usize,
    /// `J_t`, the number of ones in the history.
    pub ones: usize,
    pub amplitude: Complex64,
    pub final_coin: usize,
    /// Position label `x₀ + 2J − t`, reduced mod `n` on a cycle.
    pub final_position: i64,
}

impl PathTerm {
    /// `J̄_t = t − J_t`.
    pub fn zeros(&self) -> usize {
        self.steps - self.ones
    }
}

fn check_bound(t: usize) -> Result<()> {
    if t > MAX_PATH_STEPS {
        return Err(Error::Capacity(format!(
            "path enumeration is limited to t <= {MAX_PATH_STEPS}, got {t}"
        )));
    }
    Ok(())
}

fn final_label(topology: Topology, start: i64, t: usize, ones: usize) -> Result<i64> {
    let x = start + 2 * ones as i64 - t as i64;
    let site = topology.position_index(x)?;
    Ok(topology.position_label(site))
}

/// Visits every history of length `t ≥ 1` in increasing `history` order.
pub fn for_each_path(
    t: usize,
    coin: &CoinParams,
    gate: Option<&PhaseGateParams>,
    initial: &InitialStateParams,
    topology: Topology,
    mut visit: impl FnMut(&PathTerm),
) -> Result<()> {
    check_bound(t)?;
    if t == 0 {
        return Err(Error::Parameter("paths need at least one step".into()));
    }
    let b = build_coin(coin).0;
    let (a0, a1) = initial.coin_amplitudes();
    let (alpha, beta) = gate.map_or((0.0, 0.0), |g| (g.alpha.to_radians(), g.beta.to_radians()));
    for history in 0u32..(1u32 << t) {
        let bit = |i: usize| ((history >> (i - 1)) & 1) as usize;
        let j1 = bit(1);
        let mut amp = b[j1][0] * a0 + b[j1][1] * a1;
        for i in 2..=t {
            amp *= b[bit(i)][bit(i - 1)];
        }
        let ones = history.count_ones() as usize;
        let zeros = t - ones;
        amp *= Complex64::from_polar(1.0, zeros as f64 * alpha + ones as f64 * beta);
        visit(&PathTerm {
            history,
            steps: t,
            ones,
            amplitude: amp,
            final_coin: bit(t),
            final_position: final_label(topology, initial.start_position, t, ones)?,
        });
    }
    Ok(())
}

/// `(GUB)^t |ψ₀⟩` assembled from the path sum.
pub fn path_sum_state(
    t: usize,
    coin: &CoinParams,
    gate: Option<&PhaseGateParams>,
    initial: &InitialStateParams,
    topology: Topology,
) -> Result<PureState> {
    check_bound(t)?;
    initial.validate()?;
    let n = topology.sites();
    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * n];
    if t == 0 {
        let site = topology.position_index(initial.start_position)?;
        let (a, b) = initial.coin_amplitudes();
        amps[site] = a;
        amps[n + site] = b;
    } else {
        let mut failure = None;
        for_each_path(t, coin, gate, initial, topology, |term| {
            match topology.position_index(term.final_position) {
                Ok(site) => amps[term.final_coin * n + site] += term.amplitude,
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
    }
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NumericalIntegrity {
            step: t,
            detail: format!("path sum norm² is {norm}"),
        });
    }
    Ok(PureState::from_raw(topology, amps))
}

/// Histories landing on one position, grouped by `J_t` and by phase factor.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionAudit {
    pub position: i64,
    pub paths: usize,
    pub ones_values: BTreeSet<usize>,
    /// Distinct phase factors `e^{i(J̄α + Jβ)}` (equal within 1e−12 merged).
    pub phase_factors: Vec<Complex64>,
}

/// Per-position grouping of all `2^t` histories.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseAudit {
    pub steps: usize,
    pub topology: Topology,
    pub positions: BTreeMap<i64, PositionAudit>,
}

impl PhaseAudit {
    pub fn position(&self, x: i64) -> Option<&PositionAudit> {
        let label = self
            .topology
            .position_index(x)
            .ok()
            .map(|site| self.topology.position_label(site))?;
        self.positions.get(&label)
    }

    /// Largest number of distinct `J_t` values at any position.
    pub fn max_distinct_ones(&self) -> usize {
        self.positions
            .values()
            .map(|p| p.ones_values.len())
            .max()
            .unwrap_or(0)
    }

    pub fn max_distinct_phases(&self) -> usize {
        self.positions
            .values()
            .map(|p| p.phase_factors.len())
            .max()
            .unwrap_or(0)
    }
}

/// Groups every history of length `t` by final position and reports the
/// `J_t` values and phase factors meeting there.
pub fn phase_factor_audit(
    t: usize,
    gate: &PhaseGateParams,
    topology: Topology,
    start_position: i64,
) -> Result<PhaseAudit> {
    check_bound(t)?;
    let (alpha, beta) = (gate.alpha.to_radians(), gate.beta.to_radians());
    let mut positions: BTreeMap<i64, PositionAudit> = BTreeMap::new();
    for history in 0u32..(1u32 << t) {
        let ones = history.count_ones() as usize;
        let x = final_label(topology, start_position, t, ones)?;
        let phase = Complex64::from_polar(1.0, (t - ones) as f64 * alpha + ones as f64 * beta);
        let entry = positions.entry(x).or_insert_with(|| PositionAudit {
            position: x,
            paths: 0,
            ones_values: BTreeSet::new(),
            phase_factors: Vec::new(),
        });
        entry.paths += 1;
        entry.ones_values.insert(ones);
        if !entry
            .phase_factors
            .iter()
            .any(|p| (p - phase).norm() <= 1e-12)
        {
            entry.phase_factors.push(phase);
        }
    }
    Ok(PhaseAudit {
        steps: t,
        topology,
        positions,
    })
}
