//! Multi-step evolution: unitary pure-state runs, Kraus-noisy density-matrix
//! runs, and paired runs with and without the phase gate.

use crate::error::{Error, Result};
use crate::noise::{apply_channel_in_place, gad_kraus, phase_damping_kraus, GadParams, KrausSet};
use crate::observables::{CoherenceProfile, Observable, PositionDistribution};
use crate::operators::{
    build_coin, build_phase_gate, walk_step, CoinParams, PhaseGateParams, WalkState,
};
use crate::state::{
    make_initial_pure, pure_to_density, DensityMatrix, InitialStateParams, PureState, Topology,
};

/// Trace drift that aborts a noisy run.
const TRACE_DRIFT_LIMIT: f64 = 1e-6;

/// Length of a run, either in steps or in turns `τ` with `t = round(τ s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Duration {
    Steps(usize),
    Turns(f64),
}

impl Duration {
    /// Resolves to a step count. Turns need an odd cycle (`n = 2s + 1`);
    /// fractional products round half to even.
    pub fn steps(&self, topology: Topology) -> Result<usize> {
        match *self {
            Duration::Steps(t) => Ok(t),
            Duration::Turns(tau) => {
                let s = topology.half_turn().ok_or_else(|| {
                    Error::InvalidSpec(format!(
                        "turns require a cycle with odd n, got {topology:?}"
                    ))
                })?;
                if !tau.is_finite() || tau < 0.0 {
                    return Err(Error::InvalidSpec(format!(
                        "turns must be non-negative, got {tau}"
                    )));
                }
                Ok((tau * s as f64).round_ties_even() as usize)
            }
        }
    }
}

/// Noise applied to the coin after every unitary step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseModel {
    None,
    Gad(GadParams),
    PhaseDamping { lambda: f64 },
}

impl NoiseModel {
    /// Phase damping whose strength follows the same `λ(Δ)` law as the
    /// amplitude damping channel.
    pub fn phase_damping_from(p: &GadParams) -> Result<Self> {
        p.validate()?;
        Ok(NoiseModel::PhaseDamping { lambda: p.lambda() })
    }

    pub fn is_none(&self) -> bool {
        matches!(self, NoiseModel::None)
    }

    pub fn kraus(&self) -> Result<Option<KrausSet>> {
        match self {
            NoiseModel::None => Ok(None),
            NoiseModel::Gad(p) => gad_kraus(p).map(Some),
            NoiseModel::PhaseDamping { lambda } => phase_damping_kraus(*lambda).map(Some),
        }
    }
}

/// Everything needed to reproduce one walk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSpec {
    pub topology: Topology,
    pub duration: Duration,
    pub coin: CoinParams,
    pub gate: Option<PhaseGateParams>,
    pub initial: InitialStateParams,
    pub noise: NoiseModel,
}

impl RunSpec {
    pub fn steps(&self) -> Result<usize> {
        self.duration.steps(self.topology)
    }

    pub fn without_gate(&self) -> Self {
        RunSpec {
            gate: None,
            ..*self
        }
    }

    pub fn without_noise(&self) -> Self {
        RunSpec {
            noise: NoiseModel::None,
            ..*self
        }
    }
}

/// What to keep while evolving.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RecordOptions {
    /// Record every `stride` steps (plus the final step).
    pub stride: usize,
    /// `(M, s)` to compute the coherence function at recorded steps.
    pub coherence: Option<(usize, usize)>,
    /// Keep full states at recorded steps.
    pub keep_states: bool,
}

impl Default for RecordOptions {
    fn default() -> Self {
        Self {
            stride: 1,
            coherence: None,
            keep_states: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub distribution: PositionDistribution,
    pub coherence: Option<CoherenceProfile>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionRecord<S> {
    pub steps: Vec<StepRecord>,
    /// States at the recorded steps, when requested.
    pub states: Vec<S>,
    pub final_state: S,
}

impl<S> EvolutionRecord<S> {
    pub fn at_step(&self, t: usize) -> Option<&StepRecord> {
        self.steps
            .binary_search_by_key(&t, |r| r.t)
            .ok()
            .map(|i| &self.steps[i])
    }

    fn map_state<T>(self, f: impl Fn(S) -> T) -> EvolutionRecord<T> {
        EvolutionRecord {
            steps: self.steps,
            states: self.states.into_iter().map(&f).collect(),
            final_state: f(self.final_state),
        }
    }
}

/// Either kind of walker state.
#[derive(Clone, Debug, PartialEq)]
pub enum WalkerState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl WalkerState {
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            WalkerState::Pure(psi) => pure_to_density(psi),
            WalkerState::Mixed(rho) => rho.clone(),
        }
    }
}

impl Observable for WalkerState {
    fn position_distribution(&self) -> PositionDistribution {
        match self {
            WalkerState::Pure(s) => s.position_distribution(),
            WalkerState::Mixed(s) => s.position_distribution(),
        }
    }

    fn coherence_function(&self, bins: usize, s: usize) -> Result<CoherenceProfile> {
        match self {
            WalkerState::Pure(st) => st.coherence_function(bins, s),
            WalkerState::Mixed(st) => st.coherence_function(bins, s),
        }
    }
}

fn record<S: Observable + Clone>(
    state: &S,
    t: usize,
    opts: &RecordOptions,
    out: &mut EvolutionRecord<S>,
) -> Result<()> {
    let coherence = match opts.coherence {
        Some((m, s)) => Some(state.coherence_function(m, s)?),
        None => None,
    };
    out.steps.push(StepRecord {
        t,
        distribution: state.position_distribution(),
        coherence,
    });
    if opts.keep_states {
        out.states.push(state.clone());
    }
    Ok(())
}

fn drive<S: WalkState + Observable + Clone>(
    mut state: S,
    spec: &RunSpec,
    opts: &RecordOptions,
    mut after_step: impl FnMut(&mut S, usize) -> Result<()>,
) -> Result<EvolutionRecord<S>> {
    if opts.stride == 0 {
        return Err(Error::InvalidSpec("record stride must be >= 1".into()));
    }
    let steps = spec.steps()?;
    let coin = build_coin(&spec.coin);
    let gate = spec.gate.as_ref().map(build_phase_gate);
    let mut out = EvolutionRecord {
        steps: Vec::new(),
        states: Vec::new(),
        final_state: state.clone(),
    };
    record(&state, 0, opts, &mut out)?;
    for t in 1..=steps {
        walk_step(&mut state, &coin, gate.as_ref(), spec.topology)?;
        after_step(&mut state, t)?;
        if t % opts.stride == 0 || t == steps {
            record(&state, t, opts, &mut out)?;
        }
    }
    out.final_state = state;
    Ok(out)
}

/// `|ψ_t⟩ = W^t |ψ₀⟩` with `W = G·U·B` (or `U·B` without a gate).
pub fn evolve_pure(spec: &RunSpec, opts: &RecordOptions) -> Result<EvolutionRecord<PureState>> {
    if !spec.noise.is_none() {
        return Err(Error::InvalidSpec(
            "pure evolution cannot include noise".into(),
        ));
    }
    let psi0 = make_initial_pure(&spec.initial, spec.topology)?;
    drive(psi0, spec, opts, |_, _| Ok(()))
}

/// `ρ(t) = Σ_j E_j (W ρ(t−1) W†) E_j†`, starting from `|ψ₀⟩⟨ψ₀|`.
pub fn evolve_noisy(
    spec: &RunSpec,
    opts: &RecordOptions,
) -> Result<EvolutionRecord<DensityMatrix>> {
    let channel = spec.noise.kraus()?;
    let rho0 = pure_to_density(&make_initial_pure(&spec.initial, spec.topology)?);
    drive(rho0, spec, opts, |rho, t| {
        if let Some(k) = &channel {
            apply_channel_in_place(rho, k)?;
        }
        let drift = (rho.trace() - 1.0).abs();
        if drift.is_nan() || drift > TRACE_DRIFT_LIMIT {
            return Err(Error::NumericalIntegrity {
                step: t,
                detail: format!("trace drifted by {drift:e}"),
            });
        }
        Ok(())
    })
}

/// Pure evolution when the spec is noiseless, density-matrix evolution
/// otherwise.
pub fn evolve(spec: &RunSpec, opts: &RecordOptions) -> Result<EvolutionRecord<WalkerState>> {
    if spec.noise.is_none() {
        Ok(evolve_pure(spec, opts)?.map_state(WalkerState::Pure))
    } else {
        Ok(evolve_noisy(spec, opts)?.map_state(WalkerState::Mixed))
    }
}

/// Runs the spec without and with its phase gate. The two runs are
/// independent and may execute concurrently.
pub fn paired_run(
    spec: &RunSpec,
    opts: &RecordOptions,
) -> Result<(EvolutionRecord<WalkerState>, EvolutionRecord<WalkerState>)> {
    if spec.gate.is_none() {
        return Err(Error::InvalidSpec("paired run needs a phase gate".into()));
    }
    let plain = spec.without_gate();
    let (without, with) = rayon::join(|| evolve(&plain, opts), || evolve(spec, opts));
    Ok((without?, with?))
}
