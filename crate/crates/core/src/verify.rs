//! Self-check suite behind the `verify` command: oracle equivalence and the
//! core invariants, on seeded random parameters.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::evolution::{evolve_noisy, evolve_pure, Duration, NoiseModel, RecordOptions, RunSpec};
use crate::noise::{gad_kraus, GadParams};
use crate::observables::kolmogorov_distance;
use crate::operators::{CoinParams, PhaseGateParams};
use crate::oracle::{path_sum_state, phase_factor_audit};
use crate::state::{pure_to_density, InitialStateParams, Topology};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, value: f64, limit: f64) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: value <= limit,
        detail: format!("{value:.3e} (limit {limit:.0e})"),
    }
}

/// Uniformly random walk parameters.
pub fn random_walk_params(rng: &mut StdRng) -> (CoinParams, PhaseGateParams, InitialStateParams) {
    let coin = CoinParams::new(
        rng.random_range(0.0..360.0),
        rng.random_range(0.0..360.0),
        rng.random_range(0.0..360.0),
    );
    let gate = PhaseGateParams::new(rng.random_range(0.0..360.0), rng.random_range(0.0..360.0));
    let initial =
        InitialStateParams::new(rng.random_range(0.0..=180.0), rng.random_range(0.0..360.0));
    (coin, gate, initial)
}

fn oracle_equivalence(rng: &mut StdRng) -> Result<CheckOutcome> {
    let mut worst = 0.0_f64;
    for _ in 0..25 {
        let (coin, gate, initial) = random_walk_params(rng);
        for t in 1..=12 {
            for topology in [
                Topology::line_for_steps(t),
                Topology::Cycle { n: 5 },
                Topology::Cycle { n: 7 },
            ] {
                let spec = RunSpec {
                    topology,
                    duration: Duration::Steps(t),
                    coin,
                    gate: Some(gate),
                    initial,
                    noise: NoiseModel::None,
                };
                let engine = evolve_pure(&spec, &RecordOptions::default())?.final_state;
                let oracle = path_sum_state(t, &coin, Some(&gate), &initial, topology)?;
                for (a, b) in engine.amplitudes().iter().zip(oracle.amplitudes()) {
                    worst = worst.max((a - b).norm());
                }
            }
        }
    }
    Ok(outcome(
        "path-sum oracle equals step evolution",
        worst,
        1e-10,
    ))
}

fn line_symmetry(rng: &mut StdRng) -> Result<CheckOutcome> {
    let t = 60;
    let mut worst = 0.0_f64;
    for _ in 0..100 {
        let (coin, gate, initial) = random_walk_params(rng);
        let spec = RunSpec {
            topology: Topology::line_for_steps(t),
            duration: Duration::Steps(t),
            coin,
            gate: Some(gate),
            initial,
            noise: NoiseModel::None,
        };
        let with = evolve_pure(&spec, &RecordOptions::default())?;
        let without = evolve_pure(&spec.without_gate(), &RecordOptions::default())?;
        for (a, b) in with.steps.iter().zip(&without.steps) {
            worst = worst.max(kolmogorov_distance(&a.distribution, &b.distribution)?);
        }
    }
    Ok(outcome(
        "noiseless line walk is gate-symmetric",
        worst,
        1e-12,
    ))
}

fn phase_mechanism() -> Result<CheckOutcome> {
    let gate = PhaseGateParams::new(30.0, 50.0);
    let mut line_ok = true;
    for t in 1..=12 {
        let audit = phase_factor_audit(t, &gate, Topology::line_for_steps(t), 0)?;
        line_ok &= audit.max_distinct_ones() == 1;
    }
    let cycle = phase_factor_audit(6, &gate, Topology::Cycle { n: 5 }, 0)?;
    let spread = cycle.max_distinct_ones();
    Ok(CheckOutcome {
        name: "one J per line position, several on the 5-cycle",
        passed: line_ok && spread >= 2,
        detail: format!("line single-J: {line_ok}, cycle max distinct J: {spread}"),
    })
}

fn kraus_completeness() -> Result<CheckOutcome> {
    let mut worst = 0.0_f64;
    for gamma0 in [0.0, 0.01, 0.025, 0.1, 1.0] {
        for temperature in [0.0, 3.5, 6.0, 100.0] {
            for delta in [0.1, 1.0] {
                let k = gad_kraus(&GadParams::new(gamma0, temperature, delta))?;
                worst = worst.max(k.completeness_error());
            }
        }
    }
    Ok(outcome("GAD Kraus completeness", worst, 1e-12))
}

fn noisy_integrity() -> Result<CheckOutcome> {
    let spec = RunSpec {
        topology: Topology::Cycle { n: 51 },
        duration: Duration::Steps(300),
        coin: CoinParams::new(20.0, 10.0, 30.0),
        gate: Some(PhaseGateParams::new(40.0, 50.0)),
        initial: InitialStateParams::new(30.0, 40.0),
        noise: NoiseModel::Gad(GadParams::new(0.1, 3.5, 0.1)),
    };
    let opts = RecordOptions {
        keep_states: true,
        ..Default::default()
    };
    let rec = evolve_noisy(&spec, &opts)?;
    let worst = rec
        .states
        .iter()
        .map(|rho| (rho.trace() - 1.0).abs().max(rho.hermiticity_error()))
        .fold(0.0, f64::max);
    Ok(outcome(
        "noisy run keeps unit trace and Hermiticity",
        worst,
        1e-9,
    ))
}

fn zero_noise_equivalence() -> Result<CheckOutcome> {
    let spec = RunSpec {
        topology: Topology::Cycle { n: 51 },
        duration: Duration::Steps(50),
        coin: CoinParams::new(20.0, 10.0, 30.0),
        gate: Some(PhaseGateParams::new(40.0, 50.0)),
        initial: InitialStateParams::new(30.0, 40.0),
        noise: NoiseModel::Gad(GadParams::new(0.0, 3.5, 0.1)),
    };
    let noisy = evolve_noisy(&spec, &RecordOptions::default())?.final_state;
    let pure = pure_to_density(
        &evolve_pure(&spec.without_noise(), &RecordOptions::default())?.final_state,
    );
    let worst = noisy
        .entries()
        .iter()
        .zip(pure.entries())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(outcome(
        "zero coupling reproduces unitary evolution",
        worst,
        1e-10,
    ))
}

fn line_cycle_agreement() -> Result<CheckOutcome> {
    let n = 51;
    let s = 25;
    let base = RunSpec {
        topology: Topology::Cycle { n },
        duration: Duration::Steps(s),
        coin: CoinParams::HADAMARD,
        gate: None,
        initial: InitialStateParams::new(90.0, 0.0),
        noise: NoiseModel::None,
    };
    let cycle = evolve_pure(&base, &RecordOptions::default())?;
    let line = evolve_pure(
        &RunSpec {
            topology: Topology::line_for_steps(s),
            ..base
        },
        &RecordOptions::default(),
    )?;
    let mut worst = 0.0_f64;
    for (c, l) in cycle.steps.iter().zip(&line.steps) {
        for (x, p) in l.distribution.iter() {
            worst = worst.max((c.distribution.at(x)? - p).abs());
        }
    }
    Ok(outcome(
        "cycle matches line before wrap-around",
        worst,
        1e-10,
    ))
}

/// Runs all checks with a fixed seed.
pub fn run_all() -> Result<Vec<CheckOutcome>> {
    let mut rng = StdRng::seed_from_u64(0x05ee_d0fc_1c1e);
    Ok(vec![
        oracle_equivalence(&mut rng)?,
        line_symmetry(&mut rng)?,
        phase_mechanism()?,
        kraus_completeness()?,
        noisy_integrity()?,
        zero_noise_equivalence()?,
        line_cycle_agreement()?,
    ])
}
