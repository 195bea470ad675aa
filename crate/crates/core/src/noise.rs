//! Qubit noise channels acting on the coin.
//!
//! Kraus operators are 2×2 and act as `E ⊗ I_position`, so a channel maps each
//! 2×2 coin block `R_jk` of the density matrix (fixed position pair `j, k`)
//! to `Σ_i E_i R_jk E_i†` independently.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operators::CoinMatrix;
use crate::state::DensityMatrix;

const COMPLETENESS_TOL: f64 = 1e-10;

/// Generalized amplitude damping parameters, in units with ħ = k_B = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GadParams {
    /// Coupling strength γ₀.
    pub gamma0: f64,
    /// Bath temperature T.
    pub temperature: f64,
    /// Interaction duration Δ per step.
    pub delta: f64,
    /// Oscillator frequency ω.
    pub omega: f64,
}

impl GadParams {
    pub fn new(gamma0: f64, temperature: f64, delta: f64) -> Self {
        Self {
            gamma0,
            temperature,
            delta,
            omega: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: &str, v: f64, ok: bool| {
            if v.is_finite() && ok {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} = {v} is out of range")))
            }
        };
        check("gamma0", self.gamma0, self.gamma0 >= 0.0)?;
        check("T", self.temperature, self.temperature >= 0.0)?;
        check("Delta", self.delta, self.delta >= 0.0)?;
        check("omega", self.omega, self.omega > 0.0)
    }

    /// Thermal occupation `N_th`.
    pub fn n_th(&self) -> f64 {
        thermal_occupation(self.temperature, self.omega)
    }

    /// `κ = (N_th + 1) / (2 N_th + 1)`.
    pub fn kappa(&self) -> f64 {
        let n = self.n_th();
        (n + 1.0) / (2.0 * n + 1.0)
    }

    /// `λ(Δ) = 1 − exp(−γ₀ (2 N_th + 1) Δ)`.
    pub fn lambda(&self) -> f64 {
        let n = self.n_th();
        -(-self.gamma0 * (2.0 * n + 1.0) * self.delta).exp_m1()
    }
}

/// Bose occupation `1 / (e^{ω/T} − 1)`, with the `T → 0` limit 0.
pub fn thermal_occupation(temperature: f64, omega: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    1.0 / (omega / temperature).exp_m1()
}

/// Ordered Kraus operators of a coin channel.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausSet(Vec<CoinMatrix>);

impl KrausSet {
    /// Wraps operators without checking completeness; [`apply_channel`]
    /// checks it before use.
    pub fn new(ops: Vec<CoinMatrix>) -> Self {
        KrausSet(ops)
    }

    pub fn identity() -> Self {
        KrausSet(vec![CoinMatrix::IDENTITY])
    }

    pub fn operators(&self) -> &[CoinMatrix] {
        &self.0
    }

    /// `max |(Σ E†E − I)_rc|`.
    pub fn completeness_error(&self) -> f64 {
        self.0
            .iter()
            .fold(CoinMatrix::ZERO, |acc, e| acc.add(&(e.adjoint() * *e)))
            .max_abs_diff(&CoinMatrix::IDENTITY)
    }

    /// Applies the channel to a single 2×2 coin density matrix.
    pub fn apply_to_coin(&self, r: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for e in &self.0 {
            let t = e.sandwich(r);
            for a in 0..2 {
                for b in 0..2 {
                    out[a][b] += t[a][b];
                }
            }
        }
        out
    }
}

/// The four generalized amplitude damping operators
/// `E0 = √κ diag(√(1−λ), 1)`, `E1 = √κ [[0,0],[√λ,0]]`,
/// `E2 = √(1−κ) diag(1, √(1−λ))`, `E3 = √((1−κ)/κ) E1†`.
pub fn gad_kraus(p: &GadParams) -> Result<KrausSet> {
    p.validate()?;
    let kappa = p.kappa();
    if kappa <= 0.0 {
        return Err(Error::Parameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    let lambda = p.lambda();
    let keep = (1.0 - lambda).sqrt();
    let sk = kappa.sqrt();
    let e0 = CoinMatrix::from_real([[keep, 0.0], [0.0, 1.0]]).scale(sk);
    let e1 = CoinMatrix::from_real([[0.0, 0.0], [lambda.sqrt(), 0.0]]).scale(sk);
    let e2 = CoinMatrix::from_real([[1.0, 0.0], [0.0, keep]]).scale((1.0 - kappa).sqrt());
    let e3 = e1.adjoint().scale(((1.0 - kappa) / kappa).sqrt());
    Ok(KrausSet(vec![e0, e1, e2, e3]))
}

/// Phase damping `{diag(1, √(1−λ)), diag(0, √λ)}`.
///
/// Equivalent to a phase flip with probability `p = (1 − √(1−λ)) / 2`; for
/// small λ this is `p ≈ λ/4`, and off-diagonals shrink by `√(1−λ) = 1 − 2p`.
pub fn phase_damping_kraus(lambda: f64) -> Result<KrausSet> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Parameter(format!(
            "phase damping lambda must lie in [0, 1], got {lambda}"
        )));
    }
    let e0 = CoinMatrix::from_real([[1.0, 0.0], [0.0, (1.0 - lambda).sqrt()]]);
    let e1 = CoinMatrix::from_real([[0.0, 0.0], [0.0, lambda.sqrt()]]);
    Ok(KrausSet(vec![e0, e1]))
}

/// `ρ → Σ_j (E_j ⊗ I) ρ (E_j ⊗ I)†`.
pub fn apply_channel(rho: &DensityMatrix, k: &KrausSet) -> Result<DensityMatrix> {
    let mut out = rho.clone();
    apply_channel_in_place(&mut out, k)?;
    Ok(out)
}

pub(crate) fn apply_channel_in_place(rho: &mut DensityMatrix, k: &KrausSet) -> Result<()> {
    let deviation = k.completeness_error();
    if deviation > COMPLETENESS_TOL {
        return Err(Error::ChannelIntegrity { deviation });
    }
    let n = rho.topology().sites();
    let dim = 2 * n;
    let m = rho.entries_mut();
    for j in 0..n {
        for kk in 0..n {
            let idx = [
                [j * dim + kk, j * dim + n + kk],
                [(n + j) * dim + kk, (n + j) * dim + n + kk],
            ];
            let block = [[m[idx[0][0]], m[idx[0][1]]], [m[idx[1][0]], m[idx[1][1]]]];
            let out = k.apply_to_coin(&block);
            for a in 0..2 {
                for b in 0..2 {
                    m[idx[a][b]] = out[a][b];
                }
            }
        }
    }
    Ok(())
}
