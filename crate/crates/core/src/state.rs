//! Walker states on the coin ⊗ position space.
//!
//! Both representations use coin-major layout: basis index `coin * N + site`
//! where `N` is the number of lattice sites. A coin-space operator therefore
//! acts on the pair of indices `(site, N + site)` and never mixes sites.

use num_complex::Complex64;

use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-9;

/// Lattice the walker moves on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Topology {
    /// Finite stretch of the integer line. Position `x` lives at site
    /// `origin_index + x`.
    Line { length: usize, origin_index: usize },
    /// Ring of `n` sites with `|x⟩ = |x mod n⟩`.
    Cycle { n: usize },
}

impl Topology {
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("cycle needs n >= 2, got {n}")));
        }
        Ok(Topology::Cycle { n })
    }

    pub fn line(length: usize, origin_index: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::Parameter("line length must be >= 1".into()));
        }
        if origin_index >= length {
            return Err(Error::Parameter(format!(
                "origin index {origin_index} outside line of length {length}"
            )));
        }
        Ok(Topology::Line {
            length,
            origin_index,
        })
    }

    /// Line of `2 * steps + 1` sites centred on the origin. A walk started at
    /// the origin cannot reach either end within `steps` steps.
    pub fn line_for_steps(steps: usize) -> Self {
        Topology::Line {
            length: 2 * steps + 1,
            origin_index: steps,
        }
    }

    pub fn sites(&self) -> usize {
        match *self {
            Topology::Line { length, .. } => length,
            Topology::Cycle { n } => n,
        }
    }

    /// State-space dimension, `2 * sites`.
    pub fn dim(&self) -> usize {
        2 * self.sites()
    }

    pub fn is_cycle(&self) -> bool {
        matches!(self, Topology::Cycle { .. })
    }

    /// `s` with `n = 2s + 1`, defined only for odd cycles.
    pub fn half_turn(&self) -> Option<usize> {
        match *self {
            Topology::Cycle { n } if n % 2 == 1 => Some((n - 1) / 2),
            _ => None,
        }
    }

    /// Site index holding position `x`.
    pub fn position_index(&self, x: i64) -> Result<usize> {
        match *self {
            Topology::Cycle { n } => Ok(x.rem_euclid(n as i64) as usize),
            Topology::Line {
                length,
                origin_index,
            } => {
                let site = origin_index as i64 + x;
                if site < 0 || site >= length as i64 {
                    return Err(Error::Range {
                        x,
                        detail: format!(
                            "line of length {length} with origin at site {origin_index}"
                        ),
                    });
                }
                Ok(site as usize)
            }
        }
    }

    /// Inverse of [`Topology::position_index`]: the canonical position label
    /// of a site. Cycle labels are `0..n`, line labels are signed offsets
    /// from the origin.
    pub fn position_label(&self, site: usize) -> i64 {
        match *self {
            Topology::Cycle { .. } => site as i64,
            Topology::Line { origin_index, .. } => site as i64 - origin_index as i64,
        }
    }
}

/// Initial coin state `cos(θ₀/2)|0⟩ + sin(θ₀/2)e^{iφ₀}|1⟩` at a single site.
/// Angles in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InitialStateParams {
    pub theta0: f64,
    pub phi0: f64,
    pub start_position: i64,
}

impl InitialStateParams {
    pub fn new(theta0: f64, phi0: f64) -> Self {
        Self {
            theta0,
            phi0,
            start_position: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=180.0).contains(&self.theta0) {
            return Err(Error::Parameter(format!(
                "theta0 must lie in [0, 180] degrees, got {}",
                self.theta0
            )));
        }
        if !(0.0..360.0).contains(&self.phi0) {
            return Err(Error::Parameter(format!(
                "phi0 must lie in [0, 360) degrees, got {}",
                self.phi0
            )));
        }
        Ok(())
    }

    /// Coin amplitudes `(a, b)`.
    pub fn coin_amplitudes(&self) -> (Complex64, Complex64) {
        let half = self.theta0.to_radians() / 2.0;
        let a = Complex64::new(half.cos(), 0.0);
        let b = Complex64::from_polar(half.sin(), self.phi0.to_radians());
        (a, b)
    }
}

/// Pure walker state `|ψ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    topology: Topology,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Wraps an amplitude vector, checking length, finiteness and unit norm.
    pub fn from_amplitudes(topology: Topology, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != topology.dim() {
            return Err(Error::Shape(format!(
                "expected {} amplitudes, got {}",
                topology.dim(),
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.is_finite()) {
            return Err(Error::Parameter("non-finite amplitude".into()));
        }
        let state = Self {
            topology,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Parameter(format!(
                "state norm² is {norm}, expected 1"
            )));
        }
        Ok(state)
    }

    pub(crate) fn from_raw(topology: Topology, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), topology.dim());
        Self {
            topology,
            amplitudes,
        }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn amplitude(&self, coin: usize, site: usize) -> Complex64 {
        self.amplitudes[coin * self.topology.sites() + site]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Builds `|ψ₀⟩ = (a|0⟩ + b|1⟩)|x₀⟩_p`.
pub fn make_initial_pure(params: &InitialStateParams, topology: Topology) -> Result<PureState> {
    params.validate()?;
    let site = topology.position_index(params.start_position)?;
    let (a, b) = params.coin_amplitudes();
    let n = topology.sites();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); topology.dim()];
    amplitudes[site] = a;
    amplitudes[n + site] = b;
    Ok(PureState::from_raw(topology, amplitudes))
}

/// Density operator over coin ⊗ position, stored dense and row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    topology: Topology,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Wraps a row-major `2N × 2N` matrix after checking Hermiticity and unit
    /// trace. Positivity is not checked here.
    pub fn from_entries(topology: Topology, entries: Vec<Complex64>) -> Result<Self> {
        let dim = topology.dim();
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "expected {}x{} entries, got {}",
                dim,
                dim,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::Parameter("non-finite density matrix entry".into()));
        }
        let rho = Self { topology, entries };
        let herm = rho.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::Parameter(format!(
                "matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = rho.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Parameter(format!("trace is {tr}, expected 1")));
        }
        Ok(rho)
    }

    pub(crate) fn from_raw(topology: Topology, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), topology.dim() * topology.dim());
        Self { topology, entries }
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn dim(&self) -> usize {
        self.topology.dim()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        let dim = self.dim();
        (0..dim).map(|i| self.entries[i * dim + i].re).sum()
    }

    /// `max |ρ_uv − conj(ρ_vu)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..dim {
            for j in i..dim {
                let d = (self.entries[i * dim + j] - self.entries[j * dim + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// `tr(ρ²)`, computed as `Σ |ρ_uv|²` (valid for Hermitian ρ).
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `|ψ⟩⟨ψ|`.
pub fn pure_to_density(state: &PureState) -> DensityMatrix {
    let psi = state.amplitudes();
    let dim = psi.len();
    let mut entries = Vec::with_capacity(dim * dim);
    for u in psi {
        for v in psi {
            entries.push(u * v.conj());
        }
    }
    DensityMatrix::from_raw(state.topology(), entries)
}
