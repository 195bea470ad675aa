//! Coin toss, phase gate and conditional shift.
//!
//! One walk step applies the coin `B`, then the shift `U`, then (optionally)
//! the phase gate `G`, i.e. the operator `G·U·B` read right to left.

use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{DensityMatrix, PureState, Topology};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Amplitudes at or below this magnitude may be dropped at a line boundary.
const BOUNDARY_TOL: f64 = 1e-12;

/// Angles of the SU(2)-type coin `B(ξ, θ, ζ)`, in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinParams {
    pub xi: f64,
    pub theta: f64,
    pub zeta: f64,
}

impl CoinParams {
    pub const HADAMARD: CoinParams = CoinParams {
        xi: 0.0,
        theta: 45.0,
        zeta: 0.0,
    };

    pub fn new(xi: f64, theta: f64, zeta: f64) -> Self {
        Self { xi, theta, zeta }
    }
}

/// Angles of the phase gate `G(α, β) = diag(e^{iα}, e^{iβ})`, in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseGateParams {
    pub alpha: f64,
    pub beta: f64,
}

impl PhaseGateParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }
}

/// 2×2 complex matrix acting on the coin space. `self.0[row][col]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinMatrix(pub [[Complex64; 2]; 2]);

impl CoinMatrix {
    pub const IDENTITY: CoinMatrix = CoinMatrix([[ONE, ZERO], [ZERO, ONE]]);
    pub const ZERO: CoinMatrix = CoinMatrix([[ZERO, ZERO], [ZERO, ZERO]]);

    pub fn from_real(m: [[f64; 2]; 2]) -> Self {
        CoinMatrix([
            [Complex64::new(m[0][0], 0.0), Complex64::new(m[0][1], 0.0)],
            [Complex64::new(m[1][0], 0.0), Complex64::new(m[1][1], 0.0)],
        ])
    }

    pub fn diagonal(d0: Complex64, d1: Complex64) -> Self {
        CoinMatrix([[d0, ZERO], [ZERO, d1]])
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        CoinMatrix([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn scale(&self, k: f64) -> Self {
        let m = &self.0;
        CoinMatrix([[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]])
    }

    pub fn add(&self, other: &CoinMatrix) -> Self {
        let (a, b) = (&self.0, &other.0);
        CoinMatrix([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &CoinMatrix) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.0[r][c] - other.0[r][c]).norm());
            }
        }
        worst
    }

    /// `max |(M†M − I)_rc|`.
    pub fn unitarity_error(&self) -> f64 {
        (self.adjoint() * *self).max_abs_diff(&CoinMatrix::IDENTITY)
    }

    /// `M · R · M†` for a coin-space block `R`.
    #[inline]
    pub fn sandwich(&self, r: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let m = &self.0;
        // t = M R
        let t00 = m[0][0] * r[0][0] + m[0][1] * r[1][0];
        let t01 = m[0][0] * r[0][1] + m[0][1] * r[1][1];
        let t10 = m[1][0] * r[0][0] + m[1][1] * r[1][0];
        let t11 = m[1][0] * r[0][1] + m[1][1] * r[1][1];
        // t M†, (t M†)_ab = Σ_c t_ac conj(M_bc)
        [
            [
                t00 * m[0][0].conj() + t01 * m[0][1].conj(),
                t00 * m[1][0].conj() + t01 * m[1][1].conj(),
            ],
            [
                t10 * m[0][0].conj() + t11 * m[0][1].conj(),
                t10 * m[1][0].conj() + t11 * m[1][1].conj(),
            ],
        ]
    }
}

impl Mul for CoinMatrix {
    type Output = CoinMatrix;

    fn mul(self, rhs: CoinMatrix) -> CoinMatrix {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[ZERO; 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        CoinMatrix(out)
    }
}

/// `B(ξ,θ,ζ) = [[e^{iξ}cosθ, e^{iζ}sinθ], [e^{−iζ}sinθ, −e^{−iξ}cosθ]]`.
///
/// The angle θ enters as-is, not halved.
pub fn build_coin(p: &CoinParams) -> CoinMatrix {
    let (xi, theta, zeta) = (p.xi.to_radians(), p.theta.to_radians(), p.zeta.to_radians());
    let (s, c) = theta.sin_cos();
    CoinMatrix([
        [Complex64::from_polar(c, xi), Complex64::from_polar(s, zeta)],
        [
            Complex64::from_polar(s, -zeta),
            -Complex64::from_polar(c, -xi),
        ],
    ])
}

/// `G(α,β) = diag(e^{iα}, e^{iβ})`.
pub fn build_phase_gate(p: &PhaseGateParams) -> CoinMatrix {
    CoinMatrix::diagonal(
        Complex64::from_polar(1.0, p.alpha.to_radians()),
        Complex64::from_polar(1.0, p.beta.to_radians()),
    )
}

/// A state the walk operators can act on in place.
pub trait WalkState {
    fn topology(&self) -> Topology;

    /// Applies `c ⊗ I_position`.
    fn apply_coin_in_place(&mut self, c: &CoinMatrix);

    /// Applies the conditional shift for the state's own topology.
    fn apply_shift_in_place(&mut self) -> Result<()>;
}

/// Destination index for each basis index under the conditional shift, or
/// `None` where the amplitude would leave a finite line.
fn shift_targets(topology: Topology) -> Vec<Option<usize>> {
    let n = topology.sites();
    let mut dest = Vec::with_capacity(2 * n);
    for coin in 0..2 {
        for site in 0..n {
            let moved = match topology {
                Topology::Cycle { .. } => {
                    let next = if coin == 0 {
                        (site + n - 1) % n
                    } else {
                        (site + 1) % n
                    };
                    Some(next)
                }
                Topology::Line { .. } => {
                    if coin == 0 {
                        site.checked_sub(1)
                    } else if site + 1 < n {
                        Some(site + 1)
                    } else {
                        None
                    }
                }
            };
            dest.push(moved.map(|s| coin * n + s));
        }
    }
    dest
}

fn boundary_error(topology: Topology, index: usize, magnitude: f64) -> Error {
    Error::BoundaryViolation {
        site: index % topology.sites(),
        magnitude,
    }
}

impl WalkState for PureState {
    fn topology(&self) -> Topology {
        PureState::topology(self)
    }

    fn apply_coin_in_place(&mut self, c: &CoinMatrix) {
        let n = PureState::topology(self).sites();
        let m = &c.0;
        let amps = self.amplitudes_mut();
        let (lower, upper) = amps.split_at_mut(n);
        for (a0, a1) in lower.iter_mut().zip(upper.iter_mut()) {
            let (u, v) = (*a0, *a1);
            *a0 = m[0][0] * u + m[0][1] * v;
            *a1 = m[1][0] * u + m[1][1] * v;
        }
    }

    fn apply_shift_in_place(&mut self) -> Result<()> {
        let topology = PureState::topology(self);
        let dest = shift_targets(topology);
        let amps = self.amplitudes_mut();
        let mut out = vec![ZERO; amps.len()];
        for (i, target) in dest.iter().enumerate() {
            match target {
                Some(j) => out[*j] = amps[i],
                None => {
                    let mag = amps[i].norm();
                    if mag > BOUNDARY_TOL {
                        return Err(boundary_error(topology, i, mag));
                    }
                }
            }
        }
        amps.copy_from_slice(&out);
        Ok(())
    }
}

impl WalkState for DensityMatrix {
    fn topology(&self) -> Topology {
        DensityMatrix::topology(self)
    }

    fn apply_coin_in_place(&mut self, c: &CoinMatrix) {
        let n = DensityMatrix::topology(self).sites();
        let dim = 2 * n;
        let m = &c.0;
        let rho = self.entries_mut();
        // rows: (c ⊗ I) ρ
        for j in 0..n {
            let (r0, r1) = (j * dim, (n + j) * dim);
            for col in 0..dim {
                let (u, v) = (rho[r0 + col], rho[r1 + col]);
                rho[r0 + col] = m[0][0] * u + m[0][1] * v;
                rho[r1 + col] = m[1][0] * u + m[1][1] * v;
            }
        }
        // columns: ρ (c ⊗ I)†
        let (c00, c01, c10, c11) = (
            m[0][0].conj(),
            m[0][1].conj(),
            m[1][0].conj(),
            m[1][1].conj(),
        );
        for row in rho.chunks_exact_mut(dim) {
            let (left, right) = row.split_at_mut(n);
            for (u, v) in left.iter_mut().zip(right.iter_mut()) {
                let (x, y) = (*u, *v);
                *u = x * c00 + y * c01;
                *v = x * c10 + y * c11;
            }
        }
    }

    fn apply_shift_in_place(&mut self) -> Result<()> {
        let topology = DensityMatrix::topology(self);
        let dim = topology.dim();
        let dest = shift_targets(topology);
        let rho = self.entries_mut();
        for (i, target) in dest.iter().enumerate() {
            if target.is_none() {
                let mag = rho[i * dim + i].re.max(0.0).sqrt();
                if mag > BOUNDARY_TOL {
                    return Err(boundary_error(topology, i, mag));
                }
            }
        }
        let mut out = vec![ZERO; rho.len()];
        for (r, tr) in dest.iter().enumerate() {
            let Some(tr) = tr else { continue };
            let src = &rho[r * dim..(r + 1) * dim];
            let dst = &mut out[tr * dim..(tr + 1) * dim];
            for (c, tc) in dest.iter().enumerate() {
                if let Some(tc) = tc {
                    dst[*tc] = src[c];
                }
            }
        }
        rho.copy_from_slice(&out);
        Ok(())
    }
}

/// Applies `c ⊗ I` to a pure state (`ψ → (c⊗I)ψ`) or a density matrix
/// (`ρ → (c⊗I)ρ(c⊗I)†`).
pub fn apply_coin<S: WalkState>(state: &mut S, c: &CoinMatrix) {
    state.apply_coin_in_place(c);
}

/// Applies the conditional shift `U`: coin 0 moves one site left, coin 1 one
/// site right, modulo `n` on a cycle.
pub fn apply_shift<S: WalkState>(state: &mut S, topology: Topology) -> Result<()> {
    if state.topology() != topology {
        return Err(Error::Shape(format!(
            "state lives on {:?}, shift requested for {:?}",
            state.topology(),
            topology
        )));
    }
    state.apply_shift_in_place()
}

/// One step `G·U·B`: coin, shift, then the optional phase gate.
pub fn walk_step<S: WalkState>(
    state: &mut S,
    coin: &CoinMatrix,
    gate: Option<&CoinMatrix>,
    topology: Topology,
) -> Result<()> {
    apply_coin(state, coin);
    apply_shift(state, topology)?;
    if let Some(g) = gate {
        apply_coin(state, g);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_initial_pure, pure_to_density, InitialStateParams};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn basis(topology: Topology, coin: usize, site: usize) -> PureState {
        let mut v = vec![ZERO; topology.dim()];
        v[coin * topology.sites() + site] = ONE;
        PureState::from_amplitudes(topology, v).unwrap()
    }

    #[test]
    fn hadamard_coin() {
        let h = build_coin(&CoinParams::HADAMARD);
        let expect = CoinMatrix::from_real([[1.0, 1.0], [1.0, -1.0]]).scale(FRAC_1_SQRT_2);
        assert!(h.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn zero_angle_coin_is_pauli_z() {
        let z = build_coin(&CoinParams::new(0.0, 0.0, 0.0));
        assert!(z.max_abs_diff(&CoinMatrix::from_real([[1.0, 0.0], [0.0, -1.0]])) < 1e-15);
    }

    #[test]
    fn fig2_coin_entries() {
        let b = build_coin(&CoinParams::new(20.0, 10.0, 30.0));
        let expect = CoinMatrix([
            [c(0.925417, 0.336824), c(0.150384, 0.086824)],
            [c(0.150384, -0.086824), c(-0.925417, 0.336824)],
        ]);
        assert!(b.max_abs_diff(&expect) < 1e-6);
    }

    #[test]
    fn phase_gate_values() {
        assert!(
            build_phase_gate(&PhaseGateParams::new(0.0, 0.0)).max_abs_diff(&CoinMatrix::IDENTITY)
                < 1e-15
        );
        let g = build_phase_gate(&PhaseGateParams::new(30.0, 50.0));
        let expect = CoinMatrix::diagonal(c(0.866025, 0.5), c(0.642788, 0.766044));
        assert!(g.max_abs_diff(&expect) < 1e-6);
        let eq = build_phase_gate(&PhaseGateParams::new(17.0, 17.0));
        let phase = Complex64::from_polar(1.0, 17f64.to_radians());
        assert!(eq.max_abs_diff(&CoinMatrix::diagonal(phase, phase)) < 1e-15);
    }

    #[test]
    fn hadamard_maps_plus_to_zero() {
        let topo = Topology::cycle(5).unwrap();
        let mut psi = make_initial_pure(&InitialStateParams::new(90.0, 0.0), topo).unwrap();
        apply_coin(&mut psi, &build_coin(&CoinParams::HADAMARD));
        assert!((psi.amplitude(0, 0) - ONE).norm() < 1e-15);
        assert!(psi.amplitude(1, 0).norm() < 1e-15);
    }

    #[test]
    fn identity_coin_leaves_state() {
        let topo = Topology::cycle(5).unwrap();
        let psi0 = make_initial_pure(&InitialStateParams::new(30.0, 40.0), topo).unwrap();
        let mut psi = psi0.clone();
        apply_coin(&mut psi, &CoinMatrix::IDENTITY);
        assert_eq!(psi, psi0);
    }

    #[test]
    fn cycle_shift_wraps_both_directions() {
        let topo = Topology::cycle(3).unwrap();
        let mut psi = basis(topo, 0, 0);
        apply_shift(&mut psi, topo).unwrap();
        assert_eq!(psi, basis(topo, 0, 2));
        let mut psi = basis(topo, 1, 2);
        apply_shift(&mut psi, topo).unwrap();
        assert_eq!(psi, basis(topo, 1, 0));
    }

    #[test]
    fn line_shift_splits_superposition() {
        let topo = Topology::line(5, 2).unwrap();
        let mut psi = make_initial_pure(&InitialStateParams::new(90.0, 0.0), topo).unwrap();
        apply_shift(&mut psi, topo).unwrap();
        assert!((psi.amplitude(0, 1).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((psi.amplitude(1, 3).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((psi.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn line_boundary_violation_detected() {
        let topo = Topology::line(3, 1).unwrap();
        let mut psi = basis(topo, 0, 0);
        assert!(matches!(
            apply_shift(&mut psi, topo),
            Err(Error::BoundaryViolation { site: 0, .. })
        ));
        let mut rho = pure_to_density(&basis(topo, 1, 2));
        assert!(matches!(
            apply_shift(&mut rho, topo),
            Err(Error::BoundaryViolation { site: 2, .. })
        ));
    }

    #[test]
    fn shift_rejects_foreign_topology() {
        let topo = Topology::cycle(3).unwrap();
        let mut psi = basis(topo, 0, 0);
        assert!(matches!(
            apply_shift(&mut psi, Topology::cycle(4).unwrap()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn hadamard_step_moves_plus_state_left() {
        let topo = Topology::line(5, 2).unwrap();
        let mut psi = make_initial_pure(&InitialStateParams::new(90.0, 0.0), topo).unwrap();
        walk_step(&mut psi, &build_coin(&CoinParams::HADAMARD), None, topo).unwrap();
        assert!((psi.amplitude(0, 1).norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_gate_equals_no_gate() {
        let topo = Topology::cycle(7).unwrap();
        let coin = build_coin(&CoinParams::new(20.0, 10.0, 30.0));
        let psi0 = make_initial_pure(&InitialStateParams::new(30.0, 40.0), topo).unwrap();
        let (mut a, mut b) = (psi0.clone(), psi0);
        for _ in 0..10 {
            walk_step(&mut a, &coin, None, topo).unwrap();
            walk_step(&mut b, &coin, Some(&CoinMatrix::IDENTITY), topo).unwrap();
        }
        assert_eq!(a, b);
    }

    #[test]
    fn two_hadamard_steps_on_line() {
        let topo = Topology::line(5, 2).unwrap();
        let mut psi = basis(topo, 0, 2);
        let h = build_coin(&CoinParams::HADAMARD);
        walk_step(&mut psi, &h, None, topo).unwrap();
        walk_step(&mut psi, &h, None, topo).unwrap();
        let p = |site: usize| psi.amplitude(0, site).norm_sqr() + psi.amplitude(1, site).norm_sqr();
        assert!((p(0) - 0.25).abs() < 1e-15);
        assert!((p(2) - 0.5).abs() < 1e-15);
        assert!((p(4) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn density_step_matches_pure_step() {
        let topo = Topology::cycle(5).unwrap();
        let coin = build_coin(&CoinParams::new(20.0, 10.0, 30.0));
        let gate = build_phase_gate(&PhaseGateParams::new(40.0, 50.0));
        let mut psi = make_initial_pure(&InitialStateParams::new(30.0, 40.0), topo).unwrap();
        let mut rho = pure_to_density(&psi);
        for _ in 0..8 {
            walk_step(&mut psi, &coin, Some(&gate), topo).unwrap();
            walk_step(&mut rho, &coin, Some(&gate), topo).unwrap();
        }
        let expect = pure_to_density(&psi);
        let worst = rho
            .entries()
            .iter()
            .zip(expect.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-14);
    }
}
