//! Position distributions, Kolmogorov distance and coherence measures.

use crate::error::{Error, Result};
use crate::state::{DensityMatrix, PureState, Topology};

/// Reference values below this are treated as zero when normalizing.
pub const UNDEFINED_BELOW: f64 = 1e-12;

/// Probability of finding the walker at each site, `p(x) = Σ_coin ⟨coin,x|ρ|coin,x⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionDistribution {
    topology: Topology,
    probs: Vec<f64>,
}

impl PositionDistribution {
    pub fn new(topology: Topology, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != topology.sites() {
            return Err(Error::Shape(format!(
                "distribution has {} entries for {} sites",
                probs.len(),
                topology.sites()
            )));
        }
        Ok(Self { topology, probs })
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Probabilities indexed by site.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Probability at position label `x`.
    pub fn at(&self, x: i64) -> Result<f64> {
        Ok(self.probs[self.topology.position_index(x)?])
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `(label, probability)` pairs in site order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(site, p)| (self.topology.position_label(site), *p))
    }
}

/// States with a position marginal.
pub trait Observable {
    fn position_distribution(&self) -> PositionDistribution;

    /// Off-diagonal magnitudes binned by position-label separation.
    fn coherence_function(&self, bins: usize, s: usize) -> Result<CoherenceProfile>;
}

impl Observable for PureState {
    fn position_distribution(&self) -> PositionDistribution {
        let n = self.topology().sites();
        let amps = self.amplitudes();
        let probs = (0..n)
            .map(|x| amps[x].norm_sqr() + amps[n + x].norm_sqr())
            .collect();
        PositionDistribution {
            topology: self.topology(),
            probs,
        }
    }

    fn coherence_function(&self, bins: usize, s: usize) -> Result<CoherenceProfile> {
        let mags: Vec<f64> = self.amplitudes().iter().map(|z| z.norm()).collect();
        binned_coherence(self.topology(), bins, s, |u, v| mags[u] * mags[v])
    }
}

impl Observable for DensityMatrix {
    fn position_distribution(&self) -> PositionDistribution {
        let n = self.topology().sites();
        let probs = (0..n)
            .map(|x| self.get(x, x).re + self.get(n + x, n + x).re)
            .collect();
        PositionDistribution {
            topology: self.topology(),
            probs,
        }
    }

    fn coherence_function(&self, bins: usize, s: usize) -> Result<CoherenceProfile> {
        let dim = self.dim();
        let entries = self.entries();
        binned_coherence(self.topology(), bins, s, |u, v| entries[u * dim + v].norm())
    }
}

/// `p(x) = ⟨x| tr_c ρ |x⟩`.
pub fn position_distribution<S: Observable>(state: &S) -> PositionDistribution {
    state.position_distribution()
}

/// `d = ½ Σ_x |p(x) − q(x)|`.
pub fn kolmogorov_distance(p: &PositionDistribution, q: &PositionDistribution) -> Result<f64> {
    if p.topology != q.topology {
        return Err(Error::Shape(format!(
            "distributions live on {:?} and {:?}",
            p.topology, q.topology
        )));
    }
    let sum: f64 = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(0.5 * sum)
}

/// Sum of `|ρ_uv|` over every off-diagonal pair `u ≠ v` in the
/// coin ⊗ position basis.
pub fn coherence_total(rho: &DensityMatrix) -> f64 {
    let dim = rho.dim();
    rho.entries()
        .iter()
        .enumerate()
        .filter(|(i, _)| i / dim != i % dim)
        .map(|(_, z)| z.norm())
        .sum()
}

/// Coherence split into `M` bins of width `s/M` over the label separation
/// `|j − k|`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherenceProfile {
    pub total: f64,
    /// `C(m)` for `m = 1..=M`, stored at index `m − 1`.
    pub bins: Vec<f64>,
    pub bin_width: f64,
}

impl CoherenceProfile {
    pub fn m(&self) -> usize {
        self.bins.len()
    }
}

/// Bin index (0-based) of a label separation: `(m−1)(s/M) ≤ sep < m(s/M)`,
/// with separations past the top edge clamped into the last bin.
pub fn coherence_bin(separation: usize, bins: usize, s: usize) -> usize {
    ((separation * bins) / s).min(bins - 1)
}

fn binned_coherence(
    topology: Topology,
    bins: usize,
    s: usize,
    magnitude: impl Fn(usize, usize) -> f64,
) -> Result<CoherenceProfile> {
    if bins == 0 || s == 0 || bins > s {
        return Err(Error::Parameter(format!(
            "coherence bins need 1 <= M <= s, got M = {bins}, s = {s}"
        )));
    }
    let n = topology.sites();
    let dim = 2 * n;
    let mut out = vec![0.0; bins];
    let mut total = 0.0;
    for u in 0..dim {
        let j = u % n;
        for v in 0..dim {
            if u == v {
                continue;
            }
            let k = v % n;
            let mag = magnitude(u, v);
            out[coherence_bin(j.abs_diff(k), bins, s)] += mag;
            total += mag;
        }
    }
    Ok(CoherenceProfile {
        total,
        bins: out,
        bin_width: s as f64 / bins as f64,
    })
}

/// Binned coherence function `C(m)` of a density matrix.
pub fn coherence_function(rho: &DensityMatrix, bins: usize, s: usize) -> Result<CoherenceProfile> {
    rho.coherence_function(bins, s)
}

/// Noisy metrics normalized by a noiseless reference. `None` marks an
/// undefined ratio (reference below [`UNDEFINED_BELOW`]).
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryMetrics {
    pub d: f64,
    pub d0: f64,
    /// `D = d / d₀`.
    pub normalized_distance: Option<f64>,
    /// `c(m) = C(m) / C₀(m)`.
    pub normalized_coherence: Vec<Option<f64>>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den.abs() >= UNDEFINED_BELOW).then(|| num / den)
}

pub fn normalized_metrics(
    noisy: &CoherenceProfile,
    d: f64,
    reference: &CoherenceProfile,
    d0: f64,
) -> Result<SymmetryMetrics> {
    if noisy.m() != reference.m() {
        return Err(Error::Shape(format!(
            "coherence profiles have {} and {} bins",
            noisy.m(),
            reference.m()
        )));
    }
    Ok(SymmetryMetrics {
        d,
        d0,
        normalized_distance: ratio(d, d0),
        normalized_coherence: noisy
            .bins
            .iter()
            .zip(&reference.bins)
            .map(|(c, c0)| ratio(*c, *c0))
            .collect(),
    })
}
