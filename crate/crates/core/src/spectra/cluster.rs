//! Grouping eigenvalues into clusters of size `2k + 1` around `k(k + 1)`.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{round, sqrt};

/// Eigenvalues grouped by cluster index `k`, complete for `k ≤ k_max_reliable`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredSpectrum {
    /// `clusters[k]` holds the `2k + 1` eigenvalues of cluster `k`, sorted.
    pub clusters: Vec<Vec<f64>>,
    pub k_max_reliable: usize,
    /// Solver id and truncation, e.g. `sphere-galerkin/L=60`.
    pub provenance: String,
}

impl ClusteredSpectrum {
    pub fn cluster(&self, k: usize) -> Option<&[f64]> {
        self.clusters.get(k).map(|c| c.as_slice())
    }

    /// All reliable eigenvalues, ascending by cluster then value.
    pub fn flat(&self) -> Vec<f64> {
        self.clusters.iter().flatten().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.clusters.iter().map(|c| c.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Smallest eigenvalue not yet included, bounded below by the start of
    /// cluster `k_max_reliable + 1` minus the largest observed shift.
    pub fn next_cluster_floor(&self) -> f64 {
        let k = (self.k_max_reliable + 1) as f64;
        let widest = self
            .clusters
            .iter()
            .enumerate()
            .flat_map(|(j, c)| {
                let kappa = (j * (j + 1)) as f64;
                c.iter().map(move |l| crate::math::abs(l - kappa))
            })
            .fold(0.0, f64::max);
        k * (k + 1.0) - widest
    }
}

/// The cluster index `k` whose `k(k + 1)` lies closest to `lambda - center`.
pub fn cluster_index(lambda: f64, center: f64) -> usize {
    let x = 1.0 + 4.0 * (lambda - center);
    if x <= 1.0 {
        return 0;
    }
    round((sqrt(x) - 1.0) / 2.0) as usize
}

/// Group `eigenvalues` (any order) into clusters `k ≤ k_cap`, each required
/// to have `2k + 1` members. `center` is subtracted before indexing; pass the
/// mean of the potential so that large uniform shifts stay in their cluster.
/// Eigenvalues indexed above `k_cap` are dropped.
pub fn assemble_clusters(eigenvalues: &[f64], k_cap: usize, center: f64, provenance: impl Into<String>) -> Result<ClusteredSpectrum> {
    let mut clusters: Vec<Vec<f64>> = (0..=k_cap).map(|k| Vec::with_capacity(2 * k + 1)).collect();
    for &l in eigenvalues {
        if !l.is_finite() {
            return Err(Error::Discretization(alloc::format!("non-finite eigenvalue {l}")));
        }
        let k = cluster_index(l, center);
        if k <= k_cap {
            clusters[k].push(l);
        }
    }
    for (k, c) in clusters.iter_mut().enumerate() {
        if c.len() != 2 * k + 1 {
            return Err(Error::ClusterIntegrity { k, expected: 2 * k + 1, found: c.len() });
        }
        c.sort_by(f64::total_cmp);
    }
    Ok(ClusteredSpectrum { clusters, k_max_reliable: k_cap, provenance: provenance.into() })
}

/// What cluster shifts are measured against.
#[derive(Debug, Clone, Copy)]
pub enum ShiftReference<'a> {
    /// `κ_ki = k(k + 1)`.
    Round,
    /// A second spectrum, matched by rank within each cluster.
    Spectrum(&'a ClusteredSpectrum),
}

/// Exact finite sums of the shifts in one cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterShifts {
    pub k: usize,
    pub sum: f64,
    pub mean: f64,
    pub sum_squares: f64,
}

pub fn cluster_statistics(spectrum: &ClusteredSpectrum, reference: ShiftReference<'_>) -> Result<Vec<ClusterShifts>> {
    let k_max = match reference {
        ShiftReference::Round => spectrum.k_max_reliable,
        ShiftReference::Spectrum(r) => spectrum.k_max_reliable.min(r.k_max_reliable),
    };
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let c = &spectrum.clusters[k];
        let (mut sum, mut sq) = (0.0, 0.0);
        match reference {
            ShiftReference::Round => {
                let kappa = (k * (k + 1)) as f64;
                for l in c {
                    let d = l - kappa;
                    sum += d;
                    sq += d * d;
                }
            }
            ShiftReference::Spectrum(r) => {
                let rc = &r.clusters[k];
                if rc.len() != c.len() {
                    return Err(Error::Misaligned(alloc::format!("cluster {k}: {} vs {} eigenvalues", c.len(), rc.len())));
                }
                for (a, b) in c.iter().zip(rc) {
                    let d = a - b;
                    sum += d;
                    sq += d * d;
                }
            }
        }
        out.push(ClusterShifts { k, sum, mean: sum / c.len() as f64, sum_squares: sq });
    }
    Ok(out)
}
