//! Level populations, photon number and photon-number distributions of
//! sector eigenstates.

use crate::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::spectra::{sector_ground, SectorSpectrum, SectorState};

/// Diagonal expectation values of eigenstate `k` (ascending energy).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationRow {
    pub k: usize,
    pub energy: f64,
    pub a11: f64,
    pub a22: f64,
    pub a33: f64,
    pub photons: f64,
}

pub fn expectations(spectrum: &SectorSpectrum) -> Vec<ExpectationRow> {
    let basis = spectrum.basis();
    let na = basis.atom_count();
    let vecs = spectrum.eigenvectors();
    spectrum
        .eigenvalues()
        .iter()
        .enumerate()
        .map(|(k, &energy)| {
            let mut row = ExpectationRow {
                k,
                energy,
                a11: 0.0,
                a22: 0.0,
                a33: 0.0,
                photons: 0.0,
            };
            for (i, s) in basis.states().iter().enumerate() {
                let w = vecs[(i, k)] * vecs[(i, k)];
                row.a11 += w * s.n1() as f64;
                row.a22 += w * s.n2() as f64;
                row.a33 += w * s.n3(na) as f64;
                row.photons += w * s.nu as f64;
            }
            row
        })
        .collect()
}

/// `P(ν0 + s)` for `s = 0 ..= M − ν0`, with `ν0 = max(0, M − 2N_a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonDistribution {
    pub atom_count: usize,
    pub excitations: usize,
    pub min_photons: usize,
    pub probs: Vec<f64>,
}

impl PhotonDistribution {
    /// `(ν, P(ν))` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(s, &p)| (self.min_photons + s, p))
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Single interior maximum: strictly rising then strictly falling, with
    /// the peak neither at the first nor the last entry. Entries below
    /// `floor` are ignored at the tails.
    pub fn is_unimodal_interior(&self, floor: f64) -> bool {
        let p = &self.probs;
        let Some(lo) = p.iter().position(|&x| x > floor) else {
            return false;
        };
        let hi = p.iter().rposition(|&x| x > floor).unwrap();
        let peak = (lo..=hi)
            .max_by(|&a, &b| p[a].total_cmp(&p[b]))
            .unwrap();
        if peak == 0 || peak == p.len() - 1 || p[peak] >= 1.0 {
            return false;
        }
        (lo..peak).all(|i| p[i] < p[i + 1]) && (peak..hi).all(|i| p[i] > p[i + 1])
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        let n = self.probs.len().max(other.probs.len());
        (0..n)
            .map(|s| {
                let a = self.probs.get(s).copied().unwrap_or(0.0);
                let b = other.probs.get(s).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .sum()
    }
}

pub fn photon_distribution(state: &SectorState, basis: &SectorBasis) -> Result<PhotonDistribution> {
    if state.excitations != basis.excitations() || state.amplitudes.len() != basis.dim() {
        return Err(Error::Consistency(format!(
            "state of sector M={} (len {}) does not match basis M={} (dim {})",
            state.excitations,
            state.amplitudes.len(),
            basis.excitations(),
            basis.dim()
        )));
    }
    state.check_normalized()?;
    let m = basis.excitations();
    let nu0 = basis.min_photons();
    let mut probs = vec![0.0; m - nu0 + 1];
    for (s, a) in basis.states().iter().zip(state.amplitudes.iter()) {
        probs[s.nu - nu0] += a * a;
    }
    Ok(PhotonDistribution {
        atom_count: basis.atom_count(),
        excitations: m,
        min_photons: nu0,
        probs,
    })
}

/// Ground-state photon distribution of sector `M`.
pub fn ground_photon_distribution(params: &ModelParams, excitations: usize) -> Result<PhotonDistribution> {
    let (_, state) = sector_ground(params, excitations)?;
    let basis = SectorBasis::enumerate(params.atom_count(), excitations)?;
    photon_distribution(&state, &basis)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitDistribution {
    pub distribution: PhotonDistribution,
    /// L1 distance to the distribution at half the final `M`.
    pub last_distance: f64,
}

/// Large-`M` limit of the ground-state excess-photon distribution.
///
/// Starts at `M = 4N_a` and doubles `M` until successive distributions are
/// within `tol` in L1 distance.
pub fn photon_distribution_limit(
    params: &ModelParams,
    tol: f64,
    max_doublings: usize,
) -> Result<LimitDistribution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    let mut m = 4 * params.atom_count();
    let mut prev = ground_photon_distribution(params, m)?;
    let mut last_distance = f64::INFINITY;
    for _ in 0..max_doublings {
        m = m.checked_mul(2).ok_or(Error::ConvergenceFailure {
            last_m: m,
            last_distance,
        })?;
        let next = ground_photon_distribution(params, m)?;
        last_distance = next.l1_distance(&prev);
        if last_distance < tol {
            return Ok(LimitDistribution {
                distribution: next,
                last_distance,
            });
        }
        prev = next;
    }
    Err(Error::ConvergenceFailure {
        last_m: m,
        last_distance,
    })
}
