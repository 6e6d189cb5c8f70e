//! Sector diagonalization, global ground state search, degeneracy counts
//! and mirror pairing of double-resonance spectra.

use nalgebra::{DMatrix, DVector};

use crate::basis::SectorBasis;
use crate::error::{Error, Result};
use crate::hamiltonian::{sector_matrix, SectorCache, SectorMatrix, SectorOperators};
use crate::linalg::{largest_eigenvalue, smallest_eigenvalue};
use crate::model::ModelParams;

/// Energies closer than this are treated as a crossing when picking the
/// ground sector; the smaller `M` wins.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub const DEGENERACY_TOLERANCE: f64 = 1e-8;

/// Mirror pairs deviating from `E_k + E_k' = 2·axis` by more than this are flagged.
pub const MIRROR_TOLERANCE: f64 = 1e-9;

/// Full spectral decomposition of one sector.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    basis: SectorBasis,
    params: ModelParams,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SectorSpectrum {
    pub fn excitations(&self) -> usize {
        self.basis.excitations()
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal columns aligned with [`Self::eigenvalues`].
    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn state(&self, k: usize) -> SectorState {
        SectorState {
            excitations: self.excitations(),
            amplitudes: self.eigenvectors.column(k).into_owned(),
        }
    }
}

/// A vector living in one excitation sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorState {
    pub excitations: usize,
    pub amplitudes: DVector<f64>,
}

impl SectorState {
    /// Fails unless `‖v‖` is within `1e-8` of one.
    pub fn check_normalized(&self) -> Result<()> {
        let norm = self.amplitudes.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidState(format!(
                "state in sector M={} has norm {norm}",
                self.excitations
            )));
        }
        Ok(())
    }
}

/// Symmetric eigendecomposition with ascending eigenvalues and the sign of
/// each eigenvector fixed so its largest-magnitude component is positive
/// (first such component on ties).
pub fn eigh(matrix: &DMatrix<f64>, sector: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let dim = matrix.nrows();
    let max_iter = 1000 * dim.max(1);
    let eig = nalgebra::SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, max_iter)
        .ok_or(Error::NumericalFailure { sector })?;
    if eig.eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::NumericalFailure { sector });
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        let mut pivot = 0;
        for i in 1..dim {
            if col[i].abs() > col[pivot].abs() + 1e-12 {
                pivot = i;
            }
        }
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok((values, vectors))
}

pub fn diagonalize(matrix: &SectorMatrix) -> Result<SectorSpectrum> {
    let (eigenvalues, eigenvectors) = eigh(matrix.entries(), matrix.excitations())?;
    Ok(SectorSpectrum {
        basis: matrix.basis().clone(),
        params: *matrix.params(),
        eigenvalues,
        eigenvectors,
    })
}

pub fn sector_spectrum(params: &ModelParams, excitations: usize) -> Result<SectorSpectrum> {
    diagonalize(&sector_matrix(params, excitations)?)
}

/// Lowest eigenpair of sector `M`.
pub fn sector_ground(params: &ModelParams, excitations: usize) -> Result<(f64, SectorState)> {
    let spectrum = sector_spectrum(params, excitations)?;
    Ok((spectrum.eigenvalues[0], spectrum.state(0)))
}

pub fn sector_ground_energy(params: &ModelParams, excitations: usize) -> Result<f64> {
    let ops = SectorOperators::new(params, excitations)?;
    Ok(operators_ground_energy(&ops, params.mu12(), params.mu23()))
}

/// Lowest eigenvalue of `D + μ12·X12 + μ23·X23`. With a constant diagonal
/// `c` the spectrum is `c ± σ(B)` for the even/odd parity block `B`, so only
/// the largest singular value is needed.
pub fn operators_ground_energy(ops: &SectorOperators, mu12: f64, mu23: f64) -> f64 {
    if let Some(c) = ops.constant_diagonal() {
        let b = ops.parity_block(mu12, mu23);
        if b.nrows() == 0 || b.ncols() == 0 {
            return c;
        }
        let gram = if b.nrows() <= b.ncols() {
            &b * b.transpose()
        } else {
            b.transpose() * &b
        };
        return c - largest_eigenvalue(&gram).max(0.0).sqrt();
    }
    smallest_eigenvalue(&ops.assemble(mu12, mu23))
}

/// How far the ground-state scan over `M` may go and when it may stop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MmaxPolicy {
    /// Largest sector scanned.
    pub hard_cap: usize,
    /// Stop after this many consecutive strict rises of `E0(M)` above the
    /// running minimum.
    pub rise_window: usize,
}

impl MmaxPolicy {
    pub fn for_atoms(atom_count: usize) -> Self {
        Self {
            hard_cap: (3 * (atom_count + 1)).max(24),
            rise_window: 5,
        }
    }

    pub fn with_cap(self, hard_cap: usize) -> Self {
        Self { hard_cap, ..self }
    }
}

#[derive(Debug, Clone)]
pub struct GroundStateRecord {
    pub winning_m: usize,
    pub energy: f64,
    pub state: SectorState,
    /// `(M, E0(M))` for every sector scanned, in order.
    pub per_sector_minima: Vec<(usize, f64)>,
    pub m_max_used: usize,
}

fn pick_winner(minima: &[(usize, f64)]) -> usize {
    let best = minima.iter().map(|&(_, e)| e).fold(f64::INFINITY, f64::min);
    minima
        .iter()
        .find(|&&(_, e)| e <= best + TIE_TOLERANCE)
        .map(|&(m, _)| m)
        .expect("at least one sector scanned")
}

/// Scans `M = 0, 1, 2, …` for the global ground state.
///
/// Fails with [`Error::IncompleteScan`] when the cap is reached and the
/// running minimum sits inside the last `rise_window` sectors, i.e. the
/// upturn of `E0(M)` has not been observed.
pub fn global_ground(params: &ModelParams, policy: MmaxPolicy) -> Result<GroundStateRecord> {
    let cache = SectorCache::new(params, policy.hard_cap + 1);
    scan_ground(&cache, params, policy, 0)
}

/// [`global_ground`], doubling the cap on incomplete scans up to
/// `max_doublings` times.
pub fn global_ground_adaptive(
    params: &ModelParams,
    policy: MmaxPolicy,
    max_doublings: usize,
) -> Result<GroundStateRecord> {
    let cache = SectorCache::new(params, policy.hard_cap + 1);
    scan_ground(&cache, params, policy, max_doublings)
}

/// Ground-state scan reusing sector operators from `cache`. An incomplete
/// scan extends the cap in place (doubling) up to `max_doublings` times;
/// the result is the same as restarting with the larger cap.
pub fn scan_ground(
    cache: &SectorCache,
    params: &ModelParams,
    policy: MmaxPolicy,
    max_doublings: usize,
) -> Result<GroundStateRecord> {
    if !cache.accepts(params) {
        return Err(Error::Consistency(
            "sector cache was built for different frequencies or atom count".into(),
        ));
    }
    let (mu12, mu23) = (params.mu12(), params.mu23());
    let mut cap = policy.hard_cap;
    let mut doublings = 0;
    let mut minima: Vec<(usize, f64)> = Vec::new();
    let mut running_min = f64::INFINITY;
    let mut argmin = 0;
    let mut rises = 0;
    let mut m = 0;
    let complete = loop {
        if m > cap {
            if m - 1 - argmin >= policy.rise_window {
                break true;
            }
            if doublings < max_doublings {
                cap = 2 * cap.max(1);
                doublings += 1;
            } else {
                break false;
            }
        }
        let e0 = operators_ground_energy(&*cache.operators(m)?, mu12, mu23);
        if let Some(&(_, prev)) = minima.last() {
            if e0 > prev && e0 > running_min + TIE_TOLERANCE {
                rises += 1;
            } else {
                rises = 0;
            }
        }
        if e0 < running_min - TIE_TOLERANCE {
            argmin = m;
        }
        running_min = running_min.min(e0);
        minima.push((m, e0));
        if rises >= policy.rise_window {
            break true;
        }
        m += 1;
    };

    let m_max_used = minima.last().map(|&(m, _)| m).unwrap_or(0);
    let winning_m = pick_winner(&minima);
    let ops = cache.operators(winning_m)?;
    let (values, vectors) = eigh(&ops.assemble(mu12, mu23), winning_m)?;
    let record = GroundStateRecord {
        winning_m,
        energy: values[0],
        state: SectorState {
            excitations: winning_m,
            amplitudes: vectors.column(0).into_owned(),
        },
        per_sector_minima: minima,
        m_max_used,
    };
    if complete {
        Ok(record)
    } else {
        Err(Error::IncompleteScan {
            cap,
            partial: Box::new(record),
        })
    }
}

/// Number of eigenvalues within `tol` of the mirror axis (`E = M` in the
/// default gauge).
pub fn degeneracy_at_em(params: &ModelParams, excitations: usize, tol: f64) -> Result<usize> {
    let spectrum = sector_spectrum(params, excitations)?;
    let axis = params.mirror_axis(excitations);
    Ok(spectrum
        .eigenvalues
        .iter()
        .filter(|e| (*e - axis).abs() <= tol)
        .count())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorPair {
    pub k: usize,
    pub mirror: usize,
    /// `|E_k + E_mirror − 2·axis|`.
    pub deviation: f64,
    pub flagged: bool,
}

/// Pairs sorted-spectrum index `k` (0-based) with `dim − 1 − k`. The middle
/// state of an odd-dimensional sector pairs with itself.
pub fn mirror_pairs(spectrum: &SectorSpectrum) -> Vec<MirrorPair> {
    let dim = spectrum.dim();
    let axis = spectrum.params.mirror_axis(spectrum.excitations());
    (0..dim.div_ceil(2))
        .map(|k| {
            let mirror = dim - 1 - k;
            let deviation =
                (spectrum.eigenvalues[k] + spectrum.eigenvalues[mirror] - 2.0 * axis).abs();
            MirrorPair {
                k,
                mirror,
                deviation,
                flagged: deviation > MIRROR_TOLERANCE,
            }
        })
        .collect()
}
