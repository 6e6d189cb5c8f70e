//! Spectrum in the `N_a → ∞` limit.
//!
//! With `Ω = 1`, `ω1 = 0` and double resonance the limit sector matrix is
//! `M·I` minus `μ12` times a two-mode hopping between photons and level-2
//! atoms at fixed `n3`. On the `L = M − 2n3` quanta shared by the two modes
//! the hopping has eigenvalues `L − 2k`, `k = 0..=L`, so every level is an
//! affine function of `μ12`.

use crate::criticality::GridAxis;
use crate::error::{Error, Result};
use crate::hamiltonian::build_thermo_sector;

/// One affine level `E(μ12) = M − μ12·(L − 2k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThermoSpectrumLine {
    pub excitations: usize,
    pub n3: usize,
    pub k: usize,
}

impl ThermoSpectrumLine {
    /// Quanta shared by the field and level 2, `L = M − 2n3`.
    pub fn shared(&self) -> usize {
        self.excitations - 2 * self.n3
    }

    pub fn intercept(&self) -> f64 {
        self.excitations as f64
    }

    pub fn slope(&self) -> f64 {
        -(self.shared() as f64 - 2.0 * self.k as f64)
    }

    pub fn energy(&self, mu12: f64) -> f64 {
        self.intercept() + self.slope() * mu12
    }
}

/// All lines of sector `M`, ordered by `n3`, then `k`.
pub fn thermo_lines(excitations: usize) -> Vec<ThermoSpectrumLine> {
    (0..=excitations / 2)
        .flat_map(|n3| {
            (0..=excitations - 2 * n3).map(move |k| ThermoSpectrumLine { excitations, n3, k })
        })
        .collect()
}

fn check_mu12(mu12: f64) -> Result<()> {
    if mu12.is_finite() && mu12 >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "mu12 must be finite and non-negative, got {mu12}"
        )))
    }
}

/// Closed-form limit spectrum of sector `M`, ascending.
pub fn thermo_spectrum(mu12: f64, excitations: usize) -> Result<Vec<f64>> {
    check_mu12(mu12)?;
    let mut energies: Vec<f64> = thermo_lines(excitations).iter().map(|l| l.energy(mu12)).collect();
    energies.sort_by(f64::total_cmp);
    Ok(energies)
}

/// Limit spectrum of sector `M` by diagonalizing the limit matrix, ascending.
pub fn thermo_spectrum_numeric(mu12: f64, excitations: usize) -> Result<Vec<f64>> {
    let matrix = build_thermo_sector(mu12, excitations)?;
    let mut energies: Vec<f64> = matrix.entries().symmetric_eigenvalues().iter().copied().collect();
    energies.sort_by(f64::total_cmp);
    Ok(energies)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanPoint {
    pub mu12: f64,
    pub excitations: usize,
    pub energy: f64,
}

/// Limit levels of sectors `0..=m_max` sampled along `μ12`; ordered by
/// `μ12`, then `M`, then energy.
pub fn thermo_fan(mu12_axis: GridAxis, m_max: usize) -> Result<Vec<FanPoint>> {
    check_mu12(mu12_axis.lo)?;
    let mut points = Vec::new();
    for i in 0..mu12_axis.count {
        let mu12 = mu12_axis.value(i);
        for excitations in 0..=m_max {
            points.extend(thermo_spectrum(mu12, excitations)?.into_iter().map(|energy| FanPoint {
                mu12,
                excitations,
                energy,
            }));
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapse_at_unit_coupling() {
        assert_eq!(thermo_spectrum(1.0, 3).unwrap(), vec![0.0, 2.0, 2.0, 4.0, 4.0, 6.0]);
        let mut distinct: Vec<f64> = (0..=7).flat_map(|m| thermo_spectrum(1.0, m).unwrap()).collect();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        assert_eq!(&distinct[..3], &[0.0, 2.0, 4.0]);
    }

    #[test]
    fn uncoupled_levels_sit_at_m() {
        for m in 0..10 {
            assert!(thermo_spectrum(0.0, m).unwrap().iter().all(|&e| e == m as f64));
        }
    }

    #[test]
    fn single_excitation_lines() {
        let lines = thermo_lines(1);
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].slope(), -1.0);
        assert_eq!(lines[1].slope(), 1.0);
        assert_eq!(thermo_lines(0).len(), 1);
        assert_eq!(thermo_lines(0)[0].slope(), 0.0);
    }

    #[test]
    fn even_integer_at_unit_coupling() {
        for m in 0..12 {
            for line in thermo_lines(m) {
                let e = line.energy(1.0);
                assert_eq!(e, (2 * line.n3 + 2 * line.k) as f64);
            }
        }
    }

    #[test]
    fn numeric_matches_closed_form() {
        for m in 0..=12 {
            for mu in [0.0, 0.3, 1.0, 1.7, 3.0] {
                let a = thermo_spectrum(mu, m).unwrap();
                let b = thermo_spectrum_numeric(mu, m).unwrap();
                assert_eq!(a.len(), b.len());
                for (x, y) in a.iter().zip(&b) {
                    assert!((x - y).abs() < 1e-10, "M={m} mu={mu}: {x} vs {y}");
                }
            }
        }
    }

    #[test]
    fn fan_ordering() {
        let fan = thermo_fan(GridAxis::new(0.0, 2.0, 3).unwrap(), 2).unwrap();
        // 1 + 2 + 4 levels per μ12 sample
        assert_eq!(fan.len(), 3 * 7);
        assert_eq!(fan[0], FanPoint { mu12: 0.0, excitations: 0, energy: 0.0 });
        assert!(thermo_spectrum(-1.0, 2).is_err());
    }
}
