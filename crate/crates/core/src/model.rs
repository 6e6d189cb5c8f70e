//! Physical parameters of the ladder atom-field Hamiltonian.
//!
//! Energies are measured in units of the field frequency and the lowest
//! atomic level sits at zero unless stated otherwise. In that gauge the
//! diagonal of every double-resonance sector equals the excitation number.

use crate::error::{Error, Result};

/// Field frequency, level frequencies, couplings and atom count.
///
/// Couplings are stored without the `1/sqrt(N_a)` factor; it is applied at
/// matrix assembly. Negative couplings are rejected: the Hamiltonian is
/// invariant under `a -> -a`, so only the non-negative quadrant is physical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    field_freq: f64,
    level_freqs: [f64; 3],
    mu12: f64,
    mu23: f64,
    atom_count: usize,
}

/// Atom-field detunings `Δ21 = ω2 − ω1 − Ω` and `Δ32 = ω3 − ω2 − Ω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detunings {
    pub d21: f64,
    pub d32: f64,
}

impl ModelParams {
    pub fn new(
        field_freq: f64,
        level_freqs: [f64; 3],
        mu12: f64,
        mu23: f64,
        atom_count: usize,
    ) -> Result<Self> {
        if !(field_freq.is_finite() && field_freq > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "field frequency must be positive, got {field_freq}"
            )));
        }
        if atom_count == 0 {
            return Err(Error::InvalidParameter("atom count must be at least 1".into()));
        }
        let [w1, w2, w3] = level_freqs;
        if !(w1.is_finite() && w2.is_finite() && w3.is_finite()) {
            return Err(Error::InvalidParameter("level frequencies must be finite".into()));
        }
        if !(w1 <= w2 && w2 <= w3) {
            return Err(Error::InvalidParameter(format!(
                "level frequencies must satisfy w1 <= w2 <= w3, got ({w1}, {w2}, {w3})"
            )));
        }
        check_coupling("mu12", mu12)?;
        check_coupling("mu23", mu23)?;
        Ok(Self {
            field_freq,
            level_freqs,
            mu12,
            mu23,
            atom_count,
        })
    }

    /// Both transitions resonant with the field: `ω = (0, Ω, 2Ω)`, couplings zero.
    pub fn double_resonance(field_freq: f64, atom_count: usize) -> Result<Self> {
        Self::new(
            field_freq,
            [0.0, field_freq, 2.0 * field_freq],
            0.0,
            0.0,
            atom_count,
        )
    }

    pub fn with_couplings(self, mu12: f64, mu23: f64) -> Result<Self> {
        Self::new(self.field_freq, self.level_freqs, mu12, mu23, self.atom_count)
    }

    pub fn with_atom_count(self, atom_count: usize) -> Result<Self> {
        Self::new(self.field_freq, self.level_freqs, self.mu12, self.mu23, atom_count)
    }

    pub fn with_level_freqs(self, level_freqs: [f64; 3]) -> Result<Self> {
        Self::new(self.field_freq, level_freqs, self.mu12, self.mu23, self.atom_count)
    }

    pub fn field_freq(&self) -> f64 {
        self.field_freq
    }

    pub fn level_freqs(&self) -> [f64; 3] {
        self.level_freqs
    }

    pub fn mu12(&self) -> f64 {
        self.mu12
    }

    pub fn mu23(&self) -> f64 {
        self.mu23
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn detunings(&self) -> Detunings {
        let [w1, w2, w3] = self.level_freqs;
        Detunings {
            d21: w2 - w1 - self.field_freq,
            d32: w3 - w2 - self.field_freq,
        }
    }

    pub fn is_double_resonance(&self) -> bool {
        let d = self.detunings();
        d.d21 == 0.0 && d.d32 == 0.0
    }

    /// Centre of the mirror-symmetric sector spectrum, `Ω·M + N_a·ω1`.
    pub fn mirror_axis(&self, excitations: usize) -> f64 {
        self.field_freq * excitations as f64 + self.atom_count as f64 * self.level_freqs[0]
    }
}

fn check_coupling(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and non-negative, got {value}"
        )))
    }
}
