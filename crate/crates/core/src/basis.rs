//! Collective basis `|ν; q, r⟩` of one excitation sector.
//!
//! `ν` counts photons, `r`, `q − r` and `N_a − q` are the populations of
//! levels 1, 2 and 3. A state belongs to sector `M` when
//! `ν + (q − r) + 2(N_a − q) = M`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisState {
    pub nu: usize,
    pub q: usize,
    pub r: usize,
}

impl BasisState {
    pub fn n1(&self) -> usize {
        self.r
    }

    pub fn n2(&self) -> usize {
        self.q - self.r
    }

    pub fn n3(&self, atom_count: usize) -> usize {
        atom_count - self.q
    }

    /// Column label used in CSV headers, e.g. `nu2_q2_r1`.
    pub fn label(&self) -> String {
        format!("nu{}_q{}_r{}", self.nu, self.q, self.r)
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}; {}, {}>", self.nu, self.q, self.r)
    }
}

/// Ordered states of one `(N_a, M)` sector with the inverse index map.
///
/// Order is descending `ν`, then descending `q`, then descending `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    atom_count: usize,
    excitations: usize,
    states: Vec<BasisState>,
    index: HashMap<BasisState, usize>,
}

impl SectorBasis {
    pub fn enumerate(atom_count: usize, excitations: usize) -> Result<Self> {
        if atom_count == 0 {
            return Err(Error::InvalidParameter("atom count must be at least 1".into()));
        }
        let mut states = Vec::with_capacity(sector_dimension(atom_count, excitations)?);
        // loop over the populations that cost excitations so that the work
        // is independent of N_a when M is small
        for n3 in 0..=atom_count.min(excitations / 2) {
            let q = atom_count - n3;
            for n2 in 0..=q.min(excitations - 2 * n3) {
                states.push(BasisState {
                    nu: excitations - n2 - 2 * n3,
                    q,
                    r: q - n2,
                });
            }
        }
        states.sort_unstable_by(|a, b| b.cmp(a));
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Ok(Self {
            atom_count,
            excitations,
            states,
            index,
        })
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn excitations(&self) -> usize {
        self.excitations
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Minimum photon number in the sector, `max(0, M − 2N_a)`.
    pub fn min_photons(&self) -> usize {
        self.excitations.saturating_sub(2 * self.atom_count)
    }

    /// `|#even ν − #odd ν|`. The interaction only links opposite photon
    /// parities, so this is a lower bound on the multiplicity of `E = M`
    /// in double resonance.
    pub fn parity_imbalance(&self) -> usize {
        let even = self.states.iter().filter(|s| s.nu % 2 == 0).count();
        even.abs_diff(self.states.len() - even)
    }
}

/// Sector dimension by counting `(n2, n3)` pairs, without building the basis.
pub fn sector_dimension(atom_count: usize, excitations: usize) -> Result<usize> {
    if atom_count == 0 {
        return Err(Error::InvalidParameter("atom count must be at least 1".into()));
    }
    let n3_max = atom_count.min(excitations / 2);
    Ok((0..=n3_max)
        .map(|n3| (atom_count - n3).min(excitations - 2 * n3) + 1)
        .sum())
}
