//! Dense sector matrices of the ladder Hamiltonian
//!
//! `H = Ω a†a + Σ ωi Aii − (1/√N_a)[μ12(a A21 + a† A12) + μ23(a A32 + a† A23)]`
//!
//! with the collective operators realized in the fully symmetric
//! three-mode representation, `Aij` hopping one atom from level `j` to `i`
//! with amplitude `√(n_j (n_i + 1))`.

use std::borrow::Cow;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::basis::{BasisState, SectorBasis};
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Real symmetric matrix of one excitation sector.
#[derive(Debug, Clone)]
pub struct SectorMatrix {
    basis: SectorBasis,
    entries: DMatrix<f64>,
    params: ModelParams,
}

impl SectorMatrix {
    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn excitations(&self) -> usize {
        self.basis.excitations()
    }

    pub fn into_parts(self) -> (SectorBasis, DMatrix<f64>, ModelParams) {
        (self.basis, self.entries, self.params)
    }
}

/// Diagonal energy `Ων + ω1 n1 + ω2 n2 + ω3 n3` of a basis state.
pub fn diagonal_energy(params: &ModelParams, state: &BasisState) -> f64 {
    let na = params.atom_count();
    let [w1, w2, w3] = params.level_freqs();
    params.field_freq() * state.nu as f64
        + w1 * state.n1() as f64
        + w2 * state.n2() as f64
        + w3 * state.n3(na) as f64
}

/// Assembles the sector matrix. Off-diagonal pairs are written together so
/// the result is exactly symmetric.
pub fn build_sector(params: &ModelParams, basis: SectorBasis) -> Result<SectorMatrix> {
    let na = params.atom_count();
    if basis.atom_count() != na {
        return Err(Error::Consistency(format!(
            "basis built for N_a={} but parameters have N_a={na}",
            basis.atom_count()
        )));
    }
    let dim = basis.dim();
    let mut h = DMatrix::zeros(dim, dim);
    let inv_sqrt_na = 1.0 / (na as f64).sqrt();
    let g12 = params.mu12() * inv_sqrt_na;
    let g23 = params.mu23() * inv_sqrt_na;

    for (j, s) in basis.states().iter().enumerate() {
        h[(j, j)] = diagonal_energy(params, s);
        if s.nu == 0 {
            continue;
        }
        let nu = s.nu as f64;
        // a A21: one photon absorbed, one atom 1 -> 2.
        if s.r >= 1 {
            let target = BasisState { nu: s.nu - 1, q: s.q, r: s.r - 1 };
            if let Some(i) = basis.index_of(&target) {
                let amp = (nu * s.r as f64 * (s.n2() + 1) as f64).sqrt();
                let v = -g12 * amp;
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        // a A32: one photon absorbed, one atom 2 -> 3.
        if s.n2() >= 1 {
            let target = BasisState { nu: s.nu - 1, q: s.q - 1, r: s.r };
            if let Some(i) = basis.index_of(&target) {
                let amp = (nu * s.n2() as f64 * (na - s.q + 1) as f64).sqrt();
                let v = -g23 * amp;
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
    }
    Ok(SectorMatrix {
        basis,
        entries: h,
        params: *params,
    })
}

/// Convenience wrapper: enumerate the basis and assemble.
pub fn sector_matrix(params: &ModelParams, excitations: usize) -> Result<SectorMatrix> {
    let basis = SectorBasis::enumerate(params.atom_count(), excitations)?;
    build_sector(params, basis)
}

/// Coupling-independent pieces of one sector, `H = D + μ12·X12 + μ23·X23`,
/// with the off-diagonal parts also split by photon parity (the interaction
/// only links even-`ν` states to odd-`ν` states).
#[derive(Debug, Clone)]
pub struct SectorOperators {
    basis: SectorBasis,
    diagonal: Vec<f64>,
    x12: DMatrix<f64>,
    x23: DMatrix<f64>,
    /// Even-`ν` rows × odd-`ν` columns of `X12` and `X23`.
    b12: DMatrix<f64>,
    b23: DMatrix<f64>,
}

impl SectorOperators {
    pub fn new(params: &ModelParams, excitations: usize) -> Result<Self> {
        let basis = SectorBasis::enumerate(params.atom_count(), excitations)?;
        let bare = build_sector(&params.with_couplings(0.0, 0.0)?, basis.clone())?;
        let diagonal = bare.entries().diagonal().as_slice().to_vec();
        let x12 = build_sector(&params.with_couplings(1.0, 0.0)?, basis.clone())?.entries
            - bare.entries();
        let x23 = build_sector(&params.with_couplings(0.0, 1.0)?, basis.clone())?.entries
            - bare.entries();
        let (even, odd): (Vec<usize>, Vec<usize>) =
            (0..basis.dim()).partition(|&i| basis.states()[i].nu % 2 == 0);
        let b12 = x12.select_rows(&even).select_columns(&odd);
        let b23 = x23.select_rows(&even).select_columns(&odd);
        Ok(Self {
            basis,
            diagonal,
            x12,
            x23,
            b12,
            b23,
        })
    }

    pub fn basis(&self) -> &SectorBasis {
        &self.basis
    }

    pub fn assemble(&self, mu12: f64, mu23: f64) -> DMatrix<f64> {
        let mut h = &self.x12 * mu12 + &self.x23 * mu23;
        for (i, d) in self.diagonal.iter().enumerate() {
            h[(i, i)] = *d;
        }
        h
    }

    /// The common diagonal value when every diagonal entry is identical
    /// (double resonance in a gauge where it is exactly representable).
    pub fn constant_diagonal(&self) -> Option<f64> {
        let first = *self.diagonal.first()?;
        self.diagonal.iter().all(|&d| d == first).then_some(first)
    }

    /// Even-by-odd coupling block `B` of `H − D`.
    pub fn parity_block(&self, mu12: f64, mu23: f64) -> DMatrix<f64> {
        &self.b12 * mu12 + &self.b23 * mu23
    }
}

/// Lazily built [`SectorOperators`] for `M < capacity`, shared across
/// coupling values. Field and level frequencies and the atom count are
/// fixed by the base parameters.
#[derive(Debug)]
pub struct SectorCache {
    base: ModelParams,
    slots: Vec<OnceLock<SectorOperators>>,
}

impl SectorCache {
    pub fn new(base: &ModelParams, capacity: usize) -> Self {
        Self {
            base: *base,
            slots: (0..capacity).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn base(&self) -> &ModelParams {
        &self.base
    }

    /// True when `params` differ from the base at most in the couplings.
    pub fn accepts(&self, params: &ModelParams) -> bool {
        params.atom_count() == self.base.atom_count()
            && params.field_freq() == self.base.field_freq()
            && params.level_freqs() == self.base.level_freqs()
    }

    pub fn operators(&self, excitations: usize) -> Result<Cow<'_, SectorOperators>> {
        match self.slots.get(excitations) {
            Some(slot) => {
                if let Some(ops) = slot.get() {
                    return Ok(Cow::Borrowed(ops));
                }
                let ops = SectorOperators::new(&self.base, excitations)?;
                Ok(Cow::Borrowed(slot.get_or_init(|| ops)))
            }
            None => Ok(Cow::Owned(SectorOperators::new(&self.base, excitations)?)),
        }
    }
}

/// State `(ν, n2, n3)` of the infinite-atom sector; level 1 is an
/// unbounded reservoir.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LimitState {
    pub nu: usize,
    pub n2: usize,
    pub n3: usize,
}

/// Sector matrix in the `N_a → ∞` limit (gauge `Ω = 1`, `ω1 = 0`, double
/// resonance). The `μ23` term scales as `1/√N_a` and drops out.
#[derive(Debug, Clone)]
pub struct LimitSectorMatrix {
    excitations: usize,
    states: Vec<LimitState>,
    entries: DMatrix<f64>,
}

impl LimitSectorMatrix {
    pub fn excitations(&self) -> usize {
        self.excitations
    }

    pub fn states(&self) -> &[LimitState] {
        &self.states
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }
}

pub fn build_thermo_sector(mu12: f64, excitations: usize) -> Result<LimitSectorMatrix> {
    if !(mu12.is_finite() && mu12 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "mu12 must be finite and non-negative, got {mu12}"
        )));
    }
    let mut states = Vec::new();
    for n3 in 0..=excitations / 2 {
        for n2 in 0..=(excitations - 2 * n3) {
            states.push(LimitState {
                nu: excitations - n2 - 2 * n3,
                n2,
                n3,
            });
        }
    }
    states.sort_unstable_by(|a, b| b.cmp(a));
    let dim = states.len();
    let mut h = DMatrix::from_diagonal_element(dim, dim, excitations as f64);
    for (j, s) in states.iter().enumerate() {
        if s.nu == 0 {
            continue;
        }
        let target = LimitState {
            nu: s.nu - 1,
            n2: s.n2 + 1,
            n3: s.n3,
        };
        let i = states
            .binary_search_by(|x| target.cmp(x))
            .expect("limit basis is closed under photon absorption");
        let v = -mu12 * (s.nu as f64 * (s.n2 + 1) as f64).sqrt();
        h[(i, j)] = v;
        h[(j, i)] = v;
    }
    Ok(LimitSectorMatrix {
        excitations,
        states,
        entries: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn dr(na: usize, mu12: f64, mu23: f64) -> ModelParams {
        ModelParams::double_resonance(1.0, na)
            .unwrap()
            .with_couplings(mu12, mu23)
            .unwrap()
    }

    #[test]
    fn one_excitation_block() {
        for mu12 in [0.0, 0.3, 1.7] {
            let h = sector_matrix(&dr(2, mu12, 0.9), 1).unwrap();
            let states = h.basis().states();
            assert_eq!(states[0], BasisState { nu: 1, q: 2, r: 2 });
            assert_eq!(states[1], BasisState { nu: 0, q: 2, r: 1 });
            let e = h.entries();
            assert_eq!(e[(0, 0)], 1.0);
            assert_eq!(e[(1, 1)], 1.0);
            assert!((e[(0, 1)] + mu12).abs() < 1e-15);
            assert_eq!(e[(0, 1)], e[(1, 0)]);
        }
    }

    #[test]
    fn uncoupled_is_diagonal() {
        let p = ModelParams::new(1.0, [0.0, 1.3, 2.1], 0.0, 0.0, 3).unwrap();
        let h = sector_matrix(&p, 5).unwrap();
        for (i, s) in h.basis().states().iter().enumerate() {
            for j in 0..h.basis().dim() {
                if i == j {
                    let want = s.nu as f64 + 1.3 * s.n2() as f64 + 2.1 * s.n3(3) as f64;
                    assert!((h.entries()[(i, i)] - want).abs() < 1e-14);
                } else {
                    assert_eq!(h.entries()[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn two_excitation_star_at_triple_point() {
        let h = sector_matrix(&dr(2, 1.0, SQRT2), 2).unwrap();
        let e = h.entries();
        // order: (2,2,2), (1,2,1), (0,2,0), (0,1,1); centre is index 1
        for i in 0..4 {
            assert!((e[(i, i)] - 2.0).abs() < 1e-15);
        }
        assert!((e[(0, 1)] + SQRT2).abs() < 1e-14);
        assert!((e[(1, 2)] + 1.0).abs() < 1e-14);
        assert!((e[(1, 3)] + 1.0).abs() < 1e-14);
        assert_eq!(e[(0, 2)], 0.0);
        assert_eq!(e[(0, 3)], 0.0);
        assert_eq!(e[(2, 3)], 0.0);
    }

    #[test]
    fn structural_invariants() {
        for (na, m) in [(1, 3), (2, 5), (4, 7), (5, 12)] {
            let h = sector_matrix(&dr(na, 0.8, 1.9), m).unwrap();
            let e = h.entries();
            let states = h.basis().states();
            for i in 0..states.len() {
                for j in 0..states.len() {
                    assert_eq!(e[(i, j)], e[(j, i)]);
                    if i != j && e[(i, j)] != 0.0 {
                        assert_eq!(states[i].nu.abs_diff(states[j].nu), 1);
                        assert!(e[(i, j)] < 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn couplings_scale_off_diagonal() {
        let a = sector_matrix(&dr(3, 0.7, 1.1), 6).unwrap();
        for c in [0.5, 2.0, 3.3] {
            let b = sector_matrix(&dr(3, 0.7 * c, 1.1 * c), 6).unwrap();
            let (ea, eb) = (a.entries(), b.entries());
            for i in 0..ea.nrows() {
                for j in 0..ea.ncols() {
                    if i == j {
                        assert_eq!(ea[(i, j)], eb[(i, j)]);
                    } else {
                        assert!((eb[(i, j)] - c * ea[(i, j)]).abs() <= 1e-15 * ea[(i, j)].abs().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn mismatched_atom_count() {
        let basis = SectorBasis::enumerate(3, 2).unwrap();
        assert!(matches!(
            build_sector(&dr(2, 1.0, 1.0), basis),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn limit_sector_small_cases() {
        let h = build_thermo_sector(0.7, 0).unwrap();
        assert_eq!(h.entries().shape(), (1, 1));
        assert_eq!(h.entries()[(0, 0)], 0.0);

        let h = build_thermo_sector(0.7, 1).unwrap();
        let e = h.entries();
        assert_eq!(e.shape(), (2, 2));
        assert_eq!(e[(0, 0)], 1.0);
        assert_eq!(e[(1, 1)], 1.0);
        assert!((e[(0, 1)] + 0.7).abs() < 1e-15);

        assert!(build_thermo_sector(-1.0, 3).is_err());
        assert_eq!(build_thermo_sector(1.0, 3).unwrap().states().len(), 6);
    }
}
