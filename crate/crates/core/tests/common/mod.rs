//! Oracles shared by the integration tests. Nothing here reuses the sector
//! matrix elements of the library.
#![allow(dead_code)]

use nalgebra::DMatrix;
use xi_ladder::ModelParams;

pub const SQRT2: f64 = std::f64::consts::SQRT_2;

pub fn triple_point(na: usize) -> ModelParams {
    ModelParams::double_resonance(1.0, na)
        .unwrap()
        .with_couplings(1.0, SQRT2)
        .unwrap()
}

fn annihilation(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { (j as f64).sqrt() } else { 0.0 })
}

fn number(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| if i == j { i as f64 } else { 0.0 })
}

fn kron4(ops: [&DMatrix<f64>; 4]) -> DMatrix<f64> {
    ops[0].kronecker(ops[1]).kronecker(ops[2]).kronecker(ops[3])
}

/// Field mode truncated at `nu_cut` photons times one bosonic mode per atomic
/// level, each holding up to `N_a` atoms. Collective operators are
/// `A_ij = b_i† b_j`.
pub struct FullSpace {
    pub hamiltonian: DMatrix<f64>,
    /// Diagonal of the excitation and atom-number operators.
    pub excitations: Vec<f64>,
    pub atoms: Vec<f64>,
}

pub fn full_space(params: &ModelParams, nu_cut: usize) -> FullSpace {
    let na = params.atom_count();
    let (p, b) = (nu_cut + 1, na + 1);
    let (ip, ib) = (DMatrix::<f64>::identity(p, p), DMatrix::<f64>::identity(b, b));
    let a = annihilation(p);
    let bl = annihilation(b);
    let bd = bl.transpose();

    let photons = kron4([&number(p), &ib, &ib, &ib]);
    let nb = number(b);
    let level = |k: usize| {
        let mut ops = [&ip, &ib, &ib, &ib];
        ops[k + 1] = &nb;
        kron4(ops)
    };
    let (n1, n2, n3) = (level(0), level(1), level(2));

    // a A21 = a b2† b1 and a A32 = a b3† b2
    let a21 = kron4([&a, &bl, &bd, &ib]);
    let a32 = kron4([&a, &ib, &bl, &bd]);

    let [w1, w2, w3] = params.level_freqs();
    let g = 1.0 / (na as f64).sqrt();
    let hamiltonian = &photons * params.field_freq() + &n1 * w1 + &n2 * w2 + &n3 * w3
        - (&a21 + a21.transpose()) * (g * params.mu12())
        - (&a32 + a32.transpose()) * (g * params.mu23());
    let excitation_op = &photons + &n2 + &n3 * 2.0;
    let atoms_op = &n1 + &n2 + &n3;
    FullSpace {
        excitations: excitation_op.diagonal().iter().copied().collect(),
        atoms: atoms_op.diagonal().iter().copied().collect(),
        hamiltonian,
    }
}

impl FullSpace {
    /// `max |[H, M_op]|`.
    pub fn commutator_norm(&self) -> f64 {
        // M_op is diagonal, so [H, M_op]_ij = H_ij (m_j − m_i)
        let h = &self.hamiltonian;
        let m = &self.excitations;
        let mut worst = 0.0_f64;
        for j in 0..h.ncols() {
            for i in 0..h.nrows() {
                worst = worst.max((h[(i, j)] * (m[j] - m[i])).abs());
            }
        }
        worst
    }

    /// Sorted eigenvalues of the block with `N_a` atoms and `M` excitations.
    pub fn block_spectrum(&self, na: usize, m: usize) -> Vec<f64> {
        let idx: Vec<usize> = (0..self.atoms.len())
            .filter(|&i| self.atoms[i] == na as f64 && self.excitations[i] == m as f64)
            .collect();
        let block = DMatrix::from_fn(idx.len(), idx.len(), |i, j| self.hamiltonian[(idx[i], idx[j])]);
        let mut e: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// Ground energy of the `M = 2` sector in double resonance (`Ω = 1`,
/// `ω1 = 0`). The four states form a star around the state with one
/// level-2 atom and one photon, so the lowest level is `2 − √Σw²`.
pub fn star_ground_m2(mu12: f64, mu23: f64, na: usize) -> f64 {
    let n = na as f64;
    let weights = 2.0 * mu12 * mu12 + 2.0 * mu12 * mu12 * (n - 1.0) / n + mu23 * mu23 / n;
    2.0 - weights.sqrt()
}

/// Ground energy of the `M = 1` sector in double resonance: a 2×2 block
/// with diagonal 1 and coupling `μ12`.
pub fn m1_ground(mu12: f64) -> f64 {
    1.0 - mu12
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
