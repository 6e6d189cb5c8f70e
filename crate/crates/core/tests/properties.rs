mod common;

use proptest::prelude::*;

use common::triple_point;
use xi_ladder::criticality::{fidelity, susceptibility};
use xi_ladder::observables::{expectations, photon_distribution};
use xi_ladder::spectra::{sector_ground, sector_spectrum};
use xi_ladder::thermo::{thermo_lines, thermo_spectrum_numeric};
use xi_ladder::{sector_dimension, sector_matrix, thermo_spectrum, ModelParams, SectorBasis};

fn params() -> impl Strategy<Value = ModelParams> {
    (0.2..3.0f64, 0.0..2.0f64, 0.0..2.0f64, 0.0..3.0f64, 0.0..3.0f64, 1usize..6).prop_map(
        |(omega, w2, gap, mu12, mu23, na)| ModelParams::new(omega, [0.0, w2, w2 + gap], mu12, mu23, na).unwrap(),
    )
}

fn resonant() -> impl Strategy<Value = ModelParams> {
    (0.0..3.0f64, 0.0..3.0f64, 1usize..7).prop_map(|(mu12, mu23, na)| {
        ModelParams::double_resonance(1.0, na)
            .unwrap()
            .with_couplings(mu12, mu23)
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn detunings_follow_definition(omega in 0.1..3.0f64, w in proptest::array::uniform3(0.0..5.0f64)) {
        let mut w = w;
        w.sort_by(f64::total_cmp);
        let p = ModelParams::new(omega, w, 0.0, 0.0, 1).unwrap();
        let d = p.detunings();
        prop_assert_eq!(d.d21, w[1] - w[0] - omega);
        prop_assert_eq!(d.d32, w[2] - w[1] - omega);
    }

    #[test]
    fn eigenpairs_are_orthonormal(p in params(), m in 0usize..10) {
        let h = sector_matrix(&p, m).unwrap();
        let s = sector_spectrum(&p, m).unwrap();
        let v = s.eigenvectors();
        let scale = h.entries().amax().max(1.0);
        let e = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(s.eigenvalues()));
        prop_assert!((h.entries() * v - v * e).amax() < 1e-11 * scale);
        let gram = v.transpose() * v - nalgebra::DMatrix::<f64>::identity(s.dim(), s.dim());
        prop_assert!(gram.amax() < 1e-12);
        prop_assert!(s.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn conservation_sums_hold(p in params(), m in 0usize..12) {
        let s = sector_spectrum(&p, m).unwrap();
        let na = p.atom_count() as f64;
        for r in expectations(&s) {
            prop_assert!((r.a11 + r.a22 + r.a33 - na).abs() < 1e-10);
            prop_assert!((r.photons + r.a22 + 2.0 * r.a33 - m as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn mirror_symmetry_in_double_resonance(p in resonant(), m in 0usize..14) {
        let s = sector_spectrum(&p, m).unwrap();
        let e = s.eigenvalues();
        for k in 0..e.len() {
            prop_assert!((e[k] + e[e.len() - 1 - k] - 2.0 * m as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn photon_distributions_are_normalized(p in params(), m in 0usize..14, pick in 0usize..1000) {
        let s = sector_spectrum(&p, m).unwrap();
        let d = photon_distribution(&s.state(pick % s.dim()), s.basis()).unwrap();
        prop_assert!((d.total() - 1.0).abs() < 1e-10);
        prop_assert_eq!(d.min_photons, m.saturating_sub(2 * p.atom_count()));
        prop_assert!(d.probs.iter().all(|&x| (-1e-15..=1.0 + 1e-12).contains(&x)));
    }

    #[test]
    fn fidelity_symmetric_and_bounded(a in resonant(), mu12 in 0.0..3.0f64, mu23 in 0.0..3.0f64, m in 0usize..8, delta in 1e-4..1.0f64) {
        let b = a.with_couplings(mu12, mu23).unwrap();
        let (_, sa) = sector_ground(&a, m).unwrap();
        let (_, sb) = sector_ground(&b, m).unwrap();
        let (_, sc) = sector_ground(&b, m + 1).unwrap();
        let f = fidelity(&sa, &sb).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert_eq!(f, fidelity(&sb, &sa).unwrap());
        prop_assert_eq!(fidelity(&sa, &sc).unwrap(), 0.0);
        let chi = susceptibility(f, delta).unwrap();
        prop_assert!(chi >= 0.0);
        prop_assert!((chi * delta * delta / 2.0 + f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basis_respects_sector_constraint(na in 1usize..12, m in 0usize..40) {
        let b = SectorBasis::enumerate(na, m).unwrap();
        prop_assert_eq!(b.dim(), sector_dimension(na, m).unwrap());
        prop_assert!(b.dim() <= (na + 1) * (na + 2) / 2);
        for (i, s) in b.states().iter().enumerate() {
            prop_assert_eq!(s.nu + s.n2() + 2 * s.n3(na), m);
            prop_assert_eq!(b.index_of(s), Some(i));
        }
    }

    #[test]
    fn dimension_regimes(na in 1usize..30, extra in 0usize..20, m in 0usize..30) {
        let full = (na + 1) * (na + 2) / 2;
        prop_assert_eq!(sector_dimension(na, 2 * na + extra).unwrap(), full);
        if m <= na {
            prop_assert_eq!(sector_dimension(na, m).unwrap(), sector_dimension(m.max(1) + 30, m).unwrap());
        }
    }

    #[test]
    fn thermo_closed_form_matches_limit_matrix(mu12 in 0.0..4.0f64, m in 0usize..13) {
        let a = thermo_spectrum(mu12, m).unwrap();
        let b = thermo_spectrum_numeric(mu12, m).unwrap();
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        for line in thermo_lines(m) {
            let l = line.shared() as f64;
            prop_assert!(line.slope().abs() <= l && (line.slope() + l) % 2.0 == 0.0);
        }
    }
}

#[test]
fn finite_atom_ground_approaches_limit() {
    let mut previous = f64::INFINITY;
    for na in [100, 1_000, 10_000] {
        let (e, _) = sector_ground(&triple_point(na), 4).unwrap();
        let gap = (e - thermo_spectrum(1.0, 4).unwrap()[0]).abs();
        assert!(gap < previous || gap < 1e-9, "N_a={na}: {gap} after {previous}");
        previous = gap;
    }
    assert!(previous < 1e-2);
}
