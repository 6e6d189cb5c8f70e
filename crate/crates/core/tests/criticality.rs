mod common;

use common::{triple_point, SQRT2};
use xi_ladder::criticality::{detect_transitions, phase_diagram, sweep_line, GridAxis, LinePath, PhaseDiagram, TriplePoint};
use xi_ladder::spectra::sector_ground;
use xi_ladder::{MmaxPolicy, ModelParams};

fn diagram(base: &ModelParams, x: (f64, f64, usize), y: (f64, f64, usize)) -> PhaseDiagram {
    phase_diagram(
        base,
        GridAxis::new(x.0, x.1, x.2).unwrap(),
        GridAxis::new(y.0, y.1, y.2).unwrap(),
        MmaxPolicy::for_atoms(base.atom_count()),
    )
    .unwrap()
}

fn with_labels<'a>(d: &'a PhaseDiagram, labels: &[usize]) -> &'a TriplePoint {
    d.triple_points
        .iter()
        .find(|t| t.labels == labels)
        .unwrap_or_else(|| panic!("no {labels:?} point in {:?}", d.triple_points))
}

#[test]
fn triple_point_fixed_for_several_atom_counts() {
    for na in [2, 3, 5, 8] {
        let base = ModelParams::double_resonance(1.0, na).unwrap();
        let d = diagram(&base, (0.5, 1.5, 51), (0.9, 1.9, 51));
        let tp = with_labels(&d, &[0, 1, 2]);
        assert!((tp.mu12 - 1.0).abs() < 1e-4 && (tp.mu23 - SQRT2).abs() < 1e-4, "N_a={na}: {tp:?}");
    }
}

#[test]
fn outer_triple_points_depend_on_atom_count() {
    let points: Vec<TriplePoint> = [2, 3]
        .iter()
        .map(|&na| {
            let d = diagram(&ModelParams::double_resonance(1.0, na).unwrap(), (0.0, 3.0, 61), (0.0, 3.0, 61));
            with_labels(&d, &[0, 2, 3]).clone()
        })
        .collect();
    let shift = (points[0].mu12 - points[1].mu12).hypot(points[0].mu23 - points[1].mu23);
    assert!(shift > 1e-2, "{points:?}");
}

#[test]
fn detuned_triple_point_is_fixed() {
    // Δ21 = 0.1, Δ32 = 0: E0(M=1) = 1.05 − √(0.0025 + μ12²) vanishes at
    // μ12 = √1.1, and E0(M=2) vanishes there when μ23 = √2.1
    let expected = (1.1_f64.sqrt(), 2.1_f64.sqrt());
    let mut found = Vec::new();
    for na in [4, 8] {
        let base = ModelParams::new(1.0, [0.0, 1.1, 2.1], 0.0, 0.0, na).unwrap();
        let det = base.detunings();
        assert!((det.d21 - 0.1).abs() < 1e-12 && det.d32.abs() < 1e-12);
        let at = base.with_couplings(expected.0, expected.1).unwrap();
        for m in 0..=2 {
            let (e, _) = sector_ground(&at, m).unwrap();
            assert!(e.abs() < 1e-10, "N_a={na} M={m}: {e}");
        }
        let d = diagram(&base, (0.9, 1.2, 31), (1.2, 1.6, 31));
        let tp = with_labels(&d, &[0, 1, 2]).clone();
        assert!((tp.mu12 - expected.0).abs() < 1e-6 && (tp.mu23 - expected.1).abs() < 1e-6, "N_a={na}: {tp:?}");
        found.push(tp);
    }
    assert!((found[0].mu12 - found[1].mu12).abs() < 1e-3);
    assert!((found[0].mu23 - found[1].mu23).abs() < 1e-3);
}

#[test]
fn one_two_crossing_drifts_toward_unit_coupling() {
    let mut previous = f64::INFINITY;
    for na in [2, 3, 5, 8, 20] {
        let base = ModelParams::double_resonance(1.0, na).unwrap();
        let trace = sweep_line(&base, &LinePath::along_mu12(0.0), 0.5, 2.0, 1e-3, MmaxPolicy::for_atoms(na)).unwrap();
        let report = detect_transitions(&trace, None).unwrap();
        let t = report
            .transitions
            .iter()
            .find(|t| (t.from_m, t.to_m) == (1, 2))
            .expect("1 → 2 crossing");
        // 1 − μ = 2 − μ√(4 − 2/N_a)
        let oracle = 1.0 / ((4.0 - 2.0 / na as f64).sqrt() - 1.0);
        assert!((t.lambda - oracle).abs() < 1e-8, "N_a={na}: {} vs {oracle}", t.lambda);
        assert!(t.lambda < previous && t.lambda > 1.0);
        previous = t.lambda;
    }
}

#[test]
fn fidelity_line_transitions_increase_and_chi_sees_more() {
    let base = ModelParams::double_resonance(1.0, 2).unwrap();
    let trace = sweep_line(&base, &LinePath::offset_diagonal(-0.2), 0.2, 3.0, 1e-3, MmaxPolicy::for_atoms(2)).unwrap();
    let report = detect_transitions(&trace, None).unwrap();
    assert!(report.transitions.windows(2).all(|w| w[0].lambda < w[1].lambda));
    assert!(report.transitions.iter().all(|t| t.to_m == t.from_m + 1));
    // inside a fixed sector F < 1 still, so χ is finite and positive there
    let interior: Vec<f64> = trace
        .samples
        .windows(2)
        .filter(|w| w[0].winning_m == w[1].winning_m && w[0].winning_m > 0)
        .filter_map(|w| w[0].chi)
        .collect();
    assert!(!interior.is_empty());
    assert!(interior.iter().all(|c| c.is_finite() && *c >= 0.0));
    assert!(interior.iter().any(|&c| c > 0.0));
}

#[test]
fn normal_region_is_flat() {
    let d = diagram(&triple_point(3), (0.0, 0.99, 12), (0.0, 1.41, 12));
    assert!(d.labels.iter().all(|&m| m == 0));
    assert!(d.triple_points.is_empty());
    assert!(d.boundaries.is_empty());
}
