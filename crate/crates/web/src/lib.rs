//! Browser bindings: ground-sector map, sector minima and photon statistics
//! for the double-resonance ladder model.

use wasm_bindgen::prelude::*;
use xi_ladder::criticality::{GridAxis, GroundLabeler};
use xi_ladder::observables::ground_photon_distribution;
use xi_ladder::spectra::sector_ground_energy;
use xi_ladder::{MmaxPolicy, ModelParams, Result};

fn base(atom_count: usize) -> Result<ModelParams> {
    ModelParams::double_resonance(1.0, atom_count)
}

/// Ground-state `M` on an `n × n` grid over `[0, mu12_max] × [0, mu23_max]`,
/// row-major with `μ23` as the row index.
pub fn ground_labels(atom_count: usize, mu12_max: f64, mu23_max: f64, n: usize) -> Result<Vec<u32>> {
    let params = base(atom_count)?;
    let x = GridAxis::new(0.0, mu12_max, n)?;
    let y = GridAxis::new(0.0, mu23_max, n)?;
    let labeler = GroundLabeler::new(&params, MmaxPolicy::for_atoms(atom_count));
    let mut labels = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            labels.push(labeler.label(x.value(i), y.value(j))? as u32);
        }
    }
    Ok(labels)
}

/// `E0(M)` for `M = 0 ..= m_max`.
pub fn sector_minima(atom_count: usize, mu12: f64, mu23: f64, m_max: usize) -> Result<Vec<f64>> {
    let params = base(atom_count)?.with_couplings(mu12, mu23)?;
    (0..=m_max).map(|m| sector_ground_energy(&params, m)).collect()
}

/// Photon-number distribution of the lowest state in sector `M`, indexed
/// by photon number from zero.
pub fn photon_probabilities(atom_count: usize, mu12: f64, mu23: f64, m: usize) -> Result<Vec<f64>> {
    let params = base(atom_count)?.with_couplings(mu12, mu23)?;
    let d = ground_photon_distribution(&params, m)?;
    let mut probs = vec![0.0; d.min_photons];
    probs.extend(d.probs.iter().map(|p| p.max(0.0)));
    Ok(probs)
}

fn js(e: xi_ladder::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = groundLabels)]
pub fn ground_labels_js(atom_count: usize, mu12_max: f64, mu23_max: f64, n: usize) -> std::result::Result<Vec<u32>, JsError> {
    ground_labels(atom_count, mu12_max, mu23_max, n).map_err(js)
}

#[wasm_bindgen(js_name = sectorMinima)]
pub fn sector_minima_js(atom_count: usize, mu12: f64, mu23: f64, m_max: usize) -> std::result::Result<Vec<f64>, JsError> {
    sector_minima(atom_count, mu12, mu23, m_max).map_err(js)
}

#[wasm_bindgen(js_name = photonProbabilities)]
pub fn photon_probabilities_js(atom_count: usize, mu12: f64, mu23: f64, m: usize) -> std::result::Result<Vec<f64>, JsError> {
    photon_probabilities(atom_count, mu12, mu23, m).map_err(js)
}
