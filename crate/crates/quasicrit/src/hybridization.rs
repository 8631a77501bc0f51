//! Eigenstate-overlap fidelity between coupled and decoupled chains: the
//! orthogonal change-of-basis matrix C, Max(|C_j|²) profiles, their size
//! scaling, and the perturbative admixture bound t_v²W/Δ².

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::matmul_abt;
use crate::models::{build_hamiltonian, CoupledModelSpec};
use crate::multifractal::{ScalingSample, ScalingSeries};
use crate::spectral::{diagonalize_tagged, EigenSystem, ModelTag};

/// Energy gap below which decoupled states are treated as one degenerate block.
pub const DEGENERACY_GAP: f64 = 1e-9;

/// Overlap matrix C with C[j'*N + j] = ⟨φ⁰_{j'} | φ_j⟩, rows indexing the
/// decoupled basis and columns the coupled one.
pub fn overlap_matrix(es0: &EigenSystem, es: &EigenSystem) -> Result<Vec<f64>> {
    let n = es0.dim();
    if es.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "eigensystem dimensions differ: {} vs {}",
            n,
            es.dim()
        )));
    }
    Ok(matmul_abt(es0.states_flat(), es.states_flat(), n, n, n))
}

/// Per-coupled-state fidelity record.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OverlapEntry {
    /// 0-based coupled-state index.
    pub index: usize,
    pub energy: f64,
    /// Largest squared overlap with a decoupled state, projected onto whole
    /// degenerate blocks of the decoupled spectrum.
    pub max_overlap: f64,
    /// Decoupled state carrying the largest individual |C|² inside the
    /// winning block.
    pub argmax_state: usize,
    /// True when the winning block holds more than one decoupled state.
    pub block_degenerate: bool,
}

/// Max(|C_j|²) for every coupled state.
///
/// Degenerate subspaces of the decoupled model (the free chain's ±k pairs)
/// make individual columns basis-dependent, so within each block detected by
/// [`DEGENERACY_GAP`] the squared projection onto the whole block is used.
pub fn max_overlap_profile(es0: &EigenSystem, es: &EigenSystem) -> Result<Vec<OverlapEntry>> {
    let n = es0.dim();
    let c = overlap_matrix(es0, es)?;
    let blocks = degenerate_blocks(es0.energies());
    let out: Vec<OverlapEntry> = (0..n)
        .into_par_iter()
        .with_min_len(32)
        .map(|j| {
            let mut best = (0.0f64, 0usize, false);
            for &(a, b) in &blocks {
                let mut proj = 0.0;
                let mut arg = a;
                let mut arg_val = -1.0;
                for jp in a..b {
                    let v = c[jp * n + j];
                    let v2 = v * v;
                    proj += v2;
                    if v2 > arg_val {
                        arg_val = v2;
                        arg = jp;
                    }
                }
                if proj > best.0 {
                    best = (proj, arg, b - a > 1);
                }
            }
            OverlapEntry {
                index: j,
                energy: es.energies()[j],
                max_overlap: best.0,
                argmax_state: best.1,
                block_degenerate: best.2,
            }
        })
        .collect();
    Ok(out)
}

/// Half-open index ranges of (near-)degenerate runs in a sorted energy list.
pub fn degenerate_blocks(energies: &[f64]) -> Vec<(usize, usize)> {
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 1..energies.len() {
        if energies[i] - energies[i - 1] > DEGENERACY_GAP {
            blocks.push((start, i));
            start = i;
        }
    }
    if !energies.is_empty() {
        blocks.push((start, energies.len()));
    }
    blocks
}

/// ⟨Max(|C_j|²)⟩ over an energy window of the coupled spectrum, one sample per
/// Fibonacci index in `n_list`. The model family is given as a map from n to
/// the coupled spec; the decoupled partner is derived by zeroing the coupling.
pub fn fidelity_scaling(
    family: impl Fn(u32) -> Result<CoupledModelSpec> + Sync,
    n_list: &[u32],
    window: (f64, f64),
) -> Result<ScalingSeries> {
    if n_list.len() < 3 {
        return Err(Error::Fit(format!(
            "fidelity scaling needs at least 3 sizes; got {}",
            n_list.len()
        )));
    }
    let mut samples = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let spec = family(n)?;
        let (value, l_total) = mean_max_overlap(&spec, window)?;
        samples.push(ScalingSample {
            n,
            l_total,
            value,
        });
    }
    Ok(ScalingSeries {
        name: format!("max_overlap_E[{},{}]", window.0, window.1),
        abscissa: crate::multifractal::AbscissaKind::OneOverN,
        samples,
    })
}

/// ⟨Max(|C_j|²)⟩_E for one model; returns the mean and the total site count.
pub fn mean_max_overlap(spec: &CoupledModelSpec, window: (f64, f64)) -> Result<(f64, usize)> {
    let tag = |s: &CoupledModelSpec| ModelTag {
        spec_hash: s.spec_hash(),
        approximant_n: s.approximant().index(),
    };
    let decoupled = spec.decoupled();
    let es0 = diagonalize_tagged(&build_hamiltonian(&decoupled)?, tag(&decoupled))?;
    let es = diagonalize_tagged(&build_hamiltonian(spec)?, tag(spec))?;
    mean_max_overlap_with(&es0, &es, window)
}

pub fn mean_max_overlap_with(
    es0: &EigenSystem,
    es: &EigenSystem,
    window: (f64, f64),
) -> Result<(f64, usize)> {
    let profile = max_overlap_profile(es0, es)?;
    let selected: Vec<f64> = profile
        .iter()
        .filter(|e| e.energy >= window.0 && e.energy <= window.1)
        .map(|e| e.max_overlap)
        .collect();
    if selected.is_empty() {
        return Err(Error::EmptyWindow {
            emin: window.0,
            emax: window.1,
        });
    }
    Ok((
        selected.iter().sum::<f64>() / selected.len() as f64,
        es.dim(),
    ))
}

/// Predicted squared admixture scale t_v²·W/Δ² of perturbation theory; small
/// values mean the coupled states stay close to the decoupled ones.
pub fn perturbation_bound(t_v: f64, delta: f64, w: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::Parameter(
            "perturbation bound inapplicable at Δ = 0 (overlapped spectra resonance)".into(),
        ));
    }
    if delta < 0.0 || w < 1.0 {
        return Err(Error::Parameter(format!(
            "perturbation bound requires Δ > 0 and W ≥ 1; got Δ = {delta}, W = {w}"
        )));
    }
    Ok(t_v * t_v * w / (delta * delta))
}

/// Localization width of a decoupled state estimated from its peak amplitude,
/// W = 1/max_m |ψ_m|².
pub fn localization_width(state: &[f64]) -> f64 {
    let pmax = state.iter().map(|&x| x * x).fold(0.0f64, f64::max);
    1.0 / pmax
}
