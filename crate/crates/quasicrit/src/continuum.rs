//! Finite-difference solver for the spin-dependent bichromatic continuum
//! model: two components in a primary cos² lattice, an incommensurate
//! modulation on one component, and a constant Raman coupling between them.
//!
//! Units: energies in the recoil E_R = ħ²k₁²/2m, lengths in a = π/k₁. The
//! kinetic prefactor is then 1/π² and the three-point stencil carries
//! 1/(π² dx²). Open boundaries; the grid is cell-centered with antisymmetric
//! ghost elimination, which pins the hard walls exactly at x = 0 and
//! x = L_cells and keeps the particle-in-a-box oracle at O(dx²) accuracy.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;
use crate::spectral::EigenSystem;

/// Spin-dependent bichromatic lattice in a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuumSpec {
    /// Primary lattice depth V₁ (units of E_R), potential V₁cos²(πx).
    pub v1: f64,
    /// Incommensurate depth V₂ (units of E_R), potential (V₂/2)cos(2πβx) on
    /// the second component.
    pub v2: f64,
    /// Raman coupling Ω (units of E_R); the matrix element is Ω/2 and either
    /// sign is allowed.
    pub omega: f64,
    /// Frequency ratio k₂/k₁.
    pub beta: f64,
    /// Box length in lattice periods a.
    pub l_cells: usize,
    /// Grid step in units of a; 1/dx must be an integer.
    pub dx: f64,
}

impl ContinuumSpec {
    /// β = F_{n−1}/F_n for a Fibonacci box length, periodizing the
    /// incommensurate potential over the box.
    pub fn fibonacci_beta(l_cells: usize) -> Result<f64> {
        let (mut a, mut b) = (1u64, 1u64);
        while b < l_cells as u64 {
            let c = a + b;
            a = b;
            b = c;
        }
        if b != l_cells as u64 {
            return Err(Error::Parameter(format!(
                "L_cells = {l_cells} is not a Fibonacci number"
            )));
        }
        Ok(a as f64 / b as f64)
    }

    pub fn points_per_cell(&self) -> Result<usize> {
        let ppc = 1.0 / self.dx;
        let rounded = ppc.round();
        if (ppc - rounded).abs() > 1e-9 || rounded < 1.0 {
            return Err(Error::Parameter(format!(
                "dx = {} must divide the cell exactly (1/dx integer)",
                self.dx
            )));
        }
        Ok(rounded as usize)
    }

    /// Grid points per spin component.
    pub fn grid_points(&self) -> Result<usize> {
        Ok(self.l_cells * self.points_per_cell()?)
    }

    /// Total matrix dimension 2·N_grid.
    pub fn dim(&self) -> Result<usize> {
        Ok(2 * self.grid_points()?)
    }

    /// Present when the step is too coarse for the band structure.
    pub fn resolution_warning(&self) -> Option<String> {
        (self.dx > 0.1).then(|| {
            format!(
                "dx = {} exceeds 0.1 a; s-band energies will carry visible discretization error",
                self.dx
            )
        })
    }

    pub fn spec_hash(&self) -> u64 {
        crate::models::spec_hash_of(self)
    }
}

/// Assemble the 2N_grid × 2N_grid finite-difference Hamiltonian.
pub fn build_continuum_hamiltonian(spec: &ContinuumSpec) -> Result<SymMatrix> {
    let ng = spec.grid_points()?;
    if ng < 2 {
        return Err(Error::Parameter("grid too small".into()));
    }
    let tg = 1.0 / (PI * PI * spec.dx * spec.dx);
    let mut h = SymMatrix::zeros(2 * ng);
    for (offset, incommensurate) in [(0usize, false), (ng, true)] {
        for i in 0..ng {
            let x = (i as f64 + 0.5) * spec.dx;
            let mut v = spec.v1 * (PI * x).cos().powi(2);
            if incommensurate {
                v += 0.5 * spec.v2 * (2.0 * PI * spec.beta * x).cos();
            }
            let mut diag = 2.0 * tg + v;
            // hard wall at the cell-centered boundary: ghost ψ(−dx/2) = −ψ(dx/2)
            if i == 0 || i == ng - 1 {
                diag += tg;
            }
            h.set(offset + i, offset + i, diag);
            if i + 1 < ng {
                h.set_sym(offset + i, offset + i + 1, -tg);
            }
        }
    }
    for i in 0..ng {
        h.set_sym(i, ng + i, spec.omega / 2.0);
    }
    Ok(h)
}

/// s-band selection: the lowest 2·L_cells states (one orbital per well per
/// component), with the band edge verified against the spectral gap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SBand {
    pub indices: Vec<usize>,
    /// Gap between the last s-band state and the next level.
    pub gap: f64,
    /// Largest level spacing inside the band.
    pub max_intraband_spacing: f64,
    /// None when the gap dominates the intraband spacing as expected; a
    /// warning report otherwise.
    pub warning: Option<String>,
}

pub fn s_band_states(es: &EigenSystem, spec: &ContinuumSpec) -> Result<SBand> {
    let nb = 2 * spec.l_cells;
    if es.dim() < nb + 1 {
        return Err(Error::DimensionMismatch(format!(
            "eigensystem of dim {} cannot hold a {nb}-state s-band",
            es.dim()
        )));
    }
    let e = es.energies();
    let gap = e[nb] - e[nb - 1];
    let max_intraband_spacing = e[..nb]
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    let warning = (gap <= 3.0 * max_intraband_spacing).then(|| {
        format!(
            "s-band edge gap {gap:.3e} does not dominate the intraband spacing \
             {max_intraband_spacing:.3e}; band counting may be off"
        )
    });
    Ok(SBand {
        indices: (0..nb).collect(),
        gap,
        max_intraband_spacing,
        warning,
    })
}

/// Rescale an ℓ²-normalized eigenvector to the grid measure Σ|ψ|²dx = 1.
pub fn grid_normalize(state: &[f64], dx: f64) -> Vec<f64> {
    let s: f64 = state.iter().map(|x| x * x).sum::<f64>() * dx;
    let inv = 1.0 / s.sqrt();
    state.iter().map(|x| x * inv).collect()
}

/// Coarse-grained fractal dimension: per-well probabilities p_c = Σ_{σ, i∈c}
/// |ψ|²dx over cells of width a (both spin components merged), then
/// τ₂ = −ln Σp_c² / ln L_cells. A state uniform over cells gives exactly 1.
pub fn continuum_tau2(state: &[f64], spec: &ContinuumSpec) -> Result<f64> {
    let ng = spec.grid_points()?;
    if state.len() != 2 * ng {
        return Err(Error::DimensionMismatch(format!(
            "state length {} != 2 N_grid = {}",
            state.len(),
            2 * ng
        )));
    }
    let ppc = spec.points_per_cell()?;
    let mut p2 = 0.0;
    let mut total = 0.0;
    for c in 0..spec.l_cells {
        let mut p = 0.0;
        for i in c * ppc..(c + 1) * ppc {
            p += state[i] * state[i] + state[ng + i] * state[ng + i];
        }
        p *= spec.dx;
        total += p;
        p2 += p * p;
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Contract(format!(
            "state not grid-normalized: Σ|ψ|²dx = {total}"
        )));
    }
    Ok(-p2.ln() / (spec.l_cells as f64).ln())
}
