//! Exact diagonalization and spectral utilities shared by every analysis
//! module: full eigensystems, energy-window selection, exact time evolution
//! through the eigenbasis, and an optional binary cache keyed by spec hash.

mod solver;

use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Provenance record attached to every eigensystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelTag {
    /// Content hash of the model spec (or of the raw matrix when no spec is known).
    pub spec_hash: u64,
    /// Fibonacci index of the underlying approximant; 0 when not applicable.
    pub approximant_n: u32,
}

/// Sorted full spectrum with orthonormal eigenvectors, one state per row.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    energies: Vec<f64>,
    states: Vec<f64>,
    tag: ModelTag,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// Ascending eigenvalues in units of the reference hopping.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvector j (unit norm, deterministic sign convention).
    pub fn state(&self, j: usize) -> &[f64] {
        let n = self.dim();
        &self.states[j * n..(j + 1) * n]
    }

    /// All states, row-major.
    pub fn states_flat(&self) -> &[f64] {
        &self.states
    }

    pub fn tag(&self) -> ModelTag {
        self.tag
    }

    pub fn with_tag(mut self, tag: ModelTag) -> Self {
        self.tag = tag;
        self
    }

    /// Max-norm deviation of the Gram matrix from the identity.
    pub fn gram_deviation(&self) -> f64 {
        let n = self.dim();
        let g = crate::matrix::matmul_abt(&self.states, &self.states, n, n, n);
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[i * n + j] - target).abs());
            }
        }
        worst
    }
}

/// Full dense eigendecomposition of a real symmetric matrix.
///
/// Ordering is deterministic: ascending energy, exact ties kept in reduction
/// order, and each state's first component above 1e-8 made positive, so
/// repeated runs and downstream overlap matrices reproduce bit-identically.
pub fn diagonalize(h: &SymMatrix) -> Result<EigenSystem> {
    h.check_symmetric()?;
    let (energies, states) = solver::symmetric_eigen(h)?;
    Ok(EigenSystem {
        energies,
        states,
        tag: ModelTag {
            spec_hash: h.content_hash(),
            approximant_n: 0,
        },
    })
}

pub fn diagonalize_tagged(h: &SymMatrix, tag: ModelTag) -> Result<EigenSystem> {
    Ok(diagonalize(h)?.with_tag(tag))
}

/// Indices j with emin ≤ E_j ≤ emax, ascending. An empty selection is a valid
/// result, not an error.
pub fn states_in_window(es: &EigenSystem, emin: f64, emax: f64) -> Vec<usize> {
    es.energies
        .iter()
        .enumerate()
        .filter(|(_, &e)| e >= emin && e <= emax)
        .map(|(j, _)| j)
        .collect()
}

/// Exact propagation ψ(t) = Σ_j e^{−iE_j t} ⟨ψ_j|ψ0⟩ |ψ_j⟩ (ħ = 1, t in units
/// of the inverse reference hopping).
pub fn spectral_propagate(es: &EigenSystem, psi0: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    let n = es.dim();
    if psi0.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "state length {} != eigensystem dimension {}",
            psi0.len(),
            n
        )));
    }
    let norm: f64 = psi0.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Contract(format!(
            "spectral_propagate requires a unit-norm state; got |psi0|^2 = {norm}"
        )));
    }
    // c_j = ⟨ψ_j|ψ0⟩ with real eigenvectors
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        let row = es.state(j);
        let mut c = Complex64::new(0.0, 0.0);
        for (v, a) in row.iter().zip(psi0) {
            c += a * *v;
        }
        let phase = Complex64::from_polar(1.0, -es.energies[j] * t);
        let w = phase * c;
        if w.norm_sqr() < 1e-60 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(row) {
            *o += w * *v;
        }
    }
    Ok(out)
}

const CACHE_MAGIC: &[u8; 8] = b"QCEIGSYS";
const CACHE_VERSION: u32 = 1;

/// Write the eigensystem to a versioned little-endian container.
pub fn write_cache(path: &Path, es: &EigenSystem) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(CACHE_MAGIC)?;
    f.write_all(&CACHE_VERSION.to_le_bytes())?;
    f.write_all(&es.tag.spec_hash.to_le_bytes())?;
    f.write_all(&es.tag.approximant_n.to_le_bytes())?;
    f.write_all(&(es.dim() as u64).to_le_bytes())?;
    for v in &es.energies {
        f.write_all(&v.to_le_bytes())?;
    }
    for v in &es.states {
        f.write_all(&v.to_le_bytes())?;
    }
    f.flush()?;
    Ok(())
}

/// Read an eigensystem written by [`write_cache`].
pub fn read_cache(path: &Path) -> Result<EigenSystem> {
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    f.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::CacheFormat("bad magic".into()));
    }
    let version = read_u32(&mut f)?;
    if version != CACHE_VERSION {
        return Err(Error::CacheFormat(format!(
            "unsupported cache version {version}"
        )));
    }
    let spec_hash = read_u64(&mut f)?;
    let approximant_n = read_u32(&mut f)?;
    let dim = read_u64(&mut f)? as usize;
    let mut energies = vec![0.0f64; dim];
    read_f64s(&mut f, &mut energies)?;
    let mut states = vec![0.0f64; dim * dim];
    read_f64s(&mut f, &mut states)?;
    if energies.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::CacheFormat("energies not sorted".into()));
    }
    Ok(EigenSystem {
        energies,
        states,
        tag: ModelTag {
            spec_hash,
            approximant_n,
        },
    })
}

fn read_u32(f: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    f.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(f: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    f.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64s(f: &mut impl Read, out: &mut [f64]) -> Result<()> {
    let mut b = [0u8; 8];
    for v in out.iter_mut() {
        f.read_exact(&mut b)?;
        *v = f64::from_le_bytes(b);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{
        build_hamiltonian, build_single_chain, fibonacci_approximant, ChainSpec,
        CoupledModelSpec, PotentialKind,
    };

    #[test]
    fn two_by_two_offdiagonal() {
        let mut h = SymMatrix::zeros(2);
        h.set_sym(0, 1, 1.0);
        let es = diagonalize(&h).unwrap();
        assert!((es.energies()[0] + 1.0).abs() < 1e-14);
        assert!((es.energies()[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2.0f64.sqrt();
        // sign convention: first significant component positive
        assert!((es.state(0)[0] - s).abs() < 1e-12 && (es.state(0)[1] + s).abs() < 1e-12);
        assert!((es.state(1)[0] - s).abs() < 1e-12 && (es.state(1)[1] - s).abs() < 1e-12);
    }

    #[test]
    fn free_ring_spectrum_with_multiplicities() {
        let a = fibonacci_approximant(6).unwrap(); // F_6 = 8
        let h = build_single_chain(&ChainSpec::new(PotentialKind::None, a)).unwrap();
        let es = diagonalize(&h).unwrap();
        let mut expected: Vec<f64> = (0..8)
            .map(|k| 2.0 * (2.0 * std::f64::consts::PI * k as f64 / 8.0).cos())
            .collect();
        expected.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (e, x) in es.energies().iter().zip(&expected) {
            assert!((e - x).abs() < 1e-12, "{e} vs {x}");
        }
    }

    #[test]
    fn eigenpairs_satisfy_eigenvalue_equation() {
        let a = fibonacci_approximant(9).unwrap();
        let spec = CoupledModelSpec::minimal(2.0, 0.1, a);
        let h = build_hamiltonian(&spec).unwrap();
        let es = diagonalize(&h).unwrap();
        for j in [0, 10, es.dim() / 2, es.dim() - 1] {
            let psi = es.state(j);
            let hpsi = h.matvec(psi);
            let worst = hpsi
                .iter()
                .zip(psi)
                .map(|(hv, v)| (hv - es.energies()[j] * v).abs())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-9, "residual {worst} at state {j}");
        }
        assert!(es.gram_deviation() < 1e-10);
    }

    #[test]
    fn non_symmetric_rejected() {
        let mut h = SymMatrix::zeros(3);
        h.set(0, 1, 0.5);
        assert!(matches!(
            diagonalize(&h),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn window_selection() {
        let a = fibonacci_approximant(6).unwrap();
        let h = build_single_chain(&ChainSpec::new(PotentialKind::None, a)).unwrap();
        let es = diagonalize(&h).unwrap();
        assert_eq!(states_in_window(&es, -3.0, 3.0).len(), es.dim());
        assert!(states_in_window(&es, 100.0, 200.0).is_empty());
    }

    #[test]
    fn propagate_identity_at_t0_and_eigenstate_phase() {
        let a = fibonacci_approximant(7).unwrap();
        let h = build_single_chain(&ChainSpec::new(
            PotentialKind::Aah { v: 0.7, phi: 0.3 },
            a,
        ))
        .unwrap();
        let es = diagonalize(&h).unwrap();
        let n = es.dim();
        // t = 0 reproduces the input exactly
        let mut psi0 = vec![Complex64::new(0.0, 0.0); n];
        psi0[3] = Complex64::new(1.0, 0.0);
        let out = spectral_propagate(&es, &psi0, 0.0).unwrap();
        for (o, i) in out.iter().zip(&psi0) {
            assert!((o - i).norm() < 1e-10);
        }
        // an eigenstate only picks up a phase
        let j = n / 2;
        let psi: Vec<Complex64> = es.state(j).iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let out = spectral_propagate(&es, &psi, 2.37).unwrap();
        for (o, i) in out.iter().zip(&psi) {
            assert!((o.norm() - i.norm()).abs() < 1e-10);
        }
        let phase = Complex64::from_polar(1.0, -es.energies()[j] * 2.37);
        for (o, i) in out.iter().zip(&psi) {
            assert!((o - phase * i).norm() < 1e-9);
        }
    }

    #[test]
    fn propagate_rejects_unnormalized() {
        let a = fibonacci_approximant(6).unwrap();
        let h = build_single_chain(&ChainSpec::new(PotentialKind::None, a)).unwrap();
        let es = diagonalize(&h).unwrap();
        let psi0 = vec![Complex64::new(0.5, 0.0); es.dim()];
        assert!(matches!(
            spectral_propagate(&es, &psi0, 1.0),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn completeness_of_overlap_coefficients() {
        let a = fibonacci_approximant(8).unwrap();
        let h = build_single_chain(&ChainSpec::new(
            PotentialKind::Aah { v: 1.3, phi: 0.0 },
            a,
        ))
        .unwrap();
        let es = diagonalize(&h).unwrap();
        let n = es.dim();
        let amp = 1.0 / (n as f64).sqrt();
        let psi0: Vec<Complex64> = (0..n)
            .map(|m| Complex64::from_polar(amp, 0.1 * m as f64))
            .collect();
        let total: f64 = (0..n)
            .map(|j| {
                let mut c = Complex64::new(0.0, 0.0);
                for (v, a) in es.state(j).iter().zip(&psi0) {
                    c += a * *v;
                }
                c.norm_sqr()
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn block_diagonal_spectrum_is_union_of_chains() {
        let a = fibonacci_approximant(9).unwrap();
        let spec = CoupledModelSpec::minimal(2.0, 0.0, a);
        let es = diagonalize(&build_hamiltonian(&spec).unwrap()).unwrap();
        let e1 = diagonalize(&build_single_chain(&spec.chain1).unwrap()).unwrap();
        let e2 = diagonalize(&build_single_chain(&spec.chain2).unwrap()).unwrap();
        let mut union: Vec<f64> = e1
            .energies()
            .iter()
            .chain(e2.energies())
            .copied()
            .collect();
        union.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (e, x) in es.energies().iter().zip(&union) {
            assert!((e - x).abs() < 1e-10);
        }
    }

    #[test]
    fn cache_round_trip() {
        let a = fibonacci_approximant(7).unwrap();
        let h = build_single_chain(&ChainSpec::new(
            PotentialKind::Aah { v: 2.0, phi: 0.0 },
            a,
        ))
        .unwrap();
        let es = diagonalize(&h)
            .unwrap()
            .with_tag(ModelTag {
                spec_hash: 0xabcd,
                approximant_n: 7,
            });
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("es.qce");
        write_cache(&path, &es).unwrap();
        let back = read_cache(&path).unwrap();
        assert_eq!(back.tag(), es.tag());
        assert_eq!(back.energies(), es.energies());
        assert_eq!(back.states_flat(), es.states_flat());
    }

    #[test]
    fn cache_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.qce");
        std::fs::write(&path, b"not a cache file").unwrap();
        assert!(read_cache(&path).is_err());
    }
}
