//! Dense real matrices in row-major storage.
//!
//! Hamiltonians here are small enough (N ≲ 6000) that full dense storage is
//! the simplest correct choice; periodic corners and long-range hoppings break
//! bandedness anyway.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense N×N real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// Write the same value to (i, j) and (j, i); symmetry holds by construction.
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    /// Accumulate the same value into (i, j) and (j, i). The diagonal is
    /// accumulated once.
    #[inline]
    pub fn add_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
        if i != j {
            self.data[j * self.n + i] += v;
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n, "row-major buffer must hold n*n entries");
        Self { n, data }
    }

    /// Largest |H_ij - H_ji| over all pairs; exactly 0.0 for matrices built
    /// through `set_sym`/`add_sym`.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let d = (self.get(i, j) - self.get(j, i)).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    pub fn check_symmetric(&self) -> Result<()> {
        let a = self.max_asymmetry();
        if a > 0.0 {
            Err(Error::NotSymmetric { max_asym: a })
        } else {
            Ok(())
        }
    }

    /// y = H x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        self.data
            .chunks_exact(self.n)
            .map(|row| dot(row, x))
            .collect()
    }

    /// FNV-1a over the dimension and raw bit patterns; stable content identity
    /// for provenance records and cache keys.
    pub fn content_hash(&self) -> u64 {
        let mut h = fnv1a_init();
        h = fnv1a_u64(h, self.n as u64);
        for &v in &self.data {
            h = fnv1a_u64(h, v.to_bits());
        }
        h
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn fnv1a_init() -> u64 {
    0xcbf2_9ce4_8422_2325
}

pub(crate) fn fnv1a_u64(mut h: u64, v: u64) -> u64 {
    for shift in (0..64).step_by(8) {
        h ^= (v >> shift) & 0xff;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// C = A Bᵀ for row-major A (p×n) and B (q×n); returns row-major p×q.
///
/// Row-times-row is the cache-friendly orientation for overlap matrices
/// between eigenbases stored with one state per row.
pub fn matmul_abt(a: &[f64], b: &[f64], p: usize, q: usize, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), p * n);
    assert_eq!(b.len(), q * n);
    let mut c = vec![0.0; p * q];
    c.par_chunks_mut(q)
        .with_min_len(8)
        .enumerate()
        .for_each(|(i, crow)| {
            let arow = &a[i * n..(i + 1) * n];
            for (j, out) in crow.iter_mut().enumerate() {
                *out = dot(arow, &b[j * n..(j + 1) * n]);
            }
        });
    c
}
