//! Dense symmetric eigensolver: Householder tridiagonalization followed by
//! implicit-shift QL, with the orthogonal transforms accumulated so the full
//! eigenbasis comes out in one pass. EISPACK tred2/tql2 lineage, restructured
//! so every hot loop streams rows of row-major storage.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

const MAX_QL_ITER: usize = 50;
// below this dimension the rayon dispatch costs more than the row work
const PAR_MIN_DIM: usize = 256;

/// Full eigendecomposition of a symmetric matrix.
///
/// Returns ascending eigenvalues and eigenvectors stored one per row, in the
/// same order. The caller is responsible for the symmetry check.
pub(crate) fn symmetric_eigen(a: &SymMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = a.dim();
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    if n == 1 {
        return Ok((vec![a.get(0, 0)], vec![1.0]));
    }

    let mut w = a.as_slice().to_vec(); // working copy; finished rows keep Householder vectors
    let mut subdiag = vec![0.0f64; n]; // subdiag[i] = T[i][i-1]
    let mut hcoef = vec![0.0f64; n]; // Householder normalization h per step, 0 = no transform

    tridiagonalize(&mut w, n, &mut subdiag, &mut hcoef);

    let mut diag: Vec<f64> = (0..n).map(|i| w[i * n + i]).collect();

    // accumulate Q with A = Q T Qᵀ, then transpose so states sit in rows
    let mut q = accumulate_q(&w, n, &hcoef);
    transpose_in_place(&mut q, n);
    drop(w);

    // e2[l] = T[l+1][l]
    let mut e2 = vec![0.0f64; n];
    for l in 0..n - 1 {
        e2[l] = subdiag[l + 1];
    }

    ql_implicit(&mut diag, &mut e2, &mut q, n, a)?;
    sort_and_fix_signs(&mut diag, &mut q, n);
    Ok((diag, q))
}

/// Householder reduction, processing rows high to low. The active leading
/// block stays fully symmetric so the projection pass reads contiguous rows;
/// finished row i keeps the scaled Householder vector u_i in columns [0, i).
fn tridiagonalize(w: &mut [f64], n: usize, subdiag: &mut [f64], hcoef: &mut [f64]) {
    let mut p = vec![0.0f64; n];
    let mut qv = vec![0.0f64; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let (head, tail) = w.split_at_mut(i * n);
        let urow = &mut tail[..i]; // row i, columns [0, i)
        let scale: f64 = urow.iter().map(|x| x.abs()).sum();
        if l == 0 || scale == 0.0 {
            subdiag[i] = if scale == 0.0 { urow[l] } else { 0.0 };
            if l == 0 {
                subdiag[i] = urow[0];
            }
            hcoef[i] = 0.0;
            continue;
        }
        let inv_scale = 1.0 / scale;
        let mut h = 0.0;
        for x in urow.iter_mut() {
            *x *= inv_scale;
            h += *x * *x;
        }
        let f = urow[l];
        let g = -h.sqrt().copysign(f);
        subdiag[i] = scale * g;
        h -= f * g;
        urow[l] = f - g;
        hcoef[i] = h;
        let inv_h = 1.0 / h;

        // p = A u / h over the active block, reading symmetric rows
        let active = &head[..i * n];
        let u = &*urow;
        let compute_p = |(j, pj): (usize, &mut f64)| {
            let row = &active[j * n..j * n + i];
            *pj = crate::matrix::dot(row, u) * inv_h;
        };
        if i >= PAR_MIN_DIM {
            p[..i]
                .par_iter_mut()
                .enumerate()
                .with_min_len(64)
                .for_each(compute_p);
        } else {
            p[..i].iter_mut().enumerate().for_each(compute_p);
        }

        // q = p − (uᵀp / 2h) u
        let k: f64 = crate::matrix::dot(&p[..i], u) * (0.5 * inv_h);
        for j in 0..i {
            qv[j] = p[j] - k * u[j];
        }

        // symmetric rank-2 update A ← A − u qᵀ − q uᵀ on the full active block
        let qs = &qv[..i];
        let update_row = |(j, row): (usize, &mut [f64])| {
            let uj = u[j];
            let qj = qs[j];
            for ((x, &uk), &qk) in row.iter_mut().zip(u).zip(qs) {
                *x -= uj * qk + qj * uk;
            }
        };
        if i >= PAR_MIN_DIM {
            head[..i * n]
                .par_chunks_mut(n)
                .map(|r| &mut r[..i])
                .enumerate()
                .with_min_len(32)
                .for_each(|(j, row)| update_row((j, row)));
        } else {
            head[..i * n]
                .chunks_mut(n)
                .map(|r| &mut r[..i])
                .enumerate()
                .for_each(update_row);
        }
    }
}

/// Build Q = H_{n−1}···H_1 by left-applying stored Householder reflectors in
/// ascending order; the nontrivial block grows with the step index so total
/// work stays at (4/3)n³.
fn accumulate_q(w: &[f64], n: usize, hcoef: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0f64; n * n];
    for j in 0..n {
        q[j * n + j] = 1.0;
    }
    let mut wvec = vec![0.0f64; n];
    for i in 1..n {
        let h = hcoef[i];
        if h == 0.0 {
            continue;
        }
        let u = &w[i * n..i * n + i];
        let inv_h = 1.0 / h;
        // w = uᵀ Q over the active [0, i) block
        let wv = &mut wvec[..i];
        wv.fill(0.0);
        for (r, &ur) in u.iter().enumerate() {
            if ur == 0.0 {
                continue;
            }
            let qrow = &q[r * n..r * n + i];
            for (t, &qq) in wv.iter_mut().zip(qrow) {
                *t += ur * qq;
            }
        }
        // Q ← Q − (u/h) w
        let update_row = |(r, row): (usize, &mut [f64])| {
            let c = u[r] * inv_h;
            if c == 0.0 {
                return;
            }
            for (x, &t) in row.iter_mut().zip(&*wv) {
                *x -= c * t;
            }
        };
        if i >= PAR_MIN_DIM {
            q[..i * n]
                .par_chunks_mut(n)
                .map(|r| &mut r[..i])
                .enumerate()
                .with_min_len(32)
                .for_each(|(r, row)| update_row((r, row)));
        } else {
            q[..i * n]
                .chunks_mut(n)
                .map(|r| &mut r[..i])
                .enumerate()
                .for_each(update_row);
        }
    }
    q
}

fn transpose_in_place(m: &mut [f64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            m.swap(i * n + j, j * n + i);
        }
    }
}

/// Implicit-shift QL on the tridiagonal (diag, e2), rotating the rows of the
/// accumulated basis `s` in lockstep. `e2[l]` couples l and l+1.
fn ql_implicit(
    diag: &mut [f64],
    e2: &mut [f64],
    s: &mut [f64],
    n: usize,
    origin: &SymMatrix,
) -> Result<()> {
    let eps = f64::EPSILON;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if e2[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITER {
                return Err(Error::NoConvergence {
                    row: l,
                    dim: n,
                    matrix_hash: origin.content_hash(),
                });
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * e2[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + e2[l] / (g + r.copysign(g));
            let (mut sin, mut cos) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = sin * e2[i];
                let b = cos * e2[i];
                r = f.hypot(g);
                e2[i + 1] = r;
                if r == 0.0 {
                    // rotation underflow: deflate and restart this eigenvalue
                    diag[i + 1] -= p;
                    e2[m] = 0.0;
                    underflow = true;
                    break;
                }
                sin = f / r;
                cos = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * sin + 2.0 * cos * b;
                p = sin * r;
                diag[i + 1] = g + p;
                g = cos * r - b;
                rotate_rows(s, n, i, sin, cos);
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            e2[l] = g;
            e2[m] = 0.0;
        }
    }
    Ok(())
}

/// Givens rotation mixing basis rows i and i+1 (states are rows here, so this
/// streams two contiguous slices).
#[inline]
fn rotate_rows(s: &mut [f64], n: usize, i: usize, sin: f64, cos: f64) {
    let (a, b) = s.split_at_mut((i + 1) * n);
    let ra = &mut a[i * n..];
    let rb = &mut b[..n];
    for (x, y) in ra.iter_mut().zip(rb.iter_mut()) {
        let f = *y;
        *y = sin * *x + cos * f;
        *x = cos * *x - sin * f;
    }
}

/// Ascending eigenvalue order (stable in the original index on exact ties),
/// then the deterministic sign convention: the first component of each state
/// with magnitude above 1e-8 is made positive.
fn sort_and_fix_signs(diag: &mut [f64], s: &mut [f64], n: usize) {
    // order[k] = original index of the row that belongs at position k
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| diag[x].partial_cmp(&diag[y]).unwrap().then(x.cmp(&y)));

    let sorted: Vec<f64> = order.iter().map(|&k| diag[k]).collect();
    diag.copy_from_slice(&sorted);

    // in-place gather by cycle following, one row buffer of scratch
    let mut visited = vec![false; n];
    let mut buf = vec![0.0f64; n];
    for start in 0..n {
        if visited[start] || order[start] == start {
            visited[start] = true;
            continue;
        }
        buf.copy_from_slice(&s[start * n..(start + 1) * n]);
        let mut dst = start;
        loop {
            visited[dst] = true;
            let src = order[dst];
            if src == start {
                s[dst * n..(dst + 1) * n].copy_from_slice(&buf);
                break;
            }
            s.copy_within(src * n..(src + 1) * n, dst * n);
            dst = src;
        }
    }

    for j in 0..n {
        let row = &mut s[j * n..(j + 1) * n];
        if let Some(&lead) = row.iter().find(|x| x.abs() > 1e-8) {
            if lead < 0.0 {
                for x in row.iter_mut() {
                    *x = -*x;
                }
            }
        }
    }
}
