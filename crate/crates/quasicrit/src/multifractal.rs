//! Wave-function statistics: q-moments, fractal dimensions, scaling indices,
//! singular-spectrum estimates, windowed averages, and finite-size fits.
//!
//! The scaling log base is the total site count of the eigenvector (2F_n for
//! coupled models, F_n for single chains), which is simply the vector length
//! for every lattice model here. Classification thresholds like τ₂ > 0.8 are
//! finite-size reporting conventions; thermodynamic statements always go
//! through [`extrapolate`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::EigenSystem;

/// P_q = Σ |ψ|^{2q} for a unit-norm state; P_2 is the IPR.
pub fn moment_pq(state: &[f64], q: f64) -> f64 {
    if q == 2.0 {
        state.iter().map(|&x| (x * x) * (x * x)).sum()
    } else {
        state.iter().map(|&x| (x * x).powf(q)).sum()
    }
}

/// Finite-size fractal dimension D_q(L) = −ln P_q / ((q−1) ln L).
///
/// The q = 1 case is the Shannon limit D_1 = −Σ p ln p / ln L (the q-moment
/// itself is singular there).
pub fn fractal_dimension(state: &[f64], q: f64, l_total: usize) -> f64 {
    let ln_l = (l_total as f64).ln();
    if (q - 1.0).abs() < 1e-12 {
        let s: f64 = state
            .iter()
            .map(|&x| {
                let p = x * x;
                if p > 0.0 {
                    -p * p.ln()
                } else {
                    0.0
                }
            })
            .sum();
        s / ln_l
    } else {
        -moment_pq(state, q).ln() / (ln_l * (q - 1.0))
    }
}

/// Per-site scaling indices α_m = −ln |ψ_m|² / ln L; exact zeros map to +∞
/// and fall outside every finite histogram range.
pub fn alpha_indices(state: &[f64], l_total: usize) -> Vec<f64> {
    let ln_l = (l_total as f64).ln();
    state
        .iter()
        .map(|&x| {
            let p = x * x;
            if p == 0.0 {
                f64::INFINITY
            } else {
                -p.ln() / ln_l
            }
        })
        .collect()
}

/// α_min = −ln(max |ψ|²)/ln L: 1 for extended, 0 for localized, in between
/// for multifractal states.
pub fn alpha_min(state: &[f64], l_total: usize) -> f64 {
    let pmax = state.iter().map(|&x| x * x).fold(0.0f64, f64::max);
    -pmax.ln() / (l_total as f64).ln()
}

/// Per-state statistics row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateStats {
    /// 0-based state index; emitted files add 1 for figure parity.
    pub index: usize,
    pub energy: f64,
    /// (q, P_q) pairs for the configured q list.
    pub p_q: Vec<(f64, f64)>,
    /// D_2(L), the fractal dimension quoted as τ₂(L).
    pub tau2: f64,
    pub alpha_min: f64,
    pub ipr: f64,
    pub npr: f64,
}

/// Compute per-state statistics for every eigenstate. `l_total` is the
/// scaling log base (equals the eigenvector length for lattice models).
pub fn analyze_states(es: &EigenSystem, q_list: &[f64], l_total: usize) -> Vec<StateStats> {
    let n = es.dim();
    (0..n)
        .into_par_iter()
        .with_min_len(16)
        .map(|j| {
            let psi = es.state(j);
            let ipr = moment_pq(psi, 2.0);
            StateStats {
                index: j,
                energy: es.energies()[j],
                p_q: q_list.iter().map(|&q| (q, moment_pq(psi, q))).collect(),
                tau2: fractal_dimension(psi, 2.0, l_total),
                alpha_min: alpha_min(psi, l_total),
                ipr,
                npr: 1.0 / (n as f64 * ipr),
            }
        })
        .collect()
}

/// Which scalar of [`StateStats`] a windowed average runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatField {
    Tau2,
    AlphaMin,
    Ipr,
    Npr,
}

impl StatField {
    pub fn get(&self, s: &StateStats) -> f64 {
        match self {
            StatField::Tau2 => s.tau2,
            StatField::AlphaMin => s.alpha_min,
            StatField::Ipr => s.ipr,
            StatField::Npr => s.npr,
        }
    }
}

/// Arithmetic mean of `field` over states with emin ≤ E ≤ emax. An empty
/// window is an explicit error, never a silent zero.
pub fn window_average(
    stats: &[StateStats],
    emin: f64,
    emax: f64,
    field: StatField,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for s in stats {
        if s.energy >= emin && s.energy <= emax {
            sum += field.get(s);
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::EmptyWindow { emin, emax });
    }
    Ok(sum / count as f64)
}

/// Abscissa of a finite-size fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbscissaKind {
    /// α_min(n) = α_min(∞) + A/n
    OneOverN,
    /// D_q(L) = D_q + A/ln L
    OneOverLnL,
}

/// One finite-size sample of a windowed quantity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScalingSample {
    pub n: u32,
    pub l_total: usize,
    pub value: f64,
}

/// A quantity sampled over a ladder of Fibonacci indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingSeries {
    pub name: String,
    pub abscissa: AbscissaKind,
    pub samples: Vec<ScalingSample>,
}

/// Ordinary-least-squares extrapolation of a [`ScalingSeries`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScalingFit {
    /// Thermodynamic-limit estimate (abscissa → 0).
    pub intercept: f64,
    pub slope: f64,
    /// RMS residual of the affine fit; reported, never hidden.
    pub residual: f64,
}

impl ScalingSeries {
    pub fn abscissa_of(&self, s: &ScalingSample) -> f64 {
        match self.abscissa {
            AbscissaKind::OneOverN => 1.0 / s.n as f64,
            AbscissaKind::OneOverLnL => 1.0 / (s.l_total as f64).ln(),
        }
    }
}

/// OLS fit of value against the series abscissa; needs ≥ 3 samples and a
/// non-degenerate abscissa.
pub fn extrapolate(series: &ScalingSeries) -> Result<ScalingFit> {
    let m = series.samples.len();
    if m < 3 {
        return Err(Error::Fit(format!(
            "series '{}' has {m} samples; need at least 3",
            series.name
        )));
    }
    let xs: Vec<f64> = series.samples.iter().map(|s| series.abscissa_of(s)).collect();
    let ys: Vec<f64> = series.samples.iter().map(|s| s.value).collect();
    let xm = xs.iter().sum::<f64>() / m as f64;
    let ym = ys.iter().sum::<f64>() / m as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    if sxx < 1e-30 {
        return Err(Error::Fit(format!(
            "series '{}' has a degenerate abscissa",
            series.name
        )));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<f64>()
        / m as f64)
        .sqrt();
    Ok(ScalingFit {
        intercept,
        slope,
        residual,
    })
}

/// Binned α_min distribution with the finite-size singular-spectrum estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlphaHistogram {
    pub delta_alpha: f64,
    /// counts[b] covers [b·Δα, (b+1)·Δα); the range spans [0, 1 + Δα).
    pub counts: Vec<u64>,
    /// f_L(α) = ln(count)/ln(L_total) for occupied bins, NaN for empty ones.
    pub f_l: Vec<f64>,
    pub l_total: usize,
    /// Number of modes above the 5%-of-peak noise floor (see [`alpha_histogram`]).
    pub modes: usize,
}

impl AlphaHistogram {
    pub fn bin_edges(&self, b: usize) -> (f64, f64) {
        (b as f64 * self.delta_alpha, (b + 1) as f64 * self.delta_alpha)
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Histogram of α_min values over [0, 1 + Δα).
///
/// Modality counts maximal runs of bins strictly above the noise floor (5% of
/// the peak count): peaks merge unless the valley between them drops below
/// the floor, which is the structure the bimodal/unimodal distinction needs.
pub fn alpha_histogram(alpha_mins: &[f64], delta_alpha: f64, l_total: usize) -> AlphaHistogram {
    assert!(delta_alpha > 0.0, "bin width must be positive");
    let nbins = (1.0 / delta_alpha).ceil() as usize + 1;
    let mut counts = vec![0u64; nbins];
    for &a in alpha_mins {
        if a.is_finite() && a >= 0.0 {
            let b = ((a / delta_alpha) as usize).min(nbins - 1);
            counts[b] += 1;
        }
    }
    let ln_l = (l_total as f64).ln();
    let f_l: Vec<f64> = counts
        .iter()
        .map(|&c| if c > 0 { (c as f64).ln() / ln_l } else { f64::NAN })
        .collect();
    let peak = counts.iter().copied().max().unwrap_or(0);
    let floor = 0.05 * peak as f64;
    let mut modes = 0;
    let mut in_run = false;
    for &c in &counts {
        let above = c as f64 > floor;
        if above && !in_run {
            modes += 1;
        }
        in_run = above;
    }
    AlphaHistogram {
        delta_alpha,
        counts,
        f_l,
        l_total,
        modes,
    }
}

/// Means of per-state IPR and NPR over the whole spectrum.
pub fn mean_ipr_npr(es: &EigenSystem) -> (f64, f64) {
    let n = es.dim();
    let mut si = 0.0;
    let mut sn = 0.0;
    for j in 0..n {
        let ipr = moment_pq(es.state(j), 2.0);
        si += ipr;
        sn += 1.0 / (n as f64 * ipr);
    }
    (si / n as f64, sn / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0 / (n as f64).sqrt(); n]
    }

    #[test]
    fn moment_examples() {
        let u = uniform(64);
        for q in [0.5, 1.5, 2.0, 3.0] {
            assert!((moment_pq(&u, q) - 64f64.powf(1.0 - q)).abs() < 1e-12);
        }
        let mut single = vec![0.0; 10];
        single[3] = 1.0;
        for q in [0.5, 2.0, 4.0] {
            assert!((moment_pq(&single, q) - 1.0).abs() < 1e-15);
        }
        let two = vec![1.0 / 2.0f64.sqrt(), 1.0 / 2.0f64.sqrt()];
        assert!((moment_pq(&two, 2.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fractal_dimension_limits() {
        let u = uniform(128);
        for q in [0.5, 1.5, 2.0, 3.0, 4.0] {
            assert!((fractal_dimension(&u, q, 128) - 1.0).abs() < 1e-12);
        }
        // Shannon limit at q = 1
        assert!((fractal_dimension(&u, 1.0, 128) - 1.0).abs() < 1e-12);
        let mut single = vec![0.0; 128];
        single[0] = 1.0;
        assert_eq!(fractal_dimension(&single, 2.0, 128), 0.0);
        assert_eq!(fractal_dimension(&single, 1.0, 128), 0.0);
    }

    #[test]
    fn alpha_examples() {
        let u = uniform(100);
        for a in alpha_indices(&u, 100) {
            assert!((a - 1.0).abs() < 1e-12);
        }
        assert!((alpha_min(&u, 100) - 1.0).abs() < 1e-12);
        let mut single = vec![0.0; 100];
        single[7] = 1.0;
        let idx = alpha_indices(&single, 100);
        assert_eq!(idx[7], 0.0);
        assert!(idx[0].is_infinite());
        assert_eq!(alpha_min(&single, 100), 0.0);
        // amplitude L^{-1/2} gives alpha = 1/2
        let mut half = vec![0.0; 100];
        half[0] = (100f64).powf(-0.25);
        let idx = alpha_indices(&half, 100);
        assert!((idx[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn window_average_single_and_empty() {
        let stats = vec![
            StateStats {
                index: 0,
                energy: 1.0,
                p_q: vec![],
                tau2: 0.4,
                alpha_min: 0.3,
                ipr: 0.1,
                npr: 0.5,
            },
            StateStats {
                index: 1,
                energy: 5.0,
                p_q: vec![],
                tau2: 0.8,
                alpha_min: 0.9,
                ipr: 0.01,
                npr: 0.9,
            },
        ];
        let v = window_average(&stats, 0.0, 2.0, StatField::Tau2).unwrap();
        assert_eq!(v, 0.4);
        assert!(matches!(
            window_average(&stats, 10.0, 20.0, StatField::Tau2),
            Err(Error::EmptyWindow { .. })
        ));
    }

    #[test]
    fn extrapolate_constant_and_affine() {
        let mk = |vals: &[(u32, f64)]| ScalingSeries {
            name: "t".into(),
            abscissa: AbscissaKind::OneOverN,
            samples: vals
                .iter()
                .map(|&(n, value)| ScalingSample {
                    n,
                    l_total: 2 * n as usize,
                    value,
                })
                .collect(),
        };
        let fit = extrapolate(&mk(&[(10, 0.7), (12, 0.7), (14, 0.7)])).unwrap();
        assert!((fit.intercept - 0.7).abs() < 1e-14);
        assert!(fit.slope.abs() < 1e-12);
        // exact affine series value = 0.4 + 1.3/n
        let samples: Vec<(u32, f64)> = (10..16).map(|n| (n, 0.4 + 1.3 / n as f64)).collect();
        let fit = extrapolate(&mk(&samples)).unwrap();
        assert!((fit.intercept - 0.4).abs() < 1e-12);
        assert!((fit.slope - 1.3).abs() < 1e-10);
        assert!(fit.residual < 1e-14);
    }

    #[test]
    fn extrapolate_errors() {
        let short = ScalingSeries {
            name: "s".into(),
            abscissa: AbscissaKind::OneOverN,
            samples: vec![
                ScalingSample {
                    n: 10,
                    l_total: 20,
                    value: 1.0,
                },
                ScalingSample {
                    n: 12,
                    l_total: 24,
                    value: 1.0,
                },
            ],
        };
        assert!(extrapolate(&short).is_err());
        let degenerate = ScalingSeries {
            name: "d".into(),
            abscissa: AbscissaKind::OneOverN,
            samples: vec![
                ScalingSample {
                    n: 10,
                    l_total: 20,
                    value: 1.0,
                },
                ScalingSample {
                    n: 10,
                    l_total: 20,
                    value: 2.0,
                },
                ScalingSample {
                    n: 10,
                    l_total: 20,
                    value: 3.0,
                },
            ],
        };
        assert!(extrapolate(&degenerate).is_err());
    }

    #[test]
    fn histogram_counts_and_modes() {
        // all values in one bin
        let h = alpha_histogram(&[0.5, 0.5001, 0.5002], 0.02, 1000);
        assert_eq!(h.total_count(), 3);
        assert_eq!(h.modes, 1);
        // two well-separated clusters
        let vals: Vec<f64> = std::iter::repeat(0.05)
            .take(30)
            .chain(std::iter::repeat(0.95).take(30))
            .collect();
        let h = alpha_histogram(&vals, 0.02, 1000);
        assert_eq!(h.modes, 2);
        assert_eq!(h.total_count(), 60);
        // f_L of a bin with all counts: ln(count)/ln(L)
        let h = alpha_histogram(&[0.3; 8], 0.02, 100);
        let b = (0.3 / 0.02) as usize;
        assert!((h.f_l[b] - 8f64.ln() / 100f64.ln()).abs() < 1e-12);
        assert!(h.f_l[0].is_nan());
    }

    #[test]
    fn infinite_alpha_excluded_from_histogram() {
        let h = alpha_histogram(&[0.2, f64::INFINITY, 0.4], 0.02, 100);
        assert_eq!(h.total_count(), 2);
    }

    #[test]
    fn dimer_mean_ipr_npr() {
        use crate::matrix::SymMatrix;
        // symmetric 2-site dimer: both states have IPR 1/2, so ⟨NPR⟩ = 1
        let mut h = SymMatrix::zeros(2);
        h.set_sym(0, 1, -1.0);
        let es = crate::spectral::diagonalize(&h).unwrap();
        let (mi, mn) = mean_ipr_npr(&es);
        assert!((mi - 0.5).abs() < 1e-12);
        assert!((mn - 1.0).abs() < 1e-12);
    }
}
