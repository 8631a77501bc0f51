//! Lattice Hamiltonians for single and coupled quasiperiodic chains.
//!
//! Every model is a real symmetric matrix on a periodic ring whose length is a
//! Fibonacci number F_n, so the quasiperiodic frequency β_n = F_{n-1}/F_n is
//! commensurate with the ring and the Aubry duality transform is exactly
//! unitary. Coupled models are 2F_n × 2F_n with block structure
//! [H1, Hc; Hcᵀ, H2]: chain 1 occupies sites [0, F_n), chain 2 [F_n, 2F_n).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::matrix::SymMatrix;

/// Golden-mean inverse (√5 − 1)/2, the irrational frequency the approximants converge to.
pub const GOLDEN_BETA: f64 = 0.618_033_988_749_894_9;

/// System size ladder entry: ring length F_n with frequency β_n = F_{n-1}/F_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibonacciApproximant {
    n: u32,
    f_n: u64,
    f_nm1: u64,
}

impl FibonacciApproximant {
    pub fn index(&self) -> u32 {
        self.n
    }

    /// Sites per chain, L_chain = F_n.
    pub fn sites(&self) -> usize {
        self.f_n as usize
    }

    /// Exact rational β_n as (F_{n-1}, F_n).
    pub fn beta_pair(&self) -> (u64, u64) {
        (self.f_nm1, self.f_n)
    }

    pub fn beta(&self) -> f64 {
        self.f_nm1 as f64 / self.f_n as f64
    }
}

/// Build the approximant for Fibonacci index n (F_1 = F_2 = 1).
///
/// Supported range 3 ≤ n ≤ 30; below 3 the ring is degenerate, above 30 the
/// dense solver is out of reach anyway.
pub fn fibonacci_approximant(n: u32) -> Result<FibonacciApproximant> {
    if !(3..=30).contains(&n) {
        return Err(Error::Parameter(format!(
            "fibonacci index n = {n} outside supported range 3..=30"
        )));
    }
    let (mut a, mut b) = (1u64, 1u64); // F_1, F_2
    for _ in 3..=n {
        let c = a + b;
        a = b;
        b = c;
    }
    Ok(FibonacciApproximant { n, f_n: b, f_nm1: a })
}

/// On-site quasiperiodic sequence g(m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    /// Flat chain, g = 0.
    None,
    /// g(m) = 2V cos(2πβm + φ).
    Aah { v: f64, phi: f64 },
    /// g(m) = 2V cos(2πβm + φ) / (1 − a cos(2πβm + φ)), |a| < 1.
    Gaah { v: f64, a: f64, phi: f64 },
    /// g(m) = 2V (1 + (−1)^m) cos(2πβm + φ); exactly zero on odd sites.
    Mosaic { v: f64, phi: f64 },
    /// g(m) = λ cos(πβ m^ν), 0 < ν < 1.
    SlowVarying { lambda: f64, nu: f64 },
    /// Explicit sampled sequence of length L_chain.
    Sampled(Vec<f64>),
}

/// Intra-chain hopping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HoppingKind {
    /// Matrix element sign·J between ring neighbors.
    Nearest { j: f64, sign: i8 },
    /// Matrix element J0·exp(−p·d(l,m)) between every pair, with the ring
    /// distance d = min(|l−m|, L−|l−m|).
    ExponentialLongRange { j0: f64, p: f64 },
}

/// One quasiperiodic chain on a Fibonacci ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub hopping: HoppingKind,
    pub potential: PotentialKind,
    /// ±1 factor multiplying g(m).
    pub potential_sign: i8,
    /// Uniform chemical shift added to every site.
    pub mu: f64,
    pub approximant: FibonacciApproximant,
}

impl ChainSpec {
    /// Nearest-neighbor chain with unit hopping and the given potential.
    pub fn new(potential: PotentialKind, approximant: FibonacciApproximant) -> Self {
        Self {
            hopping: HoppingKind::Nearest { j: 1.0, sign: 1 },
            potential,
            potential_sign: 1,
            mu: 0.0,
            approximant,
        }
    }

    pub fn with_hopping(mut self, hopping: HoppingKind) -> Self {
        self.hopping = hopping;
        self
    }

    pub fn with_potential_sign(mut self, sign: i8) -> Self {
        self.potential_sign = sign;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    fn validate(&self) -> Result<()> {
        match &self.potential {
            PotentialKind::Gaah { a, .. } => {
                if a.abs() >= 1.0 {
                    return Err(Error::Parameter(format!(
                        "GAAH requires |a| < 1 (bounded potential); got a = {a}"
                    )));
                }
            }
            PotentialKind::SlowVarying { nu, .. } => {
                if !(*nu > 0.0 && *nu < 1.0) {
                    return Err(Error::Parameter(format!(
                        "slow-varying potential requires 0 < nu < 1; got nu = {nu}"
                    )));
                }
            }
            PotentialKind::Sampled(seq) => {
                if seq.len() != self.approximant.sites() {
                    return Err(Error::Parameter(format!(
                        "sampled potential length {} != L_chain {}",
                        seq.len(),
                        self.approximant.sites()
                    )));
                }
            }
            _ => {}
        }
        match self.hopping {
            HoppingKind::Nearest { sign, .. } if sign != 1 && sign != -1 => Err(
                Error::Parameter(format!("hopping sign must be ±1; got {sign}")),
            ),
            HoppingKind::ExponentialLongRange { p, .. } if p <= 0.0 => Err(Error::Parameter(
                format!("long-range hopping requires p > 0; got p = {p}"),
            )),
            _ if self.potential_sign != 1 && self.potential_sign != -1 => Err(Error::Parameter(
                format!("potential sign must be ±1; got {}", self.potential_sign),
            )),
            _ => Ok(()),
        }
    }
}

/// On-site value potential_sign·g(m) + mu at site m ∈ [0, L_chain).
pub fn potential_value(spec: &ChainSpec, m: usize) -> f64 {
    let l = spec.approximant.sites();
    assert!(m < l, "site index {m} out of range 0..{l}");
    let beta = spec.approximant.beta();
    let g = match &spec.potential {
        PotentialKind::None => 0.0,
        PotentialKind::Aah { v, phi } => 2.0 * v * (2.0 * PI * beta * m as f64 + phi).cos(),
        PotentialKind::Gaah { v, a, phi } => {
            let c = (2.0 * PI * beta * m as f64 + phi).cos();
            2.0 * v * c / (1.0 - a * c)
        }
        PotentialKind::Mosaic { v, phi } => {
            // the (1 + (−1)^m) factor vanishes exactly on odd sites
            if m % 2 == 1 {
                0.0
            } else {
                4.0 * v * (2.0 * PI * beta * m as f64 + phi).cos()
            }
        }
        PotentialKind::SlowVarying { lambda, nu } => {
            lambda * (PI * beta * (m as f64).powf(*nu)).cos()
        }
        PotentialKind::Sampled(seq) => seq[m],
    };
    f64::from(spec.potential_sign) * g + spec.mu
}

/// Inter-chain coupling form, all real symmetric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingKind {
    /// t_v Σ a†_m b_m + h.c.
    Rung { t_v: f64 },
    /// t_v Σ (a†_m b_m + a†_{m+1} b_m + a†_m b_{m+1}) + h.c.
    RungPlusCross { t_v: f64 },
    /// t_v Σ (a†_m b_{m+1} − a†_m b_{m−1}) + h.c.
    AntisymmetricCross { t_v: f64 },
}

impl CouplingKind {
    pub fn strength(&self) -> f64 {
        match *self {
            CouplingKind::Rung { t_v }
            | CouplingKind::RungPlusCross { t_v }
            | CouplingKind::AntisymmetricCross { t_v } => t_v,
        }
    }

    /// Same form with a new strength; `with_strength(0.0)` decouples the chains.
    pub fn with_strength(&self, t_v: f64) -> Self {
        match self {
            CouplingKind::Rung { .. } => CouplingKind::Rung { t_v },
            CouplingKind::RungPlusCross { .. } => CouplingKind::RungPlusCross { t_v },
            CouplingKind::AntisymmetricCross { .. } => CouplingKind::AntisymmetricCross { t_v },
        }
    }
}

/// Two chains on one Fibonacci ring plus a local inter-chain coupling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoupledModelSpec {
    pub chain1: ChainSpec,
    pub chain2: ChainSpec,
    pub coupling: CouplingKind,
}

impl CoupledModelSpec {
    pub fn new(chain1: ChainSpec, chain2: ChainSpec, coupling: CouplingKind) -> Result<Self> {
        if chain1.approximant != chain2.approximant {
            return Err(Error::Parameter(
                "both chains must share one Fibonacci approximant".into(),
            ));
        }
        Ok(Self {
            chain1,
            chain2,
            coupling,
        })
    }

    pub fn approximant(&self) -> FibonacciApproximant {
        self.chain1.approximant
    }

    /// Total matrix dimension 2·F_n.
    pub fn dim(&self) -> usize {
        2 * self.chain1.approximant.sites()
    }

    /// Same model with the inter-chain coupling switched off.
    pub fn decoupled(&self) -> Self {
        Self {
            chain1: self.chain1.clone(),
            chain2: self.chain2.clone(),
            coupling: self.coupling.with_strength(0.0),
        }
    }

    /// Stable content hash of the spec (serde JSON bytes through FNV-1a).
    pub fn spec_hash(&self) -> u64 {
        spec_hash_of(self)
    }

    /// AAH chain of depth V coupled to a free chain by a rung coupling.
    pub fn minimal(v: f64, t_v: f64, approximant: FibonacciApproximant) -> Self {
        Self {
            chain1: ChainSpec::new(PotentialKind::Aah { v, phi: 0.0 }, approximant),
            chain2: ChainSpec::new(PotentialKind::None, approximant),
            coupling: CouplingKind::Rung { t_v },
        }
    }

    /// Two AAH chains related by the inter-chain duality: chain 1 has unit
    /// hopping and potential depth V, chain 2 has hopping J and unit depth.
    /// All states are critical on the self-dual line J = V.
    pub fn dual_pair(j: f64, v: f64, t_v: f64, approximant: FibonacciApproximant) -> Self {
        Self {
            chain1: ChainSpec::new(PotentialKind::Aah { v, phi: 0.0 }, approximant),
            chain2: ChainSpec::new(PotentialKind::Aah { v: 1.0, phi: 0.0 }, approximant)
                .with_hopping(HoppingKind::Nearest { j, sign: 1 }),
            coupling: CouplingKind::Rung { t_v },
        }
    }

    /// Spin-orbit-coupled lattice written as two AAH chains: the up component
    /// sees amplitude (1+λ)V, the down component sees hopping sign −1 and
    /// amplitude −(1−λ)V, and the spin-flip hopping is the antisymmetric
    /// cross coupling. Depth convention: a chain amplitude (1±λ)V·cos maps
    /// onto Aah { v: (1±λ)V/2 } since Aah carries the factor 2.
    pub fn soc(v: f64, lambda: f64, t_so: f64, approximant: FibonacciApproximant) -> Self {
        Self {
            chain1: ChainSpec::new(
                PotentialKind::Aah {
                    v: (1.0 + lambda) * v / 2.0,
                    phi: 0.0,
                },
                approximant,
            ),
            chain2: ChainSpec::new(
                PotentialKind::Aah {
                    v: (1.0 - lambda) * v / 2.0,
                    phi: 0.0,
                },
                approximant,
            )
            .with_hopping(HoppingKind::Nearest { j: 1.0, sign: -1 })
            .with_potential_sign(-1),
            coupling: CouplingKind::AntisymmetricCross { t_v: t_so },
        }
    }

    /// GAAH chain coupled to a free chain by a rung coupling.
    pub fn coupled_gaah(v: f64, a: f64, t_v: f64, approximant: FibonacciApproximant) -> Self {
        Self {
            chain1: ChainSpec::new(PotentialKind::Gaah { v, a, phi: 0.0 }, approximant),
            chain2: ChainSpec::new(PotentialKind::None, approximant),
            coupling: CouplingKind::Rung { t_v },
        }
    }

    /// Mosaic chain coupled to a free chain by a rung coupling.
    pub fn coupled_mosaic(v: f64, t_v: f64, approximant: FibonacciApproximant) -> Self {
        Self {
            chain1: ChainSpec::new(PotentialKind::Mosaic { v, phi: 0.0 }, approximant),
            chain2: ChainSpec::new(PotentialKind::None, approximant),
            coupling: CouplingKind::Rung { t_v },
        }
    }
}

pub(crate) fn spec_hash_of<T: Serialize>(spec: &T) -> u64 {
    use crate::matrix::{fnv1a_init, fnv1a_u64};
    let bytes = serde_json::to_vec(spec).expect("specs serialize infallibly");
    let mut h = fnv1a_init();
    for b in bytes {
        h = fnv1a_u64(h, b as u64);
    }
    h
}

/// Single-chain Hamiltonian, L_chain × L_chain, periodic boundary conditions.
pub fn build_single_chain(spec: &ChainSpec) -> Result<SymMatrix> {
    spec.validate()?;
    let l = spec.approximant.sites();
    let mut h = SymMatrix::zeros(l);
    add_chain_block(&mut h, spec, 0);
    Ok(h)
}

/// Coupled two-chain Hamiltonian, 2L × 2L, block structure [H1, Hc; Hcᵀ, H2].
pub fn build_hamiltonian(spec: &CoupledModelSpec) -> Result<SymMatrix> {
    spec.chain1.validate()?;
    spec.chain2.validate()?;
    let l = spec.approximant().sites();
    let mut h = SymMatrix::zeros(2 * l);
    add_chain_block(&mut h, &spec.chain1, 0);
    add_chain_block(&mut h, &spec.chain2, l);
    // chain-2 operators a_m live at global index l+m, chain-1 operators b_m at m
    match spec.coupling {
        CouplingKind::Rung { t_v } => {
            for m in 0..l {
                h.add_sym(l + m, m, t_v);
            }
        }
        CouplingKind::RungPlusCross { t_v } => {
            for m in 0..l {
                h.add_sym(l + m, m, t_v);
                h.add_sym(l + (m + 1) % l, m, t_v);
                h.add_sym(l + m, (m + 1) % l, t_v);
            }
        }
        CouplingKind::AntisymmetricCross { t_v } => {
            for m in 0..l {
                h.add_sym(l + m, (m + 1) % l, t_v);
                h.add_sym(l + m, (m + l - 1) % l, -t_v);
            }
        }
    }
    Ok(h)
}

fn add_chain_block(h: &mut SymMatrix, spec: &ChainSpec, offset: usize) {
    let l = spec.approximant.sites();
    for m in 0..l {
        h.add_sym(offset + m, offset + m, potential_value(spec, m));
    }
    match spec.hopping {
        HoppingKind::Nearest { j, sign } => {
            let t = f64::from(sign) * j;
            for m in 0..l {
                h.add_sym(offset + m, offset + (m + 1) % l, t);
            }
        }
        HoppingKind::ExponentialLongRange { j0, p } => {
            for a in 0..l {
                for b in (a + 1)..l {
                    let d = (b - a).min(l - (b - a));
                    h.set_sym(offset + a, offset + b, j0 * (-p * d as f64).exp());
                }
            }
        }
    }
}

/// Dual partner of a nearest-neighbor AAH chain at φ = 0: hopping and
/// potential amplitudes swap roles, J ↔ V. On the commensurate ring the two
/// spectra coincide exactly.
pub fn dual_partner(spec: &ChainSpec) -> Result<ChainSpec> {
    let (j, sign) = match spec.hopping {
        HoppingKind::Nearest { j, sign } => (j, sign),
        _ => {
            return Err(Error::Unsupported(
                "dual partner requires nearest-neighbor hopping".into(),
            ))
        }
    };
    let v = match spec.potential {
        PotentialKind::Aah { v, phi } if phi == 0.0 => v,
        _ => {
            return Err(Error::Unsupported(
                "dual partner requires an AAH potential with phi = 0".into(),
            ))
        }
    };
    if sign != 1 || spec.potential_sign != 1 || spec.mu != 0.0 {
        return Err(Error::Unsupported(
            "dual partner defined for sign +1, potential_sign +1, mu = 0".into(),
        ));
    }
    Ok(ChainSpec::new(
        PotentialKind::Aah { v: j, phi: 0.0 },
        spec.approximant,
    )
    .with_hopping(HoppingKind::Nearest { j: v, sign: 1 }))
}

/// Analytic mobility-edge predicates quoted for the exactly solvable models.
pub mod mobility {
    /// GAAH edge in the duality form a·E_c = 2 − 2V (J = 1).
    pub fn gaah_edge_duality_form(v: f64, a: f64) -> f64 {
        (2.0 - 2.0 * v) / a
    }

    /// GAAH edge in the sign form a·E_c = 2·sign(|J| − |V|).
    pub fn gaah_edge_sign_form(j: f64, v: f64, a: f64) -> f64 {
        2.0 * (j.abs() - v.abs()).signum() / a
    }

    /// True on the extended side of the GAAH duality-form edge (J = 1):
    /// a·E < 2 − 2V.
    pub fn gaah_extended(e: f64, v: f64, a: f64) -> bool {
        a * e < 2.0 - 2.0 * v
    }

    /// Mosaic edges ±J/(2V); extended inside, localized outside.
    pub fn mosaic_edges(j: f64, v: f64) -> (f64, f64) {
        let ec = j / (2.0 * v);
        (-ec.abs(), ec.abs())
    }

    pub fn mosaic_extended(e: f64, j: f64, v: f64) -> bool {
        let (lo, hi) = mosaic_edges(j, v);
        e > lo && e < hi
    }

    /// Long-range AAH edge from cosh(p) = (E + J)/V.
    pub fn laah_edge(j: f64, v: f64, p: f64) -> f64 {
        v * p.cosh() - j
    }

    /// Slow-varying-potential edges ±|2 − λ|.
    pub fn slow_varying_edges(lambda: f64) -> (f64, f64) {
        let ec = (2.0 - lambda).abs();
        (-ec, ec)
    }
}
