//! Closed-form reduced density matrix of the central spins.
//!
//! `ρ_c(t)_{ij} = c_i c_j* ρ̃_{ij}(t)` with
//! `ρ̃_{ij}(t) = Tr_b[e^{itH_j} e^{−itH_i} e^{−βH0(h)}] / Z` and
//! `H_m = H0(h + 2ηm)`. The trace factorizes over momenta: one four-state
//! factor per (k, −k) pair and one two-state factor per self-conjugate
//! momentum (k = 0, π). Every factor is divided by its own share of `Z`
//! before the product is taken, so no intermediate overflows at large β.

use crate::dicke::{coherent_coeffs, CentralParams, CoherentCoeffs};
use crate::error::{Error, Result};
use crate::numkit::{c64, herm_eig, ComplexMatrix, HermEigen, C64};
use crate::xychain::{shifted_mode, ChainParams, MomentumMode, Pairing, ShiftedModeData};

/// Hermiticity and trace tolerance of [`DensityMatrix`].
pub const DENSITY_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated (and clipped) in a density matrix.
pub const NEGATIVITY_TOL: f64 = 1e-9;

/// Hermitian, unit-trace, positive semidefinite matrix in the Dicke basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    rho: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(rho: ComplexMatrix) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::NotDensityMatrix(format!("not square ({}x{})", rho.rows(), rho.cols())));
        }
        if !rho.is_finite() {
            return Err(Error::NotDensityMatrix("non-finite entries".into()));
        }
        let herm = rho.hermiticity_error();
        if herm > DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!("Hermiticity error {herm:e}")));
        }
        let tr = rho.trace();
        if (tr - c64(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::NotDensityMatrix(format!("trace {tr}")));
        }
        let min = herm_eig(&rho)?.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -NEGATIVITY_TOL {
            return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { rho })
    }

    /// Pure state `|ψ⟩⟨ψ|` of a normalized vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { rho: ComplexMatrix::identity(dim).scale(c64(1.0 / dim as f64, 0.0)) }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    /// Spectral decomposition with eigenvalues in `[−1e−9, 0)` clipped to zero
    /// and the spectrum renormalized to unit sum.
    pub fn repaired_spectrum(&self) -> Result<HermEigen> {
        let mut eig = herm_eig(&self.rho)?;
        if let Some(&min) = eig.eigenvalues.first() {
            if min < -NEGATIVITY_TOL {
                return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
            }
        }
        for p in eig.eigenvalues.iter_mut() {
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = eig.eigenvalues.iter().sum();
        for p in eig.eigenvalues.iter_mut() {
            *p /= total;
        }
        Ok(eig)
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        self.rho.trace_product(op)
    }
}

/// The A, B, C coefficients of one pair factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ABCFactors {
    pub a: C64,
    pub b: C64,
    pub c: f64,
}

/// `A = e^{−iY} + 2i sin²X sin Y`, `B = e^{−iY} + 2i cos²X sin Y`, `C = sin 2X sin Y`.
pub fn abc(x: f64, y: f64) -> ABCFactors {
    let (sx, cx) = x.sin_cos();
    let sy = y.sin();
    let phase = C64::from_polar(1.0, -y);
    ABCFactors {
        a: phase + c64(0.0, 2.0 * sx * sx * sy),
        b: phase + c64(0.0, 2.0 * cx * cx * sy),
        c: (2.0 * x).sin() * sy,
    }
}

fn require(mode: &MomentumMode, want: Pairing, what: &'static str) -> Result<()> {
    if mode.pairing != want {
        return Err(Error::ModeKind(what));
    }
    Ok(())
}

/// Unnormalized trace over the four states of a (k, −k) pair:
/// `2 + 2cosh(βΛ) C_i C_j + e^{βΛ} A_j A_i* + e^{−βΛ} B_j B_i*`.
pub fn paired_factor(
    mode: &MomentumMode,
    di: &ShiftedModeData,
    dj: &ShiftedModeData,
    beta: f64,
    t: f64,
) -> Result<C64> {
    require(mode, Pairing::Paired, "paired factor needs a 0 < k < π mode")?;
    let (fi, fj) = (abc(di.theta, di.energy * t), abc(dj.theta, dj.energy * t));
    let bl = beta * mode.dispersion;
    Ok(c64(2.0 + 2.0 * bl.cosh() * fi.c * fj.c, 0.0) + fj.a * fi.a.conj() * bl.exp() + fj.b * fi.b.conj() * (-bl).exp())
}

/// Trace over the two states of a self-conjugate mode (k = 0 or π):
/// `e^{βΛ/2} e^{−it(Ẽ_j − Ẽ_i)/2} + e^{−βΛ/2} e^{+it(Ẽ_j − Ẽ_i)/2}`.
///
/// `Ẽ_m = cos(2θ_m) E_m` is the single-mode energy signed relative to the bath
/// mode; θ_m is 0 or π/2 here, and it is π/2 exactly when the shifted field
/// pushes `h + 2ηm − λ cos k` through zero relative to `h − λ cos k`.
pub fn unpaired_factor(
    mode: &MomentumMode,
    di: &ShiftedModeData,
    dj: &ShiftedModeData,
    beta: f64,
    t: f64,
) -> Result<C64> {
    require(mode, Pairing::Unpaired, "unpaired factor needs k = 0 or k = π")?;
    let delta = signed_energy(dj) - signed_energy(di);
    let half = beta * mode.dispersion / 2.0;
    Ok(C64::from_polar(half.exp(), -t * delta / 2.0) + C64::from_polar((-half).exp(), t * delta / 2.0))
}

fn signed_energy(d: &ShiftedModeData) -> f64 {
    (2.0 * d.theta).cos() * d.energy
}

/// [`paired_factor`] divided by `(2cosh(βΛ/2))²`.
fn paired_factor_normalized(mode: &MomentumMode, di: &ShiftedModeData, dj: &ShiftedModeData, beta: f64, t: f64) -> C64 {
    let (fi, fj) = (abc(di.theta, di.energy * t), abc(dj.theta, dj.energy * t));
    let x = (-beta * mode.dispersion).exp();
    let norm = (1.0 + x) * (1.0 + x);
    (c64(2.0 * x + (1.0 + x * x) * fi.c * fj.c, 0.0) + fj.a * fi.a.conj() + fj.b * fi.b.conj() * (x * x)) / norm
}

/// [`unpaired_factor`] divided by `2cosh(βΛ/2)`.
fn unpaired_factor_normalized(
    mode: &MomentumMode,
    di: &ShiftedModeData,
    dj: &ShiftedModeData,
    beta: f64,
    t: f64,
) -> C64 {
    let delta = signed_energy(dj) - signed_energy(di);
    let x = (-beta * mode.dispersion).exp();
    (C64::from_polar(1.0, -t * delta / 2.0) + C64::from_polar(x, t * delta / 2.0)) / (1.0 + x)
}

/// Precomputed mode data for evaluating `ρ_c(t)` on many times.
#[derive(Debug, Clone)]
pub struct ReducedStateModel {
    chain: ChainParams,
    central: CentralParams,
    coeffs: CoherentCoeffs,
    /// Paired and unpaired modes only; partners are folded into their representative.
    modes: Vec<MomentumMode>,
    /// `shifted[p][q]`: Dicke index p, mode q.
    shifted: Vec<Vec<ShiftedModeData>>,
}

impl ReducedStateModel {
    pub fn new(chain: &ChainParams, central: &CentralParams) -> Result<Self> {
        chain.validate()?;
        central.validate()?;
        let modes: Vec<MomentumMode> = chain.modes()?.into_iter().filter(|m| m.pairing != Pairing::Partner).collect();
        let shifted = central
            .labels()
            .into_iter()
            .map(|m| modes.iter().map(|mode| shifted_mode(chain, central.eta, m, mode.k)).collect())
            .collect();
        Ok(Self {
            chain: *chain,
            central: *central,
            coeffs: coherent_coeffs(central.n_central, central.vartheta, central.varphi)?,
            modes,
            shifted,
        })
    }

    pub fn chain(&self) -> &ChainParams {
        &self.chain
    }

    pub fn central(&self) -> &CentralParams {
        &self.central
    }

    pub fn coeffs(&self) -> &CoherentCoeffs {
        &self.coeffs
    }

    /// `ρ̃_{ij}(t)` for Dicke indices `i, j` in `0..=Nc`.
    pub fn bath_factor(&self, i: usize, j: usize, t: f64) -> C64 {
        let beta = self.central.beta;
        self.modes
            .iter()
            .enumerate()
            .map(|(q, mode)| {
                let (di, dj) = (&self.shifted[i][q], &self.shifted[j][q]);
                match mode.pairing {
                    Pairing::Paired => paired_factor_normalized(mode, di, dj, beta, t),
                    _ => unpaired_factor_normalized(mode, di, dj, beta, t),
                }
            })
            .product()
    }

    /// Matrix of all `ρ̃_{ij}(t)`.
    pub fn bath_factors(&self, t: f64) -> ComplexMatrix {
        let d = self.central.dim();
        ComplexMatrix::from_fn(d, d, |i, j| self.bath_factor(i, j, t))
    }

    /// Unvalidated `ρ_c(t)`.
    pub fn matrix_at(&self, t: f64) -> ComplexMatrix {
        let c = &self.coeffs.c;
        let d = self.central.dim();
        ComplexMatrix::from_fn(d, d, |i, j| c[i] * c[j].conj() * self.bath_factor(i, j, t))
    }

    /// `ρ_c(t)` checked against the density-matrix invariants.
    pub fn at(&self, t: f64) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix_at(t))
    }
}

/// Reduced density matrix of the central spins at time `t`.
pub fn reduced_density(chain: &ChainParams, central: &CentralParams, t: f64) -> Result<DensityMatrix> {
    ReducedStateModel::new(chain, central)?.at(t)
}
