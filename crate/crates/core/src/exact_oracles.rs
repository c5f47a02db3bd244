//! Dense brute-force ground truth: bath-chain Hamiltonians, the reduced state
//! of the central spins by explicit exponentiation, and the cavity-QED model
//! with its dispersive approximations.

use std::f64::consts::PI;

use crate::dicke::{coherent_coeffs, CentralParams};
use crate::error::{Error, Result};
use crate::numkit::{c64, herm_eig, kron, ComplexMatrix, HermEigen, Propagator, C64, MAX_DENSE_DIM};
use crate::reduced_state::DensityMatrix;
use crate::xychain::ChainParams;

/// Largest chain accepted by [`spin_chain_matrix`].
pub const MAX_CHAIN_SITES: usize = 12;
/// Largest bath accepted by [`central_reduced_oracle`].
pub const MAX_ORACLE_SITES: usize = 10;
/// Thermal weights below this are dropped from the oracle trace.
const THERMAL_FLOOR: f64 = 1e-18;

/// How the bond between the last and first site is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Plain periodic spin chain.
    PeriodicSpin,
    /// Boundary bond multiplied by `−P`, `P = ∏σᶻ`; the Jordan-Wigner fermions
    /// are then periodic in every parity sector and the momenta are `2πm/Nb`.
    PeriodicFermion,
}

/// `H0 = −½ Σ_i {(λ/2)[(1+γ)σˣσˣ + (1−γ)σʸσʸ] + hσᶻ}` on `2^Nb` states.
///
/// Bit `i` of a basis index is 1 when site `i` points down.
pub fn spin_chain_matrix(p: &ChainParams, boundary: Boundary) -> Result<ComplexMatrix> {
    p.validate()?;
    let n = p.n_sites;
    if n > MAX_CHAIN_SITES {
        return Err(Error::TooLarge(format!("{n} sites exceeds the dense limit of {MAX_CHAIN_SITES}")));
    }
    let dim = 1usize << n;
    let mut h = ComplexMatrix::zeros(dim, dim);
    for s in 0..dim {
        let downs = s.count_ones() as usize;
        let mz = n as f64 - 2.0 * downs as f64;
        h[(s, s)] += c64(-0.5 * p.field * mz, 0.0);
        for i in 0..n {
            let j = (i + 1) % n;
            let flipped = s ^ (1 << i) ^ (1 << j);
            let aligned = (s >> i) & 1 == (s >> j) & 1;
            let mut amp = -0.25 * p.coupling * if aligned { 2.0 * p.anisotropy } else { 2.0 };
            if boundary == Boundary::PeriodicFermion && j == 0 {
                let parity = if downs % 2 == 0 { 1.0 } else { -1.0 };
                amp *= -parity;
            }
            h[(flipped, s)] += c64(amp, 0.0);
        }
    }
    Ok(h)
}

/// Brute-force `ρ_c(t)` from `2^Nb`-dimensional propagators of every `H_m`.
#[derive(Debug, Clone)]
pub struct CentralOracle {
    central: CentralParams,
    coeffs: Vec<C64>,
    /// Thermal eigenvectors of `H0(h)` with non-negligible weight.
    thermal_vectors: ComplexMatrix,
    weights: Vec<f64>,
    /// Per Dicke index: eigen-decomposition of `H_m` and `V_m† V_0` on the thermal columns.
    branches: Vec<(HermEigen, ComplexMatrix)>,
}

impl CentralOracle {
    pub fn new(chain: &ChainParams, central: &CentralParams) -> Result<Self> {
        Self::with_boundary(chain, central, Boundary::PeriodicFermion)
    }

    /// Oracle on a chain closed with `boundary`. Only the fermion boundary
    /// corresponds to the closed form at finite size.
    pub fn with_boundary(chain: &ChainParams, central: &CentralParams, boundary: Boundary) -> Result<Self> {
        central.validate()?;
        if chain.n_sites > MAX_ORACLE_SITES {
            return Err(Error::TooLarge(format!("oracle limited to {MAX_ORACLE_SITES} bath sites")));
        }
        let h0 = herm_eig(&spin_chain_matrix(chain, boundary)?)?;
        let e_min = h0.eigenvalues[0];
        let raw: Vec<f64> = h0.eigenvalues.iter().map(|e| (-central.beta * (e - e_min)).exp()).collect();
        let z: f64 = raw.iter().sum();
        let kept: Vec<usize> = (0..raw.len()).filter(|&a| raw[a] / z > THERMAL_FLOOR).collect();
        let dim = h0.dim();
        let thermal_vectors = ComplexMatrix::from_fn(dim, kept.len(), |r, c| h0.eigenvectors[(r, kept[c])]);
        let weights = kept.iter().map(|&a| raw[a] / z).collect();
        let branches = central
            .labels()
            .into_iter()
            .map(|m| {
                let hm = spin_chain_matrix(&chain.with_field(chain.field + 2.0 * central.eta * m), boundary)?;
                let eig = herm_eig(&hm)?;
                let overlap = eig.eigenvectors.adjoint().matmul(&thermal_vectors);
                Ok((eig, overlap))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            central: *central,
            coeffs: coherent_coeffs(central.n_central, central.vartheta, central.varphi)?.c,
            thermal_vectors,
            weights,
            branches,
        })
    }

    /// Number of thermal eigenstates carried in the trace.
    pub fn thermal_rank(&self) -> usize {
        self.thermal_vectors.cols()
    }

    /// Columns `e^{−itH_m}|a⟩` for every retained thermal eigenstate `|a⟩`.
    fn evolved(&self, p: usize, t: f64) -> ComplexMatrix {
        let (eig, overlap) = &self.branches[p];
        let phased = ComplexMatrix::from_fn(overlap.rows(), overlap.cols(), |r, c| {
            C64::from_polar(1.0, -eig.eigenvalues[r] * t) * overlap[(r, c)]
        });
        eig.eigenvectors.matmul(&phased)
    }

    /// Matrix of `Tr[e^{itH_j} e^{−itH_i} ρ_th]`.
    pub fn bath_factors(&self, t: f64) -> ComplexMatrix {
        let evolved: Vec<ComplexMatrix> = (0..self.branches.len()).map(|p| self.evolved(p, t)).collect();
        let d = evolved.len();
        let dim = self.thermal_vectors.rows();
        ComplexMatrix::from_fn(d, d, |i, j| {
            let (fi, fj) = (&evolved[i], &evolved[j]);
            self.weights
                .iter()
                .enumerate()
                .map(|(a, w)| (0..dim).map(|b| fj[(b, a)].conj() * fi[(b, a)]).sum::<C64>() * *w)
                .sum()
        })
    }

    pub fn matrix_at(&self, t: f64) -> ComplexMatrix {
        let f = self.bath_factors(t);
        let c = &self.coeffs;
        ComplexMatrix::from_fn(f.rows(), f.cols(), |i, j| c[i] * c[j].conj() * f[(i, j)])
    }

    pub fn at(&self, t: f64) -> Result<DensityMatrix> {
        DensityMatrix::new(self.matrix_at(t))
    }

    pub fn central(&self) -> &CentralParams {
        &self.central
    }
}

/// Reduced density matrix of the central spins by dense exponentiation.
pub fn central_reduced_oracle(chain: &ChainParams, central: &CentralParams, t: f64) -> Result<DensityMatrix> {
    CentralOracle::new(chain, central)?.at(t)
}

/// Parameters of the generalized Tavis-Cummings model. Frequencies are angular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub omega0: f64,
    pub omega_a: f64,
    pub g: f64,
    /// Mean photon number of the initial coherent state, `α = √n̄`.
    pub nbar: f64,
    /// Highest Fock level kept.
    pub fock_cutoff: usize,
    pub h0: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub n_bath: usize,
    /// Spin-coherent angles of the TC spins.
    pub theta: f64,
    pub phi: f64,
    /// Measured component `J_ζ = J_x cos ζ + J_y sin ζ`.
    pub zeta: f64,
}

impl CavityParams {
    /// Dispersive reference point: 6.9 GHz spins, 6.89 GHz cavity,
    /// g/2π = 1.05 MHz, n̄ = 40, four spins.
    pub fn reference() -> Self {
        let two_pi = 2.0 * PI;
        Self {
            omega0: two_pi * 6.9e9,
            omega_a: two_pi * 6.89e9,
            g: two_pi * 1.05e6,
            nbar: 40.0,
            fock_cutoff: 100,
            h0: 1e-5,
            lambda: 1.0,
            gamma: 1.0,
            n_bath: 4,
            theta: PI / 2.0,
            phi: 0.0,
            zeta: PI / 6.0,
        }
    }

    /// `Δ = ω0 − h0 − ωa`.
    pub fn detuning(&self) -> f64 {
        self.omega0 - self.h0 - self.omega_a
    }

    /// Smallest cutoff accepted for a given `n̄`.
    pub fn min_cutoff(nbar: f64) -> usize {
        (nbar + 6.0 * nbar.sqrt()).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega0,
            self.omega_a,
            self.g,
            self.nbar,
            self.h0,
            self.lambda,
            self.gamma,
            self.theta,
            self.phi,
            self.zeta,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("cavity parameters must be finite".into()));
        }
        if self.nbar < 0.0 {
            return Err(Error::InvalidParameter(format!("n̄ = {} must be non-negative", self.nbar)));
        }
        if self.fock_cutoff < Self::min_cutoff(self.nbar) {
            return Err(Error::InvalidParameter(format!(
                "fock_cutoff {} is below n̄ + 6√n̄ = {:.2}",
                self.fock_cutoff,
                self.nbar + 6.0 * self.nbar.sqrt()
            )));
        }
        if self.detuning() == 0.0 {
            return Err(Error::InvalidParameter("detuning ω0 − h0 − ωa must be nonzero".into()));
        }
        if self.n_bath == 0 {
            return Err(Error::InvalidParameter("need at least one TC spin".into()));
        }
        Ok(())
    }
}

/// Spin space used for the TC spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinSpace {
    /// All `2^Nb` configurations with the full XY chain.
    Full,
    /// Symmetric Dicke sector only; the two-body chain terms are dropped and
    /// `H0` reduces to its field term `−h0 J_z`.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CavityVariant {
    /// `ω0 J_z + ωa a†a + H0(h0) + g(a†J₋ + aJ₊)`.
    Original,
    /// `H0(h0 − ω0) + (2g²/Δ) J_z a†a + (g²/Δ) J₊J₋`.
    Eff2,
    /// `H0(h0 − ω0) + (2g²/Δ) J_z a†a`.
    Eff3,
}

/// Spin operators of the TC spins in the chosen space.
#[derive(Debug, Clone)]
struct SpinOps {
    jz: ComplexMatrix,
    jp: ComplexMatrix,
}

fn full_spin_ops(nb: usize) -> SpinOps {
    let dim = 1usize << nb;
    let jz = ComplexMatrix::from_fn(dim, dim, |r, c| {
        if r == c {
            c64(0.5 * (nb as f64 - 2.0 * r.count_ones() as f64), 0.0)
        } else {
            C64::default()
        }
    });
    let mut jp = ComplexMatrix::zeros(dim, dim);
    for s in 0..dim {
        for i in 0..nb {
            if (s >> i) & 1 == 1 {
                jp[(s ^ (1 << i), s)] += c64(1.0, 0.0);
            }
        }
    }
    SpinOps { jz, jp }
}

fn symmetric_spin_ops(nb: usize) -> SpinOps {
    let ops = crate::dicke::spin_matrices(nb as f64 / 2.0);
    let jp = &ops.sx + &ops.sy.scale(c64(0.0, 1.0));
    SpinOps { jz: ops.sz, jp }
}

/// Cavity-QED model on `(fock_cutoff + 1) ⊗ spin` states, photon index outermost.
#[derive(Debug, Clone)]
pub struct CavityModel {
    params: CavityParams,
    space: SpinSpace,
    spin: SpinOps,
}

impl CavityModel {
    pub fn new(params: &CavityParams, space: SpinSpace) -> Result<Self> {
        params.validate()?;
        let spin = match space {
            SpinSpace::Full => {
                if params.n_bath > MAX_CHAIN_SITES {
                    return Err(Error::TooLarge(format!("{} TC spins in the full space", params.n_bath)));
                }
                full_spin_ops(params.n_bath)
            }
            SpinSpace::Symmetric => symmetric_spin_ops(params.n_bath),
        };
        let dim = (params.fock_cutoff + 1) * spin.jz.rows();
        if dim > MAX_DENSE_DIM {
            return Err(Error::TooLarge(format!("cavity dimension {dim} exceeds {MAX_DENSE_DIM}")));
        }
        Ok(Self { params: *params, space, spin })
    }

    pub fn params(&self) -> &CavityParams {
        &self.params
    }

    pub fn spin_dim(&self) -> usize {
        self.spin.jz.rows()
    }

    pub fn fock_dim(&self) -> usize {
        self.params.fock_cutoff + 1
    }

    pub fn dim(&self) -> usize {
        self.spin_dim() * self.fock_dim()
    }

    fn chain_term(&self, field: f64) -> Result<ComplexMatrix> {
        match self.space {
            SpinSpace::Full => {
                let p = &self.params;
                if p.n_bath < 2 {
                    return Ok(self.spin.jz.scale(c64(-field, 0.0)));
                }
                // the chain needs an even site count; odd Nb keeps open bonds out of scope
                if p.n_bath % 2 == 1 {
                    return Err(Error::InvalidParameter("full-space cavity chain needs an even Nb".into()));
                }
                spin_chain_matrix(&ChainParams::new(p.n_bath, p.lambda, p.gamma, field)?, Boundary::PeriodicSpin)
            }
            SpinSpace::Symmetric => Ok(self.spin.jz.scale(c64(-field, 0.0))),
        }
    }

    fn number(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&(0..self.fock_dim()).map(|n| n as f64).collect::<Vec<_>>())
    }

    fn annihilation(&self) -> ComplexMatrix {
        let d = self.fock_dim();
        ComplexMatrix::from_fn(d, d, |r, c| if c == r + 1 { c64((c as f64).sqrt(), 0.0) } else { C64::default() })
    }

    pub fn hamiltonian(&self, variant: CavityVariant) -> Result<ComplexMatrix> {
        let p = &self.params;
        let id_f = ComplexMatrix::identity(self.fock_dim());
        let id_s = ComplexMatrix::identity(self.spin_dim());
        let n = self.number();
        let jz = &self.spin.jz;
        let jp = &self.spin.jp;
        let jm = jp.adjoint();
        let chi = p.g * p.g / p.detuning();
        let h = match variant {
            CavityVariant::Original => {
                let a = self.annihilation();
                let mut h = kron(&id_f, &jz.scale(c64(p.omega0, 0.0)));
                h = &h + &kron(&n.scale(c64(p.omega_a, 0.0)), &id_s);
                h = &h + &kron(&id_f, &self.chain_term(p.h0)?);
                let coupling = &kron(&a.adjoint(), &jm) + &kron(&a, jp);
                &h + &coupling.scale(c64(p.g, 0.0))
            }
            CavityVariant::Eff2 | CavityVariant::Eff3 => {
                let mut h = kron(&id_f, &self.chain_term(p.h0 - p.omega0)?);
                h = &h + &kron(&n, jz).scale(c64(2.0 * chi, 0.0));
                if variant == CavityVariant::Eff2 {
                    h = &h + &kron(&id_f, &jp.matmul(&jm).scale(c64(chi, 0.0)));
                }
                h
            }
        };
        Ok(h)
    }

    /// Truncated, renormalized coherent-state amplitudes and the discarded weight.
    pub fn coherent_photons(&self) -> (Vec<f64>, f64) {
        let nbar = self.params.nbar;
        let mut amps = Vec::with_capacity(self.fock_dim());
        // log-space Poisson amplitudes: e^{−n̄/2} n̄^{n/2} / √n!
        let mut ln = -nbar / 2.0;
        for n in 0..self.fock_dim() {
            if n > 0 {
                ln += 0.5 * (nbar.ln() - (n as f64).ln());
            }
            amps.push(if nbar == 0.0 {
                if n == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                ln.exp()
            });
        }
        let kept: f64 = amps.iter().map(|a| a * a).sum();
        let norm = kept.sqrt();
        (amps.into_iter().map(|a| a / norm).collect(), (1.0 - kept).max(0.0))
    }

    /// TC spin-coherent state `cos(θ/2)|↑⟩ + e^{iφ} sin(θ/2)|↓⟩` on every spin.
    pub fn spin_coherent(&self) -> Vec<C64> {
        let p = &self.params;
        let up = c64((p.theta / 2.0).cos(), 0.0);
        let down = C64::from_polar((p.theta / 2.0).sin(), p.phi);
        let nb = p.n_bath;
        match self.space {
            SpinSpace::Full => (0..1usize << nb)
                .map(|s| {
                    let d = s.count_ones() as i32;
                    up.powi(nb as i32 - d) * down.powi(d)
                })
                .collect(),
            SpinSpace::Symmetric => (0..=nb)
                .map(|idx| {
                    // index counts upward from m = −j, i.e. `nb − idx` spins down
                    let d = nb - idx;
                    let binom = (1..=d).fold(1.0, |acc, i| acc * (nb - d + i) as f64 / i as f64);
                    up.powi(idx as i32) * down.powi(d as i32) * binom.sqrt()
                })
                .collect(),
        }
    }

    /// `|α⟩ ⊗ |μ⟩`; fails when more than `1e−8` of the photon weight lies above the cutoff.
    pub fn initial_state(&self) -> Result<Vec<C64>> {
        let (photons, lost) = self.coherent_photons();
        if lost > 1e-8 {
            return Err(Error::Truncation(format!("coherent state loses {lost:e} above the Fock cutoff")));
        }
        let spin = self.spin_coherent();
        Ok(photons.iter().flat_map(|&a| spin.iter().map(move |&s| s * a)).collect())
    }

    /// `(⟨J_x⟩, ⟨J_y⟩)` of a full state vector.
    pub fn transverse(&self, psi: &[C64]) -> Result<(f64, f64)> {
        let ds = self.spin_dim();
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of length {} for dimension {}",
                psi.len(),
                self.dim()
            )));
        }
        let mut jp = C64::default();
        for block in psi.chunks(ds) {
            let moved = self.spin.jp.mul_vec(block);
            jp += block.iter().zip(&moved).map(|(a, b)| a.conj() * b).sum::<C64>();
        }
        Ok((jp.re, jp.im))
    }

    /// `⟨J_ζ⟩` with `J_ζ = J_x cos ζ + J_y sin ζ`.
    pub fn expectation_j(&self, psi: &[C64], zeta: f64) -> Result<f64> {
        let (jx, jy) = self.transverse(psi)?;
        Ok(jx * zeta.cos() + jy * zeta.sin())
    }

    /// Population of the two highest Fock levels.
    pub fn top_fock_population(&self, psi: &[C64]) -> f64 {
        let ds = self.spin_dim();
        let start = self.dim().saturating_sub(2 * ds);
        psi[start..].iter().map(|z| z.norm_sqr()).sum()
    }

    /// Joint photon-number distribution of a state.
    pub fn photon_distribution(&self, psi: &[C64]) -> Vec<f64> {
        psi.chunks(self.spin_dim()).map(|b| b.iter().map(|z| z.norm_sqr()).sum()).collect()
    }

    pub fn propagator(&self, variant: CavityVariant) -> Result<Propagator> {
        Propagator::new(&self.hamiltonian(variant)?)
    }
}

/// Highest allowed population of the top two Fock levels during evolution.
pub const LEAKAGE_LIMIT: f64 = 1e-6;

/// Transverse spin components of the original and effective evolutions on a time grid.
#[derive(Debug, Clone)]
pub struct KRatioSeries {
    pub n_bath: usize,
    pub times: Vec<f64>,
    /// `(⟨J_x⟩, ⟨J_y⟩)` under the original Hamiltonian.
    pub original: Vec<(f64, f64)>,
    /// `(⟨J_x⟩, ⟨J_y⟩)` under the effective Hamiltonian.
    pub effective: Vec<(f64, f64)>,
    /// Largest top-two Fock population seen along the original evolution.
    pub max_leakage: f64,
}

impl KRatioSeries {
    /// `K(t) = 2[⟨J_ζ⟩_eff − ⟨J_ζ⟩_ori] / Nb` for every time.
    pub fn k(&self, zeta: f64) -> Vec<f64> {
        let (c, s) = (zeta.cos(), zeta.sin());
        self.original
            .iter()
            .zip(&self.effective)
            .map(|(o, e)| 2.0 * ((e.0 - o.0) * c + (e.1 - o.1) * s) / self.n_bath as f64)
            .collect()
    }

    /// Largest `|K|` over all times and the given angles.
    pub fn max_abs_k(&self, zetas: &[f64]) -> f64 {
        zetas.iter().flat_map(|&z| self.k(z)).fold(0.0, |m, k| m.max(k.abs()))
    }

    /// Largest `|K|` over every angle, `2|Δ⃗J_⊥|/Nb`.
    pub fn max_abs_k_any_angle(&self) -> f64 {
        self.original
            .iter()
            .zip(&self.effective)
            .map(|(o, e)| 2.0 * (e.0 - o.0).hypot(e.1 - o.1) / self.n_bath as f64)
            .fold(0.0, f64::max)
    }
}

/// Evolve `|α⟩⊗|μ⟩` under the original and an effective Hamiltonian.
pub fn k_ratio_series(model: &CavityModel, times: &[f64], effective: CavityVariant) -> Result<KRatioSeries> {
    if effective == CavityVariant::Original {
        return Err(Error::InvalidParameter("the effective variant must be eff2 or eff3".into()));
    }
    let psi0 = model.initial_state()?;
    let ori = model.propagator(CavityVariant::Original)?;
    let eff = model.propagator(effective)?;
    let (c_ori, c_eff) = (ori.spectral_coefficients(&psi0), eff.spectral_coefficients(&psi0));
    let mut series = KRatioSeries {
        n_bath: model.params().n_bath,
        times: times.to_vec(),
        original: Vec::with_capacity(times.len()),
        effective: Vec::with_capacity(times.len()),
        max_leakage: 0.0,
    };
    for &t in times {
        let psi = ori.state_at(&c_ori, t);
        let leak = model.top_fock_population(&psi);
        series.max_leakage = series.max_leakage.max(leak);
        if leak > LEAKAGE_LIMIT {
            return Err(Error::Truncation(format!("Fock leakage {leak:e} at t = {t:e}; raise fock_cutoff")));
        }
        series.original.push(model.transverse(&psi)?);
        series.effective.push(model.transverse(&eff.state_at(&c_eff, t))?);
    }
    Ok(series)
}

/// `K(t)` for one angle.
pub fn difference_ratio(
    params: &CavityParams,
    space: SpinSpace,
    times: &[f64],
    zeta: f64,
    effective: CavityVariant,
) -> Result<Vec<f64>> {
    let model = CavityModel::new(params, space)?;
    Ok(k_ratio_series(&model, times, effective)?.k(zeta))
}
