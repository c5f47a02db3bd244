//! Symmetric (Dicke) sector of `Nc` spin-1/2 particles.
//!
//! Basis index `p = 0..=Nc` labels the Dicke state `|n⟩` with
//! `S_z|n⟩ = n|n⟩`, `n = p − Nc/2`.

use crate::error::{Error, Result};
use crate::exact_oracles::CavityParams;
use crate::numkit::{c64, ComplexMatrix, C64};

/// Central-spin ensemble and its initial spin-coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralParams {
    /// Number of central spins `Nc ≥ 1`.
    pub n_central: usize,
    /// Central-bath coupling η.
    pub eta: f64,
    /// Inverse bath temperature β ≥ 0.
    pub beta: f64,
    /// Polar angle ϑ of the initial coherent state.
    pub vartheta: f64,
    /// Azimuth φ of the initial coherent state.
    pub varphi: f64,
}

impl CentralParams {
    pub fn new(n_central: usize, eta: f64, beta: f64, vartheta: f64, varphi: f64) -> Result<Self> {
        let p = Self { n_central, eta, beta, vartheta, varphi };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_central == 0 {
            return Err(Error::InvalidParameter("need at least one central spin".into()));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "inverse temperature must be finite and >= 0, got {}",
                self.beta
            )));
        }
        if !(self.eta.is_finite() && self.vartheta.is_finite() && self.varphi.is_finite()) {
            return Err(Error::InvalidParameter("central parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n_central + 1
    }

    /// Dicke labels `−Nc/2, …, Nc/2`.
    pub fn labels(&self) -> Vec<f64> {
        dicke_labels(self.n_central)
    }
}

pub fn dicke_labels(n_central: usize) -> Vec<f64> {
    (0..=n_central).map(|p| p as f64 - n_central as f64 / 2.0).collect()
}

/// Dicke-basis amplitudes of a spin-coherent state.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentCoeffs {
    /// Indexed by `p = Nc/2 + n`.
    pub c: Vec<C64>,
}

impl CoherentCoeffs {
    pub fn norm_sqr(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.c, &self.c)
    }
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| (((n - k + i) as f64) / i as f64).ln()).sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (1..=k).fold(1.0, |acc, i| acc * (n - k + i) as f64 / i as f64)
}

/// `c_n = cos^{Nc/2−n}(ϑ/2) sin^{Nc/2+n}(ϑ/2) e^{−i(Nc/2+n)φ} √C(Nc, Nc/2+n)`.
///
/// Identical to the `|cos|^Nc tan^{Nc/2+n}` form on `ϑ ∈ [0, π)` and finite
/// at `ϑ = π`. Above 60 spins the magnitudes are accumulated in log space.
pub fn coherent_coeffs(n_central: usize, vartheta: f64, varphi: f64) -> Result<CoherentCoeffs> {
    if n_central == 0 {
        return Err(Error::InvalidParameter("need at least one central spin".into()));
    }
    let (s, c) = (vartheta / 2.0).sin_cos();
    let nc = n_central;
    let coeffs = (0..=nc)
        .map(|p| {
            let phase = C64::from_polar(1.0, -(p as f64) * varphi);
            let magnitude = if nc <= 60 {
                c.powi((nc - p) as i32) * s.powi(p as i32) * binomial(nc, p).sqrt()
            } else {
                let ln_part = |x: f64, e: usize| if e == 0 { 0.0 } else { e as f64 * x.abs().ln() };
                let sign = if (c < 0.0 && (nc - p) % 2 == 1) ^ (s < 0.0 && p % 2 == 1) { -1.0 } else { 1.0 };
                sign * (ln_part(c, nc - p) + ln_part(s, p) + 0.5 * ln_binomial(nc, p)).exp()
            };
            phase * magnitude
        })
        .collect();
    Ok(CoherentCoeffs { c: coeffs })
}

/// Unit vector along which the coherent state of [`coherent_coeffs`] is fully polarized,
/// `⟨n̂·S⟩ = +Nc/2`.
pub fn coherent_direction(vartheta: f64, varphi: f64) -> [f64; 3] {
    [vartheta.sin() * varphi.cos(), vartheta.sin() * varphi.sin(), -vartheta.cos()]
}

/// Collective spin matrices in the Dicke basis.
#[derive(Debug, Clone)]
pub struct CollectiveOps {
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
}

impl CollectiveOps {
    pub fn dim(&self) -> usize {
        self.sz.rows()
    }

    pub fn components(&self) -> [&ComplexMatrix; 3] {
        [&self.sx, &self.sy, &self.sz]
    }

    /// `n̂·S`.
    pub fn along(&self, n: [f64; 3]) -> ComplexMatrix {
        let d = self.dim();
        ComplexMatrix::from_fn(d, d, |i, j| self.sx[(i, j)] * n[0] + self.sy[(i, j)] * n[1] + self.sz[(i, j)] * n[2])
    }

    /// `S₊ = Sx + i Sy`.
    pub fn raising(&self) -> ComplexMatrix {
        &self.sx + &self.sy.scale(c64(0.0, 1.0))
    }
}

/// `Sz = diag(−j..j)`, `⟨n+1|S₊|n⟩ = √(j(j+1) − n(n+1))` with `j = Nc/2`.
pub fn collective_ops(n_central: usize) -> Result<CollectiveOps> {
    if n_central == 0 {
        return Err(Error::InvalidParameter("need at least one central spin".into()));
    }
    Ok(spin_matrices(n_central as f64 / 2.0))
}

/// Spin-j matrices in the `J_z` eigenbasis ordered from `m = −j` upward.
pub(crate) fn spin_matrices(j: f64) -> CollectiveOps {
    let d = (2.0 * j).round() as usize + 1;
    let m = |p: usize| p as f64 - j;
    let raise = |row: usize, col: usize| -> f64 {
        if row == col + 1 {
            (j * (j + 1.0) - m(col) * (m(col) + 1.0)).max(0.0).sqrt()
        } else {
            0.0
        }
    };
    let sx = ComplexMatrix::from_fn(d, d, |r, c| c64(0.5 * (raise(r, c) + raise(c, r)), 0.0));
    let sy = ComplexMatrix::from_fn(d, d, |r, c| c64(0.0, -0.5 * (raise(r, c) - raise(c, r))));
    let sz = ComplexMatrix::from_fn(d, d, |r, c| if r == c { c64(m(r), 0.0) } else { C64::default() });
    CollectiveOps { sx, sy, sz }
}

/// Result of mapping the dispersive cavity model onto the central-spin model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CentralMapping {
    /// Δ = ω0 − h0 − ωa.
    pub detuning: f64,
    /// η = −g²/Δ, so that `(2g²/Δ) J_z a†a = −2η J_z S_z + (g²/Δ) Nc J_z`.
    pub eta: f64,
    /// Shifted bath field h = h0 − ω0 + η Nc.
    pub field: f64,
}

impl CentralMapping {
    pub fn central(&self, n_central: usize, beta: f64, vartheta: f64, varphi: f64) -> Result<CentralParams> {
        CentralParams::new(n_central, self.eta, beta, vartheta, varphi)
    }
}

/// Coupling and field of the central-spin model obtained from cavity parameters.
pub fn map_cavity_to_central(cavity: &CavityParams, n_central: usize) -> Result<CentralMapping> {
    let detuning = cavity.detuning();
    if detuning == 0.0 || !detuning.is_finite() {
        return Err(Error::InvalidParameter("cavity detuning must be nonzero".into()));
    }
    if n_central == 0 {
        return Err(Error::InvalidParameter("need at least one central spin".into()));
    }
    let eta = -cavity.g * cavity.g / detuning;
    Ok(CentralMapping { detuning, eta, field: cavity.h0 - cavity.omega0 + eta * n_central as f64 })
}
