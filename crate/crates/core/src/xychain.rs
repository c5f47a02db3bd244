//! Free-fermion description of the periodic XY bath chain
//!
//! `H0(h) = −½ Σ_i { (λ/2)[(1+γ)σˣσˣ + (1−γ)σʸσʸ] + h σᶻ }`
//!
//! After Jordan-Wigner, Fourier and Bogoliubov transformations the chain is
//! `Σ_k Λ_k (b_k† b_k − ½)` over the uniform grid `k = 2πm/Nb`,
//! `m = −Nb/2+1, …, Nb/2`. Both Bogoliubov angles (the bath angle ν_k and the
//! shifted angle μ_{m,k}) use the same convention
//! `atan2(λγ sin k, λ cos k − field)`, so only their difference is physical.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Bath chain definition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    /// Number of sites `Nb` (even, ≥ 2).
    pub n_sites: usize,
    /// Nearest-neighbour coupling λ.
    pub coupling: f64,
    /// Anisotropy γ in `[0, 1]`.
    pub anisotropy: f64,
    /// Transverse field h.
    pub field: f64,
}

impl ChainParams {
    pub fn new(n_sites: usize, coupling: f64, anisotropy: f64, field: f64) -> Result<Self> {
        let p = Self { n_sites, coupling, anisotropy, field };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 || self.n_sites % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "number of bath sites must be even and >= 2, got {}",
                self.n_sites
            )));
        }
        if !(self.coupling.is_finite() && self.anisotropy.is_finite() && self.field.is_finite()) {
            return Err(Error::InvalidParameter("chain parameters must be finite".into()));
        }
        if !(0.0..=1.0).contains(&self.anisotropy) {
            return Err(Error::InvalidParameter(format!("anisotropy must lie in [0, 1], got {}", self.anisotropy)));
        }
        Ok(())
    }

    /// Same chain with a different transverse field.
    pub fn with_field(&self, field: f64) -> Self {
        Self { field, ..*self }
    }

    /// Momentum grid with dispersion and Bogoliubov angle filled in.
    pub fn modes(&self) -> Result<Vec<MomentumMode>> {
        self.validate()?;
        Ok(momentum_grid(self.n_sites)?
            .into_iter()
            .map(|m| MomentumMode {
                index: m.index,
                k: m.k,
                pairing: m.pairing,
                dispersion: dispersion(self, m.k),
                angle: bogoliubov_angle(self, m.k),
            })
            .collect())
    }
}

/// How a quasi-momentum participates in the (k, −k) pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// `0 < k < π`: representative of a (k, −k) pair.
    Paired,
    /// `−π < k < 0`: partner of a paired mode; carried by its representative.
    Partner,
    /// `k ∈ {0, π}`: self-conjugate, no partner.
    Unpaired,
}

/// A grid point `k = 2πm/Nb`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Momentum {
    pub index: i64,
    pub k: f64,
    pub pairing: Pairing,
}

/// One quasi-momentum with its bath dispersion Λ_k and angle ν_k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumMode {
    pub index: i64,
    pub k: f64,
    pub pairing: Pairing,
    /// Λ_k ≥ 0.
    pub dispersion: f64,
    /// ν_k.
    pub angle: f64,
}

impl MomentumMode {
    pub fn paired(&self) -> bool {
        self.pairing == Pairing::Paired
    }
}

/// Bogoliubov data of `H0(h + 2ηm)` at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedModeData {
    /// Dicke label m.
    pub m_dicke: f64,
    /// μ_{m,k}.
    pub mu: f64,
    /// θ_{m,k} = (μ_{m,k} − ν_k)/2 reduced to (−π/2, π/2].
    pub theta: f64,
    /// E_{m,k} ≥ 0.
    pub energy: f64,
}

/// `(sin k, cos k)` with the self-conjugate momenta snapped to exact values.
pub(crate) fn trig(k: f64) -> (f64, f64) {
    if k == 0.0 {
        (0.0, 1.0)
    } else if k == PI || k == -PI {
        (0.0, -1.0)
    } else {
        k.sin_cos()
    }
}

/// Uniform grid `k = 2πm/Nb`, `m = −Nb/2+1, …, Nb/2`.
pub fn momentum_grid(n_sites: usize) -> Result<Vec<Momentum>> {
    if n_sites < 2 || n_sites % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "momentum grid needs an even number of sites >= 2, got {n_sites}"
        )));
    }
    let half = (n_sites / 2) as i64;
    Ok((-half + 1..=half)
        .map(|m| {
            let k = PI * ((2 * m) as f64 / n_sites as f64);
            let pairing = if m == 0 || m == half {
                Pairing::Unpaired
            } else if m > 0 {
                Pairing::Paired
            } else {
                Pairing::Partner
            };
            Momentum { index: m, k, pairing }
        })
        .collect())
}

fn energy_and_angle(p: &ChainParams, field: f64, k: f64) -> (f64, f64) {
    let (s, c) = trig(k);
    let y = p.coupling * p.anisotropy * s;
    let x = p.coupling * c - field;
    let angle = if x == 0.0 && y == 0.0 { 0.0 } else { y.atan2(x) };
    (x.hypot(y), angle)
}

/// Λ_k = sqrt((h − λ cos k)² + λ²γ² sin² k).
pub fn dispersion(p: &ChainParams, k: f64) -> f64 {
    energy_and_angle(p, p.field, k).0
}

/// ν_k = atan2(λγ sin k, λ cos k − h), defined as 0 where Λ_k = 0.
pub fn bogoliubov_angle(p: &ChainParams, k: f64) -> f64 {
    energy_and_angle(p, p.field, k).1
}

/// Reduce an angle to `(−π/2, π/2]` by multiples of π.
fn reduce_half_turn(x: f64) -> f64 {
    let mut r = x - PI * (x / PI).round();
    if r <= -PI / 2.0 {
        r += PI;
    } else if r > PI / 2.0 {
        r -= PI;
    }
    r
}

/// Bogoliubov data of `H0(h + 2ηm)` relative to the bath basis of `H0(h)`.
pub fn shifted_mode(p: &ChainParams, eta: f64, m_dicke: f64, k: f64) -> ShiftedModeData {
    let nu = bogoliubov_angle(p, k);
    let (energy, mu) = energy_and_angle(p, p.field + 2.0 * eta * m_dicke, k);
    ShiftedModeData { m_dicke, mu, theta: reduce_half_turn((mu - nu) / 2.0), energy }
}

/// `Z(β, h) = ∏_k 2 cosh(βΛ_k/2)` over all `Nb` modes.
pub fn partition_function(p: &ChainParams, beta: f64) -> Result<f64> {
    Ok(log_partition_function(p, beta)?.exp())
}

/// `ln Z`, finite even where `Z` itself overflows.
pub fn log_partition_function(p: &ChainParams, beta: f64) -> Result<f64> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::InvalidParameter(format!("inverse temperature must be finite and >= 0, got {beta}")));
    }
    Ok(p.modes()?.iter().map(|m| log_two_cosh(beta * m.dispersion / 2.0)).sum())
}

/// `ln(2 cosh x)` without overflow.
pub(crate) fn log_two_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p()
}

/// Sorted many-body spectrum `{Σ_k Λ_k (n_k − ½)}` over all `2^Nb` occupations.
pub fn many_body_spectrum(p: &ChainParams) -> Result<Vec<f64>> {
    if p.n_sites > 20 {
        return Err(Error::TooLarge(format!("2^{} occupation patterns", p.n_sites)));
    }
    let energies: Vec<f64> = p.modes()?.iter().map(|m| m.dispersion).collect();
    let mut levels: Vec<f64> = (0u32..1 << energies.len())
        .map(|bits| energies.iter().enumerate().map(|(i, e)| if bits >> i & 1 == 1 { 0.5 * e } else { -0.5 * e }).sum())
        .collect();
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn chain(nb: usize, lambda: f64, gamma: f64, h: f64) -> ChainParams {
        ChainParams::new(nb, lambda, gamma, h).unwrap()
    }

    #[test]
    fn grid_nb4() {
        let g = momentum_grid(4).unwrap();
        let ks: Vec<f64> = g.iter().map(|m| m.k).collect();
        assert_eq!(ks, vec![-PI / 2.0, 0.0, PI / 2.0, PI]);
        let paired: Vec<f64> = g.iter().filter(|m| m.pairing == Pairing::Paired).map(|m| m.k).collect();
        assert_eq!(paired, vec![PI / 2.0]);
        let unpaired: Vec<f64> = g.iter().filter(|m| m.pairing == Pairing::Unpaired).map(|m| m.k).collect();
        assert_eq!(unpaired, vec![0.0, PI]);
    }

    #[test]
    fn grid_nb2_and_nb10() {
        let g = momentum_grid(2).unwrap();
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|m| m.pairing == Pairing::Unpaired));
        assert_eq!(g[0].k, 0.0);
        assert_eq!(g[1].k, PI);

        let g = momentum_grid(10).unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g.iter().filter(|m| m.pairing == Pairing::Paired).count(), 4);
        assert_eq!(g.iter().filter(|m| m.k > 0.0).count(), 5);
    }

    #[test]
    fn grid_rejects_odd_or_zero() {
        assert!(momentum_grid(3).is_err());
        assert!(momentum_grid(0).is_err());
        assert!(ChainParams::new(5, 1.0, 0.5, 0.0).is_err());
        assert!(ChainParams::new(4, 1.0, 1.5, 0.0).is_err());
        assert!(ChainParams::new(4, f64::NAN, 0.5, 0.0).is_err());
    }

    #[test]
    fn dispersion_values() {
        assert!((dispersion(&chain(4, 1.0, 1.0, 0.0), PI / 2.0) - 1.0).abs() < 1e-15);
        assert!((dispersion(&chain(4, 1.0, 0.0, 2.0), 0.0) - 1.0).abs() < 1e-15);
        assert!((dispersion(&chain(4, 1.0, 1.0, 1.0), PI) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn bogoliubov_angle_values() {
        assert!((bogoliubov_angle(&chain(4, 1.0, 1.0, 0.0), PI / 2.0) - PI / 2.0).abs() < 1e-15);
        assert_eq!(bogoliubov_angle(&chain(4, 1.0, 0.3, 0.0), 0.0), 0.0);
        assert!((bogoliubov_angle(&chain(4, 1.0, 0.0, 2.0), 0.0) - PI).abs() < 1e-15);
        // critical point: Λ_k = 0
        assert_eq!(bogoliubov_angle(&chain(4, 1.0, 0.0, 1.0), 0.0), 0.0);
    }

    #[test]
    fn shifted_mode_without_coupling() {
        let p = chain(8, 1.0, 0.7, 0.4);
        for m in momentum_grid(8).unwrap() {
            for md in [-1.0, 0.0, 1.5] {
                let d = shifted_mode(&p, 0.0, md, m.k);
                assert_eq!(d.theta, 0.0);
                assert_eq!(d.energy, dispersion(&p, m.k));
            }
        }
    }

    #[test]
    fn shifted_mode_plug_in() {
        let d = shifted_mode(&chain(4, 1.0, 1.0, 0.0), 0.5, 1.0, PI / 2.0);
        assert!((d.energy - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn shifted_angle_matches_direct_ratios() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = chain(10, rng.gen_range(-2.0..2.0), rng.gen_range(0.0..1.0), rng.gen_range(-2.0..2.0));
            let eta = rng.gen_range(-1.0..1.0);
            let m = rng.gen_range(-3..=3) as f64;
            let k = rng.gen_range(-PI..PI);
            let d = shifted_mode(&p, eta, m, k);
            let x = p.coupling * k.cos() - p.field - 2.0 * eta * m;
            let y = p.coupling * p.anisotropy * k.sin();
            assert!((d.mu.cos() - x / d.energy).abs() < 1e-12);
            assert!((d.mu.sin() - y / d.energy).abs() < 1e-12);
            assert!(d.theta > -PI / 2.0 && d.theta <= PI / 2.0);
            let nu = bogoliubov_angle(&p, k);
            assert!(((2.0 * d.theta).sin() - (d.mu - nu).sin()).abs() < 1e-12);
            assert!(((2.0 * d.theta).cos() - (d.mu - nu).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn dispersion_symmetric_in_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = chain(12, rng.gen_range(-2.0..2.0), rng.gen_range(0.0..1.0), rng.gen_range(-2.0..2.0));
            let k = rng.gen_range(0.0..PI);
            assert!((dispersion(&p, k) - dispersion(&p, -k)).abs() < 1e-14);
            let (a, b) = (shifted_mode(&p, 0.3, 1.0, k), shifted_mode(&p, 0.3, 1.0, -k));
            assert!((a.energy - b.energy).abs() < 1e-14);
        }
    }

    #[test]
    fn xx_chain_angles_are_zero_or_pi() {
        let p = chain(10, 1.0, 0.0, 0.3);
        for m in p.modes().unwrap() {
            assert!(m.angle == 0.0 || m.angle.abs() == PI, "angle {}", m.angle);
            assert!(m.angle.sin().abs() < 1e-15);
        }
    }

    #[test]
    fn partition_function_values() {
        let p = chain(6, 1.0, 0.4, 0.2);
        assert!((partition_function(&p, 0.0).unwrap() - 64.0).abs() < 1e-12);
        let p2 = chain(2, 1.0, 1.0, 0.0);
        let expected = 4.0 * (0.5f64).cosh().powi(2);
        assert!((partition_function(&p2, 1.0).unwrap() - expected).abs() < 1e-12);
        assert!(partition_function(&p, -1.0).is_err());
    }

    #[test]
    fn many_body_spectrum_counts() {
        let s = many_body_spectrum(&chain(4, 1.0, 1.0, 0.5)).unwrap();
        assert_eq!(s.len(), 16);
        let sum: f64 = s.iter().sum();
        assert!(sum.abs() < 1e-12);
    }

    #[test]
    fn log_two_cosh_large_argument() {
        assert!((log_two_cosh(1000.0) - 1000.0).abs() < 1e-12);
        assert!((log_two_cosh(0.0) - 2f64.ln()).abs() < 1e-15);
    }
}
