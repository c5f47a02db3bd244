//! Quantum Fisher information over collective generators `n̂·S`, its optimal
//! direction, and the multipartite entanglement depth it witnesses.

use crate::dicke::CollectiveOps;
use crate::error::{Error, Result};
use crate::numkit::{herm_eig, ComplexMatrix, C64};
use crate::reduced_state::DensityMatrix;

/// Eigenvalue pairs with `p_m + p_n` below this are skipped.
pub const PAIR_CUTOFF: f64 = 1e-12;
const IMAG_TOL: f64 = 1e-10;

/// Real symmetric 3×3 matrix with `F(n̂) = n̂ᵀ Γ n̂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaMatrix(pub [[f64; 3]; 3]);

impl GammaMatrix {
    pub fn zeros() -> Self {
        Self([[0.0; 3]; 3])
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.0[a][b]
    }

    /// `n̂ᵀ Γ n̂`.
    pub fn along(&self, n: [f64; 3]) -> f64 {
        (0..3).map(|a| (0..3).map(|b| n[a] * self.0[a][b] * n[b]).sum::<f64>()).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..3).all(|a| (0..3).all(|b| (self.0[a][b] - self.0[b][a]).abs() <= tol))
    }
}

/// QFI, optimal direction and entanglement depth of one state.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub qfi: f64,
    pub direction: [f64; 3],
    /// `l + 1` for the largest `l` whose bound is exceeded; 1 when nothing is witnessed.
    pub depth: usize,
    /// `(l, s·l² + r²)` for `l = 1..=Nc`.
    pub thresholds: Vec<(usize, f64)>,
}

pub fn gamma_matrix(rho: &DensityMatrix, ops: &CollectiveOps) -> Result<GammaMatrix> {
    gamma_matrix_with_cutoff(rho, ops, PAIR_CUTOFF)
}

/// `Γ_{αα′} = 2 Σ (p_m − p_n)²/(p_m + p_n) ⟨m|S^α|n⟩⟨n|S^α′|m⟩` over the
/// eigenbasis of `ρ`, skipping pairs with `p_m + p_n < cutoff`.
pub fn gamma_matrix_with_cutoff(rho: &DensityMatrix, ops: &CollectiveOps, cutoff: f64) -> Result<GammaMatrix> {
    if rho.dim() != ops.dim() {
        return Err(Error::DimensionMismatch(format!("state has dimension {}, operators {}", rho.dim(), ops.dim())));
    }
    let eig = rho.repaired_spectrum()?;
    let p = &eig.eigenvalues;
    let v = &eig.eigenvectors;
    let vd = v.adjoint();
    let rotated: Vec<ComplexMatrix> = ops.components().iter().map(|s| vd.matmul(s).matmul(v)).collect();
    let d = p.len();
    let mut g = [[C64::new(0.0, 0.0); 3]; 3];
    for m in 0..d {
        for n in 0..d {
            let sum = p[m] + p[n];
            if sum < cutoff {
                continue;
            }
            let w = 2.0 * (p[m] - p[n]).powi(2) / sum;
            if w == 0.0 {
                continue;
            }
            for a in 0..3 {
                for b in 0..3 {
                    g[a][b] += rotated[a][(m, n)] * rotated[b][(n, m)] * w;
                }
            }
        }
    }
    let mut out = [[0.0; 3]; 3];
    let scale = g.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
    for a in 0..3 {
        for b in 0..3 {
            if g[a][b].im.abs() > IMAG_TOL * scale {
                return Err(Error::NonFinite("Γ has a non-negligible imaginary part"));
            }
            out[a][b] = 0.5 * (g[a][b].re + g[b][a].re);
        }
    }
    Ok(GammaMatrix(out))
}

/// Largest eigenvalue of `Γ` and its unit eigenvector, signed so that the
/// first nonzero component is positive.
pub fn max_qfi(gamma: &GammaMatrix) -> (f64, [f64; 3]) {
    let m = ComplexMatrix::from_fn(3, 3, |a, b| C64::new(gamma.0[a][b], 0.0));
    let eig = herm_eig(&m).expect("3x3 finite symmetric matrix");
    let f = eig.eigenvalues[2];
    let v = eig.eigenvector(2);
    let mut dir = [v[0].re, v[1].re, v[2].re];
    let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in dir.iter_mut() {
        *x /= norm;
    }
    if let Some(first) = dir.iter().copied().find(|x| x.abs() > 1e-12) {
        if first < 0.0 {
            for x in dir.iter_mut() {
                *x = -*x;
            }
        }
    }
    (f, dir)
}

/// `(l, s·l² + r²)` with `s = ⌊Nc/l⌋`, `r = Nc − s·l`, for `l = 1..=Nc`.
pub fn depth_thresholds(n_central: usize) -> Vec<(usize, f64)> {
    (1..=n_central)
        .map(|l| {
            let s = n_central / l;
            let r = n_central - s * l;
            (l, (s * l * l + r * r) as f64)
        })
        .collect()
}

/// Witnessed entanglement depth and the full bound table.
pub fn entanglement_depth(qfi: f64, n_central: usize) -> (usize, Vec<(usize, f64)>) {
    let thresholds = depth_thresholds(n_central);
    let largest = thresholds.iter().filter(|(_, b)| qfi > *b).map(|(l, _)| *l).max().unwrap_or(0);
    // F can exceed Nc² only by rounding
    ((largest + 1).min(n_central.max(1)), thresholds)
}

pub fn analyze(rho: &DensityMatrix, ops: &CollectiveOps) -> Result<EntanglementReport> {
    let gamma = gamma_matrix(rho, ops)?;
    let (qfi, direction) = max_qfi(&gamma);
    let n_central = ops.dim() - 1;
    let (depth, thresholds) = entanglement_depth(qfi, n_central);
    Ok(EntanglementReport { qfi, direction, depth, thresholds })
}

/// Mean of `F` over a uniformly spaced, strictly increasing time series.
pub fn time_average(series: &[(f64, f64)]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::TimeSeries("empty series".into()));
    }
    if series.iter().any(|(t, f)| !t.is_finite() || !f.is_finite()) {
        return Err(Error::NonFinite("time series"));
    }
    if series.len() > 2 {
        let dt = series[1].0 - series[0].0;
        let span = (series[series.len() - 1].0 - series[0].0).abs();
        for w in series.windows(2) {
            let step = w[1].0 - w[0].0;
            if step <= 0.0 {
                return Err(Error::TimeSeries("times must increase strictly".into()));
            }
            if (step - dt).abs() > 1e-9 * span.max(1.0) {
                return Err(Error::TimeSeries("non-uniform spacing".into()));
            }
        }
    } else if series.len() == 2 && series[1].0 <= series[0].0 {
        return Err(Error::TimeSeries("times must increase strictly".into()));
    }
    Ok(series.iter().map(|(_, f)| f).sum::<f64>() / series.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::{coherent_coeffs, collective_ops};
    use crate::numkit::c64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_pure(rng: &mut ChaCha8Rng, d: usize) -> Vec<C64> {
        let v: Vec<C64> = (0..d).map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|z| z / n).collect()
    }

    /// `4 Cov(S^a, S^b)` computed directly from the state vector.
    fn covariance_gamma(psi: &[C64], ops: &CollectiveOps) -> [[f64; 3]; 3] {
        let s = ops.components();
        let mean: Vec<f64> = s.iter().map(|op| op.expectation(psi).re).collect();
        let mut out = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let ab = s[a].matmul(s[b]).expectation(psi).re;
                let ba = s[b].matmul(s[a]).expectation(psi).re;
                out[a][b] = 4.0 * (0.5 * (ab + ba) - mean[a] * mean[b]);
            }
        }
        out
    }

    #[test]
    fn maximally_mixed_has_no_qfi() {
        let ops = collective_ops(4).unwrap();
        let g = gamma_matrix(&DensityMatrix::maximally_mixed(5), &ops).unwrap();
        assert_eq!(g, GammaMatrix::zeros());
        assert_eq!(max_qfi(&g).0.abs(), 0.0);
    }

    #[test]
    fn pure_states_match_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for nc in 1..=6 {
            let ops = collective_ops(nc).unwrap();
            for _ in 0..10 {
                let psi = random_pure(&mut rng, nc + 1);
                let g = gamma_matrix(&DensityMatrix::pure(&psi).unwrap(), &ops).unwrap();
                let cov = covariance_gamma(&psi, &ops);
                for a in 0..3 {
                    for b in 0..3 {
                        assert!((g.0[a][b] - cov[a][b]).abs() < 1e-9, "{a}{b}: {} vs {}", g.0[a][b], cov[a][b]);
                    }
                }
            }
        }
    }

    #[test]
    fn coherent_state_qfi_equals_nc() {
        let ops = collective_ops(6).unwrap();
        let c = coherent_coeffs(6, PI / 2.0, 0.0).unwrap();
        let rho = DensityMatrix::pure(&c.c).unwrap();
        let g = gamma_matrix(&rho, &ops).unwrap();
        let (f, dir) = max_qfi(&g);
        assert!((f - 6.0).abs() < 1e-10);
        // any transverse direction is optimal; a grid over the sphere can not beat it
        for i in 0..40 {
            for j in 0..40 {
                let (th, ph) = (PI * i as f64 / 39.0, 2.0 * PI * j as f64 / 40.0);
                assert!(g.along([th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]) <= f + 1e-10);
            }
        }
        assert!(dir[0].abs() < 1e-9);
    }

    #[test]
    fn max_qfi_of_diagonal() {
        let g = GammaMatrix([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]]);
        let (f, dir) = max_qfi(&g);
        assert!((f - 3.0).abs() < 1e-14);
        assert!((dir[0].abs() + dir[1].abs()) < 1e-14 && (dir[2] - 1.0).abs() < 1e-14);
        let neg = GammaMatrix([[5.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]]);
        assert_eq!(max_qfi(&neg).1, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn random_psd_gamma_beats_random_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m: Vec<[f64; 3]> = (0..3)
                .map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
                .collect();
            let mut g = [[0.0; 3]; 3];
            for a in 0..3 {
                for b in 0..3 {
                    g[a][b] = (0..3).map(|k| m[a][k] * m[b][k]).sum();
                }
            }
            let g = GammaMatrix(g);
            let (f, dir) = max_qfi(&g);
            assert!((dir.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
            assert!((g.along(dir) - f).abs() < 1e-12);
            for _ in 0..1000 {
                let n = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0f64..1.0)];
                let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
                let n = n.map(|x| x / len);
                assert!(g.along(n) <= f + 1e-12);
            }
        }
    }

    #[test]
    fn depth_table_for_six() {
        let (_, table) = entanglement_depth(0.0, 6);
        let bounds: Vec<f64> = table.iter().map(|(_, b)| *b).collect();
        assert_eq!(bounds, vec![6.0, 12.0, 18.0, 20.0, 26.0, 36.0]);
        assert_eq!(entanglement_depth(5.0, 6).0, 1);
        assert_eq!(entanglement_depth(6.0, 6).0, 1);
        assert_eq!(entanglement_depth(6.1, 6).0, 2);
        assert_eq!(entanglement_depth(26.5, 6).0, 6);
        assert_eq!(entanglement_depth(36.0 + 1e-9, 6).0, 6);
    }

    #[test]
    fn time_average_checks_grid() {
        assert_eq!(time_average(&[(0.0, 2.5), (1.0, 2.5), (2.0, 2.5)]).unwrap(), 2.5);
        let ramp: Vec<(f64, f64)> = (0..5).map(|i| (0.1 * i as f64, i as f64)).collect();
        assert!((time_average(&ramp).unwrap() - 2.0).abs() < 1e-15);
        assert!(time_average(&[]).is_err());
        assert!(time_average(&[(0.0, 1.0), (1.0, 1.0), (3.0, 1.0)]).is_err());
        assert!(time_average(&[(1.0, 1.0), (0.0, 1.0)]).is_err());
        assert_eq!(time_average(&[(0.0, 4.0)]).unwrap(), 4.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let ops = collective_ops(3).unwrap();
        assert!(gamma_matrix(&DensityMatrix::maximally_mixed(5), &ops).is_err());
    }

    fn random_mixed(rng: &mut ChaCha8Rng, d: usize, rank: usize) -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(d, d);
        let mut weights: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.0..1.0)).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        for w in weights {
            let psi = random_pure(rng, d);
            m = &m + &ComplexMatrix::outer(&psi, &psi).scale(c64(w, 0.0));
        }
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn cutoff_choice_is_immaterial() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let ops = collective_ops(6).unwrap();
        for rank in [1, 2, 4, 7] {
            let rho = random_mixed(&mut rng, 7, rank);
            let fs: Vec<f64> = [1e-10, 1e-12, 1e-14]
                .iter()
                .map(|&c| max_qfi(&gamma_matrix_with_cutoff(&rho, &ops, c).unwrap()).0)
                .collect();
            assert!((fs[0] - fs[2]).abs() < 1e-6 && (fs[1] - fs[2]).abs() < 1e-6, "{fs:?}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn qfi_is_bounded_and_rotation_invariant(seed in any::<u64>(), nc in 1usize..7, rank in 1usize..4, chi in -3.0f64..3.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ops = collective_ops(nc).unwrap();
            let rho = random_mixed(&mut rng, nc + 1, rank);
            let report = analyze(&rho, &ops).unwrap();
            prop_assert!(report.qfi >= -1e-9);
            prop_assert!(report.qfi <= (nc * nc) as f64 + 1e-6);
            prop_assert!((report.direction.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(report.depth >= 1 && report.depth <= nc);
            let u = crate::numkit::unitary_evolution(&ops.sz, chi).unwrap();
            let rotated = DensityMatrix::new(u.matmul(rho.matrix()).matmul(&u.adjoint())).unwrap();
            let f2 = analyze(&rotated, &ops).unwrap().qfi;
            prop_assert!((f2 - report.qfi).abs() < 1e-9);
        }

        #[test]
        fn depth_is_monotone(nc in 1usize..20, f1 in 0.0f64..400.0, f2 in 0.0f64..400.0) {
            let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
            prop_assert!(entanglement_depth(lo, nc).0 <= entanglement_depth(hi, nc).0);
        }
    }
}
