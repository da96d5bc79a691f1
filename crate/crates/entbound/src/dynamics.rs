//! Pure-dephasing Hamiltonians, controlled-unitary propagators, and the
//! environment ensemble left behind by the evolution.

use ndarray::prelude::*;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::info::EnvEnsemble;
use crate::linalg::{dagger, herm_deviation, herm_eig, trace, CMat, DensityMatrix, HERM_TOL};

/// H_tot = H_S + H_E + sum_i |i><i| (x) V_i, with H_S diagonal in the pointer
/// basis. The pointer basis is the computational basis of the system factor;
/// callers wanting another pointer basis rotate their inputs.
#[derive(Debug, Clone)]
pub struct DephasingModel {
    pointer_energies: Vec<f64>,
    env_hamiltonian: CMat,
    couplings: Vec<CMat>,
}

impl DephasingModel {
    pub fn new(
        pointer_energies: Vec<f64>,
        env_hamiltonian: CMat,
        couplings: Vec<CMat>,
    ) -> Result<Self> {
        let d_s = pointer_energies.len();
        if d_s == 0 || couplings.len() != d_s {
            return Err(Error::DimMismatch(format!(
                "{} pointer energies but {} couplings",
                d_s,
                couplings.len()
            )));
        }
        let d_e = env_hamiltonian.nrows();
        if env_hamiltonian.ncols() != d_e {
            return Err(Error::DimMismatch("H_E is not square".into()));
        }
        let dev = herm_deviation(&env_hamiltonian);
        if dev > HERM_TOL {
            return Err(Error::NotHermitian(dev));
        }
        for v in &couplings {
            if v.nrows() != d_e || v.ncols() != d_e {
                return Err(Error::DimMismatch(
                    "coupling dimension differs from H_E".into(),
                ));
            }
            let dev = herm_deviation(v);
            if dev > HERM_TOL {
                return Err(Error::NotHermitian(dev));
            }
        }
        Ok(Self {
            pointer_energies,
            env_hamiltonian,
            couplings,
        })
    }

    pub fn d_s(&self) -> usize {
        self.pointer_energies.len()
    }

    pub fn d_e(&self) -> usize {
        self.env_hamiltonian.nrows()
    }

    pub fn pointer_energies(&self) -> &[f64] {
        &self.pointer_energies
    }

    pub fn env_hamiltonian(&self) -> &CMat {
        &self.env_hamiltonian
    }

    pub fn couplings(&self) -> &[CMat] {
        &self.couplings
    }

    /// The sector Hamiltonian V_i' = eps_i + H_E + V_i acting on the
    /// environment when the system is in pointer state i.
    pub fn sector_hamiltonian(&self, i: usize) -> CMat {
        let mut h = &self.env_hamiltonian + &self.couplings[i];
        let eps = Complex64::new(self.pointer_energies[i], 0.0);
        for k in 0..self.d_e() {
            h[[k, k]] += eps;
        }
        h
    }

    /// Full Hamiltonian, block diagonal over pointer sectors.
    pub fn total_hamiltonian(&self) -> CMat {
        let (d_s, d_e) = (self.d_s(), self.d_e());
        let mut h = CMat::zeros((d_s * d_e, d_s * d_e));
        for i in 0..d_s {
            let sector = self.sector_hamiltonian(i);
            h.slice_mut(s![i * d_e..(i + 1) * d_e, i * d_e..(i + 1) * d_e])
                .assign(&sector);
        }
        h
    }

    /// Conditional propagators U_E^i(t) = exp(-i V_i' t).
    pub fn conditional_unitaries(&self, t: f64) -> Result<Vec<CMat>> {
        (0..self.d_s())
            .map(|i| {
                let dec = herm_eig(&self.sector_hamiltonian(i))?;
                Ok(dec.apply(|l| Complex64::new(0.0, -l * t).exp()))
            })
            .collect()
    }

    /// sigma_SE(t) = U (rho_S (x) rho_E) U^dag, assembled blockwise as
    /// |i><j| rho_S_ij (x) U_i rho_E U_j^dag.
    pub fn evolve(
        &self,
        rho_s: &DensityMatrix,
        rho_e: &DensityMatrix,
        t: f64,
    ) -> Result<DensityMatrix> {
        self.check_dims(rho_s, rho_e)?;
        let (d_s, d_e) = (self.d_s(), self.d_e());
        let us = self.conditional_unitaries(t)?;
        let evolved: Vec<CMat> = us.iter().map(|u| u.dot(rho_e.mat())).collect();
        let mut out = CMat::zeros((d_s * d_e, d_s * d_e));
        for i in 0..d_s {
            for j in 0..d_s {
                let w = rho_s.mat()[[i, j]];
                if w.norm() == 0.0 {
                    continue;
                }
                let block = evolved[i].dot(&dagger(&us[j]));
                let mut dst = out.slice_mut(s![i * d_e..(i + 1) * d_e, j * d_e..(j + 1) * d_e]);
                dst.zip_mut_with(&block, |o, &b| *o = w * b);
            }
        }
        let out = (&out + &dagger(&out)).mapv(|z| z * 0.5);
        DensityMatrix::new(out, vec![d_s, d_e])
    }

    /// The ensemble {p_i, U_i rho_E U_i^dag} seen by measurements on the
    /// environment; its mixture is Tr_S of the evolved state.
    pub fn env_ensemble(
        &self,
        rho_s: &DensityMatrix,
        rho_e: &DensityMatrix,
        t: f64,
    ) -> Result<EnvEnsemble> {
        self.check_dims(rho_s, rho_e)?;
        let us = self.conditional_unitaries(t)?;
        let probs: Vec<f64> = (0..self.d_s())
            .map(|i| rho_s.mat()[[i, i]].re.max(0.0))
            .collect();
        let states: Result<Vec<DensityMatrix>> = us
            .iter()
            .map(|u| {
                let m = u.dot(rho_e.mat()).dot(&dagger(u));
                let m = (&m + &dagger(&m)).mapv(|z| z * 0.5);
                DensityMatrix::new(m, vec![self.d_e()])
            })
            .collect();
        EnvEnsemble::new(probs, states?)
    }

    fn check_dims(&self, rho_s: &DensityMatrix, rho_e: &DensityMatrix) -> Result<()> {
        if rho_s.dim() != self.d_s() || rho_e.dim() != self.d_e() {
            return Err(Error::DimMismatch(format!(
                "model is {}x{}, states are {}x{}",
                self.d_s(),
                self.d_e(),
                rho_s.dim(),
                rho_e.dim()
            )));
        }
        Ok(())
    }
}

/// What kind of initial system state a random instance carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// Mixed coherent state from the (alpha, theta) family.
    Generic,
    /// Diagonal (incoherent) system state.
    DiagonalSystem,
    /// Pure system state with a pure environment.
    PurePure,
}

/// One random problem instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub model: DephasingModel,
    pub rho_s: DensityMatrix,
    pub rho_e: DensityMatrix,
    pub t: f64,
    pub kind: InstanceKind,
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMat {
    let g = CMat::from_shape_fn((n, n), |_| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 2.0 * scale
    });
    (&g + &dagger(&g)).mapv(|z| z * 0.5)
}

fn random_wishart_state(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let g = CMat::from_shape_fn((n, n), |_| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let w = g.dot(&dagger(&g));
    let tr = trace(&w).re;
    DensityMatrix::from_matrix(w.mapv(|z| z / tr)).expect("wishart state")
}

fn random_pure_state(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let mut ket = Array1::from_shape_fn(n, |_| {
        Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
    });
    let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    ket.map_inplace(|z| *z /= norm);
    DensityMatrix::from_pure(&ket, vec![n]).expect("pure state")
}

/// The documented two-parameter system family: rho_S(alpha, psi) =
/// (1-alpha) |psi><psi| + alpha I/d, with |psi> a unit vector. For d = 2 and
/// |psi> = |+> this is the mixed maximally-coherent family of the case study.
pub fn mixed_coherent_state(alpha: f64, ket: &Array1<Complex64>) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::OutOfRange(format!("mixedness alpha = {alpha}")));
    }
    let n = ket.len();
    let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut m = CMat::from_shape_fn((n, n), |(i, j)| {
        (1.0 - alpha) * ket[i] * ket[j].conj() / (norm * norm)
    });
    for i in 0..n {
        m[[i, i]] += Complex64::new(alpha / n as f64, 0.0);
    }
    DensityMatrix::from_matrix(m)
}

/// The case-study initial state (1-alpha)|+><+| + alpha I/2.
pub fn plus_mixture(alpha: f64) -> Result<DensityMatrix> {
    let h = 1.0 / 2f64.sqrt();
    let ket = ndarray::array![Complex64::new(h, 0.0), Complex64::new(h, 0.0)];
    mixed_coherent_state(alpha, &ket)
}

/// Seeded random instance generator. Model operators are symmetrized Gaussian,
/// rho_E is Wishart-like (pure for `PurePure`), rho_S comes from the
/// two-parameter family above (dephased for `DiagonalSystem`).
pub fn random_instance(
    d_s: usize,
    d_e: usize,
    kind: InstanceKind,
    seed: u64,
) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pointer_energies: Vec<f64> = (0..d_s).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
    let h_e = random_hermitian(&mut rng, d_e, 1.0);
    let couplings: Vec<CMat> = (0..d_s)
        .map(|_| random_hermitian(&mut rng, d_e, 1.0))
        .collect();
    let model = DephasingModel::new(pointer_energies, h_e, couplings)?;

    let (rho_s, rho_e) = match kind {
        InstanceKind::PurePure => {
            let mut ket = Array1::from_shape_fn(d_s, |_| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            ket.map_inplace(|z| *z /= norm);
            (
                mixed_coherent_state(0.0, &ket)?,
                random_pure_state(&mut rng, d_e),
            )
        }
        InstanceKind::DiagonalSystem => {
            let mut probs: Vec<f64> = (0..d_s).map(|_| rng.gen::<f64>() + 0.05).collect();
            let sum: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= sum);
            let m = CMat::from_shape_fn((d_s, d_s), |(i, j)| {
                if i == j {
                    Complex64::new(probs[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            (
                DensityMatrix::from_matrix(m)?,
                random_wishart_state(&mut rng, d_e),
            )
        }
        InstanceKind::Generic => {
            let alpha: f64 = rng.gen();
            let mut ket = Array1::from_shape_fn(d_s, |_| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            ket.map_inplace(|z| *z /= norm);
            (
                mixed_coherent_state(alpha, &ket)?,
                random_wishart_state(&mut rng, d_e),
            )
        }
    };
    let t = 3.0 * rng.gen::<f64>();
    Ok(Instance {
        model,
        rho_s,
        rho_e,
        t,
        kind,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::info::von_neumann_entropy;
    use crate::linalg::max_abs_diff;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn commutator_norm(a: &CMat, b: &CMat) -> f64 {
        let ab = a.dot(b);
        let ba = b.dot(a);
        max_abs_diff(&ab, &ba)
    }

    fn pointer_projector(i: usize, d_s: usize, d_e: usize) -> CMat {
        let mut p = CMat::zeros((d_s, d_s));
        p[[i, i]] = c(1.0, 0.0);
        crate::linalg::kron(&p, &identity(d_e))
    }

    #[test]
    fn trivial_hamiltonian_is_env_only() {
        let model = DephasingModel::new(
            vec![0.0, 0.0],
            ndarray::array![[c(1.0, 0.0), c(0.2, 0.1)], [c(0.2, -0.1), c(-0.5, 0.0)]],
            vec![CMat::zeros((2, 2)), CMat::zeros((2, 2))],
        )
        .unwrap();
        let h = model.total_hamiltonian();
        let expect = crate::linalg::kron(&identity(2), model.env_hamiltonian());
        assert!(max_abs_diff(&h, &expect) < 1e-15);
    }

    #[test]
    fn two_qubit_dephasing_structure() {
        // d_S=2, H_E=0, V_0=-V_1=g sigma_z: H = g sigma_z (x) sigma_z
        let g = 0.7;
        let sz = ndarray::array![[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
        let model = DephasingModel::new(
            vec![0.0, 0.0],
            CMat::zeros((2, 2)),
            vec![sz.mapv(|z| z * g), sz.mapv(|z| z * (-g))],
        )
        .unwrap();
        let h = model.total_hamiltonian();
        let expect = crate::linalg::kron(&sz, &sz.mapv(|z| z * g));
        assert!(max_abs_diff(&h, &expect) < 1e-15);
    }

    #[test]
    fn hamiltonian_commutes_with_pointer_projectors() {
        let inst = random_instance(3, 4, InstanceKind::Generic, 5).unwrap();
        let h = inst.model.total_hamiltonian();
        for i in 0..3 {
            let p = pointer_projector(i, 3, 4);
            assert!(commutator_norm(&h, &p) < 1e-10);
        }
    }

    #[test]
    fn unitaries_at_zero_and_group_property() {
        let inst = random_instance(2, 3, InstanceKind::Generic, 9).unwrap();
        for u in inst.model.conditional_unitaries(0.0).unwrap() {
            assert!(max_abs_diff(&u, &identity(3)) < 1e-12);
        }
        let fwd = inst.model.conditional_unitaries(1.3).unwrap();
        let bwd = inst.model.conditional_unitaries(-1.3).unwrap();
        for (u, v) in fwd.iter().zip(&bwd) {
            assert!(max_abs_diff(&u.dot(v), &identity(3)) < 1e-10);
            let uu = dagger(u).dot(u);
            assert!(max_abs_diff(&uu, &identity(3)) < 1e-10);
        }
    }

    #[test]
    fn phase_unitaries_for_diagonal_couplings() {
        let v0 = ndarray::array![[c(0.4, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.1, 0.0)]];
        let model = DephasingModel::new(vec![0.0], CMat::zeros((2, 2)), vec![v0]).unwrap();
        let u = &model.conditional_unitaries(2.0).unwrap()[0];
        for i in 0..2 {
            for j in 0..2 {
                if i != j {
                    assert!(u[[i, j]].norm() < 1e-12);
                } else {
                    assert!((u[[i, j]].norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn evolve_at_zero_is_product() {
        let inst = random_instance(2, 3, InstanceKind::Generic, 11).unwrap();
        let sigma = inst.model.evolve(&inst.rho_s, &inst.rho_e, 0.0).unwrap();
        let prod = inst.rho_s.tensor(&inst.rho_e);
        assert!(max_abs_diff(sigma.mat(), prod.mat()) < 1e-12);
    }

    #[test]
    fn evolve_preserves_populations_and_purity() {
        let inst = random_instance(3, 3, InstanceKind::Generic, 13).unwrap();
        let sigma = inst.model.evolve(&inst.rho_s, &inst.rho_e, inst.t).unwrap();
        let sigma_s = sigma.partial_trace(0).unwrap();
        for i in 0..3 {
            assert!((sigma_s.mat()[[i, i]].re - inst.rho_s.mat()[[i, i]].re).abs() < 1e-10);
        }
        let purity0 = inst.rho_s.tensor(&inst.rho_e).purity();
        assert!((sigma.purity() - purity0).abs() < 1e-10);
        // off-diagonal damping
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(
                        sigma_s.mat()[[i, j]].norm()
                            <= inst.rho_s.mat()[[i, j]].norm() + 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn evolution_preserves_entropies() {
        let inst = random_instance(2, 4, InstanceKind::Generic, 17).unwrap();
        let sigma = inst.model.evolve(&inst.rho_s, &inst.rho_e, inst.t).unwrap();
        let lhs = von_neumann_entropy(&sigma).unwrap();
        let rhs = von_neumann_entropy(&inst.rho_s).unwrap() + von_neumann_entropy(&inst.rho_e).unwrap();
        assert!((lhs - rhs).abs() < 1e-9);
        let ens = inst.model.env_ensemble(&inst.rho_s, &inst.rho_e, inst.t).unwrap();
        for s in ens.states() {
            assert!(
                (von_neumann_entropy(s).unwrap() - von_neumann_entropy(&inst.rho_e).unwrap()).abs()
                    < 1e-9
            );
        }
    }

    #[test]
    fn ensemble_mixture_matches_partial_trace() {
        let inst = random_instance(3, 3, InstanceKind::Generic, 19).unwrap();
        let ens = inst.model.env_ensemble(&inst.rho_s, &inst.rho_e, inst.t).unwrap();
        let avg = ens.average().unwrap();
        let sigma_e = inst
            .model
            .evolve(&inst.rho_s, &inst.rho_e, inst.t)
            .unwrap()
            .partial_trace(1)
            .unwrap();
        assert!(max_abs_diff(avg.mat(), sigma_e.mat()) < 1e-10);
    }

    #[test]
    fn ensemble_at_zero_and_mixed_probs() {
        let inst = random_instance(2, 3, InstanceKind::Generic, 23).unwrap();
        let ens = inst.model.env_ensemble(&inst.rho_s, &inst.rho_e, 0.0).unwrap();
        for s in ens.states() {
            assert!(max_abs_diff(s.mat(), inst.rho_e.mat()) < 1e-12);
        }
        let mm = DensityMatrix::from_matrix(identity(2).mapv(|z| z * 0.5)).unwrap();
        let ens = inst.model.env_ensemble(&mm, &inst.rho_e, 1.0).unwrap();
        assert!((ens.probs()[0] - 0.5).abs() < 1e-15);
        assert!((ens.probs()[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pointer_populations_survive_dephasing_channel() {
        let inst = random_instance(2, 2, InstanceKind::Generic, 29).unwrap();
        let sigma_s = inst
            .model
            .evolve(&inst.rho_s, &inst.rho_e, inst.t)
            .unwrap()
            .partial_trace(0)
            .unwrap();
        let a = crate::info::dephase_computational(&sigma_s).unwrap();
        let b = crate::info::dephase_computational(&inst.rho_s).unwrap();
        assert!(max_abs_diff(a.mat(), b.mat()) < 1e-10);
    }
}
