//! Entropic and distinguishability functionals, all in log base 2.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    clip_eigenvalue, dagger, herm_deviation, herm_eig, identity, max_abs_diff, psd_sqrt, trace,
    CMat, DensityMatrix, EIG_CLIP, HERM_TOL,
};

/// Support tolerance for the infinite branch of the relative entropy.
pub const SUPPORT_TOL: f64 = 1e-12;

/// 0 log 0 := 0, applied at the scalar level.
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Binary Shannon entropy h(p) in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange(format!("binary_entropy({p})")));
    }
    Ok(-xlog2x(p) - xlog2x(1.0 - p))
}

/// Shannon entropy of a probability vector, in bits.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| xlog2x(p)).sum::<f64>()
}

/// Von Neumann entropy S(rho) = -Tr[rho log2 rho], in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let vals = rho.eigenvalues()?;
    Ok((-vals.iter().map(|&l| xlog2x(l)).sum::<f64>()).max(0.0))
}

/// Quantum relative entropy S(rho||sigma) in bits. Returns +inf when the
/// support of rho is not contained in the support of sigma.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(format!(
            "relative_entropy: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let dec = herm_eig(sigma.mat())?;
    let mut cross = 0.0;
    for (k, &l) in dec.eigenvalues.iter().enumerate() {
        let l = clip_eigenvalue(l)?;
        let v = dec.eigenvectors.column(k);
        // <v| rho |v>
        let mut amp = Complex64::new(0.0, 0.0);
        for i in 0..rho.dim() {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..rho.dim() {
                row += rho.mat()[[i, j]] * v[j];
            }
            amp += v[i].conj() * row;
        }
        let w = amp.re.max(0.0);
        if l < SUPPORT_TOL {
            if w > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
        } else {
            cross -= w * l.log2();
        }
    }
    let s = von_neumann_entropy(rho)?;
    Ok((cross - s).max(0.0))
}

fn check_basis(basis: &CMat, dim: usize) -> Result<()> {
    if basis.nrows() != dim || basis.ncols() != dim {
        return Err(Error::DimMismatch(format!(
            "basis is {}x{}, state dim {}",
            basis.nrows(),
            basis.ncols(),
            dim
        )));
    }
    let gram = dagger(basis).dot(basis);
    let dev = max_abs_diff(&gram, &identity(dim));
    if dev > HERM_TOL {
        return Err(Error::NotOrthonormal(dev));
    }
    Ok(())
}

/// Full dephasing channel in the given orthonormal basis (columns).
pub fn dephase(rho: &DensityMatrix, basis: &CMat) -> Result<DensityMatrix> {
    check_basis(basis, rho.dim())?;
    let n = rho.dim();
    let mut out = CMat::zeros((n, n));
    for k in 0..n {
        let b = basis.column(k);
        // p_k = <b|rho|b>
        let mut p = Complex64::new(0.0, 0.0);
        for i in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += rho.mat()[[i, j]] * b[j];
            }
            p += b[i].conj() * row;
        }
        let p = Complex64::new(p.re, 0.0);
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] += p * b[i] * b[j].conj();
            }
        }
    }
    // exact hermitization against rounding
    let out = (&out + &dagger(&out)).mapv(|z| z * 0.5);
    DensityMatrix::new(out, rho.dims().to_vec())
}

/// Dephasing in the computational basis of the state.
pub fn dephase_computational(rho: &DensityMatrix) -> Result<DensityMatrix> {
    dephase(rho, &identity(rho.dim()))
}

/// Relative entropy of coherence C_r(rho) = S(Delta(rho)) - S(rho).
pub fn coherence_rel_entropy(rho: &DensityMatrix, basis: &CMat) -> Result<f64> {
    let deph = dephase(rho, basis)?;
    let c = von_neumann_entropy(&deph)? - von_neumann_entropy(rho)?;
    Ok(c.max(0.0))
}

pub fn coherence_computational(rho: &DensityMatrix) -> Result<f64> {
    coherence_rel_entropy(rho, &identity(rho.dim()))
}

/// State fidelity B(rho, sigma) = Tr sqrt(rho^1/2 sigma rho^1/2), in [0, 1].
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch(format!(
            "fidelity: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let sr = psd_sqrt(rho.mat())?;
    let inner = sr.dot(sigma.mat()).dot(&sr);
    let inner = (&inner + &dagger(&inner)).mapv(|z| z * 0.5);
    let dec = herm_eig(&inner)?;
    let mut b = 0.0;
    for &l in &dec.eigenvalues {
        b += clip_eigenvalue(l.max(-EIG_CLIP))?.sqrt();
    }
    Ok(b.clamp(0.0, 1.0))
}

/// Ensemble of conditional environment states with prior probabilities.
#[derive(Debug, Clone)]
pub struct EnvEnsemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl EnvEnsemble {
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.len() != states.len() || probs.is_empty() {
            return Err(Error::BadProbs(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if probs.iter().any(|&p| p < -SUPPORT_TOL) {
            return Err(Error::BadProbs("negative probability".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::BadProbs(format!("probabilities sum to {sum}")));
        }
        let d = states[0].dim();
        if states.iter().any(|s| s.dim() != d) {
            return Err(Error::DimMismatch(
                "ensemble states have unequal dimensions".into(),
            ));
        }
        let probs = probs.into_iter().map(|p| p.max(0.0)).collect();
        Ok(Self { probs, states })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    /// The average state sum_i p_i rho_i.
    pub fn average(&self) -> Result<DensityMatrix> {
        let d = self.dim();
        let mut acc = CMat::zeros((d, d));
        for (p, s) in self.probs.iter().zip(&self.states) {
            acc.zip_mut_with(s.mat(), |a, &b| *a += b * Complex64::new(*p, 0.0));
        }
        DensityMatrix::new(acc, self.states[0].dims().to_vec())
    }

    /// Shannon entropy of the index variable, H(I).
    pub fn index_entropy(&self) -> f64 {
        shannon_entropy(&self.probs)
    }
}

/// A finite list of positive operators summing to identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<CMat>,
}

impl Povm {
    pub fn new(elements: Vec<CMat>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::DimMismatch("POVM with no elements".into()));
        }
        let d = elements[0].nrows();
        let mut sum = CMat::zeros((d, d));
        for m in &elements {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimMismatch("POVM elements of unequal size".into()));
            }
            let dev = herm_deviation(m);
            if dev > HERM_TOL {
                return Err(Error::NotHermitian(dev));
            }
            let dec = herm_eig(m)?;
            if dec.eigenvalues[0] < -HERM_TOL {
                return Err(Error::NotPsd(dec.eigenvalues[0]));
            }
            sum += m;
        }
        let dev = max_abs_diff(&sum, &identity(d));
        if dev > HERM_TOL {
            return Err(Error::PovmIncomplete(dev));
        }
        Ok(Self { elements })
    }

    /// Projective POVM from orthonormal basis columns.
    pub fn projective(basis: &CMat) -> Result<Self> {
        let d = basis.nrows();
        check_basis(basis, d)?;
        let elems = (0..d)
            .map(|k| {
                let b = basis.column(k);
                CMat::from_shape_fn((d, d), |(i, j)| b[i] * b[j].conj())
            })
            .collect();
        Self::new(elems)
    }

    pub fn elements(&self) -> &[CMat] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Outcome probabilities Tr[rho_i M_m] for every (i, m).
fn outcome_table(e: &EnvEnsemble, m: &Povm) -> Result<Vec<Vec<f64>>> {
    if e.dim() != m.dim() {
        return Err(Error::DimMismatch(format!(
            "ensemble dim {} vs POVM dim {}",
            e.dim(),
            m.dim()
        )));
    }
    Ok(e.states()
        .iter()
        .map(|s| {
            m.elements()
                .iter()
                .map(|el| trace(&s.mat().dot(el)).re.max(0.0))
                .collect()
        })
        .collect())
}

/// Conditional entropy H(I|M) of the ensemble index after the POVM, in bits.
pub fn conditional_entropy(e: &EnvEnsemble, m: &Povm) -> Result<f64> {
    let table = outcome_table(e, m)?;
    let n_out = m.len();
    // p(m) = sum_i p_i Tr[rho_i M_m]
    let marginals: Vec<f64> = (0..n_out)
        .map(|k| {
            e.probs()
                .iter()
                .zip(&table)
                .map(|(p, row)| p * row[k])
                .sum()
        })
        .collect();
    let mut h = 0.0;
    for (p, row) in e.probs().iter().zip(&table) {
        for (k, &t) in row.iter().enumerate() {
            let joint = p * t;
            if joint > 0.0 && marginals[k] > 0.0 {
                h -= joint * (joint / marginals[k]).log2();
            }
        }
    }
    Ok(h.max(0.0))
}

/// Holevo quantity chi = S(sum_i p_i rho_i) - sum_i p_i S(rho_i), in bits.
pub fn holevo_chi(e: &EnvEnsemble) -> Result<f64> {
    let avg = e.average()?;
    let mut chi = von_neumann_entropy(&avg)?;
    for (p, s) in e.probs().iter().zip(e.states()) {
        chi -= p * von_neumann_entropy(s)?;
    }
    Ok(chi)
}

/// Quantum mutual information I(S:E) = S(sigma_S) + S(sigma_E) - S(sigma_SE).
pub fn quantum_mutual_info(sigma: &DensityMatrix) -> Result<f64> {
    if sigma.dims().len() != 2 {
        return Err(Error::DimMismatch(
            "mutual information needs a bipartite state".into(),
        ));
    }
    let s_s = von_neumann_entropy(&sigma.partial_trace(0)?)?;
    let s_e = von_neumann_entropy(&sigma.partial_trace(1)?)?;
    let s_se = von_neumann_entropy(sigma)?;
    Ok(s_s + s_e - s_se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, CVec};
    use rand::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_density(n: usize, seed: u64) -> DensityMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = CMat::from_shape_fn((n, n), |_| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let w = g.dot(&dagger(&g));
        let tr = trace(&w).re;
        DensityMatrix::from_matrix(w.mapv(|z| z / tr)).unwrap()
    }

    fn plus_state() -> DensityMatrix {
        let h = 1.0 / 2f64.sqrt();
        DensityMatrix::from_pure(&ndarray::array![c(h, 0.0), c(h, 0.0)], vec![2]).unwrap()
    }

    fn diag_density(ps: &[f64]) -> DensityMatrix {
        let n = ps.len();
        let m = CMat::from_shape_fn((n, n), |(i, j)| {
            if i == j {
                c(ps[i], 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        DensityMatrix::from_matrix(m).unwrap()
    }

    #[test]
    fn entropy_pure_and_mixed() {
        assert!(von_neumann_entropy(&plus_state()).unwrap().abs() < 1e-12);
        let mixed = diag_density(&[0.5, 0.5]);
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);
        let rho = diag_density(&[0.25, 0.75]);
        let expect = binary_entropy(0.25).unwrap();
        assert!((von_neumann_entropy(&rho).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 0.8112781244591328).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_cases() {
        let rho = random_density(3, 1);
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-9);
        let zero = diag_density(&[1.0, 0.0]);
        let mixed = diag_density(&[0.5, 0.5]);
        assert!((relative_entropy(&zero, &mixed).unwrap() - 1.0).abs() < 1e-12);
        let one = diag_density(&[0.0, 1.0]);
        assert!(relative_entropy(&zero, &one).unwrap().is_infinite());
    }

    #[test]
    fn dephase_plus_state() {
        let deph = dephase_computational(&plus_state()).unwrap();
        assert!(max_abs_diff(deph.mat(), &identity(2).mapv(|z| z * 0.5)) < 1e-12);
        // idempotent on diagonal states
        let d = diag_density(&[0.3, 0.7]);
        let dd = dephase_computational(&d).unwrap();
        assert!(max_abs_diff(dd.mat(), d.mat()) < 1e-12);
    }

    #[test]
    fn dephase_rejects_bad_basis() {
        let mut b = identity(2);
        b[[0, 0]] = c(0.9, 0.0);
        assert!(matches!(
            dephase(&plus_state(), &b),
            Err(Error::NotOrthonormal(_))
        ));
    }

    #[test]
    fn coherence_values() {
        assert!((coherence_computational(&plus_state()).unwrap() - 1.0).abs() < 1e-12);
        assert!(coherence_computational(&diag_density(&[0.2, 0.8]))
            .unwrap()
            .abs()
            < 1e-12);
        // mixed |+> family: C_r = 1 - h(alpha/2)
        for alpha in [0.0f64, 0.5, 1.0] {
            let mut m = identity(2).mapv(|z| z * (alpha / 2.0));
            let h = 0.5 * (1.0 - alpha);
            for i in 0..2 {
                for j in 0..2 {
                    m[[i, j]] += c(h, 0.0);
                }
            }
            let rho = DensityMatrix::from_matrix(m).unwrap();
            let expect = 1.0 - binary_entropy(alpha / 2.0).unwrap();
            assert!((coherence_computational(&rho).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_cases() {
        let rho = random_density(3, 2);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);
        let zero = diag_density(&[1.0, 0.0]);
        let one = diag_density(&[0.0, 1.0]);
        assert!(fidelity(&zero, &one).unwrap() < 1e-9);
        // pure states reduce to overlap magnitude
        let a: CVec = ndarray::array![c(0.6, 0.0), c(0.8, 0.0)];
        let b: CVec = ndarray::array![c(1.0, 0.0), c(0.0, 0.0)];
        let pa = DensityMatrix::from_pure(&a, vec![2]).unwrap();
        let pb = DensityMatrix::from_pure(&b, vec![2]).unwrap();
        assert!((fidelity(&pa, &pb).unwrap() - 0.6).abs() < 1e-9);
        // symmetry
        let s1 = random_density(3, 3);
        let s2 = random_density(3, 4);
        let f12 = fidelity(&s1, &s2).unwrap();
        let f21 = fidelity(&s2, &s1).unwrap();
        assert!((f12 - f21).abs() < 1e-10);
    }

    #[test]
    fn binary_entropy_values() {
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.25).unwrap() - 0.8112781244591328).abs() < 1e-12);
        assert!(binary_entropy(1.2).is_err());
    }

    #[test]
    fn conditional_entropy_cases() {
        let zero = diag_density(&[1.0, 0.0]);
        let one = diag_density(&[0.0, 1.0]);
        let e = EnvEnsemble::new(vec![0.4, 0.6], vec![zero.clone(), one.clone()]).unwrap();
        let proj = Povm::projective(&identity(2)).unwrap();
        // perfect readout
        assert!(conditional_entropy(&e, &proj).unwrap() < 1e-12);
        // no information
        let trivial = Povm::new(vec![identity(2)]).unwrap();
        let h_i = e.index_entropy();
        assert!((conditional_entropy(&e, &trivial).unwrap() - h_i).abs() < 1e-12);
        // indistinguishable states
        let same = EnvEnsemble::new(vec![0.4, 0.6], vec![zero.clone(), zero]).unwrap();
        assert!((conditional_entropy(&same, &proj).unwrap() - same.index_entropy()).abs() < 1e-12);
    }

    #[test]
    fn holevo_cases() {
        let zero = diag_density(&[1.0, 0.0]);
        let one = diag_density(&[0.0, 1.0]);
        let same = EnvEnsemble::new(vec![0.5, 0.5], vec![zero.clone(), zero.clone()]).unwrap();
        assert!(holevo_chi(&same).unwrap().abs() < 1e-12);
        let orth = EnvEnsemble::new(vec![0.5, 0.5], vec![zero, one]).unwrap();
        assert!((holevo_chi(&orth).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn holevo_dominates_sampled_povm_info() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for trial in 0..20 {
            let r0 = random_density(2, 100 + trial);
            let r1 = random_density(2, 200 + trial);
            let p = 0.2 + 0.6 * rng.gen::<f64>();
            let e = EnvEnsemble::new(vec![p, 1.0 - p], vec![r0, r1]).unwrap();
            let chi = holevo_chi(&e).unwrap();
            // random projective POVM
            let g = CMat::from_shape_fn((2, 2), |_| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            });
            let dec = herm_eig(&(&g + &dagger(&g)).mapv(|z| z * 0.5)).unwrap();
            let m = Povm::projective(&dec.eigenvectors).unwrap();
            let info = e.index_entropy() - conditional_entropy(&e, &m).unwrap();
            assert!(chi >= info - 1e-10, "chi={chi} info={info}");
        }
    }

    #[test]
    fn mutual_info_cases() {
        let a = random_density(2, 7);
        let b = random_density(2, 8);
        let prod = a.tensor(&b);
        assert!(quantum_mutual_info(&prod).unwrap().abs() < 1e-9);

        let h = 1.0 / 2f64.sqrt();
        let bell: CVec = ndarray::array![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        let bell = DensityMatrix::from_pure(&bell, vec![2, 2]).unwrap();
        assert!((quantum_mutual_info(&bell).unwrap() - 2.0).abs() < 1e-9);

        // classically correlated
        let p00 = kron(&diag_density(&[1.0, 0.0]).into_mat(), &diag_density(&[1.0, 0.0]).into_mat());
        let p11 = kron(&diag_density(&[0.0, 1.0]).into_mat(), &diag_density(&[0.0, 1.0]).into_mat());
        let cc = DensityMatrix::new((p00 + p11).mapv(|z| z * 0.5), vec![2, 2]).unwrap();
        assert!((quantum_mutual_info(&cc).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mutual_info_equals_relative_entropy_to_marginals() {
        let rho = random_density(6, 31);
        let rho = DensityMatrix::new(rho.into_mat(), vec![2, 3]).unwrap();
        let prod = rho.partial_trace(0).unwrap().tensor(&rho.partial_trace(1).unwrap());
        let lhs = relative_entropy(&rho, &prod).unwrap();
        let rhs = quantum_mutual_info(&rho).unwrap();
        assert!((lhs - rhs).abs() < 1e-9, "lhs={lhs} rhs={rhs}");
    }
}
