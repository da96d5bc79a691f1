//! Two-sided bracketing of the relative entropy of entanglement for small
//! bipartite states. The lower bracket is the clamped negative conditional
//! entropy; the upper bracket is S(σ||ξ) for the best separable ansatz ξ found
//! by analytic seeding plus fully-corrective Frank-Wolfe refinement over
//! product-state atoms.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{relative_entropy, von_neumann_entropy};
use crate::linalg::{clip_eigenvalue, herm_eig, CMat, CVec, DensityMatrix};

/// Largest bipartite dimension accepted by the upper-bracket search.
pub const REE_DIM_CAP: usize = 36;

const BLEND: f64 = 1e-9;

/// Peres criterion: (is PPT, minimal partial-transpose eigenvalue).
pub fn is_ppt(sigma: &DensityMatrix) -> Result<(bool, f64)> {
    if sigma.dims().len() != 2 {
        return Err(Error::DimMismatch("is_ppt needs a bipartite state".into()));
    }
    let pt = sigma.partial_transpose(1)?;
    let dec = herm_eig(&pt)?;
    let min = dec.eigenvalues.first().copied().unwrap_or(0.0);
    Ok((min >= -1e-10, min))
}

/// max{0, S(σ_S) − S(σ_SE), S(σ_E) − S(σ_SE)}.
pub fn ree_lower_bracket(sigma: &DensityMatrix) -> Result<f64> {
    if sigma.dims().len() != 2 {
        return Err(Error::DimMismatch(
            "ree_lower_bracket needs a bipartite state".into(),
        ));
    }
    let s_se = von_neumann_entropy(sigma)?;
    let s_s = von_neumann_entropy(&sigma.partial_trace(0)?)?;
    let s_e = von_neumann_entropy(&sigma.partial_trace(1)?)?;
    Ok((s_s - s_se).max(s_e - s_se).max(0.0))
}

/// Convex mixture of pure product states, the certificate behind an upper
/// bracket value.
#[derive(Debug, Clone)]
pub struct SeparableAnsatz {
    weights: Vec<f64>,
    factors: Vec<(CVec, CVec)>,
}

/// Serde-friendly ansatz form: complex vectors as [re, im] pair lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparableAnsatzExport {
    pub weights: Vec<f64>,
    pub factors_s: Vec<Vec<[f64; 2]>>,
    pub factors_e: Vec<Vec<[f64; 2]>>,
}

fn normalized(v: &CVec) -> Option<CVec> {
    let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n < 1e-14 {
        None
    } else {
        Some(v.mapv(|z| z / n))
    }
}

impl SeparableAnsatz {
    pub fn new(weights: Vec<f64>, factors: Vec<(CVec, CVec)>) -> Result<Self> {
        if weights.len() != factors.len() || weights.is_empty() {
            return Err(Error::BadProbs(format!(
                "{} weights for {} factors",
                weights.len(),
                factors.len()
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-10 || weights.iter().any(|&w| w < -1e-12) {
            return Err(Error::BadProbs(format!("ansatz weights sum to {sum}")));
        }
        for (a, b) in &factors {
            let na: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum();
            if (na - 1.0).abs() > 1e-10 || (nb - 1.0).abs() > 1e-10 {
                return Err(Error::BadProbs("ansatz factor not normalized".into()));
            }
        }
        Ok(Self { weights, factors })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn factors(&self) -> &[(CVec, CVec)] {
        &self.factors
    }

    /// The separable density matrix the ansatz represents.
    pub fn state(&self) -> Result<DensityMatrix> {
        let d_s = self.factors[0].0.len();
        let d_e = self.factors[0].1.len();
        let d = d_s * d_e;
        let mut m = CMat::zeros((d, d));
        for (w, (a, b)) in self.weights.iter().zip(&self.factors) {
            if *w <= 0.0 {
                continue;
            }
            let mut ket = CVec::zeros(d);
            for i in 0..d_s {
                for j in 0..d_e {
                    ket[i * d_e + j] = a[i] * b[j];
                }
            }
            for r in 0..d {
                for c in 0..d {
                    m[[r, c]] += Complex64::new(*w, 0.0) * ket[r] * ket[c].conj();
                }
            }
        }
        DensityMatrix::new(m, vec![d_s, d_e])
    }

    pub fn export(&self) -> SeparableAnsatzExport {
        SeparableAnsatzExport {
            weights: self.weights.clone(),
            factors_s: self
                .factors
                .iter()
                .map(|(a, _)| a.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
            factors_e: self
                .factors
                .iter()
                .map(|(_, b)| b.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

/// Working representation during the search: weights are kept unnormalized-
/// positive and renormalized on demand.
struct Atoms {
    d_s: usize,
    d_e: usize,
    weights: Vec<f64>,
    factors: Vec<(CVec, CVec)>,
}

impl Atoms {
    fn product_ket(&self, t: usize) -> CVec {
        let (a, b) = &self.factors[t];
        let mut ket = CVec::zeros(self.d_s * self.d_e);
        for i in 0..self.d_s {
            for j in 0..self.d_e {
                ket[i * self.d_e + j] = a[i] * b[j];
            }
        }
        ket
    }

    fn matrix(&self) -> CMat {
        let d = self.d_s * self.d_e;
        let mut m = CMat::zeros((d, d));
        let total: f64 = self.weights.iter().sum();
        for t in 0..self.weights.len() {
            let w = self.weights[t] / total;
            if w <= 0.0 {
                continue;
            }
            let ket = self.product_ket(t);
            for r in 0..d {
                for c in 0..d {
                    m[[r, c]] += Complex64::new(w, 0.0) * ket[r] * ket[c].conj();
                }
            }
        }
        m
    }

    fn prune(&mut self, cap: usize) {
        let total: f64 = self.weights.iter().sum();
        let mut idx: Vec<usize> = (0..self.weights.len()).collect();
        idx.retain(|&t| self.weights[t] / total > 1e-12);
        if idx.len() > cap {
            idx.sort_by(|&a, &b| {
                self.weights[b]
                    .partial_cmp(&self.weights[a])
                    .unwrap()
                    .then(a.cmp(&b))
            });
            idx.truncate(cap);
            idx.sort_unstable();
        }
        self.weights = idx.iter().map(|&t| self.weights[t]).collect();
        self.factors = idx.iter().map(|&t| self.factors[t].clone()).collect();
    }

    fn to_ansatz(&self) -> Result<SeparableAnsatz> {
        let total: f64 = self.weights.iter().sum();
        let weights: Vec<f64> = self.weights.iter().map(|w| (w / total).max(0.0)).collect();
        let shift = 1.0 - weights.iter().sum::<f64>();
        let mut weights = weights;
        if let Some(w0) = weights.first_mut() {
            *w0 += shift; // absorb rounding so the sum is exactly 1
        }
        SeparableAnsatz::new(weights, self.factors.clone())
    }
}

/// Objective and gradient kernel of f(ξ) = S(σ||ξ) at the blended point, in
/// bits. The kernel K satisfies d(−Tr σ log2 ξ)[δ] = −Tr[K δ].
struct Objective<'a> {
    sigma: &'a CMat,
    neg_entropy: f64, // Tr σ log2 σ
    dim: usize,
}

impl<'a> Objective<'a> {
    fn eval(&self, xi: &CMat) -> Result<(f64, CMat)> {
        let d = self.dim;
        let blended = xi.mapv(|z| z * (1.0 - BLEND))
            + CMat::from_diag_elem(d, Complex64::new(BLEND / d as f64, 0.0));
        let dec = herm_eig(&blended)?;
        let v = &dec.eigenvectors;
        let vals: Vec<f64> = dec
            .eigenvalues
            .iter()
            .map(|&l| clip_eigenvalue(l).map(|x| x.max(BLEND * 1e-3 / d as f64)))
            .collect::<Result<_>>()?;
        // σ in the ξ eigenbasis
        let vt = v.t().mapv(|z| z.conj());
        let st = vt.dot(self.sigma).dot(v);
        let ln2 = std::f64::consts::LN_2;
        let mut f = self.neg_entropy;
        for i in 0..d {
            f -= st[[i, i]].re * vals[i].ln() / ln2;
        }
        // divided-difference kernel of the log
        let mut k = CMat::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                let (a, b) = (vals[i], vals[j]);
                let phi = if (a - b).abs() < 1e-12 * a.max(b) {
                    1.0 / a
                } else {
                    (a.ln() - b.ln()) / (a - b)
                };
                k[[i, j]] = st[[i, j]] * (phi / ln2);
            }
        }
        let k = v.dot(&k).dot(&vt);
        Ok((f.max(0.0), k))
    }
}

/// Best product state for the linearized objective: maximize ⟨a⊗b|K|a⊗b⟩ by
/// alternating top-eigenvector updates.
fn best_atom(
    k: &CMat,
    d_s: usize,
    d_e: usize,
    rng: &mut ChaCha8Rng,
    tries: usize,
) -> (f64, CVec, CVec) {
    let mut best = (f64::NEG_INFINITY, CVec::zeros(d_s), CVec::zeros(d_e));
    for trial in 0..tries {
        let mut b: CVec = if trial == 0 {
            CVec::from_elem(d_e, Complex64::new(1.0 / (d_e as f64).sqrt(), 0.0))
        } else {
            CVec::from_shape_fn(d_e, |_| {
                Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            })
        };
        b = normalized(&b).unwrap_or_else(|| CVec::from_elem(d_e, Complex64::new(1.0, 0.0)));
        let mut a = CVec::zeros(d_s);
        let mut val = f64::NEG_INFINITY;
        for _ in 0..12 {
            // fix b, optimize a
            let mut ka = CMat::zeros((d_s, d_s));
            for i in 0..d_s {
                for i2 in 0..d_s {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..d_e {
                        for j2 in 0..d_e {
                            acc += b[j].conj() * k[[i * d_e + j, i2 * d_e + j2]] * b[j2];
                        }
                    }
                    ka[[i, i2]] = acc;
                }
            }
            let ka = (&ka + &ka.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
            if let Ok(dec) = herm_eig(&ka) {
                a = dec.eigenvectors.column(d_s - 1).to_owned();
            }
            // fix a, optimize b
            let mut kb = CMat::zeros((d_e, d_e));
            for j in 0..d_e {
                for j2 in 0..d_e {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..d_s {
                        for i2 in 0..d_s {
                            acc += a[i].conj() * k[[i * d_e + j, i2 * d_e + j2]] * a[i2];
                        }
                    }
                    kb[[j, j2]] = acc;
                }
            }
            let kb = (&kb + &kb.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
            let new_val = if let Ok(dec) = herm_eig(&kb) {
                b = dec.eigenvectors.column(d_e - 1).to_owned();
                dec.eigenvalues[d_e - 1]
            } else {
                val
            };
            if (new_val - val).abs() < 1e-12 {
                val = new_val;
                break;
            }
            val = new_val;
        }
        if val > best.0 {
            best = (val, a, b);
        }
    }
    best
}

fn seed_ansatze(sigma: &DensityMatrix) -> Result<Vec<Atoms>> {
    let d_s = sigma.dims()[0];
    let d_e = sigma.dims()[1];
    let mut out = Vec::new();

    // classical-quantum pinch on each side: dephase one factor in its
    // computational basis, eigendecompose the conditional blocks
    for side in 0..2 {
        let (da, db) = if side == 0 { (d_s, d_e) } else { (d_e, d_s) };
        let mut weights = Vec::new();
        let mut factors = Vec::new();
        for i in 0..da {
            let mut block = CMat::zeros((db, db));
            for r in 0..db {
                for c in 0..db {
                    let (row, col) = if side == 0 {
                        (i * d_e + r, i * d_e + c)
                    } else {
                        (r * d_e + i, c * d_e + i)
                    };
                    block[[r, c]] = sigma.mat()[[row, col]];
                }
            }
            let q = block.diag().sum().re;
            if q < 1e-14 {
                continue;
            }
            let dec = herm_eig(&(&block + &block.t().mapv(|z| z.conj())).mapv(|z| z * 0.5))?;
            let mut e_i = CVec::zeros(da);
            e_i[i] = Complex64::new(1.0, 0.0);
            for (idx, &l) in dec.eigenvalues.iter().enumerate() {
                if l <= 1e-14 {
                    continue;
                }
                let v = dec.eigenvectors.column(idx).to_owned();
                let v = normalized(&v).unwrap();
                weights.push(l);
                if side == 0 {
                    factors.push((e_i.clone(), v));
                } else {
                    factors.push((v, e_i.clone()));
                }
            }
        }
        if !weights.is_empty() {
            out.push(Atoms {
                d_s,
                d_e,
                weights,
                factors,
            });
        }
    }

    // product of marginals
    let rho_s = sigma.partial_trace(0)?;
    let rho_e = sigma.partial_trace(1)?;
    let dec_s = herm_eig(rho_s.mat())?;
    let dec_e = herm_eig(rho_e.mat())?;
    let mut weights = Vec::new();
    let mut factors = Vec::new();
    for (i, &ls) in dec_s.eigenvalues.iter().enumerate() {
        for (j, &le) in dec_e.eigenvalues.iter().enumerate() {
            let w = ls.max(0.0) * le.max(0.0);
            if w <= 1e-16 {
                continue;
            }
            let a = normalized(&dec_s.eigenvectors.column(i).to_owned()).unwrap();
            let b = normalized(&dec_e.eigenvectors.column(j).to_owned()).unwrap();
            weights.push(w);
            factors.push((a, b));
        }
    }
    out.push(Atoms {
        d_s,
        d_e,
        weights,
        factors,
    });

    // Schmidt pinch of every eigenvector, mixed with the spectral weights:
    // exact for pure states, a decent generic seed otherwise
    let dec = herm_eig(sigma.mat())?;
    let mut weights = Vec::new();
    let mut factors = Vec::new();
    for (idx, &l) in dec.eigenvalues.iter().enumerate() {
        if l <= 1e-12 {
            continue;
        }
        let psi = dec.eigenvectors.column(idx);
        // reduced state of ψ on S and its eigenbasis give the Schmidt vectors
        let mut red = CMat::zeros((d_s, d_s));
        for i in 0..d_s {
            for i2 in 0..d_s {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..d_e {
                    acc += psi[i * d_e + j] * psi[i2 * d_e + j].conj();
                }
                red[[i, i2]] = acc;
            }
        }
        let red = (&red + &red.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        let rdec = herm_eig(&red)?;
        for (k, &lam) in rdec.eigenvalues.iter().enumerate() {
            if lam <= 1e-12 {
                continue;
            }
            let a = normalized(&rdec.eigenvectors.column(k).to_owned()).unwrap();
            let mut b = CVec::zeros(d_e);
            for j in 0..d_e {
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..d_s {
                    acc += a[i].conj() * psi[i * d_e + j];
                }
                b[j] = acc;
            }
            if let Some(b) = normalized(&b) {
                weights.push(l * lam);
                factors.push((a, b));
            }
        }
    }
    if !weights.is_empty() {
        out.push(Atoms {
            d_s,
            d_e,
            weights,
            factors,
        });
    }

    // full diagonal pinch in the product computational basis
    let d = d_s * d_e;
    let mut weights = Vec::new();
    let mut factors = Vec::new();
    for r in 0..d {
        let w = sigma.mat()[[r, r]].re;
        if w <= 1e-16 {
            continue;
        }
        let mut a = CVec::zeros(d_s);
        a[r / d_e] = Complex64::new(1.0, 0.0);
        let mut b = CVec::zeros(d_e);
        b[r % d_e] = Complex64::new(1.0, 0.0);
        weights.push(w);
        factors.push((a, b));
    }
    out.push(Atoms {
        d_s,
        d_e,
        weights,
        factors,
    });

    Ok(out)
}

/// Exponentiated-gradient reoptimization of the atom weights (convex in the
/// weights at fixed atoms).
fn reoptimize_weights(obj: &Objective, atoms: &mut Atoms, steps: usize) -> Result<f64> {
    let n = atoms.weights.len();
    let total: f64 = atoms.weights.iter().sum();
    for w in &mut atoms.weights {
        *w /= total;
    }
    let kets: Vec<CVec> = (0..n).map(|t| atoms.product_ket(t)).collect();
    let (mut f, mut k) = obj.eval(&atoms.matrix())?;
    let mut eta = 1.0f64;
    for _ in 0..steps {
        // q_t = <atom_t, K>
        let mut q = vec![0.0f64; n];
        for (t, ket) in kets.iter().enumerate() {
            let d = ket.len();
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..d {
                let mut row = Complex64::new(0.0, 0.0);
                for c in 0..d {
                    row += k[[r, c]] * ket[c];
                }
                acc += ket[r].conj() * row;
            }
            q[t] = acc.re;
        }
        let qmax = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let old = atoms.weights.clone();
        let mut improved = false;
        while eta > 1e-6 {
            let mut trial: Vec<f64> = old
                .iter()
                .zip(&q)
                .map(|(w, qt)| w * ((eta * (qt - qmax)).exp()))
                .collect();
            let z: f64 = trial.iter().sum();
            if z <= 0.0 || !z.is_finite() {
                eta *= 0.5;
                continue;
            }
            for w in &mut trial {
                *w /= z;
            }
            atoms.weights = trial;
            let (f_new, k_new) = obj.eval(&atoms.matrix())?;
            if f_new <= f + 1e-14 {
                f = f_new;
                k = k_new;
                improved = true;
                break;
            }
            eta *= 0.5;
        }
        if !improved {
            atoms.weights = old;
            break;
        }
    }
    Ok(f)
}

fn refine(
    obj: &Objective,
    mut atoms: Atoms,
    cap: usize,
    fw_iters: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, Atoms)> {
    let d_s = atoms.d_s;
    let d_e = atoms.d_e;
    let mut f = reoptimize_weights(obj, &mut atoms, 40)?;
    for _ in 0..fw_iters {
        if f <= 1e-9 {
            break;
        }
        let (_, k) = obj.eval(&atoms.matrix())?;
        let (lin, a, b) = best_atom(&k, d_s, d_e, rng, 2);
        // Frank-Wolfe gap: how much the linearization can still improve
        let mut cur = 0.0;
        for t in 0..atoms.weights.len() {
            let ket = atoms.product_ket(t);
            let d = ket.len();
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..d {
                let mut row = Complex64::new(0.0, 0.0);
                for c in 0..d {
                    row += k[[r, c]] * ket[c];
                }
                acc += ket[r].conj() * row;
            }
            let total: f64 = atoms.weights.iter().sum();
            cur += atoms.weights[t] / total * acc.re;
        }
        let gap = lin - cur;
        if gap < 1e-7 {
            break;
        }
        atoms.weights.push(1e-3);
        atoms.factors.push((a, b));
        let f_new = reoptimize_weights(obj, &mut atoms, 40)?;
        atoms.prune(cap);
        if f - f_new < 1e-10 {
            f = f_new.min(f);
            break;
        }
        f = f_new;
    }
    Ok((f, atoms))
}

/// Budgeted upper bracket: `k` caps the ansatz size, `fw_iters` caps the
/// Frank-Wolfe refinement rounds per restart (0 = analytic seeds only).
pub fn ree_upper_bracket_budget(
    sigma: &DensityMatrix,
    k: usize,
    restarts: usize,
    seed: u64,
    fw_iters: usize,
) -> Result<(f64, SeparableAnsatz)> {
    if sigma.dims().len() != 2 {
        return Err(Error::DimMismatch(
            "ree_upper_bracket needs a bipartite state".into(),
        ));
    }
    let d = sigma.dim();
    if d > REE_DIM_CAP {
        return Err(Error::DimTooLarge {
            dim: d,
            cap: REE_DIM_CAP,
        });
    }
    let k = k.max(4);
    let neg_entropy = -von_neumann_entropy(sigma)?;
    let obj = Objective {
        sigma: sigma.mat(),
        neg_entropy,
        dim: d,
    };

    let seeds = seed_ansatze(sigma)?;
    let mut best: Option<(f64, Atoms)> = None;
    for atoms in seeds {
        let (f, _) = obj.eval(&atoms.matrix())?;
        if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
            best = Some((f, atoms));
        }
    }
    let (mut best_f, mut best_atoms) = best.expect("at least one seed");

    if best_f > 1e-9 && fw_iters > 0 {
        for r in 0..restarts.max(1) {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed.wrapping_add((r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            );
            let start = Atoms {
                d_s: best_atoms.d_s,
                d_e: best_atoms.d_e,
                weights: best_atoms.weights.clone(),
                factors: best_atoms.factors.clone(),
            };
            let (f, atoms) = refine(&obj, start, k, fw_iters, &mut rng)?;
            if f < best_f {
                best_f = f;
                best_atoms = atoms;
            }
        }
    }

    let ansatz = best_atoms.to_ansatz()?;
    // report the unblended value for the certificate actually returned
    let value = relative_entropy(sigma, &ansatz.state()?)?;
    let value = if value.is_finite() { value } else { best_f };
    Ok((value.max(0.0), ansatz))
}

/// Upper bracket with the default refinement budget.
pub fn ree_upper_bracket(
    sigma: &DensityMatrix,
    k: usize,
    restarts: usize,
    seed: u64,
) -> Result<(f64, SeparableAnsatz)> {
    ree_upper_bracket_budget(sigma, k, restarts, seed, 150)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::quantum_mutual_info;
    use crate::linalg::kron;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> DensityMatrix {
        let h = 1.0 / 2f64.sqrt();
        let ket: CVec = ndarray::array![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        DensityMatrix::from_pure(&ket, vec![2, 2]).unwrap()
    }

    fn random_product_mixture(n_terms: usize, d_s: usize, d_e: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = d_s * d_e;
        let mut m = CMat::zeros((d, d));
        let mut ws: Vec<f64> = (0..n_terms).map(|_| rng.gen::<f64>() + 0.05).collect();
        let total: f64 = ws.iter().sum();
        ws.iter_mut().for_each(|w| *w /= total);
        for w in ws {
            let a = normalized(&CVec::from_shape_fn(d_s, |_| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            }))
            .unwrap();
            let b = normalized(&CVec::from_shape_fn(d_e, |_| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            }))
            .unwrap();
            let pa = CMat::from_shape_fn((d_s, d_s), |(i, j)| a[i] * a[j].conj());
            let pb = CMat::from_shape_fn((d_e, d_e), |(i, j)| b[i] * b[j].conj());
            m = m + kron(&pa, &pb).mapv(|z| z * w);
        }
        let m = (&m + &m.t().mapv(|z| z.conj())).mapv(|z| z * 0.5);
        DensityMatrix::new(m, vec![d_s, d_e]).unwrap()
    }

    #[test]
    fn ppt_cases() {
        let prod = random_product_mixture(1, 2, 2, 1);
        let (ok, _) = is_ppt(&prod).unwrap();
        assert!(ok);
        let (ok, min) = is_ppt(&bell()).unwrap();
        assert!(!ok);
        assert!((min + 0.5).abs() < 1e-10);
    }

    #[test]
    fn lower_bracket_cases() {
        let prod = random_product_mixture(1, 2, 2, 2);
        assert!(ree_lower_bracket(&prod).unwrap() < 1e-9);
        assert!((ree_lower_bracket(&bell()).unwrap() - 1.0).abs() < 1e-9);
        let sep = random_product_mixture(6, 2, 2, 3);
        assert!(ree_lower_bracket(&sep).unwrap() < 1e-9);
    }

    #[test]
    fn upper_bracket_bell_state() {
        let (v, ansatz) = ree_upper_bracket(&bell(), 16, 1, 0).unwrap();
        assert!((v - 1.0).abs() < 1e-3, "v = {v}");
        // certificate is a genuinely separable state
        let (ppt, _) = is_ppt(&ansatz.state().unwrap()).unwrap();
        assert!(ppt);
    }

    #[test]
    fn upper_bracket_separable_states() {
        for seed in 0..5 {
            let sigma = random_product_mixture(6, 2, 2, 100 + seed);
            let (ppt, _) = is_ppt(&sigma).unwrap();
            assert!(ppt);
            let (v, _) = ree_upper_bracket(&sigma, 16, 2, seed).unwrap();
            assert!(v <= 1e-3, "seed {seed}: v = {v}");
        }
    }

    #[test]
    fn upper_bracket_below_mutual_info() {
        for seed in 0..5 {
            // entangled-ish random mixture of products plus a Bell component
            let sep = random_product_mixture(4, 2, 2, 200 + seed);
            let m = sep.mat().mapv(|z| z * 0.6) + bell().mat().mapv(|z| z * 0.4);
            let sigma = DensityMatrix::new(
                (&m + &m.t().mapv(|z| z.conj())).mapv(|z| z * 0.5),
                vec![2, 2],
            )
            .unwrap();
            let (v, _) = ree_upper_bracket_budget(&sigma, 16, 1, seed, 30).unwrap();
            let mi = quantum_mutual_info(&sigma).unwrap();
            let lo = ree_lower_bracket(&sigma).unwrap();
            assert!(v <= mi + 1e-3, "seed {seed}: v = {v}, mi = {mi}");
            assert!(lo <= v + 1e-4, "seed {seed}: lo = {lo}, v = {v}");
        }
    }

    #[test]
    fn upper_bracket_pinches_pure_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        for _ in 0..5 {
            let ket = normalized(&CVec::from_shape_fn(4, |_| {
                c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
            }))
            .unwrap();
            let sigma = DensityMatrix::from_pure(&ket, vec![2, 2]).unwrap();
            let s_s = von_neumann_entropy(&sigma.partial_trace(0).unwrap()).unwrap();
            let (v, _) = ree_upper_bracket_budget(&sigma, 16, 1, 7, 0).unwrap();
            let lo = ree_lower_bracket(&sigma).unwrap();
            assert!((v - s_s).abs() < 1e-3, "v = {v}, S = {s_s}");
            assert!((lo - s_s).abs() < 1e-9);
        }
    }

    #[test]
    fn dimension_cap_enforced() {
        let big = random_product_mixture(2, 7, 6, 9);
        assert!(matches!(
            ree_upper_bracket(&big, 8, 1, 0),
            Err(Error::DimTooLarge { .. })
        ));
    }
}
