//! Accessible-information machinery: classical mutual information of a POVM on
//! an ensemble, a seeded local optimizer over rank-1 POVMs, and the analytic
//! two-state lower bound on accessible information.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::info::{binary_entropy, conditional_entropy, EnvEnsemble, Povm};
use crate::linalg::{dagger, herm_eig, CMat};
use crate::parallel::{argmax_by_value, map_collect};

/// Search budget for the POVM optimizer.
#[derive(Debug, Clone)]
pub struct PovmSearchConfig {
    /// Number of POVM outcomes; `None` means d_E².
    pub n_outcomes: Option<usize>,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_tolerance: f64,
    pub seed: u64,
}

impl PovmSearchConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            n_outcomes: None,
            restarts: 16,
            max_iters: 500,
            step_tolerance: 1e-8,
            seed,
        }
    }

    /// Cheap budget for bulk verification sweeps; the analytic seeds carry the
    /// guarantees, descent only polishes.
    pub fn quick(seed: u64) -> Self {
        Self {
            n_outcomes: None,
            restarts: 1,
            max_iters: 25,
            step_tolerance: 1e-6,
            seed,
        }
    }

    fn validate(&self, d: usize) -> Result<usize> {
        let n = self.n_outcomes.unwrap_or(d * d);
        if n < 2 {
            return Err(Error::OutOfRange(format!("n_outcomes = {n} < 2")));
        }
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::OutOfRange("restarts and max_iters must be positive".into()));
        }
        if self.step_tolerance <= 0.0 {
            return Err(Error::OutOfRange("step_tolerance must be positive".into()));
        }
        Ok(n)
    }
}

/// I(I:M) = H(I) − H(I|M), in [0, H(I)].
pub fn mutual_info_classical(e: &EnvEnsemble, m: &Povm) -> Result<f64> {
    let h_i = e.index_entropy();
    Ok((h_i - conditional_entropy(e, m)?).clamp(0.0, h_i))
}

/// Two-state accessible-information lower bound h(p) − 2√(p(1−p))·b.
pub fn jain_bound(p: f64, b: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&b) {
        return Err(Error::OutOfRange(format!("fidelity b = {b}")));
    }
    Ok(binary_entropy(p)? - 2.0 * (p * (1.0 - p)).sqrt() * b)
}

/// Mutual information scored directly from rank-1 rows, bypassing the Povm
/// validation cost in the inner loop.
fn score_rows(probs: &[f64], states: &[&CMat], h_i: f64, rows: &CMat) -> f64 {
    let n = rows.nrows();
    let d = rows.ncols();
    let k = states.len();
    // p(m|i) = <w_m| rho_i |w_m>
    let mut table = vec![0.0f64; k * n];
    for (i, s) in states.iter().enumerate() {
        for m in 0..n {
            let mut amp = Complex64::new(0.0, 0.0);
            for a in 0..d {
                let mut row = Complex64::new(0.0, 0.0);
                for b in 0..d {
                    row += s[[a, b]] * rows[[m, b]];
                }
                amp += rows[[m, a]].conj() * row;
            }
            table[i * n + m] = amp.re.max(0.0);
        }
    }
    let mut h_cond = 0.0;
    for m in 0..n {
        let marg: f64 = (0..k).map(|i| probs[i] * table[i * n + m]).sum();
        if marg <= 0.0 {
            continue;
        }
        for i in 0..k {
            let joint = probs[i] * table[i * n + m];
            if joint > 0.0 {
                h_cond -= joint * (joint / marg).log2();
            }
        }
    }
    (h_i - h_cond).clamp(0.0, h_i)
}

/// Map an unconstrained n×d matrix to isometry rows via X (X†X)^{−1/2}.
fn orthonormalize(x: &CMat) -> Result<CMat> {
    let g = dagger(x).dot(x);
    let dec = herm_eig(&g)?;
    if dec.eigenvalues[0] < 1e-12 {
        return Err(Error::Numerics(format!(
            "rank-deficient POVM parameterization, gram eigenvalue {}",
            dec.eigenvalues[0]
        )));
    }
    let inv_sqrt = dec.apply(|l| Complex64::new(1.0 / l.sqrt(), 0.0));
    Ok(x.dot(&inv_sqrt))
}

/// Isometry rows reproducing a projective measurement in the given basis
/// (columns), zero-padded to n outcomes.
fn rows_from_basis(basis: &CMat, n: usize) -> CMat {
    let d = basis.nrows();
    let mut rows = CMat::zeros((n, d));
    for m in 0..d.min(n) {
        for j in 0..d {
            rows[[m, j]] = basis[[j, m]];
        }
    }
    rows
}

/// Exhaustive 256×128 polar/azimuth grid over two-outcome projective
/// measurements on a qubit environment.
fn qubit_grid_rows(probs: &[f64], states: &[&CMat], h_i: f64, n: usize) -> CMat {
    let mut best = f64::NEG_INFINITY;
    let mut best_angles = (0.0f64, 0.0f64);
    for i in 0..256 {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / 256.0;
        let (st, ct) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        for j in 0..128 {
            let phi = 2.0 * std::f64::consts::PI * j as f64 / 128.0;
            let e = Complex64::new(0.0, phi).exp();
            // b0 = (cos θ/2, e^{iφ} sin θ/2), b1 orthogonal
            let b0 = [Complex64::new(ct, 0.0), e * st];
            let mut marg = 0.0;
            let mut joints = [0.0f64; 8];
            let k = states.len();
            for (idx, s) in states.iter().enumerate() {
                let amp = b0[0].conj() * (s[[0, 0]] * b0[0] + s[[0, 1]] * b0[1])
                    + b0[1].conj() * (s[[1, 0]] * b0[0] + s[[1, 1]] * b0[1]);
                let p0 = amp.re.clamp(0.0, 1.0);
                joints[idx] = probs[idx] * p0;
                joints[4 + idx] = probs[idx] * (1.0 - p0);
                marg += joints[idx];
            }
            let marg1 = 1.0 - marg;
            let mut h_cond = 0.0;
            for idx in 0..k {
                if joints[idx] > 0.0 && marg > 0.0 {
                    h_cond -= joints[idx] * (joints[idx] / marg).log2();
                }
                if joints[4 + idx] > 0.0 && marg1 > 0.0 {
                    h_cond -= joints[4 + idx] * (joints[4 + idx] / marg1).log2();
                }
            }
            let val = (h_i - h_cond).max(0.0);
            if val > best {
                best = val;
                best_angles = (theta, phi);
            }
        }
    }
    let (theta, phi) = best_angles;
    let (st, ct) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let e = Complex64::new(0.0, phi).exp();
    let mut basis = CMat::zeros((2, 2));
    basis[[0, 0]] = Complex64::new(ct, 0.0);
    basis[[1, 0]] = e * st;
    basis[[0, 1]] = -e.conj() * st;
    basis[[1, 1]] = Complex64::new(ct, 0.0);
    rows_from_basis(&basis, n)
}

fn coordinate_descent(
    probs: &[f64],
    states: &[&CMat],
    h_i: f64,
    x0: CMat,
    max_iters: usize,
    step_tolerance: f64,
) -> (f64, CMat) {
    let mut x = x0;
    let mut rows = match orthonormalize(&x) {
        Ok(r) => r,
        Err(_) => return (f64::NEG_INFINITY, x),
    };
    let mut best = score_rows(probs, states, h_i, &rows);
    let mut step = 0.25f64;
    let (n, d) = x.dim();
    for _ in 0..max_iters {
        let mut improved = false;
        for m in 0..n {
            for j in 0..d {
                for part in 0..2 {
                    for sgn in [1.0f64, -1.0] {
                        let delta = if part == 0 {
                            Complex64::new(sgn * step, 0.0)
                        } else {
                            Complex64::new(0.0, sgn * step)
                        };
                        let old = x[[m, j]];
                        x[[m, j]] = old + delta;
                        let cand = match orthonormalize(&x) {
                            Ok(r) => {
                                let s = score_rows(probs, states, h_i, &r);
                                Some((s, r))
                            }
                            Err(_) => None,
                        };
                        match cand {
                            Some((s, r)) if s > best + 1e-15 => {
                                best = s;
                                rows = r;
                                improved = true;
                            }
                            _ => x[[m, j]] = old,
                        }
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < step_tolerance {
                break;
            }
        }
    }
    (best, rows)
}

/// Maximize I(I:M) over POVMs. Seeded with the average-state eigenbasis, the
/// two-state Helstrom eigenbasis, and (for qubit environments) an exhaustive
/// projective grid; polished with restart-parallel coordinate descent. The
/// returned value is a lower estimate of the accessible information.
pub fn optimize_povm(e: &EnvEnsemble, cfg: &PovmSearchConfig) -> Result<(Povm, f64)> {
    let d = e.dim();
    let n = cfg.validate(d)?;
    let probs = e.probs().to_vec();
    let states: Vec<&CMat> = e.states().iter().map(|s| s.mat()).collect();
    let h_i = e.index_entropy();

    let mut seeds: Vec<CMat> = Vec::new();
    // average-state eigenbasis heuristic
    let avg = e.average()?;
    let avg_dec = herm_eig(avg.mat())?;
    seeds.push(rows_from_basis(&avg_dec.eigenvectors, n));
    // Helstrom eigenbasis for two-state ensembles
    if e.len() == 2 {
        let gap = states[0].mapv(|z| z * probs[0]) - states[1].mapv(|z| z * probs[1]);
        let dec = herm_eig(&gap)?;
        seeds.push(rows_from_basis(&dec.eigenvectors, n));
    }
    if d == 2 {
        seeds.push(qubit_grid_rows(&probs, &states, h_i, n));
    }

    let mut best_rows = seeds[0].clone();
    let mut best_val = f64::NEG_INFINITY;
    for s in &seeds {
        let v = score_rows(&probs, &states, h_i, s);
        if v > best_val {
            best_val = v;
            best_rows = s.clone();
        }
    }

    let starts: Vec<(usize, CMat)> = (0..cfg.restarts)
        .map(|idx| {
            if idx == 0 {
                (idx, best_rows.clone())
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    cfg.seed
                        .wrapping_add((idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
                );
                let x = CMat::from_shape_fn((n, d), |_| {
                    Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                (idx, x)
            }
        })
        .collect();
    let max_iters = cfg.max_iters;
    let tol = cfg.step_tolerance;
    let results = map_collect(starts, |(idx, x0)| {
        let (v, rows) = coordinate_descent(&probs, &states, h_i, x0, max_iters, tol);
        (idx, v, rows)
    });
    if let Some((_, v, rows)) = argmax_by_value(results) {
        if v > best_val {
            best_rows = rows;
        }
    }

    // assemble exactly-Hermitian rank-1 elements
    let elements: Vec<CMat> = (0..n)
        .map(|m| {
            CMat::from_shape_fn((d, d), |(i, j)| best_rows[[m, i]] * best_rows[[m, j]].conj())
        })
        .collect();
    let povm = Povm::new(elements)?;
    let value = mutual_info_classical(e, &povm)?;
    Ok((povm, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CVec;
    use crate::info::{fidelity, holevo_chi};
    use crate::linalg::{identity, trace, DensityMatrix};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_density(n: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = CMat::from_shape_fn((n, n), |_| {
            c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let w = g.dot(&dagger(&g));
        let tr = trace(&w).re;
        DensityMatrix::from_matrix(w.mapv(|z| z / tr)).unwrap()
    }

    fn basis_state(i: usize, n: usize) -> DensityMatrix {
        let mut ket = CVec::from_elem(n, c(0.0, 0.0));
        ket[i] = c(1.0, 0.0);
        DensityMatrix::from_pure(&ket, vec![n]).unwrap()
    }

    #[test]
    fn mutual_info_edge_cases() {
        let e = EnvEnsemble::new(
            vec![0.3, 0.7],
            vec![basis_state(0, 2), basis_state(0, 2)],
        )
        .unwrap();
        let proj = Povm::projective(&identity(2)).unwrap();
        assert!(mutual_info_classical(&e, &proj).unwrap() < 1e-12);

        let e = EnvEnsemble::new(vec![0.3, 0.7], vec![basis_state(0, 2), basis_state(1, 2)]).unwrap();
        let mi = mutual_info_classical(&e, &proj).unwrap();
        assert!((mi - e.index_entropy()).abs() < 1e-12);
    }

    #[test]
    fn mutual_info_below_holevo() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let e = EnvEnsemble::new(
                vec![0.4, 0.6],
                vec![random_density(2, 300 + trial), random_density(2, 400 + trial)],
            )
            .unwrap();
            let chi = holevo_chi(&e).unwrap();
            let g = CMat::from_shape_fn((2, 2), |_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
            let dec = herm_eig(&(&g + &dagger(&g)).mapv(|z| z * 0.5)).unwrap();
            let m = Povm::projective(&dec.eigenvectors).unwrap();
            let mi = mutual_info_classical(&e, &m).unwrap();
            assert!(mi <= chi + 1e-9);
        }
    }

    #[test]
    fn jain_values() {
        assert!((jain_bound(0.5, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(jain_bound(0.5, 1.0).unwrap().abs() < 1e-15);
        assert!(jain_bound(0.0, 0.7).unwrap().abs() < 1e-15);
        assert!(jain_bound(0.5, 1.5).is_err());
        assert!(jain_bound(-0.1, 0.5).is_err());
    }

    #[test]
    fn optimizer_finds_perfect_discrimination() {
        let e = EnvEnsemble::new(vec![0.35, 0.65], vec![basis_state(0, 2), basis_state(1, 2)]).unwrap();
        let (_, v) = optimize_povm(&e, &PovmSearchConfig::quick(1)).unwrap();
        assert!((v - e.index_entropy()).abs() < 1e-6, "v = {v}");
    }

    #[test]
    fn optimizer_on_identical_states() {
        let s = random_density(2, 5);
        let e = EnvEnsemble::new(vec![0.5, 0.5], vec![s.clone(), s]).unwrap();
        let (_, v) = optimize_povm(&e, &PovmSearchConfig::quick(2)).unwrap();
        assert!(v <= 1e-8, "v = {v}");
    }

    #[test]
    fn optimizer_beats_jain_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..25 {
            let r0 = random_density(2, 1000 + trial);
            let r1 = random_density(2, 2000 + trial);
            let p = 0.1 + 0.8 * rng.gen::<f64>();
            let e = EnvEnsemble::new(vec![p, 1.0 - p], vec![r0.clone(), r1.clone()]).unwrap();
            let (_, v) = optimize_povm(&e, &PovmSearchConfig::quick(trial)).unwrap();
            let jb = jain_bound(p, fidelity(&r0, &r1).unwrap()).unwrap();
            let chi = holevo_chi(&e).unwrap();
            assert!(v >= jb - 1e-6, "trial {trial}: v = {v}, jain = {jb}");
            assert!(v <= chi + 1e-9, "trial {trial}: v = {v}, chi = {chi}");
        }
    }

    #[test]
    fn optimizer_beats_eigenbasis_heuristic() {
        for trial in 0..10 {
            let e = EnvEnsemble::new(
                vec![0.5, 0.5],
                vec![random_density(3, 10 + trial), random_density(3, 20 + trial)],
            )
            .unwrap();
            let avg = e.average().unwrap();
            let dec = herm_eig(avg.mat()).unwrap();
            let heuristic = Povm::projective(&dec.eigenvectors).unwrap();
            let base = mutual_info_classical(&e, &heuristic).unwrap();
            let (_, v) = optimize_povm(&e, &PovmSearchConfig::quick(trial)).unwrap();
            assert!(v >= base - 1e-9, "trial {trial}: v = {v}, heuristic = {base}");
        }
    }

    #[test]
    fn optimizer_is_deterministic() {
        let e = EnvEnsemble::new(
            vec![0.3, 0.7],
            vec![random_density(3, 91), random_density(3, 92)],
        )
        .unwrap();
        let mut cfg = PovmSearchConfig::quick(1234);
        cfg.restarts = 3;
        let (m1, v1) = optimize_povm(&e, &cfg).unwrap();
        let (m2, v2) = optimize_povm(&e, &cfg).unwrap();
        assert_eq!(v1.to_bits(), v2.to_bits());
        for (a, b) in m1.elements().iter().zip(m2.elements()) {
            assert!(a
                .iter()
                .zip(b.iter())
                .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
        }
    }

    #[test]
    fn config_validation() {
        let e = EnvEnsemble::new(vec![1.0], vec![random_density(2, 1)]).unwrap();
        let mut cfg = PovmSearchConfig::new(0);
        cfg.n_outcomes = Some(1);
        assert!(optimize_povm(&e, &cfg).is_err());
        let mut cfg = PovmSearchConfig::new(0);
        cfg.restarts = 0;
        assert!(optimize_povm(&e, &cfg).is_err());
    }
}
