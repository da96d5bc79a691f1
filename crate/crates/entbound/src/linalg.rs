//! Dense complex Hermitian linear algebra for multipartite quantum states.
//!
//! Matrices are `ndarray::Array2<Complex64>` in row-major order. Eigenproblems
//! are delegated to LAPACK through `ndarray-linalg`.

use ndarray::prelude::*;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = Array2<Complex64>;
pub type CVec = Array1<Complex64>;

/// Hermiticity tolerance for operator inputs (entrywise).
pub const HERM_TOL: f64 = 1e-10;
/// Eigenvalues in [-EIG_CLIP, 0) are treated as exact zeros; anything more
/// negative is a genuine PSD violation and fails loudly.
pub const EIG_CLIP: f64 = 1e-10;

pub fn identity(n: usize) -> CMat {
    Array2::from_diag_elem(n, Complex64::new(1.0, 0.0))
}

pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diag().sum()
}

/// Largest entrywise |a - b|.
pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entrywise deviation from Hermiticity, max |A - A^dag|.
pub fn herm_deviation(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Kronecker product; row-major ordering (left factor is the slow index).
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = CMat::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut block = out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            block.zip_mut_with(b, |o, &v| *o = aij * v);
        }
    }
    out
}

/// Spectral decomposition of a Hermitian matrix: ascending real eigenvalues
/// and orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMat,
}

impl SpectralDecomposition {
    /// V f(Lambda) V^dag.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMat {
        let v = &self.eigenvectors;
        let fd: CVec = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut scaled = v.clone();
        for (mut col, fl) in scaled.columns_mut().into_iter().zip(fd.iter()) {
            col.map_inplace(|z| *z *= fl);
        }
        scaled.dot(&dagger(v))
    }

    pub fn reconstruct(&self) -> CMat {
        self.apply(|l| Complex64::new(l, 0.0))
    }
}

/// Eigendecomposition of a Hermitian matrix (checked to `HERM_TOL`).
pub fn herm_eig(h: &CMat) -> Result<SpectralDecomposition> {
    let dev = herm_deviation(h);
    if dev > HERM_TOL {
        return Err(Error::NotHermitian(dev));
    }
    // Symmetrize so LAPACK sees an exactly Hermitian input.
    let hs = (h + &dagger(h)).mapv(|z| z * 0.5);
    // The row-major buffer reaches LAPACK column-major, so the backend
    // diagonalizes conj(hs); conjugating the returned vectors undoes that.
    let hs = hs.as_standard_layout().to_owned();
    let (vals, vecs) = hs.eigh(UPLO::Lower)?;
    Ok(SpectralDecomposition {
        eigenvalues: vals.to_vec(),
        eigenvectors: vecs.mapv(|z| z.conj()),
    })
}

/// f applied to the spectrum of a Hermitian matrix.
pub fn mat_func(h: &CMat, f: impl Fn(f64) -> Complex64) -> Result<CMat> {
    let dec = herm_eig(h)?;
    for &l in &dec.eigenvalues {
        let v = f(l);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::FnUndefined(l));
        }
    }
    Ok(dec.apply(f))
}

/// Clip an eigenvalue of a nominally PSD operator: values in [-EIG_CLIP, 0)
/// become 0, more negative values are an error.
pub fn clip_eigenvalue(l: f64) -> Result<f64> {
    if l >= 0.0 {
        Ok(l)
    } else if l >= -EIG_CLIP {
        Ok(0.0)
    } else {
        Err(Error::NotPsd(l))
    }
}

/// Square root of a PSD Hermitian matrix with eigenvalue clipping.
pub fn psd_sqrt(h: &CMat) -> Result<CMat> {
    let dec = herm_eig(h)?;
    let clipped: Result<Vec<f64>> = dec.eigenvalues.iter().map(|&l| clip_eigenvalue(l)).collect();
    let clipped = clipped?;
    let v = &dec.eigenvectors;
    let mut scaled = v.clone();
    for (mut col, l) in scaled.columns_mut().into_iter().zip(clipped.iter()) {
        let s = l.sqrt();
        col.map_inplace(|z| *z *= s);
    }
    Ok(scaled.dot(&dagger(v)))
}

/// Trace-one, PSD, Hermitian operator on a tensor-product space.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    mat: CMat,
    dims: Vec<usize>,
}

const DM_HERM_TOL: f64 = 1e-12;
const DM_TRACE_TOL: f64 = 1e-12;

impl DensityMatrix {
    pub fn new(mat: CMat, dims: Vec<usize>) -> Result<Self> {
        let d: usize = dims.iter().product();
        if d == 0 || mat.nrows() != d || mat.ncols() != d {
            return Err(Error::DimMismatch(format!(
                "matrix is {}x{}, subsystem dims {:?} give {}",
                mat.nrows(),
                mat.ncols(),
                dims,
                d
            )));
        }
        let dev = herm_deviation(&mat);
        if dev > DM_HERM_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = trace(&mat);
        let tdev = (tr - Complex64::new(1.0, 0.0)).norm();
        if tdev > DM_TRACE_TOL {
            return Err(Error::TraceNotOne(tdev));
        }
        let dec = herm_eig(&mat)?;
        let min = dec.eigenvalues.first().copied().unwrap_or(0.0);
        if min < -EIG_CLIP {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { mat, dims })
    }

    /// Single-subsystem state.
    pub fn from_matrix(mat: CMat) -> Result<Self> {
        let n = mat.nrows();
        Self::new(mat, vec![n])
    }

    pub fn from_pure(ket: &CVec, dims: Vec<usize>) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::BadProbs(format!("ket norm {norm} is not 1")));
        }
        let n = ket.len();
        let mut mat = CMat::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                mat[[i, j]] = ket[i] * ket[j].conj() / (norm * norm);
            }
        }
        Self::new(mat, dims)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    /// Clipped spectrum, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let dec = herm_eig(&self.mat)?;
        dec.eigenvalues.iter().map(|&l| clip_eigenvalue(l)).collect()
    }

    pub fn purity(&self) -> f64 {
        trace(&self.mat.dot(&self.mat)).re
    }

    /// Largest off-diagonal modulus; zero means incoherent in the
    /// computational basis.
    pub fn max_offdiag(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.mat[[i, j]].norm());
                }
            }
        }
        worst
    }

    /// Kronecker product; subsystem dims are concatenated.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mat = kron(&self.mat, &other.mat);
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix { mat, dims }
    }

    /// Trace out every subsystem except `keep`.
    pub fn partial_trace(&self, keep: usize) -> Result<DensityMatrix> {
        let n_sub = self.dims.len();
        if n_sub < 2 {
            return Err(Error::DimMismatch(
                "partial trace needs at least two subsystems".into(),
            ));
        }
        if keep >= n_sub {
            return Err(Error::BadSubsystem {
                index: keep,
                count: n_sub,
            });
        }
        let dk = self.dims[keep];
        let rest_dims: Vec<usize> = self
            .dims
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != keep)
            .map(|(_, &d)| d)
            .collect();
        let rest: usize = rest_dims.iter().product();

        // Row-major strides of the full index.
        let mut strides = vec![1usize; n_sub];
        for i in (0..n_sub - 1).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        let rest_strides: Vec<usize> = strides
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != keep)
            .map(|(_, &s)| s)
            .collect();

        let compose = |kept: usize, r: usize| -> usize {
            let mut idx = kept * strides[keep];
            let mut rem = r;
            for (d, s) in rest_dims.iter().zip(rest_strides.iter()).rev() {
                idx += (rem % d) * s;
                rem /= d;
            }
            idx
        };

        let mut out = CMat::zeros((dk, dk));
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = Complex64::new(0.0, 0.0);
                for r in 0..rest {
                    acc += self.mat[[compose(a, r), compose(b, r)]];
                }
                out[[a, b]] = acc;
            }
        }
        Ok(DensityMatrix {
            mat: out,
            dims: vec![dk],
        })
    }

    /// Partial transpose on one factor of a bipartite state. The result is
    /// Hermitian but not necessarily PSD, so it is returned as a raw matrix.
    pub fn partial_transpose(&self, subsystem: usize) -> Result<CMat> {
        if self.dims.len() != 2 {
            return Err(Error::DimMismatch(
                "partial transpose is defined for exactly two subsystems".into(),
            ));
        }
        if subsystem >= 2 {
            return Err(Error::BadSubsystem {
                index: subsystem,
                count: 2,
            });
        }
        let (da, db) = (self.dims[0], self.dims[1]);
        let mut out = CMat::zeros((da * db, da * db));
        for i1 in 0..da {
            for j1 in 0..da {
                for i2 in 0..db {
                    for j2 in 0..db {
                        let (r, c) = if subsystem == 0 {
                            (j1 * db + i2, i1 * db + j2)
                        } else {
                            (i1 * db + j2, j1 * db + i2)
                        };
                        out[[r, c]] = self.mat[[i1 * db + i2, j1 * db + j2]];
                    }
                }
            }
        }
        Ok(out)
    }
}
