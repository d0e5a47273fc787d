//! Small dense helpers on top of nalgebra. Every matrix here is at most a
//! few dozen rows, so nothing is tuned for size.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::symplectic::SymplecticForm;

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn check_symmetric(m: &DMatrix<f64>, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let asymmetry = max_asymmetry(m);
    if asymmetry > tol * max_abs(m).max(1.0) {
        return Err(Error::NonSymmetric { asymmetry });
    }
    Ok(())
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_sym_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Splits a symmetric matrix into its positive and negative parts,
/// `m = plus - minus` with both parts positive semidefinite.
pub fn psd_split(m: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let n = m.nrows();
    let mut plus = DMatrix::zeros(n, n);
    let mut minus = DMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        let outer = v * v.transpose();
        if lambda > 0.0 {
            plus += outer * lambda;
        } else if lambda < 0.0 {
            minus -= outer * lambda;
        }
    }
    (plus, minus)
}

/// Smallest eigenvalue of the Hermitian matrix `cm + iJ`.
///
/// Uses the real embedding `[[A, -B], [B, A]]` of `A + iB`, whose spectrum
/// is that of `A + iB` with every eigenvalue doubled.
pub fn min_eig_cm_plus_ij(cm: &DMatrix<f64>) -> f64 {
    let dim = cm.nrows();
    let j = SymplecticForm::new(dim / 2).matrix();
    let mut real = DMatrix::zeros(2 * dim, 2 * dim);
    real.view_mut((0, 0), (dim, dim)).copy_from(cm);
    real.view_mut((dim, dim), (dim, dim)).copy_from(cm);
    real.view_mut((0, dim), (dim, dim)).copy_from(&(-&j));
    real.view_mut((dim, 0), (dim, dim)).copy_from(&j);
    min_sym_eigenvalue(&real)
}

/// Symplectic eigenvalues of a covariance matrix, in descending order.
///
/// These are the moduli of the eigenvalues of `iJ cm`, one per mode. For a
/// positive definite matrix they are computed from the symmetric matrix
/// `L^T J^T cm J L` (with `cm = L L^T`), whose eigenvalues are the squared
/// symplectic eigenvalues, each appearing twice. Indefinite input falls back
/// to a general eigen solve of `J cm`.
pub fn symplectic_eigenvalues(cm: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = cm.nrows();
    if !dim.is_multiple_of(2) {
        return Err(Error::ShapeMismatch(format!("odd dimension {dim}")));
    }
    check_symmetric(cm, 1e-10)?;
    let cm = symmetrize(cm);
    let j = SymplecticForm::new(dim / 2).matrix();

    let mut values: Vec<f64> = match cm.clone().cholesky() {
        Some(chol) => {
            let l = chol.l();
            let m = l.transpose() * j.transpose() * &cm * &j * &l;
            sym_eigenvalues(&m)
                .into_iter()
                .map(|v| v.max(0.0).sqrt())
                .collect()
        }
        None => {
            let jc = &j * &cm;
            jc.complex_eigenvalues()
                .iter()
                .map(|z| z.im.abs().max(z.re.abs()))
                .collect()
        }
    };
    values.sort_by(|a, b| b.total_cmp(a));
    // values come in equal pairs
    Ok(values
        .chunks(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect())
}

pub fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

pub fn select_vec(v: &DVector<f64>, idx: &[usize]) -> DVector<f64> {
    DVector::from_iterator(idx.len(), idx.iter().map(|&i| v[i]))
}

/// Coordinate indices `(x_m, p_m)` of the given modes, in order.
pub fn coordinate_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

pub fn block_diagonal(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let dim: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = DMatrix::zeros(dim, dim);
    let mut offset = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((offset, offset), (k, k)).copy_from(b);
        offset += k;
    }
    out
}
