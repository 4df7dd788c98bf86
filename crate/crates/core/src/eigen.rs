//! Dense symmetric eigenvalues by cyclic Jacobi rotations.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 512;
const SYMMETRY_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Row-major symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = v;
        }
        m
    }

    /// Builds the matrix with entries `f(i, j)` for `i <= j`, mirrored.
    pub fn from_fn<F: Fn(usize, usize) -> f64>(dim: usize, f: F) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                m.entries[i * dim + j] = v;
                m.entries[j * dim + i] = v;
            }
        }
        m
    }

    /// Validates symmetry of a row-major list of rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Dimension("matrix is not square".into()));
        }
        let scale = rows.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs())).max(1.0);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate().take(i) {
                if (x - rows[j][i]).abs() > SYMMETRY_TOL * scale {
                    return Err(Error::InvalidParameter(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    fn frobenius(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].powi(2);
            }
        }
    }
    s.sqrt()
}

/// Eigenvalues in descending order.
pub fn symmetric_eigenvalues(m: &SymmetricMatrix) -> Result<Vec<f64>> {
    let n = m.dim;
    if n > MAX_DIM {
        return Err(Error::SizeLimit {
            what: "matrix dimension",
            value: n,
            limit: MAX_DIM,
        });
    }
    let mut a = m.entries.clone();
    let target = 1e-12 * m.frobenius();
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a, n) <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trivial_spectra() {
        assert_eq!(
            symmetric_eigenvalues(&SymmetricMatrix::identity(4)).unwrap(),
            vec![1.0; 4]
        );
        let d = symmetric_eigenvalues(&SymmetricMatrix::diagonal(&[0.3, 0.7])).unwrap();
        assert_eq!(d, vec![0.7, 0.3]);
        let p = SymmetricMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let e = symmetric_eigenvalues(&p).unwrap();
        assert_abs_diff_eq!(e[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn two_by_two_closed_form() {
        let m = SymmetricMatrix::from_rows(&[vec![0.9, 0.24], vec![0.24, 0.1]]).unwrap();
        let e = symmetric_eigenvalues(&m).unwrap();
        let r = (0.16f64 + 0.0576).sqrt();
        assert_abs_diff_eq!(e[0], 0.5 + r, epsilon = 1e-14);
        assert_abs_diff_eq!(e[1], 0.5 - r, epsilon = 1e-14);
    }

    #[test]
    fn rejects_asymmetric_and_oversized() {
        assert!(SymmetricMatrix::from_rows(&[vec![1.0, 0.2], vec![0.3, 1.0]]).is_err());
        assert!(SymmetricMatrix::from_rows(&[vec![1.0, 0.2]]).is_err());
        assert!(symmetric_eigenvalues(&SymmetricMatrix::zeros(513)).is_err());
    }

    #[test]
    fn agrees_with_nalgebra() {
        let dim = 24;
        let m = SymmetricMatrix::from_fn(dim, |i, j| ((i * 7 + j * 3) % 11) as f64 / 11.0 - 0.4);
        let mut ours = symmetric_eigenvalues(&m).unwrap();
        let dm = nalgebra::DMatrix::from_fn(dim, dim, |i, j| m.get(i, j));
        let mut theirs: Vec<f64> = dm.symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        ours.sort_by(|x, y| y.total_cmp(x));
        for (a, b) in ours.iter().zip(&theirs) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
        assert_abs_diff_eq!(ours.iter().sum::<f64>(), m.trace(), epsilon = 1e-10);
    }
}
