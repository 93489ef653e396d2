//! Small dense linear algebra over jets and plain f64.
//!
//! Everything here targets matrices of dimension at most 5, which is all the
//! frame and metric computations need. Pivoting decisions are made on the
//! value component of jets, so jet-valued solves follow the same branch as
//! the underlying point evaluation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::math;

pub type JVec = Vec<Jet>;
pub type JMat = Vec<Vec<Jet>>;

pub fn jmat_zero(rows: usize, cols: usize, order: usize) -> JMat {
    vec![vec![Jet::constant(0.0, order); cols]; rows]
}

pub fn jvec_zero(n: usize, order: usize) -> JVec {
    vec![Jet::constant(0.0, order); n]
}

pub fn jvec_vals(v: &[Jet]) -> Vec<f64> {
    v.iter().map(|j| j.val()).collect()
}

pub fn jmat_vals(m: &[Vec<Jet>]) -> Vec<Vec<f64>> {
    m.iter().map(|r| jvec_vals(r)).collect()
}

pub fn jvec_add(a: &[Jet], b: &[Jet]) -> JVec {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

pub fn jvec_sub(a: &[Jet], b: &[Jet]) -> JVec {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

pub fn jvec_scale(a: &[Jet], s: &Jet) -> JVec {
    a.iter().map(|x| x.mul(s)).collect()
}

pub fn jvec_axpy(acc: &mut [Jet], s: &Jet, v: &[Jet]) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a = a.add(&s.mul(x));
    }
}

/// Matrix-vector product.
pub fn jmat_mul_vec(m: &[Vec<Jet>], v: &[Jet]) -> JVec {
    m.iter()
        .map(|row| {
            let mut acc = Jet::constant(0.0, v.first().map(|j| j.order()).unwrap_or(0));
            for (a, x) in row.iter().zip(v) {
                acc = acc.add(&a.mul(x));
            }
            acc
        })
        .collect()
}

/// Solves `A x = b` by LU with partial pivoting on value magnitude.
pub fn lu_solve(a: &[Vec<Jet>], b: &[Jet], what: &str) -> Result<JVec> {
    let n = a.len();
    debug_assert!(a.iter().all(|r| r.len() == n) && b.len() == n);
    let mut m: JMat = a.to_vec();
    let mut rhs: JVec = b.to_vec();
    let scale: f64 = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|j| math::fabs(j.val()))
        .fold(0.0, math::fmax)
        .max(1.0);
    for col in 0..n {
        let mut piv = col;
        let mut best = math::fabs(m[col][col].val());
        for r in (col + 1)..n {
            let cand = math::fabs(m[r][col].val());
            if cand > best {
                best = cand;
                piv = r;
            }
        }
        if best < 1e-13 * scale {
            return Err(Error::SingularSystem {
                what: format!("{what} (pivot {best:e})"),
            });
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        let inv_piv = m[col][col].recip()?;
        for r in (col + 1)..n {
            let factor = m[r][col].mul(&inv_piv);
            for c in col..n {
                let sub = factor.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&sub);
            }
            let sub = factor.mul(&rhs[col]);
            rhs[r] = rhs[r].sub(&sub);
        }
    }
    let order = rhs.iter().map(|j| j.order()).max().unwrap_or(0);
    let mut x = jvec_zero(n, order);
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for col in (row + 1)..n {
            acc = acc.sub(&m[row][col].mul(&x[col]));
        }
        x[row] = acc.div(&m[row][row])?;
    }
    Ok(x)
}

/// Solves `A X = I`, i.e. inverts the matrix.
pub fn invert(a: &[Vec<Jet>], what: &str) -> Result<JMat> {
    let n = a.len();
    let order = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|j| j.order())
        .max()
        .unwrap_or(0);
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = jvec_zero(n, order);
        e[j] = Jet::constant(1.0, order);
        cols.push(lu_solve(a, &e, what)?);
    }
    // Transpose the solution columns into a row-major inverse.
    let mut inv = jmat_zero(n, n, order);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    Ok(inv)
}

/// Determinant via LU on values (used only for thresholds and diagnostics).
pub fn det_vals(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = math::fabs(m[col][col]);
        for r in (col + 1)..n {
            if math::fabs(m[r][col]) > best {
                best = math::fabs(m[r][col]);
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= m[col][col];
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

/// Nullspace basis of an `r x c` system (r < c) by Gauss-Jordan with column
/// pivoting. Free variables are assigned the identity pattern in ascending
/// column order, which makes the basis deterministic.
pub fn nullspace(a: &[Vec<Jet>], expected_dim: usize, what: &str) -> Result<Vec<JVec>> {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    let order = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|j| j.order())
        .max()
        .unwrap_or(0);
    let scale: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|j| math::fabs(j.val()))
        .fold(0.0, math::fmax)
        .max(1.0);

    let mut m: JMat = a.to_vec();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        let mut piv = row;
        let mut best = math::fabs(m[row][col].val());
        for r in (row + 1)..rows {
            let cand = math::fabs(m[r][col].val());
            if cand > best {
                best = cand;
                piv = r;
            }
        }
        if best < 1e-12 * scale {
            continue; // free column
        }
        m.swap(row, piv);
        let inv_piv = m[row][col].recip()?;
        for c in 0..cols {
            m[row][c] = m[row][c].mul(&inv_piv);
        }
        for r in 0..rows {
            if r != row {
                let f = m[r][col];
                for c in 0..cols {
                    let sub = f.mul(&m[row][c]);
                    m[r][c] = m[r][c].sub(&sub);
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }

    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    if free_cols.len() != expected_dim {
        return Err(Error::SingularSystem {
            what: format!(
                "{what}: nullspace dimension {} (expected {expected_dim})",
                free_cols.len()
            ),
        });
    }
    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut v = jvec_zero(cols, order);
        v[fc] = Jet::constant(1.0, order);
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = m[r][fc].neg();
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Eigenvalues and eigenvectors of a small symmetric matrix by cyclic
/// Jacobi rotations. Returns `(eigenvalues, eigenvectors-as-columns)`,
/// sorted ascending. Deterministic for a fixed input.
pub fn sym_eigen(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let scale: f64 = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| math::fabs(*x))
        .fold(0.0, math::fmax)
        .max(1.0);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off = math::fmax(off, math::fabs(m[i][j]));
            }
        }
        if off < 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if math::fabs(m[p][q]) < 1e-18 * scale {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + math::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + math::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    let eigvals: Vec<f64> = idx.iter().map(|&i| m[i][i]).collect();
    let eigvecs: Vec<Vec<f64>> = idx
        .iter()
        .map(|&col| (0..n).map(|r| v[r][col]).collect())
        .collect();
    (eigvals, eigvecs)
}

/// Rank of a symmetric matrix relative to a threshold times its largest
/// absolute eigenvalue.
pub fn sym_rank(a: &[Vec<f64>], rel_tol: f64) -> (usize, Vec<f64>) {
    let (vals, _) = sym_eigen(a);
    let norm = vals.iter().map(|v| math::fabs(*v)).fold(0.0, math::fmax);
    let thresh = rel_tol * norm.max(1e-300);
    let rank = vals.iter().filter(|v| math::fabs(**v) > thresh).count();
    (rank, vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn jm(rows: &[&[f64]]) -> JMat {
        rows.iter()
            .map(|r| r.iter().map(|v| Jet::constant(*v, 0)).collect())
            .collect()
    }

    #[test]
    fn lu_solves_small_system() {
        let a = jm(&[&[2.0, 1.0], &[1.0, 3.0]]);
        let b = vec![Jet::constant(5.0, 0), Jet::constant(10.0, 0)];
        let x = lu_solve(&a, &b, "test").unwrap();
        assert_relative_eq!(x[0].val(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(x[1].val(), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn lu_propagates_jets() {
        // A(t) x(t) = b with A = [[1+t, 0],[0, 1]], b = (1, 1):
        // x0(t) = 1/(1+t): value 1, first derivative -1, second 2.
        let a = vec![
            vec![Jet::variable(1.0, 1.0, 2), Jet::constant(0.0, 2)],
            vec![Jet::constant(0.0, 2), Jet::constant(1.0, 2)],
        ];
        let b = vec![Jet::constant(1.0, 2), Jet::constant(1.0, 2)];
        let x = lu_solve(&a, &b, "test").unwrap();
        assert_relative_eq!(x[0].coeff(0), 1.0, epsilon = 1e-14);
        assert_relative_eq!(x[0].coeff(1), -1.0, epsilon = 1e-14);
        assert_relative_eq!(x[0].coeff(2), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn singular_system_rejected() {
        let a = jm(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let b = vec![Jet::constant(1.0, 0); 2];
        assert!(matches!(
            lu_solve(&a, &b, "test"),
            Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn nullspace_of_rank_two_in_four() {
        // Rows: e0 - e1, e2; kernel = span{e0+e1, e3}.
        let a = jm(&[&[1.0, -1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]]);
        let basis = nullspace(&a, 2, "test").unwrap();
        assert_eq!(basis.len(), 2);
        for v in &basis {
            let prod = jmat_mul_vec(&a, v);
            for p in prod {
                assert_relative_eq!(p.val(), 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn eigen_of_diagonal() {
        let (vals, _) = sym_eigen(&[vec![3.0, 0.0], vec![0.0, -1.0]]);
        assert_relative_eq!(vals[0], -1.0, epsilon = 1e-13);
        assert_relative_eq!(vals[1], 3.0, epsilon = 1e-13);
    }

    #[test]
    fn rank_of_degenerate_gram() {
        let gram = vec![
            vec![-2.0, -1.0, -1.0],
            vec![-1.0, 0.0, -1.0],
            vec![-1.0, -1.0, 0.0],
        ];
        let (rank, _) = sym_rank(&gram, 1e-10);
        assert_eq!(rank, 2);
    }

    #[test]
    fn invert_matches_identity() {
        let a = jm(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]]);
        let inv = invert(&a, "test").unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = 0.0;
                for k in 0..3 {
                    acc += a[i][k].val() * inv[k][j].val();
                }
                assert_relative_eq!(acc, if i == j { 1.0 } else { 0.0 }, epsilon = 1e-13);
            }
        }
    }
}
