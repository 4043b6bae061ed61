//! Small dense linear-algebra kernel: symmetric positive definite matrices,
//! Cholesky factors with rank-one updates, and Sherman–Morrison inverse updates.

use crate::error::{Error, Result};

/// Pivots at or below this value abort a factorization.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// A dense symmetric positive definite matrix stored row-major.
///
/// Symmetry is checked on construction. Positive definiteness is witnessed by
/// [`cholesky`] succeeding.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SpdMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix must have dim >= 1".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_row_major(dim, data)
    }

    pub fn from_row_major(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix must have dim >= 1".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        let scale = data.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for i in 0..dim {
            for j in (i + 1)..dim {
                let (a, b) = (data[i * dim + j], data[j * dim + i]);
                if !(a - b).abs().le(&(SYMMETRY_TOLERANCE * scale)) {
                    return Err(Error::InvalidParameter(format!(
                        "matrix not symmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Self { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    /// `out = self · x`.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, row) in out.iter_mut().zip(self.data.chunks_exact(self.dim)) {
            *o = dot(row, x);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        let mut out = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut out);
        Ok(out)
    }

    /// `self += c cᵀ`.
    pub fn add_outer(&mut self, c: &[f64]) -> Result<()> {
        check_dim(self.dim, c.len())?;
        for (i, &ci) in c.iter().enumerate() {
            if ci == 0.0 {
                continue;
            }
            let row = &mut self.data[i * self.dim..(i + 1) * self.dim];
            for (r, &cj) in row.iter_mut().zip(c) {
                *r += ci * cj;
            }
        }
        Ok(())
    }

    /// Dense product `self · other`, used by tests and invariant checks.
    pub fn mul_mat(&self, other: &SpdMatrix) -> Result<Vec<f64>> {
        check_dim(self.dim, other.dim)?;
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == 0.0 {
                    continue;
                }
                let src = &other.data[k * d..(k + 1) * d];
                for (o, &b) in out[i * d..(i + 1) * d].iter_mut().zip(src) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &SpdMatrix) -> f64 {
        max_abs_diff(&self.data, &other.data)
    }
}

/// Lower-triangular factor `L` with `L Lᵀ = A`, stored column-major so that
/// column sweeps (factorization, rank-one updates, triangular solves) run over
/// contiguous memory.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    data: Vec<f64>,
}

impl CholeskyFactor {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry `L[i][j]` (zero above the diagonal).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.data[j * self.dim + i]
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j)).collect())
            .collect()
    }

    fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.dim..(j + 1) * self.dim]
    }

    /// `out = L z`.
    pub fn mul_vec_into(&self, z: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &zj) in z.iter().enumerate() {
            let col = self.col(j);
            for i in j..self.dim {
                out[i] += col[i] * zj;
            }
        }
    }

    /// Solves `L y = b` in place.
    pub fn solve_lower_in_place(&self, b: &mut [f64]) {
        for j in 0..self.dim {
            let col = self.col(j);
            let yj = b[j] / col[j];
            b[j] = yj;
            if yj != 0.0 {
                for i in (j + 1)..self.dim {
                    b[i] -= col[i] * yj;
                }
            }
        }
    }

    /// Solves `Lᵀ x = b` in place.
    pub fn solve_upper_in_place(&self, b: &mut [f64]) {
        for i in (0..self.dim).rev() {
            let col = self.col(i);
            let s = dot(&col[i + 1..], &b[i + 1..]);
            b[i] = (b[i] - s) / col[i];
        }
    }

    /// Replaces the factor of `A` by the factor of `A + x xᵀ` in O(d²).
    /// `x` is used as scratch space.
    pub fn rank_one_update(&mut self, x: &mut [f64]) -> Result<()> {
        check_dim(self.dim, x.len())?;
        let d = self.dim;
        for k in 0..d {
            if x[k] == 0.0 {
                continue;
            }
            let col = &mut self.data[k * d..(k + 1) * d];
            let lkk = col[k];
            let r = lkk.hypot(x[k]);
            let c = r / lkk;
            let s = x[k] / lkk;
            col[k] = r;
            for i in (k + 1)..d {
                let l = (col[i] + s * x[i]) / c;
                x[i] = c * x[i] - s * l;
                col[i] = l;
            }
        }
        Ok(())
    }

    /// `L Lᵀ`.
    pub fn reconstruct(&self) -> SpdMatrix {
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let mut s = 0.0;
                for k in 0..=j {
                    s += self.get(i, k) * self.get(j, k);
                }
                data[i * d + j] = s;
                data[j * d + i] = s;
            }
        }
        SpdMatrix { dim: d, data }
    }

    /// `(L Lᵀ)⁻¹ = Mᵀ M` with `M = L⁻¹`, about d³/3 multiply-adds.
    pub fn inverse(&self) -> SpdMatrix {
        let d = self.dim;
        // M row-major, lower triangular: row i of M = (e_i − Σ_{k<i} L[i][k] row_k(M)) / L[i][i].
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            let (done, rest) = m.split_at_mut(i * d);
            let row = &mut rest[..d];
            for k in 0..i {
                let lik = self.data[k * d + i];
                if lik == 0.0 {
                    continue;
                }
                let mk = &done[k * d..k * d + k + 1];
                for (r, &x) in row[..=k].iter_mut().zip(mk) {
                    *r -= lik * x;
                }
            }
            row[i] += 1.0;
            let inv = 1.0 / self.data[i * d + i];
            row[..=i].iter_mut().for_each(|r| *r *= inv);
        }
        // Lower triangle of Mᵀ M as a sum of outer products of M's rows.
        let mut data = vec![0.0; d * d];
        for k in 0..d {
            let mk = &m[k * d..k * d + k + 1];
            for i in 0..=k {
                let mki = mk[i];
                if mki == 0.0 {
                    continue;
                }
                let out = &mut data[i * d..i * d + i + 1];
                for (o, &x) in out.iter_mut().zip(&mk[..=i]) {
                    *o += mki * x;
                }
            }
        }
        for i in 0..d {
            for j in 0..i {
                data[j * d + i] = data[i * d + j];
            }
        }
        SpdMatrix { dim: d, data }
    }
}

/// Cholesky factorization `A = L Lᵀ`.
pub fn cholesky(a: &SpdMatrix) -> Result<CholeskyFactor> {
    let d = a.dim;
    // Lower triangle of A, column-major: column j holds A[j..d][j].
    let mut data = vec![0.0; d * d];
    for j in 0..d {
        for i in j..d {
            data[j * d + i] = a.data[i * d + j];
        }
    }
    for k in 0..d {
        let pivot = data[k * d + k];
        if !(pivot > PIVOT_TOLERANCE) {
            return Err(Error::NotPositiveDefinite { index: k, pivot });
        }
        let lkk = pivot.sqrt();
        data[k * d + k] = lkk;
        for i in (k + 1)..d {
            data[k * d + i] /= lkk;
        }
        let (head, tail) = data.split_at_mut((k + 1) * d);
        let colk = &head[k * d..];
        for j in (k + 1)..d {
            let ljk = colk[j];
            if ljk == 0.0 {
                continue;
            }
            let colj = &mut tail[(j - k - 1) * d..(j - k) * d];
            for i in j..d {
                colj[i] -= colk[i] * ljk;
            }
        }
    }
    Ok(CholeskyFactor { dim: d, data })
}

/// Returns `(B + c cᵀ)⁻¹` given `B⁻¹`.
pub fn sherman_morrison_update(b_inv: &SpdMatrix, c: &[f64]) -> Result<SpdMatrix> {
    let mut out = b_inv.clone();
    let mut scratch = vec![0.0; c.len()];
    sherman_morrison_in_place(&mut out, c, &mut scratch)?;
    Ok(out)
}

/// In-place form of [`sherman_morrison_update`]; `scratch` must have length `d`.
/// Leaves `B⁻¹c` (before the update) in `scratch` and returns `1 + cᵀB⁻¹c`.
pub fn sherman_morrison_in_place(b_inv: &mut SpdMatrix, c: &[f64], scratch: &mut [f64]) -> Result<f64> {
    check_dim(b_inv.dim, c.len())?;
    check_dim(b_inv.dim, scratch.len())?;
    let d = b_inv.dim;
    // B⁻¹ is symmetric, so B⁻¹c is a combination of the rows picked by nonzero c_j.
    scratch.iter_mut().for_each(|s| *s = 0.0);
    for (j, &cj) in c.iter().enumerate() {
        if cj == 0.0 {
            continue;
        }
        for (s, &bij) in scratch.iter_mut().zip(b_inv.row(j)) {
            *s += cj * bij;
        }
    }
    let denom = 1.0 + dot(c, scratch);
    if denom == 1.0 {
        return Ok(denom);
    }
    for i in 0..d {
        let ui = scratch[i] / denom;
        if ui == 0.0 {
            continue;
        }
        let row = &mut b_inv.data[i * d..(i + 1) * d];
        for (r, &uj) in row.iter_mut().zip(scratch.iter()) {
            *r -= ui * uj;
        }
    }
    Ok(denom)
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators let the compiler vectorize without reassociation.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for i in 4 * chunks..a.len() {
        s += a[i] * b[i];
    }
    s
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    fn naive_inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
        // Gauss–Jordan with partial pivoting; independent of the Cholesky path.
        let n = a.len();
        let mut m: Vec<Vec<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                r
            })
            .collect();
        for col in 0..n {
            let p = (col..n)
                .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
                .unwrap();
            m.swap(col, p);
            let piv = m[col][col];
            for v in m[col].iter_mut() {
                *v /= piv;
            }
            for r in 0..n {
                if r != col {
                    let f = m[r][col];
                    if f != 0.0 {
                        for c in 0..2 * n {
                            m[r][c] -= f * m[col][c];
                        }
                    }
                }
            }
        }
        m.into_iter().map(|r| r[n..].to_vec()).collect()
    }

    #[test]
    fn cholesky_identity() {
        let l = cholesky(&SpdMatrix::identity(3)).unwrap();
        assert_eq!(l, CholeskyFactor::identity(3));
    }

    #[test]
    fn cholesky_two_by_two() {
        let a = SpdMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let l = cholesky(&a).unwrap();
        let expected = [[2.0, 0.0], [1.0, 2f64.sqrt()]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((l.get(i, j) - expected[i][j]).abs() < 1e-15);
            }
        }
        // L Lᵀ by hand.
        let r = l.reconstruct();
        assert!(r.max_abs_diff(&a) < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = SpdMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(cholesky(&a), Err(Error::NotPositiveDefinite { index: 1, .. })));
    }

    #[test]
    fn cholesky_rejects_nan() {
        let a = SpdMatrix::from_rows(&[vec![f64::NAN]]);
        // NaN fails the symmetry scale check or the pivot check; never a factor.
        if let Ok(a) = a {
            assert!(cholesky(&a).is_err());
        }
    }

    #[test]
    fn asymmetric_rejected() {
        assert!(SpdMatrix::from_rows(&[vec![1.0, 0.5], vec![0.4, 1.0]]).is_err());
    }

    #[test]
    fn sherman_morrison_examples() {
        let out = sherman_morrison_update(&SpdMatrix::identity(2), &[1.0, 0.0]).unwrap();
        assert_eq!(out.to_rows(), vec![vec![0.5, 0.0], vec![0.0, 1.0]]);
        let same = sherman_morrison_update(&SpdMatrix::identity(2), &[0.0, 0.0]).unwrap();
        assert_eq!(same, SpdMatrix::identity(2));
        assert!(matches!(
            sherman_morrison_update(&SpdMatrix::identity(2), &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sherman_morrison_matches_direct_inversion() {
        let d = 20;
        let mut rng = RngStream::new(11);
        let mut b = SpdMatrix::identity(d);
        let mut b_inv = SpdMatrix::identity(d);
        let mut scratch = vec![0.0; d];
        for _ in 0..1000 {
            let c: Vec<f64> = (0..d).map(|_| rng.uniform()).collect();
            b.add_outer(&c).unwrap();
            sherman_morrison_in_place(&mut b_inv, &c, &mut scratch).unwrap();
        }
        let direct = naive_inverse(&b.to_rows());
        let err = max_abs_diff(b_inv.as_slice(), &direct.concat());
        assert!(err < 1e-8, "max abs error {err}");
    }

    #[test]
    fn rank_one_update_matches_refactorization() {
        let d = 12;
        let mut rng = RngStream::new(5);
        let mut b = SpdMatrix::identity(d);
        let mut l = CholeskyFactor::identity(d);
        for _ in 0..300 {
            let c: Vec<f64> = (0..d).map(|_| rng.uniform() - 0.3).collect();
            b.add_outer(&c).unwrap();
            let mut x = c.clone();
            l.rank_one_update(&mut x).unwrap();
        }
        let fresh = cholesky(&b).unwrap();
        assert!(max_abs_diff(&l.data, &fresh.data) < 1e-9);
        assert!(l.reconstruct().max_abs_diff(&b) < 1e-8);
    }

    #[test]
    fn inverse_from_factor() {
        let a = SpdMatrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 0.2],
            vec![0.5, 0.2, 2.0],
        ])
        .unwrap();
        let inv = cholesky(&a).unwrap().inverse();
        let direct = naive_inverse(&a.to_rows());
        assert!(max_abs_diff(inv.as_slice(), &direct.concat()) < 1e-12);
    }

    #[test]
    fn triangular_solves() {
        let a = SpdMatrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let l = cholesky(&a).unwrap();
        let mut y = vec![2.0, 1.0 + 2f64.sqrt()];
        l.solve_lower_in_place(&mut y);
        assert!((y[0] - 1.0).abs() < 1e-15 && (y[1] - 1.0).abs() < 1e-15);
        let mut x = vec![3.0, 2f64.sqrt()];
        l.solve_upper_in_place(&mut x);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }
}
