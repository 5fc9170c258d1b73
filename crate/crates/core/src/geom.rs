//! Small dense vectors and square matrices over the flat model space 𝔞 ≅ ℝ^ℓ.
//!
//! The catalog never exceeds rank 3, so everything here is tiny and allocation
//! costs are irrelevant; nalgebra is pulled in only where a factorization is
//! genuinely needed (linear solves, symmetric eigendecompositions).

use std::fmt;

/// A point of 𝔞 ≅ ℝ^ℓ in an orthonormal basis; the ambient inner product is the
/// standard dot product.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    pub coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Vector { coords: vec![0.0; dim] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, c: f64) -> Vector {
        Vector::new(self.coords.iter().map(|a| c * a).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        Vector::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        Vector::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// self + c * other
    pub fn axpy(&self, c: f64, other: &Vector) -> Vector {
        Vector::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    pub fn normalized(&self) -> Vector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(1.0 / n)
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|a| a.is_finite())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Row-major n×n real matrix; used for Weyl-group elements and the phase Hessian.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMat {
    pub n: usize,
    pub a: Vec<f64>,
}

impl SquareMat {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 1.0;
        }
        SquareMat { n, a }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut a = Vec::with_capacity(n * n);
        for r in rows {
            assert_eq!(r.len(), n);
            a.extend_from_slice(r);
        }
        SquareMat { n, a }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let n = self.n;
        debug_assert_eq!(v.dim(), n);
        let mut out = vec![0.0; n];
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for j in 0..n {
                s += self.a[i * n + j] * v.coords[j];
            }
            *o = s;
        }
        Vector::new(out)
    }

    /// Apply the transpose (= inverse, for orthogonal elements).
    pub fn apply_transpose(&self, v: &Vector) -> Vector {
        let n = self.n;
        debug_assert_eq!(v.dim(), n);
        let mut out = vec![0.0; n];
        for (j, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for i in 0..n {
                s += self.a[i * n + j] * v.coords[i];
            }
            *o = s;
        }
        Vector::new(out)
    }

    pub fn mul(&self, other: &SquareMat) -> SquareMat {
        let n = self.n;
        debug_assert_eq!(other.n, n);
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[i * n + j] += aik * other.a[k * n + j];
                }
            }
        }
        SquareMat { n, a }
    }

    /// Reflection in the hyperplane orthogonal to `alpha`: I − 2 α αᵀ / ⟨α,α⟩.
    pub fn reflection(alpha: &Vector) -> SquareMat {
        let n = alpha.dim();
        let mut m = SquareMat::identity(n);
        let c = 2.0 / alpha.norm_sq();
        for i in 0..n {
            for j in 0..n {
                let v = m.get(i, j) - c * alpha.coords[i] * alpha.coords[j];
                m.set(i, j, v);
            }
        }
        m
    }

    /// max_ij |(MᵀM − I)_ij| — orthogonality defect.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += self.a[k * n + i] * self.a[k * n + j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// Determinant (n ≤ 3 closed forms; the catalog never needs more).
    pub fn det(&self) -> f64 {
        let a = &self.a;
        match self.n {
            1 => a[0],
            2 => a[0] * a[3] - a[1] * a[2],
            3 => {
                a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                    + a[2] * (a[3] * a[7] - a[4] * a[6])
            }
            n => panic!("det not implemented for n = {n}"),
        }
    }

    /// Deduplication key: entries rounded to 12 decimal digits.
    pub fn rounded_key(&self) -> Vec<i64> {
        self.a
            .iter()
            .map(|x| {
                let r = (x * 1e12).round();
                // normalize -0.0 so that ±0 hash identically
                if r == 0.0 {
                    0
                } else {
                    r as i64
                }
            })
            .collect()
    }

    /// Eigenvalues of a symmetric matrix, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_row_slice(self.n, self.n, &self.a);
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}

/// Solve A x = b for a small square system via LU (errors on singular input).
pub fn solve(a: &SquareMat, b: &Vector) -> Option<Vector> {
    let m = nalgebra::DMatrix::from_row_slice(a.n, a.n, &a.a);
    let rhs = nalgebra::DVector::from_column_slice(&b.coords);
    m.lu().solve(&rhs).map(|x| Vector::new(x.iter().copied().collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reflection_is_orthogonal_and_involutive() {
        let alpha = Vector::new(vec![1.0, 2.0, -0.5]);
        let r = SquareMat::reflection(&alpha);
        assert!(r.orthogonality_defect() < 1e-14);
        let r2 = r.mul(&r);
        let id = SquareMat::identity(3);
        for (x, y) in r2.a.iter().zip(&id.a) {
            assert!((x - y).abs() < 1e-14);
        }
        // reflection negates alpha and fixes the orthogonal complement
        let ra = r.apply(&alpha);
        assert!(ra.add(&alpha).norm() < 1e-13);
    }

    #[test]
    fn solve_small_system() {
        let a = SquareMat::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let b = Vector::new(vec![5.0, 10.0]);
        let x = solve(&a, &b).unwrap();
        assert!((2.0 * x.coords[0] + x.coords[1] - 5.0).abs() < 1e-12);
        assert!((x.coords[0] + 3.0 * x.coords[1] - 10.0).abs() < 1e-12);
    }
}
