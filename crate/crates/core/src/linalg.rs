//! Small dense complex matrices for arbitrary-unitary strategies.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::{c, Real};

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(c(T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

pub fn norm_sqr<T: Real>(a: &[Complex<T>]) -> T {
    a.iter().fold(T::zero(), |acc, x| acc + x.norm_sqr())
}

/// `‖a − b‖²`
pub fn distance_sqr<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + (x - y).norm_sqr())
}

/// Normalised vector with independent standard complex Gaussian entries.
pub fn random_state<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex<T>>
where
    StandardNormal: Distribution<T>,
{
    let mut v: Vec<Complex<T>> = (0..dim)
        .map(|_| Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let norm = norm_sqr(&v).sqrt();
    for x in v.iter_mut() {
        *x = *x / norm;
    }
    v
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![c(T::zero()); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { c(T::one()) } else { c(T::zero()) })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        CMatrix { dim, data }
    }

    /// Builds from row-major entries; `data.len()` must be a perfect square.
    pub fn from_rows(data: Vec<Complex<T>>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim * dim != data.len() {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: data.len() });
        }
        Ok(CMatrix { dim, data })
    }

    /// `1 − 2|v⟩⟨v|` for a normalised `v`.
    pub fn reflection_about(v: &[Complex<T>]) -> Self {
        let two = T::lit(2.0);
        Self::from_fn(v.len(), |i, j| {
            let id = if i == j { c(T::one()) } else { c(T::zero()) };
            id - v[i] * v[j].conj() * two
        })
    }

    /// Haar-random unitary: Gram–Schmidt on the columns of a complex Gaussian matrix.
    pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Self
    where
        StandardNormal: Distribution<T>,
    {
        let mut cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(dim);
        while cols.len() < dim {
            let mut v: Vec<Complex<T>> = (0..dim)
                .map(|_| Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
                .collect();
            // two passes of modified Gram–Schmidt for numerical orthogonality
            for _ in 0..2 {
                for q in &cols {
                    let proj = inner(q, &v);
                    for (x, y) in v.iter_mut().zip(q) {
                        *x = *x - proj * y;
                    }
                }
            }
            let norm = norm_sqr(&v).sqrt();
            if norm < T::lit(1e-6) {
                continue;
            }
            for x in v.iter_mut() {
                *x = *x / norm;
            }
            cols.push(v);
        }
        Self::from_fn(dim, |i, j| cols[j][i])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex<T>) {
        self.data[i * self.dim + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn matvec(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok((0..self.dim)
            .map(|i| self.row(i).iter().zip(v).fold(c(T::zero()), |acc, (a, b)| acc + a * b))
            .collect())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] = out.data[i * n + j] + a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    /// `max |(U†U − 1)_{ij}|`
    pub fn unitarity_deviation(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let mut acc = c(T::zero());
                for k in 0..n {
                    acc = acc + self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    acc = acc - c(T::one());
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn check_unitary(&self, tol: T) -> Result<()> {
        let dev = self.unitarity_deviation();
        if dev > tol {
            return Err(Error::NotUnitary(dev.as_f64()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [1, 2, 5, 16] {
            let u = CMatrix::<f64>::random_unitary(&mut rng, dim);
            assert!(u.unitarity_deviation() < 1e-12, "dim {dim}");
        }
    }

    #[test]
    fn reflection_squares_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_state::<f64, _>(&mut rng, 6);
        let r = CMatrix::reflection_about(&v);
        let rr = r.matmul(&r).unwrap();
        let id = CMatrix::identity(6);
        for i in 0..6 {
            for j in 0..6 {
                assert!((rr.get(i, j) - id.get(i, j)).norm() < 1e-14);
            }
        }
        let rv = r.matvec(&v).unwrap();
        assert!(distance_sqr(&rv, &v.iter().map(|x| -x).collect::<Vec<_>>()) < 1e-28);
    }

    #[test]
    fn non_unitary_is_detected() {
        let mut m = CMatrix::<f64>::identity(3);
        m.set(0, 1, c(0.1));
        assert!(matches!(m.check_unitary(1e-10), Err(Error::NotUnitary(_))));
        assert!(m.matvec(&[c(1.0)]).is_err());
    }
}
