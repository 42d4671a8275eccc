//! Finite-dimensional non-commutative probability spaces: complex matrix
//! algebras with a vector state or the normalized trace.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{guard, Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Largest matrix size produced by [`random_matrix`].
pub const MAX_RANDOM_DIM: usize = 16;

/// A state on the `dim × dim` complex matrices.
#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraState {
    /// `m ↦ ⟨ξ, m ξ⟩` for a unit vector `ξ`.
    Vector(CVector),
    /// `m ↦ trace(m) / dim`.
    NormalizedTrace(usize),
}

impl AlgebraState {
    /// The vector state of the first basis vector.
    pub fn first_basis(dim: usize) -> AlgebraState {
        let mut xi = CVector::zeros(dim);
        xi[0] = C64::new(1.0, 0.0);
        AlgebraState::Vector(xi)
    }

    /// A vector state; the vector must have norm 1 within `1e-12`.
    pub fn vector(xi: CVector) -> Result<AlgebraState> {
        if (xi.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Parse(format!("state vector has norm {}", xi.norm())));
        }
        Ok(AlgebraState::Vector(xi))
    }

    pub fn dim(&self) -> usize {
        match self {
            AlgebraState::Vector(xi) => xi.len(),
            AlgebraState::NormalizedTrace(d) => *d,
        }
    }

    pub fn apply(&self, m: &CMatrix) -> Result<C64> {
        let d = self.dim();
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimMismatch {
                expected: d,
                got: m.nrows(),
            });
        }
        Ok(match self {
            AlgebraState::Vector(xi) => xi.dotc(&(m * xi)),
            AlgebraState::NormalizedTrace(d) => m.trace() / *d as f64,
        })
    }

    /// State of the ordered product `m_0 m_1 ⋯`; the empty word gives 1.
    pub fn word_moment(&self, word: &[&CMatrix]) -> Result<C64> {
        let d = self.dim();
        let mut prod = CMatrix::identity(d, d);
        for m in word {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    got: m.nrows(),
                });
            }
            prod *= *m;
        }
        self.apply(&prod)
    }
}

/// A matrix living in the algebra of one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    pub vertex: usize,
    pub matrix: CMatrix,
}

impl AlgebraElement {
    pub fn random(vertex: usize, dim: usize, seed: u64, hermitian: bool) -> Result<AlgebraElement> {
        Ok(AlgebraElement {
            vertex,
            matrix: random_matrix(dim, seed, hermitian)?,
        })
    }
}

/// Reproducible random matrix with real and imaginary parts in
/// `[-1/√2, 1/√2]`, so every entry has modulus at most 1.
pub fn random_matrix(dim: usize, seed: u64, hermitian: bool) -> Result<CMatrix> {
    guard("matrix dimension", dim, MAX_RANDOM_DIM)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let m = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-r..=r), rng.random_range(-r..=r))
    });
    Ok(if hermitian {
        (&m + m.adjoint()).map(|z| z * 0.5)
    } else {
        m
    })
}

/// Reproducible random unit vector.
pub fn random_unit_vector(dim: usize, seed: u64) -> CVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let v = CVector::from_fn(dim, |_, _| {
            C64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
        });
        let n = v.norm();
        if n > 1e-3 {
            return v / C64::new(n, 0.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_examples() {
        let s = AlgebraState::first_basis(3);
        assert_eq!(s.apply(&CMatrix::identity(3, 3)).unwrap(), C64::new(1.0, 0.0));
        let xi = random_unit_vector(3, 5);
        let proj = &xi * xi.adjoint();
        let v = AlgebraState::vector(xi).unwrap();
        assert!((v.apply(&proj).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-12);
        let t = AlgebraState::NormalizedTrace(2);
        let d = CMatrix::from_diagonal(&CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]));
        assert_eq!(t.apply(&d).unwrap(), C64::new(0.5, 0.0));
        assert!(matches!(
            t.apply(&CMatrix::identity(3, 3)),
            Err(Error::DimMismatch { .. })
        ));
        assert!(AlgebraState::vector(CVector::from_element(2, C64::new(1.0, 0.0))).is_err());
    }

    #[test]
    fn word_examples() {
        let t = AlgebraState::NormalizedTrace(3);
        assert_eq!(t.word_moment(&[]).unwrap(), C64::new(1.0, 0.0));
        let a = random_matrix(3, 1, false).unwrap();
        assert_eq!(t.word_moment(&[&a]).unwrap(), t.apply(&a).unwrap());
        let d1 = CMatrix::from_diagonal(&CVector::from_fn(3, |i, _| C64::new(i as f64, 1.0)));
        let d2 = CMatrix::from_diagonal(&CVector::from_fn(3, |i, _| C64::new(1.0, i as f64)));
        let x = t.word_moment(&[&d1, &d2]).unwrap();
        let y = t.word_moment(&[&d2, &d1]).unwrap();
        assert!((x - y).norm() < 1e-14);
    }

    #[test]
    fn random_examples() {
        let a = random_matrix(4, 9, false).unwrap();
        assert_eq!(a, random_matrix(4, 9, false).unwrap());
        assert_ne!(a, random_matrix(4, 10, false).unwrap());
        assert!(a.iter().all(|z| z.norm() <= 1.0));
        let h = random_matrix(4, 9, true).unwrap();
        assert_eq!(h, h.adjoint());
        assert!(matches!(random_matrix(17, 0, false), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn positivity() {
        let s = AlgebraState::vector(random_unit_vector(3, 2)).unwrap();
        for seed in 0..20 {
            let m = random_matrix(3, seed, false).unwrap();
            let v = s.apply(&(m.adjoint() * &m)).unwrap();
            assert!(v.re >= -1e-12 && v.im.abs() < 1e-12);
        }
    }
}
