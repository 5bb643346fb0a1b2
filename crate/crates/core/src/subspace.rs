//! Subspaces held as orthonormal frames.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{complex_rows, OperatorMatrix, SpaceDesc};
use crate::linalg::{hcat, identity, norm2, orth, orth_complement, Mat, Vector};

pub const DEFAULT_TOL: f64 = 1e-10;
/// Threshold for calling two subspaces equal.
pub const EQUAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Subspace {
    pub frame: Mat,
    pub ambient_dim: usize,
    pub tol: f64,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace { frame: Mat::zeros(ambient_dim, 0), ambient_dim, tol: DEFAULT_TOL }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Subspace { frame: identity(ambient_dim), ambient_dim, tol: DEFAULT_TOL }
    }

    /// Orthonormal span of the columns of `m`.
    pub fn span(m: &Mat, tol: f64) -> Self {
        Subspace { frame: orth(m, tol), ambient_dim: m.nrows(), tol }
    }

    /// Trusts that `frame` is already orthonormal.
    pub fn from_frame(frame: Mat) -> Self {
        let ambient_dim = frame.nrows();
        Subspace { frame, ambient_dim, tol: DEFAULT_TOL }
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn projector(&self) -> Mat {
        &self.frame * self.frame.adjoint()
    }

    pub fn contains(&self, v: &Vector, tol: f64) -> bool {
        let r = v - &self.frame * (self.frame.adjoint() * v);
        r.norm() <= tol * v.norm().max(1.0)
    }

    /// Orthogonal complement in the ambient space.
    pub fn complement(&self) -> Subspace {
        Subspace { frame: orth_complement(&self.frame, self.tol), ambient_dim: self.ambient_dim, tol: self.tol }
    }
}

impl Serialize for Subspace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Subspace", 3)?;
        st.serialize_field("ambient_dim", &self.ambient_dim)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("frame", &complex_rows(&self.frame))?;
        st.end()
    }
}

pub fn orthonormalize(vectors: &[Vector], ambient_dim: usize, tol: f64) -> Subspace {
    if vectors.is_empty() {
        return Subspace::zero(ambient_dim);
    }
    let m = Mat::from_columns(vectors);
    Subspace::span(&m, tol)
}

fn check_ambient(a: &Subspace, b: &Subspace) -> Result<()> {
    if a.ambient_dim != b.ambient_dim {
        return Err(Error::DimensionMismatch { expected: a.ambient_dim, found: b.ambient_dim });
    }
    Ok(())
}

/// `A ∩ B^⊥`.
pub fn complement_within(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    check_ambient(a, b)?;
    if a.dim() == 0 || b.dim() == 0 {
        return Ok(a.clone());
    }
    // coordinates in A of the projection of B
    let coords = a.frame.adjoint() * &b.frame;
    let q = orth(&coords, a.tol);
    let rest = orth_complement(&q, a.tol);
    Ok(Subspace { frame: &a.frame * rest, ambient_dim: a.ambient_dim, tol: a.tol })
}

pub fn image(t: &Mat, a: &Subspace) -> Result<Subspace> {
    if t.ncols() != a.ambient_dim {
        return Err(Error::DimensionMismatch { expected: t.ncols(), found: a.ambient_dim });
    }
    Ok(Subspace::span(&(t * &a.frame), a.tol))
}

pub fn image_op(t: &OperatorMatrix, a: &Subspace) -> Result<Subspace> {
    image(&t.entries, a)
}

pub fn sum(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    check_ambient(a, b)?;
    Ok(Subspace::span(&hcat(&a.frame, &b.frame), a.tol))
}

pub fn sum_all(parts: &[Subspace], ambient_dim: usize, tol: f64) -> Subspace {
    let mut m = Mat::zeros(ambient_dim, 0);
    for p in parts {
        m = hcat(&m, &p.frame);
    }
    Subspace::span(&m, tol)
}

/// `A ∩ B`, computed as `A ⊖ B^⊥`.
pub fn intersect(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    check_ambient(a, b)?;
    complement_within(a, &b.complement())
}

/// `‖P_A − P_B‖`.
pub fn distance(a: &Subspace, b: &Subspace) -> Result<f64> {
    check_ambient(a, b)?;
    Ok(norm2(&(a.projector() - b.projector())))
}

pub fn projection(a: &Subspace, space: SpaceDesc) -> OperatorMatrix {
    OperatorMatrix::exact(a.projector(), space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn e(dim: usize, i: usize) -> Vector {
        crate::fock::basis_vector(dim, i)
    }

    fn span_of(vs: &[Vector]) -> Subspace {
        orthonormalize(vs, vs[0].len(), DEFAULT_TOL)
    }

    #[test]
    fn orthonormalize_examples() {
        let v1 = Vector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let v2 = Vector::from_vec(vec![c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(orthonormalize(&[v1, v2], 2, DEFAULT_TOL).dim(), 1);
        assert_eq!(orthonormalize(&[], 4, DEFAULT_TOL).dim(), 0);
    }

    #[test]
    fn complement_examples() {
        let a = span_of(&[e(3, 0), e(3, 1)]);
        assert_eq!(complement_within(&a, &a).unwrap().dim(), 0);
        let z = Subspace::zero(3);
        assert!(distance(&complement_within(&a, &z).unwrap(), &a).unwrap() < 1e-14);
        let r = complement_within(&a, &span_of(&[e(3, 0)])).unwrap();
        assert!(distance(&r, &span_of(&[e(3, 1)])).unwrap() < 1e-14);
    }

    #[test]
    fn image_sum_intersect() {
        let a = span_of(&[e(3, 0), e(3, 1)]);
        assert!(distance(&image(&identity(3), &a).unwrap(), &a).unwrap() < 1e-14);
        assert!(distance(&sum(&a, &Subspace::zero(3)).unwrap(), &a).unwrap() < 1e-14);
        let b = span_of(&[e(3, 1), e(3, 2)]);
        let i = intersect(&a, &b).unwrap();
        assert!(distance(&i, &span_of(&[e(3, 1)])).unwrap() < 1e-14);
    }

    #[test]
    fn intersect_generic_lines_is_zero() {
        let a = span_of(&[Vector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])]);
        let b = span_of(&[Vector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)])]);
        assert_eq!(intersect(&a, &b).unwrap().dim(), 0);
    }

    #[test]
    fn distance_examples() {
        let a = span_of(&[e(2, 0)]);
        let b = span_of(&[e(2, 1)]);
        assert!(distance(&a, &a).unwrap() < 1e-15);
        assert!((distance(&a, &b).unwrap() - 1.0).abs() < 1e-14);
        let eps: f64 = 0.01;
        let t = span_of(&[Vector::from_vec(vec![c(1.0, 0.0), c(eps, 0.0)])]);
        let expected = eps / (1.0 + eps * eps).sqrt();
        assert!((distance(&a, &t).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn ambient_mismatch() {
        assert!(complement_within(&Subspace::full(2), &Subspace::full(3)).is_err());
    }
}
