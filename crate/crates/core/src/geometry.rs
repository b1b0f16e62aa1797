//! Orthogonal geometries of arbitrary signature.
//!
//! A [`GeometricSpace`] is `ℂⁿ` with the diagonal metric `g ∈ {+1, −1, 0}ⁿ`,
//! stored with the positive block first, then the negative block, then the
//! degenerate block. Hilbert spaces are the all-positive case and Minkowski
//! spaces have a single negative (time) coordinate in the last position.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};

/// Default tolerance for state normalization and isometry checks.
pub const EPS_STATE: f64 = 1e-9;
pub const EPS_ISOMETRY: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
    Zero,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
            Sign::Zero => 0.0,
        }
    }

    pub fn from_int(v: i64) -> Result<Self> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            0 => Ok(Sign::Zero),
            other => Err(Error::Geometry(format!(
                "signature entries must be +1, -1 or 0, got {other}"
            ))),
        }
    }

    fn rank(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
            Sign::Zero => 2,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GeometricSpace {
    signs: Vec<Sign>,
    r: usize,
    s: usize,
}

impl GeometricSpace {
    /// Validates that the signature is pre-sorted (`+`, then `−`, then `0`).
    /// Unsorted input is rejected rather than permuted.
    pub fn new(signs: Vec<Sign>) -> Result<Self> {
        if let Some(i) = signs.windows(2).position(|w| w[0].rank() > w[1].rank()) {
            return Err(Error::Geometry(format!(
                "signature must list +1 entries, then -1, then 0 (violated at position {})",
                i + 2
            )));
        }
        let r = signs.iter().filter(|&&s| s == Sign::Plus).count();
        let s = r + signs.iter().filter(|&&s| s == Sign::Minus).count();
        Ok(Self { signs, r, s })
    }

    pub fn from_ints(signature: &[i64]) -> Result<Self> {
        let signs = signature.iter().map(|&v| Sign::from_int(v)).collect::<Result<_>>()?;
        Self::new(signs)
    }

    /// Positive-definite space of dimension `n`.
    pub fn hilbert(n: usize) -> Self {
        Self {
            signs: vec![Sign::Plus; n],
            r: n,
            s: n,
        }
    }

    /// `n−1` positive coordinates followed by one time coordinate.
    pub fn minkowski(n: usize) -> Self {
        assert!(n >= 1, "Minkowski space needs at least one coordinate");
        let mut signs = vec![Sign::Plus; n - 1];
        signs.push(Sign::Minus);
        Self {
            signs,
            r: n - 1,
            s: n,
        }
    }

    /// `r` positive and `m` negative coordinates.
    pub fn with_signature(r: usize, m: usize) -> Self {
        let mut signs = vec![Sign::Plus; r];
        signs.extend(std::iter::repeat_n(Sign::Minus, m));
        Self { signs, r, s: r + m }
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    /// Number of `+1` entries.
    pub fn positive(&self) -> usize {
        self.r
    }

    /// Number of nonzero entries.
    pub fn nondegenerate(&self) -> usize {
        self.s
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    pub fn g(&self, i: usize) -> f64 {
        self.signs[i].value()
    }

    pub fn metric(&self) -> Vec<f64> {
        self.signs.iter().map(|s| s.value()).collect()
    }

    pub fn signature_ints(&self) -> Vec<i64> {
        self.signs.iter().map(|s| s.value() as i64).collect()
    }

    /// `G = diag(g)`.
    pub fn metric_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&self.metric())
    }

    pub fn is_hilbert(&self) -> bool {
        self.r == self.dim()
    }

    /// Exactly one `−1`, in the last slot, and no degenerate directions.
    pub fn is_minkowski(&self) -> bool {
        self.s == self.dim() && self.s == self.r + 1
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.s == self.dim()
    }

    pub(crate) fn require_nondegenerate(&self) -> Result<()> {
        if self.is_nondegenerate() {
            Ok(())
        } else {
            Err(Error::UnsupportedGeometry(format!(
                "signature {self} has {} zero entries; densities need s = n",
                self.dim() - self.s
            )))
        }
    }

    /// `Σ gᵢ conj(xᵢ) yᵢ` on raw coordinates.
    pub fn inner_coords(&self, x: &[C64], y: &[C64]) -> C64 {
        self.signs
            .iter()
            .zip(x.iter().zip(y))
            .map(|(s, (a, b))| a.conj() * b * s.value())
            .sum()
    }

    /// `Σ gᵢ |xᵢ|²` on raw coordinates.
    pub fn quadric_coords(&self, x: &[C64]) -> f64 {
        self.signs
            .iter()
            .zip(x)
            .map(|(s, a)| s.value() * a.norm_sqr())
            .sum()
    }
}

impl fmt::Display for GeometricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, s) in self.signs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            let c = match s {
                Sign::Plus => "+1",
                Sign::Minus => "-1",
                Sign::Zero => "0",
            };
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for GeometricSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GeometricSpace{self}")
    }
}

/// A coordinate vector bound to its geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    coords: Vec<C64>,
    space: GeometricSpace,
}

impl StateVector {
    pub fn new(coords: Vec<C64>, space: &GeometricSpace) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::Dimension(format!(
                "{} coordinates for a {}-dimensional space",
                coords.len(),
                space.dim()
            )));
        }
        Ok(Self {
            coords,
            space: space.clone(),
        })
    }

    pub fn from_real(coords: &[f64], space: &GeometricSpace) -> Result<Self> {
        Self::new(coords.iter().map(|&v| C64::new(v, 0.0)).collect(), space)
    }

    pub fn zeros(space: &GeometricSpace) -> Self {
        Self {
            coords: vec![ZERO; space.dim()],
            space: space.clone(),
        }
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    pub fn space(&self) -> &GeometricSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The geometric scalar product `(self|other)`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.same_space(other)?;
        Ok(self.space.inner_coords(&self.coords, &other.coords))
    }

    /// `(x|x)`; may be negative outside Hilbert space.
    pub fn quadric_norm(&self) -> f64 {
        self.space.quadric_coords(&self.coords)
    }

    /// `‖x‖₂²`, the Euclidean norm of the coordinates regardless of metric.
    pub fn hilbert_norm_sqr(&self) -> f64 {
        self.coords.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Splits `x = x⁺ + x⁻ + x⁰` by signature class.
    pub fn signed_parts(&self) -> (StateVector, StateVector, StateVector) {
        let pick = |want: Sign| StateVector {
            coords: self
                .coords
                .iter()
                .zip(&self.space.signs)
                .map(|(&z, &s)| if s == want { z } else { ZERO })
                .collect(),
            space: self.space.clone(),
        };
        (pick(Sign::Plus), pick(Sign::Minus), pick(Sign::Zero))
    }

    /// On the characteristic surface `(x|x) = 1`.
    pub fn is_state(&self, tol: f64) -> bool {
        (self.quadric_norm() - 1.0).abs() <= tol
    }

    /// Events sharing the same time tag (last coordinate) in a Minkowski space.
    pub fn same_time_slice(&self, other: &StateVector) -> Result<bool> {
        self.same_space(other)?;
        if !self.space.is_minkowski() {
            return Err(Error::Geometry(format!(
                "time slices need a Minkowski signature, got {}",
                self.space
            )));
        }
        let n = self.dim();
        Ok((self.coords[n - 1] - other.coords[n - 1]).norm() <= EPS_STATE)
    }

    pub fn scaled(&self, factor: C64) -> StateVector {
        StateVector {
            coords: self.coords.iter().map(|z| z * factor).collect(),
            space: self.space.clone(),
        }
    }

    pub fn plus(&self, other: &StateVector) -> Result<StateVector> {
        self.same_space(other)?;
        Ok(StateVector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
            space: self.space.clone(),
        })
    }

    /// Same coordinates, reinterpreted in another space of equal dimension.
    pub fn rebind(&self, space: &GeometricSpace) -> Result<StateVector> {
        StateVector::new(self.coords.clone(), space)
    }

    fn same_space(&self, other: &StateVector) -> Result<()> {
        if self.space != other.space {
            return Err(Error::Geometry(format!(
                "vectors live in different spaces {} and {}",
                self.space, other.space
            )));
        }
        Ok(())
    }
}

/// `‖T*GT − G‖_max`.
pub fn isometry_residual(t: &ComplexMatrix, space: &GeometricSpace) -> Result<f64> {
    let n = space.dim();
    if t.rows() != n || t.cols() != n {
        return Err(Error::Geometry(format!(
            "{}x{} matrix cannot act on a {n}-dimensional space",
            t.rows(),
            t.cols()
        )));
    }
    let g = space.metric_matrix();
    Ok(t.adjoint().matmul(&g.matmul(t)?)?.sub(&g)?.max_norm())
}

pub fn is_isometry(t: &ComplexMatrix, space: &GeometricSpace, tol: f64) -> Result<bool> {
    Ok(isometry_residual(t, space)? <= tol)
}

/// A metric-preserving linear map (unitary, Galilei or Lorentz).
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    matrix: ComplexMatrix,
    space: GeometricSpace,
}

impl Isometry {
    /// Validates `T*GT = G` within `tol`.
    pub fn new(matrix: ComplexMatrix, space: &GeometricSpace, tol: f64) -> Result<Self> {
        let residual = isometry_residual(&matrix, space)?;
        if residual > tol {
            return Err(Error::Precondition(format!(
                "matrix is not an isometry of {space} (residual {residual:.3e} > {tol:.1e})"
            )));
        }
        Ok(Self {
            matrix,
            space: space.clone(),
        })
    }

    pub fn identity(space: &GeometricSpace) -> Self {
        Self {
            matrix: ComplexMatrix::identity(space.dim()),
            space: space.clone(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn space(&self) -> &GeometricSpace {
        &self.space
    }

    pub fn apply(&self, x: &StateVector) -> Result<StateVector> {
        if x.space() != &self.space {
            return Err(Error::Geometry(format!(
                "isometry of {} applied to a vector of {}",
                self.space,
                x.space()
            )));
        }
        StateVector::new(self.matrix.mul_vec(x.coords())?, &self.space)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry> {
        if self.space != other.space {
            return Err(Error::Geometry("isometries of different spaces".into()));
        }
        Ok(Isometry {
            matrix: self.matrix.matmul(&other.matrix)?,
            space: self.space.clone(),
        })
    }
}

/// `U x = U⁺x⁺ + U⁻x⁻` for unitary blocks on `V⁺` and `V⁻`.
pub fn block_unitary_isometry(
    u_plus: &ComplexMatrix,
    u_minus: &ComplexMatrix,
    space: &GeometricSpace,
) -> Result<Isometry> {
    space.require_nondegenerate()?;
    let r = space.positive();
    let m = space.dim() - r;
    if u_plus.rows() != r || u_plus.cols() != r || u_minus.rows() != m || u_minus.cols() != m {
        return Err(Error::Dimension(format!(
            "blocks {}x{} and {}x{} do not match signature split {r}+{m}",
            u_plus.rows(),
            u_plus.cols(),
            u_minus.rows(),
            u_minus.cols()
        )));
    }
    for (name, block) in [("positive", u_plus), ("negative", u_minus)] {
        let res = block.unitary_residual()?;
        if res > crate::linalg::EPS_SPECTRAL {
            return Err(Error::Precondition(format!(
                "{name} block is not unitary (residual {res:.3e})"
            )));
        }
    }
    let n = space.dim();
    let mut t = ComplexMatrix::zeros(n, n);
    for i in 0..r {
        for j in 0..r {
            t[(i, j)] = u_plus[(i, j)];
        }
    }
    for i in 0..m {
        for j in 0..m {
            t[(r + i, r + j)] = u_minus[(i, j)];
        }
    }
    Isometry::new(t, space, EPS_ISOMETRY)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feynman_state() -> StateVector {
        let space = GeometricSpace::minkowski(4);
        let s = [(5.0f64 / 8.0).sqrt(), (1.0f64 / 8.0).sqrt(), (3.0f64 / 8.0).sqrt(), (1.0f64 / 8.0).sqrt()];
        StateVector::from_real(&s, &space).unwrap()
    }

    #[test]
    fn signature_must_be_sorted() {
        assert!(GeometricSpace::from_ints(&[1, 1, -1, 0]).is_ok());
        assert!(GeometricSpace::from_ints(&[1, -1, 1]).is_err());
        assert!(GeometricSpace::from_ints(&[0, 1]).is_err());
        assert!(GeometricSpace::from_ints(&[1, 2]).is_err());
        let g = GeometricSpace::from_ints(&[1, 1, -1, 0]).unwrap();
        assert_eq!((g.positive(), g.nondegenerate(), g.dim()), (2, 3, 4));
    }

    #[test]
    fn inner_examples() {
        let x = feynman_state();
        assert!((x.inner(&x).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);

        let h = GeometricSpace::hilbert(2);
        let e1 = StateVector::from_real(&[1.0, 0.0], &h).unwrap();
        let e2 = StateVector::from_real(&[0.0, 1.0], &h).unwrap();
        assert_eq!(e1.inner(&e2).unwrap(), ZERO);

        let m3 = GeometricSpace::minkowski(3);
        let t = StateVector::from_real(&[0.0, 0.0, 1.0], &m3).unwrap();
        assert_eq!(t.inner(&t).unwrap(), C64::new(-1.0, 0.0));
        assert!(t.inner(&e1).is_err());
    }

    #[test]
    fn quadric_examples() {
        let m5 = GeometricSpace::minkowski(5);
        let v = 3f64.sqrt() / 3.0;
        let s = StateVector::from_real(&[v; 5], &m5).unwrap();
        assert!((s.quadric_norm() - 1.0).abs() < 1e-15);
        assert_eq!(StateVector::zeros(&m5).quadric_norm(), 0.0);
        let h = GeometricSpace::hilbert(3);
        let x = StateVector::new(vec![C64::new(1.0, 2.0), C64::new(-0.5, 0.0), C64::new(0.0, 3.0)], &h).unwrap();
        assert_eq!(x.quadric_norm(), x.hilbert_norm_sqr());
    }

    #[test]
    fn signed_parts_of_feynman_state() {
        let x = feynman_state();
        let (p, m, z) = x.signed_parts();
        assert_eq!(p.coords()[3], ZERO);
        assert_eq!(m.coords()[..3], [ZERO; 3]);
        assert!(z.coords().iter().all(|c| *c == ZERO));
        assert!((p.hilbert_norm_sqr() - 9.0 / 8.0).abs() < 1e-15);
        assert!((m.hilbert_norm_sqr() - 1.0 / 8.0).abs() < 1e-15);
        assert!((p.hilbert_norm_sqr() - m.hilbert_norm_sqr() - x.quadric_norm()).abs() < 1e-12);
        let back = p.plus(&m).unwrap().plus(&z).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn is_state_examples() {
        assert!(feynman_state().is_state(EPS_STATE));
        let h = GeometricSpace::hilbert(2);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(StateVector::from_real(&[r, r], &h).unwrap().is_state(EPS_STATE));
        let m3 = GeometricSpace::minkowski(3);
        assert!(!StateVector::from_real(&[0.0, 0.0, 1.0], &m3).unwrap().is_state(EPS_STATE));
    }

    #[test]
    fn isometry_examples() {
        let m2 = GeometricSpace::minkowski(2);
        assert!(is_isometry(&ComplexMatrix::identity(2), &m2, 1e-12).unwrap());
        let a = 0.5f64;
        let boost = ComplexMatrix::from_real_rows(&[vec![a.cosh(), a.sinh()], vec![a.sinh(), a.cosh()]]).unwrap();
        assert!(is_isometry(&boost, &m2, 1e-12).unwrap());
        // the boost is not unitary
        assert!(!boost.is_unitary(1e-6).unwrap());

        let m3 = GeometricSpace::minkowski(3);
        let swap = ComplexMatrix::from_real_rows(&[
            vec![0.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
        ])
        .unwrap();
        assert!(!is_isometry(&swap, &m3, 1e-9).unwrap());
        assert!(is_isometry(&swap, &GeometricSpace::hilbert(3), 1e-12).unwrap());
        assert!(is_isometry(&ComplexMatrix::identity(2), &m3, 1e-9).is_err());
    }

    #[test]
    fn block_unitary_examples() {
        let m3 = GeometricSpace::minkowski(3);
        let id = block_unitary_isometry(&ComplexMatrix::identity(2), &ComplexMatrix::identity(1), &m3).unwrap();
        assert_eq!(id.matrix(), &ComplexMatrix::identity(3));

        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let rot = ComplexMatrix::from_real_rows(&[vec![c, -s], vec![s, c]]).unwrap();
        let lorentz = block_unitary_isometry(&rot, &ComplexMatrix::identity(1), &m3).unwrap();
        let x = StateVector::from_real(&[0.2, -0.7, 1.3], &m3).unwrap();
        let y = lorentz.apply(&x).unwrap();
        assert_eq!(y.coords()[2], x.coords()[2]);
        assert!(y.same_time_slice(&x).unwrap());

        let m2 = GeometricSpace::minkowski(2);
        let i = C64::new(0.0, 1.0);
        let t = block_unitary_isometry(
            &ComplexMatrix::from_diagonal(&[i]),
            &ComplexMatrix::from_diagonal(&[-i]),
            &m2,
        )
        .unwrap();
        assert_eq!(t.matrix(), &ComplexMatrix::from_diagonal(&[i, -i]));
        assert!(is_isometry(t.matrix(), &m2, 0.0).unwrap());

        let bad = ComplexMatrix::from_real_diagonal(&[2.0]);
        assert!(matches!(
            block_unitary_isometry(&bad, &ComplexMatrix::identity(1), &m2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn time_slice_examples() {
        let m5 = GeometricSpace::minkowski(5);
        let v = 3f64.sqrt() / 3.0;
        let s = StateVector::from_real(&[v; 5], &m5).unwrap();
        assert!(s.same_time_slice(&s).unwrap());
        let a = ComplexMatrix::from_real_diagonal(&[-1.0, 1.0, 1.0, 1.0, 1.0]);
        let as_ = StateVector::new(a.mul_vec(s.coords()).unwrap(), &m5).unwrap();
        assert!(s.same_time_slice(&as_).unwrap());

        let m3 = GeometricSpace::minkowski(3);
        let p = StateVector::from_real(&[0.0, 0.0, 1.0], &m3).unwrap();
        let q = StateVector::from_real(&[0.0, 0.0, 2.0], &m3).unwrap();
        assert!(!p.same_time_slice(&q).unwrap());

        let h = GeometricSpace::hilbert(2);
        let e = StateVector::from_real(&[1.0, 0.0], &h).unwrap();
        assert!(matches!(e.same_time_slice(&e), Err(Error::Geometry(_))));
    }
}
