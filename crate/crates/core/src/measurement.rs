//! Heisenberg measuring instruments and their signed densities.
//!
//! An instrument `H(W, T)` pairs an `n×k` eigenvalue matrix `W` with an
//! isometry `T`. Measuring a state `x` groups the coordinates of `Tx` by the
//! distinct rows of `W`; each group contributes its quadric norm as the
//! (possibly negative) weight of that outcome tuple.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{GeometricSpace, Isometry, StateVector};
use crate::linalg::{commute, ComplexMatrix, C64, ZERO};

/// Tolerance on density totals and reinterpretation identities.
pub const EPS_DENSITY: f64 = 1e-12;

/// Serializes as a list of rows.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueMatrix {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl Serialize for EigenvalueMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.n))?;
        for i in 0..self.n {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

impl EigenvalueMatrix {
    pub fn new(n: usize, k: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * k {
            return Err(Error::Dimension(format!(
                "{} entries for a {n}x{k} eigenvalue matrix",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::Precondition(format!("non-finite eigenvalue {v}")));
        }
        Ok(Self { n, k, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Dimension("ragged eigenvalue matrix rows".into()));
        }
        Self::new(rows.len(), k, rows.concat())
    }

    /// Each inner slice is one observable (column).
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let k = columns.len();
        let n = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("columns of unequal length".into()));
        }
        let mut data = Vec::with_capacity(n * k);
        for i in 0..n {
            data.extend(columns.iter().map(|c| c[i]));
        }
        Self::new(n, k, data)
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn cols(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.k + j]
    }

    pub fn column(&self, j: usize) -> Result<Vec<f64>> {
        self.check_column(j)?;
        Ok((0..self.n).map(|i| self.get(i, j)).collect())
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// Sub-instrument made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        let columns = cols.iter().map(|&j| self.column(j)).collect::<Result<Vec<_>>>()?;
        Self::from_columns(&columns)
    }

    /// `Λ^(j) = diag(W_1j, …, W_nj)`.
    pub fn diagonal(&self, j: usize) -> Result<ComplexMatrix> {
        Ok(ComplexMatrix::from_real_diagonal(&self.column(j)?))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub(crate) fn check_column(&self, j: usize) -> Result<()> {
        if j >= self.k {
            Err(Error::Index { index: j, len: self.k })
        } else {
            Ok(())
        }
    }

    fn check_rows(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::Dimension(format!(
                "eigenvalue matrix has {} rows but the space has dimension {n}",
                self.n
            )));
        }
        Ok(())
    }
}

fn same_outcome(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(p, q)| (p - q).abs() <= tol)
}

/// One block of the eigenvalue decomposition `x = Σ_w x_w`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenComponent {
    pub outcome: Vec<f64>,
    pub indices: Vec<usize>,
    pub vector: StateVector,
}

/// Row-index groups of `W`, labelled by their common row and ordered by
/// first appearance. Rows within `tol` (max-abs) of a group's label join it.
pub fn outcome_groups(w: &EigenvalueMatrix, tol: f64) -> Vec<(Vec<f64>, Vec<usize>)> {
    let mut groups: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    for i in 0..w.rows() {
        let row = w.row(i);
        match groups.iter_mut().find(|(label, _)| same_outcome(label, row, tol)) {
            Some((_, idx)) => idx.push(i),
            None => groups.push((row.to_vec(), vec![i])),
        }
    }
    groups
}

/// Splits `x` into its pairwise orthogonal components `x_w`.
pub fn eigen_groups(x: &StateVector, w: &EigenvalueMatrix, tol: f64) -> Result<Vec<EigenComponent>> {
    w.check_rows(x.dim())?;
    outcome_groups(w, tol)
        .into_iter()
        .map(|(outcome, indices)| {
            let mut coords = vec![ZERO; x.dim()];
            for &i in &indices {
                coords[i] = x.coords()[i];
            }
            Ok(EigenComponent {
                outcome,
                indices,
                vector: StateVector::new(coords, x.space())?,
            })
        })
        .collect()
}

/// A finite signed measure on outcome tuples in `ℝᵏ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignedDensity {
    pub support: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SignedDensity {
    pub fn point_mass(outcome: Vec<f64>, weight: f64) -> Self {
        Self {
            support: vec![outcome],
            weights: vec![weight],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Arity of the outcome tuples.
    pub fn arity(&self) -> usize {
        self.support.first().map_or(0, Vec::len)
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.support.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    pub fn weight_of(&self, outcome: &[f64]) -> Option<f64> {
        self.iter().find(|(w, _)| *w == outcome).map(|(_, q)| q)
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_nonnegative(&self, tol: f64) -> bool {
        self.weights.iter().all(|&q| q >= -tol)
    }

    /// Pushes the density forward onto the listed coordinates.
    pub fn project(&self, coords: &[usize]) -> Result<SignedDensity> {
        let arity = self.arity();
        if let Some(&bad) = coords.iter().find(|&&j| j >= arity) {
            return Err(Error::Index { index: bad, len: arity });
        }
        let mut out = SignedDensity {
            support: Vec::new(),
            weights: Vec::new(),
        };
        for (outcome, q) in self.iter() {
            let key: Vec<f64> = coords.iter().map(|&j| outcome[j]).collect();
            match out.support.iter().position(|s| *s == key) {
                Some(pos) => out.weights[pos] += q,
                None => {
                    out.support.push(key);
                    out.weights.push(q);
                }
            }
        }
        Ok(out)
    }

    /// Marginal density of the `j`-th observable.
    pub fn marginal(&self, j: usize) -> Result<SignedDensity> {
        self.project(&[j])
    }

    /// `Σ_v v · q(v)`.
    pub fn expectation(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.arity()];
        for (outcome, q) in self.iter() {
            for (o, v) in out.iter_mut().zip(outcome) {
                *o += v * q;
            }
        }
        out
    }

    /// `Σ_v v_a · v_b · q(v)`.
    pub fn product_expectation(&self, a: usize, b: usize) -> Result<f64> {
        let arity = self.arity();
        for idx in [a, b] {
            if idx >= arity {
                return Err(Error::Index { index: idx, len: arity });
            }
        }
        Ok(self.iter().map(|(v, q)| v[a] * v[b] * q).sum())
    }
}

/// Density `q_x(w) = (x_w|x_w)` with exact row grouping.
pub fn density(x: &StateVector, w: &EigenvalueMatrix) -> Result<SignedDensity> {
    density_grouped(x, w, 0.0)
}

/// Density with rows merged when they agree within `group_tol`.
pub fn density_grouped(x: &StateVector, w: &EigenvalueMatrix, group_tol: f64) -> Result<SignedDensity> {
    x.space().require_nondegenerate()?;
    w.check_rows(x.dim())?;
    let space = x.space();
    let (support, weights) = outcome_groups(w, group_tol)
        .into_iter()
        .map(|(outcome, idx)| {
            let q: f64 = idx.iter().map(|&i| space.g(i) * x.coords()[i].norm_sqr()).sum();
            (outcome, q)
        })
        .unzip();
    Ok(SignedDensity { support, weights })
}

/// `H(W, T)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instrument {
    w: EigenvalueMatrix,
    t: Isometry,
}

impl Instrument {
    pub fn new(w: EigenvalueMatrix, t: Isometry) -> Result<Self> {
        w.check_rows(t.space().dim())?;
        Ok(Self { w, t })
    }

    /// Instrument with the trivial isometry.
    pub fn diagonal(w: EigenvalueMatrix, space: &GeometricSpace) -> Result<Self> {
        Self::new(w, Isometry::identity(space))
    }

    pub fn eigenvalues(&self) -> &EigenvalueMatrix {
        &self.w
    }

    pub fn isometry(&self) -> &Isometry {
        &self.t
    }

    pub fn space(&self) -> &GeometricSpace {
        self.t.space()
    }

    /// The joint density of the instrument in state `x`, i.e. `q_{Tx}`.
    pub fn density(&self, x: &StateVector) -> Result<SignedDensity> {
        density(&self.t.apply(x)?, &self.w)
    }

    /// `h(x) = W(Tx)`, computed as `Σᵢ gᵢ W_ij |(Tx)ᵢ|²`.
    pub fn measure(&self, x: &StateVector) -> Result<Vec<f64>> {
        let tx = self.t.apply(x)?;
        let space = tx.space();
        let mut out = vec![0.0; self.w.cols()];
        for (i, z) in tx.coords().iter().enumerate() {
            let weight = space.g(i) * z.norm_sqr();
            for (o, v) in out.iter_mut().zip(self.w.row(i)) {
                *o += v * weight;
            }
        }
        Ok(out)
    }

    /// `T* G Λ^(j) T`, the metric-folded hermitian observable of column `j`.
    ///
    /// `x* Ã x` equals the `j`-th measured value for every `x`. In Hilbert
    /// space `G = I` and this is the familiar `T* Λ T`.
    pub fn observable_matrix(&self, j: usize) -> Result<ComplexMatrix> {
        let space = self.space();
        let folded: Vec<f64> = self
            .w
            .column(j)?
            .iter()
            .zip(space.metric())
            .map(|(v, g)| v * g)
            .collect();
        let t = self.t.matrix();
        t.adjoint().matmul(&ComplexMatrix::from_real_diagonal(&folded).matmul(t)?)
    }

    /// `T* Λ^(j) T` without the metric.
    pub fn plain_observable_matrix(&self, j: usize) -> Result<ComplexMatrix> {
        let t = self.t.matrix();
        t.adjoint().matmul(&self.w.diagonal(j)?.matmul(t)?)
    }

    pub fn is_psd_in_state(&self, x: &StateVector, tol: f64) -> Result<bool> {
        Ok(self.density(x)?.is_nonnegative(tol))
    }

    pub fn psd_verdicts(&self, x: &StateVector, tol: f64) -> Result<PsdVerdicts> {
        let joint = self.density(x)?;
        let marginals = (0..self.w.cols())
            .map(|j| Ok(joint.marginal(j)?.is_nonnegative(tol)))
            .collect::<Result<Vec<_>>>()?;
        Ok(PsdVerdicts {
            joint: joint.is_nonnegative(tol),
            marginals,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsdVerdicts {
    pub joint: bool,
    pub marginals: Vec<bool>,
}

/// Pairwise commutativity of hermitian matrices, which characterizes joint
/// observability in Hilbert space.
pub fn jointly_observable_hilbert(matrices: &[ComplexMatrix], tol: f64) -> Result<bool> {
    if let Some(first) = matrices.first() {
        for m in matrices {
            if !m.is_square() || m.rows() != first.rows() {
                return Err(Error::Dimension("observables must be square and of equal size".into()));
            }
            if !m.is_hermitian(tol)? {
                return Err(Error::Precondition("observable is not hermitian".into()));
            }
        }
    }
    for (i, a) in matrices.iter().enumerate() {
        for b in &matrices[i + 1..] {
            if !commute(a, b, tol)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// State-dependent classical reading of a measurement: rows rescaled by
/// `±‖x‖₂²` and probabilities `pᵢ = |xᵢ|² / ‖x‖₂²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reinterpretation {
    pub w_x: EigenvalueMatrix,
    pub p: Vec<f64>,
    pub hilbert_norm_sqr: f64,
}

impl Reinterpretation {
    /// `Σᵢ W^x_i pᵢ`.
    pub fn expected_value(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.w_x.cols()];
        for (i, &p) in self.p.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.w_x.row(i)) {
                *o += v * p;
            }
        }
        out
    }
}

pub fn reinterpret(w: &EigenvalueMatrix, x: &StateVector) -> Result<Reinterpretation> {
    w.check_rows(x.dim())?;
    let norm = x.hilbert_norm_sqr();
    if norm == 0.0 {
        return Err(Error::Precondition("cannot reinterpret the zero vector".into()));
    }
    let space = x.space();
    let mut data = Vec::with_capacity(w.rows() * w.cols());
    for i in 0..w.rows() {
        let factor = space.g(i) * norm;
        data.extend(w.row(i).iter().map(|v| factor * v));
    }
    Ok(Reinterpretation {
        w_x: EigenvalueMatrix::new(w.rows(), w.cols(), data)?,
        p: x.coords().iter().map(|z| z.norm_sqr() / norm).collect(),
        hilbert_norm_sqr: norm,
    })
}

/// `x* A x` for the plain (Hilbert) adjoint; used to cross-check
/// [`Instrument::observable_matrix`].
pub fn hilbert_expectation(a: &ComplexMatrix, x: &StateVector) -> Result<C64> {
    a.quadratic_form(x.coords())
}
