//! Seeded generators for test data and demos.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::geometry::{block_unitary_isometry, GeometricSpace, Isometry, StateVector};
use crate::linalg::{ComplexMatrix, C64, ZERO};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Standard complex normal sample (unit variance per component) via Box–Muller.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let u: f64 = 1.0 - rng.gen::<f64>();
    let v: f64 = rng.gen();
    let r = (-2.0 * u.ln()).sqrt();
    let a = std::f64::consts::TAU * v;
    C64::new(r * a.cos(), r * a.sin())
}

/// Hermitian matrix with entries drawn uniformly from the unit box.
pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(rng.gen_range(-1.0..=1.0), 0.0);
        for j in i + 1..n {
            let z = C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Haar-distributed unitary: Gram–Schmidt on a complex Gaussian matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    loop {
        let mut cols: Vec<Vec<C64>> = (0..n).map(|_| (0..n).map(|_| complex_normal(rng)).collect()).collect();
        let mut ok = true;
        for j in 0..n {
            for k in 0..j {
                let proj: C64 = cols[k].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
                let (done, rest) = cols.split_at_mut(j);
                for (x, q) in rest[0].iter_mut().zip(&done[k]) {
                    *x -= proj * q;
                }
            }
            let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false;
                break;
            }
            for x in cols[j].iter_mut() {
                *x /= norm;
            }
        }
        if ok {
            let mut m = ComplexMatrix::zeros(n, n);
            for (j, col) in cols.iter().enumerate() {
                for (i, z) in col.iter().enumerate() {
                    m[(i, j)] = *z;
                }
            }
            return m;
        }
    }
}

/// Complex vector of unit euclidean length.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Nondegenerate signature of dimension `1..=max_dim` with at least one `+1`.
pub fn signature<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> GeometricSpace {
    let n = rng.gen_range(1..=max_dim.max(1));
    let r = rng.gen_range(1..=n);
    GeometricSpace::with_signature(r, n - r)
}

/// Point on the unit quadric of a space with at least one `+1`.
/// The positive part has euclidean norm `cosh a`, the negative part `sinh a`.
pub fn state<R: Rng + ?Sized>(rng: &mut R, space: &GeometricSpace, max_rapidity: f64) -> Result<StateVector> {
    let r = space.positive();
    let m = space.nondegenerate() - r;
    let a = if m == 0 { 0.0 } else { rng.gen_range(0.0..=max_rapidity) };
    let mut coords = vec![ZERO; space.dim()];
    for (c, z) in coords[..r].iter_mut().zip(unit_vector(rng, r)) {
        *c = z * a.cosh();
    }
    if m > 0 {
        for (c, z) in coords[r..r + m].iter_mut().zip(unit_vector(rng, m)) {
            *c = z * a.sinh();
        }
    }
    for c in coords[r + m..].iter_mut() {
        *c = complex_normal(rng);
    }
    StateVector::new(coords, space)
}

/// Block-diagonal `U₊ ⊕ U₋` isometry of a nondegenerate space.
pub fn block_isometry<R: Rng + ?Sized>(rng: &mut R, space: &GeometricSpace) -> Result<Isometry> {
    let r = space.positive();
    let m = space.dim() - r;
    block_unitary_isometry(&unitary(rng, r), &unitary(rng, m), space)
}

/// Real table of `n` rows and `k` columns, each entry `±1`.
pub fn sign_table<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..k).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect())
        .collect()
}
