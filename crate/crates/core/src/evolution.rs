//! Interaction systems and discrete Schrödinger / Heisenberg evolutions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Isometry, StateVector};
use crate::linalg::{ComplexMatrix, C64};

/// Hermiticity tolerance for observables handed to the evolution routines.
pub const EPS_HERMITIAN: f64 = 1e-10;

/// `‖Tᵗx‖₂` beyond which an evolution is declared divergent.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Real matrix of pairwise interaction coefficients `J_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct InteractionSystem {
    n: usize,
    j: Vec<f64>,
}

impl InteractionSystem {
    pub fn new(n: usize, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.len() != n * n {
            return Err(Error::Dimension(format!(
                "{} coefficients for a {n}x{n} interaction system",
                coefficients.len()
            )));
        }
        Ok(Self { n, j: coefficients })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("interaction matrix must be square".into()));
        }
        Self::new(n, rows.concat())
    }

    /// Inverse of [`hermitian_lift`](Self::hermitian_lift): `J = Re Ĵ + Im Ĵ`.
    pub fn from_hermitian(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_hermitian(EPS_HERMITIAN)? {
            return Err(Error::Precondition("matrix is not hermitian".into()));
        }
        let data = a.as_slice().iter().map(|z| z.re + z.im).collect();
        Self::new(a.rows(), data)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.j[i * self.n + k]
    }

    /// `J⁰ = (J + Jᵀ)/2`, row-major.
    pub fn symmetric_part(&self) -> Vec<f64> {
        self.part(0.5)
    }

    /// `J¹ = (J − Jᵀ)/2`, row-major.
    pub fn skew_part(&self) -> Vec<f64> {
        self.part(-0.5)
    }

    fn part(&self, sign: f64) -> Vec<f64> {
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                out.push(0.5 * self.get(i, k) + sign * self.get(k, i));
            }
        }
        out
    }

    /// `Ĵ = J⁰ + i J¹`.
    pub fn hermitian_lift(&self) -> ComplexMatrix {
        let data = self
            .symmetric_part()
            .into_iter()
            .zip(self.skew_part())
            .map(|(s, k)| C64::new(s, k))
            .collect();
        ComplexMatrix::new(self.n, self.n, data).expect("square by construction")
    }
}

/// Total interaction value `x* A x = Σ A_ij conj(xᵢ) x_j` for hermitian `A`.
pub fn interaction_value(a: &ComplexMatrix, x: &[C64]) -> Result<f64> {
    if !a.is_hermitian(EPS_HERMITIAN)? {
        return Err(Error::Precondition("interaction pattern is not hermitian".into()));
    }
    let v = a.quadratic_form(x)?;
    let scale = 1.0 + a.max_norm() * x.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if v.im.abs() > 1e-12 * scale {
        return Err(Error::Numerical(format!("interaction value has imaginary part {:.3e}", v.im)));
    }
    Ok(v.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvolveOptions {
    pub steps: usize,
    pub window: usize,
    pub tol: f64,
    /// Recompute every value in the Heisenberg picture as a cross-check.
    pub heisenberg_check: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            steps: 1000,
            window: 100,
            tol: 1e-6,
            heisenberg_check: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolutionTrace {
    /// `φ_t = (Tᵗx)* A (Tᵗx)` for `t = 0, 1, …`.
    pub values: Vec<f64>,
    /// Running means of `values`.
    pub cesaro: Vec<f64>,
    /// `‖Tᵗx‖₂` alongside each value.
    pub hilbert_norms: Vec<f64>,
    pub converged: bool,
    pub limit_estimate: f64,
    /// Set when `‖Tᵗx‖₂` exceeded [`DIVERGENCE_LIMIT`] and iteration stopped.
    pub diverged: bool,
    /// Largest `|φ_t(Schrödinger) − φ_t(Heisenberg)| / max(1, |φ_t|)`, when requested.
    pub heisenberg_max_deviation: Option<f64>,
}

pub fn cesaro_means(values: &[f64]) -> Vec<f64> {
    let mut sum = 0.0;
    values
        .iter()
        .enumerate()
        .map(|(t, v)| {
            sum += v;
            sum / (t + 1) as f64
        })
        .collect()
}

/// Windowed convergence test on the running means of `values`: the last
/// `window` means must all lie within `tol` of each other.
pub fn cesaro_converged(values: &[f64], window: usize, tol: f64) -> Result<(bool, f64)> {
    if window == 0 || values.len() < 2 * window {
        return Err(Error::Precondition(format!(
            "need at least {} values for window {window}, got {}",
            2 * window,
            values.len()
        )));
    }
    let means = cesaro_means(values);
    Ok(window_verdict(&means, window, tol))
}

fn window_verdict(means: &[f64], window: usize, tol: f64) -> (bool, f64) {
    let tail = &means[means.len() - window..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let last = *means.last().expect("non-empty");
    (hi - lo <= tol && last.is_finite(), last)
}

/// Iterates `x_{t+1} = T x_t` and records `φ_t = x_t* A x_t`.
pub fn evolve(a: &ComplexMatrix, t: &Isometry, x: &StateVector, opts: &EvolveOptions) -> Result<EvolutionTrace> {
    if !a.is_hermitian(EPS_HERMITIAN)? {
        return Err(Error::Precondition("observable is not hermitian".into()));
    }
    let n = x.dim();
    if a.rows() != n || t.space().dim() != n {
        return Err(Error::Dimension(format!(
            "observable {}x{}, isometry on dimension {}, state of dimension {n}",
            a.rows(),
            a.cols(),
            t.space().dim()
        )));
    }
    let tm = t.matrix();
    let mut state = x.coords().to_vec();
    let mut values = Vec::with_capacity(opts.steps + 1);
    let mut hilbert_norms = Vec::with_capacity(opts.steps + 1);
    let mut diverged = false;

    let mut heisenberg = opts.heisenberg_check.then(|| a.clone());
    let tm_adj = tm.adjoint();
    let mut deviation: f64 = 0.0;

    for step in 0..=opts.steps {
        let norm = state.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm <= DIVERGENCE_LIMIT) {
            diverged = true;
            break;
        }
        let phi = a.quadratic_form(&state)?.re;
        if !phi.is_finite() {
            return Err(Error::Numerical(format!("value at step {step} is not finite")));
        }
        values.push(phi);
        hilbert_norms.push(norm);
        if let Some(at) = heisenberg.as_mut() {
            let dual = at.quadratic_form(x.coords())?.re;
            deviation = deviation.max((dual - phi).abs() / phi.abs().max(1.0));
            *at = tm_adj.matmul(&at.matmul(tm)?)?;
        }
        if step < opts.steps {
            state = tm.mul_vec(&state)?;
        }
    }

    let cesaro = cesaro_means(&values);
    let (converged, limit_estimate) = if diverged || opts.window == 0 || values.len() < 2 * opts.window {
        (false, cesaro.last().copied().unwrap_or(f64::NAN))
    } else {
        window_verdict(&cesaro, opts.window, opts.tol)
    };
    Ok(EvolutionTrace {
        values,
        cesaro,
        hilbert_norms,
        converged,
        limit_estimate,
        diverged,
        heisenberg_max_deviation: opts.heisenberg_check.then_some(deviation),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometricSpace;

    #[test]
    fn lift_examples() {
        let sym = InteractionSystem::from_rows(&[vec![1.0, 2.0], vec![2.0, -3.0]]).unwrap();
        assert_eq!(sym.hermitian_lift(), ComplexMatrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, -3.0]]).unwrap());

        let skew = InteractionSystem::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let i = C64::new(0.0, 1.0);
        let expected = ComplexMatrix::from_rows(&[vec![C64::new(0.0, 0.0), i], vec![-i, C64::new(0.0, 0.0)]]).unwrap();
        assert_eq!(skew.hermitian_lift(), expected);

        let mixed = InteractionSystem::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        let lift = mixed.hermitian_lift();
        assert_eq!(lift[(0, 1)], C64::new(1.0, 1.0));
        assert_eq!(lift[(1, 0)], C64::new(1.0, -1.0));
        assert_eq!(lift[(0, 0)], C64::new(1.0, 0.0));
        assert!(lift.is_hermitian(0.0).unwrap());
        assert_eq!(InteractionSystem::from_hermitian(&lift).unwrap(), mixed);

        assert!(InteractionSystem::from_rows(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn interaction_value_examples() {
        let x = [C64::new(0.3, -1.0), C64::new(2.0, 0.5)];
        let norm: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        assert!((interaction_value(&ComplexMatrix::identity(2), &x).unwrap() - norm).abs() < 1e-12);

        let skew = InteractionSystem::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap().hermitian_lift();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let v = interaction_value(&skew, &[C64::new(r, 0.0), C64::new(r, 0.0)]).unwrap();
        assert!(v.abs() < 1e-15);

        let d = ComplexMatrix::from_real_diagonal(&[-1.0, 1.0]);
        assert_eq!(interaction_value(&d, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap(), -1.0);

        let nil = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(interaction_value(&nil, &x), Err(Error::Precondition(_))));
    }

    #[test]
    fn identity_evolution_is_constant() {
        let h = GeometricSpace::hilbert(2);
        let x = StateVector::from_real(&[0.6, 0.8], &h).unwrap();
        let a = ComplexMatrix::from_real_diagonal(&[2.0, -1.0]);
        let opts = EvolveOptions { steps: 300, ..Default::default() };
        let tr = evolve(&a, &Isometry::identity(&h), &x, &opts).unwrap();
        assert_eq!(tr.values.len(), 301);
        assert!(tr.values.iter().all(|&v| v == tr.values[0]));
        assert!(tr.converged);
        assert!((tr.limit_estimate - tr.values[0]).abs() < 1e-14);
    }

    #[test]
    fn quarter_rotation_alternates() {
        let h = GeometricSpace::hilbert(2);
        let rot = Isometry::new(ComplexMatrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap(), &h, 0.0)
            .unwrap();
        let x = StateVector::from_real(&[1.0, 0.0], &h).unwrap();
        let a = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        let opts = EvolveOptions {
            steps: 10_000,
            window: 100,
            tol: 1e-3,
            heisenberg_check: true,
        };
        let tr = evolve(&a, &rot, &x, &opts).unwrap();
        for (t, v) in tr.values.iter().take(6).enumerate() {
            assert_eq!(*v, if t % 2 == 0 { 1.0 } else { -1.0 });
        }
        assert!(tr.converged);
        assert!(tr.limit_estimate.abs() < 1e-3);
        assert!(tr.heisenberg_max_deviation.unwrap() <= 1e-9);
    }

    #[test]
    fn boost_diverges() {
        let m2 = GeometricSpace::minkowski(2);
        let a = 0.5f64;
        let boost = Isometry::new(
            ComplexMatrix::from_real_rows(&[vec![a.cosh(), a.sinh()], vec![a.sinh(), a.cosh()]]).unwrap(),
            &m2,
            1e-12,
        )
        .unwrap();
        let x = StateVector::from_real(&[1.0, 0.0], &m2).unwrap();
        // diag(1, −1) with the metric folded in
        let obs = ComplexMatrix::identity(2);
        let tr = evolve(&obs, &boost, &x, &EvolveOptions::default()).unwrap();
        assert!(tr.diverged);
        assert!(!tr.converged);
        assert!(tr.hilbert_norms.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn overflow_is_a_numerical_failure() {
        let h = GeometricSpace::hilbert(2);
        let x = StateVector::from_real(&[1.0, 0.0], &h).unwrap();
        let a = ComplexMatrix::from_real_diagonal(&[f64::MAX, 0.0]).scale(C64::new(4.0, 0.0));
        let err = evolve(&a, &Isometry::identity(&h), &x, &EvolveOptions::default()).unwrap_err();
        assert!(err.is_numerical());
    }

    #[test]
    fn cesaro_examples() {
        let constant = vec![2.5; 40];
        assert_eq!(cesaro_converged(&constant, 10, 0.0).unwrap(), (true, 2.5));

        let alternating: Vec<f64> = (0..5000).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let (ok, lim) = cesaro_converged(&alternating, 10, 1e-3).unwrap();
        assert!(ok && lim.abs() < 1e-3);

        let growing: Vec<f64> = (0..100).map(|t| 1.1f64.powi(t)).collect();
        let (ok, lim) = cesaro_converged(&growing, 10, 1e-3).unwrap();
        assert!(!ok);
        assert_eq!(lim, *cesaro_means(&growing).last().unwrap());

        assert!(cesaro_converged(&[1.0; 5], 3, 1e-3).is_err());

        // at exactly 1000 values the tail spread is 1/991, just above 1e-3
        let short: Vec<f64> = (0..1000).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!(!cesaro_converged(&short, 10, 1e-3).unwrap().0);
        assert!(cesaro_converged(&short, 10, 1.01e-3).unwrap().0);
    }
}
