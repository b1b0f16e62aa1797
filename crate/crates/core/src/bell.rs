//! Bell's inequality for three common observables.
//!
//! For an `n×3` eigenvalue matrix with Bell number `|W|∞ = max |W_ij|` and a
//! state `x`, the pairwise product expectations are read off the signed
//! density of the instrument. When that density is nonnegative,
//!
//! ```text
//! |E(XY) − E(YZ)| + E(XZ) ≤ |W|∞²
//! ```
//!
//! always holds. In indefinite geometries the density may go negative and
//! the bound can fail; [`violation_search`] looks for such witnesses by
//! solving a pair of linear programs per sign pattern.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{GeometricSpace, Isometry, StateVector, EPS_STATE};
use crate::lp::{LinearProgram, LpOutcome, Relation, EPS_LP};
use crate::measurement::{density, reinterpret, EigenvalueMatrix, SignedDensity};

pub const EPS_BELL: f64 = 1e-9;

/// Largest dimension accepted by [`violation_search`].
pub const MAX_SEARCH_DIM: usize = 8;

/// Pairs in report order: (X,Y), (Y,Z), (X,Z).
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (0, 2)];

/// `|W|∞ = max_ij |W_ij|`.
pub fn bell_number(w: &EigenvalueMatrix) -> Result<f64> {
    if w.is_empty() {
        return Err(Error::Shape("Bell number of an empty eigenvalue matrix".into()));
    }
    Ok(w.max_abs())
}

/// `Σ_v v_a v_b q(v)`.
pub fn pair_expectation(d: &SignedDensity, a: usize, b: usize) -> Result<f64> {
    if a == b {
        return Err(Error::Precondition(format!("pair expectation needs two distinct columns, got {a} twice")));
    }
    d.product_expectation(a, b)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BellReport {
    pub exy: f64,
    pub eyz: f64,
    pub exz: f64,
    /// `|exy − eyz| + exz`.
    pub lhs: f64,
    pub bell_number: f64,
    /// `|W|∞²`.
    pub bound: f64,
    pub triple_density_nonneg: bool,
    /// Nonnegativity of the (X,Y), (Y,Z), (X,Z) pair densities.
    pub pairwise_nonneg: [bool; 3],
    pub marginals_nonneg: [bool; 3],
    pub satisfied: bool,
}

impl BellReport {
    /// Builds the report from a joint density over `ℝ³`.
    pub fn from_density(d: &SignedDensity, bell_number: f64) -> Result<Self> {
        if d.arity() != 3 {
            return Err(Error::Shape(format!("Bell check needs k = 3, got {}", d.arity())));
        }
        let exy = pair_expectation(d, 0, 1)?;
        let eyz = pair_expectation(d, 1, 2)?;
        let exz = pair_expectation(d, 0, 2)?;
        let lhs = (exy - eyz).abs() + exz;
        let bound = bell_number * bell_number;
        let mut pairwise_nonneg = [false; 3];
        for (flag, (a, b)) in pairwise_nonneg.iter_mut().zip(PAIRS) {
            *flag = d.project(&[a, b])?.is_nonnegative(EPS_BELL);
        }
        let mut marginals_nonneg = [false; 3];
        for (j, flag) in marginals_nonneg.iter_mut().enumerate() {
            *flag = d.marginal(j)?.is_nonnegative(EPS_BELL);
        }
        Ok(Self {
            exy,
            eyz,
            exz,
            lhs,
            bell_number,
            bound,
            triple_density_nonneg: d.is_nonnegative(EPS_BELL),
            pairwise_nonneg,
            marginals_nonneg,
            satisfied: lhs <= bound + EPS_BELL,
        })
    }
}

fn require_three_columns(w: &EigenvalueMatrix) -> Result<()> {
    if w.cols() != 3 {
        return Err(Error::Shape(format!("Bell check needs k = 3 observables, got {}", w.cols())));
    }
    Ok(())
}

/// Full Bell report for the instrument `H(W, T)` in state `x`.
pub fn bell_check(w: &EigenvalueMatrix, x: &StateVector, t: &Isometry) -> Result<BellReport> {
    require_three_columns(w)?;
    if !x.is_state(EPS_STATE) {
        return Err(Error::Precondition(format!(
            "Bell check needs a state, quadric norm is {}",
            x.quadric_norm()
        )));
    }
    let d = density(&t.apply(x)?, w)?;
    BellReport::from_density(&d, bell_number(w)?)
}

/// The Bell check of the stochastic Hilbert-space reading of a measurement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RescaledBell {
    /// `W″ = W^x`.
    pub rescaled: EigenvalueMatrix,
    pub hilbert_norm_sqr: f64,
    pub probabilities: Vec<f64>,
    pub report: BellReport,
}

/// Rescales `W` to `W^x`, moves `x/‖x‖₂` into Hilbert space and checks the
/// inequality there against `|W^x|∞²`.
pub fn hilbert_rescaled_check(w: &EigenvalueMatrix, x: &StateVector) -> Result<RescaledBell> {
    require_three_columns(w)?;
    let re = reinterpret(w, x)?;
    let hilbert = GeometricSpace::hilbert(x.dim());
    let scale = re.hilbert_norm_sqr.sqrt();
    let unit = x.scaled((1.0 / scale).into()).rebind(&hilbert)?;
    let report = bell_check(&re.w_x, &unit, &Isometry::identity(&hilbert))?;
    Ok(RescaledBell {
        rescaled: re.w_x,
        hilbert_norm_sqr: re.hilbert_norm_sqr,
        probabilities: re.p,
        report,
    })
}

/// Linear nonnegativity requirements imposed during the witness search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintSet {
    None,
    MarginalsNonneg,
    PairwiseNonneg,
    TripleNonneg,
}

impl ConstraintSet {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstraintSet::None => "none",
            ConstraintSet::MarginalsNonneg => "marginals_nonneg",
            ConstraintSet::PairwiseNonneg => "pairwise_nonneg",
            ConstraintSet::TripleNonneg => "triple_nonneg",
        }
    }
}

impl fmt::Display for ConstraintSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConstraintSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ConstraintSet::None),
            "marginals_nonneg" | "marginals" => Ok(ConstraintSet::MarginalsNonneg),
            "pairwise_nonneg" | "pairwise" => Ok(ConstraintSet::PairwiseNonneg),
            "triple_nonneg" | "triple" => Ok(ConstraintSet::TripleNonneg),
            other => Err(Error::Constraint(format!(
                "unknown constraint set '{other}' (expected none, marginals_nonneg, pairwise_nonneg or triple_nonneg)"
            ))),
        }
    }
}

impl Serialize for ConstraintSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ConstraintSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A concrete violation of the Bell bound: a signature, three `±1`
/// observables and the squared state amplitudes that realize it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    #[serde(serialize_with = "serialize_signature")]
    pub space: GeometricSpace,
    pub columns: EigenvalueMatrix,
    /// `|sᵢ|²`, nonnegative with `Σ gᵢ·weightᵢ = 1`.
    pub weights: Vec<f64>,
    pub norm_cap: f64,
    pub constraints: ConstraintSet,
    /// Row types used by the positive / negative signature blocks.
    pub pattern: String,
    /// Optimal value reported by the linear program.
    pub lp_value: f64,
    /// Report recomputed from the witness state by density summation.
    pub report: BellReport,
}

fn serialize_signature<S: Serializer>(space: &GeometricSpace, s: S) -> std::result::Result<S::Ok, S::Error> {
    space.signature_ints().serialize(s)
}

impl Witness {
    pub fn state(&self) -> Result<StateVector> {
        let coords: Vec<f64> = self.weights.iter().map(|p| p.max(0.0).sqrt()).collect();
        StateVector::from_real(&coords, &self.space)
    }

    /// Recomputes the Bell report from scratch.
    pub fn recheck(&self) -> Result<BellReport> {
        bell_check(&self.columns, &self.state()?, &Isometry::identity(&self.space))
    }
}

/// Row type `t ∈ 0..8`: bit `j` set means observable `j` reads −1.
fn type_values(t: u8) -> [f64; 3] {
    [0, 1, 2].map(|j| if t >> j & 1 == 1 { -1.0 } else { 1.0 })
}

/// Column symmetries preserving `|E(XY) − E(YZ)| + E(XZ)`: flipping Y,
/// flipping all columns, and exchanging X with Z.
fn symmetry_images(t: u8) -> [u8; 8] {
    let swap = |t: u8| (t & 0b010) | (t & 1) << 2 | (t >> 2) & 1;
    let mut out = [0u8; 8];
    for (k, flip) in [0u8, 0b010, 0b111, 0b101].into_iter().enumerate() {
        out[2 * k] = t ^ flip;
        out[2 * k + 1] = swap(t ^ flip);
    }
    out
}

fn map_mask(mask: u8, g: usize) -> u8 {
    (0..8u8)
        .filter(|t| mask >> t & 1 == 1)
        .fold(0, |acc, t| acc | 1 << symmetry_images(t)[g])
}

fn is_canonical(plus: u8, minus: u8) -> bool {
    (1..8).all(|g| (map_mask(plus, g), map_mask(minus, g)) >= (plus, minus))
}

fn mask_types(mask: u8) -> Vec<u8> {
    (0..8u8).filter(|t| mask >> t & 1 == 1).collect()
}

fn admissible_masks(class_size: usize) -> Vec<u8> {
    if class_size == 0 {
        return vec![0];
    }
    (1..=255u8)
        .filter(|m| (m.count_ones() as usize) <= class_size)
        .collect()
}

struct PatternLp {
    /// (metric sign, row type) per LP variable.
    vars: Vec<(f64, u8)>,
}

impl PatternLp {
    fn new(plus: u8, minus: u8) -> Self {
        let vars = mask_types(plus)
            .into_iter()
            .map(|t| (1.0, t))
            .chain(mask_types(minus).into_iter().map(|t| (-1.0, t)))
            .collect();
        Self { vars }
    }

    fn signed_coeffs(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        self.vars.iter().map(|&(g, t)| g * f(type_values(t))).collect()
    }

    /// Σ of signed weights over variables whose row type satisfies `pred`.
    fn indicator(&self, pred: impl Fn([f64; 3]) -> bool) -> Option<Vec<f64>> {
        let c: Vec<f64> = self
            .vars
            .iter()
            .map(|&(g, t)| if pred(type_values(t)) { g } else { 0.0 })
            .collect();
        c.iter().any(|&v| v != 0.0).then_some(c)
    }

    fn base(&self, objective: Vec<f64>, norm_cap: f64, constraints: ConstraintSet) -> LinearProgram {
        let nv = self.vars.len();
        let mut lp = LinearProgram::new(objective);
        lp.constrain(self.signed_coeffs(|_| 1.0), Relation::Eq, 1.0);
        lp.constrain(vec![1.0; nv], Relation::Le, norm_cap);
        let mut nonneg = |c: Option<Vec<f64>>| {
            if let Some(c) = c {
                lp.constrain(c, Relation::Ge, 0.0);
            }
        };
        let signs = [1.0, -1.0];
        match constraints {
            ConstraintSet::None => {}
            ConstraintSet::TripleNonneg => {
                for t in 0..8u8 {
                    let target = type_values(t);
                    nonneg(self.indicator(|v| v == target));
                }
            }
            ConstraintSet::PairwiseNonneg => {
                for (a, b) in PAIRS {
                    for sa in signs {
                        for sb in signs {
                            nonneg(self.indicator(|v| v[a] == sa && v[b] == sb));
                        }
                    }
                }
            }
            ConstraintSet::MarginalsNonneg => {
                for j in 0..3 {
                    for s in signs {
                        nonneg(self.indicator(|v| v[j] == s));
                    }
                }
            }
        }
        lp
    }

    /// Maximizes `|exy − eyz| + exz` via its two linear branches.
    fn solve(&self, norm_cap: f64, constraints: ConstraintSet) -> Option<(f64, Vec<f64>)> {
        let gap = self.signed_coeffs(|v| v[0] * v[1] - v[1] * v[2]);
        let mut best: Option<(f64, Vec<f64>)> = None;
        for branch in [1.0, -1.0] {
            let objective = self.signed_coeffs(|v| branch * (v[0] * v[1] - v[1] * v[2]) + v[0] * v[2]);
            let mut lp = self.base(objective, norm_cap, constraints);
            lp.constrain(gap.iter().map(|c| branch * c).collect(), Relation::Ge, 0.0);
            if let LpOutcome::Optimal { x, value } = lp.maximize(EPS_LP) {
                if best.as_ref().is_none_or(|(v, _)| value > *v) {
                    best = Some((value, x));
                }
            }
        }
        best
    }
}

fn pattern_label(plus: u8, minus: u8) -> String {
    let fmt_types = |mask: u8| {
        mask_types(mask)
            .into_iter()
            .map(|t| {
                type_values(t)
                    .iter()
                    .map(|&v| if v > 0.0 { '+' } else { '-' })
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join(",")
    };
    format!("P[{}] N[{}]", fmt_types(plus), fmt_types(minus))
}

/// Lays the per-type LP weights out as `n` concrete rows. Classes with fewer
/// distinct types than coordinates repeat their first type and split its
/// weight evenly across the copies.
fn expand_rows(types: &[u8], weights: &[f64], class_size: usize) -> (Vec<[f64; 3]>, Vec<f64>) {
    if class_size == 0 {
        return (Vec::new(), Vec::new());
    }
    let copies = class_size - types.len() + 1;
    let mut rows = Vec::with_capacity(class_size);
    let mut ws = Vec::with_capacity(class_size);
    for _ in 0..copies {
        rows.push(type_values(types[0]));
        ws.push(weights[0] / copies as f64);
    }
    for (&t, &w) in types.iter().zip(weights).skip(1) {
        rows.push(type_values(t));
        ws.push(w);
    }
    (rows, ws)
}

/// Enumerates `±1` observable triples over `space` and returns every pattern
/// whose optimal state violates the Bell bound, best first.
///
/// Weights `p = |s|²` range over `p ≥ 0`, `Σ gᵢpᵢ = 1`, `Σ pᵢ ≤ norm_cap`
/// plus the linear nonnegativity rows of `constraints`. Rows within the same
/// signature block are interchangeable and repeated row types merge, so
/// patterns are enumerated as sets of row types per block, reduced modulo the
/// column symmetries of the objective.
pub fn violation_search(space: &GeometricSpace, norm_cap: f64, constraints: ConstraintSet) -> Result<Vec<Witness>> {
    let n = space.dim();
    if n == 0 || n > MAX_SEARCH_DIM {
        return Err(Error::Size(format!("witness search supports 1 ≤ n ≤ {MAX_SEARCH_DIM}, got {n}")));
    }
    space.require_nondegenerate()?;
    if !(norm_cap >= 1.0) {
        return Err(Error::Precondition(format!("norm cap must be at least 1, got {norm_cap}")));
    }
    let r = space.positive();
    let m = n - r;

    let mut witnesses: Vec<(u16, Witness)> = Vec::new();
    for plus in admissible_masks(r) {
        for minus in admissible_masks(m) {
            if !is_canonical(plus, minus) {
                continue;
            }
            let pattern = PatternLp::new(plus, minus);
            let Some((value, x)) = pattern.solve(norm_cap, constraints) else {
                continue;
            };
            let np = plus.count_ones() as usize;
            let (mut rows, mut weights) = expand_rows(&mask_types(plus), &x[..np], r);
            let (neg_rows, neg_weights) = expand_rows(&mask_types(minus), &x[np..], m);
            rows.extend(neg_rows);
            weights.extend(neg_weights);
            let columns = EigenvalueMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())?;
            let amplitudes: Vec<f64> = weights.iter().map(|p| p.max(0.0).sqrt()).collect();
            let state = StateVector::from_real(&amplitudes, space)?;
            let report = bell_check(&columns, &state, &Isometry::identity(space))?;
            if report.lhs > report.bound + EPS_BELL {
                let witness = Witness {
                    space: space.clone(),
                    columns,
                    weights,
                    norm_cap,
                    constraints,
                    pattern: pattern_label(plus, minus),
                    lp_value: value,
                    report,
                };
                witnesses.push(((plus as u16) << 8 | minus as u16, witness));
            }
        }
    }
    witnesses.sort_by(|(ka, a), (kb, b)| b.report.lhs.total_cmp(&a.report.lhs).then(ka.cmp(kb)));
    Ok(witnesses.into_iter().map(|(_, w)| w).collect())
}

/// A prescribed probability for a single-observable value or a full outcome.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    Marginal { column: usize, value: f64, probability: f64 },
    Joint { outcome: Vec<f64>, probability: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    /// A probability vector over the rows of the table when feasible.
    pub certificate: Option<Vec<f64>>,
}

type RowPredicate = Box<dyn Fn(&[f64]) -> bool>;

/// Decides whether some probability vector over the ground states of `table`
/// reproduces the `targets`, as a Hilbert-space state `|sᵢ|² = pᵢ` would.
pub fn hilbert_feasibility(table: &EigenvalueMatrix, targets: &[Target]) -> Result<Feasibility> {
    let n = table.rows();
    if n == 0 {
        return Err(Error::Constraint("empty eigenvalue table".into()));
    }
    let mut rows = Vec::with_capacity(targets.len());
    for target in targets {
        let (pred, p): (RowPredicate, f64) = match target {
            Target::Marginal { column, value, probability } => {
                if *column >= table.cols() {
                    return Err(Error::Constraint(format!(
                        "column {column} out of range for {} observables",
                        table.cols()
                    )));
                }
                let (c, v) = (*column, *value);
                (Box::new(move |row: &[f64]| row[c] == v), *probability)
            }
            Target::Joint { outcome, probability } => {
                if outcome.len() != table.cols() {
                    return Err(Error::Constraint(format!(
                        "joint outcome has {} entries, table has {} observables",
                        outcome.len(),
                        table.cols()
                    )));
                }
                let o = outcome.clone();
                (Box::new(move |row: &[f64]| row == o.as_slice()), *probability)
            }
        };
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Constraint(format!("probability {p} outside [0, 1]")));
        }
        let coeffs: Vec<f64> = (0..n).map(|i| if pred(table.row(i)) { 1.0 } else { 0.0 }).collect();
        rows.push((coeffs, p));
    }
    if rows.is_empty() {
        return Ok(Feasibility {
            feasible: true,
            certificate: Some(vec![1.0 / n as f64; n]),
        });
    }
    let mut lp = LinearProgram::new(vec![0.0; n]);
    lp.constrain(vec![1.0; n], Relation::Eq, 1.0);
    for (coeffs, p) in rows {
        lp.constrain(coeffs, Relation::Eq, p);
    }
    Ok(match lp.maximize(EPS_LP) {
        LpOutcome::Optimal { x, .. } => Feasibility {
            feasible: true,
            certificate: Some(x),
        },
        _ => Feasibility {
            feasible: false,
            certificate: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m5() -> (StateVector, EigenvalueMatrix) {
        let v = 3f64.sqrt() / 3.0;
        let w = EigenvalueMatrix::from_columns(&[
            vec![-1.0, 1.0, 1.0, 1.0, 1.0],
            vec![-1.0, 1.0, -1.0, -1.0, 1.0],
            vec![-1.0, -1.0, -1.0, 1.0, 1.0],
        ])
        .unwrap();
        (StateVector::from_real(&[v; 5], &GeometricSpace::minkowski(5)).unwrap(), w)
    }

    fn m3_witness() -> (StateVector, EigenvalueMatrix) {
        let h = 0.5f64.sqrt();
        let w = EigenvalueMatrix::from_columns(&[vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0, -1.0]])
            .unwrap();
        (StateVector::from_real(&[1.0, h, h], &GeometricSpace::minkowski(3)).unwrap(), w)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn bell_numbers() {
        let (_, w) = m5();
        assert_eq!(bell_number(&w).unwrap(), 1.0);
        let f = 5.0 / 3.0;
        let rescaled = EigenvalueMatrix::from_columns(&[
            vec![-f, f, f, f, -f],
            vec![-f, f, -f, -f, -f],
            vec![-f, -f, f, f, -f],
        ])
        .unwrap();
        assert_eq!(bell_number(&rescaled).unwrap(), f);
        assert_eq!(bell_number(&EigenvalueMatrix::new(2, 3, vec![0.0; 6]).unwrap()).unwrap(), 0.0);
        assert!(bell_number(&EigenvalueMatrix::new(0, 3, vec![]).unwrap()).is_err());
    }

    #[test]
    fn pair_expectations() {
        let (s, w) = m5();
        let d = density(&s, &w).unwrap();
        assert!(close(pair_expectation(&d, 0, 1).unwrap(), -1.0 / 3.0));
        assert!(close(pair_expectation(&d, 0, 2).unwrap(), -1.0 / 3.0));
        let pm = SignedDensity::point_mass(vec![1.0, 1.0, 1.0], 1.0);
        for (a, b) in PAIRS {
            assert_eq!(pair_expectation(&pm, a, b).unwrap(), 1.0);
        }
        assert!(pair_expectation(&pm, 0, 3).is_err());
        assert!(pair_expectation(&pm, 1, 1).is_err());
    }

    #[test]
    fn m5_check_is_satisfied() {
        let (s, w) = m5();
        let rep = bell_check(&w, &s, &Isometry::identity(s.space())).unwrap();
        for e in [rep.exy, rep.eyz, rep.exz] {
            assert!(close(e, -1.0 / 3.0));
        }
        assert!(close(rep.lhs, -1.0 / 3.0));
        assert_eq!(rep.bound, 1.0);
        assert!(rep.satisfied);
        assert!(!rep.triple_density_nonneg);
        assert_eq!(rep.pairwise_nonneg, [true, false, true]);
    }

    #[test]
    fn m3_witness_violates() {
        let (s, w) = m3_witness();
        let rep = bell_check(&w, &s, &Isometry::identity(s.space())).unwrap();
        assert!(close(rep.exy, 1.0) && close(rep.eyz, 2.0) && close(rep.exz, 2.0));
        assert!(close(rep.lhs, 3.0));
        assert!(!rep.satisfied);
    }

    #[test]
    fn bell_check_shape_and_state_errors() {
        let (s, w) = m5();
        let two = w.select_columns(&[0, 1]).unwrap();
        assert!(matches!(bell_check(&two, &s, &Isometry::identity(s.space())), Err(Error::Shape(_))));
        let not_state = s.scaled(2.0.into());
        assert!(matches!(
            bell_check(&w, &not_state, &Isometry::identity(s.space())),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn column_reversal_swaps_outer_pairs() {
        let (s, w) = m3_witness();
        let rev = w.select_columns(&[2, 1, 0]).unwrap();
        let id = Isometry::identity(s.space());
        let a = bell_check(&w, &s, &id).unwrap();
        let b = bell_check(&rev, &s, &id).unwrap();
        assert_eq!(a.exz, b.exz);
        assert_eq!(a.exy, b.eyz);
        assert_eq!(a.eyz, b.exy);
    }

    #[test]
    fn m5_hilbert_rescaling() {
        let (s, w) = m5();
        let r = hilbert_rescaled_check(&w, &s).unwrap();
        assert!(close(r.hilbert_norm_sqr, 5.0 / 3.0));
        assert!(close(r.report.bound, 25.0 / 9.0));
        for e in [r.report.exy, r.report.eyz, r.report.exz] {
            assert!(close(e, 5.0 / 9.0));
        }
        assert!(r.report.satisfied && r.report.triple_density_nonneg);
    }

    #[test]
    fn rescaling_is_identity_for_unit_hilbert_state() {
        let h = GeometricSpace::hilbert(3);
        let x = StateVector::from_real(&[0.6, 0.0, 0.8], &h).unwrap();
        let w = EigenvalueMatrix::from_rows(&[vec![1.0, -1.0, 0.5], vec![2.0, 0.0, -1.0], vec![-1.0, 1.0, 1.0]])
            .unwrap();
        let a = hilbert_rescaled_check(&w, &x).unwrap().report;
        let b = bell_check(&w, &x, &Isometry::identity(&h)).unwrap();
        for (p, q) in [(a.exy, b.exy), (a.eyz, b.eyz), (a.exz, b.exz), (a.bound, b.bound)] {
            assert!(close(p, q));
        }
    }

    #[test]
    fn symmetry_group_has_eight_distinct_maps() {
        let images: Vec<[u8; 8]> = (0..8u8).map(symmetry_images).collect();
        for g in 0..8 {
            let perm: Vec<u8> = images.iter().map(|im| im[g]).collect();
            let mut sorted = perm.clone();
            sorted.sort();
            assert_eq!(sorted, (0..8).collect::<Vec<_>>(), "image {g} is a permutation");
        }
        // each map leaves the objective unchanged
        for t in 0..8u8 {
            let v = type_values(t);
            let f = (v[0] * v[1] - v[1] * v[2]).abs() + v[0] * v[2];
            for &u in &symmetry_images(t) {
                let w = type_values(u);
                assert_eq!(f, (w[0] * w[1] - w[1] * w[2]).abs() + w[0] * w[2]);
            }
        }
    }

    #[test]
    fn m3_search_finds_lhs_three() {
        let found = violation_search(&GeometricSpace::minkowski(3), 2.0, ConstraintSet::None).unwrap();
        assert!(!found.is_empty());
        let top = &found[0];
        assert!((top.report.lhs - 3.0).abs() <= 1e-9, "{}", top.report.lhs);
        assert!((top.lp_value - 3.0).abs() <= 1e-9);
        for w in found.windows(2) {
            assert!(w[0].report.lhs >= w[1].report.lhs);
        }
    }

    #[test]
    fn hilbert_search_is_empty() {
        for n in 1..=4 {
            let found = violation_search(&GeometricSpace::hilbert(n), 3.0, ConstraintSet::None).unwrap();
            assert!(found.is_empty());
        }
    }

    #[test]
    fn triple_nonneg_search_is_empty() {
        let found = violation_search(&GeometricSpace::minkowski(4), 3.0, ConstraintSet::TripleNonneg).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn search_rejects_bad_input() {
        assert!(matches!(
            violation_search(&GeometricSpace::minkowski(9), 2.0, ConstraintSet::None),
            Err(Error::Size(_))
        ));
        assert!(violation_search(&GeometricSpace::minkowski(3), 0.5, ConstraintSet::None).is_err());
        let degenerate = GeometricSpace::from_ints(&[1, -1, 0]).unwrap();
        assert!(violation_search(&degenerate, 2.0, ConstraintSet::None).is_err());
    }

    #[test]
    fn constraint_names_round_trip() {
        for c in [
            ConstraintSet::None,
            ConstraintSet::MarginalsNonneg,
            ConstraintSet::PairwiseNonneg,
            ConstraintSet::TripleNonneg,
        ] {
            assert_eq!(c.as_str().parse::<ConstraintSet>().unwrap(), c);
        }
        assert!("sometimes".parse::<ConstraintSet>().is_err());
    }

    #[test]
    fn feasibility_examples() {
        let table = EigenvalueMatrix::from_columns(&[vec![-1.0, -1.0, 1.0, 1.0], vec![-1.0, 1.0, -1.0, 1.0]]).unwrap();
        let targets = [
            Target::Marginal { column: 0, value: 1.0, probability: 0.25 },
            Target::Marginal { column: 1, value: 1.0, probability: 0.0 },
        ];
        let f = hilbert_feasibility(&table, &targets).unwrap();
        assert!(f.feasible);
        let p = f.certificate.unwrap();
        for (a, b) in p.iter().zip([0.75, 0.0, 0.25, 0.0]) {
            assert!((a - b).abs() <= 1e-12);
        }

        let clash = [
            Target::Joint { outcome: vec![-1.0, -1.0], probability: 1.0 },
            Target::Joint { outcome: vec![1.0, 1.0], probability: 1.0 },
        ];
        assert!(!hilbert_feasibility(&table, &clash).unwrap().feasible);

        let f = hilbert_feasibility(&table, &[]).unwrap();
        assert_eq!(f.certificate, Some(vec![0.25; 4]));

        let bad = [Target::Marginal { column: 5, value: 1.0, probability: 0.5 }];
        assert!(matches!(hilbert_feasibility(&table, &bad), Err(Error::Constraint(_))));
        let bad = [Target::Joint { outcome: vec![1.0], probability: 0.5 }];
        assert!(hilbert_feasibility(&table, &bad).is_err());
        let bad = [Target::Marginal { column: 0, value: 1.0, probability: 1.5 }];
        assert!(hilbert_feasibility(&table, &bad).is_err());
    }
}
