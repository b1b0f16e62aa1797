//! Scenario files: a JSON description of a space, a state, an instrument and
//! run options.
//!
//! ```json
//! {
//!   "version": "v1",
//!   "name": "example",
//!   "signature": [1, 1, -1],
//!   "state": [1.0, [0.5, 0.5], 0.7071067811865476],
//!   "eigenvalue_matrix": [[1, 1, 1], [1, 1, 1], [1, 1, -1]],
//!   "isometry": null,
//!   "column_labels": ["X", "Y", "Z"],
//!   "observable": null,
//!   "notes": [],
//!   "options": { "tol": 1e-9, "norm_cap": 2.0, "constraints": "none" }
//! }
//! ```
//!
//! Complex entries are `[re, im]` pairs; plain numbers are real. The
//! signature must already be sorted (`+1` block first).

use serde::{Deserialize, Serialize};

use crate::bell::ConstraintSet;
use crate::error::{Error, Result};
use crate::geometry::{GeometricSpace, Isometry, StateVector, EPS_STATE};
use crate::linalg::{ComplexMatrix, C64};
use crate::measurement::{EigenvalueMatrix, Instrument};

pub const SCHEMA_VERSION: &str = "v1";

/// Names accepted by [`fixture`].
pub const FIXTURES: [&str; 6] = ["feynman", "feynman-displayed", "m5-bell", "m3-witness", "m2-boost", "rotation"];

/// A scalar that is either a plain real or an `[re, im]` pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Number {
    Real(f64),
    Complex([f64; 2]),
}

impl Number {
    pub fn value(self) -> C64 {
        match self {
            Number::Real(re) => C64::new(re, 0.0),
            Number::Complex([re, im]) => C64::new(re, im),
        }
    }

    /// Always the pair form, so echoed scenarios have one spelling.
    pub fn canonical(z: C64) -> Self {
        Number::Complex([z.re, z.im])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    /// Tolerance for the state and isometry checks.
    pub tol: f64,
    /// Outcome rows closer than this (max-norm) share an outcome; 0 is exact.
    pub group_tol: f64,
    /// Upper bound on `Σ |xᵢ|²` during the witness search.
    pub norm_cap: f64,
    pub constraints: ConstraintSet,
    pub steps: usize,
    pub window: usize,
    pub conv_tol: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            tol: EPS_STATE,
            group_tol: 0.0,
            norm_cap: 2.0,
            constraints: ConstraintSet::None,
            steps: 1000,
            window: 100,
            conv_tol: 1e-6,
        }
    }
}

/// The on-disk form, before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: String,
    #[serde(default)]
    pub name: String,
    pub signature: Vec<i64>,
    pub state: Vec<Number>,
    pub eigenvalue_matrix: Vec<Vec<f64>>,
    #[serde(default)]
    pub isometry: Option<Vec<Vec<Number>>>,
    #[serde(default)]
    pub column_labels: Option<Vec<String>>,
    /// Hermitian matrix for `evolve` and `spectral`; defaults to the
    /// metric-folded observable of the first column.
    #[serde(default)]
    pub observable: Option<Vec<Vec<Number>>>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub options: Options,
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub state: StateVector,
    pub eigenvalues: EigenvalueMatrix,
    pub isometry: Isometry,
    /// False when the file omitted the isometry and the identity was used.
    pub explicit_isometry: bool,
    pub column_labels: Vec<String>,
    pub observable: Option<ComplexMatrix>,
    pub notes: Vec<String>,
    pub options: Options,
}

fn scenario_error(code: &'static str, message: impl Into<String>) -> Error {
    Error::Scenario {
        code,
        message: message.into(),
    }
}

fn matrix_from(rows: &[Vec<Number>], what: &str, n: usize) -> Result<ComplexMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(scenario_error("shape", format!("{what} must be {n}x{n}")));
    }
    let data = rows.iter().flatten().map(|z| z.value()).collect();
    ComplexMatrix::new(n, n, data)
}

fn matrix_to(m: &ComplexMatrix) -> Vec<Vec<Number>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(Number::canonical).collect())
        .collect()
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        let code = match e.classify() {
            Category::Data => "schema",
            Category::Syntax | Category::Eof | Category::Io => "syntax",
        };
        let message = e.to_string();
        // serde_json appends " at line L column C"; the position is reported separately
        let message = match message.rfind(" at line ") {
            Some(cut) => message[..cut].to_string(),
            None => message,
        };
        Error::Parse {
            code,
            line: e.line(),
            column: e.column(),
            message,
        }
    })?;
    Scenario::from_file(file)
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        if file.version != SCHEMA_VERSION {
            return Err(scenario_error(
                "version",
                format!("unsupported version '{}' (expected '{SCHEMA_VERSION}')", file.version),
            ));
        }
        if let Some(v) = file.signature.iter().find(|&&v| v != 1 && v != -1) {
            return Err(scenario_error("schema", format!("signature entries must be +1 or -1, got {v}")));
        }
        if file.signature.is_empty() {
            return Err(scenario_error("shape", "signature is empty"));
        }
        if file.signature.windows(2).any(|w| w[0] < w[1]) {
            return Err(scenario_error(
                "unsorted-signature",
                "signature must list all +1 entries before the -1 entries",
            ));
        }
        let space = GeometricSpace::from_ints(&file.signature)?;
        let n = space.dim();

        if file.state.len() != n {
            return Err(scenario_error(
                "shape",
                format!("state has {} entries, signature has {n}", file.state.len()),
            ));
        }
        let state = StateVector::new(file.state.iter().map(|z| z.value()).collect(), &space)?;

        if file.eigenvalue_matrix.len() != n {
            return Err(scenario_error(
                "shape",
                format!("eigenvalue_matrix has {} rows, signature has {n}", file.eigenvalue_matrix.len()),
            ));
        }
        let k = file.eigenvalue_matrix[0].len();
        if k == 0 || file.eigenvalue_matrix.iter().any(|r| r.len() != k) {
            return Err(scenario_error("shape", "eigenvalue_matrix rows must share a nonzero length"));
        }
        let eigenvalues = EigenvalueMatrix::from_rows(&file.eigenvalue_matrix)
            .map_err(|e| scenario_error("schema", e.to_string()))?;

        let opts = file.options;
        if !(opts.tol >= 0.0 && opts.group_tol >= 0.0 && opts.conv_tol >= 0.0) {
            return Err(scenario_error("schema", "tolerances must be nonnegative"));
        }
        if !(opts.norm_cap >= 1.0) {
            return Err(scenario_error("schema", "norm_cap must be at least 1"));
        }

        let (isometry, explicit_isometry) = match &file.isometry {
            None => (Isometry::identity(&space), false),
            Some(rows) => {
                let m = matrix_from(rows, "isometry", n)?;
                let iso = Isometry::new(m, &space, opts.tol)
                    .map_err(|e| scenario_error("non-isometry", e.to_string()))?;
                (iso, true)
            }
        };

        let column_labels = match file.column_labels {
            Some(labels) if labels.len() != k => {
                return Err(scenario_error(
                    "shape",
                    format!("{} column labels for {k} columns", labels.len()),
                ))
            }
            Some(labels) => labels,
            None => default_labels(k),
        };

        let observable = match &file.observable {
            None => None,
            Some(rows) => {
                let m = matrix_from(rows, "observable", n)?;
                if !m.is_hermitian(crate::evolution::EPS_HERMITIAN)? {
                    return Err(scenario_error("non-hermitian", "observable is not hermitian"));
                }
                Some(m)
            }
        };

        if !state.is_state(opts.tol) {
            return Err(scenario_error(
                "non-state",
                format!("state has quadric norm {} (expected 1 within {:e})", state.quadric_norm(), opts.tol),
            ));
        }

        Ok(Self {
            name: file.name,
            state,
            eigenvalues,
            isometry,
            explicit_isometry,
            column_labels,
            observable,
            notes: file.notes,
            options: opts,
        })
    }

    pub fn space(&self) -> &GeometricSpace {
        self.state.space()
    }

    pub fn instrument(&self) -> Result<Instrument> {
        Instrument::new(self.eigenvalues.clone(), self.isometry.clone())
    }

    /// Canonical on-disk form; parsing it yields an equal scenario.
    pub fn to_file(&self) -> ScenarioFile {
        ScenarioFile {
            version: SCHEMA_VERSION.to_string(),
            name: self.name.clone(),
            signature: self.space().signature_ints(),
            state: self.state.coords().iter().copied().map(Number::canonical).collect(),
            eigenvalue_matrix: self.eigenvalues.to_rows(),
            isometry: self.explicit_isometry.then(|| matrix_to(self.isometry.matrix())),
            column_labels: Some(self.column_labels.clone()),
            observable: self.observable.as_ref().map(matrix_to),
            notes: self.notes.clone(),
            options: self.options,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scenario serializes")
    }
}

fn default_labels(k: usize) -> Vec<String> {
    const NAMES: [&str; 3] = ["X", "Y", "Z"];
    if k <= 3 {
        NAMES[..k].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=k).map(|j| format!("W{j}")).collect()
    }
}

fn reals(v: &[f64]) -> Vec<Number> {
    v.iter().map(|&x| Number::Real(x)).collect()
}

fn columns_to_rows(columns: &[&[f64]]) -> Vec<Vec<f64>> {
    let n = columns[0].len();
    (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect()
}

fn labels(names: &[&str]) -> Option<Vec<String>> {
    Some(names.iter().map(|s| s.to_string()).collect())
}

/// Built-in scenarios whose irrational entries are computed in double precision.
pub fn fixture(name: &str) -> Result<Scenario> {
    let file = match name {
        "feynman" | "feynman-displayed" => {
            let displayed = name == "feynman-displayed";
            let x: &[f64] = if displayed { &[-1.0, -1.0, -1.0, 1.0] } else { &[-1.0, -1.0, 1.0, 1.0] };
            let y: &[f64] = &[-1.0, 1.0, -1.0, 1.0];
            let notes = if displayed {
                vec![
                    "eigenvalue matrix exactly as displayed next to the state; its X column differs from the ±1 table in row 3".into(),
                    "with this matrix the X marginal is itself signed: weight -1/8 at X = +1".into(),
                ]
            } else {
                vec![
                    "four ground states with X = (-1,-1,+1,+1) and Y = (-1,+1,-1,+1)".into(),
                    "published: E(X) = -1/2, E(Y) = -1, Pr{X=+1} = 1/4, Pr{Y=+1} = 0".into(),
                    "the joint density carries weight -1/8 at (+1,+1); only the marginals are nonnegative".into(),
                    "Hilbert rescaling uses |s|_2^2 = 5/4; the published factor sqrt(5)/2 does not reproduce the expectations".into(),
                ]
            };
            ScenarioFile {
                version: SCHEMA_VERSION.into(),
                name: name.into(),
                signature: vec![1, 1, 1, -1],
                state: reals(&[(5.0f64 / 8.0).sqrt(), (1.0f64 / 8.0).sqrt(), (3.0f64 / 8.0).sqrt(), (1.0f64 / 8.0).sqrt()]),
                eigenvalue_matrix: columns_to_rows(&[x, y]),
                isometry: None,
                column_labels: labels(&["X", "Y"]),
                observable: None,
                notes,
                options: Options::default(),
            }
        }
        "m5-bell" => {
            let c = 3.0f64.sqrt() / 3.0;
            ScenarioFile {
                version: SCHEMA_VERSION.into(),
                name: name.into(),
                signature: vec![1, 1, 1, 1, -1],
                state: reals(&[c; 5]),
                eigenvalue_matrix: columns_to_rows(&[
                    &[-1.0, 1.0, 1.0, 1.0, 1.0],
                    &[-1.0, 1.0, -1.0, -1.0, 1.0],
                    &[-1.0, -1.0, -1.0, 1.0, 1.0],
                ]),
                isometry: None,
                column_labels: labels(&["A", "B", "C"]),
                observable: None,
                notes: vec![
                    "published: E(XY) = -1/3, E(XZ) = +1, E(YZ) = -1, Bell bound 1".into(),
                    "erratum: direct summation gives E(XZ) = E(YZ) = -1/3, so the printed +1 and -1 do not reproduce and the inequality holds".into(),
                    "erratum: the rescaled pair expectations are 5/9 each, not the printed 25/9; 25/9 is the rescaled bound".into(),
                ],
                options: Options {
                    norm_cap: 5.0 / 3.0,
                    ..Options::default()
                },
            }
        }
        "m3-witness" => {
            let h = 0.5f64.sqrt();
            ScenarioFile {
                version: SCHEMA_VERSION.into(),
                name: name.into(),
                signature: vec![1, 1, -1],
                state: reals(&[1.0, h, h]),
                eigenvalue_matrix: vec![vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0, -1.0]],
                isometry: None,
                column_labels: labels(&["X", "Y", "Z"]),
                observable: None,
                notes: vec![
                    "weights |s|^2 = (1, 1/2, 1/2): E(XY) = 1, E(YZ) = E(XZ) = 2, lhs 3 against bound 1".into(),
                ],
                options: Options::default(),
            }
        }
        "m2-boost" => {
            let (ch, sh) = (0.5f64.cosh(), 0.5f64.sinh());
            ScenarioFile {
                version: SCHEMA_VERSION.into(),
                name: name.into(),
                signature: vec![1, -1],
                state: reals(&[1.0, 0.0]),
                eigenvalue_matrix: vec![vec![1.0], vec![-1.0]],
                isometry: Some(vec![reals(&[ch, sh]), reals(&[sh, ch])]),
                column_labels: labels(&["X"]),
                observable: None,
                notes: vec!["Lorentz boost with rapidity 0.5; its powers are unbounded in the euclidean norm".into()],
                options: Options::default(),
            }
        }
        "rotation" => ScenarioFile {
            version: SCHEMA_VERSION.into(),
            name: name.into(),
            signature: vec![1, 1],
            state: reals(&[1.0, 0.0]),
            eigenvalue_matrix: vec![vec![1.0], vec![-1.0]],
            isometry: Some(vec![reals(&[0.0, -1.0]), reals(&[1.0, 0.0])]),
            column_labels: labels(&["X"]),
            observable: None,
            notes: vec!["quarter-turn rotation: the measured value alternates between +1 and -1".into()],
            options: Options {
                steps: 10_000,
                conv_tol: 1e-3,
                ..Options::default()
            },
        },
        other => {
            return Err(scenario_error(
                "unknown-fixture",
                format!("unknown fixture '{other}' (available: {})", FIXTURES.join(", ")),
            ))
        }
    };
    Scenario::from_file(file)
}
