//! Command execution over validated scenarios and the resulting reports.
//!
//! Every report echoes the scenario it was computed from (with command-line
//! overrides applied), so re-running the echo reproduces the report exactly.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::Serialize;

use crate::bell::{
    self, bell_check, hilbert_rescaled_check, violation_search, BellReport, ConstraintSet, RescaledBell, Target,
    Witness, EPS_BELL,
};
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionTrace, EvolveOptions};
use crate::geometry::GeometricSpace;
use crate::linalg::{commute, spectral_decompose, ComplexMatrix, EPS_SPECTRAL};
use crate::lp::EPS_LP;
use crate::measurement::{density_grouped, reinterpret, EigenvalueMatrix, Instrument, SignedDensity, EPS_DENSITY};
use crate::scenario::{fixture, Options, Scenario, ScenarioFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Measure,
    Bell,
    Search,
    Evolve,
    Spectral,
    VerifyPaper,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Measure,
        Command::Bell,
        Command::Search,
        Command::Evolve,
        Command::Spectral,
        Command::VerifyPaper,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Command::Measure => "measure",
            Command::Bell => "bell",
            Command::Search => "search",
            Command::Evolve => "evolve",
            Command::Spectral => "spectral",
            Command::VerifyPaper => "verify-paper",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown command '{s}'")))
    }
}

/// Tolerances in force while the report was computed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub tol: f64,
    pub group_tol: f64,
    pub eps_density: f64,
    pub eps_bell: f64,
    pub eps_spectral: f64,
    pub eps_lp: f64,
}

impl Diagnostics {
    fn new(options: &Options) -> Self {
        Self {
            tol: options.tol,
            group_tol: options.group_tol,
            eps_density: EPS_DENSITY,
            eps_bell: EPS_BELL,
            eps_spectral: EPS_SPECTRAL,
            eps_lp: EPS_LP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: Command,
    /// Absent only for `verify-paper`, which runs its own fixtures.
    pub scenario: Option<ScenarioFile>,
    pub result: Outcome,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Outcome {
    Measure(MeasureReport),
    Bell(BellSection),
    Search(SearchReport),
    Evolve(EvolveReport),
    Spectral(SpectralReport),
    Verify(VerifyReport),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReinterpretationBlock {
    pub w_x: EigenvalueMatrix,
    pub p: Vec<f64>,
    pub hilbert_norm_sqr: f64,
    pub expected_value: Vec<f64>,
    /// `max_j |Σᵢ W^x_ij pᵢ − h_j(x)|`.
    pub identity_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub column_labels: Vec<String>,
    pub quadric_norm: f64,
    pub measured: Vec<f64>,
    pub density: SignedDensity,
    pub marginals: Vec<SignedDensity>,
    pub joint_psd: bool,
    pub marginal_psd: Vec<bool>,
    pub bell: Option<BellReport>,
    pub reinterpretation: ReinterpretationBlock,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BellSection {
    pub column_labels: Vec<String>,
    pub report: BellReport,
    pub hilbert_rescaled: RescaledBell,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub signature: Vec<i64>,
    pub norm_cap: f64,
    pub constraints: ConstraintSet,
    pub count: usize,
    pub witnesses: Vec<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolveReport {
    /// `scenario` or `folded-column-1`.
    pub observable_source: String,
    pub observable: Vec<Vec<[f64; 2]>>,
    pub steps: usize,
    pub window: usize,
    pub conv_tol: f64,
    pub trace: EvolutionTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralEntry {
    pub label: String,
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, entries `[re, im]`.
    pub eigenvectors: Vec<Vec<[f64; 2]>>,
    pub reconstruction_residual: f64,
    pub unitary_residual: f64,
    pub sweeps: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralReport {
    pub entries: Vec<SpectralEntry>,
    /// Whether the column observables pairwise commute within `eps_spectral`.
    pub columns_commute: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PAPER-MATCH")]
    PaperMatch,
    #[serde(rename = "DERIVED-MATCH")]
    DerivedMatch,
    #[serde(rename = "PROPERTY-PASS")]
    PropertyPass,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::PaperMatch => "PAPER-MATCH",
            Status::DerivedMatch => "DERIVED-MATCH",
            Status::PropertyPass => "PROPERTY-PASS",
            Status::Fail => "FAIL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Flag(bool),
    Vector(Vec<f64>),
}

impl Value {
    fn distance(&self, other: &Value) -> f64 {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => (a - b).abs(),
            (Value::Flag(a), Value::Flag(b)) => {
                if a == b {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            (Value::Vector(a), Value::Vector(b)) if a.len() == b.len() => {
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            }
            _ => f64::INFINITY,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{v:.12}"),
            Value::Flag(b) => write!(f, "{b}"),
            Value::Vector(v) => {
                let parts: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
                write!(f, "({})", parts.join(", "))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: u8,
    pub quantity: String,
    pub fixture: String,
    pub expected: Value,
    pub computed: Value,
    pub tol: f64,
    pub status: Status,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
    pub all_pass: bool,
}

/// Applies CLI-style overrides; the result is what the report echoes.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub norm_cap: Option<f64>,
    pub constraints: Option<ConstraintSet>,
    pub steps: Option<usize>,
}

impl Overrides {
    /// Re-validates the scenario under the overridden options.
    pub fn apply(&self, scenario: &Scenario) -> Result<Scenario> {
        let mut file = scenario.to_file();
        let o = &mut file.options;
        if let Some(v) = self.tol {
            o.tol = v;
        }
        if let Some(v) = self.norm_cap {
            o.norm_cap = v;
        }
        if let Some(v) = self.constraints {
            o.constraints = v;
        }
        if let Some(v) = self.steps {
            o.steps = v;
        }
        Scenario::from_file(file)
    }
}

pub fn run(scenario: &Scenario, command: Command) -> Result<Report> {
    let result = match command {
        Command::Measure => Outcome::Measure(measure(scenario)?),
        Command::Bell => Outcome::Bell(bell_section(scenario)?),
        Command::Search => Outcome::Search(search(scenario)?),
        Command::Evolve => Outcome::Evolve(evolve_report(scenario)?),
        Command::Spectral => Outcome::Spectral(spectral(scenario)?),
        Command::VerifyPaper => return verify_paper(),
    };
    Ok(Report {
        command,
        scenario: Some(scenario.to_file()),
        result,
        diagnostics: Diagnostics::new(&scenario.options),
    })
}

fn measure(s: &Scenario) -> Result<MeasureReport> {
    let instrument = s.instrument()?;
    let tx = s.isometry.apply(&s.state)?;
    let measured = instrument.measure(&s.state)?;
    let density = density_grouped(&tx, &s.eigenvalues, s.options.group_tol)?;
    let marginals = (0..s.eigenvalues.cols())
        .map(|j| density.marginal(j))
        .collect::<Result<Vec<_>>>()?;
    let bell = if s.eigenvalues.cols() == 3 {
        Some(bell_check(&s.eigenvalues, &s.state, &s.isometry)?)
    } else {
        None
    };
    let re = reinterpret(&s.eigenvalues, &tx)?;
    let expected_value = re.expected_value();
    let identity_residual = expected_value
        .iter()
        .zip(&measured)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(MeasureReport {
        column_labels: s.column_labels.clone(),
        quadric_norm: s.state.quadric_norm(),
        measured,
        joint_psd: density.is_nonnegative(EPS_DENSITY),
        marginal_psd: marginals.iter().map(|m| m.is_nonnegative(EPS_DENSITY)).collect(),
        density,
        marginals,
        bell,
        reinterpretation: ReinterpretationBlock {
            w_x: re.w_x,
            p: re.p,
            hilbert_norm_sqr: re.hilbert_norm_sqr,
            expected_value,
            identity_residual,
        },
        notes: s.notes.clone(),
    })
}

fn bell_section(s: &Scenario) -> Result<BellSection> {
    let report = bell_check(&s.eigenvalues, &s.state, &s.isometry)?;
    let tx = s.isometry.apply(&s.state)?;
    Ok(BellSection {
        column_labels: s.column_labels.clone(),
        report,
        hilbert_rescaled: hilbert_rescaled_check(&s.eigenvalues, &tx)?,
        notes: s.notes.clone(),
    })
}

fn search(s: &Scenario) -> Result<SearchReport> {
    let witnesses = violation_search(s.space(), s.options.norm_cap, s.options.constraints)?;
    Ok(SearchReport {
        signature: s.space().signature_ints(),
        norm_cap: s.options.norm_cap,
        constraints: s.options.constraints,
        count: witnesses.len(),
        witnesses,
    })
}

fn pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn evolve_report(s: &Scenario) -> Result<EvolveReport> {
    let (source, observable) = match &s.observable {
        Some(a) => ("scenario", a.clone()),
        None => (
            "folded-column-1",
            Instrument::diagonal(s.eigenvalues.clone(), s.space())?.observable_matrix(0)?,
        ),
    };
    let opts = EvolveOptions {
        steps: s.options.steps,
        window: s.options.window,
        tol: s.options.conv_tol,
        heisenberg_check: true,
    };
    let trace = evolve(&observable, &s.isometry, &s.state, &opts)?;
    Ok(EvolveReport {
        observable_source: source.into(),
        observable: pairs(&observable),
        steps: opts.steps,
        window: opts.window,
        conv_tol: opts.tol,
        trace,
    })
}

fn spectral(s: &Scenario) -> Result<SpectralReport> {
    let instrument = s.instrument()?;
    let mut matrices: Vec<(String, ComplexMatrix)> = s
        .column_labels
        .iter()
        .enumerate()
        .map(|(j, label)| Ok((label.clone(), instrument.observable_matrix(j)?)))
        .collect::<Result<_>>()?;
    let k = matrices.len();
    let mut columns_commute = true;
    for a in 0..k {
        for b in a + 1..k {
            columns_commute &= commute(&matrices[a].1, &matrices[b].1, EPS_SPECTRAL)?;
        }
    }
    if let Some(a) = &s.observable {
        matrices.push(("observable".into(), a.clone()));
    }
    let entries = matrices
        .into_iter()
        .map(|(label, m)| {
            let dec = spectral_decompose(&m, EPS_SPECTRAL)?;
            Ok(SpectralEntry {
                label,
                reconstruction_residual: dec.reconstruct().sub(&m)?.max_norm(),
                unitary_residual: dec.eigenvectors.unitary_residual()?,
                eigenvectors: pairs(&dec.eigenvectors),
                eigenvalues: dec.eigenvalues,
                sweeps: dec.sweeps,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SpectralReport {
        entries,
        columns_commute,
    })
}

#[derive(Clone, Copy)]
enum Kind {
    Published,
    Derived,
    Property,
}

struct Table {
    rows: Vec<CheckRow>,
}

impl Table {
    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, check: u8, kind: Kind, fixture: &str, quantity: &str, expected: Value, computed: Value, tol: f64, note: &str) {
        let status = if expected.distance(&computed) <= tol {
            match kind {
                Kind::Published => Status::PaperMatch,
                Kind::Derived => Status::DerivedMatch,
                Kind::Property => Status::PropertyPass,
            }
        } else {
            Status::Fail
        };
        self.rows.push(CheckRow {
            check,
            quantity: quantity.into(),
            fixture: fixture.into(),
            expected,
            computed,
            tol,
            status,
            note: note.into(),
        });
    }
}

fn num(v: f64) -> Value {
    Value::Number(v)
}

fn flag(b: bool) -> Value {
    Value::Flag(b)
}

const EXACT: f64 = 1e-12;

/// Reproduces the reference examples and tabulates each quantity against its
/// stored expectation.
pub fn verify_paper() -> Result<Report> {
    let mut t = Table { rows: Vec::new() };

    // 1: Feynman expectations and marginals
    let feynman = fixture("feynman")?;
    let m = measure(&feynman)?;
    let fy = "feynman";
    t.push(1, Kind::Published, fy, "E(X)", num(-0.5), num(m.measured[0]), EXACT, "");
    t.push(1, Kind::Published, fy, "E(Y)", num(-1.0), num(m.measured[1]), EXACT, "");
    let weight = |d: &SignedDensity, v: f64| d.weight_of(&[v]).unwrap_or(0.0);
    t.push(1, Kind::Published, fy, "Pr{X=-1}", num(0.75), num(weight(&m.marginals[0], -1.0)), EXACT, "");
    t.push(1, Kind::Published, fy, "Pr{X=+1}", num(0.25), num(weight(&m.marginals[0], 1.0)), EXACT, "");
    t.push(1, Kind::Published, fy, "Pr{Y=-1}", num(1.0), num(weight(&m.marginals[1], -1.0)), EXACT, "");
    t.push(1, Kind::Published, fy, "Pr{Y=+1}", num(0.0), num(weight(&m.marginals[1], 1.0)), EXACT, "");

    // 2: the signed joint density
    let joint = m.density.weight_of(&[1.0, 1.0]).unwrap_or(f64::NAN);
    let oracle: f64 = feynman
        .state
        .coords()
        .iter()
        .enumerate()
        .filter(|&(i, _)| feynman.eigenvalues.row(i) == [1.0, 1.0])
        .map(|(i, z)| feynman.space().g(i) * z.norm_sqr())
        .sum();
    t.push(2, Kind::Derived, fy, "q(+1,+1)", num(oracle), num(joint), EXACT, "published as positive semidefinite; the joint weight is negative");
    t.push(2, Kind::Derived, fy, "joint PSD", flag(false), flag(m.joint_psd), 0.0, "only the marginals admit a probability reading");
    t.push(2, Kind::Published, fy, "marginal PSD X", flag(true), flag(m.marginal_psd[0]), 0.0, "");
    t.push(2, Kind::Published, fy, "marginal PSD Y", flag(true), flag(m.marginal_psd[1]), 0.0, "");
    let targets = [
        Target::Marginal { column: 0, value: 1.0, probability: 0.25 },
        Target::Marginal { column: 1, value: 1.0, probability: 0.0 },
    ];
    let feasible = bell::hilbert_feasibility(&feynman.eigenvalues, &targets)?;
    t.push(2, Kind::Derived, fy, "Hilbert-feasible marginals", flag(true), flag(feasible.feasible), 0.0, "published: no Hilbert state; a 4-state probability vector (3/4, 0, 1/4, 0) exists");

    // 3: M5 Bell check
    let m5 = fixture("m5-bell")?;
    let b = bell_section(&m5)?;
    let m5n = "m5-bell";
    let third = -1.0 / 3.0;
    t.push(3, Kind::Published, m5n, "E(XY)", num(third), num(b.report.exy), EXACT, "");
    t.push(3, Kind::Derived, m5n, "E(YZ)", num(third), num(b.report.eyz), EXACT, "erratum: published -1");
    t.push(3, Kind::Derived, m5n, "E(XZ)", num(third), num(b.report.exz), EXACT, "erratum: published +1");
    t.push(3, Kind::Published, m5n, "Bell bound", num(1.0), num(b.report.bound), EXACT, "");
    t.push(3, Kind::Derived, m5n, "satisfied", flag(true), flag(b.report.satisfied), 0.0, "erratum: published lhs 5/3 violates; computed lhs is -1/3");

    // 4: Hilbert rescaling
    let r = &b.hilbert_rescaled;
    let five_thirds = 5.0 / 3.0;
    t.push(4, Kind::Published, m5n, "|s|_2^2", num(five_thirds), num(r.hilbert_norm_sqr), EXACT, "");
    let a_col = r.rescaled.column(0)?;
    t.push(
        4,
        Kind::Published,
        m5n,
        "W^s column A",
        Value::Vector(vec![-five_thirds, five_thirds, five_thirds, five_thirds, -five_thirds]),
        Value::Vector(a_col),
        EXACT,
        "",
    );
    for (label, v) in [("E(X''Y'')", r.report.exy), ("E(Y''Z'')", r.report.eyz), ("E(X''Z'')", r.report.exz)] {
        t.push(4, Kind::Derived, m5n, label, num(5.0 / 9.0), num(v), EXACT, "erratum: published 25/9, which is the rescaled bound");
    }
    t.push(4, Kind::Published, m5n, "rescaled bound", num(25.0 / 9.0), num(r.report.bound), EXACT, "");
    t.push(4, Kind::Published, m5n, "rescaled satisfied", flag(true), flag(r.report.satisfied), 0.0, "");
    let fr = reinterpret(&feynman.eigenvalues, &feynman.state)?.hilbert_norm_sqr;
    t.push(4, Kind::Derived, fy, "|s|_2^2", num(1.25), num(fr), EXACT, "erratum: published scale sqrt(5)/2");

    // 5: Minkowski witness
    let m3 = GeometricSpace::minkowski(3);
    let found = violation_search(&m3, 2.0, ConstraintSet::None)?;
    let top = found.first().map_or(f64::NAN, |w| w.report.lhs);
    t.push(5, Kind::Derived, "search M3", "top lhs", num(3.0), num(top), EPS_BELL, "bound 1");
    let w3 = fixture("m3-witness")?;
    let b3 = bell_check(&w3.eigenvalues, &w3.state, &w3.isometry)?;
    t.push(5, Kind::Derived, "m3-witness", "lhs", num(3.0), num(b3.lhs), EXACT, "");
    t.push(5, Kind::Derived, "m3-witness", "satisfied", flag(false), flag(b3.satisfied), 0.0, "");
    let mut recheck_ok = !found.is_empty();
    for w in &found {
        let again = w.recheck()?;
        recheck_ok &= (again.lhs - w.report.lhs).abs() <= EPS_BELL && !again.satisfied;
    }
    t.push(5, Kind::Property, "search M3", "witnesses re-verify by density summation", flag(true), flag(recheck_ok), 0.0, "");
    let mut hilbert_clean = true;
    for n in 1..=4 {
        hilbert_clean &= violation_search(&GeometricSpace::hilbert(n), 2.0, ConstraintSet::None)?.is_empty();
    }
    t.push(5, Kind::Property, "search H1..H4", "no Hilbert witnesses", flag(true), flag(hilbert_clean), 0.0, "");

    let all_pass = t.rows.iter().all(|r| r.status != Status::Fail);
    Ok(Report {
        command: Command::VerifyPaper,
        scenario: None,
        result: Outcome::Verify(VerifyReport { rows: t.rows, all_pass }),
        diagnostics: Diagnostics::new(&Options::default()),
    })
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn verify(&self) -> Option<&VerifyReport> {
        match &self.result {
            Outcome::Verify(v) => Some(v),
            _ => None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(s) = &self.scenario {
            let name = if s.name.is_empty() { "(unnamed)" } else { &s.name };
            let _ = writeln!(out, "{} :: {}  signature {:?}", self.command, name, s.signature);
        } else {
            let _ = writeln!(out, "{}", self.command);
        }
        match &self.result {
            Outcome::Measure(m) => text_measure(&mut out, m),
            Outcome::Bell(b) => text_bell(&mut out, b),
            Outcome::Search(s) => text_search(&mut out, s),
            Outcome::Evolve(e) => text_evolve(&mut out, e),
            Outcome::Spectral(s) => text_spectral(&mut out, s),
            Outcome::Verify(v) => text_verify(&mut out, v),
        }
        out
    }
}

fn fmt_tuple(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:+}")).collect();
    format!("({})", parts.join(","))
}

fn text_bell_report(out: &mut String, r: &BellReport) {
    let _ = writeln!(out, "  E(XY) = {:.12}  E(YZ) = {:.12}  E(XZ) = {:.12}", r.exy, r.eyz, r.exz);
    let _ = writeln!(
        out,
        "  |E(XY)-E(YZ)|+E(XZ) = {:.12}  bound = {:.12}  satisfied = {}",
        r.lhs, r.bound, r.satisfied
    );
    let _ = writeln!(
        out,
        "  nonnegative: triple {}  pairs (XY,YZ,XZ) {:?}  marginals {:?}",
        r.triple_density_nonneg, r.pairwise_nonneg, r.marginals_nonneg
    );
}

fn text_notes(out: &mut String, notes: &[String]) {
    for n in notes {
        let _ = writeln!(out, "  note: {n}");
    }
}

fn text_measure(out: &mut String, m: &MeasureReport) {
    let _ = writeln!(out, "quadric norm {:.12}", m.quadric_norm);
    for (label, v) in m.column_labels.iter().zip(&m.measured) {
        let _ = writeln!(out, "  E({label}) = {v:.12}");
    }
    let _ = writeln!(out, "joint density (PSD: {})", m.joint_psd);
    for (w, q) in m.density.iter() {
        let _ = writeln!(out, "  {} : {q:.12}", fmt_tuple(w));
    }
    for ((label, d), psd) in m.column_labels.iter().zip(&m.marginals).zip(&m.marginal_psd) {
        let _ = writeln!(out, "marginal {label} (PSD: {psd})");
        for (w, q) in d.iter() {
            let _ = writeln!(out, "  {} : {q:.12}", fmt_tuple(w));
        }
    }
    if let Some(b) = &m.bell {
        let _ = writeln!(out, "bell");
        text_bell_report(out, b);
    }
    let r = &m.reinterpretation;
    let _ = writeln!(
        out,
        "reinterpretation: |x|_2^2 = {:.12}, identity residual {:.3e}",
        r.hilbert_norm_sqr, r.identity_residual
    );
    text_notes(out, &m.notes);
}

fn text_bell(out: &mut String, b: &BellSection) {
    let _ = writeln!(out, "columns {:?}", b.column_labels);
    text_bell_report(out, &b.report);
    let _ = writeln!(out, "hilbert rescaling (|x|_2^2 = {:.12})", b.hilbert_rescaled.hilbert_norm_sqr);
    text_bell_report(out, &b.hilbert_rescaled.report);
    text_notes(out, &b.notes);
}

fn text_search(out: &mut String, s: &SearchReport) {
    let _ = writeln!(
        out,
        "norm cap {}  constraints {}  witnesses {}",
        s.norm_cap, s.constraints, s.count
    );
    for w in s.witnesses.iter().take(10) {
        let _ = writeln!(
            out,
            "  lhs {:.12}  bound {}  {}  weights {:?}",
            w.report.lhs, w.report.bound, w.pattern, w.weights
        );
    }
    if s.count > 10 {
        let _ = writeln!(out, "  ... {} more (use --format json)", s.count - 10);
    }
}

fn text_evolve(out: &mut String, e: &EvolveReport) {
    let t = &e.trace;
    let _ = writeln!(out, "observable {}  steps {}  window {}  tol {:e}", e.observable_source, e.steps, e.window, e.conv_tol);
    for (i, v) in t.values.iter().take(6).enumerate() {
        let _ = writeln!(out, "  phi_{i} = {v:.12}");
    }
    let _ = writeln!(
        out,
        "recorded {} values  converged {}  limit estimate {:.12}  diverged {}",
        t.values.len(),
        t.converged,
        t.limit_estimate,
        t.diverged
    );
    if let Some(d) = t.heisenberg_max_deviation {
        let _ = writeln!(out, "heisenberg cross-check deviation {d:.3e}");
    }
}

fn text_spectral(out: &mut String, s: &SpectralReport) {
    for e in &s.entries {
        let _ = writeln!(
            out,
            "{}: eigenvalues {:?}  residual {:.3e}  unitary residual {:.3e}  sweeps {}",
            e.label, e.eigenvalues, e.reconstruction_residual, e.unitary_residual, e.sweeps
        );
    }
    let _ = writeln!(out, "columns commute: {}", s.columns_commute);
}

fn text_verify(out: &mut String, v: &VerifyReport) {
    let _ = writeln!(
        out,
        "{:<5} {:<14} {:<13} {:<42} {:>20} {:>20}  note",
        "check", "status", "fixture", "quantity", "expected", "computed"
    );
    for r in &v.rows {
        let _ = writeln!(
            out,
            "{:<5} {:<14} {:<13} {:<42} {:>20} {:>20}  {}",
            r.check,
            r.status.as_str(),
            r.fixture,
            r.quantity,
            r.expected.to_string(),
            r.computed.to_string(),
            r.note
        );
    }
    let _ = writeln!(out, "{}", if v.all_pass { "all checks pass" } else { "SOME CHECKS FAILED" });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse_scenario, FIXTURES};

    #[test]
    fn verify_paper_passes() {
        let report = verify_paper().unwrap();
        let v = report.verify().unwrap();
        for r in &v.rows {
            assert_ne!(r.status, Status::Fail, "{r:?}");
        }
        assert!(v.all_pass);
        let statuses: std::collections::BTreeSet<&str> = v.rows.iter().map(|r| r.status.as_str()).collect();
        assert_eq!(statuses.into_iter().collect::<Vec<_>>(), ["DERIVED-MATCH", "PAPER-MATCH", "PROPERTY-PASS"]);
        for check in 1..=5 {
            assert!(v.rows.iter().any(|r| r.check == check));
        }
    }

    #[test]
    fn feynman_measure() {
        let r = measure(&fixture("feynman").unwrap()).unwrap();
        assert!((r.measured[0] + 0.5).abs() < 1e-12 && (r.measured[1] + 1.0).abs() < 1e-12);
        assert!(!r.joint_psd);
        assert_eq!(r.marginal_psd, vec![true, true]);
        assert!(r.reinterpretation.identity_residual < 1e-12);
        assert!(r.bell.is_none());
    }

    #[test]
    fn displayed_feynman_matrix_has_signed_x_marginal() {
        let r = measure(&fixture("feynman-displayed").unwrap()).unwrap();
        assert!((r.marginals[0].weight_of(&[1.0]).unwrap() + 0.125).abs() < 1e-12);
        assert_eq!(r.marginal_psd, vec![false, true]);
    }

    #[test]
    fn bell_fixtures() {
        let b = bell_section(&fixture("m5-bell").unwrap()).unwrap();
        assert!(b.report.satisfied);
        assert!(b.notes.iter().any(|n| n.contains("erratum")));
        let b = bell_section(&fixture("m3-witness").unwrap()).unwrap();
        assert!((b.report.lhs - 3.0).abs() < 1e-12 && !b.report.satisfied);
        assert!(matches!(run(&fixture("feynman").unwrap(), Command::Bell), Err(Error::Shape(_))));
    }

    #[test]
    fn evolve_fixtures() {
        let Outcome::Evolve(e) = run(&fixture("m2-boost").unwrap(), Command::Evolve).unwrap().result else {
            panic!()
        };
        assert!(e.trace.diverged && !e.trace.converged);
        assert_eq!(e.observable_source, "folded-column-1");
        let Outcome::Evolve(e) = run(&fixture("rotation").unwrap(), Command::Evolve).unwrap().result else {
            panic!()
        };
        assert!(e.trace.converged && e.trace.limit_estimate.abs() < 1e-3);
        assert!(e.trace.heisenberg_max_deviation.unwrap() < 1e-9);
    }

    #[test]
    fn spectral_of_diagonal_columns() {
        let Outcome::Spectral(s) = run(&fixture("m5-bell").unwrap(), Command::Spectral).unwrap().result else {
            panic!()
        };
        assert!(s.columns_commute);
        assert_eq!(s.entries.len(), 3);
        // folded column A: diag(-1, 1, 1, 1, -1)
        assert_eq!(s.entries[0].eigenvalues, vec![-1.0, -1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn echoed_scenario_reproduces_report_exactly() {
        for name in FIXTURES {
            let s = fixture(name).unwrap();
            for command in [Command::Measure, Command::Bell, Command::Search, Command::Evolve, Command::Spectral] {
                let Ok(first) = run(&s, command) else { continue };
                let echo = serde_json::to_string(first.scenario.as_ref().unwrap()).unwrap();
                let second = run(&parse_scenario(&echo).unwrap(), command).unwrap();
                assert_eq!(first.to_json(), second.to_json(), "{name} {command}");
            }
        }
    }

    #[test]
    fn overrides_are_echoed() {
        let s = fixture("m3-witness").unwrap();
        let o = Overrides {
            norm_cap: Some(1.5),
            constraints: Some(ConstraintSet::PairwiseNonneg),
            steps: Some(7),
            tol: Some(1e-8),
        };
        let s2 = o.apply(&s).unwrap();
        let r = run(&s2, Command::Search).unwrap();
        let echo = r.scenario.unwrap();
        assert_eq!(echo.options.norm_cap, 1.5);
        assert_eq!(echo.options.constraints, ConstraintSet::PairwiseNonneg);
        assert_eq!(echo.options.steps, 7);
        assert_eq!(r.diagnostics.tol, 1e-8);
        assert!(Overrides { norm_cap: Some(0.5), ..Default::default() }.apply(&s).is_err());
    }

    #[test]
    fn command_names_round_trip() {
        for c in Command::ALL {
            assert_eq!(c.as_str().parse::<Command>().unwrap(), c);
        }
        assert!("frobnicate".parse::<Command>().is_err());
    }
}
