//! Problem-file ingestion, report building, and the machine-readable
//! output formats behind the `isotone` binary.
//!
//! Problem files are JSON with exactly one of three forms:
//!
//! ```json
//! { "k": [24.0, 24.0], "M": [[20.0, 18.0], [20.0, 45.0]] }
//! { "circuit": { "E": 24.0, "r": [0.04, 0.06], "P": [500.0, 450.0] } }
//! { "general": { "Mbar": [[0.04, 0.04], [0.04, 0.1]], "P": [500.0, 450.0], "k": [24.0, 24.0] } }
//! ```
//!
//! plus optional `"tol"` and `"budget"` fields. Command-line flags override
//! file-level settings, which override the defaults.
//!
//! Reports are emitted as JSON with every real printed at 17 significant
//! digits, so serialized values round-trip losslessly; CSV output uses `.`
//! decimal separators and comma delimiters and is bit-stable across runs.

use std::fmt::Write as _;
use std::time::Instant;

use serde::Deserialize;

use crate::circuit;
use crate::error::{Error, Result};
use crate::iteration::{self, IterationTrace, Problem, TraceStatus};
use crate::matrix::NonnegMatrix;
use crate::order::{PositiveVector, Vector};
use crate::steady_state::{self, BasinProber, ExistenceVerdict, StabilityCertificate};

/// Flag-level overrides; highest precedence.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub budget: Option<usize>,
}

/// A parsed and validated problem plus effective settings.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub problem: Problem,
    pub tol: f64,
    pub budget: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    k: Option<Vec<f64>>,
    #[serde(rename = "M")]
    m: Option<Vec<Vec<f64>>>,
    circuit: Option<RawCircuit>,
    general: Option<RawGeneral>,
    tol: Option<f64>,
    budget: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    #[serde(rename = "E")]
    e: f64,
    r: Vec<f64>,
    #[serde(rename = "P")]
    p: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeneral {
    #[serde(rename = "Mbar")]
    mbar: Vec<Vec<f64>>,
    #[serde(rename = "P")]
    p: Vec<f64>,
    k: Vec<f64>,
}

/// Parses a problem file and applies setting precedence.
pub fn load_problem(json: &str, overrides: Overrides) -> Result<LoadedProblem> {
    let raw: RawFile =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("problem file: {e}")))?;

    let explicit = raw.k.is_some() || raw.m.is_some();
    let forms = explicit as u8 + raw.circuit.is_some() as u8 + raw.general.is_some() as u8;
    if forms != 1 {
        return Err(Error::InvalidInput(format!(
            "problem file must contain exactly one of 'k'+'M', 'circuit', or 'general'; found {forms}"
        )));
    }

    let problem = if explicit {
        let k = raw.k.ok_or_else(|| Error::InvalidInput("missing field 'k'".into()))?;
        let m = raw.m.ok_or_else(|| Error::InvalidInput("missing field 'M'".into()))?;
        let m = NonnegMatrix::from_rows(m)
            .map_err(|e| Error::InvalidInput(format!("field 'M': {e}")))?;
        let k = Vector::new(k).map_err(|e| Error::InvalidInput(format!("field 'k': {e}")))?;
        Problem::new(k, m)
            .map_err(|e| Error::InvalidInput(format!("fields 'k'/'M': {e}")))?
    } else if let Some(c) = raw.circuit {
        if c.r.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "field 'circuit.r': expected 2 resistances, got {}",
                c.r.len()
            )));
        }
        if c.p.len() != 2 {
            return Err(Error::InvalidInput(format!(
                "field 'circuit.P': expected 2 powers, got {}",
                c.p.len()
            )));
        }
        circuit::build_two_cpl(c.e, c.r[0], c.r[1], c.p[0], c.p[1])
            .map_err(|e| Error::InvalidInput(format!("field 'circuit': {e}")))?
    } else {
        let g = raw.general.expect("one form present");
        let p = Vector::new(g.p)
            .map_err(|e| Error::InvalidInput(format!("field 'general.P': {e}")))?;
        let k = Vector::new(g.k)
            .map_err(|e| Error::InvalidInput(format!("field 'general.k': {e}")))?;
        circuit::build_general(&g.mbar, &p, k)
            .map_err(|e| Error::InvalidInput(format!("field 'general': {e}")))?
    };

    let tol = overrides.tol.or(raw.tol).unwrap_or(iteration::DEFAULT_TOL);
    let budget = overrides.budget.or(raw.budget).unwrap_or(iteration::DEFAULT_BUDGET);
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("field 'tol': must be > 0".into()));
    }
    if budget < 1 {
        return Err(Error::InvalidInput("field 'budget': must be >= 1".into()));
    }
    Ok(LoadedProblem { problem, tol, budget })
}

/// Echo of the analyzed problem inside a report.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct ProblemEcho {
    pub k: Vec<f64>,
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct BoundsReport {
    pub delta: Vec<f64>,
    pub necessary_ok: bool,
    pub y_min: Option<Vec<f64>>,
    pub y_max: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum VerdictReport {
    Exists { dominant: Vec<f64> },
    NotExists { witness_step: i64, witness: Vec<f64> },
    Indeterminate { steps: usize, last: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CertificateReport {
    pub rho: f64,
    pub classification: String,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct FixedPointReport {
    pub point: Vec<f64>,
    pub residual: f64,
    pub dominant: bool,
}

/// The full analysis document.
#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct Report {
    pub problem: ProblemEcho,
    pub tol: f64,
    pub budget: usize,
    pub bounds: BoundsReport,
    pub verdict: VerdictReport,
    pub certificate: Option<CertificateReport>,
    pub fixed_points: Option<Vec<FixedPointReport>>,
    pub comparability: Option<Vec<Vec<String>>>,
    pub timing_seconds: f64,
}

impl Report {
    pub fn from_json(json: &str) -> Result<Report> {
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("report: {e}")))
    }

    /// Equality ignoring the timing field.
    pub fn eq_modulo_timing(&self, other: &Report) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.timing_seconds = 0.0;
        b.timing_seconds = 0.0;
        a == b
    }

    /// Deterministic JSON with every real at 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut s = String::new();
        s.push_str("{\n");
        s.push_str("  \"problem\": {\n");
        let _ = writeln!(s, "    \"k\": {},", reals(&self.problem.k));
        let _ = writeln!(s, "    \"M\": {}", matrix(&self.problem.m, "    "));
        s.push_str("  },\n");
        let _ = writeln!(s, "  \"tol\": {},", real(self.tol));
        let _ = writeln!(s, "  \"budget\": {},", self.budget);
        s.push_str("  \"bounds\": {\n");
        let _ = writeln!(s, "    \"delta\": {},", reals(&self.bounds.delta));
        let _ = writeln!(s, "    \"necessary_ok\": {},", self.bounds.necessary_ok);
        let _ = writeln!(s, "    \"y_min\": {},", opt_reals(&self.bounds.y_min));
        let _ = writeln!(s, "    \"y_max\": {}", opt_reals(&self.bounds.y_max));
        s.push_str("  },\n");
        s.push_str("  \"verdict\": {\n");
        match &self.verdict {
            VerdictReport::Exists { dominant } => {
                s.push_str("    \"outcome\": \"exists\",\n");
                let _ = writeln!(s, "    \"dominant\": {}", reals(dominant));
            }
            VerdictReport::NotExists { witness_step, witness } => {
                s.push_str("    \"outcome\": \"not_exists\",\n");
                let _ = writeln!(s, "    \"witness_step\": {witness_step},");
                let _ = writeln!(s, "    \"witness\": {}", reals(witness));
            }
            VerdictReport::Indeterminate { steps, last } => {
                s.push_str("    \"outcome\": \"indeterminate\",\n");
                let _ = writeln!(s, "    \"steps\": {steps},");
                let _ = writeln!(s, "    \"last\": {}", reals(last));
            }
        }
        s.push_str("  },\n");
        match &self.certificate {
            Some(c) => {
                s.push_str("  \"certificate\": {\n");
                let _ = writeln!(s, "    \"rho\": {},", real(c.rho));
                let _ = writeln!(s, "    \"classification\": \"{}\"", c.classification);
                s.push_str("  },\n");
            }
            None => s.push_str("  \"certificate\": null,\n"),
        }
        match &self.fixed_points {
            Some(points) => {
                s.push_str("  \"fixed_points\": [\n");
                for (i, fp) in points.iter().enumerate() {
                    let comma = if i + 1 < points.len() { "," } else { "" };
                    let _ = writeln!(
                        s,
                        "    {{ \"point\": {}, \"residual\": {}, \"dominant\": {} }}{comma}",
                        reals(&fp.point),
                        real(fp.residual),
                        fp.dominant
                    );
                }
                s.push_str("  ],\n");
            }
            None => s.push_str("  \"fixed_points\": null,\n"),
        }
        match &self.comparability {
            Some(rows) => {
                let body: Vec<String> = rows
                    .iter()
                    .map(|row| {
                        let cells: Vec<String> =
                            row.iter().map(|c| format!("\"{c}\"")).collect();
                        format!("[{}]", cells.join(", "))
                    })
                    .collect();
                let _ = writeln!(s, "  \"comparability\": [{}],", body.join(", "));
            }
            None => s.push_str("  \"comparability\": null,\n"),
        }
        let _ = writeln!(s, "  \"timing_seconds\": {}", real(self.timing_seconds));
        s.push_str("}\n");
        s
    }
}

/// 17 significant digits; round-trips every finite f64 exactly.
fn real(x: f64) -> String {
    format!("{:.16e}", x)
}

fn reals(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| real(*x)).collect();
    format!("[{}]", items.join(", "))
}

fn opt_reals(xs: &Option<Vec<f64>>) -> String {
    match xs {
        Some(v) => reals(v),
        None => "null".into(),
    }
}

fn matrix(rows: &[Vec<f64>], indent: &str) -> String {
    let body: Vec<String> = rows.iter().map(|r| format!("{indent}  {}", reals(r))).collect();
    format!("[\n{}\n{indent}]", body.join(",\n"))
}

fn problem_echo(p: &Problem) -> ProblemEcho {
    let n = p.dim();
    ProblemEcho {
        k: p.offset().as_slice().to_vec(),
        m: (0..n).map(|i| p.matrix().row(i).to_vec()).collect(),
    }
}

fn verdict_report(v: &ExistenceVerdict) -> VerdictReport {
    match v {
        ExistenceVerdict::Exists { dominant } => VerdictReport::Exists {
            dominant: dominant.as_slice().to_vec(),
        },
        ExistenceVerdict::NotExists { witness_step, witness } => VerdictReport::NotExists {
            witness_step: *witness_step,
            witness: witness.as_slice().to_vec(),
        },
        ExistenceVerdict::Indeterminate { trace } => VerdictReport::Indeterminate {
            steps: trace.total_steps(),
            last: trace.last().1.as_slice().to_vec(),
        },
    }
}

fn certificate_report(c: &StabilityCertificate) -> CertificateReport {
    CertificateReport {
        rho: c.rho,
        classification: c.classification.as_str().to_string(),
    }
}

fn fixed_point_reports(p: &Problem, roots: &[PositiveVector]) -> Result<Vec<FixedPointReport>> {
    let mut out = Vec::with_capacity(roots.len());
    for (i, r) in roots.iter().enumerate() {
        let mut dominant = true;
        for (j, other) in roots.iter().enumerate() {
            if i != j && !other.as_vector().leq(r.as_vector())? {
                dominant = false;
                break;
            }
        }
        out.push(FixedPointReport {
            point: r.as_slice().to_vec(),
            residual: p.residual(r)?,
            dominant,
        });
    }
    Ok(out)
}

/// Full analysis: bounds, existence verdict, polished dominant point with
/// certificate; for n <= 2 the report also enumerates all fixed points.
pub fn cmd_analyze(lp: &LoadedProblem) -> Result<Report> {
    let started = Instant::now();
    let p = &lp.problem;
    let b = steady_state::bounds(p);
    let verdict = steady_state::decide_existence(p, lp.tol, lp.budget)?;

    let (verdict_out, certificate) = match &verdict {
        ExistenceVerdict::Exists { .. } => {
            let (dominant, cert) = steady_state::dominant_fixed_point(p, lp.tol, lp.budget)?;
            (
                VerdictReport::Exists { dominant: dominant.as_slice().to_vec() },
                Some(certificate_report(&cert)),
            )
        }
        other => (verdict_report(other), None),
    };

    let fixed_points = if p.dim() <= 2 {
        let roots = steady_state::enumerate_small(p, steady_state::ENUM_GRID_DEFAULT, lp.tol)?;
        Some(fixed_point_reports(p, &roots)?)
    } else {
        None
    };

    Ok(Report {
        problem: problem_echo(p),
        tol: lp.tol,
        budget: lp.budget,
        bounds: BoundsReport {
            delta: b.delta().as_slice().to_vec(),
            necessary_ok: b.necessary_ok(),
            y_min: b.y_min().map(|v| v.as_slice().to_vec()),
            y_max: b.y_max().map(|v| v.as_slice().to_vec()),
        },
        verdict: verdict_out,
        certificate,
        fixed_points,
        comparability: None,
        timing_seconds: started.elapsed().as_secs_f64(),
    })
}

/// CSV rows for the iteration trace started at `start`: one row per
/// recorded iterate, a trailing comment line with the terminal status.
pub fn cmd_trace(lp: &LoadedProblem, start: &[f64]) -> Result<String> {
    let y0 = PositiveVector::new(start.to_vec())
        .map_err(|e| Error::InvalidInput(format!("start vector: {e}")))?;
    if y0.dim() != lp.problem.dim() {
        return Err(Error::InvalidInput(format!(
            "start vector: expected {} components, got {}",
            lp.problem.dim(),
            y0.dim()
        )));
    }
    let trace = iteration::iterate(&lp.problem, &y0, lp.tol, lp.budget)?;
    Ok(trace_csv(&trace))
}

/// Renders a recorded trace as CSV.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let n = trace.start().dim();
    let mut s = String::new();
    let header: Vec<String> = (1..=n).map(|i| format!("y{i}")).collect();
    let _ = writeln!(s, "step,{},step_sup,in_domain", header.join(","));
    let mut prev: Option<&Vector> = None;
    for (step, y) in trace.records() {
        let comps: Vec<String> = y.as_slice().iter().map(|x| real(*x)).collect();
        let sup = match prev {
            Some(p) => real(y.sup_distance(p).expect("equal dims")),
            None => String::new(),
        };
        let _ = writeln!(s, "{step},{},{sup},{}", comps.join(","), y.is_positive());
        prev = Some(y);
    }
    let status = match trace.status() {
        TraceStatus::Converged { .. } => format!("converged steps={}", trace.total_steps()),
        TraceStatus::DomainExit { step } => format!("domain_exit step={step}"),
        TraceStatus::BudgetExhausted => format!("budget_exhausted steps={}", trace.total_steps()),
    };
    let _ = writeln!(s, "# status={status} monotonicity={}", trace.monotonicity().as_str());
    s
}

/// CSV classification of iteration starts over a `grid` x `grid` lattice
/// spanning the box (n = 2 only). Rows are ordered by grid index.
pub fn cmd_basin(
    lp: &LoadedProblem,
    lower: (f64, f64),
    upper: (f64, f64),
    grid: usize,
) -> Result<String> {
    if lp.problem.dim() != 2 {
        return Err(Error::UnsupportedSize { what: "basin grid", n: lp.problem.dim(), max: 2 });
    }
    if grid < 2 {
        return Err(Error::InvalidInput("field 'grid': must be >= 2".into()));
    }
    if !(lower.0 > 0.0 && lower.1 > 0.0) {
        return Err(Error::InvalidInput("box corners must be positive".into()));
    }
    if !(lower.0 < upper.0 && lower.1 < upper.1) {
        return Err(Error::InvalidInput(
            "box corners must satisfy lower < upper in both coordinates".into(),
        ));
    }

    let prober = BasinProber::new(&lp.problem, lp.tol, lp.budget)?;
    let mut s = String::new();
    s.push_str("y1,y2,class,iterations\n");
    for i in 0..grid {
        let t0 = i as f64 / (grid - 1) as f64;
        let x = lower.0 + t0 * (upper.0 - lower.0);
        for j in 0..grid {
            let t1 = j as f64 / (grid - 1) as f64;
            let y = lower.1 + t1 * (upper.1 - lower.1);
            let start = PositiveVector::new(vec![x, y]).expect("positive corners");
            let (class, iters) = prober.probe(&start)?;
            let _ = writeln!(s, "{},{},{},{iters}", real(x), real(y), class.as_str());
        }
    }
    Ok(s)
}

/// Enumerates all fixed points (n <= 3) into a report carrying residuals,
/// dominance flags, and the pairwise comparability matrix.
pub fn cmd_enumerate(lp: &LoadedProblem, grid: Option<usize>) -> Result<Report> {
    let started = Instant::now();
    let p = &lp.problem;
    let grid = grid.unwrap_or(steady_state::ENUM_GRID_DEFAULT);
    let roots = steady_state::enumerate_small(p, grid, lp.tol)?;
    let b = steady_state::bounds(p);
    let verdict = steady_state::decide_existence(p, lp.tol, lp.budget)?;
    let (verdict_out, certificate) = match &verdict {
        ExistenceVerdict::Exists { .. } => {
            let (dominant, cert) = steady_state::dominant_fixed_point(p, lp.tol, lp.budget)?;
            (
                VerdictReport::Exists { dominant: dominant.as_slice().to_vec() },
                Some(certificate_report(&cert)),
            )
        }
        other => (verdict_report(other), None),
    };

    let mut comparability = Vec::with_capacity(roots.len());
    for a in &roots {
        let mut row = Vec::with_capacity(roots.len());
        for b in &roots {
            let rel = if a.as_vector() == b.as_vector() {
                "equal"
            } else if a.as_vector().leq(b.as_vector())? {
                "less"
            } else if b.as_vector().leq(a.as_vector())? {
                "greater"
            } else {
                "incomparable"
            };
            row.push(rel.to_string());
        }
        comparability.push(row);
    }

    Ok(Report {
        problem: problem_echo(p),
        tol: lp.tol,
        budget: lp.budget,
        bounds: BoundsReport {
            delta: b.delta().as_slice().to_vec(),
            necessary_ok: b.necessary_ok(),
            y_min: b.y_min().map(|v| v.as_slice().to_vec()),
            y_max: b.y_max().map(|v| v.as_slice().to_vec()),
        },
        verdict: verdict_out,
        certificate,
        fixed_points: Some(fixed_point_reports(p, &roots)?),
        comparability: Some(comparability),
        timing_seconds: started.elapsed().as_secs_f64(),
    })
}

/// Maps an error to the process exit status: 3 for internal budget
/// exhaustion where a verdict was required, 2 for input and other errors.
/// Completed analyses exit 0 whatever the verdict.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SpectralBudget { .. } | Error::Undecided => 3,
        _ => 2,
    }
}
